//! Problem files.
//!
//! ```text
//! # comments run to the end of the line
//! [ring]
//! coordinates = x, y, z
//! d1 = differentiate(x)       # or multiply(x), shift(x)
//! shift_step = 1              # optional
//! ore = t, dt                 # instead of generators: the Weyl algebra in t
//!
//! [matrix]
//! components = u, v, w        # optional names of the columns
//! d1, d2, d3
//!
//! [kernel]
//! lengthscale = 1             # one value, or one per latent component
//! variance = 1
//! noise = 1e-6
//! jitter = 1e-8               # absolute; default is relative to the Gram diagonal
//! fit_noise = 1e-8, 1e-6      # optional grid for `fit`
//!
//! [data]
//! u(0, 0, 1) = 1/2
//!
//! [query]
//! v(1, 0, 0)
//! grid u, v at x = -1:1:5, y = 0, z = 0
//! ```

use std::fmt;

use num_traits::Zero;
use syzygp_core::algebra::{rational_to_f64, Action, OperatorMatrix, Rational, Ring};
use syzygp_core::ore::{OreMatrix, OreRing};
use syzygp_core::text::{self, ExprTarget, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ProblemError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ProblemError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ProblemError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// The operator matrix together with its ring.
#[derive(Clone, Debug, PartialEq)]
pub enum System {
    Polynomial(OperatorMatrix),
    Ore {
        ring: OreRing,
        coordinate: usize,
        matrix: OreMatrix,
    },
}

impl System {
    pub fn nrows(&self) -> usize {
        match self {
            System::Polynomial(m) => m.nrows(),
            System::Ore { matrix, .. } => matrix.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            System::Polynomial(m) => m.ncols(),
            System::Ore { matrix, .. } => matrix.ncols(),
        }
    }

    /// Matrix rows in the text grammar.
    pub fn rows(&self) -> Vec<String> {
        match self {
            System::Polynomial(m) => m.to_string().lines().map(str::to_owned).collect(),
            System::Ore { ring, matrix, .. } => matrix.print(ring).lines().map(str::to_owned).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub lengthscale: Vec<f64>,
    pub variance: Vec<f64>,
    pub noise: Option<f64>,
    pub jitter: Option<f64>,
    pub fit_lengthscale: Vec<f64>,
    pub fit_variance: Vec<f64>,
    pub fit_noise: Vec<f64>,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            lengthscale: vec![1.0],
            variance: vec![1.0],
            noise: None,
            jitter: None,
            fit_lengthscale: Vec::new(),
            fit_variance: Vec::new(),
            fit_noise: Vec::new(),
        }
    }
}

impl KernelSpec {
    pub fn has_grid(&self) -> bool {
        !(self.fit_lengthscale.is_empty() && self.fit_variance.is_empty() && self.fit_noise.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataLine {
    pub component: usize,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Axis {
    Fixed(f64),
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    Range {
        start: f64,
        stop: f64,
        count: usize,
    },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(x) => vec![x],
            Axis::Range { start, stop, count } => {
                if count == 1 {
                    return vec![start];
                }
                let step = (stop - start) / (count - 1) as f64;
                (0..count).map(|i| start + step * i as f64).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryLine {
    Point { component: usize, point: Vec<f64> },
    Grid { components: Vec<usize>, axes: Vec<Axis> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub coordinates: Vec<String>,
    pub system: System,
    pub components: Vec<String>,
    pub kernel: KernelSpec,
    pub data: Vec<DataLine>,
    pub queries: Vec<QueryLine>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Ring,
    Matrix,
    Kernel,
    Data,
    Query,
}

impl Section {
    fn from_name(s: &str) -> Option<Section> {
        Some(match s {
            "ring" => Section::Ring,
            "matrix" => Section::Matrix,
            "kernel" => Section::Kernel,
            "data" => Section::Data,
            "query" => Section::Query,
            _ => return None,
        })
    }
}

/// A source line with its 1-based number; `text` has comments removed.
#[derive(Clone, Copy)]
struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> ProblemError {
        ProblemError::new(self.number, column, message)
    }

    fn lift(&self, e: ParseError, offset: usize) -> ProblemError {
        ProblemError::new(self.number, e.column + offset, e.message)
    }

    /// Splits `key = value`, returning the value's column offset.
    fn key_value(&self) -> Option<(&str, &str, usize)> {
        let (k, v) = self.text.split_once('=')?;
        Some((k.trim(), v, k.chars().count() + 1))
    }

    /// Column (1-based) of the first non-blank character.
    fn indent(&self) -> usize {
        self.text.chars().take_while(|c| c.is_whitespace()).count() + 1
    }
}

#[derive(Clone)]
struct Exact(Rational);

impl ExprTarget for Exact {
    fn constant(&self, c: &Rational) -> Self {
        Exact(c.clone())
    }

    fn ident(&self, name: &str, column: usize) -> Result<Self, ParseError> {
        Err(ParseError::new(column, format!("unexpected name `{name}` in a number")))
    }

    fn add(&self, other: &Self) -> Self {
        Exact(&self.0 + &other.0)
    }

    fn sub(&self, other: &Self) -> Self {
        Exact(&self.0 - &other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        Exact(&self.0 * &other.0)
    }

    fn div(&self, other: &Self, column: usize) -> Result<Self, ParseError> {
        if other.0.is_zero() {
            return Err(ParseError::new(column, "division by zero"));
        }
        Ok(Exact(&self.0 / &other.0))
    }
}

/// Evaluates a constant expression such as `1/(1.1^4 + 1)` exactly.
fn exact_value(src: &str) -> Result<Rational, ParseError> {
    let e = text::parse_expr(src)?;
    Ok(text::eval_expr(&e, &Exact(Rational::zero()))?.0)
}

fn number(line: &Line, src: &str, offset: usize) -> Result<f64, ProblemError> {
    exact_value(src)
        .map(|r| rational_to_f64(&r))
        .map_err(|e| line.lift(e, offset))
}

/// Comma-separated numbers with their column offsets.
fn numbers(line: &Line, src: &str, offset: usize) -> Result<Vec<f64>, ProblemError> {
    let mut out = Vec::new();
    let mut off = offset;
    for cell in src.split(',') {
        out.push(number(line, cell, off)?);
        off += cell.chars().count() + 1;
    }
    Ok(out)
}

fn names(src: &str) -> Vec<String> {
    src.split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect()
}

fn is_identifier(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

struct RingParts {
    coordinates: Vec<String>,
    generators: Vec<(String, Action)>,
    ore: Option<(String, String)>,
    shift_step: Option<Rational>,
}

fn parse_ring(lines: &[Line], header: usize) -> Result<RingParts, ProblemError> {
    let mut parts = RingParts {
        coordinates: Vec::new(),
        generators: Vec::new(),
        ore: None,
        shift_step: None,
    };
    let mut generator_lines = Vec::new();
    for line in lines {
        let (key, value, off) = line
            .key_value()
            .ok_or_else(|| line.err(line.indent(), "expected `key = value`"))?;
        match key {
            "coordinates" => parts.coordinates = names(value),
            "ore" => {
                let n = names(value);
                if n.len() != 2 {
                    return Err(line.err(off + 1, "expected `ore = variable, derivation`"));
                }
                parts.ore = Some((n[0].clone(), n[1].clone()));
            }
            "shift_step" => {
                let r = exact_value(value).map_err(|e| line.lift(e, off))?;
                parts.shift_step = Some(r);
            }
            name if is_identifier(name) => generator_lines.push((line, name.to_owned(), value, off)),
            _ => return Err(line.err(line.indent(), format!("`{key}` is not a generator name"))),
        }
    }
    if parts.coordinates.is_empty() {
        return Err(ProblemError::new(header, 1, "[ring] needs `coordinates = ...`"));
    }
    for (line, name, value, off) in generator_lines {
        let v = value.trim();
        let (kind, rest) = v
            .split_once('(')
            .ok_or_else(|| line.err(off + 1, "expected `differentiate(c)`, `multiply(c)` or `shift(c)`"))?;
        let coord = rest
            .strip_suffix(')')
            .ok_or_else(|| line.err(off + 1, "missing `)`"))?
            .trim();
        let c = parts
            .coordinates
            .iter()
            .position(|x| x == coord)
            .ok_or_else(|| line.err(off + 1, format!("unknown coordinate `{coord}`")))?;
        let action = match kind.trim() {
            "differentiate" => Action::Differentiate(c),
            "multiply" => Action::Multiply(c),
            "shift" => Action::Shift(c),
            other => return Err(line.err(off + 1, format!("unknown action `{other}`"))),
        };
        parts.generators.push((name, action));
    }
    match (&parts.ore, parts.generators.is_empty()) {
        (Some(_), false) => Err(ProblemError::new(header, 1, "an Ore ring takes no generator lines")),
        (None, true) => Err(ProblemError::new(header, 1, "[ring] declares no generators")),
        _ => Ok(parts),
    }
}

fn parse_matrix(
    ring: &RingParts,
    lines: &[Line],
    header: usize,
) -> Result<(System, Vec<String>, Option<usize>), ProblemError> {
    let mut components = None;
    let mut rows: Vec<Line> = Vec::new();
    for line in lines {
        match line.key_value() {
            Some(("components", value, _)) => components = Some((names(value), line.number)),
            Some((key, _, _)) => return Err(line.err(line.indent(), format!("unexpected `{key} =` in [matrix]"))),
            None => rows.push(*line),
        }
    }
    if rows.is_empty() {
        return Err(ProblemError::new(header, 1, "[matrix] has no rows"));
    }
    let texts: Vec<&str> = rows.iter().map(|l| l.text).collect();
    let locate = |e: ParseError| {
        let line = rows[e.line - 1];
        let entry = line
            .text
            .chars()
            .take(e.column.saturating_sub(1))
            .filter(|&c| c == ',')
            .count()
            + 1;
        ProblemError::new(
            line.number,
            e.column,
            format!("matrix row {}, entry {entry}: {}", e.line, e.message),
        )
    };
    let system = match &ring.ore {
        Some((var, deriv)) => {
            let coordinate = ring
                .coordinates
                .iter()
                .position(|c| c == var)
                .ok_or_else(|| ProblemError::new(header, 1, format!("Ore variable `{var}` is not a coordinate")))?;
            let oring = OreRing::new(var.clone(), deriv.clone());
            let matrix = OreMatrix::parse_rows(&oring, &texts).map_err(locate)?;
            System::Ore {
                ring: oring,
                coordinate,
                matrix,
            }
        }
        None => {
            let (names, actions): (Vec<String>, Vec<Action>) = ring.generators.iter().cloned().unzip();
            let mut r = Ring::with_actions(names, actions).map_err(|e| ProblemError::new(header, 1, e.to_string()))?;
            if let Some(step) = &ring.shift_step {
                r = r.with_shift_step(step.clone());
            }
            System::Polynomial(OperatorMatrix::parse_rows(r, &texts).map_err(locate)?)
        }
    };
    let ncols = system.ncols();
    let (names, line) = match components {
        Some((n, line)) => (n, Some(line)),
        None => ((1..=ncols).map(|i| format!("f{i}")).collect(), None),
    };
    if names.len() != ncols {
        return Err(ProblemError::new(
            line.unwrap_or(header),
            1,
            format!("{} component names for {ncols} columns", names.len()),
        ));
    }
    for (i, n) in names.iter().enumerate() {
        if !is_identifier(n) || names[..i].contains(n) {
            return Err(ProblemError::new(
                line.unwrap_or(header),
                1,
                format!("bad or duplicate component name `{n}`"),
            ));
        }
    }
    Ok((system, names, line))
}

fn parse_kernel(lines: &[Line]) -> Result<KernelSpec, ProblemError> {
    let mut k = KernelSpec::default();
    for line in lines {
        let (key, value, off) = line
            .key_value()
            .ok_or_else(|| line.err(line.indent(), "expected `key = value`"))?;
        let vals = numbers(line, value, off)?;
        let single = || -> Result<f64, ProblemError> {
            match vals.as_slice() {
                [v] => Ok(*v),
                _ => Err(line.err(off + 1, format!("`{key}` takes a single value"))),
            }
        };
        let positive = |v: &[f64]| -> Result<(), ProblemError> {
            if v.iter().all(|x| *x > 0.0 && x.is_finite()) {
                Ok(())
            } else {
                Err(line.err(off + 1, format!("`{key}` must be positive")))
            }
        };
        let nonnegative = |v: &[f64]| -> Result<(), ProblemError> {
            if v.iter().all(|x| *x >= 0.0 && x.is_finite()) {
                Ok(())
            } else {
                Err(line.err(off + 1, format!("`{key}` must be nonnegative")))
            }
        };
        match key {
            "lengthscale" => {
                positive(&vals)?;
                k.lengthscale = vals;
            }
            "variance" => {
                positive(&vals)?;
                k.variance = vals;
            }
            "noise" => {
                nonnegative(&vals)?;
                k.noise = Some(single()?);
            }
            "jitter" => {
                nonnegative(&vals)?;
                k.jitter = Some(single()?);
            }
            "fit_lengthscale" => {
                positive(&vals)?;
                k.fit_lengthscale = vals;
            }
            "fit_variance" => {
                positive(&vals)?;
                k.fit_variance = vals;
            }
            "fit_noise" => {
                nonnegative(&vals)?;
                k.fit_noise = vals;
            }
            _ => return Err(line.err(line.indent(), format!("unknown kernel key `{key}`"))),
        }
    }
    Ok(k)
}

/// `name(a, b, ...)` with the offset of the argument list.
fn call<'a>(line: &Line, src: &'a str, offset: usize) -> Result<(&'a str, &'a str, usize), ProblemError> {
    let open = src
        .find('(')
        .ok_or_else(|| line.err(offset + 1, "expected `component(coordinates)`"))?;
    let close = src
        .rfind(')')
        .filter(|&c| c > open)
        .ok_or_else(|| line.err(offset + open + 1, "missing `)`"))?;
    if !src[close + 1..].trim().is_empty() {
        return Err(line.err(offset + close + 2, "unexpected text after `)`"));
    }
    let args_off = offset + src[..open + 1].chars().count();
    Ok((src[..open].trim(), &src[open + 1..close], args_off))
}

fn component_index(line: &Line, components: &[String], name: &str, col: usize) -> Result<usize, ProblemError> {
    components
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| line.err(col, format!("unknown component `{name}`")))
}

fn parse_point(line: &Line, args: &str, off: usize, dim: usize) -> Result<Vec<f64>, ProblemError> {
    let p = numbers(line, args, off)?;
    if p.len() != dim {
        return Err(line.err(off, format!("{} coordinates given, expected {dim}", p.len())));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(line.err(off, "coordinates must be finite"));
    }
    Ok(p)
}

fn parse_data(lines: &[Line], components: &[String], dim: usize) -> Result<Vec<DataLine>, ProblemError> {
    let mut out = Vec::new();
    for line in lines {
        let (lhs, rhs) = line
            .text
            .rsplit_once('=')
            .ok_or_else(|| line.err(line.indent(), "expected `component(coordinates) = value`"))?;
        let (name, args, off) = call(line, lhs, 0)?;
        let component = component_index(line, components, name, line.indent())?;
        let point = parse_point(line, args, off, dim)?;
        let value = number(line, rhs, lhs.chars().count() + 1)?;
        if !value.is_finite() {
            return Err(line.err(lhs.chars().count() + 2, "value must be finite"));
        }
        out.push(DataLine {
            component,
            point,
            value,
        });
    }
    Ok(out)
}

fn parse_axis(line: &Line, src: &str, off: usize) -> Result<Axis, ProblemError> {
    let parts: Vec<&str> = src.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(Axis::Fixed(number(line, v, off)?)),
        [a, b, n] => {
            let start = number(line, a, off)?;
            let stop = number(line, b, off + a.chars().count() + 1)?;
            let n_off = off + a.chars().count() + b.chars().count() + 2;
            let count = n
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| line.err(n_off + 1, "grid count must be a positive integer"))?;
            Ok(Axis::Range { start, stop, count })
        }
        _ => Err(line.err(off + 1, "expected `value` or `start:stop:count`")),
    }
}

fn parse_queries(lines: &[Line], components: &[String], coords: &[String]) -> Result<Vec<QueryLine>, ProblemError> {
    let mut out = Vec::new();
    for line in lines {
        let t = line.text.trim_start();
        let lead = line.indent() - 1;
        if let Some(rest) = t.strip_prefix("grid ") {
            let (comps, axes_src) = rest
                .split_once(" at ")
                .ok_or_else(|| line.err(lead + 1, "expected `grid c1, c2 at x = ..., y = ...`"))?;
            let mut cs = Vec::new();
            for n in names(comps) {
                cs.push(component_index(line, components, &n, lead + 6)?);
            }
            if cs.is_empty() {
                return Err(line.err(lead + 6, "grid needs at least one component"));
            }
            let mut axes: Vec<Option<Axis>> = vec![None; coords.len()];
            let mut off = lead + 5 + comps.chars().count() + 4;
            for assign in axes_src.split(',') {
                let (k, v) = assign
                    .split_once('=')
                    .ok_or_else(|| line.err(off + 1, "expected `coordinate = range`"))?;
                let c = coords
                    .iter()
                    .position(|x| x == k.trim())
                    .ok_or_else(|| line.err(off + 1, format!("unknown coordinate `{}`", k.trim())))?;
                if axes[c].is_some() {
                    return Err(line.err(off + 1, format!("coordinate `{}` given twice", k.trim())));
                }
                axes[c] = Some(parse_axis(line, v, off + k.chars().count() + 1)?);
                off += assign.chars().count() + 1;
            }
            let axes = axes
                .into_iter()
                .enumerate()
                .map(|(i, a)| a.ok_or_else(|| line.err(lead + 1, format!("grid misses coordinate `{}`", coords[i]))))
                .collect::<Result<_, _>>()?;
            out.push(QueryLine::Grid { components: cs, axes });
        } else {
            let (name, args, off) = call(line, line.text, 0)?;
            let component = component_index(line, components, name, line.indent())?;
            let point = parse_point(line, args, off, coords.len())?;
            out.push(QueryLine::Point { component, point });
        }
    }
    Ok(out)
}

impl ProblemSpec {
    pub fn parse(src: &str) -> Result<ProblemSpec, ProblemError> {
        let mut sections: Vec<(Section, usize, Vec<Line>)> = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let text = raw.split('#').next().unwrap_or("");
            let line = Line { number: i + 1, text };
            let t = text.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let s = Section::from_name(name.trim())
                    .ok_or_else(|| line.err(line.indent(), format!("unknown section `[{name}]`")))?;
                if sections.iter().any(|(x, _, _)| *x == s) {
                    return Err(line.err(line.indent(), format!("section `[{name}]` appears twice")));
                }
                sections.push((s, i + 1, Vec::new()));
                continue;
            }
            match sections.last_mut() {
                Some((_, _, lines)) => lines.push(line),
                None => return Err(line.err(line.indent(), "expected a section header such as `[ring]`")),
            }
        }
        let get = |s: Section| sections.iter().find(|(x, _, _)| *x == s);
        let (_, ring_line, ring_lines) =
            get(Section::Ring).ok_or_else(|| ProblemError::new(1, 1, "missing [ring] section"))?;
        let ring = parse_ring(ring_lines, *ring_line)?;
        let (_, matrix_line, matrix_lines) =
            get(Section::Matrix).ok_or_else(|| ProblemError::new(1, 1, "missing [matrix] section"))?;
        let (system, components, _) = parse_matrix(&ring, matrix_lines, *matrix_line)?;
        let kernel = match get(Section::Kernel) {
            Some((_, _, lines)) => parse_kernel(lines)?,
            None => KernelSpec::default(),
        };
        let data = match get(Section::Data) {
            Some((_, _, lines)) => parse_data(lines, &components, ring.coordinates.len())?,
            None => Vec::new(),
        };
        let queries = match get(Section::Query) {
            Some((_, _, lines)) => parse_queries(lines, &components, &ring.coordinates)?,
            None => Vec::new(),
        };
        Ok(ProblemSpec {
            coordinates: ring.coordinates,
            system,
            components,
            kernel,
            data,
            queries,
        })
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }
}

/// Shortest representation that reads back to the same `f64`.
pub fn format_number(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}

fn join_numbers(v: &[f64]) -> String {
    v.iter().map(|x| format_number(*x)).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[ring]")?;
        writeln!(f, "coordinates = {}", self.coordinates.join(", "))?;
        match &self.system {
            System::Polynomial(m) => {
                let ring = m.ring();
                for (name, action) in ring.names().iter().zip(ring.actions()) {
                    let (kind, c) = match action {
                        Action::Differentiate(c) => ("differentiate", c),
                        Action::Multiply(c) => ("multiply", c),
                        Action::Shift(c) => ("shift", c),
                    };
                    writeln!(f, "{name} = {kind}({})", self.coordinates[*c])?;
                }
                if !num_traits::One::is_one(ring.shift_step()) {
                    writeln!(f, "shift_step = {}", ring.shift_step())?;
                }
            }
            System::Ore { ring, .. } => writeln!(f, "ore = {}, {}", ring.var(), ring.deriv())?,
        }
        writeln!(f, "\n[matrix]")?;
        writeln!(f, "components = {}", self.components.join(", "))?;
        for row in self.system.rows() {
            writeln!(f, "{row}")?;
        }
        let k = &self.kernel;
        writeln!(f, "\n[kernel]")?;
        writeln!(f, "lengthscale = {}", join_numbers(&k.lengthscale))?;
        writeln!(f, "variance = {}", join_numbers(&k.variance))?;
        if let Some(n) = k.noise {
            writeln!(f, "noise = {}", format_number(n))?;
        }
        if let Some(j) = k.jitter {
            writeln!(f, "jitter = {}", format_number(j))?;
        }
        for (key, v) in [
            ("fit_lengthscale", &k.fit_lengthscale),
            ("fit_variance", &k.fit_variance),
            ("fit_noise", &k.fit_noise),
        ] {
            if !v.is_empty() {
                writeln!(f, "{key} = {}", join_numbers(v))?;
            }
        }
        if !self.data.is_empty() {
            writeln!(f, "\n[data]")?;
            for d in &self.data {
                writeln!(
                    f,
                    "{}({}) = {}",
                    self.components[d.component],
                    join_numbers(&d.point),
                    format_number(d.value)
                )?;
            }
        }
        if !self.queries.is_empty() {
            writeln!(f, "\n[query]")?;
            for q in &self.queries {
                match q {
                    QueryLine::Point { component, point } => {
                        writeln!(f, "{}({})", self.components[*component], join_numbers(point))?
                    }
                    QueryLine::Grid { components, axes } => {
                        let cs: Vec<&str> = components.iter().map(|&c| self.components[c].as_str()).collect();
                        let ax: Vec<String> = axes
                            .iter()
                            .zip(&self.coordinates)
                            .map(|(a, c)| match a {
                                Axis::Fixed(x) => format!("{c} = {}", format_number(*x)),
                                Axis::Range { start, stop, count } => {
                                    format!("{c} = {}:{}:{count}", format_number(*start), format_number(*stop))
                                }
                            })
                            .collect();
                        writeln!(f, "grid {} at {}", cs.join(", "), ax.join(", "))?
                    }
                }
            }
        }
        Ok(())
    }
}
