use super::{left_divide, right_divide, OreError, OreRing, SkewPoly};
use crate::text::ParseError;

/// A matrix over ℚ(t)⟨∂⟩, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OreMatrix {
    nrows: usize,
    ncols: usize,
    entries: Vec<SkewPoly>,
}

impl OreMatrix {
    pub fn new(nrows: usize, ncols: usize, entries: Vec<SkewPoly>) -> Self {
        assert_eq!(entries.len(), nrows * ncols, "entry count does not match shape");
        OreMatrix { nrows, ncols, entries }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::new(nrows, ncols, vec![SkewPoly::zero(); nrows * ncols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, SkewPoly::one());
        }
        m
    }

    pub fn parse_rows<S: AsRef<str>>(ring: &OreRing, rows: &[S]) -> Result<Self, ParseError> {
        let mut entries = Vec::new();
        let mut ncols = None;
        for (i, row) in rows.iter().enumerate() {
            let mut offset = 0;
            let mut n = 0;
            for cell in row.as_ref().split(',') {
                entries.push(ring.parse(cell).map_err(|e| e.at_line(i + 1, offset))?);
                offset += cell.chars().count() + 1;
                n += 1;
            }
            match ncols {
                None => ncols = Some(n),
                Some(c) if c != n => {
                    return Err(
                        ParseError::new(1, format!("row {} has {n} entries, expected {c}", i + 1)).at_line(i + 1, 0),
                    )
                }
                _ => {}
            }
        }
        Ok(Self::new(rows.len(), ncols.unwrap_or(0), entries))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &SkewPoly {
        &self.entries[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: SkewPoly) {
        self.entries[i * self.ncols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(SkewPoly::is_zero)
    }

    pub fn mul(&self, other: &OreMatrix) -> Result<OreMatrix, OreError> {
        if self.ncols != other.nrows {
            return Err(OreError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = OreMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for j in 0..other.ncols {
                let mut acc = SkewPoly::zero();
                for k in 0..self.ncols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> OreMatrix {
        let mut out = OreMatrix::zeros(self.nrows, cols.len());
        for i in 0..self.nrows {
            for (k, &j) in cols.iter().enumerate() {
                out.set(i, k, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> OreMatrix {
        let mut out = OreMatrix::zeros(rows.len(), self.ncols);
        for (k, &i) in rows.iter().enumerate() {
            for j in 0..self.ncols {
                out.set(k, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// `col[dst] -= col[src] · q`
    fn col_sub_mul(&mut self, dst: usize, src: usize, q: &SkewPoly) {
        for i in 0..self.nrows {
            let v = self.get(i, dst).sub(&self.get(i, src).mul(q));
            self.set(i, dst, v);
        }
    }

    /// `row[dst] -= q · row[src]`
    fn row_sub_mul(&mut self, dst: usize, src: usize, q: &SkewPoly) {
        for j in 0..self.ncols {
            let v = self.get(dst, j).sub(&q.mul(self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    pub fn print(&self, ring: &OreRing) -> String {
        let mut s = String::new();
        for i in 0..self.nrows {
            let row: Vec<String> = (0..self.ncols).map(|j| ring.print(self.get(i, j))).collect();
            s.push_str(&row.join(", "));
            s.push('\n');
        }
        s
    }
}

/// Pick the nonzero entry of least degree, ties to the smallest index.
fn pivot_of(candidates: &[usize], degree: impl Fn(usize) -> Option<usize>) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .filter_map(|c| degree(c).map(|d| (d, c)))
        .min()
        .map(|(_, c)| c)
}

/// Column-reduces `a` by unimodular column operations; returns the
/// transformation `u` with `a·u` lower-triangular and the pivot columns.
fn column_reduce(a: &OreMatrix) -> (OreMatrix, Vec<usize>) {
    let mut m = a.clone();
    let mut u = OreMatrix::identity(a.ncols);
    let mut pivots = Vec::new();
    for r in 0..a.nrows {
        let active: Vec<usize> = (0..a.ncols).filter(|c| !pivots.contains(c)).collect();
        loop {
            let nonzero: Vec<usize> = active.iter().copied().filter(|&c| !m.get(r, c).is_zero()).collect();
            if nonzero.len() <= 1 {
                pivots.extend(nonzero);
                break;
            }
            let p = pivot_of(&nonzero, |c| m.get(r, c).degree()).unwrap();
            for &c in &nonzero {
                if c == p {
                    continue;
                }
                let (q, _) = left_divide(m.get(r, c), m.get(r, p)).expect("pivot is nonzero");
                m.col_sub_mul(c, p, &q);
                u.col_sub_mul(c, p, &q);
            }
        }
    }
    (u, pivots)
}

/// Row-reduces `a` by unimodular row operations; returns the reduced matrix,
/// the transformation `v` with `v·a` equal to it, and the pivots as
/// `(row, column)` in order of discovery.
fn row_reduce(a: &OreMatrix) -> (OreMatrix, OreMatrix, Vec<(usize, usize)>) {
    let mut m = a.clone();
    let mut v = OreMatrix::identity(a.nrows);
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..a.ncols {
        let active: Vec<usize> = (0..a.nrows).filter(|r| !pivots.iter().any(|p| p.0 == *r)).collect();
        loop {
            let nonzero: Vec<usize> = active.iter().copied().filter(|&r| !m.get(r, col).is_zero()).collect();
            if nonzero.len() <= 1 {
                pivots.extend(nonzero.into_iter().map(|r| (r, col)));
                break;
            }
            let p = pivot_of(&nonzero, |r| m.get(r, col).degree()).unwrap();
            for &r in &nonzero {
                if r == p {
                    continue;
                }
                let (q, _) = right_divide(m.get(r, col), m.get(p, col)).expect("pivot is nonzero");
                m.row_sub_mul(r, p, &q);
                v.row_sub_mul(r, p, &q);
            }
        }
    }
    (m, v, pivots)
}

/// Columns generating `{m : A·m = 0}`.
pub fn ore_right_kernel(a: &OreMatrix) -> OreMatrix {
    let (u, pivots) = column_reduce(a);
    let free: Vec<usize> = (0..a.ncols).filter(|c| !pivots.contains(c)).collect();
    u.select_columns(&free)
}

/// Rows generating `{m : m·B = 0}`.
pub fn ore_left_kernel(b: &OreMatrix) -> OreMatrix {
    let (_, v, pivots) = row_reduce(b);
    let free: Vec<usize> = (0..b.nrows).filter(|r| !pivots.iter().any(|p| p.0 == *r)).collect();
    v.select_rows(&free)
}

/// Row echelon form of a matrix, for membership tests in its row module.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    reduced: OreMatrix,
    pivots: Vec<(usize, usize)>,
}

impl RowEchelon {
    pub fn new(a: &OreMatrix) -> Self {
        let (reduced, _, pivots) = row_reduce(a);
        RowEchelon { reduced, pivots }
    }

    /// Whether `row` (a `1 × ncols` matrix) is a left combination of the rows.
    pub fn contains(&self, row: &OreMatrix) -> bool {
        assert_eq!(row.ncols, self.reduced.ncols);
        let mut m = row.clone();
        for col in 0..m.ncols {
            match self.pivots.iter().find(|p| p.1 == col) {
                Some(&(pr, _)) => {
                    let (q, r) = right_divide(m.get(0, col), self.reduced.get(pr, col)).expect("pivot is nonzero");
                    if !r.is_zero() {
                        return false;
                    }
                    for j in 0..m.ncols {
                        let v = m.get(0, j).sub(&q.mul(self.reduced.get(pr, j)));
                        m.set(0, j, v);
                    }
                }
                None => {
                    if !m.get(0, col).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OreParametrizationReport {
    pub b: OreMatrix,
    pub a_prime: OreMatrix,
    pub parametrizable: bool,
}

/// Computes `B = rker(A)`, `A' = lker(B)` and decides whether the row
/// modules of `A` and `A'` agree.
pub fn ore_check_parametrizable(a: &OreMatrix) -> OreParametrizationReport {
    let b = ore_right_kernel(a);
    let a_prime = ore_left_kernel(&b);
    let ech_a = RowEchelon::new(a);
    let ech_ap = RowEchelon::new(&a_prime);
    let forward = (0..a_prime.nrows).all(|i| ech_a.contains(&a_prime.select_rows(&[i])));
    let backward = (0..a.nrows).all(|i| ech_ap.contains(&a.select_rows(&[i])));
    OreParametrizationReport {
        b,
        a_prime,
        parametrizable: forward && backward,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ore() -> OreRing {
        OreRing::default()
    }

    #[test]
    fn control_system_kernel() {
        let r = ore();
        let a = OreMatrix::parse_rows(&r, &["dt, -t^3"]).unwrap();
        let b = ore_right_kernel(&a);
        assert_eq!(b, OreMatrix::parse_rows(&r, &["1", "1/t^3*dt"]).unwrap());
        assert!(a.mul(&b).unwrap().is_zero());
        let rep = ore_check_parametrizable(&a);
        assert!(rep.parametrizable);
        assert!(rep.a_prime.mul(&b).unwrap().is_zero());
    }

    #[test]
    fn trivial_kernels() {
        let r = ore();
        let a = OreMatrix::parse_rows(&r, &["1, 0"]).unwrap();
        assert_eq!(ore_right_kernel(&a), OreMatrix::parse_rows(&r, &["0", "1"]).unwrap());
        let id = OreMatrix::identity(2);
        let k = ore_right_kernel(&id);
        assert_eq!((k.nrows(), k.ncols()), (2, 0));
    }

    #[test]
    fn left_kernel_of_empty_is_everything() {
        let b = OreMatrix::zeros(2, 0);
        assert_eq!(ore_left_kernel(&b), OreMatrix::identity(2));
    }

    #[test]
    fn torsion_is_not_parametrizable() {
        // dt·x = 0 has constant solutions only: rker is zero, A' is the identity
        let r = ore();
        let a = OreMatrix::parse_rows(&r, &["dt"]).unwrap();
        let rep = ore_check_parametrizable(&a);
        assert_eq!(rep.b.ncols(), 0);
        assert_eq!(rep.a_prime, OreMatrix::identity(1));
        assert!(!rep.parametrizable);
    }

    #[test]
    fn echelon_membership() {
        let r = ore();
        let a = OreMatrix::parse_rows(&r, &["dt, -t^3"]).unwrap();
        let e = RowEchelon::new(&a);
        assert!(e.contains(&OreMatrix::parse_rows(&r, &["t*dt^2, -t*dt*t^3"]).unwrap()));
        assert!(!e.contains(&OreMatrix::parse_rows(&r, &["1, 0"]).unwrap()));
    }
}
