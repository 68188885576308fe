use std::fmt;

use super::{AlgebraError, ModuleElement, Polynomial, Ring};
use crate::text::ParseError;

/// A matrix of operators over a [`Ring`], stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorMatrix {
    ring: Ring,
    nrows: usize,
    ncols: usize,
    entries: Vec<Polynomial>,
}

impl OperatorMatrix {
    pub fn new(ring: Ring, nrows: usize, ncols: usize, entries: Vec<Polynomial>) -> Self {
        assert_eq!(entries.len(), nrows * ncols, "entry count does not match shape");
        assert!(
            entries.iter().all(|p| p.nvars() == ring.nvars()),
            "entries must live in the matrix ring"
        );
        OperatorMatrix {
            ring,
            nrows,
            ncols,
            entries,
        }
    }

    pub fn zeros(ring: Ring, nrows: usize, ncols: usize) -> Self {
        let n = ring.nvars();
        Self::new(ring, nrows, ncols, vec![Polynomial::zero(n); nrows * ncols])
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Polynomial::one(m.ring.nvars());
        }
        m
    }

    pub fn from_rows(ring: Ring, rows: Vec<Vec<Polynomial>>, ncols: usize) -> Self {
        let nrows = rows.len();
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self::new(ring, nrows, ncols, rows.into_iter().flatten().collect())
    }

    /// Parses rows given as comma-separated entries.
    pub fn parse_rows<S: AsRef<str>>(ring: Ring, rows: &[S]) -> Result<Self, ParseError> {
        let mut parsed = Vec::new();
        let mut ncols = None;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let mut entries = Vec::new();
            let mut offset = 0;
            for cell in row.split(',') {
                let p = ring.parse(cell).map_err(|e| e.at_line(i + 1, offset))?;
                entries.push(p);
                offset += cell.chars().count() + 1;
            }
            match ncols {
                None => ncols = Some(entries.len()),
                Some(n) if n != entries.len() => {
                    return Err(ParseError::new(
                        1,
                        format!("row {} has {} entries, expected {n}", i + 1, entries.len()),
                    )
                    .at_line(i + 1, 0))
                }
                _ => {}
            }
            parsed.push(entries);
        }
        let ncols = ncols.unwrap_or(0);
        Ok(Self::from_rows(ring, parsed, ncols))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.ring.nvars());
        self.entries[i * self.ncols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                entries.push(self.get(i, j).clone());
            }
        }
        Self::new(self.ring.clone(), self.ncols, self.nrows, entries)
    }

    fn check_ring(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.ring.nvars() != other.ring.nvars() {
            return Err(AlgebraError::GeneratorMismatch {
                left: self.ring.nvars(),
                right: other.ring.nvars(),
            });
        }
        Ok(())
    }

    fn shape_error(&self, other: &Self) -> AlgebraError {
        AlgebraError::ShapeMismatch {
            left_rows: self.nrows,
            left_cols: self.ncols,
            right_rows: other.nrows,
            right_cols: other.ncols,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_ring(other)?;
        if self.ncols != other.nrows {
            return Err(self.shape_error(other));
        }
        let n = self.ring.nvars();
        let mut entries = Vec::with_capacity(self.nrows * other.ncols);
        for i in 0..self.nrows {
            for j in 0..other.ncols {
                let mut acc = Polynomial::zero(n);
                for k in 0..self.ncols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries.push(acc);
            }
        }
        Ok(Self::new(self.ring.clone(), self.nrows, other.ncols, entries))
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_ring(other)?;
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(self.shape_error(other));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self::new(self.ring.clone(), self.nrows, self.ncols, entries))
    }

    pub fn row(&self, i: usize) -> ModuleElement {
        ModuleElement::from_components(self.ring.nvars(), &self.entries[i * self.ncols..(i + 1) * self.ncols])
    }

    pub fn column(&self, j: usize) -> ModuleElement {
        let col: Vec<_> = (0..self.nrows).map(|i| self.get(i, j).clone()).collect();
        ModuleElement::from_components(self.ring.nvars(), &col)
    }

    pub fn rows(&self) -> Vec<ModuleElement> {
        (0..self.nrows).map(|i| self.row(i)).collect()
    }

    pub fn columns(&self) -> Vec<ModuleElement> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    /// Matrix whose columns are the given elements of `R^nrows`.
    pub fn from_columns(ring: Ring, nrows: usize, cols: &[ModuleElement]) -> Self {
        let mut m = Self::zeros(ring, nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.rank(), nrows);
            for (i, p) in c.components().into_iter().enumerate() {
                m.set(i, j, p);
            }
        }
        m
    }

    pub fn from_row_elements(ring: Ring, ncols: usize, rows: &[ModuleElement]) -> Self {
        Self::from_columns(ring, ncols, rows).transpose()
    }
}

impl fmt::Display for OperatorMatrix {
    /// One row per line, entries separated by `, `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j).display(self.ring.names()))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
