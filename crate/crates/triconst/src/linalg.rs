//! Dense exact matrices shared by the element, mesh and interval modules.

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::rational::{format_rational, parse_rational, to_f64, Rational};

/// Dense symmetric matrix with exact rational entries (full storage).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymRatMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl SymRatMatrix {
    pub fn zeros(n: usize) -> Self {
        SymRatMatrix {
            n,
            data: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds from rows; fails unless square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidArgument(format!("row {i} has length {}, expected {n}", r.len())));
            }
            for (j, v) in r.iter().enumerate() {
                if j < i && *v != rows[j][i] {
                    return Err(Error::InvalidArgument(format!("entry ({i},{j}) breaks symmetry")));
                }
                m.data[i * n + j] = v.clone();
            }
        }
        Ok(m)
    }

    /// Wraps row-major data that is symmetric by construction.
    pub(crate) fn from_flat(n: usize, data: Vec<Rational>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        SymRatMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i * self.n + j].clone()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    /// Sets `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let n = self.n;
        self.data[j * n + i] = v.clone();
        self.data[i * n + j] = v;
    }

    /// Adds `v` to `(i,j)` and, off the diagonal, to `(j,i)`.
    pub fn add_to(&mut self, i: usize, j: usize, v: &Rational) {
        let n = self.n;
        self.data[i * n + j] += v;
        if i != j {
            self.data[j * n + i] += v;
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SymRatMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        SymRatMatrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(x, y)| x - y).collect(),
        }
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.n {
            return Err(Error::InvalidArgument(format!("vector length {} vs dimension {}", x.len(), self.n)));
        }
        let mut total = Rational::zero();
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            let mut row = Rational::zero();
            for j in 0..self.n {
                if !x[j].is_zero() {
                    row += self.entry(i, j) * &x[j];
                }
            }
            total += &x[i] * row;
        }
        Ok(total)
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Rational::zero(), |acc, j| acc + self.entry(i, j) * &x[j]))
            .collect()
    }

    /// Keeps the listed rows and columns, in order.
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let k = keep.len();
        let mut m = Self::zeros(k);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m.data[a * k + b] = self.get(i, j);
            }
        }
        m
    }

    /// Nearest-double image of every entry.
    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| to_f64(self.entry(i, j)))
    }

    /// Row-major `"p/q"` strings, for JSON dumps.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| format_rational(self.entry(i, j))).collect())
            .collect()
    }
}

impl Serialize for SymRatMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymRatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        SymRatMatrix::from_rows(&parsed).map_err(serde::de::Error::custom)
    }
}

/// Solves the square system `a x = rhs` exactly by Gauss–Jordan elimination.
pub fn solve_exact(a: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    if rhs.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("system is not square".into()));
    }
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(rhs)
        .map(|(r, b)| r.iter().cloned().chain(std::iter::once(b.clone())).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Degenerate("singular linear system".into()))?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        let prow = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= &f * p;
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}
