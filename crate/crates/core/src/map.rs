//! Evaluable mappings `R^m -> R^m`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub trait Mapping: Send + Sync + fmt::Debug {
    /// Dimension of both the domain and the codomain.
    fn dim(&self) -> usize;

    fn apply(&self, z: &[f64]) -> Vec<f64>;

    /// Evaluates and rejects wrong input length or non-finite output.
    fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.dim() {
            return Err(Error::dim("mapping input", self.dim(), z.len()));
        }
        let out = self.apply(z);
        if let Some(index) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(out)
    }
}

impl<M: Mapping + ?Sized> Mapping for Arc<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        (**self).apply(z)
    }
}

/// `z -> A z + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    offset: DVector<f64>,
}

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, offset: Vec<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::dim("affine matrix columns", matrix.nrows(), matrix.ncols()));
        }
        if offset.len() != matrix.nrows() {
            return Err(Error::dim("affine offset", matrix.nrows(), offset.len()));
        }
        Ok(AffineMap {
            matrix,
            offset: DVector::from_vec(offset),
        })
    }

    /// From row-major data; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>], offset: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::dim(format!("affine matrix row {i}"), n, r.len()));
            }
        }
        if rows.iter().flatten().chain(&offset).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMap("affine map has a non-finite entry".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), offset)
    }

    pub fn zero(dim: usize) -> Self {
        AffineMap {
            matrix: DMatrix::zeros(dim, dim),
            offset: DVector::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap {
            matrix: DMatrix::identity(dim, dim),
            offset: DVector::zeros(dim),
        }
    }
}

impl Mapping for AffineMap {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        let v = &self.matrix * DVector::from_column_slice(z) + &self.offset;
        v.iter().cloned().collect()
    }
}

/// `z -> z - T(z)`. Turns an isotone map `T` into the complementarity map
/// `F` with `I - F = T`.
#[derive(Debug, Clone)]
pub struct IdentityMinus<M>(pub M);

impl<M: Mapping> Mapping for IdentityMinus<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        let t = self.0.apply(z);
        z.iter().zip(t).map(|(a, b)| a - b).collect()
    }
}

/// `z -> -M(z)`.
#[derive(Debug, Clone)]
pub struct Negated<M>(pub M);

impl<M: Mapping> Mapping for Negated<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.0.apply(z).into_iter().map(|v| -v).collect()
    }
}

/// `z -> a M1(z) + b M2(z)`.
#[derive(Debug, Clone)]
pub struct LinearCombination<A, B> {
    pub a: f64,
    pub first: A,
    pub b: f64,
    pub second: B,
}

impl<A: Mapping, B: Mapping> Mapping for LinearCombination<A, B> {
    fn dim(&self) -> usize {
        self.first.dim()
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        let f = self.first.apply(z);
        let s = self.second.apply(z);
        f.iter().zip(s).map(|(x, y)| self.a * x + self.b * y).collect()
    }
}

/// Wraps a closure.
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnMap { dim, f }
    }
}

impl<F> fmt::Debug for FnMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnMap").field("dim", &self.dim).finish()
    }
}

impl<F> Mapping for FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        (self.f)(z)
    }
}
