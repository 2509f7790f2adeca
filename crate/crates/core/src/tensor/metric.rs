use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Largest dimension the dense representation is meant for.
pub const MAX_DIM: usize = 16;

/// Symmetric positive-definite scalar product `g` with its cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct Metric {
    gram: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    /// Columns form a g-orthonormal basis: `L^{-T}`.
    frame: DMatrix<f64>,
}

impl Metric {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let n = gram.nrows();
        if n == 0 || n > MAX_DIM {
            return Err(Error::BadDimension { got: n, max: MAX_DIM });
        }
        if gram.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.ncols(),
            });
        }
        let scale = gram.amax();
        let asym = (&gram - gram.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::AsymmetricMetric(asym));
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        let chol = Cholesky::new(gram.clone()).ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        if (0..n).any(|i| !(l[(i, i)] > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        let frame = l
            .transpose()
            .solve_upper_triangular(&DMatrix::identity(n, n))
            .ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { gram, chol, frame })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity metric")
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Lower-triangular factor `L` with `gram = L L^T`.
    pub fn factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// Matrix whose columns are a g-orthonormal basis (the columns of `L^{-T}`).
    pub fn orthonormal_frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn is_identity(&self) -> bool {
        self.gram == DMatrix::identity(self.dim(), self.dim())
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.gram * y))
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Turns a covector (components `c_a = c(e_a)`) into the vector `g^{-1} c`.
    pub fn raise(&self, covector: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(covector)
    }

    pub fn raise_matrix(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(m)
    }

    pub fn lower(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.gram * x
    }

    /// Coordinates of `x` in the orthonormal frame: `L^T x`.
    pub fn to_orthonormal(&self, x: &DVector<f64>) -> DVector<f64> {
        self.chol.l().transpose() * x
    }

    pub fn from_orthonormal(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.frame * y
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n,
            });
        }
        Ok(())
    }
}

impl PartialEq for Metric {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}
