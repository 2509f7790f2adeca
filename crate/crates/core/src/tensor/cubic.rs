use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensor::metric::MAX_DIM;

/// Number of canonical multi-indices `i <= j <= k` in dimension `n`.
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

/// Canonical multi-indices in packed order.
pub fn canonical_indices(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |i| (i..n).flat_map(move |j| (j..n).map(move |k| [i, j, k])))
}

fn sort3(mut idx: [usize; 3]) -> [usize; 3] {
    idx.sort_unstable();
    idx
}

/// Dense symmetric (0,3)-form stored by canonical multi-index.
///
/// Only entries with `i <= j <= k` are stored, so full symmetry holds by
/// construction. A dense `n^3` copy is kept alongside for contractions.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCubic {
    dim: usize,
    packed: Vec<f64>,
    full: Vec<f64>,
}

impl SymCubic {
    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_packed(dim, vec![0.0; packed_len(dim)])
    }

    pub fn from_packed(dim: usize, packed: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::BadDimension { got: dim, max: MAX_DIM });
        }
        if packed.len() != packed_len(dim) {
            return Err(Error::DimensionMismatch {
                expected: packed_len(dim),
                got: packed.len(),
            });
        }
        let mut full = vec![0.0; dim * dim * dim];
        for (v, [i, j, k]) in packed.iter().zip(canonical_indices(dim)) {
            for [a, b, c] in permutations([i, j, k]) {
                full[(a * dim + b) * dim + c] = *v;
            }
        }
        Ok(Self { dim, packed, full })
    }

    /// Builds the form from a function evaluated on canonical indices only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let packed = canonical_indices(dim).map(|[i, j, k]| f(i, j, k)).collect();
        Self::from_packed(dim, packed)
    }

    /// Builds the form from sparse `(index, value)` entries; indices must be canonical and unique.
    pub fn from_entries(dim: usize, entries: &[([usize; 3], f64)]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::BadDimension { got: dim, max: MAX_DIM });
        }
        let mut packed = vec![0.0; packed_len(dim)];
        let mut seen = vec![false; packed_len(dim)];
        for &(idx, val) in entries {
            if idx.iter().any(|&i| i >= dim) {
                return Err(Error::IndexOutOfRange { idx, dim });
            }
            if !(idx[0] <= idx[1] && idx[1] <= idx[2]) {
                return Err(Error::NonCanonicalIndex(idx));
            }
            let p = packed_offset(dim, idx);
            if seen[p] {
                return Err(Error::DuplicateIndex(idx));
            }
            seen[p] = true;
            packed[p] = val;
        }
        Self::from_packed(dim, packed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    /// Nonzero canonical entries in packed order.
    pub fn entries(&self) -> Vec<([usize; 3], f64)> {
        canonical_indices(self.dim)
            .zip(self.packed.iter().copied())
            .filter(|(_, v)| *v != 0.0)
            .collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.full[(i * self.dim + j) * self.dim + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm over the full `n^3` array.
    pub fn norm(&self) -> f64 {
        self.full.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.packed.iter().all(|v| *v == 0.0)
    }

    /// `C(x, y, z)`.
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        x.dot(&self.contract2(y, z))
    }

    /// `C(x, x, x)`.
    pub fn cube(&self, x: &DVector<f64>) -> f64 {
        self.eval(x, x, x)
    }

    /// Covector `C(., y, z)`.
    pub fn contract2(&self, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |a, _| {
            let mut s = 0.0;
            for b in 0..n {
                let row = &self.full[(a * n + b) * n..(a * n + b + 1) * n];
                let mut t = 0.0;
                for c in 0..n {
                    t += row[c] * z[c];
                }
                s += y[b] * t;
            }
            s
        })
    }

    /// Symmetric matrix `C(x, ., .)`.
    pub fn contract1(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                for c in 0..n {
                    m[(b, c)] += x[a] * self.full[(a * n + b) * n + c];
                }
            }
        }
        m
    }

    /// Pulls the form back along the columns of `basis`:
    /// `C'(a, b, c) = C(basis_a, basis_b, basis_c)`. The result has dimension `basis.ncols()`.
    pub fn transform(&self, basis: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim;
        if basis.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: basis.nrows(),
            });
        }
        let m = basis.ncols();
        // successive mode products keep this at O(n^3 m)
        let mut t1 = vec![0.0; m * n * n];
        for a in 0..m {
            for i in 0..n {
                let w = basis[(i, a)];
                if w == 0.0 {
                    continue;
                }
                for jk in 0..n * n {
                    t1[a * n * n + jk] += w * self.full[i * n * n + jk];
                }
            }
        }
        let mut t2 = vec![0.0; m * m * n];
        for a in 0..m {
            for b in 0..m {
                for j in 0..n {
                    let w = basis[(j, b)];
                    if w == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        t2[(a * m + b) * n + k] += w * t1[(a * n + j) * n + k];
                    }
                }
            }
        }
        Self::from_fn(m, |a, b, c| {
            (0..n)
                .map(|k| basis[(k, c)] * t2[(a * m + b) * n + k])
                .sum()
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let packed = self.packed.iter().map(|v| v * factor).collect();
        Self::from_packed(self.dim, packed).expect("same shape")
    }

    /// Entrywise `(1 - w) self + w other`.
    pub fn lerp(&self, other: &Self, w: f64) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let packed = self
            .packed
            .iter()
            .zip(&other.packed)
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect();
        Self::from_packed(self.dim, packed)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let packed = self
            .packed
            .iter()
            .zip(&other.packed)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_packed(self.dim, packed)
    }
}

/// Offset of a canonical index in packed order.
pub fn packed_offset(n: usize, idx: [usize; 3]) -> usize {
    let [i, j, k] = sort3(idx);
    // entries with first index < i: sum over i' < i of pairs (j, k) with i' <= j <= k < n
    let tri = |m: usize| m * (m + 1) / 2;
    let before_i: usize = (0..i).map(|ip| tri(n - ip)).sum();
    let before_j: usize = (i..j).map(|jp| n - jp).sum();
    before_i + before_j + (k - j)
}

fn permutations([i, j, k]: [usize; 3]) -> [[usize; 3]; 6] {
    [
        [i, j, k],
        [i, k, j],
        [j, i, k],
        [j, k, i],
        [k, i, j],
        [k, j, i],
    ]
}
