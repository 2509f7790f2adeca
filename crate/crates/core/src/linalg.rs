//! Small dense helpers shared by the modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::tensor::Metric;

/// Extends the g-orthonormal vectors `first` to a full g-orthonormal basis by
/// appending standard basis vectors and running modified Gram–Schmidt (two
/// passes); candidates that collapse below `1e-8` are dropped.
pub fn complete_basis(first: &[DVector<f64>], metric: &Metric) -> Vec<DVector<f64>> {
    let n = metric.dim();
    let mut basis: Vec<DVector<f64>> = first.to_vec();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        let start = metric.norm(&v);
        for _ in 0..2 {
            for b in &basis {
                let c = metric.inner(&v, b);
                v -= b * c;
            }
        }
        let nv = metric.norm(&v);
        if nv > 1e-8 * start {
            basis.push(v / nv);
        }
    }
    basis
}

/// g-orthonormal basis of the complement of the g-unit vector `e`, as matrix columns.
pub fn complement_basis(e: &DVector<f64>, metric: &Metric) -> DMatrix<f64> {
    let full = complete_basis(std::slice::from_ref(e), metric);
    let n = metric.dim();
    DMatrix::from_fn(n, n - 1, |r, c| full[c + 1][r])
}

pub fn columns_to_matrix(cols: &[DVector<f64>]) -> DMatrix<f64> {
    let n = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted descending.
pub fn sorted_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Random orthogonal matrix with determinant +1 (QR of a Gaussian matrix, sign-fixed).
pub fn random_rotation<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        if r[(c, c)] < 0.0 {
            for row in 0..n {
                q[(row, c)] = -q[(row, c)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for row in 0..n {
            q[(row, 0)] = -q[(row, 0)];
        }
    }
    q
}

pub fn random_unit<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v = DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(rng));
        let nv = v.norm();
        if nv > 1e-12 {
            return v / nv;
        }
    }
}
