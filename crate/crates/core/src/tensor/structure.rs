use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{Metric, SymCubic};

/// Default relative tolerance for the check operations.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A statistical structure `(g, K)` on a vector space, stored as `(g, C)` with
/// `C(X, Y, Z) = g(X, K(Y, Z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatStructure {
    metric: Metric,
    cubic: SymCubic,
}

/// A plane spanned by two linearly independent vectors.
#[derive(Debug, Clone)]
pub struct Plane {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
}

impl Plane {
    pub fn new(u: DVector<f64>, v: DVector<f64>) -> Self {
        Self { u, v }
    }

    /// The coordinate plane `e_i ^ e_j`.
    pub fn coordinate(n: usize, i: usize, j: usize) -> Self {
        let mut u = DVector::zeros(n);
        let mut v = DVector::zeros(n);
        u[i] = 1.0;
        v[j] = 1.0;
        Self { u, v }
    }

    /// g-orthonormal pair spanning the plane (modified Gram–Schmidt).
    pub fn orthonormalize(&self, g: &Metric) -> Result<(DVector<f64>, DVector<f64>)> {
        g.check_dim(self.u.len())?;
        g.check_dim(self.v.len())?;
        let uu = g.inner(&self.u, &self.u);
        let vv = g.inner(&self.v, &self.v);
        let uv = g.inner(&self.u, &self.v);
        let det = uu * vv - uv * uv;
        let threshold = 1e-12 * uu * vv;
        if !(det > threshold) {
            return Err(Error::DegeneratePlane {
                gram_det: det,
                threshold,
            });
        }
        let x = &self.u / uu.sqrt();
        let mut y = &self.v - &x * g.inner(&self.v, &x);
        y -= &x * g.inner(&y, &x);
        let ny = g.norm(&y);
        Ok((x, y / ny))
    }
}

/// Maximal violations of the three curvature-like identities of `[K,K]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureLikeResiduals {
    pub antisymmetry: f64,
    pub bianchi: f64,
    pub skewness: f64,
    /// Largest absolute entry of `[K,K]`.
    pub scale: f64,
}

impl CurvatureLikeResiduals {
    pub fn max(&self) -> f64 {
        self.antisymmetry.max(self.bianchi).max(self.skewness)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol * self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Restriction of a structure to the orthogonal complement of a unit vector.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Induced structure in the orthonormal basis below (identity metric).
    pub structure: StatStructure,
    /// Columns: g-orthonormal basis of the complement, in the original coordinates.
    pub basis: DMatrix<f64>,
}

impl StatStructure {
    pub fn new(metric: Metric, cubic: SymCubic) -> Result<Self> {
        if metric.dim() != cubic.dim() {
            return Err(Error::DimensionMismatch {
                expected: metric.dim(),
                got: cubic.dim(),
            });
        }
        Ok(Self { metric, cubic })
    }

    /// Structure over the identity metric.
    pub fn euclidean(cubic: SymCubic) -> Self {
        Self {
            metric: Metric::identity(cubic.dim()),
            cubic,
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn cubic(&self) -> &SymCubic {
        &self.cubic
    }

    fn check(&self, v: &DVector<f64>) -> Result<()> {
        self.metric.check_dim(v.len())
    }

    /// `K(y, z) = g^{-1} C(., y, z)`.
    pub fn k(&self, y: &DVector<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(y)?;
        self.check(z)?;
        Ok(self.metric.raise(&self.cubic.contract2(y, z)))
    }

    /// Matrix of the endomorphism `K_x` in the standard basis.
    pub fn k_operator(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check(x)?;
        Ok(self.metric.raise_matrix(&self.cubic.contract1(x)))
    }

    /// `[K,K](x, y) z = K_x K_y z - K_y K_x z`.
    pub fn bracket(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let kx = self.k_operator(x)?;
        let ky = self.k_operator(y)?;
        self.check(z)?;
        Ok(&kx * (&ky * z) - &ky * (&kx * z))
    }

    /// The endomorphisms `K_{e_i}` for the standard basis.
    pub fn k_operators(&self) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                self.k_operator(&e).expect("dimension matches")
            })
            .collect()
    }

    /// Full `[K,K]` as endomorphisms `B[i][j] = [K_{e_i}, K_{e_j}]`.
    pub fn bracket_tensor(&self) -> Vec<Vec<DMatrix<f64>>> {
        let ks = self.k_operators();
        ks.iter()
            .map(|ki| ks.iter().map(|kj| ki * kj - kj * ki).collect())
            .collect()
    }

    /// Sectional K-curvature `k(pi) = g([K,K](X,Y)Y, X)` for a g-orthonormal basis `X, Y` of the plane.
    pub fn sectional_curvature(&self, plane: &Plane) -> Result<f64> {
        let (x, y) = plane.orthonormalize(&self.metric)?;
        let b = self.bracket(&x, &y, &y)?;
        Ok(self.metric.inner(&b, &x))
    }

    pub fn curvature_like_residuals(&self) -> CurvatureLikeResiduals {
        let n = self.dim();
        let b = self.bracket_tensor();
        let g = self.metric.gram();
        let mut scale: f64 = 0.0;
        let mut anti: f64 = 0.0;
        let mut bianchi: f64 = 0.0;
        let mut skew: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                scale = scale.max(b[i][j].amax());
                anti = anti.max((&b[i][j] + &b[j][i]).amax());
                // lowered form L[w][k] = g(B(i,j) e_k, e_w)
                let lowered = g * &b[i][j];
                skew = skew.max((&lowered + lowered.transpose()).amax());
                for k in 0..n {
                    let cyc = b[i][j].column(k) + b[j][k].column(i) + b[k][i].column(j);
                    bianchi = bianchi.max(cyc.amax());
                }
            }
        }
        CurvatureLikeResiduals {
            antisymmetry: anti,
            bianchi,
            skewness: skew,
            scale,
        }
    }

    /// `E = tr_g K = sum_i K(f_i, f_i)` over the g-orthonormal frame.
    pub fn trace_vector(&self) -> DVector<f64> {
        let f = self.metric.orthonormal_frame();
        let n = self.dim();
        let mut cov = DVector::zeros(n);
        for i in 0..n {
            let fi = f.column(i).into_owned();
            cov += self.cubic.contract2(&fi, &fi);
        }
        self.metric.raise(&cov)
    }

    pub fn is_trace_free(&self, tol: f64) -> bool {
        self.metric.norm(&self.trace_vector()) <= tol * (1.0 + self.cubic.max_abs())
    }

    /// The same structure written in the g-orthonormal frame of the Cholesky
    /// factor (identity metric), together with that frame.
    pub fn in_orthonormal_frame(&self) -> (StatStructure, DMatrix<f64>) {
        let frame = self.metric.orthonormal_frame().clone();
        let cubic = self.cubic.transform(&frame).expect("frame is square");
        (StatStructure::euclidean(cubic), frame)
    }

    /// Induced structure on `D = {e1}^perp`: `C' = C` restricted to `D`,
    /// written in a g-orthonormal basis of `D` obtained by completing `e1`
    /// with standard basis vectors.
    pub fn project(&self, e1: &DVector<f64>) -> Result<Projection> {
        self.check(e1)?;
        if self.dim() == 1 {
            return Err(Error::NoComplement);
        }
        let norm = self.metric.norm(e1);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit(norm));
        }
        let basis = linalg::complement_basis(e1, &self.metric);
        let cubic = self.cubic.transform(&basis)?;
        Ok(Projection {
            structure: StatStructure::euclidean(cubic),
            basis,
        })
    }

    /// Conjugates by an orthogonal `q`: the result at `q x` looks like `self` at `x`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Result<StatStructure> {
        let n = self.dim();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.nrows(),
            });
        }
        let orth = (q.transpose() * q - DMatrix::identity(n, n)).amax();
        if orth > 1e-10 {
            return Err(Error::NotOrthonormal(orth));
        }
        let gram = q * self.metric.gram() * q.transpose();
        let gram = (&gram + gram.transpose()) * 0.5;
        let cubic = self.cubic.transform(&q.transpose())?;
        StatStructure::new(Metric::new(gram)?, cubic)
    }

    /// Removes the trace part: `C - (3/(n+2)) sym(g (x) E^flat)`, computed in
    /// the orthonormal frame and mapped back.
    pub fn trace_free_part(&self) -> StatStructure {
        let n = self.dim();
        let (on, frame) = self.in_orthonormal_frame();
        let c = on.cubic();
        let e: Vec<f64> = (0..n)
            .map(|a| (0..n).map(|i| c.get(a, i, i)).sum())
            .collect();
        let factor = 3.0 / (n as f64 + 2.0);
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let projected = SymCubic::from_fn(n, |i, j, k| {
            let sym = (delta(i, j) * e[k] + delta(i, k) * e[j] + delta(j, k) * e[i]) / 3.0;
            c.get(i, j, k) - factor * sym
        })
        .expect("same dimension");
        // back to the original coordinates: C(x,y,z) = C_on(L^T x, L^T y, L^T z)
        let back = frame
            .clone()
            .try_inverse()
            .expect("frame is invertible");
        let cubic = projected.transform(&back).expect("square");
        StatStructure::new(self.metric.clone(), cubic).expect("dims agree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_family_2() -> StatStructure {
        // K(e1,e1)=2e1, K(e1,e2)=e2, K(e2,e2)=e1
        StatStructure::euclidean(
            SymCubic::from_entries(2, &[([0, 0, 0], 2.0), ([0, 1, 1], 1.0)]).unwrap(),
        )
    }

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn k_of_lambda_family() {
        let s = lambda_family_2();
        assert_eq!(s.k(&e(2, 0), &e(2, 0)).unwrap(), e(2, 0) * 2.0);
    }

    #[test]
    fn k_divides_by_metric() {
        let g = Metric::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let c = SymCubic::from_entries(2, &[([0, 0, 0], 2.0)]).unwrap();
        let s = StatStructure::new(g, c).unwrap();
        let k = s.k(&e(2, 0), &e(2, 0)).unwrap();
        assert!((k - e(2, 0)).amax() < 1e-15);
    }

    #[test]
    fn k_of_zero_form_vanishes() {
        let s = StatStructure::euclidean(SymCubic::zeros(3).unwrap());
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(s.k(&y, &y).unwrap(), DVector::zeros(3));
        assert_eq!(s.k_operator(&y).unwrap(), DMatrix::zeros(3, 3));
    }

    #[test]
    fn operator_columns() {
        let s = lambda_family_2();
        let m = s.k_operator(&e(2, 1)).unwrap();
        // columns K(e2,e1)=e2, K(e2,e2)=e1
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(s.k_operator(&DVector::zeros(2)).unwrap(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn bracket_of_lambda_family() {
        let s = lambda_family_2();
        let b = s.bracket(&e(2, 0), &e(2, 1), &e(2, 1)).unwrap();
        assert_eq!(b, e(2, 0));
        let x = DVector::from_vec(vec![0.3, -0.4]);
        assert_eq!(s.bracket(&x, &x, &e(2, 1)).unwrap(), DVector::zeros(2));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = lambda_family_2();
        assert!(matches!(
            s.k(&e(3, 0), &e(2, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_plane_rejected() {
        let s = lambda_family_2();
        let p = Plane::new(e(2, 0), e(2, 0) * 3.0);
        assert!(matches!(
            s.sectional_curvature(&p),
            Err(Error::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn negative_minimum_example_curvature() {
        let s = StatStructure::euclidean(
            SymCubic::from_entries(2, &[([0, 0, 0], -3.0), ([0, 1, 1], -2.0)]).unwrap(),
        );
        let k = s.sectional_curvature(&Plane::coordinate(2, 0, 1)).unwrap();
        assert!((k - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn projection_needs_unit_vector_and_dim() {
        let s = lambda_family_2();
        assert!(matches!(s.project(&(e(2, 0) * 2.0)), Err(Error::NotUnit(_))));
        let one = StatStructure::euclidean(SymCubic::zeros(1).unwrap());
        assert!(matches!(one.project(&e(1, 0)), Err(Error::NoComplement)));
    }

    #[test]
    fn zero_form_residuals_vanish() {
        let s = StatStructure::euclidean(SymCubic::zeros(4).unwrap());
        let r = s.curvature_like_residuals();
        assert_eq!((r.antisymmetry, r.bianchi, r.skewness), (0.0, 0.0, 0.0));
        assert!(s.is_trace_free(DEFAULT_TOL));
    }
}
