//! Derivation actions on `K`, the rigidity probe, the characterization of the
//! constant-curvature family with `K(e1,e1) = l e1, K(e1,X) = l/2 X`, and
//! the negativity witness for trace-free structures.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adapted::{decompose, fit_constant_curvature, DEFAULT_DECOMPOSE_TOL};
use crate::error::{Error, Result};
use crate::families::random_plane;
use crate::linalg::complement_basis;
use crate::phi::{eigenframe_at, find_local_max, DEFAULT_RANDOM_STARTS};
use crate::tensor::{Metric, Plane, StatStructure};

/// An endomorphism `J` with `g(JX, Y) + g(X, JY) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewEndo {
    matrix: DMatrix<f64>,
}

impl SkewEndo {
    pub fn new(metric: &Metric, matrix: DMatrix<f64>) -> Result<Self> {
        let n = metric.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows(),
            });
        }
        let g = metric.gram();
        let r = (g * &matrix + matrix.transpose() * g).amax();
        if r > 1e-10 * (1.0 + matrix.amax() * g.amax()) {
            return Err(Error::NotSkew(r));
        }
        Ok(Self { matrix })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Values `T[a][b] = T(e_a, e_b)` of a (1,2)-tensor on basis pairs.
pub type Tensor12 = Vec<Vec<DVector<f64>>>;

pub fn tensor12_max(t: &Tensor12) -> f64 {
    t.iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.amax()))
}

fn derivation(ks: &[DMatrix<f64>], j: &DMatrix<f64>) -> Tensor12 {
    let n = ks.len();
    // K(J e_a, v) = sum_c J[c][a] K_c v
    let kj: Vec<DMatrix<f64>> = (0..n)
        .map(|a| {
            let mut m = DMatrix::zeros(n, n);
            for (c, kc) in ks.iter().enumerate() {
                if j[(c, a)] != 0.0 {
                    m += kc * j[(c, a)];
                }
            }
            m
        })
        .collect();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let kab = ks[a].column(b).into_owned();
                    let jb = j.column(b).into_owned();
                    j * kab - kj[a].column(b) - &ks[a] * jb
                })
                .collect()
        })
        .collect()
}

/// `(J.K)(X,Y) = J K(X,Y) - K(JX, Y) - K(X, JY)` on standard basis pairs.
pub fn derivation_on_k(s: &StatStructure, j: &SkewEndo) -> Result<Tensor12> {
    s.metric().check_dim(j.dim())?;
    Ok(derivation(&s.k_operators(), j.matrix()))
}

/// `max_{a,b} |([K,K](e_a,e_b)) . K|`, each bracket acting as a derivation,
/// measured in the orthonormal frame.
pub fn bracket_derivation_on_k(s: &StatStructure) -> f64 {
    let (on, _) = s.in_orthonormal_frame();
    let ks = on.k_operators();
    let n = on.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            let j = &ks[a] * &ks[b] - &ks[b] * &ks[a];
            worst = worst.max(tensor12_max(&derivation(&ks, &j)));
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub sampled_planes: usize,
    pub curvature_min: f64,
    pub curvature_max: f64,
    /// Curvature when it is constant (then its sign is global).
    pub constant_curvature: Option<f64>,
    /// Dimension of `{J g-skew : J.K = 0}`.
    pub null_dimension: usize,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    /// Present only when negativity is certified: then `null_dimension == 0` is expected.
    pub rigid: Option<bool>,
}

impl RigidityReport {
    /// Smallest singular value above the threshold divided by the threshold.
    pub fn gap_ratio(&self) -> f64 {
        self.singular_values
            .iter()
            .filter(|s| **s > self.threshold)
            .fold(f64::INFINITY, |m, s| m.min(*s))
            / self.threshold
    }
}

/// Samples the sign of the curvature and computes the null space of
/// `J -> J.K` over g-skew `J` (an `so(n)` basis in the orthonormal frame).
pub fn rigidity_probe(s: &StatStructure, tol: f64, seed: u64) -> Result<RigidityReport> {
    let n = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kmin = f64::INFINITY;
    let mut kmax = f64::NEG_INFINITY;
    let mut sampled = 0;
    if n >= 2 {
        for _ in 0..1000 {
            let plane = random_plane(n, &mut rng);
            if let Ok(k) = s.sectional_curvature(&plane) {
                kmin = kmin.min(k);
                kmax = kmax.max(k);
                sampled += 1;
            }
        }
        let cp = find_local_max(s, DEFAULT_RANDOM_STARTS, seed)?;
        let frame = eigenframe_at(s, &cp)?;
        for v in &frame.basis[1..] {
            let k = s.sectional_curvature(&Plane::new(frame.basis[0].clone(), v.clone()))?;
            kmin = kmin.min(k);
            kmax = kmax.max(k);
            sampled += 1;
        }
    }

    let (on, _) = s.in_orthonormal_frame();
    let ks = on.k_operators();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .collect();
    let mut map = DMatrix::zeros(n * n * n, pairs.len());
    for (col, &(p, q)) in pairs.iter().enumerate() {
        let mut j = DMatrix::zeros(n, n);
        j[(p, q)] = -1.0;
        j[(q, p)] = 1.0;
        let t = derivation(&ks, &j);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    map[((a * n + b) * n + c, col)] = t[a][b][c];
                }
            }
        }
    }
    let mut singular_values: Vec<f64> = if pairs.is_empty() {
        Vec::new()
    } else {
        map.svd(false, false).singular_values.iter().copied().collect()
    };
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let threshold = 1e-8 * smax;
    let null_dimension = if smax == 0.0 {
        pairs.len()
    } else {
        singular_values.iter().filter(|s| **s <= threshold).count()
    };

    let fit = fit_constant_curvature(s, tol);
    let constant_curvature = fit.is_constant().then_some(fit.a);
    let certified_negative = matches!(constant_curvature, Some(a) if a < -tol);
    Ok(RigidityReport {
        sampled_planes: sampled,
        curvature_min: kmin,
        curvature_max: kmax,
        constant_curvature,
        null_dimension,
        singular_values,
        threshold,
        rigid: certified_negative.then_some(null_dimension == 0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// All four conditions hold; `lambda = 2 |E| / (n + 1)`.
    Canonical {
        lambda: f64,
        curvature: f64,
        decomposition_agrees: bool,
    },
    NotCanonical { condition: u8, detail: String },
    /// `E = 0`, so the first condition fails vacuously.
    ZeroTrace,
}

/// Tests, in order: (1) `E` is an eigenvector of `K_E`; (2) `K_E` is a
/// multiple of the identity on `E^perp`; (3) the sectional K-curvature is a
/// positive constant `A`; (4) `|E| = (n+1) sqrt(A)`.
pub fn characterize_canonical(s: &StatStructure, tol: f64) -> Verdict {
    let n = s.dim();
    let (on, _) = s.in_orthonormal_frame();
    let scale = 1.0 + on.cubic().max_abs();
    let e = on.trace_vector();
    let ne = e.norm();
    if ne <= tol * scale {
        return Verdict::ZeroTrace;
    }
    let u = &e / ne;
    let ku = on.cubic().contract1(&u);
    let kuu = &ku * &u;
    let along = kuu.dot(&u);
    let r1 = (&kuu - &u * along).norm();
    if r1 > tol * scale {
        return Verdict::NotCanonical {
            condition: 1,
            detail: format!("E is not an eigenvector of K_E (residual {r1:e})"),
        };
    }
    if n > 1 {
        let q = complement_basis(&u, &Metric::identity(n));
        let m = q.transpose() * &ku * &q;
        let mean = m.trace() / (n - 1) as f64;
        let r2 = (m - DMatrix::identity(n - 1, n - 1) * mean).amax();
        if r2 > tol * scale {
            return Verdict::NotCanonical {
                condition: 2,
                detail: format!("K_E on the complement of E is not a multiple of the identity (residual {r2:e})"),
            };
        }
    }
    let fit = fit_constant_curvature(s, tol);
    if !fit.is_constant() {
        return Verdict::NotCanonical {
            condition: 3,
            detail: format!("curvature is not constant (residual {:e})", fit.residual),
        };
    }
    let a = fit.a;
    if !(a > tol * scale * scale) {
        return Verdict::NotCanonical {
            condition: 3,
            detail: format!("constant curvature {a} is not positive"),
        };
    }
    let want = (n as f64 + 1.0) * a.sqrt();
    if (ne - want).abs() > tol * (1.0 + ne) {
        return Verdict::NotCanonical {
            condition: 4,
            detail: format!("|E| = {ne} but (n+1) sqrt(A) = {want}"),
        };
    }
    let lambda = 2.0 * ne / (n as f64 + 1.0);
    let decomposition_agrees = decompose(s, tol.max(DEFAULT_DECOMPOSE_TOL), 0)
        .map(|d| {
            let lim = 1e-6 * (1.0 + lambda);
            (d.lambdas[0] - lambda).abs() <= lim
                && (d.mus[0] - lambda / 2.0).abs() <= lim
                && d.lambdas[1..].iter().chain(&d.mus[1..]).all(|v| v.abs() <= lim)
        })
        .unwrap_or(false);
    Verdict::Canonical {
        lambda,
        curvature: a,
        decomposition_agrees,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "crate::io::ser_vector")]
    pub u: DVector<f64>,
    #[serde(serialize_with = "crate::io::ser_vector")]
    pub v: DVector<f64>,
    /// Sectional K-curvature of `u ^ v`.
    pub k: f64,
    /// `lambda_j (lambda_1 - lambda_j)` for the chosen eigenvector.
    pub predicted: f64,
    pub eigenvalues: Vec<f64>,
}

/// For trace-free `C != 0`: a plane `e1 ^ e_j` of negative curvature, where
/// `e1` maximizes `Phi` and `e_j` is an eigenvector of `K_{e1}`.
pub fn negativity_witness(s: &StatStructure, seed: u64) -> Result<Option<Witness>> {
    let (on, _) = s.in_orthonormal_frame();
    if on.cubic().max_abs() == 0.0 {
        return Err(Error::ZeroCubic);
    }
    if !s.is_trace_free(1e-8) {
        return Err(Error::NotTraceFree(s.metric().norm(&s.trace_vector())));
    }
    if s.dim() < 2 {
        return Ok(None);
    }
    let cp = find_local_max(s, DEFAULT_RANDOM_STARTS, seed)?;
    let frame = eigenframe_at(s, &cp)?;
    let predicted = frame.predicted_curvatures();
    let (j, p) = predicted
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (j, p)| if *p < best.1 { (j, *p) } else { best });
    if !(p < 0.0) {
        return Ok(None);
    }
    let u = frame.basis[0].clone();
    let v = frame.basis[j + 1].clone();
    let k = s.sectional_curvature(&Plane::new(u.clone(), v.clone()))?;
    if !(k < 0.0) {
        return Ok(None);
    }
    Ok(Some(Witness {
        u,
        v,
        k,
        predicted: p,
        eigenvalues: frame.eigenvalues,
    }))
}
