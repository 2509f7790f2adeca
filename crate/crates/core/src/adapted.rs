//! Constant-curvature detection and the recursive adapted-basis decomposition.
//!
//! In an adapted orthonormal basis `e_1..e_n` a structure of constant
//! sectional K-curvature `A` reads
//!
//! ```text
//! K(e_i, e_i) = mu_1 e_1 + ... + mu_{i-1} e_{i-1} + lambda_i e_i
//! K(e_i, e_j) = mu_i e_j                       (i < j)
//! ```
//!
//! with `A_0 = A`, `mu_i = (lambda_i - sqrt(lambda_i^2 - 4 A_{i-1})) / 2` and
//! `A_i = A_{i-1} - mu_i^2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::complement_basis;
use crate::phi::{find_local_max, Kind, DEFAULT_RANDOM_STARTS};
use crate::tensor::{Metric, StatStructure, SymCubic};

/// Default tolerance for the decomposition checks.
pub const DEFAULT_DECOMPOSE_TOL: f64 = 1e-8;

/// Least-squares fit of `A` and the worst violation of
/// `g(K(X,W),K(Y,Z)) - g(K(Y,W),K(X,Z)) = A [g(X,W)g(Y,Z) - g(Y,W)g(X,Z)]`
/// over orthonormal basis quadruples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureFit {
    pub a: f64,
    pub residual: f64,
    pub limit: f64,
}

impl CurvatureFit {
    pub fn is_constant(&self) -> bool {
        self.residual <= self.limit
    }
}

pub fn fit_constant_curvature(s: &StatStructure, tol: f64) -> CurvatureFit {
    let n = s.dim();
    let (on, _) = s.in_orthonormal_frame();
    let c = on.cubic();
    let cmax = c.max_abs();
    if n == 1 {
        return CurvatureFit {
            a: 0.0,
            residual: 0.0,
            limit: tol * (1.0 + cmax * cmax),
        };
    }
    // m[(a,d),(b,c)] = g(K(e_a,e_d), K(e_b,e_c))
    let mut m = vec![0.0; n * n * n * n];
    for a in 0..n {
        for d in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    m[((a * n + d) * n + b) * n + cc] =
                        (0..n).map(|k| c.get(a, d, k) * c.get(b, cc, k)).sum();
                }
            }
        }
    }
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let idx = |a: usize, d: usize, b: usize, cc: usize| ((a * n + d) * n + b) * n + cc;
    let mut qp = 0.0;
    let mut pp = 0.0;
    let mut quads = Vec::with_capacity(n * n * n * n);
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let q = m[idx(a, d, b, cc)] - m[idx(b, d, a, cc)];
                    let p = delta(a, d) * delta(b, cc) - delta(b, d) * delta(a, cc);
                    qp += q * p;
                    pp += p * p;
                    quads.push((q, p));
                }
            }
        }
    }
    let a = qp / pp;
    let residual = quads
        .iter()
        .fold(0.0f64, |r, (q, p)| r.max((q - a * p).abs()));
    CurvatureFit {
        a,
        residual,
        limit: tol * (1.0 + a * a + cmax * cmax),
    }
}

/// `Some(A)` when the sectional K-curvature is constant (within `tol`).
pub fn is_constant_curvature(s: &StatStructure, tol: f64) -> Option<f64> {
    let fit = fit_constant_curvature(s, tol);
    fit.is_constant().then_some(fit.a)
}

/// The root `mu = (lambda - sqrt(lambda^2 - 4 A_prev)) / 2` of `-A + lambda mu - mu^2 = 0`.
pub fn mu_from_lambda(lambda: f64, a_prev: f64) -> Result<f64> {
    let disc = lambda * lambda - 4.0 * a_prev;
    if disc < -1e-12 {
        return Err(Error::NegativeDiscriminant(disc));
    }
    Ok((lambda - disc.max(0.0).sqrt()) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    #[serde(rename = "As")]
    pub a_seq: Vec<f64>,
}

/// Closed forms for trace-free structures of constant curvature `A <= 0`:
/// `lambda_i = (n-i) r_i`, `mu_i = -r_i` with `r_i = sqrt(-A_{i-1}/(n-i+1))`, `lambda_n = 0`.
pub fn tracefree_canonical_params(n: usize, a: f64) -> Result<CanonicalParams> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    if !(a <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "a trace-free structure has curvature A <= 0, got {a}"
        )));
    }
    let mut lambdas = Vec::with_capacity(n);
    let mut mus = Vec::with_capacity(n - 1);
    let mut a_seq = vec![a];
    let mut prev = a;
    for i in 1..n {
        let r = (-prev / (n - i + 1) as f64).max(0.0).sqrt();
        lambdas.push((n - i) as f64 * r);
        mus.push(-r);
        prev -= r * r;
        a_seq.push(prev);
    }
    lambdas.push(0.0);
    Ok(CanonicalParams {
        lambdas,
        mus,
        a_seq,
    })
}

/// The cubic form of the adapted pattern: `C_iii = lambda_i`, `C_ijj = mu_i` for `i < j`.
pub fn adapted_cubic(lambdas: &[f64], mus: &[f64]) -> Result<SymCubic> {
    let n = lambdas.len();
    if mus.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            got: mus.len(),
        });
    }
    SymCubic::from_fn(n, |i, j, k| {
        if i == j && j == k {
            lambdas[i]
        } else if i < j && j == k {
            mus[i]
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptedDecomposition {
    #[serde(rename = "A")]
    pub a: f64,
    /// g-orthonormal adapted basis in the input coordinates.
    #[serde(
        serialize_with = "crate::io::ser_vectors",
        deserialize_with = "crate::io::de_vectors"
    )]
    pub basis: Vec<DVector<f64>>,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    #[serde(rename = "As")]
    pub a_seq: Vec<f64>,
    /// Largest entry of `C - C_adapted` in the orthonormal frame.
    pub residual: f64,
    /// Levels at which the maximizer of `Phi` is degenerate and hence not unique.
    #[serde(default)]
    pub degenerate_levels: Vec<usize>,
}

/// Recursively splits off a maximizer `e_1` of `Phi`, checks that `K_{e_1}` is
/// `mu_1` times the identity on `e_1^perp`, and continues on the projected structure.
pub fn decompose(s: &StatStructure, tol: f64, seed: u64) -> Result<AdaptedDecomposition> {
    let fit = fit_constant_curvature(s, tol);
    if !fit.is_constant() {
        return Err(Error::NotConstantCurvature(fit.residual));
    }
    let n = s.dim();
    let (on, frame) = s.in_orthonormal_frame();
    let scale = 1.0 + on.cubic().max_abs();

    let mut cur = on.clone();
    // columns: orthonormal basis of the current subspace in frame coordinates
    let mut sub = DMatrix::<f64>::identity(n, n);
    let mut a_prev = fit.a;
    let mut basis_on = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    let mut mus = Vec::with_capacity(n.saturating_sub(1));
    let mut a_seq = Vec::with_capacity(n);
    let mut degenerate_levels = Vec::new();

    for level in 0..n {
        a_seq.push(a_prev);
        let m = cur.dim();
        if m == 1 {
            let v = cur.cubic().get(0, 0, 0);
            let sign = if v < 0.0 { -1.0 } else { 1.0 };
            basis_on.push(sub.column(0) * sign);
            lambdas.push(v.abs());
            break;
        }
        let cp = find_local_max(&cur, DEFAULT_RANDOM_STARTS, seed)?;
        let mut y = cp.x.clone();
        let mut lambda = cp.value;
        if cp.kind == Kind::DegenerateMax {
            degenerate_levels.push(level);
            // At a degenerate maximum the level has the lambda-family pattern,
            // whose trace vector points along e_1; it pins the direction far
            // more sharply than the flat first-order condition does.
            let e = cur.trace_vector();
            let ne = e.norm();
            if lambda > 0.0 && ne > 0.0 {
                let cand = e / ne;
                let v = cur.cubic().cube(&cand);
                if v >= lambda - 1e-9 * (1.0 + lambda.abs()) {
                    y = cand;
                    lambda = v;
                }
            }
        }
        let q = complement_basis(&y, &Metric::identity(m));
        let restricted = q.transpose() * cur.cubic().contract1(&y) * &q;
        // mu is read off K_e1 directly: the closed-form root loses half the
        // digits when lambda^2 = 4 A (a double root), as in the lambda family.
        let mu = restricted.trace() / (m - 1) as f64;
        let dev = (restricted - DMatrix::identity(m - 1, m - 1) * mu).amax();
        let limit = tol * scale;
        if dev > limit {
            return Err(Error::ResidualTooLarge {
                what: "K_e1 on the complement is not a multiple of the identity",
                residual: dev,
                limit,
            });
        }
        let quad = -a_prev + lambda * mu - mu * mu;
        if quad.abs() > tol * scale * scale {
            return Err(Error::ResidualTooLarge {
                what: "mu does not solve -A + lambda mu - mu^2 = 0",
                residual: quad.abs(),
                limit: tol * scale * scale,
            });
        }
        if mu > lambda / 2.0 + tol.sqrt() * scale {
            // the larger root would contradict the maximality of e_1
            return Err(Error::NegativeDiscriminant(lambda * lambda - 4.0 * a_prev));
        }
        basis_on.push(&sub * &y);
        lambdas.push(lambda);
        mus.push(mu);
        a_prev -= mu * mu;
        let proj = cur.project(&y)?;
        sub = &sub * &proj.basis;
        cur = proj.structure;
    }

    let e = DMatrix::from_fn(n, n, |r, c| basis_on[c][r]);
    let rebuilt = adapted_cubic(&lambdas, &mus)?.transform(&e.transpose())?;
    let residual = rebuilt.sub(on.cubic())?.max_abs();
    let limit = tol * scale;
    if residual > limit {
        return Err(Error::ResidualTooLarge {
            what: "adapted reconstruction",
            residual,
            limit,
        });
    }
    let basis = basis_on.iter().map(|b| &frame * b).collect();
    Ok(AdaptedDecomposition {
        a: fit.a,
        basis,
        lambdas,
        mus,
        a_seq,
        residual,
        degenerate_levels,
    })
}

/// The adapted-form structure (identity metric, adapted basis as coordinates).
pub fn rebuild(d: &AdaptedDecomposition) -> Result<StatStructure> {
    Ok(StatStructure::euclidean(adapted_cubic(&d.lambdas, &d.mus)?))
}

/// For `[K,K] = 0`: an orthonormal basis with `K(e_i, e_j) = delta_ij lambda_i e_i`.
/// Values come out non-negative; a negative diagonal entry shows up with its
/// basis vector reversed.
pub fn diagonalize_commuting(s: &StatStructure, tol: f64) -> Result<(Vec<DVector<f64>>, Vec<f64>)> {
    let (on, _) = s.in_orthonormal_frame();
    let cmax = on.cubic().max_abs();
    let bracket = on
        .bracket_tensor()
        .iter()
        .flatten()
        .fold(0.0f64, |m, b| m.max(b.amax()));
    if bracket > tol * (1.0 + cmax * cmax) {
        return Err(Error::NonCommuting(bracket));
    }
    let d = decompose(s, tol, 0)?;
    let worst = d.mus.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > tol * (1.0 + cmax) {
        return Err(Error::ResidualTooLarge {
            what: "off-diagonal parameter",
            residual: worst,
            limit: tol * (1.0 + cmax),
        });
    }
    if s.is_trace_free(tol) {
        let big = d.lambdas.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if big > tol * (1.0 + cmax) {
            return Err(Error::ResidualTooLarge {
                what: "trace-free commuting structure must vanish",
                residual: big,
                limit: tol * (1.0 + cmax),
            });
        }
    }
    Ok((d.basis, d.lambdas))
}
