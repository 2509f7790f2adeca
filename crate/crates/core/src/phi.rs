//! Maximization of `Phi(X) = C(X,X,X)` on the g-unit sphere, classification of
//! critical points, and continuation of a critical frame along a family.
//!
//! All iterations run in the g-orthonormal frame of the Cholesky factor, where
//! the metric is the identity; results are mapped back to the input coordinates.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complement_basis, random_unit, sorted_eigh};
use crate::tensor::{Metric, Plane, StatStructure, SymCubic};

pub const MAX_ITERS: usize = 10_000;
/// Random starts used on top of the `2n` signed basis vectors.
pub const DEFAULT_RANDOM_STARTS: usize = 16;

const STEP_TOL: f64 = 1e-12;
const NEWTON_SWITCH: f64 = 1e-3;

fn check_unit(s: &StatStructure, x: &DVector<f64>, tol: f64) -> Result<()> {
    s.metric().check_dim(x.len())?;
    let nx = s.metric().norm(x);
    if (nx - 1.0).abs() > tol {
        return Err(Error::NotUnit(nx));
    }
    Ok(())
}

pub fn phi(s: &StatStructure, x: &DVector<f64>) -> Result<f64> {
    check_unit(s, x, 1e-8)?;
    Ok(s.cubic().cube(x))
}

/// `(Phi, Phi', Phi'', Phi''')` at `t = 0` of `t -> Phi(cos t u + sin t w)`.
pub fn derivative_profile(
    s: &StatStructure,
    u: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<[f64; 4]> {
    let g = s.metric();
    g.check_dim(u.len())?;
    g.check_dim(w.len())?;
    let off = (g.norm(u) - 1.0)
        .abs()
        .max((g.norm(w) - 1.0).abs())
        .max(g.inner(u, w).abs());
    if off > 1e-8 {
        return Err(Error::NotOrthonormal(off));
    }
    let c = s.cubic();
    let uuu = c.eval(u, u, u);
    let uuw = c.eval(u, u, w);
    let uww = c.eval(u, w, w);
    let www = c.eval(w, w, w);
    Ok([
        uuu,
        3.0 * uuw,
        3.0 * (2.0 * uww - uuu),
        3.0 * (-7.0 * uuw + 2.0 * www),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    StrictMax,
    DegenerateMax,
    Saddle,
    MinLike,
}

impl Kind {
    pub fn is_max(self) -> bool {
        matches!(self, Kind::StrictMax | Kind::DegenerateMax)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::StrictMax => "strict_max",
            Kind::DegenerateMax => "degenerate_max",
            Kind::Saddle => "saddle",
            Kind::MinLike => "min_like",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    #[serde(serialize_with = "crate::io::ser_vector")]
    pub x: DVector<f64>,
    pub value: f64,
    /// Lagrange multiplier of `C(x,x,x)` under `g(x,x) = 1`: `3/2 * value`.
    pub multiplier: f64,
    pub kind: Kind,
    /// `lambda_1 - 2 max_j lambda_j` over the eigenvalues of `K_x` on `x^perp`;
    /// infinite in dimension 1.
    pub gap: f64,
    /// `|K(x,x) - value x|_g`.
    pub residual: f64,
}

/// Degeneracy threshold for the second-order test.
pub fn degeneracy_eps(lambda1: f64) -> f64 {
    1e-7 * (1.0 + lambda1.abs())
}

fn identity_complement(y: &DVector<f64>) -> DMatrix<f64> {
    complement_basis(y, &Metric::identity(y.len()))
}

/// Classifies a g-unit vector, whether or not it is critical.
pub fn classify(s: &StatStructure, x: &DVector<f64>) -> Result<CriticalPoint> {
    check_unit(s, x, 1e-8)?;
    let (on, _) = s.in_orthonormal_frame();
    let y = s.metric().to_orthonormal(x);
    Ok(classify_on(on.cubic(), &y, x.clone()))
}

fn classify_on(c: &SymCubic, y: &DVector<f64>, x: DVector<f64>) -> CriticalPoint {
    let n = y.len();
    let cy = c.contract1(y);
    let grad = &cy * y;
    let value = grad.dot(y);
    let residual = (&grad - y * value).norm();
    let (kind, gap) = if n == 1 {
        (Kind::StrictMax, f64::INFINITY)
    } else {
        let q = identity_complement(y);
        let (eigs, _) = sorted_eigh(&(q.transpose() * &cy * &q));
        let eps = degeneracy_eps(value);
        let shifted: Vec<f64> = eigs.iter().map(|l| 2.0 * l - value).collect();
        let m = shifted.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let kind = if m < -eps {
            Kind::StrictMax
        } else if m.abs() <= eps {
            Kind::DegenerateMax
        } else if shifted.iter().all(|v| *v > eps) {
            Kind::MinLike
        } else {
            Kind::Saddle
        };
        (kind, 0.0 - m)
    };
    CriticalPoint {
        x,
        value,
        multiplier: 1.5 * value,
        kind,
        gap,
        residual,
    }
}

// Double-double helpers used to evaluate the tangential gradient accurately
// enough for Newton to resolve degenerate maxima past the cube root of eps.
mod dd {
    #[derive(Clone, Copy, Debug, Default)]
    pub struct Dd(pub f64, pub f64);

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick(s: f64, e: f64) -> Dd {
        let t = s + e;
        Dd(t, e - (t - s))
    }

    impl Dd {
        pub fn prod(a: f64, b: f64) -> Dd {
            let p = a * b;
            Dd(p, a.mul_add(b, -p))
        }

        pub fn add(self, o: Dd) -> Dd {
            let (s, e) = two_sum(self.0, o.0);
            quick(s, e + self.1 + o.1)
        }

        pub fn neg(self) -> Dd {
            Dd(-self.0, -self.1)
        }

        pub fn mul_f(self, b: f64) -> Dd {
            let p = Dd::prod(self.0, b);
            quick(p.0, p.1 + self.1 * b)
        }

        pub fn mul(self, o: Dd) -> Dd {
            let p = Dd::prod(self.0, o.0);
            quick(p.0, p.1 + self.0 * o.1 + self.1 * o.0)
        }

        pub fn value(self) -> f64 {
            self.0 + self.1
        }
    }
}

use dd::Dd;

/// Components of the tangential gradient `C(q_j, y, y) - C(y,y,y) <y,q_j>/<y,y>`
/// in double-double precision.
fn tangential_gradient(c: &SymCubic, y: &DVector<f64>, q: &DMatrix<f64>) -> DVector<f64> {
    let n = y.len();
    let mut pairs = vec![Dd::default(); n * n];
    for b in 0..n {
        for cc in 0..n {
            pairs[b * n + cc] = Dd::prod(y[b], y[cc]);
        }
    }
    let grad: Vec<Dd> = (0..n)
        .map(|a| {
            let mut acc = Dd::default();
            for b in 0..n {
                for cc in 0..n {
                    let v = c.get(a, b, cc);
                    if v != 0.0 {
                        acc = acc.add(pairs[b * n + cc].mul_f(v));
                    }
                }
            }
            acc
        })
        .collect();
    let dot = |u: &dyn Fn(usize) -> f64, v: &[Dd]| {
        (0..n).fold(Dd::default(), |acc, a| acc.add(v[a].mul_f(u(a))))
    };
    let ydd: Vec<Dd> = (0..n).map(|a| Dd(y[a], 0.0)).collect();
    let gy = dot(&|a| y[a], &grad);
    let yy = dot(&|a| y[a], &ydd).value();
    DVector::from_fn(q.ncols(), |j, _| {
        let gq = dot(&|a| q[(a, j)], &grad);
        let yq = dot(&|a| q[(a, j)], &ydd);
        gq.add(gy.mul(yq).mul_f(1.0 / yy).neg()).value()
    })
}

struct Climb {
    y: DVector<f64>,
    converged: bool,
    step: f64,
    iterations: usize,
}

/// Shifted power iteration with a tangent-space Newton polish, in orthonormal coordinates.
struct Climber<'a> {
    c: &'a SymCubic,
    tau: f64,
    scale: f64,
}

impl<'a> Climber<'a> {
    fn new(c: &'a SymCubic) -> Self {
        let n = c.dim() as f64;
        Self {
            c,
            tau: 1.0 + 3.0 * n * c.max_abs(),
            scale: 1.0 + c.max_abs(),
        }
    }

    fn power_step(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut z = self.c.contract2(y, y) + y * self.tau;
        let nz = z.norm();
        z /= nz;
        z
    }

    /// One Newton step on the tangent space; `None` when it is not usable.
    fn newton_step(&self, y: &DVector<f64>) -> Option<(DVector<f64>, f64, f64)> {
        let n = y.len();
        if n == 1 {
            return None;
        }
        let q = identity_complement(y);
        let r = tangential_gradient(self.c, y, &q);
        let rnorm = r.norm();
        let value = self.c.cube(y);
        let h = q.transpose() * self.c.contract1(y) * &q * 2.0
            - DMatrix::identity(n - 1, n - 1) * value;
        let delta = h.lu().solve(&(-&r))?;
        let dn = delta.norm();
        if !dn.is_finite() || dn > 0.5 {
            return None;
        }
        let mut z = y + &q * delta;
        z /= z.norm();
        let new_value = self.c.cube(&z);
        if new_value < value - 1e-12 * (1.0 + value.abs()) {
            return None;
        }
        let moved = (y - &z).norm();
        Some((z, moved, rnorm))
    }

    fn run(&self, y0: &DVector<f64>) -> Climb {
        let mut y = y0 / y0.norm();
        let mut step = f64::INFINITY;
        let mut iterations = 0;
        let stationary = 1e-20 * self.scale;
        let mut newton_failures = 0usize;
        while iterations < MAX_ITERS {
            iterations += 1;
            let next = self.power_step(&y);
            step = (&next - &y).norm();
            y = next;
            if step >= NEWTON_SWITCH || newton_failures > 20 {
                if step <= STEP_TOL {
                    return Climb { y, converged: true, step, iterations };
                }
                continue;
            }
            // The power step shrinks like the gradient, which is cubic in the
            // distance at a degenerate maximum, so a tiny step alone proves little.
            let power_step = step;
            // Newton phase: quadratic near strict maxima, linear near degenerate ones.
            let mut polished = 0;
            while iterations < MAX_ITERS && polished < 200 {
                iterations += 1;
                polished += 1;
                match self.newton_step(&y) {
                    Some((z, s, rnorm)) => {
                        y = z;
                        step = s;
                        if step <= STEP_TOL || rnorm <= stationary {
                            return Climb { y, converged: true, step, iterations };
                        }
                    }
                    None => {
                        newton_failures += 1;
                        if power_step <= STEP_TOL {
                            return Climb { y, converged: true, step: power_step, iterations };
                        }
                        break;
                    }
                }
            }
            if polished >= 200 {
                // stalled at rounding level; accept if the point is stationary
                let q = identity_complement(&y);
                let r = tangential_gradient(self.c, &y, &q).norm();
                if r <= 1e-12 * self.scale {
                    return Climb { y, converged: true, step, iterations };
                }
            }
        }
        Climb { y, converged: false, step, iterations }
    }
}

/// Climbs from a single start (any nonzero vector) to a critical point.
pub fn climb_from(s: &StatStructure, x0: &DVector<f64>) -> Result<CriticalPoint> {
    s.metric().check_dim(x0.len())?;
    let (on, frame) = s.in_orthonormal_frame();
    let y0 = s.metric().to_orthonormal(x0);
    if !(y0.norm() > 0.0) {
        return Err(Error::InvalidParameter("start vector is zero".into()));
    }
    let climb = Climber::new(on.cubic()).run(&y0);
    if !climb.converged {
        return Err(Error::NoConvergence {
            iterations: climb.iterations,
            best_step: climb.step,
        });
    }
    let x = &frame * &climb.y;
    Ok(classify_on(on.cubic(), &climb.y, x))
}

fn lex_greater(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Multi-start search: `random_starts` seeded Gaussian starts plus the `2n`
/// signed vectors of the orthonormal frame. Returns the converged critical
/// point of largest value; near-ties go to the lexicographically larger vector.
pub fn find_local_max(s: &StatStructure, random_starts: usize, seed: u64) -> Result<CriticalPoint> {
    let n = s.dim();
    let (on, frame) = s.in_orthonormal_frame();
    let climber = Climber::new(on.cubic());
    let mut starts = Vec::with_capacity(2 * n + random_starts);
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = DVector::zeros(n);
            e[i] = sign;
            starts.push(e);
        }
    }
    for k in 0..random_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        starts.push(random_unit(n, &mut rng));
    }
    let mut best: Option<CriticalPoint> = None;
    let mut best_step = f64::INFINITY;
    let mut total_iters = 0;
    for y0 in &starts {
        let climb = climber.run(y0);
        total_iters += climb.iterations;
        if !climb.converged {
            best_step = best_step.min(climb.step);
            continue;
        }
        let cp = classify_on(on.cubic(), &climb.y, &frame * &climb.y);
        best = Some(match best {
            None => cp,
            Some(b) => {
                let tie = 1e-10 * (1.0 + b.value.abs());
                if cp.value > b.value + tie
                    || ((cp.value - b.value).abs() <= tie && lex_greater(&cp.x, &b.x))
                {
                    cp
                } else {
                    b
                }
            }
        });
    }
    best.ok_or(Error::NoConvergence {
        iterations: total_iters,
        best_step,
    })
}

/// Exhaustive search over an angular grid of the unit sphere (dimension at most 3).
pub fn grid_oracle_max(s: &StatStructure, resolution: usize) -> Result<(DVector<f64>, f64)> {
    let n = s.dim();
    if n > 3 {
        return Err(Error::OracleDimension(n));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2".into()));
    }
    let (on, frame) = s.in_orthonormal_frame();
    let c = on.cubic();
    let mut best = (DVector::zeros(n), f64::NEG_INFINITY);
    let mut consider = |y: [f64; 3]| {
        let y = DVector::from_fn(n, |i, _| y[i]);
        let v = c.cube(&y);
        if v > best.1 {
            best = (y, v);
        }
    };
    match n {
        1 => {
            consider([1.0, 0.0, 0.0]);
            consider([-1.0, 0.0, 0.0]);
        }
        2 => {
            for k in 0..resolution {
                let t = 2.0 * std::f64::consts::PI * k as f64 / resolution as f64;
                consider([t.cos(), t.sin(), 0.0]);
            }
        }
        _ => {
            // fast path: direct polynomial evaluation over the packed entries
            let coeffs: Vec<(usize, usize, usize, f64)> = crate::tensor::canonical_indices(3)
                .zip(c.packed())
                .filter(|(_, v)| **v != 0.0)
                .map(|([i, j, k], v)| {
                    let mult = if i == j && j == k {
                        1.0
                    } else if i == j || j == k {
                        3.0
                    } else {
                        6.0
                    };
                    (i, j, k, mult * v)
                })
                .collect();
            let mut best_y = [1.0, 0.0, 0.0];
            let mut best_v = f64::NEG_INFINITY;
            for i in 0..resolution {
                let th = std::f64::consts::PI * i as f64 / (resolution - 1) as f64;
                let (st, ct) = th.sin_cos();
                for j in 0..resolution {
                    let ph = 2.0 * std::f64::consts::PI * j as f64 / resolution as f64;
                    let (sp, cp) = ph.sin_cos();
                    let y = [st * cp, st * sp, ct];
                    let v: f64 = coeffs.iter().map(|&(a, b, c, w)| w * y[a] * y[b] * y[c]).sum();
                    if v > best_v {
                        best_v = v;
                        best_y = y;
                    }
                }
            }
            consider(best_y);
        }
    }
    let (y, v) = best;
    Ok((&frame * y, v))
}

/// Eigenbasis of `K_{e1}` with `e1` first and the remaining eigenvalues descending.
#[derive(Debug, Clone, Serialize)]
pub struct Eigenframe {
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub basis: Vec<DVector<f64>>,
    pub eigenvalues: Vec<f64>,
}

impl Eigenframe {
    /// `k(e1 ^ e_j) = lambda_j (lambda_1 - lambda_j)` for `j >= 2`.
    pub fn predicted_curvatures(&self) -> Vec<f64> {
        let l1 = self.eigenvalues[0];
        self.eigenvalues[1..].iter().map(|l| l * (l1 - l)).collect()
    }
}

pub fn eigenframe_at(s: &StatStructure, e1: &CriticalPoint) -> Result<Eigenframe> {
    check_unit(s, &e1.x, 1e-8)?;
    let n = s.dim();
    let (on, frame) = s.in_orthonormal_frame();
    let y = s.metric().to_orthonormal(&e1.x);
    let c = on.cubic();
    let cy = c.contract1(&y);
    let value = y.dot(&(&cy * &y));
    let residual = (&cy * &y - &y * value).norm();
    let limit = 1e-8 * (1.0 + value.abs());
    if residual > limit {
        return Err(Error::ResidualTooLarge {
            what: "first-order condition",
            residual,
            limit,
        });
    }
    let mut basis = vec![e1.x.clone()];
    let mut eigenvalues = vec![value];
    if n > 1 {
        let q = identity_complement(&y);
        let (eigs, vecs) = sorted_eigh(&(q.transpose() * &cy * &q));
        let rotated = &q * vecs;
        for j in 0..n - 1 {
            basis.push(&frame * rotated.column(j));
            eigenvalues.push(eigs[j]);
        }
    }
    Ok(Eigenframe { basis, eigenvalues })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuarterBound {
    pub k: f64,
    pub bound: f64,
    pub strict: bool,
    /// `|K_{e1} x - (lambda_1/2) x|_g`, reported on the equality branch.
    pub eigen_residual: Option<f64>,
}

/// Checks `k(e1 ^ x) <= lambda_1^2 / 4` at a local maximum `e1`, with the
/// eigenvector characterization on the equality branch.
pub fn quarter_bound_check(
    s: &StatStructure,
    e1: &CriticalPoint,
    x: &DVector<f64>,
) -> Result<QuarterBound> {
    check_unit(s, &e1.x, 1e-8)?;
    check_unit(s, x, 1e-8)?;
    if !e1.kind.is_max() {
        return Err(Error::NotStrictMax(e1.kind.as_str().into()));
    }
    let dot = s.metric().inner(&e1.x, x).abs();
    if dot > 1e-8 {
        return Err(Error::NotOrthonormal(dot));
    }
    let l1 = e1.value;
    let k = s.sectional_curvature(&Plane::new(e1.x.clone(), x.clone()))?;
    let bound = l1 * l1 / 4.0;
    let eps = 1e-9 * (1.0 + l1 * l1);
    if k > bound + eps {
        return Err(Error::QuarterBoundViolated { k, bound });
    }
    let strict = k < bound - eps;
    let eigen_residual = if strict {
        None
    } else {
        let kx = s.k(&e1.x, x)?;
        let r = s.metric().norm(&(kx - x * (l1 / 2.0)));
        if r > 1e-6 {
            return Err(Error::ResidualTooLarge {
                what: "equality-case eigenvector",
                residual: r,
                limit: 1e-6,
            });
        }
        Some(r)
    };
    Ok(QuarterBound {
        k,
        bound,
        strict,
        eigen_residual,
    })
}

/// A one-parameter family of structures on `[0, 1]`.
pub trait Family {
    fn at(&self, t: f64) -> Result<StatStructure>;
}

impl<F> Family for F
where
    F: Fn(f64) -> Result<StatStructure>,
{
    fn at(&self, t: f64) -> Result<StatStructure> {
        self(t)
    }
}

/// Piecewise-linear interpolation (entrywise in `g` and `C`) between snapshots.
#[derive(Debug, Clone)]
pub struct SnapshotFamily {
    snapshots: Vec<(f64, StatStructure)>,
}

impl SnapshotFamily {
    pub fn new(mut snapshots: Vec<(f64, StatStructure)>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InvalidParameter("no snapshots".into()));
        }
        if snapshots.iter().any(|(t, _)| !t.is_finite()) {
            return Err(Error::InvalidParameter("snapshot t must be finite".into()));
        }
        snapshots.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = snapshots[0].1.dim();
        for (_, s) in &snapshots {
            if s.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: s.dim(),
                });
            }
        }
        if snapshots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate snapshot t".into()));
        }
        let (first, last) = (snapshots[0].0, snapshots[snapshots.len() - 1].0);
        if first > 0.0 || last < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "snapshots cover [{first}, {last}], need [0, 1]"
            )));
        }
        Ok(Self { snapshots })
    }
}

impl Family for SnapshotFamily {
    fn at(&self, t: f64) -> Result<StatStructure> {
        let snaps = &self.snapshots;
        let hi = snaps.partition_point(|(ts, _)| *ts < t);
        if hi < snaps.len() && snaps[hi].0 == t {
            return Ok(snaps[hi].1.clone());
        }
        if hi == 0 || hi == snaps.len() {
            return Err(Error::InvalidParameter(format!("t = {t} outside the snapshots")));
        }
        let (t0, a) = &snaps[hi - 1];
        let (t1, b) = &snaps[hi];
        let w = (t - t0) / (t1 - t0);
        let gram = a.metric().gram() * (1.0 - w) + b.metric().gram() * w;
        StatStructure::new(Metric::new(gram)?, a.cubic().lerp(b.cubic(), w)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FramePath {
    pub ts: Vec<f64>,
    pub points: Vec<CriticalPoint>,
    /// `|F|_inf` of the Lagrange system at each node.
    pub residuals: Vec<f64>,
}

/// Lagrange system `F = (3 C(., y, y) - 2 l G y, y^T G y - 1)` and its Jacobian.
fn lagrange_system(s: &StatStructure, y: &DVector<f64>, l: f64) -> (DVector<f64>, DMatrix<f64>) {
    let n = s.dim();
    let gram = s.metric().gram();
    let cy = s.cubic().contract1(y);
    let gy = gram * y;
    let mut f = DVector::zeros(n + 1);
    f.rows_mut(0, n).copy_from(&(&cy * y * 3.0 - &gy * (2.0 * l)));
    f[n] = y.dot(&gy) - 1.0;
    let mut j = DMatrix::zeros(n + 1, n + 1);
    j.view_mut((0, 0), (n, n))
        .copy_from(&(&cy * 6.0 - gram * (2.0 * l)));
    for a in 0..n {
        j[(a, n)] = -2.0 * gy[a];
        j[(n, a)] = 2.0 * gy[a];
    }
    (f, j)
}

const TRACK_RESIDUAL: f64 = 1e-10;

fn lagrange_newton(
    s: &StatStructure,
    y0: &DVector<f64>,
    l0: f64,
) -> Option<(DVector<f64>, f64, f64)> {
    let n = s.dim();
    let mut y = y0.clone();
    let mut l = l0;
    let (mut f, mut j) = lagrange_system(s, &y, l);
    for it in 0..40 {
        let fnorm = f.amax();
        if fnorm <= 1e-14 * (1.0 + s.cubic().max_abs()) {
            break;
        }
        let delta = j.clone().lu().solve(&(-&f))?;
        let dn = delta.amax();
        if !dn.is_finite() || (it == 0 && dn > 0.5) {
            return None;
        }
        y += delta.rows(0, n);
        l += delta[n];
        let next = lagrange_system(s, &y, l);
        let improved = next.0.amax() < fnorm;
        f = next.0;
        j = next.1;
        if dn <= 1e-15 * (1.0 + l.abs()) || (!improved && fnorm <= TRACK_RESIDUAL) {
            break;
        }
    }
    let r = f.amax();
    (r <= TRACK_RESIDUAL).then_some((y, l, r))
}

/// Continues a strict maximum of `family(0)` along `t = i/steps` with Newton
/// on the Lagrange system, halving the step on failure.
pub fn track_critical_frame(
    family: &dyn Family,
    steps: usize,
    start: &CriticalPoint,
) -> Result<FramePath> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let s0 = family.at(0.0)?;
    let cp0 = classify(&s0, &start.x)?;
    let limit = 1e-8 * (1.0 + cp0.value.abs());
    if cp0.residual > limit {
        return Err(Error::ResidualTooLarge {
            what: "start is not critical",
            residual: cp0.residual,
            limit,
        });
    }
    if cp0.kind != Kind::StrictMax {
        return Err(Error::NotStrictMax(cp0.kind.as_str().into()));
    }
    let (_, j0) = lagrange_system(&s0, &start.x, cp0.multiplier);
    let sv = j0.clone().svd(false, false).singular_values;
    let (smin, smax) = (sv.min(), sv.max());
    if smin <= 1e-12 * smax.max(1.0) {
        return Err(Error::SingularJacobian(smin));
    }
    let (mut y, mut l, r0) =
        lagrange_newton(&s0, &start.x, cp0.multiplier).ok_or(Error::SingularJacobian(smin))?;

    let mut path = FramePath {
        ts: vec![0.0],
        points: vec![node_point(&s0, &y)?],
        residuals: vec![r0],
    };
    let min_step = 1e-4;
    let mut t = 0.0f64;
    for i in 1..=steps {
        let target = i as f64 / steps as f64;
        let mut h = target - t;
        while t < target {
            let next_t = if t + h >= target - 1e-15 { target } else { t + h };
            let s = family.at(next_t)?;
            let attempt = lagrange_newton(&s, &y, l).filter(|(yn, _, _)| {
                s.metric().inner(&y, yn) > 0.0
            });
            match attempt {
                Some((yn, ln, r)) => {
                    y = yn;
                    l = ln;
                    t = next_t;
                    if t == target {
                        path.ts.push(t);
                        path.points.push(node_point(&s, &y)?);
                        path.residuals.push(r);
                    }
                }
                None => {
                    h /= 2.0;
                    if h < min_step {
                        return Err(Error::StepUnderflow { last_t: t });
                    }
                }
            }
        }
    }
    Ok(path)
}

fn node_point(s: &StatStructure, y: &DVector<f64>) -> Result<CriticalPoint> {
    let x = y / s.metric().norm(y);
    classify(s, &x)
}
