//! Constructors for the standard example structures and seeded random generators.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adapted::{adapted_cubic, tracefree_canonical_params};
use crate::error::{Error, Result};
use crate::tensor::{Metric, Plane, StatStructure, SymCubic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    LambdaQuarter,
    HUmbilical,
    TracefreeCanonical,
    Diagonal,
    Random,
    RandomTracefree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    List(Vec<f64>),
}

/// Declarative description of a family member; the `generate` subcommand reads this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub dim: usize,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl FamilySpec {
    fn scalar(&self, name: &str) -> Result<f64> {
        match self.params.get(name) {
            Some(ParamValue::Scalar(v)) => Ok(*v),
            Some(ParamValue::List(_)) => Err(Error::InvalidParameter(format!(
                "parameter `{name}` must be a number"
            ))),
            None => Err(Error::InvalidParameter(format!(
                "missing parameter `{name}` for {:?}",
                self.kind
            ))),
        }
    }

    pub fn build(&self) -> Result<StatStructure> {
        match self.kind {
            FamilyKind::LambdaQuarter => make_lambda_quarter(self.dim, self.scalar("lambda")?),
            FamilyKind::HUmbilical => {
                make_h_umbilical(self.dim, self.scalar("lambda")?, self.scalar("mu")?)
            }
            FamilyKind::TracefreeCanonical => make_tracefree_canonical(self.dim, self.scalar("A")?),
            FamilyKind::Diagonal => match self.params.get("values") {
                Some(ParamValue::List(v)) => {
                    if v.len() != self.dim {
                        return Err(Error::DimensionMismatch {
                            expected: self.dim,
                            got: v.len(),
                        });
                    }
                    make_diagonal(v)
                }
                _ => Err(Error::InvalidParameter(
                    "diagonal needs a `values` list".into(),
                )),
            },
            FamilyKind::Random => make_random(self.dim, self.seed.unwrap_or(0), false),
            FamilyKind::RandomTracefree => make_random(self.dim, self.seed.unwrap_or(0), true),
        }
    }
}

fn need_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least {min}, got {n}"
        )));
    }
    Ok(())
}

/// `K(e1,e1) = l e1`, `K(e1,ei) = l/2 ei`, `K(ei,ei) = l/2 e1`, `K(ei,ej) = 0`.
/// Constant sectional K-curvature `l^2/4`.
pub fn make_lambda_quarter(n: usize, lambda: f64) -> Result<StatStructure> {
    need_dim(n, 2)?;
    let mut mus = vec![0.0; n - 1];
    mus[0] = lambda / 2.0;
    let mut lambdas = vec![0.0; n];
    lambdas[0] = lambda;
    Ok(StatStructure::euclidean(adapted_cubic(&lambdas, &mus)?))
}

/// `K(e1,e1) = l e1`, `K(e1,ej) = m ej`, `K(ej,ej) = m e1`, `K(ei,ej) = 0` (componentwise recipe).
pub fn make_h_umbilical(n: usize, lambda: f64, mu: f64) -> Result<StatStructure> {
    need_dim(n, 2)?;
    let mut mus = vec![0.0; n - 1];
    mus[0] = mu;
    let mut lambdas = vec![0.0; n];
    lambdas[0] = lambda;
    Ok(StatStructure::euclidean(adapted_cubic(&lambdas, &mus)?))
}

/// The same H-umbilical form from the coordinate-free expression
/// `K(X,Y) = (l - 3m) x1 y1 e1 + m g(X,Y) e1 + m x1 Y + m y1 X`.
pub fn h_umbilical_closed_form(n: usize, lambda: f64, mu: f64) -> Result<StatStructure> {
    need_dim(n, 2)?;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let first = |a: usize| delta(a, 0);
    // C(X,Y,Z) = g(X, K(Y,Z)) evaluated on basis vectors
    let cubic = SymCubic::from_fn(n, |x, y, z| {
        (lambda - 3.0 * mu) * first(x) * first(y) * first(z)
            + mu * delta(y, z) * first(x)
            + mu * first(y) * delta(x, z)
            + mu * first(z) * delta(x, y)
    })?;
    Ok(StatStructure::euclidean(cubic))
}

/// `k(X ^ Y) = m^2 + m (l - 2m)(x1^2 + y1^2)` for orthonormal `X, Y` with first coordinates `x1, y1`.
pub fn h_umbilical_curvature(lambda: f64, mu: f64, x1: f64, y1: f64) -> Result<f64> {
    let r = x1 * x1 + y1 * y1;
    if r > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "x1^2 + y1^2 = {r} exceeds 1; no orthonormal pair realizes it"
        )));
    }
    Ok(mu * mu + mu * (lambda - 2.0 * mu) * r)
}

/// An orthonormal pair `(X, Y)` in `R^n` (n >= 3) with `X . e1 = x1` and `Y . e1 = y1`.
pub fn h_umbilical_plane(n: usize, x1: f64, y1: f64) -> Result<Plane> {
    need_dim(n, 3)?;
    let r = x1 * x1 + y1 * y1;
    if r > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("x1^2 + y1^2 = {r} exceeds 1")));
    }
    let mut x = DVector::zeros(n);
    let mut y = DVector::zeros(n);
    let a = (1.0 - x1 * x1).max(0.0).sqrt();
    x[0] = x1;
    x[1] = a;
    y[0] = y1;
    if a < 1e-12 {
        y[2] = 1.0;
        y[0] = 0.0;
    } else {
        let b = -x1 * y1 / a;
        y[1] = b;
        y[2] = (1.0 - y1 * y1 - b * b).max(0.0).sqrt();
    }
    Ok(Plane::new(x, y))
}

/// Trace-free structure of constant curvature `A <= 0` in its adapted basis.
pub fn make_tracefree_canonical(n: usize, a: f64) -> Result<StatStructure> {
    need_dim(n, 2)?;
    let params = tracefree_canonical_params(n, a)?;
    Ok(StatStructure::euclidean(adapted_cubic(
        &params.lambdas,
        &params.mus,
    )?))
}

/// `K(ei, ei) = v_i ei`, `K(ei, ej) = 0`; `[K,K]` vanishes identically.
pub fn make_diagonal(values: &[f64]) -> Result<StatStructure> {
    need_dim(values.len(), 1)?;
    let entries: Vec<_> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| ([i, i, i], v))
        .collect();
    Ok(StatStructure::euclidean(SymCubic::from_entries(
        values.len(),
        &entries,
    )?))
}

/// Canonical entries i.i.d. uniform on `[-1, 1]`; optionally projected onto the trace-free subspace.
pub fn make_random(n: usize, seed: u64, tracefree: bool) -> Result<StatStructure> {
    need_dim(n, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cubic = SymCubic::from_fn(n, |_, _, _| rng.random_range(-1.0..=1.0))?;
    let s = StatStructure::euclidean(cubic);
    if !tracefree {
        return Ok(s);
    }
    let p = s.trace_free_part();
    let e = p.metric().norm(&p.trace_vector());
    if e > 1e-10 {
        return Err(Error::NotTraceFree(e));
    }
    Ok(p)
}

/// Random SPD metric `I + B B^T / n` (well conditioned), for exercising non-identity metrics.
pub fn random_metric(n: usize, seed: u64) -> Result<Metric> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let b = nalgebra::DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
    let g = nalgebra::DMatrix::identity(n, n) + &b * b.transpose() / n as f64;
    Metric::new((&g + g.transpose()) * 0.5)
}

/// A random plane spanned by two Gaussian vectors.
pub fn random_plane<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Plane {
    let u = crate::linalg::random_unit(n, rng);
    let v = crate::linalg::random_unit(n, rng);
    Plane::new(u, v)
}
