//! Analytic statistical structures on coordinate boxes.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Metric, SymCubic};

pub const DEFAULT_FD_STEP: f64 = 1e-3;
const MAX_DEGREE: u32 = 6;

type GramFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type CubicFn = dyn Fn(&[f64]) -> SymCubic + Send + Sync;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn cube(n: usize, r: f64) -> Self {
        Self {
            lo: vec![-r; n],
            hi: vec![r; n],
        }
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

/// A metric field and a cubic-form field on a box.
#[derive(Clone)]
pub struct ChartField {
    dim: usize,
    g_at: Arc<GramFn>,
    c_at: Arc<CubicFn>,
    pub domain: Domain,
    pub fd_step: f64,
}

impl fmt::Debug for ChartField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartField")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl ChartField {
    pub fn new(
        dim: usize,
        domain: Domain,
        g_at: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        c_at: impl Fn(&[f64]) -> SymCubic + Send + Sync + 'static,
    ) -> Result<Self> {
        SymCubic::zeros(dim)?;
        for side in [&domain.lo, &domain.hi] {
            if side.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: side.len(),
                });
            }
        }
        if domain.lo.iter().zip(&domain.hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidParameter("domain needs lo < hi on every axis".into()));
        }
        let f = Self {
            dim,
            g_at: Arc::new(g_at),
            c_at: Arc::new(c_at),
            domain,
            fd_step: DEFAULT_FD_STEP,
        };
        let p = f.domain.center();
        Metric::new(f.gram(&p))?;
        let c = f.cubic(&p);
        if c.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: c.dim(),
            });
        }
        Ok(f)
    }

    pub fn with_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("fd_step must be positive, got {h}")));
        }
        self.fd_step = h;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self, p: &[f64]) -> DMatrix<f64> {
        (self.g_at)(p)
    }

    pub fn cubic(&self, p: &[f64]) -> SymCubic {
        (self.c_at)(p)
    }

    /// Errors unless `p` lies at least `steps * fd_step` inside the box.
    pub fn check_interior(&self, p: &[f64], steps: f64) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        let margin = steps * self.fd_step;
        let inside = p
            .iter()
            .zip(self.domain.lo.iter().zip(&self.domain.hi))
            .all(|(x, (a, b))| *x - a >= margin && b - *x >= margin);
        if !inside {
            return Err(Error::OutsideDomain {
                point: p.to_vec(),
                margin,
            });
        }
        Ok(())
    }

    /// Constant metric and cubic form on `[-1, 1]^n`.
    pub fn constant(metric: Metric, cubic: SymCubic) -> Result<Self> {
        let n = metric.dim();
        let g = metric.gram().clone();
        Self::new(n, Domain::cube(n, 1.0), move |_| g.clone(), move |_| cubic.clone())
    }

    /// Round sphere in stereographic coordinates, `g = 4 / (1 + |x|^2)^2 I`, with `C = 0`.
    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(
            n,
            Domain::cube(n, 1.0),
            move |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                DMatrix::identity(n, n) * (4.0 / ((1.0 + r2) * (1.0 + r2)))
            },
            move |_| SymCubic::zeros(n).expect("positive dimension"),
        )
    }

    /// `g = diag(e^{2x}, 1)` on the plane with `C = 0`.
    pub fn diag_exp() -> Result<Self> {
        Self::new(
            2,
            Domain::cube(2, 1.0),
            |x| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![(2.0 * x[0]).exp(), 1.0])),
            |_| SymCubic::zeros(2).expect("positive dimension"),
        )
    }

    /// Hessian structure of `phi = e^x + e^y + e^{x+y}`: `g = d^2 phi`, `C = -d^3 phi / 2`.
    pub fn hessian_exp() -> Result<Self> {
        Self::new(
            2,
            Domain::cube(2, 1.0),
            |x| {
                let (a, b, c) = (x[0].exp(), x[1].exp(), (x[0] + x[1]).exp());
                DMatrix::from_row_slice(2, 2, &[a + c, c, c, b + c])
            },
            |x| {
                let (a, b, c) = (x[0].exp(), x[1].exp(), (x[0] + x[1]).exp());
                SymCubic::from_fn(2, |i, j, k| {
                    let ones = [i, j, k].iter().filter(|v| **v == 1).count();
                    let pure = match ones {
                        0 => a,
                        3 => b,
                        _ => 0.0,
                    };
                    -0.5 * (pure + c)
                })
                .expect("positive dimension")
            },
        )
    }

    /// One-dimensional Hessian structure of `phi = x^4 / 12` on `[0.5, 2]`.
    pub fn hessian_quartic() -> Result<Self> {
        Self::new(
            1,
            Domain {
                lo: vec![0.5],
                hi: vec![2.0],
            },
            |x| DMatrix::from_element(1, 1, x[0] * x[0]),
            |x| SymCubic::from_fn(1, |_, _, _| -x[0]).expect("positive dimension"),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    pub pow: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricPoly {
    pub idx: [usize; 2],
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubicPoly {
    pub idx: [usize; 3],
    pub terms: Vec<Term>,
}

/// Polynomial field description. Either `potential` is given (Hessian mode:
/// `g = d^2 phi`, `C = -d^3 phi / 2`), or `metric`/`cubic` entries with
/// `i <= j (<= k)`; an absent `metric` means the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyField {
    pub dim: usize,
    pub domain: Domain,
    #[serde(default)]
    pub potential: Option<Vec<Term>>,
    #[serde(default)]
    pub metric: Option<Vec<MetricPoly>>,
    #[serde(default)]
    pub cubic: Vec<CubicPoly>,
}

#[derive(Debug, Clone)]
struct Poly(Vec<(f64, Vec<u32>)>);

impl Poly {
    fn new(dim: usize, terms: &[Term]) -> Result<Self> {
        for t in terms {
            if t.pow.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.pow.len(),
                });
            }
            if t.pow.iter().sum::<u32>() > MAX_DEGREE {
                return Err(Error::InvalidParameter(format!(
                    "monomial {:?} exceeds total degree {MAX_DEGREE}",
                    t.pow
                )));
            }
            if !t.coef.is_finite() {
                return Err(Error::InvalidParameter("non-finite coefficient".into()));
            }
        }
        Ok(Self(terms.iter().map(|t| (t.coef, t.pow.clone())).collect()))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(c, pw)| c * x.iter().zip(pw).map(|(v, e)| v.powi(*e as i32)).product::<f64>())
            .sum()
    }

    fn derivative(&self, i: usize) -> Self {
        Self(
            self.0
                .iter()
                .filter(|(_, pw)| pw[i] > 0)
                .map(|(c, pw)| {
                    let mut q = pw.clone();
                    q[i] -= 1;
                    (c * pw[i] as f64, q)
                })
                .collect(),
        )
    }
}

impl PolyField {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<ChartField> {
        let n = self.dim;
        SymCubic::zeros(n)?;
        let (metric, cubic) = match &self.potential {
            Some(phi) => {
                if self.metric.is_some() || !self.cubic.is_empty() {
                    return Err(Error::InvalidParameter(
                        "potential excludes metric and cubic entries".into(),
                    ));
                }
                let phi = Poly::new(n, phi)?;
                let mut metric = vec![vec![Poly(Vec::new()); n]; n];
                let mut cubic = vec![Poly(Vec::new()); n * n * n];
                for i in 0..n {
                    let di = phi.derivative(i);
                    for j in 0..n {
                        let dij = di.derivative(j);
                        for k in 0..n {
                            let mut d = dij.derivative(k);
                            d.0.iter_mut().for_each(|t| t.0 *= -0.5);
                            cubic[(i * n + j) * n + k] = d;
                        }
                        metric[i][j] = dij;
                    }
                }
                (Some(metric), cubic)
            }
            None => {
                let metric = match &self.metric {
                    None => None,
                    Some(entries) => {
                        let mut m = vec![vec![Poly(Vec::new()); n]; n];
                        let mut seen = vec![false; n * n];
                        for e in entries {
                            let [i, j] = e.idx;
                            if i > j || j >= n {
                                return Err(Error::InvalidParameter(format!(
                                    "metric index {:?} must satisfy i <= j < {n}",
                                    e.idx
                                )));
                            }
                            if std::mem::replace(&mut seen[i * n + j], true) {
                                return Err(Error::InvalidParameter(format!(
                                    "duplicate metric index {:?}",
                                    e.idx
                                )));
                            }
                            let p = Poly::new(n, &e.terms)?;
                            m[i][j] = p.clone();
                            m[j][i] = p;
                        }
                        Some(m)
                    }
                };
                let mut cubic = vec![Poly(Vec::new()); n * n * n];
                let mut seen = vec![false; n * n * n];
                for e in &self.cubic {
                    let [i, j, k] = e.idx;
                    if k >= n {
                        return Err(Error::IndexOutOfRange { idx: e.idx, dim: n });
                    }
                    if !(i <= j && j <= k) {
                        return Err(Error::NonCanonicalIndex(e.idx));
                    }
                    if std::mem::replace(&mut seen[(i * n + j) * n + k], true) {
                        return Err(Error::DuplicateIndex(e.idx));
                    }
                    let p = Poly::new(n, &e.terms)?;
                    for [a, b, c] in [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
                        cubic[(a * n + b) * n + c] = p.clone();
                    }
                }
                (metric, cubic)
            }
        };
        ChartField::new(
            n,
            self.domain.clone(),
            move |x| match &metric {
                None => DMatrix::identity(n, n),
                Some(m) => DMatrix::from_fn(n, n, |i, j| m[i][j].eval(x)),
            },
            move |x| {
                SymCubic::from_fn(n, |i, j, k| cubic[(i * n + j) * n + k].eval(x))
                    .expect("positive dimension")
            },
        )
    }
}
