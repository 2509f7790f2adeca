//! Finite-difference chart calculus for statistical structures on open subsets
//! of coordinate space: Levi-Civita symbols, the connections `hat +- K`, their
//! curvature tensors and the identities tying them together.
//!
//! Conventions: `Gamma^l_ij` is stored at `[l][i][j]`; a (1,3) tensor `T` is
//! stored with `T[i][j][k][l]` the `l`-th component of `T(e_i, e_j) e_k`, and
//! `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`.

mod fields;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{Metric, SymCubic};

pub use fields::{ChartField, Domain, PolyField, DEFAULT_FD_STEP};

/// Symbols `Gamma^l_ij` of a connection at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbols {
    n: usize,
    data: Vec<f64>,
}

impl Symbols {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, l: usize, i: usize, j: usize) -> f64 {
        self.data[(l * self.n + i) * self.n + j]
    }

    #[inline]
    fn set(&mut self, l: usize, i: usize, j: usize, v: f64) {
        self.data[(l * self.n + i) * self.n + j] = v;
    }

    fn combine(&self, other: &Self, w: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + w * b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.n;
        (0..n)
            .map(|l| (0..n).map(|i| (0..n).map(|j| self.get(l, i, j)).collect()).collect())
            .collect()
    }
}

/// A (1,3) tensor at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor13 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor13 {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.at(i, j, k, l)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// Largest entry of `T(X,Y) + T(Y,X)`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r = r.max((self.get(i, j, k, l) + self.get(j, i, k, l)).abs());
                    }
                }
            }
        }
        r
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| (0..n).map(|l| self.get(i, j, k, l)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

fn shifted(p: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += h;
    q
}

fn shifted2(p: &[f64], i: usize, hi: f64, j: usize, hj: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += hi;
    q[j] += hj;
    q
}

/// Fourth-order central first derivatives of the metric: `dg[i] = d_i g`.
fn metric_gradient(f: &ChartField, p: &[f64], h: f64) -> Vec<DMatrix<f64>> {
    (0..f.dim())
        .map(|i| {
            let gm2 = f.gram(&shifted(p, i, -2.0 * h));
            let gm1 = f.gram(&shifted(p, i, -h));
            let gp1 = f.gram(&shifted(p, i, h));
            let gp2 = f.gram(&shifted(p, i, 2.0 * h));
            (gm2 - gm1 * 8.0 + gp1 * 8.0 - gp2) / (12.0 * h)
        })
        .collect()
}

/// Second-order central second derivatives `d2g[i][j] = d_i d_j g`.
fn metric_hessian(f: &ChartField, p: &[f64], h: f64) -> Vec<Vec<DMatrix<f64>>> {
    let n = f.dim();
    let g0 = f.gram(p);
    let mut out = vec![vec![DMatrix::zeros(n, n); n]; n];
    for i in 0..n {
        for j in i..n {
            let d = if i == j {
                (f.gram(&shifted(p, i, h)) - &g0 * 2.0 + f.gram(&shifted(p, i, -h))) / (h * h)
            } else {
                (f.gram(&shifted2(p, i, h, j, h)) - f.gram(&shifted2(p, i, h, j, -h))
                    - f.gram(&shifted2(p, i, -h, j, h))
                    + f.gram(&shifted2(p, i, -h, j, -h)))
                    / (4.0 * h * h)
            };
            out[i][j] = d.clone();
            out[j][i] = d;
        }
    }
    out
}

/// Lowered symbols `Gamma_kij = (d_i g_jk + d_j g_ik - d_k g_ij) / 2`.
fn lowered_symbols(dg: &[DMatrix<f64>]) -> Symbols {
    let n = dg.len();
    let mut s = Symbols::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                s.set(k, i, j, 0.5 * (dg[i][(j, k)] + dg[j][(i, k)] - dg[k][(i, j)]));
            }
        }
    }
    s
}

fn raise_symbols(metric: &Metric, low: &Symbols) -> Symbols {
    let n = low.n;
    let mut out = Symbols::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let cov = nalgebra::DVector::from_fn(n, |k, _| low.get(k, i, j));
            let up = metric.raise(&cov);
            for l in 0..n {
                out.set(l, i, j, up[l]);
            }
        }
    }
    out
}

fn metric_at(f: &ChartField, p: &[f64]) -> Result<Metric> {
    Metric::new(f.gram(p))
}

fn christoffel_unchecked(f: &ChartField, p: &[f64], h: f64) -> Result<Symbols> {
    let dg = metric_gradient(f, p, h);
    Ok(raise_symbols(&metric_at(f, p)?, &lowered_symbols(&dg)))
}

/// `K^l_ij = g^{ls} C_sij`.
fn k_symbols(f: &ChartField, p: &[f64]) -> Result<Symbols> {
    let metric = metric_at(f, p)?;
    let c = f.cubic(p);
    check_cubic(f, &c)?;
    let n = f.dim();
    let mut low = Symbols::zeros(n);
    for s in 0..n {
        for i in 0..n {
            for j in 0..n {
                low.set(s, i, j, c.get(s, i, j));
            }
        }
    }
    Ok(raise_symbols(&metric, &low))
}

fn check_cubic(f: &ChartField, c: &SymCubic) -> Result<()> {
    if c.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: c.dim(),
        });
    }
    Ok(())
}

/// Levi-Civita symbols from fourth-order central differences of `g`.
pub fn christoffel_hat(f: &ChartField, p: &[f64]) -> Result<Symbols> {
    f.check_interior(p, 2.0)?;
    christoffel_unchecked(f, p, f.fd_step)
}

/// Symbols of `nabla = hat + K` and `nabla_bar = hat - K`.
pub fn statistical_connections(f: &ChartField, p: &[f64]) -> Result<(Symbols, Symbols)> {
    let hat = christoffel_hat(f, p)?;
    let k = k_symbols(f, p)?;
    Ok((hat.combine(&k, 1.0), hat.combine(&k, -1.0)))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CodazziResidual {
    /// `max |nabla g(X,Y,Z) + 2 g(K(X,Y), Z)|`.
    pub nabla_g: f64,
    /// `max |nabla g(X,Y,Z) - nabla g(Y,X,Z)|`.
    pub symmetry: f64,
}

/// `nabla g` from the differenced metric and the symbols of `nabla`.
pub fn check_codazzi(f: &ChartField, p: &[f64]) -> Result<CodazziResidual> {
    f.check_interior(p, 2.0)?;
    let n = f.dim();
    let dg = metric_gradient(f, p, f.fd_step);
    let g = f.gram(p);
    let (nabla, _) = statistical_connections(f, p)?;
    let c = f.cubic(p);
    let mut ng = vec![0.0; n * n * n];
    let mut r1 = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = dg[i][(j, k)];
                for l in 0..n {
                    v -= nabla.get(l, i, j) * g[(l, k)] + nabla.get(l, i, k) * g[(j, l)];
                }
                ng[(i * n + j) * n + k] = v;
                r1 = r1.max((v + 2.0 * c.get(i, j, k)).abs());
            }
        }
    }
    let mut r2 = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                r2 = r2.max((ng[(i * n + j) * n + k] - ng[(j * n + i) * n + k]).abs());
            }
        }
    }
    Ok(CodazziResidual {
        nabla_g: r1,
        symmetry: r2,
    })
}

/// `R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik`.
fn curvature_from(g0: &Symbols, dgam: &[Symbols]) -> Tensor13 {
    let n = g0.n;
    let mut r = Tensor13::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dgam[i].get(l, j, k) - dgam[j].get(l, i, k);
                    for m in 0..n {
                        v += g0.get(l, i, m) * g0.get(m, j, k) - g0.get(l, j, m) * g0.get(m, i, k);
                    }
                    let at = r.at(i, j, k, l);
                    r.data[at] = v;
                }
            }
        }
    }
    r
}

fn bracket_kk(k: &Symbols) -> Tensor13 {
    let n = k.n;
    let mut b = Tensor13::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += k.get(l, i, m) * k.get(m, j, kk) - k.get(l, j, m) * k.get(m, i, kk);
                    }
                    let at = b.at(i, j, kk, l);
                    b.data[at] = v;
                }
            }
        }
    }
    b
}

/// Levi-Civita curvature through the metric: `d Gamma_hat` is assembled from
/// first and second differences of `g` rather than by differencing symbols.
fn r_hat_metric_route(f: &ChartField, p: &[f64], h: f64) -> Result<Tensor13> {
    let n = f.dim();
    let metric = metric_at(f, p)?;
    let ginv = metric.raise_matrix(&DMatrix::identity(n, n));
    let dg = metric_gradient(f, p, h);
    let d2g = metric_hessian(f, p, h);
    let low = lowered_symbols(&dg);
    let hat = raise_symbols(&metric, &low);
    let mut dgam = Vec::with_capacity(n);
    for i in 0..n {
        let dginv = -(&ginv * &dg[i] * &ginv);
        let mut d = Symbols::zeros(n);
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = 0.0;
                    for s in 0..n {
                        let dlow = 0.5
                            * (d2g[i][j][(k, s)] + d2g[i][k][(j, s)] - d2g[i][s][(j, k)]);
                        v += dginv[(l, s)] * low.get(s, j, k) + ginv[(l, s)] * dlow;
                    }
                    d.set(l, j, k, v);
                }
            }
        }
        dgam.push(d);
    }
    Ok(curvature_from(&hat, &dgam))
}

#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    pub r_hat: Tensor13,
    pub r: Tensor13,
    pub r_bar: Tensor13,
    pub bracket_kk: Tensor13,
}

impl CurvatureSample {
    pub fn scale(&self) -> f64 {
        [&self.r_hat, &self.r, &self.r_bar, &self.bracket_kk]
            .iter()
            .fold(0.0f64, |m, t| m.max(t.max_abs()))
    }
}

impl Serialize for CurvatureSample {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("CurvatureSample", 5)?;
        st.serialize_field("point", &self.point)?;
        st.serialize_field("r_hat", &self.r_hat.to_nested())?;
        st.serialize_field("r", &self.r.to_nested())?;
        st.serialize_field("r_bar", &self.r_bar.to_nested())?;
        st.serialize_field("bracket_kk", &self.bracket_kk.to_nested())?;
        st.end()
    }
}

fn curvature_unchecked(f: &ChartField, p: &[f64], h: f64) -> Result<CurvatureSample> {
    let n = f.dim();
    let hat0 = christoffel_unchecked(f, p, h)?;
    let k0 = k_symbols(f, p)?;
    let mut d_plus = Vec::with_capacity(n);
    let mut d_minus = Vec::with_capacity(n);
    for i in 0..n {
        let (qp, qm) = (shifted(p, i, h), shifted(p, i, -h));
        let hp = christoffel_unchecked(f, &qp, h)?;
        let hm = christoffel_unchecked(f, &qm, h)?;
        let kp = k_symbols(f, &qp)?;
        let km = k_symbols(f, &qm)?;
        let dh = hp.combine(&hm, -1.0);
        let dk = kp.combine(&km, -1.0);
        let scale = 1.0 / (2.0 * h);
        let plus = dh.combine(&dk, 1.0);
        let minus = dh.combine(&dk, -1.0);
        d_plus.push(Symbols {
            n,
            data: plus.data.iter().map(|v| v * scale).collect(),
        });
        d_minus.push(Symbols {
            n,
            data: minus.data.iter().map(|v| v * scale).collect(),
        });
    }
    let r = curvature_from(&hat0.combine(&k0, 1.0), &d_plus);
    let r_bar = curvature_from(&hat0.combine(&k0, -1.0), &d_minus);
    Ok(CurvatureSample {
        point: p.to_vec(),
        r_hat: r_hat_metric_route(f, p, h)?,
        r,
        r_bar,
        bracket_kk: bracket_kk(&k0),
    })
}

/// `R_hat` (metric route), `R` and `R_bar` (differenced symbols) and `[K,K]` at `p`.
pub fn curvature_tensors(f: &ChartField, p: &[f64]) -> Result<CurvatureSample> {
    f.check_interior(p, 3.0)?;
    curvature_unchecked(f, p, f.fd_step)
}

/// The three equivalent conditions on a statistical structure:
/// `R = R_bar`, symmetry of `hat-nabla K`, and skewness of `g(R(X,Y)Z, W)` in `Z, W`.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma21 {
    pub r_equals_r_bar: bool,
    pub nabla_hat_k_symmetric: bool,
    pub r_skew: bool,
    pub residuals: [f64; 3],
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub point: Vec<f64>,
    pub fd_step: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub residuals: BTreeMap<String, f64>,
    pub passed: BTreeMap<String, bool>,
    pub lemma21: Lemma21,
    /// How `K_U` acts on the (1,3) tensor in the Bianchi-type identity.
    pub bianchi_action: &'static str,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.passed.values().all(|v| *v) && self.lemma21.agree
    }
}

/// `(hat-nabla_i K)^l_jk` from fourth-order differences of `K`.
fn nabla_hat_k(f: &ChartField, p: &[f64], h: f64, hat: &Symbols, k0: &Symbols) -> Result<Vec<Symbols>> {
    let n = f.dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let km2 = k_symbols(f, &shifted(p, i, -2.0 * h))?;
        let km1 = k_symbols(f, &shifted(p, i, -h))?;
        let kp1 = k_symbols(f, &shifted(p, i, h))?;
        let kp2 = k_symbols(f, &shifted(p, i, 2.0 * h))?;
        let mut d = Symbols::zeros(n);
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = (km2.get(l, j, k) - 8.0 * km1.get(l, j, k) + 8.0 * kp1.get(l, j, k)
                        - kp2.get(l, j, k))
                        / (12.0 * h);
                    for m in 0..n {
                        v += hat.get(l, i, m) * k0.get(m, j, k)
                            - hat.get(m, i, j) * k0.get(l, m, k)
                            - hat.get(m, i, k) * k0.get(l, j, m);
                    }
                    d.set(l, j, k, v);
                }
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// Derivation action of the endomorphism `a` (matrix `a[l][m]`) on all four slots of `t`.
fn derivation13(a: &DMatrix<f64>, t: &Tensor13) -> Tensor13 {
    let n = t.n;
    let mut out = Tensor13::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += a[(l, m)] * t.get(i, j, k, m)
                            - a[(m, i)] * t.get(m, j, k, l)
                            - a[(m, j)] * t.get(i, m, k, l)
                            - a[(m, k)] * t.get(i, j, m, l);
                    }
                    let at = out.at(i, j, k, l);
                    out.data[at] = v;
                }
            }
        }
    }
    out
}

/// `hat-nabla_u S` for a (1,3) field given `d_u S` and `S` at the point.
fn covariant13(hat: &Symbols, u: usize, ds: &Tensor13, s: &Tensor13) -> Tensor13 {
    let n = s.n;
    let mut out = ds.clone();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += hat.get(l, u, m) * s.get(i, j, k, m)
                            - hat.get(m, u, i) * s.get(m, j, k, l)
                            - hat.get(m, u, j) * s.get(i, m, k, l)
                            - hat.get(m, u, k) * s.get(i, j, m, l);
                    }
                    let at = out.at(i, j, k, l);
                    out.data[at] += v;
                }
            }
        }
    }
    out
}

fn bianchi_residual(f: &ChartField, p: &[f64], h: f64, sample: &CurvatureSample, hat: &Symbols, k0: &Symbols) -> Result<f64> {
    let n = f.dim();
    let s0 = sample.r.lin(1.0, &sample.r_bar, 1.0);
    let d0 = sample.r_bar.lin(1.0, &sample.r, -1.0);
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for u in 0..n {
        let sp = curvature_unchecked(f, &shifted(p, u, h), h)?;
        let sm = curvature_unchecked(f, &shifted(p, u, -h), h)?;
        let splus = sp.r.lin(1.0, &sp.r_bar, 1.0);
        let sminus = sm.r.lin(1.0, &sm.r_bar, 1.0);
        let ds = splus.lin(1.0 / (2.0 * h), &sminus, -1.0 / (2.0 * h));
        lhs.push(covariant13(hat, u, &ds, &s0));
        let ku = DMatrix::from_fn(n, n, |l, m| k0.get(l, u, m));
        rhs.push(derivation13(&ku, &d0));
    }
    let mut worst = 0.0f64;
    for u in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for l in 0..n {
                        let cyc = |t: &[Tensor13]| {
                            t[u].get(x, y, z, l) + t[x].get(y, u, z, l) + t[y].get(u, x, z, l)
                        };
                        worst = worst.max((cyc(&lhs) - cyc(&rhs)).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Evaluates the connection identities at `p`; each residual is compared with
/// `100 h^2 scale`, `scale = 1 + max |curvature entries|`.
pub fn check_identities(f: &ChartField, p: &[f64]) -> Result<IdentityReport> {
    f.check_interior(p, 4.0)?;
    let n = f.dim();
    let h = f.fd_step;
    let sample = curvature_unchecked(f, p, h)?;
    let g = f.gram(p);
    let hat = christoffel_unchecked(f, p, h)?;
    let k0 = k_symbols(f, p)?;
    let scale = 1.0 + sample.scale();
    let tolerance = 100.0 * h * h * scale;

    let lower = |t: &Tensor13, i: usize, j: usize, k: usize, w: usize| -> f64 {
        (0..n).map(|l| t.get(i, j, k, l) * g[(l, w)]).sum()
    };
    let mut duality = 0.0f64;
    let mut skew = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for w in 0..n {
                    duality = duality
                        .max((lower(&sample.r, i, j, k, w) + lower(&sample.r_bar, i, j, w, k)).abs());
                    skew = skew
                        .max(0.5 * (lower(&sample.r, i, j, k, w) + lower(&sample.r, i, j, w, k)).abs());
                }
            }
        }
    }
    let sum = sample
        .r
        .lin(1.0, &sample.r_bar, 1.0)
        .lin(1.0, &sample.r_hat.lin(2.0, &sample.bracket_kk, 2.0), -1.0)
        .max_abs();
    let r_minus = 0.5 * sample.r.lin(1.0, &sample.r_bar, -1.0).max_abs();
    let dk = nabla_hat_k(f, p, h, &hat, &k0)?;
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    asym = asym.max((dk[i].get(l, j, k) - dk[j].get(l, i, k)).abs());
                }
            }
        }
    }
    let bianchi = bianchi_residual(f, p, h, &sample, &hat, &k0)?;

    let mut residuals = BTreeMap::new();
    residuals.insert("duality".to_string(), duality);
    residuals.insert("sum_identity".to_string(), sum);
    residuals.insert("bianchi".to_string(), bianchi);
    residuals.insert("nabla_hat_k_symmetry".to_string(), asym);
    if sample.r.max_abs() <= tolerance {
        let hess = sample.r_hat.lin(1.0, &sample.bracket_kk, 1.0).max_abs();
        residuals.insert("hessian_relation".to_string(), hess);
    }
    let mut passed = BTreeMap::new();
    for key in ["duality", "sum_identity", "bianchi", "hessian_relation"] {
        if let Some(v) = residuals.get(key) {
            passed.insert(key.to_string(), *v <= tolerance);
        }
    }
    let flags = [r_minus <= tolerance, asym <= tolerance, skew <= tolerance];
    let lemma21 = Lemma21 {
        r_equals_r_bar: flags[0],
        nabla_hat_k_symmetric: flags[1],
        r_skew: flags[2],
        residuals: [r_minus, asym, skew],
        agree: flags.iter().all(|b| *b) || flags.iter().all(|b| !*b),
    };
    Ok(IdentityReport {
        point: p.to_vec(),
        fd_step: h,
        scale,
        tolerance,
        residuals,
        passed,
        lemma21,
        bianchi_action: "derivation on all four slots",
    })
}

#[cfg(test)]
mod tests;
