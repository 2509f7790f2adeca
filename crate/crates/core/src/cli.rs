//! Command-line front end. Every subcommand reads JSON, writes one JSON
//! document to stdout and exits 0 (success), 2 (bad input) or 3 (numerical failure).

use std::ffi::OsString;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::adapted::{self, AdaptedDecomposition, DEFAULT_DECOMPOSE_TOL};
use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec, ParamValue};
use crate::identities;
use crate::io::{instance_json, parse_instance, parse_snapshots};
use crate::manifold::{self, ChartField, PolyField, DEFAULT_FD_STEP};
use crate::phi::{self, SnapshotFamily, DEFAULT_RANDOM_STARTS};
use crate::tensor::{Plane, StatStructure, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(name = "kcurv", version, about = "Sectional K-curvature of statistical structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Input: a file path, inline JSON, or `-` for stdin (the default).
    #[arg(long, global = true)]
    pub input: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the tolerance of the chosen operation.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Progress notes on stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sectional K-curvature of one plane.
    Curvature {
        #[command(flatten)]
        common: Common,
        /// Two coordinate indices, e.g. `0,1`.
        #[arg(long, conflicts_with_all = ["u", "v"])]
        plane: Option<String>,
        /// First spanning vector, comma-separated.
        #[arg(long, requires = "v", allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, requires = "u", allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Local maximum of `C(x,x,x)` on the unit sphere.
    Maximize {
        #[command(flatten)]
        common: Common,
        /// Number of random starts besides the 2n basis starts.
        #[arg(long, default_value_t = DEFAULT_RANDOM_STARTS)]
        starts: usize,
        /// Climb from this vector only.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        /// Also report the eigenframe of `K_x`.
        #[arg(long)]
        eigenframe: bool,
        /// Compare with a brute-force grid maximum at this resolution (dim <= 3).
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Adapted-basis decomposition of a constant-curvature structure.
    Decompose {
        #[command(flatten)]
        common: Common,
    },
    /// Structural checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        check: Check,
    },
    /// Emit an instance from a named family, a family spec, or a decomposition.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, required_unless_present_any = ["spec", "from_decomposition"])]
        kind: Option<KindArg>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        /// Constant curvature `A` of the trace-free canonical family.
        #[arg(long = "A", alias = "a", allow_hyphen_values = true)]
        a: Option<f64>,
        /// Diagonal entries, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        /// Family spec JSON (path or inline).
        #[arg(long, conflicts_with_all = ["kind", "from_decomposition"])]
        spec: Option<String>,
        /// Rebuild the structure from a decomposition JSON (path or inline).
        #[arg(long, conflicts_with = "kind")]
        from_decomposition: Option<String>,
    },
    /// Continue a strict maximum along a family given as snapshots over `t in [0, 1]`.
    Track {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Starting vector for the climb at `t = 0`; defaults to the multi-start maximum.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
    },
    /// Finite-difference check of the connection identities on a chart.
    ManifoldCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = FieldArg::HessianExp)]
        field: FieldArg,
        /// Dimension of the sphere chart.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Evaluation point; defaults to the centre of the domain.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        fd_step: f64,
        /// Include the curvature tensors in the output.
        #[arg(long)]
        tensors: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Check {
    CurvatureLike,
    Constant,
    Canonical,
    Rigidity,
    Witness,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum KindArg {
    LambdaQuarter,
    HUmbilical,
    TracefreeCanonical,
    Diagonal,
    Random,
    RandomTracefree,
}

impl From<KindArg> for FamilyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::LambdaQuarter => FamilyKind::LambdaQuarter,
            KindArg::HUmbilical => FamilyKind::HUmbilical,
            KindArg::TracefreeCanonical => FamilyKind::TracefreeCanonical,
            KindArg::Diagonal => FamilyKind::Diagonal,
            KindArg::Random => FamilyKind::Random,
            KindArg::RandomTracefree => FamilyKind::RandomTracefree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    HessianExp,
    Sphere,
    DiagExp,
    Quartic,
    /// Constant field from an instance given with `--input`.
    Constant,
    /// Polynomial field JSON given with `--input`.
    Polynomial,
}

/// Result of one invocation: exit code and the JSON document for stdout.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn render(v: &Value, pretty: bool) -> String {
    let mut s = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    }
    .expect("json values serialize");
    s.push('\n');
    s
}

fn error_value(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}

/// Parses `args` (program name first) and runs the command; `stdin` is read
/// only when the input comes from standard input.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: 0,
                    stdout: e.to_string(),
                };
            }
            eprintln!("{e}");
            return Outcome {
                code: 2,
                stdout: render(&error_value("usage", e.to_string().trim()), false),
            };
        }
    };
    let common = cli.command.common().clone();
    match dispatch(&cli.command, stdin) {
        Ok(v) => Outcome {
            code: 0,
            stdout: render(&v, common.pretty),
        },
        Err(e) => {
            eprintln!("kcurv: {e}");
            Outcome {
                code: if e.is_numerical() { 3 } else { 2 },
                stdout: render(&error_value(e.kind(), &e.to_string()), common.pretty),
            }
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Curvature { common, .. }
            | Command::Maximize { common, .. }
            | Command::Decompose { common }
            | Command::Verify { common, .. }
            | Command::Generate { common, .. }
            | Command::Track { common, .. }
            | Command::ManifoldCheck { common, .. } => common,
        }
    }
}

fn read_text(arg: Option<&str>, stdin: &mut dyn Read) -> Result<String> {
    match arg {
        None | Some("-") => {
            let mut s = String::new();
            stdin.read_to_string(&mut s)?;
            Ok(s)
        }
        Some(s) if s.trim_start().starts_with(['{', '[']) => Ok(s.to_string()),
        Some(path) => Ok(std::fs::read_to_string(path)?),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("`{t}` is not a number")))
        })
        .collect()
}

fn parse_vector(s: &str, n: usize) -> Result<DVector<f64>> {
    let v = parse_reals(s)?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    Ok(DVector::from_vec(v))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn log(common: &Common, msg: impl FnOnce() -> String) {
    if common.verbose {
        eprintln!("kcurv: {}", msg());
    }
}

fn dispatch(cmd: &Command, stdin: &mut dyn Read) -> Result<Value> {
    let common = cmd.common();
    match cmd {
        Command::Curvature { plane, u, v, .. } => {
            let s = parse_instance(&read_text(common.input.as_deref(), stdin)?)?;
            let n = s.dim();
            let plane = match (plane, u, v) {
                (Some(p), _, _) => {
                    let idx: Vec<&str> = p.split(',').collect();
                    let parse = |t: &str| {
                        t.trim().parse::<usize>().map_err(|_| {
                            Error::InvalidParameter(format!("`{t}` is not a coordinate index"))
                        })
                    };
                    if idx.len() != 2 {
                        return Err(Error::InvalidParameter(
                            "--plane takes two indices, e.g. 0,1".into(),
                        ));
                    }
                    let (i, j) = (parse(idx[0])?, parse(idx[1])?);
                    if i >= n || j >= n {
                        return Err(Error::InvalidParameter(format!(
                            "plane index out of range for dimension {n}"
                        )));
                    }
                    Plane::coordinate(n, i, j)
                }
                (None, Some(u), Some(v)) => Plane::new(parse_vector(u, n)?, parse_vector(v, n)?),
                _ => {
                    return Err(Error::InvalidParameter(
                        "give --plane i,j or both --u and --v".into(),
                    ))
                }
            };
            Ok(json!({ "k": s.sectional_curvature(&plane)? }))
        }
        Command::Maximize {
            starts,
            from,
            eigenframe,
            oracle,
            ..
        } => {
            let s = parse_instance(&read_text(common.input.as_deref(), stdin)?)?;
            let cp = match from {
                Some(x) => phi::climb_from(&s, &parse_vector(x, s.dim())?)?,
                None => phi::find_local_max(&s, *starts, common.seed)?,
            };
            log(common, || format!("value {} ({})", cp.value, cp.kind.as_str()));
            let mut out = to_value(&cp);
            if *eigenframe {
                out["eigenframe"] = to_value(&phi::eigenframe_at(&s, &cp)?);
            }
            if let Some(res) = oracle {
                let (x, v) = phi::grid_oracle_max(&s, *res)?;
                out["oracle"] = json!({ "x": x.iter().collect::<Vec<_>>(), "value": v });
            }
            Ok(out)
        }
        Command::Decompose { .. } => {
            let s = parse_instance(&read_text(common.input.as_deref(), stdin)?)?;
            let d = adapted::decompose(&s, common.tol.unwrap_or(DEFAULT_DECOMPOSE_TOL), common.seed)?;
            Ok(to_value(&d))
        }
        Command::Verify { check, .. } => {
            let s = parse_instance(&read_text(common.input.as_deref(), stdin)?)?;
            verify(&s, *check, common)
        }
        Command::Generate {
            kind,
            dim,
            lambda,
            mu,
            a,
            values,
            spec,
            from_decomposition,
            ..
        } => {
            let s = if let Some(text) = from_decomposition {
                let d: AdaptedDecomposition = serde_json::from_str(&read_text(Some(text), stdin)?)?;
                adapted::rebuild(&d)?
            } else if let Some(text) = spec {
                let spec: FamilySpec = serde_json::from_str(&read_text(Some(text), stdin)?)?;
                spec.build()?
            } else {
                let kind = kind.expect("clap enforces --kind");
                let dim = dim.ok_or_else(|| Error::InvalidParameter("--dim is required".into()))?;
                let mut params = std::collections::BTreeMap::new();
                for (name, val) in [("lambda", lambda), ("mu", mu), ("A", a)] {
                    if let Some(v) = val {
                        params.insert(name.to_string(), ParamValue::Scalar(*v));
                    }
                }
                if let Some(v) = values {
                    params.insert("values".to_string(), ParamValue::List(parse_reals(v)?));
                }
                FamilySpec {
                    kind: kind.into(),
                    dim,
                    params,
                    seed: Some(common.seed),
                }
                .build()?
            };
            Ok(instance_json(&s))
        }
        Command::Track { steps, from, .. } => {
            let snaps = parse_snapshots(&read_text(common.input.as_deref(), stdin)?)?;
            let family = SnapshotFamily::new(snaps)?;
            let s0 = phi::Family::at(&family, 0.0)?;
            let start = match from {
                Some(x) => phi::climb_from(&s0, &parse_vector(x, s0.dim())?)?,
                None => phi::find_local_max(&s0, DEFAULT_RANDOM_STARTS, common.seed)?,
            };
            let path = phi::track_critical_frame(&family, *steps, &start)?;
            log(common, || format!("tracked {} nodes", path.ts.len()));
            Ok(to_value(&path))
        }
        Command::ManifoldCheck {
            field,
            dim,
            point,
            fd_step,
            tensors,
            ..
        } => {
            let f = match field {
                FieldArg::HessianExp => ChartField::hessian_exp()?,
                FieldArg::Sphere => ChartField::sphere(*dim)?,
                FieldArg::DiagExp => ChartField::diag_exp()?,
                FieldArg::Quartic => ChartField::hessian_quartic()?,
                FieldArg::Constant => {
                    let s = parse_instance(&read_text(common.input.as_deref(), stdin)?)?;
                    ChartField::constant(s.metric().clone(), s.cubic().clone())?
                }
                FieldArg::Polynomial => {
                    PolyField::parse(&read_text(common.input.as_deref(), stdin)?)?.build()?
                }
            }
            .with_step(*fd_step)?;
            let p = match point {
                Some(p) => parse_reals(p)?,
                None => f.domain.center(),
            };
            let report = manifold::check_identities(&f, &p)?;
            let codazzi = manifold::check_codazzi(&f, &p)?;
            let mut out = json!({
                "field": field.to_possible_value().map(|v| v.get_name().to_string()),
                "identities": to_value(&report),
                "codazzi": to_value(&codazzi),
                "all_passed": report.all_passed(),
            });
            if *tensors {
                out["tensors"] = to_value(&manifold::curvature_tensors(&f, &p)?);
            }
            Ok(out)
        }
    }
}

fn verify(s: &StatStructure, check: Check, common: &Common) -> Result<Value> {
    Ok(match check {
        Check::CurvatureLike => {
            let tol = common.tol.unwrap_or(DEFAULT_TOL);
            let r = s.curvature_like_residuals();
            json!({
                "check": "curvature-like",
                "antisymmetry": r.antisymmetry,
                "bianchi": r.bianchi,
                "skewness": r.skewness,
                "scale": r.scale,
                "tol": tol,
                "ok": r.within(tol),
            })
        }
        Check::Constant => {
            let fit = adapted::fit_constant_curvature(s, common.tol.unwrap_or(DEFAULT_DECOMPOSE_TOL));
            json!({
                "check": "constant",
                "A": fit.a,
                "residual": fit.residual,
                "limit": fit.limit,
                "constant": fit.is_constant(),
            })
        }
        Check::Canonical => {
            let mut v = to_value(&identities::characterize_canonical(
                s,
                common.tol.unwrap_or(DEFAULT_DECOMPOSE_TOL),
            ));
            v["check"] = json!("canonical");
            v
        }
        Check::Rigidity => {
            let r = identities::rigidity_probe(s, common.tol.unwrap_or(DEFAULT_DECOMPOSE_TOL), common.seed)?;
            let mut v = to_value(&r);
            v["check"] = json!("rigidity");
            v["gap_ratio"] = json!(r.gap_ratio());
            v
        }
        Check::Witness => {
            let w = identities::negativity_witness(s, common.seed)?;
            json!({ "check": "witness", "witness": w.map(|w| to_value(&w)) })
        }
    })
}
