#![allow(dead_code)]

use kcurv::linalg::random_rotation;
use kcurv::{Metric, StatStructure};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `s` conjugated by a seeded random rotation.
pub fn randomly_rotated(s: &StatStructure, seed: u64) -> StatStructure {
    let q = random_rotation(s.dim(), &mut rng(seed));
    s.rotated(&q).unwrap()
}

/// `C(x, x, x)` evaluated term by term from the full index range.
pub fn cube_naive(s: &StatStructure, x: &DVector<f64>) -> f64 {
    let n = s.dim();
    let mut v = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                v += s.cubic().get(i, j, k) * x[i] * x[j] * x[k];
            }
        }
    }
    v
}

fn sphere_point(metric: &Metric, th: f64, ph: f64, n: usize) -> DVector<f64> {
    let y = match n {
        2 => DVector::from_vec(vec![th.cos(), th.sin()]),
        _ => DVector::from_vec(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]),
    };
    metric.from_orthonormal(&y)
}

/// Brute-force maximum of `C(x,x,x)` over the g-unit sphere for `n` in {2, 3}:
/// a coarse angular grid, then repeated zoomed grids around every coarse
/// candidate within `1e-2` of the best.
pub fn zoom_oracle(s: &StatStructure) -> f64 {
    let n = s.dim();
    assert!(n == 2 || n == 3);
    let m = s.metric();
    let f = |th: f64, ph: f64| cube_naive(s, &sphere_point(m, th, ph, n));
    let pi = std::f64::consts::PI;
    let (nt, np) = if n == 2 { (720, 1) } else { (180, 360) };
    let (dt, dp) = if n == 2 {
        (2.0 * pi / nt as f64, 0.0)
    } else {
        (pi / (nt - 1) as f64, 2.0 * pi / np as f64)
    };
    let mut coarse = Vec::with_capacity(nt * np);
    for i in 0..nt {
        for j in 0..np {
            let (th, ph) = (i as f64 * dt, j as f64 * dp);
            coarse.push((f(th, ph), th, ph));
        }
    }
    let top = coarse.iter().fold(f64::NEG_INFINITY, |a, c| a.max(c.0));
    let mut best = top;
    for &(_, th0, ph0) in coarse.iter().filter(|c| c.0 >= top - 1e-2) {
        let (mut th, mut ph) = (th0, ph0);
        let (mut wt, mut wp) = (2.0 * dt, 2.0 * dp);
        let mut here = f(th, ph);
        for _ in 0..14 {
            let steps = 10i32;
            let (mut bt, mut bp) = (th, ph);
            for a in -steps..=steps {
                let pj_range = if n == 2 { 0..=0 } else { -steps..=steps };
                for b in pj_range {
                    let t = th + wt * a as f64 / steps as f64;
                    let p = ph + wp * b as f64 / steps as f64;
                    let v = f(t, p);
                    if v > here {
                        here = v;
                        bt = t;
                        bp = p;
                    }
                }
            }
            th = bt;
            ph = bp;
            wt *= 0.3;
            wp *= 0.3;
        }
        best = best.max(here);
    }
    best
}

/// Where a corpus step reads stdin from.
pub enum Stdin {
    None,
    Text(&'static str),
    /// Standard output of an earlier step.
    Prev(usize),
}

pub struct Step {
    pub args: &'static [&'static str],
    pub stdin: Stdin,
}

const POLY_FIELD: &str = r#"{"dim":2,"domain":{"lo":[-1,-1],"hi":[1,1]},
 "metric":[{"idx":[0,0],"terms":[{"coef":2,"pow":[0,0]},{"coef":0.3,"pow":[1,1]}]},
           {"idx":[1,1],"terms":[{"coef":1,"pow":[0,0]},{"coef":0.2,"pow":[2,0]}]}],
 "cubic":[{"idx":[0,0,0],"terms":[{"coef":0.5,"pow":[1,0]}]},
          {"idx":[0,1,1],"terms":[{"coef":-0.4,"pow":[1,1]}]}]}"#;

const SNAPSHOTS: &str = r#"[
 {"t":0,"dim":3,"cubic":[{"idx":[0,0,0],"val":2},{"idx":[0,1,1],"val":-1},{"idx":[0,2,2],"val":-1},{"idx":[1,1,1],"val":0.3}]},
 {"t":0.5,"dim":3,"cubic":[{"idx":[0,0,0],"val":2.2},{"idx":[0,1,1],"val":-1},{"idx":[0,2,2],"val":-1.2},{"idx":[1,2,2],"val":0.2}]},
 {"t":1,"dim":3,"cubic":[{"idx":[0,0,0],"val":2.5},{"idx":[0,1,1],"val":-1.1},{"idx":[0,2,2],"val":-1},{"idx":[0,1,2],"val":0.1}]}]"#;

/// The CLI corpus: every subcommand, success and failure paths.
pub fn corpus() -> Vec<Step> {
    use Stdin::*;
    vec![
        /* 0 */ Step { args: &["generate", "--kind", "lambda_quarter", "--dim", "3", "--lambda", "2"], stdin: None },
        /* 1 */ Step { args: &["curvature", "--plane", "0,1"], stdin: Prev(0) },
        /* 2 */ Step { args: &["maximize"], stdin: Text(r#"{"dim":2,"cubic":[]}"#) },
        /* 3 */ Step { args: &["generate", "--kind", "tracefree_canonical", "--dim", "3", "--A", "-3"], stdin: None },
        /* 4 */ Step { args: &["decompose"], stdin: Prev(3) },
        /* 5 */ Step { args: &["generate", "--from-decomposition", "-"], stdin: Prev(4) },
        /* 6 */ Step { args: &["curvature", "--u", "1,0.5,0", "--v", "0,1,-2"], stdin: Prev(5) },
        /* 7 */ Step { args: &["generate", "--kind", "random", "--dim", "4", "--seed", "7"], stdin: None },
        /* 8 */ Step { args: &["maximize", "--seed", "3", "--eigenframe"], stdin: Prev(7) },
        /* 9 */ Step { args: &["verify", "--check", "curvature-like"], stdin: Prev(7) },
        /* 10 */ Step { args: &["verify", "--check", "constant"], stdin: Prev(3) },
        /* 11 */ Step { args: &["verify", "--check", "canonical"], stdin: Prev(0) },
        /* 12 */ Step { args: &["verify", "--check", "rigidity", "--seed", "5"], stdin: Prev(3) },
        /* 13 */ Step { args: &["generate", "--kind", "random_tracefree", "--dim", "4", "--seed", "3"], stdin: None },
        /* 14 */ Step { args: &["verify", "--check", "witness", "--seed", "1"], stdin: Prev(13) },
        /* 15 */ Step { args: &["generate", "--kind", "h_umbilical", "--dim", "3", "--lambda", "3", "--mu", "1"], stdin: None },
        /* 16 */ Step { args: &["verify", "--check", "canonical", "--pretty"], stdin: Prev(15) },
        /* 17 */ Step { args: &["generate", "--spec", r#"{"kind":"diagonal","dim":3,"params":{"values":[1,2,-1]}}"#], stdin: None },
        /* 18 */ Step { args: &["decompose", "--seed", "9"], stdin: Prev(17) },
        /* 19 */ Step { args: &["track", "--steps", "20"], stdin: Text(SNAPSHOTS) },
        /* 20 */ Step { args: &["manifold-check", "--field", "hessian-exp", "--point", "0.3,-0.2"], stdin: None },
        /* 21 */ Step { args: &["manifold-check", "--field", "sphere", "--dim", "3", "--tensors"], stdin: None },
        /* 22 */ Step { args: &["manifold-check", "--field", "polynomial"], stdin: Text(POLY_FIELD) },
        /* 23 */ Step { args: &["manifold-check", "--field", "constant"], stdin: Prev(0) },
        /* 24 */ Step { args: &["maximize", "--oracle", "400"], stdin: Prev(15) },
        /* 25 */ Step { args: &["decompose"], stdin: Prev(7) },
        /* 26 */ Step { args: &["maximize"], stdin: Text("{not json") },
        /* 27 */ Step { args: &["maximize", "--frobnicate"], stdin: None },
        /* 28 */ Step { args: &["curvature", "--plane", "0,0"], stdin: Prev(0) },
        /* 29 */ Step { args: &["manifold-check", "--field", "sphere", "--point", "0.9999,0"], stdin: None },
    ]
}

pub struct Ran {
    pub code: i32,
    pub stdout: Vec<u8>,
}

/// Runs the corpus against the built binary, feeding outputs forward.
pub fn run_corpus() -> Vec<Ran> {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut out: Vec<Ran> = Vec::new();
    for step in corpus() {
        let input: Option<Vec<u8>> = match step.stdin {
            Stdin::None => Option::None,
            Stdin::Text(t) => Some(t.as_bytes().to_vec()),
            Stdin::Prev(i) => Some(out[i].stdout.clone()),
        };
        let mut child = Command::new(env!("CARGO_BIN_EXE_kcurv"))
            .args(step.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("binary runs");
        {
            let mut sin = child.stdin.take().unwrap();
            if let Some(bytes) = input {
                sin.write_all(&bytes).unwrap();
            }
        }
        let o = child.wait_with_output().unwrap();
        out.push(Ran {
            code: o.status.code().unwrap_or(-1),
            stdout: o.stdout,
        });
    }
    out
}
