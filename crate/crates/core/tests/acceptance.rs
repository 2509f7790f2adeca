//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::Instant;

use common::{randomly_rotated, rng};
use kcurv::adapted::{decompose, rebuild, tracefree_canonical_params, DEFAULT_DECOMPOSE_TOL};
use kcurv::families::{
    h_umbilical_plane, make_h_umbilical, make_lambda_quarter, make_random, make_tracefree_canonical,
    random_plane,
};
use kcurv::identities::{characterize_canonical, negativity_witness, rigidity_probe, Verdict};
use kcurv::manifold::{check_identities, ChartField};
use kcurv::phi::{classify, climb_from, find_local_max, grid_oracle_max, track_critical_frame, Kind, DEFAULT_RANDOM_STARTS};
use kcurv::{Plane, StatStructure, SymCubic};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn e(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn ac1() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for n in 2..=6 {
        for lambda in [-2.0, 1.0, 2.0] {
            let s = make_lambda_quarter(n, lambda).map_err(|e| e.to_string())?;
            for _ in 0..1000 {
                let k = s.sectional_curvature(&random_plane(n, &mut r)).map_err(|e| e.to_string())?;
                worst = worst.max((k - lambda * lambda / 4.0).abs());
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    check(
        worst <= 1e-10 && secs < 5.0,
        format!("max deviation {worst:.2e}, {secs:.2} s"),
        format!("max deviation {worst:.2e} (limit 1e-10), {secs:.2} s (limit 5 s)"),
    )
}

fn ac2() -> Outcome {
    let mut r = rng(2);
    let mut msgs = Vec::new();
    let mut ok = true;
    for (lambda, mu) in [(3.0, 1.0), (2.0, 1.0), (1.0, 1.0), (0.0, 1.0)] {
        let s = make_h_umbilical(3, lambda, mu).map_err(|e| e.to_string())?;
        // k = mu^2 + mu (lambda - 2 mu) r with r = x1^2 + y1^2 in [0, 1]
        let (a, b) = (mu * mu, mu * (lambda - mu));
        let (lo, hi) = (a.min(b), a.max(b));
        let mut excess = 0.0f64;
        for _ in 0..10_000 {
            let k = s.sectional_curvature(&random_plane(3, &mut r)).map_err(|e| e.to_string())?;
            excess = excess.max(lo - k).max(k - hi);
        }
        let at = |x1, y1| -> Result<f64, String> {
            let pl = h_umbilical_plane(3, x1, y1).map_err(|e| e.to_string())?;
            s.sectional_curvature(&pl).map_err(|e| e.to_string())
        };
        let (k0, k1) = (at(0.0, 0.0)?, at(1.0, 0.0)?);
        let hit = (k0 - a).abs().max((k1 - b).abs());
        ok &= excess <= 1e-9 && hit <= 1e-6;
        msgs.push(format!("({lambda},{mu}) [{lo},{hi}] excess {excess:.1e} endpoints {hit:.1e}"));
    }
    check(ok, msgs.join("; "), msgs.join("; "))
}

fn ac3() -> Outcome {
    let s = StatStructure::euclidean(
        SymCubic::from_entries(2, &[([0, 0, 0], -3.0), ([0, 1, 1], -2.0)]).map_err(|e| e.to_string())?,
    );
    let kx = s.k(&e(2, 0), &e(2, 0)).map_err(|e| e.to_string())?;
    let k = s.sectional_curvature(&Plane::coordinate(2, 0, 1)).map_err(|e| e.to_string())?;
    let cp = climb_from(&s, &DVector::from_vec(vec![1.0, 0.05])).map_err(|e| e.to_string())?;
    check(
        (&kx - e(2, 0) * -3.0).amax() == 0.0 && (k - 2.0).abs() <= 1e-12 && (cp.value + 3.0).abs() <= 1e-12,
        format!("k = {k}, critical value {} ({})", cp.value, cp.kind.as_str()),
        format!("K(e1,e1) = {kx:?}, k = {k}, critical value {}", cp.value),
    )
}

fn ac4() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(4);
    let (mut worst, mut trace) = (0.0f64, 0.0f64);
    for seed in 0..30u64 {
        let n = r.random_range(2..=5usize);
        let a = r.random_range(-5.0..-0.1);
        let base = make_tracefree_canonical(n, a).map_err(|e| e.to_string())?;
        let s = randomly_rotated(&base, seed);
        let d = decompose(&s, DEFAULT_DECOMPOSE_TOL, seed).map_err(|e| format!("n={n} A={a}: {e}"))?;
        let want = tracefree_canonical_params(n, a).map_err(|e| e.to_string())?;
        let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        worst = worst
            .max(diff(&d.lambdas, &want.lambdas))
            .max(diff(&d.mus, &want.mus))
            .max(diff(&d.a_seq, &want.a_seq));
        let back = rebuild(&d).map_err(|e| e.to_string())?;
        trace = trace
            .max(s.trace_vector().norm())
            .max(back.trace_vector().norm());
    }
    let secs = t0.elapsed().as_secs_f64();
    check(
        worst <= 1e-7 && trace <= 1e-9 && secs < 30.0,
        format!("parameter error {worst:.2e}, trace residual {trace:.2e}, {secs:.2} s"),
        format!("parameter error {worst:.2e} (1e-7), trace residual {trace:.2e} (1e-9), {secs:.2} s (30 s)"),
    )
}

fn ac5() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let n = 2 + (seed as usize % 2);
        let s = make_random(n, seed, false).map_err(|e| e.to_string())?;
        let cp = find_local_max(&s, DEFAULT_RANDOM_STARTS, seed).map_err(|e| e.to_string())?;
        let (_, v) = grid_oracle_max(&s, 2000).map_err(|e| e.to_string())?;
        worst = worst.max((cp.value - v).abs());
    }
    check(
        worst <= 1e-4,
        format!("max |optimizer - oracle| {worst:.2e}"),
        format!("max |optimizer - oracle| {worst:.2e} (limit 1e-4)"),
    )
}

fn ac6() -> Outcome {
    let mut found = 0;
    let mut kmax = f64::NEG_INFINITY;
    let mut seed = 0u64;
    let mut tested = 0;
    while tested < 50 {
        let n = 2 + (seed as usize % 4);
        let s = make_random(n, seed, true).map_err(|e| e.to_string())?;
        seed += 1;
        if s.cubic().norm() <= 0.1 {
            continue;
        }
        tested += 1;
        if let Some(w) = negativity_witness(&s, seed).map_err(|e| e.to_string())? {
            if w.k < 0.0 {
                found += 1;
                kmax = kmax.max(w.k);
            }
        }
    }
    check(
        found == 50,
        format!("50/50 witnesses, largest k {kmax:.3e}"),
        format!("{found}/50 witnesses with k < 0"),
    )
}

fn ac7() -> Outcome {
    let tol = DEFAULT_DECOMPOSE_TOL;
    let mut r = rng(7);
    let (mut canon, mut lam_err, mut h_ok, mut rand_ok) = (0, 0.0f64, 0, 0);
    let total = 40;
    for seed in 0..total as u64 {
        let n = 2 + (seed as usize % 4);
        let lambda = r.random_range(0.3..3.0);
        let s = randomly_rotated(&make_lambda_quarter(n, lambda).map_err(|e| e.to_string())?, seed);
        if let Verdict::Canonical { lambda: l, .. } = characterize_canonical(&s, tol) {
            canon += 1;
            lam_err = lam_err.max((l - lambda).abs());
        }
        let mu = r.random_range(0.3..2.0);
        let lambda_h = if (lambda - 2.0 * mu).abs() < 0.1 { lambda + 0.5 } else { lambda };
        let h = randomly_rotated(&make_h_umbilical(n, lambda_h, mu).map_err(|e| e.to_string())?, seed);
        if matches!(characterize_canonical(&h, tol), Verdict::NotCanonical { .. }) {
            h_ok += 1;
        }
        let q = make_random(n, seed, false).map_err(|e| e.to_string())?;
        if matches!(characterize_canonical(&q, tol), Verdict::NotCanonical { .. }) {
            rand_ok += 1;
        }
    }
    let msg = format!(
        "lambda family {canon}/{total} (lambda error {lam_err:.1e}), h-umbilical {h_ok}/{total}, random {rand_ok}/{total}"
    );
    check(canon == total && lam_err <= 1e-8 && h_ok == total && rand_ok == total, msg.clone(), msg)
}

fn ac8() -> Outcome {
    let mut r = rng(8);
    let (mut worst_gap, mut bad) = (f64::INFINITY, Vec::new());
    for seed in 0..20u64 {
        let n = 2 + (seed as usize % 4);
        let a = r.random_range(-5.0..-0.1);
        let s = randomly_rotated(&make_tracefree_canonical(n, a).map_err(|e| e.to_string())?, seed);
        let rep = rigidity_probe(&s, DEFAULT_DECOMPOSE_TOL, seed).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.min(rep.gap_ratio());
        if rep.null_dimension != 0 {
            bad.push(format!("n={n} A={a:.3} null dim {}", rep.null_dimension));
        }
    }
    check(
        bad.is_empty() && worst_gap >= 1e6,
        format!("null dimension 0 on 20 instances, smallest gap ratio {worst_gap:.2e}"),
        format!("{bad:?}, smallest gap ratio {worst_gap:.2e} (limit 1e6)"),
    )
}

fn ac9() -> Outcome {
    let coarse_field = ChartField::hessian_exp().map_err(|e| e.to_string())?;
    let fine_field = coarse_field.clone().with_step(5e-4).map_err(|e| e.to_string())?;
    let mut r = rng(9);
    let (mut worst, mut worst_ratio) = (0.0f64, f64::INFINITY);
    let mut bad = Vec::new();
    for _ in 0..20 {
        let p = vec![r.random_range(-0.9..0.9), r.random_range(-0.9..0.9)];
        let c = check_identities(&coarse_field, &p).map_err(|e| e.to_string())?;
        let f = check_identities(&fine_field, &p).map_err(|e| e.to_string())?;
        for key in ["duality", "sum_identity", "hessian_relation"] {
            let (Some(a), Some(b)) = (c.residuals.get(key), f.residuals.get(key)) else {
                bad.push(format!("{key} missing at {p:?}"));
                continue;
            };
            worst = worst.max(*a);
            // residuals already at rounding level carry no convergence information
            if *a > 1e-12 {
                let ratio = a / b;
                worst_ratio = worst_ratio.min(ratio);
                if ratio < 3.0 {
                    bad.push(format!("{key} at {p:?}: {a:.2e} -> {b:.2e}"));
                }
            }
            if *a > 1e-5 {
                bad.push(format!("{key} at {p:?}: {a:.2e}"));
            }
        }
    }
    check(
        bad.is_empty(),
        format!("largest residual {worst:.2e} at h=1e-3, smallest halving ratio {worst_ratio:.2}"),
        bad.join("; "),
    )
}

fn ac10() -> Outcome {
    let rotation = |th: f64| DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
    let base = make_h_umbilical(2, 3.0, 1.0).map_err(|e| e.to_string())?;
    let fam = |t: f64| base.rotated(&rotation(t * std::f64::consts::FRAC_PI_4));
    let cp = classify(&base, &e(2, 0)).map_err(|e| e.to_string())?;
    if cp.kind != Kind::StrictMax {
        return Err(format!("start is {}", cp.kind.as_str()));
    }
    let path = track_critical_frame(&fam, 50, &cp).map_err(|e| e.to_string())?;
    let (mut dev, mut res) = (0.0f64, 0.0f64);
    for ((t, p), r) in path.ts.iter().zip(&path.points).zip(&path.residuals) {
        let want = rotation(t * std::f64::consts::FRAC_PI_4) * e(2, 0);
        dev = dev.max((&p.x - want).amax());
        res = res.max(*r);
    }
    check(
        path.points.len() == 51 && dev <= 1e-8 && res <= 1e-10,
        format!("{} nodes, frame deviation {dev:.2e}, |F| {res:.2e}", path.points.len()),
        format!("{} nodes, frame deviation {dev:.2e} (1e-8), |F| {res:.2e} (1e-10)", path.points.len()),
    )
}

fn ac11() -> Outcome {
    let a = common::run_corpus();
    let b = common::run_corpus();
    let same = a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| x.code == y.code && x.stdout == y.stdout);
    let bytes: usize = a.iter().map(|r| r.stdout.len()).sum();
    check(
        same,
        format!("{} invocations, {bytes} bytes identical", a.len()),
        "corpus outputs differ between runs".into(),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("lambda family constancy", ac1),
        ("h-umbilical bounds", ac2),
        ("negative minimum example", ac3),
        ("decomposition round trip", ac4),
        ("optimizer vs oracle", ac5),
        ("trace-free negativity", ac6),
        ("characterization classifier", ac7),
        ("rigidity null space", ac8),
        ("manifold identities", ac9),
        ("frame tracking", ac10),
        ("determinism", ac11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("AC{:<2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
