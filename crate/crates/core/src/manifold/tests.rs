use super::*;
use crate::families::{make_lambda_quarter, make_random, random_metric};

fn poly(text: &str) -> ChartField {
    PolyField::parse(text).unwrap().build().unwrap()
}

/// Flat metric with `C_111 = y`: `hat-nabla K` is not symmetric.
fn skewed_field() -> ChartField {
    poly(
        r#"{"dim":2,"domain":{"lo":[-1,-1],"hi":[1,1]},
            "cubic":[{"idx":[0,0,0],"terms":[{"coef":1,"pow":[0,1]}]}]}"#,
    )
}

/// Polynomial metric with a polynomial cubic form, nothing special.
fn generic_field() -> ChartField {
    poly(
        r#"{"dim":2,"domain":{"lo":[-1,-1],"hi":[1,1]},
            "metric":[{"idx":[0,0],"terms":[{"coef":2,"pow":[0,0]},{"coef":0.3,"pow":[1,1]},{"coef":0.2,"pow":[0,2]}]},
                      {"idx":[0,1],"terms":[{"coef":0.1,"pow":[1,0]}]},
                      {"idx":[1,1],"terms":[{"coef":1.5,"pow":[0,0]},{"coef":0.25,"pow":[2,0]}]}],
            "cubic":[{"idx":[0,0,0],"terms":[{"coef":0.5,"pow":[1,0]},{"coef":0.2,"pow":[0,2]}]},
                     {"idx":[0,1,1],"terms":[{"coef":-0.4,"pow":[1,1]}]},
                     {"idx":[1,1,1],"terms":[{"coef":0.3,"pow":[0,0]},{"coef":0.1,"pow":[2,1]}]}]}"#,
    )
}

/// Three-dimensional polynomial field; the cyclic Bianchi sum is trivial in dimension 2.
fn generic_field3() -> ChartField {
    poly(
        r#"{"dim":3,"domain":{"lo":[-1,-1,-1],"hi":[1,1,1]},
            "metric":[{"idx":[0,0],"terms":[{"coef":2,"pow":[0,0,0]},{"coef":0.3,"pow":[1,0,1]}]},
                      {"idx":[0,2],"terms":[{"coef":0.2,"pow":[0,1,0]}]},
                      {"idx":[1,1],"terms":[{"coef":1.5,"pow":[0,0,0]},{"coef":0.2,"pow":[2,0,0]}]},
                      {"idx":[2,2],"terms":[{"coef":1,"pow":[0,0,0]},{"coef":0.1,"pow":[0,1,1]}]}],
            "cubic":[{"idx":[0,0,0],"terms":[{"coef":0.5,"pow":[0,0,1]}]},
                     {"idx":[0,1,2],"terms":[{"coef":-0.4,"pow":[1,1,0]},{"coef":0.3,"pow":[0,0,0]}]},
                     {"idx":[1,1,2],"terms":[{"coef":0.2,"pow":[2,0,1]}]},
                     {"idx":[2,2,2],"terms":[{"coef":0.3,"pow":[0,1,0]}]}]}"#,
    )
}

#[test]
fn constant_metric_has_zero_symbols() {
    let s = make_random(3, 4, false).unwrap();
    let f = ChartField::constant(random_metric(3, 2).unwrap(), s.cubic().clone()).unwrap();
    let p = [0.1, -0.2, 0.3];
    let hat = christoffel_hat(&f, &p).unwrap();
    assert!(hat.max_abs_diff(&Symbols::zeros(3)) < 1e-12);
    let (nabla, bar) = statistical_connections(&f, &p).unwrap();
    let k = k_symbols(&f, &p).unwrap();
    assert!(nabla.max_abs_diff(&k) < 1e-12);
    assert!(bar.max_abs_diff(&k.combine(&k, -2.0)) < 1e-12);
}

#[test]
fn diag_exp_symbols() {
    let f = ChartField::diag_exp().unwrap();
    let hat = christoffel_hat(&f, &[0.3, 0.1]).unwrap();
    for l in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let want = if (l, i, j) == (0, 0, 0) { 1.0 } else { 0.0 };
                assert!((hat.get(l, i, j) - want).abs() < 1e-6, "{l}{i}{j}");
                assert_eq!(hat.get(l, i, j), hat.get(l, j, i));
            }
        }
    }
}

#[test]
fn quartic_hessian_symbol() {
    let f = ChartField::hessian_quartic().unwrap();
    for x in [0.8, 1.2, 1.7] {
        let hat = christoffel_hat(&f, &[x]).unwrap();
        // phi''' / (2 phi'') = 2x / (2 x^2)
        assert!((hat.get(0, 0, 0) - 1.0 / x).abs() < 1e-6);
        let (nabla, _) = statistical_connections(&f, &[x]).unwrap();
        assert!(nabla.get(0, 0, 0).abs() < 1e-6);
    }
}

#[test]
fn polynomial_potential_matches_closed_form() {
    let f = poly(r#"{"dim":1,"domain":{"lo":[0.5],"hi":[2]},"potential":[{"coef":0.0833333333333333333,"pow":[4]}]}"#);
    let g = ChartField::hessian_quartic().unwrap();
    for x in [0.7, 1.0, 1.9] {
        assert!((f.gram(&[x])[(0, 0)] - g.gram(&[x])[(0, 0)]).abs() < 1e-14);
        assert!((f.cubic(&[x]).get(0, 0, 0) - g.cubic(&[x]).get(0, 0, 0)).abs() < 1e-14);
    }
}

#[test]
fn polynomial_validation() {
    let bad = [
        r#"{"dim":1,"domain":{"lo":[0],"hi":[1]},"potential":[{"coef":1,"pow":[7]}]}"#,
        r#"{"dim":2,"domain":{"lo":[0,0],"hi":[1,1]},"cubic":[{"idx":[1,0,0],"terms":[]}]}"#,
        r#"{"dim":2,"domain":{"lo":[0,0],"hi":[1,1]},"metric":[{"idx":[1,0],"terms":[]}]}"#,
        r#"{"dim":2,"domain":{"lo":[0,0],"hi":[1,1]},"metric":[{"idx":[0,1],"terms":[]}]}"#,
        r#"{"dim":2,"domain":{"lo":[1,0],"hi":[1,1]}}"#,
        r#"{"dim":2,"domain":{"lo":[0,0],"hi":[1,1]},"extra":0}"#,
    ];
    for text in bad {
        assert!(PolyField::parse(text).and_then(|p| p.build()).is_err(), "{text}");
    }
}

#[test]
fn boundary_is_enforced() {
    let f = ChartField::sphere(2).unwrap();
    assert!(matches!(
        christoffel_hat(&f, &[0.999, 0.0]),
        Err(Error::OutsideDomain { .. })
    ));
    assert!(christoffel_hat(&f, &[0.997, 0.0]).is_ok());
    assert!(curvature_tensors(&f, &[0.9985, 0.0]).is_err());
    assert!(check_identities(&f, &[0.9965, 0.0]).is_err());
    assert!(christoffel_hat(&f, &[0.0]).is_err());
}

#[test]
fn codazzi_holds() {
    for f in [ChartField::hessian_exp().unwrap(), generic_field(), skewed_field()] {
        let r = check_codazzi(&f, &[0.2, -0.3]).unwrap();
        let tol = 50.0 * f.fd_step * f.fd_step;
        assert!(r.nabla_g <= tol && r.symmetry <= tol, "{r:?}");
    }
    let r = check_codazzi(&ChartField::hessian_exp().unwrap(), &[0.4, 0.1]).unwrap();
    assert!(r.nabla_g <= 1e-6);
}

#[test]
fn sphere_curvature_is_one() {
    let f = ChartField::sphere(2).unwrap();
    for p in [[0.0, 0.0], [0.3, -0.4], [-0.6, 0.5]] {
        let s = curvature_tensors(&f, &p).unwrap();
        let g = f.gram(&p);
        let num: f64 = (0..2).map(|l| s.r_hat.get(0, 1, 1, l) * g[(l, 0)]).sum();
        let k = num / (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(0, 1)]);
        assert!((k - 1.0).abs() < 1e-5, "{k}");
        assert!(s.r.lin(1.0, &s.r_hat, -1.0).max_abs() < 1e-5);
        let rep = check_identities(&f, &p).unwrap();
        assert!(rep.residuals["sum_identity"] <= 1e-5);
        assert!(rep.all_passed(), "{rep:?}");
    }
}

#[test]
fn flat_constant_fields_are_flat() {
    let s = make_lambda_quarter(3, 2.0).unwrap();
    let f = ChartField::constant(Metric::identity(3), s.cubic().clone()).unwrap();
    let sample = curvature_tensors(&f, &[0.0; 3]).unwrap();
    // K is parallel for hat-nabla, so R = R_bar = [K,K].
    assert!(sample.r_hat.max_abs() < 1e-9);
    assert!(sample.r.lin(1.0, &sample.bracket_kk, -1.0).max_abs() < 1e-9);
    let rep = check_identities(&f, &[0.1, 0.2, -0.1]).unwrap();
    for (k, v) in &rep.residuals {
        assert!(*v < 1e-8, "{k} = {v}");
    }
    assert!(rep.lemma21.r_equals_r_bar && rep.lemma21.agree);
}

#[test]
fn hessian_example_identities() {
    let f = ChartField::hessian_exp().unwrap();
    for p in [[0.0, 0.0], [0.5, -0.3], [-0.7, 0.6]] {
        let s = curvature_tensors(&f, &p).unwrap();
        assert!(s.r.max_abs() < 1e-5);
        assert!(s.r_hat.antisymmetry_residual() < 1e-8);
        let rep = check_identities(&f, &p).unwrap();
        for key in ["duality", "sum_identity", "hessian_relation"] {
            assert!(rep.residuals[key] <= 1e-5, "{key} {rep:?}");
        }
        assert!(rep.all_passed(), "{rep:?}");
        assert!(rep.lemma21.nabla_hat_k_symmetric);
    }
}

#[test]
fn residuals_converge_at_second_order() {
    for (f, p) in [
        (ChartField::hessian_exp().unwrap(), vec![0.35, -0.25]),
        (generic_field(), vec![0.35, -0.25]),
        (generic_field3(), vec![0.35, -0.25, 0.15]),
    ] {
        let coarse = check_identities(&f.clone().with_step(1e-3).unwrap(), &p).unwrap();
        let fine = check_identities(&f.with_step(5e-4).unwrap(), &p).unwrap();
        for key in ["duality", "sum_identity", "hessian_relation", "bianchi"] {
            if let (Some(a), Some(b)) = (coarse.residuals.get(key), fine.residuals.get(key)) {
                if *a > 1e-12 {
                    assert!(a / b >= 3.0, "{key}: {a:e} -> {b:e}");
                }
            }
        }
    }
}

#[test]
fn bianchi_identity_on_generic_field() {
    let f = generic_field3();
    for p in [[0.1, 0.2, 0.0], [-0.4, 0.3, 0.5]] {
        let rep = check_identities(&f, &p).unwrap();
        assert!(rep.residuals["bianchi"] > 0.0);
        assert!(rep.passed["bianchi"], "{rep:?}");
        assert!(rep.passed["duality"] && rep.passed["sum_identity"]);
        assert!(!rep.passed.contains_key("hessian_relation"));
    }
}

#[test]
fn lemma21_battery_agrees() {
    let q = make_random(2, 9, false).unwrap();
    let battery = [
        (ChartField::hessian_exp().unwrap(), true),
        (ChartField::sphere(2).unwrap(), true),
        (ChartField::constant(random_metric(2, 5).unwrap(), q.cubic().clone()).unwrap(), true),
        (ChartField::hessian_quartic().unwrap(), true),
        (skewed_field(), false),
        (generic_field(), false),
    ];
    for (f, expect) in battery {
        let p = f.domain.center();
        let rep = check_identities(&f, &p).unwrap();
        assert!(rep.lemma21.agree, "{f:?} {:?}", rep.lemma21);
        assert_eq!(rep.lemma21.nabla_hat_k_symmetric, expect, "{f:?}");
    }
}
