use super::*;
use approx::assert_abs_diff_eq;

const CM_GRID: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

fn full_catalog() -> Vec<CMFunction> {
    vec![
        exp_neg(),
        exp_neg_power(0.5).unwrap(),
        exp_neg_power(1.0).unwrap(),
        gen_cauchy(1.0, 2.0, 1.0).unwrap(),
        gen_cauchy(2.0, 1.5, 0.7).unwrap(),
        inv_power(1.0).unwrap(),
        constant(5.0).unwrap(),
    ]
}

#[test]
fn exp_neg_at_zero() {
    assert_abs_diff_eq!(exp_neg().eval(0.0), 1.0, epsilon = 0.0);
}

#[test]
fn gen_cauchy_closed_form_value() {
    let f = gen_cauchy(1.0, 2.0, 1.0).unwrap();
    assert_abs_diff_eq!(f.eval(1.0), 0.25, epsilon = 1e-15);
}

#[test]
fn exp_neg_power_value() {
    let f = exp_neg_power(0.5).unwrap();
    assert_abs_diff_eq!(f.eval(4.0), (-2.0f64).exp(), epsilon = 1e-15);
}

#[test]
fn catalog_rejects_bad_params() {
    assert!(matches!(exp_neg_power(0.0), Err(CmError::Param { .. })));
    assert!(matches!(exp_neg_power(1.5), Err(CmError::Param { .. })));
    assert!(matches!(
        gen_cauchy(-1.0, 2.0, 1.0),
        Err(CmError::Param { .. })
    ));
    assert!(matches!(
        gen_cauchy(1.0, 0.0, 1.0),
        Err(CmError::Param { .. })
    ));
    assert!(matches!(constant(0.0), Err(CmError::Param { .. })));
    assert!(matches!(inv_power(-2.0), Err(CmError::Param { .. })));
}

#[test]
fn catalog_get_resolves_names() {
    let mut params = BTreeMap::new();
    params.insert("nu".to_string(), 2.0);
    let f = catalog_get("inv_power", &params).unwrap();
    assert_abs_diff_eq!(f.eval(1.0), 0.25, epsilon = 1e-15);

    assert!(matches!(
        catalog_get("no_such_phi", &BTreeMap::new()),
        Err(CmError::CatalogMiss { .. })
    ));
    let mut extra = BTreeMap::new();
    extra.insert("nu".to_string(), 2.0);
    extra.insert("bogus".to_string(), 1.0);
    assert!(matches!(
        catalog_get("inv_power", &extra),
        Err(CmError::Param { .. })
    ));
    assert!(matches!(
        catalog_get("gen_cauchy", &BTreeMap::new()),
        Err(CmError::Param { .. })
    ));
}

#[test]
fn gen_cauchy_small_nu_is_flagged() {
    let f = gen_cauchy(1.0, 0.8, 1.0).unwrap();
    assert!(f.warning().is_some());
    assert!(gen_cauchy(1.0, 2.0, 1.0).unwrap().warning().is_none());
}

#[test]
fn cm_check_passes_on_exponential() {
    let report = cm_check(&exp_neg(), 4, &[0.5, 1.0, 2.0, 5.0]);
    assert!(report.pass, "worst {}", report.worst_violation);
}

#[test]
fn cm_check_catches_injected_non_cm() {
    // sin(t) + 2 is positive and bounded but its second difference changes
    // sign; the checker must find an order/t witness.
    let report = cm_check_fn(|t: f64| t.sin() + 2.0, 4, &CM_GRID);
    assert!(!report.pass);
    let w = report.witness.expect("witness present");
    assert!(w.value < 0.0);
    assert!(w.order >= 1);
}

#[test]
fn cm_check_passes_on_inverse_linear() {
    let report = cm_check_fn(|t: f64| (1.0 + t).recip(), 4, &CM_GRID);
    assert!(report.pass, "worst {}", report.worst_violation);
}

#[test]
fn every_catalog_function_is_cm_on_the_standard_grid() {
    for f in full_catalog() {
        let report = cm_check(&f, 4, &CM_GRID);
        assert!(
            report.pass,
            "{} failed cm_check: worst {}",
            f.name(),
            report.worst_violation
        );
    }
}

#[test]
fn boundedness_at_zero() {
    for f in full_catalog() {
        assert!(f.eval(1e-12) <= f.bound_at_zero() * (1.0 + 1e-6), "{}", f.name());
    }
}

#[test]
fn bound_at_zero_limit_reached_for_unit_exponent_entries() {
    // For γ = 1 families the limit has converged by t = 1e-12 to 1e-8.
    for f in [
        exp_neg(),
        exp_neg_power(1.0).unwrap(),
        gen_cauchy(1.0, 2.0, 1.0).unwrap(),
        inv_power(1.5).unwrap(),
        constant(5.0).unwrap(),
    ] {
        let gap = (f.eval(1e-12) - f.bound_at_zero()).abs();
        assert!(gap <= 1e-8 * f.bound_at_zero(), "{}: gap {gap}", f.name());
    }
}

#[test]
fn reconstruct_single_atom() {
    let v = reconstruct_from_measure(&exp_neg(), 3.0).unwrap();
    assert_abs_diff_eq!(v, (-3.0f64).exp(), epsilon = 1e-15);
}

#[test]
fn reconstruct_gen_cauchy_gamma_mixture() {
    let f = gen_cauchy(1.0, 2.0, 1.0).unwrap();
    let v = reconstruct_from_measure(&f, 2.0).unwrap();
    assert!((v - 1.0 / 9.0).abs() < 1e-6, "{v} vs 1/9");
}

#[test]
fn raw_laguerre_rule_converges_on_the_tilted_integrand() {
    // Node-count study for the untransformed rule: integrating e^{-t s}
    // against the Gamma weight directly. 64 nodes reach 1e-6 at t = 2; the
    // error keeps dropping as nodes double.
    let f = gen_cauchy(1.0, 2.0, 1.0).unwrap();
    let Some(RepresentingMeasure::Density(d)) = f.measure() else {
        panic!("gen_cauchy gamma=1 must carry a density measure");
    };
    let exact = 1.0 / 9.0;
    let mut errors = Vec::new();
    for nodes in [16, 32, 64, 128] {
        let v = d.with_nodes(nodes).integrate(|s| (-2.0 * s).exp());
        errors.push((v - exact).abs() / exact);
    }
    assert!(errors[2] < 1e-6, "64-node error {}", errors[2]);
    assert!(errors[3] < errors[1], "errors not shrinking: {errors:?}");
}

#[test]
fn reconstruct_constant() {
    let f = constant(5.0).unwrap();
    for t in [0.0, 0.3, 2.0, 50.0] {
        assert_abs_diff_eq!(reconstruct_from_measure(&f, t).unwrap(), 5.0, epsilon = 1e-12);
    }
}

#[test]
fn reconstruct_without_measure_is_an_error() {
    let f = exp_neg_power(0.5).unwrap();
    assert!(matches!(
        reconstruct_from_measure(&f, 1.0),
        Err(CmError::NoMeasure)
    ));
}

#[test]
fn measures_reconstruct_on_log_spaced_grid() {
    for f in full_catalog() {
        let Some(measure) = f.measure() else { continue };
        assert!(measure.total_mass() > 0.0);
        for k in 0..20 {
            // 20 log-spaced points in [1e-2, 1e2]
            let t = 10f64.powf(-2.0 + 4.0 * k as f64 / 19.0);
            let direct = f.eval(t);
            let rebuilt = reconstruct_from_measure(&f, t).unwrap();
            assert!(
                (rebuilt - direct).abs() <= 1e-6 * direct.abs().max(1e-300),
                "{} at t={t}: {rebuilt} vs {direct}",
                f.name()
            );
        }
    }
}

#[test]
fn matern_half_is_proportional_to_exponential() {
    // M_{1/2}(r√u) against e^{-r√u} over a 5x5 grid: the ratio must be
    // constant before any constant is trusted. (The constant comes out 1.)
    let rs = [0.5, 1.0, 2.0, 4.0, 8.0];
    let us = [0.05, 0.2, 1.0, 3.0, 9.0];
    let mut ratios = Vec::new();
    for &r in &rs {
        for &u in &us {
            let m = matern_eval(0.5, r, u, 128).unwrap();
            ratios.push(m / (-r * u.sqrt()).exp());
        }
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min - 1.0 < 1e-6, "ratio drift {} .. {}", min, max);
    assert_abs_diff_eq!(ratios[0], 1.0, epsilon = 1e-6);
}

#[test]
fn matern_is_positive_and_decreasing_in_u() {
    for &nu in &[0.25, 0.7, 1.5, 3.0] {
        for &r in &[0.5, 2.0, 6.0] {
            let mut prev = f64::INFINITY;
            for &u in &[0.01, 0.1, 0.5, 1.0, 4.0, 16.0] {
                let v = matern_eval(nu, r, u, 128).unwrap();
                assert!(v > 0.0);
                assert!(v < prev, "not decreasing at nu={nu} r={r} u={u}");
                prev = v;
            }
        }
    }
}

#[test]
fn matern_approaches_finite_limit_as_u_vanishes() {
    // Monotone increase as u decreases, converging toward the zero-lag value.
    let nu = 1.2;
    let r = 2.0;
    let mut prev = 0.0;
    for &u in &[1.0, 0.1, 0.01, 1e-4, 1e-8, 1e-12] {
        let v = matern_eval(nu, r, u, 160).unwrap();
        assert!(v > prev, "u={u}");
        prev = v;
    }
    // The mixture integral normalizes the zero-lag value to 1.
    assert!((prev - 1.0).abs() < 1e-6, "limit {prev}");
}

#[test]
fn matern_node_doubling_is_converged() {
    let a = matern_eval(1.5, 2.0, 1.0, 64).unwrap();
    let b = matern_eval(1.5, 2.0, 1.0, 128).unwrap();
    assert!((a - b).abs() <= 1e-8 * b.abs(), "{a} vs {b}");
}

#[test]
fn matern_rejects_bad_arguments() {
    assert!(matches!(
        matern_eval(0.0, 1.0, 1.0, 64),
        Err(CmError::Param { .. })
    ));
    assert!(matches!(
        matern_eval(1.0, 1.0, 1.0, 8),
        Err(CmError::Param { .. })
    ));
}

#[test]
fn catalog_listing_covers_all_names() {
    let entries = catalog_entries();
    assert!(entries.len() >= 5);
    for entry in entries {
        // every listed schema must resolve with valid parameters
        let mut params = BTreeMap::new();
        for p in &entry.params {
            let v = match p.name {
                "gamma" => 0.8,
                "nu" => 1.5,
                "c" => 1.0,
                "value" => 2.0,
                other => panic!("unknown schema parameter {other}"),
            };
            params.insert(p.name.to_string(), v);
        }
        catalog_get(entry.name, &params).unwrap();
    }
}

#[test]
fn descriptor_round_trips_through_serde() {
    let f = gen_cauchy(2.0, 1.5, 1.0).unwrap();
    let json = serde_json::to_string(f.descriptor()).unwrap();
    let back: PhiDescriptor = serde_json::from_str(&json).unwrap();
    let g = from_descriptor(&back).unwrap();
    for t in [0.1, 1.0, 7.0] {
        assert_abs_diff_eq!(f.eval(t), g.eval(t), epsilon = 0.0);
    }
}
