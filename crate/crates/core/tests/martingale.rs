mod common;

use common::q;
use proptest::prelude::*;
use susle::error::Error;
use susle::grassmann::GrassmannElement;
use susle::loewner_sde::{DriverConfig, GroupScheme, Increments};
use susle::martingale::*;
use susle::scalar::{Rational, C64};
use susle::superalgebra::{UEAElement, VermaVector};

fn vec_of(alg: susle::superalgebra::Algebra, terms: &[(&str, Rational)]) -> VermaVector {
    VermaVector::from_rational_terms(alg, terms).unwrap().to_scalar_vector().unwrap()
}

#[test]
fn parameter_maps() {
    assert_eq!(virasoro_weights(&q(6, 1)).unwrap(), (q(0, 1), q(0, 1)));
    assert_eq!(virasoro_weights(&q(4, 1)).unwrap(), (q(1, 1), q(1, 4)));
    assert_eq!(ns1_weights(&q(3, 1)).unwrap(), (q(-1, 2), q(1, 4)));
    assert!(matches!(ns1_weights(&q(4, 1)), Err(Error::Degenerate(_))));
    assert!(matches!(build_model(ModelTag::Ns1, &ModelParams::kappa(q(4, 1))), Err(Error::Degenerate(_))));
    assert!(build_model(ModelTag::Virasoro, &ModelParams::kappa(q(4, 1))).is_ok());
    assert!(build_model(ModelTag::Virasoro, &ModelParams::default()).is_err());
    let p = ns2_printed(&q(2, 1), &q(3, 1)).unwrap();
    assert_eq!(p.c, q(-3, 1));
    assert_eq!(p.kappa, q(1, 3));
    assert_eq!(p.a, q(2, 3));
    assert_eq!(p.h, q(-1, 2) + q(3, 16) - q(35, 2));
}

#[test]
fn model_elements_are_even() {
    for tag in [ModelTag::Virasoro, ModelTag::Ns1] {
        let m = build_model(tag, &ModelParams::kappa(q(3, 1))).unwrap();
        assert!(m.drift.is_even());
        assert!(m.noise.iter().all(|n| n.element.is_even()));
        assert!(m.pairing.is_even());
    }
    let p = ModelParams { t: Some(q(2, 1)), alpha: Some(q(3, 1)), ..Default::default() };
    let m = build_model(ModelTag::Ns2, &p).unwrap();
    assert!(m.drift.is_even() && m.noise[0].element.is_even() && m.pairing.is_even());
    assert_eq!(m.a, Some(q(2, 3)));
}

#[test]
fn virasoro_integrated_drift_is_the_drift_vector() {
    for k in [q(2, 1), q(8, 3), q(3, 1), q(4, 1), q(6, 1)] {
        let m = build_model(ModelTag::Virasoro, &ModelParams::kappa(k.clone())).unwrap();
        let expect = vec_of(m.algebra(), &[("L-2", q(-2, 1)), ("L-1 L-1", k / q(2, 1))]);
        assert_eq!(integrated_drift(&m).unwrap(), expect);
    }
}

/// Hand expansion with `G₋₁/₂G₋₃/₂ = 2L₋₂ − G₋₃/₂G₋₁/₂` and `∫dζ₁dζ₂ ζ₂ζ₁ = 1`.
#[test]
fn ns1_integrated_drift_matches_hand_expansion() {
    let m = build_model(ModelTag::Ns1, &ModelParams::kappa(q(3, 1))).unwrap();
    let d = integrated_drift(&m).unwrap();
    let chi = vec_of(m.algebra(), &[("L-2", q(1, 1)), ("L-1 L-1", q(-3, 1)), ("G-3/2 G-1/2", q(3, 1))]);
    assert_eq!(d, vec_of(m.algebra(), &[("L-2", q(-1, 2)), ("L-1 L-1", q(3, 2)), ("G-3/2 G-1/2", q(-3, 2))]));
    let r = drift_is_null(&m).unwrap();
    assert!(r.pass);
    assert_eq!(r.reference.as_ref(), Some(&chi));
    assert_eq!(r.lambda, Some(q(-1, 2)));
}

#[test]
fn drift_is_null_examples() {
    for k in [q(2, 1), q(8, 3), q(3, 1), q(4, 1), q(6, 1)] {
        let r = drift_is_null(&build_model(ModelTag::Virasoro, &ModelParams::kappa(k.clone())).unwrap()).unwrap();
        assert!(r.pass, "virasoro kappa={k}");
    }
    for k in [q(2, 1), q(8, 3), q(3, 1), q(1, 2), q(7, 5)] {
        let r = drift_is_null(&build_model(ModelTag::Ns1, &ModelParams::kappa(k.clone())).unwrap()).unwrap();
        assert!(r.pass, "ns1 kappa={k}");
        assert!(r.reference_check.unwrap().pass);
    }
    let (c, h) = virasoro_weights(&q(3, 1)).unwrap();
    let bad = ModelParams { kappa: Some(q(3, 1)), c: Some(c), h: Some(h + q(1, 1)), ..Default::default() };
    let r = drift_is_null(&build_model(ModelTag::Virasoro, &bad).unwrap()).unwrap();
    assert!(!r.pass);
    assert!(r.lambda.is_none());
}

#[test]
fn ns2_solver_against_printed_map() {
    for (t, al) in [(q(2, 1), q(3, 1)), (q(1, 3), q(2, 1)), (q(3, 2), q(5, 1))] {
        let cmp = ns2_compare(&t, &al).unwrap();
        assert!(!cmp.solved_vectors.is_empty());
        for ((h, co), kp) in cmp.solved_vectors.iter().zip(&cmp.drift_params) {
            // L₋₁ + p G⁺G⁻ + q J₋₁ with p = 1/(α−1), q = (α+1)/t.
            assert_eq!(co[1], q(1, 1) / (al.clone() - q(1, 1)));
            assert_eq!(co[2], (al.clone() + q(1, 1)) / t.clone());
            let (kappa, a) = kp.clone().expect("drift parameters exist");
            assert_eq!(kappa, q(1, 1) / al.clone());
            assert_eq!(a, (al.clone() * al.clone() - q(1, 1)) / (t.clone() * al.clone()));
            assert_ne!(a, cmp.printed.a);
            let p = ModelParams {
                kappa: Some(kappa),
                a: Some(a),
                c: Some(cmp.printed.c.clone()),
                h: Some(h.clone()),
                alpha: Some(al.clone()),
                t: None,
            };
            assert!(drift_is_null(&build_model(ModelTag::Ns2, &p).unwrap()).unwrap().pass);
        }
        let printed = ModelParams { t: Some(t.clone()), alpha: Some(al.clone()), ..Default::default() };
        assert!(!drift_is_null(&build_model(ModelTag::Ns2, &printed).unwrap()).unwrap().pass);
        assert!(!cmp.printed_h_singular);
        assert!(cmp.to_json()["printed"]["a"].is_string());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn prop_drift_null_for_rational_kappa(n in 1i64..40, d in 1i64..12) {
        let k = Rational::new(n, d);
        prop_assert!(drift_is_null(&build_model(ModelTag::Virasoro, &ModelParams::kappa(k.clone())).unwrap()).unwrap().pass);
        if k != q(4, 1) {
            prop_assert!(drift_is_null(&build_model(ModelTag::Ns1, &ModelParams::kappa(k)).unwrap()).unwrap().pass);
        }
    }

    #[test]
    fn prop_integration_is_linear(a in common::rational(), b in common::rational()) {
        let m = build_model(ModelTag::Ns1, &ModelParams::kappa(q(3, 1))).unwrap();
        let y = m.noise[1].element.mul(&m.noise[1].element).unwrap();
        let lhs = integrate_element(&m, &m.drift.scale(&a).add(&y.scale(&b)).unwrap()).unwrap();
        let rhs = integrated_drift(&m).unwrap().scale(&a).add(&integrate_element(&m, &y).unwrap().scale(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

/// Elements mapping the highest weight into the singular submodule integrate to zero in the quotient.
#[test]
fn submodule_images_vanish_in_quotient() {
    let m = build_model(ModelTag::Virasoro, &ModelParams::kappa(q(2, 1))).unwrap();
    let (chi, _) = reference_singular(&m).unwrap().unwrap();
    let compiled = m.group_sde().compile(6, GroupScheme::default()).unwrap();
    let quot = Quotient::by_submodule(&m.module(), &compiled.basis, &chi).unwrap();
    assert_eq!(quot.tracked.len(), compiled.dim() - 2);
    let z = UEAElement::from_rational_terms(m.algebra(), 0, &[("L-1 L-2", q(1, 1)), ("L-1 L-1 L-1", q(-1, 2))]).unwrap();
    let v = integrate_element(&m, &z).unwrap();
    let coords: Vec<f64> = compiled.basis.coords(&v).iter().map(|g| g.body().to_f64()).collect();
    assert!(quot.project(&coords).iter().all(|x| x.abs() < 1e-12));
    let hw: Vec<f64> = (0..compiled.dim()).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    assert_eq!(quot.project(&hw)[0], 1.0);
}

#[test]
fn mc_zero_horizon_has_zero_deltas() {
    for tag in [ModelTag::Virasoro, ModelTag::Ns1] {
        let m = build_model(tag, &ModelParams::kappa(q(3, 1))).unwrap();
        let d = DriverConfig::new(1, 1e-3, 0, m.noise.len()).unwrap();
        let r = mc_martingale(&m, 4, &d, 100, &McOptions::default()).unwrap();
        assert!(r.verdict);
        assert!(r.coefficients.iter().all(|c| c.mean == 0.0 && c.se == 0.0));
    }
}

#[test]
fn mc_virasoro_kappa2_passes() {
    let m = build_model(ModelTag::Virasoro, &ModelParams::kappa(q(2, 1))).unwrap();
    let d = DriverConfig::with_horizon(2024, 1e-3, 0.3, 1).unwrap();
    let r = mc_martingale(&m, 6, &d, 10_000, &McOptions::default()).unwrap();
    assert!(r.verdict, "{}", r.to_json());
    assert_eq!(r.coefficients.len(), 5);
    let j = r.to_json();
    assert_eq!(j["verdict"], "pass");
    assert_eq!(j["level"], 3.0);
}

#[test]
fn mc_ns1_kappa3_passes() {
    let m = build_model(ModelTag::Ns1, &ModelParams::kappa(q(3, 1))).unwrap();
    let d = DriverConfig::with_horizon(77, 1e-3, 0.3, 2).unwrap();
    let r = mc_martingale(&m, 4, &d, 10_000, &McOptions::default()).unwrap();
    assert!(r.verdict, "{}", r.to_json());
}

/// Without the Itô correction the increments carry an extra `½Y²` drift that the test detects.
#[test]
fn mc_detects_literal_scheme_bias() {
    let m = build_model(ModelTag::Virasoro, &ModelParams::kappa(q(2, 1))).unwrap();
    let d = DriverConfig::with_horizon(5, 1e-3, 0.3, 1).unwrap();
    let opts = McOptions { scheme: GroupScheme::Literal, quotient: true };
    assert!(!mc_martingale(&m, 6, &d, 10_000, &opts).unwrap().verdict);
}

#[test]
fn mc_is_deterministic_and_validates() {
    let m = build_model(ModelTag::Virasoro, &ModelParams::kappa(q(2, 1))).unwrap();
    let d = DriverConfig::with_horizon(9, 1e-2, 0.1, 1).unwrap();
    let a = mc_martingale(&m, 6, &d, 200, &McOptions::default()).unwrap();
    let b = mc_martingale(&m, 6, &d, 200, &McOptions::default()).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let bad = DriverConfig::with_horizon(9, 1e-2, 0.1, 2).unwrap();
    assert!(mc_martingale(&m, 6, &bad, 200, &McOptions::default()).is_err());
    assert!(mc_martingale(&m, 6, &d, 99, &McOptions::default()).is_err());
}

#[test]
fn observable_at_time_zero_and_kappa6() {
    for z in [C64::new(0.0, 2.0), C64::new(1.0, 0.5), C64::new(-0.3, 1.7)] {
        let empty = Increments::from_data(1, vec![]).unwrap();
        let p = bb_observable(&q(2, 1), z, 1e-3, &empty, 1e-6, 1).unwrap();
        let h = virasoro_weights(&q(2, 1)).unwrap().1.to_f64();
        assert!((p.values[0] - C64::new(h, 0.0) / (z * z)).norm() < 1e-15);
    }
    let d = DriverConfig::with_horizon(3, 1e-3, 0.2, 1).unwrap();
    let p = bb_observable(&q(6, 1), C64::new(0.0, 2.0), d.dt, &d.increments(0), 1e-6, 10).unwrap();
    assert!(p.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn observable_jet_matches_exact_kappa0_derivatives() {
    // κ = 0: f = √(z² + 4t), f′ = z/f, f″ = 4t/f³, f‴ = −12tz/f⁵.
    let z = C64::new(0.3, 1.5);
    let dt = 1e-5;
    let mut jet = Jet::identity(z);
    let steps = 20_000;
    for _ in 0..steps {
        jet = jet.step(dt, 0.0);
    }
    let t = dt * steps as f64;
    let f = (z * z + C64::new(4.0 * t, 0.0)).sqrt();
    let four_t = C64::new(4.0 * t, 0.0);
    assert!((jet.f - f).norm() < 1e-5);
    assert!((jet.d1 - z / f).norm() < 1e-5);
    assert!((jet.d2 - four_t / (f * f * f)).norm() < 1e-4);
    assert!((jet.d3 + C64::new(3.0, 0.0) * four_t * z / (f * f * f * f * f)).norm() < 5e-4);
}

#[test]
fn observable_mean_is_constant_kappa2() {
    let d = DriverConfig::with_horizon(4, 1e-3, 0.2, 1).unwrap();
    let s = observable_mc(&q(2, 1), C64::new(0.0, 2.0), &d, 10_000).unwrap();
    assert!(s.pass, "{}", s.to_json());
    assert_eq!(s.swallowed, 0);
}

#[test]
fn berezin_pairing_orders() {
    let n1 = build_model(ModelTag::Ns1, &ModelParams::kappa(q(3, 1))).unwrap();
    assert_eq!(n1.pairing.berezin_seq(&n1.berezin).unwrap(), GrassmannElement::one(2));
    let p = ModelParams { t: Some(q(2, 1)), alpha: Some(q(3, 1)), ..Default::default() };
    let n2 = build_model(ModelTag::Ns2, &p).unwrap();
    assert_eq!(n2.pairing.berezin_seq(&n2.berezin).unwrap(), GrassmannElement::one(2));
}
