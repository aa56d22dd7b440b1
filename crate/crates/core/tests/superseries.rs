mod common;

use common::*;
use proptest::prelude::*;
use susle::scalar::{Rational, Scalar, C64};
use susle::superseries::*;

type P = PowerSeries<Rational>;
const INF: Expansion = Expansion::Infinity;

fn one(n: u8) -> G {
    G::one(n)
}

fn n1_layout() -> Layout {
    Layout::n1(2)
}

#[test]
fn d_on_basic_functions() {
    let l = n1_layout();
    let n = l.n_total();
    let theta = P::constant(G::generator(n, l.theta()).unwrap(), INF, 8);
    let z = P::variable(n, INF, 8);
    assert_eq!(apply_d(&theta, &l).unwrap(), P::constant(one(n), INF, 8));
    assert_eq!(apply_d(&z, &l).unwrap().with_trunc(8), theta);
    let z3 = P::monomial(one(n), 3, INF, 8);
    let dd = apply_d(&apply_d(&z3, &l).unwrap(), &l).unwrap();
    assert_eq!(dd.with_trunc(8), P::monomial(G::scalar(n, q(3, 1)), 2, INF, 8));
}

#[test]
fn dpm_on_basic_functions() {
    let l = Layout::n2(2);
    let n = l.n_total();
    let tp = P::constant(G::generator(n, l.theta_p()).unwrap(), INF, 8);
    let tm = P::constant(G::generator(n, l.theta_m()).unwrap(), INF, 8);
    let z = P::variable(n, INF, 8);
    assert_eq!(apply_dpm(&tp, &l, true).unwrap(), P::constant(one(n), INF, 8));
    assert_eq!(apply_dpm(&z, &l, true).unwrap().with_trunc(8), tm);
    assert!(apply_dpm(&tm, &l, true).unwrap().is_zero());
}

#[test]
fn superconformality_examples() {
    let id = SuperFieldN1::<Rational>::identity(2, INF, 6);
    assert!(id.is_superconformal().unwrap().pass);
    let l = id.layout;
    let n = l.n_total();
    let zero = P::zero(n, INF, 6);
    let bad = SuperFieldN1::from_components(
        l,
        &P::variable(n, INF, 6),
        &zero,
        &zero,
        &P::constant(G::scalar(n, q(2, 1)), INF, 6),
    )
    .unwrap();
    let rep = bad.is_superconformal().unwrap();
    assert!(!rep.pass);
    // Dz̃ = θ and θ̃Dθ̃ = 4θ, so the residual is −3θ.
    let theta = G::generator(n, l.theta()).unwrap();
    assert_eq!(rep.residuals[0].1.coeff(0), theta.scale(&q(-3, 1)));

    let id2 = SuperFieldN2::<Rational>::identity(2, INF, 6);
    assert!(id2.is_superconformal().unwrap().pass);
    let swapped = SuperFieldN2 { theta_p: id2.theta_m.clone(), ..id2.clone() };
    let rep = swapped.is_superconformal().unwrap();
    assert!(!rep.pass);
    assert!(!rep.residuals[3].1.is_zero(), "D⁻θ̃⁺ should be nonzero");
}

#[test]
fn vector_field_examples() {
    let l = n1_layout();
    let n = l.n_total();
    let z = P::variable(n, INF, 6);
    let theta_g = G::generator(n, l.theta()).unwrap();
    let theta = P::constant(theta_g.clone(), INF, 6);
    let r = apply_vector_field(FieldSymbol::L1(-1), &z, &l).unwrap();
    assert_eq!(r.with_trunc(6), P::constant(G::scalar(n, q(-1, 1)), INF, 6));
    let r = apply_vector_field(FieldSymbol::L1(0), &theta, &l).unwrap();
    assert_eq!(r.with_trunc(6), P::constant(theta_g.scale(&q(-1, 2)), INF, 6));
    let gz = apply_vector_field(FieldSymbol::G(-1), &z, &l).unwrap();
    let gt = apply_vector_field(FieldSymbol::G(-1), &theta, &l).unwrap();
    assert_eq!(gz.with_trunc(6), theta.clone());
    assert_eq!(gt.with_trunc(6), P::constant(G::scalar(n, q(-1, 1)), INF, 6));
}

#[test]
fn exp_examples() {
    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
    let h = exp_superconformal_n1(&v, 8).unwrap();
    assert_eq!(h, SuperFieldN1::identity(2, INF, 8));

    v.a.insert(-1, G::scalar(2, q(5, 3)));
    let h = exp_superconformal_n1(&v, 8).unwrap();
    let n = 3;
    let expect_z = P::from_coeffs(n, INF, 8, [(1, one(n)), (0, G::scalar(n, q(5, 3)))]).unwrap();
    assert_eq!(h.z, expect_z);
    assert_eq!(h.theta, SuperFieldN1::identity(2, INF, 8).theta);

    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
    let mu = G::monomial(2, &[1], q(2, 1)).unwrap();
    v.m.insert(-1, mu.clone());
    let h = exp_superconformal_n1(&v, 8).unwrap();
    let l = h.layout;
    let theta = G::generator(n, l.theta()).unwrap();
    let mu3 = l.lift(&mu).unwrap();
    let expect_z = P::from_coeffs(n, INF, 8, [(1, one(n)), (0, &theta * &mu3)]).unwrap();
    let expect_t = P::constant(&theta + &mu3, INF, 8);
    assert_eq!(h.z, expect_z);
    assert_eq!(h.theta, expect_t);
    assert!(h.is_superconformal().unwrap().pass);
}

#[test]
fn exp_n2_examples() {
    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N2, 2);
    v.b.insert(-1, G::scalar(2, q(3, 2)));
    let h = exp_superconformal_n2(&v, 10).unwrap();
    assert!(h.is_superconformal().unwrap().pass);

    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N2, 2);
    v.mp.insert(-1, G::monomial(2, &[2], q(1, 1)).unwrap());
    let h = exp_superconformal_n2(&v, 10).unwrap();
    let rep = h.is_superconformal().unwrap();
    assert!(rep.pass);
    assert!(apply_dpm(&h.theta_m, &h.layout, true).unwrap().is_zero());
}

#[test]
fn exp_rejects_bad_support() {
    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
    v.a.insert(-9, G::scalar(2, q(1, 1)));
    assert!(matches!(exp_superconformal_n1(&v, 4), Err(susle::Error::NonConvergent(_))));
    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
    v.m.insert(-2, G::scalar(2, q(1, 1)));
    assert!(exp_superconformal_n1(&v, 4).is_err(), "even coefficient on an odd field");
}

#[test]
fn commutator_examples() {
    let v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
    let rep = commutator_identity_check(&v, 8).unwrap();
    assert!(rep.pass && rep.h.is_zero());

    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
    let a = G::scalar(2, q(7, 2));
    v.a.insert(-2, a.clone());
    let rep = commutator_identity_check(&v, 8).unwrap();
    assert!(rep.pass, "{:?}", rep.failures);
    assert_eq!(rep.h.coeff(-2), v.layout().lift(&a.scale(&q(-1, 2))).unwrap());

    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
    let m = G::monomial(2, &[1], q(1, 1)).unwrap();
    v.m.insert(-2, m.clone());
    let rep = commutator_identity_check(&v, 8).unwrap();
    assert!(rep.pass, "{:?}", rep.failures);
    let l = v.layout();
    let theta = G::generator(3, l.theta()).unwrap();
    assert_eq!(rep.h.coeff(-2), (&theta * &l.lift(&m).unwrap()).scale(&q(-1, 1)));
}

#[test]
fn expmap_translation_and_schwarzian_examples() {
    let rho = P::from_coeffs(0, INF, 10, [(1, G::one(0)), (0, G::scalar(0, q(3, 1)))]).unwrap();
    let c = expmap_coordinates(&rho).unwrap();
    assert_eq!(c.v0, G::one(0));
    assert_eq!(c.v[&-1], G::scalar(0, q(3, 1)));
    assert_eq!(expmap_forward(&c, 10).unwrap(), rho);

    let zero_b1 = P::from_coeffs(0, INF, 10, [(0, G::one(0))]).unwrap();
    assert!(matches!(expmap_coordinates(&zero_b1), Err(susle::Error::Singular(_))));

    let z = P::variable(0, INF, 10);
    assert!(schwarzian(&z).unwrap().is_zero());
}

#[test]
fn schwarzian_vanishes_on_mobius_samples() {
    // ρ = (az+b)/(cz+d): ρ′ = Δ/(cz+d)², ρ″ = −2cΔ/(cz+d)³, ρ‴ = 6c²Δ/(cz+d)⁴.
    for (a, b, c, d) in [(1.0, 2.0, 3.0, 5.0), (2.0, -1.0, 0.5, 1.0), (0.0, 1.0, -1.0, 4.0)] {
        for zr in [0.3, 1.7, -2.2] {
            let z = C64::new(zr, 0.8);
            let w = C64::new(c, 0.0) * z + d;
            let det = a * d - b * c;
            let d1 = det / (w * w);
            let d2 = -2.0 * c * det / (w * w * w);
            let d3 = 6.0 * c * c * det / (w * w * w * w);
            let s = schwarzian_jet(&d1, &d2, &d3).unwrap();
            assert!(s.norm() < 1e-12, "{s}");
        }
    }
}

#[test]
fn schwarzian_of_mobius_series_is_zero() {
    // (2z + 1)/(z + 3) expanded at 0.
    let num = P::from_coeffs(0, Expansion::Zero, 12, [(0, G::scalar(0, q(1, 1))), (1, G::scalar(0, q(2, 1)))]).unwrap();
    let den = P::from_coeffs(0, Expansion::Zero, 12, [(0, G::scalar(0, q(3, 1))), (1, G::one(0))]).unwrap();
    let rho = num.checked_mul(&den.recip().unwrap()).unwrap();
    let s = schwarzian(&rho).unwrap();
    assert!(s.is_zero(), "{s:?}");
    assert!(s.trunc() >= 8);
}

// ---------------------------------------------------------------------------

fn n1_coeffs() -> impl Strategy<Value = VectorFieldCoeffs<Rational>> {
    (
        prop::collection::btree_map(-6i64..=-1, even_grassmann(2, 3), 0..4),
        prop::collection::btree_map(-6i64..=-1, odd_grassmann(2, 2), 0..4),
    )
        .prop_map(|(a, m)| {
            let mut v = VectorFieldCoeffs::new(SuperKind::N1, 2);
            v.a = a;
            v.m = m;
            v
        })
}

fn n2_coeffs() -> impl Strategy<Value = VectorFieldCoeffs<Rational>> {
    (
        prop::collection::btree_map(-6i64..=-1, even_grassmann(2, 3), 0..3),
        prop::collection::btree_map(-6i64..=-1, even_grassmann(2, 3), 0..3),
        prop::collection::btree_map(-6i64..=-1, odd_grassmann(2, 2), 0..3),
        prop::collection::btree_map(-6i64..=-1, odd_grassmann(2, 2), 0..3),
    )
        .prop_map(|(a, b, mp, mm)| {
            let mut v = VectorFieldCoeffs::new(SuperKind::N2, 2);
            v.a = a;
            v.b = b;
            v.mp = mp;
            v.mm = mm;
            v
        })
}

fn rand_series(point: Expansion, k: i64, n: u8) -> impl Strategy<Value = P> {
    prop::collection::btree_map(-4i64..=4, grassmann(n, 3), 0..6)
        .prop_map(move |m| P::from_coeffs(n, point, k, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn n1_exponentials_are_superconformal(v in n1_coeffs()) {
        let h = exp_superconformal_n1(&v, 12).unwrap();
        let rep = h.is_superconformal().unwrap();
        prop_assert!(rep.pass, "{:?}", rep.residuals);
        prop_assert!(rep.residuals[0].1.trunc() >= 12);
        let c = commutator_identity_check(&v, 12).unwrap();
        prop_assert!(c.pass, "{:?}", c.failures);
    }

    #[test]
    fn n2_exponentials_are_superconformal(v in n2_coeffs()) {
        let h = exp_superconformal_n2(&v, 12).unwrap();
        let rep = h.is_superconformal().unwrap();
        prop_assert!(rep.pass, "{:?}", rep.residuals);
        prop_assert!(rep.residuals.iter().all(|(_, r)| r.trunc() >= 12));
    }

    #[test]
    fn d_squares_to_dz(f in rand_series(INF, 8, 3)) {
        let l = Layout::n1(2);
        let dd = apply_d(&apply_d(&f, &l).unwrap(), &l).unwrap();
        prop_assert_eq!(dd.clone(), f.derivative().with_trunc(dd.trunc()));
    }

    #[test]
    fn dpm_relations(f in rand_series(INF, 8, 4)) {
        let l = Layout::n2(2);
        let p = |x: &P| apply_dpm(x, &l, true).unwrap();
        let m = |x: &P| apply_dpm(x, &l, false).unwrap();
        prop_assert!(p(&p(&f)).is_zero());
        prop_assert!(m(&m(&f)).is_zero());
        let anti = p(&m(&f)).checked_add(&m(&p(&f))).unwrap();
        prop_assert_eq!(anti.clone(), f.derivative().scale(&q(2, 1)).with_trunc(anti.trunc()));
    }

    #[test]
    fn expmap_round_trip(
        b1 in nonzero_rational(),
        lower in prop::collection::vec(rational(), 11),
    ) {
        let mut cs = vec![(1, G::scalar(0, b1))];
        for (k, c) in lower.into_iter().enumerate() {
            cs.push((-(k as i64), G::scalar(0, c)));
        }
        let rho = P::from_coeffs(0, INF, 10, cs).unwrap();
        let coords = expmap_coordinates(&rho).unwrap();
        let back = expmap_forward(&coords, 10).unwrap();
        prop_assert_eq!(back.checked_sub(&rho).unwrap().is_zero(), true);
    }

    #[test]
    fn expmap_round_trip_grassmann(
        b1 in nonzero_rational(),
        lower in prop::collection::vec(even_grassmann(2, 3), 6),
    ) {
        let mut cs = vec![(1, G::scalar(2, b1))];
        for (k, c) in lower.into_iter().enumerate() {
            cs.push((-(k as i64), c));
        }
        let rho = P::from_coeffs(2, INF, 6, cs).unwrap();
        let coords = expmap_coordinates(&rho).unwrap();
        prop_assert_eq!(expmap_forward(&coords, 6).unwrap(), rho);
    }

    #[test]
    fn invert_round_trip(
        b1 in nonzero_rational(),
        lower in prop::collection::vec(rational(), 6),
    ) {
        let mut cs = vec![(1, G::scalar(0, b1))];
        for (k, c) in lower.into_iter().enumerate() {
            cs.push((-(k as i64), G::scalar(0, c)));
        }
        let rho = P::from_coeffs(0, INF, 6, cs).unwrap();
        let tau = rho.invert().unwrap();
        let z = P::variable(0, INF, 6);
        prop_assert_eq!(rho.compose(&tau).unwrap().with_trunc(6), z.clone());
        prop_assert_eq!(tau.compose(&rho).unwrap().with_trunc(6), z);
    }

    #[test]
    fn schwarzian_chain_rule(
        s in prop::collection::vec(rational(), 3),
        r in prop::collection::vec(rational(), 3),
        s1 in nonzero_rational(), r1 in nonzero_rational(),
    ) {
        // σ, ρ polynomials at 0 with ρ(0) = 0 and nonzero linear terms.
        let k = 10;
        let sig = P::from_coeffs(0, Expansion::Zero, k,
            [(1, G::scalar(0, s1))].into_iter().chain(s.into_iter().enumerate().map(|(i, c)| (i as i64 + 2, G::scalar(0, c))))).unwrap();
        let rho = P::from_coeffs(0, Expansion::Zero, k,
            [(1, G::scalar(0, r1))].into_iter().chain(r.into_iter().enumerate().map(|(i, c)| (i as i64 + 2, G::scalar(0, c))))).unwrap();
        let lhs = schwarzian(&sig.compose(&rho).unwrap()).unwrap();
        let d = rho.derivative();
        let rhs = schwarzian(&sig).unwrap().compose(&rho).unwrap()
            .checked_mul(&d.checked_mul(&d).unwrap()).unwrap()
            .checked_add(&schwarzian(&rho).unwrap()).unwrap();
        let diff = lhs.checked_sub(&rhs).unwrap();
        prop_assert!(diff.is_zero(), "{:?}", diff);
        prop_assert!(diff.trunc() >= k - 6);
    }

    #[test]
    fn mul_recip_is_one(f in rand_series(INF, 6, 2), lead in nonzero_rational()) {
        let g = f.with_trunc(6).checked_add(&P::monomial(G::scalar(2, lead), 5, INF, 6)).unwrap();
        let g = P::from_coeffs(2, INF, 6, g.coeffs().filter(|(e, _)| **e <= 5).map(|(e, c)| (*e, c.clone()))).unwrap();
        if g.coeff(5).body().is_zero() { return Ok(()); }
        let r = g.recip().unwrap();
        let prod = g.checked_mul(&r).unwrap();
        prop_assert_eq!(prod.clone(), P::constant(G::one(2), INF, prod.trunc()));
    }
}

#[test]
fn series_json_round_trip() {
    let s = P::from_coeffs(2, INF, 5, [(1, G::one(2)), (-2, G::monomial(2, &[1, 2], q(-3, 4)).unwrap())]).unwrap();
    let v = s.to_json();
    assert_eq!(v["expansion"], "inf");
    assert_eq!(v["trunc"], 5);
    assert_eq!(P::from_json(&v).unwrap(), s);
    let _ = Rational::one();
}

/// With a fixed `θ⁺θ⁻` ordering in the correction term of `𝓖⁻`, the flow is not superconformal.
#[test]
fn fixed_order_correction_for_g_minus_breaks_superconformality() {
    let l = Layout::n2(2);
    let n = l.n_total();
    let mu = l.lift(&G::monomial(2, &[1], q(1, 1)).unwrap()).unwrap();
    let j = -2i64;
    let field = |f: &P| -> P {
        let (tp, tm) = (l.theta_p(), l.theta_m());
        let dth = d_theta(f, tm).unwrap();
        let first = dth.checked_sub(&theta_mul(&f.derivative(), tp).unwrap()).unwrap().shift(j + 1);
        let second = theta_mul(&theta_mul(&dth, tm).unwrap(), tp).unwrap().shift(j).scale(&q(j + 1, 1));
        first.checked_add(&second).unwrap().neg()
    };
    // T = −μ𝓖⁻ and exp(T) on each coordinate.
    let t = |f: &P| field(f).mul_left(&mu).unwrap().neg().with_trunc(f.trunc());
    let exp = |f: &P| {
        let (mut acc, mut term) = (f.clone(), f.clone());
        for k in 1..20 {
            term = t(&term).scale(&q(1, k));
            acc = acc.checked_add(&term).unwrap();
        }
        acc
    };
    let id = SuperFieldN2::<Rational>::identity(2, INF, 10);
    let h = SuperFieldN2 { layout: l, z: exp(&id.z), theta_p: exp(&id.theta_p), theta_m: exp(&id.theta_m) };
    assert!(!h.is_superconformal().unwrap().pass);
    let _ = n;
}
