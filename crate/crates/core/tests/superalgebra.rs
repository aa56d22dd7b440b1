mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use susle::scalar::Rational;
use susle::superalgebra::*;
use susle::superseries::{apply_vector_field, Expansion, FieldSymbol, Layout, PowerSeries, SuperKind, VectorFieldCoeffs, EXACT_TRUNC};

use GeneratorSymbol as X;

const NS2: Algebra = Algebra::Ns2(Ns2Table::Standard);
const NS2P: Algebra = Algebra::Ns2(Ns2Table::Printed);

type Lie = BTreeMap<GeneratorSymbol, Rational>;

fn lie_bracket(x: &Lie, y: &Lie, alg: Algebra) -> Lie {
    let mut out = Lie::new();
    for (a, ca) in x {
        for (b, cb) in y {
            if a.family == Family::C || b.family == Family::C {
                continue;
            }
            for (g, k) in bracket(a, b, alg).unwrap() {
                let e = out.entry(g).or_insert_with(|| q(0, 1));
                *e = e.clone() + ca.clone() * cb.clone() * k;
            }
        }
    }
    out.retain(|_, v| v.signum() != 0);
    out
}

fn single(g: GeneratorSymbol) -> Lie {
    let mut m = Lie::new();
    m.insert(g, q(1, 1));
    m
}

fn add(a: &mut Lie, b: &Lie, s: i64) {
    for (g, c) in b {
        let e = a.entry(*g).or_insert_with(|| q(0, 1));
        *e = e.clone() + c.clone() * Rational::integer(s);
    }
    a.retain(|_, v| v.signum() != 0);
}

/// Cyclic graded Jacobi sum; zero iff the identity holds for the triple.
fn jacobi(x: GeneratorSymbol, y: GeneratorSymbol, z: GeneratorSymbol, alg: Algebra) -> Lie {
    let sgn = |a: GeneratorSymbol, b: GeneratorSymbol| if a.is_odd() && b.is_odd() { -1 } else { 1 };
    let mut acc = Lie::new();
    let t1 = lie_bracket(&single(x), &lie_bracket(&single(y), &single(z), alg), alg);
    let t2 = lie_bracket(&single(y), &lie_bracket(&single(z), &single(x), alg), alg);
    let t3 = lie_bracket(&single(z), &lie_bracket(&single(x), &single(y), alg), alg);
    add(&mut acc, &t1, sgn(x, z));
    add(&mut acc, &t2, sgn(y, x));
    add(&mut acc, &t3, sgn(z, y));
    acc
}

fn symbol(alg: Algebra) -> impl Strategy<Value = GeneratorSymbol> {
    let fams: Vec<Family> = match alg {
        Algebra::Virasoro => vec![Family::L],
        Algebra::Ns1 => vec![Family::L, Family::G],
        Algebra::Ns2(_) => vec![Family::L, Family::J, Family::Gp, Family::Gm],
    };
    (prop::sample::select(fams), -3i32..=3).prop_map(|(family, k)| {
        let mode2 = if family.is_odd() { 2 * k + 1 } else { 2 * k };
        GeneratorSymbol { family, mode2 }
    })
}

#[test]
fn bracket_examples() {
    assert_eq!(bracket(&X::L(1), &X::L(-1), Algebra::Virasoro).unwrap(), vec![(X::L(0), q(2, 1))]);
    assert_eq!(bracket(&X::G(1), &X::G(-1), Algebra::Ns1).unwrap(), vec![(X::L(0), q(2, 1))]);
    assert_eq!(bracket(&X::L(2), &X::L(-2), Algebra::Virasoro).unwrap(), vec![(X::L(0), q(4, 1)), (X::C(), q(1, 2))]);
    assert!(matches!(bracket(&X::G(1), &X::L(0), Algebra::Virasoro), Err(susle::Error::AlgebraMismatch { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn jacobi_virasoro(x in symbol(Algebra::Virasoro), y in symbol(Algebra::Virasoro), z in symbol(Algebra::Virasoro)) {
        prop_assert!(jacobi(x, y, z, Algebra::Virasoro).is_empty());
    }

    #[test]
    fn jacobi_ns1(x in symbol(Algebra::Ns1), y in symbol(Algebra::Ns1), z in symbol(Algebra::Ns1)) {
        prop_assert!(jacobi(x, y, z, Algebra::Ns1).is_empty());
    }

    #[test]
    fn jacobi_ns2_standard(x in symbol(NS2), y in symbol(NS2), z in symbol(NS2)) {
        prop_assert!(jacobi(x, y, z, NS2).is_empty());
    }
}

#[test]
fn printed_ns2_table_violates_jacobi() {
    let w = jacobi(X::L(1), X::Gp(-1), X::Gm(1), NS2P);
    assert!(!w.is_empty(), "expected a Jacobi violation");
    assert!(jacobi(X::L(1), X::Gp(-1), X::Gm(1), NS2).is_empty());
}

#[test]
fn normal_order_examples() {
    let r = normal_order_monomial(&[X::L(-1), X::L(-2)], Algebra::Virasoro).unwrap();
    assert_eq!(r.len(), 2);
    assert_eq!(r[&vec![X::L(-2), X::L(-1)]], q(1, 1));
    assert_eq!(r[&vec![X::L(-3)]], q(1, 1));
    let r = normal_order_monomial(&[X::G(-1), X::G(-1)], Algebra::Ns1).unwrap();
    assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![(vec![X::L(-1)], q(1, 1))]);
}

fn word(alg: Algebra, max_len: usize) -> impl Strategy<Value = Vec<GeneratorSymbol>> {
    prop::collection::vec(symbol(alg), 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normal_order_idempotent_and_linear(
        w1 in word(Algebra::Ns1, 4), w2 in word(Algebra::Ns1, 4), a in rational(), b in rational()
    ) {
        let e1 = UEAElement::monomial(Algebra::Ns1, w1, G::scalar(0, a)).unwrap();
        let e2 = UEAElement::monomial(Algebra::Ns1, w2, G::scalar(0, b)).unwrap();
        let n1 = e1.normal_order().unwrap();
        prop_assert!(n1.is_normal_ordered());
        prop_assert_eq!(n1.normal_order().unwrap(), n1.clone());
        let sum = e1.add(&e2).unwrap().normal_order().unwrap();
        prop_assert_eq!(sum, n1.add(&e2.normal_order().unwrap()).unwrap());
    }

    #[test]
    fn action_respects_normal_order(w in word(NS2, 4), h in rational(), c in rational(), al in rational()) {
        let module = VermaModule::new(NS2, Weights::with_alpha(c, h, al));
        let e = UEAElement::monomial(NS2, w, G::one(0)).unwrap();
        let hw = module.highest_weight(0);
        prop_assert_eq!(module.act(&e, &hw).unwrap(), module.act(&e.normal_order().unwrap(), &hw).unwrap());
    }

    #[test]
    fn lowering_generator_raises_level(k in 1i32..=4, odd in any::<bool>(), m in 0usize..12) {
        let module = VermaModule::new(Algebra::Ns1, Weights::new(q(1, 3), q(2, 5)));
        let basis = module.basis(5);
        let mono = basis[m % basis.len()].clone();
        let v = VermaVector::basis_vector(Algebra::Ns1, 0, mono.clone());
        let g = if odd { X::G(-(2 * k - 1)) } else { X::L(-k) };
        let img = module.act_gen_on(g, &v).unwrap();
        prop_assert_eq!(img.level2(), Some(-monomial_mode2(&mono) - g.mode2));
    }
}

#[test]
fn action_examples() {
    let h = q(3, 5);
    let vir = VermaModule::new(Algebra::Virasoro, Weights::new(q(1, 2), h.clone()));
    let hw = vir.highest_weight(0);
    assert_eq!(vir.act_gen_on(X::L(0), &hw).unwrap(), hw.scale(&h));
    let l1l = UEAElement::from_rational_terms(Algebra::Virasoro, 0, &[("L1 L-1", q(1, 1))]).unwrap();
    assert_eq!(vir.act(&l1l, &hw).unwrap(), hw.scale(&(h.clone() * q(2, 1))));
    let ns = VermaModule::new(Algebra::Ns1, Weights::new(q(1, 2), h.clone()));
    let gg = UEAElement::from_rational_terms(Algebra::Ns1, 0, &[("G1/2 G-1/2", q(1, 1))]).unwrap();
    let hw = ns.highest_weight(0);
    assert_eq!(ns.act(&gg, &hw).unwrap(), hw.scale(&(h * q(2, 1))));
    assert!(ns.act(&UEAElement::one(Algebra::Virasoro, 0), &hw).is_err());
}

#[test]
fn grassmann_coefficients_pick_up_signs() {
    // (ζ₁ G_{1/2}) acting on (ζ₂ G_{-1/2}|hw⟩) = ζ₁·(−ζ₂)·2h|hw⟩
    let h = q(1, 3);
    let m = VermaModule::new(Algebra::Ns1, Weights::new(q(0, 1), h.clone()));
    let z1 = G::generator(2, 1).unwrap();
    let z2 = G::generator(2, 2).unwrap();
    let x = UEAElement::monomial(Algebra::Ns1, vec![X::G(1)], z1.clone()).unwrap();
    let v = VermaVector::basis_vector(Algebra::Ns1, 2, vec![X::G(-1)]).mul_scalar_left(&z2).unwrap();
    let r = m.act(&x, &v).unwrap();
    let want = (&z1 * &(-&z2)).scale(&(h * q(2, 1)));
    assert_eq!(r.coeff(&[]), want);
}

fn ns1_singular(h: &Rational) -> (VermaModule, VermaVector) {
    let c = q(3, 2) - q(8, 1) * h.clone();
    let a = -(q(3, 4) / h.clone());
    let module = VermaModule::new(Algebra::Ns1, Weights::new(c, h.clone()));
    let v = VermaVector::from_rational_terms(
        Algebra::Ns1,
        &[("L-2", q(1, 1)), ("L-1 L-1", a.clone()), ("G-3/2 G-1/2", -a)],
    )
    .unwrap();
    (module, v)
}

#[test]
fn singular_examples() {
    let (m, v) = ns1_singular(&q(1, 4));
    assert_eq!(m.weights().c, q(-1, 2));
    assert!(m.is_singular(&v).unwrap().pass);
    // Virasoro κ = 3: c = 1/2, h = 1/2
    let vir = VermaModule::new(Algebra::Virasoro, Weights::new(q(1, 2), q(1, 2)));
    let v = VermaVector::from_rational_terms(Algebra::Virasoro, &[("L-2", q(-2, 1)), ("L-1 L-1", q(3, 2))]).unwrap();
    assert!(vir.is_singular(&v).unwrap().pass);
    let l = VermaVector::from_rational_terms(Algebra::Virasoro, &[("L-1", q(1, 1))]).unwrap();
    let rep = vir.is_singular(&l).unwrap();
    assert!(!rep.pass);
    let (g, img) = rep.witness.unwrap();
    assert_eq!(g, X::L(1));
    assert_eq!(img, vir.highest_weight(0).scale(&q(1, 1)));
    let mixed = VermaVector::from_rational_terms(Algebra::Virasoro, &[("L-1", q(1, 1)), ("L-2", q(1, 1))]).unwrap();
    assert!(matches!(vir.is_singular(&mixed), Err(susle::Error::NonHomogeneous)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn ns1_singular_vector_and_perturbations(h in nonzero_rational(), which in 0usize..3) {
        let (m, v) = ns1_singular(&h);
        let rep = m.is_singular(&v).unwrap();
        prop_assert!(rep.pass);
        prop_assert!(m.act_gen_on(X::L(2), &v).unwrap().is_zero());
        let mono = v.terms().keys().nth(which).unwrap().clone();
        let bump = VermaVector::basis_vector(Algebra::Ns1, 0, mono);
        prop_assert!(!m.is_singular(&v.add(&bump).unwrap()).unwrap().pass);
    }
}

#[test]
fn q_matrix_examples() {
    let module = VermaModule::new(Algebra::Ns1, Weights::new(q(1, 2), q(1, 3)));
    let basis = TruncatedBasis::new(&module, 4);
    let zero = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 1);
    let id = q_matrix(&zero, &module, 4).unwrap();
    assert_eq!(id, GrassmannMatrix::identity(1, basis.parities()));

    let s = q(2, 3);
    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 1);
    v.a.insert(-1, G::scalar(1, s.clone()));
    let m = q_matrix(&v, &module, 4).unwrap();
    let col = m.column(0);
    for (i, mono) in basis.monomials.iter().enumerate() {
        let k = mono.len();
        let want = if mono.iter().all(|g| *g == X::L(-1)) {
            let fact: i64 = (1..=k as i64).product();
            (-s.clone()).pow(k as u32) / Rational::integer(fact)
        } else {
            q(0, 1)
        };
        assert_eq!(col[i], G::scalar(1, want), "{mono:?}");
    }

    let mu = G::generator(1, 1).unwrap();
    let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 1);
    v.m.insert(-1, mu.clone());
    let m = q_matrix(&v, &module, 4).unwrap();
    let g = vector_field_element(&v, Algebra::Ns1).unwrap();
    let lin = operator_matrix(&module, &g.neg(), &basis).unwrap();
    assert_eq!(m, GrassmannMatrix::identity(1, basis.parities()).add(&lin).unwrap());
    assert_eq!(m.column(0)[basis.index[&vec![X::G(-1)]]], -&mu);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn q_matrix_single_generator_inverse(j in -3i64..=-1, a in rational(), odd in any::<bool>()) {
        let module = VermaModule::new(Algebra::Ns1, Weights::new(q(3, 7), q(-1, 5)));
        let mut v = VectorFieldCoeffs::<Rational>::new(SuperKind::N1, 2);
        if odd {
            v.m.insert(j, G::monomial(2, &[1], a).unwrap());
        } else {
            v.a.insert(j, G::scalar(2, a));
        }
        let p = q_matrix(&v, &module, 5).unwrap();
        let n = q_matrix(&v.negated(), &module, 5).unwrap();
        let basis = TruncatedBasis::new(&module, 5);
        prop_assert_eq!(p.mul(&n).unwrap(), GrassmannMatrix::identity(2, basis.parities()));
        prop_assert!(p.level_triangular(&basis.levels2()));
    }
}

#[test]
fn solver_virasoro_level_two() {
    let t = SingularTemplate::new(Algebra::Virasoro, &["L-2", "L-1 L-1"]).unwrap();
    for h in [q(1, 3), q(2, 1), q(-5, 7)] {
        let rep = solve_singular_params(&t, &Weights::new(q(0, 1), h.clone()), WeightName::C).unwrap();
        assert_eq!(rep.solutions.len(), 1);
        let s = &rep.solutions[0];
        let two_h1 = q(2, 1) * h.clone() + q(1, 1);
        assert_eq!(s.weights.c, q(2, 1) * h.clone() * (q(5, 1) - q(8, 1) * h.clone()) / two_h1.clone());
        assert_eq!(s.coefficients[1], q(-3, 2) / two_h1);
        assert!(s.verified());
    }
}

#[test]
fn solver_ns1_level_two() {
    let t = SingularTemplate::new(Algebra::Ns1, &["L-2", "L-1 L-1", "G-3/2 G-1/2"]).unwrap();
    for h in [q(1, 4), q(3, 1), q(-2, 9)] {
        let rep = solve_singular_params(&t, &Weights::new(q(0, 1), h.clone()), WeightName::C).unwrap();
        assert_eq!(rep.solutions.len(), 1);
        let s = &rep.solutions[0];
        assert_eq!(s.weights.c, q(3, 2) - q(8, 1) * h.clone());
        assert_eq!(s.coefficients[1], -(q(3, 4) / h.clone()));
        assert_eq!(s.coefficients[2], q(3, 4) / h);
        assert!(s.verified());
    }
    let values: Vec<Rational> = (1..=12).map(|i| q(i, 5)).collect();
    let fit = fit_singular_relations(&t, &Weights::new(q(0, 1), q(0, 1)), WeightName::H, &values, WeightName::C, 4).unwrap();
    assert!(fit.all_verified);
    let c = fit.weight.unwrap();
    assert_eq!(c.render("h"), "-8*h + 3/2");
    assert_eq!(fit.coefficients[1].as_ref().unwrap().render("h"), "(-3/4) / (h)");
}

fn field_of(g: GeneratorSymbol) -> Option<FieldSymbol> {
    let j = |odd: bool| if odd { ((g.mode2 - 1) / 2) as i64 } else { (g.mode2 / 2) as i64 };
    Some(match g.family {
        Family::C => return None,
        Family::L => return Some(FieldSymbol::L1(j(false))),
        Family::G => FieldSymbol::G(j(true)),
        Family::J => FieldSymbol::J(j(false)),
        Family::Gp => FieldSymbol::Gp(j(true)),
        Family::Gm => FieldSymbol::Gm(j(true)),
    })
}

fn to_n2(f: FieldSymbol) -> FieldSymbol {
    match f {
        FieldSymbol::L1(j) => FieldSymbol::L2(j),
        other => other,
    }
}

fn closure_case(alg: Algebra, x: GeneratorSymbol, y: GeneratorSymbol, f: &PowerSeries<Rational>, layout: &Layout) -> bool {
    let fx = |g: GeneratorSymbol| {
        let s = field_of(g).unwrap();
        if layout.kind == SuperKind::N2 { to_n2(s) } else { s }
    };
    let ap = |g: GeneratorSymbol, h: &PowerSeries<Rational>| apply_vector_field(fx(g), h, layout).unwrap();
    let xy = ap(x, &ap(y, f));
    let yx = ap(y, &ap(x, f));
    let lhs = if x.is_odd() && y.is_odd() { xy.checked_add(&yx).unwrap() } else { xy.checked_sub(&yx).unwrap() };
    let mut rhs = PowerSeries::zero(f.num_generators(), f.point(), f.trunc());
    for (g, k) in bracket(&x, &y, alg).unwrap() {
        if g.family == Family::C {
            continue;
        }
        rhs = rhs.checked_add(&ap(g, f).scale(&k)).unwrap();
    }
    lhs.checked_sub(&rhs).unwrap().is_zero()
}

fn superfunction(n_total: u8) -> impl Strategy<Value = PowerSeries<Rational>> {
    prop::collection::btree_map(-3i64..=3, grassmann(n_total, 4), 1..5).prop_map(move |m| {
        PowerSeries::from_coeffs(n_total, Expansion::Infinity, EXACT_TRUNC, m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vector_fields_close_on_ns1(x in symbol(Algebra::Ns1), y in symbol(Algebra::Ns1), f in superfunction(1)) {
        prop_assert!(closure_case(Algebra::Ns1, x, y, &f, &Layout::n1(0)));
    }

    #[test]
    fn vector_fields_close_on_ns2(x in symbol(NS2), y in symbol(NS2), f in superfunction(2)) {
        prop_assert!(closure_case(NS2, x, y, &f, &Layout::n2(0)));
    }
}

#[test]
fn verma_json_round_trip() {
    let (_, v) = ns1_singular(&q(1, 4));
    let j = v.to_json();
    assert!(j["terms"]["G-3/2 G-1/2"].is_object());
    assert_eq!(VermaVector::from_json(&j).unwrap(), v);
}
