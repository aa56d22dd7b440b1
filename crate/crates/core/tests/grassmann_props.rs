mod common;

use common::*;
use proptest::prelude::*;
use susle::grassmann::{GrassmannElement, Parity};
use susle::scalar::{QComplex, Rational, Scalar};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_is_associative_and_distributive(
        a in grassmann(4, 6), b in grassmann(4, 6), c in grassmann(4, 6)
    ) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn graded_commutativity(a in homogeneous(5, 6), b in homogeneous(5, 6)) {
        let both_odd = a.parity() == Some(Parity::Odd) && b.parity() == Some(Parity::Odd)
            && !a.is_zero() && !b.is_zero();
        let ba = &b * &a;
        let expect = if both_odd { -ba } else { ba };
        prop_assert_eq!(&a * &b, expect);
    }

    #[test]
    fn soul_is_nilpotent(a in grassmann(4, 10)) {
        prop_assert!(a.soul().pow(5).is_zero());
    }

    #[test]
    fn even_and_odd_parts_recombine(a in grassmann(5, 10)) {
        prop_assert_eq!(&a.even_part() + &a.odd_part(), a);
    }

    #[test]
    fn berezin_inverts_left_multiplication(a in grassmann(4, 8), i in 1usize..=4) {
        let x = a.without_generator(i);
        let zi = G::generator(4, i).unwrap();
        prop_assert_eq!((&zi * &x).berezin(i).unwrap(), x);
        prop_assert!(a.berezin(i).unwrap().berezin(i).unwrap().is_zero());
    }

    #[test]
    fn superanalytic_evaluation_is_multiplicative_on_polynomials(
        p in prop::collection::vec(rational(), 1..4),
        r in prop::collection::vec(rational(), 1..4),
        body in rational(),
        soul in even_grassmann(4, 6),
    ) {
        let x = &G::scalar(4, body.clone()) + &soul.soul();
        let prod = poly_mul(&p, &r);
        let lhs = G::eval_superanalytic(&taylor(&prod, &body, 6), &x).unwrap();
        let rhs = &G::eval_superanalytic(&taylor(&p, &body, 6), &x).unwrap()
            * &G::eval_superanalytic(&taylor(&r, &body, 6), &x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_is_two_sided(a in grassmann(4, 8), b in nonzero_rational()) {
        let x = &a.soul() + &G::scalar(4, b);
        let y = x.inverse().unwrap();
        prop_assert_eq!(&x * &y, G::one(4));
        prop_assert_eq!(&y * &x, G::one(4));
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::integer(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Derivatives of a polynomial at `x`, `len` of them.
fn taylor(p: &[Rational], x: &Rational, len: usize) -> Vec<Rational> {
    let mut cur = p.to_vec();
    let mut out = Vec::new();
    for _ in 0..len {
        let v = cur.iter().rev().fold(Rational::integer(0), |acc, c| acc * x.clone() + c.clone());
        out.push(v);
        cur = cur.iter().enumerate().skip(1).map(|(k, c)| c.clone() * Rational::integer(k as i64)).collect();
        if cur.is_empty() {
            cur.push(Rational::integer(0));
        }
    }
    out
}

#[test]
fn complex_rational_backend_works() {
    type Gc = GrassmannElement<QComplex>;
    let i = QComplex::new(Rational::integer(0), Rational::integer(1));
    let a = Gc::monomial(2, &[1], i.clone()).unwrap();
    let b = Gc::monomial(2, &[2], i).unwrap();
    let p = &a * &b;
    assert_eq!(p.coeff(0b11), -<QComplex as Scalar>::one());
    let json = p.to_json();
    assert_eq!(json["terms"][0]["re"], "-1");
    assert_eq!(Gc::from_json(2, &json).unwrap(), p);
}
