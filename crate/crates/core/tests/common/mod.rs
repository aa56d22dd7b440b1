#![allow(dead_code)]

use proptest::prelude::*;
use susle::grassmann::{GrassmannElement, Mask};
use susle::scalar::Rational;

pub type G = GrassmannElement<Rational>;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rational::new(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop_oneof![-9i64..=-1, 1i64..=9], 1i64..=5).prop_map(|(n, d)| Rational::new(n, d))
}

/// Arbitrary element of `Λ_n` with up to `max_terms` terms.
pub fn grassmann(n: u8, max_terms: usize) -> impl Strategy<Value = G> {
    let limit: Mask = (1u64 << n) - 1;
    prop::collection::vec((0..=limit, rational()), 0..=max_terms)
        .prop_map(move |ts| G::from_terms(n, ts).unwrap())
}

pub fn even_grassmann(n: u8, max_terms: usize) -> impl Strategy<Value = G> {
    grassmann(n, max_terms).prop_map(|g| g.even_part())
}

pub fn odd_grassmann(n: u8, max_terms: usize) -> impl Strategy<Value = G> {
    grassmann(n, max_terms).prop_map(|g| g.odd_part())
}

/// Homogeneous element of random parity.
pub fn homogeneous(n: u8, max_terms: usize) -> impl Strategy<Value = G> {
    (grassmann(n, max_terms), any::<bool>()).prop_map(|(g, odd)| if odd { g.odd_part() } else { g.even_part() })
}
