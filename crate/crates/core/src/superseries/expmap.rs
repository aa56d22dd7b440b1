//! Exponential coordinates on series of the form `b₁z + b₀ + b₋₁z⁻¹ + …`, and
//! the Schwarzian derivative.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::Scalar;

use super::series::{Expansion, PowerSeries};

type G<S> = GrassmannElement<S>;
type P<S> = PowerSeries<S>;

/// `ρ = exp(Σ_{i<0} v_i z^{i+1}∂z) (v₀ z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpMapCoords<S: Scalar> {
    pub v0: G<S>,
    /// Keyed by `i ≤ −1`.
    pub v: BTreeMap<i64, G<S>>,
}

/// `V f = Σ v_i z^{i+1} f'`.
fn apply_v<S: Scalar>(v: &BTreeMap<i64, G<S>>, f: &P<S>) -> Result<P<S>> {
    let d = f.derivative();
    let mut acc = P::zero(f.num_generators(), f.point(), f.trunc());
    for (i, c) in v {
        if !c.is_zero() {
            acc = acc.checked_add(&d.shift(i + 1).mul_left(c)?)?;
        }
    }
    Ok(acc.with_trunc(f.trunc()))
}

/// Evaluates the series defined by exponential coordinates, at infinity to order `k`.
pub fn expmap_forward<S: Scalar>(coords: &ExpMapCoords<S>, k: i64) -> Result<P<S>> {
    if coords.v.keys().any(|i| *i >= 0) {
        return Err(Error::Usage("exponential coordinates need negative indices".into()));
    }
    let start = P::monomial(coords.v0.clone(), 1, Expansion::Infinity, k);
    let mut acc = start.clone();
    let mut term = start;
    for step in 1..=(k.max(0) + 3) {
        term = apply_v(&coords.v, &term)?.scale(&S::from_i64(step).inv().expect("nonzero"));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

/// Solves for `(v₀, v_i)` order by order so that the forward map reproduces `rho`.
pub fn expmap_coordinates<S: Scalar>(rho: &P<S>) -> Result<ExpMapCoords<S>> {
    if rho.point() != Expansion::Infinity {
        return Err(Error::ExpansionMismatch("exponential coordinates need an expansion at infinity".into()));
    }
    if rho.top_exp().is_some_and(|e| e > 1) {
        return Err(Error::Usage("series must have the shape b₁z + b₀ + …".into()));
    }
    let k = rho.trunc();
    let v0 = rho.coeff(1);
    let v0_inv = v0
        .inverse()
        .map_err(|_| Error::Singular("b₁ has zero body".into()))?;
    let mut coords = ExpMapCoords { v0, v: BTreeMap::new() };
    // The z^{i+1} coefficient of the forward map is v_i·v₀ plus terms in v_{>i}.
    for i in (-(k + 1)..=-1).rev() {
        let cur = expmap_forward(&coords, k)?;
        let resid = &rho.coeff(i + 1) - &cur.coeff(i + 1);
        let vi = &resid * &v0_inv;
        if !vi.is_zero() {
            coords.v.insert(i, vi);
        }
    }
    Ok(coords)
}

/// `ρ‴/ρ′ − (3/2)(ρ″/ρ′)²` for a series.
pub fn schwarzian<S: Scalar>(rho: &P<S>) -> Result<P<S>> {
    let d1 = rho.derivative();
    let (_, lead) = d1
        .leading()
        .ok_or_else(|| Error::Singular("ρ′ vanishes identically".into()))?;
    if lead.body().is_zero() {
        return Err(Error::Singular("ρ′ has zero body at the expansion point".into()));
    }
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let r = d1.recip()?;
    let q = d2.checked_mul(&r)?;
    d3.checked_mul(&r)?.checked_sub(&q.checked_mul(&q)?.scale(&S::from_ratio(3, 2)))
}

/// Schwarzian from pointwise derivative values `ρ′, ρ″, ρ‴`.
pub fn schwarzian_jet<S: Scalar>(d1: &S, d2: &S, d3: &S) -> Result<S> {
    let r = d1
        .inv()
        .ok_or_else(|| Error::Singular("ρ′ vanishes at the sample point".into()))?;
    let q = d2.clone() * r.clone();
    Ok(d3.clone() * r - S::from_ratio(3, 2) * q.clone() * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn c(n: i64) -> G<Rational> {
        G::scalar(0, Rational::integer(n))
    }

    #[test]
    fn dilation_and_translation() {
        let rho = P::from_coeffs(0, Expansion::Infinity, 8, [(1, c(3))]).unwrap();
        let co = expmap_coordinates(&rho).unwrap();
        assert_eq!(co.v0, c(3));
        assert!(co.v.is_empty());
        let rho = P::from_coeffs(0, Expansion::Infinity, 8, [(1, c(1)), (0, c(2))]).unwrap();
        let co = expmap_coordinates(&rho).unwrap();
        assert_eq!(co.v.get(&-1), Some(&c(2)));
        assert_eq!(expmap_forward(&co, 8).unwrap(), rho);
    }

    #[test]
    fn schwarzian_of_square_is_minus_three_halves_over_z_squared() {
        let z = Rational::integer(5);
        let s = schwarzian_jet(&(Rational::integer(2) * z.clone()), &Rational::integer(2), &Rational::integer(0))
            .unwrap();
        assert_eq!(s, Rational::new(-3, 2) / (z.clone() * z));
    }
}
