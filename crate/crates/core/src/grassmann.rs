//! Finite-generator Grassmann algebra.
//!
//! Monomials are bit sets: bit `k` stands for the generator `ζ_{k+1}`, and the
//! monomial means the ascending product of its generators. Terms are kept
//! sorted by mask with no zero coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Mask = u64;

pub const MAX_GENERATORS: u8 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_mask(m: Mask) -> Parity {
        if m.count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[inline]
fn bits_above(bit: u32) -> Mask {
    if bit >= 63 {
        0
    } else {
        !0u64 << (bit + 1)
    }
}

#[inline]
fn bits_below(bit: u32) -> Mask {
    (1u64 << bit) - 1
}

/// Sign of `ζ_a ζ_b` relative to the ascending monomial `ζ_{a|b}`; zero when they overlap.
#[inline]
pub fn merge_sign(a: Mask, b: Mask) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a & bits_above(j)).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// 1-based generator indices of a monomial, ascending.
pub fn mask_indices(mask: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize + 1);
        rest &= rest - 1;
    }
    out
}

#[derive(Clone, PartialEq)]
pub struct GrassmannElement<S: Scalar> {
    n: u8,
    terms: Vec<(Mask, S)>,
}

impl<S: Scalar> GrassmannElement<S> {
    pub fn zero(n: u8) -> Self {
        assert!(n <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        GrassmannElement { n, terms: Vec::new() }
    }

    pub fn one(n: u8) -> Self {
        Self::scalar(n, S::one())
    }

    pub fn scalar(n: u8, s: S) -> Self {
        let mut z = Self::zero(n);
        if !s.is_zero() {
            z.terms.push((0, s));
        }
        z
    }

    /// The generator `ζ_i` (1-based).
    pub fn generator(n: u8, i: usize) -> Result<Self> {
        Self::monomial(n, &[i], S::one())
    }

    /// `s · ζ_{i1} ζ_{i2} …` in the given (not necessarily sorted) order.
    pub fn monomial(n: u8, indices: &[usize], s: S) -> Result<Self> {
        let mut mask: Mask = 0;
        let mut sign = 1;
        for &i in indices {
            if i == 0 || i > n as usize {
                return Err(Error::GeneratorIndex { index: i, count: n });
            }
            let b = 1u64 << (i - 1);
            sign *= merge_sign(mask, b);
            mask |= b;
        }
        let mut z = Self::zero(n);
        if sign != 0 && !s.is_zero() {
            let c = if sign < 0 { -s } else { s };
            z.terms.push((mask, c));
        }
        Ok(z)
    }

    /// Builds an element from raw `(mask, coeff)` pairs, merging duplicates.
    pub fn from_terms(n: u8, terms: impl IntoIterator<Item = (Mask, S)>) -> Result<Self> {
        let limit = if n >= 64 { !0u64 } else { (1u64 << n) - 1 };
        let mut v: Vec<(Mask, S)> = Vec::new();
        for (m, c) in terms {
            if m & !limit != 0 {
                return Err(Error::GeneratorIndex { index: 64 - m.leading_zeros() as usize, count: n });
            }
            v.push((m, c));
        }
        Ok(Self::normalize(n, v))
    }

    fn normalize(n: u8, mut v: Vec<(Mask, S)>) -> Self {
        v.sort_by_key(|(m, _)| *m);
        let mut out: Vec<(Mask, S)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.clone() + c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        GrassmannElement { n, terms: out }
    }

    pub fn num_generators(&self) -> u8 {
        self.n
    }

    pub fn terms(&self) -> &[(Mask, S)] {
        &self.terms
    }

    pub fn coeff(&self, mask: Mask) -> S {
        match self.terms.binary_search_by_key(&mask, |(m, _)| *m) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn body(&self) -> S {
        self.coeff(0)
    }

    pub fn soul(&self) -> Self {
        self.filter(|m| m != 0)
    }

    pub fn is_scalar(&self) -> bool {
        self.terms.iter().all(|(m, _)| *m == 0)
    }

    fn filter(&self, keep: impl Fn(Mask) -> bool) -> Self {
        GrassmannElement {
            n: self.n,
            terms: self.terms.iter().filter(|(m, _)| keep(*m)).cloned().collect(),
        }
    }

    pub fn even_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    /// Terms not involving generator `i`.
    pub fn without_generator(&self, i: usize) -> Self {
        let b = 1u64 << (i - 1);
        self.filter(|m| m & b == 0)
    }

    /// Uniform parity of all terms; `None` for mixed elements. Zero is even.
    pub fn parity(&self) -> Option<Parity> {
        let mut p: Option<Parity> = None;
        for (m, _) in &self.terms {
            let q = Parity::of_mask(*m);
            match p {
                None => p = Some(q),
                Some(pp) if pp != q => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.count_ones() % 2 == 1)
    }

    /// Grade involution: negates the odd part.
    pub fn involution(&self) -> Self {
        GrassmannElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, if m.count_ones() % 2 == 1 { -c.clone() } else { c.clone() }))
                .collect(),
        }
    }

    /// Applies the grade involution `times` times.
    pub fn involution_pow(&self, times: usize) -> Self {
        if times % 2 == 1 {
            self.involution()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.clone() * s.clone()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        GrassmannElement { n: self.n, terms }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::GeneratorMismatch { left: self.n, right: other.n })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = a[i].1.clone() + b[j].1.clone();
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(GrassmannElement { n: self.n, terms: out })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.terms.is_empty() || other.terms.is_empty() {
            return Ok(Self::zero(self.n));
        }
        if other.terms.len() == 1 && other.terms[0].0 == 0 {
            return Ok(self.scale(&other.terms[0].1));
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            let s = &self.terms[0].1;
            let terms = other
                .terms
                .iter()
                .map(|(m, c)| (*m, s.clone() * c.clone()))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            return Ok(GrassmannElement { n: self.n, terms });
        }
        let mut v = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let s = merge_sign(*ma, *mb);
                if s == 0 {
                    continue;
                }
                let c = ca.clone() * cb.clone();
                v.push((ma | mb, if s < 0 { -c } else { c }));
            }
        }
        Ok(Self::normalize(self.n, v))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n as usize {
            Err(Error::GeneratorIndex { index: i, count: self.n })
        } else {
            Ok(())
        }
    }

    /// Berezin integral `∫dζ_i`, the left derivative with `∫dζ_i ζ_i = 1`.
    pub fn berezin(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        let bit = (i - 1) as u32;
        let b = 1u64 << bit;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m & b != 0)
            .map(|(m, c)| {
                let neg = (m & bits_below(bit)).count_ones() % 2 == 1;
                (m & !b, if neg { -c.clone() } else { c.clone() })
            })
            .collect();
        // Removing one fixed bit preserves the mask order.
        Ok(GrassmannElement { n: self.n, terms })
    }

    /// Iterated integral `∫dζ_{i1} … dζ_{ik}`; the rightmost symbol acts first.
    pub fn berezin_seq(&self, indices: &[usize]) -> Result<Self> {
        let mut x = self.clone();
        for &i in indices.iter().rev() {
            x = x.berezin(i)?;
        }
        Ok(x)
    }

    /// `Σ_ℓ soul^ℓ/ℓ! · taylor[ℓ]` where `taylor[ℓ]` is the ℓ-th derivative at the body.
    pub fn eval_superanalytic(taylor: &[S], arg: &Self) -> Result<Self> {
        if !arg.is_even() {
            return Err(Error::OddArgument);
        }
        let n = arg.n;
        let soul = arg.soul();
        let mut out = Self::zero(n);
        let mut power = Self::one(n);
        let mut l = 0usize;
        while !power.is_zero() {
            let c = taylor.get(l).ok_or_else(|| {
                Error::Usage(format!("taylor data needs at least {} entries", l + 1))
            })?;
            out = &out + &power.scale(c);
            l += 1;
            let inv_l = S::from_i64(l as i64).inv().expect("nonzero factorial factor");
            power = (&power * &soul).scale(&inv_l);
        }
        Ok(out)
    }

    /// Multiplicative inverse; requires an invertible body.
    pub fn inverse(&self) -> Result<Self> {
        let b = self.body();
        let ib = b
            .inv()
            .ok_or_else(|| Error::Singular("Grassmann element with zero body".into()))?;
        // (b + s)^{-1} = b^{-1} Σ_k (−s b^{-1})^k; s may be mixed parity but is nilpotent.
        let u = self.soul().scale(&(-ib.clone()));
        let mut out = Self::zero(self.n);
        let mut p = Self::one(self.n);
        while !p.is_zero() {
            out = &out + &p;
            p = &p * &u;
        }
        Ok(out.scale(&ib))
    }

    /// Natural inclusion into an algebra with more generators.
    pub fn embed(&self, n_new: u8) -> Result<Self> {
        if n_new < self.n {
            return Err(Error::GeneratorMismatch { left: self.n, right: n_new });
        }
        Ok(GrassmannElement { n: n_new, terms: self.terms.clone() })
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GrassmannElement<T> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        GrassmannElement { n: self.n, terms }
    }

    pub fn max_modulus(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.modulus()).fold(0.0, f64::max)
    }

    /// JSON form `{"terms": [{"monomial": [..], "re": .., "im": ..}]}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let (re, im) = c.to_parts();
                json!({"monomial": mask_indices(*m), "re": re, "im": im})
            })
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(n: u8, v: &Value) -> Result<Self> {
        let bad = |s: &str| Error::Parse(format!("Grassmann JSON: {s}"));
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
        let mut out = Self::zero(n);
        for t in terms {
            let idx: Vec<usize> = t
                .get("monomial")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing monomial"))?
                .iter()
                .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| bad("bad index")))
                .collect::<Result<_>>()?;
            let part = |k: &str| -> String {
                match t.get(k) {
                    Some(Value::String(s)) => s.clone(),
                    Some(x @ Value::Number(_)) => x.to_string(),
                    _ => "0".into(),
                }
            };
            let c = S::from_parts(&part("re"), &part("im"))?;
            out = out.checked_add(&Self::monomial(n, &idx, c)?)?;
        }
        Ok(out)
    }
}

impl<S: Scalar> fmt::Debug for GrassmannElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for GrassmannElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let (re, im) = c.to_parts();
            let coef = if im == "0" || im == "0.0" { re } else { format!("({re}, {im})") };
            if *m == 0 {
                write!(f, "{coef}")?;
            } else {
                let mon: Vec<String> = mask_indices(*m).iter().map(|i| format!("z{i}")).collect();
                write!(f, "{coef}*{}", mon.join(""))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, S: Scalar> $tr<&'a GrassmannElement<S>> for &'a GrassmannElement<S> {
            type Output = GrassmannElement<S>;
            fn $method(self, rhs: &'a GrassmannElement<S>) -> GrassmannElement<S> {
                self.$checked(rhs).expect("Grassmann operands with different generator counts")
            }
        }
        impl<S: Scalar> $tr for GrassmannElement<S> {
            type Output = GrassmannElement<S>;
            fn $method(self, rhs: GrassmannElement<S>) -> GrassmannElement<S> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<S: Scalar> Neg for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;
    fn neg(self) -> GrassmannElement<S> {
        GrassmannElement {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}
impl<S: Scalar> Neg for GrassmannElement<S> {
    type Output = GrassmannElement<S>;
    fn neg(self) -> GrassmannElement<S> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type G = GrassmannElement<Rational>;

    fn z(i: usize) -> G {
        G::generator(4, i).unwrap()
    }
    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn anticommutation() {
        assert_eq!(&z(1) * &z(2), G::monomial(4, &[1, 2], q(1, 1)).unwrap());
        assert_eq!(&z(2) * &z(1), -G::monomial(4, &[1, 2], q(1, 1)).unwrap());
        assert!((&z(3) * &z(3)).is_zero());
    }

    #[test]
    fn square_of_one_plus_pair() {
        let x = &G::one(4) + &(&z(1) * &z(2));
        let expect = &G::one(4) + &G::monomial(4, &[1, 2], q(2, 1)).unwrap();
        assert_eq!(&x * &x, expect);
    }

    #[test]
    fn mismatched_counts_error() {
        let a = G::generator(2, 1).unwrap();
        let b = G::generator(3, 1).unwrap();
        assert!(matches!(a.checked_mul(&b), Err(Error::GeneratorMismatch { .. })));
        assert!(G::generator(2, 3).is_err());
    }

    #[test]
    fn berezin_conventions() {
        assert_eq!(z(1).berezin(1).unwrap(), G::one(4));
        assert!(G::one(4).berezin(1).unwrap().is_zero());
        let z21 = &z(2) * &z(1);
        let z12 = &z(1) * &z(2);
        assert_eq!(z21.berezin_seq(&[1, 2]).unwrap(), G::one(4));
        assert_eq!(z12.berezin_seq(&[2, 1]).unwrap(), G::one(4));
        assert!(z(1).berezin(5).is_err());
    }

    #[test]
    fn superanalytic_examples() {
        let s = &z(1) * &z(2);
        let two_s = &G::scalar(4, q(2, 1)) + &s;
        // f(z) = z^2: derivatives 4, 4, 2
        let sq = G::eval_superanalytic(&[q(4, 1), q(4, 1), q(2, 1)], &two_s).unwrap();
        assert_eq!(sq, &G::scalar(4, q(4, 1)) + &s.scale(&q(4, 1)));
        let one_s = &G::one(4) + &s;
        let inv = G::eval_superanalytic(&[q(1, 1), q(-1, 1), q(2, 1)], &one_s).unwrap();
        assert_eq!(inv, &G::one(4) - &s);
        assert_eq!(one_s.inverse().unwrap(), inv);
        assert!(matches!(G::eval_superanalytic(&[q(1, 1)], &z(1)), Err(Error::OddArgument)));
    }

    #[test]
    fn json_round_trip() {
        let x = &G::scalar(4, q(-3, 7)) + &G::monomial(4, &[2, 4], q(5, 2)).unwrap();
        let v = x.to_json();
        assert_eq!(v["terms"][1]["monomial"], serde_json::json!([2, 4]));
        assert_eq!(v["terms"][1]["re"], "5/2");
        assert_eq!(G::from_json(4, &v).unwrap(), x);
    }
}
