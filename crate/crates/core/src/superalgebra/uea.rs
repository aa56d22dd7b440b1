//! Enveloping-algebra elements with Grassmann coefficients and PBW normal ordering.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::Rational;

use super::symbols::{bracket, Algebra, GeneratorSymbol};

pub type Monomial = Vec<GeneratorSymbol>;
type GE = GrassmannElement<Rational>;

/// Number of odd generators in a monomial, mod 2.
pub fn monomial_is_odd(m: &[GeneratorSymbol]) -> bool {
    m.iter().filter(|g| g.is_odd()).count() % 2 == 1
}

/// Twice the total mode of a monomial (negated level).
pub fn monomial_mode2(m: &[GeneratorSymbol]) -> i32 {
    m.iter().map(|g| g.mode2).sum()
}

pub fn monomial_to_string(m: &[GeneratorSymbol]) -> String {
    if m.is_empty() {
        "1".into()
    } else {
        m.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
    }
}

/// Parses `"L-2 L-1 G-1/2"`; `"1"` or the empty string is the unit monomial.
pub fn parse_monomial(s: &str) -> Result<Monomial> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(Vec::new());
    }
    s.split_whitespace().map(|t| t.parse()).collect()
}

/// Position of the first adjacent pair violating PBW order, if any.
fn first_disorder(m: &[GeneratorSymbol]) -> Option<usize> {
    m.windows(2).position(|w| w[0] > w[1] || (w[0] == w[1] && w[0].is_odd()))
}

pub fn is_pbw_ordered(m: &[GeneratorSymbol]) -> bool {
    first_disorder(m).is_none()
}

/// Rewrites a single monomial into PBW order over the rationals.
pub fn normal_order_monomial(m: &[GeneratorSymbol], alg: Algebra) -> Result<BTreeMap<Monomial, Rational>> {
    for g in m {
        alg.check(g)?;
    }
    let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
    let mut work: Vec<(Monomial, Rational)> = vec![(m.to_vec(), Rational::integer(1))];
    let half = Rational::new(1, 2);
    while let Some((m, c)) = work.pop() {
        let Some(i) = first_disorder(&m) else {
            add_to(&mut out, m, c);
            continue;
        };
        let (x, y) = (m[i], m[i + 1]);
        let splice = |mid: &[GeneratorSymbol]| {
            let mut v = Vec::with_capacity(m.len());
            v.extend_from_slice(&m[..i]);
            v.extend_from_slice(mid);
            v.extend_from_slice(&m[i + 2..]);
            v
        };
        if x == y {
            // odd square: xx = ½[x, x]
            for (g, k) in bracket(&x, &x, alg)? {
                work.push((splice(&[g]), c.clone() * k * half.clone()));
            }
        } else {
            let sign = if x.is_odd() && y.is_odd() { -1 } else { 1 };
            work.push((splice(&[y, x]), c.clone() * Rational::integer(sign)));
            for (g, k) in bracket(&x, &y, alg)? {
                work.push((splice(&[g]), c.clone() * k));
            }
        }
    }
    Ok(out)
}

fn add_to(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(e) => {
            if c.signum() != 0 {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            let v = e.get().clone() + c;
            if v.signum() == 0 {
                e.remove();
            } else {
                e.insert(v);
            }
        }
    }
}

/// Formal sum `Σ q_M M` with Grassmann coefficients written to the left of each monomial.
#[derive(Clone, PartialEq)]
pub struct UEAElement {
    algebra: Algebra,
    n_gen: u8,
    terms: BTreeMap<Monomial, GE>,
}

impl UEAElement {
    pub fn zero(algebra: Algebra, n_gen: u8) -> Self {
        UEAElement { algebra, n_gen, terms: BTreeMap::new() }
    }

    pub fn one(algebra: Algebra, n_gen: u8) -> Self {
        Self::monomial(algebra, Vec::new(), GE::one(n_gen)).expect("empty monomial is valid")
    }

    pub fn generator(algebra: Algebra, n_gen: u8, g: GeneratorSymbol) -> Result<Self> {
        Self::monomial(algebra, vec![g], GE::one(n_gen))
    }

    /// `coeff · m`, stored as written (call [`normal_order`](Self::normal_order) for canonical form).
    pub fn monomial(algebra: Algebra, m: Monomial, coeff: GE) -> Result<Self> {
        for g in &m {
            algebra.check(g)?;
        }
        let n_gen = coeff.num_generators();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(m, coeff);
        }
        Ok(UEAElement { algebra, n_gen, terms })
    }

    /// Rational combination of monomials given as strings, e.g. `[("L-2", 1), ("L-1 L-1", -3)]`.
    pub fn from_rational_terms(algebra: Algebra, n_gen: u8, terms: &[(&str, Rational)]) -> Result<Self> {
        let mut out = Self::zero(algebra, n_gen);
        for (s, c) in terms {
            let m = parse_monomial(s)?;
            out = out.add(&Self::monomial(algebra, m, GE::scalar(n_gen, c.clone()))?)?;
        }
        Ok(out)
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }
    pub fn num_generators(&self) -> u8 {
        self.n_gen
    }
    pub fn terms(&self) -> &BTreeMap<Monomial, GE> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, m: &[GeneratorSymbol]) -> GE {
        self.terms.get(m).cloned().unwrap_or_else(|| GE::zero(self.n_gen))
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::Usage(format!(
                "algebra mismatch: {} vs {}",
                self.algebra.name(),
                other.algebra.name()
            )));
        }
        if self.n_gen != other.n_gen {
            return Err(Error::GeneratorMismatch { left: self.n_gen, right: other.n_gen });
        }
        Ok(())
    }

    fn insert(&mut self, m: Monomial, c: GE) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    e.insert(v);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::integer(-1))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.scale(s));
        }
        out
    }

    /// Left multiplication of every coefficient by a Grassmann element.
    pub fn mul_scalar_left(&self, q: &GE) -> Result<Self> {
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m, c) in &self.terms {
            out.insert(m.clone(), q.checked_mul(c)?);
        }
        Ok(out)
    }

    /// Product with the rule `(q M)(q' M') = q·ι^{|M|}(q') M M'`, ι the grade involution.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m1, c1) in &self.terms {
            let odd = monomial_is_odd(m1);
            for (m2, c2) in &other.terms {
                let c2 = if odd { c2.involution() } else { c2.clone() };
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.insert(m, c1.checked_mul(&c2)?);
            }
        }
        Ok(out)
    }

    /// Canonical PBW form.
    pub fn normal_order(&self) -> Result<Self> {
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m, c) in &self.terms {
            for (m2, k) in normal_order_monomial(m, self.algebra)? {
                out.insert(m2, c.scale(&k));
            }
        }
        Ok(out)
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.keys().all(|m| is_pbw_ordered(m))
    }

    /// Even when every term has even total parity (coefficient parity plus monomial parity).
    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|(m, c)| {
            if monomial_is_odd(m) {
                c.is_odd()
            } else {
                c.is_even()
            }
        })
    }

    /// Coefficients with every Grassmann generator set to zero.
    pub fn body(&self) -> Self {
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m, c) in &self.terms {
            out.insert(m.clone(), GE::scalar(self.n_gen, c.body()));
        }
        out
    }
}

impl fmt::Display for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})*[{}]", monomial_to_string(m)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UEAElement[{}]({self})", self.algebra.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeneratorSymbol as X;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn single_swap() {
        let r = normal_order_monomial(&[X::L(-1), X::L(-2)], Algebra::Virasoro).unwrap();
        let mut want = BTreeMap::new();
        want.insert(vec![X::L(-2), X::L(-1)], q(1, 1));
        want.insert(vec![X::L(-3)], q(1, 1));
        assert_eq!(r, want);
    }

    #[test]
    fn odd_square_is_half_bracket() {
        let r = normal_order_monomial(&[X::G(-1), X::G(-1)], Algebra::Ns1).unwrap();
        let mut want = BTreeMap::new();
        want.insert(vec![X::L(-1)], q(1, 1));
        assert_eq!(r, want);
    }

    #[test]
    fn ordered_is_fixed() {
        let m = vec![X::L(-2), X::G(-3), X::L(-1), X::G(-1)];
        let r = normal_order_monomial(&m, Algebra::Ns1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[&m], q(1, 1));
    }
}
