//! Verma modules over the rationals, vectors with Grassmann coefficients, singular-vector checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::Rational;

use super::symbols::{bracket, Algebra, Family, GeneratorSymbol};
use super::uea::{monomial_is_odd, monomial_mode2, monomial_to_string, parse_monomial, Monomial, UEAElement};

type GE = GrassmannElement<Rational>;
type Rmap = BTreeMap<Monomial, Rational>;

/// Highest-weight data: central charge, `L₀` weight and (N=2 only) `J₀` charge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weights {
    pub c: Rational,
    pub h: Rational,
    pub alpha: Rational,
}

impl Weights {
    pub fn new(c: Rational, h: Rational) -> Self {
        Weights { c, h, alpha: Rational::integer(0) }
    }
    pub fn with_alpha(c: Rational, h: Rational, alpha: Rational) -> Self {
        Weights { c, h, alpha }
    }
}

/// `M(c, h[, α])` with a memoized action of single generators on PBW monomials.
pub struct VermaModule {
    algebra: Algebra,
    weights: Weights,
    cache: Mutex<HashMap<(GeneratorSymbol, Monomial), Arc<Rmap>>>,
}

impl Clone for VermaModule {
    fn clone(&self) -> Self {
        VermaModule::new(self.algebra, self.weights.clone())
    }
}

impl fmt::Debug for VermaModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VermaModule").field("algebra", &self.algebra).field("weights", &self.weights).finish()
    }
}

fn add_r(map: &mut Rmap, m: Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    if c.signum() == 0 {
        return;
    }
    match map.entry(m) {
        Entry::Vacant(e) => {
            e.insert(c);
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

impl VermaModule {
    pub fn new(algebra: Algebra, weights: Weights) -> Self {
        VermaModule { algebra, weights, cache: Mutex::new(HashMap::new()) }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }
    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// The highest-weight vector with `n_gen` Grassmann generators available for coefficients.
    pub fn highest_weight(&self, n_gen: u8) -> VermaVector {
        VermaVector::basis_vector(self.algebra, n_gen, Vec::new())
    }

    /// `x · m|hw⟩` for a single generator, expanded in the PBW basis.
    pub fn act_generator(&self, x: GeneratorSymbol, m: &[GeneratorSymbol]) -> Result<Arc<Rmap>> {
        self.algebra.check(&x)?;
        let key = (x, m.to_vec());
        if let Some(r) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(r.clone());
        }
        // computed without the lock held: the recursion re-enters the cache
        let r = Arc::new(self.compute(x, m)?);
        self.cache.lock().expect("cache lock").insert(key, r.clone());
        Ok(r)
    }

    fn compute(&self, x: GeneratorSymbol, m: &[GeneratorSymbol]) -> Result<Rmap> {
        let mut out = Rmap::new();
        if x.family == Family::C {
            add_r(&mut out, m.to_vec(), self.weights.c.clone());
            return Ok(out);
        }
        let Some((&y, rest)) = m.split_first() else {
            match (x.mode2.signum(), x.family) {
                (1, _) => {}
                (0, Family::L) => add_r(&mut out, Vec::new(), self.weights.h.clone()),
                (0, Family::J) => add_r(&mut out, Vec::new(), self.weights.alpha.clone()),
                (0, _) => {}
                _ => add_r(&mut out, vec![x], Rational::integer(1)),
            }
            return Ok(out);
        };
        if x.mode2 < 0 && (x < y || (x == y && !x.is_odd())) {
            let mut v = Vec::with_capacity(m.len() + 1);
            v.push(x);
            v.extend_from_slice(m);
            add_r(&mut out, v, Rational::integer(1));
            return Ok(out);
        }
        if x == y && x.is_odd() {
            let half = Rational::new(1, 2);
            for (g, k) in bracket(&x, &x, self.algebra)? {
                for (n, k2) in self.act_generator(g, rest)?.iter() {
                    add_r(&mut out, n.clone(), k.clone() * k2.clone() * half.clone());
                }
            }
            return Ok(out);
        }
        // x y rest = ± y (x rest) + [x, y] rest
        let sign = Rational::integer(if x.is_odd() && y.is_odd() { -1 } else { 1 });
        for (n, k) in self.act_generator(x, rest)?.iter() {
            for (n2, k2) in self.act_generator(y, n)?.iter() {
                add_r(&mut out, n2.clone(), sign.clone() * k.clone() * k2.clone());
            }
        }
        for (g, k) in bracket(&x, &y, self.algebra)? {
            for (n, k2) in self.act_generator(g, rest)?.iter() {
                add_r(&mut out, n.clone(), k.clone() * k2.clone());
            }
        }
        Ok(out)
    }

    /// Applies a monomial (right to left) to a PBW basis vector.
    pub fn act_monomial(&self, word: &[GeneratorSymbol], m: &[GeneratorSymbol]) -> Result<Rmap> {
        let mut cur = Rmap::new();
        cur.insert(m.to_vec(), Rational::integer(1));
        for g in word.iter().rev() {
            let mut next = Rmap::new();
            for (n, k) in &cur {
                for (n2, k2) in self.act_generator(*g, n)?.iter() {
                    add_r(&mut next, n2.clone(), k.clone() * k2.clone());
                }
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        Ok(cur)
    }

    /// `x · v` with the sign rule `(qM)(c m) = q·ι^{|M|}(c)·M m`.
    pub fn act(&self, x: &UEAElement, v: &VermaVector) -> Result<VermaVector> {
        if x.algebra() != self.algebra || v.algebra != self.algebra {
            return Err(Error::Usage(format!(
                "algebra mismatch: element {}, vector {}, module {}",
                x.algebra().name(),
                v.algebra.name(),
                self.algebra.name()
            )));
        }
        if x.num_generators() != v.n_gen {
            return Err(Error::GeneratorMismatch { left: x.num_generators(), right: v.n_gen });
        }
        let mut out = VermaVector::zero(self.algebra, v.n_gen);
        for (word, q) in x.terms() {
            let odd = monomial_is_odd(word);
            for (m, c) in &v.terms {
                let c = if odd { c.involution() } else { c.clone() };
                let qc = q.checked_mul(&c)?;
                if qc.is_zero() {
                    continue;
                }
                for (n, k) in self.act_monomial(word, m)? {
                    out.insert(n, qc.scale(&k));
                }
            }
        }
        Ok(out)
    }

    /// Single generator acting on a vector.
    pub fn act_gen_on(&self, g: GeneratorSymbol, v: &VermaVector) -> Result<VermaVector> {
        self.act(&UEAElement::generator(self.algebra, v.n_gen, g)?, v)
    }

    /// PBW basis of all levels `≤ level2_max / 2`, sorted by level, then monomial.
    pub fn basis(&self, level2_max: i32) -> Vec<Monomial> {
        pbw_basis(self.algebra, level2_max)
    }

    /// Applies the annihilator generating set; passes iff every image vanishes.
    pub fn is_singular(&self, v: &VermaVector) -> Result<SingularReport> {
        let level2 = v.level2().ok_or(Error::NonHomogeneous)?;
        let mut checks = Vec::new();
        let mut witness = None;
        for g in self.algebra.annihilators() {
            let img = self.act_gen_on(g, v)?;
            let ok = img.is_zero();
            if !ok && witness.is_none() {
                witness = Some((g, img.clone()));
            }
            checks.push((g, img));
        }
        let nonzero = !v.is_zero();
        Ok(SingularReport { pass: nonzero && witness.is_none(), level2, nonzero, checks, witness })
    }
}

/// PBW monomials in the lowering generators, levels `≤ level2_max / 2`.
pub fn pbw_basis(algebra: Algebra, level2_max: i32) -> Vec<Monomial> {
    let mut gens: Vec<GeneratorSymbol> = Vec::new();
    for &fam in algebra.lowering_families() {
        let mut k = 1;
        while k <= level2_max {
            let g = GeneratorSymbol { family: fam, mode2: -k };
            if g.well_formed() {
                gens.push(g);
            }
            k += 1;
        }
    }
    gens.sort();
    let mut out = Vec::new();
    fn rec(gens: &[GeneratorSymbol], start: usize, left: i32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        out.push(cur.clone());
        for i in start..gens.len() {
            let g = gens[i];
            if -g.mode2 > left {
                continue;
            }
            cur.push(g);
            let next = if g.is_odd() { i + 1 } else { i };
            rec(gens, next, left + g.mode2, cur, out);
            cur.pop();
        }
    }
    rec(&gens, 0, level2_max, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| (-monomial_mode2(a), a).cmp(&(-monomial_mode2(b), b)));
    out
}

/// Result of [`VermaModule::is_singular`].
#[derive(Clone, Debug)]
pub struct SingularReport {
    pub pass: bool,
    pub level2: i32,
    pub nonzero: bool,
    /// Image of the vector under each annihilator.
    pub checks: Vec<(GeneratorSymbol, VermaVector)>,
    /// First annihilator with a nonzero image.
    pub witness: Option<(GeneratorSymbol, VermaVector)>,
}

impl SingularReport {
    pub fn transcript(&self) -> Vec<String> {
        self.checks.iter().map(|(g, img)| format!("{g} -> {img}")).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "level": self.level2 as f64 / 2.0,
            "nonzero": self.nonzero,
            "checks": self.checks.iter().map(|(g, img)| json!({
                "generator": g.to_string(),
                "image": img.to_json(),
                "vanishes": img.is_zero(),
            })).collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(|(g, _)| g.to_string()),
        })
    }
}

/// `Σ c_m · m|hw⟩` with Grassmann coefficients to the left of each PBW monomial.
#[derive(Clone, PartialEq)]
pub struct VermaVector {
    algebra: Algebra,
    n_gen: u8,
    terms: BTreeMap<Monomial, GE>,
}

impl VermaVector {
    pub fn zero(algebra: Algebra, n_gen: u8) -> Self {
        VermaVector { algebra, n_gen, terms: BTreeMap::new() }
    }

    pub fn basis_vector(algebra: Algebra, n_gen: u8, m: Monomial) -> Self {
        let mut v = Self::zero(algebra, n_gen);
        v.insert(m, GE::one(n_gen));
        v
    }

    /// Builds `Σ c_i m_i|hw⟩` from rational coefficients; monomials are normal ordered first.
    pub fn from_rational_terms(algebra: Algebra, terms: &[(&str, Rational)]) -> Result<Self> {
        let x = UEAElement::from_rational_terms(algebra, 0, terms)?.normal_order()?;
        let mut v = Self::zero(algebra, 0);
        for (m, c) in x.terms() {
            if m.iter().any(|g| g.mode2 >= 0) {
                return Err(Error::Usage(format!(
                    "monomial '{}' is not a lowering monomial",
                    monomial_to_string(m)
                )));
            }
            v.insert(m.clone(), c.clone());
        }
        Ok(v)
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

    pub(crate) fn insert(&mut self, m: Monomial, c: GE) {
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

    /// Twice the common level, or `None` if the vector is not level-homogeneous.
    /// The zero vector counts as level 0.
    pub fn level2(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|m| -monomial_mode2(m));
        let first = it.next().unwrap_or(0);
        it.all(|l| l == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::Usage("vectors from different algebras".into()));
        }
        if self.n_gen != other.n_gen {
            return Err(Error::GeneratorMismatch { left: self.n_gen, right: other.n_gen });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.scale(s));
        }
        out
    }

    /// Left multiplication of each coefficient by a Grassmann element.
    pub fn mul_scalar_left(&self, q: &GE) -> Result<Self> {
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m, c) in &self.terms {
            out.insert(m.clone(), q.checked_mul(c)?);
        }
        Ok(out)
    }

    /// Right multiplication of coefficients by `w`, i.e. `v ⊗ w` with `w` even.
    pub fn mul_scalar_right(&self, w: &GE) -> Result<Self> {
        let mut out = Self::zero(self.algebra, self.n_gen);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.checked_mul(w)?);
        }
        Ok(out)
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, n_gen: u8, f: impl Fn(&GE) -> Result<GE>) -> Result<Self> {
        let mut out = Self::zero(self.algebra, n_gen);
        for (m, c) in &self.terms {
            out.insert(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Berezin integral of every coefficient, rightmost index first; drops to zero generators
    /// when the result is a pure scalar.
    pub fn berezin_seq(&self, indices: &[usize]) -> Result<Self> {
        self.map_coeffs(self.n_gen, |c| c.berezin_seq(indices))
    }

    /// Rational coefficients, if every coefficient is a pure scalar.
    pub fn rational_coeffs(&self) -> Option<BTreeMap<Monomial, Rational>> {
        self.terms.iter().map(|(m, c)| c.is_scalar().then(|| (m.clone(), c.body()))).collect()
    }

    /// Same vector with coefficients viewed over zero generators (requires scalar coefficients).
    pub fn to_scalar_vector(&self) -> Result<Self> {
        let r = self
            .rational_coeffs()
            .ok_or_else(|| Error::Usage("vector has non-scalar coefficients".into()))?;
        let mut out = Self::zero(self.algebra, 0);
        for (m, c) in r {
            out.insert(m, GE::scalar(0, c));
        }
        Ok(out)
    }

    /// `Some(λ)` with `self = λ·other` (exact), `None` otherwise.
    pub fn proportionality(&self, other: &Self) -> Option<Rational> {
        let a = self.rational_coeffs()?;
        let b = other.rational_coeffs()?;
        if b.is_empty() {
            return a.is_empty().then(|| Rational::integer(0));
        }
        let (m0, b0) = b.iter().next()?;
        let lambda = a.get(m0).cloned().unwrap_or_else(|| Rational::integer(0)) / b0.clone();
        let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
        for k in keys {
            let x = a.get(k).cloned().unwrap_or_else(|| Rational::integer(0));
            let y = b.get(k).cloned().unwrap_or_else(|| Rational::integer(0));
            if x != lambda.clone() * y {
                return None;
            }
        }
        Some(lambda)
    }

    /// `{"monomial string": grassmann json}`.
    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (m, c) in &self.terms {
            map.insert(monomial_to_string(m), c.to_json());
        }
        json!({ "algebra": self.algebra.name(), "generators": self.n_gen, "terms": Value::Object(map) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let alg = match v["algebra"].as_str() {
            Some(s) => super::parse_algebra(s)?,
            None => return Err(Error::Parse("missing 'algebra'".into())),
        };
        let n = v["generators"].as_u64().unwrap_or(0) as u8;
        let mut out = Self::zero(alg, n);
        let terms = v["terms"].as_object().ok_or_else(|| Error::Parse("missing 'terms'".into()))?;
        for (k, c) in terms {
            let m = parse_monomial(k)?;
            for g in &m {
                alg.check(g)?;
            }
            out.insert(m, GE::from_json(n, c)?);
        }
        Ok(out)
    }
}

impl fmt::Display for VermaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})*{}|hw>", if m.is_empty() { String::new() } else { monomial_to_string(m) + " " }))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for VermaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VermaVector({self})")
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
    fn basis_sizes() {
        let sizes = |alg, l2| {
            let b = pbw_basis(alg, l2);
            let mut count = BTreeMap::new();
            for m in &b {
                *count.entry(-monomial_mode2(m)).or_insert(0) += 1;
            }
            count.into_values().collect::<Vec<_>>()
        };
        // partitions 1,1,2,3,5
        assert_eq!(sizes(Algebra::Virasoro, 8), vec![1, 1, 2, 3, 5]);
        // NS characters: 1,1,1,2,3,4,5
        assert_eq!(sizes(Algebra::Ns1, 6), vec![1, 1, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn zero_mode_eigenvalues() {
        let m = VermaModule::new(Algebra::Virasoro, Weights::new(q(1, 2), q(3, 7)));
        let hw = m.highest_weight(0);
        let v = m.act_gen_on(X::L(0), &hw).unwrap();
        assert_eq!(v, hw.scale(&q(3, 7)));
        let l1 = m.act_gen_on(X::L(-1), &hw).unwrap();
        let back = m.act_gen_on(X::L(1), &l1).unwrap();
        assert_eq!(back, hw.scale(&q(6, 7)));
    }
}
