//! Truncated Laurent series in `z` with Grassmann coefficients.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::Scalar;

/// Where a series is expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Expansion {
    /// Series in `z` tracked down to `z^{-K}`, error `O(z^{-K-1})`.
    Infinity,
    /// Series in `z` tracked up to `z^{K}`, error `O(z^{K+1})`.
    Zero,
}

impl Expansion {
    pub fn tag(self) -> &'static str {
        match self {
            Expansion::Infinity => "inf",
            Expansion::Zero => "0",
        }
    }
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" => Ok(Expansion::Infinity),
            "0" | "zero" => Ok(Expansion::Zero),
            _ => Err(Error::Parse(format!("unknown expansion point '{s}'"))),
        }
    }
}

/// Saturating cap used for "exact" truncation orders.
pub const EXACT_TRUNC: i64 = i64::MAX / 4;

type G<S> = GrassmannElement<S>;

#[derive(Clone, PartialEq)]
pub struct PowerSeries<S: Scalar> {
    n_gen: u8,
    point: Expansion,
    trunc: i64,
    coeffs: BTreeMap<i64, G<S>>,
}

impl<S: Scalar> std::fmt::Debug for PowerSeries<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PowerSeries[{}, K={}](", self.point.tag(), self.trunc)?;
        for (k, (e, c)) in self.coeffs.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})z^{e}")?;
        }
        write!(f, ")")
    }
}

impl<S: Scalar> PowerSeries<S> {
    pub fn zero(n_gen: u8, point: Expansion, trunc: i64) -> Self {
        PowerSeries { n_gen, point, trunc, coeffs: BTreeMap::new() }
    }

    /// `c · z^e`.
    pub fn monomial(c: G<S>, e: i64, point: Expansion, trunc: i64) -> Self {
        let mut s = Self::zero(c.num_generators(), point, trunc);
        s.insert(e, c);
        s
    }

    /// The series `z`.
    pub fn variable(n_gen: u8, point: Expansion, trunc: i64) -> Self {
        Self::monomial(G::one(n_gen), 1, point, trunc)
    }

    pub fn constant(c: G<S>, point: Expansion, trunc: i64) -> Self {
        Self::monomial(c, 0, point, trunc)
    }

    pub fn from_coeffs(
        n_gen: u8,
        point: Expansion,
        trunc: i64,
        coeffs: impl IntoIterator<Item = (i64, G<S>)>,
    ) -> Result<Self> {
        let mut s = Self::zero(n_gen, point, trunc);
        for (e, c) in coeffs {
            if c.num_generators() != n_gen {
                return Err(Error::GeneratorMismatch { left: n_gen, right: c.num_generators() });
            }
            let cur = s.coeff(e);
            s.insert(e, &cur + &c);
        }
        Ok(s)
    }

    pub fn num_generators(&self) -> u8 {
        self.n_gen
    }
    pub fn point(&self) -> Expansion {
        self.point
    }
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Whether exponent `e` lies inside the tracked window.
    pub fn tracks(&self, e: i64) -> bool {
        Self::tracks_at(self.point, self.trunc, e)
    }

    fn tracks_at(point: Expansion, trunc: i64, e: i64) -> bool {
        match point {
            Expansion::Infinity => e >= -trunc,
            Expansion::Zero => e <= trunc,
        }
    }

    fn insert(&mut self, e: i64, c: G<S>) {
        if c.is_zero() || !self.tracks(e) {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    pub fn coeff(&self, e: i64) -> G<S> {
        self.coeffs.get(&e).cloned().unwrap_or_else(|| G::zero(self.n_gen))
    }

    pub fn coeffs(&self) -> impl DoubleEndedIterator<Item = (&i64, &G<S>)> {
        self.coeffs.iter()
    }

    pub fn top_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn low_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Restricts to a (possibly tighter) truncation order.
    pub fn with_trunc(&self, k: i64) -> Self {
        let k = k.min(self.trunc);
        let mut s = Self::zero(self.n_gen, self.point, k);
        for (e, c) in &self.coeffs {
            s.insert(*e, c.clone());
        }
        s
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        if self.point != o.point {
            return Err(Error::ExpansionMismatch(format!(
                "{} vs {}",
                self.point.tag(),
                o.point.tag()
            )));
        }
        if self.n_gen != o.n_gen {
            return Err(Error::GeneratorMismatch { left: self.n_gen, right: o.n_gen });
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut s = self.with_trunc(o.trunc);
        for (e, c) in &o.coeffs {
            if s.tracks(*e) {
                let cur = s.coeff(*e);
                s.insert(*e, &cur + c);
            }
        }
        Ok(s)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    /// Applies a linear map to every coefficient, keeping the truncation.
    pub fn map_coeffs(&self, f: impl Fn(&G<S>) -> G<S>) -> Self {
        let mut s = Self::zero(self.n_gen, self.point, self.trunc);
        for (e, c) in &self.coeffs {
            s.insert(*e, f(c));
        }
        s
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    /// `c · self` with `c` a Grassmann constant multiplied on the left.
    pub fn mul_left(&self, c: &G<S>) -> Result<Self> {
        if c.num_generators() != self.n_gen {
            return Err(Error::GeneratorMismatch { left: self.n_gen, right: c.num_generators() });
        }
        Ok(self.map_coeffs(|x| c * x))
    }

    /// `self · c`.
    pub fn mul_right(&self, c: &G<S>) -> Result<Self> {
        if c.num_generators() != self.n_gen {
            return Err(Error::GeneratorMismatch { left: self.n_gen, right: c.num_generators() });
        }
        Ok(self.map_coeffs(|x| x * c))
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        let trunc = match self.point {
            Expansion::Infinity => self.trunc.saturating_sub(k),
            Expansion::Zero => self.trunc.saturating_add(k),
        };
        let mut s = Self::zero(self.n_gen, self.point, trunc);
        for (e, c) in &self.coeffs {
            s.insert(e + k, c.clone());
        }
        s
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let trunc = match self.point {
            Expansion::Infinity => {
                let a = o.top_exp().map_or(EXACT_TRUNC, |d| self.trunc.saturating_sub(d));
                let b = self.top_exp().map_or(EXACT_TRUNC, |d| o.trunc.saturating_sub(d));
                a.min(b)
            }
            Expansion::Zero => {
                let a = o.low_exp().map_or(EXACT_TRUNC, |l| self.trunc.saturating_add(l));
                let b = self.low_exp().map_or(EXACT_TRUNC, |l| o.trunc.saturating_add(l));
                a.min(b)
            }
        }
        .min(EXACT_TRUNC);
        let mut acc: BTreeMap<i64, G<S>> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &o.coeffs {
                let e = ea + eb;
                if !Self::tracks_at(self.point, trunc, e) {
                    continue;
                }
                let p = ca * cb;
                if p.is_zero() {
                    continue;
                }
                match acc.get_mut(&e) {
                    Some(x) => *x = &*x + &p,
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        let mut s = Self::zero(self.n_gen, self.point, trunc);
        for (e, c) in acc {
            s.insert(e, c);
        }
        Ok(s)
    }

    pub fn derivative(&self) -> Self {
        let trunc = match self.point {
            Expansion::Infinity => self.trunc.saturating_add(1),
            Expansion::Zero => self.trunc.saturating_sub(1),
        }
        .min(EXACT_TRUNC);
        let mut s = Self::zero(self.n_gen, self.point, trunc);
        for (e, c) in &self.coeffs {
            if *e != 0 {
                s.insert(e - 1, c.scale(&S::from_i64(*e)));
            }
        }
        s
    }

    /// Leading coefficient at the expansion point and its exponent.
    pub fn leading(&self) -> Option<(i64, G<S>)> {
        let e = match self.point {
            Expansion::Infinity => self.top_exp()?,
            Expansion::Zero => self.low_exp()?,
        };
        Some((e, self.coeff(e)))
    }

    /// Multiplicative inverse; the leading coefficient must have nonzero body.
    pub fn recip(&self) -> Result<Self> {
        let (m, lead) = self
            .leading()
            .ok_or_else(|| Error::Singular("reciprocal of a zero series".into()))?;
        let linv = lead
            .inverse()
            .map_err(|_| Error::Singular("leading coefficient has zero body".into()))?;
        let n = self.n_gen;
        let (trunc, step): (i64, i64) = match self.point {
            Expansion::Infinity => (self.trunc.saturating_add(2 * m), -1),
            Expansion::Zero => (self.trunc.saturating_sub(2 * m), 1),
        };
        if trunc >= EXACT_TRUNC / 2 {
            return Err(Error::Usage("reciprocal of an untruncated series needs a finite order".into()));
        }
        let mut r = Self::zero(n, self.point, trunc);
        // a · r = 1, solved from the leading exponent outwards.
        let mut e = -m;
        while Self::tracks_at(self.point, trunc, e) {
            let target = e + m; // exponent of the product being fixed
            let mut rhs = if target == 0 { G::one(n) } else { G::zero(n) };
            for (ea, ca) in &self.coeffs {
                if *ea == m {
                    continue;
                }
                let other = target - ea;
                if let Some(rc) = r.coeffs.get(&other) {
                    rhs = &rhs - &(ca * rc);
                }
            }
            let c = &linv * &rhs;
            r.insert(e, c);
            e += step;
        }
        Ok(r)
    }

    /// Integer power; negative exponents go through [`PowerSeries::recip`].
    pub fn powi(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut acc = Self::monomial(G::one(self.n_gen), 0, self.point, EXACT_TRUNC);
        for _ in 0..k.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    /// Composition `self ∘ rho` (coefficients of `self` stay on the left).
    pub fn compose(&self, rho: &Self) -> Result<Self> {
        self.compatible(rho)?;
        match self.point {
            Expansion::Infinity => self.compose_inf(rho),
            Expansion::Zero => self.compose_zero(rho),
        }
    }

    fn compose_inf(&self, rho: &Self) -> Result<Self> {
        let (d, lead) = rho
            .leading()
            .ok_or_else(|| Error::Singular("composition with a zero series".into()))?;
        if d < 1 || lead.body().is_zero() {
            return Err(Error::Singular(
                "inner series must grow at infinity with invertible leading coefficient".into(),
            ));
        }
        let own = self.trunc.saturating_add(1).saturating_mul(d).saturating_sub(1);
        let mut out = Self::zero(self.n_gen, self.point, own.min(EXACT_TRUNC));
        let mut pos = Self::monomial(G::one(self.n_gen), 0, self.point, EXACT_TRUNC);
        let mut neg: Option<(Self, Self)> = None;
        let top = self.top_exp().unwrap_or(0);
        let low = self.low_exp().unwrap_or(0);
        let mut powers: BTreeMap<i64, Self> = BTreeMap::new();
        for k in 0..=top.max(0) {
            if k > 0 {
                pos = pos.checked_mul(rho)?;
            }
            powers.insert(k, pos.clone());
        }
        for k in (low.min(0)..0).rev() {
            let (inv, cur) = match neg.take() {
                None => {
                    let inv = rho.recip()?;
                    (inv.clone(), inv)
                }
                Some((inv, cur)) => {
                    let next = cur.checked_mul(&inv)?;
                    (inv, next)
                }
            };
            powers.insert(k, cur.clone());
            neg = Some((inv, cur));
        }
        for (e, c) in &self.coeffs {
            out = out.checked_add(&powers[e].mul_left(c)?)?;
        }
        Ok(out)
    }

    fn compose_zero(&self, rho: &Self) -> Result<Self> {
        let c0 = rho.coeff(0);
        if !c0.body().is_zero() {
            return Err(Error::Singular("inner series at 0 must vanish at the origin (up to soul)".into()));
        }
        if !c0.is_even() {
            return Err(Error::OddArgument);
        }
        let mut w = rho.clone();
        w.coeffs.remove(&0);
        let lw = w
            .low_exp()
            .ok_or_else(|| Error::Singular("inner series has no z-dependence".into()))?;
        if lw < 1 {
            return Err(Error::Singular("inner series at 0 has a pole".into()));
        }
        // Σ_k σ^{(k)}(w) c0^k / k!, finite because c0 is nilpotent.
        let mut out: Option<Self> = None;
        let mut deriv = self.clone();
        let mut cpow = G::one(self.n_gen);
        let mut k = 0i64;
        while !cpow.is_zero() {
            let term = deriv.compose_zero_pure(&w, lw)?.mul_right(&cpow)?;
            out = Some(match out {
                None => term,
                Some(o) => o.checked_add(&term)?,
            });
            k += 1;
            deriv = deriv.derivative();
            cpow = (&cpow * &c0).scale(&S::from_i64(k).inv().expect("nonzero"));
        }
        Ok(out.expect("at least one term"))
    }

    fn compose_zero_pure(&self, w: &Self, lw: i64) -> Result<Self> {
        let own = self.trunc.saturating_add(1).saturating_mul(lw).saturating_sub(1);
        let mut out = Self::zero(self.n_gen, self.point, own.min(EXACT_TRUNC));
        for (e, c) in &self.coeffs {
            out = out.checked_add(&w.powi(*e)?.mul_left(c)?)?;
        }
        Ok(out)
    }

    /// Compositional inverse `tau` with `self ∘ tau = z`.
    ///
    /// At infinity the series must look like `b₁z + b₀ + …`; at 0 like `r₁z + …`.
    pub fn invert(&self) -> Result<Self> {
        let n = self.n_gen;
        let lin = match self.point {
            Expansion::Infinity => {
                if self.top_exp() != Some(1) {
                    return Err(Error::Singular("inversion at infinity needs b₁z leading term".into()));
                }
                self.coeff(1)
            }
            Expansion::Zero => {
                if !self.coeff(0).is_zero() || self.low_exp() != Some(1) {
                    return Err(Error::Singular("inversion at 0 needs r₁z leading term".into()));
                }
                self.coeff(1)
            }
        };
        let linv = lin
            .inverse()
            .map_err(|_| Error::Singular("linear coefficient has zero body".into()))?;
        let k = self.trunc;
        let z = Self::variable(n, self.point, k);
        let mut tau = z.mul_left(&linv)?;
        for _ in 0..(k.max(0) + 4) {
            let resid = z.checked_sub(&self.compose(&tau)?)?;
            let next = tau.checked_add(&resid.mul_left(&linv)?)?.with_trunc(k);
            if next == tau {
                return Ok(tau);
            }
            tau = next;
        }
        Ok(tau)
    }

    /// Largest coefficient modulus, for floating-point comparisons.
    pub fn max_modulus(&self) -> f64 {
        self.coeffs.values().map(|c| c.max_modulus()).fold(0.0, f64::max)
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> PowerSeries<T> {
        let mut s = PowerSeries::zero(self.n_gen, self.point, self.trunc);
        for (e, c) in &self.coeffs {
            s.insert(*e, c.map_scalars(f));
        }
        s
    }

    /// Reinterprets coefficients in an algebra with more generators.
    pub fn embed(&self, n_new: u8) -> Result<Self> {
        let mut s = Self::zero(n_new, self.point, self.trunc);
        for (e, c) in &self.coeffs {
            s.insert(*e, c.embed(n_new)?);
        }
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        let mut comps = Map::new();
        for (e, c) in self.coeffs.iter().rev() {
            comps.insert(e.to_string(), c.to_json());
        }
        json!({
            "expansion": self.point.tag(),
            "trunc": self.trunc,
            "generators": self.n_gen,
            "components": Value::Object(comps),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| Error::Parse(format!("series JSON: {s}"));
        let point = Expansion::parse(v.get("expansion").and_then(Value::as_str).ok_or_else(|| bad("expansion"))?)?;
        let trunc = v.get("trunc").and_then(Value::as_i64).ok_or_else(|| bad("trunc"))?;
        let comps = v.get("components").and_then(Value::as_object).ok_or_else(|| bad("components"))?;
        let n = match v.get("generators").and_then(Value::as_u64) {
            Some(n) => n as u8,
            None => infer_generators(comps.values()),
        };
        let mut s = Self::zero(n, point, trunc);
        for (k, c) in comps {
            let e: i64 = k.parse().map_err(|_| bad("exponent key"))?;
            s.insert(e, G::from_json(n, c)?);
        }
        Ok(s)
    }
}

fn infer_generators<'a>(vals: impl Iterator<Item = &'a Value>) -> u8 {
    let mut n = 0u64;
    for v in vals {
        if let Some(ts) = v.get("terms").and_then(Value::as_array) {
            for t in ts {
                if let Some(m) = t.get("monomial").and_then(Value::as_array) {
                    for i in m {
                        n = n.max(i.as_u64().unwrap_or(0));
                    }
                }
            }
        }
    }
    n as u8
}
