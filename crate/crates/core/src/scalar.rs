//! Scalar backends.
//!
//! Exact work uses [`Rational`] (a rational that stays on `i128` until an
//! operation overflows, then promotes to a big rational) or its complex
//! extension [`QComplex`]. Monte Carlo work uses `f64` and [`C64`].

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type QComplex = Complex<Rational>;

/// Arithmetic interface shared by every coefficient backend.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(n: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// Absolute value as a float, for thresholds and reporting.
    fn modulus(&self) -> f64;
    fn to_c64(&self) -> C64;
    /// Real and imaginary parts as strings (`p/q` for exact backends).
    fn to_parts(&self) -> (String, String);
    fn from_parts(re: &str, im: &str) -> Result<Self>;
    /// Whether the backend is exact (used to pick tolerances in tests).
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(num, den))
    }
    fn scale_i64(&self, k: i64) -> Self {
        self.clone() * Self::from_i64(k)
    }
}

/// Exact rational number with an `i128` fast path.
#[derive(Clone)]
pub enum Rational {
    Small(Ratio<i128>),
    Big(BigRational),
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::Small(Ratio::new(num as i128, den as i128))
    }

    pub fn integer(n: i64) -> Self {
        Rational::Small(Ratio::from_integer(n as i128))
    }

    /// `n / d` from big integers; panics on a zero denominator.
    pub fn from_bigs(n: BigInt, d: BigInt) -> Self {
        Rational::from_big(BigRational::new(n, d))
    }

    fn from_big(b: BigRational) -> Self {
        match (b.numer().to_i128(), b.denom().to_i128()) {
            (Some(n), Some(d)) if n != i128::MIN => Rational::Small(Ratio::new_raw(n, d)),
            _ => Rational::Big(b),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Rational::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(r) => BigInt::from(*r.numer()),
            Rational::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(r) => BigInt::from(*r.denom()),
            Rational::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_integer(),
            Rational::Big(b) => b.is_integer(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                if n.unsigned_abs() < (1u128 << 53) && d < (1i128 << 53) {
                    n as f64 / d as f64
                } else {
                    self.to_big().to_f64().unwrap_or(f64::NAN)
                }
            }
            Rational::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small(r) => r.numer().signum() as i32,
            Rational::Big(b) => {
                if b.is_zero() {
                    0
                } else if b.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            return None;
        }
        Some(match self {
            Rational::Small(r) if *r.numer() != i128::MIN => Rational::Small(r.recip()),
            _ => Rational::from_big(self.to_big().recip()),
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Rational::integer(1);
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    /// Exact square root when both numerator and denominator are perfect squares.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &rn * &rn == n && &rd * &rd == d {
            Some(Rational::from_big(BigRational::new(rn, rd)))
        } else {
            None
        }
    }

    fn binop(
        &self,
        other: &Self,
        small: impl Fn(&Ratio<i128>, &Ratio<i128>) -> Option<Ratio<i128>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Rational::Small(a), Rational::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                if *r.numer() != i128::MIN {
                    return Rational::Small(r);
                }
            }
        }
        Rational::from_big(big(self.to_big(), other.to_big()))
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => a == b,
            (Rational::Big(a), Rational::Big(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rational::Small(r) => {
                0u8.hash(state);
                r.hash(state)
            }
            Rational::Big(b) => {
                1u8.hash(state);
                b.hash(state)
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        self.binop(&o, |a, b| a.checked_add(b), |a, b| a + b)
    }
}
impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        self.binop(&o, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}
impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        self.binop(&o, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}
impl Div for Rational {
    type Output = Rational;
    fn div(self, o: Rational) -> Rational {
        self * o.recip().expect("division by zero rational")
    }
}
impl Rem for Rational {
    type Output = Rational;
    fn rem(self, o: Rational) -> Rational {
        Rational::from_big(self.to_big() % o.to_big())
    }
}
impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(r) => Rational::Small(-r),
            Rational::Big(b) => Rational::from_big(-b),
        }
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::integer(0)
    }
    fn is_zero(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_zero(),
            Rational::Big(b) => b.is_zero(),
        }
    }
}
impl One for Rational {
    fn one() -> Self {
        Rational::integer(1)
    }
}
impl Num for Rational {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::Parse(format!("unsupported radix {radix}")));
        }
        s.parse()
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational '{s}'"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::from_big(BigRational::new(n, d)))
        } else if let Ok(n) = s.parse::<BigInt>() {
            Ok(Rational::from_big(BigRational::from_integer(n)))
        } else if s.contains(['.', 'e', 'E']) {
            decimal_to_rational(s).ok_or_else(bad)
        } else {
            Err(bad())
        }
    }
}

/// Parses a finite decimal literal such as `-2.75` or `1e-3` exactly.
fn decimal_to_rational(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}").parse().ok()?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(Rational::from_big(if neg { -r } else { r }))
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = (self.numer(), self.denom());
        if d == BigInt::from(1) {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}
impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(n: i64) -> Self {
        Rational::integer(n)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
    fn modulus(&self) -> f64 {
        self.to_f64().abs()
    }
    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64(), 0.0)
    }
    fn to_parts(&self) -> (String, String) {
        (self.to_string(), "0".into())
    }
    fn from_parts(re: &str, im: &str) -> Result<Self> {
        let im: Rational = im.parse()?;
        if !Zero::is_zero(&im) {
            return Err(Error::Parse("nonzero imaginary part for a real backend".into()));
        }
        re.parse()
    }
}

impl Scalar for QComplex {
    const EXACT: bool = true;
    fn zero() -> Self {
        Complex::new(Rational::integer(0), Rational::integer(0))
    }
    fn one() -> Self {
        Complex::new(Rational::integer(1), Rational::integer(0))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(Rational::integer(n), Rational::integer(0))
    }
    fn from_rational(q: &Rational) -> Self {
        Complex::new(q.clone(), Rational::integer(0))
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            let n = self.norm_sqr();
            Some(Complex::new(self.re.clone() / n.clone(), -self.im.clone() / n))
        }
    }
    fn modulus(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
    fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn to_parts(&self) -> (String, String) {
        (self.re.to_string(), self.im.to_string())
    }
    fn from_parts(re: &str, im: &str) -> Result<Self> {
        Ok(Complex::new(re.parse()?, im.parse()?))
    }
}

fn parse_float(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    s.parse::<Rational>().map(|q| q.to_f64())
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_f64()
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn to_c64(&self) -> C64 {
        C64::new(*self, 0.0)
    }
    fn to_parts(&self) -> (String, String) {
        (format!("{self:?}"), "0".into())
    }
    fn from_parts(re: &str, im: &str) -> Result<Self> {
        if parse_float(im)? != 0.0 {
            return Err(Error::Parse("nonzero imaginary part for a real backend".into()));
        }
        parse_float(re)
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        C64::new(q.to_f64(), 0.0)
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(Complex::inv(self))
        }
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn to_parts(&self) -> (String, String) {
        (format!("{:?}", self.re), format!("{:?}", self.im))
    }
    fn from_parts(re: &str, im: &str) -> Result<Self> {
        Ok(C64::new(parse_float(re)?, parse_float(im)?))
    }
}

/// Lowest common denominator helper used by the polynomial tools.
pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::from(1), |acc, q| acc.lcm(&q.denom()))
}


/// Serialized as the string `"p/q"` (or `"n"`); integers are also accepted on input.
impl serde::Serialize for Rational {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational number such as \"8/3\" or an integer")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
                v.parse().map_err(|e: crate::error::Error| E::custom(e.to_string()))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
                Ok(Rational::integer(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
                i64::try_from(v).map(Rational::integer).map_err(|_| E::custom("integer out of range"))
            }
        }
        d.deserialize_any(V)
    }
}
