//! Generators, algebras and structure constants.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Generator family. Declaration order is the PBW tie order for equal modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    C,
    L,
    J,
    Gp,
    Gm,
    G,
}

impl Family {
    pub fn is_odd(self) -> bool {
        matches!(self, Family::G | Family::Gp | Family::Gm)
    }
    fn prefix(self) -> &'static str {
        match self {
            Family::C => "C",
            Family::L => "L",
            Family::J => "J",
            Family::Gp => "Gp",
            Family::Gm => "Gm",
            Family::G => "G",
        }
    }
}

/// A basis element `X_mode`; the mode is stored doubled so half-integers are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSymbol {
    pub family: Family,
    pub mode2: i32,
}

#[allow(non_snake_case)]
impl GeneratorSymbol {
    pub fn L(n: i32) -> Self {
        GeneratorSymbol { family: Family::L, mode2: 2 * n }
    }
    pub fn J(n: i32) -> Self {
        GeneratorSymbol { family: Family::J, mode2: 2 * n }
    }
    pub fn C() -> Self {
        GeneratorSymbol { family: Family::C, mode2: 0 }
    }
    /// `G_{r}` with `r = mode2/2` (odd `mode2`).
    pub fn G(mode2: i32) -> Self {
        GeneratorSymbol { family: Family::G, mode2 }
    }
    pub fn Gp(mode2: i32) -> Self {
        GeneratorSymbol { family: Family::Gp, mode2 }
    }
    pub fn Gm(mode2: i32) -> Self {
        GeneratorSymbol { family: Family::Gm, mode2 }
    }

    pub fn is_odd(&self) -> bool {
        self.family.is_odd()
    }

    pub fn mode(&self) -> Rational {
        Rational::new(self.mode2 as i64, 2)
    }

    /// Whether the mode has the right integrality for the family.
    pub fn well_formed(&self) -> bool {
        match self.family {
            Family::C => self.mode2 == 0,
            f if f.is_odd() => self.mode2.rem_euclid(2) == 1,
            _ => self.mode2 % 2 == 0,
        }
    }

    fn with_mode2(self, mode2: i32) -> Self {
        GeneratorSymbol { family: self.family, mode2 }
    }

    /// PBW sort key: central element first, then ascending mode, then family.
    fn key(&self) -> (u8, i32, Family) {
        match self.family {
            Family::C => (0, 0, Family::C),
            f => (1, self.mode2, f),
        }
    }
}

impl PartialOrd for GeneratorSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for GeneratorSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family == Family::C {
            return write!(f, "C");
        }
        let p = self.family.prefix();
        if self.mode2 % 2 == 0 {
            write!(f, "{p}{}", self.mode2 / 2)
        } else {
            write!(f, "{p}{}/2", self.mode2)
        }
    }
}

impl FromStr for GeneratorSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "C" {
            return Ok(GeneratorSymbol::C());
        }
        let (family, rest) = if let Some(r) = s.strip_prefix("Gp") {
            (Family::Gp, r)
        } else if let Some(r) = s.strip_prefix("Gm") {
            (Family::Gm, r)
        } else if let Some(r) = s.strip_prefix('G') {
            (Family::G, r)
        } else if let Some(r) = s.strip_prefix('L') {
            (Family::L, r)
        } else if let Some(r) = s.strip_prefix('J') {
            (Family::J, r)
        } else {
            return Err(Error::Parse(format!("unknown generator '{s}'")));
        };
        let mode: Rational = rest.parse()?;
        let twice = mode * Rational::integer(2);
        if !twice.is_integer() {
            return Err(Error::Parse(format!("bad mode in '{s}'")));
        }
        let mode2: i32 = twice.numer().try_into().map_err(|_| Error::Parse(format!("mode out of range in '{s}'")))?;
        let g = GeneratorSymbol { family, mode2 };
        if !g.well_formed() {
            return Err(Error::Parse(format!("mode of '{s}' does not match its family")));
        }
        Ok(g)
    }
}

/// Which `[G⁺, G⁻]` line to use for the N=2 algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ns2Table {
    /// `{G⁺_r, G⁻_s} = 2L_{r+s} + (r−s)J_{r+s} + (c/3)(r²−1/4)δ_{r+s,0}`.
    Standard,
    /// `{G⁺_{m+1/2}, G⁻_{n+1/2}} = 2L_{m+n} + (m−n+1)J_{m+n} + ((m²+m)/3)δ_{m+n,0}C`, read literally.
    Printed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    Virasoro,
    Ns1,
    Ns2(Ns2Table),
}

impl Algebra {
    pub fn name(&self) -> &'static str {
        match self {
            Algebra::Virasoro => "virasoro",
            Algebra::Ns1 => "ns1",
            Algebra::Ns2(Ns2Table::Standard) => "ns2",
            Algebra::Ns2(Ns2Table::Printed) => "ns2-printed",
        }
    }

    pub fn contains(&self, g: &GeneratorSymbol) -> bool {
        if !g.well_formed() {
            return false;
        }
        match self {
            Algebra::Virasoro => matches!(g.family, Family::L | Family::C),
            Algebra::Ns1 => matches!(g.family, Family::L | Family::G | Family::C),
            Algebra::Ns2(_) => matches!(g.family, Family::L | Family::J | Family::Gp | Family::Gm | Family::C),
        }
    }

    pub fn check(&self, g: &GeneratorSymbol) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch { symbol: g.to_string(), algebra: self.name().into() })
        }
    }

    /// Positive-mode generators whose annihilation of a vector implies it is singular.
    pub fn annihilators(&self) -> Vec<GeneratorSymbol> {
        use GeneratorSymbol as X;
        match self {
            Algebra::Virasoro => vec![X::L(1), X::L(2)],
            Algebra::Ns1 => vec![X::L(1), X::G(1), X::G(3)],
            Algebra::Ns2(_) => vec![X::L(1), X::J(1), X::Gp(1), X::Gm(1)],
        }
    }

    /// Negative-mode generators spanning the Verma module, by family.
    pub fn lowering_families(&self) -> &'static [Family] {
        match self {
            Algebra::Virasoro => &[Family::L],
            Algebra::Ns1 => &[Family::L, Family::G],
            Algebra::Ns2(_) => &[Family::L, Family::J, Family::Gp, Family::Gm],
        }
    }
}

/// Linear combination of generators (the central element included as `C`).
pub type LieElement = Vec<(GeneratorSymbol, Rational)>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn push(out: &mut LieElement, g: GeneratorSymbol, c: Rational) {
    if c.signum() != 0 {
        out.push((g, c));
    }
}

/// `(r² − 1/4)/3` for `r = mode2/2`.
fn central_g(r2: i32) -> Rational {
    let r2 = r2 as i64;
    q(r2 * r2 - 1, 12)
}

/// Super-bracket `[x, y]` (anticommutator when both are odd).
pub fn bracket(x: &GeneratorSymbol, y: &GeneratorSymbol, alg: Algebra) -> Result<LieElement> {
    alg.check(x)?;
    alg.check(y)?;
    if let Some(v) = ordered_bracket(x, y, alg) {
        return Ok(v);
    }
    let v = ordered_bracket(y, x, alg).expect("every family pair is covered in one order");
    // [x, y] = −(−1)^{|x||y|} [y, x]
    let sign = if x.is_odd() && y.is_odd() { 1 } else { -1 };
    Ok(v.into_iter().map(|(g, c)| (g, c * Rational::integer(sign))).collect())
}

fn ordered_bracket(x: &GeneratorSymbol, y: &GeneratorSymbol, alg: Algebra) -> Option<LieElement> {
    use Family::*;
    let (m2, n2) = (x.mode2, y.mode2);
    let s2 = m2 + n2;
    let mut out = LieElement::new();
    match (x.family, y.family) {
        (C, _) | (_, C) => {}
        (L, L) => {
            let (m, n) = ((m2 / 2) as i64, (n2 / 2) as i64);
            push(&mut out, GeneratorSymbol::L((m + n) as i32), Rational::integer(m - n));
            if s2 == 0 {
                push(&mut out, GeneratorSymbol::C(), q(m * m * m - m, 12));
            }
        }
        (L, J) => {
            push(&mut out, GeneratorSymbol::J(s2 / 2), Rational::integer(-(n2 / 2) as i64));
        }
        (J, J) => {
            if s2 == 0 {
                push(&mut out, GeneratorSymbol::C(), q((m2 / 2) as i64, 3));
            }
        }
        (L, G) | (L, Gp) | (L, Gm) => {
            // (m/2 − r) with m = m2/2, r = n2/2
            push(&mut out, y.with_mode2(s2), q(m2 as i64 - 2 * n2 as i64, 4));
        }
        (J, Gp) => push(&mut out, y.with_mode2(s2), q(1, 1)),
        (J, Gm) => push(&mut out, y.with_mode2(s2), q(-1, 1)),
        (G, G) => {
            push(&mut out, GeneratorSymbol::L(s2 / 2), q(2, 1));
            if s2 == 0 {
                push(&mut out, GeneratorSymbol::C(), central_g(m2));
            }
        }
        (Gp, Gp) | (Gm, Gm) => {}
        (Gp, Gm) => match alg {
            Algebra::Ns2(Ns2Table::Standard) => {
                push(&mut out, GeneratorSymbol::L(s2 / 2), q(2, 1));
                push(&mut out, GeneratorSymbol::J(s2 / 2), q((m2 - n2) as i64, 2));
                if s2 == 0 {
                    push(&mut out, GeneratorSymbol::C(), central_g(m2));
                }
            }
            _ => {
                // m = r − 1/2, n = s − 1/2
                let (m, n) = (((m2 - 1) / 2) as i64, ((n2 - 1) / 2) as i64);
                push(&mut out, GeneratorSymbol::L((m + n) as i32), q(2, 1));
                push(&mut out, GeneratorSymbol::J((m + n) as i32), Rational::integer(m - n + 1));
                if m + n == 0 {
                    push(&mut out, GeneratorSymbol::C(), q(m * m + m, 3));
                }
            }
        },
        _ => return None,
    }
    Some(out)
}
