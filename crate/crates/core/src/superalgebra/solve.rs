//! Parameter solving for singular-vector templates and rational-function fitting.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Rational;

use super::symbols::Algebra;
use super::uea::{monomial_to_string, Monomial};
use super::verma::{SingularReport, VermaModule, VermaVector, Weights};

fn zero() -> Rational {
    Rational::integer(0)
}
fn one() -> Rational {
    Rational::integer(1)
}

/// Dense univariate polynomial over the rationals, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.signum() == 0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }
    pub fn x() -> Self {
        Poly::new(vec![zero(), one()])
    }
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(zero)
    }
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(zero(), |acc, c| acc * x.clone() + c.clone())
    }
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }
    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).cloned().unwrap_or_else(zero) + o.coeffs.get(i).cloned().unwrap_or_else(zero))
                .collect(),
        )
    }
    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }
    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }
    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = r.last().unwrap().clone() / lead.clone();
            for (i, c) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].clone() - f.clone() * c.clone();
            }
            q[k] = f;
            r.pop();
            while r.last().is_some_and(|c| c.signum() == 0) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&(one() / self.leading()))
    }
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Lagrange interpolation through distinct nodes.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Poly {
        let mut acc = Poly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Poly::constant(one());
            let mut denom = one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = basis.mul(&Poly::new(vec![-xj.clone(), one()]));
                    denom = denom * (xi.clone() - xj.clone());
                }
            }
            acc = acc.add(&basis.scale(&(yi.clone() / denom)));
        }
        acc
    }

    /// Rational roots (with repetition removed) and the cofactor left after deflation.
    pub fn rational_roots(&self) -> (Vec<Rational>, Poly) {
        let mut p = self.monic();
        let mut roots = Vec::new();
        if p.is_zero() {
            return (roots, p);
        }
        loop {
            let Some(r) = p.find_rational_root() else { break };
            if !roots.contains(&r) {
                roots.push(r.clone());
            }
            p = p.div_rem(&Poly::new(vec![-r, one()])).0.monic();
            if p.degree() == Some(0) {
                break;
            }
        }
        roots.sort();
        (roots, p)
    }

    fn find_rational_root(&self) -> Option<Rational> {
        let deg = self.degree()?;
        if deg == 0 {
            return None;
        }
        if self.coeffs[0].signum() == 0 {
            return Some(zero());
        }
        match deg {
            1 => return Some(-self.coeffs[0].clone() / self.coeffs[1].clone()),
            2 => {
                let (c, b, a) = (self.coeffs[0].clone(), self.coeffs[1].clone(), self.coeffs[2].clone());
                let disc = b.clone() * b.clone() - Rational::integer(4) * a.clone() * c;
                let s = disc.sqrt_exact()?;
                return Some((-b - s) / (Rational::integer(2) * a));
            }
            _ => {}
        }
        // integer coefficients, then the rational root theorem
        let l = crate::scalar::lcm_denominators(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c.to_big() * num_rational::BigRational::from_integer(l.clone())).to_integer())
            .collect();
        let p_divs = small_divisors(&ints[0])?;
        let q_divs = small_divisors(ints.last().unwrap())?;
        for p in &p_divs {
            for q in &q_divs {
                for s in [1i64, -1] {
                    let cand = Rational::from_bigs(BigInt::from(s) * p, q.clone());
                    if self.eval(&cand).signum() == 0 {
                        return Some(cand);
                    }
                }
            }
        }
        None
    }
}

/// Positive divisors, if `|n|` is small enough for trial division.
fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_var(f, "x")
    }
}

impl Poly {
    fn fmt_var(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        write!(f, "{}", self.render(var))
    }

    /// Human-readable form in the given variable, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.signum() == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let s = if mono.is_empty() {
                c.to_string()
            } else if *c == one() {
                mono
            } else if *c == -one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// `num / den` with `den` monic and coprime to `num`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        (d.signum() != 0).then(|| self.num.eval(x) / d)
    }
    pub fn render(&self, var: &str) -> String {
        if self.den.degree() == Some(0) {
            self.num.render(var)
        } else {
            format!("({}) / ({})", self.num.render(var), self.den.render(var))
        }
    }
    pub fn to_json(&self, var: &str) -> Value {
        json!({
            "formula": self.render(var),
            "numerator": self.num.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "denominator": self.den.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c].signum() != 0) else { continue };
        m.swap(r, p);
        let inv = one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && m[i][c].signum() != 0 {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[i][j].clone() - f.clone() * m[r][j].clone();
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right null space.
pub fn nullspace(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero(); cols];
        v[free] = one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -a[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// Fits `y ≈ P(x)/Q(x)` exactly through all samples with the smallest total degree
/// `≤ max_degree`, holding back at least two samples as certification.
pub fn fit_rational_function(samples: &[(Rational, Rational)], max_degree: usize) -> Option<RationalFunction> {
    for total in 0..=max_degree {
        for dq in 0..=total {
            let dp = total - dq;
            let unknowns = dp + dq + 2;
            if samples.len() < unknowns + 1 {
                return None;
            }
            let rows: Vec<Vec<Rational>> = samples
                .iter()
                .map(|(x, y)| {
                    let mut row: Vec<Rational> = (0..=dp).map(|k| x.pow(k as u32)).collect();
                    row.extend((0..=dq).map(|k| -(y.clone() * x.pow(k as u32))));
                    row
                })
                .collect();
            let ns = nullspace(&rows, unknowns);
            if ns.len() != 1 {
                continue;
            }
            let v = &ns[0];
            let num = Poly::new(v[..=dp].to_vec());
            let den = Poly::new(v[dp + 1..].to_vec());
            if den.is_zero() || samples.iter().any(|(x, _)| den.eval(x).signum() == 0) {
                continue;
            }
            let g = num.gcd(&den);
            let (num, den) = if g.degree().unwrap_or(0) > 0 { (num.div_rem(&g).0, den.div_rem(&g).0) } else { (num, den) };
            let lead = den.leading();
            return Some(RationalFunction { num: num.scale(&(one() / lead.clone())), den: den.scale(&(one() / lead)) });
        }
    }
    None
}

/// Which highest-weight label is treated as unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightName {
    C,
    H,
    Alpha,
}

impl WeightName {
    pub fn label(&self) -> &'static str {
        match self {
            WeightName::C => "c",
            WeightName::H => "h",
            WeightName::Alpha => "alpha",
        }
    }
    pub fn get(&self, w: &Weights) -> Rational {
        match self {
            WeightName::C => w.c.clone(),
            WeightName::H => w.h.clone(),
            WeightName::Alpha => w.alpha.clone(),
        }
    }
    pub fn set(&self, w: &Weights, v: Rational) -> Weights {
        let mut w = w.clone();
        match self {
            WeightName::C => w.c = v,
            WeightName::H => w.h = v,
            WeightName::Alpha => w.alpha = v,
        }
        w
    }
}

/// `(m₀ + x₁m₁ + … + x_k m_k)|hw⟩` with unknown coefficients `x_i`.
#[derive(Clone, Debug)]
pub struct SingularTemplate {
    pub algebra: Algebra,
    pub monomials: Vec<Monomial>,
}

impl SingularTemplate {
    pub fn new(algebra: Algebra, monomials: &[&str]) -> Result<Self> {
        let monomials = monomials
            .iter()
            .map(|s| {
                let m = super::uea::parse_monomial(s)?;
                for g in &m {
                    algebra.check(g)?;
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        if monomials.is_empty() {
            return Err(Error::Usage("template needs at least one monomial".into()));
        }
        let levels: Vec<i32> = monomials.iter().map(|m| super::uea::monomial_mode2(m)).collect();
        if levels.iter().any(|l| *l != levels[0]) {
            return Err(Error::NonHomogeneous);
        }
        Ok(SingularTemplate { algebra, monomials })
    }

    pub fn vector(&self, coeffs: &[Rational]) -> Result<VermaVector> {
        let terms: Vec<(String, Rational)> =
            self.monomials.iter().zip(coeffs).map(|(m, c)| (monomial_to_string(m), c.clone())).collect();
        let borrowed: Vec<(&str, Rational)> = terms.iter().map(|(s, c)| (s.as_str(), c.clone())).collect();
        VermaVector::from_rational_terms(self.algebra, &borrowed)
    }

    /// Columns: images of each template monomial under each annihilator, as row-keyed maps.
    fn columns(&self, module: &VermaModule) -> Result<Vec<BTreeMap<(usize, Monomial), Rational>>> {
        let ann = self.algebra.annihilators();
        let mut cols = Vec::new();
        for m in &self.monomials {
            let v = self.vector_single(m)?;
            let mut col = BTreeMap::new();
            for (a, g) in ann.iter().enumerate() {
                let img = module.act_gen_on(*g, &v)?;
                for (n, c) in img.terms() {
                    col.insert((a, n.clone()), c.body());
                }
            }
            cols.push(col);
        }
        Ok(cols)
    }

    fn vector_single(&self, m: &Monomial) -> Result<VermaVector> {
        self.vector_from(&[(m.clone(), one())])
    }

    fn vector_from(&self, terms: &[(Monomial, Rational)]) -> Result<VermaVector> {
        let owned: Vec<(String, Rational)> = terms.iter().map(|(m, c)| (monomial_to_string(m), c.clone())).collect();
        let borrowed: Vec<(&str, Rational)> = owned.iter().map(|(s, c)| (s.as_str(), c.clone())).collect();
        VermaVector::from_rational_terms(self.algebra, &borrowed)
    }

    fn max_len(&self) -> usize {
        self.monomials.iter().map(|m| m.len()).max().unwrap_or(0)
    }
}

/// One point of the solution variety.
#[derive(Clone, Debug)]
pub struct Solution {
    pub weights: Weights,
    /// Template coefficients, the first one fixed to 1.
    pub coefficients: Vec<Rational>,
    /// Dimension of the remaining freedom in the coefficients (0 when unique).
    pub nullity: usize,
    pub report: SingularReport,
}

impl Solution {
    pub fn verified(&self) -> bool {
        self.report.pass
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub unknown: WeightName,
    /// Gcd of all minors whose vanishing is necessary for a solution.
    pub condition: Poly,
    /// Every value of the unknown weight is admissible.
    pub identically_solvable: bool,
    pub solutions: Vec<Solution>,
    /// Factor of `condition` without rational roots.
    pub unresolved: Poly,
}

impl SolveReport {
    pub fn to_json(&self, template: &SingularTemplate) -> Value {
        json!({
            "unknown": self.unknown.label(),
            "condition": self.condition.render(self.unknown.label()),
            "identically_solvable": self.identically_solvable,
            "unresolved_factor": self.unresolved.render(self.unknown.label()),
            "solutions": self.solutions.iter().map(|s| json!({
                "c": s.weights.c.to_string(),
                "h": s.weights.h.to_string(),
                "alpha": s.weights.alpha.to_string(),
                "coefficients": template.monomials.iter().zip(&s.coefficients)
                    .map(|(m, c)| json!({"monomial": monomial_to_string(m), "value": c.to_string()}))
                    .collect::<Vec<_>>(),
                "nullity": s.nullity,
                "verified_singular": s.verified(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn det(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => Poly::constant(one()),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect()).collect();
                let term = m[0][j].mul(&det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact solve of `Σ x_i col_i = −col_0` at fixed weights: `(coefficients, nullity)` or `None`.
fn solve_at(template: &SingularTemplate, module: &VermaModule) -> Result<Option<(Vec<Rational>, usize)>> {
    let cols = template.columns(module)?;
    let keys: std::collections::BTreeSet<_> = cols.iter().flat_map(|c| c.keys().cloned()).collect();
    let k = cols.len() - 1;
    let mut rows: Vec<Vec<Rational>> = keys
        .iter()
        .map(|key| {
            let mut r: Vec<Rational> = cols[1..].iter().map(|c| c.get(key).cloned().unwrap_or_else(zero)).collect();
            r.push(-cols[0].get(key).cloned().unwrap_or_else(zero));
            r
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.contains(&k) {
        return Ok(None);
    }
    let mut x = vec![zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = rows[r][k].clone();
    }
    let mut coeffs = vec![one()];
    coeffs.extend(x);
    Ok(Some((coeffs, k - pivots.len())))
}

/// Solves for the unknown weight and the template coefficients, with the other weights fixed.
///
/// Matrix entries are polynomials in the unknown weight; they are interpolated from exact
/// samples (with two extra certification points) and the solvability minors are formed
/// symbolically. Each rational root is then solved exactly and checked with `is_singular`.
pub fn solve_singular_params(template: &SingularTemplate, fixed: &Weights, unknown: WeightName) -> Result<SolveReport> {
    let deg = template.max_len() + 1;
    let nodes: Vec<Rational> = (0..deg as i64 + 3).map(|i| Rational::new(2 * i + 1, 3)).collect();
    let samples: Vec<Vec<BTreeMap<(usize, Monomial), Rational>>> = nodes
        .iter()
        .map(|w| template.columns(&VermaModule::new(template.algebra, unknown.set(fixed, w.clone()))))
        .collect::<Result<_>>()?;
    let keys: std::collections::BTreeSet<(usize, Monomial)> =
        samples.iter().flat_map(|cols| cols.iter().flat_map(|c| c.keys().cloned())).collect();
    let ncols = template.monomials.len();
    let mut entries: Vec<Vec<Poly>> = Vec::new();
    for key in &keys {
        let mut row = Vec::new();
        for j in 0..ncols {
            let pts: Vec<(Rational, Rational)> = nodes
                .iter()
                .zip(&samples)
                .map(|(w, cols)| (w.clone(), cols[j].get(key).cloned().unwrap_or_else(zero)))
                .collect();
            let p = Poly::interpolate(&pts[..deg + 1]);
            if pts[deg + 1..].iter().any(|(w, y)| p.eval(w) != *y) {
                return Err(Error::NonConvergent(format!(
                    "entry degree exceeds the bound {deg}; interpolation not certified"
                )));
            }
            row.push(p);
        }
        entries.push(row);
    }
    // generic rank of the unknown-coefficient columns at a sample point
    let probe: Vec<Vec<Rational>> = entries.iter().map(|row| row[1..].iter().map(|p| p.eval(&Rational::new(7, 11))).collect()).collect();
    let r = if ncols > 1 { rref(&mut probe.clone()).len() } else { 0 };
    let size = r + 1;
    let mut condition = Poly::zero();
    if entries.len() >= size {
        for rows in combinations(entries.len(), size) {
            for others in combinations(ncols - 1, r) {
                let cols: Vec<usize> = std::iter::once(0).chain(others.iter().map(|c| c + 1)).collect();
                let sub: Vec<Vec<Poly>> = rows.iter().map(|&i| cols.iter().map(|&j| entries[i][j].clone()).collect()).collect();
                let d = det(&sub);
                if !d.is_zero() {
                    condition = if condition.is_zero() { d.monic() } else { condition.gcd(&d) };
                }
            }
        }
    }
    let identically_solvable = condition.is_zero();
    let (roots, unresolved) = if identically_solvable { (Vec::new(), Poly::zero()) } else { condition.rational_roots() };
    let mut solutions = Vec::new();
    for w in roots {
        let weights = unknown.set(fixed, w);
        let module = VermaModule::new(template.algebra, weights.clone());
        if let Some((coefficients, nullity)) = solve_at(template, &module)? {
            let report = module.is_singular(&template.vector(&coefficients)?)?;
            solutions.push(Solution { weights, coefficients, nullity, report });
        }
    }
    Ok(SolveReport { unknown, condition, identically_solvable, solutions, unresolved })
}

/// Solves at fixed weights only (no unknown weight): `None` if no solution exists.
pub fn solve_coefficients(template: &SingularTemplate, weights: &Weights) -> Result<Option<Solution>> {
    let module = VermaModule::new(template.algebra, weights.clone());
    Ok(match solve_at(template, &module)? {
        Some((coefficients, nullity)) => {
            let report = module.is_singular(&template.vector(&coefficients)?)?;
            Some(Solution { weights: weights.clone(), coefficients, nullity, report })
        }
        None => None,
    })
}

/// Relations recovered by sweeping one weight and fitting each solved quantity.
#[derive(Clone, Debug)]
pub struct FittedRelations {
    pub sweep: WeightName,
    pub unknown: WeightName,
    /// Fitted unknown weight as a function of the swept weight.
    pub weight: Option<RationalFunction>,
    /// Fitted template coefficients (index 0 is the fixed leading 1).
    pub coefficients: Vec<Option<RationalFunction>>,
    pub samples: usize,
    pub all_verified: bool,
}

/// Sweeps `sweep` over `values` and fits the unique solution branch by rational functions.
/// Points with zero or several rational solutions are skipped.
pub fn fit_singular_relations(
    template: &SingularTemplate,
    base: &Weights,
    sweep: WeightName,
    values: &[Rational],
    unknown: WeightName,
    max_degree: usize,
) -> Result<FittedRelations> {
    let mut pts_w = Vec::new();
    let mut pts_c: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); template.monomials.len()];
    let mut all_verified = true;
    for x in values {
        let fixed = sweep.set(base, x.clone());
        let rep = solve_singular_params(template, &fixed, unknown)?;
        let unique: Vec<&Solution> = rep.solutions.iter().filter(|s| s.nullity == 0).collect();
        if unique.len() != 1 {
            continue;
        }
        let s = unique[0];
        all_verified &= s.verified();
        pts_w.push((x.clone(), unknown.get(&s.weights)));
        for (i, c) in s.coefficients.iter().enumerate() {
            pts_c[i].push((x.clone(), c.clone()));
        }
    }
    Ok(FittedRelations {
        sweep,
        unknown,
        weight: fit_rational_function(&pts_w, max_degree),
        coefficients: pts_c.iter().map(|p| fit_rational_function(p, max_degree)).collect(),
        samples: pts_w.len(),
        all_verified,
    })
}
