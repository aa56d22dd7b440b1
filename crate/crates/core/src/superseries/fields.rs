//! Odd variables, super derivatives, superconformal fields and vector fields.
//!
//! The odd coordinates `θ` (N=1) or `θ⁺, θ⁻` (N=2) are realised as extra
//! Grassmann generators placed after the `n_zeta` driving generators, so a
//! superfunction is a [`PowerSeries`] whose coefficients live in `Λ(ζ, θ)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::Scalar;

use super::series::{Expansion, PowerSeries};

type G<S> = GrassmannElement<S>;
type P<S> = PowerSeries<S>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuperKind {
    N1,
    N2,
}

/// Generator bookkeeping: `ζ_1..ζ_n` followed by the odd coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub kind: SuperKind,
    pub n_zeta: u8,
}

impl Layout {
    pub fn n1(n_zeta: u8) -> Self {
        Layout { kind: SuperKind::N1, n_zeta }
    }
    pub fn n2(n_zeta: u8) -> Self {
        Layout { kind: SuperKind::N2, n_zeta }
    }
    pub fn n_total(&self) -> u8 {
        self.n_zeta
            + match self.kind {
                SuperKind::N1 => 1,
                SuperKind::N2 => 2,
            }
    }
    /// Generator index of `θ` (N=1).
    pub fn theta(&self) -> usize {
        self.n_zeta as usize + 1
    }
    /// Generator index of `θ⁺` (N=2).
    pub fn theta_p(&self) -> usize {
        self.n_zeta as usize + 1
    }
    /// Generator index of `θ⁻` (N=2).
    pub fn theta_m(&self) -> usize {
        self.n_zeta as usize + 2
    }
    pub fn theta_elem<S: Scalar>(&self, idx: usize) -> G<S> {
        G::generator(self.n_total(), idx).expect("odd coordinate within layout")
    }
    /// Embeds a `Λ(ζ)` coefficient into `Λ(ζ, θ…)`.
    pub fn lift<S: Scalar>(&self, c: &G<S>) -> Result<G<S>> {
        if c.num_generators() > self.n_zeta {
            return Err(Error::GeneratorMismatch { left: self.n_zeta, right: c.num_generators() });
        }
        c.embed(self.n_total())
    }
}

/// `∂/∂θ_idx` applied coefficientwise (left derivative).
pub fn d_theta<S: Scalar>(f: &P<S>, idx: usize) -> Result<P<S>> {
    G::<S>::generator(f.num_generators(), idx)?;
    Ok(f.map_coeffs(|c| c.berezin(idx).expect("index checked")))
}

/// Left multiplication by the generator `θ_idx`.
pub fn theta_mul<S: Scalar>(f: &P<S>, idx: usize) -> Result<P<S>> {
    let t = G::generator(f.num_generators(), idx)?;
    f.mul_left(&t)
}

/// Drops every term involving the generator `idx`.
pub fn theta_free<S: Scalar>(f: &P<S>, idx: usize) -> P<S> {
    f.map_coeffs(|c| c.without_generator(idx))
}

fn check_layout<S: Scalar>(f: &P<S>, layout: &Layout) -> Result<()> {
    if f.num_generators() != layout.n_total() {
        return Err(Error::GeneratorMismatch { left: layout.n_total(), right: f.num_generators() });
    }
    Ok(())
}

/// `D = ∂θ + θ∂z`.
pub fn apply_d<S: Scalar>(f: &P<S>, layout: &Layout) -> Result<P<S>> {
    check_layout(f, layout)?;
    let t = layout.theta();
    d_theta(f, t)?.checked_add(&theta_mul(&f.derivative(), t)?)
}

/// `D± = ∂θ± + θ∓∂z`; `plus` selects the sign.
pub fn apply_dpm<S: Scalar>(f: &P<S>, layout: &Layout, plus: bool) -> Result<P<S>> {
    check_layout(f, layout)?;
    let (own, other) = if plus {
        (layout.theta_p(), layout.theta_m())
    } else {
        (layout.theta_m(), layout.theta_p())
    };
    d_theta(f, own)?.checked_add(&theta_mul(&f.derivative(), other)?)
}

/// Outcome of a superconformality check.
#[derive(Clone, Debug)]
pub struct ConformalityReport<S: Scalar> {
    pub pass: bool,
    pub residuals: Vec<(String, P<S>)>,
}

/// `H(z,θ) = (z̃, θ̃)` with `z̃ = f + θξ`, `θ̃ = ψ + θg`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperFieldN1<S: Scalar> {
    pub layout: Layout,
    pub z: P<S>,
    pub theta: P<S>,
}

impl<S: Scalar> SuperFieldN1<S> {
    pub fn identity(n_zeta: u8, point: Expansion, trunc: i64) -> Self {
        let layout = Layout::n1(n_zeta);
        let n = layout.n_total();
        SuperFieldN1 {
            layout,
            z: P::variable(n, point, trunc),
            theta: P::constant(layout.theta_elem(layout.theta()), point, trunc),
        }
    }

    /// Builds the field from its four θ-free components.
    pub fn from_components(layout: Layout, f: &P<S>, xi: &P<S>, psi: &P<S>, g: &P<S>) -> Result<Self> {
        let t = layout.theta();
        for c in [f, xi, psi, g] {
            check_layout(c, &layout)?;
            if theta_free(c, t) != *c {
                return Err(Error::Usage("component series must not contain θ".into()));
            }
        }
        Ok(SuperFieldN1 {
            layout,
            z: f.checked_add(&theta_mul(xi, t)?)?,
            theta: psi.checked_add(&theta_mul(g, t)?)?,
        })
    }

    pub fn f(&self) -> P<S> {
        theta_free(&self.z, self.layout.theta())
    }
    pub fn xi(&self) -> P<S> {
        d_theta(&self.z, self.layout.theta()).expect("θ in layout")
    }
    pub fn psi(&self) -> P<S> {
        theta_free(&self.theta, self.layout.theta())
    }
    pub fn g(&self) -> P<S> {
        d_theta(&self.theta, self.layout.theta()).expect("θ in layout")
    }

    /// Residual `Dz̃ − θ̃Dθ̃`.
    pub fn is_superconformal(&self) -> Result<ConformalityReport<S>> {
        let l = &self.layout;
        let r = apply_d(&self.z, l)?.checked_sub(&self.theta.checked_mul(&apply_d(&self.theta, l)?)?)?;
        Ok(ConformalityReport { pass: r.is_zero(), residuals: vec![("Dz-thetaDtheta".into(), r)] })
    }
}

/// `(z̃, θ̃⁺, θ̃⁻)` as functions of `(z, θ⁺, θ⁻)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperFieldN2<S: Scalar> {
    pub layout: Layout,
    pub z: P<S>,
    pub theta_p: P<S>,
    pub theta_m: P<S>,
}

/// Which output of an N=2 field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum N2Output {
    Z,
    ThetaPlus,
    ThetaMinus,
}

/// Component of an N=2 output multiplying `1, θ⁺, θ⁻, θ⁺θ⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum N2Component {
    One,
    ThetaPlus,
    ThetaMinus,
    ThetaPlusMinus,
}

impl<S: Scalar> SuperFieldN2<S> {
    pub fn identity(n_zeta: u8, point: Expansion, trunc: i64) -> Self {
        let layout = Layout::n2(n_zeta);
        let n = layout.n_total();
        SuperFieldN2 {
            layout,
            z: P::variable(n, point, trunc),
            theta_p: P::constant(layout.theta_elem(layout.theta_p()), point, trunc),
            theta_m: P::constant(layout.theta_elem(layout.theta_m()), point, trunc),
        }
    }

    pub fn output(&self, o: N2Output) -> &P<S> {
        match o {
            N2Output::Z => &self.z,
            N2Output::ThetaPlus => &self.theta_p,
            N2Output::ThetaMinus => &self.theta_m,
        }
    }

    pub fn component(&self, o: N2Output, c: N2Component) -> P<S> {
        let (tp, tm) = (self.layout.theta_p(), self.layout.theta_m());
        let x = self.output(o);
        let res = match c {
            N2Component::One => Ok(theta_free(&theta_free(x, tp), tm)),
            N2Component::ThetaPlus => d_theta(x, tp).map(|y| theta_free(&y, tm)),
            N2Component::ThetaMinus => d_theta(x, tm).map(|y| theta_free(&y, tp)),
            N2Component::ThetaPlusMinus => d_theta(x, tp).and_then(|y| d_theta(&y, tm)),
        };
        res.expect("θ± in layout")
    }

    /// Residuals of `D±z̃ − θ̃∓D±θ̃±` and `D±θ̃∓`.
    pub fn is_superconformal(&self) -> Result<ConformalityReport<S>> {
        let l = &self.layout;
        let dp = |f: &P<S>| apply_dpm(f, l, true);
        let dm = |f: &P<S>| apply_dpm(f, l, false);
        let r1 = dp(&self.z)?.checked_sub(&self.theta_m.checked_mul(&dp(&self.theta_p)?)?)?;
        let r2 = dm(&self.z)?.checked_sub(&self.theta_p.checked_mul(&dm(&self.theta_m)?)?)?;
        let r3 = dp(&self.theta_m)?;
        let r4 = dm(&self.theta_p)?;
        let pass = [&r1, &r2, &r3, &r4].iter().all(|r| r.is_zero());
        Ok(ConformalityReport {
            pass,
            residuals: vec![
                ("D+z-theta-D+theta+".into(), r1),
                ("D-z-theta+D-theta-".into(), r2),
                ("D+theta-".into(), r3),
                ("D-theta+".into(), r4),
            ],
        })
    }
}

/// Basis vector fields; `j` is the integer index (`G(j)` is `𝓖_{j+1/2}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSymbol {
    /// N=1 even field `−z^{j+1}∂z − ((j+1)/2)θz^j∂θ`.
    L1(i64),
    /// N=1 odd field `−z^{j+1}(∂θ − θ∂z)`.
    G(i64),
    /// N=2 even field.
    L2(i64),
    /// N=2 U(1) field `−z^j(θ⁺∂θ⁺ − θ⁻∂θ⁻)`.
    J(i64),
    /// N=2 odd fields `𝓖±_{j+1/2} = −(z^{j+1}(∂θ± − θ∓∂z) + (j+1)z^jθ±θ∓∂θ±)`.
    Gp(i64),
    Gm(i64),
}

impl FieldSymbol {
    pub fn kind(&self) -> SuperKind {
        match self {
            FieldSymbol::L1(_) | FieldSymbol::G(_) => SuperKind::N1,
            _ => SuperKind::N2,
        }
    }
    pub fn index(&self) -> i64 {
        match *self {
            FieldSymbol::L1(j)
            | FieldSymbol::G(j)
            | FieldSymbol::L2(j)
            | FieldSymbol::J(j)
            | FieldSymbol::Gp(j)
            | FieldSymbol::Gm(j) => j,
        }
    }
    pub fn is_odd(&self) -> bool {
        matches!(self, FieldSymbol::G(_) | FieldSymbol::Gp(_) | FieldSymbol::Gm(_))
    }
}

fn half<S: Scalar>(k: i64) -> S {
    S::from_ratio(k, 2)
}

/// Applies a basis vector field to a superfunction.
pub fn apply_vector_field<S: Scalar>(x: FieldSymbol, f: &P<S>, layout: &Layout) -> Result<P<S>> {
    check_layout(f, layout)?;
    if x.kind() != layout.kind {
        return Err(Error::Usage(format!("{x:?} does not act on {:?} superfunctions", layout.kind)));
    }
    let dz = f.derivative();
    let out = match x {
        FieldSymbol::L1(j) => {
            let t = layout.theta();
            let a = dz.shift(j + 1);
            let b = theta_mul(&d_theta(f, t)?, t)?.shift(j).scale(&half(j + 1));
            a.checked_add(&b)?.neg()
        }
        FieldSymbol::G(j) => {
            let t = layout.theta();
            d_theta(f, t)?.checked_sub(&theta_mul(&dz, t)?)?.shift(j + 1).neg()
        }
        FieldSymbol::L2(j) => {
            let (tp, tm) = (layout.theta_p(), layout.theta_m());
            let e = theta_mul(&d_theta(f, tp)?, tp)?.checked_add(&theta_mul(&d_theta(f, tm)?, tm)?)?;
            dz.shift(j + 1).checked_add(&e.shift(j).scale(&half(j + 1)))?.neg()
        }
        FieldSymbol::J(j) => {
            let (tp, tm) = (layout.theta_p(), layout.theta_m());
            let e = theta_mul(&d_theta(f, tp)?, tp)?.checked_sub(&theta_mul(&d_theta(f, tm)?, tm)?)?;
            e.shift(j).neg()
        }
        FieldSymbol::Gp(j) | FieldSymbol::Gm(j) => {
            let (tp, tm) = (layout.theta_p(), layout.theta_m());
            let (own, other) = if matches!(x, FieldSymbol::Gp(_)) { (tp, tm) } else { (tm, tp) };
            let dth = d_theta(f, own)?;
            let first = dth.checked_sub(&theta_mul(&dz, other)?)?.shift(j + 1);
            // θ^±θ^∓∂θ^±: the ordered pair follows the field's own sign.
            let second = theta_mul(&theta_mul(&dth, other)?, own)?.shift(j).scale(&S::from_i64(j + 1));
            first.checked_add(&second)?.neg()
        }
    };
    if out.point() == Expansion::Infinity && out.trunc() < 0 && f.trunc() >= 0 {
        return Err(Error::TruncationUnderflow { required: f.trunc() - out.trunc() });
    }
    Ok(out)
}

/// Coefficients of `T = −Σ(A_j𝓛_j + M_{j+1/2}𝓖_{j+1/2} [+ B_j𝓙_j + M±𝓖±])`.
///
/// Keys are the integer index `j`; coefficients live in `Λ(ζ_1..ζ_{n_zeta})`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldCoeffs<S: Scalar> {
    pub kind: SuperKind,
    pub n_zeta: u8,
    pub a: BTreeMap<i64, G<S>>,
    pub m: BTreeMap<i64, G<S>>,
    pub b: BTreeMap<i64, G<S>>,
    pub mp: BTreeMap<i64, G<S>>,
    pub mm: BTreeMap<i64, G<S>>,
}

impl<S: Scalar> VectorFieldCoeffs<S> {
    pub fn new(kind: SuperKind, n_zeta: u8) -> Self {
        VectorFieldCoeffs {
            kind,
            n_zeta,
            a: BTreeMap::new(),
            m: BTreeMap::new(),
            b: BTreeMap::new(),
            mp: BTreeMap::new(),
            mm: BTreeMap::new(),
        }
    }

    pub fn layout(&self) -> Layout {
        Layout { kind: self.kind, n_zeta: self.n_zeta }
    }

    /// `(field, coefficient)` pairs with nonzero coefficients.
    pub fn terms(&self) -> Vec<(FieldSymbol, G<S>)> {
        let mut out = Vec::new();
        let even = match self.kind {
            SuperKind::N1 => FieldSymbol::L1 as fn(i64) -> FieldSymbol,
            SuperKind::N2 => FieldSymbol::L2,
        };
        for (j, c) in &self.a {
            out.push((even(*j), c.clone()));
        }
        match self.kind {
            SuperKind::N1 => {
                for (j, c) in &self.m {
                    out.push((FieldSymbol::G(*j), c.clone()));
                }
            }
            SuperKind::N2 => {
                for (j, c) in &self.b {
                    out.push((FieldSymbol::J(*j), c.clone()));
                }
                for (j, c) in &self.mp {
                    out.push((FieldSymbol::Gp(*j), c.clone()));
                }
                for (j, c) in &self.mm {
                    out.push((FieldSymbol::Gm(*j), c.clone()));
                }
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out
    }

    /// Checks parities and the generator count of all coefficients.
    pub fn validate(&self) -> Result<()> {
        if self.kind == SuperKind::N1 && !(self.b.is_empty() && self.mp.is_empty() && self.mm.is_empty()) {
            return Err(Error::Usage("N=1 coefficients cannot carry J or G± terms".into()));
        }
        if self.kind == SuperKind::N2 && !self.m.is_empty() {
            return Err(Error::Usage("N=2 coefficients use M± rather than M".into()));
        }
        for (x, c) in self.terms() {
            if c.num_generators() != self.n_zeta {
                return Err(Error::GeneratorMismatch { left: self.n_zeta, right: c.num_generators() });
            }
            let ok = if x.is_odd() { c.is_odd() } else { c.is_even() };
            if !ok {
                return Err(Error::Usage(format!("coefficient of {x:?} has the wrong parity")));
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> i64 {
        self.terms().iter().map(|(x, _)| -x.index()).max().unwrap_or(0)
    }

    /// Negated coefficients (the inverse flow to first order).
    pub fn negated(&self) -> Self {
        let neg = |m: &BTreeMap<i64, G<S>>| m.iter().map(|(k, v)| (*k, -v)).collect();
        VectorFieldCoeffs {
            kind: self.kind,
            n_zeta: self.n_zeta,
            a: neg(&self.a),
            m: neg(&self.m),
            b: neg(&self.b),
            mp: neg(&self.mp),
            mm: neg(&self.mm),
        }
    }
}

/// `T f` for the even derivation built from `v`.
pub fn apply_t<S: Scalar>(v: &VectorFieldCoeffs<S>, f: &P<S>) -> Result<P<S>> {
    let layout = v.layout();
    let mut acc = P::zero(f.num_generators(), f.point(), f.trunc());
    for (x, c) in v.terms() {
        let term = apply_vector_field(x, f, &layout)?.mul_left(&layout.lift(&c)?)?;
        acc = acc.checked_add(&term)?;
    }
    Ok(acc.neg().with_trunc(f.trunc()))
}

/// `exp(T) f`, iterating `T` until the terms vanish inside the tracked window.
pub fn exp_t<S: Scalar>(v: &VectorFieldCoeffs<S>, f: &P<S>) -> Result<P<S>> {
    let cap = 4 * f.trunc().max(0) + 16;
    let mut acc = f.clone();
    let mut term = f.clone();
    for k in 1..=cap {
        term = apply_t(v, &term)?.scale(&S::from_i64(k).inv().expect("nonzero"));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = acc.checked_add(&term)?;
    }
    Err(Error::NonConvergent(format!("no stabilisation after {cap} applications of T")))
}

fn check_depth<S: Scalar>(v: &VectorFieldCoeffs<S>, k: i64) -> Result<()> {
    v.validate()?;
    if v.terms().iter().any(|(x, _)| x.index() >= 0) {
        return Err(Error::NonConvergent("vector field support must have negative indices".into()));
    }
    if v.depth() > k {
        return Err(Error::NonConvergent(format!(
            "support depth {} exceeds truncation order {k}",
            v.depth()
        )));
    }
    Ok(())
}

/// `E_{A,M}·(z, θ)` at infinity, truncated at order `k`.
pub fn exp_superconformal_n1<S: Scalar>(v: &VectorFieldCoeffs<S>, k: i64) -> Result<SuperFieldN1<S>> {
    if v.kind != SuperKind::N1 {
        return Err(Error::Usage("expected N=1 coefficients".into()));
    }
    check_depth(v, k)?;
    let id = SuperFieldN1::identity(v.n_zeta, Expansion::Infinity, k);
    Ok(SuperFieldN1 { layout: id.layout, z: exp_t(v, &id.z)?, theta: exp_t(v, &id.theta)? })
}

/// `E_{A,B,M±}·(z, θ⁺, θ⁻)` at infinity, truncated at order `k`.
pub fn exp_superconformal_n2<S: Scalar>(v: &VectorFieldCoeffs<S>, k: i64) -> Result<SuperFieldN2<S>> {
    if v.kind != SuperKind::N2 {
        return Err(Error::Usage("expected N=2 coefficients".into()));
    }
    check_depth(v, k)?;
    let id = SuperFieldN2::identity(v.n_zeta, Expansion::Infinity, k);
    Ok(SuperFieldN2 {
        layout: id.layout,
        z: exp_t(v, &id.z)?,
        theta_p: exp_t(v, &id.theta_p)?,
        theta_m: exp_t(v, &id.theta_m)?,
    })
}

/// `h = Σ_j (A_j (j+1)/2 z^j + θ M_{j+1/2} (j+1) z^j)`.
pub fn commutator_h<S: Scalar>(v: &VectorFieldCoeffs<S>, k: i64) -> Result<P<S>> {
    let layout = v.layout();
    let n = layout.n_total();
    let theta = layout.theta_elem::<S>(layout.theta());
    let mut h = P::zero(n, Expansion::Infinity, k);
    for (j, a) in &v.a {
        let c = layout.lift(a)?.scale(&half(j + 1));
        h = h.checked_add(&P::monomial(c, *j, Expansion::Infinity, k))?;
    }
    for (j, m) in &v.m {
        let c = (&theta * &layout.lift(m)?).scale(&S::from_i64(j + 1));
        h = h.checked_add(&P::monomial(c, *j, Expansion::Infinity, k))?;
    }
    Ok(h)
}

/// Result of checking `[D, T] = hD` on a family of test functions.
#[derive(Clone, Debug)]
pub struct CommutatorReport<S: Scalar> {
    pub pass: bool,
    pub h: P<S>,
    pub failures: Vec<(String, P<S>)>,
}

/// Verifies `[D,T]F − h·DF = 0` for `F ∈ {z^n, θz^n}`, `n ∈ [−3, 3]`.
pub fn commutator_identity_check<S: Scalar>(v: &VectorFieldCoeffs<S>, k: i64) -> Result<CommutatorReport<S>> {
    if v.kind != SuperKind::N1 {
        return Err(Error::Usage("the commutator identity is stated for N=1".into()));
    }
    v.validate()?;
    let layout = v.layout();
    let n = layout.n_total();
    let h = commutator_h(v, k)?;
    let theta = layout.theta_elem::<S>(layout.theta());
    let mut failures = Vec::new();
    for e in -3..=3 {
        for (label, c) in [("", G::one(n)), ("theta*", theta.clone())] {
            let f = P::monomial(c, e, Expansion::Infinity, k);
            let df = apply_d(&f, &layout)?;
            let lhs = apply_d(&apply_t(v, &f)?, &layout)?.checked_sub(&apply_t(v, &df)?)?;
            let r = lhs.checked_sub(&h.checked_mul(&df)?)?;
            if !r.is_zero() {
                failures.push((format!("{label}z^{e}"), r));
            }
        }
    }
    Ok(CommutatorReport { pass: failures.is_empty(), h, failures })
}
