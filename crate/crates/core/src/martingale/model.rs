//! Drift and noise elements of the three models, and the exact drift check at `t = 0`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::loewner_sde::{GroupSde, NoiseTerm};
use crate::scalar::Rational;
use crate::superalgebra::{
    nullspace, solve_coefficients, solve_singular_params, Algebra, Ns2Table, SingularReport, SingularTemplate,
    UEAElement, VermaModule, VermaVector, WeightName, Weights,
};

type GE = GrassmannElement<Rational>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Virasoro,
    Ns1,
    Ns2,
}

impl ModelTag {
    pub fn name(self) -> &'static str {
        match self {
            ModelTag::Virasoro => "virasoro",
            ModelTag::Ns1 => "ns1",
            ModelTag::Ns2 => "ns2",
        }
    }
    pub fn algebra(self) -> Algebra {
        match self {
            ModelTag::Virasoro => Algebra::Virasoro,
            ModelTag::Ns1 => Algebra::Ns1,
            ModelTag::Ns2 => Algebra::Ns2(Ns2Table::Standard),
        }
    }
    /// Monomials of the singular vector the drift is compared against.
    pub fn template(self) -> SingularTemplate {
        let m: &[&str] = match self {
            ModelTag::Virasoro => &["L-2", "L-1 L-1"],
            ModelTag::Ns1 => &["L-2", "L-1 L-1", "G-3/2 G-1/2"],
            ModelTag::Ns2 => &["L-1", "Gp-1/2 Gm-1/2", "J-1"],
        };
        SingularTemplate::new(self.algebra(), m).expect("fixed templates are well formed")
    }
}

impl FromStr for ModelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vir" | "virasoro" => Ok(ModelTag::Virasoro),
            "ns1" | "n1" | "n=1" => Ok(ModelTag::Ns1),
            "ns2" | "n2" | "n=2" => Ok(ModelTag::Ns2),
            other => Err(Error::Usage(format!("unknown model '{other}'"))),
        }
    }
}

/// Inputs of [`build_model`]; any weight left out is filled from the model's parameter map.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: Option<Rational>,
    pub c: Option<Rational>,
    pub h: Option<Rational>,
    pub alpha: Option<Rational>,
    pub t: Option<Rational>,
    pub a: Option<Rational>,
}

impl ModelParams {
    pub fn kappa(kappa: Rational) -> Self {
        ModelParams { kappa: Some(kappa), ..Default::default() }
    }
}

/// `c_κ = 1 − 3(κ−4)²/(2κ)`, `h_κ = (6−κ)/(2κ)`.
pub fn virasoro_weights(kappa: &Rational) -> Result<(Rational, Rational)> {
    if kappa.signum() <= 0 {
        return Err(Error::Usage("kappa must be positive".into()));
    }
    let k4 = kappa.clone() - q(4, 1);
    let c = q(1, 1) - q(3, 1) * k4.clone() * k4 / (q(2, 1) * kappa.clone());
    let h = (q(6, 1) - kappa.clone()) / (q(2, 1) * kappa.clone());
    Ok((c, h))
}

/// `c_κ = 3/2 − 6(4−κ)/κ`, `h_κ = (12−3κ)/(4κ)`; `κ = 4` makes `h_κ` vanish.
pub fn ns1_weights(kappa: &Rational) -> Result<(Rational, Rational)> {
    if kappa.signum() <= 0 {
        return Err(Error::Usage("kappa must be positive".into()));
    }
    if *kappa == q(4, 1) {
        return Err(Error::Degenerate("kappa = 4 gives h = 0 in the N=1 parameter map".into()));
    }
    let c = q(3, 2) - q(6, 1) * (q(4, 1) - kappa.clone()) / kappa.clone();
    let h = (q(12, 1) - q(3, 1) * kappa.clone()) / (q(4, 1) * kappa.clone());
    Ok((c, h))
}

/// Printed N=2 map: `c = 3 − 3t`, `h = −1/2 + 3/(8t) − (4α²−1)/t`, `κ = 1/α`, `a = (α−1)²/(tα)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ns2Printed {
    pub c: Rational,
    pub h: Rational,
    pub kappa: Rational,
    pub a: Rational,
}

pub fn ns2_printed(t: &Rational, alpha: &Rational) -> Result<Ns2Printed> {
    if t.signum() == 0 || alpha.signum() == 0 {
        return Err(Error::Degenerate("t and alpha must be nonzero".into()));
    }
    let c = q(3, 1) - q(3, 1) * t.clone();
    let h = q(-1, 2) + q(3, 8) / t.clone() - (q(4, 1) * alpha.clone() * alpha.clone() - q(1, 1)) / t.clone();
    let am1 = alpha.clone() - q(1, 1);
    Ok(Ns2Printed {
        c,
        h,
        kappa: q(1, 1) / alpha.clone(),
        a: am1.clone() * am1 / (t.clone() * alpha.clone()),
    })
}

/// A model's Itô group SDE together with its Grassmann pairing.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub tag: ModelTag,
    pub kappa: Rational,
    /// `J₋₁` drift coefficient (N=2 only).
    pub a: Option<Rational>,
    pub weights: Weights,
    pub drift: UEAElement,
    pub noise: Vec<NoiseTerm>,
    /// Even pairing weight `w` multiplied on the right.
    pub pairing: GE,
    /// Berezin integral `∫dζ_{i1}…dζ_{ik}` as the list `[i1, …, ik]`.
    pub berezin: Vec<usize>,
}

impl ModelSpec {
    pub fn algebra(&self) -> Algebra {
        self.tag.algebra()
    }
    pub fn num_generators(&self) -> u8 {
        self.drift.num_generators()
    }
    pub fn module(&self) -> VermaModule {
        VermaModule::new(self.algebra(), self.weights.clone())
    }
    pub fn group_sde(&self) -> GroupSde {
        GroupSde { module: self.module(), drift: self.drift.clone(), noise: self.noise.clone() }
    }
    pub fn params_json(&self) -> Value {
        let mut v = json!({
            "kappa": self.kappa.to_string(),
            "c": self.weights.c.to_string(),
            "h": self.weights.h.to_string(),
        });
        if self.tag == ModelTag::Ns2 {
            v["alpha"] = json!(self.weights.alpha.to_string());
            v["a"] = json!(self.a.as_ref().map(|x| x.to_string()));
        }
        v
    }
}

fn zeta_term(alg: Algebra, n: u8, zetas: &[usize], monomial: &str, coeff: Rational) -> Result<UEAElement> {
    let c = GE::monomial(n, zetas, coeff)?;
    let m = crate::superalgebra::parse_monomial(monomial)?;
    UEAElement::monomial(alg, m, c)
}

/// Builds drift, noise and pairing of a model with weights from its parameter map unless overridden.
pub fn build_model(tag: ModelTag, params: &ModelParams) -> Result<ModelSpec> {
    let alg = tag.algebra();
    match tag {
        ModelTag::Virasoro => {
            let kappa = params.kappa.clone().ok_or_else(|| Error::Usage("kappa is required".into()))?;
            let (c0, h0) = virasoro_weights(&kappa)?;
            let weights = Weights::new(params.c.clone().unwrap_or(c0), params.h.clone().unwrap_or(h0));
            let drift = UEAElement::from_rational_terms(
                alg,
                0,
                &[("L-2", q(-2, 1)), ("L-1 L-1", kappa.clone() / q(2, 1))],
            )?;
            let noise = vec![NoiseTerm {
                variance: kappa.clone(),
                element: UEAElement::from_rational_terms(alg, 0, &[("L-1", q(1, 1))])?,
            }];
            Ok(ModelSpec { tag, kappa, a: None, weights, drift, noise, pairing: GE::one(0), berezin: vec![] })
        }
        ModelTag::Ns1 => {
            let kappa = params.kappa.clone().ok_or_else(|| Error::Usage("kappa is required".into()))?;
            let weights = match (&params.c, &params.h) {
                (Some(c), Some(h)) => Weights::new(c.clone(), h.clone()),
                _ => {
                    let (c0, h0) = ns1_weights(&kappa)?;
                    Weights::new(params.c.clone().unwrap_or(c0), params.h.clone().unwrap_or(h0))
                }
            };
            let n = 2;
            let k4 = kappa.clone() / q(4, 1);
            let drift = UEAElement::from_rational_terms(
                alg,
                n,
                &[("L-2", q(-2, 1)), ("L-1 L-1", kappa.clone() / q(2, 1))],
            )?
            .add(&zeta_term(alg, n, &[2, 1], "G-3/2 G-1/2", -k4.clone())?)?
            .add(&zeta_term(alg, n, &[2, 1], "G-1/2 G-3/2", k4)?)?
            .normal_order()?;
            let noise = vec![
                NoiseTerm { variance: kappa.clone(), element: UEAElement::from_rational_terms(alg, n, &[("L-1", q(1, 1))])? },
                NoiseTerm {
                    variance: kappa.clone() / q(2, 1),
                    element: zeta_term(alg, n, &[1], "G-1/2", q(1, 1))?.add(&zeta_term(alg, n, &[2], "G-3/2", q(1, 1))?)?,
                },
            ];
            let pairing = &GE::one(n) + &GE::monomial(n, &[2, 1], q(1, 1))?;
            Ok(ModelSpec { tag, kappa, a: None, weights, drift, noise, pairing, berezin: vec![1, 2] })
        }
        ModelTag::Ns2 => {
            let printed = match (&params.t, &params.alpha) {
                (Some(t), Some(al)) => Some(ns2_printed(t, al)?),
                _ => None,
            };
            let pick = |given: &Option<Rational>, from: fn(&Ns2Printed) -> Rational, name: &str| -> Result<Rational> {
                given
                    .clone()
                    .or_else(|| printed.as_ref().map(from))
                    .ok_or_else(|| Error::Usage(format!("{name} is required (or give t and alpha)")))
            };
            let kappa = pick(&params.kappa, |p| p.kappa.clone(), "kappa")?;
            let a = pick(&params.a, |p| p.a.clone(), "a")?;
            let c = pick(&params.c, |p| p.c.clone(), "c")?;
            let h = pick(&params.h, |p| p.h.clone(), "h")?;
            let alpha = params.alpha.clone().ok_or_else(|| Error::Usage("alpha is required".into()))?;
            if kappa.signum() <= 0 {
                return Err(Error::Usage("kappa must be positive".into()));
            }
            let n = 2;
            let half = kappa.clone() / q(2, 1);
            let drift = UEAElement::from_rational_terms(alg, n, &[("L-1", q(1, 1)), ("J-1", a.clone())])?
                .add(&zeta_term(alg, n, &[1, 2], "Gp-1/2 Gm-1/2", half.clone())?)?
                .add(&zeta_term(alg, n, &[1, 2], "Gm-1/2 Gp-1/2", -half)?)?
                .normal_order()?;
            let noise = vec![NoiseTerm {
                variance: kappa.clone(),
                element: zeta_term(alg, n, &[1], "Gp-1/2", q(1, 1))?.add(&zeta_term(alg, n, &[2], "Gm-1/2", q(1, 1))?)?,
            }];
            let pairing = &GE::one(n) + &GE::monomial(n, &[1, 2], q(1, 1))?;
            Ok(ModelSpec {
                tag,
                kappa,
                a: Some(a),
                weights: Weights::with_alpha(c, h, alpha),
                drift,
                noise,
                pairing,
                berezin: vec![2, 1],
            })
        }
    }
}

/// `∫ X|hw⟩ ⊗ w` at `Q = Id`, over plain rationals.
pub fn integrated_drift(model: &ModelSpec) -> Result<VermaVector> {
    integrate_element(model, &model.drift)
}

/// `∫ Z|hw⟩ ⊗ w` for any element over the model's generators.
pub fn integrate_element(model: &ModelSpec, z: &UEAElement) -> Result<VermaVector> {
    let module = model.module();
    let v = module.act(z, &module.highest_weight(model.num_generators()))?;
    v.mul_scalar_right(&model.pairing)?.berezin_seq(&model.berezin)?.to_scalar_vector()
}

/// Outcome of [`drift_is_null`].
#[derive(Clone, Debug)]
pub struct DriftReport {
    pub pass: bool,
    pub drift: VermaVector,
    /// Singular vector with leading template coefficient 1, when one exists at these weights.
    pub reference: Option<VermaVector>,
    /// `drift = λ · reference`.
    pub lambda: Option<Rational>,
    pub reference_check: Option<SingularReport>,
}

impl DriftReport {
    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "integrated_drift": self.drift.to_json(),
            "reference": self.reference.as_ref().map(|r| r.to_json()),
            "lambda": self.lambda.as_ref().map(|l| l.to_string()),
            "reference_check": self.reference_check.as_ref().map(|r| r.to_json()),
        })
    }
}

/// Singular vector of the model's template at its weights, normalized to leading coefficient 1.
pub fn reference_singular(model: &ModelSpec) -> Result<Option<(VermaVector, SingularReport)>> {
    let template = model.tag.template();
    Ok(match solve_coefficients(&template, &model.weights)? {
        Some(sol) if sol.verified() => Some((template.vector(&sol.coefficients)?, sol.report)),
        _ => None,
    })
}

/// Passes iff the integrated drift is zero or an exact multiple of a verified singular vector.
pub fn drift_is_null(model: &ModelSpec) -> Result<DriftReport> {
    let drift = integrated_drift(model)?;
    let refd = reference_singular(model)?;
    let (reference, reference_check) = match refd {
        Some((v, r)) => (Some(v), Some(r)),
        None => (None, None),
    };
    let lambda = if drift.is_zero() {
        Some(Rational::integer(0))
    } else {
        reference.as_ref().and_then(|r| drift.proportionality(r))
    };
    let pass = drift.is_zero() || (lambda.is_some() && reference_check.as_ref().is_some_and(|r| r.pass));
    Ok(DriftReport { pass, drift, reference, lambda, reference_check })
}

/// Side-by-side N=2 parameters: the printed map and the values forced by the standard bracket table.
#[derive(Clone, Debug)]
pub struct Ns2Comparison {
    pub t: Rational,
    pub alpha: Rational,
    pub printed: Ns2Printed,
    /// `h` values at `c = 3 − 3t` admitting a level-1 singular vector of the template.
    pub solved_h: Vec<Rational>,
    /// `(h, p, q)` for the vector `L₋₁ + p G⁺G⁻ + q J₋₁`.
    pub solved_vectors: Vec<(Rational, Vec<Rational>)>,
    /// `(κ, a)` making the integrated drift proportional to each solved vector.
    pub drift_params: Vec<Option<(Rational, Rational)>>,
    pub printed_h_singular: bool,
}

impl Ns2Comparison {
    pub fn to_json(&self) -> Value {
        json!({
            "t": self.t.to_string(),
            "alpha": self.alpha.to_string(),
            "printed": {
                "c": self.printed.c.to_string(),
                "h": self.printed.h.to_string(),
                "kappa": self.printed.kappa.to_string(),
                "a": self.printed.a.to_string(),
                "h_admits_singular_vector": self.printed_h_singular,
            },
            "solved": self.solved_vectors.iter().zip(&self.drift_params).map(|((h, co), kp)| json!({
                "h": h.to_string(),
                "coefficients": co.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "kappa": kp.as_ref().map(|(k, _)| k.to_string()),
                "a": kp.as_ref().map(|(_, a)| a.to_string()),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Solves the N=2 level-1 singular-vector problem at `c = 3 − 3t`, charge `α`, and the drift
/// parameters that make the integrated drift proportional to it.
pub fn ns2_compare(t: &Rational, alpha: &Rational) -> Result<Ns2Comparison> {
    let printed = ns2_printed(t, alpha)?;
    let template = ModelTag::Ns2.template();
    let base = Weights::with_alpha(printed.c.clone(), Rational::integer(0), alpha.clone());
    let rep = solve_singular_params(&template, &base, WeightName::H)?;
    let mut solved_h = Vec::new();
    let mut solved_vectors = Vec::new();
    let mut drift_params = Vec::new();
    for s in rep.solutions.iter().filter(|s| s.verified()) {
        solved_h.push(s.weights.h.clone());
        solved_vectors.push((s.weights.h.clone(), s.coefficients.clone()));
        drift_params.push(ns2_drift_params(&s.weights, &template.vector(&s.coefficients)?)?);
    }
    let printed_h_singular = solve_coefficients(&template, &Weights::with_alpha(printed.c.clone(), printed.h.clone(), alpha.clone()))?
        .is_some_and(|s| s.verified());
    Ok(Ns2Comparison { t: t.clone(), alpha: alpha.clone(), printed, solved_h, solved_vectors, drift_params, printed_h_singular })
}

/// Finds `(κ, a)` with `∫X(κ, a)|hw⟩⊗w = λ·chi` for some `λ ≠ 0`, using linearity in `(κ, a)`.
pub fn ns2_drift_params(weights: &Weights, chi: &VermaVector) -> Result<Option<(Rational, Rational)>> {
    let at = |kappa: i64, a: i64| -> Result<VermaVector> {
        let p = ModelParams {
            kappa: Some(Rational::integer(kappa.max(1))),
            a: Some(Rational::integer(a)),
            c: Some(weights.c.clone()),
            h: Some(weights.h.clone()),
            alpha: Some(weights.alpha.clone()),
            t: None,
        };
        let mut m = build_model(ModelTag::Ns2, &p)?;
        if kappa == 0 {
            // Drop the κ-dependent pieces by rebuilding the drift without them.
            m.drift = UEAElement::from_rational_terms(m.algebra(), 2, &[("L-1", q(1, 1)), ("J-1", Rational::integer(a))])?;
        }
        integrated_drift(&m)
    };
    let d0 = at(0, 0)?;
    let dk = at(1, 0)?.add(&d0.scale(&q(-1, 1)))?;
    let da = at(0, 1)?.add(&d0.scale(&q(-1, 1)))?;
    let keys: std::collections::BTreeSet<_> = [&d0, &dk, &da, chi]
        .iter()
        .flat_map(|v| v.terms().keys().cloned().collect::<Vec<_>>())
        .collect();
    let get = |v: &VermaVector, k: &Vec<crate::superalgebra::GeneratorSymbol>| v.coeff(k).body();
    // Unknowns (λ, κ, a, 1): λ chi − κ Dκ − a Da − D0 = 0.
    let rows: Vec<Vec<Rational>> = keys
        .iter()
        .map(|k| vec![get(chi, k), -get(&dk, k), -get(&da, k), -get(&d0, k)])
        .collect();
    let ns = nullspace(&rows, 4);
    Ok(ns.iter().find(|v| v[3].signum() != 0).and_then(|v| {
        let s = v[3].clone();
        let (lambda, kappa, a) = (v[0].clone() / s.clone(), v[1].clone() / s.clone(), v[2].clone() / s);
        (ns.len() == 1 && lambda.signum() != 0).then_some((kappa, a))
    }))
}
