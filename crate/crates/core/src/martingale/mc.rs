//! Monte Carlo constancy test of the Grassmann-integrated process `∫ Q(H_t)|hw⟩ ⊗ w`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::loewner_sde::{CompiledGroup, DriverConfig, GroupScheme};
use crate::scalar::Rational;
use crate::superalgebra::{rref, Monomial, TruncatedBasis, VermaModule, VermaVector};

use super::model::{reference_singular, ModelSpec};

/// Added to `3·SE` so that coefficients that are constant along every path still pass.
pub const SE_FLOOR: f64 = 1e-12;

/// Linear projection onto the quotient of the truncated module by a submodule.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// Reduced echelon rows (pivot entry 1), in basis coordinates.
    rows: Vec<Vec<f64>>,
    pivots: Vec<usize>,
    /// Basis indices kept as quotient coordinates.
    pub tracked: Vec<usize>,
}

impl Quotient {
    pub fn trivial(dim: usize) -> Self {
        Quotient { rows: vec![], pivots: vec![], tracked: (0..dim).collect() }
    }

    /// Quotient by the span of `m·chi`, `m` running over PBW monomials within the cutoff.
    pub fn by_submodule(module: &VermaModule, basis: &TruncatedBasis, chi: &VermaVector) -> Result<Self> {
        let l = chi.level2().ok_or(Error::NonHomogeneous)?;
        let mut span: Vec<Vec<Rational>> = Vec::new();
        for m in basis.monomials.iter().filter(|m| l - crate::superalgebra::monomial_mode2(m) <= basis.level2_max) {
            let mut img = VermaVector::zero(module.algebra(), 0);
            for (word, c) in chi.terms() {
                let mut full: Monomial = m.clone();
                full.extend(word.iter().copied());
                for (mm, k) in module.act_monomial(&full, &[])? {
                    let piece = VermaVector::basis_vector(module.algebra(), 0, mm).scale(&(c.body() * k));
                    img = img.add(&piece)?;
                }
            }
            let mut row = vec![Rational::integer(0); basis.len()];
            for (mm, c) in img.terms() {
                if let Some(&i) = basis.index.get(mm) {
                    row[i] = c.body();
                }
            }
            span.push(row);
        }
        let pivots = rref(&mut span);
        let rows = span[..pivots.len()].iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect();
        let tracked = (0..basis.len()).filter(|i| !pivots.contains(i)).collect();
        Ok(Quotient { rows, pivots, tracked })
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = y[p];
            if f != 0.0 {
                for (a, b) in y.iter_mut().zip(row) {
                    *a -= f * b;
                }
            }
        }
        self.tracked.iter().map(|&i| y[i]).collect()
    }
}

/// Per-coefficient statistics of `final − initial`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientStat {
    pub monomial: String,
    pub mean: f64,
    pub se: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct McReport {
    pub model: String,
    pub params: Value,
    pub level2_max: i32,
    pub trials: usize,
    pub dt: f64,
    pub steps: usize,
    pub base_seed: u64,
    pub scheme: GroupScheme,
    /// Monomials spanning the submodule that was divided out.
    pub quotient_by: Option<String>,
    pub coefficients: Vec<CoefficientStat>,
    pub verdict: bool,
}

impl McReport {
    pub fn to_json(&self) -> Value {
        json!({
            "model": self.model,
            "params": self.params,
            "level": self.level2_max as f64 / 2.0,
            "trials": self.trials,
            "dt": self.dt,
            "steps": self.steps,
            "base_seed": self.base_seed,
            "scheme": format!("{:?}", self.scheme),
            "quotient_by": self.quotient_by,
            "coefficients": self.coefficients.iter().map(|c| json!({
                "monomial": c.monomial, "mean": c.mean, "se": c.se, "pass": c.pass,
            })).collect::<Vec<_>>(),
            "verdict": if self.verdict { "pass" } else { "fail" },
        })
    }
}

#[derive(Clone, Debug)]
pub struct McOptions {
    pub scheme: GroupScheme,
    /// Divide out the submodule generated by the model's singular vector (when it exists).
    pub quotient: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { scheme: GroupScheme::ItoCorrected, quotient: true }
    }
}

/// Berezin-integrated real coordinates of a real-linearized Grassmann vector.
fn integrate(model: &ModelSpec, c: &CompiledGroup, v: &[f64], w: &GrassmannElement<f64>) -> Result<Vec<f64>> {
    c.coords_from_real(v)
        .iter()
        .map(|g| Ok((g * w).berezin_seq(&model.berezin)?.body()))
        .collect()
}

/// Runs `trials` independent paths and tests `E[final − initial] = 0` coefficientwise.
pub fn mc_martingale(
    model: &ModelSpec,
    level2_max: i32,
    driver: &DriverConfig,
    trials: usize,
    opts: &McOptions,
) -> Result<McReport> {
    driver.validate()?;
    if trials < 100 {
        return Err(Error::Usage("the martingale test needs at least 100 trials".into()));
    }
    if driver.dims != model.noise.len() {
        return Err(Error::Usage(format!("the {} model needs a driver with {} components", model.tag.name(), model.noise.len())));
    }
    let sde = model.group_sde();
    let compiled = sde.compile(level2_max, opts.scheme)?;
    let module = model.module();
    let (quotient, quotient_by) = match (opts.quotient, reference_singular(model)?) {
        (true, Some((chi, _))) => (Quotient::by_submodule(&module, &compiled.basis, &chi)?, Some(chi.to_string())),
        _ => (Quotient::trivial(compiled.dim()), None),
    };
    let w = model.pairing.map_scalars(|x| x.to_f64());
    let mut hw = vec![0.0; compiled.dim() << compiled.n_gen];
    hw[0] = 1.0;
    let initial = quotient.project(&integrate(model, &compiled, &hw, &w)?);
    let deltas: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<f64>> {
            let v = compiled.propagate_highest_weight(driver.dt, &driver.increments(trial))?;
            let y = quotient.project(&integrate(model, &compiled, &v, &w)?);
            Ok(y.iter().zip(&initial).map(|(a, b)| a - b).collect())
        })
        .collect::<Result<_>>()?;
    let k = quotient.tracked.len();
    let n = trials as f64;
    let mut sum = vec![0.0; k];
    let mut sq = vec![0.0; k];
    for d in &deltas {
        for i in 0..k {
            sum[i] += d[i];
            sq[i] += d[i] * d[i];
        }
    }
    let labels = compiled.basis.labels();
    let coefficients: Vec<CoefficientStat> = (0..k)
        .map(|i| {
            let mean = sum[i] / n;
            let var = ((sq[i] - n * mean * mean) / (n - 1.0)).max(0.0);
            let se = (var / n).sqrt();
            CoefficientStat {
                monomial: labels[quotient.tracked[i]].clone(),
                mean,
                se,
                pass: mean.abs() <= 3.0 * se + SE_FLOOR,
            }
        })
        .collect();
    let verdict = coefficients.iter().all(|c| c.pass);
    Ok(McReport {
        model: model.tag.name().into(),
        params: model.params_json(),
        level2_max,
        trials,
        dt: driver.dt,
        steps: driver.steps,
        base_seed: driver.base_seed,
        scheme: opts.scheme,
        quotient_by,
        coefficients,
        verdict,
    })
}
