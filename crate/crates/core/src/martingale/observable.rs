//! The classical observable `h(f′/f)² + (c/12)·Sf` along Euler jets of the Loewner flow.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::loewner_sde::{DriverConfig, Increments};
use crate::scalar::{Rational, Scalar, C64};
use crate::superseries::schwarzian_jet;

use super::mc::SE_FLOOR;
use super::model::virasoro_weights;

/// `f, f′, f″, f‴` at a fixed `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub f: C64,
    pub d1: C64,
    pub d2: C64,
    pub d3: C64,
}

impl Jet {
    pub fn identity(z: C64) -> Self {
        Jet { f: z, d1: C64::new(1.0, 0.0), d2: C64::new(0.0, 0.0), d3: C64::new(0.0, 0.0) }
    }

    /// One Euler step of `df = 2dt/f − √κ dB` differentiated in `z` up to third order.
    pub fn step(&self, dt: f64, sqrt_kappa_db: f64) -> Self {
        let Jet { f, d1, d2, d3 } = *self;
        let r = Scalar::inv(&f).expect("nonzero by the swallow check");
        let r2 = r * r;
        let r3 = r2 * r;
        let two_dt = C64::new(2.0 * dt, 0.0);
        Jet {
            f: (f + r * two_dt) + C64::new(-sqrt_kappa_db, 0.0),
            d1: d1 - two_dt * d1 * r2,
            d2: d2 + two_dt * (C64::new(2.0, 0.0) * d1 * d1 * r3 - d2 * r2),
            d3: d3
                + two_dt
                    * (-(d3 * r2) + C64::new(6.0, 0.0) * d1 * d2 * r3 - C64::new(6.0, 0.0) * d1 * d1 * d1 * r2 * r2),
        }
    }
}

/// `h(f′/f)² + (c/12)·Sf` from a jet.
pub fn observable_from_jet(c: f64, h: f64, jet: &Jet) -> Result<C64> {
    if jet.f.norm() == 0.0 {
        return Err(Error::Singular("f vanishes at the sample point".into()));
    }
    let q = jet.d1 / jet.f;
    let s = schwarzian_jet(&jet.d1, &jet.d2, &jet.d3)?;
    Ok(q * q * C64::new(h, 0.0) + s * C64::new(c / 12.0, 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservablePath {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    /// Step at which `|f|` dropped below the threshold; the value is frozen from there on.
    pub swallowed_at: Option<usize>,
}

/// Observable along one path started at `z`, with the weights of the Virasoro parameter map.
pub fn bb_observable(kappa: &Rational, z: C64, dt: f64, inc: &Increments, swallow_eps: f64, record_every: usize) -> Result<ObservablePath> {
    let (c, h) = virasoro_weights(kappa)?;
    let (c, h) = (c.to_f64(), h.to_f64());
    let sk = kappa.to_f64().sqrt();
    let mut jet = Jet::identity(z);
    let mut out = ObservablePath { times: vec![0.0], values: vec![observable_from_jet(c, h, &jet)?], swallowed_at: None };
    let steps = inc.steps();
    for k in 0..steps {
        if out.swallowed_at.is_none() {
            if jet.f.norm() < swallow_eps {
                out.swallowed_at = Some(k);
            } else {
                jet = jet.step(dt, sk * inc.step(k)[0]);
            }
        }
        if k + 1 == steps || (k + 1) % record_every.max(1) == 0 {
            out.times.push((k + 1) as f64 * dt);
            out.values.push(if out.swallowed_at.is_some() { *out.values.last().unwrap() } else { observable_from_jet(c, h, &jet)? });
        }
    }
    Ok(out)
}

/// Mean of `obs_T − obs_0` with standard errors, real and imaginary parts gated separately.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableStats {
    pub initial: C64,
    pub mean_final: C64,
    pub se_re: f64,
    pub se_im: f64,
    pub swallowed: usize,
    pub trials: usize,
    pub pass: bool,
}

impl ObservableStats {
    pub fn to_json(&self) -> Value {
        json!({
            "initial": [self.initial.re, self.initial.im],
            "mean_final": [self.mean_final.re, self.mean_final.im],
            "se": [self.se_re, self.se_im],
            "swallowed": self.swallowed,
            "trials": self.trials,
            "verdict": if self.pass { "pass" } else { "fail" },
        })
    }
}

pub fn observable_mc(kappa: &Rational, z: C64, driver: &DriverConfig, trials: usize) -> Result<ObservableStats> {
    driver.validate()?;
    if trials < 2 {
        return Err(Error::Usage("at least two trials are needed for a standard error".into()));
    }
    let paths: Vec<(C64, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let p = bb_observable(kappa, z, driver.dt, &driver.increments(trial), 1e-6, driver.steps.max(1))?;
            Ok((*p.values.last().unwrap(), p.swallowed_at.is_some()))
        })
        .collect::<Result<_>>()?;
    let initial = bb_observable(kappa, z, driver.dt, &Increments::from_data(1, vec![])?, 1e-6, 1)?.values[0];
    let n = trials as f64;
    let mut s = C64::new(0.0, 0.0);
    let (mut sr, mut si) = (0.0, 0.0);
    for (v, _) in &paths {
        let d = *v - initial;
        s += d;
        sr += d.re * d.re;
        si += d.im * d.im;
    }
    let m = s / n;
    let se = |sq: f64, mu: f64| (((sq - n * mu * mu) / (n - 1.0)).max(0.0) / n).sqrt();
    let (se_re, se_im) = (se(sr, m.re), se(si, m.im));
    let pass = m.re.abs() <= 3.0 * se_re + SE_FLOOR && m.im.abs() <= 3.0 * se_im + SE_FLOOR;
    Ok(ObservableStats {
        initial,
        mean_final: m + initial,
        se_re,
        se_im,
        swallowed: paths.iter().filter(|(_, f)| *f).count(),
        trials,
        pass,
    })
}
