//! Pointwise Euler–Maruyama integration: classical path, N=1 and N=2 super points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::{Rational, Scalar, C64};
use crate::superseries::{Expansion, Layout, PowerSeries};

use super::driver::{DriverConfig, Increments};

type G = GrassmannElement<C64>;

/// Common integration options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    /// Points with `|body(H⁰)| < swallow_eps` are flagged and frozen.
    pub swallow_eps: f64,
    /// Keep every `record_every`-th state (the initial and final states are always kept).
    pub record_every: usize,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { swallow_eps: 1e-6, record_every: 1 }
    }
}

fn recorded(k: usize, steps: usize, every: usize) -> bool {
    k == steps || k % every.max(1) == 0
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Usage(format!("kappa must be finite and non-negative, got {kappa}")));
    }
    Ok(())
}

/// One point's classical trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPath {
    pub z0: C64,
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    /// Step at which the point was flagged.
    pub swallowed_at: Option<usize>,
}

/// One Euler step of `df = 2dt/f − √κ dB`.
#[inline]
pub fn classical_step(f: C64, dt: f64, sqrt_kappa_db: f64) -> C64 {
    let inv = Scalar::inv(&f).expect("nonzero by the swallow check");
    (f + inv * C64::new(2.0 * dt, 0.0)) + C64::new(-sqrt_kappa_db, 0.0)
}

/// Classical Loewner flow `df_t(z) = 2dt/f_t(z) − √κ dB¹_t` for several starting points.
pub fn simulate_classical(
    kappa: f64,
    z0: &[C64],
    driver: &DriverConfig,
    trial: u64,
    opts: &PathOptions,
) -> Result<Vec<ClassicalPath>> {
    check_kappa(kappa)?;
    driver.validate()?;
    for z in z0 {
        if z.im == 0.0 {
            return Err(Error::Usage(format!("starting point {z} must have a nonzero imaginary part")));
        }
    }
    Ok(classical_with(kappa, z0, driver.dt, &driver.increments(trial), opts))
}

/// Same as [`simulate_classical`] with explicit increments (component 0 is used).
pub fn classical_with(kappa: f64, z0: &[C64], dt: f64, inc: &Increments, opts: &PathOptions) -> Vec<ClassicalPath> {
    let sk = kappa.sqrt();
    let steps = inc.steps();
    z0.iter()
        .map(|&z| {
            let mut f = z;
            let mut path = ClassicalPath { z0: z, times: vec![0.0], values: vec![z], swallowed_at: None };
            for k in 0..steps {
                if path.swallowed_at.is_none() {
                    if f.norm() < opts.swallow_eps {
                        path.swallowed_at = Some(k);
                    } else {
                        f = classical_step(f, dt, sk * inc.step(k)[0]);
                    }
                }
                if recorded(k + 1, steps, opts.record_every) {
                    path.times.push((k + 1) as f64 * dt);
                    path.values.push(f);
                }
            }
            path
        })
        .collect()
}

/// Closed-form `κ = 0` solution `√(z² + 4t)`, on the branch continuous from `z` at `t = 0`.
pub fn classical_exact_kappa0(z: C64, t: f64) -> C64 {
    let w = (z * z + C64::new(4.0 * t, 0.0)).sqrt();
    if (w - z).norm() <= (w + z).norm() {
        w
    } else {
        -w
    }
}

/// Euler flow of the whole series `f_t(z) = z + b₀ + b₋₁z⁻¹ + …` at infinity, truncated at `k`.
pub fn classical_series(kappa: f64, dt: f64, inc: &Increments, k: i64) -> Result<PowerSeries<f64>> {
    check_kappa(kappa)?;
    let sk = kappa.sqrt();
    let mut f = PowerSeries::<f64>::variable(0, Expansion::Infinity, k);
    for s in 0..inc.steps() {
        let r = f.recip()?.scale(&(2.0 * dt));
        let shift = PowerSeries::constant(GrassmannElement::scalar(0, -sk * inc.step(s)[0]), Expansion::Infinity, k);
        f = f.checked_add(&r)?.checked_add(&shift)?;
    }
    Ok(f)
}

/// How the θ-component drift of the N=1 point is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaDrift {
    /// `−H¹/(H⁰)²`, the value of `−2𝓛_{−2}` on the odd coordinate.
    Derived,
    /// `−H¹/H⁰` as displayed alongside the N=1 system.
    Printed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct N1Options {
    pub path: PathOptions,
    pub theta_drift: ThetaDrift,
    /// Unused Grassmann generators appended after ζ₁, ζ₂.
    pub extra_generators: u8,
}

impl Default for N1Options {
    fn default() -> Self {
        N1Options { path: PathOptions::default(), theta_drift: ThetaDrift::Derived, extra_generators: 0 }
    }
}

/// State of an N=1 point: `H⁰` even, `H¹` odd, both over `ζ₁, ζ₂, …, θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointStateN1 {
    pub t: f64,
    pub h0: G,
    pub h1: G,
}

#[derive(Clone, Debug, PartialEq)]
pub struct N1Path {
    pub layout: Layout,
    pub z0: C64,
    pub states: Vec<PointStateN1>,
    pub swallowed_at: Option<usize>,
}

/// Euler–Maruyama for the N=1 point system driven by `(B¹, B²)`.
pub fn simulate_n1_point(kappa: f64, z: C64, driver: &DriverConfig, trial: u64, opts: &N1Options) -> Result<N1Path> {
    check_kappa(kappa)?;
    driver.validate()?;
    if driver.dims != 2 {
        return Err(Error::Usage("the N=1 point system needs a two-dimensional driver".into()));
    }
    n1_with(kappa, z, driver.dt, &driver.increments(trial), opts)
}

pub fn n1_with(kappa: f64, z: C64, dt: f64, inc: &Increments, opts: &N1Options) -> Result<N1Path> {
    let layout = Layout::n1(2 + opts.extra_generators);
    let n = layout.n_total();
    let theta = G::generator(n, layout.theta())?;
    let z1 = G::generator(n, 1)?;
    let z2 = G::generator(n, 2)?;
    let z2z1 = &z2 * &z1;
    let sk = kappa.sqrt();
    let sk2 = (kappa / 2.0).sqrt();
    let mut h0 = G::scalar(n, z);
    let mut h1 = theta;
    let mut path = N1Path {
        layout,
        z0: z,
        states: vec![PointStateN1 { t: 0.0, h0: h0.clone(), h1: h1.clone() }],
        swallowed_at: None,
    };
    let steps = inc.steps();
    for k in 0..steps {
        if path.swallowed_at.is_none() {
            if h0.body().norm() < opts.path.swallow_eps {
                path.swallowed_at = Some(k);
            } else {
                let db = inc.step(k);
                let inv = h0.inverse()?;
                let h1_over = &h1 * &inv;
                let noise2 = (&(&z1 * &h1) + &(&z2 * &h1_over)).scale(&C64::new(sk2 * db[1], 0.0));
                let n0 = &(&(&h0 + &inv.scale(&C64::new(2.0 * dt, 0.0))) + &G::scalar(n, C64::new(-sk * db[0], 0.0))) + &noise2;
                let lin = match opts.theta_drift {
                    ThetaDrift::Derived => &h1_over * &inv,
                    ThetaDrift::Printed => h1_over.clone(),
                };
                let ito = (&z2z1 * &(&h1_over * &inv)).scale(&C64::new(kappa / 4.0, 0.0));
                let drift1 = (&ito - &lin).scale(&C64::new(dt, 0.0));
                let noise1 = (&(-&z1) - &(&z2 * &inv)).scale(&C64::new(sk2 * db[1], 0.0));
                h1 = &(&h1 + &drift1) + &noise1;
                h0 = n0;
            }
        }
        if recorded(k + 1, steps, opts.path.record_every) {
            path.states.push(PointStateN1 { t: (k + 1) as f64 * dt, h0: h0.clone(), h1: h1.clone() });
        }
    }
    Ok(path)
}

/// N=2 parameters `(κ, a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct N2Params {
    pub kappa: f64,
    pub a: f64,
}

impl N2Params {
    /// `κ = 1/α`, `a = (α−1)²/(tα)` as displayed for the N=2 process.
    pub fn printed_map(t: &Rational, alpha: &Rational) -> Result<(Rational, Rational)> {
        if alpha.signum() == 0 || t.signum() == 0 {
            return Err(Error::Degenerate("t and α must be nonzero".into()));
        }
        let one = Rational::integer(1);
        let am1 = alpha.clone() - one.clone();
        Ok((one / alpha.clone(), am1.clone() * am1 / (t.clone() * alpha.clone())))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointStateN2 {
    pub t: f64,
    pub h0: G,
    pub hp: G,
    pub hm: G,
}

#[derive(Clone, Debug, PartialEq)]
pub struct N2Path {
    pub layout: Layout,
    pub z0: C64,
    pub states: Vec<PointStateN2>,
    pub swallowed_at: Option<usize>,
}

/// Euler–Maruyama for the N=2 point system driven by a single `B`.
pub fn simulate_n2_point(params: &N2Params, z: C64, driver: &DriverConfig, trial: u64, opts: &PathOptions) -> Result<N2Path> {
    check_kappa(params.kappa)?;
    driver.validate()?;
    n2_with(params, z, driver.dt, &driver.increments(trial), opts, 0)
}

pub fn n2_with(params: &N2Params, z: C64, dt: f64, inc: &Increments, opts: &PathOptions, extra: u8) -> Result<N2Path> {
    let layout = Layout::n2(2 + extra);
    let n = layout.n_total();
    let z1 = G::generator(n, 1)?;
    let z2 = G::generator(n, 2)?;
    let sk = params.kappa.sqrt();
    let mut h0 = G::scalar(n, z);
    let mut hp = G::generator(n, layout.theta_p())?;
    let mut hm = G::generator(n, layout.theta_m())?;
    let mut path = N2Path {
        layout,
        z0: z,
        states: vec![PointStateN2 { t: 0.0, h0: h0.clone(), hp: hp.clone(), hm: hm.clone() }],
        swallowed_at: None,
    };
    let steps = inc.steps();
    for k in 0..steps {
        if path.swallowed_at.is_none() {
            if h0.body().norm() < opts.swallow_eps {
                path.swallowed_at = Some(k);
            } else {
                let db = inc.step(k)[0];
                let inv = h0.inverse()?;
                let noise = (&(&z1 * &hp) + &(&z2 * &hm)).scale(&C64::new(sk * db, 0.0));
                let n0 = &(&h0 + &G::scalar(n, C64::new(-dt, 0.0))) + &noise;
                let ad = C64::new(params.a * dt, 0.0);
                let np = &(&hp - &(&hp * &inv).scale(&ad)) - &z2.scale(&C64::new(sk * db, 0.0));
                let nm = &(&hm + &(&hm * &inv).scale(&ad)) - &z1.scale(&C64::new(sk * db, 0.0));
                h0 = n0;
                hp = np;
                hm = nm;
            }
        }
        if recorded(k + 1, steps, opts.record_every) {
            path.states.push(PointStateN2 { t: (k + 1) as f64 * dt, h0: h0.clone(), hp: hp.clone(), hm: hm.clone() });
        }
    }
    Ok(path)
}
