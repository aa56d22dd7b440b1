use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use susle::loewner_sde::{
    simulate_classical, simulate_n1_point, simulate_n2_point, DriverConfig, GroupScheme, N1Options, N2Params,
    PathOptions, ThetaDrift,
};
use susle::martingale::{
    build_model, drift_is_null, mc_martingale, ns1_weights, ns2_compare, ns2_printed, observable_mc, virasoro_weights,
    McOptions, ModelParams, ModelTag,
};
use susle::superalgebra::{
    fit_singular_relations, monomial_to_string, parse_algebra, solve_coefficients, solve_singular_params, Algebra,
    SingularTemplate, VermaModule, VermaVector, WeightName, Weights,
};
use susle::superseries::{expmap_coordinates, expmap_forward, PowerSeries};
use susle::{GrassmannElement, Rational, C64};

use crate::args::*;
use crate::error::{CliError, CliResult};

/// Outcome of a command before it is wrapped and written.
pub struct Report {
    /// `None` for commands without a pass/fail notion.
    pub verdict: Option<bool>,
    pub result: Value,
    /// Pre-rendered CSV body, when that format was requested.
    pub csv: Option<String>,
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn model_params(p: &ParamArgs) -> ModelParams {
    ModelParams {
        kappa: p.kappa.clone(),
        c: p.c.clone(),
        h: p.h.clone(),
        alpha: p.alpha.clone(),
        t: p.t.clone(),
        a: p.a.clone(),
    }
}

/// Parses `x+yi`, `x-yi`, `yi`, `x` or `x,y`.
pub fn parse_point(s: &str) -> CliResult<C64> {
    let bad = || CliError::Usage(format!("cannot parse point '{s}'"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C64::new(num(re)?, num(im)?));
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(C64::new(num(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => num(other),
    };
    let z = match split {
        Some(k) => C64::new(num(&body[..k])?, imag(&body[k..])?),
        None => C64::new(0.0, imag(body)?),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

fn driver(d: &DriverArgs, dims: usize) -> CliResult<DriverConfig> {
    Ok(match (d.steps, d.horizon) {
        (Some(n), None) => DriverConfig::new(d.seed, d.dt, n, dims)?,
        (None, Some(t)) => DriverConfig::with_horizon(d.seed, d.dt, t, dims)?,
        _ => return usage("give exactly one of --steps and --horizon"),
    })
}

// ---------------------------------------------------------------------------

fn default_monomials(alg: Algebra) -> &'static [&'static str] {
    match alg {
        Algebra::Virasoro => &["L-2", "L-1 L-1"],
        Algebra::Ns1 => &["L-2", "L-1 L-1", "G-3/2 G-1/2"],
        Algebra::Ns2(_) => &["L-1", "Gp-1/2 Gm-1/2", "J-1"],
    }
}

fn template_for(alg: Algebra, spec: &str) -> CliResult<SingularTemplate> {
    let s = spec.trim();
    let names: Vec<&str> = match (s, alg) {
        ("default", _) | ("level2", Algebra::Virasoro | Algebra::Ns1) | ("level1", Algebra::Ns2(_)) => {
            default_monomials(alg).to_vec()
        }
        ("level1" | "level2", _) => return usage(format!("no {s} template for {}", alg.name())),
        _ => s.split(',').map(str::trim).collect(),
    };
    Ok(SingularTemplate::new(alg, &names)?)
}

fn weights_json(w: &Weights) -> Value {
    json!({"c": w.c.to_string(), "h": w.h.to_string(), "alpha": w.alpha.to_string()})
}

fn closed_form_check(module: &VermaModule, v: &VermaVector) -> CliResult<Report> {
    let rep = module.is_singular(v)?;
    Ok(Report {
        verdict: Some(rep.pass),
        result: json!({
            "mode": "check",
            "weights": weights_json(module.weights()),
            "vector": v.to_json(),
            "vector_text": v.to_string(),
            "report": rep.to_json(),
        }),
        csv: None,
    })
}

pub fn check_singular(a: &CheckSingular) -> CliResult<Report> {
    let alg = parse_algebra(&a.algebra)?;
    let p = &a.params;
    if p.a.is_some() {
        return usage("--a is a drift parameter; it has no meaning for check-singular");
    }
    let (mut c, mut h) = (p.c.clone(), p.h.clone());
    let alpha = p.alpha.clone().unwrap_or_else(|| q(0, 1));
    if let Some(k) = &p.kappa {
        if c.is_some() || h.is_some() {
            return usage("--kappa fixes c and h; drop --c/--h");
        }
        let (ck, hk) = match alg {
            Algebra::Virasoro => virasoro_weights(k)?,
            Algebra::Ns1 => ns1_weights(k)?,
            Algebra::Ns2(_) => return usage("ns2 weights come from --t and --alpha, not --kappa"),
        };
        c = Some(ck);
        h = Some(hk);
    }
    if let Some(t) = &p.t {
        if !matches!(alg, Algebra::Ns2(_)) {
            return usage("--t only applies to ns2");
        }
        let Some(al) = &p.alpha else { return usage("--t needs --alpha") };
        let pr = ns2_printed(t, al)?;
        c.get_or_insert(pr.c);
        h.get_or_insert(pr.h);
    }

    if a.template.is_none() && a.coeffs.is_none() {
        if let (Some(k), Some(cc), Some(hh)) = (&p.kappa, &c, &h) {
            let module = VermaModule::new(alg, Weights::new(cc.clone(), hh.clone()));
            let v = match alg {
                Algebra::Virasoro => VermaVector::from_rational_terms(alg, &[("L-2", q(-2, 1)), ("L-1 L-1", k.clone() / q(2, 1))])?,
                _ => {
                    let x = -(q(3, 4) / hh.clone());
                    VermaVector::from_rational_terms(alg, &[("L-2", q(1, 1)), ("L-1 L-1", x.clone()), ("G-3/2 G-1/2", -x)])?
                }
            };
            return closed_form_check(&module, &v);
        }
        if let (Some(t), Some(al)) = (&p.t, &p.alpha) {
            if *al == q(1, 1) {
                return Err(susle::Error::Degenerate("alpha = 1 makes the printed vector undefined".into()).into());
            }
            let module = VermaModule::new(alg, Weights::with_alpha(c.clone().unwrap(), h.clone().unwrap(), al.clone()));
            let v = VermaVector::from_rational_terms(
                alg,
                &[
                    ("L-1", q(1, 1)),
                    ("Gp-1/2 Gm-1/2", q(1, 1) / (al.clone() - q(1, 1))),
                    ("J-1", (al.clone() + q(1, 1)) / t.clone()),
                ],
            )?;
            let mut out = closed_form_check(&module, &v)?;
            out.result["comparison"] = ns2_compare(t, al)?.to_json();
            return Ok(out);
        }
    }

    let template = template_for(alg, a.template.as_deref().unwrap_or("default"))?;
    let monos: Vec<String> = template.monomials.iter().map(|m| monomial_to_string(m)).collect();

    if let Some(cs) = &a.coeffs {
        let coeffs: Vec<Rational> = cs
            .split(',')
            .map(|x| x.trim().parse::<Rational>())
            .collect::<Result<_, _>>()?;
        if coeffs.len() != monos.len() {
            return usage(format!("{} coefficients for {} template monomials", coeffs.len(), monos.len()));
        }
        let (Some(cc), Some(hh)) = (c, h) else { return usage("checking a given vector needs --c and --h (or --kappa)") };
        let module = VermaModule::new(alg, Weights::with_alpha(cc, hh, alpha));
        return closed_form_check(&module, &template.vector(&coeffs)?);
    }

    let unknown = match a.solve_for {
        Some(Unknown::C) => WeightName::C,
        Some(Unknown::H) => WeightName::H,
        Some(Unknown::Alpha) => WeightName::Alpha,
        None if h.is_none() && c.is_some() => WeightName::H,
        None => WeightName::C,
    };
    let zero = || q(0, 1);
    let base = Weights::with_alpha(c.clone().unwrap_or_else(zero), h.clone().unwrap_or_else(zero), alpha.clone());
    for (w, v) in [(WeightName::C, &c), (WeightName::H, &h)] {
        if w != unknown && v.is_none() {
            return usage(format!("--{} is required when solving for {}", w.label(), unknown.label()));
        }
    }
    let solve = solve_singular_params(&template, &base, unknown)?;
    let verdict = solve.solutions.iter().any(|s| s.verified());
    let at_input = match (&c, &h) {
        (Some(cc), Some(hh)) => {
            let w = Weights::with_alpha(cc.clone(), hh.clone(), alpha.clone());
            Some(match solve_coefficients(&template, &w)? {
                Some(s) => json!({"weights": weights_json(&w), "singular": s.verified(), "coefficients":
                    s.coefficients.iter().map(|x| x.to_string()).collect::<Vec<_>>()}),
                None => json!({"weights": weights_json(&w), "singular": false}),
            })
        }
        _ => None,
    };
    let relation = if unknown == WeightName::C {
        let values: Vec<Rational> = (1..=12).map(|i| q(i, 5)).collect();
        let fit = fit_singular_relations(&template, &base, WeightName::H, &values, WeightName::C, 4)?;
        let coeffs: Map<String, Value> = monos
            .iter()
            .zip(&fit.coefficients)
            .skip(1)
            .map(|(m, f)| (m.clone(), f.as_ref().map(|r| Value::String(r.render("h"))).unwrap_or(Value::Null)))
            .collect();
        json!({
            "variable": "h",
            "samples": fit.samples,
            "all_verified": fit.all_verified,
            "c": fit.weight.as_ref().map(|r| r.render("h")),
            "coefficients": coeffs,
        })
    } else {
        Value::Null
    };
    Ok(Report {
        verdict: Some(verdict),
        result: json!({
            "mode": "solve",
            "template": monos,
            "unknown": unknown.label(),
            "fixed": weights_json(&base),
            "solve": solve.to_json(&template),
            "relation": relation,
            "at_input": at_input,
        }),
        csv: None,
    })
}

// ---------------------------------------------------------------------------

pub fn drift_check(a: &DriftCheck) -> CliResult<Report> {
    let tag: ModelTag = a.model.parse()?;
    let model = build_model(tag, &model_params(&a.params))?;
    let rep = drift_is_null(&model)?;
    let mut result = rep.to_json();
    result["model"] = json!(tag.name());
    result["params"] = model.params_json();
    Ok(Report { verdict: Some(rep.pass), result, csv: None })
}

// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "time,trial,point-id,component-monomial,re,im,flag";

struct Rows {
    csv: String,
    json: Vec<Value>,
}

impl Rows {
    fn push(&mut self, t: f64, trial: u64, point: usize, comp: &str, v: C64, swallowed: bool) {
        let flag = if swallowed { "swallowed" } else { "ok" };
        let _ = writeln!(self.csv, "{t},{trial},{point},{comp},{},{},{flag}", v.re, v.im);
        self.json.push(json!([t, trial, point, comp, v.re, v.im, flag]));
    }

    /// Body row always, then every nonzero soul term.
    fn push_grassmann(&mut self, t: f64, trial: u64, point: usize, name: &str, g: &GrassmannElement<C64>, swallowed: bool) {
        self.push(t, trial, point, &format!("{name}[]"), g.body(), swallowed);
        for (mask, v) in g.terms() {
            if *mask != 0 {
                let idx: Vec<String> = (0..64).filter(|b| mask >> b & 1 == 1).map(|b| (b + 1).to_string()).collect();
                self.push(t, trial, point, &format!("{name}[{}]", idx.join(" ")), *v, swallowed);
            }
        }
    }
}

fn step_of(t: f64, dt: f64) -> usize {
    (t / dt).round() as usize
}

pub fn simulate(a: &Simulate) -> CliResult<Report> {
    let points: Vec<C64> = a.points.iter().map(|s| parse_point(s)).collect::<CliResult<_>>()?;
    if a.trials == 0 {
        return usage("--trials must be at least 1");
    }
    let p = &a.params;
    let dims = if a.model == SimModel::Ns1 { 2 } else { 1 };
    let d = driver(&a.driver, dims)?;
    let opts = PathOptions { swallow_eps: a.swallow_eps, record_every: a.record_every };
    if !(a.swallow_eps >= 0.0) || a.record_every == 0 {
        return usage("--swallow-eps must be non-negative and --record-every positive");
    }
    let kappa_f = |k: &Option<Rational>| -> CliResult<f64> {
        match k {
            Some(k) => Ok(k.to_f64()),
            None => usage("--kappa is required"),
        }
    };
    let n2 = if a.model == SimModel::Ns2 {
        let (k, aa) = match (&p.kappa, &p.a, &p.t, &p.alpha) {
            (Some(k), Some(aa), _, _) => (k.clone(), aa.clone()),
            (None, None, Some(t), Some(al)) => N2Params::printed_map(t, al)?,
            _ => return usage("ns2 needs --kappa and --a, or --t and --alpha"),
        };
        Some(N2Params { kappa: k.to_f64(), a: aa.to_f64() })
    } else {
        None
    };
    let mut rows = Rows { csv: format!("{CSV_HEADER}\n"), json: Vec::new() };
    for trial in 0..a.trials {
        match a.model {
            SimModel::Classical => {
                let paths = simulate_classical(kappa_f(&p.kappa)?, &points, &d, trial, &opts)?;
                for (pid, path) in paths.iter().enumerate() {
                    for (t, v) in path.times.iter().zip(&path.values) {
                        let sw = path.swallowed_at.is_some_and(|k| step_of(*t, d.dt) >= k);
                        rows.push(*t, trial, pid, "f[]", *v, sw);
                    }
                }
            }
            SimModel::Ns1 => {
                let o = N1Options {
                    path: opts.clone(),
                    theta_drift: match a.theta_drift {
                        ThetaDriftArg::Derived => ThetaDrift::Derived,
                        ThetaDriftArg::Printed => ThetaDrift::Printed,
                    },
                    extra_generators: 0,
                };
                let k = kappa_f(&p.kappa)?;
                for (pid, z) in points.iter().enumerate() {
                    let path = simulate_n1_point(k, *z, &d, trial, &o)?;
                    for s in &path.states {
                        let sw = path.swallowed_at.is_some_and(|k| step_of(s.t, d.dt) >= k);
                        rows.push_grassmann(s.t, trial, pid, "H0", &s.h0, sw);
                        rows.push_grassmann(s.t, trial, pid, "H1", &s.h1, sw);
                    }
                }
            }
            SimModel::Ns2 => {
                let params = n2.as_ref().expect("set above");
                for (pid, z) in points.iter().enumerate() {
                    let path = simulate_n2_point(params, *z, &d, trial, &opts)?;
                    for s in &path.states {
                        let sw = path.swallowed_at.is_some_and(|k| step_of(s.t, d.dt) >= k);
                        rows.push_grassmann(s.t, trial, pid, "H0", &s.h0, sw);
                        rows.push_grassmann(s.t, trial, pid, "H+", &s.hp, sw);
                        rows.push_grassmann(s.t, trial, pid, "H-", &s.hm, sw);
                    }
                }
            }
        }
    }
    let result = json!({
        "columns": CSV_HEADER.split(',').collect::<Vec<_>>(),
        "rows": rows.json,
    });
    let csv = (a.format == Format::Csv).then_some(rows.csv);
    Ok(Report { verdict: None, result, csv })
}

// ---------------------------------------------------------------------------

pub fn martingale_mc(a: &MartingaleMc) -> CliResult<Report> {
    if a.model == McModel::Observable {
        let Some(k) = &a.params.kappa else { return usage("--kappa is required") };
        let Some(pt) = &a.point else { return usage("the observable model needs --point") };
        let z = parse_point(pt)?;
        let d = driver(&a.driver, 1)?;
        let stats = observable_mc(k, z, &d, a.trials)?;
        let mut result = stats.to_json();
        result["model"] = json!("observable");
        result["kappa"] = json!(k.to_string());
        result["point"] = json!([z.re, z.im]);
        return Ok(Report { verdict: Some(stats.pass), result, csv: None });
    }
    if a.point.is_some() {
        return usage("--point only applies to the observable model");
    }
    let tag = match a.model {
        McModel::Vir => ModelTag::Virasoro,
        McModel::Ns1 => ModelTag::Ns1,
        _ => ModelTag::Ns2,
    };
    let Some(level) = &a.level else { return usage("--level is required") };
    let twice = level.clone() * q(2, 1);
    if !twice.is_integer() || twice.signum() < 0 {
        return usage("--level must be a non-negative multiple of 1/2");
    }
    let level2 = twice.to_f64() as i32;
    let model = build_model(tag, &model_params(&a.params))?;
    let d = driver(&a.driver, model.noise.len())?;
    let opts = McOptions {
        scheme: match a.scheme {
            Scheme::Ito => GroupScheme::ItoCorrected,
            Scheme::Literal => GroupScheme::Literal,
        },
        quotient: !a.no_quotient,
    };
    let rep = mc_martingale(&model, level2, &d, a.trials, &opts)?;
    Ok(Report { verdict: Some(rep.verdict), result: rep.to_json(), csv: None })
}

// ---------------------------------------------------------------------------

pub fn expmap(a: &Expmap) -> CliResult<Report> {
    let text = match (&a.input, &a.series) {
        (Some(p), None) if p.as_os_str() == "-" => std::io::read_to_string(std::io::stdin())?,
        (Some(p), None) => std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?,
        (None, Some(s)) => s.clone(),
        _ => return usage("give the series with --input or --series"),
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("series is not valid JSON: {e}")))?;
    let rho = PowerSeries::<Rational>::from_json(&v)?;
    let coords = expmap_coordinates(&rho)?;
    let back = expmap_forward(&coords, rho.trunc())?;
    let exact = back.checked_sub(&rho)?.is_zero();
    let vs: Map<String, Value> = coords.v.iter().map(|(i, g)| (i.to_string(), g.to_json())).collect();
    Ok(Report {
        verdict: Some(exact),
        result: json!({
            "trunc": rho.trunc(),
            "v0": coords.v0.to_json(),
            "v": vs,
            "round_trip_exact": exact,
        }),
        csv: None,
    })
}
