use std::fmt;

use anyhow::{bail, Result};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use rispls_core::mcsim::{estimate_metrics, McMetrics, Scenario, MIN_SAMPLES};
use rispls_core::secrecy::{
    avg_secrecy_rate_full, avg_secrecy_rate_partial, db_to_linear, ergodic_capacity_b,
    ergodic_capacity_e, prob_zero_secrecy, LinkBudget, Path, SecrecyConfig, Variant,
};
use rispls_core::{mg_from_nakagami, mg_from_rice, CascadeFit, McEstimate};

/// Expected leakage events below which a Monte Carlo estimate is flagged.
pub const MIN_EXPECTED_EVENTS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize)]
pub enum Metric {
    #[value(name = "p_leak")]
    #[serde(rename = "p_leak")]
    PLeak,
    #[value(name = "c_s_full")]
    #[serde(rename = "c_s_full")]
    CsFull,
    #[value(name = "r_s_partial")]
    #[serde(rename = "r_s_partial")]
    RsPartial,
    #[value(name = "capacity_b")]
    #[serde(rename = "capacity_b")]
    CapacityB,
    #[value(name = "capacity_e")]
    #[serde(rename = "capacity_e")]
    CapacityE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMethod {
    Closed,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SweepVar {
    #[value(name = "rho_b_db")]
    #[serde(rename = "rho_b_db")]
    RhoBDb,
    #[value(name = "rho_ratio_db")]
    #[serde(rename = "rho_ratio_db")]
    RhoRatioDb,
    #[value(name = "M")]
    #[serde(rename = "M")]
    Elements,
    /// Single-point evaluation; no swept variable.
    #[value(skip)]
    #[serde(rename = "none")]
    None,
}

macro_rules! display_as_value {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self.to_possible_value() {
                    Some(v) => f.write_str(v.get_name()),
                    None => f.write_str("none"),
                }
            }
        }
    )*};
}
display_as_value!(Metric, EvalMethod, SweepVar);

/// Everything needed to produce one table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub metrics: Vec<Metric>,
    pub methods: Vec<EvalMethod>,
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Fixed parameters; each list spans one curve per entry.
    pub elements: Vec<usize>,
    pub rho_b_db: Vec<f64>,
    pub rho_e_db: Vec<f64>,
    pub kr_db: f64,
    pub terms: usize,
    pub m_nakagami: f64,
    pub samples: u64,
    pub seed: u64,
    pub variant: Variant,
}

/// One evaluation site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub elements: usize,
    pub rho_b_db: f64,
    pub rho_e_db: f64,
    pub sweep_value: Option<f64>,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M={} rho_b_db={} rho_e_db={}",
            self.elements, self.rho_b_db, self.rho_e_db
        )
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub metric: Metric,
    pub method: EvalMethod,
    pub sweep_var: SweepVar,
    pub sweep_value: Option<f64>,
    #[serde(rename = "M")]
    pub elements: usize,
    #[serde(rename = "K_r_db")]
    pub kr_db: f64,
    pub m: f64,
    pub rho_b_db: f64,
    pub rho_e_db: f64,
    pub value: f64,
    pub std_error: Option<f64>,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub rows: Vec<Row>,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            bail!("no metric requested");
        }
        if self.methods.is_empty() {
            bail!("no method requested; choose from closed, quadrature, mc");
        }
        if self.var != SweepVar::None {
            if !(self.step > 0.0) || !self.step.is_finite() {
                bail!("sweep step must be positive, got {}", self.step);
            }
            if !(self.start <= self.stop) {
                bail!("empty sweep range: start {} exceeds stop {}", self.start, self.stop);
            }
        }
        if self.var == SweepVar::Elements {
            for v in self.sweep_values() {
                if v < 1.0 || v.fract() != 0.0 {
                    bail!("M sweep values must be positive integers, got {v}");
                }
            }
        }
        if self.var != SweepVar::Elements && self.elements.iter().any(|&e| e == 0) {
            bail!("M must be at least 1");
        }
        for (name, list) in [
            ("M", self.elements.len()),
            ("rho_b_db", self.rho_b_db.len()),
            ("rho_e_db", self.rho_e_db.len()),
        ] {
            if list == 0 {
                bail!("{name} needs at least one value");
            }
        }
        if self.methods.contains(&EvalMethod::Mc) && self.samples < MIN_SAMPLES {
            bail!("--samples must be at least {MIN_SAMPLES}, got {}", self.samples);
        }
        Ok(())
    }

    /// `start, start + step, …` up to `stop`, without accumulated drift.
    pub fn sweep_values(&self) -> Vec<f64> {
        if self.var == SweepVar::None {
            return vec![];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }

    /// Sites in output order: curve by curve, then along the sweep.
    pub fn points(&self) -> Vec<Point> {
        let values = self.sweep_values();
        let elements: &[usize] = if self.var == SweepVar::Elements { &[0] } else { &self.elements };
        let rho_b: &[f64] = match self.var {
            SweepVar::RhoBDb | SweepVar::RhoRatioDb => &[f64::NAN],
            _ => &self.rho_b_db,
        };
        let mut out = Vec::new();
        for &e in elements {
            for &re in &self.rho_e_db {
                for &rb in rho_b {
                    let base = Point {
                        elements: e,
                        rho_b_db: rb,
                        rho_e_db: re,
                        sweep_value: None,
                    };
                    if self.var == SweepVar::None {
                        out.push(base);
                        continue;
                    }
                    for &v in &values {
                        let mut p = base;
                        p.sweep_value = Some(v);
                        match self.var {
                            SweepVar::RhoBDb => p.rho_b_db = v,
                            SweepVar::RhoRatioDb => p.rho_b_db = v + re,
                            SweepVar::Elements => p.elements = v as usize,
                            SweepVar::None => {}
                        }
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    fn needs_analytic(&self) -> bool {
        self.methods.iter().any(|&m| m != EvalMethod::Mc)
    }
}

fn path_of(method: EvalMethod) -> Path {
    match method {
        EvalMethod::Closed => Path::ClosedForm,
        _ => Path::Quadrature,
    }
}

pub fn analytic_metric(cfg: &SecrecyConfig<f64>, metric: Metric, path: Path) -> rispls_core::Result<f64> {
    match metric {
        Metric::PLeak => prob_zero_secrecy(cfg, path),
        Metric::CsFull => avg_secrecy_rate_full(cfg, path),
        Metric::RsPartial => avg_secrecy_rate_partial(cfg, path),
        Metric::CapacityB => ergodic_capacity_b(cfg, path),
        Metric::CapacityE => ergodic_capacity_e(cfg, path),
    }
}

fn pick(mc: &McMetrics, metric: Metric) -> McEstimate {
    match metric {
        Metric::PLeak => mc.p_leak,
        Metric::CsFull => mc.c_s_full,
        Metric::RsPartial => mc.r_s_partial,
        Metric::CapacityB => mc.capacity_b,
        Metric::CapacityE => mc.capacity_e,
    }
}

/// Model inputs of one point, with the dB budgets converted here and only here.
pub struct PointModel {
    pub scenario: Scenario,
    pub config: Option<SecrecyConfig<f64>>,
}

pub fn build_model(spec: &SweepSpec, point: &Point, analytic: bool) -> rispls_core::Result<PointModel> {
    let hop = mg_from_rice(db_to_linear(spec.kr_db), spec.terms)?;
    let eve = mg_from_nakagami(spec.m_nakagami)?;
    let budget = LinkBudget::from_db(point.rho_b_db, point.rho_e_db)?;
    let config = if analytic {
        let fit = CascadeFit::from_links(&hop, &hop, point.elements)?;
        Some(SecrecyConfig::new(fit, eve.clone(), budget)?.with_variant(spec.variant))
    } else {
        None
    };
    Ok(PointModel {
        scenario: Scenario {
            hop_a: hop.clone(),
            hop_r: hop,
            elements: point.elements,
            eve,
            budget,
        },
        config,
    })
}

fn eval_point(spec: &SweepSpec, point: &Point) -> SweepOutcome {
    let mut out = SweepOutcome::default();
    let model = match build_model(spec, point, spec.needs_analytic()) {
        Ok(m) => m,
        Err(e) => {
            out.errors.push(format!("{point}: {e}"));
            return out;
        }
    };
    let mc = if spec.methods.contains(&EvalMethod::Mc) {
        match estimate_metrics(&model.scenario, spec.samples, spec.seed, 0) {
            Ok(m) => Some(m),
            Err(e) => {
                out.errors.push(format!("{point} mc: {e}"));
                None
            }
        }
    } else {
        None
    };
    for &metric in &spec.metrics {
        let mut leak_estimate = None;
        for &method in &spec.methods {
            let (value, se) = match (method, &model.config, &mc) {
                (EvalMethod::Mc, _, Some(m)) => {
                    let e = pick(m, metric);
                    (e.value, Some(e))
                }
                (EvalMethod::Mc, _, None) => continue,
                (_, Some(cfg), _) => match analytic_metric(cfg, metric, path_of(method)) {
                    Ok(v) => (v, None),
                    Err(e) => {
                        out.errors.push(format!("{point} {metric}/{method}: {e}"));
                        continue;
                    }
                },
                (_, None, _) => continue,
            };
            // the analytic value, when present, predicts the event count
            if method != EvalMethod::Mc || leak_estimate.is_none() {
                leak_estimate = Some(value);
            }
            out.rows.push(Row {
                metric,
                method,
                sweep_var: spec.var,
                sweep_value: point.sweep_value,
                elements: point.elements,
                kr_db: spec.kr_db,
                m: spec.m_nakagami,
                rho_b_db: point.rho_b_db,
                rho_e_db: point.rho_e_db,
                value,
                std_error: se.map(|e| e.std_error),
                n_samples: se.map(|e| e.n_samples),
                seed: se.map(|e| e.seed),
            });
        }
        if metric == Metric::PLeak && mc.is_some() {
            if let Some(p) = leak_estimate {
                let expected = p * spec.samples as f64;
                if expected < MIN_EXPECTED_EVENTS {
                    let needed = if p > 0.0 {
                        format!("at least {:.0}", (MIN_EXPECTED_EVENTS / p).ceil())
                    } else {
                        "far more".to_string()
                    };
                    out.warnings.push(format!(
                        "{point}: about {expected:.1} leakage events expected from {} samples; \
                         the Monte Carlo estimate is unreliable, use {needed} samples",
                        spec.samples
                    ));
                }
            }
        }
    }
    out
}

/// Evaluates every point concurrently; rows keep the sweep order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let parts: Vec<SweepOutcome> = spec.points().par_iter().map(|p| eval_point(spec, p)).collect();
    let mut out = SweepOutcome::default();
    for p in parts {
        out.rows.extend(p.rows);
        out.errors.extend(p.errors);
        out.warnings.extend(p.warnings);
    }
    Ok(out)
}
