//! Layered settings: built-in defaults, then a preset, then a config file,
//! then command-line flags.
//!
//! The file is plain `key = value` text grouped under `[sweep]`, `[channel]`,
//! `[surface]`, `[budget]`, `[mc]` and `[output]`. Lists are comma-separated.

use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use ini::Ini;

use rispls_core::secrecy::Variant;

use crate::sweep::{EvalMethod, Metric, SweepSpec, SweepVar};

pub const DEFAULT_KR_DB: f64 = 5.0;
pub const DEFAULT_TERMS: usize = 20;
pub const DEFAULT_NAKAGAMI_M: f64 = 3.0;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Leakage probability against ρ_B/ρ_E for M ∈ {4, 8, 16, 32}.
    Fig2,
    /// Full-CSI secrecy rate against ρ_B at ρ_E = 0 dB for M ∈ {4, 8, 16}.
    Fig3,
    /// Partial-CSI secrecy rate against ρ_B for ρ_E ∈ {0, 5} dB.
    Fig4,
    /// Both secrecy rates against M at ρ_B = 0 dB for ρ_E ∈ {−5, 0} dB.
    Fig5,
}

/// Every tunable; `None` defers to the layer below.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub preset: Option<Preset>,
    pub metrics: Option<Vec<Metric>>,
    pub methods: Option<Vec<EvalMethod>>,
    pub var: Option<SweepVar>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub elements: Option<Vec<usize>>,
    pub kr_db: Option<f64>,
    pub terms: Option<usize>,
    pub m_nakagami: Option<f64>,
    pub rho_b_db: Option<Vec<f64>>,
    pub rho_e_db: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub json: Option<bool>,
    pub paper_literal: Option<bool>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    /// Fields set in `top` win.
    pub fn overlay(self, top: Settings) -> Settings {
        let base = self;
        overlay_fields!(base, top; preset, metrics, methods, var, start, stop, step, elements,
            kr_db, terms, m_nakagami, rho_b_db, rho_e_db, samples, seed, json, paper_literal, out)
    }

    pub fn preset_settings(preset: Preset) -> Settings {
        let both = Some(vec![EvalMethod::Closed, EvalMethod::Mc]);
        match preset {
            Preset::Fig2 => Settings {
                metrics: Some(vec![Metric::PLeak]),
                methods: both,
                var: Some(SweepVar::RhoRatioDb),
                start: Some(-16.0),
                stop: Some(12.0),
                step: Some(1.0),
                elements: Some(vec![4, 8, 16, 32]),
                rho_e_db: Some(vec![0.0]),
                ..Default::default()
            },
            Preset::Fig3 => Settings {
                metrics: Some(vec![Metric::CsFull]),
                methods: both,
                var: Some(SweepVar::RhoBDb),
                start: Some(0.0),
                stop: Some(20.0),
                step: Some(1.0),
                elements: Some(vec![4, 8, 16]),
                rho_e_db: Some(vec![0.0]),
                ..Default::default()
            },
            Preset::Fig4 => Settings {
                metrics: Some(vec![Metric::RsPartial]),
                methods: both,
                var: Some(SweepVar::RhoBDb),
                start: Some(-10.0),
                stop: Some(10.0),
                step: Some(1.0),
                elements: Some(vec![8, 16, 32]),
                rho_e_db: Some(vec![0.0, 5.0]),
                ..Default::default()
            },
            Preset::Fig5 => Settings {
                metrics: Some(vec![Metric::RsPartial, Metric::CsFull]),
                methods: both,
                var: Some(SweepVar::Elements),
                start: Some(4.0),
                stop: Some(30.0),
                step: Some(2.0),
                rho_b_db: Some(vec![0.0]),
                rho_e_db: Some(vec![-5.0, 0.0]),
                ..Default::default()
            },
        }
    }

    /// Resolves a sweep; `var = None` yields a single-point spec.
    pub fn to_spec(&self, var: Option<SweepVar>) -> Result<SweepSpec> {
        let var = var.or(self.var);
        let (var, start, stop, step) = match var {
            None | Some(SweepVar::None) => (SweepVar::None, 0.0, 0.0, 1.0),
            Some(v) => {
                let need = |x: Option<f64>, name: &str| {
                    x.ok_or_else(|| anyhow!("sweep over {v} needs --{name} (or a preset)"))
                };
                (v, need(self.start, "start")?, need(self.stop, "stop")?, need(self.step, "step")?)
            }
        };
        let spec = SweepSpec {
            metrics: self.metrics.clone().ok_or_else(|| anyhow!("no metric given; use --metric"))?,
            methods: self.methods.clone().unwrap_or_else(|| vec![EvalMethod::Closed]),
            var,
            start,
            stop,
            step,
            elements: self.elements.clone().unwrap_or_else(|| vec![4]),
            rho_b_db: self.rho_b_db.clone().unwrap_or_else(|| vec![0.0]),
            rho_e_db: self.rho_e_db.clone().unwrap_or_else(|| vec![0.0]),
            kr_db: self.kr_db.unwrap_or(DEFAULT_KR_DB),
            terms: self.terms.unwrap_or(DEFAULT_TERMS),
            m_nakagami: self.m_nakagami.unwrap_or(DEFAULT_NAKAGAMI_M),
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            variant: if self.paper_literal.unwrap_or(false) {
                Variant::PaperLiteral
            } else {
                Variant::Corrected
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_list<T: FromStr>(raw: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}

fn parse_enum_list<T: ValueEnum>(raw: &str) -> std::result::Result<Vec<T>, String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| T::from_str(s, false))
        .collect()
}

fn parse_one<T: FromStr>(raw: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    raw.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", raw.trim()))
}

fn parse_bool(raw: &str) -> std::result::Result<bool, String> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn apply(s: &mut Settings, section: &str, key: &str, raw: &str) -> std::result::Result<(), String> {
    match (section, key) {
        ("sweep", "preset") => s.preset = Some(Preset::from_str(raw.trim(), true)?),
        ("sweep", "metric") => s.metrics = Some(parse_enum_list(raw)?),
        ("sweep", "method") => s.methods = Some(parse_enum_list(raw)?),
        ("sweep", "var") => s.var = Some(SweepVar::from_str(raw.trim(), false)?),
        ("sweep", "start") => s.start = Some(parse_one(raw)?),
        ("sweep", "stop") => s.stop = Some(parse_one(raw)?),
        ("sweep", "step") => s.step = Some(parse_one(raw)?),
        ("channel", "kr_db") => s.kr_db = Some(parse_one(raw)?),
        ("channel", "terms") => s.terms = Some(parse_one(raw)?),
        ("channel", "m") => s.m_nakagami = Some(parse_one(raw)?),
        ("surface", "M") => s.elements = Some(parse_list(raw)?),
        ("budget", "rho_b_db") => s.rho_b_db = Some(parse_list(raw)?),
        ("budget", "rho_e_db") => s.rho_e_db = Some(parse_list(raw)?),
        ("mc", "samples") => s.samples = Some(parse_one(raw)?),
        ("mc", "seed") => s.seed = Some(parse_one(raw)?),
        ("output", "json") => s.json = Some(parse_bool(raw)?),
        ("output", "paper_literal") => s.paper_literal = Some(parse_bool(raw)?),
        ("output", "out") => s.out = Some(PathBuf::from(raw.trim())),
        _ => return Err("unknown key".into()),
    }
    Ok(())
}

pub fn parse_config(text: &str, origin: &str) -> Result<Settings> {
    let ini = Ini::load_from_str(text).map_err(|e| anyhow!("{origin}: {e}"))?;
    let mut s = Settings::default();
    for (section, props) in ini.iter() {
        let Some(section) = section else {
            if let Some((key, _)) = props.iter().next() {
                bail!("{origin}: `{key}` must sit under a section such as [sweep] or [channel]");
            }
            continue;
        };
        for (key, raw) in props.iter() {
            apply(&mut s, section, key, raw)
                .map_err(|e| anyhow!("{origin}: [{section}] {key} = {raw}: {e}"))?;
        }
    }
    Ok(s)
}

pub fn load_config(path: &FsPath) -> Result<Settings> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    parse_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_lists() {
        let s = parse_config(
            "[sweep]\nmetric = p_leak, c_s_full\nvar = rho_b_db\nstart = -2\nstop = 2\nstep = 0.5\n\
             [surface]\nM = 4, 8\n[budget]\nrho_e_db = -5,0\n[mc]\nsamples = 20000\n",
            "t",
        )
        .unwrap();
        assert_eq!(s.metrics, Some(vec![Metric::PLeak, Metric::CsFull]));
        assert_eq!(s.elements, Some(vec![4, 8]));
        assert_eq!(s.rho_e_db, Some(vec![-5.0, 0.0]));
        assert_eq!(s.samples, Some(20_000));
        let spec = s.to_spec(None).unwrap();
        assert_eq!(spec.sweep_values().len(), 9);
    }

    #[test]
    fn field_errors_name_the_field() {
        let e = parse_config("[channel]\nterms = many\n", "cfg.ini").unwrap_err().to_string();
        assert!(e.contains("cfg.ini") && e.contains("[channel] terms"), "{e}");
        let e = parse_config("[channel]\ncolour = red\n", "cfg.ini").unwrap_err().to_string();
        assert!(e.contains("unknown key"), "{e}");
        let e = parse_config("metric = p_leak\n", "cfg.ini").unwrap_err().to_string();
        assert!(e.contains("section"), "{e}");
    }

    #[test]
    fn flags_win_over_file_over_preset() {
        let preset = Settings::preset_settings(Preset::Fig2);
        let file = Settings {
            elements: Some(vec![2]),
            seed: Some(9),
            ..Default::default()
        };
        let flags = Settings {
            seed: Some(5),
            ..Default::default()
        };
        let s = preset.overlay(file).overlay(flags);
        assert_eq!(s.elements, Some(vec![2]));
        assert_eq!(s.seed, Some(5));
        assert_eq!(s.var, Some(SweepVar::RhoRatioDb));
    }

    #[test]
    fn missing_metric_is_reported() {
        assert!(Settings::default().to_spec(None).is_err());
    }

    #[test]
    fn presets_resolve() {
        for p in Preset::value_variants() {
            Settings::preset_settings(*p).to_spec(None).unwrap();
        }
    }
}
