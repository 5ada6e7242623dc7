use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rispls_cli::config::{load_config, Preset, Settings, DEFAULT_KR_DB, DEFAULT_TERMS};
use rispls_cli::output::{write_rows, Format};
use rispls_cli::sweep::{run_sweep, EvalMethod, Metric, SweepVar};
use rispls_cli::validate::{default_settings, run_validation};
use rispls_cli::WORKERS_ENV;
use rispls_core::secrecy::db_to_linear;
use rispls_core::{mg_from_rice, CascadeFit};

#[derive(Parser)]
#[command(name = "rispls", version, about = "Secrecy metrics of RIS-assisted links under mixture-Gamma fading")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate metrics along a swept parameter.
    Sweep {
        /// Figure-reproduction preset; flags and config entries override it.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Swept quantity; budgets in dB, `M` in elements.
        #[arg(long, value_enum)]
        var: Option<SweepVar>,
        /// First value (inclusive).
        #[arg(long, allow_negative_numbers = true)]
        start: Option<f64>,
        /// Last value (inclusive when on the step grid).
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate metrics at fixed parameters.
    Point {
        #[command(flatten)]
        common: Common,
    },
    /// Run the closed-form / quadrature / Monte Carlo triangle and report deviations.
    Validate {
        /// Configuration file naming the points to check.
        config_path: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the fitted cascade parameters as JSON, one line per M.
    Fit {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Default)]
struct Common {
    /// key=value configuration file with [sections].
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    metric: Vec<Metric>,
    #[arg(long, value_enum, value_delimiter = ',')]
    method: Vec<EvalMethod>,
    /// Number of reflecting elements (comma-separated for several curves).
    #[arg(long = "M", value_delimiter = ',')]
    elements: Vec<usize>,
    /// Rice K-factor of both hops, dB.
    #[arg(long, allow_negative_numbers = true)]
    kr_db: Option<f64>,
    /// Nakagami-m parameter of the eavesdropper link.
    #[arg(long = "m")]
    m_nakagami: Option<f64>,
    /// Mixture-Gamma terms for the Rice hops.
    #[arg(long)]
    terms: Option<usize>,
    /// Legitimate link budget(s), dB.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    rho_b_db: Vec<f64>,
    /// Eavesdropper link budget(s), dB.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    rho_e_db: Vec<f64>,
    /// Monte Carlo samples per point.
    #[arg(long)]
    samples: Option<u64>,
    /// Monte Carlo seed; with `--samples` it fixes every estimate.
    #[arg(long)]
    seed: Option<u64>,
    /// Newline-delimited JSON instead of CSV.
    #[arg(long)]
    json: bool,
    /// Evaluate the formulas exactly as originally printed.
    #[arg(long)]
    paper_literal: bool,
    /// Write rows here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Common {
    fn flag_settings(&self) -> Settings {
        Settings {
            metrics: non_empty(self.metric.clone()),
            methods: non_empty(self.method.clone()),
            elements: non_empty(self.elements.clone()),
            kr_db: self.kr_db,
            terms: self.terms,
            m_nakagami: self.m_nakagami,
            rho_b_db: non_empty(self.rho_b_db.clone()),
            rho_e_db: non_empty(self.rho_e_db.clone()),
            samples: self.samples,
            seed: self.seed,
            json: self.json.then_some(true),
            paper_literal: self.paper_literal.then_some(true),
            out: self.out.clone(),
            ..Default::default()
        }
    }

    /// Defaults, then the preset, then the file, then flags.
    fn resolve(&self, flags: Settings, config: Option<&PathBuf>) -> Result<Settings> {
        let file = match config.or(self.config.as_ref()) {
            Some(p) => load_config(p)?,
            None => Settings::default(),
        };
        let preset = flags.preset.or(file.preset);
        let base = preset.map(Settings::preset_settings).unwrap_or_default();
        Ok(base.overlay(file).overlay(flags))
    }
}

fn format_of(s: &Settings) -> Format {
    if s.json.unwrap_or(false) {
        Format::Ndjson
    } else {
        Format::Csv
    }
}

fn sink(s: &Settings) -> Result<Box<dyn Write>> {
    Ok(match &s.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create output file {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn sweep_like(settings: Settings, var: Option<SweepVar>) -> Result<bool> {
    let spec = settings.to_spec(var)?;
    let outcome = run_sweep(&spec)?;
    write_rows(sink(&settings)?, &outcome.rows, format_of(&settings))?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for e in &outcome.errors {
        eprintln!("error: {e}");
    }
    Ok(outcome.errors.is_empty())
}

fn validate(settings: Settings) -> Result<bool> {
    let spec = settings.to_spec(None)?;
    let report = run_validation(&spec)?;
    write_rows(sink(&settings)?, &report.rows, format_of(&settings))?;
    for r in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("error: M={} {}: {}", r.elements, r.metric, r.error.as_deref().unwrap_or(""));
    }
    let total = report.rows.len();
    if settings.paper_literal.unwrap_or(false) {
        eprintln!(
            "validate: {} of {total} checks of the literal formulas disagree with simulation \
             (disagreement expected)",
            report.mismatches()
        );
    } else {
        eprintln!("validate: {} of {total} checks failed", report.failures());
    }
    Ok(report.expectation_met())
}

fn fit(settings: Settings) -> Result<bool> {
    let kr_db = settings.kr_db.unwrap_or(DEFAULT_KR_DB);
    let terms = settings.terms.unwrap_or(DEFAULT_TERMS);
    let hop = mg_from_rice(db_to_linear(kr_db), terms)?;
    let mut out = sink(&settings)?;
    for &m in settings.elements.as_deref().unwrap_or(&[4]) {
        if m == 0 {
            bail!("M must be at least 1");
        }
        let fit = CascadeFit::from_links(&hop, &hop, m)?;
        writeln!(out, "{}", serde_json::to_string(&fit)?)?;
    }
    out.flush()?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep {
            preset,
            var,
            start,
            stop,
            step,
            common,
        } => {
            let flags = Settings {
                preset,
                var,
                start,
                stop,
                step,
                ..common.flag_settings()
            };
            let settings = common.resolve(flags, None)?;
            if settings.var.is_none() {
                bail!("sweep needs --preset or --var with --start/--stop/--step");
            }
            sweep_like(settings, None)
        }
        Command::Point { common } => {
            let settings = common.resolve(common.flag_settings(), None)?;
            sweep_like(settings, Some(SweepVar::None))
        }
        Command::Validate {
            config_path,
            common,
        } => {
            let settings = common.resolve(common.flag_settings(), config_path.as_ref())?;
            validate(default_settings().overlay(settings))
        }
        Command::Fit { common } => fit(common.resolve(common.flag_settings(), None)?),
    }
}

fn install_pool() -> Result<Option<rayon::ThreadPool>> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{WORKERS_ENV}={raw} is not a worker count"))?;
    if n == 0 {
        return Ok(None);
    }
    Ok(Some(rayon::ThreadPoolBuilder::new().num_threads(n).build()?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = install_pool().and_then(|pool| match pool {
        Some(p) => p.install(|| run(cli)),
        None => run(cli),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
