//! Command-line front end: `chd verify <check>`, `chd duality`, `chd volume`.
//!
//! Settings come from an optional JSON config file; command-line flags (and
//! `CHD_SEED`) take precedence. The report is JSON or CSV, written to
//! `--output` or stdout. Exit code 0 means every check passed, 1 means at
//! least one failed, 2 is a usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{Side, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::forms::FdConfig;
use crate::hartogs::HartogsSpec;
use crate::jtsys::DomainSpec;
use crate::verify::{self, CheckResult, Status};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum DomainName {
    #[serde(rename = "polydisc")]
    #[value(name = "polydisc")]
    Polydisc,
    #[serde(rename = "type-I")]
    #[value(name = "type-I", alias = "type-i")]
    TypeI,
    #[serde(rename = "chn")]
    #[value(name = "chn")]
    Chn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Darboux,
    DualDarboux,
    Psh,
    DetFormula,
    Genus,
    Volume,
    Selberg,
    Duality,
    Capacity,
    Equivariance,
    All,
}

impl CheckKind {
    const EACH: [CheckKind; 10] = [
        CheckKind::Darboux,
        CheckKind::DualDarboux,
        CheckKind::Psh,
        CheckKind::DetFormula,
        CheckKind::Genus,
        CheckKind::Volume,
        CheckKind::Selberg,
        CheckKind::Duality,
        CheckKind::Capacity,
        CheckKind::Equivariance,
    ];
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Resolved run settings. Every field has a default, so a config file may
/// list any subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainName,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub mu: Vec<f64>,
    pub checks: Vec<CheckKind>,
    pub points: usize,
    pub samples: usize,
    pub seed: u64,
    /// Step for the pullback checks; determinant and eigenvalue checks use
    /// [`FdConfig::for_determinants`].
    pub fd_step: f64,
    pub tolerance: Option<f64>,
    pub epsilon: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: DomainName::Polydisc,
            n: Some(1),
            p: None,
            q: None,
            mu: vec![1.0],
            checks: vec![CheckKind::All],
            points: 100,
            samples: 100_000,
            seed: 42,
            fd_step: FdConfig::default().step,
            tolerance: None,
            epsilon: DEFAULT_EPSILON,
            output: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn domain_spec(&self) -> Result<DomainSpec> {
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for domain {:?}", self.domain)))
        };
        match self.domain {
            DomainName::Polydisc => DomainSpec::polydisc(need(self.n, "n")?),
            DomainName::Chn => DomainSpec::complex_hyperbolic(need(self.n, "n")?),
            DomainName::TypeI => DomainSpec::type_one(need(self.p, "p")?, need(self.q, "q")?),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.domain_spec()?;
        if self.mu.is_empty() || self.mu.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::InvalidArgument("mu values must be positive and finite".into()));
        }
        if self.checks.is_empty() {
            return Err(Error::InvalidArgument("no checks selected".into()));
        }
        if self.points == 0 || self.samples < crate::measures::MIN_MC_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "points must be positive and samples at least {}",
                crate::measures::MIN_MC_SAMPLES
            )));
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(Error::InvalidArgument("fd-step must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument("epsilon must lie in (0, 1)".into()));
        }
        Ok(())
    }

    fn expanded_checks(&self) -> Vec<CheckKind> {
        let mut out = Vec::new();
        for c in &self.checks {
            let add: &[CheckKind] = if *c == CheckKind::All { &CheckKind::EACH } else { std::slice::from_ref(c) };
            for k in add {
                if !out.contains(k) {
                    out.push(*k);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.summary.all_pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

fn failed_run(name: &str, parameters: Value, err: &Error) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        parameters,
        status: Status::Fail,
        worst_residual: f64::INFINITY,
        tolerance: 0.0,
        witnesses: Vec::new(),
        detail: Some(json!({ "error": err.to_string() })),
        wall_time_s: 0.0,
    }
}

fn run_one(cfg: &RunConfig, d: &DomainSpec, kind: CheckKind, mu: Option<f64>) -> Vec<CheckResult> {
    let fd = FdConfig {
        step: cfg.fd_step,
        ..FdConfig::default()
    };
    let det_fd = FdConfig::for_determinants();
    let tol = |default: f64| cfg.tolerance.unwrap_or(default);
    let (points, samples, seed) = (cfg.points, cfg.samples, cfg.seed);
    let outcome = (|| -> Result<Vec<CheckResult>> {
        let h = match mu {
            Some(mu) => Some(HartogsSpec::new(d.clone(), mu)?),
            None => None,
        };
        let h = || h.as_ref().expect("per-mu check");
        Ok(match kind {
            CheckKind::Darboux => vec![verify::darboux(h(), points, seed, &fd, tol(1e-5))?],
            CheckKind::DualDarboux => vec![verify::dual_darboux(h(), points, seed, &fd, tol(1e-5))?],
            CheckKind::Psh => vec![verify::psh(h(), points, seed, &det_fd)?],
            CheckKind::DetFormula => vec![verify::det_formula(h(), points, seed, &det_fd, tol(1e-5))?],
            CheckKind::Genus => vec![verify::genus(d, tol(1e-3))?],
            CheckKind::Volume => {
                let mut v: Vec<_> = verify::volume_flat(h(), samples, seed, tol(3.0))?.into_iter().collect();
                v.push(verify::volume_ratio(h(), samples, seed, tol(3.0))?);
                v
            }
            CheckKind::Selberg => vec![verify::selberg(d, tol(if d.rank == 1 { 1e-6 } else { 1e-3 }))?],
            CheckKind::Duality => vec![verify::duality(d)?, verify::gennaio(d)?],
            CheckKind::Capacity => {
                let mut v = Vec::new();
                if h().mu <= 1.0 {
                    v.push(verify::capacity(h(), Side::FlatHartogs, samples, seed, cfg.epsilon)?);
                }
                v.push(verify::capacity(h(), Side::Dual, samples, seed, cfg.epsilon)?);
                v
            }
            CheckKind::Equivariance => verify::structure_maps(h(), points, seed)?,
            CheckKind::All => unreachable!("expanded before dispatch"),
        })
    })();
    outcome.unwrap_or_else(|e| {
        let name = serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        vec![failed_run(&name, json!({ "domain": d.label(), "mu": mu }), &e)]
    })
}

fn per_mu(kind: CheckKind) -> bool {
    !matches!(kind, CheckKind::Genus | CheckKind::Selberg | CheckKind::Duality)
}

/// Runs every selected check, concurrently, and assembles the report. The
/// order of `checks` in the report is deterministic.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let d = cfg.domain_spec()?;
    let mut tasks = Vec::new();
    for kind in cfg.expanded_checks() {
        if per_mu(kind) {
            tasks.extend(cfg.mu.iter().map(|&mu| (kind, Some(mu))));
        } else {
            tasks.push((kind, None));
        }
    }
    let checks: Vec<CheckResult> = tasks
        .par_iter()
        .map(|&(kind, mu)| run_one(cfg, &d, kind, mu))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let passed = checks.iter().filter(|c| c.passed()).count();
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        summary: Summary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
            all_pass: passed == checks.len(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        checks,
    })
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    let io = |e: &dyn std::fmt::Display| Error::InvalidArgument(format!("cannot render report: {e}"));
    match format {
        Format::Json => serde_json::to_string_pretty(report).map(|t| t + "\n").map_err(|e| io(&e)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "domain", "mu", "status", "worst_residual", "tolerance", "wall_time_s", "parameters"])
                .map_err(|e| io(&e))?;
            for c in &report.checks {
                let field = |k: &str| c.parameters.get(k).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default();
                w.write_record([
                    c.name.clone(),
                    field("domain"),
                    field("mu"),
                    if c.passed() { "pass".into() } else { "fail".into() },
                    format!("{:e}", c.worst_residual),
                    format!("{:e}", c.tolerance),
                    format!("{:.3}", c.wall_time_s),
                    c.parameters.to_string(),
                ])
                .map_err(|e| io(&e))?;
            }
            let bytes = w.into_inner().map_err(|e| io(&e))?;
            String::from_utf8(bytes).map_err(|e| io(&e))
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("bad config {}: {e}", path.display())))
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("not a nonnegative integer: {s}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "chd", version, about = "Numerical checks for Cartan-Hartogs domains and their duals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one check, or `all`.
    Verify {
        check: CheckKind,
        #[command(flatten)]
        opts: Opts,
    },
    /// Root of the duality equation and the F(1)/F(0) bound.
    Duality(Opts),
    /// Monte Carlo volumes of the domain and its dual.
    Volume(Opts),
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub domain: Option<DomainName>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    /// One or more exponents, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub mu: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_count)]
    pub points: Option<usize>,
    /// Monte Carlo sample count; accepts forms like `1e6`.
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<usize>,
    #[arg(long, env = "CHD_SEED")]
    pub seed: Option<u64>,
    #[arg(long = "fd-step")]
    pub fd_step: Option<f64>,
    #[arg(long = "tol")]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Opts {
    pub fn resolve(&self, checks: Vec<CheckKind>) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        if self.config.is_none() || checks != [CheckKind::All] {
            cfg.checks = checks;
        }
        if let Some(d) = self.domain {
            cfg.domain = d;
            cfg.n = None;
            cfg.p = None;
            cfg.q = None;
        }
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = self.$field.clone() { cfg.$field = v; } )* };
        }
        macro_rules! take_opt {
            ($($field:ident),*) => { $( if self.$field.is_some() { cfg.$field = self.$field.clone(); } )* };
        }
        take!(mu, points, samples, seed, fd_step, epsilon, format);
        take_opt!(n, p, q, tolerance, output);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<()> {
    let text = render(report, cfg.format)?;
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            for c in &report.checks {
                let status = if c.passed() { "pass" } else { "FAIL" };
                println!(
                    "{status:4}  {:<22} {:<28} residual {:.3e} (tol {:.1e})",
                    c.name,
                    c.parameters.get("mu").map_or(String::new(), |m| format!("μ={m}")),
                    c.worst_residual,
                    c.tolerance
                );
            }
            println!("{}/{} checks passed -> {}", report.summary.passed, report.summary.total, path.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            write!(out, "{text}").map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the checks and writes the report; returns the exit
/// code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let resolved = match &cli.command {
        Command::Verify { check, opts } => opts.resolve(vec![*check]),
        Command::Duality(opts) => opts.resolve(vec![CheckKind::Duality]),
        Command::Volume(opts) => opts.resolve(vec![CheckKind::Volume]),
    };
    let cfg = match resolved {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit(&report, &cfg) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    report.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"domain": "type-I", "p": 2, "q": 2, "mu": [0.5, 2.0], "points": 7}"#).unwrap();
        let opts = Opts {
            config: Some(path),
            points: Some(11),
            ..Opts::default()
        };
        let cfg = opts.resolve(vec![CheckKind::Darboux]).unwrap();
        assert_eq!(cfg.domain, DomainName::TypeI);
        assert_eq!(cfg.mu, vec![0.5, 2.0]);
        assert_eq!(cfg.points, 11);
        assert_eq!(cfg.domain_spec().unwrap().genus, 4.0);
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let cfg = RunConfig { mu: vec![-1.0], ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { domain: DomainName::TypeI, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"nonsense": 1}"#).is_err());
    }

    #[test]
    fn all_expands_without_duplicates() {
        let cfg = RunConfig { checks: vec![CheckKind::Darboux, CheckKind::All], ..RunConfig::default() };
        let e = cfg.expanded_checks();
        assert_eq!(e.len(), CheckKind::EACH.len());
        assert_eq!(e[0], CheckKind::Darboux);
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let cfg = RunConfig { checks: vec![CheckKind::Duality], ..RunConfig::default() };
        let report = run(&cfg).unwrap();
        let text = render(&report, Format::Csv).unwrap();
        assert_eq!(text.lines().count(), 1 + report.checks.len());
        assert!(report.summary.all_pass);
    }
}
