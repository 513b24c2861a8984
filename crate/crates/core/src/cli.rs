//! Batch runner behind the `dilated` binary.
//!
//! A run is a pure function of its [`ExperimentConfig`]: every random draw
//! comes from a ChaCha stream seeded by `seed`, floats are printed by
//! [`format_float`], and every written file is listed in `manifest.json`
//! with its SHA-256 digest.
//!
//! # Config files
//!
//! ```text
//! file    := line*
//! line    := blank | comment | section | pair
//! comment := ('#' | ';') any*
//! section := '[' name ']'
//! pair    := key '=' value          (value runs to end of line, trimmed)
//! ```
//!
//! Pairs before any section, or in `[run]`, are global. Pairs in a section
//! named after a subcommand apply to that subcommand only and win over
//! globals. Command-line flags win over both.
//!
//! # Value grammars
//!
//! * sequences: the language of [`parse_spec`]
//! * profiles: `power:S:N` (`a_j = j^{-S}`, `j <= N`) or
//!   `explicit:J:A,J:A,...`
//! * coefficients over a set `K`: `ones`, `list:v1,v2,...`, `power:A`
//!   (`c_k = k^{-A}`), `random` (uniform on `[-1, 1]`), `random+`
//!   (uniform on `(0, 1]`)
//! * criterion families: `power:A`, `powerlog:A:B`, `raw:v1,v2,...`;
//!   several are separated by `;`

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::criteria::{
    comparison_csv, CoefficientFamily, CriterionReport, Criteria, DivisorMode, Phi, DEFAULT_PRESET_EPS,
    DEFAULT_WINDOW,
};
use crate::dilated::{
    block_operator_energies, dirichlet_probe, exact_norm_collisions, norm_sq_powerlaw, quadrature_norm_exp,
    square_theorem_audit, Banding, CoefficientSeq, FourierProfile,
};
use crate::ntheory::{zeta, ArithmeticCache};
use crate::numerics::format_float;
use crate::sequences::{example_family_check, parse_spec, theta, theta_bound_report, IndexSet};
use crate::spectral::{audits_to_csv, eigen_bounds_audit, jordan_quadratic};
use crate::{Error, Result};

pub const DEFAULT_CACHE_LIMIT: u64 = 1 << 20;
pub const DEFAULT_SEED: u64 = 0;

/// Relative agreement required between the exact norm routes.
pub const NORM_IDENTITY_TOL: f64 = 1e-10;
/// Relative agreement required between collision counting and quadrature.
pub const NORM_QUADRATURE_TOL: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Eigen,
    Theta,
    Norm,
    Criteria,
    Blocks,
    Probe,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Eigen => "eigen",
            CommandKind::Theta => "theta",
            CommandKind::Norm => "norm",
            CommandKind::Criteria => "criteria",
            CommandKind::Blocks => "blocks",
            CommandKind::Probe => "probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "dilated", version, about = "Experiments on GCD matrices and dilated function systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Config file; flags given here override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest integer covered by the arithmetic cache.
    #[arg(long, global = true)]
    pub cache_limit: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Extra `key=value` parameter; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extreme eigenvalues of M_n(s) against the zeta bracket.
    Eigen(EigenArgs),
    /// Arithmetical complexity of an index set.
    Theta(ThetaArgs),
    /// The same dilated-sum norm by every applicable route.
    Norm(NormArgs),
    /// Comparison table of summability criteria.
    Criteria(CriteriaArgs),
    /// Band energies and the two-sided sandwich.
    Blocks(BlocksArgs),
    /// Dirichlet-series probe of a profile.
    Probe(ProbeArgs),
}

#[derive(Debug, Args, Default)]
pub struct EigenArgs {
    /// Comma-separated sizes.
    #[arg(long)]
    pub n: Option<String>,
    /// Comma-separated exponents.
    #[arg(long)]
    pub s: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct ThetaArgs {
    #[arg(long)]
    pub sequence: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct NormArgs {
    #[arg(long)]
    pub sequence: Option<String>,
    #[arg(long)]
    pub coefficients: Option<String>,
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct CriteriaArgs {
    /// `;`-separated families.
    #[arg(long)]
    pub families: Option<String>,
    /// Comma-separated criterion names, or `all`.
    #[arg(long)]
    pub criteria: Option<String>,
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct BlocksArgs {
    #[arg(long)]
    pub sequence: Option<String>,
    #[arg(long)]
    pub coefficients: Option<String>,
    #[arg(long)]
    pub profile: Option<String>,
    /// Band ratio M.
    #[arg(long)]
    pub m: Option<String>,
    /// Block ratio μ for the square-function audit.
    #[arg(long)]
    pub mu: Option<String>,
    /// `profile` or `product`.
    #[arg(long)]
    pub banding: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct ProbeArgs {
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub sigmas: Option<String>,
    #[arg(long)]
    pub ts: Option<String>,
}

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub out: PathBuf,
    pub format: Format,
    pub cache_limit: u64,
    pub seed: u64,
    /// Subcommand parameters (`sequence`, `s`, `profile`, `coefficients`,
    /// `mu`, `m`, ...), already merged from file and flags.
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind, out: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            command,
            out: out.into(),
            format: Format::Csv,
            cache_limit: DEFAULT_CACHE_LIMIT,
            seed: DEFAULT_SEED,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("`{key}` is required for {}", self.command.name())))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        self.get(key).map_or(Ok(default), |v| parse_u64(key, v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub tool_version: String,
    pub wall_time_seconds: f64,
    pub checks: Vec<CheckResult>,
    pub files: Vec<FileDigest>,
}

impl RunManifest {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            EXIT_OK
        } else {
            EXIT_BOUND_FAILED
        }
    }
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

/// Parsed config file: `(section, key) -> value`, globals under `""`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<(String, String), String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {}: unterminated section", no + 1)))?
                    .trim();
                if name.is_empty() {
                    return Err(Error::Config(format!("line {}: empty section name", no + 1)));
                }
                section = if name == "run" { String::new() } else { name.to_string() };
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", no + 1)));
            }
            entries.insert((section.clone(), k.to_string()), v.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    /// Globals overlaid with the entries of `section`.
    fn merged(&self, section: &str) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for pass in ["", section] {
            for ((s, k), v) in &self.entries {
                if s == pass {
                    out.insert(k.clone(), v.clone());
                }
            }
        }
        out
    }
}

impl Cli {
    /// Merges the config file (if any) with the flags.
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let (kind, flags) = self.command.flags();
        let file = match &self.config {
            Some(p) => ConfigFile::parse(&std::fs::read_to_string(p)?)?,
            None => ConfigFile::default(),
        };
        let mut params = file.merged(kind.name());
        for (k, v) in flags {
            params.insert(k.to_string(), v);
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let take = |params: &mut BTreeMap<String, String>, k: &str| params.remove(k);
        let file_out = take(&mut params, "out");
        let file_format = take(&mut params, "format");
        let file_cache = take(&mut params, "cache_limit");
        let file_seed = take(&mut params, "seed");
        let format = match (self.format, file_format.as_deref()) {
            (Some(f), _) => f,
            (None, None) => Format::Csv,
            (None, Some(v)) => Format::from_str(v, true).map_err(|_| Error::Config(format!("unknown format `{v}`")))?,
        };
        Ok(ExperimentConfig {
            command: kind,
            out: self.out.or(file_out.map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out")),
            format,
            cache_limit: match (self.cache_limit, file_cache) {
                (Some(n), _) => n,
                (None, Some(v)) => parse_u64("cache_limit", &v)?,
                (None, None) => DEFAULT_CACHE_LIMIT,
            },
            seed: match (self.seed, file_seed) {
                (Some(n), _) => n,
                (None, Some(v)) => parse_u64("seed", &v)?,
                (None, None) => DEFAULT_SEED,
            },
            params,
        })
    }
}

impl Command {
    fn flags(&self) -> (CommandKind, Vec<(&'static str, String)>) {
        fn pick(pairs: Vec<(&'static str, &Option<String>)>) -> Vec<(&'static str, String)> {
            pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect()
        }
        match self {
            Command::Eigen(a) => (CommandKind::Eigen, pick(vec![("n", &a.n), ("s", &a.s)])),
            Command::Theta(a) => (CommandKind::Theta, pick(vec![("sequence", &a.sequence)])),
            Command::Norm(a) => (
                CommandKind::Norm,
                pick(vec![
                    ("sequence", &a.sequence),
                    ("coefficients", &a.coefficients),
                    ("profile", &a.profile),
                    ("grid", &a.grid),
                ]),
            ),
            Command::Criteria(a) => (
                CommandKind::Criteria,
                pick(vec![("families", &a.families), ("criteria", &a.criteria), ("window", &a.window)]),
            ),
            Command::Blocks(a) => (
                CommandKind::Blocks,
                pick(vec![
                    ("sequence", &a.sequence),
                    ("coefficients", &a.coefficients),
                    ("profile", &a.profile),
                    ("m", &a.m),
                    ("mu", &a.mu),
                    ("banding", &a.banding),
                ]),
            ),
            Command::Probe(a) => (
                CommandKind::Probe,
                pick(vec![("profile", &a.profile), ("sigmas", &a.sigmas), ("ts", &a.ts)]),
            ),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("`{key}`: `{v}` is not a number")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.trim()
        .parse::<u64>()
        .map_err(|_| Error::Config(format!("`{key}`: `{v}` is not a nonnegative integer")))
}

fn parse_list<T>(key: &str, v: &str, f: fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',').filter(|x| !x.trim().is_empty()).map(|x| f(key, x)).collect()
}

pub fn parse_profile(text: &str) -> Result<FourierProfile> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("power:") {
        let (s, n) = rest
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("profile `{text}`: expected power:S:N")))?;
        return FourierProfile::power_law_sine(parse_f64("profile", s)?, parse_u64("profile", n)?);
    }
    if let Some(rest) = text.strip_prefix("explicit:") {
        let terms = rest
            .split(',')
            .map(|t| {
                let (j, a) = t
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("profile term `{t}`: expected J:A")))?;
                Ok((parse_u64("profile", j)?, parse_f64("profile", a)?))
            })
            .collect::<Result<Vec<_>>>()?;
        return FourierProfile::explicit(terms);
    }
    Err(Error::Config(format!("unknown profile `{text}`")))
}

pub fn parse_coefficients(text: &str, set: &IndexSet, rng: &mut ChaCha8Rng) -> Result<CoefficientSeq> {
    let text = text.trim();
    let n = set.len();
    let values = match text {
        "ones" => vec![1.0; n],
        "random" => (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        "random+" => (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect(),
        _ => {
            if let Some(rest) = text.strip_prefix("list:") {
                parse_list("coefficients", rest, parse_f64)?
            } else if let Some(a) = text.strip_prefix("power:") {
                let a = parse_f64("coefficients", a)?;
                set.elements().iter().map(|&k| (k as f64).powf(-a)).collect()
            } else {
                return Err(Error::Config(format!("unknown coefficients `{text}`")));
            }
        }
    };
    if values.len() != n {
        return Err(Error::usage(format!("{} coefficients for {n} indices", values.len())));
    }
    CoefficientSeq::new(values)
}

pub fn parse_family(text: &str) -> Result<CoefficientFamily> {
    let text = text.trim();
    if let Some(a) = text.strip_prefix("power:") {
        return CoefficientFamily::power(parse_f64("families", a)?);
    }
    if let Some(rest) = text.strip_prefix("powerlog:") {
        let (a, b) = rest
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("family `{text}`: expected powerlog:A:B")))?;
        return CoefficientFamily::power_log(parse_f64("families", a)?, parse_f64("families", b)?);
    }
    if let Some(rest) = text.strip_prefix("raw:") {
        return CoefficientFamily::raw(parse_list("families", rest, parse_f64)?);
    }
    Err(Error::Config(format!("unknown family `{text}`")))
}

pub fn parse_phi(text: &str) -> Result<Phi> {
    let text = text.trim();
    if text == "log" {
        return Ok(Phi::Log);
    }
    if let Some(c) = text.strip_prefix("const:") {
        return Ok(Phi::Constant { c: parse_f64("phi", c)? });
    }
    if let Some(e) = text.strip_prefix("logloglog:") {
        return Ok(Phi::LogLogLog { eps: parse_f64("phi", e)? });
    }
    if let Some(rest) = text.strip_prefix("table:") {
        return Ok(Phi::Table {
            values: parse_list("phi", rest, parse_f64)?,
        });
    }
    Err(Error::Config(format!("unknown phi `{text}`")))
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct Output {
    dir: PathBuf,
    files: Vec<FileDigest>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), content)?;
        self.files.push(FileDigest {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(content.as_bytes())),
        });
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))? + "\n";
        self.write(name, &text)
    }
}

fn check(checks: &mut Vec<CheckResult>, name: impl Into<String>, pass: bool) {
    checks.push(CheckResult { name: name.into(), pass });
}

/// Executes one run and writes its outputs and `manifest.json` under
/// `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    let start = Instant::now();
    let mut out = Output::new(&config.out)?;
    let mut checks = Vec::new();
    match config.command {
        CommandKind::Eigen => cmd_eigen(config, &mut out, &mut checks)?,
        CommandKind::Theta => cmd_theta(config, &mut out, &mut checks)?,
        CommandKind::Norm => cmd_norm(config, &mut out, &mut checks)?,
        CommandKind::Criteria => cmd_criteria(config, &mut out)?,
        CommandKind::Blocks => cmd_blocks(config, &mut out, &mut checks)?,
        CommandKind::Probe => cmd_probe(config, &mut out)?,
    }
    let mut manifest = RunManifest {
        config: config.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        checks,
        files: Vec::new(),
    };
    manifest.files = std::mem::take(&mut out.files);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Numeric(e.to_string()))? + "\n";
    std::fs::write(config.out.join("manifest.json"), text)?;
    Ok(manifest)
}

fn cache_for(config: &ExperimentConfig) -> Result<ArithmeticCache> {
    ArithmeticCache::new(config.cache_limit)
}

fn cmd_eigen(config: &ExperimentConfig, out: &mut Output, checks: &mut Vec<CheckResult>) -> Result<()> {
    let ns = parse_list("n", config.get("n").unwrap_or("8,64,256"), parse_u64)?;
    let ss = parse_list("s", config.get("s").unwrap_or("1.5"), parse_f64)?;
    if ns.is_empty() || ss.is_empty() {
        return Err(Error::Config("eigen needs at least one n and one s".into()));
    }
    let mut rows = Vec::new();
    for &s in &ss {
        for &n in &ns {
            let a = eigen_bounds_audit(n as usize, s)?;
            if a.asserted {
                check(checks, format!("eigen n={n} s={s}"), a.pass);
            }
            rows.push(a);
        }
    }
    match config.format {
        Format::Csv => out.write("eigen.csv", &audits_to_csv(&rows)),
        Format::Json => out.json("eigen.json", &rows),
    }
}

fn cmd_theta(config: &ExperimentConfig, out: &mut Output, _checks: &mut [CheckResult]) -> Result<()> {
    let cache = cache_for(config)?;
    let set = parse_spec(config.require("sequence")?, &cache)?;
    let report = theta_bound_report(&set, &cache)?;
    let prof = theta(&set)?;
    let family = example_family_check(&set).ok();
    #[derive(Serialize)]
    struct Summary<'a> {
        sequence: &'a str,
        size: usize,
        sup_theta: f64,
        max_ratio: f64,
        family: Option<crate::sequences::FamilyDiagnostic>,
    }
    let summary = Summary {
        sequence: config.require("sequence")?,
        size: set.len(),
        sup_theta: prof.sup_value,
        max_ratio: report.max_ratio,
        family,
    };
    match config.format {
        Format::Csv => {
            let mut csv = String::from("k,theta,theta_log_k,envelope,ratio\n");
            for r in &report.rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    r.k,
                    format_float(r.theta),
                    format_float(r.theta * (r.k as f64).ln()),
                    format_float(r.envelope),
                    format_float(r.ratio)
                );
            }
            out.write("theta.csv", &csv)?;
        }
        Format::Json => out.json("theta.json", &report)?,
    }
    out.json("theta_summary.json", &summary)
}

/// `|x − y| / max(|x|, |y|)`, zero when both vanish.
pub fn relative_difference(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}

/// Smallest power of two strictly above `top`.
fn grid_above(top: u64) -> Result<usize> {
    top.checked_add(1)
        .and_then(u64::checked_next_power_of_two)
        .map(|g| g.max(2) as usize)
        .ok_or_else(|| Error::Precision("dilated frequencies too large for a grid".into()))
}

fn cmd_norm(config: &ExperimentConfig, out: &mut Output, checks: &mut Vec<CheckResult>) -> Result<()> {
    let cache = cache_for(config)?;
    let set = parse_spec(config.require("sequence")?, &cache)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let c = parse_coefficients(config.get("coefficients").unwrap_or("ones"), &set, &mut rng)?;
    let profile = parse_profile(config.get("profile").unwrap_or("power:1:10000"))?;
    // (method, value or skip reason)
    let mut rows: Vec<(&str, std::result::Result<f64, String>)> = Vec::new();
    match &profile {
        FourierProfile::PowerLawSine { s, .. } => {
            rows.push(("spectral", Ok(norm_sq_powerlaw(&set, &c, *s)?)));
            rows.push((
                "jordan",
                match jordan_quadratic(&set, *s, c.values(), &cache) {
                    Ok(q) => Ok(zeta(2.0 * s)? * q),
                    Err(Error::Precondition(m)) => Err(m),
                    Err(e) => return Err(e),
                },
            ));
            rows.push(("collision", Err("profile is infinite; collisions need explicit terms".into())));
            rows.push(("quadrature", Err("profile is infinite; quadrature needs explicit terms".into())));
        }
        FourierProfile::Explicit { .. } => {
            rows.push(("spectral", Err("closed form needs a power-law profile".into())));
            rows.push(("jordan", Err("closed form needs a power-law profile".into())));
            rows.push(("collision", Ok(exact_norm_collisions(&set, &c, &profile)?)));
            let top = set.k_plus().unwrap_or(1).saturating_mul(profile.max_frequency().max(1));
            let grid = match config.get("grid") {
                Some(g) => parse_u64("grid", g)? as usize,
                None => grid_above(top)?,
            };
            rows.push(("quadrature", Ok(quadrature_norm_exp(&set, &c, &profile, grid)?)));
        }
    }
    let mut csv = String::from("method,value,note\n");
    for (m, v) in &rows {
        match v {
            Ok(x) => {
                let _ = writeln!(csv, "{m},{},", format_float(*x));
            }
            Err(why) => {
                let _ = writeln!(csv, "{m},NA,skipped: {}", why.replace(',', ";"));
            }
        }
    }
    let done: Vec<(&str, f64)> = rows.iter().filter_map(|(m, v)| v.as_ref().ok().map(|x| (*m, *x))).collect();
    for (i, &(a, x)) in done.iter().enumerate() {
        for &(b, y) in &done[i + 1..] {
            let d = relative_difference(x, y);
            let _ = writeln!(csv, "reldiff:{a}-{b},{},", format_float(d));
            let tol = if a == "collision" || b == "quadrature" {
                NORM_QUADRATURE_TOL
            } else {
                NORM_IDENTITY_TOL
            };
            check(checks, format!("norm {a} vs {b}"), d <= tol);
        }
    }
    match config.format {
        Format::Csv => out.write("norm.csv", &csv),
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                method: &'a str,
                value: Option<f64>,
                skipped: Option<&'a str>,
            }
            let rows: Vec<Row> = rows
                .iter()
                .map(|(m, v)| Row {
                    method: m,
                    value: v.as_ref().ok().copied(),
                    skipped: v.as_ref().err().map(String::as_str),
                })
                .collect();
            out.json("norm.json", &rows)
        }
    }
}

/// Every criterion name accepted by `criteria`.
pub const CRITERION_NAMES: [&str; 12] = [
    "rademacher_menshov",
    "tandori",
    "bremont",
    "conds0",
    "conds1",
    "weber",
    "aistleitner",
    "divisor_a",
    "divisor_d",
    "divisor_sigma",
    "hooley",
    "hooley1",
];

/// Evaluates `names` on `family` with the parameters of `config`.
pub fn criteria_rows(
    config: &ExperimentConfig,
    cache: &ArithmeticCache,
    family: &CoefficientFamily,
    names: &[&str],
) -> Result<Vec<CriterionReport>> {
    let window = config.u64_or("window", DEFAULT_WINDOW)?;
    let ev = Criteria::new(cache, window)?;
    let eps = config.f64_or("eps", DEFAULT_PRESET_EPS)?;
    let n = match family {
        CoefficientFamily::Raw { values } => values.len() as u64,
        _ => window.max(crate::criteria::TAIL_START),
    };
    let mut rows = Vec::new();
    for &name in names {
        let r = match name {
            "rademacher_menshov" => ev.rademacher_menshov(family)?,
            "tandori" => ev.tandori(family, config.f64_or("h", 0.5)?)?,
            "bremont" => {
                let phi = parse_phi(config.get("phi").unwrap_or("logloglog:0.1"))?;
                ev.bremont(family, config.f64_or("bremont_s", 1.0)?, &phi)?
            }
            "conds0" => ev.bremont_conds0(family, config.f64_or("conds0_s", 0.75)?, eps)?,
            "conds1" => ev.bremont_conds1(family, eps)?,
            "weber" => ev.weber(family)?,
            "aistleitner" => ev.aistleitner(family)?,
            "divisor_a" | "divisor_d" | "divisor_sigma" => {
                let mode = match name {
                    "divisor_a" => DivisorMode::A,
                    "divisor_d" => DivisorMode::D,
                    _ => DivisorMode::Sigma {
                        s: config.f64_or("sigma_s", 1.0)?,
                    },
                };
                ev.divisor_criteria(family, &IndexSet::range(1, n)?, mode)?
            }
            "hooley" | "hooley1" => {
                let profile = family_profile(family, n)?;
                if name == "hooley" {
                    ev.hooley(&profile)?
                } else {
                    let c = config
                        .get("hooley1_c")
                        .ok_or_else(|| Error::Config("hooley1 needs `hooley1_c`; the constant has no default".into()))?;
                    ev.hooley1(&profile, parse_f64("hooley1_c", c)?)?
                }
            }
            other => return Err(Error::usage(format!("unknown criterion `{other}`"))),
        };
        rows.push(r);
    }
    Ok(rows)
}

/// Reads a coefficient family as a Fourier profile `a_ν = c_ν`.
fn family_profile(family: &CoefficientFamily, n: u64) -> Result<FourierProfile> {
    match family {
        CoefficientFamily::PowerLog { a, b } if *b == 0.0 && *a > 0.5 => FourierProfile::power_law_sine(*a, n),
        _ => FourierProfile::explicit((1..=n).map(|k| (k, family.value(k)))),
    }
}

fn cmd_criteria(config: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let cache = cache_for(config)?;
    let families = config
        .get("families")
        .unwrap_or("power:1;power:0.5")
        .split(';')
        .filter(|f| !f.trim().is_empty())
        .map(|f| Ok((f.trim().to_string(), parse_family(f)?)))
        .collect::<Result<Vec<_>>>()?;
    let list = config.get("criteria").unwrap_or("all");
    let names: Vec<&str> = if list.trim() == "all" {
        CRITERION_NAMES
            .iter()
            .copied()
            .filter(|n| *n != "hooley1" || config.get("hooley1_c").is_some())
            .collect()
    } else {
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    };
    if names.is_empty() {
        return Err(Error::usage("the criterion list is empty"));
    }
    if let Some(bad) = names.iter().find(|n| !CRITERION_NAMES.contains(n)) {
        return Err(Error::usage(format!("unknown criterion `{bad}`")));
    }
    if families.is_empty() {
        return Err(Error::usage("the family list is empty"));
    }
    let mut rows = Vec::new();
    for (label, fam) in &families {
        for r in criteria_rows(config, &cache, fam, &names)? {
            rows.push((label.clone(), r));
        }
    }
    match config.format {
        Format::Csv => out.write("criteria.csv", &comparison_csv(&rows)),
        Format::Json => out.json("criteria.json", &rows),
    }
}

fn cmd_blocks(config: &ExperimentConfig, out: &mut Output, checks: &mut Vec<CheckResult>) -> Result<()> {
    let cache = cache_for(config)?;
    let set = parse_spec(config.require("sequence")?, &cache)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let c = parse_coefficients(config.get("coefficients").unwrap_or("ones"), &set, &mut rng)?;
    let profile = parse_profile(config.require("profile")?)?;
    let m = config.f64_or("m", 2.0)?;
    let banding = match config.get("banding").unwrap_or("profile") {
        "profile" => Banding::Profile,
        "product" => Banding::Product,
        other => return Err(Error::Config(format!("unknown banding `{other}`"))),
    };
    let e = block_operator_energies(&set, &c, &profile, m, banding)?;
    if let Some(ok) = e.upper_holds {
        check(checks, "sandwich upper", ok);
    }
    if let Some(ok) = e.lower_holds {
        check(checks, "sandwich lower", ok);
    }
    let square = match config.get("mu") {
        Some(mu) => {
            let a = square_theorem_audit(&set, &c, &profile, parse_f64("mu", mu)?, m)?;
            if let Some(ok) = a.lower_holds {
                check(checks, "square function lower", ok);
            }
            Some(a)
        }
        None => None,
    };
    let flag = |f: Option<bool>| f.map_or("na".to_string(), |b| b.to_string());
    match config.format {
        Format::Csv => {
            let mut csv = String::from("band,energy\n");
            for (v, en) in &e.bands {
                let _ = writeln!(csv, "{v},{}", format_float(*en));
            }
            out.write("blocks.csv", &csv)?;
            let mut summary = String::from("band_sum,total,orthogonality_hypothesis,upper_holds,lower_holds\n");
            let _ = writeln!(
                summary,
                "{},{},{},{},{}",
                format_float(e.band_sum),
                format_float(e.total),
                e.orthogonality_hypothesis,
                flag(e.upper_holds),
                flag(e.lower_holds)
            );
            out.write("blocks_summary.csv", &summary)?;
            if let Some(a) = &square {
                let mut csv = String::from("block,energy\n");
                for (j, en) in &a.blocks {
                    let _ = writeln!(csv, "{j},{}", format_float(*en));
                }
                let _ = writeln!(
                    csv,
                    "# sum_sq={} c_emp={} regularity={} lower_holds={}",
                    format_float(a.sum_sq),
                    format_float(a.c_emp),
                    format_float(a.regularity),
                    flag(a.lower_holds)
                );
                out.write("square.csv", &csv)?;
            }
            Ok(())
        }
        Format::Json => {
            out.json("blocks.json", &e)?;
            match &square {
                Some(a) => out.json("square.json", a),
                None => Ok(()),
            }
        }
    }
}

fn cmd_probe(config: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let profile = parse_profile(config.require("profile")?)?;
    let sigmas = parse_list("sigmas", config.get("sigmas").unwrap_or("0.5,1"), parse_f64)?;
    let ts = parse_list("ts", config.get("ts").unwrap_or("0,1,2,5,10"), parse_f64)?;
    let p = dirichlet_probe(&profile, &sigmas, &ts)?;
    match config.format {
        Format::Csv => {
            let mut csv = String::from("sigma,t,abs\n");
            for (s, t, v) in &p.samples {
                let _ = writeln!(csv, "{},{},{}", format_float(*s), format_float(*t), format_float(*v));
            }
            out.write("probe.csv", &csv)
        }
        Format::Json => out.json("probe.json", &p),
    }
}

/// Exit code for an error: every failure before a bound could be checked
/// is a usage or configuration problem.
pub fn error_exit_code(_e: &Error) -> i32 {
    EXIT_USAGE
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = cli.into_config().and_then(|cfg| run(&cfg));
    match result {
        Ok(m) => {
            for c in m.checks.iter().filter(|c| !c.pass) {
                eprintln!("bound failed: {}", c.name);
            }
            m.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}
