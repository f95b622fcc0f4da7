//! Command-line front end: `run`, `resolvent`, `check` and `kkm`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 not converged (or a failed
//! check), 3 resolvent failure.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::geometry::battery::run_battery;
use crate::geometry::Space;
use crate::kkm::{self, FinitePointSet, SimplexCoord};
use crate::proxalg::{run_prox, to_csv, to_json, Provenance, RunConfig, Status};
use crate::resolvent::{resolve, ResolventQuery};
use crate::sampling;
use config::{KkmConfig, Loaded, ResolventConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_RESOLVENT_FAILURE: i32 = 3;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "hadamard", version, about = "Equilibrium problems and proximal algorithms on Hadamard spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the proximal algorithm; writes trace.csv and trace.json.
    Run(Common),
    /// Compute a single resolvent.
    Resolvent(Common),
    /// Run the geometry battery on a space.
    Check(CheckArgs),
    /// KKM cover, Lipschitz and finite-intersection checks.
    Kkm(Common),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, conflicts_with = "space", required_unless_present = "space")]
    config: Option<PathBuf>,
    /// Inline space descriptor, e.g. '{"kind":"spider","rays":3}'.
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

/// A failure that maps to an exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) => EXIT_INVALID,
            Error::ConvergenceFailure { .. } => EXIT_RESOLVENT_FAILURE,
        };
        Fail(code, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(EXIT_INVALID, msg.into())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Fail> {
    let path = dir.join(name);
    write_atomic(&path, contents.as_bytes()).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn provenance(hash: &str, seed: u64) -> Provenance {
    Provenance {
        tool_version: TOOL_VERSION.to_string(),
        config_hash: hash.to_string(),
        seed,
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: T,
}

fn report_json<T: Serialize>(prov: &Provenance, body: T) -> String {
    let mut s = serde_json::to_string_pretty(&Report { provenance: prov, body }).expect("reports serialize");
    s.push('\n');
    s
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Loaded<T>, Fail> {
    config::load(path).map_err(invalid)
}

fn cmd_run(a: &Common) -> Result<i32, Fail> {
    let Loaded { body: mut cfg, hash } = load::<RunConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let trace = run_prox(&cfg)?;
    let prov = provenance(&hash, cfg.seed);
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let csv = write_out(&out, "trace.csv", &to_csv(&trace, &prov)?)?;
    let mut json = to_json(&trace, &prov)?;
    json.push('\n');
    let js = write_out(&out, "trace.json", &json)?;
    if !a.quiet {
        let status = serde_json::to_value(trace.status).expect("status serializes");
        println!(
            "status={} steps={} final_successive_dist={:e} wrote {} {}",
            status.as_str().unwrap_or_default(),
            trace.len(),
            trace.successive.last().copied().unwrap_or(0.0),
            csv.display(),
            js.display()
        );
    }
    if let Some(msg) = &trace.failure {
        eprintln!("resolvent failure at {msg}");
    }
    Ok(match trace.status {
        Status::Converged => EXIT_OK,
        Status::MaxIters => EXIT_NOT_CONVERGED,
        Status::ResolventFailure => EXIT_RESOLVENT_FAILURE,
    })
}

fn emit(out: Option<&Path>, name: &str, quiet: bool, json: &str) -> Result<(), Fail> {
    if let Some(dir) = out {
        write_out(dir, name, json)?;
    }
    if !quiet {
        print!("{json}");
    }
    Ok(())
}

fn cmd_resolvent(a: &Common) -> Result<i32, Fail> {
    let Loaded { body: mut cfg, hash } = load::<ResolventConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let mut q = ResolventQuery::new(&cfg.space, &cfg.bifunction, &cfg.domain, cfg.lambda, cfg.x.clone())
        .with_tol(cfg.inner_tol)
        .with_max_iters(cfg.inner_max_iters)
        .with_seed(cfg.seed);
    if cfg.generic_only {
        q = q.generic_only();
    }
    let r = resolve(&q)?;
    emit(a.out.as_deref(), "resolvent.json", a.quiet, &report_json(&provenance(&hash, cfg.seed), r))?;
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs) -> Result<i32, Fail> {
    let (mut cfg, hash) = match (&a.config, &a.space) {
        (Some(p), _) => {
            let l = load::<config::CheckConfig>(p)?;
            (l.body, l.hash)
        }
        (None, Some(text)) => {
            let space: Space = serde_json::from_str(text).map_err(|e| invalid(format!("--space: {e}")))?;
            let cfg = config::CheckConfig {
                space,
                samples: 10_000,
                seed: 0,
            };
            (cfg, config::hash_text(text))
        }
        (None, None) => return Err(invalid("check needs --config or --space")),
    };
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if cfg.samples == 0 {
        return Err(invalid("samples must be >= 1"));
    }
    let r = run_battery(&cfg.space, cfg.samples, cfg.seed)?;
    let pass = r.pass;
    emit(a.out.as_deref(), "check.json", a.quiet, &report_json(&provenance(&hash, cfg.seed), r))?;
    Ok(if pass { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

#[derive(Serialize)]
struct KkmReport {
    space: String,
    points: usize,
    cover: kkm::CoverReport,
    witness: Option<kkm::Witness>,
    resolution: usize,
    diameter_estimate: f64,
    /// Smallest Lipschitz gap over the sampled coordinate pairs.
    lipschitz_min_gap: f64,
    lipschitz_pairs: usize,
    note: &'static str,
    pass: bool,
}

fn all_subsets(m: usize) -> Vec<Vec<usize>> {
    (1..1usize << m).map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect()).collect()
}

fn cmd_kkm(a: &Common) -> Result<i32, Fail> {
    let Loaded { body: mut cfg, hash } = load::<KkmConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let s = &cfg.space;
    s.validate()?;
    let d = FinitePointSet::new(s, cfg.points.clone())?;
    let subsets = match cfg.subsets.clone() {
        Some(v) => v,
        None if d.len() <= 10 => all_subsets(d.len()),
        None => return Err(invalid("subsets must be listed for more than 10 points")),
    };
    let cover = kkm::kkm_cover_check(s, &cfg.bifunction, &d, &subsets, cfg.samples, cfg.seed)?;
    let witness = kkm::finite_intersection_certify(s, &cfg.bifunction, &d, cfg.resolution)?;
    let diam = kkm::diameter_estimate(s, &d, cfg.diameter_samples, cfg.seed);
    let mut rng = sampling::stream(cfg.seed, 0x1195);
    let mut coord = || {
        use rand::Rng;
        SimplexCoord::new((0..d.len() - 1).map(|_| rng.random::<f64>()).collect()).expect("unit interval")
    };
    let mut min_gap = f64::INFINITY;
    for _ in 0..cfg.lipschitz_pairs {
        let (x, y) = (coord(), coord());
        min_gap = min_gap.min(kkm::lipschitz_gap(s, &d, &x, &y, diam)?);
    }
    let pass = cover.max_violations == 0 && min_gap >= -1e-9;
    let report = KkmReport {
        space: s.label(),
        points: d.len(),
        cover,
        witness,
        resolution: cfg.resolution,
        diameter_estimate: diam,
        lipschitz_min_gap: min_gap,
        lipschitz_pairs: cfg.lipschitz_pairs,
        note: "diameter_estimate is a sampled lower estimate of the hull diameter",
        pass,
    };
    emit(a.out.as_deref(), "kkm.json", a.quiet, &report_json(&provenance(&hash, cfg.seed), report))?;
    Ok(if pass { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Resolvent(a) => cmd_resolvent(a),
        Command::Check(a) => cmd_check(a),
        Command::Kkm(a) => cmd_kkm(a),
    };
    match result {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}
