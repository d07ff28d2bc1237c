//! `syl`: command-line front end for the σ_k-Yamabe laboratory.
//!
//! Every subcommand reads a JSON config, calls into `syl-core`, and writes a
//! JSON report (plus CSV curves where relevant) into `--out`.
//!
//! Exit codes: 0 completed, 1 input (or I/O) error, 2 inconclusive or failed
//! verdict.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use syl_core::radial::{AnnulusProblem, Tolerances};
use syl_core::shooting::{self, ScanSpec, ShootingOptions, Status, ThresholdOptions, ThresholdStatus};
use syl_core::{symfn, verify};

#[derive(Parser)]
#[command(name = "syl", version, about = "Numerical laboratory for the sigma_k-Yamabe problem with boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for randomized sweeps; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative integration tolerance; overrides the config.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Find all radial solutions on an annulus.
    SolveAnnulus,
    /// Locate the threshold radius R_* for c1 + c2 < 0.
    Rstar,
    /// Blow-up sweep of admissible solutions with bounded C^1 norm.
    Counterexample,
    /// Cylindrical solution and bifurcation radius.
    Cylinder,
    /// Membership of an eigenvalue vector in a Garding cone.
    ConeCheck,
    /// Build a concave f from sigma_k^{1/k} and check its axioms.
    BuildF,
    /// Run invariant suites.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::SolveAnnulus => "solve-annulus",
            Command::Rstar => "rstar",
            Command::Counterexample => "counterexample",
            Command::Cylinder => "cylinder",
            Command::ConeCheck => "cone-check",
            Command::BuildF => "build-f",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanConfig {
    lo: f64,
    hi: f64,
    points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnulusConfig {
    n: usize,
    k: usize,
    #[serde(rename = "R")]
    r: f64,
    #[serde(default)]
    c1: f64,
    #[serde(default)]
    c2: f64,
    scan: Option<ScanConfig>,
    tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RstarConfig {
    n: usize,
    k: usize,
    c1: f64,
    c2: f64,
    scan: Option<ScanConfig>,
    tol: Option<f64>,
    r_max: Option<f64>,
    rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterexampleConfig {
    n: usize,
    k: usize,
    c: f64,
    #[serde(default = "default_eps")]
    eps: Vec<f64>,
    #[serde(default = "default_delta")]
    delta: f64,
    tol: Option<f64>,
}

fn default_eps() -> Vec<f64> {
    shooting::log_space(1e-4, 1e-2, 9)
}

fn default_delta() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimensionConfig {
    n: usize,
    k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeConfig {
    lambda: Vec<f64>,
    k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildConfig {
    n: usize,
    k: usize,
    alpha: f64,
    #[serde(default = "default_samples")]
    samples: usize,
}

fn default_samples() -> usize {
    500
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyConfig {
    #[serde(default = "default_suite")]
    suite: String,
}

fn default_suite() -> String {
    "all".into()
}

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    seed: u64,
    config: &'a C,
    result: R,
}

enum Outcome {
    Completed,
    Inconclusive,
}

struct Ctx {
    out: PathBuf,
    seed: u64,
    tol: Option<f64>,
}

impl Ctx {
    fn write(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    }

    fn report<C: Serialize, R: Serialize>(&self, cmd: Command, config: &C, result: R) -> anyhow::Result<()> {
        let rep = Report { command: cmd.name(), seed: self.seed, config, result };
        let mut json = serde_json::to_string_pretty(&rep)?;
        json.push('\n');
        self.write(&format!("{}.json", cmd.name()), &json)
    }

    fn rtol(&self, config: Option<f64>) -> anyhow::Result<Option<f64>> {
        let t = self.tol.or(config);
        if let Some(t) = t {
            if !(t > 0.0 && t < 1.0) {
                bail!("tolerance must lie in (0, 1), got {t}");
            }
        }
        Ok(t)
    }

    fn shooting_options(&self, config: Option<f64>) -> anyhow::Result<ShootingOptions> {
        Ok(self.rtol(config)?.map_or_else(ShootingOptions::default, ShootingOptions::with_tolerance))
    }
}

fn read_config<T: for<'de> Deserialize<'de>>(path: Option<&Path>, default: Option<T>) -> anyhow::Result<T> {
    let Some(path) = path else {
        return default.ok_or_else(|| anyhow!("--config is required for this command"));
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn scan_spec(scan: &Option<ScanConfig>) -> anyhow::Result<Option<ScanSpec>> {
    Ok(scan.as_ref().map(|s| ScanSpec::new(s.lo, s.hi, s.points)).transpose()?)
}

fn solve_annulus(ctx: &Ctx, cfg: &AnnulusConfig) -> anyhow::Result<Outcome> {
    let problem = AnnulusProblem::new(cfg.n, cfg.k, cfg.r, cfg.c1, cfg.c2)?;
    let scan = scan_spec(&cfg.scan)?.unwrap_or_else(|| ScanSpec::default_for(cfg.n, cfg.k));
    let opts = ctx.shooting_options(cfg.tol)?;
    let res = shooting::solve_annulus(&problem, &scan, &opts)?;
    for (i, s) in res.solutions.iter().enumerate() {
        ctx.write(&format!("solution_{i}.csv"), &s.trajectory.to_csv())?;
    }
    println!("{:?}: {} solution(s)", res.status, res.count());
    for s in &res.solutions {
        println!("  xi(0) = {:.12}  outer residual = {:.2e}", s.xi0, s.outer_residual);
    }
    let status = res.status;
    ctx.report(Command::SolveAnnulus, cfg, res)?;
    Ok(if status == Status::Inconclusive { Outcome::Inconclusive } else { Outcome::Completed })
}

fn rstar(ctx: &Ctx, cfg: &RstarConfig) -> anyhow::Result<Outcome> {
    let defaults = ThresholdOptions::default();
    let opts = ThresholdOptions {
        shooting: ctx.shooting_options(cfg.tol)?,
        scan: scan_spec(&cfg.scan)?,
        r_max: cfg.r_max.unwrap_or(defaults.r_max),
        rel_tol: cfg.rel_tol.unwrap_or(defaults.rel_tol),
        ..defaults
    };
    let res = shooting::find_r_star(cfg.n, cfg.k, cfg.c1, cfg.c2, &opts)?;
    println!("{:?}: R_* = {:.10} (bracket {:.10} .. {:.10})", res.status, res.r_star, res.bracket.0, res.bracket.1);
    let status = res.status;
    ctx.report(Command::Rstar, cfg, res)?;
    Ok(if status == ThresholdStatus::Bracketed { Outcome::Completed } else { Outcome::Inconclusive })
}

fn counterexample(ctx: &Ctx, cfg: &CounterexampleConfig) -> anyhow::Result<Outcome> {
    let tol = ctx.rtol(cfg.tol)?.map_or_else(Tolerances::default, |t| Tolerances::new(t, 1e-2 * t));
    let table = shooting::counterexample_sweep(cfg.n, cfg.k, cfg.c, &cfg.eps, cfg.delta, &tol)?;
    ctx.write("sweep.csv", &table.to_csv())?;
    println!(
        "{} rows, r0 = {:.6}, slope(xi_tt) = {:.4}, slope(|hess u|) = {:.4}",
        table.rows.len(),
        table.r0,
        table.xi_tt_slope,
        table.hessian_slope
    );
    ctx.report(Command::Counterexample, cfg, table)?;
    Ok(Outcome::Completed)
}

fn cylinder(ctx: &Ctx, cfg: &DimensionConfig) -> anyhow::Result<Outcome> {
    let cyl = shooting::cylinder_solution(cfg.n, cfg.k)?;
    println!("xi_cyl = {:.6}, threshold = {:.4}", cyl.xi, cyl.bifurcation_radius);
    ctx.report(Command::Cylinder, cfg, cyl)?;
    Ok(Outcome::Completed)
}

#[derive(Serialize)]
struct ConeResult {
    inside: bool,
    sigma: Vec<f64>,
}

fn cone_check(ctx: &Ctx, cfg: &ConeConfig) -> anyhow::Result<Outcome> {
    let n = cfg.lambda.len();
    if cfg.k == 0 || cfg.k > n {
        bail!("k = {} out of range for {n} eigenvalues", cfg.k);
    }
    if cfg.lambda.iter().any(|v| !v.is_finite()) {
        bail!("eigenvalues must be finite");
    }
    let sigma = symfn::elementary_symmetric_all(&cfg.lambda)[1..=cfg.k].to_vec();
    let inside = symfn::in_gamma_k(&cfg.lambda, cfg.k);
    println!("{inside}");
    ctx.report(Command::ConeCheck, cfg, ConeResult { inside, sigma })?;
    Ok(Outcome::Completed)
}

fn build_f(ctx: &Ctx, cfg: &BuildConfig) -> anyhow::Result<Outcome> {
    let rep = verify::build_f_report(cfg.n, cfg.k, cfg.alpha, cfg.samples, ctx.seed)?;
    println!("delta = {:.6}, axioms {}", rep.delta, if rep.passed { "pass" } else { "FAIL" });
    let passed = rep.passed;
    ctx.report(Command::BuildF, cfg, rep)?;
    Ok(if passed { Outcome::Completed } else { Outcome::Inconclusive })
}

fn run_verify(ctx: &Ctx, cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    let reports = verify::run(&cfg.suite, ctx.seed)?;
    for r in &reports {
        for c in &r.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            println!("{mark} {}/{}: max violation {:.3e} (tol {:.1e})", r.suite, c.name, c.max_violation, c.tolerance);
        }
    }
    let passed = reports.iter().all(|r| r.passed());
    ctx.report(Command::Verify, cfg, reports)?;
    Ok(if passed { Outcome::Completed } else { Outcome::Inconclusive })
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SYL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| anyhow!("SYL_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    configure_threads()?;
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let ctx = Ctx { out: cli.out.clone(), seed: cli.seed, tol: cli.tol };
    let path = cli.config.as_deref();
    match cli.command {
        Command::SolveAnnulus => solve_annulus(&ctx, &read_config(path, None)?),
        Command::Rstar => rstar(&ctx, &read_config(path, None)?),
        Command::Counterexample => counterexample(&ctx, &read_config(path, None)?),
        Command::Cylinder => cylinder(&ctx, &read_config(path, None)?),
        Command::ConeCheck => cone_check(&ctx, &read_config(path, None)?),
        Command::BuildF => build_f(&ctx, &read_config(path, None)?),
        Command::Verify => run_verify(&ctx, &read_config(path, Some(VerifyConfig { suite: default_suite() }))?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Outcome::Completed) => ExitCode::SUCCESS,
        Ok(Outcome::Inconclusive) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
