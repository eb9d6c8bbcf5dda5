//! Scenario runner behind the `fraccontact` binary.
//!
//! Exit codes: 0 success, 1 a bound or identity check failed, 2 numerical
//! error, 3 configuration or usage error, 4 I/O error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bounds::{
    beta_identity_residual, check_solution_against_bounds, djrbashian_identity_residual, BoundReport, Regime,
    IDENTITY_NODES,
};
use crate::config::{parse_times, ConfigError, ScenarioConfig};
use crate::error::{Error, Result};
use crate::hierarchy::{solve_chain, solve_chain_streaming, NormRow};
use crate::quadrature::{integrate, Tolerance};
use crate::specfun::{gamma, mittag_leffler, mittag_leffler_two, wright, wright_moment, Alpha};
use crate::subordination::{verify_mild_solution_scalar, TimeGrid, MILD_RESIDUAL_TOLERANCE};

pub const EXIT_CHECK_FAILED: i32 = 1;

pub const CHAIN_NORMS_HEADER: &str = "n,t,max_norm,probe_value";
pub const IDENTITIES_HEADER: &str = "check,params,residual,tolerance,pass";

pub const DJRBASHIAN_TOLERANCE: f64 = 1e-6;
pub const DJRBASHIAN_MARKOV_TOLERANCE: f64 = 1e-10;
pub const BETA_TOLERANCE: f64 = 1e-8;
pub const WRIGHT_MOMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "fraccontact", version, about = "Fractional contact-model correlation solver")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated times (overrides chain.times).
    #[arg(long)]
    pub times: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the hierarchy and write chain_norms.csv.
    Solve(RunArgs),
    /// Compare the solution with the a-priori bounds; writes bound_report.csv.
    Bounds(RunArgs),
    /// Check the integral identities; writes identities.csv.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Only run one check: djrbashian, beta, wright_moment or mild_solution.
        #[arg(long)]
        check: Option<String>,
    },
    /// Print a special function on a range as tab-separated x, value rows.
    Table {
        /// E, E2, Phi or Gamma.
        function: String,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// β for E2 (defaults to α).
        #[arg(long)]
        beta: Option<f64>,
        /// start:stop:count, or a single point.
        #[arg(long, default_value = "0:1:11", allow_hyphen_values = true)]
        range: String,
    },
}

/// Runs the CLI on `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 3;
        }
        // a second call in the same process keeps the first pool, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.command) {
        Ok(true) => 0,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Solve(args) => {
            let (cfg, out) = prepare(&args, "solve")?;
            run_solve(&cfg, &out)
        }
        Command::Bounds(args) => {
            let (cfg, out) = prepare(&args, "bounds")?;
            run_bounds(&cfg, &out)
        }
        Command::Verify { run, check } => {
            let check = check.as_deref().map(Check::parse).transpose()?;
            let (cfg, out) = prepare(&run, "verify")?;
            run_verify(&cfg, &out, check)
        }
        Command::Table {
            function,
            alpha,
            beta,
            range,
        } => {
            let f = TableFunction::parse(&function)?;
            let text = run_table(f, alpha, beta, &range)?;
            print!("{text}");
            Ok(true)
        }
    }
}

fn prepare(args: &RunArgs, subcommand: &str) -> Result<(ScenarioConfig, PathBuf)> {
    let mut cfg = ScenarioConfig::load(&args.config)?;
    if let Some(t) = &args.times {
        cfg = cfg.with_times(parse_times(t)?)?;
    }
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let meta = format!("# fraccontact {} {subcommand}\n{}", env!("CARGO_PKG_VERSION"), cfg.echo());
    write_file(&out.join("run_meta.txt"), &meta)?;
    if !cfg.defaults_applied.is_empty() {
        eprintln!("defaults applied: {}", cfg.defaults_applied.join(", "));
    }
    Ok((cfg, out))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn norm_row_csv(r: &NormRow) -> String {
    format!("{},{:.16e},{:.16e},{:.16e}", r.n, r.t, r.max_norm, r.probe_value)
}

/// Solves the chain, appending and flushing one CSV row per (n, t) so that a
/// failure leaves every completed row on disk.
pub fn run_solve(cfg: &ScenarioConfig, out: &Path) -> Result<bool> {
    let chain = cfg.chain_config()?;
    let path = out.join("chain_norms.csv");
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(&path, e);
    writeln!(w, "{CHAIN_NORMS_HEADER}").and_then(|_| w.flush()).map_err(io)?;
    solve_chain_streaming(&chain, |row, _| {
        writeln!(w, "{}", norm_row_csv(row)).and_then(|_| w.flush()).map_err(io)
    })?;
    Ok(true)
}

pub fn bound_report(cfg: &ScenarioConfig) -> Result<BoundReport> {
    let chain = cfg.chain_config()?;
    let sup_a = chain.kernel.sup_norm_a();
    let solution = solve_chain(&chain)?;
    check_solution_against_bounds(&solution.norms, &chain.params, sup_a, Regime::of(cfg.kappa))
}

pub fn run_bounds(cfg: &ScenarioConfig, out: &Path) -> Result<bool> {
    let report = bound_report(cfg)?;
    write_file(&out.join("bound_report.csv"), &report.to_csv())?;
    if let Some(fit) = report.envelope_fit {
        let t_star = fit.t_star.map_or("none".to_string(), |t| format!("{t:.16e}"));
        let text = format!(
            "regime = {}\nA = {:.16e}\nm_estimate = {:.16e}\nm_dominating = {:.16e}\nexponent_or_slope = {:.16e}\nt_star = {t_star}\n",
            report.regime, report.a, fit.m_estimate, fit.m_dominating, fit.exponent_or_slope
        );
        write_file(&out.join("envelope_fit.txt"), &text)?;
    }
    let failed = report.rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows exceed their bound", report.rows.len());
    }
    Ok(failed == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Djrbashian,
    Beta,
    WrightMoment,
    MildSolution,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Djrbashian, Check::Beta, Check::WrightMoment, Check::MildSolution];

    pub fn name(self) -> &'static str {
        match self {
            Check::Djrbashian => "djrbashian",
            Check::Beta => "beta",
            Check::WrightMoment => "wright_moment",
            Check::MildSolution => "mild_solution",
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Self, ConfigError> {
        Self::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            ConfigError::single(format!(
                "--check: unknown check `{s}` (expected djrbashian, beta, wright_moment or mild_solution)"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub check: Check,
    pub params: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityRow {
    fn new(check: Check, params: String, residual: f64, tolerance: f64) -> Self {
        Self {
            check,
            params,
            residual,
            tolerance,
            pass: residual < tolerance,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{}",
            self.check.name(),
            self.params,
            self.residual,
            self.tolerance,
            self.pass
        )
    }
}

/// The sweep orders, with the scenario's α appended when it is not already
/// among them.
fn alphas(extra: f64, markov: bool) -> Vec<f64> {
    let mut v = vec![0.3, 0.5, 0.8];
    if !v.contains(&extra) && (extra < 1.0 || markov) {
        v.push(extra);
    }
    v
}

pub fn identity_rows(cfg: &ScenarioConfig, only: Option<Check>) -> Result<Vec<IdentityRow>> {
    let wanted = |c: Check| only.is_none_or(|o| o == c);
    let mut rows = Vec::new();
    if wanted(Check::Djrbashian) {
        let mut sweep = alphas(cfg.alpha, false);
        sweep.push(1.0);
        for &a in &sweep {
            let tol = if a == 1.0 { DJRBASHIAN_MARKOV_TOLERANCE } else { DJRBASHIAN_TOLERANCE };
            for z in [-2.0, -0.5, 1.0] {
                for lambda in [-1.0, 0.5, 2.0] {
                    for t in [0.5, 1.0, 2.0] {
                        let r = djrbashian_identity_residual(Alpha::new(a)?, z, lambda, t, IDENTITY_NODES)?;
                        rows.push(IdentityRow::new(
                            Check::Djrbashian,
                            format!("alpha={a};z={z};lambda={lambda};t={t}"),
                            r,
                            tol,
                        ));
                    }
                }
            }
        }
    }
    if wanted(Check::Beta) {
        let mut cases: Vec<(f64, f64)> = Vec::new();
        for a in alphas(cfg.alpha, false) {
            for b in [0.4, 0.7, 1.0] {
                cases.push((a, b));
            }
        }
        cases.push((1.0, 1.0));
        for (a, b) in cases {
            for t in [0.5, 2.5] {
                let r = beta_identity_residual(a, b, t)?;
                rows.push(IdentityRow::new(Check::Beta, format!("alpha={a};beta={b};t={t}"), r, BETA_TOLERANCE));
            }
        }
    }
    if wanted(Check::WrightMoment) {
        for a in alphas(cfg.alpha, false) {
            let al = Alpha::new(a)?;
            for n in 0..4u32 {
                let breaks = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0];
                let tol = Tolerance {
                    abs: 1e-12,
                    rel: 1e-10,
                    max_intervals: 500,
                };
                let mut err = None;
                let q = integrate(
                    |t| {
                        wright(al, t).map(|v| t.powi(n as i32) * v).unwrap_or_else(|e| {
                            err.get_or_insert(e);
                            0.0
                        })
                    },
                    &breaks,
                    tol,
                )?;
                if let Some(e) = err {
                    return Err(e);
                }
                let r = (q.value - wright_moment(al, n)?).abs();
                rows.push(IdentityRow::new(
                    Check::WrightMoment,
                    format!("alpha={a};n={n}"),
                    r,
                    WRIGHT_MOMENT_TOLERANCE,
                ));
            }
        }
    }
    if wanted(Check::MildSolution) {
        let grid = TimeGrid::new(1.0, 200)?;
        let mut sweep = alphas(cfg.alpha, true);
        if !sweep.contains(&1.0) {
            sweep.push(1.0);
        }
        for a in sweep {
            let report = verify_mild_solution_scalar(Alpha::new(a)?, -1.0, 1.0, f64::cos, grid, 0.25)?;
            rows.push(IdentityRow {
                check: Check::MildSolution,
                params: format!(
                    "alpha={a};lambda=-1;x0=1;forcing=cos;dt={};refined_residual={:.3e}",
                    report.dt, report.refined_residual
                ),
                residual: report.residual,
                tolerance: MILD_RESIDUAL_TOLERANCE,
                pass: report.passes(),
            });
        }
    }
    Ok(rows)
}

pub fn run_verify(cfg: &ScenarioConfig, out: &Path, only: Option<Check>) -> Result<bool> {
    let rows = identity_rows(cfg, only)?;
    let mut text = String::from(IDENTITIES_HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.csv());
        text.push('\n');
    }
    write_file(&out.join("identities.csv"), &text)?;
    let failed: Vec<&IdentityRow> = rows.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("{} failed: {} residual {:e} >= {:e}", r.check.name(), r.params, r.residual, r.tolerance);
    }
    Ok(failed.is_empty())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFunction {
    E,
    E2,
    Phi,
    Gamma,
}

impl TableFunction {
    pub fn parse(s: &str) -> std::result::Result<Self, ConfigError> {
        match s {
            "E" => Ok(Self::E),
            "E2" => Ok(Self::E2),
            "Phi" => Ok(Self::Phi),
            "Gamma" => Ok(Self::Gamma),
            _ => Err(ConfigError::single(format!(
                "unknown function `{s}` (expected E, E2, Phi or Gamma)"
            ))),
        }
    }
}

fn parse_range(spec: &str) -> std::result::Result<Vec<f64>, ConfigError> {
    let bad = || ConfigError::single(format!("--range: expected start:stop:count or a number, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [x] => Ok(vec![x.parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let a: f64 = a.parse().map_err(|_| bad())?;
            let b: f64 = b.parse().map_err(|_| bad())?;
            let n: usize = n.parse().map_err(|_| bad())?;
            if n == 0 || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        _ => Err(bad()),
    }
}

pub fn run_table(f: TableFunction, alpha: f64, beta: Option<f64>, range: &str) -> Result<String> {
    let xs = parse_range(range)?;
    let al = Alpha::new(alpha)?;
    let mut out = String::from("x\tvalue\n");
    for x in xs {
        let v = match f {
            TableFunction::E => mittag_leffler(al, x)?,
            TableFunction::E2 => mittag_leffler_two(al, beta.unwrap_or(alpha), x)?,
            TableFunction::Phi => wright(al, x)?,
            TableFunction::Gamma => gamma(x)?,
        };
        out.push_str(&format!("{x:.16e}\t{v:.16e}\n"));
    }
    Ok(out)
}
