//! Command-line front end.
//!
//! Subcommands: `solve` (one exponent → field, descent log, report), `study`
//! (the full ladder pipeline), `growballs` (solve, then ball growth and its
//! bound table), `energy` (solve, then the accounting report only), and
//! `verify` (named self-check suites). Exit codes: 0 success, 1 failed
//! verification checks, 2 run-stage errors (solver, detection, growth),
//! 3 configuration-stage errors (bad file, bad schema, bad flags).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::ballgrowth::{annulus_certificates, build_u_field, detect_singularities, grow_balls};
use crate::error::{Error, Result};
use crate::solver::{minimize_p_harmonic, MinimizeResult};

use super::config::StudyConfig;
use super::io;
use super::study::{energy_report_for, run_study};
use super::verify::run_suite;

#[derive(Parser)]
#[command(
    name = "pharm",
    version,
    about = "Minimize p-Dirichlet energies of circle- and torus-valued maps, \
             track their singularities, and check the bound tables"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize at one exponent; write the field, descent log, and report.
    Solve(RunArgs),
    /// Run the ladder study: solve, detect, account, grow, bound, extrapolate.
    Study(StudyArgs),
    /// Minimize, then run ball growth and write its event log and bound table.
    Growballs(RunArgs),
    /// Minimize, then write the energy-accounting report only.
    Energy(RunArgs),
    /// Run a self-check suite: geometry, scalar, energetics, or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Exponent to solve at (default: the finest ladder entry).
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct StudyArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Solve all rungs concurrently from cold starts instead of warm-starting
    /// along the ladder.
    #[arg(long)]
    parallel: bool,
}

/// Errors tagged by the stage they belong to, for the exit code.
enum Failure {
    Config(Error),
    Run(Error),
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn load(config: &Path, out: Option<&Path>, seed: Option<u64>) -> CliResult<(StudyConfig, PathBuf)> {
    let text = fs::read_to_string(config)
        .map_err(|e| Failure::Config(Error::Config(format!("{}: {e}", config.display()))))?;
    let mut cfg = StudyConfig::from_json(&text).map_err(Failure::Config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out_dir = out.map_or_else(|| PathBuf::from(&cfg.out_dir), Path::to_path_buf);
    Ok((cfg, out_dir))
}

fn pick_p(cfg: &StudyConfig, flag: Option<f64>) -> CliResult<f64> {
    let p = flag.unwrap_or_else(|| *cfg.ladder.last().expect("validated ladder is nonempty"));
    if !(p > 1.0 && p < 2.0) {
        return Err(Failure::Config(Error::Config(format!(
            "exponent {p} outside (1, 2)"
        ))));
    }
    Ok(p)
}

fn solve_once(cfg: &StudyConfig, p: f64) -> Result<MinimizeResult> {
    let init = cfg.initial_field(cfg.seed)?;
    minimize_p_harmonic(p, &init, &cfg.solver_options(false))
}

/// Shortest round-trip rendering of the exponent for file names.
fn p_tag(p: f64) -> String {
    format!("{p}")
}

fn cmd_solve(args: &RunArgs) -> CliResult {
    let (cfg, out) = load(&args.config, args.out.as_deref(), args.seed)?;
    let p = pick_p(&cfg, args.p)?;
    let res = solve_once(&cfg, p).map_err(Failure::Run)?;
    let detection = detect_singularities(&res.field).map_err(Failure::Run)?;
    let report =
        energy_report_for(&res.field, &detection.configuration, p).map_err(Failure::Run)?;
    let tag = p_tag(p);
    let field_path = out.join(format!("field_p{tag}.csv"));
    io::write_field_csv(&field_path, &res.field).map_err(Failure::Run)?;
    io::write_iterations_csv(&out.join(format!("iterations_p{tag}.csv")), &res.log)
        .map_err(Failure::Run)?;
    io::write_energy_report_json(&out.join(format!("report_p{tag}.json")), &report)
        .map_err(Failure::Run)?;
    println!(
        "solved p={p}: energy {:.6e}, {} iterations{}, {} singularit{}",
        res.energy,
        res.iterations,
        if res.hit_max_iters {
            " (budget hit)"
        } else {
            ""
        },
        report.per_singularity.len(),
        if report.per_singularity.len() == 1 {
            "y"
        } else {
            "ies"
        },
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_energy(args: &RunArgs) -> CliResult {
    let (cfg, out) = load(&args.config, args.out.as_deref(), args.seed)?;
    let p = pick_p(&cfg, args.p)?;
    let res = solve_once(&cfg, p).map_err(Failure::Run)?;
    let detection = detect_singularities(&res.field).map_err(Failure::Run)?;
    let report =
        energy_report_for(&res.field, &detection.configuration, p).map_err(Failure::Run)?;
    let path = out.join(format!("report_p{}.json", p_tag(p)));
    io::write_energy_report_json(&path, &report).map_err(Failure::Run)?;
    println!(
        "E_p {:.6e}, completed {}, E_ren^p {:.6e}",
        report.total_energy,
        report
            .total_energy_completed
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}")),
        report.e_ren_p,
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_growballs(args: &RunArgs) -> CliResult {
    let (cfg, out) = load(&args.config, args.out.as_deref(), args.seed)?;
    let p = pick_p(&cfg, args.p)?;
    let res = solve_once(&cfg, p).map_err(Failure::Run)?;
    let growth = grow_balls(&res.field, p, cfg.delta).map_err(Failure::Run)?;
    let (_, mixed) = build_u_field(&res.field, &growth, p, cfg.delta).map_err(Failure::Run)?;
    let mut bounds = mixed.certificates;
    bounds.extend(annulus_certificates(&res.field, &growth).map_err(Failure::Run)?);
    let tag = p_tag(p);
    io::write_growth_json(&out.join(format!("growth_p{tag}.json")), &growth)
        .map_err(Failure::Run)?;
    io::write_certificates_csv(&out.join(format!("certificates_p{tag}.csv")), &bounds)
        .map_err(Failure::Run)?;
    let passed = bounds.iter().filter(|c| c.pass).count();
    println!(
        "growth: {} disk(s), Σdiam target {}{}; bounds {passed}/{} pass",
        growth.disks.len(),
        cfg.delta,
        if growth.reached_delta {
            " reached"
        } else {
            " stalled"
        },
        bounds.len(),
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_study(args: &StudyArgs) -> CliResult {
    let (cfg, out) = load(&args.config, args.out.as_deref(), args.seed)?;
    let report = run_study(&cfg, args.parallel).map_err(Failure::Run)?;
    io::write_study_json(&out.join("study.json"), &report).map_err(Failure::Run)?;
    for rung in &report.rungs {
        let tag = p_tag(rung.p);
        io::write_field_csv(&out.join(format!("field_p{tag}.csv")), &rung.field)
            .map_err(Failure::Run)?;
        io::write_iterations_csv(&out.join(format!("iterations_p{tag}.csv")), &rung.log)
            .map_err(Failure::Run)?;
        io::write_energy_report_json(&out.join(format!("report_p{tag}.json")), &rung.report)
            .map_err(Failure::Run)?;
        let mut bounds = rung.report.bounds.clone();
        bounds.extend(rung.growth_bounds.iter().cloned());
        io::write_certificates_csv(&out.join(format!("certificates_p{tag}.csv")), &bounds)
            .map_err(Failure::Run)?;
        if let Some(growth) = &rung.growth {
            io::write_growth_json(&out.join(format!("growth_p{tag}.json")), growth)
                .map_err(Failure::Run)?;
        }
    }
    for rung in &report.rungs {
        println!(
            "p={}: (2−p)·E_p = {:.6} raw{}, {} site(s)",
            rung.p,
            rung.scaled_energy,
            rung.scaled_energy_completed
                .map_or_else(String::new, |v| format!(", {v:.6} completed")),
            rung.sites.len(),
        );
    }
    if let Some(l) = report.extrapolated_scaled_energy {
        println!("extrapolated completed scaled energy: {l:.6}");
    }
    if let Some(l) = report.extrapolated_scaled_energy_raw {
        println!("extrapolated raw scaled energy: {l:.6}");
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_verify(suite: &str) -> CliResult<bool> {
    let rows = run_suite(suite).map_err(Failure::Config)?;
    let mut all = true;
    for r in &rows {
        println!(
            "{} {}::{} {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.name,
            r.detail
        );
        all &= r.pass;
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    println!("verify: {passed}/{} checks passed", rows.len());
    Ok(all)
}

/// Parse the command line, dispatch, and map every outcome to an exit code.
#[must_use]
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.cmd {
        Cmd::Solve(args) => cmd_solve(args).map(|()| true),
        Cmd::Study(args) => cmd_study(args).map(|()| true),
        Cmd::Growballs(args) => cmd_growballs(args).map(|()| true),
        Cmd::Energy(args) => cmd_energy(args).map(|()| true),
        Cmd::Verify { suite } => cmd_verify(suite),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e}");
            3
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}
