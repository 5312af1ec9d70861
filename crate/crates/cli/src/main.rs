//! Command-line driver: single risk traces, Monte-Carlo batches, cost and
//! threshold calibration, the SNR sweep, and parameter feasibility checks.
//! Results land as CSV files in the output directory together with an echo
//! of the fully resolved configuration.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use twosided::analysis::{self, DistanceRatios};
use twosided::cusum::{calibrate_threshold, Direction};
use twosided::detector::{trace_csv_row, TRACE_CSV_HEADER};
use twosided::sim::{
    calibrate_b, generate_run, metrics_csv_row, monte_carlo, snr_sweep, sweep_csv_row, CalibrateB,
    ChangeTime, InitialState, SimConfig, SweepConfig, METRICS_CSV_HEADER, SWEEP_CSV_HEADER,
};
use twosided::{CostParams, DistributionPair, Side, TwoSidedDetector};

#[derive(Parser)]
#[command(
    name = "twosided",
    about = "Streaming two-sided change detection between two known densities",
    version
)]
struct Cli {
    /// Configuration file (TOML); defaults apply for missing keys.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for CSV results and the config echo.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Override a config key (repeatable, last one wins), e.g. --set runs=500.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Master seed override; applied after --set.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded stream and write the per-step risk trace.
    Trace,
    /// Run a Monte-Carlo batch of the two-sided detector and write metrics.
    Simulate,
    /// Calibrate the false-alarm cost b and the CUSUM threshold to the
    /// target false-alarm probability.
    Calibrate,
    /// Calibrate and compare both detectors across the configured SNR list.
    Sweep,
    /// Evaluate the cost-parameter feasibility conditions.
    CheckParams,
}

enum CliError {
    Config(String),
    Run(twosided::Error),
}

impl From<twosided::Error> for CliError {
    fn from(e: twosided::Error) -> Self {
        CliError::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("config error: {message}");
            ExitCode::from(2)
        }
        // Out-of-range values caught by the library are still bad config.
        Err(CliError::Run(
            error @ (twosided::Error::InvalidParams(_) | twosided::Error::InvalidInput(_)),
        )) => {
            eprintln!("config error: {error}");
            ExitCode::from(2)
        }
        Err(CliError::Run(error)) => {
            eprintln!("error: {error}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref(), &cli.set, cli.seed)
        .map_err(CliError::Config)?;
    fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cli.out.display())))?;
    write_file(&cli.out.join("config_echo.toml"), &cfg.to_toml_string())?;

    match cli.command {
        Command::Trace => trace(&cfg, &cli.out),
        Command::Simulate => simulate(&cfg, &cli.out),
        Command::Calibrate => calibrate(&cfg, &cli.out),
        Command::Sweep => sweep(&cfg, &cli.out),
        Command::CheckParams => check_params(&cfg, &cli.out),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Pair and distance ratios at one SNR point.
fn pair_at(snr_db: f64) -> Result<(DistributionPair, DistanceRatios), CliError> {
    let pair = DistributionPair::gaussian_from_snr_db(snr_db)?;
    let ratios = analysis::distance_ratios(&pair, None, None)?;
    Ok((pair, ratios))
}

/// Resolves a and c, deriving both from the distance ratios when `auto`.
fn resolve_a_c(cfg: &Config, ratios: &DistanceRatios) -> Result<(f64, f64), CliError> {
    match (cfg.a.value(), cfg.c.value()) {
        (Some(a), Some(c)) => Ok((a, c)),
        (None, None) => {
            let suggested = analysis::suggest_params(ratios, 1.0)?;
            Ok((suggested.a, suggested.c))
        }
        (a, c) => {
            let suggested = analysis::suggest_params(ratios, 1.0)?;
            Ok((a.unwrap_or(suggested.a), c.unwrap_or(suggested.c)))
        }
    }
}

const B_SEARCH_BOUNDS: (f64, f64) = (1.0, 1e9);

/// Resolves b, calibrating it to the target false-alarm probability when
/// `auto`.
fn resolve_b(
    cfg: &Config,
    pair: &DistributionPair,
    a: f64,
    c: f64,
) -> Result<f64, CliError> {
    if let Some(b) = cfg.b.value() {
        return Ok(b);
    }
    let ChangeTime::At(m) = cfg.m.to_change_time() else {
        return Err(CliError::Config(
            "key `b`: \"auto\" needs a change time m >= 2 to define the false-alarm window"
                .into(),
        ));
    };
    let cal = calibrate_b(&CalibrateB {
        pair: pair.clone(),
        a,
        c,
        m,
        target_pfa: cfg.target_pfa,
        runs: cfg.calibration_runs.unwrap_or(cfg.runs),
        master_seed: cfg.master_seed ^ 0xB0000000,
        bounds: B_SEARCH_BOUNDS,
    })?;
    Ok(cal.b)
}

fn trace(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let snr_db = cfg.snr_db[0];
    let (pair, ratios) = pair_at(snr_db)?;
    let (a, c) = resolve_a_c(cfg, &ratios)?;
    let b = resolve_b(cfg, &pair, a, c)?;
    let params = CostParams::new(a, b, c)?;

    let change = cfg.m.to_change_time();
    let samples = generate_run(&pair, Side::A, change, cfg.n_max, cfg.master_seed)?;
    let mut detector = TwoSidedDetector::new(pair, params)?;
    let mut csv = String::from(TRACE_CSV_HEADER);
    csv.push('\n');
    for &x in &samples {
        let report = detector.step(x)?;
        csv.push_str(&trace_csv_row(report.n, &report.decision));
        csv.push('\n');
    }
    write_file(&out.join("trace.csv"), &csv)?;
    write_file(&out.join("trace.gp"), GNUPLOT_SCRIPT)?;
    println!(
        "trace: {} samples (snr {snr_db} dB, change {change}, a={a}, c={c}, b={b}) -> {}",
        cfg.n_max,
        out.join("trace.csv").display()
    );
    Ok(())
}

const GNUPLOT_SCRIPT: &str = "\
# Plots the risk trace produced alongside this script.
set datafile separator ','
set xlabel 'n'
set ylabel 'log risk'
set key outside
plot 'trace.csv' using 1:2 with lines title 'no change (A)', \\
     ''          using 1:3 with lines title 'no change (B)', \\
     ''          using 1:4 with lines title 'best change (A)', \\
     ''          using 1:6 with lines title 'best change (B)'
";

fn simulate(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let snr_db = cfg.snr_db[0];
    let (pair, ratios) = pair_at(snr_db)?;
    let (a, c) = resolve_a_c(cfg, &ratios)?;
    let b = resolve_b(cfg, &pair, a, c)?;
    let sim = SimConfig {
        pair,
        params: CostParams::new(a, b, c)?,
        initial: InitialState::Random,
        change: cfg.m.to_change_time(),
        n_max: cfg.n_max,
        runs: cfg.runs,
        master_seed: cfg.master_seed,
    };
    let metrics = monte_carlo(&sim)?;
    let mut csv = String::from(METRICS_CSV_HEADER);
    csv.push('\n');
    csv.push_str(&metrics_csv_row(snr_db, "two_sided", &metrics));
    csv.push('\n');
    write_file(&out.join("metrics.csv"), &csv)?;
    println!(
        "simulate: {} runs at snr {snr_db} dB -> pfa {:.4}, p_incorrect {:.4}, mean delay {:?} \
         (digest {})",
        metrics.runs, metrics.pfa, metrics.p_incorrect, metrics.mean_delay, metrics.config_digest
    );
    Ok(())
}

fn calibrate(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let snr_db = cfg.snr_db[0];
    let (pair, ratios) = pair_at(snr_db)?;
    let (a, c) = resolve_a_c(cfg, &ratios)?;
    let ChangeTime::At(m) = cfg.m.to_change_time() else {
        return Err(CliError::Config(
            "calibrate needs a change time m >= 2 to define the false-alarm window".into(),
        ));
    };
    let runs = cfg.calibration_runs.unwrap_or(cfg.runs);

    let b_cal = calibrate_b(&CalibrateB {
        pair: pair.clone(),
        a,
        c,
        m,
        target_pfa: cfg.target_pfa,
        runs,
        master_seed: cfg.master_seed ^ 0xB0000000,
        bounds: B_SEARCH_BOUNDS,
    })?;
    let h_cal = calibrate_threshold(
        &pair,
        Direction::F0ToF1,
        m,
        cfg.target_pfa,
        runs,
        cfg.master_seed ^ 0xC0000000,
    )?;

    let mut csv = String::from("detector,parameter,value,pfa,pfa_ci_lo,pfa_ci_hi,runs,iterations\n");
    csv.push_str(&format!(
        "two_sided,b,{},{},{},{},{},{}\n",
        b_cal.b, b_cal.pfa, b_cal.pfa_ci.0, b_cal.pfa_ci.1, b_cal.runs, b_cal.iterations
    ));
    csv.push_str(&format!(
        "cusum,threshold,{},{},{},{},{},{}\n",
        h_cal.threshold, h_cal.pfa, h_cal.pfa_ci.0, h_cal.pfa_ci.1, h_cal.runs, h_cal.iterations
    ));
    write_file(&out.join("calibration.csv"), &csv)?;
    println!(
        "calibrate: snr {snr_db} dB, target pfa {} -> b = {:.4} (pfa {:.4}), cusum threshold = \
         {:.4} (pfa {:.4})",
        cfg.target_pfa, b_cal.b, b_cal.pfa, h_cal.threshold, h_cal.pfa
    );
    Ok(())
}

fn sweep(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let a_c = match (cfg.a.value(), cfg.c.value()) {
        (Some(a), Some(c)) => Some((a, c)),
        (None, None) => None,
        _ => {
            return Err(CliError::Config(
                "keys `a`/`c`: a sweep needs both auto or both numeric".into(),
            ))
        }
    };
    let ChangeTime::At(m) = cfg.m.to_change_time() else {
        return Err(CliError::Config(
            "sweep needs a change time m >= 2 (key `m`)".into(),
        ));
    };
    let rows = snr_sweep(&SweepConfig {
        snr_db: cfg.snr_db.clone(),
        target_pfa: cfg.target_pfa,
        m,
        n_max: cfg.n_max,
        runs: cfg.runs,
        calibration_runs: cfg.calibration_runs.unwrap_or(cfg.runs),
        master_seed: cfg.master_seed,
        a_c,
        b: cfg.b.value(),
        b_bounds: B_SEARCH_BOUNDS,
    })?;

    let mut sweep_csv = String::from(SWEEP_CSV_HEADER);
    sweep_csv.push('\n');
    let mut metrics_csv = String::from(METRICS_CSV_HEADER);
    metrics_csv.push('\n');
    for row in &rows {
        sweep_csv.push_str(&sweep_csv_row(row));
        sweep_csv.push('\n');
        metrics_csv.push_str(&metrics_csv_row(row.snr_db, "two_sided", &row.two_sided));
        metrics_csv.push('\n');
        metrics_csv.push_str(&metrics_csv_row(row.snr_db, "cusum", &row.cusum));
        metrics_csv.push('\n');
        println!(
            "sweep: snr {:+.1} dB -> two-sided delay {:?}, cusum delay {:?}, ratio {:?}",
            row.snr_db, row.two_sided.mean_delay, row.cusum.mean_delay, row.delay_ratio
        );
    }
    write_file(&out.join("sweep.csv"), &sweep_csv)?;
    write_file(&out.join("metrics.csv"), &metrics_csv)?;
    Ok(())
}

fn check_params(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let snr_db = cfg.snr_db[0];
    let (_, ratios) = pair_at(snr_db)?;
    let (a, c) = resolve_a_c(cfg, &ratios)?;
    let b = cfg.b.value().unwrap_or(10_000.0);
    let report = analysis::check_conditions(&CostParams { a, b, c }, &ratios);

    println!(
        "parameters: a = {a}, c = {c} at snr {snr_db} dB (d0' = {:.6}, d1 = {:.6})",
        ratios.d0_prime, ratios.d1
    );
    let mut csv = String::from("condition,satisfied\n");
    for (label, satisfied) in report.rows() {
        println!("  {label:<12} {}", if satisfied { "pass" } else { "fail" });
        csv.push_str(&format!("{label},{satisfied}\n"));
    }
    let verdict = if report.incorrect_detection_vanishes {
        "satisfied"
    } else {
        "not satisfied"
    };
    println!("vanishing-incorrect-detection conditions: {verdict}");
    csv.push_str(&format!(
        "vanishing incorrect detection,{}\n",
        report.incorrect_detection_vanishes
    ));
    write_file(&out.join("conditions.csv"), &csv)?;
    Ok(())
}
