use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use overspill::harness::{
    oracle_value, run_experiment, simulate, solve, summarize_dir, thread_pool, Experiment,
    OracleKind, SimulationLaw, Suite,
};
use overspill::ladder::SolverOptions;
use overspill::model::config::{load_config, model_hash, LoadedConfig};
use overspill::sim::write_paths_csv;
use overspill::{ConfigError, DebtorSet, HarnessError};

#[derive(Debug, Parser)]
#[command(name = "overspill", version, about = "Default contagion simulator and ladder solver")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "OVERSPILL_THREADS")]
    threads: Option<usize>,
    /// Integration tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model configuration.
    Validate { config: PathBuf },
    /// Simulate paths and report per-debtor event frequencies at `t`.
    Simulate {
        config: PathBuf,
        /// p0, pc or pbar.
        #[arg(long)]
        law: SimulationLaw,
        /// Contagious set for pc, default-adjusted set for pbar.
        #[arg(long, default_value = "none")]
        contagious: String,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        t: f64,
        /// Write every path's events to this CSV file.
        #[arg(long)]
        dump_paths: Option<PathBuf>,
    },
    /// Survival probability of a target through the ladder.
    Solve {
        config: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the ladder and its values along the first path as JSON.
        #[arg(long)]
        dump_ladder: Option<PathBuf>,
    },
    /// Evaluate a deterministic reference.
    Oracle {
        config: PathBuf,
        /// single, markov or case2.
        #[arg(long)]
        kind: OracleKind,
        #[arg(long)]
        target: String,
        #[arg(long)]
        t: f64,
    },
    /// Run a comparison suite and emit its report.
    Compare {
        config: PathBuf,
        /// survival, joint_b, girsanov, identity42, validate_suite or
        /// oracle_compare.
        #[arg(long)]
        suite: Suite,
        /// Observation times (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Verdict threshold in combined standard errors.
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        /// Also store the JSON report in this directory.
        #[arg(long)]
        report_dir: Option<PathBuf>,
    },
    /// Summarize the JSON reports stored in a directory.
    Report { dir: PathBuf },
}

fn parse_set(s: &str, n: usize) -> Result<DebtorSet, HarnessError> {
    DebtorSet::parse_with_n(s, n).map_err(|e| HarnessError::Usage(e.to_string()))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn emit<T: Serialize>(output: Output, value: &T, csv_rows: impl FnOnce(&mut csv::Writer<std::io::StdoutLock>) -> csv::Result<()>) -> Result<(), HarnessError> {
    match output {
        Output::Json => {
            let text = serde_json::to_string_pretty(value).expect("outputs serialize");
            println!("{text}");
        }
        Output::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            csv_rows(&mut w)?;
            w.flush().map_err(io_err(Path::new("<stdout>")))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Validated<'a> {
    valid: bool,
    n: usize,
    horizon: f64,
    systemic: String,
    model_hash: String,
    config_id: &'a str,
}

#[derive(Serialize)]
struct OracleOut {
    kind: String,
    target: String,
    t: f64,
    value: f64,
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    let pool = thread_pool(cli.threads)?;
    let opts = SolverOptions::with_tol(cli.tol);
    let output = cli.output;
    let started = Instant::now();
    let ok = pool.install(|| -> Result<bool, HarnessError> {
        match cli.command {
            Command::Validate { config } => {
                let LoadedConfig { model, config_id } = match load_config(&config) {
                    Ok(c) => c,
                    Err(ConfigError::Invalid(v)) => {
                        eprintln!("{}: invalid model", config.display());
                        for violation in &v.violations {
                            eprintln!("  {violation}");
                        }
                        return Ok(false);
                    }
                    Err(e) => return Err(e.into()),
                };
                let out = Validated {
                    valid: true,
                    n: model.n(),
                    horizon: model.horizon(),
                    systemic: model.systemic().to_string(),
                    model_hash: model_hash(&model),
                    config_id: &config_id,
                };
                emit(output, &out, |w| {
                    w.write_record(["valid", "n", "horizon", "systemic", "model_hash", "config_id"])?;
                    w.write_record([
                        "true".to_string(),
                        out.n.to_string(),
                        out.horizon.to_string(),
                        out.systemic.clone(),
                        out.model_hash.clone(),
                        config_id.clone(),
                    ])
                })?;
                Ok(true)
            }
            Command::Simulate {
                config,
                law,
                contagious,
                paths,
                seed,
                t,
                dump_paths,
            } => {
                let model = load_config(&config)?.model;
                let c = parse_set(&contagious, model.n())?;
                let (summary, all) = simulate(&model, law, c, paths, seed, t);
                if let Some(out) = dump_paths {
                    let file = std::fs::File::create(&out).map_err(io_err(&out))?;
                    let mut w = std::io::BufWriter::new(file);
                    write_paths_csv(&mut w, all.iter().enumerate().map(|(i, p)| (i as u64, p)))?;
                    w.flush().map_err(io_err(&out))?;
                }
                emit(output, &summary, |w| {
                    w.write_record(["debtor", "quantity", "mean", "std_error"])?;
                    for d in &summary.debtors {
                        for (name, e) in [
                            ("survival", d.survival),
                            ("a_default", d.a_default),
                            ("b_default", d.b_default),
                            ("no_t_event", d.no_t_event),
                        ] {
                            w.write_record([
                                d.debtor.to_string(),
                                name.to_string(),
                                e.mean.to_string(),
                                e.std_error.to_string(),
                            ])?;
                        }
                    }
                    Ok(())
                })?;
                Ok(true)
            }
            Command::Solve {
                config,
                target,
                t,
                paths,
                seed,
                dump_ladder,
            } => {
                let model = load_config(&config)?.model;
                let target = parse_set(&target, model.n())?;
                let (summary, dump) = solve(&model, target, t, paths, seed, &opts, dump_ladder.is_some())?;
                if let (Some(out), Some(dump)) = (dump_ladder, dump) {
                    let text = serde_json::to_string_pretty(&dump).expect("dumps serialize");
                    std::fs::write(&out, text + "\n").map_err(io_err(&out))?;
                }
                emit(output, &summary, |w| {
                    w.write_record(["target", "t", "equations", "mean", "std_error", "n_paths"])?;
                    w.write_record([
                        summary.target.clone(),
                        summary.t.to_string(),
                        summary.equations.to_string(),
                        summary.estimate.mean.to_string(),
                        summary.estimate.std_error.to_string(),
                        summary.estimate.n_paths.to_string(),
                    ])
                })?;
                Ok(true)
            }
            Command::Oracle {
                config,
                kind,
                target,
                t,
            } => {
                let model = load_config(&config)?.model;
                let target = parse_set(&target, model.n())?;
                let value = oracle_value(&model, kind, target, t)?;
                let out = OracleOut {
                    kind: format!("{kind:?}").to_lowercase(),
                    target: target.to_string(),
                    t,
                    value,
                };
                emit(output, &out, |w| {
                    w.write_record(["kind", "target", "t", "value"])?;
                    w.write_record([out.kind.clone(), out.target.clone(), t.to_string(), value.to_string()])
                })?;
                Ok(true)
            }
            Command::Compare {
                config,
                suite,
                t,
                paths,
                seed,
                sigma,
                report_dir,
            } => {
                let loaded = load_config(&config)?;
                let mut exp = Experiment::new(suite, t, paths, seed);
                exp.solver = opts;
                exp.sigma = sigma;
                let report = run_experiment(&loaded, &exp)?;
                if let Some(dir) = report_dir {
                    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
                    let file = dir.join(format!("{suite}-seed{seed}.json"));
                    std::fs::write(&file, report.to_json()).map_err(io_err(&file))?;
                }
                match output {
                    Output::Json => print!("{}", report.to_json()),
                    Output::Csv => report.write_csv(std::io::stdout().lock())?,
                }
                eprintln!("{}: {}/{} comparisons passed", suite, report.passed(), report.rows.len());
                Ok(report.pass)
            }
            Command::Report { dir } => {
                let summaries = summarize_dir(&dir)?;
                if summaries.is_empty() {
                    return Err(HarnessError::Usage(format!("no JSON reports in {}", dir.display())));
                }
                emit(output, &summaries, |w| {
                    for s in &summaries {
                        w.serialize(s)?;
                    }
                    Ok(())
                })?;
                Ok(summaries.iter().all(|s| s.pass))
            }
        }
    })?;
    eprintln!("elapsed {:.3}s", started.elapsed().as_secs_f64());
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
