//! Batch experiment runner. Subcommands: `run` an experiment config,
//! `suite` for the acceptance suites, `oracle` for hindsight-optimal plans,
//! `analyze` for trace metrics. Output directory resolution: --out flag,
//! then config, then $AURA_OUT, then ./aura-out.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use aura_core::analysis;
use aura_core::oracle;
use aura_core::runner::{self, ExperimentConfig, SUITE_NAMES};
use aura_core::simenv::{make_scenario, NoiseModel, ScenarioParams, SCENARIO_NAMES};

#[derive(Parser)]
#[command(name = "aura", version, about = "Cache allocation policy simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute an experiment config: one trace per (policy, seed) plus a summary.
    Run {
        /// Experiment config file (JSON; see README for the schema).
        #[arg(long)]
        config: PathBuf,
        /// Replace the config's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides config and $AURA_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one acceptance suite, or `all`.
    Suite {
        /// regret | stability | robustness | adaptation | scalability | oracle | all
        name: String,
        /// Emit the report as JSON instead of one line per criterion.
        #[arg(long)]
        json: bool,
    },
    /// Profile one scenario phase without noise and solve the hindsight MCKP.
    Oracle {
        /// Scenario name (see `--help` for the catalog).
        #[arg(long)]
        scenario: String,
        /// Phase index, 0-based.
        #[arg(long)]
        phase: usize,
        /// Page quantum for the knapsack; defaults to total_pages/64.
        #[arg(long)]
        chunk: Option<i64>,
        /// Grid points per tenant profile.
        #[arg(long, default_value_t = 64)]
        grid_points: usize,
        /// Scenario seed (profiling itself is noiseless).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the profiled curves to this CSV file.
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Compute a metric from a trace CSV and print it as JSON.
    Analyze {
        /// Trace file produced by `run`.
        #[arg(long)]
        trace: PathBuf,
        /// utility | jitter | cost
        #[arg(long)]
        metric: String,
        /// Cycles to discard before fitting jitter decay laws.
        #[arg(long, default_value_t = 0)]
        warmup: usize,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { config, seed, out } => cmd_run(&config, seed, out.as_deref()),
        Cmd::Suite { name, json } => cmd_suite(&name, json),
        Cmd::Oracle {
            scenario,
            phase,
            chunk,
            grid_points,
            seed,
            profiles,
        } => cmd_oracle(&scenario, phase, chunk, grid_points, seed, profiles.as_deref()),
        Cmd::Analyze {
            trace,
            metric,
            warmup,
        } => cmd_analyze(&trace, &metric, warmup),
    }
}

fn cmd_run(config: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    let out_dir = cfg.resolve_out_dir(out);
    let summary = runner::run_experiment(&cfg, &out_dir)?;
    println!(
        "{} run(s) of {} over {} cycles -> {}",
        summary.runs.len(),
        summary.scenario,
        summary.cycles,
        out_dir.display()
    );
    for r in &summary.runs {
        println!(
            "  {} seed {}: mean utility {:.1}, scan fraction {:.3}, mean touched {:.1}",
            r.policy, r.seed, r.mean_utility, r.scan_fraction, r.mean_touched
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_suite(name: &str, as_json: bool) -> Result<ExitCode> {
    let names: Vec<&str> = if name.eq_ignore_ascii_case("all") {
        SUITE_NAMES.to_vec()
    } else {
        vec![name]
    };
    let mut reports = Vec::new();
    for n in names {
        reports.push(runner::run_suite(n)?);
    }
    let all_pass = reports.iter().all(|r| r.passed());
    if as_json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for r in &reports {
            for c in &r.criteria {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                println!("{}/{}: {} - {}", r.suite, c.key, verdict, c.detail);
            }
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_oracle(
    scenario_name: &str,
    phase: usize,
    chunk: Option<i64>,
    grid_points: usize,
    seed: u64,
    profiles: Option<&Path>,
) -> Result<ExitCode> {
    let scenario = make_scenario(
        scenario_name,
        &ScenarioParams {
            seed,
            ..Default::default()
        },
    )
    .with_context(|| format!("known scenarios: {}", SCENARIO_NAMES.join(", ")))?;
    let mut env = scenario.env.clone();
    env.noise = NoiseModel::noiseless(0);

    let grid = oracle::default_grid(&scenario.cfg, grid_points)?;
    let curves = oracle::profile_phase(&env, phase, &grid, &[])?;
    if let Some(path) = profiles {
        oracle::write_profiles_csv(path, &curves)?;
    }
    let chunk = chunk.unwrap_or_else(|| oracle::default_chunk(scenario.cfg.total_pages));
    let inst = oracle::mckp_instance(&curves, &scenario.cfg, chunk)?;
    let (plan, value) = oracle::solve_mckp(&inst)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "scenario": scenario.name,
            "phase": phase,
            "chunk": chunk,
            "plan": plan.pages,
            "expected_utility": value,
        }))?
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(trace_path: &Path, metric: &str, warmup: usize) -> Result<ExitCode> {
    let trace = analysis::read_trace(trace_path)
        .with_context(|| format!("reading {}", trace_path.display()))?;
    let out = match metric {
        "utility" => {
            let u = trace.utilities();
            json!({
                "cycles": u.len(),
                "mean": aura_core::stats::mean(&u),
                "final": u.last().copied().unwrap_or(0.0),
            })
        }
        "jitter" => {
            let jit = analysis::jitter_series(&trace);
            let inv = analysis::fit_inverse_t(&jit.deltas, warmup);
            let log = analysis::fit_log_t(&jit.cumulative, warmup, 32);
            json!({
                "sigma_delta": jit.sigma_delta,
                "total_movement": jit.cumulative.last().copied().unwrap_or(0.0),
                "inverse_t_fit": inv.map(|f| json!({"slope": f.slope, "r2": f.r2})),
                "log_t_fit": log.map(|f| json!({"slope": f.slope, "r2": f.r2})),
            })
        }
        "cost" => serde_json::to_value(analysis::amortized_cost(&trace))?,
        other => bail!("unknown metric `{other}`; choose utility, jitter, or cost"),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}
