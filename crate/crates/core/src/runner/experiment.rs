//! The Sense-Decide-Act loop and experiment orchestration: one trace per
//! (policy, seed), a structured summary per experiment, independent runs in
//! parallel.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::factory::build_policy;
use super::RunnerError;
use crate::analysis::{self, CycleRecord, RunTrace, TraceWriter};
use crate::policy::{initial_plan, Policy, PolicyContext};
use crate::simenv::{make_scenario, Scenario};

/// Drive one policy through `cycles` steps of the scenario. Each cycle
/// observes the environment under the current plan (Sense), asks the policy
/// (Decide, the only part timed), then adopts the returned plan (Act).
/// Records land in the returned trace and, when given, stream through
/// `sink` so partial runs persist.
pub fn run_single(
    scenario: &Scenario,
    policy: &mut dyn Policy,
    cycles: u64,
    record_timing: bool,
    mut sink: Option<&mut TraceWriter>,
) -> Result<RunTrace, RunnerError> {
    let cfg = &scenario.cfg;
    cfg.validate()?;
    scenario.env.validate()?;
    let mut plan = initial_plan(&policy.effective_config(cfg))?;
    let mut records = Vec::with_capacity(cycles.min(1 << 20) as usize);
    for t in 0..cycles {
        let Some(observations) = scenario.env.step(&plan, t) else {
            break;
        };
        let started = record_timing.then(Instant::now);
        let decision = policy.decide(&PolicyContext {
            cycle: t,
            cfg,
            current_plan: &plan,
            observations: &observations,
        });
        let duration_us = started.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e6);
        let rec = CycleRecord {
            cycle: t,
            plan: plan.clone(),
            utility: analysis::total_hits(&observations),
            observations,
            duration_us,
            global_scan: decision.meta.global_scan,
            touched: decision.meta.touched,
        };
        if let Some(w) = sink.as_deref_mut() {
            w.append(&rec)?;
        }
        records.push(rec);
        plan = decision.plan;
    }
    Ok(RunTrace { records })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub policy: String,
    pub seed: u64,
    pub cycles: usize,
    pub mean_utility: f64,
    pub scan_fraction: f64,
    pub mean_touched: f64,
    pub p95_touched: f64,
    pub mean_duration_us: f64,
    pub trace_file: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub scenario: String,
    pub cycles: u64,
    pub runs: Vec<RunSummary>,
}

fn trace_file_name(scenario: &str, policy: &str, seed: u64) -> String {
    format!("{scenario}__{policy}__seed{seed}.csv")
}

/// Run every (policy, seed) combination, persist one trace file each plus a
/// `summary.json`, and return the summary. Runs execute in parallel; the
/// summary is ordered by (policy index, seed) regardless.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentSummary, RunnerError> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;

    // Resolve the horizon once so every run sees the same cycle count.
    let probe = {
        let mut p = cfg.scenario_params;
        p.seed = cfg.seeds[0];
        p.cycles = cfg.cycles.or(p.cycles);
        make_scenario(&cfg.scenario, &p)?
    };
    let cycles = cfg.cycles.unwrap_or(probe.default_cycles);

    let jobs: Vec<(usize, u64)> = (0..cfg.policies.len())
        .flat_map(|pi| cfg.seeds.iter().map(move |&s| (pi, s)))
        .collect();

    let mut runs: Vec<(usize, u64, RunSummary)> = jobs
        .par_iter()
        .map(|&(pi, seed)| -> Result<(usize, u64, RunSummary), RunnerError> {
            let mut sp = cfg.scenario_params;
            sp.seed = seed;
            sp.cycles = Some(cycles.max(sp.cycles.unwrap_or(0)));
            let scenario = make_scenario(&cfg.scenario, &sp)?;
            let spec = &cfg.policies[pi];
            let mut policy = build_policy(spec, &scenario.cfg)?;

            let file = trace_file_name(&scenario.name, policy.name(), seed);
            let path = out_dir.join(&file);
            let mut writer = TraceWriter::create(&path, scenario.cfg.tenant_count())?;
            let trace = run_single(
                &scenario,
                policy.as_mut(),
                cycles,
                cfg.record_timing,
                Some(&mut writer),
            )?;
            writer.finish()?;

            let cost = analysis::amortized_cost(&trace);
            let utilities = trace.utilities();
            Ok((
                pi,
                seed,
                RunSummary {
                    policy: policy.name().to_string(),
                    seed,
                    cycles: trace.records.len(),
                    mean_utility: crate::stats::mean(&utilities),
                    scan_fraction: cost.scan_fraction,
                    mean_touched: cost.mean_touched,
                    p95_touched: cost.p95_touched,
                    mean_duration_us: cost.mean_duration_us,
                    trace_file: file,
                },
            ))
        })
        .collect::<Result<_, _>>()?;
    runs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let summary = ExperimentSummary {
        scenario: cfg.scenario.clone(),
        cycles,
        runs: runs.into_iter().map(|(_, _, r)| r).collect(),
    };
    let json = serde_json::to_string_pretty(&summary)?;
    fs::write(out_dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

/// Convenience for suites and tests: build scenario + policy, run without
/// persistence.
pub fn run_in_memory(
    scenario_name: &str,
    params: &crate::simenv::ScenarioParams,
    kind: &str,
    policy_params: serde_json::Value,
    cycles: Option<u64>,
) -> Result<(Scenario, RunTrace), RunnerError> {
    let scenario = make_scenario(scenario_name, params)?;
    let cycles = cycles.unwrap_or(scenario.default_cycles);
    let mut policy = build_policy(
        &super::config::PolicySpec {
            kind: kind.into(),
            params: policy_params,
        },
        &scenario.cfg,
    )?;
    let trace = run_single(&scenario, policy.as_mut(), cycles, false, None)?;
    Ok((scenario, trace))
}
