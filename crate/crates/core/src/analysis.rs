//! Post-run analytics over persisted traces: regret against hindsight
//! optima, log-log growth slopes, allocation jitter, throughput stability,
//! adaptation lag, and amortized decision cost. Everything here is a pure
//! function of a [`RunTrace`]; re-running analysis never re-runs simulation.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write as IoWrite};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{AllocationPlan, TenantObservation};
use crate::simenv::EnvironmentModel;
use crate::stats::{self, LinearFit};

/// First line of every trace file. Readers refuse anything else.
pub const TRACE_SCHEMA: &str = "# aura-trace v1";

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("trace schema mismatch: expected {TRACE_SCHEMA:?}, found {found:?}")]
    SchemaMismatch { found: String },
    #[error("malformed trace: {0}")]
    BadTrace(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("trace csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One Sense-Decide-Act cycle as persisted: the plan in force, what each
/// tenant observed under it, the realized utility, and decision metadata.
/// `duration_us` is zero unless the run recorded timing.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: u64,
    pub plan: AllocationPlan,
    pub observations: Vec<TenantObservation>,
    pub utility: f64,
    pub duration_us: f64,
    pub global_scan: bool,
    pub touched: u32,
}

/// Cycle records in execution order: strictly consecutive cycles, one
/// record per cycle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<CycleRecord>,
}

impl RunTrace {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        for (i, r) in self.records.iter().enumerate() {
            if r.cycle != self.records[0].cycle + i as u64 {
                return Err(AnalysisError::BadTrace(format!(
                    "cycle {} at index {i} breaks consecutive ordering",
                    r.cycle
                )));
            }
            if r.plan.pages.len() != r.observations.len() {
                return Err(AnalysisError::BadTrace(format!(
                    "cycle {}: plan width {} vs {} observations",
                    r.cycle,
                    r.plan.pages.len(),
                    r.observations.len()
                )));
            }
        }
        Ok(())
    }

    pub fn utilities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.utility).collect()
    }
}

/// Bound constants quoted alongside results. Reporting only: no policy
/// reads these.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TheoryParams {
    /// Gradient-norm bound.
    pub g: f64,
    /// Feasible-set diameter.
    pub d: f64,
    /// Lipschitz constant of the hit-rate curves.
    pub l: f64,
    /// Rounding loss per cycle.
    pub delta: f64,
    /// Approximate-concavity factor.
    pub alpha_cc: f64,
}

/// Realized throughput proxy for one cycle: total hits across tenants.
pub fn total_hits(observations: &[TenantObservation]) -> f64 {
    observations.iter().map(|o| o.hits).sum()
}

/// Utility a fixed plan would earn at `cycle` on the noise-free model:
/// scheduled demand times the true hit-rate curve, summed over tenants.
pub fn ground_truth_utility(
    env: &EnvironmentModel,
    cycle: u64,
    plan: &AllocationPlan,
) -> Option<f64> {
    let mut total = 0.0;
    for (i, &pages) in plan.pages.iter().enumerate() {
        total += env.schedule.scheduled_ops(cycle, i)? * env.true_hit_rate(i, pages);
    }
    Some(total)
}

/// Cumulative regret of the traced plans against a fixed comparator plan,
/// both valued on ground-truth curves and scheduled demand. Non-decreasing
/// whenever the comparator is per-cycle optimal.
pub fn regret_series(
    trace: &RunTrace,
    comparator: &AllocationPlan,
    env: &EnvironmentModel,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(trace.records.len());
    let mut acc = 0.0;
    for r in &trace.records {
        let best = ground_truth_utility(env, r.cycle, comparator).unwrap_or(0.0);
        let got = ground_truth_utility(env, r.cycle, &r.plan).unwrap_or(0.0);
        acc += best - got;
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub fit: LinearFit,
    /// Points actually regressed after any shrinking.
    pub used: usize,
    /// True when non-positive values forced a smaller window.
    pub shrunk: bool,
}

/// Cycle indices spaced evenly in log time from `t_min` to the series end,
/// deduplicated. Sampling this way weights every decade of the run equally
/// instead of letting the dense tail outvote the early curve.
fn log_spaced_indices(n: usize, t_min: usize, points: usize) -> Vec<usize> {
    let t0 = t_min.max(1).min(n);
    if points < 2 || n < 2 {
        return Vec::new();
    }
    let ratio = (n as f64 / t0 as f64).powf(1.0 / (points - 1) as f64);
    let mut idx: Vec<usize> = (0..points)
        .map(|j| ((t0 as f64 * ratio.powi(j as i32)).round() as usize).clamp(t0, n) - 1)
        .collect();
    idx.dedup();
    idx
}

/// Least-squares slope of log(series) vs log(cycle), sampled log-evenly at
/// `points` cycles from `t_min` onward: the standard way to read a power-law
/// exponent off a log-log plot. Non-positive samples cannot be logged and
/// are dropped; `shrunk` reports that.
pub fn loglog_slope(series: &[f64], t_min: usize, points: usize) -> Option<SlopeFit> {
    let idx = log_spaced_indices(series.len(), t_min, points);
    let mut xs = Vec::with_capacity(idx.len());
    let mut ys = Vec::with_capacity(idx.len());
    let mut shrunk = false;
    for &i in &idx {
        if series[i] > 0.0 {
            xs.push(((i + 1) as f64).ln());
            ys.push(series[i].ln());
        } else {
            shrunk = true;
        }
    }
    let fit = stats::linear_fit(&xs, &ys)?;
    Some(SlopeFit {
        fit,
        used: xs.len(),
        shrunk,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JitterSeries {
    /// L1 plan movement per cycle, one entry per consecutive pair.
    pub deltas: Vec<f64>,
    /// Running sum of `deltas`.
    pub cumulative: Vec<f64>,
    /// Standard deviation of the deltas over the final half of the run.
    pub sigma_delta: f64,
}

pub fn jitter_series(trace: &RunTrace) -> JitterSeries {
    let mut deltas = Vec::new();
    for pair in trace.records.windows(2) {
        deltas.push(pair[0].plan.l1_distance(&pair[1].plan) as f64);
    }
    let mut cumulative = Vec::with_capacity(deltas.len());
    let mut acc = 0.0;
    for &d in &deltas {
        acc += d;
        cumulative.push(acc);
    }
    let steady = &deltas[deltas.len() / 2..];
    JitterSeries {
        sigma_delta: stats::std_dev(steady),
        deltas,
        cumulative,
    }
}

/// Fit deltas against 1/t after `warmup` cycles, skipping exact zeros
/// (gate-held cycles carry no movement-scale information). A strong fit
/// means per-cycle movement decays like c/t.
pub fn fit_inverse_t(deltas: &[f64], warmup: usize) -> Option<LinearFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &d) in deltas.iter().enumerate().skip(warmup) {
        if d > 0.0 {
            xs.push(1.0 / (i + 1) as f64);
            ys.push(d);
        }
    }
    stats::linear_fit(&xs, &ys)
}

/// Fit cumulative variation against ln(t), sampled log-evenly from `t_min`
/// onward. A strong fit means total movement grows logarithmically in
/// horizon.
pub fn fit_log_t(cumulative: &[f64], t_min: usize, points: usize) -> Option<LinearFit> {
    let idx = log_spaced_indices(cumulative.len(), t_min, points);
    let xs: Vec<f64> = idx.iter().map(|&i| ((i + 1) as f64).ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| cumulative[i]).collect();
    stats::linear_fit(&xs, &ys)
}

/// Mean sliding-window standard deviation of utility, one value per phase.
/// Phases are (start, end) cycle ranges; an empty list treats the whole
/// trace as one phase. Windows longer than a phase collapse to the phase.
pub fn stability_sigma_tps(trace: &RunTrace, window: usize, phases: &[(u64, u64)]) -> Vec<f64> {
    assert!(window >= 2);
    let u = trace.utilities();
    if u.is_empty() {
        return Vec::new();
    }
    let base = trace.records[0].cycle;
    let whole = [(base, base + u.len() as u64)];
    let phases = if phases.is_empty() { &whole } else { phases };
    phases
        .iter()
        .filter_map(|&(start, end)| {
            let lo = start.saturating_sub(base) as usize;
            let hi = (end.saturating_sub(base) as usize).min(u.len());
            if lo >= hi {
                return None;
            }
            let slice = &u[lo..hi];
            let w = window.min(slice.len());
            let sigmas: Vec<f64> = slice.windows(w).map(stats::std_dev).collect();
            Some(stats::mean(&sigmas))
        })
        .collect()
}

/// Cycles after `boundary` until utility first reaches `threshold *
/// oracle_utility`, requiring it to hold for `sustain` consecutive cycles
/// (1 = plain first crossing). Never reaching it reports the remaining run
/// length, i.e. a censored lag.
pub fn adaptation_lag(
    trace: &RunTrace,
    boundary: u64,
    oracle_utility: f64,
    threshold: f64,
    sustain: usize,
) -> u64 {
    assert!(sustain >= 1);
    let base = trace.records[0].cycle;
    let start = boundary.saturating_sub(base) as usize;
    let u = trace.utilities();
    if start >= u.len() {
        return 0;
    }
    let bar = threshold * oracle_utility;
    let tail = &u[start..];
    let mut run = 0usize;
    for (i, &v) in tail.iter().enumerate() {
        if v >= bar {
            run += 1;
            if run >= sustain {
                return (i + 1 - run) as u64;
            }
        } else {
            run = 0;
        }
    }
    tail.len() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostSummary {
    pub cycles: usize,
    pub scan_fraction: f64,
    pub mean_touched: f64,
    pub p95_touched: f64,
    /// (touched count, cycles at that count), ascending by count.
    pub touched_histogram: Vec<(u32, usize)>,
    /// Zero when the run did not record timing.
    pub mean_duration_us: f64,
    pub p95_duration_us: f64,
}

/// Amortized decision cost on algorithmic counts: how often the policy
/// rescanned everything and how many tenants each decision evaluated.
/// Wall-clock columns are secondary evidence and may be all zero.
pub fn amortized_cost(trace: &RunTrace) -> CostSummary {
    let n = trace.records.len();
    if n == 0 {
        return CostSummary {
            cycles: 0,
            scan_fraction: 0.0,
            mean_touched: 0.0,
            p95_touched: 0.0,
            touched_histogram: Vec::new(),
            mean_duration_us: 0.0,
            p95_duration_us: 0.0,
        };
    }
    let scans = trace.records.iter().filter(|r| r.global_scan).count();
    let touched: Vec<f64> = trace.records.iter().map(|r| r.touched as f64).collect();
    let durations: Vec<f64> = trace.records.iter().map(|r| r.duration_us).collect();

    let mut hist: Vec<(u32, usize)> = Vec::new();
    let mut counts = std::collections::BTreeMap::new();
    for r in &trace.records {
        *counts.entry(r.touched).or_insert(0usize) += 1;
    }
    hist.extend(counts);

    CostSummary {
        cycles: n,
        scan_fraction: if n == 0 { 0.0 } else { scans as f64 / n as f64 },
        mean_touched: stats::mean(&touched),
        p95_touched: stats::percentile_linear(&touched, 0.95),
        touched_histogram: hist,
        mean_duration_us: stats::mean(&durations),
        p95_duration_us: stats::percentile_linear(&durations, 0.95),
    }
}

/// Streaming trace writer: schema line and a header sized to the tenant
/// count up front, one row appended per cycle, flushed in small batches so
/// an interrupted run still leaves a readable prefix. Floats use the
/// shortest round-tripping form, so write→read→write is byte-stable.
pub struct TraceWriter {
    w: csv::Writer<File>,
    since_flush: usize,
}

impl TraceWriter {
    pub fn create(path: &Path, tenant_count: usize) -> Result<Self, AnalysisError> {
        let mut file = File::create(path)?;
        writeln!(file, "{TRACE_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(file);
        let mut header = vec![
            "cycle".to_string(),
            "global_scan".to_string(),
            "touched".to_string(),
            "duration_us".to_string(),
            "utility".to_string(),
        ];
        for i in 0..tenant_count {
            header.push(format!("pages_{i}"));
            header.push(format!("ops_{i}"));
            header.push(format!("hr_{i}"));
        }
        w.write_record(&header)?;
        Ok(TraceWriter { w, since_flush: 0 })
    }

    pub fn append(&mut self, r: &CycleRecord) -> Result<(), AnalysisError> {
        let mut row = vec![
            r.cycle.to_string(),
            u8::from(r.global_scan).to_string(),
            r.touched.to_string(),
            r.duration_us.to_string(),
            r.utility.to_string(),
        ];
        for (pages, obs) in r.plan.pages.iter().zip(&r.observations) {
            row.push(pages.to_string());
            row.push(obs.ops.to_string());
            row.push(obs.hit_rate.to_string());
        }
        self.w.write_record(&row)?;
        self.since_flush += 1;
        if self.since_flush >= 64 {
            self.w.flush()?;
            self.since_flush = 0;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), AnalysisError> {
        self.w.flush()?;
        Ok(())
    }
}

pub fn write_trace(path: &Path, trace: &RunTrace) -> Result<(), AnalysisError> {
    let k = trace.records.first().map_or(0, |r| r.plan.pages.len());
    let mut w = TraceWriter::create(path, k)?;
    for r in &trace.records {
        w.append(r)?;
    }
    w.finish()
}

pub fn read_trace(path: &Path) -> Result<RunTrace, AnalysisError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut schema = String::new();
    reader.read_line(&mut schema)?;
    if schema.trim_end() != TRACE_SCHEMA {
        return Err(AnalysisError::SchemaMismatch {
            found: schema.trim_end().to_string(),
        });
    }
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers()?.clone();
    if header.len() < 5 || (header.len() - 5) % 3 != 0 {
        return Err(AnalysisError::BadTrace(format!(
            "unexpected column count {}",
            header.len()
        )));
    }
    let k = (header.len() - 5) / 3;

    let parse = |field: &str, what: &str| -> Result<f64, AnalysisError> {
        field
            .parse()
            .map_err(|_| AnalysisError::BadTrace(format!("bad {what} value {field:?}")))
    };
    let mut records = Vec::new();
    for row in csv.records() {
        let row = row?;
        if row.len() != header.len() {
            return Err(AnalysisError::BadTrace(format!(
                "row width {} vs header {}",
                row.len(),
                header.len()
            )));
        }
        let mut pages = Vec::with_capacity(k);
        let mut observations = Vec::with_capacity(k);
        for i in 0..k {
            let p: i64 = row[5 + 3 * i]
                .parse()
                .map_err(|_| AnalysisError::BadTrace(format!("bad pages value {:?}", &row[5 + 3 * i])))?;
            let ops = parse(&row[6 + 3 * i], "ops")?;
            let hr = parse(&row[7 + 3 * i], "hit rate")?;
            let hits = ops * hr;
            pages.push(p);
            observations.push(TenantObservation {
                ops,
                hits,
                misses: ops - hits,
                hit_rate: hr,
                current_pages: p,
            });
        }
        records.push(CycleRecord {
            cycle: row[0]
                .parse()
                .map_err(|_| AnalysisError::BadTrace(format!("bad cycle value {:?}", &row[0])))?,
            global_scan: &row[1] == "1",
            touched: row[2]
                .parse()
                .map_err(|_| AnalysisError::BadTrace(format!("bad touched value {:?}", &row[2])))?,
            duration_us: parse(&row[3], "duration")?,
            utility: parse(&row[4], "utility")?,
            plan: AllocationPlan { pages },
            observations,
        });
    }
    let trace = RunTrace { records };
    trace.validate()?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simenv::{HitRateCurve, NoiseModel, Phase, WorkloadSchedule};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn obs_for(env: &EnvironmentModel, plan: &AllocationPlan, cycle: u64) -> Vec<TenantObservation> {
        env.step(plan, cycle).unwrap()
    }

    fn record(cycle: u64, pages: Vec<i64>, utility: f64, scan: bool, touched: u32) -> CycleRecord {
        let observations = pages
            .iter()
            .map(|&p| TenantObservation {
                ops: 10.0,
                hits: 5.0,
                misses: 5.0,
                hit_rate: 0.5,
                current_pages: p,
            })
            .collect();
        CycleRecord {
            cycle,
            plan: AllocationPlan { pages },
            observations,
            utility,
            duration_us: 0.0,
            global_scan: scan,
            touched,
        }
    }

    fn stationary_env() -> EnvironmentModel {
        EnvironmentModel {
            curves: vec![
                HitRateCurve::ExpSaturating { h_max: 0.9, scale: 30.0 },
                HitRateCurve::ExpSaturating { h_max: 0.2, scale: 60.0 },
            ],
            schedule: WorkloadSchedule {
                base_ops: vec![120.0, 60.0],
                phases: vec![Phase {
                    duration_cycles: 400,
                    multipliers: vec![1.0, 1.0],
                }],
            },
            noise: NoiseModel::noiseless(11),
            hit_latency_ms: 0.1,
            miss_latency_ms: 50.0,
        }
    }

    #[test]
    fn regret_is_zero_when_plans_match_the_comparator() {
        let env = stationary_env();
        let comparator = AllocationPlan { pages: vec![140, 60] };
        let records: Vec<CycleRecord> = (0..50)
            .map(|t| {
                let obs = obs_for(&env, &comparator, t);
                CycleRecord {
                    cycle: t,
                    plan: comparator.clone(),
                    utility: total_hits(&obs),
                    observations: obs,
                    duration_us: 0.0,
                    global_scan: false,
                    touched: 0,
                }
            })
            .collect();
        let trace = RunTrace { records };
        let reg = regret_series(&trace, &comparator, &env);
        assert!(reg.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn static_gap_makes_regret_exactly_linear() {
        let env = stationary_env();
        let good = AllocationPlan { pages: vec![124, 76] };
        let even = AllocationPlan { pages: vec![100, 100] };
        let records: Vec<CycleRecord> = (0..100)
            .map(|t| {
                let obs = obs_for(&env, &even, t);
                CycleRecord {
                    cycle: t,
                    plan: even.clone(),
                    utility: total_hits(&obs),
                    observations: obs,
                    duration_us: 0.0,
                    global_scan: false,
                    touched: 0,
                }
            })
            .collect();
        let trace = RunTrace { records };
        let reg = regret_series(&trace, &good, &env);
        let gap = ground_truth_utility(&env, 0, &good).unwrap()
            - ground_truth_utility(&env, 0, &even).unwrap();
        assert!(gap > 0.0);
        for (t, &r) in reg.iter().enumerate() {
            assert_relative_eq!(r, gap * (t + 1) as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn loglog_recovers_known_power_laws() {
        let linear: Vec<f64> = (1..=600).map(|t| 3.0 * t as f64).collect();
        let s = loglog_slope(&linear, 10, 24).unwrap();
        assert_relative_eq!(s.fit.slope, 1.0, epsilon = 1e-9);
        assert!(!s.shrunk);

        let sqrt: Vec<f64> = (1..=600).map(|t| 3.0 * (t as f64).sqrt()).collect();
        let s = loglog_slope(&sqrt, 10, 24).unwrap();
        assert_relative_eq!(s.fit.slope, 0.5, epsilon = 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noisy: Vec<f64> = (1..=2000)
            .map(|t| 3.0 * (t as f64).sqrt() * (1.0 + 0.05 * rng.random_range(-1.0..1.0)))
            .collect();
        let s = loglog_slope(&noisy, 10, 24).unwrap();
        assert!(
            (0.45..=0.55).contains(&s.fit.slope),
            "slope {} out of band",
            s.fit.slope
        );
    }

    #[test]
    fn loglog_weights_the_transient_not_just_the_tail() {
        // Saturating transient plus a slow linear tail, the shape of
        // cumulative regret for a policy that converges and then pays a
        // small steady rent. A dense fit would let the tail outvote the
        // transient and read nearly 1; sampling by decade sees the
        // crossover.
        let series: Vec<f64> = (1..=5000)
            .map(|t| 2400.0 * (1.0 - (-(t as f64) / 100.0).exp()) + 2.0 * t as f64)
            .collect();
        let s = loglog_slope(&series, 20, 24).unwrap();
        assert!(
            (0.40..=0.75).contains(&s.fit.slope),
            "slope {} should reflect the crossover",
            s.fit.slope
        );
    }

    #[test]
    fn loglog_drops_non_positive_samples() {
        let mut series = vec![0.0; 30];
        series.extend((1..=70).map(|t| (t as f64).sqrt()));
        let s = loglog_slope(&series, 5, 20).unwrap();
        assert!(s.shrunk);
        assert!(s.used >= 5 && s.used < 20, "used {}", s.used);
        assert!(s.fit.slope > 0.3);
    }

    #[test]
    fn jitter_of_a_static_run_is_zero() {
        let records: Vec<CycleRecord> =
            (0..20).map(|t| record(t, vec![64, 64], 1.0, false, 0)).collect();
        let j = jitter_series(&RunTrace { records });
        assert!(j.deltas.iter().all(|&d| d == 0.0));
        assert_eq!(j.sigma_delta, 0.0);
        assert_eq!(*j.cumulative.last().unwrap(), 0.0);
    }

    #[test]
    fn alternating_plans_give_constant_jitter() {
        let a = vec![90i64, 10];
        let b = vec![10i64, 90];
        let records: Vec<CycleRecord> = (0..40)
            .map(|t| {
                let p = if t % 2 == 0 { a.clone() } else { b.clone() };
                record(t, p, 1.0, false, 0)
            })
            .collect();
        let j = jitter_series(&RunTrace { records });
        assert!(j.deltas.iter().all(|&d| d == 160.0));
        assert_eq!(j.sigma_delta, 0.0);
        assert_relative_eq!(*j.cumulative.last().unwrap(), 160.0 * 39.0);
    }

    #[test]
    fn decay_fits_recover_synthetic_laws() {
        let deltas: Vec<f64> = (1..=500).map(|t| 7.0 / t as f64).collect();
        let fit = fit_inverse_t(&deltas, 10).unwrap();
        assert_relative_eq!(fit.slope, 7.0, epsilon = 1e-9);
        assert!(fit.r2 > 0.999);

        let mut cum = Vec::new();
        let mut acc = 0.0;
        for &d in &deltas {
            acc += d;
            cum.push(acc);
        }
        let fit = fit_log_t(&cum, 20, 32).unwrap();
        assert_relative_eq!(fit.slope, 7.0, epsilon = 0.05);
        assert!(fit.r2 > 0.999);
    }

    #[test]
    fn sine_utility_sigma_approaches_amplitude_over_sqrt2() {
        let amp = 12.0;
        let period = 20.0;
        let records: Vec<CycleRecord> = (0..1000)
            .map(|t| {
                let u = 100.0 + amp * (2.0 * std::f64::consts::PI * t as f64 / period).sin();
                record(t, vec![64, 64], u, false, 0)
            })
            .collect();
        let sigma = stability_sigma_tps(&RunTrace { records }, 200, &[]);
        assert_eq!(sigma.len(), 1);
        assert_relative_eq!(sigma[0], amp / 2.0f64.sqrt(), max_relative = 0.02);
    }

    #[test]
    fn constant_utility_has_zero_sigma_per_phase() {
        let records: Vec<CycleRecord> =
            (0..100).map(|t| record(t, vec![8], 42.0, false, 0)).collect();
        let sigma = stability_sigma_tps(&RunTrace { records }, 10, &[(0, 50), (50, 100)]);
        assert_eq!(sigma, vec![0.0, 0.0]);
    }

    #[test]
    fn adaptation_lag_counts_cycles_to_sustained_recovery() {
        // Utility ramps 0,10,20,... after the boundary at cycle 100.
        let records: Vec<CycleRecord> = (0..200)
            .map(|t| {
                let u = if t < 100 { 95.0 } else { ((t - 100) * 10) as f64 };
                record(t, vec![8], u, false, 0)
            })
            .collect();
        let trace = RunTrace { records };
        // 0.95 * 100 = 95 reached at cycle 110, i.e. lag 10.
        assert_eq!(adaptation_lag(&trace, 100, 100.0, 0.95, 1), 10);
        // A sustained requirement does not move a monotone crossing.
        assert_eq!(adaptation_lag(&trace, 100, 100.0, 0.95, 5), 10);
        // Unreachable bar: censored at remaining run length.
        assert_eq!(adaptation_lag(&trace, 100, 1e9, 0.95, 1), 100);
    }

    #[test]
    fn adaptation_lag_ignores_single_cycle_spikes() {
        let mut u = vec![10.0; 50];
        u[5] = 99.0;
        for v in u.iter_mut().skip(20) {
            *v = 99.0;
        }
        let records: Vec<CycleRecord> = u
            .iter()
            .enumerate()
            .map(|(t, &v)| record(t as u64, vec![8], v, false, 0))
            .collect();
        let trace = RunTrace { records };
        assert_eq!(adaptation_lag(&trace, 0, 100.0, 0.95, 1), 5);
        assert_eq!(adaptation_lag(&trace, 0, 100.0, 0.95, 3), 20);
    }

    #[test]
    fn amortized_cost_reports_counts() {
        let records: Vec<CycleRecord> = (0..100)
            .map(|t| {
                let scan = t % 10 == 0;
                let touched = if scan { 40 } else { 8 };
                record(t, vec![8], 1.0, scan, touched)
            })
            .collect();
        let c = amortized_cost(&RunTrace { records });
        assert_relative_eq!(c.scan_fraction, 0.1);
        assert_relative_eq!(c.mean_touched, 0.1 * 40.0 + 0.9 * 8.0);
        assert_eq!(c.touched_histogram, vec![(8, 90), (40, 10)]);
        assert_eq!(c.cycles, 100);
    }

    #[test]
    fn traces_round_trip_and_rewrites_are_byte_identical() {
        let env = stationary_env();
        let plan = AllocationPlan { pages: vec![120, 80] };
        let records: Vec<CycleRecord> = (0..25)
            .map(|t| {
                let obs = obs_for(&env, &plan, t);
                CycleRecord {
                    cycle: t,
                    plan: plan.clone(),
                    utility: total_hits(&obs),
                    observations: obs,
                    duration_us: 0.0,
                    global_scan: t == 0,
                    touched: 2,
                }
            })
            .collect();
        let trace = RunTrace { records };

        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_trace(&p1, &trace).unwrap();
        let back = read_trace(&p1).unwrap();
        assert_eq!(back, trace);
        write_trace(&p2, &back).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap()
        );
    }

    #[test]
    fn reader_refuses_other_schema_versions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("old.csv");
        std::fs::write(&path, "# aura-trace v0\ncycle\n1\n").unwrap();
        match read_trace(&path) {
            Err(AnalysisError::SchemaMismatch { found }) => {
                assert_eq!(found, "# aura-trace v0");
            }
            other => panic!("expected schema mismatch, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_gaps_in_cycles() {
        let mut records: Vec<CycleRecord> =
            (0..5).map(|t| record(t, vec![8], 1.0, false, 0)).collect();
        records[4].cycle = 9;
        let trace = RunTrace { records };
        assert!(matches!(trace.validate(), Err(AnalysisError::BadTrace(_))));
    }
}
