//! Hindsight-optimal allocation: profile per-tenant hit-rate curves offline,
//! pose one multiple-choice knapsack per phase (one allocation level chosen
//! per tenant, budget-constrained), and solve it exactly by dynamic
//! programming. Includes brute-force enumerators used as independent
//! references in tests. Nothing here runs online; policies never see it.

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::domain::{AllocationPlan, ConfigError, PoolConfig};
use crate::simenv::EnvironmentModel;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("phase {phase} out of range")]
    PhaseOutOfRange { phase: usize },
    #[error("noisy profiling needs at least 5 seeds, got {got}")]
    InsufficientSeeds { got: usize },
    #[error("instance infeasible: minimum weights exceed the budget")]
    Infeasible,
    #[error("brute force limited to {max_tenants} tenants and budget {max_budget}")]
    LimitsExceeded { max_tenants: usize, max_budget: i64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("profile csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Hit-rate curve measured by offline profiling: hit rate per grid
/// allocation, monotone after isotonic clean-up, plus the phase-average
/// request rate used to weight it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfiledCurve {
    pub grid: Vec<i64>,
    pub hr_at: Vec<f64>,
    pub ops: f64,
}

impl ProfiledCurve {
    /// Linear interpolation between grid points, flat beyond the ends.
    pub fn hr(&self, pages: i64) -> f64 {
        let g = &self.grid;
        if pages <= g[0] {
            return self.hr_at[0];
        }
        if pages >= g[g.len() - 1] {
            return self.hr_at[g.len() - 1];
        }
        let j = g.partition_point(|&p| p <= pages);
        let (x0, y0) = (g[j - 1] as f64, self.hr_at[j - 1]);
        let (x1, y1) = (g[j] as f64, self.hr_at[j]);
        y0 + (y1 - y0) * (pages as f64 - x0) / (x1 - x0)
    }

    /// Utility contribution at an allocation: ops-weighted hit rate.
    pub fn value(&self, pages: i64) -> f64 {
        self.ops * self.hr(pages)
    }
}

/// Pool-adjacent-violators regression onto non-decreasing sequences,
/// minimizing squared error with equal weights.
pub fn isotonic_non_decreasing(ys: &[f64]) -> Vec<f64> {
    let mut level: Vec<f64> = Vec::with_capacity(ys.len());
    let mut weight: Vec<usize> = Vec::with_capacity(ys.len());
    for &y in ys {
        level.push(y);
        weight.push(1);
        while level.len() >= 2 && level[level.len() - 2] > level[level.len() - 1] {
            let (l2, w2) = (level.pop().unwrap(), weight.pop().unwrap());
            let (l1, w1) = (level.pop().unwrap(), weight.pop().unwrap());
            let w = w1 + w2;
            level.push((l1 * w1 as f64 + l2 * w2 as f64) / w as f64);
            weight.push(w);
        }
    }
    let mut out = Vec::with_capacity(ys.len());
    for (l, w) in level.iter().zip(&weight) {
        out.extend(std::iter::repeat_n(*l, *w));
    }
    out
}

/// Evenly spaced profiling grid from the smallest lower bound to the full
/// budget, deduplicated and ascending.
pub fn default_grid(cfg: &PoolConfig, points: usize) -> Result<Vec<i64>, ConfigError> {
    let eff_lb = cfg.effective_lower_bounds()?;
    let lo = eff_lb.iter().copied().min().unwrap_or(0);
    let hi = cfg.total_pages;
    let n = points.max(2);
    let mut grid: Vec<i64> = (0..n)
        .map(|i| lo + ((hi - lo) as f64 * i as f64 / (n - 1) as f64).round() as i64)
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Measure each tenant's steady-state hit rate at every grid allocation over
/// one phase. Noise-free environments are sampled once per grid point (the
/// observation is exact); noisy ones are averaged over the whole phase and
/// at least five seeds, then cleaned up by isotonic regression.
pub fn profile_phase(
    env: &EnvironmentModel,
    phase: usize,
    grid: &[i64],
    seeds: &[u64],
) -> Result<Vec<ProfiledCurve>, OracleError> {
    assert!(!grid.is_empty() && grid.windows(2).all(|w| w[0] < w[1]));
    let bounds = env.schedule.phase_bounds();
    let &(start, end) = bounds
        .get(phase)
        .ok_or(OracleError::PhaseOutOfRange { phase })?;
    let k = env.curves.len();

    let noisy = env.noise.hr_sigma > 0.0 || env.noise.ops_sigma > 0.0;
    let run_seeds: Vec<u64> = if noisy {
        if seeds.len() < 5 {
            return Err(OracleError::InsufficientSeeds { got: seeds.len() });
        }
        seeds.to_vec()
    } else {
        vec![env.noise.seed]
    };

    let mut ops = vec![0.0f64; k];
    for t in start..end {
        for (i, o) in ops.iter_mut().enumerate() {
            *o += env.schedule.scheduled_ops(t, i).expect("cycle within phase");
        }
    }
    let phase_len = (end - start).max(1) as f64;
    for o in &mut ops {
        *o /= phase_len;
    }

    let mut hr_sum = vec![vec![0.0f64; grid.len()]; k];
    let mut samples = 0usize;
    for &seed in &run_seeds {
        let mut e = env.clone();
        e.noise.seed = seed;
        // One cycle suffices without noise; otherwise average the phase.
        let cycles: Vec<u64> = if noisy {
            (start..end).collect()
        } else {
            vec![start]
        };
        for (gi, &pages) in grid.iter().enumerate() {
            let plan = AllocationPlan {
                pages: vec![pages; k],
            };
            for &t in &cycles {
                let obs = e.step(&plan, t).expect("cycle within schedule");
                for (i, o) in obs.iter().enumerate() {
                    hr_sum[i][gi] += o.hit_rate;
                }
            }
        }
        samples += cycles.len();
    }

    Ok((0..k)
        .map(|i| {
            let raw: Vec<f64> = hr_sum[i].iter().map(|s| s / samples as f64).collect();
            ProfiledCurve {
                grid: grid.to_vec(),
                hr_at: isotonic_non_decreasing(&raw),
                ops: ops[i],
            }
        })
        .collect())
}

/// One knapsack group per tenant; each item is (pages, value) with pages a
/// multiple of `chunk`. Exactly one item per group is chosen.
#[derive(Debug, Clone)]
pub struct MckpInstance {
    pub groups: Vec<Vec<(i64, f64)>>,
    pub budget: i64,
    pub chunk: i64,
}

pub fn default_chunk(total_pages: i64) -> i64 {
    (total_pages / 64).max(1)
}

/// Build the per-phase instance from profiled curves: allocation levels run
/// from each tenant's lower bound (rounded up to a chunk multiple) to the
/// largest level its peers' bounds leave room for.
pub fn mckp_instance(
    curves: &[ProfiledCurve],
    cfg: &PoolConfig,
    chunk: i64,
) -> Result<MckpInstance, OracleError> {
    assert!(chunk >= 1);
    let eff_lb = cfg.effective_lower_bounds()?;
    let lo: Vec<i64> = eff_lb.iter().map(|&b| (b + chunk - 1) / chunk * chunk).collect();
    let lo_sum: i64 = lo.iter().sum();
    if lo_sum > cfg.total_pages {
        return Err(OracleError::Infeasible);
    }
    let groups = curves
        .iter()
        .enumerate()
        .map(|(i, curve)| {
            let hi = cfg.total_pages - (lo_sum - lo[i]);
            (lo[i]..=hi)
                .step_by(chunk as usize)
                .map(|pages| (pages, curve.value(pages)))
                .collect()
        })
        .collect();
    Ok(MckpInstance {
        groups,
        budget: cfg.total_pages,
        chunk,
    })
}

/// Exact dynamic program over (group, chunk budget): maximizes total value
/// with one item per group and total weight within budget. Whole leftover
/// pages (unused chunks plus the budget remainder) go to the tenant whose
/// last chunk bought the most value, ties to the lower id. Returns the plan
/// and the optimal instance value.
pub fn solve_mckp(inst: &MckpInstance) -> Result<(AllocationPlan, f64), OracleError> {
    let k = inst.groups.len();
    assert!(k > 0 && inst.chunk >= 1);
    for g in &inst.groups {
        assert!(!g.is_empty(), "every group needs at least one item");
        assert!(
            g.iter().all(|&(w, _)| w >= 0 && w % inst.chunk == 0),
            "weights must be non-negative chunk multiples"
        );
    }
    let b = (inst.budget / inst.chunk) as usize;

    let mut dp = vec![0.0f64; b + 1];
    let mut choice: Vec<Vec<usize>> = Vec::with_capacity(k);
    for items in &inst.groups {
        let mut ndp = vec![f64::NEG_INFINITY; b + 1];
        let mut ch = vec![usize::MAX; b + 1];
        for (u, slot) in ndp.iter_mut().enumerate() {
            for (j, &(w, v)) in items.iter().enumerate() {
                let wc = (w / inst.chunk) as usize;
                if wc <= u && dp[u - wc] > f64::NEG_INFINITY {
                    let cand = dp[u - wc] + v;
                    if cand > *slot {
                        *slot = cand;
                        ch[u] = j;
                    }
                }
            }
        }
        dp = ndp;
        choice.push(ch);
    }
    if dp[b] == f64::NEG_INFINITY {
        return Err(OracleError::Infeasible);
    }

    let mut pages = vec![0i64; k];
    let mut picked = vec![0usize; k];
    let mut u = b;
    for g in (0..k).rev() {
        let j = choice[g][u];
        let (w, _) = inst.groups[g][j];
        pages[g] = w;
        picked[g] = j;
        u -= (w / inst.chunk) as usize;
    }

    let leftover = inst.budget - pages.iter().sum::<i64>();
    if leftover > 0 {
        let best = (0..k)
            .max_by(|&a, &bb| {
                let marg = |i: usize| {
                    if picked[i] > 0 {
                        inst.groups[i][picked[i]].1 - inst.groups[i][picked[i] - 1].1
                    } else {
                        f64::NEG_INFINITY
                    }
                };
                marg(a).total_cmp(&marg(bb)).then(bb.cmp(&a))
            })
            .unwrap();
        pages[best] += leftover;
    }
    Ok((AllocationPlan { pages }, dp[b]))
}

/// Reference enumerator over item choices; exponential, tests only.
pub fn brute_force_mckp(inst: &MckpInstance) -> Result<(Vec<usize>, f64), OracleError> {
    let k = inst.groups.len();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut picks = vec![0usize; k];
    fn recur(
        inst: &MckpInstance,
        g: usize,
        weight: i64,
        value: f64,
        picks: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, f64)>,
    ) {
        if g == inst.groups.len() {
            if best.as_ref().is_none_or(|b| value > b.1) {
                *best = Some((picks.clone(), value));
            }
            return;
        }
        for (j, &(w, v)) in inst.groups[g].iter().enumerate() {
            if weight + w <= inst.budget {
                picks[g] = j;
                recur(inst, g + 1, weight + w, value + v, picks, best);
            }
        }
    }
    recur(inst, 0, 0, 0.0, &mut picks, &mut best);
    best.ok_or(OracleError::Infeasible)
}

/// Exhaustive search over all feasible integral plans of a small pool,
/// valued on the environment's ground-truth curves with phase-average ops.
/// Hard-limited to 3 tenants and a 64-page budget.
pub fn brute_force_best(
    env: &EnvironmentModel,
    phase: usize,
    cfg: &PoolConfig,
) -> Result<(AllocationPlan, f64), OracleError> {
    const MAX_TENANTS: usize = 3;
    const MAX_BUDGET: i64 = 64;
    if cfg.tenant_count() > MAX_TENANTS || cfg.total_pages > MAX_BUDGET {
        return Err(OracleError::LimitsExceeded {
            max_tenants: MAX_TENANTS,
            max_budget: MAX_BUDGET,
        });
    }
    let bounds = env.schedule.phase_bounds();
    let &(start, end) = bounds
        .get(phase)
        .ok_or(OracleError::PhaseOutOfRange { phase })?;
    let k = cfg.tenant_count();
    let eff_lb = cfg.effective_lower_bounds()?;

    let mut ops = vec![0.0f64; k];
    for t in start..end {
        for (i, o) in ops.iter_mut().enumerate() {
            *o += env.schedule.scheduled_ops(t, i).expect("cycle within phase");
        }
    }
    for o in &mut ops {
        *o /= (end - start).max(1) as f64;
    }

    let value_of = |pages: &[i64]| -> f64 {
        pages
            .iter()
            .enumerate()
            .map(|(i, &p)| ops[i] * env.curves[i].true_hit_rate(p))
            .sum()
    };

    let mut best: Option<(Vec<i64>, f64)> = None;
    let mut pages = vec![0i64; k];
    fn recur(
        i: usize,
        remaining: i64,
        eff_lb: &[i64],
        pages: &mut Vec<i64>,
        value_of: &dyn Fn(&[i64]) -> f64,
        best: &mut Option<(Vec<i64>, f64)>,
    ) {
        let k = eff_lb.len();
        if i == k - 1 {
            if remaining < eff_lb[i] {
                return;
            }
            pages[i] = remaining;
            let v = value_of(pages);
            if best.as_ref().is_none_or(|b| v > b.1) {
                *best = Some((pages.clone(), v));
            }
            return;
        }
        let reserved: i64 = eff_lb[i + 1..].iter().sum();
        for p in eff_lb[i]..=(remaining - reserved) {
            pages[i] = p;
            recur(i + 1, remaining - p, eff_lb, pages, value_of, best);
        }
    }
    recur(0, cfg.total_pages, &eff_lb, &mut pages, &value_of, &mut best);
    let (pages, v) = best.ok_or(OracleError::Infeasible)?;
    Ok((AllocationPlan { pages }, v))
}

/// Persist profiled curves as plain rows: tenant, pages, hit_rate, ops.
pub fn write_profiles_csv(path: &Path, curves: &[ProfiledCurve]) -> Result<(), OracleError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["tenant", "pages", "hit_rate", "ops"])?;
    for (i, c) in curves.iter().enumerate() {
        for (p, hr) in c.grid.iter().zip(&c.hr_at) {
            w.write_record([
                i.to_string(),
                p.to_string(),
                format!("{hr:.17}"),
                format!("{:.17}", c.ops),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_profiles_csv(path: &Path) -> Result<Vec<ProfiledCurve>, OracleError> {
    let mut r = csv::Reader::from_path(path)?;
    let mut curves: Vec<ProfiledCurve> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let tenant: usize = rec[0].parse().map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidData, "bad tenant column")
        })?;
        let pages: i64 = rec[1].parse().map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidData, "bad pages column")
        })?;
        let hr: f64 = rec[2].parse().map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidData, "bad hit_rate column")
        })?;
        let ops: f64 = rec[3].parse().map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidData, "bad ops column")
        })?;
        while curves.len() <= tenant {
            curves.push(ProfiledCurve {
                grid: vec![],
                hr_at: vec![],
                ops: 0.0,
            });
        }
        curves[tenant].grid.push(pages);
        curves[tenant].hr_at.push(hr);
        curves[tenant].ops = ops;
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simenv::{HitRateCurve, NoiseModel, Phase, WorkloadSchedule};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn env2(noise: NoiseModel, cycles: u64) -> EnvironmentModel {
        EnvironmentModel {
            curves: vec![
                HitRateCurve::ExpSaturating { h_max: 0.9, scale: 20.0 },
                HitRateCurve::PolluterFlat { floor: 0.05 },
            ],
            schedule: WorkloadSchedule {
                base_ops: vec![100.0, 40.0],
                phases: vec![Phase {
                    duration_cycles: cycles,
                    multipliers: vec![1.0, 1.0],
                }],
            },
            noise,
            hit_latency_ms: 0.1,
            miss_latency_ms: 50.0,
        }
    }

    #[test]
    fn isotonic_pools_violators() {
        assert_eq!(
            isotonic_non_decreasing(&[1.0, 3.0, 2.0, 4.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
        assert_eq!(
            isotonic_non_decreasing(&[0.1, 0.2, 0.3]),
            vec![0.1, 0.2, 0.3]
        );
        let flat = isotonic_non_decreasing(&[3.0, 2.0, 1.0]);
        assert_eq!(flat, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn noise_free_profile_equals_the_closed_form() {
        let env = env2(NoiseModel::noiseless(7), 50);
        let grid = vec![0, 10, 20, 40, 64];
        let curves = profile_phase(&env, 0, &grid, &[]).unwrap();
        for (gi, &p) in grid.iter().enumerate() {
            assert_relative_eq!(
                curves[0].hr_at[gi],
                0.9 * (1.0 - (-(p as f64) / 20.0).exp()),
                epsilon = 1e-12
            );
            assert_relative_eq!(curves[1].hr_at[gi], 0.05);
        }
        assert_relative_eq!(curves[0].ops, 100.0);
        assert_relative_eq!(curves[1].ops, 40.0);
    }

    #[test]
    fn noisy_profile_is_monotone_and_needs_seeds() {
        let noise = NoiseModel { hr_sigma: 0.05, ops_sigma: 0.0, seed: 3 };
        let env = env2(noise, 40);
        let grid = vec![0, 8, 16, 32, 48, 64];
        match profile_phase(&env, 0, &grid, &[1, 2]) {
            Err(OracleError::InsufficientSeeds { got: 2 }) => {}
            other => panic!("expected seed guard, got {other:?}"),
        }
        let curves = profile_phase(&env, 0, &grid, &[1, 2, 3, 4, 5]).unwrap();
        for c in &curves {
            assert!(c.hr_at.windows(2).all(|w| w[0] <= w[1]));
        }
        // Averaged profile stays close to truth.
        assert!((curves[0].hr_at[5] - 0.9 * (1.0 - (-64.0f64 / 20.0).exp())).abs() < 0.02);
    }

    #[test]
    fn profile_rejects_bad_phase() {
        let env = env2(NoiseModel::noiseless(0), 10);
        assert!(matches!(
            profile_phase(&env, 3, &[0, 10], &[]),
            Err(OracleError::PhaseOutOfRange { phase: 3 })
        ));
    }

    #[test]
    fn interpolation_is_linear_between_grid_points() {
        let c = ProfiledCurve {
            grid: vec![0, 10, 20],
            hr_at: vec![0.0, 0.5, 0.6],
            ops: 10.0,
        };
        assert_relative_eq!(c.hr(5), 0.25);
        assert_relative_eq!(c.hr(15), 0.55);
        assert_relative_eq!(c.hr(-3), 0.0);
        assert_relative_eq!(c.hr(99), 0.6);
        assert_relative_eq!(c.value(10), 5.0);
    }

    fn concave_curve(grid: &[i64], h: f64, s: f64, ops: f64) -> ProfiledCurve {
        ProfiledCurve {
            grid: grid.to_vec(),
            hr_at: grid
                .iter()
                .map(|&p| h * (1.0 - (-(p as f64) / s).exp()))
                .collect(),
            ops,
        }
    }

    #[test]
    fn single_tenant_gets_the_whole_budget() {
        let cfg = PoolConfig {
            total_pages: 32,
            fixed_pages: 0,
            base_priority: vec![1.0],
            lower_bounds: vec![2],
        };
        let curves = vec![concave_curve(&[2, 8, 16, 32], 0.9, 10.0, 50.0)];
        let inst = mckp_instance(&curves, &cfg, 1).unwrap();
        let (plan, _) = solve_mckp(&inst).unwrap();
        assert_eq!(plan.pages, vec![32]);
    }

    #[test]
    fn dp_matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..80 {
            let k = rng.random_range(1..=3usize);
            let budget = rng.random_range(8..=32i64);
            let groups: Vec<Vec<(i64, f64)>> = (0..k)
                .map(|_| {
                    let n = rng.random_range(2..=5usize);
                    let mut weights: Vec<i64> =
                        (0..n).map(|_| rng.random_range(0..=budget)).collect();
                    weights.sort_unstable();
                    weights.dedup();
                    weights
                        .into_iter()
                        .map(|w| (w, rng.random_range(0.0..10.0)))
                        .collect()
                })
                .collect();
            let inst = MckpInstance { groups, budget, chunk: 1 };

            let dp = solve_mckp(&inst);
            let bf = brute_force_mckp(&inst);
            match (dp, bf) {
                (Ok((plan, v_dp)), Ok((picks, v_bf))) => {
                    assert!((v_dp - v_bf).abs() < 1e-9, "dp {v_dp} vs bf {v_bf}");
                    // Chosen weights must not exceed budget; plan must fill it.
                    let w: i64 = picks
                        .iter()
                        .enumerate()
                        .map(|(g, &j)| inst.groups[g][j].0)
                        .sum();
                    assert!(w <= budget);
                    assert_eq!(plan.total(), budget);
                }
                (Err(OracleError::Infeasible), Err(OracleError::Infeasible)) => {}
                (dp, bf) => panic!("disagreement: dp={dp:?} bf={bf:?}"),
            }
        }
    }

    #[test]
    fn identical_concave_tenants_match_even_split_value() {
        let cfg = PoolConfig {
            total_pages: 32,
            fixed_pages: 0,
            base_priority: vec![1.0, 1.0],
            lower_bounds: vec![0, 0],
        };
        let grid: Vec<i64> = (0..=32).collect();
        let curves = vec![
            concave_curve(&grid, 0.8, 7.0, 10.0),
            concave_curve(&grid, 0.8, 7.0, 10.0),
        ];
        let inst = mckp_instance(&curves, &cfg, 1).unwrap();
        let (_, v) = solve_mckp(&inst).unwrap();
        let even = curves[0].value(16) + curves[1].value(16);
        assert_relative_eq!(v, even, epsilon = 1e-9);
    }

    #[test]
    fn exact_bound_budget_forces_the_unique_plan() {
        let cfg = PoolConfig {
            total_pages: 12,
            fixed_pages: 0,
            base_priority: vec![1.0, 1.0, 1.0],
            lower_bounds: vec![2, 4, 6],
        };
        let grid: Vec<i64> = (0..=12).collect();
        let curves: Vec<ProfiledCurve> =
            (0..3).map(|_| concave_curve(&grid, 0.5, 5.0, 1.0)).collect();
        let inst = mckp_instance(&curves, &cfg, 1).unwrap();
        let (plan, _) = solve_mckp(&inst).unwrap();
        assert_eq!(plan.pages, vec![2, 4, 6]);
    }

    #[test]
    fn halving_the_chunk_never_loses_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let cfg = PoolConfig {
                total_pages: 64,
                fixed_pages: 0,
                base_priority: vec![1.0, 1.0],
                lower_bounds: vec![0, 0],
            };
            let grid: Vec<i64> = (0..=64).step_by(4).collect();
            let curves: Vec<ProfiledCurve> = (0..2)
                .map(|_| {
                    concave_curve(
                        &grid,
                        rng.random_range(0.3..0.95),
                        rng.random_range(4.0..40.0),
                        rng.random_range(10.0..200.0),
                    )
                })
                .collect();
            let coarse = mckp_instance(&curves, &cfg, 8).unwrap();
            let fine = mckp_instance(&curves, &cfg, 4).unwrap();
            let (_, v_coarse) = solve_mckp(&coarse).unwrap();
            let (_, v_fine) = solve_mckp(&fine).unwrap();
            assert!(
                v_fine >= v_coarse - 1e-9,
                "fine {v_fine} < coarse {v_coarse}"
            );
        }
    }

    #[test]
    fn brute_force_env_search_prefers_the_steep_tenant() {
        let env = env2(NoiseModel::noiseless(0), 20);
        let cfg = PoolConfig {
            total_pages: 64,
            fixed_pages: 0,
            base_priority: vec![1.0, 1.0],
            lower_bounds: vec![4, 4],
        };
        let (plan, v) = brute_force_best(&env, 0, &cfg).unwrap();
        // Polluter is flat: every page beyond its floor is wasted on it.
        assert_eq!(plan.pages, vec![60, 4]);
        assert!(v > 0.0);

        let too_big = PoolConfig {
            total_pages: 65,
            ..cfg.clone()
        };
        assert!(matches!(
            brute_force_best(&env, 0, &too_big),
            Err(OracleError::LimitsExceeded { .. })
        ));
    }

    #[test]
    fn profiles_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profiles.csv");
        let curves = vec![
            concave_curve(&[0, 8, 16], 0.7, 9.0, 42.0),
            concave_curve(&[0, 8, 16], 0.5, 30.0, 7.0),
        ];
        write_profiles_csv(&path, &curves).unwrap();
        let back = read_profiles_csv(&path).unwrap();
        assert_eq!(back, curves);
    }
}
