//! Bundled evaluation scenarios.
//!
//! Each constructor produces a pool configuration plus an environment. The
//! casts are small and deliberately archetypal: curves are calibrated to
//! produce qualitative regimes (a saturating VIP, an S-shaped stress case, a
//! scan polluter, an idle reservation), not to mimic a specific system.

use super::{EnvironmentModel, HitRateCurve, NoiseModel, Phase, WorkloadSchedule};
use crate::domain::PoolConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HIT_LATENCY_MS: f64 = 0.1;
pub const MISS_LATENCY_MS: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub cfg: PoolConfig,
    pub env: EnvironmentModel,
    pub default_cycles: u64,
}

/// Knobs shared by all scenario constructors. `None` keeps the scenario's
/// own default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ScenarioParams {
    #[serde(default)]
    pub seed: u64,
    pub tenants: Option<usize>,
    pub cycles: Option<u64>,
    pub hr_sigma: Option<f64>,
    pub ops_sigma: Option<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    Unknown(String),
    #[error("scenario `{name}` has a fixed cast of {expected} tenants")]
    FixedCast { name: String, expected: usize },
    #[error("tenant count {0} out of supported range")]
    BadTenantCount(usize),
}

impl Scenario {
    /// Tenants whose ops multiplier is the strict per-phase maximum and
    /// exceeds 1. `None` for balanced phases.
    pub fn hotspot_by_phase(&self) -> Vec<Option<usize>> {
        self.env
            .schedule
            .phases
            .iter()
            .map(|p| {
                let mut best = 0;
                for i in 1..p.multipliers.len() {
                    if p.multipliers[i] > p.multipliers[best] {
                        best = i;
                    }
                }
                let top = p.multipliers[best];
                let unique = p.multipliers.iter().filter(|&&m| m == top).count() == 1;
                (top > 1.0 && unique).then_some(best)
            })
            .collect()
    }

    /// Cycle ranges in which `tenant` runs above its base rate.
    pub fn burst_windows(&self, tenant: usize) -> Vec<(u64, u64)> {
        self.env
            .schedule
            .phase_bounds()
            .into_iter()
            .zip(&self.env.schedule.phases)
            .filter(|(_, p)| p.multipliers[tenant] > 1.0)
            .map(|(b, _)| b)
            .collect()
    }

    /// First tenant with a flat (scan-like) curve, if any.
    pub fn polluter(&self) -> Option<usize> {
        self.env
            .curves
            .iter()
            .position(|c| matches!(c, HitRateCurve::PolluterFlat { .. }))
    }

    /// Highest-priority tenant.
    pub fn vip(&self) -> usize {
        let mut best = 0;
        for i in 1..self.cfg.base_priority.len() {
            if self.cfg.base_priority[i] > self.cfg.base_priority[best] {
                best = i;
            }
        }
        best
    }
}

fn noise(params: &ScenarioParams, hr_default: f64, ops_default: f64) -> NoiseModel {
    NoiseModel {
        hr_sigma: params.hr_sigma.unwrap_or(hr_default),
        ops_sigma: params.ops_sigma.unwrap_or(ops_default),
        seed: params.seed,
    }
}

fn frac(i: usize, salt: u64) -> f64 {
    // Deterministic pseudo-variety in [0, 1) for generated casts.
    let x = super::splitmix64((i as u64).wrapping_mul(0x9e37) ^ salt);
    (x >> 11) as f64 / (1u64 << 53) as f64
}

pub fn make_scenario(name: &str, params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    match name.to_ascii_lowercase().as_str() {
        "stationary_concave" => stationary_concave(params),
        "hotspot_shift" => hotspot_shift(params),
        "pollution_attack" => pollution_attack(params),
        "sshape_stress" => sshape_stress(params),
        "scale_k" => scale_k(params),
        other => Err(ScenarioError::Unknown(other.to_string())),
    }
}

pub const SCENARIO_NAMES: [&str; 5] = [
    "stationary_concave",
    "hotspot_shift",
    "pollution_attack",
    "sshape_stress",
    "scale_k",
];

/// `z * e^-z / (1 - e^-z)`: the marginal hit rate of a saturating curve at
/// `z` working-set units, relative to the hit rate there. Strictly
/// decreasing from 1 to 0, which makes the design solve below well posed.
fn marginal_ratio(z: f64) -> f64 {
    z * (-z).exp() / (1.0 - (-z).exp())
}

fn invert_marginal_ratio(rhs: f64) -> f64 {
    let (mut lo, mut hi) = (1e-3_f64, 16.0_f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if marginal_ratio(mid) > rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Heterogeneous diminishing-returns tenants under a fixed load mix: a short
/// head of heavy tenants whose demand exceeds an even split, a homogeneous
/// mid tier sized exactly at the even split, and one cold tail tenant whose
/// demand sits at its lower bound. Load weights and curve parameters are
/// solved from that target allocation so every non-corner tenant has the
/// same marginal utility there, i.e. the optimum is known by construction.
/// The long-horizon regret and jitter measurements run here.
fn stationary_concave(params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    let k = params.tenants.unwrap_or(10);
    if !(2..=256).contains(&k) {
        return Err(ScenarioError::BadTenantCount(k));
    }
    let cycles = params.cycles.unwrap_or(5000);
    let lb: i64 = 16;
    let total_pages = 2048.max(64 * k as i64);
    let even = (total_pages - k as i64 * lb) as f64 / k as f64;

    // Target elastic pages: geometric extra mass on the head, the even split
    // in the middle, nothing on the cold tail.
    let n_top = ((0.4 * k as f64).round() as usize).clamp(1, k - 1);
    let wnorm = (1.0 - 0.42) / (1.0 - 0.42f64.powi(n_top as i32));
    let elastic: Vec<f64> = (0..k)
        .map(|i| {
            if i < n_top {
                even * (1.0 + wnorm * 0.42f64.powi(i as i32))
            } else if i < k - 1 {
                even
            } else {
                0.0
            }
        })
        .collect();

    // Hit rates at the target point: a mild ramp down the head, a common
    // mid-tier level. The cold tenant is handled separately below.
    let hr_star: Vec<f64> = (0..k)
        .map(|i| {
            if i < n_top {
                0.88 - 0.10 * i as f64 / (n_top - 1).max(1) as f64
            } else {
                0.74
            }
        })
        .collect();

    // Load mix proportional to elastic / hr_star, so normalized load times
    // hit rate ranks tenants exactly by their target share.
    let ratio0 = elastic[0] / hr_star[0];
    let base_ops: Vec<f64> = (0..k)
        .map(|i| 40.0 + 250.0 * (elastic[i] / hr_star[i]) / ratio0)
        .collect();

    // Largest common marginal utility compatible with h_max <= 0.96 for
    // every non-corner tenant, then per-tenant curve parameters that place
    // that marginal exactly at the target allocation.
    let x_star: Vec<f64> = elastic.iter().map(|e| lb as f64 + e).collect();
    let lambda_star = 0.97
        * (0..k - 1)
            .map(|i| {
                let z_need = -(1.0 - hr_star[i] / 0.96).ln();
                marginal_ratio(z_need) * base_ops[i] * hr_star[i] / x_star[i]
            })
            .fold(f64::INFINITY, f64::min);
    let mut curves: Vec<HitRateCurve> = (0..k - 1)
        .map(|i| {
            let z = invert_marginal_ratio(lambda_star * x_star[i] / (base_ops[i] * hr_star[i]));
            HitRateCurve::ExpSaturating {
                h_max: hr_star[i] / (1.0 - (-z).exp()),
                scale: x_star[i] / z,
            }
        })
        .collect();
    // Cold tail: marginal utility already below lambda_star at the lower
    // bound, so its optimum is the corner. Kept flat as well as low: its
    // raw hit-rate slope sits under the head tenants' slopes at their
    // optima, so a drained cold tenant never reads as the fastest mover.
    curves.push(HitRateCurve::ExpSaturating {
        h_max: 0.05,
        scale: 200.0,
    });

    Ok(Scenario {
        name: "stationary_concave".into(),
        cfg: PoolConfig {
            total_pages,
            fixed_pages: 0,
            base_priority: vec![1.0; k],
            lower_bounds: vec![lb; k],
        },
        env: EnvironmentModel {
            curves,
            schedule: WorkloadSchedule {
                base_ops,
                phases: vec![Phase {
                    duration_cycles: cycles,
                    multipliers: vec![1.0; k],
                }],
            },
            noise: noise(params, 0.011, 0.02),
            hit_latency_ms: HIT_LATENCY_MS,
            miss_latency_ms: MISS_LATENCY_MS,
        },
        default_cycles: cycles,
    })
}

/// Three phases: balanced warmup, a high-priority tenant spikes to 30x, then
/// the spike moves to a medium-priority tenant. Exercises re-adaptation.
fn hotspot_shift(params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    const K: usize = 5;
    if params.tenants.is_some_and(|t| t != K) {
        return Err(ScenarioError::FixedCast {
            name: "hotspot_shift".into(),
            expected: K,
        });
    }
    let curves = vec![
        HitRateCurve::ExpSaturating {
            h_max: 0.95,
            scale: 250.0,
        },
        HitRateCurve::ExpSaturating {
            h_max: 0.92,
            scale: 220.0,
        },
        HitRateCurve::ExpSaturating {
            h_max: 0.80,
            scale: 120.0,
        },
        HitRateCurve::ExpSaturating {
            h_max: 0.78,
            scale: 110.0,
        },
        HitRateCurve::ExpSaturating {
            h_max: 0.75,
            scale: 100.0,
        },
    ];
    let base_ops = vec![120.0, 100.0, 80.0, 80.0, 80.0];
    let phases = vec![
        Phase {
            duration_cycles: 60,
            multipliers: vec![1.0; K],
        },
        Phase {
            duration_cycles: 300,
            multipliers: vec![30.0, 1.0, 1.0, 1.0, 1.0],
        },
        Phase {
            duration_cycles: 300,
            multipliers: vec![1.0, 30.0, 1.0, 1.0, 1.0],
        },
    ];
    Ok(Scenario {
        name: "hotspot_shift".into(),
        cfg: PoolConfig {
            total_pages: 2048,
            fixed_pages: 512,
            base_priority: vec![4.0, 2.0, 1.0, 1.0, 1.0],
            lower_bounds: vec![32; K],
        },
        env: EnvironmentModel {
            curves,
            schedule: WorkloadSchedule { base_ops, phases },
            noise: noise(params, 0.02, 0.05),
            hit_latency_ms: HIT_LATENCY_MS,
            miss_latency_ms: MISS_LATENCY_MS,
        },
        default_cycles: 660,
    })
}

/// A saturating VIP, a flat-curve attacker running intermittent 10x scan
/// bursts (20 cycles on, 20 off), a steep still-growing tenant, and an idle
/// reservation, all in one small pool. Doubles as the archetype lineup.
fn pollution_attack(params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    const K: usize = 4;
    if params.tenants.is_some_and(|t| t != K) {
        return Err(ScenarioError::FixedCast {
            name: "pollution_attack".into(),
            expected: K,
        });
    }
    let curves = vec![
        HitRateCurve::ExpSaturating {
            h_max: 0.97,
            scale: 60.0,
        },
        HitRateCurve::PolluterFlat { floor: 0.04 },
        HitRateCurve::ExpSaturating {
            h_max: 0.85,
            scale: 400.0,
        },
        HitRateCurve::Quiescent,
    ];
    let base_ops = vec![1200.0, 400.0, 300.0, 0.0];
    let mut phases = vec![Phase {
        duration_cycles: 100,
        multipliers: vec![1.0; K],
    }];
    for _ in 0..10 {
        phases.push(Phase {
            duration_cycles: 20,
            multipliers: vec![1.0, 10.0, 1.0, 1.0],
        });
        phases.push(Phase {
            duration_cycles: 20,
            multipliers: vec![1.0; K],
        });
    }
    Ok(Scenario {
        name: "pollution_attack".into(),
        cfg: PoolConfig {
            total_pages: 512,
            fixed_pages: 128,
            base_priority: vec![6.0, 0.0, 1.0, 1.0],
            lower_bounds: vec![16, 8, 8, 4],
        },
        env: EnvironmentModel {
            curves,
            schedule: WorkloadSchedule { base_ops, phases },
            noise: noise(params, 0.02, 0.05),
            hit_latency_ms: HIT_LATENCY_MS,
            miss_latency_ms: MISS_LATENCY_MS,
        },
        default_cycles: 500,
    })
}

/// Half the cast has S-shaped curves, so marginal returns grow before they
/// shrink. Stresses the concavity assumptions of the optimizers.
fn sshape_stress(params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    const K: usize = 6;
    if params.tenants.is_some_and(|t| t != K) {
        return Err(ScenarioError::FixedCast {
            name: "sshape_stress".into(),
            expected: K,
        });
    }
    let cycles = params.cycles.unwrap_or(2000);
    let curves = vec![
        HitRateCurve::LogisticSShape {
            h_max: 0.9,
            scale: 60.0,
            midpoint: 300.0,
        },
        HitRateCurve::LogisticSShape {
            h_max: 0.85,
            scale: 80.0,
            midpoint: 500.0,
        },
        HitRateCurve::LogisticSShape {
            h_max: 0.8,
            scale: 40.0,
            midpoint: 200.0,
        },
        HitRateCurve::ExpSaturating {
            h_max: 0.9,
            scale: 150.0,
        },
        HitRateCurve::ExpSaturating {
            h_max: 0.75,
            scale: 90.0,
        },
        HitRateCurve::ExpSaturating {
            h_max: 0.6,
            scale: 200.0,
        },
    ];
    let base_ops = vec![150.0, 120.0, 100.0, 140.0, 110.0, 90.0];
    Ok(Scenario {
        name: "sshape_stress".into(),
        cfg: PoolConfig {
            total_pages: 2048,
            fixed_pages: 0,
            base_priority: vec![1.0; K],
            lower_bounds: vec![16; K],
        },
        env: EnvironmentModel {
            curves,
            schedule: WorkloadSchedule {
                base_ops,
                phases: vec![Phase {
                    duration_cycles: cycles,
                    multipliers: vec![1.0; K],
                }],
            },
            noise: noise(params, 0.02, 0.05),
            hit_latency_ms: HIT_LATENCY_MS,
            miss_latency_ms: MISS_LATENCY_MS,
        },
        default_cycles: cycles,
    })
}

/// Wide stationary casts (default 60 tenants) whose load decays smoothly in
/// the tenant index: a handful of heavy tenants, then a long lukewarm tail.
/// Because the decay is written in absolute index, the shape of the score
/// landscape near the top is the same at any cast width, which is what the
/// amortized-cost runs need to compare fairly across widths.
fn scale_k(params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    let k = params.tenants.unwrap_or(60);
    if !(10..=512).contains(&k) {
        return Err(ScenarioError::BadTenantCount(k));
    }
    let cycles = params.cycles.unwrap_or(2000);
    let curves: Vec<HitRateCurve> = (0..k)
        .map(|i| HitRateCurve::ExpSaturating {
            h_max: 0.62 + 0.30 * frac(i, 1),
            scale: 40.0 + 80.0 * frac(i, 2),
        })
        .collect();
    let base_ops: Vec<f64> = (0..k)
        .map(|i| 40.0 + 260.0 * (-(i as f64) / 8.0).exp() + 12.0 * frac(i, 3))
        .collect();
    Ok(Scenario {
        name: "scale_k".into(),
        cfg: PoolConfig {
            total_pages: 64 * k as i64,
            fixed_pages: 8 * k as i64,
            base_priority: vec![1.0; k],
            lower_bounds: vec![4; k],
        },
        env: EnvironmentModel {
            curves,
            schedule: WorkloadSchedule {
                base_ops,
                phases: vec![Phase {
                    duration_cycles: cycles,
                    multipliers: vec![1.0; k],
                }],
            },
            noise: noise(params, 0.008, 0.03),
            hit_latency_ms: HIT_LATENCY_MS,
            miss_latency_ms: MISS_LATENCY_MS,
        },
        default_cycles: cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_is_internally_consistent() {
        for name in SCENARIO_NAMES {
            let s = make_scenario(name, &ScenarioParams::default()).unwrap();
            s.cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            s.env.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(s.env.schedule.total_cycles() >= s.default_cycles);
            assert_eq!(s.env.tenant_count(), s.cfg.tenant_count());
        }
    }

    #[test]
    fn unknown_scenario_is_rejected() {
        assert!(matches!(
            make_scenario("nope", &ScenarioParams::default()),
            Err(ScenarioError::Unknown(_))
        ));
    }

    #[test]
    fn tenant_overrides() {
        let p = ScenarioParams {
            tenants: Some(120),
            ..Default::default()
        };
        let s = make_scenario("scale_k", &p).unwrap();
        assert_eq!(s.cfg.tenant_count(), 120);
        assert_eq!(s.cfg.total_pages, 64 * 120);

        let p = ScenarioParams {
            tenants: Some(7),
            ..Default::default()
        };
        assert!(matches!(
            make_scenario("hotspot_shift", &p),
            Err(ScenarioError::FixedCast { expected: 5, .. })
        ));
    }

    #[test]
    fn hotspot_metadata_derivation() {
        let s = make_scenario("hotspot_shift", &ScenarioParams::default()).unwrap();
        assert_eq!(s.hotspot_by_phase(), vec![None, Some(0), Some(1)]);
        assert_eq!(s.vip(), 0);

        let s = make_scenario("pollution_attack", &ScenarioParams::default()).unwrap();
        assert_eq!(s.polluter(), Some(1));
        let bursts = s.burst_windows(1);
        assert_eq!(bursts.len(), 10);
        assert_eq!(bursts[0], (100, 120));
        assert_eq!(bursts[1], (140, 160));
    }

    #[test]
    fn seed_flows_into_noise() {
        let p = ScenarioParams {
            seed: 99,
            ..Default::default()
        };
        let s = make_scenario("stationary_concave", &p).unwrap();
        assert_eq!(s.env.noise.seed, 99);
    }
}
