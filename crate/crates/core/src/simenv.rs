//! Discrete-time synthetic environment: parametric hit-rate curves, a phased
//! workload schedule, and observation noise.
//!
//! Noise is a pure function of (seed, cycle, tenant, stream), so stepping the
//! environment is stateless and a run is bit-reproducible regardless of
//! evaluation order. Curve parameters in the bundled scenarios are chosen to
//! reproduce qualitative regimes (diminishing returns, S-shapes, polluters,
//! idle tenants), not any particular storage stack.

use crate::domain::{AllocationPlan, TenantObservation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod scenario;

pub use scenario::{make_scenario, Scenario, ScenarioError, ScenarioParams, SCENARIO_NAMES};

/// Ground-truth hit rate as a function of pages held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HitRateCurve {
    /// Diminishing returns: `h_max * (1 - exp(-pages / scale))`.
    ExpSaturating { h_max: f64, scale: f64 },
    /// S-shape: `h_max / (1 + exp(-(pages - midpoint) / scale))`.
    LogisticSShape {
        h_max: f64,
        scale: f64,
        midpoint: f64,
    },
    /// Scan-like traffic that caching barely helps: constant `floor`.
    PolluterFlat { floor: f64 },
    /// No traffic, no hits.
    Quiescent,
}

impl HitRateCurve {
    pub fn true_hit_rate(&self, pages: i64) -> f64 {
        let p = pages.max(0) as f64;
        match *self {
            HitRateCurve::ExpSaturating { h_max, scale } => h_max * (1.0 - (-p / scale).exp()),
            HitRateCurve::LogisticSShape {
                h_max,
                scale,
                midpoint,
            } => h_max / (1.0 + (-(p - midpoint) / scale).exp()),
            HitRateCurve::PolluterFlat { floor } => floor,
            HitRateCurve::Quiescent => 0.0,
        }
    }

    /// Analytic d(hit rate)/d(pages), used for diagnostics and oracle tests.
    pub fn slope(&self, pages: f64) -> f64 {
        let p = pages.max(0.0);
        match *self {
            HitRateCurve::ExpSaturating { h_max, scale } => h_max / scale * (-p / scale).exp(),
            HitRateCurve::LogisticSShape {
                h_max,
                scale,
                midpoint,
            } => {
                let s = 1.0 / (1.0 + (-(p - midpoint) / scale).exp());
                h_max * s * (1.0 - s) / scale
            }
            HitRateCurve::PolluterFlat { .. } | HitRateCurve::Quiescent => 0.0,
        }
    }

    /// True everywhere-concave on pages >= 0.
    pub fn is_concave(&self) -> bool {
        !matches!(self, HitRateCurve::LogisticSShape { .. })
    }
}

/// One schedule phase: per-tenant multipliers applied to base ops for a span
/// of cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub duration_cycles: u64,
    pub multipliers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSchedule {
    pub base_ops: Vec<f64>,
    pub phases: Vec<Phase>,
}

impl WorkloadSchedule {
    pub fn total_cycles(&self) -> u64 {
        self.phases.iter().map(|p| p.duration_cycles).sum()
    }

    pub fn phase_index_at(&self, cycle: u64) -> Option<usize> {
        let mut start = 0;
        for (i, p) in self.phases.iter().enumerate() {
            if cycle < start + p.duration_cycles {
                return Some(i);
            }
            start += p.duration_cycles;
        }
        None
    }

    /// Half-open [start, end) cycle ranges, one per phase.
    pub fn phase_bounds(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.phases.len());
        let mut start = 0;
        for p in &self.phases {
            out.push((start, start + p.duration_cycles));
            start += p.duration_cycles;
        }
        out
    }

    /// Noise-free ops for a tenant at a cycle: base * phase multiplier.
    pub fn scheduled_ops(&self, cycle: u64, tenant: usize) -> Option<f64> {
        let phase = self.phase_index_at(cycle)?;
        Some(self.base_ops[tenant] * self.phases[phase].multipliers[tenant])
    }
}

/// Relative Gaussian observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub hr_sigma: f64,
    pub ops_sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless(seed: u64) -> Self {
        NoiseModel {
            hr_sigma: 0.0,
            ops_sigma: 0.0,
            seed,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("curve count {curves} does not match tenant count {tenants}")]
    BadShape { curves: usize, tenants: usize },
    #[error("plan length {plan} does not match tenant count {tenants}")]
    BadPlan { plan: usize, tenants: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentModel {
    pub curves: Vec<HitRateCurve>,
    pub schedule: WorkloadSchedule,
    pub noise: NoiseModel,
    pub hit_latency_ms: f64,
    pub miss_latency_ms: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Standard normal draw keyed by (seed, cycle, tenant, stream).
fn keyed_gauss(seed: u64, cycle: u64, tenant: u64, stream: u64) -> f64 {
    let key = splitmix64(
        seed ^ splitmix64(cycle ^ splitmix64(tenant.wrapping_shl(17) ^ (stream << 1) ^ 0xa5a5)),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    StandardNormal.sample(&mut rng)
}

impl EnvironmentModel {
    pub fn tenant_count(&self) -> usize {
        self.curves.len()
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if self.curves.len() != self.schedule.base_ops.len()
            || self
                .schedule
                .phases
                .iter()
                .any(|p| p.multipliers.len() != self.curves.len())
        {
            return Err(EnvError::BadShape {
                curves: self.curves.len(),
                tenants: self.schedule.base_ops.len(),
            });
        }
        Ok(())
    }

    pub fn true_hit_rate(&self, tenant: usize, pages: i64) -> f64 {
        self.curves[tenant].true_hit_rate(pages)
    }

    /// One simulation step under `plan`. `None` once the schedule is over.
    pub fn step(&self, plan: &AllocationPlan, cycle: u64) -> Option<Vec<TenantObservation>> {
        self.schedule.phase_index_at(cycle)?;
        assert_eq!(
            plan.pages.len(),
            self.tenant_count(),
            "plan length does not match environment"
        );
        let mut out = Vec::with_capacity(self.tenant_count());
        for tenant in 0..self.tenant_count() {
            let scheduled = self
                .schedule
                .scheduled_ops(cycle, tenant)
                .expect("phase checked above");
            let ops_noise = if self.noise.ops_sigma > 0.0 {
                keyed_gauss(self.noise.seed, cycle, tenant as u64, 0) * self.noise.ops_sigma
            } else {
                0.0
            };
            let ops = (scheduled * (1.0 + ops_noise)).max(0.0);
            let truth = self.true_hit_rate(tenant, plan.pages[tenant]);
            let hr_noise = if self.noise.hr_sigma > 0.0 {
                keyed_gauss(self.noise.seed, cycle, tenant as u64, 1) * self.noise.hr_sigma
            } else {
                0.0
            };
            let hr = (truth * (1.0 + hr_noise)).clamp(0.0, 1.0);
            let hits = ops * hr;
            let misses = ops - hits;
            out.push(TenantObservation {
                ops,
                hits,
                misses,
                hit_rate: if ops > 0.0 { hr } else { 0.0 },
                current_pages: plan.pages[tenant],
            });
        }
        Some(out)
    }

    /// Noise-free aggregate utility of a plan at a cycle:
    /// sum over tenants of scheduled ops times true hit rate.
    pub fn true_utility(&self, plan: &AllocationPlan, cycle: u64) -> Option<f64> {
        self.schedule.phase_index_at(cycle)?;
        let mut u = 0.0;
        for tenant in 0..self.tenant_count() {
            let ops = self.schedule.scheduled_ops(cycle, tenant)?;
            u += ops * self.true_hit_rate(tenant, plan.pages[tenant]);
        }
        Some(u)
    }

    /// Ops-weighted mean request latency implied by a set of observations.
    pub fn latency_proxy_ms(&self, observations: &[TenantObservation]) -> f64 {
        let total_ops: f64 = observations.iter().map(|o| o.ops).sum();
        if total_ops <= 0.0 {
            return 0.0;
        }
        observations
            .iter()
            .map(|o| {
                o.ops * (o.hit_rate * self.hit_latency_ms + (1.0 - o.hit_rate) * self.miss_latency_ms)
            })
            .sum::<f64>()
            / total_ops
    }
}

/// Aggregate throughput from observed rates: sum of ops_i * hit_rate_i.
pub fn effective_throughput(observations: &[TenantObservation]) -> f64 {
    observations.iter().map(|o| o.ops * o.hit_rate).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_tenant_env(curve: HitRateCurve) -> EnvironmentModel {
        EnvironmentModel {
            curves: vec![curve],
            schedule: WorkloadSchedule {
                base_ops: vec![100.0],
                phases: vec![Phase {
                    duration_cycles: 10,
                    multipliers: vec![1.0],
                }],
            },
            noise: NoiseModel::noiseless(0),
            hit_latency_ms: 0.1,
            miss_latency_ms: 50.0,
        }
    }

    #[test]
    fn exp_curve_closed_form() {
        let c = HitRateCurve::ExpSaturating {
            h_max: 0.9,
            scale: 100.0,
        };
        assert_relative_eq!(c.true_hit_rate(100), 0.9 * (1.0 - (-1.0f64).exp()), epsilon = 1e-12);
        assert_relative_eq!(c.true_hit_rate(0), 0.0);
        assert!(c.true_hit_rate(100_000) < 0.9 + 1e-12);
    }

    #[test]
    fn logistic_curve_midpoint_and_shape() {
        let c = HitRateCurve::LogisticSShape {
            h_max: 0.8,
            scale: 50.0,
            midpoint: 300.0,
        };
        assert_relative_eq!(c.true_hit_rate(300), 0.4, epsilon = 1e-12);
        assert!(c.true_hit_rate(0) < 0.01);
        assert!(c.true_hit_rate(1000) > 0.79);
        assert!(!c.is_concave());
    }

    #[test]
    fn flat_and_quiescent_curves() {
        assert_relative_eq!(
            HitRateCurve::PolluterFlat { floor: 0.1 }.true_hit_rate(5000),
            0.1
        );
        assert_relative_eq!(HitRateCurve::Quiescent.true_hit_rate(512), 0.0);
    }

    #[test]
    fn curves_monotone_nondecreasing_on_grid() {
        let curves = [
            HitRateCurve::ExpSaturating {
                h_max: 0.9,
                scale: 77.0,
            },
            HitRateCurve::LogisticSShape {
                h_max: 0.85,
                scale: 40.0,
                midpoint: 256.0,
            },
            HitRateCurve::PolluterFlat { floor: 0.07 },
            HitRateCurve::Quiescent,
        ];
        for c in &curves {
            let mut prev = -1.0;
            for pages in (0..2048).step_by(8) {
                let hr = c.true_hit_rate(pages);
                assert!((0.0..=1.0).contains(&hr));
                assert!(hr >= prev - 1e-12, "{c:?} decreased at {pages}");
                prev = hr;
            }
        }
    }

    #[test]
    fn exp_curve_concave_on_grid() {
        let c = HitRateCurve::ExpSaturating {
            h_max: 0.9,
            scale: 150.0,
        };
        for pages in (8..2000).step_by(8) {
            let d2 = c.true_hit_rate(pages + 8) + c.true_hit_rate(pages - 8)
                - 2.0 * c.true_hit_rate(pages);
            assert!(d2 <= 1e-12);
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let curves = [
            HitRateCurve::ExpSaturating {
                h_max: 0.9,
                scale: 150.0,
            },
            HitRateCurve::LogisticSShape {
                h_max: 0.8,
                scale: 60.0,
                midpoint: 250.0,
            },
        ];
        for c in &curves {
            for pages in [10.0, 100.0, 400.0] {
                let h = 1e-4;
                let f = |p: f64| match *c {
                    HitRateCurve::ExpSaturating { h_max, scale } => {
                        h_max * (1.0 - (-p / scale).exp())
                    }
                    HitRateCurve::LogisticSShape {
                        h_max,
                        scale,
                        midpoint,
                    } => h_max / (1.0 + (-(p - midpoint) / scale).exp()),
                    _ => 0.0,
                };
                let fd = (f(pages + h) - f(pages - h)) / (2.0 * h);
                assert_relative_eq!(c.slope(pages), fd, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn schedule_phase_lookup() {
        let s = WorkloadSchedule {
            base_ops: vec![10.0],
            phases: vec![
                Phase {
                    duration_cycles: 60,
                    multipliers: vec![1.0],
                },
                Phase {
                    duration_cycles: 300,
                    multipliers: vec![30.0],
                },
            ],
        };
        assert_eq!(s.phase_index_at(0), Some(0));
        assert_eq!(s.phase_index_at(59), Some(0));
        assert_eq!(s.phase_index_at(60), Some(1));
        assert_eq!(s.phase_index_at(359), Some(1));
        assert_eq!(s.phase_index_at(360), None);
        assert_eq!(s.phase_bounds(), vec![(0, 60), (60, 360)]);
        assert_relative_eq!(s.scheduled_ops(100, 0).unwrap(), 300.0);
    }

    #[test]
    fn step_is_deterministic_and_bounded() {
        let mut env = one_tenant_env(HitRateCurve::ExpSaturating {
            h_max: 0.9,
            scale: 100.0,
        });
        env.noise = NoiseModel {
            hr_sigma: 0.05,
            ops_sigma: 0.1,
            seed: 42,
        };
        let plan = AllocationPlan { pages: vec![200] };
        let a = env.step(&plan, 3).unwrap();
        let b = env.step(&plan, 3).unwrap();
        assert_eq!(a, b);
        let c = env.step(&plan, 4).unwrap();
        assert_ne!(a, c, "different cycles draw different noise");
        for o in &a {
            assert!(o.ops >= 0.0);
            assert!((0.0..=1.0).contains(&o.hit_rate));
            assert_relative_eq!(o.hits + o.misses, o.ops, epsilon = 1e-9);
        }
        assert!(env.step(&plan, 10).is_none(), "schedule exhausted");
    }

    #[test]
    fn noiseless_step_matches_closed_form() {
        let env = one_tenant_env(HitRateCurve::ExpSaturating {
            h_max: 0.9,
            scale: 100.0,
        });
        let obs = env.step(&AllocationPlan { pages: vec![100] }, 0).unwrap();
        assert_relative_eq!(obs[0].hit_rate, 0.9 * (1.0 - (-1.0f64).exp()), epsilon = 1e-12);
        assert_relative_eq!(obs[0].ops, 100.0);
        assert_relative_eq!(
            env.true_utility(&AllocationPlan { pages: vec![100] }, 0).unwrap(),
            100.0 * 0.9 * (1.0 - (-1.0f64).exp()),
            epsilon = 1e-9
        );
    }

    #[test]
    fn quiescent_tenant_reports_zero_hit_rate() {
        let mut env = one_tenant_env(HitRateCurve::Quiescent);
        env.schedule.base_ops = vec![0.0];
        let obs = env.step(&AllocationPlan { pages: vec![64] }, 0).unwrap();
        assert_eq!(obs[0].hit_rate, 0.0);
        assert_eq!(obs[0].ops, 0.0);
    }

    #[test]
    fn latency_proxy_weighted_by_ops() {
        let env = one_tenant_env(HitRateCurve::ExpSaturating {
            h_max: 0.9,
            scale: 100.0,
        });
        let obs = vec![
            TenantObservation {
                ops: 100.0,
                hits: 100.0,
                misses: 0.0,
                hit_rate: 1.0,
                current_pages: 10,
            },
            TenantObservation {
                ops: 100.0,
                hits: 0.0,
                misses: 100.0,
                hit_rate: 0.0,
                current_pages: 10,
            },
        ];
        assert_relative_eq!(env.latency_proxy_ms(&obs), (0.1 + 50.0) / 2.0);
        assert_relative_eq!(effective_throughput(&obs), 100.0);
    }
}
