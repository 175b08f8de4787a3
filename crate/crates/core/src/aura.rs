//! The adaptive allocator: per-tenant signal tracking, composite scoring
//! with a self-tuning blend weight, an active-set scheme that keeps steady
//! state off the full-population scan path, and a momentum-filtered
//! reallocation step.
//!
//! Cycle structure: a *global scan* scores every tenant, picks a working set
//! (knee of the top scores plus a slice of the bottom), and resets the
//! convergence window. *Local cycles* rescore only the working set and move
//! pages inside it. A new scan triggers when a burst of aggregate-score
//! movement goes quiet again (stagnation after change, not mere quiet: an
//! undisturbed steady state stays on the fast path), when the inactivity cap
//! expires, or immediately for pools too small to bother
//! (`min_tenants_for_active_set`).

pub mod active_set;
pub mod allocator;
pub mod scoring;

use serde::{Deserialize, Serialize};

use crate::domain::{AllocationPlan, ConfigError, PoolConfig, TenantObservation};
use crate::policy::{Decision, DecisionMeta, Policy, PolicyContext};
use crate::signals::{SignalParams, TenantSignalState};
use active_set::{
    compose_set, find_knee_point, is_equilibrium, two_way_heap_filter, ImprovementWindow,
    RankedTenant,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AuraParams {
    pub signal: SignalParams,
    /// Cap on each side of the two-way ranking kept during a scan.
    pub k_max: usize,
    /// Length of the improvement window local cycles must keep quiet.
    pub window: usize,
    /// Relative aggregate-score improvement under which a cycle counts as quiet.
    pub conv_rel_eps: f64,
    /// Relative aggregate movement since the last scan baseline that reads
    /// as a workload shift, in either direction. Only this re-energizes the
    /// step schedule; smaller drift and wobble never do, so a pool that has
    /// settled stays settled.
    pub shift_frac: f64,
    /// Best-minus-worst score spread under which the pool is left untouched.
    pub equilibrium_eps: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// EMA factor moving the blend weight toward its dispersion target.
    pub alpha_smooth: f64,
    pub kappa_eps: f64,
    /// Momentum on the target-minus-current error. Zero disables the filter
    /// and velocity tracks the raw error exactly.
    pub beta_momentum: f64,
    /// Initial step gain; decays as eta0 / (1 + steps/tau).
    pub eta0: f64,
    pub step_decay_tau: f64,
    /// Per-tenant step cap as a fraction of the elastic pool (floor 1 page).
    pub max_step_frac: f64,
    /// Moves with aggregate L1 below this fraction of the elastic pool are
    /// dropped outright.
    pub gate_frac: f64,
    /// Bottom picks per active set: ceil(k_demand / this).
    pub bottom_share_divisor: usize,
    /// Hard ceiling on local cycles between scans.
    pub inactivity_cap: u64,
    /// Populations below this always scan globally.
    pub min_tenants_for_active_set: usize,
    /// Scores under this fraction of the set's best get no elastic share.
    pub zero_score_cutoff: f64,
    // Ablation switches.
    pub disable_v: bool,
    pub disable_h: bool,
    /// Score activity with the fast ops EMA instead of the slow one.
    pub fast_h: bool,
    pub disable_fixed_pool: bool,
    pub disable_active_set: bool,
}

impl Default for AuraParams {
    fn default() -> Self {
        AuraParams {
            signal: SignalParams::default(),
            k_max: 8,
            window: 5,
            conv_rel_eps: 0.01,
            shift_frac: 0.05,
            equilibrium_eps: 0.05,
            alpha_min: 0.3,
            alpha_max: 0.9,
            alpha_smooth: 0.2,
            kappa_eps: 1e-6,
            beta_momentum: 0.3,
            eta0: 1.0,
            step_decay_tau: 50.0,
            max_step_frac: 0.05,
            gate_frac: 0.01,
            bottom_share_divisor: 4,
            inactivity_cap: 100,
            min_tenants_for_active_set: 10,
            zero_score_cutoff: 0.05,
            disable_v: false,
            disable_h: false,
            fast_h: false,
            disable_fixed_pool: false,
            disable_active_set: false,
        }
    }
}

struct ScoreSet {
    /// Parallel to the evaluated ids.
    score: Vec<f64>,
    v_norm: Vec<f64>,
}

pub struct AuraPolicy {
    name: String,
    pub params: AuraParams,
    cfg_eff: PoolConfig,
    fixed: Vec<i64>,
    eff_lb: Vec<i64>,
    signals: Vec<TenantSignalState>,
    alpha: f64,
    active_set: Vec<usize>,
    improvements: ImprovementWindow,
    /// Set when some local cycle moved the aggregate by at least
    /// conv_rel_eps since the last scan; only then may window convergence
    /// trigger the next one.
    scan_armed: bool,
    /// Latched by aggregate movement of shift_frac or more: forces a scan
    /// on the next cycle without waiting for the window to settle.
    shift_detected: bool,
    last_aggregate: Option<f64>,
    /// Aggregate recorded by the most recent scan, the baseline slow drift
    /// is measured against.
    agg_at_scan: Option<f64>,
    cycles_since_scan: u64,
    steps_since_reset: f64,
    velocity: Vec<f64>,
    /// Latched by a scan that found the pool in equilibrium: local cycles
    /// keep watching signals but leave the plan alone until the next scan.
    halted: bool,
}

impl AuraPolicy {
    pub fn new(cfg: &PoolConfig, params: AuraParams) -> Result<Self, ConfigError> {
        Self::named("aura", cfg, params)
    }

    pub fn named(name: &str, cfg: &PoolConfig, params: AuraParams) -> Result<Self, ConfigError> {
        let cfg_eff = effective_config(cfg, &params);
        cfg_eff.validate()?;
        let fixed = cfg_eff.fixed_shares()?;
        let eff_lb = cfg_eff.effective_lower_bounds()?;
        let k = cfg_eff.tenant_count();
        Ok(AuraPolicy {
            name: name.to_string(),
            // Start leaning fully on activity: velocity carries no evidence
            // until pages have actually moved.
            alpha: params.alpha_max,
            improvements: ImprovementWindow::new(params.window),
            params,
            cfg_eff,
            fixed,
            eff_lb,
            signals: vec![TenantSignalState::default(); k],
            active_set: Vec::new(),
            scan_armed: false,
            shift_detected: false,
            last_aggregate: None,
            agg_at_scan: None,
            cycles_since_scan: 0,
            steps_since_reset: 0.0,
            velocity: vec![0.0; k],
            halted: false,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn active_set(&self) -> &[usize] {
        &self.active_set
    }

    pub fn eta(&self) -> f64 {
        self.params.eta0 / (1.0 + self.steps_since_reset / self.params.step_decay_tau)
    }

    /// Throughput-weighted hit rate summed over `ids`: the performance
    /// signal the convergence window and the shift detector watch.
    /// Deliberately independent of scores, so the policy's own reweighting
    /// and normalization cannot masquerade as workload change.
    fn performance_aggregate(&self, ids: &[usize]) -> f64 {
        ids.iter()
            .map(|&i| self.signals[i].ema_ops_slow * self.signals[i].ema_hr_slow)
            .sum()
    }

    /// Track aggregate movement both cycle-over-cycle and against the last
    /// scan's baseline. Movement of at least conv_rel_eps arms the next
    /// scan; movement of shift_frac or more reads as a workload shift,
    /// re-energizing the step schedule and forcing that scan immediately.
    /// Anything smaller never re-energizes: a pool settling into its target
    /// must end with the schedule cold, not hot. `push` feeds the
    /// convergence window on local cycles.
    fn note_aggregate(&mut self, agg: f64, push: bool) {
        let mut movement = 0.0f64;
        if let Some(base) = self.agg_at_scan {
            movement = ((agg - base) / base.abs().max(1e-12)).abs();
        }
        if let Some(prev) = self.last_aggregate {
            let rel = (agg - prev) / prev.abs().max(1e-12);
            movement = movement.max(rel.abs());
            if push {
                self.improvements.push(rel);
            }
        }
        if movement >= self.params.conv_rel_eps {
            self.scan_armed = true;
        }
        if movement >= self.params.shift_frac {
            self.shift_detected = true;
            self.steps_since_reset = 0.0;
        }
        self.last_aggregate = Some(agg);
    }

    /// Score the given tenants against each other. Normalization (activity
    /// min-max, velocity p90) is relative to exactly this set. The blend
    /// weight advances only on population-wide evaluations: dispersion
    /// inside the working set is a biased sample, because its members were
    /// picked precisely for moving together.
    fn compute_scores(&mut self, ids: &[usize], update_alpha: bool) -> ScoreSet {
        let states: Vec<&TenantSignalState> = ids.iter().map(|&i| &self.signals[i]).collect();
        let h = scoring::h_factor(&states, self.params.fast_h);
        let v_norm = scoring::v_factor(&states, &self.params.signal);
        if update_alpha && !self.params.disable_v && !self.params.disable_h {
            self.alpha = scoring::meta_alpha(&v_norm, self.alpha, &self.params);
        }
        let w = scoring::blend_weight(&self.params, self.alpha);
        let score = h
            .iter()
            .zip(&v_norm)
            .map(|(&h, &v)| scoring::score(h, v, w))
            .collect();
        ScoreSet { score, v_norm }
    }

    fn optimize(&mut self, current: &AllocationPlan, set: &ScoreSet, active: &[usize]) -> allocator::AllocatorOutcome {
        let eta = self.eta();
        allocator::optimize_in_active_set(
            current,
            active,
            &set.score,
            &mut self.velocity,
            eta,
            &self.cfg_eff,
            &self.fixed,
            &self.eff_lb,
            &self.params,
        )
    }

    /// One full decision: ingest observations, maybe rescan, reallocate.
    /// `current` must be the plan under which `obs` was measured.
    pub fn run_decision_cycle(
        &mut self,
        current: &AllocationPlan,
        obs: &[TenantObservation],
    ) -> Decision {
        let k = self.signals.len();
        assert_eq!(obs.len(), k, "observation count must match tenant count");
        for (s, o) in self.signals.iter_mut().zip(obs) {
            s.observe(o, &self.params.signal);
        }
        self.steps_since_reset += 1.0;

        let use_active_set =
            !self.params.disable_active_set && k >= self.params.min_tenants_for_active_set;
        let scan = !use_active_set
            || self.active_set.is_empty()
            || self.shift_detected
            || (self.scan_armed && self.improvements.converged(self.params.conv_rel_eps))
            || self.cycles_since_scan >= self.params.inactivity_cap;

        if scan {
            self.cycles_since_scan = 0;
            self.improvements.clear();
            self.scan_armed = false;
            self.shift_detected = false;

            let ids: Vec<usize> = (0..k).collect();
            let set = self.compute_scores(&ids, true);
            let ranked = ids.iter().map(|&id| RankedTenant {
                id,
                score: set.score[id],
            });
            let (top, bottom) = two_way_heap_filter(ranked, self.params.k_max);

            let meta = DecisionMeta {
                global_scan: true,
                touched: k as u32,
                scores: Some(set.score.clone()),
                v_norm: Some(set.v_norm.clone()),
            };

            let mut active = if use_active_set {
                let top_scores: Vec<f64> = top.iter().map(|r| r.score).collect();
                let k_demand = find_knee_point(&top_scores);
                compose_set(&top, &bottom, k_demand, self.params.bottom_share_divisor)
            } else {
                ids
            };
            // Membership is what matters; rank order inside the set is not.
            // Aggregates summed over different memberships are not
            // comparable, so a set change reseeds the movement tracker
            // rather than reading the jump as improvement or shift.
            active.sort_unstable();
            if active != self.active_set {
                self.last_aggregate = None;
            }
            self.active_set = active;

            // The scan consumes whatever drift accumulated since the last
            // one: the new membership's aggregate becomes the baseline.
            let agg = self.performance_aggregate(&self.active_set);
            self.agg_at_scan = Some(agg);
            self.note_aggregate(agg, false);

            self.halted = is_equilibrium(&top, &bottom, self.params.equilibrium_eps);
            if self.halted {
                // No exploitable spread between the growth and shrink
                // candidates: keep the plan, but leave the working set
                // installed so the pool stays on the local fast path.
                return Decision {
                    plan: current.clone(),
                    meta,
                };
            }

            let sub = ScoreSet {
                score: self.active_set.iter().map(|&id| set.score[id]).collect(),
                v_norm: self.active_set.iter().map(|&id| set.v_norm[id]).collect(),
            };
            let active = std::mem::take(&mut self.active_set);
            let out = self.optimize(current, &sub, &active);
            self.active_set = active;
            Decision {
                plan: out.plan,
                meta,
            }
        } else {
            self.cycles_since_scan += 1;
            let active = std::mem::take(&mut self.active_set);
            let set = self.compute_scores(&active, false);

            let mut scores = vec![f64::NAN; k];
            let mut v_norm = vec![f64::NAN; k];
            for (j, &id) in active.iter().enumerate() {
                scores[id] = set.score[j];
                v_norm[id] = set.v_norm[j];
            }
            let meta = DecisionMeta {
                global_scan: false,
                touched: active.len() as u32,
                scores: Some(scores),
                v_norm: Some(v_norm),
            };

            if self.halted {
                // Frozen between scans: signals and the convergence window
                // keep running so a workload shift can arm the next scan,
                // and the momentum filter keeps draining.
                let agg = self.performance_aggregate(&active);
                for v in self.velocity.iter_mut() {
                    *v *= 1.0 - self.params.beta_momentum;
                }
                self.active_set = active;
                self.note_aggregate(agg, true);
                return Decision {
                    plan: current.clone(),
                    meta,
                };
            }

            let out = self.optimize(current, &set, &active);
            let agg = self.performance_aggregate(&active);
            self.active_set = active;
            self.note_aggregate(agg, true);

            Decision {
                plan: out.plan,
                meta,
            }
        }
    }
}

fn effective_config(cfg: &PoolConfig, params: &AuraParams) -> PoolConfig {
    let mut cfg = cfg.clone();
    if params.disable_fixed_pool {
        cfg.fixed_pages = 0;
    }
    cfg
}

impl Policy for AuraPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&mut self, ctx: &PolicyContext) -> Decision {
        self.run_decision_cycle(ctx.current_plan, ctx.observations)
    }

    fn effective_config(&self, cfg: &PoolConfig) -> PoolConfig {
        effective_config(cfg, &self.params)
    }
}
