//! Per-cycle reallocation inside the active set. Computes score-proportional
//! targets over the elastic budget, runs them through a momentum filter with
//! decaying step size, gates imperceptible moves, and projects the result
//! back onto the feasible set.

use super::AuraParams;
use crate::domain::{project_to_feasible, AllocationPlan, PoolConfig};

pub struct AllocatorOutcome {
    pub plan: AllocationPlan,
    /// True when the aggregate step fell under the hysteresis gate and the
    /// current plan was kept verbatim.
    pub gated: bool,
}

/// One reallocation step over `active` (sorted tenant ids) with `scores`
/// parallel to it. `velocity` and `current` span the full population;
/// non-active tenants keep their allocation and have their velocity decay
/// toward zero. `eta` is the decayed step gain for this cycle.
#[allow(clippy::too_many_arguments)]
pub fn optimize_in_active_set(
    current: &AllocationPlan,
    active: &[usize],
    scores: &[f64],
    velocity: &mut [f64],
    eta: f64,
    cfg: &PoolConfig,
    fixed: &[i64],
    eff_lb: &[i64],
    p: &AuraParams,
) -> AllocatorOutcome {
    debug_assert_eq!(active.len(), scores.len());
    let k = current.pages.len();
    let elastic_total = cfg.elastic_pages() as f64;

    // Elastic budget visible to this step: whatever the frozen (non-active)
    // tenants hold stays theirs.
    let mut frozen_elastic = 0.0;
    let mut is_active = vec![false; k];
    for &id in active {
        is_active[id] = true;
    }
    for i in 0..k {
        if !is_active[i] {
            frozen_elastic += (current.pages[i] - fixed[i]) as f64;
        }
    }
    let budget = (elastic_total - frozen_elastic).max(0.0);

    // Tenants scoring under a small fraction of the set's best are treated
    // as zero so pure noise cannot hold pages above the lower bound.
    let max_score = scores.iter().cloned().fold(0.0f64, f64::max);
    let cut = p.zero_score_cutoff * max_score;
    let effective: Vec<f64> = scores
        .iter()
        .map(|&s| if s > 0.0 && s >= cut { s } else { 0.0 })
        .collect();
    let mass: f64 = effective.iter().sum();

    let bound_sum: f64 = active.iter().map(|&id| (eff_lb[id] - fixed[id]) as f64).sum();
    let slack = (budget - bound_sum).max(0.0);

    let mut target = vec![0.0f64; k];
    for i in 0..k {
        target[i] = current.pages[i] as f64;
    }
    for (j, &id) in active.iter().enumerate() {
        let share = if mass > 0.0 {
            slack * effective[j] / mass
        } else {
            slack / active.len() as f64
        };
        target[id] = fixed[id] as f64 + (eff_lb[id] - fixed[id]) as f64 + share;
    }

    let max_step = (p.max_step_frac * elastic_total).max(1.0);
    let mut proposed = vec![0.0f64; k];
    let mut step_l1 = 0.0;
    for i in 0..k {
        let err = target[i] - current.pages[i] as f64;
        velocity[i] = if p.beta_momentum == 0.0 {
            // Momentum disabled: track the raw error directly.
            err
        } else {
            (1.0 - p.beta_momentum) * velocity[i] + p.beta_momentum * err
        };
        // Frozen tenants hold still no matter what momentum they carried
        // out of the set; it only drains (err is zero for them).
        let step = if is_active[i] {
            (eta * velocity[i]).clamp(-max_step, max_step)
        } else {
            0.0
        };
        step_l1 += step.abs();
        proposed[i] = current.pages[i] as f64 + step;
    }

    if step_l1 < p.gate_frac * elastic_total {
        return AllocatorOutcome {
            plan: current.clone(),
            gated: true,
        };
    }

    let plan = project_to_feasible(&proposed, cfg)
        .expect("allocator runs on a validated config");
    AllocatorOutcome {
        plan,
        gated: false,
    }
}
