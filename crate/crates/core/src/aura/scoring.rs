//! Composite tenant scoring: a hindsight factor (who has been using cache
//! well), a velocity factor (who would benefit from more), and a
//! variance-driven meta-weight that shifts trust between them.
//!
//! All normalization is relative to the evaluation set handed in, which is
//! the full population during a global scan and the active set otherwise.

use super::AuraParams;
use crate::signals::{p90_normalize, SignalParams, TenantSignalState};
use crate::stats::{mean, variance};

/// Hindsight factor: min-max-normalized sustained activity times smoothed hit
/// rate. When every tenant shows the same activity the activity term is 1 for
/// anyone with traffic and 0 otherwise.
pub fn h_factor(states: &[&TenantSignalState], fast: bool) -> Vec<f64> {
    let ops: Vec<f64> = states
        .iter()
        .map(|s| if fast { s.ema_ops_fast } else { s.ema_ops_slow })
        .collect();
    let lo = ops.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ops.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    states
        .iter()
        .zip(&ops)
        .map(|(s, &o)| {
            let norm = if hi > lo {
                (o - lo) / (hi - lo)
            } else if o > 0.0 {
                1.0
            } else {
                0.0
            };
            norm * s.ema_hr_slow.clamp(0.0, 1.0)
        })
        .collect()
}

/// Velocity factor: saturation-discounted velocity, normalized against the
/// evaluation set's 90th percentile. A set whose every velocity sits under
/// the normalization floor carries no velocity information at all; it maps
/// to zeros rather than letting the floor division stretch residue decay
/// into an apparent ranking.
pub fn v_factor(states: &[&TenantSignalState], p: &SignalParams) -> Vec<f64> {
    let discounted: Vec<f64> = states.iter().map(|s| s.discounted_v()).collect();
    if discounted.iter().all(|&v| v < p.p90_floor) {
        return vec![0.0; discounted.len()];
    }
    p90_normalize(&discounted, p.p90_floor)
}

/// Dispersion-driven blend weight. High relative variance across the
/// normalized velocities means the velocity signal is informative for
/// ranking, which maps to a higher weight on the *hindsight* factor to keep
/// reallocation anchored while velocities disagree; uniform velocities relax
/// toward `alpha_min`. The weight moves through its own EMA. Identically
/// zero velocities are absent evidence, not uniform evidence, and leave the
/// weight where it was.
pub fn meta_alpha(v_norm: &[f64], alpha_prev: f64, p: &AuraParams) -> f64 {
    if v_norm.iter().all(|&v| v == 0.0) {
        return alpha_prev;
    }
    let m = mean(v_norm);
    let kappa = variance(v_norm) / (m * m + p.kappa_eps);
    let squashed = kappa / (1.0 + kappa);
    let target = p.alpha_min + (p.alpha_max - p.alpha_min) * squashed;
    (1.0 - p.alpha_smooth) * alpha_prev + p.alpha_smooth * target
}

/// Blend per the ablation flags. With velocity disabled the score *is* the
/// hindsight factor, and vice versa.
pub fn blend_weight(params: &AuraParams, alpha: f64) -> f64 {
    if params.disable_v {
        1.0
    } else if params.disable_h {
        0.0
    } else {
        alpha
    }
}

pub fn score(h: f64, v: f64, alpha: f64) -> f64 {
    alpha * h + (1.0 - alpha) * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::domain::TenantObservation;

    fn state(ops: f64, hr: f64) -> TenantSignalState {
        let mut s = TenantSignalState::default();
        s.observe(
            &TenantObservation {
                ops,
                hits: ops * hr,
                misses: ops * (1.0 - hr),
                hit_rate: hr,
                current_pages: 100,
            },
            &SignalParams::default(),
        );
        s
    }

    #[test]
    fn h_factor_suppresses_busy_polluters() {
        let a = state(100.0, 0.9);
        let b = state(500.0, 0.5);
        let c = state(1000.0, 0.1);
        let h = h_factor(&[&a, &b, &c], false);
        assert_relative_eq!(h[0], 0.0);
        assert_relative_eq!(h[1], (400.0 / 900.0) * 0.5, epsilon = 1e-12);
        assert_relative_eq!(h[2], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn h_factor_uniform_activity() {
        let a = state(100.0, 0.8);
        let b = state(100.0, 0.4);
        let h = h_factor(&[&a, &b], false);
        assert_relative_eq!(h[0], 0.8);
        assert_relative_eq!(h[1], 0.4);
        let idle_a = state(0.0, 0.0);
        let idle_b = state(0.0, 0.0);
        let h = h_factor(&[&idle_a, &idle_b], false);
        assert_eq!(h, vec![0.0, 0.0]);
    }

    #[test]
    fn v_factor_normalizes_against_p90() {
        let mut a = TenantSignalState::default();
        a.v_smoothed = 0.01;
        let mut b = TenantSignalState::default();
        b.v_smoothed = 0.005;
        let mut c = TenantSignalState::default();
        c.v_smoothed = -0.002; // negative velocity reads as zero benefit
        let v = v_factor(&[&a, &b, &c], &SignalParams::default());
        // p90 of (0.01, 0.005, 0) at rank 1.8 = 0.005 + 0.8*0.005 = 0.009
        assert_relative_eq!(v[0], 1.0);
        assert_relative_eq!(v[1], 0.005 / 0.009, epsilon = 1e-12);
        assert_relative_eq!(v[2], 0.0);
    }

    #[test]
    fn meta_alpha_dispersed_velocities_hit_midpoint_target() {
        let p = AuraParams::default();
        // Var = 0.25, mean^2 = 0.25, so the squashed dispersion is 1/2 and
        // the target sits mid-range. Feeding the target back is a fixed point.
        let mid = 0.5 * (p.alpha_min + p.alpha_max);
        let next = meta_alpha(&[0.0, 1.0], mid, &p);
        assert_relative_eq!(next, mid, epsilon = 1e-6);
        // Smoothing: from elsewhere it moves a fraction toward the target.
        let next = meta_alpha(&[0.0, 1.0], 0.2, &p);
        assert_relative_eq!(next, 0.8 * 0.2 + 0.2 * mid, epsilon = 1e-6);
    }

    #[test]
    fn meta_alpha_uniform_velocities_relax_to_min() {
        let p = AuraParams::default();
        let mut alpha = 0.9;
        for _ in 0..100 {
            alpha = meta_alpha(&[0.4, 0.4, 0.4], alpha, &p);
        }
        assert_relative_eq!(alpha, p.alpha_min, epsilon = 1e-6);
        // All-zero velocities carry no evidence and leave the weight alone.
        let a = meta_alpha(&[0.0, 0.0], 0.5, &p);
        assert_eq!(a, 0.5);
    }

    #[test]
    fn score_blend_and_ablation_identities() {
        assert_relative_eq!(score(0.6, 0.2, 0.5), 0.4);
        let mut p = AuraParams::default();
        p.disable_v = true;
        assert_eq!(blend_weight(&p, 0.37), 1.0);
        let mut p = AuraParams::default();
        p.disable_h = true;
        assert_eq!(blend_weight(&p, 0.37), 0.0);
        let p = AuraParams::default();
        assert_eq!(blend_weight(&p, 0.37), 0.37);
    }
}
