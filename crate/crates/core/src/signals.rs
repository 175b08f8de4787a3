//! Per-tenant metric pipeline: activity and hit-rate EMAs, the smoothed
//! allocation-sensitivity estimate ("velocity"), and a saturation-confidence
//! gate that discounts velocity once extra pages stop buying hit rate.
//!
//! Update order within one cycle matters and is fixed by
//! [`TenantSignalState::observe`]: the raw velocity sample is taken against
//! the previous cycle's pages and hit rate, EMAs roll forward, saturation
//! confidence reacts to the smoothed hit-rate delta, then the velocity EMA
//! absorbs the sample.

use crate::domain::TenantObservation;
use crate::stats::percentile_linear;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalParams {
    /// Slow EMA weight for ops and hit rate.
    pub lambda_slow: f64,
    /// Fast EMA weight for ops.
    pub lambda_fast: f64,
    /// Velocity EMA weight when the raw sample exceeds the current estimate.
    pub v_up_rate: f64,
    /// Velocity EMA weight when the raw sample is below the current estimate.
    pub v_down_rate: f64,
    /// Minimum page movement for a velocity sample. Spans below this carry
    /// more observation noise than signal (a 1-page delta divides the full
    /// hit-rate jitter), so they read as no information.
    pub v_min_pages: i64,
    /// Smoothed hit-rate delta under which page growth counts as saturated.
    pub sat_delta_hr_eps: f64,
    /// Multiplicative confidence decay on a saturated step.
    pub sat_decay: f64,
    /// Recovery rate toward full confidence otherwise.
    pub sat_recover: f64,
    /// Denominator floor for p90 normalization.
    pub p90_floor: f64,
}

impl Default for SignalParams {
    fn default() -> Self {
        SignalParams {
            lambda_slow: 0.1,
            lambda_fast: 0.5,
            v_up_rate: 0.4,
            v_down_rate: 0.1,
            v_min_pages: 4,
            sat_delta_hr_eps: 0.002,
            sat_decay: 0.8,
            sat_recover: 0.1,
            p90_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TenantSignalState {
    pub ema_ops_slow: f64,
    pub ema_ops_fast: f64,
    pub ema_hr_slow: f64,
    pub v_smoothed: f64,
    pub saturation_confidence: f64,
    pub last_pages: i64,
    pub last_hr: f64,
    initialized: bool,
}

impl Default for TenantSignalState {
    fn default() -> Self {
        TenantSignalState {
            ema_ops_slow: 0.0,
            ema_ops_fast: 0.0,
            ema_hr_slow: 0.0,
            v_smoothed: 0.0,
            saturation_confidence: 1.0,
            last_pages: 0,
            last_hr: 0.0,
            initialized: false,
        }
    }
}

fn ema(prev: f64, x: f64, lambda: f64) -> f64 {
    (1.0 - lambda) * prev + lambda * x
}

impl TenantSignalState {
    /// Roll the ops and hit-rate EMAs forward. The first observation seeds
    /// them directly so there is no zero bias at startup.
    pub fn update_emas(&mut self, obs: &TenantObservation, p: &SignalParams) {
        if !self.initialized {
            self.ema_ops_slow = obs.ops;
            self.ema_ops_fast = obs.ops;
            self.ema_hr_slow = obs.hit_rate;
            return;
        }
        self.ema_ops_slow = ema(self.ema_ops_slow, obs.ops, p.lambda_slow);
        self.ema_ops_fast = ema(self.ema_ops_fast, obs.ops, p.lambda_fast);
        self.ema_hr_slow = ema(self.ema_hr_slow, obs.hit_rate, p.lambda_slow);
    }

    /// Raw hit-rate-per-page sample against the previous cycle. Movement
    /// below `v_min_pages` means no new slope information (the quotient would
    /// be dominated by hit-rate jitter), which reads as 0 and lets the
    /// velocity EMA carry the memory.
    pub fn raw_v(&self, obs: &TenantObservation, p: &SignalParams) -> f64 {
        let dpages = obs.current_pages - self.last_pages;
        if dpages.abs() < p.v_min_pages.max(1) {
            0.0
        } else {
            (obs.hit_rate - self.last_hr) / dpages as f64
        }
    }

    /// Asymmetric EMA: rising evidence is absorbed quickly, fading evidence
    /// drains slowly.
    pub fn smooth_v(&mut self, raw: f64, p: &SignalParams) {
        let rate = if raw > self.v_smoothed {
            p.v_up_rate
        } else {
            p.v_down_rate
        };
        self.v_smoothed = ema(self.v_smoothed, raw, rate);
    }

    /// Decay confidence when page growth produced no hit-rate movement,
    /// recover it otherwise. Result stays in [0, 1].
    pub fn update_saturation_confidence(
        &mut self,
        pages_increased: bool,
        delta_hr: f64,
        p: &SignalParams,
    ) {
        if pages_increased && delta_hr.abs() < p.sat_delta_hr_eps {
            self.saturation_confidence *= p.sat_decay;
        } else {
            self.saturation_confidence += p.sat_recover * (1.0 - self.saturation_confidence);
        }
        self.saturation_confidence = self.saturation_confidence.clamp(0.0, 1.0);
    }

    /// Full per-cycle update in canonical order.
    pub fn observe(&mut self, obs: &TenantObservation, p: &SignalParams) {
        if !self.initialized {
            self.update_emas(obs, p);
            self.last_pages = obs.current_pages;
            self.last_hr = obs.hit_rate;
            self.initialized = true;
            return;
        }
        let raw = self.raw_v(obs, p);
        let pages_increased = obs.current_pages > self.last_pages;
        let prev_hr_ema = self.ema_hr_slow;
        self.update_emas(obs, p);
        self.update_saturation_confidence(pages_increased, self.ema_hr_slow - prev_hr_ema, p);
        self.smooth_v(raw, p);
        self.last_pages = obs.current_pages;
        self.last_hr = obs.hit_rate;
    }

    /// Velocity after the saturation discount; the raw material for the
    /// normalized velocity factor.
    pub fn discounted_v(&self) -> f64 {
        self.v_smoothed * self.saturation_confidence
    }
}

/// Normalize values against the 90th percentile of their positive parts:
/// `clamp(max(v, 0) / max(p90, floor), 0, 1)`.
pub fn p90_normalize(values: &[f64], floor: f64) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let positives: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let denom = percentile_linear(&positives, 0.9).max(floor);
    positives.iter().map(|v| (v / denom).clamp(0.0, 1.0)).collect()
}
