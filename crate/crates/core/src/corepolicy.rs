//! Gradient-based allocator built on online Frank-Wolfe over the shifted
//! simplex of feasible plans. Each cycle estimates the marginal throughput of
//! a page per tenant from recent observations, asks the linear oracle for the
//! best vertex (all slack on the strongest marginal), and moves the internal
//! iterate a decaying step toward it. When marginals carry no usable signal
//! the policy wiggles single pages instead so finite differences can form.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::domain::{project_to_feasible, AllocationPlan, ConfigError, PoolConfig};
use crate::policy::{Decision, DecisionMeta, Policy, PolicyContext};
use crate::stats::linear_fit;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OfwParams {
    /// EMA factor for the ops weight applied to hit-rate slopes.
    pub ops_lambda: f64,
    /// EMA factor smoothing per-tenant slope estimates. Raw window fits sit
    /// on spans of a few pages late in a run, where observation noise swamps
    /// the true marginals; the EMA trades lag for the variance reduction the
    /// vertex selection needs.
    pub slope_lambda: f64,
    /// Distinct page counts per tenant kept for slope estimation.
    pub history_depth: usize,
    /// Gradient spread below which the cycle is treated as stalled.
    pub grad_floor: f64,
}

impl Default for OfwParams {
    fn default() -> Self {
        OfwParams {
            ops_lambda: 0.2,
            slope_lambda: 0.04,
            history_depth: 6,
            grad_floor: 1e-9,
        }
    }
}

/// All slack on the coordinate with the largest gradient (ties to the lower
/// id), everyone else at their effective lower bound. This is the exact
/// maximizer of <g, v> over {v : v >= lb, sum v = total}.
pub fn lmo_vertex(gradient: &[f64], eff_lb: &[i64], total: i64) -> Vec<f64> {
    assert!(!gradient.is_empty());
    let mut best = 0usize;
    for (i, &g) in gradient.iter().enumerate() {
        if g > gradient[best] {
            best = i;
        }
    }
    let bound_sum: i64 = eff_lb.iter().sum();
    let slack = (total - bound_sum).max(0) as f64;
    let mut v: Vec<f64> = eff_lb.iter().map(|&b| b as f64).collect();
    v[best] += slack;
    v
}

pub struct OnlineFrankWolfe {
    name: String,
    pub params: OfwParams,
    cfg_eff: PoolConfig,
    eff_lb: Vec<i64>,
    /// Continuous iterate; the emitted plan is its feasible rounding.
    x: Vec<f64>,
    x_init: bool,
    /// Count of gradient steps taken, driving the 2/(t+2) schedule.
    t: u64,
    explore_step: u64,
    ops_ema: Vec<f64>,
    /// Recent (pages, hit_rate) per tenant, newest last, distinct pages only.
    hist: Vec<VecDeque<(i64, f64)>>,
    /// Smoothed hit-rate slope per tenant; NAN until a first fit lands.
    slope_ema: Vec<f64>,
    grad_norm_max: f64,
}

impl OnlineFrankWolfe {
    pub fn new(cfg: &PoolConfig, params: OfwParams) -> Result<Self, ConfigError> {
        Self::named("sam_core", cfg, params)
    }

    pub fn named(name: &str, cfg: &PoolConfig, params: OfwParams) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let eff_lb = cfg.effective_lower_bounds()?;
        let k = cfg.tenant_count();
        Ok(OnlineFrankWolfe {
            name: name.to_string(),
            params,
            cfg_eff: cfg.clone(),
            eff_lb,
            x: vec![0.0; k],
            x_init: false,
            t: 0,
            explore_step: 0,
            ops_ema: vec![0.0; k],
            hist: vec![VecDeque::new(); k],
            slope_ema: vec![f64::NAN; k],
            grad_norm_max: 0.0,
        })
    }

    /// Largest gradient magnitude seen so far; the G in the regret bound.
    pub fn grad_bound(&self) -> f64 {
        self.grad_norm_max
    }

    /// Euclidean diameter of the feasible region: the farthest two vertices
    /// differ by +/- slack in two coordinates.
    pub fn diameter(&self) -> f64 {
        let slack =
            (self.cfg_eff.total_pages - self.eff_lb.iter().sum::<i64>()).max(0) as f64;
        slack * 2f64.sqrt()
    }

    /// Sublinear part of the regret guarantee after `horizon` steps.
    pub fn regret_bound(&self, horizon: u64) -> f64 {
        self.grad_bound() * self.diameter() * (2.0 * horizon as f64).sqrt()
    }

    /// Ops-weighted hit-rate slope per tenant. Each cycle fits least squares
    /// over the distinct-pages window (a central difference when the points
    /// bracket the current allocation) and folds the result into a slope EMA;
    /// the gradient is the ops weight times that smoothed slope.
    fn update_gradient(&mut self) -> Vec<f64> {
        let lam = self.params.slope_lambda;
        for (h, ema) in self.hist.iter().zip(self.slope_ema.iter_mut()) {
            if h.len() < 2 {
                continue;
            }
            let xs: Vec<f64> = h.iter().map(|&(p, _)| p as f64).collect();
            let ys: Vec<f64> = h.iter().map(|&(_, hr)| hr).collect();
            if let Some(fit) = linear_fit(&xs, &ys) {
                *ema = if ema.is_nan() {
                    fit.slope
                } else {
                    (1.0 - lam) * *ema + lam * fit.slope
                };
            }
        }
        self.slope_ema
            .iter()
            .zip(&self.ops_ema)
            .map(|(&s, &w)| if s.is_nan() { 0.0 } else { w * s })
            .collect()
    }

    /// Move one page between two tenants, rotating the receiver and
    /// alternating direction so every tenant's page count gets exercised.
    /// Keeps the sum and bounds intact; returns the plan unchanged when no
    /// legal donor exists.
    fn explore(&mut self, current: &AllocationPlan) -> AllocationPlan {
        let k = current.pages.len();
        let mut plan = current.clone();
        let r = (self.explore_step % k as u64) as usize;
        let give = (self.explore_step / k as u64) % 2 == 0;
        self.explore_step += 1;

        let slack_of = |plan: &AllocationPlan, i: usize| plan.pages[i] - self.eff_lb[i];
        if give {
            // r receives one page from the deepest-slack donor.
            let donor = (0..k)
                .filter(|&i| i != r && slack_of(&plan, i) > 0)
                .max_by_key(|&i| (slack_of(&plan, i), std::cmp::Reverse(i)));
            if let Some(d) = donor {
                plan.pages[d] -= 1;
                plan.pages[r] += 1;
            }
        } else if slack_of(&plan, r) > 0 {
            // r donates one page to the lowest-slack receiver.
            let recv = (0..k)
                .filter(|&i| i != r)
                .min_by_key(|&i| (slack_of(&plan, i), i));
            if let Some(d) = recv {
                plan.pages[r] -= 1;
                plan.pages[d] += 1;
            }
        }
        plan
    }
}

impl Policy for OnlineFrankWolfe {
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&mut self, ctx: &PolicyContext) -> Decision {
        let k = self.x.len();
        if !self.x_init {
            for (x, &p) in self.x.iter_mut().zip(&ctx.current_plan.pages) {
                *x = p as f64;
            }
            self.x_init = true;
        }
        for (i, obs) in ctx.observations.iter().enumerate() {
            self.ops_ema[i] = if self.hist[i].is_empty() {
                obs.ops
            } else {
                (1.0 - self.params.ops_lambda) * self.ops_ema[i]
                    + self.params.ops_lambda * obs.ops
            };
            let h = &mut self.hist[i];
            match h.back_mut() {
                // Same page count again: refresh the sample in place so the
                // slope always uses the latest hit rate per page level.
                Some(last) if last.0 == obs.current_pages => last.1 = obs.hit_rate,
                _ => {
                    h.push_back((obs.current_pages, obs.hit_rate));
                    if h.len() > self.params.history_depth {
                        h.pop_front();
                    }
                }
            }
        }

        let g = self.update_gradient();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > self.grad_norm_max {
            self.grad_norm_max = norm;
        }
        let spread = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - g.iter().cloned().fold(f64::INFINITY, f64::min);

        let plan = if spread <= self.params.grad_floor {
            self.explore(ctx.current_plan)
        } else {
            let v = lmo_vertex(&g, &self.eff_lb, self.cfg_eff.total_pages);
            let eta = 2.0 / (self.t as f64 + 2.0);
            self.t += 1;
            for i in 0..k {
                self.x[i] += eta * (v[i] - self.x[i]);
            }
            let stepped = project_to_feasible(&self.x, &self.cfg_eff)
                .expect("iterate stays feasible for a validated config");
            if stepped.pages == ctx.current_plan.pages {
                // Iterate moved less than rounding resolution: wiggle a page
                // instead so fresh slope samples keep arriving at the park.
                self.explore(ctx.current_plan)
            } else {
                stepped
            }
        };
        Decision {
            plan,
            meta: DecisionMeta::full_scan(k),
        }
    }
}
