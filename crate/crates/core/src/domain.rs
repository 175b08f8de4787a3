//! Pool configuration, allocation plans, and the integer budget arithmetic
//! every policy goes through: fixed-pool apportionment, plan validation, and
//! projection of fractional proposals onto the feasible integer set.
//!
//! Feasibility for a plan means: pages are non-negative integers, they sum to
//! exactly `total_pages`, and every tenant holds at least its effective lower
//! bound `max(lower_bound_i, fixed_share_i)`. Lower bounds constrain the
//! tenant's *total* allocation, so the fixed share counts toward them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tenants are dense indices into the configuration order. Tie-breaks
/// throughout the crate resolve toward the lower id.
pub type TenantId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    /// Total cache budget in pages.
    pub total_pages: i64,
    /// Pages reserved for the priority-apportioned fixed pool.
    pub fixed_pages: i64,
    /// Non-negative weights for fixed-pool apportionment, one per tenant.
    pub base_priority: Vec<f64>,
    /// Hard per-tenant floors on total allocation, one per tenant.
    pub lower_bounds: Vec<i64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("priority and lower-bound vectors must have the same non-zero length")]
    BadShape,
    #[error("pages must be non-negative (total {total}, fixed {fixed})")]
    NegativePages { total: i64, fixed: i64 },
    #[error("fixed pool ({fixed}) exceeds total pages ({total})")]
    FixedExceedsTotal { fixed: i64, total: i64 },
    #[error("priorities must be finite and non-negative")]
    BadPriority,
    #[error("fixed pool is non-empty but all priorities are zero")]
    ZeroPriorityMass,
    #[error("lower bound must be non-negative (tenant {tenant})")]
    NegativeLowerBound { tenant: TenantId },
    #[error("effective lower bounds need {required} pages but only {total} exist")]
    InfeasibleBounds { required: i64, total: i64 },
}

impl PoolConfig {
    pub fn tenant_count(&self) -> usize {
        self.base_priority.len()
    }

    /// Pages outside the fixed pool, redistributed freely by policies.
    pub fn elastic_pages(&self) -> i64 {
        self.total_pages - self.fixed_pages
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.base_priority.is_empty() || self.base_priority.len() != self.lower_bounds.len() {
            return Err(ConfigError::BadShape);
        }
        if self.total_pages < 0 || self.fixed_pages < 0 {
            return Err(ConfigError::NegativePages {
                total: self.total_pages,
                fixed: self.fixed_pages,
            });
        }
        if self.fixed_pages > self.total_pages {
            return Err(ConfigError::FixedExceedsTotal {
                fixed: self.fixed_pages,
                total: self.total_pages,
            });
        }
        if self
            .base_priority
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0)
        {
            return Err(ConfigError::BadPriority);
        }
        if let Some(tenant) = self.lower_bounds.iter().position(|&b| b < 0) {
            return Err(ConfigError::NegativeLowerBound { tenant });
        }
        let lb = self.effective_lower_bounds()?;
        let required: i64 = lb.iter().sum();
        if required > self.total_pages {
            return Err(ConfigError::InfeasibleBounds {
                required,
                total: self.total_pages,
            });
        }
        Ok(())
    }

    /// Per-tenant fixed share from [`apportion_fixed_pool`].
    pub fn fixed_shares(&self) -> Result<Vec<i64>, ConfigError> {
        apportion_fixed_pool(self)
    }

    /// `max(lower_bound_i, fixed_share_i)` per tenant.
    pub fn effective_lower_bounds(&self) -> Result<Vec<i64>, ConfigError> {
        let shares = self.fixed_shares()?;
        Ok(self
            .lower_bounds
            .iter()
            .zip(&shares)
            .map(|(&l, &f)| l.max(f))
            .collect())
    }
}

/// A full integer allocation, one page count per tenant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationPlan {
    pub pages: Vec<i64>,
}

impl AllocationPlan {
    pub fn total(&self) -> i64 {
        self.pages.iter().sum()
    }

    /// L1 distance to another plan, the per-cycle churn measure.
    pub fn l1_distance(&self, other: &AllocationPlan) -> i64 {
        self.pages
            .iter()
            .zip(&other.pages)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// What one tenant reported for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TenantObservation {
    pub ops: f64,
    pub hits: f64,
    pub misses: f64,
    /// hits / (hits + misses), or 0 when the tenant saw no traffic.
    pub hit_rate: f64,
    /// Pages the tenant held while producing this observation.
    pub current_pages: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    SumMismatch { expected: i64, actual: i64 },
    NegativePages { tenant: TenantId, pages: i64 },
    BelowLowerBound { tenant: TenantId, pages: i64, bound: i64 },
    WrongLength { expected: usize, actual: usize },
}

/// Split the fixed pool proportionally to `base_priority`: integer floors
/// first, then leftover pages one at a time in descending priority order
/// (ties toward the lower tenant id).
pub fn apportion_fixed_pool(cfg: &PoolConfig) -> Result<Vec<i64>, ConfigError> {
    if cfg.fixed_pages == 0 {
        return Ok(vec![0; cfg.tenant_count()]);
    }
    apportion(cfg.fixed_pages, &cfg.base_priority)
}

/// Largest-remainder-style split of `amount` pages proportional to `weights`.
/// Exact: shares always sum to `amount`.
pub fn apportion(amount: i64, weights: &[f64]) -> Result<Vec<i64>, ConfigError> {
    if weights.is_empty() {
        return Err(ConfigError::BadShape);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(ConfigError::BadPriority);
    }
    let mass: f64 = weights.iter().sum();
    if amount == 0 {
        return Ok(vec![0; weights.len()]);
    }
    if mass <= 0.0 {
        return Err(ConfigError::ZeroPriorityMass);
    }
    let mut shares: Vec<i64> = weights
        .iter()
        .map(|w| ((amount as f64) * w / mass).floor() as i64)
        .collect();
    let mut leftover = amount - shares.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        weights[b]
            .partial_cmp(&weights[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut cursor = 0;
    while leftover > 0 {
        shares[order[cursor % order.len()]] += 1;
        leftover -= 1;
        cursor += 1;
    }
    Ok(shares)
}

/// Check a plan against the config. Empty report means feasible.
pub fn validate_plan(plan: &AllocationPlan, cfg: &PoolConfig) -> Result<Vec<Violation>, ConfigError> {
    let mut out = Vec::new();
    if plan.pages.len() != cfg.tenant_count() {
        out.push(Violation::WrongLength {
            expected: cfg.tenant_count(),
            actual: plan.pages.len(),
        });
        return Ok(out);
    }
    let bounds = cfg.effective_lower_bounds()?;
    let actual = plan.total();
    if actual != cfg.total_pages {
        out.push(Violation::SumMismatch {
            expected: cfg.total_pages,
            actual,
        });
    }
    for (tenant, (&pages, &bound)) in plan.pages.iter().zip(&bounds).enumerate() {
        if pages < 0 {
            out.push(Violation::NegativePages { tenant, pages });
        }
        if pages < bound {
            out.push(Violation::BelowLowerBound {
                tenant,
                pages,
                bound,
            });
        }
    }
    Ok(out)
}

/// Project a fractional proposal onto the feasible integer set.
///
/// Each coordinate is clamped up to its effective lower bound, the slack above
/// the bounds is rescaled so the budget is exhausted exactly, and the result
/// is floored with leftover pages handed out in descending fractional-part
/// order (ties toward the lower tenant id). Already-feasible integral input
/// comes back unchanged. Non-finite coordinates are treated as sitting at the
/// bound.
pub fn project_to_feasible(raw: &[f64], cfg: &PoolConfig) -> Result<AllocationPlan, ConfigError> {
    if raw.len() != cfg.tenant_count() {
        return Err(ConfigError::BadShape);
    }
    let bounds = cfg.effective_lower_bounds()?;
    let required: i64 = bounds.iter().sum();
    if required > cfg.total_pages {
        return Err(ConfigError::InfeasibleBounds {
            required,
            total: cfg.total_pages,
        });
    }
    let budget_slack = (cfg.total_pages - required) as f64;

    let clamped: Vec<f64> = raw
        .iter()
        .zip(&bounds)
        .map(|(&r, &b)| (b as f64).max(r.min(1e18)))
        .collect();
    let slack: Vec<f64> = clamped
        .iter()
        .zip(&bounds)
        .map(|(&c, &b)| c - b as f64)
        .collect();
    let slack_mass: f64 = slack.iter().sum();

    let mut target: Vec<f64> = bounds.iter().map(|&b| b as f64).collect();
    if slack_mass > 0.0 {
        for i in 0..target.len() {
            target[i] += slack[i] * budget_slack / slack_mass;
        }
    } else if budget_slack > 0.0 {
        // Nothing exceeded its bound; park all slack on the largest raw ask.
        let mut best = 0;
        for i in 1..raw.len() {
            if raw[i].partial_cmp(&raw[best]) == Some(std::cmp::Ordering::Greater) {
                best = i;
            }
        }
        target[best] += budget_slack;
    }

    let mut pages: Vec<i64> = target.iter().map(|t| t.floor() as i64).collect();
    for i in 0..pages.len() {
        pages[i] = pages[i].max(bounds[i]);
    }

    // Hand out the flooring remainder by descending fractional part.
    let mut order: Vec<usize> = (0..pages.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = target[a] - target[a].floor();
        let fb = target[b] - target[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    let mut leftover = cfg.total_pages - pages.iter().sum::<i64>();
    let mut cursor = 0;
    while leftover > 0 {
        pages[order[cursor % order.len()]] += 1;
        leftover -= 1;
        cursor += 1;
    }
    // Float-edge guard: if flooring overshot, pull pages back from tenants
    // with room above their bound.
    while leftover < 0 {
        let donor = (0..pages.len())
            .filter(|&i| pages[i] > bounds[i])
            .max_by_key(|&i| pages[i] - bounds[i])
            .expect("budget below the sum of lower bounds");
        pages[donor] -= 1;
        leftover += 1;
    }

    Ok(AllocationPlan { pages })
}
