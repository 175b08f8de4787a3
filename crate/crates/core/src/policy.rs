//! The interface every allocation policy implements, plus the handful of
//! bookkeeping types the experiment driver records per decision.

use crate::domain::{
    apportion, AllocationPlan, ConfigError, PoolConfig, TenantObservation,
};

/// Everything a policy may look at when deciding the next plan.
pub struct PolicyContext<'a> {
    /// Cycle index of the observations being reacted to (0-based).
    pub cycle: u64,
    pub cfg: &'a PoolConfig,
    /// Plan that was in effect while `observations` were produced.
    pub current_plan: &'a AllocationPlan,
    pub observations: &'a [TenantObservation],
}

/// Work accounting and introspection for one decision.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMeta {
    /// Whether this cycle evaluated the full tenant population.
    pub global_scan: bool,
    /// Tenants the decision phase actually scored or optimized.
    pub touched: u32,
    /// Composite scores, NaN for tenants outside the evaluation set.
    pub scores: Option<Vec<f64>>,
    /// Normalized velocity factors, NaN outside the evaluation set.
    pub v_norm: Option<Vec<f64>>,
}

impl DecisionMeta {
    pub fn full_scan(touched: usize) -> Self {
        DecisionMeta {
            global_scan: true,
            touched: touched as u32,
            scores: None,
            v_norm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub plan: AllocationPlan,
    pub meta: DecisionMeta,
}

pub trait Policy: Send {
    fn name(&self) -> &str;

    fn decide(&mut self, ctx: &PolicyContext) -> Decision;

    /// The pool constraints this policy promises to honor. Ablations that
    /// deliberately drop a mechanism (for example the fixed pool) override
    /// this so their plans are judged against the envelope they actually
    /// enforce.
    fn effective_config(&self, cfg: &PoolConfig) -> PoolConfig {
        cfg.clone()
    }

    /// False only for policies that ignore floors by design.
    fn enforces_bounds(&self) -> bool {
        true
    }
}

/// Neutral starting plan: fixed shares plus an even elastic split, adjusted
/// for lower bounds. Every run starts here so policies are comparable.
pub fn initial_plan(cfg: &PoolConfig) -> Result<AllocationPlan, ConfigError> {
    let shares = cfg.fixed_shares()?;
    let even = apportion(cfg.elastic_pages(), &vec![1.0; cfg.tenant_count()])?;
    let raw: Vec<f64> = shares
        .iter()
        .zip(&even)
        .map(|(&f, &e)| (f + e) as f64)
        .collect();
    crate::domain::project_to_feasible(&raw, cfg)
}
