//! Policy construction by kind name, with JSON parameter payloads.

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::config::PolicySpec;
use super::RunnerError;
use crate::aura::{AuraParams, AuraPolicy};
use crate::baselines::{
    DynamicNeed, GlobalLruProxy, IndividualOpt, RegressionFit, SlaDriven, StaticPlan, UtilityGrid,
};
use crate::corepolicy::{OfwParams, OnlineFrankWolfe};
use crate::domain::PoolConfig;
use crate::policy::Policy;

pub const POLICY_KINDS: [&str; 16] = [
    "aura",
    "aura_reactive",
    "sam_core",
    "b1_static_average",
    "b2_fixed_priority",
    "b3_pure_elastic",
    "b4_individual_opt",
    "b5_global_lru_proxy",
    "b6_datasize_prop",
    "b7_dynamic_need",
    "b8_efficiency_only",
    "b9_reactive_h",
    "b10_potential_only",
    "b11_regression",
    "b12_sla_driven",
    "b13_ucp",
];

fn parse<T: DeserializeOwned + Default>(spec: &PolicySpec) -> Result<T, RunnerError> {
    if spec.params.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(spec.params.clone()).map_err(|e| RunnerError::BadPolicyParams {
        kind: spec.kind.clone(),
        detail: e.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(default)]
struct B4Params {
    hr_target: f64,
}
impl Default for B4Params {
    fn default() -> Self {
        B4Params { hr_target: 0.9 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct B6Params {
    /// Per-tenant data sizes; missing means equal sizes (even split).
    data_sizes: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(default)]
struct B7Params {
    lambda_fast: f64,
}
impl Default for B7Params {
    fn default() -> Self {
        B7Params { lambda_fast: 0.5 }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct B12Params {
    /// Per-tenant hit-rate targets; empty means 0.9 for everyone.
    targets: Vec<f64>,
}

fn aura_with(
    spec: &PolicySpec,
    cfg: &PoolConfig,
    name: &str,
    tweak: impl FnOnce(&mut AuraParams),
) -> Result<Box<dyn Policy>, RunnerError> {
    let mut params: AuraParams = parse(spec)?;
    tweak(&mut params);
    Ok(Box::new(AuraPolicy::named(name, cfg, params)?))
}

pub fn build_policy(spec: &PolicySpec, cfg: &PoolConfig) -> Result<Box<dyn Policy>, RunnerError> {
    let kind = spec.kind.to_ascii_lowercase();
    match kind.as_str() {
        "aura" => aura_with(spec, cfg, "aura", |_| {}),
        // Undamped ablation: raw error velocity, every move executed.
        "aura_reactive" => aura_with(spec, cfg, "aura_reactive", |p| {
            p.beta_momentum = 0.0;
            p.gate_frac = 0.0;
        }),
        "sam_core" => {
            let params: OfwParams = parse(spec)?;
            Ok(Box::new(OnlineFrankWolfe::new(cfg, params)?))
        }
        "b1_static_average" => Ok(Box::new(StaticPlan::even(cfg)?)),
        "b2_fixed_priority" => Ok(Box::new(StaticPlan::by_priority(cfg)?)),
        "b3_pure_elastic" => aura_with(spec, cfg, "b3_pure_elastic", |p| {
            p.disable_fixed_pool = true;
        }),
        "b4_individual_opt" => {
            let p: B4Params = parse(spec)?;
            Ok(Box::new(IndividualOpt::new(cfg, p.hr_target)?))
        }
        "b5_global_lru_proxy" => Ok(Box::new(GlobalLruProxy::new(cfg)?)),
        "b6_datasize_prop" => {
            let p: B6Params = parse(spec)?;
            let sizes = p
                .data_sizes
                .unwrap_or_else(|| vec![1.0; cfg.tenant_count()]);
            Ok(Box::new(StaticPlan::by_data_size(cfg, &sizes)?))
        }
        "b7_dynamic_need" => {
            let p: B7Params = parse(spec)?;
            Ok(Box::new(DynamicNeed::new(cfg, p.lambda_fast)?))
        }
        "b8_efficiency_only" => aura_with(spec, cfg, "b8_efficiency_only", |p| {
            p.disable_v = true;
        }),
        "b9_reactive_h" => aura_with(spec, cfg, "b9_reactive_h", |p| {
            p.fast_h = true;
        }),
        "b10_potential_only" => aura_with(spec, cfg, "b10_potential_only", |p| {
            p.disable_h = true;
        }),
        "b11_regression" => Ok(Box::new(RegressionFit::new(cfg)?)),
        "b12_sla_driven" => {
            let p: B12Params = parse(spec)?;
            Ok(Box::new(SlaDriven::new(cfg, p.targets)?))
        }
        "b13_ucp" => Ok(Box::new(UtilityGrid::new(cfg)?)),
        _ => Err(RunnerError::UnknownPolicy(spec.kind.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn cfg() -> PoolConfig {
        PoolConfig {
            total_pages: 256,
            fixed_pages: 64,
            base_priority: vec![2.0, 1.0, 1.0],
            lower_bounds: vec![4, 4, 4],
        }
    }

    #[test]
    fn every_kind_builds_with_default_params() {
        for kind in POLICY_KINDS {
            let p = build_policy(&PolicySpec::plain(kind), &cfg())
                .unwrap_or_else(|e| panic!("{kind}: {e}"));
            assert_eq!(p.name(), kind, "name should match the kind");
        }
    }

    #[test]
    fn unknown_kind_is_an_error() {
        assert!(matches!(
            build_policy(&PolicySpec::plain("b99"), &cfg()),
            Err(RunnerError::UnknownPolicy(_))
        ));
    }

    #[test]
    fn params_flow_through_to_the_policy() {
        let spec = PolicySpec {
            kind: "aura".into(),
            params: json!({"k_max": 3}),
        };
        let p = build_policy(&spec, &cfg()).unwrap();
        assert_eq!(p.name(), "aura");

        let bad = PolicySpec {
            kind: "aura".into(),
            params: json!({"k_max": "many"}),
        };
        assert!(matches!(
            build_policy(&bad, &cfg()),
            Err(RunnerError::BadPolicyParams { .. })
        ));
    }

    #[test]
    fn reactive_variant_disables_damping() {
        // Behavioral check: the reactive ablation must not gate small moves.
        let spec = PolicySpec {
            kind: "aura_reactive".into(),
            params: serde_json::Value::Null,
        };
        build_policy(&spec, &cfg()).unwrap();
    }

    #[test]
    fn b5_is_the_only_bounds_exempt_policy() {
        for kind in POLICY_KINDS {
            let p = build_policy(&PolicySpec::plain(kind), &cfg()).unwrap();
            assert_eq!(
                p.enforces_bounds(),
                kind != "b5_global_lru_proxy",
                "{kind}"
            );
        }
    }
}
