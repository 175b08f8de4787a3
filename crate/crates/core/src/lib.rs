//! Cache allocation policies for multi-tenant embedded databases, plus the
//! discrete-time simulation harness used to evaluate them.
//!
//! The crate is organized around a shared [`policy::Policy`] interface:
//!
//! * [`aura`] is the adaptive coordinator (hindsight/velocity scoring, an
//!   adaptive active set, and a momentum-damped allocator).
//! * [`corepolicy`] is the projection-free online convex optimizer the
//!   coordinator's allocator is grounded in.
//! * [`baselines`] holds the comparison policies (static splits, need-based
//!   heuristics, model-based forecasters, and ablations of the coordinator).
//! * [`oracle`] profiles workloads and solves the resulting multiple-choice
//!   knapsack for hindsight-optimal static plans.
//! * [`simenv`], [`signals`], [`analysis`], and [`runner`] provide the
//!   synthetic environment, per-tenant metric pipeline, trace metrics, and
//!   experiment driver / CLI plumbing.

pub mod analysis;
pub mod aura;
pub mod baselines;
pub mod corepolicy;
pub mod domain;
pub mod oracle;
pub mod policy;
pub mod runner;
pub mod signals;
pub mod simenv;
pub mod stats;
