//! Accessibility-aware cooperative 3D placement of UAV gateways.
//!
//! A set of UAVs relays delay-constrained tasks from ground users (GUs) to
//! geographically distributed computing nodes (CNs). Each UAV position shapes
//! which CNs can be reached within a task deadline; the crate evaluates those
//! accessible sets and searches for deployments that maximize
//!
//! ```text
//! F(Q) = alpha * Psi(Q) + beta * P_succ(Q) - gamma * Omega(Q)
//! ```
//!
//! where `Psi` is the unique accessible capacity, `P_succ` the task success
//! probability and `Omega` the average pairwise duplicated capacity.
//!
//! Modules, bottom-up:
//!
//! - [`scenario`]: world instances (users, nodes, region) and their generators.
//! - [`channel`]: air-to-ground link model, rates and latency components.
//! - [`accessibility`]: deployment evaluation and the feasibility predicate.
//! - [`analytic`]: two-UAV disk model (lens/union areas, expected capacity).
//! - [`optimizer`]: particle swarm initialization and beam-search refinement.
//! - [`baselines`]: Random, Fixed and Greedy comparison schemes.
//! - [`experiment`]: config files, sweeps and CSV output behind the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accessibility;
pub mod analytic;
pub mod baselines;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod scenario;
pub mod seeding;

pub use accessibility::{
    Deployment, DeploymentConstraints, EvaluationReport, Evaluator, Objective, UtilityWeights,
};
pub use channel::{ChannelParams, UavPosition};
pub use error::{Error, Result};
pub use scenario::{ComputingNode, GroundUser, Point2, Region, Scenario, Task};
