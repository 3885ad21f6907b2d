//! Budget-aware POMCP planning for adaptive sampling.
//!
//! A mobile sensing agent plans informative trajectories under a hard
//! rollout budget. The pieces:
//!
//! - [`belief`]: Gaussian-process belief over the sampled field with
//!   incremental Cholesky updates and cheap forking for simulation.
//! - [`env`]: workspaces, motion models, analytic and dataset-backed
//!   ground truths, and the real environment step.
//! - [`alloc`]: beta-curve schedules that spread the episode's rollout
//!   budget unevenly across planning steps.
//! - [`bandit`]: root-level exploration rules (UCT, UGapEb, Successive
//!   Rejects, UGapEc) plus the Welch test used for commitment.
//! - [`pomcp`]: the Monte Carlo tree search itself.
//! - [`commit`]: statistical extraction of multi-step plans from a tree.
//! - [`harness`]: seeded episodes, experiments, grid search, comparisons.

// `!(a < b)` guards deliberately treat NaN as a failure; the `a >= b`
// rewrite clippy suggests would silently accept it. Triangular index loops
// over packed Cholesky storage read clearer than iterator chains.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod alloc;
pub mod bandit;
pub mod belief;
pub mod commit;
pub mod env;
pub mod error;
pub mod harness;
pub mod numeric;
pub mod pomcp;

pub use alloc::{AllocationCurve, RolloutSchedule};
pub use bandit::{ArmStats, ExplorationConfig, Hardness};
pub use belief::{GPBelief, KernelParams, PosteriorStats};
pub use commit::{CommitmentKind, CommitmentPolicy, CommittedPlan, StopReason};
pub use env::{AgentState, GroundTruth, MotionAction, MotionModel, Workspace};
pub use error::{Error, Result};
pub use harness::{Environment, EnvironmentSpec, EpisodeLog, ExperimentConfig, RunSummary};
pub use pomcp::{Explorer, Planner, PlanningModel, SearchConfig, SearchTree};
