//! Plan commitment: deciding how many actions to extract from a finished
//! search tree before replanning. The first action is always taken; deeper
//! actions are gated by a fixed count, a Welch t-test on the top two arms,
//! or the UGapEc fixed-confidence check.

use serde::{Deserialize, Serialize};

use crate::bandit::{self, ArmStats, ExplorationConfig, Hardness};
use crate::env::MotionAction;
use crate::pomcp::SearchTree;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
// no deny_unknown_fields: the internal tag is re-presented when this enum
// is flattened into CommitmentPolicy, which would trip the check
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommitmentKind {
    /// Baseline: one action per planning call.
    Single,
    /// Commit a fixed number of actions, no statistics consulted.
    FixedK { k: usize },
    /// Commit while the top-two Welch test stays below the p threshold.
    Welch { p_threshold: f64 },
    /// Commit while the UGapEc stopping condition holds.
    Ugapec { delta: f64, epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommitmentPolicy {
    #[serde(flatten)]
    pub kind: CommitmentKind,
    #[serde(default = "default_max_commit")]
    pub max_commit: usize,
}

fn default_max_commit() -> usize {
    5
}

impl CommitmentPolicy {
    pub fn single() -> Self {
        Self {
            kind: CommitmentKind::Single,
            max_commit: default_max_commit(),
        }
    }

    pub fn welch(p_threshold: f64) -> Self {
        Self {
            kind: CommitmentKind::Welch { p_threshold },
            max_commit: default_max_commit(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    FirstActionDefault,
    TestFailed,
    MissingBranch,
    CapReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommittedPlan {
    pub actions: Vec<MotionAction>,
    /// Per-level action indices, parallel to `actions`.
    pub action_indices: Vec<usize>,
    pub levels_tested: usize,
    pub stop_reason: StopReason,
}

/// True iff the two highest-mean arms with at least two pulls each are
/// distinguishable at the given p threshold. Thin arms are excluded; fewer
/// than two testable arms means no test and no commitment.
pub fn welch_commit_check(stats: &[ArmStats], p_threshold: f64) -> bool {
    let mut testable: Vec<&ArmStats> = stats.iter().filter(|s| s.count >= 2).collect();
    if testable.len() < 2 {
        return false;
    }
    testable.sort_by(|a, b| b.mean.partial_cmp(&a.mean).unwrap());
    let (t, v) = match bandit::welch_t(testable[0], testable[1]) {
        Ok(tv) => tv,
        Err(_) => return false,
    };
    bandit::welch_p(t, v) < p_threshold
}

/// UGapEc gate: false when any arm is unpulled, otherwise delegates to the
/// fixed-confidence stopping condition.
pub fn ugapec_commit_check(stats: &[ArmStats], delta: f64, epsilon: f64, b: f64) -> bool {
    if stats.len() < 2 || stats.iter().any(|s| s.count == 0) {
        return false;
    }
    let cfg = ExplorationConfig {
        budget_n: stats.iter().map(|s| s.count as usize).sum(),
        b,
        hardness: Hardness::Adaptive,
        delta,
        epsilon,
    };
    bandit::ugapec_confident(stats, &cfg).unwrap_or(false)
}

/// Extract a plan from a finished tree. The level-0 best action is always
/// committed; deeper levels descend through the committed action's
/// most-visited observation bin and are gated by the policy's test.
/// `range_multiplier` is the episode's running b, consumed by UGapEc.
pub fn extract_plan(tree: &SearchTree, policy: &CommitmentPolicy, range_multiplier: f64) -> CommittedPlan {
    let mut node = tree.root();
    let mut stats = tree.root_action_stats();
    let mut best = bandit::best_arm(&stats).expect("tree has root actions");
    let mut actions = vec![tree.decision(node).actions[best].clone()];
    let mut action_indices = vec![best];
    let mut levels_tested = 0;

    if policy.kind == CommitmentKind::Single {
        return CommittedPlan {
            actions,
            action_indices,
            levels_tested,
            stop_reason: StopReason::FirstActionDefault,
        };
    }

    let cap = match policy.kind {
        CommitmentKind::FixedK { k } => k.min(policy.max_commit),
        _ => policy.max_commit,
    };

    let stop_reason = loop {
        if actions.len() >= cap {
            break StopReason::CapReached;
        }
        let pass = match policy.kind {
            CommitmentKind::Single => unreachable!(),
            CommitmentKind::FixedK { .. } => true,
            CommitmentKind::Welch { p_threshold } => {
                levels_tested += 1;
                welch_commit_check(&stats, p_threshold)
            }
            CommitmentKind::Ugapec { delta, epsilon } => {
                levels_tested += 1;
                ugapec_commit_check(&stats, delta, epsilon, range_multiplier)
            }
        };
        if !pass {
            break StopReason::TestFailed;
        }
        let child = tree
            .most_visited_bin(node, best)
            .and_then(|bin| tree.descend(node, best, bin));
        let Some(next) = child else {
            break StopReason::MissingBranch;
        };
        node = next;
        stats = tree.action_stats(node);
        if stats.iter().all(|s| s.count == 0) {
            break StopReason::MissingBranch;
        }
        best = bandit::best_arm(&stats).expect("non-empty action set");
        actions.push(tree.decision(node).actions[best].clone());
        action_indices.push(best);
    };

    CommittedPlan {
        actions,
        action_indices,
        levels_tested,
        stop_reason,
    }
}
