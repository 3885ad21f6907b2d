//! Multi-armed-bandit machinery shared by the search tree and the plan
//! commitment tests: running arm statistics, UCT selection, the UGapEb and
//! Successive Rejects fixed-budget identification rules, the UGapEc
//! fixed-confidence stopping check, and Welch's unequal-variance t-test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::reg_inc_beta;

/// Running sufficient statistics for one arm (Welford recurrence).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    pub count: u64,
    pub mean: f64,
    /// Sum of squared deviations from the running mean.
    pub m2: f64,
}

impl ArmStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: &[f64]) -> Self {
        let mut s = Self::new();
        for &x in samples {
            s.push(x);
        }
        s
    }

    pub fn push(&mut self, sample: f64) {
        self.count += 1;
        let delta = sample - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (sample - self.mean);
    }

    /// Unbiased sample variance; `None` until two samples exist.
    pub fn variance(&self) -> Option<f64> {
        if self.count < 2 {
            None
        } else {
            Some(self.m2 / (self.count - 1) as f64)
        }
    }
}

/// How the UGapEb hardness quantity is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Hardness {
    /// Plug-in estimate from the empirical gaps, recomputed at each call.
    Adaptive,
    Fixed(f64),
}

/// Parameters for the best-arm-identification rules.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExplorationConfig {
    /// Total root rollouts available to this planning call.
    pub budget_n: usize,
    /// Range multiplier on all confidence half-widths.
    pub b: f64,
    pub hardness: Hardness,
    /// Confidence level 1-delta for the fixed-confidence check.
    pub delta: f64,
    /// Gap tolerance for the fixed-confidence check.
    pub epsilon: f64,
}

impl ExplorationConfig {
    pub fn new(budget_n: usize, b: f64) -> Self {
        Self {
            budget_n,
            b,
            hardness: Hardness::Adaptive,
            delta: 0.05,
            epsilon: 0.0,
        }
    }
}

/// UCT: unvisited arms first (lowest index), then argmax of
/// mean + b * sqrt(ln(parent) / count). Ties break by fewer pulls, then
/// lower index.
pub fn uct_select(arms: &[ArmStats], parent_count: u64, b: f64) -> Result<usize> {
    if arms.is_empty() {
        return Err(Error::NoArms);
    }
    if let Some(idx) = arms.iter().position(|a| a.count == 0) {
        return Ok(idx);
    }
    let ln_parent = (parent_count.max(1) as f64).ln();
    let score = |a: &ArmStats| a.mean + b * (ln_parent / a.count as f64).sqrt();
    Ok(argmax_with_tiebreak(arms, score))
}

/// UGapEb arm-selection rule: pull whichever of the gap-minimizing candidate
/// and its strongest challenger carries the larger confidence half-width.
pub fn ugapeb_select(arms: &[ArmStats], cfg: &ExplorationConfig, _pulls_so_far: usize) -> Result<usize> {
    check_all_pulled(arms)?;
    if arms.len() == 1 {
        return Ok(0);
    }
    let k = arms.len();
    let hardness = match cfg.hardness {
        Hardness::Fixed(h) => h,
        Hardness::Adaptive => adaptive_hardness(arms, cfg.b),
    };
    let rate = (cfg.budget_n.saturating_sub(k)) as f64 / hardness.max(f64::MIN_POSITIVE);
    let beta: Vec<f64> = arms
        .iter()
        .map(|a| cfg.b * (rate / a.count as f64).sqrt())
        .collect();
    let gap_index = |i: usize| {
        let best_other = (0..k)
            .filter(|&j| j != i)
            .map(|j| arms[j].mean + beta[j])
            .fold(f64::NEG_INFINITY, f64::max);
        best_other - (arms[i].mean - beta[i])
    };
    // candidate: smallest gap index
    let candidate = argmin_idx(arms, gap_index);
    // challenger: largest upper bound among the rest
    let challenger = argmax_idx(arms, |i| {
        if i == candidate {
            f64::NEG_INFINITY
        } else {
            arms[i].mean + beta[i]
        }
    });
    let pick = if beta[candidate] > beta[challenger] {
        candidate
    } else if beta[challenger] > beta[candidate] {
        challenger
    } else if arms[candidate].count != arms[challenger].count {
        if arms[candidate].count < arms[challenger].count {
            candidate
        } else {
            challenger
        }
    } else {
        candidate.min(challenger)
    };
    Ok(pick)
}

// Hardness plug-in from empirical gaps, in the cited algorithm's b-scaled
// form: H = sum_i b^2 / max(gap_i, 0.01 b)^2. Keeps arm selection invariant
// under joint rescaling of rewards and b.
fn adaptive_hardness(arms: &[ArmStats], b: f64) -> f64 {
    let best = best_arm_unchecked(arms);
    let best_mean = arms[best].mean;
    let second = arms
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, a)| a.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = (0.01 * b).max(f64::MIN_POSITIVE);
    arms.iter()
        .enumerate()
        .map(|(i, a)| {
            let gap = if i == best {
                best_mean - second
            } else {
                best_mean - a.mean
            };
            let g = gap.max(floor);
            (b * b) / (g * g)
        })
        .sum()
}

/// Cumulative per-arm pull targets n_k for Successive Rejects, one per
/// elimination phase (K-1 of them).
pub fn sr_schedule(num_arms: usize, budget: usize) -> Result<Vec<usize>> {
    if num_arms < 2 {
        return Err(Error::Domain(format!("need at least 2 arms, got {num_arms}")));
    }
    if budget < num_arms {
        return Err(Error::InfeasibleBudget {
            budget,
            arms: num_arms,
        });
    }
    let log_bar: f64 = 0.5 + (2..=num_arms).map(|i| 1.0 / i as f64).sum::<f64>();
    let spare = (budget - num_arms) as f64;
    Ok((1..num_arms)
        .map(|k| (spare / (log_bar * (num_arms + 1 - k) as f64)).ceil() as usize)
        .collect())
}

#[derive(Debug, Clone)]
pub struct SuccessiveRejectsState {
    survivors: Vec<usize>,
    targets: Vec<usize>,
    phase: usize,
    cursor: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStep {
    Pull(usize),
    Finished(usize),
}

impl SuccessiveRejectsState {
    pub fn new(num_arms: usize, budget: usize) -> Result<Self> {
        let targets = sr_schedule(num_arms, budget)?;
        Ok(Self {
            survivors: (0..num_arms).collect(),
            targets,
            phase: 0,
            cursor: 0,
        })
    }

    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }

    /// A schedule whose first phase target is zero cannot drive any pulls;
    /// callers should fall back to a round-robin initialization instead.
    pub fn is_degenerate(&self) -> bool {
        self.targets.first().is_none_or(|&t| t == 0)
    }

    /// Next pull, or the surviving arm once K-1 eliminations have happened.
    /// Round-robin among survivors up to the phase target, then reject the
    /// survivor with the lowest mean (ties reject the higher index).
    pub fn next(&mut self, arms: &[ArmStats]) -> SrStep {
        loop {
            if self.survivors.len() == 1 {
                return SrStep::Finished(self.survivors[0]);
            }
            let target = self.targets[self.phase];
            let n = self.survivors.len();
            for offset in 0..n {
                let pos = (self.cursor + offset) % n;
                let arm = self.survivors[pos];
                if (arms[arm].count as usize) < target {
                    self.cursor = (pos + 1) % n;
                    return SrStep::Pull(arm);
                }
            }
            // phase complete: reject the weakest survivor
            let mut reject_pos = 0;
            for pos in 1..n {
                let (cur, best) = (
                    arms[self.survivors[pos]].mean,
                    arms[self.survivors[reject_pos]].mean,
                );
                if cur < best || (cur == best && self.survivors[pos] > self.survivors[reject_pos]) {
                    reject_pos = pos;
                }
            }
            self.survivors.remove(reject_pos);
            self.phase += 1;
            self.cursor = 0;
        }
    }
}

/// UGapEc fixed-confidence stopping condition: true iff the empirical best
/// arm's gap index drops to epsilon under the fixed-confidence half-widths.
pub fn ugapec_confident(arms: &[ArmStats], cfg: &ExplorationConfig) -> Result<bool> {
    check_all_pulled(arms)?;
    if arms.len() < 2 {
        return Err(Error::Domain("need at least 2 arms".into()));
    }
    let k = arms.len() as f64;
    let beta: Vec<f64> = arms
        .iter()
        .map(|a| {
            let n = a.count as f64;
            cfg.b * ((4.0 * k * n.powi(3) / cfg.delta).ln() / (2.0 * n)).sqrt()
        })
        .collect();
    let best = best_arm_unchecked(arms);
    let best_other = arms
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(i, a)| a.mean + beta[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let gap_best = best_other - (arms[best].mean - beta[best]);
    Ok(gap_best <= cfg.epsilon)
}

/// Welch's t statistic and the Welch-Satterthwaite degrees of freedom.
pub fn welch_t(a: &ArmStats, b: &ArmStats) -> Result<(f64, f64)> {
    for s in [a, b] {
        if s.count < 2 {
            return Err(Error::InsufficientSamples { count: s.count });
        }
    }
    let (va, vb) = (a.variance().unwrap(), b.variance().unwrap());
    let (na, nb) = (a.count as f64, b.count as f64);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        // both variances zero: degenerate by convention
        return if a.mean == b.mean {
            Ok((0.0, f64::MAX))
        } else if a.mean > b.mean {
            Ok((f64::INFINITY, f64::MAX))
        } else {
            Ok((f64::NEG_INFINITY, f64::MAX))
        };
    }
    let t = (a.mean - b.mean) / se2.sqrt();
    let v = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    Ok((t, v))
}

/// Two-tailed p-value for a t statistic with v degrees of freedom,
/// 2 * (1 - F_v(|t|)), via the regularized incomplete beta.
pub fn welch_p(t: f64, v: f64) -> f64 {
    assert!(v > 0.0, "degrees of freedom must be positive");
    if t.is_infinite() {
        return 0.0;
    }
    if t == 0.0 {
        return 1.0;
    }
    // beyond ~1e7 dof the t distribution is numerically normal; cap to keep
    // the continued fraction well behaved
    let v = v.min(1e7);
    reg_inc_beta(v / (v + t * t), v / 2.0, 0.5)
}

/// Empirical best arm: argmax of mean among pulled arms, ties to the lower
/// index; all-unpulled lists return index 0.
pub fn best_arm(arms: &[ArmStats]) -> Result<usize> {
    if arms.is_empty() {
        return Err(Error::NoArms);
    }
    Ok(best_arm_unchecked(arms))
}

fn best_arm_unchecked(arms: &[ArmStats]) -> usize {
    let mut best: Option<usize> = None;
    for (i, a) in arms.iter().enumerate() {
        if a.count == 0 {
            continue;
        }
        match best {
            Some(j) if arms[j].mean >= a.mean => {}
            _ => best = Some(i),
        }
    }
    best.unwrap_or(0)
}

fn check_all_pulled(arms: &[ArmStats]) -> Result<()> {
    if arms.is_empty() {
        return Err(Error::NoArms);
    }
    if let Some(idx) = arms.iter().position(|a| a.count == 0) {
        return Err(Error::UnpulledArm { index: idx });
    }
    Ok(())
}

fn argmax_with_tiebreak(arms: &[ArmStats], score: impl Fn(&ArmStats) -> f64) -> usize {
    let mut best = 0;
    let mut best_score = score(&arms[0]);
    for (i, a) in arms.iter().enumerate().skip(1) {
        let s = score(a);
        if s > best_score || (s == best_score && a.count < arms[best].count) {
            best = i;
            best_score = s;
        }
    }
    best
}

fn argmin_idx(arms: &[ArmStats], f: impl Fn(usize) -> f64) -> usize {
    select_idx(arms, f, |a, b| a < b)
}

fn argmax_idx(arms: &[ArmStats], f: impl Fn(usize) -> f64) -> usize {
    select_idx(arms, f, |a, b| a > b)
}

fn select_idx(arms: &[ArmStats], f: impl Fn(usize) -> f64, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    let mut best_val = f(0);
    for i in 1..arms.len() {
        let v = f(i);
        if better(v, best_val) || (v == best_val && arms[i].count < arms[best].count) {
            best = i;
            best_val = v;
        }
    }
    best
}
