//! Rollout budget allocation: turning an episode-wide rollout budget into a
//! per-step schedule, either split evenly or shaped by a cumulative beta
//! distribution, with a per-step floor of one rollout per action.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::reg_inc_beta;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(deny_unknown_fields)]
pub enum AllocationCurve {
    Fixed,
    Beta { alpha: f64, beta: f64 },
}

impl AllocationCurve {
    pub fn beta(alpha: f64, beta: f64) -> Self {
        AllocationCurve::Beta { alpha, beta }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutSchedule {
    pub per_step: Vec<usize>,
    pub nominal_budget: usize,
    pub floor: usize,
}

impl RolloutSchedule {
    pub fn realized_total(&self) -> usize {
        self.per_step.iter().sum()
    }
}

/// Regularized incomplete beta I_x(alpha, beta) as the Beta CDF.
pub fn beta_cdf(x: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("beta_cdf x={x} outside [0,1]")));
    }
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(Error::Domain(format!(
            "beta_cdf parameters must be positive (alpha={alpha}, beta={beta})"
        )));
    }
    Ok(reg_inc_beta(x, alpha, beta))
}

/// Divide `budget` rollouts over `steps` environment steps.
///
/// Fixed curves split evenly, spreading the remainder one per step from the
/// final step backwards. Beta curves take CDF increments over uniform step
/// intervals, round by largest remainder so the rounded values sum to the
/// budget exactly, then clamp each entry up to `floor`. Clamping may push
/// the realized total above the budget; no renormalization is applied.
pub fn build_schedule(
    curve: AllocationCurve,
    budget: usize,
    steps: usize,
    floor: usize,
) -> Result<RolloutSchedule> {
    if steps < 1 {
        return Err(Error::Domain("schedule needs at least one step".into()));
    }
    if floor < 1 {
        return Err(Error::Domain("per-step floor must be at least 1".into()));
    }
    if budget < steps {
        return Err(Error::InfeasibleBudget { budget, arms: steps });
    }
    let per_step = match curve {
        AllocationCurve::Fixed => {
            let base = budget / steps;
            let remainder = budget % steps;
            (0..steps)
                .map(|i| base + usize::from(i >= steps - remainder))
                .collect::<Vec<_>>()
        }
        AllocationCurve::Beta { alpha, beta } => {
            let t = steps as f64;
            let raw: Vec<f64> = (1..=steps)
                .map(|i| {
                    let hi = beta_cdf(i as f64 / t, alpha, beta)?;
                    let lo = beta_cdf((i - 1) as f64 / t, alpha, beta)?;
                    Ok(budget as f64 * (hi - lo))
                })
                .collect::<Result<_>>()?;
            largest_remainder_round(&raw, budget)
        }
    };
    let per_step = per_step.into_iter().map(|n| n.max(floor)).collect();
    Ok(RolloutSchedule {
        per_step,
        nominal_budget: budget,
        floor,
    })
}

/// Round non-negative reals to integers summing exactly to `total`: floor
/// everything, then hand out the shortfall to the largest fractional parts
/// (ties to the later step, which keeps monotone inputs monotone).
pub fn largest_remainder_round(raw: &[f64], total: usize) -> Vec<usize> {
    let mut rounded: Vec<usize> = raw.iter().map(|&r| r.max(0.0) as usize).collect();
    let assigned: usize = rounded.iter().sum();
    let shortfall = total.saturating_sub(assigned);
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(b.cmp(&a))
    });
    for &i in order.iter().take(shortfall.min(raw.len())) {
        rounded[i] += 1;
    }
    // shortfall can exceed len when raw sums far below total; loop until spent
    let mut remaining = shortfall.saturating_sub(raw.len());
    while remaining > 0 {
        for &i in order.iter().take(remaining.min(raw.len())) {
            rounded[i] += 1;
        }
        remaining = remaining.saturating_sub(raw.len());
    }
    rounded
}

/// The 7x7 grid of beta curves searched over, alpha as the outer loop.
pub fn grid_candidates() -> Vec<AllocationCurve> {
    const VALUES: [f64; 7] = [0.75, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    VALUES
        .iter()
        .flat_map(|&alpha| VALUES.iter().map(move |&beta| AllocationCurve::beta(alpha, beta)))
        .collect()
}
