//! Experiment orchestration: config parsing, seeded episode runs, the
//! allocation-curve grid search, baseline-vs-proposed comparisons, and CSV
//! emission.

use std::collections::VecDeque;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alloc::{build_schedule, grid_candidates, AllocationCurve};
use crate::belief::{objective_reward, GPBelief, KernelParams};
use crate::commit::{extract_plan, CommitmentPolicy};
use crate::env::{
    env_step, load_grid_dataset, AgentState, GroundTruth, MotionAction, MotionModel, Workspace,
};
use crate::error::{Error, Result};
use crate::pomcp::{Explorer, Planner, PlanningModel, SearchConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(deny_unknown_fields)]
pub enum EnvironmentSpec {
    /// The analytic dynamic function over [0,5]^2.
    Dynamic {
        #[serde(default = "default_grid_resolution")]
        grid_resolution: f64,
    },
    /// A static dataset ingested from CSV and interpolated by a GP.
    GridDataset {
        path: String,
        #[serde(default = "default_travel_step")]
        step: f64,
    },
}

fn default_grid_resolution() -> f64 {
    0.25
}

fn default_travel_step() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentSpec,
    /// Environment steps per episode.
    #[serde(rename = "T", default = "default_steps")]
    pub steps: usize,
    /// Objective weight in mu + c * sigma.
    pub c: f64,
    pub total_budget: usize,
    pub curve: AllocationCurve,
    pub explorer: Explorer,
    pub commitment: CommitmentPolicy,
    #[serde(default)]
    pub search: SearchConfig,
    pub kernel: KernelParams,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Std of Gaussian noise on real observations (0 reads the truth).
    #[serde(default)]
    pub observation_noise_std: f64,
}

fn default_steps() -> usize {
    200
}

fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must be non-empty".into()));
        }
        if self.steps < 1 {
            return Err(Error::Config("T must be at least 1".into()));
        }
        if self.total_budget < self.steps {
            return Err(Error::Config(format!(
                "total_budget {} cannot cover {} steps",
                self.total_budget, self.steps
            )));
        }
        if !(self.c >= 0.0) {
            return Err(Error::Config("c must be non-negative".into()));
        }
        if !(self.search.gamma > 0.0 && self.search.gamma <= 1.0) {
            return Err(Error::Config("search.gamma must lie in (0, 1]".into()));
        }
        if self.search.max_depth < 1 {
            return Err(Error::Config("search.max_depth must be at least 1".into()));
        }
        self.kernel.validate()?;
        Ok(())
    }
}

/// A fully resolved environment: ground truth, workspace, motion model,
/// start state, and the belief geometry.
#[derive(Debug, Clone)]
pub struct Environment {
    pub truth: GroundTruth,
    pub workspace: Workspace,
    pub motion: MotionModel,
    pub start: AgentState,
    pub belief_bounds: Vec<(f64, f64)>,
    pub dynamic_time: bool,
}

pub fn build_environment(cfg: &ExperimentConfig) -> Result<Environment> {
    match &cfg.environment {
        EnvironmentSpec::Dynamic { grid_resolution } => {
            if !(*grid_resolution > 0.0) {
                return Err(Error::Config("grid_resolution must be positive".into()));
            }
            let workspace = Workspace {
                spatial_bounds: vec![(0.0, 5.0), (0.0, 5.0)],
                grid_resolution: *grid_resolution,
                time_horizon: cfg.steps,
            };
            Ok(Environment {
                truth: GroundTruth::AnalyticDynamic,
                workspace,
                motion: MotionModel::Grid8,
                // bottom-center of the box
                start: AgentState {
                    position: vec![2.5, 0.0],
                    step_index: 0,
                },
                belief_bounds: vec![(0.0, 5.0), (0.0, 5.0), (0.0, 1.0)],
                dynamic_time: true,
            })
        }
        EnvironmentSpec::GridDataset { path, step } => {
            let truth = load_grid_dataset(Path::new(path), &cfg.kernel)?;
            let GroundTruth::InterpolatedGrid(gp) = &truth else {
                unreachable!()
            };
            let mut bbox = vec![(f64::INFINITY, f64::NEG_INFINITY); 3];
            for (p, _) in gp.observations() {
                for (axis, b) in bbox.iter_mut().enumerate() {
                    b.0 = b.0.min(p[axis]);
                    b.1 = b.1.max(p[axis]);
                }
            }
            for (lo, hi) in bbox.iter_mut() {
                if !(*lo < *hi) {
                    *lo -= 1.0;
                    *hi += 1.0;
                }
            }
            let workspace = Workspace {
                spatial_bounds: bbox.clone(),
                grid_resolution: *step,
                time_horizon: cfg.steps,
            };
            let start = AgentState {
                position: vec![
                    0.5 * (bbox[0].0 + bbox[0].1),
                    0.5 * (bbox[1].0 + bbox[1].1),
                    bbox[2].0, // zero depth
                ],
                step_index: 0,
            };
            Ok(Environment {
                truth,
                workspace,
                motion: MotionModel::Compass3d { step: *step },
                start,
                belief_bounds: bbox,
                dynamic_time: false,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRow {
    pub seed: u64,
    pub step: usize,
    pub rollouts_used: usize,
    pub actions_committed: usize,
    pub reward: f64,
    pub cumulative_reward: f64,
    pub wall_ms: f64,
    /// Ground-truth value at the visited point; diagnostics only, kept out
    /// of the main episode CSV.
    pub truth_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeLog {
    pub seed: u64,
    pub rows: Vec<StepRow>,
    pub total_rollouts: usize,
    pub total_reward: f64,
    pub total_truth: f64,
    pub total_wall_ms: f64,
}

impl EpisodeLog {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = fs::File::create(path)?;
        writeln!(
            out,
            "seed,step,rollouts_used,actions_committed,reward,cumulative_reward,wall_ms"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.seed,
                r.step,
                r.rollouts_used,
                r.actions_committed,
                r.reward,
                r.cumulative_reward,
                r.wall_ms
            )?;
        }
        Ok(())
    }
}

/// Belief handed to the planner. On a dynamic environment, observations more
/// than four time-lengthscales old carry squared-exponential correlation
/// below exp(-8) at the current time, so they are dropped: the planner forks
/// the belief once per rollout, and the window keeps that copy cost flat as
/// the episode grows. The episode belief itself is never truncated.
fn planning_belief(belief: &GPBelief, env: &Environment, now: f64) -> Result<GPBelief> {
    let Some(tl) = belief.kernel().time_lengthscale else {
        return Ok(belief.clone());
    };
    if !env.dynamic_time {
        return Ok(belief.clone());
    }
    let cutoff = now - 4.0 * tl;
    let mut windowed = GPBelief::new(*belief.kernel(), env.belief_bounds.clone())?;
    for (point, value) in belief.observations() {
        let t_obs = *point.last().expect("dynamic points carry a time coordinate");
        if t_obs >= cutoff {
            windowed = windowed.add_observation(point, value)?;
        }
    }
    Ok(windowed)
}

/// Run one seeded episode: plan when no committed actions are pending,
/// otherwise execute the pending action for free, always stepping the real
/// environment exactly once per row.
pub fn run_episode(cfg: &ExperimentConfig, env: &Environment, seed: u64) -> Result<EpisodeLog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_min = env.motion.direction_count().max(1);
    let schedule = build_schedule(cfg.curve, cfg.total_budget, cfg.steps, a_min)?;

    let mut kernel = cfg.kernel;
    if env.dynamic_time && kernel.time_lengthscale.is_none() {
        // one revolution of the bump spans 1/12 of the time axis
        kernel.time_lengthscale = Some(1.0 / 24.0);
    }
    let mut belief = GPBelief::new(kernel, env.belief_bounds.clone())?;

    let (lo, hi) = env.truth.value_range();
    let obs_bin_width = cfg.search.obs_bin_width.unwrap_or(0.1 * (hi - lo).max(1e-6));
    let model = PlanningModel {
        workspace: env.workspace.clone(),
        motion: env.motion.clone(),
        dynamic_time: env.dynamic_time,
        c: cfg.c,
    };
    let mut planner = Planner::new(model, cfg.search.gamma, cfg.search.max_depth, obs_bin_width);

    let mut state = env.start.clone();
    let mut pending: VecDeque<MotionAction> = VecDeque::new();
    let mut rows = Vec::with_capacity(cfg.steps);
    let mut cumulative = 0.0;
    let mut total_truth = 0.0;
    let mut total_rollouts = 0usize;
    let mut total_wall = 0.0;

    for step in 0..cfg.steps {
        let (rollouts_used, actions_committed, wall_ms) = if pending.is_empty() {
            let n = schedule.per_step[step];
            let clock = Instant::now();
            let window = planning_belief(&belief, env, step as f64 / cfg.steps as f64)?;
            let tree = planner.plan(&window, &state, n, cfg.explorer, &mut rng)?;
            let plan = extract_plan(&tree, &cfg.commitment, planner.range_multiplier());
            let wall = clock.elapsed().as_secs_f64() * 1e3;
            pending.extend(plan.actions.iter().cloned());
            (n, plan.actions.len(), wall)
        } else {
            (0, 0, 0.0)
        };
        let action = pending.pop_front().expect("plans are never empty");

        // score against the pre-update belief at the point being visited
        let next_position: Vec<f64> = state.position.iter().zip(&action).map(|(p, d)| p + d).collect();
        let t_norm = (step + 1) as f64 / cfg.steps as f64;
        let point = if env.dynamic_time {
            let mut p = next_position.clone();
            p.push(t_norm);
            p
        } else {
            next_position.clone()
        };
        let reward = objective_reward(&belief.posterior(&point)?, cfg.c);

        let (next_state, obs) = env_step(
            &env.truth,
            &state,
            &action,
            &env.workspace,
            &env.motion,
            cfg.observation_noise_std,
            &mut rng,
        )?;
        // a revisit under a noise-free kernel leaves the belief as is
        if let Ok(updated) = belief.add_observation(&point, obs) {
            belief = updated;
        }
        let truth_value = env.truth.sample(&next_state.position, t_norm)?;
        state = next_state;

        cumulative += reward;
        total_truth += truth_value;
        total_rollouts += rollouts_used;
        total_wall += wall_ms;
        rows.push(StepRow {
            seed,
            step,
            rollouts_used,
            actions_committed,
            reward,
            cumulative_reward: cumulative,
            wall_ms,
            truth_value,
        });
    }

    Ok(EpisodeLog {
        seed,
        rows,
        total_rollouts,
        total_reward: cumulative,
        total_truth,
        total_wall_ms: total_wall,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub method: String,
    pub episodes: Vec<EpisodeLog>,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub mean_rollouts: f64,
    pub total_wall_ms: f64,
}

impl RunSummary {
    fn from_episodes(method: &str, episodes: Vec<EpisodeLog>) -> Self {
        let n = episodes.len() as f64;
        let mean_reward = episodes.iter().map(|e| e.total_reward).sum::<f64>() / n;
        let std_reward = if episodes.len() > 1 {
            (episodes
                .iter()
                .map(|e| (e.total_reward - mean_reward).powi(2))
                .sum::<f64>()
                / (n - 1.0))
                .sqrt()
        } else {
            0.0
        };
        let mean_rollouts = episodes.iter().map(|e| e.total_rollouts as f64).sum::<f64>() / n;
        let total_wall_ms = episodes.iter().map(|e| e.total_wall_ms).sum();
        Self {
            method: method.to_string(),
            episodes,
            mean_reward,
            std_reward,
            mean_rollouts,
            total_wall_ms,
        }
    }
}

/// Run every seed (in parallel), write one episode CSV per seed plus a
/// summary CSV, and return the aggregate.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>, method: &str) -> Result<RunSummary> {
    cfg.validate()?;
    let env = build_environment(cfg)?;
    let mut episodes: Vec<EpisodeLog> = cfg
        .seeds
        .par_iter()
        .map(|&seed| run_episode(cfg, &env, seed))
        .collect::<Result<_>>()?;
    episodes.sort_by_key(|e| e.seed);
    let summary = RunSummary::from_episodes(method, episodes);
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        for ep in &summary.episodes {
            ep.write_csv(&dir.join(format!("episode_{}_{}.csv", method, ep.seed)))?;
        }
        write_summary_csv(&dir.join("summary.csv"), std::slice::from_ref(&summary))?;
    }
    Ok(summary)
}

pub fn write_summary_csv(path: &Path, summaries: &[RunSummary]) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "method,seed,total_reward,total_rollouts,total_wall_ms")?;
    for s in summaries {
        for ep in &s.episodes {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.method, ep.seed, ep.total_reward, ep.total_rollouts, ep.total_wall_ms
            )?;
        }
    }
    Ok(())
}

/// Grid search over the 49 beta curves, ranked by mean final cumulative
/// reward (descending; ties by curve order).
pub fn grid_search(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<Vec<(AllocationCurve, f64)>> {
    cfg.validate()?;
    let env = build_environment(cfg)?;
    let candidates = grid_candidates();
    let mut scored: Vec<(usize, AllocationCurve, f64)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, curve)| {
            let mut sub = cfg.clone();
            sub.curve = *curve;
            let mut total = 0.0;
            for &seed in &sub.seeds {
                total += run_episode(&sub, &env, seed)?.total_reward;
            }
            Ok((i, *curve, total / sub.seeds.len() as f64))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
    let ranked: Vec<(AllocationCurve, f64)> = scored.into_iter().map(|(_, c, r)| (c, r)).collect();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let mut out = fs::File::create(dir.join("grid_search.csv"))?;
        writeln!(out, "rank,alpha,beta,mean_final_reward")?;
        for (rank, (curve, reward)) in ranked.iter().enumerate() {
            let AllocationCurve::Beta { alpha, beta } = curve else {
                unreachable!()
            };
            writeln!(out, "{},{},{},{}", rank + 1, alpha, beta, reward)?;
        }
    }
    Ok(ranked)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub baseline: RunSummary,
    pub proposed: RunSummary,
}

/// Default proposed-method curve for an environment class.
pub fn default_curve_for(env: &EnvironmentSpec) -> AllocationCurve {
    match env {
        EnvironmentSpec::Dynamic { .. } => AllocationCurve::beta(6.0, 1.0),
        EnvironmentSpec::GridDataset { .. } => AllocationCurve::beta(4.0, 4.0),
    }
}

/// Baseline (even split, UCT, single-step) versus the proposed method
/// (beta curve, UGapEb, Welch p=0.05 commitment) on identical seeds.
pub fn compare_baseline(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ComparisonReport> {
    let mut baseline_cfg = cfg.clone();
    baseline_cfg.curve = AllocationCurve::Fixed;
    baseline_cfg.explorer = Explorer::Uct;
    baseline_cfg.commitment = CommitmentPolicy::single();

    let mut proposed_cfg = cfg.clone();
    if proposed_cfg.curve == AllocationCurve::Fixed {
        proposed_cfg.curve = default_curve_for(&cfg.environment);
    }
    proposed_cfg.explorer = Explorer::Ugapeb;
    proposed_cfg.commitment = CommitmentPolicy::welch(0.05);

    let baseline = run_experiment(&baseline_cfg, None, "baseline")?;
    let proposed = run_experiment(&proposed_cfg, None, "proposed")?;

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let mut out = fs::File::create(dir.join("comparison.csv"))?;
        writeln!(
            out,
            "seed,step,baseline_reward,baseline_cumulative,baseline_rollouts,proposed_reward,proposed_cumulative,proposed_rollouts"
        )?;
        for (b_ep, p_ep) in baseline.episodes.iter().zip(&proposed.episodes) {
            for (b, p) in b_ep.rows.iter().zip(&p_ep.rows) {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    b.seed,
                    b.step,
                    b.reward,
                    b.cumulative_reward,
                    b.rollouts_used,
                    p.reward,
                    p.cumulative_reward,
                    p.rollouts_used
                )?;
            }
        }
        write_summary_csv(&dir.join("summary.csv"), &[baseline.clone(), proposed.clone()])?;
        let mut wall = fs::File::create(dir.join("wallclock.csv"))?;
        writeln!(wall, "method,total_wall_ms")?;
        writeln!(wall, "baseline,{}", baseline.total_wall_ms)?;
        writeln!(wall, "proposed,{}", proposed.total_wall_ms)?;
    }
    Ok(ComparisonReport { baseline, proposed })
}

/// Small deterministic-ish configuration used by tests and examples.
pub fn desk_scale_dynamic_config() -> ExperimentConfig {
    ExperimentConfig {
        environment: EnvironmentSpec::Dynamic {
            grid_resolution: 0.25,
        },
        steps: 20,
        c: 10.0,
        total_budget: 400,
        curve: AllocationCurve::beta(6.0, 1.0),
        explorer: Explorer::Ugapeb,
        commitment: CommitmentPolicy::welch(0.05),
        search: SearchConfig {
            gamma: 0.95,
            max_depth: 5,
            obs_bin_width: None,
        },
        kernel: KernelParams {
            lengthscale: 0.7,
            signal_variance: 1.0,
            noise_variance: 1e-4,
            time_lengthscale: Some(1.0 / 24.0),
        },
        seeds: vec![0, 1, 2],
        observation_noise_std: 0.0,
    }
}

pub fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
