//! Cross-entropy policy search over a small potential-field controller.
//!
//! The controller sums a goal attraction, a repulsion from every visible
//! human, a sidestep around them and a repulsion from their predicted
//! positions. Its handful of gains is what the optimizer tunes, scored by
//! mean undiscounted episode return under a chosen reward configuration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::metrics::{compute_metrics, MetricsReport};
use crate::predictors::PredictorKind;
use crate::rewards::RewardConfig;
use crate::scalar::Scalar;
use crate::simulator::{run_episode, Action, Observation, Policy, WorldConfig};

/// Number of tunable gains in [`ParametricPolicy`].
pub const POLICY_PARAMS: usize = 6;

/// Human radius the controller assumes, since observations carry positions only.
const ASSUMED_HUMAN_RADIUS: f64 = 0.4;

/// Potential-field controller.
///
/// Parameter order: goal gain, repulsion gain, repulsion range (m),
/// prediction repulsion gain, sidestep gain, speed scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ParametricPolicy<T> {
    pub params: [T; POLICY_PARAMS],
}

impl<T: Scalar> ParametricPolicy<T> {
    pub fn new(params: [T; POLICY_PARAMS]) -> Result<Self> {
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("policy gains must be finite, got {p}")));
        }
        Ok(Self { params })
    }

    /// All gains zero: the robot never moves.
    pub fn zero() -> Self {
        Self {
            params: [T::zero(); POLICY_PARAMS],
        }
    }

    /// Heads straight for the goal, ignoring humans.
    pub fn straight_to_goal() -> Self {
        let mut params = [T::zero(); POLICY_PARAMS];
        params[0] = T::one();
        params[2] = T::one();
        params[5] = T::one();
        Self { params }
    }

    pub fn goal_gain(&self) -> T {
        self.params[0]
    }

    pub fn repulsion_gain(&self) -> T {
        self.params[1]
    }

    pub fn repulsion_range(&self) -> T {
        self.params[2].abs()
    }

    pub fn prediction_gain(&self) -> T {
        self.params[3]
    }

    pub fn sidestep_gain(&self) -> T {
        self.params[4]
    }

    pub fn speed_scale(&self) -> T {
        self.params[5]
    }

    /// Planar velocity the controller asks for; the simulator clamps its speed.
    pub fn desired_velocity(&self, obs: &Observation<T>) -> Vec2<T> {
        let robot = &obs.robot;
        let goal_dir = (robot.goal - robot.position).normalized();
        let mut v = robot.preferred_velocity(obs.dt) * self.goal_gain();

        let range = self.repulsion_range();
        let reach = robot.radius + T::lit(ASSUMED_HUMAN_RADIUS);
        // Linear falloff from 1 at contact to 0 at `range` surface distance.
        let falloff = |center: Vec2<T>| -> Option<(Vec2<T>, T)> {
            let offset = robot.position - center;
            let gap = offset.norm() - reach;
            if range <= T::zero() || gap >= range {
                return None;
            }
            let weight = ((range - gap) / range).min(T::lit(2.0));
            Some((offset.normalized(), weight))
        };

        for human in &obs.humans {
            if let Some((away, weight)) = falloff(human.position) {
                v += away * (self.repulsion_gain() * weight);
                let mut side = away.perp();
                if side.dot(goal_dir) < T::zero() {
                    side = -side;
                }
                v += side * (self.sidestep_gain() * weight);
            }
        }
        if let Some(prediction) = &obs.prediction {
            for track in &prediction.tracks {
                for (k, &center) in track.positions.iter().enumerate() {
                    if let Some((away, weight)) = falloff(center) {
                        v += away * (self.prediction_gain() * weight / T::lit((k + 1) as f64));
                    }
                }
            }
        }
        v * self.speed_scale()
    }
}

impl<T: Scalar> Policy<T> for ParametricPolicy<T> {
    fn act(&mut self, obs: &Observation<T>) -> Action<T> {
        Action::toward_velocity(self.desired_velocity(obs), obs.kinematics, obs.robot.heading, obs.dt)
    }
}

/// Mean return and metrics of a policy over a seed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Evaluation<T> {
    pub mean_return: T,
    pub mean_discounted_return: T,
    pub metrics: MetricsReport<T>,
}

/// Runs `policy` once per seed (in parallel) and scores it.
pub fn evaluate_policy<T: Scalar, P: Policy<T> + Clone + Sync>(
    policy: &P,
    reward: &RewardConfig<T>,
    world: &WorldConfig<T>,
    predictor: PredictorKind,
    seeds: &[u64],
    gamma: T,
) -> Result<Evaluation<T>> {
    let records = seeds
        .par_iter()
        .map(|&seed| run_episode(world, reward, predictor, &mut policy.clone(), seed))
        .collect::<Result<Vec<_>>>()?;
    let metrics = compute_metrics(&records, reward.d_disc)?;
    let n = T::lit(records.len() as f64);
    let mean_discounted_return = records
        .iter()
        .fold(T::zero(), |acc, r| acc + r.discounted_return(gamma))
        / n;
    Ok(Evaluation {
        mean_return: metrics.mean_return,
        mean_discounted_return,
        metrics,
    })
}

/// Cross-entropy optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearnerConfig {
    pub population: usize,
    pub elite_fraction: f64,
    pub iterations: usize,
    /// Training episodes per candidate; fresh seeds every iteration.
    pub episodes_per_candidate: usize,
    /// Fixed seeds that decide whether a new mean replaces the incumbent.
    pub selection_episodes: usize,
    /// Held-out seeds the learning curve is measured on.
    pub eval_episodes: usize,
    pub train_seed_base: u64,
    pub selection_seed_base: u64,
    pub eval_seed_base: u64,
    /// Seed of the sampling distribution.
    pub seed: u64,
    /// Reported discount; the optimizer itself maximizes undiscounted return.
    pub gamma: f64,
    pub init_mean: [f64; POLICY_PARAMS],
    pub init_std: f64,
    /// Lower bound applied to every standard deviation after a refit.
    pub std_floor: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            population: 24,
            elite_fraction: 0.25,
            iterations: 30,
            episodes_per_candidate: 8,
            selection_episodes: 32,
            eval_episodes: 100,
            train_seed_base: 1_000_000,
            selection_seed_base: 2_000_000,
            eval_seed_base: 3_000_000,
            seed: 7,
            gamma: 0.99,
            init_mean: [0.0, 0.0, 1.0, 0.0, 0.0, 1.0],
            init_std: 0.5,
            std_floor: 0.1,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "learner.elite_fraction must lie in (0, 1], got {}",
                self.elite_fraction
            )));
        }
        for (name, v) in [
            ("population", self.population),
            ("iterations", self.iterations),
            ("episodes_per_candidate", self.episodes_per_candidate),
            ("selection_episodes", self.selection_episodes),
            ("eval_episodes", self.eval_episodes),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("learner.{name} must be >= 1")));
            }
        }
        if !(self.init_std.is_finite() && self.init_std >= 0.0 && self.std_floor.is_finite() && self.std_floor >= 0.0) {
            return Err(Error::Config("learner.init_std and std_floor must be finite and >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("learner.gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if self.init_mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("learner.init_mean must be finite".into()));
        }
        Ok(())
    }

    pub fn elite_count(&self) -> usize {
        ((self.elite_fraction * self.population as f64).round() as usize).clamp(1, self.population)
    }

    fn seeds(base: u64, n: usize) -> Vec<u64> {
        (0..n as u64).map(|i| base + i).collect()
    }

    pub fn eval_seeds(&self) -> Vec<u64> {
        Self::seeds(self.eval_seed_base, self.eval_episodes)
    }

    pub fn selection_seeds(&self) -> Vec<u64> {
        Self::seeds(self.selection_seed_base, self.selection_episodes)
    }

    /// Training seeds of `iteration` (1-based).
    pub fn train_seeds(&self, iteration: usize) -> Vec<u64> {
        let per_iter = self.episodes_per_candidate as u64;
        Self::seeds(self.train_seed_base + (iteration as u64 - 1) * per_iter, self.episodes_per_candidate)
    }
}

/// Diagonal Gaussian search distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchDistribution {
    pub mean: [f64; POLICY_PARAMS],
    pub std: [f64; POLICY_PARAMS],
}

impl SearchDistribution {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; POLICY_PARAMS] {
        let mut out = self.mean;
        for (x, &s) in out.iter_mut().zip(&self.std) {
            if s > 0.0 {
                *x += Normal::new(0.0, s).expect("finite std").sample(rng);
            }
        }
        out
    }

    /// Refits to the elite samples. With every sample elite there is no
    /// selection signal and the distribution is kept as is.
    pub fn refit(&mut self, elites: &[[f64; POLICY_PARAMS]], population: usize, std_floor: f64) {
        if elites.is_empty() || elites.len() >= population {
            return;
        }
        let n = elites.len() as f64;
        for d in 0..POLICY_PARAMS {
            let mean = elites.iter().map(|e| e[d]).sum::<f64>() / n;
            let var = elites.iter().map(|e| (e[d] - mean).powi(2)).sum::<f64>() / n;
            self.mean[d] = mean;
            self.std[d] = var.sqrt().max(std_floor);
        }
    }
}

/// Held-out performance after one iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// 0 is the initial policy, before any update.
    pub iteration: usize,
    /// Training episodes consumed so far.
    pub episodes: usize,
    pub success_rate: f64,
    pub nav_time: Option<f64>,
    pub path_length: Option<f64>,
    pub itr: f64,
    pub mean_return: f64,
    /// Mean return of the incumbent on the selection seeds.
    pub selection_return: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

/// Column header of [`LearningCurve::to_csv_rows`].
pub const CURVE_HEADER: &str = "iteration,episodes,SR,NT,PL,ITR,mean_return,selection_return";

impl LearningCurve {
    /// First iteration whose held-out success rate reaches `threshold`.
    pub fn first_iteration_reaching(&self, threshold: f64) -> Option<usize> {
        self.points
            .iter()
            .find(|p| p.success_rate >= threshold)
            .map(|p| p.iteration)
    }

    pub fn to_csv_rows(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
        self.points
            .iter()
            .map(|p| {
                format!(
                    "{},{},{},{},{},{},{},{}",
                    p.iteration,
                    p.episodes,
                    p.success_rate,
                    opt(p.nav_time),
                    opt(p.path_length),
                    p.itr,
                    p.mean_return,
                    p.selection_return
                )
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: ParametricPolicy<f64>,
    pub curve: LearningCurve,
    pub distribution: SearchDistribution,
}

fn policy_from(params: [f64; POLICY_PARAMS]) -> ParametricPolicy<f64> {
    ParametricPolicy { params }
}

/// Cross-entropy search: sample, evaluate, refit to the elites, repeat.
///
/// After each refit the new mean replaces the incumbent only if it scores at
/// least as well on the fixed selection seeds, so the incumbent's selection
/// return never decreases. The curve reports the incumbent on held-out seeds.
/// `on_iteration` sees every curve point as it is produced.
pub fn cross_entropy_optimize(
    config: &LearnerConfig,
    reward: &RewardConfig<f64>,
    world: &WorldConfig<f64>,
    predictor: PredictorKind,
    mut on_iteration: impl FnMut(&CurvePoint),
) -> Result<OptimizationResult> {
    config.validate()?;
    reward.validate()?;
    world.validate()?;
    let gamma = config.gamma;
    let eval_seeds = config.eval_seeds();
    let selection_seeds = config.selection_seeds();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut dist = SearchDistribution {
        mean: config.init_mean,
        std: [config.init_std; POLICY_PARAMS],
    };

    let mut incumbent = policy_from(dist.mean);
    let mut incumbent_score = evaluate_policy(&incumbent, reward, world, predictor, &selection_seeds, gamma)?.mean_return;
    let mut points = Vec::with_capacity(config.iterations + 1);
    let mut episodes = 0usize;

    let mut record = |iteration: usize, episodes: usize, policy: &ParametricPolicy<f64>, selection: f64| -> Result<CurvePoint> {
        let eval = evaluate_policy(policy, reward, world, predictor, &eval_seeds, gamma)?;
        let point = CurvePoint {
            iteration,
            episodes,
            success_rate: eval.metrics.success_rate(),
            nav_time: eval.metrics.nav_time,
            path_length: eval.metrics.path_length,
            itr: eval.metrics.itr,
            mean_return: eval.mean_return,
            selection_return: selection,
        };
        on_iteration(&point);
        Ok(point)
    };
    points.push(record(0, 0, &incumbent, incumbent_score)?);

    for iteration in 1..=config.iterations {
        let train_seeds = config.train_seeds(iteration);
        let samples: Vec<[f64; POLICY_PARAMS]> = (0..config.population).map(|_| dist.sample(&mut rng)).collect();
        let scores = samples
            .par_iter()
            .map(|&s| evaluate_policy(&policy_from(s), reward, world, predictor, &train_seeds, gamma).map(|e| e.mean_return))
            .collect::<Result<Vec<f64>>>()?;
        episodes += config.population * config.episodes_per_candidate;

        let mut order: Vec<usize> = (0..samples.len()).collect();
        // Descending by score; ties keep sampling order.
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        let elites: Vec<_> = order[..config.elite_count()].iter().map(|&i| samples[i]).collect();
        dist.refit(&elites, config.population, config.std_floor);

        let challenger = policy_from(dist.mean);
        let challenger_score =
            evaluate_policy(&challenger, reward, world, predictor, &selection_seeds, gamma)?.mean_return;
        episodes += selection_seeds.len();
        if challenger_score >= incumbent_score {
            incumbent = challenger;
            incumbent_score = challenger_score;
        }
        points.push(record(iteration, episodes, &incumbent, incumbent_score)?);
    }

    Ok(OptimizationResult {
        best: incumbent,
        curve: LearningCurve { points },
        distribution: dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refit_with_all_elites_is_identity() {
        let mut d = SearchDistribution {
            mean: [1.0; POLICY_PARAMS],
            std: [0.5; POLICY_PARAMS],
        };
        let before = d.clone();
        d.refit(&[[3.0; POLICY_PARAMS]], 1, 0.01);
        assert_eq!(d, before);
    }

    #[test]
    fn refit_applies_floor() {
        let mut d = SearchDistribution {
            mean: [0.0; POLICY_PARAMS],
            std: [1.0; POLICY_PARAMS],
        };
        d.refit(&[[2.0; POLICY_PARAMS]; 3], 10, 0.05);
        assert_eq!(d.mean, [2.0; POLICY_PARAMS]);
        assert_eq!(d.std, [0.05; POLICY_PARAMS]);
    }

    #[test]
    fn elite_count_bounds() {
        let mut c = LearnerConfig {
            population: 10,
            elite_fraction: 0.01,
            ..LearnerConfig::default()
        };
        assert_eq!(c.elite_count(), 1);
        c.elite_fraction = 1.0;
        assert_eq!(c.elite_count(), 10);
        c.elite_fraction = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn train_seeds_are_fresh_per_iteration() {
        let c = LearnerConfig::default();
        let a = c.train_seeds(1);
        let b = c.train_seeds(2);
        assert!(a.iter().all(|s| !b.contains(s)));
        assert!(a.iter().all(|s| !c.eval_seeds().contains(s)));
    }

    #[test]
    fn rejects_nonfinite_gains() {
        assert!(ParametricPolicy::new([f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }
}
