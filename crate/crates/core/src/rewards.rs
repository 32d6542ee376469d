//! The per-step reward stack: discomfort, potential, prediction and the
//! terminal rewards, combined by a priority dispatch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward_kernel::TgrfParams;
use crate::scalar::Scalar;

/// Shape of the discomfort penalty inside the danger zone.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Gaussian skirt from the transformable Gaussian reward function.
    #[default]
    Tgrf,
    /// Linear ramp with the same contact magnitude, for comparison runs.
    LinearBaseline,
}

/// Reward hyperparameters and terminal reward magnitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields, default)]
pub struct RewardConfig<T> {
    pub r_goal: T,
    pub r_col: T,
    pub w_disc: T,
    pub sigma_disc: T,
    /// Danger-zone radius, measured surface to surface.
    pub d_disc: T,
    pub w_pot: T,
    pub mu_pot: T,
    pub sigma_pot: T,
    /// Prediction horizon `K` in simulation steps.
    pub horizon: usize,
    pub mode: RewardMode,
}

impl<T: Scalar> Default for RewardConfig<T> {
    fn default() -> Self {
        Self {
            r_goal: T::lit(10.0),
            r_col: T::lit(-10.0),
            w_disc: T::lit(0.25),
            sigma_disc: T::lit(0.2),
            d_disc: T::lit(0.5),
            w_pot: T::lit(1.5),
            mu_pot: T::zero(),
            sigma_pot: T::lit(1000.0),
            horizon: 5,
            mode: RewardMode::Tgrf,
        }
    }
}

impl<T: Scalar> RewardConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("r_goal", self.r_goal),
            ("r_col", self.r_col),
            ("w_disc", self.w_disc),
            ("sigma_disc", self.sigma_disc),
            ("d_disc", self.d_disc),
            ("w_pot", self.w_pot),
            ("mu_pot", self.mu_pot),
            ("sigma_pot", self.sigma_pot),
        ];
        if let Some((name, v)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("reward.{name} must be finite, got {v}")));
        }
        let positive = [
            ("sigma_disc", self.sigma_disc),
            ("sigma_pot", self.sigma_pot),
            ("d_disc", self.d_disc),
            ("r_goal", self.r_goal),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| *v <= T::zero()) {
            return Err(Error::Config(format!("reward.{name} must be > 0, got {v}")));
        }
        if self.r_col >= T::zero() {
            return Err(Error::Config(format!(
                "reward.r_col must be < 0, got {}",
                self.r_col
            )));
        }
        if self.horizon == 0 {
            return Err(Error::Config("reward.horizon must be >= 1".into()));
        }
        Ok(())
    }

    pub fn discomfort_params(&self) -> TgrfParams<T> {
        TgrfParams::new_unchecked(self.w_disc, T::zero(), self.sigma_disc)
    }

    pub fn potential_params(&self) -> TgrfParams<T> {
        TgrfParams::new_unchecked(self.w_pot, self.mu_pot, self.sigma_pot)
    }

    /// Whether a surface distance lies inside the danger zone.
    #[inline]
    pub fn in_danger_zone(&self, d_min: T) -> bool {
        d_min < self.d_disc
    }
}

/// Gaussian discomfort penalty for a surface distance `d_min` to the nearest human.
///
/// Negative inside the danger zone, zero outside. Negative distances (overlap)
/// are clamped to contact.
pub fn discomfort_penalty<T: Scalar>(d_min: T, cfg: &RewardConfig<T>) -> T {
    let d = d_min.max(T::zero());
    if cfg.in_danger_zone(d) {
        -cfg.discomfort_params().value(d)
    } else {
        T::zero()
    }
}

/// Linear ramp from `-w_disc` at contact to zero at `d_disc`.
pub fn linear_baseline_discomfort<T: Scalar>(d_min: T, cfg: &RewardConfig<T>) -> T {
    let d = d_min.max(T::zero());
    if cfg.in_danger_zone(d) {
        cfg.w_disc * (d - cfg.d_disc) / cfg.d_disc
    } else {
        T::zero()
    }
}

/// Discomfort penalty in the shape selected by `cfg.mode`.
pub fn shaped_discomfort<T: Scalar>(d_min: T, cfg: &RewardConfig<T>) -> T {
    match cfg.mode {
        RewardMode::Tgrf => discomfort_penalty(d_min, cfg),
        RewardMode::LinearBaseline => linear_baseline_discomfort(d_min, cfg),
    }
}

/// Progress reward `(d_prev - d_curr) * tgrf(mu_pot)`.
///
/// The TGRF factor is evaluated at its own mean, so it is the constant `w_pot`
/// whatever `mu_pot` and `sigma_pot` are.
pub fn potential_reward<T: Scalar>(d_goal_prev: T, d_goal_curr: T, cfg: &RewardConfig<T>) -> T {
    let params = cfg.potential_params();
    (d_goal_prev - d_goal_curr) * params.value(params.mean())
}

/// Which humans' predicted discs the robot overlaps, for steps `1..=K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionOccupancy {
    humans: usize,
    horizon: usize,
    bits: Vec<bool>,
}

impl PredictionOccupancy {
    pub fn new(humans: usize, horizon: usize) -> Self {
        Self {
            humans,
            horizon,
            bits: vec![false; humans * horizon],
        }
    }

    /// Builds an occupancy grid from `f(human, step)` with `step` in `1..=horizon`.
    pub fn from_fn(humans: usize, horizon: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut occ = Self::new(humans, horizon);
        for i in 0..humans {
            for k in 1..=horizon {
                occ.set(i, k, f(i, k));
            }
        }
        occ
    }

    pub fn humans(&self) -> usize {
        self.humans
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn index(&self, human: usize, step: usize) -> usize {
        assert!(human < self.humans, "human {human} out of range");
        assert!(
            (1..=self.horizon).contains(&step),
            "step {step} outside 1..={}",
            self.horizon
        );
        human * self.horizon + (step - 1)
    }

    pub fn get(&self, human: usize, step: usize) -> bool {
        self.bits[self.index(human, step)]
    }

    pub fn set(&mut self, human: usize, step: usize, value: bool) {
        let i = self.index(human, step);
        self.bits[i] = value;
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }
}

/// Prediction penalty: per human the minimum over steps of `1[i,k] * r_col / 2^k`,
/// then the minimum over humans. Zero for an empty human set.
pub fn prediction_penalty<T: Scalar>(occ: &PredictionOccupancy, cfg: &RewardConfig<T>) -> T {
    (0..occ.humans())
        .map(|i| {
            (1..=occ.horizon())
                .map(|k| {
                    if occ.get(i, k) {
                        cfg.r_col / T::lit(2.0).powi(k as i32)
                    } else {
                        T::zero()
                    }
                })
                .fold(T::infinity(), T::min)
        })
        .fold(T::zero(), T::min)
}

/// Which case of the reward dispatch produced a step's reward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardBranch {
    Goal,
    Collision,
    DangerZone,
    Nominal,
}

/// Everything the reward dispatch needs to know about one step.
#[derive(Clone, Copy, Debug)]
pub struct StepSummary<'a, T> {
    pub reached_goal: bool,
    pub collided: bool,
    /// Surface distance to the nearest human (infinite with no humans).
    pub d_min: T,
    pub d_goal_prev: T,
    pub d_goal_curr: T,
    /// `None` when no predictor is configured.
    pub occupancy: Option<&'a PredictionOccupancy>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RewardBreakdown<T> {
    pub total: T,
    pub branch: RewardBranch,
    pub prediction: T,
    pub discomfort: T,
    pub potential: T,
}

/// Priority dispatch: goal, then collision, then danger zone, then nominal.
pub fn total_reward<T: Scalar>(s: &StepSummary<'_, T>, cfg: &RewardConfig<T>) -> RewardBreakdown<T> {
    let zero = T::zero();
    let terminal = |total, branch| RewardBreakdown {
        total,
        branch,
        prediction: zero,
        discomfort: zero,
        potential: zero,
    };
    if s.reached_goal {
        return terminal(cfg.r_goal, RewardBranch::Goal);
    }
    if s.collided {
        return terminal(cfg.r_col, RewardBranch::Collision);
    }
    let prediction = s
        .occupancy
        .map_or(zero, |occ| prediction_penalty(occ, cfg));
    if cfg.in_danger_zone(s.d_min) {
        let discomfort = shaped_discomfort(s.d_min, cfg);
        RewardBreakdown {
            total: prediction + discomfort,
            branch: RewardBranch::DangerZone,
            prediction,
            discomfort,
            potential: zero,
        }
    } else {
        let potential = potential_reward(s.d_goal_prev, s.d_goal_curr, cfg);
        RewardBreakdown {
            total: prediction + potential,
            branch: RewardBranch::Nominal,
            prediction,
            discomfort: zero,
            potential,
        }
    }
}

/// Largest per-step magnitudes of the shaping components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct RewardBalance<T> {
    pub max_prediction: T,
    pub max_discomfort: T,
    pub max_potential: T,
    /// `max_prediction / max_discomfort`.
    pub prediction_to_discomfort: T,
}

/// Component magnitude ratios for a robot moving at most `v_max` per `dt`.
pub fn reward_balance<T: Scalar>(cfg: &RewardConfig<T>, v_max: T, dt: T) -> RewardBalance<T> {
    let max_prediction = cfg.r_col.abs() / T::lit(2.0);
    let max_discomfort = cfg.w_disc.abs();
    RewardBalance {
        max_prediction,
        max_discomfort,
        max_potential: cfg.w_pot.abs() * v_max * dt,
        prediction_to_discomfort: max_prediction / max_discomfort,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> RewardConfig<f64> {
        RewardConfig::default()
    }

    #[test]
    fn discomfort_spot_values() {
        let c = cfg();
        assert_eq!(discomfort_penalty(0.6, &c), 0.0);
        assert_eq!(discomfort_penalty(0.5, &c), 0.0);
        assert_eq!(discomfort_penalty(0.0, &c), -0.25);
        assert_abs_diff_eq!(discomfort_penalty(0.2, &c), -0.25 * (-0.5_f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(discomfort_penalty(0.2, &c), -0.151633, epsilon = 1e-6);
        // overlap clamps to contact
        assert_eq!(discomfort_penalty(-0.1, &c), -0.25);
    }

    #[test]
    fn linear_baseline_spot_values() {
        let c = cfg();
        assert_eq!(linear_baseline_discomfort(0.5, &c), 0.0);
        assert_eq!(linear_baseline_discomfort(0.0, &c), -0.25);
        assert_abs_diff_eq!(linear_baseline_discomfort(0.25, &c), -0.125, epsilon = 1e-15);
        assert_eq!(linear_baseline_discomfort(0.9, &c), 0.0);
    }

    #[test]
    fn potential_spot_values() {
        let c = cfg();
        assert_eq!(potential_reward(3.0, 3.0, &c), 0.0);
        assert_abs_diff_eq!(potential_reward(5.0, 4.9, &c), 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(potential_reward(4.9, 5.0, &c), -0.15, epsilon = 1e-12);
    }

    #[test]
    fn potential_factor_ignores_mu_and_sigma() {
        let mut c = cfg();
        c.mu_pot = 3.7;
        c.sigma_pot = 0.01;
        assert_abs_diff_eq!(potential_reward(5.0, 4.9, &c), 0.15, epsilon = 1e-12);
    }

    #[test]
    fn prediction_examples() {
        let c = cfg();
        assert_eq!(prediction_penalty(&PredictionOccupancy::new(3, 4), &c), 0.0);
        assert_eq!(prediction_penalty(&PredictionOccupancy::new(0, 5), &c), 0.0);
        let one = PredictionOccupancy::from_fn(1, 3, |_, k| k == 2);
        assert_eq!(prediction_penalty(&one, &c), -2.5);
        let two = PredictionOccupancy::from_fn(2, 2, |i, k| (i, k) == (0, 2) || (i, k) == (1, 1));
        assert_eq!(prediction_penalty(&two, &c), -5.0);
    }

    #[test]
    fn dispatch_examples() {
        let c = cfg();
        let base = StepSummary {
            reached_goal: false,
            collided: false,
            d_min: 0.2,
            d_goal_prev: 5.0,
            d_goal_curr: 4.9,
            occupancy: None,
        };
        let goal = total_reward(&StepSummary { reached_goal: true, collided: true, ..base }, &c);
        assert_eq!((goal.total, goal.branch), (10.0, RewardBranch::Goal));
        let col = total_reward(&StepSummary { collided: true, ..base }, &c);
        assert_eq!((col.total, col.branch), (-10.0, RewardBranch::Collision));

        let occ = PredictionOccupancy::from_fn(1, 5, |_, k| k == 1);
        let danger = total_reward(&StepSummary { occupancy: Some(&occ), ..base }, &c);
        assert_eq!(danger.branch, RewardBranch::DangerZone);
        assert_abs_diff_eq!(danger.total, -5.151633, epsilon = 1e-6);
        assert_eq!(danger.potential, 0.0);

        let nominal = total_reward(&StepSummary { d_min: 2.0, ..base }, &c);
        assert_eq!(nominal.branch, RewardBranch::Nominal);
        assert_abs_diff_eq!(nominal.total, 0.15, epsilon = 1e-12);
    }

    #[test]
    fn balance_ratio_with_defaults() {
        let b = reward_balance(&cfg(), 1.0, 0.25);
        assert_eq!(b.prediction_to_discomfort, 20.0);
        assert_eq!(b.max_potential, 0.375);
    }

    #[test]
    fn validate_rejects_bad_values() {
        assert!(cfg().validate().is_ok());
        for mutate in [
            (|c: &mut RewardConfig<f64>| c.sigma_disc = 0.0) as fn(&mut RewardConfig<f64>),
            |c| c.d_disc = -1.0,
            |c| c.r_col = 1.0,
            |c| c.r_goal = 0.0,
            |c| c.horizon = 0,
            |c| c.w_pot = f64::NAN,
        ] {
            let mut c = cfg();
            mutate(&mut c);
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err = serde_json::from_str::<RewardConfig<f64>>(r#"{"w_dsic": 0.3}"#);
        assert!(err.is_err());
        let ok: RewardConfig<f64> = serde_json::from_str(r#"{"w_disc": 0.3, "mode": "linear_baseline"}"#).unwrap();
        assert_eq!(ok.w_disc, 0.3);
        assert_eq!(ok.mode, RewardMode::LinearBaseline);
        assert_eq!(ok.d_disc, 0.5);
    }
}
