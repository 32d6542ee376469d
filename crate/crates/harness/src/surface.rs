//! Reward surface around a single human at the origin, as plot-ready triplets.

use crowdnav_core::rewards::{shaped_discomfort, RewardConfig};
use serde::{Deserialize, Serialize};

/// Regular grid `x = x_min + i * step` for `i` in `0..=round((x_max - x_min) / step)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
    pub human_radius: f64,
    pub robot_radius: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: -1.5,
            x_max: 1.5,
            y_min: -1.5,
            y_max: 1.5,
            step: 0.1,
            human_radius: 0.3,
            robot_radius: 0.3,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> crowdnav_core::Result<()> {
        let bad = |m: &str| Err(crowdnav_core::Error::Config(format!("surface.{m}")));
        let all = [self.x_min, self.x_max, self.y_min, self.y_max, self.step, self.human_radius, self.robot_radius];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("values must be finite");
        }
        if self.step <= 0.0 {
            return bad("step must be > 0");
        }
        if self.x_max < self.x_min || self.y_max < self.y_min {
            return bad("max must be >= min");
        }
        if self.human_radius < 0.0 || self.robot_radius < 0.0 {
            return bad("radii must be >= 0");
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step).round() as usize;
        (0..=n).map(|i| lo + i as f64 * step).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.step)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Reward seen by a robot centered at `(x, y)`: `r_col` on contact, the
/// discomfort skirt inside `d_disc`, zero beyond.
pub fn surface_value(reward: &RewardConfig<f64>, grid: &GridSpec, x: f64, y: f64) -> f64 {
    let d = x.hypot(y) - grid.human_radius - grid.robot_radius;
    if d <= 0.0 {
        reward.r_col
    } else {
        shaped_discomfort(d, reward)
    }
}

/// Row-major over y, then x.
pub fn emit_reward_surface(reward: &RewardConfig<f64>, grid: &GridSpec) -> Vec<SurfacePoint> {
    let xs = grid.xs();
    grid.ys()
        .into_iter()
        .flat_map(|y| xs.iter().map(move |&x| (x, y)))
        .map(|(x, y)| SurfacePoint {
            x,
            y,
            value: surface_value(reward, grid, x, y),
        })
        .collect()
}

pub const SURFACE_HEADER: &str = "x,y,value";

pub fn surface_csv(points: &[SurfacePoint]) -> String {
    let mut out = String::with_capacity(points.len() * 32);
    out.push_str(SURFACE_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.x, p.y, p.value));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_skirt_and_flat_beyond() {
        let r = RewardConfig::default();
        let g = GridSpec::default();
        assert_eq!(surface_value(&r, &g, 0.0, 0.0), -10.0);
        assert_eq!(surface_value(&r, &g, 0.6, 0.0), -10.0);
        let skirt = surface_value(&r, &g, 0.8, 0.0);
        assert!((skirt - (-0.25 * (-0.5f64).exp())).abs() < 1e-12);
        assert_eq!(surface_value(&r, &g, 1.2, 0.0), 0.0);
    }

    #[test]
    fn grid_has_inclusive_bounds() {
        let g = GridSpec::default();
        assert_eq!(g.xs().len(), 31);
        assert_eq!(emit_reward_surface(&RewardConfig::default(), &g).len(), 31 * 31);
    }
}
