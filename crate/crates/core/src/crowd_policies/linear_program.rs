// Incremental 2D linear programming over ORCA half-planes, after the
// RVO2 library (Apache-2.0, University of North Carolina at Chapel Hill).

use crate::geometry::Vec2;
use crate::scalar::Scalar;

/// Directed line; feasible velocities lie on its left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line<T> {
    pub point: Vec2<T>,
    pub direction: Vec2<T>,
}

fn eps<T: Scalar>() -> T {
    T::lit(1e-5)
}

/// Optimizes along `lines[line_no]` subject to the earlier lines and the disc
/// of radius `radius`. Returns `false` if the constraints are infeasible.
fn linear_program1<T: Scalar>(
    lines: &[Line<T>],
    line_no: usize,
    radius: T,
    opt_velocity: Vec2<T>,
    direction_opt: bool,
    result: &mut Vec2<T>,
) -> bool {
    let line = lines[line_no];
    let dot = line.point.dot(line.direction);
    let discriminant = dot * dot + radius * radius - line.point.norm_sq();
    if discriminant < T::zero() {
        // The disc excludes the whole line.
        return false;
    }
    let sqrt_disc = discriminant.sqrt();
    let mut t_left = -dot - sqrt_disc;
    let mut t_right = -dot + sqrt_disc;

    for other in &lines[..line_no] {
        let denominator = line.direction.det(other.direction);
        let numerator = other.direction.det(line.point - other.point);
        if denominator.abs() <= eps() {
            // Parallel lines.
            if numerator < T::zero() {
                return false;
            }
            continue;
        }
        let t = numerator / denominator;
        if denominator >= T::zero() {
            t_right = t_right.min(t);
        } else {
            t_left = t_left.max(t);
        }
        if t_left > t_right {
            return false;
        }
    }

    let t = if direction_opt {
        if opt_velocity.dot(line.direction) > T::zero() {
            t_right
        } else {
            t_left
        }
    } else {
        let t = line.direction.dot(opt_velocity - line.point);
        t.max(t_left).min(t_right)
    };
    *result = line.point + line.direction * t;
    true
}

/// Finds the velocity closest to `opt_velocity` (or furthest in its direction
/// when `direction_opt`) satisfying every line and the speed disc. Returns the
/// index of the first violated line, or `lines.len()` on success.
pub fn linear_program2<T: Scalar>(
    lines: &[Line<T>],
    radius: T,
    opt_velocity: Vec2<T>,
    direction_opt: bool,
    result: &mut Vec2<T>,
) -> usize {
    *result = if direction_opt {
        opt_velocity * radius
    } else if opt_velocity.norm_sq() > radius * radius {
        opt_velocity.normalized() * radius
    } else {
        opt_velocity
    };

    for i in 0..lines.len() {
        if lines[i].direction.det(lines[i].point - *result) > T::zero() {
            let previous = *result;
            if !linear_program1(lines, i, radius, opt_velocity, direction_opt, result) {
                *result = previous;
                return i;
            }
        }
    }
    lines.len()
}

/// Minimizes the maximum penetration into the half-planes from `begin_line`
/// on, used when the 2D program is infeasible.
pub fn linear_program3<T: Scalar>(lines: &[Line<T>], begin_line: usize, radius: T, result: &mut Vec2<T>) {
    let mut distance = T::zero();
    for i in begin_line..lines.len() {
        if lines[i].direction.det(lines[i].point - *result) <= distance {
            continue;
        }
        let mut projected: Vec<Line<T>> = Vec::with_capacity(i);
        for j in 0..i {
            let determinant = lines[i].direction.det(lines[j].direction);
            let point = if determinant.abs() <= eps() {
                if lines[i].direction.dot(lines[j].direction) > T::zero() {
                    // Same direction.
                    continue;
                }
                // Opposite direction.
                (lines[i].point + lines[j].point) * T::lit(0.5)
            } else {
                lines[i].point
                    + lines[i].direction
                        * (lines[j].direction.det(lines[i].point - lines[j].point) / determinant)
            };
            projected.push(Line {
                point,
                direction: (lines[j].direction - lines[i].direction).normalized(),
            });
        }

        let previous = *result;
        let normal = Vec2::new(-lines[i].direction.y, lines[i].direction.x);
        if linear_program2(&projected, radius, normal, true, result) < projected.len() {
            // Only reachable through floating-point error; the previous result
            // is already optimal.
            *result = previous;
        }
        distance = lines[i].direction.det(lines[i].point - *result);
    }
}
