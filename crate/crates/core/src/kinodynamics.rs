//! Differential-drive timing: time-optimal straight-line velocity profiles,
//! in-place rotations, and multiplicative execution noise.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{Cell, Orientation, CELL_PITCH};

const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum KinoError {
    #[error("cannot change speed from {v_in} to {v_out} m/s within {distance} m")]
    InfeasibleProfile { v_in: f64, v_out: f64, distance: f64 },
    #[error("unsupported rotation angle {0} degrees")]
    UnsupportedAngle(f64),
    #[error("time {tau} s outside action duration {duration} s")]
    OutOfRange { tau: f64, duration: f64 },
    #[error("invalid limits: {0}")]
    InvalidLimits(String),
}

/// Speed and acceleration limits of one AGV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgvLimits {
    /// m/s
    pub v_max: f64,
    /// m/s^2
    pub a_max: f64,
    /// deg/s
    pub omega: f64,
}

impl Default for AgvLimits {
    fn default() -> Self {
        AgvLimits {
            v_max: 2.0,
            a_max: 2.0,
            omega: 45.0,
        }
    }
}

impl AgvLimits {
    pub fn validate(&self) -> Result<(), KinoError> {
        for (name, v) in [("v_max", self.v_max), ("a_max", self.a_max), ("omega", self.omega)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KinoError::InvalidLimits(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Accelerate at `a_max`, optionally cruise at the peak speed, decelerate at `a_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityProfile {
    pub v_in: f64,
    pub v_peak: f64,
    pub v_out: f64,
    pub accel: f64,
    pub distance: f64,
    t_acc: f64,
    t_cruise: f64,
    t_dec: f64,
    s_acc: f64,
    s_cruise: f64,
}

impl VelocityProfile {
    pub fn new(limits: &AgvLimits, v_in: f64, v_out: f64, distance: f64) -> Result<Self, KinoError> {
        let a = limits.a_max;
        let infeasible = KinoError::InfeasibleProfile { v_in, v_out, distance };
        if !(distance > 0.0)
            || v_in < 0.0
            || v_out < 0.0
            || v_in > limits.v_max + FEASIBILITY_SLACK
            || v_out > limits.v_max + FEASIBILITY_SLACK
        {
            return Err(infeasible);
        }
        if (v_out * v_out - v_in * v_in).abs() / (2.0 * a) > distance + FEASIBILITY_SLACK {
            return Err(infeasible);
        }
        let v_in = v_in.min(limits.v_max);
        let v_out = v_out.min(limits.v_max);
        let unconstrained = ((2.0 * a * distance + v_in * v_in + v_out * v_out) / 2.0).sqrt();
        let v_peak = unconstrained.min(limits.v_max).max(v_in).max(v_out);
        let s_acc = (v_peak * v_peak - v_in * v_in) / (2.0 * a);
        let s_dec = (v_peak * v_peak - v_out * v_out) / (2.0 * a);
        let s_cruise = (distance - s_acc - s_dec).max(0.0);
        Ok(VelocityProfile {
            v_in,
            v_peak,
            v_out,
            accel: a,
            distance,
            t_acc: (v_peak - v_in) / a,
            t_cruise: s_cruise / v_peak,
            t_dec: (v_peak - v_out) / a,
            s_acc,
            s_cruise,
        })
    }

    pub fn duration(&self) -> f64 {
        self.t_acc + self.t_cruise + self.t_dec
    }

    pub fn velocity_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.duration());
        if t <= self.t_acc {
            self.v_in + self.accel * t
        } else if t <= self.t_acc + self.t_cruise {
            self.v_peak
        } else {
            let td = t - self.t_acc - self.t_cruise;
            (self.v_peak - self.accel * td).max(self.v_out)
        }
    }

    pub fn position_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.duration());
        if t <= self.t_acc {
            self.v_in * t + 0.5 * self.accel * t * t
        } else if t <= self.t_acc + self.t_cruise {
            self.s_acc + self.v_peak * (t - self.t_acc)
        } else {
            let td = t - self.t_acc - self.t_cruise;
            (self.s_acc + self.s_cruise + self.v_peak * td - 0.5 * self.accel * td * td)
                .min(self.distance)
        }
    }

    /// Inverse of `position_at` on `[0, distance]`.
    pub fn time_at_position(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.distance);
        let a = self.accel;
        if s <= self.s_acc {
            if a * s == 0.0 {
                return 0.0;
            }
            (-self.v_in + (self.v_in * self.v_in + 2.0 * a * s).sqrt()) / a
        } else if s <= self.s_acc + self.s_cruise {
            self.t_acc + (s - self.s_acc) / self.v_peak
        } else {
            let sd = s - self.s_acc - self.s_cruise;
            let disc = (self.v_peak * self.v_peak - 2.0 * a * sd).max(0.0);
            self.t_acc + self.t_cruise + (self.v_peak - disc.sqrt()) / a
        }
    }
}

/// Duration of the time-optimal straight move.
pub fn move_duration(limits: &AgvLimits, v_in: f64, v_out: f64, distance: f64) -> Result<f64, KinoError> {
    VelocityProfile::new(limits, v_in, v_out, distance).map(|p| p.duration())
}

/// In-place rotation at constant angular speed. Only quarter and half turns exist.
pub fn rotate_duration(limits: &AgvLimits, angle_deg: f64) -> Result<f64, KinoError> {
    let magnitude = angle_deg.abs();
    if magnitude != 90.0 && magnitude != 180.0 {
        return Err(KinoError::UnsupportedAngle(angle_deg));
    }
    Ok(magnitude / limits.omega)
}

/// Shortest achievable atomic action: a one-cell cruise move or a quarter turn.
pub fn min_action_duration(limits: &AgvLimits) -> f64 {
    let cruise = move_duration(limits, limits.v_max, limits.v_max, CELL_PITCH)
        .expect("cruise over one cell is always feasible");
    let turn = rotate_duration(limits, 90.0).expect("quarter turn supported");
    cruise.min(turn)
}

/// Number of actions an AGV can finish within `budget` seconds: floor(T / eps).
pub fn action_lookahead(budget: f64, epsilon: f64) -> usize {
    ((budget / epsilon) + 1e-9).floor().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub sigma: f64,
    pub low: f64,
    pub high: f64,
    pub enabled: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            sigma: 0.1,
            low: 0.8,
            high: 1.5,
            enabled: true,
        }
    }
}

impl NoiseModel {
    pub fn disabled() -> Self {
        NoiseModel {
            enabled: false,
            ..NoiseModel::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(format!("noise sigma must be >= 0, got {}", self.sigma));
        }
        if !(self.low <= 1.0 && 1.0 <= self.high && self.low > 0.0) {
            return Err(format!(
                "noise clamp must satisfy 0 < low <= 1 <= high, got [{}, {}]",
                self.low, self.high
            ));
        }
        Ok(())
    }

    /// Log-normal duration factor (location 0, scale sigma) clamped to `[low, high]`.
    pub fn sample_factor<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if !self.enabled {
            return 1.0;
        }
        let z: f64 = rng.sample(StandardNormal);
        (self.sigma * z).exp().clamp(self.low, self.high)
    }
}

pub fn sample_duration<R: Rng + ?Sized>(nominal: f64, noise: &NoiseModel, rng: &mut R) -> f64 {
    if !noise.enabled {
        return nominal;
    }
    nominal * noise.sample_factor(rng)
}

/// Continuous pose `(x, y, theta, t)`. x grows east, y grows north.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub t: f64,
}

impl ContinuousState {
    pub fn at_cell(cell: Cell, heading: Orientation, t: f64) -> Self {
        ContinuousState {
            x: (cell.col as f64 + 0.5) * CELL_PITCH,
            y: -(cell.row as f64 + 0.5) * CELL_PITCH,
            theta: heading.radians(),
            t,
        }
    }
}

pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Continuous trajectory of one atomic action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActionTrajectory {
    Move {
        entry: ContinuousState,
        profile: VelocityProfile,
        /// Time dilation applied by execution noise.
        time_scale: f64,
    },
    Rotate {
        entry: ContinuousState,
        /// Signed; positive is counter-clockwise in the world frame.
        sweep: f64,
        duration: f64,
    },
}

impl ActionTrajectory {
    pub fn straight(
        limits: &AgvLimits,
        from: Cell,
        heading: Orientation,
        cells: u32,
        v_in: f64,
        v_out: f64,
        t0: f64,
    ) -> Result<Self, KinoError> {
        let profile = VelocityProfile::new(limits, v_in, v_out, cells as f64 * CELL_PITCH)?;
        Ok(ActionTrajectory::Move {
            entry: ContinuousState::at_cell(from, heading, t0),
            profile,
            time_scale: 1.0,
        })
    }

    /// Rotation by `quarter_turns` clockwise quarter turns (negative: counter-clockwise).
    pub fn turn(
        limits: &AgvLimits,
        at: Cell,
        heading: Orientation,
        quarter_turns: i32,
        t0: f64,
    ) -> Result<Self, KinoError> {
        let degrees = 90.0 * quarter_turns as f64;
        let duration = rotate_duration(limits, degrees)?;
        Ok(ActionTrajectory::Rotate {
            entry: ContinuousState::at_cell(at, heading, t0),
            // clockwise on the grid is negative in the world frame
            sweep: -degrees.to_radians(),
            duration,
        })
    }

    pub fn duration(&self) -> f64 {
        match self {
            ActionTrajectory::Move {
                profile, time_scale, ..
            } => profile.duration() * time_scale,
            ActionTrajectory::Rotate { duration, .. } => *duration,
        }
    }

    pub fn pose_at(&self, tau: f64) -> Result<ContinuousState, KinoError> {
        let duration = self.duration();
        if !(0.0..=duration + 1e-12).contains(&tau) {
            return Err(KinoError::OutOfRange { tau, duration });
        }
        Ok(match *self {
            ActionTrajectory::Move {
                entry,
                profile,
                time_scale,
            } => {
                let s = if tau >= duration {
                    profile.distance
                } else {
                    profile.position_at(tau / time_scale)
                };
                ContinuousState {
                    x: entry.x + s * entry.theta.cos(),
                    y: entry.y + s * entry.theta.sin(),
                    theta: entry.theta,
                    t: entry.t + tau,
                }
            }
            ActionTrajectory::Rotate {
                entry,
                sweep,
                duration,
            } => {
                let frac = if tau >= duration { 1.0 } else { tau / duration };
                ContinuousState {
                    theta: normalize_angle(entry.theta + sweep * frac),
                    t: entry.t + tau,
                    ..entry
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-9;

    /// Forward Euler integration of the bang-cruise-bang control law.
    fn integrate(limits: &AgvLimits, v_in: f64, v_out: f64, d: f64) -> f64 {
        let dt = 1e-6;
        let (mut s, mut v, mut t) = (0.0f64, v_in, 0.0f64);
        while s < d {
            let brake = (v * v - v_out * v_out) / (2.0 * limits.a_max);
            let a = if d - s <= brake + 1e-12 {
                -limits.a_max
            } else if v < limits.v_max {
                limits.a_max
            } else {
                0.0
            };
            // floor keeps the discretized braking phase from stalling short of d
            let v_next = (v + a * dt).clamp(1e-4, limits.v_max);
            s += 0.5 * (v + v_next) * dt;
            v = v_next;
            t += dt;
        }
        t
    }

    #[test]
    fn move_examples() {
        let l = AgvLimits::default();
        assert!((move_duration(&l, 0.0, 2.0, 1.0).unwrap() - 1.0).abs() < EPS);
        assert!((move_duration(&l, 2.0, 2.0, 1.0).unwrap() - 0.5).abs() < EPS);
        assert!((move_duration(&l, 0.0, 0.0, 1.0).unwrap() - 2f64.sqrt()).abs() < EPS);
    }

    #[test]
    fn move_examples_match_integration() {
        let l = AgvLimits::default();
        for (vi, vo, d) in [(0.0, 2.0, 1.0), (2.0, 2.0, 1.0), (0.0, 0.0, 1.0), (1.0, 0.0, 3.0)] {
            let closed = move_duration(&l, vi, vo, d).unwrap();
            assert!((integrate(&l, vi, vo, d) - closed).abs() < 1e-3, "{vi} {vo} {d}");
        }
    }

    #[test]
    fn infeasible_profile() {
        let l = AgvLimits::default();
        assert!(matches!(
            move_duration(&l, 2.0, 0.0, 0.5),
            Err(KinoError::InfeasibleProfile { .. })
        ));
        assert!(move_duration(&l, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rotations() {
        let l = AgvLimits::default();
        assert_eq!(rotate_duration(&l, 90.0).unwrap(), 2.0);
        assert_eq!(rotate_duration(&l, 180.0).unwrap(), 4.0);
        let fast = AgvLimits {
            omega: 90.0,
            ..l
        };
        assert_eq!(rotate_duration(&fast, 90.0).unwrap(), 1.0);
        assert_eq!(rotate_duration(&l, 45.0), Err(KinoError::UnsupportedAngle(45.0)));
    }

    #[test]
    fn epsilon_and_lookahead() {
        let l = AgvLimits::default();
        assert!((min_action_duration(&l) - 0.5).abs() < EPS);
        assert_eq!(action_lookahead(1.0, min_action_duration(&l)), 2);
        let slow_turns = AgvLimits { omega: 10.0, ..l };
        assert!((min_action_duration(&slow_turns) - 0.5).abs() < EPS);
        let fast_turns = AgvLimits { omega: 360.0, ..l };
        assert!((min_action_duration(&fast_turns) - 0.25).abs() < EPS);
    }

    #[test]
    fn noise_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_duration(0.5, &NoiseModel::disabled(), &mut rng), 0.5);
        let flat = NoiseModel {
            sigma: 0.0,
            ..NoiseModel::default()
        };
        assert_eq!(sample_duration(0.5, &flat, &mut rng), 0.5);
        let wide = NoiseModel {
            sigma: 2.0,
            ..NoiseModel::default()
        };
        for _ in 0..1000 {
            let d = sample_duration(0.5, &wide, &mut rng);
            assert!((0.4..=0.75).contains(&d), "{d}");
        }
    }

    #[test]
    fn pose_examples() {
        let l = AgvLimits::default();
        let start = Cell::new(5, 5);
        let traj = ActionTrajectory::straight(&l, start, Orientation::East, 1, 2.0, 2.0, 10.0).unwrap();
        let entry = traj.pose_at(0.0).unwrap();
        assert_eq!(entry, ContinuousState::at_cell(start, Orientation::East, 10.0));
        let exit = traj.pose_at(traj.duration()).unwrap();
        let expect = ContinuousState::at_cell(Cell::new(5, 6), Orientation::East, 10.5);
        assert!((exit.x - expect.x).abs() < EPS && (exit.y - expect.y).abs() < EPS);
        let mid = traj.pose_at(0.25).unwrap();
        assert!((mid.x - (entry.x + 0.5)).abs() < EPS);
        assert!(traj.pose_at(0.6).is_err());

        let turn = ActionTrajectory::turn(&l, start, Orientation::North, 1, 0.0).unwrap();
        let end = turn.pose_at(2.0).unwrap();
        assert!((end.theta - Orientation::East.radians()).abs() < EPS);
    }

    #[test]
    fn position_time_inverse() {
        let l = AgvLimits::default();
        let p = VelocityProfile::new(&l, 0.0, 0.0, 3.0).unwrap();
        assert!((p.duration() - 2.5).abs() < EPS);
        for s in [1.0, 2.0, 3.0] {
            let t = p.time_at_position(s);
            assert!((p.position_at(t) - s).abs() < 1e-9);
        }
        assert!((p.time_at_position(1.0) - 1.0).abs() < EPS);
        assert!((p.time_at_position(2.0) - 1.5).abs() < EPS);
    }
}
