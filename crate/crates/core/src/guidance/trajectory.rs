use serde::{Deserialize, Serialize};

use crate::error::GuidanceError;
use crate::geometry::{Vec3, DEGENERATE_EPS};

pub const TRAJECTORY_FORMAT_VERSION: u32 = 1;
pub const DUMP_SAMPLES: usize = 64;

/// Cubic Bezier flight path `[p_s, c1, c2, p_e]` in world space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub control: [Vec3; 4],
}

impl Trajectory {
    /// A path that never leaves `p`.
    pub fn constant(p: Vec3) -> Self {
        Self { control: [p; 4] }
    }

    pub fn start(&self) -> Vec3 {
        self.control[0]
    }

    pub fn end(&self) -> Vec3 {
        self.control[3]
    }

    /// De Casteljau evaluation; exact at both endpoints.
    pub fn eval(&self, t: f64) -> Result<Vec3, GuidanceError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(GuidanceError::ParameterOutOfRange(t));
        }
        if t == 0.0 {
            return Ok(self.control[0]);
        }
        if t == 1.0 {
            return Ok(self.control[3]);
        }
        let mut p = self.control;
        for n in (1..4).rev() {
            for i in 0..n {
                p[i] = p[i].lerp(p[i + 1], t);
            }
        }
        Ok(p[0])
    }

    /// `n` points at evenly spaced parameters from 0 to 1 inclusive.
    pub fn sample(&self, n: usize) -> Vec<Vec3> {
        match n {
            0 => Vec::new(),
            1 => vec![self.start()],
            _ => (0..n)
                .map(|i| {
                    let t = if i == n - 1 { 1.0 } else { i as f64 / (n - 1) as f64 };
                    self.eval(t).expect("t in [0, 1]")
                })
                .collect(),
        }
    }

    pub fn dump(&self, label: Option<u32>) -> TrajectoryDump {
        TrajectoryDump {
            v: TRAJECTORY_FORMAT_VERSION,
            label,
            control: self.control,
            samples: self.sample(DUMP_SAMPLES),
        }
    }
}

/// Builds the flight path from the label's start point `p_s` to the anchor
/// `p_e`, bowed away from the viewpoint `p_v`.
///
/// Two points at 1/3 and 2/3 of the segment are pushed out along their rays
/// from the viewpoint: `c1` to distance `|p_e - p_s|`, `c2` to distance
/// `|p_v - p_e|`. If the viewpoint lies on the segment the control polygon is
/// the straight segment itself.
pub fn make_trajectory(p_s: Vec3, p_e: Vec3, p_v: Vec3) -> Result<Trajectory, GuidanceError> {
    let span = p_e - p_s;
    let len = span.norm();
    if len <= DEGENERATE_EPS {
        return Err(GuidanceError::DegenerateFlight);
    }
    let p_m1 = p_s.lerp(p_e, 1.0 / 3.0);
    let p_m2 = p_s.lerp(p_e, 2.0 / 3.0);
    if on_segment(p_v, p_s, p_e) {
        return Ok(Trajectory {
            control: [p_s, p_m1, p_m2, p_e],
        });
    }
    let (Some(u1), Some(u2)) = ((p_m1 - p_v).try_normalize(), (p_m2 - p_v).try_normalize()) else {
        return Ok(Trajectory {
            control: [p_s, p_m1, p_m2, p_e],
        });
    };
    let c1 = p_v + u1 * len;
    let c2 = p_v + u2 * p_v.distance(p_e);
    Ok(Trajectory {
        control: [p_s, c1, c2, p_e],
    })
}

fn on_segment(p: Vec3, a: Vec3, b: Vec3) -> bool {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.distance(a + ab * t) <= 1e-9
}

pub fn eval_trajectory(traj: &Trajectory, t: f64) -> Result<Vec3, GuidanceError> {
    traj.eval(t)
}

/// Control polygon plus a sampled polyline, for SVG and UI layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDump {
    pub v: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<u32>,
    pub control: [Vec3; 4],
    pub samples: Vec<Vec3>,
}
