//! Screen-space projection, plane projection, radian arithmetic and gaze
//! direction fitting.
//!
//! Screen coordinates are dimensionless: `1.0` is the radius of the central
//! field-of-view circle, so a ray that deviates from the view direction by the
//! central half-angle lands on the unit circle. `+x` points right, `+y` up.

use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Vectors shorter than this have no usable direction.
pub const DEGENERATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn try_normalize(self) -> Option<Vec3> {
        let n = self.norm();
        (n > DEGENERATE_EPS).then(|| self * (1.0 / n))
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }

    /// Angle between two non-zero vectors, in radians.
    pub fn angle_to(self, o: Vec3) -> f64 {
        // atan2 form stays accurate for nearly parallel vectors.
        self.cross(o).norm().atan2(self.dot(o))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A point or displacement in screen units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScreenVec {
    pub x: f64,
    pub y: f64,
}

impl ScreenVec {
    pub const ZERO: ScreenVec = ScreenVec::new(0.0, 0.0);

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point on a circle of `radius` around `center` at `radian`.
    pub fn on_circle(center: ScreenVec, radius: f64, radian: f64) -> Self {
        ScreenVec::new(
            center.x + radius * radian.cos(),
            center.y + radius * radian.sin(),
        )
    }

    pub fn dot(self, o: ScreenVec) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: ScreenVec) -> f64 {
        (self - o).norm()
    }

    pub fn try_normalize(self) -> Option<ScreenVec> {
        let n = self.norm();
        (n > DEGENERATE_EPS).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for ScreenVec {
    type Output = ScreenVec;
    fn add(self, o: ScreenVec) -> ScreenVec {
        ScreenVec::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for ScreenVec {
    fn add_assign(&mut self, o: ScreenVec) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for ScreenVec {
    type Output = ScreenVec;
    fn sub(self, o: ScreenVec) -> ScreenVec {
        ScreenVec::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for ScreenVec {
    type Output = ScreenVec;
    fn mul(self, s: f64) -> ScreenVec {
        ScreenVec::new(self.x * s, self.y * s)
    }
}

/// Viewer pose plus the current gaze point on screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewState {
    pub viewpoint: Vec3,
    pub view_dir: Vec3,
    pub up: Vec3,
    pub gaze: ScreenVec,
}

const FRAME_TOL: f64 = 1e-9;

impl ViewState {
    pub fn new(
        viewpoint: Vec3,
        view_dir: Vec3,
        up: Vec3,
        gaze: ScreenVec,
    ) -> Result<Self, GeometryError> {
        let view = Self {
            viewpoint,
            view_dir,
            up,
            gaze,
        };
        view.validate()?;
        Ok(view)
    }

    /// Builds an orthonormal frame from an arbitrary forward vector and an
    /// approximate up hint (Gram-Schmidt).
    pub fn looking(viewpoint: Vec3, forward: Vec3, up_hint: Vec3) -> Result<Self, GeometryError> {
        let dir = forward.try_normalize().ok_or(GeometryError::DegenerateVector)?;
        let up = (up_hint - dir * up_hint.dot(dir))
            .try_normalize()
            .ok_or(GeometryError::DegenerateVector)?;
        Self::new(viewpoint, dir, up, ScreenVec::ZERO)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let ok = (self.view_dir.norm() - 1.0).abs() <= FRAME_TOL
            && (self.up.norm() - 1.0).abs() <= FRAME_TOL
            && self.view_dir.dot(self.up).abs() <= FRAME_TOL
            && self.viewpoint.is_finite()
            && self.gaze.is_finite();
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidFrame)
        }
    }

    pub fn right(&self) -> Vec3 {
        self.view_dir.cross(self.up)
    }

    pub fn with_gaze(mut self, gaze: ScreenVec) -> Self {
        self.gaze = gaze;
        self
    }
}

/// Perspective mapping between world rays and screen units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// Central field-of-view half-angle in radians.
    pub central_half_angle: f64,
    /// Half extent of the visible screen rectangle, in screen units.
    pub half_width: f64,
    pub half_height: f64,
}

impl Default for Projection {
    fn default() -> Self {
        Self {
            central_half_angle: 15f64.to_radians(),
            half_width: 4.0,
            half_height: 4.0,
        }
    }
}

impl Projection {
    pub fn with_central_fov_deg(full_deg: f64) -> Self {
        Self {
            central_half_angle: (full_deg * 0.5).to_radians(),
            ..Self::default()
        }
    }

    pub fn half_diagonal(&self) -> f64 {
        self.half_width.hypot(self.half_height)
    }

    pub fn contains(&self, p: ScreenVec) -> bool {
        p.x.abs() <= self.half_width && p.y.abs() <= self.half_height
    }

    pub fn world_to_screen(&self, p: Vec3, view: &ViewState) -> Result<ScreenVec, GeometryError> {
        let d = p - view.viewpoint;
        let depth = d.dot(view.view_dir);
        if depth <= DEGENERATE_EPS {
            return Err(GeometryError::BehindView);
        }
        let scale = 1.0 / (depth * self.central_half_angle.tan());
        Ok(ScreenVec::new(
            d.dot(view.right()) * scale,
            d.dot(view.up) * scale,
        ))
    }

    /// Like [`world_to_screen`](Self::world_to_screen) but never fails: points
    /// behind the viewer (or further out than the screen corner) are pushed to
    /// the screen-corner radius along their in-plane direction.
    pub fn world_to_screen_clamped(&self, p: Vec3, view: &ViewState) -> ScreenVec {
        let limit = self.half_diagonal();
        match self.world_to_screen(p, view) {
            Ok(s) if s.norm() <= limit => s,
            _ => {
                let d = p - view.viewpoint;
                let flat = ScreenVec::new(d.dot(view.right()), d.dot(view.up));
                flat.try_normalize().unwrap_or(ScreenVec::new(1.0, 0.0)) * limit
            }
        }
    }

    /// Unit world direction of the ray through a screen point.
    pub fn screen_to_world_dir(&self, s: ScreenVec, view: &ViewState) -> Vec3 {
        let t = self.central_half_angle.tan();
        let dir = view.view_dir + view.right() * (s.x * t) + view.up * (s.y * t);
        dir.try_normalize().unwrap_or(view.view_dir)
    }

    pub fn screen_to_world(&self, s: ScreenVec, view: &ViewState, distance: f64) -> Vec3 {
        view.viewpoint + self.screen_to_world_dir(s, view) * distance
    }
}

/// Removes the component of `v` along `normal`.
///
/// `normal` must be a unit vector.
pub fn project_to_plane(v: Vec3, normal: Vec3) -> Vec3 {
    v - normal * v.dot(normal)
}

/// Wraps any radian into `[0, 2π)`.
pub fn wrap_radian(r: f64) -> f64 {
    let w = r.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Counterclockwise angle of `v` from the three o'clock direction, in `[0, 2π)`.
pub fn radian_of(v: ScreenVec) -> Result<f64, GeometryError> {
    if v.norm() <= DEGENERATE_EPS {
        return Err(GeometryError::DegenerateVector);
    }
    Ok(wrap_radian(v.y.atan2(v.x)))
}

/// Shortest angular separation of two radians, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TAU);
    d.min(TAU - d)
}

/// Counterclockwise sweep from `from` to `to`, in `[0, 2π)`.
pub fn ccw_delta(from: f64, to: f64) -> f64 {
    wrap_radian(to - from)
}

/// Angle between two screen vectors in `[0, π]`; `None` if either is degenerate.
pub fn screen_angle(a: ScreenVec, b: ScreenVec) -> Option<f64> {
    let (a, b) = (a.try_normalize()?, b.try_normalize()?);
    let cross = a.x * b.y - a.y * b.x;
    Some(cross.abs().atan2(a.dot(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub t: f64,
    pub point: ScreenVec,
}

/// Sliding window of timestamped gaze points.
#[derive(Debug, Clone, PartialEq)]
pub struct GazeTrace {
    samples: VecDeque<GazeSample>,
    window: f64,
    min_path: f64,
}

impl GazeTrace {
    pub const DEFAULT_WINDOW: f64 = 0.3;
    pub const DEFAULT_MIN_PATH: f64 = 0.05;

    pub fn new(window: f64, min_path: f64) -> Self {
        assert!(window > 0.0, "gaze window must be positive");
        Self {
            samples: VecDeque::new(),
            window,
            min_path,
        }
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn min_path(&self) -> f64 {
        self.min_path
    }

    /// Appends a sample and evicts everything older than the window.
    ///
    /// Timestamps must be strictly increasing.
    pub fn push(&mut self, t: f64, point: ScreenVec) -> Result<(), GeometryError> {
        if let Some(last) = self.samples.back() {
            if t <= last.t {
                return Err(GeometryError::NonMonotonicTimestamp {
                    previous: last.t,
                    got: t,
                });
            }
        }
        self.samples.push_back(GazeSample { t, point });
        let oldest = t - self.window;
        while self.samples.front().is_some_and(|s| s.t < oldest - 1e-12) {
            self.samples.pop_front();
        }
        Ok(())
    }

    pub fn clear(&mut self) {
        self.samples.clear();
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn latest(&self) -> Option<GazeSample> {
        self.samples.back().copied()
    }

    pub fn samples(&self) -> impl Iterator<Item = &GazeSample> + '_ {
        self.samples.iter()
    }

    pub fn path_length(&self) -> f64 {
        self.samples
            .iter()
            .zip(self.samples.iter().skip(1))
            .map(|(a, b)| a.point.distance(b.point))
            .sum()
    }
}

/// Total-least-squares direction of the windowed gaze path.
///
/// Returns `None` when the gaze barely moved inside the window. The sign is
/// chosen to agree with the first-to-last displacement.
pub fn fit_gaze_direction(trace: &GazeTrace) -> Option<ScreenVec> {
    if trace.len() < 2 || trace.path_length() < trace.min_path {
        return None;
    }
    let n = trace.len() as f64;
    let (sx, sy) = trace
        .samples()
        .fold((0.0, 0.0), |(x, y), s| (x + s.point.x, y + s.point.y));
    let (cx, cy) = (sx / n, sy / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for s in trace.samples() {
        let (dx, dy) = (s.point.x - cx, s.point.y - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Principal axis of the 2x2 scatter matrix.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = ScreenVec::new(theta.cos(), theta.sin());

    let first = trace.samples.front()?.point;
    let last = trace.samples.back()?.point;
    if dir.dot(last - first) < 0.0 {
        Some(dir * -1.0)
    } else {
        Some(dir)
    }
}

/// Rotates `v` about unit `axis` by `angle` (Rodrigues).
pub fn rotate_about(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}

/// Turns unit `from` toward unit `to` by at most `max_angle` radians.
pub fn turn_toward(from: Vec3, to: Vec3, max_angle: f64) -> Vec3 {
    let angle = from.angle_to(to);
    if angle <= max_angle {
        return to;
    }
    let axis = match from.cross(to).try_normalize() {
        Some(a) => a,
        // Antiparallel: any perpendicular axis works, prefer world up.
        None => project_to_plane(Vec3::Y, from)
            .try_normalize()
            .unwrap_or(Vec3::X),
    };
    rotate_about(from, axis, max_angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn front_view() -> ViewState {
        ViewState::new(Vec3::ZERO, -Vec3::Z, Vec3::Y, ScreenVec::ZERO).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn plane_projection_examples() {
        assert_eq!(project_to_plane(Vec3::new(0., 0., 5.), Vec3::Z), Vec3::ZERO);
        assert_eq!(
            project_to_plane(Vec3::new(3., 4., 0.), Vec3::Z),
            Vec3::new(3., 4., 0.)
        );
        assert_eq!(
            project_to_plane(Vec3::new(1., 2., 3.), Vec3::Z),
            Vec3::new(1., 2., 0.)
        );
    }

    #[test]
    fn axial_point_projects_to_origin() {
        let p = Projection::default();
        let s = p.world_to_screen(Vec3::new(0., 0., -4.), &front_view()).unwrap();
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn central_half_angle_maps_to_unit() {
        let p = Projection::default();
        let a = p.central_half_angle;
        let s = p
            .world_to_screen(Vec3::new(a.tan() * 2.0, 0., -2.0), &front_view())
            .unwrap();
        assert!(close(s.x, 1.0, 1e-12) && close(s.y, 0.0, 1e-12));
    }

    #[test]
    fn half_angle_upward() {
        let p = Projection::default();
        let a = p.central_half_angle;
        // Direction at angle a/2 above the axis, arbitrary depth.
        let dir = Vec3::new(0., (a / 2.).sin(), -(a / 2.).cos());
        let s = p.world_to_screen(dir * 7.0, &front_view()).unwrap();
        // tan(7.5°)/tan(15°), evaluated with extended precision.
        let expected = 0.491_333_809_939_500_4;
        assert!(close(s.x, 0.0, 1e-12));
        assert!(close(s.y, expected, 1e-12), "{}", s.y);
        assert!(close(s.y, (a / 2.).tan() / a.tan(), 1e-15));
    }

    #[test]
    fn behind_view_is_rejected_and_clamped() {
        let p = Projection::default();
        let v = front_view();
        assert_eq!(
            p.world_to_screen(Vec3::new(1., 0., 3.), &v),
            Err(GeometryError::BehindView)
        );
        let c = p.world_to_screen_clamped(Vec3::new(1., 0., 3.), &v);
        assert!(close(c.norm(), p.half_diagonal(), 1e-12));
        assert!(c.x > 0.0 && c.y.abs() < 1e-12);
    }

    #[test]
    fn screen_roundtrip() {
        let p = Projection::default();
        let v = ViewState::looking(Vec3::new(1., 2., 3.), Vec3::new(0.3, -0.2, -1.0), Vec3::Y).unwrap();
        let s = ScreenVec::new(0.7, -1.3);
        let w = p.screen_to_world(s, &v, 5.0);
        let back = p.world_to_screen(w, &v).unwrap();
        assert!(back.distance(s) < 1e-12);
    }

    #[test]
    fn radian_examples() {
        assert_eq!(radian_of(ScreenVec::new(1., 0.)).unwrap(), 0.0);
        assert!(close(radian_of(ScreenVec::new(0., 1.)).unwrap(), PI / 2.0, 1e-15));
        assert!(close(radian_of(ScreenVec::new(-2., 0.)).unwrap(), PI, 1e-15));
        assert!(close(radian_of(ScreenVec::new(0., -1.)).unwrap(), 1.5 * PI, 1e-15));
        assert_eq!(
            radian_of(ScreenVec::new(1e-13, 0.)),
            Err(GeometryError::DegenerateVector)
        );
    }

    #[test]
    fn angular_distance_examples() {
        assert!(close(angular_distance(0., PI / 2.), PI / 2., 1e-15));
        assert!(close(angular_distance(0.1, TAU - 0.1), 0.2, 1e-12));
        assert_eq!(angular_distance(1.234, 1.234), 0.0);
    }

    #[test]
    fn wrap_radian_stays_in_range() {
        assert_eq!(wrap_radian(-1e-20), 0.0);
        assert!(close(wrap_radian(-PI / 2.), 1.5 * PI, 1e-15));
        assert!(close(wrap_radian(5.0 * PI), PI, 1e-12));
    }

    #[test]
    fn fit_exact_line() {
        let mut tr = GazeTrace::new(0.3, 0.05);
        for i in 0..10 {
            tr.push(i as f64 / 60.0, ScreenVec::new(i as f64 * 0.02, 0.0)).unwrap();
        }
        let d = fit_gaze_direction(&tr).unwrap();
        assert!(close(d.x, 1.0, 1e-12) && close(d.y, 0.0, 1e-12));
    }

    #[test]
    fn fit_stationary_is_none() {
        let mut tr = GazeTrace::new(0.3, 0.05);
        for i in 0..10 {
            tr.push(i as f64 / 60.0, ScreenVec::new(0.4, 0.4)).unwrap();
        }
        assert_eq!(fit_gaze_direction(&tr), None);
    }

    #[test]
    fn fit_reversed_motion_flips_sign() {
        let mut tr = GazeTrace::new(0.3, 0.05);
        for i in 0..10 {
            tr.push(i as f64 / 60.0, ScreenVec::new(0.0, -(i as f64) * 0.03)).unwrap();
        }
        let d = fit_gaze_direction(&tr).unwrap();
        assert!(close(d.y, -1.0, 1e-12));
    }

    #[test]
    fn trace_evicts_old_samples() {
        let mut tr = GazeTrace::new(0.3, 0.05);
        for i in 0..60 {
            tr.push(i as f64 / 60.0, ScreenVec::ZERO).unwrap();
        }
        // Window [59/60 - 0.3, 59/60] holds 19 samples at 60 Hz.
        assert_eq!(tr.len(), 19);
        assert!(tr.push(0.5, ScreenVec::ZERO).is_err());
    }

    #[test]
    fn turn_toward_respects_limit() {
        let to = Vec3::new(1., 0., 0.);
        let from = -Vec3::Z;
        let r = turn_toward(from, to, 0.1);
        assert!(close(from.angle_to(r), 0.1, 1e-12));
        assert!(close(r.norm(), 1.0, 1e-12));
        assert_eq!(turn_toward(from, to, 10.0), to);
    }
}
