//! Flying labels: trajectories, adaptive speed, candidate selection and
//! pruning of labels that move against the gaze.

mod speed;
mod trajectory;

pub use speed::{normalized_alignment, update_speed};
pub use trajectory::{
    eval_trajectory, make_trajectory, Trajectory, TrajectoryDump, DUMP_SAMPLES,
    TRAJECTORY_FORMAT_VERSION,
};

use serde::{Deserialize, Serialize};

use crate::error::GuidanceError;
use crate::geometry::{fit_gaze_direction, GazeTrace, Projection, ScreenVec, Vec3, ViewState};
use crate::layout::{Label, LabelId, MultiCircleLayout};
use crate::scene::{ObjectId, SceneObject};

/// Which screen direction of a flight is compared against the gaze motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneDirection {
    /// Projected start-to-end chord.
    #[default]
    Chord,
    /// Projected curve tangent at the current parameter.
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceParams {
    /// Seconds to traverse a whole trajectory at speed 1.
    pub flight_duration: f64,
    pub initial_speed: f64,
    /// Distance from the viewpoint at which a label starts flying.
    pub label_depth: f64,
    /// Seconds an arrived label waits at its anchor for confirmation.
    pub confirm_timeout: f64,
    pub prune_direction: PruneDirection,
}

impl Default for GuidanceParams {
    fn default() -> Self {
        Self {
            flight_duration: 2.5,
            initial_speed: 0.3,
            label_depth: 1.5,
            confirm_timeout: 10.0,
            prune_direction: PruneDirection::Chord,
        }
    }
}

impl GuidanceParams {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        let ok = self.flight_duration > 0.0
            && self.initial_speed > 0.0
            && self.initial_speed <= 1.0
            && self.label_depth > 0.0
            && self.confirm_timeout > 0.0;
        if ok {
            Ok(())
        } else {
            Err(GuidanceError::ParameterOutOfRange(self.initial_speed))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightState {
    pub label_id: LabelId,
    pub anchor: ObjectId,
    pub text: String,
    pub trajectory: Trajectory,
    pub t: f64,
    pub s: f64,
    pub valid: bool,
    /// Guidance clock value at which the flight reached its anchor.
    pub arrived_at: Option<f64>,
}

impl FlightState {
    pub fn new(label: &Label, trajectory: Trajectory, s0: f64) -> Self {
        Self {
            label_id: label.id,
            anchor: label.anchor,
            text: label.text.clone(),
            trajectory,
            t: 0.0,
            s: s0,
            valid: true,
            arrived_at: None,
        }
    }

    pub fn position(&self) -> Vec3 {
        self.trajectory.eval(self.t).expect("t stays in [0, 1]")
    }

    pub fn arrived(&self) -> bool {
        self.arrived_at.is_some()
    }

    /// Screen direction the flight is judged by.
    pub fn screen_direction(
        &self,
        view: &ViewState,
        projection: &Projection,
        mode: PruneDirection,
    ) -> ScreenVec {
        let screen = |p: Vec3| projection.world_to_screen_clamped(p, view);
        match mode {
            PruneDirection::Chord => screen(self.trajectory.end()) - screen(self.trajectory.start()),
            PruneDirection::Tangent => {
                const H: f64 = 1e-4;
                let t0 = self.t.min(1.0 - H);
                let a = self.trajectory.eval(t0).expect("in range");
                let b = self.trajectory.eval(t0 + H).expect("in range");
                screen(b) - screen(a)
            }
        }
    }
}

/// Outcome of one guidance tick.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub pruned: Vec<LabelId>,
    pub arrived: Vec<LabelId>,
    pub expired: Vec<LabelId>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GuidanceState {
    pub flights: Vec<FlightState>,
    pub target_reached: Option<LabelId>,
    /// Seconds since the flights were launched.
    pub clock: f64,
    /// Most recent fitted gaze direction, reused while the gaze rests.
    pub last_gaze_dir: Option<ScreenVec>,
}

/// Whether `a` points more than 90 degrees away from `b`. Degenerate
/// directions never deviate.
fn deviates(a: ScreenVec, b: ScreenVec) -> bool {
    match (a.try_normalize(), b.try_normalize()) {
        (Some(a), Some(b)) => a.dot(b) < 0.0,
        _ => false,
    }
}

/// Labels whose direction from the layout center lies strictly within 90
/// degrees of `gaze_dir`, in layout order.
pub fn select_candidates(layout: &MultiCircleLayout, gaze_dir: ScreenVec) -> Vec<Label> {
    layout
        .placed()
        .filter(|(_, l)| ScreenVec::new(l.rad.cos(), l.rad.sin()).dot(gaze_dir) > 0.0)
        .map(|(_, l)| l.clone())
        .collect()
}

impl GuidanceState {
    /// Starts one flight per candidate, from the label's on-screen position
    /// (lifted to `label_depth`) to its anchor. Candidates whose anchor is
    /// not among `objects` are skipped.
    pub fn launch(
        layout: &MultiCircleLayout,
        candidates: &[Label],
        objects: &[SceneObject],
        view: &ViewState,
        projection: &Projection,
        params: &GuidanceParams,
    ) -> Result<Self, GuidanceError> {
        params.validate()?;
        let mut flights = Vec::with_capacity(candidates.len());
        for label in candidates {
            if flights.iter().any(|f: &FlightState| f.label_id == label.id) {
                continue;
            }
            let Some((_, screen)) = layout.find(label.id) else {
                log::warn!("candidate {:?} is not in the layout", label.id);
                continue;
            };
            let Some(anchor) = objects.iter().find(|o| o.id == label.anchor) else {
                log::warn!("candidate {:?} has no anchor object", label.id);
                continue;
            };
            let p_s = projection.screen_to_world(screen, view, params.label_depth);
            let (trajectory, arrived) =
                match make_trajectory(p_s, anchor.position, view.viewpoint) {
                    Ok(t) => (t, false),
                    Err(GuidanceError::DegenerateFlight) => {
                        (Trajectory::constant(anchor.position), true)
                    }
                    Err(e) => return Err(e),
                };
            let mut flight = FlightState::new(label, trajectory, params.initial_speed);
            if arrived {
                flight.t = 1.0;
                flight.arrived_at = Some(0.0);
            }
            flights.push(flight);
        }
        Ok(Self {
            flights,
            ..Self::default()
        })
    }

    pub fn flight(&self, id: LabelId) -> Option<&FlightState> {
        self.flights.iter().find(|f| f.label_id == id)
    }

    /// Invalidates and removes in-flight labels moving more than 90 degrees
    /// away from `gaze_dir`. Arrived labels are kept. Without a direction
    /// nothing is pruned.
    pub fn prune_invalid(
        &mut self,
        gaze_dir: Option<ScreenVec>,
        view: &ViewState,
        projection: &Projection,
        mode: PruneDirection,
    ) -> Vec<LabelId> {
        let Some(g) = gaze_dir else {
            return Vec::new();
        };
        for f in self.flights.iter_mut().filter(|f| f.valid && !f.arrived()) {
            if deviates(f.screen_direction(view, projection, mode), g) {
                f.valid = false;
            }
        }
        let pruned = self
            .flights
            .iter()
            .filter(|f| !f.valid)
            .map(|f| f.label_id)
            .collect();
        self.flights.retain(|f| f.valid);
        pruned
    }

    /// Advances every flight by `dt` seconds.
    ///
    /// Speed grows with the alignment between the label's projected chord
    /// and the gaze motion and shrinks with its screen distance from the
    /// gaze point. While the gaze rests the previous direction keeps driving
    /// the speed but no label is pruned.
    pub fn step(
        &mut self,
        view: &ViewState,
        projection: &Projection,
        trace: &GazeTrace,
        dt: f64,
        params: &GuidanceParams,
    ) -> Result<StepReport, GuidanceError> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(GuidanceError::NonPositiveStep(dt));
        }
        self.clock += dt;
        let fitted = fit_gaze_direction(trace);
        if fitted.is_some() {
            self.last_gaze_dir = fitted;
        }
        let gaze = trace.latest().map_or(view.gaze, |s| s.point);
        let half_diagonal = projection.half_diagonal();

        let mut report = StepReport::default();
        for f in self.flights.iter_mut().filter(|f| !f.arrived()) {
            let vec_l = f.screen_direction(view, projection, PruneDirection::Chord);
            let alpha = self
                .last_gaze_dir
                .and_then(|g| normalized_alignment(vec_l, g).ok())
                .unwrap_or(0.0);
            let at = projection.world_to_screen_clamped(f.position(), view);
            let dis_lg = (at.distance(gaze) / half_diagonal).clamp(0.0, 1.0);
            f.s = update_speed(f.s, alpha, dis_lg);
            f.t = (f.t + f.s * dt / params.flight_duration).min(1.0);
            if f.t >= 1.0 {
                f.arrived_at = Some(self.clock);
                report.arrived.push(f.label_id);
            }
        }

        report.pruned = self.prune_invalid(fitted, view, projection, params.prune_direction);

        let clock = self.clock;
        self.flights.retain(|f| match f.arrived_at {
            Some(at) if clock - at >= params.confirm_timeout => {
                report.expired.push(f.label_id);
                false
            }
            _ => true,
        });
        Ok(report)
    }

    /// Accepts a confirmation aimed at `object` if a live flight is anchored
    /// there.
    pub fn confirm(&mut self, object: ObjectId) -> Option<LabelId> {
        let id = self
            .flights
            .iter()
            .find(|f| f.valid && f.anchor == object)
            .map(|f| f.label_id)?;
        self.target_reached = Some(id);
        Some(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{CircleLayout, RadianRange};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn view() -> ViewState {
        ViewState::new(Vec3::ZERO, -Vec3::Z, Vec3::Y, ScreenVec::ZERO).unwrap()
    }

    fn layout_at(radians: &[f64]) -> MultiCircleLayout {
        let mut c = CircleLayout::new(0, 1.0);
        for (i, &r) in radians.iter().enumerate() {
            c.entries.push(Label::oriented(i as u32, "x", r, RadianRange::around(r, 1.0)));
        }
        MultiCircleLayout {
            center: ScreenVec::ZERO,
            circles: vec![c],
            dropped: Vec::new(),
        }
    }

    /// Straight flight at depth 2 between two screen-x positions.
    fn flight(id: u32, x0: f64, x1: f64) -> FlightState {
        let label = Label::oriented(id, "x", 0.0, RadianRange::around(0.0, 1.0));
        let tr = make_trajectory(Vec3::new(x0, 0.0, -2.0), Vec3::new(x1, 0.0, -2.0), Vec3::ZERO)
            .unwrap();
        FlightState::new(&label, tr, 0.3)
    }

    fn trace_moving(dx: f64) -> GazeTrace {
        let mut tr = GazeTrace::new(GazeTrace::DEFAULT_WINDOW, GazeTrace::DEFAULT_MIN_PATH);
        for i in 0..10 {
            tr.push(i as f64 / 60.0, ScreenVec::new(dx * i as f64, 0.0)).unwrap();
        }
        tr
    }

    #[test]
    fn candidate_examples() {
        let l = layout_at(&[0.0, PI]);
        let c = select_candidates(&l, ScreenVec::new(1.0, 0.0));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].id, LabelId(0));
    }

    #[test]
    fn candidates_match_angle_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let rad: Vec<f64> = (0..20).map(|_| rng.random_range(0.0..TAU)).collect();
            let g = rng.random_range(0.0..TAU);
            let dir = ScreenVec::new(g.cos(), g.sin());
            let got: Vec<LabelId> = select_candidates(&layout_at(&rad), dir)
                .iter()
                .map(|l| l.id)
                .collect();
            let want: Vec<LabelId> = rad
                .iter()
                .enumerate()
                .filter(|(_, &r)| {
                    let diff = (r - g).rem_euclid(TAU);
                    diff.min(TAU - diff) < FRAC_PI_2
                })
                .map(|(i, _)| LabelId(i as u32))
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn pruning_examples() {
        let mut s = GuidanceState {
            flights: vec![flight(0, -0.5, 0.5), flight(1, 0.5, -0.5)],
            ..Default::default()
        };
        let p = Projection::default();
        let pruned = s.prune_invalid(Some(ScreenVec::new(1.0, 0.0)), &view(), &p, PruneDirection::Chord);
        assert_eq!(pruned, vec![LabelId(1)]);
        assert_eq!(s.flights.len(), 1);
        assert!(s.prune_invalid(None, &view(), &p, PruneDirection::Chord).is_empty());
        let pruned = s.prune_invalid(Some(ScreenVec::new(-1.0, 0.0)), &view(), &p, PruneDirection::Tangent);
        assert_eq!(pruned, vec![LabelId(0)]);
        assert!(s.flights.is_empty());
    }

    #[test]
    fn arrived_flights_are_not_pruned() {
        let mut f = flight(0, -0.5, 0.5);
        f.t = 1.0;
        f.arrived_at = Some(0.0);
        let mut s = GuidanceState {
            flights: vec![f],
            ..Default::default()
        };
        let pruned = s.prune_invalid(
            Some(ScreenVec::new(-1.0, 0.0)),
            &view(),
            &Projection::default(),
            PruneDirection::Chord,
        );
        assert!(pruned.is_empty());
    }

    #[test]
    fn glued_gaze_arrives_within_bound() {
        let params = GuidanceParams::default();
        let p = Projection::default();
        let mut s = GuidanceState {
            flights: vec![flight(0, -0.5, 0.5)],
            ..Default::default()
        };
        let dt = 1.0 / 60.0;
        let mut trace = GazeTrace::new(GazeTrace::DEFAULT_WINDOW, GazeTrace::DEFAULT_MIN_PATH);
        let mut ticks = 0;
        while s.flights[0].arrived_at.is_none() {
            ticks += 1;
            let at = p.world_to_screen_clamped(s.flights[0].position(), &view());
            trace.push(ticks as f64 * dt, at).unwrap();
            s.step(&view(), &p, &trace, dt, &params).unwrap();
            assert!(ticks as f64 * dt <= params.flight_duration / params.initial_speed + dt);
        }
        assert_eq!(s.flights[0].t, 1.0);
    }

    #[test]
    fn resting_gaze_keeps_last_alignment() {
        let params = GuidanceParams::default();
        let p = Projection::default();
        let mut s = GuidanceState {
            flights: vec![flight(0, -0.5, 0.5)],
            last_gaze_dir: Some(ScreenVec::new(1.0, 0.0)),
            ..Default::default()
        };
        let mut rest = GazeTrace::new(GazeTrace::DEFAULT_WINDOW, GazeTrace::DEFAULT_MIN_PATH);
        rest.push(0.0, ScreenVec::new(0.3, 0.0)).unwrap();
        let before = s.flights[0].s;
        let r = s.step(&view(), &p, &rest, 1.0 / 60.0, &params).unwrap();
        assert!(r.pruned.is_empty());
        assert!(s.flights[0].s > before);

        // Stale direction opposite to the flight: alpha 0, no pruning.
        s.last_gaze_dir = Some(ScreenVec::new(-1.0, 0.0));
        let before = s.flights[0].s;
        let r = s.step(&view(), &p, &rest, 1.0 / 60.0, &params).unwrap();
        assert!(r.pruned.is_empty());
        assert_eq!(s.flights[0].s, before);
    }

    #[test]
    fn moving_gaze_prunes_opposing_flight() {
        let params = GuidanceParams::default();
        let mut s = GuidanceState {
            flights: vec![flight(0, -0.5, 0.5), flight(1, 0.5, -0.5)],
            ..Default::default()
        };
        let r = s
            .step(&view(), &Projection::default(), &trace_moving(0.02), 1.0 / 60.0, &params)
            .unwrap();
        assert_eq!(r.pruned, vec![LabelId(1)]);
    }

    #[test]
    fn zero_step_rejected() {
        let mut s = GuidanceState::default();
        let tr = GazeTrace::new(0.3, 0.05);
        let e = s.step(&view(), &Projection::default(), &tr, 0.0, &GuidanceParams::default());
        assert_eq!(e, Err(GuidanceError::NonPositiveStep(0.0)));
    }

    #[test]
    fn arrived_flight_expires() {
        let params = GuidanceParams::default();
        let mut f = flight(0, -0.5, 0.5);
        f.t = 1.0;
        f.arrived_at = Some(0.0);
        let mut s = GuidanceState {
            flights: vec![f],
            ..Default::default()
        };
        let tr = GazeTrace::new(0.3, 0.05);
        let r = s.step(&view(), &Projection::default(), &tr, 9.5, &params).unwrap();
        assert!(r.expired.is_empty());
        let r = s.step(&view(), &Projection::default(), &tr, 0.5, &params).unwrap();
        assert_eq!(r.expired, vec![LabelId(0)]);
        assert!(s.flights.is_empty());
    }

    #[test]
    fn confirm_on_anchor() {
        let mut s = GuidanceState {
            flights: vec![flight(4, -0.5, 0.5)],
            ..Default::default()
        };
        assert_eq!(s.confirm(ObjectId(9)), None);
        assert_eq!(s.confirm(ObjectId(4)), Some(LabelId(4)));
        assert_eq!(s.target_reached, Some(LabelId(4)));
    }

    #[test]
    fn launch_builds_one_flight_per_candidate() {
        let objs: Vec<SceneObject> = (0..3)
            .map(|i| SceneObject {
                id: ObjectId(i),
                name: format!("o{i}"),
                position: Vec3::new(i as f64 - 1.0, 1.0, -4.0),
            })
            .collect();
        let mut layout = layout_at(&[0.5, 2.0, 4.0]);
        for (l, o) in layout.circles[0].entries.iter_mut().zip(&objs) {
            l.anchor = o.id;
        }
        let cands: Vec<Label> = layout.circles[0].entries.clone();
        let s = GuidanceState::launch(
            &layout,
            &cands,
            &objs,
            &view(),
            &Projection::default(),
            &GuidanceParams::default(),
        )
        .unwrap();
        assert_eq!(s.flights.len(), 3);
        for (f, o) in s.flights.iter().zip(&objs) {
            assert_eq!(f.trajectory.end(), o.position);
            assert!((f.trajectory.start().norm() - 1.5).abs() < 1e-12);
            assert_eq!(f.s, 0.3);
        }
    }
}
