use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::DwellState;
use crate::error::{GeometryError, GuidanceError, PipelineError};
use crate::geometry::{fit_gaze_direction, GazeTrace, Projection, ScreenVec, Vec3, ViewState};
use crate::guidance::{select_candidates, GuidanceParams, GuidanceState};
use crate::layout::{
    build_first_level, labels_for_objects, layout_for, FirstLevelLayout, Label, LabelId,
    LayoutParams, Method, MultiCircleLayout,
};
use crate::scene::{ObjectId, Scene, SceneObject};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Idle,
    FirstLevel,
    SecondLevel,
    Guiding,
    Located,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Idle => "idle",
            Phase::FirstLevel => "first_level",
            Phase::SecondLevel => "second_level",
            Phase::Guiding => "guiding",
            Phase::Located => "located",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ButtonKind {
    #[default]
    Start,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "input", rename_all = "snake_case")]
pub enum InputEvent {
    Button { kind: ButtonKind },
    /// Gaze point in current screen coordinates at time `t`.
    Gaze { t: f64, point: ScreenVec },
    /// New head orientation; the viewpoint stays put.
    Head { view_dir: Vec3, up: Vec3 },
    /// Object hit by the pointing ray when confirming.
    Confirm { object: ObjectId },
    Cancel,
    Tick { dt: f64 },
}

impl InputEvent {
    pub fn name(&self) -> &'static str {
        match self {
            InputEvent::Button { .. } => "button",
            InputEvent::Gaze { .. } => "gaze",
            InputEvent::Head { .. } => "head",
            InputEvent::Confirm { .. } => "confirm",
            InputEvent::Cancel => "cancel",
            InputEvent::Tick { .. } => "tick",
        }
    }
}

/// Structured events emitted for logging and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", content = "payload", rename_all = "snake_case")]
pub enum PipelineEvent {
    FirstLevelShown { letters: usize },
    LetterSelected { letter: char },
    SecondLevelShown { circles: usize, placed: usize, dropped: usize },
    CandidatesChosen { count: usize, labels: Vec<LabelId> },
    LabelPruned { label: LabelId },
    FlightArrived { label: LabelId },
    FlightExpired { label: LabelId },
    TargetLocated { label: LabelId, object: ObjectId },
    ConfirmRejected { object: ObjectId },
    Cancelled { from: Phase },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub method: Method,
    pub projection: Projection,
    pub layout: LayoutParams,
    pub guidance: GuidanceParams,
    /// Seconds the gaze must rest on a letter.
    pub dwell: f64,
    /// Screen distance the gaze must travel from the layout center before
    /// its direction selects candidates.
    pub candidate_offset: f64,
    pub gaze_window: f64,
    pub gaze_min_path: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Ec3,
            projection: Projection::default(),
            layout: LayoutParams::default(),
            guidance: GuidanceParams::default(),
            dwell: super::DEFAULT_DWELL,
            candidate_offset: 0.15,
            gaze_window: GazeTrace::DEFAULT_WINDOW,
            gaze_min_path: GazeTrace::DEFAULT_MIN_PATH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightSnapshot {
    pub id: LabelId,
    pub text: String,
    pub anchor: ObjectId,
    pub pos2d: ScreenVec,
    pub pos3d: Vec3,
    pub t: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSnapshot {
    pub phase: Phase,
    pub clock: f64,
    pub view: ViewState,
    pub letter: Option<char>,
    pub dwell: Option<DwellState>,
    pub first_level: Option<FirstLevelLayout>,
    pub second_level: Option<MultiCircleLayout>,
    pub flights: Vec<FlightSnapshot>,
    pub located: Option<LabelId>,
}

/// One locating session: button, letter dwell, second-level layout,
/// gaze-selected candidates, guidance and confirmation.
///
/// Gaze samples are stored as world rays so the gaze path can be re-projected
/// after the head turns.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    objects: Vec<SceneObject>,
    labels: Vec<Label>,
    phase: Phase,
    clock: f64,
    view: ViewState,
    dwell: DwellState,
    first: Option<FirstLevelLayout>,
    letter: Option<char>,
    second: Option<MultiCircleLayout>,
    guidance: Option<GuidanceState>,
    located: Option<LabelId>,
    rays: VecDeque<(f64, Vec3)>,
}

impl Pipeline {
    pub fn new(scene: &Scene, config: PipelineConfig) -> Result<Self, PipelineError> {
        config.layout.validate()?;
        config.guidance.validate()?;
        Ok(Self {
            config,
            objects: scene.objects.clone(),
            labels: labels_for_objects(&scene.objects),
            phase: Phase::Idle,
            clock: 0.0,
            view: scene.spawn.view()?,
            dwell: DwellState::new(config.dwell),
            first: None,
            letter: None,
            second: None,
            guidance: None,
            located: None,
            rays: VecDeque::new(),
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn view(&self) -> &ViewState {
        &self.view
    }

    pub fn objects(&self) -> &[SceneObject] {
        &self.objects
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dwell(&self) -> &DwellState {
        &self.dwell
    }

    pub fn first_level(&self) -> Option<&FirstLevelLayout> {
        self.first.as_ref()
    }

    pub fn letter(&self) -> Option<char> {
        self.letter
    }

    pub fn second_level(&self) -> Option<&MultiCircleLayout> {
        self.second.as_ref()
    }

    pub fn guidance(&self) -> Option<&GuidanceState> {
        self.guidance.as_ref()
    }

    pub fn located(&self) -> Option<LabelId> {
        self.located
    }

    /// Recent gaze path re-projected with the current head pose.
    pub fn gaze_trace(&self) -> GazeTrace {
        let mut trace = GazeTrace::new(self.config.gaze_window, self.config.gaze_min_path);
        for &(t, dir) in &self.rays {
            let p = self
                .config
                .projection
                .world_to_screen_clamped(self.view.viewpoint + dir, &self.view);
            trace.push(t, p).expect("rays are strictly increasing in time");
        }
        trace
    }

    pub fn snapshot(&self) -> PipelineSnapshot {
        let projection = &self.config.projection;
        let flights = self
            .guidance
            .iter()
            .flat_map(|g| &g.flights)
            .map(|f| {
                let pos3d = f.position();
                FlightSnapshot {
                    id: f.label_id,
                    text: f.text.clone(),
                    anchor: f.anchor,
                    pos2d: projection.world_to_screen_clamped(pos3d, &self.view),
                    pos3d,
                    t: f.t,
                    s: f.s,
                }
            })
            .collect();
        PipelineSnapshot {
            phase: self.phase,
            clock: self.clock,
            view: self.view,
            letter: self.letter,
            dwell: (self.phase == Phase::FirstLevel).then_some(self.dwell),
            first_level: self.first.clone(),
            second_level: self.second.clone(),
            flights,
            located: self.located,
        }
    }

    fn invalid(&self, event: &InputEvent) -> PipelineError {
        PipelineError::InvalidTransition {
            phase: self.phase.name(),
            event: event.name(),
        }
    }

    /// Applies one input. Events that are not defined in the current phase
    /// return [`PipelineError::InvalidTransition`] and leave the state as is.
    pub fn step(&mut self, event: &InputEvent) -> Result<Vec<PipelineEvent>, PipelineError> {
        match *event {
            InputEvent::Button { .. } => {
                if self.phase != Phase::Idle {
                    return Err(self.invalid(event));
                }
                self.press()
            }
            InputEvent::Gaze { t, point } => {
                self.gaze(t, point)?;
                Ok(Vec::new())
            }
            InputEvent::Head { view_dir, up } => {
                self.view = ViewState::new(self.view.viewpoint, view_dir, up, self.view.gaze)?;
                Ok(Vec::new())
            }
            InputEvent::Confirm { object } => {
                if self.phase != Phase::Guiding {
                    return Err(self.invalid(event));
                }
                let guidance = self.guidance.as_mut().expect("guiding has flights");
                Ok(match guidance.confirm(object) {
                    Some(label) => {
                        self.located = Some(label);
                        self.enter(Phase::Located);
                        vec![PipelineEvent::TargetLocated { label, object }]
                    }
                    None => vec![PipelineEvent::ConfirmRejected { object }],
                })
            }
            InputEvent::Cancel => {
                if self.phase == Phase::Idle {
                    return Ok(Vec::new());
                }
                let from = self.phase;
                self.reset();
                Ok(vec![PipelineEvent::Cancelled { from }])
            }
            InputEvent::Tick { dt } => self.tick(dt),
        }
    }

    fn reset(&mut self) {
        self.enter(Phase::Idle);
        self.dwell.reset();
        self.first = None;
        self.letter = None;
        self.second = None;
        self.guidance = None;
        self.located = None;
    }

    fn enter(&mut self, phase: Phase) {
        self.phase = phase;
        self.rays.clear();
    }

    fn press(&mut self) -> Result<Vec<PipelineEvent>, PipelineError> {
        match self.config.method {
            Method::Cc1 => Err(PipelineError::Layout(crate::error::LayoutError::Unsupported("cc1"))),
            Method::Cc2 => self.show_second_level(self.labels.clone(), ScreenVec::ZERO),
            _ => {
                let ring = build_first_level(&self.labels)?;
                let letters = ring.letters.len();
                self.first = Some(ring);
                self.dwell.reset();
                self.enter(Phase::FirstLevel);
                Ok(vec![PipelineEvent::FirstLevelShown { letters }])
            }
        }
    }

    fn gaze(&mut self, t: f64, point: ScreenVec) -> Result<(), PipelineError> {
        if !t.is_finite() || !point.is_finite() {
            return Err(GeometryError::DegenerateVector.into());
        }
        let dir = self.config.projection.screen_to_world_dir(point, &self.view);
        match self.rays.back_mut() {
            Some((last, _)) if t < *last => {
                return Err(GeometryError::NonMonotonicTimestamp {
                    previous: *last,
                    got: t,
                }
                .into())
            }
            Some((last, d)) if t == *last => *d = dir,
            _ => self.rays.push_back((t, dir)),
        }
        while self
            .rays
            .front()
            .is_some_and(|&(s, _)| s < t - self.config.gaze_window)
        {
            self.rays.pop_front();
        }
        self.view.gaze = point;
        Ok(())
    }

    fn show_second_level(
        &mut self,
        labels: Vec<Label>,
        center: ScreenVec,
    ) -> Result<Vec<PipelineEvent>, PipelineError> {
        let view = self.view.with_gaze(center);
        let layout = layout_for(
            self.config.method,
            &labels,
            &self.objects,
            &view,
            &self.config.projection,
            &self.config.layout,
        )?;
        let shown = PipelineEvent::SecondLevelShown {
            circles: layout.circle_count(),
            placed: layout.placed_count(),
            dropped: layout.dropped.len(),
        };
        self.second = Some(layout);
        self.enter(Phase::SecondLevel);
        Ok(vec![shown])
    }

    fn tick(&mut self, dt: f64) -> Result<Vec<PipelineEvent>, PipelineError> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(GuidanceError::NonPositiveStep(dt).into());
        }
        self.clock += dt;
        match self.phase {
            Phase::Idle | Phase::Located => Ok(Vec::new()),
            Phase::FirstLevel => {
                let ring = self.first.as_ref().expect("first level is shown");
                let Some(letter) = self.dwell.update(self.view.gaze, ring, dt) else {
                    return Ok(Vec::new());
                };
                let center = ring.position(letter).expect("hit letters are on the ring");
                self.letter = Some(letter);
                let labels: Vec<Label> = self
                    .labels
                    .iter()
                    .filter(|l| l.initial() == letter)
                    .cloned()
                    .collect();
                let mut out = vec![PipelineEvent::LetterSelected { letter }];
                out.extend(self.show_second_level(labels, center)?);
                Ok(out)
            }
            Phase::SecondLevel => self.try_select(),
            Phase::Guiding => {
                let trace = self.gaze_trace();
                let guidance = self.guidance.as_mut().expect("guiding has flights");
                let report = guidance.step(
                    &self.view,
                    &self.config.projection,
                    &trace,
                    dt,
                    &self.config.guidance,
                )?;
                let mut out = Vec::new();
                out.extend(report.arrived.into_iter().map(|label| PipelineEvent::FlightArrived { label }));
                out.extend(report.pruned.into_iter().map(|label| PipelineEvent::LabelPruned { label }));
                out.extend(report.expired.into_iter().map(|label| PipelineEvent::FlightExpired { label }));
                Ok(out)
            }
        }
    }

    fn try_select(&mut self) -> Result<Vec<PipelineEvent>, PipelineError> {
        let layout = self.second.as_ref().expect("second level is shown");
        if self.view.gaze.distance(layout.center) < self.config.candidate_offset {
            return Ok(Vec::new());
        }
        let Some(dir) = fit_gaze_direction(&self.gaze_trace()) else {
            return Ok(Vec::new());
        };
        let candidates = select_candidates(layout, dir);
        if candidates.is_empty() {
            return Ok(Vec::new());
        }
        let mut guidance = GuidanceState::launch(
            layout,
            &candidates,
            &self.objects,
            &self.view,
            &self.config.projection,
            &self.config.guidance,
        )?;
        guidance.last_gaze_dir = Some(dir);
        let labels: Vec<LabelId> = guidance.flights.iter().map(|f| f.label_id).collect();
        self.guidance = Some(guidance);
        self.enter(Phase::Guiding);
        Ok(vec![PipelineEvent::CandidatesChosen {
            count: labels.len(),
            labels,
        }])
    }
}
