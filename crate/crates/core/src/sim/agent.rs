use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::{turn_toward, ScreenVec, Vec3, ViewState};
use crate::interaction::{ButtonKind, InputEvent, Phase, Pipeline};
use crate::layout::initial_of;
use crate::scene::{ObjectId, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Seconds of rest after every phase change before the agent acts.
    pub reaction_latency: f64,
    /// Screen units per second.
    pub max_gaze_speed: f64,
    /// Degrees per second.
    pub max_head_speed: f64,
    /// Standard deviation of the per-goal aim error, in screen units.
    pub noise_sigma: f64,
    /// Half-angle in degrees within which the agent confirms an anchor.
    pub confirm_cone_deg: f64,
    pub seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            reaction_latency: 0.2,
            max_gaze_speed: 3.0,
            max_head_speed: 120.0,
            noise_sigma: 0.01,
            confirm_cone_deg: 3.0,
            seed: 0,
        }
    }
}

impl AgentConfig {
    /// No latency, no noise and unbounded eye and head speed.
    pub fn ideal() -> Self {
        Self {
            reaction_latency: 0.0,
            max_gaze_speed: f64::INFINITY,
            max_head_speed: f64::INFINITY,
            noise_sigma: 0.0,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let ok = self.reaction_latency >= 0.0
            && self.reaction_latency.is_finite()
            && self.max_gaze_speed >= 0.0
            && self.max_head_speed >= 0.0
            && self.noise_sigma >= 0.0
            && self.noise_sigma.is_finite()
            && self.confirm_cone_deg > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("agent: {self:?}")))
        }
    }
}

/// Scripted user that locates one target object.
///
/// It fixates for at least one tick and waits out a reaction latency after
/// every phase change, then:
/// presses the button, dwells on the target's initial, looks toward the
/// target label, pursues it in flight, turns the head after it when it leaves
/// the central field of view and confirms once the anchor is inside the
/// confirm cone. If the target is dropped, pruned or never launched it
/// cancels and starts over.
///
/// The gaze is kept as a world ray so head turns do not move it.
#[derive(Debug, Clone)]
pub struct Agent {
    config: AgentConfig,
    target: ObjectId,
    target_pos: Vec3,
    initial: char,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
    gaze_ray: Vec3,
    phase: Option<Phase>,
    wait: f64,
    aim: ScreenVec,
    pressed: bool,
    prev_label: Option<Vec3>,
    t: f64,
}

/// Moves `from` toward `to` by at most `step`.
fn move_toward(from: ScreenVec, to: ScreenVec, step: f64) -> ScreenVec {
    let d = to - from;
    let len = d.norm();
    if len <= step {
        to
    } else {
        from + d * (step / len)
    }
}

impl Agent {
    pub fn new(config: AgentConfig, scene: &Scene, target: ObjectId) -> Result<Self, SimError> {
        config.validate()?;
        let obj = scene.object(target).ok_or(SimError::UnknownTarget(target))?;
        let view = scene.spawn.view()?;
        let noise = Normal::new(0.0, config.noise_sigma)
            .map_err(|e| SimError::InvalidConfig(format!("noise: {e}")))?;
        Ok(Self {
            config,
            target,
            target_pos: obj.position,
            initial: initial_of(&obj.name),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            noise,
            gaze_ray: view.view_dir,
            phase: None,
            wait: 0.0,
            aim: ScreenVec::ZERO,
            pressed: false,
            prev_label: None,
            t: 0.0,
        })
    }

    pub fn target(&self) -> ObjectId {
        self.target
    }

    /// Inputs for the next tick, in the order they should be applied. The
    /// caller applies them and then the tick itself.
    pub fn act(&mut self, pipeline: &Pipeline, dt: f64) -> Vec<InputEvent> {
        self.t += dt;
        let phase = pipeline.phase();
        let entered = self.phase != Some(phase);
        if entered {
            self.phase = Some(phase);
            self.wait = self.config.reaction_latency;
            self.aim = ScreenVec::new(self.noise.sample(&mut self.rng), self.noise.sample(&mut self.rng));
            self.pressed = false;
            self.prev_label = None;
        }
        let projection = pipeline.config().projection;
        let mut view = *pipeline.view();
        let screen = |p: Vec3, v: &ViewState| projection.world_to_screen_clamped(v.viewpoint + p, v);
        let mut gaze = screen(self.gaze_ray, &view);
        let mut out = Vec::new();

        // The first tick of a phase always fixates so the gaze path has a
        // start point. Half a tick of slack keeps a latency that is a whole
        // number of ticks from rounding up.
        if entered || self.wait > 0.5 * dt {
            self.wait -= dt;
            out.push(InputEvent::Gaze { t: self.t, point: gaze });
            return out;
        }

        let step = self.config.max_gaze_speed * dt;
        let head_step = (self.config.max_head_speed * dt).to_radians();
        let mut action = None;
        match phase {
            Phase::Idle => {
                if !self.pressed {
                    self.pressed = true;
                    action = Some(InputEvent::Button {
                        kind: ButtonKind::Start,
                    });
                }
            }
            Phase::FirstLevel => {
                if let Some(goal) = pipeline.first_level().and_then(|r| r.position(self.initial)) {
                    gaze = move_toward(gaze, goal + self.aim, step);
                }
            }
            Phase::SecondLevel => {
                match pipeline.second_level().and_then(|l| l.find_anchor(self.target)) {
                    Some((_, pos)) => gaze = move_toward(gaze, pos + self.aim, step),
                    None => action = Some(InputEvent::Cancel),
                }
            }
            Phase::Guiding => {
                let flight = pipeline
                    .guidance()
                    .and_then(|g| g.flights.iter().find(|f| f.anchor == self.target));
                match flight {
                    None => action = Some(InputEvent::Cancel),
                    Some(f) if f.arrived() => {
                        let to = self.target_pos - view.viewpoint;
                        if let Some(head) = self.turn_head(&view, to, head_step) {
                            out.push(head.0);
                            view = head.1;
                        }
                        gaze = move_toward(screen(self.gaze_ray, &view), screen(to, &view) + self.aim, step);
                        let cone = self.config.confirm_cone_deg.to_radians();
                        if view.view_dir.angle_to(to) <= cone {
                            action = Some(InputEvent::Confirm {
                                object: self.target,
                            });
                        }
                    }
                    Some(f) => {
                        let rel = f.position() - view.viewpoint;
                        if screen(rel, &view).norm() > 1.0 {
                            if let Some(head) = self.turn_head(&view, rel, head_step) {
                                out.push(head.0);
                                view = head.1;
                            }
                        }
                        gaze = screen(self.gaze_ray, &view);
                        let at = screen(rel, &view);
                        let moved = self.prev_label.map(|p| at - screen(p, &view));
                        self.prev_label = Some(rel);
                        gaze = pursue(gaze, at + self.aim, moved, step);
                    }
                }
            }
            Phase::Located => {}
        }
        self.gaze_ray = projection.screen_to_world_dir(gaze, &view);
        out.push(InputEvent::Gaze { t: self.t, point: gaze });
        out.extend(action);
        out
    }

    fn turn_head(&self, view: &ViewState, toward: Vec3, max: f64) -> Option<(InputEvent, ViewState)> {
        let to = toward.try_normalize()?;
        let dir = turn_toward(view.view_dir, to, max);
        let next = ViewState::looking(view.viewpoint, dir, Vec3::Y)
            .ok()?
            .with_gaze(view.gaze);
        Some((
            InputEvent::Head {
                view_dir: next.view_dir,
                up: next.up,
            },
            next,
        ))
    }
}

/// One pursuit step toward a moving goal.
///
/// Closing in is allowed only when it does not run against the goal's own
/// motion; otherwise the gaze matches that motion and keeps the sideways part
/// of the gap, so the gaze never heads more than 90 degrees away from the
/// label it follows.
fn pursue(gaze: ScreenVec, goal: ScreenVec, moved: Option<ScreenVec>, step: f64) -> ScreenVec {
    let gap = goal - gaze;
    let Some((v, unit)) = moved.and_then(|m| m.try_normalize().map(|u| (m, u))) else {
        return move_toward(gaze, goal, step);
    };
    if gap.dot(v) >= 0.0 {
        return move_toward(gaze, goal, step);
    }
    let side = gap - unit * gap.dot(unit);
    let mv = v + side;
    let len = mv.norm();
    if len > step {
        gaze + mv * (step / len)
    } else {
        gaze + mv
    }
}
