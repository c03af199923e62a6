use serde::{Deserialize, Serialize};

use super::{Agent, AgentConfig};
use crate::error::{PipelineError, SimError};
use crate::interaction::{EventRecord, InputEvent, Phase, Pipeline, PipelineConfig, PipelineEvent};
use crate::layout::Method;
use crate::scene::{ObjectId, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub max_seconds: f64,
    pub tick_hz: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_seconds: 60.0,
            tick_hz: 60.0,
        }
    }
}

impl Limits {
    pub fn dt(&self) -> f64 {
        1.0 / self.tick_hz
    }

    pub fn max_ticks(&self) -> u64 {
        (self.max_seconds * self.tick_hz).round() as u64
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.tick_hz > 0.0 && self.tick_hz.is_finite() && self.max_seconds > 0.0 && self.max_seconds.is_finite() {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("limits: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub method: Method,
    pub target: ObjectId,
    pub ticks: u64,
    /// Seconds; always `ticks / tick_hz`.
    pub time: f64,
    /// Total head rotation in degrees.
    pub rotation_deg: f64,
    pub success: bool,
    pub pruned_count: usize,
    /// Dropped labels in the last second level shown.
    pub dropped_count: usize,
    /// Circles in the last second level shown.
    pub circle_count: usize,
    pub retries: usize,
    /// Seconds the target spent inside the central field of view.
    pub fov_time: f64,
}

/// Inputs and pipeline events of one trial, in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub inputs: Vec<InputEvent>,
    pub events: Vec<EventRecord>,
}

/// Runs the scripted agent against a fresh pipeline until the target is
/// located or the time limit passes.
pub fn run_trial(
    scene: &Scene,
    target: ObjectId,
    config: &PipelineConfig,
    agent: &AgentConfig,
    limits: &Limits,
) -> Result<TrialMetrics, SimError> {
    run(scene, target, config, agent, limits, None)
}

/// Like [`run_trial`] but also records every input and event.
pub fn run_trial_logged(
    scene: &Scene,
    target: ObjectId,
    config: &PipelineConfig,
    agent: &AgentConfig,
    limits: &Limits,
    session: &str,
) -> Result<(TrialMetrics, TrialLog), SimError> {
    let mut log = TrialLog::default();
    let m = run(scene, target, config, agent, limits, Some((&mut log, session)))?;
    Ok((m, log))
}

fn run(
    scene: &Scene,
    target: ObjectId,
    config: &PipelineConfig,
    agent_config: &AgentConfig,
    limits: &Limits,
    mut log: Option<(&mut TrialLog, &str)>,
) -> Result<TrialMetrics, SimError> {
    limits.validate()?;
    let target_pos = scene.object(target).ok_or(SimError::UnknownTarget(target))?.position;
    let max_ticks = limits.max_ticks();
    let mut m = TrialMetrics {
        method: config.method,
        target,
        ticks: max_ticks,
        time: max_ticks as f64 / limits.tick_hz,
        rotation_deg: 0.0,
        success: false,
        pruned_count: 0,
        dropped_count: 0,
        circle_count: 0,
        retries: 0,
        fov_time: 0.0,
    };
    if config.method == Method::Cc1 {
        // Free search has no layout to drive; it always runs out the clock.
        return Ok(m);
    }

    let mut pipeline = Pipeline::new(scene, *config)?;
    let mut agent = Agent::new(*agent_config, scene, target)?;
    let dt = limits.dt();
    let half_angle = config.projection.central_half_angle;
    let mut dir = pipeline.view().view_dir;
    let to_target = target_pos - pipeline.view().viewpoint;

    for tick in 1..=max_ticks {
        let mut inputs = agent.act(&pipeline, dt);
        inputs.push(InputEvent::Tick { dt });
        for input in &inputs {
            let events = match pipeline.step(input) {
                Ok(events) => events,
                Err(e @ PipelineError::InvalidTransition { .. }) => {
                    log::debug!("tick {tick}: {e}");
                    Vec::new()
                }
                Err(e) => return Err(e.into()),
            };
            for event in &events {
                match *event {
                    PipelineEvent::LabelPruned { .. } => m.pruned_count += 1,
                    PipelineEvent::SecondLevelShown { circles, dropped, .. } => {
                        m.circle_count = circles;
                        m.dropped_count = dropped;
                    }
                    PipelineEvent::Cancelled { .. } => m.retries += 1,
                    _ => {}
                }
            }
            if let Some((log, session)) = log.as_mut() {
                log.inputs.push(input.clone());
                let t = pipeline.clock();
                log.events
                    .extend(events.into_iter().map(|e| EventRecord::new(t, session.to_string(), e)));
            }
        }
        let next = pipeline.view().view_dir;
        m.rotation_deg += dir.angle_to(next).to_degrees();
        dir = next;
        if next.angle_to(to_target) <= half_angle {
            m.fov_time += dt;
        }
        if pipeline.phase() == Phase::Located {
            m.success = true;
            m.ticks = tick;
            m.time = tick as f64 / limits.tick_hz;
            break;
        }
    }
    Ok(m)
}
