//! Line-delimited JSON session protocol.
//!
//! A [`Session`] is a pure state machine: one client line in, zero or more
//! server lines out. Time advances only through gaze timestamps, so a
//! recorded client log replays to the same output. [`serve`] exposes
//! sessions over TCP, one per connection.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use crate::geometry::{ScreenVec, Vec3};
use crate::interaction::{
    ButtonKind, InputEvent, Phase, Pipeline, PipelineConfig, PipelineEvent, PipelineSnapshot,
};
use crate::layout::Method;
use crate::scene::{ObjectId, Scene};

pub const PROTOCOL_VERSION: u32 = 1;

/// Slack when comparing gaze timestamps against tick boundaries.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Hello,
    LoadScene { scene: Scene },
    StartTrial { target_id: ObjectId, condition: Method },
    /// Gaze point in screen units at `t` seconds since the trial started.
    Gaze { t: f64, x: f64, y: f64 },
    Head { view_dir: Vec3, up: Vec3 },
    Button {
        #[serde(default)]
        kind: ButtonKind,
    },
    Confirm { object_id: ObjectId },
    Cancel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMetrics {
    pub time: f64,
    pub rotation_deg: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        server: String,
    },
    Snapshot {
        #[serde(flatten)]
        snapshot: Box<PipelineSnapshot>,
        metrics: SessionMetrics,
    },
    Event {
        t: f64,
        #[serde(flatten)]
        event: PipelineEvent,
    },
    Error {
        code: String,
        msg: String,
    },
}

/// Wire record: every message carries the protocol version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub v: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Envelope<T> {
    pub fn new(body: T) -> Self {
        Self {
            v: PROTOCOL_VERSION,
            body,
        }
    }
}

fn error(code: &str, msg: impl Into<String>) -> ServerMessage {
    ServerMessage::Error {
        code: code.into(),
        msg: msg.into(),
    }
}

fn pipeline_error(e: PipelineError) -> ServerMessage {
    let code = match e {
        PipelineError::InvalidTransition { .. } => "invalid_transition",
        _ => "pipeline",
    };
    error(code, e.to_string())
}

#[derive(Debug, Clone)]
struct Trial {
    pipeline: Pipeline,
    target: ObjectId,
    rotation_deg: f64,
}

/// One client session.
#[derive(Debug, Clone)]
pub struct Session {
    config: PipelineConfig,
    tick_hz: f64,
    scene: Option<Scene>,
    trial: Option<Trial>,
}

impl Session {
    pub fn new(config: PipelineConfig, tick_hz: f64, scene: Option<Scene>) -> Self {
        Self {
            config,
            tick_hz,
            scene,
            trial: None,
        }
    }

    pub fn pipeline(&self) -> Option<&Pipeline> {
        self.trial.as_ref().map(|t| &t.pipeline)
    }

    /// Handles one raw line; malformed input yields a `parse` error and
    /// leaves the session as it was.
    pub fn handle_line(&mut self, line: &str) -> Vec<Envelope<ServerMessage>> {
        let out = match serde_json::from_str::<Envelope<ClientMessage>>(line) {
            Ok(msg) if msg.v != PROTOCOL_VERSION => vec![error(
                "version",
                format!("unsupported protocol version {}, expected {PROTOCOL_VERSION}", msg.v),
            )],
            Ok(msg) => self.handle(msg.body),
            Err(e) => vec![error("parse", e.to_string())],
        };
        out.into_iter().map(Envelope::new).collect()
    }

    /// Applies one message. Every message is answered by a snapshot or an
    /// error, preceded by any events it caused.
    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerMessage> {
        match msg {
            ClientMessage::Hello => vec![ServerMessage::Hello {
                server: format!("circlabel {}", env!("CARGO_PKG_VERSION")),
            }],
            ClientMessage::LoadScene { scene } => match scene.validate() {
                Ok(()) => {
                    self.scene = Some(scene);
                    self.trial = None;
                    vec![]
                }
                Err(e) => vec![error("scene", e.to_string())],
            }
            .into_iter()
            .chain(self.ack())
            .collect(),
            ClientMessage::StartTrial { target_id, condition } => self.start(target_id, condition),
            ClientMessage::Gaze { t, x, y } => {
                let mut out = match self.advance_to(t) {
                    Ok(out) => out,
                    Err(e) => return vec![e],
                };
                match self.apply(&InputEvent::Gaze {
                    t,
                    point: ScreenVec::new(x, y),
                }) {
                    Ok(events) => out.extend(events),
                    Err(e) => {
                        out.push(e);
                        return out;
                    }
                }
                out.extend(self.ack());
                out
            }
            ClientMessage::Head { view_dir, up } => self.apply_and_ack(&InputEvent::Head { view_dir, up }),
            ClientMessage::Button { kind } => self.apply_and_ack(&InputEvent::Button { kind }),
            ClientMessage::Confirm { object_id } => {
                self.apply_and_ack(&InputEvent::Confirm { object: object_id })
            }
            ClientMessage::Cancel => self.apply_and_ack(&InputEvent::Cancel),
        }
    }

    fn start(&mut self, target: ObjectId, method: Method) -> Vec<ServerMessage> {
        let Some(scene) = &self.scene else {
            return vec![error("no_scene", "load a scene first")];
        };
        if scene.object(target).is_none() {
            return vec![error("unknown_target", format!("target {target} is not in the scene"))];
        }
        let config = PipelineConfig {
            method,
            ..self.config
        };
        match Pipeline::new(scene, config) {
            Ok(pipeline) => {
                self.trial = Some(Trial {
                    pipeline,
                    target,
                    rotation_deg: 0.0,
                });
                self.ack()
            }
            Err(e) => vec![pipeline_error(e)],
        }
    }

    fn apply(&mut self, input: &InputEvent) -> Result<Vec<ServerMessage>, ServerMessage> {
        let trial = self
            .trial
            .as_mut()
            .ok_or_else(|| error("no_trial", "start a trial first"))?;
        let before = trial.pipeline.view().view_dir;
        let events = trial.pipeline.step(input).map_err(pipeline_error)?;
        trial.rotation_deg += before.angle_to(trial.pipeline.view().view_dir).to_degrees();
        let t = trial.pipeline.clock();
        Ok(events
            .into_iter()
            .map(|event| ServerMessage::Event { t, event })
            .collect())
    }

    fn apply_and_ack(&mut self, input: &InputEvent) -> Vec<ServerMessage> {
        match self.apply(input) {
            Ok(mut out) => {
                out.extend(self.ack());
                out
            }
            Err(e) => vec![e],
        }
    }

    /// Runs whole ticks up to `t`, with a snapshot after each tick spent
    /// guiding.
    fn advance_to(&mut self, t: f64) -> Result<Vec<ServerMessage>, ServerMessage> {
        if !t.is_finite() {
            return Err(error("pipeline", "gaze timestamp must be finite"));
        }
        let dt = 1.0 / self.tick_hz;
        let mut out = Vec::new();
        loop {
            let trial = self
                .trial
                .as_ref()
                .ok_or_else(|| error("no_trial", "start a trial first"))?;
            if trial.pipeline.clock() + dt > t + TIME_EPS {
                break;
            }
            out.extend(self.apply(&InputEvent::Tick { dt })?);
            if self.pipeline().map(Pipeline::phase) == Some(Phase::Guiding) {
                out.extend(self.ack());
            }
        }
        Ok(out)
    }

    fn ack(&self) -> Vec<ServerMessage> {
        let Some(trial) = &self.trial else {
            return vec![ServerMessage::Snapshot {
                snapshot: Box::new(PipelineSnapshot {
                    phase: Phase::Idle,
                    clock: 0.0,
                    view: self
                        .scene
                        .as_ref()
                        .and_then(|s| s.spawn.view().ok())
                        .unwrap_or_else(|| crate::scene::Spawn::default().view().expect("valid default")),
                    letter: None,
                    dwell: None,
                    first_level: None,
                    second_level: None,
                    flights: Vec::new(),
                    located: None,
                }),
                metrics: SessionMetrics {
                    time: 0.0,
                    rotation_deg: 0.0,
                    success: false,
                },
            }];
        };
        let snapshot = trial.pipeline.snapshot();
        let success = snapshot.located.is_some()
            && trial
                .pipeline
                .guidance()
                .and_then(|g| g.target_reached)
                .and_then(|id| trial.pipeline.labels().iter().find(|l| l.id == id))
                .is_some_and(|l| l.anchor == trial.target);
        vec![ServerMessage::Snapshot {
            metrics: SessionMetrics {
                time: snapshot.clock,
                rotation_deg: trial.rotation_deg,
                success,
            },
            snapshot: Box::new(snapshot),
        }]
    }
}

/// Feeds `lines` through a fresh session and returns every output line.
pub fn replay<'a>(
    config: PipelineConfig,
    tick_hz: f64,
    scene: Option<Scene>,
    lines: impl IntoIterator<Item = &'a str>,
) -> Vec<String> {
    let mut session = Session::new(config, tick_hz, scene);
    lines
        .into_iter()
        .filter(|l| !l.trim().is_empty())
        .flat_map(|l| session.handle_line(l))
        .map(|m| serde_json::to_string(&m).expect("server messages serialize"))
        .collect()
}

fn handle_connection(stream: TcpStream, config: PipelineConfig, tick_hz: f64, scene: Option<Scene>) {
    let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
    let Ok(read) = stream.try_clone() else {
        return;
    };
    let mut writer = std::io::BufWriter::new(stream);
    let mut session = Session::new(config, tick_hz, scene);
    for line in BufReader::new(read).lines() {
        let Ok(line) = line else { break };
        if line.trim().is_empty() {
            continue;
        }
        for msg in session.handle_line(&line) {
            let text = serde_json::to_string(&msg).expect("server messages serialize");
            if writeln!(writer, "{text}").is_err() {
                return;
            }
        }
        if writer.flush().is_err() {
            return;
        }
    }
    log::info!("session {peer} closed");
}

/// Accepts connections forever, one thread and one session per connection.
/// Dropping a connection discards its session.
pub fn serve(
    listener: TcpListener,
    config: PipelineConfig,
    tick_hz: f64,
    scene: Option<Scene>,
) -> std::io::Result<()> {
    let scene = Arc::new(scene);
    for stream in listener.incoming() {
        let stream = stream?;
        let scene = Option::clone(&scene);
        thread::spawn(move || handle_connection(stream, config, tick_hz, scene));
    }
    Ok(())
}
