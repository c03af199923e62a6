//! The locating pipeline as an explicit state machine driven by input
//! events: button, gaze samples, head pose, confirm, cancel and ticks.

mod dwell;
mod log;
mod pipeline;

pub use dwell::{DwellState, DEFAULT_DWELL};
pub use log::{read_event_log, write_event_log, EventRecord};
pub use pipeline::{
    ButtonKind, FlightSnapshot, InputEvent, Phase, Pipeline, PipelineConfig, PipelineEvent,
    PipelineSnapshot,
};
