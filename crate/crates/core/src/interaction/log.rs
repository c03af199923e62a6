use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::PipelineEvent;

/// One line of the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub session: String,
    #[serde(flatten)]
    pub event: PipelineEvent,
}

impl EventRecord {
    pub fn new(t: f64, session: impl Into<String>, event: PipelineEvent) -> Self {
        Self {
            t,
            session: session.into(),
            event,
        }
    }
}

/// Writes records as line-delimited JSON.
pub fn write_event_log<'a, W: Write>(
    mut out: W,
    records: impl IntoIterator<Item = &'a EventRecord>,
) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads line-delimited records, skipping blank lines.
pub fn read_event_log<R: BufRead>(input: R) -> io::Result<Vec<EventRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
