use serde::{Deserialize, Serialize};

use crate::geometry::ScreenVec;
use crate::layout::FirstLevelLayout;

pub const DEFAULT_DWELL: f64 = 0.4;

/// Slack for accumulated tick durations that should sum to the threshold.
const DWELL_EPS: f64 = 1e-9;

/// Gaze dwell timer over the letter regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwellState {
    pub target: Option<char>,
    pub accumulated: f64,
    pub threshold: f64,
    /// Set once the current target has fired; cleared when the target changes.
    pub fired: bool,
}

impl Default for DwellState {
    fn default() -> Self {
        Self::new(DEFAULT_DWELL)
    }
}

impl DwellState {
    pub fn new(threshold: f64) -> Self {
        Self {
            target: None,
            accumulated: 0.0,
            threshold,
            fired: false,
        }
    }

    /// Fraction of the threshold reached, for progress displays.
    pub fn progress(&self) -> f64 {
        if self.threshold > 0.0 {
            (self.accumulated / self.threshold).clamp(0.0, 1.0)
        } else {
            1.0
        }
    }

    /// Advances the timer with the region hit on this tick.
    ///
    /// Time accumulates only while the gaze stays in the region it was in on
    /// the previous tick; entering a region starts from zero. Returns the
    /// letter on the tick the threshold is first reached.
    pub fn update_hit(&mut self, hit: Option<char>, dt: f64) -> Option<char> {
        if hit != self.target {
            self.target = hit;
            self.accumulated = 0.0;
            self.fired = false;
            return None;
        }
        let letter = hit?;
        self.accumulated = (self.accumulated + dt).min(self.threshold);
        if !self.fired && self.accumulated >= self.threshold - DWELL_EPS {
            self.fired = true;
            return Some(letter);
        }
        None
    }

    pub fn update(&mut self, gaze: ScreenVec, ring: &FirstLevelLayout, dt: f64) -> Option<char> {
        self.update_hit(ring.hit(gaze), dt)
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.threshold);
    }
}
