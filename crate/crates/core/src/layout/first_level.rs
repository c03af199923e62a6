use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::Label;
use crate::error::LayoutError;
use crate::geometry::{angular_distance, radian_of, ScreenVec};

/// Hit area of one letter on the ring: an angular sector clipped to a
/// radial band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LetterRegion {
    pub radian: f64,
    pub half_width: f64,
    pub inner: f64,
    pub outer: f64,
}

impl LetterRegion {
    pub fn contains(&self, p: ScreenVec) -> bool {
        let r = p.norm();
        if r < self.inner || r > self.outer {
            return false;
        }
        match radian_of(p) {
            Ok(a) => angular_distance(a, self.radian) <= self.half_width,
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterSlot {
    pub letter: char,
    pub radian: f64,
    pub region: LetterRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstLevelLayout {
    pub letters: Vec<LetterSlot>,
    pub radius: f64,
}

impl FirstLevelLayout {
    pub fn hit(&self, p: ScreenVec) -> Option<char> {
        self.letters
            .iter()
            .find(|s| s.region.contains(p))
            .map(|s| s.letter)
    }

    pub fn slot(&self, letter: char) -> Option<&LetterSlot> {
        self.letters.iter().find(|s| s.letter == letter)
    }

    pub fn position(&self, letter: char) -> Option<ScreenVec> {
        self.slot(letter)
            .map(|s| ScreenVec::on_circle(ScreenVec::ZERO, self.radius, s.radian))
    }
}

/// Places the distinct initials counterclockwise from three o'clock, evenly
/// spaced on the unit circle.
pub fn build_first_level(labels: &[Label]) -> Result<FirstLevelLayout, LayoutError> {
    if labels.is_empty() {
        return Err(LayoutError::EmptyLabelSet);
    }
    let initials: BTreeSet<char> = labels.iter().map(Label::initial).collect();
    let count = initials.len();
    let step = TAU / count as f64;
    let half_width = PI / count.max(8) as f64;
    let letters = initials
        .into_iter()
        .enumerate()
        .map(|(i, letter)| {
            let radian = step * i as f64;
            LetterSlot {
                letter,
                radian,
                region: LetterRegion {
                    radian,
                    half_width,
                    inner: 0.85,
                    outer: 1.15,
                },
            }
        })
        .collect();
    Ok(FirstLevelLayout {
        letters,
        radius: 1.0,
    })
}
