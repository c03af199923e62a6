//! Two-level sorted circle layouts.
//!
//! The first level is a ring of initial letters. The second level places the
//! labels sharing one initial on up to `max_circles` concentric circles, each
//! circle alphabetical in counterclockwise order while every label stays
//! inside a sliding range around the direction of its anchor.

mod baseline;
mod check;
mod export;
mod first_level;
mod insert;
mod method;
mod relax;
mod second_level;
mod subseq;

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::geometry::{angular_distance, ccw_delta, wrap_radian, ScreenVec};
use crate::scene::{ObjectId, SceneObject};

pub use baseline::{even_circle_layout, full_screen_layout, strict_orientation_layout};
pub use check::{check_layout, check_sorted_layout, Violation};
pub use export::{layout_json, layout_svg, LayoutDocument, LAYOUT_FORMAT_VERSION};
pub use first_level::{build_first_level, FirstLevelLayout, LetterRegion, LetterSlot};
pub use insert::{insert, try_insert};
pub use method::{layout_for, Method, UnknownMethod};
pub use relax::relax;
pub use second_level::{build_second_level, init_label_attrs};
pub use subseq::{longest_sorted_indices, max_sorted_subseq};

/// Tolerance used by overlap and containment predicates.
pub const RADIAN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelId(pub u32);

/// Admissible radians of a label, unwrapped (`max - min` is the width).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct RadianRange {
    pub min: f64,
    pub max: f64,
}

impl From<[f64; 2]> for RadianRange {
    fn from(a: [f64; 2]) -> Self {
        Self { min: a[0], max: a[1] }
    }
}

impl From<RadianRange> for [f64; 2] {
    fn from(r: RadianRange) -> Self {
        [r.min, r.max]
    }
}

/// Sliding-range width for a label at screen distance `dis` from the gaze:
/// `(1 - e^-dis) * π / 4`.
pub fn range_width(dis: f64) -> f64 {
    (1.0 - (-dis).exp()) * FRAC_PI_4
}

impl RadianRange {
    pub fn around(center: f64, dis: f64) -> Self {
        let half = range_width(dis) / 2.0;
        Self {
            min: center - half,
            max: center + half,
        }
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// Containment modulo 2π.
    pub fn contains(&self, rad: f64) -> bool {
        self.shifted_containing(rad).is_some()
    }

    /// The copy of this range shifted by a multiple of 2π that contains `rad`.
    pub fn shifted_containing(&self, rad: f64) -> Option<(f64, f64)> {
        let m = ((self.min - rad) / TAU).ceil();
        let shift = -m * TAU;
        for s in [shift, shift + TAU, shift - TAU] {
            let (lo, hi) = (self.min + s, self.max + s);
            if rad >= lo - RADIAN_EPS && rad <= hi + RADIAN_EPS {
                return Some((lo, hi));
            }
        }
        None
    }

    /// The copy shifted by a multiple of 2π that is nearest to `rad`.
    pub fn shifted_near(&self, rad: f64) -> (f64, f64) {
        if let Some(r) = self.shifted_containing(rad) {
            return r;
        }
        let mid = (self.min + self.max) / 2.0;
        let k = ((rad - mid) / TAU).round();
        (self.min + k * TAU, self.max + k * TAU)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub id: LabelId,
    pub text: String,
    pub anchor: ObjectId,
    /// Screen distance between gaze and anchor projection.
    pub dis: f64,
    /// Current radian on its circle.
    #[serde(rename = "radian")]
    pub rad: f64,
    /// Radian pointing at the anchor, fixed after initialization.
    #[serde(rename = "initial_radian")]
    pub rad_p: f64,
    #[serde(rename = "range")]
    pub ran: RadianRange,
    pub circle_index: Option<usize>,
}

impl Label {
    pub fn new(id: LabelId, text: impl Into<String>, anchor: ObjectId) -> Self {
        Self {
            id,
            text: text.into(),
            anchor,
            dis: 0.0,
            rad: 0.0,
            rad_p: 0.0,
            ran: RadianRange { min: 0.0, max: 0.0 },
            circle_index: None,
        }
    }

    /// A label with orientation attributes already set; mostly for tests.
    pub fn oriented(id: u32, text: &str, rad_p: f64, ran: RadianRange) -> Self {
        Self {
            rad: wrap_radian(rad_p),
            rad_p: wrap_radian(rad_p),
            ran,
            ..Self::new(LabelId(id), text, ObjectId(id))
        }
    }

    /// Lowercased first character of the text.
    pub fn initial(&self) -> char {
        initial_of(&self.text)
    }

    pub fn collation_key(&self) -> (String, LabelId) {
        (self.text.to_lowercase(), self.id)
    }
}

pub fn initial_of(text: &str) -> char {
    text.trim_start()
        .chars()
        .next()
        .and_then(|c| c.to_lowercase().next())
        .unwrap_or('?')
}

/// Case-insensitive code-point order, ties broken by label id.
pub fn collate(a: &Label, b: &Label) -> Ordering {
    let (ta, tb) = (a.text.to_lowercase(), b.text.to_lowercase());
    ta.cmp(&tb).then(a.id.cmp(&b.id))
}

/// One label per scene object, in collation order.
pub fn labels_for_objects<'a>(objects: impl IntoIterator<Item = &'a SceneObject>) -> Vec<Label> {
    let mut labels: Vec<Label> = objects
        .into_iter()
        .map(|o| Label::new(LabelId(o.id.0), o.name.clone(), o.id))
        .collect();
    labels.sort_by(collate);
    labels
}

/// Geometric constants of the second-level layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub max_circles: usize,
    pub relax_iters: usize,
    /// Rendered label width in screen units.
    pub label_width: f64,
    /// Extra separation as a fraction of the label's angular extent.
    pub separation_margin: f64,
    pub base_radius: f64,
    pub radius_step: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            max_circles: 6,
            relax_iters: 60,
            label_width: 0.12,
            separation_margin: 0.1,
            base_radius: 1.0,
            radius_step: 0.22,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), crate::error::LayoutError> {
        use crate::error::LayoutError::InvalidParams;
        if self.max_circles == 0 {
            return Err(InvalidParams("max_circles must be at least 1"));
        }
        if self.relax_iters == 0 {
            return Err(InvalidParams("relax_iters must be at least 1"));
        }
        if !(self.label_width > 0.0 && self.label_width < 2.0 * self.base_radius) {
            return Err(InvalidParams("label_width must be positive and fit the inner circle"));
        }
        if !(self.base_radius > 0.0 && self.radius_step > 0.0 && self.separation_margin >= 0.0) {
            return Err(InvalidParams("radii and margin must be positive"));
        }
        Ok(())
    }

    pub fn radius(&self, k: usize) -> f64 {
        self.base_radius + self.radius_step * k as f64
    }

    /// Angle subtended by one label on a circle of the given radius.
    pub fn extent_at(&self, radius: f64) -> f64 {
        2.0 * (self.label_width / (2.0 * radius)).min(1.0).asin()
    }

    /// Minimum center-to-center angle between neighbours on a circle.
    pub fn separation_at(&self, radius: f64) -> f64 {
        self.extent_at(radius) * (1.0 + self.separation_margin)
    }

    pub fn separation(&self, k: usize) -> f64 {
        self.separation_at(self.radius(k))
    }

    /// Per-move relaxation cap, attenuated on outer circles.
    pub fn relax_step_cap(&self, k: usize) -> f64 {
        PI / ((k + 1) as f64 * 72.0)
    }
}

/// One circle of labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleLayout {
    pub index: usize,
    pub radius: f64,
    #[serde(rename = "labels")]
    pub entries: Vec<Label>,
}

impl CircleLayout {
    pub fn new(index: usize, radius: f64) -> Self {
        Self {
            index,
            radius,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Radians unwrapped along the entry order: each entry sits counterclockwise
    /// of the previous one by less than a full turn.
    pub fn unwrapped(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut acc = 0.0;
        for (i, e) in self.entries.iter().enumerate() {
            if i == 0 {
                acc = e.rad;
            } else {
                acc += ccw_delta(self.entries[i - 1].rad, e.rad);
            }
            out.push(acc);
        }
        out
    }

    /// Whether entry order matches counterclockwise order around the circle,
    /// i.e. walking the entries winds around at most once.
    pub fn is_cyclically_ordered(&self) -> bool {
        let n = self.entries.len();
        if n < 2 {
            return true;
        }
        let pos = self.unwrapped();
        let closing = ccw_delta(self.entries[n - 1].rad, self.entries[0].rad);
        pos[n - 1] - pos[0] + closing < TAU + 1e-6
    }

    /// Counterclockwise gap from entry `i` to its successor.
    pub fn gaps(&self) -> Vec<f64> {
        let n = self.entries.len();
        if n == 0 {
            return Vec::new();
        }
        let pos = self.unwrapped();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    pos[i + 1] - pos[i]
                } else {
                    pos[0] + TAU - pos[n - 1]
                }
            })
            .collect()
    }

    pub fn position_of(&self, center: ScreenVec, label: &Label) -> ScreenVec {
        ScreenVec::on_circle(center, self.radius, label.rad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// Removed by relaxation on the last available circle.
    Relaxation,
    /// Still unplaced after every circle was built.
    CircleLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedLabel {
    pub label: Label,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiCircleLayout {
    pub center: ScreenVec,
    pub circles: Vec<CircleLayout>,
    pub dropped: Vec<DroppedLabel>,
}

impl MultiCircleLayout {
    pub fn empty(center: ScreenVec) -> Self {
        Self {
            center,
            circles: Vec::new(),
            dropped: Vec::new(),
        }
    }

    pub fn placed(&self) -> impl Iterator<Item = (&CircleLayout, &Label)> + '_ {
        self.circles
            .iter()
            .flat_map(|c| c.entries.iter().map(move |l| (c, l)))
    }

    pub fn placed_count(&self) -> usize {
        self.circles.iter().map(|c| c.len()).sum()
    }

    /// Circles holding at least one label.
    pub fn circle_count(&self) -> usize {
        self.circles.iter().filter(|c| !c.is_empty()).count()
    }

    /// Screen position of every placed label.
    pub fn label_positions(&self) -> Vec<(&Label, ScreenVec)> {
        self.placed()
            .map(|(c, l)| (l, c.position_of(self.center, l)))
            .collect()
    }

    pub fn find(&self, id: LabelId) -> Option<(&Label, ScreenVec)> {
        self.placed()
            .find(|(_, l)| l.id == id)
            .map(|(c, l)| (l, c.position_of(self.center, l)))
    }

    pub fn find_anchor(&self, anchor: ObjectId) -> Option<(&Label, ScreenVec)> {
        self.placed()
            .find(|(_, l)| l.anchor == anchor)
            .map(|(c, l)| (l, c.position_of(self.center, l)))
    }
}

/// Angular overlap of two placed radians on a circle with the given
/// separation; positive when they are too close.
pub fn overlap_amount(a: f64, b: f64, separation: f64) -> f64 {
    separation - angular_distance(a, b)
}
