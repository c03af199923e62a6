use std::f64::consts::TAU;

use super::{CircleLayout, Label, LayoutParams, RADIAN_EPS};
use crate::geometry::wrap_radian;

/// Working copy of a circle: unwrapped positions with ranges shifted into the
/// same frame.
struct Ring {
    pos: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    sep: f64,
    cap: f64,
}

impl Ring {
    fn len(&self) -> usize {
        self.pos.len()
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    /// Counterclockwise gap from `i` to its successor.
    fn gap_after(&self, i: usize) -> f64 {
        let j = self.next(i);
        if j == 0 {
            self.pos[0] + TAU - self.pos[i]
        } else {
            self.pos[j] - self.pos[i]
        }
    }

    fn gap_before(&self, i: usize) -> f64 {
        self.gap_after(self.prev(i))
    }

    fn overlaps_next(&self, i: usize) -> bool {
        self.gap_after(i) < self.sep - RADIAN_EPS
    }

    /// Clockwise move limited by the step cap, the gap to the previous label
    /// and the range floor.
    fn sub_rad(&mut self, i: usize) {
        let step = self
            .cap
            .min(self.gap_before(i) - self.sep)
            .min(self.pos[i] - self.lo[i]);
        if step > 0.0 {
            self.pos[i] -= step;
        }
    }

    fn add_rad(&mut self, i: usize) {
        let step = self
            .cap
            .min(self.gap_after(i) - self.sep)
            .min(self.hi[i] - self.pos[i]);
        if step > 0.0 {
            self.pos[i] += step;
        }
    }

    /// Overlapping labels, worst first. Degree is the total overlap with both
    /// neighbours.
    fn overlapped(&self) -> Vec<usize> {
        if self.len() < 2 {
            return Vec::new();
        }
        let mut out: Vec<(usize, f64)> = (0..self.len())
            .filter_map(|i| {
                let d = (self.sep - self.gap_before(i)).max(0.0)
                    + (self.sep - self.gap_after(i)).max(0.0);
                let hit = self.overlaps_next(i) || self.overlaps_next(self.prev(i));
                hit.then_some((i, d))
            })
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        out.into_iter().map(|(i, _)| i).collect()
    }

    fn remove(&mut self, i: usize) {
        self.pos.remove(i);
        self.lo.remove(i);
        self.hi.remove(i);
    }
}

/// Separates overlapping neighbours on `circle` by sliding them within their
/// ranges. Each pass walks the overlap list from both ends; once more than
/// `n_it` passes have run, the worst-overlapping label is removed per pass
/// until no overlap remains. Returns the removed labels.
///
/// A circle without overlaps is left untouched.
pub fn relax(circle: &mut CircleLayout, params: &LayoutParams, n_it: usize) -> Vec<Label> {
    if circle.entries.len() < 2 {
        return Vec::new();
    }
    let pos = circle.unwrapped();
    let (lo, hi): (Vec<f64>, Vec<f64>) = circle
        .entries
        .iter()
        .zip(&pos)
        .map(|(l, &p)| l.ran.shifted_near(p))
        .unzip();
    let mut ring = Ring {
        pos,
        lo,
        hi,
        sep: params.separation_at(circle.radius),
        cap: params.relax_step_cap(circle.index),
    };

    let mut oa = ring.overlapped();
    if oa.is_empty() {
        return Vec::new();
    }

    let mut removed = Vec::new();
    let mut iter = 0usize;
    while !oa.is_empty() {
        let m = oa.len();
        for i in 0..m {
            let l = oa[i];
            if ring.overlaps_next(l) {
                let r = ring.next(l);
                ring.sub_rad(l);
                ring.add_rad(r);
            }
            let l = oa[m - 1 - i];
            let left = ring.prev(l);
            if ring.overlaps_next(left) {
                ring.sub_rad(left);
                ring.add_rad(l);
            }
        }
        oa = ring.overlapped();
        if !oa.is_empty() && iter > n_it {
            let worst = oa[0];
            ring.remove(worst);
            let mut label = circle.entries.remove(worst);
            label.circle_index = None;
            label.rad = label.rad_p;
            removed.push(label);
            oa = ring.overlapped();
        }
        iter += 1;
    }

    for (label, &p) in circle.entries.iter_mut().zip(&ring.pos) {
        label.rad = wrap_radian(p);
    }
    removed
}
