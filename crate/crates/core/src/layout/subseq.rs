use super::{collate, Label};
use crate::geometry::{ccw_delta, wrap_radian};

/// Strictly increasing subsequence of maximum length (patience sorting with
/// back-pointers). Returns indices into `seq`.
fn lis_indices(seq: &[usize]) -> Vec<usize> {
    // tails[j]: index of the smallest tail of an increasing run of length j+1
    let mut tails: Vec<usize> = Vec::new();
    let mut prev: Vec<Option<usize>> = vec![None; seq.len()];
    for (i, &v) in seq.iter().enumerate() {
        let j = tails.partition_point(|&t| seq[t] < v);
        if j > 0 {
            prev[i] = Some(tails[j - 1]);
        }
        if j == tails.len() {
            tails.push(i);
        } else {
            tails[j] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = prev[i];
    }
    out.reverse();
    out
}

/// Largest set of items that is simultaneously in collation order and in
/// counterclockwise order of `radians` around the circle.
///
/// `radians[i]` belongs to the item of collation rank `i`. The circle is cut
/// just before each distinct radian in turn; the longest result wins, ties go
/// to the smallest cut radian. Returned indices are ascending.
pub fn longest_sorted_indices(radians: &[f64]) -> Vec<usize> {
    let n = radians.len();
    if n == 0 {
        return Vec::new();
    }
    let mut cuts: Vec<f64> = radians.iter().map(|&r| wrap_radian(r)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut best: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for &cut in &cuts {
        // Counterclockwise from the cut; equal radians keep collation order.
        order.sort_by(|&a, &b| {
            ccw_delta(cut, radians[a])
                .total_cmp(&ccw_delta(cut, radians[b]))
                .then(a.cmp(&b))
        });
        let picked = lis_indices(&order);
        if picked.len() > best.len() {
            best = picked.into_iter().map(|p| order[p]).collect();
            if best.len() == n {
                break;
            }
        }
    }
    best.sort_unstable();
    best
}

/// Removes and returns the longest subsequence of `scl` that is alphabetical
/// and counterclockwise by initial radian. Selected labels sit at their
/// initial radian; the rest of `scl` keeps its order.
pub fn max_sorted_subseq(scl: &mut Vec<Label>) -> Vec<Label> {
    scl.sort_by(collate);
    let radians: Vec<f64> = scl.iter().map(|l| l.rad_p).collect();
    let picked = longest_sorted_indices(&radians);

    let mut seed = Vec::with_capacity(picked.len());
    let mut rest = Vec::with_capacity(scl.len() - picked.len());
    let mut next = picked.iter().peekable();
    for (i, mut label) in scl.drain(..).enumerate() {
        if next.peek() == Some(&&i) {
            next.next();
            label.rad = label.rad_p;
            seed.push(label);
        } else {
            rest.push(label);
        }
    }
    *scl = rest;
    seed
}
