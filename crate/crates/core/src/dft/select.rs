//! Heap-based top-k selection over bin magnitudes.

use serde::{Deserialize, Serialize};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Bins at or below this fraction of the largest magnitude never enter a
/// residue set.
pub const SELECTION_FLOOR: f64 = 1e-12;

/// A detected residue bin and its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedBin {
    pub residue: u64,
    pub magnitude: f64,
}

/// Orders bins so that "greater" means "selected first": larger magnitude,
/// then lower index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Ranked {
    magnitude: f64,
    index: usize,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.magnitude
            .total_cmp(&other.magnitude)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `count` largest entries of `magnitudes` as `(index, magnitude)`,
/// sorted by magnitude descending with ties broken by lower index.
/// O(n log count).
pub fn top_k_by_magnitude(magnitudes: &[f64], count: usize) -> Vec<(usize, f64)> {
    top_k_iter(magnitudes.iter().copied().enumerate(), count)
}

pub(crate) fn top_k_iter(
    items: impl IntoIterator<Item = (usize, f64)>,
    count: usize,
) -> Vec<(usize, f64)> {
    if count == 0 {
        return Vec::new();
    }
    let mut heap: BinaryHeap<Reverse<Ranked>> = BinaryHeap::with_capacity(count + 1);
    for (index, magnitude) in items {
        let item = Ranked { magnitude, index };
        if heap.len() < count {
            heap.push(Reverse(item));
        } else if let Some(Reverse(worst)) = heap.peek() {
            if item > *worst {
                heap.pop();
                heap.push(Reverse(item));
            }
        }
    }
    // ascending Reverse order == descending rank
    heap.into_sorted_vec()
        .into_iter()
        .map(|Reverse(r)| (r.index, r.magnitude))
        .collect()
}

/// Residue-set selection: top `count` bins whose magnitude exceeds
/// `SELECTION_FLOOR × max` (and is positive).
pub fn top_k_select(magnitudes: &[f64], count: usize) -> Vec<SelectedBin> {
    let peak = magnitudes.iter().copied().fold(0.0, f64::max);
    let floor = SELECTION_FLOOR * peak;
    let eligible = magnitudes
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, m)| m > floor && m > 0.0);
    top_k_iter(eligible, count)
        .into_iter()
        .map(|(i, magnitude)| SelectedBin {
            residue: i as u64,
            magnitude,
        })
        .collect()
}
