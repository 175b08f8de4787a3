//! Active-set selection: bounded two-way ranking, knee-point demand sizing,
//! working-set composition, and the convergence/equilibrium predicates that
//! decide when a global rescan is due.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedTenant {
    pub id: usize,
    pub score: f64,
}

/// Min-heap entry for the running top list: the root is the weakest kept
/// candidate, where weaker means lower score, ties broken toward higher id so
/// equal-score survivors keep the lower id.
struct EvictFromTop(RankedTenant);

impl PartialEq for EvictFromTop {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for EvictFromTop {}
impl PartialOrd for EvictFromTop {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EvictFromTop {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .score
            .total_cmp(&self.0.score)
            .then(self.0.id.cmp(&other.0.id))
    }
}

/// Mirror image for the running bottom list: the root is the strongest kept
/// candidate (highest score, ties toward higher id).
struct EvictFromBottom(RankedTenant);

impl PartialEq for EvictFromBottom {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for EvictFromBottom {}
impl PartialOrd for EvictFromBottom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EvictFromBottom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .score
            .total_cmp(&other.0.score)
            .then(self.0.id.cmp(&other.0.id))
    }
}

/// One pass over the population keeping both the `k_max` best and `k_max`
/// worst tenants in bounded heaps, so a scan costs O(K log k_max) regardless
/// of population size. Returns (top descending, bottom ascending), ids
/// breaking score ties in both directions.
pub fn two_way_heap_filter(
    ranked: impl IntoIterator<Item = RankedTenant>,
    k_max: usize,
) -> (Vec<RankedTenant>, Vec<RankedTenant>) {
    assert!(k_max > 0, "k_max must be positive");
    let mut top: BinaryHeap<EvictFromTop> = BinaryHeap::with_capacity(k_max + 1);
    let mut bottom: BinaryHeap<EvictFromBottom> = BinaryHeap::with_capacity(k_max + 1);
    for r in ranked {
        top.push(EvictFromTop(r));
        if top.len() > k_max {
            top.pop();
        }
        bottom.push(EvictFromBottom(r));
        if bottom.len() > k_max {
            bottom.pop();
        }
    }
    let mut top: Vec<RankedTenant> = top.into_iter().map(|e| e.0).collect();
    top.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.id.cmp(&b.id)));
    let mut bottom: Vec<RankedTenant> = bottom.into_iter().map(|e| e.0).collect();
    bottom.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.id.cmp(&b.id)));
    (top, bottom)
}

/// Knee of a descending score curve: the 1-based index with the largest
/// perpendicular distance to the chord between the first and last point.
/// Ties resolve to the smaller index, so a flat or linear curve yields 1.
pub fn find_knee_point(scores_desc: &[f64]) -> usize {
    assert!(!scores_desc.is_empty());
    let n = scores_desc.len();
    if n <= 2 {
        return 1;
    }
    let a = scores_desc[0];
    let dx = (n - 1) as f64;
    let dy = scores_desc[n - 1] - a;
    let mut best = (0.0f64, 0usize);
    for (i, &y) in scores_desc.iter().enumerate() {
        // |cross product| of (dx, dy) with the offset from the chord start;
        // proportional to perpendicular distance, no need to normalize.
        let d = (dy * i as f64 - dx * (y - a)).abs();
        if d > best.0 {
            best = (d, i);
        }
    }
    best.1 + 1
}

/// Working set for local optimization: the strongest `k_demand` tenants plus
/// a quarter as many (rounded up) from the bottom so shrink candidates stay
/// under management. Returns sorted unique ids.
pub fn compose_set(
    top: &[RankedTenant],
    bottom: &[RankedTenant],
    k_demand: usize,
    bottom_share_divisor: usize,
) -> Vec<usize> {
    let n_bottom = k_demand.div_ceil(bottom_share_divisor.max(1));
    let mut ids: Vec<usize> = top
        .iter()
        .take(k_demand)
        .chain(bottom.iter().take(n_bottom))
        .map(|r| r.id)
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Spread between the single best and single worst score across the
/// population. Below `eps` (strictly) nothing is worth moving.
/// No meaningful reallocation opportunity: the weakest kept top candidate
/// sits within `eps` of the strongest kept bottom candidate. When the two
/// lists overlap (population within the filter's reach), that knee gap is
/// meaningless and the check degrades to the full best-minus-worst spread.
pub fn is_equilibrium(top: &[RankedTenant], bottom: &[RankedTenant], eps: f64) -> bool {
    let (Some(best), Some(worst)) = (top.first(), bottom.first()) else {
        return true;
    };
    let overlap = {
        let bottom_ids: Vec<usize> = bottom.iter().map(|r| r.id).collect();
        top.iter().any(|r| bottom_ids.contains(&r.id))
    };
    if overlap {
        best.score - worst.score < eps
    } else {
        top.last().unwrap().score - bottom.last().unwrap().score < eps
    }
}

/// Rolling window of relative aggregate-score improvements between
/// consecutive local cycles. Converged once a full window sits below the
/// threshold.
#[derive(Debug, Clone)]
pub struct ImprovementWindow {
    window: usize,
    entries: VecDeque<f64>,
}

impl ImprovementWindow {
    pub fn new(window: usize) -> Self {
        assert!(window > 0);
        Self {
            window,
            entries: VecDeque::with_capacity(window),
        }
    }

    pub fn push(&mut self, rel_improvement: f64) {
        if self.entries.len() == self.window {
            self.entries.pop_front();
        }
        self.entries.push_back(rel_improvement);
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn converged(&self, eps: f64) -> bool {
        self.entries.len() == self.window && self.entries.iter().all(|&d| d < eps)
    }
}
