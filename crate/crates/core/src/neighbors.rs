//! Exact nearest-neighbour search over delay vectors.
//!
//! Candidates are sorted by their first coordinate; a search walks outwards
//! from the query's position and stops in each direction once the squared gap
//! in that coordinate alone exceeds the best squared distance found so far.
//! Ties resolve to the smallest index, matching an exhaustive scan.

/// Delay vectors `(x[i], x[i+tau], …, x[i+(dim−1)tau])` for i in `0..len`,
/// viewed without materialising them.
#[derive(Clone, Copy)]
pub(crate) struct DelayView<'a> {
    pub x: &'a [f64],
    pub tau: usize,
    pub dim: usize,
    pub len: usize,
}

impl<'a> DelayView<'a> {
    pub fn new(x: &'a [f64], tau: usize, dim: usize, len: usize) -> Self {
        debug_assert!(len == 0 || len - 1 + (dim - 1) * tau < x.len());
        Self { x, tau, dim, len }
    }

    #[inline]
    pub fn coord(&self, i: usize, k: usize) -> f64 {
        self.x[i + k * self.tau]
    }

    #[inline]
    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.dim {
            let d = self.coord(i, k) - self.coord(j, k);
            acc += d * d;
        }
        acc
    }
}

pub(crate) struct SortedIndex<'a> {
    view: DelayView<'a>,
    order: Vec<u32>,
    rank: Vec<u32>,
}

impl<'a> SortedIndex<'a> {
    pub fn new(view: DelayView<'a>) -> Self {
        let mut order: Vec<u32> = (0..view.len as u32).collect();
        order.sort_by(|&a, &b| view.x[a as usize].total_cmp(&view.x[b as usize]).then(a.cmp(&b)));
        let mut rank = vec![0u32; view.len];
        for (pos, &i) in order.iter().enumerate() {
            rank[i as usize] = pos as u32;
        }
        Self { view, order, rank }
    }

    /// Nearest accepted candidate to point `i` (which must be in the index):
    /// `(index, squared distance)`. With `positive_only`, zero distances are
    /// skipped.
    pub fn nearest(&self, i: usize, accept: impl Fn(usize) -> bool, positive_only: bool) -> Option<(usize, f64)> {
        let x0 = self.view.x[i];
        let pos = self.rank[i] as usize;
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        let consider = |j: usize, best: &mut f64, best_j: &mut usize| {
            if j == i || !accept(j) {
                return;
            }
            let d2 = self.view.sq_dist(i, j);
            if positive_only && d2 <= 0.0 {
                return;
            }
            if d2 < *best || (d2 == *best && j < *best_j) {
                *best = d2;
                *best_j = j;
            }
        };
        let mut up = pos + 1;
        let mut down = pos;
        let (mut up_open, mut down_open) = (true, true);
        while up_open || down_open {
            if up_open {
                if up < self.order.len() {
                    let j = self.order[up] as usize;
                    let gap = self.view.x[j] - x0;
                    if gap * gap > best {
                        up_open = false;
                    } else {
                        consider(j, &mut best, &mut best_j);
                        up += 1;
                    }
                } else {
                    up_open = false;
                }
            }
            if down_open {
                if down > 0 {
                    let j = self.order[down - 1] as usize;
                    let gap = x0 - self.view.x[j];
                    if gap * gap > best {
                        down_open = false;
                    } else {
                        consider(j, &mut best, &mut best_j);
                        down -= 1;
                    }
                } else {
                    down_open = false;
                }
            }
        }
        (best_j != usize::MAX).then_some((best_j, best))
    }

    /// All candidates whose first coordinate lies within `reach` of point
    /// `i`'s, in index order.
    pub fn within_first_coord(&self, i: usize, reach: f64) -> Vec<usize> {
        let x0 = self.view.x[i];
        let lo = self.order.partition_point(|&j| self.view.x[j as usize] < x0 - reach);
        let hi = self.order.partition_point(|&j| self.view.x[j as usize] <= x0 + reach);
        let mut out: Vec<usize> = self.order[lo..hi].iter().map(|&j| j as usize).collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exhaustive_scan() {
        let x: Vec<f64> = (0..400).map(|i| ((i * 7919) % 101) as f64 * 0.37 + (i as f64 * 0.01).sin()).collect();
        let view = DelayView::new(&x, 3, 3, x.len() - 6);
        let idx = SortedIndex::new(view);
        for i in 0..view.len {
            let got = idx.nearest(i, |j| i.abs_diff(j) > 3, false).unwrap();
            let mut best = (usize::MAX, f64::INFINITY);
            for j in 0..view.len {
                if i.abs_diff(j) > 3 {
                    let d = view.sq_dist(i, j);
                    if d < best.1 {
                        best = (j, d);
                    }
                }
            }
            assert_eq!(got, best, "point {i}");
        }
    }
}
