//! Finite unions of closed boundary arcs: the compact sets carved out of the
//! circle and their complementary gaps.

use crate::scalar::{wrap_angle, Real};

/// Sorted, pairwise-disjoint closed arcs `[start, end]` with
/// `0 <= start < end <= 2*pi`. The full circle is the single arc `[0, 2*pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet<R: Real> {
    arcs: Vec<(R, R)>,
}

impl<R: Real> ArcSet<R> {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full_circle() -> Self {
        Self {
            arcs: vec![(R::zero(), R::TAU())],
        }
    }

    /// Normalizes raw arcs: wraps angles, splits arcs crossing 0, merges
    /// overlapping or touching neighbours.
    pub fn new(raw: impl IntoIterator<Item = (R, R)>) -> Self {
        let tau = R::TAU();
        let mut pieces: Vec<(R, R)> = Vec::new();
        for (a, b) in raw {
            if b <= a {
                continue;
            }
            if b - a >= tau {
                return Self::full_circle();
            }
            let len = b - a;
            let start = wrap_angle(a);
            let end = start + len;
            if end <= tau {
                pieces.push((start, end));
            } else {
                pieces.push((start, tau));
                pieces.push((R::zero(), end - tau));
            }
        }
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(R, R)> = Vec::new();
        for (a, b) in pieces {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        // a set covering the whole circle collapses to the canonical form
        if merged.len() == 1 && merged[0].0 == R::zero() && merged[0].1 >= tau {
            return Self::full_circle();
        }
        Self { arcs: merged }
    }

    /// Builds the set of bins marked `true` out of `bins.len()` uniform bins.
    pub fn from_bins(bins: &[bool]) -> Self {
        let b = bins.len();
        let tau = R::TAU();
        let width = tau / R::of(b as f64);
        let mut raw = Vec::new();
        let mut run_start: Option<usize> = None;
        for (i, &good) in bins.iter().enumerate() {
            match (good, run_start) {
                (true, None) => run_start = Some(i),
                (false, Some(s)) => {
                    raw.push((R::of(s as f64) * width, R::of(i as f64) * width));
                    run_start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = run_start {
            raw.push((R::of(s as f64) * width, tau));
        }
        Self::new(raw)
    }

    pub fn arcs(&self) -> &[(R, R)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].0 == R::zero() && self.arcs[0].1 >= R::TAU()
    }

    /// Normalized measure, Sum of lengths / 2*pi, in [0, 1].
    pub fn measure(&self) -> R {
        let total = self
            .arcs
            .iter()
            .fold(R::zero(), |acc, &(a, b)| acc + (b - a));
        total / R::TAU()
    }

    /// Whether the angle lies in the set (arcs are closed; circular).
    pub fn contains(&self, angle: R) -> bool {
        let a = wrap_angle(angle);
        self.arcs.iter().any(|&(s, e)| s <= a && a <= e)
            // closed arcs wrap: an arc ending at 2*pi contains angle 0
            || (a == R::zero()
                && self
                    .arcs
                    .last()
                    .map(|&(_, e)| e >= R::TAU())
                    .unwrap_or(false))
    }

    /// The connected components of the complement, as circular open arcs
    /// `(start, end)` with `end` possibly past 2*pi when a gap wraps.
    pub fn gaps(&self) -> Vec<(R, R)> {
        let tau = R::TAU();
        if self.arcs.is_empty() {
            return vec![(R::zero(), tau)];
        }
        if self.is_full() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for w in self.arcs.windows(2) {
            out.push((w[0].1, w[1].0));
        }
        let last_end = self.arcs.last().unwrap().1;
        let first_start = self.arcs[0].0;
        let wrap_len = (tau - last_end) + first_start;
        if wrap_len > R::zero() {
            out.push((last_end, last_end + wrap_len));
        }
        out.retain(|&(a, b)| b > a);
        out
    }

    /// Angular distance from `angle` to the set; 0 when inside.
    pub fn distance(&self, angle: R) -> R {
        if self.contains(angle) {
            return R::zero();
        }
        let a = wrap_angle(angle);
        let mut best = R::infinity();
        for &(s, e) in &self.arcs {
            for endpoint in [s, e] {
                let d = crate::scalar::angle_dist(a, endpoint);
                if d < best {
                    best = d;
                }
            }
        }
        if best.is_infinite() {
            R::PI()
        } else {
            best
        }
    }

    /// Intersection with another set (used to clip bins to a compact K).
    pub fn intersect(&self, other: &Self) -> Self {
        let mut raw = Vec::new();
        for &(a1, b1) in &self.arcs {
            for &(a2, b2) in &other.arcs {
                let a = a1.max(a2);
                let b = b1.min(b2);
                if b > a {
                    raw.push((a, b));
                }
            }
        }
        Self::new(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn measure_and_contains() {
        let s = ArcSet::<f64>::new([(0.0, 1.0), (2.0, 3.0)]);
        assert_relative_eq!(s.measure(), 2.0 / TAU, epsilon = 1e-14);
        assert!(s.contains(0.5));
        assert!(s.contains(1.0));
        assert!(!s.contains(1.5));
        assert!(s.contains(2.0 + TAU)); // circular
    }

    #[test]
    fn merges_and_splits_wraparound() {
        let s = ArcSet::<f64>::new([(0.0, 1.0), (0.5, 1.5)]);
        assert_eq!(s.arcs().len(), 1);
        assert_relative_eq!(s.arcs()[0].1, 1.5);
        let w = ArcSet::<f64>::new([(TAU - 0.5, TAU + 0.5)]);
        assert_eq!(w.arcs().len(), 2);
        assert!(w.contains(0.2));
        assert!(w.contains(TAU - 0.2));
        assert!(!w.contains(PI));
    }

    #[test]
    fn gaps_are_circular_complement() {
        let s = ArcSet::<f64>::new([(1.0, 2.0), (4.0, 5.0)]);
        let g = s.gaps();
        assert_eq!(g.len(), 2);
        assert_relative_eq!(g[0].0, 2.0);
        assert_relative_eq!(g[0].1, 4.0);
        // wrap gap from 5.0 around to 1.0
        assert_relative_eq!(g[1].0, 5.0);
        assert_relative_eq!(g[1].1, 5.0 + (TAU - 5.0) + 1.0);
        let total: f64 = g.iter().map(|(a, b)| b - a).sum();
        assert_relative_eq!(total / TAU + s.measure(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn from_bins_roundtrip() {
        let mut bins = vec![true; 16];
        bins[3] = false;
        bins[4] = false;
        bins[15] = false;
        let s = ArcSet::<f64>::from_bins(&bins);
        // wraps: bins 0..2 and 5..14 good
        assert!(s.contains(0.01));
        assert!(!s.contains((3.5 / 16.0) * TAU));
        assert_relative_eq!(s.measure(), 13.0 / 16.0, epsilon = 1e-12);
        let all = ArcSet::<f64>::from_bins(&vec![true; 8]);
        assert!(all.is_full());
        assert!(all.gaps().is_empty());
        let none = ArcSet::<f64>::from_bins(&vec![false; 8]);
        assert!(none.is_empty());
        assert_eq!(none.gaps().len(), 1);
    }

    #[test]
    fn distance_to_set() {
        let s = ArcSet::<f64>::new([(1.0, 2.0)]);
        assert_eq!(s.distance(1.5), 0.0);
        assert_relative_eq!(s.distance(2.5), 0.5, epsilon = 1e-14);
        assert_relative_eq!(s.distance(0.5), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn intersect_clips() {
        let a = ArcSet::<f64>::new([(0.0, 2.0)]);
        let b = ArcSet::<f64>::new([(1.0, 3.0)]);
        let i = a.intersect(&b);
        assert_eq!(i.arcs().len(), 1);
        assert_relative_eq!(i.arcs()[0].0, 1.0);
        assert_relative_eq!(i.arcs()[0].1, 2.0);
    }
}
