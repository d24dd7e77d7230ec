//! Finite unions of closed real intervals.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    pub fn length(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Sorted, pairwise disjoint intervals with a strict gap between neighbours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet<T> {
    intervals: Vec<Interval<T>>,
}

impl<T: Scalar> IntervalSet<T> {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn full() -> Self {
        Self::single(T::neg_infinity(), T::infinity())
    }

    /// `[lo, hi]`, or the empty set when `lo > hi`.
    pub fn single(lo: T, hi: T) -> Self {
        if lo <= hi {
            Self { intervals: vec![Interval::new(lo, hi)] }
        } else {
            Self::empty()
        }
    }

    /// `(-inf, hi]`
    pub fn at_most(hi: T) -> Self {
        Self::single(T::neg_infinity(), hi)
    }

    /// `[lo, inf)`
    pub fn at_least(lo: T) -> Self {
        Self::single(lo, T::infinity())
    }

    /// Normalizes arbitrary intervals: drops empty ones, sorts, and merges
    /// any that overlap or touch.
    pub fn from_intervals(mut raw: Vec<Interval<T>>) -> Self {
        raw.retain(|i| i.lo <= i.hi);
        raw.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("interval ends are not NaN"));
        let mut intervals: Vec<Interval<T>> = Vec::with_capacity(raw.len());
        for i in raw {
            match intervals.last_mut() {
                Some(last) if i.lo <= last.hi => last.hi = last.hi.max(i.hi),
                _ => intervals.push(i),
            }
        }
        Self { intervals }
    }

    /// Drops zero-length components.
    pub fn without_points(&self) -> Self {
        Self { intervals: self.intervals.iter().copied().filter(|i| i.lo < i.hi).collect() }
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: T) -> bool {
        // first interval whose upper end is >= x
        let idx = self.intervals.partition_point(|i| i.hi < x);
        self.intervals.get(idx).is_some_and(|i| i.lo <= x)
    }

    /// The interval containing `x`, if any.
    pub fn component_of(&self, x: T) -> Option<Interval<T>> {
        let idx = self.intervals.partition_point(|i| i.hi < x);
        self.intervals.get(idx).copied().filter(|i| i.lo <= x)
    }

    pub fn total_length(&self) -> T {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = Vec::with_capacity(self.len() + other.len());
        all.extend_from_slice(&self.intervals);
        all.extend_from_slice(&other.intervals);
        Self::from_intervals(all)
    }

    /// Linear merge of the two sorted lists.
    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max(b[j].lo);
            let hi = a[i].hi.min(b[j].hi);
            if lo <= hi {
                out.push(Interval::new(lo, hi));
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of disjoint inputs may touch at a shared endpoint.
        Self::from_intervals(out)
    }

    pub fn clamp(&self, lo: T, hi: T) -> Self {
        self.intersect(&Self::single(lo, hi))
    }

    /// Reflects the set through the origin.
    pub fn negate(&self) -> Self {
        Self { intervals: self.intervals.iter().rev().map(|i| Interval::new(-i.hi, -i.lo)).collect() }
    }
}
