//! Decisions backed by a fixed pool of uniform samples in the bounding box.

use std::collections::{HashMap, HashSet};
use std::hash::{DefaultHasher, Hash, Hasher};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::engine::{LeafId, LeafTable, Oracle};
use crate::error::Result;
use crate::geometry::BoundingBox;
use crate::rng::{mix, stream_rng};
use crate::sampler::{hit_and_run_convex, uniform_in_box};
use crate::scalar::Scalar;

/// Walk length for terms too small to be resolved by the pool.
const TOP_UP_SAMPLES: usize = 256;
const TOP_UP_BURN_IN: usize = 16;

pub(crate) struct SamplingOracle<T> {
    dim: usize,
    bbox: BoundingBox<T>,
    pool: Vec<T>,
    n: usize,
    delta_v: f64,
    seed: u64,
    /// Terms with fewer pool points than this get extra samples.
    small: usize,
    leaf_bits: HashMap<LeafId, FixedBitSet>,
    extra: HashMap<Vec<LeafId>, Vec<Vec<T>>>,
}

impl<T: Scalar> SamplingOracle<T> {
    pub(crate) fn new(bbox: BoundingBox<T>, n: usize, delta_v: f64, seed: u64) -> Self {
        let dim = bbox.dim();
        let mut rng = stream_rng(seed, 0);
        let mut pool = Vec::with_capacity(n * dim);
        for _ in 0..n {
            pool.extend(uniform_in_box(&mut rng, &bbox));
        }
        Self { dim, bbox, pool, n, delta_v, seed, small: n.div_ceil(1000), leaf_bits: HashMap::new(), extra: HashMap::new() }
    }

    fn leaf(&mut self, table: &LeafTable<T>, id: LeafId) -> &FixedBitSet {
        let (dim, pool) = (self.dim, &self.pool);
        self.leaf_bits.entry(id).or_insert_with(|| {
            let h = table.get(id);
            let inside: Vec<bool> = pool.par_chunks(dim).map(|x| h.contains_unchecked(x)).collect();
            let mut bits = FixedBitSet::with_capacity(inside.len());
            for (i, v) in inside.into_iter().enumerate() {
                bits.set(i, v);
            }
            bits
        })
    }

    fn bits(&mut self, table: &LeafTable<T>, ids: &[LeafId]) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.n);
        bits.insert_range(..);
        for &id in ids {
            bits.intersect_with(self.leaf(table, id));
        }
        bits
    }

    /// Hit-and-run points inside a term that holds only a handful of pool
    /// points, started from one of them.
    fn top_up(&mut self, table: &LeafTable<T>, ids: &[LeafId], bits: &FixedBitSet) -> Option<&Vec<Vec<T>>> {
        let count = bits.count_ones(..);
        if count == 0 || count >= self.small {
            return None;
        }
        if !self.extra.contains_key(ids) {
            let first = bits.ones().next().expect("non-empty");
            let start = self.pool[first * self.dim..(first + 1) * self.dim].to_vec();
            let mut hasher = DefaultHasher::new();
            ids.hash(&mut hasher);
            let mut rng = stream_rng(mix(self.seed, hasher.finish()), 1);
            let walk = hit_and_run_convex(&mut rng, &table.halfspaces(ids), &self.bbox, &start, TOP_UP_SAMPLES, TOP_UP_BURN_IN);
            self.extra.insert(ids.to_vec(), walk);
        }
        self.extra.get(ids)
    }
}

impl<T: Scalar> Oracle<T> for SamplingOracle<T> {
    fn feasible(&mut self, table: &LeafTable<T>, ids: &[LeafId]) -> Result<bool> {
        Ok(!self.bits(table, ids).is_clear())
    }

    fn escapes(&mut self, table: &LeafTable<T>, ids: &[LeafId], leaf: LeafId) -> Result<bool> {
        let bits = self.bits(table, ids);
        if bits.difference(self.leaf(table, leaf)).next().is_some() {
            return Ok(true);
        }
        let h = table.get(leaf).clone();
        Ok(self.top_up(table, ids, &bits).is_some_and(|pts| pts.iter().any(|x| !h.contains_unchecked(x))))
    }

    fn accept_merge(&mut self, table: &LeafTable<T>, a: &[LeafId], b: &[LeafId], merged: &[LeafId]) -> Result<bool> {
        let mut union = self.bits(table, a);
        union.union_with(&self.bits(table, b));
        let m = self.bits(table, merged).count_ones(..) as f64;
        Ok(m <= (1.0 + self.delta_v) * union.count_ones(..) as f64)
    }

    fn retain(&mut self, live: &HashSet<LeafId>) {
        self.leaf_bits.retain(|id, _| live.contains(id));
        self.extra.retain(|ids, _| ids.iter().all(|id| live.contains(id)));
    }
}
