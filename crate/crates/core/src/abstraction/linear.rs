//! Decisions backed by linear feasibility checks.

use std::collections::{HashMap, HashSet};
use std::hash::{DefaultHasher, Hash, Hasher};

use super::engine::{LeafId, LeafTable, Oracle};
use crate::error::Result;
use crate::geometry::BoundingBox;
use crate::lp::{chebyshev_ball, is_feasible};
use crate::rng::{mix, stream_rng};
use crate::sampler::walk_convex;
use crate::scalar::Scalar;

/// Balls thinner than this are treated as flat; merging a flat candidate
/// adds no volume.
const FLAT_RADIUS: f64 = 1e-12;

pub(crate) struct LpOracle<T> {
    bbox: BoundingBox<T>,
    eps: T,
    delta_v: f64,
    n_volume: usize,
    seed: u64,
    feasible: HashMap<Vec<LeafId>, bool>,
    escapes: HashMap<(Vec<LeafId>, LeafId), bool>,
}

impl<T: Scalar> LpOracle<T> {
    pub(crate) fn new(bbox: BoundingBox<T>, eps: f64, delta_v: f64, n_volume: usize, seed: u64) -> Self {
        Self { bbox, eps: T::of(eps), delta_v, n_volume, seed, feasible: HashMap::new(), escapes: HashMap::new() }
    }
}

impl<T: Scalar> Oracle<T> for LpOracle<T> {
    fn feasible(&mut self, table: &LeafTable<T>, ids: &[LeafId]) -> Result<bool> {
        if let Some(&v) = self.feasible.get(ids) {
            return Ok(v);
        }
        let v = is_feasible(&table.halfspaces(ids), &self.bbox)?;
        self.feasible.insert(ids.to_vec(), v);
        Ok(v)
    }

    fn escapes(&mut self, table: &LeafTable<T>, ids: &[LeafId], leaf: LeafId) -> Result<bool> {
        let key = (ids.to_vec(), leaf);
        if let Some(&v) = self.escapes.get(&key) {
            return Ok(v);
        }
        if table.has_witness(ids, leaf) {
            return Ok(true);
        }
        let mut hs = table.halfspaces(ids);
        hs.push(table.get(leaf).negated(self.eps));
        let v = is_feasible(&hs, &self.bbox)?;
        self.escapes.insert(key, v);
        Ok(v)
    }

    fn accept_merge(&mut self, table: &LeafTable<T>, a: &[LeafId], b: &[LeafId], merged: &[LeafId]) -> Result<bool> {
        let m = table.halfspaces(merged);
        let Some(ball) = chebyshev_ball(&m, &self.bbox)? else {
            return Ok(false);
        };
        if ball.radius.as_f64() <= FLAT_RADIUS {
            return Ok(true);
        }
        let mut hasher = DefaultHasher::new();
        (a, b).hash(&mut hasher);
        let mut rng = stream_rng(mix(self.seed, hasher.finish()), 2);
        let burn_in = 10 * self.bbox.dim();
        let (pa, pb) = (table.halfspaces(a), table.halfspaces(b));
        let limit = (self.delta_v * self.n_volume as f64).floor() as usize;
        let mut outside = 0;
        walk_convex(&mut rng, &m, &self.bbox, &ball.center, self.n_volume, burn_in, |x| {
            if !pa.iter().all(|h| h.contains_unchecked(x)) && !pb.iter().all(|h| h.contains_unchecked(x)) {
                outside += 1;
            }
            outside <= limit
        });
        Ok(outside <= limit)
    }

    fn retain(&mut self, live: &HashSet<LeafId>) {
        self.feasible.retain(|ids, _| ids.iter().all(|id| live.contains(id)));
        self.escapes.retain(|(ids, leaf), _| live.contains(leaf) && ids.iter().all(|id| live.contains(id)));
    }
}
