//! Range queries on a single free coordinate and clustering by abstraction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::abstraction::{abstract_swarm, rangefinder, substitute, AbstractConfig};
use crate::error::{PolyraError, Result};
use crate::geometry::Polytope;
use crate::geometry::Swarm;
use crate::interval::IntervalSet;
use crate::logic::{simplify_with, swarm_to_tree};
use crate::scalar::Scalar;
use crate::training::{fit, Dataset, FitConfig};

/// Values for every coordinate but one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RangeQuery<T> {
    fixed: BTreeMap<usize, T>,
    free_index: usize,
    dim: usize,
}

impl<T: Scalar> RangeQuery<T> {
    pub fn new(dim: usize, fixed: impl IntoIterator<Item = (usize, T)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (index, v) in fixed {
            if index >= dim {
                return Err(PolyraError::InvalidCoordinate { index, dim });
            }
            if !v.is_finite() {
                return Err(PolyraError::NonFinite("fixed coordinate"));
            }
            map.insert(index, v);
        }
        let free: Vec<usize> = (0..dim).filter(|k| !map.contains_key(k)).collect();
        match free.as_slice() {
            [k] => Ok(Self { fixed: map, free_index: *k, dim }),
            _ => {
                Err(PolyraError::InvalidConfig(format!("a range query needs exactly one free coordinate, found {}", free.len())))
            }
        }
    }

    pub fn fixed(&self) -> &BTreeMap<usize, T> {
        &self.fixed
    }

    pub fn free_index(&self) -> usize {
        self.free_index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The full point with `v` in the free coordinate.
    pub fn point(&self, v: T) -> Vec<T> {
        (0..self.dim).map(|k| self.fixed.get(&k).copied().unwrap_or(v)).collect()
    }
}

/// Exact member values of the free coordinate, up to boundary points.
///
/// Negated conditions are taken as closed complements here, so a condition
/// boundary crossing the line leaves no sliver gap. Zero-length components
/// are dropped.
pub fn range_query<T: Scalar>(s: &Swarm<T>, q: &RangeQuery<T>) -> Result<IntervalSet<T>> {
    if q.dim != s.dim() {
        return Err(PolyraError::DimensionMismatch { expected: s.dim(), found: q.dim });
    }
    let fixed: Vec<(usize, T)> = q.fixed.iter().map(|(&k, &v)| (k, v)).collect();
    let tree = simplify_with(&swarm_to_tree(s), 0.0);
    Ok(rangefinder(&substitute(&tree, s.dim(), &fixed)?)?.without_points())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Clustering<T> {
    pub clusters: Vec<Polytope<T>>,
    /// Indices of the clusters containing each training point; empty for
    /// points no cluster covers.
    pub assignment: Vec<Vec<usize>>,
}

impl<T> Clustering<T> {
    pub fn unassigned(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_empty()).count()
    }
}

/// Fits a swarm and abstracts it; each remaining term is a cluster.
pub fn cluster<T: Scalar>(data: &Dataset<T>, fit_cfg: &FitConfig, abs_cfg: &AbstractConfig<T>) -> Result<Clustering<T>> {
    let swarm = fit(data, fit_cfg)?;
    cluster_swarm(&swarm, data, abs_cfg)
}

/// Clusters an already fitted swarm.
pub fn cluster_swarm<T: Scalar>(swarm: &Swarm<T>, data: &Dataset<T>, abs_cfg: &AbstractConfig<T>) -> Result<Clustering<T>> {
    let clusters = abstract_swarm(swarm, data, abs_cfg)?.dnf.into_terms();
    let assignment = data.rows().map(|x| (0..clusters.len()).filter(|&c| clusters[c].contains_unchecked(x)).collect()).collect();
    Ok(Clustering { clusters, assignment })
}
