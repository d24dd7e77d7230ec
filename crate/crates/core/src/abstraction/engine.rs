//! Fixed-point loop shared by the abstraction backends.
//!
//! Terms are sorted lists of interned leaf ids, so equal constraints are
//! compared by id and decisions can be cached by id lists.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::error::Result;
use crate::geometry::{Halfspace, Polytope};
use crate::logic::DnfForm;
use crate::scalar::Scalar;
use crate::training::Dataset;

pub(crate) type LeafId = usize;

pub(crate) struct LeafTable<T> {
    next: LeafId,
    leaves: HashMap<LeafId, Halfspace<T>>,
    train: HashMap<LeafId, FixedBitSet>,
    index: HashMap<Vec<u64>, LeafId>,
    n_train: usize,
}

fn leaf_key<T: Scalar>(h: &Halfspace<T>) -> Vec<u64> {
    h.normal().iter().chain(std::iter::once(&h.bound())).map(|v| v.as_f64().to_bits()).collect()
}

impl<T: Scalar> LeafTable<T> {
    fn new(n_train: usize) -> Self {
        Self { next: 0, leaves: HashMap::new(), train: HashMap::new(), index: HashMap::new(), n_train }
    }

    pub(crate) fn get(&self, id: LeafId) -> &Halfspace<T> {
        &self.leaves[&id]
    }

    pub(crate) fn halfspaces(&self, ids: &[LeafId]) -> Vec<Halfspace<T>> {
        ids.iter().map(|&i| self.leaves[&i].clone()).collect()
    }

    fn intern(&mut self, h: &Halfspace<T>, training: &Dataset<T>) -> LeafId {
        let key = leaf_key(h);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.next;
        self.next += 1;
        let mut bits = FixedBitSet::with_capacity(self.n_train);
        for (i, x) in training.rows().enumerate() {
            bits.set(i, h.contains_unchecked(x));
        }
        self.leaves.insert(id, h.clone());
        self.train.insert(id, bits);
        self.index.insert(key, id);
        id
    }

    fn intern_term(&mut self, p: &Polytope<T>, training: &Dataset<T>) -> Vec<LeafId> {
        let mut ids: Vec<LeafId> = p.constraints().iter().map(|h| self.intern(h, training)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Whether a training point satisfies all of `ids` but not `leaf`.
    pub(crate) fn has_witness(&self, ids: &[LeafId], leaf: LeafId) -> bool {
        self.train_bits(ids).difference(&self.train[&leaf]).next().is_some()
    }

    fn train_bits(&self, ids: &[LeafId]) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.n_train);
        bits.insert_range(..);
        for id in ids {
            bits.intersect_with(&self.train[id]);
        }
        bits
    }

    fn retain(&mut self, live: &HashSet<LeafId>) {
        self.leaves.retain(|id, _| live.contains(id));
        self.train.retain(|id, _| live.contains(id));
        self.index.retain(|_, id| live.contains(id));
    }
}

/// Geometric decisions a backend must provide.
pub(crate) trait Oracle<T: Scalar> {
    /// Whether the term has any point in the bounding box.
    fn feasible(&mut self, table: &LeafTable<T>, ids: &[LeafId]) -> Result<bool>;

    /// Whether some point satisfies all of `ids` but not `leaf`.
    fn escapes(&mut self, table: &LeafTable<T>, ids: &[LeafId], leaf: LeafId) -> Result<bool>;

    /// Whether replacing `a` and `b` by `merged` stays within the volume slack.
    fn accept_merge(&mut self, table: &LeafTable<T>, a: &[LeafId], b: &[LeafId], merged: &[LeafId]) -> Result<bool>;

    /// Drops cached state for leaves outside `live`.
    fn retain(&mut self, live: &HashSet<LeafId>);
}

pub(crate) struct Engine<'a, T: Scalar, O> {
    dim: usize,
    table: LeafTable<T>,
    oracle: O,
    training: &'a Dataset<T>,
    max_passes: usize,
    rejected: HashSet<(Vec<LeafId>, Vec<LeafId>)>,
}

impl<'a, T: Scalar, O: Oracle<T>> Engine<'a, T, O> {
    pub(crate) fn new(dim: usize, oracle: O, training: &'a Dataset<T>, max_passes: usize) -> Self {
        Self { dim, table: LeafTable::new(training.len()), oracle, training, max_passes, rejected: HashSet::new() }
    }

    pub(crate) fn run(&mut self, d: &DnfForm<T>) -> Result<DnfForm<T>> {
        let mut terms: Vec<Vec<LeafId>> = d.terms().iter().map(|p| self.table.intern_term(p, self.training)).collect();
        for _ in 0..self.max_passes {
            let before = terms.clone();
            terms = self.redundant_ands(terms)?;
            terms = self.redundant_ors(terms);
            terms = self.puzzle(terms)?;
            if terms == before {
                break;
            }
        }
        let out = terms.iter().map(|ids| Polytope::from_parts_unchecked(self.dim, self.table.halfspaces(ids))).collect();
        self.collect_garbage(&terms);
        DnfForm::new(self.dim, out)
    }

    fn redundant_ands(&mut self, terms: Vec<Vec<LeafId>>) -> Result<Vec<Vec<LeafId>>> {
        let mut out: Vec<Vec<LeafId>> = Vec::with_capacity(terms.len());
        for mut ids in terms {
            if !self.oracle.feasible(&self.table, &ids)? {
                continue;
            }
            let mut i = 0;
            while i < ids.len() {
                let mut others = ids.clone();
                let leaf = others.remove(i);
                if self.oracle.escapes(&self.table, &others, leaf)? {
                    i += 1;
                } else {
                    ids = others;
                }
            }
            if !out.contains(&ids) {
                out.push(ids);
            }
        }
        Ok(out)
    }

    /// Greedy in term order: a term goes if the kept terms before it and
    /// all terms after it already cover its training points.
    fn redundant_ors(&self, terms: Vec<Vec<LeafId>>) -> Vec<Vec<LeafId>> {
        let n_train = self.training.len();
        let bits: Vec<FixedBitSet> = terms.iter().map(|ids| self.table.train_bits(ids)).collect();
        let mut suffix = vec![FixedBitSet::with_capacity(n_train); terms.len() + 1];
        for i in (0..terms.len()).rev() {
            let mut s = suffix[i + 1].clone();
            s.union_with(&bits[i]);
            suffix[i] = s;
        }
        let mut kept = FixedBitSet::with_capacity(n_train);
        let mut out = Vec::with_capacity(terms.len());
        for (i, ids) in terms.into_iter().enumerate() {
            let mut others = kept.clone();
            others.union_with(&suffix[i + 1]);
            if !bits[i].is_subset(&others) {
                kept.union_with(&bits[i]);
                out.push(ids);
            }
        }
        out
    }

    fn puzzle(&mut self, mut terms: Vec<Vec<LeafId>>) -> Result<Vec<Vec<LeafId>>> {
        'restart: loop {
            for a in 0..terms.len() {
                for b in a + 1..terms.len() {
                    let key = (terms[a].clone(), terms[b].clone());
                    if self.rejected.contains(&key) {
                        continue;
                    }
                    if let Some(m) = self.try_merge(&terms[a], &terms[b])? {
                        terms[a] = m;
                        terms.remove(b);
                        continue 'restart;
                    }
                    self.rejected.insert(key);
                }
            }
            return Ok(terms);
        }
    }

    fn try_merge(&mut self, a: &[LeafId], b: &[LeafId]) -> Result<Option<Vec<LeafId>>> {
        let mut merged = Vec::with_capacity(a.len() + b.len());
        for &h in a {
            if !self.oracle.escapes(&self.table, b, h)? {
                merged.push(h);
            }
        }
        for &h in b {
            if !self.oracle.escapes(&self.table, a, h)? {
                merged.push(h);
            }
        }
        merged.sort_unstable();
        merged.dedup();
        // Keeping every constraint of one side means the candidate lies inside it.
        let covers = |side: &[LeafId]| side.iter().all(|h| merged.binary_search(h).is_ok());
        if covers(a) || covers(b) {
            return Ok(Some(merged));
        }
        Ok(self.oracle.accept_merge(&self.table, a, b, &merged)?.then_some(merged))
    }

    fn collect_garbage(&mut self, terms: &[Vec<LeafId>]) {
        let live: HashSet<LeafId> = terms.iter().flatten().copied().collect();
        self.table.retain(&live);
        self.oracle.retain(&live);
        self.rejected.retain(|(a, b)| a.iter().chain(b).all(|id| live.contains(id)));
    }
}
