//! Boolean trees over halfspace leaves and their disjunctive normal form.
//!
//! A swarm is the conjunction `AND_i (NOT A_i OR B_i)`. [`simplify`] pushes
//! negations into the leaves and flattens the tree into an and-of-ors, which
//! [`abstract_iteratively`] folds one group at a time into a DNF, handing
//! every intermediate DNF to an abstraction backend.

use serde::{Deserialize, Serialize};

use crate::error::{PolyraError, Result};
use crate::geometry::{check_dim, Halfspace, Polytope, Swarm};
use crate::scalar::Scalar;

/// Shift applied when a leaf is negated: `!(m.x <= b)` becomes `-m.x <= -b - eps`.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Rewrite passes before [`simplify`] gives up looking for a fixed point.
pub const MAX_SIMPLIFY_PASSES: usize = 100;

/// Default ceiling on intermediate DNF size in [`abstract_iteratively`].
pub const DEFAULT_TERM_CEILING: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub enum LogicNode<T> {
    True,
    False,
    Leaf(Halfspace<T>),
    Not(Box<LogicNode<T>>),
    And(Vec<LogicNode<T>>),
    Or(Vec<LogicNode<T>>),
}

impl<T: Scalar> LogicNode<T> {
    /// Complexity measure: number of nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Self::True | Self::False | Self::Leaf(_) => 1,
            Self::Not(c) => 1 + c.node_count(),
            Self::And(cs) | Self::Or(cs) => 1 + cs.iter().map(Self::node_count).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Self::True | Self::False => 0,
            Self::Leaf(_) => 1,
            Self::Not(c) => c.leaf_count(),
            Self::And(cs) | Self::Or(cs) => cs.iter().map(Self::leaf_count).sum(),
        }
    }

    /// Dimension of the first leaf, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::True | Self::False => None,
            Self::Leaf(h) => Some(h.dim()),
            Self::Not(c) => c.dim(),
            Self::And(cs) | Self::Or(cs) => cs.iter().find_map(Self::dim),
        }
    }

    pub fn eval(&self, x: &[T]) -> Result<bool> {
        Ok(match self {
            Self::True => true,
            Self::False => false,
            Self::Leaf(h) => h.contains(x)?,
            Self::Not(c) => !c.eval(x)?,
            Self::And(cs) => {
                for c in cs {
                    if !c.eval(x)? {
                        return Ok(false);
                    }
                }
                true
            }
            Self::Or(cs) => {
                for c in cs {
                    if c.eval(x)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Checks the closure property of [`simplify`]: no `Not`, constants only
    /// at the root, non-empty `And`/`Or` that never nest in themselves.
    pub fn is_simplified(&self) -> bool {
        fn inner<T>(n: &LogicNode<T>, parent: Option<bool>) -> bool {
            match n {
                LogicNode::Leaf(_) => true,
                LogicNode::True | LogicNode::False | LogicNode::Not(_) => false,
                LogicNode::And(cs) => cs.len() >= 2 && parent != Some(true) && cs.iter().all(|c| inner(c, Some(true))),
                LogicNode::Or(cs) => cs.len() >= 2 && parent != Some(false) && cs.iter().all(|c| inner(c, Some(false))),
            }
        }
        matches!(self, Self::True | Self::False) || inner(self, None)
    }
}

/// `AND_i (NOT AND(A_i) OR AND(B_i))`.
pub fn swarm_to_tree<T: Scalar>(swarm: &Swarm<T>) -> LogicNode<T> {
    if swarm.is_empty() {
        return LogicNode::True;
    }
    let leaves = |p: &Polytope<T>| LogicNode::And(p.constraints().iter().cloned().map(LogicNode::Leaf).collect());
    LogicNode::And(
        swarm
            .base_shapes()
            .iter()
            .map(|f| LogicNode::Or(vec![LogicNode::Not(Box::new(leaves(f.condition()))), leaves(f.consequent())]))
            .collect(),
    )
}

/// Rewrites `tree` to a fixed point with the default epsilon.
pub fn simplify<T: Scalar>(tree: &LogicNode<T>) -> LogicNode<T> {
    simplify_with(tree, DEFAULT_EPSILON)
}

pub fn simplify_with<T: Scalar>(tree: &LogicNode<T>, eps: f64) -> LogicNode<T> {
    let eps = T::of(eps);
    let mut current = simplify_pass(tree, false, eps);
    for _ in 1..MAX_SIMPLIFY_PASSES {
        let next = simplify_pass(&current, false, eps);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// One bottom-up pass: negations are pushed to the leaves (De Morgan and
/// double negation), constants are folded and nested operators flattened.
fn simplify_pass<T: Scalar>(node: &LogicNode<T>, negate: bool, eps: T) -> LogicNode<T> {
    match node {
        LogicNode::True => constant(!negate),
        LogicNode::False => constant(negate),
        LogicNode::Leaf(h) => LogicNode::Leaf(if negate { h.negated(eps) } else { h.clone() }),
        LogicNode::Not(c) => simplify_pass(c, !negate, eps),
        LogicNode::And(cs) => {
            let kids = cs.iter().map(|c| simplify_pass(c, negate, eps));
            if negate {
                fold_or(kids)
            } else {
                fold_and(kids)
            }
        }
        LogicNode::Or(cs) => {
            let kids = cs.iter().map(|c| simplify_pass(c, negate, eps));
            if negate {
                fold_and(kids)
            } else {
                fold_or(kids)
            }
        }
    }
}

fn constant<T>(value: bool) -> LogicNode<T> {
    if value {
        LogicNode::True
    } else {
        LogicNode::False
    }
}

fn fold_and<T>(kids: impl Iterator<Item = LogicNode<T>>) -> LogicNode<T> {
    let mut out = Vec::new();
    for k in kids {
        match k {
            LogicNode::True => {}
            LogicNode::False => return LogicNode::False,
            LogicNode::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => LogicNode::True,
        1 => out.pop().expect("one child"),
        _ => LogicNode::And(out),
    }
}

fn fold_or<T>(kids: impl Iterator<Item = LogicNode<T>>) -> LogicNode<T> {
    let mut out = Vec::new();
    for k in kids {
        match k {
            LogicNode::False => {}
            LogicNode::True => return LogicNode::True,
            LogicNode::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => LogicNode::False,
        1 => out.pop().expect("one child"),
        _ => LogicNode::Or(out),
    }
}

/// Union of polytopes. No terms means the empty set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct DnfForm<T> {
    dim: usize,
    terms: Vec<Polytope<T>>,
}

impl<T: Scalar> DnfForm<T> {
    pub fn new(dim: usize, terms: Vec<Polytope<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(PolyraError::ZeroDimension);
        }
        for t in &terms {
            check_dim(dim, t.dim())?;
        }
        Ok(Self { dim, terms })
    }

    /// All of space: a single unconstrained term.
    pub fn universal(dim: usize) -> Self {
        Self { dim, terms: vec![Polytope::universal(dim)] }
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Polytope<T>] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Polytope<T>> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, x: &[T]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.terms.iter().any(|t| t.contains_unchecked(x)))
    }

    /// `OR(AND(leaves))`, without constant folding beyond the trivial cases.
    pub fn to_tree(&self) -> LogicNode<T> {
        let term = |p: &Polytope<T>| match p.len() {
            0 => LogicNode::True,
            1 => LogicNode::Leaf(p.constraints()[0].clone()),
            _ => LogicNode::And(p.constraints().iter().cloned().map(LogicNode::Leaf).collect()),
        };
        match self.terms.len() {
            0 => LogicNode::False,
            1 => term(&self.terms[0]),
            _ => LogicNode::Or(self.terms.iter().map(term).collect()),
        }
    }

    /// Node count of [`DnfForm::to_tree`].
    pub fn node_count(&self) -> usize {
        self.to_tree().node_count()
    }

    /// Removes repeated constraints inside each term, then repeated terms.
    pub fn dedup(&self) -> Self {
        let mut terms: Vec<Polytope<T>> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut cs: Vec<Halfspace<T>> = Vec::with_capacity(t.len());
            for h in t.constraints() {
                if !cs.contains(h) {
                    cs.push(h.clone());
                }
            }
            let p = Polytope::from_parts_unchecked(self.dim, cs);
            if !terms.contains(&p) {
                terms.push(p);
            }
        }
        Self { dim: self.dim, terms }
    }
}

/// `(OR_a t_a) AND (OR_c p_c)` expanded to `OR_{a,c} (t_a AND p_c)`.
pub fn distribute_to_dnf<T: Scalar>(conjunct: &DnfForm<T>, new_or_term: &[Polytope<T>]) -> Result<DnfForm<T>> {
    let mut terms = Vec::with_capacity(conjunct.len() * new_or_term.len());
    for t in &conjunct.terms {
        for p in new_or_term {
            terms.push(t.intersect(p)?);
        }
    }
    Ok(DnfForm { dim: conjunct.dim, terms })
}

/// Splits a simplified tree into its OR groups, each alternative an AND of
/// leaves. The conjunction of the groups equals the tree.
pub fn or_groups<T: Scalar>(tree: &LogicNode<T>, dim: usize) -> Result<Vec<Vec<Polytope<T>>>> {
    fn alternative<T: Scalar>(n: &LogicNode<T>, dim: usize) -> Result<Polytope<T>> {
        match n {
            LogicNode::Leaf(h) => Polytope::new(dim, vec![h.clone()]),
            LogicNode::And(cs) => {
                let hs = cs
                    .iter()
                    .map(|c| match c {
                        LogicNode::Leaf(h) => Ok(h.clone()),
                        _ => Err(PolyraError::UnexpectedTreeShape),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Polytope::new(dim, hs)
            }
            _ => Err(PolyraError::UnexpectedTreeShape),
        }
    }
    fn group<T: Scalar>(n: &LogicNode<T>, dim: usize) -> Result<Vec<Polytope<T>>> {
        match n {
            LogicNode::Or(alts) => alts.iter().map(|a| alternative(a, dim)).collect(),
            other => Ok(vec![alternative(other, dim)?]),
        }
    }
    match tree {
        LogicNode::True => Ok(Vec::new()),
        LogicNode::False => Ok(vec![Vec::new()]),
        LogicNode::And(cs) => cs.iter().map(|c| group(c, dim)).collect(),
        other => Ok(vec![group(other, dim)?]),
    }
}

/// Output of [`abstract_iteratively`].
#[derive(Clone, Debug)]
pub struct IterativeAbstraction<T> {
    pub dnf: DnfForm<T>,
    /// Term count after each step; the first entry is the first group.
    pub term_counts: Vec<usize>,
}

/// Folds the OR groups of a simplified tree into a DNF one group at a time:
/// `q_1 = group_1`, `q_i = abstract_fn(distribute(q_{i-1}, group_i))`.
pub fn abstract_iteratively<T, F>(
    tree: &LogicNode<T>,
    dim: usize,
    ceiling: usize,
    mut abstract_fn: F,
) -> Result<IterativeAbstraction<T>>
where
    T: Scalar,
    F: FnMut(DnfForm<T>) -> Result<DnfForm<T>>,
{
    let mut groups = or_groups(tree, dim)?.into_iter();
    let mut q = match groups.next() {
        None => DnfForm::universal(dim),
        Some(first) => DnfForm::new(dim, first)?,
    };
    let mut term_counts = vec![q.len()];
    for (step, group) in groups.enumerate() {
        q = abstract_fn(distribute_to_dnf(&q, &group)?)?;
        term_counts.push(q.len());
        if q.len() > ceiling {
            return Err(PolyraError::TermCeilingExceeded { terms: q.len(), ceiling, step: step + 2 });
        }
    }
    Ok(IterativeAbstraction { dnf: q, term_counts })
}
