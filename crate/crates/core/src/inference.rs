//! Continuous normality scores and one-swarm-per-class classification.
//!
//! Scores are oriented so that 1 means "normal"; an anomaly score is
//! `1 - score`.

use std::collections::HashSet;

use crate::error::{PolyraError, Result};
use crate::geometry::{check_dim, Swarm};
use crate::scalar::Scalar;

/// Fraction of base shapes that accept `x`.
pub fn score_mean<T: Scalar>(swarm: &Swarm<T>, x: &[T]) -> Result<f64> {
    check_dim(swarm.dim(), x.len())?;
    if swarm.is_empty() {
        return Err(PolyraError::Empty("swarm"));
    }
    let accepted = swarm.base_shapes().iter().filter(|f| f.eval_unchecked(x)).count();
    Ok(accepted as f64 / swarm.len() as f64)
}

/// Result of [`score_conditional`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalScore {
    pub value: f64,
    /// `x` lies in no condition polytope; `value` is then 1.
    pub no_coverage: bool,
}

/// Among base shapes whose condition contains `x`, the fraction whose
/// consequent also contains it.
pub fn score_conditional<T: Scalar>(swarm: &Swarm<T>, x: &[T]) -> Result<ConditionalScore> {
    check_dim(swarm.dim(), x.len())?;
    let (mut covered, mut satisfied) = (0usize, 0usize);
    for f in swarm.base_shapes() {
        if f.condition().contains_unchecked(x) {
            covered += 1;
            if f.consequent().contains_unchecked(x) {
                satisfied += 1;
            }
        }
    }
    Ok(if covered == 0 {
        ConditionalScore { value: 1.0, no_coverage: true }
    } else {
        ConditionalScore { value: satisfied as f64 / covered as f64, no_coverage: false }
    })
}

/// One swarm per class label.
#[derive(Clone, Debug)]
pub struct ClassifierBundle<T> {
    classes: Vec<(String, Swarm<T>)>,
}

impl<T: Scalar> ClassifierBundle<T> {
    pub fn new(classes: Vec<(String, Swarm<T>)>) -> Result<Self> {
        let first = classes.first().ok_or(PolyraError::Empty("class list"))?;
        let dim = first.1.dim();
        let mut seen = HashSet::new();
        for (label, swarm) in &classes {
            check_dim(dim, swarm.dim())?;
            if !seen.insert(label.as_str()) {
                return Err(PolyraError::InvalidLabels(format!("duplicate label {label:?}")));
            }
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[(String, Swarm<T>)] {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.classes[0].1.dim()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    Assigned(String),
    Reject,
    Overlap(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassOutcome {
    pub kind: OutcomeKind,
    pub member_labels: Vec<String>,
}

pub fn classify<T: Scalar>(bundle: &ClassifierBundle<T>, x: &[T]) -> Result<ClassOutcome> {
    check_dim(bundle.dim(), x.len())?;
    let member_labels: Vec<String> =
        bundle.classes.iter().filter(|(_, s)| s.contains_unchecked(x)).map(|(l, _)| l.clone()).collect();
    let kind = match member_labels.len() {
        0 => OutcomeKind::Reject,
        1 => OutcomeKind::Assigned(member_labels[0].clone()),
        _ => OutcomeKind::Overlap(member_labels.clone()),
    };
    Ok(ClassOutcome { kind, member_labels })
}

/// Like [`classify`], but resolves rejects and overlaps by the highest
/// conditional score. Ties go to the class listed first.
pub fn classify_with_score_fallback<T: Scalar>(bundle: &ClassifierBundle<T>, x: &[T]) -> Result<String> {
    if let OutcomeKind::Assigned(label) = classify(bundle, x)?.kind {
        return Ok(label);
    }
    let mut best: Option<(&str, f64)> = None;
    for (label, swarm) in &bundle.classes {
        let score = score_conditional(swarm, x)?.value;
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((label, score));
        }
    }
    Ok(best.expect("bundle has at least one class").0.to_string())
}
