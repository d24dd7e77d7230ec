//! Rewriting logic trees into small unions of polytopes.
//!
//! [`rangefinder`] is exact for one-dimensional trees. In higher dimensions
//! an [`Abstractor`] shrinks DNF forms with one of two backends: decisions
//! from a fixed pool of uniform samples, or from linear programs. Both run
//! the same loop to a fixed point: drop empty terms and implied
//! constraints, drop terms whose training points are covered elsewhere,
//! then merge pairs of terms whose common hull adds little volume.

mod engine;
mod linear;
mod rangefinder;
mod sampling;

use serde::{Deserialize, Serialize};

pub use rangefinder::{half_line, rangefinder, rangefinder_with, restrict_to_line, substitute, COEFFICIENT_TOLERANCE};

use crate::error::{PolyraError, Result};
use crate::geometry::{check_dim, BoundingBox, Swarm};
use crate::logic::{
    abstract_iteratively, simplify_with, swarm_to_tree, DnfForm, LogicNode, DEFAULT_EPSILON, DEFAULT_TERM_CEILING,
};
use crate::rng::stream_rng;
use crate::sampler::uniform_in_box;
use crate::scalar::Scalar;
use crate::training::Dataset;
use engine::Engine;
use linear::LpOracle;
use sampling::SamplingOracle;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Sampling,
    Lp,
}

impl std::str::FromStr for Backend {
    type Err = PolyraError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sampling" => Ok(Self::Sampling),
            "lp" => Ok(Self::Lp),
            other => Err(PolyraError::InvalidConfig(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct AbstractConfig<T> {
    /// Relative volume a merge may add.
    pub delta_v: f64,
    pub n_feasibility_samples: usize,
    /// Walk length behind each LP merge decision.
    pub n_volume_samples: usize,
    /// Region all decisions are made in. `None` means the data bounds
    /// widened by 10% per side.
    pub bounding_box: Option<BoundingBox<T>>,
    pub seed: u64,
    pub backend: Backend,
    /// Margin that makes negated constraints strict.
    pub epsilon: f64,
    pub term_ceiling: usize,
    /// Cap on rounds of the three-step loop per call.
    pub max_passes: usize,
}

impl<T: Scalar> Default for AbstractConfig<T> {
    fn default() -> Self {
        Self {
            delta_v: 0.05,
            n_feasibility_samples: 10_000,
            n_volume_samples: 10_000,
            bounding_box: None,
            seed: 0,
            backend: Backend::Sampling,
            epsilon: DEFAULT_EPSILON,
            term_ceiling: DEFAULT_TERM_CEILING,
            max_passes: 50,
        }
    }
}

/// Margin added to the data bounds when no box is configured.
pub const DEFAULT_BOX_MARGIN: f64 = 0.1;

impl<T: Scalar> AbstractConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(PolyraError::InvalidConfig(m.into()));
        if !(self.delta_v >= 0.0 && self.delta_v.is_finite()) {
            return bad("delta_v must be finite and >= 0");
        }
        if self.n_feasibility_samples == 0 || self.n_volume_samples == 0 {
            return bad("sample counts must be positive");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be finite and >= 0");
        }
        if self.max_passes == 0 {
            return bad("max_passes must be positive");
        }
        if let Some(b) = &self.bounding_box {
            b.ensure_non_degenerate()?;
        }
        Ok(())
    }

    /// The configured box, or `fallback` widened by the default margin.
    pub fn region(&self, fallback: &BoundingBox<T>) -> Result<BoundingBox<T>> {
        let b = match &self.bounding_box {
            Some(b) => b.clone(),
            None => fallback.widened(DEFAULT_BOX_MARGIN),
        };
        check_dim(fallback.dim(), b.dim())?;
        b.ensure_non_degenerate()?;
        Ok(b)
    }
}

enum Inner<'a, T: Scalar> {
    Sampling(Engine<'a, T, SamplingOracle<T>>),
    Lp(Engine<'a, T, LpOracle<T>>),
}

/// Reusable abstraction state: sample pools, interned constraints and
/// cached decisions persist across calls.
pub struct Abstractor<'a, T: Scalar> {
    dim: usize,
    inner: Inner<'a, T>,
}

impl<'a, T: Scalar> Abstractor<'a, T> {
    /// `region` is the box every decision is made in.
    pub fn new(training: &'a Dataset<T>, region: BoundingBox<T>, cfg: &AbstractConfig<T>) -> Result<Self> {
        cfg.validate()?;
        check_dim(training.dim(), region.dim())?;
        region.ensure_non_degenerate()?;
        let dim = region.dim();
        let inner = match cfg.backend {
            Backend::Sampling => Inner::Sampling(Engine::new(
                dim,
                SamplingOracle::new(region, cfg.n_feasibility_samples, cfg.delta_v, cfg.seed),
                training,
                cfg.max_passes,
            )),
            Backend::Lp => Inner::Lp(Engine::new(
                dim,
                LpOracle::new(region, cfg.epsilon, cfg.delta_v, cfg.n_volume_samples, cfg.seed),
                training,
                cfg.max_passes,
            )),
        };
        Ok(Self { dim, inner })
    }

    pub fn abstract_dnf(&mut self, d: &DnfForm<T>) -> Result<DnfForm<T>> {
        check_dim(self.dim, d.dim())?;
        match &mut self.inner {
            Inner::Sampling(e) => e.run(d),
            Inner::Lp(e) => e.run(d),
        }
    }
}

/// One abstraction call with the sampling backend.
pub fn abstract_sampling<T: Scalar>(d: &DnfForm<T>, training: &Dataset<T>, cfg: &AbstractConfig<T>) -> Result<DnfForm<T>> {
    let cfg = AbstractConfig { backend: Backend::Sampling, ..cfg.clone() };
    Abstractor::new(training, cfg.region(&training.bounds())?, &cfg)?.abstract_dnf(d)
}

/// One abstraction call with the LP backend.
pub fn abstract_lp<T: Scalar>(d: &DnfForm<T>, training: &Dataset<T>, cfg: &AbstractConfig<T>) -> Result<DnfForm<T>> {
    let cfg = AbstractConfig { backend: Backend::Lp, ..cfg.clone() };
    Abstractor::new(training, cfg.region(&training.bounds())?, &cfg)?.abstract_dnf(d)
}

#[derive(Clone, Debug)]
pub struct AbstractionOutcome<T> {
    pub dnf: DnfForm<T>,
    /// Term count after each iterative step.
    pub term_counts: Vec<usize>,
    /// Node count of the input tree.
    pub nodes_before: usize,
    pub nodes_after: usize,
}

impl<T> AbstractionOutcome<T> {
    pub fn reduction_factor(&self) -> f64 {
        self.nodes_before as f64 / self.nodes_after.max(1) as f64
    }
}

/// Simplifies `tree` and folds it into a DNF group by group, abstracting
/// after every step and once more at the end.
pub fn abstract_tree<T: Scalar>(
    tree: &LogicNode<T>,
    dim: usize,
    training: &Dataset<T>,
    region: BoundingBox<T>,
    cfg: &AbstractConfig<T>,
) -> Result<AbstractionOutcome<T>> {
    let mut abstractor = Abstractor::new(training, region, cfg)?;
    let simplified = simplify_with(tree, cfg.epsilon);
    let it = abstract_iteratively(&simplified, dim, cfg.term_ceiling, |q| abstractor.abstract_dnf(&q))?;
    let dnf = abstractor.abstract_dnf(&it.dnf)?;
    let mut term_counts = it.term_counts;
    term_counts.push(dnf.len());
    Ok(AbstractionOutcome { nodes_before: tree.node_count(), nodes_after: dnf.node_count(), dnf, term_counts })
}

/// [`abstract_tree`] on a swarm's logic tree. The default region comes
/// from the swarm's data bounds.
pub fn abstract_swarm<T: Scalar>(
    swarm: &Swarm<T>,
    training: &Dataset<T>,
    cfg: &AbstractConfig<T>,
) -> Result<AbstractionOutcome<T>> {
    let region = cfg.region(swarm.data_bounds())?;
    abstract_tree(&swarm_to_tree(swarm), swarm.dim(), training, region, cfg)
}

/// Box volume times the fraction of `n` uniform draws that satisfy `member`.
pub fn estimate_volume<T, F>(member: F, bbox: &BoundingBox<T>, n: usize, seed: u64) -> Result<f64>
where
    T: Scalar,
    F: Fn(&[T]) -> bool,
{
    if n == 0 {
        return Err(PolyraError::InvalidConfig("sample count must be positive".into()));
    }
    bbox.ensure_non_degenerate()?;
    let mut rng = stream_rng(seed, 0);
    let hits = (0..n).filter(|_| member(&uniform_in_box(&mut rng, bbox))).count();
    Ok(bbox.volume().as_f64() * hits as f64 / n as f64)
}
