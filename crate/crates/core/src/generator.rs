//! Sampling points from a swarm with a hit-and-run walk that handles
//! non-convex shapes.
//!
//! Each step picks a random direction, cuts the line through the current
//! point into the member segments, chooses one segment and a uniform point
//! inside it.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abstraction::COEFFICIENT_TOLERANCE;
use crate::abstraction::{half_line, rangefinder_with, DEFAULT_BOX_MARGIN};
use crate::error::{PolyraError, Result};
use crate::geometry::{check_dim, BoundingBox, Swarm};
use crate::interval::IntervalSet;
use crate::logic::{simplify_with, swarm_to_tree, LogicNode};
use crate::rng::stream_rng;
use crate::sampler::random_direction;
use crate::scalar::{dot, Scalar};

/// How a segment of the current line is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentWeighting {
    /// Probability proportional to `1 / length`.
    #[default]
    InverseLength,
    /// Probability proportional to `length`.
    ProportionalLength,
}

impl std::str::FromStr for SegmentWeighting {
    type Err = PolyraError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "inverse_length" | "inverse" => Ok(Self::InverseLength),
            "proportional_length" | "proportional" => Ok(Self::ProportionalLength),
            other => Err(PolyraError::InvalidConfig(format!("unknown segment weighting {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct GenConfig<T> {
    pub n_samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub segment_weighting: SegmentWeighting,
    /// Overrides the start point stored with the swarm.
    pub start_point: Option<Vec<T>>,
}

impl<T> Default for GenConfig<T> {
    fn default() -> Self {
        Self { n_samples: 1000, burn_in: 100, seed: 0, segment_weighting: SegmentWeighting::InverseLength, start_point: None }
    }
}

/// Retries of the uniform draw inside a segment before the walk stays put.
const MAX_REDRAWS: usize = 8;

/// Member sections of the line `origin + t * direction`, restricted to the
/// widened data box (stretched to cover `origin` if needed). As in range
/// queries, negated conditions are closed and zero-length sections dropped.
pub fn ray_sections<T: Scalar>(s: &Swarm<T>, origin: &[T], direction: &[T]) -> Result<IntervalSet<T>> {
    check_dim(s.dim(), origin.len())?;
    check_dim(s.dim(), direction.len())?;
    if direction.iter().all(|&v| v == T::zero()) {
        return Err(PolyraError::InvalidConfig("direction must be non-zero".into()));
    }
    if !s.contains(origin)? {
        return Err(PolyraError::StartPointNotMember);
    }
    Ok(Walker::new(s, closed_tree(s), origin)?.sections(origin, direction).without_points())
}

fn closed_tree<T: Scalar>(s: &Swarm<T>) -> LogicNode<T> {
    simplify_with(&swarm_to_tree(s), 0.0)
}

struct Walker<T> {
    tree: LogicNode<T>,
    bbox: BoundingBox<T>,
}

impl<T: Scalar> Walker<T> {
    fn new(s: &Swarm<T>, tree: LogicNode<T>, start: &[T]) -> Result<Self> {
        let bbox = s.data_bounds().widened(DEFAULT_BOX_MARGIN).union(&BoundingBox::new(start.to_vec(), start.to_vec())?)?;
        Ok(Self { tree, bbox })
    }

    fn sections(&self, origin: &[T], d: &[T]) -> IntervalSet<T> {
        let tol = T::of(COEFFICIENT_TOLERANCE);
        let line = rangefinder_with(&self.tree, &|h: &crate::geometry::Halfspace<T>| {
            Ok(half_line(dot(h.normal(), d), h.bound() - dot(h.normal(), origin), tol))
        })
        .expect("line restriction of a simplified tree");
        let mut range = IntervalSet::full();
        for k in 0..origin.len() {
            range = range.intersect(&half_line(d[k], self.bbox.hi()[k] - origin[k], tol)).intersect(&half_line(
                -d[k],
                origin[k] - self.bbox.lo()[k],
                tol,
            ));
        }
        line.intersect(&range)
    }
}

/// Runs one walk and returns `cfg.n_samples` member points after
/// `cfg.burn_in` discarded steps.
pub fn generate<T: Scalar>(s: &Swarm<T>, cfg: &GenConfig<T>) -> Result<Vec<Vec<T>>> {
    if cfg.n_samples == 0 {
        return Err(PolyraError::InvalidConfig("n_samples must be positive".into()));
    }
    let start = match (&cfg.start_point, s.start_point()) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p.to_vec(),
        (None, None) => return Err(PolyraError::NoStartPoint),
    };
    check_dim(s.dim(), start.len())?;
    if !s.contains(&start)? {
        return Err(PolyraError::StartPointNotMember);
    }
    let walker = Walker::new(s, closed_tree(s), &start)?;
    let mut rng = stream_rng(cfg.seed, 0);
    let mut x = start;
    let mut out = Vec::with_capacity(cfg.n_samples);
    for step in 0..cfg.burn_in + cfg.n_samples {
        let d = random_direction::<T>(&mut rng, s.dim());
        let sections = walker.sections(&x, &d);
        if let Some(next) = pick(&mut rng, &sections, cfg.segment_weighting, &x, &d, s) {
            x = next;
        }
        if step >= cfg.burn_in {
            out.push(x.clone());
        }
    }
    Ok(out)
}

fn pick<T: Scalar>(
    rng: &mut impl Rng,
    sections: &IntervalSet<T>,
    weighting: SegmentWeighting,
    x: &[T],
    d: &[T],
    s: &Swarm<T>,
) -> Option<Vec<T>> {
    let segments: Vec<_> = sections.intervals().iter().filter(|i| i.length() > T::zero() && i.length().is_finite()).collect();
    if segments.is_empty() {
        return None;
    }
    let weights: Vec<f64> = segments
        .iter()
        .map(|i| match weighting {
            SegmentWeighting::InverseLength => 1.0 / i.length().as_f64(),
            SegmentWeighting::ProportionalLength => i.length().as_f64(),
        })
        .collect();
    let chosen = segments[WeightedIndex::new(&weights).ok()?.sample(rng)];
    for _ in 0..MAX_REDRAWS {
        let u: f64 = rng.random();
        let t = chosen.lo + chosen.length() * T::of(u);
        let next: Vec<T> = x.iter().zip(d).map(|(&a, &b)| a + t * b).collect();
        if s.contains_unchecked(&next) {
            return Some(next);
        }
    }
    None
}
