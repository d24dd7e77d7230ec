//! Randomized fitting of a swarm to a point cloud.
//!
//! Every accepted draw samples a condition polytope with Gaussian normals and
//! offsets uniform over the training projections, then sets the consequent
//! bounds to the extreme projections of the training points that fall inside
//! the condition. The mirrored condition (all rows negated) is emitted as a
//! second base shape sharing the consequent directions.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PolyraError, Result};
use crate::geometry::{check_dim, BaseShape, BoundingBox, Halfspace, Polytope, Swarm};
use crate::rng::stream_rng;
use crate::scalar::{dot, Scalar};

/// Hyperparameters of [`fit`]. `Default` gives the standard settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Constraints per condition polytope.
    pub adim: usize,
    /// Consequent directions per base shape. Each direction bounds both sides.
    pub bdim: usize,
    /// Number of accepted draws.
    pub n_models: usize,
    /// Total relative widening of every consequent range.
    pub extend: f64,
    /// Minimum number of training points inside a condition polytope.
    pub minpoi: usize,
    /// Fraction trimmed from each tail before taking consequent extremes.
    pub quantile: f64,
    /// Fraction of the training set left out of each draw.
    pub subsample: f64,
    pub seed: u64,
    /// Total rejected draws allowed per requested model.
    pub max_reject_factor: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            adim: 2,
            bdim: 2,
            n_models: 1000,
            extend: 0.0,
            minpoi: 0,
            quantile: 0.0,
            subsample: 0.0,
            seed: 0,
            max_reject_factor: 100,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(PolyraError::InvalidConfig(msg.to_string()));
        if self.adim == 0 {
            return bad("adim must be positive");
        }
        if self.bdim == 0 {
            return bad("bdim must be positive");
        }
        if self.n_models == 0 {
            return bad("n_models must be positive");
        }
        if !(self.extend >= 0.0 && self.extend.is_finite()) {
            return bad("extend must be a finite value >= 0");
        }
        if !(0.0..0.5).contains(&self.quantile) {
            return bad("quantile must lie in [0, 0.5)");
        }
        if !(0.0..1.0).contains(&self.subsample) {
            return bad("subsample must lie in [0, 1)");
        }
        if self.max_reject_factor == 0 {
            return bad("max_reject_factor must be positive");
        }
        Ok(())
    }

    /// Number of training points each draw sees.
    pub fn subset_size(&self, n: usize) -> usize {
        if self.subsample > 0.0 {
            (((1.0 - self.subsample) * n as f64).ceil() as usize).clamp(1, n)
        } else {
            n
        }
    }
}

/// Training points, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new<P: AsRef<[T]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().ok_or(PolyraError::Empty("dataset"))?.as_ref().len();
        let mut data = Vec::with_capacity(dim * points.len());
        for p in points {
            let p = p.as_ref();
            check_dim(dim, p.len())?;
            data.extend_from_slice(p);
        }
        Self::from_flat(dim, data)
    }

    pub fn from_flat(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(PolyraError::ZeroDimension);
        }
        if data.is_empty() {
            return Err(PolyraError::Empty("dataset"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(PolyraError::DimensionMismatch { expected: dim, found: data.len() % dim });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(PolyraError::NonFinite("dataset"));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn bounds(&self) -> BoundingBox<T> {
        let mut lo = self.row(0).to_vec();
        let mut hi = lo.clone();
        for r in self.rows() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(r[k]);
                hi[k] = hi[k].max(r[k]);
            }
        }
        BoundingBox::new(lo, hi).expect("finite data gives a valid box")
    }
}

/// Bookkeeping returned alongside a fitted swarm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitReport {
    pub accepted: usize,
    pub rejected: u64,
    pub base_shapes: usize,
}

/// Fits a swarm with the given hyperparameters.
pub fn fit<T: Scalar>(data: &Dataset<T>, config: &FitConfig) -> Result<Swarm<T>> {
    fit_with_report(data, config).map(|(s, _)| s)
}

pub fn fit_with_report<T: Scalar>(data: &Dataset<T>, config: &FitConfig) -> Result<(Swarm<T>, FitReport)> {
    config.validate()?;
    let available = config.subset_size(data.len());
    if config.minpoi > available {
        return Err(PolyraError::MinpoiTooLarge { minpoi: config.minpoi, available });
    }
    let budget = config.max_reject_factor.saturating_mul(config.n_models as u64);
    let rejected = AtomicU64::new(0);

    let draws = (0..config.n_models)
        .into_par_iter()
        .map(|i| draw_submodel(data, config, i as u64, &rejected, budget))
        .collect::<Result<Vec<_>>>()?;

    let base_shapes: Vec<BaseShape<T>> = draws.into_iter().flatten().collect();
    let report =
        FitReport { accepted: config.n_models, rejected: rejected.load(Ordering::Relaxed), base_shapes: base_shapes.len() };
    let swarm = Swarm::new(base_shapes, data.bounds())?.with_fit_config(config.clone()).with_start_point(data.row(0).to_vec())?;
    Ok((swarm, report))
}

fn draw_submodel<T: Scalar>(
    data: &Dataset<T>,
    config: &FitConfig,
    index: u64,
    rejected: &AtomicU64,
    budget: u64,
) -> Result<Vec<BaseShape<T>>> {
    let mut rng = stream_rng(config.seed, index);
    let dim = data.dim();
    let n = data.len();
    let k = config.subset_size(n);
    let need = config.minpoi.max(1);

    loop {
        let subset: Vec<usize> = if k < n { index::sample(&mut rng, n, k).into_vec() } else { (0..n).collect() };
        let cond_rows = gaussian_rows::<T>(&mut rng, config.adim, dim);
        let cons_rows = gaussian_rows::<T>(&mut rng, config.bdim, dim);

        // projections[p * adim + mu]
        let mut projections = Vec::with_capacity(subset.len() * config.adim);
        for &p in &subset {
            let x = data.row(p);
            projections.extend(cond_rows.iter().map(|m| dot(m, x)));
        }
        let offsets: Vec<T> = (0..config.adim)
            .map(|mu| {
                let (lo, hi) = projections
                    .iter()
                    .skip(mu)
                    .step_by(config.adim)
                    .fold((T::infinity(), T::neg_infinity()), |(l, h), &v| (l.min(v), h.max(v)));
                let u: f64 = rng.random();
                (lo + (hi - lo) * T::of(u)).min(hi)
            })
            .collect();

        let mut inside = Vec::new();
        let mut mirrored = Vec::new();
        for (j, &p) in subset.iter().enumerate() {
            let proj = &projections[j * config.adim..(j + 1) * config.adim];
            if proj.iter().zip(&offsets).all(|(&v, &b)| v <= b) {
                inside.push(p);
            }
            if proj.iter().zip(&offsets).all(|(&v, &b)| v >= b) {
                mirrored.push(p);
            }
        }

        let mut shapes = Vec::with_capacity(2);
        if inside.len() >= need {
            let condition = condition_polytope(&cond_rows, &offsets, false);
            shapes.push(consequent_shape(data, &inside, condition, &cons_rows, config)?);
        }
        if mirrored.len() >= need {
            let condition = condition_polytope(&cond_rows, &offsets, true);
            shapes.push(consequent_shape(data, &mirrored, condition, &cons_rows, config)?);
        }
        if !shapes.is_empty() {
            return Ok(shapes);
        }

        let total = rejected.fetch_add(1, Ordering::Relaxed) + 1;
        if total > budget {
            return Err(PolyraError::RejectionBudgetExhausted { rejections: total, minpoi: config.minpoi });
        }
    }
}

fn gaussian_rows<T: Scalar>(rng: &mut impl Rng, rows: usize, dim: usize) -> Vec<Vec<T>> {
    (0..rows).map(|_| (0..dim).map(|_| T::of(rng.sample::<f64, _>(StandardNormal))).collect()).collect()
}

fn condition_polytope<T: Scalar>(rows: &[Vec<T>], offsets: &[T], mirrored: bool) -> Polytope<T> {
    let dim = rows[0].len();
    let constraints = rows
        .iter()
        .zip(offsets)
        .map(|(m, &b)| {
            let h = Halfspace::new_unchecked(m.clone(), b);
            if mirrored {
                h.negated(T::zero())
            } else {
                h
            }
        })
        .collect();
    Polytope::from_parts_unchecked(dim, constraints)
}

fn consequent_shape<T: Scalar>(
    data: &Dataset<T>,
    members: &[usize],
    condition: Polytope<T>,
    directions: &[Vec<T>],
    config: &FitConfig,
) -> Result<BaseShape<T>> {
    let dim = data.dim();
    let mut constraints = Vec::with_capacity(2 * directions.len());
    let mut projections = Vec::with_capacity(members.len());
    for m in directions {
        projections.clear();
        projections.extend(members.iter().map(|&p| dot(m, data.row(p))));
        let (lower, upper) = consequent_range(&mut projections, config.quantile, config.extend)?;
        constraints.push(Halfspace::new_unchecked(m.clone(), upper));
        constraints.push(Halfspace::new_unchecked(m.iter().map(|&v| -v).collect(), -lower));
    }
    BaseShape::new(condition, Polytope::from_parts_unchecked(dim, constraints))
}

/// Upper consequent bound for one direction: the `1 - quantile` empirical
/// quantile of `projections` widened by `extend / 2` of the trimmed range.
pub fn compute_consequent_bound<T: Scalar>(projections: &[T], quantile: f64, extend: f64) -> Result<T> {
    let mut buf = projections.to_vec();
    consequent_range(&mut buf, quantile, extend).map(|(_, hi)| hi)
}

/// Both sides of the widened consequent range. Reorders `projections`.
pub fn consequent_range<T: Scalar>(projections: &mut [T], quantile: f64, extend: f64) -> Result<(T, T)> {
    if projections.is_empty() {
        return Err(PolyraError::Empty("projection list"));
    }
    let (lo, hi) = if quantile > 0.0 {
        (interpolated_quantile(projections, quantile), interpolated_quantile(projections, 1.0 - quantile))
    } else {
        projections.iter().fold((T::infinity(), T::neg_infinity()), |(l, h), &v| (l.min(v), h.max(v)))
    };
    if extend == 0.0 {
        return Ok((lo, hi));
    }
    let pad = (hi - lo) * T::of(extend / 2.0);
    Ok((lo - pad, hi + pad))
}

/// Linear-interpolation quantile (the "type 7" estimator).
fn interpolated_quantile<T: Scalar>(values: &mut [T], p: f64) -> T {
    let n = values.len();
    let pos = p * (n - 1) as f64;
    let below = pos.floor() as usize;
    let frac = pos - below as f64;
    let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("finite projections");
    let (_, &mut low, rest) = values.select_nth_unstable_by(below, cmp);
    if frac == 0.0 || rest.is_empty() {
        return low;
    }
    let high = rest.iter().copied().fold(T::infinity(), T::min);
    low + (high - low) * T::of(frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sort-and-index quantile used as an independent reference.
    fn sorted_quantile(values: &[f64], p: f64) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = p * (v.len() - 1) as f64;
        let i = pos.floor() as usize;
        let j = (i + 1).min(v.len() - 1);
        v[i] + (v[j] - v[i]) * (pos - i as f64)
    }

    #[test]
    fn extend_widens_range_evenly() {
        let proj: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let hi = compute_consequent_bound(&proj, 0.0, 0.2).unwrap();
        assert!((hi - 1.1).abs() < 1e-12);
        let neg: Vec<f64> = proj.iter().map(|v| -v).collect();
        let mirrored = compute_consequent_bound(&neg, 0.0, 0.2).unwrap();
        assert!((-mirrored - (-0.1)).abs() < 1e-12);
    }

    #[test]
    fn no_trim_no_extend_is_exact_max() {
        let proj = [0.3, -2.0, 7.25, 1.0];
        assert_eq!(compute_consequent_bound(&proj, 0.0, 0.0).unwrap(), 7.25);
    }

    #[test]
    fn quantile_matches_sort_and_index_oracle() {
        let proj: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let expected = sorted_quantile(&proj, 0.975);
        assert!((expected - 0.975).abs() < 1e-12);
        let got = compute_consequent_bound(&proj, 0.025, 0.0).unwrap();
        assert!((got - expected).abs() < 1e-12);

        let scrambled = [5.0, -1.0, 3.5, 2.0, 9.0, 0.0, 4.4];
        for q in [0.01, 0.1, 0.25, 0.4] {
            let got = compute_consequent_bound(&scrambled, q, 0.0).unwrap();
            assert!((got - sorted_quantile(&scrambled, 1.0 - q)).abs() < 1e-12, "q = {q}");
        }
    }

    #[test]
    fn empty_projections_error() {
        assert!(compute_consequent_bound::<f64>(&[], 0.0, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::default().validate().is_ok());
        for c in [
            FitConfig { adim: 0, ..Default::default() },
            FitConfig { quantile: 0.5, ..Default::default() },
            FitConfig { subsample: 1.0, ..Default::default() },
            FitConfig { extend: -0.1, ..Default::default() },
            FitConfig { n_models: 0, ..Default::default() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert_eq!(FitConfig { subsample: 0.5, ..Default::default() }.subset_size(5), 3);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::<f64>::new::<Vec<f64>>(&[]).is_err());
        assert!(Dataset::new(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(Dataset::new(&[vec![f64::NAN]]).is_err());
        let d = Dataset::new(&[vec![1.0, 2.0], vec![-1.0, 4.0]]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.bounds().lo(), &[-1.0, 2.0]);
    }

    #[test]
    fn single_point_fit_contains_it() {
        let d = Dataset::new(&[vec![0.3, -0.7]]).unwrap();
        let s = fit(&d, &FitConfig { n_models: 10, ..Default::default() }).unwrap();
        assert!(s.contains(&[0.3, -0.7]).unwrap());
        assert!(s.len() >= 10 && s.len() <= 20);
    }

    #[test]
    fn minpoi_errors() {
        let d = Dataset::new(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let too_big = FitConfig { minpoi: 4, n_models: 5, ..Default::default() };
        assert!(matches!(fit(&d, &too_big), Err(PolyraError::MinpoiTooLarge { .. })));

        // every point in every condition is impossible for a non-trivial cut
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64, (i * 7 % 11) as f64]).collect();
        let d = Dataset::new(&pts).unwrap();
        let cfg = FitConfig { minpoi: 50, n_models: 5, max_reject_factor: 2, ..Default::default() };
        match fit(&d, &cfg) {
            Err(PolyraError::RejectionBudgetExhausted { minpoi, .. }) => assert_eq!(minpoi, 50),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn fit_is_deterministic_and_f32_works() {
        let pts: Vec<Vec<f32>> = (0..200).map(|i| vec![(i as f32 * 0.37).sin(), (i as f32 * 0.11).cos()]).collect();
        let d = Dataset::new(&pts).unwrap();
        let cfg = FitConfig { n_models: 50, seed: 9, ..Default::default() };
        let a = fit(&d, &cfg).unwrap();
        let b = fit(&d, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(pts.iter().all(|p| a.contains(p).unwrap()));
    }
}
