//! Halfspaces, polytopes, conditional base shapes and swarms.
//!
//! All inequalities are non-strict: a point on a hyperplane is inside its
//! halfspace. Strictness only appears when a constraint is negated, which is
//! handled by the logic module through an explicit epsilon shift.

use serde::{Deserialize, Serialize};

use crate::error::{PolyraError, Result};
use crate::scalar::{dot, Scalar};
use crate::training::FitConfig;

/// A single linear constraint `normal · x <= bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace<T> {
    normal: Vec<T>,
    bound: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(normal: Vec<T>, bound: T) -> Result<Self> {
        if normal.is_empty() {
            return Err(PolyraError::ZeroDimension);
        }
        if !bound.is_finite() || normal.iter().any(|v| !v.is_finite()) {
            return Err(PolyraError::NonFinite("halfspace"));
        }
        Ok(Self { normal, bound })
    }

    /// Builds a halfspace without validating finiteness.
    pub(crate) fn new_unchecked(normal: Vec<T>, bound: T) -> Self {
        Self { normal, bound }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &[T] {
        &self.normal
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    /// `bound - normal · x`; non-negative exactly when `x` is inside.
    pub fn margin(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x.len())?;
        Ok(self.bound - dot(&self.normal, x))
    }

    pub fn contains(&self, x: &[T]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_unchecked(x))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[T]) -> bool {
        dot(&self.normal, x) <= self.bound
    }

    /// The closed complement shifted inward by `eps`: `-normal · x <= -bound - eps`.
    pub fn negated(&self, eps: T) -> Self {
        Self { normal: self.normal.iter().map(|&v| -v).collect(), bound: -self.bound - eps }
    }
}

/// Conjunction of halfspaces. No constraints means all of space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRepr<T>", into = "PolytopeRepr<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Polytope<T> {
    dim: usize,
    constraints: Vec<Halfspace<T>>,
}

impl<T: Scalar> Polytope<T> {
    pub fn new(dim: usize, constraints: Vec<Halfspace<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(PolyraError::ZeroDimension);
        }
        for h in &constraints {
            check_dim(dim, h.dim())?;
        }
        Ok(Self { dim, constraints })
    }

    /// All of `R^dim`.
    pub fn universal(dim: usize) -> Self {
        Self { dim, constraints: Vec::new() }
    }

    /// Builds a polytope from rows of a constraint matrix and their bounds.
    pub fn from_rows(dim: usize, rows: Vec<Vec<T>>, bounds: Vec<T>) -> Result<Self> {
        if rows.len() != bounds.len() {
            return Err(PolyraError::DimensionMismatch { expected: rows.len(), found: bounds.len() });
        }
        let constraints = rows.into_iter().zip(bounds).map(|(r, b)| Halfspace::new(r, b)).collect::<Result<Vec<_>>>()?;
        Self::new(dim, constraints)
    }

    /// Axis-aligned box `lo <= x <= hi`.
    pub fn from_box(lo: &[T], hi: &[T]) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        let dim = lo.len();
        let mut constraints = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            let mut e = vec![T::zero(); dim];
            e[k] = T::one();
            constraints.push(Halfspace::new(e.clone(), hi[k])?);
            e[k] = -T::one();
            constraints.push(Halfspace::new(e, -lo[k])?);
        }
        Self::new(dim, constraints)
    }

    pub(crate) fn from_parts_unchecked(dim: usize, constraints: Vec<Halfspace<T>>) -> Self {
        Self { dim, constraints }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Halfspace<T>] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn contains(&self, x: &[T]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_unchecked(x))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[T]) -> bool {
        self.constraints.iter().all(|h| h.contains_unchecked(x))
    }

    /// Intersection: concatenation of the two constraint lists.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        Ok(Self { dim: self.dim, constraints })
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr<T> {
    dim: usize,
    rows: Vec<Vec<T>>,
    bounds: Vec<T>,
}

impl<T: Scalar> From<Polytope<T>> for PolytopeRepr<T> {
    fn from(p: Polytope<T>) -> Self {
        let (rows, bounds) = p.constraints.into_iter().map(|h| (h.normal, h.bound)).unzip();
        Self { dim: p.dim, rows, bounds }
    }
}

impl<T: Scalar> TryFrom<PolytopeRepr<T>> for Polytope<T> {
    type Error = PolyraError;

    fn try_from(r: PolytopeRepr<T>) -> Result<Self> {
        Polytope::from_rows(r.dim, r.rows, r.bounds)
    }
}

/// The implication `x in condition => x in consequent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct BaseShape<T> {
    condition: Polytope<T>,
    consequent: Polytope<T>,
}

impl<T: Scalar> BaseShape<T> {
    pub fn new(condition: Polytope<T>, consequent: Polytope<T>) -> Result<Self> {
        check_dim(condition.dim(), consequent.dim())?;
        Ok(Self { condition, consequent })
    }

    pub fn dim(&self) -> usize {
        self.condition.dim()
    }

    pub fn condition(&self) -> &Polytope<T> {
        &self.condition
    }

    pub fn consequent(&self) -> &Polytope<T> {
        &self.consequent
    }

    /// `!(x in A) || (x in B)`.
    pub fn eval(&self, x: &[T]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[T]) -> bool {
        !self.condition.contains_unchecked(x) || self.consequent.contains_unchecked(x)
    }
}

/// Per-feature `(min, max)` box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox<T> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(PolyraError::ZeroDimension);
        }
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(PolyraError::NonFinite("bounding box"));
        }
        if let Some(k) = (0..lo.len()).find(|&k| lo[k] > hi[k]) {
            return Err(PolyraError::DegenerateBox(k));
        }
        Ok(Self { lo, hi })
    }

    /// Tightest box around `points`.
    pub fn from_points<P: AsRef<[T]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(PolyraError::Empty("point set"))?.as_ref();
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in points {
            let p = p.as_ref();
            check_dim(lo.len(), p.len())?;
            for k in 0..p.len() {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    /// Widens every side by `fraction` of the extent along that feature.
    /// Zero-width features are widened by `fraction` in absolute units.
    pub fn widened(&self, fraction: f64) -> Self {
        let f = T::of(fraction);
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| {
                let w = if h > l { (h - l) * f } else { f };
                (l - w, h + w)
            })
            .unzip();
        Self { lo, hi }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let lo = self.lo.iter().zip(&other.lo).map(|(&a, &b)| a.min(b)).collect();
        let hi = self.hi.iter().zip(&other.hi).map(|(&a, &b)| a.max(b)).collect();
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(k, &v)| v >= self.lo[k] && v <= self.hi[k])
    }

    pub fn volume(&self) -> T {
        self.lo.iter().zip(&self.hi).fold(T::one(), |acc, (&l, &h)| acc * (h - l))
    }

    /// Errors when any side has zero width.
    pub fn ensure_non_degenerate(&self) -> Result<()> {
        match (0..self.dim()).find(|&k| self.hi[k] <= self.lo[k]) {
            Some(k) => Err(PolyraError::DegenerateBox(k)),
            None => Ok(()),
        }
    }

    pub fn to_polytope(&self) -> Polytope<T> {
        Polytope::from_box(&self.lo, &self.hi).expect("box is validated on construction")
    }
}

/// Conjunction of base shapes: a point is a member when every base shape
/// accepts it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Swarm<T> {
    dim: usize,
    base_shapes: Vec<BaseShape<T>>,
    data_bounds: BoundingBox<T>,
    #[serde(default)]
    fit_config: Option<FitConfig>,
    /// A known member, used as the default starting point for generation.
    #[serde(default)]
    start_point: Option<Vec<T>>,
}

impl<T: Scalar> Swarm<T> {
    pub fn new(base_shapes: Vec<BaseShape<T>>, data_bounds: BoundingBox<T>) -> Result<Self> {
        let dim = data_bounds.dim();
        for f in &base_shapes {
            check_dim(dim, f.dim())?;
        }
        Ok(Self { dim, base_shapes, data_bounds, fit_config: None, start_point: None })
    }

    pub fn with_fit_config(mut self, config: FitConfig) -> Self {
        self.fit_config = Some(config);
        self
    }

    pub fn with_start_point(mut self, point: Vec<T>) -> Result<Self> {
        check_dim(self.dim, point.len())?;
        self.start_point = Some(point);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_shapes(&self) -> &[BaseShape<T>] {
        &self.base_shapes
    }

    pub fn len(&self) -> usize {
        self.base_shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_shapes.is_empty()
    }

    pub fn data_bounds(&self) -> &BoundingBox<T> {
        &self.data_bounds
    }

    pub fn fit_config(&self) -> Option<&FitConfig> {
        self.fit_config.as_ref()
    }

    pub fn start_point(&self) -> Option<&[T]> {
        self.start_point.as_deref()
    }

    pub fn contains(&self, x: &[T]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_unchecked(x))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[T]) -> bool {
        self.base_shapes.iter().all(|f| f.eval_unchecked(x))
    }

    /// Appends a base shape. Can only remove points from the shape.
    pub fn push(&mut self, shape: BaseShape<T>) -> Result<()> {
        check_dim(self.dim, shape.dim())?;
        self.base_shapes.push(shape);
        Ok(())
    }

    /// Conjunction of two swarms.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut base_shapes = Vec::with_capacity(self.len() + other.len());
        base_shapes.extend_from_slice(&self.base_shapes);
        base_shapes.extend_from_slice(&other.base_shapes);
        let fit_config = match (&self.fit_config, &other.fit_config) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        };
        Ok(Self {
            dim: self.dim,
            base_shapes,
            data_bounds: self.data_bounds.union(&other.data_bounds)?,
            fit_config,
            start_point: self.start_point.clone().or_else(|| other.start_point.clone()),
        })
    }
}

#[inline]
pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(PolyraError::DimensionMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polytope<f64> {
        Polytope::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    fn half(normal: Vec<f64>, b: f64) -> Halfspace<f64> {
        Halfspace::new(normal, b).unwrap()
    }

    #[test]
    fn polytope_membership() {
        let sq = unit_square();
        assert!(sq.contains(&[0.5, 0.5]).unwrap());
        assert!(!sq.contains(&[2.0, 0.0]).unwrap());
        assert!(sq.contains(&[1.0, 0.0]).unwrap(), "boundary counts as inside");
        assert!(Polytope::<f64>::universal(3).contains(&[1e9, -1e9, 0.0]).unwrap());
        assert!(matches!(sq.contains(&[0.5]), Err(PolyraError::DimensionMismatch { .. })));
    }

    #[test]
    fn halfspace_rejects_bad_input() {
        assert!(Halfspace::new(vec![f64::NAN], 0.0).is_err());
        assert!(Halfspace::new(vec![1.0], f64::INFINITY).is_err());
        assert!(Halfspace::<f64>::new(vec![], 0.0).is_err());
        assert!(Polytope::new(2, vec![half(vec![1.0], 0.0)]).is_err());
    }

    #[test]
    fn base_shape_implication() {
        let a = Polytope::new(2, vec![half(vec![1.0, 0.0], 0.5)]).unwrap();
        let b = Polytope::new(2, vec![half(vec![0.0, 1.0], 0.5)]).unwrap();
        let f = BaseShape::new(a, b).unwrap();
        assert!(f.eval(&[0.9, 0.9]).unwrap(), "outside A");
        assert!(f.eval(&[0.1, 0.1]).unwrap(), "inside A and B");
        assert!(!f.eval(&[0.1, 0.9]).unwrap(), "inside A, outside B");
    }

    fn shape_excluding_right_half() -> BaseShape<f64> {
        // x >= 0.5 => x <= 0 (impossible), so the right half is removed
        let a = Polytope::new(2, vec![half(vec![-1.0, 0.0], -0.5)]).unwrap();
        let b = Polytope::new(2, vec![half(vec![1.0, 0.0], 0.0)]).unwrap();
        BaseShape::new(a, b).unwrap()
    }

    #[test]
    fn swarm_membership_and_empty_swarm() {
        let bounds = BoundingBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let empty = Swarm::new(vec![], bounds.clone()).unwrap();
        assert!(empty.contains(&[123.0, -5.0]).unwrap());

        let always = BaseShape::new(Polytope::universal(2), Polytope::universal(2)).unwrap();
        let s = Swarm::new(vec![always.clone(), always.clone()], bounds.clone()).unwrap();
        assert!(s.contains(&[0.7, 0.2]).unwrap());

        let s = Swarm::new(vec![always.clone(), shape_excluding_right_half(), always], bounds).unwrap();
        assert!(!s.contains(&[0.7, 0.2]).unwrap());
        assert!(s.contains(&[0.2, 0.2]).unwrap());
    }

    #[test]
    fn merge_is_conjunction_and_unions_bounds() {
        let b1 = BoundingBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let b2 = BoundingBox::new(vec![-1.0, 0.5], vec![0.5, 2.0]).unwrap();
        let s1 = Swarm::new(vec![], b1).unwrap();
        let s2 = Swarm::new(vec![shape_excluding_right_half()], b2).unwrap();
        let m = s1.merge(&s2).unwrap();
        assert_eq!(m.data_bounds().lo(), &[-1.0, 0.0]);
        assert_eq!(m.data_bounds().hi(), &[1.0, 2.0]);
        assert!(s1.contains(&[0.8, 0.1]).unwrap());
        assert!(!m.contains(&[0.8, 0.1]).unwrap());
        assert_eq!(m.len(), 1);

        let wrong = Swarm::new(vec![], BoundingBox::new(vec![0.0], vec![1.0]).unwrap()).unwrap();
        assert!(s1.merge(&wrong).is_err());
    }

    #[test]
    fn box_helpers() {
        let b: BoundingBox<f64> = BoundingBox::from_points(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        assert_eq!(b.lo(), &[0.0, -1.0]);
        assert_eq!(b.volume(), 4.0);
        let w = b.widened(0.1);
        assert!((w.lo()[0] + 0.2).abs() < 1e-12 && (w.hi()[1] - 1.2).abs() < 1e-12);
        assert!(BoundingBox::new(vec![1.0], vec![0.0]).is_err());
        let flat = BoundingBox::new(vec![1.0], vec![1.0]).unwrap();
        assert!(flat.ensure_non_degenerate().is_err());
    }

    #[test]
    fn polytope_json_uses_rows_and_bounds() {
        let json = serde_json::to_value(unit_square()).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 4);
        assert_eq!(json["bounds"][0], 1.0);
        let back: Polytope<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, unit_square());
    }
}
