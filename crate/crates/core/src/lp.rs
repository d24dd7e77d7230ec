//! Linear feasibility oracle on top of `microlp`.
//!
//! Every query intersects the constraints with a bounding box so the
//! programs are always bounded.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{PolyraError, Result};
use crate::geometry::{BoundingBox, Halfspace};
use crate::scalar::Scalar;

/// Largest ball inside a polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevBall<T> {
    pub center: Vec<T>,
    pub radius: T,
}

/// Whether `constraints` and `bbox` have a common point.
pub fn is_feasible<'a, T, I>(constraints: I, bbox: &BoundingBox<T>) -> Result<bool>
where
    T: Scalar,
    I: IntoIterator<Item = &'a Halfspace<T>>,
{
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = bbox.lo().iter().zip(bbox.hi()).map(|(&l, &h)| problem.add_var(0.0, (l.as_f64(), h.as_f64()))).collect();
    for h in constraints {
        let terms: Vec<_> = vars.iter().zip(h.normal()).map(|(&v, &c)| (v, c.as_f64())).collect();
        if terms.iter().all(|&(_, c)| c == 0.0) {
            if h.bound() < T::zero() {
                return Ok(false);
            }
            continue;
        }
        problem.add_constraint(terms.as_slice(), ComparisonOp::Le, h.bound().as_f64());
    }
    match problem.solve() {
        Ok(_) => Ok(true),
        Err(microlp::Error::Infeasible) => Ok(false),
        Err(e) => Err(PolyraError::Lp(e.to_string())),
    }
}

/// Chebyshev center of the polytope intersected with the box, or `None`
/// when the intersection is empty.
pub fn chebyshev_ball<T: Scalar>(constraints: &[Halfspace<T>], bbox: &BoundingBox<T>) -> Result<Option<ChebyshevBall<T>>> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = bbox.lo().iter().zip(bbox.hi()).map(|(&l, &h)| problem.add_var(0.0, (l.as_f64(), h.as_f64()))).collect();
    let radius = problem.add_var(1.0, (0.0, f64::INFINITY));
    for h in constraints {
        let norm = h.normal().iter().map(|c| c.as_f64().powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            if h.bound() < T::zero() {
                return Ok(None);
            }
            continue;
        }
        let mut terms: Vec<_> = vars.iter().zip(h.normal()).map(|(&v, &c)| (v, c.as_f64())).collect();
        terms.push((radius, norm));
        problem.add_constraint(terms.as_slice(), ComparisonOp::Le, h.bound().as_f64());
    }
    for (k, &v) in vars.iter().enumerate() {
        problem.add_constraint([(v, 1.0), (radius, 1.0)].as_slice(), ComparisonOp::Le, bbox.hi()[k].as_f64());
        problem.add_constraint([(v, 1.0), (radius, -1.0)].as_slice(), ComparisonOp::Ge, bbox.lo()[k].as_f64());
    }
    match problem.solve() {
        Ok(outcome) => {
            let sol = outcome.solution().ok_or_else(|| PolyraError::Lp("no solution returned".into()))?;
            Ok(Some(ChebyshevBall {
                center: vars.iter().map(|&v| T::of(sol.var_value(v))).collect(),
                radius: T::of(sol.var_value(radius)),
            }))
        }
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(microlp::Error::Unbounded) => Err(PolyraError::UnboundedPolytope),
        Err(e) => Err(PolyraError::Lp(e.to_string())),
    }
}
