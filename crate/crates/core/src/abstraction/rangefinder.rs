//! Exact one-dimensional abstraction and coordinate substitution.

use crate::error::{PolyraError, Result};
use crate::geometry::{check_dim, Halfspace};
use crate::interval::IntervalSet;
use crate::logic::{simplify, LogicNode};
use crate::scalar::{dot, Scalar};

/// Coefficients with magnitude at or below this are treated as zero when a
/// constraint is restricted to fewer coordinates.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;

/// Exact set of `x` satisfying a tree whose leaves are one-dimensional.
///
/// `Not` nodes are simplified away first, so boundaries of negated leaves
/// follow the epsilon convention of [`simplify`].
pub fn rangefinder<T: Scalar>(tree: &LogicNode<T>) -> Result<IntervalSet<T>> {
    rangefinder_with(tree, &|h: &Halfspace<T>| {
        if h.dim() != 1 {
            return Err(PolyraError::NotOneDimensional(h.dim()));
        }
        Ok(half_line(h.normal()[0], h.bound(), T::zero()))
    })
}

/// Interval algebra over a tree, with `leaf` mapping each halfspace to the
/// set it allows along some line.
pub fn rangefinder_with<T, F>(tree: &LogicNode<T>, leaf: &F) -> Result<IntervalSet<T>>
where
    T: Scalar,
    F: Fn(&Halfspace<T>) -> Result<IntervalSet<T>>,
{
    Ok(match tree {
        LogicNode::True => IntervalSet::full(),
        LogicNode::False => IntervalSet::empty(),
        LogicNode::Leaf(h) => leaf(h)?,
        LogicNode::Not(_) => rangefinder_with(&simplify(tree), leaf)?,
        LogicNode::And(cs) => {
            let mut acc = IntervalSet::full();
            for c in cs {
                acc = acc.intersect(&rangefinder_with(c, leaf)?);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        LogicNode::Or(cs) => {
            let mut parts = Vec::new();
            for c in cs {
                parts.extend_from_slice(rangefinder_with(c, leaf)?.intervals());
            }
            IntervalSet::from_intervals(parts)
        }
    })
}

/// `{t : coef * t <= rhs}`; coefficients within `tol` of zero give the
/// whole line or nothing.
pub fn half_line<T: Scalar>(coef: T, rhs: T, tol: T) -> IntervalSet<T> {
    if coef.abs() <= tol {
        if rhs >= T::zero() {
            IntervalSet::full()
        } else {
            IntervalSet::empty()
        }
    } else if coef > T::zero() {
        IntervalSet::at_most(rhs / coef)
    } else {
        IntervalSet::at_least(rhs / coef)
    }
}

/// Fixes some coordinates of every leaf.
///
/// `fixed` pairs a coordinate index with its value; the remaining
/// coordinates keep their original order. Leaves left without a
/// non-negligible coefficient become constants. The result is simplified.
pub fn substitute<T: Scalar>(tree: &LogicNode<T>, dim: usize, fixed: &[(usize, T)]) -> Result<LogicNode<T>> {
    let mut value = vec![None; dim];
    for &(index, v) in fixed {
        let slot = value.get_mut(index).ok_or(PolyraError::InvalidCoordinate { index, dim })?;
        *slot = Some(v);
    }
    let free: Vec<usize> = (0..dim).filter(|&k| value[k].is_none()).collect();
    if free.is_empty() {
        return Err(PolyraError::InvalidConfig("substitution must leave at least one coordinate free".into()));
    }
    let tol = T::of(COEFFICIENT_TOLERANCE);
    let tree = simplify(tree);
    let out = map_leaves(&tree, &mut |h: &Halfspace<T>| {
        check_dim(dim, h.dim())?;
        let m = h.normal();
        let shift = value.iter().zip(m).filter_map(|(v, &c)| v.map(|v| c * v)).fold(T::zero(), |a, b| a + b);
        let rhs = h.bound() - shift;
        let coefs: Vec<T> = free.iter().map(|&k| m[k]).collect();
        Ok(if coefs.iter().all(|c| c.abs() <= tol) {
            if rhs >= T::zero() {
                LogicNode::True
            } else {
                LogicNode::False
            }
        } else {
            LogicNode::Leaf(Halfspace::new_unchecked(coefs, rhs))
        })
    })?;
    Ok(simplify(&out))
}

/// Restricts every leaf to the line `origin + t * direction`.
pub fn restrict_to_line<T: Scalar>(tree: &LogicNode<T>, origin: &[T], direction: &[T]) -> Result<LogicNode<T>> {
    check_dim(origin.len(), direction.len())?;
    let tol = T::of(COEFFICIENT_TOLERANCE);
    let out = map_leaves(tree, &mut |h: &Halfspace<T>| {
        check_dim(origin.len(), h.dim())?;
        let c = dot(h.normal(), direction);
        let rhs = h.bound() - dot(h.normal(), origin);
        Ok(if c.abs() <= tol {
            if rhs >= T::zero() {
                LogicNode::True
            } else {
                LogicNode::False
            }
        } else {
            LogicNode::Leaf(Halfspace::new_unchecked(vec![c], rhs))
        })
    })?;
    Ok(simplify(&out))
}

fn map_leaves<T, F>(tree: &LogicNode<T>, f: &mut F) -> Result<LogicNode<T>>
where
    T: Scalar,
    F: FnMut(&Halfspace<T>) -> Result<LogicNode<T>>,
{
    Ok(match tree {
        LogicNode::True => LogicNode::True,
        LogicNode::False => LogicNode::False,
        LogicNode::Leaf(h) => f(h)?,
        LogicNode::Not(c) => LogicNode::Not(Box::new(map_leaves(c, f)?)),
        LogicNode::And(cs) => LogicNode::And(cs.iter().map(|c| map_leaves(c, f)).collect::<Result<_>>()?),
        LogicNode::Or(cs) => LogicNode::Or(cs.iter().map(|c| map_leaves(c, f)).collect::<Result<_>>()?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn le(c: f64, b: f64) -> LogicNode<f64> {
        LogicNode::Leaf(Halfspace::new(vec![c], b).unwrap())
    }

    /// `lo <= x <= hi`
    fn between(lo: f64, hi: f64) -> LogicNode<f64> {
        LogicNode::And(vec![le(-1.0, -lo), le(1.0, hi)])
    }

    fn set(v: &[(f64, f64)]) -> IntervalSet<f64> {
        IntervalSet::from_intervals(v.iter().map(|&(a, b)| Interval::new(a, b)).collect())
    }

    #[test]
    fn overlapping_alternatives_merge() {
        let t = LogicNode::Or(vec![between(0.0, 1.0), between(0.5, 2.0)]);
        assert_eq!(rangefinder(&t).unwrap(), set(&[(0.0, 2.0)]));
    }

    #[test]
    fn same_direction_bounds_take_the_tighter() {
        let t = LogicNode::And(vec![le(1.0, 1.0), le(2.0, 1.0)]);
        assert_eq!(rangefinder(&t).unwrap(), IntervalSet::at_most(0.5));
    }

    #[test]
    fn disjoint_components_survive() {
        let t = LogicNode::Or(vec![between(0.0, 1.0), between(3.0, 4.0)]);
        assert_eq!(rangefinder(&t).unwrap(), set(&[(0.0, 1.0), (3.0, 4.0)]));
    }

    #[test]
    fn rejects_higher_dimensional_leaves() {
        let t = LogicNode::Leaf(Halfspace::new(vec![1.0, 1.0], 0.0).unwrap());
        assert_eq!(rangefinder(&t).unwrap_err(), PolyraError::NotOneDimensional(2));
    }

    #[test]
    fn substitution_arithmetic() {
        let t = LogicNode::Leaf(Halfspace::new(vec![1.0, 1.0], 3.0).unwrap());
        let s = substitute(&t, 2, &[(1, 1.0)]).unwrap();
        assert_eq!(s, le(1.0, 2.0));

        let t = LogicNode::Leaf(Halfspace::new(vec![0.0, 1.0], 5.0).unwrap());
        assert_eq!(substitute(&t, 2, &[(1, 1.0)]).unwrap(), LogicNode::True);
        assert_eq!(substitute(&t, 2, &[(1, 6.0)]).unwrap(), LogicNode::False);

        assert!(matches!(substitute(&t, 2, &[(2, 1.0)]), Err(PolyraError::InvalidCoordinate { index: 2, dim: 2 })));
        assert!(substitute(&t, 2, &[(0, 1.0), (1, 1.0)]).is_err());
    }

    #[test]
    fn line_restriction() {
        let t = LogicNode::And(vec![
            LogicNode::Leaf(Halfspace::new(vec![1.0, 0.0], 1.0).unwrap()),
            LogicNode::Leaf(Halfspace::new(vec![-1.0, 0.0], 0.0).unwrap()),
            LogicNode::Leaf(Halfspace::new(vec![0.0, 1.0], 1.0).unwrap()),
        ]);
        let line = restrict_to_line(&t, &[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert_eq!(rangefinder(&line).unwrap(), set(&[(-0.5, 0.5)]));
    }
}
