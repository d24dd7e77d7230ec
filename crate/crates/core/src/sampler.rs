//! Random points in boxes and convex polytopes.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{BoundingBox, Halfspace};
use crate::scalar::{dot, Scalar};

pub fn uniform_in_box<T: Scalar>(rng: &mut impl Rng, bbox: &BoundingBox<T>) -> Vec<T> {
    bbox.lo()
        .iter()
        .zip(bbox.hi())
        .map(|(&l, &h)| {
            let u: f64 = rng.random();
            (l + (h - l) * T::of(u)).min(h)
        })
        .collect()
}

/// Uniformly distributed unit vector.
pub fn random_direction<T: Scalar>(rng: &mut impl Rng, dim: usize) -> Vec<T> {
    let mut d = vec![T::zero(); dim];
    fill_direction(rng, &mut d);
    d
}

fn fill_direction<T: Scalar>(rng: &mut impl Rng, d: &mut [T]) {
    loop {
        let mut norm = 0.0;
        for v in d.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            norm += g * g;
            *v = T::of(g);
        }
        let norm = norm.sqrt();
        if norm > 1e-12 {
            let inv = T::of(1.0 / norm);
            d.iter_mut().for_each(|v| *v = *v * inv);
            return;
        }
    }
}

/// Parameter range `[tmin, tmax]` of `x + t d` inside the convex region
/// given by `constraints` and `bbox`; `None` when `x` itself is outside.
pub fn convex_chord<T: Scalar>(constraints: &[Halfspace<T>], bbox: &BoundingBox<T>, x: &[T], d: &[T]) -> Option<(T, T)> {
    let tiny = T::of(1e-14);
    let (mut tmin, mut tmax) = (T::neg_infinity(), T::infinity());
    let mut clip = |c: T, r: T| -> bool {
        if c > tiny {
            tmax = tmax.min(r / c);
        } else if c < -tiny {
            tmin = tmin.max(r / c);
        } else if r < T::zero() {
            return false;
        }
        true
    };
    for h in constraints {
        if !clip(dot(h.normal(), d), h.bound() - dot(h.normal(), x)) {
            return None;
        }
    }
    for k in 0..x.len() {
        if !clip(d[k], bbox.hi()[k] - x[k]) || !clip(-d[k], x[k] - bbox.lo()[k]) {
            return None;
        }
    }
    (tmin <= tmax).then_some((tmin.min(T::zero()), tmax.max(T::zero())))
}

/// Hit-and-run walk inside a convex polytope intersected with a box.
///
/// `start` must satisfy every constraint. Emits `n` points after `burn_in`
/// discarded steps.
pub fn hit_and_run_convex<T: Scalar>(
    rng: &mut impl Rng,
    constraints: &[Halfspace<T>],
    bbox: &BoundingBox<T>,
    start: &[T],
    n: usize,
    burn_in: usize,
) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(n);
    walk_convex(rng, constraints, bbox, start, n, burn_in, |x| {
        out.push(x.to_vec());
        true
    });
    out
}

/// Like [`hit_and_run_convex`] but hands each emitted point to `visit`,
/// stopping early once it returns `false`.
pub fn walk_convex<T: Scalar>(
    rng: &mut impl Rng,
    constraints: &[Halfspace<T>],
    bbox: &BoundingBox<T>,
    start: &[T],
    n: usize,
    burn_in: usize,
    mut visit: impl FnMut(&[T]) -> bool,
) {
    let dim = start.len();
    let mut x = start.to_vec();
    let mut d = vec![T::zero(); dim];
    let mut next = vec![T::zero(); dim];
    for step in 0..burn_in + n {
        fill_direction(rng, &mut d);
        if let Some((lo, hi)) = convex_chord(constraints, bbox, &x, &d) {
            let u: f64 = rng.random();
            let t = lo + (hi - lo) * T::of(u);
            for k in 0..dim {
                next[k] = x[k] + t * d[k];
            }
            if constraints.iter().all(|h| h.contains_unchecked(&next)) && bbox.contains(&next) {
                std::mem::swap(&mut x, &mut next);
            }
        }
        if step >= burn_in && !visit(&x) {
            return;
        }
    }
}
