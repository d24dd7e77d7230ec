//! Volumetric intersection over union, estimated by Monte Carlo.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PolyraError, Result};
use crate::geometry::BoundingBox;
use crate::rng::stream_rng;
use crate::sampler::uniform_in_box;
use crate::scalar::Scalar;

/// `|A and B| / |A or B|` over `n` uniform draws in `region`, which should
/// cover both shapes. Two shapes that miss every draw score 0.
pub fn viou<T, A, B>(a: A, b: B, region: &BoundingBox<T>, n: usize, seed: u64) -> Result<f64>
where
    T: Scalar,
    A: Fn(&[T]) -> bool,
    B: Fn(&[T]) -> bool,
{
    if n == 0 {
        return Err(PolyraError::InvalidConfig("sample count must be positive".into()));
    }
    region.ensure_non_degenerate()?;
    let mut rng = stream_rng(seed, 0);
    let (mut both, mut either) = (0usize, 0usize);
    for _ in 0..n {
        let x = uniform_in_box(&mut rng, region);
        let (ia, ib) = (a(&x), b(&x));
        both += (ia && ib) as usize;
        either += (ia || ib) as usize;
    }
    Ok(if either == 0 { 0.0 } else { both as f64 / either as f64 })
}

/// Reference shapes with known geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthShape {
    /// Axis-aligned box in any dimension.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `|x - cx| + |y - cy| <= r`
    Diamond {
        center: [f64; 2],
        radius: f64,
    },
    Disc {
        center: [f64; 2],
        radius: f64,
    },
    /// `inner <= |p - c| <= outer`
    Annulus {
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
}

impl TruthShape {
    pub fn dim(&self) -> usize {
        match self {
            Self::Box { lo, .. } => lo.len(),
            _ => 2,
        }
    }

    pub fn contains<T: Scalar>(&self, x: &[T]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let p: Vec<f64> = x.iter().map(|v| v.as_f64()).collect();
        match self {
            Self::Box { lo, hi } => p.iter().zip(lo.iter().zip(hi)).all(|(&v, (&l, &h))| l <= v && v <= h),
            Self::Diamond { center, radius } => (p[0] - center[0]).abs() + (p[1] - center[1]).abs() <= *radius,
            Self::Disc { center, radius } => (p[0] - center[0]).hypot(p[1] - center[1]) <= *radius,
            Self::Annulus { center, inner, outer } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                *inner <= r && r <= *outer
            }
        }
    }

    pub fn bounds<T: Scalar>(&self) -> Result<BoundingBox<T>> {
        let (lo, hi): (Vec<f64>, Vec<f64>) = match self {
            Self::Box { lo, hi } => (lo.clone(), hi.clone()),
            Self::Diamond { center, radius } | Self::Disc { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            Self::Annulus { center, outer, .. } => {
                (center.iter().map(|c| c - outer).collect(), center.iter().map(|c| c + outer).collect())
            }
        };
        BoundingBox::new(lo.into_iter().map(T::of).collect(), hi.into_iter().map(T::of).collect())
    }
}

/// Parses `box:lo0,hi0,lo1,hi1,...`, `diamond:cx,cy,r`, `disc:cx,cy,r` and
/// `annulus:cx,cy,inner,outer`.
impl FromStr for TruthShape {
    type Err = PolyraError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || PolyraError::InvalidConfig(format!("cannot parse shape {s:?}"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let v: Vec<f64> =
            args.split(',').map(|a| a.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        if v.iter().any(|a| !a.is_finite()) {
            return Err(bad());
        }
        let shape = match (kind.trim().to_ascii_lowercase().as_str(), v.len()) {
            ("box", n) if n >= 2 && n % 2 == 0 => {
                let (lo, hi): (Vec<f64>, Vec<f64>) = v.chunks(2).map(|c| (c[0], c[1])).unzip();
                if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                    return Err(bad());
                }
                Self::Box { lo, hi }
            }
            ("diamond", 3) => Self::Diamond { center: [v[0], v[1]], radius: v[2] },
            ("disc", 3) => Self::Disc { center: [v[0], v[1]], radius: v[2] },
            ("annulus", 4) if v[2] <= v[3] => Self::Annulus { center: [v[0], v[1]], inner: v[2], outer: v[3] },
            _ => return Err(bad()),
        };
        Ok(shape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_shapes() {
        assert_eq!("box:0,1,0,1".parse::<TruthShape>().unwrap(), TruthShape::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] });
        assert_eq!(
            "diamond:0.5,0.5,0.25".parse::<TruthShape>().unwrap(),
            TruthShape::Diamond { center: [0.5, 0.5], radius: 0.25 }
        );
        assert!("annulus:0,0,2,1".parse::<TruthShape>().is_err());
        assert!("box:0,1,0".parse::<TruthShape>().is_err());
        assert!("blob:1".parse::<TruthShape>().is_err());
    }

    #[test]
    fn membership() {
        let d: TruthShape = "diamond:0,0,1".parse().unwrap();
        assert!(d.contains(&[0.5, 0.5]) && !d.contains(&[0.6, 0.5]));
        let a: TruthShape = "annulus:0,0,1,2".parse().unwrap();
        assert!(a.contains(&[1.5f32, 0.0]) && !a.contains(&[0.5f32, 0.0]));
        assert!(!a.contains(&[1.5, 0.0, 0.0]));
    }
}
