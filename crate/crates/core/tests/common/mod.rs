#![allow(dead_code)]

use std::f64::consts::PI;

use polyra::Dataset64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect()
}

/// Rejection samples from `|x - 0.5| + |y - 0.5| <= 0.25`.
pub fn diamond(seed: u64, n: usize) -> Dataset64 {
    let mut rng = rng(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let x: f64 = rng.random_range(0.25..0.75);
        let y: f64 = rng.random_range(0.25..0.75);
        if (x - 0.5).abs() + (y - 0.5).abs() <= 0.25 {
            pts.push(vec![x, y]);
        }
    }
    Dataset64::new(&pts).unwrap()
}

pub const THREE_SQUARES: [[f64; 4]; 3] = [[0.2, 0.4, 0.2, 0.4], [0.6, 0.8, 0.2, 0.4], [0.4, 0.6, 0.6, 0.8]];

pub fn box_truth(b: &[f64; 4]) -> String {
    format!("box:{},{},{},{}", b[0], b[1], b[2], b[3])
}

/// Points spread evenly over the boxes `[x0, x1, y0, y1]`.
pub fn boxes(seed: u64, n: usize, boxes: &[[f64; 4]]) -> Dataset64 {
    let mut rng = rng(seed);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let b = boxes[i % boxes.len()];
            vec![rng.random_range(b[0]..b[1]), rng.random_range(b[2]..b[3])]
        })
        .collect();
    Dataset64::new(&pts).unwrap()
}

/// `sin(x)` on one period with uniform noise of amplitude `noise`.
pub fn noisy_sine(seed: u64, n: usize, noise: f64) -> Dataset64 {
    let mut rng = rng(seed);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let x: f64 = rng.random_range(0.0..2.0 * PI);
            vec![x, x.sin() + rng.random_range(-noise..noise)]
        })
        .collect();
    Dataset64::new(&pts).unwrap()
}

/// Two interleaved half circles with Gaussian jitter.
pub fn two_moons(rng: &mut ChaCha8Rng, n: usize, noise: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let t: f64 = rng.random_range(0.0..PI);
            let (x, y) = if i % 2 == 0 { (t.cos(), t.sin()) } else { (1.0 - t.cos(), 0.5 - t.sin()) };
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            vec![x + noise * nx, y + noise * ny]
        })
        .collect()
}

/// Row-major `side x side` grid over `[lo, hi]` including the edges.
pub fn grid2(lo: &[f64], hi: &[f64], side: usize) -> Vec<[f64; 2]> {
    let at = |k: usize, i: usize| lo[k] + (hi[k] - lo[k]) * i as f64 / (side - 1) as f64;
    (0..side).flat_map(|i| (0..side).map(move |j| [at(0, i), at(1, j)])).collect()
}

/// Area under the ROC curve by comparing every positive with every negative.
pub fn pairwise_auc(positive: &[f64], negative: &[f64]) -> f64 {
    let mut wins = 0.0;
    for p in positive {
        for n in negative {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (positive.len() * negative.len()) as f64
}
