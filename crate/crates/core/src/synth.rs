//! Seeded synthetic datasets.
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use crate::model::Dataset;

/// `m` examples in `p` dimensions: `y` is a fair coin and `x ~ N(y·μ, I)` with
/// `μ_k = separation / 2^k`, so later features carry less signal.
///
/// Identical `(m, p, separation, seed)` give identical datasets.
pub fn two_gaussians(m: usize, p: usize, separation: f64, seed: u64) -> Dataset {
    assert!(m >= 1 && p >= 1, "need at least one example and one feature");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let row = (0..p)
            .map(|k| y * separation / f64::powi(2.0, k as i32) + noise.sample(&mut rng))
            .collect();
        rows.push(row);
        labels.push(y);
    }
    Dataset::new(rows, labels).expect("finite features and ±1 labels")
}

/// Two-Gaussian data with a fraction `flip` of labels inverted.
pub fn noisy_two_gaussians(m: usize, p: usize, separation: f64, flip: f64, seed: u64) -> Dataset {
    let clean = two_gaussians(m, p, separation, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let rows = (0..m).map(|i| clean.row(i).to_vec()).collect();
    let labels = clean
        .labels()
        .iter()
        .map(|&y| if rng.random_bool(flip) { -y } else { y })
        .collect();
    Dataset::new(rows, labels).expect("finite features and ±1 labels")
}

/// One feature, linearly separable at 0 with a gap of `2·gap`.
pub fn separable_line(m: usize, gap: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for i in 0..m {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        rows.push(vec![y * (gap + rng.random::<f64>())]);
        labels.push(y);
    }
    Dataset::new(rows, labels).expect("finite features and ±1 labels")
}
