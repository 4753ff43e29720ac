//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

/// Every assignment of coordinates to {0, cap, free} with at most `max_free`
/// free coordinates, as (zero, capped, free) index lists.
fn assignments(m: usize, max_free: usize) -> Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let total = 3usize.pow(m as u32);
    for code in 0..total {
        let (mut zero, mut capped, mut free) = (Vec::new(), Vec::new(), Vec::new());
        let mut c = code;
        for i in 0..m {
            match c % 3 {
                0 => zero.push(i),
                1 => capped.push(i),
                _ => free.push(i),
            }
            c /= 3;
        }
        if free.len() <= max_free {
            out.push((zero, capped, free));
        }
    }
    out
}

/// Extreme points of `{d ∈ [0, 1/ν]^m : Σd = 1}`: at most one coordinate is
/// strictly between its bounds.
pub fn extreme_points(m: usize, nu: f64) -> Vec<Vec<f64>> {
    let cap = 1.0 / nu;
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for (_, capped, free) in assignments(m, 1) {
        let rest = 1.0 - capped.len() as f64 * cap;
        let mut d = vec![0.0; m];
        for &i in &capped {
            d[i] = cap;
        }
        match free.as_slice() {
            [] if rest.abs() < 1e-12 => {}
            [f] if rest > 1e-12 && rest < cap - 1e-12 => d[*f] = rest,
            _ => continue,
        }
        if !pts.iter().any(|p| p.iter().zip(&d).all(|(a, b)| (a - b).abs() < 1e-12)) {
            pts.push(d);
        }
    }
    pts
}

/// `Σ d ln d + ln m` with `0 ln 0 = 0`.
pub fn rel_entropy(d: &[f64]) -> f64 {
    d.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>() + (d.len() as f64).ln()
}

/// `argmin_{d ∈ Δ_ν} dᵀθ + Δ(d)/η` by trying every capped subset: for each
/// subset the remaining mass is spread as a Gibbs distribution; among the
/// candidates inside the box the one with the smallest objective wins.
pub fn brute_projection(theta: &[f64], nu: f64, eta: f64) -> Vec<f64> {
    let m = theta.len();
    let cap = 1.0 / nu;
    let objective = |d: &[f64]| -> f64 {
        d.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() + rel_entropy(d) / eta
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << m) {
        let capped: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let rest = 1.0 - capped.len() as f64 * cap;
        if rest < -1e-12 {
            continue;
        }
        let free: Vec<usize> = (0..m).filter(|i| mask & (1 << i) == 0).collect();
        let mut d = vec![0.0; m];
        for &i in &capped {
            d[i] = cap;
        }
        if rest > 1e-12 {
            if free.is_empty() {
                continue;
            }
            let lo = free.iter().map(|&i| theta[i]).fold(f64::INFINITY, f64::min);
            let z: f64 = free.iter().map(|&i| (-eta * (theta[i] - lo)).exp()).sum();
            for &i in &free {
                d[i] = rest * (-eta * (theta[i] - lo)).exp() / z;
            }
        }
        if d.iter().any(|&v| v > cap * (1.0 + 1e-12)) {
            continue;
        }
        let f = objective(&d);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, d));
        }
    }
    best.expect("the uniform point is always a candidate").1
}

/// Solves the square system `M x = r` by Gaussian elimination with partial pivoting.
fn solve_dense(mut mat: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| mat[a][c].abs().total_cmp(&mat[b][c].abs()))?;
        if mat[p][c].abs() < 1e-11 {
            return None;
        }
        mat.swap(c, p);
        r.swap(c, p);
        for i in c + 1..n {
            let f = mat[i][c] / mat[c][c];
            if f != 0.0 {
                let (upper, lower) = mat.split_at_mut(i);
                for (v, p) in lower[0][c..].iter_mut().zip(&upper[c][c..]) {
                    *v -= f * p;
                }
                r[i] -= f * r[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|j| mat[c][j] * x[j]).sum();
        x[c] = (r[c] - s) / mat[c][c];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `min_{d ∈ Δ_ν} max_k (dᵀA)_k` by enumerating the vertices of the polytope
/// `{(d, γ) : d ∈ Δ_ν, (dᵀA)_k ≤ γ}`. With `f` coordinates strictly inside
/// their bounds, a vertex makes `f` edge constraints tight.
pub fn edge_min_by_enumeration(columns: &[Vec<f64>], nu: f64) -> f64 {
    let m = columns[0].len();
    let t = columns.len();
    let cap = 1.0 / nu;
    let mut best = f64::INFINITY;
    for (_, capped, free) in assignments(m, m.min(t)) {
        let f = free.len();
        let rest = 1.0 - capped.len() as f64 * cap;
        if rest < -1e-12 || (f == 0 && rest.abs() > 1e-12) {
            continue;
        }
        let base: Vec<f64> = columns
            .iter()
            .map(|c| capped.iter().map(|&i| cap * c[i]).sum())
            .collect();
        let mut d = vec![0.0; m];
        for &i in &capped {
            d[i] = cap;
        }
        if f == 0 {
            let gamma = base.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            best = best.min(gamma);
            continue;
        }
        for tight in combinations(t, f) {
            // unknowns: d_free (f of them), γ
            let mut mat = Vec::with_capacity(f + 1);
            let mut rhs = Vec::with_capacity(f + 1);
            let mut sum_row = vec![1.0; f];
            sum_row.push(0.0);
            mat.push(sum_row);
            rhs.push(rest);
            for &k in &tight {
                let mut row: Vec<f64> = free.iter().map(|&i| columns[k][i]).collect();
                row.push(-1.0);
                mat.push(row);
                rhs.push(-base[k]);
            }
            let Some(x) = solve_dense(mat, rhs) else { continue };
            if x[..f].iter().any(|&v| v < -1e-9 || v > cap + 1e-9) {
                continue;
            }
            for (j, &i) in free.iter().enumerate() {
                d[i] = x[j];
            }
            let gamma = x[f];
            let feasible = columns
                .iter()
                .all(|c| c.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() <= gamma + 1e-9);
            if feasible {
                best = best.min(gamma);
            }
            for &i in &free {
                d[i] = 0.0;
            }
        }
    }
    best
}

/// Deterministic ±1-ish gain columns from a seed, for LP fixtures.
pub fn random_columns(m: usize, t: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..t)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}
