//! Entropy-regularised problems over the capped simplex.
//!
//! [`capped_entropy_projection`] solves
//!
//! ```text
//! min_{d ∈ Δ_ν}  dᵀθ + (1/η) Δ(d),      Δ(d) = Σ d_i ln d_i + ln m
//! ```
//!
//! whose minimiser has the form `d_i = min(1/ν, exp(−ηθ_i)/Z)`. The capped
//! coordinates are the ones with the smallest `θ`, so after one sort the capped
//! set is a prefix and the search over its size is a linear scan using suffix
//! log-sum-exps. The same minimiser is the gradient of the smoothed conjugate
//! `f̃*(−θ)`, which is how the boosters obtain their distribution.
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{check_nu, CapParams, Distribution};
use crate::tolerance::CAP_RELATIVE;

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub d: Distribution,
    /// `dᵀθ + (1/η)Δ(d)` at the minimiser.
    pub objective: f64,
    /// Number of coordinates sitting at the cap `1/ν`.
    pub capped_count: usize,
}

fn check_finite(theta: &[f64]) -> Result<()> {
    match theta.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Input(format!("theta[{}] = {} is not finite", i, theta[i]))),
        None => Ok(()),
    }
}

/// Indices sorted by `(values[i], i)` ascending.
fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut ix: Vec<usize> = (0..values.len()).collect();
    ix.sort_by(|&i, &j| {
        values[i]
            .partial_cmp(&values[j])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    ix
}

/// `ln(e^a + e^b)` for `a ≥ b`.
fn log_add_ordered(a: f64, b: f64) -> f64 {
    a + (b - a).exp().ln_1p()
}

/// Minimises `dᵀθ + (1/η)Δ(d)` over the capped simplex in `O(m log m)`.
pub fn capped_entropy_projection(theta: &[f64], params: &CapParams) -> Result<ProjectionResult> {
    check_finite(theta)?;
    let m = theta.len();
    if m != params.m {
        return Err(Error::Structural(format!(
            "theta of length {} for m = {}",
            m, params.m
        )));
    }
    let nu = params.nu;
    let eta = params.eta;
    let cap = 1.0 / nu;
    let log_cap = -nu.ln();

    let order = ascending_order(theta);
    // log-weights before normalisation, largest first
    let logits: Vec<f64> = order.iter().map(|&i| -eta * theta[i]).collect();
    let mut suffix_lse = vec![0.0; m];
    suffix_lse[m - 1] = logits[m - 1];
    for k in (0..m - 1).rev() {
        suffix_lse[k] = log_add_ordered(logits[k], suffix_lse[k + 1]);
    }

    let mut capped = m;
    for k in 0..m {
        let rest = 1.0 - k as f64 / nu;
        if rest <= 0.0 {
            break;
        }
        // largest uncapped weight is the first one of the tail
        let log_top = rest.ln() + logits[k] - suffix_lse[k];
        if log_top <= log_cap + CAP_RELATIVE {
            capped = k;
            break;
        }
    }
    if capped == m {
        // ν·(capped prefix) exhausted the mass exactly: only possible for integer ν
        capped = (nu.floor() as usize).min(m);
    }

    let mut weights = vec![0.0; m];
    let mut linear = 0.0;
    let mut neg_entropy = 0.0;
    for &i in &order[..capped] {
        weights[i] = cap;
        linear += cap * theta[i];
        neg_entropy += cap * log_cap;
    }
    let rest = 1.0 - capped as f64 / nu;
    if capped < m && rest > 0.0 {
        let log_rest = rest.ln();
        let lse = suffix_lse[capped];
        for (r, &i) in order.iter().enumerate().skip(capped) {
            let log_d = log_rest + logits[r] - lse;
            let v = log_d.exp();
            weights[i] = v.min(cap);
            linear += v * theta[i];
            if v > 0.0 {
                neg_entropy += v * log_d;
            }
        }
    }
    let objective = linear + (neg_entropy + (m as f64).ln()) / eta;
    Ok(ProjectionResult {
        d: Distribution::from_solver(weights),
        objective,
        capped_count: capped,
    })
}

/// `f̃*(θ) = max_{d ∈ Δ_ν} dᵀθ − (1/η)Δ(d)`.
pub fn smoothed_conjugate(theta: &[f64], params: &CapParams) -> Result<f64> {
    let neg: Vec<f64> = theta.iter().map(|v| -v).collect();
    Ok(-capped_entropy_projection(&neg, params)?.objective)
}

/// `min_{d ∈ Δ_ν} dᵀ margins` by water-filling the smallest margins.
///
/// At `margins = Aw` this is the soft-margin objective `−f*(−Aw)`.
pub fn capped_min_linear(margins: &[f64], nu: f64) -> Result<(f64, Distribution)> {
    check_finite(margins)?;
    let m = margins.len();
    check_nu(m, nu)?;
    let cap = 1.0 / nu;
    let full = (nu.floor() as usize).min(m);
    let order = ascending_order(margins);
    let mut weights = vec![0.0; m];
    for &i in &order[..full] {
        weights[i] = cap;
    }
    let rest = 1.0 - full as f64 * cap;
    if full < m && rest > 0.0 {
        weights[order[full]] = rest;
    }
    let value = weights.iter().zip(margins).map(|(d, v)| d * v).sum();
    Ok((value, Distribution::from_solver(weights)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::relative_entropy;

    fn params(m: usize, nu: f64, eta: f64) -> CapParams {
        CapParams::with_eta(m, nu, eta).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn zero_theta_gives_uniform() {
        for &nu in &[1.0, 1.5, 2.0, 4.0] {
            let r = capped_entropy_projection(&[0.0; 4], &params(4, nu, 3.0)).unwrap();
            assert_close(r.d.as_slice(), &[0.25; 4], 1e-15);
            assert!(r.objective.abs() < 1e-15);
        }
    }

    #[test]
    fn nu_equal_m_forces_uniform() {
        let r = capped_entropy_projection(&[0.3, -2.0, 1.0, 0.0, 5.0], &params(5, 5.0, 100.0)).unwrap();
        assert_close(r.d.as_slice(), &[0.2; 5], 1e-12);
    }

    #[test]
    fn derived_three_point_instance() {
        // frozen from an exhaustive capped-subset enumeration, cross-checked on a 1e-3 grid
        let r = capped_entropy_projection(&[0.9, 0.1, -0.5], &params(3, 1.5, 2.0)).unwrap();
        assert_close(
            r.d.as_slice(),
            &[0.055_993_871_622_025_17, 0.277_339_461_711_308_2, 2.0 / 3.0],
            1e-12,
        );
        assert_eq!(r.capped_count, 1);
        let v = smoothed_conjugate(&[-0.9, -0.1, 0.5], &params(3, 1.5, 2.0)).unwrap();
        assert!((v - 0.099_601_063_294_741_28).abs() < 1e-12, "{}", v);
    }

    #[test]
    fn capped_branch_instance() {
        // the two smallest thetas hit the cap
        let r = capped_entropy_projection(&[-3.0, -2.0, 1.0, 2.0], &params(4, 2.5, 10.0)).unwrap();
        assert_eq!(r.capped_count, 2);
        let d = r.d.as_slice();
        assert!((d[0] - 0.4).abs() < 1e-15 && (d[1] - 0.4).abs() < 1e-15);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // the tail keeps the exponential ratio
        assert!((d[2] / d[3] - 10f64.exp()).abs() / 10f64.exp() < 1e-9);
    }

    #[test]
    fn objective_matches_its_definition() {
        let theta = [0.2, -0.7, 0.4, 0.9, -0.1];
        let p = params(5, 2.0, 7.0);
        let r = capped_entropy_projection(&theta, &p).unwrap();
        let direct: f64 = r.d.as_slice().iter().zip(&theta).map(|(d, t)| d * t).sum::<f64>()
            + relative_entropy(&r.d) / p.eta;
        assert!((direct - r.objective).abs() < 1e-12);
    }

    #[test]
    fn huge_eta_does_not_overflow() {
        let p = params(4, 1.5, 1e5);
        let r = capped_entropy_projection(&[0.5, -1.0, 0.9, -0.99], &p).unwrap();
        let d = r.d.as_slice();
        assert!(d.iter().all(|v| v.is_finite()));
        assert!((d[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((d[3] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_theta_rejected() {
        let p = params(2, 1.0, 1.0);
        assert!(matches!(
            capped_entropy_projection(&[f64::NAN, 0.0], &p),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            capped_entropy_projection(&[0.0, 0.0, 0.0], &p),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn conjugate_closed_form_at_nu_one() {
        let theta = [0.3, -0.2, 0.8, 0.1];
        let eta = 5.0;
        let v = smoothed_conjugate(&theta, &params(4, 1.0, eta)).unwrap();
        let lse = (theta.iter().map(|t| (eta * t).exp()).sum::<f64>() / 4.0).ln() / eta;
        assert!((v - lse).abs() < 1e-12);
    }

    #[test]
    fn conjugate_of_constant_theta() {
        for &nu in &[1.0, 2.0, 3.5] {
            let v = smoothed_conjugate(&[0.37; 5], &params(5, nu, 9.0)).unwrap();
            assert!((v - 0.37).abs() < 1e-14);
        }
    }

    #[test]
    fn capped_min_linear_examples() {
        let (v, _) = capped_min_linear(&[0.3; 6], 2.5).unwrap();
        assert!((v - 0.3).abs() < 1e-15);

        let (v, d) = capped_min_linear(&[0.5, -0.2, 0.3, 0.9], 2.0).unwrap();
        assert!((v - 0.05).abs() < 1e-15);
        assert_eq!(d.as_slice(), &[0.0, 0.5, 0.5, 0.0]);

        let (v, _) = capped_min_linear(&[0.5, -0.2, 0.3, 0.9], 4.0).unwrap();
        assert!((v - 0.375).abs() < 1e-15);
    }

    #[test]
    fn capped_min_linear_fractional_nu() {
        let (v, d) = capped_min_linear(&[0.1, 0.4, -0.3, 0.2], 1.5).unwrap();
        assert_close(d.as_slice(), &[1.0 / 3.0, 0.0, 2.0 / 3.0, 0.0], 1e-15);
        assert!((v - (0.1 / 3.0 - 0.2)).abs() < 1e-15);
        assert!(capped_min_linear(&[0.1, 0.2], 3.0).is_err());
    }
}
