//! Frank-Wolfe update rules over the simplex of discovered columns.
//!
//! All rules move the weights along a direction whose image under `A` is a
//! margin difference `Δ`, so the smoothed objective along the segment is
//! `φ(λ) = f̃*(−(Aw + λΔ))` with derivative `φ′(λ) = −d(λ)ᵀΔ`, where `d(λ)` is
//! the capped entropy projection of the margins at `λ`.
use serde::{Deserialize, Serialize};

use crate::entropy::capped_entropy_projection;
use crate::error::{Error, Result};
use crate::model::{dot, margins, CapParams, Distribution, EnsembleWeights, GainMatrix};
use crate::tolerance::{LINE_SEARCH_INTERVAL, LINE_SEARCH_MAX_ITERS};

#[derive(Debug, Clone, PartialEq)]
pub struct FwStepOutcome {
    pub new_w: EnsembleWeights,
    pub lambda: f64,
    /// Largest admissible step: the away coefficient for pairwise steps, 1 otherwise.
    pub lambda_max: f64,
    /// `λ < λ_max`
    pub good_step: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FwRule {
    /// `λ_t = 2/(t+2)`
    Classic,
    /// Minimiser of the η-smoothness upper bound, clipped to `[0, 1]`.
    ShortStep,
    /// Exact minimisation along the segment.
    LineSearch,
    /// Moves mass from the worst active column to the new one.
    Pairwise,
}

impl FwRule {
    /// Applies the rule at round `t` with distribution `d = ∇f̃*(−Aw)`.
    pub fn step<H>(
        self,
        t: usize,
        a: &GainMatrix<H>,
        w: &EnsembleWeights,
        e_new: usize,
        d: &Distribution,
        params: &CapParams,
    ) -> Result<FwStepOutcome> {
        match self {
            FwRule::Classic => Ok(classic_step(t, w, e_new)),
            FwRule::ShortStep => short_step(a, w, e_new, d, params.eta),
            FwRule::LineSearch => line_search_step(a, w, e_new, params),
            FwRule::Pairwise => pairwise_step(a, w, e_new, d, params),
        }
    }
}

/// `(1 − λ) w + λ e_new`
fn toward(w: &EnsembleWeights, e_new: usize, lambda: f64) -> EnsembleWeights {
    EnsembleWeights::normalized(
        w.iter()
            .map(|(j, v)| (j, (1.0 - lambda) * v))
            .chain(std::iter::once((e_new, lambda))),
    )
}

fn check_column<H>(a: &GainMatrix<H>, j: usize) -> Result<()> {
    if j >= a.num_columns() {
        return Err(Error::Structural(format!(
            "column {} not in a gain matrix with {} columns",
            j,
            a.num_columns()
        )));
    }
    Ok(())
}

/// Classic open-loop step `λ = 2/(t+2)`.
pub fn classic_step(t: usize, w: &EnsembleWeights, e_new: usize) -> FwStepOutcome {
    let lambda = 2.0 / (t as f64 + 2.0);
    FwStepOutcome {
        new_w: toward(w, e_new, lambda),
        lambda,
        lambda_max: 1.0,
        good_step: lambda < 1.0,
    }
}

/// `λ = clip_[0,1] dᵀA(e − w) / (η ‖A(e − w)‖²_∞)`.
pub fn short_step<H>(
    a: &GainMatrix<H>,
    w: &EnsembleWeights,
    e_new: usize,
    d: &Distribution,
    eta: f64,
) -> Result<FwStepOutcome> {
    check_column(a, e_new)?;
    let aw = margins(a, w)?;
    let diff: Vec<f64> = a.column(e_new).iter().zip(&aw).map(|(e, m)| e - m).collect();
    let lambda = short_step_size(d.as_slice(), &diff, eta);
    Ok(FwStepOutcome {
        new_w: toward(w, e_new, lambda),
        lambda,
        lambda_max: 1.0,
        good_step: lambda < 1.0,
    })
}

/// The clipped short step for margin difference `diff`.
pub fn short_step_size(d: &[f64], diff: &[f64], eta: f64) -> f64 {
    let numer = dot(d, diff);
    let sup = diff.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let denom = eta * sup * sup;
    if denom <= 0.0 {
        return 0.0;
    }
    (numer / denom).clamp(0.0, 1.0)
}

/// `φ′(λ) = −d(λ)ᵀΔ`.
fn slope(base: &[f64], dir: &[f64], lambda: f64, params: &CapParams) -> Result<f64> {
    let theta: Vec<f64> = base.iter().zip(dir).map(|(b, v)| b + lambda * v).collect();
    let d = capped_entropy_projection(&theta, params)?.d;
    Ok(-dot(d.as_slice(), dir))
}

/// Minimises the convex `φ(λ) = f̃*(−(base + λ·dir))` over `[0, lambda_max]` by
/// bisection on the sign of `φ′`.
pub fn line_search(base: &[f64], dir: &[f64], lambda_max: f64, params: &CapParams) -> Result<f64> {
    if lambda_max <= 0.0 {
        return Ok(0.0);
    }
    if slope(base, dir, 0.0, params)? >= 0.0 {
        return Ok(0.0);
    }
    if slope(base, dir, lambda_max, params)? <= 0.0 {
        return Ok(lambda_max);
    }
    let (mut lo, mut hi) = (0.0, lambda_max);
    for _ in 0..LINE_SEARCH_MAX_ITERS {
        if hi - lo <= LINE_SEARCH_INTERVAL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if slope(base, dir, mid, params)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact line search along `e_new − w` on `[0, 1]`.
pub fn line_search_step<H>(
    a: &GainMatrix<H>,
    w: &EnsembleWeights,
    e_new: usize,
    params: &CapParams,
) -> Result<FwStepOutcome> {
    check_column(a, e_new)?;
    let aw = margins(a, w)?;
    let diff: Vec<f64> = a.column(e_new).iter().zip(&aw).map(|(e, m)| e - m).collect();
    let lambda = line_search(&aw, &diff, 1.0, params)?;
    Ok(FwStepOutcome {
        new_w: toward(w, e_new, lambda),
        lambda,
        lambda_max: 1.0,
        good_step: lambda < 1.0,
    })
}

/// Column of the active support with the smallest edge; ties go to the lowest index.
pub fn away_column<H>(a: &GainMatrix<H>, w: &EnsembleWeights, d: &Distribution) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in w.support() {
        let e = a.edge_of(j, d);
        if best.is_none_or(|(_, b)| e < b) {
            best = Some((j, e));
        }
    }
    best.map(|(j, _)| j)
}

/// Pairwise step: line search for the mass moved from the away column to `e_new`.
pub fn pairwise_step<H>(
    a: &GainMatrix<H>,
    w: &EnsembleWeights,
    e_new: usize,
    d: &Distribution,
    params: &CapParams,
) -> Result<FwStepOutcome> {
    check_column(a, e_new)?;
    let away = away_column(a, w, d)
        .ok_or_else(|| Error::Input("pairwise step needs a non-empty support".into()))?;
    let lambda_max = w.get(away);
    if away == e_new {
        return Ok(FwStepOutcome {
            new_w: w.clone(),
            lambda: 0.0,
            lambda_max,
            good_step: true,
        });
    }
    let aw = margins(a, w)?;
    let diff: Vec<f64> = a
        .column(e_new)
        .iter()
        .zip(a.column(away))
        .map(|(e, s)| e - s)
        .collect();
    let lambda = line_search(&aw, &diff, lambda_max, params)?;
    let drop = lambda >= lambda_max;
    let new_w = EnsembleWeights::normalized(w.iter().filter_map(|(j, v)| {
        if j == away {
            // a drop step removes the away column exactly
            (!drop).then_some((j, v - lambda))
        } else {
            Some((j, v))
        }
    }).chain(std::iter::once((e_new, lambda))));
    Ok(FwStepOutcome {
        new_w,
        lambda,
        lambda_max,
        good_step: !drop,
    })
}
