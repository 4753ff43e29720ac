//! The generic Frank-Wolfe boosting scheme and its named instances.
//!
//! [`run_scheme`] keeps `w_t` over the discovered columns, sets
//! `d_t = ∇f̃*(−Aw_t)`, asks the weak learner for a column and stops once
//!
//! ```text
//! ε_t = min_{τ ≤ t} (d_τᵀA)_{j_{τ+1}} + f̃*(−Aw_t) ≤ ε/2,
//! ```
//!
//! which certifies a soft margin within `ε` of the learner's guarantee.
//! Otherwise it forms a Frank-Wolfe candidate and, optionally, a secondary
//! candidate, and continues from whichever has the smaller `f̃*(−A·)`.
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::entropy::{capped_entropy_projection, capped_min_linear};
use crate::error::{Error, Result};
pub use crate::fw::FwRule;
use crate::learner::{StumpHypothesis, WeakLearner};
use crate::lp::{solve_edge_min, EdgeMinSolution, RestrictedMaster};
use crate::model::{check_nu, dot, margins, CapParams, EnsembleWeights, GainMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondaryKind {
    None,
    Lpboost,
    Erlpboost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoosterConfig {
    pub eps: f64,
    pub nu: f64,
    pub fw_rule: FwRule,
    pub secondary: SecondaryKind,
    /// `None` means `⌈32 ε⁻² ln(m/ν)⌉ + 16`.
    pub max_iterations: Option<usize>,
    pub seed: u64,
    /// Wall-clock budget; an expired run returns as timed out.
    #[serde(skip)]
    pub time_limit: Option<Duration>,
}

impl BoosterConfig {
    /// C-ERLPBoost defaults: short step, no secondary rule.
    pub fn new(eps: f64, nu: f64) -> Self {
        Self {
            eps,
            nu,
            fw_rule: FwRule::ShortStep,
            secondary: SecondaryKind::None,
            max_iterations: None,
            seed: 0,
            time_limit: None,
        }
    }

    pub fn fw_rule(mut self, rule: FwRule) -> Self {
        self.fw_rule = rule;
        self
    }

    pub fn secondary(mut self, secondary: SecondaryKind) -> Self {
        self.secondary = secondary;
        self
    }

    pub fn max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = Some(n);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn validate(&self, m: usize) -> Result<CapParams> {
        check_nu(m, self.nu)?;
        if self.max_iterations == Some(0) {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        CapParams::new(m, self.nu, self.eps)
    }

    /// Iteration count after which short-step and classic runs must have stopped.
    pub fn iteration_bound(&self, m: usize) -> usize {
        iteration_bound(m, self.nu, self.eps)
    }

    pub fn resolved_max_iterations(&self, m: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| self.iteration_bound(m) + 16)
    }
}

/// `⌈32 ε⁻² ln(m/ν)⌉`
pub fn iteration_bound(m: usize, nu: f64, eps: f64) -> usize {
    (32.0 / (eps * eps) * (m as f64 / nu).ln()).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleChoice {
    Fw,
    Secondary,
    /// Stopping round: no update was computed.
    None,
}

/// One round of a boosting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    /// `(d_tᵀA)_{j_{t+1}}`
    pub edge_new: f64,
    #[serde(rename = "min_edge")]
    pub min_edge_so_far: f64,
    /// `f̃*(−Aw_t)`
    pub smoothed_obj: f64,
    /// `min_{d ∈ Δ_ν} dᵀAw_t`
    pub soft_margin_obj: f64,
    pub eps_t: f64,
    #[serde(rename = "rule")]
    pub chosen_rule: RuleChoice,
    /// Frank-Wolfe step size of this round, when a Frank-Wolfe candidate was formed.
    pub lambda: Option<f64>,
    pub good_step: bool,
    pub wall_time_ns: u64,
}

/// Convex combination of hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel<H> {
    pub hypotheses: Vec<H>,
    pub weights: Vec<f64>,
    pub soft_margin: f64,
    pub smoothed: f64,
    pub converged: bool,
    pub num_features: Option<usize>,
}

impl TrainedModel<StumpHypothesis> {
    /// `H(x) = Σ_j w_j h_j(x)`
    pub fn confidence(&self, x: &[f64]) -> Result<f64> {
        self.check_width(x)?;
        Ok(self
            .hypotheses
            .iter()
            .zip(&self.weights)
            .map(|(h, w)| w * h.predict(x))
            .sum())
    }

    /// Sign of `H(x)`, with ties going to `+1`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.confidence(x)? >= 0.0 { 1.0 } else { -1.0 })
    }

    fn check_width(&self, x: &[f64]) -> Result<()> {
        if let Some(p) = self.num_features {
            if x.len() != p {
                return Err(Error::Structural(format!(
                    "model expects {} features, got {}",
                    p,
                    x.len()
                )));
            }
        }
        if let Some(h) = self.hypotheses.iter().find(|h| h.feature >= x.len()) {
            return Err(Error::Structural(format!(
                "hypothesis uses feature {} but the input has {}",
                h.feature,
                x.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BoostOutcome<H> {
    pub model: TrainedModel<H>,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub timed_out: bool,
    /// Final weights over the columns of `gain`.
    pub weights: EnsembleWeights,
    pub gain: GainMatrix<H>,
}

impl<H> BoostOutcome<H> {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// A rule proposing weights over the discovered columns.
///
/// `current` is the scheme's iterate before the update; rules may ignore it.
pub trait SecondaryRule<H> {
    fn propose(
        &mut self,
        a: &GainMatrix<H>,
        current: &EnsembleWeights,
        params: &CapParams,
    ) -> Result<EnsembleWeights>;
}

/// LPBoost's restricted LP: `argmax_{w ∈ CH(E)} min_{d ∈ Δ_ν} dᵀAw`.
///
/// Keeps the LP warm between calls, so one value must only ever see a single
/// growing gain matrix.
#[derive(Debug, Clone, Default)]
pub struct LpBoostRule {
    master: Option<RestrictedMaster>,
}

impl LpBoostRule {
    pub fn solve<H>(&mut self, a: &GainMatrix<H>, nu: f64) -> Result<EdgeMinSolution> {
        match &mut self.master {
            Some(master) if master.num_columns() <= a.num_columns() => master.sync(a),
            _ => {
                let master = RestrictedMaster::new(a, nu)?;
                let sol = master.solution(a)?;
                self.master = Some(master);
                Ok(sol)
            }
        }
    }
}

impl<H> SecondaryRule<H> for LpBoostRule {
    fn propose(
        &mut self,
        a: &GainMatrix<H>,
        _current: &EnsembleWeights,
        params: &CapParams,
    ) -> Result<EnsembleWeights> {
        Ok(self.solve(a, params.nu)?.w)
    }
}

pub fn secondary_lpboost<H>(a: &GainMatrix<H>, nu: f64) -> Result<EnsembleWeights> {
    Ok(solve_edge_min(a, nu)?.w)
}

/// Fully corrective minimisation of `f̃*(−Aw)` over the discovered columns.
#[derive(Debug, Clone)]
pub struct ErlpBoostRule {
    pub max_inner: usize,
    /// Set when the inner loop stopped on `max_inner` rather than on its gap.
    pub hit_iteration_cap: bool,
}

impl Default for ErlpBoostRule {
    fn default() -> Self {
        Self {
            max_inner: 20_000,
            hit_iteration_cap: false,
        }
    }
}

impl<H> SecondaryRule<H> for ErlpBoostRule {
    fn propose(
        &mut self,
        a: &GainMatrix<H>,
        current: &EnsembleWeights,
        params: &CapParams,
    ) -> Result<EnsembleWeights> {
        let (w, capped) = secondary_erlpboost_from(a, current, params, self.max_inner)?;
        self.hit_iteration_cap |= capped;
        Ok(w)
    }
}

/// Solves `min_{w ∈ CH(E)} f̃*(−Aw)` from a point mass on the column with the
/// largest mean margin. See [`secondary_erlpboost_from`].
pub fn secondary_erlpboost<H>(a: &GainMatrix<H>, params: &CapParams) -> Result<(EnsembleWeights, bool)> {
    if a.is_empty() {
        return Err(Error::Structural("no columns to combine".into()));
    }
    let start = (0..a.num_columns())
        .map(|j| (j, a.column(j).iter().sum::<f64>()))
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b })
        .0;
    secondary_erlpboost_from(a, &EnsembleWeights::point_mass(start), params, 20_000)
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut sum = 0.0;
    let mut tau = 0.0;
    for (k, &x) in u.iter().enumerate() {
        sum += x;
        let candidate = (sum - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// `(f̃*(−Aw), −Aᵀd(w), Aᵀd(w))` for dense `w`.
fn objective_and_edges<H>(a: &GainMatrix<H>, w: &[f64], params: &CapParams) -> Result<(f64, Vec<f64>)> {
    let mut aw = vec![0.0; a.rows()];
    for (c, &wk) in a.columns().iter().zip(w) {
        if wk != 0.0 {
            for (m, v) in aw.iter_mut().zip(c) {
                *m += wk * v;
            }
        }
    }
    let proj = capped_entropy_projection(&aw, params)?;
    let e = a.columns().iter().map(|c| dot(proj.d.as_slice(), c)).collect();
    Ok((-proj.objective, e))
}

/// Accelerated projected gradient (with backtracking and function-value
/// restarts) from `start` until the Frank-Wolfe gap `max_k e_k − Σ_k w_k e_k`,
/// an upper bound on the suboptimality, is at most `ε/10`. The second value
/// reports whether `max_inner` was exhausted first.
pub fn secondary_erlpboost_from<H>(
    a: &GainMatrix<H>,
    start: &EnsembleWeights,
    params: &CapParams,
    max_inner: usize,
) -> Result<(EnsembleWeights, bool)> {
    let tol = params.eps / 10.0;
    let t = a.num_columns();
    let mut x = start.to_dense(t);
    let (mut fx, mut ex) = objective_and_edges(a, &x, params)?;
    let mut y = x.clone();
    let mut theta: f64 = 1.0;
    let mut lip = params.eta;
    let to_weights = |x: &[f64]| EnsembleWeights::normalized(x.iter().copied().enumerate());
    for _ in 0..max_inner {
        let top = ex.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top - dot(&x, &ex) <= tol {
            return Ok((to_weights(&x), false));
        }
        let (fy, ey) = objective_and_edges(a, &y, params)?;
        // the gradient at y is −ey
        let (z, fz, ez) = loop {
            let z = project_to_simplex(&y.iter().zip(&ey).map(|(yk, ek)| yk + ek / lip).collect::<Vec<_>>());
            let (fz, ez) = objective_and_edges(a, &z, params)?;
            let diff: Vec<f64> = z.iter().zip(&y).map(|(a, b)| a - b).collect();
            let model = fy - dot(&ey, &diff) + 0.5 * lip * dot(&diff, &diff);
            if fz <= model + 1e-14 * (1.0 + fy.abs()) || lip > 1e15 {
                break (z, fz, ez);
            }
            lip *= 2.0;
        };
        if fz > fx {
            // restart momentum from the last accepted point
            theta = 1.0;
            y = x.clone();
            continue;
        }
        let next_theta = (1.0 + (1.0 + 4.0 * theta * theta).sqrt()) / 2.0;
        let beta = (theta - 1.0) / next_theta;
        y = z.iter().zip(&x).map(|(zk, xk)| zk + beta * (zk - xk)).collect();
        theta = next_theta;
        x = z;
        fx = fz;
        ex = ez;
        lip *= 0.95;
    }
    Ok((to_weights(&x), true))
}

/// `f̃*(−Aw)`
pub fn smoothed_objective<H>(a: &GainMatrix<H>, w: &EnsembleWeights, params: &CapParams) -> Result<f64> {
    Ok(-capped_entropy_projection(&margins(a, w)?, params)?.objective)
}

fn secondary_from_kind<H>(kind: SecondaryKind) -> Option<Box<dyn SecondaryRule<H>>> {
    match kind {
        SecondaryKind::None => None,
        SecondaryKind::Lpboost => Some(Box::new(LpBoostRule::default())),
        SecondaryKind::Erlpboost => Some(Box::new(ErlpBoostRule::default())),
    }
}

fn finish<H: Clone>(
    a: GainMatrix<H>,
    w: EnsembleWeights,
    records: Vec<IterationRecord>,
    converged: bool,
    timed_out: bool,
    params: &CapParams,
    num_features: Option<usize>,
) -> Result<BoostOutcome<H>> {
    let aw = margins(&a, &w)?;
    let smoothed = -capped_entropy_projection(&aw, params)?.objective;
    let (soft_margin, _) = capped_min_linear(&aw, params.nu)?;
    let (hypotheses, weights) = w
        .iter()
        .map(|(j, v)| (a.hypothesis(j).clone(), v))
        .unzip();
    Ok(BoostOutcome {
        model: TrainedModel {
            hypotheses,
            weights,
            soft_margin,
            smoothed,
            converged,
            num_features,
        },
        records,
        converged,
        timed_out,
        weights: w,
        gain: a,
    })
}

fn elapsed_ns(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX)
}

/// The generic scheme with the secondary rule named in `config`.
pub fn run_scheme<L: WeakLearner>(learner: &L, config: &BoosterConfig) -> Result<BoostOutcome<L::Hypothesis>> {
    let mut secondary = secondary_from_kind(config.secondary);
    run_scheme_with(learner, config, secondary.as_deref_mut())
}

/// The generic scheme with an arbitrary secondary rule.
pub fn run_scheme_with<'s, L: WeakLearner>(
    learner: &L,
    config: &BoosterConfig,
    mut secondary: Option<&mut (dyn SecondaryRule<L::Hypothesis> + 's)>,
) -> Result<BoostOutcome<L::Hypothesis>> {
    let m = learner.num_examples();
    let params = config.validate(m)?;
    let max_iter = config.resolved_max_iterations(m);
    let started = Instant::now();

    let mut a = GainMatrix::new(m);
    let first = learner.best_response(&crate::model::Distribution::uniform(m))?;
    let mut min_edge = first.edge;
    let (j1, _) = a.push(first.column, first.hypothesis)?;
    let mut w = EnsembleWeights::point_mass(j1);

    let mut records = Vec::new();
    let mut converged = false;
    let mut timed_out = false;
    for t in 1..=max_iter {
        let round = Instant::now();
        let aw = margins(&a, &w)?;
        let proj = capped_entropy_projection(&aw, &params)?;
        let smoothed = -proj.objective;
        let (soft_margin, _) = capped_min_linear(&aw, params.nu)?;
        let d = proj.d;

        let resp = learner.best_response(&d)?;
        min_edge = min_edge.min(resp.edge);
        let eps_t = min_edge + smoothed;
        let mut record = IterationRecord {
            t,
            edge_new: resp.edge,
            min_edge_so_far: min_edge,
            smoothed_obj: smoothed,
            soft_margin_obj: soft_margin,
            eps_t,
            chosen_rule: RuleChoice::None,
            lambda: None,
            good_step: false,
            wall_time_ns: 0,
        };
        if eps_t <= config.eps / 2.0 {
            record.wall_time_ns = elapsed_ns(round);
            records.push(record);
            converged = true;
            break;
        }

        let (j, _) = a.push(resp.column, resp.hypothesis)?;
        let fw = config.fw_rule.step(t, &a, &w, j, &d, &params)?;
        record.lambda = Some(fw.lambda);
        record.good_step = fw.good_step;
        record.chosen_rule = RuleChoice::Fw;
        let mut next = fw.new_w;
        if let Some(rule) = secondary.as_deref_mut() {
            let alt = rule.propose(&a, &w, &params)?;
            // ties keep the Frank-Wolfe candidate
            if smoothed_objective(&a, &alt, &params)? < smoothed_objective(&a, &next, &params)? {
                next = alt;
                record.chosen_rule = RuleChoice::Secondary;
            }
        }
        w = next;
        record.wall_time_ns = elapsed_ns(round);
        records.push(record);

        if config.time_limit.is_some_and(|limit| started.elapsed() > limit) {
            timed_out = true;
            break;
        }
    }
    finish(a, w, records, converged, timed_out, &params, learner.input_width())
}

/// ERLPBoost: the scheme whose secondary rule is the fully corrective entropy solve.
pub fn run_erlpboost<L: WeakLearner>(learner: &L, config: &BoosterConfig) -> Result<BoostOutcome<L::Hypothesis>> {
    let config = config.clone().secondary(SecondaryKind::Erlpboost);
    run_scheme(learner, &config)
}

/// Standalone LPBoost: `d_t` is the restricted edge-minimising distribution and
/// the run stops once the new edge is at most `γ_t + ε`.
pub fn run_lpboost<L: WeakLearner>(learner: &L, config: &BoosterConfig) -> Result<BoostOutcome<L::Hypothesis>> {
    let m = learner.num_examples();
    let params = config.validate(m)?;
    let max_iter = config.resolved_max_iterations(m);
    let started = Instant::now();

    let mut a = GainMatrix::new(m);
    let first = learner.best_response(&crate::model::Distribution::uniform(m))?;
    let mut min_edge = first.edge;
    let (j1, _) = a.push(first.column, first.hypothesis)?;
    let mut w = EnsembleWeights::point_mass(j1);

    let mut records = Vec::new();
    let mut converged = false;
    let mut timed_out = false;
    let mut rule = LpBoostRule::default();
    for t in 1..=max_iter {
        let round = Instant::now();
        let lp = rule.solve(&a, params.nu)?;
        w = lp.w;
        let aw = margins(&a, &w)?;
        let smoothed = -capped_entropy_projection(&aw, &params)?.objective;
        let (soft_margin, _) = capped_min_linear(&aw, params.nu)?;

        let resp = learner.best_response(&lp.d)?;
        min_edge = min_edge.min(resp.edge);
        let mut record = IterationRecord {
            t,
            edge_new: resp.edge,
            min_edge_so_far: min_edge,
            smoothed_obj: smoothed,
            soft_margin_obj: soft_margin,
            eps_t: min_edge + smoothed,
            chosen_rule: RuleChoice::None,
            lambda: None,
            good_step: false,
            wall_time_ns: 0,
        };
        if resp.edge <= lp.gamma + config.eps {
            record.wall_time_ns = elapsed_ns(round);
            records.push(record);
            converged = true;
            break;
        }
        a.push(resp.column, resp.hypothesis)?;
        record.chosen_rule = RuleChoice::Secondary;
        record.wall_time_ns = elapsed_ns(round);
        records.push(record);

        if config.time_limit.is_some_and(|limit| started.elapsed() > limit) {
            timed_out = true;
            break;
        }
    }
    finish(a, w, records, converged, timed_out, &params, learner.input_width())
}

/// Named configurations exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "lpboost")]
    LpBoost,
    #[serde(rename = "erlpboost")]
    ErlpBoost,
    #[serde(rename = "cerlpboost")]
    CErlpBoost,
    #[serde(rename = "mlpb-ss")]
    MlpbShortStep,
    #[serde(rename = "mlpb-pfw")]
    MlpbPairwise,
    #[serde(rename = "mlpb-ls")]
    MlpbLineSearch,
    #[serde(rename = "mlpb-classic")]
    MlpbClassic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::LpBoost,
        Algorithm::ErlpBoost,
        Algorithm::CErlpBoost,
        Algorithm::MlpbShortStep,
        Algorithm::MlpbPairwise,
        Algorithm::MlpbLineSearch,
        Algorithm::MlpbClassic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LpBoost => "lpboost",
            Algorithm::ErlpBoost => "erlpboost",
            Algorithm::CErlpBoost => "cerlpboost",
            Algorithm::MlpbShortStep => "mlpb-ss",
            Algorithm::MlpbPairwise => "mlpb-pfw",
            Algorithm::MlpbLineSearch => "mlpb-ls",
            Algorithm::MlpbClassic => "mlpb-classic",
        }
    }

    /// Scheme configuration; LPBoost keeps the defaults since it runs its own loop.
    pub fn configure(self, base: BoosterConfig) -> BoosterConfig {
        let (fw, sec) = match self {
            Algorithm::LpBoost => (FwRule::ShortStep, SecondaryKind::Lpboost),
            Algorithm::ErlpBoost => (FwRule::ShortStep, SecondaryKind::Erlpboost),
            Algorithm::CErlpBoost => (FwRule::ShortStep, SecondaryKind::None),
            Algorithm::MlpbShortStep => (FwRule::ShortStep, SecondaryKind::Lpboost),
            Algorithm::MlpbPairwise => (FwRule::Pairwise, SecondaryKind::Lpboost),
            Algorithm::MlpbLineSearch => (FwRule::LineSearch, SecondaryKind::Lpboost),
            Algorithm::MlpbClassic => (FwRule::Classic, SecondaryKind::Lpboost),
        };
        base.fw_rule(fw).secondary(sec)
    }

    pub fn run<L: WeakLearner>(self, learner: &L, base: &BoosterConfig) -> Result<BoostOutcome<L::Hypothesis>> {
        let config = self.configure(base.clone());
        match self {
            Algorithm::LpBoost => run_lpboost(learner, &config),
            Algorithm::ErlpBoost => run_erlpboost(learner, &config),
            _ => run_scheme(learner, &config),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{}`", s)))
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
