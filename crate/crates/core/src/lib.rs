//! # marginforge
//!
//! Boosting for the ℓ1-regularized soft-margin problem, organised around a
//! single Frank-Wolfe scheme.
//!
//! Every booster in this crate maintains a sparse weight vector `w` over the
//! hypotheses found so far and a distribution `d` over the examples. The
//! distribution is the gradient of the entropy-smoothed conjugate at the
//! current margins, the weak learner answers the linear-minimisation oracle,
//! and the weights move by a Frank-Wolfe rule. A secondary rule (LPBoost's
//! restricted LP, or a fully corrective entropy solve) may propose a competing
//! iterate; the scheme keeps whichever has the smaller smoothed objective.
//!
//! | algorithm      | FW rule      | secondary rule |
//! |----------------|--------------|----------------|
//! | C-ERLPBoost    | short step   | none           |
//! | ERLPBoost      | short step   | fully corrective entropy solve |
//! | MLPBoost (SS)  | short step   | LPBoost        |
//! | MLPBoost (PFW) | pairwise     | LPBoost        |
//! | MLPBoost (LS)  | line search  | LPBoost        |
//! | MLPBoost (classic) | 2/(t+2)  | LPBoost        |
//! | LPBoost        | standalone column generation loop |
//!
//! Modules:
//!
//! - [`model`]: datasets, the gain matrix, simplex points and shared arithmetic.
//! - [`entropy`]: the sorting-based capped entropy projection and the smoothed conjugate.
//! - [`lp`]: a dense simplex solver and the edge-minimisation LP.
//! - [`learner`]: decision stumps and the exhaustive column oracle.
//! - [`fw`]: classic, short-step, line-search and pairwise update rules.
//! - [`booster`]: the generic scheme, LPBoost and ERLPBoost.
//! - [`io`], [`cli`]: file formats and the command surface of the `marginforge` binary.
//! - [`synth`]: synthetic data generators used by tests and examples.
pub mod booster;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod fw;
pub mod io;
pub mod learner;
pub mod lp;
pub mod model;
pub mod synth;
pub mod tolerance;

pub use booster::{
    run_erlpboost, run_lpboost, run_scheme, Algorithm, BoostOutcome, BoosterConfig, FwRule,
    IterationRecord, RuleChoice, SecondaryKind, SecondaryRule, TrainedModel,
};
pub use entropy::{capped_entropy_projection, capped_min_linear, smoothed_conjugate, ProjectionResult};
pub use error::{Error, Result};
pub use learner::{PoolOracle, StumpHypothesis, StumpLearner, StumpPool, WeakLearner};
pub use lp::{solve_edge_min, solve_lp, EdgeMinSolution, LpSolution, StandardLp};
pub use model::{
    edges, margins, relative_entropy, CapParams, Dataset, Distribution, EnsembleWeights, GainMatrix,
};
