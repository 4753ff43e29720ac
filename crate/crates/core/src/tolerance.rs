//! Numeric tolerances shared across the crate.
//!
//! | constant              | value  | used for |
//! |-----------------------|--------|----------|
//! | `SIMPLEX_SUM`         | 1e-9   | `|Σ d_i − 1|`, `|Σ w_j − 1|` membership checks |
//! | `CAP_SLACK`           | 1e-12  | `d_i ≤ 1/ν` membership, absolute |
//! | `CAP_RELATIVE`        | 1e-12  | cap test inside the sorted projection, relative |
//! | `ENTROPY_ZERO`        | 1e-15  | entries treated as zero in `Σ d ln d` |
//! | `SUPPORT_DROP`        | 1e-12  | coefficients removed from a sparse weight vector |
//! | `DUAL_CLIP`           | 1e-10  | negative LP duals clipped to zero |
//! | `LP_PIVOT`            | 1e-9   | smallest accepted pivot element |
//! | `LP_OPTIMALITY`       | 1e-11  | reduced cost below which a column may enter |
//! | `LP_FEASIBILITY`      | 1e-8   | phase-one residual treated as feasible |
//! | `LINE_SEARCH_INTERVAL`| 1e-10  | bisection stops once the bracket is this short |

pub const SIMPLEX_SUM: f64 = 1e-9;
pub const CAP_SLACK: f64 = 1e-12;
pub const CAP_RELATIVE: f64 = 1e-12;
pub const ENTROPY_ZERO: f64 = 1e-15;
pub const SUPPORT_DROP: f64 = 1e-12;
pub const DUAL_CLIP: f64 = 1e-10;
pub const LP_PIVOT: f64 = 1e-9;
pub const LP_OPTIMALITY: f64 = 1e-11;
pub const LP_FEASIBILITY: f64 = 1e-8;
pub const LINE_SEARCH_INTERVAL: f64 = 1e-10;
pub const LINE_SEARCH_MAX_ITERS: usize = 50;
