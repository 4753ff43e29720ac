//! Dense two-phase primal simplex and the edge-minimisation LP.
//!
//! The solver works on a full tableau. Every row starts with an identity
//! column (its slack, or an artificial variable for `=` rows and rows whose
//! right-hand side had to be negated). Those columns hold `B⁻¹` at every step,
//! which gives the duals at the end of phase two and lets new columns be
//! priced into an optimal tableau, so column generation can resume from the
//! previous basis instead of starting over.
use thiserror::Error;

use crate::entropy::capped_min_linear;
use crate::model::{check_nu, dot, Distribution, EnsembleWeights, GainMatrix};
use crate::tolerance::{DUAL_CLIP, LP_FEASIBILITY, LP_OPTIMALITY, LP_PIVOT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    /// Phase one could not drive the artificial variables to zero. The
    /// certificate holds the phase-one row multipliers.
    #[error("LP is infeasible (phase-one residual {residual:e})")]
    Infeasible { residual: f64, certificate: Vec<f64> },

    /// The objective improves without bound along `direction`.
    #[error("LP is unbounded")]
    Unbounded { direction: Vec<f64> },

    #[error("malformed LP: {0}")]
    Malformed(String),

    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),

    #[error("dual value {value:e} on row {row} is negative beyond the clipping tolerance")]
    NegativeDual { row: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lowest-index improving column, lowest-index leaving variable on ties.
    Bland,
    /// Most negative reduced cost; can cycle on degenerate problems.
    Dantzig,
    /// Dantzig pricing, switching to Bland while pivots stay degenerate.
    #[default]
    DantzigBland,
}

/// Consecutive degenerate pivots after which [`PivotRule::DantzigBland`] prices by Bland.
const DEGENERATE_STREAK: usize = 25;

/// `opt cᵀx  s.t.  A x (≤|=) b,  lo ≤ x ≤ hi` with `lo ∈ {0, −∞}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraint_matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub row_kinds: Vec<RowKind>,
    pub variable_bounds: Vec<(f64, f64)>,
}

impl StandardLp {
    /// Empty problem over `n` non-negative variables.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            constraint_matrix: Vec::new(),
            rhs: Vec::new(),
            row_kinds: Vec::new(),
            variable_bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, kind: RowKind, rhs: f64) -> &mut Self {
        self.constraint_matrix.push(coeffs);
        self.row_kinds.push(kind);
        self.rhs.push(rhs);
        self
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.variable_bounds[var] = (lo, hi);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    /// Rows the solver will actually pivot on: constraints plus finite upper bounds.
    pub fn tableau_rows(&self) -> usize {
        self.num_rows()
            + self
                .variable_bounds
                .iter()
                .filter(|(_, hi)| hi.is_finite())
                .count()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let r = self.num_rows();
        if self.row_kinds.len() != r || self.constraint_matrix.len() != r {
            return Err(LpError::Malformed("row counts disagree".into()));
        }
        if self.variable_bounds.len() != n {
            return Err(LpError::Malformed("bounds length differs from variable count".into()));
        }
        if let Some(i) = self.constraint_matrix.iter().position(|row| row.len() != n) {
            return Err(LpError::Malformed(format!("row {} has the wrong length", i)));
        }
        let finite = self.objective.iter().chain(self.rhs.iter()).all(|v| v.is_finite())
            && self.constraint_matrix.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        for (j, &(lo, hi)) in self.variable_bounds.iter().enumerate() {
            let lo_ok = lo == 0.0 || lo == f64::NEG_INFINITY;
            if !lo_ok || hi.is_nan() || hi < 0.0 && lo == 0.0 {
                return Err(LpError::Malformed(format!("bad bounds [{}, {}] on x{}", lo, hi, j)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// One multiplier per constraint row with `value = Σ rhs_i · duals_i`
    /// whenever no upper bound is active.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Tableau {
    rows: usize,
    cols: usize,
    // rows × (cols + 1), last entry of each row is the rhs
    data: Vec<f64>,
    // reduced costs, last entry is minus the objective value
    cost: Vec<f64>,
    basis: Vec<usize>,
    artificial: Vec<bool>,
    pivots: usize,
    max_pivots: usize,
    rule: PivotRule,
    degenerate_streak: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.data[p * w + q];
        for v in &mut self.data[p * w..(p + 1) * w] {
            *v *= inv;
        }
        self.data[p * w + q] = 1.0;
        let pivot_row: Vec<f64> = self.data[p * w..(p + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == p {
                continue;
            }
            let f = self.data[i * w + q];
            if f != 0.0 {
                let row = &mut self.data[i * w..(i + 1) * w];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        let f = self.cost[q];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost[q] = 0.0;
        }
        self.basis[p] = q;
        self.pivots += 1;
    }

    fn set_costs(&mut self, c: &[f64]) {
        self.cost = c.to_vec();
        self.cost.push(0.0);
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=self.cols {
                    self.cost[j] -= cb * self.at(i, j);
                }
            }
        }
    }

    /// Appends a column given in tableau coordinates with its reduced cost.
    fn push_column(&mut self, entries: &[f64], reduced_cost: f64) {
        let old = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * (old + 1));
        for (row, &entry) in self.data.chunks_exact(old).zip(entries) {
            data.extend_from_slice(&row[..self.cols]);
            data.push(entry);
            data.push(row[self.cols]);
        }
        self.data = data;
        let z = self.cost[self.cols];
        self.cost[self.cols] = reduced_cost;
        self.cost.push(z);
        self.artificial.push(false);
        self.cols += 1;
    }

    fn bland_mode(&self) -> bool {
        match self.rule {
            PivotRule::Bland => true,
            PivotRule::Dantzig => false,
            PivotRule::DantzigBland => self.degenerate_streak >= DEGENERATE_STREAK,
        }
    }

    fn entering(&self, allow_artificial: bool) -> Option<usize> {
        let mut candidates =
            (0..self.cols).filter(|&j| (allow_artificial || !self.artificial[j]) && self.cost[j] < -LP_OPTIMALITY);
        if self.bland_mode() {
            candidates.next()
        } else {
            candidates.min_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]))
        }
    }

    fn leaving(&self, q: usize) -> Option<usize> {
        if self.bland_mode() {
            self.leaving_bland(q)
        } else {
            self.leaving_harris(q)
        }
    }

    /// Two-pass ratio test: among rows whose ratio is within a small relaxation
    /// of the minimum, take the largest pivot element.
    fn leaving_harris(&self, q: usize) -> Option<usize> {
        const RELAX: f64 = 1e-11;
        let mut bound = f64::INFINITY;
        for i in 0..self.rows {
            let a = self.at(i, q);
            if a > LP_PIVOT {
                bound = bound.min((self.rhs(i).max(0.0) + RELAX) / a);
            }
        }
        if bound.is_infinite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, q);
            if a > LP_PIVOT && self.rhs(i).max(0.0) / a <= bound && best.is_none_or(|(_, ba)| a > ba) {
                best = Some((i, a));
            }
        }
        best.map(|(i, _)| i)
    }

    fn leaving_bland(&self, q: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, q);
            if a > LP_PIVOT {
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12
                            || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        best.map(|(i, _)| i)
    }

    /// Pivots until optimal. `Err(q)` reports an unbounded entering column.
    fn optimize(&mut self, allow_artificial: bool) -> Result<Result<(), usize>, LpError> {
        self.degenerate_streak = 0;
        while let Some(q) = self.entering(allow_artificial) {
            if self.pivots >= self.max_pivots {
                return Err(LpError::IterationLimit(self.max_pivots));
            }
            match self.leaving(q) {
                Some(p) => {
                    if self.rhs(p) <= 1e-12 {
                        self.degenerate_streak += 1;
                    } else {
                        self.degenerate_streak = 0;
                    }
                    self.pivot(p, q)
                }
                None => return Ok(Err(q)),
            }
        }
        Ok(Ok(()))
    }
}

/// An optimal tableau together with the map back to the caller's variables.
#[derive(Debug, Clone)]
struct Engine {
    t: Tableau,
    // internal column(s) of original variable j: (plus, Some(minus)) for free vars
    var_cols: Vec<(usize, Option<usize>)>,
    // identity column per internal row
    identity: Vec<usize>,
    // +1 or −1: whether the internal row was negated
    row_sign: Vec<f64>,
    // phase-two costs of the internal minimisation
    c2: Vec<f64>,
    // +1 to minimise, −1 to maximise
    sign: f64,
    objective: Vec<f64>,
    constraint_rows: usize,
}

impl Engine {
    fn solve(lp: &StandardLp, rule: PivotRule) -> Result<Self, LpError> {
        lp.validate()?;
        let n = lp.num_vars();

        // structural columns
        let mut var_cols = Vec::with_capacity(n);
        let mut ncols = 0;
        for &(lo, _) in &lp.variable_bounds {
            if lo == 0.0 {
                var_cols.push((ncols, None));
                ncols += 1;
            } else {
                var_cols.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
        let structural = ncols;

        // internal rows: (dense coefficients over structural columns, kind, rhs)
        let mut rows: Vec<(Vec<f64>, RowKind, f64)> = Vec::new();
        let expand = |coeffs: &[f64]| {
            let mut r = vec![0.0; structural];
            for (j, &a) in coeffs.iter().enumerate() {
                let (p, m) = var_cols[j];
                r[p] = a;
                if let Some(m) = m {
                    r[m] = -a;
                }
            }
            r
        };
        for i in 0..lp.num_rows() {
            rows.push((expand(&lp.constraint_matrix[i]), lp.row_kinds[i], lp.rhs[i]));
        }
        for (j, &(_, hi)) in lp.variable_bounds.iter().enumerate() {
            if hi.is_finite() {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                rows.push((expand(&e), RowKind::Le, hi));
            }
        }
        let nrows = rows.len();

        // slack columns for inequality rows, then artificials
        let mut row_sign = vec![1.0; nrows];
        let mut slack_of = vec![None; nrows];
        let mut needs_artificial = vec![false; nrows];
        for (i, (_, kind, b)) in rows.iter().enumerate() {
            if *b < 0.0 {
                row_sign[i] = -1.0;
            }
            match kind {
                RowKind::Le => {
                    slack_of[i] = Some(ncols);
                    ncols += 1;
                    // a negated ≤ row becomes ≥ and its surplus is not an identity column
                    needs_artificial[i] = row_sign[i] < 0.0;
                }
                RowKind::Eq => needs_artificial[i] = true,
            }
        }
        let first_artificial = ncols;
        let mut identity = vec![0; nrows];
        for i in 0..nrows {
            if needs_artificial[i] {
                identity[i] = ncols;
                ncols += 1;
            } else {
                identity[i] = slack_of[i].expect("slack on ≤ row");
            }
        }

        let w = ncols + 1;
        let mut data = vec![0.0; nrows * w];
        for (i, (coeffs, _, b)) in rows.iter().enumerate() {
            let s = row_sign[i];
            let row = &mut data[i * w..(i + 1) * w];
            for (v, a) in row.iter_mut().zip(coeffs) {
                *v = s * a;
            }
            if let Some(sl) = slack_of[i] {
                row[sl] = s;
            }
            if needs_artificial[i] {
                row[identity[i]] = 1.0;
            }
            row[ncols] = s * b;
        }

        let t = Tableau {
            rows: nrows,
            cols: ncols,
            data,
            cost: Vec::new(),
            basis: identity.clone(),
            artificial: (0..ncols).map(|j| j >= first_artificial).collect(),
            pivots: 0,
            max_pivots: 50_000 + 50 * (nrows + ncols),
            rule,
            degenerate_streak: 0,
        };
        let sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut engine = Engine {
            t,
            var_cols,
            identity,
            row_sign,
            c2: Vec::new(),
            sign,
            objective: lp.objective.clone(),
            constraint_rows: lp.num_rows(),
        };

        if ncols > first_artificial {
            engine.phase_one(lp, first_artificial)?;
        }

        let mut c2 = vec![0.0; ncols];
        for (j, &(p, m)) in engine.var_cols.iter().enumerate() {
            c2[p] = sign * lp.objective[j];
            if let Some(m) = m {
                c2[m] = -sign * lp.objective[j];
            }
        }
        engine.t.set_costs(&c2);
        engine.c2 = c2;
        engine.phase_two()?;
        Ok(engine)
    }

    fn phase_one(&mut self, lp: &StandardLp, first_artificial: usize) -> Result<(), LpError> {
        let ncols = self.t.cols;
        let mut c1 = vec![0.0; ncols];
        c1[first_artificial..].iter_mut().for_each(|v| *v = 1.0);
        self.t.set_costs(&c1);
        if self.t.optimize(true)?.is_err() {
            // phase one is bounded below by zero
            return Err(LpError::Malformed("phase one reported unbounded".into()));
        }
        let residual = -self.t.cost[ncols];
        let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if residual > LP_FEASIBILITY * scale {
            let certificate = (0..lp.num_rows())
                .map(|i| self.row_sign[i] * (c1[self.identity[i]] - self.t.cost[self.identity[i]]))
                .collect();
            return Err(LpError::Infeasible { residual, certificate });
        }
        self.drive_out_artificials();
        Ok(())
    }

    /// Replaces zero-level basic artificials by structural columns where possible.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.t.rows {
            if self.t.artificial[self.t.basis[i]] {
                if let Some(q) = (0..self.t.cols).find(|&j| !self.t.artificial[j] && self.t.at(i, j).abs() > LP_PIVOT) {
                    self.t.pivot(i, q);
                }
            }
        }
    }

    fn phase_two(&mut self) -> Result<(), LpError> {
        if let Err(q) = self.t.optimize(false)? {
            let mut dir = vec![0.0; self.t.cols];
            dir[q] = 1.0;
            for i in 0..self.t.rows {
                dir[self.t.basis[i]] -= self.t.at(i, q);
            }
            let direction = self
                .var_cols
                .iter()
                .map(|&(p, m)| dir[p] - m.map_or(0.0, |m| dir[m]))
                .collect();
            return Err(LpError::Unbounded { direction });
        }
        Ok(())
    }

    /// Adds a non-negative variable with constraint coefficients `coeffs`
    /// (one per constraint row) and objective coefficient `obj`. The tableau
    /// stays primal feasible; call [`Engine::phase_two`] to re-optimise.
    fn add_variable(&mut self, coeffs: &[f64], obj: f64) {
        let rows = self.t.rows;
        let mut internal = vec![0.0; rows];
        for (i, &a) in coeffs.iter().enumerate() {
            internal[i] = self.row_sign[i] * a;
        }
        let mut entries = vec![0.0; rows];
        let mut reduced = self.sign * obj;
        for (i, &a) in internal.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let col = self.identity[i];
            for (r, e) in entries.iter_mut().enumerate() {
                *e += a * self.t.at(r, col);
            }
            reduced -= (self.c2[col] - self.t.cost[col]) * a;
        }
        self.t.push_column(&entries, reduced);
        let q = self.t.cols - 1;
        self.c2.push(self.sign * obj);
        self.var_cols.push((q, None));
        self.objective.push(obj);
        for i in 0..rows {
            if self.t.artificial[self.t.basis[i]] && self.t.at(i, q).abs() > LP_PIVOT {
                self.t.pivot(i, q);
            }
        }
    }

    fn solution(&self) -> LpSolution {
        let mut values = vec![0.0; self.t.cols];
        for i in 0..self.t.rows {
            values[self.t.basis[i]] = self.t.rhs(i);
        }
        let x: Vec<f64> = self
            .var_cols
            .iter()
            .map(|&(p, m)| values[p] - m.map_or(0.0, |m| values[m]))
            .collect();
        let value = dot(&self.objective, &x);
        let duals = (0..self.constraint_rows)
            .map(|i| {
                let col = self.identity[i];
                // y_i = c_col − r_col for the internal (minimising, sign-normalised) row
                self.sign * self.row_sign[i] * (self.c2[col] - self.t.cost[col])
            })
            .collect();
        LpSolution { x, value, duals }
    }
}

/// Solves `lp` with [`PivotRule::DantzigBland`].
pub fn solve_lp(lp: &StandardLp) -> Result<LpSolution, LpError> {
    solve_lp_with(lp, PivotRule::default())
}

pub fn solve_lp_with(lp: &StandardLp, rule: PivotRule) -> Result<LpSolution, LpError> {
    Ok(Engine::solve(lp, rule)?.solution())
}

/// Which LP is handed to the simplex for the edge-minimisation problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMinForm {
    /// `min γ` over `(d, γ)` with `(dᵀA)_k ≤ γ`; `t + 1` rows plus `m` cap rows.
    Edge,
    /// `max ρ − (1/ν)Σξ` over `(ρ, ξ, w)` with `(Aw)_i ≥ ρ − ξ_i`; `m + 1` rows.
    SoftMargin,
}

impl EdgeMinForm {
    /// The form with fewer tableau rows.
    pub fn smaller(m: usize, t: usize) -> Self {
        if t + m + 1 < m + 1 {
            EdgeMinForm::Edge
        } else {
            EdgeMinForm::SoftMargin
        }
    }
}

/// Optimal pair of the restricted edge-minimisation LP and its dual.
#[derive(Debug, Clone)]
pub struct EdgeMinSolution {
    pub d: Distribution,
    /// `max_k (dᵀA)_k` at `d`.
    pub gamma: f64,
    pub w: EnsembleWeights,
    /// `min_{d' ∈ Δ_ν} d'ᵀAw` at `w`.
    pub rho: f64,
}

/// `min_{d ∈ Δ_ν} max_k (dᵀA)_k` over the discovered columns, with its dual weights.
pub fn solve_edge_min<H>(a: &GainMatrix<H>, nu: f64) -> crate::Result<EdgeMinSolution> {
    solve_edge_min_with(a, nu, EdgeMinForm::smaller(a.rows(), a.num_columns()))
}

pub fn solve_edge_min_with<H>(
    a: &GainMatrix<H>,
    nu: f64,
    form: EdgeMinForm,
) -> crate::Result<EdgeMinSolution> {
    let m = a.rows();
    let t = a.num_columns();
    check_nu(m, nu)?;
    if t == 0 {
        return Err(crate::Error::Structural("edge minimisation needs a column".into()));
    }
    match form {
        EdgeMinForm::Edge => {
            // variables: d_0..d_{m-1}, γ
            let mut obj = vec![0.0; m + 1];
            obj[m] = 1.0;
            let mut lp = StandardLp::new(Sense::Minimize, obj);
            for i in 0..m {
                lp.set_bounds(i, 0.0, 1.0 / nu);
            }
            lp.set_bounds(m, f64::NEG_INFINITY, f64::INFINITY);
            for c in a.columns() {
                let mut row = c.clone();
                row.push(-1.0);
                lp.add_row(row, RowKind::Le, 0.0);
            }
            let mut ones = vec![1.0; m + 1];
            ones[m] = 0.0;
            lp.add_row(ones, RowKind::Eq, 1.0);
            let sol = solve_lp(&lp)?;
            // duals of `≤` rows in a minimisation are non-positive
            let w: Vec<f64> = sol.duals[..t].iter().map(|y| -y).collect();
            assemble(a, nu, sol.x[..m].to_vec(), w)
        }
        EdgeMinForm::SoftMargin => RestrictedMaster::new(a, nu)?.solution(a),
    }
}

fn assemble<H>(a: &GainMatrix<H>, nu: f64, d_raw: Vec<f64>, w_raw: Vec<f64>) -> crate::Result<EdgeMinSolution> {
    let d = Distribution::from_solver(clip_and_normalize(d_raw)?);
    let w_dense = clip_and_normalize(w_raw)?;
    let w = EnsembleWeights::normalized(w_dense.into_iter().enumerate());
    let gamma = a
        .columns()
        .iter()
        .map(|c| dot(d.as_slice(), c))
        .fold(f64::NEG_INFINITY, f64::max);
    let aw = crate::model::margins(a, &w)?;
    let (rho, _) = capped_min_linear(&aw, nu)?;
    Ok(EdgeMinSolution { d, gamma, w, rho })
}

/// The soft-margin form of the edge-minimisation LP kept optimal as columns
/// arrive, for column generation.
///
/// Variables are ordered `ρ, ξ_0..ξ_{m−1}, w_0..`; rows `0..m` are the margin
/// constraints, whose duals form `d`, and row `m` is `Σw = 1`.
#[derive(Debug, Clone)]
pub struct RestrictedMaster {
    m: usize,
    nu: f64,
    engine: Engine,
    columns: usize,
    appended: usize,
}

/// Warm additions after which the tableau is rebuilt from the original data.
const REFRESH_AFTER: usize = 200;

/// Largest `|γ − ρ|` accepted from a warm solve before re-solving cold.
const WARM_GAP: f64 = 1e-9;

impl RestrictedMaster {
    pub fn new<H>(a: &GainMatrix<H>, nu: f64) -> crate::Result<Self> {
        let m = a.rows();
        let t = a.num_columns();
        check_nu(m, nu)?;
        if t == 0 {
            return Err(crate::Error::Structural("edge minimisation needs a column".into()));
        }
        let n = 1 + m + t;
        let mut obj = vec![0.0; n];
        obj[0] = 1.0;
        obj[1..=m].iter_mut().for_each(|v| *v = -1.0 / nu);
        let mut lp = StandardLp::new(Sense::Maximize, obj);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..m {
            let mut row = vec![0.0; n];
            row[0] = 1.0;
            row[1 + i] = -1.0;
            for (k, c) in a.columns().iter().enumerate() {
                row[1 + m + k] = -c[i];
            }
            lp.add_row(row, RowKind::Le, 0.0);
        }
        let mut ones = vec![0.0; n];
        ones[1 + m..].iter_mut().for_each(|v| *v = 1.0);
        lp.add_row(ones, RowKind::Eq, 1.0);
        Ok(Self {
            m,
            nu,
            engine: Engine::solve(&lp, PivotRule::default())?,
            columns: t,
            appended: 0,
        })
    }

    pub fn num_columns(&self) -> usize {
        self.columns
    }

    /// Prices in the columns of `a` not seen yet and re-optimises.
    ///
    /// `a` must extend the matrix this master was built from. A warm solution
    /// that fails the duality check is replaced by a cold solve.
    pub fn sync<H>(&mut self, a: &GainMatrix<H>) -> crate::Result<EdgeMinSolution> {
        if a.rows() != self.m || a.num_columns() < self.columns {
            return Err(crate::Error::Structural("gain matrix does not extend the master".into()));
        }
        if self.appended + a.num_columns() - self.columns > REFRESH_AFTER {
            *self = Self::new(a, self.nu)?;
            return self.solution(a);
        }
        let mut coeffs = vec![0.0; self.m + 1];
        coeffs[self.m] = 1.0;
        for k in self.columns..a.num_columns() {
            for (c, &v) in coeffs.iter_mut().zip(a.column(k)) {
                *c = -v;
            }
            self.engine.add_variable(&coeffs, 0.0);
            self.appended += 1;
        }
        self.columns = a.num_columns();
        let warm = self
            .engine
            .phase_two()
            .map_err(crate::Error::from)
            .and_then(|_| self.solution(a));
        match warm {
            Ok(sol) if (sol.gamma - sol.rho).abs() <= WARM_GAP => Ok(sol),
            _ => {
                *self = Self::new(a, self.nu)?;
                self.solution(a)
            }
        }
    }

    /// Reads the current optimal pair off the tableau.
    pub fn solution<H>(&self, a: &GainMatrix<H>) -> crate::Result<EdgeMinSolution> {
        let sol = self.engine.solution();
        let m = self.m;
        assemble(a, self.nu, sol.duals[..m].to_vec(), sol.x[1 + m..1 + m + self.columns].to_vec())
    }
}

fn clip_and_normalize(mut v: Vec<f64>) -> Result<Vec<f64>, LpError> {
    for (i, x) in v.iter_mut().enumerate() {
        // `<=` also folds −0 into +0
        if *x <= 0.0 {
            if *x < -DUAL_CLIP {
                return Err(LpError::NegativeDual { row: i, value: *x });
            }
            *x = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    if s <= 0.0 {
        return Err(LpError::Malformed("multipliers vanish".into()));
    }
    v.iter_mut().for_each(|x| *x /= s);
    Ok(v)
}
