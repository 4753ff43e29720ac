//! Datasets, the gain matrix and points of the two simplices.
use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::tolerance::{CAP_SLACK, ENTROPY_ZERO, SIMPLEX_SUM, SUPPORT_DROP};

/// Labelled examples with dense real features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<f64>,
    m: usize,
    p: usize,
}

impl Dataset {
    /// Builds a dataset from rows of features and `±1` labels.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Input("dataset has no examples".into()));
        }
        if labels.len() != m {
            return Err(Error::Structural(format!(
                "{} feature rows but {} labels",
                m,
                labels.len()
            )));
        }
        let p = rows[0].len();
        if p == 0 {
            return Err(Error::Input("dataset has no features".into()));
        }
        let mut features = Vec::with_capacity(m * p);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(Error::Structural(format!(
                    "row {} has {} features, expected {}",
                    i,
                    row.len(),
                    p
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Input(format!("row {} has non-finite feature {}", i, v)));
            }
            features.extend(row);
        }
        if let Some((i, y)) = labels.iter().enumerate().find(|(_, &y)| y != 1.0 && y != -1.0) {
            return Err(Error::Input(format!("label {} at row {} is not ±1", y, i)));
        }
        Ok(Self { features, labels, m, p })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn num_features(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    pub fn value(&self, i: usize, feature: usize) -> f64 {
        self.features[i * self.p + feature]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Same features with every label negated.
    pub fn flipped(&self) -> Self {
        Self {
            features: self.features.clone(),
            labels: self.labels.iter().map(|y| -y).collect(),
            m: self.m,
            p: self.p,
        }
    }
}

/// Columns `y_i h_j(x_i)` of the hypotheses discovered so far, in discovery
/// order. Identical columns are stored once.
#[derive(Debug, Clone)]
pub struct GainMatrix<H = ()> {
    m: usize,
    columns: Vec<Vec<f64>>,
    hypothesis_ids: Vec<H>,
    index: HashMap<Vec<u64>, usize>,
}

fn column_key(column: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 must hash alike
    column.iter().map(|v| (v + 0.0).to_bits()).collect()
}

impl<H> GainMatrix<H> {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            columns: Vec::new(),
            hypothesis_ids: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Appends a column unless an identical one is already present.
    ///
    /// Returns the column's index and whether it was newly inserted.
    pub fn push(&mut self, column: Vec<f64>, id: H) -> Result<(usize, bool)> {
        if column.len() != self.m {
            return Err(Error::Structural(format!(
                "column of length {} pushed into a gain matrix with {} rows",
                column.len(),
                self.m
            )));
        }
        if let Some(v) = column.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::Input(format!("gain entry {} outside [-1, 1]", v)));
        }
        let key = column_key(&column);
        if let Some(&j) = self.index.get(&key) {
            return Ok((j, false));
        }
        let j = self.columns.len();
        self.index.insert(key, j);
        self.columns.push(column);
        self.hypothesis_ids.push(id);
        Ok((j, true))
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn hypothesis(&self, j: usize) -> &H {
        &self.hypothesis_ids[j]
    }

    pub fn hypotheses(&self) -> &[H] {
        &self.hypothesis_ids
    }

    /// Edge `(dᵀA)_j` of a single column.
    pub fn edge_of(&self, j: usize, d: &Distribution) -> f64 {
        dot(d.as_slice(), &self.columns[j])
    }
}

impl GainMatrix<()> {
    /// Builds an anonymous gain matrix from columns, keeping duplicates out.
    pub fn from_columns(m: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        let mut a = Self::new(m);
        for c in columns {
            a.push(c, ())?;
        }
        Ok(a)
    }
}

/// Parameters of the capped simplex and the entropy smoothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapParams {
    pub nu: f64,
    pub m: usize,
    pub eta: f64,
    pub eps: f64,
}

/// Smallest smoothing parameter used when `ν = m` makes `ln(m/ν)` vanish.
pub const ETA_FLOOR: f64 = 1e-6;

impl CapParams {
    /// `η = 2 ln(m/ν) / ε`, the choice that keeps the entropy term within `ε/2`.
    pub fn new(m: usize, nu: f64, eps: f64) -> Result<Self> {
        check_nu(m, nu)?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", eps)));
        }
        let eta = (2.0 * (m as f64 / nu).ln() / eps).max(ETA_FLOOR);
        Ok(Self { nu, m, eta, eps })
    }

    /// Explicit smoothing parameter; `eps` is set to the tolerance it implies.
    pub fn with_eta(m: usize, nu: f64, eta: f64) -> Result<Self> {
        check_nu(m, nu)?;
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {}", eta)));
        }
        let eps = 2.0 * (m as f64 / nu).ln() / eta;
        Ok(Self { nu, m, eta, eps })
    }

    pub fn cap(&self) -> f64 {
        1.0 / self.nu
    }
}

pub(crate) fn check_nu(m: usize, nu: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Config("no examples".into()));
    }
    if !(nu >= 1.0 && nu <= m as f64) {
        return Err(Error::Config(format!("nu = {} outside [1, {}]", nu, m)));
    }
    Ok(())
}

/// A point of the capped probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validates membership in the simplex capped at `1/nu`.
    pub fn new(weights: Vec<f64>, nu: f64) -> Result<Self> {
        let cap = 1.0 / nu + CAP_SLACK;
        if let Some((i, v)) = weights
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= 0.0 && v <= cap))
        {
            return Err(Error::Input(format!("d[{}] = {} outside [0, 1/nu]", i, v)));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_SUM {
            return Err(Error::Input(format!("distribution sums to {}", s)));
        }
        Ok(Self { weights })
    }

    pub fn uniform(m: usize) -> Self {
        Self {
            weights: vec![1.0 / m as f64; m],
        }
    }

    /// Wraps weights produced by a solver that already guarantees membership.
    pub(crate) fn from_solver(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }
}

/// Sparse point of the simplex over discovered columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnsembleWeights {
    coeffs: BTreeMap<usize, f64>,
}

impl EnsembleWeights {
    pub fn point_mass(j: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(j, 1.0);
        Self { coeffs }
    }

    /// Validating constructor from `(column, coefficient)` pairs.
    pub fn new(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (j, v) in pairs {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("weight {} on column {} is not positive", v, j)));
            }
            *coeffs.entry(j).or_insert(0.0) += v;
        }
        let s: f64 = coeffs.values().sum();
        if (s - 1.0).abs() > SIMPLEX_SUM {
            return Err(Error::Input(format!("weights sum to {}", s)));
        }
        Ok(Self { coeffs })
    }

    /// Drops coefficients below the support threshold and rescales to sum one.
    ///
    /// Panics if nothing survives; callers only pass convex combinations.
    pub(crate) fn normalized(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut coeffs: BTreeMap<usize, f64> = BTreeMap::new();
        for (j, v) in pairs {
            *coeffs.entry(j).or_insert(0.0) += v;
        }
        coeffs.retain(|_, v| *v > SUPPORT_DROP);
        let s: f64 = coeffs.values().sum();
        assert!(s > 0.0, "empty support after normalisation");
        coeffs.values_mut().for_each(|v| *v /= s);
        Self { coeffs }
    }

    /// Uniform weights over the given columns.
    pub fn uniform_over(columns: impl IntoIterator<Item = usize>) -> Self {
        Self::normalized(columns.into_iter().map(|j| (j, 1.0)))
    }

    pub fn get(&self, j: usize) -> f64 {
        self.coeffs.get(&j).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&j, &v)| (j, v))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Dense vector of length `n`.
    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for (j, v) in self.iter() {
            w[j] = v;
        }
        w
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Aw`: the margin of every example under the combined hypothesis.
pub fn margins<H>(a: &GainMatrix<H>, w: &EnsembleWeights) -> Result<Vec<f64>> {
    let mut out = vec![0.0; a.rows()];
    for (j, v) in w.iter() {
        if j >= a.num_columns() {
            return Err(Error::Structural(format!(
                "weight on column {} but the gain matrix has {}",
                j,
                a.num_columns()
            )));
        }
        for (o, c) in out.iter_mut().zip(a.column(j)) {
            *o += v * c;
        }
    }
    Ok(out)
}

/// `dᵀA`: the edge of every discovered column.
pub fn edges<H>(a: &GainMatrix<H>, d: &Distribution) -> Result<Vec<f64>> {
    if d.len() != a.rows() {
        return Err(Error::Structural(format!(
            "distribution of length {} against {} rows",
            d.len(),
            a.rows()
        )));
    }
    Ok(a.columns().iter().map(|c| dot(d.as_slice(), c)).collect())
}

/// `Σ d_i ln d_i + ln m`, the relative entropy from the uniform distribution.
pub fn relative_entropy(d: &Distribution) -> f64 {
    let m = d.len() as f64;
    let neg: f64 = d
        .as_slice()
        .iter()
        .filter(|&&v| v > ENTROPY_ZERO)
        .map(|&v| v * v.ln())
        .sum();
    // rounding can push the uniform case a hair below zero
    (neg + m.ln()).max(0.0)
}
