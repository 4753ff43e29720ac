//! Weak learners: decision stumps and an exhaustive column oracle.
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{edges, Dataset, Distribution, GainMatrix};

/// Answer of a weak learner to a distribution.
#[derive(Debug, Clone)]
pub struct WeakResponse<H> {
    pub hypothesis: H,
    /// `Σ d_i y_i h(x_i)`
    pub edge: f64,
    /// `y_i h(x_i)` for every example.
    pub column: Vec<f64>,
}

/// Anything that returns a (hopefully edge-maximising) hypothesis for a distribution.
pub trait WeakLearner {
    type Hypothesis: Clone;

    fn num_examples(&self) -> usize;

    fn best_response(&self, d: &Distribution) -> Result<WeakResponse<Self::Hypothesis>>;

    /// Feature count the hypotheses are defined on, when there is one.
    fn input_width(&self) -> Option<usize> {
        None
    }
}

/// `x ↦ polarity` if `x[feature] ≥ threshold`, otherwise `−polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StumpHypothesis {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: i8,
}

impl StumpHypothesis {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let p = f64::from(self.polarity);
        if x[self.feature] >= self.threshold {
            p
        } else {
            -p
        }
    }

    pub fn gain_column(&self, data: &Dataset) -> Vec<f64> {
        (0..data.len())
            .map(|i| data.label(i) * self.predict(data.row(i)))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct FeatureIndex {
    // example indices sorted by feature value
    order: Vec<usize>,
    // order[bounds[r]..bounds[r + 1]] share the r-th distinct value
    bounds: Vec<usize>,
    // thresholds: below min, midpoints, above max
    thresholds: Vec<f64>,
}

/// Every stump over the dataset's features: per feature one threshold below
/// the minimum, one between each pair of consecutive distinct values and one
/// above the maximum, each with both polarities.
#[derive(Debug, Clone)]
pub struct StumpPool {
    features: Vec<FeatureIndex>,
}

impl StumpPool {
    pub fn new(data: &Dataset) -> Self {
        let features = (0..data.num_features())
            .map(|f| {
                let mut order: Vec<usize> = (0..data.len()).collect();
                order.sort_by(|&a, &b| {
                    data.value(a, f)
                        .total_cmp(&data.value(b, f))
                        .then(a.cmp(&b))
                });
                let mut bounds = vec![0];
                let mut distinct = vec![data.value(order[0], f)];
                for (k, &i) in order.iter().enumerate().skip(1) {
                    let v = data.value(i, f);
                    if v != *distinct.last().unwrap() {
                        bounds.push(k);
                        distinct.push(v);
                    }
                }
                bounds.push(order.len());
                let mut thresholds = Vec::with_capacity(distinct.len() + 1);
                thresholds.push(distinct[0] - 1.0);
                for w in distinct.windows(2) {
                    thresholds.push(0.5 * (w[0] + w[1]));
                }
                thresholds.push(distinct[distinct.len() - 1] + 1.0);
                FeatureIndex {
                    order,
                    bounds,
                    thresholds,
                }
            })
            .collect();
        Self { features }
    }

    pub fn len(&self) -> usize {
        self.features.iter().map(|f| 2 * f.thresholds.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Candidates in tie-breaking order: feature, threshold, polarity `+1` first.
    pub fn candidates(&self) -> impl Iterator<Item = StumpHypothesis> + '_ {
        self.features.iter().enumerate().flat_map(|(feature, fi)| {
            fi.thresholds.iter().flat_map(move |&threshold| {
                [1i8, -1].into_iter().map(move |polarity| StumpHypothesis {
                    feature,
                    threshold,
                    polarity,
                })
            })
        })
    }
}

/// Edge-maximising stump by a prefix-sum sweep over each presorted feature.
pub fn best_stump(
    data: &Dataset,
    d: &Distribution,
    pool: &StumpPool,
) -> Result<WeakResponse<StumpHypothesis>> {
    if pool.is_empty() {
        return Err(Error::Config("empty stump pool".into()));
    }
    if d.len() != data.len() {
        return Err(Error::Structural(format!(
            "distribution of length {} for {} examples",
            d.len(),
            data.len()
        )));
    }
    let dy: Vec<f64> = d
        .as_slice()
        .iter()
        .zip(data.labels())
        .map(|(d, y)| d * y)
        .collect();
    let total: f64 = dy.iter().sum();

    let mut best: Option<(StumpHypothesis, f64)> = None;
    for (feature, fi) in pool.features.iter().enumerate() {
        // mass of d·y strictly below the current threshold
        let mut below = 0.0;
        for (r, &threshold) in fi.thresholds.iter().enumerate() {
            if r > 0 {
                below += fi.order[fi.bounds[r - 1]..fi.bounds[r]]
                    .iter()
                    .map(|&i| dy[i])
                    .sum::<f64>();
            }
            let plus = total - 2.0 * below;
            for (polarity, edge) in [(1i8, plus), (-1, -plus)] {
                if best.as_ref().is_none_or(|(_, e)| edge > *e) {
                    best = Some((
                        StumpHypothesis {
                            feature,
                            threshold,
                            polarity,
                        },
                        edge,
                    ));
                }
            }
        }
    }
    let (hypothesis, edge) = best.expect("non-empty pool");
    Ok(WeakResponse {
        column: hypothesis.gain_column(data),
        hypothesis,
        edge,
    })
}

/// Stump learner over a fixed dataset.
#[derive(Debug, Clone)]
pub struct StumpLearner<'a> {
    data: &'a Dataset,
    pool: StumpPool,
}

impl<'a> StumpLearner<'a> {
    pub fn new(data: &'a Dataset) -> Self {
        Self {
            pool: StumpPool::new(data),
            data,
        }
    }

    pub fn pool(&self) -> &StumpPool {
        &self.pool
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }
}

impl WeakLearner for StumpLearner<'_> {
    type Hypothesis = StumpHypothesis;

    fn num_examples(&self) -> usize {
        self.data.len()
    }

    fn best_response(&self, d: &Distribution) -> Result<WeakResponse<StumpHypothesis>> {
        best_stump(self.data, d, &self.pool)
    }

    fn input_width(&self) -> Option<usize> {
        Some(self.data.num_features())
    }
}

/// Index of the column with the largest edge; ties go to the lowest index.
pub fn pool_oracle<H>(a_full: &GainMatrix<H>, d: &Distribution) -> Result<usize> {
    let e = edges(a_full, d)?;
    let mut best = 0;
    for (j, &v) in e.iter().enumerate() {
        if v > e[best] {
            best = j;
        }
    }
    if e.is_empty() {
        return Err(Error::Config("empty hypothesis pool".into()));
    }
    Ok(best)
}

/// Weak learner that scans a fully materialised gain matrix, i.e. an exact
/// max-edge oracle for a finite class.
#[derive(Debug, Clone)]
pub struct PoolOracle<H = usize> {
    full: GainMatrix<H>,
}

impl PoolOracle<usize> {
    /// Columns are identified by their position in `columns` (after deduplication
    /// the first occurrence wins).
    pub fn from_columns(m: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        let mut full = GainMatrix::new(m);
        for (j, c) in columns.into_iter().enumerate() {
            full.push(c, j)?;
        }
        Ok(Self { full })
    }
}

impl PoolOracle<StumpHypothesis> {
    /// Materialises every stump of the pool.
    pub fn from_stumps(data: &Dataset, pool: &StumpPool) -> Result<Self> {
        let mut full = GainMatrix::new(data.len());
        for h in pool.candidates() {
            full.push(h.gain_column(data), h)?;
        }
        Ok(Self { full })
    }
}

impl<H> PoolOracle<H> {
    pub fn matrix(&self) -> &GainMatrix<H> {
        &self.full
    }
}

impl<H: Clone> WeakLearner for PoolOracle<H> {
    type Hypothesis = H;

    fn num_examples(&self) -> usize {
        self.full.rows()
    }

    fn best_response(&self, d: &Distribution) -> Result<WeakResponse<H>> {
        let j = pool_oracle(&self.full, d)?;
        Ok(WeakResponse {
            hypothesis: self.full.hypothesis(j).clone(),
            edge: self.full.edge_of(j, d),
            column: self.full.column(j).to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[f64], labels: &[f64]) -> Dataset {
        Dataset::new(values.iter().map(|&v| vec![v]).collect(), labels.to_vec()).unwrap()
    }

    fn naive_scan(data: &Dataset, d: &Distribution, pool: &StumpPool) -> (StumpHypothesis, f64) {
        let mut best: Option<(StumpHypothesis, f64)> = None;
        for h in pool.candidates() {
            let e: f64 = (0..data.len())
                .map(|i| d.as_slice()[i] * data.label(i) * h.predict(data.row(i)))
                .sum();
            if best.is_none_or(|(_, b)| e > b) {
                best = Some((h, e));
            }
        }
        best.unwrap()
    }

    #[test]
    fn perfect_threshold_has_edge_one() {
        let data = line(&[0.1, 0.4, 0.5, 0.9], &[-1.0, -1.0, 1.0, 1.0]);
        let pool = StumpPool::new(&data);
        let r = best_stump(&data, &Distribution::uniform(4), &pool).unwrap();
        assert!((r.edge - 1.0).abs() < 1e-15);
        assert_eq!(r.hypothesis.polarity, 1);
        assert!((r.hypothesis.threshold - 0.45).abs() < 1e-15);
        assert_eq!(r.column, vec![1.0; 4]);
    }

    #[test]
    fn constant_stump_for_single_class() {
        let data = line(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]);
        let pool = StumpPool::new(&data);
        let r = best_stump(&data, &Distribution::uniform(3), &pool).unwrap();
        assert!((r.edge - 1.0).abs() < 1e-15);
        // lowest threshold wins the tie: the one below the minimum
        assert_eq!(r.hypothesis.threshold, 0.0);
    }

    #[test]
    fn pool_layout() {
        let data = line(&[1.0, 1.0, 2.0, 4.0], &[1.0, -1.0, 1.0, -1.0]);
        let pool = StumpPool::new(&data);
        let th: Vec<f64> = pool.candidates().map(|h| h.threshold).collect();
        assert_eq!(th, vec![0.0, 0.0, 1.5, 1.5, 3.0, 3.0, 5.0, 5.0]);
        assert_eq!(pool.len(), 8);
    }

    #[test]
    fn sweep_matches_naive_scan_small() {
        let data = Dataset::new(
            vec![
                vec![0.3, -1.0],
                vec![0.1, 2.0],
                vec![0.7, 0.5],
                vec![0.2, 0.5],
            ],
            vec![1.0, -1.0, 1.0, -1.0],
        )
        .unwrap();
        let d = Distribution::new(vec![0.1, 0.4, 0.2, 0.3], 1.0).unwrap();
        let pool = StumpPool::new(&data);
        let r = best_stump(&data, &d, &pool).unwrap();
        let (h, e) = naive_scan(&data, &d, &pool);
        assert!((r.edge - e).abs() < 1e-12);
        assert_eq!(r.hypothesis, h);
    }

    #[test]
    fn edge_equals_one_minus_twice_weighted_error() {
        let data = line(&[0.3, 0.1, 0.7, 0.2, 0.9], &[1.0, -1.0, -1.0, 1.0, 1.0]);
        let d = Distribution::new(vec![0.1, 0.3, 0.2, 0.25, 0.15], 1.0).unwrap();
        for h in StumpPool::new(&data).candidates() {
            let edge: f64 = h.gain_column(&data).iter().zip(d.as_slice()).map(|(a, b)| a * b).sum();
            let err: f64 = (0..5)
                .filter(|&i| h.predict(data.row(i)) != data.label(i))
                .map(|i| d.as_slice()[i])
                .sum();
            assert!((edge - (1.0 - 2.0 * err)).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_point_mass_picks_largest_row_entry() {
        let cols = vec![vec![0.2, -1.0], vec![0.9, 0.5], vec![-0.3, 1.0]];
        let a = GainMatrix::from_columns(2, cols).unwrap();
        let d = Distribution::new(vec![1.0, 0.0], 1.0).unwrap();
        assert_eq!(pool_oracle(&a, &d).unwrap(), 1);
        let d = Distribution::new(vec![0.0, 1.0], 1.0).unwrap();
        assert_eq!(pool_oracle(&a, &d).unwrap(), 2);
    }

    #[test]
    fn oracle_ties_go_low() {
        let oracle = PoolOracle::from_columns(
            2,
            vec![vec![0.0, 0.0], vec![1.0, -1.0], vec![-1.0, 1.0]],
        )
        .unwrap();
        let r = oracle.best_response(&Distribution::uniform(2)).unwrap();
        assert_eq!(r.hypothesis, 0);
    }
}
