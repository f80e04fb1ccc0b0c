//! Community scores, elbow thresholding and the principal embedding.
//!
//! For every community `k` the score compares how the class means of column
//! `k` spread across classes against the largest within-class deviation:
//!
//! ```text
//! score(k) = (max_l mean(k|l) - min_l mean(k|l)) / max_l sd(k|l)
//! ```
//!
//! where `mean(k|l)` and `sd(k|l)` run over vertices with known label `l`.
//! Communities scoring above a threshold are principal; the threshold is the
//! larger of a profile-likelihood elbow of the sorted scores and a fixed floor.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::encoder::{embed, normalize_rows, Embedding};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labels::LabelVector;

/// Floor applied to the elbow threshold.
pub const DEFAULT_FLOOR: f64 = 0.7;
/// Which elbow of the sorted scores sets the data-driven threshold.
pub const DEFAULT_ELBOW: usize = 3;
/// Lower bound on the pooled variance inside the profile likelihood.
pub const PROFILE_VARIANCE_FLOOR: f64 = 1e-12;

/// How the within-class variance of a column is estimated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceEstimator {
    /// `sum(z^2) / (n_l - 1) - mean^2`, clamped at zero.
    #[default]
    Moment,
    /// `(sum(z^2) - n_l * mean^2) / (n_l - 1)`.
    Unbiased,
}

/// What to do with a class that has fewer than two known vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallClassPolicy {
    #[default]
    Error,
    /// Leave the class out of every mean/max/min and score its column 0.
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdRule {
    /// `max(elbow-th elbow, floor)`.
    Elbow { elbow: usize, floor: f64 },
    /// A fixed threshold; the elbow is still computed and reported.
    Fixed(f64),
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::Elbow {
            elbow: DEFAULT_ELBOW,
            floor: DEFAULT_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PrincipalConfig {
    pub threshold: ThresholdRule,
    pub estimator: VarianceEstimator,
    pub small_classes: SmallClassPolicy,
}

/// Per-community statistics before thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityScores {
    /// Score per community, index `k - 1`.
    pub lambda_hat: Vec<f64>,
    /// `mu_hat[[k - 1, l - 1]]` is the mean of column `k` over class `l`.
    /// NaN for classes left out of the statistics.
    pub mu_hat: Array2<f64>,
    /// Same layout as `mu_hat`, holding standard deviations.
    pub sigma_hat: Array2<f64>,
    /// Classes that entered the statistics.
    pub scored_classes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Cumulative elbow positions found in the sorted scores.
    pub elbows: Vec<usize>,
    pub epsilon_elbow: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityScoreReport {
    pub lambda_hat: Vec<f64>,
    pub mu_hat: Array2<f64>,
    pub sigma_hat: Array2<f64>,
    pub elbows: Vec<usize>,
    pub epsilon_elbow: f64,
    pub epsilon: f64,
    /// Communities with score strictly above `epsilon`, ascending.
    pub principal_set: Vec<usize>,
    /// Set when no community passed the threshold and the full embedding was
    /// returned in place of the principal one.
    pub fell_back: bool,
}

impl CommunityScoreReport {
    pub fn num_communities(&self) -> usize {
        self.lambda_hat.len()
    }

    pub fn is_principal(&self, community: usize) -> bool {
        self.principal_set.binary_search(&community).is_ok()
    }
}

pub fn community_scores(
    z: &Embedding,
    y: &LabelVector,
    estimator: VarianceEstimator,
    small_classes: SmallClassPolicy,
) -> Result<CommunityScores> {
    if z.n() != y.len() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: z.n(),
        });
    }
    let k = y.num_classes();
    if z.dim() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: z.dim(),
        });
    }

    let mut scored = Vec::new();
    for l in 1..=k {
        let count = y.class_count(l);
        if count >= 2 {
            scored.push(l);
        } else if small_classes == SmallClassPolicy::Error {
            return Err(Error::ClassTooSmall {
                class: l,
                count,
                required: 2,
            });
        }
    }

    // sums[[l - 1, c]] and squares[[l - 1, c]] over vertices of class l
    let mut sums = Array2::<f64>::zeros((k, k));
    let mut squares = Array2::<f64>::zeros((k, k));
    let values = z.values();
    for v in 0..y.len() {
        let l = y.get(v);
        if l == 0 {
            continue;
        }
        let row = values.row(v);
        let mut s = sums.row_mut(l - 1);
        s += &row;
        let mut q = squares.row_mut(l - 1);
        q.zip_mut_with(&row, |acc, &x| *acc += x * x);
    }

    let mut mu_hat = Array2::from_elem((k, k), f64::NAN);
    let mut sigma_hat = Array2::from_elem((k, k), f64::NAN);
    for &l in &scored {
        let n_l = y.class_count(l) as f64;
        for c in 0..k {
            let mean = sums[[l - 1, c]] / n_l;
            let sq = squares[[l - 1, c]];
            let var = match estimator {
                VarianceEstimator::Moment => sq / (n_l - 1.0) - mean * mean,
                VarianceEstimator::Unbiased => (sq - n_l * mean * mean) / (n_l - 1.0),
            };
            mu_hat[[c, l - 1]] = mean;
            sigma_hat[[c, l - 1]] = var.max(0.0).sqrt();
        }
    }

    let lambda_hat = (0..k)
        .map(|c| {
            if !scored.contains(&(c + 1)) || scored.is_empty() {
                return 0.0;
            }
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            let mut spread = 0.0f64;
            for &l in &scored {
                hi = hi.max(mu_hat[[c, l - 1]]);
                lo = lo.min(mu_hat[[c, l - 1]]);
                spread = spread.max(sigma_hat[[c, l - 1]]);
            }
            let numerator = hi - lo;
            if spread > 0.0 {
                numerator / spread
            } else if numerator > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();

    Ok(CommunityScores {
        lambda_hat,
        mu_hat,
        sigma_hat,
        scored_classes: scored,
    })
}

/// Two-group Gaussian profile log-likelihood of splitting `values` after the
/// first `q` entries, with separate means and a common MLE variance.
pub fn profile_log_likelihood(values: &[f64], q: usize) -> f64 {
    let p = values.len() as f64;
    let (head, tail) = values.split_at(q);
    let ss = sum_sq_dev(head) + sum_sq_dev(tail);
    let var = (ss / p).max(PROFILE_VARIANCE_FLOOR);
    -0.5 * p * (2.0 * std::f64::consts::PI * var).ln() - ss / (2.0 * var)
}

fn sum_sq_dev(xs: &[f64]) -> f64 {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum()
}

/// Size of the leading group that maximizes the profile likelihood, in
/// `1..values.len()`. Ties go to the smallest size.
pub fn profile_likelihood_elbow(values: &[f64]) -> Result<usize> {
    if values.len() < 2 {
        return Err(Error::TooFewValues {
            required: 2,
            got: values.len(),
        });
    }
    let mut best = (1, profile_log_likelihood(values, 1));
    for q in 2..values.len() {
        let ll = profile_log_likelihood(values, q);
        if ll > best.1 {
            best = (q, ll);
        }
    }
    Ok(best.0)
}

/// Up to `count` successive elbows of a descending vector, each found in the
/// suffix after the previous one. Positions are cumulative.
pub fn successive_elbows(sorted_desc: &[f64], count: usize) -> Vec<usize> {
    let mut elbows = Vec::with_capacity(count);
    let mut start = 0;
    for _ in 0..count {
        let suffix = &sorted_desc[start..];
        let Ok(q) = profile_likelihood_elbow(suffix) else {
            break;
        };
        start += q;
        elbows.push(start);
    }
    elbows
}

/// Threshold from the `elbow`-th elbow of the scores, floored at `floor`.
///
/// The data-driven part is the score ranked right after the deepest elbow
/// cut, so every community above the cut exceeds it strictly. Infinite
/// scores are left out of the elbow search.
pub fn elbow_threshold(lambda_hat: &[f64], elbow: usize, floor: f64) -> Threshold {
    let mut sorted: Vec<f64> = lambda_hat
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let elbows = successive_elbows(&sorted, elbow);
    let epsilon_elbow = match elbows.last() {
        Some(&cut) if cut < sorted.len() => sorted[cut],
        _ => 0.0,
    };
    Threshold {
        elbows,
        epsilon_elbow,
        epsilon: epsilon_elbow.max(floor),
    }
}

pub fn third_elbow_threshold(lambda_hat: &[f64]) -> Threshold {
    elbow_threshold(lambda_hat, DEFAULT_ELBOW, DEFAULT_FLOOR)
}

/// Communities with score strictly above `epsilon`, ascending.
pub fn principal_set(lambda_hat: &[f64], epsilon: f64) -> Vec<usize> {
    lambda_hat
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > epsilon)
        .map(|(c, _)| c + 1)
        .collect()
}

/// Scores plus threshold for a normalized embedding.
pub fn score_report(
    z: &Embedding,
    y: &LabelVector,
    config: &PrincipalConfig,
) -> Result<CommunityScoreReport> {
    let scores = community_scores(z, y, config.estimator, config.small_classes)?;
    let (elbow, floor) = match config.threshold {
        ThresholdRule::Elbow { elbow, floor } => (elbow, floor),
        ThresholdRule::Fixed(_) => (DEFAULT_ELBOW, DEFAULT_FLOOR),
    };
    let mut threshold = elbow_threshold(&scores.lambda_hat, elbow, floor);
    if let ThresholdRule::Fixed(eps) = config.threshold {
        threshold.epsilon = eps;
    }
    let set = principal_set(&scores.lambda_hat, threshold.epsilon);
    Ok(CommunityScoreReport {
        fell_back: set.is_empty(),
        lambda_hat: scores.lambda_hat,
        mu_hat: scores.mu_hat,
        sigma_hat: scores.sigma_hat,
        elbows: threshold.elbows,
        epsilon_elbow: threshold.epsilon_elbow,
        epsilon: threshold.epsilon,
        principal_set: set,
    })
}

/// Restricts `z` to the principal communities and renormalizes each row.
/// Every vertex is kept. With an empty principal set the input comes back
/// unchanged (the report carries `fell_back`).
pub fn principal_embedding(z: &Embedding, report: &CommunityScoreReport) -> Result<Embedding> {
    if report.principal_set.is_empty() {
        return Ok(z.clone());
    }
    let restricted = z.select_columns(&report.principal_set)?;
    Ok(normalize_rows(&restricted))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalFit {
    /// Row-normalized encoder embedding over all `K` communities.
    pub full: Embedding,
    pub principal: Embedding,
    pub report: CommunityScoreReport,
}

/// Embed, normalize, score, threshold and restrict.
pub fn fit_transform(g: &Graph, y: &LabelVector, config: &PrincipalConfig) -> Result<PrincipalFit> {
    let full = normalize_rows(&embed(g, y)?);
    let report = score_report(&full, y, config)?;
    let principal = principal_embedding(&full, &report)?;
    Ok(PrincipalFit {
        full,
        principal,
        report,
    })
}
