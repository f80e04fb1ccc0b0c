//! Stratified k-fold vertex classification with GEE or PGEE features.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::Axis;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoder::{embed, normalize_rows, Embedding};
use crate::error::{Error, Result};
use crate::eval::lda::{lda_fit, lda_predict};
use crate::eval::metrics::{mean, median, std_dev};
use crate::eval::noise::{corrupt_labels, NoiseConfig};
use crate::graph::Graph;
use crate::labels::LabelVector;
use crate::principal::{
    principal_embedding, score_report, CommunityScoreReport, PrincipalConfig, SmallClassPolicy,
};
use crate::seed::{derive_seed, stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Full normalized encoder embedding.
    Gee,
    /// Embedding restricted to the estimated principal communities.
    Pgee,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Gee, Method::Pgee];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gee => "gee",
            Method::Pgee => "pgee",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gee" => Ok(Method::Gee),
            "pgee" => Ok(Method::Pgee),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValConfig {
    pub folds: usize,
    pub replicates: usize,
    pub seed: u64,
    pub principal: PrincipalConfig,
    /// Corrupt the labels once per replicate before splitting.
    pub noise: Option<NoiseConfig>,
    /// Fail when a class has fewer known vertices than folds. When off, such
    /// classes are spread over as many folds as they have members.
    pub strict_classes: bool,
}

impl Default for CrossValConfig {
    fn default() -> Self {
        CrossValConfig {
            folds: 5,
            replicates: 1,
            seed: 0,
            principal: PrincipalConfig::default(),
            noise: None,
            strict_classes: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub embed_seconds: f64,
    pub score_seconds: f64,
    pub classify_seconds: f64,
}

impl std::ops::AddAssign for Timing {
    fn add_assign(&mut self, rhs: Timing) {
        self.embed_seconds += rhs.embed_seconds;
        self.score_seconds += rhs.score_seconds;
        self.classify_seconds += rhs.classify_seconds;
    }
}

/// Cross-validated error of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub method: Method,
    /// `fold_errors[r][f]`: error rate of fold `f` in replicate `r`.
    pub fold_errors: Vec<Vec<f64>>,
    /// Misclassified test vertices over all test vertices, per replicate.
    pub replicate_errors: Vec<f64>,
    pub mean_error: f64,
    pub sd_error: f64,
    /// With noise, the same predictions scored against the clean labels.
    pub clean_replicate_errors: Option<Vec<f64>>,
    pub mean_clean_error: Option<f64>,
    /// `principal_sets[r][f]`, the estimated set used for fold `f`.
    pub principal_sets: Vec<Vec<Vec<usize>>>,
    /// Median of `|D^|` over every fold of every replicate (PGEE only).
    pub median_principal_size: Option<f64>,
    /// Feature dimension per replicate and fold.
    pub dims: Vec<Vec<usize>>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValReport {
    pub gee: EvalResult,
    pub pgee: EvalResult,
}

impl CrossValReport {
    pub fn get(&self, method: Method) -> &EvalResult {
        match method {
            Method::Gee => &self.gee,
            Method::Pgee => &self.pgee,
        }
    }
}

/// Labels and folds of one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    /// Labels the classifier sees (corrupted when noise is on).
    pub observed: LabelVector,
    /// Test vertices per fold, ascending within each fold.
    pub folds: Vec<Vec<usize>>,
}

/// Features computed with the test fold hidden.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldFeatures {
    pub training_labels: LabelVector,
    pub full: Embedding,
    pub principal: Embedding,
    pub report: CommunityScoreReport,
    pub embed_seconds: f64,
    pub score_seconds: f64,
}

impl FoldFeatures {
    pub fn features(&self, method: Method) -> &Embedding {
        match method {
            Method::Gee => &self.full,
            Method::Pgee => &self.principal,
        }
    }
}

/// Splits the known vertices into `folds` groups so that the per-class counts
/// of any two folds differ by at most one.
pub fn stratified_folds(y: &LabelVector, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); y.num_classes()];
    for v in y.known_vertices() {
        members[y.get(v) - 1].push(v);
    }
    let mut rng = stream_rng(seed, Stream::Folds, 0);
    let mut out = vec![Vec::new(); folds];
    let mut offset = 0;
    for class in members.iter_mut() {
        class.shuffle(&mut rng);
        for (pos, &v) in class.iter().enumerate() {
            out[(offset + pos) % folds].push(v);
        }
        offset = (offset + class.len()) % folds;
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

/// Labels and folds for replicate `replicate`.
pub fn fold_plan(y: &LabelVector, config: &CrossValConfig, replicate: usize) -> Result<FoldPlan> {
    let root = derive_seed(config.seed, Stream::Replicate, replicate as u64);
    let observed = match config.noise {
        Some(noise) => corrupt_labels(y, noise.fraction, noise.classes, root)?,
        None => y.clone(),
    };
    if config.strict_classes && config.noise.is_none() {
        for (k, &count) in observed.class_counts().iter().enumerate() {
            if count > 0 && count < config.folds {
                return Err(Error::ClassTooSmall {
                    class: k + 1,
                    count,
                    required: config.folds,
                });
            }
        }
    }
    let folds = stratified_folds(&observed, config.folds, root)?;
    Ok(FoldPlan { observed, folds })
}

/// Embeds and scores with the labels of `test` hidden. Nothing about the test
/// labels reaches the returned features.
pub fn fold_features(
    g: &Graph,
    observed: &LabelVector,
    test: &[usize],
    config: &PrincipalConfig,
) -> Result<FoldFeatures> {
    let training_labels = observed.masked(test)?;
    let start = Instant::now();
    let raw = embed(g, &training_labels)?;
    let embed_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let full = normalize_rows(&raw);
    let report = score_report(&full, &training_labels, config)?;
    let principal = principal_embedding(&full, &report)?;
    let score_seconds = start.elapsed().as_secs_f64();
    Ok(FoldFeatures {
        training_labels,
        full,
        principal,
        report,
        embed_seconds,
        score_seconds,
    })
}

/// Trains LDA on the known training rows of `features` and predicts `test`.
pub fn classify_fold(
    features: &Embedding,
    training_labels: &LabelVector,
    test: &[usize],
) -> Result<Vec<usize>> {
    let train = training_labels.known_vertices();
    let x_train = features.values().select(Axis(0), &train);
    let y_train: Vec<usize> = train.iter().map(|&v| training_labels.get(v)).collect();
    let model = lda_fit(x_train.view(), &y_train)?;
    let x_test = features.values().select(Axis(0), test);
    lda_predict(&model, x_test.view())
}

struct ReplicateOutcome {
    // per method, per fold: (wrong vs observed, wrong vs clean, fold size)
    counts: [Vec<(usize, usize, usize)>; 2],
    dims: [Vec<usize>; 2],
    sets: Vec<Vec<usize>>,
    fallbacks: Vec<bool>,
    timing: [Timing; 2],
}

fn run_replicate(
    g: &Graph,
    y: &LabelVector,
    config: &CrossValConfig,
    replicate: usize,
) -> Result<ReplicateOutcome> {
    let plan = fold_plan(y, config, replicate)?;
    let mut principal = config.principal;
    if config.noise.is_some() || !config.strict_classes {
        principal.small_classes = SmallClassPolicy::Drop;
    }
    let mut out = ReplicateOutcome {
        counts: [Vec::new(), Vec::new()],
        dims: [Vec::new(), Vec::new()],
        sets: Vec::new(),
        fallbacks: Vec::new(),
        timing: [Timing::default(); 2],
    };
    for test in &plan.folds {
        let fit = fold_features(g, &plan.observed, test, &principal)?;
        for (m, method) in Method::ALL.into_iter().enumerate() {
            let features = fit.features(method);
            let start = Instant::now();
            let predicted = classify_fold(features, &fit.training_labels, test)?;
            let classify_seconds = start.elapsed().as_secs_f64();
            let wrong = test
                .iter()
                .zip(&predicted)
                .filter(|(&v, &p)| plan.observed.get(v) != p)
                .count();
            let wrong_clean = test
                .iter()
                .zip(&predicted)
                .filter(|(&v, &p)| y.get(v) != p)
                .count();
            out.counts[m].push((wrong, wrong_clean, test.len()));
            out.dims[m].push(features.dim());
            out.timing[m] += Timing {
                embed_seconds: fit.embed_seconds,
                score_seconds: if method == Method::Pgee {
                    fit.score_seconds
                } else {
                    0.0
                },
                classify_seconds,
            };
        }
        out.sets.push(fit.report.principal_set.clone());
        out.fallbacks.push(fit.report.fell_back);
    }
    Ok(out)
}

/// Runs every replicate (in parallel) and summarizes both methods.
pub fn cross_validate(
    g: &Graph,
    y: &LabelVector,
    config: &CrossValConfig,
) -> Result<CrossValReport> {
    if g.n() != y.len() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: g.n(),
        });
    }
    if config.replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let outcomes: Vec<ReplicateOutcome> = (0..config.replicates)
        .into_par_iter()
        .map(|r| run_replicate(g, y, config, r))
        .collect::<Result<_>>()?;

    let summarize = |m: usize, method: Method| {
        let mut fold_errors = Vec::new();
        let mut replicate_errors = Vec::new();
        let mut clean_errors = Vec::new();
        let mut timing = Timing::default();
        for o in &outcomes {
            fold_errors.push(
                o.counts[m]
                    .iter()
                    .map(|&(w, _, size)| {
                        if size == 0 {
                            0.0
                        } else {
                            w as f64 / size as f64
                        }
                    })
                    .collect(),
            );
            let total: usize = o.counts[m].iter().map(|c| c.2).sum();
            let wrong: usize = o.counts[m].iter().map(|c| c.0).sum();
            let wrong_clean: usize = o.counts[m].iter().map(|c| c.1).sum();
            replicate_errors.push(wrong as f64 / total.max(1) as f64);
            clean_errors.push(wrong_clean as f64 / total.max(1) as f64);
            timing += o.timing[m];
        }
        let principal_sets: Vec<Vec<Vec<usize>>> = if method == Method::Pgee {
            outcomes.iter().map(|o| o.sets.clone()).collect()
        } else {
            Vec::new()
        };
        let sizes: Vec<f64> = principal_sets
            .iter()
            .flatten()
            .map(|s| s.len() as f64)
            .collect();
        let noisy = config.noise.is_some();
        EvalResult {
            method,
            mean_error: mean(&replicate_errors),
            sd_error: std_dev(&replicate_errors),
            fold_errors,
            replicate_errors,
            mean_clean_error: noisy.then(|| mean(&clean_errors)),
            clean_replicate_errors: noisy.then_some(clean_errors),
            median_principal_size: (!sizes.is_empty()).then(|| median(&sizes)),
            principal_sets,
            dims: outcomes.iter().map(|o| o.dims[m].clone()).collect(),
            timing,
        }
    };
    Ok(CrossValReport {
        gee: summarize(0, Method::Gee),
        pgee: summarize(1, Method::Pgee),
    })
}

/// Cross-validated error of a single method.
pub fn crossval_vertex_classification(
    g: &Graph,
    y: &LabelVector,
    method: Method,
    config: &CrossValConfig,
) -> Result<EvalResult> {
    let report = cross_validate(g, y, config)?;
    Ok(match method {
        Method::Gee => report.gee,
        Method::Pgee => report.pgee,
    })
}
