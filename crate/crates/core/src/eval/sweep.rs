//! Replicated simulations over a list of graph sizes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::crossval::{cross_validate, CrossValConfig};
use crate::eval::metrics::{detection_metrics, mean};
use crate::models::{simulation_preset, ModelKind, PRESET_PRINCIPAL};
use crate::principal::{fit_transform, PrincipalConfig, SmallClassPolicy};
use crate::seed::{derive_seed, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: ModelKind,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub principal: PrincipalConfig,
    /// Folds for the classification error; `None` skips classification.
    pub folds: Option<usize>,
}

/// Detection outcome of one simulated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub lambda_hat: Vec<f64>,
    pub epsilon: f64,
    pub principal_set: Vec<usize>,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub error_gee: Option<f64>,
    pub error_pgee: Option<f64>,
}

impl ReplicateRecord {
    pub fn exact_recovery(&self) -> bool {
        self.principal_set == PRESET_PRINCIPAL
    }

    pub fn mean_principal_score(&self) -> f64 {
        mean(&PRESET_PRINCIPAL.map(|k| self.lambda_hat[k - 1]))
    }

    pub fn mean_redundant_score(&self) -> f64 {
        let rest: Vec<f64> = self.lambda_hat[PRESET_PRINCIPAL.len()..].to_vec();
        mean(&rest)
    }
}

/// One summary row per graph size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub replicates: usize,
    pub mean_principal_score: f64,
    pub mean_redundant_score: f64,
    pub tpr: f64,
    pub fpr: f64,
    /// Fraction of replicates whose estimated set is exactly `{1, 2, 3}`.
    pub exact_recovery: f64,
    pub err_gee: Option<f64>,
    pub err_pgee: Option<f64>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "n,mean_principal_score,mean_redundant_score,tpr,fpr,err_gee,err_pgee";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.mean_principal_score,
            self.mean_redundant_score,
            self.tpr,
            self.fpr,
            opt(self.err_gee),
            opt(self.err_pgee)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub records: Vec<ReplicateRecord>,
}

/// Seed of replicate `replicate` at size index `size_index`.
pub fn replicate_seed(root: u64, size_index: usize, replicate: usize) -> u64 {
    derive_seed(
        derive_seed(root, Stream::Model, size_index as u64),
        Stream::Replicate,
        replicate as u64,
    )
}

/// Samples one preset graph and records detection (and optionally
/// classification) against the preset's principal set.
pub fn simulate_replicate(
    kind: ModelKind,
    n: usize,
    seed: u64,
    principal: &PrincipalConfig,
    folds: Option<usize>,
) -> Result<ReplicateRecord> {
    let spec = simulation_preset(kind, n)?;
    let sample = spec.sample(seed)?;
    let mut config = *principal;
    config.small_classes = SmallClassPolicy::Drop;
    let fit = fit_transform(&sample.graph, &sample.labels, &config)?;
    let rates = detection_metrics(
        &fit.report.principal_set,
        &PRESET_PRINCIPAL,
        spec.num_classes(),
    );
    let (error_gee, error_pgee) = match folds {
        Some(folds) => {
            let cv = CrossValConfig {
                folds,
                replicates: 1,
                seed,
                principal: config,
                noise: None,
                strict_classes: false,
            };
            let report = cross_validate(&sample.graph, &sample.labels, &cv)?;
            (Some(report.gee.mean_error), Some(report.pgee.mean_error))
        }
        None => (None, None),
    };
    Ok(ReplicateRecord {
        n,
        replicate: 0,
        seed,
        lambda_hat: fit.report.lambda_hat,
        epsilon: fit.report.epsilon,
        principal_set: fit.report.principal_set,
        tpr: rates.tpr,
        fpr: rates.fpr,
        error_gee,
        error_pgee,
    })
}

pub fn simulation_sweep(config: &SweepConfig) -> Result<SweepResult> {
    if config.replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let mut rows = Vec::with_capacity(config.sizes.len());
    let mut records = Vec::new();
    for (i, &n) in config.sizes.iter().enumerate() {
        let batch: Vec<ReplicateRecord> = (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                let seed = replicate_seed(config.seed, i, r);
                let mut rec =
                    simulate_replicate(config.kind, n, seed, &config.principal, config.folds)?;
                rec.replicate = r;
                Ok(rec)
            })
            .collect::<Result<_>>()?;
        let collect = |f: &dyn Fn(&ReplicateRecord) -> Option<f64>| -> Option<f64> {
            let xs: Vec<f64> = batch.iter().filter_map(f).collect();
            (!xs.is_empty()).then(|| mean(&xs))
        };
        rows.push(SweepRow {
            n,
            replicates: config.replicates,
            mean_principal_score: mean(
                &batch
                    .iter()
                    .map(|r| r.mean_principal_score())
                    .collect::<Vec<_>>(),
            ),
            mean_redundant_score: mean(
                &batch
                    .iter()
                    .map(|r| r.mean_redundant_score())
                    .collect::<Vec<_>>(),
            ),
            tpr: collect(&|r| r.tpr).unwrap_or(f64::NAN),
            fpr: collect(&|r| r.fpr).unwrap_or(f64::NAN),
            exact_recovery: batch.iter().filter(|r| r.exact_recovery()).count() as f64
                / batch.len() as f64,
            err_gee: collect(&|r| r.error_gee),
            err_pgee: collect(&|r| r.error_pgee),
        });
        records.extend(batch);
    }
    Ok(SweepResult { rows, records })
}
