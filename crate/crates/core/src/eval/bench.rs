//! Wall-clock timing of the embed and score passes.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::encoder::{embed, normalize_rows};
use crate::error::{Error, Result};
use crate::eval::metrics::median;
use crate::graph::Graph;
use crate::labels::LabelVector;
use crate::models::{
    sample_sbm_sparse, scaled_sbm_preset, simulation_preset, ModelKind, ModelSpec,
};
use crate::principal::{score_report, PrincipalConfig};
use crate::seed::{derive_seed, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub trials: usize,
    pub embed_min: f64,
    pub embed_median: f64,
    pub score_min: f64,
    pub score_median: f64,
    /// Embed plus score, per trial, then min / median.
    pub total_min: f64,
    pub total_median: f64,
}

impl TimingRow {
    pub const CSV_HEADER: &'static str =
        "n,k,s,trials,embed_min,embed_median,score_min,score_median,total_min,total_median";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.n,
            self.k,
            self.s,
            self.trials,
            self.embed_min,
            self.embed_median,
            self.score_min,
            self.score_median,
            self.total_min,
            self.total_median
        )
    }
}

fn min(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Times `trials` runs of embed + normalize + score on a fixed graph.
pub fn time_embed_score(
    g: &Graph,
    y: &LabelVector,
    config: &PrincipalConfig,
    trials: usize,
) -> Result<TimingRow> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut embeds = Vec::with_capacity(trials);
    let mut scores = Vec::with_capacity(trials);
    let mut totals = Vec::with_capacity(trials);
    for _ in 0..trials {
        let start = Instant::now();
        let z = embed(g, y)?;
        let embed_s = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let report = score_report(&normalize_rows(&z), y, config)?;
        let score_s = start.elapsed().as_secs_f64();
        std::hint::black_box(&report);
        embeds.push(embed_s);
        scores.push(score_s);
        totals.push(embed_s + score_s);
    }
    Ok(TimingRow {
        n: g.n(),
        k: y.num_classes(),
        s: g.s(),
        trials,
        embed_min: min(&embeds),
        embed_median: median(&embeds),
        score_min: min(&scores),
        score_median: median(&scores),
        total_min: min(&totals),
        total_median: median(&totals),
    })
}

/// Graph family for [`benchmark_scaling`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BenchFamily {
    /// The 20-class simulation preset of the given kind. The block preset is
    /// drawn with the skipping sampler; the others pair by pair.
    Preset(ModelKind),
    /// Preset-shaped block model with `k` classes and the given average degree.
    Scaled { k: usize, average_degree: f64 },
}

/// Times embed + score on one sampled graph per size.
pub fn benchmark_scaling(
    family: BenchFamily,
    sizes: &[usize],
    seed: u64,
    trials: usize,
    config: &PrincipalConfig,
) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let graph_seed = derive_seed(seed, Stream::Replicate, i as u64);
        let sample = match family {
            BenchFamily::Preset(ModelKind::Sbm) => match simulation_preset(ModelKind::Sbm, n)? {
                ModelSpec::Sbm(spec) => sample_sbm_sparse(&spec, graph_seed)?,
                _ => unreachable!("block preset"),
            },
            BenchFamily::Preset(kind) => simulation_preset(kind, n)?.sample(graph_seed)?,
            BenchFamily::Scaled { k, average_degree } => {
                let spec = scaled_sbm_preset(n, k, n as f64 * average_degree / 2.0)?;
                sample_sbm_sparse(&spec, graph_seed)?
            }
        };
        rows.push(time_embed_score(
            &sample.graph,
            &sample.labels,
            config,
            trials,
        )?);
    }
    Ok(rows)
}

/// Fixed `n` and `k`, one graph per target edge count.
pub fn edge_pass_ladder(
    n: usize,
    k: usize,
    edge_targets: &[f64],
    seed: u64,
    trials: usize,
    config: &PrincipalConfig,
) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::with_capacity(edge_targets.len());
    for (i, &target) in edge_targets.iter().enumerate() {
        let spec = scaled_sbm_preset(n, k, target)?;
        let sample = sample_sbm_sparse(&spec, derive_seed(seed, Stream::Replicate, i as u64))?;
        rows.push(time_embed_score(
            &sample.graph,
            &sample.labels,
            config,
            trials,
        )?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewValues {
            required: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
