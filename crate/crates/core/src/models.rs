//! Seeded samplers for the stochastic block model, its degree-corrected
//! variant and the random dot product graph, plus the 20-class simulation
//! presets with principal communities `{1, 2, 3}`.
//!
//! Labels are drawn i.i.d. from the priors. Each stochastic ingredient
//! (labels, degrees, latent positions, edges) reads its own derived stream, so
//! a degree-corrected model whose degrees are all 1 reproduces the plain block
//! model draw for draw.

use ndarray::Array2;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rand_distr::Beta;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labels::LabelVector;
use crate::seed::{stream_rng, Stream};

/// Number of classes in every simulation preset.
pub const PRESET_CLASSES: usize = 20;
/// Ground-truth principal communities of the presets.
pub const PRESET_PRINCIPAL: [usize; 3] = [1, 2, 3];

const PRIOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub n: usize,
    pub priors: Vec<f64>,
    /// `block[a][b]` is the edge probability between classes `a + 1`, `b + 1`.
    pub block: Vec<Vec<f64>>,
    #[serde(default)]
    pub directed: bool,
}

/// Per-vertex degree parameter law, by class `y` in `1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DegreeLaw {
    /// `theta | y ~ Beta(alpha, beta + beta_per_class * y)`.
    Beta {
        alpha: f64,
        beta: f64,
        beta_per_class: f64,
    },
    /// Every `theta` equal to `value`.
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcsbmSpec {
    #[serde(flatten)]
    pub sbm: SbmSpec,
    pub degree_law: DegreeLaw,
}

/// Closed interval `[lo, hi]` for a uniform latent coordinate. `lo == hi` is
/// a point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRange {
    pub lo: f64,
    pub hi: f64,
}

impl UniformRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        UniformRange { lo, hi }
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdpgSpec {
    pub n: usize,
    pub priors: Vec<f64>,
    pub latent_dim: usize,
    /// `latent_law[k - 1][d]`: law of coordinate `d` for class `k`.
    pub latent_law: Vec<Vec<UniformRange>>,
    #[serde(default)]
    pub directed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Sbm(SbmSpec),
    Dcsbm(DcsbmSpec),
    Rdpg(RdpgSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sbm,
    Dcsbm,
    Rdpg,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Sbm, ModelKind::Dcsbm, ModelKind::Rdpg];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Sbm => "sbm",
            ModelKind::Dcsbm => "dcsbm",
            ModelKind::Rdpg => "rdpg",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sbm" => Ok(ModelKind::Sbm),
            "dcsbm" | "dc-sbm" => Ok(ModelKind::Dcsbm),
            "rdpg" => Ok(ModelKind::Rdpg),
            other => Err(Error::InvalidArgument(format!(
                "unknown model `{other}` (expected sbm, dcsbm or rdpg)"
            ))),
        }
    }
}

/// One sampled graph with its labels and, when the model has them, the
/// per-vertex degree parameters or latent positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub graph: Graph,
    pub labels: LabelVector,
    pub degrees: Option<Vec<f64>>,
    pub latents: Option<Array2<f64>>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidModel(msg.into())
}

fn validate_priors(priors: &[f64]) -> Result<()> {
    if priors.is_empty() {
        return Err(invalid("no classes"));
    }
    if let Some(p) = priors.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return Err(invalid(format!("prior {p} outside (0, 1]")));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > PRIOR_TOLERANCE {
        return Err(invalid(format!("priors sum to {total}, not 1")));
    }
    Ok(())
}

impl SbmSpec {
    pub fn num_classes(&self) -> usize {
        self.priors.len()
    }

    pub fn validate(&self) -> Result<()> {
        validate_priors(&self.priors)?;
        let k = self.num_classes();
        if self.block.len() != k || self.block.iter().any(|r| r.len() != k) {
            return Err(invalid(format!("block matrix must be {k} x {k}")));
        }
        for (a, row) in self.block.iter().enumerate() {
            for (b, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!(
                        "B({}, {}) = {p} outside [0, 1]",
                        a + 1,
                        b + 1
                    )));
                }
                if !self.directed && p != self.block[b][a] {
                    return Err(invalid("undirected model needs a symmetric block matrix"));
                }
            }
        }
        Ok(())
    }
}

impl DegreeLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            DegreeLaw::Beta {
                alpha,
                beta,
                beta_per_class,
            } => {
                if !(alpha > 0.0 && beta > 0.0 && beta_per_class >= 0.0) {
                    return Err(invalid("Beta degree law needs positive shape parameters"));
                }
            }
            DegreeLaw::Constant { value } => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(invalid(format!("constant degree {value} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }

    /// Mean of `theta` for class `y`.
    pub fn mean(&self, y: usize) -> f64 {
        match *self {
            DegreeLaw::Beta {
                alpha,
                beta,
                beta_per_class,
            } => alpha / (alpha + beta + beta_per_class * y as f64),
            DegreeLaw::Constant { value } => value,
        }
    }
}

impl RdpgSpec {
    pub fn num_classes(&self) -> usize {
        self.priors.len()
    }

    pub fn validate(&self) -> Result<()> {
        validate_priors(&self.priors)?;
        let k = self.num_classes();
        if self.latent_dim == 0 {
            return Err(invalid("latent dimension must be positive"));
        }
        if self.latent_law.len() != k || self.latent_law.iter().any(|r| r.len() != self.latent_dim)
        {
            return Err(invalid(format!(
                "latent law must be {k} classes x {} dimensions",
                self.latent_dim
            )));
        }
        for r in self.latent_law.iter().flatten() {
            if !(r.lo >= 0.0 && r.lo <= r.hi && r.hi.is_finite()) {
                return Err(invalid(format!("bad uniform range [{}, {}]", r.lo, r.hi)));
            }
        }
        let worst = self.max_inner_product();
        if worst > 1.0 {
            return Err(invalid(format!(
                "latent supports allow inner products up to {worst}, above 1"
            )));
        }
        Ok(())
    }

    /// Largest inner product attainable between two supported latent vectors.
    pub fn max_inner_product(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.latent_law {
            for b in &self.latent_law {
                let ip: f64 = a.iter().zip(b).map(|(x, y)| x.hi * y.hi).sum();
                worst = worst.max(ip);
            }
        }
        worst
    }

    /// `E<U, U'>` for independent `U ~ class a`, `U' ~ class b` (1-based).
    pub fn mean_inner_product(&self, a: usize, b: usize) -> f64 {
        self.latent_law[a - 1]
            .iter()
            .zip(&self.latent_law[b - 1])
            .map(|(x, y)| x.mean() * y.mean())
            .sum()
    }
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Sbm(_) => ModelKind::Sbm,
            ModelSpec::Dcsbm(_) => ModelKind::Dcsbm,
            ModelSpec::Rdpg(_) => ModelKind::Rdpg,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Sbm(s) => s.n,
            ModelSpec::Dcsbm(s) => s.sbm.n,
            ModelSpec::Rdpg(s) => s.n,
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            ModelSpec::Sbm(s) => s.num_classes(),
            ModelSpec::Dcsbm(s) => s.sbm.num_classes(),
            ModelSpec::Rdpg(s) => s.num_classes(),
        }
    }

    /// Same model on `n` vertices.
    pub fn with_n(&self, n: usize) -> ModelSpec {
        let mut spec = self.clone();
        match &mut spec {
            ModelSpec::Sbm(s) => s.n = n,
            ModelSpec::Dcsbm(s) => s.sbm.n = n,
            ModelSpec::Rdpg(s) => s.n = n,
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Sbm(s) => s.validate(),
            ModelSpec::Dcsbm(s) => {
                s.sbm.validate()?;
                s.degree_law.validate()
            }
            ModelSpec::Rdpg(s) => s.validate(),
        }
    }

    pub fn sample(&self, seed: u64) -> Result<Sample> {
        match self {
            ModelSpec::Sbm(s) => sample_sbm(s, seed),
            ModelSpec::Dcsbm(s) => sample_dcsbm(s, seed),
            ModelSpec::Rdpg(s) => sample_rdpg(s, seed),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<ModelSpec> {
        let spec: ModelSpec = toml::from_str(text).map_err(|e| Error::Serialize(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}

fn sample_labels(priors: &[f64], n: usize, seed: u64) -> Result<LabelVector> {
    let dist = WeightedIndex::new(priors).map_err(|e| invalid(e.to_string()))?;
    let mut rng = stream_rng(seed, Stream::Labels, 0);
    let labels = (0..n).map(|_| dist.sample(&mut rng) + 1).collect();
    LabelVector::with_num_classes(labels, priors.len())
}

/// Independent Bernoulli draw for every vertex pair (`i < j` when undirected,
/// every ordered pair otherwise), in row-major order from the edge stream.
fn sample_pairs<F>(n: usize, directed: bool, seed: u64, prob: F) -> Graph
where
    F: Fn(usize, usize) -> f64,
{
    let mut rng = stream_rng(seed, Stream::Edges, 0);
    let mut edges = Vec::new();
    for i in 0..n {
        let start = if directed { 0 } else { i + 1 };
        for j in start..n {
            if i == j {
                continue;
            }
            let u: f64 = rng.random();
            if u < prob(i, j) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Graph::from_canonical(n, edges, None, directed)
}

pub fn sample_sbm(spec: &SbmSpec, seed: u64) -> Result<Sample> {
    spec.validate()?;
    let labels = sample_labels(&spec.priors, spec.n, seed)?;
    let y = labels.as_slice();
    let graph = sample_pairs(spec.n, spec.directed, seed, |i, j| {
        spec.block[y[i] as usize - 1][y[j] as usize - 1]
    });
    Ok(Sample {
        graph,
        labels,
        degrees: None,
        latents: None,
    })
}

pub fn sample_dcsbm(spec: &DcsbmSpec, seed: u64) -> Result<Sample> {
    spec.sbm.validate()?;
    spec.degree_law.validate()?;
    let sbm = &spec.sbm;
    let labels = sample_labels(&sbm.priors, sbm.n, seed)?;
    let y = labels.as_slice();
    let degrees: Vec<f64> = match spec.degree_law {
        DegreeLaw::Constant { value } => vec![value; sbm.n],
        DegreeLaw::Beta {
            alpha,
            beta,
            beta_per_class,
        } => {
            let laws = (1..=sbm.num_classes())
                .map(|k| Beta::new(alpha, beta + beta_per_class * k as f64))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| invalid(e.to_string()))?;
            let mut rng = stream_rng(seed, Stream::Degrees, 0);
            y.iter()
                .map(|&l| laws[l as usize - 1].sample(&mut rng))
                .collect()
        }
    };
    let graph = sample_pairs(sbm.n, sbm.directed, seed, |i, j| {
        degrees[i] * degrees[j] * sbm.block[y[i] as usize - 1][y[j] as usize - 1]
    });
    Ok(Sample {
        graph,
        labels,
        degrees: Some(degrees),
        latents: None,
    })
}

pub fn sample_rdpg(spec: &RdpgSpec, seed: u64) -> Result<Sample> {
    spec.validate()?;
    let labels = sample_labels(&spec.priors, spec.n, seed)?;
    let p = spec.latent_dim;
    let mut rng = stream_rng(seed, Stream::Latents, 0);
    let mut latents = Array2::<f64>::zeros((spec.n, p));
    for v in 0..spec.n {
        let law = &spec.latent_law[labels.get(v) - 1];
        for d in 0..p {
            let r = law[d];
            latents[[v, d]] = if r.hi > r.lo {
                rng.random_range(r.lo..r.hi)
            } else {
                r.lo
            };
        }
    }
    // validate() bounds every inner product of supported latents to [0, 1]
    let graph = sample_pairs(spec.n, spec.directed, seed, |i, j| {
        latents.row(i).dot(&latents.row(j))
    });
    Ok(Sample {
        graph,
        labels,
        degrees: None,
        latents: Some(latents),
    })
}

/// Block-model sampler that skips over non-edges with geometric jumps inside
/// each block, in `O(n + K^2 + s)` expected time. Same distribution as
/// [`sample_sbm`] but a different draw sequence, so graphs differ for a seed.
pub fn sample_sbm_sparse(spec: &SbmSpec, seed: u64) -> Result<Sample> {
    spec.validate()?;
    if spec.directed {
        return Err(Error::InvalidArgument(
            "the skipping sampler handles undirected models only".into(),
        ));
    }
    let labels = sample_labels(&spec.priors, spec.n, seed)?;
    let k = spec.num_classes();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for v in 0..spec.n {
        members[labels.get(v) - 1].push(v as u32);
    }
    let mut rng = stream_rng(seed, Stream::Edges, 0);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for a in 0..k {
        for b in a..k {
            let p = spec.block[a][b];
            if p <= 0.0 {
                continue;
            }
            let (ma, mb) = (&members[a], &members[b]);
            let total = if a == b {
                ma.len() * ma.len().saturating_sub(1) / 2
            } else {
                ma.len() * mb.len()
            };
            let mut tri = TriangleCursor::default();
            let log_q = (1.0 - p).ln();
            let mut idx: usize = 0;
            loop {
                if p < 1.0 {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let skip = (u.ln() / log_q).floor();
                    if skip >= (total - idx) as f64 {
                        break;
                    }
                    idx += skip as usize;
                }
                if idx >= total {
                    break;
                }
                let (i, j) = if a == b {
                    let (r, c) = tri.locate(idx, ma.len());
                    (ma[r], ma[c])
                } else {
                    (ma[idx / mb.len()], mb[idx % mb.len()])
                };
                edges.push(if i < j { (i, j) } else { (j, i) });
                idx += 1;
            }
        }
    }
    edges.sort_unstable();
    Ok(Sample {
        graph: Graph::from_canonical(spec.n, edges, None, false),
        labels,
        degrees: None,
        latents: None,
    })
}

// Maps a monotone sequence of linear indices over the strict upper triangle
// of an m x m matrix to (row, col).
#[derive(Default)]
struct TriangleCursor {
    row: usize,
    row_start: usize,
}

impl TriangleCursor {
    fn locate(&mut self, idx: usize, m: usize) -> (usize, usize) {
        while idx >= self.row_start + (m - self.row - 1) {
            self.row_start += m - self.row - 1;
            self.row += 1;
        }
        (self.row, self.row + 1 + (idx - self.row_start))
    }
}

fn preset_priors(k: usize) -> Vec<f64> {
    let rest = 0.25 / (k - 3) as f64;
    (1..=k).map(|c| if c <= 3 { 0.25 } else { rest }).collect()
}

/// Simulation preset on `n` vertices with 20 classes; the first three classes
/// are principal and the rest are exchangeable.
pub fn simulation_preset(kind: ModelKind, n: usize) -> Result<ModelSpec> {
    let k = PRESET_CLASSES;
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "preset needs n >= K = {k}, got {n}"
        )));
    }
    let priors = preset_priors(k);
    let spec = match kind {
        ModelKind::Sbm => {
            let block = (0..k)
                .map(|a| {
                    (0..k)
                        .map(|b| if a == b && a < 3 { 0.2 } else { 0.1 })
                        .collect()
                })
                .collect();
            ModelSpec::Sbm(SbmSpec {
                n,
                priors,
                block,
                directed: false,
            })
        }
        ModelKind::Dcsbm => {
            let diag = [0.9, 0.7, 0.5];
            let block = (0..k)
                .map(|a| {
                    (0..k)
                        .map(|b| if a == b && a < 3 { diag[a] } else { 0.1 })
                        .collect()
                })
                .collect();
            ModelSpec::Dcsbm(DcsbmSpec {
                sbm: SbmSpec {
                    n,
                    priors,
                    block,
                    directed: false,
                },
                degree_law: DegreeLaw::Beta {
                    alpha: 1.0,
                    beta: 5.0,
                    beta_per_class: 0.2,
                },
            })
        }
        ModelKind::Rdpg => {
            // Class c <= 3 draws coordinate c from U(0.2, 0.3); classes above 3
            // draw coordinate 4 from U(0.1, 0.2); all other coordinates U(0, 0.1).
            let dim = 4;
            let latent_law = (1..=k)
                .map(|c| {
                    let hot = if c <= 3 { c - 1 } else { 3 };
                    (0..dim)
                        .map(|d| match (d == hot, c <= 3) {
                            (true, true) => UniformRange::new(0.2, 0.3),
                            (true, false) => UniformRange::new(0.1, 0.2),
                            _ => UniformRange::new(0.0, 0.1),
                        })
                        .collect()
                })
                .collect();
            ModelSpec::Rdpg(RdpgSpec {
                n,
                priors,
                latent_dim: dim,
                latent_law,
                directed: false,
            })
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Block model in the shape of the SBM preset with `k` classes, scaled so the
/// expected edge count is `target_edges`. Used for the scaling benchmark.
pub fn scaled_sbm_preset(n: usize, k: usize, target_edges: f64) -> Result<SbmSpec> {
    if k < 4 || n < k {
        return Err(Error::InvalidArgument(format!(
            "scaled preset needs K >= 4 and n >= K, got n = {n}, K = {k}"
        )));
    }
    let priors = preset_priors(k);
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    // background p on every pair plus an extra p on the three principal blocks
    let principal_pairs: f64 = priors[..3]
        .iter()
        .map(|p| (p * n as f64).powi(2) / 2.0)
        .sum();
    let base = target_edges / (pairs + principal_pairs);
    if base * 2.0 > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "{target_edges} edges is too dense for {n} vertices"
        )));
    }
    let block = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| if a == b && a < 3 { 2.0 * base } else { base })
                .collect()
        })
        .collect();
    let spec = SbmSpec {
        n,
        priors,
        block,
        directed: false,
    };
    spec.validate()?;
    Ok(spec)
}

/// Sign of the population score of community `k` under a block model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationScore {
    Zero,
    Positive,
}

/// A community is redundant exactly when its column of the block matrix is
/// constant (within 1e-12).
pub fn population_score_sbm(block: &[Vec<f64>], k: usize) -> PopulationScore {
    let column = block.iter().map(|row| row[k - 1]);
    let (lo, hi) = column.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    if hi - lo <= 1e-12 {
        PopulationScore::Zero
    } else {
        PopulationScore::Positive
    }
}

/// Communities whose population score is positive.
pub fn principal_communities_sbm(block: &[Vec<f64>]) -> Vec<usize> {
    (1..=block.len())
        .filter(|&k| population_score_sbm(block, k) == PopulationScore::Positive)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_block(n: usize, within: f64, between: f64) -> SbmSpec {
        SbmSpec {
            n,
            priors: vec![0.5, 0.5],
            block: vec![vec![within, between], vec![between, within]],
            directed: false,
        }
    }

    // (edges, pairs) between classes a and b (1-based)
    fn block_counts(s: &Sample, a: usize, b: usize) -> (usize, usize) {
        let y = &s.labels;
        let edges = s
            .graph
            .edges()
            .iter()
            .filter(|&&(i, j)| {
                let (p, q) = (y.get(i as usize), y.get(j as usize));
                (p, q) == (a, b) || (p, q) == (b, a)
            })
            .count();
        let (na, nb) = (y.class_count(a), y.class_count(b));
        let pairs = if a == b { na * (na - 1) / 2 } else { na * nb };
        (edges, pairs)
    }

    fn within_4_sigma(hits: usize, trials: usize, p: f64) -> bool {
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        (hits as f64 / trials as f64 - p).abs() <= 4.0 * sd
    }

    #[test]
    fn degenerate_block_matrices() {
        let empty = sample_sbm(&two_block(50, 0.0, 0.0), 1).unwrap();
        assert_eq!(empty.graph.s(), 0);
        let full = sample_sbm(&two_block(50, 1.0, 1.0), 1).unwrap();
        assert_eq!(full.graph.s(), 50 * 49 / 2);
        let sparse_full = sample_sbm_sparse(&two_block(50, 1.0, 1.0), 1).unwrap();
        assert_eq!(sparse_full.graph.edges(), full.graph.edges());
    }

    #[test]
    fn two_block_density_band() {
        let s = sample_sbm(&two_block(2000, 0.5, 0.1), 3).unwrap();
        for class in 1..=2 {
            let (e, pairs) = block_counts(&s, class, class);
            let density = e as f64 / pairs as f64;
            assert!((0.48..=0.52).contains(&density), "{density}");
        }
        let (e, pairs) = block_counts(&s, 1, 2);
        assert!(within_4_sigma(e, pairs, 0.1));
    }

    #[test]
    fn skipping_sampler_matches_block_means() {
        let spec = match simulation_preset(ModelKind::Sbm, 3000).unwrap() {
            ModelSpec::Sbm(s) => s,
            _ => unreachable!(),
        };
        let s = sample_sbm_sparse(&spec, 11).unwrap();
        // same label stream as the pair-by-pair sampler
        assert_eq!(s.labels, sample_sbm(&spec, 11).unwrap().labels);
        for (a, b) in [(1, 1), (2, 2), (3, 3), (1, 2), (4, 4), (5, 17), (1, 20)] {
            let (e, pairs) = block_counts(&s, a, b);
            assert!(
                within_4_sigma(e, pairs, spec.block[a - 1][b - 1]),
                "block ({a}, {b})"
            );
        }
    }

    #[test]
    fn constant_degrees_reduce_to_sbm() {
        let sbm = two_block(300, 0.3, 0.05);
        let dc = DcsbmSpec {
            sbm: sbm.clone(),
            degree_law: DegreeLaw::Constant { value: 1.0 },
        };
        let a = sample_sbm(&sbm, 8).unwrap();
        let b = sample_dcsbm(&dc, 8).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn beta_degree_mean() {
        let dc = DcsbmSpec {
            sbm: SbmSpec {
                n: 10000,
                priors: vec![1.0],
                block: vec![vec![0.0]],
                directed: false,
            },
            degree_law: DegreeLaw::Beta {
                alpha: 1.0,
                beta: 5.0,
                beta_per_class: 0.0,
            },
        };
        let theta = sample_dcsbm(&dc, 4).unwrap().degrees.unwrap();
        let mean = theta.iter().sum::<f64>() / theta.len() as f64;
        assert!((0.157..=0.177).contains(&mean), "{mean}");
        assert!(theta.iter().all(|t| (0.0..=1.0).contains(t)));
    }

    #[test]
    fn dcsbm_preset_block_density() {
        let spec = simulation_preset(ModelKind::Dcsbm, 2000).unwrap();
        let s = spec.sample(5).unwrap();
        let theta = s.degrees.as_ref().unwrap();
        let class1: Vec<usize> = (0..2000).filter(|&v| s.labels.get(v) == 1).collect();
        // expected edges given the sampled degrees, with the matching variance
        let (mut mean, mut var) = (0.0, 0.0);
        for (x, &i) in class1.iter().enumerate() {
            for &j in &class1[x + 1..] {
                let p = 0.9 * theta[i] * theta[j];
                mean += p;
                var += p * (1.0 - p);
            }
        }
        let (e, _) = block_counts(&s, 1, 1);
        assert!((e as f64 - mean).abs() <= 4.0 * var.sqrt());
        // and the sampled degrees follow Beta(1, 5 + 1/5)
        let m = class1.iter().map(|&v| theta[v]).sum::<f64>() / class1.len() as f64;
        let law = DegreeLaw::Beta {
            alpha: 1.0,
            beta: 5.0,
            beta_per_class: 0.2,
        };
        let expected = law.mean(1);
        let sd = (expected * (1.0 - expected) / 7.2 / class1.len() as f64).sqrt();
        assert!((m - expected).abs() <= 4.0 * sd, "{m} vs {expected}");
    }

    fn point_mass(coords: &[f64]) -> RdpgSpec {
        RdpgSpec {
            n: 2,
            priors: vec![1.0],
            latent_dim: coords.len(),
            latent_law: vec![coords.iter().map(|&c| UniformRange::new(c, c)).collect()],
            directed: false,
        }
    }

    #[test]
    fn rdpg_point_masses() {
        let mut zero = point_mass(&[0.0, 0.0]);
        zero.n = 40;
        assert_eq!(sample_rdpg(&zero, 1).unwrap().graph.s(), 0);
        let one = sample_rdpg(&point_mass(&[1.0, 0.0, 0.0]), 1).unwrap();
        assert!(one.graph.has_edge(0, 1));
        assert!(point_mass(&[1.0, 0.5]).validate().is_err());
    }

    #[test]
    fn rdpg_preset_class_one_probability() {
        let spec = match simulation_preset(ModelKind::Rdpg, 5000).unwrap() {
            ModelSpec::Rdpg(s) => s,
            _ => unreachable!(),
        };
        let analytic = 0.25f64.powi(2) + 3.0 * 0.05f64.powi(2);
        assert!((spec.mean_inner_product(1, 1) - analytic).abs() < 1e-15);
        // attained by two class-1 vertices at the top of every range; well
        // under the crude bound 4 * 0.3^2
        let attained = 0.3f64.powi(2) + 3.0 * 0.1f64.powi(2);
        assert!((spec.max_inner_product() - attained).abs() < 1e-15);
        assert!(spec.max_inner_product() <= 4.0 * 0.3f64.powi(2));
        let s = sample_rdpg(&spec, 6).unwrap();
        let u = s.latents.as_ref().unwrap();
        let class1: Vec<usize> = (0..5000).filter(|&v| s.labels.get(v) == 1).collect();
        // conditional on the latents the count is a sum of Bernoulli draws
        let (mut mean, mut var) = (0.0, 0.0);
        for (x, &i) in class1.iter().enumerate() {
            for &j in &class1[x + 1..] {
                let p = u.row(i).dot(&u.row(j));
                mean += p;
                var += p * (1.0 - p);
            }
        }
        let (e, pairs) = block_counts(&s, 1, 1);
        assert!((e as f64 - mean).abs() <= 4.0 * var.sqrt());
        // the latent draws themselves centre on the uniform means
        for (d, law) in spec.latent_law[0].iter().enumerate() {
            let m = class1.iter().map(|&v| u[[v, d]]).sum::<f64>() / class1.len() as f64;
            let sd = (law.hi - law.lo) / (12.0 * class1.len() as f64).sqrt();
            assert!((m - law.mean()).abs() <= 4.0 * sd);
        }
        // unconditional band: the pair average is a U-statistic with
        // Var ~ 4 zeta1 / m + 2 zeta2 / m^2, zeta1 = Var<U, mu>, zeta2 = p(1 - p)
        let mu: Vec<f64> = spec.latent_law[0].iter().map(|r| r.mean()).collect();
        let zeta1: f64 = spec.latent_law[0]
            .iter()
            .zip(&mu)
            .map(|(r, m)| m * m * (r.hi - r.lo).powi(2) / 12.0)
            .sum();
        let p = analytic;
        let m = class1.len() as f64;
        let sd = (4.0 * zeta1 / m + 2.0 * p * (1.0 - p) / (m * m)).sqrt();
        let density = e as f64 / pairs as f64;
        assert!(
            (density - p).abs() <= 4.0 * sd,
            "{density} vs {p} (sd {sd})"
        );
    }

    #[test]
    fn label_frequencies_track_priors() {
        for kind in ModelKind::ALL {
            let spec = simulation_preset(kind, 10000).unwrap();
            let priors = preset_priors(PRESET_CLASSES);
            let labels = sample_labels(&priors, spec.n(), 21).unwrap();
            for (k, &p) in priors.iter().enumerate() {
                let freq = labels.class_count(k + 1) as f64 / 10000.0;
                assert!((freq - p).abs() <= 4.0 * (p * (1.0 - p) / 10000.0).sqrt());
            }
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        for kind in ModelKind::ALL {
            let spec = simulation_preset(kind, 300).unwrap();
            assert_eq!(spec.sample(42).unwrap(), spec.sample(42).unwrap());
            assert_ne!(
                spec.sample(42).unwrap().graph,
                spec.sample(43).unwrap().graph
            );
        }
    }

    #[test]
    fn preset_parameters() {
        let sbm = match simulation_preset(ModelKind::Sbm, 5000).unwrap() {
            ModelSpec::Sbm(s) => s,
            _ => unreachable!(),
        };
        assert_eq!(sbm.block[0][0], 0.2);
        assert_eq!(sbm.block[4][4], 0.1);
        assert_eq!(sbm.priors[0], 0.25);
        assert!((sbm.priors[19] - 0.25 / 17.0).abs() < 1e-15);
        let dc = match simulation_preset(ModelKind::Dcsbm, 100).unwrap() {
            ModelSpec::Dcsbm(s) => s,
            _ => unreachable!(),
        };
        assert_eq!(dc.sbm.block[2][2], 0.5);
        assert_eq!(dc.sbm.block[0][0], 0.9);
        let rdpg = match simulation_preset(ModelKind::Rdpg, 100).unwrap() {
            ModelSpec::Rdpg(s) => s,
            _ => unreachable!(),
        };
        assert_eq!(rdpg.latent_dim, 4);
        assert!(simulation_preset(ModelKind::Rdpg, 10).is_err());
    }

    #[test]
    fn population_scores() {
        let b = vec![
            vec![0.3, 0.1, 0.2],
            vec![0.1, 0.1, 0.1],
            vec![0.2, 0.1, 0.4],
        ];
        assert_eq!(population_score_sbm(&b, 2), PopulationScore::Zero);
        assert_eq!(principal_communities_sbm(&b), vec![1, 3]);
        let sbm = match simulation_preset(ModelKind::Sbm, 100).unwrap() {
            ModelSpec::Sbm(s) => s,
            _ => unreachable!(),
        };
        assert_eq!(
            principal_communities_sbm(&sbm.block),
            PRESET_PRINCIPAL.to_vec()
        );
        let bump: Vec<Vec<f64>> = (0..4)
            .map(|a| (0..4).map(|b| if a == b { 0.6 } else { 0.1 }).collect())
            .collect();
        assert_eq!(principal_communities_sbm(&bump), vec![1, 2, 3, 4]);
    }

    #[test]
    fn spec_validation() {
        let mut bad = two_block(10, 0.5, 0.1);
        bad.priors = vec![0.6, 0.6];
        assert!(bad.validate().is_err());
        let mut asym = two_block(10, 0.5, 0.1);
        asym.block[0][1] = 0.2;
        assert!(asym.validate().is_err());
        asym.directed = true;
        assert!(asym.validate().is_ok());
        let mut range = two_block(10, 1.5, 0.1);
        range.directed = true;
        assert!(range.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        for kind in ModelKind::ALL {
            let spec = simulation_preset(kind, 250).unwrap();
            let text = spec.to_toml().unwrap();
            assert_eq!(ModelSpec::from_toml(&text).unwrap(), spec);
        }
    }

    #[test]
    fn scaled_preset_edge_budget() {
        let spec = scaled_sbm_preset(20000, 40, 200_000.0).unwrap();
        let s = sample_sbm_sparse(&spec, 2).unwrap();
        let expected = 200_000.0;
        assert!(
            (s.graph.s() as f64 - expected).abs() < 0.02 * expected,
            "{}",
            s.graph.s()
        );
        assert_eq!(
            principal_communities_sbm(&spec.block),
            PRESET_PRINCIPAL.to_vec()
        );
    }
}
