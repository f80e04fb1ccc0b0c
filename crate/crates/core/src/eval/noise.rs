use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelVector;
use crate::seed::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Fraction of labeled vertices to corrupt.
    pub fraction: f64,
    /// Number of extra classes the corrupted vertices are spread over.
    pub classes: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            fraction: 0.10,
            classes: 30,
        }
    }
}

/// Moves `floor(fraction * known)` uniformly chosen labeled vertices into
/// classes `K + 1 ..= K + noise_classes`, each chosen uniformly. Unknown
/// vertices are never touched. The result has `K + noise_classes` classes,
/// some of which may be empty.
pub fn corrupt_labels(
    y: &LabelVector,
    fraction: f64,
    noise_classes: usize,
    seed: u64,
) -> Result<LabelVector> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "noise fraction {fraction} outside [0, 1]"
        )));
    }
    if noise_classes == 0 && fraction > 0.0 {
        return Err(Error::InvalidArgument(
            "noise needs at least one extra class".into(),
        ));
    }
    let known = y.known_vertices();
    let count = (fraction * known.len() as f64).floor() as usize;
    if count == 0 {
        return Ok(y.clone());
    }
    let k = y.num_classes();
    let mut rng = stream_rng(seed, Stream::Noise, 0);
    let mut labels = y.to_vec();
    let picked = sample(&mut rng, known.len(), count);
    for idx in picked.iter() {
        labels[known[idx]] = k + 1 + rng.random_range(0..noise_classes);
    }
    LabelVector::with_num_classes(labels, k + noise_classes)
}
