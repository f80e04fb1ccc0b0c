use crate::error::{Error, Result};

/// Per-vertex class labels in `0..=K`, where 0 marks an unknown label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<u32>,
    num_classes: usize,
    class_counts: Vec<usize>,
}

impl LabelVector {
    /// Strict constructor: `K` is the largest label and every class in
    /// `1..=K` must have at least one vertex.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().unwrap_or(0);
        let y = Self::with_num_classes(labels, k)?;
        if let Some(empty) = y.class_counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass(empty + 1));
        }
        Ok(y)
    }

    /// Labels over a fixed class range `1..=num_classes`. Classes may be
    /// empty; this is what fold masking and noise injection produce.
    pub fn with_num_classes(labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if num_classes == 0 {
            return Err(Error::NoKnownLabels);
        }
        let mut class_counts = vec![0usize; num_classes];
        let mut stored = Vec::with_capacity(labels.len());
        for (v, &label) in labels.iter().enumerate() {
            if label > num_classes {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} has label {label} above the class count {num_classes}"
                )));
            }
            if label > 0 {
                class_counts[label - 1] += 1;
            }
            stored.push(label as u32);
        }
        if class_counts.iter().all(|&c| c == 0) {
            return Err(Error::NoKnownLabels);
        }
        Ok(LabelVector {
            labels: stored,
            num_classes,
            class_counts,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `K`.
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// `n_k` for `k = 1..=K`, indexed from zero.
    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn class_count(&self, class: usize) -> usize {
        self.class_counts[class - 1]
    }

    pub fn get(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.labels
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.labels.iter().map(|&l| l as usize).collect()
    }

    pub fn known_count(&self) -> usize {
        self.class_counts.iter().sum()
    }

    /// Vertices with a known label, ascending.
    pub fn known_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.labels[v] > 0).collect()
    }

    /// Copy with the given vertices set to unknown. `K` is kept.
    pub fn masked(&self, hidden: &[usize]) -> Result<Self> {
        let mut labels = self.to_vec();
        for &v in hidden {
            if v >= labels.len() {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: labels.len(),
                });
            }
            labels[v] = 0;
        }
        Self::with_num_classes(labels, self.num_classes)
    }

    /// Applies `map[k - 1]` to every known label; 0 stays 0.
    pub fn relabel_classes(&self, map: &[usize]) -> Result<Self> {
        if map.len() != self.num_classes {
            return Err(Error::DimensionMismatch {
                expected: self.num_classes,
                got: map.len(),
            });
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| if l == 0 { 0 } else { map[l as usize - 1] })
            .collect();
        Self::with_num_classes(labels, self.num_classes)
    }
}
