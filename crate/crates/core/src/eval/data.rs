//! Loading and cleaning labeled real-world graphs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::load_labeled_graph;
use crate::labels::LabelVector;

/// Environment variable naming the directory that holds one sub-directory
/// per dataset, each with `edges.txt` and `labels.txt`.
pub const DATA_DIR_VAR: &str = "PGEE_DATA_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub labels: LabelVector,
    pub summary: DatasetSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub vertices_in: usize,
    pub isolated_dropped: usize,
    pub vertices: usize,
    pub edges: usize,
    pub classes: usize,
}

/// Symmetrizes and drops isolated vertices. Classes keep their ids even if a
/// class loses every member.
pub fn prepare_graph(g: &Graph, y: &LabelVector) -> Result<(Graph, LabelVector, DatasetSummary)> {
    if g.n() != y.len() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: g.n(),
        });
    }
    let undirected = g.to_undirected();
    let keep = undirected.non_isolated();
    let graph = undirected.induced(&keep)?;
    let labels =
        LabelVector::with_num_classes(keep.iter().map(|&v| y.get(v)).collect(), y.num_classes())?;
    let summary = DatasetSummary {
        vertices_in: g.n(),
        isolated_dropped: g.n() - keep.len(),
        vertices: graph.n(),
        edges: graph.s(),
        classes: labels.num_classes(),
    };
    Ok((graph, labels, summary))
}

/// Directory searched for `name`: `$PGEE_DATA_DIR/name` when the variable is
/// set, otherwise `data/name` under `fallback_root`.
pub fn dataset_dir(name: &str, fallback_root: &Path) -> PathBuf {
    match std::env::var_os(DATA_DIR_VAR) {
        Some(dir) => PathBuf::from(dir).join(name),
        None => fallback_root.join("data").join(name),
    }
}

/// Loads `dir/edges.txt` and `dir/labels.txt` and cleans them with
/// [`prepare_graph`]. The label file fixes the vertex count.
pub fn load_dataset(name: &str, dir: &Path) -> Result<Dataset> {
    let edges_path = dir.join("edges.txt");
    let labels_path = dir.join("labels.txt");
    for p in [&edges_path, &labels_path] {
        if !p.is_file() {
            return Err(Error::io(
                p,
                std::io::Error::new(std::io::ErrorKind::NotFound, "not found"),
            ));
        }
    }
    let (file, labels) = load_labeled_graph(&edges_path, &labels_path, false)?;
    let (graph, labels, summary) = prepare_graph(&file.graph, &labels)?;
    Ok(Dataset {
        name: name.to_string(),
        graph,
        labels,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prepare_drops_isolated_and_symmetrizes() {
        let (g, _) = Graph::from_edges(5, [(0, 1), (1, 0), (3, 1)], true).unwrap();
        let y = LabelVector::from_labels(vec![1, 2, 3, 1, 2]).unwrap();
        let (h, z, summary) = prepare_graph(&g, &y).unwrap();
        assert!(!h.is_directed());
        assert_eq!(h.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(z.to_vec(), vec![1, 2, 1]);
        assert_eq!(z.num_classes(), 3);
        assert_eq!(summary.isolated_dropped, 2);
    }

    #[test]
    fn missing_dataset_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_dataset("cora", &dir.path().join("cora")).unwrap_err();
        assert!(err.to_string().contains("edges.txt"), "{err}");
    }
}
