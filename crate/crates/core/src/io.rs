//! Text formats: edge lists, label files, embedding CSV + JSON sidecar and
//! the scores table.
//!
//! Vertex ids are 0-based internally. Files may use 0- or 1-based ids; the
//! base is detected on load and used again when writing.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::encoder::Embedding;
use crate::error::{Error, Result};
use crate::graph::{BuildStats, Graph};
use crate::labels::LabelVector;
use crate::principal::CommunityScoreReport;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdBase {
    #[default]
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

impl IdBase {
    pub fn offset(self) -> usize {
        match self {
            IdBase::Zero => 0,
            IdBase::One => 1,
        }
    }
}

/// Result of [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct EdgeListFile {
    pub graph: Graph,
    pub base: IdBase,
    pub stats: BuildStats,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Reads a whitespace-separated edge list (`i j` or `i j w`, `#` comments).
///
/// A leading comment of the form `# vertices: N base: B` (as written by
/// [`write_edge_list`]) fixes the vertex count and id base; otherwise the base
/// is 0 when the smallest id is 0 and 1 otherwise, and `n` is the largest id.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<EdgeListFile> {
    let path = path.as_ref();
    parse_edge_list(open(path)?, path, directed)
}

pub fn parse_edge_list(reader: impl Read, name: &Path, directed: bool) -> Result<EdgeListFile> {
    let reader = BufReader::new(reader);
    let mut header: Option<(usize, IdBase)> = None;
    let mut raw: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if raw.is_empty() && header.is_none() {
                header = parse_header(comment);
            }
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: name.to_path_buf(),
            line: line_no,
            reason,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(format!(
                "expected `i j` or `i j w`, found {} fields",
                fields.len()
            )));
        }
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(format!("invalid vertex id `{s}`")))
        };
        let i = id(fields[0])?;
        let j = id(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => Some(
                s.parse::<f64>()
                    .map_err(|_| parse_err(format!("invalid weight `{s}`")))?,
            ),
            None => None,
        };
        raw.push((i, j, w));
    }
    // a header alone describes an edgeless graph
    if raw.is_empty() && header.is_none() {
        return Err(Error::EmptyInput(name.to_path_buf()));
    }

    let min_id = raw.iter().map(|e| e.0.min(e.1)).min().unwrap_or(0);
    let max_id = raw.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0);
    let (n, base) = match header {
        Some((n, base)) => (n, base),
        None => {
            let base = if min_id == 0 {
                IdBase::Zero
            } else {
                IdBase::One
            };
            (max_id + 1 - base.offset(), base)
        }
    };
    let shift = base.offset();
    if !raw.is_empty() && min_id < shift {
        return Err(Error::Parse {
            path: name.to_path_buf(),
            line: 0,
            reason: "vertex id 0 in a 1-based file".into(),
        });
    }
    let weighted = raw.iter().any(|e| e.2.is_some());
    let (graph, stats) = if weighted {
        Graph::from_weighted_edges(
            n,
            raw.into_iter()
                .map(|(i, j, w)| (i - shift, j - shift, w.unwrap_or(1.0))),
            directed,
        )?
    } else {
        Graph::from_edges(
            n,
            raw.into_iter().map(|(i, j, _)| (i - shift, j - shift)),
            directed,
        )?
    };
    Ok(EdgeListFile { graph, base, stats })
}

fn parse_header(comment: &str) -> Option<(usize, IdBase)> {
    let mut n = None;
    let mut base = IdBase::Zero;
    let mut tokens = comment.split_whitespace();
    while let Some(key) = tokens.next() {
        match key {
            "vertices:" => n = tokens.next()?.parse().ok(),
            "base:" => {
                base = match tokens.next()? {
                    "0" => IdBase::Zero,
                    "1" => IdBase::One,
                    _ => return None,
                }
            }
            _ => {}
        }
    }
    n.map(|n| (n, base))
}

/// Writes the canonical (sorted) edge list with a header recording `n` and
/// the id base.
pub fn write_edge_list(graph: &Graph, mut out: impl Write, base: IdBase) -> std::io::Result<()> {
    let shift = base.offset();
    writeln!(
        out,
        "# vertices: {} base: {} directed: {}",
        graph.n(),
        shift,
        graph.is_directed()
    )?;
    match graph.weights() {
        Some(weights) => {
            for (&(i, j), w) in graph.edges().iter().zip(weights) {
                writeln!(out, "{} {} {}", i as usize + shift, j as usize + shift, w)?;
            }
        }
        None => {
            for &(i, j) in graph.edges() {
                writeln!(out, "{} {}", i as usize + shift, j as usize + shift)?;
            }
        }
    }
    Ok(())
}

pub fn save_edge_list(graph: &Graph, path: impl AsRef<Path>, base: IdBase) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_edge_list(graph, &mut out, base)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads labels for `n` vertices: either one integer per line, or
/// `vertex,label` CSV rows (optional header) covering every vertex once with
/// 0- or 1-based ids.
pub fn load_labels(path: impl AsRef<Path>, n: usize) -> Result<LabelVector> {
    let path = path.as_ref();
    parse_labels(open(path)?, path, n)
}

pub fn parse_labels(reader: impl Read, name: &Path, n: usize) -> Result<LabelVector> {
    let reader = BufReader::new(reader);
    let mut plain: Vec<usize> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut first_data = true;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: name.to_path_buf(),
            line: line_no,
            reason,
        };
        let label = |s: &str| -> Result<usize> {
            let v: i64 = s
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("invalid label `{s}`")))?;
            if v < 0 {
                return Err(parse_err(format!("negative label {v}")));
            }
            Ok(v as usize)
        };
        if let Some((a, b)) = line.split_once(',') {
            if first_data && a.trim().parse::<i64>().is_err() {
                // header row
                first_data = false;
                continue;
            }
            let v = a
                .trim()
                .parse::<usize>()
                .map_err(|_| parse_err(format!("invalid vertex id `{a}`")))?;
            pairs.push((v, label(b)?));
        } else {
            plain.push(label(line)?);
        }
        first_data = false;
    }
    if plain.is_empty() && pairs.is_empty() {
        return Err(Error::EmptyInput(name.to_path_buf()));
    }
    if !plain.is_empty() && !pairs.is_empty() {
        return Err(Error::Parse {
            path: name.to_path_buf(),
            line: 0,
            reason: "mixes plain and `vertex,label` rows".into(),
        });
    }
    let labels = if pairs.is_empty() {
        plain
    } else {
        if pairs.len() != n {
            return Err(Error::LengthMismatch {
                labels: pairs.len(),
                vertices: n,
            });
        }
        let shift = if pairs.iter().any(|p| p.0 == 0) { 0 } else { 1 };
        let mut out = vec![None; n];
        for (v, l) in pairs {
            let idx = v
                .checked_sub(shift)
                .filter(|&i| i < n)
                .ok_or(Error::VertexOutOfRange { vertex: v, n })?;
            if out[idx].replace(l).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} labeled twice in {}",
                    name.display()
                )));
            }
        }
        out.into_iter().map(|l| l.unwrap_or(0)).collect()
    };
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            vertices: n,
        });
    }
    LabelVector::from_labels(labels)
}

/// Number of label rows in `text`: data lines whose first field is an
/// integer.
fn count_label_rows(text: &str) -> usize {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter(|l| {
            l.split(',')
                .next()
                .is_some_and(|a| a.trim().parse::<i64>().is_ok())
        })
        .count()
}

/// Reads an edge list and its label file. The label file fixes the vertex
/// count, so vertices with no edges keep their labels; it may not list fewer
/// vertices than the edges mention.
pub fn load_labeled_graph(
    edges: impl AsRef<Path>,
    labels: impl AsRef<Path>,
    directed: bool,
) -> Result<(EdgeListFile, LabelVector)> {
    let labels_path = labels.as_ref();
    let text = std::fs::read_to_string(labels_path).map_err(|e| Error::io(labels_path, e))?;
    let y = parse_labels(text.as_bytes(), labels_path, count_label_rows(&text))?;
    let mut file = load_edge_list(edges, directed)?;
    if y.len() < file.graph.n() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: file.graph.n(),
        });
    }
    file.graph = file.graph.with_vertex_count(y.len())?;
    Ok((file, y))
}

/// One label per line.
pub fn write_labels(y: &LabelVector, mut out: impl Write) -> std::io::Result<()> {
    for &l in y.as_slice() {
        writeln!(out, "{l}")?;
    }
    Ok(())
}

pub fn save_labels(y: &LabelVector, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_labels(y, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// JSON sidecar written next to an embedding CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMeta {
    pub column_labels: Vec<usize>,
    pub normalized: bool,
    /// `n_k` for `k = 1..=K`.
    pub class_counts: Vec<usize>,
    pub id_base: IdBase,
}

/// CSV with header `vertex,z_1,...,z_d`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_embedding_csv(
    z: &Embedding,
    mut out: impl Write,
    base: IdBase,
) -> std::io::Result<()> {
    let header: Vec<String> = (1..=z.dim()).map(|c| format!("z_{c}")).collect();
    if header.is_empty() {
        writeln!(out, "vertex")?;
    } else {
        writeln!(out, "vertex,{}", header.join(","))?;
    }
    let mut line = String::new();
    for (v, row) in z.values().rows().into_iter().enumerate() {
        line.clear();
        line.push_str(&(v + base.offset()).to_string());
        for x in row {
            line.push(',');
            line.push_str(&x.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `path` and its `.json` sidecar.
pub fn save_embedding(
    z: &Embedding,
    y: &LabelVector,
    path: impl AsRef<Path>,
    base: IdBase,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_embedding_csv(z, &mut out, base)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))?;
    let meta = EmbeddingMeta {
        column_labels: z.column_labels().to_vec(),
        normalized: z.is_normalized(),
        class_counts: y.class_counts().to_vec(),
        id_base: base,
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Serialize(e.to_string()))?;
    let side = sidecar_path(path);
    std::fs::write(&side, json + "\n").map_err(|e| Error::io(side, e))
}

/// Reads an embedding CSV and its sidecar.
pub fn load_embedding(path: impl AsRef<Path>) -> Result<(Embedding, EmbeddingMeta)> {
    let path = path.as_ref();
    let side = sidecar_path(path);
    let meta_text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: EmbeddingMeta =
        serde_json::from_str(&meta_text).map_err(|e| Error::Serialize(e.to_string()))?;
    let d = meta.column_labels.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (idx, line) in open(path)?.lines().enumerate().skip(1) {
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                reason: format!("expected {} fields, found {}", d + 1, fields.len()),
            });
        }
        for f in &fields[1..] {
            values.push(f.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                reason: format!("invalid value `{f}`"),
            })?);
        }
        rows += 1;
    }
    let values = Array2::from_shape_vec((rows, d), values).expect("rows * d values");
    let z = Embedding::new(values, meta.column_labels.clone(), meta.normalized)?;
    Ok((z, meta))
}

/// `community,lambda,principal` table preceded by comment lines with the
/// thresholds.
pub fn write_scores_csv(report: &CommunityScoreReport, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# epsilon_elbow={}", report.epsilon_elbow)?;
    writeln!(out, "# epsilon={}", report.epsilon)?;
    writeln!(out, "community,lambda,principal")?;
    for (c, &lambda) in report.lambda_hat.iter().enumerate() {
        let community = c + 1;
        writeln!(
            out,
            "{},{},{}",
            community,
            format_score(lambda),
            report.is_principal(community)
        )?;
    }
    Ok(())
}

fn format_score(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoresTable {
    pub epsilon_elbow: f64,
    pub epsilon: f64,
    pub rows: Vec<(usize, f64, bool)>,
}

pub fn parse_scores_csv(reader: impl Read) -> Result<ScoresTable> {
    let bad = |reason: String| Error::Parse {
        path: PathBuf::from("scores.csv"),
        line: 0,
        reason,
    };
    let mut table = ScoresTable {
        epsilon_elbow: f64::NAN,
        epsilon: f64::NAN,
        rows: Vec::new(),
    };
    for line in BufReader::new(reader).lines() {
        let line = line.map_err(|e| Error::io("scores.csv", e))?;
        if let Some(c) = line.strip_prefix("# ") {
            if let Some((k, v)) = c.split_once('=') {
                let v: f64 = v
                    .parse()
                    .map_err(|_| bad(format!("bad value in `{line}`")))?;
                match k {
                    "epsilon_elbow" => table.epsilon_elbow = v,
                    "epsilon" => table.epsilon = v,
                    _ => {}
                }
            }
            continue;
        }
        if line.starts_with("community") || line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(bad(format!("bad row `{line}`")));
        }
        let c = f[0].parse().map_err(|_| bad(format!("bad row `{line}`")))?;
        let lambda = f[1].parse().map_err(|_| bad(format!("bad row `{line}`")))?;
        let p = f[2].parse().map_err(|_| bad(format!("bad row `{line}`")))?;
        table.rows.push((c, lambda, p));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(text: &str, directed: bool) -> Result<EdgeListFile> {
        parse_edge_list(text.as_bytes(), Path::new("test.txt"), directed)
    }

    fn labels(text: &str, n: usize) -> Result<LabelVector> {
        parse_labels(text.as_bytes(), Path::new("labels.txt"), n)
    }

    #[test]
    fn edge_list_examples() {
        let f = edges("0 1\n1 2", false).unwrap();
        assert_eq!((f.graph.n(), f.graph.s()), (3, 2));
        assert_eq!(f.graph.neighbors(1), &[0, 2]);
        assert_eq!(f.base, IdBase::Zero);

        let f = edges("0 0\n0 1", false).unwrap();
        assert_eq!((f.graph.n(), f.graph.s()), (2, 1));
        assert_eq!(f.stats.self_loops_dropped, 1);

        let f = edges("0 1\n0 1\n1 0", false).unwrap();
        assert_eq!((f.graph.n(), f.graph.s()), (2, 1));
    }

    #[test]
    fn one_based_and_comments() {
        let f = edges("# a comment\n1 2\n\n2 3 # trailing\n", false);
        // trailing comments are not part of the format
        assert!(f.is_err());
        let f = edges("# a comment\n1 2\n\n2 3\n", false).unwrap();
        assert_eq!(f.base, IdBase::One);
        assert_eq!(f.graph.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match edges("0 1\n1 x\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            edges("0 1 2 3", false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            edges("# only\n", false),
            Err(Error::EmptyInput(_))
        ));
        let g = edges("# vertices: 3 base: 1\n", false).unwrap();
        assert_eq!((g.graph.n(), g.graph.s()), (3, 0));
    }

    #[test]
    fn weights_are_kept() {
        let f = edges("0 1 0.5\n1 2\n", false).unwrap();
        assert_eq!(f.graph.weights().unwrap(), &[0.5, 1.0]);
    }

    #[test]
    fn header_preserves_isolated_vertices() {
        let (g, _) = Graph::from_edges(5, [(1, 2)], false).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf, IdBase::Zero).unwrap();
        let back = edges(std::str::from_utf8(&buf).unwrap(), false).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(back.base, IdBase::Zero);
    }

    #[test]
    fn label_examples() {
        let y = labels("1\n2\n1", 3).unwrap();
        assert_eq!((y.num_classes(), y.class_counts()), (2, &[2, 1][..]));
        let y = labels("0\n1\n1", 3).unwrap();
        assert_eq!((y.num_classes(), y.class_counts()), (1, &[2][..]));
        assert!(matches!(labels("1\n3", 2), Err(Error::EmptyClass(2))));
        assert!(matches!(
            labels("1\n2", 3),
            Err(Error::LengthMismatch {
                labels: 2,
                vertices: 3
            })
        ));
        assert!(matches!(
            labels("1\n-2", 2),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn csv_labels() {
        let y = labels("vertex,label\n1,2\n2,1\n3,1\n", 3).unwrap();
        assert_eq!(y.to_vec(), vec![2, 1, 1]);
        let y = labels("2,1\n0,1\n1,2\n", 3).unwrap();
        assert_eq!(y.to_vec(), vec![1, 2, 1]);
        assert!(labels("0,1\n0,2\n", 2).is_err());
    }

    #[test]
    fn scores_round_trip() {
        let report = CommunityScoreReport {
            lambda_hat: vec![2.5, f64::INFINITY, 0.1],
            mu_hat: Array2::zeros((3, 3)),
            sigma_hat: Array2::zeros((3, 3)),
            elbows: vec![1],
            epsilon_elbow: 0.1,
            epsilon: 0.7,
            principal_set: vec![1, 2],
            fell_back: false,
        };
        let mut buf = Vec::new();
        write_scores_csv(&report, &mut buf).unwrap();
        let table = parse_scores_csv(&buf[..]).unwrap();
        assert_eq!(table.epsilon, 0.7);
        assert_eq!(table.epsilon_elbow, 0.1);
        assert_eq!(
            table.rows,
            vec![(1, 2.5, true), (2, f64::INFINITY, true), (3, 0.1, false)]
        );
    }
}
