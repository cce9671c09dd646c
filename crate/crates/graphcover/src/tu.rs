//! Reader and writer for the TUDataset plain-text format.
//!
//! A dataset `NAME` lives in one directory as `NAME_A.txt` (edges, 1-based global
//! vertex ids), `NAME_graph_indicator.txt`, `NAME_graph_labels.txt` and the optional
//! `NAME_node_labels.txt`.

use crate::graph::{GraphCollection, LabeledGraph};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("{file}: malformed line {line}")]
    MalformedLine { file: String, line: usize },
    #[error("inconsistent graph indicator: {0}")]
    InconsistentIndicator(String),
    #[error("graph labels take {0} distinct values; at most two are supported")]
    TooManyGraphLabels(usize),
    #[error("node labels are not one-hot")]
    NotOneHot,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn file_path(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

fn read_lines(path: &Path) -> Result<Vec<String>, IngestError> {
    if !path.is_file() {
        return Err(IngestError::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    let mut lines: Vec<String> = text.lines().map(|l| l.trim().to_string()).collect();
    while lines.last().is_some_and(String::is_empty) {
        lines.pop();
    }
    Ok(lines)
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn parse_ints(path: &Path) -> Result<Vec<i64>, IngestError> {
    let lines = read_lines(path)?;
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.parse::<i64>().map_err(|_| IngestError::MalformedLine {
                file: file_label(path),
                line: i + 1,
            })
        })
        .collect()
}

/// Reads dataset `name` from `dir`.
///
/// Node labels are one-hot encoded over the observed label values in ascending
/// order; graph labels are mapped in ascending order onto `{0, 1}`.
pub fn ingest_tu_dataset<T: Scalar>(dir: &Path, name: &str) -> Result<GraphCollection<T>, IngestError> {
    let a_path = file_path(dir, name, "A");
    let ind_path = file_path(dir, name, "graph_indicator");
    let gl_path = file_path(dir, name, "graph_labels");
    let nl_path = file_path(dir, name, "node_labels");

    let indicator = parse_ints(&ind_path)?;
    let graph_labels = parse_ints(&gl_path)?;
    let node_labels = if nl_path.is_file() {
        Some(parse_ints(&nl_path)?)
    } else {
        None
    };

    let num_graphs = graph_labels.len();
    let total = indicator.len();
    if let Some(nl) = &node_labels {
        if nl.len() != total {
            return Err(IngestError::InconsistentIndicator(format!(
                "{} node labels for {} vertices",
                nl.len(),
                total
            )));
        }
    }

    // Graph ids must be 1..=num_graphs, non-decreasing, each used at least once.
    let mut offsets = vec![usize::MAX; num_graphs];
    let mut sizes = vec![0usize; num_graphs];
    let mut prev = 0i64;
    for (k, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid as usize > num_graphs {
            return Err(IngestError::InconsistentIndicator(format!(
                "vertex {} assigned to graph {gid} but there are {num_graphs} graphs",
                k + 1
            )));
        }
        if gid < prev {
            return Err(IngestError::InconsistentIndicator(format!(
                "graph ids decrease at vertex {}",
                k + 1
            )));
        }
        prev = gid;
        let g = (gid - 1) as usize;
        if offsets[g] == usize::MAX {
            offsets[g] = k;
        }
        sizes[g] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return Err(IngestError::InconsistentIndicator(format!(
            "graph {} has no vertices",
            g + 1
        )));
    }

    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); num_graphs];
    for (i, line) in read_lines(&a_path)?.iter().enumerate() {
        let malformed = || IngestError::MalformedLine {
            file: file_label(&a_path),
            line: i + 1,
        };
        let mut parts = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed());
        };
        let a: usize = a.parse().map_err(|_| malformed())?;
        let b: usize = b.parse().map_err(|_| malformed())?;
        if a == 0 || b == 0 || a == b {
            return Err(malformed());
        }
        if a > total || b > total {
            return Err(IngestError::InconsistentIndicator(format!(
                "edge on line {} references vertex beyond {total}",
                i + 1
            )));
        }
        let (ga, gb) = (indicator[a - 1], indicator[b - 1]);
        if ga != gb {
            return Err(IngestError::InconsistentIndicator(format!(
                "edge on line {} joins graphs {ga} and {gb}",
                i + 1
            )));
        }
        let g = (ga - 1) as usize;
        let (u, v) = (a - 1 - offsets[g], b - 1 - offsets[g]);
        edge_sets[g].insert((u.min(v), u.max(v)));
    }

    let alphabet: BTreeMap<i64, usize> = match &node_labels {
        Some(nl) => nl
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect(),
        None => BTreeMap::new(),
    };
    let d = alphabet.len().max(1);

    let classes: Vec<i64> = graph_labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if classes.len() > 2 {
        return Err(IngestError::TooManyGraphLabels(classes.len()));
    }

    let mut coll = GraphCollection {
        graphs: Vec::with_capacity(num_graphs),
        labels: Vec::with_capacity(num_graphs),
        sources: Vec::with_capacity(num_graphs),
    };
    for g in 0..num_graphs {
        let labels: Vec<usize> = (0..sizes[g])
            .map(|v| match &node_labels {
                Some(nl) => alphabet[&nl[offsets[g] + v]],
                None => 0,
            })
            .collect();
        let graph = LabeledGraph::one_hot(sizes[g], d, edge_sets[g].iter().copied(), &labels)
            .expect("indices validated above");
        coll.graphs.push(graph);
        let class = classes.iter().position(|&c| c == graph_labels[g]).expect("label present");
        coll.labels.push(class as u8);
        coll.sources.push(format!("{name}#{}", g + 1));
    }
    Ok(coll)
}

/// Writes `coll` as dataset `name` into `dir` (created if needed).
///
/// Features must be one-hot; the node label written is the index of the 1.
pub fn write_tu_dataset<T: Scalar>(
    coll: &GraphCollection<T>,
    dir: &Path,
    name: &str,
) -> Result<(), IngestError> {
    fs::create_dir_all(dir)?;
    let mut a = String::new();
    let mut ind = String::new();
    let mut nl = String::new();
    let mut gl = String::new();
    let mut offset = 0usize;
    for (gi, g) in coll.graphs.iter().enumerate() {
        for (u, v) in g.edges() {
            a.push_str(&format!("{}, {}\n{}, {}\n", offset + u + 1, offset + v + 1, offset + v + 1, offset + u + 1));
        }
        for v in 0..g.n() {
            ind.push_str(&format!("{}\n", gi + 1));
            let l = g.label_index(v).ok_or(IngestError::NotOneHot)?;
            nl.push_str(&format!("{l}\n"));
        }
        gl.push_str(&format!("{}\n", coll.labels.get(gi).copied().unwrap_or(0)));
        offset += g.n();
    }
    for (suffix, body) in [("A", a), ("graph_indicator", ind), ("node_labels", nl), ("graph_labels", gl)] {
        let mut f = fs::File::create(file_path(dir, name, suffix))?;
        f.write_all(body.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, suffix: &str, body: &str) {
        fs::write(file_path(dir, name, suffix), body).unwrap();
    }

    #[test]
    fn toy_triangle() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "T", "A", "1, 2\n2, 3\n3, 1\n2, 1\n");
        write(dir.path(), "T", "graph_indicator", "1\n1\n1\n");
        write(dir.path(), "T", "node_labels", "0\n0\n0\n");
        write(dir.path(), "T", "graph_labels", "1\n");
        let c = ingest_tu_dataset::<f64>(dir.path(), "T").unwrap();
        assert_eq!(c.len(), 1);
        let g = &c.graphs[0];
        assert_eq!((g.n(), g.d(), g.edge_count()), (3, 1, 3));
        assert!(g.is_one_hot());
    }

    #[test]
    fn node_labels_optional() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "T", "A", "1, 2\n");
        write(dir.path(), "T", "graph_indicator", "1\n1\n2\n");
        write(dir.path(), "T", "graph_labels", "-1\n1\n");
        let c = ingest_tu_dataset::<f64>(dir.path(), "T").unwrap();
        assert_eq!(c.graphs[1].n(), 1);
        assert_eq!(c.graphs[0].feature(0), &[1.0]);
        assert_eq!(c.labels, vec![0, 1]);
    }

    #[test]
    fn error_paths() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            ingest_tu_dataset::<f64>(dir.path(), "T"),
            Err(IngestError::MissingFile(_))
        ));
        write(dir.path(), "T", "A", "1, 3\n");
        write(dir.path(), "T", "graph_indicator", "1\n1\n2\n");
        write(dir.path(), "T", "graph_labels", "0\n1\n");
        assert!(matches!(
            ingest_tu_dataset::<f64>(dir.path(), "T"),
            Err(IngestError::InconsistentIndicator(_))
        ));
        write(dir.path(), "T", "A", "1, 2\n1;2\n");
        assert!(matches!(
            ingest_tu_dataset::<f64>(dir.path(), "T"),
            Err(IngestError::MalformedLine { line: 2, .. })
        ));
        write(dir.path(), "T", "A", "1, 2\n");
        write(dir.path(), "T", "graph_labels", "0\n1\n");
        write(dir.path(), "T", "graph_indicator", "1\nx\n2\n");
        assert!(matches!(
            ingest_tu_dataset::<f64>(dir.path(), "T"),
            Err(IngestError::MalformedLine { line: 2, .. })
        ));
        write(dir.path(), "T", "graph_indicator", "1\n1\n2\n");
        write(dir.path(), "T", "graph_labels", "0\n1\n2\n");
        assert!(matches!(
            ingest_tu_dataset::<f64>(dir.path(), "T"),
            Err(IngestError::InconsistentIndicator(_))
        ));
    }

    #[test]
    fn round_trip() {
        let g = LabeledGraph::<f64>::one_hot(4, 3, [(0, 1), (2, 3), (1, 2)], &[0, 2, 1, 1]).unwrap();
        let h = LabeledGraph::<f64>::one_hot(2, 3, [(0, 1)], &[2, 0]).unwrap();
        let coll = GraphCollection {
            graphs: vec![g, h],
            labels: vec![1, 0],
            sources: vec!["X#1".into(), "X#2".into()],
        };
        let dir = tempfile::tempdir().unwrap();
        write_tu_dataset(&coll, dir.path(), "X").unwrap();
        let back = ingest_tu_dataset::<f64>(dir.path(), "X").unwrap();
        assert_eq!(back, coll);
    }
}
