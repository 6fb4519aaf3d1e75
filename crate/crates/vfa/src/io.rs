//! File formats: edge-list graphs with JSON sidecars, signal and matrix
//! CSVs, bank descriptors, and eigenbasis exports.
//!
//! Floats are always written with [`format_float`] (17 significant digits),
//! so identical inputs produce byte-identical files. Writes go through a
//! temp file in the target directory followed by a rename.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphKind};
use crate::lgft::{FrequencyAxis, VertexFrequencyMap};
use crate::spectral::SpectralBasis;
use crate::windows::BankDescriptor;
use crate::{Error, Result};

/// Canonical float formatting: 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes through a sibling temp file and renames into place.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".into(),
    });
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn parse_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), reason: reason.into() }
}

// ---------------------------------------------------------------------------
// graphs
// ---------------------------------------------------------------------------

/// Sidecar metadata stored next to the edge list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphMeta {
    pub n: usize,
    pub kind: GraphKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
}

/// Writes `<stem>.csv` (header `src,dst,weight`, 1-based vertex ids; one row
/// per undirected edge) and `<stem>.json`.
pub fn write_graph(stem: &Path, g: &Graph, meta: &GraphMeta) -> Result<()> {
    let mut csv = String::from("src,dst,weight\n");
    let w = g.weights();
    match g.kind() {
        GraphKind::Undirected => {
            for i in 0..g.n() {
                for j in i + 1..g.n() {
                    if w[(i, j)] != 0.0 {
                        let _ = writeln!(csv, "{},{},{}", i + 1, j + 1, format_float(w[(i, j)]));
                    }
                }
            }
        }
        GraphKind::DirectedCycle => {
            for i in 0..g.n() {
                for j in 0..g.n() {
                    if w[(i, j)] != 0.0 {
                        let _ = writeln!(csv, "{},{},{}", i + 1, j + 1, format_float(w[(i, j)]));
                    }
                }
            }
        }
    }
    atomic_write(&stem.with_extension("csv"), &csv)?;
    let json = serde_json::to_string_pretty(meta)
        .map_err(|e| parse_err(stem, format!("serializing metadata: {e}")))?;
    atomic_write(&stem.with_extension("json"), &(json + "\n"))
}

/// Reads a graph written by [`write_graph`].
pub fn read_graph(stem: &Path) -> Result<(Graph, GraphMeta)> {
    let json_path = stem.with_extension("json");
    let csv_path = stem.with_extension("csv");
    let meta: GraphMeta = serde_json::from_str(&std::fs::read_to_string(&json_path)?)
        .map_err(|e| parse_err(&json_path, e.to_string()))?;
    let text = std::fs::read_to_string(&csv_path)?;
    let mut w = Array2::zeros((meta.n, meta.n));
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            if line.trim() != "src,dst,weight" {
                return Err(parse_err(&csv_path, "expected header 'src,dst,weight'"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(&csv_path, format!("line {}: expected 3 fields", lineno + 1)));
        }
        let src: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(&csv_path, format!("line {}: bad src", lineno + 1)))?;
        let dst: usize = fields[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(&csv_path, format!("line {}: bad dst", lineno + 1)))?;
        let weight: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(&csv_path, format!("line {}: bad weight", lineno + 1)))?;
        if src < 1 || src > meta.n || dst < 1 || dst > meta.n {
            return Err(parse_err(
                &csv_path,
                format!("line {}: vertex id outside 1..={}", lineno + 1, meta.n),
            ));
        }
        w[(src - 1, dst - 1)] = weight;
        if meta.kind == GraphKind::Undirected {
            w[(dst - 1, src - 1)] = weight;
        }
    }
    let graph = match meta.kind {
        GraphKind::Undirected => Graph::undirected(w)?,
        GraphKind::DirectedCycle => {
            let reference = Graph::directed_cycle(meta.n)?;
            if *reference.weights() != w {
                return Err(parse_err(&csv_path, "edge list is not the directed cycle"));
            }
            reference
        }
    };
    Ok((graph, meta))
}

// ---------------------------------------------------------------------------
// signals and generic matrices
// ---------------------------------------------------------------------------

/// `vertex,value` CSV.
pub fn write_signal(path: &Path, x: &Array1<f64>) -> Result<()> {
    let mut csv = String::from("vertex,value\n");
    for (i, v) in x.iter().enumerate() {
        let _ = writeln!(csv, "{},{}", i + 1, format_float(*v));
    }
    atomic_write(path, &csv)
}

pub fn read_signal(path: &Path) -> Result<Array1<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            if line.trim() != "vertex,value" {
                return Err(parse_err(path, "expected header 'vertex,value'"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(parse_err(path, format!("line {}: expected 2 fields", lineno + 1)));
        }
        let value: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, format!("line {}: bad value", lineno + 1)))?;
        values.push(value);
    }
    Ok(Array1::from_vec(values))
}

/// Matrix CSV: first column labels the row (1-based), remaining columns
/// carry the named values.
pub fn write_matrix(
    path: &Path,
    matrix: &Array2<f64>,
    row_label: &str,
    col_labels: &[String],
) -> Result<()> {
    if col_labels.len() != matrix.ncols() {
        return Err(Error::DimensionMismatch("column labels do not match the matrix".into()));
    }
    let mut csv = String::new();
    let _ = write!(csv, "{row_label}");
    for label in col_labels {
        let _ = write!(csv, ",{label}");
    }
    csv.push('\n');
    for (i, row) in matrix.rows().into_iter().enumerate() {
        let _ = write!(csv, "{}", i + 1);
        for v in row {
            let _ = write!(csv, ",{}", format_float(*v));
        }
        csv.push('\n');
    }
    atomic_write(path, &csv)
}

/// Reads a matrix CSV written by [`write_matrix`]; the header is returned
/// with the row label stripped.
pub fn read_matrix(path: &Path) -> Result<(Vec<String>, Array2<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(path, "empty file"))?;
    let labels: Vec<String> = header.split(',').skip(1).map(|s| s.to_string()).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != labels.len() + 1 {
            return Err(parse_err(path, format!("line {}: wrong field count", lineno + 2)));
        }
        let row: std::result::Result<Vec<f64>, _> =
            fields[1..].iter().map(|f| f.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|_| parse_err(path, format!("line {}: bad float", lineno + 2)))?);
    }
    let ncols = labels.len();
    let mut matrix = Array2::zeros((rows.len(), ncols));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
    }
    Ok((labels, matrix))
}

// ---------------------------------------------------------------------------
// vertex-frequency maps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapMeta {
    pub axis: FrequencyAxis,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_centers: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_subset: Option<Vec<usize>>,
}

/// Writes `<stem>.csv` (rows = vertices) and `<stem>.meta.json`.
pub fn write_map(stem: &Path, map: &VertexFrequencyMap) -> Result<()> {
    let labels: Vec<String> = match map.axis {
        FrequencyAxis::SpectralIndex => (1..=map.bands()).map(|k| format!("k{k}")).collect(),
        _ => (0..map.bands()).map(|k| format!("b{k}")).collect(),
    };
    write_matrix(&stem.with_extension("csv"), &map.matrix, "vertex", &labels)?;
    let meta = MapMeta {
        axis: map.axis,
        band_centers: map.band_centers.clone(),
        vertex_subset: map.vertex_subset.as_ref().map(|s| s.iter().map(|m| m + 1).collect()),
    };
    let json = serde_json::to_string_pretty(&meta)
        .map_err(|e| parse_err(stem, format!("serializing map metadata: {e}")))?;
    atomic_write(&stem.with_extension("meta.json"), &(json + "\n"))
}

/// Reads a map written by [`write_map`].
pub fn read_map(stem: &Path) -> Result<VertexFrequencyMap> {
    let meta_path = stem.with_extension("meta.json");
    let meta: MapMeta = serde_json::from_str(&std::fs::read_to_string(&meta_path)?)
        .map_err(|e| parse_err(&meta_path, e.to_string()))?;
    let (_, matrix) = read_matrix(&stem.with_extension("csv"))?;
    Ok(VertexFrequencyMap {
        matrix,
        axis: meta.axis,
        band_centers: meta.band_centers,
        vertex_subset: meta.vertex_subset.map(|s| s.iter().map(|m| m - 1).collect()),
    })
}

// ---------------------------------------------------------------------------
// eigenbasis, banks, coefficients, marginals
// ---------------------------------------------------------------------------

/// `k,lambda` CSV of eigenvalues.
pub fn write_eigenvalues(path: &Path, basis: &SpectralBasis) -> Result<()> {
    let mut csv = String::from("k,lambda\n");
    for (k, l) in basis.eigenvalues().iter().enumerate() {
        let _ = writeln!(csv, "{},{}", k + 1, format_float(*l));
    }
    atomic_write(path, &csv)
}

/// Eigenvector matrix CSV, columns `u1..uN` indexed by spectral position.
pub fn write_eigenvectors(path: &Path, basis: &SpectralBasis) -> Result<()> {
    let u = basis.vectors()?;
    let labels: Vec<String> = (1..=u.ncols()).map(|k| format!("u{k}")).collect();
    write_matrix(path, u, "vertex", &labels)
}

/// Bank export: `<stem>.json` descriptor plus `<stem>.csv` samples in long
/// format `band,p,lambda,value`.
pub fn write_bank(stem: &Path, bank: &crate::windows::TransferBank) -> Result<()> {
    let json = serde_json::to_string_pretty(&bank.descriptor())
        .map_err(|e| parse_err(stem, format!("serializing bank: {e}")))?;
    atomic_write(&stem.with_extension("json"), &(json + "\n"))?;
    let mut csv = String::from("band,p,lambda,value\n");
    for band in 0..bank.band_count() {
        for (p, &l) in bank.eigenvalues().iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                band,
                p + 1,
                format_float(l),
                format_float(bank.samples()[(band, p)])
            );
        }
    }
    atomic_write(&stem.with_extension("csv"), &csv)
}

/// Reads the JSON descriptor half of a bank export.
pub fn read_bank_descriptor(path: &Path) -> Result<BankDescriptor> {
    serde_json::from_str(&std::fs::read_to_string(path)?)
        .map_err(|e| parse_err(path, e.to_string()))
}

/// Chebyshev coefficient export: `k,m,c` rows, optionally followed by the
/// monomial expansion `k,p,h` in a second file.
pub fn write_cheb_coefficients(
    path: &Path,
    fits: &[crate::polyops::ChebyshevApprox],
) -> Result<()> {
    let mut csv = String::from("k,m,c\n");
    for (k, fit) in fits.iter().enumerate() {
        for (m, c) in fit.coefficients().iter().enumerate() {
            let _ = writeln!(csv, "{k},{m},{}", format_float(*c));
        }
    }
    atomic_write(path, &csv)
}

/// Marginal export: `index,vertex,frequency`, padded with empty fields when
/// the two marginals have different lengths.
pub fn write_marginals(path: &Path, vertex: &Array1<f64>, frequency: &Array1<f64>) -> Result<()> {
    let mut csv = String::from("index,vertex,frequency\n");
    let rows = vertex.len().max(frequency.len());
    for i in 0..rows {
        let v = vertex.get(i).map(|v| format_float(*v)).unwrap_or_default();
        let f = frequency.get(i).map(|v| format_float(*v)).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{}", i + 1, v, f);
    }
    atomic_write(path, &csv)
}

/// Reads marginals written by [`write_marginals`].
pub fn read_marginals(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut vertex = Vec::new();
    let mut frequency = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(path, format!("line {}: expected 3 fields", lineno + 1)));
        }
        if !fields[1].is_empty() {
            vertex.push(
                fields[1]
                    .parse()
                    .map_err(|_| parse_err(path, format!("line {}: bad value", lineno + 1)))?,
            );
        }
        if !fields[2].is_empty() {
            frequency.push(
                fields[2]
                    .parse()
                    .map_err(|_| parse_err(path, format!("line {}: bad value", lineno + 1)))?,
            );
        }
    }
    Ok((vertex, frequency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SwissRollParams;
    use crate::signal::random_signal;
    use crate::spectral::{decompose, BasisKind};

    #[test]
    fn float_format_is_pinned() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.5), "-5.0000000000000000e-1");
        assert_eq!(format_float(1.0 / 3.0), "3.3333333333333331e-1");
    }

    #[test]
    fn graph_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let params = SwissRollParams::new(24, 100.0, 5, 5);
        let g = Graph::swiss_roll(&params).unwrap();
        let meta = GraphMeta {
            n: 24,
            kind: GraphKind::Undirected,
            seed: Some(5),
            alpha: Some(100.0),
            kappa: Some(5),
        };
        let stem = dir.path().join("graph");
        write_graph(&stem, &g, &meta).unwrap();
        let (back, meta2) = read_graph(&stem).unwrap();
        assert_eq!(back.weights(), g.weights());
        assert_eq!(meta2.seed, Some(5));
        // directed cycle survives too
        let dc = Graph::directed_cycle(8).unwrap();
        let stem = dir.path().join("cycle");
        write_graph(
            &stem,
            &dc,
            &GraphMeta { n: 8, kind: GraphKind::DirectedCycle, seed: None, alpha: None, kappa: None },
        )
        .unwrap();
        let (back, _) = read_graph(&stem).unwrap();
        assert_eq!(back.weights(), dc.weights());
        assert_eq!(back.kind(), GraphKind::DirectedCycle);
    }

    #[test]
    fn signal_and_matrix_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let x = random_signal(17, 3);
        let path = dir.path().join("signal.csv");
        write_signal(&path, &x).unwrap();
        let back = read_signal(&path).unwrap();
        assert_eq!(back, x);

        let g = Graph::swiss_roll(&SwissRollParams::new(12, 100.0, 4, 7)).unwrap();
        let b = decompose(&g, BasisKind::Laplacian).unwrap();
        let set =
            crate::windows::spectral_window_shift(&crate::windows::heat_window(1.0, 1.0, &b).unwrap(), &b)
                .unwrap();
        let map = crate::lgft::lgft_window(&x.slice(ndarray::s![..12]).to_owned(), &set, &b).unwrap();
        let stem = dir.path().join("map");
        write_map(&stem, &map).unwrap();
        let back = read_map(&stem).unwrap();
        assert_eq!(back.matrix, map.matrix);
        assert_eq!(back.axis, map.axis);
    }

    #[test]
    fn deterministic_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let x = random_signal(9, 1);
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_signal(&a, &x).unwrap();
        write_signal(&b, &x).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        // no temp residue
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| {
                e.as_ref().unwrap().path().extension().is_some_and(|x| x.to_str() == Some("tmp"))
            })
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn marginals_roundtrip_with_padding() {
        let dir = tempfile::tempdir().unwrap();
        let vertex = Array1::from_vec(vec![1.0, 2.0, 3.0]);
        let frequency = Array1::from_vec(vec![0.5, 0.25]);
        let path = dir.path().join("marginals.csv");
        write_marginals(&path, &vertex, &frequency).unwrap();
        let (v, f) = read_marginals(&path).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        assert_eq!(f, vec![0.5, 0.25]);
    }

    #[test]
    fn bank_export_and_descriptor_readback() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::swiss_roll(&SwissRollParams::new(14, 100.0, 4, 9)).unwrap();
        let b = decompose(&g, BasisKind::Laplacian).unwrap();
        let bank = crate::windows::raised_cosine_bank(5, &b, false).unwrap();
        let stem = dir.path().join("bank");
        write_bank(&stem, &bank).unwrap();
        let desc = read_bank_descriptor(&stem.with_extension("json")).unwrap();
        let rebuilt = crate::windows::TransferBank::from_descriptor(&desc, &b).unwrap();
        assert_eq!(rebuilt.band_count(), 5);
        // malformed csv is reported with the path
        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "vertex,value\n1,not_a_float\n").unwrap();
        assert!(matches!(read_signal(&bad), Err(Error::Parse { .. })));
    }
}
