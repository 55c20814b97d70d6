//! Problem instances: the TSPLIB subset needed for the benchmark instances,
//! plus a small edge-list format for sparse graphs.
//!
//! Supported TSPLIB features: `TYPE: TSP`, `EDGE_WEIGHT_TYPE` `EXPLICIT` (with
//! `FULL_MATRIX`, `LOWER_DIAG_ROW`, `UPPER_ROW` or `UPPER_DIAG_ROW`) and `GEO`.
//! A `DISPLAY_DATA_SECTION` is skipped. Everything else is rejected.
//!
//! Sparse format, 0-indexed and undirected:
//!
//! ```text
//! v 3
//! e 0 1 2.5
//! e 1 2 4
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Published optima of the benchmark instances, keyed by TSPLIB name.
pub const KNOWN_REFERENCES: &[(&str, f64)] =
    &[("gr17", 2085.0), ("burma14", 3323.0), ("gr21", 2707.0), ("bayg29", 1610.0), ("bays29", 2020.0)];

pub fn known_reference(name: &str) -> Option<f64> {
    KNOWN_REFERENCES.iter().find(|(n, _)| *n == name).map(|&(_, c)| c)
}

/// Symmetric cost structure with explicit adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    name: String,
    dimension: usize,
    costs: Vec<f64>,
    edge: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
    lower_bound: Option<f64>,
}

impl ProblemInstance {
    /// Complete graph from a full symmetric matrix.
    pub fn complete(name: impl Into<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(invalid("cost matrix must be square"));
        }
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(invalid(format!(
                        "cost matrix is asymmetric at ({i}, {j}): {} vs {}",
                        matrix[i][j], matrix[j][i]
                    )));
                }
                edges.push((i, j, matrix[i][j]));
            }
        }
        Self::from_edges(name, n, edges)
    }

    /// Graph with exactly the listed undirected edges.
    pub fn from_edges(
        name: impl Into<String>,
        dimension: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("instance needs at least one node"));
        }
        let mut costs = vec![0.0; dimension * dimension];
        let mut edge = vec![false; dimension * dimension];
        for (i, j, c) in edges {
            if i >= dimension || j >= dimension {
                return Err(invalid(format!("edge ({i}, {j}) references a node ≥ {dimension}")));
            }
            if i == j {
                return Err(invalid(format!("self-loop on node {i}")));
            }
            if !c.is_finite() || c < 0.0 {
                return Err(invalid(format!("edge ({i}, {j}) has invalid cost {c}")));
            }
            if edge[i * dimension + j] {
                return Err(invalid(format!("duplicate edge ({i}, {j})")));
            }
            for (a, b) in [(i, j), (j, i)] {
                costs[a * dimension + b] = c;
                edge[a * dimension + b] = true;
            }
        }
        let adjacency = (0..dimension)
            .map(|i| (0..dimension).filter(|&j| edge[i * dimension + j]).collect())
            .collect();
        Ok(Self { name: name.into(), dimension, costs, edge, adjacency, lower_bound: None })
    }

    pub fn with_lower_bound(mut self, bound: Option<f64>) -> Self {
        self.lower_bound = bound;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Reference cost the error percentage is measured against.
    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge[i * self.dimension + j]
    }

    /// Cost of edge `(i, j)`, `None` when the edge does not exist.
    pub fn cost(&self, i: usize, j: usize) -> Option<f64> {
        self.has_edge(i, j).then(|| self.costs[i * self.dimension + j])
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.adjacency.iter().all(|n| n.len() + 1 == self.dimension)
    }

    /// Full matrix view; missing edges read as 0.
    pub fn cost_matrix(&self) -> Vec<Vec<f64>> {
        self.costs.chunks(self.dimension).map(<[f64]>::to_vec).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeightKind {
    ExplicitFullMatrix,
    ExplicitLowerDiagRow,
    ExplicitUpperRow,
    ExplicitUpperDiagRow,
    Geo,
}

impl EdgeWeightKind {
    fn explicit(format: &str) -> Result<Self> {
        match format {
            "FULL_MATRIX" => Ok(Self::ExplicitFullMatrix),
            "LOWER_DIAG_ROW" => Ok(Self::ExplicitLowerDiagRow),
            "UPPER_ROW" => Ok(Self::ExplicitUpperRow),
            "UPPER_DIAG_ROW" => Ok(Self::ExplicitUpperDiagRow),
            other => Err(Error::UnsupportedFormat(format!("EDGE_WEIGHT_FORMAT {other}"))),
        }
    }

    /// Number of values in the EDGE_WEIGHT_SECTION for `n` nodes.
    fn value_count(self, n: usize) -> usize {
        match self {
            Self::ExplicitFullMatrix => n * n,
            Self::ExplicitLowerDiagRow | Self::ExplicitUpperDiagRow => n * (n + 1) / 2,
            Self::ExplicitUpperRow => n * n.saturating_sub(1) / 2,
            Self::Geo => 0,
        }
    }

    /// `(row, column)` cells in file order.
    fn cells(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Self::ExplicitFullMatrix => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
            Self::ExplicitLowerDiagRow => (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect(),
            Self::ExplicitUpperRow => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
            Self::ExplicitUpperDiagRow => (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect(),
            Self::Geo => Vec::new(),
        }
    }
}

impl fmt::Display for EdgeWeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ExplicitFullMatrix => "FULL_MATRIX",
            Self::ExplicitLowerDiagRow => "LOWER_DIAG_ROW",
            Self::ExplicitUpperRow => "UPPER_ROW",
            Self::ExplicitUpperDiagRow => "UPPER_DIAG_ROW",
            Self::Geo => "GEO",
        };
        f.write_str(s)
    }
}

const EARTH_RADIUS: f64 = 6378.388;

fn geo_radians(x: f64) -> f64 {
    // whole degrees are truncated toward zero, as in the TSPLIB reference code
    let deg = x.trunc();
    let min = x - deg;
    PI * (deg + 5.0 * min / 3.0) / 180.0
}

/// TSPLIB `GEO` distance between two `(latitude, longitude)` pairs given in
/// the DDD.MM notation.
pub fn geo_distance(a: (f64, f64), b: (f64, f64)) -> i64 {
    let (lat_a, lon_a) = (geo_radians(a.0), geo_radians(a.1));
    let (lat_b, lon_b) = (geo_radians(b.0), geo_radians(b.1));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    let arg = (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).clamp(-1.0, 1.0);
    (EARTH_RADIUS * arg.acos() + 1.0).floor() as i64
}

struct Token<'a> {
    text: &'a str,
    line: usize,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses a TSPLIB `.tsp` file.
pub fn parse_tsplib(content: &str) -> Result<ProblemInstance> {
    let mut name = None;
    let mut dimension = None;
    let mut weight_type = None;
    let mut weight_format = None;
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut weights: Option<Vec<f64>> = None;

    let mut lines = content.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).peekable();
    while let Some((line_no, line)) = lines.next() {
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "NAME" => name = Some(value.to_string()),
            "TYPE" => {
                if value != "TSP" {
                    return Err(Error::UnsupportedFormat(format!("TYPE {value}")));
                }
            }
            "COMMENT" | "DISPLAY_DATA_TYPE" | "NODE_COORD_TYPE" => {}
            "DIMENSION" => {
                let d: usize =
                    value.parse().map_err(|_| parse_error(line_no, format!("bad DIMENSION {value:?}")))?;
                if d == 0 {
                    return Err(parse_error(line_no, "DIMENSION must be positive"));
                }
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => match value {
                "EXPLICIT" | "GEO" => weight_type = Some(value.to_string()),
                other => return Err(Error::UnsupportedFormat(format!("EDGE_WEIGHT_TYPE {other}"))),
            },
            "EDGE_WEIGHT_FORMAT" => weight_format = Some(value.to_string()),
            "NODE_COORD_SECTION" | "EDGE_WEIGHT_SECTION" | "DISPLAY_DATA_SECTION" => {
                let n = dimension.ok_or_else(|| parse_error(line_no, format!("{key} before DIMENSION")))?;
                let wanted = match key {
                    "EDGE_WEIGHT_SECTION" => {
                        let format = weight_format
                            .as_deref()
                            .ok_or_else(|| parse_error(line_no, "EDGE_WEIGHT_SECTION without EDGE_WEIGHT_FORMAT"))?;
                        EdgeWeightKind::explicit(format)?.value_count(n)
                    }
                    _ => 3 * n,
                };
                let mut tokens = Vec::with_capacity(wanted);
                let mut last_line = line_no;
                while tokens.len() < wanted {
                    let Some(&(no, l)) = lines.peek() else { break };
                    if l.split_whitespace().next().is_some_and(|t| t.parse::<f64>().is_err()) {
                        break;
                    }
                    lines.next();
                    last_line = no;
                    tokens.extend(l.split_whitespace().map(|text| Token { text, line: no }));
                }
                if tokens.len() < wanted {
                    return Err(parse_error(
                        last_line,
                        format!("{key} truncated: expected {wanted} values, found {}", tokens.len()),
                    ));
                }
                if tokens.len() > wanted {
                    let extra = &tokens[wanted];
                    return Err(parse_error(extra.line, format!("unexpected extra value {:?} in {key}", extra.text)));
                }
                let values = tokens
                    .iter()
                    .map(|t| t.text.parse::<f64>().map_err(|_| parse_error(t.line, format!("bad number {:?}", t.text))))
                    .collect::<Result<Vec<f64>>>()?;
                match key {
                    "EDGE_WEIGHT_SECTION" => weights = Some(values),
                    "NODE_COORD_SECTION" => {
                        coords = Some(values.chunks(3).map(|c| (c[1], c[2])).collect());
                    }
                    _ => {}
                }
            }
            "EOF" => break,
            other => return Err(Error::UnsupportedFormat(format!("keyword {other}"))),
        }
    }

    let name = name.unwrap_or_default();
    let n = dimension.ok_or_else(|| parse_error(0, "missing DIMENSION"))?;
    let weight_type = weight_type.ok_or_else(|| parse_error(0, "missing EDGE_WEIGHT_TYPE"))?;
    let mut matrix = vec![vec![0.0; n]; n];
    if weight_type == "GEO" {
        if let Some(f) = weight_format.as_deref() {
            if f != "FUNCTION" {
                return Err(Error::UnsupportedFormat(format!("EDGE_WEIGHT_FORMAT {f} with GEO")));
            }
        }
        let coords = coords.ok_or_else(|| parse_error(0, "GEO instance without NODE_COORD_SECTION"))?;
        for i in 0..n {
            for j in i + 1..n {
                let d = geo_distance(coords[i], coords[j]) as f64;
                matrix[i][j] = d;
                matrix[j][i] = d;
            }
        }
    } else {
        let format = weight_format.as_deref().ok_or_else(|| parse_error(0, "missing EDGE_WEIGHT_FORMAT"))?;
        let kind = EdgeWeightKind::explicit(format)?;
        let values = weights.ok_or_else(|| parse_error(0, "missing EDGE_WEIGHT_SECTION"))?;
        let full = kind == EdgeWeightKind::ExplicitFullMatrix;
        for ((i, j), v) in kind.cells(n).into_iter().zip(values) {
            if i == j {
                continue;
            }
            matrix[i][j] = v;
            if !full {
                matrix[j][i] = v;
            }
        }
    }
    let bound = known_reference(&name);
    Ok(ProblemInstance::complete(name, matrix)?.with_lower_bound(bound))
}

/// Parses the sparse edge-list format.
pub fn load_sparse_graph(content: &str) -> Result<ProblemInstance> {
    let mut dimension = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["v", count] => {
                if dimension.is_some() {
                    return Err(parse_error(line_no, "node count given twice"));
                }
                let v: usize = count.parse().map_err(|_| parse_error(line_no, format!("bad node count {count:?}")))?;
                if v == 0 {
                    return Err(parse_error(line_no, "node count must be positive"));
                }
                dimension = Some(v);
            }
            ["e", a, b, c] => {
                let v = dimension.ok_or_else(|| parse_error(line_no, "edge before `v <count>`"))?;
                let a: usize = a.parse().map_err(|_| parse_error(line_no, format!("bad node {a:?}")))?;
                let b: usize = b.parse().map_err(|_| parse_error(line_no, format!("bad node {b:?}")))?;
                let c: f64 = c.parse().map_err(|_| parse_error(line_no, format!("bad cost {c:?}")))?;
                if a >= v || b >= v {
                    return Err(parse_error(line_no, format!("edge ({a}, {b}) outside 0..{v}")));
                }
                if a == b {
                    return Err(parse_error(line_no, format!("self-loop on node {a}")));
                }
                if !c.is_finite() || c < 0.0 {
                    return Err(parse_error(line_no, format!("invalid cost {c}")));
                }
                if !seen.insert((a.min(b), a.max(b))) {
                    return Err(parse_error(line_no, format!("duplicate edge ({a}, {b})")));
                }
                edges.push((a, b, c));
            }
            _ => return Err(parse_error(line_no, format!("unrecognized line {line:?}"))),
        }
    }
    let v = dimension.ok_or_else(|| parse_error(0, "missing `v <count>` line"))?;
    ProblemInstance::from_edges("", v, edges)
}

/// Loads either format, sniffing the first meaningful line.
pub fn parse_instance(content: &str) -> Result<ProblemInstance> {
    let first = content.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty());
    match first {
        Some(l) if l.starts_with("v ") || l == "v" => load_sparse_graph(content),
        _ => parse_tsplib(content),
    }
}

/// Reads an instance file; sparse graphs are named after the file stem.
pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let content = std::fs::read_to_string(path)?;
    let instance = parse_instance(&content)?;
    if instance.name().is_empty() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let bound = known_reference(&stem);
        return Ok(ProblemInstance { name: stem, ..instance }.with_lower_bound(bound));
    }
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BURMA14: &str = include_str!("../data/burma14.tsp");
    const GR17: &str = include_str!("../data/gr17.tsp");

    fn encode(matrix: &[Vec<f64>], kind: EdgeWeightKind) -> String {
        let n = matrix.len();
        let body: Vec<String> = kind.cells(n).iter().map(|&(i, j)| matrix[i][j].to_string()).collect();
        let mut out = format!(
            "NAME: synthetic\nTYPE: TSP\nDIMENSION: {n}\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: {kind}\nEDGE_WEIGHT_SECTION\n"
        );
        for chunk in body.chunks(7) {
            out.push_str(&chunk.join(" "));
            out.push('\n');
        }
        out.push_str("EOF\n");
        out
    }

    #[test]
    fn benchmark_files_parse() {
        let g = parse_tsplib(GR17).unwrap();
        assert_eq!(g.name(), "gr17");
        assert_eq!(g.dimension(), 17);
        assert_eq!(g.lower_bound(), Some(2085.0));
        assert!(g.is_complete());
        assert_eq!(g.max_degree(), 16);
        assert_eq!(g.cost(0, 1), Some(633.0));

        let b = parse_tsplib(BURMA14).unwrap();
        assert_eq!(b.dimension(), 14);
        for i in 0..14 {
            assert_eq!(b.cost(i, i), None);
            for j in 0..14 {
                if i != j {
                    let c = b.cost(i, j).unwrap();
                    assert!(c > 0.0 && c.fract() == 0.0);
                    assert_eq!(b.cost(j, i), Some(c));
                }
            }
        }
    }

    #[test]
    fn geo_rule() {
        // burma14 nodes 1 and 2
        assert_eq!(geo_distance((16.47, 96.10), (16.47, 94.44)), 153);
        assert_eq!(geo_distance((16.47, 94.44), (16.47, 96.10)), 153);
        // acos(1) = 0, plus the +1 of the rounding rule
        assert_eq!(geo_distance((20.09, 94.55), (20.09, 94.55)), 1);
    }

    #[test]
    fn explicit_encodings_agree() {
        let m = vec![
            vec![0.0, 3.0, 4.0, 9.0],
            vec![3.0, 0.0, 5.0, 1.0],
            vec![4.0, 5.0, 0.0, 2.0],
            vec![9.0, 1.0, 2.0, 0.0],
        ];
        let reference = ProblemInstance::complete("synthetic", m.clone()).unwrap();
        for kind in [
            EdgeWeightKind::ExplicitFullMatrix,
            EdgeWeightKind::ExplicitLowerDiagRow,
            EdgeWeightKind::ExplicitUpperRow,
            EdgeWeightKind::ExplicitUpperDiagRow,
        ] {
            let parsed = parse_tsplib(&encode(&m, kind)).unwrap();
            assert_eq!(parsed.cost_matrix(), reference.cost_matrix(), "{kind}");
        }
    }

    #[test]
    fn rejects_unsupported() {
        let euc = "NAME: x\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n";
        assert!(matches!(parse_tsplib(euc), Err(Error::UnsupportedFormat(_))));
        let atsp = "NAME: x\nTYPE: ATSP\nDIMENSION: 2\n";
        assert!(matches!(parse_tsplib(atsp), Err(Error::UnsupportedFormat(_))));
        let fmt = "NAME: x\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: LOWER_ROW\nEDGE_WEIGHT_SECTION\n1\nEOF\n";
        assert!(matches!(parse_tsplib(fmt), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn truncated_section_reports_line() {
        let text = "NAME: x\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: UPPER_ROW\nEDGE_WEIGHT_SECTION\n1 2\nEOF\n";
        match parse_tsplib(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
        let asym = "NAME: x\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 1\n2 0\nEOF\n";
        assert!(parse_tsplib(asym).is_err());
    }

    #[test]
    fn display_data_is_skipped() {
        let text = "NAME: tiny\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: UPPER_ROW\nDISPLAY_DATA_TYPE: TWOD_DISPLAY\nEDGE_WEIGHT_SECTION\n1 2\n3\nDISPLAY_DATA_SECTION\n1 0 0\n2 1 0\n3 0 1\nEOF\n";
        let g = parse_tsplib(text).unwrap();
        assert_eq!(g.cost(1, 2), Some(3.0));
    }

    #[test]
    fn sparse_graphs() {
        let tri = load_sparse_graph("v 3\ne 0 1 1\ne 1 2 1\ne 2 0 1\n").unwrap();
        assert!(tri.is_complete());
        assert_eq!(tri.max_degree(), 2);

        let path = load_sparse_graph("v 3\ne 0 1 1\ne 1 2 1\n").unwrap();
        assert_eq!(path.degree(1), 2);
        assert_eq!(path.degree(0), 1);
        assert_eq!(path.degree(2), 1);
        assert_eq!(path.cost(0, 2), None);

        let seven = load_sparse_graph("v 7\ne 4 2 3\ne 4 3 11\ne 4 5 6\ne 4 6 7\n").unwrap();
        assert_eq!(seven.degree(4), 4);
        assert_eq!(seven.neighbors(4), &[2, 3, 5, 6]);
    }

    #[test]
    fn sparse_errors() {
        assert!(matches!(load_sparse_graph("v 3\ne 0 1 1\ne 1 0 2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load_sparse_graph("v 3\ne 1 1 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(load_sparse_graph("e 0 1 1\n").is_err());
        assert!(load_sparse_graph("v 2\ne 0 5 1\n").is_err());
        assert!(load_sparse_graph("v 2\nx\n").is_err());
    }

    #[test]
    fn sniffing() {
        assert_eq!(parse_instance("# comment\nv 2\ne 0 1 4\n").unwrap().cost(0, 1), Some(4.0));
        assert_eq!(parse_instance(GR17).unwrap().dimension(), 17);
    }
}
