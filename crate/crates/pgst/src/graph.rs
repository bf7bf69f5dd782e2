//! Weighted graphs, hypercube builders, and the associated Hermitian
//! adjacency matrix.
//!
//! Weights are stored as complex numbers so the walk operators can be
//! simulated verbatim for complex inputs, but every certification path
//! requires real weights. Graphs are immutable after construction and
//! always connected.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bitgroup::MAX_DIMENSION;
use crate::certify::numtheory::is_prime;
use crate::{Error, Result};

/// Largest vertex id accepted by the edge-list parser.
pub const MAX_VERTEX_ID: usize = (1 << 20) - 1;

/// Cap on dense `n x n` materialization (Hermitian adjacency, projections).
pub const MAX_DENSE_N: usize = 4096;

/// Hypercube structure attached to graphs produced by the builders.
///
/// `dir_weights[j]` is the weight on every edge in direction `j`; `m` is
/// the squared direction-0 weight relative to squared weight 2 elsewhere,
/// so unit-weight hypercubes carry `m = 2` (the walk only sees weights up
/// to global scale).
#[derive(Clone, Debug)]
pub struct HypercubeInfo {
    pub d: u8,
    pub m: u32,
    pub dir_weights: Vec<f64>,
}

/// A connected graph with symmetric nonzero edge weights.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<Vec<(usize, Complex64)>>,
    edge_count: usize,
    hypercube: Option<HypercubeInfo>,
}

impl WeightedGraph {
    /// Build from an undirected edge list with real weights.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let complex: Vec<(usize, usize, Complex64)> = edges
            .iter()
            .map(|&(a, b, w)| (a, b, Complex64::new(w, 0.0)))
            .collect();
        Self::from_complex_edges(n, &complex)
    }

    /// Build from an undirected edge list with complex weights
    /// (simulation-only downstream).
    pub fn from_complex_edges(n: usize, edges: &[(usize, usize, Complex64)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parse {
                line: 0,
                msg: format!("graph needs at least 2 vertices, got {n}"),
            });
        }
        let mut seen: HashMap<(usize, usize), Complex64> = HashMap::new();
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: a.max(b),
                    n,
                });
            }
            if a == b {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("loop edge {a}-{a} is forbidden"),
                });
            }
            if w == Complex64::new(0.0, 0.0) || !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("edge {a}-{b} has invalid weight {w}"),
                });
            }
            let key = (a.min(b), a.max(b));
            match seen.get(&key) {
                Some(&prev) if prev != w => {
                    return Err(Error::AsymmetricWeights {
                        a: key.0,
                        b: key.1,
                        w1: prev.re,
                        w2: w.re,
                    });
                }
                Some(_) => {}
                None => {
                    seen.insert(key, w);
                }
            }
        }
        if seen.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "graph has no edges".into(),
            });
        }
        let mut adj: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        for (&(a, b), &w) in &seen {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(v, _)| v);
        }
        let graph = WeightedGraph {
            n,
            adj,
            edge_count: seen.len(),
            hypercube: None,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<()> {
        let mut visited = vec![false; self.n];
        let mut stack = vec![0usize];
        visited[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !visited[v] {
                    visited[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        if count != self.n {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbors of `v` with weights, sorted by neighbor id.
    pub fn neighbors(&self, v: usize) -> &[(usize, Complex64)] {
        &self.adj[v]
    }

    /// Weight of edge `{a, b}`, or zero when absent.
    pub fn weight(&self, a: usize, b: usize) -> Complex64 {
        match self.adj[a].binary_search_by_key(&b, |&(v, _)| v) {
            Ok(i) => self.adj[a][i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        self.adj
            .iter()
            .all(|list| list.iter().all(|&(_, w)| w.im == 0.0))
    }

    /// Squared row sum `s_v = sum_x |w_vx|^2`, the coin normalization at `v`.
    pub fn squared_row_sum(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w.norm_sqr()).sum()
    }

    pub fn hypercube(&self) -> Option<&HypercubeInfo> {
        self.hypercube.as_ref()
    }

    /// Serialize back to the edge-list file format (real graphs only).
    pub fn to_edge_list_string(&self) -> Result<String> {
        if !self.is_real() {
            return Err(Error::ComplexWeights);
        }
        let mut out = String::new();
        for u in 0..self.n {
            for &(v, w) in &self.adj[u] {
                if u < v {
                    out.push_str(&format!("{u} {v} {:?}\n", w.re));
                }
            }
        }
        Ok(out)
    }
}

/// Unit-weight hypercube on `2^d` vertices: `u ~ v` iff `u XOR v` is a
/// power of two. Equivalent to the `m = 2` weighting up to global scale.
pub fn build_hypercube(d: u8) -> Result<WeightedGraph> {
    build_hypercube_with_weights(d, 2, vec![1.0; d as usize])
}

/// Hypercube with weight `sqrt(m)` in direction 0 and `sqrt(2)` in every
/// other direction. The squared row sum at each vertex is `m + 2(d-1)`.
pub fn build_weighted_hypercube(d: u8, m: u32) -> Result<WeightedGraph> {
    if m == 0 {
        return Err(Error::InvalidCoinWeight);
    }
    let mut dir_weights = vec![std::f64::consts::SQRT_2; d as usize];
    dir_weights[0] = (m as f64).sqrt();
    build_hypercube_with_weights(d, m, dir_weights)
}

fn build_hypercube_with_weights(d: u8, m: u32, dir_weights: Vec<f64>) -> Result<WeightedGraph> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange {
            got: d as u32,
            min: 1,
            max: MAX_DIMENSION as u32,
        });
    }
    let n = 1usize << d;
    let mut adj: Vec<Vec<(usize, Complex64)>> = vec![Vec::with_capacity(d as usize); n];
    for u in 0..n {
        for j in 0..d as usize {
            let v = u ^ (1 << j);
            adj[u].push((v, Complex64::new(dir_weights[j], 0.0)));
        }
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|&(v, _)| v);
    }
    Ok(WeightedGraph {
        n,
        adj,
        edge_count: n / 2 * d as usize,
        hypercube: Some(HypercubeInfo { d, m, dir_weights }),
    })
}

/// Smallest coin weight making antipodal transfer provable: `m = 2` when
/// `d` is prime, otherwise the least `m >= 1` with `2d - 2 + m` prime.
pub fn choose_m(d: u32) -> Result<u32> {
    if d < 2 {
        return Err(Error::DimensionOutOfRange {
            got: d,
            min: 2,
            max: u32::MAX,
        });
    }
    if is_prime(d as u64) {
        return Ok(2);
    }
    let base = 2 * d as u64 - 2;
    let mut m = 1u64;
    while !is_prime(base + m) {
        m += 1;
    }
    Ok(m as u32)
}

/// Parse the plain edge-list format: one `u v w` triple per line with
/// 0-based vertex ids and a decimal weight; `#` lines are comments; the
/// vertex count is one more than the largest id.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_id = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `u v w`, got {} fields", fields.len()),
            });
        }
        let u: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad vertex id {:?}", fields[0]),
        })?;
        let v: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad vertex id {:?}", fields[1]),
        })?;
        if u > MAX_VERTEX_ID || v > MAX_VERTEX_ID {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("vertex id exceeds maximum {MAX_VERTEX_ID}"),
            });
        }
        let w: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad weight {:?}", fields[2]),
        })?;
        if !w.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("weight {w} is not finite"),
            });
        }
        if w == 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: "zero weight on a listed edge".into(),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("loop edge {u}-{v} is forbidden"),
            });
        }
        max_id = max_id.max(u).max(v);
        edges.push((u, v, w));
    }
    if edges.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no edges in input".into(),
        });
    }
    WeightedGraph::from_edges(max_id + 1, &edges)
}

/// Load a graph from an edge-list file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// Exact integer form `H_hat = h_int / q` when one exists.
#[derive(Clone, Debug)]
pub struct ExactForm {
    pub h_int: DMatrix<i64>,
    pub q: u64,
}

/// The vertex-indexed Hermitian adjacency matrix of the walk, with
/// entries `w_ab * w_ba / sqrt(s_a * s_b)`; real symmetric with spectral
/// radius at most 1.
#[derive(Clone, Debug)]
pub struct HermitianAdjacency {
    pub n: usize,
    pub matrix: DMatrix<f64>,
    pub exact: Option<ExactForm>,
}

/// Compute the Hermitian adjacency matrix of a real-weighted graph.
///
/// For the hypercube builders the exact integer form (`m` on direction-0
/// edges, 2 elsewhere, over `q = 2d - 2 + m`) is attached. For other
/// graphs an integer form is detected when all squared weights and the
/// common squared row sum round cleanly to integers.
pub fn hermitian_adjacency(w: &WeightedGraph) -> Result<HermitianAdjacency> {
    if !w.is_real() {
        return Err(Error::ComplexWeights);
    }
    let n = w.n();
    if n > MAX_DENSE_N {
        return Err(Error::MatrixTooLarge { n, cap: MAX_DENSE_N });
    }
    let s: Vec<f64> = (0..n).map(|v| w.squared_row_sum(v)).collect();
    let mut matrix = DMatrix::zeros(n, n);
    for a in 0..n {
        for &(b, wt) in w.neighbors(a) {
            matrix[(a, b)] = wt.re * wt.re / (s[a] * s[b]).sqrt();
        }
    }
    let exact = match w.hypercube() {
        Some(info) => Some(hypercube_exact_form(w, info)),
        None => detect_exact_form(w, &s),
    };
    Ok(HermitianAdjacency { n, matrix, exact })
}

fn hypercube_exact_form(w: &WeightedGraph, info: &HypercubeInfo) -> ExactForm {
    let n = w.n();
    let d = info.d as usize;
    let mut h_int = DMatrix::zeros(n, n);
    for u in 0..n {
        for j in 0..d {
            let v = u ^ (1 << j);
            h_int[(u, v)] = if j == 0 { info.m as i64 } else { 2 };
        }
    }
    ExactForm {
        h_int,
        q: info.m as u64 + 2 * (d as u64 - 1),
    }
}

const EXACT_DETECT_TOL: f64 = 1e-9;

fn detect_exact_form(w: &WeightedGraph, s: &[f64]) -> Option<ExactForm> {
    let q = s[0].round();
    if q < 1.0 || q > 1e12 {
        return None;
    }
    if s.iter().any(|&sv| (sv - q).abs() > EXACT_DETECT_TOL) {
        return None;
    }
    let n = w.n();
    let mut h_int = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut row_sum = 0i64;
        for &(b, wt) in w.neighbors(a) {
            let wsq = wt.re * wt.re;
            let rounded = wsq.round();
            if rounded < 1.0 || (wsq - rounded).abs() > EXACT_DETECT_TOL {
                return None;
            }
            h_int[(a, b)] = rounded as i64;
            row_sum += rounded as i64;
        }
        if row_sum != q as i64 {
            return None;
        }
    }
    Some(ExactForm { h_int, q: q as u64 })
}
