//! Signed directed graphs `(Γ, O)`.
//!
//! Vertices are the dense labels `0..=N`; `N` is the distinguished top letter
//! every periodic word starts with. A graph is validated once at construction
//! (strongly connected, aperiodic, every vertex has an outgoing edge) and is
//! immutable afterwards.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex label.
pub type Vertex = usize;

/// On-disk form of a system: `{"vertices": n, "edges": [[i, j], ...], "signs": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    name: String,
    adjacency: Vec<Vec<bool>>,
    successors: Vec<Vec<Vertex>>,
    signs: Vec<i8>,
}

pub const BUILTIN_SYSTEMS: [&str; 3] = ["unimodal", "four-vertex", "tree"];

impl SignedGraph {
    pub fn new(name: impl Into<String>, config: &SystemConfig) -> Result<Self> {
        let n = config.vertices;
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if config.signs.len() != n {
            return Err(Error::InvalidGraph(format!(
                "expected {} signs, got {}",
                n,
                config.signs.len()
            )));
        }
        if let Some(s) = config.signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidGraph(format!("sign {s} is not ±1")));
        }
        let mut adjacency = vec![vec![false; n]; n];
        for &[i, j] in &config.edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range")));
            }
            if adjacency[i][j] {
                return Err(Error::InvalidGraph(format!("parallel edge ({i},{j})")));
            }
            adjacency[i][j] = true;
        }
        let successors: Vec<Vec<Vertex>> = adjacency
            .iter()
            .map(|row| (0..n).filter(|&j| row[j]).collect())
            .collect();
        if let Some(v) = successors.iter().position(|s| s.is_empty()) {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} has no outgoing edge"
            )));
        }
        let g = SignedGraph {
            name: name.into(),
            adjacency,
            successors,
            signs: config.signs.clone(),
        };
        g.check_strongly_connected()?;
        g.check_aperiodic()?;
        Ok(g)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let config = match name {
            "unimodal" => SystemConfig {
                vertices: 2,
                edges: vec![[0, 0], [0, 1], [1, 0], [1, 1]],
                signs: vec![1, -1],
            },
            // every edge except 3 -> 1 and 3 -> 2
            "four-vertex" => {
                let mut edges = Vec::new();
                for i in 0..4 {
                    for j in 0..4 {
                        if !(i == 3 && (j == 1 || j == 2)) {
                            edges.push([i, j]);
                        }
                    }
                }
                SystemConfig {
                    vertices: 4,
                    edges,
                    signs: vec![1, -1, 1, -1],
                }
            }
            "tree" => SystemConfig {
                vertices: 4,
                edges: vec![[0, 2], [0, 3], [1, 0], [2, 1], [3, 0], [3, 1]],
                signs: vec![-1, -1, 1, -1],
            },
            other => return Err(Error::UnknownSystem(other.to_string())),
        };
        SignedGraph::new(name, &config)
    }

    /// The unimodal system `Γ₂`: complete graph on `{0, 1}`, `O(0) = 1`, `O(1) = -1`.
    pub fn unimodal() -> Self {
        Self::builtin("unimodal").expect("built-in system is valid")
    }

    /// Resolve a built-in name, or else read a JSON config from the given path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if BUILTIN_SYSTEMS.contains(&name_or_path) {
            return Self::builtin(name_or_path);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(Error::UnknownSystem(name_or_path.to_string()));
        }
        let text = std::fs::read_to_string(path)?;
        Self::from_json(name_or_path, &text)
    }

    pub fn from_json(name: &str, text: &str) -> Result<Self> {
        let config: SystemConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        SignedGraph::new(name, &config)
    }

    pub fn config(&self) -> SystemConfig {
        let mut edges = Vec::new();
        for (i, row) in self.successors.iter().enumerate() {
            for &j in row {
                edges.push([i, j]);
            }
        }
        SystemConfig {
            vertices: self.vertex_count(),
            edges,
            signs: self.signs.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.signs.len()
    }

    /// The top letter `N`.
    pub fn top(&self) -> Vertex {
        self.signs.len() - 1
    }

    pub fn sign_of(&self, v: Vertex) -> i8 {
        self.signs[v]
    }

    pub fn has_edge(&self, from: Vertex, to: Vertex) -> bool {
        self.adjacency[from][to]
    }

    /// Successors of `v` in increasing label order.
    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.successors[v]
    }

    /// 0/1 adjacency matrix as integers.
    pub fn adjacency_matrix(&self) -> Vec<Vec<i64>> {
        self.adjacency
            .iter()
            .map(|row| row.iter().map(|&b| i64::from(b)).collect())
            .collect()
    }

    fn reachable_from(&self, start: Vertex, reverse: bool) -> Vec<bool> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let edge = if reverse {
                    self.adjacency[v][u]
                } else {
                    self.adjacency[u][v]
                };
                if edge && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn check_strongly_connected(&self) -> Result<()> {
        for reverse in [false, true] {
            if let Some(v) = self.reachable_from(0, reverse).iter().position(|s| !s) {
                return Err(Error::InvalidGraph(format!(
                    "not strongly connected (vertex {v} unreachable)"
                )));
            }
        }
        Ok(())
    }

    /// Period of a strongly connected graph: gcd over edges of
    /// `level(u) + 1 - level(v)` for BFS levels from vertex 0.
    fn check_aperiodic(&self) -> Result<()> {
        let n = self.vertex_count();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.successors[u] {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut period = 0i64;
        for u in 0..n {
            for &v in &self.successors[u] {
                let d = level[u] as i64 + 1 - level[v] as i64;
                period = period.gcd(&d);
            }
        }
        if period != 1 {
            return Err(Error::InvalidGraph(format!("graph has period {period}")));
        }
        Ok(())
    }

    /// `table[r][v]`: there is a walk `v = x_0, ..., x_r` with `(x_r, N)` an edge.
    /// Used to complete prefixes into periodic words greedily.
    pub(crate) fn completion_table(&self, max_remaining: usize) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let top = self.top();
        let mut table = Vec::with_capacity(max_remaining + 1);
        table.push((0..n).map(|v| self.has_edge(v, top)).collect::<Vec<_>>());
        for r in 1..=max_remaining {
            let prev: &Vec<bool> = &table[r - 1];
            let row = (0..n)
                .map(|v| self.successors[v].iter().any(|&u| prev[u]))
                .collect();
            table.push(row);
        }
        table
    }

    /// Vertices with an edge into `v`.
    pub fn predecessors(&self, v: Vertex) -> BTreeSet<Vertex> {
        (0..self.vertex_count())
            .filter(|&u| self.adjacency[u][v])
            .collect()
    }
}
