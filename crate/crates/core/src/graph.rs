//! Immutable simple undirected graphs.
//!
//! A [`Graph`] keeps two views of the same edge set: packed adjacency bit-rows
//! for constant-time adjacency tests and word-parallel neighbourhood
//! intersections, and a sorted edge list with CSR neighbour lists for sparse
//! traversal and I/O.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    nbrs: Vec<u32>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from node pairs. Duplicate pairs collapse; self-loops and
    /// out-of-range indices are errors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::Size(format!("{n} nodes exceed the u32 index space")));
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::OutOfRange { index: x, n });
                }
            }
            if a == b {
                return Err(Error::Domain(format!("self-loop at node {a}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push((i as u32, j as u32));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted_edges(n, list))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(u32, u32)>) -> Graph {
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; words * n];
        let mut deg = vec![0usize; n];
        for &(i, j) in &edges {
            let (i, j) = (i as usize, j as usize);
            rows[i * words + j / 64] |= 1 << (j % 64);
            rows[j * words + i / 64] |= 1 << (i % 64);
            deg[i] += 1;
            deg[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut nbrs = vec![0u32; 2 * edges.len()];
        for &(i, j) in &edges {
            nbrs[fill[i as usize]] = j;
            fill[i as usize] += 1;
            nbrs[fill[j as usize]] = i;
            fill[j as usize] += 1;
        }
        for v in 0..n {
            nbrs[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph { n, words, rows, edges, offsets, nbrs, labels: None }
    }

    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Graph {
        Self::from_sorted_edges(n, Vec::new())
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Graph {
        let mut e = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                e.push((i as u32, j as u32));
            }
        }
        Self::from_sorted_edges(n, e)
    }

    /// Cycle `C_n` (n ≥ 3).
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::Domain(format!("cycle needs at least 3 nodes, got {n}")));
        }
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Path on `n` nodes.
    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    /// Star `K_{1,leaves}` with centre 0.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star edges are valid")
    }

    /// Attaches external node identifiers.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.n {
            return Err(Error::Domain(format!(
                "{} labels supplied for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edge list with `i < j` in every pair.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External identifier of node `v`, or its index when unlabeled.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Number of 64-bit words per adjacency row.
    pub fn words(&self) -> usize {
        self.words
    }

    /// Adjacency bit-row of `v`.
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.nbrs[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Degrees in node order; sums to twice the edge count.
    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Number of common neighbours of `u` and `v`.
    pub fn codegree(&self, u: usize, v: usize) -> u32 {
        self.row(u).iter().zip(self.row(v)).map(|(a, b)| (a & b).count_ones()).sum()
    }

    /// Subgraph induced by `u`, with nodes renumbered in the order of `u`.
    pub fn induced_subgraph(&self, u: &NodeSet) -> Result<Graph> {
        if let Some(&last) = u.nodes().last() {
            if last >= self.n {
                return Err(Error::OutOfRange { index: last, n: self.n });
            }
        }
        let nodes = u.nodes();
        let mut edges = Vec::new();
        for (a, &x) in nodes.iter().enumerate() {
            for &y in self.neighbors(x) {
                let y = y as usize;
                if y <= x {
                    continue;
                }
                if let Ok(b) = nodes.binary_search(&y) {
                    edges.push((a as u32, b as u32));
                }
            }
        }
        edges.sort_unstable();
        let mut g = Self::from_sorted_edges(nodes.len(), edges);
        if let Some(l) = &self.labels {
            g.labels = Some(nodes.iter().map(|&x| l[x].clone()).collect());
        }
        Ok(g)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    let w = w as usize;
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Copy of the graph without degree-zero nodes; the edge set is unchanged.
    pub fn remove_isolated(&self) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|&v| self.degree(v) > 0).collect();
        let set = NodeSet { nodes: keep };
        self.induced_subgraph(&set).expect("kept nodes are in range")
    }

    /// Edge-list text, one `a b` pair per line using labels when present.
    /// Isolated nodes are written as single-token lines so that
    /// [`load_edge_list`] reproduces the graph exactly.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let mut seen = vec![false; self.n];
        for &(i, j) in &self.edges {
            let (i, j) = (i as usize, j as usize);
            for x in [i, j] {
                if !seen[x] {
                    seen[x] = true;
                }
            }
            let _ = writeln!(s, "{} {}", self.label(i), self.label(j));
        }
        for (v, done) in seen.iter().enumerate() {
            if !done {
                let _ = writeln!(s, "{}", self.label(v));
            }
        }
        s
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(i, j)| [i as usize, j as usize]).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Graph> {
        let g = Graph::from_edges(j.n, j.edges.iter().map(|e| (e[0], e[1])))?;
        match &j.labels {
            Some(l) => g.with_labels(l.clone()),
            None => Ok(g),
        }
    }
}

/// Serialized graph form `{n, edges: [[i, j], ...], labels?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Sorted set of distinct node indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeSet {
    nodes: Vec<usize>,
}

impl NodeSet {
    /// Sorts `nodes` and checks that they are distinct and below `n`.
    pub fn new(mut nodes: Vec<usize>, n: usize) -> Result<NodeSet> {
        nodes.sort_unstable();
        if let Some(&last) = nodes.last() {
            if last >= n {
                return Err(Error::OutOfRange { index: last, n });
            }
        }
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("node set contains duplicates".into()));
        }
        Ok(NodeSet { nodes })
    }

    /// All nodes `0..n`.
    pub fn all(n: usize) -> NodeSet {
        NodeSet { nodes: (0..n).collect() }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Result of parsing an edge-list document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeListGraph {
    pub graph: Graph,
    /// Number of self-loop lines that were dropped.
    pub self_loops: usize,
}

/// Parses whitespace-separated node-id pairs. Lines starting with `#` and
/// blank lines are skipped; a line with a single token declares a node.
/// Node ids are reindexed densely in order of first appearance and kept as
/// labels.
pub fn load_edge_list(text: &str) -> Result<EdgeListGraph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut self_loops = 0;
    let mut id = |tok: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(tok.to_string()).or_insert_with(|| {
            labels.push(tok.to_string());
            labels.len() - 1
        })
    };
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        match toks.as_slice() {
            [a] => {
                id(a, &mut labels);
            }
            [a, b] => {
                let i = id(a, &mut labels);
                let j = id(b, &mut labels);
                if i == j {
                    self_loops += 1;
                } else {
                    edges.push((i, j));
                }
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected one or two node ids, found {}", toks.len()),
                })
            }
        }
    }
    let graph = Graph::from_edges(labels.len(), edges)?.with_labels(labels)?;
    Ok(EdgeListGraph { graph, self_loops })
}
