//! Canonical labelling of small graphs (at most 12 vertices).
//!
//! Vertices are first split into cells by colour refinement; the canonical
//! code is the largest column-ordered upper-triangle adjacency string over all
//! vertex orders that respect the cells. Branches whose partial code is
//! already smaller than the best one are pruned, and interchangeable twins
//! are tried once per class.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest vertex count supported by [`SmallGraph`].
pub const MAX_V: usize = 12;

/// Dense adjacency bitmask graph on at most [`MAX_V`] vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    v: u8,
    adj: [u16; MAX_V],
}

impl SmallGraph {
    pub fn new(v: usize) -> Result<SmallGraph> {
        if v > MAX_V {
            return Err(Error::Size(format!("{v} vertices exceed the limit of {MAX_V}")));
        }
        Ok(SmallGraph { v: v as u8, adj: [0; MAX_V] })
    }

    pub fn from_edges(v: usize, edges: &[(usize, usize)]) -> Result<SmallGraph> {
        let mut g = SmallGraph::new(v)?;
        for &(a, b) in edges {
            if a >= v || b >= v {
                return Err(Error::OutOfRange { index: a.max(b), n: v });
            }
            if a == b {
                return Err(Error::Domain(format!("self-loop at vertex {a}")));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn from_graph(g: &Graph) -> Result<SmallGraph> {
        let e: Vec<(usize, usize)> = g.edges().iter().map(|&(i, j)| (i as usize, j as usize)).collect();
        SmallGraph::from_edges(g.n(), &e)
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.v(), self.edges()).expect("small graph edges are valid")
    }

    pub(crate) fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
    }

    pub fn v(&self) -> usize {
        self.v as usize
    }

    pub fn e(&self) -> usize {
        self.adj[..self.v()].iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    /// Neighbour bitmask of `a`.
    pub fn row(&self, a: usize) -> u16 {
        self.adj[a]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].count_ones() as usize
    }

    /// Degrees in non-decreasing order.
    pub fn sorted_degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.v()).map(|a| self.degree(a)).collect();
        d.sort_unstable();
        d
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.v() {
            for b in a + 1..self.v() {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.v == 0 {
            return true;
        }
        let full: u16 = if self.v() == 16 { u16::MAX } else { (1u16 << self.v()) - 1 };
        let mut seen: u16 = 1;
        let mut frontier: u16 = 1;
        while frontier != 0 {
            let mut next = 0u16;
            let mut f = frontier;
            while f != 0 {
                let a = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[a];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full
    }

    /// Graph with vertex `order[p]` renamed to `p`.
    pub fn permuted(&self, order: &[usize]) -> SmallGraph {
        let mut inv = [0usize; MAX_V];
        for (p, &x) in order.iter().enumerate() {
            inv[x] = p;
        }
        let mut g = SmallGraph { v: self.v, adj: [0; MAX_V] };
        for (a, b) in self.edges() {
            g.add_edge(inv[a], inv[b]);
        }
        g
    }
}

/// Canonical adjacency code: identical for two graphs iff they are isomorphic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode {
    pub v: u8,
    /// Upper-triangle adjacency bits in column order `(0,1),(0,2),(1,2),(0,3),…`,
    /// first pair most significant.
    pub bits: u128,
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:x}", self.v, self.bits)
    }
}

/// Canonical code, canonical vertex order and automorphism count.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub code: CanonicalCode,
    /// `order[p]` is the input vertex placed at canonical position `p`.
    pub order: Vec<usize>,
    pub aut: u64,
}

/// Canonical code of a small graph.
pub fn canonical_form(g: &Graph) -> Result<CanonicalCode> {
    Ok(canonicalize(&SmallGraph::from_graph(g)?).code)
}

/// Canonical labelling of `g` together with `|Aut(g)|`.
pub fn canonicalize(g: &SmallGraph) -> Canonical {
    let v = g.v();
    let color = refine(g);
    let mut cell_color: Vec<u32> = color[..v].to_vec();
    cell_color.sort_unstable();
    let twin = twin_classes(g);
    let mut search = Search {
        g,
        v,
        color,
        cell_color,
        twin,
        order: [0; MAX_V],
        cols: [0; MAX_V],
        placed: 0,
        best: None,
        count: 0,
    };
    search.dfs(0);
    let (best_cols, best_order) = search.best.expect("search visits at least one leaf");
    let mut bits: u128 = 0;
    for p in 1..v {
        bits = (bits << p) | best_cols[p] as u128;
    }
    let mut class_size = [0u64; MAX_V];
    for a in 0..v {
        class_size[search.twin[a] as usize] += 1;
    }
    let twin_factor: u64 = class_size.iter().map(|&m| (1..=m).product::<u64>()).product();
    Canonical {
        code: CanonicalCode { v: v as u8, bits },
        order: best_order[..v].iter().map(|&x| x as usize).collect(),
        aut: search.count * twin_factor,
    }
}

/// Isomorphism-invariant vertex colours from iterated neighbourhood refinement.
fn refine(g: &SmallGraph) -> [u32; MAX_V] {
    let v = g.v();
    let mut color = [0u32; MAX_V];
    for (a, c) in color.iter_mut().enumerate().take(v) {
        *c = g.degree(a) as u32;
    }
    let mut classes = distinct(&color[..v]);
    loop {
        let keys: Vec<(u32, Vec<u32>)> = (0..v)
            .map(|a| {
                let mut nb: Vec<u32> = (0..v).filter(|&b| g.has_edge(a, b)).map(|b| color[b]).collect();
                nb.sort_unstable();
                (color[a], nb)
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        for a in 0..v {
            color[a] = sorted.binary_search(&keys[a]).unwrap() as u32;
        }
        let now = distinct(&color[..v]);
        if now == classes {
            return color;
        }
        classes = now;
    }
}

fn distinct(c: &[u32]) -> usize {
    let mut s = c.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

/// Twin classes: `a ~ b` iff `N(a) \ {b} = N(b) \ {a}`.
fn twin_classes(g: &SmallGraph) -> [u8; MAX_V] {
    let v = g.v();
    let mut id = [u8::MAX; MAX_V];
    let mut next = 0u8;
    for a in 0..v {
        if id[a] != u8::MAX {
            continue;
        }
        id[a] = next;
        for b in a + 1..v {
            if id[b] == u8::MAX && g.row(a) & !(1 << b) == g.row(b) & !(1 << a) {
                id[b] = next;
            }
        }
        next += 1;
    }
    id
}

struct Search<'a> {
    g: &'a SmallGraph,
    v: usize,
    color: [u32; MAX_V],
    cell_color: Vec<u32>,
    twin: [u8; MAX_V],
    order: [u8; MAX_V],
    cols: [u16; MAX_V],
    placed: u16,
    best: Option<([u16; MAX_V], [u8; MAX_V])>,
    count: u64,
}

impl Search<'_> {
    fn dfs(&mut self, p: usize) {
        if p == self.v {
            match &self.best {
                Some((b, _)) => match self.cols[..self.v].cmp(&b[..self.v]) {
                    Ordering::Greater => {
                        self.best = Some((self.cols, self.order));
                        self.count = 1;
                    }
                    Ordering::Equal => self.count += 1,
                    Ordering::Less => {}
                },
                None => {
                    self.best = Some((self.cols, self.order));
                    self.count = 1;
                }
            }
            return;
        }
        let mut tried: u16 = 0;
        for x in 0..self.v {
            if self.placed >> x & 1 == 1 || self.color[x] != self.cell_color[p] {
                continue;
            }
            let t = 1u16 << self.twin[x];
            if tried & t != 0 {
                continue;
            }
            tried |= t;
            let mut col: u16 = 0;
            for i in 0..p {
                col = (col << 1) | self.g.has_edge(self.order[i] as usize, x) as u16;
            }
            self.cols[p] = col;
            if let Some((b, _)) = &self.best {
                if self.cols[..=p] < b[..=p] {
                    continue;
                }
            }
            self.order[p] = x as u8;
            self.placed |= 1 << x;
            self.dfs(p + 1);
            self.placed &= !(1 << x);
        }
    }
}
