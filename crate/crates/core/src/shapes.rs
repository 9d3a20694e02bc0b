//! Walk-induced shapes: the universe `W_k`, walk classification and the
//! self-count `ind_k(F, F)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::canon::{canonicalize, CanonicalCode, SmallGraph, MAX_V};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest walk length with an exhaustive census.
pub const MAX_CENSUS_K: usize = 9;

/// Canonical unlabelled connected graph with cached invariants.
#[derive(Clone, Debug, Serialize)]
pub struct WalkShape {
    #[serde(serialize_with = "code_as_string")]
    pub code: CanonicalCode,
    #[serde(skip)]
    pub graph: SmallGraph,
    pub name: String,
    pub v: usize,
    pub e: usize,
    /// Degrees in non-decreasing order.
    pub degrees: Vec<usize>,
    pub aut: u64,
    /// `k -> ind_k(F, F)` for the censuses this shape was taken from.
    pub ind_self: BTreeMap<usize, u128>,
    pub euler: i64,
}

fn code_as_string<S: serde::Serializer>(c: &CanonicalCode, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(c)
}

impl PartialEq for WalkShape {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for WalkShape {}

impl std::hash::Hash for WalkShape {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state)
    }
}

impl fmt::Display for WalkShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl WalkShape {
    /// Shape of an arbitrary small graph; `ind_self` is left empty.
    pub fn from_small(g: &SmallGraph) -> WalkShape {
        let c = canonicalize(g);
        let graph = g.permuted(&c.order);
        let v = graph.v();
        let e = graph.e();
        WalkShape {
            code: c.code,
            name: shape_name(&graph),
            degrees: graph.sorted_degrees(),
            graph,
            v,
            e,
            aut: c.aut,
            ind_self: BTreeMap::new(),
            euler: v as i64 - e as i64,
        }
    }

    pub fn from_graph(g: &Graph) -> Result<WalkShape> {
        Ok(WalkShape::from_small(&SmallGraph::from_graph(g)?))
    }

    pub fn cycle(k: usize) -> Result<WalkShape> {
        WalkShape::from_graph(&Graph::cycle(k)?)
    }

    pub fn path(v: usize) -> Result<WalkShape> {
        WalkShape::from_graph(&Graph::path(v))
    }

    pub fn star(leaves: usize) -> Result<WalkShape> {
        WalkShape::from_graph(&Graph::star(leaves))
    }

    /// Cycle `C_p` with a pendant path on `l` vertices (sharing one with the cycle).
    pub fn tadpole(p: usize, l: usize) -> Result<WalkShape> {
        if p < 3 || l < 2 {
            return Err(Error::Domain(format!("tadpole C{p}P{l} needs p >= 3 and l >= 2")));
        }
        let v = p + l - 1;
        let mut e: Vec<(usize, usize)> = (0..p).map(|i| (i, (i + 1) % p)).collect();
        e.extend((p - 1..v - 1).map(|i| (i, i + 1)));
        Ok(WalkShape::from_small(&SmallGraph::from_edges(v, &e)?))
    }

    pub fn is_tree(&self) -> bool {
        self.e + 1 == self.v && self.graph.is_connected()
    }

    pub fn is_cycle(&self) -> bool {
        self.v >= 3 && self.v == self.e && self.degrees.iter().all(|&d| d == 2) && self.graph.is_connected()
    }

    /// Number of leaves of a star `K_{1,m}`, `None` for other shapes.
    pub fn star_leaves(&self) -> Option<usize> {
        if !self.is_tree() || self.v < 2 {
            return None;
        }
        (self.degrees[self.v - 1] == self.v - 1).then_some(self.v - 1)
    }

    /// `ind_k(F, F)`, taken from the cache or the census of `k`; zero when `F ∉ W_k`.
    pub fn ind_self_at(&self, k: usize) -> Result<u128> {
        if let Some(&x) = self.ind_self.get(&k) {
            return Ok(x);
        }
        let c = census(k)?;
        Ok(c.index_of(&self.code).map_or(0, |i| c.shapes[i].ind_self[&k]))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges()
    }
}

/// Human-readable name for common shape families.
fn shape_name(g: &SmallGraph) -> String {
    let v = g.v();
    let e = g.e();
    let d = g.sorted_degrees();
    let connected = g.is_connected();
    if connected && e + 1 == v {
        if v <= 3 || d[v - 1] <= 2 {
            return format!("P{v}");
        }
        if d[v - 1] == v - 1 {
            return format!("K1,{}", v - 1);
        }
        return format!("T{v}:{}", canonicalize(g).code.bits);
    }
    if connected && e == v {
        if d.iter().all(|&x| x == 2) {
            return format!("C{v}");
        }
        let ones = d.iter().filter(|&&x| x == 1).count();
        let threes = d.iter().filter(|&&x| x == 3).count();
        if ones == 1 && threes == 1 && d[v - 1] == 3 {
            let tail = peel_leaves(g);
            return format!("C{}P{}", v - tail, tail + 1);
        }
    }
    if connected && e == v + 1 && d[v - 1] == 4 && d[..v - 1].iter().all(|&x| x == 2) {
        let hub = (0..v).find(|&a| g.degree(a) == 4).unwrap();
        let (p, q) = loop_sizes(g, hub);
        return format!("C{}C{}", p.min(q), p.max(q));
    }
    format!("F{v},{e}:{}", canonicalize(g).code.bits)
}

fn peel_leaves(g: &SmallGraph) -> usize {
    let mut alive: u16 = ((1u32 << g.v()) - 1) as u16;
    let mut removed = 0;
    loop {
        let leaf = (0..g.v()).find(|&a| alive >> a & 1 == 1 && (g.row(a) & alive).count_ones() == 1);
        match leaf {
            Some(a) => {
                alive &= !(1 << a);
                removed += 1;
            }
            None => return removed,
        }
    }
}

fn loop_sizes(g: &SmallGraph, hub: usize) -> (usize, usize) {
    let rest: u16 = (((1u32 << g.v()) - 1) as u16) & !(1 << hub);
    let start = (0..g.v()).find(|&a| rest >> a & 1 == 1).unwrap();
    let mut seen: u16 = 1 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for a in 0..g.v() {
            if frontier >> a & 1 == 1 {
                next |= g.row(a) & rest;
            }
        }
        frontier = next & !seen;
        seen |= next;
    }
    let a = seen.count_ones() as usize;
    (a + 1, g.v() - 1 - a + 1)
}

/// Closed walk `v_0 … v_k` with `v_0 = v_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedWalk {
    nodes: Vec<usize>,
}

impl ClosedWalk {
    /// Validates closure and that consecutive nodes differ.
    pub fn new(nodes: Vec<usize>) -> Result<ClosedWalk> {
        if nodes.len() < 3 {
            return Err(Error::Domain("a closed walk needs length at least 2".into()));
        }
        if nodes[0] != nodes[nodes.len() - 1] {
            return Err(Error::Domain("walk does not return to its start".into()));
        }
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("walk repeats a node in consecutive steps".into()));
        }
        Ok(ClosedWalk { nodes })
    }

    /// Parses a compact digit string such as `1213241251`.
    pub fn from_digits(s: &str) -> Result<ClosedWalk> {
        let nodes = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Domain(format!("not a digit: {c}"))))
            .collect::<Result<Vec<_>>>()?;
        ClosedWalk::new(nodes)
    }

    /// Checks that every step is an edge of `g`.
    pub fn in_graph(&self, g: &Graph) -> bool {
        self.nodes.iter().all(|&x| x < g.n()) && self.nodes.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    pub fn k(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn to_digits(&self) -> String {
        self.nodes.iter().map(|x| x.to_string()).collect()
    }

    /// Relabelling by first appearance, starting at 0.
    pub(crate) fn normalized(&self) -> Vec<u8> {
        normalize(&self.nodes)
    }
}

impl fmt::Display for ClosedWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.nodes.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join("-"))
    }
}

pub(crate) fn normalize(nodes: &[usize]) -> Vec<u8> {
    let mut map: HashMap<usize, u8> = HashMap::new();
    nodes
        .iter()
        .map(|&x| {
            let next = map.len() as u8;
            *map.entry(x).or_insert(next)
        })
        .collect()
}

/// Index of the unordered pair `{i, j}` among labels `< 9`.
#[inline]
pub(crate) fn pair_bit(i: u8, j: u8) -> u64 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    1u64 << (b as u32 * (b as u32 - 1) / 2 + a as u32)
}

pub(crate) fn edge_mask(w: &[u8]) -> u64 {
    w.windows(2).fold(0, |m, p| m | pair_bit(p[0], p[1]))
}

pub(crate) fn small_from_mask(v: usize, mask: u64) -> SmallGraph {
    let mut g = SmallGraph::new(v).expect("census labels fit");
    for b in 1..v as u8 {
        for a in 0..b {
            if mask & pair_bit(a, b) != 0 {
                g.add_edge(a as usize, b as usize);
            }
        }
    }
    g
}

/// Whether a closed walk is non-backtracking, including across the wrap-around.
pub(crate) fn is_nb_tailless(w: &[u8]) -> bool {
    let k = w.len() - 1;
    (1..k).all(|i| w[i + 1] != w[i - 1]) && w[1] != w[k - 1]
}

/// Exhaustive census of `W_k`.
#[derive(Debug)]
pub struct Census {
    k: usize,
    shapes: Vec<WalkShape>,
    index: HashMap<CanonicalCode, usize>,
    ind_nb: Vec<u128>,
    walks: Vec<Vec<u8>>,
    by_mask: HashMap<(u8, u64), usize>,
}

impl Census {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shapes(&self) -> &[WalkShape] {
        &self.shapes
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn index_of(&self, code: &CanonicalCode) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn get(&self, code: &CanonicalCode) -> Option<&WalkShape> {
        self.index_of(code).map(|i| &self.shapes[i])
    }

    pub fn find(&self, name: &str) -> Option<&WalkShape> {
        self.shapes.iter().find(|s| s.name == name)
    }

    /// `ind_k(F, F)` for shape index `i`.
    pub fn ind_self(&self, i: usize) -> u128 {
        self.shapes[i].ind_self[&self.k]
    }

    /// Number of non-backtracking tailless closed `k`-walks in `F` inducing all of `F`.
    pub fn ind_nb_self(&self, i: usize) -> u128 {
        self.ind_nb[i]
    }

    /// Closed walks inducing shape `i`, one per vertex relabelling class, labelled by first appearance.
    pub fn walks_of(&self, i: usize) -> impl Iterator<Item = &[u8]> {
        self.walks[i].chunks(self.k + 1)
    }

    pub(crate) fn shape_of_normalized(&self, w: &[u8]) -> usize {
        let v = w.iter().copied().max().unwrap() + 1;
        self.by_mask[&(v, edge_mask(w))]
    }
}

fn build_census(k: usize) -> Census {
    let mut c = Census {
        k,
        shapes: Vec::new(),
        index: HashMap::new(),
        ind_nb: Vec::new(),
        walks: Vec::new(),
        by_mask: HashMap::new(),
    };
    let mut rg_count: Vec<u128> = Vec::new();
    let mut w = vec![0u8; k + 1];
    fn rec(c: &mut Census, rg: &mut Vec<u128>, w: &mut [u8], pos: usize, top: u8, mask: u64) {
        let k = w.len() - 1;
        if pos == k {
            if w[k - 1] == 0 {
                return;
            }
            let mask = mask | pair_bit(w[k - 1], 0);
            let v = top + 1;
            let idx = match c.by_mask.get(&(v, mask)) {
                Some(&i) => i,
                None => {
                    let shape = WalkShape::from_small(&small_from_mask(v as usize, mask));
                    let i = match c.index.get(&shape.code) {
                        Some(&i) => i,
                        None => {
                            c.index.insert(shape.code, c.shapes.len());
                            c.shapes.push(shape);
                            c.ind_nb.push(0);
                            c.walks.push(Vec::new());
                            rg.push(0);
                            c.shapes.len() - 1
                        }
                    };
                    c.by_mask.insert((v, mask), i);
                    i
                }
            };
            rg[idx] += 1;
            if is_nb_tailless(w) {
                c.ind_nb[idx] += 1;
            }
            c.walks[idx].extend_from_slice(w);
            return;
        }
        let prev = w[pos - 1];
        let limit = if (top as usize) + 1 < k { top + 1 } else { top };
        for x in 0..=limit {
            if x == prev {
                continue;
            }
            w[pos] = x;
            rec(c, rg, w, pos + 1, top.max(x), mask | pair_bit(prev, x));
        }
    }
    rec(&mut c, &mut rg_count, &mut w, 1, 0, 0);
    let mut order: Vec<usize> = (0..c.shapes.len()).collect();
    order.sort_by_key(|&i| (c.shapes[i].v, c.shapes[i].e, c.shapes[i].code));
    let mut remap = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let mut shapes = Vec::with_capacity(order.len());
    let mut ind_nb = Vec::with_capacity(order.len());
    let mut walks = Vec::with_capacity(order.len());
    for &old in &order {
        let mut s = c.shapes[old].clone();
        s.ind_self.insert(k, rg_count[old] * s.aut as u128);
        ind_nb.push(c.ind_nb[old] * s.aut as u128);
        shapes.push(s);
        walks.push(std::mem::take(&mut c.walks[old]));
    }
    c.index = shapes.iter().enumerate().map(|(i, s)| (s.code, i)).collect();
    for i in c.by_mask.values_mut() {
        *i = remap[*i];
    }
    c.shapes = shapes;
    c.ind_nb = ind_nb;
    c.walks = walks;
    c
}

static CENSUSES: [OnceLock<Census>; MAX_CENSUS_K + 1] = [const { OnceLock::new() }; MAX_CENSUS_K + 1];

/// Shared census of `W_k` for `2 ≤ k ≤ 9`, computed once per process.
pub fn census(k: usize) -> Result<&'static Census> {
    if !(2..=MAX_CENSUS_K).contains(&k) {
        return Err(Error::Domain(format!("walk length {k} outside 2..={MAX_CENSUS_K}")));
    }
    Ok(CENSUSES[k].get_or_init(|| build_census(k)))
}

/// The shapes of `W_k` ordered by `(v, e)`, with `ind_self[k]` populated.
pub fn enumerate_walk_shapes(k: usize) -> Result<Vec<WalkShape>> {
    Ok(census(k)?.shapes.clone())
}

/// Canonical shape induced by the edges of a closed walk.
pub fn classify_walk(w: &ClosedWalk) -> Result<WalkShape> {
    let norm = w.normalized();
    let v = *norm.iter().max().unwrap() as usize + 1;
    if v > MAX_V {
        return Err(Error::Size(format!("walk visits {v} distinct nodes")));
    }
    let mut g = SmallGraph::new(v)?;
    for p in norm.windows(2) {
        g.add_edge(p[0] as usize, p[1] as usize);
    }
    let mut shape = WalkShape::from_small(&g);
    if w.k() <= MAX_CENSUS_K {
        let x = shape.ind_self_at(w.k())?;
        shape.ind_self.insert(w.k(), x);
    }
    Ok(shape)
}
