//! The extension relation on `W_k`: `F ⊲_k F'` when some closed walk inducing
//! `F'` differs in one position from a closed walk inducing `F`, and `F'` has
//! one more node and at most one more edge.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shapes::{census, edge_mask, normalize, Census, ClosedWalk, WalkShape, MAX_CENSUS_K};

/// Degree-sequence case of an extension:
/// 1. new node of degree 2, one node loses two edges;
/// 2. new node of degree 2, one node loses an edge and another gains one;
/// 3. new pendant node, nothing lost;
/// 4. new pendant node, its neighbour's replaced edge lost.
pub type Case = u8;

/// One cover `F ⊲_k F'` with the cases realised by some witness pair.
#[derive(Clone, Debug, Serialize)]
pub struct Cover {
    pub from: usize,
    pub to: usize,
    pub cases: BTreeSet<Case>,
    /// A pair of walks at Hamming distance one inducing `F` and `F'`.
    pub witness: (String, String),
}

/// Shapes of `W_k` with their covering relation.
#[derive(Debug)]
pub struct ShapePoset {
    k: usize,
    census: &'static Census,
    covers: Vec<Cover>,
}

impl ShapePoset {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shapes(&self) -> &'static [WalkShape] {
        self.census.shapes()
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    /// Indices of shapes with no extension.
    pub fn maximal(&self) -> Vec<usize> {
        let has_up: BTreeSet<usize> = self.covers.iter().map(|c| c.from).collect();
        (0..self.census.len()).filter(|i| !has_up.contains(i)).collect()
    }
}

/// Outcome of replacing position `i` of a walk by a fresh node.
struct Step {
    walk: Vec<u8>,
    case: Case,
}

/// Replaces `w[i]` by a fresh label if that yields an extension.
fn try_step(w: &[u8], i: usize) -> Option<Step> {
    let k = w.len() - 1;
    let b = w[i];
    if !w[..k].iter().enumerate().any(|(j, &x)| j != i && x == b) {
        return None;
    }
    let fresh = *w.iter().max().unwrap() + 1;
    let mut out = w.to_vec();
    out[i] = fresh;
    let before = edge_mask(w).count_ones();
    let after = edge_mask(&out).count_ones();
    if after > before + 1 {
        return None;
    }
    let kept = edge_mask(&out);
    let lost = |x: u8, y: u8| kept & crate::shapes::pair_bit(x, y) == 0;
    let (a, c) = (w[i - 1], w[i + 1]);
    let case = if a != c {
        match (lost(a, b), lost(b, c)) {
            (true, true) => 1,
            _ => 2,
        }
    } else if lost(a, b) {
        4
    } else {
        3
    };
    Some(Step { walk: out, case })
}

fn digits(w: &[u8]) -> String {
    w.iter().map(|x| x.to_string()).collect()
}

fn build_poset(k: usize) -> Result<ShapePoset> {
    let c = census(k)?;
    let mut found: BTreeMap<(usize, usize), (BTreeSet<Case>, (String, String))> = BTreeMap::new();
    for from in 0..c.len() {
        for w in c.walks_of(from) {
            for i in 1..k {
                if let Some(step) = try_step(w, i) {
                    let norm = normalize(&step.walk.iter().map(|&x| x as usize).collect::<Vec<_>>());
                    let to = c.shape_of_normalized(&norm);
                    let entry = found
                        .entry((from, to))
                        .or_insert_with(|| (BTreeSet::new(), (digits(w), digits(&step.walk))));
                    entry.0.insert(step.case);
                }
            }
        }
    }
    let covers = found
        .into_iter()
        .map(|((from, to), (cases, witness))| Cover { from, to, cases, witness })
        .collect();
    Ok(ShapePoset { k, census: c, covers })
}

static POSETS: [OnceLock<ShapePoset>; MAX_CENSUS_K + 1] = [const { OnceLock::new() }; MAX_CENSUS_K + 1];

/// Shared extension poset of `W_k`.
pub fn shape_poset(k: usize) -> Result<&'static ShapePoset> {
    census(k)?;
    if let Some(p) = POSETS[k].get() {
        return Ok(p);
    }
    let p = build_poset(k)?;
    Ok(POSETS[k].get_or_init(|| p))
}

/// All `F'` with `F ⊲_k F'`, each with the degree-sequence cases it realises.
pub fn extensions_of(f: &WalkShape, k: usize) -> Result<Vec<(WalkShape, BTreeSet<Case>)>> {
    let p = shape_poset(k)?;
    let from = p
        .census
        .index_of(&f.code)
        .ok_or_else(|| Error::Domain(format!("{} is not induced by a closed {k}-walk", f.name)))?;
    Ok(p.covers
        .iter()
        .filter(|c| c.from == from)
        .map(|c| (p.shapes()[c.to].clone(), c.cases.clone()))
        .collect())
}

/// True iff `F` is the `k`-cycle, or `k` is even and `F` is a tree on `k/2 + 1` nodes.
pub fn is_fully_extended(f: &WalkShape, k: usize) -> bool {
    (f.is_cycle() && f.v == k) || (k % 2 == 0 && f.is_tree() && f.v == k / 2 + 1)
}

/// A walk at Hamming distance one inducing an extension of the shape of `w`,
/// or `None` when that shape is fully extended. The first admissible position
/// is replaced by the smallest unused node label.
pub fn extend_walk(w: &ClosedWalk) -> Result<Option<ClosedWalk>> {
    let nodes = w.nodes();
    let k = w.k();
    let fresh = nodes.iter().copied().max().unwrap() + 1;
    let norm = w.normalized();
    for i in 1..k {
        if try_step(&norm, i).is_some() {
            let mut out = nodes.to_vec();
            out[i] = fresh;
            return ClosedWalk::new(out).map(Some);
        }
    }
    Ok(None)
}
