//! Exact subgraph counts `X_F(G)` by backtracking embedding search, and the
//! quantities built on them.

use num_rational::Ratio;

use crate::canon::SmallGraph;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::shapes::WalkShape;

/// Number of injective edge-preserving maps `F -> G`.
pub fn embedding_count(f: &SmallGraph, g: &Graph) -> Result<u128> {
    let v = f.v();
    if v == 0 {
        return Ok(1);
    }
    if v > g.n() {
        return Ok(0);
    }
    let order = search_order(f);
    let mut pos = [0usize; 16];
    for (p, &x) in order.iter().enumerate() {
        pos[x] = p;
    }
    // Earlier-placed neighbours of each position, as positions.
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(p, &x)| (0..v).filter(|&y| f.has_edge(x, y) && pos[y] < p).map(|y| pos[y]).collect())
        .collect();
    let mut img = vec![0usize; v];
    Ok(extend(g, &back, &mut img, 0))
}

/// Vertex order in which every vertex after the first of its component has an earlier neighbour.
fn search_order(f: &SmallGraph) -> Vec<usize> {
    let v = f.v();
    let mut order = Vec::with_capacity(v);
    let mut placed = vec![false; v];
    while order.len() < v {
        let root = (0..v).filter(|&a| !placed[a]).max_by_key(|&a| (f.degree(a), usize::MAX - a)).unwrap();
        placed[root] = true;
        order.push(root);
        let mut head = order.len() - 1;
        while head < order.len() {
            let a = order[head];
            head += 1;
            let mut nb: Vec<usize> = (0..v).filter(|&b| f.has_edge(a, b) && !placed[b]).collect();
            nb.sort_by_key(|&b| std::cmp::Reverse(f.degree(b)));
            for b in nb {
                placed[b] = true;
                order.push(b);
            }
        }
    }
    order
}

fn extend(g: &Graph, back: &[Vec<usize>], img: &mut [usize], p: usize) -> u128 {
    let v = back.len();
    let last = p + 1 == v;
    let nb = &back[p];
    if nb.is_empty() {
        if last {
            return (g.n() - p) as u128;
        }
        let mut total = 0;
        for x in 0..g.n() {
            if !img[..p].contains(&x) {
                img[p] = x;
                total += extend(g, back, img, p + 1);
            }
        }
        return total;
    }
    let anchor = img[nb[0]];
    if last && nb.len() == 1 {
        let taken = img[..p].iter().filter(|&&u| g.has_edge(anchor, u)).count();
        return (g.degree(anchor) - taken) as u128;
    }
    let mut total = 0;
    for &x in g.neighbors(anchor) {
        let x = x as usize;
        if img[..p].contains(&x) || !nb[1..].iter().all(|&q| g.has_edge(img[q], x)) {
            continue;
        }
        if last {
            total += 1;
        } else {
            img[p] = x;
            total += extend(g, back, img, p + 1);
        }
    }
    total
}

fn binom(n: u128, m: u128) -> Option<u128> {
    if m > n {
        return Some(0);
    }
    let mut r: u128 = 1;
    for i in 0..m {
        r = r.checked_mul(n - i)? / (i + 1);
    }
    Some(r)
}

/// Number of subgraphs of `G` isomorphic to `F` (not necessarily induced).
pub fn subgraph_count(f: &WalkShape, g: &Graph) -> Result<u128> {
    if let Some(m) = f.star_leaves() {
        if m == 1 {
            return Ok(g.edge_count() as u128);
        }
        let mut total: u128 = 0;
        for x in 0..g.n() {
            let c = binom(g.degree(x) as u128, m as u128).ok_or(Error::Overflow("star count"))?;
            total = total.checked_add(c).ok_or(Error::Overflow("star count"))?;
        }
        return Ok(total);
    }
    if f.is_cycle() && f.v <= 9 {
        return crate::motif::cycle_count(g, f.v);
    }
    Ok(embedding_count(&f.graph, g)? / f.aut as u128)
}

/// `ind_k(F, G) = ind_k(F, F) · X_F(G)`.
pub fn ind_count(f: &WalkShape, g: &Graph, k: usize) -> Result<u128> {
    let own = f.ind_self_at(k)?;
    if own == 0 {
        return Ok(0);
    }
    own.checked_mul(subgraph_count(f, g)?).ok_or(Error::Overflow("ind_k"))
}

/// `(n)_v` in 128-bit arithmetic.
pub fn falling_factorial(n: u128, v: u128) -> Result<u128> {
    if v > n {
        return Ok(0);
    }
    (0..v).try_fold(1u128, |acc, i| acc.checked_mul(n - i)).ok_or(Error::Overflow("falling factorial"))
}

/// Number of copies of `F` in `K_n`.
pub fn complete_count(f: &WalkShape, n: usize) -> Result<u128> {
    Ok(falling_factorial(n as u128, f.v as u128)? / f.aut as u128)
}

/// Graph walk density `X_F(G) / X_F(K_n)` as an exact fraction.
pub fn graph_walk_density(f: &WalkShape, g: &Graph) -> Result<Ratio<u128>> {
    if f.v > g.n() {
        return Err(Error::Domain(format!("shape has {} nodes but graph only {}", f.v, g.n())));
    }
    let x = subgraph_count(f, g)?;
    let num = x.checked_mul(f.aut as u128).ok_or(Error::Overflow("walk density"))?;
    Ok(Ratio::new(num, falling_factorial(g.n() as u128, f.v as u128)?))
}
