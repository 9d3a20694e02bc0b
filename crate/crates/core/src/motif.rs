//! Exact counters: closed walks, non-backtracking closed walks, cycles and
//! the two-path summary, plus brute-force walk censuses used as oracles.

use std::collections::{BTreeMap, HashMap};

use num_traits::ops::overflowing::OverflowingAdd;
use serde::Serialize;

use crate::canon::{CanonicalCode, SmallGraph};
use crate::embed::{falling_factorial, subgraph_count};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::shapes::{census, WalkShape};

/// Unsigned counter type for walk vectors.
trait Count: Copy + Eq + num_traits::Zero + num_traits::One + OverflowingAdd + Into<u128> {}
impl Count for u64 {}
impl Count for u128 {}

/// Sparse vector with a list of touched coordinates.
struct Sparse<T> {
    val: Vec<T>,
    touched: Vec<u32>,
}

impl<T: Count> Sparse<T> {
    fn new(n: usize) -> Sparse<T> {
        Sparse { val: vec![T::zero(); n], touched: Vec::new() }
    }

    #[inline]
    fn add(&mut self, i: usize, x: T, overflow: &mut bool) {
        let slot = &mut self.val[i];
        if slot.is_zero() {
            self.touched.push(i as u32);
        }
        let (s, o) = slot.overflowing_add(&x);
        *overflow |= o;
        *slot = s;
    }

    fn clear(&mut self) {
        for &i in &self.touched {
            self.val[i as usize] = T::zero();
        }
        self.touched.clear();
    }
}

/// `Σ_i a[i] · b[map(i)]` over the touched coordinates of `a`.
fn dot<T: Count>(a: &Sparse<T>, b: &Sparse<T>, map: impl Fn(u32) -> u32, overflow: &mut bool) -> u128 {
    let mut acc: u128 = 0;
    for &i in &a.touched {
        let y: u128 = b.val[map(i) as usize].into();
        if y != 0 {
            let x: u128 = a.val[i as usize].into();
            let (p, o1) = x.overflowing_mul(y);
            let (s, o2) = acc.overflowing_add(p);
            *overflow |= o1 | o2;
            acc = s;
        }
    }
    acc
}

/// Whether walk vectors from one start stay below `2^63` for `steps` steps.
fn fits_u64(max_branch: usize, steps: usize) -> bool {
    (max_branch as u128).checked_pow(steps as u32).is_some_and(|x| x < 1 << 63)
}

/// Pushes `layers[0]` forward `layers.len() - 1` steps along `next`.
fn grow<T: Count>(layers: &mut [Sparse<T>], next: impl Fn(usize) -> std::ops::Range<usize>, targets: &[u32], overflow: &mut bool) {
    for j in 0..layers.len() - 1 {
        let (lo, hi) = layers.split_at_mut(j + 1);
        let (src, dst) = (&lo[j], &mut hi[0]);
        for &u in &src.touched {
            let x = src.val[u as usize];
            for &w in &targets[next(u as usize)] {
                dst.add(w as usize, x, overflow);
            }
        }
    }
}

fn closed_walks_with<T: Count>(g: &Graph, k_max: usize) -> Result<Vec<u128>> {
    let n = g.n();
    let half = k_max.div_ceil(2);
    let mut out = vec![0u128; k_max + 1];
    out[0] = n as u128;
    let mut layers: Vec<Sparse<T>> = (0..=half).map(|_| Sparse::new(n)).collect();
    let targets: Vec<u32> = (0..n).flat_map(|v| g.neighbors(v).iter().copied()).collect();
    let mut offsets = vec![0usize; n + 1];
    for v in 0..n {
        offsets[v + 1] = offsets[v] + g.degree(v);
    }
    let mut overflow = false;
    for i in 0..n {
        layers[0].add(i, T::one(), &mut overflow);
        grow(&mut layers, |u| offsets[u]..offsets[u + 1], &targets, &mut overflow);
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            let d = dot(&layers[k.div_ceil(2)], &layers[k / 2], |x| x, &mut overflow);
            let (s, o) = slot.overflowing_add(d);
            overflow |= o;
            *slot = s;
        }
        for l in &mut layers {
            l.clear();
        }
        if overflow {
            return Err(Error::Overflow("closed walk count"));
        }
    }
    Ok(out)
}

/// `Tr(A^k)` for `k = 0..=k_max`.
pub fn closed_walk_counts(g: &Graph, k_max: usize) -> Result<Vec<u128>> {
    let max_deg = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
    if fits_u64(max_deg, k_max.div_ceil(2)) {
        closed_walks_with::<u64>(g, k_max)
    } else {
        closed_walks_with::<u128>(g, k_max)
    }
}

/// `Tr(A^k)`.
pub fn closed_walk_count(g: &Graph, k: usize) -> Result<u128> {
    if k == 0 {
        return Err(Error::Domain("walk length must be at least 1".into()));
    }
    Ok(closed_walk_counts(g, k)?[k])
}

/// Non-backtracking successor lists of the directed edges of `g`: arc `2e`
/// is `u -> v` and `2e + 1` is `v -> u` for edge `e = (u, v)`.
fn nb_successors(g: &Graph) -> (Vec<usize>, Vec<u32>) {
    let m = g.edge_count();
    let mut out_arcs: Vec<Vec<u32>> = vec![Vec::new(); g.n()];
    let mut head = vec![0u32; 2 * m];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        head[2 * e] = v;
        head[2 * e + 1] = u;
        out_arcs[u as usize].push(2 * e as u32);
        out_arcs[v as usize].push(2 * e as u32 + 1);
    }
    let mut offsets = Vec::with_capacity(2 * m + 1);
    let mut succ = Vec::new();
    offsets.push(0);
    for a in 0..2 * m {
        let reverse = (a ^ 1) as u32;
        succ.extend(out_arcs[head[a] as usize].iter().filter(|&&b| b != reverse));
        offsets.push(succ.len());
    }
    (offsets, succ)
}

fn nb_walks_with<T: Count>(g: &Graph, k_max: usize) -> Result<Vec<u128>> {
    let (offsets, succ) = nb_successors(g);
    let na = 2 * g.edge_count();
    let half = k_max.div_ceil(2);
    let mut out = vec![0u128; k_max + 1];
    out[0] = na as u128;
    let mut fwd: Vec<Sparse<T>> = (0..=half).map(|_| Sparse::new(na)).collect();
    let mut rev: Vec<Sparse<T>> = (0..=half).map(|_| Sparse::new(na)).collect();
    let mut overflow = false;
    for e in 0..na / 2 {
        fwd[0].add(2 * e, T::one(), &mut overflow);
        rev[0].add(2 * e + 1, T::one(), &mut overflow);
        grow(&mut fwd, |a| offsets[a]..offsets[a + 1], &succ, &mut overflow);
        grow(&mut rev, |a| offsets[a]..offsets[a + 1], &succ, &mut overflow);
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            // (B^k)_{aa} = Σ_b (B^p)_{ab} (B^q)_{ā b̄}, and arcs a, ā contribute equally
            let acc = dot(&fwd[k.div_ceil(2)], &rev[k / 2], |b| b ^ 1, &mut overflow);
            overflow |= acc >> 127 != 0;
            let (s, o) = slot.overflowing_add(acc << 1);
            overflow |= o;
            *slot = s;
        }
        for l in fwd.iter_mut().chain(rev.iter_mut()) {
            l.clear();
        }
        if overflow {
            return Err(Error::Overflow("non-backtracking walk count"));
        }
    }
    Ok(out)
}

/// `Tr(B^k)` for `k = 0..=k_max`, with `B` the non-backtracking operator on directed edges.
pub fn nb_closed_walk_counts(g: &Graph, k_max: usize) -> Result<Vec<u128>> {
    let max_deg = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
    if fits_u64(max_deg, k_max.div_ceil(2)) {
        nb_walks_with::<u64>(g, k_max)
    } else {
        nb_walks_with::<u128>(g, k_max)
    }
}

/// Number of non-backtracking tailless closed `k`-walks, `Tr(B^k)`.
pub fn nb_closed_walk_count(g: &Graph, k: usize) -> Result<u128> {
    if k < 3 {
        return Err(Error::Domain("non-backtracking walks need k >= 3".into()));
    }
    Ok(nb_closed_walk_counts(g, k)?[k])
}

fn check_cycle_length(k: usize) -> Result<()> {
    if !(3..=9).contains(&k) {
        return Err(Error::Domain(format!("cycle length {k} outside 3..=9")));
    }
    Ok(())
}

/// Cycle counts for every length `3..=k_max` by depth-first search from the
/// smallest vertex of each cycle. Index `k` of the result holds `#C_k`.
pub fn cycle_counts_dfs(g: &Graph, k_max: usize) -> Vec<u128> {
    let mut counts = vec![0u128; k_max + 1];
    if k_max < 3 {
        return counts;
    }
    let n = g.n();
    let mut on_path = vec![false; n];
    fn dfs(g: &Graph, r: usize, x: usize, len: usize, k_max: usize, on_path: &mut [bool], counts: &mut [u128]) {
        for &y in g.neighbors(x) {
            let y = y as usize;
            if y <= r || on_path[y] {
                continue;
            }
            // path r .. x y has len + 1 edges
            if len + 2 >= 3 && g.has_edge(y, r) {
                counts[len + 2] += 1;
            }
            if len + 2 < k_max {
                on_path[y] = true;
                dfs(g, r, y, len + 1, k_max, on_path, counts);
                on_path[y] = false;
            }
        }
    }
    for r in 0..n {
        on_path[r] = true;
        dfs(g, r, r, 0, k_max, &mut on_path, &mut counts);
        on_path[r] = false;
    }
    // Each cycle is found once per direction; a length-2 "cycle" is an edge and is discarded.
    counts[2] = 0;
    for c in counts.iter_mut() {
        *c /= 2;
    }
    counts
}

#[inline]
fn bloom_bit(z: u32) -> u64 {
    1u64 << (z.wrapping_mul(0x9E37_79B9) >> 26)
}

/// Visits every simple path of `len` edges from `r` through vertices larger
/// than `r`, passing its endpoint, interior vertices and interior hash.
fn for_each_half_path(g: &Graph, r: usize, len: usize, visit: &mut impl FnMut(u32, &[u32; 4], u64)) {
    fn rec(g: &Graph, r: usize, len: usize, depth: usize, stack: &mut [u32; 4], bloom: u64, visit: &mut impl FnMut(u32, &[u32; 4], u64)) {
        let x = if depth == 0 { r } else { stack[depth - 1] as usize };
        for &y in g.neighbors(x) {
            if (y as usize) <= r || stack[..depth].contains(&y) {
                continue;
            }
            if depth + 1 == len {
                visit(y, stack, bloom);
            } else {
                stack[depth] = y;
                rec(g, r, len, depth + 1, stack, bloom | bloom_bit(y), visit);
                stack[depth] = u32::MAX;
            }
        }
    }
    let mut stack = [u32::MAX; 4];
    rec(g, r, len, 0, &mut stack, 0, visit);
}

/// Half-paths from one root grouped by endpoint.
struct Buckets {
    start: Vec<u32>,
    count: Vec<u32>,
    touched: Vec<u32>,
    raw: Vec<(u32, [u32; 4], u64)>,
    inner: Vec<[u32; 4]>,
    bloom: Vec<u64>,
}

impl Buckets {
    fn new(n: usize) -> Buckets {
        Buckets { start: vec![0; n], count: vec![0; n], touched: Vec::new(), raw: Vec::new(), inner: Vec::new(), bloom: Vec::new() }
    }

    fn fill(&mut self, g: &Graph, r: usize, len: usize) {
        for &x in &self.touched {
            self.count[x as usize] = 0;
        }
        self.touched.clear();
        self.raw.clear();
        let raw = &mut self.raw;
        for_each_half_path(g, r, len, &mut |end, inner, bloom| raw.push((end, *inner, bloom)));
        for &(end, _, _) in &self.raw {
            if self.count[end as usize] == 0 {
                self.touched.push(end);
            }
            self.count[end as usize] += 1;
        }
        let mut offset = 0;
        for &x in &self.touched {
            self.start[x as usize] = offset;
            offset += self.count[x as usize];
        }
        self.inner.resize(self.raw.len(), [0; 4]);
        self.bloom.resize(self.raw.len(), 0);
        let saved: Vec<u32> = self.touched.iter().map(|&x| self.start[x as usize]).collect();
        // scatter with `start` as a moving cursor, then restore it
        for &(end, inner, bloom) in &self.raw {
            let c = self.start[end as usize] as usize;
            self.inner[c] = inner;
            self.bloom[c] = bloom;
            self.start[end as usize] += 1;
        }
        for (i, &x) in self.touched.iter().enumerate() {
            self.start[x as usize] = saved[i];
        }
    }

    fn bucket(&self, x: u32) -> std::ops::Range<usize> {
        if self.count[x as usize] == 0 {
            return 0..0;
        }
        let s = self.start[x as usize] as usize;
        s..s + self.count[x as usize] as usize
    }
}

#[inline]
fn disjoint(ia: &[u32; 4], ba: u64, ib: &[u32; 4], bb: u64) -> bool {
    ba & bb == 0 || ia.iter().take_while(|&&x| x != u32::MAX).all(|x| !ib.contains(x))
}

/// `#C_k` by joining pairs of simple half-paths from each cycle's smallest vertex.
pub fn cycle_count_mitm(g: &Graph, k: usize) -> Result<u128> {
    check_cycle_length(k)?;
    let (h1, h2) = (k / 2, k.div_ceil(2));
    let mut short = Buckets::new(g.n());
    let mut total: u128 = 0;
    for r in 0..g.n() {
        short.fill(g, r, h1);
        if short.raw.is_empty() {
            continue;
        }
        if h1 == h2 {
            // each cycle is one unordered pair of half-paths
            for &x in &short.touched {
                let range = short.bucket(x);
                for i in range.clone() {
                    let (ia, ba) = (&short.inner[i], short.bloom[i]);
                    for j in i + 1..range.end {
                        if disjoint(ia, ba, &short.inner[j], short.bloom[j]) {
                            total += 1;
                        }
                    }
                }
            }
        } else {
            // each cycle is found once per direction
            let mut found: u128 = 0;
            for_each_half_path(g, r, h2, &mut |end, inner, bloom| {
                for j in short.bucket(end) {
                    if disjoint(inner, bloom, &short.inner[j], short.bloom[j]) {
                        found += 1;
                    }
                }
            });
            total += found;
        }
    }
    Ok(if h1 == h2 { total } else { total / 2 })
}

/// Triangles through each vertex, `(A^3)_{ii} / 2`.
pub fn triangles_per_vertex(g: &Graph) -> Vec<u128> {
    let mut t = vec![0u128; g.n()];
    for &(u, v) in g.edges() {
        let c = g.codegree(u as usize, v as usize) as u128;
        t[u as usize] += c;
        t[v as usize] += c;
    }
    for x in &mut t {
        *x /= 2;
    }
    t
}

/// Number of 4-cycles, by codegree accumulation or bitset intersection, whichever is cheaper.
pub fn four_cycle_count(g: &Graph) -> u128 {
    let n = g.n();
    let wedge_cost: usize = (0..n).map(|x| g.degree(x) * g.degree(x)).sum();
    let bitset_cost = n * n / 2 * g.words();
    let mut pairs: u128 = 0;
    if wedge_cost <= bitset_cost {
        let mut cnt = vec![0u32; n];
        let mut touched = Vec::new();
        for i in 0..n {
            for &j in g.neighbors(i) {
                for &l in g.neighbors(j as usize) {
                    let l = l as usize;
                    if l > i {
                        if cnt[l] == 0 {
                            touched.push(l);
                        }
                        cnt[l] += 1;
                    }
                }
            }
            for &l in &touched {
                let c = cnt[l] as u128;
                pairs += c * (c.saturating_sub(1)) / 2;
                cnt[l] = 0;
            }
            touched.clear();
        }
    } else {
        for i in 0..n {
            for l in i + 1..n {
                let c = g.codegree(i, l) as u128;
                pairs += c * c.saturating_sub(1) / 2;
            }
        }
    }
    pairs / 2
}

/// `#C_k` from traces: closed forms for `k ≤ 5`, and for `k = 6, 7` the trace
/// minus the walks inducing every other shape of `W_k`.
pub fn cycle_count_trace(g: &Graph, k: usize) -> Result<u128> {
    if !(3..=7).contains(&k) {
        return Err(Error::Domain(format!("trace method covers cycle lengths 3..=7, got {k}")));
    }
    let tr = closed_walk_counts(g, k)?;
    let m = g.edge_count() as u128;
    let deg = g.degree_sequence();
    let sq: u128 = deg.iter().map(|&d| (d * d) as u128).sum();
    let value: i128 = match k {
        3 => tr[3] as i128 / 6,
        4 => (tr[4] as i128 - 2 * sq as i128 + 2 * m as i128) / 8,
        5 => {
            let t = triangles_per_vertex(g);
            let corr: i128 = deg.iter().zip(&t).map(|(&d, &ti)| (d as i128 - 2) * 2 * ti as i128).sum();
            (tr[5] as i128 - 5 * tr[3] as i128 - 5 * corr) / 10
        }
        _ => {
            let c = census(k)?;
            let mut rest: u128 = 0;
            for (i, s) in c.shapes().iter().enumerate() {
                if s.is_cycle() && s.v == k {
                    continue;
                }
                rest += c.ind_self(i) * subgraph_count(s, g)?;
            }
            ((tr[k] - rest) / (2 * k as u128)) as i128
        }
    };
    Ok(value as u128)
}

/// Exact `#C_k` for `3 ≤ k ≤ 9`.
pub fn cycle_count(g: &Graph, k: usize) -> Result<u128> {
    check_cycle_length(k)?;
    match k {
        3 => return Ok(triangles_per_vertex(g).iter().sum::<u128>() / 3),
        4 => return Ok(four_cycle_count(g)),
        _ => {}
    }
    let mean_deg = 2.0 * g.edge_count() as f64 / g.n().max(1) as f64;
    if (g.n() as f64) * mean_deg.powi(k as i32 - 1) < 2e7 {
        Ok(cycle_counts_dfs(g, k)[k])
    } else {
        cycle_count_mitm(g, k)
    }
}

/// `#C_k` for every `k` in `3..=k_max` (index `k`).
pub fn cycle_counts(g: &Graph, k_max: usize) -> Result<Vec<u128>> {
    if k_max > 9 {
        return Err(Error::Domain(format!("cycle length {k_max} outside 3..=9")));
    }
    let mean_deg = 2.0 * g.edge_count() as f64 / g.n().max(1) as f64;
    if (g.n() as f64) * mean_deg.powi(k_max as i32 - 1) < 2e7 {
        return Ok(cycle_counts_dfs(g, k_max));
    }
    let mut out = vec![0u128; k_max + 1];
    for k in 3..=k_max {
        out[k] = cycle_count(g, k)?;
    }
    Ok(out)
}

/// Number of `k`-cycles in `K_n`, `(n)_k / (2k)`.
pub fn cycle_count_complete(n: usize, k: usize) -> Result<u128> {
    if k < 3 || n < k {
        return Err(Error::Domain(format!("need n >= k >= 3, got n={n}, k={k}")));
    }
    Ok(falling_factorial(n as u128, k as u128)? / (2 * k as u128))
}

/// `(½ Σ d_i(d_i − 1), ((n − 2)/2) Σ d_i)`.
pub fn two_path_counts(g: &Graph) -> Result<(u128, u128)> {
    let n = g.n();
    if n < 3 {
        return Err(Error::Domain(format!("two-path summary needs n >= 3, got {n}")));
    }
    let paths: u128 = g.degree_sequence().iter().map(|&d| (d * d.saturating_sub(1) / 2) as u128).sum();
    Ok((paths, (n as u128 - 2) * g.edge_count() as u128))
}

/// `t_2, …, t_{k_max}`: the two-path ratio, then `k`-th roots of cycle proportions.
pub fn scale_summaries(g: &Graph, k_max: usize) -> Result<Vec<f64>> {
    if k_max < 2 || g.n() < k_max.max(3) {
        return Err(Error::Domain(format!("need n >= k_max >= 2 and n >= 3, got n={}, k_max={k_max}", g.n())));
    }
    let (paths, norm) = two_path_counts(g)?;
    let mut t = Vec::with_capacity(k_max - 1);
    t.push(if norm == 0 { 0.0 } else { paths as f64 / norm as f64 });
    let cycles = cycle_counts(g, k_max)?;
    for k in 3..=k_max {
        let full = cycle_count_complete(g.n(), k)?;
        t.push((cycles[k] as f64 / full as f64).powf(1.0 / k as f64));
    }
    Ok(t)
}

/// Machine-readable count bundle for one graph.
#[derive(Clone, Debug, Serialize)]
pub struct CensusResult {
    pub k_max: usize,
    /// `Tr(A^k)` for `k = 1..=k_max`, keyed by `k`.
    pub closed_walks: BTreeMap<usize, u128>,
    /// `Tr(B^k)` for `k = 3..=k_max`.
    pub nb_closed_walks: BTreeMap<usize, u128>,
    pub cycles: BTreeMap<usize, u128>,
    pub two_paths: u128,
    pub two_path_norm: u128,
}

/// Closed walks, non-backtracking walks, cycles and two-paths up to `k_max`.
pub fn motif_census(g: &Graph, k_max: usize) -> Result<CensusResult> {
    if !(3..=9).contains(&k_max) {
        return Err(Error::Domain(format!("k_max {k_max} outside 3..=9")));
    }
    let tr = closed_walk_counts(g, k_max)?;
    let nb = nb_closed_walk_counts(g, k_max)?;
    let cycles = cycle_counts(g, k_max)?;
    let (two_paths, two_path_norm) = if g.n() >= 3 { two_path_counts(g)? } else { (0, 0) };
    Ok(CensusResult {
        k_max,
        closed_walks: (1..=k_max).map(|k| (k, tr[k])).collect(),
        nb_closed_walks: (3..=k_max).map(|k| (k, nb[k])).collect(),
        cycles: (3..=k_max).map(|k| (k, cycles[k])).collect(),
        two_paths,
        two_path_norm,
    })
}

fn brute_force(g: &Graph, k: usize, nb: bool) -> Result<Vec<(WalkShape, u128)>> {
    if g.n() > 14 || k > 8 {
        return Err(Error::Size(format!("brute-force census limited to n <= 14, k <= 8 (got n={}, k={k})", g.n())));
    }
    if k < 2 {
        return Err(Error::Domain("walk length must be at least 2".into()));
    }
    let mut edge_id = HashMap::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        edge_id.insert((u as usize, v as usize), e);
        edge_id.insert((v as usize, u as usize), e);
    }
    // state: (current, previous, first step, edge set) -> walk count
    type State = (u8, u8, u8, u128);
    let mut tally: BTreeMap<(u8, u128), u128> = BTreeMap::new();
    for s in 0..g.n() {
        let mut layer: HashMap<State, u128> = HashMap::new();
        for &y in g.neighbors(s) {
            let e = edge_id[&(s, y as usize)];
            *layer.entry((y as u8, s as u8, y as u8, 1u128 << e)).or_default() += 1;
        }
        for _ in 1..k {
            let mut next: HashMap<State, u128> = HashMap::new();
            for (&(cur, prev, first, mask), &cnt) in &layer {
                for &y in g.neighbors(cur as usize) {
                    if nb && y as u8 == prev {
                        continue;
                    }
                    let e = edge_id[&(cur as usize, y as usize)];
                    *next.entry((y as u8, cur, first, mask | 1u128 << e)).or_default() += cnt;
                }
            }
            layer = next;
        }
        for ((cur, prev, first, mask), cnt) in layer {
            if cur as usize != s || (nb && prev == first) {
                continue;
            }
            *tally.entry((s as u8, mask)).or_default() += cnt;
        }
    }
    let mut shapes: BTreeMap<CanonicalCode, (WalkShape, u128)> = BTreeMap::new();
    let mut cache: HashMap<u128, CanonicalCode> = HashMap::new();
    for ((_, mask), cnt) in tally {
        let code = match cache.get(&mask) {
            Some(c) => *c,
            None => {
                let edges: Vec<(usize, usize)> = (0..g.edge_count())
                    .filter(|e| mask >> e & 1 == 1)
                    .map(|e| {
                        let (u, v) = g.edges()[e];
                        (u as usize, v as usize)
                    })
                    .collect();
                let mut verts: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
                verts.sort_unstable();
                verts.dedup();
                let pos = |x: usize| verts.binary_search(&x).unwrap();
                let local: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (pos(u), pos(v))).collect();
                let shape = WalkShape::from_small(&SmallGraph::from_edges(verts.len(), &local)?);
                let code = shape.code;
                shapes.entry(code).or_insert((shape, 0));
                cache.insert(mask, code);
                code
            }
        };
        shapes.get_mut(&code).unwrap().1 += cnt;
    }
    let mut out: Vec<(WalkShape, u128)> = shapes.into_values().collect();
    out.sort_by_key(|(s, _)| (s.v, s.e, s.code));
    Ok(out)
}

/// Every closed `k`-walk of `g` classified by induced shape.
pub fn brute_force_walk_census(g: &Graph, k: usize) -> Result<Vec<(WalkShape, u128)>> {
    brute_force(g, k, false)
}

/// Every non-backtracking tailless closed `k`-walk of `g` classified by induced shape.
pub fn brute_force_nb_census(g: &Graph, k: usize) -> Result<Vec<(WalkShape, u128)>> {
    if k < 3 {
        return Err(Error::Domain("non-backtracking walks need k >= 3".into()));
    }
    brute_force(g, k, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn petersen() -> Graph {
        Graph::from_edges(
            10,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9), (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)],
        )
        .unwrap()
    }

    #[test]
    fn closed_walk_examples() {
        assert_eq!(closed_walk_count(&Graph::complete(3), 3).unwrap(), 6);
        assert_eq!(closed_walk_count(&Graph::path(2), 2).unwrap(), 2);
        assert_eq!(closed_walk_count(&Graph::cycle(4).unwrap(), 4).unwrap(), 32);
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(closed_walk_count(&Graph::complete(400), 16), Err(Error::Overflow("closed walk count")));
    }

    #[test]
    fn nb_examples() {
        assert_eq!(nb_closed_walk_count(&Graph::complete(3), 3).unwrap(), 6);
        assert_eq!(nb_closed_walk_count(&Graph::star(5), 6).unwrap(), 0);
        assert_eq!(nb_closed_walk_count(&Graph::cycle(6).unwrap(), 3).unwrap(), 0);
        assert_eq!(nb_closed_walk_count(&Graph::cycle(6).unwrap(), 6).unwrap(), 12);
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(cycle_count(&Graph::complete(5), 3).unwrap(), 10);
        assert_eq!(cycle_count(&Graph::complete(6), 4).unwrap(), 45);
        assert_eq!(cycle_count(&petersen(), 5).unwrap(), 12);
        assert_eq!(cycle_count_mitm(&petersen(), 5).unwrap(), 12);
        assert_eq!(cycle_count_trace(&petersen(), 5).unwrap(), 12);
        assert!(cycle_count(&petersen(), 10).is_err());
    }

    #[test]
    fn complete_cycle_counts() {
        assert_eq!(cycle_count_complete(5, 3).unwrap(), 10);
        assert_eq!(cycle_count_complete(6, 4).unwrap(), 45);
        assert_eq!(cycle_count_complete(9, 9).unwrap(), 20160);
    }

    #[test]
    fn two_path_examples() {
        assert_eq!(two_path_counts(&Graph::complete(3)).unwrap(), (3, 3));
        assert_eq!(two_path_counts(&Graph::star(3)).unwrap(), (3, 6));
        assert_eq!(two_path_counts(&Graph::empty(5)).unwrap(), (0, 0));
        assert!(two_path_counts(&Graph::path(2)).is_err());
    }

    #[test]
    fn summary_examples() {
        assert!(scale_summaries(&Graph::complete(8), 5).unwrap().iter().all(|&t| (t - 1.0).abs() < 1e-12));
        assert!(scale_summaries(&Graph::empty(8), 5).unwrap().iter().all(|&t| t == 0.0));
        let t = scale_summaries(&Graph::cycle(5).unwrap(), 5).unwrap();
        assert!((t[3] - (1.0f64 / 12.0).powf(0.2)).abs() < 1e-12);
        assert_eq!(t[1], 0.0);
    }

    #[test]
    fn brute_force_examples() {
        let k3 = brute_force_walk_census(&Graph::complete(3), 3).unwrap();
        assert_eq!(k3.len(), 1);
        assert_eq!((k3[0].0.name.as_str(), k3[0].1), ("C3", 6));
        let p2 = brute_force_walk_census(&Graph::path(2), 4).unwrap();
        assert_eq!((p2[0].0.name.as_str(), p2[0].1), ("P2", 2));
        let c6 = brute_force_nb_census(&Graph::cycle(6).unwrap(), 6).unwrap();
        assert_eq!((c6[0].0.name.as_str(), c6[0].1), ("C6", 12));
        assert!(brute_force_walk_census(&Graph::empty(15), 3).is_err());
    }
}
