//! Seeded random graph models.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{substream, Purpose};

/// Bounded symmetric kernel on `[0,1]^2`, piecewise constant on blocks and
/// normalised so that it integrates to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Kernel {
    /// `κ ≡ 1`.
    Constant,
    /// `κ(x, y) = values[a][b]` for `x` in block `a`, `y` in block `b`.
    Block { widths: Vec<f64>, values: Vec<Vec<f64>> },
    /// `κ(x, y) = levels[a] · levels[b]`.
    RankOne { widths: Vec<f64>, levels: Vec<f64> },
}

fn check_widths(widths: &[f64]) -> Result<()> {
    if widths.is_empty() || widths.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::Domain("block widths must be positive".into()));
    }
    let total: f64 = widths.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("block widths sum to {total}, not 1")));
    }
    Ok(())
}

impl Kernel {
    /// Blockmodel kernel; `values` are rescaled so the kernel integrates to one.
    pub fn block(widths: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Kernel> {
        check_widths(&widths)?;
        let b = widths.len();
        if values.len() != b || values.iter().any(|r| r.len() != b) {
            return Err(Error::Domain("block value matrix must be square and match the widths".into()));
        }
        let mut total = 0.0;
        for i in 0..b {
            for j in 0..b {
                let v = values[i][j];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::Domain("kernel values must be finite and nonnegative".into()));
                }
                if (v - values[j][i]).abs() > 1e-12 * v.abs().max(1.0) {
                    return Err(Error::Domain("kernel values must be symmetric".into()));
                }
                total += widths[i] * widths[j] * v;
            }
        }
        if total <= 0.0 {
            return Err(Error::Domain("kernel integrates to zero".into()));
        }
        let values = values.into_iter().map(|r| r.into_iter().map(|v| v / total).collect()).collect();
        Ok(Kernel::Block { widths, values })
    }

    /// Rank-one kernel `a(x) a(y)`; levels are rescaled so the kernel integrates to one.
    pub fn rank_one(widths: Vec<f64>, levels: Vec<f64>) -> Result<Kernel> {
        check_widths(&widths)?;
        if levels.len() != widths.len() || levels.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::Domain("levels must be nonnegative and match the widths".into()));
        }
        let mean: f64 = widths.iter().zip(&levels).map(|(w, a)| w * a).sum();
        if mean <= 0.0 {
            return Err(Error::Domain("kernel integrates to zero".into()));
        }
        Ok(Kernel::RankOne { widths, levels: levels.into_iter().map(|a| a / mean).collect() })
    }

    /// Symmetric equal-width blockmodel with `diag` on the diagonal and `off` elsewhere.
    pub fn planted(blocks: usize, diag: f64, off: f64) -> Result<Kernel> {
        let w = vec![1.0 / blocks as f64; blocks];
        let values = (0..blocks).map(|i| (0..blocks).map(|j| if i == j { diag } else { off }).collect()).collect();
        Kernel::block(w, values)
    }

    /// Block widths and block values, with `Constant` as a single block.
    pub fn blocks(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        match self {
            Kernel::Constant => (vec![1.0], vec![vec![1.0]]),
            Kernel::Block { widths, values } => (widths.clone(), values.clone()),
            Kernel::RankOne { widths, levels } => (
                widths.clone(),
                levels.iter().map(|a| levels.iter().map(|b| a * b).collect()).collect(),
            ),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        let (_, v) = self.blocks();
        v.iter().flatten().cloned().fold(0.0, f64::max)
    }

    fn block_of(widths: &[f64], x: f64) -> usize {
        let mut acc = 0.0;
        for (i, w) in widths.iter().enumerate() {
            acc += w;
            if x < acc {
                return i;
            }
        }
        widths.len() - 1
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (w, v) = self.blocks();
        v[Kernel::block_of(&w, x)][Kernel::block_of(&w, y)]
    }
}

/// Kernel-based random graph parameters `(n, ρ, κ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    pub n: usize,
    pub rho: f64,
    pub kernel: Kernel,
}

impl KernelModel {
    /// Requires `0 < ρ < 1/‖κ‖_∞`.
    pub fn new(n: usize, rho: f64, kernel: Kernel) -> Result<KernelModel> {
        let sup = kernel.sup_norm();
        if !(rho > 0.0) || rho * sup >= 1.0 {
            return Err(Error::Domain(format!("rho = {rho} must lie in (0, 1/{sup})")));
        }
        Ok(KernelModel { n, rho, kernel })
    }

    /// Mean degree scale `μ = nρ`.
    pub fn mu(&self) -> f64 {
        self.n as f64 * self.rho
    }
}

/// Power-law inhomogeneous random graph parameters `(n, γ, θ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawModel {
    pub n: usize,
    pub gamma: f64,
    pub theta: f64,
}

impl PowerLawModel {
    pub fn new(n: usize, gamma: f64, theta: f64) -> Result<PowerLawModel> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::Domain(format!("theta = {theta} must lie in (0, 1]")));
        }
        Ok(PowerLawModel { n, gamma, theta })
    }

    /// `P(A_ij = 1) = θ² (ij)^{-γ}` for 1-indexed nodes.
    pub fn edge_probability(&self, i: usize, j: usize) -> f64 {
        self.theta * self.theta * ((i as f64) * (j as f64)).powf(-self.gamma)
    }

    /// `|log θ| / log n`.
    pub fn beta_n(&self) -> f64 {
        self.theta.ln().abs() / (self.n as f64).ln()
    }
}

/// Either generator family, for routines that sample repeatedly from a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GraphModel {
    Kernel(KernelModel),
    PowerLaw(PowerLawModel),
}

impl GraphModel {
    pub fn n(&self) -> usize {
        match self {
            GraphModel::Kernel(m) => m.n,
            GraphModel::PowerLaw(m) => m.n,
        }
    }

    pub fn sample(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphModel::Kernel(m) => sample_kernel_graph(m, seed),
            GraphModel::PowerLaw(m) => sample_powerlaw_graph(m, seed),
        }
    }
}

/// Number of failures before the next success of a Bernoulli(`p`) sequence.
fn geometric_skip(rng: &mut ChaCha8Rng, log_q: f64) -> u64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let s = (u.ln() / log_q).floor();
    if s >= u64::MAX as f64 {
        u64::MAX
    } else {
        s as u64
    }
}

/// Calls `hit(t)` for each index `t < total` selected independently with probability `p`.
fn bernoulli_indices(rng: &mut ChaCha8Rng, total: u64, p: f64, mut hit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(hit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut t: u64 = 0;
    loop {
        let s = geometric_skip(rng, log_q);
        t = match t.checked_add(s) {
            Some(x) if x < total => x,
            _ => return,
        };
        hit(t);
        t += 1;
    }
}

/// Pair `(i, j)`, `i < j`, at linear index `t` of the row-major strict upper triangle over `n` nodes.
fn triangle_pair(t: u64, n: u64) -> (u64, u64) {
    // row i holds n - 1 - i pairs; invert the cumulative count
    let tf = t as f64;
    let nf = n as f64;
    let mut i = ((2.0 * nf - 1.0 - ((2.0 * nf - 1.0).powi(2) - 8.0 * tf).max(0.0).sqrt()) / 2.0).floor() as u64;
    let start = |i: u64| i * (2 * n - i - 1) / 2;
    while i > 0 && start(i) > t {
        i -= 1;
    }
    while start(i + 1) <= t {
        i += 1;
    }
    (i, i + 1 + (t - start(i)))
}

/// `G(n, p)`.
pub fn sample_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = substream(seed, Purpose::Edges, 0);
    let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
    let mut edges = Vec::new();
    bernoulli_indices(&mut rng, total, p, |t| {
        let (i, j) = triangle_pair(t, n as u64);
        edges.push((i as usize, j as usize));
    });
    Graph::from_edges(n, edges)
}

/// Kernel-based random graph: uniform latent positions, then independent edges with probability `ρ κ(x_i, x_j)`.
pub fn sample_kernel_graph(m: &KernelModel, seed: u64) -> Result<Graph> {
    KernelModel::new(m.n, m.rho, m.kernel.clone())?;
    let (widths, values) = m.kernel.blocks();
    let b = widths.len();
    let mut lat = substream(seed, Purpose::Latents, 0);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); b];
    for i in 0..m.n {
        let x: f64 = lat.random();
        members[Kernel::block_of(&widths, x)].push(i);
    }
    let mut edges = Vec::new();
    for a in 0..b {
        for c in a..b {
            let p = m.rho * values[a][c];
            let mut rng = substream(seed, Purpose::Edges, (a * b + c) as u64);
            let (ma, mc) = (&members[a], &members[c]);
            if a == c {
                let s = ma.len() as u64;
                bernoulli_indices(&mut rng, s * s.saturating_sub(1) / 2, p, |t| {
                    let (i, j) = triangle_pair(t, s);
                    edges.push((ma[i as usize], ma[j as usize]));
                });
            } else {
                let w = mc.len() as u64;
                bernoulli_indices(&mut rng, ma.len() as u64 * w, p, |t| {
                    edges.push((ma[(t / w) as usize], mc[(t % w) as usize]));
                });
            }
        }
    }
    Graph::from_edges(m.n, edges)
}

/// Power-law graph with independent edges of probability `θ²(ij)^{-γ}`, by
/// geometric skipping along each row against the decreasing probabilities.
pub fn sample_powerlaw_graph(m: &PowerLawModel, seed: u64) -> Result<Graph> {
    PowerLawModel::new(m.n, m.gamma, m.theta)?;
    let n = m.n;
    let mut edges = Vec::new();
    for i in 1..=n {
        let mut rng = substream(seed, Purpose::Edges, i as u64);
        let mut j = i + 1;
        if j > n {
            break;
        }
        let mut p = m.edge_probability(i, j).min(1.0);
        while j <= n && p > 0.0 {
            if p < 1.0 {
                j += geometric_skip(&mut rng, (1.0 - p).ln()).min(n as u64) as usize;
            }
            if j > n {
                break;
            }
            let q = m.edge_probability(i, j).min(1.0);
            if rng.random::<f64>() < q / p {
                edges.push((i - 1, j - 1));
            }
            p = q;
            j += 1;
        }
    }
    Graph::from_edges(n, edges)
}

/// Ring lattice joining each node to all nodes within distance `neighbors`,
/// with each lattice edge's far endpoint rewired with probability `p_rewire`
/// to a uniformly chosen node that keeps the graph simple.
pub fn sample_watts_strogatz(n: usize, neighbors: usize, p_rewire: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(Error::Domain(format!("rewiring probability {p_rewire} outside [0, 1]")));
    }
    if neighbors == 0 || 2 * neighbors >= n {
        return Err(Error::Domain(format!("need 0 < 2·neighbors < n, got neighbors={neighbors}, n={n}")));
    }
    let mut adj: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
    let mut lattice = Vec::new();
    for j in 1..=neighbors {
        for u in 0..n {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
            lattice.push((u, v));
        }
    }
    let mut rng = substream(seed, Purpose::Rewire, 0);
    for (u, v) in lattice {
        if rng.random::<f64>() >= p_rewire || adj[u].len() >= n - 1 {
            continue;
        }
        let w = loop {
            let w = rng.random_range(0..n);
            if w != u && !adj[u].contains(&w) {
                break w;
            }
        };
        adj[u].remove(&v);
        adj[v].remove(&u);
        adj[u].insert(w);
        adj[w].insert(u);
    }
    let edges = (0..n).flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)).collect::<Vec<_>>());
    Graph::from_edges(n, edges)
}

/// Preferential attachment tree: each arriving node joins one existing node
/// chosen with probability proportional to its degree.
pub fn sample_pref_attachment(n: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Domain("preferential attachment needs at least one node".into()));
    }
    let mut rng = substream(seed, Purpose::Attachment, 0);
    let mut ends: Vec<usize> = Vec::with_capacity(2 * n);
    let mut edges = Vec::with_capacity(n);
    for t in 1..n {
        let target = if t == 1 { 0 } else { ends[rng.random_range(0..ends.len())] };
        edges.push((t, target));
        ends.push(t);
        ends.push(target);
    }
    Graph::from_edges(n, edges)
}

/// Outcome counters of [`triadic_closure_rewire`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RewireStats {
    pub closures: usize,
    pub attempts: u64,
}

/// Triadic closure with a fixed edge count. Each attempt draws three distinct
/// nodes and marks one; if the marked node is joined to both others and they
/// are not joined to each other, that edge is added and a uniformly chosen
/// different edge is removed. Runs until `iterations` closures have been made
/// or `max_attempts` triplets have been drawn.
pub fn triadic_closure_rewire(g: &Graph, iterations: usize, max_attempts: u64, seed: u64) -> Result<(Graph, RewireStats)> {
    let n = g.n();
    if n < 3 {
        return Err(Error::Domain("triadic closure needs at least three nodes".into()));
    }
    let mut adj: Vec<std::collections::HashSet<u32>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut edges: Vec<(u32, u32)> = g.edges().to_vec();
    let mut slot: HashMap<(u32, u32), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut rng = substream(seed, Purpose::Rewire, 0);
    let mut stats = RewireStats { closures: 0, attempts: 0 };
    let key = |a: u32, b: u32| if a < b { (a, b) } else { (b, a) };
    while stats.closures < iterations && stats.attempts < max_attempts {
        stats.attempts += 1;
        let c = rng.random_range(0..n) as u32;
        let a = rng.random_range(0..n) as u32;
        let b = rng.random_range(0..n) as u32;
        if a == c || b == c || a == b {
            continue;
        }
        if !adj[c as usize].contains(&a) || !adj[c as usize].contains(&b) || adj[a as usize].contains(&b) {
            continue;
        }
        if edges.is_empty() {
            continue;
        }
        // remove a uniformly chosen existing edge, then add the closing edge
        let victim = rng.random_range(0..edges.len());
        let (x, y) = edges.swap_remove(victim);
        slot.remove(&(x, y));
        if victim < edges.len() {
            slot.insert(edges[victim], victim);
        }
        adj[x as usize].remove(&y);
        adj[y as usize].remove(&x);
        let e = key(a, b);
        slot.insert(e, edges.len());
        edges.push(e);
        adj[a as usize].insert(b);
        adj[b as usize].insert(a);
        stats.closures += 1;
    }
    let edges = edges.into_iter().map(|(u, v)| (u as usize, v as usize));
    Ok((Graph::from_edges(n, edges)?, stats))
}

/// `|E| / C(n, 2)`.
pub fn edge_density(g: &Graph) -> Result<Ratio<u128>> {
    let n = g.n() as u128;
    if n < 2 {
        return Err(Error::Domain("edge density needs at least two nodes".into()));
    }
    Ok(Ratio::new(g.edge_count() as u128, n * (n - 1) / 2))
}
