//! Expected walk counts and dominance predictions for kernel-based and
//! power-law random graphs, with Monte Carlo checks of those predictions.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::SmallGraph;
use crate::embed::ind_count;
use crate::error::{domain, Error, Result};
use crate::generators::{GraphModel, Kernel, KernelModel};
use crate::motif::closed_walk_count;
use crate::rng::child_seed;
use crate::shapes::{census, WalkShape};

/// Tolerance for the equality branches of the case tables.
pub const CASE_TOL: f64 = 1e-9;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= CASE_TOL * b.abs().max(1.0)
}

/// `(n)_v` as a float.
fn falling(n: usize, v: usize) -> f64 {
    if v > n {
        return 0.0;
    }
    (0..v).map(|i| (n - i) as f64).product()
}

// ---------------------------------------------------------------------------
// Kernel-based random graphs

/// `s(F, κ) = ∫ ∏_{ij ∈ e(F)} κ(x_i, x_j) dx`, exact for block kernels.
pub fn kernel_embedding_density(f: &WalkShape, kernel: &Kernel) -> f64 {
    match kernel {
        Kernel::Constant => 1.0,
        Kernel::RankOne { widths, levels } => f
            .degrees
            .iter()
            .map(|&d| widths.iter().zip(levels).map(|(w, a)| w * a.powi(d as i32)).sum::<f64>())
            .product(),
        Kernel::Block { widths, values } => {
            let mut colour = vec![0usize; f.v];
            block_sum(&f.graph, widths, values, &mut colour, 0)
        }
    }
}

fn block_sum(f: &SmallGraph, widths: &[f64], values: &[Vec<f64>], colour: &mut [usize], p: usize) -> f64 {
    if p == colour.len() {
        return 1.0;
    }
    let mut total = 0.0;
    for a in 0..widths.len() {
        let mut w = widths[a];
        for q in 0..p {
            if f.has_edge(p, q) {
                w *= values[a][colour[q]];
            }
        }
        if w == 0.0 {
            continue;
        }
        colour[p] = a;
        total += w * block_sum(f, widths, values, colour, p + 1);
    }
    total
}

/// `ν_k(F, κ) = ind_k(F, F) s(F, κ) / aut(F)`.
pub fn nu_k(f: &WalkShape, k: usize, kernel: &Kernel) -> Result<f64> {
    Ok(f.ind_self_at(k)? as f64 * kernel_embedding_density(f, kernel) / f.aut as f64)
}

/// Non-backtracking analogue of [`nu_k`], using tailless walks inducing all of `F`.
pub fn nu_k_nb(f: &WalkShape, k: usize, kernel: &Kernel) -> Result<f64> {
    let c = census(k)?;
    let own = c.index_of(&f.code).map_or(0, |i| c.ind_nb_self(i));
    Ok(own as f64 * kernel_embedding_density(f, kernel) / f.aut as f64)
}

/// `E ind_k(F, G) = (n)_v ρ^e ind_k(F, F) s(F, κ) / aut(F)` for `G ~ G(n, ρκ)`.
pub fn expected_ind_kernel(f: &WalkShape, k: usize, n: usize, rho: f64, kernel: &Kernel) -> Result<f64> {
    if !(rho > 0.0) || rho * kernel.sup_norm() > 1.0 {
        return domain(format!("rho = {rho} must lie in (0, 1/{}]", kernel.sup_norm()));
    }
    Ok(falling(n, f.v) * rho.powi(f.e as i32) * nu_k(f, k, kernel)?)
}

/// Phase boundary `k* = log n / log √(nρ)`.
pub fn k_star(n: usize, rho: f64) -> Result<f64> {
    let mu = n as f64 * rho;
    if !(mu > 1.0) {
        return Err(Error::Undefined(format!("k* needs n rho > 1, got {mu}")));
    }
    Ok((n as f64).ln() / (0.5 * mu.ln()))
}

/// `log Ψ_F = v(F) log n + e(F) log ρ` over `W_k`.
#[derive(Clone, Debug, Serialize)]
pub struct PsiOrder {
    pub n: usize,
    pub rho: f64,
    pub values: Vec<(WalkShape, f64)>,
}

impl PsiOrder {
    /// Shapes attaining the largest and the second largest `Ψ`, ties within tolerance.
    pub fn top_two(&self) -> (Vec<&WalkShape>, Vec<&WalkShape>) {
        let best = self.values.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let top: Vec<&WalkShape> = self.values.iter().filter(|x| near(x.1, best)).map(|x| &x.0).collect();
        let rest = self.values.iter().filter(|x| !near(x.1, best));
        let second = rest.clone().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let next = rest.filter(|x| near(x.1, second)).map(|x| &x.0).collect();
        (top, next)
    }
}

pub fn psi_order(k: usize, n: usize, rho: f64) -> Result<PsiOrder> {
    let c = census(k)?;
    let (ln_n, ln_rho) = ((n as f64).ln(), rho.ln());
    let values = c.shapes().iter().map(|s| (s.clone(), s.v as f64 * ln_n + s.e as f64 * ln_rho)).collect();
    Ok(PsiOrder { n, rho, values })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    Closed,
    NonBacktracking,
}

/// Predicted dominating and sub-dominating shapes with the leading correction
/// `ratio = 1 + prefactor · nu_ratio` to `E|W_k| / E(dominating walks)`.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub kind: WalkKind,
    pub k: usize,
    pub n: usize,
    pub rho: f64,
    pub k_star: f64,
    /// Row of the case table; 0 when the ratio is exactly one.
    pub case_id: u8,
    pub dominant: Vec<WalkShape>,
    pub subdominant: Vec<WalkShape>,
    pub prefactor: f64,
    pub nu_ratio: f64,
    pub first_order_ratio: f64,
}

impl DominanceReport {
    pub fn dominant_names(&self) -> Vec<&str> {
        self.dominant.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn subdominant_names(&self) -> Vec<&str> {
        self.subdominant.iter().map(|s| s.name.as_str()).collect()
    }
}

fn shapes_where(k: usize, keep: impl Fn(&WalkShape) -> bool) -> Result<Vec<WalkShape>> {
    Ok(census(k)?.shapes().iter().filter(|s| keep(s)).cloned().collect())
}

fn trees_on(k: usize, v: usize) -> Result<Vec<WalkShape>> {
    shapes_where(k, |s| s.is_tree() && s.v == v)
}

fn cycle_on(k: usize, v: usize) -> Result<Vec<WalkShape>> {
    shapes_where(k, |s| s.is_cycle() && s.v == v)
}

/// [`dominant_shapes_kernel_with`] for `κ ≡ 1`.
pub fn dominant_shapes_kernel(k: usize, n: usize, rho: f64) -> Result<DominanceReport> {
    dominant_shapes_kernel_with(k, n, rho, &Kernel::Constant)
}

/// Seven-case dominance table for closed `k`-walks in `G(n, ρκ)`.
pub fn dominant_shapes_kernel_with(k: usize, n: usize, rho: f64, kernel: &Kernel) -> Result<DominanceReport> {
    if k <= 3 {
        return domain(format!("the case table needs k > 3, got {k}"));
    }
    if n <= k {
        return domain(format!("need n > k, got n={n}, k={k}"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return domain(format!("rho = {rho} outside (0, 1)"));
    }
    let ks = k_star(n, rho)?;
    let mu = n as f64 * rho;
    let kf = k as f64;
    let cycle = cycle_on(k, k)?;
    let tadpole = if k >= 5 { shapes_where(k, |s| s.name == format!("C{}P2", k - 2))? } else { Vec::new() };
    let join = |a: &[WalkShape], b: &[WalkShape]| [a, b].concat();
    let (case_id, dominant, subdominant, prefactor) = if k % 2 == 1 || (kf > ks + 2.0 && !near(kf, ks + 2.0)) {
        (1, cycle, tadpole, 1.0 / mu)
    } else {
        let big = trees_on(k, k / 2 + 1)?;
        let small = trees_on(k, k / 2)?;
        if near(kf, ks + 2.0) {
            (2, cycle, join(&tadpole, &big), 1.0 / mu)
        } else if kf > ks && !near(kf, ks) {
            (3, cycle, big, mu.powf(-(kf - ks) / 2.0))
        } else if near(kf, ks) {
            (4, join(&cycle, &big), join(&tadpole, &small), 1.0 / mu)
        } else if near(kf, ks - 2.0) {
            (6, big, join(&cycle, &small), 1.0 / mu)
        } else if kf > ks - 2.0 {
            (5, big, cycle, mu.powf(-(ks - kf) / 2.0))
        } else {
            (7, big, small, 1.0 / mu)
        }
    };
    let sum_nu = |set: &[WalkShape]| set.iter().map(|s| nu_k(s, k, kernel)).sum::<Result<f64>>();
    let nu_ratio = sum_nu(&subdominant)? / sum_nu(&dominant)?;
    Ok(DominanceReport {
        kind: WalkKind::Closed,
        k,
        n,
        rho,
        k_star: ks,
        case_id,
        dominant,
        subdominant,
        prefactor,
        nu_ratio,
        first_order_ratio: 1.0 + prefactor * nu_ratio,
    })
}

/// Largest divisor of `k` in `3..=⌊k/2⌋`.
pub fn h_k(k: usize) -> Option<usize> {
    (3..=k / 2).rev().find(|d| k % d == 0)
}

/// [`dominant_shapes_nb_with`] for `κ ≡ 1`.
pub fn dominant_shapes_nb(k: usize, n: usize, rho: f64) -> Result<DominanceReport> {
    dominant_shapes_nb_with(k, n, rho, &Kernel::Constant)
}

/// Dominance of non-backtracking tailless closed `k`-walks: always `{C_k}`,
/// with the sub-dominating set decided by `k − h_k` against `k*/2`.
pub fn dominant_shapes_nb_with(k: usize, n: usize, rho: f64, kernel: &Kernel) -> Result<DominanceReport> {
    if k < 3 {
        return domain(format!("non-backtracking walks need k >= 3, got {k}"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return domain(format!("rho = {rho} outside (0, 1)"));
    }
    let ks = k_star(n, rho)?;
    let mu = n as f64 * rho;
    let dominant = cycle_on(k, k)?;
    let mut report = DominanceReport {
        kind: WalkKind::NonBacktracking,
        k,
        n,
        rho,
        k_star: ks,
        case_id: 0,
        dominant,
        subdominant: Vec::new(),
        prefactor: 0.0,
        nu_ratio: 0.0,
        first_order_ratio: 1.0,
    };
    if k <= 5 {
        return Ok(report);
    }
    let c = census(k)?;
    let lemniscates: Vec<WalkShape> = c
        .shapes()
        .iter()
        .enumerate()
        .filter(|&(i, s)| c.ind_nb_self(i) > 0 && s.v + 1 == k && s.e == k)
        .map(|(_, s)| s.clone())
        .collect();
    let h = h_k(k);
    let gap = h.map_or(f64::INFINITY, |h| (k - h) as f64);
    let short = match h {
        Some(h) => cycle_on(k, h)?,
        None => Vec::new(),
    };
    let (case_id, sub, prefactor) = if gap.is_finite() && near(gap, ks / 2.0) {
        (2, [short, lemniscates].concat(), 1.0 / n as f64)
    } else if gap < ks / 2.0 {
        (1, short, mu.powf(-gap))
    } else {
        (3, lemniscates, 1.0 / n as f64)
    };
    let sum_nu = |set: &[WalkShape]| set.iter().map(|s| nu_k_nb(s, k, kernel)).sum::<Result<f64>>();
    report.nu_ratio = sum_nu(&sub)? / sum_nu(&report.dominant)?;
    report.case_id = case_id;
    report.subdominant = sub;
    report.prefactor = prefactor;
    report.first_order_ratio = 1.0 + prefactor * report.nu_ratio;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Log-count decomposition

/// `log E ind_k(F, G) = constant + node_term + density_term`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogCopies {
    /// Shape constant plus the `log((n)_v / n^v)` finite-size term.
    pub constant: f64,
    /// `v(F) log n`.
    pub node_term: f64,
    /// Log-probability of a local copy: `e log ρ`, or
    /// `−Σ min(1, d_t γ) log n − (Σ d_t) |log θ|` under a power law.
    pub density_term: f64,
}

impl LogCopies {
    pub fn total(&self) -> f64 {
        self.constant + self.node_term + self.density_term
    }
}

/// Node/edge decomposition of the expected number of closed `k`-walks inducing `F`.
/// Under a power law the `C_γ` and `log log n` pieces stay in the unreturned constant.
pub fn log_expected_copies(f: &WalkShape, k: usize, model: &GraphModel) -> Result<LogCopies> {
    let own = f.ind_self_at(k)?;
    if own == 0 {
        return domain(format!("{} is not induced by a closed {k}-walk", f.name));
    }
    let n = model.n();
    let ln_n = (n as f64).ln();
    let finite = (falling(n, f.v) / (n as f64).powi(f.v as i32)).ln();
    let node_term = f.v as f64 * ln_n;
    match model {
        GraphModel::Kernel(m) => Ok(LogCopies {
            constant: nu_k(f, k, &m.kernel)?.ln() + finite,
            node_term,
            density_term: f.e as f64 * m.rho.ln(),
        }),
        GraphModel::PowerLaw(m) => Ok(LogCopies {
            constant: (own as f64 / f.aut as f64).ln() + finite,
            node_term,
            density_term: log_walk_density_powerlaw(f, n, m.gamma, m.theta),
        }),
    }
}

// ---------------------------------------------------------------------------
// Power-law sums

/// Order of a multiplicative error term: `n^{-a}` or `1 / log n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "order", rename_all = "snake_case")]
pub enum ErrorTerm {
    NegPower { exponent: f64 },
    InverseLog,
}

impl fmt::Display for ErrorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorTerm::NegPower { exponent } => write!(f, "O(n^-{exponent})"),
            ErrorTerm::InverseLog => write!(f, "O(1/log n)"),
        }
    }
}

/// Leading-order value with the orders of its relative error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Asymptotic {
    pub value: f64,
    pub error: Vec<ErrorTerm>,
}

/// Riemann zeta function for real `s > 1`, by Euler-Maclaurin summation.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return domain(format!("zeta needs s > 1, got {s}"));
    }
    const N: usize = 64;
    // B_{2j} / (2j)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let nf = N as f64;
    let head: f64 = (1..N).rev().map(|m| (m as f64).powf(-s)).sum();
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // rising factorial s(s+1)…(s+2j−2) times N^{−s−2j+1}
    let mut rise = s;
    let mut pow = nf.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        if j > 0 {
            rise *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
            pow /= nf * nf;
        }
        tail += b * rise * pow;
    }
    Ok(head + tail)
}

fn check_degrees(d: &[usize], gamma: f64) -> Result<Vec<usize>> {
    if d.is_empty() || d.contains(&0) {
        return domain("degree tuple must be non-empty and strictly positive");
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("gamma = {gamma} must be positive"));
    }
    let mut d = d.to_vec();
    d.sort_unstable();
    Ok(d)
}

/// `C_γ(d_1, …, d_m)`, the distinct-index sum `Σ ∏ r_i^{-d_i γ}` over all of `ℕ`.
pub fn c_gamma(d: &[usize], gamma: f64) -> Result<f64> {
    let d = check_degrees(d, gamma)?;
    if let Some(&x) = d.iter().find(|&&x| x as f64 * gamma <= 1.0 || near(x as f64 * gamma, 1.0)) {
        return domain(format!("C_gamma needs every d gamma > 1, got {}", x as f64 * gamma));
    }
    let mut zetas = HashMap::new();
    distinct_sum(&d, &mut |s| *zetas.entry(s).or_insert_with(|| zeta(s as f64 * gamma).unwrap()))
}

/// Distinct-index sum from single-index sums `p(s) = Σ_r r^{-sγ}` by the recursion
/// `S(d, d') = p(d') S(d) − Σ_j S(d_1, …, d_j + d', …)`.
fn distinct_sum(d: &[usize], p: &mut impl FnMut(usize) -> f64) -> Result<f64> {
    fn rec(d: &mut Vec<usize>, p: &mut impl FnMut(usize) -> f64, memo: &mut HashMap<Vec<usize>, f64>) -> f64 {
        let mut key = d.clone();
        key.sort_unstable();
        if let Some(&x) = memo.get(&key) {
            return x;
        }
        let last = d.pop().unwrap();
        let value = if d.is_empty() {
            p(last)
        } else {
            let mut total = p(last) * rec(d, p, memo);
            for j in 0..d.len() {
                d[j] += last;
                total -= rec(d, p, memo);
                d[j] -= last;
            }
            total
        };
        d.push(last);
        memo.insert(key, value);
        value
    }
    Ok(rec(&mut d.to_vec(), p, &mut HashMap::new()))
}

/// `Σ_{r=1}^n r^{-a}`, smallest terms first.
fn power_sum(n: usize, a: f64) -> f64 {
    (1..=n).rev().map(|r| (r as f64).powf(-a)).sum()
}

/// Exact `S_γ(d) = Σ_{distinct r_1, …, r_v ∈ [n]} ∏ r_i^{-d_i γ}`.
pub fn s_gamma_exact(d: &[usize], n: usize, gamma: f64) -> Result<f64> {
    let d = check_degrees(d, gamma)?;
    let mut sums = HashMap::new();
    distinct_sum(&d, &mut |s| *sums.entry(s).or_insert_with(|| power_sum(n, s as f64 * gamma)))
}

/// Leading-order `S_γ(d)` with its error orders, splitting degrees by `d_t γ` against one.
pub fn s_gamma(d: &[usize], n: usize, gamma: f64) -> Result<Asymptotic> {
    let d = check_degrees(d, gamma)?;
    let v = d.len();
    let x: Vec<f64> = d.iter().map(|&t| t as f64 * gamma).collect();
    let q = x.iter().filter(|&&a| a < 1.0 && !near(a, 1.0)).count();
    let h = q + x[q..].iter().filter(|&&a| near(a, 1.0)).count();
    let ln_n = (n as f64).ln();
    let mut error = Vec::new();
    if q > 0 {
        error.push(ErrorTerm::NegPower { exponent: 1.0 - x[q - 1] });
    }
    if h < v {
        error.push(ErrorTerm::NegPower { exponent: x[h] - 1.0 });
    }
    if v == 1 && h == 1 && q == 0 {
        return Ok(Asymptotic { value: ln_n + EULER_GAMMA, error: vec![ErrorTerm::NegPower { exponent: 1.0 }] });
    }
    if h > q {
        error.push(ErrorTerm::InverseLog);
    }
    let tail = if h < v { c_gamma(&d[h..], gamma)? } else { 1.0 };
    let denom: f64 = x[..q].iter().map(|a| 1.0 - a).product();
    let expo = q as f64 - x[..q].iter().sum::<f64>();
    let value = tail / denom * (n as f64).powf(expo) * ln_n.powi((h - q) as i32);
    Ok(Asymptotic { value, error })
}

fn check_powerlaw(f: &WalkShape, gamma: f64, theta: f64) -> Result<()> {
    if f.degrees.contains(&0) {
        return domain(format!("{} has an isolated node", f.name));
    }
    if !(gamma > 0.0) || !(theta > 0.0 && theta <= 1.0) {
        return domain(format!("need gamma > 0 and theta in (0, 1], got {gamma}, {theta}"));
    }
    Ok(())
}

/// Leading-order expected number of unlabelled copies of `F` in the power-law model.
pub fn expected_x_powerlaw(f: &WalkShape, n: usize, gamma: f64, theta: f64) -> Result<Asymptotic> {
    check_powerlaw(f, gamma, theta)?;
    let s = s_gamma(&f.degrees, n, gamma)?;
    let scale = theta.powi(f.degrees.iter().sum::<usize>() as i32) / f.aut as f64;
    Ok(Asymptotic { value: scale * s.value, error: s.error })
}

/// Exact expected number of unlabelled copies of `F` in the power-law model.
pub fn expected_x_powerlaw_exact(f: &WalkShape, n: usize, gamma: f64, theta: f64) -> Result<f64> {
    check_powerlaw(f, gamma, theta)?;
    let scale = theta.powi(f.degrees.iter().sum::<usize>() as i32) / f.aut as f64;
    Ok(scale * s_gamma_exact(&f.degrees, n, gamma)?)
}

/// Leading term of `log E φ(w, G_n)`: `−[Σ min(1, d_i γ) log n + (Σ d_i) |log θ|]`.
pub fn log_walk_density_powerlaw(f: &WalkShape, n: usize, gamma: f64, theta: f64) -> f64 {
    let local: f64 = f.degrees.iter().map(|&d| (d as f64 * gamma).min(1.0)).sum();
    let total: usize = f.degrees.iter().sum();
    -(local * (n as f64).ln() + total as f64 * theta.ln().abs())
}

/// `β_n = |log θ| / log n`.
pub fn beta_n(theta: f64, n: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return domain(format!("theta = {theta} outside (0, 1]"));
    }
    if !(n > 1.0) {
        return domain(format!("beta_n needs n > 1, got {n}"));
    }
    Ok(theta.ln().abs() / n.ln())
}

// ---------------------------------------------------------------------------
// Power-law regimes

/// A family of shapes named without reference to a census.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ShapeFamily {
    Cycle { v: usize },
    /// All trees on `v` nodes.
    Trees { v: usize },
    Star { leaves: usize },
    /// A triangle with `leaves` pendant nodes on one of its nodes.
    TriangleStar { leaves: usize },
}

impl ShapeFamily {
    pub fn label(&self) -> String {
        match self {
            ShapeFamily::Cycle { v } => format!("C_{v}"),
            ShapeFamily::Trees { v } => format!("T_{v}"),
            ShapeFamily::Star { leaves } => format!("K_1,{leaves}"),
            ShapeFamily::TriangleStar { leaves } => format!("C_3K_1,{leaves}"),
        }
    }

    /// Members as shapes of `W_k`.
    pub fn shapes(&self, k: usize) -> Result<Vec<WalkShape>> {
        match *self {
            ShapeFamily::Cycle { v } => cycle_on(k, v),
            ShapeFamily::Trees { v } => trees_on(k, v),
            ShapeFamily::Star { leaves } => Ok(vec![WalkShape::star(leaves)?]),
            ShapeFamily::TriangleStar { leaves } => {
                let mut e = vec![(0, 1), (1, 2), (0, 2)];
                e.extend((0..leaves).map(|i| (0, 3 + i)));
                Ok(vec![WalkShape::from_small(&SmallGraph::from_edges(3 + leaves, &e)?)])
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// `β + γ < (1 − γ)/2`: cycles against all trees.
    Homogeneous,
    /// `β + γ = (1 − γ)/2`.
    Boundary,
    /// `(1 − γ)/2 < β + γ < 1/2`: hubs dominate.
    HubDominated,
    /// `β + γ ≥ 1/2`: degrees do not grow.
    Unclassified,
}

/// Predicted asymptotically dominating shapes for the power-law model.
#[derive(Clone, Debug, Serialize)]
pub struct PowerLawRegime {
    pub gamma: f64,
    pub beta: f64,
    pub k: usize,
    pub regime: RegimeKind,
    pub predicted: Vec<ShapeFamily>,
    pub k_star: Option<f64>,
    pub k_dagger: f64,
    pub k_circ: Option<f64>,
    pub k_plus: Option<f64>,
    /// Non-backtracking tailless walks are dominated by the `k`-cycle.
    pub nb_cycle_dominated: bool,
}

pub fn regime_powerlaw(k: usize, gamma: f64, beta: f64) -> Result<PowerLawRegime> {
    if k < 2 {
        return domain(format!("walk length {k} < 2"));
    }
    if !(gamma > 0.0 && gamma < 1.0) || !(beta >= 0.0) || !beta.is_finite() {
        return domain(format!("need gamma in (0, 1) and beta >= 0, got {gamma}, {beta}"));
    }
    let mut r = PowerLawRegime {
        gamma,
        beta,
        k,
        regime: RegimeKind::Unclassified,
        predicted: Vec::new(),
        k_star: None,
        k_dagger: 2.0 / gamma,
        k_circ: None,
        k_plus: None,
        nb_cycle_dominated: false,
    };
    let s = beta + gamma;
    if s >= 0.5 || near(s, 0.5) {
        return Ok(r);
    }
    r.nb_cycle_dominated = true;
    let kf = k as f64;
    let odd = k % 2 == 1;
    let cycle = ShapeFamily::Cycle { v: k };
    let trees = ShapeFamily::Trees { v: k / 2 + 1 };
    let star = ShapeFamily::Star { leaves: k / 2 };
    let boundary = (1.0 - gamma) / 2.0;
    if near(s, boundary) {
        r.regime = RegimeKind::Boundary;
        r.k_star = Some(2.0 / gamma);
        r.predicted = if odd {
            vec![cycle]
        } else if kf < 2.0 / gamma && !near(kf, 2.0 / gamma) {
            vec![trees]
        } else {
            vec![cycle, star]
        };
    } else if s < boundary {
        let ks = 1.0 / (0.5 - s);
        r.regime = RegimeKind::Homogeneous;
        r.k_star = Some(ks);
        r.predicted = if odd || (kf > ks && !near(kf, ks)) {
            vec![cycle]
        } else if near(kf, ks) {
            vec![cycle, trees]
        } else {
            vec![trees]
        };
    } else {
        let kd = 2.0 / gamma;
        let kc = 2.0 * (0.5 - gamma) / (s - boundary) + 3.0;
        let kp = kc.max(kd + 1.0);
        r.regime = RegimeKind::HubDominated;
        r.k_circ = Some(kc);
        r.k_plus = Some(kp);
        let tri = ShapeFamily::TriangleStar { leaves: k.saturating_sub(3) / 2 };
        r.predicted = if odd {
            if near(kf, kp) {
                if kp > kd + 1.0 && !near(kp, kd + 1.0) {
                    vec![cycle, tri]
                } else {
                    vec![cycle]
                }
            } else if kf < kp {
                vec![cycle]
            } else {
                vec![tri]
            }
        } else if kf < kd && !near(kf, kd) {
            vec![trees]
        } else {
            vec![star]
        };
    }
    Ok(r)
}

/// Growth class `n^{-n_exponent} (log n)^{log_exponent}` of a ratio of expected counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum RateClass {
    Theta { n_exponent: f64, log_exponent: i64 },
    BigO { n_exponent: f64, log_exponent: i64 },
}

impl fmt::Display for RateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (tag, a, b) = match *self {
            RateClass::Theta { n_exponent, log_exponent } => ("Θ", n_exponent, log_exponent),
            RateClass::BigO { n_exponent, log_exponent } => ("O", n_exponent, log_exponent),
        };
        let mut parts = Vec::new();
        if a != 0.0 {
            parts.push(format!("n^-{a}"));
        }
        if b != 0 {
            parts.push(format!("(log n)^{b}"));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{tag}({})", parts.join(" "))
    }
}

fn count_degree(f: &WalkShape, gamma: f64) -> i64 {
    f.degrees.iter().filter(|&&d| near(d as f64 * gamma, 1.0)).count() as i64
}

/// Rate of `E X_T / E X_{K_{1,e}}` for a tree `T` with `e ≥ 3` edges other than the star.
pub fn star_dominance_rate(t: &WalkShape, gamma: f64) -> Result<RateClass> {
    if !t.is_tree() || t.e < 3 || t.star_leaves().is_some() {
        return domain(format!("{} is not a non-star tree with at least three edges", t.name));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return domain(format!("gamma = {gamma} outside (0, 1]"));
    }
    let e = t.e as f64;
    let ds = count_degree(t, gamma);
    Ok(if near(gamma, 1.0) {
        RateClass::BigO { n_exponent: 0.0, log_exponent: -1 }
    } else if near(gamma, 1.0 / e) {
        RateClass::Theta { n_exponent: 0.0, log_exponent: -1 }
    } else if gamma < 1.0 / e {
        RateClass::Theta { n_exponent: 0.0, log_exponent: 0 }
    } else if gamma < 0.5 && !near(gamma, 0.5) {
        RateClass::BigO { n_exponent: gamma.min(e * gamma - 1.0), log_exponent: ds }
    } else {
        RateClass::BigO { n_exponent: 1.0, log_exponent: ds }
    })
}

/// Length of the unique cycle of a connected unicyclic shape.
fn unicyclic_girth(u: &WalkShape) -> Option<usize> {
    if u.e != u.v || !u.graph.is_connected() {
        return None;
    }
    let mut deg: Vec<usize> = (0..u.v).map(|a| u.graph.degree(a)).collect();
    let mut alive = vec![true; u.v];
    let mut stack: Vec<usize> = (0..u.v).filter(|&a| deg[a] == 1).collect();
    while let Some(a) = stack.pop() {
        alive[a] = false;
        for b in 0..u.v {
            if alive[b] && u.graph.has_edge(a, b) {
                deg[b] -= 1;
                if deg[b] == 1 {
                    stack.push(b);
                }
            }
        }
    }
    Some(alive.iter().filter(|&&x| x).count())
}

/// Rate of `E X_U / E X_{C_3K_{1,e−3}}` for a unicyclic `U` with `e ≥ 4` edges; for
/// `γ > 1/2` the comparison is against the triangles with `e − 3` pendant nodes.
pub fn unicyclic_dominance_rate(u: &WalkShape, gamma: f64) -> Result<RateClass> {
    let girth = unicyclic_girth(u).ok_or_else(|| Error::Domain(format!("{} is not connected unicyclic", u.name)))?;
    let e = u.e;
    let reference = ShapeFamily::TriangleStar { leaves: e.saturating_sub(3) }.shapes(3)?;
    if e < 4 || reference[0].code == u.code {
        return domain(format!("{} must have at least four edges and differ from C_3K_1,{}", u.name, e.saturating_sub(3)));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return domain(format!("gamma = {gamma} outside (0, 1]"));
    }
    let ef = e as f64;
    let ds = count_degree(u, gamma);
    let pendant_triangle = girth == 3 && u.degrees.iter().filter(|&&d| d == 1).count() == e - 3;
    Ok(if gamma > 0.5 && !near(gamma, 0.5) {
        if pendant_triangle {
            RateClass::Theta { n_exponent: 0.0, log_exponent: 0 }
        } else if near(gamma, 1.0) {
            RateClass::BigO { n_exponent: 0.0, log_exponent: -1 }
        } else {
            RateClass::BigO { n_exponent: 1.0, log_exponent: 0 }
        }
    } else if near(gamma, 0.5) {
        RateClass::BigO { n_exponent: 0.0, log_exponent: -1 }
    } else if near(gamma, 1.0 / (ef - 1.0)) {
        RateClass::Theta { n_exponent: 0.0, log_exponent: -1 }
    } else if gamma < 1.0 / (ef - 1.0) {
        RateClass::Theta { n_exponent: 0.0, log_exponent: 0 }
    } else {
        let m = gamma.min(1.0 - 2.0 * gamma).min((ef - 1.0) * gamma - 1.0);
        RateClass::BigO { n_exponent: m, log_exponent: ds }
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Ratio estimate of `Σ_r Σ_{F ∈ set} ind_k(F, G_r) / Σ_r |W_k(G_r)|` with a 95% interval.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceEstimate {
    pub fraction: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicates: usize,
}

const Z95: f64 = 1.959_963_984_540_054;

/// Ratio-of-sums estimate with a linearised standard error.
fn ratio_estimate(pairs: &[(u128, u128)]) -> Result<DominanceEstimate> {
    let num: f64 = pairs.iter().map(|p| p.0 as f64).sum();
    let den: f64 = pairs.iter().map(|p| p.1 as f64).sum();
    if den == 0.0 {
        return Err(Error::Undefined("no closed walks in any replicate".into()));
    }
    let f = num / den;
    let r = pairs.len() as f64;
    let se = if pairs.len() < 2 {
        0.0
    } else {
        let ss: f64 = pairs.iter().map(|p| (p.0 as f64 - f * p.1 as f64).powi(2)).sum();
        (r / (r - 1.0) * ss).sqrt() / den
    };
    Ok(DominanceEstimate { fraction: f, std_error: se, ci_low: f - Z95 * se, ci_high: f + Z95 * se, replicates: pairs.len() })
}

/// Monte Carlo share of closed `k`-walks inducing a shape in `set`.
pub fn empirical_dominance_fraction(
    model: &GraphModel,
    k: usize,
    set: &[WalkShape],
    replicates: usize,
    seed: u64,
) -> Result<DominanceEstimate> {
    if replicates == 0 {
        return domain("need at least one replicate");
    }
    let mut shapes: Vec<&WalkShape> = Vec::new();
    for s in set {
        if !shapes.iter().any(|t| t.code == s.code) {
            shapes.push(s);
        }
    }
    let pairs = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let g = model.sample(child_seed(seed, r as u64))?;
            let mut num: u128 = 0;
            for s in &shapes {
                num += ind_count(s, &g, k)?;
            }
            Ok((num, closed_walk_count(&g, k)?))
        })
        .collect::<Result<Vec<_>>>()?;
    ratio_estimate(&pairs)
}

/// Settings of the convergence-rate experiment on `G(2^j, 2 (2^j)^{α−1} κ)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateConfig {
    pub k: usize,
    pub alphas: Vec<f64>,
    pub log2_sizes: Vec<u32>,
    pub kernel: Kernel,
    /// Replicates at size `2^j` are `max(2, 2^{budget_log2 − j})`.
    pub budget_log2: u32,
    pub seed: u64,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig {
            k: 4,
            alphas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            log2_sizes: (7..=12).collect(),
            kernel: Kernel::planted(3, 1.5, 0.75).expect("valid kernel"),
            budget_log2: 16,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RatePoint {
    pub log2_n: u32,
    pub rho: f64,
    pub k_star: f64,
    pub replicates: usize,
    /// `E|W_k| / E(dominating walks) − 1`.
    pub excess: f64,
    pub dropped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateRow {
    pub alpha: f64,
    /// `β(α; k) = α min(1, |k − 2/α| / 2)`, the limit of `k*` being `2/α`.
    pub predicted: f64,
    /// Minus the least-squares slope of `log excess` on `log n`.
    pub estimated: Option<f64>,
    pub points: Vec<RatePoint>,
    /// Some point was dropped or fewer than two remained.
    pub flagged: bool,
}

/// Predicted convergence rate `β(α; k)`.
pub fn predicted_rate(alpha: f64, k: usize) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    alpha * (1.0f64).min((k as f64 - 2.0 / alpha).abs() / 2.0)
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Simulated convergence rates of the dominance ratio against `β(α; k)`.
/// `ρ` is capped at `0.999 / ‖κ‖_∞` so that edge probabilities stay below one.
pub fn rate_experiment(cfg: &RateConfig) -> Result<Vec<RateRow>> {
    let c = census(cfg.k)?;
    let cap = 0.999 / cfg.kernel.sup_norm();
    let mut rows = Vec::with_capacity(cfg.alphas.len());
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        if !(0.0..=1.0).contains(&alpha) {
            return domain(format!("alpha = {alpha} outside [0, 1]"));
        }
        let mut points = Vec::new();
        for &j in &cfg.log2_sizes {
            let n = 1usize << j;
            let rho = (2.0 * (n as f64).powf(alpha - 1.0)).min(cap);
            let report = dominant_shapes_kernel_with(cfg.k, n, rho, &cfg.kernel)?;
            let dominant: Vec<bool> =
                c.shapes().iter().map(|s| report.dominant.iter().any(|d| d.code == s.code)).collect();
            let reps = 1usize << cfg.budget_log2.saturating_sub(j).max(1);
            let model = GraphModel::Kernel(KernelModel::new(n, rho, cfg.kernel.clone())?);
            let size_seed = child_seed(child_seed(cfg.seed, ai as u64), j as u64);
            let sums = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let g = model.sample(child_seed(size_seed, r as u64))?;
                    let (mut dom, mut rest) = (0u128, 0u128);
                    for (i, s) in c.shapes().iter().enumerate() {
                        let x = ind_count(s, &g, cfg.k)?;
                        if dominant[i] {
                            dom += x;
                        } else {
                            rest += x;
                        }
                    }
                    Ok((rest, dom))
                })
                .collect::<Result<Vec<_>>>()?;
            let rest: f64 = sums.iter().map(|p| p.0 as f64).sum();
            let dom: f64 = sums.iter().map(|p| p.1 as f64).sum();
            let excess = if dom > 0.0 { rest / dom } else { f64::NAN };
            points.push(RatePoint {
                log2_n: j,
                rho,
                k_star: report.k_star,
                replicates: reps,
                excess,
                dropped: !(excess > 0.0),
            });
        }
        let kept: Vec<&RatePoint> = points.iter().filter(|p| !p.dropped).collect();
        let x: Vec<f64> = kept.iter().map(|p| ((1u64 << p.log2_n) as f64).ln()).collect();
        let y: Vec<f64> = kept.iter().map(|p| p.excess.ln()).collect();
        let estimated = ols_slope(&x, &y).map(|s| -s);
        rows.push(RateRow {
            alpha,
            predicted: predicted_rate(alpha, cfg.k),
            estimated,
            flagged: estimated.is_none() || kept.len() < points.len(),
            points,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::census;
    use approx::assert_relative_eq;

    fn named(k: usize, name: &str) -> WalkShape {
        census(k).unwrap().find(name).unwrap_or_else(|| panic!("{name} not in W_{k}")).clone()
    }

    #[test]
    fn k_star_examples() {
        assert_relative_eq!(k_star(10_000, 1e-2).unwrap(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(k_star(4096, 2f64.powi(-8)).unwrap(), 6.0, epsilon = 1e-12);
        assert!(matches!(k_star(100, 0.01), Err(Error::Undefined(_))));
        let mut last = 0.0;
        for e in [4, 8, 12, 16] {
            let n = 10f64.powi(e);
            let ks = k_star(n as usize, 2.0 / n.sqrt()).unwrap();
            assert!(ks < 4.0 && ks > last);
            last = ks;
        }
        assert!(last > 3.8);
    }

    #[test]
    fn nu_examples() {
        for k in 3..=9 {
            assert_relative_eq!(nu_k(&WalkShape::cycle(k).unwrap(), k, &Kernel::Constant).unwrap(), 1.0);
        }
        assert_relative_eq!(nu_k(&WalkShape::path(2).unwrap(), 4, &Kernel::Constant).unwrap(), 1.0);
        let two_edges = WalkShape::from_small(&SmallGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap());
        assert_eq!(nu_k(&two_edges, 4, &Kernel::Constant).unwrap(), 0.0);
    }

    #[test]
    fn embedding_density_forms() {
        let c3 = WalkShape::cycle(3).unwrap();
        assert_eq!(kernel_embedding_density(&c3, &Kernel::Constant), 1.0);
        let k2 = WalkShape::path(2).unwrap();
        let b = Kernel::block(vec![0.3, 0.7], vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        assert_relative_eq!(kernel_embedding_density(&k2, &b), 1.0, epsilon = 1e-12);
        // rank one with ∫a = 1: s(C_k) = (∫a²)^k
        let r = Kernel::rank_one(vec![0.5, 0.5], vec![0.5, 1.5]).unwrap();
        let a2: f64 = 0.5 * 0.25 + 0.5 * 2.25;
        for k in 3..=6 {
            let ck = WalkShape::cycle(k).unwrap();
            assert_relative_eq!(kernel_embedding_density(&ck, &r), a2.powi(k as i32), epsilon = 1e-12);
        }
    }

    #[test]
    fn block_density_matches_grid_integration() {
        let b = Kernel::block(vec![0.25, 0.75], vec![vec![3.0, 1.0], vec![1.0, 0.5]]).unwrap();
        let c3 = WalkShape::cycle(3).unwrap();
        let m = 100;
        let mut grid = 0.0;
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    let x = |t: usize| (t as f64 + 0.5) / m as f64;
                    grid += b.eval(x(i), x(j)) * b.eval(x(j), x(l)) * b.eval(x(l), x(i));
                }
            }
        }
        grid /= (m * m * m) as f64;
        assert_relative_eq!(kernel_embedding_density(&c3, &b), grid, max_relative = 1e-9);
    }

    #[test]
    fn expected_ind_simple_cases() {
        let k2 = WalkShape::path(2).unwrap();
        let e = expected_ind_kernel(&k2, 2, 50, 0.1, &Kernel::Constant).unwrap();
        assert_relative_eq!(e, 50.0 * 49.0 * 0.1, max_relative = 1e-12);
        let c3 = WalkShape::cycle(3).unwrap();
        let e = expected_ind_kernel(&c3, 3, 200, 0.05, &Kernel::Constant).unwrap();
        assert_relative_eq!(e, 200.0 * 199.0 * 198.0 * 0.05f64.powi(3), max_relative = 1e-12);
        assert!(expected_ind_kernel(&c3, 3, 200, 1.5, &Kernel::Constant).is_err());
    }

    #[test]
    fn kernel_table_examples() {
        for (n, rho) in [(1000, 0.05), (100_000, 1e-3), (4096, 2f64.powi(-8))] {
            let r = dominant_shapes_kernel(5, n, rho).unwrap();
            assert_eq!(r.dominant_names(), ["C5"]);
            assert_eq!(r.subdominant_names(), ["C3P2"]);
            assert_eq!(r.case_id, 1);
        }
        // k* = 8
        let n = 1usize << 16;
        let r = dominant_shapes_kernel(4, n, 2f64.powi(-12)).unwrap();
        assert_relative_eq!(r.k_star, 8.0, epsilon = 1e-12);
        assert_eq!(r.dominant_names(), ["P3"]);
        assert_eq!(r.case_id, 7);
        assert_eq!(r.subdominant_names(), ["P2"]);
        // k* = 6
        let r = dominant_shapes_kernel(8, 4096, 2f64.powi(-8)).unwrap();
        assert_eq!(r.dominant_names(), ["C8"]);
        assert_eq!(r.case_id, 2);
        let r = dominant_shapes_kernel(6, 4096, 2f64.powi(-8)).unwrap();
        assert_eq!(r.case_id, 4);
        assert_eq!(r.dominant_names().len(), 1 + 2);
        let r = dominant_shapes_kernel(4, 4096, 2f64.powi(-8)).unwrap();
        assert_eq!(r.case_id, 6);
        assert_eq!(r.subdominant_names(), ["C4", "P2"]);
        assert!(dominant_shapes_kernel(3, 100, 0.5).is_err());
    }

    #[test]
    fn kernel_first_order_ratio() {
        // k = 5, κ ≡ 1: ν(C_3P_2)/ν(C_5) = (10/2)/(10/10) = 5
        let r = dominant_shapes_kernel(5, 1000, 0.05).unwrap();
        assert_relative_eq!(r.nu_ratio, 5.0, epsilon = 1e-12);
        assert_relative_eq!(r.first_order_ratio, 1.0 + 5.0 / 50.0, epsilon = 1e-12);
    }

    #[test]
    fn psi_argmax_agrees_with_table() {
        let mut seen = std::collections::BTreeSet::new();
        for k in 4..=9 {
            for &n in &[1usize << 12, 1 << 16, 1 << 20, 1 << 24] {
                let ln_n = (n as f64).ln();
                // k* from 2.2 to 30 plus every integer boundary
                let mut targets: Vec<f64> = (0..60).map(|i| 2.2 + i as f64 * 0.47).collect();
                targets.extend((3..=13).map(|i| i as f64));
                for ks in targets {
                    let rho = (2.0 * ln_n / ks).exp() / n as f64;
                    if !(rho < 1.0) || n as f64 * rho <= 1.0 {
                        continue;
                    }
                    let report = dominant_shapes_kernel(k, n, rho).unwrap();
                    let psi = psi_order(k, n, rho).unwrap();
                    let (top, next) = psi.top_two();
                    let codes = |v: &[&WalkShape]| v.iter().map(|s| s.code).collect::<std::collections::BTreeSet<_>>();
                    let own = |v: &[WalkShape]| v.iter().map(|s| s.code).collect::<std::collections::BTreeSet<_>>();
                    assert_eq!(codes(&top), own(&report.dominant), "k={k} n={n} k*={ks}");
                    assert_eq!(codes(&next), own(&report.subdominant), "k={k} n={n} k*={ks}");
                    seen.insert(report.case_id);
                }
            }
        }
        assert_eq!(seen.len(), 7, "cases covered: {seen:?}");
    }

    #[test]
    fn h_k_values() {
        assert_eq!(h_k(6), Some(3));
        assert_eq!(h_k(12), Some(6));
        assert_eq!(h_k(7), None);
        assert_eq!(h_k(4), None);
        assert_eq!(h_k(3), None);
        assert_eq!(h_k(9), Some(3));
        assert_eq!(h_k(8), Some(4));
    }

    #[test]
    fn nb_table_examples() {
        let r = dominant_shapes_nb(5, 1000, 0.05).unwrap();
        assert_eq!(r.dominant_names(), ["C5"]);
        assert!(r.subdominant.is_empty());
        assert_eq!(r.first_order_ratio, 1.0);
        // k* = 10 with n = 10^10, μ = 100
        let n = 10_000_000_000usize;
        let r = dominant_shapes_nb(6, n, 1e-8).unwrap();
        assert_relative_eq!(r.k_star, 10.0, epsilon = 1e-9);
        assert_eq!(r.subdominant_names(), ["C3"]);
        assert_eq!(r.case_id, 1);
        assert_relative_eq!(r.prefactor, 1e-6, max_relative = 1e-9);
        // k* = 6 gives k − h_k = 3 = k*/2
        let r = dominant_shapes_nb(6, 4096, 2f64.powi(-8)).unwrap();
        assert_eq!(r.case_id, 2);
        assert_eq!(r.subdominant_names(), ["C3", "C3C3"]);
        let r = dominant_shapes_nb(7, 4096, 2f64.powi(-8)).unwrap();
        assert_eq!(r.case_id, 3);
        assert_eq!(r.subdominant_names(), ["C3C4"]);
        for k in 3..=9 {
            assert_eq!(dominant_shapes_nb(k, 500, 0.1).unwrap().dominant_names(), [format!("C{k}")]);
        }
    }

    #[test]
    fn nb_lemniscate_nu_matches_closed() {
        for (k, name) in [(6, "C3C3"), (7, "C3C4"), (8, "C3C5"), (8, "C4C4")] {
            let s = named(k, name);
            let a = nu_k(&s, k, &Kernel::Constant).unwrap();
            let b = nu_k_nb(&s, k, &Kernel::Constant).unwrap();
            assert_relative_eq!(a, b);
        }
    }

    #[test]
    fn log_copies_kernel_and_powerlaw() {
        let c3 = WalkShape::cycle(3).unwrap();
        let m = GraphModel::Kernel(KernelModel::new(1000, 0.01, Kernel::Constant).unwrap());
        let l = log_expected_copies(&c3, 3, &m).unwrap();
        assert_relative_eq!(l.node_term, 3.0 * 1000f64.ln());
        assert_relative_eq!(l.density_term, -3.0 * 0.01f64.ln().abs());
        let direct = expected_ind_kernel(&c3, 3, 1000, 0.01, &Kernel::Constant).unwrap().ln();
        assert_relative_eq!(l.total(), direct, max_relative = 1e-12);

        let s3 = WalkShape::star(3).unwrap();
        let m = GraphModel::PowerLaw(crate::generators::PowerLawModel::new(1000, 0.3, 1.0).unwrap());
        let l = log_expected_copies(&s3, 6, &m).unwrap();
        assert_relative_eq!(l.density_term, -1.8 * 1000f64.ln(), max_relative = 1e-12);
        let m = GraphModel::PowerLaw(crate::generators::PowerLawModel::new(1000, 1e-9, 0.5).unwrap());
        let l = log_expected_copies(&s3, 6, &m).unwrap();
        assert_relative_eq!(l.density_term, -6.0 * 2f64.ln(), max_relative = 1e-6);
        assert!(log_expected_copies(&c3, 4, &m).is_err());
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(zeta(2.0).unwrap(), pi * pi / 6.0, epsilon = 1e-13);
        assert_relative_eq!(zeta(4.0).unwrap(), pi.powi(4) / 90.0, epsilon = 1e-13);
        assert_relative_eq!(zeta(1.5).unwrap(), 2.612_375_348_685_488, epsilon = 1e-12);
        // ζ(s) − 1/(s − 1) → γ_E as s → 1
        let s = 1.0 + 1e-7;
        assert_relative_eq!(zeta(s).unwrap() - 1.0 / (s - 1.0), EULER_GAMMA, epsilon = 1e-6);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn s_gamma_examples() {
        let h100: f64 = (1..=100).map(|r| 1.0 / r as f64).sum();
        assert_relative_eq!(s_gamma_exact(&[2], 100, 0.5).unwrap(), h100, epsilon = 1e-12);
        let a = s_gamma(&[2], 100, 0.5).unwrap();
        assert_relative_eq!(a.value, 100f64.ln() + EULER_GAMMA, epsilon = 1e-12);
        assert_relative_eq!(a.value, 5.1824, epsilon = 1e-4);
        let a = s_gamma(&[1], 1000, 0.3).unwrap();
        assert_relative_eq!(a.value, 1000f64.powf(0.7) / 0.7, epsilon = 1e-9);
        let a = s_gamma(&[3], 1000, 0.5).unwrap();
        assert_relative_eq!(a.value, zeta(1.5).unwrap());
        assert_eq!(a.error, vec![ErrorTerm::NegPower { exponent: 0.5 }]);
    }

    fn brute_s(d: &[usize], n: usize, gamma: f64) -> f64 {
        fn rec(d: &[usize], n: usize, gamma: f64, used: &mut Vec<usize>) -> f64 {
            if used.len() == d.len() {
                return 1.0;
            }
            let t = used.len();
            let mut total = 0.0;
            for r in 1..=n {
                if used.contains(&r) {
                    continue;
                }
                used.push(r);
                total += (r as f64).powf(-(d[t] as f64) * gamma) * rec(d, n, gamma, used);
                used.pop();
            }
            total
        }
        rec(d, n, gamma, &mut Vec::new())
    }

    #[test]
    fn s_gamma_exact_matches_enumeration() {
        for d in [vec![1], vec![1, 2], vec![2, 2, 3], vec![1, 1, 2, 3]] {
            for gamma in [0.3, 0.7] {
                let a = s_gamma_exact(&d, 17, gamma).unwrap();
                assert_relative_eq!(a, brute_s(&d, 17, gamma), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn c_gamma_identities() {
        let g = 0.6;
        let two = c_gamma(&[2, 2], g).unwrap();
        assert_relative_eq!(two, zeta(1.2).unwrap().powi(2) - zeta(2.4).unwrap(), epsilon = 1e-9);
        assert_relative_eq!(c_gamma(&[3], 0.5).unwrap(), zeta(1.5).unwrap());
        assert!(c_gamma(&[1, 3], 0.5).is_err());
        assert!(c_gamma(&[2], 0.5).is_err());
        // C_γ is the n → ∞ limit of S_γ
        let big = s_gamma_exact(&[3, 4], 200_000, 0.9).unwrap();
        assert_relative_eq!(big, c_gamma(&[3, 4], 0.9).unwrap(), max_relative = 1e-5);
    }

    #[test]
    fn walk_density_examples() {
        let k2 = WalkShape::path(2).unwrap();
        assert_relative_eq!(log_walk_density_powerlaw(&k2, 10_000, 0.3, 1.0), -0.6 * 10_000f64.ln());
        let c3 = WalkShape::cycle(3).unwrap();
        assert_relative_eq!(log_walk_density_powerlaw(&c3, 500, 0.6, 1.0), -3.0 * 500f64.ln());
        let d = log_walk_density_powerlaw(&c3, 500, 0.2, 0.25) - log_walk_density_powerlaw(&c3, 500, 0.2, 0.5);
        assert_relative_eq!(d, -6.0 * 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn beta_n_examples() {
        assert_eq!(beta_n(1.0, 100.0).unwrap(), 0.0);
        let n: f64 = 1e6;
        assert_relative_eq!(beta_n(n.powf(-0.1), n).unwrap(), 0.1, epsilon = 1e-12);
        assert_relative_eq!(beta_n(0.5, 10f64.exp()).unwrap(), 0.0693, epsilon = 1e-4);
        assert!(beta_n(0.0, 10.0).is_err());
    }

    #[test]
    fn regime_examples() {
        let r = regime_powerlaw(4, 0.2, 0.0).unwrap();
        assert_eq!(r.regime, RegimeKind::Homogeneous);
        assert_relative_eq!(r.k_star.unwrap(), 10.0 / 3.0, epsilon = 1e-12);
        assert_eq!(r.predicted, vec![ShapeFamily::Cycle { v: 4 }]);
        // β + γ = (1 − γ)/2 with γ = 0.25: β = 0.125, k† = 8
        let r = regime_powerlaw(8, 0.25, 0.125).unwrap();
        assert_eq!(r.regime, RegimeKind::Boundary);
        assert_eq!(r.predicted, vec![ShapeFamily::Cycle { v: 8 }, ShapeFamily::Star { leaves: 4 }]);
        let r = regime_powerlaw(6, 0.25, 0.125).unwrap();
        assert_eq!(r.predicted, vec![ShapeFamily::Trees { v: 4 }]);
        // γ = 0.25, β = 0.2: s = 0.45 ∈ (0.375, 0.5)
        let r = regime_powerlaw(8, 0.25, 0.2).unwrap();
        assert_eq!(r.regime, RegimeKind::HubDominated);
        assert_eq!(r.predicted, vec![ShapeFamily::Star { leaves: 4 }]);
        assert_relative_eq!(r.k_circ.unwrap(), 2.0 * 0.25 / 0.075 + 3.0, epsilon = 1e-12);
        assert!(regime_powerlaw(4, 0.3, 0.3).unwrap().regime == RegimeKind::Unclassified);
    }

    #[test]
    fn star_rates() {
        let p4 = WalkShape::path(4).unwrap();
        assert_eq!(star_dominance_rate(&p4, 0.2).unwrap(), RateClass::Theta { n_exponent: 0.0, log_exponent: 0 });
        assert_eq!(star_dominance_rate(&p4, 1.0 / 3.0).unwrap(), RateClass::Theta { n_exponent: 0.0, log_exponent: -1 });
        match star_dominance_rate(&p4, 0.4).unwrap() {
            RateClass::BigO { n_exponent, log_exponent } => {
                assert_relative_eq!(n_exponent, 0.2, epsilon = 1e-12);
                assert_eq!(log_exponent, 0);
            }
            other => panic!("{other}"),
        }
        // γ = 1/2: degree-2 nodes of P_4 count towards d*
        assert_eq!(star_dominance_rate(&p4, 0.5).unwrap(), RateClass::BigO { n_exponent: 1.0, log_exponent: 2 });
        assert_eq!(star_dominance_rate(&p4, 1.0).unwrap(), RateClass::BigO { n_exponent: 0.0, log_exponent: -1 });
        assert!(star_dominance_rate(&WalkShape::star(3).unwrap(), 0.4).is_err());
        assert!(star_dominance_rate(&WalkShape::cycle(4).unwrap(), 0.4).is_err());
    }

    #[test]
    fn unicyclic_rates() {
        let c4p2 = WalkShape::tadpole(4, 2).unwrap();
        assert_eq!(c4p2.e, 5);
        assert_eq!(unicyclic_dominance_rate(&c4p2, 0.2).unwrap(), RateClass::Theta { n_exponent: 0.0, log_exponent: 0 });
        assert_eq!(unicyclic_dominance_rate(&c4p2, 0.25).unwrap(), RateClass::Theta { n_exponent: 0.0, log_exponent: -1 });
        match unicyclic_dominance_rate(&c4p2, 0.4).unwrap() {
            RateClass::BigO { n_exponent, .. } => assert_relative_eq!(n_exponent, 0.2, epsilon = 1e-12),
            other => panic!("{other}"),
        }
        assert_eq!(unicyclic_dominance_rate(&c4p2, 0.7).unwrap(), RateClass::BigO { n_exponent: 1.0, log_exponent: 0 });
        let reference = ShapeFamily::TriangleStar { leaves: 2 }.shapes(3).unwrap().remove(0);
        assert!(unicyclic_dominance_rate(&reference, 0.3).is_err());
        assert!(unicyclic_dominance_rate(&WalkShape::path(5).unwrap(), 0.3).is_err());
    }

    #[test]
    fn dominance_fraction_partition_and_dense() {
        let c = census(5).unwrap();
        let m = GraphModel::Kernel(KernelModel::new(30, 0.3, Kernel::Constant).unwrap());
        let all = empirical_dominance_fraction(&m, 5, c.shapes(), 8, 1).unwrap();
        assert_relative_eq!(all.fraction, 1.0, epsilon = 1e-12);
        let (n, p) = (40, 0.3);
        let model = GraphModel::Kernel(KernelModel::new(n, p, Kernel::Constant).unwrap());
        let c5 = WalkShape::cycle(5).unwrap();
        let f = empirical_dominance_fraction(&model, 5, std::slice::from_ref(&c5), 200, 2).unwrap();
        let expect = |s: &WalkShape| expected_ind_kernel(s, 5, n, p, &Kernel::Constant).unwrap();
        let ratio = expect(&c5) / c.shapes().iter().map(expect).sum::<f64>();
        assert!((f.fraction - ratio).abs() < 4.0 * f.std_error + 0.02, "{f:?} vs {ratio}");
        assert!(f.ci_low < f.fraction && f.fraction < f.ci_high);
        let empty = GraphModel::Kernel(KernelModel::new(5, 1e-12, Kernel::Constant).unwrap());
        assert!(matches!(empirical_dominance_fraction(&empty, 4, c.shapes(), 2, 0), Err(Error::Undefined(_))));
    }

    #[test]
    fn predicted_rates() {
        assert_eq!(predicted_rate(0.0, 4), 0.0);
        assert_relative_eq!(predicted_rate(1.0, 4), 1.0);
        assert_relative_eq!(predicted_rate(0.5, 4), 0.0);
        assert_relative_eq!(predicted_rate(0.75, 4), 0.5, epsilon = 1e-12);
        assert_relative_eq!(predicted_rate(0.25, 4), 0.25);
        assert_relative_eq!(ols_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap(), 2.0);
    }
}
