//! Randomized subsampling summaries of trees and cycles, their violin
//! densities, and automatic selection of subsample sizes.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::motif::scale_summaries;
use crate::rng::{substream, Purpose};

/// Number of points on each density grid.
pub const GRID_POINTS: usize = 512;

/// Smallest kernel bandwidth.
pub const MIN_BANDWIDTH: f64 = 1e-4;

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Inputs of the summarization routine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryConfig {
    /// Subsample sizes `s_1..s_{N_s}`, a multiset.
    pub sizes: Vec<usize>,
    pub k_max: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl SummaryConfig {
    pub fn new(sizes: Vec<usize>, k_max: usize, alpha: f64, seed: u64) -> Result<SummaryConfig> {
        if sizes.is_empty() {
            return Err(Error::Domain("need at least one subsample size".into()));
        }
        if !(3..=9).contains(&k_max) {
            return Err(Error::Domain(format!("k_max = {k_max} outside 3..=9")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha = {alpha} outside (0, 1)")));
        }
        let smallest = *sizes.iter().min().unwrap();
        if smallest <= k_max {
            return Err(Error::Domain(format!("k_max = {k_max} must be below every size, smallest is {smallest}")));
        }
        Ok(SummaryConfig { sizes, k_max, alpha, seed })
    }

    /// Checks the sizes against a graph on `n` nodes; `s = n` keeps the whole graph.
    pub fn check_graph(&self, n: usize) -> Result<()> {
        match self.sizes.iter().find(|&&s| s > n) {
            Some(s) => Err(Error::Size(format!("subsample size {s} exceeds the {n} graph nodes"))),
            None => Ok(()),
        }
    }

    pub fn replicates(&self) -> Result<usize> {
        replicate_count(self.alpha, self.k_max)
    }
}

/// `R = ⌈{Φ^{-1}(1 − α / (2 (k_max − 1))) / (2α)}²⌉`.
pub fn replicate_count(alpha: f64, k_max: usize) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    if k_max < 3 {
        return Err(Error::Domain(format!("k_max = {k_max} must exceed 2")));
    }
    let z = std_normal().inverse_cdf(1.0 - alpha / (2.0 * (k_max - 1) as f64));
    Ok(((z / (2.0 * alpha)).powi(2).ceil() as usize).max(1))
}

/// Summaries `t_k(r)` for every replicate `r` and scale `k = 2..=k_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleSamples {
    pub config: SummaryConfig,
    /// Subsample size of each replicate.
    pub sizes: Vec<usize>,
    /// `t[k − 2][r]`.
    pub t: Vec<Vec<f64>>,
}

impl ScaleSamples {
    pub fn replicates(&self) -> usize {
        self.sizes.len()
    }

    /// Samples at scale `k`.
    pub fn at(&self, k: usize) -> &[f64] {
        &self.t[k - 2]
    }
}

/// Size used by replicate `r` (one-based): `s_{⌈N_s r / R⌉}`.
pub fn replicate_size(sizes: &[usize], r: usize, total: usize) -> usize {
    let idx = (sizes.len() * r).div_ceil(total);
    sizes[idx.max(1) - 1]
}

/// Uniform `s`-subset of `0..n` by a partial Fisher-Yates shuffle.
pub fn sample_subset(n: usize, s: usize, seed: u64, r: usize) -> Result<NodeSet> {
    let mut rng = substream(seed, Purpose::Subsample, r as u64);
    let mut nodes: Vec<usize> = (0..n).collect();
    let (chosen, _) = nodes.partial_shuffle(&mut rng, s);
    NodeSet::new(chosen.to_vec(), n)
}

/// Runs the subsampling routine with `R` from [`replicate_count`].
pub fn summarize(g: &Graph, config: &SummaryConfig) -> Result<ScaleSamples> {
    summarize_with(g, config, config.replicates()?)
}

/// Runs the subsampling routine with an explicit replicate count.
pub fn summarize_with(g: &Graph, config: &SummaryConfig, replicates: usize) -> Result<ScaleSamples> {
    config.check_graph(g.n())?;
    if replicates == 0 {
        return Err(Error::Domain("need at least one replicate".into()));
    }
    let rows = (1..=replicates)
        .into_par_iter()
        .map(|r| {
            let s = replicate_size(&config.sizes, r, replicates);
            let u = sample_subset(g.n(), s, config.seed, r)?;
            Ok((s, scale_summaries(&g.induced_subgraph(&u)?, config.k_max)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = vec![Vec::with_capacity(replicates); config.k_max - 1];
    let mut sizes = Vec::with_capacity(replicates);
    for (s, row) in rows {
        sizes.push(s);
        for (k, x) in row.into_iter().enumerate() {
            t[k].push(x);
        }
    }
    Ok(ScaleSamples { config: config.clone(), sizes, t })
}

/// Density estimate for one scale, with an optional atom at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolinScale {
    pub k: usize,
    pub grid: Vec<f64>,
    /// Density values, already multiplied by `positive_fraction`.
    pub density: Vec<f64>,
    pub bandwidth: f64,
    pub zero_mass: f64,
    /// Weight carried by the continuous part.
    pub positive_fraction: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolinSummary {
    pub alpha: f64,
    pub scales: Vec<ViolinScale>,
}

/// Silverman's rule `0.9 min(σ, IQR/1.34) m^{-1/5}`, floored at [`MIN_BANDWIDTH`].
pub fn silverman_bandwidth(x: &[f64]) -> f64 {
    let m = x.len();
    if m < 2 {
        return MIN_BANDWIDTH;
    }
    let mean = x.iter().sum::<f64>() / m as f64;
    let sd = (x.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    (0.9 * spread * (m as f64).powf(-0.2)).max(MIN_BANDWIDTH)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Gaussian kernel density estimate with an atom at zero when zeros exceed `alpha`.
pub fn violin_scale(k: usize, samples: &[f64], alpha: f64) -> Result<ViolinScale> {
    let r = samples.len();
    if r < 2 {
        return Err(Error::Domain(format!("need at least two samples, got {r}")));
    }
    let positive: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0).collect();
    let mean = samples.iter().sum::<f64>() / r as f64;
    if positive.is_empty() {
        return Ok(ViolinScale {
            k,
            grid: Vec::new(),
            density: Vec::new(),
            bandwidth: 0.0,
            zero_mass: 1.0,
            positive_fraction: 0.0,
            mean,
        });
    }
    let zero_share = (r - positive.len()) as f64 / r as f64;
    let (zero_mass, weight) = if zero_share > alpha { (zero_share, 1.0 - zero_share) } else { (0.0, 1.0) };
    let h = silverman_bandwidth(&positive);
    let lo = positive.iter().copied().fold(f64::INFINITY, f64::min) - 6.0 * h;
    let hi = positive.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 6.0 * h;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let norm = weight / (positive.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
    let density = grid
        .iter()
        .map(|&x| norm * positive.iter().map(|&p| (-0.5 * ((x - p) / h).powi(2)).exp()).sum::<f64>())
        .collect();
    Ok(ViolinScale { k, grid, density, bandwidth: h, zero_mass, positive_fraction: weight, mean })
}

pub fn violin(samples: &ScaleSamples, alpha: f64) -> Result<ViolinSummary> {
    let scales = (2..=samples.config.k_max)
        .map(|k| violin_scale(k, samples.at(k), alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(ViolinSummary { alpha, scales })
}

/// Trapezoid integral of a density curve.
pub fn curve_mass(v: &ViolinScale) -> f64 {
    v.grid.windows(2).zip(v.density.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Settings of the size-selection routine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSelection {
    pub k_max: usize,
    pub alpha: f64,
    /// Number of sizes returned.
    pub n_sizes: usize,
    /// Growth factor of the trial size is `1 + delta`.
    pub delta: f64,
    pub seed: u64,
}

impl Default for SizeSelection {
    fn default() -> Self {
        SizeSelection { k_max: 9, alpha: 0.01, n_sizes: 21, delta: 0.05, seed: 0 }
    }
}

/// One trial size visited by [`select_sizes`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeStep {
    pub size: usize,
    /// `p_k` for `k = 2..=k_max`; `None` when `k` was not tested.
    pub p: Vec<Option<f64>>,
    pub restricted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeTrace {
    pub sizes: Vec<usize>,
    pub final_size: f64,
    pub steps: Vec<SizeStep>,
    /// Scales still tested after the reset.
    pub tested: Vec<usize>,
    /// The iteration budget ran out before the restricted pass stopped.
    pub exhausted: bool,
}

/// One-sided `p_k = 1 − Φ(mean / sd)`, with `p_k = 1/2` for all-zero samples
/// and `p_k = 0` for constant positive samples.
pub fn separation_p_value(t: &[f64]) -> f64 {
    if !t.iter().any(|&x| x > 0.0) {
        return 0.5;
    }
    let r = t.len() as f64;
    let mean = t.iter().sum::<f64>() / r;
    let var = if t.len() < 2 { 0.0 } else { t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0) };
    if var <= 0.0 {
        return 0.0;
    }
    1.0 - std_normal().cdf(mean / var.sqrt())
}

/// Automatic subsample sizes.
pub fn select_sizes(g: &Graph, opts: &SizeSelection) -> Result<Vec<usize>> {
    Ok(select_sizes_traced(g, opts)?.sizes)
}

/// [`select_sizes`] with the visited trial sizes.
///
/// The trial size is kept as a real number and rounded only when subsampling,
/// so growth by `1 + delta` never stalls on small sizes.
pub fn select_sizes_traced(g: &Graph, opts: &SizeSelection) -> Result<SizeTrace> {
    let n = g.n();
    let k_max = opts.k_max;
    if k_max < 3 || 2 * k_max >= n {
        return Err(Error::Size(format!("need 2 < k_max < n/2, got k_max={k_max}, n={n}")));
    }
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) || !(opts.delta > 0.0) || opts.n_sizes == 0 {
        return Err(Error::Domain("need 0 < alpha < 1, delta > 0 and at least one size".into()));
    }
    let growth = 1.0 + opts.delta;
    let start = ((k_max + 1).max((n / 4).min(3 * (k_max + 1))).min(n)) as f64 / growth;
    let iterations = ((n as f64).ln() / growth.ln()).ceil() as usize;
    let level = opts.alpha / (k_max - 1) as f64;
    let mut s = start;
    let mut tested: Vec<usize> = (2..=k_max).collect();
    let mut s_max = n;
    let restricted_max = (0.8 * n as f64).floor() as usize;
    let mut restricted = false;
    let mut steps = Vec::new();
    for i in 0..iterations {
        s = (growth * s).min(n as f64);
        let size = (s.round() as usize).clamp(k_max + 1, n);
        let cfg = SummaryConfig::new(vec![size], k_max, opts.alpha, crate::rng::child_seed(opts.seed, i as u64))?;
        let samples = summarize(g, &cfg)?;
        let mut p = vec![None; k_max - 1];
        for &k in &tested {
            p[k - 2] = Some(separation_p_value(samples.at(k)));
        }
        let worst = p.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        steps.push(SizeStep { size, p: p.clone(), restricted });
        if worst <= level || s >= s_max as f64 {
            if restricted {
                return Ok(SizeTrace {
                    sizes: spread_sizes(s, opts.n_sizes, k_max, n),
                    final_size: s,
                    steps,
                    tested,
                    exhausted: false,
                });
            }
            s = start;
            tested = (2..=k_max).filter(|&k| p[k - 2].is_some_and(|x| x < 0.5)).collect();
            s_max = restricted_max;
            restricted = true;
        }
    }
    Ok(SizeTrace { sizes: spread_sizes(s, opts.n_sizes, k_max, n), final_size: s, steps, tested, exhausted: true })
}

/// `count` equispaced values over `0.9 s ..= 1.1 s`, rounded and kept in `k_max + 1 ..= n`.
fn spread_sizes(s: f64, count: usize, k_max: usize, n: usize) -> Vec<usize> {
    let (lo, hi) = (0.9 * s, 1.1 * s);
    (0..count)
        .map(|i| {
            let x = if count == 1 { s } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 };
            (x.round() as usize).clamp(k_max + 1, n)
        })
        .collect()
}

/// CSV with columns `k, r, size, t`; `r` is one-based.
pub fn export_samples(samples: &ScaleSamples) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "r", "size", "t"]).map_err(csv_err)?;
    for k in 2..=samples.config.k_max {
        for (r, (&t, &s)) in samples.at(k).iter().zip(&samples.sizes).enumerate() {
            w.write_record([k.to_string(), (r + 1).to_string(), s.to_string(), format!("{t:.17e}")]).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Domain(e.to_string())
}

/// Mirrored violins side by side, one per scale, with the zero atom drawn as a bar at the base.
pub fn render_violin(summary: &ViolinSummary) -> String {
    const W: f64 = 80.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let width = PAD * 2.0 + W * summary.scales.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{:.0}" viewBox="0 0 {width:.0} {:.0}">"#,
        H + 2.0 * PAD,
        H + 2.0 * PAD
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{width:.0}" height="{:.0}" fill="#ffffff"/>"##, H + 2.0 * PAD);
    let y_of = |t: f64| PAD + H * (1.0 - t.clamp(0.0, 1.0));
    let _ = writeln!(
        out,
        r##"<line x1="{PAD}" y1="{:.2}" x2="{PAD}" y2="{:.2}" stroke="#000000"/>"##,
        y_of(0.0),
        y_of(1.0)
    );
    let peak = summary
        .scales
        .iter()
        .flat_map(|v| v.density.iter().copied())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for (i, v) in summary.scales.iter().enumerate() {
        let cx = PAD + W * (i as f64 + 0.5);
        let half = 0.45 * W;
        if !v.grid.is_empty() {
            let pts: Vec<(f64, f64)> =
                v.grid.iter().zip(&v.density).filter(|(x, _)| (0.0..=1.0).contains(*x)).map(|(&x, &d)| (x, d)).collect();
            if !pts.is_empty() {
                let mut path = String::new();
                for (j, (x, d)) in pts.iter().enumerate() {
                    let _ = write!(path, "{}{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, cx + half * d / peak, y_of(*x));
                }
                for (x, d) in pts.iter().rev() {
                    let _ = write!(path, "L{:.2},{:.2} ", cx - half * d / peak, y_of(*x));
                }
                let _ = writeln!(out, r##"<path d="{}Z" fill="#9ecae1" stroke="#3182bd"/>"##, path);
            }
        }
        if v.zero_mass > 0.0 {
            let bw = 2.0 * half * v.zero_mass;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{bw:.2}" height="4" fill="#de2d26"/>"##,
                cx - bw / 2.0,
                y_of(0.0) - 2.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            y_of(0.0) + 20.0,
            v.k
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::sample_erdos_renyi;
    use approx::assert_relative_eq;

    #[test]
    fn replicate_count_values() {
        assert_eq!(replicate_count(0.05, 3).unwrap(), 503);
        assert_eq!(replicate_count(0.01, 9).unwrap(), 26038);
        assert_eq!(replicate_count(0.05, 9).unwrap(), 748);
        assert_eq!(replicate_count(0.01, 3).unwrap(), 19699);
        assert_eq!(replicate_count(0.49, 3).unwrap(), 2);
        assert!(replicate_count(0.0, 3).is_err());
    }

    #[test]
    fn size_index_blocks() {
        let sizes = [10, 20, 30];
        let used: Vec<usize> = (1..=6).map(|r| replicate_size(&sizes, r, 6)).collect();
        assert_eq!(used, [10, 10, 20, 20, 30, 30]);
        assert_eq!(replicate_size(&sizes, 1, 1), 30);
    }

    #[test]
    fn complete_and_empty_graphs() {
        let cfg = SummaryConfig::new(vec![8, 10], 5, 0.2, 3).unwrap();
        let full = summarize_with(&Graph::complete(20), &cfg, 12).unwrap();
        assert!(full.t.iter().flatten().all(|&t| (t - 1.0).abs() < 1e-12));
        let none = summarize_with(&Graph::empty(20), &cfg, 12).unwrap();
        assert!(none.t.iter().flatten().all(|&t| t == 0.0));
        assert!(summarize_with(&Graph::empty(9), &cfg, 4).is_err());
    }

    #[test]
    fn summarize_is_deterministic() {
        let g = sample_erdos_renyi(60, 0.2, 5).unwrap();
        let cfg = SummaryConfig::new(vec![20, 25], 4, 0.2, 9).unwrap();
        let a = summarize_with(&g, &cfg, 40).unwrap();
        let b = summarize_with(&g, &cfg, 40).unwrap();
        assert_eq!(export_samples(&a).unwrap(), export_samples(&b).unwrap());
    }

    #[test]
    fn violin_zero_handling() {
        let pos: Vec<f64> = (0..20).map(|i| 0.3 + 0.01 * i as f64).collect();
        let v = violin_scale(3, &pos, 0.01).unwrap();
        assert_eq!(v.zero_mass, 0.0);
        assert_relative_eq!(curve_mass(&v), 1.0, epsilon = 1e-6);
        let v = violin_scale(3, &[0.0; 10], 0.01).unwrap();
        assert_eq!(v.zero_mass, 1.0);
        assert!(v.grid.is_empty());
        let mut mixed = vec![0.0; 30];
        mixed.extend((0..70).map(|i| 0.2 + 0.005 * i as f64));
        let v = violin_scale(4, &mixed, 0.01).unwrap();
        assert_relative_eq!(v.zero_mass, 0.3, epsilon = 1e-12);
        assert_relative_eq!(curve_mass(&v), 0.7, epsilon = 1e-6);
        // zeros at or below alpha are dropped without an atom
        let v = violin_scale(4, &mixed, 0.3).unwrap();
        assert_eq!(v.zero_mass, 0.0);
        assert_relative_eq!(curve_mass(&v), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn constant_samples_use_floor_bandwidth() {
        let v = violin_scale(2, &[0.5; 8], 0.01).unwrap();
        assert_eq!(v.bandwidth, MIN_BANDWIDTH);
        assert_relative_eq!(curve_mass(&v), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn p_values() {
        assert_eq!(separation_p_value(&[0.0, 0.0, 0.0]), 0.5);
        assert_eq!(separation_p_value(&[1.0, 1.0, 1.0]), 0.0);
        let p = separation_p_value(&[1.0, 2.0, 3.0]);
        assert_relative_eq!(p, 1.0 - std_normal().cdf(2.0), epsilon = 1e-12);
    }

    #[test]
    fn sizes_complete_graph() {
        let opts = SizeSelection { k_max: 5, alpha: 0.05, n_sizes: 5, delta: 0.05, seed: 1 };
        let trace = select_sizes_traced(&Graph::complete(200), &opts).unwrap();
        assert!(!trace.exhausted);
        // one step per pass: the first trial size already separates every scale
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(trace.steps[0].size, 18);
        assert_eq!(trace.sizes, [16, 17, 18, 19, 20]);
    }

    #[test]
    fn sizes_edgeless_graph() {
        let opts = SizeSelection { k_max: 3, alpha: 0.2, n_sizes: 3, delta: 0.5, seed: 1 };
        let trace = select_sizes_traced(&Graph::empty(40), &opts).unwrap();
        assert!(trace.tested.is_empty());
        assert!(!trace.exhausted);
        assert_eq!(trace.steps.last().unwrap().size, 10);
        assert_eq!(trace.sizes, [9, 10, 11]);
        assert_eq!(trace, select_sizes_traced(&Graph::empty(40), &opts).unwrap());
    }

    #[test]
    fn svg_shapes() {
        let empty = render_violin(&ViolinSummary { alpha: 0.01, scales: Vec::new() });
        assert!(empty.starts_with("<svg") && empty.ends_with("</svg>\n"));
        assert!(!empty.contains("<path"));
        let one = ViolinSummary { alpha: 0.01, scales: vec![violin_scale(3, &[0.2, 0.4, 0.5], 0.01).unwrap()] };
        assert_eq!(render_violin(&one).matches("<path").count(), 1);
    }
}
