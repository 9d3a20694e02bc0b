mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use walkscale_core::generators::{
    sample_erdos_renyi, sample_kernel_graph, sample_pref_attachment, sample_powerlaw_graph, sample_watts_strogatz,
    triadic_closure_rewire,
};
use walkscale_core::netbuild::{aggregate_url_network, ingest_messages, windowed_similarity_network, WindowSpec};
use walkscale_core::sampler::{
    export_samples, render_violin, select_sizes_traced, summarize, summarize_with, violin, violin_scale, SizeSelection,
    SummaryConfig, ViolinSummary,
};
use walkscale_core::theory::{dominant_shapes_kernel_with, dominant_shapes_nb_with, rate_experiment, regime_powerlaw, RateConfig};
use walkscale_core::{load_edge_list, motif_census, Graph, Kernel, KernelModel, PowerLawModel};

use output::{Manifest, Output, UsageError};

#[derive(Parser, Debug)]
#[command(name = "walkscale", version, about = "Scale-based summaries of trees and cycles in networks")]
struct Cli {
    /// Seed for every random draw; recorded in all outputs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Maximum number of worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Subsample a graph and summarize trees and cycles at every scale
    Summarize(SummarizeArgs),
    /// Choose subsample sizes automatically
    SelectSizes(SelectArgs),
    /// Closed-walk, non-backtracking walk and cycle counts
    Census(CensusArgs),
    /// Sample a random graph
    Generate(GenerateArgs),
    /// Predict dominating walk shapes
    Predict(PredictArgs),
    /// Simulate convergence rates of the dominance ratio
    Rates(RatesArgs),
    /// Build a user network from a message log
    BuildNetwork(BuildArgs),
    /// Draw violins from saved samples or densities
    RenderViolin(RenderArgs),
}

#[derive(Args, Debug, Serialize)]
struct SummarizeArgs {
    /// Edge list file
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 9)]
    kmax: usize,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// `auto` or a comma-separated list of sizes
    #[arg(long, default_value = "auto")]
    sizes: String,
    /// Number of sizes chosen when `--sizes auto`
    #[arg(long, default_value_t = 21)]
    ns: usize,
    /// Size increment used when `--sizes auto`
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Override the replicate count implied by `--alpha` and `--kmax`
    #[arg(long)]
    replicates: Option<usize>,
    /// Output prefix for `.samples.csv`, `.violin.json` and `.violin.svg`
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SelectArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 9)]
    kmax: usize,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 21)]
    ns: usize,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CensusArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 9)]
    kmax: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModelKind {
    Er,
    Kernel,
    Powerlaw,
    Ws,
    Pa,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    n: usize,
    /// Edge probability (er) or rewiring probability (ws)
    #[arg(long)]
    p: Option<f64>,
    /// Density scale of the kernel model
    #[arg(long)]
    rho: Option<f64>,
    /// `constant`, `planted:B,DIAG,OFF` or `rank-one:L1,L2,...` with equal widths
    #[arg(long, default_value = "constant")]
    kernel: String,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Lattice neighbours on each side (ws)
    #[arg(long)]
    nei: Option<usize>,
    /// Successful triadic closures applied after sampling
    #[arg(long)]
    triadic: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PredictModel {
    Kernel,
    Nb,
    Powerlaw,
}

#[derive(Args, Debug, Serialize)]
struct PredictArgs {
    #[arg(long, value_enum)]
    model: PredictModel,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value = "constant")]
    kernel: String,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RatesArgs {
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 7)]
    log2_min: u32,
    #[arg(long, default_value_t = 12)]
    log2_max: u32,
    /// Replicates at size 2^j are max(2, 2^(budget - j))
    #[arg(long, default_value_t = 16)]
    budget: u32,
    #[arg(long, default_value = "planted:3,1.5,0.75")]
    kernel: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BuildMode {
    Url,
    Editsim,
}

#[derive(Args, Debug, Serialize)]
struct BuildArgs {
    #[arg(long, value_enum)]
    mode: BuildMode,
    /// CSV with columns user,timestamp,text,urls
    #[arg(long)]
    messages: PathBuf,
    /// Window start in epoch seconds (editsim); defaults to the first message
    #[arg(long)]
    window_start: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    window_days: f64,
    #[arg(long, default_value_t = 29)]
    max_edit: usize,
    /// Cut-off time (url); defaults to the last message
    #[arg(long)]
    until: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RenderArgs {
    /// Samples CSV written by `summarize`
    #[arg(long, conflicts_with = "violin")]
    samples: Option<PathBuf>,
    /// Violin JSON written by `summarize`
    #[arg(long)]
    violin: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required here")))
}

fn read_graph(path: &PathBuf) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(load_edge_list(&text)?.graph)
}

fn parse_kernel(spec: &str) -> Result<Kernel> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = || -> Result<Vec<f64>> {
        rest.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad kernel number {x:?}")))).collect()
    };
    Ok(match name {
        "constant" => Kernel::Constant,
        "planted" => match nums()?.as_slice() {
            &[b, d, o] if b >= 1.0 && b.fract() == 0.0 => Kernel::planted(b as usize, d, o)?,
            _ => return Err(usage("planted kernel takes BLOCKS,DIAG,OFF")),
        },
        "rank-one" => {
            let levels = nums()?;
            let w = vec![1.0 / levels.len() as f64; levels.len()];
            Kernel::rank_one(w, levels)?
        }
        _ => return Err(usage(format!("unknown kernel {spec:?}"))),
    })
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    spec.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| usage(format!("bad size {x:?}")))).collect()
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    let manifest = Manifest::new(&cli.command, cli.seed)?;
    let seed = cli.seed;
    match &cli.command {
        Command::Summarize(a) => {
            let g = read_graph(&a.graph)?;
            let sizes = if a.sizes == "auto" {
                let opts = SizeSelection { k_max: a.kmax, alpha: a.alpha, n_sizes: a.ns, delta: a.delta, seed };
                select_sizes_traced(&g, &opts)?.sizes
            } else {
                parse_sizes(&a.sizes)?
            };
            let cfg = SummaryConfig::new(sizes, a.kmax, a.alpha, seed)?;
            let samples = match a.replicates {
                Some(r) => summarize_with(&g, &cfg, r)?,
                None => summarize(&g, &cfg)?,
            };
            let v = violin(&samples, a.alpha)?;
            let prefix = a.out.display().to_string();
            Output::file(format!("{prefix}.samples.csv")).write_csv(&manifest, &export_samples(&samples)?)?;
            Output::file(format!("{prefix}.violin.json")).write_json(&manifest, &v)?;
            Output::file(format!("{prefix}.violin.svg")).write_svg(&manifest, &render_violin(&v))?;
        }
        Command::SelectSizes(a) => {
            let g = read_graph(&a.graph)?;
            let opts = SizeSelection { k_max: a.kmax, alpha: a.alpha, n_sizes: a.ns, delta: a.delta, seed };
            Output::from(&a.out).write_json(&manifest, &select_sizes_traced(&g, &opts)?)?;
        }
        Command::Census(a) => {
            let g = read_graph(&a.graph)?;
            let c = motif_census(&g, a.kmax)?;
            let body = json!({ "nodes": g.n(), "edges": g.edge_count(), "census": c });
            Output::from(&a.out).write_json(&manifest, &body)?;
        }
        Command::Generate(a) => {
            let mut g = match a.model {
                ModelKind::Er => sample_erdos_renyi(a.n, need(a.p, "p")?, seed)?,
                ModelKind::Kernel => {
                    sample_kernel_graph(&KernelModel::new(a.n, need(a.rho, "rho")?, parse_kernel(&a.kernel)?)?, seed)?
                }
                ModelKind::Powerlaw => sample_powerlaw_graph(&PowerLawModel::new(a.n, need(a.gamma, "gamma")?, a.theta)?, seed)?,
                ModelKind::Ws => sample_watts_strogatz(a.n, need(a.nei, "nei")?, need(a.p, "p")?, seed)?,
                ModelKind::Pa => sample_pref_attachment(a.n, seed)?,
            };
            if let Some(iter) = a.triadic {
                g = triadic_closure_rewire(&g, iter, u64::MAX, seed)?.0;
            }
            Output::from(&a.out).write_edges(&manifest, &g.to_edge_list())?;
        }
        Command::Predict(a) => match a.model {
            PredictModel::Kernel | PredictModel::Nb => {
                let (n, rho) = (need(a.n, "n")?, need(a.rho, "rho")?);
                let kernel = parse_kernel(&a.kernel)?;
                let r = if matches!(a.model, PredictModel::Kernel) {
                    dominant_shapes_kernel_with(a.k, n, rho, &kernel)?
                } else {
                    dominant_shapes_nb_with(a.k, n, rho, &kernel)?
                };
                let body = json!({
                    "dominant": r.dominant_names(),
                    "subdominant": r.subdominant_names(),
                    "k_star": r.k_star,
                    "case": r.case_id,
                    "prefactor": r.prefactor,
                    "nu_ratio": r.nu_ratio,
                    "first_order_ratio": r.first_order_ratio,
                });
                Output::from(&a.out).write_json(&manifest, &body)?;
            }
            PredictModel::Powerlaw => {
                let r = regime_powerlaw(a.k, need(a.gamma, "gamma")?, need(a.beta, "beta")?)?;
                let labels: Vec<String> = r.predicted.iter().map(|f| f.label()).collect();
                Output::from(&a.out).write_json(&manifest, &json!({ "regime": r, "labels": labels }))?;
            }
        },
        Command::Rates(a) => {
            if a.log2_min > a.log2_max {
                return Err(usage("--log2-min exceeds --log2-max"));
            }
            let cfg = RateConfig {
                k: a.k,
                alphas: a.alphas.clone(),
                log2_sizes: (a.log2_min..=a.log2_max).collect(),
                kernel: parse_kernel(&a.kernel)?,
                budget_log2: a.budget,
                seed,
            };
            Output::from(&a.out).write_json(&manifest, &rate_experiment(&cfg)?)?;
        }
        Command::BuildNetwork(a) => {
            let text = std::fs::read_to_string(&a.messages).with_context(|| format!("reading {}", a.messages.display()))?;
            let records = ingest_messages(&text)?;
            let g = match a.mode {
                BuildMode::Url => {
                    let last = records.last().map_or(0.0, |r| r.timestamp);
                    aggregate_url_network(&records, a.until.unwrap_or(last))?
                }
                BuildMode::Editsim => {
                    let first = records.first().map_or(0.0, |r| r.timestamp);
                    let w = WindowSpec::days(a.window_start.unwrap_or(first), a.window_days)?;
                    windowed_similarity_network(&records, w, a.max_edit)?
                }
            };
            Output::from(&a.out).write_edges(&manifest, &g.to_edge_list())?;
        }
        Command::RenderViolin(a) => {
            let summary = match (&a.samples, &a.violin) {
                (Some(p), None) => violin_from_csv(p, a.alpha)?,
                (None, Some(p)) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    let doc: serde_json::Value = serde_json::from_str(&text)?;
                    serde_json::from_value::<ViolinSummary>(doc.get("result").cloned().unwrap_or(doc))?
                }
                _ => return Err(usage("give exactly one of --samples or --violin")),
            };
            Output::from(&a.out).write_svg(&manifest, &render_violin(&summary))?;
        }
    }
    Ok(())
}

fn violin_from_csv(path: &PathBuf, alpha: f64) -> Result<ViolinSummary> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let mut by_k: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for row in reader.records() {
        let row = row?;
        let k: usize = row.get(0).unwrap_or("").parse().context("bad k column")?;
        let t: f64 = row.get(3).unwrap_or("").parse().context("bad t column")?;
        by_k.entry(k).or_default().push(t);
    }
    if by_k.is_empty() {
        bail!("no samples in {}", path.display());
    }
    let scales = by_k.iter().map(|(&k, t)| violin_scale(k, t, alpha)).collect::<walkscale_core::Result<Vec<_>>>()?;
    Ok(ViolinSummary { alpha, scales })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
