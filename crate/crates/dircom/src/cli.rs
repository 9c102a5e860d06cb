//! Command-line plumbing: argument definitions, file formats, the run
//! manifest, and the command implementations behind the `dircom` binary.
//!
//! Community files are one community per line,
//! `id<TAB>phi<TAB>S:a,b,c<TAB>T:x,y,z`, using external node labels.
//! Ground-truth and component files use `S: a b c | T: x y z`. Readers
//! accept either format.

use crate::benchgen::{generate, BenchError, BenchParams};
use crate::dcomp::directional_components;
use crate::extract::{grid_en, grid_l0, submatrix_scan, EarlyStop, ExtractError, SolverOpts,
    SparsityGrid};
use crate::graph::{DirectedGraph, EdgeMask, GraphError};
use crate::harvest::{harvest, HarvestConfig, HarvestError, HarvestRecord};
use crate::measures::{overlapping_nmi, MeasureError, NmiVariant};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Extract(#[from] ExtractError),
    #[error("{0}")]
    Harvest(#[from] HarvestError),
    #[error("{0}")]
    Bench(#[from] BenchError),
    #[error("{0}")]
    Measure(#[from] MeasureError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad file format in {path}: {detail}")]
    Format { path: PathBuf, detail: String },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "dircom",
    about = "Asymmetric directional community detection in directed networks",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Harvest directional communities from an edge list.
    Harvest(HarvestArgs),
    /// Print the exact directional components of an edge list.
    Components(ComponentsArgs),
    /// Generate a synthetic benchmark graph with planted communities.
    Generate(GenerateArgs),
    /// Score a found community file against ground truth.
    Evaluate(EvaluateArgs),
    /// Sample (size, principal singular value) pairs over random rectangles.
    Scan(ScanArgs),
    /// Run the benchmark accuracy grid.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Penalty {
    L0,
    En,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyChoice {
    L0,
    En,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Max,
    Sum,
}

impl From<Variant> for NmiVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Max => NmiVariant::Max,
            Variant::Sum => NmiVariant::Sum,
        }
    }
}

/// `a:b:count` exponent grid specification.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub k_start: f64,
    pub k_end: f64,
    pub count: usize,
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected a:b:count, got `{s}`"));
        }
        let k_start: f64 = parts[0].parse().map_err(|_| format!("bad start `{}`", parts[0]))?;
        let k_end: f64 = parts[1].parse().map_err(|_| format!("bad end `{}`", parts[1]))?;
        let count: usize = parts[2].parse().map_err(|_| format!("bad count `{}`", parts[2]))?;
        if count == 0 {
            return Err("grid count must be positive".into());
        }
        Ok(GridSpec {
            k_start,
            k_end,
            count,
        })
    }
}

impl GridSpec {
    pub fn build(&self, penalty: Penalty) -> SparsityGrid<f64> {
        match penalty {
            Penalty::L0 => grid_l0(self.k_start, self.k_end, self.count),
            Penalty::En => grid_en(self.k_start, self.k_end, self.count),
        }
    }
}

#[derive(Args, Debug)]
pub struct HarvestArgs {
    /// Input edge list.
    pub input: PathBuf,
    /// Output directory (created if absent).
    pub outdir: PathBuf,
    #[arg(long, value_enum, default_value = "l0")]
    pub penalty: Penalty,
    /// Sparsity grid exponents a:b:count.
    #[arg(long = "grid-k", default_value = "10:18:200")]
    pub grid_k: GridSpec,
    /// Early-stop ratio s_p.
    #[arg(long = "sp", default_value_t = 1.4)]
    pub sp: f64,
    /// Early-stop level s_l.
    #[arg(long = "sl", default_value_t = 0.4)]
    pub sl: f64,
    /// Stop once active edges drop below this fraction of the input.
    #[arg(long = "stop-frac", default_value_t = 0.10)]
    pub stop_frac: f64,
    /// Terminal-size weight in the L0 penalty.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Elastic-net constraint level.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long = "max-communities")]
    pub max_communities: Option<usize>,
    /// Discard sweep candidates whose SZ_omega exceeds this ceiling.
    #[arg(long = "max-sz")]
    pub max_sz: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ComponentsArgs {
    pub input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Output prefix; writes <prefix>.edges, <prefix>.truth and
    /// <prefix>.manifest.json.
    pub out_prefix: PathBuf,
    /// Community-size preset.
    #[arg(long, value_enum, default_value = "big")]
    pub preset: Preset,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Target mean in-degree.
    #[arg(long, default_value_t = 20.0)]
    pub k: f64,
    /// Mixing parameter.
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    /// Shuffle terminal labels (on by default; use =false to disable).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub shuffle: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Big,
    Small,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    pub found: PathBuf,
    pub truth: PathBuf,
    #[arg(long, value_enum, default_value = "max")]
    pub variant: Variant,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 1.1)]
    pub omega: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Output CSV path.
    pub out: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub reps: usize,
    /// Subset of cells as preset:k:mu triples, comma separated; all 18
    /// when omitted.
    #[arg(long, value_delimiter = ',')]
    pub cells: Vec<String>,
    #[arg(long, value_enum, default_value = "both")]
    pub penalty: PenaltyChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Reproducibility record written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub rng_seed: u64,
    pub input_digests: HashMap<String, String>,
    pub wall_secs: f64,
    pub edge_touches: u64,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(path, json + "\n").map_err(io_err(path))
}

/// Label-level cover: one (S, T) pair of external labels per community.
pub type LabelCover = Vec<(Vec<String>, Vec<String>)>;

/// Writes the tab-separated community format.
pub fn write_communities(
    path: &Path,
    rows: &[(f64, Vec<String>, Vec<String>)],
) -> Result<(), CliError> {
    let mut out = String::new();
    for (id, (phi, s, t)) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{id}\t{phi:.12}\tS:{}\tT:{}\n",
            s.join(","),
            t.join(",")
        ));
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Writes `S: … | T: …` lines (truth / component format).
pub fn write_truth(path: &Path, cover: &LabelCover) -> Result<(), CliError> {
    let mut out = String::new();
    for (s, t) in cover {
        out.push_str(&format!("S: {} | T: {}\n", s.join(" "), t.join(" ")));
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Reads either community-file format into a label cover.
pub fn read_cover(path: &Path) -> Result<LabelCover, CliError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut cover = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |detail: String| CliError::Format {
            path: path.to_path_buf(),
            detail: format!("line {}: {detail}", lineno + 1),
        };
        if line.contains('\t') {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(bad(format!("expected 4 tab fields, got {}", fields.len())));
            }
            let s = fields[2]
                .strip_prefix("S:")
                .ok_or_else(|| bad("missing S: field".into()))?;
            let t = fields[3]
                .strip_prefix("T:")
                .ok_or_else(|| bad("missing T: field".into()))?;
            cover.push((
                s.split(',').filter(|x| !x.is_empty()).map(String::from).collect(),
                t.split(',').filter(|x| !x.is_empty()).map(String::from).collect(),
            ));
        } else {
            let rest = line
                .strip_prefix("S:")
                .ok_or_else(|| bad("expected `S: … | T: …`".into()))?;
            let (s, t) = rest
                .split_once('|')
                .ok_or_else(|| bad("missing `|` separator".into()))?;
            let t = t
                .trim()
                .strip_prefix("T:")
                .ok_or_else(|| bad("missing T: part".into()))?;
            cover.push((
                s.split_whitespace().map(String::from).collect(),
                t.split_whitespace().map(String::from).collect(),
            ));
        }
    }
    if cover.is_empty() {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            detail: "no communities".into(),
        });
    }
    Ok(cover)
}

fn load_graph(path: &Path) -> Result<DirectedGraph<f64>, CliError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    Ok(DirectedGraph::load_edge_list(BufReader::new(file))?)
}

fn write_edge_list(path: &Path, g: &DirectedGraph<f64>) -> Result<(), CliError> {
    let mut out = String::new();
    for i in 0..g.node_count() {
        for he in g.out_edges(i) {
            if he.weight == 1.0 {
                out.push_str(&format!("{} {}\n", g.label(i), g.label(he.node)));
            } else {
                out.push_str(&format!("{} {} {}\n", g.label(i), g.label(he.node), he.weight));
            }
        }
    }
    fs::write(path, out).map_err(io_err(path))
}

fn labels_of(g: &DirectedGraph<f64>, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&i| g.label(i).to_string()).collect()
}

pub fn cmd_harvest(args: &HarvestArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let digest = sha256_file(&args.input)?;
    let g = load_graph(&args.input)?;
    let config = HarvestConfig {
        grid: args.grid_k.build(args.penalty),
        stop: EarlyStop {
            s_p: args.sp,
            s_l: args.sl,
        },
        opts: SolverOpts {
            omega: args.omega,
            c: args.c,
            max_sz: args.max_sz,
            ..SolverOpts::default()
        },
        stop_fraction: args.stop_frac,
        max_communities: args.max_communities,
        rng_seed: args.seed,
    };
    let record = harvest(&g, &config)?;
    fs::create_dir_all(&args.outdir).map_err(io_err(&args.outdir))?;

    let rows: Vec<(f64, Vec<String>, Vec<String>)> = record
        .communities
        .iter()
        .map(|h| {
            (
                h.phi,
                labels_of(&g, h.community.source()),
                labels_of(&g, h.community.terminal()),
            )
        })
        .collect();
    write_communities(&args.outdir.join("communities.tsv"), &rows)?;

    let metrics_path = args.outdir.join("metrics.csv");
    let mut metrics = String::from("id,source_size,terminal_size,internal_edges,phi,commonality\n");
    for (id, h) in record.communities.iter().enumerate() {
        metrics.push_str(&format!(
            "{id},{},{},{},{:.6},{:.6}\n",
            h.community.source().len(),
            h.community.terminal().len(),
            h.internal_edges,
            h.phi,
            h.commonality
        ));
    }
    fs::write(&metrics_path, metrics).map_err(io_err(&metrics_path))?;

    let traces_dir = args.outdir.join("traces");
    fs::create_dir_all(&traces_dir).map_err(io_err(&traces_dir))?;
    // Trace files record only the chosen grid index per community; the phi
    // path itself is re-traced by harvesting with identical flags, so a
    // compact per-community summary is enough for the plots.
    let trace_path = traces_dir.join("phi_trace.csv");
    let mut trace_csv = String::from("community,grid_index,seed_node,phi\n");
    for (id, h) in record.communities.iter().enumerate() {
        trace_csv.push_str(&format!(
            "{id},{},{},{:.6}\n",
            h.grid_index,
            g.label(h.seed_node),
            h.phi
        ));
    }
    fs::write(&trace_path, trace_csv).map_err(io_err(&trace_path))?;

    let manifest = RunManifest {
        command: "harvest".into(),
        params: serde_json::json!({
            "input": args.input,
            "penalty": format!("{:?}", args.penalty),
            "grid_k": format!("{}:{}:{}", args.grid_k.k_start, args.grid_k.k_end, args.grid_k.count),
            "sp": args.sp,
            "sl": args.sl,
            "stop_frac": args.stop_frac,
            "omega": args.omega,
            "c": args.c,
            "max_communities": args.max_communities,
        }),
        rng_seed: args.seed,
        input_digests: HashMap::from([(args.input.display().to_string(), digest)]),
        wall_secs: started.elapsed().as_secs_f64(),
        edge_touches: record.edge_touches,
    };
    write_manifest(&args.outdir.join("manifest.json"), &manifest)?;
    println!(
        "harvested {} communities, {} active edges left",
        record.communities.len(),
        record.remaining_edges
    );
    Ok(())
}

pub fn cmd_components(args: &ComponentsArgs) -> Result<(), CliError> {
    let g = load_graph(&args.input)?;
    let mask = EdgeMask::new_full(g.edge_count());
    let comps = directional_components(&g, &mask);
    let cover: LabelCover = comps
        .iter()
        .map(|c| (labels_of(&g, &c.s), labels_of(&g, &c.t)))
        .collect();
    match &args.out {
        Some(path) => write_truth(path, &cover)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for (s, t) in &cover {
                writeln!(lock, "S: {} | T: {}", s.join(" "), t.join(" "))
                    .map_err(io_err(Path::new("stdout")))?;
            }
        }
    }
    Ok(())
}

fn bench_params(preset: Preset, n: usize, k: f64, mu: f64, shuffle: bool, seed: u64) -> BenchParams {
    let mut p = match preset {
        Preset::Big => BenchParams::preset_big(k, mu, seed),
        Preset::Small => BenchParams::preset_small(k, mu, seed),
    };
    p.n = n;
    p.shuffle = shuffle;
    p
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let params = bench_params(args.preset, args.n, args.k, args.mu, args.shuffle, args.seed);
    let (g, truth) = generate(&params)?;
    let edges_path = args.out_prefix.with_extension("edges");
    let truth_path = args.out_prefix.with_extension("truth");
    write_edge_list(&edges_path, &g)?;
    let cover: LabelCover = truth
        .source_parts
        .iter()
        .zip(&truth.terminal_parts)
        .map(|(s, t)| (labels_of(&g, s), labels_of(&g, t)))
        .collect();
    write_truth(&truth_path, &cover)?;
    let manifest = RunManifest {
        command: "generate".into(),
        params: serde_json::json!({
            "preset": format!("{:?}", args.preset),
            "n": args.n,
            "k": args.k,
            "mu": args.mu,
            "shuffle": args.shuffle,
        }),
        rng_seed: args.seed,
        input_digests: HashMap::new(),
        wall_secs: started.elapsed().as_secs_f64(),
        edge_touches: 0,
    };
    write_manifest(&args.out_prefix.with_extension("manifest.json"), &manifest)?;
    println!(
        "generated {} nodes, {} edges, {} communities",
        g.node_count(),
        g.edge_count(),
        truth.source_parts.len()
    );
    Ok(())
}

/// Maps two label covers into one shared index space and returns
/// (source NMI, terminal NMI).
pub fn score_covers(
    found: &LabelCover,
    truth: &LabelCover,
    variant: NmiVariant,
) -> Result<(f64, f64), CliError> {
    let mut map: HashMap<String, usize> = HashMap::new();
    let get = |s: &String, map: &mut HashMap<String, usize>| -> usize {
        let next = map.len();
        *map.entry(s.clone()).or_insert(next)
    };
    let to_sets = |cover: &LabelCover, map: &mut HashMap<String, usize>| {
        let s: Vec<Vec<usize>> = cover
            .iter()
            .map(|(s, _)| s.iter().map(|l| get(l, map)).collect())
            .collect();
        let t: Vec<Vec<usize>> = cover
            .iter()
            .map(|(_, t)| t.iter().map(|l| get(l, map)).collect())
            .collect();
        (s, t)
    };
    let (fs, ft) = to_sets(found, &mut map);
    let (ts, tt) = to_sets(truth, &mut map);
    let n = map.len();
    let source = overlapping_nmi(&fs, &ts, n, variant)?;
    let terminal = overlapping_nmi(&ft, &tt, n, variant)?;
    Ok((source, terminal))
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let found = read_cover(&args.found)?;
    let truth = read_cover(&args.truth)?;
    let (source, terminal) = score_covers(&found, &truth, args.variant.into())?;
    println!("source_nmi {source:.6}");
    println!("terminal_nmi {terminal:.6}");
    println!("mean {:.6}", 0.5 * (source + terminal));
    Ok(())
}

pub fn cmd_scan(args: &ScanArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let digest = sha256_file(&args.input)?;
    let g = load_graph(&args.input)?;
    let points = submatrix_scan(&g, args.samples, args.omega, args.seed)?;
    let mut csv = String::from("sz,sigma1,is_component\n");
    for p in &points {
        csv.push_str(&format!(
            "{},{:.12},{}\n",
            p.sz,
            p.sigma1,
            if p.is_component { 1 } else { 0 }
        ));
    }
    fs::write(&args.out, csv).map_err(io_err(&args.out))?;
    let manifest = RunManifest {
        command: "scan".into(),
        params: serde_json::json!({
            "input": args.input,
            "samples": args.samples,
            "omega": args.omega,
        }),
        rng_seed: args.seed,
        input_digests: HashMap::from([(args.input.display().to_string(), digest)]),
        wall_secs: started.elapsed().as_secs_f64(),
        edge_touches: 0,
    };
    write_manifest(&args.out.with_extension("manifest.json"), &manifest)?;
    Ok(())
}

/// One benchmark cell of the accuracy grid.
#[derive(Debug, Clone, Copy)]
pub struct BenchCell {
    pub preset: Preset,
    pub k: f64,
    pub mu: f64,
}

fn default_cells() -> Vec<BenchCell> {
    let mut cells = Vec::new();
    for preset in [Preset::Big, Preset::Small] {
        for k in [5.0, 10.0, 20.0] {
            for mu in [0.05, 0.2, 0.4] {
                cells.push(BenchCell { preset, k, mu });
            }
        }
    }
    cells
}

fn parse_cell(s: &str) -> Result<BenchCell, CliError> {
    let bad = |detail: String| CliError::Format {
        path: PathBuf::from("--cells"),
        detail,
    };
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad(format!("expected preset:k:mu, got `{s}`")));
    }
    let preset = match parts[0] {
        "big" => Preset::Big,
        "small" => Preset::Small,
        other => return Err(bad(format!("unknown preset `{other}`"))),
    };
    let k: f64 = parts[1].parse().map_err(|_| bad(format!("bad k `{}`", parts[1])))?;
    let mu: f64 = parts[2].parse().map_err(|_| bad(format!("bad mu `{}`", parts[2])))?;
    Ok(BenchCell { preset, k, mu })
}

/// Simulation-protocol harvesting config: short grids, looser early stop,
/// capped at the planted community count.
pub fn simulation_config(penalty: Penalty, truth_count: usize, seed: u64) -> HarvestConfig<f64> {
    HarvestConfig {
        grid: match penalty {
            Penalty::L0 => grid_l0(6.0, 9.0, 24),
            Penalty::En => grid_en(1.0, 3.25, 24),
        },
        stop: EarlyStop { s_p: 1.05, s_l: 0.6 },
        opts: SolverOpts {
            max_sz: Some(400.0),
            ..SolverOpts::default()
        },
        stop_fraction: 0.0,
        max_communities: Some(truth_count),
        rng_seed: seed,
    }
}

/// Generates one instance, harvests it with the given penalty, and scores
/// the found cover against the planted one. Used by `bench` and by the
/// test suites.
pub fn bench_run(cell: BenchCell, penalty: Penalty, seed: u64) -> Result<f64, CliError> {
    let params = bench_params(cell.preset, 1000, cell.k, cell.mu, true, seed);
    let (g, truth) = generate(&params)?;
    let config = simulation_config(penalty, truth.source_parts.len(), seed);
    let record = harvest(&g, &config)?;
    accuracy_of(&record, &truth)
}

/// Mean of source-cover and terminal-cover NMI of a harvest against the
/// planted truth.
pub fn accuracy_of(record: &HarvestRecord<f64>, truth: &crate::benchgen::GroundTruth) -> Result<f64, CliError> {
    if record.communities.is_empty() {
        return Ok(0.0);
    }
    let n = truth
        .source_parts
        .iter()
        .flatten()
        .chain(truth.terminal_parts.iter().flatten())
        .max()
        .map_or(0, |&m| m + 1);
    let fs: Vec<Vec<usize>> = record
        .communities
        .iter()
        .map(|h| h.community.source().to_vec())
        .collect();
    let ft: Vec<Vec<usize>> = record
        .communities
        .iter()
        .map(|h| h.community.terminal().to_vec())
        .collect();
    let source = overlapping_nmi(&fs, &truth.source_parts, n, NmiVariant::Max)?;
    let terminal = overlapping_nmi(&ft, &truth.terminal_parts, n, NmiVariant::Max)?;
    Ok(0.5 * (source + terminal))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if let Ok(threads) = std::env::var("DIRCOM_BENCH_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    let cells = if args.cells.is_empty() {
        default_cells()
    } else {
        args.cells
            .iter()
            .map(|c| parse_cell(c))
            .collect::<Result<Vec<_>, _>>()?
    };
    let penalties: Vec<Penalty> = match args.penalty {
        PenaltyChoice::L0 => vec![Penalty::L0],
        PenaltyChoice::En => vec![Penalty::En],
        PenaltyChoice::Both => vec![Penalty::L0, Penalty::En],
    };
    let jobs: Vec<(usize, Penalty, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, _)| {
            penalties.iter().flat_map(move |&p| {
                (0..args.reps).map(move |r| (ci, p, r as u64))
            })
        })
        .collect();
    let results: Vec<((usize, Penalty), Result<f64, CliError>)> = jobs
        .par_iter()
        .map(|&(ci, p, r)| {
            let seed = args
                .seed
                .wrapping_mul(1_000_003)
                .wrapping_add(ci as u64 * 10_007 + r * 2 + matches!(p, Penalty::En) as u64);
            ((ci, p), bench_run(cells[ci], p, seed))
        })
        .collect();

    let mut by_cell: HashMap<(usize, Penalty), Vec<f64>> = HashMap::new();
    for (key, res) in results {
        by_cell.entry(key).or_default().push(res?);
    }

    let mut csv = String::from("penalty,preset,k,mu,mean,stderr,reps\n");
    for (ci, cell) in cells.iter().enumerate() {
        for &p in &penalties {
            let vals = &by_cell[&(ci, p)];
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = if vals.len() > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64
            } else {
                0.0
            };
            let stderr = (var / vals.len() as f64).sqrt();
            csv.push_str(&format!(
                "{},{:?},{},{},{mean:.4},{stderr:.4},{}\n",
                match p {
                    Penalty::L0 => "l0",
                    Penalty::En => "en",
                },
                cell.preset,
                cell.k,
                cell.mu,
                vals.len()
            ));
        }
    }
    fs::write(&args.out, &csv).map_err(io_err(&args.out))?;
    let manifest = RunManifest {
        command: "bench".into(),
        params: serde_json::json!({
            "reps": args.reps,
            "cells": args.cells,
            "penalty": format!("{:?}", args.penalty),
        }),
        rng_seed: args.seed,
        input_digests: HashMap::new(),
        wall_secs: started.elapsed().as_secs_f64(),
        edge_touches: 0,
    };
    write_manifest(&args.out.with_extension("manifest.json"), &manifest)?;
    Ok(())
}

/// Dispatches a parsed command; errors map to exit code 2 in `main`.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Harvest(a) => cmd_harvest(a),
        Command::Components(a) => cmd_components(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Bench(a) => cmd_bench(a),
    }
}
