//! Command line front end. Exit codes: 0 ok, 1 internal error, 2 usage or
//! input error.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::aggregation::{knapsack_instance, path_decomposition, powers, AggregationInstance};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::estimator::rank_decompositions;
use crate::fixed;
use crate::gen;
use crate::oracle;
use crate::pareto::ParetoFront;
use crate::solve::{solve_aggregation, solve_mst, solve_stcut, solve_text, solve_tsp, ProblemKind, Solved};
use crate::stcut::CutInstance;
use crate::store::{self, ProvenanceLog, Reconstructor, Store};
use crate::td::{min_degree_decomposition, Graph, TreeDecomposition};

#[derive(Debug, Parser)]
#[command(name = "tdpareto", version, about = "Exact Pareto sets over tree decompositions")]
pub struct Cli {
    /// TOML run configuration; command line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write its Pareto front.
    Solve(SolveArgs),
    /// Rank tree decompositions by estimated time and storage.
    Estimate(EstimateArgs),
    /// Write the element set of every root front entry of a solved store.
    Reconstruct(ReconstructArgs),
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Brute-force front of a small instance.
    Oracle(OracleArgs),
    /// Solve seeded random instances and print one JSON line per run.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: Option<ProblemKind>,
    /// Graph file (`p mo` format), or instance JSON for aggregation.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Aggregation instance JSON.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Tree decomposition (`.td`); a min-degree decomposition is used when absent.
    #[arg(long)]
    pub td: Option<PathBuf>,
    /// Store directory; the run is kept in memory when absent.
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Front file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    /// Line-delimited JSON statistics.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Writes `<PREFIX>.svg` and `<PREFIX>.csv`.
    #[arg(long, value_name = "PREFIX")]
    pub plot: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Disk budget in bytes before the log is pruned.
    #[arg(long)]
    pub max_disk: Option<u64>,
    #[arg(long, value_enum)]
    pub heuristic: Option<Switch>,
    #[arg(long, value_enum)]
    pub fusion: Option<Switch>,
    /// 1-based bag id used as root.
    #[arg(long)]
    pub root: Option<usize>,
    #[arg(long)]
    pub optimize_root: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub td_dir: PathBuf,
    /// s-t cut graph the decompositions must cover.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub optimize_root: bool,
    #[arg(long, value_enum, default_value = "on")]
    pub fusion: Switch,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Compact the log before reconstructing.
    #[arg(long)]
    pub prune_first: bool,
    /// Clear leftovers of an interrupted prune before opening.
    #[arg(long)]
    pub recover: bool,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Aggregation instance encoding a bicriteria knapsack.
    Knapsack(KnapsackArgs),
}

#[derive(Debug, Args)]
pub struct KnapsackArgs {
    #[arg(short, long)]
    pub n: Option<usize>,
    /// Profits and weights 2^0 .. 2^(n-1).
    #[arg(long, conflicts_with_all = ["profits", "weights"])]
    pub powers: bool,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub profits: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub weights: Vec<f64>,
    /// Seed for random items in (0, 100] when neither list nor `--powers` is given.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a path decomposition of the instance.
    #[arg(long)]
    pub td: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    #[arg(long, value_delimiter = ',', default_value = "8,12,16")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub heuristic: Option<Switch>,
}

fn parse_problem(s: &str) -> std::result::Result<ProblemKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parse arguments, run, and return the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.cmd {
        Command::Solve(a) => {
            apply_solve_args(&mut cfg, a);
            cfg.validate()?;
            with_pool(cfg.threads, || cmd_solve(&cfg))
        }
        Command::Estimate(a) => with_pool(cfg.threads, || cmd_estimate(&a)),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Gen(GenCommand::Knapsack(a)) => cmd_gen_knapsack(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Bench(a) => {
            if let Some(t) = a.threads {
                cfg.threads = t;
            }
            if let Some(h) = a.heuristic {
                cfg.heuristic.enabled = h == Switch::On;
            }
            cfg.validate()?;
            with_pool(cfg.threads, || cmd_bench(&a, &cfg))
        }
    }
}

fn apply_solve_args(cfg: &mut RunConfig, a: SolveArgs) {
    macro_rules! set {
        ($($f:ident),*) => { $(if a.$f.is_some() { cfg.$f = a.$f; })* };
    }
    set!(problem, td, store, out, solutions, stats, plot, max_disk, root);
    if let Some(g) = a.instance.or(a.graph) {
        cfg.graph = Some(g);
    }
    if let Some(t) = a.threads {
        cfg.threads = t;
    }
    if let Some(h) = a.heuristic {
        cfg.heuristic.enabled = h == Switch::On;
    }
    if let Some(f) = a.fusion {
        cfg.fusion = f == Switch::On;
    }
    cfg.optimize_root |= a.optimize_root;
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Store(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Front file: `#` header lines with the problem and offset, then the front.
pub fn front_file<P>(problem: ProblemKind, offset: &[i64], front: &ParetoFront<P>) -> String {
    let off: Vec<String> = offset.iter().map(|&v| fixed::format(v)).collect();
    format!("# problem {problem}\n# offset {}\n{}", off.join(" "), front.to_text())
}

fn plain_edges(g: &Graph) -> Vec<(u32, u32)> {
    g.edges.iter().map(|e| (e.u, e.v)).collect()
}

fn cut_edges(g: &Graph) -> Result<Vec<(u32, u32)>> {
    Ok(CutInstance::from_graph(g)?.inner_edges())
}

/// Solve `problem` on the input at `input` into `store`.
pub fn solve_file(
    problem: ProblemKind,
    input: &Path,
    td: Option<&Path>,
    cfg: &RunConfig,
    store: &mut Store,
) -> Result<Solved> {
    let text = read(input)?;
    let td_text = td.map(read).transpose()?;
    solve_text(problem, &text, td_text.as_deref(), &cfg.solve_options(), store)
}

fn dim_of(problem: ProblemKind, input: &Path) -> Result<usize> {
    Ok(match problem {
        ProblemKind::Aggregation => 2,
        _ => Graph::parse(&read(input)?)?.dim,
    })
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<()> {
    let problem = cfg
        .problem
        .ok_or_else(|| Error::Usage("--problem is required".into()))?;
    let input = cfg
        .graph
        .as_deref()
        .ok_or_else(|| Error::Usage("--graph or --instance is required".into()))?;
    let dim = dim_of(problem, input)?;
    let mut store = match &cfg.store {
        Some(dir) => Store::create(dir, dim)?,
        None => Store::in_memory(dim),
    };
    let started = Instant::now();
    let solved = solve_file(problem, input, cfg.td.as_deref(), cfg, &mut store)?;
    let millis = started.elapsed().as_secs_f64() * 1e3;
    emit(
        cfg.out.as_deref(),
        &front_file(problem, &store.meta.offset, &solved.front),
    )?;
    if let Some(p) = &cfg.solutions {
        write_solutions(&mut store, &solved.front, p)?;
    }
    if let Some(p) = &cfg.stats {
        write_stats(p, problem, cfg, &solved, millis)?;
    }
    if let Some(prefix) = &cfg.plot {
        write(&prefix.with_extension("csv"), &solved.front.to_csv())?;
        write(&prefix.with_extension("svg"), &scatter_svg(&solved.front))?;
    }
    Ok(())
}

fn write_stats(path: &Path, problem: ProblemKind, cfg: &RunConfig, s: &Solved, millis: f64) -> Result<()> {
    let mut out = String::new();
    let tagged = |event: &str, v: Value| -> Value {
        let mut v = v;
        if let Value::Object(m) = &mut v {
            m.insert("event".into(), json!(event));
        }
        v
    };
    for n in &s.stats.nodes {
        let _ = writeln!(out, "{}", tagged("node", serde_json::to_value(n)?));
    }
    for p in &s.stats.prunes {
        let _ = writeln!(out, "{}", tagged("prune", serde_json::to_value(p)?));
    }
    let j = s.stats.joins();
    let summary = json!({
        "event": "summary",
        "problem": problem.to_string(),
        "root": s.root + 1,
        "nice_nodes": s.nodes,
        "front_size": s.front.len(),
        "pairs": j.pairs.to_string(),
        "skipped": j.skipped.to_string(),
        "skip_fraction": j.skip_fraction(),
        "peak_disk": s.stats.peak_disk,
        "prunes": s.stats.prunes.len(),
        "threads": cfg.threads,
        "heuristic": cfg.heuristic.enabled,
        "fusion": cfg.fusion,
        "millis": millis,
    });
    let _ = writeln!(out, "{summary}");
    write(path, &out)
}

fn element_name(labels: &[String], id: u64) -> String {
    match labels.get(id as usize) {
        Some(l) if !l.is_empty() => l.clone(),
        _ => id.to_string(),
    }
}

/// Stream `sol <i>: <elements>` lines for every entry of `front`.
pub fn stream_solutions(store: &mut Store, front: &ParetoFront, w: &mut dyn Write) -> Result<()> {
    let labels = store.meta.labels.clone();
    let mut r = Reconstructor::new(&mut store.log, &store.meta.skip_bags).with_cache(1 << 16);
    let io = |e| Error::Store(format!("writing solutions: {e}"));
    for (i, &id) in front.payloads().enumerate() {
        let elems = r.elements(id)?;
        let names: Vec<String> = elems.iter().map(|&e| element_name(&labels, e)).collect();
        writeln!(w, "sol {}: {}", i + 1, names.join(" ")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_solutions(store: &mut Store, front: &ParetoFront, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    stream_solutions(store, front, &mut BufWriter::new(file))
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    if a.recover {
        let mut log = ProvenanceLog::open(&a.store.join("origin.bin"))?;
        let cleared = store::recover(&mut log)?;
        eprintln!("recovered: cleared {cleared} marks");
    }
    let mut st = Store::open(&a.store)?;
    if a.prune_first {
        let rep = st.prune()?;
        st.write_meta()?;
        eprintln!("pruned: {} -> {} records", rep.records_before, rep.records_after);
    }
    let front = st.root_front()?;
    match &a.out {
        Some(p) => write_solutions(&mut st, &front, p),
        None => stream_solutions(&mut st, &front, &mut BufWriter::new(std::io::stdout().lock())),
    }
}

pub fn cmd_estimate(a: &EstimateArgs) -> Result<()> {
    let rd = fs::read_dir(&a.td_dir).map_err(|e| Error::io(&a.td_dir, e))?;
    let mut paths: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "td"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Usage(format!("no .td files in {}", a.td_dir.display())));
    }
    let graph = match &a.graph {
        Some(p) => {
            let g = Graph::parse(&read(p)?)?;
            Some((g.n, cut_edges(&g)?))
        }
        None => None,
    };
    let mut tds = Vec::with_capacity(paths.len());
    for p in &paths {
        let td = TreeDecomposition::parse(&read(p)?).map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?;
        if let Some((n, edges)) = &graph {
            td.validate(*n, edges.iter().copied())
                .map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?;
        }
        let name = p
            .file_name()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        tds.push((name, td));
    }
    print!(
        "{}",
        estimate_table(&rank_decompositions(&tds, a.optimize_root, a.fusion == Switch::On)?)
    );
    Ok(())
}

pub fn estimate_table(ranked: &[crate::estimator::Candidate]) -> String {
    let mut out = String::from("name\troot\testmTime\testmStorage\tscore\n");
    for c in ranked {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.3}\t{:.3}\t{:.6}",
            c.name,
            c.root + 1,
            c.time,
            c.storage,
            c.score
        );
    }
    out
}

pub fn cmd_gen_knapsack(a: &KnapsackArgs) -> Result<()> {
    let (profits, weights) = if a.powers {
        let n = a.n.ok_or_else(|| Error::Usage("--powers needs -n".into()))?;
        powers(n)
    } else if !a.profits.is_empty() || !a.weights.is_empty() {
        if a.profits.len() != a.weights.len() {
            return Err(Error::Usage("--profits and --weights differ in length".into()));
        }
        if a.n.is_some_and(|n| n != a.profits.len()) {
            return Err(Error::Usage("-n disagrees with the item lists".into()));
        }
        (a.profits.clone(), a.weights.clone())
    } else {
        let n = a.n.ok_or_else(|| Error::Usage("-n is required".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let mut draw = || 100.0 - rng.gen_range(0.0..100.0);
        let p: Vec<f64> = (0..n).map(|_| draw()).collect();
        let w: Vec<f64> = (0..n).map(|_| draw()).collect();
        (p, w)
    };
    let inst = knapsack_instance(&profits, &weights)?;
    emit(a.out.as_deref(), &inst.to_json())?;
    if let Some(p) = &a.td {
        write(p, &path_decomposition(profits.len()).to_text())?;
    }
    Ok(())
}

pub fn cmd_oracle(a: &OracleArgs) -> Result<()> {
    let text = read(&a.graph)?;
    let (res, offset) = match a.problem {
        ProblemKind::Aggregation => {
            let inst = AggregationInstance::from_json(&text)?;
            let offset = inst.build_cut_graph().offset.to_vec();
            (oracle::brute_aggregation(&inst)?, offset)
        }
        p => {
            let g = Graph::parse(&text)?;
            let r = match p {
                ProblemKind::Stcut => oracle::brute_cuts(&g)?,
                ProblemKind::Mst => oracle::brute_mst(&g)?,
                _ => oracle::brute_tsp(&g)?,
            };
            let dim = g.dim;
            (r, vec![0; dim])
        }
    };
    emit(a.out.as_deref(), &front_file(a.problem, &offset, &res.front()))
}

pub fn cmd_bench(a: &BenchArgs, cfg: &RunConfig) -> Result<()> {
    if a.dim == 0 || !(0.0..=1.0).contains(&a.density) {
        return Err(Error::Usage("need dim >= 1 and density in [0, 1]".into()));
    }
    let opts = cfg.solve_options();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for &n in &a.sizes {
        for rep in 0..a.count {
            let mut store = Store::in_memory(a.dim);
            let started = Instant::now();
            let (solved, width) = match a.problem {
                ProblemKind::Stcut => {
                    let g = gen::cut_graph(&mut rng, n, a.dim, a.density);
                    let td = min_degree_decomposition(n, cut_edges(&g)?);
                    (solve_stcut(&g, &td, &opts, &mut store)?, td.width())
                }
                ProblemKind::Mst => {
                    let g = gen::connected_graph(&mut rng, n, a.dim, a.density);
                    let td = min_degree_decomposition(n, plain_edges(&g));
                    (solve_mst(&g, &td, &opts, &mut store)?, td.width())
                }
                ProblemKind::Tsp => {
                    let g = gen::tour_graph(&mut rng, n.max(3), a.dim, a.density, true);
                    let td = min_degree_decomposition(g.n, plain_edges(&g));
                    (solve_tsp(&g, &td, &opts, &mut store)?, td.width())
                }
                ProblemKind::Aggregation => {
                    let items: Vec<f64> = (0..n).map(|_| 100.0 - rng.gen_range(0.0..100.0)).collect();
                    let weights: Vec<f64> = (0..n).map(|_| 100.0 - rng.gen_range(0.0..100.0)).collect();
                    let inst = knapsack_instance(&items, &weights)?;
                    let td = path_decomposition(n);
                    (solve_aggregation(&inst, &td, &opts, &mut store)?, td.width())
                }
            };
            let j = solved.stats.joins();
            println!(
                "{}",
                json!({
                    "problem": a.problem.to_string(),
                    "n": n,
                    "rep": rep,
                    "dim": a.dim,
                    "width": width,
                    "front_size": solved.front.len(),
                    "nice_nodes": solved.nodes,
                    "pairs": j.pairs.to_string(),
                    "skip_fraction": j.skip_fraction(),
                    "peak_disk": solved.stats.peak_disk,
                    "millis": started.elapsed().as_secs_f64() * 1e3,
                })
            );
        }
    }
    Ok(())
}

/// Scatter plot of the first two objectives.
pub fn scatter_svg<P>(front: &ParetoFront<P>) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const M: f64 = 40.0;
    let pts: Vec<(f64, f64)> = front
        .costs()
        .map(|c| {
            let x = fixed::to_f64(c.first().copied().unwrap_or(0));
            let y = fixed::to_f64(c.get(1).copied().unwrap_or(0));
            (x, y)
        })
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let sx = if x1 > x0 { (W - 2.0 * M) / (x1 - x0) } else { 0.0 };
    let sy = if y1 > y0 { (H - 2.0 * M) / (y1 - y0) } else { 0.0 };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{r}\" y=\"{t}\" font-size=\"12\" text-anchor=\"end\">f1</text>\n\
         <text x=\"4\" y=\"{M}\" font-size=\"12\">f2</text>\n",
        b = H - M,
        r = W - M,
        t = H - 10.0,
    );
    for &(x, y) in &pts {
        let cx = if sx > 0.0 { M + (x - x0) * sx } else { W / 2.0 };
        let cy = if sy > 0.0 { H - M - (y - y0) * sy } else { H / 2.0 };
        let _ = writeln!(
            out,
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"2.5\" fill=\"steelblue\"/>"
        );
    }
    out.push_str("</svg>\n");
    out
}
