use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kpower_core::density::{phi, LOG_TOLERANCE};
use kpower_core::harness::read_records;
use kpower_core::pipeline::oracle_certificate;
use kpower_core::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "kpower", version, about = "Powers of Hamilton cycles in random graphs")]
struct Cli {
    /// Base seed for every randomised step.
    #[arg(long, global = true, env = "KPOWER_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (directory for `sweep`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw random graphs.
    #[command(subcommand)]
    Sample(SampleCmd),
    /// Build or check absorbers.
    #[command(subcommand)]
    Absorber(AbsorberCmd),
    /// Exact densities and moment minima.
    #[command(subcommand)]
    Density(DensityCmd),
    /// Link pairs of endsequences in a host graph.
    Link(LinkArgs),
    /// Pack disjoint copies of a pattern.
    Factor(FactorArgs),
    /// Run the full multi-round construction on `G(n,p)`.
    Solve(SolveArgs),
    /// Exhaustive search on a small host.
    Oracle(OracleArgs),
    /// Threshold sweep from a JSON spec.
    Sweep(SweepArgs),
    /// Re-run stored trial records and compare.
    Replay(ReplayArgs),
}

#[derive(Subcommand)]
enum SampleCmd {
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Subcommand)]
enum AbsorberCmd {
    Build {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
    },
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exhaustive,
    Parametric,
}

#[derive(Subcommand)]
enum DensityCmd {
    D1max(DensityArgs),
    D2max(DensityArgs),
    Phi {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        /// Minimise over subpatterns with at least one vertex instead of one edge.
        #[arg(long)]
        vertex: bool,
    },
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "parametric")]
    method: MethodArg,
}

#[derive(Args)]
struct LinkArgs {
    #[arg(long)]
    host: PathBuf,
    /// Lines of `2k` vertex ids: `A` then `B`.
    #[arg(long)]
    pairs: PathBuf,
    /// Total linkage length, endsequences included.
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
}

#[derive(Args)]
struct FactorArgs {
    #[arg(long)]
    host: PathBuf,
    /// `pathpower:r,k` or `absorber:j,l,k`.
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, default_value_t = 8)]
    restarts: u32,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    k: Option<usize>,
    /// Pipeline config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the certificate line to this file.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Leave the trace out of the output.
    #[arg(long)]
    brief: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// Check this certificate file instead of searching.
    #[arg(long)]
    check: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    /// A `records.jsonl` file or a single JSON record.
    #[arg(long = "in")]
    input: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<SimpleGraph> {
    Ok(SimpleGraph::from_text(&read(path)?)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(v)?)
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Exhaustive => Method::Exhaustive,
        MethodArg::Parametric => Method::Parametric,
    }
}

fn parse_pattern(spec: &str) -> Result<SimpleGraph> {
    let (kind, args) = spec.split_once(':').context("pattern must look like kind:a,b")?;
    let nums: Vec<usize> = args
        .split(',')
        .map(|x| x.trim().parse().context("pattern arguments must be integers"))
        .collect::<Result<_>>()?;
    match (kind, nums.as_slice()) {
        ("pathpower", [r, k]) => Ok(make_path_power(*r, *k)?),
        ("absorber", [j, l, k]) => Ok(build_absorber(AbsorberParams::new(*j, *l, *k)?)?.graph),
        _ => bail!("unknown pattern {spec:?}; use pathpower:r,k or absorber:j,l,k"),
    }
}

fn read_pairs(path: &Path) -> Result<SequencePairFamily> {
    let rows: Vec<Vec<usize>> = read(path)?
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|x| x.parse().context("pair lines hold vertex ids"))
                .collect()
        })
        .collect::<Result<_>>()?;
    let width = rows.first().map_or(0, Vec::len);
    if width == 0 || !width.is_multiple_of(2) {
        bail!("pair lines must hold 2k vertex ids");
    }
    Ok(SequencePairFamily::from_rows(&rows, width / 2)?)
}

fn density_max(out: &Option<PathBuf>, args: &DensityArgs, two: bool) -> Result<()> {
    let g = read_graph(&args.input)?;
    let m = method(args.method);
    let r = if two { d2_max(&g, m)? } else { d1_max(&g, m)? };
    emit_json(out, &json!({ "value": r.value.to_string(), "witness": r.witness }))
}

fn run(cli: Cli) -> Result<bool> {
    let out = &cli.out;
    match cli.cmd {
        Cmd::Sample(SampleCmd::Gnp { n, p }) => {
            emit(out, &sample_gnp(n, p, cli.seed)?.to_text())?;
        }
        Cmd::Absorber(AbsorberCmd::Build { j, l, k }) => {
            emit(out, &build_absorber(AbsorberParams::new(j, l, k)?)?.to_text())?;
        }
        Cmd::Absorber(AbsorberCmd::Verify { input }) => {
            let a = Absorber::from_text(&read(&input)?)?;
            let report = verify_absorber(&a);
            emit_json(out, &json!({ "passed": report.all_passed(), "checks": report.checks }))?;
            return Ok(report.all_passed());
        }
        Cmd::Density(DensityCmd::D1max(args)) => density_max(out, &args, false)?,
        Cmd::Density(DensityCmd::D2max(args)) => density_max(out, &args, true)?,
        Cmd::Density(DensityCmd::Phi { pattern, n0, n, t, k, p, vertex }) => {
            let h = LabeledMultigraph::from_text(&read(&pattern)?)?;
            if h.k() != k {
                bail!("pattern file declares k = {}, --k is {k}", h.k());
            }
            let model = MomentModel::new(n0, n, t, p)?;
            let variant = if vertex { PhiVariant::Vertex } else { PhiVariant::Edge };
            let (value, sub) = phi(&h, &model, variant)?;
            emit_json(
                out,
                &json!({
                    "value": value,
                    "tolerance": LOG_TOLERANCE,
                    "witness": { "vertices": sub.vertices, "edges": sub.edges },
                }),
            )?;
        }
        Cmd::Link(a) => {
            let host = read_graph(&a.host)?;
            let family = read_pairs(&a.pairs)?;
            let pool = VertexSet::full(host.n());
            let part = find_partial_linkage(&host, &family, a.s, a.budget, &pool, cli.seed);
            part.audit(&host, &family, a.s).map_err(anyhow::Error::msg)?;
            let links: Vec<Value> = part
                .linkages
                .iter()
                .zip(&part.linked_indices)
                .map(|(l, i)| json!({ "pair": i, "order": l.order() }))
                .collect();
            emit_json(out, &json!({ "pairs": family.len(), "linked": links.len(), "linkages": links }))?;
            return Ok(links.len() == family.len());
        }
        Cmd::Factor(a) => {
            let host = read_graph(&a.host)?;
            let pattern = parse_pattern(&a.pattern)?;
            let budget = EmbeddingBudget::new(a.budget, a.restarts, cli.seed)?;
            let copies = find_disjoint_copies(&host, &pattern, a.count, &budget, &VertexSet::new(host.n()))?;
            emit_json(out, &serde_json::to_value(&copies)?)?;
            return Ok(copies.shortfall == 0);
        }
        Cmd::Solve(a) => {
            let mut cfg = match &a.config {
                Some(p) => PipelineConfig::from_json(&read(p)?)?,
                None => PipelineConfig::default(),
            };
            if let Some(k) = a.k {
                cfg.k = k;
            }
            cfg.seed = cli.seed;
            let res = solve(a.n, a.p, &cfg)?;
            let cert = match &res.outcome {
                Outcome::Success { certificate } => Some(certificate.clone()),
                Outcome::Failure { .. } => None,
            };
            if let (Some(path), Some(c)) = (&a.certificate, &cert) {
                fs::write(path, c.to_line() + "\n")?;
            }
            let mut v = json!({ "outcome": res.outcome, "certificate": cert.as_ref().map(|c| &c.cyclic_order) });
            if !a.brief {
                v["trace"] = serde_json::to_value(&res.trace)?;
            }
            emit_json(out, &v)?;
            return Ok(cert.is_some());
        }
        Cmd::Oracle(a) => {
            let host = read_graph(&a.input)?;
            if let Some(path) = a.check {
                let line = read(&path)?;
                let cert = HamiltonPowerCertificate::from_line(line.trim(), a.k)?;
                let ok = verify_certificate(&host, &cert)?;
                emit_json(out, &json!({ "valid": ok }))?;
                return Ok(ok);
            }
            let found = oracle_certificate(&host, a.k)?;
            emit_json(
                out,
                &json!({ "contains": found.is_some(), "certificate": found.as_ref().map(|c| c.to_line()) }),
            )?;
        }
        Cmd::Sweep(a) => {
            let mut spec: SweepSpec = serde_json::from_str(&read(&a.spec)?)?;
            if cli.threads.is_some() {
                spec.threads = cli.threads;
            }
            let dir = out.clone().unwrap_or_else(|| PathBuf::from("sweep-out"));
            let res = run_sweep(&spec, &dir)?;
            for agg in &res.aggregates {
                println!(
                    "n={} p={} successes={}/{} rate={:.3} [{:.3}, {:.3}]",
                    agg.n, agg.p, agg.successes, agg.trials, agg.success_rate, agg.wilson_low, agg.wilson_high
                );
            }
            println!("wrote {}", dir.display());
        }
        Cmd::Replay(a) => {
            let text = read(&a.input)?;
            let records = match serde_json::from_str::<TrialRecord>(&text) {
                Ok(r) => vec![r],
                Err(_) => read_records(&a.input)?,
            };
            let mut mismatched = Vec::new();
            for r in &records {
                if !r.same_result(&replay(r)?) {
                    mismatched.push(json!({ "n": r.n, "p": r.p, "trial": r.trial, "seed": r.seed }));
                }
            }
            emit_json(out, &json!({ "replayed": records.len(), "mismatched": mismatched }))?;
            return Ok(mismatched.is_empty());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
