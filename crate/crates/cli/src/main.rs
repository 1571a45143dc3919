use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use serde_json::json;

use coalforge_core::crtsim::{run_crt_fast, sample_reduced_tree, CrtParams, CrtRun};
use coalforge_core::events::EventLog;
use coalforge_core::harness::rng::{derive_seed, try_replicates};
use coalforge_core::harness::{run_experiment, suite, StatReport};
use coalforge_core::lambdasim::{run_lambda_chain, RateTable};
use coalforge_core::prunesim::{run_chain, ChainOptions};
use coalforge_core::specfun::{gf_phi, gf_psi, pgf_extract, series_law, LambdaMeasure, Marginal, DEFAULT_RADIUS};

#[derive(Parser)]
#[command(name = "coalforge", version, about = "Pruning constructions of the beta(3/2,1/2)-coalescent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merger rates λ_{b,k}, totals and merger-size probabilities for b ≤ n.
    Rates {
        #[arg(long)]
        n: u32,
        /// kingman, uniform or beta:A,B (unnormalized kernel).
        #[arg(long, default_value = "beta:1.5,0.5")]
        measure: LambdaMeasure,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the tree-pruning chain and write one event log per line.
    SimulatePrune {
        #[command(flatten)]
        run: RunArgs,
        /// Store the tree code after each event.
        #[arg(long)]
        record_trees: bool,
    },
    /// Run the Λ-coalescent jump chain from its rate table.
    SimulateLambda {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "beta:1.5,0.5")]
        measure: LambdaMeasure,
    },
    /// Sample reduced trees, run the mark process and write run summaries.
    SimulateCrt {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1000)]
        replicates: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV histogram (bin_low, bin_high, count) of `--stat`.
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CrtStat::U)]
        stat: CrtStat,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
    /// Evaluate or invert the generating functions of the last event.
    Gf {
        /// phi (law of B−E), e, b, b-e, psi or w.
        #[arg(long, default_value = "phi")]
        which: String,
        /// Extract p_0..=p_K.
        #[arg(long)]
        extract: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Evaluate Φ(ρ,ρ*) or Ψ(ρ,ρ0,ρ1) at comma-separated arguments.
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<f64>>,
    },
    /// Run acceptance presets and write their reports.
    Verify {
        /// all, criterion numbers or experiment names, comma separated.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override n, replicates or seed (single-experiment suites only).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        replicates: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Threshold override as CHECK=VALUE; repeatable.
        #[arg(long = "tolerance", value_parser = parse_override)]
        tolerances: Vec<(String, f64)>,
        /// Include wall-clock runtime in the reports.
        #[arg(long)]
        with_runtime: bool,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1000)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exponential waiting times (true) or jump-chain step indices (false).
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    timed: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV histogram (bin_low, bin_high, count) of the number of events.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CrtStat {
    U,
    V,
    W,
    L,
    H,
    X,
    Xp,
}

impl CrtStat {
    fn of(self, r: &CrtRun) -> f64 {
        match self {
            CrtStat::U => r.u as f64,
            CrtStat::V => r.v as f64,
            CrtStat::W => r.w as f64,
            CrtStat::L => r.l,
            CrtStat::H => r.h,
            CrtStat::X => r.x as f64,
            CrtStat::Xp => r.x_internal as f64,
        }
    }

    fn is_count(self) -> bool {
        !matches!(self, CrtStat::L | CrtStat::H)
    }
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected CHECK=VALUE")?;
    let v: f64 = v.parse().map_err(|_| format!("bad value `{v}`"))?;
    Ok((k.to_string(), v))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Unit-width bins for counts, `bins` equal bins otherwise.
fn write_histogram(path: &Path, values: &[f64], integer: bool, bins: usize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(w, "bin_low,bin_high,count")?;
    if values.is_empty() {
        return Ok(w.flush()?);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (start, width, count) = if integer {
        (lo, 1.0, (hi - lo) as usize + 1)
    } else {
        let bins = bins.max(1);
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        (lo, width, bins)
    };
    let mut counts = vec![0u64; count];
    for &v in values {
        let i = (((v - start) / width) as usize).min(count - 1);
        counts[i] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        let a = start + i as f64 * width;
        writeln!(w, "{a},{},{c}", a + width)?;
    }
    Ok(w.flush()?)
}

fn write_logs(logs: &[EventLog], out: Option<&Path>, histogram: Option<&Path>) -> Result<()> {
    let mut w = open_out(out)?;
    for log in logs {
        writeln!(w, "{}", log.to_json_line())?;
    }
    w.flush()?;
    let events: Vec<f64> = logs.iter().map(|l| l.collision_count() as f64).collect();
    if let Some(h) = histogram {
        write_histogram(h, &events, true, 0)?;
    }
    let mean = events.iter().sum::<f64>() / events.len().max(1) as f64;
    eprintln!("{} runs, mean number of events {mean:.4}", logs.len());
    Ok(())
}

fn simulate_prune(run: &RunArgs, record_trees: bool) -> Result<()> {
    let opts = ChainOptions {
        timed: run.timed,
        record_trees,
    };
    let n = run.n as usize;
    let logs = try_replicates(run.seed, run.replicates, |i, rng| {
        run_chain(n, rng, opts).map(|mut log| {
            log.seed = derive_seed(run.seed, i);
            log
        })
    })?;
    write_logs(&logs, run.out.as_deref(), run.histogram.as_deref())
}

fn simulate_lambda(run: &RunArgs, measure: LambdaMeasure) -> Result<()> {
    let table = RateTable::build(measure, run.n.max(2))?;
    let logs = try_replicates(run.seed, run.replicates, |i, rng| {
        run_lambda_chain(run.n, &table, rng, run.timed).map(|mut log| {
            log.seed = derive_seed(run.seed, i);
            log
        })
    })?;
    write_logs(&logs, run.out.as_deref(), run.histogram.as_deref())
}

#[allow(clippy::too_many_arguments)]
fn simulate_crt(
    n: u32,
    replicates: u64,
    seed: u64,
    alpha: f64,
    out: Option<&Path>,
    histogram: Option<&Path>,
    stat: CrtStat,
    bins: usize,
) -> Result<()> {
    let params = CrtParams::new(alpha)?;
    let runs = try_replicates(seed, replicates, |i, rng| {
        let tree = sample_reduced_tree(n as usize, rng)?;
        run_crt_fast(&tree, params, rng).map(|mut r| {
            r.seed = derive_seed(seed, i);
            r
        })
    })?;
    let mut w = open_out(out)?;
    for r in &runs {
        writeln!(w, "{}", serde_json::to_string(r)?)?;
    }
    w.flush()?;
    if let Some(h) = histogram {
        let values: Vec<f64> = runs.iter().map(|r| stat.of(r)).collect();
        write_histogram(h, &values, stat.is_count(), bins)?;
    }
    Ok(())
}

fn gf(which: &str, extract: Option<usize>, radius: f64, tolerance: f64, at: Option<Vec<f64>>) -> Result<()> {
    let key = which.to_ascii_lowercase();
    if let Some(args) = at {
        let value = match (key.as_str(), args.as_slice()) {
            ("phi", [r, rs]) => gf_phi(*r, *rs)?,
            ("psi", [r, r0, r1]) => gf_psi(*r, *r0, *r1)?,
            _ => bail!("--at takes ρ,ρ* for phi and ρ,ρ0,ρ1 for psi"),
        };
        println!("{}", json!({ "which": key, "at": args, "value": value }));
    }
    let Some(k) = extract else {
        return Ok(());
    };
    let marginal = Marginal::parse(&key)?;
    // contour inversion first; the exact series where round-off defeats it
    let row = match pgf_extract(|z| marginal.pgf(z), k, radius, tolerance) {
        Ok(ex) => json!({
            "marginal": marginal.name(),
            "method": "contour",
            "radius": ex.radius,
            "points": ex.points,
            "error_estimate": ex.error_estimate,
            "probs": ex.probs,
        }),
        Err(err) => json!({
            "marginal": marginal.name(),
            "method": "series",
            "contour_failure": err.to_string(),
            "probs": series_law(marginal, k)?,
        }),
    };
    println!("{row}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    selection: &str,
    out: Option<&Path>,
    n: Option<u32>,
    replicates: Option<u64>,
    seed: Option<u64>,
    tolerances: Vec<(String, f64)>,
    with_runtime: bool,
) -> Result<bool> {
    let mut configs = suite(selection)?;
    let overriding = n.is_some() || replicates.is_some() || seed.is_some();
    if overriding && configs.len() != 1 {
        bail!("--n, --replicates and --seed apply to single-experiment suites only");
    }
    for c in &mut configs {
        c.n = n.unwrap_or(c.n);
        c.replicates = replicates.unwrap_or(c.replicates);
        c.seed = seed.unwrap_or(c.seed);
        c.tolerances.extend(tolerances.iter().cloned());
    }
    let mut reports: Vec<StatReport> = Vec::with_capacity(configs.len());
    for c in &configs {
        let start = Instant::now();
        let mut r = run_experiment(c)?;
        let ms = start.elapsed().as_millis() as u64;
        eprint!("{r}");
        eprintln!("    runtime {ms} ms");
        if with_runtime {
            r.runtime_ms = Some(ms);
        }
        reports.push(r);
    }
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, &reports)?;
    writeln!(w)?;
    w.flush()?;
    let passed = reports.iter().filter(|r| r.pass).count();
    eprintln!("{passed}/{} passed", reports.len());
    Ok(passed == reports.len())
}

fn rates(n: u32, measure: LambdaMeasure, out: Option<&Path>) -> Result<()> {
    let table = RateTable::build(measure, n)?;
    let mut w = open_out(out)?;
    for b in 2..=n {
        let rates: Vec<f64> = (2..=b).map(|k| table.rate(b, k)).collect();
        let probs: Vec<f64> = (2..=b).map(|k| table.merger_probability(b, k)).collect();
        let row = json!({
            "measure": measure.to_string(),
            "b": b,
            "total": table.total(b),
            "rates": rates,
            "merger_probabilities": probs,
        });
        writeln!(w, "{row}")?;
    }
    Ok(w.flush()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Rates { n, measure, out } => rates(n, measure, out.as_deref()).map(|()| true),
        Command::SimulatePrune { run, record_trees } => simulate_prune(&run, record_trees).map(|()| true),
        Command::SimulateLambda { run, measure } => simulate_lambda(&run, measure).map(|()| true),
        Command::SimulateCrt {
            n,
            replicates,
            seed,
            alpha,
            out,
            histogram,
            stat,
            bins,
        } => simulate_crt(n, replicates, seed, alpha, out.as_deref(), histogram.as_deref(), stat, bins).map(|()| true),
        Command::Gf {
            which,
            extract,
            radius,
            tolerance,
            at,
        } => gf(&which, extract, radius, tolerance, at).map(|()| true),
        Command::Verify {
            suite,
            out,
            n,
            replicates,
            seed,
            tolerances,
            with_runtime,
        } => verify(&suite, out.as_deref(), n, replicates, seed, tolerances, with_runtime),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        // a verification ran but did not pass
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
