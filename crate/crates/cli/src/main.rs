//! Experiment harness for the backyard dictionaries.

mod report;

use backyard::backyard::{BackyardParams, CuckooMode, Overrides, DEFAULT_C};
use backyard::bins::BinMode;
use backyard::experiments::{self, FirstLevelMap, Target, REPORT_SCHEMA};
use backyard::permutations::PermMode;
use backyard::succinct::{compact_perm_mode, nr_mode, BinBackend, SuccinctParams, DEFAULT_GAMMA};
use clap::{Parser, ValueEnum};
use report::{trial_seed, Report, Row, Summary};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    OpsFuzz,
    OverflowStats,
    QueueStats,
    SpaceAudit,
    Fpr,
    Bench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DictKind {
    Backyard,
    Succinct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BinsArg {
    Plain,
    Phf,
    /// Subset ranks (succinct dictionary only).
    Ranked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CuckooArg {
    Functions,
    Permutations,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PermArg {
    Auto,
    TrulyRandom,
    Nr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "backyard",
    version,
    about = "Measure the backyard dictionaries"
)]
struct Cli {
    #[arg(long, value_enum)]
    cmd: Command,
    /// Capacity (number of keys).
    #[arg(long)]
    n: Option<u64>,
    /// Universe size.
    #[arg(long)]
    u: Option<u64>,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Filter false-positive target.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_C)]
    c: f64,
    /// Cuckoo moves per operation.
    #[arg(long = "L")]
    moves: Option<u32>,
    /// Bin work steps per operation.
    #[arg(long = "Lbin")]
    bin_steps: Option<u32>,
    /// Comma-separated seeds or ranges, e.g. `1,2,10..20`.
    #[arg(long, env = "BACKYARD_SEED", default_value = "0")]
    seeds: String,
    /// Trials per seed.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Operations per fuzz run, or queries per filter trial.
    #[arg(long)]
    ops: Option<u64>,
    #[arg(long, value_enum, default_value = "backyard")]
    dict: DictKind,
    /// Outer split exponent of the succinct dictionary.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "mode-bins", value_enum)]
    mode_bins: Option<BinsArg>,
    #[arg(long = "mode-cuckoo", value_enum, default_value = "functions")]
    mode_cuckoo: CuckooArg,
    #[arg(long = "mode-perm", value_enum, default_value = "auto")]
    mode_perm: PermArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Treat statistical exceedances as failures.
    #[arg(long)]
    strict: bool,
}

/// Echo of the effective configuration.
#[derive(Serialize)]
struct Config {
    n: Option<u64>,
    u: Option<u64>,
    eps: f64,
    delta: f64,
    c: f64,
    moves: Option<u32>,
    bin_steps: Option<u32>,
    seeds: Vec<u64>,
    trials: u64,
    ops: Option<u64>,
    dict: DictKind,
    gamma: Option<f64>,
    mode_bins: Option<BinsArg>,
    mode_cuckoo: CuckooArg,
    mode_perm: PermArg,
    strict: bool,
}

type Res<T> = Result<T, String>;

fn parse_seeds(s: &str) -> Res<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad seed `{t}`: {e}"))
        };
        match part.split_once("..") {
            Some((a, b)) => out.extend(num(a)?..num(b)?),
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(out)
}

fn isqrt(u: u64) -> u64 {
    let mut r = (u as f64).sqrt() as u64;
    while r * r > u {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= u {
        r += 1;
    }
    r
}

fn perm_mode(arg: PermArg, universe: u64) -> Option<PermMode> {
    match arg {
        PermArg::Auto => None,
        PermArg::TrulyRandom => Some(PermMode::TrulyRandom),
        PermArg::Nr => Some(nr_mode(universe, PermMode::DEFAULT_NR_K)),
    }
}

fn backyard_params(cli: &Cli, default_bins: BinsArg) -> Res<BackyardParams> {
    let n = cli.n.unwrap_or(1 << 15);
    let o = Overrides {
        moves: cli.moves,
        bin_steps: cli.bin_steps,
        universe: cli.u,
        ..Overrides::default()
    };
    let bins = match cli.mode_bins.unwrap_or(default_bins) {
        BinsArg::Plain => BinMode::Plain,
        BinsArg::Phf => BinMode::PerfectHash,
        BinsArg::Ranked => return Err("ranked bins need --dict succinct".into()),
    };
    let cuckoo = match cli.mode_cuckoo {
        CuckooArg::Functions => CuckooMode::Functions,
        CuckooArg::Permutations => CuckooMode::Permutations,
    };
    let mut p = BackyardParams::derive_with(n, cli.eps, cli.c, &o)
        .map_err(|e| e.to_string())?
        .with_bin_mode(bins)
        .with_cuckoo_mode(cuckoo);
    if let Some(m) = perm_mode(cli.mode_perm, p.u) {
        p = p.with_perm_mode(m);
    }
    Ok(p)
}

fn succinct_params(
    cli: &Cli,
    u: u64,
    n: u64,
    gamma: f64,
    bins: BinsArg,
    compact: bool,
) -> Res<SuccinctParams> {
    let mut p = SuccinctParams::derive(u, n, gamma, cli.eps).map_err(|e| e.to_string())?;
    p.moves = cli.moves.unwrap_or(p.moves);
    p.bin_steps = cli.bin_steps.unwrap_or(p.bin_steps);
    p = p.with_backend(match bins {
        BinsArg::Plain => BinBackend::Cells(BinMode::Plain),
        BinsArg::Phf => BinBackend::Cells(BinMode::PerfectHash),
        BinsArg::Ranked => BinBackend::Ranked,
    });
    let bu = p.bin_universe;
    match perm_mode(cli.mode_perm, bu) {
        Some(m) => p = p.with_perm_mode(m),
        None if compact => p = p.with_perm_mode(compact_perm_mode(bu)),
        None => {}
    }
    Ok(p)
}

fn target(cli: &Cli) -> Res<Target> {
    Ok(match cli.dict {
        DictKind::Backyard => Target::Backyard(backyard_params(cli, BinsArg::Plain)?),
        DictKind::Succinct => {
            let u = cli.u.unwrap_or(1 << 24);
            let n = cli.n.unwrap_or_else(|| isqrt(u));
            let gamma = cli.gamma.unwrap_or(DEFAULT_GAMMA);
            let bins = cli.mode_bins.unwrap_or(BinsArg::Plain);
            Target::Succinct(succinct_params(cli, u, n, gamma, bins, false)?)
        }
    })
}

/// Runs `f` for every (seed, trial) pair.
fn each_trial<F>(seeds: &[u64], trials: u64, mut f: F) -> Res<()>
where
    F: FnMut(u64, u64) -> Res<()>,
{
    for &seed in seeds {
        for t in 0..trials {
            f(seed, t)?;
        }
    }
    Ok(())
}

fn cmd_ops_fuzz(cli: &Cli, seeds: &[u64], rep: &mut Report) -> Res<()> {
    let t = target(cli)?;
    let ops = cli.ops.unwrap_or(100_000);
    each_trial(seeds, cli.trials, |seed, trial| {
        let r =
            experiments::ops_fuzz(&t, ops, trial_seed(seed, trial)).map_err(|e| e.to_string())?;
        let hard = r.mismatches + r.invariant_failures;
        let exceeded = r.structural_failure.is_some() || r.budget_violations > 0;
        rep.push(Row::new(&r, seed, trial, cli.trials, 0.0), hard, exceeded);
        Ok(())
    })
}

fn cmd_overflow(cli: &Cli, seeds: &[u64], rep: &mut Report) -> Res<()> {
    let n = cli.n.unwrap_or(1 << 15);
    let mut within = [0u64; 2];
    let mut runs = 0;
    each_trial(seeds, cli.trials, |seed, trial| {
        for (i, map) in [FirstLevelMap::Functions, FirstLevelMap::Permutation]
            .into_iter()
            .enumerate()
        {
            let r = experiments::overflow_trial(map, n, cli.eps, cli.c, trial_seed(seed, trial))
                .map_err(|e| e.to_string())?;
            within[i] += r.within as u64;
            let tol = r.limit as f64;
            rep.push(Row::new(&r, seed, trial, cli.trials, tol), 0, !r.within);
        }
        runs += 1;
        Ok(())
    })?;
    rep.aggregate = Some(json!({
        "runs": runs,
        "within_functions": within[0],
        "within_permutation": within[1],
    }));
    Ok(())
}

fn cmd_queue(cli: &Cli, seeds: &[u64], rep: &mut Report) -> Res<()> {
    let p = backyard_params(cli, BinsArg::Plain)?;
    let ops = cli.ops.unwrap_or(100_000);
    each_trial(seeds, cli.trials, |seed, trial| {
        let r = experiments::queue_trial(&p, ops, trial_seed(seed, trial))
            .map_err(|e| e.to_string())?;
        let tol = r.limit as f64;
        rep.push(
            Row::new(&r, seed, trial, cli.trials, tol),
            r.mismatches,
            !r.within,
        );
        Ok(())
    })
}

fn cmd_space_audit(cli: &Cli, seeds: &[u64], rep: &mut Report) -> Res<()> {
    let words_n: Vec<u64> = match cli.n {
        Some(n) => vec![n],
        None => vec![1 << 14, 1 << 16],
    };
    let bits_u: Vec<u64> = match cli.u {
        Some(u) => vec![u],
        None => vec![1 << 16, 1 << 20, 1 << 24],
    };
    let gamma = cli.gamma.unwrap_or(0.0);
    let bins = cli.mode_bins.unwrap_or(BinsArg::Ranked);
    each_trial(seeds, cli.trials, |seed, trial| {
        let s = trial_seed(seed, trial);
        for &n in &words_n {
            let r = experiments::space_words(n, cli.eps, cli.c, s).map_err(|e| e.to_string())?;
            let tol = r.limit as f64;
            rep.push(
                Row::new(&r, seed, trial, cli.trials, tol).kind("words"),
                0,
                !r.within,
            );
        }
        for &u in &bits_u {
            let n = match (cli.u, cli.n) {
                (Some(_), Some(n)) => n,
                _ => isqrt(u),
            };
            let p = succinct_params(cli, u, n, gamma, bins, true)?;
            let r = experiments::space_bits(&p, s).map_err(|e| e.to_string())?;
            let tol = r.limit;
            rep.push(
                Row::new(&r, seed, trial, cli.trials, tol).kind("bits"),
                0,
                !r.within,
            );
        }
        Ok(())
    })?;
    let (u, n, b) = experiments::info_bound_row(16, 4);
    rep.push(
        Row::new(
            &json!({ "u": u, "n": n, "info_bound": b }),
            seeds[0],
            0,
            1,
            0.0,
        )
        .kind("info-bound"),
        0,
        false,
    );
    Ok(())
}

fn cmd_fpr(cli: &Cli, seeds: &[u64], rep: &mut Report) -> Res<()> {
    let n = cli.n.unwrap_or(10_000);
    let queries = cli.ops.unwrap_or(100_000);
    let (mut fp, mut total) = (0u64, 0u64);
    each_trial(seeds, cli.trials, |seed, trial| {
        let r = experiments::fpr_trial(n, cli.delta, queries, trial_seed(seed, trial))
            .map_err(|e| e.to_string())?;
        fp += r.false_positives;
        total += r.queries;
        let tol = 3.0 * r.sigma;
        let over_bits = r.bits as f64 > r.bits_limit;
        rep.push(
            Row::new(&r, seed, trial, cli.trials, tol),
            r.false_negatives,
            over_bits,
        );
        Ok(())
    })?;
    let mean = fp as f64 / total.max(1) as f64;
    let sigma = (cli.delta * (1.0 - cli.delta) / total.max(1) as f64).sqrt();
    let limit = cli.delta + 3.0 * sigma;
    rep.aggregate = Some(json!({
        "queries": total,
        "false_positives": fp,
        "mean_fpr": mean,
        "sigma": sigma,
        "tolerance": 3.0 * sigma,
        "limit": limit,
        "within": mean <= limit,
    }));
    if mean > limit {
        rep.exceedances += 1;
    }
    Ok(())
}

fn cmd_bench(cli: &Cli, seeds: &[u64], rep: &mut Report) -> Res<()> {
    let t = target(cli)?;
    let ops = cli.ops.unwrap_or(100_000);
    each_trial(seeds, cli.trials, |seed, trial| {
        for r in experiments::bench(&t, ops, trial_seed(seed, trial)).map_err(|e| e.to_string())? {
            rep.push(Row::new(&r, seed, trial, cli.trials, 0.0), 0, false);
        }
        Ok(())
    })
}

fn run(cli: &Cli) -> Res<Report> {
    let seeds = parse_seeds(&cli.seeds)?;
    if cli.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    let config = Config {
        n: cli.n,
        u: cli.u,
        eps: cli.eps,
        delta: cli.delta,
        c: cli.c,
        moves: cli.moves,
        bin_steps: cli.bin_steps,
        seeds: seeds.clone(),
        trials: cli.trials,
        ops: cli.ops,
        dict: cli.dict,
        gamma: cli.gamma,
        mode_bins: cli.mode_bins,
        mode_cuckoo: cli.mode_cuckoo,
        mode_perm: cli.mode_perm,
        strict: cli.strict,
    };
    let mut rep = Report::new(
        REPORT_SCHEMA,
        cli.cmd.to_possible_value().unwrap().get_name(),
        serde_json::to_value(&config).map_err(|e| e.to_string())?,
    );
    match cli.cmd {
        Command::OpsFuzz => cmd_ops_fuzz(cli, &seeds, &mut rep)?,
        Command::OverflowStats => cmd_overflow(cli, &seeds, &mut rep)?,
        Command::QueueStats => cmd_queue(cli, &seeds, &mut rep)?,
        Command::SpaceAudit => cmd_space_audit(cli, &seeds, &mut rep)?,
        Command::Fpr => cmd_fpr(cli, &seeds, &mut rep)?,
        Command::Bench => cmd_bench(cli, &seeds, &mut rep)?,
    }
    Ok(rep)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rep = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Json => rep.to_json(),
        Format::Csv => rep.to_csv(),
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let s: Summary = rep.summary(cli.strict);
    eprintln!(
        "{}: {} rows, {} hard failures, {} exceedances",
        rep.command, s.rows, s.hard_failures, s.exceedances
    );
    if s.hard_failures > 0 {
        ExitCode::from(1)
    } else if cli.strict && s.exceedances > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
