//! Command-line front end: run any of the selection algorithms on file
//! or generated input under a declared bit budget, verify against the
//! sorting oracle, and emit plain or JSON statistics.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use roselect::constants::{GENERAL_BUDGET_HEADROOM, LINEAR_BITS_PEAK_FACTOR};
use roselect::error::Error;
use roselect::input::{self, GeneratorSpec, InputSource, ReadOnlyArray};
use roselect::oracle::oracle_select;
use roselect::selection::{
    baseline_select, select_general, select_linear_bits, select_log_squared, SelectionResult,
};
use roselect::workspace::WorkspaceMeter;

#[derive(Parser)]
#[command(
    name = "roselect",
    version,
    about = "Selection (k-th smallest) from read-only memory under a bit workspace budget"
)]
struct Cli {
    /// Text input file: one decimal integer per line.
    #[arg(long, value_name = "PATH", group = "source")]
    input: Option<PathBuf>,

    /// Binary input file: little-endian 64-bit integers, no header.
    #[arg(long, value_name = "PATH", group = "source")]
    input_binary: Option<PathBuf>,

    /// Generated input: N:seed=X[,dist=D] with D in
    /// {uniform-random-permutation, sorted, reverse-sorted, few-distinct}.
    #[arg(long, value_name = "SPEC", group = "source")]
    gen: Option<String>,

    /// Rank to select (1-based), or "all" to verify every rank.
    #[arg(long, value_name = "INT|all")]
    k: Option<String>,

    /// Algorithm to run.
    #[arg(long, value_enum, default_value_t = Alg::Auto)]
    alg: Alg,

    /// Workspace budget in bits, enforced by the meter.
    #[arg(long, value_name = "BITS")]
    budget_bits: Option<u64>,

    /// Emit machine-readable JSON.
    #[arg(long)]
    json: bool,

    /// Re-derive the answer with the sorting oracle and compare.
    #[arg(long)]
    verify: bool,

    /// Benchmark sweep: one cell per line, "N S ALG" (S in bits, 0 for
    /// unlimited). Inputs are generated permutations; k = ceil(N/2).
    #[arg(long, value_name = "FILE")]
    bench: Option<PathBuf>,

    /// Seed for benchmark-generated inputs.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Alg {
    Auto,
    LinearBits,
    General,
    Logsq,
    Baseline,
    Oracle,
}

impl Alg {
    fn name(self) -> &'static str {
        match self {
            Alg::Auto => "auto",
            Alg::LinearBits => "linear-bits",
            Alg::General => "general",
            Alg::Logsq => "logsq",
            Alg::Baseline => "baseline",
            Alg::Oracle => "oracle",
        }
    }
}

#[derive(Serialize)]
struct Report {
    n: usize,
    k: usize,
    algorithm: &'static str,
    budget_bits: Option<u64>,
    answer_index: usize,
    answer_value: i64,
    comparisons: u64,
    reads: u64,
    passes: u64,
    peak_workspace_bits: u64,
    elapsed_ms: f64,
    verified: Option<bool>,
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    budget_bits: Option<u64>,
    algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparisons: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reads: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    passes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    peak_workspace_bits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::BudgetExceeded { .. } | Error::Parameter(_) => EXIT_BUDGET,
                Error::InvariantViolation(_) => EXIT_MISMATCH,
                _ => EXIT_CONFIG,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    if let Some(bench) = &cli.bench {
        return run_bench(cli, bench);
    }
    let source = resolve_source(cli)?;
    let a = input::load(&source)?;
    let n = a.len();

    let k_spec = cli
        .k
        .as_deref()
        .ok_or_else(|| Error::Io("--k is required (an integer or \"all\")".to_string()))?;
    if k_spec == "all" {
        return run_all_ranks(cli, &a);
    }
    let k: usize = k_spec
        .parse()
        .map_err(|_| Error::Io(format!("invalid --k value {k_spec:?}")))?;
    if k < 1 || k > n {
        return Err(Error::Io(format!("--k {k} outside [1, {n}]")));
    }

    let meter = make_meter(cli);
    let result = match execute(cli.alg, &a, k, cli.budget_bits, &meter) {
        Ok(r) => r,
        Err(err) => {
            if matches!(err, Error::BudgetExceeded { .. }) {
                eprint_label_report(&meter);
            }
            return Err(err);
        }
    };

    let verified = cli.verify.then(|| {
        let expected = oracle_select(a.values(), k);
        expected == result.answer_index
    });
    let report = Report {
        n,
        k,
        algorithm: cli.alg.name(),
        budget_bits: cli.budget_bits,
        answer_index: result.answer_index,
        answer_value: result.answer_value,
        comparisons: result.stats.comparisons,
        reads: result.stats.reads,
        passes: result.stats.passes,
        peak_workspace_bits: result.stats.peak_workspace_bits,
        elapsed_ms: result.stats.elapsed.as_secs_f64() * 1e3,
        verified,
    };
    if cli.json {
        println!("{}", serde_json::to_string(&report).expect("serialize"));
    } else {
        print_plain(&report);
    }
    Ok(match verified {
        Some(false) => ExitCode::from(EXIT_MISMATCH),
        _ => ExitCode::SUCCESS,
    })
}

fn resolve_source(cli: &Cli) -> Result<InputSource, Error> {
    if let Some(p) = &cli.input {
        Ok(InputSource::Text(p.clone()))
    } else if let Some(p) = &cli.input_binary {
        Ok(InputSource::Binary(p.clone()))
    } else if let Some(spec) = &cli.gen {
        Ok(InputSource::Generator(GeneratorSpec::parse(spec)?))
    } else {
        Err(Error::Io(
            "no input: pass --input, --input-binary or --gen".to_string(),
        ))
    }
}

fn make_meter(cli: &Cli) -> WorkspaceMeter {
    match cli.budget_bits {
        Some(b) => WorkspaceMeter::with_budget(b),
        None => WorkspaceMeter::unlimited(),
    }
}

/// Oracle runs bypass instrumentation entirely; their counters report
/// as zero.
fn run_oracle(a: &ReadOnlyArray, k: usize) -> SelectionResult {
    let start = std::time::Instant::now();
    let answer_index = oracle_select(a.values(), k);
    SelectionResult {
        answer_index,
        answer_value: a.values()[answer_index - 1],
        stats: roselect::selection::SelectionStats {
            elapsed: start.elapsed(),
            ..Default::default()
        },
        diag: Default::default(),
    }
}

fn execute(
    alg: Alg,
    a: &ReadOnlyArray,
    k: usize,
    budget_bits: Option<u64>,
    meter: &WorkspaceMeter,
) -> Result<SelectionResult, Error> {
    let n = a.len() as u64;
    // An enforced budget of B bits leaves the budgeted algorithm a
    // sizing parameter of B / GENERAL_BUDGET_HEADROOM, so its peak
    // (at most GENERAL_PEAK_FACTOR per sized bit) stays under B.
    let general_sizing = |b: Option<u64>| b.map_or(n, |b| b / GENERAL_BUDGET_HEADROOM);
    match alg {
        Alg::Auto => match budget_bits {
            None => select_linear_bits(a, k, meter),
            Some(b) if b >= LINEAR_BITS_PEAK_FACTOR * n => select_linear_bits(a, k, meter),
            Some(_) => select_general(a, k, general_sizing(budget_bits), meter),
        },
        Alg::LinearBits => select_linear_bits(a, k, meter),
        Alg::General => select_general(a, k, general_sizing(budget_bits), meter),
        Alg::Logsq => select_log_squared(a, k, meter),
        Alg::Baseline => baseline_select(a, k, meter),
        Alg::Oracle => Ok(run_oracle(a, k)),
    }
}

fn run_all_ranks(cli: &Cli, a: &ReadOnlyArray) -> Result<ExitCode, Error> {
    let n = a.len();
    let mut mismatches = Vec::new();
    for k in 1..=n {
        let meter = make_meter(cli);
        let result = execute(cli.alg, a, k, cli.budget_bits, &meter)?;
        let expected = oracle_select(a.values(), k);
        if result.answer_index != expected {
            mismatches.push(k);
        }
    }
    let ok = mismatches.is_empty();
    if cli.json {
        let summary = serde_json::json!({
            "n": n,
            "k": "all",
            "algorithm": cli.alg.name(),
            "budget_bits": cli.budget_bits,
            "ranks": n,
            "mismatches": mismatches,
            "verified": ok,
        });
        println!("{summary}");
    } else if ok {
        println!("all {n} ranks verified: MATCH");
    } else {
        println!("MISMATCH at ranks {mismatches:?}");
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    })
}

fn run_bench(cli: &Cli, path: &PathBuf) -> Result<ExitCode, Error> {
    let content = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows.push(bench_cell(cli, line));
    }
    if cli.json {
        println!("{}", serde_json::to_string(&rows).expect("serialize"));
    } else {
        println!(
            "{:>12} {:>14} {:>12} {:>14} {:>14} {:>8} {:>14} {:>10}",
            "n", "budget_bits", "algorithm", "comparisons", "reads", "passes", "peak_bits", "ms"
        );
        for r in &rows {
            if let Some(err) = &r.error {
                println!(
                    "{:>12} {:>14} {:>12} error: {err}",
                    r.n,
                    r.budget_bits.map_or("-".into(), |b: u64| b.to_string()),
                    r.algorithm
                );
            } else {
                println!(
                    "{:>12} {:>14} {:>12} {:>14} {:>14} {:>8} {:>14} {:>10.2}",
                    r.n,
                    r.budget_bits.map_or("-".into(), |b: u64| b.to_string()),
                    r.algorithm,
                    r.comparisons.unwrap(),
                    r.reads.unwrap(),
                    r.passes.unwrap(),
                    r.peak_workspace_bits.unwrap(),
                    r.elapsed_ms.unwrap()
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_cell(cli: &Cli, line: &str) -> BenchRow {
    let mut row = BenchRow {
        n: 0,
        budget_bits: None,
        algorithm: String::new(),
        comparisons: None,
        reads: None,
        passes: None,
        peak_workspace_bits: None,
        elapsed_ms: None,
        error: None,
    };
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 3 {
        row.algorithm = line.to_string();
        row.error = Some("expected \"N S ALG\"".to_string());
        return row;
    }
    row.algorithm = parts[2].to_string();
    let n: usize = match parts[0].parse() {
        Ok(v) => v,
        Err(_) => {
            row.error = Some(format!("invalid N {:?}", parts[0]));
            return row;
        }
    };
    row.n = n;
    let budget: u64 = match parts[1].parse() {
        Ok(v) => v,
        Err(_) => {
            row.error = Some(format!("invalid S {:?}", parts[1]));
            return row;
        }
    };
    let budget_bits = (budget > 0).then_some(budget);
    row.budget_bits = budget_bits;
    let alg = match Alg::from_str(parts[2], true) {
        Ok(a) => a,
        Err(e) => {
            row.error = Some(e);
            return row;
        }
    };
    let spec = GeneratorSpec::new(n, cli.seed, input::Distribution::UniformPermutation);
    let a = match input::generate(&spec) {
        Ok(a) => a,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let meter = match budget_bits {
        Some(b) => WorkspaceMeter::with_budget(b),
        None => WorkspaceMeter::unlimited(),
    };
    match execute(alg, &a, n.div_ceil(2), budget_bits, &meter) {
        Ok(r) => {
            row.comparisons = Some(r.stats.comparisons);
            row.reads = Some(r.stats.reads);
            row.passes = Some(r.stats.passes);
            row.peak_workspace_bits = Some(r.stats.peak_workspace_bits);
            row.elapsed_ms = Some(r.stats.elapsed.as_secs_f64() * 1e3);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn print_plain(r: &Report) {
    println!("n={} k={} algorithm={}", r.n, r.k, r.algorithm);
    if let Some(b) = r.budget_bits {
        println!("budget_bits={b}");
    }
    println!("answer index={} value={}", r.answer_index, r.answer_value);
    println!(
        "comparisons={} reads={} passes={} peak_workspace_bits={} elapsed_ms={:.3}",
        r.comparisons, r.reads, r.passes, r.peak_workspace_bits, r.elapsed_ms
    );
    match r.verified {
        Some(true) => println!("verify: MATCH"),
        Some(false) => println!("verify: MISMATCH"),
        None => {}
    }
}

fn eprint_label_report(meter: &WorkspaceMeter) {
    let report = meter.report();
    eprintln!(
        "workspace at failure: current={} bits, peak={} bits",
        report.current_bits, report.peak_bits
    );
    for (label, peak) in report.label_peaks {
        eprintln!("  {label}: peak {peak} bits");
    }
}
