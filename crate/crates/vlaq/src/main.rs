use std::path::{Path, PathBuf};

use clap::Parser;

use vlaq::harness::{self, Backend, RunConfig, RunOutput};
use vlaq::metrics::{self, RunReport};
use vlaq::state::Precision;
use vlaq::vla::KernelVariant;
use vlaq::{generators::BenchKind, Error};

/// Vector-length agnostic quantum state-vector simulator with
/// lane-accurate vectorization metrics.
///
/// Runs a benchmark family (or a circuit file) on the predicated vector
/// engine or the scalar reference engine, reporting AVL, IRR, arithmetic
/// intensity and the underlying op/byte tallies.
#[derive(Parser, Debug)]
#[command(name = "vlaq", version, about, long_about = None)]
struct Cli {
    /// Engine: vla (predicated vector kernels) or ref (scalar baseline)
    #[arg(long, default_value = "vla", value_parser = parse_backend)]
    backend: Backend,

    /// Benchmark family: qft, grover, ghz, qrc, qv, synthetic
    #[arg(short = 'b', long, value_parser = parse_bench, conflicts_with = "circuit_file")]
    bench: Option<BenchKind>,

    /// Qubit count (default 10, or the circuit file's own)
    #[arg(short = 'q', long)]
    qubits: Option<u32>,

    /// Worker threads for the vla engine
    #[arg(short = 't', long, default_value_t = 1)]
    workers: usize,

    /// Gate fusion width limit (1 disables fusion)
    #[arg(short = 'f', long, default_value_t = 3)]
    max_fuse: usize,

    /// Repetitions; counters repeat exactly, wall times are aggregated
    #[arg(short = 'r', long, default_value_t = 1)]
    reps: usize,

    /// Emulated vector lanes (complex elements per vector)
    #[arg(long, default_value_t = 4)]
    lanes: usize,

    /// Element precision: single or double
    #[arg(long, default_value = "single", value_parser = parse_precision)]
    precision: Precision,

    /// Seed for the randomized families
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Family depth: qrc layers, qv rounds, synthetic passes, grover iterations
    #[arg(long)]
    depth: Option<usize>,

    /// Cross-check the final state against the scalar baseline
    #[arg(long)]
    verify: bool,

    /// Largest qubit count --verify will accept
    #[arg(long, default_value_t = harness::DEFAULT_VERIFY_CAP, value_name = "N")]
    verify_cap: u32,

    /// Run once per fusion width in the range, e.g. 1:4
    #[arg(long, value_name = "A:B", conflicts_with = "ablate")]
    sweep_f: Option<String>,

    /// Compare full, no-buffering, no-fusion and scalar configurations
    #[arg(long)]
    ablate: bool,

    /// Write the final state of the last repetition to this file
    #[arg(long, value_name = "PATH")]
    dump_state: Option<PathBuf>,

    /// Write the fusion plan listing to this file
    #[arg(long, value_name = "PATH")]
    dump_plan: Option<PathBuf>,

    /// Run a circuit from a text file instead of a benchmark family
    #[arg(long, value_name = "PATH")]
    circuit_file: Option<PathBuf>,

    /// Directory for per-repetition JSON reports plus aggregate.csv
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Print reports as JSON on stdout
    #[arg(long)]
    json: bool,

    /// Print aggregate rows as CSV on stdout
    #[arg(long)]
    csv: bool,

    /// Zero wall times so output bytes are reproducible
    #[arg(long)]
    stable_output: bool,

    /// Drop the CZ brick between qrc layers
    #[arg(long)]
    qrc_no_entangle: bool,

    /// Use the rejected temp-result kernel instead of the load buffer
    #[arg(long)]
    temp_array: bool,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_bench(s: &str) -> Result<BenchKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() {
    let cli = Cli::parse();
    let code = match run_cli(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    };
    std::process::exit(code);
}

fn run_cli(cli: &Cli) -> vlaq::Result<i32> {
    let cfg = RunConfig {
        bench: cli.bench,
        circuit_file: cli.circuit_file.clone(),
        circuit: None,
        n: cli.qubits,
        seed: cli.seed,
        depth: cli.depth,
        qrc_entangle: !cli.qrc_no_entangle,
        backend: cli.backend,
        precision: cli.precision,
        lanes: cli.lanes,
        workers: cli.workers,
        max_fuse: cli.max_fuse,
        reps: cli.reps,
        variant: if cli.temp_array {
            KernelVariant::TempArray
        } else {
            KernelVariant::Buffered
        },
        verify: cli.verify,
        verify_cap: cli.verify_cap,
        stable_output: cli.stable_output,
        dump_state: cli.dump_state.clone(),
        dump_plan: cli.dump_plan.clone(),
        mem_budget: harness::mem_budget_from_env()?,
    };

    let outputs = if cli.ablate {
        harness::ablate(&cfg)?
    } else if let Some(text) = &cli.sweep_f {
        harness::sweep_f(&cfg, harness::parse_sweep(text)?)?
    } else {
        vec![harness::run(&cfg)?]
    };

    emit(cli, &outputs)?;

    let verify_failed = outputs
        .iter()
        .flat_map(|o| &o.reports)
        .filter_map(|r| r.verify)
        .any(|v| !v.pass);
    if verify_failed {
        eprintln!("verification failed");
        return Ok(1);
    }
    Ok(0)
}

fn emit(cli: &Cli, outputs: &[RunOutput]) -> vlaq::Result<()> {
    if let Some(dir) = &cli.out {
        write_report_files(dir, outputs)?;
    }
    if cli.json {
        let reports: Vec<&RunReport> = outputs.iter().flat_map(|o| &o.reports).collect();
        let text = if reports.len() == 1 {
            serde_json::to_string_pretty(reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        }
        .expect("report serialization cannot fail");
        println!("{text}");
    }
    if cli.csv {
        println!("{}", metrics::csv_header());
        for output in outputs {
            println!("{}", output.summary.csv_line());
        }
    }
    if !cli.json && !cli.csv {
        if outputs.len() == 1 {
            print!("{}", harness::render_summary(&outputs[0]));
        } else {
            print!("{}", harness::render_comparison(outputs));
        }
        println!("note: {}", metrics::HARDWARE_REFERENCE);
    }
    Ok(())
}

fn write_report_files(dir: &Path, outputs: &[RunOutput]) -> vlaq::Result<()> {
    fn file_err(path: &Path, source: std::io::Error) -> Error {
        Error::FileIo {
            path: path.to_path_buf(),
            source,
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    for output in outputs {
        let label: String = output
            .summary
            .config
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        for report in &output.reports {
            let path = dir.join(format!("{label}-{}.json", report.rep));
            std::fs::write(&path, report.to_json()).map_err(|e| file_err(&path, e))?;
        }
    }
    let mut csv = String::from(metrics::csv_header());
    csv.push('\n');
    for output in outputs {
        csv.push_str(&output.summary.csv_line());
        csv.push('\n');
    }
    let csv_path = dir.join("aggregate.csv");
    std::fs::write(&csv_path, csv).map_err(|e| file_err(&csv_path, e))?;
    Ok(())
}
