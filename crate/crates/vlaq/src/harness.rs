//! Run orchestration: resolve a circuit, plan fusion, execute a backend
//! with per-gate timing and counters, and emit structured reports.
//!
//! The harness is what the thin CLI binary and most examples call into.
//! Every run applies the fused plan; the reference baseline used by
//! `verify` applies the original unfused circuit, so a passing check
//! covers both the fusion pass and the vector engine at once.

use std::path::PathBuf;
use std::time::Instant;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::fusion::{self, FusionPlan};
use crate::gate::Gate;
use crate::generators::BenchKind;
use crate::metrics::{
    CircuitInfo, FusionInfo, GateTiming, RunReport, RunSummary, VectorCounters, VerifyReport,
    HARDWARE_REFERENCE,
};
use crate::reference;
use crate::state::{
    max_abs_diff, LaneConfig, Layout, Precision, Scalar, StateVector, DEFAULT_MEM_BUDGET,
};
use crate::vla::{Engine, KernelVariant};

/// Largest qubit count `verify` will cross-check by default; the scalar
/// baseline doubles the work and the bound keeps casual runs snappy.
pub const DEFAULT_VERIFY_CAP: u32 = 14;

/// Environment variable overriding the state-allocation budget in bytes.
pub const MEM_BUDGET_ENV: &str = "VLAQ_MEM_BUDGET_BYTES";

/// Which engine executes the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Vla,
    Ref,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Vla => "vla",
            Backend::Ref => "ref",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Backend> {
        match s.to_ascii_lowercase().as_str() {
            "vla" => Ok(Backend::Vla),
            "ref" | "reference" | "scalar" => Ok(Backend::Ref),
            other => Err(Error::InvalidFlag {
                message: format!("unknown backend '{other}' (expected vla or ref)"),
            }),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything one run needs. `Default` gives the 4-lane single-precision
/// vla engine on a 10-qubit bench with fusion width 3.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub bench: Option<BenchKind>,
    pub circuit_file: Option<PathBuf>,
    /// Pre-built circuit; takes precedence over `bench` and `circuit_file`.
    pub circuit: Option<Circuit>,
    /// Qubit count; `None` uses the bench default (10) or the file's own.
    pub n: Option<u32>,
    pub seed: u64,
    pub depth: Option<usize>,
    pub qrc_entangle: bool,
    pub backend: Backend,
    pub precision: Precision,
    pub lanes: usize,
    pub workers: usize,
    pub max_fuse: usize,
    pub reps: usize,
    pub variant: KernelVariant,
    pub verify: bool,
    pub verify_cap: u32,
    /// Zero out wall times so report bytes are reproducible.
    pub stable_output: bool,
    pub dump_state: Option<PathBuf>,
    pub dump_plan: Option<PathBuf>,
    pub mem_budget: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            bench: None,
            circuit_file: None,
            circuit: None,
            n: None,
            seed: 1,
            depth: None,
            qrc_entangle: true,
            backend: Backend::Vla,
            precision: Precision::Single,
            lanes: 4,
            workers: 1,
            max_fuse: 3,
            reps: 1,
            variant: KernelVariant::Buffered,
            verify: false,
            verify_cap: DEFAULT_VERIFY_CAP,
            stable_output: false,
            dump_state: None,
            dump_plan: None,
            mem_budget: DEFAULT_MEM_BUDGET,
        }
    }
}

impl RunConfig {
    pub fn with_bench(kind: BenchKind, n: u32) -> RunConfig {
        RunConfig {
            bench: Some(kind),
            n: Some(n),
            ..RunConfig::default()
        }
    }
}

/// Reads the budget override from the environment; unset means the
/// default, unparsable means a validation error.
pub fn mem_budget_from_env() -> Result<u64> {
    match std::env::var(MEM_BUDGET_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| Error::InvalidFlag {
            message: format!("{MEM_BUDGET_ENV}='{text}' is not a byte count"),
        }),
        Err(_) => Ok(DEFAULT_MEM_BUDGET),
    }
}

/// Parses a `--sweep-f A:B` range.
pub fn parse_sweep(text: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || Error::InvalidSweepRange { text: text.into() };
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a < 1 || b < a || b > fusion::MAX_FUSION_WIDTH {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Result of one configuration: per-rep reports, the aggregate line, and
/// the fusion plan listing.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub reports: Vec<RunReport>,
    pub summary: RunSummary,
    pub plan_text: String,
}

fn resolve_circuit(cfg: &RunConfig) -> Result<Circuit> {
    if let Some(c) = &cfg.circuit {
        let mut c = c.clone();
        if let Some(n) = cfg.n {
            if n < c.n {
                return Err(Error::InvalidFlag {
                    message: format!("circuit needs {} qubits but -q gives {n}", c.n),
                });
            }
            c.n = n;
        }
        return Ok(c);
    }
    if let Some(path) = &cfg.circuit_file {
        let mut c = Circuit::load(path)?;
        if let Some(n) = cfg.n {
            if n < c.n {
                return Err(Error::InvalidFlag {
                    message: format!(
                        "{} defines {} qubits but -q gives {n}",
                        path.display(),
                        c.n
                    ),
                });
            }
            c.n = n;
        }
        return Ok(c);
    }
    let kind = cfg.bench.ok_or_else(|| Error::InvalidFlag {
        message: "no benchmark (-b) or circuit file (--circuit-file) given".into(),
    })?;
    kind.build_with(cfg.n.unwrap_or(10), cfg.seed, cfg.depth, cfg.qrc_entangle)
}

/// Runs one configuration end to end.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    run_labeled(cfg, "run")
}

fn run_labeled(cfg: &RunConfig, label: &str) -> Result<RunOutput> {
    let (output, ()) = match cfg.precision {
        Precision::Single => execute::<f32, ()>(cfg, label, |_| Ok(())),
        Precision::Double => execute::<f64, ()>(cfg, label, |_| Ok(())),
    }?;
    Ok(output)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Shared typed core: runs the configuration and hands the final state to
/// `inspect` before it is dropped, so callers like the ablation driver can
/// compare states without re-running.
fn execute<T: Scalar, R>(
    cfg: &RunConfig,
    label: &str,
    inspect: impl FnOnce(&StateVector<T>) -> Result<R>,
) -> Result<(RunOutput, R)> {
    if cfg.reps == 0 {
        return Err(Error::ZeroReps);
    }
    let circuit = resolve_circuit(cfg)?;
    if cfg.verify && circuit.n > cfg.verify_cap {
        return Err(Error::InvalidFlag {
            message: format!(
                "--verify is capped at {} qubits (raise --verify-cap to cross-check n={})",
                cfg.verify_cap, circuit.n
            ),
        });
    }
    let plan = fusion::plan_fusion(&circuit, cfg.max_fuse)?;
    let plan_text = plan.to_text();
    if let Some(path) = &cfg.dump_plan {
        std::fs::write(path, &plan_text).map_err(|source| Error::FileIo {
            path: path.clone(),
            source,
        })?;
    }
    let gates = plan.to_gates();
    let ref_scalar_ops =
        reference::gates_scalar_ops(circuit.n, &gates) + reference::expectation_scalar_ops(circuit.n);

    let mut reports = Vec::with_capacity(cfg.reps);
    let mut final_state: Option<StateVector<T>> = None;
    for rep in 1..=cfg.reps {
        let (sv, ctr, expectation, timings, wall_ms) = match cfg.backend {
            Backend::Vla => run_vla_once(cfg, &circuit, &gates)?,
            Backend::Ref => run_ref_once(cfg, &circuit, &gates)?,
        };
        let verify = if cfg.verify && rep == 1 {
            Some(verify_against_reference(cfg, &circuit, &sv, expectation)?)
        } else {
            None
        };
        let mut report = RunReport {
            wall_ms,
            avl: ctr.avl(),
            irr: ctr.irr(ref_scalar_ops),
            ai: ctr.arithmetic_intensity(),
            vector_ops: ctr.vector_ops,
            scalar_ops: ctr.scalar_ops,
            fusion: plan_info(&plan),
            circuit: CircuitInfo {
                name: circuit.name.clone(),
                n: circuit.n,
                seed: cfg.seed,
            },
            backend: cfg.backend.name().into(),
            precision: cfg.precision.to_string(),
            lanes: cfg.lanes as u32,
            workers: cfg.workers,
            max_fuse: cfg.max_fuse,
            rep,
            expectation,
            ref_scalar_ops,
            counters: ctr,
            gate_timings_ms: timings,
            hardware_reference: HARDWARE_REFERENCE.into(),
            verify,
        };
        if cfg.stable_output {
            report.wall_ms = 0.0;
            for t in &mut report.gate_timings_ms {
                t.ms = 0.0;
            }
        }
        reports.push(report);
        final_state = Some(sv);
    }

    let sv = final_state.expect("reps >= 1 leaves a state");
    if let Some(path) = &cfg.dump_state {
        sv.save(path)?;
    }
    let inspected = inspect(&sv)?;
    let summary = RunSummary::from_reports(label, &reports);
    Ok((
        RunOutput {
            reports,
            summary,
            plan_text,
        },
        inspected,
    ))
}

fn plan_info(plan: &FusionPlan) -> FusionInfo {
    let stats = plan.stats();
    FusionInfo {
        before: stats.before,
        after: stats.after,
        max_f: stats.max_f,
    }
}

type RepResult<T> = (StateVector<T>, VectorCounters, f64, Vec<GateTiming>, f64);

fn run_vla_once<T: Scalar>(
    cfg: &RunConfig,
    circuit: &Circuit,
    gates: &[Gate],
) -> Result<RepResult<T>> {
    let lane_cfg = LaneConfig::from_lanes(cfg.lanes, T::PRECISION)?;
    let engine = Engine::new(lane_cfg)
        .with_workers(cfg.workers)?
        .with_variant(cfg.variant);
    let mut sv = StateVector::<T>::zero_with_budget(
        circuit.n,
        Layout::Blocked { lanes: cfg.lanes },
        cfg.mem_budget,
    )?;
    let mut ctr = VectorCounters::default();
    let mut timings = Vec::with_capacity(gates.len());
    let start = Instant::now();
    for gate in gates {
        let t = Instant::now();
        engine.apply_gate(&mut sv, gate, &mut ctr)?;
        timings.push(GateTiming {
            gate: gate.name.clone(),
            ms: ms(t),
        });
    }
    let expectation = engine.expectation(&sv, &mut ctr)?;
    Ok((sv, ctr, expectation, timings, ms(start)))
}

fn run_ref_once<T: Scalar>(
    cfg: &RunConfig,
    circuit: &Circuit,
    gates: &[Gate],
) -> Result<RepResult<T>> {
    let mut sv =
        StateVector::<T>::zero_with_budget(circuit.n, Layout::Interleaved, cfg.mem_budget)?;
    let mut ctr = VectorCounters::default();
    let mut timings = Vec::with_capacity(gates.len());
    let start = Instant::now();
    for gate in gates {
        let t = Instant::now();
        reference::apply_gate(&mut sv, gate, &mut ctr)?;
        timings.push(GateTiming {
            gate: gate.name.clone(),
            ms: ms(t),
        });
    }
    let expectation = reference::expectation(&sv, &mut ctr)?;
    Ok((sv, ctr, expectation, timings, ms(start)))
}

/// Scalar baseline on the original unfused circuit, compared amplitude by
/// amplitude at the precision's tolerance.
fn verify_against_reference<T: Scalar>(
    cfg: &RunConfig,
    circuit: &Circuit,
    sv: &StateVector<T>,
    expectation: f64,
) -> Result<VerifyReport> {
    let mut baseline =
        StateVector::<T>::zero_with_budget(circuit.n, Layout::Interleaved, cfg.mem_budget)?;
    let mut ctr = VectorCounters::default();
    reference::apply_circuit(&mut baseline, circuit, &mut ctr)?;
    let base_expectation = reference::expectation(&baseline, &mut ctr)?;
    let max_diff = max_abs_diff(sv, &baseline)?;
    let expectation_diff = (expectation - base_expectation).abs();
    let tolerance = cfg.precision.state_tolerance();
    Ok(VerifyReport {
        max_abs_diff: max_diff,
        expectation_diff,
        tolerance,
        pass: max_diff <= tolerance && expectation_diff <= tolerance,
    })
}

/// Runs the configuration once per fusion width in `range`; one summary
/// row per width, labeled `f=K`.
pub fn sweep_f(
    cfg: &RunConfig,
    range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<RunOutput>> {
    let mut outputs = Vec::new();
    let mut first = true;
    for f in range {
        let mut step = cfg.clone();
        step.max_fuse = f;
        // Only the first width writes dump files; later widths would
        // silently overwrite them.
        if !first {
            step.dump_state = None;
            step.dump_plan = None;
        }
        first = false;
        outputs.push(run_labeled(&step, &format!("f={f}"))?);
    }
    Ok(outputs)
}

/// The four ablation configurations: the full engine, the rejected
/// temp-result kernel, fusion disabled, and the scalar baseline. All four
/// final states are compared against the full run; the differences land in
/// each row's verify block.
pub fn ablate(cfg: &RunConfig) -> Result<Vec<RunOutput>> {
    match cfg.precision {
        Precision::Single => ablate_typed::<f32>(cfg),
        Precision::Double => ablate_typed::<f64>(cfg),
    }
}

fn ablate_typed<T: Scalar>(cfg: &RunConfig) -> Result<Vec<RunOutput>> {
    let mut base = cfg.clone();
    base.verify = false;
    base.dump_state = None;
    base.dump_plan = None;

    let full_cfg = RunConfig {
        backend: Backend::Vla,
        variant: KernelVariant::Buffered,
        ..base.clone()
    };
    let (mut full, full_state) =
        execute::<T, StateVector<T>>(&full_cfg, "full", |sv| Ok(sv.clone()))?;

    let variants: [(&str, Backend, KernelVariant, usize); 3] = [
        (
            "no-buffering",
            Backend::Vla,
            KernelVariant::TempArray,
            cfg.max_fuse,
        ),
        ("no-fusion", Backend::Vla, KernelVariant::Buffered, 1),
        ("scalar", Backend::Ref, KernelVariant::Buffered, cfg.max_fuse),
    ];

    let tolerance = cfg.precision.state_tolerance();
    let mut outputs = Vec::with_capacity(4);
    outputs.push({
        attach_diff(&mut full, 0.0, 0.0, tolerance);
        full
    });
    for (label, backend, variant, max_fuse) in variants {
        let step = RunConfig {
            backend,
            variant,
            max_fuse,
            ..base.clone()
        };
        let (mut output, diff) = execute::<T, f64>(&step, label, |sv| {
            max_abs_diff(sv, &full_state)
        })?;
        let expectation_diff =
            (output.reports[0].expectation - outputs[0].reports[0].expectation).abs();
        attach_diff(&mut output, diff, expectation_diff, tolerance);
        outputs.push(output);
    }
    Ok(outputs)
}

fn attach_diff(output: &mut RunOutput, diff: f64, expectation_diff: f64, tolerance: f64) {
    let verify = VerifyReport {
        max_abs_diff: diff,
        expectation_diff,
        tolerance,
        pass: diff <= tolerance && expectation_diff <= tolerance,
    };
    for r in &mut output.reports {
        r.verify = Some(verify);
    }
}

/// One-screen human rendering of a run.
pub fn render_summary(output: &RunOutput) -> String {
    use std::fmt::Write as _;
    let s = &output.summary;
    let c = &s.counters;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} on {} (n={}, seed={}): backend={} precision={} lanes={} workers={} max_fuse={}",
        s.config,
        s.circuit.name,
        s.circuit.n,
        s.circuit.seed,
        s.backend,
        s.precision,
        s.lanes,
        s.workers,
        s.max_fuse
    );
    let _ = writeln!(
        text,
        "  wall {:.3} ms mean / {:.3} ms min over {} rep(s); expectation {:.9}",
        s.wall_ms_mean, s.wall_ms_min, s.reps, s.expectation
    );
    let _ = writeln!(
        text,
        "  fusion {} -> {} gates (widest {});  AVL {:.3}  IRR {:.3}  AI {:.4}",
        s.fusion.before, s.fusion.after, s.fusion.max_f, s.avl, s.irr, s.ai
    );
    let _ = writeln!(
        text,
        "  ops: {} vector ({} full, {} partial) + {} scalar;  flops {};  state {} B;  buffer {} B",
        c.vector_ops,
        c.full_mask_ops,
        c.partial_mask_ops,
        c.scalar_ops,
        c.flops,
        c.mem_bytes,
        c.buffer_bytes
    );
    if let Some(v) = output.reports.first().and_then(|r| r.verify) {
        let _ = writeln!(
            text,
            "  verify: max |diff| {:.3e}, expectation diff {:.3e}, tolerance {:.0e} -> {}",
            v.max_abs_diff,
            v.expectation_diff,
            v.tolerance,
            if v.pass { "pass" } else { "FAIL" }
        );
    }
    text
}

/// Side-by-side table over several labeled outputs (sweeps, ablations).
pub fn render_comparison(outputs: &[RunOutput]) -> String {
    use std::fmt::Write as _;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<14} {:>10} {:>12} {:>12} {:>8} {:>8} {:>9} {:>14} {:>12}",
        "config", "gates", "vector_ops", "scalar_ops", "avl", "irr", "ai", "mem_bytes", "max|diff|"
    );
    for output in outputs {
        let s = &output.summary;
        let diff = output
            .reports
            .first()
            .and_then(|r| r.verify)
            .map(|v| format!("{:.3e}", v.max_abs_diff))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            text,
            "{:<14} {:>10} {:>12} {:>12} {:>8.3} {:>8.3} {:>9.4} {:>14} {:>12}",
            s.config,
            s.fusion.after,
            s.counters.vector_ops,
            s.counters.scalar_ops,
            s.avl,
            s.irr,
            s.ai,
            s.counters.mem_bytes,
            diff
        );
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate;

    fn ghz_cfg(n: u32) -> RunConfig {
        RunConfig::with_bench(BenchKind::Ghz, n)
    }

    #[test]
    fn run_produces_consistent_reports() {
        let mut cfg = ghz_cfg(8);
        cfg.reps = 3;
        cfg.verify = true;
        let output = run(&cfg).unwrap();
        assert_eq!(output.reports.len(), 3);
        let first = &output.reports[0];
        assert!(first.verify.unwrap().pass);
        assert_eq!(first.verify.unwrap().max_abs_diff, 0.0);
        for r in &output.reports[1..] {
            assert_eq!(r.counters, first.counters, "counters must be identical");
            assert!(r.verify.is_none());
        }
        assert_eq!(first.fusion.before, 8);
        assert_eq!(first.circuit.name, "ghz8");
        assert!(output.summary.wall_ms_min <= output.summary.wall_ms_mean);
        assert!(first.wall_ms > 0.0);
        assert_eq!(first.gate_timings_ms.len(), first.fusion.after);
    }

    #[test]
    fn ref_backend_reports_unit_irr() {
        let mut cfg = ghz_cfg(8);
        cfg.backend = Backend::Ref;
        let output = run(&cfg).unwrap();
        let r = &output.reports[0];
        assert_eq!(r.vector_ops, 0);
        assert_eq!(r.irr, 1.0);
        assert_eq!(r.counters.scalar_ops, r.ref_scalar_ops);
    }

    #[test]
    fn backends_agree_on_the_expectation() {
        for kind in [BenchKind::Qft, BenchKind::Qrc, BenchKind::Qv] {
            let mut cfg = RunConfig::with_bench(kind, 6);
            cfg.depth = Some(3);
            cfg.precision = Precision::Double;
            let vla = run(&cfg).unwrap();
            cfg.backend = Backend::Ref;
            let refr = run(&cfg).unwrap();
            assert_eq!(
                vla.reports[0].expectation, refr.reports[0].expectation,
                "{kind}: same plan must give the bitwise-same expectation"
            );
        }
    }

    #[test]
    fn verify_rejects_oversized_circuits() {
        let mut cfg = ghz_cfg(15);
        cfg.verify = true;
        assert!(matches!(run(&cfg), Err(Error::InvalidFlag { .. })));
        cfg.verify_cap = 15;
        assert!(run(&cfg).unwrap().reports[0].verify.unwrap().pass);
    }

    #[test]
    fn verify_catches_a_corrupted_gate() {
        // Run a circuit whose second gate claims to be X but stores
        // sqrt-X, then verify against the honest X circuit: the check
        // must fail loudly.
        let mut corrupted = Circuit::new("corrupt", 2);
        corrupted.push(gate::hadamard(0)).unwrap();
        let half = gate::Gate::new(
            "x",
            vec![1],
            vec![],
            gate::GateMatrix::new(vec![
                num_complex::Complex::new(0.5, 0.5),
                num_complex::Complex::new(0.5, -0.5),
                num_complex::Complex::new(0.5, -0.5),
                num_complex::Complex::new(0.5, 0.5),
            ])
            .unwrap(),
        )
        .unwrap();
        corrupted.push(half).unwrap();

        let mut honest = Circuit::new("corrupt", 2);
        honest.push(gate::hadamard(0)).unwrap();
        honest.push(gate::pauli_x(1)).unwrap();

        let cfg = RunConfig {
            precision: Precision::Double,
            ..RunConfig::default()
        };

        let plan = fusion::plan_fusion(&corrupted, cfg.max_fuse).unwrap();
        let (sv, _, expectation, _, _) =
            run_vla_once::<f64>(&cfg, &corrupted, &plan.to_gates()).unwrap();

        let same = verify_against_reference(&cfg, &corrupted, &sv, expectation).unwrap();
        assert!(same.pass, "self-comparison must pass");

        let cross = verify_against_reference(&cfg, &honest, &sv, expectation).unwrap();
        assert!(!cross.pass, "corrupted matrix must fail verification");
        assert!(cross.max_abs_diff > 1e-2, "diff = {}", cross.max_abs_diff);
    }

    #[test]
    fn sweep_labels_rows_and_varies_width() {
        let mut cfg = RunConfig::with_bench(BenchKind::Synthetic, 10);
        cfg.depth = Some(2);
        let outputs = sweep_f(&cfg, 1..=3).unwrap();
        assert_eq!(outputs.len(), 3);
        let labels: Vec<&str> = outputs.iter().map(|o| o.summary.config.as_str()).collect();
        assert_eq!(labels, ["f=1", "f=2", "f=3"]);
        let ai: Vec<f64> = outputs.iter().map(|o| o.summary.ai).collect();
        assert!(ai[0] < ai[1] && ai[1] < ai[2], "AI should rise with f: {ai:?}");
    }

    #[test]
    fn parse_sweep_accepts_only_ordered_ranges() {
        assert_eq!(parse_sweep("1:4").unwrap(), 1..=4);
        assert_eq!(parse_sweep("3:3").unwrap(), 3..=3);
        for bad in ["", "4", "0:3", "3:2", "1:7", "a:b", "1-4"] {
            assert!(
                matches!(parse_sweep(bad), Err(Error::InvalidSweepRange { .. })),
                "{bad} should be rejected"
            );
        }
    }

    #[test]
    fn ablation_produces_four_equivalent_configs() {
        let mut cfg = RunConfig::with_bench(BenchKind::Synthetic, 10);
        cfg.depth = Some(2);
        cfg.precision = Precision::Double;
        let rows = ablate(&cfg).unwrap();
        let labels: Vec<&str> = rows.iter().map(|o| o.summary.config.as_str()).collect();
        assert_eq!(labels, ["full", "no-buffering", "no-fusion", "scalar"]);
        for row in &rows {
            let v = row.reports[0].verify.unwrap();
            assert!(v.pass, "{}: diff {}", row.summary.config, v.max_abs_diff);
        }
        // The rejected kernel moves more state bytes than the buffered one.
        assert!(
            rows[1].summary.counters.mem_bytes > rows[0].summary.counters.mem_bytes,
            "temp-result kernel should cost more state traffic"
        );
        // Disabling fusion lowers arithmetic intensity.
        assert!(rows[2].summary.ai < rows[0].summary.ai);
        // The scalar row issues no vector ops.
        assert_eq!(rows[3].summary.counters.vector_ops, 0);
    }

    #[test]
    fn stable_output_zeroes_timing_only() {
        let mut cfg = ghz_cfg(6);
        cfg.stable_output = true;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.reports[0], b.reports[0], "stable reports must be identical");
        assert_eq!(a.reports[0].wall_ms, 0.0);
        assert!(a.reports[0].gate_timings_ms.iter().all(|t| t.ms == 0.0));
        assert!(a.reports[0].counters.vector_ops > 0);
    }

    #[test]
    fn dump_files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let state_path = dir.path().join("state.qst");
        let plan_path = dir.path().join("plan.txt");
        let mut cfg = ghz_cfg(5);
        cfg.precision = Precision::Double;
        cfg.dump_state = Some(state_path.clone());
        cfg.dump_plan = Some(plan_path.clone());
        run(&cfg).unwrap();
        let loaded = StateVector::<f64>::load(&state_path).unwrap();
        assert_eq!(loaded.n_qubits(), 5);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((loaded.amplitude(0).re - h).abs() < 1e-12);
        assert!((loaded.amplitude(31).re - h).abs() < 1e-12);
        let plan = std::fs::read_to_string(&plan_path).unwrap();
        assert!(plan.contains("fusion plan"));
    }

    #[test]
    fn missing_source_is_a_validation_error() {
        let cfg = RunConfig::default();
        let err = run(&cfg).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn qubit_override_must_cover_the_circuit() {
        let mut circuit = Circuit::new("wide", 6);
        circuit.push(gate::hadamard(5)).unwrap();
        let mut cfg = RunConfig {
            circuit: Some(circuit),
            n: Some(4),
            ..RunConfig::default()
        };
        assert!(matches!(run(&cfg), Err(Error::InvalidFlag { .. })));
        cfg.n = Some(8);
        let output = run(&cfg).unwrap();
        assert_eq!(output.reports[0].circuit.n, 8);
    }

    #[test]
    fn renderers_cover_the_key_numbers() {
        let mut cfg = ghz_cfg(6);
        cfg.verify = true;
        let output = run(&cfg).unwrap();
        let text = render_summary(&output);
        assert!(text.contains("ghz6"));
        assert!(text.contains("verify"));
        let table = render_comparison(std::slice::from_ref(&output));
        assert!(table.contains("config"));
        assert!(table.contains("run"));
    }
}
