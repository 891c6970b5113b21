//! Portable vectorization metrics.
//!
//! Hardware counters differ per CPU and say nothing on machines without
//! scalable vector units, so the kernels tally their own model counters:
//!
//! * `vector_ops` / `scalar_ops`: predicated vector operations issued versus
//!   plain scalar operations (the fallback path and the reference engine).
//!   Counted operations are state loads, state stores, and arithmetic; mask
//!   bookkeeping, broadcasts, and staging-buffer traffic ride along for free,
//!   matching how such helper ops disappear against memory-bound kernels.
//! * `active_lane_sum`: total of the active-lane counts over all vector ops;
//!   divided by `vector_ops` it yields the average vector length. A fully
//!   predicated-off op never issues, so zero-active ops do not occur.
//! * `flops`: floating-point model count with the usual convention of 6 per
//!   complex multiply and 2 per complex add, scaled by active lanes.
//! * `mem_bytes`: bytes of state traffic. Every state component access,
//!   load or store, is charged the width of one complex element, because the
//!   amplitude's two components always move together as one logical access.
//! * `buffer_bytes`: same charging rule for staging-buffer fills and drains;
//!   kept separate because the buffer is cache-resident by construction.
//!
//! The derived figures:
//!
//! * average vector length (AVL): `active_lane_sum / vector_ops`;
//! * instruction reduction ratio (IRR): scalar-equivalent op count divided
//!   by `vector_ops + scalar_ops`;
//! * arithmetic intensity (AI): `flops / mem_bytes`, flops per byte of state
//!   traffic.
//!
//! [`RunReport`] is the structured output of one harness run. Its leading
//! field names (`wall_ms`, `avl`, `irr`, `ai`, `vector_ops`, `scalar_ops`,
//! `fusion{before,after,max_f}`, `circuit{name,n,seed}`) are a stable JSON
//! schema; downstream tooling may rely on them.

use serde::{Deserialize, Serialize};

/// Per-run counter block. Merging worker-local blocks is plain addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorCounters {
    pub vector_ops: u64,
    pub scalar_ops: u64,
    pub active_lane_sum: u64,
    /// Vector ops whose predicate had every lane active.
    pub full_mask_ops: u64,
    /// Vector ops with at least one inactive lane.
    pub partial_mask_ops: u64,
    pub flops: u64,
    pub mem_bytes: u64,
    pub buffer_bytes: u64,
}

impl VectorCounters {
    /// Records one predicated vector op with `active` live lanes out of
    /// `lanes`.
    #[inline]
    pub fn vector_op(&mut self, active: u64, lanes: u64) {
        debug_assert!(active >= 1 && active <= lanes);
        self.vector_ops += 1;
        self.active_lane_sum += active;
        if active == lanes {
            self.full_mask_ops += 1;
        } else {
            self.partial_mask_ops += 1;
        }
    }

    /// Records `count` scalar operations.
    #[inline]
    pub fn scalar(&mut self, count: u64) {
        self.scalar_ops += count;
    }

    /// Average active lanes per vector op; 0 before any vector op.
    pub fn avl(&self) -> f64 {
        if self.vector_ops == 0 {
            0.0
        } else {
            self.active_lane_sum as f64 / self.vector_ops as f64
        }
    }

    /// Instruction reduction against a scalar-equivalent op count; an empty
    /// run reduced nothing and reports 1 by convention.
    pub fn irr(&self, scalar_equivalent: u64) -> f64 {
        let issued = self.vector_ops + self.scalar_ops;
        if issued == 0 {
            1.0
        } else {
            scalar_equivalent as f64 / issued as f64
        }
    }

    /// Flops per byte of state traffic; 0 when nothing was computed.
    pub fn arithmetic_intensity(&self) -> f64 {
        if self.mem_bytes == 0 {
            0.0
        } else {
            self.flops as f64 / self.mem_bytes as f64
        }
    }

    pub fn merge(&mut self, other: &VectorCounters) {
        self.vector_ops += other.vector_ops;
        self.scalar_ops += other.scalar_ops;
        self.active_lane_sum += other.active_lane_sum;
        self.full_mask_ops += other.full_mask_ops;
        self.partial_mask_ops += other.partial_mask_ops;
        self.flops += other.flops;
        self.mem_bytes += other.mem_bytes;
        self.buffer_bytes += other.buffer_bytes;
    }
}

/// Model cost of one complex multiply.
pub const FLOPS_COMPLEX_MUL: u64 = 6;
/// Model cost of one complex add.
pub const FLOPS_COMPLEX_ADD: u64 = 2;
/// Multiply-accumulate after the first term: one mul and one add.
pub const FLOPS_COMPLEX_MULADD: u64 = FLOPS_COMPLEX_MUL + FLOPS_COMPLEX_ADD;

/// Context line attached to every report: the counters here are exact
/// model tallies, while numbers published for real scalable-vector silicon
/// are sampled events. The silicon figures bracket what these workloads
/// sustain in practice.
pub const HARDWARE_REFERENCE: &str = "Published runs on scalable-vector silicon \
    report AVL 3.40-3.75 at 4 lanes and IRR 3.5-4.7 at 16 lanes on these \
    workload families; emulated counters are exact tallies, not sampled events.";

/// Identity of the circuit a report describes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitInfo {
    pub name: String,
    pub n: u32,
    pub seed: u64,
}

/// Fusion outcome: gate counts before and after planning, and the widest
/// fused gate the plan actually contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionInfo {
    pub before: usize,
    pub after: usize,
    pub max_f: usize,
}

/// Wall time of one applied (post-fusion) gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateTiming {
    pub gate: String,
    pub ms: f64,
}

/// Outcome of a backend cross-check on the same run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub max_abs_diff: f64,
    pub expectation_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Structured result of one run. The first eight fields are the stable
/// schema; everything after them is descriptive detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub wall_ms: f64,
    pub avl: f64,
    pub irr: f64,
    pub ai: f64,
    pub vector_ops: u64,
    pub scalar_ops: u64,
    pub fusion: FusionInfo,
    pub circuit: CircuitInfo,
    pub backend: String,
    pub precision: String,
    pub lanes: u32,
    pub workers: usize,
    pub max_fuse: usize,
    pub rep: usize,
    pub expectation: f64,
    /// Scalar-oracle op count for the same gate list; the IRR denominator's
    /// numerator.
    pub ref_scalar_ops: u64,
    pub counters: VectorCounters,
    pub gate_timings_ms: Vec<GateTiming>,
    pub hardware_reference: String,
    pub verify: Option<VerifyReport>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(text)
    }
}

/// One aggregate line over the repetitions of a run: mean and minimum wall
/// time, counters from the first repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: String,
    pub circuit: CircuitInfo,
    pub backend: String,
    pub precision: String,
    pub lanes: u32,
    pub workers: usize,
    pub max_fuse: usize,
    pub reps: usize,
    pub wall_ms_mean: f64,
    pub wall_ms_min: f64,
    pub avl: f64,
    pub irr: f64,
    pub ai: f64,
    pub expectation: f64,
    pub fusion: FusionInfo,
    pub counters: VectorCounters,
}

impl RunSummary {
    /// Aggregates per-rep reports; `config` labels the row (plain runs use
    /// "run", sweeps and ablations label their variants).
    pub fn from_reports(config: impl Into<String>, reports: &[RunReport]) -> RunSummary {
        assert!(!reports.is_empty());
        let first = &reports[0];
        let mean = reports.iter().map(|r| r.wall_ms).sum::<f64>() / reports.len() as f64;
        let min = reports.iter().map(|r| r.wall_ms).fold(f64::INFINITY, f64::min);
        RunSummary {
            config: config.into(),
            circuit: first.circuit.clone(),
            backend: first.backend.clone(),
            precision: first.precision.clone(),
            lanes: first.lanes,
            workers: first.workers,
            max_fuse: first.max_fuse,
            reps: reports.len(),
            wall_ms_mean: mean,
            wall_ms_min: min,
            avl: first.avl,
            irr: first.irr,
            ai: first.ai,
            expectation: first.expectation,
            fusion: first.fusion,
            counters: first.counters,
        }
    }

    pub fn csv_line(&self) -> String {
        let c = &self.counters;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.config,
            self.circuit.name,
            self.circuit.n,
            self.circuit.seed,
            self.backend,
            self.precision,
            self.lanes,
            self.workers,
            self.max_fuse,
            self.reps,
            self.wall_ms_mean,
            self.wall_ms_min,
            self.avl,
            self.irr,
            self.ai,
            self.expectation,
            self.fusion.before,
            self.fusion.after,
            self.fusion.max_f,
            c.vector_ops,
            c.scalar_ops,
            c.active_lane_sum,
            c.flops,
            c.mem_bytes,
            c.buffer_bytes,
        )
    }
}

/// Header matching [`RunSummary::csv_line`].
pub fn csv_header() -> &'static str {
    "config,circuit,n,seed,backend,precision,lanes,workers,max_fuse,reps,\
     wall_ms_mean,wall_ms_min,avl,irr,ai,expectation,\
     fusion_before,fusion_after,fusion_max_f,\
     vector_ops,scalar_ops,active_lane_sum,flops,mem_bytes,buffer_bytes"
}
