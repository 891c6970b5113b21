//! Lane-blocked engine with predicated kernels.
//!
//! The state lives in the blocked layout whose lane count matches the
//! emulated vector register, so one "vector op" touches one component plane
//! of one block. Gates fall into two shapes:
//!
//! * every target and control at position `>= S` (`S` = log2 lanes): blocks
//!   pair with whole blocks, all predicates are full, every op runs all
//!   lanes;
//! * some target or control below `S`: partner amplitudes share a block.
//!   The kernel then runs each matrix row under its pattern predicate from
//!   [`crate::mask`], staged through the load buffer from [`crate::buffer`]
//!   so no cross-lane gather is ever needed. Every op still carries the same
//!   active-lane count `2^(S - l - lc)`.
//!
//! When `l + lc = S` a predicate would keep a single lane, so the kernel
//! drops to a scalar path and books scalar ops instead; vector utilization
//! reporting stays honest.
//!
//! Both engines round identically: the same multiply-accumulate helper in
//! the same matrix-column order, so a run here is bitwise comparable to the
//! scalar reference.
//!
//! The emulation executes lane loops in ordinary scalar Rust. Nothing here
//! requires host SIMD; the point is the op stream and its counters, which
//! depend only on the configured lane shape.

use crate::buffer::LoadBuffer;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::mask::MaskSet;
use crate::metrics::VectorCounters;
use crate::state::{complex_mac, LaneConfig, Layout, Scalar, StateVector};

/// Kernel strategy for gates with low targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelVariant {
    /// Stage each input row into the load buffer once, then compute with
    /// shifted buffer reads and write back per output row.
    #[default]
    Buffered,
    /// No staging of inputs: re-load state rows per output row (shifted,
    /// predicated), collect results in a temporary array, copy back at the
    /// end. Same arithmetic and results, more issued loads and more state
    /// traffic; exists as the ablation baseline for the buffered path.
    TempArray,
}

/// Lane-blocked engine configuration.
#[derive(Debug, Clone, Copy)]
pub struct Engine {
    cfg: LaneConfig,
    workers: usize,
    variant: KernelVariant,
}

impl Engine {
    pub fn new(cfg: LaneConfig) -> Engine {
        Engine {
            cfg,
            workers: 1,
            variant: KernelVariant::Buffered,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Result<Engine> {
        if workers == 0 {
            return Err(Error::ZeroWorkers);
        }
        self.workers = workers;
        Ok(self)
    }

    pub fn with_variant(mut self, variant: KernelVariant) -> Engine {
        self.variant = variant;
        self
    }

    pub fn lane_config(&self) -> LaneConfig {
        self.cfg
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    fn check_state<T: Scalar>(&self, sv: &StateVector<T>) -> Result<()> {
        if T::PRECISION != self.cfg.precision() {
            return Err(Error::LayoutMismatch {
                expected: format!("{} precision state", self.cfg.precision()),
                found: T::PRECISION.to_string(),
            });
        }
        match sv.layout() {
            Layout::Blocked { lanes } if lanes == self.cfg.num_vals() => Ok(()),
            Layout::Blocked { lanes } => Err(Error::LaneMismatch {
                expected: self.cfg.num_vals(),
                found: lanes,
            }),
            Layout::Interleaved => Err(Error::LayoutMismatch {
                expected: format!("blocked({})", self.cfg.num_vals()),
                found: "interleaved".into(),
            }),
        }
    }

    /// Applies one gate in place. The state must be blocked with this
    /// engine's lane count.
    pub fn apply_gate<T: Scalar>(
        &self,
        sv: &mut StateVector<T>,
        gate: &Gate,
        ctr: &mut VectorCounters,
    ) -> Result<()> {
        self.check_state(sv)?;
        gate.validate_for(sv.n_qubits())?;
        let plan = GatePlan::build(self.cfg, gate)?;
        self.run_plan(sv, &plan, ctr);
        Ok(())
    }

    pub fn apply_gates<T: Scalar>(
        &self,
        sv: &mut StateVector<T>,
        gates: &[Gate],
        ctr: &mut VectorCounters,
    ) -> Result<()> {
        for gate in gates {
            self.apply_gate(sv, gate, ctr)?;
        }
        Ok(())
    }

    pub fn apply_circuit<T: Scalar>(
        &self,
        sv: &mut StateVector<T>,
        circuit: &Circuit,
        ctr: &mut VectorCounters,
    ) -> Result<()> {
        self.apply_gates(sv, &circuit.gates, ctr)
    }

    fn run_plan<T: Scalar>(
        &self,
        sv: &mut StateVector<T>,
        plan: &GatePlan<T>,
        ctr: &mut VectorCounters,
    ) {
        let lanes = self.cfg.num_vals();
        let n = sv.n_qubits();
        let blocks = 1usize << (n - self.cfg.lane_bits());
        let data = sv.data_mut();

        // Enumerate iteration bases: block indices with every high-target
        // bit clear and every high-control bit set.
        let bases: Vec<usize> = (0..blocks)
            .filter(|b| b & plan.iter_mask == plan.iter_fixed)
            .collect();

        let worker_count = self.workers.min(bases.len()).max(1);
        if worker_count == 1 {
            let mut scratch = KernelScratch::new(plan.rows, lanes);
            for &base in &bases {
                run_iteration(data, lanes, plan, base, self.variant, &mut scratch, ctr);
            }
            return;
        }

        // Each iteration owns the blocks `base | block_off[m]`: bases differ
        // in free block bits, offsets only set high-target bits, so two
        // iterations never touch the same block and workers can share the
        // state without synchronization.
        let shared = SharedSlice::new(data);
        let chunk = bases.len().div_ceil(worker_count);
        let mut worker_counters = vec![VectorCounters::default(); worker_count];
        std::thread::scope(|scope| {
            for (slice_bases, wctr) in bases.chunks(chunk).zip(worker_counters.iter_mut()) {
                let shared = &shared;
                let variant = self.variant;
                scope.spawn(move || {
                    let data = unsafe { shared.slice() };
                    let mut scratch = KernelScratch::new(plan.rows, lanes);
                    for &base in slice_bases {
                        run_iteration(data, lanes, plan, base, variant, &mut scratch, wctr);
                    }
                });
            }
        });
        for wctr in &worker_counters {
            ctr.merge(wctr);
        }
    }

    /// Mean amplitude magnitude over the whole state; whole-block vector
    /// loads, four arithmetic ops per block, no stores. Runs on one thread
    /// in block order so the f64 accumulation order never depends on the
    /// worker count.
    pub fn expectation<T: Scalar>(
        &self,
        sv: &StateVector<T>,
        ctr: &mut VectorCounters,
    ) -> Result<f64> {
        self.check_state(sv)?;
        let lanes = self.cfg.num_vals();
        let complex_bytes = T::PRECISION.complex_bytes() as u64;
        let mut sum = 0.0f64;
        for block in sv.data().chunks_exact(2 * lanes) {
            for lane in 0..lanes {
                let re = block[lane];
                let im = block[lanes + lane];
                sum += (re * re + im * im).sqrt().to_f64();
            }
            // Two component loads and four arithmetic ops, all full-lane.
            for _ in 0..6 {
                ctr.vector_op(lanes as u64, lanes as u64);
            }
            ctr.flops += 5 * lanes as u64;
            ctr.mem_bytes += 2 * lanes as u64 * complex_bytes;
        }
        Ok(sum / sv.len() as f64)
    }
}

/// Everything a gate application needs, precomputed once per gate.
struct GatePlan<T: Scalar> {
    rows: usize,
    /// Matrix narrowed to the state precision, row-major.
    matrix: Vec<(T, T)>,
    /// Lane-bit pattern of each matrix row (low target bits only).
    lane_pat: Vec<u64>,
    /// Block offset of each matrix row (high target bits, in block units).
    block_off: Vec<usize>,
    /// Mask index of each matrix row into `masks`.
    pid: Vec<usize>,
    masks: MaskSet,
    /// Block bits owned by high targets and high controls.
    iter_mask: usize,
    /// Required value of those bits at an iteration base.
    iter_fixed: usize,
    /// Lanes each predicated op keeps active.
    active: u64,
}

impl<T: Scalar> GatePlan<T> {
    fn build(cfg: LaneConfig, gate: &Gate) -> Result<GatePlan<T>> {
        let s = cfg.lane_bits();
        let k = gate.k();
        let rows = 1usize << k;

        let low_targets: Vec<u32> = gate.targets.iter().copied().filter(|&t| t < s).collect();
        let low_controls: Vec<u32> = gate.controls.iter().copied().filter(|&c| c < s).collect();
        let masks = MaskSet::build(cfg, &low_targets, &low_controls)?;

        let mut lane_pat = vec![0u64; rows];
        let mut block_off = vec![0usize; rows];
        let mut pid = vec![0usize; rows];
        for m in 0..rows {
            let mut low_index = 0usize;
            let mut low_seen = 0;
            for (j, &t) in gate.targets.iter().enumerate() {
                if (m >> j) & 1 == 1 {
                    if t < s {
                        lane_pat[m] |= 1 << t;
                    } else {
                        block_off[m] |= 1 << (t - s);
                    }
                }
                if t < s {
                    low_index |= ((m >> j) & 1) << low_seen;
                    low_seen += 1;
                }
            }
            pid[m] = low_index;
            debug_assert_eq!(masks.patterns[pid[m]], lane_pat[m]);
        }

        let high_target_mask: usize = gate
            .targets
            .iter()
            .filter(|&&t| t >= s)
            .map(|&t| 1usize << (t - s))
            .sum();
        let high_control_mask: usize = gate
            .controls
            .iter()
            .filter(|&&c| c >= s)
            .map(|&c| 1usize << (c - s))
            .sum();

        let matrix = gate
            .matrix
            .entries()
            .iter()
            .map(|e| (T::from_f64(e.re), T::from_f64(e.im)))
            .collect();

        Ok(GatePlan {
            rows,
            matrix,
            lane_pat,
            block_off,
            pid,
            active: masks.active as u64,
            masks,
            iter_mask: high_target_mask | high_control_mask,
            iter_fixed: high_control_mask,
        })
    }
}

/// Per-worker scratch; reused across iterations.
struct KernelScratch<T: Scalar> {
    buffer: LoadBuffer<T>,
    acc_re: Vec<T>,
    acc_im: Vec<T>,
    /// Result staging for the TempArray variant, row-major like the buffer.
    tmp_re: Vec<T>,
    tmp_im: Vec<T>,
}

impl<T: Scalar> KernelScratch<T> {
    fn new(rows: usize, lanes: usize) -> Self {
        KernelScratch {
            buffer: LoadBuffer::new(rows, lanes),
            acc_re: vec![T::zero(); lanes],
            acc_im: vec![T::zero(); lanes],
            tmp_re: vec![T::zero(); rows * lanes],
            tmp_im: vec![T::zero(); rows * lanes],
        }
    }
}

#[inline]
fn block_range(block: usize, lanes: usize) -> std::ops::Range<usize> {
    2 * block * lanes..2 * (block + 1) * lanes
}

fn run_iteration<T: Scalar>(
    data: &mut [T],
    lanes: usize,
    plan: &GatePlan<T>,
    base: usize,
    variant: KernelVariant,
    scratch: &mut KernelScratch<T>,
    ctr: &mut VectorCounters,
) {
    if plan.masks.degenerate() {
        run_iteration_scalar(data, lanes, plan, base, ctr);
        return;
    }
    match variant {
        KernelVariant::Buffered => run_iteration_buffered(data, lanes, plan, base, scratch, ctr),
        KernelVariant::TempArray => run_iteration_temp(data, lanes, plan, base, scratch, ctr),
    }
}

fn run_iteration_buffered<T: Scalar>(
    data: &mut [T],
    lanes: usize,
    plan: &GatePlan<T>,
    base: usize,
    scratch: &mut KernelScratch<T>,
    ctr: &mut VectorCounters,
) {
    let rows = plan.rows;
    let nv = lanes as u64;
    let active = plan.active;
    let complex_bytes = T::PRECISION.complex_bytes() as u64;

    // Stage every input row once, under its own predicate.
    for m in 0..rows {
        let block = &data[block_range(base | plan.block_off[m], lanes)];
        scratch
            .buffer
            .fill_row(m, block, plan.masks.masks[plan.pid[m]], ctr);
    }

    for m_out in 0..rows {
        let mask_out = plan.masks.masks[plan.pid[m_out]];
        let pat_out = plan.lane_pat[m_out];
        for lane in mask_out.iter_active() {
            scratch.acc_re[lane as usize] = T::zero();
            scratch.acc_im[lane as usize] = T::zero();
        }
        for m_in in 0..rows {
            let (u_re, u_im) = plan.matrix[m_out * rows + m_in];
            // Shifted buffer access: an output lane with pattern pat_out
            // finds its row-m_in partner at lane + (pat_in - pat_out),
            // carry-free because the pattern bits are exchanged in place.
            let pat_in = plan.lane_pat[m_in];
            for lane in mask_out.iter_active() {
                let partner = (lane as u64 - pat_out + pat_in) as usize;
                let (v_re, v_im) = scratch.buffer.at(m_in, partner);
                complex_mac(
                    &mut scratch.acc_re[lane as usize],
                    &mut scratch.acc_im[lane as usize],
                    u_re,
                    u_im,
                    v_re,
                    v_im,
                );
            }
            for _ in 0..4 {
                ctr.vector_op(active, nv);
            }
            ctr.flops += if m_in == 0 { 6 } else { 8 } * active;
            ctr.buffer_bytes += 2 * active * complex_bytes;
        }
        // Write the finished row straight back; later rows read the buffer,
        // never the state, so nothing is clobbered.
        let block = &mut data[block_range(base | plan.block_off[m_out], lanes)];
        for lane in mask_out.iter_active() {
            let lane = lane as usize;
            block[lane] = scratch.acc_re[lane];
            block[lanes + lane] = scratch.acc_im[lane];
        }
        ctr.vector_op(active, nv);
        ctr.vector_op(active, nv);
        ctr.mem_bytes += 2 * active * complex_bytes;
    }
}

fn run_iteration_temp<T: Scalar>(
    data: &mut [T],
    lanes: usize,
    plan: &GatePlan<T>,
    base: usize,
    scratch: &mut KernelScratch<T>,
    ctr: &mut VectorCounters,
) {
    let rows = plan.rows;
    let nv = lanes as u64;
    let active = plan.active;
    let complex_bytes = T::PRECISION.complex_bytes() as u64;

    for m_out in 0..rows {
        let mask_out = plan.masks.masks[plan.pid[m_out]];
        let pat_out = plan.lane_pat[m_out];
        for lane in mask_out.iter_active() {
            scratch.acc_re[lane as usize] = T::zero();
            scratch.acc_im[lane as usize] = T::zero();
        }
        for m_in in 0..rows {
            let (u_re, u_im) = plan.matrix[m_out * rows + m_in];
            let pat_in = plan.lane_pat[m_in];
            let block = &data[block_range(base | plan.block_off[m_in], lanes)];
            for lane in mask_out.iter_active() {
                let partner = (lane as u64 - pat_out + pat_in) as usize;
                complex_mac(
                    &mut scratch.acc_re[lane as usize],
                    &mut scratch.acc_im[lane as usize],
                    u_re,
                    u_im,
                    block[partner],
                    block[lanes + partner],
                );
            }
            // Two predicated state loads per input row, every output row:
            // this is the traffic the load buffer exists to remove.
            ctr.vector_op(active, nv);
            ctr.vector_op(active, nv);
            ctr.mem_bytes += 2 * active * complex_bytes;
            for _ in 0..4 {
                ctr.vector_op(active, nv);
            }
            ctr.flops += if m_in == 0 { 6 } else { 8 } * active;
        }
        // Results cannot overwrite the state yet: later output rows still
        // load it. Park them in the temp array.
        for lane in mask_out.iter_active() {
            let lane = lane as usize;
            scratch.tmp_re[m_out * lanes + lane] = scratch.acc_re[lane];
            scratch.tmp_im[m_out * lanes + lane] = scratch.acc_im[lane];
        }
        ctr.buffer_bytes += 2 * active * complex_bytes;
    }

    for m_out in 0..rows {
        let mask_out = plan.masks.masks[plan.pid[m_out]];
        let block = &mut data[block_range(base | plan.block_off[m_out], lanes)];
        for lane in mask_out.iter_active() {
            let lane = lane as usize;
            block[lane] = scratch.tmp_re[m_out * lanes + lane];
            block[lanes + lane] = scratch.tmp_im[m_out * lanes + lane];
        }
        ctr.vector_op(active, nv);
        ctr.vector_op(active, nv);
        ctr.mem_bytes += 2 * active * complex_bytes;
        ctr.buffer_bytes += 2 * active * complex_bytes;
    }
}

/// Fallback when every predicate keeps one lane: the same arithmetic as the
/// reference engine, addressed through the blocked layout, booked as scalar
/// ops.
fn run_iteration_scalar<T: Scalar>(
    data: &mut [T],
    lanes: usize,
    plan: &GatePlan<T>,
    base: usize,
    ctr: &mut VectorCounters,
) {
    let rows = plan.rows;
    let complex_bytes = T::PRECISION.complex_bytes() as u64;
    debug_assert_eq!(plan.active, 1);

    // Each mask keeps exactly one lane; collect the row addresses once.
    let mut addr = Vec::with_capacity(rows);
    for m in 0..rows {
        let lane = plan.masks.masks[plan.pid[m]]
            .iter_active()
            .next()
            .expect("masks keep one lane") as usize;
        let range = block_range(base | plan.block_off[m], lanes);
        addr.push((range.start + lane, range.start + lanes + lane));
    }

    let mut input = vec![(T::zero(), T::zero()); rows];
    for (m, &(re, im)) in addr.iter().enumerate() {
        input[m] = (data[re], data[im]);
        ctr.scalar(2);
        ctr.mem_bytes += 2 * complex_bytes;
    }
    for (m_out, &(re, im)) in addr.iter().enumerate() {
        let mut acc_re = T::zero();
        let mut acc_im = T::zero();
        for (m_in, &(in_re, in_im)) in input.iter().enumerate() {
            let (u_re, u_im) = plan.matrix[m_out * rows + m_in];
            complex_mac(&mut acc_re, &mut acc_im, u_re, u_im, in_re, in_im);
            ctr.scalar(4);
            ctr.flops += if m_in == 0 { 6 } else { 8 };
        }
        data[re] = acc_re;
        data[im] = acc_im;
        ctr.scalar(2);
        ctr.mem_bytes += 2 * complex_bytes;
    }
}

/// Shared mutable view of the state for scoped workers. Soundness rests on
/// the iteration-ownership argument in [`Engine::run_plan`]: distinct bases
/// touch disjoint blocks, and each base is handled by exactly one worker.
struct SharedSlice<T> {
    ptr: *mut T,
    len: usize,
}

unsafe impl<T: Send> Send for SharedSlice<T> {}
unsafe impl<T: Send> Sync for SharedSlice<T> {}

impl<T> SharedSlice<T> {
    fn new(slice: &mut [T]) -> Self {
        SharedSlice {
            ptr: slice.as_mut_ptr(),
            len: slice.len(),
        }
    }

    /// Caller promises to touch only indices no other holder touches.
    #[allow(clippy::mut_from_ref)]
    unsafe fn slice(&self) -> &mut [T] {
        std::slice::from_raw_parts_mut(self.ptr, self.len)
    }
}

/// Convenience: blocked state, engine, and a gate list in one call; returns
/// the final state and the counters. Examples and tests use it.
pub fn run_gates<T: Scalar>(
    cfg: LaneConfig,
    n: u32,
    gates: &[Gate],
) -> Result<(StateVector<T>, VectorCounters)> {
    let engine = Engine::new(cfg);
    let mut sv = StateVector::<T>::zero(n, Layout::Blocked {
        lanes: cfg.num_vals(),
    })?;
    let mut ctr = VectorCounters::default();
    engine.apply_gates(&mut sv, gates, &mut ctr)?;
    Ok((sv, ctr))
}
