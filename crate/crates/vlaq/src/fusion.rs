//! Gate fusion planning.
//!
//! Narrow gates dominate real circuits, and a 1-qubit kernel does 28 model
//! flops per 64 bytes of state traffic; memory bandwidth, not arithmetic, is
//! the wall. Fusing gates into wider dense matrices raises the flops per
//! byte: an `f`-target fused gate performs `8*4^f - 2^(f+1)` flops per group
//! against `4*2^f` component accesses, so arithmetic intensity roughly
//! doubles per extra fused qubit.
//!
//! Two passes, both preserving circuit semantics:
//!
//! * vertical: consecutive gates with identical target and control sets
//!   multiply into one matrix (the later gate becomes the left factor). The
//!   merged gate keeps the first gate's target order; later matrices are
//!   permuted into it first.
//! * horizontal: gates are layered as-soon-as-possible (a gate's layer is
//!   one past the deepest layer touching any of its qubits). Within a
//!   layer, uncontrolled gates have pairwise-disjoint supports and commute,
//!   so they pack greedily, in arrival order, into tensor products of up to
//!   `f` targets. Controlled gates stay standalone: their value is the
//!   subspace they *skip*, and widening them into dense matrices would
//!   forfeit exactly that.
//!
//! Every fused gate records which original gate indices it absorbed, so
//! reports can say what the plan did.

use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Gate, MAX_GATE_QUBITS};
use crate::state::LaneConfig;

/// Upper bound on the fusion width; matches the widest gate kernels accept.
pub const MAX_FUSION_WIDTH: usize = MAX_GATE_QUBITS;

/// A gate in a fusion plan plus the original gate indices it replaces.
#[derive(Debug, Clone)]
pub struct FusedGate {
    pub gate: Gate,
    pub sources: Vec<usize>,
}

/// Result of planning fusion over one circuit.
#[derive(Debug, Clone)]
pub struct FusionPlan {
    pub n: u32,
    pub f: usize,
    pub gates: Vec<FusedGate>,
    pub original_len: usize,
}

/// Headline numbers of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FusionStats {
    /// Gate count before fusion.
    pub before: usize,
    /// Gate count after fusion.
    pub after: usize,
    /// Widest fused gate in targets.
    pub max_f: usize,
}

impl FusionPlan {
    pub fn stats(&self) -> FusionStats {
        FusionStats {
            before: self.original_len,
            after: self.gates.len(),
            max_f: self.gates.iter().map(|g| g.gate.k()).max().unwrap_or(0),
        }
    }

    /// The plan's gates alone, ready for an engine.
    pub fn to_gates(&self) -> Vec<Gate> {
        self.gates.iter().map(|fg| fg.gate.clone()).collect()
    }

    /// Human-readable plan listing.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let stats = self.stats();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "fusion plan: {} -> {} gates, width limit {}, widest {}",
            stats.before, stats.after, self.f, stats.max_f
        );
        for (i, fg) in self.gates.iter().enumerate() {
            let mut line = format!("  {i}: {} targets {:?}", fg.gate.name, fg.gate.targets);
            if !fg.gate.controls.is_empty() {
                let _ = write!(line, " controls {:?}", fg.gate.controls);
            }
            let _ = write!(line, "  <- {:?}", fg.sources);
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

fn check_width(f: usize) -> Result<()> {
    if f == 0 || f > MAX_FUSION_WIDTH {
        return Err(Error::FusionWidthOutOfRange {
            f,
            max: MAX_FUSION_WIDTH,
        });
    }
    Ok(())
}

fn same_set(a: &[u32], b: &[u32]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// Merges `next` into `acc` when both act on identical target and control
/// sets. `next` is applied after `acc`, so its matrix is the left factor.
fn merge_vertical(acc: &mut FusedGate, next: &Gate, next_index: usize) -> Result<()> {
    // Re-express the later matrix in the first gate's target order.
    let perm: Vec<usize> = next
        .targets
        .iter()
        .map(|t| {
            acc.gate
                .targets
                .iter()
                .position(|a| a == t)
                .expect("identical target sets")
        })
        .collect();
    let aligned = next.matrix.permute_qubits(&perm)?;
    acc.gate.matrix = aligned.matmul(&acc.gate.matrix)?;
    acc.gate.name = format!("{}*{}", next.name, acc.gate.name);
    acc.sources.push(next_index);
    Ok(())
}

/// Vertical pass: collapses consecutive runs of gates sharing target and
/// control sets. Idempotent; the output never has two adjacent entries with
/// identical sets.
pub fn fuse_vertical(gates: &[Gate]) -> Result<Vec<FusedGate>> {
    let mut out: Vec<FusedGate> = Vec::with_capacity(gates.len());
    for (i, g) in gates.iter().enumerate() {
        if let Some(last) = out.last_mut() {
            if same_set(&last.gate.targets, &g.targets)
                && same_set(&last.gate.controls, &g.controls)
            {
                merge_vertical(last, g, i)?;
                continue;
            }
        }
        out.push(FusedGate {
            gate: g.clone(),
            sources: vec![i],
        });
    }
    Ok(out)
}

/// Merges `next` into `acc` as a tensor product; `next`'s targets become the
/// high matrix bits.
fn merge_horizontal(acc: &mut FusedGate, next: &FusedGate) -> Result<()> {
    acc.gate.matrix = next.gate.matrix.tensor(&acc.gate.matrix)?;
    acc.gate.targets.extend_from_slice(&next.gate.targets);
    acc.gate.name = format!("{}+{}", acc.gate.name, next.gate.name);
    acc.sources.extend_from_slice(&next.sources);
    acc.sources.sort_unstable();
    Ok(())
}

/// Horizontal pass: packs disjoint uncontrolled gates of one dependency
/// layer into tensor products of at most `f` targets.
pub fn fuse_horizontal(n: u32, gates: Vec<FusedGate>, f: usize) -> Result<Vec<FusedGate>> {
    check_width(f)?;

    // As-soon-as-possible layering over qubit last-use depths.
    let mut qubit_layer = vec![0usize; n as usize];
    let mut layered: Vec<(usize, FusedGate)> = Vec::with_capacity(gates.len());
    let mut max_layer = 0;
    for fg in gates {
        let layer = fg
            .gate
            .targets
            .iter()
            .chain(&fg.gate.controls)
            .map(|&q| qubit_layer[q as usize])
            .max()
            .expect("gates have targets")
            + 1;
        for &q in fg.gate.targets.iter().chain(&fg.gate.controls) {
            qubit_layer[q as usize] = layer;
        }
        max_layer = max_layer.max(layer);
        layered.push((layer, fg));
    }

    let mut out = Vec::new();
    for target_layer in 1..=max_layer {
        let mut bin: Option<FusedGate> = None;
        for (layer, fg) in layered.iter().filter(|(l, _)| *l == target_layer) {
            debug_assert_eq!(*layer, target_layer);
            if !fg.gate.controls.is_empty() {
                // Controlled gates do not pack; emit in place.
                if let Some(acc) = bin.take() {
                    out.push(acc);
                }
                out.push(fg.clone());
                continue;
            }
            match &mut bin {
                None => bin = Some(fg.clone()),
                Some(acc) if acc.gate.k() + fg.gate.k() <= f => {
                    merge_horizontal(acc, fg)?;
                }
                Some(_) => {
                    out.push(bin.take().expect("just matched Some"));
                    bin = Some(fg.clone());
                }
            }
        }
        if let Some(acc) = bin.take() {
            out.push(acc);
        }
    }
    Ok(out)
}

/// Full planning: vertical collapse, then horizontal packing up to width
/// `f`.
pub fn plan_fusion(circuit: &Circuit, f: usize) -> Result<FusionPlan> {
    check_width(f)?;
    let vertical = fuse_vertical(&circuit.gates)?;
    let gates = fuse_horizontal(circuit.n, vertical, f)?;
    Ok(FusionPlan {
        n: circuit.n,
        f,
        gates,
        original_len: circuit.len(),
    })
}

/// Predicted arithmetic intensity of an `f`-target fused gate in flops per
/// byte: `2 * (3 * 2^(2f) + 2^f * (2^f - 1)) / (numVals * 2^(f+3))`. The
/// division is by a power of two times the lane count, so the f64 result is
/// exact for every width this crate accepts.
pub fn closed_form_ai(f: usize, num_vals: usize) -> f64 {
    let two_f = 1u64 << f;
    let numerator = 2 * (3 * two_f * two_f + two_f * (two_f - 1));
    let denominator = num_vals as u64 * (1u64 << (f + 3));
    numerator as f64 / denominator as f64
}

/// Tolerance above the machine balance that a recommended width may reach:
/// once intensity exceeds balance the kernel is compute bound and wider
/// matrices only add latency, but sitting a hair above the knee is fine.
const BALANCE_SLACK: f64 = 0.1;

/// Picks a fusion width for a machine described by a cache budget in bytes
/// and a balance point in flops per byte. The widest `f` wins whose working
/// set (dense matrix plus staging buffer) fits the budget and whose
/// predicted intensity does not overshoot the balance by more than the
/// slack; width 1 is the floor when nothing qualifies.
pub fn recommend_f(cfg: LaneConfig, cache_budget_bytes: u64, machine_balance: f64) -> usize {
    let elen_bytes = (cfg.elen_bits() / 8) as u64;
    let nv = cfg.num_vals() as u64;
    let mut best = 1;
    for f in 1..=MAX_FUSION_WIDTH {
        let matrix_bytes = (1u64 << (2 * f)) * 2 * elen_bytes;
        let buffer_bytes = 2 * (1u64 << f) * nv * elen_bytes;
        let fits = matrix_bytes + buffer_bytes <= cache_budget_bytes;
        let below_knee =
            closed_form_ai(f, cfg.num_vals()) <= machine_balance * (1.0 + BALANCE_SLACK);
        if fits && below_knee {
            best = f;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate;
    use crate::reference;
    use crate::state::Precision;
    use num_complex::Complex;

    fn operator_close(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).norm() <= tol, "entry {i}: {x} vs {y}");
        }
    }

    fn plan_as_circuit(plan: &FusionPlan) -> Circuit {
        let mut c = Circuit::new("fused", plan.n);
        for g in plan.to_gates() {
            c.push(g).unwrap();
        }
        c
    }

    #[test]
    fn vertical_collapses_identical_sets() {
        let gates = vec![
            gate::hadamard(0),
            gate::hadamard(0),
            gate::hadamard(1),
            gate::rz(1, 0.3),
            gate::cnot(0, 1),
        ];
        let fused = fuse_vertical(&gates).unwrap();
        assert_eq!(fused.len(), 3);
        assert_eq!(fused[0].sources, vec![0, 1]);
        assert_eq!(fused[1].sources, vec![2, 3]);
        assert_eq!(fused[2].sources, vec![4]);
        // H*H = identity.
        let m = &fused[0].gate.matrix;
        assert!((m.at(0, 0) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!(m.at(0, 1).norm() < 1e-15);
    }

    #[test]
    fn vertical_respects_target_order_differences() {
        // swap-in-different-order: both gates act on {0,1}; the second lists
        // targets reversed. The merged matrix must equal applying both.
        let mut a = gate::cnot(0, 1);
        a.controls.clear();
        a.targets = vec![0, 1];
        a.matrix = gate::swap(0, 1).matrix;
        let mut b = gate::cnot(0, 1);
        b.controls.clear();
        b.targets = vec![1, 0];
        b.matrix = gate::swap(0, 1).matrix;

        let mut plain = Circuit::new("plain", 2);
        plain.push(a.clone()).unwrap();
        plain.push(b.clone()).unwrap();
        let fused = fuse_vertical(&[a, b]).unwrap();
        assert_eq!(fused.len(), 1);
        let fused_circuit = {
            let mut c = Circuit::new("f", 2);
            c.push(fused[0].gate.clone()).unwrap();
            c
        };
        let lhs = reference::dense_operator(&plain).unwrap();
        let rhs = reference::dense_operator(&fused_circuit).unwrap();
        operator_close(&lhs, &rhs, 1e-14);
    }

    #[test]
    fn vertical_merges_controlled_pairs() {
        let gates = vec![gate::cphase(0, 1, 0.4), gate::cphase(0, 1, 0.6)];
        let fused = fuse_vertical(&gates).unwrap();
        assert_eq!(fused.len(), 1);
        let expect = gate::cphase(0, 1, 1.0);
        for (x, y) in fused[0]
            .gate
            .matrix
            .entries()
            .iter()
            .zip(expect.matrix.entries())
        {
            assert!((x - y).norm() < 1e-15);
        }
        assert_eq!(fused[0].gate.controls, vec![0]);
    }

    #[test]
    fn vertical_is_idempotent() {
        let gates = vec![
            gate::hadamard(0),
            gate::hadamard(0),
            gate::pauli_x(0),
            gate::hadamard(1),
        ];
        let once = fuse_vertical(&gates).unwrap();
        let gates_once: Vec<Gate> = once.iter().map(|f| f.gate.clone()).collect();
        let twice = fuse_vertical(&gates_once).unwrap();
        assert_eq!(once.len(), twice.len());
    }

    #[test]
    fn horizontal_packs_disjoint_singles() {
        let mut circuit = Circuit::new("packs", 4);
        for q in 0..4 {
            circuit.push(gate::hadamard(q)).unwrap();
        }
        let plan = plan_fusion(&circuit, 2).unwrap();
        let stats = plan.stats();
        assert_eq!(stats.before, 4);
        assert_eq!(stats.after, 2);
        assert_eq!(stats.max_f, 2);
        assert_eq!(plan.gates[0].gate.targets, vec![0, 1]);
        assert_eq!(plan.gates[0].sources, vec![0, 1]);
        assert_eq!(plan.gates[1].gate.targets, vec![2, 3]);

        // One 4x4 pass accumulates differently than two 2x2 passes, so the
        // operators agree to rounding, not bitwise.
        let lhs = reference::dense_operator(&circuit).unwrap();
        let rhs = reference::dense_operator(&plan_as_circuit(&plan)).unwrap();
        operator_close(&lhs, &rhs, 1e-15);
    }

    #[test]
    fn horizontal_width_three() {
        let mut circuit = Circuit::new("w3", 3);
        circuit.push(gate::pauli_x(0)).unwrap();
        circuit.push(gate::pauli_y(1)).unwrap();
        circuit.push(gate::pauli_z(2)).unwrap();
        let plan = plan_fusion(&circuit, 3).unwrap();
        assert_eq!(plan.stats().after, 1);
        assert_eq!(plan.gates[0].gate.targets, vec![0, 1, 2]);
        let lhs = reference::dense_operator(&circuit).unwrap();
        let rhs = reference::dense_operator(&plan_as_circuit(&plan)).unwrap();
        operator_close(&lhs, &rhs, 0.0);
    }

    #[test]
    fn rotation_packing_stays_numerically_tight() {
        let mut circuit = Circuit::new("rot", 3);
        circuit.push(gate::rx(0, 0.37)).unwrap();
        circuit.push(gate::ry(1, -1.2)).unwrap();
        circuit.push(gate::rz(2, 2.55)).unwrap();
        let plan = plan_fusion(&circuit, 3).unwrap();
        assert_eq!(plan.stats().after, 1);
        let lhs = reference::dense_operator(&circuit).unwrap();
        let rhs = reference::dense_operator(&plan_as_circuit(&plan)).unwrap();
        operator_close(&lhs, &rhs, 1e-15);
    }

    #[test]
    fn dependency_layers_are_respected() {
        // H(0), X(0): same qubit, vertical merges them; then CX(0,1) remains
        // separate. Nothing may reorder X before H.
        let mut circuit = Circuit::new("dep", 2);
        circuit.push(gate::hadamard(0)).unwrap();
        circuit.push(gate::pauli_x(0)).unwrap();
        circuit.push(gate::cnot(0, 1)).unwrap();
        let plan = plan_fusion(&circuit, 2).unwrap();
        let lhs = reference::dense_operator(&circuit).unwrap();
        let rhs = reference::dense_operator(&plan_as_circuit(&plan)).unwrap();
        operator_close(&lhs, &rhs, 1e-15);
    }

    #[test]
    fn cross_layer_gates_do_not_merge() {
        // H(0) then H(1); the second depends on nothing, same layer, merge.
        // But H(0) then CX(0,1) then H(1): H(1) lands in layer 2 and must
        // not pack with layer-1 H(0).
        let mut circuit = Circuit::new("cross", 2);
        circuit.push(gate::hadamard(0)).unwrap();
        circuit.push(gate::cnot(0, 1)).unwrap();
        circuit.push(gate::hadamard(1)).unwrap();
        let plan = plan_fusion(&circuit, 2).unwrap();
        assert_eq!(plan.stats().after, 3, "no pair may fuse across the cnot");
        let lhs = reference::dense_operator(&circuit).unwrap();
        let rhs = reference::dense_operator(&plan_as_circuit(&plan)).unwrap();
        operator_close(&lhs, &rhs, 1e-15);
    }

    #[test]
    fn ghz_chain_defeats_fusion() {
        // H then a CNOT chain: every gate either carries controls or shares
        // a qubit with its neighbor, so the plan must match the input 1:1.
        let n = 6;
        let mut circuit = Circuit::new("ghz", n);
        circuit.push(gate::hadamard(0)).unwrap();
        for q in 0..n - 1 {
            circuit.push(gate::cnot(q, q + 1)).unwrap();
        }
        let plan = plan_fusion(&circuit, 3).unwrap();
        let stats = plan.stats();
        assert_eq!(stats.before, stats.after);
        assert_eq!(stats.max_f, 1);
    }

    #[test]
    fn sources_partition_the_original_indices() {
        let mut circuit = Circuit::new("prov", 5);
        circuit.push(gate::hadamard(0)).unwrap();
        circuit.push(gate::hadamard(0)).unwrap();
        circuit.push(gate::hadamard(1)).unwrap();
        circuit.push(gate::cnot(1, 2)).unwrap();
        circuit.push(gate::rz(3, 0.5)).unwrap();
        circuit.push(gate::rx(4, 0.25)).unwrap();
        let plan = plan_fusion(&circuit, 3).unwrap();
        let mut all: Vec<usize> = plan.gates.iter().flat_map(|g| g.sources.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..circuit.len()).collect::<Vec<_>>());
    }

    #[test]
    fn width_bounds_are_enforced() {
        let circuit = Circuit::new("empty", 2);
        assert!(matches!(
            plan_fusion(&circuit, 0),
            Err(Error::FusionWidthOutOfRange { .. })
        ));
        assert!(matches!(
            plan_fusion(&circuit, 7),
            Err(Error::FusionWidthOutOfRange { .. })
        ));
        assert_eq!(plan_fusion(&circuit, 6).unwrap().stats().after, 0);
    }

    #[test]
    fn closed_form_ai_frozen_values() {
        assert_eq!(closed_form_ai(1, 4), 0.4375);
        assert_eq!(closed_form_ai(2, 4), 0.9375);
        assert_eq!(closed_form_ai(3, 4), 1.9375);
        assert_eq!(closed_form_ai(1, 8), 0.21875);
    }

    #[test]
    fn recommend_f_respects_budget_and_balance() {
        let cfg = LaneConfig::from_lanes(4, Precision::Single).unwrap();
        // Balance 2.0 flops/byte admits f=3 (1.9375) but not f=4 (3.9375);
        // a giant budget leaves balance as the binding constraint.
        assert_eq!(recommend_f(cfg, 1 << 20, 2.0), 3);
        // Tiny budget: f=2 needs 16*8 matrix + 2*4*4*4 buffer = 256 bytes.
        assert_eq!(recommend_f(cfg, 256, 2.0), 2);
        assert_eq!(recommend_f(cfg, 255, 2.0), 1);
        // Nothing fits: floor is 1.
        assert_eq!(recommend_f(cfg, 0, 0.01), 1);
        // Very high balance and budget: capped by the width limit.
        assert_eq!(recommend_f(cfg, 1 << 30, 1e9), 6);
    }
}
