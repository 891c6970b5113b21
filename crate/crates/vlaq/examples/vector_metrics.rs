//! Reading the counters: AVL, IRR and arithmetic intensity by hand.
//!
//! One Hadamard on a high qubit of a 10-qubit state, 4 lanes. Every
//! predicate is full, so the numbers can be derived by hand first and
//! checked against the tallies.

use vlaq::gate;
use vlaq::reference;
use vlaq::state::{LaneConfig, Layout, Precision, StateVector};
use vlaq::vla::Engine;
use vlaq::{Circuit, VectorCounters};

fn main() -> vlaq::Result<()> {
    let n = 10u32;
    let lanes = 4usize;
    let mut circuit = Circuit::new("one-h", n);
    circuit.push(gate::hadamard(9))?;

    let engine = Engine::new(LaneConfig::from_lanes(lanes, Precision::Single)?);
    let mut sv = StateVector::<f32>::zero(n, Layout::Blocked { lanes })?;
    let mut ctr = VectorCounters::default();
    engine.apply_circuit(&mut sv, &circuit, &mut ctr)?;

    // Hand math. The gate touches 2^9 amplitude pairs; grouped by lanes
    // that is 2^9 / 4 = 128 iterations. Each iteration issues 4 component
    // loads, 16 arithmetic ops (4 complex multiply-accumulates at 4 real
    // ops each) and 4 component stores: 24 vector ops, 28 flops per pair.
    let groups = 1u64 << 9;
    let iterations = groups / lanes as u64;
    println!("iterations: {iterations} (groups {groups} / lanes {lanes})");
    println!(
        "vector ops: {} (expect 24 per iteration = {})",
        ctr.vector_ops,
        iterations * 24
    );
    println!("AVL: {} (all masks full)", ctr.avl());
    println!(
        "flops: {} (expect 28 per group x {groups} groups = {})",
        ctr.flops,
        28 * groups
    );
    println!(
        "state traffic: {} B (8 component accesses x 8 B complex width per pair)",
        ctr.mem_bytes
    );
    println!(
        "AI: {} (flops / state bytes; the f=1 figure for 4 lanes)",
        ctr.arithmetic_intensity()
    );

    // IRR needs the scalar baseline's op count for the same circuit.
    let ref_ops = reference::gates_scalar_ops(n, &circuit.gates);
    println!(
        "IRR: {} (scalar ops {ref_ops} / vector+scalar ops issued {})",
        ctr.irr(ref_ops),
        ctr.vector_ops + ctr.scalar_ops
    );

    // The same gate on qubit 0 halves the active lanes: partners share a
    // register, so each mask keeps 2 of 4 lanes and AVL drops to 2.
    let mut low = StateVector::<f32>::zero(n, Layout::Blocked { lanes })?;
    let mut low_ctr = VectorCounters::default();
    engine.apply_gate(&mut low, &gate::hadamard(0), &mut low_ctr)?;
    println!();
    println!(
        "H on qubit 0 instead: AVL {} with {} partial-mask ops",
        low_ctr.avl(),
        low_ctr.partial_mask_ops
    );
    Ok(())
}
