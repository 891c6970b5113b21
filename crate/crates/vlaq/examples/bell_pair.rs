//! Smallest possible tour: entangle two qubits and look at the state.
//!
//! Run with `cargo run --example bell_pair`.

use vlaq::gate;
use vlaq::state::{LaneConfig, Layout, Precision, StateVector};
use vlaq::vla::Engine;
use vlaq::{Circuit, VectorCounters};

fn main() -> vlaq::Result<()> {
    let mut circuit = Circuit::new("bell", 2);
    circuit.push(gate::hadamard(0))?;
    circuit.push(gate::cnot(0, 1))?;

    // Two lanes is the narrowest emulated vector unit.
    let cfg = LaneConfig::from_lanes(2, Precision::Double)?;
    let engine = Engine::new(cfg);
    let mut sv = StateVector::<f64>::zero(2, Layout::Blocked { lanes: 2 })?;
    let mut ctr = VectorCounters::default();
    engine.apply_circuit(&mut sv, &circuit, &mut ctr)?;

    println!("state after H(0), CNOT(0,1):");
    for i in 0..4 {
        let a = sv.amplitude(i);
        println!("  |{:02b}>  {:+.6} {:+.6}i   p={:.4}", i, a.re, a.im, sv.probability(i));
    }
    println!();
    println!(
        "engine work: {} vector ops, {} scalar ops, {} flops",
        ctr.vector_ops, ctr.scalar_ops, ctr.flops
    );
    Ok(())
}
