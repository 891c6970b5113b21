//! The central correctness claim: the vector engine and the scalar
//! reference produce bit-identical states.
//!
//! Both engines walk matrix rows in the same order and share one
//! multiply-accumulate helper, so their floating-point rounding agrees
//! exactly, at any lane width, precision, or kernel variant. This example
//! runs a random two-qubit-gate circuit through every combination and
//! compares raw bits, not tolerances.

use vlaq::gate::{Gate, GateMatrix};
use vlaq::reference;
use vlaq::rng::Lcg64;
use vlaq::state::{max_abs_diff, LaneConfig, Layout, Scalar, StateVector};
use vlaq::vla::{Engine, KernelVariant};
use vlaq::{Circuit, VectorCounters};

fn random_circuit(n: u32, gates: usize, seed: u64) -> Circuit {
    let mut rng = Lcg64::new(seed);
    let mut c = Circuit::new("random", n);
    for i in 0..gates {
        let a = rng.next_below(n as usize) as u32;
        let mut b = rng.next_below(n as usize) as u32;
        while b == a {
            b = rng.next_below(n as usize) as u32;
        }
        let matrix = GateMatrix::random_unitary(2, &mut rng).unwrap();
        c.push(Gate::new(format!("u{i}"), vec![a, b], vec![], matrix).unwrap())
            .unwrap();
    }
    c
}

fn check<T: Scalar>(circuit: &Circuit, lanes: usize, variant: KernelVariant) -> f64 {
    let n = circuit.n;
    let mut reference_sv = StateVector::<T>::zero(n, Layout::Interleaved).unwrap();
    let mut ctr = VectorCounters::default();
    reference::apply_circuit(&mut reference_sv, circuit, &mut ctr).unwrap();

    let engine = Engine::new(LaneConfig::from_lanes(lanes, T::PRECISION).unwrap())
        .with_variant(variant);
    let mut vla_sv = StateVector::<T>::zero(n, Layout::Blocked { lanes }).unwrap();
    let mut vla_ctr = VectorCounters::default();
    engine.apply_circuit(&mut vla_sv, circuit, &mut vla_ctr).unwrap();

    // Compare component bits, not distances.
    vla_sv.to_interleaved().unwrap();
    for (a, b) in vla_sv.data().iter().zip(reference_sv.data()) {
        assert_eq!(
            Scalar::to_f64(*a).to_bits(),
            Scalar::to_f64(*b).to_bits(),
            "component bits differ"
        );
    }
    max_abs_diff(&vla_sv, &reference_sv).unwrap()
}

fn main() {
    let circuit = random_circuit(8, 24, 7);
    println!("random circuit: {} two-qubit gates on 8 qubits", circuit.len());
    for lanes in [2, 4, 8, 16] {
        for variant in [KernelVariant::Buffered, KernelVariant::TempArray] {
            let d32 = check::<f32>(&circuit, lanes, variant);
            let d64 = check::<f64>(&circuit, lanes, variant);
            println!(
                "lanes={lanes:>2} {variant:?}: single diff {d32:.1e}, double diff {d64:.1e} (bit-identical)"
            );
        }
    }
}
