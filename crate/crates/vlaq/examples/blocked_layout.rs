//! The lane-blocked amplitude layout, step by step.
//!
//! Plain interleaved storage alternates real and imaginary components, so
//! a vector load grabs mixed components and the kernel must shuffle. The
//! blocked layout groups `lanes` real parts followed by the same lanes'
//! imaginary parts; every vector load then carries one component kind for
//! `lanes` consecutive amplitudes. This example relayouts a small state in
//! place, prints where each amplitude lives, and checks the round trip is
//! bit-exact.

use num_complex::Complex;
use vlaq::state::{component_indices, Layout, StateVector};

fn main() -> vlaq::Result<()> {
    let n = 3;
    let amplitudes: Vec<Complex<f64>> = (0..8)
        .map(|i| Complex::new(i as f64, -(i as f64) / 10.0))
        .collect();
    let mut sv: StateVector<f64> = StateVector::from_amplitudes(n, &amplitudes, Layout::Interleaved)?;

    println!("interleaved: {:?}", sv.data());

    let before = sv.data().to_vec();
    sv.to_blocked(4)?;
    println!("blocked(4):  {:?}", sv.data());
    println!();
    println!("amplitude -> (re index, im index) in blocked storage:");
    for i in 0..8 {
        let (re, im) = component_indices(sv.layout(), i);
        println!("  c_{i}: ({re:2}, {im:2})   value {}", sv.amplitude(i));
    }

    sv.to_interleaved()?;
    assert_eq!(sv.data(), &before[..], "round trip must be bit-exact");
    println!();
    println!("round trip back to interleaved is bit-exact");
    Ok(())
}
