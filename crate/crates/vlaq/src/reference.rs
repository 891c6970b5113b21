//! Scalar reference engine.
//!
//! Applies gates one amplitude pair at a time on the interleaved layout,
//! with no lane blocking, no predication, and no staging. This is the
//! baseline other engines are measured against, in two senses:
//!
//! * correctness: it is simple enough to trust, and the lane-blocked engine
//!   must reproduce its output bitwise when both run the same gate list,
//!   because both accumulate through [`crate::state::complex_mac`] with
//!   matrix columns visited in ascending order;
//! * cost: its operation count is the scalar-equivalent work that the
//!   instruction reduction ratio divides by.
//!
//! A `k`-qubit gate with `c` controls partitions the `2^n` amplitudes into
//! `2^(n-k-c)` active groups of `2^k` rows (plus untouched rows where some
//! control is `|0>`). Per group the engine loads `2^k` rows, applies the
//! dense `2^k x 2^k` matrix, and stores them back.

use num_complex::Complex;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{C64, Gate};
use crate::metrics::VectorCounters;
use crate::state::{complex_mac, Layout, Scalar, StateVector};

/// Counted operations per group of a `k`-target gate: `2 * 2^k` component
/// loads, `2 * 2^k` component stores, and `4 * 4^k` real multiply-adds.
pub fn group_scalar_ops(k: usize) -> u64 {
    4 * (1u64 << k) + 4 * (1u64 << (2 * k))
}

/// Number of active groups for a gate on `n` qubits.
pub fn group_count(n: u32, k: usize, controls: usize) -> u64 {
    1u64 << (n as usize - k - controls)
}

/// Scalar-equivalent operation count for one gate application.
pub fn gate_scalar_ops(n: u32, k: usize, controls: usize) -> u64 {
    group_count(n, k, controls) * group_scalar_ops(k)
}

/// Scalar-equivalent operation count for a whole gate list.
pub fn gates_scalar_ops(n: u32, gates: &[Gate]) -> u64 {
    gates
        .iter()
        .map(|g| gate_scalar_ops(n, g.k(), g.controls.len()))
        .sum()
}

/// Counted operations for the magnitude-average observable: per amplitude,
/// two component loads and four arithmetic ops.
pub fn expectation_scalar_ops(n: u32) -> u64 {
    6 << n
}

/// Applies one gate in place. The state must be interleaved.
pub fn apply_gate<T: Scalar>(
    sv: &mut StateVector<T>,
    gate: &Gate,
    ctr: &mut VectorCounters,
) -> Result<()> {
    if sv.layout() != Layout::Interleaved {
        return Err(Error::LayoutMismatch {
            expected: "interleaved".into(),
            found: sv.layout().to_string(),
        });
    }
    let n = sv.n_qubits();
    gate.validate_for(n)?;

    let k = gate.k();
    let rows = 1usize << k;
    let complex_bytes = T::PRECISION.complex_bytes() as u64;

    // Matrix narrowed to the state's precision, row-major.
    let matrix: Vec<(T, T)> = gate
        .matrix
        .entries()
        .iter()
        .map(|e| (T::from_f64(e.re), T::from_f64(e.im)))
        .collect();

    // Row offset of matrix bit pattern m relative to the group base.
    let offsets: Vec<usize> = (0..rows)
        .map(|m| {
            (0..k)
                .filter(|j| (m >> j) & 1 == 1)
                .map(|j| 1usize << gate.targets[j])
                .sum()
        })
        .collect();

    let gate_mask: usize = gate
        .targets
        .iter()
        .chain(&gate.controls)
        .map(|&q| 1usize << q)
        .sum();
    let control_mask: usize = gate.controls.iter().map(|&q| 1usize << q).sum();

    let mut input = vec![(T::zero(), T::zero()); rows];
    let data = sv.data_mut();

    for base in 0..1usize << n {
        // A group base has every target bit clear and every control bit set.
        if base & gate_mask != control_mask {
            continue;
        }

        for (m, off) in offsets.iter().enumerate() {
            let idx = 2 * (base + off);
            input[m] = (data[idx], data[idx + 1]);
            ctr.scalar(2);
            ctr.mem_bytes += 2 * complex_bytes;
        }

        for m_out in 0..rows {
            let mut acc_re = T::zero();
            let mut acc_im = T::zero();
            let mrow = &matrix[m_out * rows..(m_out + 1) * rows];
            for (m_in, &(in_re, in_im)) in input.iter().enumerate() {
                let (u_re, u_im) = mrow[m_in];
                complex_mac(&mut acc_re, &mut acc_im, u_re, u_im, in_re, in_im);
                ctr.scalar(4);
                ctr.flops += if m_in == 0 { 6 } else { 8 };
            }
            let idx = 2 * (base + offsets[m_out]);
            data[idx] = acc_re;
            data[idx + 1] = acc_im;
            ctr.scalar(2);
            ctr.mem_bytes += 2 * complex_bytes;
        }
    }
    Ok(())
}

/// Applies every gate of a circuit in order.
pub fn apply_circuit<T: Scalar>(
    sv: &mut StateVector<T>,
    circuit: &Circuit,
    ctr: &mut VectorCounters,
) -> Result<()> {
    for gate in &circuit.gates {
        apply_gate(sv, gate, ctr)?;
    }
    Ok(())
}

/// Mean amplitude magnitude, `2^-n * sum_i |c_i|`: a cheap whole-state
/// observable that touches every amplitude exactly once. Magnitudes are
/// taken in the state's own precision, the running sum in f64.
pub fn expectation<T: Scalar>(sv: &StateVector<T>, ctr: &mut VectorCounters) -> Result<f64> {
    if sv.layout() != Layout::Interleaved {
        return Err(Error::LayoutMismatch {
            expected: "interleaved".into(),
            found: sv.layout().to_string(),
        });
    }
    let complex_bytes = T::PRECISION.complex_bytes() as u64;
    let data = sv.data();
    let mut sum = 0.0f64;
    for pair in data.chunks_exact(2) {
        let (re, im) = (pair[0], pair[1]);
        let mag = (re * re + im * im).sqrt();
        sum += mag.to_f64();
        ctr.scalar(6);
        ctr.flops += 5;
        ctr.mem_bytes += 2 * complex_bytes;
    }
    Ok(sum / sv.len() as f64)
}

/// Dense `2^n x 2^n` operator of a circuit, row-major, built by running the
/// reference engine on every basis column. Test-oracle material; exponential
/// in `n`, so keep `n` small.
pub fn dense_operator(circuit: &Circuit) -> Result<Vec<C64>> {
    let n = circuit.n;
    if n > 12 {
        return Err(Error::QubitCountOutOfRange { n, max: 12 });
    }
    let dim = 1usize << n;
    let mut out = vec![Complex::new(0.0, 0.0); dim * dim];
    let mut ctr = VectorCounters::default();
    for col in 0..dim {
        let mut sv = StateVector::<f64>::zero(n, Layout::Interleaved)?;
        sv.set_amplitude(0, Complex::new(0.0, 0.0));
        sv.set_amplitude(col, Complex::new(1.0, 0.0));
        apply_circuit(&mut sv, circuit, &mut ctr)?;
        for row in 0..dim {
            let a = sv.amplitude(row);
            out[row * dim + col] = Complex::new(a.re, a.im);
        }
    }
    Ok(out)
}
