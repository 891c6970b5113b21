//! Benchmark circuit families.
//!
//! Each generator is deterministic in its inputs; the randomized families
//! draw every choice from [`crate::rng::Lcg64`], so a (family, n, seed,
//! depth) tuple always produces the same gate list on every platform.

use serde::Serialize;
use std::f64::consts::PI;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate;
use crate::rng::Lcg64;

/// Quantum Fourier transform on `n` qubits, mapping basis index `x` to
/// `2^(-n/2) * sum_j exp(2*pi*i*x*j / 2^n) |j>` with qubit 0 as the least
/// significant index bit. Hadamard plus a phase ladder per qubit, then the
/// bit-reversal swaps: `n*(n+1)/2 + floor(n/2)` gates.
pub fn qft(n: u32) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::CircuitTooSmall {
            kind: "qft".into(),
            min: 1,
            n,
        });
    }
    let mut c = Circuit::new(format!("qft{n}"), n);
    for q in (0..n).rev() {
        c.push(gate::hadamard(q))?;
        for m in (0..q).rev() {
            // Distance d contributes a rotation by pi / 2^d.
            let d = q - m;
            c.push(gate::cphase(m, q, PI / (1u64 << d) as f64))?;
        }
    }
    for q in 0..n / 2 {
        c.push(gate::swap(q, n - 1 - q))?;
    }
    Ok(c)
}

/// Default Grover iteration count for an `s`-bit search space:
/// `round(pi/4 * sqrt(2^s))`.
pub fn grover_default_iterations(search_bits: u32) -> usize {
    (PI / 4.0 * ((1u64 << search_bits) as f64).sqrt()).round() as usize
}

/// Grover search over qubits `0..n-1` with a phase ancilla at `n-1`.
///
/// The ancilla is prepared in `|->` so that the multi-controlled X kicks a
/// phase onto the marked component. The oracle conjugates the controls with
/// X on every zero bit of `marked`; the diffusion operator reuses the same
/// ancilla trick around an H and X sandwich. `iterations = None` picks the
/// standard count for the search width.
pub fn grover(n: u32, marked: u64, iterations: Option<usize>) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::CircuitTooSmall {
            kind: "grover".into(),
            min: 2,
            n,
        });
    }
    let s = n - 1;
    if marked >> s != 0 {
        return Err(Error::MarkedOutOfRange { marked, bits: s });
    }
    let ancilla = n - 1;
    let search: Vec<u32> = (0..s).collect();
    let iters = iterations.unwrap_or_else(|| grover_default_iterations(s));

    let mut c = Circuit::new(format!("grover{n}"), n);
    c.push(gate::pauli_x(ancilla))?;
    c.push(gate::hadamard(ancilla))?;
    for &q in &search {
        c.push(gate::hadamard(q))?;
    }
    for _ in 0..iters {
        // Oracle: flip the ancilla exactly on |marked>.
        for &q in &search {
            if marked >> q & 1 == 0 {
                c.push(gate::pauli_x(q))?;
            }
        }
        c.push(gate::mcx(search.clone(), ancilla))?;
        for &q in &search {
            if marked >> q & 1 == 0 {
                c.push(gate::pauli_x(q))?;
            }
        }
        // Diffusion: reflect about the uniform superposition.
        for &q in &search {
            c.push(gate::hadamard(q))?;
        }
        for &q in &search {
            c.push(gate::pauli_x(q))?;
        }
        c.push(gate::mcx(search.clone(), ancilla))?;
        for &q in &search {
            c.push(gate::pauli_x(q))?;
        }
        for &q in &search {
            c.push(gate::hadamard(q))?;
        }
    }
    Ok(c)
}

/// GHZ state preparation: one Hadamard and a CNOT chain, `n` gates.
/// `n = 1` degenerates to the single Hadamard.
pub fn ghz(n: u32) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::CircuitTooSmall {
            kind: "ghz".into(),
            min: 1,
            n,
        });
    }
    let mut c = Circuit::new(format!("ghz{n}"), n);
    c.push(gate::hadamard(0))?;
    for q in 0..n.saturating_sub(1) {
        c.push(gate::cnot(q, q + 1))?;
    }
    Ok(c)
}

/// Random rotation circuit: `depth` layers of per-qubit random rotations
/// (axis and angle both drawn from the stream), with an optional CZ brick
/// between layers whose pairing alternates with the layer parity.
pub fn qrc(n: u32, depth: usize, seed: u64, entangle: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::CircuitTooSmall {
            kind: "qrc".into(),
            min: 1,
            n,
        });
    }
    let mut rng = Lcg64::new(seed);
    let mut c = Circuit::new(format!("qrc{n}"), n);
    for layer in 0..depth {
        for q in 0..n {
            let angle = rng.next_angle();
            let g = match rng.next_below(3) {
                0 => gate::rx(q, angle),
                1 => gate::ry(q, angle),
                _ => gate::rz(q, angle),
            };
            c.push(g)?;
        }
        if entangle && n >= 2 {
            let mut q = (layer % 2) as u32;
            while q + 1 < n {
                c.push(gate::cz(q, q + 1))?;
                q += 2;
            }
        }
    }
    Ok(c)
}

/// Quantum-volume style circuit: per round, a random qubit pairing; each
/// pair gets two single-qubit rotations and a CNOT, an odd qubit out gets a
/// lone rotation.
pub fn quantum_volume(n: u32, rounds: usize, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::CircuitTooSmall {
            kind: "qv".into(),
            min: 2,
            n,
        });
    }
    let mut rng = Lcg64::new(seed);
    let mut c = Circuit::new(format!("qv{n}"), n);
    let mut order: Vec<usize> = (0..n as usize).collect();
    for _ in 0..rounds {
        rng.shuffle(&mut order);
        let mut it = order.chunks_exact(2);
        for pair in &mut it {
            let (a, b) = (pair[0] as u32, pair[1] as u32);
            c.push(gate::u3(a, rng.next_angle(), rng.next_angle(), rng.next_angle()))?;
            c.push(gate::u3(b, rng.next_angle(), rng.next_angle(), rng.next_angle()))?;
            c.push(gate::cnot(a, b))?;
        }
        if let [lone] = it.remainder() {
            c.push(gate::u3(
                *lone as u32,
                rng.next_angle(),
                rng.next_angle(),
                rng.next_angle(),
            ))?;
        }
    }
    Ok(c)
}

/// Angles used by the synthetic family, one per rotation kind.
const SYNTHETIC_ANGLES: [f64; 3] = [0.35, 0.85, 1.45];

/// Synthetic regular workload: `reps` passes over positions `4..n`, cycling
/// Hadamard and the three rotations. No controls and no target below 4, so
/// with up to 16 lanes every gate is whole-block regular; fused plans stay
/// regular too, which makes measured intensity comparable to the closed
/// form without masking effects.
pub fn synthetic(n: u32, reps: usize) -> Result<Circuit> {
    if n < 5 {
        return Err(Error::CircuitTooSmall {
            kind: "synthetic".into(),
            min: 5,
            n,
        });
    }
    let mut c = Circuit::new(format!("synthetic{n}"), n);
    let mut cycle = 0usize;
    for _ in 0..reps {
        for q in 4..n {
            let g = match cycle % 4 {
                0 => gate::hadamard(q),
                1 => gate::rx(q, SYNTHETIC_ANGLES[0]),
                2 => gate::ry(q, SYNTHETIC_ANGLES[1]),
                _ => gate::rz(q, SYNTHETIC_ANGLES[2]),
            };
            c.push(g)?;
            cycle += 1;
        }
    }
    Ok(c)
}

/// The benchmark families the harness knows by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKind {
    Qft,
    Grover,
    Ghz,
    Qrc,
    Qv,
    Synthetic,
}

impl BenchKind {
    pub const ALL: [BenchKind; 6] = [
        BenchKind::Qft,
        BenchKind::Grover,
        BenchKind::Ghz,
        BenchKind::Qrc,
        BenchKind::Qv,
        BenchKind::Synthetic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchKind::Qft => "qft",
            BenchKind::Grover => "grover",
            BenchKind::Ghz => "ghz",
            BenchKind::Qrc => "qrc",
            BenchKind::Qv => "qv",
            BenchKind::Synthetic => "synthetic",
        }
    }

    /// Builds the family's circuit. `depth` means layers for qrc (default
    /// 64, the usual experiment scale), rounds for qv (default n, a square
    /// circuit), passes for synthetic and iterations for grover; qft and
    /// ghz have a fixed shape and ignore it. Grover's marked value is
    /// drawn from the seed.
    pub fn build(self, n: u32, seed: u64, depth: Option<usize>) -> Result<Circuit> {
        self.build_with(n, seed, depth, true)
    }

    /// [`BenchKind::build`] with the qrc entangling brick switchable.
    pub fn build_with(
        self,
        n: u32,
        seed: u64,
        depth: Option<usize>,
        entangle: bool,
    ) -> Result<Circuit> {
        match self {
            BenchKind::Qft => qft(n),
            BenchKind::Grover => {
                let bits = n.saturating_sub(1);
                let marked = if bits == 0 {
                    0
                } else {
                    Lcg64::new(seed).next_u64() & ((1u64 << bits) - 1)
                };
                grover(n, marked, depth)
            }
            BenchKind::Ghz => ghz(n),
            BenchKind::Qrc => qrc(n, depth.unwrap_or(64), seed, entangle),
            BenchKind::Qv => quantum_volume(n, depth.unwrap_or(n as usize), seed),
            BenchKind::Synthetic => synthetic(n, depth.unwrap_or(4)),
        }
    }
}

impl std::str::FromStr for BenchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<BenchKind> {
        match s.to_ascii_lowercase().as_str() {
            "qft" => Ok(BenchKind::Qft),
            "grover" => Ok(BenchKind::Grover),
            "ghz" => Ok(BenchKind::Ghz),
            "qrc" => Ok(BenchKind::Qrc),
            "qv" => Ok(BenchKind::Qv),
            "synthetic" => Ok(BenchKind::Synthetic),
            other => Err(Error::UnknownBenchmark { name: other.into() }),
        }
    }
}

impl std::fmt::Display for BenchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Census of a circuit's gates against a position threshold: a gate counts
/// as low when its lowest target sits within the first `threshold`
/// positions (0-based target < threshold; a tie on the boundary is low).
/// Low gates are the ones that turn irregular once the vector covers
/// `threshold` amplitudes.
pub fn count_gate_ops(circuit: &Circuit, threshold: u32) -> (u64, u64) {
    let mut low = 0;
    let mut high = 0;
    for g in &circuit.gates {
        if g.min_target() < threshold {
            low += 1;
        } else {
            high += 1;
        }
    }
    (low, high)
}

/// One row of the per-family census table.
#[derive(Debug, Clone, Serialize)]
pub struct GateOpRow {
    pub family: String,
    pub gates: usize,
    pub low: u64,
    pub high: u64,
}

/// Census across all families at one size; `depth` feeds the depth-shaped
/// families as in [`BenchKind::build`].
pub fn gate_op_comparison(
    n: u32,
    threshold: u32,
    seed: u64,
    depth: Option<usize>,
) -> Result<Vec<GateOpRow>> {
    let mut rows = Vec::new();
    for kind in BenchKind::ALL {
        let circuit = kind.build(n, seed, depth)?;
        let (low, high) = count_gate_ops(&circuit, threshold);
        rows.push(GateOpRow {
            family: kind.name().into(),
            gates: circuit.len(),
            low,
            high,
        });
    }
    Ok(rows)
}
