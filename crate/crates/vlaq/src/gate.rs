//! Gate matrices and gate applications.
//!
//! Matrices are always stored in `Complex<f64>`, row-major, regardless of the
//! state's precision; kernels narrow entries on the fly. A `k`-qubit matrix
//! has dimension `2^k`, and row/column bit `j` of the matrix corresponds to
//! qubit `targets[j]` of the gate that carries it, lowest matrix bit first.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::rng::Lcg64;

pub type C64 = Complex<f64>;

/// Widest gate the kernels accept. `2^6 = 64` rows is already past the point
/// where a fused matrix stops paying for itself.
pub const MAX_GATE_QUBITS: usize = 6;

const UNITARITY_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Dense `2^k x 2^k` complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct GateMatrix {
    k: usize,
    entries: Vec<C64>,
}

impl GateMatrix {
    /// Builds a matrix from row-major entries; the length must be `4^k` for
    /// some `k >= 1`.
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        let len = entries.len();
        let dim = (len as f64).sqrt().round() as usize;
        if dim * dim != len || dim < 2 {
            return Err(Error::MatrixShape {
                len,
                expected: dim * dim,
                dim,
            });
        }
        if !dim.is_power_of_two() {
            return Err(Error::MatrixDimNotPowerOfTwo { dim });
        }
        Ok(GateMatrix {
            k: dim.trailing_zeros() as usize,
            entries,
        })
    }

    pub fn identity(k: usize) -> Self {
        let dim = 1usize << k;
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for r in 0..dim {
            entries[r * dim + r] = c(1.0, 0.0);
        }
        GateMatrix { k, entries }
    }

    /// Number of qubits the matrix acts on.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Row/column count `2^k`.
    pub fn dim(&self) -> usize {
        1 << self.k
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim() + col]
    }

    /// `self * other` (standard matrix product; `self` is applied second).
    pub fn matmul(&self, other: &GateMatrix) -> Result<GateMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::MatrixDimMismatch {
                a: self.dim(),
                b: other.dim(),
            });
        }
        let dim = self.dim();
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for inner in 0..dim {
                let lhs = self.at(r, inner);
                if lhs == c(0.0, 0.0) {
                    continue;
                }
                for col in 0..dim {
                    entries[r * dim + col] += lhs * other.at(inner, col);
                }
            }
        }
        Ok(GateMatrix {
            k: self.k,
            entries,
        })
    }

    /// Kronecker product `self ⊗ other`. Matrix bits of `other` become the
    /// low bits of the result, so a gate list `[a, b]` with `a` on the low
    /// side composes as `tensor(b_matrix, a_matrix)` for targets `a ++ b`.
    pub fn tensor(&self, other: &GateMatrix) -> Result<GateMatrix> {
        let k = self.k + other.k;
        if k > MAX_GATE_QUBITS {
            return Err(Error::GateTooWide {
                k,
                max: MAX_GATE_QUBITS,
            });
        }
        let (dh, dl) = (self.dim(), other.dim());
        let dim = dh * dl;
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for rh in 0..dh {
            for ch in 0..dh {
                let scale = self.at(rh, ch);
                if scale == c(0.0, 0.0) {
                    continue;
                }
                for rl in 0..dl {
                    for cl in 0..dl {
                        entries[(rh * dl + rl) * dim + (ch * dl + cl)] = scale * other.at(rl, cl);
                    }
                }
            }
        }
        Ok(GateMatrix { k, entries })
    }

    /// Largest deviation of `U * U^dagger` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for col in 0..dim {
                let mut acc = c(0.0, 0.0);
                for inner in 0..dim {
                    acc += self.at(r, inner) * self.at(col, inner).conj();
                }
                let expect = if r == col { 1.0 } else { 0.0 };
                let d = (acc - c(expect, 0.0)).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= UNITARITY_TOL
    }

    fn check_unitary(self) -> Result<Self> {
        let deviation = self.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: UNITARITY_TOL,
            });
        }
        Ok(self)
    }

    /// Re-expresses the matrix after permuting its qubit slots: entry bit
    /// `j` of the original corresponds to bit `perm[j]` of the result. Used
    /// when merging gates whose target lists order the same qubits
    /// differently.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<GateMatrix> {
        if perm.len() != self.k {
            return Err(Error::MatrixShape {
                len: perm.len(),
                expected: self.k,
                dim: self.dim(),
            });
        }
        let mut seen = vec![false; self.k];
        for &p in perm {
            if p >= self.k || seen[p] {
                return Err(Error::DuplicateQubit { position: p });
            }
            seen[p] = true;
        }
        let dim = self.dim();
        let map = |idx: usize| -> usize {
            let mut out = 0;
            for (j, &p) in perm.iter().enumerate() {
                out |= ((idx >> j) & 1) << p;
            }
            out
        };
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                entries[map(r) * dim + map(col)] = self.at(r, col);
            }
        }
        Ok(GateMatrix {
            k: self.k,
            entries,
        })
    }

    /// Haar-ish random unitary: a complex Gaussian-free stand-in built by
    /// Gram-Schmidt over rows drawn from the deterministic generator. Good
    /// enough to exercise kernels with dense matrices; makes no statistical
    /// claim.
    pub fn random_unitary(k: usize, rng: &mut Lcg64) -> Result<GateMatrix> {
        if k == 0 || k > MAX_GATE_QUBITS {
            return Err(Error::GateTooWide {
                k,
                max: MAX_GATE_QUBITS,
            });
        }
        let dim = 1usize << k;
        let mut rows: Vec<Vec<C64>> = Vec::with_capacity(dim);
        while rows.len() < dim {
            let mut row: Vec<C64> = (0..dim)
                .map(|_| c(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
                .collect();
            for prev in &rows {
                let dot: C64 = prev.iter().zip(&row).map(|(p, r)| p.conj() * r).sum();
                for (ri, pi) in row.iter_mut().zip(prev) {
                    *ri -= dot * pi;
                }
            }
            let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue; // degenerate draw, try again
            }
            for z in &mut row {
                *z /= norm;
            }
            rows.push(row);
        }
        GateMatrix {
            k,
            entries: rows.concat(),
        }
        .check_unitary()
    }
}

impl fmt::Debug for GateMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Entries are rarely useful in logs; the shape is.
        write!(f, "GateMatrix({}x{})", self.dim(), self.dim())
    }
}

/// One gate instance: a matrix, the qubits it acts on, and optional controls.
///
/// `targets[j]` is the qubit tied to matrix bit `j`. Controls are kept
/// symbolic rather than folded into a larger matrix: a controlled gate
/// touches only the subspace where every control is `|1>`, and the kernels
/// exploit that directly.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: String,
    pub targets: Vec<u32>,
    pub controls: Vec<u32>,
    pub matrix: GateMatrix,
}

impl Gate {
    pub fn new(
        name: impl Into<String>,
        targets: Vec<u32>,
        controls: Vec<u32>,
        matrix: GateMatrix,
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::EmptyTargets);
        }
        if matrix.k() != targets.len() {
            return Err(Error::MatrixShape {
                len: matrix.entries().len(),
                expected: (1 << targets.len()) * (1 << targets.len()),
                dim: matrix.dim(),
            });
        }
        if targets.len() > MAX_GATE_QUBITS {
            return Err(Error::GateTooWide {
                k: targets.len(),
                max: MAX_GATE_QUBITS,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for &q in targets.iter().chain(&controls) {
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit {
                    position: q as usize,
                });
            }
        }
        Ok(Gate {
            name: name.into(),
            targets,
            controls,
            matrix,
        })
    }

    /// Custom gate from raw entries, with the unitarity check applied.
    pub fn custom(
        name: impl Into<String>,
        targets: Vec<u32>,
        controls: Vec<u32>,
        entries: Vec<C64>,
    ) -> Result<Self> {
        let matrix = GateMatrix::new(entries)?.check_unitary()?;
        Gate::new(name, targets, controls, matrix)
    }

    /// Number of target qubits.
    pub fn k(&self) -> usize {
        self.targets.len()
    }

    /// Checks every referenced qubit against the register size.
    pub fn validate_for(&self, n: u32) -> Result<()> {
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= n {
                return Err(Error::QubitOutOfRange {
                    position: q as usize,
                    n,
                });
            }
        }
        Ok(())
    }

    /// Smallest target position; drives the low/high classification of the
    /// gate relative to the lane count.
    pub fn min_target(&self) -> u32 {
        *self.targets.iter().min().expect("gates have targets")
    }
}

// Standard gate constructors. Angles are radians.

pub fn hadamard(q: u32) -> Gate {
    let h = FRAC_1_SQRT_2;
    Gate::new(
        "h",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]).unwrap(),
    )
    .unwrap()
}

pub fn pauli_x(q: u32) -> Gate {
    Gate::new(
        "x",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
    )
    .unwrap()
}

pub fn pauli_y(q: u32) -> Gate {
    Gate::new(
        "y",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap(),
    )
    .unwrap()
}

pub fn pauli_z(q: u32) -> Gate {
    Gate::new(
        "z",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]).unwrap(),
    )
    .unwrap()
}

/// Phase gate `diag(1, e^{i*theta})`.
pub fn phase(q: u32, theta: f64) -> Gate {
    Gate::new(
        "p",
        vec![q],
        vec![],
        GateMatrix::new(vec![
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(theta.cos(), theta.sin()),
        ])
        .unwrap(),
    )
    .unwrap()
}

pub fn rx(q: u32, theta: f64) -> Gate {
    let (s, co) = (theta / 2.0).sin_cos();
    Gate::new(
        "rx",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]).unwrap(),
    )
    .unwrap()
}

pub fn ry(q: u32, theta: f64) -> Gate {
    let (s, co) = (theta / 2.0).sin_cos();
    Gate::new(
        "ry",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]).unwrap(),
    )
    .unwrap()
}

pub fn rz(q: u32, theta: f64) -> Gate {
    let (s, co) = (theta / 2.0).sin_cos();
    Gate::new(
        "rz",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(co, -s), c(0.0, 0.0), c(0.0, 0.0), c(co, s)]).unwrap(),
    )
    .unwrap()
}

/// General single-qubit rotation with Euler angles `(theta, phi, lambda)`.
pub fn u3(q: u32, theta: f64, phi: f64, lambda: f64) -> Gate {
    let (st, ct) = (theta / 2.0).sin_cos();
    let eil = c(lambda.cos(), lambda.sin());
    let eip = c(phi.cos(), phi.sin());
    Gate::new(
        "u3",
        vec![q],
        vec![],
        GateMatrix::new(vec![c(ct, 0.0), -eil * st, eip * st, eip * eil * ct]).unwrap(),
    )
    .unwrap()
}

pub fn cnot(control: u32, target: u32) -> Gate {
    let mut g = pauli_x(target);
    g.name = "cx".into();
    g.controls = vec![control];
    g
}

pub fn cz(control: u32, target: u32) -> Gate {
    let mut g = pauli_z(target);
    g.name = "cz".into();
    g.controls = vec![control];
    g
}

/// Controlled phase `diag(1, e^{i*theta})` on the target, active when the
/// control is `|1>`.
pub fn cphase(control: u32, target: u32, theta: f64) -> Gate {
    let mut g = phase(target, theta);
    g.name = "cp".into();
    g.controls = vec![control];
    g
}

pub fn swap(a: u32, b: u32) -> Gate {
    Gate::new(
        "swap",
        vec![a, b],
        vec![],
        GateMatrix::new(vec![
            c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
        ])
        .unwrap(),
    )
    .unwrap()
}

pub fn toffoli(c0: u32, c1: u32, target: u32) -> Gate {
    let mut g = pauli_x(target);
    g.name = "ccx".into();
    g.controls = vec![c0, c1];
    g
}

/// X on `target` under an arbitrary number of controls.
pub fn mcx(controls: Vec<u32>, target: u32) -> Gate {
    let mut g = pauli_x(target);
    g.name = "mcx".into();
    g.controls = controls;
    g
}

/// Rotation by `pi / 2^(k-1)`, the QFT ladder step.
pub fn qft_phase(control: u32, target: u32, k: u32) -> Gate {
    cphase(control, target, PI / (1u64 << (k - 1)) as f64)
}
