//! State vectors and their memory layouts.
//!
//! A state over `n` qubits holds `2^n` complex amplitudes, stored as `2^(n+1)`
//! real components of either 32 or 64 bits. Two layouts are supported:
//!
//! * `Interleaved`: `[re0, im0, re1, im1, ...]` — the conventional layout and
//!   the one the scalar reference engine operates on.
//! * `Blocked { lanes }`: amplitudes are grouped into blocks of `lanes`
//!   consecutive basis indices; each block stores its `lanes` real parts
//!   followed by its `lanes` imaginary parts. A vector unit with `lanes`
//!   elements per register can then load one component of `lanes` adjacent
//!   amplitudes with a single unit-stride access.
//!
//! Blocked addressing for amplitude `i` with `L` lanes: with `b = i / L` and
//! `o = i % L`, the real part lives at component `2*b*L + o` and the imaginary
//! part at `2*b*L + L + o`. Both layouts occupy the same bytes per block, so
//! conversion is an in-place per-block permutation with `O(lanes)` scratch.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};

/// Hard upper bound on qubit count; 2^41 components is far beyond any
/// reasonable budget but the arithmetic stays comfortably in `u64`.
pub const MAX_QUBITS: u32 = 40;

/// Default allocation budget for a single state vector: 16 GiB.
pub const DEFAULT_MEM_BUDGET: u64 = 1 << 34;

/// Widest supported vector register in bits.
pub const MAX_VLEN_BITS: usize = 2048;

/// Narrowest vector register a real scalable-vector implementation ships.
pub const MIN_VLEN_BITS: usize = 128;

/// Floating-point width of the real components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    /// 32-bit components. The default: halves memory traffic per amplitude.
    Single,
    /// 64-bit components.
    Double,
}

impl Precision {
    /// Width of one real component in bits.
    pub fn element_bits(self) -> usize {
        match self {
            Precision::Single => 32,
            Precision::Double => 64,
        }
    }

    /// Width of one real component in bytes.
    pub fn element_bytes(self) -> usize {
        self.element_bits() / 8
    }

    /// Width of one complex amplitude in bytes.
    pub fn complex_bytes(self) -> usize {
        2 * self.element_bytes()
    }

    /// Tolerance for norm preservation checks after a circuit.
    pub fn norm_tolerance(self) -> f64 {
        match self {
            Precision::Single => 1e-5,
            Precision::Double => 1e-10,
        }
    }

    /// Tolerance for comparing two final states elementwise.
    pub fn state_tolerance(self) -> f64 {
        match self {
            Precision::Single => 1e-6,
            Precision::Double => 1e-12,
        }
    }

    /// Identifier byte used by the state dump format.
    pub fn dump_code(self) -> u8 {
        match self {
            Precision::Single => 1,
            Precision::Double => 2,
        }
    }

    pub fn from_dump_code(code: u8) -> Option<Precision> {
        match code {
            1 => Some(Precision::Single),
            2 => Some(Precision::Double),
            _ => None,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Single => write!(f, "single"),
            Precision::Double => write!(f, "double"),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" | "f32" | "fp32" => Ok(Precision::Single),
            "double" | "f64" | "fp64" => Ok(Precision::Double),
            other => Err(Error::InvalidFlag {
                message: format!("unknown precision '{other}' (expected single or double)"),
            }),
        }
    }
}

/// Real component type of a state vector. Implemented by `f32` and `f64`.
pub trait Scalar:
    num_traits::Float + num_traits::NumAssign + Copy + Send + Sync + fmt::Debug + fmt::Display + 'static
{
    const PRECISION: Precision;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

impl Scalar for f32 {
    const PRECISION: Precision = Precision::Single;

    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]])
    }
}

impl Scalar for f64 {
    const PRECISION: Precision = Precision::Double;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes([
            bytes[0], bytes[1], bytes[2], bytes[3], bytes[4], bytes[5], bytes[6], bytes[7],
        ])
    }
}

/// How the real components of the amplitudes are arranged in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Interleaved,
    Blocked { lanes: usize },
}

impl Layout {
    /// Lane count for blocked layouts, `None` when interleaved.
    pub fn lanes(self) -> Option<usize> {
        match self {
            Layout::Interleaved => None,
            Layout::Blocked { lanes } => Some(lanes),
        }
    }

    fn validate(self, n: u32) -> Result<()> {
        if let Layout::Blocked { lanes } = self {
            if lanes == 0 || !lanes.is_power_of_two() || (lanes as u64) > (1u64 << n) {
                return Err(Error::InvalidLaneCount { lanes, n });
            }
        }
        Ok(())
    }

    /// Identifier byte used by the state dump format. Dumps are always
    /// written interleaved, so only code 0 ever appears in a file produced
    /// by this crate.
    pub fn dump_code(self) -> u8 {
        match self {
            Layout::Interleaved => 0,
            Layout::Blocked { .. } => 1,
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layout::Interleaved => write!(f, "interleaved"),
            Layout::Blocked { lanes } => write!(f, "blocked({lanes})"),
        }
    }
}

/// Emulated vector register shape: register width, element width, and the
/// resulting number of elements (lanes) per register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneConfig {
    vlen_bits: usize,
    elen_bits: usize,
    num_vals: usize,
}

impl LaneConfig {
    /// Configuration from a register width in bits. The width must be a
    /// power of two in 128..=2048, mirroring real scalable-vector hardware.
    pub fn from_vlen(vlen_bits: usize, precision: Precision) -> Result<Self> {
        if !vlen_bits.is_power_of_two()
            || !(MIN_VLEN_BITS..=MAX_VLEN_BITS).contains(&vlen_bits)
        {
            return Err(Error::InvalidVectorLength { vlen_bits });
        }
        let elen_bits = precision.element_bits();
        let num_vals = vlen_bits / elen_bits;
        if num_vals < 2 {
            return Err(Error::InvalidLaneConfig { num_vals });
        }
        Ok(LaneConfig {
            vlen_bits,
            elen_bits,
            num_vals,
        })
    }

    /// Configuration from a lane count directly. Lane counts are what the
    /// engine and the CLI reason in; the implied register width may drop
    /// below the 128-bit hardware floor (e.g. 2 lanes of 32 bits), which the
    /// emulation accepts so narrow-register behavior stays explorable at
    /// both precisions.
    pub fn from_lanes(lanes: usize, precision: Precision) -> Result<Self> {
        if lanes < 2 || !lanes.is_power_of_two() || lanes > 64 {
            return Err(Error::InvalidLaneConfig { num_vals: lanes });
        }
        let elen_bits = precision.element_bits();
        Ok(LaneConfig {
            vlen_bits: lanes * elen_bits,
            elen_bits,
            num_vals: lanes,
        })
    }

    pub fn vlen_bits(self) -> usize {
        self.vlen_bits
    }

    pub fn elen_bits(self) -> usize {
        self.elen_bits
    }

    /// Elements per vector register.
    pub fn num_vals(self) -> usize {
        self.num_vals
    }

    /// log2 of the lane count: the number of low index bits that select the
    /// lane within a block.
    pub fn lane_bits(self) -> u32 {
        self.num_vals.trailing_zeros()
    }

    pub fn precision(self) -> Precision {
        match self.elen_bits {
            32 => Precision::Single,
            _ => Precision::Double,
        }
    }
}

/// Component indices of amplitude `i` under `layout`: `(re, im)`.
#[inline]
pub fn component_indices(layout: Layout, i: usize) -> (usize, usize) {
    match layout {
        Layout::Interleaved => (2 * i, 2 * i + 1),
        Layout::Blocked { lanes } => {
            let b = i / lanes;
            let o = i % lanes;
            let base = 2 * b * lanes;
            (base + o, base + lanes + o)
        }
    }
}

/// State vector over `n` qubits with a concrete component type and layout.
#[derive(Clone)]
pub struct StateVector<T: Scalar> {
    n: u32,
    layout: Layout,
    data: Vec<T>,
}

impl<T: Scalar> StateVector<T> {
    /// All-zeros basis state `|0...0>` with the default memory budget.
    pub fn zero(n: u32, layout: Layout) -> Result<Self> {
        Self::zero_with_budget(n, layout, DEFAULT_MEM_BUDGET)
    }

    /// All-zeros basis state, checked against an explicit allocation budget.
    pub fn zero_with_budget(n: u32, layout: Layout, budget: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange { n, max: MAX_QUBITS });
        }
        layout.validate(n)?;
        let components = 1u64 << (n + 1);
        let required = components * T::PRECISION.element_bytes() as u64;
        if required > budget {
            return Err(Error::MemoryBudgetExceeded { required, budget });
        }
        let mut data = vec![T::zero(); components as usize];
        let (re, _) = component_indices(layout, 0);
        data[re] = T::one();
        Ok(StateVector { n, layout, data })
    }

    /// State from a dense list of `2^n` amplitudes given as `(re, im)` pairs.
    pub fn from_amplitudes(n: u32, amplitudes: &[Complex<f64>], layout: Layout) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange { n, max: MAX_QUBITS });
        }
        layout.validate(n)?;
        let len = 1usize << n;
        if amplitudes.len() != len {
            return Err(Error::CorruptDump {
                message: format!("expected {len} amplitudes, got {}", amplitudes.len()),
            });
        }
        let mut data = vec![T::zero(); 2 * len];
        for (i, amp) in amplitudes.iter().enumerate() {
            let (re, im) = component_indices(layout, i);
            data[re] = T::from_f64(amp.re);
            data[im] = T::from_f64(amp.im);
        }
        Ok(StateVector { n, layout, data })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n
    }

    /// Number of amplitudes, `2^n`.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    /// Raw component storage in layout order.
    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Mutable raw component storage. Kernels use this; the layout contract
    /// is the caller's to uphold.
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Amplitude at basis index `i`, independent of layout.
    ///
    /// Panics if `i >= 2^n`, like slice indexing.
    pub fn amplitude(&self, i: usize) -> Complex<T> {
        assert!(i < self.len(), "basis index {i} out of range for n={}", self.n);
        let (re, im) = component_indices(self.layout, i);
        Complex::new(self.data[re], self.data[im])
    }

    /// Overwrites the amplitude at basis index `i`.
    pub fn set_amplitude(&mut self, i: usize, value: Complex<T>) {
        assert!(i < self.len(), "basis index {i} out of range for n={}", self.n);
        let (re, im) = component_indices(self.layout, i);
        self.data[re] = value.re;
        self.data[im] = value.im;
    }

    /// `|amplitude(i)|^2` evaluated in f64.
    pub fn probability(&self, i: usize) -> f64 {
        let a = self.amplitude(i);
        let re = a.re.to_f64();
        let im = a.im.to_f64();
        re * re + im * im
    }

    /// Sum of `|c_i|^2`, accumulated in f64. 1.0 for any valid state.
    pub fn norm_sq(&self) -> f64 {
        (0..self.len()).map(|i| self.probability(i)).sum()
    }

    /// Converts to the blocked layout in place with `O(lanes)` scratch.
    /// A state already blocked with the same lane count is left untouched;
    /// a different lane count is an error.
    pub fn to_blocked(&mut self, lanes: usize) -> Result<()> {
        match self.layout {
            Layout::Blocked { lanes: have } if have == lanes => return Ok(()),
            Layout::Blocked { lanes: have } => {
                return Err(Error::LaneMismatch {
                    expected: lanes,
                    found: have,
                })
            }
            Layout::Interleaved => {}
        }
        Layout::Blocked { lanes }.validate(self.n)?;
        let mut scratch = vec![T::zero(); 2 * lanes];
        for block in self.data.chunks_exact_mut(2 * lanes) {
            scratch.copy_from_slice(block);
            for o in 0..lanes {
                block[o] = scratch[2 * o];
                block[lanes + o] = scratch[2 * o + 1];
            }
        }
        self.layout = Layout::Blocked { lanes };
        Ok(())
    }

    /// Converts back to the interleaved layout in place. No-op when already
    /// interleaved.
    pub fn to_interleaved(&mut self) -> Result<()> {
        let lanes = match self.layout {
            Layout::Interleaved => return Ok(()),
            Layout::Blocked { lanes } => lanes,
        };
        let mut scratch = vec![T::zero(); 2 * lanes];
        for block in self.data.chunks_exact_mut(2 * lanes) {
            scratch.copy_from_slice(block);
            for o in 0..lanes {
                block[2 * o] = scratch[o];
                block[2 * o + 1] = scratch[lanes + o];
            }
        }
        self.layout = Layout::Interleaved;
        Ok(())
    }

    /// Writes the state as a binary dump. Blocked states are converted to
    /// interleaved order on the fly; the file never depends on a lane count.
    ///
    /// Format (all integers little-endian):
    ///
    /// ```text
    /// offset  size  field
    ///      0     8  magic "VLAQSTAT"
    ///      8     1  format version (1)
    ///      9     1  precision code (1 = 32-bit, 2 = 64-bit components)
    ///     10     1  layout code (0 = interleaved)
    ///     11     1  reserved (0)
    ///     12     4  qubit count
    ///     16     -  2^(n+1) real components, interleaved [re, im] pairs
    /// ```
    pub fn write_to<W: Write>(&self, writer: &mut W) -> Result<()> {
        let mut header = Vec::with_capacity(DUMP_HEADER_LEN);
        header.extend_from_slice(DUMP_MAGIC);
        header.push(DUMP_VERSION);
        header.push(T::PRECISION.dump_code());
        header.push(Layout::Interleaved.dump_code());
        header.push(0);
        header.extend_from_slice(&self.n.to_le_bytes());
        writer.write_all(&header)?;

        let mut buf = Vec::with_capacity(self.len().min(1 << 16) * T::PRECISION.complex_bytes());
        for i in 0..self.len() {
            let a = self.amplitude(i);
            a.re.write_le(&mut buf);
            a.im.write_le(&mut buf);
            if buf.len() >= 1 << 20 {
                writer.write_all(&buf)?;
                buf.clear();
            }
        }
        writer.write_all(&buf)?;
        Ok(())
    }

    /// Reads a state dump produced by [`StateVector::write_to`]. The stored
    /// precision must match `T`.
    pub fn read_from<R: Read>(reader: &mut R) -> Result<Self> {
        let header = DumpHeader::read_from(reader)?;
        if header.precision != T::PRECISION {
            return Err(Error::DumpPrecisionMismatch {
                expected: T::PRECISION.to_string(),
                found: header.precision.to_string(),
            });
        }
        let components = 1usize << (header.n_qubits + 1);
        let width = T::PRECISION.element_bytes();
        let mut raw = vec![0u8; components * width];
        reader.read_exact(&mut raw).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::CorruptDump {
                    message: "payload shorter than the header promises".into(),
                }
            } else {
                Error::Io(e)
            }
        })?;
        let data = raw.chunks_exact(width).map(T::read_le).collect();
        Ok(StateVector {
            n: header.n_qubits,
            layout: Layout::Interleaved,
            data,
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::FileIo {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(&mut BufWriter::new(file))
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::FileIo {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_from(&mut BufReader::new(file))
    }
}

impl<T: Scalar> fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("n", &self.n)
            .field("precision", &T::PRECISION)
            .field("layout", &self.layout)
            .finish_non_exhaustive()
    }
}

pub const DUMP_MAGIC: &[u8; 8] = b"VLAQSTAT";
pub const DUMP_VERSION: u8 = 1;
pub const DUMP_HEADER_LEN: usize = 16;

/// Parsed 16-byte header of a state dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DumpHeader {
    pub version: u8,
    pub precision: Precision,
    pub n_qubits: u32,
}

impl DumpHeader {
    pub fn read_from<R: Read>(reader: &mut R) -> Result<Self> {
        let mut header = [0u8; DUMP_HEADER_LEN];
        reader.read_exact(&mut header).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::CorruptDump {
                    message: "file shorter than the 16-byte header".into(),
                }
            } else {
                Error::Io(e)
            }
        })?;
        if &header[0..8] != DUMP_MAGIC {
            return Err(Error::CorruptDump {
                message: "bad magic".into(),
            });
        }
        if header[8] != DUMP_VERSION {
            return Err(Error::CorruptDump {
                message: format!("unsupported version {}", header[8]),
            });
        }
        let precision = Precision::from_dump_code(header[9]).ok_or(Error::CorruptDump {
            message: format!("unknown precision code {}", header[9]),
        })?;
        if header[10] != 0 {
            return Err(Error::CorruptDump {
                message: format!("unsupported layout code {}", header[10]),
            });
        }
        let n_qubits = u32::from_le_bytes([header[12], header[13], header[14], header[15]]);
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::CorruptDump {
                message: format!("qubit count {n_qubits} out of range"),
            });
        }
        Ok(DumpHeader {
            version: header[8],
            precision,
            n_qubits,
        })
    }
}

/// Largest elementwise distance between two states: `max_i |a_i - b_i|`,
/// evaluated in f64. Layouts and precisions may differ.
pub fn max_abs_diff<A: Scalar, B: Scalar>(a: &StateVector<A>, b: &StateVector<B>) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::QubitCountMismatch {
            a: a.n_qubits(),
            b: b.n_qubits(),
        });
    }
    let mut worst = 0.0f64;
    for i in 0..a.len() {
        let x = a.amplitude(i);
        let y = b.amplitude(i);
        let dre = x.re.to_f64() - y.re.to_f64();
        let dim = x.im.to_f64() - y.im.to_f64();
        let d = (dre * dre + dim * dim).sqrt();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// Fused multiply-accumulate convention shared by every kernel in the crate:
/// `acc += u * v` expanded into four real multiply-adds in a fixed order, so
/// engines that follow it produce bitwise-identical rounding.
#[inline(always)]
pub(crate) fn complex_mac<T: Scalar>(
    acc_re: &mut T,
    acc_im: &mut T,
    u_re: T,
    u_im: T,
    v_re: T,
    v_im: T,
) {
    *acc_re += u_re * v_re;
    *acc_re -= u_im * v_im;
    *acc_im += u_re * v_im;
    *acc_im += u_im * v_re;
}
