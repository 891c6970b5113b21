use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building states, circuits, plans or runs.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit count must be between 1 and {max}, got {n}")]
    QubitCountOutOfRange { n: u32, max: u32 },

    #[error("state of {required} bytes exceeds the memory budget of {budget} bytes")]
    MemoryBudgetExceeded { required: u64, budget: u64 },

    #[error("lane count {lanes} is invalid for a {n}-qubit state (must be a power of two <= 2^n)")]
    InvalidLaneCount { lanes: usize, n: u32 },

    #[error("expected {expected} layout, found {found}")]
    LayoutMismatch { expected: String, found: String },

    #[error("state is blocked with {found} lanes, expected {expected}")]
    LaneMismatch { expected: usize, found: usize },

    #[error("vector length {vlen_bits} bits is invalid (power of two in 128..=2048 required)")]
    InvalidVectorLength { vlen_bits: usize },

    #[error("lane configuration with {num_vals} values per vector is invalid (power of two >= 2 required)")]
    InvalidLaneConfig { num_vals: usize },

    #[error("qubit position {position} is out of range for a {n}-qubit circuit")]
    QubitOutOfRange { position: usize, n: u32 },

    #[error("qubit position {position} appears more than once in targets/controls")]
    DuplicateQubit { position: usize },

    #[error("gate needs at least one target qubit")]
    EmptyTargets,

    #[error("gate acts on {k} qubits, the maximum supported width is {max}")]
    GateTooWide { k: usize, max: usize },

    #[error("matrix has {len} entries, expected {expected} for dimension {dim}")]
    MatrixShape { len: usize, expected: usize, dim: usize },

    #[error("matrix dimension {dim} is not a power of two")]
    MatrixDimNotPowerOfTwo { dim: usize },

    #[error("matrix dimensions {a} and {b} do not match")]
    MatrixDimMismatch { a: usize, b: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e} exceeds {tolerance:.0e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("qubit counts differ: {a} vs {b}")]
    QubitCountMismatch { a: u32, b: u32 },

    #[error("fusion width {f} is outside 1..={max}")]
    FusionWidthOutOfRange { f: usize, max: usize },

    #[error("{kind} circuit needs at least {min} qubits, got {n}")]
    CircuitTooSmall { kind: String, min: u32, n: u32 },

    #[error("marked value {marked} does not fit in a {bits}-bit search register")]
    MarkedOutOfRange { marked: u64, bits: u32 },

    #[error("unknown benchmark '{name}' (expected qft, grover, ghz, qrc, qv or synthetic)")]
    UnknownBenchmark { name: String },

    #[error("circuit text, line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("gate '{label}' cannot be written as circuit text")]
    NotSerializable { label: String },

    #[error("state dump is corrupt: {message}")]
    CorruptDump { message: String },

    #[error("state dump holds {found} precision data, expected {expected}")]
    DumpPrecisionMismatch { expected: String, found: String },

    #[error("worker count must be at least 1")]
    ZeroWorkers,

    #[error("repetition count must be at least 1")]
    ZeroReps,

    #[error("invalid sweep range '{text}' (expected A:B with 1 <= A <= B <= 6)")]
    InvalidSweepRange { text: String },

    #[error("invalid flag value: {message}")]
    InvalidFlag { message: String },

    #[error("{path}: {source}")]
    FileIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than I/O or internal
    /// failures. The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::FileIo { .. })
    }
}
