use thiserror::Error;

/// Every failure the workbench can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("unsupported extension degree {r} over F_{p} (need q = p^r <= 65536)")]
    UnsupportedDegree { p: u32, r: u32 },
    #[error("no shipped irreducible modulus for degree {r} over F_{p}; supply one")]
    NoShippedModulus { p: u32, r: u32 },
    #[error("malformed modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operands have different variable counts ({0} vs {1})")]
    NvarsMismatch(usize, usize),
    #[error("polynomial is not homogeneous")]
    Inhomogeneous,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("sub-basis columns are linearly dependent")]
    DependentColumns,
    #[error("vector does not lie in the subspace")]
    NotInSubspace,
    #[error("generator {0} not invertible")]
    SingularGenerator(usize),
    #[error("generator {index} has wrong shape (expected {d}x{d})")]
    GeneratorShape { index: usize, d: usize },
    #[error("group closure exceeds the cap of {0} elements")]
    GroupTooLarge(usize),
    #[error("element index {0} out of range")]
    BadElement(usize),
    #[error("subset is not closed under multiplication")]
    NotClosed,
    #[error("group contexts differ")]
    ContextMismatch,
    #[error("polynomial is not invariant under generator {0}")]
    NotInvariant(usize),
    #[error("q^d = {0} exceeds the Dickson budget of {1}")]
    DicksonBudget(u64, u64),
    #[error("hsop validation failed: {0}")]
    HsopInvalid(String),
    #[error("characteristic {p} divides |G| = {order}")]
    CharacteristicDividesOrder { p: u32, order: usize },
    #[error("group is not cyclic with the chosen generator (order {gen_order}, |G| = {order})")]
    NotCyclic { gen_order: usize, order: usize },
    #[error("cochain budget exceeded: {needed} entries > {limit} (level {level}, degree {degree})")]
    Budget { needed: u128, limit: u128, level: usize, degree: usize },
    #[error("slices do not match: {0}")]
    SliceMismatch(String),
    #[error("J_0 = 0: cohomological index 0 is rejected (annihilators are only meaningful for i >= 1)")]
    IndexZero,
    #[error("invariant does not annihilate the window: {0}")]
    NotAnnihilating(String),
    #[error("missing certificate for index {0}")]
    MissingCertificate(usize),
    #[error("index {index} out of range 1..={len}")]
    PositionOutOfRange { index: usize, len: usize },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("audit failure: {0}")]
    Audit(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
