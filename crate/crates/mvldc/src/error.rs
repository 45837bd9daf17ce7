//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // ---- moduli ----
    #[error("modulus {0} must be odd")]
    EvenModulus(u64),
    #[error("modulus {0} must be at least 3")]
    ModulusTooSmall(u64),
    #[error("modulus {0} exceeds the 2^32 bound")]
    ModulusTooLarge(u64),
    #[error("modulus {m} has {r} distinct prime factors; at most 4 are supported")]
    TooManyPrimeFactors { m: u64, r: usize },
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("CRT requires at least one congruence")]
    EmptyCrt,
    #[error("residue {s} is not in S_{m} ∪ {{0}}")]
    NotCanonical { s: u64, m: u64 },

    // ---- vectors ----
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vectors have different moduli: {0} vs {1}")]
    VectorModulusMismatch(u64, u64),

    // ---- fields ----
    #[error("field degree {0} is out of the supported range 1..=40")]
    DegreeOutOfRange(u32),
    #[error("polynomial {0:#x} is not irreducible of the requested degree")]
    NotIrreducible(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("the zero element has no multiplicative order")]
    ZeroOrder,
    #[error("{m} does not divide the group order 2^{t} - 1")]
    OrderDoesNotDivide { m: u64, t: u32 },
    #[error("element has order {found}, expected {expected}")]
    WrongOrder { expected: u64, found: u64 },
    #[error("degree of {poly:#x} ({deg}) does not divide the field degree {t}")]
    DegreeDoesNotDivide { poly: u64, deg: u32, t: u32 },
    #[error("no root of {0:#x} found in the field")]
    NoRootFound(u64),
    #[error("no twist exponent maps the order-{m} base element onto the target")]
    NoTwistExponent { m: u64 },
    #[error("element is not in the span of the first {t1} powers of gamma")]
    NotInGammaSpan { t1: u32 },
    #[error("root search over a subgroup of order {order} exceeds the {cap} cap")]
    SubgroupTooLarge { order: u64, cap: u64 },

    // ---- polynomials ----
    #[error("S must not contain 0")]
    ZeroInS,
    #[error("polynomial has no terms after canonicalization")]
    EmptyPolynomial,
    #[error("gamma (order {gamma_m}) does not match the polynomial modulus {poly_m}")]
    GammaModulusMismatch { gamma_m: u64, poly_m: u64 },
    #[error("gamma is not a root of the recorded minimal polynomial {0:#x}")]
    NotAGammaRoot(u64),
    #[error("coefficient {coef:#x} does not fit in t1 = {t1} bits")]
    CoefficientTooWide { coef: u64, t1: u32 },
    #[error("search space estimate {estimate} exceeds the ceiling {ceiling}; raise the ceiling to proceed")]
    SearchSpaceTooLarge { estimate: u128, ceiling: u128 },
    #[error("affine solution space of size {size} exceeds the enumeration cap")]
    SolutionSpaceTooLarge { size: u128 },

    // ---- families / set systems ----
    #[error("family must contain at least one vector")]
    EmptyFamily,
    #[error("set system: set {index} has size {size} ≢ 0 mod {m}")]
    SetSizeNotZero { index: usize, size: usize, m: u64 },
    #[error("set system: |G_{i} ∩ G_{j}| ≡ {value} mod {m} is not in S_{m}")]
    IntersectionNotInS { i: usize, j: usize, value: u64, m: u64 },
    #[error("set system: set {index} contains {element}, outside the universe [1, {h}]")]
    ElementOutOfUniverse { index: usize, element: usize, h: usize },

    // ---- codes ----
    #[error("codeword length {n} exceeds the materialization cap {cap}")]
    CodeTooLarge { n: u64, cap: u64 },
    #[error("exact enumeration over {n} positions exceeds the guard {guard}")]
    EnumerationGuard { n: u64, guard: u64 },
    #[error("message length {got} does not match family size {expected}")]
    MessageLength { expected: usize, got: usize },
    #[error("decode index {i} out of range for a family of {n} vectors")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("expected {expected} query answers, got {got}")]
    AnswerCount { expected: usize, got: usize },
    #[error("codeword has {got} symbols, expected {expected}")]
    WordLength { expected: u64, got: u64 },
    #[error("codeword parameters (m={m}, h={h}, t={t}) do not match the code")]
    WordMismatch { m: u64, h: u32, t: u32 },
    #[error("adversarial corruption lists {got} positions; the budget is {max}")]
    CorruptionBudget { got: usize, max: usize },
    #[error("corruption position {0} is out of range or repeated")]
    BadCorruptionPosition(u64),
    #[error("position {0} is out of range")]
    PositionOutOfRange(u64),

    // ---- composition ----
    #[error("composition requires two nontrivial odd moduli, got m1={m1}, m2={m2}")]
    TrivialCompositionModulus { m1: u64, m2: u64 },

    // ---- serialization ----
    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
    #[error("invalid hex bit-vector {0:?}")]
    BadHex(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
