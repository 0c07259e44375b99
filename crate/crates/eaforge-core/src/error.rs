use core::fmt;

/// Errors reported by the library.
///
/// Most operations that merely fail to produce a value (a singular matrix,
/// an inconsistent system) return `Option` instead; these variants cover
/// contract violations and data that an operation cannot accept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The function has algebraic degree above 2 where a quadratic one is
    /// required.
    DegreeTooHigh { degree: usize },
    /// Input dimensions do not agree.
    DimensionMismatch,
    /// The function is not APN (some derivative direction does not behave
    /// as the APN property demands).
    NotApn,
    /// The function is not quadratic.
    NotQuadratic,
    /// Sigma multiplicities need an even k larger than 2.
    KTooSmall,
    /// Every nonzero input evaluates the Jacobian to rank 0, i.e. the
    /// function is affine; rank-guided recovery does not apply.
    NoUsableRank,
    /// The requested computation would exceed the configured size cap.
    SizeCap { n: usize, cap: usize },
    /// A solution space is too large to enumerate under the given cap.
    EnumerationCapExceeded { dim: usize },
    /// The vectors passed for completion are not linearly independent.
    DependentInput,
    /// The field modulus is not an irreducible polynomial.
    NotIrreducible { modulus: u32 },
    /// A univariate polynomial lists the same exponent twice.
    DuplicateExponent { exponent: u64 },
    /// Applying an admissible map did not yield the graph of a function.
    NotAGraph,
    /// An invariant was requested for a function it does not apply to.
    InapplicableInvariant { index: usize, invariant: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegreeTooHigh { degree } => {
                write!(f, "function has degree {degree}, expected at most 2")
            }
            Error::DimensionMismatch => write!(f, "dimension mismatch"),
            Error::NotApn => write!(f, "function is not APN"),
            Error::NotQuadratic => write!(f, "function is not quadratic"),
            Error::KTooSmall => write!(f, "k must be even and larger than 2"),
            Error::NoUsableRank => {
                write!(f, "all nonzero Jacobian ranks are 0 (function is affine)")
            }
            Error::SizeCap { n, cap } => {
                write!(f, "n = {n} exceeds the size cap of {cap} for this operation")
            }
            Error::EnumerationCapExceeded { dim } => {
                write!(f, "solution space of dimension {dim} exceeds the enumeration cap")
            }
            Error::DependentInput => write!(f, "input vectors are linearly dependent"),
            Error::NotIrreducible { modulus } => {
                write!(f, "modulus {modulus:#x} is not irreducible over F_2")
            }
            Error::DuplicateExponent { exponent } => {
                write!(f, "exponent {exponent} appears more than once")
            }
            Error::NotAGraph => write!(f, "mapped graph is not the graph of a function"),
            Error::InapplicableInvariant { index, invariant } => {
                write!(f, "invariant {invariant} does not apply to function #{index}")
            }
        }
    }
}

impl core::error::Error for Error {}
