use core::fmt;

/// Errors reported by context constructors and the transform/product layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModError {
    /// Modulus outside the domain of the requested context (p < 2, even
    /// where oddness is required, or composite where primality is required).
    InvalidModulus,
    /// Modulus too wide for the requested profile or floating-point format.
    ProfileViolation,
    /// Requested transform size not supported by the modulus (2^k does not
    /// divide p - 1) or by the plan.
    UnsupportedTransformSize,
    /// Operand exceeds the capacity of the available plans.
    SizeOverflow,
    /// Matrix dimensions do not agree.
    DimensionMismatch,
    /// Operands built over different moduli.
    ModulusMismatch,
    /// Index or length outside the documented range.
    RangeError,
    /// Malformed hexadecimal input.
    BadHex,
}

impl fmt::Display for ModError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            ModError::InvalidModulus => "invalid modulus",
            ModError::ProfileViolation => "modulus too wide for profile",
            ModError::UnsupportedTransformSize => "unsupported transform size",
            ModError::SizeOverflow => "operand exceeds plan capacity",
            ModError::DimensionMismatch => "matrix dimension mismatch",
            ModError::ModulusMismatch => "modulus mismatch",
            ModError::RangeError => "argument out of range",
            ModError::BadHex => "malformed hex string",
        };
        f.write_str(msg)
    }
}

impl std::error::Error for ModError {}
