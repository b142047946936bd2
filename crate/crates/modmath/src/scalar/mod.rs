//! Scalar modular arithmetic: context construction with all
//! precomputations, and the add/sub/neg, Barrett, Montgomery, and
//! floating-point/FMA kernels.
//!
//! All contexts are immutable after construction and safe to share across
//! threads; every kernel is pure and reentrant. Range preconditions are
//! caller contracts, checked by debug assertions only.

mod barrett;
pub(crate) mod float;
mod montgomery;

pub use barrett::{
    add_mod, add_mod_min, add_mod_shift, barrett_reduce, barrett_reduce_counted,
    barrett_reduce_half, mul_mod, mul_mod_fixed, neg_mod, sub_mod, BarrettContext,
    BarrettHalfContext, FixedMultiplicand, Profile,
};
pub use float::{
    float_reduce_half, mul_mod_fma, two_product, FloatContext, FloatWord, HalfVariant,
};
pub use montgomery::{
    from_mont, mont_mul, mont_mul_fixed, mont_reduce, to_mont, MontFixedMultiplicand,
    MontgomeryContext,
};

pub(crate) use montgomery::mod_inverse;
