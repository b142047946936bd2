//! Machine word abstraction: each supported unsigned width is paired with a
//! double-width companion type used for intermediate products and quotients.

use core::fmt;
use core::hash::Hash;
use core::ops::{Add, BitAnd, BitOr, BitXor, Div, Mul, Not, Rem, Shl, Shr, Sub};

/// Operations shared by the word types and their double-width companions.
pub trait Uint:
    Copy
    + Eq
    + Ord
    + Default
    + fmt::Debug
    + fmt::Display
    + fmt::LowerHex
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Rem<Output = Self>
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + Not<Output = Self>
    + Shl<u32, Output = Self>
    + Shr<u32, Output = Self>
    + Send
    + Sync
    + 'static
{
    const BITS: u32;
    const ZERO: Self;
    const ONE: Self;
    const MAX: Self;

    fn wrapping_add(self, rhs: Self) -> Self;
    fn wrapping_sub(self, rhs: Self) -> Self;
    fn wrapping_mul(self, rhs: Self) -> Self;
    fn wrapping_neg(self) -> Self;
    fn overflowing_add(self, rhs: Self) -> (Self, bool);
    /// Right shift that propagates the sign bit (the C `>>` on signed values).
    fn arithmetic_shr(self, k: u32) -> Self;
    fn leading_zeros(self) -> u32;
    fn from_u128(v: u128) -> Self;
    fn to_u128(self) -> u128;

    #[inline]
    fn from_u64(v: u64) -> Self {
        Self::from_u128(v as u128)
    }
    #[inline]
    fn to_u64(self) -> u64 {
        self.to_u128() as u64
    }
    /// All-ones when `b` is true, zero otherwise.
    #[inline]
    fn mask(b: bool) -> Self {
        if b {
            Self::MAX
        } else {
            Self::ZERO
        }
    }
}

macro_rules! impl_uint {
    ($t:ty, $signed:ty) => {
        impl Uint for $t {
            const BITS: u32 = <$t>::BITS;
            const ZERO: Self = 0;
            const ONE: Self = 1;
            const MAX: Self = <$t>::MAX;

            #[inline]
            fn wrapping_add(self, rhs: Self) -> Self {
                self.wrapping_add(rhs)
            }
            #[inline]
            fn wrapping_sub(self, rhs: Self) -> Self {
                self.wrapping_sub(rhs)
            }
            #[inline]
            fn wrapping_mul(self, rhs: Self) -> Self {
                self.wrapping_mul(rhs)
            }
            #[inline]
            fn wrapping_neg(self) -> Self {
                self.wrapping_neg()
            }
            #[inline]
            fn overflowing_add(self, rhs: Self) -> (Self, bool) {
                self.overflowing_add(rhs)
            }
            #[inline]
            fn arithmetic_shr(self, k: u32) -> Self {
                ((self as $signed) >> k) as $t
            }
            #[inline]
            fn leading_zeros(self) -> u32 {
                self.leading_zeros()
            }
            #[inline]
            fn from_u128(v: u128) -> Self {
                v as $t
            }
            #[inline]
            fn to_u128(self) -> u128 {
                self as u128
            }
        }
    };
}

impl_uint!(u8, i8);
impl_uint!(u16, i16);
impl_uint!(u32, i32);
impl_uint!(u64, i64);
impl_uint!(u128, i128);

/// An unsigned word of bit-size n for which a 2n-bit type exists. Moduli,
/// residues, and pre-inverses live in `Self`; products and scaled quotients
/// in `Self::Wide`.
pub trait Word: Uint + Hash {
    type Wide: Uint;

    fn to_wide(self) -> Self::Wide;
    /// Truncating narrow from the double-width type.
    fn from_wide(w: Self::Wide) -> Self;
}

macro_rules! impl_word {
    ($t:ty, $wide:ty) => {
        impl Word for $t {
            type Wide = $wide;

            #[inline]
            fn to_wide(self) -> $wide {
                self as $wide
            }
            #[inline]
            fn from_wide(w: $wide) -> $t {
                w as $t
            }
        }
    };
}

impl_word!(u8, u16);
impl_word!(u16, u32);
impl_word!(u32, u64);
impl_word!(u64, u128);

/// Number of bits in the binary expansion of `x` (0 for x = 0).
#[inline]
pub fn bit_size<U: Uint>(x: U) -> u32 {
    U::BITS - x.leading_zeros()
}

/// The bound r with 2^(r-1) < x <= 2^r, for x >= 1. Differs from
/// [`bit_size`] exactly at powers of two.
#[inline]
pub fn ceil_log2<U: Uint>(x: U) -> u32 {
    debug_assert!(x >= U::ONE);
    bit_size(x - U::ONE)
}
