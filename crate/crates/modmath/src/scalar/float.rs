//! Modular reduction through IEEE-754 numeric types.
//!
//! The modulus and all residues are integers stored exactly in the float
//! format. Reduction multiplies by a precomputed reciprocal and corrects by
//! at most one modulus step in each direction. The rounding mode is never
//! switched: the upward reciprocal is produced by a one-ulp bump validated
//! by exact rational comparison, and the kernels keep the correction
//! branches that make them valid under round-to-nearest.

use crate::error::ModError;
use crate::word::ceil_log2;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// An IEEE-754 binary format usable for modular kernels. `ELL` is the
/// explicitly stored mantissa width (trailing significant field).
pub trait FloatWord:
    Copy
    + PartialOrd
    + core::fmt::Debug
    + core::fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const ELL: u32;
    const ZERO: Self;
    const ONE: Self;
    /// Veltkamp splitting constant 2^ceil((ELL+1)/2) + 1.
    const SPLITTER: Self;
    /// Whether the compilation target provides a hardware fused multiply-add.
    const HAS_FMA: bool;

    fn from_u64(v: u64) -> Self;
    fn to_u64(self) -> u64;
    fn floor(self) -> Self;
    /// Fused multiply-add with a single rounding.
    fn mul_add(self, a: Self, b: Self) -> Self;
    /// Next representable value above a positive finite value.
    fn next_up_pos(self) -> Self;
    /// (integer mantissa, base-2 exponent) with self = mant * 2^exp exactly.
    fn decompose(self) -> (u64, i32);
    fn is_sign_negative(self) -> bool;
}

impl FloatWord for f64 {
    const ELL: u32 = 52;
    const ZERO: f64 = 0.0;
    const ONE: f64 = 1.0;
    const SPLITTER: f64 = 134217729.0; // 2^27 + 1
    const HAS_FMA: bool = cfg!(target_feature = "fma");

    #[inline]
    fn from_u64(v: u64) -> f64 {
        v as f64
    }
    #[inline]
    fn to_u64(self) -> u64 {
        self as u64
    }
    #[inline]
    fn floor(self) -> f64 {
        f64::floor(self)
    }
    #[inline]
    fn mul_add(self, a: f64, b: f64) -> f64 {
        f64::mul_add(self, a, b)
    }
    #[inline]
    fn next_up_pos(self) -> f64 {
        debug_assert!(self > 0.0 && self.is_finite());
        f64::from_bits(self.to_bits() + 1)
    }
    #[inline]
    fn decompose(self) -> (u64, i32) {
        let bits = self.to_bits();
        let exp_field = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        debug_assert!(exp_field > 0, "subnormals not expected here");
        ((1u64 << 52) | frac, exp_field - 1023 - 52)
    }
    #[inline]
    fn is_sign_negative(self) -> bool {
        f64::is_sign_negative(self)
    }
}

impl FloatWord for f32 {
    const ELL: u32 = 23;
    const ZERO: f32 = 0.0;
    const ONE: f32 = 1.0;
    const SPLITTER: f32 = 4097.0; // 2^12 + 1
    const HAS_FMA: bool = cfg!(target_feature = "fma");

    #[inline]
    fn from_u64(v: u64) -> f32 {
        v as f32
    }
    #[inline]
    fn to_u64(self) -> u64 {
        self as u64
    }
    #[inline]
    fn floor(self) -> f32 {
        f32::floor(self)
    }
    #[inline]
    fn mul_add(self, a: f32, b: f32) -> f32 {
        f32::mul_add(self, a, b)
    }
    #[inline]
    fn next_up_pos(self) -> f32 {
        debug_assert!(self > 0.0 && self.is_finite());
        f32::from_bits(self.to_bits() + 1)
    }
    #[inline]
    fn decompose(self) -> (u64, i32) {
        let bits = self.to_bits();
        let exp_field = ((bits >> 23) & 0xff) as i32;
        let frac = (bits & ((1u32 << 23) - 1)) as u64;
        debug_assert!(exp_field > 0, "subnormals not expected here");
        ((1u64 << 23) | frac, exp_field - 127 - 23)
    }
    #[inline]
    fn is_sign_negative(self) -> bool {
        f32::is_sign_negative(self)
    }
}

/// A modulus of bit-size at most ELL - 2 with both roundings of 1/p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatContext<F: FloatWord> {
    p: F,
    p_int: u64,
    m: u32,
    u: F,
    ubar: F,
}

/// Exact rational test x * p >= 1 for a positive float x.
fn recip_at_least_one<F: FloatWord>(x: F, p: u64) -> bool {
    let (mant, exp) = x.decompose();
    debug_assert!(exp < 0 && exp > -128);
    (mant as u128) * (p as u128) >= 1u128 << (-exp) as u32
}

impl<F: FloatWord> FloatContext<F> {
    pub fn new(p_int: u64) -> Result<Self, ModError> {
        if p_int < 2 {
            return Err(ModError::InvalidModulus);
        }
        let m = ceil_log2(p_int);
        if m > F::ELL - 2 {
            return Err(ModError::ProfileViolation);
        }
        let p = F::from_u64(p_int);
        let u = F::ONE / p;
        // round-to-nearest puts u within half an ulp of 1/p, so at most one
        // upward step reaches ubar >= 1/p
        let ubar = if recip_at_least_one(u, p_int) {
            u
        } else {
            u.next_up_pos()
        };
        debug_assert!(recip_at_least_one(ubar, p_int));
        Ok(FloatContext {
            p,
            p_int,
            m,
            u,
            ubar,
        })
    }

    #[inline]
    pub fn modulus(&self) -> F {
        self.p
    }
    #[inline]
    pub fn modulus_int(&self) -> u64 {
        self.p_int
    }
    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }
    /// Round-to-nearest reciprocal.
    #[inline]
    pub fn u(&self) -> F {
        self.u
    }
    /// Upward reciprocal: ubar * p >= 1 under exact comparison.
    #[inline]
    pub fn ubar(&self) -> F {
        self.ubar
    }
}

/// Which half-size reduction to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfVariant {
    /// Reciprocal u, both correction branches; correct under any rounding
    /// mode for a < 2^floor(ELL/2) * p, p of bit-size <= floor(ELL/2).
    AnyRounding,
    /// Reciprocal ubar, high branch dropped; valid when p is prime and a is
    /// a product of residues (or a = 0), for a < 2^floor((ELL-1)/2) * p and
    /// p of bit-size <= floor((ELL-1)/2).
    UpwardNoHighBranch,
}

/// a rem p for a nonnegative integer value a in half-size range.
#[inline]
pub fn float_reduce_half<F: FloatWord>(a: F, ctx: &FloatContext<F>, variant: HalfVariant) -> F {
    let out = match variant {
        HalfVariant::AnyRounding => {
            debug_assert!(ctx.m <= F::ELL / 2);
            debug_assert!(
                a >= F::ZERO && a.to_u64() < ctx.p_int << (F::ELL / 2),
                "input exceeds alpha*p"
            );
            let b = a * ctx.u;
            let c = b.floor();
            let d = a - c * ctx.p;
            if d >= ctx.p {
                d - ctx.p
            } else if d < F::ZERO {
                d + ctx.p
            } else {
                d
            }
        }
        HalfVariant::UpwardNoHighBranch => {
            debug_assert!(ctx.m <= (F::ELL - 1) / 2);
            debug_assert!(
                a >= F::ZERO && a.to_u64() < ctx.p_int << ((F::ELL - 1) / 2),
                "input exceeds alpha*p"
            );
            let b = a * ctx.ubar;
            let c = b.floor();
            let d = a - c * ctx.p;
            if d < F::ZERO {
                d + ctx.p
            } else {
                d
            }
        }
    };
    debug_assert!(
        out.to_u64() == a.to_u64() % ctx.p_int,
        "integer oracle violated"
    );
    out
}

/// Exact product: h = fl(a*b) and l with h + l = a*b exactly.
#[inline]
pub fn two_product<F: FloatWord>(a: F, b: F) -> (F, F) {
    let h = a * b;
    if F::HAS_FMA {
        (h, a.mul_add(b, -h))
    } else {
        // Dekker/Veltkamp splitting; exact for the magnitudes used here
        let (a1, a2) = split(a);
        let (b1, b2) = split(b);
        let l = ((a1 * b1 - h) + a1 * b2 + a2 * b1) + a2 * b2;
        (h, l)
    }
}

#[inline]
fn split<F: FloatWord>(a: F) -> (F, F) {
    let c = F::SPLITTER * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// h - c*p computed exactly (|h - c*p| stays below 2^ELL).
#[inline]
pub(crate) fn fnma_exact<F: FloatWord>(c: F, p: F, h: F) -> F {
    if F::HAS_FMA {
        (-c).mul_add(p, h)
    } else {
        let (g, gl) = two_product(c, p);
        (h - g) - gl
    }
}

/// (a1 * a2) rem p for integer residues with a1*a2 < 2^(ELL-2) * p.
#[inline]
pub fn mul_mod_fma<F: FloatWord>(a1: F, a2: F, ctx: &FloatContext<F>) -> F {
    let (h, l) = two_product(a1, a2);
    let b = h * ctx.u;
    let c = b.floor();
    let d = fnma_exact(c, ctx.p, h);
    let e = d + l;
    if e >= ctx.p {
        e - ctx.p
    } else if e < F::ZERO {
        e + ctx.p
    } else {
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ubar_contract_p7() {
        let ctx = FloatContext::<f64>::new(7).unwrap();
        assert!(recip_at_least_one(ctx.ubar(), 7));
        // one ulp below ubar must fall under 1/p
        let below = f64::from_bits(ctx.ubar().to_bits() - 1);
        assert!(!recip_at_least_one(below, 7));
    }

    #[test]
    fn power_of_two_is_exact() {
        let ctx = FloatContext::<f64>::new(2).unwrap();
        assert_eq!(ctx.u(), 0.5);
        assert_eq!(ctx.ubar(), 0.5);
    }

    #[test]
    fn width_limits() {
        assert_eq!(
            FloatContext::<f64>::new(1u64 << 51).unwrap_err(),
            ModError::ProfileViolation
        );
        assert!(FloatContext::<f64>::new((1u64 << 50) - 27).is_ok());
        assert_eq!(
            FloatContext::<f32>::new(1u64 << 22).unwrap_err(),
            ModError::ProfileViolation
        );
        assert!(FloatContext::<f32>::new((1u64 << 21) - 9).is_ok());
    }

    #[test]
    fn reduce_half_examples() {
        let ctx = FloatContext::<f64>::new(7).unwrap();
        assert_eq!(
            float_reduce_half(200.0, &ctx, HalfVariant::AnyRounding),
            4.0
        );
        assert_eq!(float_reduce_half(0.0, &ctx, HalfVariant::AnyRounding), 0.0);
        assert_eq!(float_reduce_half(6.0, &ctx, HalfVariant::AnyRounding), 6.0);
        assert_eq!(
            float_reduce_half(200.0, &ctx, HalfVariant::UpwardNoHighBranch),
            4.0
        );
    }

    #[test]
    fn fma_examples() {
        let ctx = FloatContext::<f64>::new(7).unwrap();
        assert_eq!(mul_mod_fma(3.0, 4.0, &ctx), 5.0);
        assert_eq!(mul_mod_fma(0.0, 6.0, &ctx), 0.0);
    }

    #[test]
    fn reduce_half_binary32() {
        // 11-bit modulus: the widest the binary32 half paths accept
        let p = 2003u64;
        let ctx = FloatContext::<f32>::new(p).unwrap();
        let mut state = 0xf00du64;
        for _ in 0..50_000 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = (state >> 16) % (p << 11);
            assert_eq!(
                float_reduce_half(a as f32, &ctx, HalfVariant::AnyRounding) as u64,
                a % p,
                "a={a}"
            );
            // p is prime, so residue products satisfy the upward contract
            let x = (state >> 8) % p;
            let y = (state >> 24) % p;
            let prod = x * y;
            assert_eq!(
                float_reduce_half(prod as f32, &ctx, HalfVariant::UpwardNoHighBranch) as u64,
                prod % p,
                "x={x} y={y}"
            );
        }
    }

    #[test]
    fn fma_wide_modulus_matches_integer_oracle() {
        let p = (1u64 << 50) - 27;
        let ctx = FloatContext::<f64>::new(p).unwrap();
        let a = (p - 1) as f64;
        let got = mul_mod_fma(a, a, &ctx) as u64;
        let want = (((p - 1) as u128 * (p - 1) as u128) % p as u128) as u64;
        assert_eq!(got, want);
    }

    #[test]
    fn two_product_is_exact_and_matches_fma() {
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..10_000 {
            let a = (next() % ((1 << 50) - 27)) as f64;
            let b = (next() % ((1 << 50) - 27)) as f64;
            let (h, l) = two_product(a, b);
            // reference: the always-fused std path
            let l_ref = a.mul_add(b, -h);
            assert_eq!(l, l_ref);
            // exactness: h + l equals the integer product
            let prod = a as u128 * b as u128;
            let h_int = h as u128;
            if l >= 0.0 {
                assert_eq!(h_int + l as u128, prod);
            } else {
                assert_eq!(h_int - (-l) as u128, prod);
            }
        }
    }

    #[test]
    fn f32_kernels_match_oracle() {
        let p = (1u64 << 21) - 9;
        let ctx = FloatContext::<f32>::new(p).unwrap();
        let mut state = 0x9e37_79b9u64;
        for _ in 0..10_000 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x = (state >> 11) % p;
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let y = (state >> 11) % p;
            let got = mul_mod_fma(x as f32, y as f32, &ctx) as u64;
            assert_eq!(got, (x * y) % p, "x={x} y={y}");
        }
    }
}
