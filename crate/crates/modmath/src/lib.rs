//! Modular integer arithmetic with scalar and lane-parallel kernels, a
//! blocked truncated Fourier transform over Z/pZ, and FFT-based products:
//! polynomial multiplication, big-integer multiplication through three-prime
//! Chinese remaindering, and polynomial/integer matrix products.
//!
//! The reduction strategies:
//! - **Barrett**: any modulus, division replaced by a cached scaled
//!   reciprocal; profiles trade modulus width for correction count.
//! - **Montgomery**: odd moduli in 2-adic representation; products reduce
//!   through the cofactor pair.
//! - **Floating point / FMA**: moduli up to two bits short of the mantissa,
//!   reduced with an exact product-error term.
//!
//! Lane-parallel versions of every kernel live in [`lanes`]; they are
//! branch-free per batch and must agree with their scalar counterparts
//! lane-wise. [`selftest`] bundles the differential and property suites the
//! CLI exposes.
//!
//! ```
//! use modmath::scalar::{BarrettContext, Profile, mul_mod};
//!
//! let ctx = BarrettContext::<u32>::new(469762049, Profile::Minus2).unwrap();
//! assert_eq!(mul_mod(123456, 654321, &ctx), (123456u64 * 654321 % 469762049) as u32);
//! ```

pub mod bigmul;
mod error;
pub mod lanes;
pub mod ntt;
pub mod polymul;
pub mod scalar;
pub mod selftest;
pub mod word;

pub use error::ModError;
