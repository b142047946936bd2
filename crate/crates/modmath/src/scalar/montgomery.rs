//! Montgomery reduction: 2-adic modular arithmetic for odd moduli.
//!
//! Residues are stored in Montgomery representation x~ = (x * 2^m) mod p.
//! The cofactors satisfy rho * 2^m - chi * p = 1 with 0 < rho < p and
//! 0 < chi < 2^m, computed by the extended Euclidean algorithm.

use crate::error::ModError;
use crate::word::{ceil_log2, Uint, Word};

/// An odd modulus with Montgomery cofactors for shift m (r <= m <= n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MontgomeryContext<W: Word> {
    p: W,
    m: u32,
    mu: W,
    chi: W,
    rho: W,
    r2: W,
}

/// Modular inverse of `a` modulo `p` by the extended Euclidean algorithm.
/// Returns None when gcd(a, p) != 1.
pub(crate) fn mod_inverse(a: u128, p: u128) -> Option<u128> {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    let p = p as i128;
    Some(old_s.rem_euclid(p) as u128)
}

impl<W: Word> MontgomeryContext<W> {
    pub fn new(p: W, m: u32) -> Result<Self, ModError> {
        let n = W::BITS;
        if p < W::from_u64(3) || p & W::ONE == W::ZERO {
            return Err(ModError::InvalidModulus);
        }
        let r = ceil_log2(p);
        if m < r || m > n {
            return Err(ModError::RangeError);
        }
        let pw = p.to_u128();
        let two_m_mod_p = (1u128 << m) % pw;
        let rho = mod_inverse(two_m_mod_p, pw).ok_or(ModError::InvalidModulus)?;
        // chi = (rho * 2^m - 1) / p; exact by construction
        let num = (rho << m) - 1;
        debug_assert!(num.is_multiple_of(pw));
        let chi = num / pw;
        debug_assert!(0 < chi && chi < (1u128 << m));
        debug_assert!(rho > 0 && rho < pw);
        let mu = if m == n {
            W::MAX
        } else {
            (W::ONE << m) - W::ONE
        };
        let r2 = (two_m_mod_p * two_m_mod_p) % pw;
        Ok(MontgomeryContext {
            p,
            m,
            mu,
            chi: W::from_u128(chi),
            rho: W::from_u128(rho),
            r2: W::from_u128(r2),
        })
    }

    #[inline]
    pub fn modulus(&self) -> W {
        self.p
    }
    #[inline]
    pub fn shift(&self) -> u32 {
        self.m
    }
    #[inline]
    pub fn mask(&self) -> W {
        self.mu
    }
    #[inline]
    pub fn chi(&self) -> W {
        self.chi
    }
    #[inline]
    pub fn rho(&self) -> W {
        self.rho
    }
    /// Encoder constant (2^m)^2 mod p.
    #[inline]
    pub fn r2(&self) -> W {
        self.r2
    }
}

#[inline]
fn reduce_with_b<W: Word>(a: W::Wide, b: W, ctx: &MontgomeryContext<W>) -> W {
    let bp = b.to_wide().wrapping_mul(ctx.p.to_wide());
    if ctx.m < W::BITS {
        // no overflow possible in a + b*p
        let c = a + bp;
        let d = W::from_wide(c >> ctx.m);
        if d >= ctx.p {
            d - ctx.p
        } else {
            d
        }
    } else {
        let (c, overflowed) = a.overflowing_add(bp);
        let d = W::from_wide(c >> ctx.m);
        if overflowed {
            return d.wrapping_sub(ctx.p);
        }
        if d >= ctx.p {
            d - ctx.p
        } else {
            d
        }
    }
}

/// (a * rho) mod p for 0 <= a < 2^m * p.
#[inline]
pub fn mont_reduce<W: Word>(a: W::Wide, ctx: &MontgomeryContext<W>) -> W {
    debug_assert!(
        a < ctx.p.to_wide() << ctx.m,
        "reduction input exceeds 2^m * p"
    );
    let b = W::from_wide(a).wrapping_mul(ctx.chi) & ctx.mu;
    reduce_with_b(a, b, ctx)
}

/// Product of two Montgomery-encoded residues, still encoded.
#[inline]
pub fn mont_mul<W: Word>(xt: W, yt: W, ctx: &MontgomeryContext<W>) -> W {
    debug_assert!(xt < ctx.p && yt < ctx.p);
    mont_reduce(xt.to_wide().wrapping_mul(yt.to_wide()), ctx)
}

/// Encode: x -> (x * 2^m) mod p.
#[inline]
pub fn to_mont<W: Word>(x: W, ctx: &MontgomeryContext<W>) -> W {
    debug_assert!(x < ctx.p);
    mont_reduce(x.to_wide().wrapping_mul(ctx.r2.to_wide()), ctx)
}

/// Decode: (x * 2^m) mod p -> x.
#[inline]
pub fn from_mont<W: Word>(xt: W, ctx: &MontgomeryContext<W>) -> W {
    debug_assert!(xt < ctx.p);
    mont_reduce(xt.to_wide(), ctx)
}

/// Cached cofactor phi = (chi * y~) mod 2^m for repeated products by the
/// same encoded multiplicand; saves the low product in the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MontFixedMultiplicand<W: Word> {
    yt: W,
    phi: W,
}

impl<W: Word> MontFixedMultiplicand<W> {
    pub fn new(yt: W, ctx: &MontgomeryContext<W>) -> Self {
        debug_assert!(yt < ctx.p);
        MontFixedMultiplicand {
            yt,
            phi: ctx.chi.wrapping_mul(yt) & ctx.mu,
        }
    }

    #[inline]
    pub fn multiplicand(&self) -> W {
        self.yt
    }
    #[inline]
    pub fn phi(&self) -> W {
        self.phi
    }
}

/// Fixed-multiplicand Montgomery product on encoded residues.
#[inline]
pub fn mont_mul_fixed<W: Word>(
    xt: W,
    fm: &MontFixedMultiplicand<W>,
    ctx: &MontgomeryContext<W>,
) -> W {
    debug_assert!(xt < ctx.p);
    let a = xt.to_wide().wrapping_mul(fm.yt.to_wide());
    let b = xt.wrapping_mul(fm.phi) & ctx.mu;
    reduce_with_b(a, b, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cofactors_p7_m8() {
        let ctx = MontgomeryContext::<u8>::new(7, 8).unwrap();
        assert_eq!(ctx.rho(), 2);
        assert_eq!(ctx.chi(), 73);
        // identity in double-width arithmetic
        assert_eq!(2u32 * 256 - 73 * 7, 1);
        assert_eq!(ctx.r2() as u32, (256u32 * 256) % 7);
    }

    #[test]
    fn cofactors_p3_m2() {
        let ctx = MontgomeryContext::<u8>::new(3, 2).unwrap();
        assert_eq!(ctx.rho(), 1);
        assert_eq!(ctx.chi(), 1);
    }

    #[test]
    fn rejects_even_and_tiny() {
        assert_eq!(
            MontgomeryContext::<u8>::new(16, 8).unwrap_err(),
            ModError::InvalidModulus
        );
        assert_eq!(
            MontgomeryContext::<u8>::new(1, 8).unwrap_err(),
            ModError::InvalidModulus
        );
        // m below the bit-size of p
        assert_eq!(
            MontgomeryContext::<u8>::new(7, 2).unwrap_err(),
            ModError::RangeError
        );
    }

    #[test]
    fn reduce_trace_p7() {
        let ctx = MontgomeryContext::<u8>::new(7, 8).unwrap();
        // a=20: b = (20*73) & 255 = 180, c = 20 + 180*7 = 1280, d = 5
        assert_eq!(mont_reduce(20u16, &ctx), 5);
        assert_eq!((20 * 73) & 255, 180);
        assert_eq!(20 + 180 * 7, 1280);
        assert_eq!(mont_reduce(0u16, &ctx), 0);
        assert_eq!(mont_reduce(10u16, &ctx), 6);
    }

    #[test]
    fn mul_and_roundtrip_p7() {
        let ctx = MontgomeryContext::<u8>::new(7, 8).unwrap();
        let xt = to_mont(3, &ctx);
        let yt = to_mont(4, &ctx);
        assert_eq!(xt, 5);
        assert_eq!(yt, 2);
        assert_eq!(mont_mul(xt, yt, &ctx), 6);
        assert_eq!((12u32 * 256) % 7, 6);
        assert_eq!(from_mont(mont_mul(xt, yt, &ctx), &ctx), 5);
        assert_eq!(to_mont(0, &ctx), 0);
        assert_eq!(from_mont(to_mont(6, &ctx), &ctx), 6);
        for x in 0..7u8 {
            assert_eq!(from_mont(to_mont(x, &ctx), &ctx), x);
        }
    }

    #[test]
    fn full_shift_u8_exhaustive() {
        // m = n exercises the overflow test in the reduction
        for p in (3u8..=255).step_by(2) {
            let ctx = MontgomeryContext::<u8>::new(p, 8).unwrap();
            let pw = p as u32;
            for x in 0..p {
                for y in 0..p {
                    let xt = to_mont(x, &ctx);
                    let yt = to_mont(y, &ctx);
                    let zt = mont_mul(xt, yt, &ctx);
                    assert_eq!(
                        from_mont(zt, &ctx) as u32,
                        (x as u32 * y as u32) % pw,
                        "p={p} x={x} y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn fixed_multiplicand_matches_plain() {
        let ctx = MontgomeryContext::<u8>::new(7, 8).unwrap();
        for yt in 0..7u8 {
            let fm = MontFixedMultiplicand::new(yt, &ctx);
            for xt in 0..7u8 {
                assert_eq!(mont_mul_fixed(xt, &fm, &ctx), mont_mul(xt, yt, &ctx));
            }
        }
        let ctx = MontgomeryContext::<u64>::new(0xffff_ffff_ffff_ffc5, 64).unwrap();
        let (xt, yt) = (0x1234_5678_9abc_def0u64, 0x0fed_cba9_8765_4321u64);
        let fm = MontFixedMultiplicand::new(yt, &ctx);
        assert_eq!(mont_mul_fixed(xt, &fm, &ctx), mont_mul(xt, yt, &ctx));
    }

    #[test]
    fn congruence_u64_full_width() {
        let p = 0xffff_ffff_ffff_ffc5u64; // odd, 64-bit
        let ctx = MontgomeryContext::<u64>::new(p, 64).unwrap();
        let bound = (p as u128) << 64;
        let mut x = 0x9e3779b97f4a7c15u128;
        for _ in 0..1000 {
            x = x.wrapping_mul(0xbf58476d1ce4e5b9).wrapping_add(1);
            let a = x % bound;
            let got = mont_reduce(a, &ctx);
            let want = ((a % p as u128) * (ctx.rho() as u128)) % p as u128;
            assert_eq!(got as u128, want);
            assert!(got < p);
        }
    }
}
