//! Barrett reduction: division-free modular arithmetic through a precomputed
//! scaled reciprocal q = floor(2^(s+t)/p), plus the additive kernels.
//!
//! The correction budget h and the shift pair (s, t) are selected per
//! profile:
//!
//! | bound      | alpha     | s            | t     | h |
//! |------------|-----------|--------------|-------|---|
//! | m <= n - 2 | 2^(n-2)   | max(r-2, 0)  | n + 1 | 1 |
//! | m <= n - 1 | 2^(n-1)   | r - 1        | n     | 2 |
//! | m <= n     | 2^n       | r - 1        | n     | 3 |
//!
//! For r = 1 (p = 2) the first column would need t = n + 1 and therefore
//! q = 2^n, which no longer fits the word; t drops to n there, which keeps
//! h = 1 and q = 2^(n-1).

use crate::error::ModError;
use crate::word::{ceil_log2, Uint, Word};

/// Modulus-width profile: how many of the word's n bits the modulus may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// m <= n: any representable modulus.
    Full,
    /// m <= n - 1: one spare bit, branch-free additive kernels.
    Minus1,
    /// m <= n - 2: two spare bits, single-correction products.
    Minus2,
}

impl Profile {
    /// Largest allowed modulus bit-size for a word of `n` bits.
    #[inline]
    pub fn max_modulus_bits(self, n: u32) -> u32 {
        match self {
            Profile::Full => n,
            Profile::Minus1 => n - 1,
            Profile::Minus2 => n - 2,
        }
    }

    pub const ALL: [Profile; 3] = [Profile::Full, Profile::Minus1, Profile::Minus2];
}

/// A modulus with its Barrett pre-inverse and profile parameters.
///
/// Immutable after construction; freely shareable across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BarrettContext<W: Word> {
    p: W,
    q: W,
    m: u32,
    r: u32,
    s: u32,
    t: u32,
    alpha_log2: u32,
    h: u32,
    profile: Profile,
}

impl<W: Word> BarrettContext<W> {
    /// Builds the context, computing q = floor(2^(s+t)/p) by one
    /// double-width division.
    pub fn new(p: W, profile: Profile) -> Result<Self, ModError> {
        let n = W::BITS;
        if p < W::from_u64(2) {
            return Err(ModError::InvalidModulus);
        }
        let r = ceil_log2(p);
        let m = profile.max_modulus_bits(n);
        if r > m {
            return Err(ModError::ProfileViolation);
        }
        let (alpha_log2, s, t, h) = match profile {
            Profile::Minus2 => {
                let t = if r == 1 { n } else { n + 1 };
                (n - 2, r.saturating_sub(2), t, 1)
            }
            Profile::Minus1 => (n - 1, r - 1, n, 2),
            Profile::Full => (n, r - 1, n, 3),
        };
        debug_assert!(t >= r && s + t < n + r || r == 1);
        let q_wide = (W::Wide::ONE << (s + t)) / p.to_wide();
        debug_assert!(
            q_wide >> n == W::Wide::ZERO,
            "pre-inverse must fit the word"
        );
        Ok(BarrettContext {
            p,
            q: W::from_wide(q_wide),
            m,
            r,
            s,
            t,
            alpha_log2,
            h,
            profile,
        })
    }

    #[inline]
    pub fn modulus(&self) -> W {
        self.p
    }
    #[inline]
    pub fn pre_inverse(&self) -> W {
        self.q
    }
    /// Declared modulus bit bound (the profile's column).
    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }
    /// Actual bit-size of p.
    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }
    #[inline]
    pub fn s(&self) -> u32 {
        self.s
    }
    #[inline]
    pub fn t(&self) -> u32 {
        self.t
    }
    #[inline]
    pub fn alpha_log2(&self) -> u32 {
        self.alpha_log2
    }
    /// Maximum number of correction subtractions in the reduction loop.
    #[inline]
    pub fn correction_bound(&self) -> u32 {
        self.h
    }
    #[inline]
    pub fn profile(&self) -> Profile {
        self.profile
    }
    /// Largest accepted reduction input, alpha * p, as a double-width value.
    #[inline]
    pub fn input_bound(&self) -> W::Wide {
        self.p.to_wide() << self.alpha_log2
    }

    #[cfg(test)]
    pub(crate) fn corrupt_pre_inverse(&mut self) {
        self.q = self.q.wrapping_add(W::ONE);
    }
}

/// (x + y) rem p. Uses the branch-free min form when a spare bit exists,
/// otherwise the full-range form with the overflow test.
#[inline]
pub fn add_mod<W: Word>(x: W, y: W, ctx: &BarrettContext<W>) -> W {
    debug_assert!(x < ctx.p && y < ctx.p);
    if ctx.m < W::BITS {
        add_mod_min(x, y, ctx)
    } else {
        let a = x.wrapping_add(y);
        if a < x {
            // wrapped past 2^n; subtracting p in wrapping arithmetic lands in [0, p)
            return a.wrapping_sub(ctx.p);
        }
        if a >= ctx.p {
            a - ctx.p
        } else {
            a
        }
    }
}

/// Branch-free addition, min form: min(a, a - p). Requires m <= n - 1.
#[inline]
pub fn add_mod_min<W: Word>(x: W, y: W, ctx: &BarrettContext<W>) -> W {
    debug_assert!(ctx.m < W::BITS && x < ctx.p && y < ctx.p);
    let a = x + y;
    a.min(a.wrapping_sub(ctx.p))
}

/// Branch-free addition, arithmetic-shift form: a + ((a >> (n-1)) & p) on
/// a = x + y - p. Requires m <= n - 1. Must agree with [`add_mod_min`].
#[inline]
pub fn add_mod_shift<W: Word>(x: W, y: W, ctx: &BarrettContext<W>) -> W {
    debug_assert!(ctx.m < W::BITS && x < ctx.p && y < ctx.p);
    let a = x.wrapping_add(y).wrapping_sub(ctx.p);
    a.wrapping_add(a.arithmetic_shr(W::BITS - 1) & ctx.p)
}

/// (x - y) rem p.
#[inline]
pub fn sub_mod<W: Word>(x: W, y: W, ctx: &BarrettContext<W>) -> W {
    debug_assert!(x < ctx.p && y < ctx.p);
    let d = x.wrapping_sub(y);
    if ctx.m < W::BITS {
        d.wrapping_add(d.arithmetic_shr(W::BITS - 1) & ctx.p)
    } else if x >= y {
        d
    } else {
        d.wrapping_add(ctx.p)
    }
}

/// (-x) rem p.
#[inline]
pub fn neg_mod<W: Word>(x: W, ctx: &BarrettContext<W>) -> W {
    debug_assert!(x < ctx.p);
    if x == W::ZERO {
        W::ZERO
    } else {
        ctx.p - x
    }
}

/// a rem p for 0 <= a < alpha*p, with at most h correction subtractions.
#[inline]
pub fn barrett_reduce<W: Word>(a: W::Wide, ctx: &BarrettContext<W>) -> W {
    barrett_reduce_counted(a, ctx).0
}

/// Same as [`barrett_reduce`] but also reports how many correction
/// subtractions ran; the count never exceeds `ctx.correction_bound()`.
#[inline]
pub fn barrett_reduce_counted<W: Word>(a: W::Wide, ctx: &BarrettContext<W>) -> (W, u32) {
    debug_assert!(a < ctx.input_bound(), "reduction input exceeds alpha*p");
    let pw = ctx.p.to_wide();
    let b = a >> ctx.s;
    let c = b.wrapping_mul(ctx.q.to_wide()) >> ctx.t;
    let mut d = a.wrapping_sub(c.wrapping_mul(pw));
    let mut count = 0u32;
    while d >= pw {
        d = d - pw;
        count += 1;
    }
    debug_assert!(count <= ctx.h);
    (W::from_wide(d), count)
}

/// (x * y) rem p through the double-width product and [`barrett_reduce`].
#[inline]
pub fn mul_mod<W: Word>(x: W, y: W, ctx: &BarrettContext<W>) -> W {
    debug_assert!(x < ctx.p && y < ctx.p);
    barrett_reduce(x.to_wide().wrapping_mul(y.to_wide()), ctx)
}

/// Half-width reduction context: for p of bit-size at most floor((n-1)/2),
/// qbar = ceil(2^t/p) with t = n + r - 1 yields a correction-free reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BarrettHalfContext<W: Word> {
    p: W,
    qbar: W,
    r: u32,
    t: u32,
    alpha_log2: u32,
}

impl<W: Word> BarrettHalfContext<W> {
    pub fn new(p: W) -> Result<Self, ModError> {
        let n = W::BITS;
        if p < W::from_u64(2) {
            return Err(ModError::InvalidModulus);
        }
        let r = ceil_log2(p);
        if r > (n - 1) / 2 {
            return Err(ModError::ProfileViolation);
        }
        let t = n + r - 1;
        let pw = p.to_wide();
        let qbar = ((W::Wide::ONE << t) + pw - W::Wide::ONE) / pw;
        debug_assert!(qbar >> n == W::Wide::ZERO);
        Ok(BarrettHalfContext {
            p,
            qbar: W::from_wide(qbar),
            r,
            t,
            alpha_log2: (n - 1) / 2,
        })
    }

    #[inline]
    pub fn modulus(&self) -> W {
        self.p
    }
    #[inline]
    pub fn pre_inverse(&self) -> W {
        self.qbar
    }
    #[inline]
    pub fn t(&self) -> u32 {
        self.t
    }
    #[inline]
    pub fn alpha_log2(&self) -> u32 {
        self.alpha_log2
    }
}

/// a rem p with no correction step; valid whenever a*p <= 2^t.
#[inline]
pub fn barrett_reduce_half<W: Word>(a: W, ctx: &BarrettHalfContext<W>) -> W {
    debug_assert!(
        a.to_wide().wrapping_mul(ctx.p.to_wide()) <= W::Wide::ONE << ctx.t,
        "half reduction input out of range"
    );
    let c = a.to_wide().wrapping_mul(ctx.qbar.to_wide()) >> ctx.t;
    a.wrapping_sub(W::from_wide(c).wrapping_mul(ctx.p))
}

/// Precomputation for repeated products by one multiplicand y: the scaled
/// quotient psi of 2^n*y/p. The general form keeps one conditional
/// correction; the half form (p at most n/2 bits) rounds psi up and needs
/// none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedMultiplicand<W: Word> {
    y: W,
    psi: W,
    half: bool,
}

impl<W: Word> FixedMultiplicand<W> {
    /// General form: psi = floor(2^n*y/p), one conditional correction per use.
    pub fn new(y: W, ctx: &BarrettContext<W>) -> Self {
        debug_assert!(y < ctx.p);
        let psi = (y.to_wide() << W::BITS) / ctx.p.to_wide();
        FixedMultiplicand {
            y,
            psi: W::from_wide(psi),
            half: false,
        }
    }

    /// Correction-free form: psi = ceil(2^n*y/p); requires p of bit-size at
    /// most n/2.
    pub fn new_half(y: W, ctx: &BarrettContext<W>) -> Result<Self, ModError> {
        debug_assert!(y < ctx.p);
        if ctx.r > W::BITS / 2 {
            return Err(ModError::ProfileViolation);
        }
        let pw = ctx.p.to_wide();
        let psi = ((y.to_wide() << W::BITS) + pw - W::Wide::ONE) / pw;
        debug_assert!(psi >> W::BITS == W::Wide::ZERO);
        Ok(FixedMultiplicand {
            y,
            psi: W::from_wide(psi),
            half: true,
        })
    }

    #[inline]
    pub fn multiplicand(&self) -> W {
        self.y
    }
    #[inline]
    pub fn psi(&self) -> W {
        self.psi
    }
    #[inline]
    pub fn is_half(&self) -> bool {
        self.half
    }
}

/// (x * y) rem p for a cached multiplicand.
#[inline]
pub fn mul_mod_fixed<W: Word>(x: W, fm: &FixedMultiplicand<W>, ctx: &BarrettContext<W>) -> W {
    debug_assert!(x < ctx.p);
    let c = x.to_wide().wrapping_mul(fm.psi.to_wide()) >> W::BITS;
    let d = x
        .to_wide()
        .wrapping_mul(fm.y.to_wide())
        .wrapping_sub(c.wrapping_mul(ctx.p.to_wide()));
    if fm.half {
        W::from_wide(d)
    } else {
        let pw = ctx.p.to_wide();
        W::from_wide(if d >= pw { d - pw } else { d })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_minus2_p7() {
        let ctx = BarrettContext::<u8>::new(7, Profile::Minus2).unwrap();
        assert_eq!(ctx.r(), 3);
        assert_eq!(ctx.s(), 1);
        assert_eq!(ctx.t(), 9);
        assert_eq!(ctx.pre_inverse(), 146);
        assert_eq!(ctx.correction_bound(), 1);
        assert_eq!(ctx.alpha_log2(), 6);
        // q against the exact wide-division oracle
        assert_eq!((1u32 << 10) / 7, 146);
    }

    #[test]
    fn context_full_p7() {
        let ctx = BarrettContext::<u8>::new(7, Profile::Full).unwrap();
        assert_eq!(ctx.s(), 2);
        assert_eq!(ctx.t(), 8);
        assert_eq!(ctx.pre_inverse(), 146);
        assert_eq!(ctx.correction_bound(), 3);
        assert_eq!(ctx.alpha_log2(), 8);
    }

    #[test]
    fn context_rejects_bad_moduli() {
        assert_eq!(
            BarrettContext::<u8>::new(1, Profile::Full).unwrap_err(),
            ModError::InvalidModulus
        );
        assert_eq!(
            BarrettContext::<u8>::new(0, Profile::Full).unwrap_err(),
            ModError::InvalidModulus
        );
        assert_eq!(
            BarrettContext::<u8>::new(255, Profile::Minus2).unwrap_err(),
            ModError::ProfileViolation
        );
        assert_eq!(
            BarrettContext::<u8>::new(200, Profile::Minus1).unwrap_err(),
            ModError::ProfileViolation
        );
    }

    #[test]
    fn extreme_u64_boundaries() {
        // widest modulus, widest input
        let ctx = BarrettContext::<u64>::new(u64::MAX, Profile::Full).unwrap();
        let a = ctx.input_bound() - 1;
        let (v, c) = barrett_reduce_counted(a, &ctx);
        assert_eq!(v as u128, a % u64::MAX as u128);
        assert!(c <= 3);
        assert_eq!(mul_mod(u64::MAX - 1, u64::MAX - 1, &ctx), 1);
        // power-of-two moduli at every profile edge
        for shift in [1u32, 31, 62] {
            let p = 1u64 << shift;
            let ctx = BarrettContext::<u64>::new(p, Profile::Minus2).unwrap();
            assert_eq!(mul_mod(p - 1, p - 1, &ctx) as u128, ((p - 1) as u128).pow(2) % p as u128);
        }
        // half context at its widest admissible modulus
        let p = (1u64 << 31) - 1;
        let h = BarrettHalfContext::<u64>::new(p).unwrap();
        let a = ((1u128 << h.t()) / p as u128) as u64;
        assert_eq!(barrett_reduce_half(a, &h), (a % p) as u64);
    }

    #[test]
    fn context_p2_fits() {
        // r = 1 forces t = n under Minus2 so the pre-inverse still fits
        let ctx = BarrettContext::<u8>::new(2, Profile::Minus2).unwrap();
        assert_eq!(ctx.t(), 8);
        assert_eq!(ctx.pre_inverse(), 128);
        for a in 0u16..(2 << ctx.alpha_log2()) {
            assert_eq!(barrett_reduce(a, &ctx) as u16, a % 2);
        }
    }

    #[test]
    fn add_examples() {
        let p7 = BarrettContext::<u8>::new(7, Profile::Minus2).unwrap();
        assert_eq!(add_mod(0, 0, &p7), 0);
        assert_eq!(add_mod(5, 6, &p7), 4);
        // full-range modulus exercises the overflow branch: 200 + 100 wraps u8
        let p251 = BarrettContext::<u8>::new(251, Profile::Full).unwrap();
        assert_eq!(add_mod(200, 100, &p251), 49);
    }

    #[test]
    fn sub_neg_examples() {
        let p7 = BarrettContext::<u8>::new(7, Profile::Minus2).unwrap();
        assert_eq!(sub_mod(3, 5, &p7), 5);
        assert_eq!(sub_mod(5, 3, &p7), 2);
        assert_eq!(neg_mod(0, &p7), 0);
        assert_eq!(neg_mod(3, &p7), 4);
        let p251 = BarrettContext::<u8>::new(251, Profile::Full).unwrap();
        assert_eq!(sub_mod(0, 250, &p251), 1);
    }

    #[test]
    fn branch_free_forms_agree_exhaustively_u8() {
        for p in 2u8..=128 {
            let ctx = match BarrettContext::<u8>::new(p, Profile::Minus1) {
                Ok(c) => c,
                Err(_) => continue,
            };
            for x in 0..p {
                for y in 0..p {
                    let m = add_mod_min(x, y, &ctx);
                    let s = add_mod_shift(x, y, &ctx);
                    assert_eq!(m, s, "p={p} x={x} y={y}");
                    assert_eq!(m as u16, (x as u16 + y as u16) % p as u16);
                }
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let ctx = BarrettContext::<u8>::new(7, Profile::Minus2).unwrap();
        let (v, c) = barrett_reduce_counted(200u16, &ctx);
        assert_eq!((v, c), (4, 0));
        assert_eq!(barrett_reduce(0u16, &ctx), 0);
        // boundary a = alpha*p - 1
        assert_eq!(barrett_reduce(447u16, &ctx), 6);
        assert_eq!(447 % 7, 6);
    }

    #[test]
    fn reduce_half_examples() {
        let ctx = BarrettHalfContext::<u8>::new(7).unwrap();
        assert_eq!(ctx.pre_inverse(), 147);
        assert_eq!(ctx.t(), 10);
        assert_eq!(barrett_reduce_half(89, &ctx), 5);
        assert_eq!(barrett_reduce_half(0, &ctx), 0);
        assert_eq!(barrett_reduce_half(6, &ctx), 6);
    }

    #[test]
    fn reduce_half_exhaustive_u8() {
        // every p up to the half-width bound, every a with a*p <= 2^t
        for p in 2u8..=11 {
            let ctx = match BarrettHalfContext::<u8>::new(p) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let limit = ((1u32 << ctx.t()) / p as u32) as u16;
            for a in 0..=limit.min(255) {
                let a = a as u8;
                assert_eq!(barrett_reduce_half(a, &ctx) as u16, a as u16 % p as u16);
            }
        }
    }

    #[test]
    fn mul_examples() {
        let ctx = BarrettContext::<u8>::new(7, Profile::Minus2).unwrap();
        assert_eq!(mul_mod(3, 4, &ctx), 5);
        assert_eq!(mul_mod(0, 5, &ctx), 0);
        assert_eq!(mul_mod(6, 6, &ctx), 1);
    }

    #[test]
    fn fixed_multiplicand_examples() {
        let ctx = BarrettContext::<u8>::new(7, Profile::Minus2).unwrap();
        let fm = FixedMultiplicand::new(3, &ctx);
        assert_eq!(fm.psi(), 109);
        assert_eq!(mul_mod_fixed(5, &fm, &ctx), 1);
        assert_eq!(mul_mod_fixed(0, &fm, &ctx), 0);
        let fm6 = FixedMultiplicand::new(6, &ctx);
        assert_eq!(mul_mod_fixed(6, &fm6, &ctx), 1);
    }

    #[test]
    fn fixed_half_needs_ceiling_on_composite_moduli() {
        // floor(psi) would return 6 here; the ceiling form reduces fully
        let ctx = BarrettContext::<u8>::new(6, Profile::Minus2).unwrap();
        let fm = FixedMultiplicand::new_half(4, &ctx).unwrap();
        assert_eq!(mul_mod_fixed(3, &fm, &ctx), 0);
    }

    #[test]
    fn fixed_consistency_exhaustive_u8() {
        for p in 2u8..=255 {
            for profile in Profile::ALL {
                let ctx = match BarrettContext::<u8>::new(p, profile) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                for y in 0..p {
                    let fm = FixedMultiplicand::new(y, &ctx);
                    let fmh = FixedMultiplicand::new_half(y, &ctx).ok();
                    for x in 0..p {
                        let want = ((x as u16 * y as u16) % p as u16) as u8;
                        assert_eq!(mul_mod_fixed(x, &fm, &ctx), want, "p={p} x={x} y={y}");
                        if let Some(fmh) = &fmh {
                            assert_eq!(mul_mod_fixed(x, fmh, &ctx), want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn correction_count_respects_bound_u8() {
        for p in 2u8..=255 {
            for profile in Profile::ALL {
                let ctx = match BarrettContext::<u8>::new(p, profile) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let bound = ctx.input_bound();
                let mut a = 0u16;
                while a < bound {
                    let (v, c) = barrett_reduce_counted(a, &ctx);
                    assert_eq!(v as u16, a % p as u16);
                    assert!(c <= ctx.correction_bound());
                    a = a.wrapping_add(1);
                    if a == 0 {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn corrupted_pre_inverse_is_caught() {
        // a mutated context must trip the differential sweep somewhere in
        // the input range (as a wrong value or a blown correction bound)
        let mut ctx = BarrettContext::<u8>::new(7, Profile::Minus2).unwrap();
        ctx.corrupt_pre_inverse();
        let hook = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let mut bad = 0u32;
        for a in 0..448u16 {
            let got = std::panic::catch_unwind(|| barrett_reduce_counted(a, &ctx));
            match got {
                Ok((v, c)) if v as u16 == a % 7 && c <= ctx.correction_bound() => {}
                _ => bad += 1,
            }
        }
        std::panic::set_hook(hook);
        assert!(bad > 0, "off-by-one pre-inverse went undetected");
    }
}
