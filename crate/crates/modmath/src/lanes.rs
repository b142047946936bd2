//! Branch-free lane-parallel kernels.
//!
//! Every kernel is straight-line per lane batch: comparisons become masks,
//! corrections become a fixed number of min/select rounds, and the per-width
//! strategies follow the scalar module's contracts lane-wise. The portable
//! array forms here are the reference semantics; they are written so the
//! auto-vectorizer can map them onto whatever registers the target offers.
//!
//! Width strategy for the additive kernels:
//! - m <= n-1, lanes of 8/16/32 bits: a = x + y, then min(a, a - p).
//! - m <= n-1, 64-bit lanes: a = x + y - p and a sign mask adds p back.
//! - m = n, lanes of 8/16/32 bits: max/compare-equal form on p - y.
//! - m = n, 64-bit lanes: overflow-or-compare form with the biased
//!   (sign-flipped) 64-bit comparison standing in for an unsigned compare.
//!
//! Products run through double-width lanes (8-bit via 16, 16 via 32, 32 via
//! 64, 64 via 128) with the correction loop unrolled into `h` unconditional
//! min rounds.

use crate::error::ModError;
use crate::scalar::{BarrettContext, FixedMultiplicand, FloatContext, MontgomeryContext, Profile};
use crate::word::{Uint, Word};
use core::array;

/// Lane counts filling a 256-bit register per scalar width.
pub const LANES_U8: usize = 32;
pub const LANES_U16: usize = 16;
pub const LANES_U32: usize = 8;
pub const LANES_U64: usize = 4;
pub const LANES_F64: usize = 4;

/// Unsigned greater-than on 64-bit values through the signed comparison of
/// sign-flipped operands (the emulation used where packed unsigned compares
/// do not exist). Agrees with the native unsigned compare on all inputs.
#[inline]
pub fn biased_gt_u64(a: u64, b: u64) -> bool {
    const BIAS: u64 = 1 << 63;
    ((a ^ BIAS) as i64) > ((b ^ BIAS) as i64)
}

// Only reached on 64-bit lanes, where the conversion is lossless.
#[inline]
fn biased_gt<W: Word>(a: W, b: W) -> bool {
    debug_assert!(W::BITS == 64);
    biased_gt_u64(a.to_u64(), b.to_u64())
}

/// Lane-wise (x + y) rem p.
pub fn vadd_mod<W: Word, const N: usize>(
    xs: &[W; N],
    ys: &[W; N],
    ctx: &BarrettContext<W>,
) -> [W; N] {
    let p = ctx.modulus();
    if ctx.m() < W::BITS {
        if W::BITS == 64 {
            // sign-compare form
            array::from_fn(|i| {
                let a = xs[i].wrapping_add(ys[i]).wrapping_sub(p);
                let mask = a.arithmetic_shr(W::BITS - 1);
                a.wrapping_add(mask & p)
            })
        } else {
            array::from_fn(|i| {
                let a = xs[i] + ys[i];
                a.min(a.wrapping_sub(p))
            })
        }
    } else if W::BITS == 64 {
        // overflow-or-range form with biased compares
        array::from_fn(|i| {
            let a = xs[i].wrapping_add(ys[i]);
            let over = W::mask(biased_gt(xs[i], a));
            let high = W::mask(biased_gt(a, p - W::ONE));
            a.wrapping_sub((over | high) & p)
        })
    } else {
        // max/compare-equal form
        array::from_fn(|i| {
            let a = p.wrapping_sub(ys[i]);
            let b = W::mask(xs[i].max(a) == xs[i]);
            let c = !b & p;
            xs[i].wrapping_sub(a).wrapping_add(c)
        })
    }
}

/// Lane-wise (x - y) rem p.
pub fn vsub_mod<W: Word, const N: usize>(
    xs: &[W; N],
    ys: &[W; N],
    ctx: &BarrettContext<W>,
) -> [W; N] {
    let p = ctx.modulus();
    if ctx.m() < W::BITS {
        array::from_fn(|i| {
            let d = xs[i].wrapping_sub(ys[i]);
            d.wrapping_add(d.arithmetic_shr(W::BITS - 1) & p)
        })
    } else {
        array::from_fn(|i| {
            let d = xs[i].wrapping_sub(ys[i]);
            let borrow = W::mask(xs[i] < ys[i]);
            d.wrapping_add(borrow & p)
        })
    }
}

/// Lane-wise (-x) rem p.
pub fn vneg_mod<W: Word, const N: usize>(xs: &[W; N], ctx: &BarrettContext<W>) -> [W; N] {
    let p = ctx.modulus();
    array::from_fn(|i| {
        let nonzero = W::mask(xs[i] != W::ZERO);
        p.wrapping_sub(xs[i]) & nonzero
    })
}

/// Lane-wise Barrett product: double-width lanes, then h min rounds.
pub fn vmul_mod_barrett<W: Word, const N: usize>(
    xs: &[W; N],
    ys: &[W; N],
    ctx: &BarrettContext<W>,
) -> [W; N] {
    let pw = ctx.modulus().to_wide();
    let qw = ctx.pre_inverse().to_wide();
    let (s, t, h) = (ctx.s(), ctx.t(), ctx.correction_bound());
    array::from_fn(|i| {
        let a = xs[i].to_wide().wrapping_mul(ys[i].to_wide());
        let b = a >> s;
        let c = b.wrapping_mul(qw) >> t;
        let mut d = a.wrapping_sub(c.wrapping_mul(pw));
        for _ in 0..h {
            d = d.min(d.wrapping_sub(pw));
        }
        W::from_wide(d)
    })
}

/// Lane-wise fixed-multiplicand product.
pub fn vmul_mod_fixed<W: Word, const N: usize>(
    xs: &[W; N],
    fm: &FixedMultiplicand<W>,
    ctx: &BarrettContext<W>,
) -> [W; N] {
    let pw = ctx.modulus().to_wide();
    let psi = fm.psi().to_wide();
    let yw = fm.multiplicand().to_wide();
    let half = fm.is_half();
    array::from_fn(|i| {
        let xw = xs[i].to_wide();
        let c = xw.wrapping_mul(psi) >> W::BITS;
        let mut d = xw.wrapping_mul(yw).wrapping_sub(c.wrapping_mul(pw));
        if !half {
            d = d.min(d.wrapping_sub(pw));
        }
        W::from_wide(d)
    })
}

/// Lane-wise Montgomery product on encoded residues. Splits the shifted sum
/// so no overflow test is needed for any shift, including m = n.
pub fn vmont_mul<W: Word, const N: usize>(
    xts: &[W; N],
    yts: &[W; N],
    ctx: &MontgomeryContext<W>,
) -> [W; N] {
    let pw = ctx.modulus().to_wide();
    let chi = ctx.chi();
    let mu = ctx.mask();
    let mu_wide = mu.to_wide();
    let m = ctx.shift();
    array::from_fn(|i| {
        let a = xts[i].to_wide().wrapping_mul(yts[i].to_wide());
        let b = W::from_wide(a).wrapping_mul(chi) & mu;
        // (a + b*p) >> m == (a >> m) + ((a mod 2^m) + b*p) >> m, exactly
        let hi = a >> m;
        let lo = a & mu_wide;
        let mid = (lo + b.to_wide().wrapping_mul(pw)) >> m;
        let mut d = hi + mid;
        d = d.min(d.wrapping_sub(pw));
        W::from_wide(d)
    })
}

/// Select by sign: where `sel` has its sign bit set take `neg`, else `pos`
/// (the packed-double blend semantics).
#[inline]
fn blend_by_sign(sel: f64, neg: f64, pos: f64) -> f64 {
    if sel.is_sign_negative() {
        neg
    } else {
        pos
    }
}

/// Lane-wise (x + y) rem p on binary64 lanes; requires m <= ELL - 1.
pub fn vadd_mod_f64<const N: usize>(
    xs: &[f64; N],
    ys: &[f64; N],
    ctx: &FloatContext<f64>,
) -> [f64; N] {
    let p = ctx.modulus();
    array::from_fn(|i| {
        let a = xs[i] + ys[i];
        let b = a - p;
        blend_by_sign(b, a, b)
    })
}

/// Lane-wise (x - y) rem p on binary64 lanes.
pub fn vsub_mod_f64<const N: usize>(
    xs: &[f64; N],
    ys: &[f64; N],
    ctx: &FloatContext<f64>,
) -> [f64; N] {
    let p = ctx.modulus();
    array::from_fn(|i| {
        let d = xs[i] - ys[i];
        let t = d + p;
        blend_by_sign(d, t, d)
    })
}

/// Lane-wise FMA product with the blend-based double correction.
pub fn vmul_mod_fma<const N: usize>(
    xs: &[f64; N],
    ys: &[f64; N],
    ctx: &FloatContext<f64>,
) -> [f64; N] {
    let p = ctx.modulus();
    let u = ctx.u();
    array::from_fn(|i| {
        let (h, l) = crate::scalar::two_product(xs[i], ys[i]);
        let b = h * u;
        let c = b.floor();
        let d = crate::scalar::float::fnma_exact(c, p, h);
        let e = d + l;
        let t = e - p;
        let e = blend_by_sign(t, e, t);
        let t = e + p;
        blend_by_sign(e, t, e)
    })
}

/// Several moduli in one vector (all sharing bit-size r, hence the same
/// shifts s and t). Off the default paths; built explicitly when wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiModulusContext<W: Word, const N: usize> {
    ps: [W; N],
    qs: [W; N],
    m: u32,
    s: u32,
    t: u32,
    h: u32,
    profile: Profile,
}

impl<W: Word, const N: usize> MultiModulusContext<W, N> {
    pub fn new(ps: [W; N], profile: Profile) -> Result<Self, ModError> {
        let first = BarrettContext::new(ps[0], profile)?;
        let r = first.r();
        let mut qs = [W::ZERO; N];
        for (i, &p) in ps.iter().enumerate() {
            let ctx = BarrettContext::new(p, profile)?;
            if ctx.r() != r {
                // the lanes must share (r, s, t)
                return Err(ModError::ProfileViolation);
            }
            qs[i] = ctx.pre_inverse();
        }
        Ok(MultiModulusContext {
            ps,
            qs,
            m: first.m(),
            s: first.s(),
            t: first.t(),
            h: first.correction_bound(),
            profile,
        })
    }

    #[inline]
    pub fn moduli(&self) -> &[W; N] {
        &self.ps
    }
    #[inline]
    pub fn profile(&self) -> Profile {
        self.profile
    }
}

/// Lane-wise addition where lane i reduces modulo ps[i].
pub fn vadd_mod_multi<W: Word, const N: usize>(
    xs: &[W; N],
    ys: &[W; N],
    ctx: &MultiModulusContext<W, N>,
) -> [W; N] {
    if ctx.m < W::BITS {
        array::from_fn(|i| {
            let a = xs[i] + ys[i];
            a.min(a.wrapping_sub(ctx.ps[i]))
        })
    } else {
        array::from_fn(|i| {
            let a = xs[i].wrapping_add(ys[i]);
            let over = W::mask(xs[i] > a);
            let high = W::mask(a > ctx.ps[i] - W::ONE);
            a.wrapping_sub((over | high) & ctx.ps[i])
        })
    }
}

/// Lane-wise Barrett product where lane i reduces modulo ps[i].
pub fn vmul_mod_barrett_multi<W: Word, const N: usize>(
    xs: &[W; N],
    ys: &[W; N],
    ctx: &MultiModulusContext<W, N>,
) -> [W; N] {
    array::from_fn(|i| {
        let pw = ctx.ps[i].to_wide();
        let a = xs[i].to_wide().wrapping_mul(ys[i].to_wide());
        let b = a >> ctx.s;
        let c = b.wrapping_mul(ctx.qs[i].to_wide()) >> ctx.t;
        let mut d = a.wrapping_sub(c.wrapping_mul(pw));
        for _ in 0..ctx.h {
            d = d.min(d.wrapping_sub(pw));
        }
        W::from_wide(d)
    })
}

macro_rules! slice_driver {
    ($name:ident, $kernel:ident, $ctx:ty, $elem:ty) => {
        /// Applies the lane kernel across equal-length slices, writing into
        /// `dst`. Lengths need not be multiples of the lane count.
        pub fn $name<W: Word>(dst: &mut [$elem], xs: &[$elem], ys: &[$elem], ctx: &$ctx) {
            assert_eq!(xs.len(), ys.len());
            assert_eq!(xs.len(), dst.len());
            let mut i = 0;
            // fixed-width batches; the tail reuses the same kernel on a
            // stack batch padded with zeros
            const N: usize = 8;
            while i + N <= xs.len() {
                let xa: &[$elem; N] = xs[i..i + N].try_into().unwrap();
                let ya: &[$elem; N] = ys[i..i + N].try_into().unwrap();
                dst[i..i + N].copy_from_slice(&$kernel(xa, ya, ctx));
                i += N;
            }
            if i < xs.len() {
                let mut xa = [<$elem>::default(); N];
                let mut ya = [<$elem>::default(); N];
                let rem = xs.len() - i;
                xa[..rem].copy_from_slice(&xs[i..]);
                ya[..rem].copy_from_slice(&ys[i..]);
                let out = $kernel(&xa, &ya, ctx);
                dst[i..].copy_from_slice(&out[..rem]);
            }
        }
    };
}

slice_driver!(vadd_mod_slice, vadd_mod, BarrettContext<W>, W);
slice_driver!(vsub_mod_slice, vsub_mod, BarrettContext<W>, W);
slice_driver!(
    vmul_mod_barrett_slice,
    vmul_mod_barrett,
    BarrettContext<W>,
    W
);
slice_driver!(vmont_mul_slice, vmont_mul, MontgomeryContext<W>, W);

/// Fixed-multiplicand slice driver.
pub fn vmul_mod_fixed_slice<W: Word>(
    dst: &mut [W],
    xs: &[W],
    fm: &FixedMultiplicand<W>,
    ctx: &BarrettContext<W>,
) {
    assert_eq!(xs.len(), dst.len());
    const N: usize = 8;
    let mut i = 0;
    while i + N <= xs.len() {
        let xa: &[W; N] = xs[i..i + N].try_into().unwrap();
        dst[i..i + N].copy_from_slice(&vmul_mod_fixed(xa, fm, ctx));
        i += N;
    }
    if i < xs.len() {
        let mut xa = [W::ZERO; N];
        let rem = xs.len() - i;
        xa[..rem].copy_from_slice(&xs[i..]);
        let out = vmul_mod_fixed(&xa, fm, ctx);
        dst[i..].copy_from_slice(&out[..rem]);
    }
}

/// FMA product slice driver over binary64 lanes.
pub fn vmul_mod_fma_slice(dst: &mut [f64], xs: &[f64], ys: &[f64], ctx: &FloatContext<f64>) {
    assert_eq!(xs.len(), ys.len());
    assert_eq!(xs.len(), dst.len());
    const N: usize = LANES_F64;
    let mut i = 0;
    while i + N <= xs.len() {
        let xa: &[f64; N] = xs[i..i + N].try_into().unwrap();
        let ya: &[f64; N] = ys[i..i + N].try_into().unwrap();
        dst[i..i + N].copy_from_slice(&vmul_mod_fma(xa, ya, ctx));
        i += N;
    }
    if i < xs.len() {
        let mut xa = [0.0; N];
        let mut ya = [0.0; N];
        let rem = xs.len() - i;
        xa[..rem].copy_from_slice(&xs[i..]);
        ya[..rem].copy_from_slice(&ys[i..]);
        let out = vmul_mod_fma(&xa, &ya, ctx);
        dst[i..].copy_from_slice(&out[..rem]);
    }
}

/// Heap buffer aligned to the widest supported register (32 bytes), for
/// streaming lane batches without unaligned penalties.
pub struct AlignedBuf<T> {
    ptr: core::ptr::NonNull<T>,
    len: usize,
}

impl<T: Copy + Default> AlignedBuf<T> {
    pub fn new(len: usize) -> Self {
        assert!(len > 0);
        let layout = core::alloc::Layout::from_size_align(
            len * core::mem::size_of::<T>(),
            32.max(core::mem::align_of::<T>()),
        )
        .expect("layout");
        // zero-initialized via default fill below
        let raw = unsafe { std::alloc::alloc(layout) } as *mut T;
        let ptr = core::ptr::NonNull::new(raw).expect("allocation failed");
        let mut buf = AlignedBuf { ptr, len };
        buf.as_mut_slice().fill(T::default());
        buf
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        unsafe { core::slice::from_raw_parts(self.ptr.as_ptr(), self.len) }
    }
    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        unsafe { core::slice::from_raw_parts_mut(self.ptr.as_ptr(), self.len) }
    }
}

impl<T> Drop for AlignedBuf<T> {
    fn drop(&mut self) {
        let layout = core::alloc::Layout::from_size_align(
            self.len * core::mem::size_of::<T>(),
            32.max(core::mem::align_of::<T>()),
        )
        .expect("layout");
        unsafe { std::alloc::dealloc(self.ptr.as_ptr() as *mut u8, layout) };
    }
}
