//! Truncated Fourier transforms over Z/pZ for p prime with p = 1 mod 2^k.
//!
//! `tft` evaluates a length-l coefficient vector at the first l
//! bit-mirrored powers of a primitive 2^k-th root of unity; `itft` inverts
//! it exactly. `blocked_tft` is the two-level decomposition that reduces one
//! transform of size l into column transforms over vectors of n1 scalars, a
//! twiddle scaling, and row transforms of size n1 — the layout that lets the
//! lane kernels do the work in large sizes, with the data reshuffles done by
//! cache-blocked transposition.
//!
//! Butterfly products go through cached fixed-multiplicand pre-scalings; the
//! reduction strategy (integer Barrett or binary64 FMA) is chosen per plan.

use crate::error::ModError;
use crate::lanes;
use crate::scalar::{self, BarrettContext, FixedMultiplicand, FloatContext, Profile};
use crate::word::bit_size;

/// Reduction strategy used inside butterflies and pointwise products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NttStrategy {
    /// Integer Barrett with fixed-multiplicand twiddles.
    Barrett,
    /// binary64 FMA kernels; requires p of bit-size at most 50.
    FloatFma,
}

/// Tag for the two orderings a value vector can be in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalOrdering {
    Coefficient,
    BitrevEvaluation,
}

/// A vector of residues together with its ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalVector {
    pub values: Vec<u64>,
    pub ordering: EvalOrdering,
}

impl EvalVector {
    pub fn coefficients(values: Vec<u64>) -> Self {
        EvalVector {
            values,
            ordering: EvalOrdering::Coefficient,
        }
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Bitwise mirror of i in length k: reverses the k-bit binary expansion.
#[inline]
pub fn bit_mirror(i: usize, k: u32) -> Result<usize, ModError> {
    if k > usize::BITS || (k < usize::BITS && i >= 1usize << k) {
        return Err(ModError::RangeError);
    }
    if k == 0 {
        return Ok(0);
    }
    Ok(i.reverse_bits() >> (usize::BITS - k))
}

#[inline]
pub(crate) fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut b = (base % p) as u128;
    let mut acc = 1u128;
    let pw = p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % pw;
        }
        b = b * b % pw;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin for u64.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors by trial division.
pub(crate) fn distinct_prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Smallest generator of (Z/pZ)* for prime p, by testing candidates against
/// every prime factor of p - 1.
pub(crate) fn find_generator(p: u64) -> u64 {
    let factors = distinct_prime_factors(p - 1);
    'cand: for g in 2..p {
        for &f in &factors {
            if pow_mod(g, (p - 1) / f, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("prime moduli always have a generator")
}

/// A power-of-two transform plan: the root, per-level twiddle tables with
/// fixed-multiplicand pre-scalings, and the block split (n1, n2).
#[derive(Debug, Clone)]
pub struct TftPlan {
    p: u64,
    k: u32,
    n: usize,
    omega: u64,
    omega_inv: u64,
    n1: usize,
    n2: usize,
    strategy: NttStrategy,
    barrett: BarrettContext<u64>,
    float_ctx: Option<FloatContext<f64>>,
    fwd_levels: Vec<Vec<FixedMultiplicand<u64>>>,
    inv_levels: Vec<Vec<FixedMultiplicand<u64>>>,
    inv2: FixedMultiplicand<u64>,
    transpose_block: usize,
}

impl TftPlan {
    /// Plan with an automatically chosen block split and Barrett butterflies.
    pub fn new(p: u64, k: u32) -> Result<Self, ModError> {
        Self::with_params(p, k, None, None, NttStrategy::Barrett)
    }

    /// Plan with an explicit block split n1 (a power of two dividing 2^k).
    pub fn with_block(p: u64, k: u32, n1: usize) -> Result<Self, ModError> {
        Self::with_params(p, k, Some(n1), None, NttStrategy::Barrett)
    }

    /// Full-control constructor. `omega` overrides the generator search and
    /// is validated for primitivity.
    pub fn with_params(
        p: u64,
        k: u32,
        n1: Option<usize>,
        omega: Option<u64>,
        strategy: NttStrategy,
    ) -> Result<Self, ModError> {
        if k >= 48 {
            return Err(ModError::UnsupportedTransformSize);
        }
        if p < 3 || !is_prime_u64(p) {
            return Err(ModError::InvalidModulus);
        }
        let n = 1usize << k;
        if !(p - 1).is_multiple_of(n as u64) {
            return Err(ModError::UnsupportedTransformSize);
        }
        if strategy == NttStrategy::FloatFma && bit_size(p) > 50 {
            return Err(ModError::ProfileViolation);
        }
        let omega = match omega {
            Some(w) => {
                let w = w % p;
                // primitivity: for k >= 1 the half power must be -1
                let ok = if k == 0 {
                    w == 1
                } else {
                    w != 1 && pow_mod(w, (n as u64) / 2, p) == p - 1
                };
                if !ok {
                    return Err(ModError::RangeError);
                }
                w
            }
            None => {
                let g = find_generator(p);
                pow_mod(g, (p - 1) / n as u64, p)
            }
        };
        let n1 = match n1 {
            Some(v) => v,
            // lane-sized blocks up to a few KB of data, about sqrt(n) above
            None => {
                if n <= 512 {
                    lanes::LANES_U64.min(n)
                } else {
                    1usize << (k / 2)
                }
            }
        };
        if n1 == 0 || !n1.is_power_of_two() || !n.is_multiple_of(n1) {
            return Err(ModError::UnsupportedTransformSize);
        }
        let n2 = n / n1;

        let r = bit_size(p);
        let profile = if r <= 62 {
            Profile::Minus2
        } else if r == 63 {
            Profile::Minus1
        } else {
            Profile::Full
        };
        let barrett = BarrettContext::new(p, profile)?;
        let float_ctx = if bit_size(p) <= 50 {
            Some(FloatContext::new(p)?)
        } else {
            None
        };

        let make_fm = |w: u64| -> FixedMultiplicand<u64> {
            if r <= 32 {
                FixedMultiplicand::new_half(w, &barrett).expect("half fits")
            } else {
                FixedMultiplicand::new(w, &barrett)
            }
        };

        let pw = p as u128;
        let omega_inv = scalar::mod_inverse(omega as u128, pw).expect("root is invertible") as u64;
        let mut fwd_levels = Vec::with_capacity(k as usize);
        let mut inv_levels = Vec::with_capacity(k as usize);
        let (mut root, mut iroot) = (omega as u128, omega_inv as u128);
        for d in 0..k {
            let half = n >> (d + 1);
            let mut fwd = Vec::with_capacity(half);
            let mut inv = Vec::with_capacity(half);
            let (mut wf, mut wi) = (1u128, 1u128);
            for _ in 0..half {
                fwd.push(make_fm(wf as u64));
                inv.push(make_fm(wi as u64));
                wf = wf * root % pw;
                wi = wi * iroot % pw;
            }
            fwd_levels.push(fwd);
            inv_levels.push(inv);
            root = root * root % pw;
            iroot = iroot * iroot % pw;
        }
        let inv2 = make_fm(p.div_ceil(2));

        Ok(TftPlan {
            p,
            k,
            n,
            omega,
            omega_inv,
            n1,
            n2,
            strategy,
            barrett,
            float_ctx,
            fwd_levels,
            inv_levels,
            inv2,
            transpose_block: 8,
        })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }
    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }
    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn root(&self) -> u64 {
        self.omega
    }
    #[inline]
    pub fn root_inv(&self) -> u64 {
        self.omega_inv
    }
    #[inline]
    pub fn block_split(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }
    #[inline]
    pub fn strategy(&self) -> NttStrategy {
        self.strategy
    }
    #[inline]
    pub fn barrett(&self) -> &BarrettContext<u64> {
        &self.barrett
    }
    /// Total cached twiddle count across both directions.
    pub fn twiddle_count(&self) -> usize {
        self.fwd_levels.iter().map(|t| t.len()).sum::<usize>()
            + self.inv_levels.iter().map(|t| t.len()).sum::<usize>()
    }
    /// Transposition block edge used by the blocked transform.
    pub fn set_transpose_block(&mut self, edge: usize) {
        assert!(edge > 0);
        self.transpose_block = edge;
    }

    #[inline]
    fn madd(&self, x: u64, y: u64) -> u64 {
        scalar::add_mod(x, y, &self.barrett)
    }
    #[inline]
    fn msub(&self, x: u64, y: u64) -> u64 {
        scalar::sub_mod(x, y, &self.barrett)
    }
    #[inline]
    fn mtw(&self, x: u64, fm: &FixedMultiplicand<u64>) -> u64 {
        match self.strategy {
            NttStrategy::Barrett => scalar::mul_mod_fixed(x, fm, &self.barrett),
            NttStrategy::FloatFma => {
                let fc = self.float_ctx.as_ref().expect("float context present");
                scalar::mul_mod_fma(x as f64, fm.multiplicand() as f64, fc) as u64
            }
        }
    }
    #[inline]
    fn mmul(&self, x: u64, y: u64) -> u64 {
        match self.strategy {
            NttStrategy::Barrett => scalar::mul_mod(x, y, &self.barrett),
            NttStrategy::FloatFma => {
                let fc = self.float_ctx.as_ref().expect("float context present");
                scalar::mul_mod_fma(x as f64, y as f64, fc) as u64
            }
        }
    }

    /// Pointwise product of two residue slices with the plan's strategy,
    /// using the lane kernels.
    pub fn pointwise_mul(&self, dst: &mut [u64], xs: &[u64], ys: &[u64]) {
        match self.strategy {
            NttStrategy::Barrett => {
                lanes::vmul_mod_barrett_slice(dst, xs, ys, &self.barrett);
            }
            NttStrategy::FloatFma => {
                let fc = self.float_ctx.as_ref().expect("float context present");
                let xf: Vec<f64> = xs.iter().map(|&v| v as f64).collect();
                let yf: Vec<f64> = ys.iter().map(|&v| v as f64).collect();
                let mut df = vec![0.0f64; dst.len()];
                lanes::vmul_mod_fma_slice(&mut df, &xf, &yf, fc);
                for (d, v) in dst.iter_mut().zip(df) {
                    *d = v as u64;
                }
            }
        }
    }

    /// In-place decimation-in-frequency stage pyramid producing the first
    /// `lc` bit-mirrored evaluations of the block in `buf`.
    fn fwd_rec(&self, buf: &mut [u64], lc: usize, depth: usize, ops: &mut u64) {
        let len = buf.len();
        if len == 1 {
            return;
        }
        let half = len / 2;
        let tbl = &self.fwd_levels[depth];
        if lc > half {
            for i in 0..half {
                let (x, y) = (buf[i], buf[i + half]);
                buf[i] = self.madd(x, y);
                buf[i + half] = self.mtw(self.msub(x, y), &tbl[i]);
            }
            *ops += 3 * half as u64;
            let (top, bottom) = buf.split_at_mut(half);
            self.fwd_rec(top, half, depth + 1, ops);
            self.fwd_rec(bottom, lc - half, depth + 1, ops);
        } else {
            for i in 0..half {
                buf[i] = self.madd(buf[i], buf[i + half]);
            }
            *ops += half as u64;
            self.fwd_rec(&mut buf[..half], lc, depth + 1, ops);
        }
    }

    /// Inverse of `fwd_rec`: positions below `lc` hold bit-mirrored
    /// evaluations, positions at or above `lc` hold known time-domain
    /// values. On return the whole block is time-domain.
    fn inv_rec(&self, buf: &mut [u64], lc: usize, depth: usize) {
        let len = buf.len();
        if len == 1 {
            return;
        }
        let half = len / 2;
        let tbl_f = &self.fwd_levels[depth];
        let tbl_i = &self.inv_levels[depth];
        if lc > half {
            {
                let (top, _) = buf.split_at_mut(half);
                self.inv_rec(top, half, depth + 1);
            }
            // top now holds u_i = x_i + y_i for all i
            for i in lc - half..half {
                let y = buf[i + half];
                let x = self.msub(buf[i], y);
                buf[i] = x;
                buf[i + half] = self.mtw(self.msub(x, y), &tbl_f[i]);
            }
            {
                let (_, bottom) = buf.split_at_mut(half);
                self.inv_rec(bottom, lc - half, depth + 1);
            }
            // bottom now holds v_i for all i
            for i in 0..lc - half {
                let u = buf[i];
                let vw = self.mtw(buf[i + half], &tbl_i[i]);
                let x = self.mtw(self.madd(u, vw), &self.inv2);
                buf[i] = x;
                buf[i + half] = self.msub(u, x);
            }
            for i in lc - half..half {
                let y = self.msub(buf[i], self.mtw(buf[i + half], &tbl_i[i]));
                buf[i + half] = y;
            }
        } else {
            for i in lc..half {
                buf[i] = self.madd(buf[i], buf[i + half]);
            }
            self.inv_rec(&mut buf[..half], lc, depth + 1);
            for i in 0..half {
                buf[i] = self.msub(buf[i], buf[i + half]);
            }
        }
    }
}

/// Truncated Fourier transform: the first `l` bit-mirrored evaluations of
/// the polynomial with the given coefficients (missing ones are zero).
pub fn tft(plan: &TftPlan, coeffs: &[u64], l: usize) -> Result<EvalVector, ModError> {
    let (ev, _) = tft_counted(plan, coeffs, l)?;
    Ok(ev)
}

/// [`tft`] with the number of field operations spent.
pub fn tft_counted(
    plan: &TftPlan,
    coeffs: &[u64],
    l: usize,
) -> Result<(EvalVector, u64), ModError> {
    if l > plan.n {
        return Err(ModError::RangeError);
    }
    debug_assert!(coeffs.iter().all(|&c| c < plan.p));
    if l == 0 {
        return Ok((
            EvalVector {
                values: Vec::new(),
                ordering: EvalOrdering::BitrevEvaluation,
            },
            0,
        ));
    }
    // coefficients at indices >= l are treated as zero
    let used = coeffs.len().min(l);
    let mut buf = vec![0u64; plan.n];
    buf[..used].copy_from_slice(&coeffs[..used]);
    let mut ops = 0;
    plan.fwd_rec(&mut buf, l, 0, &mut ops);
    buf.truncate(l);
    Ok((
        EvalVector {
            values: buf,
            ordering: EvalOrdering::BitrevEvaluation,
        },
        ops,
    ))
}

/// Inverse truncated transform: recovers the `l` coefficients from the
/// first `l` bit-mirrored evaluations, knowing coefficients at indices >= l
/// are zero.
pub fn itft(plan: &TftPlan, evals: &EvalVector, l: usize) -> Result<Vec<u64>, ModError> {
    if evals.ordering != EvalOrdering::BitrevEvaluation || evals.values.len() != l || l > plan.n {
        return Err(ModError::RangeError);
    }
    debug_assert!(evals.values.iter().all(|&c| c < plan.p));
    if l == 0 {
        return Ok(Vec::new());
    }
    let mut buf = vec![0u64; plan.n];
    buf[..l].copy_from_slice(&evals.values);
    plan.inv_rec(&mut buf, l, 0);
    buf.truncate(l);
    Ok(buf)
}

/// O(n^2) evaluation oracle: natural-order DFT by direct power summation,
/// independent of the transform kernels.
pub fn dft_bruteforce(plan: &TftPlan, a: &[u64]) -> Result<Vec<u64>, ModError> {
    if a.len() != plan.n {
        return Err(ModError::RangeError);
    }
    let p = plan.p as u128;
    let mut out = Vec::with_capacity(plan.n);
    for i in 0..plan.n {
        let wi = pow_mod(plan.omega, i as u64, plan.p) as u128;
        let mut acc = 0u128;
        let mut wij = 1u128;
        for &aj in a {
            acc = (acc + wij * aj as u128) % p;
            wij = wij * wi % p;
        }
        out.push(acc as u64);
    }
    Ok(out)
}

/// Exact rectangular transpose with cache-blocked traversal.
pub fn transpose_blocked(src: &[u64], rows: usize, cols: usize) -> Vec<u64> {
    transpose_blocked_with(src, rows, cols, 8)
}

/// [`transpose_blocked`] with a configurable block edge.
pub fn transpose_blocked_with(src: &[u64], rows: usize, cols: usize, block: usize) -> Vec<u64> {
    assert_eq!(src.len(), rows * cols, "rectangular input required");
    assert!(block > 0);
    let mut dst = vec![0u64; rows * cols];
    let mut rb = 0;
    while rb < rows {
        let rend = (rb + block).min(rows);
        let mut cb = 0;
        while cb < cols {
            let cend = (cb + block).min(cols);
            for r in rb..rend {
                for c in cb..cend {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
            cb = cend;
        }
        rb = rend;
    }
    dst
}

/// Two-level blocked transform: column transforms of height lambda =
/// ceil(l/n1), twiddle scaling by omega^(j1 * mirror(j2)), row transforms
/// of width n1, interleaved read-out. Produces lambda*n1 values whose first
/// l agree with [`tft`].
pub fn blocked_tft(plan: &TftPlan, coeffs: &[u64], l: usize) -> Result<EvalVector, ModError> {
    let (ev, _) = blocked_tft_counted(plan, coeffs, l)?;
    Ok(ev)
}

/// [`blocked_tft`] with the number of field operations spent.
pub fn blocked_tft_counted(
    plan: &TftPlan,
    coeffs: &[u64],
    l: usize,
) -> Result<(EvalVector, u64), ModError> {
    let (n1, n2) = (plan.n1, plan.n2);
    if l > plan.n || n1 > l {
        return Err(ModError::RangeError);
    }
    let k1 = n1.trailing_zeros() as usize;
    let k2 = n2.trailing_zeros();
    let lambda = l.div_ceil(n1);
    let mut ops = 0u64;

    // step 1: columns; grid is lambda rows by n1 columns, zero padded
    let used = coeffs.len().min(l);
    let mut grid = vec![0u64; lambda * n1];
    grid[..used].copy_from_slice(&coeffs[..used]);
    let tg = transpose_blocked_with(&grid, lambda, n1, plan.transpose_block);
    let mut cols = vec![0u64; n1 * n2];
    for c in 0..n1 {
        let col = &mut cols[c * n2..(c + 1) * n2];
        col[..lambda].copy_from_slice(&tg[c * lambda..(c + 1) * lambda]);
        plan.fwd_rec(col, lambda, k1, &mut ops);
    }

    // step 2: scale entry (j1, j2) by omega^(j1 * mirror(j2, k2)); the
    // mirrored index stays below n2 <= n/2, so its power sits in the first
    // twiddle level
    if k2 > 0 && n1 > 1 {
        for j2 in 0..lambda {
            let e = bit_mirror(j2, k2)?;
            if e == 0 {
                continue;
            }
            let we = &plan.fwd_levels[0][e];
            let mut acc = we.multiplicand();
            for j1 in 1..n1 {
                cols[j1 * n2 + j2] = plan.mmul(cols[j1 * n2 + j2], acc);
                acc = plan.mtw(acc, we);
                ops += 2;
            }
        }
    }

    // step 3: rows of length n1 over K^lambda
    let sub: Vec<u64> = (0..n1)
        .flat_map(|j1| cols[j1 * n2..j1 * n2 + lambda].iter().copied())
        .collect();
    let mut out = transpose_blocked_with(&sub, n1, lambda, plan.transpose_block);
    for j2 in 0..lambda {
        plan.fwd_rec(&mut out[j2 * n1..(j2 + 1) * n1], n1, k2 as usize, &mut ops);
    }

    // step 4: row-major read-out is already the interleaved output
    Ok((
        EvalVector {
            values: out,
            ordering: EvalOrdering::BitrevEvaluation,
        },
        ops,
    ))
}
