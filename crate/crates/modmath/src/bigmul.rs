//! Big-integer multiplication through Kronecker segmentation and the
//! three-prime FFT: operands split into h-bit chunks become polynomials,
//! the chunk polynomials are multiplied modulo three NTT primes, each
//! product coefficient is recovered by Chinese remaindering, and the result
//! is evaluated at 2^h with carry propagation.

use crate::error::ModError;
use crate::ntt::{self, EvalOrdering, EvalVector, TftPlan};
use crate::scalar::mod_inverse;

/// The default NTT primes; each supports power-of-two transforms up to 2^22.
pub const THREE_PRIMES: [u64; 3] = [998244353, 985661441, 943718401];

/// Below this limb count the schoolbook product wins; tunable.
pub const FFT_CUTOFF_LIMBS: usize = 64;

/// Arbitrary-size nonnegative integer, 64-bit little-endian limbs, no
/// trailing zero limb except for canonical zero (empty).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BigNat {
    limbs: Vec<u64>,
}

impl BigNat {
    pub fn zero() -> Self {
        BigNat { limbs: Vec::new() }
    }

    pub fn from_u64(v: u64) -> Self {
        let mut n = BigNat { limbs: vec![v] };
        n.canonicalize();
        n
    }

    pub fn from_limbs(limbs: Vec<u64>) -> Self {
        let mut n = BigNat { limbs };
        n.canonicalize();
        n
    }

    #[inline]
    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn bit_len(&self) -> usize {
        match self.limbs.last() {
            None => 0,
            Some(top) => 64 * self.limbs.len() - top.leading_zeros() as usize,
        }
    }

    fn canonicalize(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    /// Lowercase hex, most-significant digit first, no prefix.
    pub fn to_hex(&self) -> String {
        match self.limbs.split_last() {
            None => "0".to_string(),
            Some((top, rest)) => {
                let mut s = format!("{top:x}");
                for limb in rest.iter().rev() {
                    s.push_str(&format!("{limb:016x}"));
                }
                s
            }
        }
    }

    pub fn from_hex(s: &str) -> Result<Self, ModError> {
        if s.is_empty() {
            return Err(ModError::BadHex);
        }
        let mut limbs = vec![0u64; s.len().div_ceil(16)];
        for (i, ch) in s.bytes().rev().enumerate() {
            let nib = match ch {
                b'0'..=b'9' => ch - b'0',
                b'a'..=b'f' => ch - b'a' + 10,
                _ => return Err(ModError::BadHex),
            } as u64;
            limbs[i / 16] |= nib << (4 * (i % 16));
        }
        Ok(BigNat::from_limbs(limbs))
    }

    pub fn add(&self, other: &BigNat) -> BigNat {
        let (long, short) = if self.limbs.len() >= other.limbs.len() {
            (&self.limbs, &other.limbs)
        } else {
            (&other.limbs, &self.limbs)
        };
        let mut out = Vec::with_capacity(long.len() + 1);
        let mut carry = 0u64;
        for (i, &lv) in long.iter().enumerate() {
            let s = short.get(i).copied().unwrap_or(0);
            let (v1, c1) = lv.overflowing_add(s);
            let (v2, c2) = v1.overflowing_add(carry);
            out.push(v2);
            carry = (c1 as u64) + (c2 as u64);
        }
        if carry > 0 {
            out.push(carry);
        }
        BigNat::from_limbs(out)
    }

    /// Splits into ceil(bit_len/h) chunks of h bits each, little-endian.
    pub fn to_chunks(&self, h: u32) -> Vec<u64> {
        assert!((1..=63).contains(&h));
        let bits = self.bit_len();
        let count = bits.div_ceil(h as usize);
        let mask = (1u64 << h) - 1;
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            let off = j * h as usize;
            let limb = off / 64;
            let sh = (off % 64) as u32;
            let mut v = self.limbs[limb] >> sh;
            if sh > 0 && limb + 1 < self.limbs.len() {
                v |= self.limbs[limb + 1] << (64 - sh);
            }
            out.push(v & mask);
        }
        out
    }

    /// Inverse of [`Self::to_chunks`]: sum of chunks[j] << (j*h). Chunk
    /// values may exceed h bits; overlaps carry.
    pub fn from_chunks(chunks: &[u64], h: u32) -> BigNat {
        let total_bits = chunks.len() * h as usize + 64;
        let mut limbs = vec![0u64; total_bits.div_ceil(64) + 1];
        for (j, &c) in chunks.iter().enumerate() {
            add_u128_at_bit(&mut limbs, c as u128, j * h as usize);
        }
        BigNat::from_limbs(limbs)
    }
}

/// Adds `v` at bit offset `bit` into the limb array, rippling carries.
fn add_u128_at_bit(limbs: &mut [u64], v: u128, bit: usize) {
    if v == 0 {
        return;
    }
    let idx = bit / 64;
    let sh = (bit % 64) as u32;
    let lo = v as u64;
    let hi = (v >> 64) as u64;
    let (p0, p1, p2) = if sh == 0 {
        (lo, hi, 0u64)
    } else {
        (lo << sh, (lo >> (64 - sh)) | (hi << sh), hi >> (64 - sh))
    };
    let mut carry = false;
    let mut k = idx;
    for part in [p0, p1, p2] {
        if part == 0 && !carry {
            k += 1;
            continue;
        }
        let slot = &mut limbs[k];
        let (v1, c1) = slot.overflowing_add(part);
        let (v2, c2) = v1.overflowing_add(carry as u64);
        *slot = v2;
        carry = c1 || c2;
        k += 1;
    }
    while carry {
        let (v1, c1) = limbs[k].overflowing_add(1);
        limbs[k] = v1;
        carry = c1;
        k += 1;
    }
}

/// Quadratic limb product: the small-size path and the reference the FFT
/// pipeline is checked against.
pub fn int_mul_schoolbook(a: &BigNat, b: &BigNat) -> BigNat {
    if a.is_zero() || b.is_zero() {
        return BigNat::zero();
    }
    let (al, bl) = (a.limbs(), b.limbs());
    let mut out = vec![0u64; al.len() + bl.len()];
    for (i, &ai) in al.iter().enumerate() {
        let mut carry = 0u64;
        for (j, &bj) in bl.iter().enumerate() {
            let t = out[i + j] as u128 + ai as u128 * bj as u128 + carry as u128;
            out[i + j] = t as u64;
            carry = (t >> 64) as u64;
        }
        out[i + bl.len()] = carry;
    }
    BigNat::from_limbs(out)
}

fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

/// Chunk size, coefficient bound, per-prime transform plans, and CRT
/// constants for products of operands up to `n_bits`.
#[derive(Debug, Clone)]
pub struct ThreePrimePlan {
    h: u32,
    d: usize,
    cap_h: u32,
    primes: [u64; 3],
    plans: [TftPlan; 3],
    inv_p1_mod_p2: u64,
    p1p2: u64,
    inv_p1p2_mod_p3: u64,
}

impl ThreePrimePlan {
    /// Plan for one product of operands of at most `n_bits` bits: h maximal
    /// (d minimal) under 2^H < p1*p2*p3 with H = 2h + ceil(log2(d+1)), and
    /// the product length within the primes' 2-adic transform capacity.
    pub fn new(n_bits: u64) -> Result<Self, ModError> {
        Self::with_accumulation(n_bits, 1)
    }

    /// Same, but leaving headroom for summing `inner_dim` products per
    /// coefficient (the matrix-product accumulation growth).
    pub fn with_accumulation(n_bits: u64, inner_dim: usize) -> Result<Self, ModError> {
        if n_bits == 0 || inner_dim == 0 {
            return Err(ModError::RangeError);
        }
        let [p1, p2, p3] = THREE_PRIMES;
        let p123 = p1 as u128 * p2 as u128 * p3 as u128;
        // the primes share 2-adic capacity 2^22
        const CAPACITY_LOG2: u32 = 22;
        // byte-aligned chunk sizes, largest first
        for h in [40u32, 32, 24, 16, 8] {
            let d = (n_bits.div_ceil(h as u64)) as usize;
            let cap_h = 2 * h + ceil_log2((d as u64 + 1) * inner_dim as u64);
            if cap_h >= 128 || (1u128 << cap_h) >= p123 {
                continue;
            }
            let prod_len = 2 * d - 1;
            let k = ceil_log2(prod_len as u64);
            if k > CAPACITY_LOG2 {
                continue;
            }
            let plans = [
                TftPlan::new(p1, k)?,
                TftPlan::new(p2, k)?,
                TftPlan::new(p3, k)?,
            ];
            let inv_p1_mod_p2 = mod_inverse(p1 as u128 % p2 as u128, p2 as u128).unwrap() as u64;
            let p1p2 = p1 * p2; // fits: both primes are below 2^30
            let inv_p1p2_mod_p3 =
                mod_inverse(p1p2 as u128 % p3 as u128, p3 as u128).unwrap() as u64;
            return Ok(ThreePrimePlan {
                h,
                d,
                cap_h,
                primes: THREE_PRIMES,
                plans,
                inv_p1_mod_p2,
                p1p2,
                inv_p1p2_mod_p3,
            });
        }
        Err(ModError::SizeOverflow)
    }

    #[inline]
    pub fn chunk_bits(&self) -> u32 {
        self.h
    }
    #[inline]
    pub fn chunk_count(&self) -> usize {
        self.d
    }
    /// H: every recovered product coefficient is below 2^H.
    #[inline]
    pub fn coefficient_bound_log2(&self) -> u32 {
        self.cap_h
    }
    #[inline]
    pub fn primes(&self) -> [u64; 3] {
        self.primes
    }
    #[inline]
    pub fn plans(&self) -> &[TftPlan; 3] {
        &self.plans
    }
}

/// The unique x < p1*p2*p3 with x = ri mod pi.
pub fn crt3(r1: u64, r2: u64, r3: u64, plan: &ThreePrimePlan) -> u128 {
    let [p1, p2, p3] = plan.primes;
    debug_assert!(r1 < p1 && r2 < p2 && r3 < p3);
    let t1 = (r2 + p2 - r1 % p2) as u128 * plan.inv_p1_mod_p2 as u128 % p2 as u128;
    let x12 = r1 + p1 * t1 as u64; // < p1*p2 < 2^60
    let t2 = ((r3 + p3 - (x12 % p3)) % p3) as u128 * plan.inv_p1p2_mod_p3 as u128 % p3 as u128;
    x12 as u128 + plan.p1p2 as u128 * t2
}

fn mul_chunk_polys_mod_prime(
    plan: &TftPlan,
    ca: &[u64],
    cb: &[u64],
    l: usize,
) -> Result<Vec<u64>, ModError> {
    let p = plan.modulus();
    let ra: Vec<u64> = ca.iter().map(|&c| c % p).collect();
    let rb: Vec<u64> = cb.iter().map(|&c| c % p).collect();
    let ea = ntt::tft(plan, &ra, l)?;
    let eb = ntt::tft(plan, &rb, l)?;
    let mut prod = vec![0u64; l];
    plan.pointwise_mul(&mut prod, &ea.values, &eb.values);
    ntt::itft(
        plan,
        &EvalVector {
            values: prod,
            ordering: EvalOrdering::BitrevEvaluation,
        },
        l,
    )
}

/// Exact product. Small operands go through the schoolbook path; larger
/// ones through segmentation, per-prime transforms, and CRT recovery.
pub fn int_mul(a: &BigNat, b: &BigNat) -> Result<BigNat, ModError> {
    int_mul_with_cutoff(a, b, FFT_CUTOFF_LIMBS)
}

/// [`int_mul`] with an explicit schoolbook/FFT crossover in limbs.
pub fn int_mul_with_cutoff(
    a: &BigNat,
    b: &BigNat,
    cutoff_limbs: usize,
) -> Result<BigNat, ModError> {
    if a.is_zero() || b.is_zero() {
        return Ok(BigNat::zero());
    }
    if a.limbs.len().min(b.limbs.len()) < cutoff_limbs {
        return Ok(int_mul_schoolbook(a, b));
    }
    let n_bits = a.bit_len().max(b.bit_len()) as u64;
    let plan = ThreePrimePlan::new(n_bits)?;
    int_mul_with_plan(a, b, &plan)
}

/// FFT product with a caller-provided plan (reusable across products).
pub fn int_mul_with_plan(
    a: &BigNat,
    b: &BigNat,
    plan: &ThreePrimePlan,
) -> Result<BigNat, ModError> {
    if a.is_zero() || b.is_zero() {
        return Ok(BigNat::zero());
    }
    let h = plan.h;
    let ca = a.to_chunks(h);
    let cb = b.to_chunks(h);
    if ca.len() > plan.d || cb.len() > plan.d {
        return Err(ModError::SizeOverflow);
    }
    let l = ca.len() + cb.len() - 1;
    let c1 = mul_chunk_polys_mod_prime(&plan.plans[0], &ca, &cb, l)?;
    let c2 = mul_chunk_polys_mod_prime(&plan.plans[1], &ca, &cb, l)?;
    let c3 = mul_chunk_polys_mod_prime(&plan.plans[2], &ca, &cb, l)?;

    let out_bits = a.bit_len() + b.bit_len();
    let mut limbs = vec![0u64; out_bits.div_ceil(64) + 2];
    for j in 0..l {
        let x = crt3(c1[j], c2[j], c3[j], plan);
        assert!(x >> plan.cap_h == 0, "recovered coefficient exceeds 2^H");
        add_u128_at_bit(&mut limbs, x, j * h as usize);
    }
    Ok(BigNat::from_limbs(limbs))
}

/// Dense matrix of big integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigNat>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigNat>) -> Result<Self, ModError> {
        if entries.len() != rows * cols {
            return Err(ModError::DimensionMismatch);
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigNat::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigNat::from_u64(1);
        }
        IntMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> &BigNat {
        &self.entries[r * self.cols + c]
    }

    fn max_bit_len(&self) -> usize {
        self.entries.iter().map(|e| e.bit_len()).max().unwrap_or(0)
    }
}

/// Matrix product where each entry is segmented and transformed once per
/// prime, the matrix products run pointwise in the evaluation domain, and
/// entries are recovered by CRT and carry propagation.
pub fn int_mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix, ModError> {
    if a.cols != b.rows {
        return Err(ModError::DimensionMismatch);
    }
    let inner = a.cols;
    let na = a.max_bit_len() as u64;
    let nb = b.max_bit_len() as u64;
    if na == 0 || nb == 0 {
        return Ok(IntMatrix {
            rows: a.rows,
            cols: b.cols,
            entries: vec![BigNat::zero(); a.rows * b.cols],
        });
    }
    let plan = ThreePrimePlan::with_accumulation(na.max(nb), inner)?;
    let h = plan.h;
    let da = (na as usize).div_ceil(h as usize).max(1);
    let db = (nb as usize).div_ceil(h as usize).max(1);
    let l = da + db - 1;

    let mut residues: Vec<Vec<Vec<u64>>> = Vec::with_capacity(3);
    for tplan in plan.plans.iter() {
        let p = tplan.modulus();
        let transform = |m: &IntMatrix| -> Result<Vec<Vec<u64>>, ModError> {
            m.entries
                .iter()
                .map(|e| {
                    let chunks: Vec<u64> = e.to_chunks(h).iter().map(|&c| c % p).collect();
                    Ok(ntt::tft(tplan, &chunks, l)?.values)
                })
                .collect()
        };
        let ea = transform(a)?;
        let eb = transform(b)?;
        let ctx = tplan.barrett();
        let mut entries = Vec::with_capacity(a.rows * b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc = vec![0u64; l];
                let mut tmp = vec![0u64; l];
                for kk in 0..inner {
                    crate::lanes::vmul_mod_barrett_slice(
                        &mut tmp,
                        &ea[i * inner + kk],
                        &eb[kk * b.cols + j],
                        ctx,
                    );
                    let prev = acc.clone();
                    crate::lanes::vadd_mod_slice(&mut acc, &prev, &tmp, ctx);
                }
                entries.push(ntt::itft(
                    tplan,
                    &EvalVector {
                        values: acc,
                        ordering: EvalOrdering::BitrevEvaluation,
                    },
                    l,
                )?);
            }
        }
        residues.push(entries);
    }

    let bits = na as usize + nb as usize + ceil_log2(inner as u64) as usize;
    let entries = (0..a.rows * b.cols)
        .map(|e| {
            let mut limbs = vec![0u64; bits.div_ceil(64) + 2];
            #[allow(clippy::needless_range_loop)] // three parallel residue arrays
            for j in 0..l {
                let x = crt3(
                    residues[0][e][j],
                    residues[1][e][j],
                    residues[2][e][j],
                    &plan,
                );
                assert!(x >> plan.cap_h == 0, "recovered coefficient exceeds 2^H");
                add_u128_at_bit(&mut limbs, x, j * h as usize);
            }
            BigNat::from_limbs(limbs)
        })
        .collect();
    Ok(IntMatrix {
        rows: a.rows,
        cols: b.cols,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> impl FnMut() -> u64 {
        let mut state = seed;
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }
    }

    fn random_bignat(bits: usize, next: &mut impl FnMut() -> u64) -> BigNat {
        if bits == 0 {
            return BigNat::zero();
        }
        let mut limbs = vec![0u64; bits.div_ceil(64)];
        for l in limbs.iter_mut() {
            *l = next();
        }
        let top_bits = bits % 64;
        if top_bits > 0 {
            let last = limbs.len() - 1;
            limbs[last] &= (1u64 << top_bits) - 1;
            limbs[last] |= 1u64 << (top_bits - 1);
        } else {
            let last = limbs.len() - 1;
            limbs[last] |= 1u64 << 63;
        }
        BigNat::from_limbs(limbs)
    }

    #[test]
    fn hex_roundtrip() {
        for s in [
            "0",
            "1",
            "ff",
            "deadbeef",
            "123456789abcdef0123456789abcdef",
        ] {
            assert_eq!(BigNat::from_hex(s).unwrap().to_hex(), s);
        }
        assert!(BigNat::from_hex("").is_err());
        assert!(BigNat::from_hex("xyz").is_err());
        // leading zeros normalize away
        assert_eq!(BigNat::from_hex("000ff").unwrap().to_hex(), "ff");
    }

    #[test]
    fn chunk_roundtrip() {
        let mut next = rng(7);
        for bits in [1usize, 13, 64, 65, 130, 1000] {
            let n = random_bignat(bits, &mut next);
            for h in [8u32, 13, 32, 40, 63] {
                let chunks = n.to_chunks(h);
                assert_eq!(BigNat::from_chunks(&chunks, h), n, "bits={bits} h={h}");
            }
        }
    }

    #[test]
    fn plan_defaults() {
        let plan = ThreePrimePlan::new(1).unwrap();
        assert_eq!(plan.primes(), THREE_PRIMES);
        assert_eq!(plan.chunk_count(), 1);
        let p123 = THREE_PRIMES.iter().map(|&p| p as u128).product::<u128>();
        assert!((1u128 << plan.coefficient_bound_log2()) < p123);
        // exact floor(log2(p1*p2*p3)) sanity for the bound
        assert_eq!(127 - p123.leading_zeros(), 89);
        let plan = ThreePrimePlan::new(1 << 20).unwrap();
        assert!((1u128 << plan.coefficient_bound_log2()) < p123);
    }

    #[test]
    fn crt_examples() {
        let plan = ThreePrimePlan::new(64).unwrap();
        let [p1, p2, p3] = THREE_PRIMES;
        let x = 123456789u64;
        assert_eq!(crt3(x % p1, x % p2, x % p3, &plan), x as u128);
        assert_eq!(crt3(0, 0, 0, &plan), 0);
        let mut next = rng(99);
        let p123 = p1 as u128 * p2 as u128 * p3 as u128;
        for _ in 0..1000 {
            let x = ((next() as u128) << 64 | next() as u128) % p123;
            let r = crt3(
                (x % p1 as u128) as u64,
                (x % p2 as u128) as u64,
                (x % p3 as u128) as u64,
                &plan,
            );
            assert_eq!(r, x);
        }
    }

    #[test]
    fn mul_identities() {
        let mut next = rng(3);
        let a = random_bignat(1000, &mut next);
        assert_eq!(int_mul(&a, &BigNat::zero()).unwrap(), BigNat::zero());
        assert_eq!(int_mul(&a, &BigNat::from_u64(1)).unwrap(), a);
        let x = BigNat::from_u64(0xffff_ffff);
        assert_eq!(int_mul(&x, &x).unwrap().to_hex(), "fffffffe00000001");
    }

    #[test]
    fn fft_path_matches_schoolbook() {
        let mut next = rng(11);
        for bits in [4096usize, 8192, 100_000] {
            let a = random_bignat(bits, &mut next);
            let b = random_bignat(bits, &mut next);
            let plan = ThreePrimePlan::new(bits as u64).unwrap();
            let got = int_mul_with_plan(&a, &b, &plan).unwrap();
            let want = int_mul_schoolbook(&a, &b);
            assert_eq!(got, want, "bits={bits}");
        }
    }

    #[test]
    fn asymmetric_sizes() {
        let mut next = rng(13);
        let a = random_bignat(10_000, &mut next);
        let b = random_bignat(700, &mut next);
        let plan = ThreePrimePlan::new(10_000).unwrap();
        assert_eq!(
            int_mul_with_plan(&a, &b, &plan).unwrap(),
            int_mul_schoolbook(&a, &b)
        );
    }

    #[test]
    fn exhaustive_tiny_limbs() {
        // all limb counts <= 3 with varied fill patterns
        let pats = [
            0u64,
            1,
            0xff,
            u64::MAX,
            0x8000_0000_0000_0000,
            0x0123_4567_89ab_cdef,
        ];
        let plan = ThreePrimePlan::new(192).unwrap();
        for la in 0..=3usize {
            for lb in 0..=3usize {
                for &pa in &pats {
                    for &pb in &pats {
                        let a = BigNat::from_limbs(vec![pa; la]);
                        let b = BigNat::from_limbs(vec![pb; lb]);
                        let want = int_mul_schoolbook(&a, &b);
                        assert_eq!(int_mul(&a, &b).unwrap(), want);
                        if !a.is_zero() && !b.is_zero() {
                            assert_eq!(int_mul_with_plan(&a, &b, &plan).unwrap(), want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn commutative_distributive() {
        let mut next = rng(17);
        let a = random_bignat(5000, &mut next);
        let b = random_bignat(4200, &mut next);
        let c = random_bignat(4600, &mut next);
        assert_eq!(int_mul(&a, &b).unwrap(), int_mul(&b, &a).unwrap());
        let left = int_mul(&a, &b.add(&c)).unwrap();
        let right = int_mul(&a, &b).unwrap().add(&int_mul(&a, &c).unwrap());
        assert_eq!(left, right);
    }

    #[test]
    fn mat_mul_examples() {
        let mut next = rng(23);
        // 1x1 reduces to int_mul
        let a = IntMatrix::new(1, 1, vec![random_bignat(3000, &mut next)]).unwrap();
        let b = IntMatrix::new(1, 1, vec![random_bignat(3000, &mut next)]).unwrap();
        let c = int_mat_mul(&a, &b).unwrap();
        assert_eq!(
            c.entry(0, 0),
            &int_mul(a.entry(0, 0), b.entry(0, 0)).unwrap()
        );

        // identity
        let m = IntMatrix::new(
            2,
            2,
            (0..4).map(|_| random_bignat(2000, &mut next)).collect(),
        )
        .unwrap();
        let id = IntMatrix::identity(2);
        assert_eq!(int_mat_mul(&id, &m).unwrap(), m);

        // random 4x4 against the naive schoolbook oracle
        let a = IntMatrix::new(
            4,
            4,
            (0..16).map(|_| random_bignat(4096, &mut next)).collect(),
        )
        .unwrap();
        let b = IntMatrix::new(
            4,
            4,
            (0..16).map(|_| random_bignat(4096, &mut next)).collect(),
        )
        .unwrap();
        let got = int_mat_mul(&a, &b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut want = BigNat::zero();
                for k in 0..4 {
                    want = want.add(&int_mul_schoolbook(a.entry(i, k), b.entry(k, j)));
                }
                assert_eq!(got.entry(i, j), &want, "entry ({i},{j})");
            }
        }

        // dimension mismatch
        let bad = IntMatrix::new(3, 2, vec![BigNat::zero(); 6]).unwrap();
        assert_eq!(
            int_mat_mul(&a, &bad).unwrap_err(),
            ModError::DimensionMismatch
        );
    }
}
