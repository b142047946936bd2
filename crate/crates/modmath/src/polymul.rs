//! Polynomial products over Z/pZ: schoolbook, transform-based, and
//! Kronecker substitution, plus the evaluate-multiply-interpolate matrix
//! product.
//!
//! Storage length, not mathematical degree, drives all sizing; trailing
//! zero coefficients are legal.

use crate::bigmul::{self, BigNat};
use crate::error::ModError;
use crate::ntt::{self, EvalOrdering, EvalVector, TftPlan};
use crate::word::ceil_log2;

/// Dense polynomial with residue coefficients and an attached modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    coeffs: Vec<u64>,
    p: u64,
}

impl ModPoly {
    pub fn new(coeffs: Vec<u64>, p: u64) -> Result<Self, ModError> {
        if p < 2 {
            return Err(ModError::InvalidModulus);
        }
        if coeffs.iter().any(|&c| c >= p) {
            return Err(ModError::RangeError);
        }
        Ok(ModPoly { coeffs, p })
    }

    pub fn zero(p: u64) -> Self {
        ModPoly {
            coeffs: Vec::new(),
            p,
        }
    }

    pub fn constant(c: u64, p: u64) -> Result<Self, ModError> {
        Self::new(vec![c], p)
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }
    /// Storage length (degree + 1 when the leading coefficient is nonzero).
    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Coefficient-wise sum; output length is the longer input's.
pub fn poly_add(a: &ModPoly, b: &ModPoly) -> Result<ModPoly, ModError> {
    if a.p != b.p {
        return Err(ModError::ModulusMismatch);
    }
    let p = a.p as u128;
    let n = a.len().max(b.len());
    let coeffs = (0..n)
        .map(|i| {
            let x = a.coeffs.get(i).copied().unwrap_or(0) as u128;
            let y = b.coeffs.get(i).copied().unwrap_or(0) as u128;
            ((x + y) % p) as u64
        })
        .collect();
    Ok(ModPoly { coeffs, p: a.p })
}

/// Schoolbook convolution; the quadratic reference the fast paths are
/// checked against. Output length is len(a) + len(b) - 1.
pub fn poly_mul_naive(a: &ModPoly, b: &ModPoly) -> Result<ModPoly, ModError> {
    if a.p != b.p {
        return Err(ModError::ModulusMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(ModPoly::zero(a.p));
    }
    let p = a.p as u128;
    let mut coeffs = vec![0u64; a.len() + b.len() - 1];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let lo = k.saturating_sub(b.len() - 1);
        let hi = k.min(a.len() - 1);
        let mut acc = 0u128;
        for i in lo..=hi {
            let prod = a.coeffs[i] as u128 * b.coeffs[k - i] as u128;
            acc = match acc.checked_add(prod) {
                Some(v) => v,
                None => (acc % p) + prod,
            };
        }
        *c = (acc % p) as u64;
    }
    Ok(ModPoly { coeffs, p: a.p })
}

/// Transform product: two direct transforms, one pointwise lane product,
/// one inverse transform, all at the exact product length.
pub fn poly_mul_tft(a: &ModPoly, b: &ModPoly, plan: &TftPlan) -> Result<ModPoly, ModError> {
    if a.p != b.p {
        return Err(ModError::ModulusMismatch);
    }
    if plan.modulus() != a.p {
        return Err(ModError::ModulusMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(ModPoly::zero(a.p));
    }
    let l = a.len() + b.len() - 1;
    if l > plan.size() {
        return Err(ModError::UnsupportedTransformSize);
    }
    let ea = ntt::tft(plan, &a.coeffs, l)?;
    let eb = ntt::tft(plan, &b.coeffs, l)?;
    let mut prod = vec![0u64; l];
    plan.pointwise_mul(&mut prod, &ea.values, &eb.values);
    let coeffs = ntt::itft(
        plan,
        &EvalVector {
            values: prod,
            ordering: EvalOrdering::BitrevEvaluation,
        },
        l,
    )?;
    Ok(ModPoly { coeffs, p: a.p })
}

/// Smallest multiple of 8 that keeps product coefficients from overlapping
/// when both operands are packed at 2^H.
fn kronecker_chunk_bits(p: u64, min_len: usize) -> u32 {
    let m = ceil_log2(p);
    let log_len = 64 - (min_len as u64).leading_zeros();
    let h0 = 2 * m + log_len + 1;
    h0.div_ceil(8) * 8
}

/// Reads the H-bit chunk at `start_bit` and folds it modulo p.
fn chunk_fold_mod(n: &BigNat, start_bit: usize, width: u32, p: u64) -> u64 {
    let limbs = n.limbs();
    let total_bits = limbs.len() * 64;
    let mut pieces = Vec::with_capacity(width.div_ceil(64) as usize);
    let mut taken = 0u32;
    while taken < width {
        let off = start_bit + taken as usize;
        if off >= total_bits {
            break;
        }
        let limb = off / 64;
        let sh = (off % 64) as u32;
        let mut v = limbs[limb] >> sh;
        if sh > 0 && limb + 1 < limbs.len() {
            v |= limbs[limb + 1] << (64 - sh);
        }
        let want = (width - taken).min(64);
        if want < 64 {
            v &= (1u64 << want) - 1;
        }
        pieces.push(v);
        taken += want;
    }
    let pw = p as u128;
    let mut r = 0u128;
    for &piece in pieces.iter().rev() {
        r = ((r << 64) | piece as u128) % pw;
    }
    r as u64
}

/// Kronecker substitution: lift to integers, evaluate at 2^H, multiply the
/// integers, split the product back into H-bit chunks, reduce each.
pub fn poly_mul_kronecker(a: &ModPoly, b: &ModPoly) -> Result<ModPoly, ModError> {
    if a.p != b.p {
        return Err(ModError::ModulusMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(ModPoly::zero(a.p));
    }
    let h = kronecker_chunk_bits(a.p, a.len().min(b.len()));
    let pack = |poly: &ModPoly| -> BigNat {
        let mut limbs = vec![0u64; (poly.len() * h as usize + 64).div_ceil(64) + 1];
        for (j, &c) in poly.coeffs.iter().enumerate() {
            // coefficients are below 2^h/..., slots cannot collide
            add_bits_at(&mut limbs, c, j * h as usize);
        }
        BigNat::from_limbs(limbs)
    };
    let ia = pack(a);
    let ib = pack(b);
    let prod = bigmul::int_mul(&ia, &ib)?;
    let l = a.len() + b.len() - 1;
    let coeffs = (0..l)
        .map(|j| chunk_fold_mod(&prod, j * h as usize, h, a.p))
        .collect();
    Ok(ModPoly { coeffs, p: a.p })
}

fn add_bits_at(limbs: &mut [u64], v: u64, bit: usize) {
    if v == 0 {
        return;
    }
    let idx = bit / 64;
    let sh = (bit % 64) as u32;
    limbs[idx] |= v << sh;
    if sh > 0 {
        let hi = v >> (64 - sh);
        if hi > 0 {
            limbs[idx + 1] |= hi;
        }
    }
}

/// Dense matrix of polynomials over one modulus, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ModPoly>,
    p: u64,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ModPoly>) -> Result<Self, ModError> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(ModError::DimensionMismatch);
        }
        let p = entries[0].p;
        if entries.iter().any(|e| e.p != p) {
            return Err(ModError::ModulusMismatch);
        }
        Ok(PolyMatrix {
            rows,
            cols,
            entries,
            p,
        })
    }

    /// Identity: ones on the diagonal, zero polynomials elsewhere.
    pub fn identity(n: usize, p: u64) -> Result<Self, ModError> {
        let mut entries = vec![ModPoly::zero(p); n * n];
        for i in 0..n {
            entries[i * n + i] = ModPoly::constant(1, p)?;
        }
        PolyMatrix::new(n, n, entries)
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
    pub fn modulus(&self) -> u64 {
        self.p
    }
    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> &ModPoly {
        &self.entries[r * self.cols + c]
    }
    /// Largest entry storage length.
    pub fn degree_bound(&self) -> usize {
        self.entries.iter().map(|e| e.len()).max().unwrap_or(0)
    }
}

/// Entry-wise schoolbook matrix product; the reference for the transform
/// path.
pub fn poly_mat_mul_naive(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix, ModError> {
    if a.cols != b.rows {
        return Err(ModError::DimensionMismatch);
    }
    if a.p != b.p {
        return Err(ModError::ModulusMismatch);
    }
    let mut entries = Vec::with_capacity(a.rows * b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = ModPoly::zero(a.p);
            for k in 0..a.cols {
                acc = poly_add(&acc, &poly_mul_naive(a.entry(i, k), b.entry(k, j))?)?;
            }
            entries.push(acc);
        }
    }
    PolyMatrix::new(a.rows, b.cols, entries)
}

/// Evaluate-multiply-interpolate: transform every entry at the exact
/// product length, take pointwise matrix products over Z/pZ with the lane
/// kernels (each product reduced immediately), and inverse-transform.
pub fn poly_mat_mul(
    a: &PolyMatrix,
    b: &PolyMatrix,
    plan: &TftPlan,
) -> Result<PolyMatrix, ModError> {
    if a.cols != b.rows {
        return Err(ModError::DimensionMismatch);
    }
    if a.p != b.p || plan.modulus() != a.p {
        return Err(ModError::ModulusMismatch);
    }
    let da = a.degree_bound();
    let db = b.degree_bound();
    if da == 0 || db == 0 {
        let entries = vec![ModPoly::zero(a.p); a.rows * b.cols];
        return PolyMatrix::new(a.rows, b.cols, entries);
    }
    let l = da + db - 1;
    if l > plan.size() {
        return Err(ModError::UnsupportedTransformSize);
    }
    let transform = |m: &PolyMatrix| -> Result<Vec<Vec<u64>>, ModError> {
        m.entries
            .iter()
            .map(|e| Ok(ntt::tft(plan, &e.coeffs, l)?.values))
            .collect()
    };
    let ea = transform(a)?;
    let eb = transform(b)?;
    let inner = a.cols;
    let ctx = plan.barrett();
    let mut entries = Vec::with_capacity(a.rows * b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = vec![0u64; l];
            let mut tmp = vec![0u64; l];
            for k in 0..inner {
                plan.pointwise_mul(&mut tmp, &ea[i * inner + k], &eb[k * b.cols + j]);
                let prev = acc.clone();
                crate::lanes::vadd_mod_slice(&mut acc, &prev, &tmp, ctx);
            }
            let coeffs = ntt::itft(
                plan,
                &EvalVector {
                    values: acc,
                    ordering: EvalOrdering::BitrevEvaluation,
                },
                l,
            )?;
            entries.push(ModPoly { coeffs, p: a.p });
        }
    }
    PolyMatrix::new(a.rows, b.cols, entries)
}
