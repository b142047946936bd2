//! Differential self-test suites: every module's oracle and property
//! checks, runnable under a time budget with seeded randomness. The CLI
//! drives these; the heavier fixed-size sweeps live in the acceptance test
//! suite.

use crate::bigmul::{self, BigNat, IntMatrix, ThreePrimePlan};
use crate::lanes;
use crate::ntt::{self, TftPlan};
use crate::polymul::{self, ModPoly, PolyMatrix};
use crate::scalar::{
    self, BarrettContext, BarrettHalfContext, FixedMultiplicand, FloatContext, FloatWord,
    HalfVariant, MontgomeryContext, Profile,
};
use crate::word::{bit_size, Uint, Word};
use std::time::{Duration, Instant};

/// Small fast deterministic generator for the differential sweeps.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, bound); bound > 0.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Uniform in [lo, hi].
    #[inline]
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }
}

/// Outcome of one property run.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub scope: &'static str,
    pub name: &'static str,
    pub samples: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Module filter for [`run_selftest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Modcore,
    Modsimd,
    Ntt,
    Polymul,
    Bigmul,
    All,
}

impl Scope {
    pub fn parse(s: &str) -> Option<Scope> {
        Some(match s {
            "modcore" => Scope::Modcore,
            "modsimd" => Scope::Modsimd,
            "ntt" => Scope::Ntt,
            "polymul" => Scope::Polymul,
            "bigmul" => Scope::Bigmul,
            "all" => Scope::All,
            _ => return None,
        })
    }
}

struct Runner {
    budget_per_property: Duration,
    seed: u64,
    reports: Vec<PropertyReport>,
}

impl Runner {
    /// Repeats `f` (one batch per call, returning cases checked or a
    /// counterexample) until the per-property budget runs out.
    fn run<F>(&mut self, scope: &'static str, name: &'static str, mut f: F)
    where
        F: FnMut(&mut SplitMix64) -> (u64, Option<String>),
    {
        let mut rng = SplitMix64::new(self.seed ^ fxhash(name));
        let start = Instant::now();
        let mut report = PropertyReport {
            scope,
            name,
            samples: 0,
            failures: 0,
            counterexamples: Vec::new(),
        };
        loop {
            let (cases, failure) = f(&mut rng);
            report.samples += cases;
            if let Some(ce) = failure {
                report.failures += 1;
                if report.counterexamples.len() < 10 {
                    report.counterexamples.push(ce);
                }
            }
            if start.elapsed() >= self.budget_per_property {
                break;
            }
        }
        self.reports.push(report);
    }
}

fn fxhash(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x100000001b3);
    }
    h
}

/// Runs the selected suites within the total budget and returns one report
/// per property.
pub fn run_selftest(scope: Scope, budget: Duration, seed: u64) -> Vec<PropertyReport> {
    let scopes: &[Scope] = match scope {
        Scope::All => &[
            Scope::Modcore,
            Scope::Modsimd,
            Scope::Ntt,
            Scope::Polymul,
            Scope::Bigmul,
        ],
        _ => std::slice::from_ref(&scope),
    };
    let counts = [9usize, 5, 5, 4, 5];
    let total_props: usize = scopes
        .iter()
        .map(|s| match s {
            Scope::Modcore => counts[0],
            Scope::Modsimd => counts[1],
            Scope::Ntt => counts[2],
            Scope::Polymul => counts[3],
            Scope::Bigmul => counts[4],
            Scope::All => 0,
        })
        .sum();
    let mut runner = Runner {
        budget_per_property: budget / total_props.max(1) as u32,
        seed,
        reports: Vec::new(),
    };
    for s in scopes {
        match s {
            Scope::Modcore => modcore_suite(&mut runner),
            Scope::Modsimd => modsimd_suite(&mut runner),
            Scope::Ntt => ntt_suite(&mut runner),
            Scope::Polymul => polymul_suite(&mut runner),
            Scope::Bigmul => bigmul_suite(&mut runner),
            Scope::All => {}
        }
    }
    runner.reports
}

// ---------------------------------------------------------------------------
// modcore

fn mul_oracle<W: Word>(x: W, y: W, p: W) -> W {
    W::from_wide(x.to_wide().wrapping_mul(y.to_wide()) % p.to_wide())
}

/// One full strategy sweep over a single modulus: add/sub/neg, Barrett
/// product per applicable profile, half reduction, fixed multiplicand, and
/// Montgomery when p is odd. Returns cases checked or a counterexample.
pub fn sweep_modulus<W: Word>(p: W, rng: &mut SplitMix64, pairs: u64) -> (u64, Option<String>) {
    let mut cases = 0u64;
    let pu = p.to_u64();
    let sample = |rng: &mut SplitMix64| W::from_u64(rng.below(pu));
    let mut contexts: Vec<BarrettContext<W>> = Vec::new();
    for profile in Profile::ALL {
        if let Ok(ctx) = BarrettContext::new(p, profile) {
            contexts.push(ctx);
        }
    }
    let half_ctx = BarrettHalfContext::new(p).ok();
    let mont = if pu & 1 == 1 && pu >= 3 {
        MontgomeryContext::new(p, W::BITS).ok()
    } else {
        None
    };
    for _ in 0..pairs {
        let x = sample(rng);
        let y = sample(rng);
        let add_want = {
            let s = x.to_wide() + y.to_wide();
            let pw = p.to_wide();
            W::from_wide(if s >= pw { s - pw } else { s })
        };
        let mul_want = mul_oracle(x, y, p);
        for ctx in &contexts {
            cases += 2;
            let got = scalar::add_mod(x, y, ctx);
            if got != add_want {
                return (cases, Some(format!("add_mod p={pu} x={x} y={y} got={got}")));
            }
            let got = scalar::mul_mod(x, y, ctx);
            if got != mul_want {
                return (
                    cases,
                    Some(format!(
                        "mul_mod p={pu} profile={:?} x={x} y={y} got={got} want={mul_want}",
                        ctx.profile()
                    )),
                );
            }
            let sub_want = if x >= y { x - y } else { p - (y - x) };
            cases += 2;
            if scalar::sub_mod(x, y, ctx) != sub_want {
                return (cases, Some(format!("sub_mod p={pu} x={x} y={y}")));
            }
            let neg_want = if x == W::ZERO { W::ZERO } else { p - x };
            if scalar::neg_mod(x, ctx) != neg_want {
                return (cases, Some(format!("neg_mod p={pu} x={x}")));
            }
            let fm = FixedMultiplicand::new(y, ctx);
            cases += 1;
            if scalar::mul_mod_fixed(x, &fm, ctx) != mul_want {
                return (cases, Some(format!("mul_mod_fixed p={pu} x={x} y={y}")));
            }
            if let Ok(fmh) = FixedMultiplicand::new_half(y, ctx) {
                cases += 1;
                if scalar::mul_mod_fixed(x, &fmh, ctx) != mul_want {
                    return (
                        cases,
                        Some(format!("mul_mod_fixed(half) p={pu} x={x} y={y}")),
                    );
                }
            }
        }
        if let Some(h) = &half_ctx {
            // any a with a*p <= 2^t
            let lim = ((1u128 << h.t()) / pu as u128).min(u64::MAX as u128) as u64;
            let a = W::from_u64(rng.below(lim));
            cases += 1;
            if scalar::barrett_reduce_half(a, h).to_u64() != a.to_u64() % pu {
                return (cases, Some(format!("barrett_reduce_half p={pu} a={a}")));
            }
        }
        if let Some(m) = &mont {
            cases += 2;
            let (xt, yt) = (scalar::to_mont(x, m), scalar::to_mont(y, m));
            let zt = scalar::mont_mul(xt, yt, m);
            if scalar::from_mont(zt, m) != mul_want {
                return (cases, Some(format!("mont_mul p={pu} x={x} y={y}")));
            }
            if scalar::from_mont(scalar::to_mont(x, m), m) != x {
                return (cases, Some(format!("mont roundtrip p={pu} x={x}")));
            }
        }
    }
    (cases, None)
}

fn random_modulus<W: Word>(rng: &mut SplitMix64) -> W {
    // bias towards interesting widths: full, n-1, n-2, and small
    let n = W::BITS;
    let bits = match rng.below(4) {
        0 => n,
        1 => n - 1,
        2 => n - 2,
        _ => rng.range(2, n as u64) as u32,
    };
    let lo = if bits == 1 {
        0
    } else {
        1u64 << ((bits - 1).min(63))
    };
    let hi = if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    };
    let p = rng.range(lo.max(2), hi);
    W::from_u64(p)
}

fn modcore_suite(r: &mut Runner) {
    r.run("modcore", "oracle-equivalence-u8-exhaustive", |_| {
        let mut cases = 0u64;
        for p in 2u64..=255 {
            let mut rng = SplitMix64::new(p);
            let (c, fail) = sweep_modulus::<u8>(p as u8, &mut rng, p * p / 4 + 1);
            cases += c;
            if fail.is_some() {
                return (cases, fail);
            }
        }
        (cases, None)
    });
    for (name, width) in [
        ("oracle-equivalence-u16", 16u32),
        ("oracle-equivalence-u32", 32),
        ("oracle-equivalence-u64", 64),
    ] {
        r.run("modcore", name, move |rng| match width {
            16 => sweep_modulus::<u16>(random_modulus(rng), rng, 64),
            32 => sweep_modulus::<u32>(random_modulus(rng), rng, 64),
            _ => sweep_modulus::<u64>(random_modulus(rng), rng, 64),
        });
    }
    r.run("modcore", "barrett-correction-bound", |rng| {
        let p: u64 = random_modulus(rng);
        let mut cases = 0;
        for profile in Profile::ALL {
            let ctx = match BarrettContext::new(p, profile) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let bound = ctx.input_bound();
            for _ in 0..64 {
                cases += 1;
                let a = (((rng.next_u64() as u128) << 64) | rng.next_u64() as u128) % bound;
                let (v, count) = scalar::barrett_reduce_counted(a, &ctx);
                if count > ctx.correction_bound() || v as u128 != a % p as u128 {
                    return (
                        cases,
                        Some(format!("p={p} profile={profile:?} a={a} count={count}")),
                    );
                }
            }
        }
        (cases, None)
    });
    r.run("modcore", "montgomery-congruence", |rng| {
        let mut p: u64 = random_modulus(rng);
        p |= 1;
        if p < 3 {
            p = 3;
        }
        let m = rng.range(bit_size(p) as u64, 64) as u32;
        let ctx = match MontgomeryContext::new(p, m) {
            Ok(c) => c,
            Err(_) => return (0, None),
        };
        let bound = (p as u128) << m;
        let mut cases = 0;
        for _ in 0..64 {
            cases += 1;
            let a = (((rng.next_u64() as u128) << 64) | rng.next_u64() as u128) % bound;
            let d = scalar::mont_reduce(a, &ctx);
            let want = (a % p as u128) * ctx.rho() as u128 % p as u128;
            if d as u128 != want || d >= p {
                return (
                    cases,
                    Some(format!("mont_reduce p={p} m={m} a={a} got={d}")),
                );
            }
        }
        (cases, None)
    });
    r.run("modcore", "branch-free-add-agreement", |rng| {
        let p = random_modulus::<u64>(rng) >> 1 | 1; // keep a spare bit
        let ctx = match BarrettContext::new(p.max(2), Profile::Minus1) {
            Ok(c) => c,
            Err(_) => return (0, None),
        };
        let p = ctx.modulus();
        let mut cases = 0;
        for _ in 0..256 {
            cases += 1;
            let (x, y) = (rng.below(p), rng.below(p));
            let a = scalar::add_mod_min(x, y, &ctx);
            let b = scalar::add_mod_shift(x, y, &ctx);
            if a != b {
                return (cases, Some(format!("p={p} x={x} y={y} min={a} shift={b}")));
            }
        }
        (cases, None)
    });
    r.run("modcore", "float-fma-oracle-f64", |rng| {
        let m = rng.range(2, 50) as u32;
        let p = rng.range(2, (1u64 << m) - 1).max(2);
        let ctx = match FloatContext::<f64>::new(p) {
            Ok(c) => c,
            Err(_) => return (0, None),
        };
        let mut cases = 0;
        for _ in 0..256 {
            cases += 1;
            let (x, y) = (rng.below(p), rng.below(p));
            let got = scalar::mul_mod_fma(x as f64, y as f64, &ctx);
            if got.fract() != 0.0 || got < 0.0 || got >= p as f64 {
                return (cases, Some(format!("non-residue output p={p} x={x} y={y}")));
            }
            if got as u64 != ((x as u128 * y as u128) % p as u128) as u64 {
                return (
                    cases,
                    Some(format!("mul_mod_fma p={p} x={x} y={y} got={got}")),
                );
            }
        }
        (cases, None)
    });
    r.run("modcore", "float-reduce-and-ubar-contract", |rng| {
        let m = rng.range(2, 25) as u32;
        let p = rng.range(2, (1u64 << m) - 1).max(2);
        let ctx = match FloatContext::<f64>::new(p) {
            Ok(c) => c,
            Err(_) => return (0, None),
        };
        // exact rational contract
        let (mant, exp) = FloatWord::decompose(ctx.ubar());
        if (mant as u128) * (p as u128) < 1u128 << (-exp) as u32 {
            return (1, Some(format!("ubar*p < 1 for p={p}")));
        }
        let mut cases = 1;
        let prime = ntt_is_prime(p);
        for _ in 0..128 {
            cases += 1;
            // m <= 25 keeps p << 26 inside u64
            let a = rng.below(p << 26);
            let got = scalar::float_reduce_half(a as f64, &ctx, HalfVariant::AnyRounding);
            if got as u64 != a % p {
                return (cases, Some(format!("reduce_half p={p} a={a}")));
            }
            if prime {
                let (x, y) = (rng.below(p), rng.below(p));
                let prod = x * y; // fits: p < 2^25
                let got =
                    scalar::float_reduce_half(prod as f64, &ctx, HalfVariant::UpwardNoHighBranch);
                if got as u64 != prod % p {
                    return (cases, Some(format!("reduce_half upward p={p} x={x} y={y}")));
                }
            }
        }
        (cases, None)
    });
    r.run("modcore", "float-two-product-exactness", |rng| {
        let mut cases = 0;
        for _ in 0..512 {
            cases += 1;
            let a = rng.below((1 << 50) - 27) as f64;
            let b = rng.below((1 << 50) - 27) as f64;
            let (h, l) = scalar::two_product(a, b);
            let exact = a as u128 * b as u128;
            let sum = if l >= 0.0 {
                h as u128 + l as u128
            } else {
                h as u128 - (-l) as u128
            };
            if sum != exact {
                return (cases, Some(format!("h+l != a*b for a={a} b={b}")));
            }
        }
        (cases, None)
    });
}

fn ntt_is_prime(p: u64) -> bool {
    crate::ntt::is_prime_u64(p)
}

// ---------------------------------------------------------------------------
// modsimd

/// Lane-wise comparison of every vector kernel against its scalar
/// counterpart for one modulus.
pub fn lanes_vs_scalar<W: Word, const N: usize>(
    p: W,
    rng: &mut SplitMix64,
    batches: u64,
) -> (u64, Option<String>) {
    let mut cases = 0u64;
    let pu = p.to_u64();
    let mut contexts: Vec<BarrettContext<W>> = Vec::new();
    for profile in Profile::ALL {
        if let Ok(ctx) = BarrettContext::new(p, profile) {
            contexts.push(ctx);
        }
    }
    let mont = if pu & 1 == 1 && pu >= 3 {
        MontgomeryContext::new(p, W::BITS).ok()
    } else {
        None
    };
    for _ in 0..batches {
        let xs: [W; N] = core::array::from_fn(|_| W::from_u64(rng.below(pu)));
        let ys: [W; N] = core::array::from_fn(|_| W::from_u64(rng.below(pu)));
        for ctx in &contexts {
            let va = lanes::vadd_mod(&xs, &ys, ctx);
            let vs = lanes::vsub_mod(&xs, &ys, ctx);
            let vn = lanes::vneg_mod(&xs, ctx);
            let vm = lanes::vmul_mod_barrett(&xs, &ys, ctx);
            let y0 = ys[0];
            let fm = FixedMultiplicand::new(y0, ctx);
            let vf = lanes::vmul_mod_fixed(&xs, &fm, ctx);
            for i in 0..N {
                cases += 5;
                if va[i] != scalar::add_mod(xs[i], ys[i], ctx) {
                    return (cases, Some(format!("vadd p={pu} lane={i}")));
                }
                if vs[i] != scalar::sub_mod(xs[i], ys[i], ctx) {
                    return (cases, Some(format!("vsub p={pu} lane={i}")));
                }
                if vn[i] != scalar::neg_mod(xs[i], ctx) {
                    return (cases, Some(format!("vneg p={pu} lane={i}")));
                }
                if vm[i] != scalar::mul_mod(xs[i], ys[i], ctx) {
                    return (
                        cases,
                        Some(format!("vmul p={pu} profile={:?} lane={i}", ctx.profile())),
                    );
                }
                if vf[i] != scalar::mul_mod_fixed(xs[i], &fm, ctx) {
                    return (cases, Some(format!("vfixed p={pu} lane={i}")));
                }
            }
        }
        if let Some(m) = &mont {
            let vm = lanes::vmont_mul(&xs, &ys, m);
            for i in 0..N {
                cases += 1;
                if vm[i] != scalar::mont_mul(xs[i], ys[i], m) {
                    return (cases, Some(format!("vmont p={pu} lane={i}")));
                }
            }
        }
    }
    (cases, None)
}

fn modsimd_suite(r: &mut Runner) {
    r.run("modsimd", "lane-homomorphism-u8-exhaustive", |_| {
        let mut cases = 0;
        for p in 2u64..=255 {
            let mut rng = SplitMix64::new(p * 31);
            let (c, fail) = lanes_vs_scalar::<u8, { lanes::LANES_U8 }>(p as u8, &mut rng, 8);
            cases += c;
            if fail.is_some() {
                return (cases, fail);
            }
        }
        (cases, None)
    });
    r.run("modsimd", "lane-homomorphism-u16-u32-u64", |rng| {
        let mut total = 0;
        let (c, f) = lanes_vs_scalar::<u16, { lanes::LANES_U16 }>(random_modulus(rng), rng, 4);
        total += c;
        if f.is_some() {
            return (total, f);
        }
        let (c, f) = lanes_vs_scalar::<u32, { lanes::LANES_U32 }>(random_modulus(rng), rng, 4);
        total += c;
        if f.is_some() {
            return (total, f);
        }
        let (c, f) = lanes_vs_scalar::<u64, { lanes::LANES_U64 }>(random_modulus(rng), rng, 4);
        total += c;
        (total, f)
    });
    r.run("modsimd", "lane-homomorphism-f64", |rng| {
        let m = rng.range(2, 50) as u32;
        let p = rng.range(2, (1u64 << m) - 1).max(2);
        let ctx = match FloatContext::<f64>::new(p) {
            Ok(c) => c,
            Err(_) => return (0, None),
        };
        let mut cases = 0;
        for _ in 0..32 {
            let xs: [f64; lanes::LANES_F64] = core::array::from_fn(|_| rng.below(p) as f64);
            let ys: [f64; lanes::LANES_F64] = core::array::from_fn(|_| rng.below(p) as f64);
            let vm = lanes::vmul_mod_fma(&xs, &ys, &ctx);
            let va = lanes::vadd_mod_f64(&xs, &ys, &ctx);
            let vs = lanes::vsub_mod_f64(&xs, &ys, &ctx);
            for i in 0..lanes::LANES_F64 {
                cases += 3;
                if vm[i] != scalar::mul_mod_fma(xs[i], ys[i], &ctx) {
                    return (cases, Some(format!("vfma p={p} lane={i}")));
                }
                let want_add = (xs[i] as u64 + ys[i] as u64) % p;
                if va[i] as u64 != want_add {
                    return (cases, Some(format!("vadd_f64 p={p} lane={i}")));
                }
                let want_sub = (xs[i] as u64 + p - ys[i] as u64) % p;
                if vs[i] as u64 != want_sub {
                    return (cases, Some(format!("vsub_f64 p={p} lane={i}")));
                }
            }
        }
        (cases, None)
    });
    r.run("modsimd", "biased-unsigned-compare", |rng| {
        let mut cases = 0;
        let edge = [
            0u64,
            1,
            (1 << 63) - 1,
            1 << 63,
            (1 << 63) + 1,
            u64::MAX - 1,
            u64::MAX,
        ];
        for &a in &edge {
            for &b in &edge {
                cases += 1;
                if lanes::biased_gt_u64(a, b) != (a > b) {
                    return (cases, Some(format!("edge a={a} b={b}")));
                }
            }
        }
        for _ in 0..4096 {
            cases += 1;
            let (a, b) = (rng.next_u64(), rng.next_u64());
            if lanes::biased_gt_u64(a, b) != (a > b) {
                return (cases, Some(format!("a={a} b={b}")));
            }
        }
        (cases, None)
    });
    r.run("modsimd", "multi-moduli-lanes", |rng| {
        // eight 30-bit moduli sharing a bit-size
        let ps: [u32; 8] = core::array::from_fn(|_| (rng.range(1 << 29, (1 << 30) - 1)) as u32);
        let ctx = match lanes::MultiModulusContext::new(ps, Profile::Minus2) {
            Ok(c) => c,
            Err(_) => return (0, None),
        };
        let mut cases = 0;
        for _ in 0..64 {
            let xs: [u32; 8] = core::array::from_fn(|i| (rng.below(ps[i] as u64)) as u32);
            let ys: [u32; 8] = core::array::from_fn(|i| (rng.below(ps[i] as u64)) as u32);
            let sums = lanes::vadd_mod_multi(&xs, &ys, &ctx);
            let prods = lanes::vmul_mod_barrett_multi(&xs, &ys, &ctx);
            for i in 0..8 {
                cases += 2;
                if sums[i] as u64 != (xs[i] as u64 + ys[i] as u64) % ps[i] as u64 {
                    return (cases, Some(format!("multi add lane={i} p={}", ps[i])));
                }
                if prods[i] as u64 != xs[i] as u64 * ys[i] as u64 % ps[i] as u64 {
                    return (cases, Some(format!("multi mul lane={i} p={}", ps[i])));
                }
            }
        }
        (cases, None)
    });
}

// ---------------------------------------------------------------------------
// ntt

fn ntt_suite(r: &mut Runner) {
    r.run("ntt", "tft-vs-bruteforce-small", |rng| {
        let mut cases = 0;
        for (p, kmax) in [(17u64, 4u32), (97, 5), (469762049, 6)] {
            for k in 0..=kmax.min(6) {
                let plan = TftPlan::new(p, k).unwrap();
                let n = plan.size();
                let coeffs: Vec<u64> = (0..n).map(|_| rng.below(p)).collect();
                let nat = ntt::dft_bruteforce(&plan, &coeffs).unwrap();
                let ev = ntt::tft(&plan, &coeffs, n).unwrap();
                for i in 0..n {
                    cases += 1;
                    if ev.values[i] != nat[ntt::bit_mirror(i, k).unwrap()] {
                        return (cases, Some(format!("p={p} k={k} i={i}")));
                    }
                }
            }
        }
        (cases, None)
    });
    r.run("ntt", "itft-roundtrip", |rng| {
        let p = 469762049u64;
        let k = rng.range(0, 10) as u32;
        let plan = TftPlan::new(p, k).unwrap();
        let n = plan.size();
        let l = rng.range(1, n as u64) as usize;
        let coeffs: Vec<u64> = (0..l).map(|_| rng.below(p)).collect();
        let ev = ntt::tft(&plan, &coeffs, l).unwrap();
        let back = ntt::itft(&plan, &ev, l).unwrap();
        if back != coeffs {
            return (l as u64, Some(format!("roundtrip k={k} l={l}")));
        }
        (l as u64, None)
    });
    r.run("ntt", "blocked-vs-direct", |rng| {
        let p = 469762049u64;
        let k = rng.range(1, 10) as u32;
        let n = 1usize << k;
        let n1 = 1usize << rng.range(0, k as u64);
        let plan = TftPlan::with_block(p, k, n1).unwrap();
        let l = rng.range(n1 as u64, n as u64) as usize;
        let coeffs: Vec<u64> = (0..l).map(|_| rng.below(p)).collect();
        let blocked = ntt::blocked_tft(&plan, &coeffs, l).unwrap();
        let lam = l.div_ceil(n1);
        let direct = ntt::tft(&plan, &coeffs, lam * n1).unwrap();
        if blocked.values != direct.values {
            return (1, Some(format!("k={k} n1={n1} l={l}")));
        }
        (lam as u64 * n1 as u64, None)
    });
    r.run("ntt", "linearity", |rng| {
        let p = 97u64;
        let plan = TftPlan::new(p, 5).unwrap();
        let l = rng.range(1, 32) as usize;
        let a: Vec<u64> = (0..l).map(|_| rng.below(p)).collect();
        let b: Vec<u64> = (0..l).map(|_| rng.below(p)).collect();
        let (alpha, beta) = (rng.below(p), rng.below(p));
        let comb: Vec<u64> = (0..l)
            .map(|i| {
                ((alpha as u128 * a[i] as u128 + beta as u128 * b[i] as u128) % p as u128) as u64
            })
            .collect();
        let ta = ntt::tft(&plan, &a, l).unwrap().values;
        let tb = ntt::tft(&plan, &b, l).unwrap().values;
        let tc = ntt::tft(&plan, &comb, l).unwrap().values;
        for i in 0..l {
            let want =
                ((alpha as u128 * ta[i] as u128 + beta as u128 * tb[i] as u128) % p as u128) as u64;
            if tc[i] != want {
                return (i as u64 + 1, Some(format!("linearity l={l} i={i}")));
            }
        }
        (l as u64, None)
    });
    r.run("ntt", "blocked-op-count-shape", |rng| {
        let p = 469762049u64;
        let k = rng.range(4, 12) as u32;
        let n = 1usize << k;
        let k1 = rng.range(1, k as u64 - 1) as u32;
        let n1 = 1usize << k1;
        let plan = TftPlan::with_block(p, k, n1).unwrap();
        let l = rng.range(n1 as u64, n as u64) as usize;
        let coeffs: Vec<u64> = (0..l).map(|_| rng.below(p)).collect();
        let (_, ops) = ntt::blocked_tft_counted(&plan, &coeffs, l).unwrap();
        let lambda = l.div_ceil(n1) as u64;
        let bound = 3 * lambda * n1 as u64 * k as u64 / 2 + 8 * n as u64;
        if ops > bound {
            return (
                1,
                Some(format!("ops={ops} bound={bound} k={k} n1={n1} l={l}")),
            );
        }
        (1, None)
    });
}

// ---------------------------------------------------------------------------
// polymul

fn polymul_suite(r: &mut Runner) {
    let p = 469762049u64;
    let plan10 = TftPlan::new(p, 10).unwrap();
    r.run("polymul", "three-way-agreement", move |rng| {
        let plan = &plan10;
        let la = 1 + rng.below(512) as usize;
        let lb = 1 + rng.below(512) as usize;
        let a = ModPoly::new((0..la).map(|_| rng.below(p)).collect(), p).unwrap();
        let b = ModPoly::new((0..lb).map(|_| rng.below(p)).collect(), p).unwrap();
        let naive = polymul::poly_mul_naive(&a, &b).unwrap();
        let fast = polymul::poly_mul_tft(&a, &b, plan).unwrap();
        if naive != fast {
            return (1, Some(format!("tft vs naive la={la} lb={lb}")));
        }
        let kro = polymul::poly_mul_kronecker(&a, &b).unwrap();
        if naive != kro {
            return (1, Some(format!("kronecker vs naive la={la} lb={lb}")));
        }
        (2 * (la + lb) as u64, None)
    });
    // p = 7 has 2-adic valuation 1, so the transform route only covers
    // product lengths up to 2; kronecker covers everything
    let plan7 = TftPlan::new(7, 1).unwrap();
    r.run("polymul", "exhaustive-tiny-mod7", move |_| {
        let plan = &plan7;
        let mut cases = 0;
        for la in 1..=2usize {
            for lb in 1..=2usize {
                let mut ac = vec![0u64; la];
                loop {
                    let mut bc = vec![0u64; lb];
                    loop {
                        let a = ModPoly::new(ac.clone(), 7).unwrap();
                        let b = ModPoly::new(bc.clone(), 7).unwrap();
                        cases += 1;
                        let naive = polymul::poly_mul_naive(&a, &b).unwrap();
                        if polymul::poly_mul_kronecker(&a, &b).unwrap() != naive {
                            return (cases, Some(format!("kronecker a={ac:?} b={bc:?}")));
                        }
                        if la + lb - 1 <= plan.size()
                            && polymul::poly_mul_tft(&a, &b, plan).unwrap() != naive
                        {
                            return (cases, Some(format!("tft a={ac:?} b={bc:?}")));
                        }
                        if !incr(&mut bc, 7) {
                            break;
                        }
                    }
                    if !incr(&mut ac, 7) {
                        break;
                    }
                }
            }
        }
        (cases, None)
    });
    let plan8 = TftPlan::new(p, 8).unwrap();
    r.run("polymul", "ring-axioms", move |rng| {
        let plan = &plan8;
        let la = 1 + rng.below(100) as usize;
        let a = ModPoly::new((0..la).map(|_| rng.below(p)).collect(), p).unwrap();
        let b = ModPoly::new((0..la).map(|_| rng.below(p)).collect(), p).unwrap();
        let c = ModPoly::new((0..la).map(|_| rng.below(p)).collect(), p).unwrap();
        let ab = polymul::poly_mul_tft(&a, &b, plan).unwrap();
        let ba = polymul::poly_mul_tft(&b, &a, plan).unwrap();
        if ab != ba {
            return (1, Some("commutativity".to_string()));
        }
        let bc = polymul::poly_add(&b, &c).unwrap();
        let left = polymul::poly_mul_tft(&a, &bc, plan).unwrap();
        let right = polymul::poly_add(
            &polymul::poly_mul_tft(&a, &b, plan).unwrap(),
            &polymul::poly_mul_tft(&a, &c, plan).unwrap(),
        )
        .unwrap();
        if left != right {
            return (2, Some("distributivity".to_string()));
        }
        (2, None)
    });
    let plan_mat = TftPlan::new(p, 7).unwrap();
    r.run("polymul", "matrix-vs-naive", move |rng| {
        let plan = &plan_mat;
        let n = 1 + rng.below(3) as usize;
        let d = 1 + rng.below(16) as usize;
        let mk = |rng: &mut SplitMix64| {
            PolyMatrix::new(
                n,
                n,
                (0..n * n)
                    .map(|_| ModPoly::new((0..d).map(|_| rng.below(p)).collect(), p).unwrap())
                    .collect(),
            )
            .unwrap()
        };
        let a = mk(rng);
        let b = mk(rng);
        let fast = polymul::poly_mat_mul(&a, &b, plan).unwrap();
        let slow = polymul::poly_mat_mul_naive(&a, &b).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (f, s) = (fast.entry(i, j), slow.entry(i, j));
                let len = f.len().max(s.len());
                for t in 0..len {
                    if f.coeffs().get(t).copied().unwrap_or(0)
                        != s.coeffs().get(t).copied().unwrap_or(0)
                    {
                        return (1, Some(format!("n={n} d={d} entry=({i},{j}) t={t}")));
                    }
                }
            }
        }
        ((n * n * d) as u64, None)
    });
}

fn incr(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

// ---------------------------------------------------------------------------
// bigmul

fn bigmul_suite(r: &mut Runner) {
    r.run("bigmul", "int-mul-vs-schoolbook", |rng| {
        let bits = 1 + rng.below(40_000) as usize;
        let a = random_nat(bits, rng);
        let b = random_nat(bits / 2 + 1, rng);
        let plan = match ThreePrimePlan::new(bits as u64) {
            Ok(p) => p,
            Err(_) => return (0, None),
        };
        let got = bigmul::int_mul_with_plan(&a, &b, &plan).unwrap();
        let want = bigmul::int_mul_schoolbook(&a, &b);
        if got != want {
            return (1, Some(format!("bits={bits}")));
        }
        (bits as u64, None)
    });
    r.run("bigmul", "crt-bijection", |rng| {
        let plan = ThreePrimePlan::new(64).unwrap();
        let [p1, p2, p3] = plan.primes();
        let p123 = p1 as u128 * p2 as u128 * p3 as u128;
        let mut cases = 0;
        for _ in 0..512 {
            cases += 1;
            let x = (((rng.next_u64() as u128) << 64) | rng.next_u64() as u128) % p123;
            let r = bigmul::crt3(
                (x % p1 as u128) as u64,
                (x % p2 as u128) as u64,
                (x % p3 as u128) as u64,
                &plan,
            );
            if r != x {
                return (cases, Some(format!("x={x} got={r}")));
            }
        }
        (cases, None)
    });
    r.run("bigmul", "chunk-roundtrip", |rng| {
        let bits = 1 + rng.below(5000) as usize;
        let n = random_nat(bits, rng);
        let h = [8u32, 16, 24, 32, 40][rng.below(5) as usize];
        let chunks = n.to_chunks(h);
        if BigNat::from_chunks(&chunks, h) != n {
            return (1, Some(format!("bits={bits} h={h}")));
        }
        (chunks.len() as u64, None)
    });
    r.run("bigmul", "commutative-distributive", |rng| {
        let a = random_nat(1 + rng.below(6000) as usize, rng);
        let b = random_nat(1 + rng.below(6000) as usize, rng);
        let c = random_nat(1 + rng.below(6000) as usize, rng);
        if bigmul::int_mul(&a, &b).unwrap() != bigmul::int_mul(&b, &a).unwrap() {
            return (1, Some("commutativity".into()));
        }
        let left = bigmul::int_mul(&a, &b.add(&c)).unwrap();
        let right = bigmul::int_mul(&a, &b)
            .unwrap()
            .add(&bigmul::int_mul(&a, &c).unwrap());
        if left != right {
            return (2, Some("distributivity".into()));
        }
        (2, None)
    });
    r.run("bigmul", "matrix-vs-naive", |rng| {
        let n = 1 + rng.below(3) as usize;
        let bits = 1 + rng.below(2048) as usize;
        let mk = |rng: &mut SplitMix64| {
            IntMatrix::new(n, n, (0..n * n).map(|_| random_nat(bits, rng)).collect()).unwrap()
        };
        let a = mk(rng);
        let b = mk(rng);
        let got = bigmul::int_mat_mul(&a, &b).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut want = BigNat::zero();
                for k in 0..n {
                    want = want.add(&bigmul::int_mul_schoolbook(a.entry(i, k), b.entry(k, j)));
                }
                if got.entry(i, j) != &want {
                    return (1, Some(format!("n={n} bits={bits} entry=({i},{j})")));
                }
            }
        }
        ((n * n) as u64, None)
    });
}

fn random_nat(bits: usize, rng: &mut SplitMix64) -> BigNat {
    if bits == 0 {
        return BigNat::zero();
    }
    let mut limbs = vec![0u64; bits.div_ceil(64)];
    for l in limbs.iter_mut() {
        *l = rng.next_u64();
    }
    let top = bits % 64;
    let last = limbs.len() - 1;
    if top > 0 {
        limbs[last] &= (1u64 << top) - 1;
        limbs[last] |= 1u64 << (top - 1);
    } else {
        limbs[last] |= 1u64 << 63;
    }
    BigNat::from_limbs(limbs)
}
