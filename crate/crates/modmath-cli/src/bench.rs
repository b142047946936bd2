//! Throughput measurement: each kernel runs over 4096-byte aligned
//! buffers, writing into the first buffer, with a warmup pass before
//! timing. Mean and median ns/element go to the CSV on stdout; the table on
//! stderr adds a cycles-per-element estimate derived from a measured clock
//! ratio.

use crate::TableKind;
use modmath::lanes::{self, AlignedBuf};
use modmath::ntt::{self, TftPlan};
use modmath::scalar::{
    self, BarrettContext, BarrettHalfContext, FixedMultiplicand, FloatContext, MontgomeryContext,
    Profile,
};
use modmath::selftest::SplitMix64;
use modmath::word::{bit_size, Uint, Word};
use std::hint::black_box;
use std::process::ExitCode;
use std::time::Instant;

pub struct Request {
    pub op: Option<String>,
    pub table: Option<TableKind>,
    pub lanes: u32,
    pub m: u32,
    pub strategy: String,
    pub len: Option<usize>,
    pub reps: usize,
    pub p: u64,
    pub sizes: String,
}

struct Row {
    op: String,
    strategy: String,
    lane_bits: u32,
    m: u32,
    len: usize,
    mean_ns: f64,
    median_ns: f64,
    spread_pct: u64,
}

/// Estimated clock ratio (cycles per nanosecond) from a dependent
/// xor-add chain (two single-cycle ops per iteration). Rough by nature;
/// the cycles column it feeds is informational.
fn measure_cycles_per_ns() -> f64 {
    let n = 200_000_000u64;
    let mut x = 0u64;
    let t = Instant::now();
    for i in 0..n {
        x = x.wrapping_add(i ^ x);
    }
    black_box(x);
    let ns = t.elapsed().as_nanos() as f64;
    2.0 * n as f64 / ns
}

/// Times one closure invocation `reps` times after a warmup, scaling an
/// inner repeat count so each sample is long enough to trust the clock.
fn measure<F: FnMut()>(reps: usize, mut f: F) -> (f64, f64, u64) {
    f();
    let probe = Instant::now();
    f();
    let single = probe.elapsed().as_nanos().max(1) as u64;
    let inner = (200_000 / single).clamp(1, 10_000);
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t = Instant::now();
        for _ in 0..inner {
            f();
        }
        samples.push(t.elapsed().as_nanos() as f64 / inner as f64);
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = samples[samples.len() / 2];
    let spread = (samples[samples.len() - 1] - samples[0]) / mean * 100.0;
    (mean, median, spread as u64)
}

fn modulus_for(m: u32) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

fn profile_for(m: u32, n: u32) -> Profile {
    if m <= n - 2 {
        Profile::Minus2
    } else if m == n - 1 {
        Profile::Minus1
    } else {
        Profile::Full
    }
}

fn fill_residues<W: Word>(buf: &mut [W], p: u64, rng: &mut SplitMix64) {
    for v in buf.iter_mut() {
        *v = W::from_u64(rng.below(p));
    }
}

/// One integer-kernel measurement; `op` names both the kernel family and
/// whether the lane version runs (v prefix).
fn bench_int_kernel<W: Word>(
    op: &str,
    strategy: &str,
    m: u32,
    len: usize,
    reps: usize,
) -> Result<Row, String> {
    let n = W::BITS;
    if m < 2 || m > n {
        return Err(format!("m={m} outside 2..={n} for {n}-bit lanes"));
    }
    let p = modulus_for(m);
    let profile = profile_for(m, n);
    let ctx =
        BarrettContext::<W>::new(W::from_u64(p), profile).map_err(|e| format!("context: {e}"))?;
    let mut rng = SplitMix64::new(0xbe9c ^ ((m as u64) << 8) ^ n as u64);
    let mut dst = AlignedBuf::<W>::new(len);
    let mut xs = AlignedBuf::<W>::new(len);
    let mut ys = AlignedBuf::<W>::new(len);
    fill_residues(xs.as_mut_slice(), p, &mut rng);
    fill_residues(ys.as_mut_slice(), p, &mut rng);
    dst.as_mut_slice().copy_from_slice(xs.as_slice());

    let (mean, median, spread) = match (op, strategy) {
        ("add_mod", _) => measure(reps, || {
            let d = black_box(dst.as_mut_slice());
            let y = black_box(ys.as_slice());
            for i in 0..d.len() {
                d[i] = scalar::add_mod(d[i], y[i], &ctx);
            }
        }),
        ("vadd_mod", _) => measure(reps, || {
            let (d, x, y) = (dst.as_mut_slice(), xs.as_slice(), ys.as_slice());
            lanes::vadd_mod_slice(black_box(d), black_box(x), black_box(y), &ctx);
        }),
        ("sub_mod", _) => measure(reps, || {
            let d = black_box(dst.as_mut_slice());
            let y = black_box(ys.as_slice());
            for i in 0..d.len() {
                d[i] = scalar::sub_mod(d[i], y[i], &ctx);
            }
        }),
        ("vsub_mod", _) => measure(reps, || {
            let (d, x, y) = (dst.as_mut_slice(), xs.as_slice(), ys.as_slice());
            lanes::vsub_mod_slice(black_box(d), black_box(x), black_box(y), &ctx);
        }),
        ("mul_mod", "scalar_naive") => measure(reps, || {
            let d = black_box(dst.as_mut_slice());
            let y = black_box(ys.as_slice());
            let pw = W::from_u64(p);
            for i in 0..d.len() {
                d[i] = W::from_wide(d[i].to_wide().wrapping_mul(y[i].to_wide()) % pw.to_wide());
            }
        }),
        ("mul_mod", "barrett_half") => {
            let half = BarrettHalfContext::<W>::new(W::from_u64(p))
                .map_err(|_| format!("barrett_half needs m <= {}", (n - 1) / 2))?;
            // x*y fits the word when p is half-width
            measure(reps, || {
                let d = black_box(dst.as_mut_slice());
                let y = black_box(ys.as_slice());
                for i in 0..d.len() {
                    d[i] = scalar::barrett_reduce_half(d[i].wrapping_mul(y[i]), &half);
                }
            })
        }
        ("mul_mod", "montgomery") => {
            if p & 1 == 0 {
                return Err("montgomery needs an odd modulus".into());
            }
            let mctx = MontgomeryContext::<W>::new(W::from_u64(p), m)
                .map_err(|e| format!("context: {e}"))?;
            measure(reps, || {
                let d = black_box(dst.as_mut_slice());
                let y = black_box(ys.as_slice());
                for i in 0..d.len() {
                    d[i] = scalar::mont_mul(d[i], y[i], &mctx);
                }
            })
        }
        ("mul_mod", _) => measure(reps, || {
            let d = black_box(dst.as_mut_slice());
            let y = black_box(ys.as_slice());
            for i in 0..d.len() {
                d[i] = scalar::mul_mod(d[i], y[i], &ctx);
            }
        }),
        ("vmul_mod", _) => measure(reps, || {
            let (d, x, y) = (dst.as_mut_slice(), xs.as_slice(), ys.as_slice());
            lanes::vmul_mod_barrett_slice(black_box(d), black_box(x), black_box(y), &ctx);
        }),
        ("mul_mod_fixed", _) => {
            let fm = FixedMultiplicand::new(ys.as_slice()[0], &ctx);
            measure(reps, || {
                let d = black_box(dst.as_mut_slice());
                for v in d.iter_mut() {
                    *v = scalar::mul_mod_fixed(*v, &fm, &ctx);
                }
            })
        }
        ("vmul_mod_fixed", _) => {
            let fm = FixedMultiplicand::new(ys.as_slice()[0], &ctx);
            measure(reps, || {
                let (d, x) = (dst.as_mut_slice(), xs.as_slice());
                lanes::vmul_mod_fixed_slice(black_box(d), black_box(x), &fm, &ctx);
            })
        }
        ("mont_mul", _) | ("vmont_mul", _) => {
            if p & 1 == 0 {
                return Err("montgomery needs an odd modulus".into());
            }
            let mctx = MontgomeryContext::<W>::new(W::from_u64(p), m)
                .map_err(|e| format!("context: {e}"))?;
            if op == "mont_mul" {
                measure(reps, || {
                    let d = black_box(dst.as_mut_slice());
                    let y = black_box(ys.as_slice());
                    for i in 0..d.len() {
                        d[i] = scalar::mont_mul(d[i], y[i], &mctx);
                    }
                })
            } else {
                measure(reps, || {
                    let (d, x, y) = (dst.as_mut_slice(), xs.as_slice(), ys.as_slice());
                    lanes::vmont_mul_slice(black_box(d), black_box(x), black_box(y), &mctx);
                })
            }
        }
        _ => return Err(format!("unknown op/strategy combination {op}/{strategy}")),
    };
    Ok(Row {
        op: op.to_string(),
        strategy: strategy.to_string(),
        lane_bits: n,
        m,
        len,
        mean_ns: mean / len as f64,
        median_ns: median / len as f64,
        spread_pct: spread,
    })
}

fn bench_float_kernel(op: &str, m: u32, len: usize, reps: usize) -> Result<Row, String> {
    let (lane_bits, strategy) = (64u32, "float_fma");
    if m > 50 {
        return Err("float m must be at most 50 (binary64)".into());
    }
    let p = modulus_for(m);
    let ctx = FloatContext::<f64>::new(p).map_err(|e| format!("context: {e}"))?;
    let mut rng = SplitMix64::new(0xf10a7 ^ m as u64);
    let mut dst = vec![0.0f64; len];
    let mut xs = vec![0.0f64; len];
    let mut ys = vec![0.0f64; len];
    for i in 0..len {
        xs[i] = rng.below(p) as f64;
        ys[i] = rng.below(p) as f64;
        dst[i] = xs[i];
    }
    let pf = p as f64;
    let (mean, median, spread) = match op {
        "add_mod_fma" => measure(reps, || {
            let d = black_box(&mut dst[..]);
            let y = black_box(&ys[..]);
            for i in 0..d.len() {
                let a = d[i] + y[i];
                d[i] = if a >= pf { a - pf } else { a };
            }
        }),
        "vadd_mod_fma" => measure(reps, || {
            let d = black_box(&mut dst[..]);
            let y = black_box(&ys[..]);
            let mut i = 0;
            while i + lanes::LANES_F64 <= d.len() {
                let xa: &[f64; lanes::LANES_F64] = d[i..i + lanes::LANES_F64].try_into().unwrap();
                let ya: &[f64; lanes::LANES_F64] = y[i..i + lanes::LANES_F64].try_into().unwrap();
                let out = lanes::vadd_mod_f64(xa, ya, &ctx);
                d[i..i + lanes::LANES_F64].copy_from_slice(&out);
                i += lanes::LANES_F64;
            }
        }),
        "mul_mod_fma" => measure(reps, || {
            let d = black_box(&mut dst[..]);
            let y = black_box(&ys[..]);
            for i in 0..d.len() {
                d[i] = scalar::mul_mod_fma(d[i], y[i], &ctx);
            }
        }),
        "vmul_mod_fma" => measure(reps, || {
            let d = black_box(&mut dst[..]);
            let x = black_box(&xs[..]);
            let y = black_box(&ys[..]);
            lanes::vmul_mod_fma_slice(d, x, y, &ctx);
        }),
        _ => return Err(format!("unknown float op {op}")),
    };
    Ok(Row {
        op: op.to_string(),
        strategy: strategy.to_string(),
        lane_bits,
        m,
        len,
        mean_ns: mean / len as f64,
        median_ns: median / len as f64,
        spread_pct: spread,
    })
}

fn bench_f32_kernel(op: &str, m: u32, len: usize, reps: usize) -> Result<Row, String> {
    if m > 21 {
        return Err("binary32 m must be at most 21".into());
    }
    let p = modulus_for(m);
    let ctx = FloatContext::<f32>::new(p).map_err(|e| format!("context: {e}"))?;
    let mut rng = SplitMix64::new(0xf32 ^ m as u64);
    let mut dst = vec![0.0f32; len];
    let mut ys = vec![0.0f32; len];
    for i in 0..len {
        dst[i] = rng.below(p) as f32;
        ys[i] = rng.below(p) as f32;
    }
    let pf = p as f32;
    let (mean, median, spread) = match op {
        "add_mod_fma" => measure(reps, || {
            let d = black_box(&mut dst[..]);
            let y = black_box(&ys[..]);
            for i in 0..d.len() {
                let a = d[i] + y[i];
                d[i] = if a >= pf { a - pf } else { a };
            }
        }),
        "mul_mod_fma" => measure(reps, || {
            let d = black_box(&mut dst[..]);
            let y = black_box(&ys[..]);
            for i in 0..d.len() {
                d[i] = scalar::mul_mod_fma(d[i], y[i], &ctx);
            }
        }),
        _ => return Err(format!("unknown f32 op {op}")),
    };
    Ok(Row {
        op: op.to_string(),
        strategy: "float_fma".to_string(),
        lane_bits: 32,
        m,
        len,
        mean_ns: mean / len as f64,
        median_ns: median / len as f64,
        spread_pct: spread,
    })
}

fn bench_fft(p: u64, sizes: &str, reps: usize) -> Result<Vec<Row>, String> {
    let (lo, hi) = parse_sizes(sizes)?;
    let mut rows = Vec::new();
    let mut rng = SplitMix64::new(0xff7);
    for k in lo..=hi {
        let plan = TftPlan::new(p, k).map_err(|e| format!("plan k={k}: {e}"))?;
        let n = plan.size();
        let coeffs: Vec<u64> = (0..n).map(|_| rng.below(p)).collect();
        let (mean, median, spread) = measure(reps.min(9), || {
            let ev = ntt::tft(&plan, black_box(&coeffs), n).unwrap();
            black_box(ev.values.len());
        });
        rows.push(Row {
            op: "fft".to_string(),
            strategy: "barrett".to_string(),
            lane_bits: 64,
            m: bit_size(p),
            len: n,
            mean_ns: mean / n as f64,
            median_ns: median / n as f64,
            spread_pct: spread,
        });
    }
    Ok(rows)
}

fn parse_sizes(s: &str) -> Result<(u32, u32), String> {
    let parse_one = |t: &str| -> Result<u32, String> {
        let t = t.trim();
        if let Some(stripped) = t.strip_prefix("2^") {
            stripped.parse().map_err(|_| format!("bad size '{t}'"))
        } else {
            let v: u64 = t.parse().map_err(|_| format!("bad size '{t}'"))?;
            if !v.is_power_of_two() {
                return Err(format!("size {v} is not a power of two"));
            }
            Ok(v.trailing_zeros())
        }
    };
    match s.split_once("..") {
        Some((a, b)) => Ok((parse_one(a)?, parse_one(b)?)),
        None => {
            let k = parse_one(s)?;
            Ok((k, k))
        }
    }
}

fn default_len(lane_bits: u32) -> usize {
    4096 / (lane_bits as usize / 8)
}

fn dispatch(
    op: &str,
    strategy: &str,
    lane_bits: u32,
    m: u32,
    len: Option<usize>,
    reps: usize,
) -> Result<Row, String> {
    let float_op = op.ends_with("_fma");
    let len = len.unwrap_or_else(|| default_len(if float_op { 64 } else { lane_bits }));
    if float_op {
        return if lane_bits == 32 {
            bench_f32_kernel(op, m, len, reps)
        } else {
            bench_float_kernel(op, m, len, reps)
        };
    }
    match lane_bits {
        8 => bench_int_kernel::<u8>(op, strategy, m, len, reps),
        16 => bench_int_kernel::<u16>(op, strategy, m, len, reps),
        32 => bench_int_kernel::<u32>(op, strategy, m, len, reps),
        64 => bench_int_kernel::<u64>(op, strategy, m, len, reps),
        other => Err(format!("unsupported lane width {other}")),
    }
}

fn emit(rows: &[Row], cycles_per_ns: f64) {
    println!("op,strategy,lane_bits,m,len,ns_per_elem_mean,ns_per_elem_median");
    for r in rows {
        println!(
            "{},{},{},{},{},{:.4},{:.4}",
            r.op, r.strategy, r.lane_bits, r.m, r.len, r.mean_ns, r.median_ns
        );
    }
    eprintln!(
        "{:<16} {:<13} {:>5} {:>4} {:>6} {:>12} {:>14} {:>10} {:>8}",
        "op", "strategy", "lanes", "m", "len", "ns/elem mean", "ns/elem median", "cyc/elem", "spread%"
    );
    for r in rows {
        if r.mean_ns <= 0.0 {
            eprintln!("warning: nonpositive timing for {}; clock too coarse", r.op);
        }
        eprintln!(
            "{:<16} {:<13} {:>5} {:>4} {:>6} {:>12.4} {:>14.4} {:>10.2} {:>8}",
            r.op,
            r.strategy,
            r.lane_bits,
            r.m,
            r.len,
            r.mean_ns,
            r.median_ns,
            r.median_ns * cycles_per_ns,
            r.spread_pct
        );
    }
}

fn grid(kind: TableKind, req: &Request) -> Result<Vec<Row>, String> {
    let reps = req.reps;
    let mut rows = Vec::new();
    match kind {
        TableKind::ModSum => {
            for bits in [8u32, 16, 32, 64] {
                for m in [bits - 1, bits] {
                    for op in ["add_mod", "vadd_mod"] {
                        rows.push(dispatch(op, "barrett", bits, m, req.len, reps)?);
                    }
                }
            }
        }
        TableKind::ModMul => {
            for bits in [8u32, 16, 32] {
                for m in [2, bits - 2, bits - 1, bits] {
                    rows.push(dispatch("mul_mod", "scalar_naive", bits, m, req.len, reps)?);
                    rows.push(dispatch("mul_mod", "barrett", bits, m, req.len, reps)?);
                    rows.push(dispatch("vmul_mod", "barrett", bits, m, req.len, reps)?);
                }
            }
            for m in [30u32, 62, 63, 64] {
                rows.push(dispatch("mul_mod", "barrett", 64, m, req.len, reps)?);
                rows.push(dispatch("vmul_mod", "barrett", 64, m, req.len, reps)?);
            }
        }
        TableKind::ModMulFixed => {
            for bits in [8u32, 16, 32, 64] {
                for m in [bits - 1, bits] {
                    for op in ["mul_mod_fixed", "vmul_mod_fixed"] {
                        rows.push(dispatch(op, "fixed", bits, m, req.len, reps)?);
                    }
                }
            }
        }
        TableKind::Montgomery => {
            for bits in [8u32, 16, 32, 64] {
                for m in [bits - 1, bits] {
                    for op in ["mont_mul", "vmont_mul"] {
                        rows.push(dispatch(op, "montgomery", bits, m, req.len, reps)?);
                    }
                }
            }
        }
        TableKind::Float => {
            for m in [11u32, 21] {
                rows.push(dispatch("add_mod_fma", "float_fma", 32, m, req.len, reps)?);
                rows.push(dispatch("mul_mod_fma", "float_fma", 32, m, req.len, reps)?);
            }
            for m in [25u32, 26, 50] {
                for op in ["add_mod_fma", "vadd_mod_fma", "mul_mod_fma", "vmul_mod_fma"] {
                    rows.push(dispatch(op, "float_fma", 64, m, req.len, reps)?);
                }
            }
        }
        TableKind::Fft => {
            rows.extend(bench_fft(req.p, &req.sizes, reps)?);
        }
        TableKind::Speedup => {
            // vectorized vs scalar ratio over the kernel grids; ratios are
            // logged, never asserted
            let pairs: &[(&str, &str, &str)] = &[
                ("add_mod", "vadd_mod", "barrett"),
                ("mul_mod", "vmul_mod", "barrett"),
                ("mul_mod_fixed", "vmul_mod_fixed", "fixed"),
                ("mont_mul", "vmont_mul", "montgomery"),
            ];
            println!("op,lane_bits,m,scalar_ns,vector_ns,speedup");
            eprintln!(
                "{:<16} {:>5} {:>4} {:>11} {:>11} {:>8}",
                "op", "lanes", "m", "scalar ns", "vector ns", "ratio"
            );
            for bits in [8u32, 16, 32, 64] {
                for m in [bits - 1, bits] {
                    for (sop, vop, strat) in pairs {
                        let s = dispatch(sop, strat, bits, m, req.len, reps)?;
                        let v = dispatch(vop, strat, bits, m, req.len, reps)?;
                        println!(
                            "{},{},{},{:.4},{:.4},{:.2}",
                            sop,
                            bits,
                            m,
                            s.median_ns,
                            v.median_ns,
                            s.median_ns / v.median_ns
                        );
                        eprintln!(
                            "{:<16} {:>5} {:>4} {:>11.4} {:>11.4} {:>8.2}",
                            sop,
                            bits,
                            m,
                            s.median_ns,
                            v.median_ns,
                            s.median_ns / v.median_ns
                        );
                    }
                }
            }
            // binary64 kernels
            for m in [25u32, 50] {
                for (sop, vop) in [
                    ("add_mod_fma", "vadd_mod_fma"),
                    ("mul_mod_fma", "vmul_mod_fma"),
                ] {
                    let s = dispatch(sop, "float_fma", 64, m, req.len, reps)?;
                    let v = dispatch(vop, "float_fma", 64, m, req.len, reps)?;
                    println!(
                        "{},{},{},{:.4},{:.4},{:.2}",
                        sop,
                        64,
                        m,
                        s.median_ns,
                        v.median_ns,
                        s.median_ns / v.median_ns
                    );
                    eprintln!(
                        "{:<16} {:>5} {:>4} {:>11.4} {:>11.4} {:>8.2}",
                        sop,
                        64,
                        m,
                        s.median_ns,
                        v.median_ns,
                        s.median_ns / v.median_ns
                    );
                }
            }
            return Ok(Vec::new());
        }
    }
    Ok(rows)
}

pub fn run(req: Request) -> ExitCode {
    let cycles_per_ns = measure_cycles_per_ns();
    eprintln!("clock ratio estimate: {cycles_per_ns:.2} cycles/ns");
    let result = if let Some(kind) = req.table {
        grid(kind, &req).map(|rows| {
            if !rows.is_empty() {
                emit(&rows, cycles_per_ns);
            }
        })
    } else if let Some(op) = req.op.clone() {
        if op == "fft" {
            bench_fft(req.p, &req.sizes, req.reps).map(|rows| emit(&rows, cycles_per_ns))
        } else {
            dispatch(&op, &req.strategy, req.lanes, req.m, req.len, req.reps)
                .map(|row| emit(&[row], cycles_per_ns))
        }
    } else {
        Err("pass --op or --table".to_string())
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("bench: {msg}");
            ExitCode::FAILURE
        }
    }
}
