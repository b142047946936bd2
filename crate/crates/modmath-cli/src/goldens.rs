//! Golden kernel vectors: one case per line,
//!
//! ```text
//! <op> <p-hex> <m> <x-hex> <y-hex> -> <z-hex>
//! ```
//!
//! with `#` comments. Values are computed at the smallest word width whose
//! bit count covers m; Montgomery cases use shift m = word width. Dumping is
//! deterministic, so verify over a dumped file always passes on the same
//! build.

use modmath::scalar::{
    self, BarrettContext, FixedMultiplicand, FloatContext, MontgomeryContext, Profile,
};
use modmath::selftest::SplitMix64;
use modmath::word::{bit_size, Uint};
use std::fmt::Write as _;
use std::process::ExitCode;

const OPS: [&str; 6] = [
    "add_mod",
    "sub_mod",
    "mul_mod",
    "mul_mod_fixed",
    "mont_mul",
    "mul_mod_fma",
];

fn width_for(m: u32) -> u32 {
    match m {
        0..=8 => 8,
        9..=16 => 16,
        17..=32 => 32,
        _ => 64,
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

/// Computes one golden case; x and y are residues below p.
fn eval_case(op: &str, p: u64, m: u32, x: u64, y: u64) -> Result<u64, String> {
    let n = width_for(m);
    macro_rules! with_width {
        ($w:ty) => {{
            let pw = <$w>::from_u64(p);
            let xw = <$w>::from_u64(x);
            let yw = <$w>::from_u64(y);
            let ctx = BarrettContext::<$w>::new(pw, profile_for(m, <$w>::BITS))
                .map_err(|e| e.to_string())?;
            match op {
                "add_mod" => Ok(scalar::add_mod(xw, yw, &ctx).to_u64()),
                "sub_mod" => Ok(scalar::sub_mod(xw, yw, &ctx).to_u64()),
                "mul_mod" => Ok(scalar::mul_mod(xw, yw, &ctx).to_u64()),
                "mul_mod_fixed" => {
                    let fm = FixedMultiplicand::new(yw, &ctx);
                    Ok(scalar::mul_mod_fixed(xw, &fm, &ctx).to_u64())
                }
                "mont_mul" => {
                    let mctx =
                        MontgomeryContext::<$w>::new(pw, <$w>::BITS).map_err(|e| e.to_string())?;
                    Ok(scalar::mont_mul(xw, yw, &mctx).to_u64())
                }
                "mul_mod_fma" => {
                    if m > 50 {
                        return Err("mul_mod_fma limited to m <= 50".into());
                    }
                    let fc = FloatContext::<f64>::new(p).map_err(|e| e.to_string())?;
                    Ok(scalar::mul_mod_fma(x as f64, y as f64, &fc) as u64)
                }
                other => Err(format!("unknown op '{other}'")),
            }
        }};
    }
    match n {
        8 => with_width!(u8),
        16 => with_width!(u16),
        32 => with_width!(u32),
        _ => with_width!(u64),
    }
}

fn hex_digits(n: u32) -> usize {
    (n / 4) as usize
}

/// Deterministic corpus: a fixed modulus list per width, edge residues plus
/// seeded samples for every op that accepts the modulus.
fn render() -> String {
    let mut out = String::new();
    out.push_str("# golden kernel vectors\n");
    out.push_str("# <op> <p-hex> <m> <x-hex> <y-hex> -> <z-hex>\n");
    out.push_str("# width: smallest of 8/16/32/64 bits covering m; montgomery shift = width\n");
    let moduli: [u64; 10] = [
        7,
        251,
        256 - 5,
        65521,
        40961,
        469762049,
        998244353,
        (1 << 31) - 1,
        (1 << 50) - 27,
        u64::MAX - 58,
    ];
    let mut rng = SplitMix64::new(0x601d);
    for p in moduli {
        let m = bit_size(p);
        let digits = hex_digits(width_for(m));
        for op in OPS {
            if op == "mont_mul" && p & 1 == 0 {
                continue;
            }
            if op == "mul_mod_fma" && m > 50 {
                continue;
            }
            let mut cases: Vec<(u64, u64)> = vec![(0, 0), (p - 1, p - 1), (1, p - 1)];
            for _ in 0..5 {
                cases.push((rng.below(p), rng.below(p)));
            }
            for (x, y) in cases {
                let z = eval_case(op, p, m, x, y).expect("dump corpus is valid");
                let _ = writeln!(
                    out,
                    "{op} {p:0>digits$x} {m} {x:0>digits$x} {y:0>digits$x} -> {z:0>digits$x}",
                );
            }
        }
    }
    out
}

pub fn dump(path: &str) -> ExitCode {
    let body = render();
    match std::fs::write(path, &body) {
        Ok(()) => {
            eprintln!(
                "wrote {} cases to {path}",
                body.lines()
                    .filter(|l| !l.starts_with('#') && !l.is_empty())
                    .count()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("goldens: cannot write {path}: {e}");
            ExitCode::FAILURE
        }
    }
}

struct ParsedLine {
    op: String,
    p: u64,
    m: u32,
    x: u64,
    y: u64,
    z: u64,
}

fn parse_line(line: &str, lineno: usize) -> Result<Option<ParsedLine>, String> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let mut parts = line.split_whitespace();
    let mut next = |what: &str| {
        parts
            .next()
            .ok_or_else(|| format!("line {lineno}: missing {what}"))
    };
    let op = next("op")?.to_string();
    let p = u64::from_str_radix(next("p")?, 16).map_err(|_| format!("line {lineno}: bad p hex"))?;
    let m: u32 = next("m")?
        .parse()
        .map_err(|_| format!("line {lineno}: bad m"))?;
    let x = u64::from_str_radix(next("x")?, 16).map_err(|_| format!("line {lineno}: bad x hex"))?;
    let y = u64::from_str_radix(next("y")?, 16).map_err(|_| format!("line {lineno}: bad y hex"))?;
    let arrow = next("->")?;
    if arrow != "->" {
        return Err(format!("line {lineno}: expected '->', found '{arrow}'"));
    }
    let z = u64::from_str_radix(next("z")?, 16).map_err(|_| format!("line {lineno}: bad z hex"))?;
    if parts.next().is_some() {
        return Err(format!("line {lineno}: trailing tokens"));
    }
    Ok(Some(ParsedLine { op, p, m, x, y, z }))
}

pub fn verify(path: &str) -> ExitCode {
    let body = match std::fs::read_to_string(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("goldens: cannot read {path}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut checked = 0u64;
    let mut mismatches: Vec<String> = Vec::new();
    for (i, raw) in body.lines().enumerate() {
        let lineno = i + 1;
        let parsed = match parse_line(raw, lineno) {
            Ok(None) => continue,
            Ok(Some(p)) => p,
            Err(e) => {
                eprintln!("goldens: parse error: {e}");
                return ExitCode::FAILURE;
            }
        };
        checked += 1;
        match eval_case(parsed.op.as_str(), parsed.p, parsed.m, parsed.x, parsed.y) {
            Ok(z) if z == parsed.z => {}
            Ok(z) => {
                if mismatches.len() < 10 {
                    mismatches.push(format!(
                        "line {lineno}: {} p={:x} x={:x} y={:x}: file says {:x}, computed {z:x}",
                        parsed.op, parsed.p, parsed.x, parsed.y, parsed.z
                    ));
                }
            }
            Err(e) => {
                eprintln!("goldens: line {lineno}: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    if mismatches.is_empty() {
        eprintln!("goldens: {checked} cases verified");
        ExitCode::SUCCESS
    } else {
        for m in &mismatches {
            eprintln!("goldens: MISMATCH {m}");
        }
        eprintln!("goldens: verification failed");
        ExitCode::FAILURE
    }
}
