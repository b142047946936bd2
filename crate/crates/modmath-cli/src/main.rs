//! Command-line harness: throughput benchmarks shaped like the kernel
//! grids, differential self-tests, and golden-vector management.
//!
//! CSV goes to stdout, human-readable tables and logs to stderr; the exit
//! code is 0 on success and 1 on any failure.

mod bench;
mod goldens;

use clap::{Parser, Subcommand, ValueEnum};
use modmath::selftest::{run_selftest, Scope};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "modmath", version, about = "modular arithmetic kernel harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum TableKind {
    /// add/sub grids over lane width and modulus bound
    ModSum,
    /// Barrett product grids
    ModMul,
    /// fixed-multiplicand product grids
    ModMulFixed,
    /// Montgomery product grids
    Montgomery,
    /// binary32/binary64 sum and product grids
    Float,
    /// transform timings over a size range
    Fft,
    /// vectorized vs scalar ratios over the product/sum grids
    Speedup,
}

#[derive(Subcommand)]
enum Command {
    /// Measure kernel throughput on 4096-byte aligned buffers.
    Bench {
        /// single kernel: add_mod, vadd_mod, sub_mod, vsub_mod, mul_mod,
        /// vmul_mod, mul_mod_fixed, vmul_mod_fixed, mont_mul, vmont_mul,
        /// mul_mod_fma, vmul_mod_fma, fft
        #[arg(long)]
        op: Option<String>,
        /// emit a whole grid instead of one row
        #[arg(long, value_enum)]
        table: Option<TableKind>,
        /// lane scalar width in bits (8/16/32/64)
        #[arg(long, default_value_t = 32)]
        lanes: u32,
        /// declared modulus bit bound
        #[arg(long, default_value_t = 31)]
        m: u32,
        /// reduction strategy: barrett, barrett_half, fixed, montgomery,
        /// float_fma, scalar_naive
        #[arg(long, default_value = "barrett")]
        strategy: String,
        /// buffer length in elements (default fills 4096 bytes)
        #[arg(long)]
        len: Option<usize>,
        /// measurement repetitions
        #[arg(long, default_value_t = 31)]
        reps: usize,
        /// transform modulus for --op fft
        #[arg(long, default_value_t = 469762049)]
        p: u64,
        /// size range for --op fft, e.g. 2^8..2^20
        #[arg(long, default_value = "2^8..2^16")]
        sizes: String,
    },
    /// Run the differential oracle/property suites.
    Selftest {
        /// modcore, modsimd, ntt, polymul, bigmul, or all
        #[arg(long, default_value = "all")]
        scope: String,
        /// total time budget in seconds
        #[arg(long, default_value_t = 20)]
        budget: u64,
        /// seed for the randomized sweeps
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Dump or verify golden kernel vectors.
    Goldens {
        /// dump or verify
        mode: String,
        /// golden file path
        path: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Bench {
            op,
            table,
            lanes,
            m,
            strategy,
            len,
            reps,
            p,
            sizes,
        } => bench::run(bench::Request {
            op,
            table,
            lanes,
            m,
            strategy,
            len,
            reps,
            p,
            sizes,
        }),
        Command::Selftest {
            scope,
            budget,
            seed,
        } => {
            let Some(scope) = Scope::parse(&scope) else {
                eprintln!(
                    "unknown scope '{scope}' (expected modcore|modsimd|ntt|polymul|bigmul|all)"
                );
                return ExitCode::FAILURE;
            };
            let reports = run_selftest(scope, Duration::from_secs(budget), seed);
            let mut failed = 0u32;
            for r in &reports {
                if r.passed() {
                    eprintln!("ok   {}/{} ({} cases)", r.scope, r.name, r.samples);
                } else {
                    failed += 1;
                    eprintln!(
                        "FAIL {}/{} ({} cases, {} failures)",
                        r.scope, r.name, r.samples, r.failures
                    );
                    for ce in &r.counterexamples {
                        eprintln!("     counterexample: {ce}");
                    }
                }
            }
            eprintln!("selftest: {} properties, {} failed", reports.len(), failed);
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Goldens { mode, path } => match mode.as_str() {
            "dump" => goldens::dump(&path),
            "verify" => goldens::verify(&path),
            _ => {
                eprintln!("unknown mode '{mode}' (expected dump|verify)");
                ExitCode::FAILURE
            }
        },
    }
}
