//! A small (algorithm × ν) sweep through the library entry point the `bench`
//! command uses, printed as CSV.
//!
//! cargo run --release --example bench_sweep
use clap::Parser;
use marginforge::cli::{run_bench, BenchArgs, BENCH_HEADER};
use marginforge::synth::two_gaussians;

#[derive(Parser)]
struct Wrapper {
    #[command(flatten)]
    bench: BenchArgs,
}

fn main() -> marginforge::Result<()> {
    let data = two_gaussians(150, 4, 1.0, 21);
    let args = Wrapper::parse_from([
        "bench_sweep",
        "--data",
        "unused.csv",
        "--algo",
        "lpboost,erlpboost,mlpb-ss,mlpb-pfw",
        "--nu-frac",
        "0.1,0.3,0.5",
        "--eps",
        "0.02",
    ])
    .bench;
    println!("{BENCH_HEADER}");
    for row in run_bench(&data, &args)? {
        println!("{}", row.to_csv_line());
    }
    Ok(())
}
