//! Every booster on one two-Gaussian dataset against the exact LP optimum.
//!
//! cargo run --release --example compare_boosters -- [m] [eps] [nu_frac]
use std::time::Instant;

use marginforge::cli::oracle_rho_star;
use marginforge::synth::two_gaussians;
use marginforge::{Algorithm, BoosterConfig, StumpLearner};

fn main() -> marginforge::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(200);
    let eps: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let nu_frac: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let data = two_gaussians(m, 5, 1.0, 42);
    let nu = (nu_frac * m as f64).max(1.0);

    let start = Instant::now();
    let (rho_star, support) = oracle_rho_star(&data, nu)?;
    println!(
        "oracle: rho* = {:.6} on {} stumps ({:.2}s)",
        rho_star,
        support,
        start.elapsed().as_secs_f64()
    );

    let learner = StumpLearner::new(&data);
    let config = BoosterConfig::new(eps, nu);
    println!("{:<14}{:>8}{:>14}{:>12}{:>10}", "algorithm", "iters", "soft margin", "gap", "seconds");
    for algo in Algorithm::ALL {
        let start = Instant::now();
        let out = algo.run(&learner, &config)?;
        println!(
            "{:<14}{:>8}{:>14.6}{:>12.2e}{:>10.2}",
            algo.name(),
            out.iterations(),
            out.model.soft_margin,
            rho_star - out.model.soft_margin,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
