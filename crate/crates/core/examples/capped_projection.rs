//! Entropy projection onto the capped simplex and how it tightens toward the
//! exact soft-margin distribution as η grows.
//!
//! cargo run --example capped_projection
use marginforge::{capped_entropy_projection, capped_min_linear, relative_entropy, CapParams};

fn main() -> marginforge::Result<()> {
    let theta = [0.9, -0.4, 0.1, -0.8, 0.3, -0.1];
    let nu = 2.5;
    let (exact, vertex) = capped_min_linear(&theta, nu)?;
    println!("exact:   min dᵀθ = {exact:.6}  d = {:.3?}", vertex.as_slice());
    for eta in [0.5, 5.0, 50.0, 500.0] {
        let p = CapParams::with_eta(theta.len(), nu, eta)?;
        let r = capped_entropy_projection(&theta, &p)?;
        println!(
            "η = {eta:>5}: objective {:.6}  capped {}  Δ(d) {:.4}  d = {:.3?}",
            r.objective,
            r.capped_count,
            relative_entropy(&r.d),
            r.d.as_slice()
        );
    }
    Ok(())
}
