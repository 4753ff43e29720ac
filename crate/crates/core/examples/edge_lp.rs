//! The edge-minimisation LP: the primal distribution, the dual ensemble, and
//! the value as columns arrive one at a time.
//!
//! cargo run --example edge_lp
use marginforge::{edges, solve_edge_min, GainMatrix};

fn main() -> marginforge::Result<()> {
    let columns = vec![
        vec![1.0, 1.0, -1.0, 1.0, -1.0],
        vec![-1.0, 1.0, 1.0, 1.0, 1.0],
        vec![1.0, -1.0, 1.0, -1.0, 1.0],
        vec![1.0, 1.0, 1.0, -1.0, -1.0],
    ];
    let nu = 2.0;
    let mut a = GainMatrix::new(5);
    for (j, col) in columns.into_iter().enumerate() {
        a.push(col, j)?;
        let sol = solve_edge_min(&a, nu)?;
        let e = edges(&a, &sol.d)?;
        println!("t = {}: γ = {:.6}  ρ = {:.6}", j + 1, sol.gamma, sol.rho);
        println!("  d = {:.3?}", sol.d.as_slice());
        println!("  w = {:?}", sol.w.iter().map(|(j, v)| format!("{j}:{v:.3}")).collect::<Vec<_>>());
        println!("  edges under d = {:.3?}", e);
    }
    Ok(())
}
