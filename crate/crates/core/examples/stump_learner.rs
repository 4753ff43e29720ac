//! The decision-stump weak learner answering a skewed distribution.
//!
//! cargo run --example stump_learner
use marginforge::synth::noisy_two_gaussians;
use marginforge::{Distribution, StumpLearner, WeakLearner};

fn main() -> marginforge::Result<()> {
    let data = noisy_two_gaussians(100, 3, 1.2, 0.1, 1);
    let learner = StumpLearner::new(&data);
    println!("{} examples, {} distinct stumps", data.len(), learner.pool().len());

    let uniform = learner.best_response(&Distribution::uniform(data.len()))?;
    println!("uniform d: {:?} edge {:.4}", uniform.hypothesis, uniform.edge);

    // put all weight on the examples the first stump gets wrong
    let wrong: Vec<f64> = uniform.column.iter().map(|&g| if g < 0.0 { 1.0 } else { 0.0 }).collect();
    let n = wrong.iter().sum::<f64>();
    let d = Distribution::new(wrong.iter().map(|v| v / n).collect(), 1.0)?;
    let hard = learner.best_response(&d)?;
    println!("on its {} mistakes: {:?} edge {:.4}", n, hard.hypothesis, hard.edge);
    Ok(())
}
