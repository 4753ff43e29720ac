//! Train on one sample, save the model, reload it and score a held-out sample.
//!
//! cargo run --example train_and_predict -- [algo]
use marginforge::io::{load_model, save_model};
use marginforge::synth::noisy_two_gaussians;
use marginforge::{Algorithm, BoosterConfig, StumpLearner};

fn main() -> marginforge::Result<()> {
    let algo: Algorithm = std::env::args().nth(1).as_deref().unwrap_or("mlpb-pfw").parse()?;
    let train = noisy_two_gaussians(300, 5, 2.0, 0.05, 10);
    let test = noisy_two_gaussians(1000, 5, 2.0, 0.05, 11);

    let learner = StumpLearner::new(&train);
    let out = algo.run(&learner, &BoosterConfig::new(0.01, 0.1 * train.len() as f64))?;
    println!(
        "{}: {} rounds, {} stumps, soft margin {:.5}, converged {}",
        algo,
        out.iterations(),
        out.model.hypotheses.len(),
        out.model.soft_margin,
        out.converged
    );

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("model.json");
    save_model(&path, &out.model)?;
    let model = load_model(&path)?;
    let wrong = (0..test.len()).filter(|&i| model.predict(test.row(i)).unwrap() != test.label(i)).count();
    println!("held-out error {:.4} on {} rows", wrong as f64 / test.len() as f64, test.len());
    Ok(())
}
