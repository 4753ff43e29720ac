//! One step of each Frank-Wolfe rule from the same point, scored by the
//! smoothed objective it reaches.
//!
//! cargo run --example fw_rules
use marginforge::booster::smoothed_objective;
use marginforge::synth::two_gaussians;
use marginforge::{
    capped_entropy_projection, margins, CapParams, Distribution, EnsembleWeights, FwRule, GainMatrix, StumpLearner, WeakLearner,
};

fn main() -> marginforge::Result<()> {
    let data = two_gaussians(60, 3, 1.0, 3);
    let learner = StumpLearner::new(&data);
    let params = CapParams::new(data.len(), 6.0, 0.1)?;

    let mut a = GainMatrix::new(data.len());
    let first = learner.best_response(&Distribution::uniform(data.len()))?;
    let (j0, _) = a.push(first.column, first.hypothesis)?;
    let mut w = EnsembleWeights::point_mass(j0);
    // a few short steps first, so w has several columns to take mass from
    for t in 1..=4 {
        let d = capped_entropy_projection(&margins(&a, &w)?, &params)?.d;
        let r = learner.best_response(&d)?;
        let (j, _) = a.push(r.column, r.hypothesis)?;
        w = FwRule::ShortStep.step(t, &a, &w, j, &d, &params)?.new_w;
    }
    let d = capped_entropy_projection(&margins(&a, &w)?, &params)?.d;
    let r = learner.best_response(&d)?;
    let (j, _) = a.push(r.column, r.hypothesis)?;

    println!("start: f̃* = {:.6}", smoothed_objective(&a, &w, &params)?);
    for rule in [FwRule::Classic, FwRule::ShortStep, FwRule::LineSearch, FwRule::Pairwise] {
        let step = rule.step(5, &a, &w, j, &d, &params)?;
        println!(
            "{:<11} λ = {:.4} (max {:.4})  f̃* = {:.6}  good = {}",
            format!("{rule:?}"),
            step.lambda,
            step.lambda_max,
            smoothed_objective(&a, &step.new_w, &params)?,
            step.good_step
        );
    }
    Ok(())
}
