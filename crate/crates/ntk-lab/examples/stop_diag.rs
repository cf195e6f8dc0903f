//! Scratch diagnostic: sizes of committed-loss increases on a corruption cell.

use ntk_lab::experiments::data::gen_parity3;
use ntk_lab::net::{default_eta, init_net, train_until, StoppingRule};
use ntk_lab::numerics::Rng;

fn stream(scenario: u64, a: u64, b: u64) -> u64 {
    (scenario << 48) | (a << 16) | b
}

fn main() -> ntk_lab::Result<()> {
    let (n, m, s) = (64usize, 256usize, 0u64);
    let train = gen_parity3(n, &mut Rng::derive(1, stream(9, 2, s)), 0.0)?;
    let mut net = init_net(m, 3, &mut Rng::derive(1, stream(9, 3, s)))?;
    let eta0 = default_eta(&net, &train.x)?;

    let traj = train_until(&mut net, &train, StoppingRule::LabelZero, eta0, 60_000, &[], None)?;
    println!(
        "eta0={eta0:.4} eta_end={:.4e} steps={} reason={:?} final_loss={:.6e}",
        traj.final_eta,
        traj.final_step().step_index,
        traj.stop_reason,
        traj.final_step().loss,
    );
    let mut count = 0;
    for w in traj.steps.windows(2) {
        if w[1].loss > w[0].loss {
            count += 1;
            if count <= 40 {
                println!(
                    "  step {}: rel increase {:.3e} (loss {:.6e})",
                    w[1].step_index,
                    w[1].loss / w[0].loss - 1.0,
                    w[1].loss
                );
            }
        }
    }
    println!("total committed-loss increases: {count}");

    // Committed time deltas expose the step size actually used per commit;
    // print every change, with the loss and label error rate at that point.
    let mut prev_eta = f64::NAN;
    for w in traj.steps.windows(2) {
        let eta = w[1].time - w[0].time;
        if !prev_eta.is_finite() || (eta - prev_eta).abs() > 1e-3 * eta.max(prev_eta) {
            println!(
                "  step {}: eta -> {:.4e} (loss {:.6e}, label_err {:.3})",
                w[1].step_index, eta, w[1].loss, w[1].label_error_rate
            );
            prev_eta = eta;
        }
    }
    Ok(())
}
