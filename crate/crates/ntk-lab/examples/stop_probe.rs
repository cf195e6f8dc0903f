//! Scratch calibration probe for label-corruption training cells.

use ntk_lab::experiments::data::gen_parity3;
use ntk_lab::net::{default_eta, init_net, train_until, StopReason, StoppingRule, TwoLayerNet};
use ntk_lab::numerics::Rng;
use std::time::Instant;

fn stream(scenario: u64, a: u64, b: u64) -> u64 {
    (scenario << 48) | (a << 16) | b
}

fn main() -> ntk_lab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(64);
    let m: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(256);
    let seeds: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(3);
    const TEST_N: usize = 1000;
    const EVAL_EVERY: usize = 25;

    println!("n={n} m={m}");
    for s in 0..seeds {
        let test = gen_parity3(TEST_N, &mut Rng::derive(1, stream(9, 1, s as u64)), 0.0)?;
        let accuracy = |net: &TwoLayerNet| -> f64 {
            let preds = net.forward_batch(&test.x).expect("dims match");
            let hits = preds
                .iter()
                .zip(&test.y)
                .filter(|(f, y)| f.round().clamp(0.0, 7.0) == **y)
                .count();
            hits as f64 / TEST_N as f64
        };
        for &p in &[0.0, 0.3, 0.6] {
            let t0 = Instant::now();
            let train = gen_parity3(n, &mut Rng::derive(1, stream(9, 2, s as u64)), p)?;
            let mut net = init_net(m, 3, &mut Rng::derive(1, stream(9, 3, s as u64)))?;
            let eta0 = default_eta(&net, &train.x)?;
            let mut best = 0.0f64;
            let mut observer = |step: usize, _t: f64, net: &TwoLayerNet| {
                if step.is_multiple_of(EVAL_EVERY) {
                    best = best.max(accuracy(net));
                }
            };
            let traj = train_until(
                &mut net,
                &train,
                StoppingRule::LabelZero,
                eta0,
                500_000,
                &[],
                Some(&mut observer),
            )?;
            let at_label = accuracy(&net);
            let best = best.max(at_label);
            println!(
                "s={s} p={p}: steps={} reached={} eta0={eta0:.4} eta_end={:.4e} acc_at={:.3} best={:.3} gap={:.4} wall={:.1}s",
                traj.final_step().step_index,
                traj.stop_reason == StopReason::LabelZero,
                traj.final_eta,
                at_label,
                best,
                best - at_label,
                t0.elapsed().as_secs_f64(),
            );
        }
    }
    Ok(())
}
