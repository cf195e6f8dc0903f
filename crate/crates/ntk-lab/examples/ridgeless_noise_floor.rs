//! The risk floor of noisy interpolation.
//!
//! A predictor that interpolates noisy labels carries the noise with it:
//! both the ridgeless kernel flow and the piecewise-linear interpolant keep
//! an excess risk of at least about `(2/3) sigma^2` no matter how large `n`
//! grows. The first table shows the measured ridgeless risk against that
//! floor; the second Monte-Carlo-checks the closed-form noise term of the
//! linear interpolant's risk.
//!
//! Run with `cargo run --release --example ridgeless_noise_floor`.

use ntk_lab::experiments::data::{f_star, gen_equispaced, gen_regression};
use ntk_lab::flow::{excess_risk, fit, li_risk_expansion, TimeSpec};
use ntk_lab::kernels::KernelSpec;
use ntk_lab::numerics::{normal, Rng};

const SIGMA: f64 = 0.5;

fn main() -> ntk_lab::Result<()> {
    let truth = f_star("kernel_mix")?;
    let floor = 2.0 / 3.0 * SIGMA * SIGMA;

    println!("noise floor (2/3) sigma^2 = {floor:.6}\n");
    println!("{:>6} {:>20} {:>12}", "n", "ridgeless risk", "risk/floor");
    for &n in &[64usize, 128, 256, 512] {
        let x = gen_equispaced(n, 0.0, 1.0)?;
        let mut rng = Rng::derive(3, n as u64);
        let data = gen_regression(&x, "kernel_mix", SIGMA, &mut rng)?;
        let model = fit(&KernelSpec::Ntk1, data)?;
        let risk = excess_risk(
            |p| model.predict(TimeSpec::Infinity, std::slice::from_ref(p)).expect("1-d query")[0],
            &truth,
            1,
            2001,
            None,
        )?;
        println!("{:>6} {:>20.6e} {:>12.4}", n, risk, risk / floor);
    }

    // The linear interpolant's risk has an explicit noise-quadratic term
    // whose expectation is exactly the floor; average it over fresh draws.
    let n = 256;
    let f_nodes = {
        let x = gen_equispaced(n, 0.0, 1.0)?;
        x.iter().map(&truth).collect::<Vec<f64>>()
    };
    let mut rng = Rng::new(17);
    let draws = 20_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        let eps: Vec<f64> = normal(&mut rng, n).iter().map(|z| SIGMA * z).collect();
        acc += li_risk_expansion(&f_nodes, &eps, n)?;
    }
    let mean = acc / draws as f64;
    println!(
        "\nlinear-interpolant noise term, mean of {draws} draws: {mean:.6} \
         (relative error vs floor: {:.2e})",
        (mean - floor).abs() / floor
    );

    Ok(())
}
