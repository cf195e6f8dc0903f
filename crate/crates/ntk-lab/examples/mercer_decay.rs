//! Transcendental Mercer spectrum of the arc kernel `G_alpha` on `[0, 1]`.
//!
//! Solves `2 + 2 cos w + w sin(w) (1 - 2 alpha pi) = 0` for the first
//! frequencies, converts them to eigenvalues `lambda_j = 2 / (pi w_j^2)`,
//! fits the decay exponent, and cross-checks the leading eigenvalues
//! against a dense grid discretization of the kernel operator.
//!
//! Run with `cargo run --release --example mercer_decay`.

use ntk_lab::kernels::KernelSpec;
use ntk_lab::spectral::{decay_report, empirical_mercer, h_omega, mercer_spectrum};

fn main() -> ntk_lab::Result<()> {
    for &alpha in &[1.0, 9.0 / 7.0] {
        let spec = mercer_spectrum(alpha, 8)?;
        println!("alpha = {alpha}");
        println!("{:>3} {:>22} {:>22} {:>12}", "j", "omega_j", "lambda_j", "h(omega_j)");
        for j in 0..spec.roots.len() {
            println!(
                "{:>3} {:>22.16} {:>22.16} {:>12.3e}",
                j + 1,
                spec.roots[j],
                spec.eigenvalues[j],
                h_omega(alpha, spec.roots[j]),
            );
        }

        // Even-indexed roots are exactly (j - 1) pi, so lambda_j there is
        // exactly 2 / (pi^3 (j-1)^2); the fit sees the same power law.
        let deep = mercer_spectrum(alpha, 40)?;
        let slope = decay_report(&deep.eigenvalues, 2, 40)?;
        println!("decay fit over j in [2, 40]: lambda_j ~ (j-1)^({slope:.6})\n");
    }

    // Discretize G_1 on a uniform grid and compare operator eigenvalues with
    // the transcendental ones. Agreement improves as the grid refines.
    let analytic = mercer_spectrum(1.0, 6)?;
    let estimated = empirical_mercer(&KernelSpec::GAlpha { alpha: 1.0 }, 800, 6)?;
    println!("grid-800 operator estimates vs closed-form eigenvalues (alpha = 1):");
    println!("{:>3} {:>22} {:>22} {:>12}", "j", "estimate", "closed form", "rel err");
    for (j, (est, exact)) in estimated.iter().zip(&analytic.eigenvalues).enumerate() {
        let rel = (est - exact).abs() / exact;
        println!("{:>3} {:>22.16} {:>22.16} {:>12.3e}", j + 1, est, exact, rel);
    }

    Ok(())
}
