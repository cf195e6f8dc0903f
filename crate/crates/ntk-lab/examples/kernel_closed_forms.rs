//! Evaluate the two-layer ReLU NTK and its companion kernels in closed form.
//!
//! Prints a small table of kernel values on `[0, 1]`, checks the two linear
//! identities that tie `K_1` to the arc kernels `G_1`, `Pi_0`, `Pi_1`, and
//! finishes with a multivariate evaluation to show the same formula works
//! for `d > 1`.
//!
//! Run with `cargo run --example kernel_closed_forms`.

use ntk_lab::kernels::{
    g_alpha_eval, ntk1_eval, ntk_eval, pi_kernels, psi1, KernelSpec, Point,
};

fn main() -> ntk_lab::Result<()> {
    let pairs = [(0.3, 0.7), (0.0, 1.0), (0.25, 0.25), (0.9, 0.1)];

    println!("{:>6} {:>6} {:>22} {:>22} {:>22}", "x", "y", "K_1(x,y)", "psi(x,y)", "G_1(x,y)");
    for &(x, y) in &pairs {
        println!(
            "{:>6} {:>6} {:>22.16} {:>22.16} {:>22.16}",
            x,
            y,
            ntk1_eval(x, y),
            psi1(x, y),
            g_alpha_eval(1.0, x, y),
        );
    }

    // On the diagonal the angle vanishes and the kernel collapses to a
    // polynomial: K_1(x, x) = 2x^2 + 3.
    let x = 0.6;
    println!("\nK_1({x}, {x}) = {}  (2x^2 + 3 = {})", ntk1_eval(x, x), 2.0 * x * x + 3.0);

    // Two exact decompositions of the NTK. Both should hold to roundoff:
    //   K_1 = G_1 + 2 Pi_1
    //   K_1 = 2 Pi_0 (1 + xy) - G_1 + 2
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for i in 0..=20 {
        for j in 0..=20 {
            let (x, y) = (i as f64 / 20.0, j as f64 / 20.0);
            let k = ntk1_eval(x, y);
            let g = g_alpha_eval(1.0, x, y);
            let (pi0, pi1) = pi_kernels(x, y);
            worst_a = worst_a.max((k - (g + 2.0 * pi1)).abs());
            worst_b = worst_b.max((k - (2.0 * pi0 * (1.0 + x * y) - g + 2.0)).abs());
        }
    }
    println!("\nidentity residuals over a 21 x 21 grid:");
    println!("  max |K - (G_1 + 2 Pi_1)|            = {worst_a:.3e}");
    println!("  max |K - (2 Pi_0 (1+xy) - G_1 + 2)| = {worst_b:.3e}");

    // The same closed form in three dimensions, via both the free function
    // and the KernelSpec used by Gram-matrix code.
    let p = Point::new(vec![0.2, 0.5, 0.8]);
    let q = Point::new(vec![0.9, 0.1, 0.4]);
    let direct = ntk_eval(3, &p, &q)?;
    let via_spec = KernelSpec::NtkD { d: 3 }.eval(&p, &q)?;
    println!("\nK_3((0.2, 0.5, 0.8), (0.9, 0.1, 0.4)) = {direct:.16}");
    assert_eq!(direct, via_spec);

    Ok(())
}
