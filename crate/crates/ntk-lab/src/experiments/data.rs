//! Deterministic data generators: designs, truth functions, and labels.

use crate::error::{Error, Result};
use crate::flow::Dataset;
use crate::kernels::{ntk1_eval, Point};
use crate::numerics::{normal, Rng};

/// Centers of the `kernel_mix` truth function.
pub const KERNEL_MIX_CENTERS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
/// Coefficients of the `kernel_mix` truth function.
pub const KERNEL_MIX_WEIGHTS: [f64; 5] = [0.2, -0.3, 0.25, -0.15, 0.1];

/// Equispaced design `x_i = lo + (hi - lo) (i-1)/(n-1)`, one-dimensional.
pub fn gen_equispaced(n: usize, lo: f64, hi: f64) -> Result<Vec<Point>> {
    if n < 2 {
        return Err(Error::TooSmall { need: 2, got: n });
    }
    if !(lo < hi) {
        return Err(Error::DomainError(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    Ok((0..n)
        .map(|i| Point::scalar(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect())
}

/// A ground-truth regression function.
pub type TruthFn = Box<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Truth-function registry.
///
/// `kernel_mix` is a five-term combination of 1-d NTK sections (a bona fide
/// member of the kernel's function space) and reads only the first
/// coordinate; `sin_mix` is `sin(sum_j x_j / sqrt(d))`; `zero` vanishes.
pub fn f_star(id: &str) -> Result<TruthFn> {
    match id {
        "kernel_mix" => Ok(Box::new(|p: &Point| {
            KERNEL_MIX_CENTERS
                .iter()
                .zip(&KERNEL_MIX_WEIGHTS)
                .map(|(&z, &c)| c * ntk1_eval(p.x(), z))
                .sum()
        })),
        "sin_mix" => Ok(Box::new(|p: &Point| {
            let d = p.dim() as f64;
            (p.coords.iter().sum::<f64>() / d.sqrt()).sin()
        })),
        "zero" => Ok(Box::new(|_| 0.0)),
        other => Err(Error::UnknownTruth(other.to_string())),
    }
}

/// Labels `y_i = f_star(x_i) + sigma * normal` on the given design.
pub fn gen_regression(x: &[Point], f_star_id: &str, sigma: f64, rng: &mut Rng) -> Result<Dataset> {
    let truth = f_star(f_star_id)?;
    if f_star_id == "kernel_mix" && !x.is_empty() && x[0].dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: x[0].dim() });
    }
    let noise = if sigma > 0.0 { normal(rng, x.len()) } else { vec![0.0; x.len()] };
    let y: Vec<f64> = x.iter().zip(&noise).map(|(p, e)| truth(p) + sigma * e).collect();
    Dataset::new(x.to_vec(), y, sigma, Some(f_star_id.to_string()))
}

/// Independent `+1 / -1` labels, each sign with probability one half.
pub fn gen_pm1_labels(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| if rng.uniform() < 0.5 { -1.0 } else { 1.0 }).collect()
}

/// Clean three-bit parity-style label of a point in `[0,1)^3`:
/// `floor(2 x_1) + 2 floor(2 x_2) + 4 floor(2 x_3)`, in `{0, ..., 7}`.
pub fn parity3_clean_label(p: &Point) -> Result<f64> {
    if p.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: p.dim() });
    }
    let bit = |v: f64| (2.0 * v).floor().clamp(0.0, 1.0);
    Ok(bit(p.coords[0]) + 2.0 * bit(p.coords[1]) + 4.0 * bit(p.coords[2]))
}

/// Uniform points in `[0,1)^3` with three-bit labels; each label is
/// replaced, with probability `p`, by a uniform draw from `{0, ..., 7}`.
///
/// Every point consumes exactly five draws (three coordinates, the
/// corruption uniform, and the replacement, used or not), so runs with the
/// same seed but different `p` share their designs, the corrupted index
/// sets are nested as `p` grows, and jointly corrupted points get the same
/// replacement label.
pub fn gen_parity3(n: usize, rng: &mut Rng, p: f64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!("corruption probability {p} outside [0, 1]")));
    }
    if n < 1 {
        return Err(Error::TooSmall { need: 1, got: n });
    }
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let point = Point::new(vec![rng.uniform(), rng.uniform(), rng.uniform()]);
        let clean = parity3_clean_label(&point)?;
        let corrupt = rng.uniform() < p;
        let replacement = (rng.uniform() * 8.0).floor().min(7.0);
        x.push(point);
        y.push(if corrupt { replacement } else { clean });
    }
    Dataset::new(x, y, 0.0, Some("parity3".to_string()))
}
