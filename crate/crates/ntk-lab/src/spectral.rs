//! Eigenvalue analysis: Gram spectra, the closed-form `G_alpha` inverse,
//! transcendental Mercer eigenvalues, empirical Mercer estimates on grids,
//! and decay-rate fits.
//!
//! The central objects are the Mercer eigenvalues of the boundary kernel
//! `G_alpha` on `[0, 1]`: they solve
//!
//! ```text
//! h(omega) = 2 + 2 cos(omega) + omega sin(omega) (1 - 2 alpha pi) = 0,
//! lambda = 2 / (pi omega^2).
//! ```
//!
//! Roots interlace the multiples of `pi`: every odd multiple of `pi` is a
//! root outright (`cos = -1`, `sin = 0`), and one more root lives in each
//! interval `((j-1) pi, (j-1/2) pi)`. Because `omega_j` grows like
//! `(j-1) pi`, eigenvalues decay like `(j-1)^{-2}`; decay fits therefore
//! regress on the mode index `j-1`, not the 1-based position.

use crate::error::{Error, Result};
use crate::kernels::{gram, min_pairwise_distance, GramMatrix, KernelSpec, Point};
use crate::numerics::{loglog_slope, sym_eigenvalues, SymMatrix};
use std::f64::consts::PI;

/// Smallest eigenvalue of a Gram matrix.
pub fn min_eigenvalue(g: &GramMatrix) -> Result<f64> {
    let values = sym_eigenvalues(&g.matrix)?;
    Ok(*values.last().expect("order >= 1"))
}

/// Closed-form inverse of the `G_alpha` Gram on a sorted design in `[0, pi]`.
///
/// The inverse is `pi/2` times a tridiagonal matrix with corner coupling:
/// interior diagonal `1/(x_k - x_{k-1}) + 1/(x_{k+1} - x_k)`, off-diagonal
/// `-1/(x_{k+1} - x_k)`, and the constant `c = 1/(2 alpha pi - x_n + x_1)`
/// added at both extreme diagonal entries and placed at the two corners.
/// Its rows sum to at most `2 pi / d_min` in absolute value, which is how
/// the `d_min / (2 pi)` lower eigenvalue bound for `G_alpha` arises.
pub fn g_alpha_inverse(alpha: f64, sorted_x: &[f64]) -> Result<SymMatrix> {
    let n = sorted_x.len();
    if n < 3 {
        return Err(Error::TooSmall { need: 3, got: n });
    }
    for i in 1..n {
        if sorted_x[i] <= sorted_x[i - 1] {
            return Err(Error::NotSorted { index: i });
        }
    }
    let gaps: Vec<f64> = (1..n).map(|i| sorted_x[i] - sorted_x[i - 1]).collect();
    let corner = 1.0 / (2.0 * alpha * PI - sorted_x[n - 1] + sorted_x[0]);
    let mut m = SymMatrix::zeros(n);
    for k in 0..n {
        let left = if k > 0 { 1.0 / gaps[k - 1] } else { corner };
        let right = if k + 1 < n { 1.0 / gaps[k] } else { corner };
        m.set(k, k, (PI / 2.0) * (left + right));
    }
    for k in 0..n - 1 {
        m.set(k, k + 1, -(PI / 2.0) / gaps[k]);
    }
    m.set(0, n - 1, (PI / 2.0) * corner);
    Ok(m)
}

/// The Mercer characteristic function `2 + 2 cos w + w sin(w) (1 - 2 alpha pi)`.
pub fn h_omega(alpha: f64, omega: f64) -> f64 {
    2.0 + 2.0 * omega.cos() + omega * omega.sin() * (1.0 - 2.0 * alpha * PI)
}

/// Transcendental Mercer spectrum of `G_alpha` on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct MercerSpectrum {
    pub alpha: f64,
    /// Frequencies `omega_j`, strictly ascending.
    pub roots: Vec<f64>,
    /// `lambda_j = 2 / (pi omega_j^2)`, strictly descending.
    pub eigenvalues: Vec<f64>,
    /// True when `alpha` is outside {1, 9/7}, where the bracketing intervals
    /// are used on faith rather than by the analysis that fixed them.
    pub alpha_unvalidated: bool,
}

/// Bisection to interval width `<= 1e-13` on a bracket with a sign change.
fn bisect(alpha: f64, mut lo: f64, mut hi: f64, j: usize) -> Result<f64> {
    let mut f_lo = h_omega(alpha, lo);
    let f_hi = h_omega(alpha, hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketFailure { j, lo, hi });
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval is already at floating-point resolution
        }
        let f_mid = h_omega(alpha, mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First `j_max` Mercer eigenvalues of `G_alpha`.
///
/// `j = 1` is bisected on `[pi/6, pi/2]`; even `j` are the exact roots
/// `(j-1) pi`; odd `j > 1` are bisected on `[(j-1) pi, (j-1/2) pi]`.
pub fn mercer_spectrum(alpha: f64, j_max: usize) -> Result<MercerSpectrum> {
    if j_max < 1 {
        return Err(Error::DomainError("j_max must be at least 1".into()));
    }
    if alpha < 1.0 {
        return Err(Error::DomainError(format!(
            "alpha = {alpha} < 1: bracketing intervals require alpha >= 1"
        )));
    }
    let alpha_unvalidated = alpha != 1.0 && alpha != 9.0 / 7.0;
    let mut roots = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let omega = if j == 1 {
            bisect(alpha, PI / 6.0, PI / 2.0, j)?
        } else if j % 2 == 0 {
            (j - 1) as f64 * PI
        } else {
            bisect(alpha, (j - 1) as f64 * PI, (j as f64 - 0.5) * PI, j)?
        };
        roots.push(omega);
    }
    let eigenvalues = roots.iter().map(|w| 2.0 / (PI * w * w)).collect();
    Ok(MercerSpectrum { alpha, roots, eigenvalues, alpha_unvalidated })
}

/// Empirical Mercer eigenvalues: spectrum of `(1/N) K(grid, grid)` on the
/// closed uniform grid `{(i-1)/(N-1)}` over `[0, 1]`, truncated to `j_max`.
///
/// No end-weight correction is applied; the plain `1/N` scaling matches the
/// Gram-based estimator the decay-rate statements are about, and a trapezoid
/// correction would move each estimate by `O(1/N)` only.
pub fn empirical_mercer(spec: &KernelSpec, grid_n: usize, j_max: usize) -> Result<Vec<f64>> {
    if j_max < 1 {
        return Err(Error::DomainError("j_max must be at least 1".into()));
    }
    if grid_n < j_max {
        return Err(Error::TooSmall { need: j_max, got: grid_n });
    }
    let points: Vec<Point> = if grid_n == 1 {
        vec![Point::scalar(0.0)]
    } else {
        (0..grid_n)
            .map(|i| Point::scalar(i as f64 / (grid_n - 1) as f64))
            .collect()
    };
    let g = gram(spec, &points)?;
    let mut values = sym_eigenvalues(&g.matrix)?;
    values.truncate(j_max);
    Ok(values.iter().map(|v| v / grid_n as f64).collect())
}

/// Two-sided eigenvalue sandwich of the 1-d NTK Gram between `G_1` and
/// `7 G_{9/7}` on a point set in `[0, 1]`.
///
/// Returns `(lo_ok, hi_ok)` where `lo_ok` checks `lambda_min(K - G_1) >= -1e-10`
/// and `hi_ok` checks `lambda_min(7 G_{9/7} - K) >= -1e-10`.
pub fn sandwich_check(x: &[f64]) -> Result<(bool, bool)> {
    let points: Vec<Point> = x.iter().map(|&v| Point::scalar(v)).collect();
    let k = gram(&KernelSpec::Ntk1, &points)?.matrix;
    let g1 = gram(&KernelSpec::GAlpha { alpha: 1.0 }, &points)?.matrix;
    let g97 = gram(&KernelSpec::GAlpha { alpha: 9.0 / 7.0 }, &points)?.matrix;
    let lo = *sym_eigenvalues(&k.sub(&g1)?)?.last().expect("order >= 1");
    let hi = *sym_eigenvalues(&g97.scale(7.0).sub(&k)?)?.last().expect("order >= 1");
    Ok((lo >= -1e-10, hi >= -1e-10))
}

/// Least-squares decay slope of `log lambda_j` against `log (j-1)` over
/// `j in [j_lo, j_hi]` (1-based positions in a descending spectrum).
///
/// `j_lo >= 2` both because `lambda_1` obeys only a loose bracket and
/// because the regressor is the mode index `j-1`, which vanishes at `j = 1`.
pub fn decay_report(lambdas: &[f64], j_lo: usize, j_hi: usize) -> Result<f64> {
    if j_lo < 2 {
        return Err(Error::DomainError("decay fit starts at j_lo >= 2".into()));
    }
    if j_hi > lambdas.len() {
        return Err(Error::TooSmall { need: j_hi, got: lambdas.len() });
    }
    if j_hi <= j_lo {
        return Err(Error::DomainError("need j_hi > j_lo for a slope".into()));
    }
    let xs: Vec<f64> = (j_lo..=j_hi).map(|j| (j - 1) as f64).collect();
    let ys: Vec<f64> = lambdas[j_lo - 1..j_hi].to_vec();
    loglog_slope(&xs, &ys)
}

/// Bundled spectral diagnostics of one design, as produced by the
/// minimum-eigenvalue and decay scenarios.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub n: usize,
    pub d_min: f64,
    pub lambda_min: f64,
    /// Descending spectrum of the Gram in question.
    pub all_eigenvalues: Vec<f64>,
    pub sandwich_ok: bool,
    pub decay_slope: f64,
}

impl SpectrumReport {
    /// Assembles a report, deriving `lambda_min` from the spectrum so the
    /// two fields cannot disagree.
    pub fn new(
        n: usize,
        d_min: f64,
        all_eigenvalues: Vec<f64>,
        sandwich_ok: bool,
        decay_slope: f64,
    ) -> Result<Self> {
        let lambda_min = *all_eigenvalues
            .last()
            .ok_or_else(|| Error::DomainError("empty spectrum".into()))?;
        Ok(SpectrumReport { n, d_min, lambda_min, all_eigenvalues, sandwich_ok, decay_slope })
    }

    /// Full diagnostics of a 1-d design under the given kernel: spectrum,
    /// `d_min`, sandwich flags, and the decay slope over `[2, min(40, n)]`
    /// when enough eigenvalues are positive.
    pub fn build(spec: &KernelSpec, xs: &[f64], check_sandwich: bool) -> Result<Self> {
        let points: Vec<Point> = xs.iter().map(|&v| Point::scalar(v)).collect();
        let g = gram(spec, &points)?;
        let d_min = min_pairwise_distance(&points);
        let eigenvalues = sym_eigenvalues(&g.matrix)?;
        let sandwich_ok = if check_sandwich {
            let (lo, hi) = sandwich_check(xs)?;
            lo && hi
        } else {
            true
        };
        let j_hi = eigenvalues
            .iter()
            .take(40.min(eigenvalues.len()))
            .take_while(|&&v| v > 0.0)
            .count();
        let decay_slope = if j_hi > 2 {
            decay_report(&eigenvalues, 2, j_hi)?
        } else {
            f64::NAN
        };
        SpectrumReport::new(points.len(), d_min, eigenvalues, sandwich_ok, decay_slope)
    }
}
