//! Closed-form kernel gradient-flow regression via spectral filtering.
//!
//! Training kernel regression by gradient flow on the squared loss has the
//! exact solution
//!
//! ```text
//! f_t(x) = k(x)^T Q diag(phi_t(lambda)) Q^T y,
//! phi_t(lambda) = (1 - exp(-lambda t / n)) / lambda,
//! ```
//!
//! where `K(X, X) = Q diag(lambda) Q^T`. One eigendecomposition therefore
//! serves every time `t`, including the ridgeless limit `t = infinity`
//! (`phi = 1/lambda`), which interpolates the training data. Numerically
//! zero or negative eigenvalues are clipped to zero, where the filter takes
//! its analytic limits `t/n` and `0`.
//!
//! The model keeps the eigendecomposition behind an [`Arc`], so refitting
//! the same design with new labels (the common pattern in seed sweeps) costs
//! one projection rather than a new decomposition.

use crate::error::{Error, Result};
use crate::kernels::{gram, kernel_row, min_pairwise_distance, KernelSpec, Point};
use crate::numerics::{sym_eigen, EigenPair, Rng};
use std::sync::Arc;

/// Regression data: design points, responses, and generation metadata.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub x: Vec<Point>,
    pub y: Vec<f64>,
    /// Noise standard deviation used when the data was generated; 0 if
    /// noiseless or unknown.
    pub sigma: f64,
    /// Identifier of the generating truth, when there is one.
    pub f_star_id: Option<String>,
}

impl Dataset {
    pub fn new(x: Vec<Point>, y: Vec<f64>, sigma: f64, f_star_id: Option<String>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::TooSmall { need: 1, got: 0 });
        }
        if y.len() != x.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
        }
        if !(sigma >= 0.0) {
            return Err(Error::DomainError(format!("sigma = {sigma} must be >= 0")));
        }
        let d_min = min_pairwise_distance(&x);
        if x.len() > 1 && d_min <= 1e-12 {
            return Err(Error::DuplicatePoints { d_min });
        }
        Ok(Dataset { x, y, sigma, f_star_id })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.x[0].dim()
    }

    /// The 1-d design as plain scalars.
    pub fn xs(&self) -> Vec<f64> {
        self.x.iter().map(|p| p.x()).collect()
    }
}

/// Flow time: a finite horizon or the ridgeless limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeSpec {
    Finite(f64),
    Infinity,
}

/// Eigendecomposed Gram data ready to evaluate `f_t` at any time.
#[derive(Clone, Debug)]
pub struct NtkFlowModel {
    pub dataset: Dataset,
    pub spec: KernelSpec,
    eigen: Arc<EigenPair>,
    /// `Q^T y`.
    projected: Vec<f64>,
    n: usize,
}

impl NtkFlowModel {
    /// Eigenvalues of the training Gram, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Smallest Gram eigenvalue (raw, not clipped).
    pub fn lambda_min(&self) -> f64 {
        *self.eigen.values.last().expect("n >= 1")
    }
}

/// Decomposes the kernel Gram of `data` and projects the labels.
///
/// Fails with `NotPositiveDefinite` when the smallest eigenvalue is below
/// `-1e-6` times the largest: that signals a broken kernel or duplicated
/// design rather than roundoff, which only produces dips below zero at the
/// `1e-10` relative scale.
pub fn fit(spec: &KernelSpec, data: Dataset) -> Result<NtkFlowModel> {
    let g = gram(spec, &data.x)?;
    let eigen = sym_eigen(&g.matrix)?;
    let lambda_max = eigen.values[0];
    let lambda_min = *eigen.values.last().expect("n >= 1");
    if lambda_min < -1e-6 * lambda_max.max(0.0) {
        return Err(Error::NotPositiveDefinite { jitter: lambda_min });
    }
    let projected = eigen.project(&data.y);
    let n = data.n();
    Ok(NtkFlowModel { dataset: data, spec: spec.clone(), eigen: Arc::new(eigen), projected, n })
}

impl NtkFlowModel {
    /// Same design and kernel, new labels; reuses the eigendecomposition.
    pub fn refit_labels(&self, y: Vec<f64>) -> Result<NtkFlowModel> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: y.len() });
        }
        let projected = self.eigen.project(&y);
        let mut dataset = self.dataset.clone();
        dataset.y = y;
        Ok(NtkFlowModel {
            dataset,
            spec: self.spec.clone(),
            eigen: Arc::clone(&self.eigen),
            projected,
            n: self.n,
        })
    }

    /// Spectral filter at one (clipped) eigenvalue.
    fn filter(&self, time: TimeSpec, lambda: f64) -> f64 {
        let lambda = lambda.max(0.0);
        match time {
            TimeSpec::Finite(t) => {
                if lambda > 0.0 {
                    -(-lambda * t / self.n as f64).exp_m1() / lambda
                } else {
                    t / self.n as f64
                }
            }
            TimeSpec::Infinity => {
                if lambda > 0.0 {
                    1.0 / lambda
                } else {
                    0.0
                }
            }
        }
    }

    /// Representer weights `Q diag(phi_t) Q^T y`; `f_t(x) = k(x) . weights`.
    pub fn weights(&self, time: TimeSpec) -> Result<Vec<f64>> {
        if let TimeSpec::Finite(t) = time {
            if !(t >= 0.0) {
                return Err(Error::DomainError(format!("flow time {t} must be >= 0")));
            }
        }
        let coeffs: Vec<f64> = self
            .eigen
            .values
            .iter()
            .zip(&self.projected)
            .map(|(&lambda, &z)| self.filter(time, lambda) * z)
            .collect();
        Ok(self.eigen.combine(&coeffs))
    }

    /// `f_t` at the query points.
    pub fn predict(&self, time: TimeSpec, query: &[Point]) -> Result<Vec<f64>> {
        let w = self.weights(time)?;
        query
            .iter()
            .map(|x| Ok(dot(&kernel_row(&self.spec, x, &self.dataset.x)?, &w)))
            .collect()
    }

    /// `f_t` on scalar queries (1-d kernels).
    pub fn predict_xs(&self, time: TimeSpec, xs: &[f64]) -> Result<Vec<f64>> {
        let points: Vec<Point> = xs.iter().map(|&v| Point::scalar(v)).collect();
        self.predict(time, &points)
    }

    /// `|| exp(-K t / n) y ||_2`, the training residual of the flow.
    pub fn residual_norm(&self, t: f64) -> f64 {
        self.eigen
            .values
            .iter()
            .zip(&self.projected)
            .map(|(&lambda, &z)| {
                let decay = (-lambda.max(0.0) * t / self.n as f64).exp();
                (decay * z) * (decay * z)
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Piecewise-linear interpolant through sorted 1-d data.
pub fn linear_interp(data: &Dataset, x: f64) -> Result<f64> {
    if data.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: data.dim() });
    }
    let xs = data.xs();
    for i in 1..xs.len() {
        if xs[i] <= xs[i - 1] {
            return Err(Error::NotSorted { index: i });
        }
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if x < lo || x > hi {
        return Err(Error::OutOfRange { x, lo, hi });
    }
    // Index of the segment [x_i, x_(i+1)] containing x. The range check
    // above guarantees partition_point lands in [1, n].
    let mut i = xs.partition_point(|&v| v <= x);
    if i == xs.len() {
        return Ok(data.y[xs.len() - 1]); // x == x_n exactly
    }
    i -= 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    Ok(data.y[i] + t * (data.y[i + 1] - data.y[i]))
}

/// Largest deviation between the ridgeless limit and the piecewise-linear
/// interpolant, maximized over a uniform grid united with the nodes.
///
/// The reported value under-estimates the true sup by at most the Lipschitz
/// modulus of the difference times the grid spacing; `grid_n >= 4 n` keeps
/// that slack below the effect being measured.
pub fn sup_gap(model: &NtkFlowModel, grid_n: usize) -> Result<f64> {
    let data = &model.dataset;
    if data.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: data.dim() });
    }
    let n = data.n();
    if grid_n < 4 * n {
        return Err(Error::DomainError(format!(
            "grid_n = {grid_n} must be at least 4 n = {}",
            4 * n
        )));
    }
    let xs = data.xs();
    let (lo, hi) = (xs[0], xs[n - 1]);
    let mut queries: Vec<f64> = (0..grid_n)
        .map(|i| lo + (hi - lo) * i as f64 / (grid_n - 1) as f64)
        .collect();
    queries.extend_from_slice(&xs);
    let flow = model.predict_xs(TimeSpec::Infinity, &queries)?;
    let mut gap: f64 = 0.0;
    for (&x, &f) in queries.iter().zip(&flow) {
        let li = linear_interp(data, x)?;
        gap = gap.max((f - li).abs());
    }
    Ok(gap)
}

/// Squared-error risk `integral (predictor - f_star)^2` over the uniform
/// measure on `[0, 1]^d`: trapezoid quadrature for `d = 1`, Monte Carlo for
/// higher dimensions (which then requires an `Rng`).
pub fn excess_risk(
    predictor: impl Fn(&Point) -> f64,
    f_star: impl Fn(&Point) -> f64,
    d: usize,
    quad_n: usize,
    rng: Option<&mut Rng>,
) -> Result<f64> {
    if quad_n < 2 {
        return Err(Error::DomainError("quad_n must be at least 2".into()));
    }
    if d == 1 {
        let h = 1.0 / (quad_n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..quad_n {
            let p = Point::scalar(i as f64 * h);
            let e = predictor(&p) - f_star(&p);
            let w = if i == 0 || i == quad_n - 1 { 0.5 } else { 1.0 };
            acc += w * e * e;
        }
        Ok(acc * h)
    } else {
        let rng = rng.ok_or(Error::MissingRng { d })?;
        let mut acc = 0.0;
        for _ in 0..quad_n {
            let p = Point::new((0..d).map(|_| rng.uniform()).collect());
            let e = predictor(&p) - f_star(&p);
            acc += e * e;
        }
        Ok(acc / quad_n as f64)
    }
}

/// Early-stopping horizon `c * n^(2/3)`.
pub fn t_star(n: usize, c: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::DomainError("n must be at least 1".into()));
    }
    if !(c > 0.0) {
        return Err(Error::DomainError(format!("c = {c} must be > 0")));
    }
    let root = (n as f64).cbrt();
    Ok(c * root * root)
}

/// Noise-quadratic part of the linear interpolant's exact risk on an
/// equispaced design:
/// `(1 / (3 (n-1))) * sum_i (eps_i^2 + eps_(i+1)^2 + eps_i eps_(i+1))`.
///
/// Its expectation is `(2/3) sigma^2` for i.i.d. noise of variance
/// `sigma^2`, which is the floor that keeps the interpolant from ever being
/// consistent. The `f_star_nodes` argument fixes the design length; the
/// deterministic curvature part of the risk depends on it but is not part
/// of this oracle.
pub fn li_risk_expansion(f_star_nodes: &[f64], eps: &[f64], n: usize) -> Result<f64> {
    if f_star_nodes.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f_star_nodes.len() });
    }
    if eps.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: eps.len() });
    }
    if n < 2 {
        return Err(Error::TooSmall { need: 2, got: n });
    }
    let mut acc = 0.0;
    for i in 0..n - 1 {
        acc += eps[i] * eps[i] + eps[i + 1] * eps[i + 1] + eps[i] * eps[i + 1];
    }
    Ok(acc / (3.0 * (n - 1) as f64))
}
