//! Closed-form evaluation of the two-layer ReLU NTK and its companions.
//!
//! For inputs `x, y` in `R^d` the tangent kernel of the bias-augmented
//! two-layer ReLU network is
//!
//! ```text
//! K_d(x, y) = (2/pi) (pi - psi) (<x,y> + 1)
//!           + (1/pi) sqrt(|x-y|^2 + |x|^2 |y|^2 - <x,y>^2)  + 1
//! ```
//!
//! where `psi` is the angle between the lifted vectors `(x, 1)` and `(y, 1)`.
//! On the line (`d = 1`) the radicand collapses to `(x - y)^2` and the kernel
//! decomposes exactly into the boundary kernel `G_alpha(x, y) = alpha - |x-y|/pi`
//! and the arc kernels `Pi_0`, `Pi_1`; those identities are what the spectral
//! module's sandwich bounds rest on.
//!
//! Numerical note: `psi` is computed as `atan2(sqrt(r), <x,y> + 1)` with
//! `r` the radicand above, which equals `arccos` of the normalized inner
//! product exactly (the lifted Gram identity
//! `(|x|^2+1)(|y|^2+1) - (<x,y>+1)^2 = r` holds in exact arithmetic) but
//! stays fully accurate when the angle is tiny, where `arccos` of a value
//! near 1 loses half the mantissa. The ridgeless interpolation tests resolve
//! kernel differences at the 1e-9 level between near-coincident points and
//! fail with the `arccos` form.

use crate::error::{Error, Result};
use crate::numerics::SymMatrix;
use std::f64::consts::PI;

/// A point of the input box; `d = coords.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Self {
        Point { coords: vec![x] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The sole coordinate of a 1-d point.
    pub fn x(&self) -> f64 {
        debug_assert_eq!(self.coords.len(), 1);
        self.coords[0]
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

/// Which kernel a Gram matrix or flow model is built from.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    /// Full NTK on `R^d`.
    NtkD { d: usize },
    /// The `d = 1` NTK through its specialized formula.
    Ntk1,
    /// Boundary kernel `alpha - |x - y|/pi`; `alpha >= 1` in all presets.
    GAlpha { alpha: f64 },
    /// Arc kernel `(pi - psi)/pi`.
    Pi0,
    /// Arc kernel `((1 + x y)(pi - psi) + |x - y|)/pi`.
    Pi1,
}

impl KernelSpec {
    /// Input dimension this kernel expects.
    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::NtkD { d } => *d,
            _ => 1,
        }
    }

    /// Kernel value at a pair of points.
    pub fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        let d = self.dim();
        if x.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
        }
        if y.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: y.dim() });
        }
        Ok(match self {
            KernelSpec::NtkD { d } => ntk_eval(*d, x, y)?,
            KernelSpec::Ntk1 => ntk1_eval(x.x(), y.x()),
            KernelSpec::GAlpha { alpha } => g_alpha_eval(*alpha, x.x(), y.x()),
            KernelSpec::Pi0 => pi_kernels(x.x(), y.x()).0,
            KernelSpec::Pi1 => pi_kernels(x.x(), y.x()).1,
        })
    }

    /// Scalar fast path for the 1-d kernels (also serves `NtkD { d: 1 }`).
    pub fn eval1(&self, x: f64, y: f64) -> f64 {
        match self {
            KernelSpec::NtkD { .. } | KernelSpec::Ntk1 => ntk1_eval(x, y),
            KernelSpec::GAlpha { alpha } => g_alpha_eval(*alpha, x, y),
            KernelSpec::Pi0 => pi_kernels(x, y).0,
            KernelSpec::Pi1 => pi_kernels(x, y).1,
        }
    }
}

/// Shared geometry of a pair: inner product, lifted radicand, and `psi`.
fn pair_geometry(x: &Point, y: &Point) -> (f64, f64, f64) {
    let mut dot = 0.0;
    let mut nx2 = 0.0;
    let mut ny2 = 0.0;
    let mut dist2 = 0.0;
    for (a, b) in x.coords.iter().zip(&y.coords) {
        dot += a * b;
        nx2 += a * a;
        ny2 += b * b;
        dist2 += (a - b) * (a - b);
    }
    let radicand = (dist2 + nx2 * ny2 - dot * dot).max(0.0);
    let psi = radicand.sqrt().atan2(dot + 1.0);
    (dot, radicand, psi)
}

/// Angle between the lifted vectors `(x, 1)` and `(y, 1)`, in `[0, pi]`.
pub fn psi(x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    Ok(pair_geometry(x, y).2)
}

/// NTK on `R^d` in closed form.
pub fn ntk_eval(d: usize, x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
    }
    if y.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: y.dim() });
    }
    let (dot, radicand, psi) = pair_geometry(x, y);
    Ok((2.0 / PI) * (PI - psi) * (dot + 1.0) + radicand.sqrt() / PI + 1.0)
}

/// Angle for scalar inputs: `atan2(|x - y|, 1 + x y)`.
#[inline]
pub fn psi1(x: f64, y: f64) -> f64 {
    (x - y).abs().atan2(1.0 + x * y)
}

/// The `d = 1` NTK: `(2/pi)(pi - psi)(1 + x y) + |x - y|/pi + 1`.
#[inline]
pub fn ntk1_eval(x: f64, y: f64) -> f64 {
    let psi = psi1(x, y);
    (2.0 / PI) * (PI - psi) * (1.0 + x * y) + (x - y).abs() / PI + 1.0
}

/// Boundary kernel `alpha - |x - y|/pi`.
#[inline]
pub fn g_alpha_eval(alpha: f64, x: f64, y: f64) -> f64 {
    alpha - (x - y).abs() / PI
}

/// Arc kernels `(Pi_0, Pi_1)` on the line.
#[inline]
pub fn pi_kernels(x: f64, y: f64) -> (f64, f64) {
    let psi = psi1(x, y);
    let pi0 = (PI - psi) / PI;
    let pi1 = ((1.0 + x * y) * (PI - psi) + (x - y).abs()) / PI;
    (pi0, pi1)
}

/// Second-derivative weights of the 1-d NTK interpolant at `xi`:
/// component `j` is `(4/pi) |xi - nodes[j]| / (1 + xi^2)^2`.
///
/// The formula is the curvature factor that bounds how far the ridgeless
/// interpolant can bend between nodes; it blows up nowhere but loses meaning
/// exactly at a node, hence the `AtNode` guard.
pub fn ntk1_second_derivative(xi: f64, nodes: &[f64]) -> Result<Vec<f64>> {
    if let Some(index) = nodes.iter().position(|&v| (xi - v).abs() <= 1e-15) {
        return Err(Error::AtNode { index });
    }
    let denom = (1.0 + xi * xi) * (1.0 + xi * xi);
    Ok(nodes.iter().map(|&v| (4.0 / PI) * (xi - v).abs() / denom).collect())
}

/// A kernel Gram matrix together with the points and spec that built it.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub spec: KernelSpec,
    pub points: Vec<Point>,
    pub matrix: SymMatrix,
}

/// Smallest pairwise Euclidean distance; `infinity` for a single point.
pub fn min_pairwise_distance(points: &[Point]) -> f64 {
    let mut d_min = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d_min = d_min.min(points[i].dist(&points[j]));
        }
    }
    d_min
}

/// Assembles the symmetric kernel matrix on `points`.
///
/// Rejects designs with `d_min <= 1e-12`: such Grams are numerically
/// singular for every kernel here and the spectral bounds scale with
/// `d_min`, so nothing downstream could use the result.
pub fn gram(spec: &KernelSpec, points: &[Point]) -> Result<GramMatrix> {
    if points.is_empty() {
        return Err(Error::TooSmall { need: 1, got: 0 });
    }
    let d = spec.dim();
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    let d_min = min_pairwise_distance(points);
    if points.len() > 1 && d_min <= 1e-12 {
        return Err(Error::DuplicatePoints { d_min });
    }
    let matrix = SymMatrix::from_fn(points.len(), |i, j| {
        spec.eval(&points[i], &points[j]).expect("dims pre-checked")
    });
    Ok(GramMatrix { spec: spec.clone(), points: points.to_vec(), matrix })
}

/// Kernel values `k(x, points[j])` for one query point.
pub fn kernel_row(spec: &KernelSpec, x: &Point, points: &[Point]) -> Result<Vec<f64>> {
    points.iter().map(|p| spec.eval(x, p)).collect()
}
