//! Dense symmetric linear algebra, deterministic sampling, and slope fits.
//!
//! Everything downstream funnels its matrix work through this module:
//! eigendecomposition for spectral filtering, Cholesky solves for
//! positive-definite systems, a counter-free 64-bit generator for
//! reproducible draws, and least-squares slopes on log-log data.
//!
//! The eigensolver is the classical two-phase dense path: Householder
//! reduction to tridiagonal form with accumulated transformations, followed
//! by implicit-shift QL iteration. Both phases are deterministic, so a fixed
//! matrix yields bitwise-identical spectra across runs.

use crate::error::{Error, Result};

/// Fully stored symmetric matrix (row-major, `order x order`).
///
/// Both triangles are kept so that `entries[i][j] == entries[j][i]` holds
/// exactly as stored; all mutation goes through [`SymMatrix::set`], which
/// writes both mirror entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        SymMatrix { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    /// Builds the matrix by evaluating `f(i, j)` for `j >= i` and mirroring,
    /// so symmetry holds by construction even if `f` is not exactly
    /// symmetric in floating point.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.a[i * n + j] = v;
                m.a[j * n + i] = v;
            }
        }
        m
    }

    /// Validates squareness and exact symmetry of explicit row data.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DomainError("empty matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for j in 0..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::DomainError(format!(
                        "asymmetric entries at ({i},{j})"
                    )));
                }
            }
        }
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.a[i * n..(i + 1) * n].copy_from_slice(&rows[i]);
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest absolute entry; used as the scale in relative error bounds.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).sum()
    }

    /// Entry-wise `self - other`.
    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect();
        Ok(SymMatrix { n: self.n, a })
    }

    /// Entry-wise `s * self`.
    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix { n: self.n, a: self.a.iter().map(|v| s * v).collect() }
    }

    fn all_finite(&self) -> bool {
        self.a.iter().all(|v| v.is_finite())
    }
}

/// Eigendecomposition `A = Q diag(values) Q^T` with `values` sorted
/// descending and orthonormal columns `Q[:, i]` stored contiguously.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub values: Vec<f64>,
    vectors: Vec<f64>, // column-major: eigenvector i occupies [i*n, (i+1)*n)
    n: usize,
}

impl EigenPair {
    pub fn order(&self) -> usize {
        self.n
    }

    /// Eigenvector belonging to `values[i]`, unit length.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    /// `Q^T y`: coordinates of `y` in the eigenbasis.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n);
        (0..self.n)
            .map(|i| self.vector(i).iter().zip(y).map(|(q, v)| q * v).sum())
            .collect()
    }

    /// `Q c`: reassembles a vector from eigenbasis coordinates.
    pub fn combine(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let ci = c[i];
            if ci == 0.0 {
                continue;
            }
            for (o, q) in out.iter_mut().zip(self.vector(i)) {
                *o += ci * q;
            }
        }
        out
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form, with
/// the orthogonal transformation accumulated in `v`.
///
/// `v` enters holding the symmetric matrix and leaves holding the
/// accumulated transformation *transposed*: row `i` of `v` is the `i`-th
/// column of the orthogonal factor. The transposed convention keeps every
/// O(n^3) inner loop here and in the QL sweep stride-1. On return `d`
/// holds the diagonal and `e[1..]` the subdiagonal of the reduced matrix.
fn householder_tridiagonalize(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    for j in 0..n {
        d[j] = v[j * n + (n - 1)];
    }
    for i in (1..n).rev() {
        let mut h = 0.0;
        let mut scale = 0.0;
        if i > 1 {
            for item in d.iter().take(i) {
                scale += item.abs();
            }
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[j * n + (i - 1)];
                v[j * n + i] = 0.0;
                v[i * n + j] = 0.0;
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let f = d[i - 1];
            let mut g = if f > 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v[i * n + j] = f;
                g = e[j] + v[j * n + j] * f;
                let row_j = &v[j * n..j * n + i];
                for k in j + 1..i {
                    g += row_j[k] * d[k];
                    e[k] += row_j[k] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let row_j = &mut v[j * n..j * n + i];
                for k in j..i {
                    row_j[k] -= f * e[k] + g * d[k];
                }
                d[j] = v[j * n + (i - 1)];
                v[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }
    // Accumulate the Householder transformations.
    for i in 0..n - 1 {
        v[i * n + (n - 1)] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            {
                let row_next = &v[(i + 1) * n..(i + 1) * n + i + 1];
                for k in 0..=i {
                    d[k] = row_next[k] / h;
                }
            }
            for j in 0..=i {
                let mut g = 0.0;
                {
                    let row_next = &v[(i + 1) * n..(i + 1) * n + i + 1];
                    let row_j = &v[j * n..j * n + i + 1];
                    for k in 0..=i {
                        g += row_next[k] * row_j[k];
                    }
                }
                let row_j = &mut v[j * n..j * n + i + 1];
                for k in 0..=i {
                    row_j[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(i + 1) * n + k] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[j * n + (n - 1)];
        v[j * n + (n - 1)] = 0.0;
    }
    v[(n - 1) * n + (n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
///
/// When `v` is `Some`, the rotations are applied to its columns so that on
/// return they are the eigenvectors of the original matrix; when `None`,
/// only eigenvalues are computed (skipping the O(n) work per rotation).
fn ql_implicit_shift(d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>, n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON / 2.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::DomainError(
                        "QL iteration did not converge within 60 sweeps".into(),
                    ));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        // Rows i and i+1 hold the two eigenvector candidates
                        // being rotated (transposed storage), so both run
                        // stride-1.
                        let (row_i, row_next) = v[i * n..(i + 2) * n].split_at_mut(n);
                        for k in 0..n {
                            let h = row_next[k];
                            row_next[k] = s * row_i[k] + c * h;
                            row_i[k] = c * row_i[k] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn eigen_impl(a: &SymMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    if !a.all_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.n;
    if n == 1 {
        return Ok((vec![a.a[0]], want_vectors.then(|| vec![1.0])));
    }
    let mut v = a.a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiagonalize(&mut v, &mut d, &mut e, n);
    ql_implicit_shift(&mut d, &mut e, want_vectors.then_some(v.as_mut_slice()), n)?;

    // Sort descending. Row i of `v` is eigenvector i (transposed
    // accumulation), which is exactly the contiguous layout EigenPair
    // stores, so the permutation is a row copy.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).expect("finite eigenvalues"));
    let values: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut q = vec![0.0; n * n];
        for (col_out, &col_in) in idx.iter().enumerate() {
            q[col_out * n..(col_out + 1) * n].copy_from_slice(&v[col_in * n..(col_in + 1) * n]);
        }
        q
    });
    Ok((values, vectors))
}

/// Full eigendecomposition of a symmetric matrix, eigenvalues descending.
pub fn sym_eigen(a: &SymMatrix) -> Result<EigenPair> {
    let (values, vectors) = eigen_impl(a, true)?;
    Ok(EigenPair { values, vectors: vectors.expect("vectors requested"), n: a.n })
}

/// Eigenvalues only (descending); skips the per-rotation vector updates and
/// is the preferred path for large spectra where eigenvectors are unused.
pub fn sym_eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    Ok(eigen_impl(a, false)?.0)
}

/// In-place lower Cholesky of `a + jitter*I`; `None` if a pivot fails.
fn try_cholesky(a: &SymMatrix, jitter: f64) -> Option<Vec<f64>> {
    let n = a.n;
    let mut l = a.a.clone();
    for i in 0..n {
        l[i * n + i] += jitter;
    }
    for j in 0..n {
        let mut diag = l[j * n + j];
        for k in 0..j {
            diag -= l[j * n + k] * l[j * n + k];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return None;
        }
        let diag = diag.sqrt();
        l[j * n + j] = diag;
        for i in j + 1..n {
            let mut s = l[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / diag;
        }
    }
    Some(l)
}

/// Solves `A x = b` for symmetric positive definite `A` via Cholesky.
///
/// If the factorization hits a nonpositive pivot (legal for theoretically
/// positive definite Grams whose smallest eigenvalue sits below roundoff),
/// a diagonal jitter `tau * trace/order` is added with `tau` escalating from
/// 1e-12 by factors of 10; above 1e-6 the matrix is declared not positive
/// definite.
pub fn spd_solve(a: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.all_finite() {
        return Err(Error::NonFinite);
    }
    if b.len() != a.n {
        return Err(Error::LengthMismatch { expected: a.n, got: b.len() });
    }
    let scale = a.trace() / a.n as f64;
    let mut tau = 0.0;
    let l = loop {
        if let Some(l) = try_cholesky(a, tau * scale) {
            break l;
        }
        tau = if tau == 0.0 { 1e-12 } else { tau * 10.0 };
        if tau > 1e-6 {
            return Err(Error::NotPositiveDefinite { jitter: tau * scale });
        }
    };
    let n = a.n;
    // Forward substitution L z = b, then back substitution L^T x = z.
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}

/// Deterministic 64-bit generator (SplitMix64).
///
/// The update adds the golden-ratio increment to the state and scrambles it
/// through two xor-multiply rounds; identical seeds give bitwise-identical
/// streams on every platform, with no global state anywhere.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Independent stream `stream` of the master `seed`: both words pass
    /// through the 64-bit finalizer before combining, so streams 0, 1, 2,...
    /// are decorrelated even for small seeds.
    pub fn derive(seed: u64, stream: u64) -> Self {
        Rng { state: mix64(seed).wrapping_add(mix64(stream ^ GOLDEN)) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform draw in `(0, 1]`; used where `ln` must not see zero.
    #[inline]
    fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// One Box-Muller pair of independent standard normals.
    fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

/// `count` i.i.d. standard normal draws, advancing the stream.
///
/// Draws are consumed in Box-Muller pairs; an odd `count` still consumes a
/// full pair and discards the second value, so the stream position depends
/// only on the number of pairs requested.
pub fn normal(rng: &mut Rng, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (z0, z1) = rng.normal_pair();
        out.push(z0);
        if out.len() < count {
            out.push(z1);
        }
    }
    out
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::DomainError("slope fit needs at least 2 points".into()));
    }
    for &v in xs.iter().chain(ys) {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::DomainError(format!("nonpositive value {v} in log-log fit")));
        }
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DomainError("all xs equal in log-log fit".into()));
    }
    Ok(sxy / sxx)
}
