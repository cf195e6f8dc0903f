//! Finite-width two-layer ReLU network trained by full-batch gradient
//! descent, plus its empirical tangent kernel.
//!
//! The network is
//!
//! ```text
//! f(x) = b_out + (1/sqrt(m)) * sum_{r=1}^{2m} a_r relu(w_r . x + b_r),
//! ```
//!
//! with `2m` hidden units initialized in antisymmetric pairs
//! (`a_{m+r} = -a_r`, shared `w`, `b`), so `f = 0` identically at
//! initialization. The output offset `b_out` stays frozen at zero: only
//! `a`, `w`, and the hidden biases move during training.
//!
//! Descent with step `eta` on the loss `(1/2n) ||f - y||^2` tracks kernel
//! gradient flow at time `t = steps * eta` in the wide-network regime; the
//! snapshot machinery in [`train_until`] exists to compare the two
//! trajectories at matched times.

use crate::error::{Error, Result};
use crate::flow::{Dataset, NtkFlowModel, TimeSpec};
use crate::kernels::{KernelSpec, Point};
use crate::numerics::{normal, sym_eigenvalues, Rng, SymMatrix};

/// Parameters of the width-`2m` network.
#[derive(Clone, Debug)]
pub struct TwoLayerNet {
    /// Half-width: the network has `2 m` hidden units.
    pub m: usize,
    pub d: usize,
    /// Output weights, length `2 m`.
    pub a: Vec<f64>,
    /// Hidden weights, row-major `2 m x d`.
    pub w: Vec<f64>,
    /// Hidden biases, length `2 m`.
    pub b_hidden: Vec<f64>,
    /// Frozen output offset (zero from [`init_net`]).
    pub b_out: f64,
    /// Output scale `1 / sqrt(m)`.
    pub scale: f64,
}

/// Draws a mirrored standard-normal network: unit `m + r` copies unit `r`
/// with the output weight negated, so the initial function vanishes.
pub fn init_net(m: usize, d: usize, rng: &mut Rng) -> Result<TwoLayerNet> {
    if m < 1 {
        return Err(Error::TooSmall { need: 1, got: m });
    }
    if d < 1 {
        return Err(Error::TooSmall { need: 1, got: d });
    }
    let a_half = normal(rng, m);
    let w_half = normal(rng, m * d);
    let b_half = normal(rng, m);
    let mut a = Vec::with_capacity(2 * m);
    a.extend_from_slice(&a_half);
    a.extend(a_half.iter().map(|v| -v));
    let mut w = Vec::with_capacity(2 * m * d);
    w.extend_from_slice(&w_half);
    w.extend_from_slice(&w_half);
    let mut b_hidden = Vec::with_capacity(2 * m);
    b_hidden.extend_from_slice(&b_half);
    b_hidden.extend_from_slice(&b_half);
    Ok(TwoLayerNet { m, d, a, w, b_hidden, b_out: 0.0, scale: 1.0 / (m as f64).sqrt() })
}

impl TwoLayerNet {
    pub fn units(&self) -> usize {
        2 * self.m
    }

    /// Pre-activation of unit `r` at `x`.
    fn pre_activation(&self, r: usize, x: &[f64]) -> f64 {
        let mut h = self.b_hidden[r];
        for j in 0..self.d {
            h += self.w[r * self.d + j] * x[j];
        }
        h
    }

    pub fn forward(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.dim() });
        }
        let mut acc = 0.0;
        for r in 0..self.units() {
            let h = self.pre_activation(r, &x.coords);
            if h > 0.0 {
                acc += self.a[r] * h;
            }
        }
        Ok(self.b_out + self.scale * acc)
    }

    pub fn forward_batch(&self, xs: &[Point]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.forward(x)).collect()
    }
}

/// Flattened design matrix kept in one allocation for the training loop.
struct DesignBuf {
    n: usize,
    d: usize,
    x: Vec<f64>,
}

impl DesignBuf {
    fn new(points: &[Point], d: usize) -> Result<Self> {
        let n = points.len();
        let mut x = Vec::with_capacity(n * d);
        for p in points {
            if p.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
            }
            x.extend_from_slice(&p.coords);
        }
        Ok(DesignBuf { n, d, x })
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }
}

/// Fills `h` (unit-major `2m x n` pre-activations) and `f` (outputs).
fn forward_into(net: &TwoLayerNet, xb: &DesignBuf, h: &mut [f64], f: &mut [f64]) {
    let n = xb.n;
    f.iter_mut().for_each(|v| *v = 0.0);
    for r in 0..net.units() {
        let row = &mut h[r * n..(r + 1) * n];
        let a_r = net.a[r];
        for i in 0..n {
            let hv = net.pre_activation(r, xb.point(i));
            row[i] = hv;
            if hv > 0.0 {
                f[i] += a_r * hv;
            }
        }
    }
    for v in f.iter_mut() {
        *v = net.b_out + net.scale * *v;
    }
}

/// `(1/2n) ||f - y||^2` together with the rounded-label error rate.
///
/// A prediction counts as correct when `clamp(round(f_i), y_lo, y_hi)`
/// equals the (integer-valued) label exactly.
fn loss_and_errors(f: &[f64], y: &[f64], y_lo: f64, y_hi: f64) -> (f64, f64) {
    let n = f.len();
    let mut acc = 0.0;
    let mut wrong = 0usize;
    for i in 0..n {
        let u = f[i] - y[i];
        acc += u * u;
        if f[i].round().clamp(y_lo, y_hi) != y[i] {
            wrong += 1;
        }
    }
    (acc / (2.0 * n as f64), wrong as f64 / n as f64)
}

/// Gradient of `(1/2n) ||f - y||^2` in the movable parameters. `b_out` is
/// frozen, so it has no entry here.
#[derive(Clone, Debug)]
pub struct NetGradient {
    pub a: Vec<f64>,
    pub w: Vec<f64>,
    pub b_hidden: Vec<f64>,
}

fn grad_from(net: &TwoLayerNet, xb: &DesignBuf, h: &[f64], f: &[f64], y: &[f64]) -> NetGradient {
    let n = xb.n;
    let d = xb.d;
    let units = net.units();
    let s = net.scale / n as f64;
    let u: Vec<f64> = f.iter().zip(y).map(|(fi, yi)| fi - yi).collect();
    let mut ga = vec![0.0; units];
    let mut gw = vec![0.0; units * d];
    let mut gb = vec![0.0; units];
    for r in 0..units {
        let row = &h[r * n..(r + 1) * n];
        let mut sum_sigma = 0.0;
        let mut sum_ind = 0.0;
        let mut sum_x = [0.0f64; 8];
        debug_assert!(d <= 8, "widen the sum_x scratch for d > 8");
        for i in 0..n {
            let hv = row[i];
            // The subgradient convention at the kink is 1[h >= 0].
            if hv >= 0.0 {
                sum_sigma += u[i] * hv;
                sum_ind += u[i];
                let xi = xb.point(i);
                for j in 0..d {
                    sum_x[j] += u[i] * xi[j];
                }
            }
        }
        ga[r] = s * sum_sigma;
        let a_r = net.a[r];
        gb[r] = s * a_r * sum_ind;
        for j in 0..d {
            gw[r * d + j] = s * a_r * sum_x[j];
        }
    }
    NetGradient { a: ga, w: gw, b_hidden: gb }
}

/// Writes `base - eta * grad` into `out` (same shapes assumed).
fn apply_step(out: &mut TwoLayerNet, base: &TwoLayerNet, grad: &NetGradient, eta: f64) {
    for (o, (v, g)) in out.a.iter_mut().zip(base.a.iter().zip(&grad.a)) {
        *o = v - eta * g;
    }
    for (o, (v, g)) in out.w.iter_mut().zip(base.w.iter().zip(&grad.w)) {
        *o = v - eta * g;
    }
    for (o, (v, g)) in out.b_hidden.iter_mut().zip(base.b_hidden.iter().zip(&grad.b_hidden)) {
        *o = v - eta * g;
    }
    out.b_out = base.b_out;
}

/// Training loss and its gradient at the current parameters.
pub fn param_grad(net: &TwoLayerNet, data: &Dataset) -> Result<(NetGradient, f64)> {
    if data.dim() != net.d {
        return Err(Error::DimensionMismatch { expected: net.d, got: data.dim() });
    }
    let xb = DesignBuf::new(&data.x, net.d)?;
    let mut h = vec![0.0; net.units() * xb.n];
    let mut f = vec![0.0; xb.n];
    forward_into(net, &xb, &mut h, &mut f);
    let (loss, _) = loss_and_errors(&f, &data.y, f64::NEG_INFINITY, f64::INFINITY);
    Ok((grad_from(net, &xb, &h, &f, &data.y), loss))
}

/// `(1/2n) ||f(X) - y||^2`.
pub fn empirical_loss(net: &TwoLayerNet, data: &Dataset) -> Result<f64> {
    let f = net.forward_batch(&data.x)?;
    let mut acc = 0.0;
    for (fi, yi) in f.iter().zip(&data.y) {
        acc += (fi - yi) * (fi - yi);
    }
    Ok(acc / (2.0 * data.n() as f64))
}

/// One plain descent step; returns the stepped network and the loss at the
/// starting point.
pub fn train_step(net: &TwoLayerNet, data: &Dataset, eta: f64) -> Result<(TwoLayerNet, f64)> {
    if !(eta > 0.0) {
        return Err(Error::DomainError(format!("eta = {eta} must be > 0")));
    }
    let (grad, loss) = param_grad(net, data)?;
    let mut next = net.clone();
    apply_step(&mut next, net, &grad, eta);
    Ok((next, loss))
}

/// When to stop [`train_until`].
#[derive(Clone, Copy, Debug)]
pub enum StoppingRule {
    /// Loss at or below the tolerance.
    LossTol(f64),
    /// Every rounded prediction matches its label.
    LabelZero,
    /// First step whose accumulated time reaches `T` (within 1e-9).
    FixedTime(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    LossTol,
    LabelZero,
    FixedTime,
    MaxSteps,
}

/// Per-step record of the committed state.
#[derive(Clone, Copy, Debug)]
pub struct TrainStep {
    pub step_index: usize,
    /// Accumulated `sum of eta` over committed steps.
    pub time: f64,
    pub loss: f64,
    pub label_error_rate: f64,
}

/// Full parameter snapshot captured when the trajectory first reaches a
/// requested time.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub requested_time: f64,
    pub step_index: usize,
    pub time: f64,
    pub net: Box<TwoLayerNet>,
}

#[derive(Clone, Debug)]
pub struct TrainTrajectory {
    pub steps: Vec<TrainStep>,
    pub snapshots: Vec<Snapshot>,
    /// Step size at the start of the run.
    pub eta0: f64,
    /// Step size after any halvings.
    pub final_eta: f64,
    pub stop_reason: StopReason,
}

impl TrainTrajectory {
    pub fn final_step(&self) -> &TrainStep {
        self.steps.last().expect("trajectory records at least step 0")
    }

    /// Snapshot captured for the requested time, if one was taken.
    pub fn snapshot_at(&self, time: f64) -> Result<&TwoLayerNet> {
        self.snapshots
            .iter()
            .find(|s| (s.requested_time - time).abs() <= 1e-9)
            .map(|s| s.net.as_ref())
            .ok_or(Error::MissingSnapshot { time })
    }
}

/// Callback invoked on every committed training state: step index,
/// accumulated time, and the network parameters at that point.
pub type TrainObserver<'a> = &'a mut dyn FnMut(usize, f64, &TwoLayerNet);

/// Full-batch descent until the rule fires or `max_steps` commits happen.
///
/// Each iteration computes one gradient at the current point and proposes
/// `current - eta * grad`. If the proposal's loss is higher, `eta` halves
/// (at most 20 times over the whole run, gradient reused) before the step
/// commits; the proposal's forward pass then becomes the next iteration's
/// state, so an accepted step costs one gradient and one forward pass.
/// A committed loss above `1e3` times the initial loss aborts with
/// `DivergenceDetected`.
///
/// `snapshot_times` requests parameter snapshots at the first committed
/// step whose time reaches each value; `observer`, when given, sees every
/// committed state (including step 0).
pub fn train_until(
    net: &mut TwoLayerNet,
    data: &Dataset,
    rule: StoppingRule,
    eta: f64,
    max_steps: usize,
    snapshot_times: &[f64],
    mut observer: Option<TrainObserver<'_>>,
) -> Result<TrainTrajectory> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::DomainError(format!("eta = {eta} must be > 0 and finite")));
    }
    if data.dim() != net.d {
        return Err(Error::DimensionMismatch { expected: net.d, got: data.dim() });
    }
    if let StoppingRule::FixedTime(t) = rule {
        if !(t >= 0.0) {
            return Err(Error::DomainError(format!("stop time {t} must be >= 0")));
        }
    }
    let mut times: Vec<f64> = snapshot_times.to_vec();
    for &t in &times {
        if !(t >= 0.0) {
            return Err(Error::DomainError(format!("snapshot time {t} must be >= 0")));
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).expect("snapshot times are finite"));

    let xb = DesignBuf::new(&data.x, net.d)?;
    let n = xb.n;
    let y = &data.y;
    let y_lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let units = net.units();
    let mut h_cur = vec![0.0; units * n];
    let mut f_cur = vec![0.0; n];
    let mut h_next = vec![0.0; units * n];
    let mut f_next = vec![0.0; n];
    let mut proposed = net.clone();

    forward_into(net, &xb, &mut h_cur, &mut f_cur);
    let (mut loss_cur, mut err_cur) = loss_and_errors(&f_cur, y, y_lo, y_hi);
    let loss0 = loss_cur;

    let mut eta_cur = eta;
    let mut halvings = 0u32;
    let mut time = 0.0f64;
    let mut steps = Vec::new();
    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut next_snap = 0usize;

    let capture = |snaps: &mut Vec<Snapshot>,
                       idx: &mut usize,
                       step_index: usize,
                       time: f64,
                       net: &TwoLayerNet| {
        while *idx < times.len() && time + 1e-9 >= times[*idx] {
            snaps.push(Snapshot {
                requested_time: times[*idx],
                step_index,
                time,
                net: Box::new(net.clone()),
            });
            *idx += 1;
        }
    };

    let stopped = |loss: f64, err: f64, time: f64| -> bool {
        match rule {
            StoppingRule::LossTol(tol) => loss <= tol,
            StoppingRule::LabelZero => err == 0.0,
            StoppingRule::FixedTime(t) => time >= t - 1e-9,
        }
    };
    let reason = match rule {
        StoppingRule::LossTol(_) => StopReason::LossTol,
        StoppingRule::LabelZero => StopReason::LabelZero,
        StoppingRule::FixedTime(_) => StopReason::FixedTime,
    };

    steps.push(TrainStep { step_index: 0, time, loss: loss_cur, label_error_rate: err_cur });
    capture(&mut snapshots, &mut next_snap, 0, time, net);
    if let Some(obs) = observer.as_mut() {
        obs(0, time, net);
    }
    if stopped(loss_cur, err_cur, time) {
        return Ok(TrainTrajectory {
            steps,
            snapshots,
            eta0: eta,
            final_eta: eta_cur,
            stop_reason: reason,
        });
    }

    for step_index in 1..=max_steps {
        let grad = grad_from(net, &xb, &h_cur, &f_cur, y);
        loop {
            apply_step(&mut proposed, net, &grad, eta_cur);
            forward_into(&proposed, &xb, &mut h_next, &mut f_next);
            let (loss_next, err_next) = loss_and_errors(&f_next, y, y_lo, y_hi);
            let increased = !(loss_next <= loss_cur);
            if increased && halvings < 20 {
                eta_cur /= 2.0;
                halvings += 1;
                continue;
            }
            std::mem::swap(net, &mut proposed);
            std::mem::swap(&mut h_cur, &mut h_next);
            std::mem::swap(&mut f_cur, &mut f_next);
            loss_cur = loss_next;
            err_cur = err_next;
            break;
        }
        time += eta_cur;
        if !(loss_cur <= 1e3 * loss0) {
            return Err(Error::DivergenceDetected { loss: loss_cur, initial: loss0 });
        }
        steps.push(TrainStep { step_index, time, loss: loss_cur, label_error_rate: err_cur });
        capture(&mut snapshots, &mut next_snap, step_index, time, net);
        if let Some(obs) = observer.as_mut() {
            obs(step_index, time, net);
        }
        if stopped(loss_cur, err_cur, time) {
            return Ok(TrainTrajectory {
                steps,
                snapshots,
                eta0: eta,
                final_eta: eta_cur,
                stop_reason: reason,
            });
        }
    }

    Ok(TrainTrajectory {
        steps,
        snapshots,
        eta0: eta,
        final_eta: eta_cur,
        stop_reason: StopReason::MaxSteps,
    })
}

/// Empirical tangent kernel of the network at its current parameters,
/// including the unit contribution a trainable output offset would give,
/// so the wide-width limit is the closed-form kernel itself:
///
/// ```text
/// K_net(x, y) = 1 + (x . y + 1) (1/m) sum_r a_r^2 1[h_r(x) >= 0] 1[h_r(y) >= 0]
///             + (1/m) sum_r relu(h_r(x)) relu(h_r(y)).
/// ```
pub fn nnk_eval(net: &TwoLayerNet, x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != net.d || y.dim() != net.d {
        return Err(Error::DimensionMismatch {
            expected: net.d,
            got: if x.dim() != net.d { x.dim() } else { y.dim() },
        });
    }
    let mut dot_xy = 0.0;
    for j in 0..net.d {
        dot_xy += x.coords[j] * y.coords[j];
    }
    let s2 = net.scale * net.scale;
    let mut ind = 0.0;
    let mut act = 0.0;
    for r in 0..net.units() {
        let hx = net.pre_activation(r, &x.coords);
        let hy = net.pre_activation(r, &y.coords);
        if hx >= 0.0 && hy >= 0.0 {
            ind += net.a[r] * net.a[r];
            act += hx.max(0.0) * hy.max(0.0);
        }
    }
    Ok(1.0 + (dot_xy + 1.0) * s2 * ind + s2 * act)
}

/// Empirical tangent-kernel Gram over `points`.
pub fn nnk_gram(net: &TwoLayerNet, points: &[Point]) -> Result<SymMatrix> {
    let n = points.len();
    if n == 0 {
        return Err(Error::TooSmall { need: 1, got: 0 });
    }
    let units = net.units();
    // Per-point activation data, unit-major, shared across all pairs.
    let mut act = vec![0.0; units * n];
    let mut fired = vec![false; units * n];
    for (i, p) in points.iter().enumerate() {
        if p.dim() != net.d {
            return Err(Error::DimensionMismatch { expected: net.d, got: p.dim() });
        }
        for r in 0..units {
            let h = net.pre_activation(r, &p.coords);
            if h >= 0.0 {
                act[r * n + i] = h;
                fired[r * n + i] = true;
            }
        }
    }
    let s2 = net.scale * net.scale;
    let mut out = SymMatrix::zeros(n);
    for i in 0..n {
        for k in i..n {
            let mut dot_xy = 0.0;
            for j in 0..net.d {
                dot_xy += points[i].coords[j] * points[k].coords[j];
            }
            let mut ind = 0.0;
            let mut sig = 0.0;
            for r in 0..units {
                if fired[r * n + i] && fired[r * n + k] {
                    ind += net.a[r] * net.a[r];
                    sig += act[r * n + i] * act[r * n + k];
                }
            }
            out.set(i, k, 1.0 + (dot_xy + 1.0) * s2 * ind + s2 * sig);
        }
    }
    Ok(out)
}

/// Largest absolute entrywise gap between the network's tangent kernel and
/// a closed-form kernel over all point pairs.
pub fn kernel_deviation(net: &TwoLayerNet, spec: &KernelSpec, points: &[Point]) -> Result<f64> {
    let empirical = nnk_gram(net, points)?;
    let mut dev: f64 = 0.0;
    for i in 0..points.len() {
        for k in i..points.len() {
            let exact = spec.eval(&points[i], &points[k])?;
            dev = dev.max((empirical.get(i, k) - exact).abs());
        }
    }
    Ok(dev)
}

/// Conservative step size: a quarter of the descent stability limit of the
/// linearized dynamics, capped at 0.1.
pub fn default_eta(net: &TwoLayerNet, points: &[Point]) -> Result<f64> {
    let gram = nnk_gram(net, points)?;
    let values = sym_eigenvalues(&gram)?;
    let lambda_max = values[0];
    if !(lambda_max > 0.0) {
        return Err(Error::DomainError(format!(
            "tangent Gram has non-positive top eigenvalue {lambda_max}"
        )));
    }
    Ok((0.5 * points.len() as f64 / lambda_max).min(0.1))
}

/// Sup-norm gap on `grid` between trajectory snapshots and the kernel flow
/// at the requested times. Fails with `MissingSnapshot` when the
/// trajectory has no snapshot for a time.
pub fn function_deviation(
    traj: &TrainTrajectory,
    flow: &NtkFlowModel,
    grid: &[Point],
    times: &[f64],
) -> Result<Vec<f64>> {
    let mut gaps = Vec::with_capacity(times.len());
    for &t in times {
        let net = traj.snapshot_at(t)?;
        let net_vals = net.forward_batch(grid)?;
        let flow_vals = flow.predict(TimeSpec::Finite(t), grid)?;
        let mut gap: f64 = 0.0;
        for (nv, fv) in net_vals.iter().zip(&flow_vals) {
            gap = gap.max((nv - fv).abs());
        }
        gaps.push(gap);
    }
    Ok(gaps)
}
