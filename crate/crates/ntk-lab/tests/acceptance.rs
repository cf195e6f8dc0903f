//! Acceptance suite: one test per quantitative law the library must
//! reproduce, each printing a single PASS/FAIL line with the measured
//! quantities and the tolerances it was judged against. All tolerances,
//! seeds, scales, and runtime budgets are pinned here, not inherited from
//! scenario defaults silently; where a test drives a full scenario it
//! recomputes the verdicts from the raw records.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::Instant;

use ntk_lab::experiments::data::gen_equispaced;
use ntk_lab::experiments::{run, ExperimentConfig, RunRecord};
use ntk_lab::flow::Dataset;
use ntk_lab::kernels::{gram, min_pairwise_distance, KernelSpec, Point};
use ntk_lab::net::{empirical_loss, init_net, param_grad, TwoLayerNet};
use ntk_lab::numerics::{loglog_slope, normal, sym_eigenvalues, Rng};
use ntk_lab::spectral::{
    decay_report, empirical_mercer, g_alpha_inverse, mercer_spectrum, min_eigenvalue,
};

/// Prints the criterion's verdict line and fails the test if either the
/// numerical checks or the runtime budget were missed.
fn report(num: u8, label: &str, budget_s: f64, t0: Instant, ok: bool, detail: &str) {
    let elapsed = t0.elapsed().as_secs_f64();
    let in_budget = elapsed <= budget_s;
    let verdict = ok && in_budget;
    println!(
        "[{}] criterion {num:02} {label}: {detail} [{elapsed:.1}s of {budget_s:.0}s]",
        if verdict { "PASS" } else { "FAIL" }
    );
    assert!(
        verdict,
        "criterion {num:02} {label}: checks_ok={ok} in_budget={in_budget} \
         ({elapsed:.1}s of {budget_s:.0}s) {detail}"
    );
}

fn params(r: &RunRecord) -> serde_json::Value {
    serde_json::from_str(&r.param_json).expect("record params are JSON")
}

fn median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty(), "median of an empty slice");
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite metric"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Sorted uniform design in [0, 1] with pairwise gaps above `min_gap`,
/// redrawn until separated.
fn separated_sorted(rng: &mut Rng, n: usize, min_gap: f64) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        x.sort_by(|a, b| a.partial_cmp(b).expect("uniforms are finite"));
        let d_min = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if n < 2 || d_min > min_gap {
            return x;
        }
    }
}

#[test]
fn criterion_01_min_eigenvalue_separation_law() {
    let t0 = Instant::now();
    let n_list = [8usize, 16, 32, 64, 128, 256, 512, 1024];
    let g1 = KernelSpec::GAlpha { alpha: 1.0 };
    let mut bounds_ok = true;
    let mut ratios = Vec::new();
    for &n in &n_list {
        let x = gen_equispaced(n, 0.0, PI).unwrap();
        let d_min = min_pairwise_distance(&x);
        let lam_g = min_eigenvalue(&gram(&g1, &x).unwrap()).unwrap();
        let lam_k = min_eigenvalue(&gram(&KernelSpec::Ntk1, &x).unwrap()).unwrap();
        bounds_ok &= lam_g >= d_min / (2.0 * PI) - 1e-10 && lam_g <= 2.0 * d_min / PI + 1e-10;
        ratios.push(lam_k / d_min);
    }
    let band = ratios.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        / ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    report(
        1,
        "min-eigenvalue separation law",
        60.0,
        t0,
        bounds_ok && band <= 4.0,
        &format!(
            "lambda_min(G_1) within [d_min/2pi, 2 d_min/pi] (slack 1e-10) at every \
             n in 8..=1024: {bounds_ok}; lambda_min(K_1)/d_min band factor {band:.3} <= 4"
        ),
    );
}

#[test]
fn criterion_02_mercer_eigenvalue_decay() {
    let t0 = Instant::now();
    let pi3 = PI.powi(3);

    // Even modes at alpha = 1 are exact: omega_j = (j-1) pi, so
    // lambda_j = 2 / (pi^3 (j-1)^2) to relative 1e-12.
    let sp1 = mercer_spectrum(1.0, 40).unwrap();
    let mut even_ok = true;
    for j in (2..=40usize).step_by(2) {
        let exact = 2.0 / (pi3 * ((j - 1) as f64).powi(2));
        even_ok &= (sp1.eigenvalues[j - 1] / exact - 1.0).abs() <= 1e-12;
    }

    // The leading frequency lies in [pi/6, pi/2], so lambda_1 lies in
    // [8/pi^3, 72/pi^3] for both validated alphas.
    let sp97 = mercer_spectrum(9.0 / 7.0, 40).unwrap();
    let lam1_ok = [&sp1, &sp97]
        .iter()
        .all(|sp| sp.eigenvalues[0] >= 8.0 / pi3 && sp.eigenvalues[0] <= 72.0 / pi3);

    // Fitted decay of the transcendental spectra over j in [2, 40].
    let slope1 = decay_report(&sp1.eigenvalues, 2, 40).unwrap();
    let slope97 = decay_report(&sp97.eigenvalues, 2, 40).unwrap();
    let trans_ok = (-2.02..=-1.98).contains(&slope1) && (-2.02..=-1.98).contains(&slope97);

    // Grid-2000 operator estimates of the NTK spectrum: same decay within
    // a looser band, and each mode bracketed by the arc-kernel spectra.
    let emp = empirical_mercer(&KernelSpec::Ntk1, 2000, 40).unwrap();
    let emp_hi = emp.iter().take_while(|&&v| v > 0.0).count().min(40);
    let emp_slope = decay_report(&emp, 2, emp_hi).unwrap();
    let emp_ok = (-2.15..=-1.85).contains(&emp_slope);
    let mut bracket_ok = true;
    for j in 2..=emp_hi {
        bracket_ok &= emp[j - 1] >= 0.95 * sp1.eigenvalues[j - 1]
            && emp[j - 1] <= 1.05 * 7.0 * sp97.eigenvalues[j - 1];
    }

    report(
        2,
        "eigenvalue decay rates",
        120.0,
        t0,
        even_ok && lam1_ok && trans_ok && emp_ok && bracket_ok,
        &format!(
            "even modes exact to 1e-12: {even_ok}; lambda_1 bracketed: {lam1_ok}; \
             transcendental slopes {slope1:.4}/{slope97:.4} in [-2.02, -1.98]; \
             grid-2000 slope {emp_slope:.4} in [-2.15, -1.85]; \
             modes 2..={emp_hi} inside [0.95 lambda^(1), 7.35 lambda^(9/7)]: {bracket_ok}"
        ),
    );
}

#[test]
fn criterion_03_random_design_sandwich() {
    let t0 = Instant::now();
    let mut all_ok = true;
    let mut smallest_slack = f64::INFINITY;
    for k in 0..50u64 {
        let mut rng = Rng::derive(9001, k);
        let n = 2 + (rng.next_u64() % 31) as usize;
        let xs = separated_sorted(&mut rng, n, 1e-6);
        let pts: Vec<Point> = xs.iter().map(|&v| Point::scalar(v)).collect();
        let k_m = gram(&KernelSpec::Ntk1, &pts).unwrap().matrix;
        let g1 = gram(&KernelSpec::GAlpha { alpha: 1.0 }, &pts).unwrap().matrix;
        let g97 = gram(&KernelSpec::GAlpha { alpha: 9.0 / 7.0 }, &pts).unwrap().matrix;
        let lo = *sym_eigenvalues(&k_m.sub(&g1).unwrap()).unwrap().last().unwrap();
        let hi = *sym_eigenvalues(&g97.scale(7.0).sub(&k_m).unwrap()).unwrap().last().unwrap();
        smallest_slack = smallest_slack.min(lo).min(hi);
        all_ok &= lo >= -1e-10 && hi >= -1e-10;
    }
    report(
        3,
        "two-sided Gram sandwich on random designs",
        10.0,
        t0,
        all_ok,
        &format!(
            "50 random sets (n <= 32): K - G_1 and 7 G_9/7 - K psd to -1e-10 \
             everywhere: {all_ok} (worst eigenvalue {smallest_slack:.2e})"
        ),
    );
}

#[test]
fn criterion_04_closed_form_gram_inverse() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let mut rng = Rng::derive(4242, k);
        let n = 2 + (rng.next_u64() % 63) as usize;
        let xs = separated_sorted(&mut rng, n, 1e-4);
        for &alpha in &[1.0, 9.0 / 7.0] {
            let pts: Vec<Point> = xs.iter().map(|&v| Point::scalar(v)).collect();
            let g = gram(&KernelSpec::GAlpha { alpha }, &pts).unwrap().matrix;
            let inv = g_alpha_inverse(alpha, &xs).unwrap();
            for i in 0..n {
                let col: Vec<f64> = (0..n).map(|j| inv.get(j, i)).collect();
                for (j, v) in g.mat_vec(&col).iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((v - target).abs());
                }
            }
        }
    }
    report(
        4,
        "closed-form arc-kernel inverse",
        5.0,
        t0,
        worst <= 1e-8,
        &format!(
            "20 random sorted designs (n <= 64), alpha in {{1, 9/7}}: \
             max |G inv(G) - I| = {worst:.2e} <= 1e-8"
        ),
    );
}

#[test]
fn criterion_05_interpolant_gap_rate() {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::defaults_for("interp_gap").unwrap();
    assert_eq!(cfg.n_list, (1..=10).map(|k| 100 * k).collect::<Vec<_>>());
    assert_eq!(cfg.grid_n, 4096);
    let (records, _) = run(&cfg).unwrap();

    let mut ns = Vec::new();
    let mut gaps = Vec::new();
    let mut max_resid = 0.0f64;
    for r in &records {
        match r.metric.as_str() {
            "sup_gap" => {
                ns.push(params(r)["n"].as_f64().unwrap());
                gaps.push(r.value);
            }
            "node_residual" => max_resid = max_resid.max(r.value),
            _ => {}
        }
    }
    let slope = loglog_slope(&ns, &gaps).unwrap();
    // Labels are +-1, so the node residual is already relative to the
    // sup norm of the labels.
    let ok = (-2.3..=-1.7).contains(&slope) && max_resid <= 1e-8;
    report(
        5,
        "ridgeless gap to the piecewise-linear interpolant",
        300.0,
        t0,
        ok,
        &format!(
            "sup-gap slope over n in 100..=1000: {slope:.4} in [-2.3, -1.7]; \
             worst node residual {max_resid:.2e} <= 1e-8 ||y||_inf"
        ),
    );
}

#[test]
fn criterion_06_early_stopping_risk_decay() {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::defaults_for("early_stop").unwrap();
    assert_eq!(cfg.n_list, vec![128, 256, 512, 1024, 2048]);
    assert_eq!(cfg.sigma, 0.5);
    assert_eq!(cfg.t_star_c, 1.0);
    let (records, _) = run(&cfg).unwrap();

    let mut ns = Vec::new();
    let mut medians = Vec::new();
    for &n in &cfg.n_list {
        let risks: Vec<f64> = records
            .iter()
            .filter(|r| {
                r.metric == "excess_risk_tstar" && params(r)["n"].as_u64() == Some(n as u64)
            })
            .map(|r| r.value)
            .collect();
        assert_eq!(risks.len(), 20, "twenty noise seeds per size");
        ns.push(n as f64);
        medians.push(median(risks));
    }
    let slope = loglog_slope(&ns, &medians).unwrap();
    report(
        6,
        "risk decay under early stopping at t* = n^(2/3)",
        600.0,
        t0,
        (-0.90..=-0.45).contains(&slope),
        &format!(
            "median excess risk (20 seeds, sigma = 0.5) over n in 128..=2048 \
             fits slope {slope:.4} in [-0.90, -0.45]"
        ),
    );
}

#[test]
fn criterion_07_ridgeless_risk_floor() {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::defaults_for("overfit_floor").unwrap();
    assert_eq!(cfg.n_list, vec![128, 256, 512, 1024, 2048]);
    assert_eq!(cfg.sigma, 0.5);
    let (records, _) = run(&cfg).unwrap();

    // sigma^2 / 4 with sigma = 0.5.
    let floor = 0.0625;
    let mut floor_ok = true;
    let mut counts = Vec::new();
    for &n in &cfg.n_list {
        let risks: Vec<f64> = records
            .iter()
            .filter(|r| {
                r.metric == "excess_risk_inf" && params(r)["n"].as_u64() == Some(n as u64)
            })
            .map(|r| r.value)
            .collect();
        assert_eq!(risks.len(), 20, "twenty noise seeds per size");
        let count = risks.iter().filter(|&&v| v >= floor).count();
        counts.push(count);
        floor_ok &= count >= 18;
    }

    let mc = records
        .iter()
        .find(|r| r.metric == "li_noise_mc_mean")
        .expect("Monte Carlo record present");
    let draws = params(mc)["draws"].as_u64().unwrap();
    let target = 2.0 / 3.0 * 0.25;
    let mc_ok = draws == 10_000 && (mc.value / target - 1.0).abs() <= 0.05;

    report(
        7,
        "noisy interpolation keeps a risk floor",
        300.0,
        t0,
        floor_ok && mc_ok,
        &format!(
            "risk(t = inf) >= {floor} for >= 18/20 seeds at every n (counts {counts:?}); \
             linear-interpolant noise term over 10^4 draws = {:.5} within 5% of {target:.5}",
            mc.value
        ),
    );
}

#[test]
fn criterion_08_tangent_kernel_uniform_convergence() {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::defaults_for("uniform_kernel").unwrap();
    assert_eq!(cfg.m_list, vec![64, 256, 1024, 4096]);
    assert_eq!(cfg.grid_n, 64);
    let (records, _) = run(&cfg).unwrap();

    let mean_dev = |m: usize| -> f64 {
        let devs: Vec<f64> = records
            .iter()
            .filter(|r| {
                r.metric == "kernel_dev_init" && params(r)["m"].as_u64() == Some(m as u64)
            })
            .map(|r| r.value)
            .collect();
        assert_eq!(devs.len(), 5, "five init seeds per width");
        devs.iter().sum::<f64>() / devs.len() as f64
    };
    let dev_64 = mean_dev(64);
    let dev_4096 = mean_dev(4096);
    let ratio = dev_4096 / dev_64;
    report(
        8,
        "empirical tangent kernel concentrates in width",
        120.0,
        t0,
        ratio <= 0.25,
        &format!(
            "5-seed mean sup |NNK - K_1| over the 64-grid at init: \
             {dev_64:.4} (m = 64) vs {dev_4096:.4} (m = 4096), ratio {ratio:.3} <= 0.25"
        ),
    );
}

#[test]
fn criterion_09_network_function_tracks_flow() {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::defaults_for("uniform_function").unwrap();
    assert_eq!(cfg.n_list, vec![16]);
    assert_eq!(cfg.m_list, vec![256, 4096]);
    assert_eq!(cfg.seed, 1);
    let (records, _) = run(&cfg).unwrap();

    let gap = |m: usize, s: usize, t: f64| -> f64 {
        records
            .iter()
            .find(|r| {
                if r.metric != "function_dev" {
                    return false;
                }
                let p = params(r);
                p["m"].as_u64() == Some(m as u64)
                    && p["seed_index"].as_u64() == Some(s as u64)
                    && p["time"].as_f64() == Some(t)
            })
            .expect("gap record exists")
            .value
    };

    // Width ordering of the sup gap to the flow at t in {n/4, n, 4n}. At
    // the earliest time a width-independent transient (the Euler steps have
    // only just begun resolving the flow) can dominate the width effect, so
    // a strict seed majority is required there; both later checkpoints must
    // order correctly for every seed.
    let times = [4.0, 16.0, 64.0];
    let mut early_hits = 0;
    let mut late_ok = true;
    for s in 0..3usize {
        if gap(4096, s, times[0]) < gap(256, s, times[0]) {
            early_hits += 1;
        }
        late_ok &= gap(4096, s, times[1]) < gap(256, s, times[1]);
        late_ok &= gap(4096, s, times[2]) < gap(256, s, times[2]);
    }
    let early_ok = 2 * early_hits > 3;

    // Along every wide run the training residual stays under the relaxed
    // kernel envelope 1.1 exp(-lambda_min t / (2n)) ||y||^2.
    let decay_ok = records
        .iter()
        .filter(|r| {
            r.metric == "residual_decay_ok" && params(r)["m"].as_u64() == Some(4096)
        })
        .all(|r| r.value == 1.0);

    report(
        9,
        "wide-network function tracks the kernel flow",
        600.0,
        t0,
        early_ok && late_ok && decay_ok,
        &format!(
            "gap(m = 4096) < gap(m = 256) for {early_hits}/3 seeds at t = n/4 \
             (majority needed) and all seeds at t = n and t = 4n: {late_ok}; \
             residual under 1.1 exp(-lambda_min t / 2n) ||y||^2 on every wide run: {decay_ok}"
        ),
    );
}

/// Smallest |pre-activation| over all units and points; central differences
/// are exact only while no unit changes side of its kink.
fn kink_margin(net: &TwoLayerNet, data: &Dataset) -> f64 {
    let mut margin = f64::INFINITY;
    for p in &data.x {
        for r in 0..net.units() {
            let mut h = net.b_hidden[r];
            for (j, &c) in p.coords.iter().enumerate() {
                h += net.w[r * net.d + j] * c;
            }
            margin = margin.min(h.abs());
        }
    }
    margin
}

#[test]
fn criterion_10_analytic_gradient_vs_central_differences() {
    let t0 = Instant::now();
    let fd_h = 1e-6;
    let mut checked = 0;
    let mut stream = 0u64;
    let mut worst_rel = 0.0f64;
    while checked < 10 {
        stream += 1;
        let mut rng = Rng::derive(5150, stream);
        let m = 2 + (rng.next_u64() % 31) as usize;
        let d = 1 + (rng.next_u64() % 3) as usize;
        let net = init_net(m, d, &mut rng).unwrap();
        let x: Vec<Point> =
            (0..6).map(|_| Point::new((0..d).map(|_| rng.uniform()).collect())).collect();
        let y = normal(&mut rng, 6);
        let data = Dataset::new(x, y, 0.0, None).unwrap();
        if kink_margin(&net, &data) < 1e3 * fd_h {
            continue; // a unit sits near its kink; take the next draw
        }

        let (grad, _) = param_grad(&net, &data).unwrap();
        let flat: Vec<f64> =
            grad.a.iter().chain(grad.w.iter()).chain(grad.b_hidden.iter()).cloned().collect();
        let g_inf = flat.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        assert!(g_inf > 0.0, "gradient should not vanish on random data");

        let mut worst = 0.0f64;
        for k in 0..flat.len() {
            let bump = |net: &mut TwoLayerNet, delta: f64| {
                let (units, dd) = (net.units(), net.d);
                if k < units {
                    net.a[k] += delta;
                } else if k < units + units * dd {
                    net.w[k - units] += delta;
                } else {
                    net.b_hidden[k - units - units * dd] += delta;
                }
            };
            let mut hi = net.clone();
            let mut lo = net.clone();
            bump(&mut hi, fd_h);
            bump(&mut lo, -fd_h);
            let fd = (empirical_loss(&hi, &data).unwrap() - empirical_loss(&lo, &data).unwrap())
                / (2.0 * fd_h);
            worst = worst.max((fd - flat[k]).abs());
        }
        worst_rel = worst_rel.max(worst / g_inf);
        checked += 1;
    }
    report(
        10,
        "analytic gradient against central differences",
        5.0,
        t0,
        worst_rel <= 1e-5,
        &format!(
            "10 random nets (m <= 32, d <= 3), kink-guarded central differences: \
             worst relative error {worst_rel:.2e} <= 1e-5"
        ),
    );
}

#[test]
fn criterion_11_label_corruption_stopping_monotonicity() {
    let t0 = Instant::now();
    let mut cfg = ExperimentConfig::defaults_for("stopping_rules").unwrap();
    assert_eq!(cfg.corruption_p_list, vec![0.0, 0.3, 0.6]);
    // The scenario's default scale (n = 256, m = 2048) is a long overnight
    // run on one core; this pinned reduction keeps every cell inside the
    // budget while leaving the laws under test unchanged.
    cfg.n_list = vec![64];
    cfg.m_list = vec![256];
    let (records, _) = run(&cfg).unwrap();

    let cell = |metric: &str, s: usize, p: f64| -> f64 {
        records
            .iter()
            .find(|r| {
                if r.metric != metric {
                    return false;
                }
                let prm = params(r);
                prm["seed_index"].as_u64() == Some(s as u64) && prm["p"].as_f64() == Some(p)
            })
            .expect("record exists for every (seed, p) cell")
            .value
    };

    let p_list = [0.0, 0.3, 0.6];
    let all_reached =
        (0..3).all(|s| p_list.iter().all(|&p| cell("label_zero_reached", s, p) == 1.0));

    let med_steps: Vec<f64> = p_list
        .iter()
        .map(|&p| median((0..3).map(|s| cell("steps_to_label_zero", s, p)).collect()))
        .collect();
    let med_monotone = med_steps.windows(2).all(|w| w[1] >= w[0]);

    let mut gap_hits = 0;
    for s in 0..3usize {
        let gaps: Vec<f64> = p_list.iter().map(|&p| cell("acc_gap", s, p)).collect();
        if gaps.windows(2).all(|w| w[1] >= w[0] - 1e-12) {
            gap_hits += 1;
        }
    }
    let gap_majority = 2 * gap_hits > 3;

    report(
        11,
        "label corruption slows stopping and widens the accuracy gap",
        900.0,
        t0,
        all_reached && med_monotone && gap_majority,
        &format!(
            "every cell reached zero label error: {all_reached}; median steps \
             {med_steps:?} nondecreasing in p: {med_monotone}; best-minus-final \
             accuracy gap nondecreasing for {gap_hits}/3 seeds (majority needed)"
        ),
    );
}
