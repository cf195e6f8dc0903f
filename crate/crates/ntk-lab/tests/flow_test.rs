use ntk_lab::flow::{
    excess_risk, fit, li_risk_expansion, linear_interp, sup_gap, t_star, Dataset, TimeSpec,
};
use ntk_lab::kernels::{ntk1_eval, KernelSpec, Point};
use ntk_lab::numerics::Rng;
use ntk_lab::Error;

fn scalar_points(xs: &[f64]) -> Vec<Point> {
    xs.iter().map(|&x| Point::scalar(x)).collect()
}

fn equispaced_dataset(n: usize, y: Vec<f64>) -> Dataset {
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    Dataset::new(scalar_points(&xs), y, 0.0, None).unwrap()
}

#[test]
fn dataset_validates_its_pieces() {
    let pts = scalar_points(&[0.0, 0.5, 1.0]);
    assert!(Dataset::new(pts.clone(), vec![1.0, 2.0], 0.0, None).is_err());
    assert!(Dataset::new(pts.clone(), vec![1.0, 2.0, 3.0], -0.1, None).is_err());
    assert!(matches!(
        Dataset::new(scalar_points(&[0.2, 0.2]), vec![0.0, 0.0], 0.0, None),
        Err(Error::DuplicatePoints { .. })
    ));
    let ok = Dataset::new(pts, vec![1.0, 2.0, 3.0], 0.5, Some("zero".into())).unwrap();
    assert_eq!(ok.n(), 3);
    assert_eq!(ok.dim(), 1);
    assert_eq!(ok.xs(), vec![0.0, 0.5, 1.0]);
}

// One training point makes the flow scalar: f_t(x0) = (1 - e^(-K t)) y
// with K = K(x0, x0), n = 1. This pins the filter transform exactly.
#[test]
fn single_point_flow_matches_scalar_closed_form() {
    let x0 = 0.3;
    let y0 = 2.0;
    let data = Dataset::new(vec![Point::scalar(x0)], vec![y0], 0.0, None).unwrap();
    let model = fit(&KernelSpec::Ntk1, data).unwrap();
    let k = ntk1_eval(x0, x0);
    for &t in &[0.0, 0.05, 0.7, 3.0] {
        let got = model.predict_xs(TimeSpec::Finite(t), &[x0]).unwrap()[0];
        let want = (1.0 - (-k * t).exp()) * y0;
        assert!((got - want).abs() < 1e-12, "t={t}: {got} vs {want}");
    }
    let ridgeless = model.predict_xs(TimeSpec::Infinity, &[x0]).unwrap()[0];
    assert!((ridgeless - y0).abs() < 1e-12);
    // Off-node prediction scales by the kernel ratio.
    let xq = 0.8;
    let got = model.predict_xs(TimeSpec::Infinity, &[xq]).unwrap()[0];
    assert!((got - ntk1_eval(xq, x0) / k * y0).abs() < 1e-12);
}

#[test]
fn prediction_at_time_zero_vanishes() {
    let data = equispaced_dataset(9, (0..9).map(|i| (i as f64).sin()).collect());
    let model = fit(&KernelSpec::Ntk1, data).unwrap();
    for v in model.predict_xs(TimeSpec::Finite(0.0), &[0.1, 0.33, 0.9]).unwrap() {
        assert!(v.abs() < 1e-12);
    }
}

#[test]
fn ridgeless_limit_interpolates_the_labels() {
    let y: Vec<f64> = (0..12).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
    let data = equispaced_dataset(12, y.clone());
    let xs = data.xs();
    let model = fit(&KernelSpec::Ntk1, data).unwrap();
    let at_nodes = model.predict_xs(TimeSpec::Infinity, &xs).unwrap();
    for (got, want) in at_nodes.iter().zip(y.iter()) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
}

#[test]
fn residual_norm_decays_monotonically() {
    let data = equispaced_dataset(10, (0..10).map(|i| (0.9 * i as f64).cos()).collect());
    let model = fit(&KernelSpec::Ntk1, data).unwrap();
    let y_norm = model.residual_norm(0.0);
    assert!(y_norm > 0.0);
    let mut prev = y_norm;
    for &t in &[0.5, 1.0, 2.0, 8.0, 32.0] {
        let r = model.residual_norm(t);
        assert!(r <= prev + 1e-12, "residual grew at t={t}");
        prev = r;
    }
    // The slowest mode decays like exp(-lambda_min t / n); run long enough
    // for 30 e-foldings of it and every component is gone.
    let t_long = 30.0 * model.dataset.n() as f64 / model.lambda_min();
    assert!(
        model.residual_norm(t_long) < 1e-12 * y_norm,
        "residual should be negligible after 30 slow-mode e-foldings"
    );
}

#[test]
fn refit_labels_matches_a_fresh_fit() {
    let y1: Vec<f64> = (0..8).map(|i| (i as f64 * 0.31).sin()).collect();
    let y2: Vec<f64> = (0..8).map(|i| (i as f64 * 0.77).cos()).collect();
    let m1 = fit(&KernelSpec::Ntk1, equispaced_dataset(8, y1)).unwrap();
    let m2 = m1.refit_labels(y2.clone()).unwrap();
    let fresh = fit(&KernelSpec::Ntk1, equispaced_dataset(8, y2)).unwrap();
    let q = [0.05, 0.4, 0.62, 0.97];
    let a = m2.predict_xs(TimeSpec::Finite(3.0), &q).unwrap();
    let b = fresh.predict_xs(TimeSpec::Finite(3.0), &q).unwrap();
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!(m1.refit_labels(vec![0.0; 3]).is_err());
}

#[test]
fn weights_reject_negative_times() {
    let model = fit(&KernelSpec::Ntk1, equispaced_dataset(4, vec![1.0; 4])).unwrap();
    assert!(model.weights(TimeSpec::Finite(-1.0)).is_err());
    assert!(model.weights(TimeSpec::Finite(f64::NAN)).is_err());
    assert_eq!(model.weights(TimeSpec::Infinity).unwrap().len(), 4);
    assert!(model.lambda_min() > 0.0);
    assert_eq!(model.eigenvalues().len(), 4);
}

#[test]
fn interpolant_is_exact_at_nodes_and_linear_between() {
    let data = Dataset::new(
        scalar_points(&[0.0, 0.2, 0.7, 1.0]),
        vec![1.0, -1.0, 3.0, 0.0],
        0.0,
        None,
    )
    .unwrap();
    for (i, &x) in [0.0, 0.2, 0.7, 1.0].iter().enumerate() {
        assert_eq!(linear_interp(&data, x).unwrap(), data.y[i]);
    }
    assert!((linear_interp(&data, 0.1).unwrap() - 0.0).abs() < 1e-15);
    assert!((linear_interp(&data, 0.45).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(
        linear_interp(&data, -0.1),
        Err(Error::OutOfRange { .. })
    ));
    assert!(matches!(
        linear_interp(&data, 1.1),
        Err(Error::OutOfRange { .. })
    ));
}

#[test]
fn interpolant_rejects_unsorted_designs() {
    let data = Dataset::new(
        scalar_points(&[0.0, 0.7, 0.2]),
        vec![0.0, 1.0, 2.0],
        0.0,
        None,
    )
    .unwrap();
    assert!(matches!(
        linear_interp(&data, 0.5),
        Err(Error::NotSorted { index: 2 })
    ));
}

#[test]
fn sup_gap_needs_a_dense_grid_and_reports_a_finite_value() {
    let mut rng = Rng::new(5);
    let y: Vec<f64> = (0..16).map(|_| if rng.uniform() < 0.5 { -1.0 } else { 1.0 }).collect();
    let model = fit(&KernelSpec::Ntk1, equispaced_dataset(16, y)).unwrap();
    assert!(sup_gap(&model, 16).is_err());
    let gap = sup_gap(&model, 64).unwrap();
    assert!(gap.is_finite() && gap >= 0.0);
    // The ridgeless flow stays within a small band of the interpolant.
    assert!(gap < 0.5, "gap {gap} unexpectedly large at n=16");
}

#[test]
fn trapezoid_risk_reproduces_an_exact_integral() {
    // predictor 0 against f_star(x) = x: integral of x^2 over [0,1] = 1/3.
    let risk = excess_risk(|_| 0.0, |p| p.x(), 1, 10_001, None).unwrap();
    assert!((risk - 1.0 / 3.0).abs() < 1e-8, "risk {risk}");
    let zero = excess_risk(|p| p.x(), |p| p.x(), 1, 101, None).unwrap();
    assert_eq!(zero, 0.0);
}

#[test]
fn monte_carlo_risk_requires_an_rng_in_higher_dimension() {
    assert!(matches!(
        excess_risk(|_| 0.0, |_| 0.0, 3, 100, None),
        Err(Error::MissingRng { d: 3 })
    ));
    let mut rng = Rng::new(11);
    // predictor 0 vs f_star(x) = 1 has risk exactly 1 in any dimension.
    let risk = excess_risk(|_| 0.0, |_| 1.0, 3, 4000, Some(&mut rng)).unwrap();
    assert!((risk - 1.0).abs() < 1e-12);
}

#[test]
fn stopping_horizon_matches_hand_values() {
    assert_eq!(t_star(1000, 1.0).unwrap(), 100.0);
    assert_eq!(t_star(8, 1.0).unwrap(), 4.0);
    assert_eq!(t_star(8, 2.5).unwrap(), 10.0);
    assert!(t_star(0, 1.0).is_err());
    assert!(t_star(8, 0.0).is_err());
}

#[test]
fn noise_quadratic_averages_to_two_thirds_variance() {
    // Constant noise e gives exactly e^2.
    let n = 9;
    let v = li_risk_expansion(&vec![0.0; n], &vec![0.5; n], n).unwrap();
    assert!((v - 0.25).abs() < 1e-15);
    // Monte Carlo mean approaches (2/3) sigma^2.
    let sigma = 0.5;
    let mut rng = Rng::new(404);
    let n = 64;
    let f = vec![0.0; n];
    let mut acc = 0.0;
    let draws = 3000;
    for _ in 0..draws {
        let eps: Vec<f64> = ntk_lab::numerics::normal(&mut rng, n)
            .iter()
            .map(|e| sigma * e)
            .collect();
        acc += li_risk_expansion(&f, &eps, n).unwrap();
    }
    let mean = acc / draws as f64;
    let target = 2.0 / 3.0 * sigma * sigma;
    assert!(
        ((mean - target) / target).abs() < 0.05,
        "MC mean {mean} vs {target}"
    );
}

#[test]
fn noise_quadratic_validates_lengths() {
    assert!(li_risk_expansion(&[0.0; 3], &[0.0; 4], 3).is_err());
    assert!(li_risk_expansion(&[0.0; 1], &[0.0; 1], 1).is_err());
}
