use ntk_lab::kernels::{
    g_alpha_eval, gram, kernel_row, min_pairwise_distance, ntk1_eval, ntk1_second_derivative,
    ntk_eval, pi_kernels, psi1, KernelSpec, Point,
};
use ntk_lab::Error;

const TOL: f64 = 1e-14;

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}

// Values computed independently at 40-digit precision from the closed forms.
#[test]
fn scalar_kernel_matches_frozen_values() {
    let cases = [
        (0.3, 0.7, 3.3013877442832529),
        (0.0, 1.0, 2.8183098861837907),
        (-0.5, 0.8, 2.1789704558311407),
        (0.25, 0.25, 3.125),
    ];
    for (x, y, want) in cases {
        assert!(close(ntk1_eval(x, y), want, TOL), "K({x},{y})");
        assert!(close(ntk1_eval(y, x), want, TOL), "K({y},{x})");
    }
}

#[test]
fn angle_matches_frozen_values() {
    let cases = [
        (0.3, 0.7, 0.31926916991134152),
        (0.0, 1.0, 0.78539816339744831),
        (-0.5, 0.8, 1.1383885512243588),
        (0.25, 0.25, 0.0),
    ];
    for (x, y, want) in cases {
        assert!(
            (psi1(x, y) - want).abs() < TOL,
            "psi({x},{y}) = {}",
            psi1(x, y)
        );
    }
}

#[test]
fn arc_kernels_match_frozen_values() {
    let cases = [
        (0.3, 0.7, 0.89837346686352755, 1.2143558493783846),
        (0.0, 1.0, 0.75, 1.0683098861837907),
        (-0.5, 0.8, 0.637639669826844, 0.79638665393503427),
        (0.25, 0.25, 1.0, 1.0625),
    ];
    for (x, y, p0_want, p1_want) in cases {
        let (p0, p1) = pi_kernels(x, y);
        assert!(close(p0, p0_want, TOL), "Pi0({x},{y}) = {p0}");
        assert!(close(p1, p1_want, TOL), "Pi1({x},{y}) = {p1}");
    }
}

#[test]
fn multivariate_kernel_matches_frozen_values() {
    let x2 = Point::new(vec![0.3, 0.4]);
    let y2 = Point::new(vec![0.1, 0.9]);
    assert!(close(
        ntk_eval(2, &x2, &y2).unwrap(),
        3.6135722279621227,
        TOL
    ));
    let x3 = Point::new(vec![0.2, 0.5, 0.8]);
    let y3 = Point::new(vec![0.9, 0.1, 0.4]);
    assert!(close(
        ntk_eval(3, &x3, &y3).unwrap(),
        3.832601254824662,
        TOL
    ));
}

#[test]
fn diagonal_is_two_x_squared_plus_three() {
    for &x in &[-2.0, -0.4, 0.0, 0.3, 1.0, 5.0] {
        let want = 2.0 * x * x + 3.0;
        assert!(close(ntk1_eval(x, x), want, TOL), "K({x},{x})");
    }
}

#[test]
fn scalar_and_multivariate_paths_agree_in_dimension_one() {
    for &(x, y) in &[(0.3, 0.7), (-1.5, 2.0), (0.0, 0.0), (0.9, 0.91)] {
        let a = ntk1_eval(x, y);
        let b = ntk_eval(1, &Point::scalar(x), &Point::scalar(y)).unwrap();
        assert!((a - b).abs() < 1e-13, "d=1 mismatch at ({x},{y}): {a} vs {b}");
    }
}

// The three scalar kernels satisfy two exact linear identities:
//   K = G_1 + 2 Pi_1          and   K = 2 Pi_0 (1 + x y) - G_1 + 2.
#[test]
fn kernel_identities_hold_on_a_grid() {
    for i in 0..25 {
        for j in 0..25 {
            let x = -1.2 + 0.1 * i as f64;
            let y = -1.2 + 0.1 * j as f64;
            let k = ntk1_eval(x, y);
            let g1 = g_alpha_eval(1.0, x, y);
            let (p0, p1) = pi_kernels(x, y);
            assert!(
                (k - (g1 + 2.0 * p1)).abs() < 1e-12,
                "K = G1 + 2 Pi1 fails at ({x},{y})"
            );
            assert!(
                (k - (2.0 * p0 * (1.0 + x * y) - g1 + 2.0)).abs() < 1e-12,
                "K = 2 Pi0 (1+xy) - G1 + 2 fails at ({x},{y})"
            );
        }
    }
}

#[test]
fn g_alpha_is_alpha_minus_scaled_distance() {
    assert!(close(g_alpha_eval(1.0, 0.2, 0.5), 1.0 - 0.3 / std::f64::consts::PI, TOL));
    let a = 9.0 / 7.0;
    assert!(close(g_alpha_eval(a, 0.9, 0.1), a - 0.8 / std::f64::consts::PI, TOL));
}

#[test]
fn kernel_spec_eval_checks_dimensions() {
    let spec = KernelSpec::NtkD { d: 2 };
    let x = Point::new(vec![0.1, 0.2]);
    let bad = Point::new(vec![0.1, 0.2, 0.3]);
    assert!(spec.eval(&x, &x).is_ok());
    assert!(matches!(
        spec.eval(&x, &bad),
        Err(Error::DimensionMismatch { .. })
    ));
    assert_eq!(spec.dim(), 2);
    assert_eq!(KernelSpec::Ntk1.dim(), 1);
}

#[test]
fn spec_eval1_agrees_with_direct_forms() {
    let x = 0.35;
    let y = -0.6;
    assert_eq!(KernelSpec::Ntk1.eval1(x, y), ntk1_eval(x, y));
    assert_eq!(
        KernelSpec::GAlpha { alpha: 1.0 }.eval1(x, y),
        g_alpha_eval(1.0, x, y)
    );
    let (p0, p1) = pi_kernels(x, y);
    assert_eq!(KernelSpec::Pi0.eval1(x, y), p0);
    assert_eq!(KernelSpec::Pi1.eval1(x, y), p1);
}

#[test]
fn second_derivative_errors_at_nodes_and_is_finite_between() {
    let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
    let err = ntk1_second_derivative(0.5, &nodes);
    assert!(matches!(err, Err(Error::AtNode { index: 2 })));
    let vals = ntk1_second_derivative(0.4, &nodes).unwrap();
    assert_eq!(vals.len(), nodes.len());
    assert!(vals.iter().all(|v| v.is_finite()));
}

#[test]
fn min_pairwise_distance_on_known_sets() {
    let pts: Vec<Point> = [0.0, 0.4, 0.5, 1.0].iter().map(|&x| Point::scalar(x)).collect();
    assert!((min_pairwise_distance(&pts) - 0.1).abs() < 1e-15);
    let two = vec![Point::new(vec![0.0, 0.0]), Point::new(vec![3.0, 4.0])];
    assert!((min_pairwise_distance(&two) - 5.0).abs() < 1e-15);
}

#[test]
fn gram_matches_pairwise_eval_and_is_symmetric() {
    let pts: Vec<Point> = (0..9).map(|i| Point::scalar(i as f64 / 8.0)).collect();
    let g = gram(&KernelSpec::Ntk1, &pts).unwrap();
    assert_eq!(g.matrix.order(), 9);
    for i in 0..9 {
        for j in 0..9 {
            let want = ntk1_eval(pts[i].x(), pts[j].x());
            assert!((g.matrix.get(i, j) - want).abs() < 1e-15);
            assert_eq!(g.matrix.get(i, j), g.matrix.get(j, i));
        }
    }
}

#[test]
fn gram_rejects_degenerate_inputs() {
    assert!(gram(&KernelSpec::Ntk1, &[]).is_err());
    let dup = vec![Point::scalar(0.3), Point::scalar(0.3)];
    assert!(matches!(
        gram(&KernelSpec::Ntk1, &dup),
        Err(Error::DuplicatePoints { .. })
    ));
    let mixed = vec![Point::scalar(0.3), Point::new(vec![0.1, 0.2])];
    assert!(gram(&KernelSpec::Ntk1, &mixed).is_err());
}

#[test]
fn kernel_row_matches_eval() {
    let pts: Vec<Point> = (0..5).map(|i| Point::scalar(i as f64 / 4.0)).collect();
    let q = Point::scalar(0.33);
    let row = kernel_row(&KernelSpec::Ntk1, &q, &pts).unwrap();
    for (i, p) in pts.iter().enumerate() {
        assert!((row[i] - ntk1_eval(q.x(), p.x())).abs() < 1e-15);
    }
}

#[test]
fn points_expose_coordinates_and_distance() {
    let p = Point::new(vec![3.0, 4.0]);
    assert_eq!(p.dim(), 2);
    assert!((p.dist(&Point::new(vec![0.0, 0.0])) - 5.0).abs() < 1e-15);
    let q: Point = 0.7.into();
    assert_eq!(q.x(), 0.7);
}
