use std::sync::OnceLock;

use nalgebra::Matrix4;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use resonance_core::dynamics::*;

type Spec = PotentialSpec<f64>;

fn reference() -> Spec {
    Spec::reference()
}

fn search() -> &'static HomoclinicSearch<f64> {
    static CELL: OnceLock<HomoclinicSearch<f64>> = OnceLock::new();
    CELL.get_or_init(|| find_homoclinics(&reference(), &SearchOptions::default()).expect("reference search"))
}

/// Same search with half the step bound and half the tolerance.
fn refined_search() -> &'static HomoclinicSearch<f64> {
    static CELL: OnceLock<HomoclinicSearch<f64>> = OnceLock::new();
    CELL.get_or_init(|| {
        let base = SearchOptions::<f64>::default();
        let opts = SearchOptions { rtol: base.rtol / 2.0, max_step: base.max_step / 2.0, ..base };
        find_homoclinics(&reference(), &opts).expect("refined search")
    })
}

fn data(s: &HomoclinicSearch<f64>) -> Vec<(HomoclinicDatum<f64>, InvariantDiagnostics<f64>)> {
    assemble_invariants_with(&reference(), &s.homoclinics, &[0, 0, 0], &InvariantOptions::default()).unwrap()
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn potential_at_origin() {
    let s = reference();
    assert_eq!(eval_potential(&s, [0.0, 0.0]), s.e0);
    assert_eq!(eval_gradient(&s, [0.0, 0.0]), [0.0, 0.0]);
    let h = 1e-4;
    let v = |x: f64, y: f64| eval_potential(&s, [x, y]);
    let vxx = (v(h, 0.0) - 2.0 * v(0.0, 0.0) + v(-h, 0.0)) / (h * h);
    let vyy = (v(0.0, h) - 2.0 * v(0.0, 0.0) + v(0.0, -h)) / (h * h);
    let vxy = (v(h, h) - v(h, -h) - v(-h, h) + v(-h, -h)) / (4.0 * h * h);
    assert!((vxx + s.lambda1.powi(2) / 2.0).abs() < 1e-5, "{vxx}");
    assert!((vyy + s.lambda2.powi(2) / 2.0).abs() < 1e-5, "{vyy}");
    assert!(vxy.abs() < 1e-5);
    let hess = eval_hessian(&s, [0.0, 0.0]);
    assert!((hess[0][0] + 0.5).abs() < 1e-12 && (hess[1][1] + 1.445).abs() < 1e-12 && hess[0][1] == 0.0);
}

#[test]
fn single_barrier_taylor_data() {
    let s = reference();
    assert_eq!(s.v1(0.0), s.e0);
    assert_eq!(s.v2(0.0), 1.0);
    for &h in &[1e-2, 5e-3, 2.5e-3] {
        let c1 = (s.v1(h) - s.e0) / (h * h);
        let c2 = (s.v2(h) - 1.0) / (h * h);
        // next term is quartic
        assert!((c1 + s.lambda1.powi(2) / 4.0).abs() < 10.0 * h * h, "{h}: {c1}");
        assert!((c2 + s.lambda2.powi(2) / (4.0 * s.e0)).abs() < 10.0 * h * h, "{h}: {c2}");
    }
}

#[test]
fn gradient_matches_central_differences() {
    let s = reference();
    let mut rng = StdRng::seed_from_u64(7);
    let step = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = [rng.gen_range(-7.0..7.0), rng.gen_range(-7.0..7.0)];
        let g = eval_gradient(&s, x);
        let fd = [
            (eval_potential(&s, [x[0] + step, x[1]]) - eval_potential(&s, [x[0] - step, x[1]])) / (2.0 * step),
            (eval_potential(&s, [x[0], x[1] + step]) - eval_potential(&s, [x[0], x[1] - step])) / (2.0 * step),
        ];
        let err = norm([fd[0] - g[0], fd[1] - g[1]]) / norm(g).max(1.0);
        worst = worst.max(err);
    }
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn mirror_symmetry_is_exact() {
    let s = reference();
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..1000 {
        let x = [rng.gen_range(-7.0..7.0), rng.gen_range(-7.0..7.0)];
        assert_eq!(eval_potential(&s, x), eval_potential(&s, [x[0], -x[1]]));
    }
}

#[test]
fn reference_spec_is_valid_and_bad_specs_are_rejected() {
    let s = reference();
    s.validate().unwrap();
    let swapped = Spec { lambda1: 2.0, ..s.clone() };
    assert!(matches!(swapped.validate(), Err(DynamicsError::InvalidSpec(_))));
    let mut low = s.clone();
    low.vref_shape.as_mut().unwrap().height = 0.9;
    assert!(low.validate().is_err());
    let mut overlapping = s.clone();
    overlapping.w_shape.as_mut().unwrap().center = [1.0, 0.5];
    assert!(overlapping.validate().is_err());
}

#[test]
fn field_at_origin_and_linearization() {
    let s = reference();
    let zero = PhasePoint::new([0.0, 0.0], [0.0, 0.0]);
    assert_eq!(hamiltonian_field(&s, zero), zero);
    let m = linearization(&s, [0.0, 0.0]);
    let mat = Matrix4::from_fn(|i, j| m[i][j]);
    let mut ev: Vec<f64> = mat
        .complex_eigenvalues()
        .iter()
        .map(|e| {
            assert!(e.im.abs() < 1e-12);
            e.re
        })
        .collect();
    ev.sort_by(f64::total_cmp);
    let expected = [-s.lambda2, -s.lambda1, s.lambda1, s.lambda2];
    for (a, b) in ev.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{ev:?}");
    }
}

#[test]
fn field_is_symplectic_gradient_of_symbol() {
    let s = reference();
    let mut rng = StdRng::seed_from_u64(9);
    let step = 1e-6;
    for _ in 0..200 {
        let p = PhasePoint::new(
            [rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)],
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        );
        let d = |i: usize| {
            let mut a = p.to_array();
            let mut b = p.to_array();
            a[i] += step;
            b[i] -= step;
            let sym = |v: [f64; 4]| symbol(&s, [v[0], v[1]], [v[2], v[3]]);
            (sym(a) - sym(b)) / (2.0 * step)
        };
        let expected = [d(2), d(3), -d(0), -d(1)];
        let got = hamiltonian_field(&s, p).to_array();
        let scale = expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-6 * scale, "{got:?} vs {expected:?}");
        }
    }
}

#[test]
fn manifold_seeds() {
    let s = reference();
    let r = 1e-4;
    let plus = local_manifold_seed(&s, ManifoldSide::Plus, [r, 0.0], DEFAULT_SEED_RADIUS).unwrap();
    assert_eq!(plus.xi, [s.lambda1 * r / 2.0, 0.0]);
    let minus = local_manifold_seed(&s, ManifoldSide::Minus, [r, 0.0], DEFAULT_SEED_RADIUS).unwrap();
    assert_eq!(minus.xi, [-s.lambda1 * r / 2.0, 0.0]);
    let mut rng = StdRng::seed_from_u64(10);
    for _ in 0..100 {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let p = local_manifold_seed(&s, ManifoldSide::Plus, [r * a.cos(), r * a.sin()], 2.0 * r).unwrap();
        assert!((symbol(&s, p.x, p.xi) - s.e0).abs() < 1e-11);
        assert!(incoming_mismatch(&s, &local_manifold_seed(&s, ManifoldSide::Minus, p.x, 2.0 * r).unwrap()) == 0.0);
    }
    let err = local_manifold_seed(&s, ManifoldSide::Plus, [2e-4, 0.0], DEFAULT_SEED_RADIUS).unwrap_err();
    assert!(matches!(err, DynamicsError::OffsetTooLarge { .. }));
}

#[test]
fn backward_flow_from_outgoing_seed_contracts_at_rate_lambda1() {
    let s = reference();
    let r = 1e-6;
    let seed = local_manifold_seed(&s, ManifoldSide::Plus, [r, 0.0], DEFAULT_SEED_RADIUS).unwrap();
    let traj = integrate_flow(&s, seed, -6.0, 1e-12).unwrap();
    let mut prev = 0.0;
    for (t, p) in traj.times.iter().zip(&traj.states) {
        let d = p.radius();
        assert!(d >= prev);
        prev = d;
        assert!(rel(d, r * (s.lambda1 * t).exp()) < 1e-6, "t = {t}: {d:e}");
    }
    assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*traj.times.last().unwrap(), 0.0);
}

#[test]
fn free_motion_is_a_straight_line() {
    let s = reference();
    let start = PhasePoint::new([10.0, 9.0], [0.3, 0.4]);
    let traj = integrate_flow(&s, start, 20.0, 1e-10).unwrap();
    for (t, p) in traj.times.iter().zip(&traj.states) {
        assert!((p.x[0] - (10.0 + 0.6 * t)).abs() < 1e-12 * (1.0 + t));
        assert!((p.x[1] - (9.0 + 0.8 * t)).abs() < 1e-12 * (1.0 + t));
        assert_eq!(p.xi, start.xi);
    }
}

#[test]
fn round_trip_and_energy_drift() {
    let s = reference();
    let start = PhasePoint::new([4.0, 1.0], [-0.6, 0.1]);
    let tol = 1e-12;
    let t_span = 8.0;
    let fwd = integrate_flow(&s, start, t_span, tol).unwrap();
    let end = *fwd.states.last().unwrap();
    assert!((symbol(&s, end.x, end.xi) - symbol(&s, start.x, start.xi)).abs() < 10.0 * tol * t_span);
    let back = integrate_flow(&s, end, -t_span, tol).unwrap();
    let there = back.states[0].to_array();
    let dist = there.iter().zip(start.to_array()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(dist < 1e-8, "{dist:e}");
}

#[test]
fn trajectory_csv_has_header_and_rows() {
    let s = reference();
    let traj = integrate_flow(&s, PhasePoint::new([10.0, 9.0], [0.3, 0.4]), 1.0, 1e-10).unwrap();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,xi1,xi2");
    assert_eq!(lines.len(), traj.len() + 1);
    assert_eq!(lines[1].split(',').count(), 5);
}

#[test]
fn reference_geometry_has_three_homoclinics() {
    let s = reference();
    let found = &search().homoclinics;
    assert_eq!(found.len(), 3);
    for h in found {
        assert!(h.trajectory.max_energy_error(&s) < 1e-8);
        assert!((h.trajectory.energy - s.e0).abs() < 1e-8);
        assert!(h.match_distance < 1e-8);
        assert!(h.transversality > 1e-3);
    }
    let axis = &found[1].trajectory;
    assert!(axis.states.iter().all(|p| p.x[1].abs() < 1e-6));
    assert!(found[0].apex_angle > 0.0 && found[2].apex_angle < 0.0);
    // gamma_3 is the mirror of gamma_1
    let mirror = found[0].trajectory.mirrored();
    let far = |t: &Trajectory<f64>| t.states.iter().map(|p| (p.radius(), p.x[1])).fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    let (ra, ya) = far(&mirror);
    let (rb, yb) = far(&found[2].trajectory);
    assert!((ra - rb).abs() < 1e-6 && (ya - yb).abs() < 1e-6);
}

#[test]
fn empty_reflector_has_no_homoclinics() {
    let s = reference().without_reflector();
    let opts = SearchOptions { n_shoot: 101, ..SearchOptions::default() };
    assert!(matches!(find_homoclinics(&s, &opts), Err(DynamicsError::NoneFound)));
    let bad = SearchOptions { n_shoot: 50, ..SearchOptions::default() };
    assert!(find_homoclinics(&reference(), &bad).is_err());
}

#[test]
fn action_symmetry_and_convergence() {
    let s = reference();
    let found = &search().homoclinics;
    let a: Vec<f64> = found.iter().map(|h| compute_action(&s, &h.trajectory)).collect();
    assert!(a.iter().all(|&v| v > 0.0));
    assert!((a[0] - a[2]).abs() < 1e-8, "{a:?}");
    let fine: Vec<f64> = refined_search().homoclinics.iter().map(|h| compute_action(&s, &h.trajectory)).collect();
    for (x, y) in a.iter().zip(&fine) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
    let single = Trajectory {
        times: vec![0.0],
        states: vec![PhasePoint::new([1e-3, 0.0], [5e-4, 0.0])],
        rates: vec![PhasePoint::new([1e-3, 0.0], [5e-4, 0.0])],
        energy: 1.0,
    };
    assert_eq!(compute_action(&s, &single), 0.0);
}

#[test]
fn tail_prefactors_are_collinear_and_window_stable() {
    let s = reference();
    let opts = InvariantOptions::default();
    let half = InvariantOptions { r_fit: opts.r_fit / 2.0, ..opts };
    for h in &search().homoclinics {
        let fit = fit_g_vectors(&s, &h.trajectory, &opts).unwrap();
        assert!(collinearity_angle(fit.g_plus) < 1e-6 && collinearity_angle(fit.g_minus) < 1e-6);
        assert!(norm(fit.g_plus) > 0.0 && norm(fit.g_minus) > 0.0);
        let fit2 = fit_g_vectors(&s, &h.trajectory, &half).unwrap();
        assert!(rel(norm(fit2.g_plus), norm(fit.g_plus)) < 1e-5);
        assert!(rel(norm(fit2.g_minus), norm(fit.g_minus)) < 1e-5);
    }
}

#[test]
fn tail_fit_residual_shrinks_towards_origin() {
    let s = reference();
    let h = &search().homoclinics[1];
    let residual = |r_fit: f64| {
        fit_g_vectors(&s, &h.trajectory, &InvariantOptions { r_fit, fit_tol: 1.0, ..InvariantOptions::default() })
            .unwrap()
            .residual
    };
    let (far, mid, near) = (residual(0.4), residual(0.1), residual(0.02));
    assert!(far > mid && mid > near, "{far:e} {mid:e} {near:e}");
}

fn exponential_trajectory(c_plus: f64, c_minus: f64, l1: f64) -> Trajectory<f64> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    // plus tail on [-8, -2], minus tail on [2, 8]
    for k in 0..=120 {
        let t = -8.0 + 0.05 * k as f64;
        times.push(t);
        let x = c_plus * (l1 * t).exp();
        states.push(PhasePoint::new([x, 0.0], [l1 * x / 2.0, 0.0]));
    }
    for k in 0..=120 {
        let t = 2.0 + 0.05 * k as f64;
        times.push(t);
        let x = c_minus * (-l1 * t).exp();
        states.push(PhasePoint::new([x, 0.0], [-l1 * x / 2.0, 0.0]));
    }
    Trajectory { rates: states.clone(), times, states, energy: 1.0 }
}

#[test]
fn pure_exponential_tails_are_fitted_exactly() {
    let s = reference();
    let traj = exponential_trajectory(2.5, 1.7, s.lambda1);
    let opts = InvariantOptions { r_fit: 0.3, ..InvariantOptions::default() };
    let fit = fit_g_vectors(&s, &traj, &opts).unwrap();
    assert!(rel(fit.g_plus[0], 2.5) < 1e-10 && fit.g_plus[1] == 0.0);
    assert!(rel(fit.g_minus[0], 1.7) < 1e-10 && fit.g_minus[1] == 0.0);
    assert!(fit.residual < 1e-10);
}

#[test]
fn short_tails_are_reported() {
    let s = reference();
    let traj = exponential_trajectory(2.5, 1.7, s.lambda1);
    let opts = InvariantOptions { r_fit: 1e-6, r_inner: 1e-7, ..InvariantOptions::default() };
    assert!(matches!(fit_g_vectors(&s, &traj, &opts), Err(DynamicsError::TailTooShort { .. })));
}

/// Linear saddle orbit with its transverse tangent, sampled exactly on the
/// extrapolation grid of both tails.
fn quadratic_model(l1: f64, l2: f64, eps: f64) -> Homoclinic<f64> {
    let step = std::f64::consts::LN_2 / (2.0 * l1);
    let (t0, t1) = (-20.0, 20.0);
    let mut nodes: Vec<(f64, [f64; 4], [f64; 4])> = Vec::new();
    for k in 0..40 {
        let t = t0 + step * k as f64;
        let x = eps * (l1 * (t - t0)).exp();
        let y = eps * (l2 * (t - t0)).exp();
        nodes.push((t, [x, 0.0, l1 * x / 2.0, 0.0], [0.0, y, 0.0, l2 * y / 2.0]));
    }
    for k in (0..40).rev() {
        let t = t1 - step * k as f64;
        let x = eps * (-l1 * (t - t1)).exp();
        let y = eps * (l2 * (t - t1)).exp();
        nodes.push((t, [x, 0.0, -l1 * x / 2.0, 0.0], [0.0, y, 0.0, l2 * y / 2.0]));
    }
    let states: Vec<PhasePoint<f64>> = nodes.iter().map(|n| PhasePoint::from_slice(&n.1)).collect();
    let full = Trajectory { times: nodes.iter().map(|n| n.0).collect(), rates: states.clone(), states, energy: 1.0 };
    Homoclinic {
        trajectory: full.clone(),
        tangents: nodes.iter().map(|n| PhasePoint::from_slice(&n.2)).collect(),
        full,
        branch: 1.0,
        shoot_parameter: 0.0,
        match_distance: 0.0,
        transversality: 1.0,
        apex_angle: 0.0,
    }
}

#[test]
fn quadratic_model_has_constant_scaled_determinant() {
    let s = reference();
    let eps = 1e-4;
    let h = quadratic_model(s.lambda1, s.lambda2, eps);
    let m = compute_m_limits(&s, &h, &InvariantOptions::default()).unwrap();
    // det = lambda1 eps^2 e^{(lambda1 + lambda2)(t - t0)} on the outgoing tail
    let plus = eps * s.lambda1.sqrt() * (20.0 * (s.lambda1 + s.lambda2) / 2.0).exp();
    let minus = eps * s.lambda1.sqrt() * (-20.0 * (s.lambda2 - s.lambda1) / 2.0).exp();
    assert!(rel(m.m_plus.value, plus) < 1e-12, "{} vs {plus}", m.m_plus.value);
    assert!(rel(m.m_minus.value, minus) < 1e-12, "{} vs {minus}", m.m_minus.value);
    let floor = 100.0 * InvariantOptions::<f64>::default().noise_rtol;
    assert!(m.m_plus.error <= 2.0 * floor * plus && m.m_minus.error <= 2.0 * floor * minus);
}

#[test]
fn jacobian_limits_are_stable_and_symmetric() {
    let s = reference();
    let opts = InvariantOptions::default();
    let base = &search().homoclinics;
    let fine = &refined_search().homoclinics;
    let mut limits = Vec::new();
    for (a, b) in base.iter().zip(fine) {
        let ma = compute_m_limits(&s, a, &opts).unwrap();
        let mb = compute_m_limits(&s, b, &opts).unwrap();
        assert!(ma.m_plus.value > 0.0 && ma.m_minus.value > 0.0);
        assert!((ma.m_plus.value - mb.m_plus.value).abs() <= ma.m_plus.error.max(mb.m_plus.error), "{ma:?} {mb:?}");
        assert!((ma.m_minus.value - mb.m_minus.value).abs() <= ma.m_minus.error.max(mb.m_minus.error), "{ma:?} {mb:?}");
        limits.push(ma);
    }
    assert!(rel(limits[0].m_plus.value, limits[2].m_plus.value) < 1e-6);
    assert!(rel(limits[0].m_minus.value, limits[2].m_minus.value) < 1e-6);
}

#[test]
fn assembled_invariants() {
    let s = reference();
    let d = data(search());
    assert_eq!(d.len(), 3);
    for (k, (datum, diag)) in d.iter().enumerate() {
        assert_eq!(datum.index, k + 1);
        assert!(datum.amplitude_b.norm() > 0.0 && datum.amplitude_b.norm().is_finite());
        assert!(datum.m_plus > 0.0 && datum.m_minus > 0.0);
        assert!(diag.collinearity_angle < 1e-6 && diag.energy_error < 1e-8);
        let t = delay_t(s.lambda1, norm(datum.g_plus), norm(datum.g_minus));
        assert_eq!(datum.time_t, t);
        assert_eq!(t, (s.lambda1 * norm(datum.g_plus) * norm(datum.g_minus)).ln() / s.lambda1);
    }
    let (a, b) = (&d[0].0, &d[2].0);
    assert!((a.action_a - b.action_a).abs() < 1e-6);
    assert!((a.time_t - b.time_t).abs() < 1e-6);
    assert!(rel(a.amplitude_b.norm(), b.amplitude_b.norm()) < 1e-6);
    assert!(rel(norm(a.g_plus), norm(b.g_plus)) < 1e-6 && rel(norm(a.g_minus), norm(b.g_minus)) < 1e-6);
    assert!(d[0].0.w_integral > 0.0);
    assert_eq!(d[1].0.w_integral, 0.0);
    assert_eq!(d[2].0.w_integral, 0.0);

    let plain = s.without_perturbation();
    let none = assemble_invariants(&plain, &search().homoclinics, &[0, 0, 0], &InvariantOptions::default()).unwrap();
    assert!(none.iter().all(|d| d.w_integral == 0.0));
    let err = assemble_invariants(&s, &search().homoclinics, &[0, 0], &InvariantOptions::default()).unwrap_err();
    assert!(matches!(err, DynamicsError::MaslovCount { expected: 3, got: 2 }));
}

#[test]
fn amplitude_matches_closed_form() {
    let (l1, l2, mp, mm, gp, gm) = (1.0, 1.7, 0.8, 1.3, 0.6, 2.2);
    let b = amplitude_b(l1, l2, mp, mm, 1, gp, gm).unwrap();
    let p = -(l1 + l2) / (2.0 * l1);
    let modulus = (l1 / std::f64::consts::TAU).sqrt() * mp / mm * gm * (l1 * gp * gm).powf(p);
    let phase = -std::f64::consts::FRAC_PI_2 * 1.5 + p * std::f64::consts::FRAC_PI_2;
    assert!(rel(b.norm(), modulus) < 1e-13);
    let dphi = (b.arg() - phase).rem_euclid(std::f64::consts::TAU);
    assert!(dphi.min(std::f64::consts::TAU - dphi) < 1e-13);
}

/// Energy-`E0` trajectories launched inside the reflector never come back to it
/// after visiting the top barrier.
#[test]
fn no_return_from_top_barrier_to_reflector() {
    let s = reference();
    let bare = s.without_reflector();
    let v_ref = |x: [f64; 2]| eval_potential(&s, x) - eval_potential(&bare, x);
    let (r1, r2) = (s.v1_shape.radius, s.v2_shape.radius);
    let in_top = |x: [f64; 2]| x[0].abs() < r1 && x[1].abs() < r2;
    let mut rng = StdRng::seed_from_u64(11);
    let mut launched = 0;
    let mut touched = 0;
    while launched < 200 {
        let x = [rng.gen_range(4.0..7.0), rng.gen_range(-5.0..5.0)];
        let v = eval_potential(&s, x);
        if v_ref(x) <= 0.0 || v >= s.e0 {
            continue;
        }
        launched += 1;
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let k = (s.e0 - v).sqrt();
        let traj = integrate_flow(&s, PhasePoint::new(x, [k * a.cos(), k * a.sin()]), 40.0, 1e-9).unwrap();
        let mut visited = false;
        for p in &traj.states {
            if in_top(p.x) {
                visited = true;
            } else if visited && v_ref(p.x) > 0.0 {
                panic!("return to the reflector from {x:?} at angle {a}");
            }
        }
        touched += visited as usize;
    }
    assert!(touched > 0);
}
