use std::f64::consts::PI;

use g2lab::discrete_geo::{Field, GridSpec, StencilOrder};
use g2lab::exterior::{inner, Form, Metric};
use g2lab::flows::*;
use g2lab::functionals::{NormConvention, W345State};
use g2lab::linalg::Matrix;
use g2lab::ode::{integrate, StepControl};
use g2lab::sampling::{random_form, random_spd, rng};
use g2lab::torsion_verify::random_ansatz;

fn standard_omega() -> Form<f64> {
    Form::from_terms(6, 2, &[(1.0, &[1, 2]), (1.0, &[3, 4]), (1.0, &[5, 6])])
}

fn lambda_only(lambda0: f64) -> W345Init<f64> {
    W345Init {
        lambda0,
        theta0: Form::zeros(6, 1),
        nu30: Form::zeros(6, 3),
        f0110: Form::zeros(6, 2),
        omega: standard_omega(),
    }
}

#[test]
fn zero_torsion_freezes_metric() {
    let mut r = rng(3);
    let g0 = Metric::new(random_spd(&mut r, 6, 0.3)).unwrap();
    let traj = integrate_w345(&lambda_only(0.0), &g0, 1.0, 1.0, &StepControl::default()).unwrap();
    for g in &traj.metrics {
        assert_eq!(g, g0.matrix());
    }
    assert!(traj.rows.iter().all(|row| row.functional == 0.0));
}

#[test]
fn lambda_only_matches_separable_solution() {
    let mut r = rng(4);
    let g0 = Metric::new(random_spd(&mut r, 6, 0.3)).unwrap();
    for lambda0 in [1.0, -0.6] {
        let traj = integrate_w345(&lambda_only(lambda0), &g0, 1.0, 0.5, &StepControl::default()).unwrap();
        let mut worst: f64 = 0.0;
        for (row, g) in traj.rows.iter().zip(&traj.metrics) {
            let factor = (-(lambda0 * lambda0 / 8.0) * (1.0 - (-15.0 * PI * row.t).exp())).exp();
            worst = worst.max((g - &g0.matrix().scale(factor)).max_abs());
        }
        assert!(worst <= 1e-8, "separable solution error {worst:e}");
    }
}

#[test]
fn scalar_decay_ode_matches_closed_form() {
    let rate = -7.5 * PI;
    let control = StepControl { tolerance: 1e-12, ..StepControl::default() };
    let (t, y) =
        integrate(|_t, y: &[f64]| Ok(vec![rate * y[0]]), |_y: &[f64]| Ok(()), |_t, _y: &[f64]| true, vec![1.0], 0.0, 1.0, &control)
            .unwrap();
    assert_eq!(t, 1.0);
    assert!((y[0] - rate.exp()).abs() < 1e-10);
}

#[test]
fn metric_rhs_trace_by_hand() {
    let mut r = rng(5);
    for _ in 0..20 {
        let data = random_ansatz::<f64>(&mut r, 0.3);
        let init = W345Init::from_ansatz(&data).scaled(0.3);
        let g = data.su3().metric().clone();
        let t = 0.05;
        let st = W345FlowState { t, g6: g.clone(), init: init.clone(), coord_volume: 1.0 };
        let rhs = w345_metric_rhs(&st);
        let trace = g.inverse().frobenius_dot(&rhs);
        let (l, th, nu, f) = w345_closed_forms(t, &init);
        let n = |a: &Form<f64>| inner(a, a, &g).unwrap();
        let (nt, nn, nf) = (n(&th), n(&nu), n(&f));
        let density = 15.0 / 8.0 * l * l + 5.0 / 18.0 * nt + 0.25 * (nn + nf);
        let expected = -2.0 * PI * (3.0 * density - 5.0 / 18.0 * nt - 0.75 * nn - 0.5 * nf);
        assert!((trace - expected).abs() < 1e-12 * (1.0 + expected.abs()));
        assert!(rhs.asymmetry() < 1e-14);
    }
}

#[test]
fn functional_ascends_along_random_runs() {
    let mut r = rng(6);
    let control = StepControl::default();
    for _ in 0..50 {
        let data = random_ansatz::<f64>(&mut r, 0.3);
        let init = W345Init::from_ansatz(&data).scaled(0.3);
        let traj = integrate_w345(&init, data.su3().metric(), 1.0, 0.4, &control).unwrap();
        assert!(traj.worst_functional_decrease() >= -1e-8);
        for w in traj.rows.windows(2) {
            let rate = (w[1].functional - w[0].functional) / (w[1].t - w[0].t);
            assert!(rate >= -1e-8);
        }
        assert!(traj.min_eigenvalue() > 0.0);
        assert!(traj.rows.iter().all(|row| row.functional <= 0.0));
        assert!(traj.rows.iter().all(|row| (row.tr_t - 1.5 * row_lambda(&traj, row.t)).abs() < 1e-15));
    }
}

fn row_lambda(traj: &W345Trajectory<f64>, t: f64) -> f64 {
    let i = traj.rows.iter().position(|row| row.t == t).unwrap();
    traj.data[i].0
}

#[test]
fn functional_tends_to_zero() {
    let mut r = rng(8);
    let data = random_ansatz::<f64>(&mut r, 0.3);
    let init = W345Init::from_ansatz(&data).scaled(0.3);
    let traj = integrate_w345(&init, data.su3().metric(), 1.0, 4.0, &StepControl::default()).unwrap();
    let first = traj.rows.first().unwrap();
    let last = traj.rows.last().unwrap();
    assert!(last.functional.abs() < 1e-9 * first.functional.abs());
    assert!(last.tr_t.abs() < 1e-12);
    let (l, th, nu, f) = traj.data.last().unwrap();
    assert!(l.abs() < 1e-12 && th.max_abs() < 1e-5 && nu.max_abs() < 1e-5 && f.max_abs() < 1e-5);
}

#[test]
fn full_system_decay_rates() {
    let mut r = rng(9);
    let data = random_ansatz::<f64>(&mut r, 0.3);
    let init = W345Init::from_ansatz(&data).scaled(0.3);
    let start = W345State::new(
        data.su3().metric().clone(),
        init.lambda0,
        init.theta0.clone(),
        init.nu30.clone(),
        init.f0110.clone(),
        1.0,
    )
    .unwrap();
    let control = StepControl { tolerance: 1e-12, ..StepControl::default() };
    let traj = integrate_w345_full(&start, &init.omega, 0.3, &control).unwrap();
    let ts: Vec<f64> = traj.rows.iter().map(|row| row.t).collect();
    let norm = |a: &Form<f64>| a.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt();
    let series: [Vec<f64>; 4] = [
        traj.data.iter().map(|d| d.0).collect(),
        traj.data.iter().map(|d| norm(&d.1)).collect(),
        traj.data.iter().map(|d| norm(&d.2)).collect(),
        traj.data.iter().map(|d| norm(&d.3)).collect(),
    ];
    let rates: [f64; 4] = w345_rates();
    for (values, rate) in series.iter().zip(rates) {
        let slope = fit_log_slope(&ts, values).unwrap();
        assert!((slope - rate).abs() < 1e-6, "slope {slope} vs {rate}");
    }
    let reduced = integrate_w345(&init, data.su3().metric(), 1.0, 0.3, &control).unwrap();
    let gap = (traj.metrics.last().unwrap() - reduced.metrics.last().unwrap()).max_abs();
    assert!(gap < 1e-8, "closed-form and full metric differ by {gap:e}");
}

#[test]
fn constraint_residual_is_reported() {
    let mut r = rng(10);
    let data = random_ansatz::<f64>(&mut r, 0.3);
    let init = W345Init::from_ansatz(&data).scaled(0.3);
    let traj = integrate_w345(&init, data.su3().metric(), 1.0, 0.2, &StepControl::default()).unwrap();
    assert!(traj.rows[0].constraint_residual > 0.0);
    assert!(traj.rows.last().unwrap().constraint_residual < traj.rows[0].constraint_residual);
}

fn homogeneous(f: Form<f64>, g: Metric<f64>) -> GhHomState<f64> {
    GhHomState { t: 0.0, g, h: 1.0, f, coord_volume: (2.0 * PI).powi(6) }
}

#[test]
fn homogeneous_gh_with_curvature_form() {
    let mut r = rng(11);
    for _ in 0..10 {
        let g = Metric::new(random_spd(&mut r, 6, 0.3)).unwrap();
        let f = random_form(&mut r, 6, 2, 0.2);
        let out = integrate_gh_homogeneous(&homogeneous(f, g), 1.0, &StepControl::default(), &GhOptions::default()).unwrap();
        assert_eq!(out.termination, GhTermination::Completed);
        assert!(out.monitors.h_strictly_decreasing);
        assert_eq!(out.monitors.stationary_states, 0);
        assert!(out.monitors.max_trace_residual <= 1e-10);
        assert!(out.monitors.max_functional_increase <= 1e-8);
        assert!(out.rows.iter().all(|row| row.min_eig_g > 0.0 && row.functional <= 0.0));
    }
}

#[test]
fn homogeneous_gh_without_curvature_is_frozen() {
    let g = Metric::euclidean(6);
    let out = integrate_gh_homogeneous(&homogeneous(Form::zeros(6, 2), g), 1.0, &StepControl::default(), &GhOptions::default())
        .unwrap();
    assert_eq!(out.termination, GhTermination::Stationary);
    assert_eq!(out.monitors.rigidity_violations, 0);
    assert_eq!(out.monitors.stationary_states, out.rows.len());
    assert!(out.rows.iter().all(|row| row.h_min == 1.0 && row.functional == 0.0));
}

#[test]
fn homogeneous_gh_blows_down() {
    let f = Form::from_terms(6, 2, &[(2.0, &[1, 2]), (1.0, &[3, 4])]);
    let out =
        integrate_gh_homogeneous(&homogeneous(f, Metric::euclidean(6)), 10.0, &StepControl::default(), &GhOptions::default())
            .unwrap();
    match out.termination {
        GhTermination::Blowdown(report) => {
            assert!(report.h_min < 1e-2);
            assert!(report.t < 10.0);
        }
        other => panic!("expected blow-down, got {other:?}"),
    }
    assert!(out.monitors.h_strictly_decreasing);
}

fn grid_state(n: usize, f_harm: Form<f64>, amplitude: f64) -> GhGridState<f64> {
    let spec = GridSpec::new(vec![0, 1], n, StencilOrder::Sixth).unwrap();
    let g = Field::from_fn(&spec, 36, |x: &[f64; 6]| {
        let mut m = vec![0.0; 36];
        for i in 0..6 {
            m[i * 7] = 1.0;
        }
        m[14] += 2.0 * amplitude * x[0].sin();
        m[1] += amplitude * x[1].cos();
        m[6] += amplitude * x[1].cos();
        m
    });
    let h = Field::from_fn(&spec, 1, |x: &[f64; 6]| vec![1.0 + 3.0 * amplitude * (x[0] + x[1]).cos()]);
    let eta = Field::from_fn(&spec, 6, |x: &[f64; 6]| {
        vec![0.0, 2.0 * amplitude * x[0].sin(), 0.0, amplitude * x[1].cos(), 0.0, amplitude * (x[0] - x[1]).sin()]
    });
    GhGridState { spec, t: 0.0, g, h, eta, f_harm }
}

#[test]
fn grid_gh_preserves_cohomology_class() {
    let f_harm = Form::from_terms(6, 2, &[(0.3, &[1, 2]), (0.2, &[3, 4]), (-0.1, &[5, 6])]);
    let out = integrate_gh_grid(&grid_state(32, f_harm, 0.01), 0.1, &StepControl::default(), &GhOptions::default()).unwrap();
    assert_eq!(out.termination, GhTermination::Completed);
    assert!((out.rows.last().unwrap().t - 0.1).abs() < 1e-14);
    assert!(out.monitors.max_mean_f_drift <= 1e-9);
    assert!(out.monitors.max_functional_increase <= 1e-8);
    assert!(out.monitors.max_trace_residual <= 1e-10);
    assert_eq!(out.monitors.stationary_states, 0);
    assert!(out.rows.iter().all(|row| row.constraint_residual < 1e-12));
}

#[test]
fn grid_gh_flat_trivial_state_is_stationary() {
    let out =
        integrate_gh_grid(&grid_state(16, Form::zeros(6, 2), 0.0), 0.05, &StepControl::default(), &GhOptions::default()).unwrap();
    assert_eq!(out.termination, GhTermination::Stationary);
    assert_eq!(out.monitors.rigidity_violations, 0);
}

#[test]
fn gh_rates_match_formula_with_geometry() {
    let mut r = rng(12);
    let g = Metric::new(random_spd(&mut r, 6, 0.3)).unwrap();
    let f = random_form(&mut r, 6, 2, 0.5);
    let sym = |m: Matrix<f64>| m.symmetrize();
    let geom = GeomTerms {
        ric: sym(random_spd(&mut r, 6, 0.2)),
        scal: 0.0,
        hess_u: sym(random_spd(&mut r, 6, 0.2)),
        lap_u: 0.0,
        dstar_hinv_f: random_form(&mut r, 6, 1, 1.0),
    };
    let mut geom = geom;
    geom.scal = g.inverse().frobenius_dot(&geom.ric);
    geom.lap_u = g.inverse().frobenius_dot(&geom.hess_u);
    let h = 1.7;
    let rates = gh_rhs(&g, h, &f, &geom, NormConvention::FullContraction).unwrap();
    let res = volume_trace_residual(&g, h, &f, &geom, &rates, NormConvention::FullContraction);
    assert!(res.abs() < 1e-12);
    assert!((&rates.etadot - &geom.dstar_hinv_f.scale(0.25)).max_abs() < 1e-15);
    let module = gh_rhs(&g, h, &f, &geom, NormConvention::Module).unwrap();
    let res_module = volume_trace_residual(&g, h, &f, &geom, &module, NormConvention::Module);
    assert!(res_module.abs() > 1e-6);
}

