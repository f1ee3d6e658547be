//! Scenario runners.

use std::f64::consts::PI;

use g2lab::discrete_geo::{curvature, Field, GridSpec, StencilOrder};
use g2lab::exterior::{hodge, standard_phi, Form, Metric};
use g2lab::flows::{
    fit_log_slope, integrate_gh_grid, integrate_gh_homogeneous, integrate_w345, integrate_w345_full, w345_rates, FlowRow,
    GhGridState, GhHomState, GhOptions, GhOutcome, GhTermination, W345Init, W345Trajectory, CSV_HEADER,
};
use g2lab::functionals::{
    f_general, f_gh, f_w345, first_variation_w345, l2_pairing, w345_gradient, NormConvention, VariationVector, W345State,
};
use g2lab::g2su3::metric_from_phi;
use g2lab::linalg::Matrix;
use g2lab::ode::StepControl;
use g2lab::reduction::{assemble_phi, omega_minus_from_psi, reduce, ReducedPoint};
use g2lab::sampling::{random_form, random_positive_phi, random_spd, random_su3, random_vector, rng, uniform, LabRng};
use g2lab::torsion_verify::{random_ansatz, verify_prop_torsion};

use crate::config::{FlowMode, Scenario, ScenarioConfig};
use crate::report::{Relation, Report};

/// A finished run: the report and any extra files as `(suffix, contents)`.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<(String, String)>,
}

/// Runs a scenario; errors during the run are recorded in the report,
/// which then fails.
pub fn run(config: &ScenarioConfig) -> Outcome {
    let mut report = Report::new(config.scenario, config.name(), config.seed);
    report.param("samples", config.samples() as f64);
    for (key, _) in config.scenario.tolerances() {
        report.param(&format!("tolerance.{key}"), config.tolerance(key));
    }
    let r = &mut report;
    let result = match config.scenario {
        Scenario::VerifyTorsion => verify_torsion(config, r).map(|_| Vec::new()),
        Scenario::CheckVariation => check_variation(config, r).map(|_| Vec::new()),
        Scenario::ReduceRoundtrip => reduce_roundtrip(config, r).map(|_| Vec::new()),
        Scenario::FlowW345 => flow_w345(config, r),
        Scenario::FlowGh => flow_gh(config, r),
        Scenario::CurvatureCheck => curvature_check(config, r).map(|_| Vec::new()),
        Scenario::FunctionalSigns => functional_signs(config, r).map(|_| Vec::new()),
    };
    let files = result.unwrap_or_else(|e| {
        report.errors.push(e);
        Vec::new()
    });
    Outcome { report, files }
}

fn verify_torsion(config: &ScenarioConfig, report: &mut Report) -> Result<(), String> {
    let mut r = rng(config.seed);
    let (mut torsion, mut invariants, mut cross, mut gap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..config.samples() {
        let data = random_ansatz::<f64>(&mut r, 0.3);
        let rep = verify_prop_torsion(&data).map_err(|e| e.to_string())?;
        torsion = torsion.max(rep.dev_tau0).max(rep.dev_tau1).max(rep.dev_tau2).max(rep.dev_tau3);
        invariants = invariants.max(rep.dev_tr_t).max(rep.dev_norm_t_sq).max(rep.dev_scal);
        cross = cross.max(rep.tau3_cross_max);
        gap = gap.max((rep.expected_norm_t_sq - rep.norm_t_sq_tensor).abs());
    }
    report.at_most("torsion_forms", torsion, config.tolerance("torsion"));
    report.at_most("trace_norm_scalar", invariants, config.tolerance("invariants"));
    report.at_most("tau3_summand_orthogonality", cross, config.tolerance("tau3_orthogonality"));
    report.info("tensor_norm_gap_max", gap);
    Ok(())
}

fn random_state(r: &mut LabRng, scale: f64) -> W345State<f64> {
    let data = random_ansatz::<f64>(r, 0.3);
    let vol: f64 = uniform(r, 0.5, 2.0);
    W345State {
        g6: data.su3().metric().clone(),
        lambda: scale * data.lambda(),
        theta: data.theta().scale(scale),
        nu3: data.nu3().scale(scale),
        f011: data.f011().scale(scale),
        coord_volume: vol,
    }
}

fn random_direction(r: &mut LabRng) -> VariationVector<f64> {
    let k = (&random_spd::<f64>(r, 6, 0.3) - &Matrix::identity(6)).symmetrize();
    VariationVector {
        k,
        beta: random_form(r, 6, 1, 1.0),
        f: uniform(r, -1.0, 1.0),
        mu: random_form(r, 6, 3, 1.0),
        rho: random_form(r, 6, 2, 1.0),
    }
}

fn check_variation(config: &ScenarioConfig, report: &mut Report) -> Result<(), String> {
    let mut r = rng(config.seed);
    let eps = [1e-2, 1e-3, 1e-4];
    let (mut min_order, mut consistency, mut finest) = (f64::INFINITY, 0.0f64, 0.0f64);
    for _ in 0..config.samples() {
        let s = random_state(&mut r, 1.0);
        let v = random_direction(&mut r);
        let exact = first_variation_w345(&s, &v).map_err(|e| e.to_string())?;
        let mut errors = Vec::new();
        for e in eps {
            let plus = s.perturbed(e, &v).map_err(|e| e.to_string())?;
            let minus = s.perturbed(-e, &v).map_err(|e| e.to_string())?;
            errors.push(((f_w345(&plus) - f_w345(&minus)) / (2.0 * e) - exact).abs());
        }
        for w in errors.windows(2) {
            min_order = min_order.min((w[0] / w[1]).log10());
        }
        finest = finest.max(errors[2] / (1.0 + exact.abs()));
        let paired = l2_pairing(&s, &w345_gradient(&s), &v).map_err(|e| e.to_string())?;
        consistency = consistency.max((paired - exact).abs());
    }
    report.at_least("fd_convergence_order", min_order, config.tolerance("min_order"));
    report.at_most("gradient_consistency", consistency, config.tolerance("gradient_consistency"));
    report.info("fd_relative_error_finest", finest);
    Ok(())
}

fn unit(i: usize) -> Vec<f64> {
    (0..7).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

fn random_point(r: &mut LabRng) -> Result<ReducedPoint<f64>, String> {
    let su3 = random_su3(r, 0.3);
    let xi = random_vector::<f64>(r, 7, 1.0);
    let h: f64 = uniform(r, 0.3, 3.0);
    let mut eta = random_vector::<f64>(r, 7, 1.0);
    let k = (0..7).max_by(|&a, &b| xi[a].abs().total_cmp(&xi[b].abs())).expect("nonempty");
    let eval: f64 = eta.iter().zip(&xi).map(|(a, b)| a * b).sum();
    eta[k] += (1.0 - eval) / xi[k];
    ReducedPoint::new(h, &xi, Form::one_form(&eta), su3).map_err(|e| e.to_string())
}

fn reduce_roundtrip(config: &ScenarioConfig, report: &mut Report) -> Result<(), String> {
    let mut r = rng(config.seed);
    let mut cases = vec![(standard_phi::<f64>(), unit(0))];
    for i in 0..config.samples() {
        let (phi, _) = random_positive_phi::<f64>(&mut r, 0.4);
        let xi = if i % 2 == 0 { unit(6) } else { random_vector(&mut r, 7, 1.0) };
        cases.push((phi, xi));
    }
    let (mut phi_res, mut psi_res, mut split, mut star, mut fiber) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (phi, xi) in &cases {
        let g2 = metric_from_phi(phi).map_err(|e| e.to_string())?;
        let rp = reduce(phi, xi).map_err(|e| e.to_string())?;
        let (phi2, psi2, g7) = rp.reconstruct();
        phi_res = phi_res.max(phi2.max_diff(phi));
        psi_res = psi_res.max(psi2.max_diff(g2.psi()));
        split = split.max((&g7 - g2.metric().matrix()).max_abs());
        let metric7 = Metric::new(g7.clone()).map_err(|e| e.to_string())?;
        star = star.max(hodge(&phi2, &metric7, g2.volume()).map_err(|e| e.to_string())?.max_diff(&psi2));
        star = star.max(omega_minus_from_psi(g2.psi(), xi, rp.h()).max_diff(rp.omega_minus()));
        let g_xi = g7.mat_vec(xi);
        for (a, b) in g_xi.iter().zip(rp.eta().coeffs()) {
            fiber = fiber.max((a - b / rp.h()).abs());
        }
    }
    let (mut data_res, mut min_order) = (0.0f64, f64::INFINITY);
    for _ in 0..config.samples() {
        let rp = random_point(&mut r)?;
        let (phi, _, _) = rp.reconstruct();
        let back = reduce(&phi, rp.frame().xi()).map_err(|e| e.to_string())?;
        data_res = data_res
            .max((back.h() - rp.h()).abs())
            .max(back.eta().max_diff(rp.eta()))
            .max(back.omega().max_diff(rp.omega()))
            .max(back.omega_plus().max_diff(rp.omega_plus()))
            .max(back.omega_minus().max_diff(rp.omega_minus()))
            .max((back.g6().matrix() - rp.g6().matrix()).max_abs());
        let hdot: f64 = uniform(&mut r, -1.0, 1.0);
        let etadot = random_form::<f64>(&mut r, 7, 1, 1.0);
        let wdot = random_form::<f64>(&mut r, 6, 2, 1.0);
        let pdot = random_form::<f64>(&mut r, 6, 3, 1.0);
        let exact = rp.variation(hdot, &etadot, &wdot, &pdot).map_err(|e| e.to_string())?;
        let frame = rp.frame();
        let at = |e: f64| {
            assemble_phi(
                rp.h() + e * hdot,
                &(rp.eta() + &etadot.scale(e)),
                &frame.embed(&(rp.su3().omega() + &wdot.scale(e))),
                &frame.embed(&(rp.su3().omega_plus() + &pdot.scale(e))),
            )
        };
        let err = |e: f64| (&at(e) - &at(-e)).scale(0.5 / e).max_diff(&exact);
        min_order = min_order.min((err(1e-2) / err(1e-3)).log10());
    }
    let tol = config.tolerance("roundtrip");
    report.at_most("phi_roundtrip", phi_res, tol);
    report.at_most("psi_roundtrip", psi_res, tol);
    report.at_most("reduced_data_roundtrip", data_res, tol);
    report.at_most("metric_splitting", split, config.tolerance("metric_splitting"));
    report.at_most("fiber_orthogonality", fiber, config.tolerance("metric_splitting"));
    report.at_most("hodge_of_phi", star, config.tolerance("hodge"));
    report.at_least("variation_fd_order", min_order, config.tolerance("variation_order"));
    Ok(())
}

fn control_from(config: &ScenarioConfig) -> StepControl<f64> {
    let flow = config.flow();
    let d = StepControl::default();
    StepControl {
        dt_initial: flow.dt_initial.unwrap_or(d.dt_initial),
        dt_min: flow.dt_min.unwrap_or(d.dt_min),
        dt_max: flow.dt_max.unwrap_or(d.dt_max),
        tolerance: flow.step_tolerance.unwrap_or(d.tolerance),
    }
}

fn form_or_zero(v: &Option<Vec<f64>>, degree: usize) -> Form<f64> {
    match v {
        Some(c) => Form::new(6, degree, c.clone()).expect("validated length"),
        None => Form::zeros(6, degree),
    }
}

fn standard_omega() -> Form<f64> {
    Form::from_terms(6, 2, &[(1.0, &[1, 2]), (1.0, &[3, 4]), (1.0, &[5, 6])])
}

fn metric_or(v: &Option<Vec<f64>>, fallback: Metric<f64>) -> Result<Metric<f64>, String> {
    match v {
        Some(c) => Metric::new(Matrix::from_row_major(6, 6, c.clone())).map_err(|e| format!("initial.metric: {e}")),
        None => Ok(fallback),
    }
}

pub fn csv_of_rows(rows: &[FlowRow<f64>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in rows {
        let fields = [r.t, r.functional, r.norm_f, r.h_min, r.h_max, r.min_eig_g, r.tr_t, r.constraint_residual];
        w.write_record(fields.iter().map(|x| format!("{x:.16e}"))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
}

fn csv_of_metrics(ts: &[f64], metrics: &[Matrix<f64>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    for i in 1..=6 {
        for j in i..=6 {
            header.push(format!("g{i}{j}"));
        }
    }
    w.write_record(&header).expect("in-memory write");
    for (t, g) in ts.iter().zip(metrics) {
        let mut rec = vec![format!("{t:.16e}")];
        for i in 0..6 {
            for j in i..6 {
                rec.push(format!("{:.16e}", g[(i, j)]));
            }
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
}

fn flow_w345(config: &ScenarioConfig, report: &mut Report) -> Result<Vec<(String, String)>, String> {
    let mut r = rng(config.seed);
    let init_cfg = config.initial();
    let t_end = config.flow().t_end.unwrap_or(0.4);
    let control = control_from(config);
    let scale = init_cfg.scale.unwrap_or(0.3);
    report.param("t_end", t_end);
    report.param("scale", scale);
    let explicit = init_cfg.lambda.is_some()
        || init_cfg.theta.is_some()
        || init_cfg.nu3.is_some()
        || init_cfg.f011.is_some()
        || init_cfg.metric.is_some();
    let mut runs: Vec<(W345Init<f64>, Metric<f64>)> = Vec::new();
    if explicit {
        let init = W345Init {
            lambda0: init_cfg.lambda.unwrap_or(0.0),
            theta0: form_or_zero(&init_cfg.theta, 1),
            nu30: form_or_zero(&init_cfg.nu3, 3),
            f0110: form_or_zero(&init_cfg.f011, 2),
            omega: standard_omega(),
        };
        runs.push((init, metric_or(&init_cfg.metric, Metric::euclidean(6))?));
    }
    while runs.len() < config.samples().max(1) {
        let data = random_ansatz::<f64>(&mut r, 0.3);
        runs.push((W345Init::from_ansatz(&data).scaled(scale), data.su3().metric().clone()));
    }
    let integrate = |init: &W345Init<f64>, g0: &Metric<f64>| -> Result<W345Trajectory<f64>, String> {
        integrate_w345(init, g0, 1.0, t_end, &control).map_err(|e| e.to_string())
    };
    let (mut worst_step, mut worst_rate, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut primary = None;
    for (init, g0) in &runs {
        let traj = integrate(init, g0)?;
        worst_step = worst_step.min(traj.worst_functional_decrease());
        for w in traj.rows.windows(2) {
            worst_rate = worst_rate.min((w[1].functional - w[0].functional) / (w[1].t - w[0].t));
        }
        min_eig = min_eig.min(traj.min_eigenvalue());
        if primary.is_none() {
            primary = Some(traj);
        }
    }
    let primary = primary.expect("at least one run");
    let (init, g0) = &runs[0];
    let tol = config.tolerance("functional_monotone");
    report.at_least("functional_step_increment", worst_step, -tol);
    report.at_least("functional_rate", worst_rate, -tol);
    report.check("min_eigenvalue", min_eig, Relation::Above, 0.0);

    let lambda0 = if init.lambda0 != 0.0 { init.lambda0 } else { 1.0 };
    let lambda_only = W345Init {
        lambda0,
        theta0: Form::zeros(6, 1),
        nu30: Form::zeros(6, 3),
        f0110: Form::zeros(6, 2),
        omega: init.omega.clone(),
    };
    let tight = StepControl { tolerance: control.tolerance.min(1e-10), ..control };
    let traj = integrate_w345(&lambda_only, g0, 1.0, t_end, &tight).map_err(|e| e.to_string())?;
    let mut exact_err = 0.0f64;
    for (row, g) in traj.rows.iter().zip(&traj.metrics) {
        let factor = (-(lambda0 * lambda0 / 8.0) * (1.0 - (-15.0 * PI * row.t).exp())).exp();
        exact_err = exact_err.max((g - &g0.matrix().scale(factor)).max_abs());
    }
    report.at_most("lambda_only_exact_solution", exact_err, config.tolerance("lambda_exact"));

    if init.is_zero() {
        let drift = primary.metrics.iter().map(|g| (g - g0.matrix()).max_abs()).fold(0.0, f64::max);
        report.at_most("metric_frozen", drift, 0.0);
    } else {
        let fine = StepControl { tolerance: 1e-12, ..control };
        let t_fit = t_end.min(0.3);
        let start = W345State {
            g6: g0.clone(),
            lambda: init.lambda0,
            theta: init.theta0.clone(),
            nu3: init.nu30.clone(),
            f011: init.f0110.clone(),
            coord_volume: 1.0,
        };
        let full = integrate_w345_full(&start, &init.omega, t_fit, &fine).map_err(|e| e.to_string())?;
        let reduced = integrate_w345(init, g0, 1.0, t_fit, &fine).map_err(|e| e.to_string())?;
        let gap = (full.metrics.last().expect("rows") - reduced.metrics.last().expect("rows")).max_abs();
        report.at_most("closed_form_vs_full_system", gap, config.tolerance("closed_vs_full"));
        let ts: Vec<f64> = full.rows.iter().map(|row| row.t).collect();
        let norm = |a: &Form<f64>| a.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt();
        let series: [(&str, Vec<f64>); 4] = [
            ("lambda", full.data.iter().map(|d| d.0).collect()),
            ("theta", full.data.iter().map(|d| norm(&d.1)).collect()),
            ("nu3", full.data.iter().map(|d| norm(&d.2)).collect()),
            ("f011", full.data.iter().map(|d| norm(&d.3)).collect()),
        ];
        for ((name, values), rate) in series.iter().zip(w345_rates::<f64>()) {
            if values[0] == 0.0 {
                continue;
            }
            let slope = fit_log_slope(&ts, values).ok_or("too few samples for a rate fit")?;
            report.info(&format!("fitted_rate_{name}"), slope);
            report.at_most(&format!("decay_rate_{name}"), (slope - rate).abs(), config.tolerance("decay_rate"));
        }
    }
    let first = primary.rows.first().expect("rows");
    let last = primary.rows.last().expect("rows");
    report.info("functional_initial", first.functional);
    report.info("functional_final", last.functional);
    report.info("tr_t_final", last.tr_t);
    report.info("constraint_residual_initial", first.constraint_residual);
    report.info("constraint_residual_final", last.constraint_residual);
    let ts: Vec<f64> = primary.rows.iter().map(|row| row.t).collect();
    Ok(vec![(".csv".into(), csv_of_rows(&primary.rows)), ("_metric.csv".into(), csv_of_metrics(&ts, &primary.metrics))])
}

fn gh_options(config: &ScenarioConfig) -> GhOptions<f64> {
    let d = GhOptions::default();
    GhOptions { h_floor: config.flow().h_floor.unwrap_or(d.h_floor), ..d }
}

fn flow_gh(config: &ScenarioConfig, report: &mut Report) -> Result<Vec<(String, String)>, String> {
    report.info("norm_convention_full_contraction", 1.0);
    match config.flow().mode {
        FlowMode::Homogeneous => flow_gh_homogeneous(config, report),
        FlowMode::Grid => flow_gh_grid(config, report),
    }
}

fn flow_gh_homogeneous(config: &ScenarioConfig, report: &mut Report) -> Result<Vec<(String, String)>, String> {
    let mut r = rng(config.seed);
    let init_cfg = config.initial();
    let t_end = config.flow().t_end.unwrap_or(1.0);
    let control = control_from(config);
    let options = gh_options(config);
    let scale = init_cfg.scale.unwrap_or(0.2);
    let volume = (2.0 * PI).powi(6);
    report.param("t_end", t_end);
    report.param("scale", scale);
    let mut runs = Vec::new();
    if init_cfg.metric.is_some() || init_cfg.h.is_some() || init_cfg.curvature.is_some() {
        runs.push(GhHomState {
            t: 0.0,
            g: metric_or(&init_cfg.metric, Metric::euclidean(6))?,
            h: init_cfg.h.unwrap_or(1.0),
            f: form_or_zero(&init_cfg.curvature, 2),
            coord_volume: volume,
        });
    }
    while runs.len() < config.samples().max(1) {
        let g = Metric::new(random_spd(&mut r, 6, 0.3)).map_err(|e| e.to_string())?;
        runs.push(GhHomState { t: 0.0, g, h: 1.0, f: random_form(&mut r, 6, 2, scale), coord_volume: volume });
    }
    let run = |s: &GhHomState<f64>| integrate_gh_homogeneous(s, t_end, &control, &options).map_err(|e| e.to_string());
    let (mut decrease_violations, mut false_stationary, mut rigidity) = (0usize, 0usize, 0usize);
    let (mut trace, mut increase, mut min_eig, mut blowdowns) = (0.0f64, f64::NEG_INFINITY, f64::INFINITY, 0usize);
    let mut primary: Option<GhOutcome<f64>> = None;
    for s in &runs {
        let out = run(s)?;
        let curved = !s.f.is_zero(0.0);
        if curved {
            decrease_violations += usize::from(!out.monitors.h_strictly_decreasing);
            false_stationary += out.monitors.stationary_states;
        }
        rigidity += out.monitors.rigidity_violations;
        trace = trace.max(out.monitors.max_trace_residual);
        increase = increase.max(out.monitors.max_functional_increase);
        min_eig = min_eig.min(out.rows.iter().map(|row| row.min_eig_g).fold(f64::INFINITY, f64::min));
        blowdowns += usize::from(matches!(out.termination, GhTermination::Blowdown(_)));
        if primary.is_none() {
            primary = Some(out);
        }
    }
    let frozen = GhHomState { f: Form::zeros(6, 2), ..runs[0].clone() };
    let still = run(&frozen)?;
    let drift = still
        .rows
        .iter()
        .map(|row| (row.h_min - frozen.h).abs().max((row.min_eig_g - frozen.g.min_eigenvalue()).abs()))
        .fold(0.0, f64::max);
    let all_stationary = still.monitors.stationary_states == still.rows.len();
    report.at_most("h_decrease_violations", decrease_violations as f64, 0.0);
    report.at_most("false_stationary_states", false_stationary as f64, 0.0);
    report.at_most("rigidity_violations", (rigidity + still.monitors.rigidity_violations) as f64, 0.0);
    report.at_most("zero_curvature_drift", drift, 0.0);
    report.at_most("zero_curvature_nonstationary_states", if all_stationary { 0.0 } else { 1.0 }, 0.0);
    report.at_most("volume_trace_identity", trace.max(still.monitors.max_trace_residual), config.tolerance("trace_identity"));
    report.at_most("functional_increase", increase.max(0.0), config.tolerance("functional_monotone"));
    report.check("min_eigenvalue", min_eig, Relation::Above, 0.0);
    report.info("blowdowns", blowdowns as f64);
    let primary = primary.expect("at least one run");
    report.info("h_final", primary.rows.last().expect("rows").h_min);
    Ok(vec![(".csv".into(), csv_of_rows(&primary.rows))])
}

/// Grid-mode initial data: near-flat `g`, `h` and `η` perturbed by
/// low-frequency modes of the given amplitude along the active axes.
pub fn grid_initial_state(spec: GridSpec, amplitude: f64, f_harm: Form<f64>) -> GhGridState<f64> {
    let a = spec.active()[0];
    let b = *spec.active().last().expect("active axes");
    let g = Field::from_fn(&spec, 36, |x: &[f64; 6]| {
        let mut m = vec![0.0; 36];
        for i in 0..6 {
            m[i * 7] = 1.0;
        }
        m[14] += 2.0 * amplitude * x[a].sin();
        m[1] += amplitude * x[b].cos();
        m[6] += amplitude * x[b].cos();
        m
    });
    let h = Field::from_fn(&spec, 1, |x: &[f64; 6]| vec![1.0 + 3.0 * amplitude * (x[a] + x[b]).cos()]);
    let eta = Field::from_fn(&spec, 6, |x: &[f64; 6]| {
        vec![0.0, 2.0 * amplitude * x[a].sin(), 0.0, amplitude * x[b].cos(), 0.0, amplitude * (x[a] - x[b]).sin()]
    });
    GhGridState { spec, t: 0.0, g, h, eta, f_harm }
}

fn spec_of(config: &ScenarioConfig, points: usize) -> Result<GridSpec, String> {
    let grid = config.grid.as_ref().ok_or("grid block required")?;
    let order = if grid.order == 4 { StencilOrder::Fourth } else { StencilOrder::Sixth };
    GridSpec::new(grid.axes.iter().map(|a| a - 1).collect(), points, order).map_err(|e| e.to_string())
}

fn flow_gh_grid(config: &ScenarioConfig, report: &mut Report) -> Result<Vec<(String, String)>, String> {
    let init_cfg = config.initial();
    let grid = config.grid.as_ref().ok_or("grid block required")?;
    let spec = spec_of(config, grid.points)?;
    let t_end = config.flow().t_end.unwrap_or(0.1);
    let amplitude = init_cfg.amplitude.unwrap_or(0.01);
    let f_harm = match &init_cfg.curvature {
        Some(c) => Form::new(6, 2, c.clone()).expect("validated length"),
        None => Form::from_terms(6, 2, &[(0.3, &[1, 2]), (0.2, &[3, 4]), (-0.1, &[5, 6])]),
    };
    report.param("t_end", t_end);
    report.param("amplitude", amplitude);
    report.param("points", grid.points as f64);
    report.param("order", grid.order as f64);
    let state = grid_initial_state(spec, amplitude, f_harm);
    let out = integrate_gh_grid(&state, t_end, &control_from(config), &gh_options(config)).map_err(|e| e.to_string())?;
    let m = &out.monitors;
    report.at_most("mean_f_drift", m.max_mean_f_drift, config.tolerance("mean_drift"));
    report.at_most("functional_increase", m.max_functional_increase.max(0.0), config.tolerance("functional_monotone"));
    report.at_most("volume_trace_identity", m.max_trace_residual, config.tolerance("trace_identity"));
    report.at_most("rigidity_violations", m.rigidity_violations as f64, 0.0);
    let min_eig = out.rows.iter().map(|row| row.min_eig_g).fold(f64::INFINITY, f64::min);
    report.check("min_eigenvalue", min_eig, Relation::Above, 0.0);
    let last = out.rows.last().expect("rows");
    report.info("t_final", last.t);
    report.info("closedness_max", out.rows.iter().map(|row| row.constraint_residual).fold(0.0, f64::max));
    report.info("h_min_final", last.h_min);
    report.info("h_max_final", last.h_max);
    report.info("h_strictly_decreasing", if m.h_strictly_decreasing { 1.0 } else { 0.0 });
    report.info("steps", (out.rows.len() - 1) as f64);
    Ok(vec![(".csv".into(), csv_of_rows(&out.rows))])
}

/// Sup-norm error of the discrete scalar curvature of `e^{2f}δ` against the
/// conformal formula `e^{−2f}(−10Δf − 20|df|²)`.
pub fn conformal_error(spec: &GridSpec) -> Result<f64, String> {
    let a = spec.active()[0];
    let b = *spec.active().last().expect("active axes");
    let two = a != b;
    let f = move |x: &[f64; 6]| 0.1 * x[a].sin() + if two { 0.05 * (x[a] + 2.0 * x[b]).cos() } else { 0.0 };
    let g = Field::from_fn(spec, 36, |x: &[f64; 6]| Matrix::<f64>::identity(6).scale((2.0 * f(x)).exp()).as_slice().to_vec());
    let scal = curvature(spec, &g).map_err(|e| e.to_string())?.scal;
    let exact = Field::from_fn(spec, 1, |x: &[f64; 6]| {
        let (fa, fb, lap) = if two {
            let s = (x[a] + 2.0 * x[b]).sin();
            let c = (x[a] + 2.0 * x[b]).cos();
            (0.1 * x[a].cos() - 0.05 * s, -0.1 * s, -0.1 * x[a].sin() - 0.25 * c)
        } else {
            (0.1 * x[a].cos(), 0.0, -0.1 * x[a].sin())
        };
        vec![(-2.0 * f(x)).exp() * (-10.0 * lap - 20.0 * (fa * fa + fb * fb))]
    });
    Ok(scal.max_diff(&exact))
}

fn curvature_check(config: &ScenarioConfig, report: &mut Report) -> Result<(), String> {
    let (points, resolutions) = match &config.grid {
        Some(g) => (g.points, g.resolutions.clone().unwrap_or_else(|| vec![16, 32, 64])),
        None => (64, vec![16, 32, 64]),
    };
    let spec = |n: usize| match &config.grid {
        Some(_) => spec_of(config, n),
        None => GridSpec::new(vec![0, 1], n, StencilOrder::Sixth).map_err(|e| e.to_string()),
    };
    let main = spec(points)?;
    report.param("points", points as f64);
    report.param("order", if main.order() == StencilOrder::Fourth { 4.0 } else { 6.0 });
    report.at_most("conformal_scalar_curvature", conformal_error(&main)?, config.tolerance("scalar_curvature"));
    let errors = resolutions.iter().map(|&n| conformal_error(&spec(n)?)).collect::<Result<Vec<_>, _>>()?;
    let (n0, n1) = (resolutions[0] as f64, *resolutions.last().expect("two resolutions") as f64);
    let order = (errors[0] / errors[errors.len() - 1]).log2() / (n1 / n0).log2();
    for (n, e) in resolutions.iter().zip(&errors) {
        report.info(&format!("error_at_{n}"), *e);
    }
    report.at_least("fd_convergence_order", order, config.tolerance("min_order"));
    let flat = Field::from_fn(&main, 36, |_: &[f64; 6]| Matrix::<f64>::identity(6).as_slice().to_vec());
    let c = curvature(&main, &flat).map_err(|e| e.to_string())?;
    report.at_most("flat_curvature", c.ric.max_abs().max(c.scal.max_abs()), 0.0);
    Ok(())
}

fn functional_signs(config: &ScenarioConfig, report: &mut Report) -> Result<(), String> {
    let mut r = rng(config.seed);
    let zero_level = config.tolerance("zero_level");
    let origin: W345State<f64> = W345State {
        g6: Metric::euclidean(6),
        lambda: 0.0,
        theta: Form::zeros(6, 1),
        nu3: Form::zeros(6, 3),
        f011: Form::zeros(6, 2),
        coord_volume: 1.0,
    };
    let (mut w_max, mut gh_max) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..config.samples() {
        let scale = 10f64.powf(uniform(&mut r, -3.0, 0.5));
        w_max = w_max.max(f_w345(&random_state(&mut r, scale)));
        let g = Metric::new(random_spd(&mut r, 6, 0.3)).map_err(|e| e.to_string())?;
        let f = random_form::<f64>(&mut r, 6, 2, scale);
        let h: f64 = uniform(&mut r, 0.1, 3.0);
        for conv in [NormConvention::Module, NormConvention::FullContraction] {
            gh_max = gh_max.max(f_gh(&g, h, &f, 0.0, 1.0, conv).map_err(|e| e.to_string())?);
        }
    }
    report.at_most("w345_at_origin", f_w345(&origin).abs(), zero_level);
    report.at_most("w345_max_away_from_origin", w_max, -zero_level);
    report.check("gh_flat_max", gh_max, Relation::Below, 0.0);
    let lambda_point = W345State { lambda: 1.0, ..origin.clone() };
    let general = f_general(-1.5, 15.0 / 4.0, 1.5, 1.0).map_err(|e| e.to_string())?;
    let reference = (f_w345(&lambda_point) + 15.0 * PI / 4.0)
        .abs()
        .max((2.0 * PI * general - f_w345(&lambda_point)).abs())
        .max((f_gh(&Metric::euclidean(6), 1.0, &Form::from_terms(6, 2, &[(1.0, &[1, 2])]), 0.0, 1.0, NormConvention::Module)
            .map_err(|e| e.to_string())?
            + PI / 4.0)
            .abs());
    report.at_most("reference_values", reference, config.tolerance("reference"));
    Ok(())
}
