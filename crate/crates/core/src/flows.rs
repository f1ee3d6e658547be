//! The W345 gradient flow (metric driven by exponentially decaying torsion
//! data) and the GH flow in homogeneous and periodic-grid modes.

use thiserror::Error;

use crate::discrete_geo::{
    codifferential, curvature, exterior_d, hessian_laplacian, integrate as quadrature, inverse_metrics, metrics_of,
    Field, GeoError, GridSpec,
};
use crate::exterior::{inner, ExteriorError, Form, Metric};
use crate::functionals::{circ2, f_gh, f_w345, w345_gradient, FunctionalError, NormConvention, W345State};
use crate::linalg::Matrix;
use crate::ode::{integrate, IntegrationError, StepControl};
use crate::scalar::Real;
use crate::torsion_verify::AnsatzData;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("fiber factor h must be positive, got {0}")]
    Domain(f64),
    #[error("metric lost positive definiteness")]
    Spd,
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// One row of a flow time series.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRow<S> {
    pub t: S,
    pub functional: S,
    pub norm_f: S,
    pub h_min: S,
    pub h_max: S,
    pub min_eig_g: S,
    pub tr_t: S,
    pub constraint_residual: S,
}

pub const CSV_HEADER: &str = "t,functional,norm_F,h_min,h_max,min_eig_g,trT,constraint_residual";

fn matrix_of<S: Real>(v: &[S]) -> Matrix<S> {
    Matrix::from_row_major(6, 6, v[..36].to_vec()).symmetrize()
}

fn spd_check<S: Real>(m: &Matrix<S>) -> Result<(), String> {
    if m.cholesky().is_some() {
        Ok(())
    } else {
        Err("metric not positive definite".into())
    }
}

// ---------------------------------------------------------------- W345

/// Initial torsion data `(λ₀, θ₀, ν₃,₀, F₀,₀)` and the quotient `ω` used by
/// the constraint monitor.
#[derive(Clone, Debug, PartialEq)]
pub struct W345Init<S> {
    pub lambda0: S,
    pub theta0: Form<S>,
    pub nu30: Form<S>,
    pub f0110: Form<S>,
    pub omega: Form<S>,
}

impl<S: Real> W345Init<S> {
    pub fn from_ansatz(data: &AnsatzData<S>) -> Self {
        Self {
            lambda0: data.lambda(),
            theta0: data.theta().clone(),
            nu30: data.nu3().clone(),
            f0110: data.f011().clone(),
            omega: data.su3().omega().clone(),
        }
    }

    /// Torsion data multiplied by `s`.
    pub fn scaled(&self, s: S) -> Self {
        Self {
            lambda0: self.lambda0 * s,
            theta0: self.theta0.scale(s),
            nu30: self.nu30.scale(s),
            f0110: self.f0110.scale(s),
            omega: self.omega.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lambda0 == S::zero() && self.theta0.is_zero(S::zero()) && self.nu30.is_zero(S::zero()) && self.f0110.is_zero(S::zero())
    }
}

pub fn w345_rates<S: Real>() -> [S; 4] {
    let pi = S::PI();
    [-S::ratio(15, 2) * pi, -S::ratio(10, 9) * pi, -pi, -pi]
}

/// `(λ, θ, ν₃, F₀)` at time `t`.
pub fn w345_closed_forms<S: Real>(t: S, init: &W345Init<S>) -> (S, Form<S>, Form<S>, Form<S>) {
    let [rl, rt, rn, rf] = w345_rates::<S>();
    (
        init.lambda0 * (rl * t).exp(),
        init.theta0.scale((rt * t).exp()),
        init.nu30.scale((rn * t).exp()),
        init.f0110.scale((rf * t).exp()),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct W345FlowState<S> {
    pub t: S,
    pub g6: Metric<S>,
    pub init: W345Init<S>,
    pub coord_volume: S,
}

impl<S: Real> W345FlowState<S> {
    /// Reduced state with the closed-form torsion data substituted.
    pub fn reduced(&self) -> W345State<S> {
        let (lambda, theta, nu3, f011) = w345_closed_forms(self.t, &self.init);
        W345State { g6: self.g6.clone(), lambda, theta, nu3, f011, coord_volume: self.coord_volume }
    }
}

/// `∂_t g = −2π[(15/16λ² + 5/36|θ|² + 1/8|ν₃|² + 1/8|F₀|²)g − 5/18θ⊗θ − ¼ν₃∘ν₃ − ¼F₀∘F₀]`.
pub fn w345_metric_rhs<S: Real>(s: &W345FlowState<S>) -> Matrix<S> {
    s.reduced().metric_tensor_q().scale(-S::lit(2.0) * S::PI())
}

fn w345_row<S: Real>(s: &W345State<S>, omega: &Form<S>, t: S) -> FlowRow<S> {
    let curv = &s.f011 + &omega.scale(s.lambda);
    let residual = &s.theta.wedge(omega).scale(S::ratio(2, 3) * s.lambda) + &s.nu3.scale(s.lambda);
    FlowRow {
        t,
        functional: f_w345(s),
        norm_f: inner(&curv, &curv, &s.g6).expect("2-form").sqrt(),
        h_min: S::one(),
        h_max: S::one(),
        min_eig_g: s.g6.min_eigenvalue(),
        tr_t: S::ratio(3, 2) * s.lambda,
        constraint_residual: residual.max_abs(),
    }
}

/// Trajectory of the W345 flow.
#[derive(Clone, Debug)]
pub struct W345Trajectory<S> {
    pub rows: Vec<FlowRow<S>>,
    pub metrics: Vec<Matrix<S>>,
    /// Torsion data `(λ, θ, ν₃, F₀)` per row.
    pub data: Vec<(S, Form<S>, Form<S>, Form<S>)>,
}

impl<S: Real> W345Trajectory<S> {
    /// Most negative increment of the functional between accepted steps.
    pub fn worst_functional_decrease(&self) -> S {
        self.rows.windows(2).fold(S::zero(), |m, w| m.min(w[1].functional - w[0].functional))
    }

    pub fn min_eigenvalue(&self) -> S {
        self.rows.iter().fold(S::infinity(), |m, r| m.min(r.min_eig_g))
    }
}

/// RK4 integration of the metric equation with the closed-form torsion
/// data.
pub fn integrate_w345<S: Real>(
    init: &W345Init<S>,
    g0: &Metric<S>,
    coord_volume: S,
    t_end: S,
    control: &StepControl<S>,
) -> Result<W345Trajectory<S>, FlowError> {
    let mut traj = W345Trajectory { rows: Vec::new(), metrics: Vec::new(), data: Vec::new() };
    let rhs = |t: S, y: &[S]| -> Result<Vec<S>, String> {
        let g = Metric::new(matrix_of(y)).map_err(|e| e.to_string())?;
        let st = W345FlowState { t, g6: g, init: init.clone(), coord_volume };
        Ok(w345_metric_rhs(&st).as_slice().to_vec())
    };
    let admissible = |y: &[S]| spd_check(&matrix_of(y));
    let observe = |t: S, y: &[S]| {
        let g = Metric::new(matrix_of(y)).expect("accepted states are SPD");
        let st = W345FlowState { t, g6: g.clone(), init: init.clone(), coord_volume }.reduced();
        traj.rows.push(w345_row(&st, &init.omega, t));
        traj.metrics.push(g.matrix().clone());
        traj.data.push((st.lambda, st.theta, st.nu3, st.f011));
        true
    };
    integrate(rhs, admissible, observe, g0.matrix().as_slice().to_vec(), S::zero(), t_end, control)?;
    Ok(traj)
}

fn pack_w345<S: Real>(s: &W345State<S>) -> Vec<S> {
    let mut y = s.g6.matrix().as_slice().to_vec();
    y.push(s.lambda);
    y.extend_from_slice(s.theta.coeffs());
    y.extend_from_slice(s.nu3.coeffs());
    y.extend_from_slice(s.f011.coeffs());
    y
}

fn unpack_w345<S: Real>(y: &[S], coord_volume: S) -> Result<W345State<S>, String> {
    let g = Metric::new(matrix_of(y)).map_err(|e| e.to_string())?;
    Ok(W345State {
        g6: g,
        lambda: y[36],
        theta: Form::new(6, 1, y[37..43].to_vec()).expect("θ"),
        nu3: Form::new(6, 3, y[43..63].to_vec()).expect("ν₃"),
        f011: Form::new(6, 2, y[63..78].to_vec()).expect("F₀"),
        coord_volume,
    })
}

fn pack_direction<S: Real>(v: &crate::functionals::VariationVector<S>) -> Vec<S> {
    let mut y = v.k.symmetrize().as_slice().to_vec();
    y.push(v.f);
    y.extend_from_slice(v.beta.coeffs());
    y.extend_from_slice(v.mu.coeffs());
    y.extend_from_slice(v.rho.coeffs());
    y
}

/// Integrates the full gradient system `(g, λ, θ, ν₃, F₀)' = ∇𝓕`
/// independently of the closed forms.
pub fn integrate_w345_full<S: Real>(
    initial: &W345State<S>,
    omega: &Form<S>,
    t_end: S,
    control: &StepControl<S>,
) -> Result<W345Trajectory<S>, FlowError> {
    let vol = initial.coord_volume;
    let mut traj = W345Trajectory { rows: Vec::new(), metrics: Vec::new(), data: Vec::new() };
    let rhs = |_t: S, y: &[S]| -> Result<Vec<S>, String> { Ok(pack_direction(&w345_gradient(&unpack_w345(y, vol)?))) };
    let admissible = |y: &[S]| spd_check(&matrix_of(y));
    let observe = |t: S, y: &[S]| {
        let st = unpack_w345(y, vol).expect("accepted states are SPD");
        traj.rows.push(w345_row(&st, omega, t));
        traj.metrics.push(st.g6.matrix().clone());
        traj.data.push((st.lambda, st.theta, st.nu3, st.f011));
        true
    };
    integrate(rhs, admissible, observe, pack_w345(initial), S::zero(), t_end, control)?;
    Ok(traj)
}

/// Least-squares slope of `ln|v|` against `t`, skipping zero values.
pub fn fit_log_slope<S: Real>(ts: &[S], values: &[S]) -> Option<S> {
    let pts: Vec<(S, S)> =
        ts.iter().zip(values).filter(|(_, v)| v.abs() > S::min_positive_value()).map(|(&t, &v)| (t, v.abs().ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = S::from_usize_exact(pts.len());
    let mt = pts.iter().map(|p| p.0).sum::<S>() / n;
    let my = pts.iter().map(|p| p.1).sum::<S>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum::<S>();
    let sxx = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum::<S>();
    if sxx == S::zero() {
        None
    } else {
        Some(sxy / sxx)
    }
}

// ---------------------------------------------------------------- GH

/// Curvature and potential terms entering the GH right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct GeomTerms<S> {
    pub ric: Matrix<S>,
    pub scal: S,
    /// `Hess(h^{1/2})`.
    pub hess_u: Matrix<S>,
    /// `Δ(h^{1/2})`.
    pub lap_u: S,
    /// `d*(h⁻¹F)`.
    pub dstar_hinv_f: Form<S>,
}

impl<S: Real> GeomTerms<S> {
    /// Flat base with constant `h`.
    pub fn flat() -> Self {
        Self { ric: Matrix::zeros(6, 6), scal: S::zero(), hess_u: Matrix::zeros(6, 6), lap_u: S::zero(), dstar_hinv_f: Form::zeros(6, 1) }
    }
}

/// Rates `(∂_t g, ∂_t h, ∂_t η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GhRates<S> {
    pub gdot: Matrix<S>,
    pub hdot: S,
    pub etadot: Form<S>,
}

impl<S: Real> GhRates<S> {
    pub fn sup(&self) -> S {
        self.gdot.max_abs().max(self.hdot.abs()).max(self.etadot.max_abs())
    }
}

/// GH right-hand side with `u = h^{1/2}`:
/// `∂_t g = ½u(Ric − ½Scal g) − ½(Hess u − Δu g) − (1/8)h⁻¹(j(F) − ½|F|²g)`,
/// `∂_t h = −¼h^{−1/2}Scal − (1/8)h⁻²|F|²`, `∂_t η = ¼d*(h⁻¹F)`.
pub fn gh_rhs<S: Real>(
    g: &Metric<S>,
    h: S,
    f: &Form<S>,
    geom: &GeomTerms<S>,
    convention: NormConvention,
) -> Result<GhRates<S>, FlowError> {
    if !(h > S::zero()) {
        return Err(FlowError::Domain(h.to_f64_lossy()));
    }
    let gm = g.matrix();
    let u = h.sqrt();
    let half = S::ratio(1, 2);
    let eighth = S::ratio(1, 8);
    let fsq = convention.two_form_norm_sq(f, g);
    let j = circ2(f, g);
    let einstein = &geom.ric - &gm.scale(half * geom.scal);
    let hess_term = &geom.hess_u - &gm.scale(geom.lap_u);
    let f_term = &j - &gm.scale(half * fsq);
    let gdot = &(&einstein.scale(half * u) - &hess_term.scale(half)) - &f_term.scale(eighth / h);
    let hdot = -S::ratio(1, 4) * geom.scal / u - eighth * fsq / (h * h);
    let etadot = geom.dstar_hinv_f.scale(S::ratio(1, 4));
    Ok(GhRates { gdot: gdot.symmetrize(), hdot, etadot })
}

/// `½tr_g(∂_t g) − (−½h^{1/2}Scal + (5/4)Δh^{1/2} + (1/8)h⁻¹|F|²)`.
pub fn volume_trace_residual<S: Real>(
    g: &Metric<S>,
    h: S,
    f: &Form<S>,
    geom: &GeomTerms<S>,
    rates: &GhRates<S>,
    convention: NormConvention,
) -> S {
    let lhs = S::ratio(1, 2) * g.inverse().frobenius_dot(&rates.gdot);
    let fsq = convention.two_form_norm_sq(f, g);
    let rhs = -S::ratio(1, 2) * h.sqrt() * geom.scal + S::ratio(5, 4) * geom.lap_u + S::ratio(1, 8) * fsq / h;
    lhs - rhs
}

/// Homogeneous GH state on a flat torus of coordinate volume `coord_volume`.
#[derive(Clone, Debug, PartialEq)]
pub struct GhHomState<S> {
    pub t: S,
    pub g: Metric<S>,
    pub h: S,
    pub f: Form<S>,
    pub coord_volume: S,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhOptions<S> {
    pub convention: NormConvention,
    /// Blow-down is reported when `h` drops below this floor.
    pub h_floor: S,
    /// Sup-norm of all rates below which a state is stationary.
    pub stationary_tol: S,
}

impl<S: Real> Default for GhOptions<S> {
    fn default() -> Self {
        Self { convention: NormConvention::FullContraction, h_floor: S::lit(1e-3), stationary_tol: S::lit(1e-10) }
    }
}

/// Reached when the fiber collapses (`h` below the floor).
#[derive(Clone, Debug, PartialEq)]
pub struct BlowdownReport<S> {
    pub t: S,
    pub h_min: S,
    pub norm_f: S,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GhTermination<S> {
    Completed,
    Stationary,
    Blowdown(BlowdownReport<S>),
}

/// Invariant monitors collected along a GH trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct GhMonitors<S> {
    /// Every accepted step decreased `h` (min and max) strictly.
    pub h_strictly_decreasing: bool,
    /// Largest increase of the functional between accepted steps.
    pub max_functional_increase: S,
    /// Largest Cor.-type volume-trace residual over accepted steps.
    pub max_trace_residual: S,
    /// Largest drift of the per-component mean of `F` from its initial value.
    pub max_mean_f_drift: S,
    /// Number of accepted states flagged stationary.
    pub stationary_states: usize,
    /// Stationary states violated the rigidity conclusions.
    pub rigidity_violations: usize,
}

impl<S: Real> GhMonitors<S> {
    fn new() -> Self {
        Self {
            h_strictly_decreasing: true,
            max_functional_increase: S::neg_infinity(),
            max_trace_residual: S::zero(),
            max_mean_f_drift: S::zero(),
            stationary_states: 0,
            rigidity_violations: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GhOutcome<S> {
    pub rows: Vec<FlowRow<S>>,
    pub monitors: GhMonitors<S>,
    pub termination: GhTermination<S>,
}

fn rigidity_ok<S: Real>(norm_f: S, scal_sup: S, h_spread: S) -> bool {
    let tol = S::lit(1e-8);
    norm_f < tol && scal_sup < tol && h_spread <= tol
}

/// Homogeneous flat-base GH flow; `F` is constant in time.
pub fn integrate_gh_homogeneous<S: Real>(
    initial: &GhHomState<S>,
    t_end: S,
    control: &StepControl<S>,
    options: &GhOptions<S>,
) -> Result<GhOutcome<S>, FlowError> {
    if !(initial.h > S::zero()) {
        return Err(FlowError::Domain(initial.h.to_f64_lossy()));
    }
    let conv = options.convention;
    let f = initial.f.clone();
    let geom = GeomTerms::flat();
    let unpack = |y: &[S]| -> Result<(Metric<S>, S), String> {
        let g = Metric::new(matrix_of(y)).map_err(|e| e.to_string())?;
        Ok((g, y[36]))
    };
    let rhs = |_t: S, y: &[S]| -> Result<Vec<S>, String> {
        let (g, h) = unpack(y)?;
        let r = gh_rhs(&g, h, &f, &geom, conv).map_err(|e| e.to_string())?;
        let mut out = r.gdot.as_slice().to_vec();
        out.push(r.hdot);
        Ok(out)
    };
    let admissible = |y: &[S]| -> Result<(), String> {
        spd_check(&matrix_of(y))?;
        if y[36] > S::zero() {
            Ok(())
        } else {
            Err("h not positive".into())
        }
    };
    let mut rows: Vec<FlowRow<S>> = Vec::new();
    let mut monitors = GhMonitors::<S>::new();
    let mut termination = GhTermination::Completed;
    let mut failure: Option<FlowError> = None;
    let observe = |t: S, y: &[S]| -> bool {
        let (g, h) = unpack(y).expect("accepted states are admissible");
        let rates = match gh_rhs(&g, h, &f, &geom, conv) {
            Ok(r) => r,
            Err(e) => {
                failure = Some(e);
                return false;
            }
        };
        let vol = initial.coord_volume * g.det().sqrt();
        let functional = f_gh(&g, h, &f, geom.scal, vol, conv).expect("h > 0");
        let norm_f = conv.two_form_norm_sq(&f, &g).sqrt();
        let row = FlowRow {
            t,
            functional,
            norm_f,
            h_min: h,
            h_max: h,
            min_eig_g: g.min_eigenvalue(),
            tr_t: S::zero(),
            constraint_residual: S::zero(),
        };
        if let Some(prev) = rows.last() {
            monitors.max_functional_increase = monitors.max_functional_increase.max(functional - prev.functional);
            if !(h < prev.h_min) {
                monitors.h_strictly_decreasing = false;
            }
        }
        monitors.max_trace_residual =
            monitors.max_trace_residual.max(volume_trace_residual(&g, h, &f, &geom, &rates, conv).abs());
        rows.push(row);
        if rates.sup() < options.stationary_tol {
            monitors.stationary_states += 1;
            if !rigidity_ok(norm_f, geom.scal.abs(), S::zero()) {
                monitors.rigidity_violations += 1;
            }
            termination = GhTermination::Stationary;
        }
        if h < options.h_floor {
            termination = GhTermination::Blowdown(BlowdownReport { t, h_min: h, norm_f });
            return false;
        }
        true
    };
    let mut y0 = initial.g.matrix().as_slice().to_vec();
    y0.push(initial.h);
    let result = integrate(rhs, admissible, observe, y0, initial.t, t_end, control);
    if let Some(e) = failure {
        return Err(e);
    }
    match result {
        Ok(_) => {}
        Err(e) => {
            // the step controller can stall as h approaches zero
            if let (Some(last), IntegrationError::StepUnderflow { .. }) = (rows.last(), &e) {
                if last.h_min < S::lit(10.0) * options.h_floor.max(S::epsilon()) {
                    termination = GhTermination::Blowdown(BlowdownReport { t: last.t, h_min: last.h_min, norm_f: last.norm_f });
                } else {
                    return Err(e.into());
                }
            } else {
                return Err(e.into());
            }
        }
    }
    Ok(GhOutcome { rows, monitors, termination })
}

/// GH state on a periodic grid; `F = f_harm + dη`.
#[derive(Clone, Debug, PartialEq)]
pub struct GhGridState<S> {
    pub spec: GridSpec,
    pub t: S,
    /// 36-component metric field.
    pub g: Field<S>,
    /// Scalar field `h`.
    pub h: Field<S>,
    /// 1-form potential `η`.
    pub eta: Field<S>,
    pub f_harm: Form<S>,
}

/// Pointwise rates and diagnostics of the grid right-hand side.
pub struct GridEvaluation<S> {
    pub gdot: Field<S>,
    pub hdot: Field<S>,
    pub etadot: Field<S>,
    pub f: Field<S>,
    pub functional: S,
    pub max_trace_residual: S,
    pub scal_sup: S,
    pub norm_f_sup: S,
}

/// `F = f_harm + dη`.
pub fn grid_curvature_form<S: Real>(spec: &GridSpec, eta: &Field<S>, f_harm: &Form<S>) -> Result<Field<S>, FlowError> {
    let mut f = exterior_d(spec, eta, 1)?;
    for p in 0..f.npoints() {
        for (v, &c) in f.at_mut(p).iter_mut().zip(f_harm.coeffs()) {
            *v = *v + c;
        }
    }
    Ok(f)
}

pub fn evaluate_grid<S: Real>(
    spec: &GridSpec,
    g: &Field<S>,
    h: &Field<S>,
    eta: &Field<S>,
    f_harm: &Form<S>,
    convention: NormConvention,
) -> Result<GridEvaluation<S>, FlowError> {
    let n = spec.npoints();
    for p in 0..n {
        if !(h.at(p)[0] > S::zero()) {
            return Err(FlowError::Domain(h.at(p)[0].to_f64_lossy()));
        }
    }
    let curv = curvature(spec, g)?;
    let ginv = inverse_metrics(g)?;
    let metrics = metrics_of(g)?;
    let u = Field::from_data(1, h.data().iter().map(|x| x.sqrt()).collect());
    let (hess, lap) = hessian_laplacian(spec, &u, &ginv, &curv.gamma)?;
    let f = grid_curvature_form(spec, eta, f_harm)?;
    let hinv_f = Field::from_data(15, (0..n).flat_map(|p| f.at(p).iter().map(move |&c| c / h.at(p)[0]).collect::<Vec<_>>()).collect());
    let dstar = codifferential(spec, &hinv_f, 2, &metrics)?;
    let mut gdot = Field::zeros(spec, 36);
    let mut hdot = Field::zeros(spec, 1);
    let mut etadot = Field::zeros(spec, 6);
    let mut density = Vec::with_capacity(n);
    let mut max_trace = S::zero();
    let (mut scal_sup, mut norm_f_sup) = (S::zero(), S::zero());
    for p in 0..n {
        let geom = GeomTerms {
            ric: curv.ric.matrix_at(p),
            scal: curv.scal.at(p)[0],
            hess_u: hess.matrix_at(p),
            lap_u: lap.at(p)[0],
            dstar_hinv_f: dstar.form_at(p, 1),
        };
        let fp = f.form_at(p, 2);
        let hp = h.at(p)[0];
        let rates = gh_rhs(&metrics[p], hp, &fp, &geom, convention)?;
        max_trace = max_trace.max(volume_trace_residual(&metrics[p], hp, &fp, &geom, &rates, convention).abs());
        gdot.at_mut(p).copy_from_slice(rates.gdot.as_slice());
        hdot.at_mut(p)[0] = rates.hdot;
        etadot.at_mut(p).copy_from_slice(rates.etadot.coeffs());
        let fsq = convention.two_form_norm_sq(&fp, &metrics[p]);
        density.push(
            S::lit(2.0) * S::PI() * (S::ratio(1, 2) * hp.sqrt() * geom.scal - S::ratio(1, 8) * fsq / hp) * metrics[p].det().sqrt(),
        );
        scal_sup = scal_sup.max(geom.scal.abs());
        norm_f_sup = norm_f_sup.max(fsq.sqrt());
    }
    Ok(GridEvaluation {
        gdot,
        hdot,
        etadot,
        f,
        functional: quadrature(spec, &density),
        max_trace_residual: max_trace,
        scal_sup,
        norm_f_sup,
    })
}

fn pack_grid<S: Real>(g: &Field<S>, h: &Field<S>, eta: &Field<S>) -> Vec<S> {
    let mut y = g.data().to_vec();
    y.extend_from_slice(h.data());
    y.extend_from_slice(eta.data());
    y
}

fn unpack_grid<S: Real>(n: usize, y: &[S]) -> (Field<S>, Field<S>, Field<S>) {
    let g = Field::from_data(36, y[..36 * n].to_vec());
    let h = Field::from_data(1, y[36 * n..37 * n].to_vec());
    let eta = Field::from_data(6, y[37 * n..43 * n].to_vec());
    (g, h, eta)
}

/// GH flow on the grid, integrating `(g, h, η)` and rebuilding
/// `F = f_harm + dη` at every evaluation.
pub fn integrate_gh_grid<S: Real>(
    initial: &GhGridState<S>,
    t_end: S,
    control: &StepControl<S>,
    options: &GhOptions<S>,
) -> Result<GhOutcome<S>, FlowError> {
    let spec = initial.spec.clone();
    let n = spec.npoints();
    let conv = options.convention;
    let f_harm = initial.f_harm.clone();
    let rhs = |_t: S, y: &[S]| -> Result<Vec<S>, String> {
        let (g, h, eta) = unpack_grid(n, y);
        let ev = evaluate_grid(&spec, &g, &h, &eta, &f_harm, conv).map_err(|e| e.to_string())?;
        Ok(pack_grid(&ev.gdot, &ev.hdot, &ev.etadot))
    };
    let admissible = |y: &[S]| -> Result<(), String> {
        let (g, h, _) = unpack_grid(n, y);
        if h.data().iter().any(|&x| !(x > S::zero())) {
            return Err("h not positive".into());
        }
        inverse_metrics(&g).map(|_| ()).map_err(|e| e.to_string())
    };
    let initial_mean: Vec<S> = initial.f_harm.coeffs().to_vec();
    let mut rows: Vec<FlowRow<S>> = Vec::new();
    let mut monitors = GhMonitors::<S>::new();
    let mut termination = GhTermination::Completed;
    let mut failure: Option<FlowError> = None;
    let observe = |t: S, y: &[S]| -> bool {
        let (g, h, eta) = unpack_grid(n, y);
        let ev = match evaluate_grid(&spec, &g, &h, &eta, &f_harm, conv) {
            Ok(ev) => ev,
            Err(e) => {
                failure = Some(e);
                return false;
            }
        };
        let h_min = h.data().iter().fold(S::infinity(), |m, &x| m.min(x));
        let h_max = h.data().iter().fold(S::neg_infinity(), |m, &x| m.max(x));
        let min_eig = (0..n).fold(S::infinity(), |m, p| m.min(g.matrix_at(p).min_symmetric_eigenvalue()));
        let drift = (0..15).fold(S::zero(), |m, c| m.max((ev.f.mean(c) - initial_mean[c]).abs()));
        if let Some(prev) = rows.last() {
            monitors.max_functional_increase = monitors.max_functional_increase.max(ev.functional - prev.functional);
            if !(h_min < prev.h_min && h_max < prev.h_max) {
                monitors.h_strictly_decreasing = false;
            }
        }
        monitors.max_trace_residual = monitors.max_trace_residual.max(ev.max_trace_residual);
        monitors.max_mean_f_drift = monitors.max_mean_f_drift.max(drift);
        let sup = ev.gdot.max_abs().max(ev.hdot.max_abs()).max(ev.etadot.max_abs());
        if sup < options.stationary_tol {
            monitors.stationary_states += 1;
            if !rigidity_ok(ev.norm_f_sup, ev.scal_sup, h_max - h_min) {
                monitors.rigidity_violations += 1;
            }
            termination = GhTermination::Stationary;
        }
        rows.push(FlowRow {
            t,
            functional: ev.functional,
            norm_f: ev.norm_f_sup,
            h_min,
            h_max,
            min_eig_g: min_eig,
            tr_t: S::zero(),
            constraint_residual: exterior_d(&spec, &ev.f, 2).map(|d| d.max_abs()).unwrap_or(S::nan()),
        });
        if h_min < options.h_floor {
            termination = GhTermination::Blowdown(BlowdownReport { t, h_min, norm_f: ev.norm_f_sup });
            return false;
        }
        true
    };
    let y0 = pack_grid(&initial.g, &initial.h, &initial.eta);
    let result = integrate(rhs, admissible, observe, y0, initial.t, t_end, control);
    if let Some(e) = failure {
        return Err(e);
    }
    result?;
    Ok(GhOutcome { rows, monitors, termination })
}
