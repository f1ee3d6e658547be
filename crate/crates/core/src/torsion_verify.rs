//! Torsion of the constant fiber-length ansatz `φ = η∧ω + Ω₊` computed
//! from the structure equations
//! `dη = F₀ + λω`, `dω = (2/3)θ∧ω + ν₃`, `dΩ = θ∧Ω`
//! and compared with the closed forms in terms of `(λ, θ, ν₃, F₀)`.
//!
//! The fiber direction is coordinate 0 of `R^7` and the quotient
//! coordinates are 1..6, with `η = e¹`.

use thiserror::Error;

use crate::exterior::{ExteriorError, Form};
use crate::g2su3::{extract_torsion, metric_from_phi, G2Data, SU3Data, StructureError, TorsionForms};
use crate::linalg::Matrix;
use crate::sampling::{random_form, random_su3, uniform, LabRng};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnsatzError {
    #[error("ν₃ is not in the primitive 12-dimensional summand (residual {0:e})")]
    NuNotPrimitive(f64),
    #[error("F₀ is not a primitive (1,1)-form (residual {0:e})")]
    FNotPrimitive(f64),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// Constant-coefficient torsion data of the ansatz.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzData<S> {
    lambda: S,
    theta: Form<S>,
    nu3: Form<S>,
    f011: Form<S>,
    su3: SU3Data<S>,
}

fn shape<S: Real>(a: &Form<S>, degree: usize) -> Result<(), ExteriorError> {
    if a.dim() != 6 {
        return Err(ExteriorError::DimensionMismatch { left: a.dim(), right: 6 });
    }
    if a.degree() != degree {
        return Err(ExteriorError::DegreeMismatch { left: a.degree(), right: degree });
    }
    Ok(())
}

impl<S: Real> AnsatzData<S> {
    pub fn new(lambda: S, theta: Form<S>, nu3: Form<S>, f011: Form<S>, su3: SU3Data<S>) -> Result<Self, AnsatzError> {
        shape(&theta, 1)?;
        shape(&nu3, 3)?;
        shape(&f011, 2)?;
        let tol = S::lit(1e-10).max(S::epsilon() * S::lit(1e3));
        let nu_scale = nu3.max_abs().max(S::one());
        let nu_res = nu3.wedge(su3.omega()).max_abs().max(su3.project_3form_12(&nu3)?.max_diff(&nu3));
        if nu_res > tol * nu_scale {
            return Err(AnsatzError::NuNotPrimitive(nu_res.to_f64_lossy()));
        }
        let f_scale = f011.max_abs().max(S::one());
        let f_res = f011
            .wedge(&su3.omega().power(2))
            .max_abs()
            .max(f011.wedge(su3.omega_plus()).max_abs())
            .max(f011.wedge(su3.omega_minus()).max_abs());
        if f_res > tol * f_scale {
            return Err(AnsatzError::FNotPrimitive(f_res.to_f64_lossy()));
        }
        Ok(Self { lambda, theta, nu3, f011, su3 })
    }

    /// Only `λ` nonzero, on the standard structure.
    pub fn standard(su3: SU3Data<S>, lambda: S) -> Self {
        Self { lambda, theta: Form::zeros(6, 1), nu3: Form::zeros(6, 3), f011: Form::zeros(6, 2), su3 }
    }

    pub fn with_theta(mut self, theta: Form<S>) -> Self {
        self.theta = theta;
        self
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn theta(&self) -> &Form<S> {
        &self.theta
    }

    pub fn nu3(&self) -> &Form<S> {
        &self.nu3
    }

    pub fn f011(&self) -> &Form<S> {
        &self.f011
    }

    pub fn su3(&self) -> &SU3Data<S> {
        &self.su3
    }

    /// `(|θ|², |ν₃|², |F₀|²)` in the quotient metric.
    pub fn norms(&self) -> (S, S, S) {
        (self.su3.norm_sq(&self.theta), self.su3.norm_sq(&self.nu3), self.su3.norm_sq(&self.f011))
    }
}

/// Draws admissible data on a random SU(3)-structure.
pub fn random_ansatz<S: Real>(rng: &mut LabRng, spread: f64) -> AnsatzData<S> {
    let su3 = random_su3(rng, spread);
    let lambda = uniform(rng, -1.0, 1.0);
    let theta = random_form(rng, 6, 1, 1.0);
    let nu3 = su3.project_3form_12(&random_form(rng, 6, 3, 1.0)).expect("3-form");
    let f011 = su3.project_2form(&random_form(rng, 6, 2, 1.0)).expect("2-form").alpha8;
    AnsatzData { lambda, theta, nu3, f011, su3 }
}

/// `[0 | I]`: `R^7 → R^6` forgetting the fiber coordinate.
fn base_projection<S: Real>() -> Matrix<S> {
    Matrix::from_fn(6, 7, |r, c| if c == r + 1 { S::one() } else { S::zero() })
}

/// Dim-7 basic form of a dim-6 form.
pub fn lift<S: Real>(a: &Form<S>) -> Form<S> {
    a.pullback(&base_projection())
}

pub fn eta<S: Real>() -> Form<S> {
    Form::from_terms(7, 1, &[(1.0, &[1])])
}

/// The G₂-structure `φ = η∧ω + Ω₊` of the data.
pub fn ansatz_g2<S: Real>(data: &AnsatzData<S>) -> Result<G2Data<S>, StructureError> {
    let phi = &eta::<S>().wedge(&lift(data.su3.omega())) + &lift(data.su3.omega_plus());
    metric_from_phi(&phi)
}

/// Exterior derivatives of the generators `η, ω, Ω₊, Ω₋`.
struct Differentials<S> {
    d_eta: Form<S>,
    d_omega: Form<S>,
    d_plus: Form<S>,
    d_minus: Form<S>,
}

fn generator_differentials<S: Real>(data: &AnsatzData<S>) -> Differentials<S> {
    let su3 = &data.su3;
    let d_eta = &data.f011 + &su3.omega().scale(data.lambda);
    let d_omega = &data.theta.wedge(su3.omega()).scale(S::ratio(2, 3)) + &data.nu3;
    Differentials {
        d_eta,
        d_omega,
        d_plus: data.theta.wedge(su3.omega_plus()),
        d_minus: data.theta.wedge(su3.omega_minus()),
    }
}

/// `dφ` and `dψ` by the Leibniz rule, with `ψ = ½ω² − η∧Ω₋`.
pub fn formal_dphi_dpsi<S: Real>(data: &AnsatzData<S>) -> (Form<S>, Form<S>) {
    let d = generator_differentials(data);
    let eta = eta::<S>();
    let omega = lift(data.su3.omega());
    let minus = lift(data.su3.omega_minus());
    let (d_eta, d_omega) = (lift(&d.d_eta), lift(&d.d_omega));
    let dphi = &(&d_eta.wedge(&omega) - &eta.wedge(&d_omega)) + &lift(&d.d_plus);
    let dpsi = &(&omega.wedge(&d_omega) - &d_eta.wedge(&minus)) + &eta.wedge(&lift(&d.d_minus));
    (dphi, dpsi)
}

/// Closed-form torsion quadruple as dim-7 forms.
pub fn closed_form_torsion<S: Real>(data: &AnsatzData<S>) -> (S, Form<S>, Form<S>, Form<S>) {
    let su3 = &data.su3;
    let l = data.lambda;
    let eta = eta::<S>();
    let jt = su3.j_one_form(&data.theta);
    let sharp = su3.metric().sharp(&data.theta);
    let i_plus = data.su3.omega_plus().contract(&sharp);
    let i_minus = data.su3.omega_minus().contract(&sharp);
    let tau0 = S::ratio(6, 7) * l;
    let tau1 = lift(&data.theta.scale(S::ratio(5, 18)));
    let tau2 = &eta.wedge(&lift(&jt)).scale(S::ratio(2, 9)) + &lift(&i_plus.scale(S::ratio(1, 9)));
    let tau3 = tau3_summands(data, &jt, &i_minus).iter().fold(Form::zeros(7, 3), |acc, s| &acc + s);
    (tau0, tau1, tau2, tau3)
}

/// The six summands of the closed-form `τ₃`.
fn tau3_summands<S: Real>(data: &AnsatzData<S>, jt: &Form<S>, i_minus: &Form<S>) -> Vec<Form<S>> {
    let su3 = &data.su3;
    let l = data.lambda;
    let eta = eta::<S>();
    let omega = lift(su3.omega());
    vec![
        eta.wedge(&omega).scale(S::ratio(8, 7) * l),
        lift(su3.omega_plus()).scale(-S::ratio(6, 7) * l),
        lift(&jt.wedge(su3.omega())).scale(S::ratio(1, 6)),
        eta.wedge(&lift(i_minus)).scale(-S::ratio(1, 6)),
        -lift(&su3.star(&data.nu3)),
        -eta.wedge(&lift(&data.f011)),
    ]
}

/// Closed forms of `(tr T, |T|², Scal)` with `d*θ = 0`.
pub fn closed_form_invariants<S: Real>(data: &AnsatzData<S>) -> (S, S, S) {
    let l2 = data.lambda * data.lambda;
    let (t, n, f) = data.norms();
    let half = S::ratio(1, 2);
    let tr = S::ratio(3, 2) * data.lambda;
    let norm = S::ratio(15, 4) * l2 + S::ratio(35, 18) * t + half * (n + f);
    let scal = -S::ratio(3, 2) * l2 + S::ratio(20, 9) * t - half * (n + f);
    (tr, norm, scal)
}

/// Comparison of the extracted torsion with the closed forms.
#[derive(Clone, Debug)]
pub struct TorsionReport<S> {
    pub extracted: TorsionForms<S>,
    pub dev_tau0: S,
    pub dev_tau1: S,
    pub dev_tau2: S,
    pub dev_tau3: S,
    pub dev_tr_t: S,
    pub dev_norm_t_sq: S,
    pub dev_scal: S,
    pub expected_tr_t: S,
    pub expected_norm_t_sq: S,
    pub expected_scal: S,
    /// `|T|²` contracted directly from the tensor.
    pub norm_t_sq_tensor: S,
    /// Largest pairwise inner product between distinct `τ₃` summands.
    pub tau3_cross_max: S,
}

impl<S: Real> TorsionReport<S> {
    pub fn max_deviation(&self) -> S {
        [self.dev_tau0, self.dev_tau1, self.dev_tau2, self.dev_tau3, self.dev_tr_t, self.dev_norm_t_sq, self.dev_scal]
            .into_iter()
            .fold(S::zero(), S::max)
    }
}

pub fn verify_prop_torsion<S: Real>(data: &AnsatzData<S>) -> Result<TorsionReport<S>, StructureError> {
    let g2 = ansatz_g2(data)?;
    let (dphi, dpsi) = formal_dphi_dpsi(data);
    let ext = extract_torsion(&dphi, &dpsi, &g2, S::zero())?;
    let (tau0, tau1, tau2, tau3) = closed_form_torsion(data);
    let (tr, norm, scal) = closed_form_invariants(data);

    let jt = data.su3.j_one_form(&data.theta);
    let sharp = data.su3.metric().sharp(&data.theta);
    let summands = tau3_summands(data, &jt, &data.su3.omega_minus().contract(&sharp));
    let mut cross = S::zero();
    for i in 0..summands.len() {
        for j in i + 1..summands.len() {
            cross = cross.max(g2.inner(&summands[i], &summands[j]).abs());
        }
    }
    Ok(TorsionReport {
        dev_tau0: (ext.tau0 - tau0).abs(),
        dev_tau1: ext.tau1.max_diff(&tau1),
        dev_tau2: ext.tau2.max_diff(&tau2),
        dev_tau3: ext.tau3.max_diff(&tau3),
        dev_tr_t: (ext.tr_t - tr).abs(),
        dev_norm_t_sq: (ext.norm_t_sq - norm).abs(),
        dev_scal: (ext.scal - scal).abs(),
        expected_tr_t: tr,
        expected_norm_t_sq: norm,
        expected_scal: scal,
        norm_t_sq_tensor: ext.norm_t_sq_tensor(g2.metric()),
        tau3_cross_max: cross,
        extracted: ext,
    })
}

/// `dF₀ + (dλ + (2/3)λθ)∧ω + λν₃`, which vanishes iff `d(F₀ + λω) = 0`.
pub fn check_compatibility<S: Real>(data: &AnsatzData<S>, dlambda: &Form<S>, df011: &Form<S>) -> Result<Form<S>, ExteriorError> {
    shape(dlambda, 1)?;
    shape(df011, 3)?;
    let one = dlambda + &data.theta.scale(S::ratio(2, 3) * data.lambda);
    Ok(&(df011 + &one.wedge(data.su3.omega())) + &data.nu3.scale(data.lambda))
}
