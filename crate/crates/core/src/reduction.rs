//! Pointwise circle reduction of a G₂-structure on `R^7` along a vector
//! `ξ` and its inverse.
//!
//! Basic forms are dim-7 forms annihilated by `ι_ξ`. They are identified
//! with dim-6 forms through the frame `(ξ, e_σ(1), …, e_σ(6))`, where `σ`
//! omits the coordinate on which `ξ` is largest.

use thiserror::Error;

use crate::exterior::{ExteriorError, Form, Metric};
use crate::g2su3::{j_from_omega_plus, metric_from_phi, SU3Data, StructureError};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("generating vector is zero")]
    ZeroVector,
    #[error("fiber length factor h must be positive, got {0}")]
    NonPositiveH(f64),
    #[error("connection form must satisfy η(ξ) = 1, got {0}")]
    BadConnection(f64),
    #[error("vector has length {0}, expected 7")]
    VectorLength(usize),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// Frame adapted to `ξ` and the matching coordinates on basic forms.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame<S> {
    xi: Vec<S>,
    /// Positively oriented columns `ξ, b_1, …, b_6`.
    frame: Matrix<S>,
    /// `7 x 6` inclusion of the complement, columns `b_1..b_6`.
    lift: Matrix<S>,
    /// `6 x 7` projection `R^7 → R^7/ξ` in the coordinates of `b_k`.
    proj: Matrix<S>,
}

impl<S: Real> AdaptedFrame<S> {
    pub fn new(xi: &[S]) -> Result<Self, ReductionError> {
        if xi.len() != 7 {
            return Err(ReductionError::VectorLength(xi.len()));
        }
        if xi.iter().all(|&x| x == S::zero()) {
            return Err(ReductionError::ZeroVector);
        }
        let mut pivot = 0;
        for i in 1..7 {
            if xi[i].abs() > xi[pivot].abs() {
                pivot = i;
            }
        }
        let others: Vec<usize> = (0..7).filter(|&i| i != pivot).collect();
        let mut frame = Matrix::from_fn(7, 7, |r, c| {
            if c == 0 {
                xi[r]
            } else if r == others[c - 1] {
                S::one()
            } else {
                S::zero()
            }
        });
        if frame.determinant() < S::zero() {
            frame = Matrix::from_fn(7, 7, |r, c| if c == 1 { -frame[(r, c)] } else { frame[(r, c)] });
        }
        let inv = frame.inverse().ok_or(ReductionError::ZeroVector)?;
        let lift = Matrix::from_fn(7, 6, |r, c| frame[(r, c + 1)]);
        let proj = Matrix::from_fn(6, 7, |r, c| inv[(r + 1, c)]);
        Ok(Self { xi: xi.to_vec(), frame, lift, proj })
    }

    pub fn xi(&self) -> &[S] {
        &self.xi
    }

    pub fn frame(&self) -> &Matrix<S> {
        &self.frame
    }

    pub fn projection(&self) -> &Matrix<S> {
        &self.proj
    }

    /// Basic dim-7 form of a dim-6 form.
    pub fn embed(&self, a: &Form<S>) -> Form<S> {
        a.pullback(&self.proj)
    }

    /// Dim-6 coordinates of a basic dim-7 form.
    pub fn restrict(&self, a: &Form<S>) -> Form<S> {
        a.pullback(&self.lift)
    }

    /// Pullback `π*g` of a metric on the quotient, as a `7 x 7` matrix.
    pub fn pullback_metric(&self, g6: &Matrix<S>) -> Matrix<S> {
        &(&self.proj.transpose() * g6) * &self.proj
    }
}

/// Quotient data `(h, η, ω, Ω±, g_N)` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPoint<S> {
    h: S,
    eta: Form<S>,
    omega: Form<S>,
    omega_plus: Form<S>,
    omega_minus: Form<S>,
    su3: SU3Data<S>,
    frame: AdaptedFrame<S>,
}

impl<S: Real> ReducedPoint<S> {
    /// Assembles a point from a fiber factor `h > 0`, a connection form `η`
    /// with `η(ξ) = 1` and an SU(3)-structure on the quotient.
    pub fn new(h: S, xi: &[S], eta: Form<S>, su3: SU3Data<S>) -> Result<Self, ReductionError> {
        if !(h > S::zero()) {
            return Err(ReductionError::NonPositiveH(h.to_f64_lossy()));
        }
        if eta.dim() != 7 || eta.degree() != 1 {
            return Err(ExteriorError::DegreeMismatch { left: eta.degree(), right: 1 }.into());
        }
        let frame = AdaptedFrame::new(xi)?;
        let eval: S = eta.coeffs().iter().zip(xi).map(|(&a, &b)| a * b).sum();
        if (eval - S::one()).abs() > S::lit(1e-10).max(S::epsilon() * S::lit(100.0)) {
            return Err(ReductionError::BadConnection(eval.to_f64_lossy()));
        }
        Ok(Self {
            h,
            omega: frame.embed(su3.omega()),
            omega_plus: frame.embed(su3.omega_plus()),
            omega_minus: frame.embed(su3.omega_minus()),
            eta,
            su3,
            frame,
        })
    }

    pub fn h(&self) -> S {
        self.h
    }

    pub fn eta(&self) -> &Form<S> {
        &self.eta
    }

    pub fn omega(&self) -> &Form<S> {
        &self.omega
    }

    pub fn omega_plus(&self) -> &Form<S> {
        &self.omega_plus
    }

    pub fn omega_minus(&self) -> &Form<S> {
        &self.omega_minus
    }

    pub fn su3(&self) -> &SU3Data<S> {
        &self.su3
    }

    pub fn g6(&self) -> &Metric<S> {
        self.su3.metric()
    }

    pub fn frame(&self) -> &AdaptedFrame<S> {
        &self.frame
    }

    /// `(φ, ψ, g_φ)` with `φ = η∧ω + h^{3/4}Ω₊`, `ψ = ½hω² − h^{1/4}η∧Ω₋`
    /// and `g_φ = h⁻¹η² + h^{1/2}π*g`.
    pub fn reconstruct(&self) -> (Form<S>, Form<S>, Matrix<S>) {
        let phi = assemble_phi(self.h, &self.eta, &self.omega, &self.omega_plus);
        let q = S::ratio(1, 4);
        let psi = &self.omega.power(2).scale(self.h / S::lit(2.0))
            - &self.eta.wedge(&self.omega_minus).scale(self.h.powf(q));
        let e = self.eta.coeffs();
        let base = self.frame.pullback_metric(self.g6().matrix());
        let sq = self.h.sqrt();
        let g7 = Matrix::from_fn(7, 7, |i, j| e[i] * e[j] / self.h + sq * base[(i, j)]);
        (phi, psi, g7)
    }

    /// Linearization of `φ` along `(ḣ, η̇, ω̇, Ω̇₊)`; `ω̇` and `Ω̇₊` are
    /// dim-6 forms.
    pub fn variation(
        &self,
        hdot: S,
        etadot: &Form<S>,
        omegadot: &Form<S>,
        omegaplusdot: &Form<S>,
    ) -> Result<Form<S>, ReductionError> {
        check(etadot, 7, 1)?;
        check(omegadot, 6, 2)?;
        check(omegaplusdot, 6, 3)?;
        let wd = self.frame.embed(omegadot);
        let pd = self.frame.embed(omegaplusdot);
        let h = self.h;
        let out = &(&etadot.wedge(&self.omega) + &self.eta.wedge(&wd))
            + &(&self.omega_plus.scale(S::ratio(3, 4) * h.powf(-S::ratio(1, 4)) * hdot)
                + &pd.scale(h.powf(S::ratio(3, 4))));
        Ok(out)
    }
}

fn check<S: Real>(a: &Form<S>, dim: usize, degree: usize) -> Result<(), ReductionError> {
    if a.dim() != dim {
        return Err(ExteriorError::DimensionMismatch { left: a.dim(), right: dim }.into());
    }
    if a.degree() != degree {
        return Err(ExteriorError::DegreeMismatch { left: a.degree(), right: degree }.into());
    }
    Ok(())
}

/// `η∧ω + h^{3/4}Ω₊` for dim-7 inputs.
pub fn assemble_phi<S: Real>(h: S, eta: &Form<S>, omega: &Form<S>, omega_plus: &Form<S>) -> Form<S> {
    &eta.wedge(omega) + &omega_plus.scale(h.powf(S::ratio(3, 4)))
}

/// Reduces `φ` along `ξ`: `h = |ξ|⁻²`, `η = h g(ξ,·)`, `ω = ι_ξφ`,
/// `Ω₊ = h^{-3/4}(φ − η∧ι_ξφ)`, `Ω₋ = −h^{-1/4}ι_ξψ`.
pub fn reduce<S: Real>(phi: &Form<S>, xi: &[S]) -> Result<ReducedPoint<S>, ReductionError> {
    let frame = AdaptedFrame::new(xi)?;
    let g2 = metric_from_phi(phi)?;
    let g = g2.metric();
    let h = S::one() / g.apply(xi, xi);
    let eta = g.flat(xi).scale(h);
    let omega7 = phi.contract(xi);
    let plus7 = (phi - &eta.wedge(&omega7)).scale(h.powf(-S::ratio(3, 4)));
    let omega6 = frame.restrict(&omega7);
    let plus6 = frame.restrict(&plus7);
    let su3 = j_from_omega_plus(&omega6, &plus6)?;
    ReducedPoint::new(h, xi, eta, su3)
}

/// Dim-7 `Ω₋` computed directly from `ψ`, for cross-checks.
pub fn omega_minus_from_psi<S: Real>(psi: &Form<S>, xi: &[S], h: S) -> Form<S> {
    -psi.contract(xi).scale(h.powf(-S::ratio(1, 4)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{standard_phi, standard_su3};

    fn e1() -> Vec<f64> {
        let mut v = vec![0.0; 7];
        v[0] = 1.0;
        v
    }

    #[test]
    fn standard_reduction() {
        let rp = reduce(&standard_phi::<f64>(), &e1()).unwrap();
        assert!((rp.h() - 1.0).abs() < 1e-15);
        assert!(rp.eta().max_diff(&Form::from_terms(7, 1, &[(1.0, &[1])])) < 1e-15);
        let omega = Form::from_terms(7, 2, &[(1.0, &[2, 3]), (1.0, &[4, 5]), (1.0, &[6, 7])]);
        let plus = Form::from_terms(7, 3, &[(1.0, &[2, 4, 6]), (-1.0, &[2, 5, 7]), (-1.0, &[3, 4, 7]), (-1.0, &[3, 5, 6])]);
        let minus = Form::from_terms(7, 3, &[(-1.0, &[3, 5, 7]), (1.0, &[3, 4, 6]), (1.0, &[2, 5, 6]), (1.0, &[2, 4, 7])]);
        assert!(rp.omega().max_diff(&omega) < 1e-15);
        assert!(rp.omega_plus().max_diff(&plus) < 1e-15);
        assert!(rp.omega_minus().max_diff(&minus) < 1e-14);
        let (phi, _, g7) = rp.reconstruct();
        assert!(phi.max_diff(&standard_phi()) < 1e-15);
        assert!((&g7 - &Matrix::identity(7)).max_abs() < 1e-14);
    }

    #[test]
    fn scaling_the_vector() {
        let c = 3.0;
        let xi: Vec<f64> = e1().iter().map(|x| x * c).collect();
        let rp = reduce(&standard_phi::<f64>(), &xi).unwrap();
        assert!((rp.h() - 1.0 / (c * c)).abs() < 1e-15);
        assert!(rp.eta().max_diff(&Form::from_terms(7, 1, &[(1.0 / c, &[1])])) < 1e-15);
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert_eq!(reduce(&standard_phi::<f64>(), &[0.0; 7]).unwrap_err(), ReductionError::ZeroVector);
    }

    #[test]
    fn large_h_scales_metric() {
        let (omega, plus, _) = standard_su3::<f64>();
        let su3 = j_from_omega_plus(&omega, &plus).unwrap();
        let rp = ReducedPoint::new(16.0, &e1(), Form::from_terms(7, 1, &[(1.0, &[1])]), su3).unwrap();
        let (_, _, g7) = rp.reconstruct();
        assert!((g7[(0, 0)] - 1.0 / 16.0).abs() < 1e-15);
        for i in 1..7 {
            assert!((g7[(i, i)] - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn variation_in_h_direction() {
        let rp = reduce(&standard_phi::<f64>(), &e1()).unwrap();
        let zero1 = Form::zeros(7, 1);
        let v = rp.variation(1.0, &zero1, &Form::zeros(6, 2), &Form::zeros(6, 3)).unwrap();
        assert!(v.max_diff(&rp.omega_plus().scale(0.75)) < 1e-15);
        let z = rp.variation(0.0, &zero1, &Form::zeros(6, 2), &Form::zeros(6, 3)).unwrap();
        assert!(z.is_zero(0.0));
        assert!(rp.variation(0.0, &Form::zeros(7, 2), &Form::zeros(6, 2), &Form::zeros(6, 3)).is_err());
    }
}
