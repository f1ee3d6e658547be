//! Pointwise G₂ and SU(3) linear algebra: the metric of a positive 3-form,
//! type decompositions, Hitchin's almost complex structure, and torsion
//! forms.

use thiserror::Error;

use crate::exterior::{hodge, inner, ExteriorError, Form, Metric};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("3-form is not positive: {0}")]
    Positivity(String),
    #[error("3-form is not stable: {0}")]
    Stability(String),
    #[error("incompatible SU(3) data: {0}")]
    Compatibility(String),
    #[error("torsion data not realizable in the type components (residual {0:e})")]
    InconsistentTorsion(f64),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

fn unit<S: Real>(n: usize, i: usize) -> Vec<S> {
    (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()
}

/// Orthogonal projection of `x` onto the span of `spanning` (assumed
/// linearly independent) with respect to the metric `g`.
pub fn project_onto_span<S: Real>(x: &Form<S>, spanning: &[Form<S>], g: &Metric<S>) -> Form<S> {
    let c = span_coefficients(x, spanning, g);
    let mut out = Form::zeros(x.dim(), x.degree());
    for (ci, s) in c.iter().zip(spanning) {
        out += &s.scale(*ci);
    }
    out
}

/// Coefficients of the projection of `x` onto `span(spanning)`.
fn span_coefficients<S: Real>(x: &Form<S>, spanning: &[Form<S>], g: &Metric<S>) -> Vec<S> {
    let gram = g.induced(x.degree());
    let lowered: Vec<Vec<S>> = spanning.iter().map(|s| gram.mat_vec(s.coeffs())).collect();
    let dot = |a: &[S], b: &[S]| -> S { a.iter().zip(b).map(|(&p, &q)| p * q).sum() };
    let m = spanning.len();
    let normal = Matrix::from_fn(m, m, |i, j| dot(&lowered[i], spanning[j].coeffs()));
    let rhs: Vec<S> = lowered.iter().map(|l| dot(l, x.coeffs())).collect();
    normal.solve(&rhs).expect("spanning set is linearly dependent")
}

/// A positive 3-form on `R^7` with its metric, volume form and `ψ = *φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct G2Data<S> {
    phi: Form<S>,
    g: Metric<S>,
    vol: Form<S>,
    psi: Form<S>,
}

impl<S: Real> G2Data<S> {
    pub fn phi(&self) -> &Form<S> {
        &self.phi
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.g
    }

    pub fn volume(&self) -> &Form<S> {
        &self.vol
    }

    pub fn psi(&self) -> &Form<S> {
        &self.psi
    }

    pub fn star(&self, a: &Form<S>) -> Form<S> {
        hodge(a, &self.g, &self.vol).expect("hodge on 7-dimensional form")
    }

    pub fn inner(&self, a: &Form<S>, b: &Form<S>) -> S {
        inner(a, b, &self.g).expect("inner product shape")
    }

    pub fn norm_sq(&self, a: &Form<S>) -> S {
        self.inner(a, a)
    }

    fn coframe_wedge(&self, a: &Form<S>) -> Vec<Form<S>> {
        (0..7).map(|i| Form::one_form(&unit(7, i)).wedge(a)).collect()
    }

    fn frame_contract(&self, a: &Form<S>) -> Vec<Form<S>> {
        (0..7).map(|i| a.contract(&unit(7, i))).collect()
    }

    /// Splits a 2-form into its 7- and 14-dimensional components.
    pub fn project_2form(&self, beta: &Form<S>) -> Result<(Form<S>, Form<S>), StructureError> {
        check_shape(beta, 7, 2)?;
        let b7 = project_onto_span(beta, &self.frame_contract(&self.phi), &self.g);
        let b14 = beta - &b7;
        Ok((b7, b14))
    }

    /// Splits a 3-form into its 1-, 7- and 27-dimensional components.
    pub fn project_3form(&self, gamma: &Form<S>) -> Result<[Form<S>; 3], StructureError> {
        check_shape(gamma, 7, 3)?;
        let g1 = project_onto_span(gamma, std::slice::from_ref(&self.phi), &self.g);
        let g7 = project_onto_span(gamma, &self.frame_contract(&self.psi), &self.g);
        let g27 = &(gamma - &g1) - &g7;
        Ok([g1, g7, g27])
    }

    /// Full `φ_{ijk}` tensor.
    pub fn phi_tensor(&self) -> Vec<S> {
        self.phi.to_tensor()
    }

    /// `i_φ(h)_{ijk} = h_i^l φ_{ljk} + h_j^l φ_{ilk} + h_k^l φ_{ijl}` for a
    /// symmetric 2-tensor `h` with lower indices.
    pub fn i_phi(&self, h: &Matrix<S>) -> Form<S> {
        self.i_phi_with(&self.phi_tensor(), h)
    }

    fn i_phi_with(&self, p: &[S], h: &Matrix<S>) -> Form<S> {
        let mixed = h * self.g.inverse();
        let at = |i: usize, j: usize, k: usize| p[(i * 7 + j) * 7 + k];
        let mut t = vec![S::zero(); 343];
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let mut acc = S::zero();
                    for l in 0..7 {
                        acc = acc
                            + mixed[(i, l)] * at(l, j, k)
                            + mixed[(j, l)] * at(i, l, k)
                            + mixed[(k, l)] * at(i, j, l);
                    }
                    t[(i * 7 + j) * 7 + k] = acc;
                }
            }
        }
        Form::from_tensor(7, 3, &t)
    }

    /// Inverts [`Self::i_phi`] by least squares over symmetric tensors.
    pub fn i_phi_inverse(&self, gamma: &Form<S>) -> Matrix<S> {
        let pairs: Vec<(usize, usize)> = (0..7).flat_map(|i| (i..7).map(move |j| (i, j))).collect();
        let p = self.phi_tensor();
        let images: Vec<Form<S>> = pairs
            .iter()
            .map(|&(i, j)| {
                let mut e = Matrix::zeros(7, 7);
                e[(i, j)] = S::one();
                e[(j, i)] = S::one();
                self.i_phi_with(&p, &e)
            })
            .collect();
        let n = pairs.len();
        let dot = |a: &Form<S>, b: &Form<S>| -> S { a.coeffs().iter().zip(b.coeffs()).map(|(&x, &y)| x * y).sum() };
        let normal = Matrix::from_fn(n, n, |p, q| dot(&images[p], &images[q]));
        let rhs: Vec<S> = images.iter().map(|im| dot(im, gamma)).collect();
        let c = normal.solve(&rhs).expect("i_phi is injective on symmetric tensors");
        let mut h = Matrix::zeros(7, 7);
        for (&(i, j), &v) in pairs.iter().zip(&c) {
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
        h
    }
}

fn check_shape<S: Real>(a: &Form<S>, dim: usize, degree: usize) -> Result<(), StructureError> {
    if a.dim() != dim {
        return Err(ExteriorError::DimensionMismatch { left: a.dim(), right: dim }.into());
    }
    if a.degree() != degree {
        return Err(ExteriorError::DegreeMismatch { left: a.degree(), right: degree }.into());
    }
    Ok(())
}

/// Induced metric, volume and `ψ` of a 3-form on `R^7`.
///
/// `B_ij` is the coefficient of `(1/6)(e_i⌟φ)∧(e_j⌟φ)∧φ` against
/// `e^{1…7}` and `g = det(B)^{-1/9} B`. A 3-form whose `B` is not positive
/// definite (including `-φ_std`) is rejected.
pub fn metric_from_phi<S: Real>(phi: &Form<S>) -> Result<G2Data<S>, StructureError> {
    check_shape(phi, 7, 3)?;
    let contractions: Vec<Form<S>> = (0..7).map(|i| phi.contract(&unit(7, i))).collect();
    let sixth = S::ratio(1, 6);
    let mut b = Matrix::zeros(7, 7);
    for i in 0..7 {
        let ip = contractions[i].wedge(phi);
        for j in i..7 {
            let v = contractions[j].wedge(&ip).coeffs()[0] * sixth;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    if b.cholesky().is_none() {
        return Err(StructureError::Positivity("bilinear form B_φ is not positive definite".into()));
    }
    let det = b.determinant();
    let g = Metric::new(b.scale(det.powf(-S::ratio(1, 9)))).map_err(|e| StructureError::Positivity(e.to_string()))?;
    let vol = Form::top(7, g.det().sqrt());
    let psi = hodge(phi, &g, &vol)?;
    Ok(G2Data { phi: phi.clone(), g, vol, psi })
}

/// The SU(3)-structure `(ω, Ω₊, Ω₋, J, g)` on `R^6`.
#[derive(Clone, Debug, PartialEq)]
pub struct SU3Data<S> {
    omega: Form<S>,
    omega_plus: Form<S>,
    omega_minus: Form<S>,
    j: Matrix<S>,
    g: Metric<S>,
    vol: Form<S>,
}

/// Components of a 2-form on `R^6`: `α = trace·ω + α₆ + α₈`.
#[derive(Clone, Debug, PartialEq)]
pub struct Su3TwoForm<S> {
    pub trace: S,
    pub alpha6: Form<S>,
    pub alpha8: Form<S>,
}

impl<S: Real> SU3Data<S> {
    pub fn omega(&self) -> &Form<S> {
        &self.omega
    }

    pub fn omega_plus(&self) -> &Form<S> {
        &self.omega_plus
    }

    pub fn omega_minus(&self) -> &Form<S> {
        &self.omega_minus
    }

    /// Almost complex structure as a matrix acting on vectors.
    pub fn j(&self) -> &Matrix<S> {
        &self.j
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.g
    }

    /// Riemannian volume form of `g`, oriented by `ω³`.
    pub fn volume(&self) -> &Form<S> {
        &self.vol
    }

    pub fn star(&self, a: &Form<S>) -> Form<S> {
        hodge(a, &self.g, &self.vol).expect("hodge on 6-dimensional form")
    }

    pub fn inner(&self, a: &Form<S>, b: &Form<S>) -> S {
        inner(a, b, &self.g).expect("inner product shape")
    }

    pub fn norm_sq(&self, a: &Form<S>) -> S {
        self.inner(a, a)
    }

    /// `Jθ = (Jθ♯)♭ = -θ∘J` on 1-forms.
    pub fn j_one_form(&self, theta: &Form<S>) -> Form<S> {
        assert_eq!(theta.degree(), 1, "J acts on 1-forms here");
        let jt = self.j.transpose().mat_vec(theta.coeffs());
        Form::one_form(&jt.iter().map(|&x| -x).collect::<Vec<_>>())
    }

    /// Residuals of `ω∧Ω₊ = 0` and `ω³/6 = Ω₊∧Ω₋/4`.
    pub fn normalization_residuals(&self) -> (S, S) {
        let type_res = self.omega.wedge(&self.omega_plus).max_abs();
        let lhs = self.omega.power(3).scale(S::ratio(1, 6));
        let rhs = self.omega_plus.wedge(&self.omega_minus).scale(S::ratio(1, 4));
        (type_res, lhs.max_diff(&rhs))
    }

    fn contractions(&self, a: &Form<S>) -> Vec<Form<S>> {
        (0..6).map(|i| a.contract(&unit(6, i))).collect()
    }

    pub fn project_2form(&self, alpha: &Form<S>) -> Result<Su3TwoForm<S>, StructureError> {
        check_shape(alpha, 6, 2)?;
        let trace = self.inner(alpha, &self.omega) / self.norm_sq(&self.omega);
        let alpha6 = project_onto_span(alpha, &self.contractions(&self.omega_plus), &self.g);
        let alpha8 = &(alpha - &self.omega.scale(trace)) - &alpha6;
        Ok(Su3TwoForm { trace, alpha6, alpha8 })
    }

    /// Component of a 3-form in the 12-dimensional primitive summand.
    pub fn project_3form_12(&self, gamma: &Form<S>) -> Result<Form<S>, StructureError> {
        check_shape(gamma, 6, 3)?;
        let mut spanning = vec![self.omega_plus.clone(), self.omega_minus.clone()];
        spanning.extend((0..6).map(|i| Form::one_form(&unit(6, i)).wedge(&self.omega)));
        Ok(gamma - &project_onto_span(gamma, &spanning, &self.g))
    }
}

/// Hitchin's endomorphism `K` of a 3-form on `R^6`, defined by
/// `ι_{K v} vol = (ι_v Ω₊)∧Ω₊` with `vol = e^{1…6}`.
pub fn hitchin_k<S: Real>(omega_plus: &Form<S>) -> Matrix<S> {
    let full: u8 = 0b11_1111;
    let mut k = Matrix::zeros(6, 6);
    for v in 0..6 {
        let five = omega_plus.contract(&unit(6, v)).wedge(omega_plus);
        for (w, &mask) in five.masks().iter().enumerate() {
            let missing = (full & !mask).trailing_zeros() as usize;
            let sign = if missing % 2 == 0 { S::one() } else { -S::one() };
            k[(missing, v)] = sign * five.coeffs()[w];
        }
    }
    k
}

/// Builds the SU(3)-structure determined by `ω` and `Ω₊`.
///
/// `J = -K/√(-tr K²/6)` with the orientation of `ω³`, so that the standard
/// pair gives `J e₁ = e₂`. `Ω₋` is `Ω₊` with `J` applied to every slot and
/// `g(u, v) = ω(u, Jv)`. The normalization `ω³/6 = Ω₊∧Ω₋/4` is not
/// enforced; see [`SU3Data::normalization_residuals`].
pub fn j_from_omega_plus<S: Real>(omega: &Form<S>, omega_plus: &Form<S>) -> Result<SU3Data<S>, StructureError> {
    check_shape(omega, 6, 2)?;
    check_shape(omega_plus, 6, 3)?;
    let cube = omega.power(3).coeffs()[0];
    if cube == S::zero() {
        return Err(StructureError::Compatibility("ω is degenerate".into()));
    }
    let orient = cube.signum();
    let k = hitchin_k(omega_plus).scale(orient);
    let k2 = &k * &k;
    let c = -k2.trace() / S::lit(6.0);
    let scale = k2.max_abs().max(S::min_positive_value());
    let tol = S::lit(1e-8).max(S::epsilon() * S::lit(1e3));
    if !(c > tol * scale) {
        return Err(StructureError::Stability(format!("tr K²/6 = {} is not negative", (-c).to_f64_lossy())));
    }
    let dev = (&k2 + &Matrix::identity(6).scale(c)).max_abs();
    if dev > tol * scale {
        return Err(StructureError::Stability(format!("K² deviates from a multiple of Id by {:e}", dev.to_f64_lossy())));
    }
    let j = k.scale(-S::one() / c.sqrt());
    let wmat = Matrix::from_fn(6, 6, |a, b| omega.evaluate(&[unit(6, a), unit(6, b)]));
    let gmat = &wmat * &j;
    let gscale = gmat.max_abs().max(S::one());
    if gmat.asymmetry() > tol * gscale {
        return Err(StructureError::Compatibility("ω(·, J·) is not symmetric".into()));
    }
    let g = Metric::new(gmat.symmetrize()).map_err(|_| StructureError::Compatibility("ω(·, J·) is not positive".into()))?;
    let type_res = omega.wedge(omega_plus).max_abs();
    if type_res > tol * omega_plus.max_abs().max(S::one()) {
        return Err(StructureError::Compatibility(format!("ω∧Ω₊ = {:e}", type_res.to_f64_lossy())));
    }
    let omega_minus = omega_plus.pullback(&j);
    let vol = g.volume_form(&Form::top(6, orient))?;
    Ok(SU3Data { omega: omega.clone(), omega_plus: omega_plus.clone(), omega_minus, j, g, vol })
}

/// Torsion forms of a G₂-structure with the derived torsion tensor data.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionForms<S> {
    pub tau0: S,
    pub tau1: Form<S>,
    pub tau2: Form<S>,
    pub tau3: Form<S>,
    /// Full torsion tensor with lower indices.
    pub t: Matrix<S>,
    pub tr_t: S,
    /// `(7/16)τ₀² + 24|τ₁|² + ½|τ₂|² + ½|τ₃|²`.
    pub norm_t_sq: S,
    /// `12 d*τ₁ + (21/8)τ₀² + 30|τ₁|² − ½|τ₂|² − ½|τ₃|²`.
    pub scal: S,
    pub dstar_tau1: S,
}

impl<S: Real> TorsionForms<S> {
    /// `|T|²` contracted directly from the tensor `T` with the metric.
    pub fn norm_t_sq_tensor(&self, g: &Metric<S>) -> S {
        let gi = g.inverse();
        let raised = &(gi * &self.t) * gi;
        raised.frobenius_dot(&self.t)
    }
}

/// Relation between the closed-form norm and the torsion forms.
pub fn torsion_norm_relation<S: Real>(tau0: S, tau1_sq: S, tau2_sq: S, tau3_sq: S) -> S {
    S::ratio(7, 16) * tau0 * tau0 + S::lit(24.0) * tau1_sq + S::ratio(1, 2) * (tau2_sq + tau3_sq)
}

/// Scalar curvature of a G₂-structure in terms of its torsion forms.
pub fn scalar_from_torsion<S: Real>(dstar_tau1: S, tau0: S, tau1_sq: S, tau2_sq: S, tau3_sq: S) -> S {
    S::lit(12.0) * dstar_tau1 + S::ratio(21, 8) * tau0 * tau0 + S::lit(30.0) * tau1_sq
        - S::ratio(1, 2) * (tau2_sq + tau3_sq)
}

/// Assembles `dφ = τ₀ψ + 3τ₁∧φ + *τ₃` and `dψ = 4τ₁∧ψ + τ₂∧φ`.
pub fn assemble_torsion<S: Real>(
    g2: &G2Data<S>,
    tau0: S,
    tau1: &Form<S>,
    tau2: &Form<S>,
    tau3: &Form<S>,
) -> (Form<S>, Form<S>) {
    let dphi = &(&g2.psi.scale(tau0) + &tau1.wedge(&g2.phi).scale(S::lit(3.0))) + &g2.star(tau3);
    let dpsi = &tau1.wedge(&g2.psi).scale(S::lit(4.0)) + &tau2.wedge(&g2.phi);
    (dphi, dpsi)
}

/// Recovers `(τ₀, τ₁, τ₂, τ₃)` from `(dφ, dψ)` by type projection.
pub fn extract_torsion<S: Real>(
    dphi: &Form<S>,
    dpsi: &Form<S>,
    g2: &G2Data<S>,
    dstar_tau1: S,
) -> Result<TorsionForms<S>, StructureError> {
    check_shape(dphi, 7, 4)?;
    check_shape(dpsi, 7, 5)?;
    let tau0 = g2.inner(dphi, &g2.psi) / g2.norm_sq(&g2.psi);
    let c = span_coefficients(dphi, &g2.coframe_wedge(&g2.phi), &g2.g);
    let tau1 = Form::one_form(&c.iter().map(|&x| x / S::lit(3.0)).collect::<Vec<_>>());
    let rest = &(dphi - &g2.psi.scale(tau0)) - &tau1.wedge(&g2.phi).scale(S::lit(3.0));
    let [_, _, tau3] = g2.project_3form(&g2.star(&rest))?;
    let rest5 = dpsi - &tau1.wedge(&g2.psi).scale(S::lit(4.0));
    let (_, tau2) = g2.project_2form(&-g2.star(&rest5))?;

    let (rphi, rpsi) = assemble_torsion(g2, tau0, &tau1, &tau2, &tau3);
    let residual = rphi.max_diff(dphi).max(rpsi.max_diff(dpsi));
    let scale = dphi.max_abs().max(dpsi.max_abs()).max(S::one());
    let tol = S::lit(1e-9).max(S::epsilon() * S::lit(1e4));
    if residual > tol * scale {
        return Err(StructureError::InconsistentTorsion(residual.to_f64_lossy()));
    }

    let gm = g2.g.matrix();
    let tau27 = g2.i_phi_inverse(&tau3);
    let raised = g2.g.sharp(&tau1);
    let tp = tau1_phi(g2, &raised);
    let t2 = tau2.to_tensor();
    let quarter = tau0 / S::lit(4.0);
    let half = S::ratio(1, 2);
    let t = Matrix::from_fn(7, 7, |l, m| quarter * gm[(l, m)] - tau27[(l, m)] - tp[(l, m)] - half * t2[l * 7 + m]);
    let tr_t = g2.g.inverse().frobenius_dot(&t);
    let (n1, n2, n3) = (g2.norm_sq(&tau1), g2.norm_sq(&tau2), g2.norm_sq(&tau3));
    Ok(TorsionForms {
        tau0,
        norm_t_sq: torsion_norm_relation(tau0, n1, n2, n3),
        scal: scalar_from_torsion(dstar_tau1, tau0, n1, n2, n3),
        tau1,
        tau2,
        tau3,
        t,
        tr_t,
        dstar_tau1,
    })
}

/// `(v⌟φ)_{lm} = v^k φ_{klm}`.
fn tau1_phi<S: Real>(g2: &G2Data<S>, v: &[S]) -> Matrix<S> {
    let t = g2.phi.contract(v).to_tensor();
    Matrix::from_fn(7, 7, |l, m| t[l * 7 + m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{standard_phi, standard_psi, standard_su3};

    #[test]
    fn standard_phi_gives_euclidean_metric() {
        let g2 = metric_from_phi(&standard_phi::<f64>()).unwrap();
        assert!((g2.metric().matrix() - &Matrix::identity(7)).max_abs() < 1e-14);
        assert!((g2.volume().coeffs()[0] - 1.0).abs() < 1e-14);
        assert!(g2.psi().max_diff(&standard_psi()) < 1e-14);
    }

    #[test]
    fn negative_phi_is_rejected() {
        let err = metric_from_phi(&-standard_phi::<f64>()).unwrap_err();
        assert!(matches!(err, StructureError::Positivity(_)));
        assert!(metric_from_phi(&Form::<f64>::zeros(7, 3)).is_err());
    }

    #[test]
    fn contraction_is_seven_type() {
        let g2 = metric_from_phi(&standard_phi::<f64>()).unwrap();
        let v = [0.3, -1.0, 0.2, 0.5, 0.0, 1.5, -0.7];
        let (b7, b14) = g2.project_2form(&g2.phi().contract(&v)).unwrap();
        assert!(b14.max_abs() < 1e-14);
        assert!(b7.max_diff(&g2.phi().contract(&v)) < 1e-14);
        let (z7, z14) = g2.project_2form(&Form::zeros(7, 2)).unwrap();
        assert!(z7.is_zero(0.0) && z14.is_zero(0.0));
    }

    #[test]
    fn standard_j_rotates_pairs() {
        let (omega, plus, minus) = standard_su3::<f64>();
        let su3 = j_from_omega_plus(&omega, &plus).unwrap();
        let mut expected = Matrix::zeros(6, 6);
        for p in 0..3 {
            expected[(2 * p + 1, 2 * p)] = 1.0;
            expected[(2 * p, 2 * p + 1)] = -1.0;
        }
        assert!((su3.j() - &expected).max_abs() < 1e-14);
        assert!(su3.omega_minus().max_diff(&minus) < 1e-14);
        assert!((su3.metric().matrix() - &Matrix::identity(6)).max_abs() < 1e-14);
        let scaled = j_from_omega_plus(&omega, &plus.scale(2.5)).unwrap();
        assert!((scaled.j() - su3.j()).max_abs() < 1e-14);
    }

    #[test]
    fn degenerate_three_form_is_unstable() {
        let (omega, _, _) = standard_su3::<f64>();
        let bad = Form::from_terms(6, 3, &[(1.0, &[1, 2, 3])]);
        assert!(matches!(j_from_omega_plus(&omega, &bad), Err(StructureError::Stability(_))));
    }

    #[test]
    fn omega_is_pure_trace() {
        let (omega, plus, _) = standard_su3::<f64>();
        let su3 = j_from_omega_plus(&omega, &plus).unwrap();
        let split = su3.project_2form(&omega).unwrap();
        assert!((split.trace - 1.0).abs() < 1e-15);
        assert!(split.alpha6.is_zero(1e-15) && split.alpha8.is_zero(1e-15));
        assert!(su3.project_3form_12(&plus).unwrap().is_zero(1e-15));
    }

    #[test]
    fn torsion_free_extracts_zero() {
        let g2 = metric_from_phi(&standard_phi::<f64>()).unwrap();
        let t = extract_torsion(&Form::zeros(7, 4), &Form::zeros(7, 5), &g2, 0.0).unwrap();
        assert_eq!(t.tau0, 0.0);
        assert!(t.tau1.is_zero(0.0) && t.tau2.is_zero(0.0) && t.tau3.is_zero(0.0));
        assert_eq!(t.t.max_abs(), 0.0);
        assert_eq!(t.scal, 0.0);
    }

    #[test]
    fn inconsistent_data_is_reported() {
        let g2 = metric_from_phi(&standard_phi::<f64>()).unwrap();
        // a 5-form with a 7-part that disagrees with the 4-form
        let dpsi = Form::one_form(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).wedge(g2.psi());
        let err = extract_torsion(&Form::zeros(7, 4), &dpsi, &g2, 0.0).unwrap_err();
        assert!(matches!(err, StructureError::InconsistentTorsion(_)));
    }
}
