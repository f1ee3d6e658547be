//! The G₂-Hilbert functional in general, W345-reduced and GH-reduced form,
//! with the first variation of the W345 reduction.

use thiserror::Error;

use crate::exterior::{inner, ExteriorError, Form, Metric};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error("volume must be positive, got {0}")]
    NonPositiveVolume(f64),
    #[error("fiber factor h must be positive, got {0}")]
    NonPositiveH(f64),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// Norm convention for 2-forms in the GH functional and flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormConvention {
    /// Orthonormal covectors have norm 1: `|e¹²|² = 1`.
    Module,
    /// Full index contraction `F_{ik}F^{ik}`: `|e¹²|² = 2`.
    FullContraction,
}

impl NormConvention {
    pub fn two_form_norm_sq<S: Real>(self, f: &Form<S>, g: &Metric<S>) -> S {
        let n = inner(f, f, g).expect("2-form norm");
        match self {
            NormConvention::Module => n,
            NormConvention::FullContraction => n + n,
        }
    }
}

/// `((1/6)Scal − (1/3)|T|² − (1/6)(tr T)²)·vol` for constant data.
pub fn f_general<S: Real>(scal: S, norm_t_sq: S, tr_t: S, vol: S) -> Result<S, FunctionalError> {
    if !(vol > S::zero()) {
        return Err(FunctionalError::NonPositiveVolume(vol.to_f64_lossy()));
    }
    let sixth = S::ratio(1, 6);
    Ok((sixth * scal - S::ratio(1, 3) * norm_t_sq - sixth * tr_t * tr_t) * vol)
}

/// `(ν∘ν)_{ij} = ½ ν_{iab} ν_j^{ab}`.
pub fn circ3<S: Real>(nu: &Form<S>, g: &Metric<S>) -> Matrix<S> {
    let n = nu.dim();
    let t = nu.to_tensor();
    let gi = g.inverse();
    let n2 = n * n;
    // raise the last two indices
    let mut up = vec![S::zero(); n * n2];
    for j in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut acc = S::zero();
                for c in 0..n {
                    for d in 0..n {
                        acc = acc + gi[(a, c)] * gi[(b, d)] * t[j * n2 + c * n + d];
                    }
                }
                up[j * n2 + a * n + b] = acc;
            }
        }
    }
    let half = S::ratio(1, 2);
    let mut out = Matrix::from_fn(n, n, |i, j| {
        half * (0..n2).map(|ab| t[i * n2 + ab] * up[j * n2 + ab]).sum::<S>()
    });
    out = out.symmetrize();
    out
}

/// `j(F)_{ij} = (F∘F)_{ij} = F_{ia} F_j^a`.
pub fn circ2<S: Real>(f: &Form<S>, g: &Metric<S>) -> Matrix<S> {
    let n = f.dim();
    let t = f.to_tensor();
    let fm = Matrix::from_fn(n, n, |i, j| t[i * n + j]);
    let up = &fm * g.inverse();
    Matrix::from_fn(n, n, |i, j| (0..n).map(|a| fm[(i, a)] * up[(j, a)]).sum::<S>()).symmetrize()
}

/// `⟨a, b⟩_g = a_{ij} b^{ij}` for 2-tensors.
pub fn tensor_pairing<S: Real>(a: &Matrix<S>, b: &Matrix<S>, g: &Metric<S>) -> S {
    let gi = g.inverse();
    (&(gi * a) * gi).frobenius_dot(b)
}

/// Constant data of the W345 reduction on a torus of coordinate volume
/// `coord_volume`; the Riemannian volume is `coord_volume·√det g`.
#[derive(Clone, Debug, PartialEq)]
pub struct W345State<S> {
    pub g6: Metric<S>,
    pub lambda: S,
    pub theta: Form<S>,
    pub nu3: Form<S>,
    pub f011: Form<S>,
    pub coord_volume: S,
}

/// Tangent vector `V = (k, β, f, μ, ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationVector<S> {
    pub k: Matrix<S>,
    pub beta: Form<S>,
    pub f: S,
    pub mu: Form<S>,
    pub rho: Form<S>,
}

impl<S: Real> VariationVector<S> {
    pub fn zero() -> Self {
        Self { k: Matrix::zeros(6, 6), beta: Form::zeros(6, 1), f: S::zero(), mu: Form::zeros(6, 3), rho: Form::zeros(6, 2) }
    }

    pub fn scale(&self, s: S) -> Self {
        Self { k: self.k.scale(s), beta: self.beta.scale(s), f: self.f * s, mu: self.mu.scale(s), rho: self.rho.scale(s) }
    }
}

impl<S: Real> W345State<S> {
    pub fn new(
        g6: Metric<S>,
        lambda: S,
        theta: Form<S>,
        nu3: Form<S>,
        f011: Form<S>,
        coord_volume: S,
    ) -> Result<Self, FunctionalError> {
        if !(coord_volume > S::zero()) {
            return Err(FunctionalError::NonPositiveVolume(coord_volume.to_f64_lossy()));
        }
        for (form, degree) in [(&theta, 1), (&nu3, 3), (&f011, 2)] {
            if form.dim() != 6 || form.degree() != degree {
                return Err(ExteriorError::DegreeMismatch { left: form.degree(), right: degree }.into());
            }
        }
        Ok(Self { g6, lambda, theta, nu3, f011, coord_volume })
    }

    pub fn volume(&self) -> S {
        self.coord_volume * self.g6.det().sqrt()
    }

    /// `(|θ|², |ν₃|², |F₀|²)` in `g6`.
    pub fn norms(&self) -> (S, S, S) {
        let n = |a: &Form<S>| inner(a, a, &self.g6).expect("norm");
        (n(&self.theta), n(&self.nu3), n(&self.f011))
    }

    /// `15/8 λ² + 5/18|θ|² + 1/4|ν₃|² + 1/4|F₀|²`.
    pub fn density(&self) -> S {
        let (t, n, f) = self.norms();
        S::ratio(15, 8) * self.lambda * self.lambda + S::ratio(5, 18) * t + S::ratio(1, 4) * (n + f)
    }

    /// `s + εV`; fails if the perturbed metric is not SPD.
    pub fn perturbed(&self, eps: S, v: &VariationVector<S>) -> Result<Self, FunctionalError> {
        let g = Metric::new(self.g6.matrix() + &v.k.scale(eps))?;
        Ok(Self {
            g6: g,
            lambda: self.lambda + eps * v.f,
            theta: &self.theta + &v.beta.scale(eps),
            nu3: &self.nu3 + &v.mu.scale(eps),
            f011: &self.f011 + &v.rho.scale(eps),
            coord_volume: self.coord_volume,
        })
    }

    /// `(15/16λ² + 5/36|θ|² + 1/8|ν₃|² + 1/8|F₀|²)g − 5/18θ⊗θ − 1/4ν₃∘ν₃ − 1/4F₀∘F₀`.
    pub fn metric_tensor_q(&self) -> Matrix<S> {
        let half_density = self.density() * S::ratio(1, 2);
        let th = self.theta.coeffs();
        let n = 6;
        let tt = Matrix::from_fn(n, n, |i, j| th[i] * th[j]);
        let quarter = S::ratio(1, 4);
        let mut q = self.g6.matrix().scale(half_density);
        q = &q - &tt.scale(S::ratio(5, 18));
        q = &q - &circ3(&self.nu3, &self.g6).scale(quarter);
        q = &q - &circ2(&self.f011, &self.g6).scale(quarter);
        q
    }
}

/// `−2π·vol·(15/8 λ² + 5/18|θ|² + 1/4|ν₃|² + 1/4|F₀|²)`.
pub fn f_w345<S: Real>(s: &W345State<S>) -> S {
    -S::lit(2.0) * S::PI() * s.volume() * s.density()
}

/// Directional derivative of [`f_w345`] along `V`.
pub fn first_variation_w345<S: Real>(s: &W345State<S>, v: &VariationVector<S>) -> Result<S, FunctionalError> {
    check_direction(v)?;
    let g = &s.g6;
    let ip = |a: &Form<S>, b: &Form<S>| inner(a, b, g);
    let bracket = S::ratio(15, 4) * s.lambda * v.f
        + S::ratio(5, 9) * ip(&s.theta, &v.beta)?
        + S::ratio(1, 2) * ip(&s.nu3, &v.mu)?
        + S::ratio(1, 2) * ip(&s.f011, &v.rho)?
        + tensor_pairing(&s.metric_tensor_q(), &v.k, g);
    Ok(-S::lit(2.0) * S::PI() * s.volume() * bracket)
}

fn check_direction<S: Real>(v: &VariationVector<S>) -> Result<(), FunctionalError> {
    for (form, degree) in [(&v.beta, 1), (&v.mu, 3), (&v.rho, 2)] {
        if form.dim() != 6 || form.degree() != degree {
            return Err(ExteriorError::DegreeMismatch { left: form.degree(), right: degree }.into());
        }
    }
    if v.k.rows() != 6 || v.k.cols() != 6 {
        return Err(ExteriorError::DimensionMismatch { left: v.k.rows(), right: 6 }.into());
    }
    Ok(())
}

/// L²-gradient `(−2πQ, −2π·5/9θ, −2π·15/4λ, −2π·½ν₃, −2π·½F₀)`.
pub fn w345_gradient<S: Real>(s: &W345State<S>) -> VariationVector<S> {
    let c = -S::lit(2.0) * S::PI();
    VariationVector {
        k: s.metric_tensor_q().scale(c),
        beta: s.theta.scale(c * S::ratio(5, 9)),
        f: c * S::ratio(15, 4) * s.lambda,
        mu: s.nu3.scale(c * S::ratio(1, 2)),
        rho: s.f011.scale(c * S::ratio(1, 2)),
    }
}

/// `∫ ⟨k₁,k₂⟩ + ⟨β₁,β₂⟩ + f₁f₂ + ⟨μ₁,μ₂⟩ + ⟨ρ₁,ρ₂⟩ dV` for constant data.
pub fn l2_pairing<S: Real>(s: &W345State<S>, a: &VariationVector<S>, b: &VariationVector<S>) -> Result<S, FunctionalError> {
    let g = &s.g6;
    let sum = tensor_pairing(&a.k, &b.k, g)
        + inner(&a.beta, &b.beta, g)?
        + a.f * b.f
        + inner(&a.mu, &b.mu, g)?
        + inner(&a.rho, &b.rho, g)?;
    Ok(sum * s.volume())
}

/// `2π·vol·(½h^{1/2}Scal − (1/8)h⁻¹|F|²)` for constant data.
pub fn f_gh<S: Real>(
    g: &Metric<S>,
    h: S,
    f: &Form<S>,
    scal_g: S,
    vol: S,
    convention: NormConvention,
) -> Result<S, FunctionalError> {
    if !(h > S::zero()) {
        return Err(FunctionalError::NonPositiveH(h.to_f64_lossy()));
    }
    if !(vol > S::zero()) {
        return Err(FunctionalError::NonPositiveVolume(vol.to_f64_lossy()));
    }
    let fsq = convention.two_form_norm_sq(f, g);
    Ok(S::lit(2.0) * S::PI() * vol * (S::ratio(1, 2) * h.sqrt() * scal_g - S::ratio(1, 8) * fsq / h))
}
