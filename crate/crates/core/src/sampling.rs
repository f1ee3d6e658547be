//! Seeded random sampling of forms, frames and structures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{binomial, standard_phi, standard_su3, Form};
use crate::g2su3::{j_from_omega_plus, SU3Data};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub type LabRng = ChaCha8Rng;

/// Name recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3), uniform f64 samples";

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform<S: Real>(rng: &mut LabRng, lo: f64, hi: f64) -> S {
    S::lit(rng.gen_range(lo..hi))
}

pub fn random_vector<S: Real>(rng: &mut LabRng, n: usize, scale: f64) -> Vec<S> {
    (0..n).map(|_| uniform(rng, -scale, scale)).collect()
}

pub fn random_form<S: Real>(rng: &mut LabRng, dim: usize, degree: usize, scale: f64) -> Form<S> {
    Form::new(dim, degree, random_vector(rng, binomial(dim, degree), scale)).expect("valid shape")
}

/// `I + spread·U(-1,1)` with positive determinant.
pub fn random_gl<S: Real>(rng: &mut LabRng, n: usize, spread: f64) -> Matrix<S> {
    loop {
        let a = Matrix::from_fn(n, n, |i, j| {
            let u: S = uniform(rng, -spread, spread);
            if i == j {
                S::one() + u
            } else {
                u
            }
        });
        if a.determinant() > S::lit(1e-3) {
            return a;
        }
    }
}

/// `AᵀA` for a random `A` from [`random_gl`].
pub fn random_spd<S: Real>(rng: &mut LabRng, n: usize, spread: f64) -> Matrix<S> {
    let a = random_gl(rng, n, spread);
    (&a.transpose() * &a).symmetrize()
}

/// `A*φ_std` for a random orientation-preserving `A`.
pub fn random_positive_phi<S: Real>(rng: &mut LabRng, spread: f64) -> (Form<S>, Matrix<S>) {
    let a = random_gl(rng, 7, spread);
    (standard_phi().pullback(&a), a)
}

/// Pullback of the standard SU(3)-structure by a random `A ∈ GL⁺(6)`.
pub fn random_su3<S: Real>(rng: &mut LabRng, spread: f64) -> SU3Data<S> {
    let a = random_gl(rng, 6, spread);
    let (omega, plus, _) = standard_su3();
    j_from_omega_plus(&omega.pullback(&a), &plus.pullback(&a)).expect("pullback of standard structure")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<f64> = random_vector(&mut rng(7), 5, 1.0);
        let b: Vec<f64> = random_vector(&mut rng(7), 5, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn random_su3_is_normalized() {
        let su3 = random_su3::<f64>(&mut rng(3), 0.3);
        let (t, n) = su3.normalization_residuals();
        assert!(t < 1e-12 && n < 1e-12);
        let j2 = su3.j() * su3.j();
        assert!((&j2 + &Matrix::identity(6)).max_abs() < 1e-12);
    }
}
