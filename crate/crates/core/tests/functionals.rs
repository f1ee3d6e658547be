use std::f64::consts::PI;

use g2lab::exterior::{Form, Metric};
use g2lab::functionals::*;
use g2lab::linalg::Matrix;
use g2lab::sampling::{random_form, random_spd, rng, uniform, LabRng};
use g2lab::torsion_verify::random_ansatz;

fn random_state(r: &mut LabRng, scale: f64) -> W345State<f64> {
    let data = random_ansatz::<f64>(r, 0.3);
    let vol: f64 = uniform(r, 0.5, 2.0);
    W345State::new(
        data.su3().metric().clone(),
        scale * data.lambda(),
        data.theta().scale(scale),
        data.nu3().scale(scale),
        data.f011().scale(scale),
        vol,
    )
    .unwrap()
}

fn random_direction(r: &mut LabRng) -> VariationVector<f64> {
    let k = random_form::<f64>(r, 6, 1, 1.0);
    let m: Matrix<f64> = Matrix::from_fn(6, 6, |i, j| 0.2 * (k.coeffs()[i] * k.coeffs()[j]) + if i == j { 0.1 } else { 0.0 });
    let extra = random_spd::<f64>(r, 6, 0.3);
    VariationVector {
        k: (&m + &(&extra - &Matrix::identity(6))).symmetrize(),
        beta: random_form(r, 6, 1, 1.0),
        f: uniform(r, -1.0, 1.0),
        mu: random_form(r, 6, 3, 1.0),
        rho: random_form(r, 6, 2, 1.0),
    }
}

fn central(s: &W345State<f64>, v: &VariationVector<f64>, eps: f64) -> f64 {
    (f_w345(&s.perturbed(eps, v).unwrap()) - f_w345(&s.perturbed(-eps, v).unwrap())) / (2.0 * eps)
}

#[test]
fn first_variation_matches_central_differences() {
    let mut r = rng(31);
    for _ in 0..25 {
        let s = random_state(&mut r, 1.0);
        let v = random_direction(&mut r);
        let exact = first_variation_w345(&s, &v).unwrap();
        let errors: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&eps| (central(&s, &v, eps) - exact).abs()).collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log10();
            assert!(order >= 1.9, "order {order} errors {errors:?}");
        }
    }
}

#[test]
fn metric_only_variation() {
    let mut r = rng(32);
    for _ in 0..10 {
        let s = random_state(&mut r, 1.0);
        let mut v = VariationVector::zero();
        v.k = random_direction(&mut r).k;
        let exact = first_variation_w345(&s, &v).unwrap();
        let expected = -2.0 * PI * s.volume() * tensor_pairing(&s.metric_tensor_q(), &v.k, &s.g6);
        assert!((exact - expected).abs() < 1e-12 * (1.0 + exact.abs()));
        let coarse = (central(&s, &v, 1e-3) - exact).abs();
        let fine = (central(&s, &v, 1e-4) - exact).abs();
        assert!((coarse / fine).log10() >= 1.9, "errors {coarse:e} {fine:e}");
    }
}

#[test]
fn gradient_is_consistent_with_the_pairing() {
    let mut r = rng(33);
    for _ in 0..25 {
        let s = random_state(&mut r, 1.0);
        let v = random_direction(&mut r);
        let grad = w345_gradient(&s);
        let paired = l2_pairing(&s, &grad, &v).unwrap();
        let direct = first_variation_w345(&s, &v).unwrap();
        assert!((paired - direct).abs() <= 1e-10, "{paired} vs {direct}");
    }
}

#[test]
fn reference_values() {
    assert_eq!(f_general(0.0, 0.0, 0.0, 1.0).unwrap(), 0.0);
    let at_lambda: f64 = f_general(-1.5, 15.0 / 4.0, 1.5, 1.0).unwrap();
    assert!((at_lambda + 15.0 / 8.0).abs() < 1e-15);
    let zero = || (Form::zeros(6, 1), Form::zeros(6, 3), Form::zeros(6, 2));
    let (t, n, f) = zero();
    let s = W345State::new(Metric::euclidean(6), 1.0, t, n, f, 1.0).unwrap();
    assert!((f_w345(&s) + 15.0 * PI / 4.0).abs() < 1e-14);
    assert!((2.0 * PI * at_lambda - f_w345(&s)).abs() < 1e-14);
    let mut v = VariationVector::zero();
    v.f = 0.7;
    assert!((first_variation_w345(&s, &v).unwrap() + 2.0 * PI * 15.0 / 4.0 * 0.7).abs() < 1e-14);
    let (_, n, f) = zero();
    let theta = Form::from_terms(6, 1, &[(0.6, &[1]), (0.8, &[4])]);
    let s = W345State::new(Metric::euclidean(6), 0.0, theta, n, f, 1.0).unwrap();
    assert!((f_w345(&s) + 5.0 * PI / 9.0).abs() < 1e-14);
    assert_eq!(first_variation_w345(&s, &VariationVector::zero()).unwrap(), 0.0);
}

#[test]
fn gh_reference_values() {
    let a = 1.3;
    let f = Form::from_terms(6, 2, &[(a, &[1, 2])]);
    let g = Metric::euclidean(6);
    let module = f_gh(&g, 1.0, &f, 0.0, 1.0, NormConvention::Module).unwrap();
    assert!((module + PI / 4.0 * a * a).abs() < 1e-14);
    let full = f_gh(&g, 1.0, &f, 0.0, 1.0, NormConvention::FullContraction).unwrap();
    assert!((full - 2.0 * module).abs() < 1e-14);
    assert_eq!(f_gh(&g, 1.0, &Form::zeros(6, 2), 0.0, 1.0, NormConvention::Module).unwrap(), 0.0);
    assert!(f_gh(&g, -1.0, &f, 0.0, 1.0, NormConvention::Module).is_err());
}

#[test]
fn sign_facts() {
    let mut r = rng(34);
    let origin = W345State::new(Metric::euclidean(6), 0.0, Form::zeros(6, 1), Form::zeros(6, 3), Form::zeros(6, 2), 1.0).unwrap();
    assert_eq!(f_w345(&origin), 0.0);
    for i in 0..1000 {
        let scale = 10f64.powf(uniform(&mut r, -3.0, 0.5));
        let s = random_state(&mut r, scale);
        let value = f_w345(&s);
        assert!(value < -1e-12, "sample {i}: {value}");
        let g = Metric::new(random_spd(&mut r, 6, 0.3)).unwrap();
        let f = random_form::<f64>(&mut r, 6, 2, scale);
        let h: f64 = uniform(&mut r, 0.1, 3.0);
        for conv in [NormConvention::Module, NormConvention::FullContraction] {
            assert!(f_gh(&g, h, &f, 0.0, 1.0, conv).unwrap() < 0.0);
        }
    }
}
