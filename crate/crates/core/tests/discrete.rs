use g2lab::discrete_geo::{
    codifferential, curvature, d1, exterior_d, inverse_metrics, metrics_of, Field, GridSpec, StencilOrder,
};
use g2lab::linalg::Matrix;

fn conformal_error(n: usize, order: StencilOrder) -> f64 {
    let s = GridSpec::new(vec![0, 1], n, order).unwrap();
    let f = |x: &[f64; 6]| 0.1 * x[0].sin() + 0.05 * (x[0] + 2.0 * x[1]).cos();
    let g = Field::from_fn(&s, 36, |x: &[f64; 6]| Matrix::<f64>::identity(6).scale((2.0 * f(x)).exp()).as_slice().to_vec());
    let scal = curvature(&s, &g).unwrap().scal;
    let exact = Field::from_fn(&s, 1, |x: &[f64; 6]| {
        let fx = 0.1 * x[0].cos() - 0.05 * (x[0] + 2.0 * x[1]).sin();
        let fy = -0.1 * (x[0] + 2.0 * x[1]).sin();
        let lap = -0.1 * x[0].sin() - 0.05 * 5.0 * (x[0] + 2.0 * x[1]).cos();
        vec![(-2.0 * f(x)).exp() * (-10.0 * lap - 20.0 * (fx * fx + fy * fy))]
    });
    scal.max_diff(&exact)
}

#[test]
fn conformal_scalar_curvature() {
    let s = GridSpec::new(vec![0], 64, StencilOrder::Sixth).unwrap();
    let g = Field::from_fn(&s, 36, |x: &[f64; 6]| {
        Matrix::<f64>::identity(6).scale((0.2 * x[0].sin()).exp()).as_slice().to_vec()
    });
    let scal = curvature(&s, &g).unwrap().scal;
    let exact = Field::from_fn(&s, 1, |x: &[f64; 6]| {
        let f = 0.1 * x[0].sin();
        let df = 0.1 * x[0].cos();
        vec![(-2.0 * f).exp() * (-10.0 * -f - 20.0 * df * df)]
    });
    assert!(scal.max_diff(&exact) < 1e-4);
    assert!(conformal_error(64, StencilOrder::Sixth) < 1e-4);
}

#[test]
fn convergence_orders() {
    for (order, expected) in [(StencilOrder::Fourth, 3.7), (StencilOrder::Sixth, 3.7)] {
        let e: Vec<f64> = [16, 32, 64].iter().map(|&n| conformal_error(n, order)).collect();
        let slope = (e[0] / e[2]).log2() / 2.0;
        assert!(slope >= expected, "{order:?}: errors {e:?}, slope {slope}");
    }
}

#[test]
fn warped_product_curvature() {
    // g = dx₁² + φ(x₁)² dx₂² + flat, Scal = −2φ''/φ
    let s = GridSpec::new(vec![0], 64, StencilOrder::Sixth).unwrap();
    let g = Field::from_fn(&s, 36, |x: &[f64; 6]| {
        let mut m = Matrix::<f64>::identity(6);
        m[(1, 1)] = (1.0 + 0.1 * x[0].sin()).powi(2);
        m.as_slice().to_vec()
    });
    let scal = curvature(&s, &g).unwrap().scal;
    let exact = Field::from_fn(&s, 1, |x: &[f64; 6]| vec![0.2 * x[0].sin() / (1.0 + 0.1 * x[0].sin())]);
    assert!(scal.max_diff(&exact) < 1e-4);
}

fn smooth_one_form(s: &GridSpec) -> Field<f64> {
    Field::from_fn(s, 6, |x: &[f64; 6]| {
        (0..6).map(|i| ((i + 1) as f64 * x[0]).sin() * 0.3 + (x[2] + i as f64).cos() * 0.2).collect()
    })
}

#[test]
fn d_squared_vanishes_and_means_are_zero() {
    let s = GridSpec::new(vec![0, 2], 32, StencilOrder::Sixth).unwrap();
    let a = smooth_one_form(&s);
    let da = exterior_d(&s, &a, 1).unwrap();
    let dda = exterior_d(&s, &da, 2).unwrap();
    assert!(dda.max_abs() < 1e-12, "{}", dda.max_abs());
    for c in 0..15 {
        assert!(da.mean(c).abs() < 1e-12);
    }
    assert!(d1(&s, &a, 0).mean(3).abs() < 1e-12);
}

#[test]
fn discrete_adjointness_flat() {
    let s = GridSpec::new(vec![0, 2], 32, StencilOrder::Sixth).unwrap();
    let a = smooth_one_form(&s);
    let b = Field::from_fn(&s, 15, |x: &[f64; 6]| (0..15).map(|i| (x[0] + 0.1 * i as f64).cos() * (x[2]).sin()).collect());
    let g = Field::from_fn(&s, 36, |_| Matrix::<f64>::identity(6).as_slice().to_vec());
    let metrics = metrics_of(&g).unwrap();
    let da = exterior_d(&s, &a, 1).unwrap();
    let dsb = codifferential(&s, &b, 2, &metrics).unwrap();
    let lhs: f64 = da.data().iter().zip(b.data()).map(|(x, y)| x * y).sum();
    let rhs: f64 = a.data().iter().zip(dsb.data()).map(|(x, y)| x * y).sum();
    assert!((lhs - rhs).abs() / (s.npoints() as f64) < 1e-6, "{lhs} vs {rhs}");
    assert!(inverse_metrics(&g).is_ok());
}
