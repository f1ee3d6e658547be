use g2lab::exterior::{hodge, standard_phi, Form, Metric};
use g2lab::g2su3::metric_from_phi;
use g2lab::linalg::Matrix;
use g2lab::reduction::{assemble_phi, omega_minus_from_psi, reduce, ReducedPoint};
use g2lab::sampling::{random_form, random_positive_phi, random_su3, random_vector, rng, uniform};

fn e(i: usize) -> Vec<f64> {
    let mut v = vec![0.0; 7];
    v[i] = 1.0;
    v
}

fn random_point(seed: u64) -> ReducedPoint<f64> {
    let mut r = rng(seed);
    let su3 = random_su3(&mut r, 0.3);
    let xi = random_vector::<f64>(&mut r, 7, 1.0);
    let h: f64 = uniform(&mut r, 0.3, 3.0);
    let mut eta = random_vector::<f64>(&mut r, 7, 1.0);
    let k = xi.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap().0;
    let eval: f64 = eta.iter().zip(&xi).map(|(a, b)| a * b).sum();
    eta[k] += (1.0 - eval) / xi[k];
    ReducedPoint::new(h, &xi, Form::one_form(&eta), su3).unwrap()
}

#[test]
fn reconstruct_after_reduce_on_random_phi() {
    let mut r = rng(21);
    let mut cases = vec![(standard_phi::<f64>(), e(0))];
    for i in 0..20 {
        let (phi, _) = random_positive_phi::<f64>(&mut r, 0.4);
        let xi = if i % 2 == 0 { e(6) } else { random_vector(&mut r, 7, 1.0) };
        cases.push((phi, xi));
    }
    for (phi, xi) in cases {
        let g2 = metric_from_phi(&phi).unwrap();
        let rp = reduce(&phi, &xi).unwrap();
        let (phi2, psi2, g7) = rp.reconstruct();
        assert!(phi2.max_diff(&phi) <= 1e-10, "φ round-trip {:e}", phi2.max_diff(&phi));
        assert!(psi2.max_diff(g2.psi()) <= 1e-10);
        assert!((&g7 - g2.metric().matrix()).max_abs() <= 1e-10);
        let metric7 = Metric::new(g7.clone()).unwrap();
        assert!(hodge(&phi2, &metric7, g2.volume()).unwrap().max_diff(&psi2) <= 1e-10);
        let g_xi = g7.mat_vec(&xi);
        let expected = rp.eta().scale(1.0 / rp.h());
        for (a, b) in g_xi.iter().zip(expected.coeffs()) {
            assert!((a - b).abs() <= 1e-10);
        }
        let xx: f64 = g_xi.iter().zip(&xi).map(|(a, b)| a * b).sum();
        assert!((xx - 1.0 / rp.h()).abs() <= 1e-10);
        assert!(omega_minus_from_psi(g2.psi(), &xi, rp.h()).max_diff(rp.omega_minus()) <= 1e-10);
        for form in [rp.omega(), rp.omega_plus(), rp.omega_minus()] {
            assert!(form.contract(&xi).max_abs() <= 1e-10);
        }
    }
}

#[test]
fn reduce_after_reconstruct_recovers_data() {
    for seed in 0..20 {
        let rp = random_point(100 + seed);
        let (phi, _, _) = rp.reconstruct();
        let back = reduce(&phi, rp.frame().xi()).unwrap();
        assert!((back.h() - rp.h()).abs() <= 1e-10);
        assert!(back.eta().max_diff(rp.eta()) <= 1e-10);
        assert!(back.omega().max_diff(rp.omega()) <= 1e-10);
        assert!(back.omega_plus().max_diff(rp.omega_plus()) <= 1e-10);
        assert!(back.omega_minus().max_diff(rp.omega_minus()) <= 1e-10);
        assert!((back.g6().matrix() - rp.g6().matrix()).max_abs() <= 1e-10);
    }
}

#[test]
fn variation_is_the_derivative_of_reconstruction() {
    for seed in 0..10 {
        let rp = random_point(200 + seed);
        let mut r = rng(300 + seed);
        let hdot: f64 = uniform(&mut r, -1.0, 1.0);
        let etadot = random_form::<f64>(&mut r, 7, 1, 1.0);
        let wdot = random_form::<f64>(&mut r, 6, 2, 1.0);
        let pdot = random_form::<f64>(&mut r, 6, 3, 1.0);
        let exact = rp.variation(hdot, &etadot, &wdot, &pdot).unwrap();
        let frame = rp.frame();
        let at = |eps: f64| {
            assemble_phi(
                rp.h() + eps * hdot,
                &(rp.eta() + &etadot.scale(eps)),
                &frame.embed(&(rp.su3().omega() + &wdot.scale(eps))),
                &frame.embed(&(rp.su3().omega_plus() + &pdot.scale(eps))),
            )
        };
        let errors: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&eps| (&at(eps) - &at(-eps)).scale(0.5 / eps).max_diff(&exact))
            .collect();
        let order = (errors[0] / errors[1]).log10();
        assert!(order > 1.9, "order {order}");
        let (phi, _, _) = rp.reconstruct();
        assert!(at(0.0).max_diff(&phi) < 1e-14);
    }
}

#[test]
fn variation_is_linear() {
    let rp = random_point(400);
    let mut r = rng(401);
    let args = |r: &mut _| {
        (uniform::<f64>(r, -1.0, 1.0), random_form::<f64>(r, 7, 1, 1.0), random_form::<f64>(r, 6, 2, 1.0), random_form::<f64>(r, 6, 3, 1.0))
    };
    let (h1, e1, w1, p1) = args(&mut r);
    let (h2, e2, w2, p2) = args(&mut r);
    let a = rp.variation(h1, &e1, &w1, &p1).unwrap();
    let b = rp.variation(h2, &e2, &w2, &p2).unwrap();
    let c = rp.variation(2.0 * h1 - h2, &(&e1.scale(2.0) - &e2), &(&w1.scale(2.0) - &w2), &(&p1.scale(2.0) - &p2)).unwrap();
    assert!(c.max_diff(&(&a.scale(2.0) - &b)) < 1e-13);
    let _ = Matrix::<f64>::identity(7);
}
