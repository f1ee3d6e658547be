//! Finite-difference geometry on the flat periodic torus `(R/2πZ)^6` for
//! fields that vary along at most two coordinate axes.
//!
//! Fields are stored point-major with a fixed number of components per
//! point. Metric fields use 36 components (row-major matrix); `k`-form
//! fields use `binomial(6, k)` components in the exterior-module basis.

use thiserror::Error;

use crate::exterior::{basis_masks, binomial, hodge, mask_index, wedge_sign, Form, Metric};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("resolution {0} too low (need at least 8 points per axis)")]
    ResolutionTooLow(usize),
    #[error("resolution {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("active axes must be distinct, in 0..6 and at most two: {0:?}")]
    BadAxes(Vec<usize>),
    #[error("metric is not positive definite at grid point {0}")]
    NotSpd(usize),
    #[error("field has {got} components, expected {expected}")]
    Shape { expected: usize, got: usize },
}

/// Accuracy of the central stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilOrder {
    Fourth,
    Sixth,
}

impl StencilOrder {
    /// One-sided weights `w_k`, `k = 1..`, of the first derivative
    /// `Σ w_k (f_{+k} − f_{−k}) / h`.
    fn first(self) -> &'static [f64] {
        match self {
            StencilOrder::Fourth => &[2.0 / 3.0, -1.0 / 12.0],
            StencilOrder::Sixth => &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
        }
    }

    /// `(w_0, w_k)` of the second derivative `(w_0 f_0 + Σ w_k (f_{+k} + f_{−k})) / h²`.
    fn second(self) -> (f64, &'static [f64]) {
        match self {
            StencilOrder::Fourth => (-5.0 / 2.0, &[4.0 / 3.0, -1.0 / 12.0]),
            StencilOrder::Sixth => (-49.0 / 18.0, &[3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0]),
        }
    }
}

/// Periodic grid with `n` points on each active axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    active: Vec<usize>,
    n: usize,
    order: StencilOrder,
}

impl GridSpec {
    pub fn new(active: Vec<usize>, n: usize, order: StencilOrder) -> Result<Self, GeoError> {
        if active.len() > 2 || active.iter().any(|&a| a >= 6) || (active.len() == 2 && active[0] == active[1]) {
            return Err(GeoError::BadAxes(active));
        }
        if n < 8 {
            return Err(GeoError::ResolutionTooLow(n));
        }
        if !n.is_power_of_two() {
            return Err(GeoError::NotPowerOfTwo(n));
        }
        Ok(Self { active, n, order })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> StencilOrder {
        self.order
    }

    pub fn npoints(&self) -> usize {
        self.n.pow(self.active.len() as u32)
    }

    pub fn spacing<S: Real>(&self) -> S {
        S::lit(2.0) * S::PI() / S::from_usize_exact(self.n)
    }

    /// Coordinate volume of a cell, `(2π)^6 / npoints`.
    pub fn cell_volume<S: Real>(&self) -> S {
        (S::lit(2.0) * S::PI()).powi(6) / S::from_usize_exact(self.npoints())
    }

    fn digits(&self, p: usize) -> [usize; 2] {
        [p % self.n, p / self.n]
    }

    /// Coordinates of point `p`; inactive coordinates are 0.
    pub fn coordinates<S: Real>(&self, p: usize) -> [S; 6] {
        let mut x = [S::zero(); 6];
        let d = self.digits(p);
        for (slot, &axis) in self.active.iter().enumerate() {
            x[axis] = self.spacing::<S>() * S::from_usize_exact(d[slot]);
        }
        x
    }

    fn slot(&self, axis: usize) -> Option<usize> {
        self.active.iter().position(|&a| a == axis)
    }

    fn shift(&self, p: usize, slot: usize, offset: isize) -> usize {
        let mut d = self.digits(p);
        let n = self.n as isize;
        d[slot] = ((d[slot] as isize + offset).rem_euclid(n)) as usize;
        d[0] + self.n * d[1]
    }
}

/// Point-major field with `comps` values per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<S> {
    comps: usize,
    data: Vec<S>,
}

impl<S: Real> Field<S> {
    pub fn zeros(spec: &GridSpec, comps: usize) -> Self {
        Self { comps, data: vec![S::zero(); comps * spec.npoints()] }
    }

    pub fn from_fn(spec: &GridSpec, comps: usize, mut f: impl FnMut(&[S; 6]) -> Vec<S>) -> Self {
        let mut data = Vec::with_capacity(comps * spec.npoints());
        for p in 0..spec.npoints() {
            let v = f(&spec.coordinates(p));
            assert_eq!(v.len(), comps, "field closure returned wrong component count");
            data.extend(v);
        }
        Self { comps, data }
    }

    pub fn from_data(comps: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len() % comps, 0);
        Self { comps, data }
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    pub fn npoints(&self) -> usize {
        self.data.len() / self.comps
    }

    pub fn at(&self, p: usize) -> &[S] {
        &self.data[p * self.comps..(p + 1) * self.comps]
    }

    pub fn at_mut(&mut self, p: usize) -> &mut [S] {
        let c = self.comps;
        &mut self.data[p * c..(p + 1) * c]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn mean(&self, c: usize) -> S {
        let n = self.npoints();
        (0..n).map(|p| self.data[p * self.comps + c]).sum::<S>() / S::from_usize_exact(n)
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn max_diff(&self, other: &Self) -> S {
        self.data.iter().zip(&other.data).fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Pointwise matrix at `p` of a 36-component field.
    pub fn matrix_at(&self, p: usize) -> Matrix<S> {
        Matrix::from_row_major(6, 6, self.at(p).to_vec())
    }

    /// Pointwise form at `p` of a form field.
    pub fn form_at(&self, p: usize, degree: usize) -> Form<S> {
        Form::new(6, degree, self.at(p).to_vec()).expect("form field shape")
    }
}

fn expect_comps<S>(f: &Field<S>, expected: usize) -> Result<(), GeoError> {
    if f.comps != expected {
        return Err(GeoError::Shape { expected, got: f.comps });
    }
    Ok(())
}

/// `∂_axis` of every component.
pub fn d1<S: Real>(spec: &GridSpec, f: &Field<S>, axis: usize) -> Field<S> {
    let mut out = Field { comps: f.comps, data: vec![S::zero(); f.data.len()] };
    let Some(slot) = spec.slot(axis) else { return out };
    let inv_h = S::one() / spec.spacing::<S>();
    let w: Vec<S> = spec.order.first().iter().map(|&x| S::lit(x)).collect();
    let c = f.comps;
    for p in 0..spec.npoints() {
        for (k, &wk) in w.iter().enumerate() {
            let plus = spec.shift(p, slot, k as isize + 1);
            let minus = spec.shift(p, slot, -(k as isize) - 1);
            for i in 0..c {
                out.data[p * c + i] = out.data[p * c + i] + wk * (f.data[plus * c + i] - f.data[minus * c + i]);
            }
        }
        for i in 0..c {
            out.data[p * c + i] = out.data[p * c + i] * inv_h;
        }
    }
    out
}

/// `∂_a ∂_b` of every component; the diagonal uses the dedicated
/// second-derivative stencil.
pub fn d2<S: Real>(spec: &GridSpec, f: &Field<S>, a: usize, b: usize) -> Field<S> {
    if a != b {
        return d1(spec, &d1(spec, f, a), b);
    }
    let mut out = Field { comps: f.comps, data: vec![S::zero(); f.data.len()] };
    let Some(slot) = spec.slot(a) else { return out };
    let h = spec.spacing::<S>();
    let inv_h2 = S::one() / (h * h);
    let (w0, w) = spec.order.second();
    let (w0, w): (S, Vec<S>) = (S::lit(w0), w.iter().map(|&x| S::lit(x)).collect());
    let c = f.comps;
    for p in 0..spec.npoints() {
        for i in 0..c {
            out.data[p * c + i] = w0 * f.data[p * c + i];
        }
        for (k, &wk) in w.iter().enumerate() {
            let plus = spec.shift(p, slot, k as isize + 1);
            let minus = spec.shift(p, slot, -(k as isize) - 1);
            for i in 0..c {
                out.data[p * c + i] = out.data[p * c + i] + wk * (f.data[plus * c + i] + f.data[minus * c + i]);
            }
        }
        for i in 0..c {
            out.data[p * c + i] = out.data[p * c + i] * inv_h2;
        }
    }
    out
}

/// All first (`order = 1`, components `c*6 + a`) or second (`order = 2`,
/// components `c*36 + a*6 + b`) partial derivatives.
pub fn partials<S: Real>(spec: &GridSpec, f: &Field<S>, order: usize) -> Field<S> {
    assert!(order == 1 || order == 2, "partials of order 1 or 2");
    let per = if order == 1 { 6 } else { 36 };
    let c = f.comps;
    let mut out = Field { comps: c * per, data: vec![S::zero(); f.npoints() * c * per] };
    let active = spec.active.clone();
    let mut place = |slot: usize, d: &Field<S>| {
        for p in 0..f.npoints() {
            for i in 0..c {
                out.data[p * c * per + i * per + slot] = d.data[p * c + i];
            }
        }
    };
    if order == 1 {
        for &a in &active {
            place(a, &d1(spec, f, a));
        }
    } else {
        for &a in &active {
            for &b in &active {
                place(a * 6 + b, &d2(spec, f, a, b));
            }
        }
    }
    out
}

/// Christoffel symbols `Γ^a_{bc}` (components `a*36 + b*6 + c`), Ricci
/// tensor and scalar curvature of a metric field.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature<S> {
    pub gamma: Field<S>,
    pub ric: Field<S>,
    pub scal: Field<S>,
}

/// Pointwise inverse metrics; fails on SPD loss.
pub fn inverse_metrics<S: Real>(g: &Field<S>) -> Result<Vec<Matrix<S>>, GeoError> {
    expect_comps(g, 36)?;
    (0..g.npoints())
        .map(|p| {
            let m = g.matrix_at(p);
            if m.cholesky().is_none() {
                return Err(GeoError::NotSpd(p));
            }
            m.inverse().ok_or(GeoError::NotSpd(p))
        })
        .collect()
}

pub fn christoffel<S: Real>(spec: &GridSpec, g: &Field<S>, ginv: &[Matrix<S>]) -> Field<S> {
    let dg = partials(spec, g, 1);
    let half = S::ratio(1, 2);
    let mut gamma = Field::zeros(spec, 216);
    for p in 0..spec.npoints() {
        let d = dg.at(p);
        let gi = &ginv[p];
        // ∂_k g_ij at d[(i*6 + j)*6 + k]
        let dd = |i: usize, j: usize, k: usize| d[(i * 6 + j) * 6 + k];
        let out = gamma.at_mut(p);
        for b in 0..6 {
            for c in b..6 {
                let lower: [S; 6] = std::array::from_fn(|e| half * (dd(e, c, b) + dd(e, b, c) - dd(b, c, e)));
                for a in 0..6 {
                    let v = (0..6).map(|e| gi[(a, e)] * lower[e]).sum::<S>();
                    out[a * 36 + b * 6 + c] = v;
                    out[a * 36 + c * 6 + b] = v;
                }
            }
        }
    }
    gamma
}

pub fn curvature<S: Real>(spec: &GridSpec, g: &Field<S>) -> Result<Curvature<S>, GeoError> {
    let ginv = inverse_metrics(g)?;
    let gamma = christoffel(spec, g, &ginv);
    let dgamma = partials(spec, &gamma, 1);
    let mut ric = Field::zeros(spec, 36);
    let mut scal = Field::zeros(spec, 1);
    for p in 0..spec.npoints() {
        let gm = gamma.at(p);
        let dgm = dgamma.at(p);
        let gam = |a: usize, b: usize, c: usize| gm[a * 36 + b * 6 + c];
        // ∂_e Γ^a_bc at ((a*36 + b*6 + c)*6 + e)
        let dgam = |a: usize, b: usize, c: usize, e: usize| dgm[(a * 36 + b * 6 + c) * 6 + e];
        let trace: [S; 6] = std::array::from_fn(|d| (0..6).map(|a| gam(a, a, d)).sum::<S>());
        let r = ric.at_mut(p);
        for b in 0..6 {
            for c in b..6 {
                let mut v = S::zero();
                for a in 0..6 {
                    v = v + dgam(a, b, c, a) - dgam(a, a, b, c);
                    v = v + trace[a] * gam(a, b, c);
                    for d in 0..6 {
                        v = v - gam(a, c, d) * gam(d, a, b);
                    }
                }
                r[b * 6 + c] = v;
                r[c * 6 + b] = v;
            }
        }
        let s = ginv[p].frobenius_dot(&Matrix::from_row_major(6, 6, r.to_vec()));
        scal.at_mut(p)[0] = s;
    }
    Ok(Curvature { gamma, ric, scal })
}

/// `Hess u = ∂²u − Γ·∂u` and `Δu = tr_g Hess u`.
pub fn hessian_laplacian<S: Real>(
    spec: &GridSpec,
    u: &Field<S>,
    ginv: &[Matrix<S>],
    gamma: &Field<S>,
) -> Result<(Field<S>, Field<S>), GeoError> {
    expect_comps(u, 1)?;
    let du = partials(spec, u, 1);
    let ddu = partials(spec, u, 2);
    let mut hess = Field::zeros(spec, 36);
    let mut lap = Field::zeros(spec, 1);
    for p in 0..spec.npoints() {
        let g1 = du.at(p);
        let g2 = ddu.at(p);
        let gm = gamma.at(p);
        let h = hess.at_mut(p);
        for i in 0..6 {
            for j in 0..6 {
                h[i * 6 + j] = g2[i * 6 + j] - (0..6).map(|k| gm[k * 36 + i * 6 + j] * g1[k]).sum::<S>();
            }
        }
        let hm = Matrix::from_row_major(6, 6, h.to_vec());
        lap.at_mut(p)[0] = ginv[p].frobenius_dot(&hm);
    }
    Ok((hess, lap))
}

/// `dα = Σ_a e^a ∧ ∂_a α` for a `degree`-form field.
pub fn exterior_d<S: Real>(spec: &GridSpec, alpha: &Field<S>, degree: usize) -> Result<Field<S>, GeoError> {
    expect_comps(alpha, binomial(6, degree))?;
    let out_comps = binomial(6, degree + 1);
    let mut out = Field::zeros(spec, out_comps);
    let masks = basis_masks(6, degree);
    for &a in spec.active() {
        let da = d1(spec, alpha, a);
        let bit = 1u8 << a;
        for (i, &m) in masks.iter().enumerate() {
            let s = wedge_sign(bit, m);
            if s == 0 {
                continue;
            }
            let k = mask_index(6, m | bit);
            let sign = S::lit(s as f64);
            for p in 0..spec.npoints() {
                out.data[p * out_comps + k] = out.data[p * out_comps + k] + sign * da.data[p * masks.len() + i];
            }
        }
    }
    Ok(out)
}

/// Pointwise Hodge star of a `degree`-form field with the metric field.
pub fn star_field<S: Real>(alpha: &Field<S>, degree: usize, metrics: &[Metric<S>]) -> Field<S> {
    let top = Form::top(6, S::one());
    let comps = binomial(6, 6 - degree);
    let mut data = Vec::with_capacity(comps * metrics.len());
    for (p, g) in metrics.iter().enumerate() {
        data.extend_from_slice(hodge(&alpha.form_at(p, degree), g, &top).expect("pointwise hodge").coeffs());
    }
    Field { comps, data }
}

/// `d* = −*d*` on a `degree`-form field in dimension 6.
pub fn codifferential<S: Real>(
    spec: &GridSpec,
    beta: &Field<S>,
    degree: usize,
    metrics: &[Metric<S>],
) -> Result<Field<S>, GeoError> {
    assert!(degree >= 1, "codifferential of a function");
    expect_comps(beta, binomial(6, degree))?;
    let s1 = star_field(beta, degree, metrics);
    let d = exterior_d(spec, &s1, 6 - degree)?;
    let mut out = star_field(&d, 7 - degree, metrics);
    for v in out.data.iter_mut() {
        *v = -*v;
    }
    Ok(out)
}

/// Pointwise metrics of a 36-component field.
pub fn metrics_of<S: Real>(g: &Field<S>) -> Result<Vec<Metric<S>>, GeoError> {
    expect_comps(g, 36)?;
    (0..g.npoints()).map(|p| Metric::new(g.matrix_at(p)).map_err(|_| GeoError::NotSpd(p))).collect()
}

/// Grid-sum quadrature of a scalar density against the coordinate measure.
pub fn integrate<S: Real>(spec: &GridSpec, density: &[S]) -> S {
    density.iter().copied().sum::<S>() * spec.cell_volume::<S>()
}
