//! Coordinate exterior algebra on oriented inner-product spaces of
//! dimension 6 and 7.
//!
//! Forms are stored densely on the strictly increasing multi-index basis in
//! lexicographic order; a multi-index is kept internally as a bitmask. The
//! inner product makes `e^I` orthonormal for the Euclidean metric: for a
//! general metric the Gram matrix on degree-`k` forms is the matrix of
//! `k x k` minors of the inverse metric.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::Real;

/// Largest ambient dimension the basis tables cover.
const MAX_DIM: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExteriorError {
    #[error("unsupported ambient dimension {0} (expected 6 or 7)")]
    UnsupportedDimension(usize),
    #[error("degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { dim: usize, degree: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("coefficient vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("cannot contract a vector into a 0-form")]
    ContractDegreeZero,
    #[error("vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("metric is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("metric is degenerate or not positive definite")]
    DegenerateMetric,
    #[error("orientation must be a nonzero top-degree form")]
    BadOrientation,
}

struct BasisTable {
    masks: Vec<u8>,
    rank: [u16; 256],
}

fn tables() -> &'static Vec<Vec<BasisTable>> {
    static TABLES: OnceLock<Vec<Vec<BasisTable>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|dim| {
                (0..=dim)
                    .map(|deg| {
                        let mut masks: Vec<u8> = (0u16..(1u16 << dim))
                            .filter(|m| m.count_ones() as usize == deg)
                            .map(|m| m as u8)
                            .collect();
                        masks.sort_by_key(|&m| lex_key(m));
                        let mut rank = [u16::MAX; 256];
                        for (i, &m) in masks.iter().enumerate() {
                            rank[m as usize] = i as u16;
                        }
                        BasisTable { masks, rank }
                    })
                    .collect()
            })
            .collect()
    })
}

fn lex_key(mask: u8) -> Vec<u32> {
    (0..8).filter(|b| mask & (1 << b) != 0).collect()
}

/// Basis bitmasks of degree-`degree` forms in dimension `dim`, lexicographic.
pub fn basis_masks(dim: usize, degree: usize) -> &'static [u8] {
    &tables()[dim][degree].masks
}

pub fn mask_index(dim: usize, mask: u8) -> usize {
    tables()[dim][mask.count_ones() as usize].rank[mask as usize] as usize
}

/// Zero-based indices contained in a mask, ascending.
pub fn mask_indices(mask: u8) -> Vec<usize> {
    (0..8).filter(|b| mask & (1 << b) != 0).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of `e^a ∧ e^b` relative to `e^{a|b}`; zero when the masks overlap.
pub fn wedge_sign(a: u8, b: u8) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        let above = if j >= 7 { 0u8 } else { !((1u16 << (j + 1)) - 1) as u8 };
        inversions += (a & above).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Parity of a sequence of distinct indices relative to its sorted order;
/// zero if an index repeats.
pub fn permutation_sign(indices: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..indices.len() {
        for j in i + 1..indices.len() {
            if indices[i] == indices[j] {
                return 0;
            }
            if indices[i] > indices[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// A homogeneous exterior form on `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<S> {
    dim: usize,
    degree: usize,
    coeffs: Vec<S>,
}

impl<S: Real> Form<S> {
    fn check_shape(dim: usize, degree: usize) -> Result<(), ExteriorError> {
        if dim != 6 && dim != 7 {
            return Err(ExteriorError::UnsupportedDimension(dim));
        }
        if degree > dim {
            return Err(ExteriorError::DegreeOverflow { dim, degree });
        }
        Ok(())
    }

    pub fn new(dim: usize, degree: usize, coeffs: Vec<S>) -> Result<Self, ExteriorError> {
        Self::check_shape(dim, degree)?;
        let expected = binomial(dim, degree);
        if coeffs.len() != expected {
            return Err(ExteriorError::WrongLength { expected, got: coeffs.len() });
        }
        Ok(Self { dim, degree, coeffs })
    }

    /// Zero form. Panics on an unsupported shape.
    pub fn zeros(dim: usize, degree: usize) -> Self {
        Self::check_shape(dim, degree).expect("invalid form shape");
        Self { dim, degree, coeffs: vec![S::zero(); binomial(dim, degree)] }
    }

    pub fn scalar(dim: usize, value: S) -> Self {
        let mut f = Self::zeros(dim, 0);
        f.coeffs[0] = value;
        f
    }

    /// Sum of `coef * e^{i1 i2 ...}` with **one-based** indices in any order,
    /// matching the `e^{123}` notation.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(f64, &[usize])]) -> Self {
        let mut f = Self::zeros(dim, degree);
        for &(c, idx) in terms {
            assert_eq!(idx.len(), degree, "term degree mismatch");
            let zero_based: Vec<usize> = idx.iter().map(|&i| i - 1).collect();
            let sign = permutation_sign(&zero_based);
            assert!(sign != 0, "repeated index in basis term");
            let mask = zero_based.iter().fold(0u8, |m, &i| m | (1 << i));
            let k = mask_index(dim, mask);
            f.coeffs[k] = f.coeffs[k] + S::lit(c * sign as f64);
        }
        f
    }

    /// The covector `sum v_i e^i`.
    pub fn one_form(v: &[S]) -> Self {
        let mut f = Self::zeros(v.len(), 1);
        f.coeffs.copy_from_slice(v);
        f
    }

    /// Top-degree form `c e^{1...n}`.
    pub fn top(dim: usize, c: S) -> Self {
        let mut f = Self::zeros(dim, dim);
        f.coeffs[0] = c;
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn masks(&self) -> &'static [u8] {
        basis_masks(self.dim, self.degree)
    }

    /// Coefficient on `e^{I}` for a zero-based ascending multi-index.
    pub fn component(&self, indices: &[usize]) -> S {
        let mask = indices.iter().fold(0u8, |m, &i| m | (1 << i));
        self.coeffs[mask_index(self.dim, mask)]
    }

    pub fn max_abs(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn is_zero(&self, tol: S) -> bool {
        self.max_abs() <= tol
    }

    pub fn scale(&self, s: S) -> Self {
        Self { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Maximum coefficient difference; panics on shape mismatch.
    pub fn max_diff(&self, other: &Self) -> S {
        (self - other).max_abs()
    }

    fn same_shape(&self, other: &Self) -> Result<(), ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.degree != other.degree {
            return Err(ExteriorError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect();
        Ok(Self { dim: self.dim, degree: self.degree, coeffs })
    }

    /// Panicking wedge product for use inside formulas.
    pub fn wedge(&self, other: &Self) -> Self {
        wedge(self, other).expect("wedge shape error")
    }

    /// Panicking interior product `ι_v self`.
    pub fn contract(&self, v: &[S]) -> Self {
        contract(v, self).expect("contraction shape error")
    }

    /// `a ∧ a ∧ ... ` (`k` factors); `k = 0` gives the constant 1.
    pub fn power(&self, k: usize) -> Self {
        let mut acc = Self::scalar(self.dim, S::one());
        for _ in 0..k {
            acc = acc.wedge(self);
        }
        acc
    }

    /// Pullback along a linear map `A: R^m -> R^dim` given as a `dim x m` matrix.
    pub fn pullback(&self, a: &Matrix<S>) -> Self {
        assert_eq!(a.rows(), self.dim, "pullback map has wrong target dimension");
        let m = a.cols();
        let mut out = Self::zeros(m, self.degree);
        let src = self.masks();
        for (oi, &om) in basis_masks(m, self.degree).iter().enumerate() {
            let cols = mask_indices(om);
            let mut acc = S::zero();
            for (si, &sm) in src.iter().enumerate() {
                let c = self.coeffs[si];
                if c == S::zero() {
                    continue;
                }
                let rows = mask_indices(sm);
                acc = acc + c * a.select(&rows, &cols).determinant();
            }
            out.coeffs[oi] = acc;
        }
        out
    }

    /// Evaluates the form on `degree` vectors.
    pub fn evaluate(&self, vectors: &[Vec<S>]) -> S {
        assert_eq!(vectors.len(), self.degree);
        let cols = Matrix::from_fn(self.dim, self.degree, |i, j| vectors[j][i]);
        let mut acc = S::zero();
        for (i, &m) in self.masks().iter().enumerate() {
            let rows = mask_indices(m);
            acc = acc + self.coeffs[i] * cols.select(&rows, &(0..self.degree).collect::<Vec<_>>()).determinant();
        }
        acc
    }

    /// Fully antisymmetric component tensor `T[i1..ik]`, flattened row-major.
    pub fn to_tensor(&self) -> Vec<S> {
        let n = self.dim;
        let k = self.degree;
        let mut t = vec![S::zero(); n.pow(k as u32)];
        let perms = permutations(k);
        for (ci, &m) in self.masks().iter().enumerate() {
            let idx = mask_indices(m);
            for perm in &perms {
                let seq: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
                let sign = permutation_sign(perm);
                let flat = seq.iter().fold(0usize, |acc, &i| acc * n + i);
                t[flat] = S::lit(sign as f64) * self.coeffs[ci];
            }
        }
        t
    }

    /// Reads the independent components of an antisymmetric tensor.
    pub fn from_tensor(dim: usize, degree: usize, t: &[S]) -> Self {
        let mut f = Self::zeros(dim, degree);
        for (ci, &m) in basis_masks(dim, degree).iter().enumerate() {
            let flat = mask_indices(m).iter().fold(0usize, |acc, &i| acc * dim + i);
            f.coeffs[ci] = t[flat];
        }
        f
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

impl<S: Real> Add for &Form<S> {
    type Output = Form<S>;
    fn add(self, rhs: &Form<S>) -> Form<S> {
        self.try_add(rhs).expect("form addition shape mismatch")
    }
}

impl<S: Real> Add for Form<S> {
    type Output = Form<S>;
    fn add(self, rhs: Form<S>) -> Form<S> {
        &self + &rhs
    }
}

impl<S: Real> Sub for &Form<S> {
    type Output = Form<S>;
    fn sub(self, rhs: &Form<S>) -> Form<S> {
        self.try_add(&-rhs).expect("form subtraction shape mismatch")
    }
}

impl<S: Real> Sub for Form<S> {
    type Output = Form<S>;
    fn sub(self, rhs: Form<S>) -> Form<S> {
        &self - &rhs
    }
}

impl<S: Real> AddAssign<&Form<S>> for Form<S> {
    fn add_assign(&mut self, rhs: &Form<S>) {
        self.same_shape(rhs).expect("form addition shape mismatch");
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = *a + b;
        }
    }
}

impl<S: Real> SubAssign<&Form<S>> for Form<S> {
    fn sub_assign(&mut self, rhs: &Form<S>) {
        self.same_shape(rhs).expect("form subtraction shape mismatch");
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = *a - b;
        }
    }
}

impl<S: Real> Neg for &Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Form<S> {
        self.scale(-S::one())
    }
}

impl<S: Real> Neg for Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Form<S> {
        self.scale(-S::one())
    }
}

impl<S: Real> Mul<&Form<S>> for f64 {
    type Output = Form<S>;
    fn mul(self, rhs: &Form<S>) -> Form<S> {
        rhs.scale(S::lit(self))
    }
}

impl<S: Real> Mul<Form<S>> for f64 {
    type Output = Form<S>;
    fn mul(self, rhs: Form<S>) -> Form<S> {
        rhs.scale(S::lit(self))
    }
}

/// Exterior product.
pub fn wedge<S: Real>(a: &Form<S>, b: &Form<S>) -> Result<Form<S>, ExteriorError> {
    if a.dim != b.dim {
        return Err(ExteriorError::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let degree = a.degree + b.degree;
    if degree > a.dim {
        return Err(ExteriorError::DegreeOverflow { dim: a.dim, degree });
    }
    let mut out = Form::zeros(a.dim, degree);
    let (am, bm) = (a.masks(), b.masks());
    for (i, &ma) in am.iter().enumerate() {
        let ca = a.coeffs[i];
        if ca == S::zero() {
            continue;
        }
        for (j, &mb) in bm.iter().enumerate() {
            let cb = b.coeffs[j];
            if cb == S::zero() {
                continue;
            }
            let s = wedge_sign(ma, mb);
            if s == 0 {
                continue;
            }
            let k = mask_index(a.dim, ma | mb);
            let term = ca * cb;
            out.coeffs[k] = if s > 0 { out.coeffs[k] + term } else { out.coeffs[k] - term };
        }
    }
    Ok(out)
}

/// Interior product `ι_v a`.
pub fn contract<S: Real>(v: &[S], a: &Form<S>) -> Result<Form<S>, ExteriorError> {
    if a.degree == 0 {
        return Err(ExteriorError::ContractDegreeZero);
    }
    if v.len() != a.dim {
        return Err(ExteriorError::VectorLength { expected: a.dim, got: v.len() });
    }
    let mut out = Form::zeros(a.dim, a.degree - 1);
    for (i, &m) in a.masks().iter().enumerate() {
        let c = a.coeffs[i];
        if c == S::zero() {
            continue;
        }
        for (pos, idx) in mask_indices(m).into_iter().enumerate() {
            if v[idx] == S::zero() {
                continue;
            }
            let k = mask_index(a.dim, m & !(1 << idx));
            let term = v[idx] * c;
            out.coeffs[k] = if pos % 2 == 0 { out.coeffs[k] + term } else { out.coeffs[k] - term };
        }
    }
    Ok(out)
}

/// Symmetric positive-definite metric on `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric<S> {
    g: Matrix<S>,
    inv: Matrix<S>,
    det: S,
}

impl<S: Real> Metric<S> {
    pub fn new(g: Matrix<S>) -> Result<Self, ExteriorError> {
        if !g.is_square() {
            return Err(ExteriorError::DimensionMismatch { left: g.rows(), right: g.cols() });
        }
        let scale = g.max_abs().max(S::one());
        let asym = g.asymmetry();
        if asym > S::lit(64.0) * S::epsilon() * scale {
            return Err(ExteriorError::NotSymmetric(asym.to_f64_lossy()));
        }
        let g = g.symmetrize();
        if g.cholesky().is_none() {
            return Err(ExteriorError::DegenerateMetric);
        }
        let inv = g.inverse().ok_or(ExteriorError::DegenerateMetric)?.symmetrize();
        let det = g.determinant();
        Ok(Self { g, inv, det })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self { g: Matrix::identity(dim), inv: Matrix::identity(dim), det: S::one() }
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix<S> {
        &self.inv
    }

    pub fn det(&self) -> S {
        self.det
    }

    pub fn min_eigenvalue(&self) -> S {
        self.g.min_symmetric_eigenvalue()
    }

    /// `g(u, v)`.
    pub fn apply(&self, u: &[S], v: &[S]) -> S {
        let gv = self.g.mat_vec(v);
        u.iter().zip(&gv).map(|(&a, &b)| a * b).sum()
    }

    /// Metric dual covector `v^♭`.
    pub fn flat(&self, v: &[S]) -> Form<S> {
        Form::one_form(&self.g.mat_vec(v))
    }

    /// Metric dual vector `α^♯` of a 1-form.
    pub fn sharp(&self, alpha: &Form<S>) -> Vec<S> {
        assert_eq!(alpha.degree(), 1, "sharp expects a 1-form");
        self.inv.mat_vec(alpha.coeffs())
    }

    /// Gram matrix of the induced inner product on degree-`k` forms.
    pub fn induced(&self, k: usize) -> Matrix<S> {
        let n = self.dim();
        let masks = basis_masks(n, k);
        let idx: Vec<Vec<usize>> = masks.iter().map(|&m| mask_indices(m)).collect();
        let size = masks.len();
        let mut out = Matrix::zeros(size, size);
        for i in 0..size {
            for j in i..size {
                let d = if k == 0 { S::one() } else { self.inv.select(&idx[i], &idx[j]).determinant() };
                out[(i, j)] = d;
                out[(j, i)] = d;
            }
        }
        out
    }

    /// Riemannian volume form with the orientation sign of `orientation`.
    pub fn volume_form(&self, orientation: &Form<S>) -> Result<Form<S>, ExteriorError> {
        let sign = orientation_sign(orientation, self.dim())?;
        Ok(Form::top(self.dim(), sign * self.det.sqrt()))
    }
}

fn orientation_sign<S: Real>(orientation: &Form<S>, dim: usize) -> Result<S, ExteriorError> {
    if orientation.dim() != dim || orientation.degree() != dim {
        return Err(ExteriorError::BadOrientation);
    }
    let c = orientation.coeffs()[0];
    if c == S::zero() || !c.is_finite() {
        return Err(ExteriorError::BadOrientation);
    }
    Ok(c.signum())
}

/// Inner product of two forms of equal shape.
pub fn inner<S: Real>(a: &Form<S>, b: &Form<S>, g: &Metric<S>) -> Result<S, ExteriorError> {
    a.same_shape(b)?;
    if g.dim() != a.dim() {
        return Err(ExteriorError::DimensionMismatch { left: g.dim(), right: a.dim() });
    }
    if is_identity(g) {
        return Ok(a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| x * y).sum());
    }
    let gram = g.induced(a.degree());
    let gb = gram.mat_vec(&b.coeffs);
    Ok(a.coeffs.iter().zip(&gb).map(|(&x, &y)| x * y).sum())
}

fn is_identity<S: Real>(g: &Metric<S>) -> bool {
    let m = g.matrix();
    let n = m.rows();
    (0..n).all(|i| (0..n).all(|j| m[(i, j)] == if i == j { S::one() } else { S::zero() }))
}

/// Hodge star for metric `g` and the orientation of the top form `orientation`.
pub fn hodge<S: Real>(a: &Form<S>, g: &Metric<S>, orientation: &Form<S>) -> Result<Form<S>, ExteriorError> {
    let n = a.dim();
    if g.dim() != n {
        return Err(ExteriorError::DimensionMismatch { left: g.dim(), right: n });
    }
    let sign = orientation_sign(orientation, n)?;
    let raised = if is_identity(g) { a.coeffs.clone() } else { g.induced(a.degree()).mat_vec(&a.coeffs) };
    let factor = sign * g.det().sqrt();
    let full: u8 = ((1u16 << n) - 1) as u8;
    let mut out = Form::zeros(n, n - a.degree());
    for (i, &m) in a.masks().iter().enumerate() {
        let r = raised[i];
        if r == S::zero() {
            continue;
        }
        let comp = full & !m;
        let k = mask_index(n, comp);
        let s = S::lit(wedge_sign(m, comp) as f64);
        out.coeffs[k] = out.coeffs[k] + s * factor * r;
    }
    Ok(out)
}

/// Hodge star for the Euclidean metric and standard orientation.
pub fn hodge_euclidean<S: Real>(a: &Form<S>) -> Form<S> {
    let n = a.dim();
    hodge(a, &Metric::euclidean(n), &Form::top(n, S::one())).expect("euclidean hodge")
}

/// `φ = e^{123}+e^{145}+e^{167}+e^{246}−e^{257}−e^{347}−e^{356}`.
pub fn standard_phi<S: Real>() -> Form<S> {
    Form::from_terms(
        7,
        3,
        &[
            (1.0, &[1, 2, 3]),
            (1.0, &[1, 4, 5]),
            (1.0, &[1, 6, 7]),
            (1.0, &[2, 4, 6]),
            (-1.0, &[2, 5, 7]),
            (-1.0, &[3, 4, 7]),
            (-1.0, &[3, 5, 6]),
        ],
    )
}

/// `ψ = *φ = e^{4567}+e^{2367}+e^{2345}+e^{1357}−e^{1346}−e^{1256}−e^{1247}`.
pub fn standard_psi<S: Real>() -> Form<S> {
    Form::from_terms(
        7,
        4,
        &[
            (1.0, &[4, 5, 6, 7]),
            (1.0, &[2, 3, 6, 7]),
            (1.0, &[2, 3, 4, 5]),
            (1.0, &[1, 3, 5, 7]),
            (-1.0, &[1, 3, 4, 6]),
            (-1.0, &[1, 2, 5, 6]),
            (-1.0, &[1, 2, 4, 7]),
        ],
    )
}

/// Standard SU(3) triple `(ω, Ω₊, Ω₋)` on `R^6`, with
/// `Ω = (e¹+ie²)∧(e³+ie⁴)∧(e⁵+ie⁶)`.
pub fn standard_su3<S: Real>() -> (Form<S>, Form<S>, Form<S>) {
    let omega = Form::from_terms(6, 2, &[(1.0, &[1, 2]), (1.0, &[3, 4]), (1.0, &[5, 6])]);
    let plus = Form::from_terms(
        6,
        3,
        &[(1.0, &[1, 3, 5]), (-1.0, &[1, 4, 6]), (-1.0, &[2, 3, 6]), (-1.0, &[2, 4, 5])],
    );
    let minus = Form::from_terms(
        6,
        3,
        &[(1.0, &[1, 3, 6]), (1.0, &[1, 4, 5]), (1.0, &[2, 3, 5]), (-1.0, &[2, 4, 6])],
    );
    (omega, plus, minus)
}
