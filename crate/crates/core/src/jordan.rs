//! The Euclidean Jordan algebra of real symmetric matrices.
//!
//! Elements are dense `r × r` symmetric matrices with the Jordan product
//! `x.y = (xy + yx)/2` and the trace inner product `<x, y> = tr(xy)`. The
//! interior of the cone of Jordan squares is the set of positive-definite
//! matrices; [`ConeElement`] is a matrix certified to lie there.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{ConeError, Result};
use crate::tol::{CONE_TOL, EIG_TOL, MAX_SWEEPS, SYMMETRY_TOL};

/// Dense real symmetric matrix, row-major. Symmetry is exact.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct SymMatrix {
    r: usize,
    data: Vec<f64>,
}

/// Wire form `{"r": <int>, "data": [[row], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    r: usize,
    data: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for SymMatrix {
    type Error = ConeError;

    fn try_from(m: MatrixJson) -> Result<Self> {
        if m.data.len() != m.r {
            return Err(ConeError::Shape(format!(
                "declared r = {} but {} rows given",
                m.r,
                m.data.len()
            )));
        }
        SymMatrix::from_rows(&m.data)
    }
}

impl From<SymMatrix> for MatrixJson {
    fn from(m: SymMatrix) -> Self {
        MatrixJson {
            r: m.r,
            data: m.rows(),
        }
    }
}

impl SymMatrix {
    /// Builds a matrix from row-major entries. Inputs whose asymmetry exceeds
    /// the symmetry tolerance (relative to the largest entry) are rejected;
    /// smaller asymmetries are averaged away.
    pub fn new(r: usize, data: Vec<f64>) -> Result<Self> {
        if r == 0 {
            return Err(ConeError::Shape("rank must be at least 1".into()));
        }
        if data.len() != r * r {
            return Err(ConeError::Shape(format!(
                "expected {} entries for r = {r}, got {}",
                r * r,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ConeError::Shape("non-finite entry".into()));
        }
        let scale = 1.0 + data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut asym = 0.0f64;
        for i in 0..r {
            for j in (i + 1)..r {
                asym = asym.max((data[i * r + j] - data[j * r + i]).abs());
            }
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(ConeError::Asymmetric {
                asymmetry: asym / scale,
            });
        }
        Ok(Self::from_raw(r, data))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * r);
        for row in rows {
            let row = row.as_ref();
            if row.len() != r {
                return Err(ConeError::Shape(format!(
                    "row of length {} in a {r}x{r} matrix",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(r, data)
    }

    /// Symmetrizes unconditionally; used for results of exact-in-theory
    /// symmetric products.
    pub(crate) fn from_raw(r: usize, mut data: Vec<f64>) -> Self {
        dense::symmetrize(r, &mut data);
        SymMatrix { r, data }
    }

    pub fn identity(r: usize) -> Self {
        Self::diag(&vec![1.0; r])
    }

    pub fn zeros(r: usize) -> Self {
        SymMatrix {
            r,
            data: vec![0.0; r * r],
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let r = values.len();
        let mut data = vec![0.0; r * r];
        for (i, v) in values.iter().enumerate() {
            data[i * r + i] = *v;
        }
        SymMatrix { r, data }
    }

    /// The `1 × 1` matrix `[v]`.
    pub fn scalar(v: f64) -> Self {
        SymMatrix {
            r: 1,
            data: vec![v],
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.r + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.r).map(<[f64]>::to_vec).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.r).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        SymMatrix {
            r: self.r,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `e + self`.
    pub fn add_identity(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.r {
            out.data[i * self.r + i] += 1.0;
        }
        out
    }

    pub(crate) fn check_same(&self, other: &SymMatrix) -> Result<()> {
        if self.r != other.r {
            return Err(ConeError::DimensionMismatch {
                left: self.r,
                right: other.r,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &SymMatrix, f: impl Fn(f64, f64) -> f64) -> SymMatrix {
        assert_eq!(self.r, other.r, "matrix size mismatch");
        SymMatrix {
            r: self.r,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix{:?}", self.rows())
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: SymMatrix) -> SymMatrix {
        &self + &rhs
    }
}

impl Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: SymMatrix) -> SymMatrix {
        &self - &rhs
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self.scale(-1.0)
    }
}

impl Neg for SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self.scale(-1.0)
    }
}

impl Mul<&SymMatrix> for f64 {
    type Output = SymMatrix;
    fn mul(self, rhs: &SymMatrix) -> SymMatrix {
        rhs.scale(self)
    }
}

/// Eigen-decomposition `x = basis · diag(eigenvalues) · basisᵀ`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Row-major `r × r`; column `j` is the eigenvector of `eigenvalues[j]`.
    pub basis: Vec<f64>,
}

impl Spectrum {
    pub fn r(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `basis · diag(f(λ)) · basisᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let r = self.r();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = vec![0.0; r * r];
        for i in 0..r {
            for j in i..r {
                let s: f64 = (0..r)
                    .map(|k| self.basis[i * r + k] * fl[k] * self.basis[j * r + k])
                    .sum();
                out[i * r + j] = s;
                out[j * r + i] = s;
            }
        }
        SymMatrix { r, data: out }
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|l| l)
    }
}

/// A symmetric matrix certified positive definite.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "SymMatrix")]
pub struct ConeElement {
    m: SymMatrix,
    min_eig: f64,
}

impl From<ConeElement> for SymMatrix {
    fn from(c: ConeElement) -> Self {
        c.m
    }
}

impl TryFrom<SymMatrix> for ConeElement {
    type Error = ConeError;

    fn try_from(m: SymMatrix) -> Result<Self> {
        ConeElement::certify(m)
    }
}

impl<'de> Deserialize<'de> for ConeElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = SymMatrix::deserialize(d)?;
        ConeElement::certify(m).map_err(serde::de::Error::custom)
    }
}

impl Deref for ConeElement {
    type Target = SymMatrix;
    fn deref(&self) -> &SymMatrix {
        &self.m
    }
}

impl ConeElement {
    /// Certifies `m` at the default cone tolerance.
    pub fn certify(m: SymMatrix) -> Result<Self> {
        Self::certify_with_tol(m, CONE_TOL)
    }

    pub fn certify_with_tol(m: SymMatrix, tol: f64) -> Result<Self> {
        let min_eig = spectral_decomposition(&m)?.min();
        if min_eig > tol * (1.0 + frob_norm(&m)) {
            Ok(ConeElement { m, min_eig })
        } else {
            Err(ConeError::NotInCone { min_eig })
        }
    }

    pub fn identity(r: usize) -> Self {
        ConeElement {
            m: SymMatrix::identity(r),
            min_eig: 1.0,
        }
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Self::certify(SymMatrix::scalar(v))
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.m
    }

    pub fn into_sym(self) -> SymMatrix {
        self.m
    }

    /// Matrix inverse through the Cholesky factor.
    pub fn inverse(&self) -> Result<ConeElement> {
        ConeElement::certify(spd_inverse(&self.m)?)
    }

    /// `e + self`, which stays in the cone with a margin of at least one.
    pub fn add_identity(&self) -> ConeElement {
        ConeElement {
            m: self.m.add_identity(),
            min_eig: self.min_eig + 1.0,
        }
    }

    pub fn log_det(&self) -> Result<f64> {
        Ok(spectral_decomposition(&self.m)?
            .eigenvalues
            .iter()
            .map(|l| l.ln())
            .sum())
    }
}

/// Inverse of a positive-definite matrix, `l^{-T} l^{-1}`.
pub(crate) fn spd_inverse(m: &SymMatrix) -> Result<SymMatrix> {
    let r = m.r;
    let l = dense::cholesky(r, &m.data)?;
    let linv = dense::solve_lower(r, &l, &SymMatrix::identity(r).data);
    let inv = dense::matmul(r, &dense::transpose(r, &linv), &linv);
    Ok(SymMatrix::from_raw(r, inv))
}

/// `x.y = (xy + yx) / 2`.
pub fn jordan_product(x: &SymMatrix, y: &SymMatrix) -> Result<SymMatrix> {
    x.check_same(y)?;
    let r = x.r;
    let xy = dense::matmul(r, &x.data, &y.data);
    // yx = (xy)ᵀ for symmetric x and y
    let mut out = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..r {
            out[i * r + j] = 0.5 * (xy[i * r + j] + xy[j * r + i]);
        }
    }
    Ok(SymMatrix { r, data: out })
}

/// `<x, y> = tr(xy)`.
pub fn inner(x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    x.check_same(y)?;
    Ok(x.data.iter().zip(&y.data).map(|(a, b)| a * b).sum())
}

/// Quadratic representation `P(x)y = xyx`.
pub fn quad_rep_apply(x: &SymMatrix, y: &SymMatrix) -> Result<SymMatrix> {
    x.check_same(y)?;
    let r = x.r;
    let xy = dense::matmul(r, &x.data, &y.data);
    Ok(SymMatrix::from_raw(r, dense::matmul(r, &xy, &x.data)))
}

pub fn frob_norm(x: &SymMatrix) -> f64 {
    x.data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Cyclic Jacobi eigen-decomposition, eigenvalues sorted descending.
pub fn spectral_decomposition(x: &SymMatrix) -> Result<Spectrum> {
    let n = x.r;
    let mut a = x.data.clone();
    let mut v = SymMatrix::identity(n).data;
    let tol = EIG_TOL * (1.0 + x.max_abs());

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= tol {
            converged = true;
            break;
        }
        if !off.is_finite() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- A J, then A <- Jᵀ A
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(ConeError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let mut basis = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            basis[row * n + col] = v[row * n + src];
        }
    }
    Ok(Spectrum { eigenvalues, basis })
}

pub fn min_eigenvalue(x: &SymMatrix) -> Result<f64> {
    Ok(spectral_decomposition(x)?.min())
}

/// Smallest eigenvalue scaled by `1 + ‖x‖`; positive inside the cone.
pub fn cone_margin(x: &SymMatrix) -> Result<f64> {
    Ok(min_eigenvalue(x)? / (1.0 + frob_norm(x)))
}

/// `x^α` through the spectral decomposition.
pub fn power(x: &ConeElement, alpha: f64) -> Result<ConeElement> {
    let spec = spectral_decomposition(&x.m)?;
    let lmin = spec.min();
    if lmin.is_nan() || lmin <= 0.0 {
        return Err(ConeError::NotInCone { min_eig: lmin });
    }
    let m = spec.map(|l| l.powf(alpha));
    let min_eig = spec
        .eigenvalues
        .iter()
        .map(|l| l.powf(alpha))
        .fold(f64::INFINITY, f64::min);
    Ok(ConeElement { m, min_eig })
}

/// Certifies membership in the open cone: smallest eigenvalue greater than
/// `CONE_TOL · (1 + ‖x‖)`.
pub fn in_cone(x: &SymMatrix) -> Option<ConeElement> {
    ConeElement::certify(x.clone()).ok()
}

/// `x < y` in the cone order, i.e. `y − x` is in the open cone.
pub fn cone_less(x: &SymMatrix, y: &SymMatrix) -> Result<bool> {
    x.check_same(y)?;
    Ok(in_cone(&(y - x)).is_some())
}

/// Inverse of an arbitrary nonsingular symmetric matrix.
pub fn sym_inverse(x: &SymMatrix) -> Result<SymMatrix> {
    let spec = spectral_decomposition(x)?;
    let scale = spec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if spec
        .eigenvalues
        .iter()
        .any(|l| l.abs() <= f64::EPSILON * scale || *l == 0.0)
    {
        return Err(ConeError::Singular);
    }
    Ok(spec.map(|l| 1.0 / l))
}
