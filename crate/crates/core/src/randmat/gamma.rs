use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{ConeError, Result};
use crate::jordan::{spectral_decomposition, ConeElement};

/// Shapes of the beta distribution of the second kind on the rank-`r` cone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beta2Params {
    p: f64,
    q: f64,
    r: usize,
}

fn check_shape(p: f64, r: usize) -> Result<()> {
    if r == 0 {
        return Err(ConeError::Domain("rank must be at least 1".into()));
    }
    let min = (r as f64 - 1.0) / 2.0;
    if p.is_finite() && p > min {
        Ok(())
    } else {
        Err(ConeError::Domain(format!(
            "shape {p} must exceed {min} at rank {r}"
        )))
    }
}

impl Beta2Params {
    pub fn new(p: f64, q: f64, r: usize) -> Result<Self> {
        check_shape(p, r)?;
        check_shape(q, r)?;
        Ok(Beta2Params { p, q, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }
}

/// `log Γ_Ω(p) = (r(r−1)/4) log 2π + Σ_{k=1}^{r} log Γ(p − (k−1)/2)`.
pub fn gamma_omega(p: f64, r: usize) -> Result<f64> {
    check_shape(p, r)?;
    let rf = r as f64;
    let head = rf * (rf - 1.0) / 4.0 * (2.0 * PI).ln();
    Ok(head + (0..r).map(|k| ln_gamma(p - k as f64 / 2.0)).sum::<f64>())
}

/// `log B_Ω(p, q)`.
pub fn beta_omega(p: f64, q: f64, r: usize) -> Result<f64> {
    Ok(gamma_omega(p, r)? + gamma_omega(q, r)? - gamma_omega(p + q, r)?)
}

fn log_det(x: &crate::SymMatrix) -> Result<f64> {
    let spec = spectral_decomposition(x)?;
    if spec.min() <= 0.0 {
        return Err(ConeError::NotInCone {
            min_eig: spec.min(),
        });
    }
    Ok(spec.eigenvalues.iter().map(|l| l.ln()).sum())
}

/// Log density of the beta-II law with respect to the Lebesgue measure of
/// the trace inner product.
pub fn beta2_log_density(x: &ConeElement, params: &Beta2Params) -> Result<f64> {
    if x.r() != params.r {
        return Err(ConeError::DimensionMismatch {
            left: x.r(),
            right: params.r,
        });
    }
    let rf = params.r as f64;
    let (p, q) = (params.p, params.q);
    Ok(
        -beta_omega(p, q, params.r)? + (p - (rf + 1.0) / 2.0) * log_det(x)?
            - (p + q) * log_det(&x.add_identity())?,
    )
}
