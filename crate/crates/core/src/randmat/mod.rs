//! Random elements of the cone: Wishart-type variates from the Bartlett
//! construction, beta-II variates as Cholesky quotients, and the multivariate
//! gamma and beta functions in log space.

mod gamma;
mod rng;

pub use gamma::{beta2_log_density, beta_omega, gamma_omega, Beta2Params};
pub use rng::{split_stream, RngStream};

use rand_distr::{Distribution, Gamma, Normal};

use crate::division::{cholesky, PiMode};
use crate::error::{ConeError, Result};
use crate::jordan::{ConeElement, SymMatrix};

/// `X = LLᵀ` with `L_ii² ~ Gamma(s − (i−1)/2, 1)` and `L_ij ~ N(0, 1/2)` below
/// the diagonal. The law has density proportional to
/// `Δ(x)^{s−(r+1)/2} e^{−tr x}` and mean `s·e`. Shapes just above the domain
/// boundary can produce draws below the cone tolerance, which are errors.
pub fn sample_wishart(s: f64, r: usize, rng: &mut RngStream) -> Result<ConeElement> {
    if r == 0 || s.is_nan() || s <= (r as f64 - 1.0) / 2.0 {
        return Err(ConeError::Domain(format!(
            "Wishart shape {s} out of range at rank {r}"
        )));
    }
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2)
        .map_err(|e| ConeError::Domain(e.to_string()))?;
    let mut l = vec![0.0; r * r];
    for i in 0..r {
        let shape = s - i as f64 / 2.0;
        let g = Gamma::new(shape, 1.0).map_err(|e| ConeError::Domain(e.to_string()))?;
        l[i * r + i] = g.sample(rng).sqrt();
        for j in 0..i {
            l[i * r + j] = normal.sample(rng);
        }
    }
    let mut x = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..=i {
            let v: f64 = (0..=j).map(|k| l[i * r + k] * l[j * r + k]).sum();
            x[i * r + j] = v;
            x[j * r + i] = v;
        }
    }
    ConeElement::certify(SymMatrix::new(r, x)?)
}

/// Beta-II draw `ℓ_W^{−T} S ℓ_W^{−1}` with `S ~ W(p)`, `W = ℓ_W ℓ_Wᵀ ~ W(q)`.
pub fn sample_beta2(params: &Beta2Params, rng: &mut RngStream) -> Result<ConeElement> {
    let s = sample_wishart(params.p(), params.r(), rng)?;
    let w = sample_wishart(params.q(), params.r(), rng)?;
    cholesky(&w)?.apply_cone(&s, PiMode::StarInv)
}
