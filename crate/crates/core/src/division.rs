//! Cholesky division algorithm on the cone.
//!
//! Every `y` in the cone is `t(e)` for a unique element `t` of the triangular
//! group, realized as `x ↦ ℓ x ℓᵀ` with `ℓ` the lower Cholesky factor of `y`.
//! The four maps are
//!
//! | mode       | map                |
//! |------------|--------------------|
//! | `Plain`    | `ℓ x ℓᵀ`           |
//! | `Star`     | `ℓᵀ x ℓ`           |
//! | `Inv`      | `ℓ⁻¹ x ℓ⁻ᵀ`        |
//! | `StarInv`  | `ℓ⁻ᵀ x ℓ⁻¹`        |
//!
//! Inverse modes use triangular solves; nothing here forms an explicit
//! matrix inverse.

use crate::dense;
use crate::error::{ConeError, Result};
use crate::jordan::{power, quad_rep_apply, ConeElement, SymMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PiMode {
    Plain,
    Star,
    Inv,
    StarInv,
}

impl PiMode {
    /// Adjoint under the trace inner product.
    pub fn adjoint(self) -> PiMode {
        match self {
            PiMode::Plain => PiMode::Star,
            PiMode::Star => PiMode::Plain,
            PiMode::Inv => PiMode::StarInv,
            PiMode::StarInv => PiMode::Inv,
        }
    }

    /// `(g⁻¹)*`, the map sending `v⁻¹` to `g(v)⁻¹`.
    pub fn inverse_adjoint(self) -> PiMode {
        match self {
            PiMode::Plain => PiMode::StarInv,
            PiMode::StarInv => PiMode::Plain,
            PiMode::Star => PiMode::Inv,
            PiMode::Inv => PiMode::Star,
        }
    }

    pub const ALL: [PiMode; 4] = [PiMode::Plain, PiMode::Star, PiMode::Inv, PiMode::StarInv];
}

/// Lower triangular factor with strictly positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularFactor {
    r: usize,
    entries: Vec<f64>,
}

impl TriangularFactor {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.r + j]
    }

    pub fn identity(r: usize) -> Self {
        TriangularFactor {
            r,
            entries: SymMatrix::identity(r).as_slice().to_vec(),
        }
    }

    /// `ℓ ℓᵀ`, the cone element this factor represents.
    pub fn apply_to_identity(&self) -> SymMatrix {
        self.apply(&SymMatrix::identity(self.r), PiMode::Plain)
            .expect("sizes agree")
    }

    /// Applies the map selected by `mode` to `x`.
    pub fn apply(&self, x: &SymMatrix, mode: PiMode) -> Result<SymMatrix> {
        if x.r() != self.r {
            return Err(ConeError::DimensionMismatch {
                left: self.r,
                right: x.r(),
            });
        }
        let n = self.r;
        let l = &self.entries;
        let xs = x.as_slice();
        let out = match mode {
            PiMode::Plain => {
                let lx = dense::matmul(n, l, xs);
                dense::matmul(n, &lx, &dense::transpose(n, l))
            }
            PiMode::Star => {
                let ltx = dense::matmul(n, &dense::transpose(n, l), xs);
                dense::matmul(n, &ltx, l)
            }
            PiMode::Inv => {
                // ℓ⁻¹ x, then ℓ⁻¹ (ℓ⁻¹ x)ᵀ = ℓ⁻¹ x ℓ⁻ᵀ
                let m = dense::solve_lower(n, l, xs);
                dense::solve_lower(n, l, &dense::transpose(n, &m))
            }
            PiMode::StarInv => {
                let m = dense::solve_lower_transposed(n, l, xs);
                dense::solve_lower_transposed(n, l, &dense::transpose(n, &m))
            }
        };
        Ok(SymMatrix::from_raw(n, out))
    }

    /// Applies the map to a cone element and certifies the image.
    pub fn apply_cone(&self, x: &ConeElement, mode: PiMode) -> Result<ConeElement> {
        ConeElement::certify(self.apply(x, mode)?)
    }
}

/// Cholesky factor `ℓ` with `ℓ ℓᵀ = y`.
pub fn cholesky(y: &ConeElement) -> Result<TriangularFactor> {
    let r = y.r();
    let entries = dense::cholesky(r, y.as_slice())?;
    Ok(TriangularFactor { r, entries })
}

/// `π(y)`, `π*(y)`, `π⁻¹(y)` or `π*⁻¹(y)` applied to `x`.
pub fn pi_apply(y: &ConeElement, x: &SymMatrix, mode: PiMode) -> Result<SymMatrix> {
    y.check_same(x)?;
    cholesky(y)?.apply(x, mode)
}

/// Extension to `−Ω`: `π(−y) = −π(y)`, and likewise for the other modes.
pub fn pi_signed_apply(y_signed: &SymMatrix, x: &SymMatrix, mode: PiMode) -> Result<SymMatrix> {
    y_signed.check_same(x)?;
    if let Ok(y) = ConeElement::certify(y_signed.clone()) {
        return pi_apply(&y, x, mode);
    }
    match ConeElement::certify(-y_signed) {
        Ok(y) => Ok(-pi_apply(&y, x, mode)?),
        Err(_) => Err(ConeError::NotSigned),
    }
}

/// Quotient of `x` by `y` through the quadratic representation,
/// `P(y^{-1/2}) x`.
pub fn quad_div(y: &ConeElement, x: &SymMatrix) -> Result<SymMatrix> {
    y.check_same(x)?;
    quad_rep_apply(power(y, -0.5)?.as_sym(), x)
}
