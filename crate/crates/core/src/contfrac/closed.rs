//! Operator-product identities for the unit fraction.
//!
//! `F_k` is the sum of the inverted differences of three consecutive
//! inverted convergents; it has a closed form as a signed composition of
//! cone automorphisms applied to `e`. `Q_k` is the automorphism with
//! `w_{k+1}⁻¹ − w_k⁻¹ = Q_k(x_{k+2}⁻¹)`.

use super::unit::UnitFraction;
use crate::division::{PiMode, TriangularFactor};
use crate::error::{ConeError, Result};
use crate::jordan::{quad_rep_apply, sym_inverse, ConeElement, SymMatrix};
use crate::tol::MAX_CLOSED_FORM_DEPTH;

/// A primitive cone automorphism.
#[derive(Clone, Debug)]
pub enum Op {
    Pi {
        factor: TriangularFactor,
        mode: PiMode,
    },
    /// Quadratic representation `P(y)`.
    Quad(SymMatrix),
}

impl Op {
    pub fn apply(&self, v: &SymMatrix) -> Result<SymMatrix> {
        match self {
            Op::Pi { factor, mode } => factor.apply(v, *mode),
            Op::Quad(y) => quad_rep_apply(y, v),
        }
    }

    pub fn adjoint(&self) -> Op {
        match self {
            Op::Pi { factor, mode } => Op::Pi {
                factor: factor.clone(),
                mode: mode.adjoint(),
            },
            Op::Quad(y) => Op::Quad(y.clone()),
        }
    }
}

/// Composition `g_1 g_2 … g_m`, applied right to left.
#[derive(Clone, Debug, Default)]
pub struct OpChain {
    ops: Vec<Op>,
}

impl OpChain {
    pub fn new() -> Self {
        Self::default()
    }

    /// `self ∘ op`.
    pub fn then(mut self, op: Op) -> Self {
        self.ops.push(op);
        self
    }

    fn pi(self, f: &TriangularFactor, mode: PiMode) -> Self {
        self.then(Op::Pi {
            factor: f.clone(),
            mode,
        })
    }

    fn quad(self, y: SymMatrix) -> Self {
        self.then(Op::Quad(y))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn apply(&self, v: &SymMatrix) -> Result<SymMatrix> {
        let mut acc = v.clone();
        for op in self.ops.iter().rev() {
            acc = op.apply(&acc)?;
        }
        Ok(acc)
    }

    /// Adjoint under the trace inner product: reversed order, each primitive
    /// replaced by its adjoint.
    pub fn adjoint(&self) -> OpChain {
        OpChain {
            ops: self.ops.iter().rev().map(Op::adjoint).collect(),
        }
    }
}

fn check_closed_depth(seq: &UnitFraction, k: usize, min_k: usize, needed: usize) -> Result<()> {
    if k < min_k {
        return Err(ConeError::Domain(format!("k = {k} below minimum {min_k}")));
    }
    if k > MAX_CLOSED_FORM_DEPTH {
        return Err(ConeError::OutOfRange {
            index: k,
            max: MAX_CLOSED_FORM_DEPTH,
        });
    }
    if needed > seq.len() {
        return Err(ConeError::OutOfRange {
            index: needed,
            max: seq.len(),
        });
    }
    Ok(())
}

/// `F_k` from its definition:
/// `([x_1..x_k]⁻¹ − [x_1..x_{k+1}]⁻¹)⁻¹ + ([x_1..x_{k+1}]⁻¹ − [x_1..x_{k+2}]⁻¹)⁻¹`.
pub fn f_direct(xs: &[ConeElement], k: usize) -> Result<SymMatrix> {
    let seq = UnitFraction::new(xs.to_vec())?;
    check_closed_depth(&seq, k, 1, k + 2)?;
    let inv: Vec<SymMatrix> = (k..=k + 2)
        .map(|j| Ok(seq.bracket(j)?.inverse()?.into_sym()))
        .collect::<Result<_>>()?;
    let first = sym_inverse(&(&inv[0] - &inv[1]))?;
    let second = sym_inverse(&(&inv[1] - &inv[2]))?;
    Ok(&first + &second)
}

/// The inner vector `H` of `u_k`:
///
/// ```text
/// H = e + Σ_{i=0}^{k−3} (−1)^{i+1} [Π_{j=0}^{i} π*(x_{k−j}) P((e + [x_{k−j}..x_k])⁻¹)] (e + [x_{k−i}..x_k])
/// ```
///
/// `suffix[i − 1]` must hold `[x_i..x_k]`. Certified in the cone.
fn h_from_suffixes(seq: &UnitFraction, k: usize, suffix: &[ConeElement]) -> Result<ConeElement> {
    let r = seq.r();
    let shifted = |i: usize| suffix[i - 1].add_identity();
    let mut h = SymMatrix::identity(r);
    for i in 0..k.saturating_sub(2) {
        let mut v = shifted(k - i).into_sym();
        for j in (0..=i).rev() {
            let inv = shifted(k - j).inverse()?;
            v = quad_rep_apply(&inv, &v)?;
            v = seq.factor(k - j).apply(&v, PiMode::Star)?;
        }
        h = if i % 2 == 0 { &h - &v } else { &h + &v };
    }
    ConeElement::certify(h).map_err(|e| match e {
        ConeError::NotInCone { min_eig } => ConeError::LeftCone {
            what: "H",
            index: k,
            min_eig,
        },
        other => other,
    })
}

/// `u_k = e + π*(x_{k+1})(H)`, valid for `k ≥ 2` (empty sum at `k = 2`).
fn u_from_suffixes(
    seq: &UnitFraction,
    k: usize,
    suffix: &[ConeElement],
) -> Result<(ConeElement, ConeElement)> {
    let h = h_from_suffixes(seq, k, suffix)?;
    let u = seq.factor(k + 1).apply(&h, PiMode::Star)?.add_identity();
    Ok((ConeElement::certify(u)?, h))
}

/// `H` for `x_1, …, x_k` (needs `k ≥ 3`).
pub fn h_vector(xs: &[ConeElement], k: usize) -> Result<ConeElement> {
    let seq = UnitFraction::new(xs.to_vec())?;
    check_closed_depth(&seq, k, 3, k)?;
    h_from_suffixes(&seq, k, &seq.suffixes(k)?)
}

/// `u_k(x_1, …, x_{k+1})` (needs `k ≥ 3`).
pub fn u_vec(xs: &[ConeElement], k: usize) -> Result<ConeElement> {
    let seq = UnitFraction::new(xs.to_vec())?;
    check_closed_depth(&seq, k, 3, k + 1)?;
    Ok(u_from_suffixes(&seq, k, &seq.suffixes(k)?)?.0)
}

/// Closed form of `F_k`.
pub fn f_closed(xs: &[ConeElement], k: usize) -> Result<SymMatrix> {
    let seq = UnitFraction::new(xs.to_vec())?;
    check_closed_depth(&seq, k, 1, k + 2)?;
    let e = SymMatrix::identity(seq.r());
    let star_inv = PiMode::StarInv;
    if k == 1 {
        return OpChain::new()
            .pi(seq.factor(1), PiMode::Plain)
            .pi(seq.factor(2), star_inv)
            .pi(seq.factor(3), star_inv)
            .apply(&e);
    }
    let suffix = seq.suffixes(k)?;
    let mut chain = OpChain::new().pi(seq.factor(1), PiMode::Plain);
    // suffix[i] = [x_{i+1}..x_k]
    for (i, tail) in suffix.iter().enumerate().take(k).skip(2) {
        chain = chain
            .pi(seq.factor(i), star_inv)
            .quad(tail.add_identity().into_sym());
    }
    let (u, _) = u_from_suffixes(&seq, k, &suffix)?;
    chain = chain
        .pi(seq.factor(k), star_inv)
        .pi(seq.factor(k + 1), star_inv)
        .quad(u.into_sym())
        .pi(seq.factor(k + 2), star_inv);
    let v = chain.apply(&e)?;
    Ok(if k % 2 == 1 { v } else { -v })
}

/// `Q_k`:
///
/// ```text
/// Q_k = [Π_{i=1}^{k−1} π*⁻¹(x_i) P(e + [x_{i+1}..x_k])] π*⁻¹(x_k) π*⁻¹(x_{k+1}) P(u_{k+1}(e, x_1, …, x_{k+1}))
/// ```
///
/// Needs `k ≥ 2` and `x_1, …, x_{k+1}`.
pub fn q_operator(seq: &UnitFraction, k: usize) -> Result<OpChain> {
    check_closed_depth(seq, k, 2, k + 1)?;
    let star_inv = PiMode::StarInv;
    let suffix = seq.suffixes(k)?;
    let mut chain = OpChain::new();
    for (i, tail) in suffix.iter().enumerate().take(k).skip(1) {
        chain = chain
            .pi(seq.factor(i), star_inv)
            .quad(tail.add_identity().into_sym());
    }
    // u_{k+1} over z = (e, x_1, …, x_{k+1}); its brackets end at z_{k+1} = x_k
    let z = seq.with_leading_identity();
    let z_suffix = z.suffixes(k + 1)?;
    let (u, _) = u_from_suffixes(&z, k + 1, &z_suffix)?;
    Ok(chain
        .pi(seq.factor(k), star_inv)
        .pi(seq.factor(k + 1), star_inv)
        .quad(u.into_sym()))
}

/// `Q_k(v)`, or `Q_k*(v)` when `adjoint` is set.
pub fn q_apply(xs: &[ConeElement], k: usize, v: &ConeElement, adjoint: bool) -> Result<SymMatrix> {
    let seq = UnitFraction::new(xs.to_vec())?;
    let q = q_operator(&seq, k)?;
    if adjoint {
        q.adjoint().apply(v)
    } else {
        q.apply(v)
    }
}
