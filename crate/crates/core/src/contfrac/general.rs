use serde::{Deserialize, Serialize};

use crate::division::{cholesky, PiMode, TriangularFactor};
use crate::error::{ConeError, Result};
use crate::jordan::{ConeElement, SymMatrix};

/// `y_0 + [x_1/y_1, x_2/y_2, …]`. A missing `ys` means `y_n = e` for all
/// `n ≥ 1`; a missing head means `y_0 = 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SequenceFile")]
pub struct CfSequence {
    head: Option<ConeElement>,
    xs: Vec<ConeElement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ys: Option<Vec<ConeElement>>,
}

#[derive(Deserialize)]
struct SequenceFile {
    #[serde(default)]
    head: Option<ConeElement>,
    xs: Vec<ConeElement>,
    #[serde(default)]
    ys: Option<Vec<ConeElement>>,
}

impl TryFrom<SequenceFile> for CfSequence {
    type Error = ConeError;
    fn try_from(f: SequenceFile) -> Result<Self> {
        CfSequence::new(f.head, f.xs, f.ys)
    }
}

impl CfSequence {
    pub fn new(
        head: Option<ConeElement>,
        xs: Vec<ConeElement>,
        ys: Option<Vec<ConeElement>>,
    ) -> Result<Self> {
        let Some(first) = xs.first() else {
            return Err(ConeError::Domain("xs must be non-empty".into()));
        };
        let r = first.r();
        let mut all = xs.iter().chain(head.iter());
        if let Some(ys) = &ys {
            if ys.len() != xs.len() {
                return Err(ConeError::Domain(format!(
                    "{} partial numerators but {} denominators",
                    xs.len(),
                    ys.len()
                )));
            }
            if let Some(bad) = ys.iter().find(|y| y.r() != r) {
                return Err(ConeError::DimensionMismatch {
                    left: r,
                    right: bad.r(),
                });
            }
        }
        if let Some(bad) = all.find(|x| x.r() != r) {
            return Err(ConeError::DimensionMismatch {
                left: r,
                right: bad.r(),
            });
        }
        Ok(CfSequence { head, xs, ys })
    }

    /// `K(x_n / e)` without head.
    pub fn unit(xs: Vec<ConeElement>) -> Result<Self> {
        Self::new(None, xs, None)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn r(&self) -> usize {
        self.xs[0].r()
    }

    /// No head and unit denominators, i.e. a unit fraction `[x_1, …]`.
    pub fn is_unit(&self) -> bool {
        self.head.is_none() && self.ys.is_none()
    }

    pub fn head(&self) -> Option<&ConeElement> {
        self.head.as_ref()
    }

    pub fn xs(&self) -> &[ConeElement] {
        &self.xs
    }

    /// `x_i`, 1-based.
    pub fn x(&self, i: usize) -> &ConeElement {
        &self.xs[i - 1]
    }

    /// `y_i`, 1-based; `e` for unit denominators.
    pub fn y(&self, i: usize) -> ConeElement {
        match &self.ys {
            Some(ys) => ys[i - 1].clone(),
            None => ConeElement::identity(self.r()),
        }
    }

    fn head_sym(&self) -> SymMatrix {
        self.head
            .as_ref()
            .map_or_else(|| SymMatrix::zeros(self.r()), |h| h.as_sym().clone())
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(ConeError::OutOfRange {
                index: n,
                max: self.len(),
            });
        }
        Ok(())
    }

    fn factors(&self, n: usize) -> Result<Vec<TriangularFactor>> {
        self.xs[..n].iter().map(cholesky).collect()
    }
}

fn certify_at(m: SymMatrix, what: &'static str, index: usize) -> Result<ConeElement> {
    ConeElement::certify(m).map_err(|e| match e {
        ConeError::NotInCone { min_eig } => ConeError::LeftCone {
            what,
            index,
            min_eig,
        },
        other => other,
    })
}

/// Tail of the `n`-th convergent without head, from already computed factors.
fn general_tail(seq: &CfSequence, factors: &[TriangularFactor], n: usize) -> Result<ConeElement> {
    let q = factors[n - 1].apply(&seq.y(n), PiMode::StarInv)?;
    let mut acc = certify_at(q, "cf_general", n)?.inverse()?;
    for j in (1..n).rev() {
        let denom = certify_at(seq.y(j).as_sym() + acc.as_sym(), "cf_general", j)?;
        let v = factors[j - 1].apply(denom.inverse()?.as_sym(), PiMode::Plain)?;
        acc = certify_at(v, "cf_general", j)?;
    }
    Ok(acc)
}

/// The `n`-th convergent `R_n = y_0 + [x_1/y_1, …, x_n/y_n]`, evaluated
/// tail first.
pub fn cf_general(seq: &CfSequence, n: usize) -> Result<SymMatrix> {
    seq.check_depth(n)?;
    let factors = seq.factors(n)?;
    Ok(&seq.head_sym() + general_tail(seq, &factors, n)?.as_sym())
}

/// `R_1, …, R_n`.
pub fn cf_general_convergents(seq: &CfSequence, n: usize) -> Result<Vec<SymMatrix>> {
    seq.check_depth(n)?;
    let factors = seq.factors(n)?;
    let head = seq.head_sym();
    (1..=n)
        .map(|k| Ok(&head + general_tail(seq, &factors, k)?.as_sym()))
        .collect()
}

/// Ordinary continued fraction `y_0 + (a_1 + (a_2 + … + a_n⁻¹)⁻¹ … )⁻¹`,
/// built from additions and inversions only.
pub fn cf_ordinary(head: Option<&SymMatrix>, a: &[ConeElement], n: usize) -> Result<SymMatrix> {
    if n == 0 || n > a.len() {
        return Err(ConeError::OutOfRange {
            index: n,
            max: a.len(),
        });
    }
    let mut acc = a[n - 1].inverse()?;
    for j in (1..n).rev() {
        let denom = certify_at(a[j - 1].as_sym() + acc.as_sym(), "cf_ordinary", j)?;
        acc = denom.inverse()?;
    }
    Ok(match head {
        Some(h) => {
            h.check_same(&acc)?;
            h + acc.as_sym()
        }
        None => acc.into_sym(),
    })
}

/// `K(e / a_n)` equivalent to a general continued fraction.
#[derive(Clone, Debug)]
pub struct OrdinaryForm {
    /// `y_0`, or zero.
    pub a0: SymMatrix,
    /// `a_1, a_2, …`
    pub terms: Vec<ConeElement>,
}

impl OrdinaryForm {
    pub fn convergent(&self, n: usize) -> Result<SymMatrix> {
        cf_ordinary(Some(&self.a0), &self.terms, n)
    }
}

/// Partial denominators of the equivalent ordinary fraction:
///
/// ```text
/// a_{2k}   = π(x_1) π*⁻¹(x_2) … π(x_{2k−1}) π*⁻¹(x_{2k}) y_{2k}
/// a_{2k+1} = π*⁻¹(x_1) π(x_2) … π(x_{2k}) π*⁻¹(x_{2k+1}) y_{2k+1}
/// ```
///
/// The prefix acting on `a_k` is the inverse-adjoint of the prefix acting on
/// `a_{k−1}` (which swaps `π` and `π*⁻¹`), extended by `π(x_{k−1})`.
pub fn to_ordinary(seq: &CfSequence) -> Result<OrdinaryForm> {
    let factors = seq.factors(seq.len())?;
    let mut prefix: Vec<(usize, PiMode)> = Vec::with_capacity(seq.len());
    let mut terms = Vec::with_capacity(seq.len());
    for k in 1..=seq.len() {
        let mut v = factors[k - 1].apply(&seq.y(k), PiMode::StarInv)?;
        for &(i, mode) in prefix.iter().rev() {
            v = factors[i - 1].apply(&v, mode)?;
        }
        terms.push(certify_at(v, "to_ordinary", k)?);
        for op in prefix.iter_mut() {
            op.1 = op.1.inverse_adjoint();
        }
        prefix.push((k, PiMode::Plain));
    }
    Ok(OrdinaryForm {
        a0: seq.head_sym(),
        terms,
    })
}
