use crate::division::{cholesky, PiMode, TriangularFactor};
use crate::error::{ConeError, Result};
use crate::jordan::{ConeElement, SymMatrix};

/// The non-ordinary unit fraction `[x_1, …, x_k]` over a prefactored
/// sequence:
///
/// ```text
/// [x_1] = x_1,    [x_1, …, x_k] = π(x_1)(e + [x_2, …, x_k])⁻¹
/// ```
#[derive(Clone, Debug)]
pub struct UnitFraction {
    xs: Vec<ConeElement>,
    factors: Vec<TriangularFactor>,
}

impl UnitFraction {
    pub fn new(xs: Vec<ConeElement>) -> Result<Self> {
        let Some(first) = xs.first() else {
            return Err(ConeError::Domain("empty sequence".into()));
        };
        let r = first.r();
        if let Some(bad) = xs.iter().find(|x| x.r() != r) {
            return Err(ConeError::DimensionMismatch {
                left: r,
                right: bad.r(),
            });
        }
        let factors = xs.iter().map(cholesky).collect::<Result<_>>()?;
        Ok(UnitFraction { xs, factors })
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

    /// `x_i`, 1-based.
    pub fn x(&self, i: usize) -> &ConeElement {
        &self.xs[i - 1]
    }

    /// Cholesky factor of `x_i`, 1-based.
    pub fn factor(&self, i: usize) -> &TriangularFactor {
        &self.factors[i - 1]
    }

    pub fn elements(&self) -> &[ConeElement] {
        &self.xs
    }

    /// `(e, x_1, x_2, …)`.
    pub fn with_leading_identity(&self) -> UnitFraction {
        let r = self.r();
        let mut xs = Vec::with_capacity(self.len() + 1);
        xs.push(ConeElement::identity(r));
        xs.extend(self.xs.iter().cloned());
        let mut factors = Vec::with_capacity(self.len() + 1);
        factors.push(TriangularFactor::identity(r));
        factors.extend(self.factors.iter().cloned());
        UnitFraction { xs, factors }
    }

    pub(crate) fn check_depth(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            return Err(ConeError::OutOfRange {
                index: k,
                max: self.len(),
            });
        }
        Ok(())
    }

    /// One level of the recursion: `π(x_i)(e + inner)⁻¹`.
    fn step(&self, i: usize, inner: &ConeElement) -> Result<ConeElement> {
        let inv = inner.add_identity().inverse()?;
        let out = self.factor(i).apply(&inv, PiMode::Plain)?;
        ConeElement::certify(out).map_err(|e| match e {
            ConeError::NotInCone { min_eig } => ConeError::LeftCone {
                what: "bracket",
                index: i,
                min_eig,
            },
            other => other,
        })
    }

    /// `[x_from, …, x_to]`.
    pub fn span(&self, from: usize, to: usize) -> Result<ConeElement> {
        self.check_depth(to)?;
        if from == 0 || from > to {
            return Err(ConeError::OutOfRange {
                index: from,
                max: to,
            });
        }
        let mut acc = self.x(to).clone();
        for i in (from..to).rev() {
            acc = self.step(i, &acc)?;
        }
        Ok(acc)
    }

    /// `[x_1, …, x_k]`.
    pub fn bracket(&self, k: usize) -> Result<ConeElement> {
        self.span(1, k)
    }

    /// All suffixes ending at `k`: element `i − 1` is `[x_i, …, x_k]`.
    pub fn suffixes(&self, k: usize) -> Result<Vec<ConeElement>> {
        self.check_depth(k)?;
        let mut out = vec![self.x(k).clone()];
        for i in (1..k).rev() {
            let next = self.step(i, out.last().expect("non-empty"))?;
            out.push(next);
        }
        out.reverse();
        Ok(out)
    }

    /// `[x_1, …, x_k]` for `k = 1..=n`.
    pub fn brackets(&self, n: usize) -> Result<Vec<ConeElement>> {
        (1..=n).map(|k| self.bracket(k)).collect()
    }

    /// Signed differences `(−1)^{k+1}([x_1..x_k] − [x_1..x_{k+1}])` for
    /// `k = 1..n`, uncertified.
    pub fn w_raw(&self, brackets: &[ConeElement]) -> Vec<SymMatrix> {
        brackets
            .windows(2)
            .enumerate()
            .map(|(i, pair)| {
                let d = pair[0].as_sym() - pair[1].as_sym();
                if i % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .collect()
    }

    /// `(w_1, …, w_{n−1})`, each certified in the cone.
    pub fn w_seq(&self, n: usize) -> Result<Vec<ConeElement>> {
        if n < 2 {
            return Err(ConeError::Domain("w sequence needs depth >= 2".into()));
        }
        self.check_depth(n)?;
        let brackets = self.brackets(n)?;
        let ws = self
            .w_raw(&brackets)
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                ConeElement::certify(w).map_err(|e| match e {
                    ConeError::NotInCone { min_eig } => ConeError::LeftCone {
                        what: "w_k",
                        index: i + 1,
                        min_eig,
                    },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        debug_assert!({
            // [x_1..x_n] = x_1 + Σ (−1)^k w_k
            let mut s = self.x(1).as_sym().clone();
            for (i, w) in ws.iter().enumerate() {
                s = if i % 2 == 0 { &s - w } else { &s + w };
            }
            let d = crate::jordan::frob_norm(&(&s - &brackets[n - 1]));
            d <= 1e-10 * (1.0 + crate::jordan::frob_norm(&brackets[n - 1]))
        });
        Ok(ws)
    }
}

/// `[x_1, …, x_k]`.
pub fn bracket(xs: &[ConeElement], k: usize) -> Result<ConeElement> {
    if k == 0 || k > xs.len() {
        return Err(ConeError::OutOfRange {
            index: k,
            max: xs.len(),
        });
    }
    UnitFraction::new(xs[..k].to_vec())?.bracket(k)
}

/// `(w_1, …, w_{n−1})`.
pub fn w_seq(xs: &[ConeElement], n: usize) -> Result<Vec<ConeElement>> {
    if n > xs.len() {
        return Err(ConeError::OutOfRange {
            index: n,
            max: xs.len(),
        });
    }
    UnitFraction::new(xs[..n].to_vec())?.w_seq(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scalars(v: &[f64]) -> Vec<ConeElement> {
        v.iter().map(|&s| ConeElement::scalar(s).unwrap()).collect()
    }

    #[test]
    fn bracket_examples() {
        let xs = scalars(&[2.0, 3.0, 1.0]);
        assert_eq!(bracket(&xs, 1).unwrap().get(0, 0), 2.0);
        assert_abs_diff_eq!(bracket(&xs, 2).unwrap().get(0, 0), 0.5, epsilon = 1e-15);
        let ones = scalars(&[1.0; 3]);
        assert_abs_diff_eq!(
            bracket(&ones, 3).unwrap().get(0, 0),
            2.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bracket_depth_out_of_range() {
        let xs = scalars(&[1.0; 3]);
        assert!(matches!(bracket(&xs, 0), Err(ConeError::OutOfRange { .. })));
        assert!(matches!(bracket(&xs, 4), Err(ConeError::OutOfRange { .. })));
    }

    #[test]
    fn w_examples() {
        let ones = scalars(&[1.0; 6]);
        let ws = w_seq(&ones, 6).unwrap();
        let expect = [0.5, 1.0 / 6.0, 1.0 / 15.0, 1.0 / 40.0, 1.0 / 104.0];
        for (w, e) in ws.iter().zip(expect) {
            assert_abs_diff_eq!(w.get(0, 0), e, epsilon = 1e-14);
        }
        assert!(ws.windows(2).all(|p| p[0].get(0, 0) > p[1].get(0, 0)));

        let twos = scalars(&[2.0, 2.0]);
        let ws = w_seq(&twos, 2).unwrap();
        assert_abs_diff_eq!(ws[0].get(0, 0), 4.0 / 3.0, epsilon = 1e-14);
        assert!(w_seq(&twos, 1).is_err());
    }

    #[test]
    fn suffixes_agree_with_spans() {
        let xs = scalars(&[1.5, 0.3, 2.0, 4.0, 0.7]);
        let f = UnitFraction::new(xs).unwrap();
        let s = f.suffixes(4).unwrap();
        for i in 1..=4 {
            assert_eq!(s[i - 1], f.span(i, 4).unwrap());
        }
    }

    #[test]
    fn mixed_ranks_rejected() {
        let xs = vec![ConeElement::identity(2), ConeElement::identity(3)];
        assert!(matches!(
            UnitFraction::new(xs),
            Err(ConeError::DimensionMismatch { .. })
        ));
        assert!(UnitFraction::new(vec![]).is_err());
    }
}
