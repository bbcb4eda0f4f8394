use std::io::Write;

use super::general::{cf_general_convergents, CfSequence};
use super::unit::UnitFraction;
use crate::error::Result;
use crate::io::fmt_f64;
use crate::jordan::{cone_margin, frob_norm, SymMatrix};

#[derive(Clone, Debug)]
pub struct TraceRecord {
    pub k: usize,
    /// `R_k`.
    pub value: SymMatrix,
    pub w: Option<SymMatrix>,
    /// `‖R_{k+1} − R_k‖`, absent for the last record.
    pub delta_norm: Option<f64>,
}

/// Convergents of one continued fraction, indexed from 1.
#[derive(Clone, Debug, Default)]
pub struct ConvergentTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergentTrace {
    fn from_values(values: Vec<SymMatrix>, with_w: bool) -> Self {
        let n = values.len();
        let mut records = Vec::with_capacity(n);
        for (idx, value) in values.iter().enumerate() {
            let next = values.get(idx + 1);
            let diff = next.map(|nx| value - nx);
            let delta_norm = diff.as_ref().map(frob_norm);
            let w = if with_w {
                diff.map(|d| if idx % 2 == 0 { d } else { -d })
            } else {
                None
            };
            records.push(TraceRecord {
                k: idx + 1,
                value: value.clone(),
                w,
                delta_norm,
            });
        }
        ConvergentTrace { records }
    }

    /// `[x_1..x_k]` for `k = 1..=n`, with `w_k`.
    pub fn for_unit(seq: &UnitFraction, n: usize) -> Result<Self> {
        let values = seq.brackets(n)?.into_iter().map(|b| b.into_sym()).collect();
        Ok(Self::from_values(values, true))
    }

    pub fn for_general(seq: &CfSequence, n: usize) -> Result<Self> {
        Ok(Self::from_values(cf_general_convergents(seq, n)?, false))
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// CSV with columns `k,delta_norm,wk_norm,in_cone_margin`. The margin is
    /// that of `w_k` when present, else of `R_k`; missing values are empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,delta_norm,wk_norm,in_cone_margin")?;
        for rec in &self.records {
            let margin_of = rec.w.as_ref().unwrap_or(&rec.value);
            let margin = cone_margin(margin_of)?;
            writeln!(
                out,
                "{},{},{},{}",
                rec.k,
                rec.delta_norm.map(fmt_f64).unwrap_or_default(),
                rec.w
                    .as_ref()
                    .map(|w| fmt_f64(frob_norm(w)))
                    .unwrap_or_default(),
                fmt_f64(margin)
            )?;
        }
        Ok(())
    }
}
