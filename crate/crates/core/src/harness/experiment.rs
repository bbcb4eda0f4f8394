use std::io::Write;

use serde::Serialize;

use crate::contfrac::UnitFraction;
use crate::error::{ConeError, Result};
use crate::exec::Execution;
use crate::io::fmt_f64;
use crate::jordan::{frob_norm, min_eigenvalue, ConeElement, SymMatrix};
use crate::randmat::{sample_beta2, Beta2Params, RngStream};
use crate::tol::ASSERT_TOL;

pub const SCHEMA: &str = "cone-cf/1";

/// Law of one partial numerator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum InputLaw {
    Beta2 {
        p: f64,
        q: f64,
    },
    /// The constant `e`.
    Identity,
}

impl InputLaw {
    fn draw(&self, r: usize, rng: &mut RngStream) -> Result<ConeElement> {
        match *self {
            InputLaw::Beta2 { p, q } => sample_beta2(&Beta2Params::new(p, q, r)?, rng),
            InputLaw::Identity => Ok(ConeElement::identity(r)),
        }
    }
}

/// `x_i` has law `laws[(i − 1) % laws.len()]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub rank: usize,
    pub laws: Vec<InputLaw>,
    pub trials: usize,
    pub depth: usize,
    pub seed: u64,
    pub cauchy_eps: f64,
}

impl ExperimentConfig {
    /// Odd indices `β(b, a)`, even indices `β(b, a′)`, repeated with the
    /// given period (2 gives a strict alternation).
    #[allow(clippy::too_many_arguments)]
    pub fn alternating(
        rank: usize,
        b: f64,
        a: f64,
        a_prime: f64,
        period: usize,
        trials: usize,
        depth: usize,
        seed: u64,
        cauchy_eps: f64,
    ) -> Result<Self> {
        let laws = (0..period)
            .map(|i| InputLaw::Beta2 {
                p: b,
                q: if i % 2 == 0 { a } else { a_prime },
            })
            .collect();
        let cfg = ExperimentConfig {
            rank,
            laws,
            trials,
            depth,
            seed,
            cauchy_eps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.laws.is_empty() {
            return Err(ConeError::Domain("period must be at least 1".into()));
        }
        for law in &self.laws {
            if let InputLaw::Beta2 { p, q } = law {
                Beta2Params::new(*p, *q, self.rank)?;
            }
        }
        if self.rank == 0 {
            return Err(ConeError::Domain("rank must be at least 1".into()));
        }
        if self.depth < 4 {
            return Err(ConeError::Domain("depth must be at least 4".into()));
        }
        if self.trials == 0 {
            return Err(ConeError::Domain("trials must be at least 1".into()));
        }
        if self.cauchy_eps.is_nan() || self.cauchy_eps <= 0.0 {
            return Err(ConeError::Domain("eps must be positive".into()));
        }
        Ok(())
    }

    fn law(&self, i: usize) -> &InputLaw {
        &self.laws[(i - 1) % self.laws.len()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub trial_id: usize,
    pub converged: bool,
    pub first_cauchy_k: Option<usize>,
    /// `delta_norm(depth − 1)`.
    pub final_delta: f64,
    /// `k` with `w_k − w_{k+1}` outside the closed cone at `ASSERT_TOL`.
    pub monotonicity_violations: usize,
    /// `k` with `w_k` outside the closed cone at `ASSERT_TOL`.
    pub sign_violations: usize,
    /// Largest normalized negative margin over both checks, or 0.
    pub max_violation: f64,
    /// `delta_norm(k)` for `k = 1..depth−1`.
    pub delta_norm: Vec<f64>,
    /// `λ_min(w_k)` for `k = 1..depth−1`.
    pub wk_min_eig: Vec<f64>,
    pub error: Option<String>,
}

fn negative_margin(m: &SymMatrix) -> Result<f64> {
    Ok((-min_eigenvalue(m)? / (1.0 + frob_norm(m))).max(0.0))
}

fn run_trial_inner(cfg: &ExperimentConfig, trial_id: usize) -> Result<TrialResult> {
    let mut rng = RngStream::new(cfg.seed).split(trial_id as u64);
    let xs = (1..=cfg.depth)
        .map(|i| cfg.law(i).draw(cfg.rank, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let seq = UnitFraction::new(xs)?;
    let brackets = seq.brackets(cfg.depth)?;
    let ws = seq.w_raw(&brackets);

    let delta_norm: Vec<f64> = ws.iter().map(frob_norm).collect();
    let wk_min_eig = ws.iter().map(min_eigenvalue).collect::<Result<Vec<_>>>()?;

    let mut max_violation: f64 = 0.0;
    let mut sign_violations = 0;
    for w in &ws {
        let v = negative_margin(w)?;
        if v > ASSERT_TOL {
            sign_violations += 1;
        }
        max_violation = max_violation.max(v);
    }
    let mut monotonicity_violations = 0;
    for pair in ws.windows(2) {
        let v = negative_margin(&(&pair[0] - &pair[1]))?;
        if v > ASSERT_TOL {
            monotonicity_violations += 1;
        }
        max_violation = max_violation.max(v);
    }

    let tail_ok = delta_norm
        .iter()
        .rev()
        .take_while(|&&d| d < cfg.cauchy_eps)
        .count();
    let first_cauchy_k = (tail_ok > 0).then(|| delta_norm.len() - tail_ok + 1);

    Ok(TrialResult {
        trial_id,
        converged: first_cauchy_k.is_some(),
        first_cauchy_k,
        final_delta: *delta_norm.last().expect("depth >= 4"),
        monotonicity_violations,
        sign_violations,
        max_violation,
        delta_norm,
        wk_min_eig,
        error: None,
    })
}

/// One trial on stream `split(seed, trial_id)`. Evaluation failures are
/// recorded in `error` rather than returned.
pub fn run_trial(cfg: &ExperimentConfig, trial_id: usize) -> TrialResult {
    run_trial_inner(cfg, trial_id).unwrap_or_else(|e| TrialResult {
        trial_id,
        converged: false,
        first_cauchy_k: None,
        final_delta: f64::NAN,
        monotonicity_violations: 0,
        sign_violations: 0,
        max_violation: 0.0,
        delta_norm: Vec::new(),
        wk_min_eig: Vec::new(),
        error: Some(e.to_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub schema: &'static str,
    pub config: ExperimentConfig,
    pub fraction_converged: f64,
    pub median_first_cauchy_k: Option<f64>,
    pub max_monotonicity_violation: f64,
    pub monotonicity_violations: usize,
    pub sign_violations: usize,
    pub failed_trials: usize,
    /// Median over successful trials of `delta_norm(k)`, `k = 1..depth−1`.
    pub median_delta_norm: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub summary: ExperimentSummary,
    pub trials: Vec<TrialResult>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

pub fn run_convergence_experiment(
    cfg: &ExperimentConfig,
    exec: Execution,
) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let trials = exec.map_indexed(cfg.trials, |t| run_trial(cfg, t));
    let ok: Vec<&TrialResult> = trials.iter().filter(|t| t.error.is_none()).collect();

    let converged = trials.iter().filter(|t| t.converged).count();
    let median_delta_norm = (0..cfg.depth - 1)
        .filter_map(|k| median(ok.iter().map(|t| t.delta_norm[k]).collect()))
        .collect();
    let summary = ExperimentSummary {
        schema: SCHEMA,
        config: cfg.clone(),
        fraction_converged: converged as f64 / cfg.trials as f64,
        median_first_cauchy_k: median(
            trials
                .iter()
                .filter_map(|t| t.first_cauchy_k.map(|k| k as f64))
                .collect(),
        ),
        max_monotonicity_violation: trials.iter().map(|t| t.max_violation).fold(0.0, f64::max),
        monotonicity_violations: trials.iter().map(|t| t.monotonicity_violations).sum(),
        sign_violations: trials.iter().map(|t| t.sign_violations).sum(),
        failed_trials: trials.len() - ok.len(),
        median_delta_norm,
    };
    Ok(ExperimentOutput { summary, trials })
}

impl ExperimentOutput {
    /// Whether every trial evaluated and no monotonicity or sign violation
    /// occurred.
    pub fn clean(&self) -> bool {
        let s = &self.summary;
        s.failed_trials == 0 && s.monotonicity_violations == 0 && s.sign_violations == 0
    }

    /// Rows `trial,k,delta_norm,wk_min_eig,converged_so_far`, exactly
    /// `trials × (depth − 1)` of them. `converged_so_far` holds from
    /// `first_cauchy_k` on. Failed trials have empty numeric fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "trial,k,delta_norm,wk_min_eig,converged_so_far")?;
        let depth = self.summary.config.depth;
        for t in &self.trials {
            for k in 1..depth {
                let (d, m) = match t.delta_norm.get(k - 1) {
                    Some(&d) => (fmt_f64(d), fmt_f64(t.wk_min_eig[k - 1])),
                    None => (String::new(), String::new()),
                };
                let conv = t.first_cauchy_k.is_some_and(|c| k >= c);
                writeln!(out, "{},{},{},{},{}", t.trial_id, k, d, m, conv)?;
            }
        }
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_cfg(trials: usize, depth: usize) -> ExperimentConfig {
        ExperimentConfig {
            rank: 2,
            laws: vec![InputLaw::Identity],
            trials,
            depth,
            seed: 0,
            cauchy_eps: 1e-6,
        }
    }

    #[test]
    fn constant_input_is_golden() {
        let out = run_convergence_experiment(&constant_cfg(3, 30), Execution::Sequential).unwrap();
        let s = &out.summary;
        assert_eq!(s.fraction_converged, 1.0);
        assert!(out.clean());
        let k = s.median_first_cauchy_k.unwrap();
        assert!(k < 20.0, "{k}");
        // golden-ratio contraction: successive deltas shrink by about φ²
        let d = &s.median_delta_norm;
        for k in 3..20 {
            let ratio = d[k - 1] / d[k];
            assert!((ratio - 2.618).abs() < 0.05, "k={k} ratio={ratio}");
        }
        for k in 3..d.len() {
            assert!(d[k] <= d[k - 1], "median delta increased at k={}", k + 1);
        }
    }

    #[test]
    fn csv_shape() {
        let out = run_convergence_experiment(&constant_cfg(3, 6), Execution::Parallel).unwrap();
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 5);
        assert!(text.starts_with("trial,k,delta_norm,wk_min_eig,converged_so_far\n0,1,"));
    }

    #[test]
    fn config_domain() {
        assert!(ExperimentConfig::alternating(2, 3.0, 3.0, 4.0, 2, 1, 4, 0, 1e-6).is_ok());
        assert!(ExperimentConfig::alternating(2, 3.0, 3.0, 4.0, 2, 1, 3, 0, 1e-6).is_err());
        assert!(ExperimentConfig::alternating(2, 3.0, 3.0, 4.0, 2, 0, 4, 0, 1e-6).is_err());
        assert!(ExperimentConfig::alternating(3, 0.9, 3.0, 4.0, 2, 1, 4, 0, 1e-6).is_err());
        assert!(ExperimentConfig::alternating(2, 3.0, 3.0, 4.0, 0, 1, 4, 0, 1e-6).is_err());
    }

    #[test]
    fn period_pattern() {
        let cfg = ExperimentConfig::alternating(1, 2.0, 3.0, 4.0, 2, 1, 4, 0, 1e-6).unwrap();
        assert_eq!(*cfg.law(1), InputLaw::Beta2 { p: 2.0, q: 3.0 });
        assert_eq!(*cfg.law(2), InputLaw::Beta2 { p: 2.0, q: 4.0 });
        assert_eq!(*cfg.law(3), InputLaw::Beta2 { p: 2.0, q: 3.0 });
    }
}
