use nalgebra::DMatrix;

use super::{solve_from_gain, solve_output_feedback_lqr, LqrWeights, StateSpace, SynthesisOptions, SynthesisResult};
use crate::{Error, Result};

/// One σ value of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub sigma: f64,
    pub outcome: std::result::Result<SynthesisResult, String>,
}

impl SweepPoint {
    pub fn result(&self) -> Option<&SynthesisResult> {
        self.outcome.as_ref().ok()
    }
}

/// 20 log-spaced values over `[1e-6, 8e-5]`.
pub fn default_sigma_grid() -> Vec<f64> {
    log_space(1e-6, 8e-5, 20)
}

pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Solves the synthesis for each σ in order, warm-starting from the previous
/// gain. A failure at one σ is recorded and does not stop the sweep.
pub fn sigma_sweep(
    model: &StateSpace,
    base: &LqrWeights,
    sigmas: &[f64],
    opts: &SynthesisOptions,
) -> Result<Vec<SweepPoint>> {
    if sigmas.is_empty() {
        return Err(Error::param("sigmas", "must not be empty"));
    }
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::param("sigmas", format!("must be finite and > 0, got {s}")));
    }
    let mut out: Vec<SweepPoint> = Vec::with_capacity(sigmas.len());
    let mut warm: Option<DMatrix<f64>> = None;
    for &sigma in sigmas {
        if let Some(prev) = out.last().filter(|p| p.sigma == sigma) {
            out.push(prev.clone());
            continue;
        }
        let weights = base.with_sigma(sigma);
        let res = match &warm {
            Some(f) => solve_from_gain(model, &weights, f, opts),
            None => solve_output_feedback_lqr(model, &weights, opts),
        };
        let res = match res {
            Err(e) if e.is_validation() => return Err(e),
            other => other,
        };
        if let Ok(r) = &res {
            if r.feasible {
                warm = Some(r.f.clone());
            }
        }
        out.push(SweepPoint {
            sigma,
            outcome: res.map_err(|e| e.to_string()),
        });
    }
    Ok(out)
}
