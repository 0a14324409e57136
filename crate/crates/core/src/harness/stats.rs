//! Estimates with standard errors and pass/fail verdicts.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub estimate: f64,
    /// `None` when fewer than two replicas contributed.
    pub se: Option<f64>,
    pub replicas: u64,
    /// Success count for Bernoulli tallies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub successes: Option<u64>,
}

impl EstimateWithError {
    /// Frequency `k/n` with the binomial standard error.
    pub fn bernoulli(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            estimate: p,
            se: (trials > 1).then(|| (p * (1.0 - p) / trials as f64).sqrt()),
            replicas: trials,
            successes: Some(successes),
        }
    }

    /// Sample mean with `sd / √n`.
    pub fn mean_of(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let se = (samples.len() > 1).then(|| {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        });
        Self {
            estimate: mean,
            se,
            replicas: samples.len() as u64,
            successes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    /// A yes/no property check.
    pub fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Self {
            name: name.into(),
            pass,
            estimate: None,
            se: None,
            replicas: None,
            theory: None,
            slack: None,
            z: None,
            detail: (!detail.is_empty()).then_some(detail),
        }
    }

    /// A value checked against a closed range.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let mut v = Self::check(name, lo <= value && value <= hi, format!("{} in [{}, {}]", num(value), num(lo), num(hi)));
        v.estimate = Some(value);
        v
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let d = detail.into();
        self.detail = Some(match self.detail.take() {
            Some(old) => format!("{old}; {d}"),
            None => d,
        });
        self
    }

    pub fn line(&self) -> String {
        let mut s = format!("{} {}", if self.pass { "PASS" } else { "FAIL" }, self.name);
        if let (Some(e), Some(t)) = (self.estimate, self.theory) {
            s.push_str(&format!(": {e:.6}"));
            if let Some(se) = self.se {
                s.push_str(&format!(" ± {se:.6}"));
            }
            s.push_str(&format!(" vs {t:.6}"));
            if let Some(z) = self.z {
                s.push_str(&format!(" (z = {z:.2})"));
            }
        }
        if let Some(d) = &self.detail {
            s.push_str(&format!(" [{d}]"));
        }
        s
    }
}

/// Compact rendering: scientific notation for tiny magnitudes.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.is_finite() && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else if x.is_finite() && x.fract() != 0.0 {
        format!("{x:.6}")
    } else {
        format!("{x}")
    }
}

/// Pass iff `|estimate - theory| ≤ 3·SE + slack`. Without an SE only the
/// slack counts.
pub fn compare(name: impl Into<String>, est: &EstimateWithError, theory: f64, slack: f64) -> Verdict {
    let diff = (est.estimate - theory).abs();
    let band = 3.0 * est.se.unwrap_or(0.0) + slack;
    Verdict {
        name: name.into(),
        pass: diff <= band,
        estimate: Some(est.estimate),
        se: est.se,
        replicas: Some(est.replicas),
        theory: Some(theory),
        slack: Some(slack),
        z: est.se.filter(|s| *s > 0.0).map(|s| diff / s),
        detail: None,
    }
}

/// Pearson chi-square goodness of fit; returns `(statistic, p-value)`.
/// Cells with zero expected count must have zero observed count.
pub fn chi_square(observed: &[u64], expected_probs: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != expected_probs.len() || observed.len() < 2 {
        return Err(Error::Domain("chi-square needs matching cells, at least two".into()));
    }
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = p * n as f64;
        if e == 0.0 {
            if o > 0 {
                return Ok((f64::INFINITY, 0.0));
            }
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let df = (cells - 1) as f64;
    let dist = ChiSquared::new(df).map_err(|e| Error::Domain(e.to_string()))?;
    Ok((stat, dist.sf(stat)))
}
