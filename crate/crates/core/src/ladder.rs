//! Ascending ladder heights, the residual-lifetime chain and its stationary
//! laws, and the Spitzer series for the mean ladder height.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::increments::{IncrementLaw, PmfBudget, PmfSequence};
use crate::walker::{first_passage_over, WalkOptions};

/// Empirical law of a positive integer variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub counts: BTreeMap<u64, u64>,
    pub total: u64,
}

impl Histogram {
    pub fn from_samples(samples: &[u64]) -> Self {
        let mut h = Self::default();
        for &s in samples {
            h.add(s);
        }
        h
    }

    pub fn add(&mut self, v: u64) {
        *self.counts.entry(v).or_default() += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_default() += c;
        }
        self.total += other.total;
    }

    pub fn freq(&self, v: u64) -> f64 {
        self.counts.get(&v).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn pmf(&self) -> Vec<(u64, f64)> {
        self.counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / self.total as f64))
            .collect()
    }

    /// Sample mean and its standard error.
    pub fn mean_se(&self) -> (f64, f64) {
        let n = self.total as f64;
        let mean = self.counts.iter().map(|(&k, &c)| k as f64 * c as f64).sum::<f64>() / n;
        let var = self
            .counts
            .iter()
            .map(|(&k, &c)| (k as f64 - mean).powi(2) * c as f64)
            .sum::<f64>()
            / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }

    /// Total-variation distance between two empirical laws.
    pub fn total_variation(&self, other: &Histogram) -> f64 {
        let keys: std::collections::BTreeSet<u64> = self.counts.keys().chain(other.counts.keys()).copied().collect();
        0.5 * keys
            .into_iter()
            .map(|k| (self.freq(k) - other.freq(k)).abs())
            .sum::<f64>()
    }
}

/// `count` i.i.d. strict ascending ladder heights.
///
/// Each height is the overshoot of the walk over its current maximum, so the
/// successive heights of one long path are obtained by restarting at the new
/// maximum; translation invariance makes that a first passage over 0 from 0.
pub fn sample_ladder_heights<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    count: usize,
    rng: &mut R,
    opts: WalkOptions,
) -> Result<Vec<u64>> {
    law.ensure_admissible()?;
    (0..count)
        .map(|_| first_passage_over(law, 0, 0, rng, opts).map(|p| p.overshoot))
        .collect()
}

/// Ladder heights of a single stepwise path from 0, in order, up to and
/// including the one that carries the maximum above `level`.
pub fn ladder_heights_until<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    level: i64,
    rng: &mut R,
    step_cap: u64,
) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut pos = 0i64;
    let mut max = 0i64;
    let mut steps = 0u64;
    while max <= level {
        if steps >= step_cap {
            return Err(Error::CapExceeded {
                cap: step_cap,
                steps,
                position: pos,
            });
        }
        pos += law.sample(rng);
        steps += 1;
        if pos > max {
            out.push((pos - max) as u64);
            max = pos;
        }
    }
    Ok(out)
}

/// Residual-lifetime chain `Z_0, …, Z_horizon` with `Z_0 = 1`:
/// `Z_{n+1} = Z_n - 1` if `Z_n ≥ 2`, otherwise a fresh ladder height.
///
/// Driven by the ladder heights of a walk from 0, `Z_n` is the overshoot of
/// level `n - 1`, i.e. `Z_{y+1} = S_{ρ_y} - y`.
pub fn residual_chain<F: FnMut() -> u64>(mut y_sampler: F, horizon: usize) -> Vec<u64> {
    let mut z = Vec::with_capacity(horizon + 1);
    z.push(1u64);
    for n in 0..horizon {
        let next = if z[n] >= 2 {
            z[n] - 1
        } else {
            let y = y_sampler();
            assert!(y >= 1, "ladder heights are positive");
            y
        };
        z.push(next);
    }
    z
}

/// Stationary laws of the residual chain built from a ladder-height pmf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stationary {
    pub mu: f64,
    /// `π_k = P(Y ≥ k)/μ`, for `k = 1, 2, …`.
    pub pi: Vec<(u64, f64)>,
    /// `ψ_k = k P(Y = k)/μ`.
    pub psi: Vec<(u64, f64)>,
    /// Mass missing from the input pmf.
    pub missing_mass: f64,
    /// Set when renormalisation moved more than the tolerance.
    pub renormalised_beyond_tolerance: bool,
}

/// `(π, ψ, μ)` for a pmf on the positive integers.
pub fn stationary_distributions(y_pmf: &[(u64, f64)], tail_tolerance: f64) -> Result<Stationary> {
    if y_pmf.iter().any(|&(k, p)| k == 0 || !(p >= 0.0)) {
        return Err(Error::Domain("ladder-height pmf must live on {1, 2, …} with nonnegative mass".into()));
    }
    let mut pmf: BTreeMap<u64, f64> = BTreeMap::new();
    for &(k, p) in y_pmf {
        *pmf.entry(k).or_default() += p;
    }
    let mass: f64 = pmf.values().sum();
    let mu: f64 = pmf.iter().map(|(&k, &p)| k as f64 * p).sum::<f64>() / mass;
    if !mu.is_finite() || mass == 0.0 {
        return Err(Error::Numeric {
            what: "mean ladder height is not finite".into(),
            estimate: mu,
            error: f64::INFINITY,
        });
    }
    let kmax = *pmf.keys().last().unwrap();
    let mut pi = Vec::with_capacity(kmax as usize);
    let mut tail = mass;
    for k in 1..=kmax {
        pi.push((k, tail / mass / mu));
        tail -= pmf.get(&k).copied().unwrap_or(0.0);
    }
    let psi: Vec<(u64, f64)> = pmf.iter().map(|(&k, &p)| (k, k as f64 * p / mass / mu)).collect();
    let missing = (1.0 - mass).max(0.0);
    Ok(Stationary {
        mu,
        pi,
        psi,
        missing_mass: missing,
        renormalised_beyond_tolerance: (1.0 - mass).abs() > tail_tolerance,
    })
}

/// Standard errors of `π_k` estimated from ladder-height counts, by the
/// delta method for the ratio `mean(1{Y ≥ k}) / mean(Y)`.
pub fn pi_standard_errors(h: &Histogram) -> Vec<(u64, f64)> {
    let n = h.total as f64;
    let (mu, _) = h.mean_se();
    let kmax = h.counts.keys().last().copied().unwrap_or(0);
    (1..=kmax)
        .map(|k| {
            let pk = h.counts.range(k..).map(|(_, &c)| c as f64).sum::<f64>() / n / mu;
            // influence function 1{Y ≥ k} - π_k Y, divided by μ
            let var = h
                .counts
                .iter()
                .map(|(&y, &c)| {
                    let d = f64::from(u8::from(y >= k)) - pk * y as f64;
                    d * d * c as f64
                })
                .sum::<f64>()
                / n;
            (k, (var / n).sqrt() / mu)
        })
        .collect()
}

/// Draw from a finite pmf by inversion.
pub fn pmf_sampler<'a, R: Rng + ?Sized>(pmf: &'a [(u64, f64)], rng: &'a mut R) -> impl FnMut() -> u64 + 'a {
    let total: f64 = pmf.iter().map(|p| p.1).sum();
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &(_, p) in pmf {
        acc += p / total;
        cdf.push(acc);
    }
    move || {
        let u: f64 = rng.random();
        let i = cdf.partition_point(|&c| c <= u).min(pmf.len() - 1);
        pmf[i].0
    }
}

/// `Σ_k k^q π_k` computed two ways over integer counts: directly from the
/// tail sums and from `E[1^q + … + Y^q] / E Y`. Both are exact integers
/// over the common denominator `Σ_j j·c_j`.
pub fn size_biased_moment(h: &Histogram, q: u32) -> (u128, u128, u128) {
    let denom: u128 = h.counts.iter().map(|(&k, &c)| k as u128 * c as u128).sum();
    let kmax = h.counts.keys().last().copied().unwrap_or(0);
    let mut direct = 0u128;
    for k in 1..=kmax {
        let tail: u128 = h.counts.range(k..).map(|(_, &c)| c as u128).sum();
        direct += (k as u128).pow(q) * tail;
    }
    let via_y: u128 = h
        .counts
        .iter()
        .map(|(&y, &c)| c as u128 * (1..=y as u128).map(|k| k.pow(q)).sum::<u128>())
        .sum();
    (direct, via_y, denom)
}

/// Spitzer series for the mean ladder height.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpitzerMu {
    /// `exp Σ_{n ≤ n_max} (1/n)(1/2 - P(S_n > 0))`.
    pub raw: f64,
    /// `(σ/√2) · raw`.
    pub corrected: f64,
    /// Partial sums of the exponent.
    pub partials: Vec<f64>,
    /// Magnitude of the last term added.
    pub last_term: f64,
}

pub fn spitzer_mu(law: &IncrementLaw, n_max: usize, mass_tolerance: f64) -> Result<SpitzerMu> {
    let var = law
        .variance()
        .ok_or_else(|| Error::Unsupported("Spitzer series needs a finite-variance law".into()))?;
    if n_max == 0 {
        return Err(Error::Domain("n_max must be positive".into()));
    }
    let budget = PmfBudget {
        mass_tolerance,
        ..PmfBudget::default()
    };
    let mut partials = Vec::with_capacity(n_max);
    let mut sum = 0.0;
    let mut last = 0.0;
    for (i, pmf) in PmfSequence::new(law, &budget)?.take(n_max).enumerate() {
        let n = (i + 1) as f64;
        last = (0.5 - pmf?.prob_positive()) / n;
        sum += last;
        partials.push(sum);
    }
    let raw = sum.exp();
    Ok(SpitzerMu {
        raw,
        corrected: (var / 2.0).sqrt() * raw,
        partials,
        last_term: last.abs(),
    })
}

/// Empirical `E[Z_y^e]` at each level, with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootMoments {
    pub exponent: f64,
    /// `(y, mean, se)`.
    pub rows: Vec<(i64, f64, f64)>,
    pub max_mean: f64,
}

/// Moments `E[Z_y^{p-2}]` over a grid of levels; needs a law with bounded
/// support so that every moment is finite.
pub fn overshoot_envelope_check<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    p: f64,
    y_grid: &[i64],
    replicas: usize,
    rng: &mut R,
    opts: WalkOptions,
) -> Result<OvershootMoments> {
    if law.max_jump().is_none() {
        return Err(Error::Unsupported("moment envelope needs a finite-table law".into()));
    }
    if !(p > 2.0) {
        return Err(Error::Domain(format!("p = {p} must exceed 2")));
    }
    let e = p - 2.0;
    let mut rows = Vec::with_capacity(y_grid.len());
    for &y in y_grid {
        let vals: Vec<f64> = (0..replicas)
            .map(|_| first_passage_over(law, 0, y, rng, opts).map(|z| (z.overshoot as f64).powf(e)))
            .collect::<Result<_>>()?;
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        rows.push((y, mean, (var / n).sqrt()));
    }
    let max_mean = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(OvershootMoments {
        exponent: e,
        rows,
        max_mean,
    })
}
