//! Smallest asymptotic one-sided interval: the largest hypothesis point
//! whose min worst-case mixture is stochastically smaller than the truth's
//! mixture, for binomial and normal noise, plus the counts-test witness
//! that separates anything beyond it.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::logit::logit;
use crate::mixing::{binomial_cdf, mixture_cdf, mixture_cdf_normal, MixingDistribution};

/// Noise model of the mixture sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Noise {
    Binomial { m: u64 },
    Normal { sigma: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmaxResult {
    pub p_max: f64,
    pub q0: f64,
    pub mixing: MixingDistribution,
    pub noise: Noise,
    pub tolerance: f64,
}

/// True iff the binomial mixture of the min worst case at (q0, p_dd) is
/// stochastically smaller than the truth's mixture: its CDF dominates the
/// truth's CDF at every count.
pub fn stoch_smaller_min(q0: f64, p_dd: f64, truth: &MixingDistribution, m: u64) -> bool {
    let truth_cdf: Vec<f64> = (0..m).map(|x| mixture_cdf(truth, m, x)).collect();
    stoch_smaller_min_cached(q0, p_dd, &truth_cdf, m)
}

fn stoch_smaller_min_cached(q0: f64, p_dd: f64, truth_cdf: &[f64], m: u64) -> bool {
    // The P = 0 atom contributes CDF 1 everywhere, so the worst-case CDF is
    // q0 + (1 - q0) F_Binomial(m, p_dd); x = m is always a tie at 1.
    for (x, &t) in truth_cdf.iter().enumerate() {
        let wc = q0 + (1.0 - q0) * binomial_cdf(m, p_dd, x as u64);
        if wc < t - 1e-9 {
            return false;
        }
    }
    true
}

/// Largest p'' (within `tol`) whose min worst case stays stochastically
/// smaller than the truth's binomial mixture. Bisection over a predicate
/// that is monotone in p'' because the binomial CDF decreases in its
/// success probability.
pub fn p_max_binomial(
    q0: f64,
    truth: &MixingDistribution,
    m: u64,
    tol: f64,
) -> Result<PmaxResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    let truth_cdf: Vec<f64> = (0..m).map(|x| mixture_cdf(truth, m, x)).collect();
    let p_max = bisect_boundary(|p| stoch_smaller_min_cached(q0, p, &truth_cdf, m));
    Ok(PmaxResult {
        p_max,
        q0,
        mixing: truth.clone(),
        noise: Noise::Binomial { m },
        tolerance: tol,
    })
}

/// Normal-noise variant: theta_hat ~ N(logit(P), sigma). Dominance is
/// checked on a fixed 2401-point grid covering [-12, 12].
pub fn p_max_normal(
    q0: f64,
    truth: &MixingDistribution,
    sigma: f64,
    tol: f64,
) -> Result<PmaxResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidConfig("sigma must be positive".into()));
    }
    let grid: Vec<f64> = (0..=2400).map(|i| -12.0 + i as f64 * 24.0 / 2400.0).collect();
    let truth_cdf: Vec<f64> = grid
        .iter()
        .map(|&t| mixture_cdf_normal(truth, sigma, t))
        .collect();
    let norm = Normal::new(0.0, 1.0).unwrap();
    let predicate = |p_dd: f64| -> bool {
        // At p_dd = 1 the atom sits at +infinity and contributes 0.
        let shift = if p_dd >= 1.0 {
            None
        } else if p_dd <= 0.0 {
            return true;
        } else {
            Some(logit(p_dd))
        };
        grid.iter().zip(&truth_cdf).all(|(&t, &tc)| {
            let wc = match shift {
                Some(s) => q0 + (1.0 - q0) * norm.cdf((t - s) / sigma),
                None => q0,
            };
            wc >= tc - 1e-9
        })
    };
    let p_max = bisect_boundary(predicate);
    Ok(PmaxResult {
        p_max,
        q0,
        mixing: truth.clone(),
        noise: Noise::Normal { sigma },
        tolerance: tol,
    })
}

/// 40-step bisection of the true/false boundary of a monotone predicate on
/// [0, 1]; the predicate holds at 0.
fn bisect_boundary(predicate: impl Fn(f64) -> bool) -> f64 {
    if predicate(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if predicate(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Witness for the counts test beyond p_max: the smallest count x at which
/// the worst-case CDF at p_max + epsilon drops below the truth's CDF,
/// together with both CDF values (the null and alternative success
/// probabilities of the counts statistic at p* = x / m).
pub fn x_epsilon_test_plan(
    q0: f64,
    truth: &MixingDistribution,
    m: u64,
    epsilon: f64,
) -> Result<(u64, f64, f64)> {
    let p_max = p_max_binomial(q0, truth, m, 1e-9)?.p_max;
    let target = p_max + epsilon;
    if !(epsilon > 0.0) || target >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "epsilon {epsilon} pushes the hypothesis point {target} to 1 or beyond"
        )));
    }
    for x in 0..m {
        let gamma0 = q0 + (1.0 - q0) * binomial_cdf(m, target, x);
        let gamma = mixture_cdf(truth, m, x);
        if gamma0 < gamma {
            return Ok((x, gamma0, gamma));
        }
    }
    Err(Error::InvalidConfig(format!(
        "no separating count exists at p_max + epsilon = {target}; epsilon too small"
    )))
}
