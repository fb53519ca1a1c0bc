//! Level-alpha tests of the one-sided hypotheses on the mixing CDF,
//! H_GE(q0; p*): q0 >= CDF(p*) and H_LE(q0; p*): q0 <= CDF(p*).
//!
//! Two statistics are supported: the empirical CDF of x_k / m_k with exact
//! binomial critical values (common trial size only), and the
//! deconvolution statistic (posterior-median CDF) whose null distribution
//! is simulated from the worst-case mixing distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::data::BinomialDataset;
use crate::error::{Error, Result};
use crate::gibbs::{run_gibbs, GibbsConfig};
use crate::logit::{floor_mul, frac_le, inv_logit, logit};
use crate::mixing::{sample_mixture, worst_case, WorstCaseSpec};
use crate::seed;

/// Direction of the one-sided null hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// H0: q0 >= CDF(p_star); worst case puts mass q0 at P = 0.
    Ge,
    /// H0: q0 <= CDF(p_star); worst case puts mass 1 - q0 at P = 1.
    Le,
}

/// A one-sided null hypothesis on the mixing CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSpec {
    pub direction: Direction,
    pub q0: f64,
    pub p_star: f64,
}

impl HypothesisSpec {
    pub fn new(direction: Direction, q0: f64, p_star: f64) -> Result<Self> {
        for (name, v) in [("q0", q0), ("p_star", p_star)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidProbability { name, value: v });
            }
        }
        Ok(Self {
            direction,
            q0,
            p_star,
        })
    }

    /// The worst-case null mixing distribution for this hypothesis.
    pub fn worst_case_spec(&self) -> WorstCaseSpec {
        match self.direction {
            Direction::Ge => WorstCaseSpec {
                kind: crate::mixing::WorstCaseKind::Min,
                q0: self.q0,
                p0: self.p_star,
            },
            Direction::Le => WorstCaseSpec {
                kind: crate::mixing::WorstCaseKind::Max,
                q0: self.q0,
                p0: self.p_star,
            },
        }
    }
}

/// Result of one hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub p_value: f64,
    pub reject: bool,
    pub statistic: f64,
    pub alpha: f64,
    pub null_spec: WorstCaseSpec,
    /// Monte Carlo replicates; 0 for exact tests.
    pub replicates: usize,
}

/// Shifts a success probability up by rho on the logit scale.
pub fn shift_success_prob(p: f64, rho: f64) -> f64 {
    assert!(rho >= 0.0);
    inv_logit(logit(p) + rho)
}

/// Shifts a success probability down by rho on the logit scale.
pub fn shift_success_prob_down(p: f64, rho: f64) -> f64 {
    assert!(rho >= 0.0);
    inv_logit(logit(p) - rho)
}

/// Empirical CDF of the observed proportions at p: |{k : x_k/m_k <= p}| / K,
/// with the boundary comparison evaluated exactly.
pub fn ecdf_statistic(data: &BinomialDataset, p: f64) -> f64 {
    ecdf_count(data, p) as f64 / data.len() as f64
}

fn ecdf_count(data: &BinomialDataset, p: f64) -> u64 {
    data.records()
        .iter()
        .filter(|r| frac_le(r.successes, r.trials, p))
        .count() as u64
}

/// Null success probability of the counts statistic under the min worst
/// case: q0 + (1 - q0) * F_Binomial(m, p*)(floor(m p)) for the shifted
/// hypothesis point p* = shift(p, rho).
pub fn gamma0(q0: f64, p: f64, rho: f64, m: u64) -> f64 {
    let p_star = shift_success_prob(p, rho);
    let threshold = floor_mul(m, p);
    q0 + (1.0 - q0) * crate::mixing::binomial_cdf(m, p_star, threshold)
}

/// Counterpart of [`gamma0`] under the max worst case: the P = 1 atom never
/// lands at or below p < 1, so only the p* atom contributes,
/// q0 * F_Binomial(m, p*)(floor(m p)) with p* = shift_down(p, rho).
pub fn gamma0_le(q0: f64, p: f64, rho: f64, m: u64) -> f64 {
    let p_star = shift_success_prob_down(p, rho);
    let threshold = floor_mul(m, p);
    let at_edge = if frac_le(m, m, p) { 1.0 - q0 } else { 0.0 };
    q0 * crate::mixing::binomial_cdf(m, p_star, threshold) + at_edge
}

/// Smallest integer q with F_Binomial(n, p)(q) >= level.
pub fn binomial_quantile(n: u64, p: f64, level: f64) -> u64 {
    assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&level));
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    let dist = Binomial::new(p, n).unwrap();
    let (mut lo, mut hi) = (0u64, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if dist.cdf(mid) >= level {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Exact counts test of H_GE(q0; shift(p, rho)). Rejects for large values
/// of the empirical CDF at p; requires a common trial size.
pub fn counts_test_ge(
    data: &BinomialDataset,
    q0: f64,
    p: f64,
    rho: f64,
    alpha: f64,
) -> Result<TestOutcome> {
    let m = data.common_trial_size()?;
    let k = data.len() as u64;
    let count = ecdf_count(data, p);
    let gamma = gamma0(q0, p, rho, m);
    let null = Binomial::new(gamma.min(1.0), k).unwrap();
    // P(Bin(K, gamma) >= count); equivalent to count > Q_{1-alpha}.
    let p_value = if count == 0 { 1.0 } else { null.sf(count - 1) };
    Ok(TestOutcome {
        p_value,
        reject: p_value <= alpha,
        statistic: count as f64 / k as f64,
        alpha,
        null_spec: WorstCaseSpec::min(q0, shift_success_prob(p, rho))?,
        replicates: 0,
    })
}

/// Exact counts test of H_LE(q0; shift_down(p, rho)). Rejects for small
/// values of the empirical CDF at p.
pub fn counts_test_le(
    data: &BinomialDataset,
    q0: f64,
    p: f64,
    rho: f64,
    alpha: f64,
) -> Result<TestOutcome> {
    let m = data.common_trial_size()?;
    let k = data.len() as u64;
    let count = ecdf_count(data, p);
    let gamma = gamma0_le(q0, p, rho, m);
    let p_value = if gamma <= 0.0 {
        // Null statistic is identically 0: any count is at least it.
        1.0
    } else {
        Binomial::new(gamma.min(1.0), k).unwrap().cdf(count)
    };
    Ok(TestOutcome {
        p_value,
        reject: p_value <= alpha,
        statistic: count as f64 / k as f64,
        alpha,
        null_spec: WorstCaseSpec::max(q0, shift_success_prob_down(p, rho))?,
        replicates: 0,
    })
}

/// Monte Carlo deconvolution test at partition endpoint index `j`.
///
/// The observed statistic is the posterior-median CDF of `data` at a_j; the
/// null distribution is simulated with `replicates` datasets drawn from the
/// worst-case mixing distribution at the hypothesis point, reusing the
/// observed trial-size multiset. The p-value is the plain exceedance
/// proportion (inclusive), matching exact Monte Carlo test arithmetic.
#[allow(clippy::too_many_arguments)]
pub fn deconv_test(
    data: &BinomialDataset,
    spec: HypothesisSpec,
    j: usize,
    rho: f64,
    alpha: f64,
    replicates: usize,
    cfg: &GibbsConfig,
    master_seed: u64,
) -> Result<TestOutcome> {
    validate_shift_consistency(&spec, j, rho, cfg)?;
    let draws = run_gibbs(data, cfg)?;
    let observed = draws.cdf_estimate(j);
    let mut trials = data.trial_sizes();
    trials.sort_unstable();
    deconv_test_given_statistic(observed, &trials, spec, j, alpha, replicates, cfg, master_seed)
}

/// Checks that the hypothesis point equals the shifted statistic endpoint.
fn validate_shift_consistency(
    spec: &HypothesisSpec,
    j: usize,
    rho: f64,
    cfg: &GibbsConfig,
) -> Result<()> {
    if j > cfg.partition.num_leaves() {
        return Err(Error::InvalidConfig(format!(
            "endpoint index {j} out of range for the partition"
        )));
    }
    let a_j = cfg.partition.endpoint(j);
    let expected = match spec.direction {
        Direction::Ge => inv_logit(a_j + rho),
        Direction::Le => inv_logit(a_j - rho),
    };
    if (expected - spec.p_star).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "hypothesis point {} does not match endpoint {} shifted by rho = {rho} ({expected})",
            spec.p_star, a_j
        )));
    }
    Ok(())
}

/// Core of [`deconv_test`] with a precomputed observed statistic; used by
/// interval construction, which evaluates the observed statistic once per
/// dataset and reuses it across hypotheses.
#[allow(clippy::too_many_arguments)]
pub(crate) fn deconv_test_given_statistic(
    observed: f64,
    null_trial_sizes: &[u64],
    spec: HypothesisSpec,
    j: usize,
    alpha: f64,
    replicates: usize,
    cfg: &GibbsConfig,
    master_seed: u64,
) -> Result<TestOutcome> {
    if replicates < 1 {
        return Err(Error::InvalidConfig(
            "deconvolution test needs at least one null replicate".into(),
        ));
    }
    let null_spec = spec.worst_case_spec();
    let null_mix = worst_case(null_spec);
    let stats: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut data_rng = seed::rng(master_seed, "deconv/null-data", b);
            let null_data = sample_mixture(&null_mix, null_trial_sizes, &mut data_rng);
            let chain_cfg = cfg
                .clone()
                .with_seed(seed::derive(master_seed, "deconv/null-chain", b));
            run_gibbs(&null_data, &chain_cfg).map(|draws| draws.cdf_estimate(j))
        })
        .collect::<Result<Vec<f64>>>()?;
    let exceed = match spec.direction {
        Direction::Ge => stats.iter().filter(|&&t| t >= observed).count(),
        Direction::Le => stats.iter().filter(|&&t| t <= observed).count(),
    };
    let p_value = exceed as f64 / replicates as f64;
    Ok(TestOutcome {
        p_value,
        reject: p_value <= alpha,
        statistic: observed,
        alpha,
        null_spec,
        replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpt::DyadicPartition;

    #[test]
    fn shift_matches_reference_values() {
        assert!((shift_success_prob(0.55, 0.5) - 0.668).abs() < 5e-4);
        assert_eq!(shift_success_prob(0.3, 0.0), 0.3);
        let e = std::f64::consts::E;
        assert!((shift_success_prob(0.5, 1.0) - e / (1.0 + e)).abs() < 1e-12);
        assert!((shift_success_prob_down(shift_success_prob(0.4, 0.7), 0.7) - 0.4).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn shift_rejects_degenerate_probability() {
        shift_success_prob(1.0, 0.5);
    }

    #[test]
    fn ecdf_statistic_counting() {
        let data = BinomialDataset::new(vec![(0, 20), (0, 5)]).unwrap();
        assert_eq!(ecdf_statistic(&data, 0.0), 1.0);
        let data = BinomialDataset::new(vec![(20, 20), (5, 5)]).unwrap();
        assert_eq!(ecdf_statistic(&data, 0.999), 0.0);
        let data = BinomialDataset::new(vec![(5, 20), (10, 20), (15, 20)]).unwrap();
        assert!((ecdf_statistic(&data, 0.5) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gamma0_reference_values() {
        // gamma0(0.40, 0.55, 0.5, 20) = 0.512.
        assert!((gamma0(0.40, 0.55, 0.5, 20) - 0.512).abs() < 5e-4);
        // At the unshifted point p_28 = 0.72: 0.703.
        assert!((gamma0(0.40, 0.72, 0.0, 20) - 0.703).abs() < 5e-4);
        assert_eq!(gamma0(1.0, 0.3, 0.2, 10), 1.0);
        // rho = 0 consistency: q0 + (1 - q0) F(floor(m p)).
        let direct = 0.4 + 0.6 * crate::mixing::binomial_cdf(20, 0.55, 11);
        assert!((gamma0(0.40, 0.55, 0.0, 20) - direct).abs() < 1e-15);
    }

    #[test]
    fn gamma0_is_nonincreasing_in_rho() {
        let mut prev = f64::INFINITY;
        for i in 0..30 {
            let rho = i as f64 * 0.1;
            let g = gamma0(0.40, 0.55, rho, 20);
            assert!(g <= prev + 1e-12);
            prev = g;
        }
        // Large rho pushes gamma0 down to q0.
        assert!((gamma0(0.40, 0.55, 12.0, 20) - 0.40).abs() < 1e-3);
    }

    #[test]
    fn binomial_quantile_reference_values() {
        assert_eq!(binomial_quantile(80, 0.40, 0.95), 39);
        assert_eq!(binomial_quantile(80, 0.512, 0.95), 48);
        assert_eq!(binomial_quantile(10, 0.0, 0.9), 0);
        assert_eq!(binomial_quantile(10, 1.0, 0.5), 10);
        // Definition check: smallest q with F(q) >= level.
        let dist = Binomial::new(0.3, 25).unwrap();
        for level in [0.05, 0.5, 0.95] {
            let q = binomial_quantile(25, 0.3, level);
            assert!(dist.cdf(q) >= level);
            if q > 0 {
                assert!(dist.cdf(q - 1) < level);
            }
        }
    }

    #[test]
    fn counts_test_example_arithmetic() {
        // K = 80, m = 20, statistic 50/80 vs gamma0 = 0.512 at alpha 0.05:
        // quantile is 48, so 50 > 48 rejects.
        let mut records = vec![(5u64, 20u64); 50];
        records.extend(vec![(18u64, 20u64); 30]);
        let data = BinomialDataset::new(records).unwrap();
        let out = counts_test_ge(&data, 0.40, 0.55, 0.5, 0.05).unwrap();
        assert!((out.statistic - 50.0 / 80.0).abs() < 1e-15);
        assert!(out.reject);
        assert!((out.null_spec.p0 - 0.668).abs() < 5e-4);

        // Statistic 0 accepts.
        let data = BinomialDataset::new(vec![(20, 20); 80]).unwrap();
        let out = counts_test_ge(&data, 0.40, 0.55, 0.5, 0.05).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert!(!out.reject);
        assert_eq!(out.p_value, 1.0);

        // Statistic 1 rejects whenever gamma0 < 1 and K is moderate.
        let data = BinomialDataset::new(vec![(0, 20); 80]).unwrap();
        let out = counts_test_ge(&data, 0.40, 0.55, 0.5, 0.05).unwrap();
        let quantile = binomial_quantile(80, gamma0(0.40, 0.55, 0.5, 20), 0.95);
        assert!(quantile < 80);
        assert!(out.reject);
    }

    #[test]
    fn counts_test_rejects_unequal_trial_sizes() {
        let data = BinomialDataset::new(vec![(1, 20), (1, 19)]).unwrap();
        assert!(matches!(
            counts_test_ge(&data, 0.4, 0.5, 0.0, 0.05),
            Err(Error::UnequalTrialSizes { .. })
        ));
    }

    #[test]
    fn counts_test_matches_quantile_rule() {
        // p-value <= alpha iff count > binomial quantile at 1 - alpha.
        let alpha = 0.05;
        let (k, m) = (60u64, 20u64);
        for count in [0u64, 10, 25, 30, 40, 59, 60] {
            let mut records = vec![(2u64, m); count as usize];
            records.extend(vec![(m, m); (k - count) as usize]);
            let data = BinomialDataset::new(records).unwrap();
            let out = counts_test_ge(&data, 0.40, 0.30, 0.0, alpha).unwrap();
            let gamma = gamma0(0.40, 0.30, 0.0, m);
            let quantile = binomial_quantile(k, gamma, 1.0 - alpha);
            assert_eq!(out.reject, count > quantile, "count = {count}");
        }
    }

    #[test]
    fn counts_le_test_mirrors_ge() {
        // All observations high: H_LE(q0; p*) with small p* should reject
        // (the empirical CDF at p is 0, far below the null's q0 *
        // F(floor(m p)) mean).
        let data = BinomialDataset::new(vec![(19, 20); 60]).unwrap();
        let out = counts_test_le(&data, 0.6, 0.4, 0.0, 0.05).unwrap();
        assert!(out.reject);
        // All observations low: statistic 1, never below the null.
        let data = BinomialDataset::new(vec![(0, 20); 60]).unwrap();
        let out = counts_test_le(&data, 0.6, 0.4, 0.0, 0.05).unwrap();
        assert!(!out.reject);
    }

    #[test]
    fn deconv_test_requires_consistent_hypothesis_point() {
        let part = DyadicPartition::grid65();
        let cfg = GibbsConfig::new(part, 3).with_iterations(50, 10);
        let data = BinomialDataset::new(vec![(5, 20); 10]).unwrap();
        let spec = HypothesisSpec::new(Direction::Ge, 0.4, 0.9).unwrap();
        assert!(deconv_test(&data, spec, 32, 0.0, 0.1, 10, &cfg, 1).is_err());
        let spec = HypothesisSpec::new(Direction::Ge, 0.4, inv_logit(cfg.partition.endpoint(32))).unwrap();
        assert!(deconv_test(&data, spec, 32, 0.0, 0.1, 0, &cfg, 1).is_err());
        assert!(deconv_test(&data, spec, 32, 0.0, 0.1, 10, &cfg, 1).is_ok());
    }

    #[test]
    fn deconv_test_pvalue_counts_inclusive_exceedances() {
        // Observed statistic 0 under GE: every null statistic is >= 0.
        let part = DyadicPartition::regular(3, -5.0, 5.0).unwrap();
        let cfg = GibbsConfig::new(part.clone(), 5).with_iterations(60, 10);
        let spec = HypothesisSpec::new(Direction::Ge, 0.4, inv_logit(part.endpoint(4))).unwrap();
        let trials = vec![20u64; 8];
        let out =
            deconv_test_given_statistic(0.0, &trials, spec, 4, 0.1, 25, &cfg, 11).unwrap();
        assert_eq!(out.p_value, 1.0);
        assert!(!out.reject);
        // Observed statistic 1.0 + eps would never be reached; p-value 0.
        let out =
            deconv_test_given_statistic(1.1, &trials, spec, 4, 0.1, 25, &cfg, 11).unwrap();
        assert_eq!(out.p_value, 0.0);
        assert!(out.reject);
    }

    #[test]
    fn deconv_test_is_permutation_invariant() {
        let part = DyadicPartition::regular(4, -5.0, 5.0).unwrap();
        let cfg = GibbsConfig::new(part.clone(), 17).with_iterations(120, 20);
        let records = vec![(2u64, 20u64), (9, 20), (15, 20), (0, 20), (9, 20)];
        let mut reversed = records.clone();
        reversed.reverse();
        let data = BinomialDataset::new(records).unwrap();
        let permuted = BinomialDataset::new(reversed).unwrap();
        let spec = HypothesisSpec::new(Direction::Ge, 0.4, inv_logit(part.endpoint(9))).unwrap();
        let a = deconv_test(&data, spec, 9, 0.0, 0.1, 20, &cfg, 42).unwrap();
        let b = deconv_test(&permuted, spec, 9, 0.0, 0.1, 20, &cfg, 42).unwrap();
        assert_eq!(a, b);
    }
}
