//! Simulation harness for the stochastic-monotonicity properties the tests
//! rely on: mixture ordering under mixing-distribution ordering, posterior
//! ordering in the data, FPT CDF ordering in the leaf assignments, and the
//! prior counterexample where the ordering fails.

use serde::{Deserialize, Serialize};

use crate::data::BinomialDataset;
use crate::error::Result;
use crate::fpt::{posterior_hyper, sample_leaf_probs, BetaHyper, DyadicPartition, NodeCounts};
use crate::gibbs::{run_gibbs, GibbsConfig};
use crate::mixing::{mixture_cdf, sample_mixture, MixingDistribution};
use crate::seed;

/// Outcome of one first-order dominance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub dominated: bool,
    /// Largest CDF crossing in the wrong direction (0 when none).
    pub max_violation: f64,
    pub samples_per_arm: usize,
}

/// Two-sample Dvoretzky-Kiefer-Wolfowitz tolerance at the given confidence
/// level: the sum of the one-sample bounds.
pub fn dkw_tolerance(n_a: usize, n_b: usize, confidence: f64) -> f64 {
    let delta = 1.0 - confidence;
    let bound = |n: usize| ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt();
    bound(n_a) + bound(n_b)
}

/// Checks that sample `a` stochastically dominates sample `b` empirically:
/// ECDF_a(t) <= ECDF_b(t) + tol at every pooled sample point.
pub fn empirical_dominance(samples_a: &[f64], samples_b: &[f64], tol: f64) -> DominanceVerdict {
    assert!(!samples_a.is_empty() && !samples_b.is_empty());
    let mut a = samples_a.to_vec();
    let mut b = samples_b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let mut max_violation = 0.0f64;
    let (mut ia, mut ib) = (0usize, 0usize);
    // Walk the pooled points; after consuming all values <= t the ECDFs are
    // ia / na and ib / nb.
    while ia < a.len() || ib < b.len() {
        let t = match (a.get(ia), b.get(ib)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while ia < a.len() && a[ia] <= t {
            ia += 1;
        }
        while ib < b.len() && b[ib] <= t {
            ib += 1;
        }
        let diff = ia as f64 / na - ib as f64 / nb;
        max_violation = max_violation.max(diff);
    }
    DominanceVerdict {
        dominated: max_violation <= tol,
        max_violation,
        samples_per_arm: samples_a.len().min(samples_b.len()),
    }
}

/// Checks that the mixture sample under `mix_hi` (stochastically greater
/// mixing distribution) dominates the sample under `mix_lo`. Atom mixtures
/// are compared exactly through their mixture CDFs; other variants by
/// simulation.
pub fn verify_lemma_mixture_ordering(
    mix_hi: &MixingDistribution,
    mix_lo: &MixingDistribution,
    m: u64,
    n: usize,
    master_seed: u64,
) -> DominanceVerdict {
    if let (MixingDistribution::Atoms(_), MixingDistribution::Atoms(_)) = (mix_hi, mix_lo) {
        // Exact: dominance of X_hi means CDF_hi <= CDF_lo everywhere.
        let mut max_violation = 0.0f64;
        for x in 0..m {
            let diff = mixture_cdf(mix_hi, m, x) - mixture_cdf(mix_lo, m, x);
            max_violation = max_violation.max(diff);
        }
        return DominanceVerdict {
            dominated: max_violation <= 1e-12,
            max_violation,
            samples_per_arm: 0,
        };
    }
    let mut rng_hi = seed::rng(master_seed, "verify/mixture-hi", 0);
    let mut rng_lo = seed::rng(master_seed, "verify/mixture-lo", 0);
    let hi: Vec<f64> = sample_mixture(mix_hi, &vec![m; n], &mut rng_hi)
        .records()
        .iter()
        .map(|r| r.successes as f64)
        .collect();
    let lo: Vec<f64> = sample_mixture(mix_lo, &vec![m; n], &mut rng_lo)
        .records()
        .iter()
        .map(|r| r.successes as f64)
        .collect();
    empirical_dominance(&hi, &lo, dkw_tolerance(n, n, 0.999))
}

/// Checks that the Gibbs posterior of the latent locations increases with
/// the data: the per-sweep leaf-assignment sums under the componentwise
/// larger dataset must dominate those under the smaller one.
pub fn verify_posterior_theta_monotone(
    data_hi: &BinomialDataset,
    data_lo: &BinomialDataset,
    cfg: &GibbsConfig,
) -> Result<DominanceVerdict> {
    let hi = run_gibbs(data_hi, cfg)?;
    let lo = run_gibbs(data_lo, &cfg.clone().with_seed(cfg.seed.wrapping_add(1)))?;
    let n = hi.assignment_sums().len().min(lo.assignment_sums().len());
    Ok(empirical_dominance(
        hi.assignment_sums(),
        lo.assignment_sums(),
        dkw_tolerance(n, n, 0.999).max(0.05),
    ))
}

/// Checks that increasing the leaf assignments stochastically decreases the
/// conditional FPT CDF at endpoint j: draws of CDF(a_j) under the smaller
/// assignment vector must dominate those under the larger one.
pub fn verify_fpt_cdf_monotone(
    delta_lo: &[usize],
    delta_hi: &[usize],
    partition: &DyadicPartition,
    j: usize,
    n: usize,
    master_seed: u64,
) -> Result<DominanceVerdict> {
    assert!(delta_lo.len() == delta_hi.len());
    assert!(delta_lo.iter().zip(delta_hi).all(|(a, b)| a <= b));
    let level = partition.level();
    let hyper_lo = posterior_hyper(&NodeCounts::from_assignments(delta_lo, level)?)?;
    let hyper_hi = posterior_hyper(&NodeCounts::from_assignments(delta_hi, level)?)?;
    let draw = |hyper: &BetaHyper, label: &str| -> Vec<f64> {
        let mut rng = seed::rng(master_seed, label, 0);
        (0..n)
            .map(|_| sample_leaf_probs(hyper, &mut rng).cdf_at(j))
            .collect()
    };
    let lo_draws = draw(&hyper_lo, "verify/fpt-lo");
    let hi_draws = draw(&hyper_hi, "verify/fpt-hi");
    Ok(empirical_dominance(
        &lo_draws,
        &hi_draws,
        dkw_tolerance(n, n, 0.999),
    ))
}

/// Report of the prior counterexample: with a sharply concentrated root
/// split, moving a single observation one leaf to the right makes the CDF
/// at a_1 stochastically larger instead of smaller.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CounterexampleReport {
    /// Closed-form mean of CDF(a_1) with the observation in leaf 2.
    pub mean_before_exact: f64,
    /// Closed-form mean with the observation moved to leaf 3.
    pub mean_after_exact: f64,
    pub mean_before_sim: f64,
    pub mean_after_sim: f64,
    /// z-score of (after - before) from the simulation.
    pub zscore: f64,
    /// True when the move increased the CDF beyond 5 standard errors.
    pub reversed: bool,
    pub samples_per_arm: usize,
}

/// Runs the L = 2 construction with root prior Beta(root_alpha, root_alpha)
/// and uniform priors below. With root_alpha = 1e6 the monotonicity of the
/// conditional CDF reverses; with root_alpha = 1 it does not.
pub fn counterexample_prior_reversal(
    root_alpha: f64,
    n: usize,
    master_seed: u64,
) -> CounterexampleReport {
    // CDF(a_1) = phi_{1,1} * phi_{2,1}.
    // Observation in leaf 2: root (ra + 1, ra), node (2,1) = Beta(1, 2).
    // Observation in leaf 3: root (ra, ra + 1), node (2,1) = Beta(1, 1).
    let build = |root: (f64, f64), left: (f64, f64)| -> BetaHyper {
        let mut hyper = BetaHyper::uniform_prior(2);
        hyper.set_node(1, 1, root.0, root.1);
        hyper.set_node(2, 1, left.0, left.1);
        hyper
    };
    let ra = root_alpha;
    let before = build((ra + 1.0, ra), (1.0, 2.0));
    let after = build((ra, ra + 1.0), (1.0, 1.0));
    let mean_before_exact = (ra + 1.0) / (2.0 * ra + 1.0) * (1.0 / 3.0);
    let mean_after_exact = ra / (2.0 * ra + 1.0) * (1.0 / 2.0);

    let sample_means = |hyper: &BetaHyper, label: &str| -> (f64, f64) {
        let mut rng = seed::rng(master_seed, label, 0);
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for i in 0..n {
            let v = sample_leaf_probs(hyper, &mut rng).cdf_at(1);
            let delta = v - mean;
            mean += delta / (i as f64 + 1.0);
            m2 += delta * (v - mean);
        }
        (mean, m2 / (n as f64 - 1.0) / n as f64)
    };
    let (mean_before_sim, var_before) = sample_means(&before, "verify/counterexample-before");
    let (mean_after_sim, var_after) = sample_means(&after, "verify/counterexample-after");
    let se = (var_before + var_after).sqrt();
    let zscore = (mean_after_sim - mean_before_sim) / se;
    CounterexampleReport {
        mean_before_exact,
        mean_after_exact,
        mean_before_sim,
        mean_after_sim,
        zscore,
        reversed: zscore > 5.0,
        samples_per_arm: n,
    }
}

/// The published counterexample configuration: root prior Beta(1e6, 1e6).
pub fn counterexample_nonuniform_prior() -> CounterexampleReport {
    counterexample_prior_reversal(1e6, 100_000, 0x5eed)
}

/// Summary line of one harness check, for the CLI report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs the full verification suite at the given scale.
pub fn run_suite(master_seed: u64, samples: usize) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        reports.push(CheckReport {
            name: name.to_string(),
            passed,
            detail,
        });
    };

    // Mixture ordering, exact on atoms.
    let hi = MixingDistribution::point_mass(0.6).unwrap();
    let lo = MixingDistribution::point_mass(0.3).unwrap();
    let v = verify_lemma_mixture_ordering(&hi, &lo, 20, samples, master_seed);
    push(
        "mixture-ordering/point-masses",
        v.dominated,
        format!("max violation {:.3e}", v.max_violation),
    );
    let beta = MixingDistribution::beta(2.0, 2.0).unwrap();
    let wc = crate::mixing::worst_case(crate::mixing::WorstCaseSpec::min(0.40, 0.433).unwrap());
    let v = verify_lemma_mixture_ordering(&beta, &wc, 20, samples, master_seed);
    push(
        "mixture-ordering/beta-dominates-worst-case",
        v.dominated,
        format!("max violation {:.3e}", v.max_violation),
    );
    let v = verify_lemma_mixture_ordering(&beta, &beta, 20, samples, master_seed);
    push(
        "mixture-ordering/equal-distributions-tie",
        v.dominated,
        format!("max violation {:.3e}", v.max_violation),
    );

    // Posterior location ordering via Gibbs assignment sums.
    let part = DyadicPartition::regular(2, -5.0, 5.0).unwrap();
    let cfg = GibbsConfig::new(part.clone(), seed::derive(master_seed, "suite/theta", 0))
        .with_iterations(samples.max(2000), 200);
    let hi_data = BinomialDataset::new(vec![(20, 20)]).unwrap();
    let lo_data = BinomialDataset::new(vec![(0, 20)]).unwrap();
    let v = verify_posterior_theta_monotone(&hi_data, &lo_data, &cfg)?;
    push(
        "posterior-ordering/single-record-extremes",
        v.dominated,
        format!("max violation {:.3e}", v.max_violation),
    );

    // FPT CDF ordering at L = 1, 2, 3.
    for (level, lo_delta, hi_delta, j) in [
        (1u32, vec![1usize, 1, 2], vec![1usize, 2, 2], 1usize),
        (2, vec![2, 1, 3], vec![3, 1, 3], 2),
        (3, vec![4, 2], vec![5, 2], 3),
    ] {
        let part = DyadicPartition::regular(level, -5.0, 5.0).unwrap();
        let v = verify_fpt_cdf_monotone(&lo_delta, &hi_delta, &part, j, samples, master_seed)?;
        push(
            &format!("fpt-cdf-ordering/level-{level}"),
            v.dominated,
            format!("max violation {:.3e}", v.max_violation),
        );
    }

    // Prior counterexample: reversal with the concentrated root, none with
    // the uniform root.
    let report = counterexample_prior_reversal(1e6, samples.max(100_000), master_seed);
    push(
        "counterexample/concentrated-root-reverses",
        report.reversed,
        format!(
            "means {:.4} -> {:.4} (z = {:.1})",
            report.mean_before_sim, report.mean_after_sim, report.zscore
        ),
    );
    let uniform = counterexample_prior_reversal(1.0, samples.max(100_000), master_seed);
    push(
        "counterexample/uniform-root-does-not-reverse",
        !uniform.reversed && uniform.mean_before_exact > uniform.mean_after_exact,
        format!(
            "means {:.4} -> {:.4} (z = {:.1})",
            uniform.mean_before_sim, uniform.mean_after_sim, uniform.zscore
        ),
    );

    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_samples_dominate_with_zero_violation() {
        let a = vec![1.0, 2.0, 3.0];
        let v = empirical_dominance(&a, &a, 0.0);
        assert!(v.dominated);
        assert_eq!(v.max_violation, 0.0);
    }

    #[test]
    fn shifted_samples_dominate() {
        let b: Vec<f64> = (0..100).map(|i| i as f64 / 10.0).collect();
        let a: Vec<f64> = b.iter().map(|x| x + 1.0).collect();
        let v = empirical_dominance(&a, &b, 0.0);
        assert!(v.dominated);
        // And the reverse direction fails decisively.
        let r = empirical_dominance(&b, &a, 0.05);
        assert!(!r.dominated);
    }

    #[test]
    fn uniform_shift_crossing_detected() {
        // a ~ U(0,1) is not stochastically greater than b ~ U(0.5, 1.5):
        // the true CDF gap is 0.5 on [0.5, 1).
        let mut rng = seed::rng(51, "verify-uniform", 0);
        let n = 10_000;
        let a: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..n).map(|_| 0.5 + rng.gen::<f64>()).collect();
        let v = empirical_dominance(&a, &b, dkw_tolerance(n, n, 0.999));
        assert!(!v.dominated);
        assert!(v.max_violation > 0.4);
        // b does dominate a.
        let v = empirical_dominance(&b, &a, dkw_tolerance(n, n, 0.999));
        assert!(v.dominated);
    }

    #[test]
    fn fpt_ordering_level_one_beta_comparison() {
        // One observation moving leaf 1 -> 2 turns Beta(3, 2) into
        // Beta(2, 3) for the root split; the former dominates.
        let part = DyadicPartition::regular(1, -5.0, 5.0).unwrap();
        let v = verify_fpt_cdf_monotone(&[1, 1], &[1, 2], &part, 1, 30_000, 7).unwrap();
        assert!(v.dominated, "violation {}", v.max_violation);
        // Identical assignments tie.
        let v = verify_fpt_cdf_monotone(&[1, 2], &[1, 2], &part, 1, 10_000, 7).unwrap();
        assert!(v.dominated);
    }

    #[test]
    fn counterexample_closed_forms() {
        let r = counterexample_prior_reversal(1e6, 50_000, 3);
        assert!((r.mean_before_exact - 1.0 / 6.0).abs() < 1e-6);
        assert!((r.mean_after_exact - 1.0 / 4.0).abs() < 1e-6);
        assert!(r.reversed, "z = {}", r.zscore);
        let uniform = counterexample_prior_reversal(1.0, 50_000, 3);
        // Uniform root: means 2/9 before, 1/6 after; no reversal.
        assert!((uniform.mean_before_exact - 2.0 / 9.0).abs() < 1e-12);
        assert!((uniform.mean_after_exact - 1.0 / 6.0).abs() < 1e-12);
        assert!(!uniform.reversed);
    }

    #[test]
    fn suite_passes_at_reduced_scale() {
        let reports = run_suite(99, 4000).unwrap();
        for r in &reports {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
