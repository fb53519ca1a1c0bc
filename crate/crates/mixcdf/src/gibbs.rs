//! Gibbs sampler for the posterior of the hierarchical model
//! (finite Polya tree density, latent logit success probabilities,
//! binomial counts) and the posterior-median CDF statistic.
//!
//! Only the leaf membership of each latent theta_k is sampled: the
//! conjugate update depends on the thetas through interval counts alone.
//! The per-record leaf likelihoods are precomputed once per dataset with a
//! fixed Gauss-Legendre rule, and records with identical (x, m) share a
//! table row.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::data::{BinomialDataset, BinomialRecord};
use crate::error::{Error, Result};
use crate::fpt::{self, BetaHyper, DyadicPartition, LeafProbs, NodeCounts};
use crate::quad;

/// Configuration of one Gibbs run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    /// Total sweeps G.
    pub iterations: usize,
    /// Leading sweeps dropped from the output.
    pub burn_in: usize,
    /// Chain seed.
    pub seed: u64,
    pub partition: DyadicPartition,
    /// Symmetric Beta prior parameter at every split node.
    pub prior_alpha0: f64,
    /// Gauss-Legendre nodes per leaf for the likelihood table.
    pub within_leaf_nodes: usize,
}

impl GibbsConfig {
    /// Defaults: G = 1000, burn-in 100, uniform prior, 8 nodes per leaf.
    pub fn new(partition: DyadicPartition, seed: u64) -> Self {
        Self {
            iterations: 1000,
            burn_in: 100,
            seed,
            partition,
            prior_alpha0: 1.0,
            within_leaf_nodes: 8,
        }
    }

    pub fn with_iterations(mut self, iterations: usize, burn_in: usize) -> Self {
        self.iterations = iterations;
        self.burn_in = burn_in;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "need burn_in < iterations, got {} >= {}",
                self.burn_in, self.iterations
            )));
        }
        if !(self.prior_alpha0 > 0.0) {
            return Err(Error::InvalidConfig("prior_alpha0 must be positive".into()));
        }
        if self.within_leaf_nodes == 0 {
            return Err(Error::InvalidConfig("within_leaf_nodes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Retained leaf-probability draws of one chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorDraws {
    draws: Vec<LeafProbs>,
    /// Sum of leaf assignments over records, per retained sweep; a scalar
    /// location surrogate for the latent theta vector.
    assignment_sums: Vec<f64>,
    config: GibbsConfig,
}

impl PosteriorDraws {
    pub fn draws(&self) -> &[LeafProbs] {
        &self.draws
    }

    pub fn assignment_sums(&self) -> &[f64] {
        &self.assignment_sums
    }

    pub fn config(&self) -> &GibbsConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Posterior-median CDF estimate at partition endpoint j (0-based,
    /// j = 0 gives 0 and j = 2^L gives 1). With an even number of retained
    /// draws this is the midpoint of the two central order statistics.
    pub fn cdf_estimate(&self, j: usize) -> f64 {
        let vals: Vec<f64> = self.draws.iter().map(|row| row.cdf_at(j)).collect();
        median(vals)
    }

    /// CDF estimates at all endpoints 0..=2^L.
    pub fn cdf_estimate_all(&self) -> Vec<f64> {
        let n_leaves = self.config.partition.num_leaves();
        let rows = self.draws.len();
        let mut columns = vec![Vec::with_capacity(rows); n_leaves + 1];
        for row in &self.draws {
            let mut acc = 0.0;
            columns[0].push(0.0);
            for (i, &p) in row.as_slice().iter().enumerate() {
                acc += p;
                columns[i + 1].push(acc);
            }
        }
        columns.into_iter().map(median).collect()
    }

    /// Posterior-mean CDF at endpoint j (used by diagnostics and tests).
    pub fn cdf_mean(&self, j: usize) -> f64 {
        let sum: f64 = self.draws.iter().map(|row| row.cdf_at(j)).sum();
        sum / self.draws.len() as f64
    }

    /// Posterior quantile of the CDF at endpoint j (order statistic at
    /// ceil(level * n), clamped to the draw range).
    pub fn cdf_posterior_quantile(&self, j: usize, level: f64) -> f64 {
        assert!((0.0..=1.0).contains(&level));
        let mut vals: Vec<f64> = self.draws.iter().map(|row| row.cdf_at(j)).collect();
        let n = vals.len();
        let rank = ((level * n as f64).ceil() as usize).clamp(1, n) - 1;
        *vals
            .select_nth_unstable_by(rank, |a, b| a.partial_cmp(b).unwrap())
            .1
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    let n = v.len();
    let cmp = |a: &f64, b: &f64| a.partial_cmp(b).unwrap();
    if n % 2 == 1 {
        *v.select_nth_unstable_by(n / 2, cmp).1
    } else {
        let (below, at, _) = v.select_nth_unstable_by(n / 2, cmp);
        let lower = below.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + *at)
    }
}

/// Per-record average binomial likelihood over each leaf:
/// entry (k, i) = (1 / width_i) * integral over leaf i of
/// binom(x_k; m_k, inv_logit(theta)) d theta, by `nodes`-point
/// Gauss-Legendre quadrature.
pub fn leaf_likelihood_table(
    data: &BinomialDataset,
    part: &DyadicPartition,
    nodes: usize,
) -> Vec<Vec<f64>> {
    let rows = unique_rows(&data.sorted_records(), part, nodes);
    let by_key: std::collections::HashMap<(u64, u64), usize> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| ((r.record.successes, r.record.trials), i))
        .collect();
    data.records()
        .iter()
        .map(|r| rows[by_key[&(r.successes, r.trials)]].likelihood.clone())
        .collect()
}

struct UniqueRow {
    record: BinomialRecord,
    multiplicity: u64,
    likelihood: Vec<f64>,
}

/// Groups sorted records and computes one likelihood row per distinct
/// (x, m) pair.
fn unique_rows(sorted: &[BinomialRecord], part: &DyadicPartition, nodes: usize) -> Vec<UniqueRow> {
    let gl = quad::gauss_legendre(nodes);
    // Precompute per-leaf node positions and (log p, log 1-p) at each node.
    let n_leaves = part.num_leaves();
    let mut node_logs: Vec<(f64, f64, f64)> = Vec::with_capacity(n_leaves * nodes);
    for leaf in 1..=n_leaves {
        let lo = part.endpoint(leaf - 1);
        let hi = part.endpoint(leaf);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for &(x, w) in &gl {
            let theta = mid + half * x;
            // ln(inv_logit(theta)) and ln(1 - inv_logit(theta)).
            let lp = -softplus(-theta);
            let lq = -softplus(theta);
            node_logs.push((0.5 * w, lp, lq));
        }
    }

    let mut rows: Vec<UniqueRow> = Vec::new();
    for r in sorted {
        if let Some(last) = rows.last_mut() {
            if last.record == *r {
                last.multiplicity += 1;
                continue;
            }
        }
        let x = r.successes as f64;
        let mx = (r.trials - r.successes) as f64;
        let lncoef = ln_binomial(r.trials, r.successes);
        let mut lik = Vec::with_capacity(n_leaves);
        for leaf in 0..n_leaves {
            let mut acc = 0.0;
            for &(w, lp, lq) in &node_logs[leaf * nodes..(leaf + 1) * nodes] {
                acc += w * (lncoef + x * lp + mx * lq).exp();
            }
            lik.push(acc);
        }
        rows.push(UniqueRow {
            record: *r,
            multiplicity: 1,
            likelihood: lik,
        });
    }
    rows
}

fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t
    } else {
        t.exp().ln_1p()
    }
}

/// Samples a leaf index (1-based) with probability proportional to
/// probs_i * row_i. Errors if every weight is zero.
pub fn sample_leaf_assignment<R: Rng + ?Sized>(
    row: &[f64],
    probs: &LeafProbs,
    rng: &mut R,
) -> Result<usize> {
    assert_eq!(row.len(), probs.len());
    let mut cum = Vec::with_capacity(row.len());
    let mut total = 0.0;
    for (w, p) in row.iter().zip(probs.as_slice()) {
        total += w * p;
        cum.push(total);
    }
    if !(total > 0.0) {
        return Err(Error::ZeroWeightRow);
    }
    let u: f64 = rng.gen::<f64>() * total;
    Ok(cum.partition_point(|&c| c < u).min(row.len() - 1) + 1)
}

/// Draws a within-leaf theta for one record, weighting the quadrature nodes
/// of the leaf by their binomial likelihood. Diagnostics only; the sampler
/// itself never needs theta beyond its leaf.
pub fn sample_theta_within_leaf<R: Rng + ?Sized>(
    record: BinomialRecord,
    leaf: usize,
    part: &DyadicPartition,
    nodes: usize,
    rng: &mut R,
) -> f64 {
    let gl = quad::gauss_legendre(nodes);
    let lo = part.endpoint(leaf - 1);
    let hi = part.endpoint(leaf);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let x = record.successes as f64;
    let mx = (record.trials - record.successes) as f64;
    let weights: Vec<f64> = gl
        .iter()
        .map(|&(t, w)| {
            let theta = mid + half * t;
            w * (x * -softplus(-theta) + mx * -softplus(theta)).exp()
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        // Degenerate underflow: fall back to the leaf midpoint.
        return mid;
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u <= acc {
            return mid + half * gl[i].0;
        }
    }
    mid + half * gl.last().unwrap().0
}

/// Runs the Gibbs sampler and returns post-burn-in leaf-probability draws.
///
/// The chain is deterministic given (data, config); records are treated as
/// exchangeable, so permuting the dataset leaves the output unchanged.
pub fn run_gibbs(data: &BinomialDataset, cfg: &GibbsConfig) -> Result<PosteriorDraws> {
    cfg.validate()?;
    let part = &cfg.partition;
    let n_leaves = part.num_leaves();
    let level = part.level();
    let rows = unique_rows(&data.sorted_records(), part, cfg.within_leaf_nodes);
    let prior = BetaHyper::symmetric_prior(level, cfg.prior_alpha0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut probs = LeafProbs::uniform(level);
    let mut draws = Vec::with_capacity(cfg.iterations - cfg.burn_in);
    let mut assignment_sums = Vec::with_capacity(cfg.iterations - cfg.burn_in);
    let mut cum = vec![0.0f64; n_leaves];
    for sweep in 0..cfg.iterations {
        let mut leaf_counts = vec![0u64; n_leaves];
        for row in &rows {
            let mut total = 0.0;
            for ((c, &lik), &p) in cum.iter_mut().zip(&row.likelihood).zip(probs.as_slice()) {
                total += lik * p;
                *c = total;
            }
            if !(total > 0.0) {
                return Err(Error::ZeroWeightRow);
            }
            for _ in 0..row.multiplicity {
                let u: f64 = rng.gen::<f64>() * total;
                let leaf = cum.partition_point(|&c| c < u).min(n_leaves - 1);
                leaf_counts[leaf] += 1;
            }
        }
        let counts = NodeCounts::from_leaf_counts(leaf_counts.clone());
        let hyper = prior.posterior(&counts)?;
        probs = fpt::sample_leaf_probs(&hyper, &mut rng);
        if sweep >= cfg.burn_in {
            draws.push(probs.clone());
            let sum: f64 = leaf_counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as f64 + 1.0) * c as f64)
                .sum();
            assignment_sums.push(sum);
        }
    }
    Ok(PosteriorDraws {
        draws,
        assignment_sums,
        config: cfg.clone(),
    })
}
