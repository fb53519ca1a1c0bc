//! Mixing distributions over success probabilities, including the two-atom
//! worst-case nulls, and the binomial / normal mixture distributions they
//! induce.

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

use crate::data::BinomialDataset;
use crate::error::{Error, Result};
use crate::fpt::{DyadicPartition, LeafProbs};
use crate::logit;
use crate::quad;

/// A distribution for the latent success probability P on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MixingDistribution {
    /// Finite support: (location, weight) pairs.
    Atoms(Vec<(f64, f64)>),
    /// Beta(a, b) on (0, 1).
    Beta { a: f64, b: f64 },
    /// Step density on the logit scale.
    StepDensity {
        probs: LeafProbs,
        partition: DyadicPartition,
    },
}

/// Which worst-case null family: `Min` places mass at P = 0 and at p0
/// (extremal for "CDF at p0 is small"), `Max` at p0 and at P = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WorstCaseKind {
    Min,
    Max,
}

/// Parameters of a worst-case null mixing distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseSpec {
    pub kind: WorstCaseKind,
    pub q0: f64,
    pub p0: f64,
}

impl WorstCaseSpec {
    pub fn new(kind: WorstCaseKind, q0: f64, p0: f64) -> Result<Self> {
        for (name, v) in [("q0", q0), ("p0", p0)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidProbability { name, value: v });
            }
        }
        Ok(Self { kind, q0, p0 })
    }

    pub fn min(q0: f64, p0: f64) -> Result<Self> {
        Self::new(WorstCaseKind::Min, q0, p0)
    }

    pub fn max(q0: f64, p0: f64) -> Result<Self> {
        Self::new(WorstCaseKind::Max, q0, p0)
    }
}

/// The two-atom worst-case mixing distribution for a spec:
/// min -> {(0, q0), (p0, 1-q0)}, max -> {(p0, q0), (1, 1-q0)}.
pub fn worst_case(spec: WorstCaseSpec) -> MixingDistribution {
    let atoms = match spec.kind {
        WorstCaseKind::Min => vec![(0.0, spec.q0), (spec.p0, 1.0 - spec.q0)],
        WorstCaseKind::Max => vec![(spec.p0, spec.q0), (1.0, 1.0 - spec.q0)],
    };
    MixingDistribution::Atoms(atoms)
}

impl MixingDistribution {
    /// Atom mixture with validation of weights and locations.
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidConfig("atom list is empty".into()));
        }
        for &(p, w) in &atoms {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidProbability {
                    name: "atom location",
                    value: p,
                });
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidWeights { sum: f64::NAN });
            }
        }
        let sum: f64 = atoms.iter().map(|a| a.1).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights { sum });
        }
        Ok(Self::Atoms(atoms))
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "beta parameters must be positive, got ({a}, {b})"
            )));
        }
        Ok(Self::Beta { a, b })
    }

    pub fn point_mass(p: f64) -> Result<Self> {
        Self::atoms(vec![(p, 1.0)])
    }

    /// Draws one success probability.
    pub fn sample_p<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Atoms(atoms) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for &(p, w) in atoms {
                    acc += w;
                    if u <= acc {
                        return p;
                    }
                }
                atoms.last().unwrap().0
            }
            Self::Beta { a, b } => crate::fpt::sample_beta(*a, *b, rng),
            Self::StepDensity { probs, partition } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut leaf = probs.len();
                for i in 1..=probs.len() {
                    acc += probs.as_slice()[i - 1];
                    if u <= acc {
                        leaf = i;
                        break;
                    }
                }
                let lo = partition.endpoint(leaf - 1);
                let hi = partition.endpoint(leaf);
                let theta = lo + (hi - lo) * rng.gen::<f64>();
                logit::inv_logit(theta)
            }
        }
    }

    /// CDF of the mixing distribution itself at p.
    pub fn cdf(&self, p: f64) -> f64 {
        match self {
            Self::Atoms(atoms) => atoms.iter().filter(|&&(a, _)| a <= p).map(|a| a.1).sum(),
            Self::Beta { a, b } => {
                if p <= 0.0 {
                    0.0
                } else if p >= 1.0 {
                    1.0
                } else {
                    statrs::distribution::Beta::new(*a, *b).unwrap().cdf(p)
                }
            }
            Self::StepDensity { probs, partition } => {
                if p <= 0.0 {
                    return 0.0;
                }
                if p >= 1.0 {
                    return 1.0;
                }
                let theta = logit::logit(p);
                if theta <= partition.lower() {
                    0.0
                } else if theta > partition.upper() {
                    1.0
                } else {
                    let leaf = partition.leaf_of(theta);
                    let lo = partition.endpoint(leaf - 1);
                    let within = (theta - lo) / partition.leaf_width(leaf);
                    probs.cdf_at(leaf - 1) + probs.as_slice()[leaf - 1] * within
                }
            }
        }
    }

    /// Smallest p with CDF(p) >= q, by bisection on the CDF.
    pub fn quantile(&self, q: f64) -> f64 {
        assert!((0.0..=1.0).contains(&q));
        if let Self::Atoms(atoms) = self {
            let mut sorted = atoms.clone();
            sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let mut acc = 0.0;
            for &(p, w) in &sorted {
                acc += w;
                if acc >= q - 1e-15 {
                    return p;
                }
            }
            return sorted.last().unwrap().0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= q {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Draws a dataset: P_k iid from the mixing distribution, then
/// X_k ~ Binomial(m_k, P_k). P = 0 and P = 1 are handled exactly.
pub fn sample_mixture<R: Rng + ?Sized>(
    mix: &MixingDistribution,
    trial_sizes: &[u64],
    rng: &mut R,
) -> BinomialDataset {
    assert!(!trial_sizes.is_empty() && trial_sizes.iter().all(|&m| m >= 1));
    let records = trial_sizes
        .iter()
        .map(|&m| {
            let p = mix.sample_p(rng);
            let x = sample_binomial(m, p, rng);
            (x, m)
        })
        .collect();
    BinomialDataset::new(records).expect("sampled records satisfy invariants")
}

fn sample_binomial<R: Rng + ?Sized>(m: u64, p: f64, rng: &mut R) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        m
    } else {
        rand_distr::Binomial::new(m, p)
            .expect("validated binomial parameters")
            .sample(rng)
    }
}

/// CDF of the binomial mixture at x: E_{P ~ mix} F_{Binomial(m, P)}(x).
///
/// Atom mixtures are evaluated exactly; the Beta and step-density variants
/// integrate the binomial CDF against the mixing density (adaptive
/// Gauss-Kronrod, absolute tolerance 1e-10).
pub fn mixture_cdf(mix: &MixingDistribution, m: u64, x: u64) -> f64 {
    assert!(x <= m && m >= 1);
    match mix {
        MixingDistribution::Atoms(atoms) => atoms
            .iter()
            .map(|&(p, w)| w * binomial_cdf(m, p, x))
            .sum(),
        MixingDistribution::Beta { a, b } => {
            let beta = statrs::distribution::Beta::new(*a, *b).unwrap();
            use statrs::distribution::Continuous;
            quad::adaptive_gk(
                |p| binomial_cdf(m, p, x) * beta.pdf(p),
                0.0,
                1.0,
                1e-10,
            )
        }
        MixingDistribution::StepDensity { probs, partition } => {
            // Per-leaf Gauss-Legendre on the logit scale.
            let mut total = 0.0;
            for leaf in 1..=probs.len() {
                let weight = probs.as_slice()[leaf - 1];
                if weight == 0.0 {
                    continue;
                }
                let lo = partition.endpoint(leaf - 1);
                let hi = partition.endpoint(leaf);
                let avg = quad::gauss_legendre_integral(
                    |theta| binomial_cdf(m, logit::inv_logit(theta), x),
                    lo,
                    hi,
                    16,
                ) / (hi - lo);
                total += weight * avg;
            }
            total
        }
    }
}

/// Binomial CDF with exact degenerate cases at p = 0 and p = 1.
pub fn binomial_cdf(m: u64, p: f64, x: u64) -> f64 {
    if x >= m {
        return 1.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    Binomial::new(p, m).expect("validated binomial parameters").cdf(x)
}

/// CDF at t of the normal-noise mixture: theta_hat ~ N(logit(P), sigma),
/// with the P = 0 atom contributing 1 and the P = 1 atom contributing 0 at
/// every finite t.
pub fn mixture_cdf_normal(mix: &MixingDistribution, sigma: f64, t: f64) -> f64 {
    assert!(sigma > 0.0);
    let norm = Normal::new(0.0, 1.0).unwrap();
    let noise_cdf = |p: f64| -> f64 {
        if p <= 0.0 {
            1.0
        } else if p >= 1.0 {
            0.0
        } else {
            norm.cdf((t - logit::logit(p)) / sigma)
        }
    };
    match mix {
        MixingDistribution::Atoms(atoms) => {
            atoms.iter().map(|&(p, w)| w * noise_cdf(p)).sum()
        }
        MixingDistribution::Beta { a, b } => {
            let beta = statrs::distribution::Beta::new(*a, *b).unwrap();
            use statrs::distribution::Continuous;
            quad::adaptive_gk(|p| noise_cdf(p) * beta.pdf(p), 0.0, 1.0, 1e-10)
        }
        MixingDistribution::StepDensity { probs, partition } => {
            let mut total = 0.0;
            for leaf in 1..=probs.len() {
                let weight = probs.as_slice()[leaf - 1];
                if weight == 0.0 {
                    continue;
                }
                let lo = partition.endpoint(leaf - 1);
                let hi = partition.endpoint(leaf);
                let avg = quad::gauss_legendre_integral(
                    |theta| norm.cdf((t - theta) / sigma),
                    lo,
                    hi,
                    16,
                ) / (hi - lo);
                total += weight * avg;
            }
            total
        }
    }
}
