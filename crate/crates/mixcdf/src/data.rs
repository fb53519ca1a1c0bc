//! Binomial mixture sample: K records of (successes, trials).

use serde::{Deserialize, Serialize};
use std::io::BufRead;

use crate::error::{Error, Result};

/// One binomial observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinomialRecord {
    pub successes: u64,
    pub trials: u64,
}

/// A sample of independent binomial counts with per-record trial sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinomialDataset {
    records: Vec<BinomialRecord>,
}

impl BinomialDataset {
    /// Validates 0 <= x_k <= m_k and m_k >= 1 for every record.
    pub fn new(records: Vec<(u64, u64)>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let records = records
            .into_iter()
            .enumerate()
            .map(|(index, (successes, trials))| {
                if trials == 0 {
                    return Err(Error::ZeroTrials { index });
                }
                if successes > trials {
                    return Err(Error::SuccessesExceedTrials {
                        index,
                        successes,
                        trials,
                    });
                }
                Ok(BinomialRecord { successes, trials })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { records })
    }

    /// Parses line-oriented text with two comma-separated integers
    /// "successes,trials" per line. A single leading header line is allowed.
    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 'x,m', got '{trimmed}'"),
                });
            }
            let parse =
                |s: &str| -> std::result::Result<u64, std::num::ParseIntError> { s.parse::<u64>() };
            match (parse(parts[0]), parse(parts[1])) {
                (Ok(x), Ok(m)) => {
                    if m == 0 {
                        return Err(Error::Parse {
                            line: i + 1,
                            message: "trial count must be positive".into(),
                        });
                    }
                    if x > m {
                        return Err(Error::Parse {
                            line: i + 1,
                            message: format!("successes {x} exceed trials {m}"),
                        });
                    }
                    records.push(BinomialRecord {
                        successes: x,
                        trials: m,
                    });
                }
                _ if i == 0 && records.is_empty() => {
                    // Header line; skip.
                }
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("expected two integers, got '{trimmed}'"),
                    });
                }
            }
        }
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[BinomialRecord] {
        &self.records
    }

    pub fn trial_sizes(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.trials).collect()
    }

    /// Common trial size, or an error if the records mix sizes.
    pub fn common_trial_size(&self) -> Result<u64> {
        let first = self.records[0].trials;
        for r in &self.records {
            if r.trials != first {
                return Err(Error::UnequalTrialSizes {
                    first,
                    other: r.trials,
                });
            }
        }
        Ok(first)
    }

    /// Records sorted by (successes, trials). The model treats records as
    /// exchangeable, so every consumer that needs a canonical order (for
    /// reproducibility under permutation) uses this.
    pub fn sorted_records(&self) -> Vec<BinomialRecord> {
        let mut v = self.records.clone();
        v.sort();
        v
    }

    /// Splits into (subset, complement) by a seeded draw of `take` indices
    /// without replacement.
    pub fn split_random(&self, take: usize, rng: &mut impl rand::Rng) -> (Self, Self) {
        assert!(take >= 1 && take < self.len());
        let mut idx: Vec<usize> = (0..self.len()).collect();
        // Partial Fisher-Yates: the first `take` slots become the subset.
        for i in 0..take {
            let j = rng.gen_range(i..idx.len());
            idx.swap(i, j);
        }
        let chosen: std::collections::BTreeSet<usize> = idx[..take].iter().copied().collect();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, r) in self.records.iter().enumerate() {
            if chosen.contains(&i) {
                a.push(*r);
            } else {
                b.push(*r);
            }
        }
        (Self { records: a }, Self { records: b })
    }
}
