//! Confidence intervals and confidence curves for the mixing distribution
//! by sequential test inversion, plus data-driven selection of the logit
//! shift parameter.
//!
//! All interval routines scan a grid of hypotheses and stop at the first
//! acceptance; the returned endpoint is the hypothesis point of the last
//! rejected test. Evaluation points ("statistic points") and hypothesis
//! points differ by the shift rho on the logit scale: GE-direction tests
//! evaluate the statistic below the hypothesis point, LE-direction tests
//! above it.

use serde::{Deserialize, Serialize};

use crate::data::BinomialDataset;
use crate::error::{Error, Result};
use crate::gibbs::{run_gibbs, GibbsConfig};
use crate::hyptest::{
    counts_test_ge, counts_test_le, deconv_test_given_statistic, shift_success_prob,
    shift_success_prob_down, Direction, HypothesisSpec, TestOutcome,
};
use crate::logit::{inv_logit, logit};
use crate::seed;

/// Which test statistic backs the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Counts,
    Deconv,
}

/// What the interval is for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Target {
    /// The q0 quantile of the mixing distribution.
    Quantile(f64),
    /// The mixing CDF at a success probability.
    CdfAt(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    Two,
}

/// One tested hypothesis in an interval's trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Where the hypothesis constrains the CDF (quantile scans) or the CDF
    /// value tested (CDF scans).
    pub hypothesis_point: f64,
    /// Success probability at which the statistic was evaluated.
    pub statistic_point: f64,
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub target: Target,
    pub side: Side,
    pub alpha: f64,
    pub rho: f64,
    pub method: Method,
    pub trace: Vec<TracePoint>,
}

impl ConfidenceInterval {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Pointwise confidence bounds for the mixing CDF over a grid of success
/// probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceCurve {
    pub p_grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub alpha: f64,
    pub rho: f64,
}

impl ConfidenceCurve {
    /// Sum of pointwise widths; the calibration objective.
    pub fn total_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .sum()
    }
}

/// Test engine shared by all interval constructions.
#[derive(Debug, Clone)]
pub struct Engine {
    pub method: Method,
    /// Gibbs configuration; its seed drives the observed-statistic chain.
    pub gibbs: GibbsConfig,
    /// Null replicates per Monte Carlo test.
    pub replicates: usize,
    /// Seed for the null-replicate streams.
    pub master_seed: u64,
}

impl Engine {
    pub fn counts(gibbs: GibbsConfig) -> Self {
        Self {
            method: Method::Counts,
            gibbs,
            replicates: 0,
            master_seed: 0,
        }
    }

    pub fn deconv(gibbs: GibbsConfig, replicates: usize, master_seed: u64) -> Self {
        Self {
            method: Method::Deconv,
            gibbs,
            replicates,
            master_seed,
        }
    }

    /// Runs the observed-statistic computation once for a dataset.
    fn prepare<'d>(&self, data: &'d BinomialDataset) -> Result<Prepared<'d>> {
        let mut null_trials = data.trial_sizes();
        null_trials.sort_unstable();
        let observed = match self.method {
            Method::Counts => {
                data.common_trial_size()?;
                None
            }
            Method::Deconv => Some(run_gibbs(data, &self.gibbs)?.cdf_estimate_all()),
        };
        Ok(Prepared {
            data,
            null_trials,
            observed,
        })
    }

    /// Observed statistics from `data`, null samples at `null_trials`
    /// (the literal reading of the calibration algorithm, which compares a
    /// calibration-set statistic to test-set-sized null statistics).
    fn prepare_with_null_trials<'d>(
        &self,
        data: &'d BinomialDataset,
        mut null_trials: Vec<u64>,
    ) -> Result<Prepared<'d>> {
        null_trials.sort_unstable();
        let observed = match self.method {
            Method::Counts => {
                data.common_trial_size()?;
                None
            }
            Method::Deconv => Some(run_gibbs(data, &self.gibbs)?.cdf_estimate_all()),
        };
        Ok(Prepared {
            data,
            null_trials,
            observed,
        })
    }
}

struct Prepared<'d> {
    data: &'d BinomialDataset,
    null_trials: Vec<u64>,
    /// Posterior-median CDF at every endpoint (deconv only).
    observed: Option<Vec<f64>>,
}

/// A statistic evaluation point: a plain success probability for the
/// counts statistic, a partition endpoint index for the deconv statistic.
#[derive(Debug, Clone, Copy)]
enum StatPoint {
    Prob(f64),
    Endpoint(usize),
}

impl Engine {
    /// Tests H in `direction` for the CDF at the hypothesis point implied
    /// by `point` and `rho`, at level `alpha`.
    fn run_test(
        &self,
        prep: &Prepared,
        direction: Direction,
        q0: f64,
        point: StatPoint,
        rho: f64,
        alpha: f64,
    ) -> Result<TracePoint> {
        match (self.method, point) {
            (Method::Counts, StatPoint::Prob(p)) => {
                let outcome = match direction {
                    Direction::Ge => counts_test_ge(prep.data, q0, p, rho, alpha)?,
                    Direction::Le => counts_test_le(prep.data, q0, p, rho, alpha)?,
                };
                Ok(TracePoint {
                    hypothesis_point: outcome.null_spec.p0,
                    statistic_point: p,
                    outcome,
                })
            }
            (Method::Deconv, StatPoint::Endpoint(j)) => {
                let a_j = self.gibbs.partition.endpoint(j);
                let p_star = match direction {
                    Direction::Ge => inv_logit(a_j + rho),
                    Direction::Le => inv_logit(a_j - rho),
                };
                let spec = HypothesisSpec::new(direction, q0, p_star)?;
                let observed = prep.observed.as_ref().expect("prepared deconv stats")[j];
                let outcome = deconv_test_given_statistic(
                    observed,
                    &prep.null_trials,
                    spec,
                    j,
                    alpha,
                    self.replicates,
                    &self.gibbs,
                    self.master_seed,
                )?;
                Ok(TracePoint {
                    hypothesis_point: p_star,
                    statistic_point: inv_logit(a_j),
                    outcome,
                })
            }
            _ => unreachable!("statistic point kind always matches the method"),
        }
    }

    /// Maps a statistic-space probability grid onto evaluation points,
    /// validating that deconv points sit on partition endpoints.
    fn stat_points(&self, grid: &[f64]) -> Result<Vec<StatPoint>> {
        grid.iter()
            .map(|&p| {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidProbability {
                        name: "grid point",
                        value: p,
                    });
                }
                match self.method {
                    Method::Counts => Ok(StatPoint::Prob(p)),
                    Method::Deconv => {
                        let part = &self.gibbs.partition;
                        let theta = logit(p);
                        let j = part.nearest_endpoint_index(theta);
                        if (part.endpoint(j) - theta).abs() > 1e-9 {
                            return Err(Error::InvalidConfig(format!(
                                "deconv grid point {p} is not a partition endpoint probability"
                            )));
                        }
                        Ok(StatPoint::Endpoint(j))
                    }
                }
            })
            .collect()
    }
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(())
}

fn validate_grid(grid: &[f64], decreasing: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let ok = grid.windows(2).all(|w| {
        if decreasing {
            w[0] > w[1]
        } else {
            w[0] < w[1]
        }
    });
    if !ok {
        return Err(Error::NonMonotoneGrid {
            order: if decreasing { "decreasing" } else { "increasing" },
        });
    }
    if grid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::NonMonotoneGrid {
            order: if decreasing { "decreasing" } else { "increasing" },
        });
    }
    Ok(())
}

/// Scans hypotheses in grid order, stopping at the first acceptance.
/// Returns the number of leading rejections and the trace.
fn scan_until_acceptance(
    count: usize,
    mut test: impl FnMut(usize) -> Result<TracePoint>,
) -> Result<(usize, Vec<TracePoint>)> {
    let mut trace = Vec::new();
    for n in 0..count {
        let point = test(n)?;
        let reject = point.outcome.reject;
        trace.push(point);
        if !reject {
            return Ok((n, trace));
        }
    }
    Ok((count, trace))
}

/// Left-tailed interval [0, p_ul] for the q0 quantile: tests
/// H_GE(q0; p*_n) along a decreasing grid of statistic points p_n, with
/// p*_n = shift(p_n, rho); p_ul is the hypothesis point of the smallest
/// rejected grid entry, or 1 if the first test accepts.
pub fn ci_quantile_left(
    data: &BinomialDataset,
    q0: f64,
    alpha: f64,
    rho: f64,
    grid: &[f64],
    engine: &Engine,
) -> Result<ConfidenceInterval> {
    validate_alpha(alpha)?;
    validate_grid(grid, true)?;
    let prep = engine.prepare(data)?;
    let points = engine.stat_points(grid)?;
    let (rejections, trace) = scan_until_acceptance(points.len(), |n| {
        engine.run_test(&prep, Direction::Ge, q0, points[n], rho, alpha)
    })?;
    let upper = if rejections == 0 {
        1.0
    } else {
        trace[rejections - 1].hypothesis_point
    };
    Ok(ConfidenceInterval {
        lower: 0.0,
        upper,
        target: Target::Quantile(q0),
        side: Side::Left,
        alpha,
        rho,
        method: engine.method,
        trace,
    })
}

/// Right-tailed interval [p_ll, 1] for the q0 quantile: tests
/// H_LE(q0; p*_n) along an increasing grid, p*_n = shift_down(p_n, rho).
pub fn ci_quantile_right(
    data: &BinomialDataset,
    q0: f64,
    alpha: f64,
    rho: f64,
    grid: &[f64],
    engine: &Engine,
) -> Result<ConfidenceInterval> {
    validate_alpha(alpha)?;
    validate_grid(grid, false)?;
    let prep = engine.prepare(data)?;
    let points = engine.stat_points(grid)?;
    let (rejections, trace) = scan_until_acceptance(points.len(), |n| {
        engine.run_test(&prep, Direction::Le, q0, points[n], rho, alpha)
    })?;
    let lower = if rejections == 0 {
        0.0
    } else {
        trace[rejections - 1].hypothesis_point
    };
    Ok(ConfidenceInterval {
        lower,
        upper: 1.0,
        target: Target::Quantile(q0),
        side: Side::Right,
        alpha,
        rho,
        method: engine.method,
        trace,
    })
}

/// Statistic point for a CDF-interval hypothesis at p0: the counts
/// statistic shifts p0 on the logit scale; the deconv statistic snaps to
/// the nearest admissible endpoint, enlarging the effective shift.
fn cdf_stat_point(
    engine: &Engine,
    p0: f64,
    rho: f64,
    direction: Direction,
) -> Result<Option<StatPoint>> {
    if !(0.0..=1.0).contains(&p0) || !p0.is_finite() {
        return Err(Error::InvalidProbability {
            name: "p0",
            value: p0,
        });
    }
    // Degenerate endpoints admit no statistic point; the scan returns the
    // trivial interval (at p0 = 1 the LE hypotheses are all true anyway).
    if p0 <= 0.0 || p0 >= 1.0 {
        return Ok(None);
    }
    match engine.method {
        Method::Counts => {
            let p = match direction {
                // LE tests evaluate above the hypothesis point.
                Direction::Le => shift_success_prob(p0, rho),
                Direction::Ge => shift_success_prob_down(p0, rho),
            };
            Ok(Some(StatPoint::Prob(p)))
        }
        Method::Deconv => {
            let part = &engine.gibbs.partition;
            let theta = logit(p0);
            let endpoints = part.endpoints();
            let j = match direction {
                Direction::Le => {
                    // Smallest endpoint at or above logit(p0) + rho.
                    let target = theta + rho;
                    match endpoints.iter().position(|&a| a >= target - 1e-12) {
                        Some(j) => j,
                        None => return Ok(None),
                    }
                }
                Direction::Ge => {
                    // Largest endpoint at or below logit(p0) - rho.
                    let target = theta - rho;
                    match endpoints.iter().rposition(|&a| a <= target + 1e-12) {
                        Some(j) => j,
                        None => return Ok(None),
                    }
                }
            };
            Ok(Some(StatPoint::Endpoint(j)))
        }
    }
}

/// Hypothesis-specific test for CDF intervals: the hypothesis point is p0
/// itself, the statistic point comes from [`cdf_stat_point`].
fn run_cdf_test(
    engine: &Engine,
    prep: &Prepared,
    direction: Direction,
    q: f64,
    p0: f64,
    point: StatPoint,
    alpha: f64,
) -> Result<TracePoint> {
    match (engine.method, point) {
        (Method::Counts, StatPoint::Prob(p_stat)) => {
            // Recover the effective rho from the statistic point.
            let rho_eff = (logit(p_stat) - logit(p0)).abs();
            let outcome = match direction {
                Direction::Ge => counts_test_ge(prep.data, q, p_stat, rho_eff, alpha)?,
                Direction::Le => counts_test_le(prep.data, q, p_stat, rho_eff, alpha)?,
            };
            Ok(TracePoint {
                hypothesis_point: q,
                statistic_point: p_stat,
                outcome,
            })
        }
        (Method::Deconv, StatPoint::Endpoint(j)) => {
            let spec = HypothesisSpec::new(direction, q, p0)?;
            let observed = prep.observed.as_ref().expect("prepared deconv stats")[j];
            let outcome = deconv_test_given_statistic(
                observed,
                &prep.null_trials,
                spec,
                j,
                alpha,
                engine.replicates,
                &engine.gibbs,
                engine.master_seed,
            )?;
            Ok(TracePoint {
                hypothesis_point: q,
                statistic_point: inv_logit(engine.gibbs.partition.endpoint(j)),
                outcome,
            })
        }
        _ => unreachable!(),
    }
}

/// Left-tailed interval [0, q_ul] for the mixing CDF at p0: tests
/// H_LE(q_n; p0) along a decreasing q-grid.
pub fn ci_cdf_left(
    data: &BinomialDataset,
    p0: f64,
    alpha: f64,
    rho: f64,
    q_grid: &[f64],
    engine: &Engine,
) -> Result<ConfidenceInterval> {
    validate_alpha(alpha)?;
    validate_grid(q_grid, true)?;
    let prep = engine.prepare(data)?;
    ci_cdf_left_prepared(&prep, p0, alpha, rho, q_grid, engine)
}

fn ci_cdf_left_prepared(
    prep: &Prepared,
    p0: f64,
    alpha: f64,
    rho: f64,
    q_grid: &[f64],
    engine: &Engine,
) -> Result<ConfidenceInterval> {
    let point = cdf_stat_point(engine, p0, rho, Direction::Le)?;
    let (rejections, trace) = match point {
        None => (0, Vec::new()),
        Some(point) => scan_until_acceptance(q_grid.len(), |n| {
            run_cdf_test(engine, prep, Direction::Le, q_grid[n], p0, point, alpha)
        })?,
    };
    let upper = if rejections == 0 {
        1.0
    } else {
        trace[rejections - 1].hypothesis_point
    };
    Ok(ConfidenceInterval {
        lower: 0.0,
        upper,
        target: Target::CdfAt(p0),
        side: Side::Left,
        alpha,
        rho,
        method: engine.method,
        trace,
    })
}

/// Right-tailed interval [q_ll, 1] for the mixing CDF at p0: tests
/// H_GE(q_n; p0) along an increasing q-grid.
pub fn ci_cdf_right(
    data: &BinomialDataset,
    p0: f64,
    alpha: f64,
    rho: f64,
    q_grid: &[f64],
    engine: &Engine,
) -> Result<ConfidenceInterval> {
    validate_alpha(alpha)?;
    validate_grid(q_grid, false)?;
    let prep = engine.prepare(data)?;
    ci_cdf_right_prepared(&prep, p0, alpha, rho, q_grid, engine)
}

fn ci_cdf_right_prepared(
    prep: &Prepared,
    p0: f64,
    alpha: f64,
    rho: f64,
    q_grid: &[f64],
    engine: &Engine,
) -> Result<ConfidenceInterval> {
    let point = cdf_stat_point(engine, p0, rho, Direction::Ge)?;
    let (rejections, trace) = match point {
        None => (0, Vec::new()),
        Some(point) => scan_until_acceptance(q_grid.len(), |n| {
            run_cdf_test(engine, prep, Direction::Ge, q_grid[n], p0, point, alpha)
        })?,
    };
    let lower = if rejections == 0 {
        0.0
    } else {
        trace[rejections - 1].hypothesis_point
    };
    Ok(ConfidenceInterval {
        lower,
        upper: 1.0,
        target: Target::CdfAt(p0),
        side: Side::Right,
        alpha,
        rho,
        method: engine.method,
        trace,
    })
}

/// Intersection of complementary one-sided intervals at level alpha/2
/// each; empty intersections are reported, not clamped.
pub fn ci_two_sided(
    left: &ConfidenceInterval,
    right: &ConfidenceInterval,
) -> Result<ConfidenceInterval> {
    if left.side != Side::Left || right.side != Side::Right {
        return Err(Error::InvalidConfig(
            "two-sided interval needs a left-tailed and a right-tailed input".into(),
        ));
    }
    let same_target = match (left.target, right.target) {
        (Target::Quantile(a), Target::Quantile(b)) => (a - b).abs() < 1e-12,
        (Target::CdfAt(a), Target::CdfAt(b)) => (a - b).abs() < 1e-12,
        _ => false,
    };
    if !same_target {
        return Err(Error::InvalidConfig(
            "two-sided interval inputs target different parameters".into(),
        ));
    }
    if (left.alpha - right.alpha).abs() > 1e-12 {
        return Err(Error::InvalidConfig(
            "two-sided interval inputs must share the same level".into(),
        ));
    }
    if right.lower > left.upper {
        return Err(Error::EmptyIntersection {
            lower: right.lower,
            upper: left.upper,
        });
    }
    let mut trace = left.trace.clone();
    trace.extend(right.trace.clone());
    Ok(ConfidenceInterval {
        lower: right.lower,
        upper: left.upper,
        target: left.target,
        side: Side::Two,
        alpha: left.alpha + right.alpha,
        rho: left.rho,
        method: left.method,
        trace,
    })
}

/// Options for curve construction.
#[derive(Debug, Clone, Copy)]
pub struct CurveOptions {
    /// Resume each q-scan where the previous grid point stopped
    /// (the monotonicity shortcut). Disabled, every grid point gets a full
    /// standalone scan.
    pub use_shortcut: bool,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self { use_shortcut: true }
    }
}

/// Pointwise 1 - alpha confidence curves for the mixing CDF over an
/// increasing p-grid: at each p the lower bound comes from a right-tailed
/// interval and the upper bound from a left-tailed interval, each at level
/// 1 - alpha/2. Both bounds are monotonized along the grid.
pub fn confidence_curves(
    data: &BinomialDataset,
    alpha: f64,
    rho: f64,
    p_grid: &[f64],
    q_grid: &[f64],
    engine: &Engine,
    options: CurveOptions,
) -> Result<ConfidenceCurve> {
    validate_alpha(alpha)?;
    validate_grid(p_grid, false)?;
    validate_grid(q_grid, false)?;
    if engine.method == Method::Deconv {
        // Two-sided curves need the shift to map endpoints to endpoints.
        let spacing = engine.gibbs.partition.regular_spacing()?;
        let steps = (rho / spacing).round();
        if (rho - steps * spacing).abs() > 1e-9 {
            return Err(Error::RhoNotGridAligned {
                rho,
                spacing,
            });
        }
    }
    let prep = engine.prepare(data)?;
    let half_alpha = alpha / 2.0;
    let n_p = p_grid.len();

    // Lower curve: increasing p, increasing q, GE tests.
    let mut lower = vec![0.0f64; n_p];
    let mut resume = 0usize;
    for (jp, &p0) in p_grid.iter().enumerate() {
        let start = if options.use_shortcut { resume } else { 0 };
        if start >= q_grid.len() {
            lower[jp] = *q_grid.last().unwrap();
            continue;
        }
        let interval =
            ci_cdf_right_prepared(&prep, p0, half_alpha, rho, &q_grid[start..], engine)?;
        let rejected = interval
            .trace
            .iter()
            .filter(|t| t.outcome.reject)
            .count();
        resume = start + rejected;
        lower[jp] = if resume == 0 { 0.0 } else { q_grid[resume - 1] };
    }

    // Upper curve: decreasing p, decreasing q, LE tests.
    let descending: Vec<f64> = q_grid.iter().rev().copied().collect();
    let mut upper = vec![1.0f64; n_p];
    let mut resume_desc = 0usize;
    for jp in (0..n_p).rev() {
        let start = if options.use_shortcut { resume_desc } else { 0 };
        if start >= descending.len() {
            upper[jp] = descending[descending.len() - 1];
            continue;
        }
        let interval =
            ci_cdf_left_prepared(&prep, p_grid[jp], half_alpha, rho, &descending[start..], engine)?;
        let rejected = interval
            .trace
            .iter()
            .filter(|t| t.outcome.reject)
            .count();
        resume_desc = start + rejected;
        upper[jp] = if resume_desc == 0 {
            1.0
        } else {
            descending[resume_desc - 1]
        };
    }

    // Monotonize along p; both bounds are nondecreasing for a CDF.
    for j in 1..n_p {
        lower[j] = lower[j].max(lower[j - 1]);
        upper[j] = upper[j].max(upper[j - 1]);
    }
    for j in 0..n_p {
        upper[j] = upper[j].max(lower[j]);
    }
    Ok(ConfidenceCurve {
        p_grid: p_grid.to_vec(),
        lower,
        upper,
        alpha,
        rho,
    })
}

/// Default decreasing quantile grid p_n = (100 - n) / 100, n = 1..=99.
pub fn default_quantile_grid() -> Vec<f64> {
    (1..=99).map(|n| (100 - n) as f64 / 100.0).collect()
}

/// Default increasing 99-point CDF grid on (0, 1).
pub fn default_q_grid() -> Vec<f64> {
    (1..=99).map(|n| n as f64 / 100.0).collect()
}

/// Statistic grid for deconv quantile scans: every `stride`-th interior
/// partition endpoint as a success probability, in the given order.
pub fn deconv_statistic_grid(
    partition: &crate::fpt::DyadicPartition,
    stride: usize,
    decreasing: bool,
) -> Vec<f64> {
    let n = partition.num_leaves();
    let mut grid: Vec<f64> = (1..n)
        .step_by(stride.max(1))
        .map(|j| inv_logit(partition.endpoint(j)))
        .collect();
    if decreasing {
        grid.reverse();
    }
    grid
}

/// Result of shift calibration for a quantile interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibratedQuantile {
    pub rho: f64,
    pub interval: ConfidenceInterval,
    /// Calibration-set interval lengths per candidate rho.
    pub candidate_lengths: Vec<(f64, f64)>,
}

/// Data-driven shift selection for a left-tailed quantile interval.
///
/// A seeded random subset (of fraction `split_fraction`) becomes the
/// calibration set. For each candidate rho, a calibration interval is built
/// from the calibration-set statistic against null statistics simulated at
/// the test-set trial sizes; the rho with the shortest interval wins (ties
/// to the smaller rho). The returned interval uses the test set only.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_rho_quantile(
    data: &BinomialDataset,
    q0: f64,
    alpha: f64,
    split_fraction: f64,
    rho_grid: &[f64],
    grid: &[f64],
    split_seed: u64,
    engine: &Engine,
) -> Result<CalibratedQuantile> {
    let (cal, test) = split_dataset(data, split_fraction, split_seed)?;
    if rho_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let cal_engine = engine.clone();
    let prep = cal_engine.prepare_with_null_trials(&cal, test.trial_sizes())?;

    let mut best: Option<(f64, f64)> = None;
    let mut candidate_lengths = Vec::new();
    let mut rhos: Vec<f64> = rho_grid.to_vec();
    rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &rho in &rhos {
        let interval = ci_quantile_left_prepared(&prep, q0, alpha, rho, grid, &cal_engine)?;
        let len = interval.length();
        candidate_lengths.push((rho, len));
        // Strict improvement keeps the smallest rho among minimizers.
        if best.is_none_or(|(_, l)| len < l) {
            best = Some((rho, len));
        }
    }
    let (rho_min, _) = best.unwrap();
    let interval = ci_quantile_left(&test, q0, alpha, rho_min, grid, engine)?;
    Ok(CalibratedQuantile {
        rho: rho_min,
        interval,
        candidate_lengths,
    })
}

fn ci_quantile_left_prepared(
    prep: &Prepared,
    q0: f64,
    alpha: f64,
    rho: f64,
    grid: &[f64],
    engine: &Engine,
) -> Result<ConfidenceInterval> {
    validate_grid(grid, true)?;
    let points = engine.stat_points(grid)?;
    let (rejections, trace) = scan_until_acceptance(points.len(), |n| {
        engine.run_test(prep, Direction::Ge, q0, points[n], rho, alpha)
    })?;
    let upper = if rejections == 0 {
        1.0
    } else {
        trace[rejections - 1].hypothesis_point
    };
    Ok(ConfidenceInterval {
        lower: 0.0,
        upper,
        target: Target::Quantile(q0),
        side: Side::Left,
        alpha,
        rho,
        method: engine.method,
        trace,
    })
}

/// Data-driven shift selection for confidence curves: minimizes the summed
/// lengths of the nine calibration-set two-sided CDF intervals at the
/// admissible success probabilities nearest 0.1, ..., 0.9.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_rho_curves(
    data: &BinomialDataset,
    alpha: f64,
    split_fraction: f64,
    rho_grid: &[f64],
    q_grid: &[f64],
    split_seed: u64,
    engine: &Engine,
) -> Result<f64> {
    let (cal, test) = split_dataset(data, split_fraction, split_seed)?;
    if rho_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    validate_grid(q_grid, false)?;
    let prep = engine.prepare_with_null_trials(&cal, test.trial_sizes())?;

    // Success probabilities nearest the deciles; for the deconv statistic
    // these snap to partition endpoints.
    let deciles: Vec<f64> = (1..=9)
        .map(|d| {
            let target = d as f64 / 10.0;
            match engine.method {
                Method::Counts => target,
                Method::Deconv => {
                    let part = &engine.gibbs.partition;
                    let j = part.nearest_endpoint_index(logit(target));
                    inv_logit(part.endpoint(j.clamp(1, part.num_leaves() - 1)))
                }
            }
        })
        .collect();

    let descending: Vec<f64> = q_grid.iter().rev().copied().collect();
    let mut best: Option<(f64, f64)> = None;
    let mut rhos: Vec<f64> = rho_grid.to_vec();
    rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &rho in &rhos {
        let mut total = 0.0;
        for &p0 in &deciles {
            let left = ci_cdf_left_prepared(&prep, p0, alpha / 2.0, rho, &descending, engine)?;
            let right = ci_cdf_right_prepared(&prep, p0, alpha / 2.0, rho, q_grid, engine)?;
            // Interval length; an empty intersection counts as zero width,
            // which never happens for valid one-sided pairs on the same
            // statistic (the scans share the observed statistic).
            total += (left.upper - right.lower).max(0.0);
        }
        if best.is_none_or(|(_, l)| total < l) {
            best = Some((rho, total));
        }
    }
    Ok(best.unwrap().0)
}

/// Seeded calibration/test split. Errors if the dataset is too small.
fn split_dataset(
    data: &BinomialDataset,
    split_fraction: f64,
    split_seed: u64,
) -> Result<(BinomialDataset, BinomialDataset)> {
    if data.len() < 10 {
        return Err(Error::SplitTooSmall { size: data.len() });
    }
    if !(split_fraction > 0.0 && split_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "split fraction must be in (0, 1), got {split_fraction}"
        )));
    }
    let take = (split_fraction * data.len() as f64).ceil() as usize;
    if take == 0 || take >= data.len() {
        return Err(Error::SplitTooSmall { size: data.len() });
    }
    let mut rng = seed::rng(split_seed, "calibration-split", 0);
    Ok(data.split_random(take, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpt::DyadicPartition;
    use crate::mixing::{sample_mixture, MixingDistribution, WorstCaseSpec};

    fn counts_engine() -> Engine {
        Engine::counts(GibbsConfig::new(DyadicPartition::grid65(), 0))
    }

    fn deconv_engine(level: u32, seed: u64) -> Engine {
        let part = DyadicPartition::regular(level, -5.0, 5.0).unwrap();
        let gibbs = GibbsConfig::new(part, seed).with_iterations(150, 30);
        Engine::deconv(gibbs, 30, seed)
    }

    fn beta_sample(k: usize, m: u64, seed: u64) -> BinomialDataset {
        let mix = MixingDistribution::beta(2.0, 2.0).unwrap();
        let mut rng = seed::rng(seed, "ci-test-data", 0);
        sample_mixture(&mix, &vec![m; k], &mut rng)
    }

    #[test]
    fn early_stop_equals_exhaustive_on_monotone_patterns() {
        // Brute force over all 2^6 accept/reject patterns on a 6-point
        // grid; on the monotone ones (a prefix of rejections), stop at
        // first acceptance must equal exhaustive scan + smallest rejection.
        let dummy_outcome = |reject: bool| TestOutcome {
            p_value: if reject { 0.01 } else { 0.5 },
            reject,
            statistic: 0.0,
            alpha: 0.05,
            null_spec: WorstCaseSpec::min(0.4, 0.5).unwrap(),
            replicates: 0,
        };
        for pattern in 0u32..64 {
            let rejects: Vec<bool> = (0..6).map(|i| pattern & (1 << i) != 0).collect();
            let monotone = rejects.windows(2).all(|w| w[0] || !w[1]);
            if !monotone {
                continue;
            }
            let (stop, trace) = scan_until_acceptance(6, |n| {
                Ok(TracePoint {
                    hypothesis_point: n as f64,
                    statistic_point: n as f64,
                    outcome: dummy_outcome(rejects[n]),
                })
            })
            .unwrap();
            let sequential = if stop == 0 {
                None
            } else {
                Some(trace[stop - 1].hypothesis_point)
            };
            // Exhaustive: smallest-index run of rejections from the start.
            let exhaustive = rejects
                .iter()
                .enumerate()
                .take_while(|(_, &r)| r)
                .map(|(i, _)| i as f64)
                .last();
            assert_eq!(sequential, exhaustive, "pattern {rejects:?}");
        }
    }

    #[test]
    fn quantile_left_trivial_and_all_reject_paths() {
        let engine = counts_engine();
        let grid = default_quantile_grid();
        // q0 = 1: gamma0 = 1, the quantile equals K, nothing can reject.
        let data = beta_sample(40, 20, 1);
        let ci = ci_quantile_left(&data, 1.0, 0.05, 0.0, &grid, &engine).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.0, 1.0));
        assert_eq!(ci.trace.len(), 1);

        // All observations at zero: statistic 1 at every grid point, every
        // test rejects, and the interval ends at the smallest hypothesis
        // point.
        let data = BinomialDataset::new(vec![(0, 20); 80]).unwrap();
        let ci = ci_quantile_left(&data, 0.40, 0.05, 0.0, &grid, &engine).unwrap();
        assert_eq!(ci.trace.len(), grid.len());
        assert!((ci.upper - 0.01).abs() < 1e-12);
    }

    #[test]
    fn quantile_left_shift_moves_endpoint() {
        // The reported endpoint is the shifted hypothesis point of the
        // smallest rejected statistic point.
        let data = beta_sample(80, 20, 2);
        let engine = counts_engine();
        let grid = default_quantile_grid();
        let ci = ci_quantile_left(&data, 0.40, 0.05, 0.5, &grid, &engine).unwrap();
        if let Some(last_reject) = ci.trace.iter().rev().find(|t| t.outcome.reject) {
            assert!((ci.upper - last_reject.hypothesis_point).abs() < 1e-12);
            assert!(
                (crate::hyptest::shift_success_prob(last_reject.statistic_point, 0.5)
                    - ci.upper)
                    .abs()
                    < 1e-12
            );
        }
        assert!(ci.upper <= 1.0 && ci.upper >= 0.0);
    }

    #[test]
    fn quantile_right_mirror() {
        let engine = counts_engine();
        let grid: Vec<f64> = (1..=99).map(|n| n as f64 / 100.0).collect();
        // q0 = 0: H_LE(0; p) is true for every p; gamma0_le = 0 means the
        // null statistic is identically zero and nothing rejects.
        let data = beta_sample(40, 20, 3);
        let ci = ci_quantile_right(&data, 0.0, 0.05, 0.0, &grid, &engine).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.0, 1.0));

        // Point mass far right: the lower limit should clear 0.5.
        let data = BinomialDataset::new(vec![(45, 50); 100]).unwrap();
        let ci = ci_quantile_right(&data, 0.5, 0.05, 0.0, &grid, &engine).unwrap();
        assert!(ci.lower > 0.5, "lower = {}", ci.lower);
        assert_eq!(ci.upper, 1.0);
    }

    #[test]
    fn cdf_left_trivial_paths() {
        let engine = counts_engine();
        let qgrid: Vec<f64> = (1..=99).rev().map(|n| n as f64 / 100.0).collect();
        // All mass at zero proportions: CDF near 1 everywhere, accepts the
        // first hypothesis immediately.
        let data = BinomialDataset::new(vec![(0, 30); 50]).unwrap();
        let ci = ci_cdf_left(&data, 0.5, 0.05, 0.0, &qgrid, &engine).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.0, 1.0));

        // p0 = 1: the CDF there is 1, the upper bound always covers.
        let ci = ci_cdf_left(&data, 1.0, 0.05, 0.0, &qgrid, &engine).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.0, 1.0));
        assert!(ci.trace.is_empty());
        assert!(ci_cdf_left(&data, 1.5, 0.05, 0.0, &qgrid, &engine).is_err());
        // All mass near one: CDF at 0.5 is tiny. The scan stops at q = 0.10
        // where the null tail probability (1 - 0.1 F(15; 30, 0.5))^50 first
        // clears 0.05, leaving 0.11 as the smallest rejected value.
        let data = BinomialDataset::new(vec![(30, 30); 50]).unwrap();
        let ci = ci_cdf_left(&data, 0.5, 0.05, 0.0, &qgrid, &engine).unwrap();
        assert!((ci.upper - 0.11).abs() < 1e-12, "upper = {}", ci.upper);
    }

    #[test]
    fn cdf_right_detects_high_cdf() {
        let engine = counts_engine();
        let qgrid = default_q_grid();
        let data = BinomialDataset::new(vec![(0, 30); 50]).unwrap();
        let ci = ci_cdf_right(&data, 0.5, 0.05, 0.0, &qgrid, &engine).unwrap();
        assert!(ci.lower >= 0.85, "lower = {}", ci.lower);
        assert_eq!(ci.upper, 1.0);
    }

    #[test]
    fn two_sided_intersection_and_errors() {
        let engine = counts_engine();
        let qgrid = default_q_grid();
        let qgrid_desc: Vec<f64> = qgrid.iter().rev().copied().collect();
        let data = beta_sample(100, 20, 4);
        let left = ci_cdf_left(&data, 0.45, 0.025, 0.3, &qgrid_desc, &engine).unwrap();
        let right = ci_cdf_right(&data, 0.45, 0.025, 0.3, &qgrid, &engine).unwrap();
        let two = ci_two_sided(&left, &right).unwrap();
        assert_eq!(two.lower, right.lower);
        assert_eq!(two.upper, left.upper);
        assert!((two.alpha - 0.05).abs() < 1e-12);
        assert!(two.lower <= two.upper);

        // [0, 0.8] and [0.3, 1] intersect to [0.3, 0.8].
        let mk = |lower: f64, upper: f64, side: Side| ConfidenceInterval {
            lower,
            upper,
            target: Target::CdfAt(0.5),
            side,
            alpha: 0.05,
            rho: 0.0,
            method: Method::Counts,
            trace: vec![],
        };
        let two = ci_two_sided(&mk(0.0, 0.8, Side::Left), &mk(0.3, 1.0, Side::Right)).unwrap();
        assert_eq!((two.lower, two.upper), (0.3, 0.8));

        // Disjoint inputs are an error.
        let err = ci_two_sided(&mk(0.0, 0.2, Side::Left), &mk(0.4, 1.0, Side::Right));
        assert!(matches!(err, Err(Error::EmptyIntersection { .. })));

        // Mismatched sides and targets are errors.
        assert!(ci_two_sided(&mk(0.0, 0.8, Side::Left), &mk(0.3, 1.0, Side::Left)).is_err());
        let mut other = mk(0.3, 1.0, Side::Right);
        other.target = Target::Quantile(0.5);
        assert!(ci_two_sided(&mk(0.0, 0.8, Side::Left), &other).is_err());
    }

    #[test]
    fn grid_validation_errors() {
        let engine = counts_engine();
        let data = beta_sample(20, 20, 5);
        assert!(matches!(
            ci_quantile_left(&data, 0.4, 0.05, 0.0, &[], &engine),
            Err(Error::EmptyGrid)
        ));
        assert!(matches!(
            ci_quantile_left(&data, 0.4, 0.0, 0.0, &[0.5], &engine),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(matches!(
            ci_cdf_left(&data, 0.5, 1.0, 0.0, &[0.5], &engine),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(ci_quantile_left(&data, 0.4, 0.05, 0.0, &[0.2, 0.5], &engine).is_err());
        assert!(ci_quantile_right(&data, 0.4, 0.05, 0.0, &[0.5, 0.2], &engine).is_err());
    }

    #[test]
    fn deconv_interval_runs_and_is_reproducible() {
        let engine = deconv_engine(4, 11);
        let data = beta_sample(30, 20, 6);
        let grid = deconv_statistic_grid(&engine.gibbs.partition, 2, true);
        let a = ci_quantile_left(&data, 0.40, 0.10, 0.0, &grid, &engine).unwrap();
        let b = ci_quantile_left(&data, 0.40, 0.10, 0.0, &grid, &engine).unwrap();
        assert_eq!(a, b);
        assert!(a.upper > 0.0 && a.upper <= 1.0);
        assert!(!a.trace.is_empty());
        // Grid points that are not endpoints are rejected.
        assert!(ci_quantile_left(&data, 0.40, 0.10, 0.0, &[0.512345], &engine).is_err());
    }

    #[test]
    fn deconv_cdf_interval_snaps_to_admissible_endpoint() {
        let engine = deconv_engine(4, 13);
        let data = beta_sample(30, 20, 7);
        let qgrid_desc: Vec<f64> = (1..=19).rev().map(|n| n as f64 / 20.0).collect();
        // p0 slightly off-grid: statistic index must sit at or above
        // logit(p0) + rho for the LE scan.
        let p0 = 0.43;
        let rho = 0.2;
        let ci = ci_cdf_left(&data, p0, 0.10, rho, &qgrid_desc, &engine).unwrap();
        if let Some(t) = ci.trace.first() {
            let a_stat = logit(t.statistic_point);
            assert!(a_stat >= logit(p0) + rho - 1e-9);
        }
        // p0 so small that no endpoint sits below logit(p0) - rho: the
        // right-tailed interval degenerates to [0, 1].
        let tiny = 1e-4;
        let ci = ci_cdf_right(&data, tiny, 0.10, 0.0, &default_q_grid(), &engine).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.0, 1.0));
        assert!(ci.trace.is_empty());
    }

    #[test]
    fn curves_monotone_and_consistent_without_shortcut() {
        let engine = deconv_engine(3, 17);
        let data = beta_sample(40, 20, 8);
        let part = &engine.gibbs.partition;
        let p_grid: Vec<f64> = (2..7).map(|j| inv_logit(part.endpoint(j))).collect();
        let q_grid: Vec<f64> = (1..=19).map(|n| n as f64 / 20.0).collect();
        let curve = confidence_curves(
            &data,
            0.10,
            0.0,
            &p_grid,
            &q_grid,
            &engine,
            CurveOptions { use_shortcut: false },
        )
        .unwrap();
        for j in 0..p_grid.len() {
            assert!(curve.lower[j] <= curve.upper[j]);
            if j > 0 {
                assert!(curve.lower[j] >= curve.lower[j - 1]);
                assert!(curve.upper[j] >= curve.upper[j - 1]);
            }
        }
        // Without the shortcut, each point must match its standalone
        // one-sided interval (same seed policy, same grids), up to the
        // final monotonization.
        let qgrid_desc: Vec<f64> = q_grid.iter().rev().copied().collect();
        for (jp, &p0) in p_grid.iter().enumerate() {
            let left = ci_cdf_left(&data, p0, 0.05, 0.0, &qgrid_desc, &engine).unwrap();
            let right = ci_cdf_right(&data, p0, 0.05, 0.0, &q_grid, &engine).unwrap();
            let raw_upper = left.upper;
            let raw_lower = right.lower;
            // Monotonization can only tighten toward earlier grid points.
            assert!(curve.upper[jp] >= raw_upper - 1e-12);
            assert!(curve.lower[jp] >= raw_lower - 1e-12);
            if jp == 0 {
                assert!((curve.lower[jp] - raw_lower).abs() < 1e-12);
            }
            if jp == p_grid.len() - 1 {
                assert!((curve.upper[jp] - raw_upper).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curves_single_q_point_gives_step_bounds() {
        let engine = counts_engine();
        let data = beta_sample(60, 20, 9);
        let p_grid: Vec<f64> = vec![0.3, 0.5, 0.7];
        let q_grid = vec![0.5];
        let curve =
            confidence_curves(&data, 0.10, 0.0, &p_grid, &q_grid, &engine, CurveOptions::default())
                .unwrap();
        for j in 0..3 {
            assert!(curve.lower[j] == 0.0 || curve.lower[j] == 0.5);
            assert!(curve.upper[j] == 0.5 || curve.upper[j] == 1.0);
        }
    }

    #[test]
    fn deconv_curves_require_aligned_rho() {
        let engine = deconv_engine(3, 19);
        let data = beta_sample(20, 20, 10);
        let part = &engine.gibbs.partition;
        let p_grid: Vec<f64> = (3..6).map(|j| inv_logit(part.endpoint(j))).collect();
        let q_grid: Vec<f64> = (1..=9).map(|n| n as f64 / 10.0).collect();
        let spacing = part.regular_spacing().unwrap();
        assert!(matches!(
            confidence_curves(
                &data,
                0.10,
                spacing * 0.5,
                &p_grid,
                &q_grid,
                &engine,
                CurveOptions::default()
            ),
            Err(Error::RhoNotGridAligned { .. })
        ));
        assert!(confidence_curves(
            &data,
            0.10,
            spacing,
            &p_grid,
            &q_grid,
            &engine,
            CurveOptions::default()
        )
        .is_ok());
    }

    #[test]
    fn calibration_single_rho_is_identity() {
        let engine = deconv_engine(3, 23);
        let data = beta_sample(40, 20, 11);
        let grid = deconv_statistic_grid(&engine.gibbs.partition, 1, true);
        let result =
            calibrate_rho_quantile(&data, 0.40, 0.10, 0.2, &[0.3], &grid, 77, &engine).unwrap();
        assert_eq!(result.rho, 0.3);
        assert_eq!(result.candidate_lengths.len(), 1);
        // The reported interval is the plain interval on the test split.
        let (_, test) = split_dataset(&data, 0.2, 77).unwrap();
        let direct = ci_quantile_left(&test, 0.40, 0.10, 0.3, &grid, &engine).unwrap();
        assert_eq!(result.interval, direct);
    }

    #[test]
    fn calibration_rejects_small_datasets() {
        let engine = counts_engine();
        let data = BinomialDataset::new(vec![(2, 20); 9]).unwrap();
        let grid = default_quantile_grid();
        assert!(matches!(
            calibrate_rho_quantile(&data, 0.4, 0.05, 0.2, &[0.0], &grid, 1, &engine),
            Err(Error::SplitTooSmall { .. })
        ));
        let data = BinomialDataset::new(vec![(2, 20); 10]).unwrap();
        assert!(
            calibrate_rho_quantile(&data, 0.4, 0.05, 0.2, &[0.0], &grid, 1, &engine).is_ok()
        );
    }

    #[test]
    fn calibration_tie_breaks_to_smaller_rho() {
        // With a counts engine and a dataset where both rho values give
        // identical intervals, the smaller rho wins.
        let engine = counts_engine();
        let data = BinomialDataset::new(vec![(0, 20); 40]).unwrap();
        let grid = default_quantile_grid();
        let result =
            calibrate_rho_quantile(&data, 1.0, 0.05, 0.2, &[0.7, 0.2], &grid, 5, &engine)
                .unwrap();
        // q0 = 1 accepts immediately for any rho: both lengths are 1.
        assert_eq!(result.rho, 0.2);
    }

    #[test]
    fn calibrate_curves_single_rho() {
        let engine = deconv_engine(3, 29);
        let data = beta_sample(40, 20, 12);
        let q_grid: Vec<f64> = (1..=9).map(|n| n as f64 / 10.0).collect();
        let rho = engine.gibbs.partition.regular_spacing().unwrap();
        let out =
            calibrate_rho_curves(&data, 0.10, 0.2, &[rho], &q_grid, 31, &engine).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn quantile_right_coverage_under_symmetric_mixing() {
        // Right-tailed 95% interval for the 0.5 quantile of Beta(2,2):
        // the lower limit stays at or below the true quantile 0.5 in at
        // least 95% - 2 SE of simulations.
        let engine = counts_engine();
        let grid: Vec<f64> = (1..=99).map(|n| n as f64 / 100.0).collect();
        let sims = 200;
        let covered = (0..sims)
            .filter(|&rep| {
                let mut rng = seed::rng(0xabc, "ci-right-coverage", rep);
                let data = sample_mixture(
                    &MixingDistribution::beta(2.0, 2.0).unwrap(),
                    &[20; 80],
                    &mut rng,
                );
                let ci = ci_quantile_right(&data, 0.5, 0.05, 0.0, &grid, &engine).unwrap();
                ci.lower <= 0.5
            })
            .count();
        let threshold = 0.95 - 2.0 * (0.95f64 * 0.05 / sims as f64).sqrt();
        assert!(
            covered as f64 / sims as f64 >= threshold,
            "coverage {covered}/{sims}"
        );
    }

    #[test]
    fn two_sided_cdf_coverage() {
        // Two-sided 90% interval for CDF_Beta(2,2)(0.5) = 0.5 covers the
        // truth in at least 90% - 2 SE of 200 simulations.
        let engine = counts_engine();
        let inc = default_q_grid();
        let dec: Vec<f64> = inc.iter().rev().copied().collect();
        let sims = 200;
        let covered = (0..sims)
            .filter(|&rep| {
                let mut rng = seed::rng(0xabd, "ci-two-coverage", rep);
                let data = sample_mixture(
                    &MixingDistribution::beta(2.0, 2.0).unwrap(),
                    &[20; 80],
                    &mut rng,
                );
                let left = ci_cdf_left(&data, 0.5, 0.05, 0.25, &dec, &engine).unwrap();
                let right = ci_cdf_right(&data, 0.5, 0.05, 0.25, &inc, &engine).unwrap();
                let two = ci_two_sided(&left, &right).unwrap();
                two.lower <= 0.5 && 0.5 <= two.upper
            })
            .count();
        let threshold = 0.90 - 2.0 * (0.90f64 * 0.10 / sims as f64).sqrt();
        assert!(
            covered as f64 / sims as f64 >= threshold,
            "coverage {covered}/{sims}"
        );
    }
}
