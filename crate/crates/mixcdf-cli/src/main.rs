//! Command-line front end: dataset ingestion, seeded estimation / interval
//! / curve / p_max / verification pipelines, and JSON / CSV / SVG output.

mod svg;

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mixcdf::asymptotics::{p_max_binomial, p_max_normal};
use mixcdf::ci::{
    calibrate_rho_curves, calibrate_rho_quantile, ci_cdf_left, ci_cdf_right, ci_quantile_left,
    ci_quantile_right, ci_two_sided, confidence_curves, deconv_statistic_grid, default_q_grid,
    default_quantile_grid, ConfidenceInterval, CurveOptions, Engine, Method,
};
use mixcdf::fpt::DyadicPartition;
use mixcdf::gibbs::{run_gibbs, GibbsConfig};
use mixcdf::logit::inv_logit;
use mixcdf::mixing::{sample_mixture, worst_case, MixingDistribution, WorstCaseSpec};
use mixcdf::seed;
use mixcdf::BinomialDataset;

#[derive(Parser)]
#[command(
    name = "mixcdf",
    about = "Mixing-distribution estimates and exact confidence intervals from binomial mixture samples",
    version
)]
struct Cli {
    /// Worker threads for Monte Carlo replicates (default: all cores).
    /// Results are independent of the thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior-median CDF estimate of the mixing distribution.
    Estimate(EstimateArgs),
    /// Confidence interval for a quantile of the mixing distribution.
    CiQuantile(CiQuantileArgs),
    /// Confidence interval for the mixing CDF at a success probability.
    CiCdf(CiCdfArgs),
    /// Pointwise confidence curves for the mixing CDF.
    Curves(CurvesArgs),
    /// Data-driven shift-parameter selection.
    Calibrate(CalibrateArgs),
    /// Smallest-asymptotic-interval endpoints (p_max tables).
    Pmax(PmaxArgs),
    /// Stochastic-monotonicity verification suite.
    Verify(VerifyArgs),
    /// Draw a synthetic binomial mixture sample.
    Simulate(SimulateArgs),
}

#[derive(Args, Clone, Serialize)]
struct EngineArgs {
    /// Test statistic: exact binomial counts test or Monte Carlo
    /// deconvolution test.
    #[arg(long, value_enum, default_value = "deconv")]
    method: MethodArg,
    /// Partition preset for the FPT model.
    #[arg(long, default_value = "grid257")]
    grid: String,
    /// Gibbs sweeps per chain.
    #[arg(long = "G", default_value_t = 1000)]
    iterations: usize,
    /// Burn-in sweeps dropped from each chain.
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    /// Null replicates per Monte Carlo test (>= 100 for reported p-values).
    #[arg(long = "B", default_value_t = 1000)]
    replicates: usize,
    /// Master seed; all RNG streams derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Symmetric Beta prior parameter of the FPT splits.
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    /// Gauss-Legendre nodes per leaf in the likelihood table.
    #[arg(long, default_value_t = 8)]
    nodes: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    Counts,
    Deconv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SideArg {
    Left,
    Right,
    Two,
}

impl EngineArgs {
    fn partition(&self) -> Result<DyadicPartition> {
        Ok(DyadicPartition::preset(&self.grid)?)
    }

    fn gibbs_config(&self) -> Result<GibbsConfig> {
        let cfg = GibbsConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: seed::derive(self.seed, "observed-chain", 0),
            partition: self.partition()?,
            prior_alpha0: self.alpha0,
            within_leaf_nodes: self.nodes,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn engine(&self) -> Result<Engine> {
        let gibbs = self.gibbs_config()?;
        Ok(match self.method {
            MethodArg::Counts => Engine::counts(gibbs),
            MethodArg::Deconv => Engine::deconv(gibbs, self.replicates, self.seed),
        })
    }

    fn validate_replicates(&self) -> Result<()> {
        if self.method == MethodArg::Deconv && self.replicates < 100 {
            bail!(
                "deconvolution p-values need --B >= 100 (got {})",
                self.replicates
            );
        }
        Ok(())
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write "p,cdf" rows to this CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Dump the retained posterior leaf-probability draws (one row per
    /// sweep) to this CSV path.
    #[arg(long)]
    draws_csv: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct CiQuantileArgs {
    #[arg(long)]
    input: PathBuf,
    /// Quantile level q0 of the mixing distribution.
    #[arg(long)]
    quantile: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "left")]
    side: SideArg,
    /// Logit-scale shift parameter.
    #[arg(long, default_value_t = 0.0, conflicts_with = "rho_auto")]
    rho: f64,
    /// Select rho by the data-driven calibration procedure (left side only).
    #[arg(long)]
    rho_auto: bool,
    /// Candidate rho values for --rho-auto (comma separated).
    #[arg(long, value_delimiter = ',')]
    rho_grid: Option<Vec<f64>>,
    /// Calibration fraction for --rho-auto.
    #[arg(long, default_value_t = 0.2)]
    split: f64,
    /// Keep every n-th partition endpoint in the deconv statistic grid.
    #[arg(long, default_value_t = 4)]
    stride: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct CiCdfArgs {
    #[arg(long)]
    input: PathBuf,
    /// Success probability p0 at which the CDF is bounded.
    #[arg(long = "at-p")]
    at_p: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "two")]
    side: SideArg,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.10)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, conflicts_with = "rho_auto")]
    rho: f64,
    /// Select rho by calibration on a held-out subset; the curves are then
    /// built from the remaining records.
    #[arg(long)]
    rho_auto: bool,
    #[arg(long, value_delimiter = ',')]
    rho_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.2)]
    split: f64,
    /// Keep every n-th partition endpoint in the curve p-grid.
    #[arg(long, default_value_t = 8)]
    stride: usize,
    /// Number of CDF grid points.
    #[arg(long, default_value_t = 99)]
    q_points: usize,
    /// Disable the monotone resume shortcut (full scan per grid point).
    #[arg(long)]
    no_shortcut: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write "p,lower,upper" rows to this CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Render the curves (with the CDF estimate) to SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Calibrate for this quantile's left-tailed interval; omitted,
    /// calibrates for confidence curves.
    #[arg(long)]
    quantile: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_delimiter = ',')]
    rho_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.2)]
    split: f64,
    #[arg(long, default_value_t = 4)]
    stride: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct PmaxArgs {
    /// Quantile level q0.
    #[arg(long)]
    q0: f64,
    /// Mixing distribution: beta:a,b | atoms:p,w;p,w | worstcase:min|max,q0,p0.
    #[arg(long)]
    mixing: String,
    /// Binomial trial sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,5,20,200,1000")]
    m_list: Vec<u64>,
    /// Also compute the normal-noise endpoint at this sigma.
    #[arg(long)]
    normal_sigma: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Simulation draws per dominance check.
    #[arg(long, default_value_t = 20000)]
    samples: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario: example-beta (K=80, m=20, Beta(2,2)) or a mixing spec as
    /// in pmax --mixing.
    #[arg(long, default_value = "example-beta")]
    scenario: String,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "m")]
    m: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path ("x,m" rows; stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_validation_error(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

/// IO failure while writing results; always a runtime error.
#[derive(Debug)]
struct OutputIoError {
    path: PathBuf,
    source: std::io::Error,
}

impl std::fmt::Display for OutputIoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot write {}: {}", self.path.display(), self.source)
    }
}

impl std::error::Error for OutputIoError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

fn is_validation_error(err: &anyhow::Error) -> bool {
    if err.downcast_ref::<OutputIoError>().is_some() {
        return false;
    }
    if let Some(lib) = err.downcast_ref::<mixcdf::Error>() {
        use mixcdf::Error::*;
        return !matches!(lib, ZeroWeightRow | EmptyIntersection { .. });
    }
    if let Some(io) = err.downcast_ref::<std::io::Error>() {
        // A missing input path is a usage problem; other IO is runtime.
        return io.kind() == std::io::ErrorKind::NotFound;
    }
    // Argument and spec-string problems are validation.
    true
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::CiQuantile(args) => cmd_ci_quantile(args),
        Command::CiCdf(args) => cmd_ci_cdf(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Pmax(args) => cmd_pmax(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn read_dataset(path: &Path) -> Result<BinomialDataset> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BinomialDataset::from_reader(BufReader::new(file))?)
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let wrap = |source: std::io::Error| OutputIoError {
                path: p.clone(),
                source,
            };
            let mut f = File::create(p).map_err(wrap)?;
            f.write_all(text.as_bytes()).map_err(wrap)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(path: Option<&PathBuf>, doc: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    write_text(path, &text)
}

fn parse_mixing(spec: &str) -> Result<MixingDistribution> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("mixing spec '{spec}' needs the form kind:params"))?;
    let parse_f64 = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| anyhow!("bad number '{s}' in mixing spec"))
    };
    match kind {
        "beta" => {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 2 {
                bail!("beta spec needs beta:a,b");
            }
            Ok(MixingDistribution::beta(
                parse_f64(parts[0])?,
                parse_f64(parts[1])?,
            )?)
        }
        "atoms" => {
            let atoms = rest
                .split(';')
                .map(|pair| {
                    let (p, w) = pair
                        .split_once(',')
                        .ok_or_else(|| anyhow!("atom '{pair}' needs p,w"))?;
                    Ok((parse_f64(p)?, parse_f64(w)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MixingDistribution::atoms(atoms)?)
        }
        "worstcase" => {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                bail!("worstcase spec needs worstcase:min|max,q0,p0");
            }
            let spec = match parts[0] {
                "min" => WorstCaseSpec::min(parse_f64(parts[1])?, parse_f64(parts[2])?)?,
                "max" => WorstCaseSpec::max(parse_f64(parts[1])?, parse_f64(parts[2])?)?,
                other => bail!("worstcase kind must be min or max, got '{other}'"),
            };
            Ok(worst_case(spec))
        }
        other => bail!("unknown mixing kind '{other}' (expected beta, atoms, or worstcase)"),
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<ExitCode> {
    let data = read_dataset(&args.input)?;
    let cfg = args.engine.gibbs_config()?;
    let partition = cfg.partition.clone();
    let draws = run_gibbs(&data, &cfg)?;
    let medians = draws.cdf_estimate_all();
    let rows: Vec<serde_json::Value> = (0..=partition.num_leaves())
        .map(|j| {
            json!({
                "p": inv_logit(partition.endpoint(j)),
                "cdf": medians[j],
                "cdf_lo": draws.cdf_posterior_quantile(j, 0.025),
                "cdf_hi": draws.cdf_posterior_quantile(j, 0.975),
            })
        })
        .collect();
    if let Some(csv_path) = &args.csv {
        let mut text = String::from("p,cdf\n");
        for (j, median) in medians.iter().enumerate() {
            text.push_str(&format!("{},{median}\n", inv_logit(partition.endpoint(j))));
        }
        write_text(Some(csv_path), &text)?;
    }
    if let Some(draws_path) = &args.draws_csv {
        let mut text = String::new();
        for row in draws.draws() {
            let fields: Vec<String> = row.as_slice().iter().map(f64::to_string).collect();
            text.push_str(&fields.join(","));
            text.push('\n');
        }
        write_text(Some(draws_path), &text)?;
    }
    let doc = json!({
        "command": "estimate",
        "config": { "input": args.input, "engine": &args.engine },
        "result": { "estimate": rows },
    });
    emit_json(args.output.as_ref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn quantile_grids(stride: usize, engine: &Engine) -> (Vec<f64>, Vec<f64>) {
    match engine.method {
        Method::Counts => {
            let dec = default_quantile_grid();
            let inc: Vec<f64> = dec.iter().rev().copied().collect();
            (dec, inc)
        }
        Method::Deconv => {
            let dec = deconv_statistic_grid(&engine.gibbs.partition, stride, true);
            let inc: Vec<f64> = dec.iter().rev().copied().collect();
            (dec, inc)
        }
    }
}

fn interval_doc(
    command: &str,
    config: serde_json::Value,
    ci: &ConfidenceInterval,
) -> serde_json::Value {
    json!({ "command": command, "config": config, "result": ci })
}

fn cmd_ci_quantile(args: CiQuantileArgs) -> Result<ExitCode> {
    args.engine.validate_replicates()?;
    let data = read_dataset(&args.input)?;
    let engine = args.engine.engine()?;
    let (dec_grid, inc_grid) = quantile_grids(args.stride, &engine);
    let config = json!({
        "input": args.input,
        "quantile": args.quantile,
        "alpha": args.alpha,
        "side": args.side,
        "rho": if args.rho_auto { serde_json::Value::from("auto") } else { args.rho.into() },
        "split": args.split,
        "stride": args.stride,
        "engine": &args.engine,
    });

    if args.rho_auto {
        if args.side != SideArg::Left {
            bail!("--rho-auto calibration targets left-tailed quantile intervals");
        }
        let rho_grid = args
            .rho_grid
            .clone()
            .unwrap_or_else(|| default_rho_grid(&engine));
        let result = calibrate_rho_quantile(
            &data,
            args.quantile,
            args.alpha,
            args.split,
            &rho_grid,
            &dec_grid,
            args.engine.seed,
            &engine,
        )?;
        let doc = json!({
            "command": "ci-quantile",
            "config": config,
            "result": {
                "selected_rho": result.rho,
                "candidate_lengths": result.candidate_lengths,
                "interval": result.interval,
            },
        });
        emit_json(args.output.as_ref(), &doc)?;
        return Ok(ExitCode::SUCCESS);
    }

    let ci = match args.side {
        SideArg::Left => {
            ci_quantile_left(&data, args.quantile, args.alpha, args.rho, &dec_grid, &engine)?
        }
        SideArg::Right => {
            ci_quantile_right(&data, args.quantile, args.alpha, args.rho, &inc_grid, &engine)?
        }
        SideArg::Two => {
            let left = ci_quantile_left(
                &data,
                args.quantile,
                args.alpha / 2.0,
                args.rho,
                &dec_grid,
                &engine,
            )?;
            let right = ci_quantile_right(
                &data,
                args.quantile,
                args.alpha / 2.0,
                args.rho,
                &inc_grid,
                &engine,
            )?;
            ci_two_sided(&left, &right)?
        }
    };
    emit_json(
        args.output.as_ref(),
        &interval_doc("ci-quantile", config, &ci),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ci_cdf(args: CiCdfArgs) -> Result<ExitCode> {
    args.engine.validate_replicates()?;
    let data = read_dataset(&args.input)?;
    let engine = args.engine.engine()?;
    let inc_grid = default_q_grid();
    let dec_grid: Vec<f64> = inc_grid.iter().rev().copied().collect();
    let config = json!({
        "input": args.input,
        "at_p": args.at_p,
        "alpha": args.alpha,
        "side": args.side,
        "rho": args.rho,
        "engine": &args.engine,
    });
    let ci = match args.side {
        SideArg::Left => ci_cdf_left(&data, args.at_p, args.alpha, args.rho, &dec_grid, &engine)?,
        SideArg::Right => ci_cdf_right(&data, args.at_p, args.alpha, args.rho, &inc_grid, &engine)?,
        SideArg::Two => {
            let left =
                ci_cdf_left(&data, args.at_p, args.alpha / 2.0, args.rho, &dec_grid, &engine)?;
            let right =
                ci_cdf_right(&data, args.at_p, args.alpha / 2.0, args.rho, &inc_grid, &engine)?;
            ci_two_sided(&left, &right)?
        }
    };
    emit_json(args.output.as_ref(), &interval_doc("ci-cdf", config, &ci))?;
    Ok(ExitCode::SUCCESS)
}

fn default_rho_grid(engine: &Engine) -> Vec<f64> {
    match engine.method {
        Method::Counts => vec![0.0, 0.25, 0.5, 1.0],
        Method::Deconv => {
            let h = engine.gibbs.partition.regular_spacing().unwrap_or(0.15625);
            vec![0.0, h, 2.0 * h, 4.0 * h]
        }
    }
}

fn cmd_curves(args: CurvesArgs) -> Result<ExitCode> {
    args.engine.validate_replicates()?;
    let full_data = read_dataset(&args.input)?;
    let engine = args.engine.engine()?;

    let p_grid: Vec<f64> = match engine.method {
        Method::Deconv => deconv_statistic_grid(&engine.gibbs.partition, args.stride, false),
        Method::Counts => (1..=19).map(|i| i as f64 / 20.0).collect(),
    };
    let q_grid: Vec<f64> = (1..=args.q_points)
        .map(|i| i as f64 / (args.q_points + 1) as f64)
        .collect();

    let (rho, data) = if args.rho_auto {
        let rho_grid = args
            .rho_grid
            .clone()
            .unwrap_or_else(|| default_rho_grid(&engine));
        let rho = calibrate_rho_curves(
            &full_data,
            args.alpha,
            args.split,
            &rho_grid,
            &q_grid,
            args.engine.seed,
            &engine,
        )?;
        // Curves come from the records not used for calibration; the split
        // is reproduced from the same seeded stream.
        let (_, test) = split_for_cli(&full_data, args.split, args.engine.seed)?;
        (rho, test)
    } else {
        (args.rho, full_data.clone())
    };

    let curve = confidence_curves(
        &data,
        args.alpha,
        rho,
        &p_grid,
        &q_grid,
        &engine,
        CurveOptions {
            use_shortcut: !args.no_shortcut,
        },
    )?;

    if let Some(csv_path) = &args.csv {
        let mut text = String::from("p,lower,upper\n");
        for ((p, lo), hi) in curve.p_grid.iter().zip(&curve.lower).zip(&curve.upper) {
            text.push_str(&format!("{p},{lo},{hi}\n"));
        }
        write_text(Some(csv_path), &text)?;
    }
    if let Some(svg_path) = &args.svg {
        let estimates = estimate_points(&data, &engine)?;
        let svg_text = svg::render_curve_svg(&curve, &estimates)?;
        write_text(Some(svg_path), &svg_text)?;
    }
    let doc = json!({
        "command": "curves",
        "config": {
            "input": args.input,
            "alpha": args.alpha,
            "rho": if args.rho_auto { serde_json::Value::from("auto") } else { args.rho.into() },
            "selected_rho": rho,
            "split": args.split,
            "stride": args.stride,
            "q_points": args.q_points,
            "shortcut": !args.no_shortcut,
            "engine": &args.engine,
        },
        "result": curve,
    });
    emit_json(args.output.as_ref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

/// CDF estimate at plottable points: the posterior median for the deconv
/// method, the empirical CDF of the observed proportions otherwise.
fn estimate_points(data: &BinomialDataset, engine: &Engine) -> Result<Vec<(f64, f64)>> {
    if engine.method == Method::Counts {
        return Ok((1..=19)
            .map(|i| {
                let p = i as f64 / 20.0;
                (p, mixcdf::hyptest::ecdf_statistic(data, p))
            })
            .collect());
    }
    let draws = run_gibbs(data, &engine.gibbs)?;
    let medians = draws.cdf_estimate_all();
    let part = &engine.gibbs.partition;
    Ok((0..=part.num_leaves())
        .map(|j| (inv_logit(part.endpoint(j)), medians[j]))
        .collect())
}

/// Reproduces the calibration split (same labeled stream as the library).
fn split_for_cli(
    data: &BinomialDataset,
    split: f64,
    master_seed: u64,
) -> Result<(BinomialDataset, BinomialDataset)> {
    let take = (split * data.len() as f64).ceil() as usize;
    if take == 0 || take >= data.len() {
        bail!("split fraction {split} leaves no usable test set");
    }
    let mut rng = seed::rng(master_seed, "calibration-split", 0);
    Ok(data.split_random(take, &mut rng))
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<ExitCode> {
    args.engine.validate_replicates()?;
    let data = read_dataset(&args.input)?;
    let engine = args.engine.engine()?;
    let rho_grid = args
        .rho_grid
        .clone()
        .unwrap_or_else(|| default_rho_grid(&engine));
    let config = json!({
        "input": args.input,
        "quantile": args.quantile,
        "alpha": args.alpha,
        "rho_grid": rho_grid,
        "split": args.split,
        "stride": args.stride,
        "engine": &args.engine,
    });
    let result = match args.quantile {
        Some(q0) => {
            let grid = match engine.method {
                Method::Counts => default_quantile_grid(),
                Method::Deconv => {
                    deconv_statistic_grid(&engine.gibbs.partition, args.stride, true)
                }
            };
            let out = calibrate_rho_quantile(
                &data,
                q0,
                args.alpha,
                args.split,
                &rho_grid,
                &grid,
                args.engine.seed,
                &engine,
            )?;
            json!({
                "selected_rho": out.rho,
                "candidate_lengths": out.candidate_lengths,
                "interval": out.interval,
            })
        }
        None => {
            let q_grid = default_q_grid();
            let rho = calibrate_rho_curves(
                &data,
                args.alpha,
                args.split,
                &rho_grid,
                &q_grid,
                args.engine.seed,
                &engine,
            )?;
            json!({ "selected_rho": rho })
        }
    };
    let doc = json!({ "command": "calibrate", "config": config, "result": result });
    emit_json(args.output.as_ref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_pmax(args: PmaxArgs) -> Result<ExitCode> {
    let mixing = parse_mixing(&args.mixing)?;
    let mut csv = String::from("noise,param,p_max\n");
    for &m in &args.m_list {
        if m == 0 {
            bail!("trial sizes must be positive");
        }
        let result = p_max_binomial(args.q0, &mixing, m, args.tol)?;
        csv.push_str(&format!("binomial,{m},{:.6}\n", result.p_max));
    }
    if let Some(sigma) = args.normal_sigma {
        let result = p_max_normal(args.q0, &mixing, sigma, args.tol)?;
        csv.push_str(&format!("normal,{sigma},{:.6}\n", result.p_max));
    }
    write_text(args.output.as_ref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let reports = mixcdf::verify::run_suite(args.seed, args.samples)?;
    let mut all_passed = true;
    let mut text = String::new();
    for r in &reports {
        all_passed &= r.passed;
        text.push_str(&format!(
            "{} {} ({})\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        ));
    }
    print!("{text}");
    if let Some(path) = &args.output {
        let doc = json!({
            "command": "verify",
            "config": { "seed": args.seed, "samples": args.samples },
            "result": reports,
        });
        emit_json(Some(path), &doc)?;
    }
    if all_passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let (mixing, k, m) = if args.scenario == "example-beta" {
        (
            MixingDistribution::beta(2.0, 2.0).unwrap(),
            args.k.unwrap_or(80),
            args.m.unwrap_or(20),
        )
    } else {
        let mixing = parse_mixing(&args.scenario)?;
        let k = args
            .k
            .ok_or_else(|| anyhow!("--K is required for custom scenarios"))?;
        let m = args
            .m
            .ok_or_else(|| anyhow!("--m is required for custom scenarios"))?;
        (mixing, k, m)
    };
    if k == 0 || m == 0 {
        bail!("K and m must be positive");
    }
    let mut rng = seed::rng(args.seed, "simulate", 0);
    let data = sample_mixture(&mixing, &vec![m; k], &mut rng);
    let mut csv = String::from("x,m\n");
    for r in data.records() {
        csv.push_str(&format!("{},{}\n", r.successes, r.trials));
    }
    write_text(args.output.as_ref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}
