use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fadinglab::analysis::{
    average_ep_asymptotic, average_ep_with, diversity_order, outage, outage_asymptotic, q_asymptotic,
    q_transform_with, EvalResult, WeightedGaussianSum,
};
use fadinglab::channels::{db_to_linear, ChannelSpec};
use fadinglab::error::{AnalysisError, ChannelError, MgfError, SpecfunError};
use fadinglab::mgf::PosynomialMgf;
use fadinglab::oracle::{mc_outage, mc_q_transform, mc_statistic, McEstimate, MC_DEFAULT_SAMPLES};
use fadinglab::specfun::{gaussian_q, QuadratureConfig};

mod format;
mod grid;

use format::{grid_value, optional, sig10};
use grid::Grid;

const TOL_ENV: &str = "FADINGLAB_TOL";
/// Agreement band used by `validate`, in standard errors.
const Z_BAND: f64 = 4.0;

#[derive(Parser)]
#[command(name = "fadinglab", version, about = "Error and outage probability of posynomial fading channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the simplified characteristic coefficients and the diversity order.
    Coeffs { spec: PathBuf },
    /// Evaluate a quantity over a grid and print CSV.
    Sweep(SweepArgs),
    /// Compare analytic values with Monte Carlo at every grid point.
    Validate(ValidateArgs),
    /// Compare the Q-transform with its high-SNR approximation over a p grid.
    Asym(AsymArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    /// Average error probability; the grid is an SNR gain.
    Aep,
    /// Outage probability; the grid is the SNR threshold.
    Outage,
    /// Gaussian Q-transform; the grid is p.
    Qtransform,
}

#[derive(Clone, Copy, ValueEnum)]
enum Modulation {
    Bpsk,
}

#[derive(Args)]
struct GridArgs {
    /// start:stop:step (stop inclusive) or a single value
    #[arg(long, allow_hyphen_values = true)]
    grid: Grid,
    /// Interpret grid values in dB.
    #[arg(long)]
    db: bool,
}

#[derive(Args)]
struct ErrorModel {
    #[arg(long, value_enum, conflicts_with = "weights")]
    modulation: Option<Modulation>,
    /// JSON list of {"weight": w, "p": p} terms.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    spec: PathBuf,
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    model: ErrorModel,
    /// Monte Carlo sample count per grid point.
    #[arg(long)]
    mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ValidateArgs {
    spec: PathBuf,
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    model: ErrorModel,
    #[arg(long, default_value_t = MC_DEFAULT_SAMPLES)]
    mc: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AsymArgs {
    spec: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
}

enum Failure {
    Usage(String),
    Spec(String),
    Numeric(String),
    Validation(String),
    Sampler(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Numeric(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Spec(_) => 3,
            Failure::Validation(_) => 4,
            Failure::Sampler(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Spec(m)
            | Failure::Numeric(m)
            | Failure::Validation(m)
            | Failure::Sampler(m) => m,
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let msg = e.to_string();
        match e {
            AnalysisError::Channel(c) => Failure::from(c),
            AnalysisError::Mgf(MgfError::Incompatible(_))
            | AnalysisError::Specfun(SpecfunError::Mgf(MgfError::Incompatible(_))) => Failure::Spec(msg),
            AnalysisError::Argument(_) => Failure::Usage(msg),
            _ => Failure::Numeric(msg),
        }
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::UnsupportedSampler(_) => Failure::Sampler(e.to_string()),
            _ => Failure::Spec(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(format!("write failed: {e}"))
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<(ChannelSpec, PosynomialMgf), Failure> {
    let text = read_file(path)?;
    let spec = ChannelSpec::from_json(&text)
        .map_err(|e| Failure::Usage(format!("{}: invalid channel spec: {e}", path.display())))?;
    let mgf = spec.to_mgf()?;
    Ok((spec, mgf))
}

fn quadrature() -> Result<QuadratureConfig, Failure> {
    match std::env::var(TOL_ENV) {
        Ok(v) => {
            let tol: f64 = v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{TOL_ENV}='{v}' is not a number")))?;
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Failure::Usage(format!("{TOL_ENV} must lie in (0, 1), got {tol}")));
            }
            Ok(QuadratureConfig::with_tol(tol))
        }
        Err(_) => Ok(QuadratureConfig::default()),
    }
}

fn error_model(quantity: Quantity, model: &ErrorModel) -> Result<Option<WeightedGaussianSum>, Failure> {
    if quantity != Quantity::Aep {
        if model.modulation.is_some() || model.weights.is_some() {
            return Err(Failure::Usage("--modulation/--weights only apply to --quantity aep".into()));
        }
        return Ok(None);
    }
    match (&model.modulation, &model.weights) {
        (Some(Modulation::Bpsk), None) => Ok(Some(WeightedGaussianSum::bpsk())),
        (None, Some(path)) => {
            let text = read_file(path)?;
            WeightedGaussianSum::from_json(&text)
                .map(Some)
                .map_err(|e| Failure::Usage(format!("{}: invalid weights: {e}", path.display())))
        }
        _ => Err(Failure::Usage("--quantity aep needs --modulation bpsk or --weights <file>".into())),
    }
}

/// Grid points as (printed value, linear value).
fn grid_points(args: &GridArgs, quantity: Quantity) -> Result<Vec<(String, f64)>, Failure> {
    let points: Vec<(String, f64)> = args
        .grid
        .values()
        .into_iter()
        .map(|v| (grid_value(v), if args.db { db_to_linear(v) } else { v }))
        .collect();
    if let Some((label, _)) = points.iter().find(|(_, x)| {
        if quantity == Quantity::Outage {
            !(*x > 0.0)
        } else {
            !(*x >= 0.0)
        }
    }) {
        return Err(Failure::Usage(format!("grid value {label} is outside the domain of the quantity")));
    }
    Ok(points)
}

struct Evaluator<'a> {
    spec: &'a ChannelSpec,
    mgf: &'a PosynomialMgf,
    quantity: Quantity,
    weights: Option<WeightedGaussianSum>,
    quad: QuadratureConfig,
}

impl Evaluator<'_> {
    fn exact(&self, x: f64) -> Result<EvalResult, AnalysisError> {
        match self.quantity {
            Quantity::Qtransform => q_transform_with(self.mgf, x, &self.quad),
            Quantity::Outage => outage(self.mgf, x),
            Quantity::Aep => average_ep_with(self.mgf, &self.weights().scaled(x), &self.quad),
        }
    }

    fn asymptotic(&self, x: f64) -> Result<Option<f64>, AnalysisError> {
        if x == 0.0 {
            return Ok(None);
        }
        Ok(Some(match self.quantity {
            Quantity::Qtransform => q_asymptotic(self.mgf, x)?,
            Quantity::Outage => outage_asymptotic(self.mgf, x)?,
            Quantity::Aep => average_ep_asymptotic(self.mgf, &self.weights().scaled(x))?,
        }))
    }

    fn monte_carlo(&self, x: f64, n: u64, seed: u64) -> Result<McEstimate, AnalysisError> {
        match self.quantity {
            Quantity::Qtransform => mc_q_transform(self.spec, x, n, seed),
            Quantity::Outage => mc_outage(self.spec, x, n, seed),
            Quantity::Aep => {
                let terms: Vec<(f64, f64)> = self.weights().scaled(x).terms().iter().map(|t| (t.weight, t.p)).collect();
                mc_statistic(self.spec, n, seed, |g| {
                    terms.iter().map(|(w, p)| w * gaussian_q((p * g).sqrt())).sum()
                })
            }
        }
    }

    fn weights(&self) -> &WeightedGaussianSum {
        self.weights.as_ref().expect("aep carries a weighted sum")
    }
}

fn report_warnings(label: &str, warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: grid {label}: {w}");
    }
}

fn cmd_coeffs(path: &Path) -> Result<(), Failure> {
    let (_, mgf) = load_spec(path)?;
    let simplified = mgf.simplify();
    let d = diversity_order(&simplified)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", simplified.to_json())?;
    writeln!(out, "diversity_order={}", grid_value(d))?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let points = grid_points(&args.grid, args.quantity)?;
    let weights = error_model(args.quantity, &args.model)?;
    let (spec, mgf) = load_spec(&args.spec)?;
    let quad = quadrature()?;
    if args.mc.is_some() {
        spec.to_sampler()?;
    }
    let eval = Evaluator {
        spec: &spec,
        mgf: &mgf,
        quantity: args.quantity,
        weights,
        quad,
    };
    let mut out = io::stdout().lock();
    writeln!(out, "grid,exact,asymptotic,mc,mc_stderr,method")?;
    for (label, x) in &points {
        // rows already written stay on stdout if a later one fails
        let row = (|| -> Result<String, AnalysisError> {
            let exact = eval.exact(*x)?;
            report_warnings(label, &exact.warnings);
            let asym = eval.asymptotic(*x)?;
            let mc = args.mc.map(|n| eval.monte_carlo(*x, n, args.seed)).transpose()?;
            Ok(format!(
                "{label},{},{},{},{},{}",
                sig10(exact.value),
                optional(asym),
                optional(mc.map(|m| m.estimate)),
                optional(mc.map(|m| m.std_error)),
                exact.method.tag()
            ))
        })();
        match row {
            Ok(line) => writeln!(out, "{line}")?,
            Err(e) => {
                out.flush()?;
                let f = Failure::from(e);
                return Err(match f {
                    Failure::Numeric(m) => Failure::Numeric(format!("grid {label}: {m}")),
                    other => other,
                });
            }
        }
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let points = grid_points(&args.grid, args.quantity)?;
    let weights = error_model(args.quantity, &args.model)?;
    let (spec, mgf) = load_spec(&args.spec)?;
    let quad = quadrature()?;
    spec.to_sampler()?;
    let eval = Evaluator {
        spec: &spec,
        mgf: &mgf,
        quantity: args.quantity,
        weights,
        quad,
    };
    let quantity = match args.quantity {
        Quantity::Aep => "aep",
        Quantity::Outage => "outage",
        Quantity::Qtransform => "qtransform",
    };
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "validate kind={} quantity={quantity} n={} seed={} band={}se",
        spec.kind(),
        args.mc,
        args.seed,
        Z_BAND
    )?;
    writeln!(
        out,
        "{:<12} {:<18} {:<18} {:<18} {:>8}  {}",
        "grid", "analytic", "monte_carlo", "std_error", "z", "result"
    )?;
    let mut failed = 0;
    for (label, x) in &points {
        let exact = eval.exact(*x)?;
        report_warnings(label, &exact.warnings);
        let mc = eval.monte_carlo(*x, args.mc, args.seed)?;
        let diff = (exact.value - mc.estimate).abs();
        let pass = within_band(&exact, &mc);
        let z = if mc.std_error > 0.0 {
            sig_short(diff / mc.std_error)
        } else {
            "-".into()
        };
        if !pass {
            failed += 1;
        }
        writeln!(
            out,
            "{:<12} {:<18} {:<18} {:<18} {:>8}  {}",
            label,
            sig10(exact.value),
            sig10(mc.estimate),
            sig10(mc.std_error),
            z,
            if pass { "pass" } else { "FAIL" }
        )?;
    }
    writeln!(out, "{}/{} points within {} standard errors", points.len() - failed, points.len(), Z_BAND)?;
    out.flush()?;
    if failed > 0 {
        return Err(Failure::Validation(format!("{failed} grid point(s) outside the band")));
    }
    Ok(())
}

/// Analytic and simulated values agree to `Z_BAND` standard errors, widened
/// by the analytic error estimate.
fn within_band(exact: &EvalResult, mc: &McEstimate) -> bool {
    (exact.value - mc.estimate).abs() <= Z_BAND * mc.std_error + exact.abs_error
}

fn sig_short(v: f64) -> String {
    format!("{v:.2}")
}

fn cmd_asym(args: &AsymArgs) -> Result<(), Failure> {
    let points = grid_points(&args.grid, Quantity::Qtransform)?;
    let (_, mgf) = load_spec(&args.spec)?;
    let quad = quadrature()?;
    let mut out = io::stdout().lock();
    writeln!(out, "grid,exact,asymptotic,ratio,slope")?;
    let mut prev: Option<(f64, f64)> = None;
    for (label, p) in &points {
        let exact = q_transform_with(&mgf, *p, &quad)?;
        report_warnings(label, &exact.warnings);
        let asym = if *p > 0.0 { Some(q_asymptotic(&mgf, *p)?) } else { None };
        let ratio = asym.map(|a| exact.value / a);
        // local log-log slope against the previous grid point
        let slope = match prev {
            Some((p0, q0)) if p0 > 0.0 && exact.value > 0.0 && q0 > 0.0 => {
                Some((exact.value / q0).ln() / (p / p0).ln())
            }
            _ => None,
        };
        writeln!(out, "{label},{},{},{},{}", sig10(exact.value), optional(asym), optional(ratio), optional(slope))?;
        prev = Some((*p, exact.value));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coeffs { spec } => cmd_coeffs(spec),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Asym(args) => cmd_asym(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fadinglab::analysis::Method;

    fn analytic(value: f64) -> EvalResult {
        EvalResult {
            value,
            abs_error: 1e-12,
            method: Method::EulerIntegral,
            warnings: Vec::new(),
        }
    }

    fn mc(estimate: f64, std_error: f64) -> McEstimate {
        McEstimate {
            estimate,
            std_error,
            n: 1_000_000,
            seed: 0,
        }
    }

    #[test]
    fn band_decision() {
        assert!(within_band(&analytic(0.1), &mc(0.1003, 1e-4)));
        assert!(!within_band(&analytic(0.1), &mc(0.1005, 1e-4)));
        assert!(within_band(&analytic(0.5), &mc(0.5, 0.0)));
        assert!(!within_band(&analytic(0.5), &mc(0.4, 0.0)));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::Numeric(String::new()).code(), 1);
        assert_eq!(Failure::Usage(String::new()).code(), 2);
        assert_eq!(Failure::Spec(String::new()).code(), 3);
        assert_eq!(Failure::Validation(String::new()).code(), 4);
        assert_eq!(Failure::Sampler(String::new()).code(), 5);
        assert_eq!(Failure::from(ChannelError::UnsupportedSampler("posynomial")).code(), 5);
        assert_eq!(Failure::from(AnalysisError::Mgf(MgfError::Incompatible("x".into()))).code(), 3);
    }
}
