//! `ldpc-scaling`: density evolution, finite-length scaling coefficients and
//! simulations for LDPC codes on the binary erasure channel, as CSV.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ldpc_scaling::scaling::{alpha_sweep, ScalingContext};
use ldpc_scaling::sim::{approx_curve, compare, exact_small_ensemble_rounds, monte_carlo};
use ldpc_scaling::{
    alpha_limit, errorfloor_coefficient, evolve, threshold, DegreeDistribution, LimitOptions,
    LimitOutcome, LimitResult, PrecisionConfig, RecursionVariant,
};
use output::{emit, Cell, Format, Table};

#[derive(Parser)]
#[command(name = "ldpc-scaling", version, about = "Finite-length scaling of LDPC codes on the BEC")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density evolution trace P(t), Q(t)
    De {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_name = "EPS")]
        eps: f64,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// BP threshold
    Threshold {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// alpha = beta + gamma at iteration --iters (regular ensembles)
    Alpha {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        /// emit every t in 0..=iters
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        prec: PrecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// gamma (any ensemble); beta and alpha are filled in for regular ones
    Gamma {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        prec: PrecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Large-iteration limit of alpha
    AlphaLimit {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        limit: LimitArgs,
        #[command(flatten)]
        prec: PrecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate of the bit erasure probability per iteration
    Simulate {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_name = "N")]
        blocklength: usize,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact ensemble average for a tiny regular code (n·l <= 9)
    Exact {
        #[arg(long, num_args = 2, value_names = ["L", "R"], required = true)]
        regular: Vec<u32>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_name = "N")]
        blocklength: usize,
        #[arg(long, default_value_t = 2)]
        iters: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Density evolution plus alpha/n approximation curves
    Curve {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_name = "N", required = true)]
        blocklength: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[command(flatten)]
        prec: PrecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo next to the approximation
    Compare {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_name = "N", required = true)]
        blocklength: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        prec: PrecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// (2,3)-regular, t = 20, n in {51, 102, 201, 402, 801}
    Fig2(FigureCurveArgs),
    /// (3,6)-regular, t = 5, n in {512, 2048, 8192}
    Fig3(FigureCurveArgs),
    /// (2,3)-regular alpha(eps, inf) against the error-floor coefficient
    Fig4(FigureLimitArgs),
    /// (3,6)-regular alpha(eps, inf) above the threshold
    Fig5(FigureLimitArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct EnsembleArgs {
    /// (l, r)-regular ensemble
    #[arg(long, num_args = 2, value_names = ["L", "R"])]
    regular: Option<Vec<u32>>,
    /// JSON descriptor: {"regular": [l, r]} or {"lambda": {...}, "rho": {...}}
    #[arg(long, value_name = "FILE")]
    ensemble: Option<PathBuf>,
}

#[derive(Args, Default)]
struct GridArgs {
    /// channel erasure probability (repeatable)
    #[arg(long = "eps", value_name = "EPS")]
    eps: Vec<f64>,
    /// grid lo, lo+step, ... up to hi
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEP"], conflicts_with = "eps")]
    eps_range: Option<Vec<f64>>,
}

#[derive(Args)]
struct PrecArgs {
    /// target mantissa bits; guard bits for the beta/gamma cancellation are added
    #[arg(long, default_value_t = 256)]
    prec_bits: usize,
    /// plain f64 without guard bits (fast, loses accuracy at large t)
    #[arg(long, conflicts_with = "prec_bits")]
    double: bool,
    /// argument order of the G2/G2' terminals (diagnostic)
    #[arg(long, value_enum, default_value_t = Variant::A)]
    recursion_variant: Variant,
}

#[derive(Args)]
struct LimitArgs {
    /// largest iteration tried
    #[arg(long = "iters", default_value_t = 400)]
    t_max: usize,
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// output file (standard output if absent)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FigureCurveArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// also simulate each point with this many trials
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    prec: PrecArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct FigureLimitArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    limit: LimitArgs,
    #[command(flatten)]
    prec: PrecArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    A,
    B,
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<ldpc_scaling::Error> for CliError {
    fn from(e: ldpc_scaling::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("output: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parameter list echoed into the output header.
struct Params(Vec<(String, String)>);

impl Params {
    fn new() -> Self {
        Params(vec![("version".into(), env!("CARGO_PKG_VERSION").into())])
    }

    fn add(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }
}

impl EnsembleArgs {
    fn load(&self, params: &mut Params) -> CliResult<DegreeDistribution> {
        let ens = match (&self.regular, &self.ensemble) {
            (Some(lr), None) => DegreeDistribution::regular(lr[0], lr[1])?,
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("--ensemble {}: {e}", path.display())))?;
                DegreeDistribution::from_json(&text)?
            }
            _ => return Err(CliError::Usage("give exactly one of --regular or --ensemble".into())),
        };
        params.add("ensemble", &ens);
        Ok(ens)
    }
}

impl GridArgs {
    fn values(&self, default: Option<(f64, f64, f64)>, params: &mut Params) -> CliResult<Vec<f64>> {
        let range = match &self.eps_range {
            Some(v) => Some((v[0], v[1], v[2])),
            None if self.eps.is_empty() => default,
            None => None,
        };
        let grid = match range {
            Some((lo, hi, step)) => {
                if !(step > 0.0) || !step.is_finite() {
                    return Err(CliError::Usage(format!("--eps-range step must be positive, got {step}")));
                }
                if hi < lo {
                    return Err(CliError::Usage(format!("--eps-range is empty: {lo} > {hi}")));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
                // rounding keeps 0.1-style steps free of binary noise
                (0..count)
                    .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
                    .collect()
            }
            None => self.eps.clone(),
        };
        if grid.is_empty() {
            return Err(CliError::Usage("give --eps or --eps-range".into()));
        }
        let shown: Vec<String> = grid.iter().map(|&e| output::format_float(e)).collect();
        params.add("eps", shown.join(" "));
        Ok(grid)
    }
}

impl PrecArgs {
    fn config(&self, params: &mut Params) -> CliResult<(PrecisionConfig, RecursionVariant)> {
        let prec = if self.double {
            PrecisionConfig::double()
        } else {
            PrecisionConfig::from_bits(self.prec_bits).map_err(|e| CliError::Usage(format!("--prec-bits: {e}")))?
        };
        let variant = match self.recursion_variant {
            Variant::A => RecursionVariant::AsPrinted,
            Variant::B => RecursionVariant::Swapped,
        };
        params.add("precision", prec).add("recursion-variant", variant.label());
        Ok((prec, variant))
    }
}

impl LimitArgs {
    fn options(&self, variant: RecursionVariant, params: &mut Params) -> CliResult<LimitOptions> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CliError::Usage(format!("--rel-tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        params
            .add("t_max", self.t_max)
            .add("rel_tol", output::format_float(self.rel_tol))
            .add("abs_tol", output::format_float(self.abs_tol));
        Ok(LimitOptions {
            t_max: self.t_max,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            variant,
            ..LimitOptions::default()
        })
    }
}

fn command_line() -> String {
    let args: Vec<String> = std::env::args()
        .enumerate()
        .map(|(i, a)| {
            let a = if i == 0 { "ldpc-scaling".to_string() } else { a };
            if a.is_empty() || a.contains(|c: char| c.is_whitespace() || "\"'$\\".contains(c)) {
                format!("'{}'", a.replace('\'', r"'\''"))
            } else {
                a
            }
        })
        .collect();
    args.join(" ")
}

const ALPHA_COLUMNS: [&str; 5] = ["epsilon", "t", "beta", "gamma", "alpha"];
const LIMIT_COLUMNS: [&str; 6] = ["epsilon", "t", "beta", "gamma", "alpha", "status"];
const SIM_COLUMNS: [&str; 7] = ["epsilon", "n", "t_iter", "pb_hat", "stderr", "trials", "seed"];
const CURVE_COLUMNS: [&str; 6] = ["epsilon", "n", "t", "pb_infinite", "alpha", "pb_approx"];
const COMPARE_COLUMNS: [&str; 9] = [
    "epsilon", "n", "pb_sim", "stderr", "pb_de", "alpha", "pb_approx", "abs_diff", "z_score",
];

fn run(cli: Cli) -> CliResult<()> {
    let mut params = Params::new();
    let (table, out) = match cli.command {
        Command::De { ensemble, eps, iters, out } => {
            let ens = ensemble.load(&mut params)?;
            params.add("eps", output::format_float(eps)).add("iters", iters);
            let de = evolve(&ens, eps, iters)?;
            let mut table = Table::new(command_line(), params.0, &["t", "P", "Q"]);
            for t in 0..=iters {
                let q = (t > 0).then(|| *de.q(t));
                table.push(vec![t.into(), (*de.p(t)).into(), q.into()]);
            }
            (table, out)
        }
        Command::Threshold { ensemble, out } => {
            let ens = ensemble.load(&mut params)?;
            let mut table = Table::new(command_line(), params.0, &["threshold"]);
            table.bare = out.format == Format::Csv;
            table.push(vec![threshold(&ens).into()]);
            (table, out)
        }
        Command::Alpha { ensemble, grid, iters, sweep, prec, out } => {
            let ens = ensemble.load(&mut params)?;
            let grid = grid.values(None, &mut params)?;
            params.add("iters", iters).add("sweep", sweep);
            let (prec, variant) = prec.config(&mut params)?;
            let rows = coefficient_rows(&ens, &grid, iters, sweep, prec, variant, true)?;
            let mut table = Table::new(command_line(), params.0, &ALPHA_COLUMNS);
            rows.into_iter().for_each(|r| table.push(r));
            (table, out)
        }
        Command::Gamma { ensemble, grid, iters, sweep, prec, out } => {
            let ens = ensemble.load(&mut params)?;
            let grid = grid.values(None, &mut params)?;
            params.add("iters", iters).add("sweep", sweep);
            let (prec, variant) = prec.config(&mut params)?;
            let rows = coefficient_rows(&ens, &grid, iters, sweep, prec, variant, false)?;
            let mut table = Table::new(command_line(), params.0, &ALPHA_COLUMNS);
            rows.into_iter().for_each(|r| table.push(r));
            (table, out)
        }
        Command::AlphaLimit { ensemble, grid, limit, prec, out } => {
            let ens = ensemble.load(&mut params)?;
            let grid = grid.values(None, &mut params)?;
            let (prec, variant) = prec.config(&mut params)?;
            let opts = limit.options(variant, &mut params)?;
            let mut table = Table::new(command_line(), params.0, &LIMIT_COLUMNS);
            for (eps, res) in limits(&ens, &grid, prec, opts)? {
                table.push(limit_row(eps, &res));
            }
            (table, out)
        }
        Command::Simulate { ensemble, grid, blocklength, iters, mc, out } => {
            let ens = ensemble.load(&mut params)?;
            let grid = grid.values(None, &mut params)?;
            params
                .add("blocklength", blocklength)
                .add("iters", iters)
                .add("trials", mc.trials)
                .add("seed", mc.seed);
            let mut table = Table::new(command_line(), params.0, &SIM_COLUMNS);
            for &eps in &grid {
                let sim = monte_carlo(&ens, blocklength, eps, iters, mc.trials, mc.seed)?;
                for t in 0..=iters {
                    table.push(vec![
                        eps.into(),
                        blocklength.into(),
                        t.into(),
                        sim.pb_hat[t].into(),
                        sim.stderr[t].into(),
                        mc.trials.into(),
                        mc.seed.into(),
                    ]);
                }
            }
            (table, out)
        }
        Command::Exact { regular, grid, blocklength, iters, out } => {
            let (l, r) = (regular[0], regular[1]);
            params.add("ensemble", DegreeDistribution::regular(l, r)?);
            let grid = grid.values(None, &mut params)?;
            params.add("blocklength", blocklength).add("iters", iters);
            let mut table = Table::new(command_line(), params.0, &["epsilon", "n", "t_iter", "pb_exact"]);
            for &eps in &grid {
                let values = exact_small_ensemble_rounds(l, r, blocklength, eps, iters)?;
                for (t, v) in values.into_iter().enumerate() {
                    table.push(vec![eps.into(), blocklength.into(), t.into(), v.into()]);
                }
            }
            (table, out)
        }
        Command::Curve { ensemble, grid, blocklength, iters, prec, out } => {
            let ens = ensemble.load(&mut params)?;
            let grid = grid.values(None, &mut params)?;
            params.add("blocklength", join(&blocklength)).add("iters", iters);
            let (prec, _) = prec.config(&mut params)?;
            let table = curve_table(&ens, &grid, &blocklength, iters, prec, params)?;
            (table, out)
        }
        Command::Compare { ensemble, grid, blocklength, iters, mc, prec, out } => {
            let ens = ensemble.load(&mut params)?;
            let grid = grid.values(None, &mut params)?;
            params
                .add("blocklength", join(&blocklength))
                .add("iters", iters)
                .add("trials", mc.trials)
                .add("seed", mc.seed);
            let (prec, _) = prec.config(&mut params)?;
            let table = compare_table(&ens, &grid, &blocklength, iters, mc.trials, mc.seed, prec, params)?;
            (table, out)
        }
        Command::Fig2(args) => figure_curve(args, (2, 3), 20, &[51, 102, 201, 402, 801], (0.30, 0.55, 0.01), params)?,
        Command::Fig3(args) => figure_curve(args, (3, 6), 5, &[512, 2048, 8192], (0.30, 0.50, 0.01), params)?,
        Command::Fig4(args) => {
            let ens = DegreeDistribution::regular(2, 3)?;
            params.add("ensemble", &ens);
            let grid = args.grid.values(Some((0.05, 0.45, 0.05)), &mut params)?;
            let (prec, variant) = args.prec.config(&mut params)?;
            let opts = args.limit.options(variant, &mut params)?;
            let mut table = Table::new(
                command_line(),
                params.0,
                &["epsilon", "t", "alpha_limit", "errorfloor", "status"],
            );
            for (eps, res) in limits(&ens, &grid, prec, opts)? {
                let floor = errorfloor_coefficient(&ens, eps).ok();
                let last = res.last();
                table.push(vec![
                    eps.into(),
                    last.t.into(),
                    last.alpha.to_f64().into(),
                    floor.into(),
                    status(&res.outcome).as_str().into(),
                ]);
            }
            (table, args.out)
        }
        Command::Fig5(args) => {
            let ens = DegreeDistribution::regular(3, 6)?;
            params.add("ensemble", &ens);
            let grid = args.grid.values(Some((0.435, 0.50, 0.005)), &mut params)?;
            let (prec, variant) = args.prec.config(&mut params)?;
            let opts = args.limit.options(variant, &mut params)?;
            let mut table = Table::new(command_line(), params.0, &["epsilon", "t", "alpha_limit", "status"]);
            for (eps, res) in limits(&ens, &grid, prec, opts)? {
                let last = res.last();
                table.push(vec![
                    eps.into(),
                    last.t.into(),
                    last.alpha.to_f64().into(),
                    status(&res.outcome).as_str().into(),
                ]);
            }
            (table, args.out)
        }
    };
    let bytes = table.render(out.format)?;
    emit(&bytes, out.out.as_deref())?;
    Ok(())
}

fn join(ns: &[usize]) -> String {
    ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
}

fn coefficient_rows(
    ens: &DegreeDistribution,
    grid: &[f64],
    iters: usize,
    sweep: bool,
    prec: PrecisionConfig,
    variant: RecursionVariant,
    need_beta: bool,
) -> CliResult<Vec<Vec<Cell>>> {
    let regular = ens.as_regular().is_some();
    let per_eps: Vec<Vec<Vec<Cell>>> = grid
        .par_iter()
        .map(|&eps| -> CliResult<Vec<Vec<Cell>>> {
            let ts: Vec<usize> = if sweep { (0..=iters).collect() } else { vec![iters] };
            if regular {
                let results = if sweep {
                    alpha_sweep(ens, eps, iters, prec, variant)?
                } else {
                    vec![ScalingContext::new(ens, eps, iters, prec, variant)?.alpha(iters)?]
                };
                Ok(results
                    .iter()
                    .map(|r| {
                        vec![
                            eps.into(),
                            r.t.into(),
                            r.beta.to_f64().into(),
                            r.gamma.to_f64().into(),
                            r.alpha.to_f64().into(),
                        ]
                    })
                    .collect())
            } else if need_beta {
                // reports the unsupported-ensemble error
                Err(ldpc_scaling::alpha(ens, eps, iters, prec).unwrap_err().into())
            } else {
                let mut ctx = ScalingContext::new(ens, eps, iters, prec, variant)?;
                ts.into_iter()
                    .map(|t| {
                        let g = ctx.gamma(t)?.to_f64();
                        Ok(vec![eps.into(), t.into(), Cell::Empty, g.into(), Cell::Empty])
                    })
                    .collect()
            }
        })
        .collect::<CliResult<_>>()?;
    Ok(per_eps.into_iter().flatten().collect())
}

fn limits(
    ens: &DegreeDistribution,
    grid: &[f64],
    prec: PrecisionConfig,
    opts: LimitOptions,
) -> CliResult<Vec<(f64, LimitResult)>> {
    grid.par_iter()
        .map(|&eps| Ok((eps, alpha_limit(ens, eps, prec, opts)?)))
        .collect()
}

fn status(outcome: &LimitOutcome) -> String {
    match outcome {
        LimitOutcome::Converged(_) => "converged".into(),
        LimitOutcome::Diverged { rate } => format!("diverged(rate={})", output::format_float(*rate)),
        LimitOutcome::Inconclusive => "inconclusive".into(),
    }
}

fn limit_row(eps: f64, res: &LimitResult) -> Vec<Cell> {
    let last = res.last();
    vec![
        eps.into(),
        last.t.into(),
        last.beta.to_f64().into(),
        last.gamma.to_f64().into(),
        last.alpha.to_f64().into(),
        status(&res.outcome).as_str().into(),
    ]
}

fn curve_table(
    ens: &DegreeDistribution,
    grid: &[f64],
    blocklengths: &[usize],
    iters: usize,
    prec: PrecisionConfig,
    params: Params,
) -> CliResult<Table> {
    let mut table = Table::new(command_line(), params.0, &CURVE_COLUMNS);
    // α does not depend on n, so one pass over the grid serves every block length
    let rows = approx_curve(ens, 1, grid, iters, prec)?;
    for &n in blocklengths {
        for row in &rows {
            table.push(vec![
                row.epsilon.into(),
                n.into(),
                iters.into(),
                row.pb_infinite.into(),
                row.alpha.into(),
                (row.pb_infinite + row.alpha / n as f64).into(),
            ]);
        }
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn compare_table(
    ens: &DegreeDistribution,
    grid: &[f64],
    blocklengths: &[usize],
    iters: usize,
    trials: u64,
    seed: u64,
    prec: PrecisionConfig,
    params: Params,
) -> CliResult<Table> {
    let mut table = Table::new(command_line(), params.0, &COMPARE_COLUMNS);
    for &n in blocklengths {
        for &eps in grid {
            let row = compare(ens, n, eps, iters, trials, seed, prec)?;
            table.push(vec![
                row.epsilon.into(),
                row.n.into(),
                row.pb_sim.into(),
                row.stderr.into(),
                row.pb_de.into(),
                row.alpha.into(),
                row.pb_approx.into(),
                row.abs_diff.into(),
                row.z_score.into(),
            ]);
        }
    }
    Ok(table)
}

fn figure_curve(
    args: FigureCurveArgs,
    (l, r): (u32, u32),
    iters: usize,
    blocklengths: &[usize],
    default_grid: (f64, f64, f64),
    mut params: Params,
) -> CliResult<(Table, OutputArgs)> {
    let ens = DegreeDistribution::regular(l, r)?;
    params.add("ensemble", &ens);
    let grid = args.grid.values(Some(default_grid), &mut params)?;
    params.add("blocklength", join(blocklengths)).add("iters", iters);
    let (prec, _) = args.prec.config(&mut params)?;
    let table = match args.trials {
        Some(trials) => {
            params.add("trials", trials).add("seed", args.seed);
            compare_table(&ens, &grid, blocklengths, iters, trials, args.seed, prec, params)?
        }
        None => curve_table(&ens, &grid, blocklengths, iters, prec, params)?,
    };
    Ok((table, args.out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
