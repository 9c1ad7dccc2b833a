use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pilot_overhead::efficiency::optimize_overhead;
use pilot_overhead::expansions::{
    mimo_overhead_expansion, overhead_expansion, power_allocation_expansion, se_expansion_boost,
    se_expansion_no_boost,
};
use pilot_overhead::mimo::{optimize_overhead_mimo, AntennaConfig};
use pilot_overhead::spectra::{SpectralShape, TabulatedShape};
use pilot_overhead::{DopplerSpec, FadingModel, SnrLinear};
use pilotopt::figures::figure;
use pilotopt::output::{number, write_csv, write_json, Format};
use pilotopt::physical::doppler_from_physical;
use pilotopt::sweep::{run_sweep, Axis, Fixed, Method, Quantity, Scale, SweepRequest};
use pilotopt::verify::{run_criterion, VerifyOptions, CRITERIA};
use serde::Serialize;

/// Optimum pilot overhead and pilot power for time-selective Rayleigh fading.
#[derive(Parser)]
#[command(name = "pilotopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one quantity over an axis.
    Sweep(SweepArgs),
    /// Reproduce the data behind one of the figures (1 to 9).
    Fig {
        number: u8,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Optimize the pilot overhead (and boost) at one operating point.
    Optimize {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the expansion-vs-exact verification checks.
    Verify(VerifyArgs),
    /// Normalized Doppler from velocity, carrier frequency and symbol rate.
    Doppler {
        /// m/s
        #[arg(long)]
        velocity: f64,
        /// Hz
        #[arg(long)]
        carrier: f64,
        /// symbols/s
        #[arg(long)]
        symbol_rate: f64,
    },
}

#[derive(Clone, Debug)]
enum ShapeArg {
    ClarkeJakes,
    Rectangular,
    File(PathBuf),
}

fn parse_shape(s: &str) -> Result<ShapeArg, String> {
    match s {
        "clarke-jakes" => Ok(ShapeArg::ClarkeJakes),
        "rectangular" => Ok(ShapeArg::Rectangular),
        _ => match s.strip_prefix("file:") {
            Some(p) if !p.is_empty() => Ok(ShapeArg::File(p.into())),
            _ => Err("expected clarke-jakes, rectangular or file:<path>".into()),
        },
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Numeric,
    Expansion,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Numeric => vec![Method::Numeric],
            MethodArg::Expansion => vec![Method::Expansion],
            MethodArg::Both => vec![Method::Numeric, Method::Expansion],
        }
    }
}

#[derive(Args, Serialize)]
struct ChannelArgs {
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Normalized maximum Doppler frequency f_D.
    #[arg(long, default_value_t = 0.02)]
    doppler: f64,
    /// clarke-jakes, rectangular or file:<path> (two columns: ξ, S̃(ξ)).
    #[arg(long, default_value = "clarke-jakes", value_parser = parse_shape)]
    #[serde(skip)]
    shape: ShapeArg,
    /// Use block fading with this block length instead of a Doppler spectrum.
    #[arg(long)]
    block_length: Option<u32>,
    #[arg(long)]
    boost: bool,
    #[arg(long, default_value_t = 1)]
    nt: u32,
    #[arg(long, default_value_t = 1)]
    nr: u32,
    #[arg(long, value_enum, default_value = "both")]
    #[serde(skip)]
    method: MethodArg,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 21)]
    points: usize,
    #[arg(long, value_enum, default_value = "linear")]
    scale: Scale,
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Summary,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "full")]
    level: Level,
    /// Seed of the Monte Carlo capacity oracle.
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = VerifyOptions::default().mc_samples)]
    samples: usize,
    /// Run only these criteria (repeatable).
    #[arg(long = "criterion")]
    criteria: Vec<u8>,
}

fn load_shape(arg: &ShapeArg) -> Result<SpectralShape> {
    Ok(match arg {
        ShapeArg::ClarkeJakes => SpectralShape::ClarkeJakes,
        ShapeArg::Rectangular => SpectralShape::Rectangular,
        ShapeArg::File(path) => SpectralShape::Tabulated(
            TabulatedShape::from_file(path)
                .with_context(|| format!("shape file {}", path.display()))?,
        ),
    })
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<P: Serialize>(
    out: &OutputArgs,
    parameters: &P,
    rows: &[pilotopt::sweep::Row],
) -> Result<()> {
    let mut w = open_output(out)?;
    match out.format {
        Format::Csv => write_csv(&mut w, rows)?,
        Format::Json => {
            write_json(&mut w, parameters, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SweepParameters<'a> {
    quantity: Quantity,
    axis: Axis,
    shape: &'a str,
    fixed: Fixed,
    methods: &'a [Method],
}

fn sweep(args: SweepArgs) -> Result<()> {
    let ch = &args.channel;
    if (ch.nt != 1 || ch.nr != 1) && args.quantity != Quantity::AlphaStarVsAntennas {
        bail!("nt/nr: antenna counts apply to the alpha-star-vs-antennas sweep only");
    }
    let req = SweepRequest {
        quantity: args.quantity,
        axis: Axis {
            lo: args.from,
            hi: args.to,
            points: args.points,
            scale: args.scale,
        },
        shape: load_shape(&ch.shape)?,
        fixed: Fixed {
            snr_db: ch.snr_db,
            doppler: ch.doppler,
            block_length: ch.block_length,
            n_t: ch.nt,
            n_r: ch.nr,
        },
        methods: ch.method.methods(),
        series: "sweep".into(),
    };
    let rows = run_sweep(&req)?;
    let params = SweepParameters {
        quantity: req.quantity,
        axis: req.axis,
        shape: req.shape.name(),
        fixed: req.fixed,
        methods: &req.methods,
    };
    emit(&args.out, &params, &rows)
}

#[derive(Serialize)]
struct FigureParameters {
    figure: u8,
    title: &'static str,
    quantity: Quantity,
    axis: Axis,
    series: &'static [(f64, f64)],
}

fn fig(number: u8, out: OutputArgs) -> Result<()> {
    let f = figure(number)?;
    let rows = f.run()?;
    let params = FigureParameters {
        figure: f.number,
        title: f.title,
        quantity: f.quantity,
        axis: f.axis,
        series: f.series,
    };
    emit(&out, &params, &rows)
}

#[derive(Serialize)]
struct Solution {
    method: &'static str,
    alpha_star: f64,
    rho_p_star: f64,
    rho_d_star: f64,
    se_star: f64,
    clamped: Option<bool>,
}

fn optimize(ch: ChannelArgs, out: OutputArgs) -> Result<()> {
    let snr = SnrLinear::from_db(ch.snr_db)?;
    let shape = load_shape(&ch.shape)?;
    let cfg = AntennaConfig::new(ch.nt, ch.nr)?;
    let mimo = ch.nt != 1 || ch.nr != 1;
    if mimo && ch.block_length.is_some() {
        bail!("block_length: block fading is single-antenna only");
    }
    let (model, shape, f) = match ch.block_length {
        Some(n_b) => (
            FadingModel::block(n_b)?,
            SpectralShape::Rectangular,
            0.5 / n_b as f64,
        ),
        None => (
            FadingModel::continuous(ch.doppler, shape.clone())?,
            shape,
            ch.doppler,
        ),
    };
    let mut rows = Vec::new();
    for method in ch.method.methods() {
        let row = match method {
            Method::Numeric => {
                let s = if mimo {
                    optimize_overhead_mimo(
                        cfg,
                        &DopplerSpec::new(f, shape.clone())?,
                        snr,
                        ch.boost,
                    )?
                } else {
                    optimize_overhead(&model, snr, ch.boost)?
                };
                Solution {
                    method: "numeric",
                    alpha_star: s.alpha_star,
                    rho_p_star: s.rho_p_star,
                    rho_d_star: s.rho_d_star,
                    se_star: s.se_star,
                    clamped: None,
                }
            }
            _ if ch.boost => {
                let f_eff = cfg.n_t() as f64 * f;
                let alloc = power_allocation_expansion(snr, f_eff)?;
                Solution {
                    method: "expansion",
                    alpha_star: 2.0 * f_eff,
                    rho_p_star: alloc.rho_p,
                    rho_d_star: alloc.rho_d,
                    se_star: if mimo {
                        f64::NAN
                    } else {
                        se_expansion_boost(snr, f)?
                    },
                    clamped: None,
                }
            }
            _ => {
                let e = if mimo {
                    mimo_overhead_expansion(&shape, snr, f, cfg)?
                } else {
                    overhead_expansion(&shape, snr, f)?
                };
                let se = if mimo {
                    f64::NAN
                } else {
                    match se_expansion_no_boost(&shape, snr, f) {
                        Err(pilot_overhead::Error::OutOfRegime(_)) => f64::NAN,
                        other => other?,
                    }
                };
                Solution {
                    method: "expansion",
                    alpha_star: e.value,
                    rho_p_star: 1.0,
                    rho_d_star: 1.0,
                    se_star: se,
                    clamped: Some(e.clamped),
                }
            }
        };
        rows.push(row);
    }
    let mut w = open_output(&out)?;
    match out.format {
        Format::Csv => {
            writeln!(w, "method,alpha_star,rho_p_star,rho_d_star,se_star,clamped")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    r.method,
                    number(r.alpha_star),
                    number(r.rho_p_star),
                    number(r.rho_d_star),
                    number(r.se_star),
                    r.clamped.map(|c| c.to_string()).unwrap_or_default()
                )?;
            }
        }
        Format::Json => {
            write_json(&mut w, &ch, &rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

// Returns whether every check passed.
fn verify(args: VerifyArgs) -> Result<bool> {
    let opts = VerifyOptions {
        mc_samples: args.samples,
        seed: args.seed,
    };
    let ids: Vec<u8> = if args.criteria.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        args.criteria
    };
    let mut stdout = io::stdout().lock();
    let mut all_pass = true;
    for id in ids {
        let title = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map(|c| c.1)
            .unwrap_or("?");
        let checks = run_criterion(id, &opts)?;
        let pass = checks.iter().all(|c| c.pass);
        all_pass &= pass;
        writeln!(
            stdout,
            "[{}] criterion {id}: {title}",
            if pass { "PASS" } else { "FAIL" }
        )?;
        if args.level == Level::Full {
            for c in &checks {
                writeln!(
                    stdout,
                    "    [{}] {}: observed {:.3e}, tolerance {:.3e}",
                    if c.pass { "pass" } else { "FAIL" },
                    c.name,
                    c.observed,
                    c.tolerance
                )?;
            }
        }
        stdout.flush()?;
    }
    Ok(all_pass)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep(args) => sweep(args)?,
        Command::Fig { number, out } => fig(number, out)?,
        Command::Optimize { channel, out } => optimize(channel, out)?,
        Command::Verify(args) => {
            if !verify(args)? {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Doppler {
            velocity,
            carrier,
            symbol_rate,
        } => println!(
            "{}",
            number(doppler_from_physical(velocity, carrier, symbol_rate)?)
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e
                .chain()
                .filter_map(|c| c.downcast_ref::<pilot_overhead::Error>())
                .any(|c| c.is_numerical());
            ExitCode::from(if numerical { 2 } else { 1 })
        }
    }
}
