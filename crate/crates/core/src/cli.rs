//! Command-line front end.
//!
//! Exit codes: `0` success, `1` usage or validation error, `2` I/O error.
//! Inputs ending in `.json` are read as JSON, anything else as CSV.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::bounds::check_bounds;
use crate::error::{Error, Result};
use crate::harness::{derive_seed, run_experiment, synthesize_noise, ExperimentConfig};
use crate::lifting::{forward_measure, LiftedSolver, MeasurementGrid, SolverStrategy};
use crate::masks::{build_masks, default_decay, MaskKind};
use crate::signal::Signal;
use crate::spectral::spectral_gap;
use crate::sync::{recover, EigenConfig, EigenMethod, MagnitudeMethod, RecoveryConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Exponential,
    UnitPair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Auto,
    Fft,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Magnitudes {
    Diagonal,
    Blocks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Eigen {
    InversePower,
    Rayleigh,
}

#[derive(Debug, Parser)]
#[command(name = "blockpr", version, about = "Phase retrieval from local correlation measurements")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct MaskArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    delta: usize,
    #[arg(long, value_enum, default_value_t = Kind::UnitPair)]
    kind: Kind,
    /// Decay of exponential masks; defaults to max(4, (delta - 1) / 2).
    #[arg(long)]
    decay: Option<f64>,
}

impl MaskArgs {
    fn kind(&self) -> MaskKind {
        match self.kind {
            Kind::Exponential => MaskKind::Exponential {
                a: self.decay.unwrap_or_else(|| default_decay(self.delta)),
            },
            Kind::UnitPair => MaskKind::UnitPair,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a mask family.
    Masks {
        #[command(flatten)]
        masks: MaskArgs,
    },
    /// Measure a signal (read from --signal, or random with --seed).
    Measure {
        #[command(flatten)]
        masks: MaskArgs,
        #[arg(long)]
        signal: Option<PathBuf>,
        /// Add Gaussian noise at this SNR in dB.
        #[arg(long)]
        snr: Option<f64>,
        /// Also write the measured signal here.
        #[arg(long)]
        signal_out: Option<PathBuf>,
    },
    /// Recover a signal from a measurement grid.
    Recover {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::UnitPair)]
        kind: Kind,
        #[arg(long)]
        decay: Option<f64>,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
        #[arg(long, value_enum, default_value_t = Magnitudes::Diagonal)]
        magnitudes: Magnitudes,
        #[arg(long, value_enum, default_value_t = Eigen::InversePower)]
        eigen: Eigen,
        /// Ground truth for scoring.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Eigenvalues and spectral gap of the all-ones band.
    Spectrum {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: usize,
    },
    /// Run an experiment described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Randomized checks of the perturbation bounds.
    CheckBounds {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

fn is_json(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_signal(p: &Path) -> Result<Signal> {
    if is_json(p) {
        Signal::from_json(&fs::read_to_string(p)?)
    } else {
        Signal::read_csv(fs::File::open(p)?)
    }
}

fn read_grid(p: &Path) -> Result<MeasurementGrid> {
    if is_json(p) {
        MeasurementGrid::from_json(&fs::read_to_string(p)?)
    } else {
        MeasurementGrid::read_csv(fs::File::open(p)?)
    }
}

fn signal_bytes(x: &Signal, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => Ok(x.to_json().into_bytes()),
        Format::Csv => {
            let mut buf = Vec::new();
            x.write_csv(&mut buf)?;
            Ok(buf)
        }
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    for r in rows {
        wr.serialize(r)?;
    }
    wr.into_inner().map_err(|e| Error::Io(e.into_error()))
}

#[derive(Serialize)]
struct MaskRow {
    mask: usize,
    n: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct KeyValue<'a> {
    key: &'a str,
    value: f64,
}

fn run(cli: Cli) -> Result<Vec<u8>> {
    let format = cli.format;
    match cli.command {
        Command::Masks { masks } => {
            let fam = build_masks(masks.kind(), masks.d, masks.delta)?;
            match format {
                Format::Json => json_bytes(&fam),
                Format::Csv => csv_bytes((0..fam.count()).flat_map(|j| {
                    let m = fam.support(j).to_vec();
                    m.into_iter().enumerate().map(move |(n, z)| MaskRow {
                        mask: j,
                        n,
                        re: z.re,
                        im: z.im,
                    })
                })),
            }
        }
        Command::Measure {
            masks,
            signal,
            snr,
            signal_out,
        } => {
            let fam = build_masks(masks.kind(), masks.d, masks.delta)?;
            let x = match &signal {
                Some(p) => read_signal(p)?,
                None => Signal::random_gaussian(masks.d, &mut ChaCha20Rng::seed_from_u64(cli.seed)),
            };
            let mut y = forward_measure(&x, &fam)?;
            if let Some(snr) = snr {
                y = synthesize_noise(&y, snr, derive_seed("noise", &[cli.seed]))?;
            }
            if let Some(p) = signal_out {
                let f = if is_json(&p) { Format::Json } else { Format::Csv };
                fs::write(p, signal_bytes(&x, f)?)?;
            }
            match format {
                Format::Json => Ok(y.to_json().into_bytes()),
                Format::Csv => {
                    let mut buf = Vec::new();
                    y.write_csv(&mut buf)?;
                    Ok(buf)
                }
            }
        }
        Command::Recover {
            grid,
            kind,
            decay,
            strategy,
            magnitudes,
            eigen,
            truth,
        } => {
            let y = read_grid(&grid)?;
            let args = MaskArgs {
                d: y.d(),
                delta: y.delta(),
                kind,
                decay,
            };
            let fam = build_masks(args.kind(), y.d(), y.delta())?;
            let strategy = match (strategy, kind) {
                (Strategy::Closed, _) | (Strategy::Auto, Kind::UnitPair) => SolverStrategy::UnitPairClosed,
                _ => SolverStrategy::BlockCirculantFft,
            };
            let solver = LiftedSolver::build(&fam, strategy)?;
            let cfg = RecoveryConfig {
                eigen: EigenConfig {
                    method: match eigen {
                        Eigen::InversePower => EigenMethod::ShiftedInversePower,
                        Eigen::Rayleigh => EigenMethod::RayleighQuotient,
                    },
                    ..Default::default()
                },
                magnitudes: match magnitudes {
                    Magnitudes::Diagonal => MagnitudeMethod::Diagonal,
                    Magnitudes::Blocks => MagnitudeMethod::blocks(y.delta()),
                },
            };
            let x0 = truth.as_deref().map(read_signal).transpose()?;
            let mut report = recover(&y, &solver, &cfg, x0.as_ref())?;
            report.seed = report.seed.or(Some(cli.seed));
            match format {
                Format::Json => {
                    let mut s = report.to_json();
                    s.push('\n');
                    Ok(s.into_bytes())
                }
                Format::Csv => signal_bytes(&report.estimate, Format::Csv),
            }
        }
        Command::Spectrum { d, delta } => {
            let r = spectral_gap(d, delta)?;
            match format {
                Format::Json => json_bytes(&r),
                Format::Csv => {
                    let mut rows = vec![
                        KeyValue { key: "nu1", value: r.nu1 },
                        KeyValue { key: "gap", value: r.gap },
                        KeyValue { key: "nu1_minus_nu2", value: r.nu1_minus_nu2 },
                        KeyValue { key: "tau", value: r.tau },
                        KeyValue { key: "gap_lower_bound", value: r.gap_lower_bound },
                        KeyValue { key: "gap_upper_bound", value: r.gap_upper_bound },
                    ];
                    let names: Vec<String> = (0..r.nus.len()).map(|j| format!("nu[{j}]")).collect();
                    rows.extend(names.iter().zip(&r.nus).map(|(k, v)| KeyValue { key: k, value: *v }));
                    csv_bytes(rows)
                }
            }
        }
        Command::Bench { config } => {
            let mut cfg = ExperimentConfig::from_json(&fs::read_to_string(&config)?)?;
            if let Some(out) = &cli.out {
                cfg.output = Some(out.clone());
            }
            let outcome = run_experiment(&cfg)?;
            // the results already went to the configured files
            match format {
                Format::Json => json_bytes(&outcome.aggregates),
                Format::Csv => csv_bytes(&outcome.aggregates),
            }
            .map(|b| if cli.out.is_some() { Vec::new() } else { b })
        }
        Command::CheckBounds { d, delta, trials } => {
            let r = check_bounds(d, delta, trials, cli.seed)?;
            match format {
                Format::Json => json_bytes(&r),
                Format::Csv => csv_bytes([
                    KeyValue { key: "rank1_worst_ratio", value: r.rank1.worst_ratio },
                    KeyValue { key: "sin_theta_worst_ratio", value: r.sin_theta.worst_ratio },
                    KeyValue { key: "cheeger_worst_ratio", value: r.cheeger.worst_ratio },
                    KeyValue { key: "frustration_identity_gap", value: r.frustration_identity_gap },
                    KeyValue { key: "phase_ratio_sgn", value: r.phase_ratio_sgn },
                    KeyValue { key: "phase_ratio_scaled", value: r.phase_ratio_scaled },
                    KeyValue { key: "all_hold", value: if r.all_hold { 1.0 } else { 0.0 } },
                ]),
            }
        }
    }
}

/// Parse `argv` (program name first), run the command and return the exit
/// code. Output goes to `--out` or stdout, diagnostics to stderr.
pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let out = parsed.out.clone();
    let bench = matches!(parsed.command, Command::Bench { .. });
    let result = run(parsed).and_then(|bytes| match &out {
        Some(p) if !bench => fs::write(p, bytes).map_err(Error::from),
        _ => std::io::stdout().write_all(&bytes).map_err(Error::from),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}
