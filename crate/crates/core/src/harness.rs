//! Noise synthesis and the seeded Monte-Carlo experiment runner.
//!
//! # Reproducibility
//!
//! Every random stream is a ChaCha20 generator seeded from
//! [`derive_seed`]: the first eight bytes (little endian) of
//! `SHA-256(tag || 0x00 || part_0 || part_1 || ...)`, each part a
//! little-endian `u64`. The streams are
//!
//! | tag        | parts                                  | used for              |
//! |------------|----------------------------------------|-----------------------|
//! | `"signal"` | `seed, d, trial`                       | ground-truth signal   |
//! | `"noise"`  | `seed, d, delta, snr bits, trial`      | measurement noise     |
//! | `"gs"`     | `seed, d, delta, snr bits, trial`      | baseline start point  |
//!
//! so a row depends only on its own coordinates, never on scheduling.
//!
//! # Files
//!
//! `run_experiment` writes the per-trial CSV at the configured path, a JSON
//! sidecar next to it (`.json`) and per-cell aggregates (`.summary.csv`).
//! Rows already present in the CSV are kept and not recomputed.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{gerchberg_saxton, gs_refine, GsConfig, GsInit, REFINE_ITERS};
use crate::error::{Error, Result};
use crate::lifting::{forward_measure, LiftedSolver, MeasurementGrid, NoiseInfo, SolverStrategy};
use crate::masks::{build_masks, MaskFamily, MaskKind};
use crate::metrics::error_db;
use crate::signal::Signal;
use crate::sync::{recover, MagnitudeMethod, RecoveryConfig};

/// Seed for the stream named `tag` at the given coordinates.
pub fn derive_seed(tag: &str, parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update([0u8]);
    for p in parts {
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(first)
}

/// `10 log10(sum y^2 / sum n^2)`.
pub fn measured_snr_db(clean: &[f64], noise: &[f64]) -> f64 {
    let s: f64 = clean.iter().map(|v| v * v).sum();
    let n: f64 = noise.iter().map(|v| v * v).sum();
    10.0 * (s / n).log10()
}

/// Add i.i.d. real Gaussian noise with `sigma^2 = sum y^2 / (D 10^{snr/10})`.
/// `snr_db = +inf` returns the grid unchanged.
pub fn synthesize_noise(y: &MeasurementGrid, snr_db: f64, seed: u64) -> Result<MeasurementGrid> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter(format!("SNR must be finite or +inf, got {snr_db}")));
    }
    if snr_db == f64::INFINITY {
        return Ok(y.clone());
    }
    let clean = y.values();
    let power: f64 = clean.iter().map(|v| v * v).sum();
    let sigma2 = power / (clean.len() as f64 * 10f64.powf(snr_db / 10.0));
    if sigma2 == 0.0 {
        return Ok(y.clone());
    }
    let sigma = sigma2.sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..clean.len())
        .map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect();
    let realized = measured_snr_db(clean, &noise);
    let noisy = clean.iter().zip(&noise).map(|(a, b)| a + b).collect();
    Ok(y.with_values(noisy)?.with_noise_info(NoiseInfo {
        sigma2,
        snr_db,
        seed,
        realized_snr_db: realized,
    }))
}

/// SNR values serialize as numbers, with `"inf"` for the noiseless case.
pub mod snr_serde {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(SnrVisitor)
    }

    pub(super) struct SnrVisitor;

    impl<'de> Visitor<'de> for SnrVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("an SNR in dB or \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
                other => other.parse().map_err(|_| E::custom(format!("bad SNR {v:?}"))),
            }
        }
    }

    pub mod list {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&Snr(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Snr>::deserialize(d)?.into_iter().map(|s| s.0).collect())
        }

        struct Snr(f64);

        impl serde::Serialize for Snr {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::serialize(&self.0, s)
            }
        }

        impl<'de> Deserialize<'de> for Snr {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                super::deserialize(d).map(Snr)
            }
        }
    }
}

/// How the band width follows from `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DeltaRule {
    Fixed { delta: usize },
    /// `D = c d`, so `delta = ceil((c + 1) / 2)`.
    MeasurementsPerDim { c: f64 },
    /// `D = ceil(c d log2 d)`, so `delta = ceil((D / d + 1) / 2)`.
    LogMeasurements { c: f64 },
    /// `delta = ceil(log2 d)`.
    LogDelta,
}

impl DeltaRule {
    /// The band width for dimension `d`; the measurement count actually used
    /// is `(2 delta - 1) d`, never fewer than the rule asks for.
    pub fn delta(&self, d: usize) -> Result<usize> {
        let df = d as f64;
        let delta = match *self {
            DeltaRule::Fixed { delta } => delta,
            DeltaRule::MeasurementsPerDim { c } => ((c + 1.0) / 2.0).ceil() as usize,
            DeltaRule::LogMeasurements { c } => {
                let big_d = (c * df * df.log2()).ceil();
                ((big_d / df + 1.0) / 2.0).ceil() as usize
            }
            DeltaRule::LogDelta => df.log2().ceil() as usize,
        };
        if delta == 0 || 2 * delta - 1 > d {
            return Err(Error::InvalidParameter(format!(
                "rule {self:?} gives delta = {delta}, which needs 1 <= 2 delta - 1 <= d = {d}"
            )));
        }
        Ok(delta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// The pipeline with the configured magnitude method.
    Blockpr,
    /// The pipeline with block magnitudes.
    BlockprBlocks,
    /// Block magnitudes followed by a short alternating-projection polish.
    BlockprBlocksGs,
    /// Alternating projections from a random start.
    Gs,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Blockpr => "blockpr",
            Algorithm::BlockprBlocks => "blockpr-blocks",
            Algorithm::BlockprBlocksGs => "blockpr-blocks-gs",
            Algorithm::Gs => "gs",
        }
    }
}

fn default_trials() -> usize {
    100
}

fn default_masks() -> MaskKind {
    MaskKind::UnitPair
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: Vec<usize>,
    pub delta: DeltaRule,
    #[serde(with = "snr_serde::list")]
    pub snr_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_masks")]
    pub masks: MaskKind,
    /// Defaults to the closed form for unit-pair masks and the FFT solver
    /// otherwise.
    #[serde(default)]
    pub strategy: Option<SolverStrategy>,
    /// Magnitude method of the `blockpr` algorithm.
    #[serde(default)]
    pub magnitudes: MagnitudeMethod,
    #[serde(default)]
    pub gs_max_iter: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config fields serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.d.is_empty() {
            return fail("experiment needs at least one dimension");
        }
        if self.snr_db.is_empty() {
            return fail("experiment needs at least one SNR");
        }
        if self.algorithms.is_empty() {
            return fail("experiment needs at least one algorithm");
        }
        if self.trials == 0 {
            return fail("experiment needs at least one trial");
        }
        if let Some(s) = self.snr_db.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return Err(Error::InvalidParameter(format!("SNR {s} is not finite or +inf")));
        }
        for &d in &self.d {
            self.delta.delta(d)?;
        }
        Ok(())
    }

    fn strategy(&self) -> SolverStrategy {
        self.strategy.unwrap_or(match self.masks {
            MaskKind::UnitPair => SolverStrategy::UnitPairClosed,
            _ => SolverStrategy::BlockCirculantFft,
        })
    }
}

/// One CSV row: a single trial of one algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub d: usize,
    pub delta: usize,
    #[serde(rename = "D")]
    pub measurements: usize,
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    pub algorithm: Algorithm,
    pub trial: usize,
    pub error_db: f64,
    pub time_ms_total: f64,
    pub time_ms_solve: Option<f64>,
    pub time_ms_eig: Option<f64>,
    pub eig_iters: Option<usize>,
    pub kappa: Option<f64>,
}

pub const CSV_HEADER: &str =
    "d,delta,D,snr_db,algorithm,trial,error_db,time_ms_total,time_ms_solve,time_ms_eig,eig_iters,kappa";

type RowKey = (usize, usize, u64, Algorithm, usize);

impl ExperimentRow {
    fn key(&self) -> RowKey {
        (self.d, self.delta, self.snr_db.to_bits(), self.algorithm, self.trial)
    }

    fn order(a: &Self, b: &Self) -> std::cmp::Ordering {
        (a.d, a.delta)
            .cmp(&(b.d, b.delta))
            .then(a.snr_db.total_cmp(&b.snr_db))
            .then((a.algorithm, a.trial).cmp(&(b.algorithm, b.trial)))
    }

    /// The row without its timing columns.
    fn fingerprint(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        format!(
            "{},{},{},{:?},{},{},{:?},{},{}\n",
            self.d,
            self.delta,
            self.measurements,
            self.snr_db,
            self.algorithm.name(),
            self.trial,
            self.error_db,
            self.eig_iters.map(|v| v.to_string()).unwrap_or_default(),
            opt(self.kappa),
        )
    }
}

/// Statistics of `error_db` over the trials of one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub d: usize,
    pub delta: usize,
    #[serde(rename = "D")]
    pub measurements: usize,
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub mean_error_db: f64,
    pub median_error_db: f64,
    /// Sample standard deviation, `0` for a single trial.
    pub std_error_db: f64,
    pub mean_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub d: usize,
    pub delta: usize,
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    pub algorithm: Algorithm,
    pub trial: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    /// SHA-256 over the rows without timing columns, hex encoded.
    pub hash: String,
    pub rows_computed: usize,
    pub rows_resumed: usize,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub rows: Vec<ExperimentRow>,
}

/// Sidecar and summary paths for a results CSV.
pub fn output_paths(csv: &Path) -> (PathBuf, PathBuf) {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    (
        csv.with_extension("json"),
        csv.with_file_name(format!("{stem}.summary.csv")),
    )
}

pub fn read_rows(path: &Path) -> Result<Vec<ExperimentRow>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header = rd.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse(format!(
            "{} has header {header:?}, expected {CSV_HEADER:?}",
            path.display()
        )));
    }
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_path(path)?;
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn hash_rows(rows: &[ExperimentRow]) -> String {
    let mut h = Sha256::new();
    for r in rows {
        h.update(r.fingerprint().as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Per-cell statistics; `rows` must be in canonical order.
pub fn aggregate(rows: &[ExperimentRow]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for cell in rows.chunk_by(|a, b| (a.d, a.delta, a.snr_db.to_bits(), a.algorithm) == (b.d, b.delta, b.snr_db.to_bits(), b.algorithm)) {
        let n = cell.len() as f64;
        let mut errs: Vec<f64> = cell.iter().map(|r| r.error_db).collect();
        let mean = errs.iter().sum::<f64>() / n;
        let var = if cell.len() > 1 {
            errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        errs.sort_by(f64::total_cmp);
        let first = &cell[0];
        out.push(Aggregate {
            d: first.d,
            delta: first.delta,
            measurements: first.measurements,
            snr_db: first.snr_db,
            algorithm: first.algorithm,
            trials: cell.len(),
            mean_error_db: mean,
            median_error_db: median(&errs),
            std_error_db: var.sqrt(),
            mean_time_ms: cell.iter().map(|r| r.time_ms_total).sum::<f64>() / n,
        });
    }
    out
}

struct Cell<'a> {
    d: usize,
    delta: usize,
    masks: &'a MaskFamily,
    solver: &'a LiftedSolver,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn run_one(
    cfg: &ExperimentConfig,
    cell: &Cell,
    x0: &Signal,
    y: &MeasurementGrid,
    snr: f64,
    trial: usize,
    algorithm: Algorithm,
) -> Result<ExperimentRow> {
    let base = ExperimentRow {
        d: cell.d,
        delta: cell.delta,
        measurements: cell.d * cell.masks.count(),
        snr_db: snr,
        algorithm,
        trial,
        error_db: 0.0,
        time_ms_total: 0.0,
        time_ms_solve: None,
        time_ms_eig: None,
        eig_iters: None,
        kappa: None,
    };
    let pipeline = |magnitudes| {
        let rc = RecoveryConfig {
            magnitudes,
            ..Default::default()
        };
        recover(y, cell.solver, &rc, Some(x0))
    };
    let start = Instant::now();
    let row = match algorithm {
        Algorithm::Blockpr | Algorithm::BlockprBlocks | Algorithm::BlockprBlocksGs => {
            let magnitudes = match algorithm {
                Algorithm::Blockpr => cfg.magnitudes,
                _ => MagnitudeMethod::blocks(cell.delta),
            };
            let r = pipeline(magnitudes)?;
            let mut err = r.error_db.expect("truth was given");
            if algorithm == Algorithm::BlockprBlocksGs {
                let polished = gs_refine(&r.estimate, y, cell.masks, REFINE_ITERS)?;
                err = error_db(&polished.report.estimate, x0)?;
            }
            ExperimentRow {
                error_db: err,
                time_ms_total: ms(start),
                time_ms_solve: Some(r.stage_times_ms.invert),
                time_ms_eig: Some(r.stage_times_ms.eigen),
                eig_iters: r.eigen.map(|e| e.iters),
                kappa: r.solver.kappa,
                ..base
            }
        }
        Algorithm::Gs => {
            let seed = derive_seed(
                "gs",
                &[cfg.seed, cell.d as u64, cell.delta as u64, snr.to_bits(), trial as u64],
            );
            let gs = GsConfig {
                max_iter: cfg.gs_max_iter.unwrap_or(GsConfig::default().max_iter),
                init: GsInit::RandomGaussian { seed },
                ..Default::default()
            };
            let out = gerchberg_saxton(y, cell.masks, &gs, Some(x0))?;
            ExperimentRow {
                error_db: out.report.error_db.expect("truth was given"),
                time_ms_total: ms(start),
                ..base
            }
        }
    };
    Ok(row)
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    match std::env::var("BLOCKPR_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("BLOCKPR_THREADS={v:?} is not a count")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(Some)
                .map_err(|e| Error::InvalidParameter(e.to_string()))
        }
        Err(_) => Ok(None),
    }
}

/// Run every `(d, delta, snr, algorithm, trial)` cell of the sweep. With an
/// output path, rows found in an existing CSV are reused and all three files
/// are rewritten in canonical order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    // create the directory before the sweep so a bad path fails fast
    if let Some(dir) = cfg.output.as_deref().and_then(Path::parent) {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let existing = match &cfg.output {
        Some(p) if p.exists() => read_rows(p)?,
        _ => Vec::new(),
    };
    let done: HashSet<RowKey> = existing.iter().map(ExperimentRow::key).collect();

    let mut cells = Vec::new();
    for &d in &cfg.d {
        let delta = cfg.delta.delta(d)?;
        let masks = build_masks(cfg.masks, d, delta)?;
        let solver = LiftedSolver::build(&masks, cfg.strategy())?;
        cells.push((d, delta, masks, solver));
    }

    let mut tasks = Vec::new();
    for (ci, (d, delta, _, _)) in cells.iter().enumerate() {
        for trial in 0..cfg.trials {
            for &snr in &cfg.snr_db {
                let todo: Vec<Algorithm> = cfg
                    .algorithms
                    .iter()
                    .copied()
                    .filter(|&a| !done.contains(&(*d, *delta, snr.to_bits(), a, trial)))
                    .collect();
                if !todo.is_empty() {
                    tasks.push((ci, trial, snr, todo));
                }
            }
        }
    }

    let work = || -> Vec<(Vec<ExperimentRow>, Vec<Failure>)> {
        tasks
            .par_iter()
            .map(|(ci, trial, snr, todo)| {
                let (d, delta, masks, solver) = &cells[*ci];
                let cell = Cell {
                    d: *d,
                    delta: *delta,
                    masks,
                    solver,
                };
                let (trial, snr) = (*trial, *snr);
                let mut rng = ChaCha20Rng::seed_from_u64(derive_seed("signal", &[cfg.seed, *d as u64, trial as u64]));
                let x0 = Signal::random_gaussian(*d, &mut rng);
                let noise_seed = derive_seed(
                    "noise",
                    &[cfg.seed, *d as u64, *delta as u64, snr.to_bits(), trial as u64],
                );
                let y = forward_measure(&x0, masks).and_then(|y| synthesize_noise(&y, snr, noise_seed));
                let mut rows = Vec::new();
                let mut failures = Vec::new();
                for &algorithm in todo {
                    let result = y
                        .as_ref()
                        .map_err(|e| Error::InvalidParameter(e.to_string()))
                        .and_then(|y| run_one(cfg, &cell, &x0, y, snr, trial, algorithm));
                    match result {
                        Ok(r) => rows.push(r),
                        Err(e) => failures.push(Failure {
                            d: *d,
                            delta: *delta,
                            snr_db: snr,
                            algorithm,
                            trial,
                            message: e.to_string(),
                        }),
                    }
                }
                (rows, failures)
            })
            .collect()
    };
    let results = match thread_pool()? {
        Some(pool) => pool.install(work),
        None => work(),
    };

    let rows_resumed = existing.len();
    let mut rows = existing;
    let mut failures = Vec::new();
    let mut rows_computed = 0;
    for (r, f) in results {
        rows_computed += r.len();
        rows.extend(r);
        failures.extend(f);
    }
    rows.sort_by(ExperimentRow::order);
    let aggregates = aggregate(&rows);
    let outcome = ExperimentOutcome {
        config: cfg.clone(),
        hash: hash_rows(&rows),
        rows_computed,
        rows_resumed,
        aggregates,
        failures,
        rows,
    };
    if let Some(path) = &cfg.output {
        write_csv(path, &outcome.rows)?;
        let (sidecar, summary) = output_paths(path);
        write_csv(&summary, &outcome.aggregates)?;
        let mut f = File::create(sidecar)?;
        f.write_all(serde_json::to_string_pretty(&outcome)?.as_bytes())?;
        f.write_all(b"\n")?;
    }
    Ok(outcome)
}

/// Mean `error_db` per `(snr, algorithm)` for quick inspection.
pub fn mean_by_snr(outcome: &ExperimentOutcome) -> BTreeMap<(Algorithm, i64), f64> {
    outcome
        .aggregates
        .iter()
        .map(|a| ((a.algorithm, (a.snr_db * 1000.0).round() as i64), a.mean_error_db))
        .collect()
}
