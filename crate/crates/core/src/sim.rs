//! Monte Carlo estimation of the memory lifetime.
//!
//! One sample starts from the vacuum and repeats, for `t = 1, 2, ...`:
//! pair-creation noise, a faulty syndrome round, the decoder, a group-size
//! check and a verification of a copy of the state. The first failing check
//! ends the sample with lifetime `t`; surviving `max_steps` steps censors it.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{Decoder, DecoderParams, StepReport};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::noise::{apply_pair_creation_step, measure_syndrome, NoiseParams, PairEvent};
use crate::rng::SampleRngs;
use crate::state::{Fault, SystemState, MAX_GROUP_CAP};
use crate::verifier::{verify, GrowthSchedule, Verdict};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FIBSIM_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(rename = "L")]
    pub size: usize,
    #[serde(rename = "Q")]
    pub colony: usize,
    #[serde(rename = "b")]
    pub base: u64,
    #[serde(rename = "fc")]
    pub f_target: f64,
    #[serde(rename = "fn")]
    pub f_neighbor: f64,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "Delta")]
    pub gap: f64,
    pub instantaneous: bool,
    #[serde(rename = "maxGroupAnyons")]
    pub max_group: usize,
    #[serde(rename = "maxSteps")]
    pub max_steps: u64,
    pub samples: u64,
    #[serde(rename = "baseSeed")]
    pub base_seed: u64,
    pub growth: GrowthSchedule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let d = DecoderParams::default();
        Self {
            size: 9,
            colony: d.colony,
            base: d.base,
            f_target: d.f_target,
            f_neighbor: d.f_neighbor,
            p: 1e-3,
            q: 1e-3,
            gap: 1.0,
            instantaneous: false,
            max_group: 40,
            max_steps: 10_000_000,
            samples: 1000,
            base_seed: 0,
            growth: GrowthSchedule::Doubling,
            output: None,
        }
    }
}

impl SimulationConfig {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.size, self.colony)
    }

    pub fn decoder_params(&self) -> DecoderParams {
        DecoderParams {
            colony: self.colony,
            base: self.base,
            f_target: self.f_target,
            f_neighbor: self.f_neighbor,
            instantaneous: self.instantaneous,
        }
    }

    pub fn noise_params(&self) -> NoiseParams {
        NoiseParams { p: self.p, q: self.q, gap: self.gap }
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice()?;
        self.decoder_params().validate()?;
        self.noise_params().validate()?;
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("maxSteps must be at least 1".into()));
        }
        if !(2..=MAX_GROUP_CAP).contains(&self.max_group) {
            return Err(Error::InvalidConfig(format!("maxGroupAnyons must lie in 2..={MAX_GROUP_CAP}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Termination {
    LogicalError,
    VerifyFail,
    GroupTooLarge,
    CensoredAtMaxSteps,
}

impl Termination {
    pub const ALL: [Termination; 4] = [
        Termination::LogicalError,
        Termination::VerifyFail,
        Termination::GroupTooLarge,
        Termination::CensoredAtMaxSteps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::LogicalError => "logicalError",
            Termination::VerifyFail => "verifyFail",
            Termination::GroupTooLarge => "groupTooLarge",
            Termination::CensoredAtMaxSteps => "censoredAtMaxSteps",
        }
    }
}

impl From<Fault> for Termination {
    fn from(f: Fault) -> Self {
        match f {
            Fault::LogicalError => Termination::LogicalError,
            Fault::GroupTooLarge { .. } => Termination::GroupTooLarge,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifetimeRecord {
    pub seed: u64,
    pub lifetime: u64,
    pub termination: Termination,
}

/// One line of the decoder trace.
#[derive(Clone, Debug, Serialize)]
pub struct TraceLine<'a> {
    pub events: &'a [PairEvent],
    #[serde(rename = "reported")]
    pub reported_count: usize,
    #[serde(flatten)]
    pub decoder: &'a StepReport,
    pub anyons: usize,
    pub verdict: Option<Verdict>,
}

fn fault_of(e: Error) -> Result<Fault> {
    match e {
        Error::Fault(f) => Ok(f),
        other => Err(other),
    }
}

/// Runs one sample. If `trace` is given, every step in which something
/// happens is written to it as one JSON line.
pub fn run_sample_traced(cfg: &SimulationConfig, seed: u64, mut trace: Option<&mut dyn Write>) -> Result<LifetimeRecord> {
    cfg.validate()?;
    let lattice = cfg.lattice()?;
    let noise = cfg.noise_params();
    let mut state = SystemState::new(lattice, cfg.max_group);
    let mut decoder = Decoder::new(lattice, cfg.decoder_params())?;
    let mut rngs = SampleRngs::new(seed);
    let end = |lifetime: u64, termination: Termination| Ok(LifetimeRecord { seed, lifetime, termination });

    for t in 1..=cfg.max_steps {
        let events = match apply_pair_creation_step(&mut state, &noise, &mut rngs.noise, &mut rngs.fusion) {
            Ok(ev) => ev,
            Err(f) => return end(t, f.into()),
        };
        let syndrome = measure_syndrome(&state, &noise, &mut rngs.measurement);
        let report = match decoder.step(&mut state, &syndrome, t, &mut rngs.fusion) {
            Ok(r) => r,
            Err(e) => return end(t, fault_of(e)?.into()),
        };
        if let Err(f) = state.check_group_sizes() {
            return end(t, f.into());
        }
        let verdict = if state.is_vacuum() { None } else { Some(verify(&state, cfg.growth, &mut rngs.verifier)) };
        if let Some(out) = trace.as_deref_mut() {
            if !events.is_empty() || !report.hops.is_empty() || !report.issued.is_empty() || syndrome.count() > 0 {
                let line = TraceLine {
                    events: &events,
                    reported_count: syndrome.count(),
                    decoder: &report,
                    anyons: state.anyon_count(),
                    verdict,
                };
                serde_json::to_writer(&mut *out, &line)?;
                out.write_all(b"\n")?;
            }
        }
        if let Some(v) = verdict {
            if !v.is_correctable() {
                return end(t, Termination::VerifyFail);
            }
        }
    }
    end(cfg.max_steps, Termination::CensoredAtMaxSteps)
}

pub fn run_sample(cfg: &SimulationConfig, seed: u64) -> Result<LifetimeRecord> {
    run_sample_traced(cfg, seed, None)
}

/// Summary statistics of a batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregate {
    pub config: SimulationConfig,
    pub samples: u64,
    pub mean: f64,
    pub stderr: f64,
    pub censored_fraction: f64,
    pub termination_histogram: BTreeMap<String, u64>,
    /// Lifetime of an unprotected component, `1 / p` steps.
    pub t1_baseline: f64,
}

impl Aggregate {
    pub fn from_records(config: &SimulationConfig, records: &[LifetimeRecord]) -> Self {
        let n = records.len() as f64;
        let mean = records.iter().map(|r| r.lifetime as f64).sum::<f64>() / n;
        let var = if records.len() > 1 {
            records.iter().map(|r| (r.lifetime as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut histogram: BTreeMap<String, u64> = Termination::ALL.iter().map(|t| (t.as_str().to_string(), 0)).collect();
        for r in records {
            *histogram.entry(r.termination.as_str().to_string()).or_default() += 1;
        }
        let censored = histogram[Termination::CensoredAtMaxSteps.as_str()] as f64;
        Self {
            config: config.clone(),
            samples: records.len() as u64,
            mean,
            stderr: (var / n).sqrt(),
            censored_fraction: censored / n,
            termination_histogram: histogram,
            t1_baseline: t1_baseline(config.p),
        }
    }
}

/// Single-component coherence baseline `1 / p`.
pub fn t1_baseline(p: f64) -> f64 {
    if p > 0.0 {
        1.0 / p
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug)]
pub struct BatchResult {
    /// Sorted by seed.
    pub records: Vec<LifetimeRecord>,
    pub aggregate: Aggregate,
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `samples` samples with seeds `base_seed + i`, in parallel.
pub fn run_batch(cfg: &SimulationConfig) -> Result<BatchResult> {
    cfg.validate()?;
    let work = || -> Result<Vec<LifetimeRecord>> {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| run_sample(cfg, cfg.base_seed.wrapping_add(i)))
            .collect()
    };
    let mut records = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    records.sort_by_key(|r| r.seed);
    let aggregate = Aggregate::from_records(cfg, &records);
    Ok(BatchResult { records, aggregate })
}

/// One row of the per-sample CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    #[serde(rename = "L")]
    pub size: usize,
    #[serde(rename = "Q")]
    pub colony: usize,
    pub b: u64,
    pub fc: f64,
    #[serde(rename = "fn")]
    pub f_neighbor: f64,
    pub p: f64,
    pub q: f64,
    pub instantaneous: bool,
    pub seed: u64,
    pub lifetime: u64,
    pub termination: Termination,
}

impl RecordRow {
    pub fn new(cfg: &SimulationConfig, r: &LifetimeRecord) -> Self {
        Self {
            size: cfg.size,
            colony: cfg.colony,
            b: cfg.base,
            fc: cfg.f_target,
            f_neighbor: cfg.f_neighbor,
            p: cfg.p,
            q: cfg.q,
            instantaneous: cfg.instantaneous,
            seed: r.seed,
            lifetime: r.lifetime,
            termination: r.termination,
        }
    }
}

pub fn write_records<W: Write>(out: W, cfg: &SimulationConfig, records: &[LifetimeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(RecordRow::new(cfg, r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_file(path: &Path, cfg: &SimulationConfig, records: &[LifetimeRecord]) -> Result<()> {
    write_records(std::fs::File::create(path)?, cfg, records)
}

pub fn read_records(path: &Path) -> Result<Vec<RecordRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_aggregate_file(path: &Path, aggregate: &Aggregate) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, aggregate)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// `a` in `lifetime ~ p^(-a)`.
    pub exponent: f64,
    /// Intercept of `ln(lifetime)` at `ln(p) = 0`.
    pub log_prefactor: f64,
    /// `ln(lifetime) - fit` per point.
    pub residuals: Vec<f64>,
}

/// Least-squares fit of `ln(lifetime)` against `ln(p)`.
pub fn fit_powerlaw(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 || points.iter().any(|&(p, l)| !(p > 0.0 && l > 0.0 && p.is_finite() && l.is_finite())) {
        return Err(Error::DegenerateFit);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok(PowerLawFit { exponent: -slope, log_prefactor: intercept, residuals })
}

/// Mean lifetime per `(L, p)` among rows with `p <= p_max`, as
/// `L -> [(p, mean)]` with `p` ascending.
pub fn mean_lifetimes(rows: &[RecordRow], p_max: f64) -> BTreeMap<usize, Vec<(f64, f64)>> {
    let mut sums: BTreeMap<usize, BTreeMap<u64, (f64, u64)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.p <= p_max) {
        let e = sums.entry(r.size).or_default().entry(r.p.to_bits()).or_insert((0.0, 0));
        e.0 += r.lifetime as f64;
        e.1 += 1;
    }
    sums.into_iter()
        .map(|(l, by_p)| {
            let mut pts: Vec<(f64, f64)> = by_p.into_iter().map(|(p, (s, n))| (f64::from_bits(p), s / n as f64)).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (l, pts)
        })
        .collect()
}

/// Grid of batch runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Settings shared by every point.
    #[serde(default)]
    pub base: SimulationConfig,
    #[serde(rename = "L")]
    pub sizes: Vec<usize>,
    pub p: Vec<f64>,
    /// Measurement flip rates; ignored when `couplePQ` is set.
    #[serde(default)]
    pub q: Vec<f64>,
    /// Use `q = p` at every point.
    #[serde(rename = "couplePQ", default)]
    pub couple_pq: bool,
    /// Correction modes to run; defaults to the base setting.
    #[serde(default)]
    pub instantaneous: Vec<bool>,
    /// Summary table, one row per point.
    pub out: PathBuf,
    /// Directory for per-point record CSVs and aggregate JSONs.
    #[serde(rename = "recordsDir", default)]
    pub records_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?)
    }

    /// Every grid point, sizes outermost.
    pub fn points(&self) -> Result<Vec<SimulationConfig>> {
        if self.sizes.is_empty() || self.p.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one L and one p".into()));
        }
        if !self.couple_pq && self.q.is_empty() {
            return Err(Error::InvalidConfig("sweep needs q values or couplePQ".into()));
        }
        let modes = if self.instantaneous.is_empty() { vec![self.base.instantaneous] } else { self.instantaneous.clone() };
        let mut out = Vec::new();
        for &size in &self.sizes {
            for &instantaneous in &modes {
                for &p in &self.p {
                    let qs = if self.couple_pq { vec![p] } else { self.q.clone() };
                    for q in qs {
                        let cfg = SimulationConfig { size, p, q, instantaneous, output: None, ..self.base.clone() };
                        cfg.validate()?;
                        out.push(cfg);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One row of the sweep summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "L")]
    pub size: usize,
    #[serde(rename = "Q")]
    pub colony: usize,
    pub b: u64,
    pub fc: f64,
    #[serde(rename = "fn")]
    pub f_neighbor: f64,
    pub p: f64,
    pub q: f64,
    pub instantaneous: bool,
    #[serde(rename = "maxGroupAnyons")]
    pub max_group: usize,
    #[serde(rename = "maxSteps")]
    pub max_steps: u64,
    pub samples: u64,
    #[serde(rename = "baseSeed")]
    pub base_seed: u64,
    pub mean: f64,
    pub stderr: f64,
    #[serde(rename = "censoredFraction")]
    pub censored_fraction: f64,
    #[serde(rename = "t1Baseline")]
    pub t1_baseline: f64,
    #[serde(rename = "logicalError")]
    pub logical_error: u64,
    #[serde(rename = "verifyFail")]
    pub verify_fail: u64,
    #[serde(rename = "groupTooLarge")]
    pub group_too_large: u64,
    #[serde(rename = "censoredAtMaxSteps")]
    pub censored: u64,
}

impl SweepRow {
    pub fn new(a: &Aggregate) -> Self {
        let c = &a.config;
        let h = |t: Termination| a.termination_histogram.get(t.as_str()).copied().unwrap_or(0);
        Self {
            size: c.size,
            colony: c.colony,
            b: c.base,
            fc: c.f_target,
            f_neighbor: c.f_neighbor,
            p: c.p,
            q: c.q,
            instantaneous: c.instantaneous,
            max_group: c.max_group,
            max_steps: c.max_steps,
            samples: a.samples,
            base_seed: c.base_seed,
            mean: a.mean,
            stderr: a.stderr,
            censored_fraction: a.censored_fraction,
            t1_baseline: a.t1_baseline,
            logical_error: h(Termination::LogicalError),
            verify_fail: h(Termination::VerifyFail),
            group_too_large: h(Termination::GroupTooLarge),
            censored: h(Termination::CensoredAtMaxSteps),
        }
    }
}

/// Runs every grid point and writes the summary table. Rows already
/// finished are flushed before a failing point's error is returned.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let points = config.points()?;
    if let Some(dir) = &config.records_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut table = csv::Writer::from_path(&config.out)?;
    let mut rows = Vec::with_capacity(points.len());
    for cfg in points {
        let batch = run_batch(&cfg)?;
        if let Some(dir) = &config.records_dir {
            let stem = format!(
                "L{}_p{}_q{}_{}",
                cfg.size,
                cfg.p,
                cfg.q,
                if cfg.instantaneous { "instantaneous" } else { "staged" }
            );
            write_records_file(&dir.join(format!("{stem}.csv")), &cfg, &batch.records)?;
            write_aggregate_file(&dir.join(format!("{stem}.json")), &batch.aggregate)?;
        }
        let row = SweepRow::new(&batch.aggregate);
        table.serialize(&row)?;
        table.flush()?;
        rows.push(row);
    }
    Ok(rows)
}
