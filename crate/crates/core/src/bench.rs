//! Benchmark harness: a grid of synthetic weight sets, each resampled by
//! each algorithm, timed until a permuted ancestry vector is in hand.
//!
//! A cell is `(target, N, y, replicate)`. Weights for a cell depend only on
//! `(seed, N, y, replicate)`, so every algorithm sees the same weight set;
//! the resampler stream additionally depends on the algorithm. Cells are
//! independent and run on a rayon pool, but records always come back in
//! canonical order, so the CSV is identical for any worker count apart
//! from the `elapsed_ns` column.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::ancestry::{ancestors_to_offspring, permute_parallel};
use crate::diagnostics::{
    ess, max_normalised_weight, resampling_mse, resampling_mse_weighted, simulate_weight_set,
    sort_weights, sup_weight, WeightSetSpec,
};
use crate::resamplers::{metropolis_num_steps, resample_ancestors, Algorithm, ResamplerConfig};
use crate::rng::RngStream;
use crate::{Error, PermutedAncestry, Precision, Real, Result, WeightVector};

pub const CSV_HEADER: [&str; 7] = ["algorithm", "N", "y", "replicate", "elapsed_ns", "mse", "extras"];
pub const RMSE_HEADER: [&str; 5] = ["algorithm", "N", "y", "rmse", "replicates"];

/// What a cell times: a resampler, or one of the two context procedures
/// (sorting the weights, computing the ESS).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchTarget {
    Resampler(Algorithm),
    Sort,
    Ess,
}

impl BenchTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchTarget::Resampler(a) => a.as_str(),
            BenchTarget::Sort => "sort",
            BenchTarget::Ess => "ess",
        }
    }

    fn tag(self) -> u64 {
        match self {
            BenchTarget::Resampler(a) => Algorithm::ALL.iter().position(|&b| b == a).unwrap() as u64 + 1,
            BenchTarget::Sort => 100,
            BenchTarget::Ess => 101,
        }
    }
}

impl fmt::Display for BenchTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sort" => Ok(BenchTarget::Sort),
            "ess" => Ok(BenchTarget::Ess),
            _ => s.parse().map(BenchTarget::Resampler),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub targets: Vec<BenchTarget>,
    pub ns: Vec<usize>,
    pub ys: Vec<f64>,
    pub replicates: usize,
    pub precision: Precision,
    pub seed: u64,
    /// Metropolis bias tolerance as a fraction of `p*`.
    pub epsilon_factor: f64,
    /// Capped rejection uses `sup_v = cap_fraction * sup w`.
    pub cap_fraction: f64,
    /// Size of the worker pool; `None` uses rayon's default.
    pub workers: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            targets: Algorithm::ALL.iter().map(|&a| BenchTarget::Resampler(a)).collect(),
            ns: (4..=20).map(|k| 1usize << k).collect(),
            ys: (0..=8).map(|k| k as f64 * 0.5).collect(),
            replicates: 500,
            precision: Precision::F32,
            seed: 0,
            epsilon_factor: 1e-2,
            cap_fraction: 0.5,
            workers: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() || self.ns.is_empty() || self.ys.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("need at least one replicate".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidParameter(format!("N must be at least 2, got {n}")));
        }
        if let Some(&y) = self.ys.iter().find(|y| !y.is_finite()) {
            return Err(Error::InvalidParameter(format!("y must be finite, got {y}")));
        }
        if !(self.epsilon_factor > 0.0 && self.epsilon_factor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon factor must lie in (0, 1), got {}",
                self.epsilon_factor
            )));
        }
        if !(self.cap_fraction > 0.0 && self.cap_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cap fraction must lie in (0, 1], got {}",
                self.cap_fraction
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("need at least one worker".into()));
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        self.targets.len() * self.ns.len() * self.ys.len() * self.replicates
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub target: BenchTarget,
    pub n: usize,
    pub y: f64,
    pub replicate: usize,
    /// `None` on error rows.
    pub elapsed_ns: Option<u64>,
    /// `None` for the context procedures and error rows.
    pub mse: Option<f64>,
    /// `key=value` pairs; error rows carry a single `error` entry.
    pub extras: Vec<(String, String)>,
}

impl BenchRecord {
    pub fn is_error(&self) -> bool {
        self.extras.iter().any(|(k, _)| k == "error")
    }

    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extras.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn error_row(target: BenchTarget, n: usize, y: f64, replicate: usize, e: &Error) -> Self {
        // keep the extras column parseable
        let msg = e.to_string().replace([';', '\n'], ",");
        Self { target, n, y, replicate, elapsed_ns: None, mse: None, extras: vec![("error".into(), msg)] }
    }
}

/// The weight set shared by every target of a cell.
pub fn cell_weight_spec(seed: u64, n: usize, y: f64, replicate: usize) -> WeightSetSpec {
    let key = RngStream::new(seed).derive(0).derive(n as u64).derive(y.to_bits()).derive(replicate as u64);
    WeightSetSpec { n, y, seed: key.seed() }
}

fn cell_stream(seed: u64, target: BenchTarget, n: usize, y: f64, replicate: usize) -> RngStream {
    RngStream::new(seed)
        .derive(target.tag())
        .derive(n as u64)
        .derive(y.to_bits())
        .derive(replicate as u64)
}

/// Resampler parameters the harness uses for a weight set of size `n`
/// simulated at `y`.
pub fn cell_resampler(algorithm: Algorithm, n: usize, y: f64, config: &BenchConfig) -> Result<ResamplerConfig> {
    let sup_w = sup_weight::<f64>();
    Ok(match algorithm {
        Algorithm::Multinomial => ResamplerConfig::Multinomial,
        Algorithm::MultinomialSerial => ResamplerConfig::MultinomialSerial,
        Algorithm::Stratified => ResamplerConfig::Stratified,
        Algorithm::Systematic => ResamplerConfig::Systematic,
        Algorithm::Metropolis => {
            let p_star = max_normalised_weight(y, n);
            let steps = metropolis_num_steps(p_star, p_star * config.epsilon_factor, n)?;
            ResamplerConfig::Metropolis { steps }
        }
        Algorithm::Rejection => ResamplerConfig::Rejection { sup_w },
        Algorithm::RejectionCapped => ResamplerConfig::RejectionCapped { sup_v: config.cap_fraction * sup_w },
    })
}

/// A cell's record together with the ancestry it delivered.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub record: BenchRecord,
    pub ancestry: Option<PermutedAncestry>,
}

pub fn run_cell(target: BenchTarget, n: usize, y: f64, replicate: usize, config: &BenchConfig) -> Result<BenchRecord> {
    run_cell_detailed(target, n, y, replicate, config).map(|c| c.record)
}

pub fn run_cell_detailed(
    target: BenchTarget,
    n: usize,
    y: f64,
    replicate: usize,
    config: &BenchConfig,
) -> Result<CellOutcome> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N must be at least 2, got {n}")));
    }
    match config.precision {
        Precision::F32 => run_cell_typed::<f32>(target, n, y, replicate, config),
        Precision::F64 => run_cell_typed::<f64>(target, n, y, replicate, config),
    }
}

fn run_cell_typed<T: Real>(
    target: BenchTarget,
    n: usize,
    y: f64,
    replicate: usize,
    config: &BenchConfig,
) -> Result<CellOutcome> {
    let w: WeightVector<T> = simulate_weight_set(&cell_weight_spec(config.seed, n, y, replicate))?;
    let mut record = BenchRecord { target, n, y, replicate, elapsed_ns: None, mse: None, extras: Vec::new() };

    let algorithm = match target {
        BenchTarget::Resampler(a) => a,
        BenchTarget::Sort => {
            std::hint::black_box(sort_weights(&w));
            let start = Instant::now();
            std::hint::black_box(sort_weights(&w));
            record.elapsed_ns = Some(start.elapsed().as_nanos() as u64);
            return Ok(CellOutcome { record, ancestry: None });
        }
        BenchTarget::Ess => {
            std::hint::black_box(ess(&w));
            let start = Instant::now();
            std::hint::black_box(ess(&w));
            record.elapsed_ns = Some(start.elapsed().as_nanos() as u64);
            return Ok(CellOutcome { record, ancestry: None });
        }
    };

    let resampler = cell_resampler(algorithm, n, y, config)?;
    let rng = cell_stream(config.seed, target, n, y, replicate);
    let deliver = || -> Result<_> {
        let r = resample_ancestors(&w, &resampler, &rng)?;
        Ok((permute_parallel(&r.ancestors), r))
    };

    // warm-up, discarded
    std::hint::black_box(deliver()?);
    let start = Instant::now();
    let (permuted, resampled) = deliver()?;
    record.elapsed_ns = Some(start.elapsed().as_nanos() as u64);
    debug_assert!(crate::ancestry::satisfies_in_place_predicate(permuted.ancestry()));

    record.mse = Some(match &resampled.weights {
        Some(v) => resampling_mse_weighted(&resampled.ancestors, v, &w)?,
        None => resampling_mse(&ancestors_to_offspring(&resampled.ancestors), &w)?,
    });
    if let ResamplerConfig::Metropolis { steps } = resampler {
        record.extras.push(("B".into(), steps.to_string()));
    }
    if let Some(trips) = resampled.proposals {
        record.extras.push(("trips".into(), (trips as f64 / n as f64).to_string()));
    }
    Ok(CellOutcome { record, ancestry: Some(permuted) })
}

/// Every cell of the grid, in canonical order. Failing cells become error
/// rows; the rest proceed.
pub fn run_grid(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.grid_size());
    for &t in &config.targets {
        for &n in &config.ns {
            for &y in &config.ys {
                for r in 0..config.replicates {
                    cells.push((t, n, y, r));
                }
            }
        }
    }
    let run = || -> Vec<BenchRecord> {
        cells
            .par_iter()
            .map(|&(t, n, y, r)| {
                run_cell(t, n, y, r, config).unwrap_or_else(|e| {
                    BenchRecord::error_row(t, n, y, r, &Error::Cell { cell: format!("{t} N={n} y={y} rep={r}"), source: Box::new(e) })
                })
            })
            .collect()
    };
    let records = match config.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(canonical_order(records))
}

fn canonical_order(mut records: Vec<BenchRecord>) -> Vec<BenchRecord> {
    records.sort_by(|a, b| {
        a.target
            .cmp(&b.target)
            .then(a.n.cmp(&b.n))
            .then(a.y.total_cmp(&b.y))
            .then(a.replicate.cmp(&b.replicate))
    });
    records
}

fn format_extras(extras: &[(String, String)]) -> String {
    extras.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn parse_extras(s: &str) -> Result<Vec<(String, String)>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Parse(format!("malformed extra {kv:?}")))
        })
        .collect()
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.target.to_string(),
            r.n.to_string(),
            r.y.to_string(),
            r.replicate.to_string(),
            r.elapsed_ns.map(|e| e.to_string()).unwrap_or_default(),
            r.mse.map(|m| m.to_string()).unwrap_or_default(),
            format_extras(&r.extras),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field<F: FromStr>(field: Option<&str>, name: &str) -> Result<F> {
    let s = field.ok_or_else(|| Error::Parse(format!("missing column {name}")))?;
    s.parse().map_err(|_| Error::Parse(format!("bad {name} value {s:?}")))
}

fn parse_optional<F: FromStr>(field: Option<&str>, name: &str) -> Result<Option<F>> {
    match field {
        Some("") => Ok(None),
        f => parse_field(f, name).map(Some),
    }
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {:?}", r.headers()?)));
    }
    r.records()
        .map(|row| {
            let row = row?;
            Ok(BenchRecord {
                target: parse_field(row.get(0), "algorithm")?,
                n: parse_field(row.get(1), "N")?,
                y: parse_field(row.get(2), "y")?,
                replicate: parse_field(row.get(3), "replicate")?,
                elapsed_ns: parse_optional(row.get(4), "elapsed_ns")?,
                mse: parse_optional(row.get(5), "mse")?,
                extras: parse_extras(row.get(6).unwrap_or(""))?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseRow {
    pub target: BenchTarget,
    pub n: usize,
    pub y: f64,
    pub rmse: f64,
    pub replicates: usize,
}

/// Square root of the mean per-replicate error, for each `(algorithm, N, y)`.
///
/// Rows without an error value (the context procedures) are skipped. A
/// resampler group in which every cell failed is an error.
pub fn aggregate_rmse(records: &[BenchRecord]) -> Result<Vec<RmseRow>> {
    if records.is_empty() {
        return Err(Error::Empty);
    }
    let mut groups: BTreeMap<(BenchTarget, usize, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        if !matches!(r.target, BenchTarget::Resampler(_)) {
            continue;
        }
        let g = groups.entry((r.target, r.n, r.y.to_bits())).or_default();
        if let Some(m) = r.mse {
            g.push(m);
        }
    }
    let mut rows = groups
        .into_iter()
        .map(|((target, n, y), mses)| {
            let y = f64::from_bits(y);
            if mses.is_empty() {
                return Err(Error::InvalidParameter(format!("no successful replicates for {target} N={n} y={y}")));
            }
            let mean = crate::primitives::stable_sum(&mses) / mses.len() as f64;
            Ok(RmseRow { target, n, y, rmse: mean.sqrt(), replicates: mses.len() })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.target.cmp(&b.target).then(a.n.cmp(&b.n)).then(a.y.total_cmp(&b.y)));
    Ok(rows)
}

pub fn write_rmse_csv<W: Write>(rows: &[RmseRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(RMSE_HEADER)?;
    for r in rows {
        w.write_record([
            r.target.to_string(),
            r.n.to_string(),
            r.y.to_string(),
            r.rmse.to_string(),
            r.replicates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_count(s: &str) -> Result<usize> {
    let bad = || Error::Parse(format!("bad particle count {s:?}"));
    match s.split_once('^') {
        Some(("2", k)) => {
            let k: u32 = k.parse().map_err(|_| bad())?;
            1usize.checked_shl(k).filter(|_| k < usize::BITS).ok_or_else(bad)
        }
        Some(_) => Err(bad()),
        None => s.parse().map_err(|_| bad()),
    }
}

/// Comma-separated particle counts. Each item is an integer, `2^k`, or an
/// inclusive power-of-two range `2^a..2^b`.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse_count(lo)?, parse_count(hi)?);
                if !lo.is_power_of_two() || !hi.is_power_of_two() || lo > hi {
                    return Err(Error::Parse(format!("range {item:?} must run between powers of two")));
                }
                let mut n = lo;
                while n <= hi {
                    out.push(n);
                    n <<= 1;
                }
            }
            None => out.push(parse_count(item)?),
        }
    }
    Ok(out)
}

/// Comma-separated observations, or an inclusive range `start:stop:step`.
pub fn parse_y_list(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::Parse(format!("bad number {t:?}")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 || stop < start {
                return Err(Error::Parse(format!("bad range {s:?}")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| start + k as f64 * step).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::Parse(format!("bad observation list {s:?}"))),
    }
}
