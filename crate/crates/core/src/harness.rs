//! Monte Carlo sweeps over code family, connectivity, bias, error rate and
//! distance; threshold estimation from curve crossings; CSV/JSON output.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{build_memory_circuit, Basis};
use crate::decoder::CircuitDecoder;
use crate::error::{Error, Result};
use crate::layout::{build_layout, Family, Structure};
use crate::noise::{apply_noise, BiasedNoise, Eta, IdleMode};
use crate::sim::sample_blocks;
use crate::stats::{combine_rates, RateEstimate};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resamples used for threshold confidence intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// One row of a sweep. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub family: Family,
    pub structure: Structure,
    pub eta: Eta,
    pub p: f64,
    pub d: usize,
    pub shots: usize,
    pub fail1: usize,
    pub fail2: usize,
    pub e1: f64,
    pub e2: f64,
    pub e_total: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Shots given to the L1 and L2 experiments of a point.
pub fn split_shots(shots: usize) -> (usize, usize) {
    (shots - shots / 2, shots / 2)
}

impl RatePoint {
    /// Fill in the rates and the interval from failure counts. The interval
    /// on `e_total` combines the Wilson bounds of both bases.
    pub fn from_counts(
        family: Family,
        structure: Structure,
        eta: Eta,
        p: f64,
        d: usize,
        shots: usize,
        fail1: usize,
        fail2: usize,
    ) -> Self {
        let (n1, n2) = split_shots(shots);
        let r1 = RateEstimate::new(fail1, n1);
        let r2 = RateEstimate::new(fail2, n2);
        RatePoint {
            family,
            structure,
            eta,
            p,
            d,
            shots,
            fail1,
            fail2,
            e1: r1.rate,
            e2: r2.rate,
            e_total: combine_rates(r1.rate, r2.rate),
            ci_low: combine_rates(r1.ci_low, r2.ci_low),
            ci_high: combine_rates(r1.ci_high, r2.ci_high),
        }
    }
}

/// Everything that determines one sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSpec {
    pub family: Family,
    pub structure: Structure,
    pub eta: Eta,
    pub p: f64,
    pub d: usize,
    pub shots: usize,
    pub seed: u64,
    pub idle: IdleMode,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a master seed with labels into an independent seed.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(splitmix(master), |acc, &l| splitmix(acc ^ splitmix(l)))
}

fn eta_label(eta: Eta) -> u64 {
    match eta {
        Eta::Finite(e) => e.to_bits(),
        Eta::Infinite => u64::MAX,
    }
}

impl PointSpec {
    fn basis_seed(&self, basis: Basis) -> u64 {
        derive_seed(
            self.seed,
            &[
                self.family as u64,
                self.structure as u64,
                eta_label(self.eta),
                self.p.to_bits(),
                self.d as u64,
                basis.index() as u64,
            ],
        )
    }
}

/// Count decoding failures of one memory experiment.
fn count_failures(spec: &PointSpec, basis: Basis, shots: usize) -> Result<usize> {
    if shots == 0 {
        return Ok(0);
    }
    let layout = build_layout(spec.family, spec.structure, spec.d)?;
    let noise = BiasedNoise::new(spec.p, spec.eta)?.with_idle(spec.idle);
    let circuit = apply_noise(&build_memory_circuit(&layout, spec.d, basis)?, &noise);
    let decoder = CircuitDecoder::from_circuit(&circuit)?;
    let per_block = sample_blocks(&circuit, shots, spec.basis_seed(basis), |_, batch| -> Result<usize> {
        let mut fails = 0;
        for r in 0..batch.shots {
            let predicted = decoder.decode(&batch.detectors.row_ones(r))?;
            if (predicted & 1 == 1) != batch.observables.get(r, 0) {
                fails += 1;
            }
        }
        Ok(fails)
    })?;
    per_block.into_iter().sum()
}

/// Run both memory experiments of a point (`d` rounds each, shots split
/// evenly) and combine their logical error rates.
pub fn run_point_spec(spec: &PointSpec) -> Result<RatePoint> {
    if spec.shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let (n1, n2) = split_shots(spec.shots);
    let fail1 = count_failures(spec, Basis::L1, n1)?;
    let fail2 = count_failures(spec, Basis::L2, n2)?;
    Ok(RatePoint::from_counts(spec.family, spec.structure, spec.eta, spec.p, spec.d, spec.shots, fail1, fail2))
}

pub fn run_point(
    family: Family,
    structure: Structure,
    eta: Eta,
    p: f64,
    d: usize,
    shots: usize,
    seed: u64,
) -> Result<RatePoint> {
    run_point_spec(&PointSpec { family, structure, eta, p, d, shots, seed, idle: IdleMode::default() })
}

// ---------------------------------------------------------------------------
// sweeps

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub structures: Vec<Structure>,
    pub etas: Vec<Eta>,
    pub ps: Vec<f64>,
    pub ds: Vec<usize>,
    pub shots: usize,
    pub seed: u64,
    /// `None` uses every available core.
    pub workers: Option<usize>,
    #[serde(default)]
    pub idle: IdleMode,
}

impl SweepConfig {
    /// d in {3, 5, 7}, 2e5 shots per point, p from 0.10% to 0.40% in steps
    /// of 0.05% (heavy-hex) or 0.40% to 1.00% in steps of 0.10% (lattice).
    pub fn desk(structure: Structure, etas: Vec<Eta>) -> Self {
        let (start, step) = match structure {
            Structure::HeavyHex => (0.0010, 0.0005),
            Structure::Lattice => (0.0040, 0.0010),
        };
        SweepConfig {
            families: Family::ALL.to_vec(),
            structures: vec![structure],
            etas,
            ps: (0..7).map(|i| round_grid(start + step * i as f64)).collect(),
            ds: vec![3, 5, 7],
            shots: 200_000,
            seed: 42,
            workers: None,
            idle: IdleMode::default(),
        }
    }

    /// Distances up to 11, 1.2e6 shots per point and the full bias grid.
    pub fn full(structure: Structure) -> Self {
        SweepConfig {
            etas: [0.5, 1.0, 10.0, 100.0, 1000.0].into_iter().map(Eta::Finite).chain([Eta::Infinite]).collect(),
            ds: vec![3, 5, 7, 9, 11],
            shots: 1_200_000,
            ..SweepConfig::desk(structure, Vec::new())
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| Err(Error::InvalidArgument(format!("empty {name} list")));
        if self.families.is_empty() {
            return empty("code family");
        }
        if self.structures.is_empty() {
            return empty("structure");
        }
        if self.etas.is_empty() {
            return empty("bias");
        }
        if self.ps.is_empty() {
            return empty("error rate");
        }
        if self.ds.is_empty() {
            return empty("distance");
        }
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("worker count must be at least 1".into()));
        }
        for &d in &self.ds {
            if d < 3 || d % 2 == 0 {
                return Err(Error::InvalidDistance(d));
            }
        }
        for &p in &self.ps {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("error rate {p} outside [0, 1)")));
            }
        }
        for &eta in &self.etas {
            if !eta.is_valid() {
                return Err(Error::InvalidArgument(format!("invalid bias {eta}")));
            }
        }
        Ok(())
    }

    /// All points in output order: family, structure, bias, distance, p.
    pub fn points(&self) -> Vec<PointSpec> {
        let mut out = Vec::new();
        for &family in &self.families {
            for &structure in &self.structures {
                for &eta in &self.etas {
                    for &d in &self.ds {
                        for &p in &self.ps {
                            out.push(PointSpec { family, structure, eta, p, d, shots: self.shots, seed: self.seed, idle: self.idle });
                        }
                    }
                }
            }
        }
        out
    }
}

fn round_grid(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Parse `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad grid {s:?}: expected start:stop:step or a comma list"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(num).collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..n).map(|i| round_grid(start + step * i as f64)).collect());
    }
    let v: Vec<f64> = s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}

/// Run every point of a sweep on a pool of `config.workers` threads.
/// `progress` is called as points complete; the result is in
/// [`SweepConfig::points`] order regardless of scheduling.
pub fn run_sweep(config: &SweepConfig, progress: impl Fn(&RatePoint) + Sync) -> Result<Vec<RatePoint>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let specs = config.points();
    pool.install(|| {
        specs
            .par_iter()
            .map(|s| {
                let r = run_point_spec(s)?;
                progress(&r);
                Ok(r)
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// thresholds

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdStatus {
    Ok,
    OutOfRange,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub d_small: usize,
    pub d_large: usize,
    pub crossing: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub family: Family,
    pub structure: Structure,
    pub eta: Eta,
    pub p_th: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub status: ThresholdStatus,
    pub pairs: Vec<PairCrossing>,
    pub bootstrap: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub diagnostic: String,
}

/// `(p, E_total)` curves per distance, sorted, with zero rates replaced by
/// half a count so that logarithms stay finite.
fn curves(points: &[RatePoint], totals: &[f64]) -> Vec<(usize, Vec<(f64, f64)>)> {
    let mut ds: Vec<usize> = points.iter().map(|r| r.d).collect();
    ds.sort_unstable();
    ds.dedup();
    ds.into_iter()
        .map(|d| {
            let mut c: Vec<(f64, f64)> = points
                .iter()
                .zip(totals)
                .filter(|(r, _)| r.d == d)
                .map(|(r, &e)| (r.p, if e > 0.0 { e } else { 0.5 / r.shots.max(1) as f64 }))
                .collect();
            c.sort_by(|a, b| a.0.total_cmp(&b.0));
            (d, c)
        })
        .collect()
}

enum Crossing {
    At(f64),
    None,
    Identical,
}

/// First point where the larger code stops beating the smaller one, by
/// linear interpolation of `ln E_large - ln E_small` in `p`.
fn crossing(small: &[(f64, f64)], large: &[(f64, f64)]) -> Crossing {
    let diff: Vec<(f64, f64)> = small
        .iter()
        .filter_map(|&(p, es)| large.iter().find(|&&(q, _)| q == p).map(|&(_, el)| (p, el.ln() - es.ln())))
        .collect();
    if diff.is_empty() {
        return Crossing::None;
    }
    if diff.iter().all(|&(_, f)| f == 0.0) {
        return Crossing::Identical;
    }
    for w in diff.windows(2) {
        let ((p0, f0), (p1, f1)) = (w[0], w[1]);
        if (f0 < 0.0 && f1 >= 0.0) || (f0 == 0.0 && f1 > 0.0) {
            return Crossing::At(p0 + (p1 - p0) * (-f0) / (f1 - f0));
        }
    }
    Crossing::None
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos - pos.floor());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Pairwise crossings of adjacent distances and their median.
fn pairwise(points: &[RatePoint], totals: &[f64]) -> (Vec<PairCrossing>, bool, Option<f64>) {
    let cs = curves(points, totals);
    let mut pairs = Vec::new();
    let mut all_identical = true;
    let mut found = Vec::new();
    for w in cs.windows(2) {
        let c = match crossing(&w[0].1, &w[1].1) {
            Crossing::At(p) => {
                all_identical = false;
                found.push(p);
                Some(p)
            }
            Crossing::None => {
                all_identical = false;
                None
            }
            Crossing::Identical => None,
        };
        pairs.push(PairCrossing { d_small: w[0].0, d_large: w[1].0, crossing: c });
    }
    (pairs, all_identical, median(&mut found))
}

/// Estimate the threshold of one (family, structure, bias) curve family.
/// Needs at least two distances with three error rates each.
pub fn estimate_threshold(points: &[RatePoint], bootstrap: usize, seed: u64) -> Result<ThresholdEstimate> {
    let first = points.first().ok_or_else(|| Error::InvalidArgument("no rate points".into()))?;
    if points.iter().any(|r| r.family != first.family || r.structure != first.structure || r.eta != first.eta) {
        return Err(Error::InvalidArgument("points mix families, structures or biases".into()));
    }
    let totals: Vec<f64> = points.iter().map(|r| r.e_total).collect();
    let cs = curves(points, &totals);
    if cs.len() < 2 {
        return Err(Error::InvalidArgument("need at least two distances".into()));
    }
    if let Some((d, c)) = cs.iter().find(|(_, c)| c.len() < 3) {
        return Err(Error::InvalidArgument(format!("distance {d} has {} error rates; need at least 3", c.len())));
    }
    let p_min = points.iter().map(|r| r.p).fold(f64::INFINITY, f64::min);
    let p_max = points.iter().map(|r| r.p).fold(f64::NEG_INFINITY, f64::max);

    let (pairs, identical, p_th) = pairwise(points, &totals);
    let mut est = ThresholdEstimate {
        family: first.family,
        structure: first.structure,
        eta: first.eta,
        p_th,
        ci_low: None,
        ci_high: None,
        status: ThresholdStatus::Ok,
        pairs,
        bootstrap: 0,
        p_min,
        p_max,
        diagnostic: String::new(),
    };
    if identical {
        est.status = ThresholdStatus::Degenerate;
        est.p_th = None;
        est.diagnostic = "curves coincide for every distance; every grid point is a crossing".into();
        return Ok(est);
    }
    if p_th.is_none() {
        est.status = ThresholdStatus::OutOfRange;
        let (d0, small) = &cs[0];
        let (d1, large) = &cs[cs.len() - 1];
        let better = small.iter().zip(large).filter(|(a, b)| b.1 < a.1).count();
        est.diagnostic = if better * 2 >= small.len() {
            format!("d={d1} beats d={d0} across [{p_min}, {p_max}]; threshold lies above the swept range")
        } else {
            format!("d={d1} loses to d={d0} across [{p_min}, {p_max}]; threshold lies below the swept range")
        };
        return Ok(est);
    }
    let missing = est.pairs.iter().filter(|c| c.crossing.is_none()).count();
    if missing > 0 {
        est.diagnostic = format!("{missing} distance pair(s) without a bracketed crossing");
    }

    // resample every point's shot outcomes and redo the estimate
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(bootstrap);
    for _ in 0..bootstrap {
        let mut resampled = Vec::with_capacity(points.len());
        for r in points {
            let (n1, n2) = split_shots(r.shots);
            let draw = |rng: &mut ChaCha8Rng, n: usize, e: f64| -> Result<f64> {
                if n == 0 {
                    return Ok(0.0);
                }
                let b = Binomial::new(n as u64, e.clamp(0.0, 1.0))
                    .map_err(|e| Error::InvalidArgument(format!("bootstrap: {e}")))?;
                Ok(b.sample(rng) as f64 / n as f64)
            };
            let e1 = draw(&mut rng, n1, r.e1)?;
            let e2 = draw(&mut rng, n2, r.e2)?;
            resampled.push(combine_rates(e1, e2));
        }
        if let (_, _, Some(p)) = pairwise(points, &resampled) {
            samples.push(p);
        }
    }
    est.bootstrap = bootstrap;
    if !samples.is_empty() {
        samples.sort_by(f64::total_cmp);
        est.ci_low = Some(quantile(&samples, 0.025));
        est.ci_high = Some(quantile(&samples, 0.975));
    }
    if samples.len() * 2 < bootstrap {
        let note = format!("only {} of {bootstrap} resamples produced a crossing", samples.len());
        est.diagnostic = if est.diagnostic.is_empty() { note } else { format!("{}; {note}", est.diagnostic) };
    }
    Ok(est)
}

/// Split points by (family, structure, bias), in order of first
/// appearance, and estimate each threshold. Each group's bootstrap seed is
/// derived from `seed` and the group.
pub fn estimate_thresholds(points: &[RatePoint], bootstrap: usize, seed: u64) -> Result<Vec<ThresholdEstimate>> {
    let mut groups: Vec<Vec<RatePoint>> = Vec::new();
    for r in points {
        match groups
            .iter_mut()
            .find(|g| g[0].family == r.family && g[0].structure == r.structure && g[0].eta == r.eta)
        {
            Some(g) => g.push(r.clone()),
            None => groups.push(vec![r.clone()]),
        }
    }
    groups
        .iter()
        .map(|g| {
            let s = derive_seed(seed, &[g[0].family as u64, g[0].structure as u64, eta_label(g[0].eta)]);
            estimate_threshold(g, bootstrap, s)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// output

pub const POINT_COLUMNS: [&str; 13] =
    ["family", "structure", "eta", "p", "d", "shots", "fail1", "fail2", "e1", "e2", "e_total", "ci_low", "ci_high"];

pub fn write_points_csv(path: &Path, points: &[RatePoint]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(POINT_COLUMNS)?;
    for r in points {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_csv(path: &Path) -> Result<Vec<RatePoint>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != POINT_COLUMNS {
        return Err(Error::Parse { line: 1, msg: format!("expected columns {}", POINT_COLUMNS.join(",")) });
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Serialize)]
struct ThresholdRow<'a> {
    family: Family,
    structure: Structure,
    eta: Eta,
    p_th: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    status: ThresholdStatus,
    pairs: String,
    bootstrap: usize,
    diagnostic: &'a str,
}

pub fn write_thresholds_csv(path: &Path, estimates: &[ThresholdEstimate]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for e in estimates {
        let pairs = e
            .pairs
            .iter()
            .map(|c| match c.crossing {
                Some(p) => format!("{}-{}:{p}", c.d_small, c.d_large),
                None => format!("{}-{}:none", c.d_small, c.d_large),
            })
            .collect::<Vec<_>>()
            .join(" ");
        w.serialize(ThresholdRow {
            family: e.family,
            structure: e.structure,
            eta: e.eta,
            p_th: e.p_th,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            status: e.status,
            pairs,
            bootstrap: e.bootstrap,
            diagnostic: &e.diagnostic,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// JSON mirror of a sweep with the settings needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub seed: u64,
    pub config: Option<SweepConfig>,
    pub points: Vec<RatePoint>,
    pub thresholds: Vec<ThresholdEstimate>,
}

impl SweepReport {
    pub fn new(config: Option<SweepConfig>, seed: u64, points: Vec<RatePoint>, thresholds: Vec<ThresholdEstimate>) -> Self {
        SweepReport { version: VERSION.to_string(), seed, config, points, thresholds }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.0010:0.0040:0.0005").unwrap(), vec![0.001, 0.0015, 0.002, 0.0025, 0.003, 0.0035, 0.004]);
        assert_eq!(parse_grid("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_grid("0.1:0.2").is_err());
        assert!(parse_grid("0.2:0.1:0.01").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn presets() {
        let desk = SweepConfig::desk(Structure::HeavyHex, vec![Eta::DEPOLARIZING]);
        desk.validate().unwrap();
        assert_eq!(desk.ps.len(), 7);
        assert_eq!(desk.points().len(), 3 * 3 * 7);
        let full = SweepConfig::full(Structure::Lattice);
        assert_eq!(full.ds, vec![3, 5, 7, 9, 11]);
        assert_eq!(full.etas.len(), 6);
        assert!(full.shots >= 1_200_000);
    }

    #[test]
    fn crossing_interpolates_log_difference() {
        let small = [(1.0, 0.1), (2.0, 0.2), (3.0, 0.3)];
        let large = [(1.0, 0.05), (2.0, 0.2 * 1.5), (3.0, 0.6)];
        // ln(1.5) > 0 at p = 2, ln(0.5) < 0 at p = 1
        let (f0, f1) = (0.5f64.ln(), 1.5f64.ln());
        match crossing(&small, &large) {
            Crossing::At(p) => assert!((p - (1.0 - f0 / (f1 - f0))).abs() < 1e-12),
            _ => panic!("expected a crossing"),
        }
    }

    #[test]
    fn seeds_differ_by_label() {
        assert_ne!(derive_seed(1, &[0]), derive_seed(1, &[1]));
        assert_ne!(derive_seed(1, &[0]), derive_seed(2, &[0]));
        assert_eq!(derive_seed(7, &[3, 4]), derive_seed(7, &[3, 4]));
    }
}
