//! Phase-transition sweeps over `(n, ρ)` grids.
//!
//! A sweep solves `trials` independent instances per grid cell. Every trial
//! derives its own seed from `(base_seed, n, ρ-index, trial)`, so trials can
//! run in any order, on any number of threads, and be resumed from a partial
//! CSV without changing a single output byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{PcpError, Result};
use crate::parallel::{default_jobs, map_ordered};
use crate::problem::{lambda_classic, lambda_dense, ProblemInstance, SupportModel};
use crate::rng::mix_seed;
use crate::solver::{pcp_solve, relative_error, SolverConfig, DEFAULT_SUCCESS_THRESHOLD};

pub const CSV_HEADER: &str = "n,rho,r,C1,lambda,trial,seed,rel_err_L,success,iterations,converged,runtime_ms";

/// A cell counts toward the breakdown point while at least this fraction of
/// its trials succeed.
pub const BREAKDOWN_FRACTION: f64 = 0.9;

/// How each cell picks its weighting parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaMode {
    /// `lambda_dense(n, ρ, C1)`
    Dense,
    /// `1/√n`
    Classic,
    Fixed(f64),
}

impl LambdaMode {
    pub fn lambda(&self, n: usize, rho: f64, c1: f64) -> Result<f64> {
        match *self {
            LambdaMode::Dense => lambda_dense(n, rho, c1),
            LambdaMode::Classic => Ok(lambda_classic(n)),
            LambdaMode::Fixed(v) => Ok(v),
        }
    }
}

impl fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMode::Dense => f.write_str("dense"),
            LambdaMode::Classic => f.write_str("classic"),
            LambdaMode::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

impl FromStr for LambdaMode {
    type Err = PcpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dense" => Ok(LambdaMode::Dense),
            "classic" => Ok(LambdaMode::Classic),
            other => {
                let value = other
                    .strip_prefix("fixed:")
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| PcpError::param("lambda_mode", format!("expected dense, classic or fixed:<value>, got `{other}`")))?;
                if !(value > 0.0 && value.is_finite()) {
                    return Err(PcpError::param("lambda_mode", format!("fixed value must be positive, got {value}")));
                }
                Ok(LambdaMode::Fixed(value))
            }
        }
    }
}

impl Serialize for LambdaMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LambdaMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn default_n_list() -> Vec<usize> {
    vec![400, 800, 1200, 1600]
}

/// `0.05, 0.10, …, 0.95`
pub fn default_rho_grid() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub rho_grid: Vec<f64>,
    pub r: usize,
    #[serde(rename = "C1", alias = "c1")]
    pub c1: f64,
    pub lambda_mode: LambdaMode,
    pub trials: usize,
    pub base_seed: u64,
    pub support_model: SupportModel,
    pub solver: SolverConfig,
    pub success_threshold: f64,
    /// Worker threads; 0 means `PCP_JOBS` or the core count. Never affects
    /// results.
    pub parallelism: usize,
    /// Write measured wall time to `runtime_ms`; otherwise the column is 0
    /// and the CSV is reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_list: default_n_list(),
            rho_grid: default_rho_grid(),
            r: 1,
            c1: 0.8,
            lambda_mode: LambdaMode::Dense,
            trials: 10,
            base_seed: 0,
            support_model: SupportModel::default(),
            solver: SolverConfig::default(),
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            parallelism: 0,
            record_timing: false,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(PcpError::param("n_list", "must not be empty"));
        }
        if self.rho_grid.is_empty() {
            return Err(PcpError::param("rho_grid", "must not be empty"));
        }
        if self.trials == 0 {
            return Err(PcpError::param("trials", "must be at least 1"));
        }
        let distinct: BTreeSet<usize> = self.n_list.iter().copied().collect();
        if distinct.len() != self.n_list.len() {
            return Err(PcpError::param("n_list", "entries must be distinct"));
        }
        for &n in &self.n_list {
            if n == 0 || self.r > n {
                return Err(PcpError::param("n_list", format!("need 1 <= r <= n, got n = {n}, r = {}", self.r)));
            }
        }
        let mut labels = BTreeSet::new();
        for &rho in &self.rho_grid {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(PcpError::param("rho_grid", format!("values must lie in (0, 1), got {rho}")));
            }
            if !labels.insert(format_g9(rho)) {
                return Err(PcpError::param("rho_grid", format!("{rho} appears twice at 9 significant digits")));
            }
        }
        if !(self.c1 >= 0.0 && self.c1.is_finite()) {
            return Err(PcpError::param("C1", format!("must be finite and nonnegative, got {}", self.c1)));
        }
        if !(self.success_threshold > 0.0) {
            return Err(PcpError::param("success_threshold", "must be positive"));
        }
        if self.lambda_mode == LambdaMode::Dense && self.c1 == 0.0 {
            return Err(PcpError::param("C1", "dense lambda needs C1 > 0"));
        }
        self.solver.validate()
    }

    /// Number of worker threads this config asks for.
    pub fn jobs(&self) -> usize {
        if self.parallelism == 0 {
            default_jobs()
        } else {
            self.parallelism
        }
    }

    /// SHA-256 over the canonical JSON of every field that influences output
    /// (all but `parallelism`).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn canonical_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("parallelism");
        }
        value.to_string()
    }

    /// Seed of one trial.
    pub fn cell_seed(&self, n: usize, rho_index: usize, trial: usize) -> u64 {
        mix_seed(self.base_seed, &[n as u64, rho_index as u64, trial as u64])
    }

    fn rho_index_of(&self, label: &str) -> Option<usize> {
        self.rho_grid.iter().position(|&rho| format_g9(rho) == label)
    }

    fn all_cells(&self) -> Vec<CellKey> {
        let mut ns = self.n_list.clone();
        ns.sort_unstable();
        let mut keys = Vec::with_capacity(ns.len() * self.rho_grid.len() * self.trials);
        for n in ns {
            for rho_index in 0..self.rho_grid.len() {
                for trial in 0..self.trials {
                    keys.push(CellKey { n, rho_index, trial });
                }
            }
        }
        keys
    }
}

/// Position of one trial in the sweep; orders rows in every output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub n: usize,
    pub rho_index: usize,
    pub trial: usize,
}

/// One trial, exactly as written to a CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub n: usize,
    pub rho: f64,
    pub r: usize,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub lambda: f64,
    pub trial: usize,
    pub seed: u64,
    /// NaN when the cell could not be solved at all.
    pub rel_err_l: f64,
    pub success: bool,
    pub iterations: usize,
    pub converged: bool,
    pub runtime_ms: u64,
}

impl CellRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            format_g9(self.rho),
            self.r,
            format_g9(self.c1),
            format_g9(self.lambda),
            self.trial,
            self.seed,
            format_g9(self.rel_err_l),
            u8::from(self.success),
            self.iterations,
            u8::from(self.converged),
            self.runtime_ms
        )
    }

    fn from_csv_row(line: &str, line_no: usize) -> Result<Self> {
        let bad = |reason: String| PcpError::Csv { line: line_no, reason };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(bad(format!("expected 12 fields, found {}", fields.len())));
        }
        fn num<T: FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
            s.trim().parse().map_err(|_| PcpError::Csv { line, reason: format!("bad {name} `{s}`") })
        }
        let flag = |s: &str, name: &str| match s.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(bad(format!("bad {name} `{other}`"))),
        };
        Ok(CellRecord {
            n: num(fields[0], "n", line_no)?,
            rho: num(fields[1], "rho", line_no)?,
            r: num(fields[2], "r", line_no)?,
            c1: num(fields[3], "C1", line_no)?,
            lambda: num(fields[4], "lambda", line_no)?,
            trial: num(fields[5], "trial", line_no)?,
            seed: num(fields[6], "seed", line_no)?,
            rel_err_l: num(fields[7], "rel_err_L", line_no)?,
            success: flag(fields[8], "success")?,
            iterations: num(fields[9], "iterations", line_no)?,
            converged: flag(fields[10], "converged")?,
            runtime_ms: num(fields[11], "runtime_ms", line_no)?,
        })
    }
}

/// Success statistics of one `(n, ρ)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellAggregate {
    pub n: usize,
    pub rho: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    n_list: Vec<usize>,
    rho_grid: Vec<f64>,
    trials: usize,
    records: BTreeMap<CellKey, CellRecord>,
}

impl SweepResult {
    pub fn empty(cfg: &SweepConfig) -> Self {
        let mut n_list = cfg.n_list.clone();
        n_list.sort_unstable();
        Self { n_list, rho_grid: cfg.rho_grid.clone(), trials: cfg.trials, records: BTreeMap::new() }
    }

    /// Places parsed records on the config's grid. Rows that do not belong to
    /// the grid, carry the wrong seed, or repeat a cell are rejected.
    pub fn from_records(cfg: &SweepConfig, records: impl IntoIterator<Item = CellRecord>) -> Result<Self> {
        let mut out = Self::empty(cfg);
        for (row, rec) in records.into_iter().enumerate() {
            let line = row + 2;
            let bad = |reason: String| PcpError::Csv { line, reason };
            let rho_index = cfg
                .rho_index_of(&format_g9(rec.rho))
                .ok_or_else(|| bad(format!("rho {} is not on the grid", rec.rho)))?;
            if !cfg.n_list.contains(&rec.n) {
                return Err(bad(format!("n {} is not on the grid", rec.n)));
            }
            if rec.trial >= cfg.trials {
                return Err(bad(format!("trial {} out of range", rec.trial)));
            }
            let expected = cfg.cell_seed(rec.n, rho_index, rec.trial);
            if rec.seed != expected {
                return Err(bad(format!("seed {} does not match derived seed {expected}", rec.seed)));
            }
            let key = CellKey { n: rec.n, rho_index, trial: rec.trial };
            if out.records.insert(key, rec).is_some() {
                return Err(bad(format!("duplicate cell {key:?}")));
            }
        }
        Ok(out)
    }

    pub fn n_list(&self) -> &[usize] {
        &self.n_list
    }

    pub fn rho_grid(&self) -> &[f64] {
        &self.rho_grid
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in `(n, ρ-index, trial)` order.
    pub fn records(&self) -> impl Iterator<Item = &CellRecord> {
        self.records.values()
    }

    pub fn contains(&self, key: &CellKey) -> bool {
        self.records.contains_key(key)
    }

    fn insert(&mut self, key: CellKey, rec: CellRecord) {
        self.records.insert(key, rec);
    }

    pub fn missing(&self) -> Vec<CellKey> {
        let mut missing = Vec::new();
        for &n in &self.n_list {
            for rho_index in 0..self.rho_grid.len() {
                for trial in 0..self.trials {
                    let key = CellKey { n, rho_index, trial };
                    if !self.records.contains_key(&key) {
                        missing.push(key);
                    }
                }
            }
        }
        missing
    }

    pub fn is_complete(&self) -> bool {
        self.records.len() == self.n_list.len() * self.rho_grid.len() * self.trials
    }

    /// Fraction of the cell's recorded trials that succeeded; `None` if no
    /// trial of the cell has been run.
    pub fn success_fraction(&self, n: usize, rho_index: usize) -> Option<f64> {
        let (done, ok) = self.cell_counts(n, rho_index);
        (done > 0).then(|| ok as f64 / done as f64)
    }

    fn cell_counts(&self, n: usize, rho_index: usize) -> (usize, usize) {
        let lo = CellKey { n, rho_index, trial: 0 };
        let hi = CellKey { n, rho_index, trial: usize::MAX };
        self.records.range(lo..=hi).fold((0, 0), |(d, s), (_, r)| (d + 1, s + usize::from(r.success)))
    }

    pub fn aggregates(&self) -> Vec<CellAggregate> {
        let mut out = Vec::new();
        for &n in &self.n_list {
            for (rho_index, &rho) in self.rho_grid.iter().enumerate() {
                let (trials, successes) = self.cell_counts(n, rho_index);
                if trials > 0 {
                    out.push(CellAggregate { n, rho, trials, successes, success_fraction: successes as f64 / trials as f64 });
                }
            }
        }
        out
    }

    /// Largest grid ρ whose success fraction at `n` is at least 0.9.
    pub fn breakdown_rho(&self, n: usize) -> Option<f64> {
        self.rho_grid
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.success_fraction(n, i).is_some_and(|f| f >= BREAKDOWN_FRACTION))
            .map(|(_, &rho)| rho)
            .fold(None, |acc: Option<f64>, rho| Some(acc.map_or(rho, |a| a.max(rho))))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for rec in self.records.values() {
            out.push_str(&rec.to_csv_row());
            out.push('\n');
        }
        out
    }

    /// Binary greyscale PGM, one pixel per cell: columns follow the ρ grid,
    /// rows go by ascending n, 255 means every trial succeeded.
    pub fn to_pgm(&self) -> Result<Vec<u8>> {
        let mut gaps = Vec::new();
        for &n in &self.n_list {
            for (i, &rho) in self.rho_grid.iter().enumerate() {
                let (done, _) = self.cell_counts(n, i);
                if done < self.trials {
                    gaps.push(format!("(n={n}, rho={}: {done}/{} trials)", format_g9(rho), self.trials));
                }
            }
        }
        if !gaps.is_empty() {
            return Err(PcpError::IncompleteGrid(gaps.join(", ")));
        }
        let (w, h) = (self.rho_grid.len(), self.n_list.len());
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        for &n in &self.n_list {
            for i in 0..w {
                let (done, ok) = self.cell_counts(n, i);
                out.push(grey_level(ok, done));
            }
        }
        Ok(out)
    }
}

/// `round(255·successes/trials)`, halves rounded up, in exact integer
/// arithmetic.
pub fn grey_level(successes: usize, trials: usize) -> u8 {
    assert!(trials > 0 && successes <= trials);
    ((510 * successes + trials) / (2 * trials)) as u8
}

/// `printf("%.9g")`.
pub fn format_g9(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses a sweep CSV. A final line without a terminating newline is treated
/// as an interrupted write and dropped; its cell is simply run again.
pub fn parse_csv(text: &str) -> Result<Vec<CellRecord>> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    let unterminated = lines.pop().filter(|l| !l.is_empty());
    let Some(header) = lines.first().copied().or(unterminated) else {
        return Ok(Vec::new());
    };
    if header.trim_end_matches('\r') != CSV_HEADER {
        if lines.is_empty() && CSV_HEADER.starts_with(header) {
            return Ok(Vec::new());
        }
        return Err(PcpError::Csv { line: 1, reason: format!("unexpected header `{header}`") });
    }
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        out.push(CellRecord::from_csv_row(line, i + 1)?);
    }
    Ok(out)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CellRecord>> {
    parse_csv(&fs::read_to_string(path)?)
}

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), result.to_csv().as_bytes())
}

pub fn emit_heatmap(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &result.to_pgm()?)
}

/// Contents of `<csv>.json`, which ties a CSV to the config that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub config_hash: String,
    pub config: serde_json::Value,
    pub cells_done: usize,
    pub cells_total: usize,
    pub complete: bool,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut p = csv.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

pub fn emit_sidecar(cfg: &SweepConfig, result: &SweepResult, csv: &Path) -> Result<()> {
    let sidecar = Sidecar {
        config_hash: cfg.hash(),
        config: serde_json::from_str(&cfg.canonical_json())?,
        cells_done: result.len(),
        cells_total: cfg.n_list.len() * cfg.rho_grid.len() * cfg.trials,
        complete: result.is_complete(),
    };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    write_atomic(&sidecar_path(csv), text.as_bytes())
}

/// Solves one trial. Solver failures become a failed row, never an error.
pub fn run_cell(cfg: &SweepConfig, key: CellKey) -> CellRecord {
    let rho = cfg.rho_grid[key.rho_index];
    let seed = cfg.cell_seed(key.n, key.rho_index, key.trial);
    let start = Instant::now();
    let lambda = cfg.lambda_mode.lambda(key.n, rho, cfg.c1).unwrap_or(f64::NAN);
    let mut rec = CellRecord {
        n: key.n,
        rho,
        r: cfg.r,
        c1: cfg.c1,
        lambda,
        trial: key.trial,
        seed,
        rel_err_l: f64::NAN,
        success: false,
        iterations: 0,
        converged: false,
        runtime_ms: 0,
    };
    let solved = ProblemInstance::generate(key.n, cfg.r, rho, cfg.support_model, seed).and_then(|inst| {
        let res = pcp_solve(&inst.d, lambda, &cfg.solver)?;
        Ok((relative_error(&inst.l0, &res.l_hat)?, res))
    });
    if let Ok((err, res)) = solved {
        rec.rel_err_l = err;
        rec.success = err < cfg.success_threshold;
        rec.iterations = res.iterations;
        rec.converged = res.converged;
    }
    if cfg.record_timing {
        rec.runtime_ms = start.elapsed().as_millis() as u64;
    }
    rec
}

/// Outcome of a sweep that may have stopped early. `error` is set when a
/// checkpoint write failed; `result` then holds everything computed so far.
#[derive(Debug)]
pub struct SweepRun {
    pub result: SweepResult,
    pub error: Option<PcpError>,
}

impl SweepRun {
    pub fn into_result(self) -> Result<SweepResult> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.result),
        }
    }
}

/// Runs every cell missing from `existing` on `jobs` threads, handing the
/// merged result to `checkpoint` after each batch. A checkpoint error stops
/// the sweep.
pub fn execute_sweep(
    cfg: &SweepConfig,
    existing: SweepResult,
    jobs: usize,
    mut checkpoint: impl FnMut(&SweepResult) -> Result<()>,
) -> SweepRun {
    let mut result = existing;
    let todo: Vec<CellKey> = cfg.all_cells().into_iter().filter(|k| !result.contains(k)).collect();
    let batch = (4 * jobs.max(1)).max(8);
    for chunk in todo.chunks(batch) {
        let records = map_ordered(chunk, jobs, |&key| run_cell(cfg, key));
        for (&key, rec) in chunk.iter().zip(records) {
            result.insert(key, rec);
        }
        if let Err(error) = checkpoint(&result) {
            return SweepRun { result, error: Some(error) };
        }
    }
    if todo.is_empty() {
        if let Err(error) = checkpoint(&result) {
            return SweepRun { result, error: Some(error) };
        }
    }
    SweepRun { result, error: None }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    execute_sweep(cfg, SweepResult::empty(cfg), cfg.jobs(), |_| Ok(())).into_result()
}

/// Loads the records of a previous run of `cfg` from `csv`. A missing or
/// header-only CSV yields an empty result; any data rows must be vouched for
/// by a sidecar carrying the same config hash.
pub fn load_existing(cfg: &SweepConfig, csv: &Path) -> Result<SweepResult> {
    let records = match fs::read_to_string(csv) {
        Ok(text) => parse_csv(&text)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let expected = cfg.hash();
    let sidecar = sidecar_path(csv);
    match fs::read_to_string(&sidecar) {
        Ok(text) => {
            let found: Sidecar = serde_json::from_str(&text)?;
            if found.config_hash != expected {
                return Err(PcpError::ConfigMismatch { path: sidecar, expected, found: found.config_hash });
            }
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            if !records.is_empty() {
                return Err(PcpError::ConfigMismatch { path: sidecar, expected, found: "<missing>".into() });
            }
        }
        Err(e) => return Err(e.into()),
    }
    SweepResult::from_records(cfg, records)
}

pub fn resume_sweep(cfg: &SweepConfig, existing_csv: impl AsRef<Path>) -> Result<SweepResult> {
    cfg.validate()?;
    let existing = load_existing(cfg, existing_csv.as_ref())?;
    execute_sweep(cfg, existing, cfg.jobs(), |_| Ok(())).into_result()
}

/// Runs a sweep, optionally continuing the CSV at `resume_from`, with the
/// CSV at `out_csv` and its sidecar rewritten after every batch so that an
/// interrupted run leaves a resumable prefix on disk.
pub fn run_sweep_to_csv(cfg: &SweepConfig, resume_from: Option<&Path>, out_csv: Option<&Path>, jobs: usize) -> Result<SweepRun> {
    cfg.validate()?;
    let existing = match resume_from {
        Some(path) => load_existing(cfg, path)?,
        None => SweepResult::empty(cfg),
    };
    Ok(execute_sweep(cfg, existing, jobs, |partial| match out_csv {
        Some(csv) => {
            emit_csv(partial, csv)?;
            emit_sidecar(cfg, partial, csv)
        }
        None => Ok(()),
    }))
}
