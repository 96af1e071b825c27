//! Experiment configuration, orchestration, result caching and reports.
//!
//! A run expands its configuration into sweep points `(h, t)`. Each point is
//! keyed by the digest of a one-point configuration, so overlapping sweeps
//! share work through the [`Cache`].

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fields::{
    action_constants, validate_geometry, DoubleWellSpec, FieldSource, FleaSpec, Gauge, GeometryReport, ProfileKind,
    RadialFieldSpec,
};
use crate::planar::{self, Grid2D, Preconditioner, SolveConfig};
use crate::radial::{self, ConventionReport};
use crate::tunneling::{self, FleaThresholds, SplittingFit, DEFAULT_NU_GRID, GAP_FLOOR_REL};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Semiclassical parameters of the ground-state expansion check in single-well runs.
pub const GROUND_FIT_H: [f64; 3] = [0.05, 0.02, 0.01];
/// Localization threshold for the flea transition.
pub const LOCALIZED_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SingleWell,
    DoubleWellSweep,
    FleaSweep,
    Validate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SingleWell => "single_well",
            Self::DoubleWellSweep => "double_well_sweep",
            Self::FleaSweep => "flea_sweep",
            Self::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridOverrides {
    /// Planar nodes per side; odd.
    pub n: Option<usize>,
    /// Planar spacings per magnetic length when `n` is not given.
    pub points_per_length: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub preconditioner: Preconditioner,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let c = SolveConfig::default();
        Self {
            tol: c.tol,
            max_iter: c.max_iter,
            seed: c.seed,
            preconditioner: c.preconditioner,
        }
    }
}

fn default_epsilon() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub experiment: ExperimentKind,
    pub dw: DoubleWellSpec,
    pub h_list: Vec<f64>,
    #[serde(default)]
    pub t_list: Vec<f64>,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default)]
    pub solver: SolverSettings,
    /// ε of the flea thresholds.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Write eigenfunction CSVs and density maps for computed points.
    #[serde(default)]
    pub dump_eigenfunctions: bool,
    /// Output directory; not part of the cache key.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Wells of the default scenario: `b1 = 1, a = 0.45, depth 0.5`, smooth bump,
/// `L = 2.1`, flea on `[0.18, 0.315]` in the right well.
pub fn default_double_well() -> DoubleWellSpec {
    let well = RadialFieldSpec::new(1.0, 0.45, 0.5, ProfileKind::SmoothBump).expect("valid default well");
    let flea = FleaSpec::default_for(well.radius, 0.0);
    let right = well.with_flea(flea).expect("valid default flea");
    DoubleWellSpec::new(well, right, 2.1).expect("valid default pair")
}

pub const DEFAULT_H_LIST: [f64; 6] = [0.20, 0.15, 0.12, 0.10, 0.08, 0.065];
pub const DEFAULT_FLEA_H: f64 = 0.08;

impl ExperimentConfig {
    pub fn default_for(experiment: ExperimentKind) -> Self {
        let dw = default_double_well();
        let (h_list, t_list) = match experiment {
            ExperimentKind::SingleWell => (vec![0.2, 0.15, 0.1], vec![]),
            ExperimentKind::FleaSweep => {
                let th = tunneling::flea_thresholds(&dw, DEFAULT_FLEA_H, default_epsilon()).expect("default thresholds");
                (vec![DEFAULT_FLEA_H], log_spaced(th.t_low / 10.0, 10.0 * th.t_high, 10))
            }
            _ => (DEFAULT_H_LIST.to_vec(), vec![]),
        };
        Self {
            schema: SCHEMA_VERSION,
            experiment,
            dw,
            h_list,
            t_list,
            grid: GridOverrides::default(),
            solver: SolverSettings::default(),
            epsilon: default_epsilon(),
            dump_eigenfunctions: false,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        match v.get("schema").and_then(Value::as_u64) {
            Some(s) if s == SCHEMA_VERSION as u64 => {}
            other => {
                return Err(Error::Config(format!(
                    "unsupported schema {other:?}; expected \"schema\": {SCHEMA_VERSION}"
                )))
            }
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn solve_config(&self, dw: &DoubleWellSpec) -> SolveConfig {
        SolveConfig {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            seed: self.solver.seed,
            preconditioner: self.solver.preconditioner,
            min_field: dw.left.min_field().min(dw.right.min_field()),
        }
    }

    fn planar_grid(&self, source: &FieldSource, h: f64) -> Result<Grid2D> {
        let ppl = self.grid.points_per_length.unwrap_or(planar::DEFAULT_POINTS_PER_LENGTH);
        let auto = Grid2D::for_source(source, h, ppl)?;
        match self.grid.n {
            Some(n) => Grid2D::new(auto.half_width, n),
            None => Ok(auto),
        }
    }

    /// Points `(h, t)` of the sweep, in execution order.
    fn points(&self) -> Vec<(f64, f64)> {
        match self.experiment {
            ExperimentKind::FleaSweep => self
                .h_list
                .iter()
                .flat_map(|&h| self.t_list.iter().map(move |&t| (h, t)))
                .collect(),
            ExperimentKind::Validate => vec![],
            _ => {
                let t = self.dw.right.flea_amplitude();
                self.h_list.iter().map(|&h| (h, t)).collect()
            }
        }
    }

    fn point_config(&self, h: f64, t: f64) -> Self {
        Self {
            h_list: vec![h],
            t_list: vec![t],
            output: None,
            dump_eigenfunctions: false,
            ..self.clone()
        }
    }
}

/// `count` logarithmically spaced values from `lo` to `hi`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// One named pass/fail line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub experiment: ExperimentKind,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Conservative resolvability test: the prefactor-free prediction
/// `2e^{-S/h}` against `GAP_FLOOR_REL · h·b1`, where `h·b1` bounds `λ₁` from above.
pub fn predicted_gap_resolvable(s: f64, h: f64, b1: f64) -> bool {
    2.0 * (-s / h).exp() >= GAP_FLOOR_REL * h * b1
}

/// Check geometry, parameter ranges, the gap floor and grid resolution.
pub fn validate_config(cfg: &ExperimentConfig) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| checks.push(CheckResult::new(name, passed, detail));
    push(
        "schema",
        cfg.schema == SCHEMA_VERSION,
        format!("schema {} (expected {SCHEMA_VERSION})", cfg.schema),
    );
    match cfg.dw.validate() {
        Ok(()) => push("wells", true, "profiles valid".into()),
        Err(e) => push("wells", false, e.to_string()),
    }
    let h_ok = !cfg.h_list.is_empty() && cfg.h_list.iter().all(|&h| h > 0.0 && h.is_finite());
    push("h_list", h_ok, format!("{:?}", cfg.h_list));
    let t_sorted = cfg.t_list.windows(2).all(|w| w[0] <= w[1]);
    let t_ok = t_sorted && cfg.t_list.iter().all(|&t| t >= 0.0 && t.is_finite());
    push("t_list sorted ascending, t ≥ 0", t_ok, format!("{:?}", cfg.t_list));
    if cfg.experiment == ExperimentKind::FleaSweep {
        push("t_list non-empty", !cfg.t_list.is_empty(), String::new());
        push(
            "flea present",
            cfg.dw.right.flea.is_some(),
            "flea sweeps perturb the right well".into(),
        );
        push(
            "ε in (0, 1)",
            cfg.epsilon > 0.0 && cfg.epsilon < 1.0,
            format!("ε = {}", cfg.epsilon),
        );
    }
    if let Some(n) = cfg.grid.n {
        push("grid n odd and ≥ 3", n >= 3 && n % 2 == 1, format!("n = {n}"));
    }
    if cfg.dw.validate().is_err() || !h_ok {
        return ValidationReport {
            experiment: cfg.experiment,
            checks,
        };
    }
    let double = cfg.experiment != ExperimentKind::SingleWell;
    if double {
        match validate_geometry(&cfg.dw.unperturbed()) {
            Ok(report) => {
                for c in report.checks {
                    push(&c.name, c.passed, format!("margin {:.6e}", c.margin));
                }
            }
            Err(e) => push("geometry", false, e.to_string()),
        }
    }
    if matches!(cfg.experiment, ExperimentKind::DoubleWellSweep | ExperimentKind::Validate) {
        if let Ok(ac) = action_constants(&cfg.dw.unperturbed()) {
            for &h in &cfg.h_list {
                push(
                    &format!("gap resolvable at h = {h}"),
                    predicted_gap_resolvable(ac.action, h, cfg.dw.b1()),
                    format!("2e^(-S/h) = {:.3e}, floor {:.3e}", 2.0 * (-ac.action / h).exp(), GAP_FLOOR_REL * h * cfg.dw.b1()),
                );
            }
        }
    }
    let source = if double {
        FieldSource::double(&cfg.dw)
    } else {
        FieldSource::single(&cfg.dw.left, [0.0, 0.0])
    };
    if let (Ok(source), Some(n)) = (source, cfg.grid.n) {
        for &h in &cfg.h_list {
            let res = cfg.planar_grid(&source, h).and_then(|g| g.validate_for(&source, h));
            let detail = match &res {
                Ok(()) => format!("n = {n}"),
                Err(e) => e.to_string(),
            };
            push(&format!("planar grid at h = {h}"), res.is_ok(), detail);
        }
    }
    ValidationReport {
        experiment: cfg.experiment,
        checks,
    }
}

/// Canonical JSON: sorted keys, floats with 17 significant digits, no
/// whitespace, `output` removed.
pub fn canonical_json(cfg: &ExperimentConfig) -> String {
    let mut v = serde_json::to_value(cfg).expect("configuration serializes");
    if let Value::Object(m) = &mut v {
        m.remove("output");
    }
    let mut out = String::new();
    write_canonical(&v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&m[k], out);
            }
            out.push('}');
        }
    }
}

/// SHA-256 hex digest of [`canonical_json`].
pub fn cache_key(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(canonical_json(cfg).as_bytes()))
}

/// One row of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub h: f64,
    pub t: f64,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub gap: Option<f64>,
    pub mu_l: Option<f64>,
    pub mu_r: Option<f64>,
    pub w_abs: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    #[serde(rename = "S_closed")]
    pub s_closed: Option<f64>,
    #[serde(rename = "S_fit")]
    pub s_fit: Option<f64>,
    pub nu_fit: Option<f64>,
    /// Largest relative eigenpair residual of the point.
    pub residual: Option<f64>,
    pub seed: u64,
    pub grid_n: usize,
}

pub const CSV_HEADER: [&str; 17] = [
    "experiment", "h", "t", "lambda1", "lambda2", "gap", "mu_l", "mu_r", "w_abs", "p1", "p2", "S_closed", "S_fit",
    "nu_fit", "residual", "seed", "grid_n",
];

/// Point results keyed by one-point configuration digests.
///
/// Entries live in memory and, when a directory is given, as one JSON file
/// per key. All writes go through one lock.
#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    entries: Mutex<HashMap<String, ResultRow>>,
    computed: AtomicUsize,
    hits: AtomicUsize,
}

impl Cache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: Some(dir.to_path_buf()),
            ..Self::default()
        })
    }

    /// Number of points actually computed.
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::SeqCst)
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    fn get(&self, key: &str) -> Option<ResultRow> {
        if let Some(r) = self.entries.lock().unwrap().get(key) {
            return Some(r.clone());
        }
        let path = self.dir.as_ref()?.join(format!("{key}.json"));
        let row: ResultRow = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
        self.entries.lock().unwrap().insert(key.to_string(), row.clone());
        Some(row)
    }

    fn put(&self, key: &str, row: &ResultRow) -> Result<()> {
        let mut entries = self.entries.lock().unwrap();
        if let Some(dir) = &self.dir {
            fs::write(dir.join(format!("{key}.json")), serde_json::to_string(row)?)?;
        }
        entries.insert(key.to_string(), row.clone());
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSection {
    pub fit: SplittingFit,
    pub s_closed: f64,
    pub rel_error: f64,
    /// −h·log(gap/2) for every fitted sample, in h-descending order.
    pub effective_action: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSection {
    pub h: f64,
    pub epsilon: f64,
    pub thresholds: FleaThresholds,
    /// Smallest swept `t` with `max(p, 1 - p) ≥ 0.9` for `Ψ₁`.
    pub t_star: Option<f64>,
    pub bracketed: bool,
}

/// Output of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub experiment: ExperimentKind,
    pub version: String,
    pub started: u64,
    pub finished: u64,
    pub rows: Vec<ResultRow>,
    pub geometry: Option<GeometryReport>,
    pub ground_fit: Option<ConventionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSection>,
    pub thresholds: Vec<ThresholdSection>,
    pub checks: Vec<CheckResult>,
    /// Points whose solve failed; their rows carry empty values.
    pub failures: Vec<String>,
    #[serde(skip)]
    pub log: Vec<String>,
}

impl RunRecord {
    pub fn partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Validate, then compute (or fetch from `cache`) every sweep point.
pub fn run_experiment(cfg: &ExperimentConfig, cache: &Cache) -> Result<RunRecord> {
    let started = unix_now();
    let report = validate_config(cfg);
    if !report.passed() {
        let names: Vec<String> = report.failures().iter().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(Error::Geometry(format!("configuration rejected: {}", names.join("; "))));
    }
    let mut record = RunRecord {
        config_hash: cache_key(cfg),
        experiment: cfg.experiment,
        version: VERSION.to_string(),
        started,
        finished: started,
        rows: Vec::new(),
        geometry: None,
        ground_fit: None,
        fit: None,
        thresholds: Vec::new(),
        checks: report.checks,
        failures: Vec::new(),
        log: Vec::new(),
    };
    if cfg.experiment != ExperimentKind::SingleWell {
        record.geometry = Some(validate_geometry(&cfg.dw.unperturbed())?);
    }
    if cfg.experiment == ExperimentKind::Validate {
        record.finished = unix_now();
        return Ok(record);
    }
    let points = cfg.points();
    let results = run_points(cfg, &points, cache);
    for ((h, t), (row, outcome)) in points.iter().zip(results) {
        match outcome {
            Ok(cached) => record
                .log
                .push(format!("h={h} t={t:e} {} lambda1={:?}", if cached { "cached" } else { "computed" }, row.lambda1)),
            Err(e) => {
                record.log.push(format!("h={h} t={t:e} failed: {e}"));
                record.failures.push(format!("h={h} t={t:e}: {e}"));
            }
        }
        record.rows.push(row);
    }
    match cfg.experiment {
        ExperimentKind::SingleWell => {
            match radial::compare_conventions(&cfg.dw.left.without_flea(), &GROUND_FIT_H, 0.05) {
                Ok(r) => record.ground_fit = Some(r),
                Err(e) => record.failures.push(format!("ground-state fit: {e}")),
            }
        }
        ExperimentKind::DoubleWellSweep => attach_fit(cfg, &mut record)?,
        ExperimentKind::FleaSweep => attach_thresholds(cfg, &mut record),
        ExperimentKind::Validate => {}
    }
    record.finished = unix_now();
    Ok(record)
}

fn attach_fit(cfg: &ExperimentConfig, record: &mut RunRecord) -> Result<()> {
    let s_closed = action_constants(&cfg.dw.unperturbed())?.action;
    let mut samples: Vec<(f64, f64)> = record
        .rows
        .iter()
        .filter_map(|r| match (r.gap, r.lambda1) {
            (Some(g), Some(l)) if tunneling::resolvable(g, l) => Some((r.h, g)),
            _ => None,
        })
        .collect();
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    if samples.len() < 4 {
        record.log.push(format!("only {} resolvable gaps; no fit", samples.len()));
        return Ok(());
    }
    match tunneling::fit_splitting(&samples, &DEFAULT_NU_GRID) {
        Ok(fit) => {
            for r in record.rows.iter_mut() {
                r.s_fit = Some(fit.s_fit);
                r.nu_fit = Some(fit.nu_fit);
            }
            record.fit = Some(FitSection {
                rel_error: (fit.s_fit - s_closed).abs() / s_closed,
                effective_action: samples.iter().map(|&(h, g)| (h, -h * (0.5 * g).ln())).collect(),
                fit,
                s_closed,
            });
        }
        Err(e) => record.failures.push(format!("splitting fit: {e}")),
    }
    Ok(())
}

fn attach_thresholds(cfg: &ExperimentConfig, record: &mut RunRecord) {
    for &h in &cfg.h_list {
        let th = match tunneling::flea_thresholds(&cfg.dw, h, cfg.epsilon) {
            Ok(th) => th,
            Err(e) => {
                record.failures.push(format!("thresholds at h={h}: {e}"));
                continue;
            }
        };
        let t_star = record
            .rows
            .iter()
            .filter(|r| r.h == h)
            .find(|r| r.p1.is_some_and(|p| p.max(1.0 - p) >= LOCALIZED_FRACTION))
            .map(|r| r.t);
        record.thresholds.push(ThresholdSection {
            h,
            epsilon: cfg.epsilon,
            bracketed: t_star.is_some_and(|t| th.t_low <= t && t <= th.t_high),
            thresholds: th,
            t_star,
        });
    }
}

/// Evaluate points on a small worker pool; results come back in input order
/// with a flag telling whether each came from the cache.
fn run_points(cfg: &ExperimentConfig, points: &[(f64, f64)], cache: &Cache) -> Vec<(ResultRow, Result<bool>)> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(points.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<(ResultRow, Result<bool>)>>> = points.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= points.len() {
                    break;
                }
                let (h, t) = points[i];
                *slots[i].lock().unwrap() = Some(run_point_cached(cfg, h, t, cache));
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}

fn run_point_cached(cfg: &ExperimentConfig, h: f64, t: f64, cache: &Cache) -> (ResultRow, Result<bool>) {
    let key = cache_key(&cfg.point_config(h, t));
    if let Some(row) = cache.get(&key) {
        cache.hits.fetch_add(1, Ordering::SeqCst);
        return (row, Ok(true));
    }
    cache.computed.fetch_add(1, Ordering::SeqCst);
    match compute_point(cfg, h, t) {
        Ok(row) => {
            let stored = cache.put(&key, &row).map(|_| false);
            (row, stored)
        }
        Err(e) => (empty_row(cfg, h, t), Err(e)),
    }
}

fn empty_row(cfg: &ExperimentConfig, h: f64, t: f64) -> ResultRow {
    ResultRow {
        experiment: cfg.experiment.name().to_string(),
        h,
        t,
        lambda1: None,
        lambda2: None,
        gap: None,
        mu_l: None,
        mu_r: None,
        w_abs: None,
        p1: None,
        p2: None,
        s_closed: None,
        s_fit: None,
        nu_fit: None,
        residual: None,
        seed: cfg.solver.seed,
        grid_n: 0,
    }
}

fn compute_point(cfg: &ExperimentConfig, h: f64, t: f64) -> Result<ResultRow> {
    let mut row = empty_row(cfg, h, t);
    if cfg.experiment == ExperimentKind::SingleWell {
        let well = cfg.dw.left.without_flea();
        let source = FieldSource::single(&well, [0.0, 0.0])?;
        let grid = cfg.planar_grid(&source, h)?;
        let op = planar::assemble_link_operator(&source, Gauge::LandauSeam, grid, h)?;
        let pairs = planar::lowest_eigenpairs(&op, 2, &cfg.solve_config(&cfg.dw))?;
        row.lambda1 = Some(pairs[0].lambda);
        row.lambda2 = Some(pairs[1].lambda);
        row.mu_l = Some(radial::ground_state(&well, h)?.mu_extrapolated);
        row.residual = Some(pairs.iter().map(|p| p.residual).fold(0.0, f64::max));
        row.grid_n = grid.n;
        maybe_dump(cfg, h, t, &grid, &pairs)?;
        maybe_dump_radial(cfg, h, &well)?;
        return Ok(row);
    }
    let dw = cfg.dw.with_right_flea_amplitude(t);
    let source = FieldSource::double(&dw)?;
    let grid = cfg.planar_grid(&source, h)?;
    let op = planar::assemble_link_operator(&source, Gauge::LandauSeam, grid, h)?;
    let pairs = planar::lowest_eigenpairs(&op, 2, &cfg.solve_config(&dw))?;
    let gap = pairs[1].lambda - pairs[0].lambda;
    let mu_l = radial::ground_state(&dw.left, h)?.mu_extrapolated;
    let right_base = dw.right.without_flea();
    let shift = if dw.right.flea_amplitude() != 0.0 {
        radial::perturbation_gap(&dw.right, h)?.exact
    } else {
        0.0
    };
    let mu_r = radial::ground_state(&right_base, h)?.mu_extrapolated + shift;
    row.lambda1 = Some(pairs[0].lambda);
    row.lambda2 = Some(pairs[1].lambda);
    row.gap = Some(gap);
    row.mu_l = Some(mu_l);
    row.mu_r = Some(mu_r);
    row.w_abs = tunneling::hopping_from_gap(gap, mu_l - mu_r).ok();
    row.p1 = Some(planar::localization_fraction(&pairs[0].psi, &grid));
    row.p2 = Some(planar::localization_fraction(&pairs[1].psi, &grid));
    row.s_closed = Some(action_constants(&dw.unperturbed())?.action);
    row.residual = Some(pairs.iter().map(|p| p.residual).fold(0.0, f64::max));
    row.grid_n = grid.n;
    maybe_dump(cfg, h, t, &grid, &pairs)?;
    Ok(row)
}

fn maybe_dump(cfg: &ExperimentConfig, h: f64, t: f64, grid: &Grid2D, pairs: &[planar::Eigenpair2D]) -> Result<()> {
    let (true, Some(out)) = (cfg.dump_eigenfunctions, &cfg.output) else {
        return Ok(());
    };
    let dir = out.join("fields");
    fs::create_dir_all(&dir)?;
    for (j, p) in pairs.iter().enumerate() {
        let stem = format!("{}_h{h}_t{t:e}_psi{}", cfg.experiment.name(), j + 1);
        planar::write_eigenfunction_csv(&dir.join(format!("{stem}.csv")), grid, &p.psi)?;
        planar::write_density_map(&dir.join(format!("{stem}.dat")), grid, &p.psi)?;
    }
    Ok(())
}

fn maybe_dump_radial(cfg: &ExperimentConfig, h: f64, well: &RadialFieldSpec) -> Result<()> {
    let (true, Some(out)) = (cfg.dump_eigenfunctions, &cfg.output) else {
        return Ok(());
    };
    let dir = out.join("fields");
    fs::create_dir_all(&dir)?;
    let g = radial::ground_state(well, h)?;
    write_radial_csv(&dir.join(format!("radial_h{h}_m0.csv")), &g)
}

/// Two-column CSV `(r, ψ)` of a radial eigenfunction.
pub fn write_radial_csv(path: &Path, pair: &radial::RadialEigenpair) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["r", "psi"])?;
    for (r, p) in pair.nodes.iter().zip(&pair.psi) {
        w.write_record(&[format!("{r:.17e}"), format!("{p:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Files written by [`emit_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub log: PathBuf,
}

#[derive(Serialize)]
struct Summary<'a> {
    version: &'a str,
    records: &'a [RunRecord],
}

/// Write `results.csv` (rows sorted by h descending), `summary.json` and `run.log`.
pub fn emit_report(records: &[RunRecord], out: &Path) -> Result<ReportPaths> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("emit_report needs at least one record".into()));
    }
    fs::create_dir_all(out)?;
    let paths = ReportPaths {
        csv: out.join("results.csv"),
        summary: out.join("summary.json"),
        log: out.join("run.log"),
    };
    let mut rows: Vec<&ResultRow> = records.iter().flat_map(|r| &r.rows).collect();
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));
    let mut w = csv::Writer::from_path(&paths.csv)?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    fs::write(
        &paths.summary,
        serde_json::to_string_pretty(&Summary {
            version: VERSION,
            records,
        })?,
    )?;
    let mut log = std::io::BufWriter::new(fs::File::create(&paths.log)?);
    for r in records {
        writeln!(
            log,
            "[{}] {} config {} started {} finished {}",
            r.version,
            r.experiment.name(),
            r.config_hash,
            r.started,
            r.finished
        )?;
        for line in &r.log {
            writeln!(log, "  {line}")?;
        }
        for f in &r.failures {
            writeln!(log, "  FAILED {f}")?;
        }
    }
    log.flush()?;
    Ok(paths)
}

/// Whether an error stems from the inputs (exit code 2) rather than a solver (exit code 3).
pub fn is_validation_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::Geometry(_)
            | Error::Resolution { .. }
            | Error::Config(_)
            | Error::Domain(_)
            | Error::DegenerateWell(_)
            | Error::Json(_)
    )
}
