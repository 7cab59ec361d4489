//! Parameter sweeps: configuration, deterministic grid execution, result CSV,
//! run manifest and per-panel plot data.
//!
//! A run directory holds `results.csv`, `manifest.json`, optionally
//! `samples/point-<index>.csv`, and `plotdata/` once plot data is emitted.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{lrt_cumulant, wn_moments, LrtParams};
use crate::error::{Error, Result};
use crate::lattice::{graph_diameter, heavy_hex_fragment, Graph, LAYOUT_SIZES};
use crate::oracle::{exact_trotter_unitary, ConditionalMoments, TransitionTable, MAX_TABLE_QUBITS};
use crate::protocol::DriveParams;
use crate::rng::derive_seed;
use crate::sim::{load_samples, parity_filter, run_tpm_capped, save_samples, NoiseSpec, TpmSample};
use crate::sqt::{ext_sqt_estimate_with, sqt_from_samples, ExtSqtOptions, DEFAULT_DELTA, DEFAULT_MAX_SUBSPACE};
use crate::workstats::{raw_estimators, tur_check, EstimatorTag, WorkStatistics};

pub const DEFAULT_SHOTS: usize = 20_000;
pub const MIN_BETA: f64 = 1e-3;
pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Scan,
    Coupling,
    Size,
    Custom,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Scan => "scan",
            Family::Coupling => "coupling",
            Family::Size => "size",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "scan" => Ok(Family::Scan),
            "coupling" => Ok(Family::Coupling),
            "size" => Ok(Family::Size),
            "custom" => Ok(Family::Custom),
            other => Err(Error::Config(format!(
                "unknown family '{other}' (expected scan, coupling, size or custom)"
            ))),
        }
    }
}

/// Contents of a TOML config file; every key is optional and missing keys
/// fall back to the family defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: Option<Family>,
    pub graph_file: Option<PathBuf>,
    pub tau: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub n_trotter: Option<Vec<usize>>,
    pub trotter_from_diameter: Option<bool>,
    pub n_spin: Option<Vec<usize>>,
    pub shots: Option<usize>,
    pub noise: Option<NoiseSpec>,
    pub estimators: Option<Vec<EstimatorTag>>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub max_statevector_qubits: Option<usize>,
    pub max_subspace: Option<usize>,
    pub samples_in: Option<PathBuf>,
    pub dump_samples: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Command-line overrides applied on top of a [`ConfigFile`].
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub family: Option<Family>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub out: Option<PathBuf>,
    pub samples_in: Option<PathBuf>,
    pub estimators: Option<Vec<EstimatorTag>>,
    pub delta: Option<f64>,
    pub max_statevector_qubits: Option<usize>,
}

/// Fully resolved sweep description.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub graph_file: Option<PathBuf>,
    pub tau: Vec<f64>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub n_trotter: Vec<usize>,
    pub trotter_from_diameter: bool,
    pub n_spin: Vec<usize>,
    pub shots: usize,
    pub noise: NoiseSpec,
    pub estimators: Vec<EstimatorTag>,
    /// Whether `estimators` was given explicitly rather than defaulted.
    #[serde(skip)]
    pub estimators_explicit: bool,
    pub delta: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub max_statevector_qubits: usize,
    pub max_subspace: usize,
    pub samples_in: Option<PathBuf>,
    pub dump_samples: bool,
}

fn default_betas() -> Vec<f64> {
    vec![10.0, 5.0, 2.0, 1.0, 0.5, 0.2, 0.1]
}

impl ExperimentConfig {
    /// Defaults of `family`, with an empty grid for anything the family does
    /// not fix.
    pub fn defaults(family: Family) -> Self {
        let base = ExperimentConfig {
            family,
            graph_file: None,
            tau: Vec::new(),
            gamma: Vec::new(),
            beta: Vec::new(),
            n_trotter: Vec::new(),
            trotter_from_diameter: false,
            n_spin: Vec::new(),
            shots: DEFAULT_SHOTS,
            noise: NoiseSpec::default(),
            estimators: EstimatorTag::ALL.to_vec(),
            estimators_explicit: false,
            delta: DEFAULT_DELTA,
            seed: 0,
            out: PathBuf::from("out"),
            max_statevector_qubits: crate::sim::DEFAULT_MAX_STATEVECTOR_QUBITS,
            max_subspace: DEFAULT_MAX_SUBSPACE,
            samples_in: None,
            dump_samples: false,
        };
        match family {
            Family::Scan => ExperimentConfig {
                tau: (1..=40).map(|k| k as f64 / 10.0).collect(),
                gamma: vec![1.0],
                beta: default_betas(),
                n_trotter: vec![10],
                n_spin: vec![5, 10, 15, 19, 22, 27],
                ..base
            },
            Family::Coupling => ExperimentConfig {
                tau: vec![1.0],
                gamma: (1..=12).map(|k| k as f64 / 2.0).collect(),
                beta: default_betas(),
                n_trotter: (1..=8).collect(),
                n_spin: vec![15],
                ..base
            },
            Family::Size => ExperimentConfig {
                tau: vec![1.0],
                gamma: vec![1.0],
                beta: default_betas(),
                trotter_from_diameter: true,
                n_spin: LAYOUT_SIZES.to_vec(),
                ..base
            },
            Family::Custom => base,
        }
    }

    /// Resolves a config file plus overrides; validates the result.
    pub fn resolve(file: ConfigFile, ov: Overrides) -> Result<Self> {
        let family = ov.family.or(file.family).unwrap_or(Family::Scan);
        let mut c = Self::defaults(family);
        let explicit_trotter = file.n_trotter.is_some() && file.trotter_from_diameter.is_none();
        let explicit_n_spin = file.n_spin.is_some();
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = file.$field {
                    c.$field = v;
                }
            };
        }
        take!(tau);
        take!(gamma);
        take!(beta);
        take!(n_trotter);
        take!(trotter_from_diameter);
        take!(n_spin);
        take!(shots);
        take!(noise);
        take!(delta);
        take!(seed);
        take!(out);
        take!(max_statevector_qubits);
        take!(max_subspace);
        take!(dump_samples);
        c.graph_file = file.graph_file;
        c.samples_in = file.samples_in;
        if explicit_trotter {
            c.trotter_from_diameter = false;
        }
        if let Some(e) = file.estimators {
            c.estimators = e;
            c.estimators_explicit = true;
        }

        if let Some(v) = ov.seed {
            c.seed = v;
        }
        if let Some(v) = ov.shots {
            c.shots = v;
        }
        if let Some(v) = ov.out {
            c.out = v;
        }
        if let Some(v) = ov.samples_in {
            c.samples_in = Some(v);
        }
        if let Some(v) = ov.estimators {
            c.estimators = v;
            c.estimators_explicit = true;
        }
        if let Some(v) = ov.delta {
            c.delta = v;
        }
        if let Some(v) = ov.max_statevector_qubits {
            c.max_statevector_qubits = v;
        }
        if let Some(path) = &c.graph_file {
            let g = load_graph(path)?;
            if !explicit_n_spin {
                c.n_spin = vec![g.n_vertices()];
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, empty) in [
            ("tau", self.tau.is_empty()),
            ("gamma", self.gamma.is_empty()),
            ("beta", self.beta.is_empty()),
            ("n_spin", self.n_spin.is_empty()),
            ("estimators", self.estimators.is_empty()),
            ("n_trotter", self.n_trotter.is_empty() && !self.trotter_from_diameter),
        ] {
            if empty {
                return bad(format!("grid '{name}' must not be empty"));
            }
        }
        if let Some(b) = self.beta.iter().find(|&&b| !(b >= MIN_BETA) || !b.is_finite()) {
            return bad(format!("beta values must be >= {MIN_BETA}, got {b}"));
        }
        if let Some(t) = self.tau.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
            return bad(format!("tau values must be > 0, got {t}"));
        }
        if self.gamma.iter().any(|g| !g.is_finite()) {
            return bad("gamma values must be finite".into());
        }
        if self.n_trotter.contains(&0) {
            return bad("n_trotter values must be >= 1".into());
        }
        if let Some(n) = self.n_spin.iter().find(|&&n| !(2..=LAYOUT_SIZES[LAYOUT_SIZES.len() - 1]).contains(&n)) {
            if self.graph_file.is_none() {
                return bad(format!("n_spin values must lie in 2..=130, got {n}"));
            }
        }
        if self.shots == 0 {
            return bad("shots must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.delta) {
            return bad(format!("delta must lie in [0, 1), got {}", self.delta));
        }
        self.noise.validate().map_err(|e| Error::Config(e.to_string()))?;
        if let Some(path) = &self.graph_file {
            let g = load_graph(path)?;
            if self.n_spin != [g.n_vertices()] {
                return bad(format!(
                    "graph file has {} vertices but n_spin is {:?}",
                    g.n_vertices(),
                    self.n_spin
                ));
            }
        }
        if self.samples_in.is_some() && self.n_points() != 1 {
            return bad(format!(
                "samples_in needs a single grid point, the config has {}",
                self.n_points()
            ));
        }
        if self.estimators_explicit && self.estimators.contains(&EstimatorTag::Exact) {
            if let Some(&n) = self.n_spin.iter().max().filter(|&&n| n > MAX_TABLE_QUBITS) {
                return Err(Error::SizeLimit {
                    what: "exact oracle qubits",
                    actual: n,
                    limit: MAX_TABLE_QUBITS,
                });
            }
        }
        Ok(())
    }

    /// Number of grid points (`n_trotter` counted once when taken from the diameter).
    pub fn n_points(&self) -> usize {
        let nt = if self.trotter_from_diameter { 1 } else { self.n_trotter.len() };
        self.n_spin.len() * nt * self.gamma.len() * self.tau.len() * self.beta.len()
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read graph {}: {e}", path.display())))?;
    Graph::from_json(&text)
}

/// One output row: one grid point and one estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n_spin: usize,
    pub n_edges: usize,
    pub beta: f64,
    pub tau: f64,
    pub gamma: f64,
    #[serde(rename = "n_T")]
    pub n_trotter: usize,
    pub estimator_tag: EstimatorTag,
    #[serde(rename = "mean_W")]
    pub mean_w: f64,
    #[serde(rename = "var_W")]
    pub var_w: f64,
    pub sigma: f64,
    pub tur_bound: f64,
    pub tur_satisfied: bool,
    pub n_samples: usize,
    pub n_kept: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub gibbs_mass: Option<f64>,
    pub seed: u64,
    pub tur_slack: f64,
}

struct Group {
    graph: Graph,
    n_trotter: usize,
    gamma: f64,
    tau: f64,
    first_index: usize,
}

fn groups(cfg: &ExperimentConfig) -> Result<Vec<Group>> {
    let mut out = Vec::new();
    let mut index = 0;
    let file_graph = cfg.graph_file.as_deref().map(load_graph).transpose()?;
    for &n in &cfg.n_spin {
        let graph = match &file_graph {
            Some(g) => g.clone(),
            None => heavy_hex_fragment(n)?,
        };
        let nts = if cfg.trotter_from_diameter {
            vec![graph_diameter(&graph)?.max(1)]
        } else {
            cfg.n_trotter.clone()
        };
        for &n_trotter in &nts {
            for &gamma in &cfg.gamma {
                for &tau in &cfg.tau {
                    out.push(Group {
                        graph: graph.clone(),
                        n_trotter,
                        gamma,
                        tau,
                        first_index: index,
                    });
                    index += cfg.beta.len();
                }
            }
        }
    }
    Ok(out)
}

/// Executes the sweep and returns rows in grid order, plus notices about
/// skipped estimators.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Vec<String>)> {
    cfg.validate()?;
    let loaded = match &cfg.samples_in {
        Some(path) => Some(load_samples(path)?),
        None => None,
    };
    let groups = groups(cfg)?;
    let per_group: Vec<(Vec<ResultRow>, Vec<String>)> = groups
        .par_iter()
        .map(|g| run_group(cfg, g, loaded.as_deref()))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut notices = Vec::new();
    for (r, n) in per_group {
        rows.extend(r);
        notices.extend(n);
    }
    Ok((rows, notices))
}

fn run_group(cfg: &ExperimentConfig, grp: &Group, loaded: Option<&[TpmSample]>) -> Result<(Vec<ResultRow>, Vec<String>)> {
    let g = &grp.graph;
    let n = g.n_vertices();
    let mut notices = Vec::new();
    let wants = |t: EstimatorTag| cfg.estimators.contains(&t);
    let p0 = DriveParams::new(cfg.beta[0], grp.tau, grp.gamma, grp.n_trotter)?;

    let exact: Option<ConditionalMoments> = if wants(EstimatorTag::Exact) && n <= MAX_TABLE_QUBITS {
        Some(TransitionTable::from_unitary(&exact_trotter_unitary(g, &p0)?)?.conditional_moments())
    } else {
        None
    };
    let needs_samples = [EstimatorTag::Raw, EstimatorTag::Sqt, EstimatorTag::ExtSqt]
        .iter()
        .any(|&t| wants(t));

    let mut rows = Vec::new();
    for (j, &beta) in cfg.beta.iter().enumerate() {
        let index = grp.first_index + j;
        let seed = derive_seed(cfg.seed, index as u64);
        let p = DriveParams { beta, ..p0 };
        let label = format!("point {index} (n={n}, beta={beta}, tau={}, gamma={}, n_T={})", p.tau, p.gamma, p.n_trotter);

        let samples: Option<Vec<TpmSample>> = match loaded {
            Some(s) => {
                if s.first().is_some_and(|f| f.x.len() != n) {
                    return Err(Error::Config(format!(
                        "loaded samples have {} bits but the grid point has {n} spins",
                        s[0].x.len()
                    )));
                }
                Some(s.to_vec())
            }
            None if needs_samples && n <= cfg.max_statevector_qubits => {
                let noise = (!cfg.noise.is_noiseless()).then_some(&cfg.noise);
                Some(run_tpm_capped(g, &p, cfg.shots, noise, seed, cfg.max_statevector_qubits)?)
            }
            None => {
                if needs_samples {
                    notices.push(format!(
                        "{label}: {n} spins exceed the statevector cap {}; sample-based estimators skipped",
                        cfg.max_statevector_qubits
                    ));
                }
                None
            }
        };
        if let (Some(s), true, None) = (&samples, cfg.dump_samples, loaded) {
            let dir = cfg.out.join("samples");
            fs::create_dir_all(&dir)?;
            save_samples(&dir.join(format!("point-{index}.csv")), s)?;
        }
        let filtered = samples.as_ref().map(|s| parity_filter(s));

        for &tag in &cfg.estimators {
            let base = |stats: WorkStatistics, m: Option<usize>, mass: Option<f64>| -> Result<ResultRow> {
                let tur = tur_check(&stats, beta)?;
                Ok(ResultRow {
                    n_spin: n,
                    n_edges: g.n_edges(),
                    beta,
                    tau: p.tau,
                    gamma: p.gamma,
                    n_trotter: p.n_trotter,
                    estimator_tag: tag,
                    mean_w: stats.mean,
                    var_w: stats.variance,
                    sigma: tur.sigma,
                    tur_bound: tur.bound,
                    tur_satisfied: tur.satisfied,
                    n_samples: samples.as_ref().map_or(0, |s| s.len()),
                    n_kept: filtered.as_ref().map(|(k, _)| k.len()),
                    m,
                    gibbs_mass: mass,
                    seed,
                    tur_slack: tur.slack,
                })
            };
            let row = match tag {
                EstimatorTag::Raw | EstimatorTag::Sqt | EstimatorTag::ExtSqt => {
                    let Some((kept, _)) = &filtered else { continue };
                    if kept.len() < 2 {
                        notices.push(format!("{label}: fewer than 2 samples survive parity filtering; {tag} skipped"));
                        continue;
                    }
                    match tag {
                        EstimatorTag::Raw => base(raw_estimators(kept)?, None, None)?,
                        EstimatorTag::Sqt => {
                            let est = sqt_from_samples(g, kept, &p, cfg.max_subspace)?;
                            base(est.stats, Some(est.subspace_dim), Some(est.gibbs_mass_captured))?
                        }
                        _ => {
                            let opts = ExtSqtOptions {
                                delta: cfg.delta,
                                max_dim: cfg.max_subspace,
                            };
                            let est = ext_sqt_estimate_with(g, kept, &p, opts)?;
                            base(est.stats, Some(est.subspace_dim), Some(est.gibbs_mass_captured))?
                        }
                    }
                }
                EstimatorTag::Exact => match &exact {
                    Some(table) => base(table.moments(beta), None, None)?,
                    None => {
                        notices.push(format!(
                            "{label}: exact oracle limited to {MAX_TABLE_QUBITS} spins; skipped"
                        ));
                        continue;
                    }
                },
                EstimatorTag::Lrt => {
                    let lp = LrtParams::new(beta, p.gamma, p.tau, g.n_edges())?;
                    let stats = WorkStatistics::new(lrt_cumulant(1, &lp)?, lrt_cumulant(2, &lp)?, 0, EstimatorTag::Lrt);
                    base(stats, None, None)?
                }
                EstimatorTag::Wn => {
                    let (m, v) = wn_moments(n, beta)?;
                    base(WorkStatistics::new(m, v, 0, EstimatorTag::Wn), None, None)?
                }
            };
            rows.push(row);
        }
    }
    Ok((rows, notices))
}

#[derive(Serialize)]
struct Manifest<'a> {
    package: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    grid_points: usize,
    rows: usize,
    notices: &'a [String],
    started_unix_seconds: u64,
    wall_seconds: f64,
}

/// Runs the sweep and writes `results.csv` and `manifest.json` under `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    fs::create_dir_all(&cfg.out)?;
    info!("running {} grid points of family {}", cfg.n_points(), cfg.family);
    let (rows, notices) = execute(cfg)?;
    for n in &notices {
        info!("{n}");
    }
    write_results(&cfg.out.join(RESULTS_FILE), &rows)?;
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        grid_points: cfg.n_points(),
        rows: rows.len(),
        notices: &notices,
        started_unix_seconds: started,
        wall_seconds: clock.elapsed().as_secs_f64(),
    };
    fs::write(cfg.out.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(rows)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize().enumerate() {
        out.push(row.map_err(|e: csv::Error| Error::Parse {
            path: path.display().to_string(),
            line: i + 2,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

type Panel = (String, &'static [&'static str], fn(&ResultRow) -> Vec<f64>);

fn swept(family: Family) -> (&'static str, fn(&ResultRow) -> f64) {
    match family {
        Family::Coupling => ("gamma", |r| r.gamma),
        Family::Size => ("n_spin", |r| r.n_spin as f64),
        Family::Scan | Family::Custom => ("tau", |r| r.tau),
    }
}

/// Writes the mean, variance and TUR-parametric panels of `family` into
/// `dir`; returns the files written. Panels with no rows are skipped.
pub fn emit_plotdata(rows: &[ResultRow], family: Family, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let (name, key) = swept(family);
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    // series = everything except the swept parameter
    let series = |r: &ResultRow| {
        let mut k = [r.n_spin as f64, r.n_trotter as f64, r.gamma, r.tau, -r.beta];
        match family {
            Family::Coupling => k[2] = 0.0,
            Family::Size => {
                k[0] = 0.0;
                k[1] = 0.0;
            }
            Family::Scan | Family::Custom => k[3] = 0.0,
        }
        k
    };
    sorted.sort_by(|a, b| {
        a.estimator_tag
            .as_str()
            .cmp(b.estimator_tag.as_str())
            .then(series(a).partial_cmp(&series(b)).unwrap_or(std::cmp::Ordering::Equal))
            .then(key(a).total_cmp(&key(b)))
    });

    let head = ["estimator_tag", "n_spin", "n_T", "gamma", "tau", "beta"];
    let panels: [Panel; 3] = [
        (format!("mean_vs_{name}.csv"), &["mean_W"], |r| vec![r.mean_w]),
        (format!("var_vs_{name}.csv"), &["var_W"], |r| vec![r.var_w]),
        ("tur_parametric.csv".into(), &["tur_bound", "var_W"], |r| vec![r.tur_bound, r.var_w]),
    ];
    let mut written = Vec::new();
    for (file, cols, values) in panels {
        if sorted.is_empty() {
            warn!("no rows for {file}; skipped");
            continue;
        }
        let path = dir.join(&file);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(head.iter().chain(cols.iter()))?;
        for r in &sorted {
            let mut rec = vec![
                r.estimator_tag.to_string(),
                r.n_spin.to_string(),
                r.n_trotter.to_string(),
                r.gamma.to_string(),
                r.tau.to_string(),
                r.beta.to_string(),
            ];
            rec.extend(values(r).iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Plot data restricted to `estimators`; skips with a warning when nothing
/// matches.
pub fn emit_plotdata_for(
    rows: &[ResultRow],
    family: Family,
    dir: &Path,
    estimators: &[EstimatorTag],
) -> Result<Vec<PathBuf>> {
    let subset: Vec<ResultRow> = rows
        .iter()
        .filter(|r| estimators.contains(&r.estimator_tag))
        .cloned()
        .collect();
    if subset.is_empty() {
        warn!("no rows for estimators {estimators:?}; no plot data written");
        return Ok(Vec::new());
    }
    emit_plotdata(&subset, family, dir)
}

/// Row counts per estimator, for summaries.
pub fn count_by_estimator(rows: &[ResultRow]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry(r.estimator_tag.as_str()).or_insert(0) += 1;
    }
    m
}
