//! Experiment runner: config ingestion, suite orchestration and report files.
//!
//! A run reads one TOML config, executes the selected suites in catalog
//! order and writes `report.toml` plus one CSV table per scan into the
//! output directory.

pub mod config;
pub mod report;
pub mod suites;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::ExperimentConfig;
pub use report::{format_f64, Cell, SuiteOutcome, Summary, Table};

use crate::error::{Error, Result};

/// Catalog entry of a suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// `(key, meaning)` for every parameter.
    pub params: &'static [(&'static str, &'static str)],
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "semigroup",
        summary: "Representation residuals, then semigroup, normalization, symmetry, positivity and \
                  conjugation behaviour of the heat kernels of Δ and L.",
        params: &[
            ("t, s", "times of the semigroup identity μ_t * μ_s = μ_{t+s}"),
            ("points", "random sample points"),
            ("seed", "seed of the sample points"),
            ("rep_cutoff", "Casimir cutoff of the representation checks"),
            ("rep_tol", "tolerance of the representation residuals"),
            ("centrality_samples", "random (g, x) pairs for μ_t(gxg⁻¹) vs μ_t(x)"),
        ],
    },
    SuiteInfo {
        name: "ck_star",
        summary: "t·M_L(t) on a logarithmic grid towards t = 0, with an optional weighted circle product.",
        params: &[
            ("operator", "\"l\" (default) or \"delta\""),
            ("t_max, t_min, points", "logarithmic time grid"),
            ("final_max", "bound on t·M(t) at t_min"),
            ("product.base, product.d", "weights w_i = base^i, d factors kept exactly"),
            ("product.tail_max", "bound on the analytic majorant of the discarded factors"),
        ],
    },
    SuiteInfo {
        name: "off_diagonal",
        summary: "e^{A·M_L(αt)} t^{-σ} M^N_{Δ,L}(K, μ_t) along t ↓ 0 for K away from the identity.",
        params: &[
            ("tuples", "list of {n, sigma, a, alpha}: derivative order N, power σ, exponent A, time factor α"),
            ("t_max, t_min, points", "logarithmic time grid ending at T = t_max"),
            ("k_points, min_distance, seed", "K: seeded random points at distance ≥ min_distance from e"),
            ("endpoint_ratio", "bound on the t_min value relative to the scan maximum"),
        ],
    },
    SuiteInfo {
        name: "decomposition",
        summary: "Blockwise and spatial residuals of the splitting μ_t = ν_t * μ_{αt} and its L-analogue.",
        params: &[
            ("k", "derivative orders; ε = 1/(2k+1), α = ε/(2C), β = c/4"),
            ("t", "times"),
            ("points, seed", "random points of the spatial cross-check"),
        ],
    },
    SuiteInfo {
        name: "minkowski",
        summary: "‖u * v‖_{l²} ≤ ‖u‖_{l²} * ‖v‖_{l²} on random trigonometric vector fields, and equality \
                  for single nonnegative components.",
        params: &[
            ("pairs", "random (u, v) pairs"),
            ("components", "components of u and of v"),
            ("cutoff", "Casimir cutoff of the random polynomials"),
            ("points, seed", "evaluation points and seed"),
        ],
    },
    SuiteInfo {
        name: "norm_equivalence",
        summary: "Ratios |D^k_Y f| / |D^k_X f| and of the mixed chain forms for random basis changes \
                  Y = T·X against [c^k, C^k].",
        params: &[
            ("count, perturbation, seed", "T = I + perturbation·G with G standard normal"),
            ("k_max", "largest derivative order"),
            ("form_order", "budget N of the chain forms (0 skips them)"),
            ("battery, battery_cutoff", "random test functions and their Casimir cutoff"),
            ("points", "evaluation points"),
        ],
    },
    SuiteInfo {
        name: "mollify",
        summary: "Space-time mollification on a single circle: refinement stability of a smoothed rough \
                  input, τ-derivative scans on an interior and a control region, and convergence of the \
                  two-parameter family.",
        params: &[
            ("step_cutoff", "Casimir cutoff of the band-limited step datum"),
            ("tau, refinement_dt, refinement_window, refinement_max", "refinement study of M^{2,1}_Δ"),
            ("points", "spatial sample points"),
            ("scan_dt, scan_interval, eta_inner, eta_outer", "lattice, interval of U and the cutoff η"),
            ("interior, control, region_times", "time windows of the two τ-scans"),
            ("path, datum_decay", "(α, τ) path and the smooth datum's coefficient decay"),
            ("diagnostic_interval, diagnostic_eta_inner, diagnostic_eta_outer", "setup of the convergence diagnostic"),
            ("distance_max", "bound on the final sup-distance"),
        ],
    },
];

pub fn suite_info(name: &str) -> Result<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name).ok_or_else(|| {
        let names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
        Error::Argument(format!("unknown suite `{name}`; valid suites: {}", names.join(", ")))
    })
}

/// Parameter documentation and defaults of one suite.
pub fn describe(name: &str) -> Result<String> {
    let info = suite_info(name)?;
    let mut out = format!("{}\n\n{}\n\nparameters:\n", info.name, info.summary);
    for (k, v) in info.params {
        out.push_str(&format!("  {k}: {v}\n"));
    }
    let defaults = config::suite_defaults();
    let text = toml::to_string(&defaults[name]).unwrap_or_default();
    out.push_str(&format!("\ndefaults ([suites.{name}]):\n{text}"));
    Ok(out)
}

/// Process exit status of an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Truncation { .. } | Error::NotComparable { .. } | Error::Cost(_) | Error::Resolution { .. } => 3,
        _ => 2,
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub pass: bool,
    pub report: PathBuf,
    pub tables: Vec<PathBuf>,
    pub suites: Vec<(&'static str, bool)>,
}

/// Runs every selected suite of the config at `path` with `threads` workers
/// (0: all cores). Outputs go to `output.dir`, relative to the config file.
pub fn run(path: &Path, threads: usize) -> Result<RunOutcome> {
    let cfg = ExperimentConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let dir = base.join(&cfg.output.dir);
    run_config(&cfg, &dir, threads)
}

pub fn run_config(cfg: &ExperimentConfig, dir: &Path, threads: usize) -> Result<RunOutcome> {
    let started = Instant::now();
    let ops = cfg.operators()?;
    std::fs::create_dir_all(dir)?;
    let mut tables = Vec::new();
    let mut suites = Vec::new();
    let mut results = toml::Table::new();
    for name in cfg.selected() {
        let t0 = Instant::now();
        let s = &cfg.suites;
        let outcome = crate::exec::with_threads(threads, || match name {
            "semigroup" => suites::semigroup(cfg, &ops, s.semigroup.as_ref().expect("selected")),
            "ck_star" => suites::ck_star(cfg, &ops, s.ck_star.as_ref().expect("selected")),
            "off_diagonal" => suites::off_diagonal(cfg, &ops, s.off_diagonal.as_ref().expect("selected")),
            "decomposition" => suites::decomposition(cfg, &ops, s.decomposition.as_ref().expect("selected")),
            "minkowski" => suites::minkowski(cfg, &ops, s.minkowski.as_ref().expect("selected")),
            "norm_equivalence" => suites::norm_equivalence(cfg, &ops, s.norm_equivalence.as_ref().expect("selected")),
            "mollify" => suites::mollify(cfg, &ops, s.mollify.as_ref().expect("selected")),
            other => unreachable!("catalog has no suite {other}"),
        })??;
        let mut entry = outcome.summary.0;
        entry.insert("pass".into(), toml::Value::Boolean(outcome.pass));
        entry.insert("wall_clock_seconds".into(), toml::Value::Float(t0.elapsed().as_secs_f64()));
        let mut files = Vec::new();
        for t in &outcome.tables {
            let p = t.write(dir)?;
            files.push(toml::Value::String(format!("{}.csv", t.name)));
            tables.push(p);
        }
        entry.insert("tables".into(), toml::Value::Array(files));
        results.insert(name.into(), toml::Value::Table(entry));
        suites.push((name, outcome.pass));
    }
    let pass = suites.iter().all(|(_, p)| *p);
    let mut engine = toml::Table::new();
    engine.insert("name".into(), env!("CARGO_PKG_NAME").into());
    engine.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    engine.insert("threads".into(), toml::Value::Integer(threads as i64));
    let mut run = toml::Table::new();
    run.insert("pass".into(), toml::Value::Boolean(pass));
    run.insert("wall_clock_seconds".into(), toml::Value::Float(started.elapsed().as_secs_f64()));
    let mut doc = toml::Table::new();
    doc.insert("engine".into(), toml::Value::Table(engine));
    doc.insert("run".into(), toml::Value::Table(run));
    doc.insert(
        "config".into(),
        toml::Value::try_from(cfg).map_err(|e| Error::Io(format!("config echo: {e}")))?,
    );
    doc.insert("suites".into(), toml::Value::Table(results));
    let text = toml::to_string(&doc).map_err(|e| Error::Io(format!("report: {e}")))?;
    let report = dir.join("report.toml");
    std::fs::write(&report, text)?;
    Ok(RunOutcome {
        pass,
        report,
        tables,
        suites,
    })
}
