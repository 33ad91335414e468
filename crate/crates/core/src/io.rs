//! Run configuration text, CSV series, metrics and metadata files.
//!
//! The config is flat TOML. Metrics and metadata are flat `key = value`
//! lines. Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::experiment::{Approach, ComparisonMetrics, ObservableSeries, RunConfig, RunMetadata, TargetField};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("config: {0}")]
    Parse(String),
    #[error(transparent)]
    Invalid(#[from] crate::error::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("series is empty")]
    EmptySeries,
}

/// Paths of the three files written for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputBundle {
    pub series_csv: PathBuf,
    pub metrics: PathBuf,
    pub metadata: PathBuf,
}

impl OutputBundle {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            series_csv: dir.join("series.csv"),
            metrics: dir.join("metrics.txt"),
            metadata: dir.join("metadata.txt"),
        }
    }
}

/// Parses flat TOML; absent keys take the headline defaults.
pub fn parse_config(source: &str) -> Result<RunConfig, IoError> {
    let config: RunConfig = toml::from_str(source).map_err(|e| IoError::Parse(e.message().to_string() + &location(source, &e)))?;
    config.validate()?;
    Ok(config)
}

fn location(source: &str, e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => {
            let line = source[..span.start].lines().count().max(1);
            let text = source.lines().nth(line - 1).unwrap_or("").trim();
            format!(" (line {line}: `{text}`)")
        }
        None => String::new(),
    }
}

pub fn render_config(config: &RunConfig) -> String {
    toml::to_string(config).expect("flat config always serializes")
}

pub fn read_config(path: &Path) -> Result<RunConfig, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text)
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn sigma_label(sigma: f64) -> String {
    format!("{sigma}")
}

pub fn series_header(series: &ObservableSeries) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "x_cl", "p_cl", "F_cl"].iter().map(|s| s.to_string()).collect();
    for q in &series.quantum {
        let s = sigma_label(q.sigma);
        for name in ["mean_x", "mean_p", "mean_F", "spread", "norm", "energy"] {
            cols.push(format!("{name}_{s}"));
        }
    }
    cols
}

pub fn render_series(series: &ObservableSeries) -> Result<String, IoError> {
    if series.times.is_empty() {
        return Err(IoError::EmptySeries);
    }
    let mut out = series_header(series).join(",");
    out.push('\n');
    let cl = &series.classical;
    for (i, t) in series.times.iter().enumerate() {
        let mut row = vec![fmt_f64(*t), fmt_f64(cl.x[i]), fmt_f64(cl.p[i]), fmt_f64(cl.force[i])];
        for q in &series.quantum {
            let o = &q.samples[i];
            row.extend(
                [o.mean_x, o.mean_p, o.mean_force, o.spread, o.norm, o.mean_energy]
                    .into_iter()
                    .map(fmt_f64),
            );
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_series(series: &ObservableSeries, path: &Path) -> Result<(), IoError> {
    write(path, &render_series(series)?)
}

fn approach_fields(a: &Approach) -> (String, String) {
    match a {
        Approach::Reached { time, distance } => (fmt_f64(*distance), fmt_f64(*time)),
        Approach::NotReached => ("not_reached".into(), "not_reached".into()),
    }
}

pub fn render_metrics(m: &ComparisonMetrics) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    let (d, t) = approach_fields(&m.classical);
    kv("closest_approach_classical", d);
    kv("turning_time_classical", t);
    kv(
        "closest_approach_classical_oracle",
        m.classical_oracle.map(fmt_f64).unwrap_or_else(|| "none".into()),
    );
    for s in &m.per_sigma {
        let l = sigma_label(s.sigma);
        let (d, t) = approach_fields(&s.approach);
        kv(&format!("closest_approach_quantum_{l}"), d);
        kv(&format!("turning_time_quantum_{l}"), t);
        kv(
            &format!("force_crossover_time_{l}"),
            s.jensen.crossover_time.map(fmt_f64).unwrap_or_else(|| "none".into()),
        );
        kv(&format!("jensen_t0_satisfied_{l}"), s.jensen.t0_satisfied.to_string());
        kv(&format!("force_t0_quantum_{l}"), fmt_f64(s.jensen.quantum_force_t0));
        kv(&format!("max_lag_{l}"), fmt_f64(s.max_lag));
    }
    kv("force_t0_classical", fmt_f64(m.per_sigma.first().map_or(0.0, |s| s.jensen.classical_force_t0)));
    kv(
        "quantum_farther_than_classical",
        m.quantum_stays_farther().map_or("not_reached".into(), |b| b.to_string()),
    );
    out
}

pub fn write_metrics(m: &ComparisonMetrics, path: &Path) -> Result<(), IoError> {
    write(path, &render_metrics(m))
}

pub fn render_metadata(config: &RunConfig, meta: &RunMetadata) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("program", env!("CARGO_PKG_NAME").into());
    kv("version", env!("CARGO_PKG_VERSION").into());
    let field = match meta.field {
        TargetField::Coulomb => "coulomb".to_string(),
        TargetField::Free => "free".to_string(),
        TargetField::Harmonic { k_h } => format!("harmonic(k_h={})", fmt_f64(k_h)),
    };
    kv("field", field);
    kv("x0", fmt_f64(config.x0));
    kv("p0", fmt_f64(config.p0));
    kv(
        "sigma_list",
        config.sigma_list.iter().map(|s| fmt_f64(*s)).collect::<Vec<_>>().join(","),
    );
    kv("z1", config.z1.to_string());
    kv("z2", config.z2.to_string());
    kv("mass", fmt_f64(config.mass));
    kv("hbar_c", fmt_f64(meta.units.hbar_c));
    kv("alpha_fs", fmt_f64(meta.units.alpha_fs));
    kv("coupling_k", fmt_f64(meta.coupling_k));
    kv("grid_x_min", fmt_f64(meta.grid.x_min()));
    kv("grid_x_max", fmt_f64(meta.grid.x_max()));
    kv("grid_n_points", meta.grid.n_points().to_string());
    kv("grid_dx", fmt_f64(meta.grid.dx()));
    kv("grid_shift", fmt_f64(meta.grid.shift()));
    kv("softening_cut", fmt_f64(meta.softening_cut));
    kv("dt", fmt_f64(config.dt));
    kv("t_max", fmt_f64(config.t_max));
    kv("sample_every", config.sample_every.to_string());
    kv("steps", config.total_steps().to_string());
    kv("classical_energy", fmt_f64(meta.classical_energy));
    kv("reference_energy", fmt_f64(meta.reference_energy));
    kv("boundary", "dirichlet".into());
    out
}

pub fn write_metadata(config: &RunConfig, meta: &RunMetadata, path: &Path) -> Result<(), IoError> {
    write(path, &render_metadata(config, meta))
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_owned(),
        source,
    })
}
