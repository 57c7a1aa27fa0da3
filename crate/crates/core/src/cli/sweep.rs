use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use super::config::{Format, Observable, OutputSpec, SweepConfig};
use crate::error::{Error, Result};
use crate::liouville::{fidelity, ness, purity_deficit, reduced_fidelity, spectrum};
use crate::models::TargetedModel;
use crate::zeno::{block_decompose_with_criterion, gamma_ch, CriterionReport, GammaChReport, CRITERION_TOL};

/// Worker count for sweeps.
pub const WORKERS_ENV: &str = "ZENO_WORKERS";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Empty,
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    /// 17 significant digits for numbers; empty for missing values.
    pub fn to_field(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Empty | Cell::Num(_) => s.serialize_none(),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// Sweep output: one row per `(axis value, Γ)`, axis-major then Γ ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        Some(self.column(name)?.into_iter().map(Cell::as_f64).collect())
    }

    /// Rows whose NESS was not unique.
    pub fn non_unique_count(&self) -> usize {
        self.column("ness_unique")
            .map_or(0, |c| c.iter().filter(|x| ***x == Cell::Bool(false)).count())
    }

    pub fn failed_count(&self) -> usize {
        self.column("status")
            .map_or(0, |c| c.iter().filter(|x| ***x != Cell::Text("ok".into())).count())
    }

    pub fn to_csv(&self, gnuplot_header: bool) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        if gnuplot_header {
            let cols: Vec<String> = self.columns.iter().enumerate().map(|(i, c)| format!("{}:{c}", i + 1)).collect();
            writeln!(buf, "# gnuplot columns {}", cols.join(" "))?;
        }
        let mut w = csv::Writer::from_writer(buf);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_field)).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        out.push(b'\n');
        Ok(out)
    }

    /// Temp file in the target directory, then rename.
    pub fn write(&self, out: &OutputSpec) -> Result<()> {
        let bytes = match out.format {
            Format::Csv => self.to_csv(out.gnuplot_header)?,
            Format::Json => self.to_json()?,
        };
        write_atomic(&out.path, &bytes)
    }
}

struct Record<'a>(&'a [String], &'a [Cell]);

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Serialize for SweepTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for r in &self.rows {
            seq.serialize_element(&Record(&self.columns, r))?;
        }
        seq.end()
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// `ZENO_WORKERS` if set and positive, otherwise the available parallelism.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::config(WORKERS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Γ-independent data of one axis point.
struct AxisData {
    model: std::result::Result<TargetedModel, String>,
    criterion: Option<CriterionReport>,
    gamma: Option<GammaChReport>,
}

fn axis_data(cfg: &SweepConfig, over: Option<(&str, f64)>, want_crit: bool, want_gamma: bool) -> AxisData {
    let model = match cfg.build_model(over) {
        Ok(m) => m,
        Err(e) => {
            return AxisData {
                model: Err(e.to_string()),
                criterion: None,
                gamma: None,
            }
        }
    };
    let criterion = if want_crit || want_gamma { model.criterion(CRITERION_TOL).ok() } else { None };
    let gamma = match (&criterion, want_gamma) {
        (Some(c), true) if c.satisfied => {
            let m = &model.model;
            block_decompose_with_criterion(m.hamiltonian(), &model.zeno, &model.target, m.layout(), c)
                .and_then(|d| gamma_ch(m, &d, c))
                .ok()
        }
        _ => None,
    };
    AxisData {
        model: Ok(model),
        criterion: if want_crit { criterion } else { None },
        gamma,
    }
}

fn columns(axis: Option<&str>, obs: &[Observable], wall_time: bool) -> Vec<String> {
    let mut cols: Vec<String> = axis.into_iter().map(str::to_string).collect();
    cols.push("gamma".into());
    for o in obs {
        match o {
            Observable::PurityDeficit => cols.push("purity_deficit".into()),
            Observable::Fidelity => cols.push("fidelity".into()),
            Observable::ReducedFidelity => cols.push("reduced_fidelity".into()),
            Observable::Gap => cols.push("gap".into()),
            Observable::GammaChTheorem => cols.push("gamma_ch_theorem".into()),
            Observable::GammaChExpansion => cols.push("gamma_ch_expansion".into()),
            Observable::Criterion => cols.extend(
                ["criterion_lambda", "criterion_kappa", "criterion_residual", "criterion_satisfied"].map(String::from),
            ),
        }
    }
    if obs.iter().any(|o| o.needs_gamma_ch()) {
        cols.push("divergent".into());
    }
    if obs.iter().any(|o| o.needs_ness()) {
        cols.push("ness_unique".into());
    }
    cols.push("status".into());
    if wall_time {
        cols.push("wall_time_ms".into());
    }
    cols
}

fn point_row(axis_value: Option<f64>, gamma: f64, data: &AxisData, obs: &[Observable], wall_time: bool) -> Vec<Cell> {
    let start = Instant::now();
    let mut row: Vec<Cell> = axis_value.into_iter().map(Cell::Num).collect();
    row.push(Cell::Num(gamma));
    let mut status: Option<String> = None;
    let fail = |e: String, status: &mut Option<String>| {
        if status.is_none() {
            *status = Some(e);
        }
    };

    let model = match &data.model {
        Ok(m) => m.with_gamma(gamma).map_err(|e| e.to_string()),
        Err(e) => Err(e.clone()),
    };
    if let Err(e) = &model {
        fail(e.clone(), &mut status);
    }
    let need_ness = obs.iter().any(|o| o.needs_ness());
    let ness = match (&model, need_ness) {
        (Ok(m), true) => ness(&m.model).map_err(|e| fail(format!("steady state: {e}"), &mut status)).ok(),
        _ => None,
    };
    let gap = match (&model, obs.contains(&Observable::Gap)) {
        (Ok(m), true) => spectrum(&m.model)
            .map(|s| s.gap)
            .map_err(|e| fail(format!("spectrum: {e}"), &mut status))
            .ok(),
        _ => None,
    };

    for o in obs {
        match o {
            Observable::PurityDeficit => row.push(ness.as_ref().map(|r| purity_deficit(&r.rho)).into()),
            Observable::Fidelity => row.push(
                ness.as_ref()
                    .zip(model.as_ref().ok())
                    .and_then(|(r, m)| fidelity(&r.rho, &m.full_target).ok())
                    .into(),
            ),
            Observable::ReducedFidelity => row.push(
                ness.as_ref()
                    .zip(model.as_ref().ok())
                    .and_then(|(r, m)| reduced_fidelity(&r.rho, &m.target, m.model.layout()).ok())
                    .into(),
            ),
            Observable::Gap => row.push(gap.into()),
            Observable::GammaChTheorem => row.push(data.gamma.as_ref().and_then(|g| g.gamma_ch_theorem).into()),
            Observable::GammaChExpansion => row.push(data.gamma.as_ref().and_then(|g| g.gamma_ch_expansion).into()),
            Observable::Criterion => match &data.criterion {
                Some(c) => row.extend([
                    Cell::Num(c.lambda),
                    Cell::Num(c.kappa.norm()),
                    Cell::Num(c.residual_norm),
                    Cell::Bool(c.satisfied),
                ]),
                None => row.extend(std::iter::repeat(Cell::Empty).take(4)),
            },
        }
    }
    if obs.iter().any(|o| o.needs_gamma_ch()) {
        row.push(data.gamma.as_ref().map_or(Cell::Empty, |g| Cell::Bool(g.divergent)));
    }
    if need_ness {
        row.push(ness.as_ref().map_or(Cell::Empty, |r| Cell::Bool(r.unique)));
    }
    row.push(Cell::Text(status.unwrap_or_else(|| "ok".into())));
    if wall_time {
        row.push(Cell::Num(start.elapsed().as_secs_f64() * 1e3));
    }
    row
}

/// Evaluates every grid point on `workers` threads. Row order and values
/// do not depend on `workers`.
pub fn compute_sweep(cfg: &SweepConfig, workers: usize) -> Result<SweepTable> {
    let (axis, gammas) = cfg.validate_sweep()?;
    let mut obs: Vec<Observable> = Vec::new();
    for o in &cfg.observables {
        if !obs.contains(o) {
            obs.push(*o);
        }
    }
    let wall_time = cfg.output.as_ref().is_some_and(|o| o.wall_time);
    let want_crit = obs.contains(&Observable::Criterion);
    let want_gamma = obs.iter().any(|o| o.needs_gamma_ch());
    let axis_values: Vec<Option<f64>> = match &axis {
        Some((_, v)) => v.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let name = axis.as_ref().map(|(n, _)| n.as_str());

    // dense kernels run single-threaded; parallelism is across grid points
    faer::set_global_parallelism(faer::Par::Seq);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let rows = pool.install(|| {
        let data: Vec<AxisData> = axis_values
            .par_iter()
            .map(|v| axis_data(cfg, name.zip(*v), want_crit, want_gamma))
            .collect();
        let points: Vec<(usize, f64)> = (0..axis_values.len())
            .flat_map(|i| gammas.iter().map(move |&g| (i, g)))
            .collect();
        points
            .par_iter()
            .map(|&(i, g)| point_row(axis_values[i], g, &data[i], &obs, wall_time))
            .collect::<Vec<_>>()
    });
    Ok(SweepTable {
        columns: columns(name, &obs, wall_time),
        rows,
    })
}

/// Computes and writes the sweep atomically.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> Result<SweepTable> {
    let table = compute_sweep(cfg, workers)?;
    let out = cfg.output.as_ref().ok_or_else(|| Error::config("output", "missing"))?;
    table.write(out)?;
    Ok(table)
}
