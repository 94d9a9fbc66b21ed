//! Delimited result tables with a metadata header.
//!
//! ```text
//! # msland rates1d
//! # landmark = "ill"
//! # config_hash = "…"
//! t,from,to,mass
//! 2.0,0,1,0.125
//! ```
//!
//! Header values are JSON; numbers in the table are written in Rust's
//! shortest round-trip form, so reading a table back is lossless.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use msland_core::estimate::{BivariateProbabilities, RateMeasure1D, RateMeasure2D};
use msland_core::model::{Landmark, StateSpace, StepFunction1D, StepSurface2D};
use msland_core::volterra::{AtomicMeasure1D, Grid2D, MatrixMeasure2D};
use msland_core::Matrix;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(kind: &str, meta: Vec<(String, Value)>, columns: &[&str]) -> Self {
        Self {
            kind: kind.into(),
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn format(&self) -> String {
        let mut out = format!("# msland {}\n", self.kind);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let err = |line: usize, message: String| CliError::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let kind = lines
            .next()
            .and_then(|(_, l)| l.strip_prefix("# msland "))
            .ok_or_else(|| err(1, "missing `# msland <kind>` header".into()))?
            .to_string();
        let mut meta = Vec::new();
        let mut columns = None;
        let mut rows = Vec::new();
        for (line, text) in lines {
            if columns.is_none() {
                if let Some(entry) = text.strip_prefix("# ") {
                    let (k, v) = entry
                        .split_once(" = ")
                        .ok_or_else(|| err(line, "metadata lines read `# key = value`".into()))?;
                    let v: Value = serde_json::from_str(v).map_err(|e| err(line, e.to_string()))?;
                    meta.push((k.to_string(), v));
                } else {
                    columns = Some(text.split(',').map(str::to_string).collect::<Vec<_>>());
                }
                continue;
            }
            if text.is_empty() {
                continue;
            }
            let row = text
                .split(',')
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| err(line, format!("`{c}` is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let width = columns.as_ref().map_or(0, Vec::len);
            if row.len() != width {
                return Err(err(line, format!("expected {width} fields, found {}", row.len())));
            }
            rows.push(row);
        }
        let columns = columns.ok_or_else(|| err(1, "missing column header".into()))?;
        Ok(Self {
            kind,
            meta,
            columns,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

fn shape_error(origin: &str, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: origin.into(),
        message: message.into(),
    }
}

fn meta_f64(t: &Table, key: &str) -> Result<f64, CliError> {
    t.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| shape_error(&t.kind, format!("metadata `{key}` missing or not a number")))
}

fn meta_times(t: &Table, key: &str) -> Result<Vec<f64>, CliError> {
    t.get(key)
        .and_then(Value::as_array)
        .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
        .ok_or_else(|| shape_error(&t.kind, format!("metadata `{key}` missing or not a list of numbers")))
}

fn meta_landmark(t: &Table) -> Result<Landmark, CliError> {
    t.get("landmark")
        .and_then(Value::as_str)
        .map(Landmark::new)
        .ok_or_else(|| shape_error(&t.kind, "metadata `landmark` missing"))
}

fn meta_states(t: &Table) -> Result<usize, CliError> {
    t.get("states")
        .and_then(Value::as_array)
        .map(Vec::len)
        .ok_or_else(|| shape_error(&t.kind, "metadata `states` missing"))
}

fn index(x: f64, bound: usize, kind: &str) -> Result<usize, CliError> {
    if x >= 0.0 && x.fract() == 0.0 && (x as usize) < bound {
        Ok(x as usize)
    } else {
        Err(shape_error(kind, format!("state index {x} out of range")))
    }
}

/// Metadata shared by every table of one landmark class.
pub fn class_meta(landmark: &Landmark, states: &StateSpace, config_hash: &str) -> Vec<(String, Value)> {
    vec![
        ("version".into(), json!(env!("CARGO_PKG_VERSION"))),
        ("config_hash".into(), json!(config_hash)),
        ("landmark".into(), json!(landmark.as_str())),
        ("states".into(), json!(states.labels())),
    ]
}

/// Atoms of `ΔΛ` as `(t, from, to, mass)` rows, diagonal included; zero
/// entries are left out.
pub fn rates1d_table(rates: &RateMeasure1D, meta: Vec<(String, Value)>) -> Table {
    let mut meta = meta;
    meta.push(("origin".into(), json!(rates.origin())));
    let mut t = Table::new("rates1d", meta, &["t", "from", "to", "mass"]);
    let l = rates.states();
    for (&time, atom) in rates.times().iter().zip(rates.atoms()) {
        for i in 0..l {
            for j in 0..l {
                if atom[(i, j)] != 0.0 {
                    t.rows.push(vec![time, i as f64, j as f64, atom[(i, j)]]);
                }
            }
        }
    }
    t
}

pub fn read_rates1d(t: &Table) -> Result<RateMeasure1D, CliError> {
    let l = meta_states(t)?;
    let origin = meta_f64(t, "origin")?;
    let mut times: Vec<f64> = Vec::new();
    let mut atoms: Vec<Matrix> = Vec::new();
    for row in &t.rows {
        if times.last() != Some(&row[0]) {
            times.push(row[0]);
            atoms.push(Matrix::zeros(l, l));
        }
        let m = atoms.last_mut().expect("pushed above");
        m[(index(row[1], l, &t.kind)?, index(row[2], l, &t.kind)?)] = row[3];
    }
    let measure = AtomicMeasure1D::new(origin, l, times, atoms)?;
    Ok(RateMeasure1D::new(meta_landmark(t)?, measure))
}

/// Occupation probabilities at `s` and every grid time, one column per state.
pub fn probabilities1d_table(p: &[StepFunction1D], states: &StateSpace, meta: Vec<(String, Value)>) -> Table {
    let mut columns = vec!["t"];
    columns.extend(states.labels().iter().map(String::as_str));
    let mut t = Table::new("probabilities1d", meta, &columns);
    if let Some(first) = p.first() {
        let times = std::iter::once(first.origin()).chain(first.grid().iter().copied());
        for (k, time) in times.enumerate() {
            let mut row = vec![time];
            row.extend(p.iter().map(|f| f.nodes()[k]));
            t.rows.push(row);
        }
    }
    t
}

fn grid_meta(grid: &Grid2D, meta: &mut Vec<(String, Value)>) {
    meta.push(("origin".into(), json!(grid.origin())));
    meta.push(("grid1".into(), json!(grid.t1())));
    meta.push(("grid2".into(), json!(grid.t2())));
}

fn read_grid(t: &Table) -> Result<Grid2D, CliError> {
    Ok(Grid2D::new(
        meta_f64(t, "origin")?,
        meta_times(t, "grid1")?,
        meta_times(t, "grid2")?,
    )?)
}

/// Cell masses of `Δ²Λ` as
/// `(cell_t1_lo, cell_t1_hi, cell_t2_lo, cell_t2_hi, i1, j1, i2, j2, mass)`,
/// where the entry maps the pair `(i1, i2)` to `(j1, j2)`.
pub fn rates2d_table(rates: &RateMeasure2D, meta: Vec<(String, Value)>) -> Table {
    let mut meta = meta;
    let grid = rates.grid();
    grid_meta(grid, &mut meta);
    let mut t = Table::new(
        "rates2d",
        meta,
        &[
            "cell_t1_lo",
            "cell_t1_hi",
            "cell_t2_lo",
            "cell_t2_hi",
            "i1",
            "j1",
            "i2",
            "j2",
            "mass",
        ],
    );
    let l = rates.states();
    for (a, b, cell) in rates.measure().atoms() {
        let bounds = [grid.time1(a - 1), grid.time1(a), grid.time2(b - 1), grid.time2(b)];
        for i2 in 0..l {
            for i1 in 0..l {
                for j2 in 0..l {
                    for j1 in 0..l {
                        let m = cell[(l * i2 + i1, l * j2 + j1)];
                        if m != 0.0 {
                            let mut row = bounds.to_vec();
                            row.extend([i1, j1, i2, j2].map(|x| x as f64));
                            row.push(m);
                            t.rows.push(row);
                        }
                    }
                }
            }
        }
    }
    t
}

pub fn read_rates2d(t: &Table) -> Result<RateMeasure2D, CliError> {
    let l = meta_states(t)?;
    let grid = read_grid(t)?;
    let mut cells: std::collections::BTreeMap<(usize, usize), Matrix> = Default::default();
    for row in &t.rows {
        let a = grid.index1(row[1]).filter(|&a| a > 0 && grid.time1(a - 1) == row[0]);
        let b = grid.index2(row[3]).filter(|&b| b > 0 && grid.time2(b - 1) == row[2]);
        let (Some(a), Some(b)) = (a, b) else {
            return Err(shape_error(
                &t.kind,
                format!(
                    "cell ({}, {}] x ({}, {}] is not on the grid",
                    row[0], row[1], row[2], row[3]
                ),
            ));
        };
        let [i1, j1, i2, j2] = [row[4], row[5], row[6], row[7]];
        let (i1, j1, i2, j2) = (
            index(i1, l, &t.kind)?,
            index(j1, l, &t.kind)?,
            index(i2, l, &t.kind)?,
            index(j2, l, &t.kind)?,
        );
        cells.entry((a, b)).or_insert_with(|| Matrix::zeros(l * l, l * l))[(l * i2 + i1, l * j2 + j1)] = row[8];
    }
    let mut measure = MatrixMeasure2D::zero(grid, l * l);
    for ((a, b), m) in cells {
        measure.set(a, b, m)?;
    }
    Ok(RateMeasure2D::new(meta_landmark(t)?, l, measure)?)
}

/// One component `(t1, t2) ↦ P_(i1,i2)(t1, t2)` of a bivariate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceArtifact {
    pub landmark: Landmark,
    pub pair: (usize, usize),
    pub surface: StepSurface2D,
}

impl SurfaceArtifact {
    pub fn from_probabilities(landmark: &Landmark, p: &BivariateProbabilities, pair: (usize, usize)) -> Self {
        Self {
            landmark: landmark.clone(),
            pair,
            surface: p.surface(pair.0, pair.1),
        }
    }

    pub fn to_table(&self, meta: Vec<(String, Value)>) -> Table {
        let mut meta: Vec<(String, Value)> = meta.into_iter().filter(|(k, _)| k != "landmark").collect();
        meta.push(("landmark".into(), json!(self.landmark.as_str())));
        meta.push(("pair".into(), json!([self.pair.0, self.pair.1])));
        let f = &self.surface;
        meta.push(("origin".into(), json!(f.origin())));
        meta.push(("grid1".into(), json!(f.grid1())));
        meta.push(("grid2".into(), json!(f.grid2())));
        let mut t = Table::new("surface", meta, &["t1", "t2", "value"]);
        let (n1, n2) = f.shape();
        for a in 0..=n1 {
            for b in 0..=n2 {
                t.rows.push(vec![f.time1(a), f.time2(b), f.node(a, b)]);
            }
        }
        t
    }

    pub fn from_table(t: &Table) -> Result<Self, CliError> {
        let pair = t
            .get("pair")
            .and_then(Value::as_array)
            .and_then(|p| Some((p.first()?.as_u64()? as usize, p.get(1)?.as_u64()? as usize)))
            .ok_or_else(|| shape_error(&t.kind, "metadata `pair` missing"))?;
        let nodes = t.rows.iter().map(|r| r[2]).collect();
        let surface = StepSurface2D::new(
            meta_f64(t, "origin")?,
            meta_times(t, "grid1")?,
            meta_times(t, "grid2")?,
            nodes,
        )?;
        let (n1, n2) = surface.shape();
        for (k, row) in t.rows.iter().enumerate() {
            let (a, b) = (k / (n2 + 1), k % (n2 + 1));
            if a > n1 || row[0] != surface.time1(a) || row[1] != surface.time2(b) {
                return Err(shape_error(&t.kind, format!("row {k} does not match the grid")));
            }
        }
        Ok(Self {
            landmark: meta_landmark(t)?,
            pair,
            surface,
        })
    }
}
