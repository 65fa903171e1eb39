//! CSV writers for density trajectories and field snapshots.
//!
//! All numeric values are written with Rust's shortest round-trip `f64`
//! formatting, so identical runs produce byte-identical files. Times are
//! rounded to 1e-9 before formatting to absorb accumulated `n * dt`
//! round-off (`0.30000000000000004` prints as `0.3`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::DensitySeries;
use crate::error::{Error, Result};
use crate::space::{FESpace, Field};
use crate::stepping::StepObserver;

/// Time label: rounded to 1e-9, shortest decimal form.
pub fn format_time(t: f64) -> String {
    let rounded = (t * 1e9).round() / 1e9;
    // Avoid "-0".
    format!("{}", if rounded == 0.0 { 0.0 } else { rounded })
}

/// Writes `time,mean_u1,...,mean_uN` with one row per recorded level.
pub fn write_density_csv(series: &DensitySeries, path: &Path) -> Result<()> {
    let io_err = |e| Error::io(path, e);
    let mut text = String::from("time");
    let n = series.means.first().map_or(0, |row| row.len());
    for i in 1..=n {
        text.push_str(&format!(",mean_u{i}"));
    }
    text.push('\n');
    for (t, row) in series.times.iter().zip(&series.means) {
        text.push_str(&format_time(*t));
        for v in row {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(text.as_bytes()).map_err(io_err)
}

/// Full per-species fields captured every `stride` steps plus the final one.
pub struct SnapshotSet {
    pub times: Vec<f64>,
    /// `fields[snapshot][species]`.
    pub fields: Vec<Vec<Field>>,
    stride: usize,
    final_step: usize,
}

impl SnapshotSet {
    pub fn new(stride: usize, n_steps: usize) -> SnapshotSet {
        assert!(stride > 0, "snapshot stride must be positive");
        SnapshotSet {
            times: Vec::new(),
            fields: Vec::new(),
            stride,
            final_step: n_steps,
        }
    }

    fn record(&mut self, t: f64, fields: &[Field]) {
        self.times.push(t);
        self.fields.push(fields.to_vec());
    }
}

impl StepObserver for SnapshotSet {
    fn initial(&mut self, t: f64, fields: &[Field]) {
        self.record(t, fields);
    }

    fn step(&mut self, n: usize, t: f64, fields: &[Field]) {
        if n % self.stride == 0 || n == self.final_step {
            self.record(t, fields);
        }
    }
}

/// Writes one `snap_t<time>.csv` per snapshot into `dir` (created if
/// missing), rows `x,y,u1,...,uN` over the DOF coordinates in DOF order.
/// Returns the written paths.
pub fn write_snapshots(set: &SnapshotSet, space: &FESpace, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(set.times.len());
    for (t, fields) in set.times.iter().zip(&set.fields) {
        let path = dir.join(format!("snap_t{}.csv", format_time(*t)));
        let io_err = |e| Error::io(&path, e);
        let mut text = String::from("x,y");
        for i in 1..=fields.len() {
            text.push_str(&format!(",u{i}"));
        }
        text.push('\n');
        for (dof, &[x, y]) in space.dof_coords.iter().enumerate() {
            text.push_str(&format!("{x},{y}"));
            for f in fields {
                text.push_str(&format!(",{}", f.values[dof]));
            }
            text.push('\n');
        }
        let mut file = fs::File::create(&path).map_err(io_err)?;
        file.write_all(text.as_bytes()).map_err(io_err)?;
        written.push(path);
    }
    Ok(written)
}
