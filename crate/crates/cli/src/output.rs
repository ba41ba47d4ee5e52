use crate::error::{CliError, Result};
use floqdyn_core::scenarios::{cumulative_efficiency, Trajectory};
use floqdyn_core::Operator;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Operator> for MatrixJson {
    fn from(m: &Operator) -> Self {
        let rows = |f: fn(&floqdyn_core::C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

/// `t, rho_ij_re, rho_ij_im (i ≤ j), eta_cumulative`.
pub fn trajectory_header(d: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..d {
        for j in i..d {
            h.push(format!("rho_{i}{j}_re"));
            h.push(format!("rho_{i}{j}_im"));
        }
    }
    h.push("eta_cumulative".into());
    h
}

pub fn trajectory_csv(traj: &Trajectory, target: usize) -> String {
    let d = traj.dim();
    let eta = cumulative_efficiency(traj, target);
    let mut out = trajectory_header(d).join(",");
    out.push('\n');
    for (k, rho) in traj.states.iter().enumerate() {
        out.push_str(&num(traj.times[k]));
        for i in 0..d {
            for j in i..d {
                let _ = write!(out, ",{},{}", num(rho[(i, j)].re), num(rho[(i, j)].im));
            }
        }
        let _ = writeln!(out, ",{}", num(eta[k]));
    }
    out
}

/// A CSV of numeric columns.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|&x| num(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Files are collected first and written together, so that a failed run
/// leaves no partial output.
#[derive(Debug, Default)]
pub struct Bundle {
    files: Vec<(String, String)>,
}

impl Bundle {
    pub fn add(&mut self, name: &str, content: String) {
        self.files.push((name.to_owned(), content));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut s = serde_json::to_string_pretty(value).expect("summaries serialize");
        s.push('\n');
        self.add(name, s);
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let path = path.to_owned();
            move |e| CliError::Io { path, source: e }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, content) in &self.files {
            let p = dir.join(name);
            std::fs::write(&p, content).map_err(io(&p))?;
            written.push(p);
        }
        Ok(written)
    }
}
