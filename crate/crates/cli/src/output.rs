//! CSV output and diagnostics.

use std::fmt;
use std::path::Path;

use freqlim::reducers::ReductionReport;
use freqlim::{Error, FrequencyBand, StateSpaceModel};

#[derive(Debug)]
pub struct Failure(String);

impl Failure {
    pub fn msg(text: impl Into<String>) -> Self {
        Self(text.into())
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self(e.to_string())
    }
}

/// Scientific notation with six significant digits and a signed two-digit
/// exponent, e.g. `9.14026e-02`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "--".to_string(), sci)
}

pub const METRICS_HEADER: [&str; 8] = [
    "method",
    "h2w_error",
    "h2w_relative",
    "hinfw_relative",
    "max_real_eig",
    "stable",
    "iterations",
    "runtime_seconds",
];

/// Writes `metrics.csv` and returns the same table as text.
pub fn write_metrics(path: &Path, reports: &[ReductionReport]) -> Result<String, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(METRICS_HEADER)?;
    for r in reports {
        writer.write_record([
            r.method.clone(),
            opt(r.h2w_error),
            opt(r.h2w_relative),
            opt(r.hinfw_relative),
            sci(r.max_real_eig),
            r.stable.to_string(),
            r.iterations.to_string(),
            sci(r.runtime_seconds),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Failure::msg(e.to_string()))?;
    std::fs::write(path, &bytes).map_err(|e| Failure::io(path, e))?;
    Ok(String::from_utf8(bytes).expect("ASCII table"))
}

/// Sample frequencies covering each band interval with `points` samples,
/// linear from 0 and logarithmic otherwise. An unbounded interval is cut
/// at ten times the largest finite endpoint (at least 10 rad/s).
pub fn frequency_grid(band: &FrequencyBand, points: usize) -> Result<Vec<f64>, Failure> {
    if points < 2 {
        return Err(Failure::msg("respgrid: need at least 2 points per interval"));
    }
    let cap = 10.0 * band.max_finite().unwrap_or(0.0).max(1.0);
    let mut grid: Vec<f64> = Vec::new();
    for iv in band.intervals() {
        let hi = if iv.is_unbounded() { cap.max(10.0 * iv.lo) } else { iv.hi };
        for k in 0..points {
            let t = k as f64 / (points - 1) as f64;
            let w = if iv.lo == 0.0 {
                hi * t
            } else {
                iv.lo * (hi / iv.lo).powf(t)
            };
            grid.push(w);
        }
    }
    grid.dedup();
    Ok(grid)
}

/// Magnitudes of every output-input pair on `grid`.
pub fn write_response(path: &Path, model: &StateSpaceModel, grid: &[f64]) -> Result<(), Failure> {
    let (p, m) = (model.outputs(), model.inputs());
    let mut writer = csv::Writer::from_path(path).map_err(|e| Failure::io(path, e))?;
    let mut header = vec!["omega_rad_s".to_string()];
    for i in 1..=p {
        for j in 1..=m {
            header.push(format!("|G_{i}_{j}|"));
        }
    }
    writer.write_record(&header)?;
    for &w in grid {
        let mut row = vec![sci(w)];
        match model.freq_response(w) {
            Ok(h) => {
                for i in 0..p {
                    for j in 0..m {
                        row.push(sci(h[(i, j)].norm()));
                    }
                }
            }
            Err(Error::SingularAtFrequency { .. }) => row.extend(std::iter::repeat("inf".to_string()).take(p * m)),
            Err(e) => return Err(e.into()),
        }
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|e| Failure::io(path, e))?;
    Ok(())
}
