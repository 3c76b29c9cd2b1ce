//! Continuous-time LTI state-space models.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::{is_hurwitz_matrix, to_complex};

/// `ẋ = A x + B u`, `y = C x + D u` with `n` states, `m` inputs, `p` outputs.
///
/// `n = 0` is a pure gain `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    labels: Option<serde_json::Value>,
}

impl StateSpaceModel {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let model = Self { a, b, c, d, labels: None };
        model.validate()?;
        Ok(model)
    }

    pub fn gain(d: DMatrix<f64>) -> Self {
        let (p, m) = d.shape();
        Self {
            a: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, m),
            c: DMatrix::zeros(p, 0),
            d,
            labels: None,
        }
    }

    /// `k / (s² + c₁ s + c₀)` in controllable canonical form.
    pub fn second_order(gain: f64, c1: f64, c0: f64) -> Self {
        Self {
            a: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -c0, -c1]),
            b: DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
            c: DMatrix::from_row_slice(1, 2, &[gain, 0.0]),
            d: DMatrix::zeros(1, 1),
            labels: None,
        }
    }

    /// Checks shapes and finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        let (p, m) = self.d.shape();
        let check = |name: &str, mat: &DMatrix<f64>, rows: usize, cols: usize| -> Result<()> {
            if mat.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {rows}x{cols}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            if mat.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(name.to_string()));
            }
            Ok(())
        };
        check("A", &self.a, n, n)?;
        check("B", &self.b, n, m)?;
        check("C", &self.c, p, n)?;
        check("D", &self.d, p, m)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }
    pub fn inputs(&self) -> usize {
        self.d.ncols()
    }
    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }

    pub fn labels(&self) -> Option<&serde_json::Value> {
        self.labels.as_ref()
    }

    pub fn with_labels(mut self, labels: serde_json::Value) -> Self {
        self.labels = Some(labels);
        self
    }

    /// Consumes the model, returning `(A, B, C, D)`.
    pub fn into_parts(self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        (self.a, self.b, self.c, self.d)
    }

    /// Hurwitz flag and the largest real part over the spectrum of `A`.
    /// A pure gain reports `(true, -inf)`.
    pub fn is_hurwitz(&self) -> Result<(bool, f64)> {
        is_hurwitz_matrix(&self.a)
    }

    /// Realization of the product `G1(s) · G2(s)`: `u → G2 → G1 → y`.
    pub fn series(g1: &Self, g2: &Self) -> Result<Self> {
        if g2.outputs() != g1.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "series: G2 has {} outputs but G1 has {} inputs",
                g2.outputs(),
                g1.inputs()
            )));
        }
        let (n1, n2) = (g1.states(), g2.states());
        let n = n1 + n2;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (n1, n1)).copy_from(&g1.a);
        a.view_mut((0, n1), (n1, n2)).copy_from(&(&g1.b * &g2.c));
        a.view_mut((n1, n1), (n2, n2)).copy_from(&g2.a);
        let mut b = DMatrix::zeros(n, g2.inputs());
        b.view_mut((0, 0), (n1, g2.inputs())).copy_from(&(&g1.b * &g2.d));
        b.view_mut((n1, 0), (n2, g2.inputs())).copy_from(&g2.b);
        let mut c = DMatrix::zeros(g1.outputs(), n);
        c.view_mut((0, 0), (g1.outputs(), n1)).copy_from(&g1.c);
        c.view_mut((0, n1), (g1.outputs(), n2)).copy_from(&(&g1.d * &g2.c));
        let d = &g1.d * &g2.d;
        Self::new(a, b, c, d)
    }

    /// Error system `G − Ĝ` realized as `(diag(A, Â), [B; B̂], [C, −Ĉ], D − D̂)`.
    pub fn error_system(g: &Self, ghat: &Self) -> Result<Self> {
        if g.inputs() != ghat.inputs() || g.outputs() != ghat.outputs() {
            return Err(Error::DimensionMismatch(format!(
                "error system: G is {}x{} but the reduced model is {}x{}",
                g.outputs(),
                g.inputs(),
                ghat.outputs(),
                ghat.inputs()
            )));
        }
        let (n, nr, m, p) = (g.states(), ghat.states(), g.inputs(), g.outputs());
        let mut a = DMatrix::zeros(n + nr, n + nr);
        a.view_mut((0, 0), (n, n)).copy_from(&g.a);
        a.view_mut((n, n), (nr, nr)).copy_from(&ghat.a);
        let mut b = DMatrix::zeros(n + nr, m);
        b.view_mut((0, 0), (n, m)).copy_from(&g.b);
        b.view_mut((n, 0), (nr, m)).copy_from(&ghat.b);
        let mut c = DMatrix::zeros(p, n + nr);
        c.view_mut((0, 0), (p, n)).copy_from(&g.c);
        c.view_mut((0, n), (p, nr)).copy_from(&(-&ghat.c));
        Self::new(a, b, c, &g.d - &ghat.d)
    }

    /// State transformation `x = T z`: `(T⁻¹AT, T⁻¹B, CT, D)`.
    pub fn transformed(&self, t: &DMatrix<f64>) -> Result<Self> {
        let n = self.states();
        if t.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "state transformation is {}x{}, expected {n}x{n}",
                t.nrows(),
                t.ncols()
            )));
        }
        let lu = t.clone().lu();
        let a = lu
            .solve(&(&self.a * t))
            .ok_or_else(|| Error::DimensionMismatch("singular state transformation".into()))?;
        let b = lu
            .solve(&self.b)
            .ok_or_else(|| Error::DimensionMismatch("singular state transformation".into()))?;
        Self::new(a, b, &self.c * t, self.d.clone())
    }

    /// `C (iωI − A)⁻¹ B + D` through an LU solve.
    pub fn freq_response(&self, omega: f64) -> Result<DMatrix<Complex64>> {
        let n = self.states();
        let d = to_complex(&self.d);
        if n == 0 {
            return Ok(d);
        }
        let m = DMatrix::<Complex64>::identity(n, n) * Complex64::new(0.0, omega) - to_complex(&self.a);
        let scale = m.norm();
        let lu = m.lu();
        let min_pivot = lu.u().diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if min_pivot <= 1e-14 * scale {
            return Err(Error::SingularAtFrequency { omega });
        }
        let x = lu
            .solve(&to_complex(&self.b))
            .ok_or(Error::SingularAtFrequency { omega })?;
        Ok(to_complex(&self.c) * x + d)
    }

    pub fn read_json(text: &str, source: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("{source} line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        file.into_model(source)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            a: rows(&self.a),
            b: rows(&self.b),
            c: rows(&self.c),
            d: rows(&self.d),
            labels: self.labels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_json(&text, &path.display().to_string())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    d: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<serde_json::Value>,
}

pub(crate) fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Builds a `rows x cols` matrix from nested rows, reporting the offending
/// field and row on a shape error.
pub(crate) fn matrix_from_rows(
    data: &[Vec<f64>],
    rows: usize,
    cols: usize,
    field: &str,
    source: &str,
) -> Result<DMatrix<f64>> {
    let err = |message: String| Error::Parse {
        location: format!("{source}, field {field}"),
        message,
    };
    if data.len() != rows {
        return Err(err(format!("has {} rows, expected {rows}", data.len())));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(err(format!("row {} has {} entries, expected {cols}", i + 1, row.len())));
        }
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| data[i][j]))
}

impl ModelFile {
    fn into_model(self, source: &str) -> Result<StateSpaceModel> {
        let n = self.a.len();
        let p = self.d.len();
        let m = self.d.first().map_or(0, Vec::len);
        let a = matrix_from_rows(&self.a, n, n, "A", source)?;
        let b = matrix_from_rows(&self.b, n, m, "B", source)?;
        // a pure gain may list C as [] instead of p empty rows
        let c = if n == 0 && self.c.is_empty() {
            DMatrix::zeros(p, 0)
        } else {
            matrix_from_rows(&self.c, p, n, "C", source)?
        };
        let d = matrix_from_rows(&self.d, p, m, "D", source)?;
        let mut model = StateSpaceModel::new(a, b, c, d)?;
        model.labels = self.labels;
        Ok(model)
    }
}
