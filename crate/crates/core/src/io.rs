//! JSON matrix files and CSV output.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::densela::Matrix;
use crate::error::{Error, Result};
use crate::sampler::SampleRecord;
use crate::{Complex64, ComplexMatrix, RealMatrix};

/// Row-major matrix as stored in JSON: `{"rows", "cols", "real", "imag"?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub real: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<f64>>,
}

impl MatrixFile {
    fn check(&self) -> Result<()> {
        let n = self.rows * self.cols;
        if self.real.len() != n || self.imag.as_ref().is_some_and(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix file declares {}x{} but holds {} entries",
                self.rows,
                self.cols,
                self.real.len()
            )));
        }
        Ok(())
    }

    /// Real matrix; a present imaginary part must vanish.
    pub fn to_real(&self) -> Result<RealMatrix> {
        self.check()?;
        if self
            .imag
            .as_ref()
            .is_some_and(|v| v.iter().any(|&x| x != 0.0))
        {
            return Err(Error::InvalidParameter("expected a real matrix".into()));
        }
        Matrix::from_vec(self.rows, self.cols, self.real.clone())
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        self.check()?;
        let data = match &self.imag {
            Some(im) => self
                .real
                .iter()
                .zip(im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
            None => self.real.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        };
        Matrix::from_vec(self.rows, self.cols, data)
    }
}

impl From<&RealMatrix> for MatrixFile {
    fn from(m: &RealMatrix) -> Self {
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            real: m.as_slice().to_vec(),
            imag: None,
        }
    }
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            real: m.as_slice().iter().map(|z| z.re).collect(),
            imag: Some(m.as_slice().iter().map(|z| z.im).collect()),
        }
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one CSV row of floats.
pub fn write_csv_row<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let row: Vec<String> = values.iter().map(|&x| fmt_f64(x)).collect();
    writeln!(w, "{}", row.join(","))
}

/// `chain,index,b_q1..b_qM,b_p1..b_pM,q1..qM,p1..pM`.
pub fn write_samples_csv<W: Write>(
    w: &mut W,
    modes: usize,
    records: &[SampleRecord],
) -> io::Result<()> {
    let mut header = vec!["chain".to_string(), "index".to_string()];
    for prefix in ["b_q", "b_p", "q", "p"] {
        header.extend((1..=modes).map(|j| format!("{prefix}{j}")));
    }
    writeln!(w, "{}", header.join(","))?;
    for r in records {
        let mut row = vec![r.chain.to_string(), r.index.to_string()];
        row.extend(r.bins.q.iter().chain(&r.bins.p).map(|b| b.to_string()));
        row.extend(r.q.iter().chain(&r.p).map(|&x| fmt_f64(x)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
