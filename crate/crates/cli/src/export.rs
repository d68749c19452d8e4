//! CSV and JSON artifacts. Floats are written with 17 significant digits.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use transmutant::{DerivativeSource, Grid, Provenance, Samples, TransmutationKernel};

use crate::error::CliError;

type C = Complex64;

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_float(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Io(format!("bad number {s:?} in CSV")))
}

pub fn write_kernel_csv(kernel: &TransmutationKernel, out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "t", "re_K", "im_K", "re_Kt", "im_Kt"])?;
    let nodes = kernel.grid().nodes();
    let nan = C::new(f64::NAN, f64::NAN);
    for (i, &x) in nodes.iter().enumerate() {
        for (j, &t) in nodes.iter().enumerate() {
            let k = kernel.at(i, j);
            let kt = kernel.kt().map_or(nan, |kt| kt[[i, j]]);
            w.write_record([x, t, k.re, k.im, kt.re, kt.im].map(fmt_float))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a kernel CSV; the grid is inferred from the node coordinates.
pub fn read_kernel_csv(input: impl Read, h: C) -> Result<TransmutationKernel, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        if record.len() != 6 {
            return Err(CliError::Io(format!(
                "kernel CSV row has {} fields",
                record.len()
            )));
        }
        let v: Vec<f64> = record.iter().map(parse_float).collect::<Result<_, _>>()?;
        rows.push(v);
    }
    let n = (rows.len() as f64).sqrt().round() as usize;
    if n * n != rows.len() || n < 5 {
        return Err(CliError::Io(format!(
            "kernel CSV has {} rows, not a square grid",
            rows.len()
        )));
    }
    let a = rows[rows.len() - 1][0];
    let grid = Grid::new(a, n).map_err(|e| CliError::Io(e.to_string()))?;
    let nodes = grid.nodes();
    let mut values = Array2::zeros((n, n));
    let mut kt = Array2::zeros((n, n));
    let mut has_kt = true;
    for (idx, row) in rows.iter().enumerate() {
        let (i, j) = (idx / n, idx % n);
        let tol = 1e-9 * a;
        if (row[0] - nodes[i]).abs() > tol || (row[1] - nodes[j]).abs() > tol {
            return Err(CliError::Io(format!(
                "kernel CSV row {idx} is off the grid"
            )));
        }
        values[[i, j]] = C::new(row[2], row[3]);
        if row[4].is_nan() || row[5].is_nan() {
            has_kt = false;
        }
        kt[[i, j]] = C::new(row[4], row[5]);
    }
    let kt = has_kt.then_some(kt);
    Ok(TransmutationKernel::from_parts(
        grid,
        h,
        values,
        kt,
        DerivativeSource::Imported,
        Provenance::Imported,
    )?)
}

pub fn write_curve_csv(u: &Samples, out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "re", "im"])?;
    for (x, v) in u.grid().nodes().into_iter().zip(u.values()) {
        w.write_record([x, v.re, v.im].map(fmt_float))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a curve CSV that must lie on `grid`.
pub fn read_curve_csv(input: impl Read, grid: Grid) -> Result<Samples, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let nodes = grid.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    for (idx, record) in r.records().enumerate() {
        let record = record?;
        let v: Vec<f64> = record.iter().map(parse_float).collect::<Result<_, _>>()?;
        if v.len() != 3
            || idx >= nodes.len()
            || (v[0] - nodes[idx]).abs() > 1e-9 * grid.half_width()
        {
            return Err(CliError::Io(format!(
                "curve CSV row {idx} does not match the grid"
            )));
        }
        values.push(C::new(v[1], v[2]));
    }
    Ok(Samples::new(grid, values)?)
}

/// `x,<name>_re,<name>_im,...` for each named column.
pub fn write_table_csv(
    names: &[&str],
    columns: &[Samples],
    out: impl Write,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x".to_string()];
    for name in names {
        header.push(format!("{name}_re"));
        header.push(format!("{name}_im"));
    }
    w.write_record(&header)?;
    let Some(first) = columns.first() else {
        w.flush()?;
        return Ok(());
    };
    for (i, x) in first.grid().nodes().into_iter().enumerate() {
        let mut row = vec![fmt_float(x)];
        for col in columns {
            row.push(fmt_float(col.at(i).re));
            row.push(fmt_float(col.at(i).im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spinor_csv(psi1: &Samples, psi2: &Samples, out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "re_psi1", "im_psi1", "re_psi2", "im_psi2"])?;
    for (i, x) in psi1.grid().nodes().into_iter().enumerate() {
        let (a, b) = (psi1.at(i), psi2.at(i));
        w.write_record([x, a.re, a.im, b.re, b.im].map(fmt_float))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMeta {
    pub h: [f64; 2],
    pub a: f64,
    pub n_points: usize,
    pub potential: String,
    pub provenance: String,
    pub kt_source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Last successive-approximation update.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goursat_residual: Option<f64>,
}

impl KernelMeta {
    pub fn describe(kernel: &TransmutationKernel, potential: &str) -> Self {
        Self {
            h: [kernel.h().re, kernel.h().im],
            a: kernel.grid().half_width(),
            n_points: kernel.grid().len(),
            potential: potential.to_string(),
            provenance: kernel.provenance().as_str().to_string(),
            kt_source: kernel.kt_source().as_str().to_string(),
            iterations: None,
            residual: None,
            goursat_residual: None,
        }
    }
}

/// `kernel.csv` → `kernel.meta.json`.
pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(file))
}

pub fn open(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::open(path)
        .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))
}
