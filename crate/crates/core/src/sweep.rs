//! Grid sweeps, optimum search and dataset output.

use std::fs;
use std::path::Path as FsPath;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Written in place of a value when the evaluator failed.
pub const FAILED_CELL: &str = "FAILED";

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    name: String,
    unit: String,
    values: Vec<f64>,
}

impl SweepAxis {
    /// `values` must be finite and strictly monotone. A single value is
    /// allowed.
    pub fn new(name: impl Into<String>, unit: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::Sweep(format!("axis {name} has no values")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Sweep(format!("axis {name} has a non-finite value")));
        }
        let inc = values.windows(2).all(|w| w[1] > w[0]);
        let dec = values.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(Error::Sweep(format!("axis {name} is not strictly monotone")));
        }
        Ok(Self {
            name,
            unit: unit.into(),
            values,
        })
    }

    /// `points` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(
        name: impl Into<String>,
        unit: impl Into<String>,
        start: f64,
        stop: f64,
        points: usize,
    ) -> Result<Self> {
        let name = name.into();
        let values = match points {
            0 => return Err(Error::Sweep(format!("axis {name} needs at least one point"))),
            1 => vec![start],
            n => {
                if start == stop {
                    return Err(Error::Sweep(format!("axis {name} has zero width")));
                }
                (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        };
        Self::new(name, unit, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn unit(&self) -> &str {
        &self.unit
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Column header: `name` or `name_unit`.
    pub fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{}_{}", self.name, self.unit)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cell {
    Value(f64),
    Failed(String),
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(*v),
            Cell::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub config: serde_json::Value,
    pub engine_version: String,
    pub step: Option<f64>,
}

impl SweepMetadata {
    pub fn new(config: serde_json::Value, step: Option<f64>) -> Self {
        Self {
            config,
            engine_version: ENGINE_VERSION.to_string(),
            step,
        }
    }
}

impl Default for SweepMetadata {
    fn default() -> Self {
        Self::new(serde_json::Value::Null, None)
    }
}

/// Row-major grid of evaluator outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    pub value_name: String,
    pub cells: Vec<Cell>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(SweepAxis::len).collect()
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.value().is_none()).count()
    }

    /// Coordinates of cell `k` in row-major order.
    pub fn coordinates(&self, k: usize) -> Vec<f64> {
        unravel(k, &self.shape())
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.values[i])
            .collect()
    }

    /// Values of a 1-D sweep; failed cells become `None`.
    pub fn series(&self) -> Vec<Option<f64>> {
        self.cells.iter().map(Cell::value).collect()
    }

    pub fn to_table(&self) -> Table {
        let mut columns: Vec<String> = self.axes.iter().map(SweepAxis::header).collect();
        columns.push(self.value_name.clone());
        let rows = (0..self.cells.len())
            .map(|k| {
                let mut row: Vec<Option<f64>> = self.coordinates(k).into_iter().map(Some).collect();
                row.push(self.cells[k].value());
                row
            })
            .collect();
        Table { columns, rows }
    }

    pub fn write_csv(&self, path: &FsPath) -> Result<()> {
        self.to_table().write_csv(path)
    }
}

fn unravel(mut k: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (d, &n) in shape.iter().enumerate().rev() {
        idx[d] = k % n;
        k /= n;
    }
    idx
}

/// Evaluates `evaluator` on every grid point. Cells are stored row-major
/// (last axis fastest) whatever the execution order. Failures and
/// non-finite values are recorded per cell and do not stop the scan.
///
/// `workers = 0` uses the global rayon pool.
pub fn scan<F>(
    axes: Vec<SweepAxis>,
    value_name: &str,
    metadata: SweepMetadata,
    workers: usize,
    evaluator: F,
) -> Result<SweepResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::Sweep(format!("expected 1 or 2 axes, got {}", axes.len())));
    }
    let shape: Vec<usize> = axes.iter().map(SweepAxis::len).collect();
    let total: usize = shape.iter().product();
    let eval = |k: usize| -> Cell {
        let point: Vec<f64> = unravel(k, &shape)
            .iter()
            .zip(&axes)
            .map(|(&i, a)| a.values[i])
            .collect();
        match evaluator(&point) {
            Ok(v) if v.is_finite() => Cell::Value(v),
            Ok(v) => Cell::Failed(format!("non-finite value {v}")),
            Err(e) => Cell::Failed(e.to_string()),
        }
    };
    let cells: Vec<Cell> = if workers == 0 {
        (0..total).into_par_iter().map(eval).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Sweep(e.to_string()))?
            .install(|| (0..total).into_par_iter().map(eval).collect())
    };
    Ok(SweepResult {
        axes,
        value_name: value_name.to_string(),
        cells,
        metadata,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub index: usize,
    pub coordinates: Vec<f64>,
    pub value: f64,
}

/// Largest cell; ties go to the lowest row-major index.
pub fn find_optimum(result: &SweepResult) -> Result<Optimum> {
    let mut best: Option<(usize, f64)> = None;
    for (k, c) in result.cells.iter().enumerate() {
        if let Some(v) = c.value() {
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((k, v));
            }
        }
    }
    let (index, value) =
        best.ok_or_else(|| Error::Sweep("no successful cells to optimize over".into()))?;
    Ok(Optimum {
        index,
        coordinates: result.coordinates(index),
        value,
    })
}

/// Formats `x` with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// Plain numeric table with optional (failed) cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    /// One shared abscissa and several named series of equal length.
    pub fn from_series(x: &SweepAxis, series: &[(String, Vec<Option<f64>>)]) -> Result<Self> {
        let mut columns = vec![x.header()];
        for (name, values) in series {
            if values.len() != x.len() {
                return Err(Error::Sweep(format!(
                    "series {name} has {} values for {} abscissae",
                    values.len(),
                    x.len()
                )));
            }
            columns.push(name.clone());
        }
        let rows = (0..x.len())
            .map(|i| {
                let mut row = vec![Some(x.values[i])];
                row.extend(series.iter().map(|(_, v)| v[i]));
                row
            })
            .collect();
        Ok(Self { columns, rows })
    }

    pub fn write_csv(&self, path: &FsPath) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Some(v) => format_sig12(*v),
                None => FAILED_CELL.to_string(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisDocument {
    pub name: String,
    pub unit: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl From<&SweepAxis> for AxisDocument {
    fn from(a: &SweepAxis) -> Self {
        Self {
            name: a.name.clone(),
            unit: a.unit.clone(),
            start: a.values[0],
            stop: *a.values.last().expect("axes are nonempty"),
            points: a.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelDocument {
    pub file: String,
    pub axes: Vec<AxisDocument>,
    pub scheme: serde_json::Value,
    pub noise: serde_json::Value,
    pub hardware: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineDocument {
    pub version: String,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure_id: Option<u32>,
    pub panels: Vec<PanelDocument>,
    pub engine: EngineDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl Manifest {
    pub fn new(figure_id: Option<u32>, step: Option<f64>) -> Self {
        Self {
            figure_id,
            panels: Vec::new(),
            engine: EngineDocument {
                version: ENGINE_VERSION.to_string(),
                step,
            },
            config: None,
        }
    }

    pub fn write(&self, path: &FsPath) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn axis(n: usize) -> SweepAxis {
        SweepAxis::linspace("x", "", -1.0, 1.0, n).unwrap()
    }

    #[test]
    fn axis_validation() {
        assert!(SweepAxis::new("x", "", vec![]).is_err());
        assert!(SweepAxis::new("x", "", vec![0.0, 0.0]).is_err());
        assert!(SweepAxis::new("x", "", vec![0.0, 2.0, 1.0]).is_err());
        assert!(SweepAxis::new("x", "", vec![2.0, 1.0]).is_ok());
        assert!(SweepAxis::linspace("x", "", 0.3, 0.3, 5).is_err());
        assert_eq!(SweepAxis::linspace("x", "", 0.3, 0.3, 1).unwrap().values(), &[0.3]);
        assert_eq!(axis(5).values(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn single_cell_scan() {
        let a = SweepAxis::new("p1", "rad", vec![0.5]).unwrap();
        let b = SweepAxis::new("p2", "rad", vec![1.5]).unwrap();
        let meta = SweepMetadata::new(serde_json::json!({"k": 1}), Some(1e-9));
        let r = scan(vec![a, b], "fidelity", meta.clone(), 1, |p| Ok(p[0] + p[1])).unwrap();
        assert_eq!(r.cells, vec![Cell::Value(2.0)]);
        assert_eq!(r.metadata, meta);
    }

    #[test]
    fn row_major_order() {
        let a = SweepAxis::new("a", "", vec![0.0, 1.0]).unwrap();
        let b = SweepAxis::new("b", "", vec![0.0, 10.0, 20.0]).unwrap();
        let r = scan(vec![a, b], "v", SweepMetadata::default(), 2, |p| Ok(p[0] + p[1])).unwrap();
        let v: Vec<f64> = r.cells.iter().map(|c| c.value().unwrap()).collect();
        assert_eq!(v, vec![0.0, 10.0, 20.0, 1.0, 11.0, 21.0]);
        assert_eq!(r.coordinates(4), vec![1.0, 10.0]);
    }

    #[test]
    fn failures_are_recorded() {
        let r = scan(vec![axis(5)], "v", SweepMetadata::default(), 1, |p| {
            if p[0] == 0.0 {
                Err(Error::NonConvergence("boom".into()))
            } else if p[0] > 0.9 {
                Ok(f64::NAN)
            } else {
                Ok(p[0])
            }
        })
        .unwrap();
        assert_eq!(r.failed_cells(), 2);
        let o = find_optimum(&r).unwrap();
        assert_eq!(o.coordinates, vec![0.5]);
        let all_bad = scan(vec![axis(3)], "v", SweepMetadata::default(), 1, |_| {
            Err(Error::Sweep("x".into()))
        })
        .unwrap();
        assert!(find_optimum(&all_bad).is_err());
    }

    #[test]
    fn constant_grid_optimum_is_first_cell() {
        let r = scan(vec![axis(4), axis(3)], "v", SweepMetadata::default(), 1, |_| Ok(0.7)).unwrap();
        let o = find_optimum(&r).unwrap();
        assert_eq!(o.index, 0);
        assert_eq!(o.coordinates, vec![-1.0, -1.0]);
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(0.999975780028123), "0.999975780028");
        assert_eq!(format_sig12(-3.14159265358979), "-3.14159265359");
        assert_eq!(format_sig12(1.5e-9), "1.50000000000e-9");
        assert_eq!(format_sig12(2.0e15), "2.00000000000e15");
        let x: f64 = format_sig12(0.123456789012345).parse().unwrap();
        assert!((x - 0.123456789012).abs() < 1e-15);
    }

    #[test]
    fn csv_output() {
        let dir = tempfile::tempdir().unwrap();
        let r = scan(vec![axis(3)], "fidelity", SweepMetadata::default(), 1, |p| {
            if p[0] > 0.5 {
                Err(Error::Sweep("x".into()))
            } else {
                Ok(1.0 - p[0] * p[0])
            }
        })
        .unwrap();
        let path = dir.path().join("sub/out.csv");
        r.write_csv(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "x,fidelity\n-1,0\n0,1\n1,FAILED\n");
    }

    #[test]
    fn series_table_checks_lengths() {
        let x = axis(3);
        assert!(Table::from_series(&x, &[("a".into(), vec![Some(1.0)])]).is_err());
        let t = Table::from_series(&x, &[("a".into(), vec![Some(1.0), None, Some(2.0)])]).unwrap();
        assert_eq!(t.columns, vec!["x", "a"]);
        assert_eq!(t.rows[1], vec![Some(0.0), None]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn workers_do_not_change_results(n in 2usize..12, m in 2usize..12, w in 1usize..5) {
            let f = |p: &[f64]| Ok((p[0] * 3.1).sin() * (p[1] * 1.7).cos());
            let a = SweepAxis::linspace("a", "", -2.0, 2.0, n).unwrap();
            let b = SweepAxis::linspace("b", "", 0.0, 1.0, m).unwrap();
            let serial = scan(vec![a.clone(), b.clone()], "v", SweepMetadata::default(), 1, f).unwrap();
            let parallel = scan(vec![a, b], "v", SweepMetadata::default(), w, f).unwrap();
            prop_assert_eq!(serial, parallel);
        }
    }
}
