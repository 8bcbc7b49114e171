//! Sweep tables as CSV or JSON.
//!
//! CSV layout: a `# optomech-amp v<version>` line, a header of axis names,
//! output columns and `flag`, then one row per grid point in `{:.16e}`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use optomech_core::sweep::SweepResult;
use serde::{Deserialize, Serialize};

use crate::VERSION;

fn axis_scale(result: &SweepResult, unit_scale: f64) -> Vec<f64> {
    result
        .axes
        .iter()
        .map(|a| {
            if a.param.is_frequency() {
                unit_scale
            } else {
                1.0
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(result: &SweepResult, unit_scale: f64, mut w: W) -> io::Result<()> {
    writeln!(w, "# optomech-amp v{VERSION}")?;
    let mut out = csv::Writer::from_writer(w);
    let header = result
        .axes
        .iter()
        .map(|a| a.param.name())
        .chain(result.columns.iter().copied())
        .chain(["flag"]);
    out.write_record(header)?;

    let scales = axis_scale(result, unit_scale);
    for row in &result.rows {
        let coords = row.coords.iter().zip(&scales).map(|(c, s)| c * s);
        let fields = coords
            .chain(row.values.iter().copied())
            .map(|v| format!("{v:.16e}"))
            .chain([row.flag.code().to_string()]);
        out.write_record(fields)?;
    }
    out.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRecord {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    pub flag: u8,
}

/// JSON form of a sweep. Round-trips through serde.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub version: String,
    pub unit_scale: f64,
    pub axes: Vec<AxisRecord>,
    pub columns: Vec<String>,
    pub metadata: BTreeMap<String, f64>,
    pub rows: Vec<RowRecord>,
}

impl SweepTable {
    pub fn new(result: &SweepResult, unit_scale: f64) -> Self {
        let scales = axis_scale(result, unit_scale);
        SweepTable {
            version: VERSION.into(),
            unit_scale,
            axes: result
                .axes
                .iter()
                .zip(&scales)
                .map(|(a, s)| AxisRecord {
                    param: a.param.name().into(),
                    start: a.start * s,
                    stop: a.stop * s,
                    count: a.count,
                })
                .collect(),
            columns: result.columns.iter().map(|c| c.to_string()).collect(),
            metadata: result
                .metadata
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            rows: result
                .rows
                .iter()
                .map(|r| RowRecord {
                    coords: r.coords.iter().zip(&scales).map(|(c, s)| c * s).collect(),
                    values: r.values.clone(),
                    flag: r.flag.code(),
                })
                .collect(),
        }
    }
}

pub fn write_json<W: Write>(result: &SweepResult, unit_scale: f64, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, &SweepTable::new(result, unit_scale))?;
    writeln!(w)?;
    w.flush()
}
