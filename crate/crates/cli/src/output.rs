//! JSON result records, sweep CSV and fixed-precision matrix printing.

use std::io::Write;

use serde::{Deserialize, Serialize};
use unistab_core::lie::{CMatrix, C64};
use unistab_core::scenario::SweepRow;
use unistab_core::{Certificate, Error, ProjectivePoint, Result, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

/// One classified point, as written by `classify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub scenario: String,
    /// Homogeneous coordinates as `[re, im]` decimal strings.
    pub point: Vec<[String; 2]>,
    pub verdict: String,
    pub residual: Option<f64>,
    pub certificate: Option<Certificate>,
    pub iterations: usize,
    pub wall_time_ms: f64,
}

impl ResultRecord {
    pub fn new(scenario: &str, point: &ProjectivePoint, verdict: &Verdict, wall_time_ms: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            point: point.coords().iter().map(|z| [z.re.to_string(), z.im.to_string()]).collect(),
            verdict: verdict.kind_str().to_string(),
            residual: verdict.residual().filter(|r| r.is_finite()),
            certificate: verdict.certificate().cloned(),
            iterations: verdict.iterations(),
            wall_time_ms,
        }
    }
}

/// Shortest literal accepted back by the point parser.
pub fn format_complex(z: C64) -> String {
    let (re, im) = (z.re, z.im);
    if im == 0.0 {
        format!("{re}")
    } else if re == 0.0 {
        format!("{im}i")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

pub fn format_point(p: &ProjectivePoint) -> String {
    p.coords().iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    param: String,
    point: String,
    verdict: &'a str,
    certificate: &'a str,
    residual: String,
    slice_infimum: String,
    flag: &'a str,
}

/// One block of sweep output: a parameter value (if any), its rows, and the
/// slice report when the scenario has one.
pub struct SweepBlock {
    pub param: Option<f64>,
    pub rows: Vec<SweepRow>,
    pub slice: Option<unistab_core::SliceReport>,
}

pub fn write_sweep_csv<W: Write>(out: W, blocks: &[SweepBlock]) -> Result<()> {
    let io = |e: csv::Error| Error::Parse(format!("writing CSV: {e}"));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["param", "point", "verdict", "certificate", "residual", "slice_infimum", "flag"]).map_err(io)?;
    for b in blocks {
        let slice_infimum = b.slice.as_ref().map_or(String::new(), |s| format!("{:.12e}", s.infimum));
        let flag = match &b.slice {
            Some(s) if s.boundary => "boundary",
            _ => "",
        };
        for r in &b.rows {
            w.serialize(CsvRow {
                param: b.param.map_or(String::new(), |c| c.to_string()),
                point: format_point(&r.point),
                verdict: r.verdict.kind_str(),
                certificate: r.verdict.certificate().map_or("", |c| c.kind().as_str()),
                residual: r.verdict.residual().map_or(String::new(), |x| format!("{x:.12e}")),
                slice_infimum: slice_infimum.clone(),
                flag,
            })
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Parse(format!("writing CSV: {e}")))
}

/// Entries below this print as exact zeros.
const PRINT_ZERO: f64 = 5e-13;

fn fixed(x: f64) -> String {
    let x = if x.abs() < PRINT_ZERO { 0.0 } else { x };
    format!("{x:.12}")
}

pub fn format_entry(z: C64) -> String {
    if z.im.abs() < PRINT_ZERO {
        fixed(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", fixed(z.re), fixed(-z.im))
    } else {
        format!("{}+{}i", fixed(z.re), fixed(z.im))
    }
}

/// Rows of a matrix with entries right-aligned to a common width.
pub fn format_matrix(m: &CMatrix) -> Vec<String> {
    let cells: Vec<Vec<String>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| format_entry(m[(i, j)])).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    cells
        .iter()
        .map(|row| {
            let body: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            format!("[ {} ]", body.join("  "))
        })
        .collect()
}
