//! CSV tables written by the command-line tool, and readers for them.
//!
//! Floats are written in their shortest round-trip form, so reading a table
//! back yields bit-identical values.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::laplace_exponent::CurvePoint;
use crate::simulator::RuinEstimate;

pub type CsvResult<T> = std::result::Result<T, csv::Error>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub gamma: f64,
    pub psi: f64,
    pub psi_prime: f64,
}

impl From<&CurvePoint> for CurveRow {
    fn from(p: &CurvePoint) -> Self {
        Self {
            gamma: p.gamma,
            psi: p.psi,
            psi_prime: p.psi_prime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub u: f64,
    pub n_paths: u64,
    pub ruined: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    /// Case letter, empty when the model could not be classified.
    pub case: String,
    pub verdict: String,
}

impl From<&RuinEstimate> for EstimateRow {
    fn from(e: &RuinEstimate) -> Self {
        Self {
            u: e.u,
            n_paths: e.n_paths,
            ruined: e.ruined_count,
            estimate: e.estimate,
            stderr: e.stderr,
            bound: e.bound,
            case: e.case.map(String::from).unwrap_or_default(),
            verdict: e.verdict.as_str().to_owned(),
        }
    }
}

/// An [`EstimateRow`] tagged with the model it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyRow {
    pub model: String,
    pub u: f64,
    pub n_paths: u64,
    pub ruined: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub case: String,
    pub verdict: String,
}

impl CertifyRow {
    pub fn new(model: &str, e: &RuinEstimate) -> Self {
        let r = EstimateRow::from(e);
        Self {
            model: model.to_owned(),
            u: r.u,
            n_paths: r.n_paths,
            ruined: r.ruined,
            estimate: r.estimate,
            stderr: r.stderr,
            bound: r.bound,
            case: r.case,
            verdict: r.verdict,
        }
    }
}

/// Writes `rows` with a header line taken from the row's field names.
pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> CsvResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_rows`].
pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> CsvResult<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Renders rows to an in-memory CSV string.
pub fn to_csv_string<T: Serialize>(rows: &[T]) -> CsvResult<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers() {
        let c = to_csv_string(&[CurveRow {
            gamma: 0.0,
            psi: 0.0,
            psi_prime: -1.0,
        }])
        .unwrap();
        assert_eq!(c.lines().next().unwrap(), "gamma,psi,psi_prime");
        let e = EstimateRow {
            u: 1.0,
            n_paths: 10,
            ruined: 1,
            estimate: 0.1,
            stderr: 0.09486832980505137,
            bound: f64::INFINITY,
            case: "B".into(),
            verdict: "certified".into(),
        };
        let s = to_csv_string(std::slice::from_ref(&e)).unwrap();
        assert_eq!(s.lines().next().unwrap(), "u,n_paths,ruined,estimate,stderr,bound,case,verdict");
        let back: Vec<EstimateRow> = read_rows(s.as_bytes()).unwrap();
        assert_eq!(back, vec![e]);
    }

    #[test]
    fn floats_round_trip_exactly() {
        let rows: Vec<CurveRow> = [0.1, 1.0 / 3.0, 1e-300, 5e-324, 12345.678901234567, f64::MAX]
            .iter()
            .map(|&g| CurveRow {
                gamma: g,
                psi: -g,
                psi_prime: g * 7.0,
            })
            .collect();
        let s = to_csv_string(&rows).unwrap();
        let back: Vec<CurveRow> = read_rows(s.as_bytes()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn nan_bound_round_trips() {
        let row = CertifyRow {
            model: "m".into(),
            u: 0.0,
            n_paths: 1,
            ruined: 0,
            estimate: 0.0,
            stderr: 0.0,
            bound: f64::NAN,
            case: String::new(),
            verdict: "inconclusive".into(),
        };
        let s = to_csv_string(std::slice::from_ref(&row)).unwrap();
        assert!(s.starts_with("model,u,n_paths"));
        let back: Vec<CertifyRow> = read_rows(s.as_bytes()).unwrap();
        assert!(back[0].bound.is_nan());
        assert_eq!(back[0].case, "");
    }
}
