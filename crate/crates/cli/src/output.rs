//! JSON, CSV and text renderings of run records.

use qvir_core::{Location, ParamRecord, Status, TruncationRecord};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::suites::Record;

/// Shortest round-trip scientific notation (`1.2345e-13`); non-finite values have no JSON form.
pub fn sci(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:e}"))
}

fn raw(x: f64) -> Option<Box<RawValue>> {
    sci(x).map(|s| RawValue::from_string(s).expect("scientific notation is a JSON number"))
}

#[derive(Serialize)]
struct JsonOut<'a> {
    identity: &'a str,
    pass: bool,
    status: Status,
    residual: Option<Box<RawValue>>,
    tolerance: Option<Box<RawValue>>,
    worst_location: &'a Option<Location>,
    params: &'a ParamRecord,
    truncation: &'a TruncationRecord,
    note: &'a Option<String>,
    runtime_ms: f64,
}

/// One JSON record as read back.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct JsonRecord {
    pub identity: String,
    pub pass: bool,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub worst_location: Option<Location>,
    pub params: ParamRecord,
    pub truncation: TruncationRecord,
    pub note: Option<String>,
    pub runtime_ms: f64,
}

impl From<JsonRecord> for Record {
    fn from(j: JsonRecord) -> Self {
        Record {
            report: qvir_core::CheckReport {
                identity: j.identity,
                status: j.status,
                residual: j.residual.unwrap_or(f64::NAN),
                tolerance: j.tolerance.unwrap_or(f64::NAN),
                worst_location: j.worst_location,
                params: j.params,
                truncation: j.truncation,
                note: j.note,
            },
            runtime_ms: j.runtime_ms,
        }
    }
}

pub fn to_json(records: &[Record]) -> String {
    let out: Vec<JsonOut> = records
        .iter()
        .map(|r| JsonOut {
            identity: &r.report.identity,
            pass: r.report.passed(),
            status: r.report.status,
            residual: raw(r.report.residual),
            tolerance: raw(r.report.tolerance),
            worst_location: &r.report.worst_location,
            params: &r.report.params,
            truncation: &r.report.truncation,
            note: &r.report.note,
            runtime_ms: (r.runtime_ms * 1e3).round() / 1e3,
        })
        .collect();
    serde_json::to_string_pretty(&out).expect("records serialize")
}

const CSV_HEADER: [&str; 18] = [
    "identity",
    "pass",
    "status",
    "residual",
    "tolerance",
    "worst_bra",
    "worst_ket",
    "worst_power",
    "q",
    "t",
    "ell",
    "k",
    "L",
    "r",
    "degree",
    "window",
    "note",
    "runtime_ms",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn to_csv(records: &[Record]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        let rep = &r.report;
        let loc = rep.worst_location.as_ref();
        let row = [
            rep.identity.clone(),
            rep.passed().to_string(),
            status_name(rep.status).to_string(),
            sci(rep.residual).unwrap_or_default(),
            sci(rep.tolerance).unwrap_or_default(),
            loc.map(|l| l.bra.clone()).unwrap_or_default(),
            loc.map(|l| l.ket.clone()).unwrap_or_default(),
            loc.map(|l| l.power.to_string()).unwrap_or_default(),
            opt(&rep.params.q),
            opt(&rep.params.t),
            opt(&rep.params.ell),
            opt(&rep.params.k),
            opt(&rep.params.L),
            opt(&rep.params.r),
            opt(&rep.truncation.degree),
            opt(&rep.truncation.window),
            opt(&rep.note),
            format!("{:.3}", r.runtime_ms),
        ];
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Inconclusive => "inconclusive",
    }
}

pub fn to_text(records: &[Record]) -> String {
    let width = records.iter().map(|r| r.report.identity.len()).max().unwrap_or(8);
    let mut out = String::new();
    for r in records {
        let rep = &r.report;
        let mut params = Vec::new();
        if let Some(l) = rep.params.ell {
            params.push(format!("ell={l}"));
        }
        if let Some(k) = rep.params.k {
            params.push(format!("k={k}"));
        }
        out.push_str(&format!(
            "{:<12} {:<width$}  residual {:<24} tol {:<8} {}",
            status_name(rep.status).to_uppercase(),
            rep.identity,
            sci(rep.residual).unwrap_or_else(|| "-".into()),
            sci(rep.tolerance).unwrap_or_else(|| "-".into()),
            params.join(" "),
        ));
        if let Some(note) = &rep.note {
            out.push_str(&format!("  ({note})"));
        }
        out.push('\n');
    }
    let pass = records.iter().filter(|r| r.report.passed()).count();
    out.push_str(&format!("{pass}/{} passed\n", records.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qvir_core::CheckReport;

    fn sample() -> Record {
        Record {
            report: CheckReport::judged(
                "fusion",
                1.2345678901234567e-16,
                1e-10,
                Some(Location {
                    bra: "a".into(),
                    ket: "b".into(),
                    power: 3,
                }),
                ParamRecord {
                    q: Some(0.7),
                    t: Some(0.3),
                    ell: Some(2),
                    ..ParamRecord::default()
                },
                TruncationRecord {
                    degree: None,
                    window: Some(12),
                },
            ),
            runtime_ms: 1.5,
        }
    }

    #[test]
    fn empty_outputs() {
        assert_eq!(to_json(&[]), "[]");
        let csv = to_csv(&[]);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("identity,pass,status,residual"));
    }

    #[test]
    fn residual_keeps_full_precision() {
        let json = to_json(&[sample()]);
        let residual = format!("\"residual\": {:e}", 1.2345678901234567e-16f64);
        assert!(json.contains(&residual), "{json}");
        assert!(json.contains("\"tolerance\": 1e-10"));
    }

    #[test]
    fn json_round_trip() {
        let json = to_json(&[sample()]);
        let back: Vec<JsonRecord> = serde_json::from_str(&json).unwrap();
        let again = to_json(&back.into_iter().map(Record::from).collect::<Vec<_>>());
        assert_eq!(json, again);
    }

    #[test]
    fn non_finite_residual_is_null() {
        let mut r = sample();
        r.report.residual = f64::NAN;
        assert!(to_json(&[r]).contains("\"residual\": null"));
    }
}
