//! Outcome records shared by every checker.

use serde::{Deserialize, Serialize};

use crate::qspecial::QParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A constituent evaluation failed to converge; the identity was not tested.
    Inconclusive,
}

/// Where the largest mismatch was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub bra: String,
    pub ket: String,
    pub power: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ParamRecord {
    pub q: Option<f64>,
    pub t: Option<f64>,
    pub ell: Option<u32>,
    pub k: Option<u32>,
    pub L: Option<f64>,
    pub r: Option<f64>,
}

impl ParamRecord {
    pub fn from_params(params: &QParams) -> Self {
        Self {
            q: Some(params.q().re),
            t: Some(params.t().re),
            ..Self::default()
        }
    }

    pub fn with_ell(mut self, ell: u32) -> Self {
        self.ell = Some(ell);
        self
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub degree: Option<usize>,
    pub window: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub identity: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub worst_location: Option<Location>,
    pub params: ParamRecord,
    pub truncation: TruncationRecord,
    pub note: Option<String>,
}

impl CheckReport {
    /// Builds a report whose status follows from `residual < tolerance`.
    pub fn judged(
        identity: impl Into<String>,
        residual: f64,
        tolerance: f64,
        worst_location: Option<Location>,
        params: ParamRecord,
        truncation: TruncationRecord,
    ) -> Self {
        let status = if residual < tolerance { Status::Pass } else { Status::Fail };
        Self {
            identity: identity.into(),
            status,
            residual,
            tolerance,
            worst_location,
            params,
            truncation,
            note: None,
        }
    }

    pub fn inconclusive(identity: impl Into<String>, tolerance: f64, params: ParamRecord, note: impl Into<String>) -> Self {
        Self {
            identity: identity.into(),
            status: Status::Inconclusive,
            residual: f64::NAN,
            tolerance,
            worst_location: None,
            params,
            truncation: TruncationRecord::default(),
            note: Some(note.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// `|l - r| / max(1, |l|, |r|)`: absolute for O(1) quantities, relative for large ones.
pub fn scaled_residual(l: num_complex::Complex64, r: num_complex::Complex64) -> f64 {
    (l - r).norm() / 1f64.max(l.norm()).max(r.norm())
}

/// `|l - r| / max(|l|, |r|)`, zero when both vanish.
pub fn relative_residual(l: num_complex::Complex64, r: num_complex::Complex64) -> f64 {
    let scale = l.norm().max(r.norm());
    if scale == 0.0 {
        0.0
    } else {
        (l - r).norm() / scale
    }
}

/// Running maximum of residuals with the location where it occurred.
#[derive(Debug, Clone, Default)]
pub struct WorstTracker {
    pub residual: f64,
    pub location: Option<Location>,
}

impl WorstTracker {
    pub fn observe(&mut self, residual: f64, location: impl FnOnce() -> Location) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        if self.location.is_none() || r > self.residual {
            self.residual = r;
            self.location = Some(location());
        }
    }

    pub fn merge(&mut self, other: WorstTracker) {
        if let Some(loc) = other.location {
            self.observe(other.residual, || loc);
        }
    }
}
