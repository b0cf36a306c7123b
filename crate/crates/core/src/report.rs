//! Machine-readable outcomes of property checks.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, CVector};
use crate::model::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// A labelled vector (one row) or matrix (several rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub rows: Vec<Vec<Complex64>>,
}

impl Witness {
    pub fn vector(label: &str, v: &CVector) -> Self {
        Self {
            label: label.to_string(),
            rows: vec![v.iter().copied().collect()],
        }
    }

    pub fn values(label: &str, v: &[Complex64]) -> Self {
        Self {
            label: label.to_string(),
            rows: vec![v.to_vec()],
        }
    }

    pub fn scalar(label: &str, v: f64) -> Self {
        Self::values(label, &[Complex64::new(v, 0.0)])
    }

    pub fn matrix(label: &str, m: &CMatrix) -> Self {
        Self {
            label: label.to_string(),
            rows: (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check_id: String,
    pub status: Status,
    /// Signed slack; positive means satisfied with room.
    pub margin: f64,
    pub tolerance: f64,
    pub seed: Seed,
    pub samples: usize,
    pub details: String,
    pub witnesses: Option<Vec<Witness>>,
}

impl Report {
    /// `status = pass` iff `margin ≥ −tolerance`. A failing report with no
    /// witnesses gets the margin itself attached.
    pub fn from_margin(check_id: &str, margin: f64, tolerance: f64, seed: Seed, samples: usize, details: String, witnesses: Vec<Witness>) -> Self {
        let status = if margin >= -tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        let mut witnesses = witnesses;
        if status == Status::Fail && witnesses.is_empty() {
            witnesses.push(Witness::scalar("margin", margin));
        }
        Self {
            check_id: check_id.to_string(),
            status,
            margin,
            tolerance,
            seed,
            samples,
            details,
            witnesses: if witnesses.is_empty() { None } else { Some(witnesses) },
        }
    }

    /// A check of `observed ≤ bound`.
    pub fn at_most(check_id: &str, observed: f64, bound: f64, tolerance: f64, seed: Seed, samples: usize, details: String, witnesses: Vec<Witness>) -> Self {
        Self::from_margin(check_id, bound - observed, tolerance, seed, samples, details, witnesses)
    }

    /// A check of `observed ≥ bound`.
    pub fn at_least(check_id: &str, observed: f64, bound: f64, tolerance: f64, seed: Seed, samples: usize, details: String, witnesses: Vec<Witness>) -> Self {
        Self::from_margin(check_id, observed - bound, tolerance, seed, samples, details, witnesses)
    }

    pub fn skip(check_id: &str, seed: Seed, details: String) -> Self {
        Self {
            check_id: check_id.to_string(),
            status: Status::Skip,
            margin: 0.0,
            tolerance: 0.0,
            seed,
            samples: 0,
            details,
            witnesses: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}
