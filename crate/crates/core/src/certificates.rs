//! Safety certificates.
//!
//! Bucket occupancy is measured twice: over the detected residue lists (the
//! pre-gating quantity, at most 1 once lists are deduplicated) and over the
//! gated candidates per view residue. The candidate count is the pre-dedup
//! survivor count from the gate. Phase consistency is a diagnostic.

use crate::crt::{Candidate, ModuliConfig};
use crate::dft::ResidueView;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

pub const DEFAULT_BUCKET_THRESHOLD: u64 = 3;
pub const DEFAULT_COUNT_FACTOR: u64 = 3;
pub const DEFAULT_PHASE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailingCertificate {
    None,
    Bucket,
    Count,
    Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub max_bucket_occupancy_pregate: u64,
    pub max_bucket_occupancy_candidates: u64,
    /// Pre-deduplication gate survivors.
    pub candidate_count: u64,
    pub candidate_count_threshold: u64,
    pub bucket_threshold: u64,
    pub phase_max_error: Option<f64>,
    pub verdict: Check,
    pub failing_certificate: FailingCertificate,
}

impl CertificateReport {
    /// A passing report with no measurements, for `k = 0` and forced paths.
    pub fn empty(bucket_threshold: u64, candidate_count_threshold: u64) -> Self {
        CertificateReport {
            max_bucket_occupancy_pregate: 0,
            max_bucket_occupancy_candidates: 0,
            candidate_count: 0,
            candidate_count_threshold,
            bucket_threshold,
            phase_max_error: None,
            verdict: Check::Pass,
            failing_certificate: FailingCertificate::None,
        }
    }

    /// Marks the report failed by `which`, keeping the first failure.
    pub fn fail(&mut self, which: FailingCertificate) {
        if self.verdict == Check::Pass {
            self.verdict = Check::Fail;
            self.failing_certificate = which;
        }
    }
}

fn max_multiplicity(values: impl Iterator<Item = u64>) -> u64 {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    values.fold(0, |best, v| {
        let c = counts.entry(v).or_default();
        *c += 1;
        best.max(*c)
    })
}

/// Largest multiplicity of a residue within any view's selected list.
pub fn bucket_occupancy_pregate(views: &[ResidueView]) -> u64 {
    views
        .iter()
        .map(|v| max_multiplicity(v.residues()))
        .max()
        .unwrap_or(0)
}

/// Largest number of candidates sharing one residue bin in any view.
pub fn bucket_occupancy_candidates(cands: &[Candidate], cfg: &ModuliConfig) -> u64 {
    cfg.moduli()
        .into_iter()
        .map(|m| max_multiplicity(cands.iter().map(|c| c.freq % m)))
        .max()
        .unwrap_or(0)
}

/// Fails iff `count > factor·k`.
pub fn candidate_count_check(count: u64, k: u64, factor: u64) -> Check {
    if count > factor.saturating_mul(k) {
        Check::Fail
    } else {
        Check::Pass
    }
}

/// Expected cross-view phase difference for a singleton candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// Decimation starting at sample 0: both views carry the tone phase.
    ZeroOffset,
    /// Per-view offset `2πf(dᵢ−1)/(2N)`, giving `Δφ = πf(d1−d2)/N`.
    HalfStrideOffset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseFlag {
    Consistent,
    Inconsistent,
    /// The candidate shares a residue bin with another candidate in view 1
    /// or 2, or its bin is empty, so its phase cannot be isolated.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub max_error: f64,
    pub flags: Vec<(u64, PhaseFlag)>,
}

impl PhaseReport {
    pub fn any_inconsistent(&self) -> bool {
        self.flags
            .iter()
            .any(|(_, f)| *f == PhaseFlag::Inconsistent)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Compares `∠V1[f mod m1] − ∠V2[f mod m2]` against `model` for every
/// candidate whose bins are singletons in views 1 and 2.
pub fn phase_consistency(
    cands: &[Candidate],
    views: &[ResidueView],
    cfg: &ModuliConfig,
    tol: f64,
    model: PhaseModel,
) -> PhaseReport {
    let mut report = PhaseReport {
        max_error: 0.0,
        flags: Vec::with_capacity(cands.len()),
    };
    let (Some(v1), Some(v2)) = (views.first(), views.get(1)) else {
        report
            .flags
            .extend(cands.iter().map(|c| (c.freq, PhaseFlag::Indeterminate)));
        return report;
    };
    let occupancy = |m: u64| {
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for c in cands {
            *counts.entry(c.freq % m).or_default() += 1;
        }
        counts
    };
    let occ1 = occupancy(cfg.m1);
    let occ2 = occupancy(cfg.m2);
    let n = cfg.n as f64;

    for c in cands {
        let (r1, r2) = (c.freq % cfg.m1, c.freq % cfg.m2);
        let b1 = v1.spectrum[r1 as usize];
        let b2 = v2.spectrum[r2 as usize];
        if occ1[&r1] > 1 || occ2[&r2] > 1 || b1.norm() == 0.0 || b2.norm() == 0.0 {
            report.flags.push((c.freq, PhaseFlag::Indeterminate));
            continue;
        }
        let measured = b1.arg() - b2.arg();
        let expected = match model {
            PhaseModel::ZeroOffset => 0.0,
            PhaseModel::HalfStrideOffset => {
                let d1 = v1.effective_stride(cfg.n as usize);
                let d2 = v2.effective_stride(cfg.n as usize);
                PI * c.freq as f64 * (d1 - d2) / n
            }
        };
        let err = wrap_angle(measured - expected).abs();
        report.max_error = report.max_error.max(err);
        let flag = if err <= tol {
            PhaseFlag::Consistent
        } else {
            PhaseFlag::Inconsistent
        };
        report.flags.push((c.freq, flag));
    }
    report
}
