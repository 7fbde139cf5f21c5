//! End-to-end hybrid recovery: residue views, certificates, gating, Goertzel
//! validation, and dense fallback, with per-phase operation counts and the
//! closed-form cost predictors.

use crate::certificates::{
    bucket_occupancy_candidates, bucket_occupancy_pregate, candidate_count_check,
    phase_consistency, CertificateReport, Check, FailingCertificate, PhaseFlag, PhaseModel,
    DEFAULT_BUCKET_THRESHOLD, DEFAULT_COUNT_FACTOR, DEFAULT_PHASE_TOLERANCE,
};
use crate::crt::{gate_candidates, Candidate, ModuliConfig};
use crate::dft::{
    decimated_view, fft_any, folded_view, goertzel_mag, top_k_by_magnitude, ResidueView,
};
use crate::error::{Error, Result};
use crate::ops::{fft_cost, OpCounter};
use crate::signal::{Signal, Spectrum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcePath {
    #[default]
    Auto,
    /// Never fall back; certificates are still measured and reported.
    Sparse,
    /// Skip the sparse attempt entirely.
    Dense,
}

/// How residue views are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewMode {
    /// Decimate where `m | N`, fold the dense spectrum otherwise.
    #[default]
    Auto,
    /// Exact decimation only; non-dividing moduli are an error.
    Decimate,
    /// Fold the dense spectrum for every view.
    Fold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCheck {
    pub model: PhaseModel,
    pub tolerance: f64,
    /// When set, an inconsistent candidate fails the run.
    pub enforce: bool,
}

impl Default for PhaseCheck {
    fn default() -> Self {
        PhaseCheck {
            model: PhaseModel::ZeroOffset,
            tolerance: DEFAULT_PHASE_TOLERANCE,
            enforce: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub k: usize,
    pub coverage: usize,
    pub bucket_threshold: u64,
    pub count_factor: u64,
    pub validation_threshold_rel: f64,
    pub validation_threshold_abs: f64,
    pub moduli: ModuliConfig,
    pub force_path: ForcePath,
    pub view_mode: ViewMode,
    pub phase: PhaseCheck,
}

impl HybridConfig {
    pub fn new(k: usize, moduli: ModuliConfig) -> Self {
        HybridConfig {
            k,
            coverage: 2,
            bucket_threshold: DEFAULT_BUCKET_THRESHOLD,
            count_factor: DEFAULT_COUNT_FACTOR,
            validation_threshold_rel: 0.01,
            validation_threshold_abs: 1e-9,
            moduli,
            force_path: ForcePath::Auto,
            view_mode: ViewMode::Auto,
            phase: PhaseCheck::default(),
        }
    }

    pub fn with_coverage(mut self, coverage: usize) -> Self {
        self.coverage = coverage;
        self
    }

    pub fn with_force_path(mut self, force: ForcePath) -> Self {
        self.force_path = force;
        self
    }

    pub fn with_view_mode(mut self, mode: ViewMode) -> Self {
        self.view_mode = mode;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.moduli.n != n as u64 {
            return Err(Error::Configuration(format!(
                "moduli configured for length {}, signal has {n}",
                self.moduli.n
            )));
        }
        if self.view_mode == ViewMode::Decimate {
            self.moduli.require_exact()?;
        }
        if self.k > n {
            return Err(Error::InvalidArguments(format!(
                "sparsity {} exceeds length {n}",
                self.k
            )));
        }
        if self.coverage == 0 || self.bucket_threshold == 0 || self.count_factor == 0 {
            return Err(Error::InvalidArguments(
                "coverage and thresholds must be positive".into(),
            ));
        }
        if !(self.validation_threshold_rel > 0.0 && self.validation_threshold_abs > 0.0) {
            return Err(Error::InvalidArguments(
                "validation thresholds must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub freq: u64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionPath {
    Sparse,
    Fallback,
}

/// Operation counts per pipeline phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PhaseOps {
    pub views: OpCounter,
    pub gating: OpCounter,
    pub validation: OpCounter,
    pub fallback: OpCounter,
}

impl PhaseOps {
    pub fn merged(&self) -> OpCounter {
        self.views + self.gating + self.validation + self.fallback
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridResult {
    /// At most `k` peaks, magnitude descending, ties by lower frequency.
    pub peaks: Vec<Peak>,
    pub path: ExecutionPath,
    pub certificates: CertificateReport,
    pub ops: OpCounter,
    pub phase_ops: PhaseOps,
    /// `⌈N·log₂N⌉`, the dense-only cost.
    pub dense_ops_reference: u64,
    /// Gated candidates after deduplication, ascending frequency.
    pub candidates: Vec<Candidate>,
    pub survivors_dedup: u64,
    pub validated: u64,
    pub phase_flags: Vec<(u64, PhaseFlag)>,
}

impl HybridResult {
    pub fn peak_frequencies(&self) -> Vec<u64> {
        let mut freqs: Vec<u64> = self.peaks.iter().map(|p| p.freq).collect();
        freqs.sort_unstable();
        freqs
    }
}

fn sort_peaks(items: impl IntoIterator<Item = (usize, f64)>, k: usize) -> Vec<Peak> {
    crate::dft::select_top_k(items, k)
        .into_iter()
        .map(|(freq, magnitude)| Peak {
            freq: freq as u64,
            magnitude,
        })
        .collect()
}

/// Full FFT followed by top-k selection (no magnitude floor).
pub fn dense_topk(x: &Signal, k: usize, ops: &mut OpCounter) -> Vec<Peak> {
    spectrum_topk(&fft_any(x, ops), k)
}

fn spectrum_topk(spectrum: &Spectrum, k: usize) -> Vec<Peak> {
    top_k_by_magnitude(&spectrum.magnitudes(), k)
        .into_iter()
        .map(|(freq, magnitude)| Peak {
            freq: freq as u64,
            magnitude,
        })
        .collect()
}

/// Goertzel magnitude per candidate; keeps those above
/// `max(abs, rel × largest candidate magnitude)`. Output follows input order.
pub fn goertzel_validate(
    x: &Signal,
    cands: &[Candidate],
    cfg: &HybridConfig,
    ops: &mut OpCounter,
) -> Result<Vec<Peak>> {
    let measured = cands
        .iter()
        .map(|c| {
            let f = usize::try_from(c.freq)
                .map_err(|_| Error::InvalidArguments(format!("frequency {} too large", c.freq)))?;
            Ok(Peak {
                freq: c.freq,
                magnitude: goertzel_mag(x, f, ops)?,
            })
        })
        .collect::<Result<Vec<Peak>>>()?;
    let largest = measured.iter().map(|p| p.magnitude).fold(0.0, f64::max);
    let threshold = cfg
        .validation_threshold_abs
        .max(cfg.validation_threshold_rel * largest);
    Ok(measured
        .into_iter()
        .filter(|p| p.magnitude > threshold)
        .collect())
}

/// Closed-form cost model for the sparse and dense paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostPrediction {
    pub expected_candidates: f64,
    pub sparse_ops: f64,
    pub dense_ops: f64,
}

/// `E[candidates] = k + k³c³/√n`, `sparse = (3/2)√n·log₂n + E·n`,
/// `dense = n·log₂n`.
pub fn predict_costs(n: u64, k: u64, c: u64) -> CostPrediction {
    let n = n as f64;
    let (k, c) = (k as f64, c as f64);
    let sqrt_n = n.sqrt();
    let log_n = n.log2();
    let expected_candidates = if k == 0.0 {
        0.0
    } else {
        k + (k * c).powi(3) / sqrt_n
    };
    CostPrediction {
        expected_candidates,
        sparse_ops: 1.5 * sqrt_n * log_n + expected_candidates * n,
        dense_ops: n * log_n,
    }
}

fn build_views(
    x: &Signal,
    cfg: &HybridConfig,
    select_count: usize,
    ops: &mut OpCounter,
) -> Result<(Vec<ResidueView>, Option<Spectrum>)> {
    let n = x.len();
    let mut dense: Option<Spectrum> = None;
    let views = cfg
        .moduli
        .moduli()
        .into_iter()
        .map(|m| {
            let m = m as usize;
            let decimate = match cfg.view_mode {
                ViewMode::Decimate => true,
                ViewMode::Fold => false,
                ViewMode::Auto => n % m == 0,
            };
            if decimate {
                decimated_view(x, m, select_count, ops)
            } else {
                let spectrum = dense.get_or_insert_with(|| fft_any(x, ops));
                folded_view(spectrum, m, select_count)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((views, dense))
}

/// Runs the hybrid pipeline on `x`.
///
/// Phase 1 forms three residue views keeping `coverage·k` residues each.
/// Phase 2 checks pre-gating occupancy. Phase 3 gates `R1 × R2` against
/// `R3`. Phase 3b checks the pre-dedup survivor count against
/// `count_factor·k` and candidate-level occupancy against the bucket
/// threshold. Phase 4 validates survivors with Goertzel and keeps the top
/// `k`. Any failing certificate returns the dense top-k instead, unless
/// `force_path` is `Sparse`.
pub fn run_hybrid(x: &Signal, cfg: &HybridConfig) -> Result<HybridResult> {
    let n = x.len();
    cfg.validate(n)?;
    let k = cfg.k;
    let count_threshold = cfg.count_factor.saturating_mul(k as u64);
    let mut result = HybridResult {
        peaks: Vec::new(),
        path: ExecutionPath::Sparse,
        certificates: CertificateReport::empty(cfg.bucket_threshold, count_threshold),
        ops: OpCounter::default(),
        phase_ops: PhaseOps::default(),
        dense_ops_reference: fft_cost(n),
        candidates: Vec::new(),
        survivors_dedup: 0,
        validated: 0,
        phase_flags: Vec::new(),
    };

    if cfg.force_path == ForcePath::Dense {
        result.peaks = dense_topk(x, k, &mut result.phase_ops.fallback);
        result.path = ExecutionPath::Fallback;
        result.ops = result.phase_ops.merged();
        return Ok(result);
    }
    if k == 0 {
        return Ok(result);
    }

    // Phase 1
    let select_count = cfg.coverage.saturating_mul(k);
    let (views, dense) = build_views(x, cfg, select_count, &mut result.phase_ops.views)?;

    // Phase 2
    let certs = &mut result.certificates;
    certs.max_bucket_occupancy_pregate = bucket_occupancy_pregate(&views);
    if certs.max_bucket_occupancy_pregate > cfg.bucket_threshold {
        certs.fail(FailingCertificate::Bucket);
    }

    if certs.verdict == Check::Pass || cfg.force_path == ForcePath::Sparse {
        // Phase 3
        let gate = gate_candidates(
            &views[0].selected,
            &views[1].selected,
            &views[2].selected,
            &cfg.moduli,
        )?;
        result.phase_ops.gating.add_crt(gate.pairs);
        certs.candidate_count = gate.survivors;
        result.survivors_dedup = gate.candidates.len() as u64;

        // Phase 3b
        if candidate_count_check(gate.survivors, k as u64, cfg.count_factor) == Check::Fail {
            certs.fail(FailingCertificate::Count);
        }
        certs.max_bucket_occupancy_candidates =
            bucket_occupancy_candidates(&gate.candidates, &cfg.moduli);
        if certs.max_bucket_occupancy_candidates > cfg.bucket_threshold {
            certs.fail(FailingCertificate::Bucket);
        }

        let phase = phase_consistency(
            &gate.candidates,
            &views,
            &cfg.moduli,
            cfg.phase.tolerance,
            cfg.phase.model,
        );
        certs.phase_max_error = Some(phase.max_error);
        if cfg.phase.enforce && phase.any_inconsistent() {
            certs.fail(FailingCertificate::Phase);
        }
        result.phase_flags = phase.flags;
        result.candidates = gate.candidates;
    }

    if result.certificates.verdict == Check::Fail && cfg.force_path != ForcePath::Sparse {
        // folded views already paid for the full spectrum
        result.peaks = match &dense {
            Some(spectrum) => spectrum_topk(spectrum, k),
            None => dense_topk(x, k, &mut result.phase_ops.fallback),
        };
        result.path = ExecutionPath::Fallback;
    } else {
        // Phase 4
        let validated =
            goertzel_validate(x, &result.candidates, cfg, &mut result.phase_ops.validation)?;
        result.validated = validated.len() as u64;
        result.peaks = sort_peaks(validated.iter().map(|p| (p.freq as usize, p.magnitude)), k);
    }
    result.ops = result.phase_ops.merged();
    Ok(result)
}
