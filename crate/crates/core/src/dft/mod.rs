//! Arbitrary-length FFT, stride decimation, residue views, Goertzel, and
//! residue selection.

mod fft;
mod goertzel;
mod select;

pub use goertzel::{goertzel_bin, goertzel_mag};
pub(crate) use select::top_k_iter as select_top_k;
pub use select::{top_k_by_magnitude, top_k_select, SelectedBin, SELECTION_FLOOR};

use crate::error::{Error, Result};
use crate::ops::{fft_cost, OpCounter};
use crate::signal::{Signal, Spectrum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// FFT of any length `N ≥ 1`. Charges `⌈N·log₂N⌉` butterflies.
pub fn fft_any(x: &Signal, ops: &mut OpCounter) -> Spectrum {
    ops.add_fft(fft_cost(x.len()));
    Spectrum::new(fft::transform(x.samples()))
}

/// Keeps every `d`-th sample starting at index 0. `d` must divide `N`.
pub fn decimate(x: &Signal, d: usize) -> Result<Signal> {
    let n = x.len();
    if d == 0 || n % d != 0 {
        return Err(Error::Divisibility {
            n: n as u64,
            divisor: d as u64,
        });
    }
    Signal::new(x.samples().iter().step_by(d).copied().collect())
}

/// How a residue view's spectrum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewSource {
    /// `m`-point FFT of the stride-`N/m` decimated signal.
    Decimated,
    /// Dense spectrum folded modulo `m`; used when `m` does not divide `N`.
    Folded,
}

/// Per-modulus residue spectrum plus the selected residue set.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueView {
    pub modulus: u64,
    /// `N / modulus` for decimated views; `None` for folded views.
    pub stride: Option<u64>,
    pub source: ViewSource,
    pub spectrum: Vec<Complex64>,
    pub selected: Vec<SelectedBin>,
}

impl ResidueView {
    pub fn residues(&self) -> impl Iterator<Item = u64> + '_ {
        self.selected.iter().map(|b| b.residue)
    }

    /// `N / modulus` as a real number, defined for both view sources.
    pub fn effective_stride(&self, n: usize) -> f64 {
        n as f64 / self.modulus as f64
    }
}

/// Phase-1 view: decimate by `N/m`, transform, select the top
/// `select_count` residues.
pub fn decimated_view(
    x: &Signal,
    m: usize,
    select_count: usize,
    ops: &mut OpCounter,
) -> Result<ResidueView> {
    let n = x.len();
    if m == 0 || n % m != 0 {
        return Err(Error::Divisibility {
            n: n as u64,
            divisor: m as u64,
        });
    }
    let stride = n / m;
    let spectrum = fft_any(&decimate(x, stride)?, ops).into_coeffs();
    let selected = top_k_select(&magnitudes(&spectrum), select_count);
    Ok(ResidueView {
        modulus: m as u64,
        stride: Some(stride as u64),
        source: ViewSource::Decimated,
        spectrum,
        selected,
    })
}

/// Residue view built by folding a full spectrum: bin `r` holds
/// `(m/N)·Σ_{f ≡ r (mod m)} X[f]`. For `m | N` this coincides with the
/// decimated view; otherwise it realizes the ideal modular model directly.
pub fn folded_view(dense: &Spectrum, m: usize, select_count: usize) -> Result<ResidueView> {
    if m == 0 {
        return Err(Error::InvalidArguments("modulus must be positive".into()));
    }
    let n = dense.len();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); m];
    for (f, &coeff) in dense.coeffs().iter().enumerate() {
        spectrum[f % m] += coeff;
    }
    let scale = m as f64 / n as f64;
    spectrum.iter_mut().for_each(|v| *v *= scale);
    let selected = top_k_select(&magnitudes(&spectrum), select_count);
    Ok(ResidueView {
        modulus: m as u64,
        stride: None,
        source: ViewSource::Folded,
        spectrum,
        selected,
    })
}

fn magnitudes(values: &[Complex64]) -> Vec<f64> {
    values.iter().map(|v| v.norm()).collect()
}
