//! Signals and sparse spectra, plus the brute-force DFT oracle.
//!
//! The DFT is unnormalized, `X[f] = Σ x[n]·e^{−j2πfn/N}`. Synthesis applies
//! the `1/N` factor so that the DFT of a synthesized signal reproduces the
//! tone amplitudes exactly.

mod io;

pub use io::{load_signal, read_signal, save_signal, write_signal, SIGNAL_MAGIC};

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Time-domain samples `x[0..N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArguments(
                "signal length must be at least 1".into(),
            ));
        }
        Ok(Signal { samples })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; a signal holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }
}

/// Frequency-domain coefficients `X[0..N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Spectrum { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }
}

/// One on-grid spectral line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub freq: usize,
    pub amplitude: Complex64,
}

impl Tone {
    pub fn new(freq: usize, amplitude: Complex64) -> Self {
        Tone { freq, amplitude }
    }
}

/// A k-sparse spectrum over `N` bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSpec {
    n: usize,
    tones: Vec<Tone>,
}

impl SparseSpec {
    pub fn new(n: usize, tones: Vec<Tone>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("length must be at least 1".into()));
        }
        if tones.len() > n {
            return Err(Error::InvalidSpec(format!(
                "{} tones exceed {} bins",
                tones.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for tone in &tones {
            if tone.freq >= n {
                return Err(Error::InvalidSpec(format!(
                    "frequency {} outside [0, {})",
                    tone.freq, n
                )));
            }
            if std::mem::replace(&mut seen[tone.freq], true) {
                return Err(Error::InvalidSpec(format!(
                    "duplicate frequency {}",
                    tone.freq
                )));
            }
        }
        Ok(SparseSpec { n, tones })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tones(&self) -> &[Tone] {
        &self.tones
    }

    pub fn sparsity(&self) -> usize {
        self.tones.len()
    }

    /// Support frequencies in ascending order.
    pub fn support(&self) -> Vec<usize> {
        let mut freqs: Vec<usize> = self.tones.iter().map(|t| t.freq).collect();
        freqs.sort_unstable();
        freqs
    }
}

/// `roots[i] = e^{sign·j2πi/n}` for `i in 0..n`.
pub(crate) fn unit_roots(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
            Complex64::new(c, sign * s)
        })
        .collect()
}

/// Time-domain signal whose unnormalized DFT equals the tone amplitudes.
pub fn synthesize(spec: &SparseSpec) -> Signal {
    let n = spec.n;
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    if !spec.tones.is_empty() {
        let roots = unit_roots(n, 1.0);
        let scale = 1.0 / n as f64;
        for tone in &spec.tones {
            let amp = tone.amplitude * scale;
            // index (f·t) mod n, advanced incrementally
            let mut idx = 0usize;
            for sample in samples.iter_mut() {
                *sample += amp * roots[idx];
                idx += tone.freq;
                if idx >= n {
                    idx -= n;
                }
            }
        }
    }
    Signal { samples }
}

/// Draws `k` distinct frequencies uniformly from `[0, n)` with amplitude
/// magnitudes uniform in `amp_range` and phases uniform in `[0, 2π)`.
///
/// The generator is ChaCha8 seeded through `seed_from_u64`, so output is
/// fully determined by `seed`. Tones are returned in ascending frequency.
pub fn random_sparse(n: usize, k: usize, seed: u64, amp_range: (f64, f64)) -> Result<SparseSpec> {
    let (lo, hi) = amp_range;
    if k > n {
        return Err(Error::InvalidArguments(format!(
            "sparsity {k} exceeds length {n}"
        )));
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidArguments(format!(
            "amplitude range ({lo}, {hi}) must satisfy 0 < min <= max"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut freqs = rand::seq::index::sample(&mut rng, n, k).into_vec();
    freqs.sort_unstable();
    let tones = freqs
        .into_iter()
        .map(|freq| {
            let mag = lo + (hi - lo) * rng.gen::<f64>();
            let phase = TAU * rng.gen::<f64>();
            Tone::new(freq, Complex64::from_polar(mag, phase))
        })
        .collect();
    SparseSpec::new(n, tones)
}

/// O(N²) reference DFT, evaluated straight from the definition.
pub fn dft_naive(x: &Signal) -> Spectrum {
    let n = x.len();
    let roots = unit_roots(n, -1.0);
    let coeffs = (0..n)
        .map(|f| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &sample in &x.samples {
                acc += sample * roots[idx];
                idx += f;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect();
    Spectrum { coeffs }
}
