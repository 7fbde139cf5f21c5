//! Invariant suites checked against brute-force oracles. Used by the
//! `verify` subcommand; each suite can be pointed at an alternative
//! implementation so that a broken variant is caught.

use crate::crt::{affine_coeffs, garner2, gcd, ModuliConfig};
use crate::dft::{decimated_view, fft_any, goertzel_mag};
use crate::error::Result;
use crate::ops::OpCounter;
use crate::pipeline::{run_hybrid, ExecutionPath, HybridConfig};
use crate::signal::{dft_naive, synthesize, Signal, SparseSpec, Tone};
use crate::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: u64,
    pub failures: u64,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            checks: 0,
            failures: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// Iteration budget for the suites.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub random_signals: usize,
    pub goertzel_cases: usize,
    pub garner_max_modulus: u64,
    pub affine_samples: usize,
}

impl Budget {
    pub fn full() -> Self {
        Budget {
            random_signals: 100,
            goertzel_cases: 1000,
            garner_max_modulus: 30,
            affine_samples: 10_000,
        }
    }

    pub fn quick() -> Self {
        Budget {
            random_signals: 10,
            goertzel_cases: 100,
            garner_max_modulus: 12,
            affine_samples: 1000,
        }
    }
}

pub type GarnerFn = dyn Fn(u64, u64, u64, u64) -> Result<u64>;

pub(crate) fn random_signal(n: usize, rng: &mut impl Rng) -> Signal {
    Signal::new(
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
    .expect("n >= 1")
}

/// `d·X_d[r] = Σ_{f ≡ r (mod m)} X[f]` for every `m | N`, within 1e-9
/// relative to the largest dense bin.
pub fn aliasing_suite(budget: &Budget, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("aliasing identity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..budget.random_signals {
        let n = [12usize, 16, 60, 210][trial % 4];
        let x = random_signal(n, &mut rng);
        let dense = dft_naive(&x);
        let scale = dense
            .coeffs()
            .iter()
            .map(|v| v.norm())
            .fold(1e-300, f64::max);
        for m in (1..=n).filter(|m| n % m == 0) {
            let d = (n / m) as f64;
            let Ok(view) = decimated_view(&x, m, 1, &mut OpCounter::default()) else {
                report.record(false);
                continue;
            };
            for r in 0..m {
                let folded: Complex64 = dense.coeffs().iter().skip(r).step_by(m).sum();
                report.record((view.spectrum[r] * d - folded).norm() <= 1e-9 * scale);
            }
        }
    }
    report
}

/// Both congruences and bijectivity onto `[0, m1·m2)` for all coprime pairs
/// up to `garner_max_modulus`.
pub fn garner_suite_with(budget: &Budget, garner: &GarnerFn) -> SuiteReport {
    let mut report = SuiteReport::new("garner crt");
    let top = budget.garner_max_modulus;
    for m1 in 1..=top {
        for m2 in (1..=top).filter(|&m2| gcd(m1, m2) == 1) {
            let mut hit = vec![false; (m1 * m2) as usize];
            for r1 in 0..m1 {
                for r2 in 0..m2 {
                    let ok = match garner(r1, r2, m1, m2) {
                        Ok(f) if f < m1 * m2 => {
                            f % m1 == r1
                                && f % m2 == r2
                                && !std::mem::replace(&mut hit[f as usize], true)
                        }
                        _ => false,
                    };
                    report.record(ok);
                }
            }
            report.record(hit.iter().all(|&h| h));
        }
    }
    report
}

pub fn garner_suite(budget: &Budget) -> SuiteReport {
    garner_suite_with(budget, &garner2)
}

/// `garner mod m3 = (u·r1 + v·r2) mod m3`: exhaustive on (10, 21, 6),
/// sampled on (1081, 1073, 667).
pub fn affine_suite_with(budget: &Budget, seed: u64, garner: &GarnerFn) -> SuiteReport {
    let mut report = SuiteReport::new("affine structure");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = ModuliConfig::new(10, 21, 6, 210).expect("valid moduli");
    let large = ModuliConfig::new(1081, 1073, 667, 1081 * 1073).expect("valid moduli");
    let mut check = |cfg: &ModuliConfig, r1: u64, r2: u64| {
        let ok = match (affine_coeffs(cfg), garner(r1, r2, cfg.m1, cfg.m2)) {
            (Ok(c), Ok(f)) => f % cfg.m3 == c.apply(r1, r2, cfg.m3),
            _ => false,
        };
        report.record(ok);
    };
    for r1 in 0..small.m1 {
        for r2 in 0..small.m2 {
            check(&small, r1, r2);
        }
    }
    for _ in 0..budget.affine_samples {
        let (r1, r2) = (rng.gen_range(0..large.m1), rng.gen_range(0..large.m2));
        check(&large, r1, r2);
    }
    report
}

pub fn affine_suite(budget: &Budget, seed: u64) -> SuiteReport {
    affine_suite_with(budget, seed, &garner2)
}

/// Goertzel magnitude against the naive DFT bin, relative error ≤ 1e-9.
pub fn goertzel_suite(budget: &Budget, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("goertzel exactness");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget.goertzel_cases {
        let n = rng.gen_range(1..=256);
        let f = rng.gen_range(0..n);
        let x = random_signal(n, &mut rng);
        let want = dft_naive(&x).coeffs()[f].norm();
        let ok = goertzel_mag(&x, f, &mut OpCounter::default())
            .map(|got| (got - want).abs() <= 1e-9 * want)
            .unwrap_or(false);
        report.record(ok);
    }
    report
}

/// `fft_any` against the naive DFT on lengths 1..=128 and the long moduli.
pub fn fft_suite(budget: &Budget, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("fft vs naive dft");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = if budget.random_signals >= 100 { 1 } else { 7 };
    let lengths = (1..=128).step_by(step).chain([667, 1073, 1081]);
    for n in lengths {
        let x = random_signal(n, &mut rng);
        let want = dft_naive(&x);
        let got = fft_any(&x, &mut OpCounter::default());
        let scale = want
            .coeffs()
            .iter()
            .map(|v| v.norm())
            .fold(1e-300, f64::max);
        let err = got
            .coeffs()
            .iter()
            .zip(want.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        report.record(err <= 1e-9 * scale);
    }
    report
}

/// The 16-sample two-tone walkthrough end to end.
pub fn toy_suite() -> SuiteReport {
    let mut report = SuiteReport::new("toy golden run");
    let run = || -> Result<bool> {
        let spec = SparseSpec::new(
            16,
            vec![
                Tone::new(3, Complex64::new(5.0, 0.0)),
                Tone::new(11, Complex64::new(3.0, 0.0)),
            ],
        )?;
        let cfg = HybridConfig::new(2, ModuliConfig::new(4, 3, 5, 16)?);
        let res = run_hybrid(&synthesize(&spec), &cfg)?;
        let freqs: Vec<u64> = res.candidates.iter().map(|c| c.freq).collect();
        Ok(res.path == ExecutionPath::Sparse
            && freqs == [3, 11]
            && res.peaks.len() == 2
            && res.peaks[0].freq == 3
            && (res.peaks[0].magnitude - 5.0).abs() < 1e-9
            && res.peaks[1].freq == 11
            && (res.peaks[1].magnitude - 3.0).abs() < 1e-9)
    };
    report.record(run().unwrap_or(false));
    report
}

pub fn run_all(budget: &Budget, seed: u64) -> Vec<SuiteReport> {
    vec![
        aliasing_suite(budget, seed),
        garner_suite(budget),
        affine_suite(budget, seed),
        goertzel_suite(budget, seed),
        fft_suite(budget, seed),
        toy_suite(),
    ]
}
