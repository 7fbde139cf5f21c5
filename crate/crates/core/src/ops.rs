//! Operation accounting.
//!
//! One op is one FFT butterfly, one Goertzel sample-iteration, or one CRT
//! pair reconstruction. FFTs are charged by the `n·log₂n` model regardless of
//! the internal algorithm, so counts are comparable across lengths.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign};

/// Componentwise operation counters. `total` is always the sum of the others.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    pub fft_butterflies: u64,
    pub goertzel_iterations: u64,
    pub crt_pair_ops: u64,
    pub total: u64,
}

impl OpCounter {
    pub fn add_fft(&mut self, ops: u64) {
        self.fft_butterflies += ops;
        self.total += ops;
    }

    pub fn add_goertzel(&mut self, ops: u64) {
        self.goertzel_iterations += ops;
        self.total += ops;
    }

    pub fn add_crt(&mut self, ops: u64) {
        self.crt_pair_ops += ops;
        self.total += ops;
    }

    pub fn is_consistent(&self) -> bool {
        self.fft_butterflies + self.goertzel_iterations + self.crt_pair_ops == self.total
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.fft_butterflies += rhs.fft_butterflies;
        self.goertzel_iterations += rhs.goertzel_iterations;
        self.crt_pair_ops += rhs.crt_pair_ops;
        self.total += rhs.total;
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(mut self, rhs: Self) -> Self::Output {
        self += rhs;
        self
    }
}

impl std::iter::Sum for OpCounter {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(OpCounter::default(), Add::add)
    }
}

/// Butterfly-model cost of an `n`-point FFT: `⌈n·log₂n⌉`, zero for `n < 2`.
pub fn fft_cost(n: usize) -> u64 {
    if n < 2 {
        return 0;
    }
    let n = n as f64;
    (n * n.log2()).ceil() as u64
}
