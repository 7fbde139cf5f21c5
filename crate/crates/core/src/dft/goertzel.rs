//! Goertzel single-bin evaluation with complex state.

use crate::error::{Error, Result};
use crate::ops::OpCounter;
use crate::signal::Signal;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Exact DFT coefficient `X[f]` by the second-order Goertzel recurrence.
///
/// The filter output `y = s[N-1] - e^{-jω}·s[N-2]` equals `e^{jω(N-1)}·X[f]`,
/// so the phase is rotated back before returning.
pub fn goertzel_bin(x: &Signal, f: usize) -> Result<Complex64> {
    let n = x.len();
    if f >= n {
        return Err(Error::InvalidArguments(format!("bin {f} outside [0, {n})")));
    }
    let omega = TAU * f as f64 / n as f64;
    let (sin_w, cos_w) = omega.sin_cos();
    let coeff = 2.0 * cos_w;

    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    for &sample in x.samples() {
        let s0 = sample + s1 * coeff - s2;
        s2 = s1;
        s1 = s0;
    }
    let y = s1 - Complex64::new(cos_w, -sin_w) * s2;

    // e^{-jω(N-1)} with the exponent reduced mod N
    let turns = ((f as u128 * (n as u128 - 1)) % n as u128) as f64;
    let rotate = Complex64::from_polar(1.0, -TAU * turns / n as f64);
    Ok(y * rotate)
}

/// `|X[f]|` in O(N); charges N Goertzel iterations.
pub fn goertzel_mag(x: &Signal, f: usize, ops: &mut OpCounter) -> Result<f64> {
    let bin = goertzel_bin(x, f)?;
    ops.add_goertzel(x.len() as u64);
    Ok(bin.norm())
}
