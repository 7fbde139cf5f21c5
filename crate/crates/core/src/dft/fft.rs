//! Radix-2 and Bluestein chirp-z transforms.

use crate::signal::unit_roots;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Lengths below this are evaluated by the direct sum.
pub(crate) const DIRECT_CUTOFF: usize = 64;

/// Forward DFT of any length. Dispatches to the direct sum, radix-2, or
/// Bluestein depending on `data.len()`.
pub(crate) fn transform(data: &[Complex64]) -> Vec<Complex64> {
    let n = data.len();
    if n < DIRECT_CUTOFF {
        direct(data)
    } else if n.is_power_of_two() {
        let mut buf = data.to_vec();
        radix2(&mut buf, false);
        buf
    } else {
        bluestein(data)
    }
}

fn direct(data: &[Complex64]) -> Vec<Complex64> {
    let n = data.len();
    let roots = unit_roots(n, -1.0);
    (0..n)
        .map(|f| {
            let mut idx = 0usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for &x in data {
                acc += x * roots[idx];
                idx += f;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// In-place iterative Cooley-Tukey. `buf.len()` must be a power of two.
/// The inverse is unscaled.
pub(crate) fn radix2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let roots = half_roots(n, sign);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (i, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = *b * roots[i * step];
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
}

fn half_roots(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n / 2)
        .map(|i| {
            let (s, c) = (2.0 * PI * i as f64 / n as f64).sin_cos();
            Complex64::new(c, sign * s)
        })
        .collect()
}

/// Chirp-z evaluation of an arbitrary-length DFT through a power-of-two
/// circular convolution of length at least `2n - 1`.
pub(crate) fn bluestein(data: &[Complex64]) -> Vec<Complex64> {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();

    // chirp[k] = e^{-jπk²/n}; k² reduced mod 2n keeps the angle exact.
    let two_n = 2 * n as u128;
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k = k as u128;
            let r = (k * k) % two_n;
            let (s, c) = (PI * r as f64 / n as f64).sin_cos();
            Complex64::new(c, -s)
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for ((slot, &x), &w) in a.iter_mut().zip(data).zip(&chirp) {
        *slot = x * w;
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        let w = chirp[k].conj();
        b[k] = w;
        b[m - k] = w;
    }

    radix2(&mut a, false);
    radix2(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    radix2(&mut a, true);

    let scale = 1.0 / m as f64;
    a.truncate(n);
    a.iter_mut()
        .zip(&chirp)
        .for_each(|(x, &w)| *x = *x * w * scale);
    a
}
