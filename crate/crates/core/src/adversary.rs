//! Adversarial inputs for 3-view gating under non-pairwise-coprime moduli.
//!
//! With `gcd(m1, m2) = 1` and `m3 | m1·m2`, reconstruction reduces to the
//! affine map `(u·r1 + v·r2) mod m3`. Residue sets built as arithmetic
//! progressions with `u·dA ≡ v·dB (mod m3)` make the gated residue depend
//! only on `i − j`. Under these hypotheses the congruence forces
//! `g1 | dA` and `g2 | dB`, hence `L ≡ 0`, and every one of the `k²` pairs
//! lands on the same view-3 residue.

use crate::crt::{affine_coeffs, gcd, Garner, ModuliConfig};
use crate::error::{Error, Result};
use crate::signal::{synthesize, Signal, SparseSpec, Tone};
use crate::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `m1 = g1·m1p`, `m2 = g2·m2p`, `m3 = g1·g2` over `n` (default `m1·m2`).
pub fn build_moduli(g1: u64, g2: u64, m1p: u64, m2p: u64, n: Option<u64>) -> Result<ModuliConfig> {
    let primes = [g1, g2, m1p, m2p];
    if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::InvalidArguments(format!("{p} is not prime")));
    }
    if primes.iter().collect::<BTreeSet<_>>().len() != primes.len() {
        return Err(Error::InvalidArguments(format!(
            "primes must be distinct: {primes:?}"
        )));
    }
    let overflow = || Error::Overflow("moduli product exceeds 2^63".into());
    let m1 = g1.checked_mul(m1p).ok_or_else(overflow)?;
    let m2 = g2.checked_mul(m2p).ok_or_else(overflow)?;
    let m3 = g1.checked_mul(g2).ok_or_else(overflow)?;
    let n = match n {
        Some(n) => n,
        None => m1.checked_mul(m2).ok_or_else(overflow)?,
    };
    let cfg = ModuliConfig::new(m1, m2, m3, n)?;
    cfg.require_exact()?;
    Ok(cfg)
}

/// Everything needed to reproduce one adversarial instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialPlan {
    pub moduli: ModuliConfig,
    pub k: usize,
    pub a0: u64,
    pub b0: u64,
    /// Progression step in view 1 (`dA`).
    pub step_a: u64,
    /// Progression step in view 2 (`dB`).
    pub step_b: u64,
    pub u: u64,
    pub v: u64,
    /// Admitted index differences `i − π(i)`.
    pub differences: Vec<i64>,
    /// `pairing[i] = π(i)`.
    pub pairing: Vec<usize>,
    /// `(u·a0 + v·b0) mod m3`.
    pub base: u64,
    /// `L = (u·dA) mod m3`.
    pub residue_step: u64,
    pub r1_set: Vec<u64>,
    pub r2_set: Vec<u64>,
    pub r3_set: Vec<u64>,
    pub true_freqs: Vec<u64>,
}

impl AdversarialPlan {
    pub fn a(&self, i: usize) -> u64 {
        self.r1_set[i]
    }

    pub fn b(&self, j: usize) -> u64 {
        self.r2_set[j]
    }
}

/// `{0, +1, −1, +2, −2, …}` truncated to `k` entries, ascending.
pub fn symmetric_differences(k: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(k);
    if k > 0 {
        out.push(0);
    }
    let mut d = 1i64;
    while out.len() < k {
        out.push(d);
        if out.len() < k {
            out.push(-d);
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn progression_is_distinct(step: u64, modulus: u64, k: usize) -> bool {
    // i·step mod m has period m / gcd(step, m)
    (k as u64) <= modulus / gcd(step, modulus)
}

/// Aligned arithmetic-progression residue sets on a vulnerable
/// configuration, with the lexicographically smallest `(dA, dB)` that
/// satisfies the step congruence and keeps both progressions distinct.
pub fn build_aligned_sets(
    cfg: &ModuliConfig,
    k: usize,
    a0: u64,
    b0: u64,
) -> Result<AdversarialPlan> {
    if !cfg.vulnerable {
        return Err(Error::Construction(format!(
            "m3 = {} does not divide m1·m2 = {}",
            cfg.m3, cfg.product
        )));
    }
    if a0 >= cfg.m1 || b0 >= cfg.m2 {
        return Err(Error::InvalidArguments(format!(
            "base residues ({a0}, {b0}) outside [0, {}) × [0, {})",
            cfg.m1, cfg.m2
        )));
    }
    let coeffs = affine_coeffs(cfg)?;
    let (m1, m2, m3) = (cfg.m1, cfg.m2, cfg.m3);
    let (u, v) = (coeffs.u, coeffs.v);
    let mul = |a: u64, b: u64, m: u64| ((a as u128 * b as u128) % m as u128) as u64;

    let (step_a, step_b) = (1..m1.max(2))
        .filter(|&da| progression_is_distinct(da, m1, k))
        .find_map(|da| {
            let lhs = mul(u, da, m3);
            (1..m2.max(2))
                .find(|&db| mul(v, db, m3) == lhs && progression_is_distinct(db, m2, k))
                .map(|db| (da, db))
        })
        .ok_or_else(|| {
            Error::Construction(format!(
                "no step sizes give {k} distinct aligned residues modulo ({m1}, {m2})"
            ))
        })?;

    let residue_step = mul(u, step_a, m3);
    let base = (mul(u, a0, m3) + mul(v, b0, m3)) % m3;
    let differences = if residue_step == 0 {
        if k > 0 {
            vec![0]
        } else {
            Vec::new()
        }
    } else {
        symmetric_differences(k)
    };
    let r1_set: Vec<u64> = (0..k as u64)
        .map(|i| ((a0 as u128 + i as u128 * step_a as u128) % m1 as u128) as u64)
        .collect();
    let r2_set: Vec<u64> = (0..k as u64)
        .map(|j| {
            let back = mul(j, step_b, m2);
            (b0 + m2 - back) % m2
        })
        .collect();
    let r3_set: Vec<u64> = differences
        .iter()
        .map(|&s| {
            let shift = mul(s.unsigned_abs(), residue_step, m3);
            if s >= 0 {
                (base + shift) % m3
            } else {
                (base + m3 - shift) % m3
            }
        })
        .collect::<BTreeSet<u64>>()
        .into_iter()
        .collect();
    let pairing: Vec<usize> = (0..k).collect();
    let garner = Garner::new(m1, m2)?;
    let true_freqs = pairing
        .iter()
        .enumerate()
        .map(|(i, &j)| garner.reconstruct(r1_set[i], r2_set[j]))
        .collect();

    Ok(AdversarialPlan {
        moduli: *cfg,
        k,
        a0,
        b0,
        step_a,
        step_b,
        u,
        v,
        differences,
        pairing,
        base,
        residue_step,
        r1_set,
        r2_set,
        r3_set,
        true_freqs,
    })
}

/// `Σ_{d∈S} (k − |d|)`; differences with `|d| ≥ k` contribute nothing.
pub fn predict_survivors_formula(k: usize, differences: &[i64]) -> u64 {
    differences
        .iter()
        .map(|d| (k as u64).saturating_sub(d.unsigned_abs()))
        .sum()
}

/// `k²`: every pair survives when all pairs share one view-3 residue.
pub fn predict_survivors_degenerate(k: usize) -> u64 {
    (k as u64).pow(2)
}

/// Unit-amplitude, zero-phase tones at the plan's true frequencies.
pub fn synthesize_adversarial(plan: &AdversarialPlan) -> Result<Signal> {
    let n = usize::try_from(plan.moduli.n)
        .map_err(|_| Error::InvalidArguments("signal length too large".into()))?;
    let tones = plan
        .true_freqs
        .iter()
        .map(|&f| Tone::new(f as usize, Complex64::new(1.0, 0.0)))
        .collect();
    Ok(synthesize(&SparseSpec::new(n, tones)?))
}

/// Exhaustive count of pairs `(a_i, b_j)` whose reconstruction lands in
/// `r3_set`.
pub fn count_survivors_oracle(plan: &AdversarialPlan) -> Result<u64> {
    let cfg = &plan.moduli;
    let garner = Garner::new(cfg.m1, cfg.m2)?;
    let gate: BTreeSet<u64> = plan.r3_set.iter().copied().collect();
    let mut count = 0;
    for &a in &plan.r1_set {
        for &b in &plan.r2_set {
            if gate.contains(&(garner.reconstruct(a, b) % cfg.m3)) {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crt::garner2;
    use proptest::prelude::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1081));
    }

    #[test]
    fn moduli_examples() {
        let big = build_moduli(23, 29, 47, 37, None).unwrap();
        assert_eq!(big.moduli(), [1081, 1073, 667]);
        assert_eq!(big.n, 1_159_913);
        assert_eq!(big.d3, Some(1739));
        assert!(big.vulnerable && !big.pairwise_coprime);

        let small = build_moduli(2, 3, 5, 7, None).unwrap();
        assert_eq!(small.moduli(), [10, 21, 6]);
        assert_eq!(small.n, 210);
        assert_eq!(small.strides(), [Some(21), Some(10), Some(35)]);

        assert!(matches!(
            build_moduli(2, 2, 5, 7, None),
            Err(Error::InvalidArguments(_))
        ));
        assert!(matches!(
            build_moduli(2, 4, 5, 7, None),
            Err(Error::InvalidArguments(_))
        ));
        assert!(build_moduli(2, 3, 5, 7, Some(420)).is_ok());
        assert!(matches!(
            build_moduli(2, 3, 5, 7, Some(211)),
            Err(Error::Divisibility { .. }) | Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn aligned_sets_small() {
        let cfg = build_moduli(2, 3, 5, 7, None).unwrap();
        let plan = build_aligned_sets(&cfg, 4, 0, 0).unwrap();
        assert_eq!((plan.step_a, plan.step_b), (2, 3));
        assert_eq!((plan.u, plan.v), (3, 4));
        assert_eq!(plan.residue_step, 0);
        assert_eq!(plan.base, 0);
        assert_eq!(plan.r1_set, vec![0, 2, 4, 6]);
        assert_eq!(plan.r2_set, vec![0, 18, 15, 12]);
        assert_eq!(plan.r3_set, vec![0]);
        assert_eq!(plan.differences, vec![0]);
        assert_eq!(count_survivors_oracle(&plan).unwrap(), 16);
    }

    #[test]
    fn aligned_sets_single_tone() {
        let cfg = build_moduli(2, 3, 5, 7, None).unwrap();
        let plan = build_aligned_sets(&cfg, 1, 3, 5).unwrap();
        assert_eq!(plan.true_freqs.len(), 1);
        assert_eq!(plan.true_freqs[0], garner2(3, 5, 10, 21).unwrap());
        assert_eq!(count_survivors_oracle(&plan).unwrap(), 1);
    }

    #[test]
    fn aligned_sets_infeasible() {
        let cfg = build_moduli(2, 3, 5, 7, None).unwrap();
        assert!(matches!(
            build_aligned_sets(&cfg, 6, 0, 0),
            Err(Error::Construction(_))
        ));
        let coprime = ModuliConfig::new(4, 3, 5, 60).unwrap();
        assert!(matches!(
            build_aligned_sets(&coprime, 2, 0, 0),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn formula_examples() {
        let s12: Vec<i64> = vec![-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6];
        assert_eq!(symmetric_differences(12), s12);
        assert_eq!(predict_survivors_formula(12, &s12), 108);
        assert_eq!(predict_survivors_formula(1, &[0]), 1);
        assert_eq!(predict_survivors_formula(5, &[-2, -1, 0, 1, 2]), 19);
        assert_eq!(predict_survivors_degenerate(2), 4);
        assert_eq!(predict_survivors_degenerate(0), 0);
        assert!(predict_survivors_degenerate(12) >= predict_survivors_formula(12, &s12));
    }

    #[test]
    fn formula_matches_pair_enumeration() {
        for k in 1..=20usize {
            let s = symmetric_differences(k);
            let brute = (0..k as i64)
                .flat_map(|i| (0..k as i64).map(move |j| i - j))
                .filter(|d| s.contains(d))
                .count() as u64;
            assert_eq!(predict_survivors_formula(k, &s), brute, "k={k}");
            // k + 2·Σ_{d=1}^{⌊k/2⌋}(k−d) lower-bounds ⌈3k²/4⌉ − k up to the odd-k remainder
            assert!(4 * brute + 4 * k as u64 >= 3 * (k as u64).pow(2), "k={k}");
        }
    }

    #[test]
    fn large_plan_structure() {
        let cfg = build_moduli(23, 29, 47, 37, None).unwrap();
        let plan = build_aligned_sets(&cfg, 12, 0, 0).unwrap();
        assert_eq!((plan.step_a, plan.step_b), (23, 29));
        assert_eq!(plan.residue_step, 0);
        assert_eq!(count_survivors_oracle(&plan).unwrap(), 144);
        assert!(144 >= predict_survivors_formula(12, &symmetric_differences(12)));
    }

    #[test]
    fn synthesized_plan_has_unit_tones() {
        let cfg = build_moduli(2, 3, 5, 7, None).unwrap();
        let plan = build_aligned_sets(&cfg, 4, 0, 0).unwrap();
        let x = synthesize_adversarial(&plan).unwrap();
        assert_eq!(x.len(), 210);
        let spectrum = crate::signal::dft_naive(&x);
        for (f, v) in spectrum.coeffs().iter().enumerate() {
            let want = if plan.true_freqs.contains(&(f as u64)) {
                1.0
            } else {
                0.0
            };
            assert!((v.norm() - want).abs() < 1e-12);
        }
        let empty = build_aligned_sets(&cfg, 0, 0, 0).unwrap();
        assert!(synthesize_adversarial(&empty)
            .unwrap()
            .samples()
            .iter()
            .all(|s| s.norm() == 0.0));
        assert_eq!(count_survivors_oracle(&empty).unwrap(), 0);
    }

    #[test]
    fn plan_json_round_trip() {
        let cfg = build_moduli(2, 3, 5, 7, None).unwrap();
        let plan = build_aligned_sets(&cfg, 3, 1, 2).unwrap();
        let json = serde_json::to_string(&plan).unwrap();
        let back: AdversarialPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(plan, back);
    }

    fn prime_quads() -> impl Strategy<Value = (u64, u64, u64, u64)> {
        let primes = vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23];
        proptest::sample::subsequence(primes, 4)
            .prop_shuffle()
            .prop_map(|p| (p[0], p[1], p[2], p[3]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn plan_invariants((g1, g2, p1, p2) in prime_quads(), k in 1usize..8, a0s in any::<u64>(), b0s in any::<u64>()) {
            let cfg = build_moduli(g1, g2, p1, p2, None).unwrap();
            let (a0, b0) = (a0s % cfg.m1, b0s % cfg.m2);
            let Ok(plan) = build_aligned_sets(&cfg, k, a0, b0) else {
                prop_assert!(k as u64 > p1.min(p2));
                return Ok(());
            };
            let m3 = cfg.m3;
            prop_assert_eq!((plan.u * plan.step_a) % m3, (plan.v * plan.step_b) % m3);
            prop_assert_eq!(plan.residue_step, 0);
            prop_assert_eq!(plan.step_a % g1, 0);
            prop_assert_eq!(plan.step_b % g2, 0);
            prop_assert_eq!(plan.r1_set.iter().collect::<BTreeSet<_>>().len(), k);
            prop_assert_eq!(plan.r2_set.iter().collect::<BTreeSet<_>>().len(), k);
            prop_assert_eq!(plan.true_freqs.iter().collect::<BTreeSet<_>>().len(), k);
            for (i, &j) in plan.pairing.iter().enumerate() {
                prop_assert!(plan.differences.contains(&(i as i64 - j as i64)));
            }
            // affine consistency: φ(a_i, b_j) = base + (i − j)·L
            for i in 0..k {
                for j in 0..k {
                    let f = garner2(plan.a(i), plan.b(j), cfg.m1, cfg.m2).unwrap();
                    let expect = (plan.base as i64 + (i as i64 - j as i64) * plan.residue_step as i64)
                        .rem_euclid(m3 as i64) as u64;
                    prop_assert_eq!(f % m3, expect);
                }
            }
            let survivors = count_survivors_oracle(&plan).unwrap();
            prop_assert_eq!(survivors, predict_survivors_degenerate(k));
            prop_assert!(survivors >= predict_survivors_formula(k, &plan.differences));
            for &f in &plan.true_freqs {
                prop_assert!(plan.r3_set.contains(&(f % m3)));
            }
        }
    }
}
