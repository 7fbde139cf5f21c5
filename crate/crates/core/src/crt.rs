//! Modular arithmetic for candidate reconstruction: inverses, two-residue
//! Garner CRT, the affine structure modulo `m3`, alias expansion, and the
//! 2-of-3 gate.

use crate::dft::SelectedBin;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

const MAX_PRODUCT: u64 = 1 << 63;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// The three view moduli for a signal of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliConfig {
    pub m1: u64,
    pub m2: u64,
    pub m3: u64,
    pub n: u64,
    /// `n / mᵢ` when `mᵢ | n`.
    pub d1: Option<u64>,
    pub d2: Option<u64>,
    pub d3: Option<u64>,
    /// `M = m1·m2`.
    pub product: u64,
    pub pairwise_coprime: bool,
    /// `m3 | m1·m2`, the regime where reconstruction is affine modulo `m3`.
    pub vulnerable: bool,
}

impl ModuliConfig {
    /// Validates `gcd(m1, m2) = 1`, positive moduli no larger than `n`, and
    /// `m1·m2 ≤ 2⁶³`. Divisibility of `n` is recorded, not required; see
    /// [`ModuliConfig::require_exact`].
    pub fn new(m1: u64, m2: u64, m3: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Configuration(
                "signal length must be positive".into(),
            ));
        }
        for (name, m) in [("m1", m1), ("m2", m2), ("m3", m3)] {
            if m == 0 || m > n {
                return Err(Error::Configuration(format!(
                    "{name} = {m} must lie in [1, {n}]"
                )));
            }
        }
        if gcd(m1, m2) != 1 {
            return Err(Error::Configuration(format!(
                "gcd(m1, m2) = gcd({m1}, {m2}) = {} != 1",
                gcd(m1, m2)
            )));
        }
        let product = m1
            .checked_mul(m2)
            .filter(|&p| p <= MAX_PRODUCT)
            .ok_or_else(|| Error::Overflow(format!("m1·m2 = {m1}·{m2} exceeds 2^63")))?;
        let stride = |m: u64| (n % m == 0).then(|| n / m);
        Ok(ModuliConfig {
            m1,
            m2,
            m3,
            n,
            d1: stride(m1),
            d2: stride(m2),
            d3: stride(m3),
            product,
            pairwise_coprime: gcd(m1, m3) == 1 && gcd(m2, m3) == 1,
            vulnerable: product % m3 == 0,
        })
    }

    pub fn moduli(&self) -> [u64; 3] {
        [self.m1, self.m2, self.m3]
    }

    pub fn strides(&self) -> [Option<u64>; 3] {
        [self.d1, self.d2, self.d3]
    }

    pub fn all_divide(&self) -> bool {
        self.strides().iter().all(Option::is_some)
    }

    /// Errors unless every modulus divides `n` (exact decimation).
    pub fn require_exact(&self) -> Result<()> {
        match self.moduli().into_iter().find(|m| self.n % m != 0) {
            Some(m) => Err(Error::Divisibility {
                n: self.n,
                divisor: m,
            }),
            None => Ok(()),
        }
    }
}

/// `γ = m1⁻¹ mod m2` and the coefficients of `f ≡ u·r1 + v·r2 (mod m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineCoeffs {
    pub gamma: u64,
    pub u: u64,
    pub v: u64,
}

impl AffineCoeffs {
    /// `(u·r1 + v·r2) mod m3`.
    pub fn apply(&self, r1: u64, r2: u64, m3: u64) -> u64 {
        (mul_mod(self.u, r1, m3) + mul_mod(self.v, r2, m3)) % m3
    }
}

/// A frequency admitted by the gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub freq: u64,
    pub est_magnitude: f64,
    /// The `(r1, r2)` residue pair it was reconstructed from.
    pub source: (u64, u64),
}

/// Modular inverse by the extended Euclidean algorithm; result in `[1, m)`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidArguments(format!(
            "modulus {m} must be at least 2"
        )));
    }
    let (mut old_r, mut r) = (i128::from(a % m), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NoInverse { a, modulus: m });
    }
    Ok(old_s.rem_euclid(i128::from(m)) as u64)
}

/// Precomputed two-modulus Garner reconstruction.
#[derive(Debug, Clone, Copy)]
pub struct Garner {
    m1: u64,
    m2: u64,
    gamma: u64,
}

impl Garner {
    pub fn new(m1: u64, m2: u64) -> Result<Self> {
        if m1 == 0 || m2 == 0 {
            return Err(Error::InvalidArguments("moduli must be positive".into()));
        }
        if gcd(m1, m2) != 1 {
            return Err(Error::NoInverse { a: m1, modulus: m2 });
        }
        m1.checked_mul(m2)
            .filter(|&p| p <= MAX_PRODUCT)
            .ok_or_else(|| Error::Overflow(format!("m1·m2 = {m1}·{m2} exceeds 2^63")))?;
        // every integer is its own class modulo 1
        let gamma = if m2 == 1 { 0 } else { mod_inverse(m1, m2)? };
        Ok(Garner { m1, m2, gamma })
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    /// `f = r1 + m1·[(r2 − r1)·γ mod m2]`; residues must already be reduced.
    pub fn reconstruct(&self, r1: u64, r2: u64) -> u64 {
        debug_assert!(r1 < self.m1 && r2 < self.m2);
        let diff = (r2 + self.m2 - r1 % self.m2) % self.m2;
        r1 + self.m1 * mul_mod(diff, self.gamma, self.m2)
    }

    pub fn checked_reconstruct(&self, r1: u64, r2: u64) -> Result<u64> {
        if r1 >= self.m1 || r2 >= self.m2 {
            return Err(Error::InvalidArguments(format!(
                "residues ({r1}, {r2}) outside [0, {}) × [0, {})",
                self.m1, self.m2
            )));
        }
        Ok(self.reconstruct(r1, r2))
    }
}

/// The unique `f ∈ [0, m1·m2)` with `f ≡ r1 (mod m1)` and `f ≡ r2 (mod m2)`.
pub fn garner2(r1: u64, r2: u64, m1: u64, m2: u64) -> Result<u64> {
    Garner::new(m1, m2)?.checked_reconstruct(r1, r2)
}

pub fn affine_coeffs(cfg: &ModuliConfig) -> Result<AffineCoeffs> {
    let garner = Garner::new(cfg.m1, cfg.m2)?;
    let gamma = garner.gamma();
    let m3 = cfg.m3;
    let v = mul_mod(cfg.m1, gamma, m3);
    let u = (1 % m3 + m3 - v) % m3;
    Ok(AffineCoeffs { gamma, u, v })
}

/// `f_base, f_base + M, f_base + 2M, …` restricted to `[0, n)`.
pub fn alias_expand(f_base: u64, modulus: u64, n: u64) -> Vec<u64> {
    aliases(f_base, modulus, n).collect()
}

fn aliases(f_base: u64, modulus: u64, n: u64) -> impl Iterator<Item = u64> {
    let step = modulus.max(1);
    std::iter::successors(Some(f_base), move |&f| f.checked_add(step)).take_while(move |&f| f < n)
}

/// Result of the 2-of-3 gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    /// One entry per admitted frequency, ascending.
    pub candidates: Vec<Candidate>,
    /// Admissions counted per (pair, alias), before deduplication.
    pub survivors: u64,
    /// Aliases whose residue modulo `m3` was absent from view 3.
    pub rejected: u64,
    /// Residue pairs reconstructed.
    pub pairs: u64,
}

/// Reconstructs every `(r1, r2) ∈ R1 × R2`, expands aliases into `[0, n)`,
/// and admits those whose residue modulo `m3` appears in `R3`. Magnitudes in
/// `R3` are ignored. Duplicate frequencies keep the largest estimate.
pub fn gate_candidates(
    r1: &[SelectedBin],
    r2: &[SelectedBin],
    r3: &[SelectedBin],
    cfg: &ModuliConfig,
) -> Result<GateOutcome> {
    let garner = Garner::new(cfg.m1, cfg.m2)?;
    let gate: HashSet<u64> = r3.iter().map(|b| b.residue).collect();
    let mut admitted: BTreeMap<u64, Candidate> = BTreeMap::new();
    let mut outcome = GateOutcome {
        candidates: Vec::new(),
        survivors: 0,
        rejected: 0,
        pairs: 0,
    };
    for a in r1 {
        for b in r2 {
            let base = garner.checked_reconstruct(a.residue, b.residue)?;
            outcome.pairs += 1;
            let est = a.magnitude.min(b.magnitude);
            for freq in aliases(base, cfg.product, cfg.n) {
                if !gate.contains(&(freq % cfg.m3)) {
                    outcome.rejected += 1;
                    continue;
                }
                outcome.survivors += 1;
                let entry = admitted.entry(freq).or_insert(Candidate {
                    freq,
                    est_magnitude: est,
                    source: (a.residue, b.residue),
                });
                if est > entry.est_magnitude {
                    entry.est_magnitude = est;
                    entry.source = (a.residue, b.residue);
                }
            }
        }
    }
    outcome.candidates = admitted.into_values().collect();
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bins(residues: &[u64]) -> Vec<SelectedBin> {
        residues
            .iter()
            .map(|&residue| SelectedBin {
                residue,
                magnitude: 1.0,
            })
            .collect()
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(1, 7).unwrap(), 1);
        assert_eq!(mod_inverse(10, 21).unwrap(), 19);
        assert_eq!((10 * 19) % 21, 1);
        assert_eq!(
            mod_inverse(4, 6),
            Err(Error::NoInverse { a: 4, modulus: 6 })
        );
        assert!(matches!(mod_inverse(3, 1), Err(Error::InvalidArguments(_))));
        assert_eq!(mod_inverse(1081, 1073).unwrap() * 1081 % 1073, 1);
    }

    #[test]
    fn garner_examples() {
        assert_eq!(garner2(3, 0, 4, 3).unwrap(), 3);
        assert_eq!(garner2(3, 2, 4, 3).unwrap(), 11);
        assert_eq!(garner2(0, 0, 1081, 1073).unwrap(), 0);
        assert!(matches!(garner2(0, 0, 4, 6), Err(Error::NoInverse { .. })));
        assert!(matches!(
            garner2(4, 0, 4, 3),
            Err(Error::InvalidArguments(_))
        ));
        assert_eq!(garner2(5, 0, 7, 1).unwrap(), 5);
    }

    #[test]
    fn garner_exhaustive_small() {
        for m1 in 1..=30u64 {
            for m2 in 1..=30u64 {
                if gcd(m1, m2) != 1 {
                    continue;
                }
                let g = Garner::new(m1, m2).unwrap();
                let mut hit = vec![false; (m1 * m2) as usize];
                for r1 in 0..m1 {
                    for r2 in 0..m2 {
                        let f = g.reconstruct(r1, r2);
                        assert!(f < m1 * m2);
                        assert_eq!((f % m1, f % m2), (r1, r2));
                        assert!(!std::mem::replace(&mut hit[f as usize], true));
                    }
                }
                assert!(hit.iter().all(|&h| h));
            }
        }
    }

    #[test]
    fn moduli_config_classification() {
        let toy = ModuliConfig::new(4, 3, 5, 16).unwrap();
        assert!(toy.pairwise_coprime);
        assert!(!toy.vulnerable);
        assert_eq!(toy.strides(), [Some(4), None, None]);
        assert!(toy.require_exact().is_err());

        let adv = ModuliConfig::new(10, 21, 6, 210).unwrap();
        assert!(adv.vulnerable);
        assert!(!adv.pairwise_coprime);
        assert_eq!(adv.strides(), [Some(21), Some(10), Some(35)]);
        assert_eq!(adv.product, 210);
        assert!(adv.require_exact().is_ok());

        assert!(matches!(
            ModuliConfig::new(4, 6, 5, 24),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            ModuliConfig::new(0, 3, 5, 16),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            ModuliConfig::new(17, 3, 5, 16),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            ModuliConfig::new(u64::MAX - 1, u64::MAX, 5, u64::MAX),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn affine_small_instance() {
        let cfg = ModuliConfig::new(10, 21, 6, 210).unwrap();
        let coeffs = affine_coeffs(&cfg).unwrap();
        assert_eq!(
            coeffs,
            AffineCoeffs {
                gamma: 19,
                u: 3,
                v: 4
            }
        );
        for r1 in 0..10 {
            for r2 in 0..21 {
                assert_eq!(
                    garner2(r1, r2, 10, 21).unwrap() % 6,
                    coeffs.apply(r1, r2, 6)
                );
            }
        }
    }

    #[test]
    fn affine_sum_is_one() {
        for (m1, m2, m3) in [(4, 3, 5), (10, 21, 6), (1081, 1073, 667), (7, 5, 1)] {
            let cfg = ModuliConfig::new(m1, m2, m3, m1 * m2).unwrap();
            let c = affine_coeffs(&cfg).unwrap();
            assert_eq!((c.u + c.v) % m3, 1 % m3);
            assert!(c.u < m3 && c.v < m3);
            assert_eq!((m1 * c.gamma) % m2, 1 % m2);
        }
    }

    #[test]
    fn affine_prime_structure() {
        // m3 = g1·g2 = 23·29
        let cfg = ModuliConfig::new(1081, 1073, 667, 1081 * 1073).unwrap();
        let c = affine_coeffs(&cfg).unwrap();
        assert_eq!((c.u % 23, c.u % 29), (1, 0));
        assert_eq!((c.v % 23, c.v % 29), (0, 1));
    }

    #[test]
    fn alias_examples() {
        assert_eq!(alias_expand(3, 12, 16), vec![3, 15]);
        assert_eq!(alias_expand(11, 12, 16), vec![11]);
        assert_eq!(alias_expand(0, 16, 16), vec![0]);
        assert!(alias_expand(20, 12, 16).is_empty());
        assert_eq!(alias_expand(1, 5, 17).len(), 4);
    }

    #[test]
    fn toy_gate() {
        let cfg = ModuliConfig::new(4, 3, 5, 16).unwrap();
        let out = gate_candidates(&bins(&[3]), &bins(&[0, 2]), &bins(&[3, 1]), &cfg).unwrap();
        let freqs: Vec<u64> = out.candidates.iter().map(|c| c.freq).collect();
        assert_eq!(freqs, vec![3, 11]);
        assert_eq!(out.survivors, 2);
        assert_eq!(out.rejected, 1);
        assert_eq!(out.pairs, 2);
    }

    #[test]
    fn empty_gate_set_rejects_everything() {
        let cfg = ModuliConfig::new(4, 3, 5, 16).unwrap();
        let out = gate_candidates(&bins(&[3]), &bins(&[0, 2]), &[], &cfg).unwrap();
        assert!(out.candidates.is_empty());
        assert_eq!(out.survivors, 0);
    }

    #[test]
    fn degenerate_adversarial_gate() {
        let cfg = ModuliConfig::new(10, 21, 6, 210).unwrap();
        let out = gate_candidates(
            &bins(&[0, 2, 4, 6]),
            &bins(&[0, 18, 15, 12]),
            &bins(&[0]),
            &cfg,
        )
        .unwrap();
        assert_eq!(out.survivors, 16);
        assert_eq!(out.candidates.len(), 16);
        assert!(out.candidates.iter().all(|c| c.freq % 6 == 0));
    }

    #[test]
    fn dedup_keeps_max_estimate() {
        // m2 = 1 makes every r2 reconstruct to r1, so both pairs collide
        let cfg = ModuliConfig::new(4, 1, 2, 8).unwrap();
        let r1 = vec![SelectedBin {
            residue: 1,
            magnitude: 3.0,
        }];
        let r2 = vec![SelectedBin {
            residue: 0,
            magnitude: 2.0,
        }];
        let out = gate_candidates(&r1, &r2, &bins(&[1]), &cfg).unwrap();
        let freqs: Vec<u64> = out.candidates.iter().map(|c| c.freq).collect();
        assert_eq!(freqs, vec![1, 5]);
        assert!(out.candidates.iter().all(|c| c.est_magnitude == 2.0));
    }

    proptest! {
        #[test]
        fn affine_identity_when_vulnerable(g1 in 1u64..12, g2 in 1u64..12, a in 1u64..12, b in 1u64..12, r1s in any::<u64>(), r2s in any::<u64>()) {
            let m1 = g1 * a;
            let m2 = g2 * b;
            prop_assume!(gcd(m1, m2) == 1);
            let m3 = g1 * g2;
            let cfg = ModuliConfig::new(m1, m2, m3, m1 * m2).unwrap();
            prop_assert!(cfg.vulnerable);
            let c = affine_coeffs(&cfg).unwrap();
            let (r1, r2) = (r1s % m1, r2s % m2);
            prop_assert_eq!(garner2(r1, r2, m1, m2).unwrap() % m3, c.apply(r1, r2, m3));
        }

        #[test]
        fn gate_output_is_sound(
            m1 in 2u64..9, m2 in 2u64..9, m3 in 2u64..9, mult in 1u64..4,
            r1 in proptest::collection::btree_set(0u64..9, 0..5),
            r2 in proptest::collection::btree_set(0u64..9, 0..5),
            r3 in proptest::collection::btree_set(0u64..9, 0..5),
        ) {
            prop_assume!(gcd(m1, m2) == 1);
            let n = m1 * m2 * mult;
            prop_assume!(m3 <= n);
            let cfg = ModuliConfig::new(m1, m2, m3, n).unwrap();
            let r1: Vec<u64> = r1.into_iter().filter(|&r| r < m1).collect();
            let r2: Vec<u64> = r2.into_iter().filter(|&r| r < m2).collect();
            let r3: Vec<u64> = r3.into_iter().filter(|&r| r < m3).collect();
            let out = gate_candidates(&bins(&r1), &bins(&r2), &bins(&r3), &cfg).unwrap();
            for c in &out.candidates {
                prop_assert!(c.freq < n);
                prop_assert!(r3.contains(&(c.freq % m3)));
                prop_assert!(r1.contains(&(c.freq % m1)));
                prop_assert!(r2.contains(&(c.freq % m2)));
            }
            prop_assert!(out.candidates.windows(2).all(|w| w[0].freq < w[1].freq));
            prop_assert!(out.survivors >= out.candidates.len() as u64);
            prop_assert_eq!(out.pairs, (r1.len() * r2.len()) as u64);
        }
    }
}
