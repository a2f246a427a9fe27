//! Mollifier Dirichlet polynomials: a decreasing ladder of even lengths ℓ_j,
//! disjoint prime blocks P_j, block sums 𝒫_j(χ) = Σ_{p∈P_j} χ(p)/√p, and the
//! truncated exponentials 𝒩_j(χ, α) = E_{ℓ_j}(α 𝒫_j(χ)) whose product forms
//! the mollifier. The 𝒬_j factors cover the regime where a block sum is too
//! large for the exponential truncation.

use num_complex::Complex64;
use thiserror::Error;

use crate::characters::PrimitiveCharacter;
use crate::kahan::Neumaier;
use crate::sieve::primes_up_to;
use crate::symbols::root_of_unity;

#[derive(Debug, Error, PartialEq)]
pub enum MollifierError {
    #[error("the ladder is empty at this X (no ℓ_1 > 10^M)")]
    EmptyLadder,
    #[error("invalid ladder {0}")]
    InvalidLadder(String),
}

/// E_ℓ(x) = Σ_{j=0}^{⌈ℓ⌉} x^j / j!, the truncated exponential.
pub fn truncated_exponential(ell: f64, z: Complex64) -> Complex64 {
    assert!(ell >= 0.0);
    let degree = ell.ceil() as u32;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for j in 1..=degree {
        term *= z / j as f64;
        sum += term;
    }
    sum
}

/// Ladder, prime blocks and the k-dependent exponent r_k.
#[derive(Debug, Clone)]
pub struct MollifierConfig {
    /// Ambient X defining the block boundaries X^{1/ℓ_j²}.
    pub x: f64,
    /// ℓ_1 > ℓ_2 > … > ℓ_R, even, with ℓ_j > ℓ_{j+1}².
    pub ladder: Vec<u32>,
    /// Odd primes per block: P_1 ≤ X^{1/ℓ_1²}, P_j ⊂ (X^{1/ℓ_{j-1}²}, X^{1/ℓ_j²}].
    pub blocks: Vec<Vec<u64>>,
}

impl MollifierConfig {
    /// The ladder recurrence ℓ_1 = 2⌈N ln ln X⌉, ℓ_{j+1} = 2⌈N ln ℓ_j⌉,
    /// extended while the next rung stays above 10^M and below ℓ_j^{1/2}.
    pub fn from_recurrence(x: f64, big_n: u32, big_m: u32) -> Result<Self, MollifierError> {
        if x <= std::f64::consts::E {
            return Err(MollifierError::EmptyLadder); // ln ln X undefined
        }
        let floor = 10f64.powi(big_m as i32);
        let ell1 = 2 * (big_n as f64 * x.ln().ln()).ceil().max(1.0) as u32;
        if (ell1 as f64) <= floor {
            return Err(MollifierError::EmptyLadder);
        }
        let mut ladder = vec![ell1];
        loop {
            let prev = *ladder.last().unwrap();
            let next = 2 * (big_n as f64 * (prev as f64).ln()).ceil() as u32;
            if (next as f64) <= floor || prev <= next * next {
                break;
            }
            ladder.push(next);
        }
        Self::with_ladder(x, ladder)
    }

    /// Explicit override ladder; validated against the same conditions the
    /// recurrence guarantees asymptotically: even entries, ℓ_j > ℓ_{j+1}²,
    /// and Σ 1/ℓ_j ≤ 2/ℓ_R.
    pub fn with_ladder(x: f64, ladder: Vec<u32>) -> Result<Self, MollifierError> {
        if ladder.is_empty() {
            return Err(MollifierError::EmptyLadder);
        }
        for &ell in &ladder {
            if ell == 0 || ell % 2 != 0 {
                return Err(MollifierError::InvalidLadder(format!(
                    "entries must be positive and even, got {ell}"
                )));
            }
        }
        for w in ladder.windows(2) {
            if w[0] <= w[1] * w[1] {
                return Err(MollifierError::InvalidLadder(format!(
                    "need ℓ_j > ℓ_(j+1)², got {} ≤ {}²",
                    w[0], w[1]
                )));
            }
        }
        let inv_sum: f64 = ladder.iter().map(|&l| 1.0 / l as f64).sum();
        let last = *ladder.last().unwrap() as f64;
        if inv_sum > 2.0 / last + 1e-15 {
            return Err(MollifierError::InvalidLadder(format!(
                "Σ 1/ℓ_j = {inv_sum} exceeds 2/ℓ_R = {}",
                2.0 / last
            )));
        }
        let blocks = build_blocks(x, &ladder);
        Ok(Self { x, ladder, blocks })
    }

    pub fn depth(&self) -> usize {
        self.ladder.len()
    }
}

/// r_k = ⌈k/(2k−1)⌉ + 2, defined for k > 1/2.
pub fn r_k_exponent(k: f64) -> u32 {
    assert!(k > 0.5, "r_k needs k > 1/2, got {k}");
    (k / (2.0 * k - 1.0)).ceil() as u32 + 2
}

/// Block boundaries X^{1/ℓ²}; p = 2 is excluded everywhere (the first block
/// is defined over odd primes, and the later intervals only dip that low at
/// desk scale where the same convention is kept).
fn build_blocks(x: f64, ladder: &[u32]) -> Vec<Vec<u64>> {
    let bound = |ell: u32| x.powf(1.0 / (ell as f64 * ell as f64));
    let top = bound(ladder[ladder.len() - 1]).floor() as u64;
    let primes = primes_up_to(top);
    let mut blocks = Vec::with_capacity(ladder.len());
    let mut lo = 1.0f64;
    for &ell in ladder {
        let hi = bound(ell);
        blocks.push(
            primes
                .iter()
                .copied()
                .filter(|&p| p != 2 && (p as f64) > lo && (p as f64) <= hi)
                .collect(),
        );
        lo = hi;
    }
    blocks
}

/// 𝒫_j(χ) for every block: symbol exponents bucketed exactly, one compensated
/// accumulator per root-of-unity class.
pub fn block_prime_sums(chi: &PrimitiveCharacter, cfg: &MollifierConfig) -> Vec<Complex64> {
    let d = chi.family.symbol_order() as usize;
    cfg.blocks
        .iter()
        .map(|block| {
            let mut buckets = vec![Neumaier::new(); d];
            for &p in block {
                if let Some(exp) = chi.eval_symbol(p as i64).exponent() {
                    buckets[exp as usize].add(1.0 / (p as f64).sqrt());
                }
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, b) in buckets.iter().enumerate() {
                acc += root_of_unity(d as u8, j as u8) * b.value();
            }
            acc
        })
        .collect()
}

/// 𝒩(χ, α) = ∏_j E_{ℓ_j}(α 𝒫_j(χ)) from precomputed block sums.
pub fn mollifier_from_sums(sums: &[Complex64], ladder: &[u32], alpha: f64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (z, &ell) in sums.iter().zip(ladder) {
        acc *= truncated_exponential(ell as f64, alpha * z);
    }
    acc
}

/// 𝒩(χ, α), evaluating the block sums on the fly.
pub fn mollifier_value(
    chi: &PrimitiveCharacter,
    cfg: &MollifierConfig,
    alpha: f64,
) -> Result<Complex64, MollifierError> {
    if cfg.ladder.is_empty() {
        return Err(MollifierError::EmptyLadder);
    }
    let sums = block_prime_sums(chi, cfg);
    Ok(mollifier_from_sums(&sums, &cfg.ladder, alpha))
}

/// 𝒬_j(χ, k) = (12k² 𝒫_j(χ)/ℓ_j)^{r_k ℓ_j} per block (the sentinel
/// 𝒬_{R+1} = 1 is the caller's empty-product convention).
pub fn q_factors_from_sums(sums: &[Complex64], ladder: &[u32], k: f64) -> Vec<Complex64> {
    let rk = r_k_exponent(k);
    sums.iter()
        .zip(ladder)
        .map(|(z, &ell)| (12.0 * k * k * z / ell as f64).powu(rk * ell))
        .collect()
}

/// 𝒬_j(χ, k) for every block.
pub fn q_factor_value(
    chi: &PrimitiveCharacter,
    cfg: &MollifierConfig,
    k: f64,
) -> Result<Vec<Complex64>, MollifierError> {
    if cfg.ladder.is_empty() {
        return Err(MollifierError::EmptyLadder);
    }
    let sums = block_prime_sums(chi, cfg);
    Ok(q_factors_from_sums(&sums, &cfg.ladder, k))
}

// Printed auxiliary functions of the divisor-sum expansion; exercised through
// the two-form equivalence test.

/// w(n) = ∏ α! over the prime powers p^α exactly dividing n.
pub fn w_weight(factored: &[(u64, u32)]) -> f64 {
    factored
        .iter()
        .map(|&(_, e)| (1..=e as u64).map(|t| t as f64).product::<f64>())
        .product()
}

/// Ω(n): number of prime factors counted with multiplicity.
pub fn big_omega(factored: &[(u64, u32)]) -> u32 {
    factored.iter().map(|&(_, e)| e).sum()
}

/// b_j(n) = 1 iff n is composed of at most ℓ primes, all from the block.
pub fn b_indicator(factored: &[(u64, u32)], block: &[u64], ell: u32) -> bool {
    big_omega(factored) <= ell && factored.iter().all(|(p, _)| block.contains(p))
}
