//! The experiment harness: twisted first moments against their predicted
//! main terms, 2k-th moment growth, Pólya-type smoothed character sums, the
//! lower-bounds-principle inequality, GRH log-bound diagnostics,
//! non-vanishing counts, and prime-sum moment diagnostics.
//!
//! Aggregations walk the canonical member order with compensated summation,
//! so reported values do not depend on how the per-character work was
//! scheduled.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::characters::{CharId, FamilySlice, PrimitiveCharacter};
use crate::constants::{g_factor, phi, ValueWithError};
use crate::kahan::{Neumaier, NeumaierComplex};
use crate::lvalue::LValueRecord;
use crate::mollifier::{
    block_prime_sums, mollifier_from_sums, q_factors_from_sums, MollifierConfig, MollifierError,
};
use crate::ring::Family;
use crate::sieve::{factorize, primes_up_to};

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("missing L-values for {family} conductors in ({lo}, {hi}): populate the cache first")]
    MissingLValues { family: &'static str, lo: u64, hi: u64 },
    #[error("no family members in the requested conductor range")]
    MissingFamily,
    #[error("central value is zero; log bound undefined")]
    ZeroCentralValue,
    #[error(transparent)]
    Mollifier(#[from] MollifierError),
}

// ---------------------------------------------------------------------------
// Twist decomposition
// ---------------------------------------------------------------------------

/// ℓ = ℓ_1 ℓ_2² ℓ_3³ (cubic) or ℓ_1 ℓ_2² ℓ_3³ ℓ_4⁴ (quartic), the exponent-
/// residue decomposition: each prime exponent is reduced mod 3 (resp. 4).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposedTwist {
    pub family: Family,
    pub ell: u64,
    /// parts[r−1] collects primes with exponent ≡ r, the last part the
    /// cube/fourth-power content.
    pub parts: Vec<u64>,
}

impl DecomposedTwist {
    pub fn reconstruct(&self) -> u64 {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &part)| part.pow(i as u32 + 1))
            .product()
    }
}

pub fn decompose_twist(family: Family, ell: u64) -> DecomposedTwist {
    assert!(ell >= 1);
    let d = family.symbol_order() as u32;
    let mut parts = vec![1u64; d as usize];
    for (p, e) in factorize(ell) {
        let r = e % d;
        let t = e / d;
        if r > 0 {
            parts[(r - 1) as usize] *= p;
        }
        parts[(d - 1) as usize] *= p.pow(t);
    }
    DecomposedTwist { family, ell, parts }
}

// ---------------------------------------------------------------------------
// L-value store
// ---------------------------------------------------------------------------

/// In-memory central values keyed by member identity.
#[derive(Debug, Default)]
pub struct LStore {
    map: HashMap<CharId, Complex64>,
}

impl LStore {
    pub fn from_records<'a, I: IntoIterator<Item = &'a LValueRecord>>(records: I) -> LStore {
        let mut map = HashMap::new();
        for r in records {
            map.insert((r.conductor, r.gen_a, r.gen_b), r.value);
        }
        LStore { map }
    }

    pub fn get(&self, chi: &PrimitiveCharacter) -> Option<Complex64> {
        self.map.get(&chi.id()).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// A family slice plus the L-values needed to aggregate over it.
pub struct ExperimentContext<'a> {
    pub slice: &'a FamilySlice,
    pub store: &'a LStore,
}

impl<'a> ExperimentContext<'a> {
    pub fn new(slice: &'a FamilySlice, store: &'a LStore) -> Self {
        Self { slice, store }
    }

    fn require(&self, chi: &PrimitiveCharacter, lo: u64, hi: u64) -> Result<Complex64, ExperimentError> {
        self.store.get(chi).ok_or(ExperimentError::MissingLValues {
            family: self.slice.family.name(),
            lo,
            hi,
        })
    }

    /// Σ* L(1/2, χ) χ(ℓ) Φ(q/X) over the slice; Φ restricts to q ∈ (X, 2X).
    pub fn empirical_first_moment(&self, x: f64, ell: u64) -> Result<Complex64, ExperimentError> {
        let (lo, hi) = (x as u64, (2.0 * x) as u64);
        let mut acc = NeumaierComplex::new();
        for chi in self.slice.members_in(lo, hi + 1) {
            let weight = phi(chi.conductor as f64 / x);
            if weight == 0.0 {
                continue;
            }
            let lval = self.require(chi, lo, hi)?;
            acc.add(lval * chi.eval_symbol(ell as i64).to_complex() * weight);
        }
        Ok(acc.value())
    }

    /// Σ* |L(1/2, χ)|^{2k} over conductors ≤ X (sharp cutoff).
    pub fn moment_2k(&self, x: f64, k: f64) -> Result<f64, ExperimentError> {
        let mut acc = Neumaier::new();
        for chi in self.slice.members_in(0, x as u64 + 1) {
            let lval = self.require(chi, 0, x as u64)?;
            acc.add(lval.norm().powf(2.0 * k));
        }
        Ok(acc.value())
    }

    /// Count and proportion of members with conductor ≤ X and |L| above the
    /// threshold; members at or below the threshold are returned for
    /// inspection.
    pub fn nonvanishing_count(
        &self,
        x: f64,
        threshold: f64,
    ) -> Result<(u64, f64, Vec<(CharId, f64)>), ExperimentError> {
        let mut total = 0u64;
        let mut above = 0u64;
        let mut below = Vec::new();
        for chi in self.slice.members_in(0, x as u64 + 1) {
            let lval = self.require(chi, 0, x as u64)?;
            total += 1;
            if lval.norm() > threshold {
                above += 1;
            } else {
                below.push((chi.id(), lval.norm()));
            }
        }
        if total == 0 {
            return Err(ExperimentError::MissingFamily);
        }
        Ok((above, above as f64 / total as f64, below))
    }

    /// The three sums of the lower-bounds-principle inequality at (X, k):
    ///
    ///   Σ* L 𝒩(χ, k−1) 𝒩(χ̄, k) Φ  ≤  (Σ* |L|^{2k} Φ)^{1/2k}
    ///        · (Σ* ∏_j (|𝒩_j(χ,k)|² + |𝒬_j(χ,k)|²) Φ)^{(2k−1)/2k}.
    pub fn holder_check(
        &self,
        x: f64,
        k: f64,
        cfg: &MollifierConfig,
    ) -> Result<HolderReport, ExperimentError> {
        assert!(k >= 0.5, "the inequality is stated for k ≥ 1/2");
        if cfg.ladder.is_empty() {
            return Err(MollifierError::EmptyLadder.into());
        }
        let (lo, hi) = (x as u64, (2.0 * x) as u64);
        let dual_exponent = (2.0 * k - 1.0) / (2.0 * k);
        let mut lhs = NeumaierComplex::new();
        let mut moment = Neumaier::new();
        let mut dual = Neumaier::new();
        let mut members = 0usize;
        for chi in self.slice.members_in(lo, hi + 1) {
            let weight = phi(chi.conductor as f64 / x);
            if weight == 0.0 {
                continue;
            }
            let lval = self.require(chi, lo, hi)?;
            members += 1;
            let sums = block_prime_sums(chi, cfg);
            let conj_sums: Vec<Complex64> = sums.iter().map(|z| z.conj()).collect();
            let n_km1 = mollifier_from_sums(&sums, &cfg.ladder, k - 1.0);
            let n_bar_k = mollifier_from_sums(&conj_sums, &cfg.ladder, k);
            lhs.add(lval * n_km1 * n_bar_k * weight);
            moment.add(lval.norm().powf(2.0 * k) * weight);
            if dual_exponent > 0.0 {
                let qs = q_factors_from_sums(&sums, &cfg.ladder, k);
                let mut prod = 1.0f64;
                for j in 0..sums.len() {
                    let nj = crate::mollifier::truncated_exponential(
                        cfg.ladder[j] as f64,
                        k * sums[j],
                    );
                    prod *= nj.norm_sqr() + qs[j].norm_sqr();
                }
                dual.add(prod * weight);
            }
        }
        if members == 0 {
            return Err(ExperimentError::MissingFamily);
        }
        let moment_factor = moment.value();
        let dual_factor = if dual_exponent > 0.0 { Some(dual.value()) } else { None };
        let rhs = moment_factor.powf(1.0 / (2.0 * k))
            * dual_factor.map_or(1.0, |d| d.powf(dual_exponent));
        let lhs_value = lhs.value();
        Ok(HolderReport {
            lhs: lhs_value,
            moment_factor,
            dual_factor,
            rhs,
            holds: lhs_value.re <= rhs * (1.0 + 1e-9),
            members,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    /// Σ* L 𝒩(χ,k−1) 𝒩(χ̄,k) Φ (real up to accumulated rounding).
    #[serde(serialize_with = "ser_complex")]
    pub lhs: Complex64,
    /// Σ* |L|^{2k} Φ.
    pub moment_factor: f64,
    /// Σ* ∏ (|𝒩_j|² + |𝒬_j|²) Φ, absent in the degenerate k = 1/2 case.
    pub dual_factor: Option<f64>,
    pub rhs: f64,
    pub holds: bool,
    pub members: usize,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&z.re)?;
    seq.serialize_element(&z.im)?;
    seq.end()
}

// ---------------------------------------------------------------------------
// Predicted main terms and Pólya sums
// ---------------------------------------------------------------------------

/// The main term of the twisted first moment:
///
///   cubic:   c_K g(3ℓ) X (ℓ_1²ℓ_2)^{−1/2} Φ̂(1) Z_K(3/2, ℓ)
///   quartic: c_K g(2ℓ) X (ℓ_1³ℓ_2²ℓ_3)^{−1/2} Φ̂(1) Z_K(2, ℓ)
pub fn predicted_first_moment(family: Family, x: f64, ell: u64) -> ValueWithError {
    let consts = crate::constants::EulerConstants::for_family(family);
    let dec = decompose_twist(family, ell);
    let (u, power) = match family {
        Family::Cubic => {
            (1.5, (dec.parts[0].pow(2) * dec.parts[1]) as f64)
        }
        Family::Quartic => (
            2.0,
            (dec.parts[0].pow(3) * dec.parts[1].pow(2) * dec.parts[2]) as f64,
        ),
    };
    let z = crate::constants::z_k_euler(family, u, ell).expect("u > 1");
    let g = g_factor(family, family.ramified_prime() * ell);
    let value = consts.c_k * g * x / power.sqrt() * consts.phi_hat_1 * z.value;
    let rel = consts.precision / consts.c_k + z.error / z.value + 1e-10;
    ValueWithError { value, error: value.abs() * rel }
}

#[derive(Debug, Clone, Copy)]
pub struct PolyaSum {
    pub empirical: Complex64,
    pub predicted: f64,
    pub is_power: bool,
}

/// Σ* χ(c) Φ(q/X) against its main term: c_K Φ̂(1) X g(q_D c) when c is a
/// perfect cube (resp. fourth power), 0 otherwise. Needs no L-values.
pub fn polya_sum(slice: &FamilySlice, x: f64, c: u64) -> PolyaSum {
    assert!(c >= 1);
    let family = slice.family;
    let mut acc = NeumaierComplex::new();
    for chi in slice.members_in(x as u64, (2.0 * x) as u64 + 1) {
        let weight = phi(chi.conductor as f64 / x);
        if weight == 0.0 {
            continue;
        }
        acc.add(chi.eval_symbol(c as i64).to_complex() * weight);
    }
    let is_power = is_perfect_power(c, family.symbol_order() as u32);
    let predicted = if is_power {
        let consts = crate::constants::EulerConstants::for_family(family);
        consts.c_k * consts.phi_hat_1 * x * g_factor(family, family.ramified_prime() * c)
    } else {
        0.0
    };
    PolyaSum { empirical: acc.value(), predicted, is_power }
}

fn is_perfect_power(c: u64, d: u32) -> bool {
    if c == 1 {
        return true;
    }
    let root = (c as f64).powf(1.0 / d as f64).round() as u64;
    (root.saturating_sub(1)..=root + 1).any(|r| r.checked_pow(d) == Some(c))
}

// ---------------------------------------------------------------------------
// GRH log-bound diagnostic
// ---------------------------------------------------------------------------

/// λ_0 = 0.4912…, the positive root of e^{−λ} = λ + λ²/2.
pub fn lambda_0() -> f64 {
    let f = |l: f64| (-l).exp() - l - l * l / 2.0;
    let mut lo = 0.4f64;
    let mut hi = 0.6f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrhVariant {
    /// Prime sum at shift λ_0/log x with the (1+λ_0)/2 conductor term.
    Lambda0,
    /// Prime sum at shift 1/log x plus the prime-square sum.
    UnitShift,
}

impl GrhVariant {
    pub fn name(self) -> &'static str {
        match self {
            GrhVariant::Lambda0 => "lambda0-form",
            GrhVariant::UnitShift => "1-form",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GrhBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compare log |L(1/2, χ)| against the conditional prime-sum upper bound,
/// with the unspecified O(·) constant exposed as `slack`. `big_x` is the
/// ambient family bound X of the statement; a diagnostic, never an assert.
pub fn grh_log_bound_check(
    chi: &PrimitiveCharacter,
    lvalue: Complex64,
    x: f64,
    variant: GrhVariant,
    slack: f64,
    big_x: f64,
) -> Result<GrhBound, ExperimentError> {
    assert!(x >= 2.0);
    let modulus = lvalue.norm();
    if modulus < 1e-280 {
        return Err(ExperimentError::ZeroCentralValue);
    }
    let lhs = modulus.ln();
    let log_x = x.ln();
    let (shift, conductor_term) = match variant {
        GrhVariant::Lambda0 => {
            let l0 = lambda_0();
            (l0 / log_x, (1.0 + l0) / 2.0 * big_x.ln() / log_x)
        }
        GrhVariant::UnitShift => (1.0 / log_x, big_x.ln() / log_x),
    };
    let mut prime_sum = Neumaier::new();
    for p in primes_up_to(x as u64) {
        let pf = p as f64;
        let re = chi.eval_symbol(p as i64).to_complex().re;
        if re != 0.0 {
            prime_sum.add(re / pf.powf(0.5 + shift) * (x / pf).ln() / log_x);
        }
    }
    let mut rhs = prime_sum.value() + conductor_term + slack;
    if variant == GrhVariant::UnitShift {
        let cap = x.sqrt().min(big_x.ln());
        let mut square_sum = Neumaier::new();
        for p in primes_up_to(cap as u64) {
            let pf = p as f64;
            let re = chi.eval_symbol(p as i64).pow(2).to_complex().re;
            if re != 0.0 {
                square_sum.add(re / pf.powf(1.0 + 2.0 / log_x) * (x / (pf * pf)).ln() / log_x);
            }
        }
        rhs += square_sum.value();
    }
    Ok(GrhBound { lhs, rhs, holds: lhs <= rhs })
}

// ---------------------------------------------------------------------------
// Prime-sum moments
// ---------------------------------------------------------------------------

/// Σ*_{X/2 < q ≤ X} |Σ_{p ≤ y} a(p) χ(p)/√p|^{2m}, the dyadic-slice moment
/// of a coefficient-weighted prime sum. Needs characters only.
pub fn prime_sum_moment(
    slice: &FamilySlice,
    x: f64,
    y: u64,
    m: u32,
    coeff: &dyn Fn(u64) -> f64,
) -> Result<f64, ExperimentError> {
    assert!(m >= 1);
    let primes = primes_up_to(y);
    let lo = (x / 2.0) as u64;
    let hi = x as u64;
    let mut acc = Neumaier::new();
    let mut members = 0usize;
    for chi in slice.members_in(lo, hi + 1) {
        members += 1;
        let d = chi.family.symbol_order() as usize;
        let mut buckets = vec![Neumaier::new(); d];
        for &p in &primes {
            if let Some(exp) = chi.eval_symbol(p as i64).exponent() {
                buckets[exp as usize].add(coeff(p) / (p as f64).sqrt());
            }
        }
        let mut s = Complex64::new(0.0, 0.0);
        for (j, b) in buckets.iter().enumerate() {
            s += crate::symbols::root_of_unity(d as u8, j as u8) * b.value();
        }
        acc.add(s.norm().powi(2 * m as i32));
    }
    if members == 0 {
        return Err(ExperimentError::MissingFamily);
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// One experiment's sweep, serialized to JSON and plot-ready CSV.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub experiment: String,
    pub family: String,
    #[serde(rename = "X_values")]
    pub x_values: Vec<f64>,
    /// Complex empirical values as [re, im] pairs.
    pub empirical: Vec<[f64; 2]>,
    /// Predicted main terms where the statement provides one.
    pub predicted: Vec<Option<f64>>,
    /// re(empirical)/predicted where defined.
    pub ratio: Vec<Option<f64>>,
    pub notes: String,
    /// The configuration that produced this report.
    pub config: serde_json::Value,
}

impl MomentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("X,empirical_re,empirical_im,predicted,ratio\n");
        for i in 0..self.x_values.len() {
            let pred = self.predicted[i].map_or(String::new(), |v| format!("{v}"));
            let ratio = self.ratio[i].map_or(String::new(), |v| format!("{v}"));
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.x_values[i], self.empirical[i][0], self.empirical[i][1], pred, ratio
            ));
        }
        out
    }
}
