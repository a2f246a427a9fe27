//! Central values L(1/2, χ), two independent ways.
//!
//! The production path is the approximate functional equation
//!
//!   L(1/2, χ) = Σ_m χ(m) m^{−1/2} V_𝔞(m/A) + ε(χ) Σ_m χ̄(m) m^{−1/2} V_𝔞(m/B)
//!
//! with AB = q and ε(χ) = i^{−𝔞} q^{−1/2} τ(χ). With the mollifying factor
//! G ≡ 1 the weight collapses to a normalized upper incomplete gamma,
//! V_𝔞(x) = Q((1/2+𝔞)/2, πx²): substituting s = 2w in the contour integral
//! turns it into the classical Cahen-Mellin integral for Γ(c, y).
//!
//! The oracle path expands L(1/2, χ) = q^{−1/2} Σ_{a≤q} χ(a) ζ(1/2, a/q) in
//! Hurwitz zetas; it costs O(q) evaluations and is capped accordingly.
//!
//! Both paths bucket terms by symbol exponent class and convert to complex
//! once per class, so root-of-unity error never accumulates.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::characters::{FamilySlice, GaussTable, PrimitiveCharacter};
use crate::kahan::Neumaier;
use crate::ring::Family;
use crate::special::{gamma, hurwitz_zeta, reg_gamma_q};
use crate::symbols::root_of_unity;

/// Conductor cap for the direct Hurwitz oracle.
pub const DIRECT_ORACLE_CAP: u64 = 5000;

/// Default target for the recorded AFE truncation error.
pub const AFE_TARGET_ERROR: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum LValueError {
    #[error("weight argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("conductor {0} exceeds the direct-oracle cap {1}")]
    ConductorTooLargeForOracle(u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Afe,
    Direct,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Afe => "afe",
            Method::Direct => "direct",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "afe" => Some(Method::Afe),
            "direct" => Some(Method::Direct),
            _ => None,
        }
    }
}

/// A computed central value with its provenance and error budget.
#[derive(Debug, Clone)]
pub struct LValueRecord {
    pub family: Family,
    pub conductor: u64,
    pub gen_a: i64,
    pub gen_b: i64,
    pub value: Complex64,
    pub method: Method,
    /// Certified bound on |value − exact| from the stated tail estimates.
    pub truncation_error: f64,
    /// The A used in the AFE split (0 for the direct method).
    pub split_a: f64,
}

/// The smoothing weight V_𝔞(x) = Q((1/2+𝔞)/2, πx²).
#[derive(Debug, Clone, Copy)]
pub struct WeightKernel {
    pub parity: u8,
}

impl WeightKernel {
    pub fn new(parity: u8) -> Self {
        assert!(parity <= 1);
        Self { parity }
    }

    /// The incomplete-gamma shape parameter c = (1/2 + 𝔞)/2.
    pub fn shape(&self) -> f64 {
        (0.5 + self.parity as f64) / 2.0
    }

    /// V_𝔞(x), monotone decreasing from V(0+) = 1 with Gaussian-type decay.
    pub fn v(&self, x: f64) -> Result<f64, LValueError> {
        if x <= 0.0 {
            return Err(LValueError::NonPositiveArgument(x));
        }
        Ok(reg_gamma_q(self.shape(), std::f64::consts::PI * x * x))
    }
}

/// Certified bound on the AFE tail Σ_{m>M} m^{−1/2} V_𝔞(m/A) at M = zA:
///
///   tail ≤ √A · π^{c−2} · z^{2c−7/2} · e^{−πz²} / (2Γ(c)),   z ≥ 1,
///
/// from Γ(c, y) ≤ y^{c−1} e^{−y} (c ≤ 1) and an integral comparison.
fn afe_tail_bound(a_param: f64, c: f64, z: f64) -> f64 {
    let pi = std::f64::consts::PI;
    a_param.sqrt() * pi.powf(c - 2.0) * z.powf(2.0 * c - 3.5) * (-pi * z * z).exp()
        / (2.0 * gamma(c))
}

/// Smallest truncation point M = ceil(zA) whose tail bound is ≤ target.
fn truncation_point(a_param: f64, c: f64, target: f64) -> (u64, f64) {
    let mut z = 1.0f64;
    loop {
        let bound = afe_tail_bound(a_param, c, z);
        if bound <= target {
            return (((z * a_param).ceil() as u64).max(1), bound);
        }
        z += 0.125;
    }
}

/// L(1/2, χ) by the approximate functional equation with split parameter A
/// (B = q/A), truncated so the recorded error is at most `target`.
pub fn afe_central_value(
    chi: &PrimitiveCharacter,
    a_param: f64,
    target: f64,
    table: Option<&GaussTable>,
) -> LValueRecord {
    assert!(a_param > 0.0, "AFE split parameter must be positive");
    let q = chi.conductor as f64;
    let b_param = q / a_param;
    let kernel = WeightKernel::new(chi.parity);
    let c = kernel.shape();
    let (m_a, bound_a) = truncation_point(a_param, c, target / 2.0);
    let (m_b, bound_b) = truncation_point(b_param, c, target / 2.0);
    let (principal, dual) = afe_sums(chi, &kernel, a_param, b_param, m_a, m_b);
    let eps = chi.root_number(table);
    let (gen_a, gen_b) = chi.generator.coords_i64();
    LValueRecord {
        family: chi.family,
        conductor: chi.conductor,
        gen_a,
        gen_b,
        value: principal + eps * dual,
        method: Method::Afe,
        truncation_error: bound_a + bound_b,
        split_a: a_param,
    }
}

/// The two AFE sums with explicit truncation points (exposed so tests can
/// verify that the recorded bound dominates the effect of doubling M).
pub fn afe_sums_with_truncation(
    chi: &PrimitiveCharacter,
    a_param: f64,
    m_a: u64,
    m_b: u64,
    table: Option<&GaussTable>,
) -> Complex64 {
    let kernel = WeightKernel::new(chi.parity);
    let (principal, dual) =
        afe_sums(chi, &kernel, a_param, chi.conductor as f64 / a_param, m_a, m_b);
    principal + chi.root_number(table) * dual
}

fn afe_sums(
    chi: &PrimitiveCharacter,
    kernel: &WeightKernel,
    a_param: f64,
    b_param: f64,
    m_a: u64,
    m_b: u64,
) -> (Complex64, Complex64) {
    let d = chi.family.symbol_order() as usize;
    let mut buckets_a = vec![Neumaier::new(); d];
    let mut buckets_b = vec![Neumaier::new(); d];
    for m in 1..=m_a.max(m_b) {
        let Some(exp) = chi.eval_symbol(m as i64).exponent() else {
            continue;
        };
        let inv_sqrt = 1.0 / (m as f64).sqrt();
        if m <= m_a {
            buckets_a[exp as usize].add(inv_sqrt * kernel.v(m as f64 / a_param).unwrap());
        }
        if m <= m_b {
            // χ̄(m) has the conjugate exponent.
            let conj_exp = (d - exp as usize) % d;
            buckets_b[conj_exp].add(inv_sqrt * kernel.v(m as f64 / b_param).unwrap());
        }
    }
    let combine = |buckets: &[Neumaier]| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, b) in buckets.iter().enumerate() {
            acc += root_of_unity(d as u8, j as u8) * b.value();
        }
        acc
    };
    (combine(&buckets_a), combine(&buckets_b))
}

/// L(1/2, χ) = q^{−1/2} Σ_{a=1}^{q} χ(a) ζ(1/2, a/q): the independent oracle.
pub fn direct_central_value(
    chi: &PrimitiveCharacter,
    cap: u64,
) -> Result<LValueRecord, LValueError> {
    let q = chi.conductor;
    if q > cap {
        return Err(LValueError::ConductorTooLargeForOracle(q, cap));
    }
    let d = chi.family.symbol_order() as usize;
    let mut buckets = vec![Neumaier::new(); d];
    for a in 1..q {
        if let Some(exp) = chi.eval_symbol(a as i64).exponent() {
            buckets[exp as usize].add(hurwitz_zeta(0.5, a as f64 / q as f64));
        }
    }
    let mut value = Complex64::new(0.0, 0.0);
    for (j, b) in buckets.iter().enumerate() {
        value += root_of_unity(d as u8, j as u8) * b.value();
    }
    value /= (q as f64).sqrt();
    let (gen_a, gen_b) = chi.generator.coords_i64();
    Ok(LValueRecord {
        family: chi.family,
        conductor: q,
        gen_a,
        gen_b,
        value,
        method: Method::Direct,
        // Euler-Maclaurin residual ~1e-14 per term, q terms, q^{-1/2} scale.
        truncation_error: 1e-14 * (q as f64).sqrt() + 1e-13,
        split_a: 0.0,
    })
}

/// AFE values for every member of a slice, in canonical member order.
/// Per-character work is single-threaded; members run in parallel, and the
/// ordered collect keeps the result independent of thread scheduling.
pub fn afe_batch(slice: &FamilySlice) -> Vec<LValueRecord> {
    let table = GaussTable::build(slice);
    slice
        .members
        .par_iter()
        .map(|chi| {
            afe_central_value(chi, (chi.conductor as f64).sqrt(), AFE_TARGET_ERROR, Some(&table))
        })
        .collect()
}

/// Direct-oracle values for every member; fails if any conductor exceeds cap.
pub fn direct_batch(slice: &FamilySlice, cap: u64) -> Result<Vec<LValueRecord>, LValueError> {
    if let Some(c) = slice.members.iter().find(|c| c.conductor > cap) {
        return Err(LValueError::ConductorTooLargeForOracle(c.conductor, cap));
    }
    Ok(slice
        .members
        .par_iter()
        .map(|chi| direct_central_value(chi, cap).expect("cap checked"))
        .collect())
}
