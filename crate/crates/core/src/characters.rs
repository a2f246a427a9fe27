//! The two character families: every primitive cubic character of conductor
//! coprime to 3 (resp. primitive quartic with primitive square, conductor
//! odd) arises from a primary square-free generator with no rational prime
//! divisor. Conductors are therefore square-free products of split primes,
//! and each conductor with k prime factors carries exactly 2^k members, one
//! per choice of conjugate prime above each p.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::kahan::NeumaierComplex;
use crate::ring::{split_prime, Family, KElt, KPrime};
use crate::sieve::primes_up_to;
use crate::symbols::{composite_symbol, prime_symbol, root_of_unity, symbol_class_table, SymbolValue};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharacterError {
    #[error("character takes a value at -1 outside {{±1}}: exponent {0}")]
    InvalidCharacterValue(u8),
}

/// Conductor plus generator coordinates: enough to identify a member.
pub type CharId = (u64, i64, i64);

#[derive(Debug, Clone)]
pub struct PrimitiveCharacter {
    pub family: Family,
    pub conductor: u64,
    pub generator: KElt,
    /// One chosen conjugate prime per rational prime dividing the conductor,
    /// ascending in p.
    pub factors: Vec<KPrime>,
    /// 𝔞 ∈ {0, 1} with χ(−1) = (−1)^𝔞; always 0 for the cubic family.
    pub parity: u8,
}

impl PrimitiveCharacter {
    fn build(family: Family, factors: Vec<KPrime>) -> Result<Self, CharacterError> {
        let generator = factors
            .iter()
            .fold(KElt::one(family), |acc, kp| acc.mul(&kp.generator));
        debug_assert!(generator.is_primary());
        let conductor: u64 = factors.iter().map(|kp| kp.p).product();
        let parity = parity_of(family, &factors)?;
        Ok(Self { family, conductor, generator, factors, parity })
    }

    pub fn id(&self) -> CharId {
        let (a, b) = self.generator.coords_i64();
        (self.conductor, a, b)
    }

    /// χ(m) as an exact symbol value. Equivalent to the composite symbol
    /// with multiplicity one per factor, allocation-free for the hot loops.
    pub fn eval_symbol(&self, m: i64) -> SymbolValue {
        let mut acc = SymbolValue::one(self.family.symbol_order());
        for kp in &self.factors {
            acc = acc.mul(prime_symbol(m, kp));
            if acc.is_zero() {
                return SymbolValue::Zero;
            }
        }
        acc
    }

    /// χ(m) on the unit circle (or 0).
    pub fn eval(&self, m: i64) -> Complex64 {
        self.eval_symbol(m).to_complex()
    }

    /// The conjugate character: every factor replaced by its conjugate prime.
    pub fn conjugate(&self) -> PrimitiveCharacter {
        let factors: Vec<KPrime> = self.factors.iter().map(|kp| kp.conjugate()).collect();
        PrimitiveCharacter::build(self.family, factors).expect("conjugate of valid member")
    }

    /// Gauss sum τ(χ) = Σ_{a mod q} χ(a) e(a/q), assembled from per-prime
    /// sums by twisted multiplicativity when a table is supplied, otherwise
    /// computing the per-prime sums on the fly.
    pub fn gauss_sum(&self, table: Option<&GaussTable>) -> Complex64 {
        let mut tau = Complex64::new(1.0, 0.0);
        let mut q_acc: u64 = 1;
        let mut seen: Vec<&KPrime> = Vec::with_capacity(self.factors.len());
        for kp in &self.factors {
            let tau_p = match table {
                Some(t) => t.get(kp),
                None => gauss_sum_prime(kp),
            };
            if q_acc == 1 {
                tau = tau_p;
            } else {
                // τ(χ₁χ₂) = χ₁(q₂) χ₂(q₁) τ(χ₁) τ(χ₂) for coprime conductors.
                let chi_acc_at_p = seen
                    .iter()
                    .fold(SymbolValue::one(self.family.symbol_order()), |s, w| {
                        s.mul(prime_symbol(kp.p as i64, w))
                    });
                let chi_p_at_qacc = prime_symbol(q_acc as i64, kp);
                tau = chi_acc_at_p.to_complex() * chi_p_at_qacc.to_complex() * tau * tau_p;
            }
            q_acc *= kp.p;
            seen.push(kp);
        }
        tau
    }

    /// Root number ε(χ) = i^{−𝔞} q^{−1/2} τ(χ), of modulus 1.
    pub fn root_number(&self, table: Option<&GaussTable>) -> Complex64 {
        let i_pow = if self.parity == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0)
        };
        i_pow * self.gauss_sum(table) / (self.conductor as f64).sqrt()
    }
}

/// χ(−1) must be ±1; the cubic family forces +1 (an order-3 value squaring
/// to 1 is 1), the quartic family is computed, never assumed.
fn parity_of(family: Family, factors: &[KPrime]) -> Result<u8, CharacterError> {
    let pairs: Vec<(KPrime, u32)> = factors.iter().map(|kp| (kp.clone(), 1)).collect();
    let v = composite_symbol(family.symbol_order(), -1, &pairs);
    match v {
        SymbolValue::Root { exp: 0, .. } => Ok(0),
        SymbolValue::Root { order: 4, exp: 2 } => Ok(1),
        SymbolValue::Root { exp, .. } => Err(CharacterError::InvalidCharacterValue(exp)),
        SymbolValue::Zero => unreachable!("gcd(-1, q) = 1"),
    }
}

/// All family members of conductor ≤ x_max, in canonical (q, gen) order.
#[derive(Debug, Clone)]
pub struct FamilySlice {
    pub family: Family,
    pub x_max: u64,
    pub members: Vec<PrimitiveCharacter>,
}

impl FamilySlice {
    pub fn enumerate(family: Family, x_max: u64) -> FamilySlice {
        let split_pairs: Vec<(KPrime, KPrime)> = primes_up_to(x_max)
            .into_iter()
            .filter(|&p| family.splits(p))
            .map(|p| split_prime(family, p).expect("split prime"))
            .collect();
        let mut members = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        squarefree_products(&split_pairs, 0, 1, x_max, &mut chosen, &mut members);
        members.sort_by_key(|c| {
            let (a, b) = c.generator.coords_i64();
            (c.conductor, a, b)
        });
        FamilySlice { family, x_max, members }
    }

    /// Members with conductor in the half-open interval (lo, hi).
    pub fn members_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = &PrimitiveCharacter> {
        self.members
            .iter()
            .filter(move |c| c.conductor > lo && c.conductor < hi)
    }

    /// CSV with columns `family,q,gen_a,gen_b,parity`, one row per member.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "family,q,gen_a,gen_b,parity")?;
        for c in &self.members {
            let (a, b) = c.generator.coords_i64();
            writeln!(out, "{},{},{},{},{}", c.family.name(), c.conductor, a, b, c.parity)?;
        }
        Ok(())
    }
}

fn squarefree_products(
    pairs: &[(KPrime, KPrime)],
    start: usize,
    q_acc: u64,
    x_max: u64,
    chosen: &mut Vec<usize>,
    out: &mut Vec<PrimitiveCharacter>,
) {
    if !chosen.is_empty() {
        // Expand the 2^k conjugate choices for this square-free conductor.
        for mask in 0u32..(1 << chosen.len()) {
            let factors: Vec<KPrime> = chosen
                .iter()
                .enumerate()
                .map(|(bit, &idx)| {
                    if mask >> bit & 1 == 0 {
                        pairs[idx].0.clone()
                    } else {
                        pairs[idx].1.clone()
                    }
                })
                .collect();
            let family = factors[0].family;
            out.push(PrimitiveCharacter::build(family, factors).expect("valid member"));
        }
    }
    for idx in start..pairs.len() {
        let p = pairs[idx].0.p;
        if q_acc > x_max / p {
            break; // primes ascend, no further product fits
        }
        chosen.push(idx);
        squarefree_products(pairs, idx + 1, q_acc * p, x_max, chosen, out);
        chosen.pop();
    }
}

/// Gauss sum of the prime-conductor character attached to ϖ, by direct
/// summation over F_p with per-class compensated accumulation.
pub fn gauss_sum_prime(kp: &KPrime) -> Complex64 {
    let p = kp.p;
    let d = kp.family.symbol_order();
    let class = symbol_class_table(kp);
    let mut buckets = vec![NeumaierComplex::new(); d as usize];
    let step = 2.0 * std::f64::consts::PI / p as f64;
    for a in 1..p {
        let (s, c) = (step * a as f64).sin_cos();
        buckets[class[a as usize] as usize].add(Complex64::new(c, s));
    }
    let mut tau = Complex64::new(0.0, 0.0);
    for (j, bucket) in buckets.iter().enumerate() {
        tau += root_of_unity(d, j as u8) * bucket.value();
    }
    tau
}

/// Memoized per-prime Gauss sums for a slice, built in parallel.
pub struct GaussTable {
    map: HashMap<CharId, Complex64>,
}

impl GaussTable {
    pub fn build(slice: &FamilySlice) -> GaussTable {
        let mut distinct: HashMap<CharId, KPrime> = HashMap::new();
        for c in &slice.members {
            for kp in &c.factors {
                let (a, b) = kp.generator.coords_i64();
                distinct.entry((kp.p, a, b)).or_insert_with(|| kp.clone());
            }
        }
        let entries: Vec<(CharId, KPrime)> = distinct.into_iter().collect();
        let computed: Vec<(CharId, Complex64)> = entries
            .par_iter()
            .map(|(key, kp)| (*key, gauss_sum_prime(kp)))
            .collect();
        GaussTable { map: computed.into_iter().collect() }
    }

    fn get(&self, kp: &KPrime) -> Complex64 {
        let (a, b) = kp.generator.coords_i64();
        *self
            .map
            .get(&(kp.p, a, b))
            .expect("prime missing from Gauss table")
    }
}

/// Direct O(q) Gauss sum used as a cross-method oracle in tests.
pub fn gauss_sum_direct(chi: &PrimitiveCharacter) -> Complex64 {
    let q = chi.conductor;
    let d = chi.family.symbol_order();
    let mut buckets = vec![NeumaierComplex::new(); d as usize];
    let step = 2.0 * std::f64::consts::PI / q as f64;
    for a in 1..q {
        if let Some(exp) = chi.eval_symbol(a as i64).exponent() {
            let (s, c) = (step * a as f64).sin_cos();
            buckets[exp as usize].add(Complex64::new(c, s));
        }
    }
    let mut tau = Complex64::new(0.0, 0.0);
    for (j, bucket) in buckets.iter().enumerate() {
        tau += root_of_unity(d, j as u8) * bucket.value();
    }
    tau
}
