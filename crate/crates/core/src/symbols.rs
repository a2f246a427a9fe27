//! Cubic and quartic residue symbols evaluated exactly, as symbol exponents.
//!
//! A symbol value is either Zero or ω^j / i^j stored as the exponent j; the
//! conversion to a floating-point root of unity happens only in summation
//! layers, so long character sums accumulate no root-of-unity drift.
//!
//! Evaluation goes through the isomorphism O_K/(ϖ) ≅ F_p: the symbol at a
//! prime ϖ of norm p with precomputed residue r = image of ω (resp. i) is the
//! exponent j such that m^{(p−1)/d} ≡ r^j (mod p).

use num_complex::Complex64;

use crate::ring::KPrime;
use crate::sieve::{mul_mod, pow_mod, smallest_prime_factor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolValue {
    /// The upper argument shares a factor with the modulus.
    Zero,
    /// ω^exp (order 3) or i^exp (order 4), exp reduced mod order.
    Root { order: u8, exp: u8 },
}

impl SymbolValue {
    pub fn one(order: u8) -> Self {
        SymbolValue::Root { order, exp: 0 }
    }

    pub fn root(order: u8, exp: u8) -> Self {
        SymbolValue::Root { order, exp: exp % order }
    }

    /// Group law: exponents add mod order; Zero absorbs.
    pub fn mul(self, rhs: Self) -> Self {
        match (self, rhs) {
            (SymbolValue::Zero, _) | (_, SymbolValue::Zero) => SymbolValue::Zero,
            (SymbolValue::Root { order, exp: a }, SymbolValue::Root { order: o2, exp: b }) => {
                assert_eq!(order, o2, "mixed symbol orders");
                SymbolValue::Root { order, exp: (a + b) % order }
            }
        }
    }

    pub fn pow(self, k: u32) -> Self {
        match self {
            SymbolValue::Zero => {
                assert!(k > 0, "0^0 symbol power");
                SymbolValue::Zero
            }
            SymbolValue::Root { order, exp } => SymbolValue::Root {
                order,
                exp: ((exp as u32 * k) % order as u32) as u8,
            },
        }
    }

    /// Complex conjugate: exponent negation mod order.
    pub fn conj(self) -> Self {
        match self {
            SymbolValue::Zero => SymbolValue::Zero,
            SymbolValue::Root { order, exp } => {
                SymbolValue::Root { order, exp: (order - exp) % order }
            }
        }
    }

    pub fn exponent(self) -> Option<u8> {
        match self {
            SymbolValue::Zero => None,
            SymbolValue::Root { exp, .. } => Some(exp),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, SymbolValue::Zero)
    }

    /// Exact unit-circle value of the exponent class.
    pub fn to_complex(self) -> Complex64 {
        match self {
            SymbolValue::Zero => Complex64::new(0.0, 0.0),
            SymbolValue::Root { order, exp } => root_of_unity(order, exp),
        }
    }
}

/// The d-th roots of unity at exact machine coordinates.
pub fn root_of_unity(order: u8, exp: u8) -> Complex64 {
    const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;
    match (order, exp % order) {
        (_, 0) => Complex64::new(1.0, 0.0),
        (3, 1) => Complex64::new(-0.5, HALF_SQRT3),
        (3, 2) => Complex64::new(-0.5, -HALF_SQRT3),
        (4, 1) => Complex64::new(0.0, 1.0),
        (4, 2) => Complex64::new(-1.0, 0.0),
        (4, 3) => Complex64::new(0.0, -1.0),
        _ => unreachable!("bad symbol order {order}"),
    }
}

/// (m/ϖ)_d for a rational integer m: Zero if p | m, else the exponent j with
/// m^{(p−1)/d} ≡ r^j (mod p).
pub fn prime_symbol(m: i64, kp: &KPrime) -> SymbolValue {
    let p = kp.p;
    let d = kp.family.symbol_order() as u64;
    let mm = m.rem_euclid(p as i64) as u64;
    if mm == 0 {
        return SymbolValue::Zero;
    }
    let t = pow_mod(mm, (p - 1) / d, p);
    exponent_of_root(t, kp)
}

/// Match t against the powers of r = omega_image; t is guaranteed to be a
/// d-th root of unity mod p when p ∤ m.
fn exponent_of_root(t: u64, kp: &KPrime) -> SymbolValue {
    let p = kp.p;
    let d = kp.family.symbol_order();
    if t == 1 {
        return SymbolValue::Root { order: d, exp: 0 };
    }
    let mut rj = kp.omega_image;
    for j in 1..d {
        if t == rj {
            return SymbolValue::Root { order: d, exp: j };
        }
        rj = mul_mod(rj, kp.omega_image, p);
    }
    panic!("value {t} is not a {d}-th root of unity mod {p}: broken omega_image")
}

/// Symbol for a composite primary modulus given as (prime, multiplicity)
/// factors; the empty product is the unit symbol. Zero iff m shares a factor
/// with the modulus norm.
pub fn composite_symbol(order: u8, m: i64, factors: &[(KPrime, u32)]) -> SymbolValue {
    let mut acc = SymbolValue::one(order);
    for (kp, mult) in factors {
        debug_assert_eq!(kp.family.symbol_order(), order);
        acc = acc.mul(prime_symbol(m, kp).pow(*mult));
        if acc.is_zero() {
            return SymbolValue::Zero;
        }
    }
    acc
}

/// Symbol exponent classes of every residue mod p: entry a ∈ [1, p) holds the
/// exponent of (a/ϖ)_d, entry 0 is unused. Built by one modpow per prime and
/// complete multiplicativity along a smallest-prime-factor sieve.
pub fn symbol_class_table(kp: &KPrime) -> Vec<u8> {
    let p = kp.p as usize;
    let d = kp.family.symbol_order();
    let spf = smallest_prime_factor(kp.p - 1);
    let mut class = vec![0u8; p];
    for a in 2..p {
        let s = spf[a] as usize;
        class[a] = if s == a {
            prime_symbol(a as i64, kp)
                .exponent()
                .expect("a < p cannot hit the prime")
        } else {
            (class[s] + class[a / s]) % d
        };
    }
    class
}
