//! Exact arithmetic in Z[ω] (ω = e^{2πi/3}) and Z[i]: norms, units, primary
//! normalization, nearest-lattice-point Euclidean division, gcd, and splitting
//! of rational primes by gcd descent from a square root mod p.
//!
//! Coordinates are arbitrary-precision integers: the symbol and Gauss-sum
//! layers multiply many residues and must not overflow silently.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::sieve::{inv_mod, is_prime, mul_mod, pow_mod};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("element is not coprime to the ramified prime")]
    NotCoprimeToRamified,
    #[error("gcd of zero and zero is undefined")]
    BothZero,
    #[error("{0} does not split in this ring")]
    NotSplitPrime(u64),
}

/// Which of the two families (equivalently, which ring O_K) is in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Cubic,
    Quartic,
}

impl Family {
    /// Order of the residue symbol: 3 for Z[ω], 4 for Z[i].
    pub fn symbol_order(self) -> u8 {
        match self {
            Family::Cubic => 3,
            Family::Quartic => 4,
        }
    }

    /// The rational prime that ramifies: 3 resp. 2.
    pub fn ramified_prime(self) -> u64 {
        match self {
            Family::Cubic => 3,
            Family::Quartic => 2,
        }
    }

    /// Field discriminant: −3 resp. −4.
    pub fn discriminant(self) -> i64 {
        match self {
            Family::Cubic => -3,
            Family::Quartic => -4,
        }
    }

    /// Does the odd unramified prime p split into two degree-one primes?
    pub fn splits(self, p: u64) -> bool {
        match self {
            Family::Cubic => p % 3 == 1,
            Family::Quartic => p % 4 == 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Cubic => "cubic",
            Family::Quartic => "quartic",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "cubic" => Some(Family::Cubic),
            "quartic" => Some(Family::Quartic),
            _ => None,
        }
    }
}

/// Rounded division n/d: nearest integer, ties toward zero.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_rem(d);
    // |r/d| > 1/2 means the truncated quotient is not nearest; on an exact
    // half we keep the truncated (toward-zero) quotient.
    if &r.abs() * 2 > d.abs() {
        if n.sign() == d.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// a + bω with ω² = −1 − ω; norm a² − ab + b².
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EisensteinInt {
    pub a: BigInt,
    pub b: BigInt,
}

/// a + bi; norm a² + b².
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl EisensteinInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// a² − ab + b² ≥ 0, zero only at the origin.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b)
    }

    /// (a+bω)(c+dω) = (ac − bd) + (ad + bc − bd)ω, using ω² = −1 − ω.
    pub fn mul(&self, rhs: &Self) -> Self {
        let ac = &self.a * &rhs.a;
        let bd = &self.b * &rhs.b;
        let ad_bc = &self.a * &rhs.b + &self.b * &rhs.a;
        Self::new(ac - &bd, ad_bc - bd)
    }

    /// Complex conjugate: ω̄ = ω², so conj(a+bω) = (a−b) − bω.
    pub fn conj(&self) -> Self {
        Self::new(&self.a - &self.b, -&self.b)
    }

    /// The six units ±1, ±ω, ±ω².
    pub fn units() -> [Self; 6] {
        [
            Self::new(1, 0),
            Self::new(-1, 0),
            Self::new(0, 1),
            Self::new(0, -1),
            Self::new(-1, -1), // ω² = −1 − ω
            Self::new(1, 1),
        ]
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Primary means ≡ 1 (mod 3): a ≡ 1, b ≡ 0 (mod 3).
    pub fn is_primary(&self) -> bool {
        self.a.mod_floor(&BigInt::from(3)).is_one()
            && self.b.mod_floor(&BigInt::from(3)).is_zero()
    }

    /// The unique primary associate, with the unit that produces it:
    /// returns (u, y) with y = u·x ≡ 1 (mod 3).
    pub fn primary_associate(&self) -> Result<(Self, Self), RingError> {
        if self.norm().mod_floor(&BigInt::from(3)).is_zero() {
            return Err(RingError::NotCoprimeToRamified);
        }
        let mut hit = None;
        for u in Self::units() {
            let y = u.mul(self);
            if y.is_primary() {
                debug_assert!(hit.is_none(), "two primary associates of {self:?}");
                hit = Some((u, y));
                #[cfg(not(debug_assertions))]
                break;
            }
        }
        hit.ok_or(RingError::NotCoprimeToRamified)
    }

    /// Quotient and remainder by nearest-lattice rounding; the remainder has
    /// norm at most (3/4)·norm(rhs), so Euclid terminates.
    pub fn div_rem_nearest(&self, rhs: &Self) -> (Self, Self) {
        let n = rhs.norm();
        let num = self.mul(&rhs.conj());
        let q = Self::new(round_div(&num.a, &n), round_div(&num.b, &n));
        let r = self.sub(&q.mul(rhs));
        (q, r)
    }

    /// Euclidean gcd; primary-normalized when coprime to 3, otherwise an
    /// associate chosen deterministically (max lexicographic (a, b)).
    pub fn gcd(x: &Self, y: &Self) -> Result<Self, RingError> {
        if x.is_zero() && y.is_zero() {
            return Err(RingError::BothZero);
        }
        let mut a = x.clone();
        let mut b = y.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem_nearest(&b);
            debug_assert!(r.norm() < b.norm());
            a = b;
            b = r;
        }
        match a.primary_associate() {
            Ok((_, primary)) => Ok(primary),
            Err(_) => Ok(Self::units()
                .iter()
                .map(|u| u.mul(&a))
                .max_by(|p, q| (&p.a, &p.b).cmp(&(&q.a, &q.b)))
                .unwrap()),
        }
    }
}

impl GaussianInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.a + &self.b * &self.b
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(
            &self.a * &rhs.a - &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -&self.b)
    }

    /// The four units ±1, ±i.
    pub fn units() -> [Self; 4] {
        [Self::new(1, 0), Self::new(-1, 0), Self::new(0, 1), Self::new(0, -1)]
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Primary means ≡ 1 (mod (1+i)³); (1+i)³ = −2 + 2i has norm 8, so the
    /// test is: (x − 1)·conj(−2+2i) has both coordinates divisible by 8.
    pub fn is_primary(&self) -> bool {
        let d = GaussianInt::new(-2, 2);
        let t = self.sub(&Self::one()).mul(&d.conj());
        let eight = BigInt::from(8);
        t.a.mod_floor(&eight).is_zero() && t.b.mod_floor(&eight).is_zero()
    }

    pub fn primary_associate(&self) -> Result<(Self, Self), RingError> {
        if self.norm().mod_floor(&BigInt::from(2)).is_zero() {
            return Err(RingError::NotCoprimeToRamified);
        }
        let mut hit = None;
        for u in Self::units() {
            let y = u.mul(self);
            if y.is_primary() {
                debug_assert!(hit.is_none(), "two primary associates of {self:?}");
                hit = Some((u, y));
                #[cfg(not(debug_assertions))]
                break;
            }
        }
        hit.ok_or(RingError::NotCoprimeToRamified)
    }

    /// Nearest-rounding division; remainder norm at most (1/2)·norm(rhs).
    pub fn div_rem_nearest(&self, rhs: &Self) -> (Self, Self) {
        let n = rhs.norm();
        let num = self.mul(&rhs.conj());
        let q = Self::new(round_div(&num.a, &n), round_div(&num.b, &n));
        let r = self.sub(&q.mul(rhs));
        (q, r)
    }

    pub fn gcd(x: &Self, y: &Self) -> Result<Self, RingError> {
        if x.is_zero() && y.is_zero() {
            return Err(RingError::BothZero);
        }
        let mut a = x.clone();
        let mut b = y.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem_nearest(&b);
            debug_assert!(r.norm() < b.norm());
            a = b;
            b = r;
        }
        match a.primary_associate() {
            Ok((_, primary)) => Ok(primary),
            Err(_) => Ok(Self::units()
                .iter()
                .map(|u| u.mul(&a))
                .max_by(|p, q| (&p.a, &p.b).cmp(&(&q.a, &q.b)))
                .unwrap()),
        }
    }
}

/// A ring element of either O_K, tagged by family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KElt {
    Eis(EisensteinInt),
    Gauss(GaussianInt),
}

impl KElt {
    pub fn one(family: Family) -> Self {
        match family {
            Family::Cubic => KElt::Eis(EisensteinInt::one()),
            Family::Quartic => KElt::Gauss(GaussianInt::one()),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            KElt::Eis(_) => Family::Cubic,
            KElt::Gauss(_) => Family::Quartic,
        }
    }

    pub fn coords(&self) -> (&BigInt, &BigInt) {
        match self {
            KElt::Eis(x) => (&x.a, &x.b),
            KElt::Gauss(x) => (&x.a, &x.b),
        }
    }

    pub fn norm(&self) -> BigInt {
        match self {
            KElt::Eis(x) => x.norm(),
            KElt::Gauss(x) => x.norm(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (KElt::Eis(x), KElt::Eis(y)) => KElt::Eis(x.mul(y)),
            (KElt::Gauss(x), KElt::Gauss(y)) => KElt::Gauss(x.mul(y)),
            _ => panic!("mixed-family ring multiplication"),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            KElt::Eis(x) => KElt::Eis(x.conj()),
            KElt::Gauss(x) => KElt::Gauss(x.conj()),
        }
    }

    pub fn is_primary(&self) -> bool {
        match self {
            KElt::Eis(x) => x.is_primary(),
            KElt::Gauss(x) => x.is_primary(),
        }
    }

    /// Small-coordinate view for sort keys and serialization.
    pub fn coords_i64(&self) -> (i64, i64) {
        let (a, b) = self.coords();
        (
            i64::try_from(a).expect("generator coordinate exceeds i64"),
            i64::try_from(b).expect("generator coordinate exceeds i64"),
        )
    }
}

/// A primary degree-one prime of O_K above a split rational prime p, together
/// with the residue class r to which ω (resp. i) maps under O_K/(ϖ) ≅ F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KPrime {
    pub family: Family,
    pub generator: KElt,
    pub p: u64,
    pub omega_image: u64,
}

impl KPrime {
    /// Conjugate prime, primary-normalized (conjugation preserves primarity).
    pub fn conjugate(&self) -> KPrime {
        let gen = self.generator.conj();
        debug_assert!(gen.is_primary());
        let omega_image = omega_image_of(&gen, self.p);
        KPrime { family: self.family, generator: gen, p: self.p, omega_image }
    }
}

/// Residue r with ω ≡ r (mod ϖ) for ϖ = A + Bω (resp. i ≡ r for A + Bi):
/// r = −A·B^{−1} mod p. B is invertible because norm(ϖ) = p is prime.
fn omega_image_of(gen: &KElt, p: u64) -> u64 {
    let (a, b) = gen.coords();
    let pm = BigInt::from(p);
    let am = u64::try_from(a.mod_floor(&pm)).unwrap();
    let bm = u64::try_from(b.mod_floor(&pm)).unwrap();
    assert!(bm != 0, "degenerate generator: p | b");
    mul_mod((p - am) % p, inv_mod(bm, p), p)
}

/// Split a rational prime p ≡ 1 (mod 3) resp. (mod 4) into its conjugate pair
/// of primary primes, ordered lexicographically by generator coordinates.
///
/// The generator is found as gcd(p, u − ω) where u is a primitive cube root
/// of unity mod p (resp. gcd(p, s − i) with s² ≡ −1 mod p): an O(log p)
/// descent in place of exhaustive norm-equation search.
pub fn split_prime(family: Family, p: u64) -> Result<(KPrime, KPrime), RingError> {
    if !family.splits(p) || !is_prime(p) {
        return Err(RingError::NotSplitPrime(p));
    }
    let gen0 = match family {
        Family::Cubic => {
            let u = root_of_unity_mod(p, 3);
            let x = EisensteinInt::new(BigInt::from(u), BigInt::from(-1));
            let g = EisensteinInt::gcd(&EisensteinInt::new(BigInt::from(p), BigInt::from(0)), &x)
                .expect("gcd(p, u-ω)");
            KElt::Eis(g)
        }
        Family::Quartic => {
            let s = root_of_unity_mod(p, 4);
            let x = GaussianInt::new(BigInt::from(s), BigInt::from(-1));
            let g = GaussianInt::gcd(&GaussianInt::new(BigInt::from(p), BigInt::from(0)), &x)
                .expect("gcd(p, s-i)");
            KElt::Gauss(g)
        }
    };
    assert_eq!(gen0.norm(), BigInt::from(p), "descent did not reach norm p");
    let first = KPrime {
        family,
        omega_image: omega_image_of(&gen0, p),
        generator: gen0,
        p,
    };
    let second = first.conjugate();
    // Defining polynomial of the embedded root of unity.
    for kp in [&first, &second] {
        let r = kp.omega_image;
        match family {
            Family::Cubic => {
                assert_eq!((mul_mod(r, r, p) + r + 1) % p, 0, "r²+r+1 ≢ 0 mod {p}")
            }
            Family::Quartic => assert_eq!(mul_mod(r, r, p), p - 1, "r² ≢ −1 mod {p}"),
        }
    }
    let (fa, fb) = first.generator.coords_i64();
    let (sa, sb) = second.generator.coords_i64();
    if (fa, fb) <= (sa, sb) {
        Ok((first, second))
    } else {
        Ok((second, first))
    }
}

/// An element of exact multiplicative order d in F_p* (d | p − 1, d ∈ {3, 4}).
fn root_of_unity_mod(p: u64, d: u64) -> u64 {
    let e = (p - 1) / d;
    for a in 2..p {
        let t = pow_mod(a, e, p);
        if t != 1 && (d != 4 || mul_mod(t, t, p) == p - 1) {
            return t;
        }
    }
    unreachable!("no order-{d} element mod {p}")
}
