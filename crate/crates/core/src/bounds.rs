//! Exact evaluation of the fixed-point-ratio bounds and threshold scans.
//!
//! Quantities with fractional exponents are kept as `c * base^(u/v)` and
//! compared by raising both sides to a common integer power.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("s = {s} is below n/4 for n = {n}")]
    OutOfRegime { n: u64, s: u64 },
    #[error("inputs must be positive")]
    NonPositive,
    #[error("invalid profile: {0}")]
    Profile(String),
}

type Result<T> = std::result::Result<T, BoundsError>;

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `coeff * base^exp` with a positive coefficient and base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Power {
    pub coeff: BigRational,
    pub base: BigUint,
    pub exp: Ratio<u64>,
}

impl Power {
    pub fn new(coeff: BigRational, base: impl Into<BigUint>, exp: Ratio<u64>) -> Power {
        Power { coeff, base: base.into(), exp }
    }

    pub fn integer(x: BigRational) -> Power {
        Power { coeff: x, base: BigUint::one(), exp: Ratio::from_integer(0) }
    }

    /// `self^k`; `k` must clear the exponent's denominator.
    pub fn raised(&self, k: u64) -> BigRational {
        let e = self.exp * Ratio::from_integer(k);
        assert!(e.is_integer(), "exponent denominator not cleared");
        let b = BigInt::from(self.base.pow(e.to_integer() as u32));
        num_traits::pow::pow(self.coeff.clone(), k as usize) * rat(b)
    }

    pub fn cmp_power(&self, other: &Power) -> Ordering {
        let k = self.exp.denom().lcm(other.exp.denom());
        self.raised(k).cmp(&other.raised(k))
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.cmp_power(&Power::integer(r.clone()))
    }

    pub fn approx(&self) -> f64 {
        let c = self.coeff.numer().to_f64().unwrap_or(f64::INFINITY) / self.coeff.denom().to_f64().unwrap_or(f64::INFINITY);
        let e = *self.exp.numer() as f64 / *self.exp.denom() as f64;
        c * self.base.to_f64().unwrap_or(f64::INFINITY).powf(e)
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_zero() || self.base.is_one() {
            write!(f, "{}", self.coeff)
        } else if self.coeff.is_one() {
            write!(f, "{}^({})", self.base, self.exp)
        } else {
            write!(f, "({})*{}^({})", self.coeff, self.base, self.exp)
        }
    }
}

/// Lower bound for a prime-order class size with eigenspace codimension
/// `s`: `q^(ns)/(2n)` for `s >= n/2` and `q^(2s(n-s))/(2n)` for
/// `n/4 <= s < n/2`.
pub fn class_size_lower(n: u64, q: u64, s: u64) -> Result<BigRational> {
    if s == 0 || s > n || 4 * s < n {
        return Err(BoundsError::OutOfRegime { n, s });
    }
    let e = if 2 * s >= n { n * s } else { 2 * s * (n - s) };
    Ok(rat(BigInt::from(q).pow(e as u32)) / rat(2 * n))
}

/// The regime-wide floor: `q^(n^2/2)/(2n)` or `q^(3n^2/8)/(2n)`.
pub fn class_size_floor(n: u64, q: u64, half_regime: bool) -> Power {
    let exp = if half_regime { Ratio::new(n * n, 2) } else { Ratio::new(3 * n * n, 8) };
    Power::new(BigRational::new(BigInt::one(), BigInt::from(2 * n)), q, exp)
}

/// `B (A/B)^c`.
pub fn qhat_ab(a: &BigRational, b: &BigRational, c: u32) -> Result<BigRational> {
    if !a.is_positive() || !b.is_positive() {
        return Err(BoundsError::NonPositive);
    }
    Ok(b.clone() * num_traits::pow::pow(a.clone() / b.clone(), c as usize))
}

/// Parameters of a primitive solvable subgroup: `m | n` is the degree of
/// the abelian field extension and `e = n/m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimitiveProfile {
    pub n: u64,
    pub q: u64,
    pub m: u64,
}

impl PrimitiveProfile {
    pub fn new(n: u64, q: u64, m: u64) -> Result<PrimitiveProfile> {
        if m == 0 || n % m != 0 {
            return Err(BoundsError::Profile(format!("m = {m} does not divide n = {n}")));
        }
        let p = PrimitiveProfile { n, q, m };
        let am = BigUint::from(q).pow(m as u32) - 1u32;
        for r in crate::gf::prime_divisors(p.e()) {
            if !(&am % r).is_zero() {
                return Err(BoundsError::Profile(format!("prime {r} of e does not divide q^m - 1")));
            }
        }
        Ok(p)
    }

    pub fn e(&self) -> u64 {
        self.n / self.m
    }

    /// `floor(log2 e)`.
    pub fn l(&self) -> u64 {
        63 - self.e().leading_zeros() as u64
    }
}

/// `((q^m - 1)/(q - 1)) m min{e^(2l+1), e^(13/2)}` with `l = floor(log2 e)`.
pub fn primitive_h_bound(p: &PrimitiveProfile) -> Power {
    let e = p.e();
    let qm = BigUint::from(p.q).pow(p.m as u32) - 1u32;
    let lead = rat(BigInt::from(qm / (p.q - 1))) * rat(p.m);
    if e == 1 {
        return Power::integer(lead);
    }
    let exp = Ratio::from_integer(2 * p.l() + 1).min(Ratio::new(13, 2));
    Power::new(lead, e, exp)
}

/// The same bound with `|C:F|` replaced by the exact product of
/// `|Sp_{2l_i}(p_i)|` over the given `(p_i, l_i)`, keeping `|F:A| = e^2`.
pub fn primitive_h_bound_sp(p: &PrimitiveProfile, factors: &[(u64, u64)]) -> BigRational {
    let qm = BigUint::from(p.q).pow(p.m as u32) - 1u32;
    let mut v = rat(BigInt::from(qm / (p.q - 1))) * rat(p.m) * rat(p.e() * p.e());
    for &(pi, li) in factors {
        v *= rat(BigInt::from(sp_order(pi, li)));
    }
    v
}

/// `|Sp_{2l}(p)| = p^(l^2) prod_{j<=l} (p^(2j) - 1)`.
pub fn sp_order(p: u64, l: u64) -> BigUint {
    let pb = BigUint::from(p);
    let mut o = pb.pow((l * l) as u32);
    for j in 1..=l {
        o *= pb.pow(2 * j as u32) - 1u32;
    }
    o
}

/// `q^(9n/4) / 2.8`.
pub fn gluck_manz(n: u64, q: u64) -> Power {
    Power::new(BigRational::new(5.into(), 14.into()), q, Ratio::new(9 * n, 4))
}

/// Whether `order < q^(9n/4)/2.8`, decided as `order^4 14^4 < q^(9n) 5^4`.
pub fn below_gluck_manz(order: &BigUint, n: u64, q: u64) -> bool {
    order.pow(4) * BigUint::from(14u32).pow(4) < BigUint::from(q).pow((9 * n) as u32) * BigUint::from(5u32).pow(4)
}

/// Least `k` with `d^k >= order`.
pub fn log_lower(order: &BigUint, d: u64) -> u64 {
    assert!(d >= 2, "degree must be at least 2");
    let mut k = 0;
    let mut pw = BigUint::one();
    while &pw < order {
        pw *= d;
        k += 1;
    }
    k
}

/// Which denominator defines `a = n(q^n - 1)/denominator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Denominator {
    QMinusOne,
    NMinusOne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinbaseRow {
    pub n: u64,
    pub q: u64,
    pub denominator: Denominator,
    /// `a` as an exact rational.
    pub a: BigRational,
    /// `2n a^2`; the ratio `a^2/b` with `b = q^(n^2/2)/(2n)` is this over `q^(n^2/2)`.
    pub scaled: BigRational,
    /// Whether `a^2/b >= 1`, i.e. the bound does not settle the case.
    pub fails: bool,
}

pub fn sinbase_row(n: u64, q: u64, den: Denominator) -> SinbaseRow {
    let top = rat(BigInt::from(n)) * rat(BigInt::from(BigUint::from(q).pow(n as u32) - 1u32));
    let a = match den {
        Denominator::QMinusOne => top / rat(q - 1),
        Denominator::NMinusOne => top / rat(n - 1),
    };
    let scaled = a.clone() * a.clone() * rat(2 * n);
    // compare squares: (2n a^2)^2 >= q^(n^2)
    let lhs = scaled.clone() * scaled.clone();
    let rhs = rat(BigInt::from(BigUint::from(q).pow((n * n) as u32)));
    let fails = lhs >= rhs;
    SinbaseRow { n, q, denominator: den, a, scaled, fails }
}

/// All `(n, q)` with `q` a prime power in range where `a^2/b >= 1`.
pub fn sinbase_scan(ns: std::ops::RangeInclusive<u64>, qs: std::ops::RangeInclusive<u64>, den: Denominator) -> Vec<SinbaseRow> {
    let mut out = Vec::new();
    for n in ns {
        for q in qs.clone() {
            if crate::gf::prime_power(q).is_some() {
                let row = sinbase_row(n, q, den);
                if row.fails {
                    out.push(row);
                }
            }
        }
    }
    out
}

/// `(25^2 + 500^2 + 624^2) / ((1/10) q^12)`, the prime-order element
/// count bound for the 5-dimensional extraspecial-normaliser case.
pub fn case2_n5(q: u64) -> BigRational {
    let a2 = 25u64 * 25 + 500 * 500 + 624 * 624;
    rat(a2) * rat(10) / rat(BigInt::from(q).pow(12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_sizes() {
        assert_eq!(class_size_lower(2, 5, 1).unwrap(), BigRational::new(25.into(), 4.into()));
        assert_eq!(class_size_lower(3, 2, 3).unwrap(), BigRational::new(512.into(), 6.into()));
        assert!(class_size_lower(8, 2, 1).is_err());
        let floor = class_size_floor(5, 2, true);
        assert_eq!(floor.exp, Ratio::new(25, 2));
        // (1/10) 2^12.5 lies strictly between (1/10) 2^12 and (1/10) 2^13
        let lo = BigRational::new(4096.into(), 10.into());
        let hi = BigRational::new(8192.into(), 10.into());
        assert_eq!(floor.cmp_rational(&lo), Ordering::Greater);
        assert_eq!(floor.cmp_rational(&hi), Ordering::Less);
    }

    #[test]
    fn qhat_ab_basics() {
        let five = rat(5);
        assert_eq!(qhat_ab(&five, &five, 3).unwrap(), five);
        assert!(qhat_ab(&rat(0), &five, 2).is_err());
    }

    #[test]
    fn h_bounds() {
        let p = PrimitiveProfile::new(4, 3, 4).unwrap();
        assert_eq!(primitive_h_bound(&p), Power::integer(rat(40 * 4)));
        let p = PrimitiveProfile::new(4, 5, 1).unwrap();
        assert_eq!(p.l(), 2);
        let h = primitive_h_bound(&p);
        assert_eq!(h.exp, Ratio::from_integer(5));
        for q in [3u64, 5, 7, 9, 11] {
            let p = PrimitiveProfile::new(4, q, 2).unwrap();
            assert_eq!(primitive_h_bound_sp(&p, &[(2, 1)]), rat(48 * (q + 1)));
        }
        assert!(PrimitiveProfile::new(4, 4, 2).is_err());
        assert!(PrimitiveProfile::new(4, 3, 3).is_err());
    }

    #[test]
    fn gluck_manz_checks() {
        let g = gluck_manz(4, 2);
        assert_eq!(g.cmp_rational(&(rat(512) * BigRational::new(5.into(), 14.into()))), Ordering::Equal);
        for q in 3..50u64 {
            if crate::gf::prime_power(q).is_some() {
                assert!(below_gluck_manz(&BigUint::from(q - 1), 1, q));
            }
        }
        // 2^(9/4)/2.8 is about 1.70
        assert!(below_gluck_manz(&BigUint::from(1u32), 1, 2));
        assert!(!below_gluck_manz(&BigUint::from(2u32), 1, 2));
    }

    #[test]
    fn log_lower_values() {
        assert_eq!(log_lower(&BigUint::from(35u32), 35), 1);
        assert_eq!(log_lower(&BigUint::from(40320u32), 35), 3);
        assert_eq!(log_lower(&BigUint::one(), 7), 0);
    }

    #[test]
    fn sinbase_boundary() {
        assert!(sinbase_row(6, 2, Denominator::QMinusOne).fails);
        assert!(!sinbase_row(4, 13, Denominator::QMinusOne).fails);
        assert!(!sinbase_row(7, 2, Denominator::QMinusOne).fails);
    }

    #[test]
    fn case2_threshold() {
        assert!(case2_n5(3) > BigRational::one());
        assert!(case2_n5(4) < BigRational::one());
    }
}
