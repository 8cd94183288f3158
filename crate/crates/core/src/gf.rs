//! Finite fields GF(p^f) with elements stored as integer codes.
//!
//! The code of the residue `c_0 + c_1 x + ... + c_{f-1} x^{f-1}` is
//! `c_0 + c_1 p + ... + c_{f-1} p^{f-1}`. Code 0 is zero and code 1 is one.
//! Multiplication and inversion go through log/antilog tables.

use std::fmt;
use thiserror::Error;

/// A field element, given by its code.
pub type Elem = u32;

/// Largest field order accepted by [`Field::new`].
pub const DEFAULT_ORDER_CAP: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{f} exceeds the cap {cap}")]
    OrderCap { p: u32, f: u32, cap: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("code {code} is not an element of GF({q})")]
    ForeignElement { code: u64, q: u32 },
    #[error("polynomial {0:?} is not primitive")]
    NotPrimitive(Vec<u32>),
}

/// Conway polynomials (coefficients from the constant term up) for the
/// small extension fields in common use.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 2, &[3, 6, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 2, &[2, 12, 1]),
];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors of `n`, in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `q = p^f` if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = prime_divisors(q)[0];
    let mut r = q;
    let mut f = 0;
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p as u32, f))
}

/// An immutable finite field with precomputed tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    /// `exp[k] = g^k` for `k < 2(q-1)`, where `g` is the table generator.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    /// Addition table for odd characteristic and `q <= 256`.
    add_table: Option<Vec<u16>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.modulus == other.modulus
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) modulus {:?}", self.q, self.modulus)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl Field {
    /// The field of order `p^f` with its designated modulus.
    pub fn new(p: u32, f: u32) -> Result<Field, GfError> {
        Self::with_cap(p, f, DEFAULT_ORDER_CAP)
    }

    /// The field of order `q`, which must be a prime power.
    pub fn of_order(q: u32) -> Result<Field, GfError> {
        match prime_power(q as u64) {
            Some((p, f)) => Field::new(p, f),
            None => Err(GfError::NotPrime(q)),
        }
    }

    pub fn with_cap(p: u32, f: u32, cap: u64) -> Result<Field, GfError> {
        if !is_prime(p as u64) {
            return Err(GfError::NotPrime(p));
        }
        if f == 0 {
            return Err(GfError::ZeroDegree);
        }
        let order = (p as u64).checked_pow(f).filter(|&o| o <= cap);
        order.ok_or(GfError::OrderCap { p, f, cap })?;
        let modulus = if f == 1 {
            vec![0, 1]
        } else if let Some(&(_, _, c)) = CONWAY.iter().find(|e| e.0 == p && e.1 == f) {
            c.to_vec()
        } else {
            least_primitive_polynomial(p, f)
        };
        Self::with_modulus(p, f, modulus)
    }

    /// Builds GF(p^f) from an explicit monic modulus (constant term first).
    /// For `f >= 2` the modulus must be primitive.
    pub fn with_modulus(p: u32, f: u32, modulus: Vec<u32>) -> Result<Field, GfError> {
        if !is_prime(p as u64) {
            return Err(GfError::NotPrime(p));
        }
        let q = p.pow(f);
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        if f == 1 {
            let g = (1..p).find(|&g| mult_order_mod(g, p) == p - 1).unwrap_or(1);
            let mut x = 1u32;
            for k in 0..n {
                exp[k] = x;
                log[x as usize] = k as u32;
                x = ((x as u64 * g as u64) % p as u64) as u32;
            }
        } else {
            if modulus.len() != f as usize + 1 || modulus[f as usize] != 1 {
                return Err(GfError::NotPrimitive(modulus));
            }
            let mut seen = vec![false; q as usize];
            let mut x = 1u32;
            for k in 0..n {
                if seen[x as usize] {
                    return Err(GfError::NotPrimitive(modulus));
                }
                seen[x as usize] = true;
                exp[k] = x;
                log[x as usize] = k as u32;
                x = times_x(x, p, &modulus);
            }
            if x != 1 {
                return Err(GfError::NotPrimitive(modulus));
            }
        }
        for k in n..2 * n {
            exp[k] = exp[k - n];
        }
        let neg = (0..q).map(|a| digitwise(a, 0, p, |x, _| (p - x) % p)).collect();
        let add_table = (p != 2 && q <= 256).then(|| {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digitwise(a, b, p, |x, y| (x + y) % p) as u16;
                }
            }
            t
        });
        Ok(Field { p, f, q, modulus, exp, log, neg, add_table })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.f
    }
    pub fn order(&self) -> u32 {
        self.q
    }
    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn is_prime_field(&self) -> bool {
        self.f == 1
    }

    pub fn check(&self, code: u64) -> Result<Elem, GfError> {
        if code < self.q as u64 {
            Ok(code as Elem)
        } else {
            Err(GfError::ForeignElement { code, q: self.q })
        }
    }

    /// Reduces an integer into the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            a ^ b
        } else if self.f == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if let Some(t) = &self.add_table {
            t[(a * self.q + b) as usize] as Elem
        } else {
            let p = self.p;
            digitwise(a, b, p, |x, y| (x + y) % p)
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            0
        } else if self.f == 1 {
            ((a as u64 * b as u64) % self.p as u64) as Elem
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a == 0 {
            return Err(GfError::ZeroInverse);
        }
        let n = self.q - 1;
        Ok(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// `a^(p^j)`; the exponent `j` is taken modulo `f`.
    pub fn frobenius(&self, a: Elem, j: u32) -> Elem {
        let j = j % self.f;
        if j == 0 || a == 0 {
            return a;
        }
        self.pow(a, (self.p as u64).pow(j))
    }

    /// The generator `g` of the multiplicative group used by the tables.
    /// For `f >= 2` this is the class of `x`.
    pub fn table_generator(&self) -> Elem {
        self.exp[if self.q == 2 { 0 } else { 1 }]
    }

    /// Discrete logarithm of a nonzero element with respect to
    /// [`Field::table_generator`].
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Generator power `g^k`.
    pub fn exp(&self, k: u64) -> Elem {
        self.exp[(k % (self.q as u64 - 1)) as usize]
    }

    pub fn mult_order(&self, a: Elem) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let n = (self.q - 1) as u64;
        let k = self.log[a as usize] as u64;
        Some(n / num_integer::gcd(n, k))
    }

    /// The least code of multiplicative order `q - 1`.
    pub fn primitive_element(&self) -> Elem {
        let n = (self.q - 1) as u64;
        (1..self.q).find(|&a| self.mult_order(a) == Some(n)).unwrap_or(1)
    }

    pub fn is_square(&self, a: Elem) -> bool {
        a == 0 || self.p == 2 || self.log[a as usize] % 2 == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q
    }
}

fn mult_order_mod(g: u32, p: u32) -> u32 {
    let mut x = g as u64 % p as u64;
    let mut k = 1;
    while x != 1 {
        x = x * g as u64 % p as u64;
        k += 1;
        if k > p {
            return 0;
        }
    }
    k
}

fn digitwise(mut a: u32, mut b: u32, p: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    while a > 0 || b > 0 {
        out += op(a % p, b % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// Multiplies the residue with code `a` by `x` modulo the monic `modulus`.
fn times_x(a: u32, p: u32, modulus: &[u32]) -> u32 {
    let f = modulus.len() - 1;
    let mut digits = vec![0u32; f + 1];
    let mut r = a;
    for d in digits.iter_mut().skip(1) {
        *d = r % p;
        r /= p;
    }
    let top = digits[f];
    let mut out = 0;
    let mut place = 1;
    for i in 0..f {
        let c = (digits[i] + p * p - (top * modulus[i]) % p) % p;
        out += c * place;
        place *= p;
    }
    out
}

/// The monic primitive polynomial of degree `f >= 2` over GF(p) that is
/// least when coefficients are compared from `x^{f-1}` down to the
/// constant term.
pub fn least_primitive_polynomial(p: u32, f: u32) -> Vec<u32> {
    let count = (p as u64).pow(f);
    for idx in 0..count {
        // idx enumerates (c_{f-1}, ..., c_0) with c_{f-1} most significant
        let mut coeffs = vec![0u32; f as usize + 1];
        let mut r = idx;
        for i in 0..f as usize {
            coeffs[i] = (r % p as u64) as u32;
            r /= p as u64;
        }
        coeffs[f as usize] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        if is_primitive_polynomial(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}

/// Whether the monic polynomial (constant term first) is primitive over GF(p).
pub fn is_primitive_polynomial(p: u32, coeffs: &[u32]) -> bool {
    let f = coeffs.len() - 1;
    if f == 0 || coeffs[f] != 1 {
        return false;
    }
    let n = (p as u64).pow(f as u32) - 1;
    let mut x = 1u32;
    for k in 1..=n {
        x = times_x(x, p, coeffs);
        if x == 1 {
            return k == n;
        }
        if x == 0 {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Schoolbook product of two residues, reduced by the modulus.
    fn poly_mul(field: &Field, a: u32, b: u32) -> u32 {
        let p = field.p();
        let f = field.degree() as usize;
        let digits = |mut c: u32| {
            let mut v = vec![0u32; f];
            for d in v.iter_mut() {
                *d = c % p;
                c /= p;
            }
            v
        };
        let (da, db) = (digits(a), digits(b));
        let mut prod = vec![0u32; 2 * f];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        let m = field.modulus();
        for k in (f..2 * f).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..=f {
                let t = (c * m[i]) % p;
                prod[k - f + i] = (prod[k - f + i] + p - t) % p;
            }
        }
        prod[..f].iter().rev().fold(0, |acc, &d| acc * p + d)
    }

    fn all_small_fields() -> Vec<Field> {
        let mut out = Vec::new();
        for q in 2..=512u32 {
            if let Some((p, f)) = prime_power(q as u64) {
                out.push(Field::new(p, f).unwrap());
            }
        }
        out
    }

    #[test]
    fn designated_moduli() {
        assert_eq!(Field::new(2, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[2, 2, 1]);
        assert_eq!(Field::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn quadratic_moduli_by_scan() {
        // over GF(2) only x^2+x+1 is irreducible
        let irreducible: Vec<_> = (0..4u32)
            .filter(|c| {
                let (c0, c1) = (c % 2, c / 2);
                (0..2).all(|x| (x * x + c1 * x + c0) % 2 != 0)
            })
            .collect();
        assert_eq!(irreducible, vec![3]);
        // every hardcoded modulus is primitive
        for &(p, _, c) in CONWAY {
            assert!(is_primitive_polynomial(p, c), "{c:?}");
        }
    }

    #[test]
    fn plain_lexicographic_scan_differs_for_gf9() {
        assert_eq!(least_primitive_polynomial(3, 2), vec![2, 1, 1]);
        assert!(is_primitive_polynomial(3, &[2, 2, 1]));
    }

    #[test]
    fn fallback_fields_build() {
        let f = Field::new(2, 5).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1, 0, 0, 1]);
        let f = Field::new(5, 3).unwrap();
        assert!(is_primitive_polynomial(5, f.modulus()));
    }

    #[test]
    fn errors() {
        assert_eq!(Field::new(4, 1), Err(GfError::NotPrime(4)));
        assert_eq!(Field::new(2, 0), Err(GfError::ZeroDegree));
        assert!(matches!(Field::new(2, 17), Err(GfError::OrderCap { .. })));
        assert!(matches!(Field::new(3, 11), Err(GfError::OrderCap { .. })));
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.inv(0), Err(GfError::ZeroInverse));
        assert!(f.check(5).is_err());
        assert_eq!(f.check(4), Ok(4));
        assert!(Field::with_modulus(2, 2, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn small_examples() {
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.inv(2), Ok(3));
        assert_eq!(f5.primitive_element(), 2);
        let f4 = Field::new(2, 2).unwrap();
        // x * x = x + 1
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f4.frobenius(2, 1), 3);
        let f9 = Field::new(3, 2).unwrap();
        for a in 1..9 {
            assert_eq!(f9.pow(a, 8), 1);
            assert_eq!(f9.frobenius(a, 2), a);
        }
        assert_eq!(f9.primitive_element(), 3);
        assert_eq!(f9.table_generator(), 3);
        let w = 3;
        assert_eq!(f9.mul(w, w), f9.add(w, 1));
        assert_eq!(Field::new(2, 1).unwrap().primitive_element(), 1);
        for a in 0..5 {
            assert_eq!(f5.frobenius(a, 1), a);
        }
    }

    #[test]
    fn multiplication_matches_polynomial_oracle() {
        for field in all_small_fields().into_iter().filter(|f| f.degree() > 1) {
            for a in field.elements() {
                for b in field.elements() {
                    assert_eq!(field.mul(a, b), poly_mul(&field, a, b), "{field} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for field in all_small_fields() {
            let q = field.order();
            let cs: Vec<u32> = [0, 1, q - 1, q / 2, q / 3].into_iter().collect();
            for a in 0..q {
                if a != 0 {
                    assert_eq!(field.mul(a, field.inv(a).unwrap()), 1);
                }
                assert_eq!(field.add(a, field.neg(a)), 0);
                for b in 0..q {
                    assert_eq!(field.mul(a, b), field.mul(b, a));
                    assert_eq!(field.add(a, b), field.add(b, a));
                    for &c in &cs {
                        assert_eq!(
                            field.mul(a, field.add(b, c)),
                            field.add(field.mul(a, b), field.mul(a, c))
                        );
                    }
                    let fa = field.frobenius(a, 1);
                    let fb = field.frobenius(b, 1);
                    assert_eq!(field.frobenius(field.add(a, b), 1), field.add(fa, fb));
                    assert_eq!(field.frobenius(field.mul(a, b), 1), field.mul(fa, fb));
                }
                assert_eq!(field.frobenius(a, field.degree()), a);
            }
            let g = field.primitive_element();
            assert_eq!(field.mult_order(g), Some(q as u64 - 1));
        }
    }
}
