//! Finite-field arithmetic GF(p^m) for q = p^m up to 2^16, backed by
//! log/antilog tables.
//!
//! Field elements are integers in [0, q) read as coefficient vectors over
//! GF(p) in the polynomial basis: value = sum c_i p^i. The modulus is chosen
//! deterministically (see [`Field::new`]), so every element value, every
//! table, and every downstream code construction is reproducible bit for bit.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Immutable arithmetic context for GF(p^m).
#[derive(Debug)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficients low-to-high over GF(p), length m+1.
    /// For m = 1 this is x - g where g is the chosen generator.
    modulus: Vec<u16>,
    /// exp[i] = g^i for i in [0, 2(q-1)); doubled so a log-sum never wraps.
    exp: Vec<u16>,
    /// log[v] for v in [1, q); log[0] is a sentinel and never read.
    log: Vec<u16>,
}

/// Cheap-to-clone handle to a [`FieldSpec`].
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        // Construction is deterministic in (p, m), so (p, m) identifies the field.
        Arc::ptr_eq(&self.0, &other.0) || (self.p() == other.p() && self.m() == other.m())
    }
}
impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial arithmetic over GF(p) on coefficient vectors (low-to-high),
/// used only while building the tables.
mod ppoly {
    pub fn trim(v: &mut Vec<u16>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Remainder of a modulo b (b monic), over GF(p).
    pub fn rem(a: &[u16], b: &[u16], p: u16) -> Vec<u16> {
        let mut r: Vec<u16> = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        while r.len() > db {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - db;
            for (i, &bc) in b.iter().enumerate() {
                let idx = shift + i;
                let sub = (lead as u32 * bc as u32) % p as u32;
                r[idx] = ((r[idx] as u32 + p as u32 - sub as u32) % p as u32) as u16;
            }
            trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        r
    }
}

impl FieldSpec {
    /// True if the monic polynomial (low-to-high, length m+1) has no monic
    /// factor of degree 1..=m/2. Trial division.
    fn is_irreducible(poly: &[u16], p: u16) -> bool {
        let m = poly.len() - 1;
        if poly[0] == 0 {
            return false; // divisible by x
        }
        for deg in 1..=(m / 2) {
            // Enumerate monic divisors of this degree by their low coefficients.
            let count = (p as u64).pow(deg as u32);
            for enc in 0..count {
                let mut div = Vec::with_capacity(deg + 1);
                let mut e = enc;
                for _ in 0..deg {
                    div.push((e % p as u64) as u16);
                    e /= p as u64;
                }
                div.push(1);
                if ppoly::rem(poly, &div, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Build the exp/log tables for the candidate modulus with generator x.
    /// Returns None if x is not primitive (its cycle closes before q-1).
    fn try_tables_ext(p: u32, m: u32, modulus: &[u16]) -> Option<(Vec<u16>, Vec<u16>)> {
        let q = p.pow(m);
        let qm1 = (q - 1) as usize;
        let mut exp = vec![0u16; 2 * qm1];
        let mut log = vec![0u16; q as usize];
        // Element as digit vector, start at 1.
        let mut cur = vec![0u16; m as usize];
        cur[0] = 1;
        for i in 0..qm1 {
            let mut val: u32 = 0;
            for d in (0..m as usize).rev() {
                val = val * p + cur[d] as u32;
            }
            if val == 1 && i > 0 {
                return None; // short cycle, x not primitive
            }
            exp[i] = val as u16;
            log[val as usize] = i as u16;
            // Multiply by x: shift digits up, reduce by modulus.
            let carry = cur[m as usize - 1];
            for d in (1..m as usize).rev() {
                cur[d] = cur[d - 1];
            }
            cur[0] = 0;
            if carry != 0 {
                // x^m = -(modulus without leading term)
                for d in 0..m as usize {
                    let sub = (carry as u32 * modulus[d] as u32) % p;
                    cur[d] = ((cur[d] as u32 + p - sub) % p) as u16;
                }
            }
        }
        for i in 0..qm1 {
            exp[qm1 + i] = exp[i];
        }
        Some((exp, log))
    }

    fn try_tables_prime(p: u32, g: u32) -> Option<(Vec<u16>, Vec<u16>)> {
        let qm1 = (p - 1) as usize;
        let mut exp = vec![0u16; 2 * qm1];
        let mut log = vec![0u16; p as usize];
        let mut cur: u32 = 1;
        for i in 0..qm1 {
            if cur == 1 && i > 0 {
                return None;
            }
            exp[i] = cur as u16;
            log[cur as usize] = i as u16;
            cur = cur * g % p;
        }
        if cur != 1 {
            return None;
        }
        for i in 0..qm1 {
            exp[qm1 + i] = exp[i];
        }
        Some((exp, log))
    }
}

impl Field {
    /// Construct GF(p^m) with p prime and p^m <= 2^16.
    ///
    /// The modulus is the least monic degree-m polynomial, ordered by its
    /// integer encoding sum c_i p^i, that is irreducible and has x as a
    /// primitive element. For m = 1 the modulus is x - g with g the least
    /// primitive root, and g is the field generator.
    pub fn new(p: u64, m: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u128).checked_pow(m).ok_or(Error::OrderOverCap(u64::MAX))?;
        if q > 65536 {
            return Err(Error::OrderOverCap(q as u64));
        }
        let p = p as u32;
        let q = q as u32;

        if m == 1 {
            for g in 2..p {
                if let Some((exp, log)) = FieldSpec::try_tables_prime(p, g) {
                    let spec = FieldSpec {
                        p,
                        m,
                        q,
                        modulus: vec![(p - g) as u16, 1],
                        exp,
                        log,
                    };
                    return Ok(Field(Arc::new(spec)));
                }
            }
            // GF(2) and GF(3): generator is p-1.
            let g = p - 1;
            let (exp, log) = FieldSpec::try_tables_prime(p, g).ok_or(Error::NoModulus(m))?;
            let spec = FieldSpec {
                p,
                m,
                q,
                modulus: vec![(p - g) as u16, 1],
                exp,
                log,
            };
            return Ok(Field(Arc::new(spec)));
        }

        let count = (p as u64).pow(m);
        for enc in 0..count {
            let mut modulus = Vec::with_capacity(m as usize + 1);
            let mut e = enc;
            for _ in 0..m {
                modulus.push((e % p as u64) as u16);
                e /= p as u64;
            }
            modulus.push(1);
            if !FieldSpec::is_irreducible(&modulus, p as u16) {
                continue;
            }
            if let Some((exp, log)) = FieldSpec::try_tables_ext(p, m, &modulus) {
                let spec = FieldSpec { p, m, q, modulus, exp, log };
                return Ok(Field(Arc::new(spec)));
            }
        }
        Err(Error::NoModulus(m))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn m(&self) -> u32 {
        self.0.m
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    /// Monic modulus coefficients, low-to-high.
    pub fn modulus(&self) -> &[u16] {
        &self.0.modulus
    }
    /// The fixed multiplicative generator (g for prime fields, x otherwise).
    pub fn generator(&self) -> u16 {
        self.0.exp[1]
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 0 }
    }
    pub fn one(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 1 }
    }

    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.q() as u64 {
            return Err(Error::ValueOutOfRange { value, q: self.q() as u64 });
        }
        Ok(FieldElement { field: self.clone(), value: value as u16 })
    }

    // Raw arithmetic on element values. These are the kernels everything
    // else (polynomials, elimination, enumeration) runs on.

    pub fn add(&self, a: u16, b: u16) -> u16 {
        let s = &*self.0;
        if s.m == 1 {
            return ((a as u32 + b as u32) % s.p) as u16;
        }
        let mut out: u32 = 0;
        let mut pw: u32 = 1;
        let (mut x, mut y) = (a as u32, b as u32);
        for _ in 0..s.m {
            out += (x % s.p + y % s.p) % s.p * pw;
            x /= s.p;
            y /= s.p;
            pw *= s.p;
        }
        out as u16
    }

    pub fn neg(&self, a: u16) -> u16 {
        let s = &*self.0;
        if s.m == 1 {
            return if a == 0 { 0 } else { (s.p - a as u32) as u16 };
        }
        let mut out: u32 = 0;
        let mut pw: u32 = 1;
        let mut x = a as u32;
        for _ in 0..s.m {
            out += (s.p - x % s.p) % s.p * pw;
            x /= s.p;
            pw *= s.p;
        }
        out as u16
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = &*self.0;
        s.exp[s.log[a as usize] as usize + s.log[b as usize] as usize]
    }

    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::InverseOfZero);
        }
        let s = &*self.0;
        let qm1 = (s.q - 1) as usize;
        Ok(s.exp[(qm1 - s.log[a as usize] as usize) % qm1])
    }

    pub fn div(&self, a: u16, b: u16) -> Result<u16> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        let s = &*self.0;
        let qm1 = (s.q - 1) as u64;
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let l = s.log[a as usize] as u64;
        s.exp[((l * (e % qm1)) % qm1) as usize]
    }

    /// g^e for the field generator g.
    pub fn gen_pow(&self, e: usize) -> u16 {
        let s = &*self.0;
        s.exp[e % (s.q as usize - 1)]
    }

    pub fn log(&self, a: u16) -> Result<usize> {
        if a == 0 {
            return Err(Error::InverseOfZero);
        }
        Ok(self.0.log[a as usize] as usize)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: u16) -> Result<usize> {
        if a == 0 {
            return Err(Error::InverseOfZero);
        }
        // a = g^l has order (q-1)/gcd(l, q-1); gcd(0, q-1) = q-1 covers a = 1.
        let qm1 = self.q() as usize - 1;
        Ok(qm1 / gcd(self.0.log[a as usize] as usize, qm1))
    }

    /// A primitive n-th root of unity, derived deterministically from the
    /// field generator as g^((q-1)/n). Errors unless n | q-1.
    pub fn root_of_unity(&self, n: usize) -> Result<FieldElement> {
        let qm1 = self.q() as usize - 1;
        if n == 0 || qm1 % n != 0 {
            return Err(Error::NotARootOrder { n, q_minus_1: qm1 });
        }
        let a = self.gen_pow(qm1 / n);
        debug_assert_eq!(self.order_of(a).unwrap(), n);
        Ok(FieldElement { field: self.clone(), value: a })
    }

    /// True if a lies in the subfield of order q_base (requires q_base^d = q).
    pub fn in_subfield(&self, a: u16, q_base: u32) -> bool {
        self.pow(a, q_base as u64) == a
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// An element of a [`Field`], carrying its context.
///
/// Arithmetic on elements from different fields is a hard error (the
/// operators panic; use the `Field` methods or `checked_*` variants where a
/// `Result` is wanted).
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: u16,
}

impl FieldElement {
    pub fn value(&self) -> u16 {
        self.value
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn checked_add(&self, rhs: &FieldElement) -> Result<FieldElement> {
        self.same_field(rhs)?;
        Ok(FieldElement {
            field: self.field.clone(),
            value: self.field.add(self.value, rhs.value),
        })
    }

    pub fn checked_sub(&self, rhs: &FieldElement) -> Result<FieldElement> {
        self.same_field(rhs)?;
        Ok(FieldElement {
            field: self.field.clone(),
            value: self.field.sub(self.value, rhs.value),
        })
    }

    pub fn checked_mul(&self, rhs: &FieldElement) -> Result<FieldElement> {
        self.same_field(rhs)?;
        Ok(FieldElement {
            field: self.field.clone(),
            value: self.field.mul(self.value, rhs.value),
        })
    }

    pub fn checked_inv(&self) -> Result<FieldElement> {
        Ok(FieldElement {
            field: self.field.clone(),
            value: self.field.inv(self.value)?,
        })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            value: self.field.pow(self.value, e),
        }
    }

    pub fn order(&self) -> Result<usize> {
        self.field.order_of(self.value)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in GF({})", self.value, self.field.q())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.value == other.value
    }
}
impl Eq for FieldElement {}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("mixed-field add")
    }
}
impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("mixed-field sub")
    }
}
impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("mixed-field mul")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(12, 1).unwrap_err(), Error::NotPrime(12));
        assert_eq!(Field::new(2, 17).unwrap_err(), Error::OrderOverCap(131072));
        assert_eq!(Field::new(257, 2).unwrap_err(), Error::OrderOverCap(66049));
        assert_eq!(Field::new(5, 0).unwrap_err(), Error::ZeroDegree);
    }

    #[test]
    fn gf13_generator_is_two() {
        let f = Field::new(13, 1).unwrap();
        assert_eq!(f.generator(), 2);
        assert_eq!(f.modulus(), &[11, 1]); // x - 2
    }

    #[test]
    fn gf13_inverse_of_seven_is_two() {
        let f = Field::new(13, 1).unwrap();
        assert_eq!(f.mul(7, 2), 1);
        assert_eq!(f.inv(7).unwrap(), 2);
    }

    #[test]
    fn root_of_unity_orders() {
        let f = Field::new(13, 1).unwrap();
        let a = f.root_of_unity(12).unwrap();
        assert_eq!(a.value(), 2);
        assert_eq!(f.pow(2, 12), 1);
        assert_ne!(f.pow(2, 6), 1);
        assert_ne!(f.pow(2, 4), 1);

        assert_eq!(f.root_of_unity(1).unwrap().value(), 1);
        assert_eq!(
            f.root_of_unity(5).unwrap_err(),
            Error::NotARootOrder { n: 5, q_minus_1: 12 }
        );
    }

    #[test]
    fn root_of_unity_never_one_early() {
        for (p, m) in [(13u64, 1u32), (3, 2), (2, 6)] {
            let f = Field::new(p, m).unwrap();
            let qm1 = f.q() as usize - 1;
            for n in 1..=qm1 {
                if qm1 % n != 0 {
                    continue;
                }
                let a = f.root_of_unity(n).unwrap().value();
                for t in 1..n {
                    assert_ne!(f.pow(a, t as u64), 1, "order {n} root returned to 1 at {t}");
                }
                assert_eq!(f.pow(a, n as u64), 1);
            }
        }
    }

    #[test]
    fn table_consistency_whole_field() {
        for (p, m) in [(13u64, 1u32), (3, 2), (2, 6), (5, 2), (2, 8)] {
            let f = Field::new(p, m).unwrap();
            for v in 1..f.q() as u16 {
                assert_eq!(f.gen_pow(f.log(v).unwrap()), v);
            }
        }
    }

    #[test]
    fn field_axioms_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, m) in [(13u64, 1u32), (3, 2), (2, 6), (163, 1)] {
            let f = Field::new(p, m).unwrap();
            for _ in 0..500 {
                let a = rng.random_range(0..f.q()) as u16;
                let b = rng.random_range(0..f.q()) as u16;
                let c = rng.random_range(0..f.q()) as u16;
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                    // Lagrange: a^(q-1) = 1
                    assert_eq!(f.pow(a, f.q() as u64 - 1), 1);
                }
            }
        }
    }

    #[test]
    fn mixed_field_is_an_error() {
        let f13 = Field::new(13, 1).unwrap();
        let f9 = Field::new(3, 2).unwrap();
        let a = f13.element(5).unwrap();
        let b = f9.element(5).unwrap();
        assert_eq!(a.checked_add(&b).unwrap_err(), Error::MixedFields);
        assert_eq!(f13.zero().checked_inv().unwrap_err(), Error::InverseOfZero);
    }

    #[test]
    fn subfield_membership() {
        // GF(16) contains GF(4) = {0, 1, and the two order-3 elements}.
        let f = Field::new(2, 4).unwrap();
        let members: Vec<u16> = (0..16).filter(|&v| f.in_subfield(v, 4)).collect();
        assert_eq!(members.len(), 4);
        assert!(members.contains(&0) && members.contains(&1));
        for &v in &members {
            if v > 1 {
                assert_eq!(f.order_of(v).unwrap() % 3, 0);
            }
        }
    }

    #[test]
    fn shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Field>();
        assert_send_sync::<FieldElement>();
    }
}
