//! Dense univariate polynomials over a [`Field`], low-to-high coefficients.
//!
//! Schoolbook arithmetic throughout; every length in this toolkit is at most
//! a few hundred.

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    /// Canonical form: no trailing zero coefficients; empty = zero polynomial.
    coeffs: Vec<u16>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Poly {
    pub fn new(field: &Field, coeffs: Vec<u16>) -> Poly {
        let mut p = Poly { field: field.clone(), coeffs };
        p.trim();
        p
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: vec![] }
    }

    pub fn one(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: vec![1] }
    }

    /// The monomial c*x^d.
    pub fn monomial(field: &Field, c: u16, d: usize) -> Poly {
        if c == 0 {
            return Poly::zero(field);
        }
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        Poly { field: field.clone(), coeffs }
    }

    /// x^n - 1.
    pub fn x_n_minus_1(field: &Field, n: usize) -> Poly {
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = field.neg(1);
        coeffs[n] = 1;
        Poly { field: field.clone(), coeffs }
    }

    /// prod (x - root) over the given root values.
    pub fn from_roots(field: &Field, roots: &[u16]) -> Poly {
        let mut g = Poly::one(field);
        for &r in roots {
            g = g.mul(&Poly::new(field, vec![field.neg(r), 1]));
        }
        g
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u16 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0u16; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f.add(self.coeff(i), rhs.coeff(i));
        }
        Poly::new(f, out)
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0u16; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f.sub(self.coeff(i), rhs.coeff(i));
        }
        Poly::new(f, out)
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0u16; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    pub fn scale(&self, c: u16) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Quotient and remainder; errors on division by the zero polynomial.
    pub fn div_rem(&self, rhs: &Poly) -> Result<(Poly, Poly)> {
        if rhs.is_zero() {
            return Err(Error::InverseOfZero);
        }
        let f = &self.field;
        let db = rhs.coeffs.len() - 1;
        let lead_inv = f.inv(*rhs.coeffs.last().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![0u16; self.coeffs.len().saturating_sub(db)];
        while rem.len() > db {
            let lead = *rem.last().unwrap();
            let shift = rem.len() - 1 - db;
            let qc = f.mul(lead, lead_inv);
            if qc != 0 {
                quo[shift] = qc;
                for (i, &bc) in rhs.coeffs.iter().enumerate() {
                    rem[shift + i] = f.sub(rem[shift + i], f.mul(qc, bc));
                }
            }
            while rem.last() == Some(&0) {
                rem.pop();
            }
            if rem.len() <= db {
                break;
            }
        }
        Ok((Poly::new(f, quo), Poly::new(f, rem)))
    }

    /// True if rhs divides self exactly.
    pub fn divisible_by(&self, rhs: &Poly) -> bool {
        match self.div_rem(rhs) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Horner evaluation at the value x.
    pub fn eval(&self, x: u16) -> u16 {
        let f = &self.field;
        let mut acc = 0u16;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// Coefficients padded with zeros to the given length.
    pub fn to_vec(&self, len: usize) -> Vec<u16> {
        let mut v = self.coeffs.clone();
        assert!(v.len() <= len, "polynomial does not fit requested length");
        v.resize(len, 0);
        v
    }

    /// self * rhs reduced modulo x^n - 1 (cyclic convolution).
    pub fn mul_mod_xn_1(&self, rhs: &Poly, n: usize) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0u16; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let k = (i + j) % n;
                out[k] = f.add(out[k], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }
}
