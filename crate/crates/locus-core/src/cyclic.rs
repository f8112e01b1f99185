//! Cyclic-code core: defining sets of zeros, generator/check polynomials,
//! encoding, the BCH designed distance, and the punctured local codes with
//! their disjoint repair groups.
//!
//! Everything here assumes n | q-1, so all n-th roots of unity live in the
//! field and a zero set is just a set of exponents mod n. No conjugacy
//! closure is ever needed.

use std::collections::BTreeSet;

use crate::error::{gate, Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{solve_for, Matrix, SolveOutcome};
use crate::poly::Poly;

/// A defining set of zero exponents mod n. Canonically sorted, no duplicates.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ZeroSet {
    n: usize,
    exps: BTreeSet<usize>,
}

impl ZeroSet {
    pub fn new(n: usize, exps: impl IntoIterator<Item = usize>) -> ZeroSet {
        ZeroSet {
            n,
            exps: exps.into_iter().map(|e| e % n).collect(),
        }
    }

    pub fn empty(n: usize) -> ZeroSet {
        ZeroSet { n, exps: BTreeSet::new() }
    }

    /// The run {1, ..., d-1}; empty for d <= 1.
    pub fn run_from_one(n: usize, d: usize) -> ZeroSet {
        ZeroSet::new(n, 1..d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.exps.contains(&(e % self.n))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.exps.iter().copied().collect()
    }

    pub fn union(&self, other: &ZeroSet) -> ZeroSet {
        debug_assert_eq!(self.n, other.n);
        ZeroSet {
            n: self.n,
            exps: self.exps.union(&other.exps).copied().collect(),
        }
    }

    /// The set {e + s mod n : e in self}, optionally reinterpreted in a
    /// larger ambient length.
    pub fn shift_into(&self, s: usize, ambient_n: usize) -> ZeroSet {
        ZeroSet::new(ambient_n, self.exps.iter().map(|&e| (e + s) % ambient_n))
    }

    pub fn is_subset_of(&self, other: &ZeroSet) -> bool {
        self.exps.is_subset(&other.exps)
    }

    /// Complement within {0, .., n-1}.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|e| !self.exps.contains(e)).collect()
    }

    /// 1 + the length of the longest cyclically consecutive run of exponents.
    /// This is the BCH lower bound on the minimum distance of any cyclic code
    /// whose zeros contain this set. The full set {0..n-1} reports n + 1.
    pub fn bch_designed_distance(&self) -> usize {
        if self.exps.is_empty() {
            return 1;
        }
        if self.exps.len() == self.n {
            return self.n + 1;
        }
        let mut best = 0;
        let mut run = 0;
        // Walk two laps so runs through the wrap point are counted once.
        for i in 0..2 * self.n {
            if self.exps.contains(&(i % self.n)) {
                run += 1;
                best = best.max(run.min(self.n));
            } else {
                run = 0;
            }
        }
        best + 1
    }
}

/// A cyclic code of length n | q-1 given by its zeros
/// {alpha^t : t in zeros} and the generator g(x) = prod (x - alpha^t).
#[derive(Clone, Debug)]
pub struct CyclicCode {
    field: Field,
    n: usize,
    alpha: u16,
    zeros: ZeroSet,
    g: Poly,
    k: usize,
}

impl CyclicCode {
    /// Build the code from a defining set, checking that alpha has
    /// multiplicative order exactly n.
    pub fn from_zeros(field: &Field, n: usize, alpha: &FieldElement, zeros: ZeroSet) -> Result<CyclicCode> {
        let qm1 = field.q() as usize - 1;
        if n == 0 || qm1 % n != 0 {
            return Err(Error::NotARootOrder { n, q_minus_1: qm1 });
        }
        let a = alpha.value();
        let ord = field.order_of(a)?;
        if ord != n {
            return Err(Error::WrongOrder { value: a, actual: ord, expected: n });
        }
        debug_assert_eq!(zeros.n(), n);
        let roots: Vec<u16> = zeros.iter().map(|t| field.pow(a, t as u64)).collect();
        let g = Poly::from_roots(field, &roots);
        let k = n - zeros.len();
        debug_assert_eq!(g.degree().unwrap_or(0), zeros.len());
        Ok(CyclicCode {
            field: field.clone(),
            n,
            alpha: a,
            zeros,
            g,
            k,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn alpha(&self) -> u16 {
        self.alpha
    }
    pub fn zeros(&self) -> &ZeroSet {
        &self.zeros
    }
    pub fn generator_poly(&self) -> &Poly {
        &self.g
    }

    /// Check polynomial h = (x^n - 1) / g.
    pub fn check_poly(&self) -> Poly {
        let (h, r) = Poly::x_n_minus_1(&self.field, self.n)
            .div_rem(&self.g)
            .expect("generator divides x^n - 1");
        debug_assert!(r.is_zero(), "g(x) must divide x^n - 1");
        h
    }

    /// Generator of the dual code: x^deg(h) * h(1/x), the reciprocal of h.
    /// The reversed dual (coordinates read back to front) is generated by
    /// h itself; membership there is divisibility by h.
    pub fn dual_generator(&self) -> Poly {
        let h = self.check_poly();
        let d = h.degree().unwrap_or(0);
        let mut rev = h.to_vec(d + 1);
        rev.reverse();
        Poly::new(&self.field, rev)
    }

    /// Check and reversed-dual generator polynomials: (h, reciprocal of h).
    pub fn check_and_reversed_dual(&self) -> (Poly, Poly) {
        (self.check_poly(), self.dual_generator())
    }

    /// Systematic-free encoding: codeword = message polynomial times g.
    pub fn encode(&self, msg: &[u16]) -> Result<Vec<u16>> {
        if msg.len() != self.k {
            return Err(Error::LengthMismatch { got: msg.len(), expected: self.k });
        }
        let m = Poly::new(&self.field, msg.to_vec());
        Ok(m.mul(&self.g).to_vec(self.n))
    }

    /// Evaluate the word as a polynomial at alpha^t.
    pub fn eval_at_power(&self, word: &[u16], t: usize) -> u16 {
        let x = self.field.pow(self.alpha, (t % self.n) as u64);
        Poly::new(&self.field, word.to_vec()).eval(x)
    }

    /// Membership: zero at alpha^t for every t in the defining set.
    pub fn is_codeword(&self, word: &[u16]) -> bool {
        if word.len() != self.n {
            return false;
        }
        let p = Poly::new(&self.field, word.to_vec());
        self.zeros
            .iter()
            .all(|t| p.eval(self.field.pow(self.alpha, t as u64)) == 0)
    }

    /// Rows x^i * g(x) for i = 0..k, the natural generator matrix.
    pub fn generator_rows(&self) -> Vec<Vec<u16>> {
        let g = self.g.coeffs();
        let mut rows = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let mut row = vec![0u16; self.n];
            row[i..i + g.len()].copy_from_slice(g);
            rows.push(row);
        }
        rows
    }

    /// Parity-check rows: the evaluation vector (alpha^{t*0}, .., alpha^{t*(n-1)})
    /// for each t in the defining set. A word is a codeword iff all these
    /// syndromes vanish.
    pub fn parity_rows(&self) -> Vec<Vec<u16>> {
        self.zeros
            .iter()
            .map(|t| {
                (0..self.n)
                    .map(|p| self.field.pow(self.alpha, (t * p % self.n) as u64))
                    .collect()
            })
            .collect()
    }

    /// The exponents t with g(alpha^t) = 0, recovered by evaluation.
    pub fn recover_zeros(&self) -> ZeroSet {
        ZeroSet::new(
            self.n,
            (0..self.n).filter(|&t| self.g.eval(self.field.pow(self.alpha, t as u64)) == 0),
        )
    }
}

/// Builds the code from a defining set; free-standing name matching the
/// operation it implements.
pub fn generator_from_zeros(
    field: &Field,
    n: usize,
    alpha: &FieldElement,
    zeros: ZeroSet,
) -> Result<CyclicCode> {
    CyclicCode::from_zeros(field, n, alpha, zeros)
}

/// Outcome of the structured weight-m vector test: b(x) built for (nu, m, u),
/// whether it lies in the reversed dual, and whether the arithmetic identity
/// (x^nu - alpha^{nu u}) * b(x) = x^n - 1 holds.
#[derive(Clone, Debug)]
pub struct StructuredVector {
    pub b: Poly,
    pub membership: bool,
    pub coset: ZeroSet,
    pub annihilator_identity: bool,
}

/// For n = nu*m and u in [0, m), build b(x) = sum_i x^{i nu} alpha^{(m-1-i) nu u}
/// and test whether it lies in the reversed dual of the code. Membership holds
/// exactly when the coset {u + i*m : i in [0, nu)} is contained in the zeros.
pub fn coset_vector(c: &CyclicCode, nu: usize, m: usize, u: usize) -> Result<StructuredVector> {
    if nu * m != c.n() {
        return Err(gate(format!("n = {} is not nu*m = {}*{}", c.n(), nu, m)));
    }
    if u >= m {
        return Err(gate(format!("u = {u} out of range [0, {m})")));
    }
    let f = c.field();
    let mut coeffs = vec![0u16; c.n()];
    for i in 0..m {
        coeffs[i * nu] = f.pow(c.alpha(), ((m - 1 - i) * nu * u) as u64 % (f.q() as u64 - 1).max(1));
    }
    let b = Poly::new(f, coeffs);

    // (x^nu - alpha^{nu u}) * b(x) = x^n - 1
    let mut ann = vec![0u16; nu + 1];
    ann[0] = f.neg(f.pow(c.alpha(), (nu * u) as u64));
    ann[nu] = 1;
    let ann = Poly::new(f, ann);
    let identity = ann.mul(&b) == Poly::x_n_minus_1(f, c.n());

    let h = c.check_poly();
    let membership = b.divisible_by(&h);
    let coset = ZeroSet::new(c.n(), (0..nu).map(|i| u + i * m));
    Ok(StructuredVector {
        b,
        membership,
        coset,
        annihilator_identity: identity,
    })
}

/// Certificate produced by [`local_structure`]: the punctured local code on
/// the coordinates {0, nu, .., (m-1) nu}, its certified parameters, and the
/// partition of all n coordinates into disjoint repair groups.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LocalityCertificate {
    pub m: usize,
    pub nu: usize,
    pub delta: usize,
    pub zloc: ZeroSet,
    /// Upper bound m - |zloc| from the parity construction.
    pub dim_bound: usize,
    /// Rank of the punctured generator matrix.
    pub dim_actual: usize,
    /// True when the exact-dimension test passed (dim_actual = dim_bound).
    pub exact_dimension: bool,
    /// nu disjoint groups; group b holds {b, b+nu, .., b+(m-1)nu}.
    pub repair_groups: Vec<Vec<usize>>,
    /// Locality as certified: (r, delta) with r = dim_bound.
    pub r: usize,
}

/// Certify the local structure of the code: with n = nu*m and a local zero
/// set over {0..m-1} containing the run {1..delta-1}, whose nu shifted copies
/// all lie in the code's zeros, the punctured code on coordinates
/// {0, nu, .., (m-1)nu} has dimension <= m - |zloc| and distance >= delta,
/// and cyclic shifts partition all coordinates into nu disjoint repair groups.
pub fn local_structure(
    c: &CyclicCode,
    m: usize,
    zloc: &ZeroSet,
    delta: usize,
) -> Result<LocalityCertificate> {
    let n = c.n();
    if m == 0 || n % m != 0 {
        return Err(Error::Locality(format!("n = {n} is not a multiple of m = {m}")));
    }
    let nu = n / m;
    if delta < 2 || delta > m {
        return Err(Error::Locality(format!("delta = {delta} outside 2..={m}")));
    }
    debug_assert_eq!(zloc.n(), m);
    for t in 1..delta {
        if !zloc.contains(t) {
            return Err(Error::Locality(format!(
                "run element {t} of 1..{} missing from the local zero set",
                delta - 1
            )));
        }
    }
    for s in 0..nu {
        let shifted = zloc.shift_into(s * m, n);
        if !shifted.is_subset_of(c.zeros()) {
            return Err(Error::Locality(format!(
                "shifted copy zloc + {}*{} is not contained in the code zeros",
                s, m
            )));
        }
    }

    // Punctured code on multiples of nu, as a length-m cyclic code w.r.t.
    // beta = alpha^nu. Dimension from the rank of the punctured generator.
    let positions: Vec<usize> = (0..m).map(|j| j * nu).collect();
    let rows: Vec<Vec<u16>> = c
        .generator_rows()
        .into_iter()
        .map(|row| positions.iter().map(|&p| row[p]).collect())
        .collect();
    let dim_actual = Matrix::new(c.field(), rows.clone(), m).rank();
    let dim_bound = m - zloc.len();

    // Distance certificate: every local zero is a zero of the punctured code,
    // so the BCH run {1..delta-1} applies to it.
    let f = c.field();
    let beta = f.pow(c.alpha(), nu as u64);
    for row in &rows {
        let p = Poly::new(f, row.clone());
        for t in zloc.iter() {
            if p.eval(f.pow(beta, t as u64)) != 0 {
                return Err(Error::Locality(format!(
                    "punctured code does not vanish at beta^{t}"
                )));
            }
        }
    }

    // Exact-dimension test: for every u outside zloc some shifted copy of u
    // escapes the code zeros.
    let exact = (0..m)
        .filter(|u| !zloc.contains(*u))
        .all(|u| (0..nu).any(|s| !c.zeros().contains(u + s * m)));
    if dim_actual > dim_bound {
        return Err(Error::Locality(format!(
            "punctured dimension {dim_actual} exceeds bound {dim_bound}"
        )));
    }
    if exact && dim_actual != dim_bound {
        return Err(Error::Locality(format!(
            "exact-dimension test passed but rank is {dim_actual}, expected {dim_bound}"
        )));
    }

    let repair_groups: Vec<Vec<usize>> = (0..nu)
        .map(|b| (0..m).map(|j| b + j * nu).collect())
        .collect();

    Ok(LocalityCertificate {
        m,
        nu,
        delta,
        zloc: zloc.clone(),
        dim_bound,
        dim_actual,
        exact_dimension: exact,
        repair_groups,
        r: dim_bound,
    })
}

/// Repair erasures inside a single repair group by solving the punctured
/// code's parity equations. `word` is the full-length word with erasures as
/// None; only positions inside `group` are touched. Returns the recovered
/// (position, value) pairs, or None when the restricted system does not pin
/// every erased position.
pub fn repair_in_group(
    c: &CyclicCode,
    word: &[Option<u16>],
    group: &[usize],
) -> Option<Vec<(usize, u16)>> {
    let f = c.field();
    let erased: Vec<usize> = group.iter().copied().filter(|&p| word[p].is_none()).collect();
    if erased.is_empty() {
        return Some(vec![]);
    }
    // Parity rows of the punctured code: nullspace of the restricted generator.
    let rows: Vec<Vec<u16>> = c
        .generator_rows()
        .into_iter()
        .map(|row| group.iter().map(|&p| row[p]).collect())
        .collect();
    let gen = Matrix::new(f, rows, group.len());
    let parity = Matrix::new(f, gen.nullspace(), group.len());

    let mut a = Vec::new();
    let mut b = Vec::new();
    for prow in &parity.rows {
        let mut lhs = vec![0u16; erased.len()];
        let mut rhs = 0u16;
        for (gi, &p) in group.iter().enumerate() {
            match word[p] {
                Some(v) => rhs = f.sub(rhs, f.mul(prow[gi], v)),
                None => {
                    let ei = erased.iter().position(|&e| e == p).unwrap();
                    lhs[ei] = f.add(lhs[ei], prow[gi]);
                }
            }
        }
        a.push(lhs);
        b.push(rhs);
    }
    let targets: Vec<usize> = (0..erased.len()).collect();
    match solve_for(f, &a, &b, &targets) {
        SolveOutcome::Unique(vals) => Some(erased.into_iter().zip(vals).collect()),
        _ => None,
    }
}
