//! Two-dimensional cyclic codes with availability two: zero-set
//! construction over exponent pairs, the hyperbolic designed distance,
//! disjoint row/column recovering sets, and the product-code baseline.
//!
//! Codewords are n x n grids stored row-major. The generator is represented
//! by its zero set only; membership and encoding go through evaluation-style
//! parity checks, and all shifts are index arithmetic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{gate, Error, Result};
use crate::field::Field;
use crate::hlrc::singleton_bound_r;
use crate::linalg::Matrix;
use crate::oracle::CodeView;

/// Zero exponent pairs (i, j) mod n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiZeroSet {
    pub n: usize,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl BiZeroSet {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> BiZeroSet {
        BiZeroSet {
            n,
            pairs: pairs.into_iter().map(|(a, b)| (a % n, b % n)).collect(),
        }
    }
    pub fn len(&self) -> usize {
        self.pairs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
    pub fn contains(&self, p: (usize, usize)) -> bool {
        self.pairs.contains(&p)
    }
}

/// The hyperbolic set {(i, j) : (i+1)(j+1) < d}.
pub fn hyperbolic_set(n: usize, d: usize) -> BiZeroSet {
    let mut pairs = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if (i + 1) * (j + 1) < d {
                pairs.insert((i, j));
            }
        }
    }
    BiZeroSet { n, pairs }
}

/// The largest d such that the full hyperbolic set of parameter d lies in
/// the zeros; equivalently 1 + min over non-zeros of (i+1)(j+1) capped by
/// the geometry. A lower bound on the code distance.
pub fn hyperbolic_designed_distance(z: &BiZeroSet) -> usize {
    let mut min_prod = usize::MAX;
    for i in 0..z.n {
        for j in 0..z.n {
            if !z.contains((i, j)) {
                min_prod = min_prod.min((i + 1) * (j + 1));
            }
        }
    }
    if min_prod == usize::MAX {
        z.n * z.n + 1
    } else {
        min_prod
    }
}

/// A bicyclic code of area n^2 with row stride locality r1 and column
/// stride locality r2, both with local distance 2.
#[derive(Clone, Debug)]
pub struct BicyclicCode {
    pub field: Field,
    pub n: usize,
    pub alpha: u16,
    pub r1: usize,
    pub r2: usize,
    pub delta: usize,
    pub zeros: BiZeroSet,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BicyclicCounts {
    pub hyperbolic_pairs: usize,
    pub line_pairs: usize,
    pub union_direct: usize,
    pub union_inclusion_exclusion: usize,
    pub counts_agree: bool,
}

impl BicyclicCode {
    pub fn nu1(&self) -> usize {
        self.n / (self.r1 + 1)
    }
    pub fn nu2(&self) -> usize {
        self.n / (self.r2 + 1)
    }

    fn flat(&self, x: usize, y: usize) -> usize {
        x * self.n + y
    }

    /// Generator basis: one evaluation row per non-zero pair (a, b), with
    /// entries alpha^{-(ax + by)} at grid position (x, y).
    pub fn generator_rows(&self) -> Vec<Vec<u16>> {
        let f = &self.field;
        let n = self.n;
        let mut rows = Vec::with_capacity(self.dim);
        for a in 0..n {
            for b in 0..n {
                if self.zeros.contains((a, b)) {
                    continue;
                }
                let mut row = vec![0u16; n * n];
                for x in 0..n {
                    let ax = f.pow(self.alpha, (((n - a) % n) * x) as u64);
                    for y in 0..n {
                        let by = f.pow(self.alpha, (((n - b) % n) * y) as u64);
                        row[self.flat(x, y)] = f.mul(ax, by);
                    }
                }
                rows.push(row);
            }
        }
        rows
    }

    pub fn encode(&self, msg: &[u16]) -> Result<Vec<u16>> {
        if msg.len() != self.dim {
            return Err(Error::LengthMismatch { got: msg.len(), expected: self.dim });
        }
        let f = &self.field;
        let rows = self.generator_rows();
        let mut out = vec![0u16; self.n * self.n];
        for (m, row) in msg.iter().zip(rows) {
            if *m == 0 {
                continue;
            }
            for (slot, &v) in out.iter_mut().zip(row.iter()) {
                *slot = f.add(*slot, f.mul(*m, v));
            }
        }
        Ok(out)
    }

    /// Membership: the 2-D evaluation at (alpha^a, alpha^b) vanishes for
    /// every zero pair.
    pub fn is_codeword(&self, word: &[u16]) -> bool {
        if word.len() != self.n * self.n {
            return false;
        }
        let f = &self.field;
        for &(a, b) in &self.zeros.pairs {
            let mut acc = 0u16;
            for x in 0..self.n {
                let ax = f.pow(self.alpha, (a * x) as u64);
                for y in 0..self.n {
                    let v = word[self.flat(x, y)];
                    if v != 0 {
                        let by = f.pow(self.alpha, (b * y) as u64);
                        acc = f.add(acc, f.mul(v, f.mul(ax, by)));
                    }
                }
            }
            if acc != 0 {
                return false;
            }
        }
        true
    }

    /// The vertical recovering set of (x, y): r1 further positions in column
    /// y at row stride n/(r1+1); and the horizontal one: r2 positions in row
    /// x at column stride n/(r2+1). Disjoint by construction.
    pub fn recovering_sets(
        &self,
        coord: (usize, usize),
    ) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let (x, y) = coord;
        let v = (1..=self.r1)
            .map(|s| ((x + s * self.nu1()) % self.n, y))
            .collect();
        let h = (1..=self.r2)
            .map(|t| (x, (y + t * self.nu2()) % self.n))
            .collect();
        (v, h)
    }

    /// Repair one erased coordinate from one of its recovering sets using
    /// the stride parity: the r+1 strided positions sum to zero.
    pub fn repair_from_set(&self, word: &[u16], coord: (usize, usize), vertical: bool) -> u16 {
        let f = &self.field;
        let (x, y) = coord;
        let mut acc = 0u16;
        if vertical {
            for s in 1..=self.r1 {
                acc = f.add(acc, word[self.flat((x + s * self.nu1()) % self.n, y)]);
            }
        } else {
            for t in 1..=self.r2 {
                acc = f.add(acc, word[self.flat(x, (y + t * self.nu2()) % self.n)]);
            }
        }
        f.neg(acc)
    }
}

/// Build the bicyclic code: zeros are the rows with first index divisible
/// by r1+1, the columns with second index divisible by r2+1, and the
/// hyperbolic set of the requested designed distance.
pub fn build_bicyclic(
    n: usize,
    r1: usize,
    r2: usize,
    delta: usize,
    f: &Field,
) -> Result<(BicyclicCode, BicyclicCounts)> {
    if r1 == 0 || r1 > r2 {
        return Err(gate(format!("need 0 < r1 <= r2, got r1={r1}, r2={r2}")));
    }
    if delta < 2 {
        return Err(gate(format!("delta = {delta} must be at least 2")));
    }
    if n % (r1 + 1) != 0 {
        return Err(gate(format!("r1+1 = {} does not divide n = {n}", r1 + 1)));
    }
    if n % (r2 + 1) != 0 {
        return Err(gate(format!("r2+1 = {} does not divide n = {n}", r2 + 1)));
    }
    let qm1 = f.q() as usize - 1;
    if qm1 % n != 0 {
        return Err(gate(format!("n = {n} does not divide q-1 = {qm1}")));
    }

    let mut pairs = BTreeSet::new();
    for i in (0..n).step_by(r1 + 1) {
        for j in 0..n {
            pairs.insert((i, j));
        }
    }
    for i in 0..n {
        for j in (0..n).step_by(r2 + 1) {
            pairs.insert((i, j));
        }
    }
    let line_pairs = pairs.len();
    let hyper = hyperbolic_set(n, delta);
    let hyperbolic_pairs = hyper.len();
    for &p in &hyper.pairs {
        pairs.insert(p);
    }
    let union_direct = pairs.len();

    // Independent inclusion-exclusion count over the three families.
    let nu1 = n / (r1 + 1);
    let nu2 = n / (r2 + 1);
    let l1 = nu1 * n;
    let l2 = n * nu2;
    let l1_l2 = nu1 * nu2;
    let mut d_only = 0usize;
    let mut d_l1 = 0usize;
    let mut d_l2 = 0usize;
    let mut d_l1_l2 = 0usize;
    for i in 0..n {
        for j in 0..n {
            if (i + 1) * (j + 1) >= delta {
                continue;
            }
            d_only += 1;
            let in1 = i % (r1 + 1) == 0;
            let in2 = j % (r2 + 1) == 0;
            if in1 {
                d_l1 += 1;
            }
            if in2 {
                d_l2 += 1;
            }
            if in1 && in2 {
                d_l1_l2 += 1;
            }
        }
    }
    let union_ie = l1 + l2 + d_only - l1_l2 - d_l1 - d_l2 + d_l1_l2;

    let counts = BicyclicCounts {
        hyperbolic_pairs,
        line_pairs,
        union_direct,
        union_inclusion_exclusion: union_ie,
        counts_agree: union_direct == union_ie,
    };
    if !counts.counts_agree {
        return Err(gate(format!(
            "zero-set union counted two ways disagrees: {union_direct} vs {union_ie}"
        )));
    }

    let alpha = f.root_of_unity(n)?;
    let zeros = BiZeroSet { n, pairs };
    let dim = n * n - zeros.len();
    Ok((
        BicyclicCode {
            field: f.clone(),
            n,
            alpha: alpha.value(),
            r1,
            r2,
            delta,
            zeros,
            dim,
        },
        counts,
    ))
}

/// Per-coordinate availability verdict.
#[derive(Clone, Debug, Serialize)]
pub struct AvailabilityCertificate {
    pub coordinates_checked: usize,
    pub all_disjoint: bool,
    pub vertical_rank_max: usize,
    pub horizontal_rank_max: usize,
    pub parities_hold: bool,
    pub pass: bool,
}

/// Verify availability two coordinate-exhaustively: for every (x, y), the
/// two punctured codes on the strided sets have rank at most r1 / r2, their
/// stride parities annihilate the whole generator basis (so local distance
/// is at least 2), and the supports meet only at the coordinate itself.
pub fn availability_certificate(c: &BicyclicCode) -> AvailabilityCertificate {
    let f = &c.field;
    let rows = c.generator_rows();
    let n = c.n;
    let mut all_disjoint = true;
    let mut parities_hold = true;
    let mut vmax = 0;
    let mut hmax = 0;

    for x in 0..n {
        for y in 0..n {
            let (v, h) = c.recovering_sets((x, y));
            // disjoint supports except the target
            all_disjoint &= v.iter().all(|p| !h.contains(p));
            all_disjoint &= !v.contains(&(x, y)) && !h.contains(&(x, y));

            // stride parities over the generator basis
            for row in &rows {
                let mut sv = row[c.flat(x, y)];
                for &(vx, vy) in &v {
                    sv = f.add(sv, row[c.flat(vx, vy)]);
                }
                let mut sh = row[c.flat(x, y)];
                for &(hx, hy) in &h {
                    sh = f.add(sh, row[c.flat(hx, hy)]);
                }
                parities_hold &= sv == 0 && sh == 0;
            }
        }
    }

    // Rank bounds are shift-invariant; evaluate them once per orbit
    // representative (column 0 / row 0) and take the max.
    for x in 0..n {
        let (v, _) = c.recovering_sets((x, 0));
        let mut pos = vec![c.flat(x, 0)];
        pos.extend(v.iter().map(|&(a, b)| c.flat(a, b)));
        let punct: Vec<Vec<u16>> = rows
            .iter()
            .map(|row| pos.iter().map(|&p| row[p]).collect())
            .collect();
        vmax = vmax.max(Matrix::new(f, punct, pos.len()).rank());
    }
    for y in 0..n {
        let (_, h) = c.recovering_sets((0, y));
        let mut pos = vec![c.flat(0, y)];
        pos.extend(h.iter().map(|&(a, b)| c.flat(a, b)));
        let punct: Vec<Vec<u16>> = rows
            .iter()
            .map(|row| pos.iter().map(|&p| row[p]).collect())
            .collect();
        hmax = hmax.max(Matrix::new(f, punct, pos.len()).rank());
    }

    let pass = all_disjoint && parities_hold && vmax <= c.r1 && hmax <= c.r2;
    AvailabilityCertificate {
        coordinates_checked: n * n,
        all_disjoint,
        vertical_rank_max: vmax,
        horizontal_rank_max: hmax,
        parities_hold,
        pass,
    }
}

/// Product-code baseline: two length-n cyclic codes with localities r1, r2
/// and the given component distance, each of the largest dimension allowed
/// by the locality Singleton bound; the product has dimension k1 * k2.
#[derive(Clone, Debug, Serialize)]
pub struct ProductBaseline {
    pub k1: usize,
    pub k2: usize,
    pub product_dim: usize,
}

pub fn product_baseline(n: usize, r1: usize, r2: usize, component_distance: usize) -> ProductBaseline {
    let max_k = |r: usize| -> usize {
        (1..=n)
            .filter(|&k| singleton_bound_r(n, k, r) >= component_distance as i64)
            .max()
            .unwrap_or(0)
    };
    let k1 = max_k(r1);
    let k2 = max_k(r2);
    ProductBaseline { k1, k2, product_dim: k1 * k2 }
}

/// The dimension lower bound n^2 r1 r2 / ((r1+1)(r2+1)) - delta(1 + ln(delta-1)).
pub fn dimension_lower_bound(n: usize, r1: usize, r2: usize, delta: usize) -> f64 {
    let rate = (n * n * r1 * r2) as f64 / ((r1 + 1) * (r2 + 1)) as f64;
    rate - delta as f64 * (1.0 + ((delta - 1) as f64).ln())
}

/// A [`CodeView`] of the bicyclic code for the generic oracles.
pub fn code_view(c: &BicyclicCode, label: impl Into<String>) -> CodeView {
    CodeView::new(&c.field, c.generator_rows(), label)
}
