//! Independent brute-force verifiers. Everything here works from a plain
//! generator-matrix view of a code and enumerates exhaustively, so the
//! results certify (or refute) the structural claims made by the
//! construction modules without sharing any code path with them.

use serde::Serialize;

use crate::cyclic::CyclicCode;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{solve_for, Matrix, SolveOutcome};

/// Enumeration caps. Exceeding a cap is a reported outcome, never a silent
/// truncation.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_enumerations: u64,
    pub max_patterns: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_enumerations: 100_000_000,
            max_patterns: 10_000_000,
        }
    }
}

impl Budget {
    pub fn with_max_enumerations(max: u64) -> Budget {
        Budget { max_enumerations: max, ..Budget::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Verified,
    Refuted,
    BudgetExceeded,
}

/// Machine-checked verdict for one quantity of one instance.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub instance_id: String,
    pub quantity: String,
    pub claimed_lo: Option<i64>,
    pub claimed_hi: Option<i64>,
    pub verified: Option<u64>,
    pub enumerations: u64,
    pub outcome: Outcome,
}

impl OracleReport {
    pub fn csv_header() -> &'static str {
        "instance_id,quantity,claimed_lo,claimed_hi,verified,enumerations,outcome"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<i64>| v.map_or(String::new(), |x| x.to_string());
        format!(
            "{},{},{},{},{},{},{}",
            self.instance_id,
            self.quantity,
            opt(self.claimed_lo),
            opt(self.claimed_hi),
            self.verified.map_or(String::new(), |x| x.to_string()),
            self.enumerations,
            match self.outcome {
                Outcome::Verified => "verified",
                Outcome::Refuted => "refuted",
                Outcome::BudgetExceeded => "budget_exceeded",
            }
        )
    }
}

/// A linear code given by generator rows; the view every oracle runs on.
#[derive(Clone, Debug)]
pub struct CodeView {
    pub field: Field,
    pub n: usize,
    pub rows: Vec<Vec<u16>>,
    pub label: String,
}

impl CodeView {
    pub fn new(field: &Field, rows: Vec<Vec<u16>>, label: impl Into<String>) -> CodeView {
        let n = rows.first().map_or(0, |r| r.len());
        CodeView {
            field: field.clone(),
            n,
            rows,
            label: label.into(),
        }
    }

    pub fn from_cyclic(c: &CyclicCode, label: impl Into<String>) -> CodeView {
        CodeView::new(c.field(), c.generator_rows(), label)
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// The view restricted to a subset of coordinates.
    pub fn punctured(&self, positions: &[usize], label: impl Into<String>) -> CodeView {
        let rows = self
            .rows
            .iter()
            .map(|row| positions.iter().map(|&p| row[p]).collect())
            .collect();
        CodeView::new(&self.field, rows, label)
    }

    /// Parity rows: a basis of the dual, from the nullspace of the generator.
    pub fn parity_rows(&self) -> Vec<Vec<u16>> {
        Matrix::new(&self.field, self.rows.clone(), self.n).nullspace()
    }

    fn independent_rows(&self) -> Vec<Vec<u16>> {
        let mut m = Matrix::new(&self.field, self.rows.clone(), self.n);
        let pivots = m.rref();
        m.rows.truncate(pivots.len());
        m.rows
    }
}

fn weight_below(partial: &[u16], cap: usize) -> Option<usize> {
    let mut w = 0;
    for &v in partial {
        if v != 0 {
            w += 1;
            if w >= cap {
                return None;
            }
        }
    }
    Some(w)
}

fn min_weight_rec(
    f: &Field,
    rows: &[Vec<u16>],
    level: usize,
    partial: &mut Vec<u16>,
    nonzero_prefix: bool,
    best: &mut usize,
    count: &mut u64,
) {
    if level == rows.len() {
        if nonzero_prefix {
            *count += 1;
            if let Some(w) = weight_below(partial, *best) {
                *best = w;
            }
        }
        return;
    }
    let q = f.q() as u16;
    // message symbol 0 leaves the partial sum untouched
    min_weight_rec(f, rows, level + 1, partial, nonzero_prefix, best, count);
    let saved = partial.clone();
    for v in 1..q {
        for (i, slot) in partial.iter_mut().enumerate() {
            *slot = f.add(saved[i], f.mul(v, rows[level][i]));
        }
        min_weight_rec(f, rows, level + 1, partial, true, best, count);
    }
    partial.copy_from_slice(&saved);
}

/// Exact minimum nonzero weight by exhaustive message enumeration, in
/// lexicographic order with an early weight cut per codeword.
///
/// The claimed interval is carried into the report; the outcome is `Refuted`
/// when the exhaustive value falls outside it.
pub fn min_distance(
    view: &CodeView,
    budget: &Budget,
    claimed_lo: Option<i64>,
    claimed_hi: Option<i64>,
) -> OracleReport {
    let rows = view.independent_rows();
    let k = rows.len();
    let q = view.field.q() as u64;
    let mut report = OracleReport {
        instance_id: view.label.clone(),
        quantity: "min_distance".into(),
        claimed_lo,
        claimed_hi,
        verified: None,
        enumerations: 0,
        outcome: Outcome::BudgetExceeded,
    };
    if k == 0 {
        return report;
    }
    let total = match q.checked_pow(k as u32) {
        Some(t) if t - 1 <= budget.max_enumerations => t - 1,
        _ => return report,
    };

    let mut partial = vec![0u16; view.n];
    let mut best = usize::MAX;
    let mut count = 0u64;
    min_weight_rec(&view.field, &rows, 0, &mut partial, false, &mut best, &mut count);
    debug_assert_eq!(count, total);

    report.enumerations = count;
    report.verified = Some(best as u64);
    let lo_ok = claimed_lo.is_none_or(|lo| best as i64 >= lo);
    let hi_ok = claimed_hi.is_none_or(|hi| best as i64 <= hi);
    report.outcome = if lo_ok && hi_ok { Outcome::Verified } else { Outcome::Refuted };
    report
}

/// Per-group verdict from [`locality_verify`].
#[derive(Clone, Debug, Serialize)]
pub struct GroupVerdict {
    pub group: usize,
    pub positions: Vec<usize>,
    pub rank: usize,
    pub rank_ok: bool,
    pub punctured_distance: Option<usize>,
    /// None when the exhaustive check exceeded the budget: indeterminate,
    /// not failing.
    pub distance_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    pub r: usize,
    pub delta: usize,
    pub groups: Vec<GroupVerdict>,
    pub covers_every_coordinate: bool,
    pub pass: bool,
    /// Index of the first failing group, if any.
    pub failing_group: Option<usize>,
}

/// Verify claimed (r, delta) locality: each group's punctured code must have
/// rank at most r and exhaustive minimum distance at least delta, and the
/// groups together must cover every coordinate.
pub fn locality_verify(
    view: &CodeView,
    r: usize,
    delta: usize,
    groups: &[Vec<usize>],
    budget: &Budget,
) -> LocalityReport {
    let mut verdicts = Vec::new();
    let mut covered = vec![false; view.n];
    for (gi, g) in groups.iter().enumerate() {
        for &p in g {
            covered[p] = true;
        }
        let punct = view.punctured(g, format!("{}[group{}]", view.label, gi));
        let rank = Matrix::new(&view.field, punct.rows.clone(), punct.n).rank();
        let dist_report = min_distance(&punct, budget, None, None);
        let punctured_distance = dist_report.verified.map(|d| d as usize);
        let distance_ok = if rank == 0 {
            // zero code on this group: the distance condition is vacuous
            Some(true)
        } else {
            punctured_distance.map(|d| d >= delta)
        };
        verdicts.push(GroupVerdict {
            group: gi,
            positions: g.clone(),
            rank,
            rank_ok: rank <= r,
            punctured_distance,
            distance_ok,
        });
    }
    let covers = covered.iter().all(|&c| c);
    let failing = verdicts
        .iter()
        .find(|v| !v.rank_ok || v.distance_ok == Some(false))
        .map(|v| v.group);
    LocalityReport {
        r,
        delta,
        groups: verdicts,
        covers_every_coordinate: covers,
        pass: covers && failing.is_none(),
        failing_group: failing,
    }
}

/// Result of erasure decoding. Failure is a value, never a panic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EraseOutcome {
    Filled(Vec<u16>),
    Underdetermined,
    Inconsistent,
}

/// Solve the parity system restricted to the erased positions by
/// elimination. Success iff the system determines all erasures uniquely.
pub fn erase_decode(view: &CodeView, word: &[Option<u16>]) -> EraseOutcome {
    debug_assert_eq!(word.len(), view.n);
    let f = &view.field;
    let erased: Vec<usize> = (0..view.n).filter(|&p| word[p].is_none()).collect();
    if erased.is_empty() {
        return EraseOutcome::Filled(word.iter().map(|v| v.unwrap()).collect());
    }
    let parity = view.parity_rows();
    let mut a = Vec::with_capacity(parity.len());
    let mut b = Vec::with_capacity(parity.len());
    for prow in &parity {
        let mut lhs = vec![0u16; erased.len()];
        let mut rhs = 0u16;
        for (p, cell) in word.iter().enumerate() {
            match cell {
                Some(v) => rhs = f.sub(rhs, f.mul(prow[p], *v)),
                None => {
                    let ei = erased.binary_search(&p).unwrap();
                    lhs[ei] = prow[p];
                }
            }
        }
        a.push(lhs);
        b.push(rhs);
    }
    let targets: Vec<usize> = (0..erased.len()).collect();
    match solve_for(f, &a, &b, &targets) {
        SolveOutcome::Unique(vals) => {
            let mut out: Vec<u16> = word.iter().map(|v| v.unwrap_or(0)).collect();
            for (&p, v) in erased.iter().zip(vals) {
                out[p] = v;
            }
            EraseOutcome::Filled(out)
        }
        SolveOutcome::Underdetermined => EraseOutcome::Underdetermined,
        SolveOutcome::Inconsistent => EraseOutcome::Inconsistent,
    }
}

/// One simulated repair trial.
#[derive(Clone, Debug, Serialize)]
pub struct SimRow {
    pub pattern_id: u64,
    pub erasure_count: usize,
    pub recovered: bool,
    pub rounds: usize,
    pub trace_length: usize,
}

impl SimRow {
    pub fn csv_header() -> &'static str {
        "pattern_id,erasure_count,recovered,rounds,trace_length"
    }
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.pattern_id, self.erasure_count, self.recovered, self.rounds, self.trace_length
        )
    }
}

/// All size-`len` index subsets of {0..n}, visited in lexicographic order.
/// Stops early (returning false) if the callback returns false.
pub fn for_each_subset(n: usize, len: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if len > n {
        return true;
    }
    if len == 0 {
        return f(&[]);
    }
    let mut idx: Vec<usize> = (0..len).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        // advance the rightmost index that can still move
        let mut i = len - 1;
        while idx[i] == i + n - len {
            if i == 0 {
                return true;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..len {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of size-`len` subsets of an n-set, saturating.
pub fn subset_count(n: usize, len: usize) -> u64 {
    if len > n {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..len {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

/// Exhaustive erasure-pattern sweep: for every pattern with up to
/// `max_erasures` erasures, erase-decode and require exact recovery.
pub fn sweep_all_patterns(
    view: &CodeView,
    codeword: &[u16],
    max_erasures: usize,
    budget: &Budget,
) -> Result<u64> {
    let mut total: u64 = 0;
    for e in 0..=max_erasures {
        total = total.saturating_add(subset_count(view.n, e));
    }
    if total > budget.max_patterns {
        return Err(Error::Parameter(format!(
            "pattern sweep needs {total} patterns, budget is {}",
            budget.max_patterns
        )));
    }
    let mut tried = 0u64;
    for e in 0..=max_erasures {
        let complete = for_each_subset(view.n, e, |idx| {
            tried += 1;
            let mut word: Vec<Option<u16>> = codeword.iter().map(|&v| Some(v)).collect();
            for &p in idx {
                word[p] = None;
            }
            matches!(erase_decode(view, &word), EraseOutcome::Filled(ref w) if w == codeword)
        });
        if !complete {
            return Err(Error::Parameter(format!(
                "a pattern of {e} erasures failed to decode"
            )));
        }
    }
    Ok(tried)
}
