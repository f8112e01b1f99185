//! Gaussian elimination over a [`Field`]: rank, reduced echelon form,
//! nullspace bases, and the per-variable uniqueness test that erasure
//! decoding relies on.
//!
//! Pivots are chosen by first-nonzero scanning so every reduction is
//! deterministic.

use crate::field::Field;

#[derive(Clone, Debug)]
pub struct Matrix {
    pub field: Field,
    pub rows: Vec<Vec<u16>>,
    pub cols: usize,
}

impl Matrix {
    pub fn new(field: &Field, rows: Vec<Vec<u16>>, cols: usize) -> Matrix {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Matrix { field: field.clone(), rows, cols }
    }

    pub fn zero(field: &Field, nrows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows: vec![vec![0; cols]; nrows],
            cols,
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.rows[i][i] = 1;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// In-place reduction to reduced row echelon form.
    /// Returns the pivot columns in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows.len() {
                break;
            }
            let Some(sel) = (row..self.rows.len()).find(|&r| self.rows[r][col] != 0) else {
                continue;
            };
            self.rows.swap(row, sel);
            let inv = f.inv(self.rows[row][col]).unwrap();
            for c in col..self.cols {
                self.rows[row][c] = f.mul(self.rows[row][c], inv);
            }
            for r in 0..self.rows.len() {
                if r != row && self.rows[r][col] != 0 {
                    let factor = self.rows[r][col];
                    for c in col..self.cols {
                        let sub = f.mul(factor, self.rows[row][c]);
                        self.rows[r][c] = f.sub(self.rows[r][c], sub);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace {x : Mx = 0}, one row per basis vector.
    pub fn nullspace(&self) -> Vec<Vec<u16>> {
        let f = self.field.clone();
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut vec = vec![0u16; self.cols];
            vec[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                // pivot var = -coeff(free) in its reduced row
                vec[pc] = f.neg(m.rows[r][free]);
            }
            basis.push(vec);
        }
        basis
    }

    /// Matrix product self * rhs.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        let f = &self.field;
        assert_eq!(self.cols, rhs.nrows());
        let mut out = Matrix::zero(f, self.nrows(), rhs.cols);
        for i in 0..self.nrows() {
            for (t, &a) in self.rows[i].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.rows[i][j] = f.add(out.rows[i][j], f.mul(a, rhs.rows[t][j]));
                }
            }
        }
        out
    }
}

/// Outcome of solving A x = b for a subset of target variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Every requested variable is uniquely determined; values in input order.
    Unique(Vec<u16>),
    /// The system is consistent but at least one requested variable is free.
    Underdetermined,
    /// No solution exists.
    Inconsistent,
}

/// Solve A x = b and extract the values of the variables listed in `targets`.
///
/// A variable is considered determined when it is a pivot column whose
/// reduced row touches no free column, i.e. when it takes the same value in
/// every solution.
pub fn solve_for(field: &Field, a: &[Vec<u16>], b: &[u16], targets: &[usize]) -> SolveOutcome {
    let ncols = a.first().map_or(0, |r| r.len());
    if ncols == 0 {
        return if b.iter().all(|&v| v == 0) {
            SolveOutcome::Unique(vec![])
        } else {
            SolveOutcome::Inconsistent
        };
    }
    let mut aug = Matrix::new(
        field,
        a.iter()
            .zip(b)
            .map(|(row, &rhs)| {
                let mut r = row.clone();
                r.push(rhs);
                r
            })
            .collect(),
        ncols + 1,
    );
    let pivots = aug.rref();
    if pivots.last() == Some(&ncols) {
        return SolveOutcome::Inconsistent;
    }
    let mut pivot_row = vec![None; ncols];
    for (r, &c) in pivots.iter().enumerate() {
        pivot_row[c] = Some(r);
    }
    let mut values = Vec::with_capacity(targets.len());
    for &t in targets {
        let Some(r) = pivot_row[t] else {
            return SolveOutcome::Underdetermined;
        };
        // A pivot variable is pinned iff its reduced row has no other nonzero
        // column (any nonzero column there is free and shifts the value).
        let pinned = (0..ncols).all(|c| c == t || aug.rows[r][c] == 0);
        if !pinned {
            return SolveOutcome::Underdetermined;
        }
        values.push(aug.rows[r][ncols]);
    }
    SolveOutcome::Unique(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn rref_rank_and_nullspace() {
        let f = Field::new(13, 1).unwrap();
        let m = Matrix::new(&f, vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]], 3);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for row in &m.rows {
            let dot = row
                .iter()
                .zip(&ns[0])
                .fold(0u16, |acc, (&r, &x)| f.add(acc, f.mul(r, x)));
            assert_eq!(dot, 0);
        }
    }

    #[test]
    fn solve_unique_and_underdetermined() {
        let f = Field::new(13, 1).unwrap();
        // x + y = 3, y = 1  ->  x = 2 unique
        let a = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(
            solve_for(&f, &a, &[3, 1], &[0, 1]),
            SolveOutcome::Unique(vec![2, 1])
        );
        // x + y = 3 alone: neither variable pinned
        let a2 = vec![vec![1, 1]];
        assert_eq!(solve_for(&f, &a2, &[3], &[0]), SolveOutcome::Underdetermined);
        // inconsistent
        let a3 = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(solve_for(&f, &a3, &[3, 4], &[0]), SolveOutcome::Inconsistent);
    }
}
