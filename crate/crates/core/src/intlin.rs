//! Exact integer linear algebra: Smith normal form with unimodular transforms.
//!
//! All arithmetic is checked `i128`; an overflow is reported instead of wrapping.

use thiserror::Error;

pub type IntMatrix = Vec<Vec<i128>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntLinError {
    #[error("integer overflow during exact elimination")]
    Overflow,
    #[error("ragged integer matrix: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
}

/// Result of a Smith normal form computation `left · A · right = diag(invariants)`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Invariant factors on the diagonal, nonnegative, each dividing the next.
    /// Has length `min(rows, cols)`; zero entries trail.
    pub invariants: Vec<i128>,
    pub left: IntMatrix,
    /// Inverse of `left`; its columns form a basis of `Z^rows` adapted to the column span of `A`.
    pub left_inv: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.iter().filter(|&&s| s != 0).count()
    }
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn mul_add(a: i128, c: i128, b: i128) -> Result<i128, IntLinError> {
    // a + c * b
    c.checked_mul(b).and_then(|p| a.checked_add(p)).ok_or(IntLinError::Overflow)
}

struct Work {
    a: IntMatrix,
    left: IntMatrix,
    left_inv: IntMatrix,
    right: IntMatrix,
    rows: usize,
    cols: usize,
}

impl Work {
    /// row_i += c * row_j
    fn row_add(&mut self, i: usize, j: usize, c: i128) -> Result<(), IntLinError> {
        if c == 0 {
            return Ok(());
        }
        for col in 0..self.cols {
            self.a[i][col] = mul_add(self.a[i][col], c, self.a[j][col])?;
        }
        for col in 0..self.rows {
            self.left[i][col] = mul_add(self.left[i][col], c, self.left[j][col])?;
        }
        for row in 0..self.rows {
            self.left_inv[row][j] = mul_add(self.left_inv[row][j], -c, self.left_inv[row][i])?;
        }
        Ok(())
    }

    /// col_i += c * col_j
    fn col_add(&mut self, i: usize, j: usize, c: i128) -> Result<(), IntLinError> {
        if c == 0 {
            return Ok(());
        }
        for row in 0..self.rows {
            self.a[row][i] = mul_add(self.a[row][i], c, self.a[row][j])?;
        }
        for row in 0..self.cols {
            self.right[row][i] = mul_add(self.right[row][i], c, self.right[row][j])?;
        }
        Ok(())
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.left.swap(i, j);
            for row in self.left_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut() {
                row.swap(i, j);
            }
            for row in self.right.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn row_negate(&mut self, i: usize) -> Result<(), IntLinError> {
        for v in self.a[i].iter_mut().chain(self.left[i].iter_mut()) {
            *v = v.checked_neg().ok_or(IntLinError::Overflow)?;
        }
        for row in self.left_inv.iter_mut() {
            row[i] = row[i].checked_neg().ok_or(IntLinError::Overflow)?;
        }
        Ok(())
    }
}

fn check_shape(a: &IntMatrix, cols: usize) -> Result<(), IntLinError> {
    for (row, r) in a.iter().enumerate() {
        if r.len() != cols {
            return Err(IntLinError::Ragged { row, found: r.len(), expected: cols });
        }
    }
    Ok(())
}

/// Smith normal form of a `rows × cols` integer matrix. `cols` must be given
/// explicitly so that matrices with zero columns are representable.
pub fn smith_normal_form(a: &IntMatrix, cols: usize) -> Result<SmithForm, IntLinError> {
    check_shape(a, cols)?;
    let rows = a.len();
    let mut w =
        Work { a: a.clone(), left: identity(rows), left_inv: identity(rows), right: identity(cols), rows, cols };

    let diag = rows.min(cols);
    for t in 0..diag {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut pivot: Option<(usize, usize, i128)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = w.a[i][j];
                    if v != 0 {
                        let mag = v.checked_abs().ok_or(IntLinError::Overflow)?;
                        if pivot.is_none_or(|(_, _, m)| mag < m) {
                            pivot = Some((i, j, mag));
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = pivot else { break };
            w.row_swap(t, pi);
            w.col_swap(t, pj);
            let p = w.a[t][t];

            let mut dirty = false;
            for i in t + 1..rows {
                let q = w.a[i][t].div_euclid(p);
                w.row_add(i, t, -q)?;
                dirty |= w.a[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = w.a[t][j].div_euclid(p);
                w.col_add(j, t, -q)?;
                dirty |= w.a[t][j] != 0;
            }
            if dirty {
                continue;
            }

            // Divisibility of the trailing block by the pivot.
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if w.a[i][j] % p != 0 {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => w.row_add(t, i, 1)?,
                None => break,
            }
        }
        if w.a[t][t] < 0 {
            w.row_negate(t)?;
        }
    }

    let invariants = (0..diag).map(|t| w.a[t][t]).collect();
    Ok(SmithForm { invariants, left: w.left, left_inv: w.left_inv, right: w.right })
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize, cols: usize) -> Result<IntMatrix, IntLinError> {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).try_fold(0i128, |acc, k| mul_add(acc, row[k], b[k][j]))).collect())
        .collect()
}
