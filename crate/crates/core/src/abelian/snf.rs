//! Smith normal form over the integers.
//!
//! Pivoting is deterministic: at each stage the nonzero entry of least absolute
//! value in the remaining block is moved to the diagonal, ties broken by
//! `(row, column)`. Two runs on the same matrix produce the same `U` and `V`.

use std::fmt;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: i64) {
        for j in 0..self.cols {
            let v = self.get(target, j) + factor * self.get(source, j);
            self.set(target, j, v);
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: i64) {
        for i in 0..self.rows {
            let v = self.get(i, target) + factor * self.get(i, source);
            self.set(i, target, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ...`, zeros trailing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    rank: usize,
}

impl SmithDecomposition {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i)).collect()
    }
}

pub fn smith_normal_form(matrix: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let mut a = matrix.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut rank = 0;

    for t in 0..rows.min(cols) {
        let Some((pr, pc)) = min_pivot(&a, t, |_, _| true) else {
            break;
        };
        a.swap_rows(t, pr);
        u.swap_rows(t, pr);
        a.swap_cols(t, pc);
        v.swap_cols(t, pc);

        loop {
            let pivot = a.get(t, t);
            let mut clean = true;
            for i in t + 1..rows {
                let q = a.get(i, t) / pivot;
                if q != 0 {
                    a.add_row_multiple(i, t, -q);
                    u.add_row_multiple(i, t, -q);
                }
                clean &= a.get(i, t) == 0;
            }
            for j in t + 1..cols {
                let q = a.get(t, j) / pivot;
                if q != 0 {
                    a.add_col_multiple(j, t, -q);
                    v.add_col_multiple(j, t, -q);
                }
                clean &= a.get(t, j) == 0;
            }
            if !clean {
                // a remainder smaller than the pivot survived in row or column t
                let (pr, pc) = min_pivot(&a, t, |i, j| i == t || j == t).expect("pivot row/column is nonzero");
                a.swap_rows(t, pr);
                u.swap_rows(t, pr);
                a.swap_cols(t, pc);
                v.swap_cols(t, pc);
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let offender =
                (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a.get(i, j) % pivot != 0);
            match offender {
                Some((i, _)) => {
                    a.add_row_multiple(t, i, 1);
                    u.add_row_multiple(t, i, 1);
                }
                None => break,
            }
        }

        if a.get(t, t) < 0 {
            a.negate_row(t);
            u.negate_row(t);
        }
        rank += 1;
    }

    SmithDecomposition { u, d: a, v, rank }
}

/// Smallest-|value| nonzero entry in the block `[t.., t..]` among cells accepted
/// by `filter`, ties broken by `(row, col)`.
fn min_pivot(a: &IntMatrix, t: usize, filter: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x == 0 || !filter(i, j) {
                continue;
            }
            let key = x.abs();
            if best.is_none_or(|(b, _, _)| key < b) {
                best = Some((key, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Bareiss fraction-free determinant, independent of the SNF code path.
    fn det(m: &IntMatrix) -> i64 {
        let n = m.rows();
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| m.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        if n == 0 {
            return 1;
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    fn check(m: &IntMatrix) -> SmithDecomposition {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.d);
        assert_eq!(det(&snf.u).abs(), 1);
        assert_eq!(det(&snf.v).abs(), 1);
        snf
    }

    #[test]
    fn single_entry() {
        let snf = check(&IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(snf.diagonal(), vec![2]);
        assert_eq!(snf.u, IntMatrix::identity(1));
        assert_eq!(snf.v, IntMatrix::identity(1));
    }

    #[test]
    fn two_by_two() {
        let snf = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(snf.diagonal(), vec![2, 4]);
        assert_eq!(snf.rank(), 2);
    }

    #[test]
    fn zero_matrix() {
        let snf = check(&IntMatrix::zeros(2, 3));
        assert!(snf.d.is_zero());
        assert_eq!(snf.u, IntMatrix::identity(2));
        assert_eq!(snf.v, IntMatrix::identity(3));
        assert_eq!(snf.rank(), 0);
    }

    #[test]
    fn divisibility_fixup_needed() {
        // diag(2, 3) is not in Smith form; the answer is diag(1, 6).
        let snf = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(snf.diagonal(), vec![1, 6]);
    }

    #[test]
    fn rectangular_and_rank_deficient() {
        let snf = check(&IntMatrix::from_rows(&[vec![1, 1], vec![2, 2], vec![3, 3]]));
        assert_eq!(snf.diagonal(), vec![1, 0]);
        assert_eq!(snf.rank(), 1);
        let snf = check(&IntMatrix::from_rows(&[vec![4, -6, 8]]));
        assert_eq!(snf.diagonal(), vec![2]);
    }

    #[test]
    fn deterministic() {
        let m = IntMatrix::from_rows(&[vec![3, -5, 7], vec![9, 2, -4]]);
        assert_eq!(smith_normal_form(&m), smith_normal_form(&m));
    }
}
