//! Exact integer matrix utilities: Smith normal form with transforms,
//! integer linear solving and kernels. All arithmetic is 64-bit with
//! checked overflow; the matrices in this crate stay far below that.

/// Checked i64 multiplication; overflow is a bug at this problem scale.
pub fn mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("integer overflow in multiplication")
}

/// Checked i64 addition.
pub fn add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("integer overflow in addition")
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_slice(xs: &[i64]) -> i64 {
    xs.iter().fold(0, |g, &x| gcd(g, x))
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = add(out[(i, j)], mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0i64, |s, j| add(s, mul(self[(i, j)], v[j]))))
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let t = self[(a, j)];
            self[(a, j)] = self[(b, j)];
            self[(b, j)] = t;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let t = self[(i, a)];
            self[(i, a)] = self[(i, b)];
            self[(i, b)] = t;
        }
    }

    /// row a += k * row b
    fn add_row(&mut self, a: usize, b: usize, k: i64) {
        for j in 0..self.cols {
            self[(a, j)] = add(self[(a, j)], mul(k, self[(b, j)]));
        }
    }

    /// col a += k * col b
    fn add_col(&mut self, a: usize, b: usize, k: i64) {
        for i in 0..self.rows {
            self[(i, a)] = add(self[(i, a)], mul(k, self[(i, b)]));
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            self[(a, j)] = -self[(a, j)];
        }
    }

    /// Determinant by Bareiss fraction-free elimination (square matrices).
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut m: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| self[(i, j)] as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[k][k] == 0 {
                let swap = (k + 1..n).find(|&i| m[i][k] != 0);
                match swap {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[i][j]
                        .checked_mul(m[k][k])
                        .and_then(|x| x.checked_sub(m[i][k].checked_mul(m[k][j]).unwrap()))
                        .expect("overflow in determinant");
                    m[i][j] = num / prev;
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        let d = sign * m[n - 1][n - 1];
        i64::try_from(d).expect("determinant out of i64 range")
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular and the
/// diagonal of `d` a divisibility chain.
pub struct Snf {
    pub d: Mat,
    pub u: Mat,
    pub v: Mat,
}

impl Snf {
    /// Diagonal entries (length min(rows, cols)).
    pub fn diag(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diag().iter().filter(|&&x| x != 0).count()
    }

    /// Nontrivial invariant factors (> 1) in divisibility order.
    pub fn invariant_factors(&self) -> Vec<i64> {
        self.diag().into_iter().filter(|&x| x > 1).collect()
    }
}

pub fn smith_normal_form(a: &Mat) -> Snf {
    let mut d = a.clone();
    let mut u = Mat::identity(a.rows);
    let mut v = Mat::identity(a.cols);
    let n = a.rows.min(a.cols);

    for t in 0..n {
        loop {
            // Pick the nonzero entry of minimal absolute value in the
            // remaining block as pivot; keeps intermediate growth small.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    if d[(i, j)] != 0
                        && pivot.is_none_or(|(pi, pj)| d[(i, j)].abs() < d[(pi, pj)].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                // remaining block is zero
                return finish(d, u, v, n);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = d[(t, t)];
            let mut clean = true;
            for i in t + 1..d.rows {
                if d[(i, t)] != 0 {
                    let q = d[(i, t)] / p;
                    d.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                    if d[(i, t)] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..d.cols {
                if d[(t, j)] != 0 {
                    let q = d[(t, j)] / p;
                    d.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                    if d[(t, j)] != 0 {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Pivot divides everything it eliminated; enforce that it also
            // divides the rest of the block so the chain condition can hold.
            let p = d[(t, t)];
            let bad = (t + 1..d.rows)
                .flat_map(|i| (t + 1..d.cols).map(move |j| (i, j)))
                .find(|&(i, j)| d[(i, j)] % p != 0);
            if let Some((i, _)) = bad {
                d.add_row(t, i, 1);
                u.add_row(t, i, 1);
                continue;
            }
            break;
        }
    }
    finish(d, u, v, n)
}

fn finish(mut d: Mat, mut u: Mat, v: Mat, n: usize) -> Snf {
    for t in 0..n {
        if d[(t, t)] < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    // Order: with the divisibility enforcement above, d[t][t] divides all
    // later entries, so the chain already holds; assert it.
    for t in 1..n {
        if d[(t, t)] != 0 && d[(t - 1, t - 1)] != 0 {
            assert_eq!(d[(t, t)] % d[(t - 1, t - 1)], 0, "snf chain violated");
        }
        if d[(t - 1, t - 1)] == 0 {
            assert_eq!(d[(t, t)], 0, "snf zero ordering violated");
        }
    }
    Snf { d, u, v }
}

/// One integer solution of `a x = b`, if any.
pub fn solve(a: &Mat, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(a.rows, b.len());
    let snf = smith_normal_form(a);
    let y = snf.u.mul_vec(b);
    let n = a.rows.min(a.cols);
    let mut z = vec![0i64; a.cols];
    for i in 0..a.rows {
        if i < n && snf.d[(i, i)] != 0 {
            if y[i] % snf.d[(i, i)] != 0 {
                return None;
            }
            z[i] = y[i] / snf.d[(i, i)];
        } else if y[i] != 0 {
            return None;
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// Basis of the integer kernel of `a` (columns of `v` past the rank).
pub fn kernel(a: &Mat) -> Vec<Vec<i64>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..a.cols).map(|j| snf.v.col(j)).collect()
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(a: &Mat) -> Option<Mat> {
    assert_eq!(a.rows, a.cols);
    if a.det().abs() != 1 {
        return None;
    }
    let n = a.rows;
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0i64; n];
        e[j] = 1;
        let col = solve(a, &e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn snf_small() {
        let a = Mat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diag(), vec![2, 2, 156]);
        assert_eq!(snf.u.matmul(&a).matmul(&snf.v), snf.d);
        assert_eq!(snf.u.det().abs(), 1);
        assert_eq!(snf.v.det().abs(), 1);
    }

    #[test]
    fn solve_and_kernel() {
        let a = Mat::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let x = solve(&a, &[6, 12]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![6, 12]);
        assert!(solve(&a, &[1, 1]).is_none());
        let k = kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(a.mul_vec(v), vec![0, 0]);
        }
    }

    proptest! {
        #[test]
        fn snf_props(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-9i64..10, 16)) {
            let mut a = Mat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a[(i, j)] = seed[i * cols + j];
                }
            }
            let snf = smith_normal_form(&a);
            prop_assert_eq!(snf.u.matmul(&a).matmul(&snf.v), snf.d.clone());
            prop_assert_eq!(snf.u.det().abs(), 1);
            prop_assert_eq!(snf.v.det().abs(), 1);
            // diagonal divisibility chain
            let diag = snf.diag();
            for t in 1..diag.len() {
                if diag[t - 1] != 0 && diag[t] != 0 {
                    prop_assert_eq!(diag[t] % diag[t - 1], 0);
                }
            }
            // off-diagonal zero
            for i in 0..rows {
                for j in 0..cols {
                    if i != j {
                        prop_assert_eq!(snf.d[(i, j)], 0);
                    }
                }
            }
        }
    }
}
