
use super::matrix::Matrix;
use super::ring::Ring;

/// `u * a * v = s` with `u`, `v` invertible over the ring and `s` diagonal
/// with a divisibility chain. The inverses of `u` and `v` are kept too.
#[derive(Clone, Debug)]
pub struct SmithDecomposition<R> {
    pub u: Matrix<R>,
    pub s: Matrix<R>,
    pub v: Matrix<R>,
    pub u_inv: Matrix<R>,
    pub v_inv: Matrix<R>,
}

impl<R: Ring> SmithDecomposition<R> {
    /// Diagonal entries `s[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<R> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s[(i, i)].clone()).collect()
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

struct Tracker<R> {
    a: Matrix<R>,
    u: Matrix<R>,
    u_inv: Matrix<R>,
    v: Matrix<R>,
    v_inv: Matrix<R>,
}

impl<R: Ring> Tracker<R> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &R) {
        self.a.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        self.u_inv.add_col_multiple(src, dst, &(-c.clone()));
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &R) {
        self.a.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        self.v_inv.add_row_multiple(src, dst, &(-c.clone()));
    }

    fn scale_row(&mut self, i: usize, unit: &R) {
        let inv = R::one().exact_div(unit).expect("unit");
        self.a.scale_row(i, unit);
        self.u.scale_row(i, unit);
        self.u_inv.scale_col(i, &inv);
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
///
/// Over `Q` the diagonal consists of ones followed by zeros.
pub fn smith_normal_form<R: Ring>(a: &Matrix<R>) -> SmithDecomposition<R> {
    let (m, n) = a.shape();
    let mut t = Tracker {
        a: a.clone(),
        u: Matrix::identity(m),
        u_inv: Matrix::identity(m),
        v: Matrix::identity(n),
        v_inv: Matrix::identity(n),
    };
    for k in 0..m.min(n) {
        let Some((pi, pj)) = smallest_entry(&t.a, k) else {
            break;
        };
        t.swap_rows(k, pi);
        t.swap_cols(k, pj);
        loop {
            let mut clean = true;
            for i in k + 1..m {
                if t.a[(i, k)].is_zero() {
                    continue;
                }
                let (q, _) = t.a[(i, k)].div_rem_euclid(&t.a[(k, k)]);
                t.add_row(i, k, &(-q));
                if !t.a[(i, k)].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if t.a[(k, j)].is_zero() {
                    continue;
                }
                let (q, _) = t.a[(k, j)].div_rem_euclid(&t.a[(k, k)]);
                t.add_col(j, k, &(-q));
                if !t.a[(k, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // a smaller remainder appeared in the pivot row or column
                let (pi, pj) = smallest_in_cross(&t.a, k);
                t.swap_rows(k, pi);
                t.swap_cols(k, pj);
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let piv = t.a[(k, k)].clone();
            let offending = (k + 1..m)
                .find(|&i| (k + 1..n).any(|j| t.a[(i, j)].exact_div(&piv).is_none()));
            match offending {
                Some(i) => t.add_row(k, i, &R::one()),
                None => break,
            }
        }
        let unit = t.a[(k, k)].canonical_unit();
        if !unit.is_one() {
            t.scale_row(k, &unit);
        }
    }
    SmithDecomposition {
        u: t.u,
        s: t.a,
        v: t.v,
        u_inv: t.u_inv,
        v_inv: t.v_inv,
    }
}

fn smallest_entry<R: Ring>(a: &Matrix<R>, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), num_bigint::BigInt)> = None;
    for i in k..a.rows() {
        for j in k..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            let s = x.pivot_size();
            if best.as_ref().is_none_or(|(_, b)| s < *b) {
                best = Some(((i, j), s));
            }
        }
    }
    best.map(|(p, _)| p)
}

fn smallest_in_cross<R: Ring>(a: &Matrix<R>, k: usize) -> (usize, usize) {
    let mut best = ((k, k), a[(k, k)].pivot_size());
    for i in k + 1..a.rows() {
        let x = &a[(i, k)];
        if !x.is_zero() && x.pivot_size() < best.1 {
            best = ((i, k), x.pivot_size());
        }
    }
    for j in k + 1..a.cols() {
        let x = &a[(k, j)];
        if !x.is_zero() && x.pivot_size() < best.1 {
            best = ((k, j), x.pivot_size());
        }
    }
    best.0
}
