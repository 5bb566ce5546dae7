//! Row echelon forms: Hermite normal form over `Z`, reduced row echelon form
//! over `Q`. Both are canonical for the row space (row lattice over `Z`), so
//! equality of row spaces reduces to equality of echelon forms.


use super::matrix::Matrix;
use super::ring::Ring;

/// Result of [`echelon`]: the nonzero echelon rows, their pivot columns, and
/// an invertible transform `u` with `u * input = [rows; 0]`.
#[derive(Clone, Debug)]
pub struct Echelon<R> {
    pub form: Matrix<R>,
    pub pivots: Vec<usize>,
    pub transform: Matrix<R>,
}

impl<R: Ring> Echelon<R> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The first `rank` rows of the echelon form.
    pub fn basis_rows(&self) -> Matrix<R> {
        self.form.select_rows(&(0..self.rank()).collect::<Vec<_>>())
    }
}

/// Canonical row echelon form of `m` (HNF over `Z`, RREF over `Q`).
pub fn echelon<R: Ring>(m: &Matrix<R>) -> Echelon<R> {
    echelon_limited(m, m.cols(), true)
}

/// Echelon form pivoting only within the first `pivot_cols` columns.
///
/// Rows at index `>= rank` have zeros in those columns; with the identity
/// appended on the right this yields kernel bases.
pub(crate) fn echelon_limited<R: Ring>(
    m: &Matrix<R>,
    pivot_cols: usize,
    reduce_above: bool,
) -> Echelon<R> {
    let mut a = m.clone();
    let n = a.rows();
    let mut u = Matrix::identity(n);
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..pivot_cols.min(a.cols()) {
        if pr == n {
            break;
        }
        // bring the smallest nonzero entry of the column up, then clear below
        let Some(first) = smallest_in_column(&a, c, pr) else {
            continue;
        };
        a.swap_rows(pr, first);
        u.swap_rows(pr, first);
        for r in pr + 1..n {
            if a[(r, c)].is_zero() {
                continue;
            }
            let x = a[(pr, c)].clone();
            let y = a[(r, c)].clone();
            if let Some(q) = y.exact_div(&x) {
                let f = -q;
                a.add_row_multiple(r, pr, &f);
                u.add_row_multiple(r, pr, &f);
            } else {
                let (g, s, t) = R::xgcd(&x, &y);
                let uu = -(y.exact_div(&g).expect("gcd divides"));
                let vv = x.exact_div(&g).expect("gcd divides");
                a.combine_rows(pr, r, &s, &t, &uu, &vv);
                u.combine_rows(pr, r, &s, &t, &uu, &vv);
            }
        }
        let unit = a[(pr, c)].canonical_unit();
        if !unit.is_one() {
            a.scale_row(pr, &unit);
            u.scale_row(pr, &unit);
        }
        if reduce_above {
            let p = a[(pr, c)].clone();
            for r in 0..pr {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let (q, _) = a[(r, c)].div_rem_euclid(&p);
                if !q.is_zero() {
                    let f = -q;
                    a.add_row_multiple(r, pr, &f);
                    u.add_row_multiple(r, pr, &f);
                }
            }
        }
        pivots.push(c);
        pr += 1;
    }
    Echelon {
        form: a,
        pivots,
        transform: u,
    }
}

fn smallest_in_column<R: Ring>(a: &Matrix<R>, c: usize, from: usize) -> Option<usize> {
    (from..a.rows())
        .filter(|&r| !a[(r, c)].is_zero())
        .min_by_key(|&r| a[(r, c)].pivot_size())
}

/// A canonically echelonized basis of a row lattice (or row space over `Q`),
/// supporting exact coordinate extraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EchelonBasis<R> {
    rows: Matrix<R>,
    pivots: Vec<usize>,
}

impl<R: Ring> EchelonBasis<R> {
    /// Echelonizes the row span of the generator rows of `gens`.
    pub fn from_rows(gens: &Matrix<R>) -> Self {
        let e = echelon(gens);
        EchelonBasis {
            rows: e.basis_rows(),
            pivots: e.pivots,
        }
    }

    /// Echelonizes the span of the given vectors of length `ambient`.
    pub fn from_vectors(ambient: usize, vecs: &[Vec<R>]) -> Self {
        Self::from_rows(&Matrix::from_rows(vecs.to_vec(), ambient))
    }

    pub fn empty(ambient: usize) -> Self {
        EchelonBasis {
            rows: Matrix::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.rows.cols()
    }

    pub fn rows(&self) -> &Matrix<R> {
        &self.rows
    }

    pub fn vectors(&self) -> Vec<Vec<R>> {
        self.rows.row_vecs()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates `c` with `v = sum c_i * row_i`, or `None` when `v` is not in
    /// the span (lattice over `Z`).
    pub fn coords(&self, v: &[R]) -> Option<Vec<R>> {
        assert_eq!(v.len(), self.ambient(), "vector length mismatch");
        let mut rest = v.to_vec();
        let mut out = Vec::with_capacity(self.dim());
        for (i, &p) in self.pivots.iter().enumerate() {
            // columns before the pivot must already be cleared
            let piv = &self.rows[(i, p)];
            let c = rest[p].exact_div(piv)?;
            if !c.is_zero() {
                for (j, x) in rest.iter_mut().enumerate().skip(p) {
                    let r = &self.rows[(i, j)];
                    if !r.is_zero() {
                        *x = x.clone() - c.clone() * r.clone();
                    }
                }
            }
            out.push(c);
        }
        rest.iter().all(|x| x.is_zero()).then_some(out)
    }

    pub fn contains(&self, v: &[R]) -> bool {
        self.coords(v).is_some()
    }

    /// `sum c_i * row_i`
    pub fn combine(&self, coeffs: &[R]) -> Vec<R> {
        assert_eq!(coeffs.len(), self.dim());
        let mut out = vec![R::zero(); self.ambient()];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, x) in out.iter_mut().enumerate() {
                let r = &self.rows[(i, j)];
                if !r.is_zero() {
                    *x = x.clone() + c.clone() * r.clone();
                }
            }
        }
        out
    }

    /// Whether every row of `other` lies in `self`.
    pub fn contains_all(&self, other: &EchelonBasis<R>) -> bool {
        other.vectors().iter().all(|v| self.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{IntMat, RatMat};
    use num_bigint::BigInt;
    use num_traits::One;

    #[test]
    fn hermite_form_is_canonical() {
        let a = IntMat::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let b = IntMat::from_i64_rows(&[&[-6, 6, 12], &[2, 4, 4], &[12, 0, -12]]);
        let ea = EchelonBasis::from_rows(&a);
        let eb = EchelonBasis::from_rows(&b);
        assert_eq!(ea, eb);
        // transform reproduces the echelon form
        let e = echelon(&a);
        assert_eq!(e.transform.mul(&a), e.form);
        assert_eq!(e.transform.det().magnitude(), BigInt::one().magnitude());
    }

    #[test]
    fn lattice_membership_is_integral() {
        let l = EchelonBasis::from_rows(&IntMat::from_i64_rows(&[&[2, 0], &[0, 3]]));
        assert!(l.contains(&[BigInt::from(4), BigInt::from(-3)]));
        assert!(!l.contains(&[BigInt::from(1), BigInt::from(0)]));
        let q = EchelonBasis::from_rows(&RatMat::from_i64_rows(&[&[2, 0], &[0, 3]]));
        assert_eq!(q.dim(), 2);
        assert_eq!(q.rows(), &RatMat::identity(2));
    }

    #[test]
    fn coordinates_roundtrip() {
        let l = EchelonBasis::from_rows(&IntMat::from_i64_rows(&[&[1, 2, 3], &[0, 4, 5]]));
        let v: Vec<BigInt> = l.combine(&[BigInt::from(3), BigInt::from(-2)]);
        assert_eq!(l.coords(&v).unwrap(), vec![BigInt::from(3), BigInt::from(-2)]);
    }
}
