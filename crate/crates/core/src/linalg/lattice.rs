use num_traits::One;

use super::group::FgAbGroup;
use super::hermite::{echelon_limited, EchelonBasis};
use super::matrix::Matrix;
use super::ring::{Int, Ring};
use super::smith::smith_normal_form;
use crate::error::{Error, Result};

/// Basis (as columns) of `{x : a x = 0}`.
///
/// Over `Z` the result is the full kernel lattice, which is saturated. The
/// basis is put in canonical echelon form.
pub fn kernel_lattice<R: Ring>(a: &Matrix<R>) -> Matrix<R> {
    kernel_basis(a).rows().transpose()
}

/// Kernel of `a` as a canonical [`EchelonBasis`] of row vectors.
pub fn kernel_basis<R: Ring>(a: &Matrix<R>) -> EchelonBasis<R> {
    let n = a.cols();
    // row-reduce [a^T | I]; rows whose a^T part vanishes carry kernel vectors
    let aug = a.transpose().hstack(&Matrix::identity(n));
    let e = echelon_limited(&aug, a.rows(), false);
    let r = e.rank();
    let gens: Vec<Vec<R>> = (r..n)
        .map(|i| e.form.row(i)[a.rows()..].to_vec())
        .collect();
    EchelonBasis::from_vectors(n, &gens)
}

/// Canonical basis (as columns) of the span of the columns of `a`.
pub fn image_lattice<R: Ring>(a: &Matrix<R>) -> Matrix<R> {
    image_basis(a).rows().transpose()
}

pub fn image_basis<R: Ring>(a: &Matrix<R>) -> EchelonBasis<R> {
    EchelonBasis::from_rows(&a.transpose())
}

/// Basis (as columns) of `(Q-span of l) ∩ Z^rows`.
///
/// The columns of `l` must be linearly independent.
pub fn saturate<R: Ring>(l: &Matrix<R>) -> Result<Matrix<R>> {
    let k = l.cols();
    let d = smith_normal_form(l);
    if d.rank() < k {
        return Err(Error::DependentColumns {
            rank: d.rank(),
            cols: k,
        });
    }
    // l V = U^{-1} S, so the first k columns of U^{-1} span the saturation
    let sat = d.u_inv.select_cols(&(0..k).collect::<Vec<_>>());
    Ok(image_lattice(&sat))
}

/// Whether two column-generated lattices coincide.
pub fn same_lattice<R: Ring>(a: &Matrix<R>, b: &Matrix<R>) -> bool {
    a.rows() == b.rows() && image_basis(a) == image_basis(b)
}

/// `Z^rows / column-span(a)` in invariant factor form.
pub fn cokernel(a: &Matrix<Int>) -> FgAbGroup {
    let d = smith_normal_form(a);
    let diag = d.diagonal();
    let rank = d.rank();
    let torsion = diag[..rank]
        .iter()
        .filter(|x| !x.is_one())
        .cloned()
        .collect();
    FgAbGroup::new(a.rows() - rank, torsion).expect("smith diagonal is a divisibility chain")
}

/// A particular solution with the kernel of the coefficient matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution<R> {
    pub particular: Vec<R>,
    /// Kernel basis as columns.
    pub kernel: Matrix<R>,
}

/// Solves `a x = b` over the ring of `R`. `None` if inconsistent over that
/// ring (e.g. `2x = 3` over `Z`).
pub fn solve_linear<R: Ring>(a: &Matrix<R>, b: &[R]) -> Result<Option<Solution<R>>> {
    let Some(x) = solve_particular(a, b)? else {
        return Ok(None);
    };
    Ok(Some(Solution {
        particular: x,
        kernel: kernel_lattice(a),
    }))
}

/// Particular solution of `a x = b` without the kernel.
pub fn solve_particular<R: Ring>(a: &Matrix<R>, b: &[R]) -> Result<Option<Vec<R>>> {
    if b.len() != a.rows() {
        return Err(Error::Shape(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let d = smith_normal_form(a);
    let c = d.u.mul_vec(b);
    let diag = d.diagonal();
    let r = d.rank();
    let mut y = vec![R::zero(); a.cols()];
    for i in 0..r {
        match c[i].exact_div(&diag[i]) {
            Some(q) => y[i] = q,
            None => return Ok(None),
        }
    }
    if c[r..].iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    Ok(Some(d.v.mul_vec(&y)))
}

/// Solves `a X = b` column by column.
pub fn solve_matrix<R: Ring>(a: &Matrix<R>, b: &Matrix<R>) -> Result<Option<Matrix<R>>> {
    let mut cols = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        match solve_particular(a, &b.column(j))? {
            Some(x) => cols.push(x),
            None => return Ok(None),
        }
    }
    Ok(Some(Matrix::from_columns(a.cols(), &cols)))
}

/// Inverse over the ring, if it exists.
pub fn inverse<R: Ring>(a: &Matrix<R>) -> Option<Matrix<R>> {
    if !a.is_square() {
        return None;
    }
    let d = smith_normal_form(a);
    if !d.diagonal().iter().all(|x| x.is_unit()) {
        return None;
    }
    // a = U^{-1} S V^{-1}, S is the identity after normalization
    Some(d.v.mul(&d.u))
}
