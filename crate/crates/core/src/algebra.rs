//! Finite rank algebras given by structure constants.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::json::{scalar_from_json, scalar_to_json, vector_to_json};
use crate::linalg::Ring;

/// An algebra free of rank `dim` over the coefficient ring, with
/// `b_i * b_j = sum_k c[i][j][k] b_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra<R> {
    dim: usize,
    structure: Vec<R>,
    unit: Vec<R>,
}

impl<R: Ring> Algebra<R> {
    /// `structure[(i * dim + j) * dim + k] = c[i][j][k]`.
    pub fn new(dim: usize, structure: Vec<R>, unit: Vec<R>) -> Result<Self> {
        if structure.len() != dim * dim * dim || unit.len() != dim {
            return Err(Error::Shape(format!(
                "algebra of dimension {dim} needs {} structure constants and {dim} unit coordinates",
                dim * dim * dim
            )));
        }
        Ok(Algebra {
            dim,
            structure,
            unit,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &R {
        &self.structure[(i * self.dim + j) * self.dim + k]
    }

    /// Coordinates of `b_i * b_j`.
    pub fn product_of_basis(&self, i: usize, j: usize) -> &[R] {
        let s = (i * self.dim + j) * self.dim;
        &self.structure[s..s + self.dim]
    }

    pub fn unit(&self) -> &[R] {
        &self.unit
    }

    pub fn mul(&self, a: &[R], b: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.dim];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x.clone() * y.clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *o = o.clone() + xy.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<R> {
        let mut v = vec![R::zero(); self.dim];
        v[i] = R::one();
        v
    }

    /// Checks associativity on all basis triples and the unit laws.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            let bi = self.basis_vector(i);
            if self.mul(&self.unit, &bi) != bi || self.mul(&bi, &self.unit) != bi {
                return Err(Error::Invalid(format!("unit law fails for basis element {i}")));
            }
            for j in 0..n {
                let bij = self.product_of_basis(i, j).to_vec();
                for k in 0..n {
                    let bk = self.basis_vector(k);
                    let left = self.mul(&bij, &bk);
                    let right = self.mul(&bi, self.product_of_basis(j, k));
                    if left != right {
                        return Err(Error::Invalid(format!(
                            "associativity fails on basis triple ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// A pair `(i, j)` with `b_i b_j != b_j b_i`, if any.
    pub fn noncommuting_pair(&self) -> Option<(usize, usize)> {
        (0..self.dim)
            .flat_map(|i| (i + 1..self.dim).map(move |j| (i, j)))
            .find(|&(i, j)| self.product_of_basis(i, j) != self.product_of_basis(j, i))
    }

    /// `{"dim": d, "structure": [[i, j, k, c], ...], "unit": [...]}` with
    /// zero constants omitted.
    pub fn to_json(&self) -> Value {
        let mut triples = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        triples.push(json!([i, j, k, scalar_to_json(c)]));
                    }
                }
            }
        }
        json!({
            "dim": self.dim,
            "structure": triples,
            "unit": vector_to_json(&self.unit),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("algebra: {m}"));
        let dim = v["dim"].as_u64().ok_or_else(|| bad("missing dim"))? as usize;
        let mut structure = vec![R::zero(); dim * dim * dim];
        for t in v["structure"].as_array().ok_or_else(|| bad("missing structure"))? {
            let t = t.as_array().filter(|t| t.len() == 4).ok_or_else(|| bad("structure entries are [i, j, k, c]"))?;
            let idx = |x: &Value| {
                x.as_u64()
                    .map(|x| x as usize)
                    .filter(|&x| x < dim)
                    .ok_or_else(|| bad("structure index out of range"))
            };
            let (i, j, k) = (idx(&t[0])?, idx(&t[1])?, idx(&t[2])?);
            structure[(i * dim + j) * dim + k] = scalar_from_json(&t[3]).map_err(|e| bad(&e))?;
        }
        let unit = v["unit"]
            .as_array()
            .ok_or_else(|| bad("missing unit"))?
            .iter()
            .map(|x| scalar_from_json(x).map_err(|e| bad(&e)))
            .collect::<Result<Vec<R>>>()?;
        Algebra::new(dim, structure, unit)
    }
}
