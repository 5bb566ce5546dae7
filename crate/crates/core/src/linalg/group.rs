use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lattice::kernel_lattice;
use super::matrix::{IntMat, Matrix};
use super::ring::Ring;
use super::smith::smith_normal_form;
use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^free_rank ⊕ Z/d1 ⊕ ... ⊕ Z/dk` with
/// `2 <= d1 | d2 | ... | dk`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgAbGroup {
    free_rank: usize,
    #[serde(with = "bigint_vec")]
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        for (i, d) in torsion.iter().enumerate() {
            if d < &BigInt::from(2) {
                return Err(Error::Invalid(format!("torsion factor {d} is below 2")));
            }
            if let Some(next) = torsion.get(i + 1) {
                if !(next % d).is_zero() {
                    return Err(Error::Invalid(format!(
                        "torsion factors {d}, {next} do not form a divisibility chain"
                    )));
                }
            }
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut rel = Vec::new();
        rel.extend(self.torsion.iter().cloned());
        rel.extend(other.torsion.iter().cloned());
        let n = rel.len();
        let m = IntMat::from_fn(n, n, |i, j| if i == j { rel[i].clone() } else { BigInt::zero() });
        let t = super::lattice::cokernel(&m);
        FgAbGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: t.torsion,
        }
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup({self})")
    }
}

/// A group given by generators and relations: `R^generators / column-span(relations)`.
///
/// Over `Q` this is a vector space; relations then only cut down the dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation<R> {
    pub generators: usize,
    pub relations: Matrix<R>,
}

/// A presentation in standard form together with the coordinate changes to
/// and from the original presentation.
#[derive(Clone, Debug)]
pub struct Standardized<R> {
    pub presentation: Presentation<R>,
    /// Original coordinates to standard coordinates.
    pub to_std: Matrix<R>,
    /// Standard coordinates to original coordinates.
    pub from_std: Matrix<R>,
}

impl<R: Ring> Presentation<R> {
    pub fn free(n: usize) -> Self {
        Presentation {
            generators: n,
            relations: Matrix::zeros(n, 0),
        }
    }

    pub fn new(relations: Matrix<R>) -> Self {
        Presentation {
            generators: relations.rows(),
            relations,
        }
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_zero()
    }

    /// Whether `v` is zero in the quotient.
    pub fn is_relation(&self, v: &[R]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        if self.relations.cols() == 0 {
            return false;
        }
        super::lattice::solve_particular(&self.relations, v)
            .expect("shape checked")
            .is_some()
    }

    /// Whether all columns of `m` are zero in the quotient.
    pub fn kills(&self, m: &Matrix<R>) -> bool {
        assert_eq!(m.rows(), self.generators);
        (0..m.cols()).all(|j| self.is_relation(&m.column(j)))
    }

    /// Brings the presentation to Smith form: first the torsion generators
    /// with a diagonal relation each, then the free generators. Trivial
    /// generators are dropped.
    pub fn standardize(&self) -> Standardized<R> {
        let d = smith_normal_form(&self.relations);
        let diag = d.diagonal();
        let r = d.rank();
        let keep: Vec<usize> = (0..self.generators)
            .filter(|&i| i >= r || !diag[i].is_unit())
            .collect();
        let torsion_kept: Vec<usize> = keep.iter().copied().filter(|&i| i < r).collect();
        let mut rel = Matrix::zeros(keep.len(), torsion_kept.len());
        for (c, &i) in torsion_kept.iter().enumerate() {
            rel[(c, c)] = diag[i].clone();
        }
        Standardized {
            presentation: Presentation {
                generators: keep.len(),
                relations: rel,
            },
            to_std: d.u.select_rows(&keep),
            from_std: d.u_inv.select_cols(&keep),
        }
    }

    /// Invariant factor form of the presented group (over `Q`: its dimension
    /// as free rank).
    pub fn group(&self) -> FgAbGroup {
        let d = smith_normal_form(&self.relations);
        let r = d.rank();
        let torsion = if R::KIND == super::RingKind::Z {
            d.diagonal()[..r]
                .iter()
                .map(|x| x.to_rat().to_integer().abs())
                .filter(|x| !x.is_one())
                .collect()
        } else {
            Vec::new()
        };
        FgAbGroup {
            free_rank: self.generators - r,
            torsion,
        }
    }

    pub fn direct_sum(&self, other: &Presentation<R>) -> Presentation<R> {
        Presentation {
            generators: self.generators + other.generators,
            relations: self.relations.block_diag(&other.relations),
        }
    }

    /// Whether `f` maps the relations of `self` into those of `target`.
    pub fn respects(&self, f: &Matrix<R>, target: &Presentation<R>) -> bool {
        f.shape() == (target.generators, self.generators)
            && target.kills(&f.mul(&self.relations))
    }
}

/// Kernel of a homomorphism of presented groups, as a presentation of the
/// kernel subgroup together with its inclusion into the source generators.
pub fn hom_kernel<R: Ring>(
    source: &Presentation<R>,
    target: &Presentation<R>,
    f: &Matrix<R>,
) -> Result<(Presentation<R>, Matrix<R>)> {
    if !source.respects(f, target) {
        return Err(Error::Invalid(
            "map does not respect the presentations".into(),
        ));
    }
    let n = source.generators;
    // x with f x in span(target relations): kernel of [f | -rel]
    let sys = f.hstack(&target.relations.neg());
    let k = kernel_lattice(&sys);
    let proj = k.select_rows(&(0..n).collect::<Vec<_>>());
    let basis = super::lattice::image_lattice(&proj);
    let rel = super::lattice::solve_matrix(&basis, &source.relations)?
        .ok_or_else(|| Error::Internal("source relations escape the kernel".into()))?;
    Ok((Presentation::new(rel), basis))
}

/// Cokernel of a homomorphism of presented groups; the projection from the
/// target is the identity on generators.
pub fn hom_cokernel<R: Ring>(
    source: &Presentation<R>,
    target: &Presentation<R>,
    f: &Matrix<R>,
) -> Result<Presentation<R>> {
    if !source.respects(f, target) {
        return Err(Error::Invalid(
            "map does not respect the presentations".into(),
        ));
    }
    Ok(Presentation::new(target.relations.hstack(f)))
}

mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<serde_json::Value> = v.iter().map(crate::linalg::json::int_to_json).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let vals = Vec::<serde_json::Value>::deserialize(d)?;
        vals.iter()
            .map(|v| crate::linalg::json::int_from_json(v).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMat;

    #[test]
    fn rejects_broken_chains() {
        assert!(FgAbGroup::new(0, vec![BigInt::from(2), BigInt::from(3)]).is_err());
        assert!(FgAbGroup::new(0, vec![BigInt::from(1)]).is_err());
        assert!(FgAbGroup::new(1, vec![BigInt::from(2), BigInt::from(4)]).is_ok());
    }

    #[test]
    fn direct_sum_renormalizes() {
        let a = FgAbGroup::new(0, vec![BigInt::from(2)]).unwrap();
        let b = FgAbGroup::new(1, vec![BigInt::from(3)]).unwrap();
        let s = a.direct_sum(&b);
        assert_eq!(s, FgAbGroup::new(1, vec![BigInt::from(6)]).unwrap());
        assert_eq!(s.to_string(), "Z + Z/6");
    }

    #[test]
    fn standardizing_drops_trivial_generators() {
        // Z^3 / <(1,1,0), (0,2,0)>  ≅  Z/2 ⊕ Z
        let p = Presentation::new(IntMat::from_i64_rows(&[&[1, 0], &[1, 2], &[0, 0]]));
        let s = p.standardize();
        assert_eq!(s.presentation.generators, 2);
        assert_eq!(s.presentation.group(), p.group());
        assert_eq!(p.group(), FgAbGroup::new(1, vec![BigInt::from(2)]).unwrap());
        // round trip through the standard coordinates is the identity mod relations
        let back = s.from_std.mul(&s.to_std);
        let diff = back.sub(&IntMat::identity(3));
        assert!(p.kills(&diff));
    }

    #[test]
    fn kernel_into_torsion_target() {
        // Z -> Z/2, 1 -> 1: kernel is 2Z
        let src = Presentation::free(1);
        let tgt = Presentation::new(IntMat::from_i64_rows(&[&[2]]));
        let (k, incl) = hom_kernel(&src, &tgt, &IntMat::identity(1)).unwrap();
        assert_eq!(incl, IntMat::from_i64_rows(&[&[2]]));
        assert_eq!(k.group(), FgAbGroup::free(1));
        let c = hom_cokernel(&src, &tgt, &IntMat::identity(1)).unwrap();
        assert!(c.group().is_trivial());
    }
}
