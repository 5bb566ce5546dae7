//! Commutant algebras of representations restricted to finite stages.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::Algebra;
use crate::diagram::{Diagram, Representation};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, EchelonBasis, Int, Matrix, Rat, Ring};
use crate::module::{InvarianceFailure, Module};

/// One square matrix per object of the stage, in stage order.
pub type Tuple<R> = Vec<Matrix<R>>;

/// `End(T|_E)`: a basis of commuting tuples, echelonized on the flattened
/// coordinates, with structure constants.
#[derive(Clone, Debug)]
pub struct EndAlgebra<R> {
    stage: Diagram,
    ranks: Vec<usize>,
    offsets: Vec<usize>,
    lattice: EchelonBasis<R>,
    basis: Vec<Tuple<R>>,
    algebra: Algebra<R>,
}

/// Assembles the linear system `T(a) x_p - x_q T(a) = 0` for every arrow
/// `a: p -> q` of `stage`, in the variables of all tuple entries.
pub fn commutation_system<R: Ring>(rep: &Representation<R>, stage: &Diagram) -> Result<Matrix<R>> {
    let (ranks, offsets) = layout(rep, stage)?;
    let vars = offsets.last().copied().unwrap_or(0);
    let mut rows = Vec::new();
    for a in stage.arrows() {
        let t = rep.matrix(&a.id)?;
        let p = stage.object_index(&a.src).expect("stage arrow");
        let q = stage.object_index(&a.dst).expect("stage arrow");
        let (np, nq) = (ranks[p], ranks[q]);
        let xp = |i: usize, j: usize| offsets[p] + i * np + j;
        let xq = |i: usize, j: usize| offsets[q] + i * nq + j;
        for r in 0..nq {
            for c in 0..np {
                let mut eq = vec![R::zero(); vars];
                for s in 0..np {
                    let x = &t[(r, s)];
                    if !x.is_zero() {
                        let k = xp(s, c);
                        eq[k] = eq[k].clone() + x.clone();
                    }
                }
                for s in 0..nq {
                    let x = &t[(s, c)];
                    if !x.is_zero() {
                        let k = xq(r, s);
                        eq[k] = eq[k].clone() - x.clone();
                    }
                }
                if eq.iter().any(|x| !x.is_zero()) {
                    rows.push(eq);
                }
            }
        }
    }
    Ok(Matrix::from_rows(rows, vars))
}

fn layout<R: Ring>(rep: &Representation<R>, stage: &Diagram) -> Result<(Vec<usize>, Vec<usize>)> {
    stage.check_subdiagram_of(rep.diagram())?;
    let ranks = stage
        .objects()
        .iter()
        .map(|p| rep.value(p))
        .collect::<Result<Vec<_>>>()?;
    let mut offsets = vec![0];
    for n in &ranks {
        offsets.push(offsets.last().unwrap() + n * n);
    }
    Ok((ranks, offsets))
}

fn tuple_mul<R: Ring>(a: &Tuple<R>, b: &Tuple<R>) -> Tuple<R> {
    a.iter().zip(b).map(|(x, y)| x.mul(y)).collect()
}

fn flatten<R: Ring>(t: &Tuple<R>) -> Vec<R> {
    t.iter().flat_map(|m| m.entries().iter().cloned()).collect()
}

/// The commutant of `rep` restricted to `stage`.
pub fn compute_end<R: Ring>(rep: &Representation<R>, stage: &Diagram) -> Result<EndAlgebra<R>> {
    let stage = rep.canonical_stage(stage)?;
    let (ranks, offsets) = layout(rep, &stage)?;
    let system = commutation_system(rep, &stage)?;
    let lattice = kernel_basis(&system);
    EndAlgebra::from_lattice(stage, ranks, offsets, lattice)
}

impl<R: Ring> EndAlgebra<R> {
    fn from_lattice(
        stage: Diagram,
        ranks: Vec<usize>,
        offsets: Vec<usize>,
        lattice: EchelonBasis<R>,
    ) -> Result<Self> {
        let unflatten = |v: &[R]| -> Tuple<R> {
            ranks
                .iter()
                .zip(&offsets)
                .map(|(&n, &o)| Matrix::from_vec(n, n, v[o..o + n * n].to_vec()))
                .collect()
        };
        let basis: Vec<Tuple<R>> = lattice.vectors().iter().map(|v| unflatten(v)).collect();
        let dim = basis.len();
        let mut structure = Vec::with_capacity(dim * dim * dim);
        for bi in &basis {
            for bj in &basis {
                let prod = flatten(&tuple_mul(bi, bj));
                let c = lattice
                    .coords(&prod)
                    .ok_or_else(|| Error::Internal("commutant is not closed under products".into()))?;
                structure.extend(c);
            }
        }
        let identity: Tuple<R> = ranks.iter().map(|&n| Matrix::identity(n)).collect();
        let unit = lattice
            .coords(&flatten(&identity))
            .ok_or_else(|| Error::Internal("identity tuple is missing from the commutant".into()))?;
        let algebra = Algebra::new(dim, structure, unit)?;
        Ok(EndAlgebra {
            stage,
            ranks,
            offsets,
            lattice,
            basis,
            algebra,
        })
    }

    pub fn stage(&self) -> &Diagram {
        &self.stage
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Tuple<R>] {
        &self.basis
    }

    pub fn algebra(&self) -> &Algebra<R> {
        &self.algebra
    }

    pub fn unit_coords(&self) -> &[R] {
        self.algebra.unit()
    }

    /// Echelonized flattened basis; equal algebras have equal lattices.
    pub fn lattice(&self) -> &EchelonBasis<R> {
        &self.lattice
    }

    /// Rank of `T(p)` for each stage object.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    fn object_slot(&self, p: &str) -> Result<usize> {
        self.stage
            .object_index(p)
            .ok_or_else(|| Error::UnknownObject(format!("'{p}' is not in the stage {}", self.stage)))
    }

    /// The `p`-component of basis element `i`.
    pub fn component(&self, i: usize, p: &str) -> Result<&Matrix<R>> {
        Ok(&self.basis[i][self.object_slot(p)?])
    }

    /// The tuple with the given coordinates.
    pub fn element(&self, coords: &[R]) -> Tuple<R> {
        let v = self.lattice.combine(coords);
        self.ranks
            .iter()
            .zip(&self.offsets)
            .map(|(&n, &o)| Matrix::from_vec(n, n, v[o..o + n * n].to_vec()))
            .collect()
    }

    /// Coordinates of a tuple, if it lies in the algebra.
    pub fn coords_of(&self, t: &Tuple<R>) -> Option<Vec<R>> {
        if t.len() != self.ranks.len()
            || t.iter().zip(&self.ranks).any(|(m, &n)| m.shape() != (n, n))
        {
            return None;
        }
        self.lattice.coords(&flatten(t))
    }

    /// Re-checks every basis tuple against every arrow of the stage.
    pub fn verify(&self, rep: &Representation<R>) -> Result<()> {
        for a in self.stage.arrows() {
            let t = rep.matrix(&a.id)?;
            let p = self.object_slot(&a.src)?;
            let q = self.object_slot(&a.dst)?;
            for (i, b) in self.basis.iter().enumerate() {
                if t.mul(&b[p]) != b[q].mul(t) {
                    return Err(Error::Invalid(format!(
                        "basis element {i} does not commute with arrow '{}'",
                        a.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// `T~(p)`: the carrier `T(p)` with the action of each basis element.
    pub fn module_structure(self: &Arc<Self>, p: &str) -> Result<StageModule<R>> {
        let slot = self.object_slot(p)?;
        let action = self.basis.iter().map(|b| b[slot].clone()).collect();
        Ok(StageModule {
            algebra: Arc::clone(self),
            module: Module::free(self.ranks[slot], action)?,
        })
    }

    /// Matrix of the restriction `self -> smaller` in the two bases
    /// (`smaller.dim() x self.dim()`).
    pub fn restriction_map(&self, smaller: &EndAlgebra<R>) -> Result<Matrix<R>> {
        smaller.stage.check_subdiagram_of(&self.stage)?;
        let slots = smaller
            .stage
            .objects()
            .iter()
            .map(|p| self.object_slot(p))
            .collect::<Result<Vec<_>>>()?;
        let cols = self
            .basis
            .iter()
            .map(|b| {
                let t: Tuple<R> = slots.iter().map(|&s| b[s].clone()).collect();
                smaller
                    .coords_of(&t)
                    .ok_or_else(|| Error::Internal("restricted tuple leaves the smaller commutant".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(smaller.dim(), &cols))
    }

    /// `{"stage", "dim", "basis", "structure", "unit"}`; each basis entry maps
    /// object names to matrices.
    pub fn to_json(&self) -> Value {
        let basis: Vec<Value> = self
            .basis
            .iter()
            .map(|t| {
                let m: serde_json::Map<String, Value> = self
                    .stage
                    .objects()
                    .iter()
                    .zip(t)
                    .map(|(p, x)| (p.clone(), serde_json::to_value(x).expect("matrix json")))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let a = self.algebra.to_json();
        json!({
            "stage": self.stage.to_spec(),
            "ring": R::KIND,
            "dim": self.dim(),
            "basis": basis,
            "structure": a["structure"],
            "unit": a["unit"],
        })
    }
}

impl EndAlgebra<Int> {
    /// Span of the lattice after tensoring with `Q`, in canonical form.
    pub fn rational_span(&self) -> EchelonBasis<Rat> {
        EchelonBasis::from_rows(&self.lattice.rows().to_rat())
    }
}

/// A module over a stage commutant.
#[derive(Clone, Debug)]
pub struct StageModule<R> {
    pub algebra: Arc<EndAlgebra<R>>,
    pub module: Module<R>,
}

impl<R: Ring> StageModule<R> {
    pub fn new(algebra: Arc<EndAlgebra<R>>, module: Module<R>) -> Result<Self> {
        module.check_algebra_action(algebra.algebra())?;
        Ok(StageModule { algebra, module })
    }

    pub fn carrier(&self) -> crate::linalg::FgAbGroup {
        self.module.carrier()
    }

    pub fn action(&self, i: usize) -> &Matrix<R> {
        &self.module.action()[i]
    }
}

/// Whether the subgroup spanned by the columns of `gens` is a submodule;
/// on failure, a basis element moving a generator outside.
pub fn is_invariant_subspace<R: Ring>(
    m: &StageModule<R>,
    gens: &Matrix<R>,
) -> Result<Option<InvarianceFailure<R>>> {
    m.module.check_invariant(gens)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::diagram::Arrow;
    use crate::linalg::IntMat;

    fn rep(
        objects: &[(&str, usize)],
        arrows: &[(&str, &str, &str, IntMat)],
    ) -> Representation<Int> {
        let d = Diagram::new(
            objects.iter().map(|(o, _)| o.to_string()).collect(),
            arrows
                .iter()
                .map(|(id, s, t, _)| Arrow {
                    id: id.to_string(),
                    src: s.to_string(),
                    dst: t.to_string(),
                })
                .collect(),
            vec![],
        )
        .unwrap();
        let values = objects.iter().map(|(o, n)| (o.to_string(), *n)).collect();
        let matrices: BTreeMap<_, _> = arrows
            .iter()
            .map(|(id, _, _, m)| (id.to_string(), m.clone()))
            .collect();
        Representation::new(d, values, matrices).unwrap()
    }

    fn perm(images: &[usize]) -> IntMat {
        // column j has a 1 in row images[j]
        let n = images.len();
        IntMat::from_fn(n, n, |i, j| Int::from((images[j] == i) as i64))
    }

    #[test]
    fn single_object_gives_full_matrix_algebra() {
        let t = rep(&[("p", 3)], &[]);
        let e = compute_end(&t, t.diagram()).unwrap();
        assert_eq!(e.dim(), 9);
        e.algebra().check_axioms().unwrap();
        assert!(e.algebra().noncommuting_pair().is_some());
    }

    #[test]
    fn multiplication_by_two_forces_the_diagonal() {
        let t = rep(
            &[("p", 1), ("q", 1)],
            &[("a", "p", "q", IntMat::from_i64_rows(&[&[2]]))],
        );
        let e = Arc::new(compute_end(&t, t.diagram()).unwrap());
        assert_eq!(e.dim(), 1);
        assert_eq!(e.basis()[0], vec![IntMat::identity(1), IntMat::identity(1)]);
        assert_eq!(e.unit_coords(), &[Int::from(1)]);
        for p in ["p", "q"] {
            let m = e.module_structure(p).unwrap();
            assert_eq!(m.action(0), &IntMat::identity(1));
        }
        assert!(e.module_structure("r").is_err());
    }

    #[test]
    fn regular_representation_of_s3() {
        // permutations of {0,1,2} in a fixed order; regular action on indices
        let elems: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |a: &[usize; 3], b: &[usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let index = |x: [usize; 3]| elems.iter().position(|e| *e == x).unwrap();
        let arrows: Vec<_> = elems
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let images: Vec<usize> = elems.iter().map(|h| index(compose(g, h))).collect();
                (format!("g{k}"), perm(&images))
            })
            .collect();
        let arrows_ref: Vec<(&str, &str, &str, IntMat)> = arrows
            .iter()
            .map(|(id, m)| (id.as_str(), "p", "p", m.clone()))
            .collect();
        let t = rep(&[("p", 6)], &arrows_ref);
        let e = compute_end(&t, t.diagram()).unwrap();
        assert_eq!(e.dim(), 6);
        e.verify(&t).unwrap();
        e.algebra().check_axioms().unwrap();
    }

    #[test]
    fn structure_constants_reproduce_products() {
        let t = rep(
            &[("p", 2), ("q", 2)],
            &[("a", "p", "q", IntMat::from_i64_rows(&[&[1, 0], &[0, 0]]))],
        );
        let e = compute_end(&t, t.diagram()).unwrap();
        for i in 0..e.dim() {
            for j in 0..e.dim() {
                let raw = tuple_mul(&e.basis()[i], &e.basis()[j]);
                assert_eq!(e.element(e.algebra().product_of_basis(i, j)), raw);
            }
        }
        let identity = vec![IntMat::identity(2), IntMat::identity(2)];
        assert_eq!(e.element(e.unit_coords()), identity);
    }

    #[test]
    fn base_change_keeps_the_span() {
        let t = rep(
            &[("p", 2), ("q", 1)],
            &[("a", "p", "q", IntMat::from_i64_rows(&[&[2, 4]]))],
        );
        let ez = compute_end(&t, t.diagram()).unwrap();
        let tq = t.base_change_q();
        let eq = compute_end(&tq, tq.diagram()).unwrap();
        assert_eq!(ez.dim(), eq.dim());
        assert_eq!(&ez.rational_span(), eq.lattice());
    }

    #[test]
    fn restriction_maps() {
        let t = rep(&[("p", 2), ("q", 1)], &[]);
        let full = compute_end(&t, t.diagram()).unwrap();
        let p_only = compute_end(&t, &t.diagram().subdiagram(&["p"], &[]).unwrap()).unwrap();
        let r = full.restriction_map(&p_only).unwrap();
        assert_eq!(r.shape(), (4, 5));
        assert_eq!(r.rank(), 4);
        let same = full.restriction_map(&full).unwrap();
        assert_eq!(same, IntMat::identity(5));
        assert!(p_only.restriction_map(&full).is_err());
    }

    #[test]
    fn invariant_subspaces_of_regular_c2() {
        let t = rep(
            &[("p", 2)],
            &[
                ("e", "p", "p", IntMat::identity(2)),
                ("s", "p", "p", perm(&[1, 0])),
            ],
        );
        let e = Arc::new(compute_end(&t, t.diagram()).unwrap());
        let m = e.module_structure("p").unwrap();
        assert!(is_invariant_subspace(&m, &IntMat::from_i64_rows(&[&[1], &[1]]))
            .unwrap()
            .is_none());
        assert!(is_invariant_subspace(&m, &IntMat::from_i64_rows(&[&[1], &[0]]))
            .unwrap()
            .is_some());
    }

    #[test]
    fn json_shape() {
        let t = rep(&[("p", 1)], &[]);
        let e = compute_end(&t, t.diagram()).unwrap();
        let v = e.to_json();
        assert_eq!(v["dim"], 1);
        assert_eq!(v["unit"], json!([1]));
        assert_eq!(v["structure"], json!([[0, 0, 0, 1]]));
    }
}
