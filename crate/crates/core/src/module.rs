//! Modules over a finite rank algebra, stored as a presented group with one
//! action matrix per algebra basis element.

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::json::vector_to_json;
use crate::linalg::{
    hom_kernel, kernel_lattice, solve_matrix, EchelonBasis, FgAbGroup, Matrix, Presentation,
    Ring, Standardized,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module<R> {
    presentation: Presentation<R>,
    action: Vec<Matrix<R>>,
}

/// Witness that a subgroup is not stable under the action: basis element
/// `basis_index` sends generator `kernel_gen` to `image`, which lies outside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceFailure<R> {
    pub basis_index: usize,
    pub generator_index: usize,
    pub generator: Vec<R>,
    pub image: Vec<R>,
}

impl<R: Ring> InvarianceFailure<R> {
    pub fn to_json(&self) -> Value {
        json!({
            "basisIndex": self.basis_index,
            "kernelGen": vector_to_json(&self.generator),
            "image": vector_to_json(&self.image),
        })
    }
}

/// All module maps between two modules, modulo maps into the target
/// relations.
#[derive(Clone, Debug)]
pub struct HomGroup<R> {
    rows: usize,
    cols: usize,
    valid: EchelonBasis<R>,
    generators: Vec<Matrix<R>>,
    group: FgAbGroup,
}

impl<R: Ring> HomGroup<R> {
    /// Representatives of the standard generators of the hom group: torsion
    /// generators first, then a basis of the free part.
    pub fn generators(&self) -> &[Matrix<R>] {
        &self.generators
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    /// Rank of the free part (dimension over `Q`).
    pub fn rank(&self) -> usize {
        self.group.free_rank()
    }

    /// Whether `f` is a module map (the set of module maps is a lattice
    /// containing all maps into the target relations).
    pub fn contains(&self, f: &Matrix<R>) -> bool {
        f.shape() == (self.rows, self.cols) && self.valid.contains(f.entries())
    }

    /// Lattice of valid matrices (flattened row-major), before quotienting.
    pub fn matrix_lattice(&self) -> &EchelonBasis<R> {
        &self.valid
    }

    /// Whether every module map of `self` is also one of `other`.
    pub fn is_contained_in(&self, other: &HomGroup<R>) -> bool {
        other.valid.contains_all(&self.valid)
    }
}

impl<R: Ring> Module<R> {
    pub fn new(presentation: Presentation<R>, action: Vec<Matrix<R>>) -> Result<Self> {
        let n = presentation.generators;
        for (i, m) in action.iter().enumerate() {
            if m.shape() != (n, n) {
                return Err(Error::Shape(format!(
                    "action of basis element {i} is {}x{}, carrier has {n} generators",
                    m.rows(),
                    m.cols()
                )));
            }
            if !presentation.respects(m, &presentation) {
                return Err(Error::Invalid(format!(
                    "action of basis element {i} does not preserve the relations"
                )));
            }
        }
        Ok(Module {
            presentation,
            action,
        })
    }

    pub fn free(n: usize, action: Vec<Matrix<R>>) -> Result<Self> {
        Self::new(Presentation::free(n), action)
    }

    pub fn zero(actions: usize) -> Self {
        Module {
            presentation: Presentation::free(0),
            action: vec![Matrix::zeros(0, 0); actions],
        }
    }

    pub fn presentation(&self) -> &Presentation<R> {
        &self.presentation
    }

    pub fn generators(&self) -> usize {
        self.presentation.generators
    }

    pub fn relations(&self) -> &Matrix<R> {
        &self.presentation.relations
    }

    pub fn action(&self) -> &[Matrix<R>] {
        &self.action
    }

    pub fn action_count(&self) -> usize {
        self.action.len()
    }

    /// The underlying group.
    pub fn carrier(&self) -> FgAbGroup {
        self.presentation.group()
    }

    /// Checks that the action is an algebra map: products and the unit act
    /// as prescribed by the structure constants, modulo relations.
    pub fn check_algebra_action(&self, algebra: &Algebra<R>) -> Result<()> {
        if algebra.dim() != self.action.len() {
            return Err(Error::Shape(format!(
                "algebra has dimension {}, module has {} action matrices",
                algebra.dim(),
                self.action.len()
            )));
        }
        let n = self.generators();
        let combine = |coords: &[R]| {
            let mut acc = Matrix::zeros(n, n);
            for (k, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&self.action[k].scale(c));
                }
            }
            acc
        };
        if !self
            .presentation
            .kills(&combine(algebra.unit()).sub(&Matrix::identity(n)))
        {
            return Err(Error::Invalid("the unit does not act as the identity".into()));
        }
        for i in 0..algebra.dim() {
            for j in 0..algebra.dim() {
                let lhs = self.action[i].mul(&self.action[j]);
                let rhs = combine(algebra.product_of_basis(i, j));
                if !self.presentation.kills(&lhs.sub(&rhs)) {
                    return Err(Error::Invalid(format!(
                        "basis elements {i}, {j} act incompatibly with their product"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pulls the action back along an algebra map given by its matrix
    /// (`images[:, j]` are the coordinates of the image of the `j`-th basis
    /// element of the new algebra).
    pub fn pullback(&self, images: &Matrix<R>) -> Result<Module<R>> {
        if images.rows() != self.action.len() {
            return Err(Error::Shape(format!(
                "algebra map lands in dimension {}, module has {} action matrices",
                images.rows(),
                self.action.len()
            )));
        }
        let n = self.generators();
        let action = (0..images.cols())
            .map(|j| {
                let mut acc = Matrix::zeros(n, n);
                for i in 0..images.rows() {
                    let c = &images[(i, j)];
                    if !c.is_zero() {
                        acc = acc.add(&self.action[i].scale(c));
                    }
                }
                acc
            })
            .collect();
        Ok(Module {
            presentation: self.presentation.clone(),
            action,
        })
    }

    /// Rewrites the carrier in Smith standard form, returning the new module
    /// with the coordinate changes.
    pub fn standardize(&self) -> (Module<R>, Standardized<R>) {
        let st = self.presentation.standardize();
        let action = self
            .action
            .iter()
            .map(|m| st.to_std.mul(m).mul(&st.from_std))
            .collect();
        (
            Module {
                presentation: st.presentation.clone(),
                action,
            },
            st,
        )
    }

    /// Whether `f` (carrier map `self -> target`) respects relations and
    /// commutes with the actions.
    pub fn is_module_map(&self, target: &Module<R>, f: &Matrix<R>) -> bool {
        if self.action.len() != target.action.len() {
            return false;
        }
        if !self.presentation.respects(f, &target.presentation) {
            return false;
        }
        self.action
            .iter()
            .zip(&target.action)
            .all(|(ms, mt)| target.presentation.kills(&mt.mul(f).sub(&f.mul(ms))))
    }

    /// All module maps `self -> target`.
    pub fn hom(&self, target: &Module<R>) -> Result<HomGroup<R>> {
        if self.action.len() != target.action.len() {
            return Err(Error::Shape(format!(
                "modules over algebras of dimension {} and {}",
                self.action.len(),
                target.action.len()
            )));
        }
        let n = self.generators();
        let m = target.generators();
        let rel_x = self.relations();
        let rel_y = target.relations();
        let kx = rel_x.cols();
        let ky = rel_y.cols();
        let j_count = self.action.len();
        // unknowns: F (m x n), C (ky x kx), D_j (ky x n) for each action
        let f_at = |r: usize, c: usize| r * n + c;
        let c_off = m * n;
        let d_off = c_off + ky * kx;
        let vars = d_off + j_count * ky * n;
        let mut rows: Vec<Vec<R>> = Vec::new();
        // F rel_x = rel_y C
        for r in 0..m {
            for c in 0..kx {
                let mut eq = vec![R::zero(); vars];
                for t in 0..n {
                    let x = &rel_x[(t, c)];
                    if !x.is_zero() {
                        eq[f_at(r, t)] = eq[f_at(r, t)].clone() + x.clone();
                    }
                }
                for s in 0..ky {
                    eq[c_off + s * kx + c] = -rel_y[(r, s)].clone();
                }
                rows.push(eq);
            }
        }
        // M^Y_j F - F M^X_j = rel_y D_j
        for (j, (mx, my)) in self.action.iter().zip(&target.action).enumerate() {
            for r in 0..m {
                for c in 0..n {
                    let mut eq = vec![R::zero(); vars];
                    for t in 0..m {
                        let y = &my[(r, t)];
                        if !y.is_zero() {
                            eq[f_at(t, c)] = eq[f_at(t, c)].clone() + y.clone();
                        }
                    }
                    for t in 0..n {
                        let x = &mx[(t, c)];
                        if !x.is_zero() {
                            eq[f_at(r, t)] = eq[f_at(r, t)].clone() - x.clone();
                        }
                    }
                    for s in 0..ky {
                        eq[d_off + (j * ky + s) * n + c] = -rel_y[(r, s)].clone();
                    }
                    if eq.iter().any(|x| !x.is_zero()) {
                        rows.push(eq);
                    }
                }
            }
        }
        let valid = if rows.is_empty() {
            EchelonBasis::from_rows(&Matrix::identity(m * n))
        } else {
            let system = Matrix::from_rows(rows, vars);
            let k = kernel_lattice(&system);
            let proj = k.select_rows(&(0..m * n).collect::<Vec<_>>());
            EchelonBasis::from_rows(&proj.transpose())
        };
        // maps with every column in the target relations are zero
        let mut null = Vec::new();
        for c in 0..n {
            for s in 0..ky {
                let mut v = vec![R::zero(); m * n];
                for r in 0..m {
                    v[f_at(r, c)] = rel_y[(r, s)].clone();
                }
                null.push(
                    valid
                        .coords(&v)
                        .ok_or_else(|| Error::Internal("null map is not a module map".into()))?,
                );
            }
        }
        let q = Presentation::new(Matrix::from_columns(valid.dim(), &null));
        let st = q.standardize();
        let generators = (0..st.presentation.generators)
            .map(|g| {
                let coeffs = st.from_std.column(g);
                Matrix::from_vec(m, n, valid.combine(&coeffs))
            })
            .collect();
        Ok(HomGroup {
            rows: m,
            cols: n,
            valid,
            generators,
            group: q.group(),
        })
    }

    /// Kernel of the module map `f: self -> target` with its inclusion.
    pub fn kernel(&self, target: &Module<R>, f: &Matrix<R>) -> Result<(Module<R>, Matrix<R>)> {
        if !self.is_module_map(target, f) {
            return Err(Error::Invalid("not a module map".into()));
        }
        let (pres, incl) = hom_kernel(&self.presentation, &target.presentation, f)?;
        let action = self
            .action
            .iter()
            .map(|m| {
                solve_matrix(&incl, &m.mul(&incl))?
                    .ok_or_else(|| Error::Internal("kernel is not stable under the action".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let module = Module::new(pres, action)?;
        let (std, st) = module.standardize();
        Ok((std, incl.mul(&st.from_std)))
    }

    /// Cokernel of the module map `f: source -> self` with its projection.
    pub fn cokernel(&self, source: &Module<R>, f: &Matrix<R>) -> Result<(Module<R>, Matrix<R>)> {
        if !source.is_module_map(self, f) {
            return Err(Error::Invalid("not a module map".into()));
        }
        let module = Module::new(
            Presentation::new(self.relations().hstack(f)),
            self.action.clone(),
        )?;
        let (std, st) = module.standardize();
        Ok((std, st.to_std))
    }

    pub fn direct_sum(&self, other: &Module<R>) -> Result<Module<R>> {
        if self.action.len() != other.action.len() {
            return Err(Error::Shape("modules over different algebras".into()));
        }
        Ok(Module {
            presentation: self.presentation.direct_sum(&other.presentation),
            action: self
                .action
                .iter()
                .zip(&other.action)
                .map(|(a, b)| a.block_diag(b))
                .collect(),
        })
    }

    /// Checks that the subgroup generated by the columns of `gens` (plus the
    /// relations) is stable under every action matrix.
    pub fn check_invariant(&self, gens: &Matrix<R>) -> Result<Option<InvarianceFailure<R>>> {
        if gens.rows() != self.generators() {
            return Err(Error::Shape(format!(
                "generators have length {}, carrier has {} generators",
                gens.rows(),
                self.generators()
            )));
        }
        let span = EchelonBasis::from_rows(&gens.hstack(self.relations()).transpose());
        for (i, m) in self.action.iter().enumerate() {
            for g in 0..gens.cols() {
                let v = gens.column(g);
                let image = m.mul_vec(&v);
                if !span.contains(&image) {
                    return Ok(Some(InvarianceFailure {
                        basis_index: i,
                        generator_index: g,
                        generator: v,
                        image,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Tries to invert a module map by solving `f g = 1` modulo relations.
    pub fn inverse_of(&self, target: &Module<R>, f: &Matrix<R>) -> Result<Option<Matrix<R>>> {
        if !self.is_module_map(target, f) {
            return Ok(None);
        }
        let (kpres, _) = hom_kernel(&self.presentation, &target.presentation, f)?;
        let coker = crate::linalg::hom_cokernel(&self.presentation, &target.presentation, f)?;
        if !kpres.group().is_trivial() || !coker.group().is_trivial() {
            return Ok(None);
        }
        // f g = 1 + rel_y D
        let lhs = f.hstack(target.relations());
        let Some(sol) = solve_matrix(&lhs, &Matrix::identity(target.generators()))? else {
            return Ok(None);
        };
        let g = sol.select_rows(&(0..self.generators()).collect::<Vec<_>>());
        Ok(Some(g))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "generators": self.generators(),
            "relations": self.relations(),
            "carrier": self.carrier(),
            "action": self.action.iter().enumerate()
                .map(|(i, m)| (i.to_string(), serde_json::to_value(m).expect("matrix json")))
                .collect::<serde_json::Map<_, _>>(),
        })
    }
}

/// `{"generators": n, "relations": matrix?, "action": [matrix, ...]}`
#[derive(Clone, Debug, serde::Deserialize, Serialize)]
pub struct ModuleDoc {
    pub generators: usize,
    #[serde(default)]
    pub relations: Option<crate::linalg::json::MatrixLiteral>,
    pub action: Vec<crate::linalg::json::MatrixLiteral>,
}

impl ModuleDoc {
    pub fn to_module<R: Ring>(&self) -> Result<Module<R>> {
        let relations = match &self.relations {
            Some(lit) => lit.to_matrix().map_err(Error::Parse)?,
            None => Matrix::zeros(self.generators, 0),
        };
        if relations.rows() != self.generators {
            return Err(Error::Shape("relations must have one row per generator".into()));
        }
        let action = self
            .action
            .iter()
            .map(|l| l.to_matrix().map_err(Error::Parse))
            .collect::<Result<Vec<_>>>()?;
        Module::new(Presentation::new(relations), action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Int, IntMat};

    fn swap_module() -> Module<Int> {
        // Z[C2] acting on Z^2: basis e, s
        Module::free(
            2,
            vec![IntMat::identity(2), IntMat::from_i64_rows(&[&[0, 1], &[1, 0]])],
        )
        .unwrap()
    }

    #[test]
    fn invariant_subspaces_of_swap() {
        let m = swap_module();
        assert!(m.check_invariant(&IntMat::zeros(2, 0)).unwrap().is_none());
        assert!(m.check_invariant(&IntMat::identity(2)).unwrap().is_none());
        assert!(m
            .check_invariant(&IntMat::from_i64_rows(&[&[1], &[1]]))
            .unwrap()
            .is_none());
        let fail = m
            .check_invariant(&IntMat::from_i64_rows(&[&[1], &[0]]))
            .unwrap()
            .unwrap();
        assert_eq!(fail.basis_index, 1);
        assert_eq!(fail.image, vec![Int::from(0), Int::from(1)]);
        assert!(m.check_invariant(&IntMat::zeros(3, 1)).is_err());
    }

    #[test]
    fn endomorphisms_of_regular_c2_module() {
        let m = swap_module();
        let h = m.hom(&m).unwrap();
        assert_eq!(h.group(), &FgAbGroup::free(2));
        assert!(h.contains(&IntMat::identity(2)));
    }

    #[test]
    fn hom_between_cyclic_groups() {
        let act = |n| vec![IntMat::identity(n)];
        let z2 = Module::new(Presentation::new(IntMat::from_i64_rows(&[&[2]])), act(1)).unwrap();
        let z3 = Module::new(Presentation::new(IntMat::from_i64_rows(&[&[3]])), act(1)).unwrap();
        let z4 = Module::new(Presentation::new(IntMat::from_i64_rows(&[&[4]])), act(1)).unwrap();
        assert!(z2.hom(&z3).unwrap().group().is_trivial());
        assert_eq!(
            z2.hom(&z4).unwrap().group(),
            &FgAbGroup::new(0, vec![Int::from(2)]).unwrap()
        );
    }

    #[test]
    fn multiplication_by_two() {
        let m = Module::<Int>::free(1, vec![IntMat::identity(1)]).unwrap();
        let two = IntMat::from_i64_rows(&[&[2]]);
        let (k, _) = m.kernel(&m, &two).unwrap();
        assert!(k.carrier().is_trivial());
        let (c, proj) = m.cokernel(&m, &two).unwrap();
        assert_eq!(c.carrier(), FgAbGroup::new(0, vec![Int::from(2)]).unwrap());
        assert_eq!(proj.shape(), (1, 1));
    }

    #[test]
    fn inverse_of_unimodular_map() {
        let m = Module::<Int>::free(2, vec![IntMat::identity(2)]).unwrap();
        let f = IntMat::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let g = m.inverse_of(&m, &f).unwrap().unwrap();
        assert_eq!(f.mul(&g), IntMat::identity(2));
        assert!(m
            .inverse_of(&m, &IntMat::from_i64_rows(&[&[2, 0], &[0, 1]]))
            .unwrap()
            .is_none());
    }
}
