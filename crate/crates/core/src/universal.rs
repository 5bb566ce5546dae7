//! Stage-wise model of the universal abelian category of a representation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use serde_json::{json, Value};

use crate::commutant::{compute_end, EndAlgebra};
use crate::diagram::{Diagram, Representation, SubdiagramChain};
use crate::error::{Error, Result};
use crate::linalg::{FgAbGroup, Matrix, Ring};
use crate::module::{HomGroup, Module};

type StageKey = (Vec<String>, Vec<String>);

/// A representation together with a cache of stage commutants.
#[derive(Debug)]
pub struct Universe<R> {
    rep: Representation<R>,
    cache: Mutex<HashMap<StageKey, Arc<EndAlgebra<R>>>>,
}

/// An object presented at a finite stage.
#[derive(Clone, Debug)]
pub struct CObject<R> {
    pub algebra: Arc<EndAlgebra<R>>,
    pub module: Module<R>,
}

/// A carrier map commuting with the actions at a common refinement.
#[derive(Clone, Debug)]
pub struct CMorphism<R> {
    pub source: CObject<R>,
    pub target: CObject<R>,
    pub stage: Diagram,
    pub matrix: Matrix<R>,
}

/// Outcome of the bounded isomorphism search.
#[derive(Clone, Debug)]
pub enum IsoSearch<R> {
    Found { forward: Matrix<R>, backward: Matrix<R> },
    Unknown { candidates: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StabilizationFlag {
    #[serde(rename = "STABILIZED")]
    Stabilized,
    #[serde(rename = "NOT-YET")]
    NotYet,
}

/// Ranks of the images of all later stages in a fixed stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageTrace {
    pub stage: usize,
    pub ranks: Vec<usize>,
    pub flag: StabilizationFlag,
}

#[derive(Clone, Debug)]
pub struct EndTower<R> {
    pub chain: SubdiagramChain,
    pub algebras: Vec<Arc<EndAlgebra<R>>>,
    /// `maps[k]`: restriction from stage `k + 1` to stage `k`.
    pub maps: Vec<Matrix<R>>,
    pub image_ranks: Vec<usize>,
    pub traces: Vec<StageTrace>,
}

impl<R: Ring> Universe<R> {
    pub fn new(rep: Representation<R>) -> Self {
        Universe {
            rep,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn representation(&self) -> &Representation<R> {
        &self.rep
    }

    pub fn diagram(&self) -> &Diagram {
        self.rep.diagram()
    }

    /// `End(T|_E)`, computed once per stage.
    pub fn end(&self, stage: &Diagram) -> Result<Arc<EndAlgebra<R>>> {
        let stage = self.rep.canonical_stage(stage)?;
        let key = stage.key();
        if let Some(a) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(a));
        }
        let a = Arc::new(compute_end(&self.rep, &stage)?);
        let mut cache = self.cache.lock().expect("cache lock");
        Ok(Arc::clone(cache.entry(key).or_insert(a)))
    }

    /// `T~(p)` at `stage`.
    pub fn tilde_t(&self, stage: &Diagram, p: &str) -> Result<CObject<R>> {
        let a = self.end(stage)?;
        let m = a.module_structure(p)?;
        Ok(CObject {
            algebra: m.algebra,
            module: m.module,
        })
    }

    /// The object with the action restricted along `End(T|_E') -> End(T|_E)`.
    pub fn refine(&self, x: &CObject<R>, stage: &Diagram) -> Result<CObject<R>> {
        let big = self.end(stage)?;
        if big.stage().same_stage(x.algebra.stage()) {
            return Ok(x.clone());
        }
        x.algebra
            .stage()
            .check_subdiagram_of(big.stage())
            .map_err(|e| Error::NotSubdiagram(format!("refinement must contain the stage: {e}")))?;
        let r = big.restriction_map(&x.algebra)?;
        Ok(CObject {
            algebra: big,
            module: x.module.pullback(&r)?,
        })
    }

    /// Smallest stage containing both stages.
    pub fn common_stage(&self, x: &CObject<R>, y: &CObject<R>) -> Result<Diagram> {
        x.algebra
            .stage()
            .union_within(y.algebra.stage(), self.diagram())
    }

    fn refine_pair(
        &self,
        x: &CObject<R>,
        y: &CObject<R>,
        stage: &Diagram,
    ) -> Result<(CObject<R>, CObject<R>)> {
        Ok((self.refine(x, stage)?, self.refine(y, stage)?))
    }

    /// All morphisms `x -> y` at `stage`.
    pub fn hom_at_stage(
        &self,
        x: &CObject<R>,
        y: &CObject<R>,
        stage: &Diagram,
    ) -> Result<HomGroup<R>> {
        let (xr, yr) = self.refine_pair(x, y, stage)?;
        xr.module.hom(&yr.module)
    }

    /// Validates `matrix` as a morphism at `stage` (or the union of stages).
    pub fn morphism(
        &self,
        x: &CObject<R>,
        y: &CObject<R>,
        stage: Option<&Diagram>,
        matrix: Matrix<R>,
    ) -> Result<CMorphism<R>> {
        let stage = match stage {
            Some(s) => self.rep.canonical_stage(s)?,
            None => self.common_stage(x, y)?,
        };
        let (xr, yr) = self.refine_pair(x, y, &stage)?;
        if !xr.module.is_module_map(&yr.module, &matrix) {
            return Err(Error::Invalid(
                "matrix does not commute with the actions at the stage".into(),
            ));
        }
        Ok(CMorphism {
            source: xr,
            target: yr,
            stage,
            matrix,
        })
    }

    pub fn identity(&self, x: &CObject<R>) -> CMorphism<R> {
        CMorphism {
            source: x.clone(),
            target: x.clone(),
            stage: x.algebra.stage().clone(),
            matrix: Matrix::identity(x.module.generators()),
        }
    }

    pub fn direct_sum(&self, x: &CObject<R>, y: &CObject<R>) -> Result<CObject<R>> {
        let stage = self.common_stage(x, y)?;
        let (xr, yr) = self.refine_pair(x, y, &stage)?;
        Ok(CObject {
            algebra: xr.algebra,
            module: xr.module.direct_sum(&yr.module)?,
        })
    }

    /// Bounded search for an isomorphism at the common stage: hom basis
    /// elements and combinations with coefficients in `[-2, 2]`.
    pub fn find_isomorphism(&self, x: &CObject<R>, y: &CObject<R>) -> Result<IsoSearch<R>> {
        let stage = self.common_stage(x, y)?;
        let (xr, yr) = self.refine_pair(x, y, &stage)?;
        let hom = xr.module.hom(&yr.module)?;
        let mut tried = 0;
        for f in bounded_combinations(hom.generators(), 2, 20_000) {
            tried += 1;
            if let Some(g) = xr.module.inverse_of(&yr.module, &f)? {
                if yr.module.is_module_map(&xr.module, &g) {
                    return Ok(IsoSearch::Found {
                        forward: f,
                        backward: g,
                    });
                }
            }
        }
        Ok(IsoSearch::Unknown { candidates: tried })
    }

    /// Restriction tower along `chain`, with image ranks toward every stage.
    pub fn tower(&self, chain: &SubdiagramChain) -> Result<EndTower<R>> {
        let algebras = chain
            .stages()
            .iter()
            .map(|s| self.end(s))
            .collect::<Result<Vec<_>>>()?;
        let n = algebras.len();
        let mut maps = Vec::new();
        let mut image_ranks = Vec::new();
        for k in 0..n.saturating_sub(1) {
            let m = algebras[k + 1].restriction_map(&algebras[k])?;
            image_ranks.push(m.rank());
            maps.push(m);
        }
        let mut traces = Vec::new();
        for i in 0..n {
            let ranks = (i..n)
                .map(|j| Ok(algebras[j].restriction_map(&algebras[i])?.rank()))
                .collect::<Result<Vec<_>>>()?;
            let flag = match ranks.as_slice() {
                [.., a, b] if a == b => StabilizationFlag::Stabilized,
                _ => StabilizationFlag::NotYet,
            };
            traces.push(StageTrace {
                stage: i + 1,
                ranks,
                flag,
            });
        }
        Ok(EndTower {
            chain: chain.clone(),
            algebras,
            maps,
            image_ranks,
            traces,
        })
    }
}

/// Nonzero combinations `sum c_i g_i` with `|c_i| <= bound`, single
/// generators first, at most `limit` of them.
pub fn bounded_combinations<R: Ring>(
    gens: &[Matrix<R>],
    bound: i64,
    limit: usize,
) -> impl Iterator<Item = Matrix<R>> + '_ {
    let k = gens.len();
    let singles = (0..k).flat_map(move |i| {
        (1..=bound).flat_map(move |c| [c, -c]).map(move |c| gens[i].scale(&R::from_i64(c)))
    });
    let width = (2 * bound + 1) as usize;
    let total = width.checked_pow(k as u32).unwrap_or(usize::MAX);
    let mixed = (0..total.min(limit)).filter_map(move |mut code| {
        let mut coeffs = Vec::with_capacity(k);
        for _ in 0..k {
            coeffs.push((code % width) as i64 - bound);
            code /= width;
        }
        if coeffs.iter().filter(|c| **c != 0).count() < 2 {
            return None;
        }
        let mut acc = gens[0].scale(&R::zero());
        for (g, c) in gens.iter().zip(coeffs) {
            if c != 0 {
                acc = acc.add(&g.scale(&R::from_i64(c)));
            }
        }
        Some(acc)
    });
    singles.chain(mixed).take(limit)
}

impl<R: Ring> CObject<R> {
    pub fn stage(&self) -> &Diagram {
        self.algebra.stage()
    }

    /// The underlying group, forgetting the action.
    pub fn forgetful(&self) -> FgAbGroup {
        self.module.carrier()
    }

    pub fn zero(algebra: Arc<EndAlgebra<R>>) -> Self {
        let n = algebra.dim();
        CObject {
            algebra,
            module: Module::zero(n),
        }
    }

    /// The algebra-format JSON extended with carrier and action.
    pub fn to_json(&self) -> Value {
        let mut v = self.algebra.to_json();
        let m = self.module.to_json();
        v["carrier"] = m["carrier"].clone();
        v["generators"] = m["generators"].clone();
        v["relations"] = m["relations"].clone();
        v["action"] = m["action"].clone();
        v
    }
}

impl<R: Ring> CMorphism<R> {
    /// Kernel object with its inclusion into the source carrier.
    pub fn kernel(&self) -> Result<(CObject<R>, Matrix<R>)> {
        let (m, incl) = self.source.module.kernel(&self.target.module, &self.matrix)?;
        Ok((
            CObject {
                algebra: Arc::clone(&self.source.algebra),
                module: m,
            },
            incl,
        ))
    }

    /// Cokernel object with its projection from the target carrier.
    pub fn cokernel(&self) -> Result<(CObject<R>, Matrix<R>)> {
        let (m, proj) = self.target.module.cokernel(&self.source.module, &self.matrix)?;
        Ok((
            CObject {
                algebra: Arc::clone(&self.target.algebra),
                module: m,
            },
            proj,
        ))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "stage": self.stage.to_spec(),
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": self.matrix,
        })
    }
}

impl<R: Ring> EndTower<R> {
    pub fn to_json(&self) -> Value {
        json!({
            "stages": self.chain.stages().iter().map(|s| s.to_spec()).collect::<Vec<_>>(),
            "dims": self.algebras.iter().map(|a| a.dim()).collect::<Vec<_>>(),
            "imageRanks": self.image_ranks,
            "traces": self.traces,
        })
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::diagram::Arrow;
    use crate::linalg::{Int, IntMat};

    fn universe(
        objects: &[(&str, usize)],
        arrows: &[(&str, &str, &str, IntMat)],
    ) -> Universe<Int> {
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
        Universe::new(Representation::new(d, values, matrices).unwrap())
    }

    fn swap() -> IntMat {
        IntMat::from_i64_rows(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn forgetful_of_tilde_is_the_value() {
        let u = universe(&[("p", 3), ("z", 0)], &[]);
        let x = u.tilde_t(u.diagram(), "p").unwrap();
        assert_eq!(x.forgetful(), FgAbGroup::free(3));
        assert!(u.tilde_t(u.diagram(), "z").unwrap().forgetful().is_trivial());
    }

    #[test]
    fn regular_c2_hom_has_rank_two() {
        let u = universe(
            &[("p", 2)],
            &[("e", "p", "p", IntMat::identity(2)), ("s", "p", "p", swap())],
        );
        let x = u.tilde_t(u.diagram(), "p").unwrap();
        let h = u.hom_at_stage(&x, &x, u.diagram()).unwrap();
        assert_eq!(h.rank(), 2);
        assert!(h.contains(&IntMat::identity(2)));
    }

    #[test]
    fn kernel_and_cokernel_of_doubling() {
        let u = universe(&[("p", 1)], &[]);
        let x = u.tilde_t(u.diagram(), "p").unwrap();
        let f = u
            .morphism(&x, &x, None, IntMat::from_i64_rows(&[&[2]]))
            .unwrap();
        let (k, _) = f.kernel().unwrap();
        assert!(k.forgetful().is_trivial());
        let (c, _) = f.cokernel().unwrap();
        assert_eq!(c.forgetful(), FgAbGroup::new(0, vec![Int::from(2)]).unwrap());
        c.module.check_algebra_action(c.algebra.algebra()).unwrap();

        let id = u.identity(&x);
        assert!(id.kernel().unwrap().0.forgetful().is_trivial());
        assert!(id.cokernel().unwrap().0.forgetful().is_trivial());
        let zero = u.morphism(&x, &x, None, IntMat::zeros(1, 1)).unwrap();
        assert_eq!(zero.kernel().unwrap().0.forgetful(), FgAbGroup::free(1));
        assert_eq!(zero.cokernel().unwrap().0.forgetful(), FgAbGroup::free(1));
    }

    #[test]
    fn non_equivariant_matrix_is_rejected() {
        let u = universe(&[("p", 2)], &[("s", "p", "p", swap())]);
        let x = u.tilde_t(u.diagram(), "p").unwrap();
        let bad = IntMat::from_i64_rows(&[&[1, 0], &[0, 0]]);
        assert!(u.morphism(&x, &x, None, bad).is_err());
    }

    #[test]
    fn refinement_and_sums() {
        let u = universe(
            &[("p", 2), ("q", 2)],
            &[("a", "p", "q", IntMat::identity(2))],
        );
        let small = u.diagram().subdiagram(&["p"], &[]).unwrap();
        let x = u.tilde_t(&small, "p").unwrap();
        let xr = u.refine(&x, u.diagram()).unwrap();
        assert_eq!(xr.forgetful(), x.forgetful());
        let h_small = u.hom_at_stage(&x, &x, &small).unwrap();
        let h_big = u.hom_at_stage(&x, &x, u.diagram()).unwrap();
        assert!(h_small.is_contained_in(&h_big));

        let zero = CObject::zero(u.end(&small).unwrap());
        let s = u.direct_sum(&x, &zero).unwrap();
        assert_eq!(s.forgetful(), x.forgetful());
        match u.find_isomorphism(&s, &x).unwrap() {
            IsoSearch::Found { forward, backward } => {
                assert_eq!(forward.mul(&backward), IntMat::identity(2));
            }
            IsoSearch::Unknown { .. } => panic!("expected an isomorphism"),
        }
        let y = u.tilde_t(u.diagram(), "q").unwrap();
        let s = u.direct_sum(&x, &y).unwrap();
        assert_eq!(s.forgetful(), FgAbGroup::free(4));
    }

    #[test]
    fn constant_chain_stabilizes() {
        let u = universe(&[("p", 2)], &[]);
        let chain = SubdiagramChain::new(u.diagram(), vec![u.diagram().clone(); 3]).unwrap();
        let t = u.tower(&chain).unwrap();
        assert_eq!(t.image_ranks, vec![4, 4]);
        assert_eq!(t.traces[0].ranks, vec![4, 4, 4]);
        assert_eq!(t.traces[0].flag, StabilizationFlag::Stabilized);
        assert_eq!(t.traces[2].flag, StabilizationFlag::NotYet);
    }

    #[test]
    fn new_arrow_cuts_the_image() {
        let u = universe(
            &[("p", 2), ("q", 1)],
            &[("a", "p", "q", IntMat::from_i64_rows(&[&[1, 0]]))],
        );
        let s1 = u.diagram().subdiagram(&["p"], &[]).unwrap();
        let s2 = u.diagram().subdiagram(&["p", "q"], &[]).unwrap();
        let chain =
            SubdiagramChain::new(u.diagram(), vec![s1, s2, u.diagram().clone()]).unwrap();
        let t = u.tower(&chain).unwrap();
        assert_eq!(t.traces[0].ranks, vec![4, 4, 3]);
        assert_eq!(t.traces[0].flag, StabilizationFlag::NotYet);
    }
}
