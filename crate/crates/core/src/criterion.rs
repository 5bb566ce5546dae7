//! Finite checks of the hypotheses under which a representation into a
//! module category is equivalent to the universal one.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::Algebra;
use crate::commutant::StageModule;
use crate::diagram::{Diagram, Representation, StageSpec};
use crate::error::{Error, Result};
use crate::linalg::json::{vector_to_json, MatrixLiteral};
use crate::linalg::{
    hom_kernel, image_basis, kernel_lattice, same_lattice, saturate, smith_normal_form,
    solve_matrix, EchelonBasis, Int, IntMat, Matrix, Presentation, Rat, RatMat, Ring,
};
use crate::module::{InvarianceFailure, Module, ModuleDoc};
use crate::universal::{bounded_combinations, Universe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NOT-CHECKED")]
    NotChecked,
    #[serde(rename = "NOT-FOUND")]
    NotFound,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotChecked => "NOT-CHECKED",
            Status::NotFound => "NOT-FOUND",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

/// One checked item with its machine-readable certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub condition: char,
    pub subject: String,
    pub status: Status,
    pub certificate: Value,
}

impl Item {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "condition": self.condition.to_string(),
            "subject": self.subject,
            "status": self.status,
        });
        if let Value::Object(extra) = &self.certificate {
            for (k, x) in extra {
                v[k] = x.clone();
            }
        }
        v
    }
}

/// Worst status among the items; no items counts as not checked.
pub fn aggregate(items: &[Item]) -> Status {
    if items.is_empty() {
        return Status::NotChecked;
    }
    for s in [Status::Fail, Status::NotFound, Status::NotChecked] {
        if items.iter().any(|i| i.status == s) {
            return s;
        }
    }
    Status::Pass
}

/// Checks that each coproduct entry `p, q -> p+q` induces an isomorphism
/// `T(p) + T(q) -> T(p+q)`. Requested pairs without an entry are reported
/// as not checked.
pub fn check_condition_a<R: Ring>(
    rep: &Representation<R>,
    pairs: Option<&[(String, String)]>,
) -> Result<Vec<Item>> {
    let table = rep.diagram().coproducts();
    let mut items = Vec::new();
    let entries: Vec<_> = match pairs {
        None => table.iter().map(Some).collect(),
        Some(ps) => ps
            .iter()
            .map(|(p, q)| {
                table
                    .iter()
                    .find(|c| (&c.p, &c.q) == (p, q) || (&c.q, &c.p) == (p, q))
                    .ok_or((p.clone(), q.clone()))
            })
            .map(|r| match r {
                Ok(c) => Some(c),
                Err((p, q)) => {
                    items.push(Item {
                        condition: 'a',
                        subject: format!("{p} + {q}"),
                        status: Status::NotChecked,
                        certificate: json!({"reason": "no coproduct entry"}),
                    });
                    None
                }
            })
            .collect(),
    };
    for c in entries.into_iter().flatten() {
        let block = rep.matrix(&c.i)?.hstack(rep.matrix(&c.i_prime)?);
        let subject = format!("{} + {} -> {}", c.p, c.q, c.sum);
        let (status, certificate) = if !block.is_square() {
            (
                Status::Fail,
                json!({"reason": "block map is not square", "shape": [block.rows(), block.cols()]}),
            )
        } else {
            let d = smith_normal_form(&block);
            let diag = d.diagonal();
            let det = block.det();
            if diag.iter().all(|x| x.is_unit()) {
                (Status::Pass, json!({"det": crate::linalg::json::scalar_to_json(&det)}))
            } else {
                (
                    Status::Fail,
                    json!({
                        "reason": "block map is not invertible",
                        "det": crate::linalg::json::scalar_to_json(&det),
                        "smithDiagonal": vector_to_json(&diag),
                    }),
                )
            }
        };
        items.push(Item {
            condition: 'a',
            subject,
            status,
            certificate,
        });
    }
    Ok(items)
}

/// Kernel of a carrier map with its invariance verdict.
#[derive(Clone, Debug)]
pub struct ConditionC<R> {
    /// Kernel basis as columns.
    pub kernel: Matrix<R>,
    pub failure: Option<InvarianceFailure<R>>,
}

impl<R: Ring> ConditionC<R> {
    pub fn status(&self) -> Status {
        if self.failure.is_some() {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn certificate(&self) -> Value {
        match &self.failure {
            Some(f) => f.to_json(),
            None => json!({"kernelRank": self.kernel.cols()}),
        }
    }
}

fn check_shape<R: Ring>(rep: &Representation<R>, p: &str, f: &Matrix<R>) -> Result<()> {
    let n = rep.value(p)?;
    if f.cols() != n {
        return Err(Error::Shape(format!(
            "map has {} columns but T({p}) has rank {n}",
            f.cols()
        )));
    }
    Ok(())
}

/// Whether `ker(f)` for `f: T(p) -> Z^m / relations` is stable under
/// `End(T|_E)`.
pub fn check_condition_c<R: Ring>(
    universe: &Universe<R>,
    stage: &Diagram,
    p: &str,
    f: &Matrix<R>,
    target_relations: Option<&Matrix<R>>,
) -> Result<ConditionC<R>> {
    let rep = universe.representation();
    check_shape(rep, p, f)?;
    let target = match target_relations {
        Some(r) if r.rows() != f.rows() => {
            return Err(Error::Shape(format!(
                "target relations have {} rows, map has {}",
                r.rows(),
                f.rows()
            )))
        }
        Some(r) => Presentation::new(r.clone()),
        None => Presentation::free(f.rows()),
    };
    let (_, kernel) = hom_kernel(&Presentation::free(f.cols()), &target, f)?;
    let module = universe.tilde_t(stage, p)?;
    let failure = module.module.check_invariant(&kernel)?;
    Ok(ConditionC { kernel, failure })
}

/// Both routes of the morphism test for `f: T(p) -> T(q)`.
#[derive(Clone, Debug)]
pub struct MorphismRoutes<R> {
    /// First basis element with `f a_p != a_q f`.
    pub direct_failure: Option<usize>,
    /// Invariance failure of the graph `ker [f | -1]` in `T(p) + T(q)`.
    pub graph_failure: Option<InvarianceFailure<R>>,
}

impl<R: Ring> MorphismRoutes<R> {
    pub fn direct(&self) -> Status {
        if self.direct_failure.is_some() {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn graph_route(&self) -> Status {
        if self.graph_failure.is_some() {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn routes_agree(&self) -> bool {
        self.direct() == self.graph_route()
    }
}

pub fn check_morphism_routes<R: Ring>(
    universe: &Universe<R>,
    stage: &Diagram,
    p: &str,
    q: &str,
    f: &Matrix<R>,
) -> Result<MorphismRoutes<R>> {
    let rep = universe.representation();
    check_shape(rep, p, f)?;
    let nq = rep.value(q)?;
    if f.rows() != nq {
        return Err(Error::Shape(format!("map has {} rows but T({q}) has rank {nq}", f.rows())));
    }
    let end = universe.end(stage)?;
    let direct_failure = (0..end.dim()).find(|&i| {
        let ap = end.component(i, p).expect("object in stage");
        let aq = end.component(i, q).expect("object in stage");
        f.mul(ap) != aq.mul(f)
    });
    let xp = end.module_structure(p)?;
    let xq = end.module_structure(q)?;
    let sum = xp.module.direct_sum(&xq.module)?;
    let g = f.hstack(&Matrix::identity(nq).neg());
    let (_, graph) = hom_kernel(&Presentation::free(g.cols()), &Presentation::free(nq), &g)?;
    let graph_failure = sum.check_invariant(&graph)?;
    Ok(MorphismRoutes {
        direct_failure,
        graph_failure,
    })
}

/// Result of descending the action through an epimorphism.
#[derive(Clone, Debug)]
pub enum BuildV<R> {
    Built(StageModule<R>),
    KernelNotInvariant(InvarianceFailure<R>),
}

/// The action of `End(T|_E)` on `target` induced through the epimorphism
/// `alpha: T(p) -> target`.
pub fn build_v<R: Ring>(
    universe: &Universe<R>,
    stage: &Diagram,
    p: &str,
    target: &Presentation<R>,
    alpha: &Matrix<R>,
) -> Result<BuildV<R>> {
    let rep = universe.representation();
    check_shape(rep, p, alpha)?;
    if alpha.rows() != target.generators {
        return Err(Error::Shape(format!(
            "map has {} rows, target has {} generators",
            alpha.rows(),
            target.generators
        )));
    }
    // x with alpha x = e_k modulo relations
    let lhs = alpha.hstack(&target.relations);
    let Some(pre) = solve_matrix(&lhs, &Matrix::identity(target.generators))? else {
        return Err(Error::Invalid("map is not surjective".into()));
    };
    let section = pre.select_rows(&(0..alpha.cols()).collect::<Vec<_>>());
    let c = check_condition_c(universe, stage, p, alpha, Some(&target.relations))?;
    if let Some(f) = c.failure {
        return Ok(BuildV::KernelNotInvariant(f));
    }
    let end = universe.end(stage)?;
    let action = (0..end.dim())
        .map(|i| Ok(alpha.mul(end.component(i, p)?).mul(&section)))
        .collect::<Result<Vec<_>>>()?;
    let module = Module::new(target.clone(), action)?;
    let source = end.module_structure(p)?;
    if !source.module.is_module_map(&module, alpha) {
        return Err(Error::Internal("descended action is not compatible".into()));
    }
    Ok(BuildV::Built(StageModule::new(Arc::clone(&end), module)?))
}

/// Whether `M alpha = 0` modulo relations forces `M = 0` on the target, so
/// that at most one action descends.
pub fn descent_is_unique<R: Ring>(target: &Presentation<R>, alpha: &Matrix<R>) -> Result<bool> {
    let m = target.generators;
    let n = alpha.cols();
    let k = target.relations.cols();
    // unknowns: M (m x m), D (k x n); equations M alpha - rel D = 0
    let vars = m * m + k * n;
    let mut rows = Vec::new();
    for r in 0..m {
        for c in 0..n {
            let mut eq = vec![R::zero(); vars];
            for t in 0..m {
                eq[r * m + t] = alpha[(t, c)].clone();
            }
            for s in 0..k {
                eq[m * m + s * n + c] = -target.relations[(r, s)].clone();
            }
            rows.push(eq);
        }
    }
    let sol = kernel_lattice(&Matrix::from_rows(rows, vars));
    let rel = image_basis(&target.relations);
    Ok((0..sol.cols()).all(|j| {
        let v = sol.column(j);
        (0..m).all(|c| {
            let col: Vec<R> = (0..m).map(|r| v[r * m + c].clone()).collect();
            col.iter().all(|x| x.is_zero()) || (rel.ambient() == m && rel.contains(&col))
        })
    }))
}

/// Whether two descended actions on the same target agree.
pub fn same_action<R: Ring>(a: &StageModule<R>, b: &StageModule<R>) -> bool {
    a.algebra.stage().same_stage(b.algebra.stage())
        && a.module.presentation() == b.module.presentation()
        && a.module
            .action()
            .iter()
            .zip(b.module.action())
            .all(|(x, y)| a.module.presentation().kills(&x.sub(y)))
}

/// `ker_Z(f)` against `Z^n ∩ ker_Q(f)` for `f: Z^n -> Z^m / relations`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelIdentity {
    pub integral: IntMat,
    pub saturated_rational: IntMat,
    pub holds: bool,
}

pub fn kernel_saturation_identity(f: &IntMat, target_relations: &IntMat) -> Result<KernelIdentity> {
    if target_relations.rows() != f.rows() {
        return Err(Error::Shape("target relations and map disagree on the target".into()));
    }
    let (_, integral) = hom_kernel(
        &Presentation::free(f.cols()),
        &Presentation::new(target_relations.clone()),
        f,
    )?;
    let fq = f.to_rat();
    let relq = target_relations.to_rat();
    let sys = fq.hstack(&relq.neg());
    let k = kernel_lattice(&sys);
    let proj: RatMat = k.select_rows(&(0..f.cols()).collect::<Vec<_>>());
    let span = EchelonBasis::from_rows(&proj.transpose());
    let rows: Vec<Vec<Int>> = span
        .vectors()
        .iter()
        .map(|v| {
            let (_, ints) = Matrix::from_rows(vec![v.clone()], v.len()).clear_denominators();
            ints.row(0).to_vec()
        })
        .collect();
    let saturated_rational = if rows.is_empty() {
        IntMat::zeros(f.cols(), 0)
    } else {
        saturate(&Matrix::from_rows(rows, f.cols()).transpose())?
    };
    let holds = same_lattice(&integral, &saturated_rational);
    Ok(KernelIdentity {
        integral,
        saturated_rational,
        holds,
    })
}

/// The rational refinement: invariance of `ker_Q(f)` under `End(T_Q|_E)`,
/// and the identity `ker_Z = T(p) ∩ ker_Q` for the integral multiple of `f`.
#[derive(Clone, Debug)]
pub struct RefinedCPrime {
    pub invariance: ConditionC<Rat>,
    pub identity: KernelIdentity,
}

pub fn check_refined_c_prime(
    rep: &Representation<Int>,
    stage: &Diagram,
    p: &str,
    f: &RatMat,
) -> Result<RefinedCPrime> {
    check_shape(&rep.base_change_q(), p, f)?;
    let universe = Universe::new(rep.base_change_q());
    let invariance = check_condition_c(&universe, stage, p, f, None)?;
    let (_, fz) = f.clear_denominators();
    let identity = kernel_saturation_identity(&fz, &IntMat::zeros(fz.rows(), 0))?;
    Ok(RefinedCPrime {
        invariance,
        identity,
    })
}

/// A module category given by a finite algebra, its modules, the values of
/// `S` on objects, and modules declared to generate it up to quotients.
#[derive(Clone, Debug)]
pub struct TargetPresentation<R> {
    pub algebra: Algebra<R>,
    pub modules: BTreeMap<String, Module<R>>,
    pub s: BTreeMap<String, String>,
    pub generators: Vec<String>,
}

/// `{"algebra": {...}, "modules": {name: module}, "S": {object: name},
/// "generators": [name, ...]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetDoc {
    pub algebra: Value,
    pub modules: BTreeMap<String, ModuleDoc>,
    #[serde(rename = "S")]
    pub s: BTreeMap<String, String>,
    #[serde(default)]
    pub generators: Vec<String>,
}

impl TargetDoc {
    pub fn to_target<R: Ring>(&self) -> Result<TargetPresentation<R>> {
        let modules = self
            .modules
            .iter()
            .map(|(k, m)| Ok((k.clone(), m.to_module()?)))
            .collect::<Result<_>>()?;
        Ok(TargetPresentation {
            algebra: Algebra::from_json(&self.algebra)?,
            modules,
            s: self.s.clone(),
            generators: self.generators.clone(),
        })
    }

    pub fn from_target<R: Ring>(t: &TargetPresentation<R>) -> Self {
        TargetDoc {
            algebra: t.algebra.to_json(),
            modules: t
                .modules
                .iter()
                .map(|(k, m)| {
                    (
                        k.clone(),
                        ModuleDoc {
                            generators: m.generators(),
                            relations: (m.relations().cols() > 0)
                                .then(|| MatrixLiteral::from_matrix(m.relations())),
                            action: m.action().iter().map(MatrixLiteral::from_matrix).collect(),
                        },
                    )
                })
                .collect(),
            s: t.s.clone(),
            generators: t.generators.clone(),
        }
    }
}

impl<R: Ring> TargetPresentation<R> {
    pub fn module(&self, name: &str) -> Result<&Module<R>> {
        self.modules
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("target presentation: unknown module '{name}'")))
    }

    pub fn s_of(&self, p: &str) -> Result<&Module<R>> {
        let name = self
            .s
            .get(p)
            .ok_or_else(|| Error::Invalid(format!("target presentation: S({p}) is not given")))?;
        self.module(name)
    }

    /// Checks the algebra, the modules, and that forgetting `S` gives back
    /// the representation on objects and arrows.
    pub fn validate(&self, rep: &Representation<R>) -> Result<()> {
        let bad = |m: String| Error::Invalid(format!("target presentation: {m}"));
        self.algebra.check_axioms().map_err(|e| bad(e.to_string()))?;
        for (name, m) in &self.modules {
            m.check_algebra_action(&self.algebra)
                .map_err(|e| bad(format!("module '{name}': {e}")))?;
        }
        for g in &self.generators {
            self.module(g)?;
        }
        for p in rep.diagram().objects() {
            let m = self.s_of(p)?;
            let n = rep.value(p)?;
            if m.generators() != n || !m.presentation().is_free() {
                return Err(bad(format!(
                    "the carrier of S({p}) is not the free module of rank {n}"
                )));
            }
        }
        for a in rep.diagram().arrows() {
            let (sp, sq) = (self.s_of(&a.src)?, self.s_of(&a.dst)?);
            if !sp.is_module_map(sq, rep.matrix(&a.id)?) {
                return Err(bad(format!("T({}) is not a module map S({}) -> S({})", a.id, a.src, a.dst)));
            }
        }
        Ok(())
    }
}

/// A carrier map out of `T(object)`, optionally into a named target module
/// (whose relations then apply) and at a given stage.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestMapDoc {
    #[serde(default)]
    pub name: Option<String>,
    pub object: String,
    pub matrix: MatrixLiteral,
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default)]
    pub stage: Option<StageSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestMapsDoc {
    pub maps: Vec<TestMapDoc>,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub condition_a: Vec<Item>,
    pub condition_b: Vec<Item>,
    pub condition_c: Vec<Item>,
}

impl CriterionReport {
    pub fn status_a(&self) -> Status {
        aggregate(&self.condition_a)
    }

    pub fn status_b(&self) -> Status {
        aggregate(&self.condition_b)
    }

    pub fn status_c(&self) -> Status {
        aggregate(&self.condition_c)
    }

    pub fn overall(&self) -> Verdict {
        let all = [self.status_a(), self.status_b(), self.status_c()];
        if all.contains(&Status::Fail) {
            Verdict::Fail
        } else if all.iter().all(|s| *s == Status::Pass) {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn to_json(&self) -> Value {
        let section = |items: &[Item], status: Status| {
            json!({
                "status": status,
                "items": items.iter().map(|i| i.to_json()).collect::<Vec<_>>(),
            })
        };
        json!({
            "conditionA": section(&self.condition_a, self.status_a()),
            "conditionB": section(&self.condition_b, self.status_b()),
            "conditionC": section(&self.condition_c, self.status_c()),
            "overall": self.overall(),
        })
    }
}

/// Whether `f: R^n -> N` is onto.
pub fn is_surjective<R: Ring>(f: &Matrix<R>, target: &Presentation<R>) -> bool {
    Presentation::new(f.hstack(&target.relations)).group().is_trivial()
}

/// Searches for an epimorphism `S(p) -> N` of modules over every object;
/// a failure is certified when no `S(p)` can map onto `N` at all.
pub fn check_condition_b<R: Ring>(
    rep: &Representation<R>,
    target: &TargetPresentation<R>,
    name: &str,
) -> Result<Item> {
    let n = target.module(name)?;
    let group = n.carrier();
    let needed = group.free_rank() + group.torsion().len();
    let mut possible = false;
    let mut tried = 0;
    for p in rep.diagram().objects() {
        let sp = target.s_of(p)?;
        if sp.generators() < needed {
            continue;
        }
        let hom = sp.hom(n)?;
        let mut all_images = Matrix::zeros(n.generators(), 0);
        for g in hom.generators() {
            all_images = all_images.hstack(g);
        }
        if !is_surjective(&all_images, n.presentation()) {
            continue;
        }
        possible = true;
        for f in bounded_combinations(hom.generators(), 2, 5_000) {
            tried += 1;
            if is_surjective(&f, n.presentation()) {
                return Ok(Item {
                    condition: 'b',
                    subject: name.to_string(),
                    status: Status::Pass,
                    certificate: json!({"source": p, "map": f}),
                });
            }
        }
    }
    Ok(if possible {
        Item {
            condition: 'b',
            subject: name.to_string(),
            status: Status::NotFound,
            certificate: json!({"candidates": tried}),
        }
    } else {
        Item {
            condition: 'b',
            subject: name.to_string(),
            status: Status::Fail,
            certificate: json!({
                "reason": "no S(p) maps onto the module",
                "minimalGenerators": needed,
            }),
        }
    })
}

/// A test map resolved against a representation.
#[derive(Clone, Debug)]
pub struct TestMap<R> {
    pub name: String,
    pub object: String,
    pub matrix: Matrix<R>,
    pub target_relations: Option<Matrix<R>>,
    pub stage: Option<Diagram>,
}

impl TestMapDoc {
    pub fn resolve<R: Ring>(
        &self,
        index: usize,
        rep: &Representation<R>,
        target: Option<&TargetPresentation<R>>,
    ) -> Result<TestMap<R>> {
        let matrix = self.matrix.to_matrix().map_err(Error::Parse)?;
        let target_relations = match (&self.target, target) {
            (Some(t), Some(tp)) => Some(tp.module(t)?.relations().clone()),
            (Some(t), None) => {
                return Err(Error::Invalid(format!("test map refers to module '{t}' without a target")))
            }
            _ => None,
        };
        Ok(TestMap {
            name: self.name.clone().unwrap_or_else(|| format!("map{index}")),
            object: self.object.clone(),
            matrix,
            target_relations,
            stage: self.stage.as_ref().map(|s| rep.stage(s)).transpose()?,
        })
    }
}

pub fn full_criterion<R: Ring>(
    universe: &Universe<R>,
    target: &TargetPresentation<R>,
    test_maps: &[TestMap<R>],
) -> Result<CriterionReport> {
    let rep = universe.representation();
    target.validate(rep)?;
    let condition_a = check_condition_a(rep, None)?;
    let condition_b = target
        .generators
        .iter()
        .map(|g| check_condition_b(rep, target, g))
        .collect::<Result<Vec<_>>>()?;
    let mut condition_c = Vec::new();
    for t in test_maps {
        let stage = t.stage.clone().unwrap_or_else(|| rep.diagram().clone());
        let c = check_condition_c(universe, &stage, &t.object, &t.matrix, t.target_relations.as_ref())?;
        let mut certificate = c.certificate();
        certificate["map"] = json!(t.name);
        condition_c.push(Item {
            condition: 'c',
            subject: t.name.clone(),
            status: c.status(),
            certificate,
        });
    }
    Ok(CriterionReport {
        condition_a,
        condition_b,
        condition_c,
    })
}
