//! Diagrams (quivers without composition) and their representations by free
//! modules over `Z` or `Q`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::json::MatrixLiteral;
use crate::linalg::{Int, Matrix, Rat, Ring, RingKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// Declares `sum` as a coproduct of `p` and `q` with inclusions `i: p -> sum`
/// and `iPrime: q -> sum`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoproductEntry {
    pub p: String,
    pub q: String,
    pub sum: String,
    pub i: String,
    #[serde(rename = "iPrime")]
    pub i_prime: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Diagram {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    coproducts: Vec<CoproductEntry>,
}

/// Object and arrow names selecting a subdiagram: `{"objects": [...], "arrows": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct StageSpec {
    pub objects: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<String>,
}

impl Diagram {
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        coproducts: Vec<CoproductEntry>,
    ) -> Result<Self> {
        let d = Diagram {
            objects,
            arrows,
            coproducts,
        };
        let problems = d.structural_problems();
        if let Some(p) = problems.into_iter().next() {
            return Err(Error::Invalid(p));
        }
        Ok(d)
    }

    pub fn empty() -> Self {
        Diagram::default()
    }

    fn structural_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for o in &self.objects {
            if !seen.insert(o) {
                out.push(format!("duplicate object '{o}'"));
            }
        }
        let mut seen = BTreeSet::new();
        for a in &self.arrows {
            if !seen.insert(&a.id) {
                out.push(format!("duplicate arrow '{}'", a.id));
            }
            for end in [&a.src, &a.dst] {
                if !self.has_object(end) {
                    out.push(format!("arrow '{}' references unknown object '{end}'", a.id));
                }
            }
        }
        for c in &self.coproducts {
            let check = |arrow: &str, src: &str| match self.arrow(arrow) {
                None => Some(format!("coproduct entry references unknown arrow '{arrow}'")),
                Some(a) if a.src != src || a.dst != c.sum => Some(format!(
                    "coproduct arrow '{arrow}' should go {src} -> {}, found {} -> {}",
                    c.sum, a.src, a.dst
                )),
                _ => None,
            };
            out.extend(check(&c.i, &c.p));
            out.extend(check(&c.i_prime, &c.q));
        }
        out
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn coproducts(&self) -> &[CoproductEntry] {
        &self.coproducts
    }

    pub fn has_object(&self, p: &str) -> bool {
        self.objects.iter().any(|o| o == p)
    }

    pub fn object_index(&self, p: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == p)
    }

    pub fn arrow(&self, id: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.id == id)
    }

    pub fn has_arrow(&self, id: &str) -> bool {
        self.arrow(id).is_some()
    }

    /// Every object and arrow of `self` occurs in `other` (arrows with the
    /// same endpoints).
    pub fn is_subdiagram_of(&self, other: &Diagram) -> bool {
        self.objects.iter().all(|o| other.has_object(o))
            && self.arrows.iter().all(|a| other.arrow(&a.id) == Some(a))
    }

    pub fn check_subdiagram_of(&self, other: &Diagram) -> Result<()> {
        if let Some(o) = self.objects.iter().find(|o| !other.has_object(o)) {
            return Err(Error::NotSubdiagram(format!("object '{o}' is missing")));
        }
        if let Some(a) = self.arrows.iter().find(|a| other.arrow(&a.id) != Some(*a)) {
            return Err(Error::NotSubdiagram(format!(
                "arrow '{}' is missing or has different endpoints",
                a.id
            )));
        }
        Ok(())
    }

    /// The subdiagram on the given objects and arrows, ordered as in `self`.
    /// Coproduct entries survive when all their parts do.
    pub fn subdiagram<S: AsRef<str>>(&self, objects: &[S], arrows: &[S]) -> Result<Diagram> {
        let objs: BTreeSet<&str> = objects.iter().map(|s| s.as_ref()).collect();
        let arrs: BTreeSet<&str> = arrows.iter().map(|s| s.as_ref()).collect();
        for o in &objs {
            if !self.has_object(o) {
                return Err(Error::UnknownObject(o.to_string()));
            }
        }
        for a in &arrs {
            let arrow = self.arrow(a).ok_or_else(|| Error::UnknownArrow(a.to_string()))?;
            if !objs.contains(arrow.src.as_str()) || !objs.contains(arrow.dst.as_str()) {
                return Err(Error::NotSubdiagram(format!(
                    "arrow '{a}' has an endpoint outside the selected objects"
                )));
            }
        }
        Ok(self.filtered(|o| objs.contains(o), |a| arrs.contains(a)))
    }

    /// The full subdiagram on the given objects.
    pub fn full_subdiagram<S: AsRef<str>>(&self, objects: &[S]) -> Result<Diagram> {
        let objs: BTreeSet<&str> = objects.iter().map(|s| s.as_ref()).collect();
        for o in &objs {
            if !self.has_object(o) {
                return Err(Error::UnknownObject(o.to_string()));
            }
        }
        Ok(self.filtered(
            |o| objs.contains(o),
            |a| {
                let arrow = self.arrow(a).expect("own arrow");
                objs.contains(arrow.src.as_str()) && objs.contains(arrow.dst.as_str())
            },
        ))
    }

    pub fn from_spec(&self, spec: &StageSpec) -> Result<Diagram> {
        self.subdiagram(&spec.objects, &spec.arrows)
    }

    pub fn to_spec(&self) -> StageSpec {
        StageSpec {
            objects: self.objects.clone(),
            arrows: self.arrows.iter().map(|a| a.id.clone()).collect(),
        }
    }

    fn filtered(&self, keep_obj: impl Fn(&str) -> bool, keep_arrow: impl Fn(&str) -> bool) -> Diagram {
        let objects: Vec<String> = self
            .objects
            .iter()
            .filter(|o| keep_obj(o))
            .cloned()
            .collect();
        let arrows: Vec<Arrow> = self
            .arrows
            .iter()
            .filter(|a| keep_arrow(&a.id))
            .cloned()
            .collect();
        let has = |id: &str| arrows.iter().any(|a| a.id == id);
        let coproducts = self
            .coproducts
            .iter()
            .filter(|c| has(&c.i) && has(&c.i_prime))
            .cloned()
            .collect();
        Diagram {
            objects,
            arrows,
            coproducts,
        }
    }

    /// Smallest subdiagram of `parent` containing both.
    pub fn union_within(&self, other: &Diagram, parent: &Diagram) -> Result<Diagram> {
        self.check_subdiagram_of(parent)?;
        other.check_subdiagram_of(parent)?;
        let objs: BTreeSet<&str> = self
            .objects
            .iter()
            .chain(&other.objects)
            .map(|s| s.as_str())
            .collect();
        let arrs: BTreeSet<&str> = self
            .arrows
            .iter()
            .chain(&other.arrows)
            .map(|a| a.id.as_str())
            .collect();
        Ok(parent.filtered(|o| objs.contains(o), |a| arrs.contains(a)))
    }

    /// Order-independent identity of a stage.
    pub fn key(&self) -> (Vec<String>, Vec<String>) {
        let mut o = self.objects.clone();
        o.sort();
        let mut a: Vec<String> = self.arrows.iter().map(|a| a.id.clone()).collect();
        a.sort();
        (o, a)
    }

    pub fn same_stage(&self, other: &Diagram) -> bool {
        self.key() == other.key()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{objects: [{}], arrows: [{}]}}",
            self.objects.join(", "),
            self.arrows
                .iter()
                .map(|a| format!("{}: {} -> {}", a.id, a.src, a.dst))
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// A single problem found by validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Violation {
    Structure { message: String },
    MissingValue { object: String },
    MissingMatrix { arrow: String },
    UnknownEntry { name: String },
    Shape {
        arrow: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    RingMismatch { arrow: String, expected: RingKind },
    Entry { arrow: String, message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure { message } => write!(f, "{message}"),
            Violation::MissingValue { object } => write!(f, "object '{object}' has no value"),
            Violation::MissingMatrix { arrow } => write!(f, "arrow '{arrow}' has no matrix"),
            Violation::UnknownEntry { name } => {
                write!(f, "'{name}' is not an object or arrow of the diagram")
            }
            Violation::Shape {
                arrow,
                expected,
                found,
            } => write!(
                f,
                "arrow '{arrow}': matrix is {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::RingMismatch { arrow, expected } => {
                write!(f, "arrow '{arrow}': matrix entries are not in {expected}")
            }
            Violation::Entry { arrow, message } => write!(f, "arrow '{arrow}': {message}"),
        }
    }
}

/// A representation of a finite diagram: a free module `R^value(p)` per
/// object and a matrix per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation<R> {
    diagram: Diagram,
    values: BTreeMap<String, usize>,
    matrices: BTreeMap<String, Matrix<R>>,
}

impl<R: Ring> Representation<R> {
    pub fn new(
        diagram: Diagram,
        values: BTreeMap<String, usize>,
        matrices: BTreeMap<String, Matrix<R>>,
    ) -> Result<Self> {
        let rep = Representation {
            diagram,
            values,
            matrices,
        };
        let v = rep.validate();
        if !v.is_empty() {
            return Err(Error::Invalid(
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            ));
        }
        Ok(rep)
    }

    /// Builds without checking; pair with [`Representation::validate`].
    pub fn new_unchecked(
        diagram: Diagram,
        values: BTreeMap<String, usize>,
        matrices: BTreeMap<String, Matrix<R>>,
    ) -> Self {
        Representation {
            diagram,
            values,
            matrices,
        }
    }

    pub fn empty() -> Self {
        Representation {
            diagram: Diagram::empty(),
            values: BTreeMap::new(),
            matrices: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> RingKind {
        R::KIND
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn values(&self) -> &BTreeMap<String, usize> {
        &self.values
    }

    pub fn matrices(&self) -> &BTreeMap<String, Matrix<R>> {
        &self.matrices
    }

    /// Rank of `T(p)`.
    pub fn value(&self, p: &str) -> Result<usize> {
        self.values
            .get(p)
            .copied()
            .ok_or_else(|| Error::UnknownObject(p.to_string()))
    }

    /// `T(a)`.
    pub fn matrix(&self, a: &str) -> Result<&Matrix<R>> {
        self.matrices
            .get(a)
            .ok_or_else(|| Error::UnknownArrow(a.to_string()))
    }

    /// Shape and completeness problems; empty iff the representation is
    /// well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self
            .diagram
            .structural_problems()
            .into_iter()
            .map(|message| Violation::Structure { message })
            .collect();
        for o in &self.diagram.objects {
            if !self.values.contains_key(o) {
                out.push(Violation::MissingValue { object: o.clone() });
            }
        }
        for name in self.values.keys() {
            if !self.diagram.has_object(name) {
                out.push(Violation::UnknownEntry { name: name.clone() });
            }
        }
        for name in self.matrices.keys() {
            if !self.diagram.has_arrow(name) {
                out.push(Violation::UnknownEntry { name: name.clone() });
            }
        }
        for a in &self.diagram.arrows {
            let Some(m) = self.matrices.get(&a.id) else {
                out.push(Violation::MissingMatrix { arrow: a.id.clone() });
                continue;
            };
            if let (Some(&r), Some(&c)) = (self.values.get(&a.dst), self.values.get(&a.src)) {
                if m.shape() != (r, c) {
                    out.push(Violation::Shape {
                        arrow: a.id.clone(),
                        expected: (r, c),
                        found: m.shape(),
                    });
                }
            }
        }
        out
    }

    /// `T|_E`.
    pub fn restrict(&self, e: &Diagram) -> Result<Representation<R>> {
        e.check_subdiagram_of(&self.diagram)?;
        let values = e
            .objects
            .iter()
            .map(|o| (o.clone(), self.values[o]))
            .collect();
        let matrices = e
            .arrows
            .iter()
            .map(|a| (a.id.clone(), self.matrices[&a.id].clone()))
            .collect();
        Ok(Representation {
            diagram: e.clone(),
            values,
            matrices,
        })
    }

    /// The subdiagram named by `spec`, ordered as in this diagram.
    pub fn stage(&self, spec: &StageSpec) -> Result<Diagram> {
        self.diagram.from_spec(spec)
    }

    /// Reorders `e` to follow this diagram's object and arrow order.
    pub fn canonical_stage(&self, e: &Diagram) -> Result<Diagram> {
        e.check_subdiagram_of(&self.diagram)?;
        self.diagram.subdiagram(
            &e.objects,
            &e.arrows.iter().map(|a| a.id.clone()).collect::<Vec<_>>(),
        )
    }
}

impl Representation<Int> {
    /// `T ⊗ Q`.
    pub fn base_change_q(&self) -> Representation<Rat> {
        Representation {
            diagram: self.diagram.clone(),
            values: self.values.clone(),
            matrices: self
                .matrices
                .iter()
                .map(|(k, m)| (k.clone(), m.to_rat()))
                .collect(),
        }
    }
}

/// A representation over either ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyRep {
    Z(Representation<Int>),
    Q(Representation<Rat>),
}

impl AnyRep {
    pub fn ring(&self) -> RingKind {
        match self {
            AnyRep::Z(_) => RingKind::Z,
            AnyRep::Q(_) => RingKind::Q,
        }
    }

    pub fn diagram(&self) -> &Diagram {
        match self {
            AnyRep::Z(r) => r.diagram(),
            AnyRep::Q(r) => r.diagram(),
        }
    }

    /// Base change to `Q`; rejected for representations already over `Q`.
    pub fn base_change_q(&self) -> Result<AnyRep> {
        match self {
            AnyRep::Z(r) => Ok(AnyRep::Q(r.base_change_q())),
            AnyRep::Q(_) => Err(Error::Ring(
                "representation is already over Q".to_string(),
            )),
        }
    }
}

/// Diagram and representation JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationDoc {
    pub objects: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<Arrow>,
    pub ring: RingKind,
    #[serde(default)]
    pub values: BTreeMap<String, usize>,
    #[serde(default)]
    pub matrices: BTreeMap<String, MatrixLiteral>,
    #[serde(default)]
    pub coproducts: Vec<CoproductEntry>,
}

impl RepresentationDoc {
    fn diagram_unchecked(&self) -> Diagram {
        Diagram {
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            coproducts: self.coproducts.clone(),
        }
    }

    /// All violations, including entries that do not belong to the declared
    /// ring (one per offending matrix).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut typed = BTreeMap::new();
        for (id, lit) in &self.matrices {
            if let Err(message) = lit.check_shape() {
                out.push(Violation::Entry {
                    arrow: id.clone(),
                    message,
                });
                continue;
            }
            match lit.natural_ring() {
                Err(message) => out.push(Violation::Entry {
                    arrow: id.clone(),
                    message,
                }),
                Ok(RingKind::Q) if self.ring == RingKind::Z => out.push(Violation::RingMismatch {
                    arrow: id.clone(),
                    expected: RingKind::Z,
                }),
                Ok(_) => {
                    typed.insert(id.clone(), lit.to_matrix::<Rat>().expect("checked"));
                }
            }
        }
        // shape checks run on whatever parsed; arrows with bad entries count once
        let bad: BTreeSet<String> = out
            .iter()
            .filter_map(|v| match v {
                Violation::Entry { arrow, .. } | Violation::RingMismatch { arrow, .. } => {
                    Some(arrow.clone())
                }
                _ => None,
            })
            .collect();
        let rep = Representation::new_unchecked(self.diagram_unchecked(), self.values.clone(), typed);
        out.extend(rep.validate().into_iter().filter(|v| match v {
            Violation::MissingMatrix { arrow } => !bad.contains(arrow),
            _ => true,
        }));
        out
    }

    pub fn to_rep<R: Ring>(&self) -> Result<Representation<R>> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::Invalid(
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ));
        }
        let diagram = Diagram::new(
            self.objects.clone(),
            self.arrows.clone(),
            self.coproducts.clone(),
        )?;
        let matrices = self
            .matrices
            .iter()
            .map(|(k, lit)| Ok((k.clone(), lit.to_matrix::<R>().map_err(Error::Parse)?)))
            .collect::<Result<_>>()?;
        Representation::new(diagram, self.values.clone(), matrices)
    }

    pub fn into_any(&self) -> Result<AnyRep> {
        match self.ring {
            RingKind::Z => Ok(AnyRep::Z(self.to_rep()?)),
            RingKind::Q => Ok(AnyRep::Q(self.to_rep()?)),
        }
    }

    pub fn from_rep<R: Ring>(rep: &Representation<R>) -> Self {
        RepresentationDoc {
            objects: rep.diagram.objects.clone(),
            arrows: rep.diagram.arrows.clone(),
            ring: R::KIND,
            values: rep.values.clone(),
            matrices: rep
                .matrices
                .iter()
                .map(|(k, m)| (k.clone(), MatrixLiteral::from_matrix(m)))
                .collect(),
            coproducts: rep.diagram.coproducts.clone(),
        }
    }
}

/// An increasing chain `E1 ⊆ E2 ⊆ ...` of subdiagrams of a fixed diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdiagramChain {
    stages: Vec<Diagram>,
}

/// `{"stages": [{"objects": [...], "arrows": [...]}, ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDoc {
    pub stages: Vec<StageSpec>,
}

impl SubdiagramChain {
    pub fn new(parent: &Diagram, stages: Vec<Diagram>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Invalid("a chain needs at least one stage".into()));
        }
        for (i, s) in stages.iter().enumerate() {
            s.check_subdiagram_of(parent)
                .map_err(|e| Error::Invalid(format!("stage {}: {e}", i + 1)))?;
            if i > 0 && !stages[i - 1].is_subdiagram_of(s) {
                return Err(Error::Invalid(format!(
                    "chain is not increasing: stage {} is not contained in stage {}",
                    i,
                    i + 1
                )));
            }
        }
        Ok(SubdiagramChain { stages })
    }

    pub fn from_doc(parent: &Diagram, doc: &ChainDoc) -> Result<Self> {
        let stages = doc
            .stages
            .iter()
            .map(|s| parent.from_spec(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parent, stages)
    }

    pub fn stages(&self) -> &[Diagram] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}
