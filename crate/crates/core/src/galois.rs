//! Finite groups, permutation modules and the two-object Galois stage whose
//! commutant is the group algebra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::Algebra;
use crate::commutant::{EndAlgebra, Tuple};
use crate::criterion::{TargetPresentation, TestMap};
use crate::diagram::{Arrow, CoproductEntry, Diagram, Representation};
use crate::error::{Error, Result};
use crate::linalg::{image_basis, Matrix, Ring};
use crate::module::Module;

/// A finite group given by its multiplication table: `table[a][b] = a * b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Verifies closure, associativity, identity and inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Invalid("a group needs at least one element".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Invalid(format!("multiplication table must be {n}x{n} with entries below {n}")));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::Invalid("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::Invalid(format!("element {g} has no inverse")))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Invalid(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverses,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        Self::new(
            (0..n)
                .map(|a| (0..n).map(|b| (a + b) % n).collect())
                .collect(),
        )
        .expect("cyclic group")
    }

    /// The group of all permutations in `perms` closed under composition,
    /// with `(p * q)(x) = p(q(x))`.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self> {
        let index = |x: &Vec<usize>| perms.iter().position(|p| p == x);
        let mut table = Vec::with_capacity(perms.len());
        for p in perms {
            let mut row = Vec::with_capacity(perms.len());
            for q in perms {
                let pq: Vec<usize> = q.iter().map(|&x| p[x]).collect();
                row.push(index(&pq).ok_or_else(|| {
                    Error::Invalid("permutations are not closed under composition".into())
                })?);
            }
            table.push(row);
        }
        Self::new(table)
    }

    /// All permutations of `k` points in lexicographic order.
    pub fn symmetric(k: usize) -> Self {
        let mut perms = vec![(0..k).collect::<Vec<_>>()];
        loop {
            let mut p = perms.last().unwrap().clone();
            let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
                break;
            };
            let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
            p.swap(i - 1, j);
            p[i..].reverse();
            perms.push(p);
        }
        Self::from_permutations(&perms).expect("symmetric group")
    }

    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let (n, m) = (self.order(), other.order());
        let table = (0..n * m)
            .map(|a| {
                (0..n * m)
                    .map(|b| self.mul(a / m, b / m) * m + other.mul(a % m, b % m))
                    .collect()
            })
            .collect();
        Self::new(table).expect("product of groups")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// A finite set with a left action: `action[g][x] = g . x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSet {
    size: usize,
    action: Vec<Vec<usize>>,
}

impl GSet {
    pub fn new(group: &FiniteGroup, size: usize, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != group.order() || action.iter().any(|r| r.len() != size || r.iter().any(|&x| x >= size)) {
            return Err(Error::Invalid(format!(
                "action table must be {}x{size} with entries below {size}",
                group.order()
            )));
        }
        if (0..size).any(|x| action[group.identity()][x] != x) {
            return Err(Error::Invalid("the identity does not act trivially".into()));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                for x in 0..size {
                    if action[group.mul(g, h)][x] != action[g][action[h][x]] {
                        return Err(Error::Invalid(format!(
                            "action is not compatible with the product of {g} and {h}"
                        )));
                    }
                }
            }
        }
        Ok(GSet { size, action })
    }

    /// The group acting on itself by left multiplication.
    pub fn regular(group: &FiniteGroup) -> Self {
        GSet {
            size: group.order(),
            action: group.table.clone(),
        }
    }

    pub fn trivial(group: &FiniteGroup, size: usize) -> Self {
        GSet {
            size,
            action: vec![(0..size).collect(); group.order()],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Disjoint union, the second set shifted after the first.
    pub fn disjoint_union(&self, other: &GSet) -> GSet {
        GSet {
            size: self.size + other.size,
            action: self
                .action
                .iter()
                .zip(&other.action)
                .map(|(a, b)| a.iter().copied().chain(b.iter().map(|x| x + self.size)).collect())
                .collect(),
        }
    }

    /// Orbit representatives, smallest point of each orbit.
    pub fn orbit_representatives(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&x| self.action.iter().all(|row| row[x] >= x))
            .collect()
    }
}

/// Matrix of the permutation `x -> images[x]` (column `x` has its one in row
/// `images[x]`).
pub fn permutation_matrix<R: Ring>(images: &[usize]) -> Matrix<R> {
    let n = images.len();
    Matrix::from_fn(n, n, |i, j| if images[j] == i { R::one() } else { R::zero() })
}

/// `R[G]` with basis the group elements.
pub fn group_algebra<R: Ring>(group: &FiniteGroup) -> Algebra<R> {
    let n = group.order();
    let mut structure = vec![R::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            structure[(a * n + b) * n + group.mul(a, b)] = R::one();
        }
    }
    let mut unit = vec![R::zero(); n];
    unit[group.identity()] = R::one();
    Algebra::new(n, structure, unit).expect("group algebra shape")
}

/// `R[A]` with each group element acting by its permutation matrix.
pub fn permutation_module<R: Ring>(set: &GSet) -> Module<R> {
    let action = set.action.iter().map(|row| permutation_matrix(row)).collect();
    Module::free(set.size, action).expect("permutation matrices are square")
}

pub const GALOIS_OBJECT: &str = "l";
pub const TARGET_OBJECT: &str = "X";
pub const SUM_OBJECT: &str = "l+X";

/// The Galois stage: `l` carries the regular set with one loop per group
/// element, acting by `h -> h g^-1`; each equivariant map `G -> B` becomes an
/// arrow `l -> X`; `l+X` is the coproduct of the two with its inclusions.
#[derive(Clone, Debug)]
pub struct GaloisDiagram<R> {
    pub group: FiniteGroup,
    pub set: GSet,
    pub rep: Representation<R>,
}

/// `maps[k][h]` is the image of `h` under the `k`-th map `G -> B`; each must
/// satisfy `phi(g h) = g . phi(h)`.
pub fn build_galois_diagram<R: Ring>(
    group: &FiniteGroup,
    set: &GSet,
    maps: &[Vec<usize>],
) -> Result<GaloisDiagram<R>> {
    let n = group.order();
    for (k, phi) in maps.iter().enumerate() {
        if phi.len() != n || phi.iter().any(|&x| x >= set.size()) {
            return Err(Error::Invalid(format!("map {k} must send each of the {n} group elements into the set")));
        }
        for g in 0..n {
            for h in 0..n {
                if phi[group.mul(g, h)] != set.act(g, phi[h]) {
                    return Err(Error::Invalid(format!(
                        "map {k} is not equivariant: phi({g} * {h}) != {g} . phi({h})"
                    )));
                }
            }
        }
    }
    let mut arrows = Vec::new();
    let mut matrices = BTreeMap::new();
    let arrow = |id: String, src: &str, dst: &str| Arrow {
        id,
        src: src.into(),
        dst: dst.into(),
    };
    for g in 0..n {
        let id = format!("g{g}");
        let images: Vec<usize> = (0..n).map(|h| group.mul(h, group.inverse(g))).collect();
        matrices.insert(id.clone(), permutation_matrix::<R>(&images));
        arrows.push(arrow(id, GALOIS_OBJECT, GALOIS_OBJECT));
    }
    for (k, phi) in maps.iter().enumerate() {
        let id = format!("phi{k}");
        let m = Matrix::from_fn(set.size(), n, |b, h| if phi[h] == b { R::one() } else { R::zero() });
        matrices.insert(id.clone(), m);
        arrows.push(arrow(id, GALOIS_OBJECT, TARGET_OBJECT));
    }
    let total = n + set.size();
    matrices.insert(
        "i".into(),
        Matrix::from_fn(total, n, |r, c| if r == c { R::one() } else { R::zero() }),
    );
    matrices.insert(
        "iPrime".into(),
        Matrix::from_fn(total, set.size(), |r, c| if r == c + n { R::one() } else { R::zero() }),
    );
    arrows.push(arrow("i".into(), GALOIS_OBJECT, SUM_OBJECT));
    arrows.push(arrow("iPrime".into(), TARGET_OBJECT, SUM_OBJECT));
    let diagram = Diagram::new(
        vec![GALOIS_OBJECT.into(), TARGET_OBJECT.into(), SUM_OBJECT.into()],
        arrows,
        vec![CoproductEntry {
            p: GALOIS_OBJECT.into(),
            q: TARGET_OBJECT.into(),
            sum: SUM_OBJECT.into(),
            i: "i".into(),
            i_prime: "iPrime".into(),
        }],
    )?;
    let values = [
        (GALOIS_OBJECT.to_string(), n),
        (TARGET_OBJECT.to_string(), set.size()),
        (SUM_OBJECT.to_string(), total),
    ]
    .into_iter()
    .collect();
    Ok(GaloisDiagram {
        group: group.clone(),
        set: set.clone(),
        rep: Representation::new(diagram, values, matrices)?,
    })
}

impl<R: Ring> GaloisDiagram<R> {
    /// The tuple by which `g` acts: left multiplication on `l`, the set
    /// action on `X`, both on `l+X`; restricted to the objects of `stage`.
    pub fn action_tuple(&self, stage: &Diagram, g: usize) -> Tuple<R> {
        let left: Vec<usize> = (0..self.group.order()).map(|h| self.group.mul(g, h)).collect();
        let on_set = self.set.action()[g].clone();
        stage
            .objects()
            .iter()
            .map(|o| match o.as_str() {
                GALOIS_OBJECT => permutation_matrix(&left),
                TARGET_OBJECT => permutation_matrix(&on_set),
                _ => {
                    let mut both = left.clone();
                    both.extend(on_set.iter().map(|x| x + self.group.order()));
                    permutation_matrix(&both)
                }
            })
            .collect()
    }

    pub fn compare(&self, end: &EndAlgebra<R>) -> Result<GroupAlgebraComparison> {
        let tuples: Vec<Tuple<R>> = (0..self.group.order())
            .map(|g| self.action_tuple(end.stage(), g))
            .collect();
        compare_with_group_algebra(end, &self.group, &tuples)
    }
}

/// How `R[G] -> End(T|_E)`, `g -> tuples[g]`, sits in the commutant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAlgebraComparison {
    pub group_order: usize,
    pub commutant_dim: usize,
    pub image_rank: usize,
    pub injective: bool,
    pub surjective: bool,
    pub homomorphism: bool,
}

impl GroupAlgebraComparison {
    pub fn is_isomorphism(&self) -> bool {
        self.injective && self.surjective && self.homomorphism
    }
}

pub fn compare_with_group_algebra<R: Ring>(
    end: &EndAlgebra<R>,
    group: &FiniteGroup,
    tuples: &[Tuple<R>],
) -> Result<GroupAlgebraComparison> {
    if tuples.len() != group.order() {
        return Err(Error::Shape(format!(
            "{} action tuples for a group of order {}",
            tuples.len(),
            group.order()
        )));
    }
    let coords = tuples
        .iter()
        .enumerate()
        .map(|(g, t)| {
            end.coords_of(t).ok_or_else(|| {
                Error::Invalid(format!("group element {g} does not act through the commutant"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_columns(end.dim(), &coords);
    let image_rank = m.rank();
    let image = image_basis(&m);
    let surjective = (0..end.dim()).all(|i| image.contains(&end.algebra().basis_vector(i)));
    let n = group.order();
    let homomorphism = (0..n).all(|a| {
        (0..n).all(|b| end.algebra().mul(&coords[a], &coords[b]) == coords[group.mul(a, b)])
    }) && coords[group.identity()] == end.unit_coords();
    Ok(GroupAlgebraComparison {
        group_order: n,
        commutant_dim: end.dim(),
        image_rank,
        injective: image_rank == n,
        surjective,
        homomorphism,
    })
}

/// `{"order": n, "table": [[...]], "sets": [{"size": m, "action": [[...]]}],
/// "maps": [[...]]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default)]
    pub sets: Vec<GSetDoc>,
    #[serde(default)]
    pub maps: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GSetDoc {
    pub size: usize,
    pub action: Vec<Vec<usize>>,
}

impl GroupDoc {
    pub fn group(&self) -> Result<FiniteGroup> {
        if self.table.len() != self.order {
            return Err(Error::Invalid(format!(
                "order {} does not match a table with {} rows",
                self.order,
                self.table.len()
            )));
        }
        FiniteGroup::new(self.table.clone())
    }

    pub fn sets(&self, group: &FiniteGroup) -> Result<Vec<GSet>> {
        self.sets
            .iter()
            .map(|s| GSet::new(group, s.size, s.action.clone()))
            .collect()
    }

    pub fn from_parts(group: &FiniteGroup, sets: &[GSet], maps: &[Vec<usize>]) -> Self {
        GroupDoc {
            order: group.order(),
            table: group.table.clone(),
            sets: sets
                .iter()
                .map(|s| GSetDoc {
                    size: s.size,
                    action: s.action.clone(),
                })
                .collect(),
            maps: maps.to_vec(),
        }
    }
}

/// Equivariant maps `G -> B`, `h -> h . b` for each orbit representative
/// `b`.
pub fn orbit_maps(group: &FiniteGroup, set: &GSet) -> Vec<Vec<usize>> {
    set.orbit_representatives()
        .into_iter()
        .map(|b| (0..group.order()).map(|h| set.act(h, b)).collect())
        .collect()
}

pub fn comparison_json(c: &GroupAlgebraComparison) -> Value {
    json!({
        "groupOrder": c.group_order,
        "commutantDim": c.commutant_dim,
        "imageRank": c.image_rank,
        "injective": c.injective,
        "surjective": c.surjective,
        "homomorphism": c.homomorphism,
        "isomorphism": c.is_isomorphism(),
    })
}

pub const TRIVIAL_MODULE: &str = "trivial";

fn s_name(object: &str) -> String {
    format!("S({object})")
}

impl<R: Ring> GaloisDiagram<R> {
    /// Permutation modules over `R[G]` for the three objects plus the
    /// trivial module; `S(X)` and the trivial module are declared generators.
    pub fn target(&self) -> TargetPresentation<R> {
        let regular = GSet::regular(&self.group);
        let modules: BTreeMap<String, Module<R>> = [
            (s_name(GALOIS_OBJECT), permutation_module(&regular)),
            (s_name(TARGET_OBJECT), permutation_module(&self.set)),
            (s_name(SUM_OBJECT), permutation_module(&regular.disjoint_union(&self.set))),
            (TRIVIAL_MODULE.to_string(), permutation_module(&GSet::trivial(&self.group, 1))),
        ]
        .into_iter()
        .collect();
        TargetPresentation {
            algebra: group_algebra(&self.group),
            modules,
            s: [GALOIS_OBJECT, TARGET_OBJECT, SUM_OBJECT]
                .iter()
                .map(|o| (o.to_string(), s_name(o)))
                .collect(),
            generators: vec![s_name(TARGET_OBJECT), TRIVIAL_MODULE.to_string()],
        }
    }

    /// Equivariant test maps: the augmentation `R[G] -> R` and every
    /// arrow `l -> X`.
    pub fn equivariant_test_maps(&self) -> Vec<TestMap<R>> {
        let n = self.group.order();
        let mut maps = vec![TestMap {
            name: "augmentation".into(),
            object: GALOIS_OBJECT.into(),
            matrix: Matrix::from_fn(1, n, |_, _| R::one()),
            target_relations: None,
            stage: None,
        }];
        for a in self.rep.diagram().arrows() {
            if a.src == GALOIS_OBJECT && a.dst == TARGET_OBJECT {
                maps.push(TestMap {
                    name: a.id.clone(),
                    object: GALOIS_OBJECT.into(),
                    matrix: self.rep.matrix(&a.id).expect("own arrow").clone(),
                    target_relations: None,
                    stage: None,
                });
            }
        }
        maps
    }

    /// The coefficient of the identity element, `R[G] -> R`; its kernel is
    /// not stable under left multiplication once `G` is nontrivial.
    pub fn non_equivariant_test_map(&self) -> TestMap<R> {
        let e = self.group.identity();
        TestMap {
            name: "identityCoefficient".into(),
            object: GALOIS_OBJECT.into(),
            matrix: Matrix::from_fn(1, self.group.order(), |_, h| if h == e { R::one() } else { R::zero() }),
            target_relations: None,
            stage: None,
        }
    }
}
