//! Reference routines for the integration tests. Everything here is written
//! from scratch with plain vectors so that it shares no code with the library.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use univcat::diagram::{Arrow, Diagram, Representation};
use univcat::graph::{CellularMap, EdgeImage, Graph, Subcomplex};
use univcat::graph::Edge;
use univcat::linalg::{Int, IntMat, Matrix, Ring};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_q<R: Ring>(m: &Matrix<R>) -> Vec<Vec<Q>> {
    m.to_rat().row_vecs()
}

/// Rank by plain Gaussian elimination over Q.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    rref(rows).len()
}

/// Nonzero rows of the reduced row echelon form.
pub fn rref(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let d = &f * &a[r][k];
                    a[i][k] -= d;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Basis of `{x : A x = 0}` as vectors.
pub fn nullspace(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let e = rref(rows);
    let pivots: Vec<usize> = e
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![q(0); cols];
            v[free] = q(1);
            for (row, &p) in e.iter().zip(&pivots) {
                v[p] = -row[free].clone();
            }
            v
        })
        .collect()
}

pub fn same_span(a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    let r = rank(a);
    r == rank(b) && r == rank(&both)
}

pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = q(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return q(0);
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c].clone();
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            for k in c..n {
                let x = &f * &a[c][k];
                a[i][k] -= x;
            }
        }
    }
    d
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all `k x k` minors of an integer matrix.
pub fn minor_gcd(m: &[Vec<Q>], k: usize) -> BigInt {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut g = BigInt::zero();
    for rs in subsets(rows, k) {
        for cs in subsets(cols, k) {
            let sub: Vec<Vec<Q>> = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect())
                .collect();
            let d = det(&sub);
            assert!(d.is_integer());
            g = g.gcd(&d.to_integer());
        }
    }
    g
}

/// Free rank and invariant factors (> 1) of `Z^m / im(A)` from
/// determinantal divisors.
pub fn cokernel_invariants(a: &[Vec<Q>], m: usize) -> (usize, Vec<BigInt>) {
    let r = rank(a);
    let mut prev = BigInt::one();
    let mut torsion = Vec::new();
    for k in 1..=r {
        let d = minor_gcd(a, k);
        let f = &d / &prev;
        if f > BigInt::one() {
            torsion.push(f);
        }
        prev = d;
    }
    (m - r, torsion)
}

/// Whether the columns of an integer matrix span a saturated sublattice.
pub fn columns_saturated(m: &[Vec<Q>]) -> bool {
    let r = rank(m);
    r == m.first().map_or(0, |row| row.len()) && (r == 0 || minor_gcd(m, r).abs().is_one())
}

pub fn transpose(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>], inner: usize, cols: usize) -> Vec<Vec<Q>> {
    a.iter()
        .map(|r| {
            (0..cols)
                .map(|j| (0..inner).fold(q(0), |s, k| s + &r[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// The commutation system of a stage written out entry by entry. Unknown
/// `(p, i, j)` sits at `offset[p] + i * n_p + j`, objects in stage order.
pub struct NaiveSystem {
    pub rows: Vec<Vec<Q>>,
    pub vars: usize,
    pub offsets: BTreeMap<String, usize>,
    pub sizes: BTreeMap<String, usize>,
}

pub fn naive_system<R: Ring>(rep: &Representation<R>, stage: &Diagram) -> NaiveSystem {
    let mut offsets = BTreeMap::new();
    let mut sizes = BTreeMap::new();
    let mut vars = 0;
    for p in stage.objects() {
        let n = rep.value(p).unwrap();
        offsets.insert(p.clone(), vars);
        sizes.insert(p.clone(), n);
        vars += n * n;
    }
    let mut rows = Vec::new();
    for a in stage.arrows() {
        let t = to_q(rep.matrix(&a.id).unwrap());
        let (np, nq) = (sizes[&a.src], sizes[&a.dst]);
        // (X_q T - T X_p)[i][j] = sum_k X_q[i][k] T[k][j] - sum_k T[i][k] X_p[k][j]
        for i in 0..nq {
            for j in 0..np {
                let mut row = vec![q(0); vars];
                for k in 0..nq {
                    row[offsets[&a.dst] + i * nq + k] += t[k][j].clone();
                }
                for k in 0..np {
                    row[offsets[&a.src] + k * np + j] -= t[i][k].clone();
                }
                rows.push(row);
            }
        }
    }
    NaiveSystem {
        rows,
        vars,
        offsets,
        sizes,
    }
}

impl NaiveSystem {
    pub fn nullity(&self) -> usize {
        self.vars - rank(&self.rows)
    }

    pub fn flatten<R: Ring>(&self, components: impl Fn(&str) -> Matrix<R>) -> Vec<Q> {
        let mut v = vec![q(0); self.vars];
        for (p, &off) in &self.offsets {
            let n = self.sizes[p];
            let m = to_q(&components(p));
            for i in 0..n {
                for j in 0..n {
                    v[off + i * n + j] = m[i][j].clone();
                }
            }
        }
        v
    }

    /// Coordinates belonging to the objects of `smaller`.
    pub fn project(&self, v: &[Q], smaller: &Diagram) -> Vec<Q> {
        let mut out = Vec::new();
        for p in smaller.objects() {
            let (off, n) = (self.offsets[p], self.sizes[p]);
            out.extend_from_slice(&v[off..off + n * n]);
        }
        out
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMat {
    IntMat::from_fn(rows, cols, |_, _| Int::from(rng.gen_range(-bound..=bound)))
}

/// At most 4 objects, at most 5 arrows, ranks at most 4, entries in [-3, 3].
pub fn random_rep(rng: &mut ChaCha8Rng) -> Representation<Int> {
    let n = rng.gen_range(1..=4);
    let objects: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let values: BTreeMap<String, usize> = objects
        .iter()
        .map(|o| (o.clone(), rng.gen_range(0..=4)))
        .collect();
    let mut arrows = Vec::new();
    let mut matrices = BTreeMap::new();
    for k in 0..rng.gen_range(0..=5) {
        let src = objects.choose(rng).unwrap().clone();
        let dst = objects.choose(rng).unwrap().clone();
        let id = format!("a{k}");
        matrices.insert(id.clone(), random_matrix(rng, values[&dst], values[&src], 3));
        arrows.push(Arrow { id, src, dst });
    }
    let d = Diagram::new(objects, arrows, vec![]).unwrap();
    Representation::new(d, values, matrices).unwrap()
}

/// A random subdiagram: some objects and some of the arrows between them.
pub fn random_stage(rng: &mut ChaCha8Rng, d: &Diagram) -> Diagram {
    let mut objects: Vec<String> = d
        .objects()
        .iter()
        .filter(|_| rng.gen_bool(0.7))
        .cloned()
        .collect();
    if objects.is_empty() {
        objects.push(d.objects().choose(rng).unwrap().clone());
    }
    let arrows: Vec<String> = d
        .arrows()
        .iter()
        .filter(|a| objects.contains(&a.src) && objects.contains(&a.dst) && rng.gen_bool(0.8))
        .map(|a| a.id.clone())
        .collect();
    d.subdiagram(&objects, &arrows).unwrap()
}

pub fn edge(id: &str, a: &str, b: &str) -> Edge {
    Edge {
        id: id.into(),
        a: a.into(),
        b: b.into(),
    }
}

/// A random graph on `1..=max_v` vertices with at most `max_e` edges, loops
/// and parallel edges allowed.
pub fn random_graph(rng: &mut ChaCha8Rng, max_v: usize, max_e: usize, prefix: &str) -> Graph {
    let nv = rng.gen_range(1..=max_v);
    let vertices: Vec<String> = (0..nv).map(|i| format!("{prefix}v{i}")).collect();
    let edges = (0..rng.gen_range(0..=max_e))
        .map(|k| {
            edge(
                &format!("{prefix}e{k}"),
                vertices.choose(rng).unwrap(),
                vertices.choose(rng).unwrap(),
            )
        })
        .collect();
    Graph::new(vertices, edges).unwrap()
}

/// A random subcomplex of `inside` (itself a subcomplex of `g`).
pub fn random_subcomplex(rng: &mut ChaCha8Rng, g: &Graph, inside: &Subcomplex, p: f64) -> Subcomplex {
    let vertices: Vec<String> = inside
        .vertices
        .iter()
        .filter(|_| rng.gen_bool(p))
        .cloned()
        .collect();
    let edges: Vec<String> = g
        .edges()
        .iter()
        .filter(|e| {
            inside.edges.contains(&e.id)
                && vertices.contains(&e.a)
                && vertices.contains(&e.b)
                && rng.gen_bool(p)
        })
        .map(|e| e.id.clone())
        .collect();
    Subcomplex::new(&vertices, &edges)
}

/// A random graph `X` with a cellular map `f: X -> target`, built so that
/// every edge has an admissible image.
pub fn random_map_into(rng: &mut ChaCha8Rng, target: &Graph, max_v: usize, max_e: usize) -> (Graph, CellularMap) {
    let nv = rng.gen_range(1..=max_v);
    let vertices: Vec<String> = (0..nv).map(|i| format!("s{i}")).collect();
    let mut f = CellularMap::default();
    for v in &vertices {
        f.vertices
            .insert(v.clone(), target.vertices().choose(rng).unwrap().clone());
    }
    let preimages = |w: &str| -> Vec<String> {
        vertices
            .iter()
            .filter(|v| f.vertices[*v] == w)
            .cloned()
            .collect()
    };
    let mut edges = Vec::new();
    for k in 0..rng.gen_range(0..=max_e) {
        let id = format!("s{k}");
        let candidates: Vec<&Edge> = target
            .edges()
            .iter()
            .filter(|e| !preimages(&e.a).is_empty() && !preimages(&e.b).is_empty())
            .collect();
        if !candidates.is_empty() && rng.gen_bool(0.7) {
            let e = candidates.choose(rng).unwrap();
            let a = preimages(&e.a).choose(rng).unwrap().clone();
            let b = preimages(&e.b).choose(rng).unwrap().clone();
            let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            f.edges.insert(
                id.clone(),
                EdgeImage::Edge {
                    edge: e.id.clone(),
                    reversed: rng.gen_bool(0.5),
                },
            );
            edges.push(edge(&id, &a, &b));
        } else {
            let u = vertices.choose(rng).unwrap().clone();
            let w = preimages(&f.vertices[&u]).choose(rng).unwrap().clone();
            f.edges.insert(
                id.clone(),
                EdgeImage::Vertex {
                    vertex: f.vertices[&u].clone(),
                },
            );
            edges.push(edge(&id, &u, &w));
        }
    }
    (Graph::new(vertices, edges).unwrap(), f)
}

/// The largest subcomplex of `g` that `f` carries into `target_sub`,
/// thinned out at random.
pub fn random_preimage_subcomplex(
    rng: &mut ChaCha8Rng,
    g: &Graph,
    f: &CellularMap,
    target_sub: &Subcomplex,
    inside: &Subcomplex,
) -> Subcomplex {
    let vertices: Vec<String> = g
        .vertices()
        .iter()
        .filter(|v| inside.vertices.contains(*v) && target_sub.vertices.contains(&f.vertices[*v]) && rng.gen_bool(0.8))
        .cloned()
        .collect();
    let edges: Vec<String> = g
        .edges()
        .iter()
        .filter(|e| {
            let lands = match &f.edges[&e.id] {
                EdgeImage::Edge { edge, .. } => target_sub.edges.contains(edge),
                EdgeImage::Vertex { vertex } => target_sub.vertices.contains(vertex),
            };
            inside.edges.contains(&e.id)
                && vertices.contains(&e.a)
                && vertices.contains(&e.b)
                && lands
                && rng.gen_bool(0.8)
        })
        .map(|e| e.id.clone())
        .collect();
    Subcomplex::new(&vertices, &edges)
}

pub fn whole(g: &Graph) -> Subcomplex {
    Subcomplex::whole(g)
}

/// Square with determinant `±1`; the empty matrix counts.
pub fn is_unimodular(m: &[Vec<Q>]) -> bool {
    m.is_empty() || (m.iter().all(|r| r.len() == m.len()) && det(m).abs().is_one())
}
