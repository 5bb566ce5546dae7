use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{relative_homology, Edge, Graph, GraphPair, Homology, Subcomplex};
use crate::error::{Error, Result};
use crate::linalg::{image_basis, kernel_basis, Int, IntMat};

/// Where an edge goes: onto an edge (with a sign that only matters when the
/// target is a loop) or onto a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeImage {
    Edge {
        edge: String,
        #[serde(default)]
        reversed: bool,
    },
    Vertex {
        vertex: String,
    },
}

/// A cellular map of graphs given on vertex and edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CellularMap {
    pub vertices: BTreeMap<String, String>,
    pub edges: BTreeMap<String, EdgeImage>,
}

pub type CellularMapDoc = CellularMap;

impl CellularMap {
    /// The identity on the cells of `g`, viewed as a map into any graph
    /// containing them.
    pub fn inclusion(g: &Graph) -> Self {
        CellularMap {
            vertices: g.vertices().iter().map(|v| (v.clone(), v.clone())).collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| {
                    (
                        e.id.clone(),
                        EdgeImage::Edge {
                            edge: e.id.clone(),
                            reversed: false,
                        },
                    )
                })
                .collect(),
        }
    }

    /// `self: source -> middle` followed by `g: middle -> target`.
    pub fn then(&self, g: &CellularMap, source: &Graph, middle: &Graph, target: &Graph) -> Result<CellularMap> {
        let mut out = CellularMap::default();
        for v in source.vertices() {
            out.vertices.insert(v.clone(), g.vertex_image(self.vertex_image(v)?)?.to_string());
        }
        for e in source.edges() {
            let composed = match self.edge_image(e, middle)? {
                None => {
                    let (t, _) = e.oriented();
                    EdgeImage::Vertex {
                        vertex: out.vertices[t].clone(),
                    }
                }
                Some((i, s1)) => match g.edge_image(&middle.edges()[i], target)? {
                    None => EdgeImage::Vertex {
                        vertex: out.vertices[e.oriented().0].clone(),
                    },
                    Some((j, s2)) => EdgeImage::Edge {
                        edge: target.edges()[j].id.clone(),
                        reversed: s1 * s2 < 0,
                    },
                },
            };
            out.edges.insert(e.id.clone(), composed);
        }
        Ok(out)
    }

    fn vertex_image<'a>(&'a self, v: &str) -> Result<&'a str> {
        self.vertices
            .get(v)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::Invalid(format!("vertex '{v}' is not mapped")))
    }

    /// Target edge index and sign of an edge, or `None` when it collapses.
    fn edge_image(&self, e: &Edge, target: &Graph) -> Result<Option<(usize, i64)>> {
        let img = self
            .edges
            .get(&e.id)
            .ok_or_else(|| Error::Invalid(format!("edge '{}' is not mapped", e.id)))?;
        let (t, h) = e.oriented();
        let (ft, fh) = (self.vertex_image(t)?, self.vertex_image(h)?);
        match img {
            EdgeImage::Vertex { vertex } => {
                if ft != vertex || fh != vertex {
                    return Err(Error::Invalid(format!(
                        "edge '{}' collapses to '{vertex}' but its endpoints go to '{ft}' and '{fh}'",
                        e.id
                    )));
                }
                Ok(None)
            }
            EdgeImage::Edge { edge, reversed } => {
                let idx = target
                    .edges()
                    .iter()
                    .position(|x| &x.id == edge)
                    .ok_or_else(|| Error::Invalid(format!("edge '{}' maps to unknown edge '{edge}'", e.id)))?;
                let te = &target.edges()[idx];
                let (tt, th) = te.oriented();
                let sign = if te.is_loop() {
                    if ft != tt || fh != tt {
                        return Err(Error::Invalid(format!(
                            "edge '{}' maps onto loop '{edge}' but its endpoints do not",
                            e.id
                        )));
                    }
                    if *reversed {
                        -1
                    } else {
                        1
                    }
                } else if (ft, fh) == (tt, th) {
                    1
                } else if (ft, fh) == (th, tt) {
                    -1
                } else {
                    return Err(Error::Invalid(format!(
                        "edge '{}' maps onto '{edge}' but its endpoints do not",
                        e.id
                    )));
                };
                Ok(Some((idx, sign)))
            }
        }
    }

    /// Checks incidence and that `src.y` lands in `tgt.y`.
    pub fn validate(&self, src: &Graph, src_y: &Subcomplex, tgt: &Graph, tgt_y: &Subcomplex) -> Result<()> {
        for v in src.vertices() {
            let w = self.vertex_image(v)?;
            if tgt.vertex_index(w).is_none() {
                return Err(Error::Invalid(format!("vertex '{v}' maps to unknown vertex '{w}'")));
            }
            if src_y.vertices.contains(v) && !tgt_y.vertices.contains(w) {
                return Err(Error::Invalid(format!("vertex '{v}' of the subcomplex leaves the target subcomplex")));
            }
        }
        for e in src.edges() {
            let img = self.edge_image(e, tgt)?;
            if src_y.edges.contains(&e.id) {
                let inside = match img {
                    Some((i, _)) => tgt_y.edges.contains(&tgt.edges()[i].id),
                    None => true,
                };
                if !inside {
                    return Err(Error::Invalid(format!(
                        "edge '{}' of the subcomplex leaves the target subcomplex",
                        e.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Chain maps on all vertices and all edges.
    pub fn chain_maps(&self, src: &Graph, tgt: &Graph) -> Result<(IntMat, IntMat)> {
        let mut f0 = IntMat::zeros(tgt.vertices().len(), src.vertices().len());
        for (j, v) in src.vertices().iter().enumerate() {
            let w = self.vertex_image(v)?;
            let i = tgt
                .vertex_index(w)
                .ok_or_else(|| Error::Invalid(format!("vertex '{v}' maps to unknown vertex '{w}'")))?;
            f0[(i, j)] = Int::from(1);
        }
        let mut f1 = IntMat::zeros(tgt.edges().len(), src.edges().len());
        for (j, e) in src.edges().iter().enumerate() {
            if let Some((i, s)) = self.edge_image(e, tgt)? {
                f1[(i, j)] = Int::from(s);
            }
        }
        Ok((f0, f1))
    }
}

fn lift(cols: &[usize], total: usize, v: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::from(0); total];
    for (x, &c) in v.iter().zip(cols) {
        out[c] = x.clone();
    }
    out
}

fn restrict(cols: &[usize], v: &[Int]) -> Vec<Int> {
    cols.iter().map(|&c| v[c].clone()).collect()
}

/// Matrix of `f_*` on the chosen homology bases of the two pairs (in the
/// degree of `src`).
pub fn induced_map(f: &CellularMap, src: &GraphPair, tgt: &GraphPair) -> Result<IntMat> {
    if src.degree != tgt.degree {
        return Err(Error::Invalid("pairs of different degrees".into()));
    }
    f.validate(&src.x, &src.y, &tgt.x, &tgt.y)?;
    let (f0, f1) = f.chain_maps(&src.x, &tgt.x)?;
    let (sv, se) = src.x.cells_outside(&src.y);
    let (tv, te) = tgt.x.cells_outside(&tgt.y);
    match (src.homology(), tgt.homology()) {
        (Homology::One { cycles }, Homology::One { cycles: target }) => {
            let cols = cycles
                .vectors()
                .iter()
                .map(|z| {
                    let image = f1.mul_vec(&lift(&se, src.x.edges().len(), z));
                    target
                        .coords(&restrict(&te, &image))
                        .ok_or_else(|| Error::Internal("image of a cycle is not a cycle".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(IntMat::from_columns(target.dim(), &cols))
        }
        (Homology::Zero { section, .. }, Homology::Zero { projection, .. }) => {
            let cols: Vec<Vec<Int>> = section
                .columns()
                .iter()
                .map(|s| {
                    let image = f0.mul_vec(&lift(&sv, src.x.vertices().len(), s));
                    projection.mul_vec(&restrict(&tv, &image))
                })
                .collect();
            Ok(IntMat::from_columns(projection.rows(), &cols))
        }
        _ => unreachable!("degrees agree"),
    }
}

/// `Z ⊆ Y ⊆ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub x: Graph,
    pub y: Subcomplex,
    pub z: Subcomplex,
}

impl Triple {
    pub fn new(x: Graph, y: Subcomplex, z: Subcomplex) -> Result<Self> {
        y.check_in(&x)?;
        z.check_in(&x)?;
        if !z.is_subset_of(&y) {
            return Err(Error::Invalid("Z is not contained in Y".into()));
        }
        Ok(Triple { x, y, z })
    }

    pub fn y_graph(&self) -> Graph {
        self.x.subgraph(&self.y)
    }

    /// `(X, Y, 1)`
    pub fn top(&self) -> GraphPair {
        GraphPair {
            x: self.x.clone(),
            y: self.y.clone(),
            degree: 1,
        }
    }

    /// `(Y, Z, 0)`
    pub fn bottom(&self) -> GraphPair {
        GraphPair {
            x: self.y_graph(),
            y: self.z.clone(),
            degree: 0,
        }
    }

    fn pair(&self, x: Graph, y: &Subcomplex, degree: u8) -> GraphPair {
        GraphPair {
            x,
            y: y.clone(),
            degree,
        }
    }
}

/// `H_1(X, Y) -> H_0(Y, Z)`: lift a relative cycle to a chain of `X`, take
/// its boundary, which lies in `Y`, and project.
pub fn boundary_map(t: &Triple) -> Result<IntMat> {
    let top = relative_homology(&t.x, &t.y, 1);
    let yg = t.y_graph();
    let Homology::Zero { projection, .. } = relative_homology(&yg, &t.z, 0) else {
        unreachable!("degree 0")
    };
    let Homology::One { cycles } = top else {
        unreachable!("degree 1")
    };
    let full = t.x.relative_boundary(&Subcomplex::empty());
    let (_, se) = t.x.cells_outside(&t.y);
    let (yv, _) = yg.cells_outside(&t.z);
    let cols = cycles
        .vectors()
        .iter()
        .map(|z| {
            let b = full.mul_vec(&lift(&se, t.x.edges().len(), z));
            for (i, v) in t.x.vertices().iter().enumerate() {
                if !t.y.vertices.contains(v) && b[i] != Int::from(0) {
                    return Err(Error::Internal("boundary of a relative cycle leaves Y".into()));
                }
            }
            let in_y: Vec<Int> = t
                .x
                .vertices()
                .iter()
                .enumerate()
                .filter(|(_, v)| t.y.vertices.contains(*v))
                .map(|(i, _)| b[i].clone())
                .collect();
            Ok(projection.mul_vec(&restrict(&yv, &in_y)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMat::from_columns(projection.rows(), &cols))
}

/// Exactness at one term of the long exact sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesNode {
    pub name: String,
    pub rank: usize,
    #[serde(rename = "imageRank")]
    pub image_rank: usize,
    #[serde(rename = "kernelRank")]
    pub kernel_rank: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesReport {
    pub nodes: Vec<LesNode>,
    pub pass: bool,
}

/// Checks `H1(Y,Z) -> H1(X,Z) -> H1(X,Y) -> H0(Y,Z) -> H0(X,Z) -> H0(X,Y) -> 0`
/// by comparing image and kernel lattices at every term.
pub fn les_check(t: &Triple) -> Result<LesReport> {
    let yg = t.y_graph();
    let yz = |d| t.pair(yg.clone(), &t.z, d);
    let xz = |d| t.pair(t.x.clone(), &t.z, d);
    let xy = |d| t.pair(t.x.clone(), &t.y, d);
    let incl_y = CellularMap::inclusion(&yg);
    let id_x = CellularMap::inclusion(&t.x);
    let maps = [
        induced_map(&incl_y, &yz(1), &xz(1))?,
        induced_map(&id_x, &xz(1), &xy(1))?,
        boundary_map(t)?,
        induced_map(&incl_y, &yz(0), &xz(0))?,
        induced_map(&id_x, &xz(0), &xy(0))?,
    ];
    let names = ["H1(Y,Z)", "H1(X,Z)", "H1(X,Y)", "H0(Y,Z)", "H0(X,Z)", "H0(X,Y)"];
    let ranks: Vec<usize> = std::iter::once(maps[0].cols())
        .chain(maps.iter().map(|m| m.rows()))
        .collect();
    let mut nodes = Vec::new();
    for k in 0..6 {
        let incoming = if k == 0 {
            IntMat::zeros(ranks[0], 0)
        } else {
            maps[k - 1].clone()
        };
        let outgoing = if k == 5 {
            IntMat::zeros(0, ranks[5])
        } else {
            maps[k].clone()
        };
        let image = image_basis(&incoming);
        let kernel = kernel_basis(&outgoing);
        nodes.push(LesNode {
            name: names[k].to_string(),
            rank: ranks[k],
            image_rank: image.dim(),
            kernel_rank: kernel.dim(),
            exact: image == kernel,
        });
    }
    let pass = nodes.iter().all(|n| n.exact);
    Ok(LesReport { nodes, pass })
}

/// Contracts a non-loop edge. The edge must lie in `Y` or have at most one
/// endpoint in `Y`. Returns the new pair and the quotient map.
pub fn collapse_edge(p: &GraphPair, edge: &str) -> Result<(GraphPair, CellularMap)> {
    let e = p
        .x
        .edge(edge)
        .ok_or_else(|| Error::Invalid(format!("unknown edge '{edge}'")))?
        .clone();
    if e.is_loop() {
        return Err(Error::Invalid(format!("edge '{edge}' is a loop")));
    }
    let in_y = p.y.edges.contains(edge);
    let (a_in, b_in) = (p.y.vertices.contains(&e.a), p.y.vertices.contains(&e.b));
    if !in_y && a_in && b_in {
        return Err(Error::Invalid(format!(
            "edge '{edge}' is outside Y but both endpoints are in Y"
        )));
    }
    // keep the endpoint in Y if there is one
    let (keep, gone) = if b_in && !a_in { (&e.b, &e.a) } else { (&e.a, &e.b) };
    let rename = |v: &String| if v == gone { keep.clone() } else { v.clone() };
    let vertices: Vec<String> = p.x.vertices().iter().filter(|v| *v != gone).cloned().collect();
    let edges: Vec<Edge> = p
        .x
        .edges()
        .iter()
        .filter(|x| x.id != e.id)
        .map(|x| Edge {
            id: x.id.clone(),
            a: rename(&x.a),
            b: rename(&x.b),
        })
        .collect();
    let mut y = p.y.clone();
    y.edges.remove(edge);
    if y.vertices.remove(gone) {
        y.vertices.insert(keep.clone());
    }
    let x = Graph::new(vertices, edges)?;
    let mut f = CellularMap::inclusion(&p.x);
    f.vertices.insert(gone.clone(), keep.clone());
    f.edges.insert(
        e.id.clone(),
        EdgeImage::Vertex {
            vertex: keep.clone(),
        },
    );
    Ok((GraphPair::new(x, y, p.degree)?, f))
}

/// Splits an edge at a new midpoint. Returns the subdivided pair and the map
/// back to `p` that runs the first half over the edge and collapses the
/// second half onto the head.
pub fn subdivide_edge(p: &GraphPair, edge: &str) -> Result<(GraphPair, CellularMap)> {
    let e = p
        .x
        .edge(edge)
        .ok_or_else(|| Error::Invalid(format!("unknown edge '{edge}'")))?
        .clone();
    let mut mid = format!("{edge}.mid");
    while p.x.vertex_index(&mid).is_some() {
        mid.push('\'');
    }
    let (t, h) = e.oriented();
    let (t, h) = (t.to_string(), h.to_string());
    let first = Edge {
        id: format!("{edge}.0"),
        a: t.clone(),
        b: mid.clone(),
    };
    let second = Edge {
        id: format!("{edge}.1"),
        a: mid.clone(),
        b: h.clone(),
    };
    let mut vertices = p.x.vertices().to_vec();
    vertices.push(mid.clone());
    let mut edges: Vec<Edge> = p.x.edges().iter().filter(|x| x.id != e.id).cloned().collect();
    edges.push(first.clone());
    edges.push(second.clone());
    let mut y = p.y.clone();
    if y.edges.remove(edge) {
        y.vertices.insert(mid.clone());
        y.edges.insert(first.id.clone());
        y.edges.insert(second.id.clone());
    }
    let x = Graph::new(vertices, edges)?;
    let mut f = CellularMap::inclusion(&p.x);
    f.vertices.insert(mid.clone(), h.clone());
    f.edges.remove(edge);
    // on a loop the first half must run the same way as the loop
    let reversed = e.is_loop() && first.oriented().0 != t;
    f.edges.insert(
        first.id.clone(),
        EdgeImage::Edge {
            edge: e.id.clone(),
            reversed,
        },
    );
    f.edges.insert(second.id.clone(), EdgeImage::Vertex { vertex: h });
    Ok((GraphPair::new(x, y, p.degree)?, f))
}

#[cfg(test)]
mod tests {
    use super::super::tests::graph;
    use super::*;

    fn pair(g: Graph, y: Subcomplex, d: u8) -> GraphPair {
        GraphPair::new(g, y, d).unwrap()
    }

    #[test]
    fn identity_induces_identity() {
        let t = graph(&["a", "b"], &[("e0", "a", "b"), ("e1", "a", "b"), ("e2", "b", "a")]);
        let p = pair(t.clone(), Subcomplex::empty(), 1);
        let id = CellularMap::inclusion(&t);
        assert_eq!(induced_map(&id, &p, &p).unwrap(), IntMat::identity(2));
        let p0 = pair(t, Subcomplex::empty(), 0);
        assert_eq!(induced_map(&id, &p0, &p0).unwrap(), IntMat::identity(1));
    }

    #[test]
    fn degree_two_map_of_the_circle() {
        let circle = graph(&["c"], &[("l", "c", "c")]);
        let sub = graph(&["v", "w"], &[("e0", "v", "w"), ("e1", "w", "v")]);
        let mut f = CellularMap::default();
        f.vertices.insert("v".into(), "c".into());
        f.vertices.insert("w".into(), "c".into());
        f.edges.insert("e0".into(), EdgeImage::Edge { edge: "l".into(), reversed: false });
        f.edges.insert("e1".into(), EdgeImage::Edge { edge: "l".into(), reversed: true });
        let m = induced_map(
            &f,
            &pair(sub, Subcomplex::empty(), 1),
            &pair(circle, Subcomplex::empty(), 1),
        )
        .unwrap();
        assert_eq!(m.entries()[0].magnitude(), Int::from(2).magnitude());
    }

    #[test]
    fn collapsing_an_interval() {
        let i = graph(&["v0", "v1"], &[("e", "v0", "v1")]);
        let y = Subcomplex::new(&["v0", "v1"], &[]);
        let src = pair(i, y, 1);
        let point = graph(&["p"], &[]);
        let mut f = CellularMap::default();
        f.vertices.insert("v0".into(), "p".into());
        f.vertices.insert("v1".into(), "p".into());
        f.edges.insert("e".into(), EdgeImage::Vertex { vertex: "p".into() });
        let tgt = pair(point, Subcomplex::new(&["p"], &[]), 1);
        let m = induced_map(&f, &src, &tgt).unwrap();
        assert_eq!(m.shape(), (0, 1));
    }

    #[test]
    fn boundary_of_the_interval() {
        let i = graph(&["v0", "v1"], &[("e", "v0", "v1")]);
        let t = Triple::new(i.clone(), Subcomplex::new(&["v0", "v1"], &[]), Subcomplex::empty()).unwrap();
        assert_eq!(boundary_map(&t).unwrap(), IntMat::from_i64_rows(&[&[1], &[-1]]));
        let absolute = Triple::new(i.clone(), Subcomplex::empty(), Subcomplex::empty()).unwrap();
        assert!(boundary_map(&absolute).unwrap().is_zero());
        let y = Subcomplex::new(&["v0", "v1"], &[]);
        let same = Triple::new(i, y.clone(), y).unwrap();
        assert_eq!(boundary_map(&same).unwrap().rows(), 0);
    }

    #[test]
    fn exactness_examples() {
        let i = graph(&["v0", "v1"], &[("e", "v0", "v1")]);
        let t = Triple::new(
            i.clone(),
            Subcomplex::new(&["v0", "v1"], &[]),
            Subcomplex::new(&["v0"], &[]),
        )
        .unwrap();
        let r = les_check(&t).unwrap();
        assert!(r.pass, "{r:?}");
        let y = Subcomplex::new(&["v0"], &[]);
        assert!(les_check(&Triple::new(i, y.clone(), y).unwrap()).unwrap().pass);
        let theta = graph(&["a", "b", "c"], &[("e0", "a", "b"), ("e1", "a", "b"), ("e2", "b", "c"), ("l", "c", "c")]);
        let t = Triple::new(
            theta,
            Subcomplex::new(&["a", "b", "c"], &["e0"]),
            Subcomplex::new(&["c"], &[]),
        )
        .unwrap();
        assert!(les_check(&t).unwrap().pass);
    }

    #[test]
    fn collapse_and_subdivide_preserve_homology() {
        let g = graph(&["a", "b", "c"], &[("e0", "a", "b"), ("e1", "b", "c"), ("e2", "c", "a"), ("l", "b", "b")]);
        let p = pair(g, Subcomplex::new(&["a"], &[]), 1);
        for e in ["e0", "e1", "e2"] {
            let (q, f) = collapse_edge(&p, e).unwrap();
            let m = induced_map(&f, &p, &q).unwrap();
            assert!(m.is_square());
            assert_eq!(m.det().magnitude(), Int::from(1).magnitude());
            let (s, back) = subdivide_edge(&p, e).unwrap();
            let m = induced_map(&back, &s, &p).unwrap();
            assert_eq!(m.det().magnitude(), Int::from(1).magnitude());
        }
        let (s, back) = subdivide_edge(&p, "l").unwrap();
        let m = induced_map(&back, &s, &p).unwrap();
        assert_eq!(m.det().magnitude(), Int::from(1).magnitude());
        let both = pair(p.x.clone(), Subcomplex::new(&["a", "b"], &[]), 1);
        assert!(collapse_edge(&both, "e0").is_err());
    }

    #[test]
    fn invalid_maps_are_rejected() {
        let i = graph(&["v0", "v1"], &[("e", "v0", "v1")]);
        let mut f = CellularMap::inclusion(&i);
        f.edges.insert("e".into(), EdgeImage::Vertex { vertex: "v0".into() });
        let p = pair(i, Subcomplex::empty(), 1);
        assert!(induced_map(&f, &p, &p).is_err());
    }
}
