//! Finite graphs as one-dimensional cell complexes: relative homology,
//! cellular maps, boundary maps of triples and diagrams built from them.

mod builder;
mod maps;

pub use builder::{pi0_representation, GraphDiagram};
pub use maps::{
    boundary_map, collapse_edge, induced_map, les_check, subdivide_edge, CellularMap,
    CellularMapDoc, EdgeImage, LesNode, LesReport, Triple,
};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, solve_matrix, EchelonBasis, FgAbGroup, Int, IntMat};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub a: String,
    pub b: String,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    /// `(tail, head)`: edges run from the larger vertex id to the smaller.
    pub fn oriented(&self) -> (&str, &str) {
        if self.a >= self.b {
            (&self.a, &self.b)
        } else {
            (&self.b, &self.a)
        }
    }
}

/// A finite graph; loops and multiple edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(Error::Invalid(format!("duplicate vertex '{v}'")));
            }
        }
        let mut seen_e = BTreeSet::new();
        for e in &edges {
            if !seen_e.insert(&e.id) {
                return Err(Error::Invalid(format!("duplicate edge '{}'", e.id)));
            }
            for end in [&e.a, &e.b] {
                if !seen.contains(end) {
                    return Err(Error::Invalid(format!(
                        "edge '{}' references unknown vertex '{end}'",
                        e.id
                    )));
                }
            }
        }
        Ok(Graph { vertices, edges })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, v: &str) -> Option<usize> {
        self.vertices.iter().position(|x| x == v)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// The subgraph formed by a subcomplex.
    pub fn subgraph(&self, s: &Subcomplex) -> Graph {
        Graph {
            vertices: self
                .vertices
                .iter()
                .filter(|v| s.vertices.contains(*v))
                .cloned()
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| s.edges.contains(&e.id))
                .cloned()
                .collect(),
        }
    }

    /// Disjoint union with ids prefixed by `0.` and `1.`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let tag = |g: &Graph, t: &str| -> (Vec<String>, Vec<Edge>) {
            (
                g.vertices.iter().map(|v| format!("{t}.{v}")).collect(),
                g.edges
                    .iter()
                    .map(|e| Edge {
                        id: format!("{t}.{}", e.id),
                        a: format!("{t}.{}", e.a),
                        b: format!("{t}.{}", e.b),
                    })
                    .collect(),
            )
        };
        let (mut v, mut e) = tag(self, "0");
        let (v1, e1) = tag(other, "1");
        v.extend(v1);
        e.extend(e1);
        Graph {
            vertices: v,
            edges: e,
        }
    }

    /// Boundary matrix restricted to the cells outside `y`: rows are the
    /// vertices, columns the edges; the boundary of an edge is its head
    /// minus its tail.
    pub fn relative_boundary(&self, y: &Subcomplex) -> IntMat {
        let rows = self.cells_outside(y).0;
        let cols = self.cells_outside(y).1;
        let mut m = IntMat::zeros(rows.len(), cols.len());
        for (c, &ei) in cols.iter().enumerate() {
            let e = &self.edges[ei];
            if e.is_loop() {
                continue;
            }
            let (t, h) = e.oriented();
            for (v, s) in [(t, -1), (h, 1)] {
                let vi = self.vertex_index(v).expect("validated");
                if let Some(r) = rows.iter().position(|&x| x == vi) {
                    m[(r, c)] = m[(r, c)].clone() + Int::from(s);
                }
            }
        }
        m
    }

    /// Indices of the vertices and edges not in `y`.
    pub fn cells_outside(&self, y: &Subcomplex) -> (Vec<usize>, Vec<usize>) {
        (
            (0..self.vertices.len())
                .filter(|&i| !y.vertices.contains(&self.vertices[i]))
                .collect(),
            (0..self.edges.len())
                .filter(|&i| !y.edges.contains(&self.edges[i].id))
                .collect(),
        )
    }
}

/// A set of vertices and edges closed under taking endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Subcomplex {
    #[serde(default)]
    pub vertices: BTreeSet<String>,
    #[serde(default)]
    pub edges: BTreeSet<String>,
}

impl Subcomplex {
    pub fn empty() -> Self {
        Subcomplex::default()
    }

    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[S]) -> Self {
        Subcomplex {
            vertices: vertices.iter().map(|s| s.as_ref().to_string()).collect(),
            edges: edges.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    pub fn whole(g: &Graph) -> Self {
        Subcomplex {
            vertices: g.vertices.iter().cloned().collect(),
            edges: g.edges.iter().map(|e| e.id.clone()).collect(),
        }
    }

    pub fn check_in(&self, g: &Graph) -> Result<()> {
        for v in &self.vertices {
            if g.vertex_index(v).is_none() {
                return Err(Error::Invalid(format!("subcomplex vertex '{v}' is not in the graph")));
            }
        }
        for id in &self.edges {
            let e = g
                .edge(id)
                .ok_or_else(|| Error::Invalid(format!("subcomplex edge '{id}' is not in the graph")))?;
            for end in [&e.a, &e.b] {
                if !self.vertices.contains(end) {
                    return Err(Error::Invalid(format!(
                        "subcomplex contains edge '{id}' but not its endpoint '{end}'"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_subset_of(&self, other: &Subcomplex) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }
}

/// `(X, Y, degree)` with `degree` 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPair {
    pub x: Graph,
    pub y: Subcomplex,
    pub degree: u8,
}

impl GraphPair {
    pub fn new(x: Graph, y: Subcomplex, degree: u8) -> Result<Self> {
        if degree > 1 {
            return Err(Error::Invalid(format!("degree {degree} is not 0 or 1")));
        }
        y.check_in(&x)?;
        Ok(GraphPair { x, y, degree })
    }

    pub fn absolute(x: Graph, degree: u8) -> Result<Self> {
        Self::new(x, Subcomplex::empty(), degree)
    }

    /// `(X + X', Y + Y')` in the same degree.
    pub fn disjoint_union(&self, other: &GraphPair) -> Result<GraphPair> {
        if self.degree != other.degree {
            return Err(Error::Invalid("disjoint union of pairs of different degrees".into()));
        }
        let tag = |s: &Subcomplex, t: &str| Subcomplex {
            vertices: s.vertices.iter().map(|v| format!("{t}.{v}")).collect(),
            edges: s.edges.iter().map(|e| format!("{t}.{e}")).collect(),
        };
        let mut y = tag(&self.y, "0");
        let y1 = tag(&other.y, "1");
        y.vertices.extend(y1.vertices);
        y.edges.extend(y1.edges);
        GraphPair::new(self.x.disjoint_union(&other.x), y, self.degree)
    }

    pub fn homology(&self) -> Homology {
        relative_homology(&self.x, &self.y, self.degree)
    }
}

/// A homology group of a pair with the chain-level data used by induced
/// maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homology {
    /// Relative cycles as columns, over the edges outside `Y`.
    One { cycles: EchelonBasis<Int> },
    /// Projection of relative 0-chains onto the group and a section of it.
    Zero { projection: IntMat, section: IntMat },
}

impl Homology {
    pub fn rank(&self) -> usize {
        match self {
            Homology::One { cycles } => cycles.dim(),
            Homology::Zero { projection, .. } => projection.rows(),
        }
    }

    /// Homology of graphs is free.
    pub fn group(&self) -> FgAbGroup {
        FgAbGroup::free(self.rank())
    }

    pub fn cycle_matrix(&self) -> Option<IntMat> {
        match self {
            Homology::One { cycles } => Some(cycles.rows().transpose()),
            Homology::Zero { .. } => None,
        }
    }
}

/// `H_degree(X, Y)`: the kernel of the relative boundary in degree 1, its
/// cokernel in degree 0.
pub fn relative_homology(x: &Graph, y: &Subcomplex, degree: u8) -> Homology {
    let d = x.relative_boundary(y);
    if degree == 1 {
        Homology::One {
            cycles: kernel_basis(&d),
        }
    } else {
        // the cokernel is free, so a saturated basis of the left kernel
        // projects onto it with kernel the image of the boundary
        let projection = kernel_basis(&d.transpose()).rows().clone();
        let section = solve_matrix(&projection, &IntMat::identity(projection.rows()))
            .expect("shapes agree")
            .expect("a saturated row basis has a right inverse");
        Homology::Zero {
            projection,
            section,
        }
    }
}

/// `{"vertices": [...], "edges": [{"id", "a", "b"}], "Y": {...}, "Z": {...},
/// "degree": 0|1}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(rename = "Y", default)]
    pub y: Subcomplex,
    #[serde(rename = "Z", default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Subcomplex>,
    #[serde(default = "default_degree")]
    pub degree: u8,
}

fn default_degree() -> u8 {
    1
}

impl GraphDoc {
    pub fn graph(&self) -> Result<Graph> {
        Graph::new(self.vertices.clone(), self.edges.clone())
    }

    pub fn pair(&self) -> Result<GraphPair> {
        GraphPair::new(self.graph()?, self.y.clone(), self.degree)
    }

    pub fn triple(&self) -> Result<Triple> {
        Triple::new(
            self.graph()?,
            self.y.clone(),
            self.z.clone().unwrap_or_default(),
        )
    }

    pub fn from_pair(p: &GraphPair) -> Self {
        GraphDoc {
            vertices: p.x.vertices.clone(),
            edges: p.x.edges.clone(),
            y: p.y.clone(),
            z: None,
            degree: p.degree,
        }
    }
}
