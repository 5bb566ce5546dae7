use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use super::maps::{boundary_map, induced_map, CellularMap, Triple};
use super::{Graph, GraphPair};
use crate::diagram::{Arrow, CoproductEntry, Diagram, Representation};
use crate::error::{Error, Result};
use crate::linalg::{Int, IntMat};

/// Collects graph pairs, cellular maps and triple boundaries into a
/// representation of the resulting diagram on homology.
#[derive(Clone, Debug, Default)]
pub struct GraphDiagram {
    objects: Vec<(String, GraphPair)>,
    arrows: Vec<(Arrow, IntMat)>,
    coproducts: Vec<CoproductEntry>,
}

impl GraphDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pair(&self, name: &str) -> Option<&GraphPair> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    /// Adds an object; re-adding the same pair under the same name is a no-op.
    pub fn add_pair(&mut self, name: &str, pair: GraphPair) -> Result<()> {
        match self.pair(name) {
            Some(p) if *p == pair => Ok(()),
            Some(_) => Err(Error::Invalid(format!("object '{name}' already holds another pair"))),
            None => {
                self.objects.push((name.to_string(), pair));
                Ok(())
            }
        }
    }

    fn add_arrow(&mut self, id: &str, src: &str, dst: &str, m: IntMat) -> Result<()> {
        if self.arrows.iter().any(|(a, _)| a.id == id) {
            return Err(Error::Invalid(format!("duplicate arrow '{id}'")));
        }
        self.arrows.push((
            Arrow {
                id: id.to_string(),
                src: src.to_string(),
                dst: dst.to_string(),
            },
            m,
        ));
        Ok(())
    }

    fn get(&self, name: &str) -> Result<&GraphPair> {
        self.pair(name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn add_map(&mut self, id: &str, src: &str, dst: &str, f: &CellularMap) -> Result<()> {
        let m = induced_map(f, self.get(src)?, self.get(dst)?)?;
        self.add_arrow(id, src, dst, m)
    }

    /// Adds `(X, Y, 1)` as `top`, `(Y, Z, 0)` as `bottom` and the connecting
    /// map between them as `delta`.
    pub fn add_triple(&mut self, top: &str, bottom: &str, delta: &str, t: &Triple) -> Result<()> {
        self.add_pair(top, t.top())?;
        self.add_pair(bottom, t.bottom())?;
        self.add_arrow(delta, top, bottom, boundary_map(t)?)
    }

    /// Adds the disjoint union `p+q` with its two inclusions and records it as
    /// a coproduct. Returns the name of the new object.
    pub fn add_coproduct(&mut self, p: &str, q: &str) -> Result<String> {
        let (a, b) = (self.get(p)?.clone(), self.get(q)?.clone());
        let sum = format!("{p}+{q}");
        let u = a.disjoint_union(&b)?;
        self.add_pair(&sum, u.clone())?;
        let (i, i_prime) = (format!("in0({sum})"), format!("in1({sum})"));
        for (id, side, pair, prefix) in [(&i, p, &a, "0."), (&i_prime, q, &b, "1.")] {
            let f = prefixed_inclusion(&pair.x, prefix);
            let m = induced_map(&f, pair, &u)?;
            self.add_arrow(id, side, &sum, m)?;
        }
        self.coproducts.push(CoproductEntry {
            p: p.to_string(),
            q: q.to_string(),
            sum: sum.clone(),
            i,
            i_prime,
        });
        Ok(sum)
    }

    pub fn diagram(&self) -> Result<Diagram> {
        Diagram::new(
            self.objects.iter().map(|(n, _)| n.clone()).collect(),
            self.arrows.iter().map(|(a, _)| a.clone()).collect(),
            self.coproducts.clone(),
        )
    }

    pub fn representation(&self) -> Result<Representation<Int>> {
        let values = self
            .objects
            .iter()
            .map(|(n, p)| (n.clone(), p.homology().rank()))
            .collect();
        let matrices = self
            .arrows
            .iter()
            .map(|(a, m)| (a.id.clone(), m.clone()))
            .collect();
        Representation::new(self.diagram()?, values, matrices)
    }
}

fn prefixed_inclusion(g: &Graph, prefix: &str) -> CellularMap {
    let mut f = CellularMap::inclusion(g);
    for v in f.vertices.values_mut() {
        *v = format!("{prefix}{v}");
    }
    for img in f.edges.values_mut() {
        if let super::EdgeImage::Edge { edge, .. } = img {
            *edge = format!("{prefix}{edge}");
        }
    }
    f
}

/// Connected components of `X` not meeting `Y`, listed by their first vertex.
fn free_components(p: &GraphPair) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = p.x.vertices().len();
    let mut uf = UnionFind::<usize>::new(n);
    for e in p.x.edges() {
        let a = p.x.vertex_index(&e.a).expect("validated");
        let b = p.x.vertex_index(&e.b).expect("validated");
        uf.union(a, b);
    }
    let labels = uf.into_labeling();
    let mut dead = vec![false; n];
    for v in &p.y.vertices {
        dead[labels[p.x.vertex_index(v).expect("validated")]] = true;
    }
    let mut firsts = Vec::new();
    let mut index_of_root = vec![None; n];
    for v in 0..n {
        let r = labels[v];
        if !dead[r] && index_of_root[r].is_none() {
            index_of_root[r] = Some(firsts.len());
            firsts.push(v);
        }
    }
    let component = (0..n).map(|v| index_of_root[labels[v]]).collect();
    (firsts, component)
}

/// The same diagram shape in degree 0, computed from connected components
/// only, as a cross-check on the linear-algebra route.
pub fn pi0_representation(
    pairs: &[(String, GraphPair)],
    maps: &[(String, String, String, CellularMap)],
) -> Result<Representation<Int>> {
    let mut comps = BTreeMap::new();
    for (n, p) in pairs {
        if p.degree != 0 {
            return Err(Error::Invalid(format!("'{n}' is not a degree-0 pair")));
        }
        comps.insert(n.clone(), free_components(p));
    }
    let find = |n: &str| {
        pairs
            .iter()
            .find(|(m, _)| m == n)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::UnknownObject(n.to_string()))
    };
    let mut matrices = BTreeMap::new();
    let mut arrows = Vec::new();
    for (id, src, dst, f) in maps {
        let (s, t) = (find(src)?, find(dst)?);
        f.validate(&s.x, &s.y, &t.x, &t.y)?;
        let (firsts, _) = &comps[src];
        let (tfirsts, tcomp) = &comps[dst];
        let mut m = IntMat::zeros(tfirsts.len(), firsts.len());
        for (j, &v) in firsts.iter().enumerate() {
            let w = &f.vertices[&s.x.vertices()[v]];
            if let Some(i) = tcomp[t.x.vertex_index(w).expect("validated")] {
                m[(i, j)] = Int::from(1);
            }
        }
        matrices.insert(id.clone(), m);
        arrows.push(Arrow {
            id: id.clone(),
            src: src.clone(),
            dst: dst.clone(),
        });
    }
    let values = comps.iter().map(|(n, (f, _))| (n.clone(), f.len())).collect();
    let diagram = Diagram::new(pairs.iter().map(|(n, _)| n.clone()).collect(), arrows, vec![])?;
    Representation::new(diagram, values, matrices)
}

#[cfg(test)]
mod tests {
    use super::super::tests::graph;
    use super::super::Subcomplex;
    use super::*;

    #[test]
    fn triple_and_coproduct() {
        let i = graph(&["v0", "v1"], &[("e", "v0", "v1")]);
        let t = Triple::new(i, Subcomplex::new(&["v0", "v1"], &[]), Subcomplex::empty()).unwrap();
        let mut d = GraphDiagram::new();
        d.add_triple("I", "ends", "delta", &t).unwrap();
        let sum = d.add_coproduct("ends", "ends").unwrap();
        let rep = d.representation().unwrap();
        assert_eq!(rep.value("I").unwrap(), 1);
        assert_eq!(rep.value("ends").unwrap(), 2);
        assert_eq!(rep.value(&sum).unwrap(), 4);
        assert_eq!(rep.matrix("delta").unwrap(), &IntMat::from_i64_rows(&[&[1], &[-1]]));
        assert!(GraphDiagram::new().representation().unwrap().diagram().objects().is_empty());
    }

    #[test]
    fn components_match_degree_zero_homology() {
        let g = graph(&["a", "b", "c", "d", "e"], &[("x", "a", "b"), ("y", "d", "e"), ("l", "c", "c")]);
        let p = GraphPair::new(g.clone(), Subcomplex::new(&["e"], &[]), 0).unwrap();
        let q = GraphPair::new(g.clone(), Subcomplex::empty(), 0).unwrap();
        let mut f = CellularMap::inclusion(&g);
        f.vertices.insert("b".into(), "b".into());
        let pairs = vec![("q".to_string(), q.clone()), ("p".to_string(), p.clone())];
        let maps = vec![("id".to_string(), "q".to_string(), "p".to_string(), f.clone())];
        let pi0 = pi0_representation(&pairs, &maps).unwrap();
        let mut d = GraphDiagram::new();
        d.add_pair("q", q).unwrap();
        d.add_pair("p", p).unwrap();
        d.add_map("id", "q", "p", &f).unwrap();
        let h0 = d.representation().unwrap();
        assert_eq!(pi0.value("q").unwrap(), h0.value("q").unwrap());
        assert_eq!(pi0.value("p").unwrap(), 2);
        assert_eq!(pi0.matrix("id").unwrap(), h0.matrix("id").unwrap());
    }
}
