//! Combinatorics of right-angled polytopes: facets, adjacency, ideal
//! vertices, faces as cliques of the adjacency graph.

mod cusp;
mod p5;
mod p6;
pub mod quaternion;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplicial::SimplicialComplex;
use crate::state::MoveSystem;

pub use cusp::{build_cusp_section, CuspSection};
pub use p5::{build_p5, p5_sign_vector};
pub use p6::{build_p6, p6_table, symmetries_p6, Symmetry, P6_ROW_COUNT};

pub type FacetId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub id: FacetId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<[i64; 7]>,
}

/// A point at infinity, recorded only through the facets incident to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealVertex {
    pub id: u32,
    pub label: String,
    pub incident: Vec<FacetId>,
}

/// Counts a builder promises; checked by [`f_vector_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredCounts {
    /// `(clique size, count)` pairs.
    pub cliques: Vec<(usize, usize)>,
    pub degree: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Polytope {
    name: String,
    dimension: usize,
    facets: Vec<Facet>,
    adjacency: Vec<FixedBitSet>,
    ideal_vertices: Vec<IdealVertex>,
    moves_hint: Option<MoveSystem>,
    declared: DeclaredCounts,
}

impl Polytope {
    /// Builds a polytope from facets with dense ids `0..n` and an adjacency
    /// list of unordered pairs.
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        facets: Vec<Facet>,
        adjacent_pairs: impl IntoIterator<Item = (FacetId, FacetId)>,
        ideal_vertices: Vec<IdealVertex>,
    ) -> Result<Self> {
        let n = facets.len();
        for (i, f) in facets.iter().enumerate() {
            if f.id as usize != i {
                return Err(Error::input(format!(
                    "facet ids must be 0..{n} in order; found {} at position {i}",
                    f.id
                )));
            }
        }
        let mut labels: Vec<&str> = facets.iter().map(|f| f.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("duplicate facet label {:?}", w[0])));
        }
        let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in adjacent_pairs {
            if a as usize >= n || b as usize >= n {
                return Err(Error::input(format!("adjacency names unknown facet in ({a}, {b})")));
            }
            if a == b {
                return Err(Error::input(format!("facet {a} cannot be adjacent to itself")));
            }
            adjacency[a as usize].insert(b as usize);
            adjacency[b as usize].insert(a as usize);
        }
        for v in &ideal_vertices {
            if let Some(bad) = v.incident.iter().find(|&&f| f as usize >= n) {
                return Err(Error::input(format!(
                    "ideal vertex {:?} names unknown facet {bad}",
                    v.label
                )));
            }
        }
        let ideal_vertices = ideal_vertices
            .into_iter()
            .map(|mut v| {
                v.incident.sort_unstable();
                v.incident.dedup();
                v
            })
            .collect();
        Ok(Polytope {
            name: name.into(),
            dimension,
            facets,
            adjacency,
            ideal_vertices,
            moves_hint: None,
            declared: DeclaredCounts::default(),
        })
    }

    pub fn with_declared(mut self, declared: DeclaredCounts) -> Self {
        self.declared = declared;
        self
    }

    pub fn with_moves_hint(mut self, moves: MoveSystem) -> Self {
        self.moves_hint = Some(moves);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet_ids(&self) -> impl Iterator<Item = FacetId> {
        0..self.facets.len() as FacetId
    }

    pub fn label(&self, id: FacetId) -> &str {
        &self.facets[id as usize].label
    }

    pub fn facet_by_label(&self, label: &str) -> Option<FacetId> {
        let norm = normalize_label(label);
        self.facets
            .iter()
            .find(|f| normalize_label(&f.label) == norm)
            .map(|f| f.id)
    }

    pub fn adjacent(&self, a: FacetId, b: FacetId) -> bool {
        self.adjacency[a as usize].contains(b as usize)
    }

    pub fn neighbours(&self, a: FacetId) -> impl Iterator<Item = FacetId> + '_ {
        self.adjacency[a as usize].ones().map(|i| i as FacetId)
    }

    pub fn degree(&self, a: FacetId) -> usize {
        self.adjacency[a as usize].count_ones(..)
    }

    pub fn ideal_vertices(&self) -> &[IdealVertex] {
        &self.ideal_vertices
    }

    pub fn moves_hint(&self) -> Option<&MoveSystem> {
        self.moves_hint.as_ref()
    }

    pub fn declared(&self) -> &DeclaredCounts {
        &self.declared
    }

    /// Adjacent pairs `(a, b)` with `a < b`.
    pub fn adjacent_pairs(&self) -> Vec<(FacetId, FacetId)> {
        let mut out = Vec::new();
        for a in self.facet_ids() {
            out.extend(self.neighbours(a).filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    /// Whether the facets are pairwise adjacent, so they define a face.
    pub fn is_clique(&self, facets: &[FacetId]) -> bool {
        facets.iter().enumerate().all(|(i, &a)| {
            (a as usize) < self.facet_count()
                && facets[i + 1..].iter().all(|&b| self.adjacent(a, b))
        })
    }

    /// Facets adjacent to every defining facet of `face`: the facets of the
    /// face, seen from `P`.
    pub fn facets_of_face(&self, face: &FaceHandle) -> Vec<FacetId> {
        let mut common = FixedBitSet::with_capacity(self.facet_count());
        common.insert_range(..);
        for &f in face.facets() {
            common.intersect_with(&self.adjacency[f as usize]);
        }
        for &f in face.facets() {
            common.set(f as usize, false);
        }
        common.ones().map(|i| i as FacetId).collect()
    }

    pub fn face_label(&self, face: &FaceHandle) -> String {
        if face.is_polytope() {
            return self.name.clone();
        }
        let labels: Vec<&str> = face.facets().iter().map(|&f| self.label(f)).collect();
        format!("{{{}}}", labels.join(", "))
    }

    pub fn face(&self, facets: impl IntoIterator<Item = FacetId>) -> Result<FaceHandle> {
        let f = FaceHandle::new(facets);
        if !self.is_clique(f.facets()) {
            return Err(Error::input(format!(
                "facets {:?} are not pairwise adjacent",
                f.facets()
            )));
        }
        Ok(f)
    }

    /// Face from facet labels.
    pub fn face_by_labels(&self, labels: &[&str]) -> Result<FaceHandle> {
        let ids = labels
            .iter()
            .map(|l| {
                self.facet_by_label(l)
                    .ok_or_else(|| Error::input(format!("no facet labelled {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.face(ids)
    }
}

fn normalize_label(label: &str) -> String {
    label
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c == '−' { '-' } else { c })
        .collect()
}

/// A face, named by its defining facets. The empty set is the polytope.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaceHandle {
    facets: Vec<FacetId>,
}

impl FaceHandle {
    pub fn new(facets: impl IntoIterator<Item = FacetId>) -> Self {
        let mut facets: Vec<FacetId> = facets.into_iter().collect();
        facets.sort_unstable();
        facets.dedup();
        FaceHandle { facets }
    }

    pub fn polytope() -> Self {
        FaceHandle::default()
    }

    pub fn facets(&self) -> &[FacetId] {
        &self.facets
    }

    pub fn codim(&self) -> usize {
        self.facets.len()
    }

    pub fn is_polytope(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn contains(&self, facet: FacetId) -> bool {
        self.facets.binary_search(&facet).is_ok()
    }

    pub fn with(&self, facet: FacetId) -> FaceHandle {
        FaceHandle::new(self.facets.iter().copied().chain([facet]))
    }
}

/// Lorentzian product with signature `(+,+,+,+,+,+,−)`.
pub fn lorentz(x: &[i64; 7], y: &[i64; 7]) -> i64 {
    x[..6].iter().zip(&y[..6]).map(|(a, b)| a * b).sum::<i64>() - x[6] * y[6]
}

/// Adjacency from unit normals: `i ~ j` iff their Lorentzian product is 0.
pub fn adjacency_from_lorentz(vectors: &[[i64; 7]]) -> Result<Vec<(FacetId, FacetId)>> {
    for (row, v) in vectors.iter().enumerate() {
        let norm = lorentz(v, v);
        if norm != 1 {
            return Err(Error::input(format!(
                "vector in row {row} has Lorentzian self-product {norm}, expected 1"
            )));
        }
    }
    let mut pairs = Vec::new();
    for (a, x) in vectors.iter().enumerate() {
        for (b, y) in vectors.iter().enumerate().skip(a + 1) {
            if lorentz(x, y) == 0 {
                pairs.push((a as FacetId, b as FacetId));
            }
        }
    }
    Ok(pairs)
}

/// All faces of codimension `codim`, i.e. `codim`-cliques, in lexicographic
/// order.
pub fn enumerate_faces(p: &Polytope, codim: usize) -> Vec<FaceHandle> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(codim);
    let mut candidates = FixedBitSet::with_capacity(p.facet_count());
    candidates.insert_range(..);
    extend_cliques(p, codim, &mut current, &candidates, &mut out);
    out
}

fn extend_cliques(
    p: &Polytope,
    size: usize,
    current: &mut Vec<FacetId>,
    candidates: &FixedBitSet,
    out: &mut Vec<FaceHandle>,
) {
    if current.len() == size {
        out.push(FaceHandle {
            facets: current.clone(),
        });
        return;
    }
    for v in candidates.ones() {
        let mut next = candidates.clone();
        next.intersect_with(&p.adjacency[v]);
        next.set_range(..v + 1, false);
        current.push(v as FacetId);
        extend_cliques(p, size, current, &next, out);
        current.pop();
    }
}

/// Every face of every codimension `0..=dim`, grouped by codimension.
pub fn all_faces(p: &Polytope) -> Vec<Vec<FaceHandle>> {
    (0..=p.dimension()).map(|k| enumerate_faces(p, k)).collect()
}

/// The simplicial dual of `face`: vertices are the facets of `P` adjacent to
/// all defining facets, simplices are their cliques.
pub fn dual_complex(p: &Polytope, face: &FaceHandle) -> SimplicialComplex<FacetId> {
    let vertices = p.facets_of_face(face);
    let ids = vertices.clone();
    SimplicialComplex::clique_complex(vertices, |a, b| p.adjacent(ids[a], ids[b]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountCheck {
    pub name: String,
    pub expected: usize,
    pub actual: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FVectorReport {
    /// Number of cliques of each size `0..=dim + 1`.
    pub clique_counts: Vec<usize>,
    pub min_degree: usize,
    pub max_degree: usize,
    pub checks: Vec<CountCheck>,
    pub pass: bool,
}

impl FVectorReport {
    pub fn ensure(&self) -> Result<()> {
        match self.checks.iter().find(|c| !c.pass) {
            None => Ok(()),
            Some(c) => Err(Error::structural(format!(
                "{}: expected {}, found {}",
                c.name, c.expected, c.actual
            ))),
        }
    }
}

/// Counts cliques of every size and checks them against the declared counts
/// and the flagness requirement that no `dim + 1` facets are pairwise
/// adjacent.
pub fn f_vector_check(p: &Polytope) -> FVectorReport {
    let d = p.dimension();
    let clique_counts: Vec<usize> = (0..=d + 1).map(|k| enumerate_faces(p, k).len()).collect();
    let degrees: Vec<usize> = p.facet_ids().map(|f| p.degree(f)).collect();
    let min_degree = degrees.iter().copied().min().unwrap_or(0);
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mut checks = vec![CountCheck {
        name: format!("cliques of size {}", d + 1),
        expected: 0,
        actual: clique_counts[d + 1],
        pass: clique_counts[d + 1] == 0,
    }];
    for &(size, expected) in &p.declared.cliques {
        let actual = clique_counts.get(size).copied().unwrap_or(0);
        checks.push(CountCheck {
            name: format!("cliques of size {size}"),
            expected,
            actual,
            pass: actual == expected,
        });
    }
    if let Some(expected) = p.declared.degree {
        for (actual, name) in [(min_degree, "minimum degree"), (max_degree, "maximum degree")] {
            checks.push(CountCheck {
                name: name.to_string(),
                expected,
                actual,
                pass: actual == expected,
            });
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    FVectorReport {
        clique_counts,
        min_degree,
        max_degree,
        checks,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polytope {
        let facets = (0..4)
            .map(|i| Facet {
                id: i,
                label: format!("f{i}"),
                vector: None,
            })
            .collect();
        Polytope::new("square", 2, facets, [(0, 1), (1, 2), (2, 3), (3, 0)], vec![]).unwrap()
    }

    #[test]
    fn faces_of_a_square() {
        let p = square();
        assert_eq!(enumerate_faces(&p, 0), vec![FaceHandle::polytope()]);
        assert_eq!(enumerate_faces(&p, 1).len(), 4);
        assert_eq!(enumerate_faces(&p, 2).len(), 4);
        assert!(enumerate_faces(&p, 3).is_empty());
        let r = f_vector_check(&p);
        assert_eq!(r.clique_counts, vec![1, 4, 4, 0]);
        assert!(r.pass);
        let edge = FaceHandle::new([1]);
        assert_eq!(p.facets_of_face(&edge), vec![0, 2]);
        assert_eq!(dual_complex(&p, &edge).f_vector(), vec![2]);
        assert_eq!(dual_complex(&p, &FaceHandle::polytope()).f_vector(), vec![4, 4]);
    }

    #[test]
    fn rejects_bad_input() {
        let f = |id| Facet {
            id,
            label: "x".into(),
            vector: None,
        };
        assert!(Polytope::new("p", 1, vec![f(1)], [], vec![]).is_err());
        assert!(Polytope::new("p", 1, vec![f(0), f(1)], [], vec![]).is_err());
        let mut p = square();
        p.declared.cliques.push((2, 5));
        assert!(f_vector_check(&p).ensure().is_err());
    }

    #[test]
    fn lorentz_rejects_non_unit_rows() {
        let err = adjacency_from_lorentz(&[[0, 0, 0, 0, 0, -1, 0], [1, 1, 0, 0, 0, 0, 0]])
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 1"), "{err}");
    }

    #[test]
    fn face_handle_normalizes() {
        let f = FaceHandle::new([3, 1, 3]);
        assert_eq!(f.facets(), &[1, 3]);
        assert_eq!(f.codim(), 2);
        assert_eq!(f.with(2).facets(), &[1, 2, 3]);
    }
}
