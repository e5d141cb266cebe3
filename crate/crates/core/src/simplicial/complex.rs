use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use fixedbitset::FixedBitSet;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex labels are opaque ordered tokens.
pub trait Label: Clone + Ord + Hash + Debug + Send + Sync {}
impl<T: Clone + Ord + Hash + Debug + Send + Sync> Label for T {}

/// A simplex given as a strictly increasing list of vertex indices into the
/// owning complex's label table.
pub type Simplex = Vec<u32>;

/// Label of a vertex in a join of two complexes with possibly colliding labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum JoinLabel<V, W> {
    Left(V),
    Right(W),
}

/// A finite abstract simplicial complex stored by its maximal faces.
///
/// Labels are kept sorted and every maximal face is a sorted list of indices
/// into the label table, so two equal complexes have equal representations
/// and iteration is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplicialComplex<V> {
    labels: Vec<V>,
    maximal: Vec<Simplex>,
}

impl<V: Label> Default for SimplicialComplex<V> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<V: Label> SimplicialComplex<V> {
    pub fn empty() -> Self {
        SimplicialComplex {
            labels: Vec::new(),
            maximal: Vec::new(),
        }
    }

    /// Downward closure of the given faces. Faces contained in other faces are
    /// absorbed and empty faces ignored.
    pub fn from_maximal_faces<I, F>(candidate_faces: I) -> Self
    where
        I: IntoIterator<Item = F>,
        F: IntoIterator<Item = V>,
    {
        let faces: Vec<Vec<V>> = candidate_faces
            .into_iter()
            .map(|f| {
                let mut f: Vec<V> = f.into_iter().collect();
                f.sort();
                f.dedup();
                f
            })
            .filter(|f| !f.is_empty())
            .collect();
        let labels: BTreeSet<V> = faces.iter().flatten().cloned().collect();
        let labels: Vec<V> = labels.into_iter().collect();
        let position: HashMap<&V, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, v)| (v, i as u32))
            .collect();
        let indexed: Vec<Simplex> = faces
            .iter()
            .map(|f| f.iter().map(|v| position[v]).collect())
            .collect();
        Self::from_index_faces(labels, indexed)
    }

    /// Builds a complex from index faces over a sorted, deduplicated label
    /// table. Unused labels are dropped.
    pub(crate) fn from_index_faces(labels: Vec<V>, faces: Vec<Simplex>) -> Self {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        let maximal = absorb(faces);
        let mut used = vec![false; labels.len()];
        for f in &maximal {
            for &v in f {
                used[v as usize] = true;
            }
        }
        if used.iter().all(|&u| u) {
            return SimplicialComplex { labels, maximal };
        }
        let mut remap = vec![u32::MAX; labels.len()];
        let mut kept = Vec::new();
        for (i, l) in labels.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len() as u32;
                kept.push(l);
            }
        }
        let mut maximal: Vec<Simplex> = maximal
            .into_iter()
            .map(|f| f.into_iter().map(|v| remap[v as usize]).collect())
            .collect();
        maximal.sort();
        SimplicialComplex {
            labels: kept,
            maximal,
        }
    }

    /// The clique (flag) complex of a graph on the given labels.
    ///
    /// `adjacent(i, j)` is queried on label indices with `i != j` and must be
    /// symmetric.
    pub fn clique_complex(labels: Vec<V>, adjacent: impl Fn(usize, usize) -> bool) -> Self {
        let mut labels = labels;
        let n = labels.len();
        // Sort labels while keeping the adjacency oracle on original positions.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        let mut neighbours = vec![FixedBitSet::with_capacity(n); n];
        for (new_i, &old_i) in order.iter().enumerate() {
            for (new_j, &old_j) in order.iter().enumerate().skip(new_i + 1) {
                if adjacent(old_i, old_j) {
                    neighbours[new_i].insert(new_j);
                    neighbours[new_j].insert(new_i);
                }
            }
        }
        let sorted_labels: Vec<V> = order.iter().map(|&i| labels[i].clone()).collect();
        labels.clear();
        let mut cliques = Vec::new();
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        bron_kerbosch(
            &neighbours,
            &mut Vec::new(),
            all,
            FixedBitSet::with_capacity(n),
            &mut cliques,
        );
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        SimplicialComplex {
            labels: sorted_labels,
            maximal: cliques,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.maximal.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Vertex labels in canonical (sorted) order.
    pub fn labels(&self) -> &[V] {
        &self.labels
    }

    pub fn label(&self, index: u32) -> &V {
        &self.labels[index as usize]
    }

    pub fn index_of(&self, label: &V) -> Option<u32> {
        self.labels.binary_search(label).ok().map(|i| i as u32)
    }

    /// Maximal faces as index simplices, in canonical order.
    pub fn maximal_faces(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn maximal_faces_labeled(&self) -> Vec<Vec<V>> {
        self.maximal.iter().map(|f| self.labels_of(f)).collect()
    }

    pub fn labels_of(&self, simplex: &[u32]) -> Vec<V> {
        simplex.iter().map(|&i| self.labels[i as usize].clone()).collect()
    }

    /// Index simplex for a set of labels, if every label is a vertex.
    pub fn indices_of(&self, simplex: &[V]) -> Option<Simplex> {
        let mut s: Simplex = simplex
            .iter()
            .map(|v| self.index_of(v))
            .collect::<Option<_>>()?;
        s.sort_unstable();
        s.dedup();
        Some(s)
    }

    /// Dimension of the complex; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.maximal.iter().map(|f| f.len() - 1).max()
    }

    pub fn contains(&self, simplex: &[V]) -> bool {
        match self.indices_of(simplex) {
            Some(s) if !s.is_empty() => self.maximal.iter().any(|f| is_subset(&s, f)),
            _ => false,
        }
    }

    /// Every nonempty simplex, sorted lexicographically by index list.
    pub fn all_simplices(&self) -> Vec<Simplex> {
        let mut seen: FxHashSet<Simplex> = FxHashSet::default();
        let mut buf = Vec::new();
        for f in &self.maximal {
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                buf.clear();
                buf.extend((0..k).filter(|&b| mask >> b & 1 == 1).map(|b| f[b]));
                if !seen.contains(&buf) {
                    seen.insert(buf.clone());
                }
            }
        }
        let mut all: Vec<Simplex> = seen.into_iter().collect();
        all.sort_unstable();
        all
    }

    /// Number of simplices in each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for s in self.all_simplices() {
            let d = s.len() - 1;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        counts
    }

    pub fn simplex_count(&self) -> usize {
        self.f_vector().iter().sum()
    }

    /// The subcomplex of all simplices whose vertices lie in `vertices`.
    pub fn full_subcomplex<'a, I>(&self, vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a V>,
        V: 'a,
    {
        let mut keep = vec![false; self.labels.len()];
        for v in vertices {
            let i = self
                .index_of(v)
                .ok_or_else(|| Error::input(format!("vertex {v:?} is not in the complex")))?;
            keep[i as usize] = true;
        }
        Ok(self.full_subcomplex_by_index(&keep))
    }

    pub(crate) fn full_subcomplex_by_index(&self, keep: &[bool]) -> Self {
        let faces = self
            .maximal
            .iter()
            .map(|f| f.iter().copied().filter(|&v| keep[v as usize]).collect())
            .collect();
        Self::from_index_faces(self.labels.clone(), faces)
    }

    /// Join with another complex over the same label type. Fails when the
    /// vertex sets overlap; use [`SimplicialComplex::join_disjoint`] then.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if let Some(v) = self.labels.iter().find(|v| other.index_of(v).is_some()) {
            return Err(Error::input(format!(
                "join factors share the vertex {v:?}"
            )));
        }
        Ok(Self::from_maximal_faces(join_faces(
            &self.maximal_faces_labeled(),
            &other.maximal_faces_labeled(),
        )))
    }

    /// Join with relabelled factors, so the vertex sets never collide.
    pub fn join_disjoint<W: Label>(
        &self,
        other: &SimplicialComplex<W>,
    ) -> SimplicialComplex<JoinLabel<V, W>> {
        let left: Vec<Vec<JoinLabel<V, W>>> = self
            .maximal_faces_labeled()
            .into_iter()
            .map(|f| f.into_iter().map(JoinLabel::Left).collect())
            .collect();
        let right: Vec<Vec<JoinLabel<V, W>>> = other
            .maximal_faces_labeled()
            .into_iter()
            .map(|f| f.into_iter().map(JoinLabel::Right).collect())
            .collect();
        SimplicialComplex::from_maximal_faces(join_faces(&left, &right))
    }

    /// Cone with the given apex, which must not already be a vertex.
    pub fn cone(&self, apex: V) -> Result<Self> {
        if self.index_of(&apex).is_some() {
            return Err(Error::input(format!("cone apex {apex:?} is already a vertex")));
        }
        self.join(&Self::from_maximal_faces([[apex]]))
    }

    /// Barycentric subdivision. Each output vertex is labelled by the face
    /// of `self` it is the barycentre of.
    pub fn barycentric_subdivision(&self) -> SimplicialComplex<Vec<V>> {
        let mut chains = Vec::new();
        for f in &self.maximal {
            let labels = self.labels_of(f);
            for perm in permutations(labels.len()) {
                let mut chain = Vec::with_capacity(perm.len());
                let mut prefix: Vec<V> = Vec::new();
                for &p in &perm {
                    prefix.push(labels[p].clone());
                    let mut face = prefix.clone();
                    face.sort();
                    chain.push(face);
                }
                chains.push(chain);
            }
        }
        SimplicialComplex::from_maximal_faces(chains)
    }

    /// Link of a vertex: simplices disjoint from it whose union with it is a
    /// simplex.
    pub fn link(&self, vertex: &V) -> Result<Self> {
        let v = self
            .index_of(vertex)
            .ok_or_else(|| Error::input(format!("vertex {vertex:?} is not in the complex")))?;
        let faces = self
            .maximal
            .iter()
            .filter(|f| f.contains(&v))
            .map(|f| f.iter().copied().filter(|&u| u != v).collect())
            .collect();
        Ok(Self::from_index_faces(self.labels.clone(), faces))
    }

    /// Relabel the vertices through an injective map.
    pub fn map_labels<W: Label>(&self, f: impl Fn(&V) -> W) -> Result<SimplicialComplex<W>> {
        let new: Vec<W> = self.labels.iter().map(&f).collect();
        let distinct: BTreeSet<&W> = new.iter().collect();
        if distinct.len() != new.len() {
            return Err(Error::input("relabelling is not injective"));
        }
        Ok(SimplicialComplex::from_maximal_faces(
            self.maximal
                .iter()
                .map(|face| face.iter().map(|&i| new[i as usize].clone()).collect::<Vec<_>>()),
        ))
    }

    /// Edges of the 1-skeleton as index pairs.
    pub fn edges(&self) -> BTreeSet<(u32, u32)> {
        let mut edges = BTreeSet::new();
        for f in &self.maximal {
            for (a, &u) in f.iter().enumerate() {
                for &w in &f[a + 1..] {
                    edges.insert((u, w));
                }
            }
        }
        edges
    }

    /// Connected components, each a sorted list of vertex indices.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut x = x;
            while parent[x] != r {
                let next = parent[x];
                parent[x] = r;
                x = next;
            }
            r
        }
        for f in &self.maximal {
            for w in f.windows(2) {
                let a = find(&mut parent, w[0] as usize);
                let b = find(&mut parent, w[1] as usize);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v as u32);
        }
        groups.into_values().collect()
    }

    /// Connected and nonempty.
    pub fn is_connected(&self) -> bool {
        !self.is_empty() && self.components().len() == 1
    }

    /// Whether every maximal face contains `apex`.
    pub fn is_cone_with_apex(&self, apex: &V) -> bool {
        match self.index_of(apex) {
            Some(a) => self.maximal.iter().all(|f| f.binary_search(&a).is_ok()),
            None => false,
        }
    }

    /// Smallest vertex contained in every maximal face, if any.
    pub fn cone_apex(&self) -> Option<V> {
        let first = self.maximal.first()?;
        first
            .iter()
            .find(|&&v| self.maximal.iter().all(|f| f.binary_search(&v).is_ok()))
            .map(|&v| self.labels[v as usize].clone())
    }
}

fn join_faces<L: Clone>(left: &[Vec<L>], right: &[Vec<L>]) -> Vec<Vec<L>> {
    if left.is_empty() {
        return right.to_vec();
    }
    if right.is_empty() {
        return left.to_vec();
    }
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            let mut f = a.clone();
            f.extend(b.iter().cloned());
            out.push(f);
        }
    }
    out
}

pub(crate) fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    'outer: for s in small {
        for b in it.by_ref() {
            if b == s {
                continue 'outer;
            }
            if b > s {
                return false;
            }
        }
        return false;
    }
    true
}

/// Keeps only the inclusion-maximal faces, sorted canonically.
fn absorb(mut faces: Vec<Simplex>) -> Vec<Simplex> {
    for f in &mut faces {
        f.sort_unstable();
        f.dedup();
    }
    faces.retain(|f| !f.is_empty());
    faces.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    faces.dedup();

    let mut accepted: Vec<Simplex> = Vec::new();
    // incidence lists only cover faces strictly larger than the current size
    let mut incidence: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut indexed_upto = 0;
    let mut current_len = usize::MAX;
    for f in faces {
        if f.len() < current_len {
            current_len = f.len();
            for (i, a) in accepted.iter().enumerate().skip(indexed_upto) {
                for &v in a {
                    incidence.entry(v).or_default().push(i);
                }
            }
            indexed_upto = accepted.len();
        }
        let redundant = if indexed_upto == 0 {
            false
        } else {
            let shortest = f
                .iter()
                .map(|v| incidence.get(v).map_or(&[][..], |l| l.as_slice()))
                .min_by_key(|l| l.len())
                .unwrap_or(&[]);
            shortest.iter().any(|&i| is_subset(&f, &accepted[i]))
        };
        if !redundant {
            accepted.push(f);
        }
    }
    accepted.sort_unstable();
    accepted
}

fn bron_kerbosch(
    neighbours: &[FixedBitSet],
    current: &mut Vec<u32>,
    mut candidates: FixedBitSet,
    mut excluded: FixedBitSet,
    out: &mut Vec<Simplex>,
) {
    if candidates.count_ones(..) == 0 {
        if excluded.count_ones(..) == 0 && !current.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    // pivot: vertex of candidates ∪ excluded with the most candidate neighbours
    let pivot = candidates
        .ones()
        .chain(excluded.ones())
        .max_by_key(|&u| neighbours[u].intersection(&candidates).count())
        .expect("nonempty candidates");
    let branch: Vec<usize> = candidates
        .ones()
        .filter(|&v| !neighbours[pivot].contains(v))
        .collect();
    for v in branch {
        current.push(v as u32);
        let mut c = candidates.clone();
        c.intersect_with(&neighbours[v]);
        let mut x = excluded.clone();
        x.intersect_with(&neighbours[v]);
        bron_kerbosch(neighbours, current, c, x, out);
        current.pop();
        candidates.set(v, false);
        excluded.insert(v);
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut items, &mut out);
    out
}

fn heap_permute(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, items, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
