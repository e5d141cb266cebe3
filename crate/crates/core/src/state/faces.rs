use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{MoveSystem, State, Status};
use crate::polytope::{enumerate_faces, FaceHandle, FacetId, Polytope};

/// Sizes, in decreasing order, of the nonempty intersections of a face's
/// defining facets with the moves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BadFaceSignature(pub Vec<usize>);

impl fmt::Display for BadFaceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn face_signature(m: &MoveSystem, face: &FaceHandle) -> BadFaceSignature {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &f in face.facets() {
        *counts.entry(m.block_of(f)).or_default() += 1;
    }
    let mut sig: Vec<usize> = counts.into_values().collect();
    sig.sort_unstable_by(|a, b| b.cmp(a));
    BadFaceSignature(sig)
}

/// The first move containing exactly one defining facet.
pub fn good_face_witness(m: &MoveSystem, face: &FaceHandle) -> Option<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &f in face.facets() {
        *counts.entry(m.block_of(f)).or_default() += 1;
    }
    counts.into_iter().find(|&(_, c)| c == 1).map(|(b, _)| b)
}

pub fn is_good_face(m: &MoveSystem, face: &FaceHandle) -> bool {
    good_face_witness(m, face).is_some()
}

/// The state a face inherits: one status per facet of the face, listed by
/// the facet of `P` that cuts it out.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InheritedState {
    pub face: FaceHandle,
    pub facets: Vec<FacetId>,
    pub status: Vec<Status>,
}

impl InheritedState {
    pub fn get(&self, f: FacetId) -> Option<Status> {
        self.facets
            .binary_search(&f)
            .ok()
            .map(|i| self.status[i])
    }

    pub fn with_status(&self, st: Status) -> impl Iterator<Item = FacetId> + '_ {
        self.facets
            .iter()
            .zip(&self.status)
            .filter(move |(_, &s)| s == st)
            .map(|(&f, _)| f)
    }

    pub fn code(&self) -> String {
        self.status.iter().map(|s| s.as_char()).collect()
    }
}

/// `Out` on facets sharing a move with a defining facet, `s(G)` on the rest.
pub fn inherited_state(p: &Polytope, m: &MoveSystem, s: &State, face: &FaceHandle) -> InheritedState {
    let facets = p.facets_of_face(face);
    let status = facets
        .iter()
        .map(|&g| {
            if face.facets().iter().any(|&d| m.same_block(d, g)) {
                Status::Out
            } else {
                s.status(g)
            }
        })
        .collect();
    InheritedState {
        face: face.clone(),
        facets,
        status,
    }
}

/// Proper bad faces grouped by signature, each list in lexicographic order.
pub fn classify_bad_faces(p: &Polytope, m: &MoveSystem) -> BTreeMap<BadFaceSignature, Vec<FaceHandle>> {
    let mut out: BTreeMap<BadFaceSignature, Vec<FaceHandle>> = BTreeMap::new();
    for k in 1..=p.dimension() {
        for face in enumerate_faces(p, k) {
            let sig = face_signature(m, &face);
            if !sig.0.contains(&1) {
                out.entry(sig).or_default().push(face);
            }
        }
    }
    out
}
