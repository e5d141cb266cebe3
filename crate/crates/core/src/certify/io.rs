//! JSON input documents for polytopes, move systems and states.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::polytope::{adjacency_from_lorentz, Facet, FacetId, IdealVertex, Polytope};
use crate::state::{MoveSystem, State, Status};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetDoc {
    pub id: FacetId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<[i64; 7]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealVertexDoc {
    pub label: String,
    pub incident: Vec<FacetId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub facets: Vec<FacetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<(FacetId, FacetId)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ideal_vertices: Vec<IdealVertexDoc>,
}

impl PolytopeDoc {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeDoc {
            name: Some(p.name().to_string()),
            dimension: p.dimension(),
            facets: p
                .facets()
                .iter()
                .map(|f| FacetDoc {
                    id: f.id,
                    label: f.label.clone(),
                    vector: f.vector,
                })
                .collect(),
            adjacency: Some(p.adjacent_pairs()),
            ideal_vertices: p
                .ideal_vertices()
                .iter()
                .map(|v| IdealVertexDoc {
                    label: v.label.clone(),
                    incident: v.incident.clone(),
                })
                .collect(),
        }
    }

    /// Builds the polytope. Adjacency comes from the explicit list or from
    /// the Lorentzian vectors; when both are present they must agree.
    pub fn to_polytope(&self) -> Result<Polytope> {
        let mut facets = self.facets.clone();
        facets.sort_by_key(|f| f.id);
        let vectors: Option<Vec<[i64; 7]>> = facets.iter().map(|f| f.vector).collect();
        if facets.iter().any(|f| f.vector.is_some()) && vectors.is_none() {
            return Err(Error::input("either every facet or no facet carries a vector"));
        }
        let from_vectors = vectors.as_deref().map(adjacency_from_lorentz).transpose()?;
        let pairs = match (&self.adjacency, from_vectors) {
            (Some(explicit), Some(derived)) => {
                let norm = |v: &[(FacetId, FacetId)]| {
                    let mut v: Vec<(FacetId, FacetId)> =
                        v.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                    v.sort_unstable();
                    v.dedup();
                    v
                };
                if norm(explicit) != norm(&derived) {
                    return Err(Error::input("explicit adjacency disagrees with the vectors"));
                }
                derived
            }
            (Some(explicit), None) => explicit.clone(),
            (None, Some(derived)) => derived,
            (None, None) => return Err(Error::input("adjacency is required when vectors are absent")),
        };
        let ideal = self
            .ideal_vertices
            .iter()
            .enumerate()
            .map(|(i, v)| IdealVertex {
                id: i as u32,
                label: v.label.clone(),
                incident: {
                    let mut inc = v.incident.clone();
                    inc.sort_unstable();
                    inc
                },
            })
            .collect();
        let facets = facets
            .into_iter()
            .map(|f| Facet {
                id: f.id,
                label: f.label,
                vector: f.vector,
            })
            .collect();
        Polytope::new(
            self.name.clone().unwrap_or_else(|| "P".to_string()),
            self.dimension,
            facets,
            pairs,
            ideal,
        )
    }
}

/// A state file: facet id → `"I"` or `"O"`.
pub type StateDoc = BTreeMap<FacetId, Status>;

pub fn state_to_doc(s: &State) -> StateDoc {
    s.statuses()
        .iter()
        .enumerate()
        .map(|(i, &st)| (i as FacetId, st))
        .collect()
}

pub fn state_from_doc(doc: &StateDoc, facet_count: usize) -> Result<State> {
    if let Some(f) = (0..facet_count as FacetId).find(|f| !doc.contains_key(f)) {
        return Err(Error::input(format!("state gives no status for facet {f}")));
    }
    if let Some(f) = doc.keys().find(|&&f| f as usize >= facet_count) {
        return Err(Error::input(format!("state names unknown facet {f}")));
    }
    Ok(State::new(doc.values().copied().collect()))
}

pub fn moves_from_doc(doc: Vec<Vec<FacetId>>, facet_count: usize) -> Result<MoveSystem> {
    MoveSystem::new(facet_count, doc)
}

/// Parses JSON, reporting the position of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, source_name: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse_json(&text, &path.display().to_string())
}

/// The three inputs of a generic run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputsDoc {
    pub polytope: PolytopeDoc,
    pub moves: Vec<Vec<FacetId>>,
    pub state: StateDoc,
}

impl InputsDoc {
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("inputs serialize");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::build_p6;

    #[test]
    fn polytope_round_trip() {
        let p = build_p6().unwrap();
        let doc = PolytopeDoc::from_polytope(&p);
        let text = serde_json::to_string(&doc).unwrap();
        let q = parse_json::<PolytopeDoc>(&text, "p6").unwrap().to_polytope().unwrap();
        assert_eq!(q.adjacent_pairs(), p.adjacent_pairs());
        assert_eq!(q.ideal_vertices(), p.ideal_vertices());
    }

    #[test]
    fn conflicting_adjacency_is_rejected() {
        let p = build_p6().unwrap();
        let mut doc = PolytopeDoc::from_polytope(&p);
        doc.adjacency.as_mut().unwrap().pop();
        assert!(doc.to_polytope().is_err());
        doc.adjacency = None;
        assert!(doc.to_polytope().is_ok());
        for f in &mut doc.facets {
            f.vector = None;
        }
        assert!(doc.to_polytope().is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_json::<PolytopeDoc>("{\n  \"dimension\": 2,\n  \"facets\": [}", "bad.json").unwrap_err();
        match err {
            Error::Parse { line, source_name, .. } => {
                assert_eq!(line, 3);
                assert_eq!(source_name, "bad.json");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn state_doc_checks_coverage() {
        let s: State = "IOI".parse().unwrap();
        let doc = state_to_doc(&s);
        assert_eq!(serde_json::to_string(&doc).unwrap(), r#"{"0":"I","1":"O","2":"I"}"#);
        assert_eq!(state_from_doc(&doc, 3).unwrap(), s);
        assert!(state_from_doc(&doc, 4).is_err());
        assert!(state_from_doc(&doc, 2).is_err());
    }
}
