use serde::{Deserialize, Serialize};

use super::collapse::{
    cone_collapse_sequence, try_collapse, verify_collapse, CollapseConfig, CollapseStep,
    ReplayError, SearchStrategy,
};
use super::complex::{Label, SimplicialComplex};
use crate::error::{Error, Result};

/// Replayable evidence that a complex collapses to a point or onto a target.
///
/// Cones are recorded by their apex alone; the verifier regenerates the
/// canonical cone collapse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CollapseCertificate<V> {
    Cone { apex: V },
    Sequence {
        strategy: SearchStrategy,
        steps: Vec<CollapseStep<V>>,
    },
}

impl<V: Label> CollapseCertificate<V> {
    /// Replays against `complex`, ending at a single vertex or at `target`.
    pub fn verify(
        &self,
        complex: &SimplicialComplex<V>,
        target: Option<&SimplicialComplex<V>>,
    ) -> Result<(), ReplayError> {
        match self {
            CollapseCertificate::Cone { apex } => {
                if target.is_some() {
                    return Err(ReplayError::WrongCore);
                }
                let steps = cone_collapse_sequence(complex, apex).ok_or(ReplayError::WrongCore)?;
                verify_collapse(complex, &steps, None)
            }
            CollapseCertificate::Sequence { steps, .. } => verify_collapse(complex, steps, target),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CollapseCertificate::Cone { .. } => 0,
            CollapseCertificate::Sequence { steps, .. } => steps.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Looks for a collapse of `complex` to a point: cones are recognised
/// directly, anything else goes through [`try_collapse`]. `None` means not
/// certified, which does not rule out collapsibility.
pub fn find_collapse_certificate<V: Label>(
    complex: &SimplicialComplex<V>,
    config: &CollapseConfig,
) -> Result<Option<CollapseCertificate<V>>> {
    if let Some(apex) = complex.cone_apex() {
        return Ok(Some(CollapseCertificate::Cone { apex }));
    }
    let out = try_collapse(complex, None, config)?;
    Ok(out.success.then(|| CollapseCertificate::Sequence {
        strategy: out.strategy.unwrap_or(SearchStrategy::Greedy),
        steps: out.sequence,
    }))
}

/// Encodes steps as index lists into the complex's sorted labels: the face's
/// vertices followed by the apex, the vertex the coface adds.
pub fn encode_steps<V: Label>(
    complex: &SimplicialComplex<V>,
    steps: &[CollapseStep<V>],
) -> Result<Vec<Vec<u32>>> {
    steps
        .iter()
        .map(|st| {
            let apex: Vec<&V> = st.coface.iter().filter(|v| !st.face.contains(v)).collect();
            let (face, apex) = match (complex.indices_of(&st.face), apex.as_slice()) {
                (Some(f), [a]) if f.len() == st.face.len() => (f, *a),
                _ => return Err(Error::input("step does not belong to the complex")),
            };
            let a = complex
                .index_of(apex)
                .ok_or_else(|| Error::input("step apex is not a vertex"))?;
            let mut out = face;
            out.push(a);
            Ok(out)
        })
        .collect()
}

/// Inverse of [`encode_steps`]; malformed entries are reported by position.
pub fn decode_steps<V: Label>(
    complex: &SimplicialComplex<V>,
    encoded: &[Vec<u32>],
) -> Result<Vec<CollapseStep<V>>, ReplayError> {
    let n = complex.vertex_count() as u32;
    encoded
        .iter()
        .enumerate()
        .map(|(step, e)| {
            let (&apex, face) = e.split_last().ok_or(ReplayError::Missing { step })?;
            if apex >= n || face.iter().any(|&v| v >= n || v == apex) {
                return Err(ReplayError::Missing { step });
            }
            let face: Vec<V> = face.iter().map(|&v| complex.label(v).clone()).collect();
            let mut coface = face.clone();
            coface.push(complex.label(apex).clone());
            coface.sort();
            let mut face = face;
            face.sort();
            Ok(CollapseStep { face, coface })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_and_sequence_certificates() {
        let fan = SimplicialComplex::from_maximal_faces([[0, 1, 2], [0, 2, 3]]);
        let c = find_collapse_certificate(&fan, &CollapseConfig::default()).unwrap().unwrap();
        assert_eq!(c, CollapseCertificate::Cone { apex: 0 });
        c.verify(&fan, None).unwrap();

        let path = SimplicialComplex::from_maximal_faces([[0, 1], [1, 2], [2, 3]]);
        let c = find_collapse_certificate(&path, &CollapseConfig::default()).unwrap().unwrap();
        assert!(matches!(c, CollapseCertificate::Sequence { .. }));
        c.verify(&path, None).unwrap();
        // the same certificate does not fit a different complex
        let other = SimplicialComplex::from_maximal_faces([[0, 1], [1, 2], [2, 0]]);
        assert!(c.verify(&other, None).is_err());
    }

    #[test]
    fn single_vertex_is_a_cone() {
        let pt = SimplicialComplex::from_maximal_faces([["v"]]);
        let c = find_collapse_certificate(&pt, &CollapseConfig::default()).unwrap().unwrap();
        c.verify(&pt, None).unwrap();
        assert!(find_collapse_certificate(&SimplicialComplex::<u8>::empty(), &CollapseConfig::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn compact_steps_round_trip() {
        let k = SimplicialComplex::from_maximal_faces([["a", "b", "c"], ["c", "d", "e"]]);
        let out = try_collapse(&k, None, &CollapseConfig::default()).unwrap();
        let enc = encode_steps(&k, &out.sequence).unwrap();
        assert!(enc.iter().all(|e| !e.is_empty()));
        assert_eq!(decode_steps(&k, &enc).unwrap(), out.sequence);
        assert!(decode_steps(&k, &[vec![9]]).is_err());
    }
}
