use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{dual_complex, FaceHandle, FacetId, Polytope};
use crate::simplicial::{
    check_crosspolytope_witness, decode_steps, encode_steps, is_crosspolytope_boundary, try_collapse,
    verify_collapse, CollapseCertificate, CollapseConfig, CrossPolytopeWitness, SimplicialComplex,
};
use crate::state::{
    face_signature, good_face_witness, inherited_state, legality, InheritedState, MoveSystem, State,
    Status,
};

use super::cube::{
    build_cube_model, face_links_oracle, full_mask, monochromatic_factors, predicted_face_links,
    CubeFace, CubeModel,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Regular,
    Critical(usize),
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Regular => f.write_str("Regular"),
            Verdict::Critical(k) => write!(f, "Critical({k})"),
            Verdict::Unknown => f.write_str("Unknown"),
        }
    }
}

/// How the links were obtained: from the inherited state alone, or from the
/// cube model built for the face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkPath {
    Fast,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// A move meeting the defining facets in exactly `facet`.
    GoodFace { block: usize, facet: FacetId },
    /// Collapses of the `Out` and `In` parts of the inherited state.
    TotallyLegal {
        out_certificate: CollapseCertificate<FacetId>,
        in_certificate: CollapseCertificate<FacetId>,
    },
    /// The face's cube is carried onto a library cube by permuting
    /// coordinates (`order[i]` is the new position of coordinate `i`) after
    /// reflecting in `reflection`.
    CrossPolytope {
        cube_type: usize,
        order: Vec<usize>,
        reflection: u32,
    },
    Undecided { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkClassification {
    pub verdict: Verdict,
    pub path: LinkPath,
    pub evidence: Evidence,
}

/// One side of a critical cube type: a collapse of the link onto its core,
/// and a cross-polytope `X` with `sd X` equal to the core.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalLink {
    /// Collapse steps in the compact index form of [`encode_steps`].
    pub steps: Vec<Vec<u32>>,
    pub crosspolytope: CrossPolytopeWitness<CubeFace>,
}

/// A cube of `pairs` two-facet factors, all `Out` at vertex 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeType {
    pub pairs: usize,
    pub ascending: CriticalLink,
    pub descending: CriticalLink,
}

impl CubeType {
    pub fn model(pairs: usize) -> Result<CubeModel> {
        let blocks = (0..2 * pairs).map(|i| i / 2).collect();
        CubeModel::from_coordinates(blocks, vec![Status::Out; 2 * pairs])
    }

    /// Builds the evidence for `pairs` factors, searching for both collapses.
    pub fn build(pairs: usize, config: &CollapseConfig) -> Result<Self> {
        let model = Self::model(pairs)?;
        let links = face_links_oracle(&model);
        let pred = predicted_face_links(&model)?;
        let side = |link: &SimplicialComplex<CubeFace>, core: &SimplicialComplex<CubeFace>| -> Result<CriticalLink> {
            let out = try_collapse(link, Some(core), config)?;
            if !out.success {
                return Err(Error::internal(format!(
                    "no collapse found onto the join of {pairs} spheres"
                )));
            }
            let x = nerve_of_core(core);
            let crosspolytope = is_crosspolytope_boundary(&x, pairs)
                .ok_or_else(|| Error::internal("core is not a subdivided cross-polytope"))?;
            Ok(CriticalLink {
                steps: encode_steps(link, &out.sequence)?,
                crosspolytope,
            })
        };
        Ok(CubeType {
            pairs,
            ascending: side(&links.ascending, &pred.ascending_core)?,
            descending: side(&links.descending, &pred.descending_core)?,
        })
    }

    /// Rebuilds both links of the model cube and replays all evidence.
    pub fn verify(&self) -> Result<()> {
        let model = Self::model(self.pairs)?;
        let links = face_links_oracle(&model);
        let pred = predicted_face_links(&model)?;
        for (name, link, core, ev) in [
            ("ascending", &links.ascending, &pred.ascending_core, &self.ascending),
            ("descending", &links.descending, &pred.descending_core, &self.descending),
        ] {
            decode_steps(link, &ev.steps)
                .and_then(|steps| verify_collapse(link, &steps, Some(core)))
                .map_err(|e| Error::structural(format!("{name} link of cube type {}: {e}", self.pairs)))?;
            let x = nerve_of_core(core);
            if ev.crosspolytope.pairs.len() != self.pairs || !check_crosspolytope_witness(&x, &ev.crosspolytope) {
                return Err(Error::structural(format!(
                    "{name} core of cube type {} is not the claimed cross-polytope",
                    self.pairs
                )));
            }
            if subdivision_by_meets(&x)? != *core {
                return Err(Error::structural(format!(
                    "{name} core of cube type {} is not the subdivision of its nerve",
                    self.pairs
                )));
            }
        }
        Ok(())
    }
}

/// The complex `X` on the top-dimensional faces of `core` in which a set
/// spans a simplex when its faces meet in a face of `core`.
fn nerve_of_core(core: &SimplicialComplex<CubeFace>) -> SimplicialComplex<CubeFace> {
    let top = core.labels().iter().map(|f| f.dim()).max().unwrap_or(0);
    let tops: Vec<CubeFace> = core.labels().iter().copied().filter(|f| f.dim() == top).collect();
    if tops.len() > 24 {
        return SimplicialComplex::empty();
    }
    let mut faces = Vec::new();
    for mask in 1u32..(1 << tops.len()) {
        let members: Vec<CubeFace> = (0..tops.len()).filter(|i| mask >> i & 1 == 1).map(|i| tops[i]).collect();
        let meet = members
            .iter()
            .skip(1)
            .try_fold(members[0], |acc, f| acc.meet(f));
        if meet.is_some_and(|m| core.index_of(&m).is_some()) {
            faces.push(members);
        }
    }
    SimplicialComplex::from_maximal_faces(faces)
}

/// `sd X` with each barycentre relabelled by the meet of its simplex.
fn subdivision_by_meets(x: &SimplicialComplex<CubeFace>) -> Result<SimplicialComplex<CubeFace>> {
    x.barycentric_subdivision().map_labels(|sigma| {
        sigma
            .iter()
            .skip(1)
            .try_fold(sigma[0], |acc, f| acc.meet(f))
            .expect("simplices of the nerve have nonempty meets")
    })
}

/// Evidence for each critical cube type, keyed by the number of factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CubeLibrary {
    pub entries: BTreeMap<usize, CubeType>,
}

impl CubeLibrary {
    pub fn build(pairs: impl IntoIterator<Item = usize>, config: &CollapseConfig) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for k in pairs {
            if let std::collections::btree_map::Entry::Vacant(e) = entries.entry(k) {
                e.insert(CubeType::build(k, config)?);
            }
        }
        Ok(CubeLibrary { entries })
    }
}

/// Coordinate order and reflection carrying `model` onto the model cube of
/// its type: factors in move order, each factor's coordinates consecutive,
/// and the lexicographically smallest minimum sent to vertex 0.
pub fn canonical_transport(model: &CubeModel) -> Result<(Vec<usize>, u32)> {
    let factors = monochromatic_factors(model)?;
    let mut order = vec![0usize; model.dim()];
    let mut next = 0;
    for fa in &factors {
        for (i, slot) in order.iter_mut().enumerate() {
            if fa.coords >> i & 1 == 1 {
                *slot = next;
                next += 1;
            }
        }
    }
    let reflection = model
        .min_vertices()
        .into_iter()
        .min_by_key(|&w| CubeFace::vertex(w).ternary(model.dim()))
        .ok_or_else(|| Error::internal("cube has no minimum"))?;
    Ok((order, reflection))
}

/// Checks that `order`/`reflection` is a cube symmetry taking the model's
/// moves and minima onto those of the library cube with `pairs` factors.
pub fn check_transport(model: &CubeModel, pairs: usize, order: &[usize], reflection: u32) -> Result<()> {
    let k = model.dim();
    let target = CubeType::model(pairs)?;
    if k != target.dim() || order.len() != k || reflection > full_mask(k) {
        return Err(Error::structural("transport has the wrong dimension"));
    }
    let mut seen = vec![false; k];
    for &j in order {
        if j >= k || std::mem::replace(&mut seen[j], true) {
            return Err(Error::structural("transport order is not a permutation"));
        }
    }
    for i in 0..k {
        for j in 0..k {
            let same = model.coord_blocks[i] == model.coord_blocks[j];
            if same != (target.coord_blocks[order[i]] == target.coord_blocks[order[j]]) {
                return Err(Error::structural("transport does not respect the moves"));
            }
        }
    }
    for w in 0..=full_mask(k) {
        let image = CubeFace::vertex(w).transport(order, reflection).fixed;
        if (model.vertex_lift(w) == 0) != (target.vertex_lift(image) == 0) {
            return Err(Error::structural(format!("transport misses the minimum set at {w:b}")));
        }
    }
    Ok(())
}

/// Decides the link of `face` in the copy with state `s`.
///
/// Good faces are regular because one move contributes an interval factor
/// to the cube. For bad faces the inherited state decides: totally legal
/// states give collapsible coface links; a vertex whose cube is a product
/// of squares is critical, its face links collapsing onto subdivided
/// cross-polytopes recorded in `library`. Everything else stays unknown.
pub fn classify_link(
    p: &Polytope,
    m: &MoveSystem,
    s: &State,
    face: &FaceHandle,
    library: &CubeLibrary,
    config: &CollapseConfig,
) -> Result<LinkClassification> {
    if let Some(block) = good_face_witness(m, face) {
        let facet = *face
            .facets()
            .iter()
            .find(|&&f| m.block_of(f) == block)
            .expect("witness block meets the face");
        return Ok(LinkClassification {
            verdict: Verdict::Regular,
            path: LinkPath::Fast,
            evidence: Evidence::GoodFace { block, facet },
        });
    }
    let inherited = inherited_state(p, m, s, face);
    classify_bad_face(p, m, s, &inherited, library, config)
}

/// The bad-face branch of [`classify_link`], for a given inherited state.
pub fn classify_bad_face(
    p: &Polytope,
    m: &MoveSystem,
    s: &State,
    inherited: &InheritedState,
    library: &CubeLibrary,
    config: &CollapseConfig,
) -> Result<LinkClassification> {
    let face = &inherited.face;
    let leg = legality(p, inherited, config)?;
    if leg.totally_legal == Some(true) {
        return Ok(LinkClassification {
            verdict: Verdict::Regular,
            path: LinkPath::Fast,
            evidence: Evidence::TotallyLegal {
                out_certificate: leg.out_certificate.expect("certified"),
                in_certificate: leg.in_certificate.expect("certified"),
            },
        });
    }
    let sig = face_signature(m, face);
    let pairs = sig.0.len();
    let all_pairs = !sig.0.is_empty() && sig.0.iter().all(|&c| c == 2);
    let undecided = |reason: String| LinkClassification {
        verdict: Verdict::Unknown,
        path: LinkPath::Fast,
        evidence: Evidence::Undecided { reason },
    };
    if !all_pairs || face.codim() != p.dimension() {
        let why = if leg.legal {
            "inherited state is legal but no collapse was found"
        } else {
            "inherited state is not legal"
        };
        return Ok(undecided(format!("bad face of signature {sig}: {why}")));
    }
    if !dual_complex(p, face).is_empty() {
        return Ok(undecided(format!("vertex {} has cofaces", p.face_label(face))));
    }
    if !library.entries.contains_key(&pairs) {
        return Ok(undecided(format!("no library cube with {pairs} factors")));
    }
    let model = build_cube_model(p, m, s, face)?;
    let (order, reflection) = canonical_transport(&model)?;
    check_transport(&model, pairs, &order, reflection)?;
    Ok(LinkClassification {
        verdict: Verdict::Critical(pairs),
        path: LinkPath::Oracle,
        evidence: Evidence::CrossPolytope {
            cube_type: pairs,
            order,
            reflection,
        },
    })
}

/// Replays the evidence of a classification against freshly built data.
pub fn verify_classification(
    p: &Polytope,
    m: &MoveSystem,
    s: &State,
    face: &FaceHandle,
    c: &LinkClassification,
    library: &CubeLibrary,
) -> Result<()> {
    let fail = |msg: String| Err(Error::structural(format!("{}: {msg}", p.face_label(face))));
    match (&c.verdict, &c.evidence) {
        (Verdict::Regular, Evidence::GoodFace { block, facet }) => {
            let hits: Vec<FacetId> = face.facets().iter().copied().filter(|&f| m.block_of(f) == *block).collect();
            if hits != [*facet] {
                return fail(format!("move {block} does not meet the face in one facet"));
            }
            Ok(())
        }
        (Verdict::Regular, Evidence::TotallyLegal { out_certificate, in_certificate }) => {
            let inherited = inherited_state(p, m, s, face);
            let (out, inn) = crate::state::state_subcomplexes(p, &inherited);
            out_certificate
                .verify(&out, None)
                .or_else(|e| fail(format!("Out part: {e}")))?;
            in_certificate
                .verify(&inn, None)
                .or_else(|e| fail(format!("In part: {e}")))
        }
        (Verdict::Critical(k), Evidence::CrossPolytope { cube_type, order, reflection }) => {
            if k != cube_type || face_signature(m, face).0 != vec![2; *k] || !dual_complex(p, face).is_empty() {
                return fail("critical verdict on a face that is not a square-product vertex".into());
            }
            if !library.entries.contains_key(cube_type) {
                return fail(format!("cube type {cube_type} is not in the library"));
            }
            let model = build_cube_model(p, m, s, face)?;
            check_transport(&model, *k, order, *reflection)
        }
        (Verdict::Unknown, Evidence::Undecided { .. }) => Ok(()),
        _ => fail(format!("verdict {} does not match its evidence", c.verdict)),
    }
}

/// Full links by the literal constructions, for auditing small faces: the
/// join of the face links of the cube with the coface links.
pub fn full_links_oracle(
    p: &Polytope,
    m: &MoveSystem,
    s: &State,
    face: &FaceHandle,
) -> Result<(SimplicialComplex<FullLinkLabel>, SimplicialComplex<FullLinkLabel>)> {
    let model = build_cube_model(p, m, s, face)?;
    let fl = face_links_oracle(&model);
    let cl = super::coface::coface_links_oracle(p, m, s, face)?;
    Ok((fl.ascending.join_disjoint(&cl.ascending), fl.descending.join_disjoint(&cl.descending)))
}

pub type FullLinkLabel = crate::simplicial::JoinLabel<CubeFace, Vec<FacetId>>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{build_p6, enumerate_faces};
    use crate::simplicial::betti_mod2;
    use crate::state::{balanced_states_p6, classify_bad_faces, move_system_p6, BadFaceSignature};

    #[test]
    fn library_entry_replays() {
        let cfg = CollapseConfig::default();
        let lib = CubeLibrary::build([1, 2, 3], &cfg).unwrap();
        for t in lib.entries.values() {
            t.verify().unwrap();
        }
        let mut broken = lib.entries[&2].clone();
        broken.ascending.steps.pop();
        assert!(broken.verify().is_err());
    }

    #[test]
    fn p6_vertices_are_critical_of_index_three() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let cfg = CollapseConfig::default();
        let lib = CubeLibrary::build([3], &cfg).unwrap();
        let verts = classify_bad_faces(&p, &m)[&BadFaceSignature(vec![2, 2, 2])].clone();
        for s in balanced_states_p6(&p, &m).unwrap().iter().take(4) {
            for v in &verts {
                let c = classify_link(&p, &m, s, v, &lib, &cfg).unwrap();
                assert_eq!(c.verdict, Verdict::Critical(3));
                verify_classification(&p, &m, s, v, &c, &lib).unwrap();
            }
        }
    }

    #[test]
    fn small_full_links_collapse_when_regular() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let cfg = CollapseConfig::default();
        let lib = CubeLibrary::default();
        let s = &balanced_states_p6(&p, &m).unwrap()[3];
        for face in enumerate_faces(&p, 2).iter().step_by(23) {
            let c = classify_link(&p, &m, s, face, &lib, &cfg).unwrap();
            assert_eq!(c.verdict, Verdict::Regular);
            verify_classification(&p, &m, s, face, &c, &lib).unwrap();
            let (up, down) = full_links_oracle(&p, &m, s, face).unwrap();
            for link in [&up, &down] {
                let b = betti_mod2(link, link.dim().unwrap_or(0));
                assert_eq!(b[0], 1);
                assert!(b[1..].iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn tampered_evidence_is_rejected() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let s = &balanced_states_p6(&p, &m).unwrap()[0];
        let face = p.face_by_labels(&["A", "1+i+j+k"]).unwrap();
        let lib = CubeLibrary::default();
        let c = classify_link(&p, &m, s, &face, &lib, &CollapseConfig::default()).unwrap();
        let mut bad = c.clone();
        if let Evidence::GoodFace { block, .. } = &mut bad.evidence {
            *block = (*block + 1) % m.block_count();
        }
        assert!(verify_classification(&p, &m, s, &face, &bad, &lib).is_err());
        bad.verdict = Verdict::Critical(1);
        assert!(verify_classification(&p, &m, s, &face, &bad, &lib).is_err());
    }
}
