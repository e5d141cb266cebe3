use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{all_faces, build_cusp_section, CuspSection, FaceHandle, FacetId, Polytope};
use crate::simplicial::CollapseConfig;
use crate::state::{is_good_face, MoveSystem, State};

use super::classify::{classify_link, verify_classification, CubeLibrary, LinkClassification, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspCheck {
    pub cusp: u32,
    pub label: String,
    pub pass: bool,
    /// First move meeting the cusp's facets in two opposite facets with
    /// different statuses.
    pub block: Option<usize>,
    pub witness: Option<(FacetId, FacetId)>,
}

/// Checks for a move whose intersection with the cusp's facets is a pair of
/// non-adjacent facets carrying different statuses.
pub fn check_cusp_condition(p: &Polytope, m: &MoveSystem, s: &State, cusp: u32) -> Result<CuspCheck> {
    let vertex = p
        .ideal_vertices()
        .iter()
        .find(|v| v.id == cusp)
        .ok_or_else(|| Error::input(format!("{} has no ideal vertex {cusp}", p.name())))?;
    let hit = (0..m.block_count()).find_map(|b| {
        let meet: Vec<FacetId> = vertex
            .incident
            .iter()
            .copied()
            .filter(|&f| m.block_of(f) == b)
            .collect();
        match meet[..] {
            [x, y] if !p.adjacent(x, y) && s.status(x) != s.status(y) => Some((b, (x, y))),
            _ => None,
        }
    });
    Ok(CuspCheck {
        cusp,
        label: vertex.label.clone(),
        pass: hit.is_some(),
        block: hit.map(|h| h.0),
        witness: hit.map(|h| h.1),
    })
}

/// Moves of the section: each facet of the cube goes in the move of the
/// facet of `P` it comes from.
pub fn restricted_moves(section: &CuspSection, m: &MoveSystem) -> Result<MoveSystem> {
    let mut blocks: Vec<Vec<FacetId>> = Vec::new();
    let mut seen: Vec<Option<usize>> = vec![None; m.block_count()];
    for (h, &f) in section.to_parent.iter().enumerate() {
        let b = m.block_of(f);
        let slot = *seen[b].get_or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[slot].push(h as FacetId);
    }
    MoveSystem::new(section.to_parent.len(), blocks)
}

pub fn restricted_state(section: &CuspSection, s: &State) -> State {
    State::new(section.to_parent.iter().map(|&f| s.status(f)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCubeCertificate {
    pub cusp: u32,
    pub state: State,
    pub faces: usize,
    pub good_faces: usize,
    /// Classifications of the bad faces of the section, with evidence.
    pub bad_faces: Vec<(FaceHandle, LinkClassification)>,
    pub pass: bool,
}

/// Classifies every face of the section at `cusp` under the restricted moves
/// and state; passes when every verdict is `Regular`.
pub fn certify_boundary_cube(
    p: &Polytope,
    m: &MoveSystem,
    s: &State,
    cusp: u32,
    config: &CollapseConfig,
) -> Result<BoundaryCubeCertificate> {
    let section = build_cusp_section(p, cusp)?;
    let mh = restricted_moves(&section, m)?;
    let sh = restricted_state(&section, s);
    let lib = CubeLibrary::default();
    let mut faces = 0;
    let mut good_faces = 0;
    let mut bad_faces = Vec::new();
    let mut pass = true;
    for face in all_faces(&section.cube).into_iter().flatten() {
        faces += 1;
        if is_good_face(&mh, &face) {
            good_faces += 1;
            continue;
        }
        let c = classify_link(&section.cube, &mh, &sh, &face, &lib, config)?;
        pass &= c.verdict == Verdict::Regular;
        bad_faces.push((face, c));
    }
    Ok(BoundaryCubeCertificate {
        cusp,
        state: sh,
        faces,
        good_faces,
        bad_faces,
        pass,
    })
}

/// Recomputes the section and replays every recorded classification.
pub fn verify_boundary_cube(p: &Polytope, m: &MoveSystem, cert: &BoundaryCubeCertificate) -> Result<()> {
    let section = build_cusp_section(p, cert.cusp)?;
    let mh = restricted_moves(&section, m)?;
    let lib = CubeLibrary::default();
    let faces: Vec<FaceHandle> = all_faces(&section.cube).into_iter().flatten().collect();
    let bad: Vec<&FaceHandle> = faces.iter().filter(|f| !is_good_face(&mh, f)).collect();
    let recorded: Vec<&FaceHandle> = cert.bad_faces.iter().map(|(f, _)| f).collect();
    if faces.len() != cert.faces || bad.len() + cert.good_faces != cert.faces || bad != recorded {
        return Err(Error::structural(format!("section at cusp {} has different faces", cert.cusp)));
    }
    let mut all_regular = true;
    for (face, c) in &cert.bad_faces {
        verify_classification(&section.cube, &mh, &cert.state, face, c, &lib)?;
        all_regular &= c.verdict == Verdict::Regular;
    }
    if all_regular != cert.pass {
        return Err(Error::structural(format!("section at cusp {} misreports its outcome", cert.cusp)));
    }
    Ok(())
}
