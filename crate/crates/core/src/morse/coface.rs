use crate::error::{Error, Result};
use crate::polytope::{dual_complex, FaceHandle, FacetId, Polytope};
use crate::simplicial::SimplicialComplex;
use crate::state::{InheritedState, MoveSystem, State, Status};

use super::cube::{build_cube_model, full_mask, CubeFace};

/// Coface links as full subcomplexes of the subdivided dual complex; each
/// vertex is labelled by the simplex of the dual it is the barycentre of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CofaceLinks {
    pub ascending: SimplicialComplex<Vec<FacetId>>,
    pub descending: SimplicialComplex<Vec<FacetId>>,
}

/// Coface links read off the inherited state: a coface is ascending exactly
/// when all its extra facets are `Out`.
pub fn coface_links_fast(p: &Polytope, inherited: &InheritedState) -> CofaceLinks {
    split_subdivided_dual(p, &inherited.face, |sigma| {
        Ok(sigma.iter().all(|&g| inherited.get(g) == Some(Status::Out)))
    })
    .expect("the fast rule cannot fail")
}

/// Literal test for one coface `F ∪ σ`: build the cube of the coface, and
/// compare the lift at the sub-cube of `F` with the lift at the top.
/// `true` means the coface lies in the ascending link.
pub fn coface_membership_oracle(
    p: &Polytope,
    m: &MoveSystem,
    s: &State,
    face: &FaceHandle,
    coface: &FaceHandle,
) -> Result<bool> {
    if !face.facets().iter().all(|&f| coface.contains(f)) || coface.codim() <= face.codim() {
        return Err(Error::input(format!(
            "{} is not a proper coface of {}",
            p.face_label(coface),
            p.face_label(face)
        )));
    }
    let model = build_cube_model(p, m, s, coface)?;
    let free = coface
        .facets()
        .iter()
        .enumerate()
        .filter(|(_, f)| face.contains(**f))
        .fold(0u32, |acc, (i, _)| acc | 1 << i);
    let sub = CubeFace { free, fixed: 0 };
    let top = CubeFace {
        free: full_mask(coface.codim()),
        fixed: 0,
    };
    Ok(model.lift(&sub) < model.lift(&top))
}

/// Coface links by the literal test on every coface.
pub fn coface_links_oracle(p: &Polytope, m: &MoveSystem, s: &State, face: &FaceHandle) -> Result<CofaceLinks> {
    split_subdivided_dual(p, face, |sigma| {
        let coface = FaceHandle::new(face.facets().iter().chain(sigma).copied());
        coface_membership_oracle(p, m, s, face, &coface)
    })
}

fn split_subdivided_dual(
    p: &Polytope,
    face: &FaceHandle,
    ascending: impl Fn(&[FacetId]) -> Result<bool>,
) -> Result<CofaceLinks> {
    let sd = dual_complex(p, face).barycentric_subdivision();
    let mut up = Vec::new();
    let mut down = Vec::new();
    for sigma in sd.labels() {
        if ascending(sigma)? {
            up.push(sigma);
        } else {
            down.push(sigma);
        }
    }
    Ok(CofaceLinks {
        ascending: sd.full_subcomplex(up)?,
        descending: sd.full_subcomplex(down)?,
    })
}
