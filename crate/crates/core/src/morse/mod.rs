//! Lifted Morse functions on the cube dual to each face, and the links that
//! decide regularity.

mod classify;
mod coface;
mod cube;
mod cusp;

pub use classify::{
    canonical_transport, check_transport, classify_bad_face, classify_link, full_links_oracle,
    verify_classification, CriticalLink, CubeLibrary, CubeType, Evidence, FullLinkLabel,
    LinkClassification, LinkPath, Verdict,
};
pub use coface::{coface_links_fast, coface_links_oracle, coface_membership_oracle, CofaceLinks};
pub use cube::{
    boundary_subdivision, build_cube_model, check_sum_decomposition, cube_faces, face_links_oracle,
    monochromatic_factors, predicted_face_links, CubeFace, CubeModel, Factor, FaceLinks, LiftValue,
    PredictedFaceLinks, MAX_CUBE_DIM,
};
pub use cusp::{
    certify_boundary_cube, check_cusp_condition, restricted_moves, restricted_state,
    verify_boundary_cube, BoundaryCubeCertificate, CuspCheck,
};
