//! Finite abstract simplicial complexes and the decision procedures the
//! engine needs: connectivity, mod-2 homology and collapse search.

mod certificate;
mod collapse;
mod complex;
mod crosspolytope;
mod homology;

pub use collapse::{
    cone_collapse_sequence, join_collapse_sequence, replay, star_removal_sequence, try_collapse,
    verify_collapse, CollapseConfig, CollapseOutcome, CollapseStep, ReplayError, SearchStrategy,
};
pub use certificate::{decode_steps, encode_steps, find_collapse_certificate, CollapseCertificate};
pub use complex::{JoinLabel, Label, Simplex, SimplicialComplex};
pub use crosspolytope::{check_crosspolytope_witness, is_crosspolytope_boundary, CrossPolytopeWitness};
pub use homology::betti_mod2;
