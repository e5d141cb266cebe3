use serde::{Deserialize, Serialize};

use super::{InheritedState, Status};
use crate::error::Result;
use crate::polytope::{dual_complex, FacetId, Polytope};
use crate::simplicial::{
    betti_mod2, find_collapse_certificate, CollapseCertificate, CollapseConfig, SimplicialComplex,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Legality {
    /// Both state subcomplexes nonempty and connected.
    pub legal: bool,
    /// `Some(true)`: both collapse, with certificates. `Some(false)`: one of
    /// them is empty or disconnected. `None`: the search found no collapse.
    pub totally_legal: Option<bool>,
    pub betti_out: Vec<usize>,
    pub betti_in: Vec<usize>,
    pub out_certificate: Option<CollapseCertificate<FacetId>>,
    pub in_certificate: Option<CollapseCertificate<FacetId>>,
}

/// The full subcomplexes of the face's dual on its `Out` and `In` facets.
pub fn state_subcomplexes(
    p: &Polytope,
    state: &InheritedState,
) -> (SimplicialComplex<FacetId>, SimplicialComplex<FacetId>) {
    let dual = dual_complex(p, &state.face);
    let part = |st: Status| {
        let keep: Vec<FacetId> = state.with_status(st).collect();
        dual.full_subcomplex(keep.iter())
            .expect("facets of the face are vertices of its dual")
    };
    (part(Status::Out), part(Status::In))
}

/// Legality of an inherited state; collapse searches use `config`.
pub fn legality(p: &Polytope, state: &InheritedState, config: &CollapseConfig) -> Result<Legality> {
    let (out, inn) = state_subcomplexes(p, state);
    let betti = |k: &SimplicialComplex<FacetId>| betti_mod2(k, k.dim().unwrap_or(0));
    let legal = out.is_connected() && inn.is_connected();
    let (mut out_certificate, mut in_certificate) = (None, None);
    let totally_legal = if !legal {
        Some(false)
    } else {
        out_certificate = find_collapse_certificate(&out, config)?;
        in_certificate = find_collapse_certificate(&inn, config)?;
        (out_certificate.is_some() && in_certificate.is_some()).then_some(true)
    };
    Ok(Legality {
        legal,
        totally_legal,
        betti_out: betti(&out),
        betti_in: betti(&inn),
        out_certificate,
        in_certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{build_p6, FaceHandle};
    use crate::state::{inherited_state, move_system_p6, State};

    #[test]
    fn examples_on_p6() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let cfg = CollapseConfig::default();
        let whole = FaceHandle::polytope();
        let out = [
            "1", "1-i+j-k", "1+i+j-k", "i", "1+i+j+k", "-1+i+j+k", "j", "-1-i+j+k", "-1-i+j-k", "k",
            "1-i-j+k", "1-i+j+k",
        ];
        let s = State::with_out(27, out.iter().map(|l| p.facet_by_label(l).unwrap()));
        let l = legality(&p, &inherited_state(&p, &m, &s, &whole), &cfg).unwrap();
        assert!(l.legal);
        assert_eq!(l.totally_legal, Some(true));

        let two = ["A", "1"].map(|x| p.facet_by_label(x).unwrap());
        let s = State::with_out(27, two);
        let l = legality(&p, &inherited_state(&p, &m, &s, &whole), &cfg).unwrap();
        assert!(!l.legal);
        assert_eq!(l.betti_out[0], 2);

        let s = State::uniform(27, Status::Out);
        let l = legality(&p, &inherited_state(&p, &m, &s, &whole), &cfg).unwrap();
        assert!(!l.legal);
        assert_eq!(l.totally_legal, Some(false));
    }
}
