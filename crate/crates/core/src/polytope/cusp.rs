use super::{DeclaredCounts, Facet, FacetId, Polytope};
use crate::error::{Error, Result};

/// Horospherical section at an ideal vertex: a combinatorial cube whose
/// facets are the facets of `P` incident to the cusp.
#[derive(Clone, Debug)]
pub struct CuspSection {
    pub cusp: u32,
    pub cube: Polytope,
    /// `to_parent[h]` is the facet of `P` cut out by facet `h` of the cube.
    pub to_parent: Vec<FacetId>,
    /// Opposite facet pairs of the cube, in cube ids.
    pub pairs: Vec<(FacetId, FacetId)>,
}

/// Builds the section of `p` at the ideal vertex `cusp` and checks that it is
/// a `(dim − 1)`-cube: its facets split into opposite pairs, two facets being
/// adjacent exactly when they lie in different pairs.
pub fn build_cusp_section(p: &Polytope, cusp: u32) -> Result<CuspSection> {
    let vertex = p
        .ideal_vertices()
        .iter()
        .find(|v| v.id == cusp)
        .ok_or_else(|| Error::input(format!("{} has no ideal vertex {cusp}", p.name())))?;
    let d = p
        .dimension()
        .checked_sub(1)
        .ok_or_else(|| Error::input("a 0-dimensional polytope has no cusps"))?;
    let to_parent = vertex.incident.clone();
    if to_parent.len() != 2 * d {
        return Err(Error::structural(format!(
            "cusp {} meets {} facets, a {d}-cube has {}",
            vertex.label,
            to_parent.len(),
            2 * d
        )));
    }
    let facets: Vec<Facet> = to_parent
        .iter()
        .enumerate()
        .map(|(i, &f)| Facet {
            id: i as FacetId,
            label: p.label(f).to_string(),
            vector: None,
        })
        .collect();
    let mut adjacent = Vec::new();
    let mut partner = vec![None; to_parent.len()];
    for (i, &x) in to_parent.iter().enumerate() {
        for (j, &y) in to_parent.iter().enumerate().skip(i + 1) {
            if p.adjacent(x, y) {
                adjacent.push((i as FacetId, j as FacetId));
            } else if partner[i].is_some() || partner[j].is_some() {
                return Err(Error::structural(format!(
                    "section at {} is not a cube: {} has two non-adjacent facets",
                    vertex.label,
                    p.label(if partner[i].is_some() { x } else { y })
                )));
            } else {
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
        }
    }
    let mut pairs = Vec::new();
    for (i, q) in partner.iter().enumerate() {
        match q {
            None => {
                return Err(Error::structural(format!(
                    "section at {} is not a cube: {} has no opposite facet",
                    vertex.label,
                    p.label(to_parent[i])
                )))
            }
            Some(j) if i < *j => pairs.push((i as FacetId, *j as FacetId)),
            _ => {}
        }
    }
    let cube = Polytope::new(
        format!("H[{}]", vertex.label),
        d,
        facets,
        adjacent,
        Vec::new(),
    )?
    .with_declared(DeclaredCounts {
        cliques: vec![(d, 1 << d)],
        degree: Some(2 * d - 2),
    });
    Ok(CuspSection {
        cusp,
        cube,
        to_parent,
        pairs,
    })
}
