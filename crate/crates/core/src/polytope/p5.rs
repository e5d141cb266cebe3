use super::quaternion::Quaternion;
use super::{build_p6, DeclaredCounts, Facet, FacetId, IdealVertex, Polytope};
use crate::error::{Error, Result};
use crate::state::MoveSystem;

/// Sign vector of the half-space `σ·x ≤ 1` of the facet labelled
/// `±1±i±j±k`: the first four signs from the label, the fifth making the
/// number of minus signs even.
pub fn p5_sign_vector(label: Quaternion) -> Option<[i8; 5]> {
    if !label.is_tetrahedral() {
        return None;
    }
    let mut s = [1i8; 5];
    for (slot, c) in s.iter_mut().zip(label.coords()) {
        *slot = c.signum() as i8;
    }
    if label.minus_signs() % 2 == 1 {
        s[4] = -1;
    }
    Some(s)
}

/// The facet of P6 labelled `A`, as a polytope in its own right: facets are
/// the 16 neighbours of `A`, ideal vertices are labelled by `Q8 ∪ {B, C}`.
/// Checked against the sign-vector model of the half-spaces
/// `±x₁±x₂±x₃±x₄±x₅ ≤ 1` with an even number of minus signs.
pub fn build_p5() -> Result<Polytope> {
    let p6 = build_p6()?;
    let a = p6
        .facet_by_label("A")
        .ok_or_else(|| Error::internal("P6 has no facet A"))?;
    let parents: Vec<FacetId> = p6.neighbours(a).collect();
    let facets: Vec<Facet> = parents
        .iter()
        .enumerate()
        .map(|(i, &f)| Facet {
            id: i as FacetId,
            label: p6.label(f).to_string(),
            vector: None,
        })
        .collect();
    let mut pairs = Vec::new();
    for (i, &x) in parents.iter().enumerate() {
        for (j, &y) in parents.iter().enumerate().skip(i + 1) {
            if p6.adjacent(x, y) {
                pairs.push((i as FacetId, j as FacetId));
            }
        }
    }
    let far: Vec<FacetId> = p6
        .facet_ids()
        .filter(|&f| f != a && !p6.adjacent(a, f))
        .collect();
    let ideal: Vec<IdealVertex> = far
        .iter()
        .enumerate()
        .map(|(n, &g)| IdealVertex {
            id: n as u32,
            label: p6.label(g).to_string(),
            incident: parents
                .iter()
                .enumerate()
                .filter(|&(_, &t)| p6.adjacent(t, g))
                .map(|(i, _)| i as FacetId)
                .collect(),
        })
        .collect();
    let mut p = Polytope::new("P5", 5, facets, pairs, ideal)?;
    cross_validate(&p)?;
    p.declared = DeclaredCounts {
        cliques: vec![(1, 16), (5, 16)],
        degree: None,
    };
    let blocks = restricted_moves(&p6, &parents)?;
    let moves = MoveSystem::new(p.facet_count(), blocks)?;
    Ok(p.with_moves_hint(moves))
}

fn restricted_moves(p6: &Polytope, parents: &[FacetId]) -> Result<Vec<Vec<FacetId>>> {
    let m6 = p6
        .moves_hint()
        .ok_or_else(|| Error::internal("P6 carries no move system"))?;
    let mut blocks: Vec<Vec<FacetId>> = vec![Vec::new(); m6.block_count()];
    for (i, &f) in parents.iter().enumerate() {
        blocks[m6.block_of(f)].push(i as FacetId);
    }
    blocks.retain(|b| !b.is_empty());
    Ok(blocks)
}

fn ideal_direction(label: &str) -> Result<(usize, i8)> {
    match label {
        "B" => Ok((4, 1)),
        "C" => Ok((4, -1)),
        _ => {
            let q: Quaternion = label.parse()?;
            let coords = q.coords();
            match coords.iter().position(|&c| c != 0) {
                Some(slot) if q.is_q8() => Ok((slot, coords[slot].signum() as i8)),
                _ => Err(Error::structural(format!("{label:?} is not an ideal vertex label of P5"))),
            }
        }
    }
}

fn cross_validate(p: &Polytope) -> Result<()> {
    let signs: Vec<[i8; 5]> = p
        .facet_ids()
        .map(|f| {
            let q: Quaternion = p.label(f).parse()?;
            p5_sign_vector(q)
                .ok_or_else(|| Error::structural(format!("{} is not of the form ±1±i±j±k", p.label(f))))
        })
        .collect::<Result<_>>()?;
    for a in p.facet_ids() {
        for b in p.facet_ids().filter(|&b| b > a) {
            let differ = (0..5)
                .filter(|&c| signs[a as usize][c] != signs[b as usize][c])
                .count();
            if p.adjacent(a, b) != (differ == 2) {
                return Err(Error::structural(format!(
                    "P5 adjacency of {} and {} disagrees with the sign-vector model",
                    p.label(a),
                    p.label(b)
                )));
            }
        }
    }
    if p.ideal_vertices().len() != 10 {
        return Err(Error::structural(format!(
            "P5 has {} ideal vertices, expected 10",
            p.ideal_vertices().len()
        )));
    }
    for v in p.ideal_vertices() {
        let (slot, sign) = ideal_direction(&v.label)?;
        let expected: Vec<FacetId> = p
            .facet_ids()
            .filter(|&f| signs[f as usize][slot] == sign)
            .collect();
        if expected != v.incident {
            return Err(Error::structural(format!(
                "incidence of ideal vertex {} disagrees with the sign-vector model",
                v.label
            )));
        }
    }
    Ok(())
}
