use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::quaternion::{r_value, Quaternion};
use super::{adjacency_from_lorentz, DeclaredCounts, Facet, FacetId, IdealVertex, Polytope};
use crate::error::{Error, Result};
use crate::state::{move_system_p6, MoveSystem};

pub const P6_ROW_COUNT: usize = 27;

/// Unit normals and labels of the 27 facets, in table order.
pub fn p6_table() -> [([i64; 7], &'static str); P6_ROW_COUNT] {
    [
        ([0, 0, 0, 0, 0, -1, 0], "A"),
        ([0, 0, 0, 0, -1, 0, 0], "1+i+j+k"),
        ([1, 1, 1, 1, 1, 0, 2], "-1-i-j-k"),
        ([1, 1, 0, 0, 0, 0, 1], "1+i-j-k"),
        ([1, 0, 1, 0, 0, 0, 1], "1-i+j-k"),
        ([1, 0, 0, 1, 0, 0, 1], "1-i-j+k"),
        ([1, 0, 0, 0, 1, 0, 1], "1-i-j-k"),
        ([0, 1, 1, 0, 0, 0, 1], "-1+i+j-k"),
        ([0, 1, 0, 1, 0, 0, 1], "-1+i-j+k"),
        ([0, 1, 0, 0, 1, 0, 1], "-1+i-j-k"),
        ([0, 0, 1, 1, 0, 0, 1], "-1-i+j+k"),
        ([0, 0, 1, 0, 1, 0, 1], "-1-i+j-k"),
        ([0, 0, 0, 1, 1, 0, 1], "-1-i-j+k"),
        ([-1, 0, 0, 0, 0, 0, 0], "-1+i+j+k"),
        ([0, -1, 0, 0, 0, 0, 0], "1-i+j+k"),
        ([0, 0, -1, 0, 0, 0, 0], "1+i-j+k"),
        ([0, 0, 0, -1, 0, 0, 0], "1+i+j-k"),
        ([1, 0, 0, 0, 0, 1, 1], "1"),
        ([0, 1, 1, 1, 1, 1, 2], "-1"),
        ([0, 1, 0, 0, 0, 1, 1], "i"),
        ([1, 0, 1, 1, 1, 1, 2], "-i"),
        ([0, 0, 1, 0, 0, 1, 1], "j"),
        ([1, 1, 0, 1, 1, 1, 2], "-j"),
        ([0, 0, 0, 1, 0, 1, 1], "k"),
        ([1, 1, 1, 0, 1, 1, 2], "-k"),
        ([0, 0, 0, 0, 1, 1, 1], "C"),
        ([1, 1, 1, 1, 0, 1, 2], "B"),
    ]
}

/// The right-angled 6-polytope with 27 facets, built from its unit normals
/// and checked against the quaternion labelling rules.
pub fn build_p6() -> Result<Polytope> {
    let table = p6_table();
    let vectors: Vec<[i64; 7]> = table.iter().map(|(v, _)| *v).collect();
    let pairs = adjacency_from_lorentz(&vectors)?;
    let facets: Vec<Facet> = table
        .iter()
        .enumerate()
        .map(|(i, (v, l))| Facet {
            id: i as FacetId,
            label: l.to_string(),
            vector: Some(*v),
        })
        .collect();
    let mut p = Polytope::new("P6", 6, facets, pairs, Vec::new())?;
    check_label_rules(&p)?;

    // the ideal vertex opposed to F is incident to the facets that are
    // neither F nor adjacent to F
    let ideal: Vec<IdealVertex> = p
        .facet_ids()
        .map(|f| IdealVertex {
            id: f,
            label: format!("c({})", p.label(f)),
            incident: p.facet_ids().filter(|&g| g != f && !p.adjacent(f, g)).collect(),
        })
        .collect();
    if let Some(v) = ideal.iter().find(|v| v.incident.len() != 10) {
        return Err(Error::structural(format!(
            "ideal vertex {} is incident to {} facets, expected 10",
            v.label,
            v.incident.len()
        )));
    }
    p.ideal_vertices = ideal;
    p.declared = DeclaredCounts {
        cliques: vec![(1, 27), (6, 72)],
        degree: Some(16),
    };
    let moves = move_system_p6(&p)?;
    Ok(p.with_moves_hint(moves))
}

enum P6Label {
    Abc(char),
    Quat(Quaternion),
}

fn parse_p6_label(label: &str) -> Result<P6Label> {
    match label {
        "A" | "B" | "C" => Ok(P6Label::Abc(label.chars().next().unwrap_or('A'))),
        _ => {
            let q: Quaternion = label.parse()?;
            if q.is_q8() || q.is_tetrahedral() {
                Ok(P6Label::Quat(q))
            } else {
                Err(Error::input(format!("{label:?} is not a P6 facet label")))
            }
        }
    }
}

fn check_label_rules(p: &Polytope) -> Result<()> {
    let labels: Vec<P6Label> = p
        .facet_ids()
        .map(|f| parse_p6_label(p.label(f)))
        .collect::<Result<_>>()?;
    let fail = |rule: &str, a: FacetId, b: FacetId| {
        Err(Error::structural(format!(
            "labelling rule '{rule}' fails on {} and {}",
            p.label(a),
            p.label(b)
        )))
    };
    for a in p.facet_ids() {
        for b in p.facet_ids().filter(|&b| b > a) {
            let adj = p.adjacent(a, b);
            match (&labels[a as usize], &labels[b as usize]) {
                (P6Label::Abc(_), P6Label::Abc(_)) => {
                    if adj {
                        return fail("A, B, C pairwise disjoint", a, b);
                    }
                }
                (P6Label::Quat(x), P6Label::Quat(y)) => {
                    if adj != (x.dot(y) >= 0) {
                        return fail("adjacent iff Euclidean product is non-negative", a, b);
                    }
                }
                (P6Label::Abc(c), P6Label::Quat(q)) | (P6Label::Quat(q), P6Label::Abc(c)) => {
                    let expected = match c {
                        'A' => q.is_tetrahedral(),
                        'B' => q.is_q8() || q.minus_signs() % 2 == 0,
                        _ => q.is_q8() || q.minus_signs() % 2 == 1,
                    };
                    if adj != expected {
                        let rule = if *c == 'A' {
                            "A adjacent exactly to ±1±i±j±k"
                        } else {
                            "B/C adjacency by parity of minus signs"
                        };
                        return fail(rule, a, b);
                    }
                }
            }
        }
    }
    Ok(())
}

/// A facet permutation of P6 induced by an element of the order-16 group
/// generated by left multiplication by Q8 and the involution ι.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetry {
    pub name: String,
    /// `perm[f]` is the image of facet `f`.
    pub perm: Vec<FacetId>,
}

/// The 16 label symmetries `t ↦ q·t` and `t ↦ q·ι(t)`, each checked to
/// preserve adjacency and the move partition and to commute with `r`.
pub fn symmetries_p6(p: &Polytope, moves: &MoveSystem) -> Result<Vec<Symmetry>> {
    let find = |label: &str| {
        p.facet_by_label(label)
            .ok_or_else(|| Error::internal(format!("P6 has no facet {label}")))
    };
    let (b, c) = (find("B")?, find("C")?);
    let mut out = Vec::new();
    for with_iota in [false, true] {
        for q in Quaternion::q8() {
            let act = |t: Quaternion| q * if with_iota { t.iota() } else { t };
            let mut perm = Vec::with_capacity(p.facet_count());
            for f in p.facet_ids() {
                let image = match parse_p6_label(p.label(f))? {
                    P6Label::Abc(_) if with_iota && f == b => c,
                    P6Label::Abc(_) if with_iota && f == c => b,
                    P6Label::Abc(_) => f,
                    P6Label::Quat(t) => {
                        let u = act(t);
                        let image = find(&u.to_string())?;
                        if let (Some(rt), Some(ru)) = (r_value(t), r_value(u)) {
                            if ru != act(rt) {
                                return Err(Error::structural(format!(
                                    "r is not equivariant at {t} under {q}{}",
                                    if with_iota { "·ι" } else { "" }
                                )));
                            }
                        }
                        image
                    }
                };
                perm.push(image);
            }
            let name = format!("{q}{}", if with_iota { "·ι" } else { "" });
            validate_symmetry(p, moves, &name, &perm)?;
            out.push(Symmetry { name, perm });
        }
    }
    Ok(out)
}

fn validate_symmetry(p: &Polytope, moves: &MoveSystem, name: &str, perm: &[FacetId]) -> Result<()> {
    let distinct: BTreeSet<FacetId> = perm.iter().copied().collect();
    if distinct.len() != p.facet_count() {
        return Err(Error::structural(format!("{name} is not a permutation")));
    }
    for (a, b) in p.adjacent_pairs() {
        if !p.adjacent(perm[a as usize], perm[b as usize]) {
            return Err(Error::structural(format!(
                "{name} breaks the adjacency of {} and {}",
                p.label(a),
                p.label(b)
            )));
        }
    }
    for block in moves.blocks() {
        let image: BTreeSet<usize> = block.iter().map(|&f| moves.block_of(perm[f as usize])).collect();
        if image.len() != 1 {
            return Err(Error::structural(format!("{name} does not preserve the moves")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{enumerate_faces, lorentz};

    #[test]
    fn table_rows_are_unit_vectors() {
        for (v, l) in p6_table() {
            assert_eq!(lorentz(&v, &v), 1, "{l}");
        }
    }

    #[test]
    fn sample_products() {
        let t = p6_table();
        let a = t[0].0;
        let v = |label: &str| t.iter().find(|(_, l)| *l == label).unwrap().0;
        assert_eq!(lorentz(&a, &v("1+i+j+k")), 0);
        assert_eq!(lorentz(&a, &v("1")), -1);
    }

    #[test]
    fn counts() {
        let p = build_p6().unwrap();
        assert_eq!(p.facet_count(), 27);
        assert!(p.facet_ids().all(|f| p.degree(f) == 16));
        assert_eq!(enumerate_faces(&p, 6).len(), 72);
        assert_eq!(p.ideal_vertices().len(), 27);
        let one = p.facet_by_label("1").unwrap();
        let minus_one = p.facet_by_label("-1").unwrap();
        assert!(!p.adjacent(one, minus_one));
    }

    #[test]
    fn iota_images() {
        let p = build_p6().unwrap();
        let m = p.moves_hint().unwrap();
        let syms = symmetries_p6(&p, m).unwrap();
        assert_eq!(syms.len(), 16);
        let iota = syms.iter().find(|s| s.name == "1·ι").unwrap();
        let img = |l: &str| p.label(iota.perm[p.facet_by_label(l).unwrap() as usize]).to_string();
        assert_eq!(img("i"), "-i");
        assert_eq!(img("j"), "-k");
        assert_eq!(img("k"), "-j");
        assert_eq!(img("B"), "C");
        assert_eq!(img("A"), "A");
        let by_i = syms.iter().find(|s| s.name == "i").unwrap();
        assert_eq!(p.label(by_i.perm[p.facet_by_label("1").unwrap() as usize]), "i");
    }
}
