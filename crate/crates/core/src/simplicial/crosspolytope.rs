use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::complex::{Label, SimplicialComplex};

/// Antipodal pairing exhibiting a complex as the join of `k` copies of S⁰.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossPolytopeWitness<V> {
    pub pairs: Vec<(V, V)>,
}

/// Decides whether `complex` is the boundary of the `k`-dimensional
/// cross-polytope: `2k` vertices in antipodal pairs, whose maximal faces are
/// exactly the `2^k` transversals of the pairs.
pub fn is_crosspolytope_boundary<V: Label>(
    complex: &SimplicialComplex<V>,
    k: usize,
) -> Option<CrossPolytopeWitness<V>> {
    if k == 0 || complex.vertex_count() != 2 * k {
        return None;
    }
    let n = 2 * k;
    let mut adjacent = vec![vec![false; n]; n];
    for (a, b) in complex.edges() {
        adjacent[a as usize][b as usize] = true;
        adjacent[b as usize][a as usize] = true;
    }
    let mut partner = vec![usize::MAX; n];
    for v in 0..n {
        let others: Vec<usize> = (0..n).filter(|&u| u != v && !adjacent[v][u]).collect();
        if others.len() != 1 {
            return None;
        }
        partner[v] = others[0];
    }
    if (0..n).any(|v| partner[partner[v]] != v) {
        return None;
    }
    let pairs: Vec<(usize, usize)> = (0..n).filter(|&v| v < partner[v]).map(|v| (v, partner[v])).collect();
    if pairs.len() != k {
        return None;
    }
    let faces: BTreeSet<Vec<u32>> = complex.maximal_faces().iter().cloned().collect();
    if faces.len() != 1 << k {
        return None;
    }
    for mask in 0u64..(1 << k) {
        let mut t: Vec<u32> = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| if mask >> i & 1 == 0 { a as u32 } else { b as u32 })
            .collect();
        t.sort_unstable();
        if !faces.contains(&t) {
            return None;
        }
    }
    Some(CrossPolytopeWitness {
        pairs: pairs
            .into_iter()
            .map(|(a, b)| (complex.label(a as u32).clone(), complex.label(b as u32).clone()))
            .collect(),
    })
}

/// Checks a claimed witness against a complex without searching.
pub fn check_crosspolytope_witness<V: Label>(
    complex: &SimplicialComplex<V>,
    witness: &CrossPolytopeWitness<V>,
) -> bool {
    let k = witness.pairs.len();
    let faces: Vec<Vec<V>> = (0u64..(1 << k))
        .map(|mask| {
            witness
                .pairs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| if mask >> i & 1 == 0 { a.clone() } else { b.clone() })
                .collect()
        })
        .collect();
    k > 0 && &SimplicialComplex::from_maximal_faces(faces) == complex
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> SimplicialComplex<u32> {
        SimplicialComplex::from_maximal_faces((0..n).map(|i| [i, (i + 1) % n]))
    }

    #[test]
    fn four_cycle_and_octahedron() {
        let w = is_crosspolytope_boundary(&cycle(4), 2).unwrap();
        assert_eq!(w.pairs, vec![(0, 2), (1, 3)]);
        assert!(check_crosspolytope_witness(&cycle(4), &w));
        let s0 = |a: i32| SimplicialComplex::from_maximal_faces([[a], [-a]]);
        let oct = s0(1).join(&s0(2)).unwrap().join(&s0(3)).unwrap();
        let w = is_crosspolytope_boundary(&oct, 3).unwrap();
        assert_eq!(w.pairs.len(), 3);
        assert!(check_crosspolytope_witness(&oct, &w));
    }

    #[test]
    fn rejects_wrong_shapes() {
        assert!(is_crosspolytope_boundary(&cycle(6), 2).is_none());
        assert!(is_crosspolytope_boundary(&cycle(4), 3).is_none());
        let solid = SimplicialComplex::from_maximal_faces([[0, 1, 2, 3]]);
        assert!(is_crosspolytope_boundary(&solid, 2).is_none());
        let s0 = SimplicialComplex::from_maximal_faces([[0], [1]]);
        assert!(is_crosspolytope_boundary(&s0, 1).is_some());
    }
}
