use std::collections::HashMap;

use super::complex::{Label, Simplex, SimplicialComplex};

/// Mod-2 Betti numbers `b_0..=b_max_dim` via boundary-matrix rank over GF(2).
///
/// The empty complex has all Betti numbers zero.
pub fn betti_mod2<V: Label>(complex: &SimplicialComplex<V>, max_dim: usize) -> Vec<usize> {
    let simplices = complex.all_simplices();
    let top = complex.dim().unwrap_or(0);
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); top.max(max_dim) + 2];
    for s in simplices {
        let d = s.len() - 1;
        by_dim[d].push(s);
    }
    // rank of the boundary map from dimension d to d - 1, for d >= 1
    let mut ranks = vec![0usize; by_dim.len() + 1];
    for d in 1..by_dim.len() {
        if by_dim[d].is_empty() || by_dim[d - 1].is_empty() {
            continue;
        }
        let row_index: HashMap<&Simplex, u32> = by_dim[d - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i as u32))
            .collect();
        let columns: Vec<Vec<u32>> = by_dim[d]
            .iter()
            .map(|s| {
                let mut col: Vec<u32> = (0..s.len())
                    .map(|skip| {
                        let face: Simplex = s
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        row_index[&face]
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        ranks[d] = gf2_rank(columns);
    }
    (0..=max_dim)
        .map(|d| {
            let n = by_dim.get(d).map_or(0, |v| v.len());
            n - ranks[d] - ranks.get(d + 1).copied().unwrap_or(0)
        })
        .collect()
}

/// Rank over GF(2) of a matrix given by sparse sorted columns, using the
/// standard pivot-on-lowest-row column reduction.
pub(crate) fn gf2_rank(columns: Vec<Vec<u32>>) -> usize {
    let mut pivots: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut rank = 0;
    for mut col in columns {
        while let Some(&low) = col.last() {
            match pivots.get(&low) {
                Some(other) => col = symmetric_difference(&col, other),
                None => {
                    pivots.insert(low, col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octahedron() -> SimplicialComplex<i32> {
        let mut faces = Vec::new();
        for x in [1, -1] {
            for y in [2, -2] {
                for z in [3, -3] {
                    faces.push(vec![x, y, z]);
                }
            }
        }
        SimplicialComplex::from_maximal_faces(faces)
    }

    #[test]
    fn point_sphere_and_two_points() {
        let point = SimplicialComplex::from_maximal_faces([[0]]);
        assert_eq!(betti_mod2(&point, 0), vec![1]);
        assert_eq!(betti_mod2(&octahedron(), 2), vec![1, 0, 1]);
        let two = SimplicialComplex::from_maximal_faces([[0], [1]]);
        assert_eq!(betti_mod2(&two, 0)[0], 2);
        assert_eq!(betti_mod2(&SimplicialComplex::<u8>::empty(), 3), vec![0; 4]);
    }

    #[test]
    fn torus_has_mod2_betti_1_2_1() {
        // 7-vertex torus
        let faces: Vec<Vec<u32>> = (0..7)
            .flat_map(|i| {
                [
                    vec![i, (i + 1) % 7, (i + 3) % 7],
                    vec![i, (i + 2) % 7, (i + 3) % 7],
                ]
            })
            .collect();
        let t = SimplicialComplex::from_maximal_faces(faces);
        assert_eq!(t.f_vector(), vec![7, 21, 14]);
        assert_eq!(betti_mod2(&t, 2), vec![1, 2, 1]);
    }

    #[test]
    fn projective_plane_mod2() {
        // 6-vertex RP^2
        let faces = [
            [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
            [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
        ];
        let rp2 = SimplicialComplex::from_maximal_faces(faces);
        assert_eq!(betti_mod2(&rp2, 2), vec![1, 1, 1]);
    }
}
