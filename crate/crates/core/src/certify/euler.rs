use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::polytope::{FacetId, Polytope};
use crate::state::{classify_bad_faces, MoveSystem};

/// An exact rational, serialized as a numerator/denominator pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub numerator: i64,
    pub denominator: i64,
}

impl From<Ratio<i64>> for Rational {
    fn from(r: Ratio<i64>) -> Self {
        Rational {
            numerator: *r.numer(),
            denominator: *r.denom(),
        }
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.denominator == 1 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerRecord {
    /// Number of faces of each codimension, from an independent count.
    pub face_counts: Vec<u64>,
    pub bad_vertices: usize,
    pub chi_per_copy: Rational,
    pub critical_per_copy: Rational,
    pub pass: bool,
}

/// Compares `Σ (−1)^k N_k / 2^k` over face codimensions with the signed
/// number of square-product vertices per copy, `N / 2^dim`. Such a vertex is
/// critical of index `dim / 2` and counts `(−1)^(dim/2)`, so for P6 the
/// identity reads `χ = −N / 64`.
pub fn euler_identity(p: &Polytope, m: &MoveSystem) -> EulerRecord {
    let d = p.dimension();
    let face_counts = clique_census(p, d);
    let chi = face_counts
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            Ratio::new(sign * n as i64, 1i64 << k)
        })
        .fold(Ratio::from_integer(0), |a, b| a + b);
    let bad_vertices = classify_bad_faces(p, m)
        .into_iter()
        .filter(|(sig, _)| !sig.0.is_empty() && sig.0.iter().all(|&c| c == 2))
        .flat_map(|(_, faces)| faces)
        .filter(|f| f.codim() == d)
        .count();
    let critical = Ratio::new(bad_vertices as i64, 1i64 << d);
    let sign = if (d / 2) % 2 == 1 { -1 } else { 1 };
    EulerRecord {
        face_counts,
        bad_vertices,
        chi_per_copy: chi.into(),
        critical_per_copy: critical.into(),
        pass: chi == critical * sign,
    }
}

/// Counts cliques of sizes `0..=max` by extending each clique with larger
/// common neighbours, on adjacency rows held as plain vectors.
fn clique_census(p: &Polytope, max: usize) -> Vec<u64> {
    let n = p.facet_count();
    let rows: Vec<Vec<bool>> = (0..n as FacetId)
        .map(|a| (0..n as FacetId).map(|b| p.adjacent(a, b)).collect())
        .collect();
    let mut counts = vec![0u64; max + 1];
    fn grow(rows: &[Vec<bool>], common: &[usize], size: usize, counts: &mut [u64]) {
        counts[size] += 1;
        if size + 1 >= counts.len() {
            return;
        }
        for (i, &v) in common.iter().enumerate() {
            let next: Vec<usize> = common[i + 1..].iter().copied().filter(|&u| rows[v][u]).collect();
            grow(rows, &next, size + 1, counts);
        }
    }
    let all: Vec<usize> = (0..n).collect();
    grow(&rows, &all, 0, &mut counts);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{build_p5, build_p6};
    use crate::state::move_system_p6;

    #[test]
    fn p6_identity() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let e = euler_identity(&p, &m);
        assert_eq!(e.face_counts, vec![1, 27, 216, 720, 1080, 648, 72]);
        assert_eq!(e.bad_vertices, 8);
        // 1 - 27/2 + 216/4 - 720/8 + 1080/16 - 648/32 + 72/64
        assert_eq!(e.chi_per_copy, Rational { numerator: -1, denominator: 8 });
        assert_eq!(e.critical_per_copy, Rational { numerator: 1, denominator: 8 });
        assert!(e.pass);
    }

    #[test]
    fn p5_has_zero_characteristic() {
        let p = build_p5().unwrap();
        let m = p.moves_hint().unwrap().clone();
        let e = euler_identity(&p, &m);
        assert_eq!(e.chi_per_copy, Rational { numerator: 0, denominator: 1 });
        assert_eq!(e.bad_vertices, 0);
        assert!(e.pass);
    }

    #[test]
    fn sparse_moves_have_no_critical_vertices() {
        let p = build_p6().unwrap();
        let e = euler_identity(&p, &MoveSystem::sparse(27));
        assert_eq!(e.bad_vertices, 0);
        assert!(!e.pass);
    }
}
