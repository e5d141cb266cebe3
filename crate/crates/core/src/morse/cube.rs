use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{FaceHandle, Polytope};
use crate::simplicial::SimplicialComplex;
use crate::state::{act, MoveSystem, State, Status};

/// Largest cube dimension the engine will model.
pub const MAX_CUBE_DIM: usize = 16;

/// `base + depth·ε` for an infinitesimal `ε > 0`, ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LiftValue {
    pub base: i64,
    pub depth: u32,
}

impl fmt::Display for LiftValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}ε", self.base, self.depth)
    }
}

/// A face of the standard cube `{0,1}^k`: coordinates in `free` vary, the
/// others take the bits of `fixed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CubeFace {
    pub free: u32,
    pub fixed: u32,
}

impl CubeFace {
    pub fn vertex(w: u32) -> Self {
        CubeFace { free: 0, fixed: w }
    }

    pub fn dim(&self) -> u32 {
        self.free.count_ones()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        let free = self.free;
        let mut sub = Some(0u32);
        std::iter::from_fn(move || {
            let cur = sub?;
            sub = if cur == free { None } else { Some((cur.wrapping_sub(free)) & free) };
            Some(cur | self.fixed)
        })
    }

    pub fn contains_vertex(&self, w: u32) -> bool {
        (w & !self.free) == self.fixed
    }

    /// Intersection of two faces, if nonempty.
    pub fn meet(&self, other: &CubeFace) -> Option<CubeFace> {
        let both_fixed = !self.free & !other.free;
        if (self.fixed ^ other.fixed) & both_fixed != 0 {
            return None;
        }
        let free = self.free & other.free;
        let fixed = (self.fixed | other.fixed) & !free;
        Some(CubeFace { free, fixed })
    }

    pub fn ternary(&self, k: usize) -> String {
        (0..k)
            .map(|i| {
                if self.free >> i & 1 == 1 {
                    '*'
                } else if self.fixed >> i & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    /// Image under `w ↦ perm(w XOR reflection)`, where coordinate `i` moves
    /// to position `perm[i]`.
    pub fn transport(&self, perm: &[usize], reflection: u32) -> CubeFace {
        let move_bits = |x: u32| {
            perm.iter()
                .enumerate()
                .filter(|&(i, _)| x >> i & 1 == 1)
                .fold(0u32, |acc, (_, &j)| acc | 1 << j)
        };
        CubeFace {
            free: move_bits(self.free),
            fixed: move_bits((self.fixed ^ reflection) & !self.free),
        }
    }
}

/// All faces of `{0,1}^k`, `3^k` of them, in increasing order.
pub fn cube_faces(k: usize) -> Vec<CubeFace> {
    let full = full_mask(k);
    let mut out = Vec::new();
    for free in 0..=full {
        let rest = full & !free;
        let mut fixed = 0u32;
        loop {
            out.push(CubeFace { free, fixed });
            if fixed == rest {
                break;
            }
            fixed = (fixed.wrapping_sub(rest)) & rest;
        }
    }
    out.sort_unstable();
    out
}

pub(crate) fn full_mask(k: usize) -> u32 {
    if k == 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

/// The barycentric subdivision of the boundary of `{0,1}^k`: vertices are
/// the proper faces, simplices are chains under inclusion. Cached per `k`.
pub fn boundary_subdivision(k: usize) -> Arc<SimplicialComplex<CubeFace>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<SimplicialComplex<CubeFace>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("cache lock").get(&k) {
        return c.clone();
    }
    let built = Arc::new(build_boundary_subdivision(k));
    cache.lock().expect("cache lock").entry(k).or_insert(built).clone()
}

fn build_boundary_subdivision(k: usize) -> SimplicialComplex<CubeFace> {
    if k == 0 {
        return SimplicialComplex::empty();
    }
    let mut chains = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    for w in 0..=full_mask(k) {
        for p in &perms {
            let mut free = 0u32;
            let mut chain = Vec::with_capacity(k);
            chain.push(CubeFace::vertex(w));
            for &c in &p[..k - 1] {
                free |= 1 << c;
                chain.push(CubeFace {
                    free,
                    fixed: w & !free,
                });
            }
            chains.push(chain);
        }
    }
    SimplicialComplex::from_maximal_faces(chains)
}

fn permutations(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

/// The cube dual to a face, at the copy carrying `base_state`, with the
/// lifted function on its vertices.
#[derive(Clone, Debug)]
pub struct CubeModel {
    pub face: FaceHandle,
    pub base_state: State,
    /// Move of each coordinate (coordinate `i` is the `i`-th defining facet).
    pub coord_blocks: Vec<usize>,
    /// State at `v + w`, indexed by the mask `w`.
    pub vertex_states: Vec<State>,
    vertex_lift: Vec<i64>,
}

impl CubeModel {
    pub fn dim(&self) -> usize {
        self.coord_blocks.len()
    }

    /// Status of defining facet `i` at vertex `w`.
    pub fn coord_status(&self, w: u32, i: usize) -> Status {
        self.vertex_states[w as usize].status(self.face.facets()[i])
    }

    pub fn vertex_lift(&self, w: u32) -> i64 {
        self.vertex_lift[w as usize]
    }

    pub fn lift(&self, face: &CubeFace) -> LiftValue {
        LiftValue {
            base: face.vertices().map(|w| self.vertex_lift(w)).min().unwrap_or(0),
            depth: face.dim(),
        }
    }

    pub fn top(&self) -> CubeFace {
        CubeFace {
            free: full_mask(self.dim()),
            fixed: 0,
        }
    }

    pub fn min_vertices(&self) -> Vec<u32> {
        (0..=full_mask(self.dim()))
            .filter(|&w| self.vertex_lift(w) == 0)
            .collect()
    }

    /// A cube on abstract coordinates: coordinate `i` is a facet with move
    /// `blocks[i]` and status `statuses[i]` at the base vertex.
    pub fn from_coordinates(blocks: Vec<usize>, statuses: Vec<Status>) -> Result<Self> {
        let k = blocks.len();
        if statuses.len() != k {
            return Err(Error::input("one status per coordinate is required"));
        }
        let face = FaceHandle::new(0..k as u32);
        let mut ids: Vec<usize> = blocks.clone();
        ids.sort_unstable();
        ids.dedup();
        let groups: Vec<Vec<u32>> = ids
            .iter()
            .map(|b| (0..k as u32).filter(|&i| blocks[i as usize] == *b).collect())
            .collect();
        let moves = MoveSystem::new(k, groups)?;
        build_from(face, State::new(statuses), &moves, blocks)
    }
}

/// Builds the cube dual to `face` at a copy with state `s`: vertex states by
/// move propagation, edge `w → w + eᵢ` rising by 1 when facet `i` is `Out`
/// at `w`, vertex lifts by integration, normalized to minimum 0.
pub fn build_cube_model(p: &Polytope, m: &MoveSystem, s: &State, face: &FaceHandle) -> Result<CubeModel> {
    if !p.is_clique(face.facets()) {
        return Err(Error::input(format!("{} is not a face", p.face_label(face))));
    }
    let blocks = face.facets().iter().map(|&f| m.block_of(f)).collect();
    build_from(face.clone(), s.clone(), m, blocks)
}

fn build_from(face: FaceHandle, s: State, m: &MoveSystem, coord_blocks: Vec<usize>) -> Result<CubeModel> {
    let k = face.codim();
    if k > MAX_CUBE_DIM {
        return Err(Error::input(format!("cube dimension {k} exceeds {MAX_CUBE_DIM}")));
    }
    let n = 1usize << k;
    let facets = face.facets().to_vec();
    let mut vertex_states = Vec::with_capacity(n);
    vertex_states.push(s.clone());
    for w in 1..n {
        let low = w.trailing_zeros() as usize;
        let prev: &State = &vertex_states[w & (w - 1)];
        vertex_states.push(act(prev, m, facets[low]));
    }
    let weight = |w: usize, i: usize| -> i64 {
        match vertex_states[w].status(facets[i]) {
            Status::Out => 1,
            Status::In => -1,
        }
    };
    for w in 0..n {
        for i in (0..k).filter(|&i| w >> i & 1 == 0) {
            let back = w | 1 << i;
            if vertex_states[back].status(facets[i]) == vertex_states[w].status(facets[i]) {
                return Err(Error::internal(format!(
                    "edge orientation is not well defined at vertex {w:b}, coordinate {i}"
                )));
            }
            for j in (i + 1..k).filter(|&j| w >> j & 1 == 0) {
                let one_way = weight(w, i) + weight(w | 1 << i, j);
                let other = weight(w, j) + weight(w | 1 << j, i);
                if one_way != other {
                    return Err(Error::internal(format!(
                        "cocycle condition fails on the square at {w:b} spanned by {i}, {j}"
                    )));
                }
            }
        }
    }
    let mut lift = vec![0i64; n];
    for w in 1..n {
        let low = w.trailing_zeros() as usize;
        let prev = w & (w - 1);
        lift[w] = lift[prev] + weight(prev, low);
    }
    let min = lift.iter().copied().min().unwrap_or(0);
    for v in &mut lift {
        *v -= min;
    }
    Ok(CubeModel {
        face,
        base_state: s,
        coord_blocks,
        vertex_states,
        vertex_lift: lift,
    })
}

/// Ascending and descending face links, as full subcomplexes of the
/// subdivided cube boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLinks {
    pub ascending: SimplicialComplex<CubeFace>,
    pub descending: SimplicialComplex<CubeFace>,
}

/// The literal construction: barycentres of proper faces whose lift value
/// lies strictly above (ascending) or below (descending) the top barycentre.
pub fn face_links_oracle(model: &CubeModel) -> FaceLinks {
    let k = model.dim();
    let sd = boundary_subdivision(k);
    let top = model.lift(&model.top());
    let values: HashMap<CubeFace, LiftValue> = sd.labels().iter().map(|f| (*f, model.lift(f))).collect();
    let pick = |above: bool| {
        let keep: Vec<&CubeFace> = sd
            .labels()
            .iter()
            .filter(|f| if above { values[*f] > top } else { values[*f] < top })
            .collect();
        sd.full_subcomplex(keep).expect("labels come from the complex")
    };
    FaceLinks {
        ascending: pick(true),
        descending: pick(false),
    }
}

/// A maximal set of coordinates lying in one move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub block: usize,
    /// Bit mask of the coordinates of this factor.
    pub coords: u32,
    /// Common status of the factor's facets at the base vertex.
    pub base_status: Status,
}

impl Factor {
    pub fn dim(&self) -> u32 {
        self.coords.count_ones()
    }

    /// Parity of the factor's minimum vertices: the base vertex is a
    /// minimum exactly when the factor's facets are `Out` there.
    pub fn min_parity(&self) -> u32 {
        match self.base_status {
            Status::Out => 0,
            Status::In => 1,
        }
    }

    fn component_contains_min(&self, face: &CubeFace) -> bool {
        face.free & self.coords != 0 || (face.fixed & self.coords).count_ones() % 2 == self.min_parity()
    }

    fn component_is_whole_or_max(&self, face: &CubeFace) -> bool {
        let free = face.free & self.coords;
        free == self.coords
            || (free == 0 && (face.fixed & self.coords).count_ones() % 2 != self.min_parity())
    }

    fn component_is_whole_or_min(&self, face: &CubeFace) -> bool {
        let free = face.free & self.coords;
        free == self.coords
            || (free == 0 && (face.fixed & self.coords).count_ones() % 2 == self.min_parity())
    }

    /// Lift of the factor alone at a vertex: 0 on minima, 1 elsewhere.
    fn vertex_value(&self, w: u32) -> i64 {
        i64::from((w & self.coords).count_ones() % 2 != self.min_parity())
    }
}

/// Decomposition into monochromatic factors, ordered by move. Fails when two
/// facets of one factor carry different statuses (an incompatible state).
pub fn monochromatic_factors(model: &CubeModel) -> Result<Vec<Factor>> {
    let mut by_block: BTreeMap<usize, Factor> = BTreeMap::new();
    for (i, &b) in model.coord_blocks.iter().enumerate() {
        let st = model.coord_status(0, i);
        let f = by_block.entry(b).or_insert(Factor {
            block: b,
            coords: 0,
            base_status: st,
        });
        if f.base_status != st {
            return Err(Error::internal(format!(
                "factor of move {b} is not monochromatic at the base vertex"
            )));
        }
        f.coords |= 1 << i;
    }
    Ok(by_block.into_values().collect())
}

/// Face links predicted by the product structure: the descending link is
/// spanned by faces whose every factor component contains a factor minimum;
/// the ascending link should collapse onto the join of factor ascending
/// links, spanned by faces whose components are whole factors or factor
/// maxima.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedFaceLinks {
    pub descending: SimplicialComplex<CubeFace>,
    pub ascending_core: SimplicialComplex<CubeFace>,
    pub descending_core: SimplicialComplex<CubeFace>,
}

pub fn predicted_face_links(model: &CubeModel) -> Result<PredictedFaceLinks> {
    let factors = monochromatic_factors(model)?;
    let k = model.dim();
    let sd = boundary_subdivision(k);
    let select = |rule: &dyn Fn(&Factor, &CubeFace) -> bool| {
        let keep: Vec<&CubeFace> = sd
            .labels()
            .iter()
            .filter(|f| factors.iter().all(|fa| rule(fa, f)))
            .collect();
        sd.full_subcomplex(keep).expect("labels come from the complex")
    };
    Ok(PredictedFaceLinks {
        descending: select(&|fa, f| fa.component_contains_min(f)),
        ascending_core: select(&|fa, f| fa.component_is_whole_or_max(f)),
        descending_core: select(&|fa, f| fa.component_is_whole_or_min(f)),
    })
}

/// Checks that the lift at every face equals the sum over factors of the
/// factor lifts, computed from parities alone.
pub fn check_sum_decomposition(model: &CubeModel) -> Result<bool> {
    let factors = monochromatic_factors(model)?;
    for face in cube_faces(model.dim()) {
        let predicted: i64 = factors
            .iter()
            .map(|fa| {
                let component = CubeFace {
                    free: face.free & fa.coords,
                    fixed: face.fixed & fa.coords,
                };
                component.vertices().map(|w| fa.vertex_value(w)).min().unwrap_or(0)
            })
            .sum();
        let v = model.lift(&face);
        if v.base != predicted || v.depth != face.dim() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{betti_mod2, try_collapse, CollapseConfig};
    use Status::*;

    fn mono(k: usize, st: Status) -> CubeModel {
        CubeModel::from_coordinates(vec![0; k], vec![st; k]).unwrap()
    }

    #[test]
    fn face_enumeration() {
        assert_eq!(cube_faces(2).len(), 9);
        assert_eq!(cube_faces(3).len(), 27);
        let f = CubeFace { free: 0b01, fixed: 0b10 };
        assert_eq!(f.vertices().collect::<Vec<_>>(), vec![0b10, 0b11]);
        assert_eq!(f.ternary(2), "*1");
        let g = CubeFace { free: 0b10, fixed: 0b00 };
        assert_eq!(f.meet(&g), Some(CubeFace::vertex(0b10)));
        assert_eq!(f.meet(&CubeFace::vertex(0)), None);
        let h = CubeFace { free: 0b10, fixed: 0b01 };
        assert_eq!(f.meet(&h), Some(CubeFace::vertex(0b11)));
    }

    #[test]
    fn subdivision_sizes() {
        // simplex counts of the subdivided boundary of the k-cube
        for (k, total) in [(1, 2), (2, 16), (3, 146), (4, 1696)] {
            assert_eq!(boundary_subdivision(k).simplex_count(), total, "k = {k}");
        }
    }

    #[test]
    fn monochromatic_square_values() {
        let m = mono(2, Out);
        let vals: Vec<i64> = (0..4).map(|w| m.vertex_lift(w)).collect();
        assert_eq!(vals, vec![0, 1, 1, 0]);
        for f in cube_faces(2).iter().filter(|f| f.dim() == 1) {
            assert_eq!(m.lift(f), LiftValue { base: 0, depth: 1 });
        }
        assert_eq!(m.lift(&m.top()), LiftValue { base: 0, depth: 2 });
        let links = face_links_oracle(&m);
        assert_eq!(links.ascending.f_vector(), vec![2]);
    }

    #[test]
    fn coherent_square_values() {
        let m = CubeModel::from_coordinates(vec![0, 1], vec![Out, Out]).unwrap();
        let vals: Vec<i64> = (0..4).map(|w| m.vertex_lift(w)).collect();
        assert_eq!(vals, vec![0, 1, 1, 2]);
        assert_eq!(m.lift(&m.top()), LiftValue { base: 0, depth: 2 });
        assert!(check_sum_decomposition(&m).unwrap());
    }

    #[test]
    fn monochromatic_three_cube() {
        let m = mono(3, In);
        let links = face_links_oracle(&m);
        assert_eq!(links.ascending.f_vector(), vec![4]);
        // removing the open stars of 4 vertices from the subdivided boundary
        let sd = boundary_subdivision(3);
        let maxima: Vec<CubeFace> = (0..8u32)
            .filter(|&w| m.vertex_lift(w) == 1)
            .map(CubeFace::vertex)
            .collect();
        let rest: Vec<&CubeFace> = sd.labels().iter().filter(|f| !maxima.contains(f)).collect();
        assert_eq!(links.descending, sd.full_subcomplex(rest).unwrap());
    }

    #[test]
    fn three_squares_collapse_onto_octahedra() {
        let m = CubeModel::from_coordinates(vec![0, 0, 1, 1, 2, 2], vec![Out; 6]).unwrap();
        let links = face_links_oracle(&m);
        let pred = predicted_face_links(&m).unwrap();
        assert_eq!(links.descending, pred.descending);
        assert_eq!(pred.ascending_core.vertex_count(), 26);
        assert_eq!(betti_mod2(&pred.ascending_core, 2), vec![1, 0, 1]);
        let cfg = CollapseConfig::default();
        let up = try_collapse(&links.ascending, Some(&pred.ascending_core), &cfg).unwrap();
        assert!(up.success);
    }

    #[test]
    fn base_vertex_choice_does_not_matter() {
        let m = CubeModel::from_coordinates(vec![0, 0, 1], vec![In, In, Out]).unwrap();
        let moved = CubeModel::from_coordinates(vec![0, 0, 1], vec![In, In, In]).unwrap();
        // the second is the first seen from vertex 0b111
        for w in 0..8u32 {
            assert_eq!(m.vertex_lift(w ^ 0b111), moved.vertex_lift(w));
        }
    }

    #[test]
    fn incompatible_square_is_rejected() {
        assert!(CubeModel::from_coordinates(vec![0, 0], vec![In, Out]).is_err());
    }
}
