//! Elementary-collapse search and certificate replay.
//!
//! The search is sound but not complete: a returned sequence always replays,
//! while a failed search only means "not certified". Strategies run in a fixed
//! order: one greedy pass taking the lexicographically smallest free face,
//! seeded random-priority greedy restarts (lowest successful seed wins), and
//! an exhaustive backtracking search for small complexes.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::complex::{is_subset, JoinLabel, Label, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseConfig {
    pub seed: u64,
    pub restarts: u32,
    /// Exhaustive backtracking runs only below this many simplices.
    pub exhaustive_threshold: usize,
    /// Upper bound on states visited by the exhaustive search.
    pub exhaustive_budget: usize,
    pub parallel_restarts: bool,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        CollapseConfig {
            seed: 0,
            restarts: 64,
            exhaustive_threshold: 200,
            exhaustive_budget: 200_000,
            parallel_restarts: false,
        }
    }
}

impl CollapseConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        CollapseConfig {
            seed,
            ..self.clone()
        }
    }
}

/// One elementary collapse: `face` is free and `coface` is its unique proper
/// coface, one dimension higher.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollapseStep<V> {
    pub face: Vec<V>,
    pub coface: Vec<V>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStrategy {
    Greedy,
    RandomRestart { seed: u64 },
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct CollapseOutcome<V> {
    pub success: bool,
    pub strategy: Option<SearchStrategy>,
    pub sequence: Vec<CollapseStep<V>>,
    pub core: SimplicialComplex<V>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("target is not a subcomplex of the input")]
    TargetNotSubcomplex,
    #[error("step {step}: simplex is not present")]
    Missing { step: usize },
    #[error("step {step}: coface is not one dimension above the face")]
    NotCodimensionOne { step: usize },
    #[error("step {step}: face is not free")]
    NotFree { step: usize },
    #[error("step {step}: face belongs to the protected target")]
    Protected { step: usize },
    #[error("replay ended at a core that is not the declared one")]
    WrongCore,
}

/// Face poset of a complex with codimension-one incidences.
pub(crate) struct Lattice {
    pub(crate) simplices: Vec<Simplex>,
    index: FxHashMap<Simplex, u32>,
    faces: Vec<Vec<u32>>,
    cofaces: Vec<Vec<u32>>,
}

impl Lattice {
    pub(crate) fn new<V: Label>(complex: &SimplicialComplex<V>) -> Self {
        let simplices = complex.all_simplices();
        let index: FxHashMap<Simplex, u32> = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let mut faces = vec![Vec::new(); simplices.len()];
        let mut cofaces = vec![Vec::new(); simplices.len()];
        let mut buf = Vec::new();
        for (i, s) in simplices.iter().enumerate() {
            if s.len() < 2 {
                continue;
            }
            for skip in 0..s.len() {
                buf.clear();
                buf.extend(s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
                let f = index[&buf];
                faces[i].push(f);
                cofaces[f as usize].push(i as u32);
            }
        }
        Lattice {
            simplices,
            index,
            faces,
            cofaces,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.simplices.len()
    }

    pub(crate) fn id(&self, s: &[u32]) -> Option<u32> {
        self.index.get(s).copied()
    }
}

#[derive(Clone)]
struct Collapser<'a> {
    lat: &'a Lattice,
    alive: Vec<bool>,
    up: Vec<u32>,
    protected: &'a [bool],
    alive_count: usize,
    protected_count: usize,
}

impl<'a> Collapser<'a> {
    fn new(lat: &'a Lattice, protected: &'a [bool]) -> Self {
        Collapser {
            lat,
            alive: vec![true; lat.len()],
            up: lat.cofaces.iter().map(|c| c.len() as u32).collect(),
            protected,
            alive_count: lat.len(),
            protected_count: protected.iter().filter(|&&p| p).count(),
        }
    }

    fn free_coface(&self, s: u32) -> Option<u32> {
        let su = s as usize;
        if !self.alive[su] || self.protected[su] || self.up[su] != 1 {
            return None;
        }
        let c = *self.lat.cofaces[su].iter().find(|&&c| self.alive[c as usize])?;
        (self.up[c as usize] == 0).then_some(c)
    }

    fn collapse(&mut self, s: u32, c: u32, touched: &mut Vec<u32>) {
        for x in [c, s] {
            self.alive[x as usize] = false;
            self.alive_count -= 1;
            for &f in &self.lat.faces[x as usize] {
                if !self.alive[f as usize] {
                    continue;
                }
                self.up[f as usize] -= 1;
                touched.push(f);
                if self.up[f as usize] == 0 {
                    touched.extend(self.lat.faces[f as usize].iter().copied());
                }
            }
        }
    }

    fn finished(&self, relative: bool) -> bool {
        if relative {
            self.alive_count == self.protected_count
        } else {
            self.alive_count == 1
        }
    }

    /// Greedy collapse, always taking the free face of least priority.
    fn greedy(&mut self, priority: &dyn Fn(u32) -> u64) -> Vec<(u32, u32)> {
        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = (0..self.lat.len() as u32)
            .filter(|&s| self.free_coface(s).is_some())
            .map(|s| Reverse((priority(s), s)))
            .collect();
        let mut steps = Vec::new();
        let mut touched = Vec::new();
        while let Some(Reverse((_, s))) = heap.pop() {
            let Some(c) = self.free_coface(s) else { continue };
            touched.clear();
            self.collapse(s, c, &mut touched);
            steps.push((s, c));
            for &t in &touched {
                if self.free_coface(t).is_some() {
                    heap.push(Reverse((priority(t), t)));
                }
            }
        }
        steps
    }

    fn free_pairs(&self) -> Vec<(u32, u32)> {
        (0..self.lat.len() as u32)
            .filter_map(|s| self.free_coface(s).map(|c| (s, c)))
            .collect()
    }

    fn core_simplices(&self) -> Vec<Simplex> {
        self.lat
            .simplices
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.alive[i])
            .map(|(_, s)| s.clone())
            .collect()
    }
}

fn exhaustive(
    start: &Collapser<'_>,
    relative: bool,
    budget: usize,
) -> Option<Vec<(u32, u32)>> {
    fn key(c: &Collapser<'_>) -> Vec<u64> {
        let mut words = vec![0u64; c.alive.len().div_ceil(64)];
        for (i, &a) in c.alive.iter().enumerate() {
            if a {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }
    fn dfs(
        state: &Collapser<'_>,
        relative: bool,
        path: &mut Vec<(u32, u32)>,
        dead: &mut HashSet<Vec<u64>>,
        budget: &mut usize,
    ) -> bool {
        if state.finished(relative) {
            return true;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let k = key(state);
        if dead.contains(&k) {
            return false;
        }
        let mut scratch = Vec::new();
        for (s, c) in state.free_pairs() {
            let mut next = state.clone();
            next.collapse(s, c, &mut scratch);
            path.push((s, c));
            if dfs(&next, relative, path, dead, budget) {
                return true;
            }
            path.pop();
            if *budget == 0 {
                return false;
            }
        }
        dead.insert(k);
        false
    }
    let mut path = Vec::new();
    let mut dead = HashSet::new();
    let mut budget = budget;
    dfs(start, relative, &mut path, &mut dead, &mut budget).then_some(path)
}

fn protected_mask<V: Label>(
    complex: &SimplicialComplex<V>,
    lat: &Lattice,
    target: Option<&SimplicialComplex<V>>,
) -> Option<Vec<bool>> {
    let mut mask = vec![false; lat.len()];
    let Some(target) = target else { return Some(mask) };
    for s in target.all_simplices() {
        let labels = target.labels_of(&s);
        let idx = complex.indices_of(&labels)?;
        mask[lat.id(&idx)? as usize] = true;
    }
    Some(mask)
}

/// Searches for a sequence of elementary collapses from `complex` down to a
/// single vertex (no target) or exactly onto `target`, whose simplices are
/// never removed.
pub fn try_collapse<V: Label>(
    complex: &SimplicialComplex<V>,
    target: Option<&SimplicialComplex<V>>,
    config: &CollapseConfig,
) -> Result<CollapseOutcome<V>> {
    let lat = Lattice::new(complex);
    let protected = protected_mask(complex, &lat, target)
        .ok_or_else(|| Error::input("collapse target is not a subcomplex"))?;
    let relative = target.is_some();
    let to_outcome = |success: bool, strategy, steps: &[(u32, u32)], core: Vec<Simplex>| {
        CollapseOutcome {
            success,
            strategy: success.then_some(strategy),
            sequence: steps
                .iter()
                .map(|&(s, c)| CollapseStep {
                    face: complex.labels_of(&lat.simplices[s as usize]),
                    coface: complex.labels_of(&lat.simplices[c as usize]),
                })
                .collect(),
            core: SimplicialComplex::from_index_faces(complex.labels().to_vec(), core),
        }
    };

    if complex.is_empty() {
        return Ok(to_outcome(relative, SearchStrategy::Greedy, &[], Vec::new()));
    }

    let mut first = Collapser::new(&lat, &protected);
    let steps = first.greedy(&|s| s as u64);
    if first.finished(relative) {
        return Ok(to_outcome(true, SearchStrategy::Greedy, &steps, first.core_simplices()));
    }

    let attempt = |i: u32| {
        let seed = config.seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keys: Vec<u64> = (0..lat.len()).map(|_| rng.gen()).collect();
        let mut c = Collapser::new(&lat, &protected);
        let steps = c.greedy(&|s| keys[s as usize]);
        c.finished(relative)
            .then(|| (seed, steps, c.core_simplices()))
    };
    let found = if config.parallel_restarts {
        (0..config.restarts).into_par_iter().find_map_first(attempt)
    } else {
        (0..config.restarts).find_map(attempt)
    };
    if let Some((seed, steps, core)) = found {
        return Ok(to_outcome(true, SearchStrategy::RandomRestart { seed }, &steps, core));
    }

    if lat.len() <= config.exhaustive_threshold {
        let start = Collapser::new(&lat, &protected);
        if let Some(path) = exhaustive(&start, relative, config.exhaustive_budget) {
            let mut end = start.clone();
            let mut scratch = Vec::new();
            for &(s, c) in &path {
                end.collapse(s, c, &mut scratch);
            }
            return Ok(to_outcome(true, SearchStrategy::Exhaustive, &path, end.core_simplices()));
        }
    }

    Ok(to_outcome(false, SearchStrategy::Greedy, &steps, first.core_simplices()))
}

/// Replays a collapse sequence, checking every step, and returns the
/// complex that remains.
pub fn replay<V: Label>(
    complex: &SimplicialComplex<V>,
    steps: &[CollapseStep<V>],
    target: Option<&SimplicialComplex<V>>,
) -> Result<SimplicialComplex<V>, ReplayError> {
    let lat = Lattice::new(complex);
    let protected =
        protected_mask(complex, &lat, target).ok_or(ReplayError::TargetNotSubcomplex)?;
    let mut state = Collapser::new(&lat, &protected);
    let mut scratch = Vec::new();
    for (step, st) in steps.iter().enumerate() {
        let id = |labels: &[V]| {
            complex
                .indices_of(labels)
                .filter(|s| s.len() == labels.len())
                .and_then(|s| lat.id(&s))
                .ok_or(ReplayError::Missing { step })
        };
        let s = id(&st.face)?;
        let c = id(&st.coface)?;
        let (fs, cs) = (&lat.simplices[s as usize], &lat.simplices[c as usize]);
        if cs.len() != fs.len() + 1 || !is_subset(fs, cs) {
            return Err(ReplayError::NotCodimensionOne { step });
        }
        if !state.alive[s as usize] || !state.alive[c as usize] {
            return Err(ReplayError::Missing { step });
        }
        if protected[s as usize] {
            return Err(ReplayError::Protected { step });
        }
        if state.free_coface(s) != Some(c) {
            return Err(ReplayError::NotFree { step });
        }
        scratch.clear();
        state.collapse(s, c, &mut scratch);
    }
    Ok(SimplicialComplex::from_index_faces(
        complex.labels().to_vec(),
        state.core_simplices(),
    ))
}

/// Replays and checks the end state: exactly `target`, or a single vertex
/// when no target is given.
pub fn verify_collapse<V: Label>(
    complex: &SimplicialComplex<V>,
    steps: &[CollapseStep<V>],
    target: Option<&SimplicialComplex<V>>,
) -> Result<(), ReplayError> {
    let core = replay(complex, steps, target)?;
    let ok = match target {
        Some(t) => &core == t,
        None => core.vertex_count() == 1,
    };
    if ok {
        Ok(())
    } else {
        Err(ReplayError::WrongCore)
    }
}

/// The canonical collapse of a cone onto its apex: pairs `(σ, σ ∪ {apex})`
/// for every σ avoiding the apex, largest first. `None` if `complex` is not a
/// cone with that apex.
pub fn cone_collapse_sequence<V: Label>(
    complex: &SimplicialComplex<V>,
    apex: &V,
) -> Option<Vec<CollapseStep<V>>> {
    if !complex.is_cone_with_apex(apex) {
        return None;
    }
    let a = complex.index_of(apex)?;
    let mut base: Vec<Simplex> = complex
        .all_simplices()
        .into_iter()
        .filter(|s| s.binary_search(&a).is_err())
        .collect();
    base.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    Some(
        base.into_iter()
            .map(|s| {
                let mut c = s.clone();
                let pos = c.binary_search(&a).unwrap_err();
                c.insert(pos, a);
                CollapseStep {
                    face: complex.labels_of(&s),
                    coface: complex.labels_of(&c),
                }
            })
            .collect(),
    )
}

/// Removes the open star of `vertex`, given a collapse of its link onto the
/// single vertex `link_core`: each link step is lifted by adding `vertex`,
/// then the edge to `link_core` is collapsed from the `vertex` end.
pub fn star_removal_sequence<V: Label>(
    vertex: &V,
    link_steps: &[CollapseStep<V>],
    link_core: &V,
) -> Vec<CollapseStep<V>> {
    let with = |s: &[V]| {
        let mut s = s.to_vec();
        s.push(vertex.clone());
        s.sort();
        s
    };
    let mut out: Vec<CollapseStep<V>> = link_steps
        .iter()
        .map(|st| CollapseStep {
            face: with(&st.face),
            coface: with(&st.coface),
        })
        .collect();
    out.push(CollapseStep {
        face: vec![vertex.clone()],
        coface: with(std::slice::from_ref(link_core)),
    });
    out
}

/// Lifts a collapse of `left` onto the vertex `left_core` to a collapse of
/// the join `left * right` onto the same vertex.
pub fn join_collapse_sequence<V: Label, W: Label>(
    left_steps: &[CollapseStep<V>],
    left_core: &V,
    right: &SimplicialComplex<W>,
) -> Vec<CollapseStep<JoinLabel<V, W>>> {
    let mut tails: Vec<Vec<W>> = right
        .all_simplices()
        .iter()
        .map(|s| right.labels_of(s))
        .collect();
    tails.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    tails.push(Vec::new());
    let glue = |head: &[V], tail: &[W]| {
        let mut s: Vec<JoinLabel<V, W>> = head
            .iter()
            .cloned()
            .map(JoinLabel::Left)
            .chain(tail.iter().cloned().map(JoinLabel::Right))
            .collect();
        s.sort();
        s
    };
    let mut out = Vec::new();
    for st in left_steps {
        for tail in &tails {
            out.push(CollapseStep {
                face: glue(&st.face, tail),
                coface: glue(&st.coface, tail),
            });
        }
    }
    // what remains is the cone left_core * right
    for tail in tails.iter().filter(|t| !t.is_empty()) {
        out.push(CollapseStep {
            face: glue(&[], tail),
            coface: glue(std::slice::from_ref(left_core), tail),
        });
    }
    out
}
