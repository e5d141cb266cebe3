//! Moves, states and the combinatorial game played on the facets.

mod faces;
mod legality;
mod p6;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polytope::{FacetId, Polytope};

pub use faces::{
    classify_bad_faces, face_signature, good_face_witness, inherited_state, is_good_face,
    BadFaceSignature, InheritedState,
};
pub use legality::{legality, state_subcomplexes, Legality};
pub use p6::{balanced_states_p6, is_balanced_p6, move_system_p6, p6_triples};

/// A partition of the facets into blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<FacetId>>", into = "Vec<Vec<FacetId>>")]
pub struct MoveSystem {
    blocks: Vec<Vec<FacetId>>,
    block_of: Vec<usize>,
}

impl MoveSystem {
    /// Blocks must be nonempty, disjoint and cover `0..facet_count`.
    pub fn new(facet_count: usize, blocks: Vec<Vec<FacetId>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; facet_count];
        let mut blocks = blocks;
        for (b, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(Error::input(format!("move {b} is empty")));
            }
            block.sort_unstable();
            for &f in block.iter() {
                let slot = block_of
                    .get_mut(f as usize)
                    .ok_or_else(|| Error::input(format!("move {b} names unknown facet {f}")))?;
                if *slot != usize::MAX {
                    return Err(Error::input(format!("facet {f} lies in two moves")));
                }
                *slot = b;
            }
        }
        if let Some(f) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::input(format!("facet {f} is in no move")));
        }
        Ok(MoveSystem { blocks, block_of })
    }

    /// Every facet in its own block.
    pub fn sparse(facet_count: usize) -> Self {
        MoveSystem {
            blocks: (0..facet_count as FacetId).map(|f| vec![f]).collect(),
            block_of: (0..facet_count).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<FacetId>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[FacetId] {
        &self.blocks[b]
    }

    pub fn block_of(&self, f: FacetId) -> usize {
        self.block_of[f as usize]
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn facet_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn same_block(&self, a: FacetId, b: FacetId) -> bool {
        self.block_of(a) == self.block_of(b)
    }
}

impl TryFrom<Vec<Vec<FacetId>>> for MoveSystem {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<FacetId>>) -> Result<Self> {
        let n = blocks.iter().map(|b| b.len()).sum();
        MoveSystem::new(n, blocks)
    }
}

impl From<MoveSystem> for Vec<Vec<FacetId>> {
    fn from(m: MoveSystem) -> Self {
        m.blocks
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "I")]
    In,
    #[serde(rename = "O")]
    Out,
}

impl Status {
    pub fn flip(self) -> Status {
        match self {
            Status::In => Status::Out,
            Status::Out => Status::In,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Status::In => 'I',
            Status::Out => 'O',
        }
    }

    pub fn from_char(c: char) -> Option<Status> {
        match c {
            'I' => Some(Status::In),
            'O' => Some(Status::Out),
            _ => None,
        }
    }
}

/// A status for every facet, indexed by facet id. Serialized as a string of
/// `I`/`O` characters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    status: Vec<Status>,
}

impl State {
    pub fn new(status: Vec<Status>) -> Self {
        State { status }
    }

    pub fn uniform(facet_count: usize, status: Status) -> Self {
        State {
            status: vec![status; facet_count],
        }
    }

    /// `Out` exactly on the given facets.
    pub fn with_out(facet_count: usize, out: impl IntoIterator<Item = FacetId>) -> Self {
        let mut s = State::uniform(facet_count, Status::In);
        for f in out {
            s.status[f as usize] = Status::Out;
        }
        s
    }

    pub fn status(&self, f: FacetId) -> Status {
        self.status[f as usize]
    }

    pub fn set(&mut self, f: FacetId, st: Status) {
        self.status[f as usize] = st;
    }

    pub fn facet_count(&self) -> usize {
        self.status.len()
    }

    pub fn statuses(&self) -> &[Status] {
        &self.status
    }

    pub fn with_status(&self, st: Status) -> impl Iterator<Item = FacetId> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(move |(_, &s)| s == st)
            .map(|(i, _)| i as FacetId)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.status.iter().map(|s| s.as_char()).collect();
        f.write_str(&s)
    }
}

impl FromStr for State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Status::from_char(c).ok_or_else(|| Error::input(format!("bad status {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(State::new)
    }
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// First adjacent pair in the same move with different statuses, if any.
pub fn compatibility_violation(p: &Polytope, m: &MoveSystem, s: &State) -> Option<(FacetId, FacetId)> {
    p.adjacent_pairs()
        .into_iter()
        .find(|&(a, b)| m.same_block(a, b) && s.status(a) != s.status(b))
}

pub fn is_compatible(p: &Polytope, m: &MoveSystem, s: &State) -> bool {
    compatibility_violation(p, m, s).is_none()
}

/// Crossing `facet`: flips every facet in its block.
pub fn act(s: &State, m: &MoveSystem, facet: FacetId) -> State {
    act_block(s, m, m.block_of(facet))
}

pub fn act_block(s: &State, m: &MoveSystem, block: usize) -> State {
    let mut out = s.clone();
    for &f in m.block(block) {
        out.status[f as usize] = out.status[f as usize].flip();
    }
    out
}

/// Closure of `s` under all moves, in breadth-first order from `s`.
pub fn orbit(s: &State, m: &MoveSystem) -> Vec<State> {
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([s.clone()]);
    seen.insert(s.clone());
    while let Some(t) = queue.pop_front() {
        for b in 0..m.block_count() {
            let u = act_block(&t, m, b);
            if seen.insert(u.clone()) {
                queue.push_back(u);
            }
        }
        order.push(t);
    }
    order
}
