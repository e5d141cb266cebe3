use super::{MoveSystem, State, Status};
use crate::error::{Error, Result};
use crate::polytope::quaternion::{r_table, r_value, Quaternion};
use crate::polytope::{FacetId, Polytope};

/// Moves of P6: the preimages under `r` of `±1`, `±i`, `±j`, `±k`, then
/// `{A, B, C}`. The literal `r` table is checked against quaternion
/// multiplication and against adjacency (each row is a triangle).
pub fn move_system_p6(p: &Polytope) -> Result<MoveSystem> {
    let find = |label: &str| {
        p.facet_by_label(label)
            .ok_or_else(|| Error::input(format!("P6 has no facet labelled {label}")))
    };
    let table = r_table();
    let mut blocks: Vec<Vec<FacetId>> = vec![Vec::new(); 5];
    for (row_index, (value, row)) in table.iter().enumerate() {
        let ids = row.iter().map(|l| find(l)).collect::<Result<Vec<_>>>()?;
        for (label, &id) in row.iter().zip(&ids) {
            let t: Quaternion = label.parse()?;
            if r_value(t) != Some(*value) {
                return Err(Error::structural(format!("r table row {value}: r({t}) disagrees")));
            }
            blocks[row_index / 2].push(id);
        }
        if !p.is_clique(&ids) {
            return Err(Error::structural(format!(
                "r table row {value} is not pairwise adjacent"
            )));
        }
    }
    blocks[4] = vec![find("A")?, find("B")?, find("C")?];
    MoveSystem::new(p.facet_count(), blocks)
}

/// For each size-6 move, its two triangles in increasing order, read off the
/// adjacency graph.
pub fn p6_triples(p: &Polytope, m: &MoveSystem) -> Result<Vec<[[FacetId; 3]; 2]>> {
    let mut out = Vec::new();
    for block in m.blocks().iter().filter(|b| b.len() == 6) {
        let mut triangles = Vec::new();
        for (i, &a) in block.iter().enumerate() {
            for (j, &b) in block.iter().enumerate().skip(i + 1) {
                for &c in &block[j + 1..] {
                    if p.is_clique(&[a, b, c]) {
                        triangles.push([a, b, c]);
                    }
                }
            }
        }
        let disjoint = triangles.len() == 2
            && triangles[0].iter().all(|f| !triangles[1].contains(f));
        if !disjoint {
            return Err(Error::structural(format!(
                "move {block:?} does not split into two triangles"
            )));
        }
        out.push([triangles[0], triangles[1]]);
    }
    Ok(out)
}

/// All balanced states: `A`, `B`, `C` share one status, and each size-6 move
/// is `In` on one of its triangles and `Out` on the other. Bit `b` of the
/// enumeration index makes the first triangle of move `b` (or `{A,B,C}` for
/// the last bit) `Out`.
pub fn balanced_states_p6(p: &Polytope, m: &MoveSystem) -> Result<Vec<State>> {
    let triples = p6_triples(p, m)?;
    let abc = m
        .blocks()
        .iter()
        .find(|b| b.len() == 3)
        .ok_or_else(|| Error::structural("P6 move system has no block of size 3"))?;
    let bits = triples.len() + 1;
    let mut out = Vec::with_capacity(1 << bits);
    for mask in 0u32..(1 << bits) {
        let mut s = State::uniform(p.facet_count(), Status::In);
        for (b, [first, second]) in triples.iter().enumerate() {
            let out_triangle = if mask >> b & 1 == 1 { first } else { second };
            for &f in out_triangle {
                s.set(f, Status::Out);
            }
        }
        if mask >> triples.len() & 1 == 1 {
            for &f in abc {
                s.set(f, Status::Out);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Direct check of the balanced condition.
pub fn is_balanced_p6(p: &Polytope, m: &MoveSystem, s: &State) -> Result<bool> {
    for block in m.blocks() {
        if block.len() == 3 && block.iter().any(|&f| s.status(f) != s.status(block[0])) {
            return Ok(false);
        }
    }
    for [t1, t2] in p6_triples(p, m)? {
        let uniform = |t: &[FacetId; 3]| t.iter().all(|&f| s.status(f) == s.status(t[0]));
        if !uniform(&t1) || !uniform(&t2) || s.status(t1[0]) == s.status(t2[0]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::build_p6;
    use crate::state::{act, is_compatible, orbit};

    #[test]
    fn moves_match_the_r_table() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let mut sizes: Vec<usize> = m.blocks().iter().map(|b| b.len()).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![6, 6, 6, 6, 3]);
        let one = p.facet_by_label("1").unwrap();
        let mut got: Vec<&str> = m.block(m.block_of(one)).iter().map(|&f| p.label(f)).collect();
        got.sort_unstable();
        let mut want = vec!["1", "1-i+j-k", "1+i+j-k", "-1", "-1+i-j+k", "-1-i-j+k"];
        want.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn thirty_two_balanced_states_form_one_orbit() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let states = balanced_states_p6(&p, &m).unwrap();
        assert_eq!(states.len(), 32);
        for s in &states {
            assert!(is_compatible(&p, &m, s));
            assert!(is_balanced_p6(&p, &m, s).unwrap());
        }
        let mut o = orbit(&states[0], &m);
        o.sort();
        let mut all = states.clone();
        all.sort();
        assert_eq!(o, all);
        let a = p.facet_by_label("A").unwrap();
        let flipped = act(&states[0], &m, a);
        let changed: Vec<&str> = p
            .facet_ids()
            .filter(|&f| flipped.status(f) != states[0].status(f))
            .map(|f| p.label(f))
            .collect();
        assert_eq!(changed.len(), 3);
        assert!(changed.iter().all(|l| ["A", "B", "C"].contains(l)));
    }

    #[test]
    fn listed_state_is_balanced() {
        let p = build_p6().unwrap();
        let m = move_system_p6(&p).unwrap();
        let out = [
            "1", "1-i+j-k", "1+i+j-k", "i", "1+i+j+k", "-1+i+j+k", "j", "-1-i+j+k", "-1-i+j-k", "k",
            "1-i-j+k", "1-i+j+k",
        ];
        let s = State::with_out(27, out.iter().map(|l| p.facet_by_label(l).unwrap()));
        assert!(balanced_states_p6(&p, &m).unwrap().contains(&s));
    }
}
