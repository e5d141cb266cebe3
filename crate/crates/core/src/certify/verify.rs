use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{bad_face_key, euler_identity, evaluate, verdict_tasks, Cover, Problem, Report};
use crate::error::Result;
use crate::morse::{
    check_cusp_condition, restricted_state, verify_boundary_cube, verify_classification,
};
use crate::polytope::{build_cusp_section, f_vector_check};
use crate::state::{classify_bad_faces, orbit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub problems: Vec<String>,
    /// Number of evidence items replayed.
    pub replayed: usize,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Re-checks a report from scratch without any search: rebuilds the inputs,
/// recomputes every census, replays every collapse certificate and
/// transport witness, and rederives the outcome.
pub fn verify_report(report: &Report) -> Result<VerifyOutcome> {
    let problem = Problem::from_subject(&report.subject)?;
    let p = &problem.polytope;
    let m = &problem.moves;
    let mut problems = Vec::new();

    note(&mut problems, report.inputs_digest == problem.inputs().digest(), "inputs digest differs".into());
    note(&mut problems, report.f_vector == f_vector_check(p), "f-vector differs".into());
    let bad = classify_bad_faces(p, m);
    let rows_match = report.bad_faces.len() == bad.len()
        && report
            .bad_faces
            .iter()
            .zip(&bad)
            .all(|(row, (sig, faces))| row.signature == *sig && row.faces == *faces && row.count == faces.len());
    note(&mut problems, rows_match, "bad-face table differs".into());
    note(&mut problems, report.euler == euler_identity(p, m), "euler record differs".into());

    let states = &report.verdicts.states;
    note(&mut problems, *states == orbit(&problem.initial, m), "state orbit differs".into());

    // coverage: the recorded entries must be exactly the canonical tasks
    let tasks = verdict_tasks(p, m, states);
    let layout_ok = tasks.len() == report.verdicts.entries.len()
        && tasks.iter().zip(&report.verdicts.entries).all(|((face, cover, key), e)| {
            e.face == *face
                && e.states == *cover
                && e.key == *key
                && e.multiplicity
                    == match cover {
                        Cover::All => states.len(),
                        Cover::Only(ids) => ids.len(),
                    }
        });
    note(&mut problems, layout_ok, "verdict entries do not cover the face-state pairs canonically".into());
    if !layout_ok || *states != orbit(&problem.initial, m) {
        return Ok(VerifyOutcome { problems, replayed: 0 });
    }
    if let Some(e) = report.verdicts.entries.iter().find(|e| e.label != p.face_label(&e.face)) {
        problems.push(format!("entry label {} does not match its face", e.label));
    }
    for e in &report.verdicts.entries {
        if let (Cover::Only(ids), Some(key)) = (&e.states, &e.key) {
            if let Some(&i) = ids.iter().find(|&&i| bad_face_key(p, m, &states[i], &e.face) != *key) {
                problems.push(format!("face {} in state {i} has a different key", e.label));
            }
        }
    }

    let mut replayed = 0;
    for (k, t) in &report.verdicts.cube_library.entries {
        match t.verify() {
            Ok(()) if *k == t.pairs => replayed += 1,
            Ok(()) => problems.push(format!("cube library entry {k} describes {} pairs", t.pairs)),
            Err(e) => problems.push(e.to_string()),
        }
    }
    let library = &report.verdicts.cube_library;
    let failures: Vec<String> = report
        .verdicts
        .entries
        .par_iter()
        .filter_map(|e| {
            let s = &states[e.representative()];
            verify_classification(p, m, s, &e.face, &e.classification, library)
                .err()
                .map(|err| format!("state {}: {err}", e.representative()))
        })
        .collect();
    replayed += report.verdicts.entries.len() - failures.len();
    problems.extend(failures);

    let mut recomputed = Vec::new();
    let mut sections = BTreeMap::new();
    for v in p.ideal_vertices() {
        sections.insert(v.id, build_cusp_section(p, v.id)?);
        for (i, s) in states.iter().enumerate() {
            recomputed.push((i, check_cusp_condition(p, m, s, v.id)?));
        }
    }
    let checks_match = recomputed.len() == report.cusps.checks.len()
        && recomputed
            .iter()
            .zip(&report.cusps.checks)
            .all(|((i, c), e)| e.state == *i && e.check == *c);
    note(&mut problems, checks_match, "cusp checks differ".into());
    let mut seen = BTreeMap::new();
    for b in &report.cusps.boundary_cubes {
        let cusp = b.certificate.cusp;
        let Some(section) = sections.get(&cusp) else {
            problems.push(format!("boundary cube at unknown cusp {cusp}"));
            continue;
        };
        for &i in &b.states {
            *seen.entry((cusp, i)).or_insert(0usize) += 1;
            if states.get(i).map(|s| restricted_state(section, s)) != Some(b.certificate.state.clone()) {
                problems.push(format!("boundary cube at cusp {cusp} does not match state {i}"));
            }
        }
        match verify_boundary_cube(p, m, &b.certificate) {
            Ok(()) => replayed += 1,
            Err(e) => problems.push(e.to_string()),
        }
    }
    let full = seen.len() == sections.len() * states.len() && seen.values().all(|&n| n == 1);
    note(&mut problems, full, "boundary cubes do not cover every cusp-state pair once".into());

    let (checks, outcome) = evaluate(&problem, report);
    note(&mut problems, checks == report.checks, "recorded checks differ from the recomputed ones".into());
    note(&mut problems, outcome == report.outcome, "recorded outcome differs from the recomputed one".into());
    Ok(VerifyOutcome { problems, replayed })
}

fn note(problems: &mut Vec<String>, cond: bool, msg: String) {
    if !cond {
        problems.push(msg);
    }
}
