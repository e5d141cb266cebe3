//! End-to-end certification runs: problem setup, parallel classification,
//! cusp checks, aggregation into a report, and replay.

mod euler;
mod io;
mod report;
mod verify;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::morse::{
    certify_boundary_cube, check_cusp_condition, classify_link, restricted_state, CubeLibrary,
    Verdict,
};
use crate::polytope::{
    all_faces, build_cusp_section, build_p5, build_p6, f_vector_check, FaceHandle, Polytope,
};
use crate::simplicial::CollapseConfig;
use crate::state::{
    balanced_states_p6, classify_bad_faces, compatibility_violation, good_face_witness,
    inherited_state, is_balanced_p6, move_system_p6, orbit, BadFaceSignature, MoveSystem, State,
};

pub use euler::{euler_identity, EulerRecord, Rational};
pub use io::{
    moves_from_doc, parse_json, read_json, state_from_doc, state_to_doc, FacetDoc, IdealVertexDoc,
    InputsDoc, PolytopeDoc, StateDoc,
};
pub use report::{
    BoundaryEntry, Check, Cover, CuspEntry, CuspTable, Mode, Outcome, Report, Seeds, SignatureRow,
    Subject, SubjectKind, VerdictEntry, VerdictTable, REPORT_VERSION,
};
pub use verify::{verify_report, VerifyOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub seed: u64,
    pub restarts: u32,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub timings: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            seed: 0,
            restarts: CollapseConfig::default().restarts,
            workers: None,
            timings: false,
        }
    }
}

impl CertifyOptions {
    fn collapse_config(&self, key: &str) -> CollapseConfig {
        CollapseConfig {
            seed: task_seed(self.seed, key),
            restarts: self.restarts,
            ..CollapseConfig::default()
        }
    }
}

/// Moves flip disjoint sets of facets, so the orbit has exactly
/// `2^blocks` states; beyond this many blocks a run is refused.
pub const MAX_MOVE_BLOCKS: usize = 16;

pub const SEED_DERIVATION: &str = "splitmix64(root XOR fnv1a64(task key))";

/// Seed of one task, from the root seed and the task's canonical key.
pub fn task_seed(root: u64, key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = (root ^ h).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Everything a run needs.
#[derive(Clone, Debug)]
pub struct Problem {
    pub subject: Subject,
    pub polytope: Polytope,
    pub moves: MoveSystem,
    pub initial: State,
    pub expected_orbit: Option<usize>,
    pub expected_signatures: Option<Vec<BadFaceSignature>>,
    /// Check that every orbit state is balanced (P6 only).
    pub require_balanced: bool,
}

impl Problem {
    pub fn p6() -> Result<Self> {
        let p = build_p6()?;
        let m = move_system_p6(&p)?;
        let initial = balanced_states_p6(&p, &m)?.remove(0);
        Ok(Problem {
            subject: Subject {
                kind: SubjectKind::P6PerfectMorse,
                polytope: p.name().to_string(),
                mode: Mode::Perfect,
                critical_index: Some(3),
                inputs: None,
            },
            polytope: p,
            moves: m,
            initial,
            expected_orbit: Some(32),
            expected_signatures: Some(
                [vec![2], vec![2, 2], vec![2, 2, 2], vec![3]]
                    .into_iter()
                    .map(BadFaceSignature)
                    .collect(),
            ),
            require_balanced: true,
        })
    }

    /// P5 with the moves inherited from P6, starting from the restriction
    /// of a balanced state of P6.
    pub fn p5() -> Result<Self> {
        let p = build_p5()?;
        let m = p
            .moves_hint()
            .cloned()
            .ok_or_else(|| Error::internal("P5 has no move system"))?;
        let p6 = build_p6()?;
        let m6 = move_system_p6(&p6)?;
        let s6 = balanced_states_p6(&p6, &m6)?.remove(0);
        let statuses = p
            .facets()
            .iter()
            .map(|f| {
                p6.facet_by_label(&f.label)
                    .map(|g| s6.status(g))
                    .ok_or_else(|| Error::internal(format!("{} is not a facet of P6", f.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Problem {
            subject: Subject {
                kind: SubjectKind::P5Fibration,
                polytope: p.name().to_string(),
                mode: Mode::Fibration,
                critical_index: None,
                inputs: None,
            },
            polytope: p,
            moves: m,
            initial: State::new(statuses),
            expected_orbit: Some(16),
            expected_signatures: None,
            require_balanced: false,
        })
    }

    /// Generic inputs. An incompatible initial state is an input error
    /// naming the offending pair.
    pub fn generic(inputs: InputsDoc, mode: Mode) -> Result<Self> {
        let p = inputs.polytope.to_polytope()?;
        let m = moves_from_doc(inputs.moves.clone(), p.facet_count())?;
        let s = state_from_doc(&inputs.state, p.facet_count())?;
        if let Some((a, b)) = compatibility_violation(&p, &m, &s) {
            return Err(Error::input(format!(
                "state is not compatible: adjacent facets {} and {} share a move but differ in status",
                p.label(a),
                p.label(b)
            )));
        }
        Ok(Problem {
            subject: Subject {
                kind: SubjectKind::Generic,
                polytope: p.name().to_string(),
                mode,
                critical_index: None,
                inputs: Some(inputs),
            },
            polytope: p,
            moves: m,
            initial: s,
            expected_orbit: None,
            expected_signatures: None,
            require_balanced: false,
        })
    }

    /// Rebuilds the problem a report was produced from.
    pub fn from_subject(subject: &Subject) -> Result<Self> {
        match (subject.kind, &subject.inputs) {
            (SubjectKind::P6PerfectMorse, _) => Problem::p6(),
            (SubjectKind::P5Fibration, _) => Problem::p5(),
            (SubjectKind::Generic, Some(inputs)) => Problem::generic(inputs.clone(), subject.mode),
            (SubjectKind::Generic, None) => Err(Error::input("generic report carries no inputs")),
        }
    }

    /// The inputs in file form, for digests and export.
    pub fn inputs(&self) -> InputsDoc {
        InputsDoc {
            polytope: PolytopeDoc::from_polytope(&self.polytope),
            moves: self.moves.blocks().to_vec(),
            state: state_to_doc(&self.initial),
        }
    }

    pub fn faces(&self) -> Vec<FaceHandle> {
        all_faces(&self.polytope).into_iter().flatten().collect()
    }
}

pub fn certify_p6(opts: &CertifyOptions) -> Result<Report> {
    certify(&Problem::p6()?, opts)
}

pub fn certify_p5(opts: &CertifyOptions) -> Result<Report> {
    certify(&Problem::p5()?, opts)
}

pub fn certify_generic(inputs: InputsDoc, mode: Mode, opts: &CertifyOptions) -> Result<Report> {
    certify(&Problem::generic(inputs, mode)?, opts)
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::internal(format!("worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Classification key of a bad face in a state.
pub(crate) fn bad_face_key(p: &Polytope, m: &MoveSystem, s: &State, face: &FaceHandle) -> (String, String) {
    let inherited = inherited_state(p, m, s, face).code();
    let defining = face.facets().iter().map(|&f| s.status(f).as_char()).collect();
    (inherited, defining)
}

/// Pending classifications: one per good face, one per bad face and key.
pub(crate) type VerdictTask = (FaceHandle, Cover, Option<(String, String)>);

pub(crate) fn verdict_tasks(p: &Polytope, m: &MoveSystem, states: &[State]) -> Vec<VerdictTask> {
    let mut tasks = Vec::new();
    for face in all_faces(p).into_iter().flatten() {
        if good_face_witness(m, &face).is_some() {
            tasks.push((face, Cover::All, None));
            continue;
        }
        let mut groups: Vec<((String, String), Vec<usize>)> = Vec::new();
        for (i, s) in states.iter().enumerate() {
            let key = bad_face_key(p, m, s, &face);
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, ids)) => ids.push(i),
                None => groups.push((key, vec![i])),
            }
        }
        for (key, ids) in groups {
            tasks.push((face.clone(), Cover::Only(ids), Some(key)));
        }
    }
    tasks
}

pub fn certify(problem: &Problem, opts: &CertifyOptions) -> Result<Report> {
    let p = &problem.polytope;
    let m = &problem.moves;
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        if opts.timings {
            timings.insert(name.to_string(), clock.elapsed().as_secs_f64() * 1e3);
        }
        clock = Instant::now();
    };

    let f_vector = f_vector_check(p);
    let bad = classify_bad_faces(p, m);
    let bad_faces: Vec<SignatureRow> = bad
        .iter()
        .map(|(sig, faces)| SignatureRow {
            signature: sig.clone(),
            count: faces.len(),
            faces: faces.clone(),
        })
        .collect();
    if m.block_count() > MAX_MOVE_BLOCKS {
        return Err(Error::input(format!(
            "{} moves give an orbit of 2^{} states; at most {MAX_MOVE_BLOCKS} moves are supported",
            m.block_count(),
            m.block_count()
        )));
    }
    let states = orbit(&problem.initial, m);
    lap("setup", &mut timings);

    let library_pairs: Vec<usize> = bad
        .iter()
        .filter(|(sig, faces)| {
            !sig.0.is_empty() && sig.0.iter().all(|&c| c == 2) && faces.iter().any(|f| f.codim() == p.dimension())
        })
        .map(|(sig, _)| sig.0.len())
        .collect();
    let library = CubeLibrary::build(library_pairs, &opts.collapse_config("cube-library"))?;
    lap("cube_library", &mut timings);

    let tasks = verdict_tasks(p, m, &states);
    let entries: Vec<VerdictEntry> = in_pool(opts.workers, || {
        tasks
            .par_iter()
            .map(|(face, cover, key)| {
                let rep = match cover {
                    Cover::All => 0,
                    Cover::Only(ids) => ids[0],
                };
                let task_key = format!("face:{:?}|{:?}", face.facets(), key);
                let c = classify_link(p, m, &states[rep], face, &library, &opts.collapse_config(&task_key))?;
                Ok(VerdictEntry {
                    face: face.clone(),
                    label: p.face_label(face),
                    multiplicity: match cover {
                        Cover::All => states.len(),
                        Cover::Only(ids) => ids.len(),
                    },
                    states: cover.clone(),
                    key: key.clone(),
                    classification: c,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    lap("classification", &mut timings);

    let cusps = cusp_table(problem, &states, opts)?;
    lap("cusps", &mut timings);

    let euler = euler_identity(p, m);
    let faces = entries
        .iter()
        .map(|e| &e.face)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for e in &entries {
        *histogram.entry(e.classification.verdict.to_string()).or_default() += e.multiplicity;
    }
    let verdicts = VerdictTable {
        faces,
        pairs: faces * states.len(),
        histogram,
        states,
        entries,
        cube_library: library,
    };
    let mut report = Report {
        version: REPORT_VERSION.to_string(),
        subject: problem.subject.clone(),
        inputs_digest: problem.inputs().digest(),
        f_vector,
        bad_faces,
        verdicts,
        cusps,
        euler,
        seeds: Seeds {
            root: opts.seed,
            restarts: opts.restarts,
            derivation: SEED_DERIVATION.to_string(),
        },
        timings: BTreeMap::new(),
        checks: Vec::new(),
        outcome: Outcome {
            certified: false,
            summary: String::new(),
            first_failure: None,
        },
    };
    let (checks, outcome) = evaluate(problem, &report);
    report.checks = checks;
    report.outcome = outcome;
    lap("aggregation", &mut timings);
    report.timings = timings;
    Ok(report)
}

fn cusp_table(problem: &Problem, states: &[State], opts: &CertifyOptions) -> Result<CuspTable> {
    let p = &problem.polytope;
    let m = &problem.moves;
    let mut checks = Vec::new();
    let mut groups: Vec<((u32, State), Vec<usize>)> = Vec::new();
    for v in p.ideal_vertices() {
        let section = build_cusp_section(p, v.id)?;
        for (i, s) in states.iter().enumerate() {
            checks.push(CuspEntry {
                state: i,
                check: check_cusp_condition(p, m, s, v.id)?,
            });
            let key = (v.id, restricted_state(&section, s));
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, ids)) => ids.push(i),
                None => groups.push((key, vec![i])),
            }
        }
    }
    let boundary_cubes = in_pool(opts.workers, || {
        groups
            .par_iter()
            .map(|((cusp, restricted), ids)| {
                let key = format!("cusp:{cusp}|{restricted}");
                let certificate = certify_boundary_cube(p, m, &states[ids[0]], *cusp, &opts.collapse_config(&key))?;
                Ok(BoundaryEntry {
                    states: ids.clone(),
                    certificate,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(CuspTable {
        checks,
        boundary_cubes,
    })
}

/// Derives the checks and the outcome from the report's tables.
pub(crate) fn evaluate(problem: &Problem, r: &Report) -> (Vec<Check>, Outcome) {
    let p = &problem.polytope;
    let m = &problem.moves;
    let states = &r.verdicts.states;
    let mut checks = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        })
    };

    let fv_fail = r.f_vector.checks.iter().find(|c| !c.pass);
    push(
        "f-vector",
        r.f_vector.pass,
        match fv_fail {
            None => format!("clique counts {:?}", r.f_vector.clique_counts),
            Some(c) => format!("{}: expected {}, found {}", c.name, c.expected, c.actual),
        },
    );

    let incompatible = states
        .iter()
        .enumerate()
        .find_map(|(i, s)| compatibility_violation(p, m, s).map(|pair| (i, pair)));
    push(
        "compatibility",
        incompatible.is_none(),
        match incompatible {
            None => format!("all {} states compatible", states.len()),
            Some((i, (a, b))) => format!("state {i}: {} and {} differ within a move", p.label(a), p.label(b)),
        },
    );

    let orbit_ok = problem.expected_orbit.is_none_or(|n| n == states.len());
    let unbalanced = if problem.require_balanced {
        states
            .iter()
            .position(|s| !is_balanced_p6(p, m, s).unwrap_or(false))
    } else {
        None
    };
    push(
        "orbit",
        orbit_ok && unbalanced.is_none(),
        match (problem.expected_orbit, unbalanced) {
            (_, Some(i)) => format!("state {i} is not balanced"),
            (Some(n), None) => format!("{} states, expected {n}", states.len()),
            (None, None) => format!("{} states", states.len()),
        },
    );

    if let Some(expected) = &problem.expected_signatures {
        let found: Vec<BadFaceSignature> = r.bad_faces.iter().map(|row| row.signature.clone()).collect();
        let show = |v: &[BadFaceSignature]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
        let codim_5 = r
            .bad_faces
            .iter()
            .flat_map(|row| &row.faces)
            .filter(|f| f.codim() == p.dimension().saturating_sub(1))
            .count();
        push(
            "bad-face signatures",
            &found == expected && codim_5 == 0,
            format!("{}; {codim_5} bad faces of codimension {}", show(&found), p.dimension().saturating_sub(1)),
        );
    }

    let covered: usize = r.verdicts.entries.iter().map(|e| e.multiplicity).sum();
    push(
        "coverage",
        covered == r.verdicts.pairs && r.verdicts.pairs == problem.faces().len() * states.len(),
        format!("{covered} of {} face-state pairs", r.verdicts.pairs),
    );

    let bad_verdict = r.verdicts.entries.iter().find(|e| match e.classification.verdict {
        Verdict::Regular => false,
        Verdict::Unknown => true,
        Verdict::Critical(k) => {
            r.subject.mode == Mode::Fibration || r.subject.critical_index.is_some_and(|want| want != k)
        }
    });
    let allowed = match (r.subject.mode, r.subject.critical_index) {
        (Mode::Fibration, _) => "all links Regular".to_string(),
        (Mode::Perfect, Some(k)) => format!("all links Regular or Critical({k})"),
        (Mode::Perfect, None) => "all links Regular or Critical".to_string(),
    };
    push(
        "verdicts",
        bad_verdict.is_none(),
        match bad_verdict {
            None => allowed.clone(),
            Some(e) => format!(
                "face {} in state {}: {}",
                e.label,
                e.representative(),
                e.classification.verdict
            ),
        },
    );

    let cusp_fail = r.cusps.checks.iter().find(|c| !c.check.pass);
    push(
        "cusp conditions",
        cusp_fail.is_none(),
        match cusp_fail {
            None => format!("{} cusp-state pairs", r.cusps.checks.len()),
            Some(c) => format!("cusp {} in state {}", c.check.label, c.state),
        },
    );

    let cube_fail = r.cusps.boundary_cubes.iter().find(|b| !b.certificate.pass);
    push(
        "boundary cubes",
        cube_fail.is_none(),
        match cube_fail {
            None => format!("{} distinct sections, all links Regular", r.cusps.boundary_cubes.len()),
            Some(b) => {
                let face = b
                    .certificate
                    .bad_faces
                    .iter()
                    .find(|(_, c)| c.verdict != Verdict::Regular)
                    .map(|(f, _)| format!("{:?}", f.facets()))
                    .unwrap_or_default();
                format!("cusp {} in state {}: face {face}", b.certificate.cusp, b.states[0])
            }
        },
    );

    push(
        "euler identity",
        r.euler.pass,
        format!(
            "chi per copy {}, critical per copy {}",
            r.euler.chi_per_copy, r.euler.critical_per_copy
        ),
    );

    let first = checks.iter().find(|c| !c.pass);
    let name = &r.subject.polytope;
    let summary = match (first, r.subject.mode) {
        (None, Mode::Perfect) => format!("{name}: PERFECT MORSE CERTIFIED ({allowed})"),
        (None, Mode::Fibration) => format!("{name}: FIBRATION CERTIFIED ({allowed})"),
        (Some(c), _) => format!("{name}: CERTIFICATION FAILED ({}: {})", c.name, c.detail),
    };
    let outcome = Outcome {
        certified: first.is_none(),
        summary,
        first_failure: first.map(|c| format!("{}: {}", c.name, c.detail)),
    };
    (checks, outcome)
}
