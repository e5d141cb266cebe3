//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use morsecert_core::certify::{euler_identity, Problem, Report};
use morsecert_core::morse::{
    build_cube_model, certify_boundary_cube, check_cusp_condition, check_sum_decomposition,
    coface_membership_oracle, face_links_oracle, predicted_face_links, CubeFace, CubeModel, restricted_state,
};
use morsecert_core::polytope::{
    all_faces, build_cusp_section, build_p5, build_p6, dual_complex, f_vector_check, FaceHandle,
    FacetId, Polytope,
};
use morsecert_core::simplicial::{
    cone_collapse_sequence, star_removal_sequence, try_collapse, verify_collapse, CollapseConfig,
    CollapseStep, SimplicialComplex,
};
use morsecert_core::state::{
    balanced_states_p6, classify_bad_faces, inherited_state, move_system_p6, BadFaceSignature,
    MoveSystem, State, Status,
};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn(&Path) -> Outcome>);

fn main() {
    let dir = tempfile::tempdir().expect("tempdir");
    let criteria: Vec<Criterion> = vec![
        ("1 P6 perfect-Morse certification", Box::new(criterion_1)),
        ("2 P5 fibration certification", Box::new(criterion_2)),
        ("3 structural counts", Box::new(|_: &Path| criterion_3())),
        ("4 bad-face classification", Box::new(|_: &Path| criterion_4())),
        ("5 oracle equivalence", Box::new(|_: &Path| criterion_5())),
        ("6 cusp suite", Box::new(|_: &Path| criterion_6())),
        ("7 Euler identity", Box::new(|_: &Path| criterion_7())),
        ("8 certificate replay", Box::new(criterion_8)),
        ("9 collapse-engine regression", Box::new(|_: &Path| criterion_9())),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let outcome = run(dir.path());
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn morsecert(args: &[&str]) -> Result<(i32, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_morsecert"))
        .args(args)
        .env_remove("MORSECERT_WORKERS")
        .output()
        .map_err(|e| format!("could not run morsecert: {e}"))?;
    let code = out.status.code().ok_or("morsecert was killed by a signal")?;
    if code != 0 {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    Ok((code, start.elapsed()))
}

fn read_report(path: &Path) -> Result<Report, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    Report::from_structured(&text, &path.display().to_string()).map_err(|e| e.to_string())
}

fn p6() -> (Polytope, MoveSystem, Vec<State>) {
    let p = build_p6().expect("P6 builds");
    let m = move_system_p6(&p).expect("P6 moves");
    let states = balanced_states_p6(&p, &m).expect("balanced states");
    (p, m, states)
}

fn criterion_1(dir: &Path) -> Outcome {
    let out = dir.join("p6-single.json");
    let out_s = out.to_str().unwrap();
    let (code, took) = morsecert(&["certify", "p6", "--parallel", "1", "--format", "structured", "--output", out_s])?;
    ensure(code == 0, format!("exit code {code}"))?;
    ensure(took < Duration::from_secs(300), format!("took {took:?} single-threaded"))?;
    let r = read_report(&out)?;
    let h = &r.verdicts.histogram;
    ensure(r.verdicts.states.len() == 32, "orbit is not 32 states")?;
    ensure(
        r.verdicts.faces == all_faces(&build_p6().unwrap()).iter().map(Vec::len).sum::<usize>(),
        "not every clique face was classified",
    )?;
    ensure(
        h.keys().all(|k| k == "Regular" || k == "Critical(3)"),
        format!("histogram {h:?}"),
    )?;
    ensure(h.values().sum::<usize>() == r.verdicts.pairs, "histogram does not cover every pair")?;
    ensure(r.outcome.certified, r.outcome.summary.clone())?;
    Ok(format!(
        "{} faces x 32 states, {:?}, zero Unknown, {:.1}s single-threaded",
        r.verdicts.faces,
        h,
        took.as_secs_f64()
    ))
}

fn criterion_2(dir: &Path) -> Outcome {
    let out = dir.join("p5.json");
    let (code, took) = morsecert(&["certify", "p5", "--format", "structured", "--output", out.to_str().unwrap()])?;
    ensure(code == 0, format!("exit code {code}"))?;
    ensure(took < Duration::from_secs(60), format!("took {took:?}"))?;
    let r = read_report(&out)?;
    ensure(r.verdicts.states.len() == 16, format!("orbit has {} states", r.verdicts.states.len()))?;
    let h = &r.verdicts.histogram;
    ensure(h.keys().all(|k| k == "Regular"), format!("histogram {h:?}"))?;
    ensure(h.get("Regular") == Some(&r.verdicts.pairs), "not every pair is Regular")?;
    Ok(format!("{} faces x 16 states all Regular", r.verdicts.faces))
}

fn criterion_3() -> Outcome {
    let p = build_p6().map_err(|e| e.to_string())?;
    let fv = f_vector_check(&p);
    ensure(p.facet_count() == 27, "P6 facet count")?;
    ensure(p.facet_ids().all(|f| p.degree(f) == 16), "P6 degrees are not all 16")?;
    ensure(fv.clique_counts.get(6) == Some(&72), format!("P6 six-cliques {:?}", fv.clique_counts))?;
    ensure(fv.clique_counts.get(7).copied().unwrap_or(0) == 0, "P6 has seven-cliques")?;
    ensure(p.ideal_vertices().len() == 27, "P6 ideal vertex count")?;
    ensure(p.ideal_vertices().iter().all(|v| v.incident.len() == 10), "P6 ideal vertex incidence")?;
    let q = build_p5().map_err(|e| e.to_string())?;
    let fq = f_vector_check(&q);
    ensure(q.facet_count() == 16, "P5 facet count")?;
    ensure(fq.clique_counts.get(5) == Some(&16), format!("P5 five-cliques {:?}", fq.clique_counts))?;
    ensure(q.ideal_vertices().len() == 10, "P5 ideal vertex count")?;
    Ok(format!(
        "P6 cliques {:?}, 27 cusps of 10 facets; P5 cliques {:?}",
        fv.clique_counts, fq.clique_counts
    ))
}

fn criterion_4() -> Outcome {
    let (p, m, _) = p6();
    let bad = classify_bad_faces(&p, &m);
    let found: BTreeSet<BadFaceSignature> = bad.keys().cloned().collect();
    let expected: BTreeSet<BadFaceSignature> =
        [vec![2], vec![3], vec![2, 2], vec![2, 2, 2]].into_iter().map(BadFaceSignature).collect();
    ensure(found == expected, format!("signatures {found:?}"))?;
    let codim5 = bad.values().flatten().filter(|f| f.codim() == 5).count();
    ensure(codim5 == 0, format!("{codim5} codim-5 bad faces"))?;
    let counts: Vec<String> = bad.iter().map(|(s, f)| format!("{s} x{}", f.len())).collect();
    Ok(counts.join(", "))
}

fn criterion_5() -> Outcome {
    let (p, m, states) = p6();
    let faces: Vec<FaceHandle> = all_faces(&p).into_iter().flatten().collect();
    let config = CollapseConfig::default();
    // one state per face and class: the inherited code together with the
    // statuses of the defining facets, which is at least as fine as the
    // inherited state alone
    let tasks: Vec<(FaceHandle, &State)> = faces
        .iter()
        .flat_map(|face| {
            let mut seen = BTreeMap::new();
            for s in &states {
                let own: String = face.facets().iter().map(|&f| s.status(f).as_char()).collect();
                seen.entry((inherited_state(&p, &m, s, face).code(), own)).or_insert(s);
            }
            seen.into_values().map(move |s| (face.clone(), s))
        })
        .collect();
    // per representative: the cofacet rule, the sum decomposition, and the
    // key of its cube model
    let keyed = tasks
        .par_iter()
        .map(|(face, s)| -> Result<(ModelKey, usize), String> {
            let label = p.face_label(face);
            let model = build_cube_model(&p, &m, s, face).map_err(|e| format!("{label}: {e}"))?;
            ensure(
                check_sum_decomposition(&model).map_err(|e| e.to_string())?,
                format!("{label}: lift is not a sum over factors"),
            )?;
            let key = model_key(&model);
            let canonical = CubeModel::from_coordinates(key.0.clone(), key.1.clone()).map_err(|e| e.to_string())?;
            ensure(
                (0..1u32 << model.dim()).all(|w| model.vertex_lift(w) == canonical.vertex_lift(w)),
                format!("{label}: lift differs from its keyed model"),
            )?;

            let inherited = inherited_state(&p, &m, s, face);
            let mut cofacets = 0;
            for (&g, &st) in inherited.facets.iter().zip(&inherited.status) {
                let up = coface_membership_oracle(&p, &m, s, face, &face.with(g)).map_err(|e| e.to_string())?;
                ensure(up == (st == Status::Out), format!("{label}: cofacet through {} disagrees", p.label(g)))?;
                cofacets += 1;
            }
            Ok((key, cofacets))
        })
        .collect::<Result<Vec<_>, String>>()?;

    // Each distinct model gets its own oracle links, compared with its own
    // fast path. The ascending link must collapse onto the factor core; that
    // collapse is found and replayed once per base-vertex class, and every
    // member is shown to be the reflected copy of the class representative,
    // link and core alike.
    let models: BTreeSet<ModelKey> = keyed.iter().map(|(k, _)| k.clone()).collect();
    let mut classes: BTreeMap<ModelKey, Vec<(ModelKey, u32)>> = BTreeMap::new();
    for key in &models {
        let model = CubeModel::from_coordinates(key.0.clone(), key.1.clone()).map_err(|e| e.to_string())?;
        let (statuses, w) = (0..1u32 << model.dim())
            .map(|w| ((0..model.dim()).map(|i| model.coord_status(w, i)).collect::<Vec<_>>(), w))
            .min()
            .unwrap();
        classes.entry((key.0.clone(), statuses)).or_default().push((key.clone(), w));
    }
    let classes: Vec<_> = classes.into_iter().collect();
    classes
        .par_iter()
        .map(|((blocks, statuses), members)| -> Result<(), String> {
            let base = CubeModel::from_coordinates(blocks.clone(), statuses.clone()).map_err(|e| e.to_string())?;
            let links = face_links_oracle(&base);
            let core = predicted_face_links(&base).map_err(|e| e.to_string())?.ascending_core;
            let found = try_collapse(&links.ascending, Some(&core), &config).map_err(|e| e.to_string())?;
            let name = format!("cube with blocks {blocks:?} and statuses {statuses:?}");
            ensure(found.success, format!("{name}: no collapse onto the factor core"))?;
            verify_collapse(&links.ascending, &found.sequence, Some(&core))
                .map_err(|e| format!("{name}: collapse does not replay: {e:?}"))?;
            for ((b, st), w) in members {
                let name = format!("cube with blocks {b:?} and statuses {st:?}");
                let model = CubeModel::from_coordinates(b.clone(), st.clone()).map_err(|e| e.to_string())?;
                let oracle = face_links_oracle(&model);
                let fast = predicted_face_links(&model).map_err(|e| format!("{name}: {e}"))?;
                ensure(oracle.descending == fast.descending, format!("{name}: descending link differs"))?;
                let moved = |k: &SimplicialComplex<CubeFace>| k.map_labels(|f| reflect(f, *w)).map_err(|e| e.to_string());
                ensure(oracle.ascending == moved(&links.ascending)?, format!("{name}: ascending link is not a reflected copy"))?;
                ensure(fast.ascending_core == moved(&core)?, format!("{name}: factor core is not a reflected copy"))?;
            }
            Ok(())
        })
        .collect::<Result<Vec<()>, String>>()?;
    Ok(format!(
        "{} faces, {} face-class representatives, {} distinct cube models in {} base-vertex classes, {} cofacets agree",
        faces.len(),
        tasks.len(),
        models.len(),
        classes.len(),
        keyed.iter().map(|(_, n)| n).sum::<usize>()
    ))
}

type ModelKey = (Vec<usize>, Vec<Status>);

/// A face of the cube under `x ↦ x XOR w`.
fn reflect(f: &CubeFace, w: u32) -> CubeFace {
    CubeFace { free: f.free, fixed: (f.fixed ^ w) & !f.free }
}

/// Blocks renumbered by first appearance, with the statuses at vertex 0.
fn model_key(model: &CubeModel) -> ModelKey {
    let mut renumber = BTreeMap::new();
    let blocks = model
        .coord_blocks
        .iter()
        .map(|b| {
            let next = renumber.len();
            *renumber.entry(*b).or_insert(next)
        })
        .collect();
    let statuses = (0..model.dim()).map(|i| model.coord_status(0, i)).collect();
    (blocks, statuses)
}

fn criterion_6() -> Outcome {
    let (p, m, states) = p6();
    let config = CollapseConfig::default();
    let mut checks = 0;
    let mut cubes = BTreeMap::new();
    for v in p.ideal_vertices() {
        let section = build_cusp_section(&p, v.id).map_err(|e| e.to_string())?;
        for s in &states {
            let c = check_cusp_condition(&p, &m, s, v.id).map_err(|e| e.to_string())?;
            ensure(c.pass, format!("cusp {} fails in state {s}", v.label))?;
            checks += 1;
            cubes.entry((v.id, restricted_state(&section, s))).or_insert(s);
        }
    }
    let cubes: Vec<_> = cubes.into_iter().collect();
    let faces = cubes
        .par_iter()
        .map(|((cusp, _), s)| -> Result<usize, String> {
            let cert = certify_boundary_cube(&p, &m, s, *cusp, &config).map_err(|e| e.to_string())?;
            ensure(cert.pass, format!("boundary cube at cusp {cusp} has a non-Regular link"))?;
            Ok(cert.faces)
        })
        .collect::<Result<Vec<usize>, String>>()?;
    Ok(format!(
        "{checks} cusp-state pairs satisfy the condition; {} distinct boundary 5-cubes, {} faces, all Regular",
        cubes.len(),
        faces.iter().sum::<usize>()
    ))
}

fn criterion_7() -> Outcome {
    let (p, m, _) = p6();
    let e = euler_identity(&p, &m);
    let chi = e.chi_per_copy;
    // cross-multiplied so the check does not depend on reduction
    ensure(
        chi.numerator * 64 == -(e.bad_vertices as i64) * chi.denominator,
        format!("P6: chi {chi} against -{}/64", e.bad_vertices),
    )?;
    ensure(e.pass, "P6 record does not pass")?;

    let q = Problem::p5().map_err(|e| e.to_string())?;
    let eq = euler_identity(&q.polytope, &q.moves);
    ensure(eq.chi_per_copy.numerator == 0, format!("P5: chi {}", eq.chi_per_copy))?;
    Ok(format!("P6 chi {chi} = -{}/64; P5 chi 0", e.bad_vertices))
}

fn criterion_8(dir: &Path) -> Outcome {
    let mut summary = Vec::new();
    for target in ["p6", "p5"] {
        let a = dir.join(format!("{target}-a.json"));
        let b = dir.join(format!("{target}-b.json"));
        for (path, parallel) in [(&a, "1"), (&b, "4")] {
            let args = ["certify", target, "--seed", "7", "--parallel", parallel, "--format", "structured", "--output", path.to_str().unwrap()];
            let (code, _) = morsecert(&args)?;
            ensure(code == 0, format!("certify {target} exit code {code}"))?;
        }
        let bytes_a = std::fs::read(&a).map_err(|e| e.to_string())?;
        let bytes_b = std::fs::read(&b).map_err(|e| e.to_string())?;
        ensure(bytes_a == bytes_b, format!("{target}: reports differ between runs"))?;
        let (code, took) = morsecert(&["verify", a.to_str().unwrap()])?;
        ensure(code == 0, format!("verify {target} exit code {code}"))?;
        summary.push(format!("{target} {} bytes identical, verified in {:.1}s", bytes_a.len(), took.as_secs_f64()));
    }
    Ok(summary.join("; "))
}

fn criterion_9() -> Outcome {
    let (p, _, _) = p6();
    let id = |l: &str| p.facet_by_label(l).ok_or(format!("no facet {l}"));
    let outs = [
        "1", "1-i+j-k", "1+i+j-k", "i", "1+i+j+k", "-1+i+j+k", "j", "-1-i+j+k", "-1-i+j-k", "k", "1-i-j+k",
        "1-i+j+k",
    ];
    let out_ids: Vec<FacetId> = outs.iter().map(|l| id(l)).collect::<Result<_, _>>()?;
    let dual = dual_complex(&p, &FaceHandle::polytope());
    let full = |extra: &[FacetId]| -> Result<SimplicialComplex<FacetId>, String> {
        let vs: Vec<FacetId> = out_ids.iter().chain(extra).copied().collect();
        dual.full_subcomplex(&vs).map_err(|e| e.to_string())
    };
    let abc = [id("A")?, id("B")?, id("C")?];
    let big = full(&abc)?;
    let small = full(&[])?;

    let mut steps: Vec<CollapseStep<FacetId>> = Vec::new();
    let mut current = big.clone();
    for (v, apex) in abc.iter().zip(["1-i+j+k", "1+i+j+k", "j"]) {
        let apex = id(apex)?;
        let link = current.link(v).map_err(|e| e.to_string())?;
        let link_steps = cone_collapse_sequence(&link, &apex)
            .ok_or(format!("link of {} is not a cone on {}", p.label(*v), p.label(apex)))?;
        steps.extend(star_removal_sequence(v, &link_steps, &apex));
        let rest: Vec<FacetId> = current.labels().iter().copied().filter(|u| u != v).collect();
        current = current.full_subcomplex(&rest).map_err(|e| e.to_string())?;
    }
    verify_collapse(&big, &steps, Some(&small)).map_err(|e| format!("A, B, C: {e:?}"))?;

    let v = id("-1-i+j-k")?;
    let j = id("j")?;
    let link = small.link(&v).map_err(|e| e.to_string())?;
    let expected: BTreeSet<FacetId> = ["j", "1-i+j-k", "-1-i+j+k", "1+i+j-k", "-1+i+j+k", "1-i+j+k"]
        .iter()
        .map(|l| id(l))
        .collect::<Result<_, _>>()?;
    let found: BTreeSet<FacetId> = link.labels().iter().copied().collect();
    ensure(found == expected, "link of -1-i+j-k has unexpected vertices")?;
    let link_steps = cone_collapse_sequence(&link, &j).ok_or("link of -1-i+j-k is not a cone on j")?;
    let mut tail = star_removal_sequence(&v, &link_steps, &j);
    let rest: Vec<FacetId> = small.labels().iter().copied().filter(|u| *u != v).collect();
    let last = small.full_subcomplex(&rest).map_err(|e| e.to_string())?;
    let apex = id("1+i+j+k")?;
    tail.extend(cone_collapse_sequence(&last, &apex).ok_or("remainder is not a cone on 1+i+j+k")?);
    verify_collapse(&small, &tail, None).map_err(|e| format!("12-vertex complex: {e:?}"))?;

    steps.extend(tail);
    verify_collapse(&big, &steps, None).map_err(|e| format!("whole order: {e:?}"))?;
    Ok(format!(
        "{} elementary collapses take the 15-vertex complex to a point through the 12-vertex one",
        steps.len()
    ))
}
