use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::euler::EulerRecord;
use super::io::{parse_json, InputsDoc};
use crate::error::Result;
use crate::morse::{BoundaryCubeCertificate, CubeLibrary, CuspCheck, LinkClassification};
use crate::polytope::{FVectorReport, FaceHandle};
use crate::state::{BadFaceSignature, State};

pub const REPORT_VERSION: &str = concat!("morsecert/", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubjectKind {
    P6PerfectMorse,
    P5Fibration,
    Generic,
}

/// What counts as a pass: all links regular, or critical links allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Fibration,
    Perfect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subject {
    pub kind: SubjectKind,
    pub polytope: String,
    pub mode: Mode,
    /// Critical verdicts must have this index.
    pub critical_index: Option<usize>,
    /// Embedded for generic runs, so the report replays on its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<InputsDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRow {
    pub signature: BadFaceSignature,
    pub count: usize,
    pub faces: Vec<FaceHandle>,
}

/// The states a verdict applies to, by index into the orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cover {
    All,
    Only(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub face: FaceHandle,
    pub label: String,
    pub states: Cover,
    pub multiplicity: usize,
    /// Inherited state and statuses of the defining facets, which together
    /// determine the classification of a bad face.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<(String, String)>,
    pub classification: LinkClassification,
}

impl VerdictEntry {
    pub fn representative(&self) -> usize {
        match &self.states {
            Cover::All => 0,
            Cover::Only(ids) => ids[0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictTable {
    pub states: Vec<State>,
    pub faces: usize,
    pub pairs: usize,
    /// Verdict counts over all face-state pairs.
    pub histogram: BTreeMap<String, usize>,
    pub entries: Vec<VerdictEntry>,
    pub cube_library: CubeLibrary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspEntry {
    pub state: usize,
    pub check: CuspCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEntry {
    pub states: Vec<usize>,
    pub certificate: BoundaryCubeCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspTable {
    pub checks: Vec<CuspEntry>,
    pub boundary_cubes: Vec<BoundaryEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub root: u64,
    pub restarts: u32,
    pub derivation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub certified: bool,
    pub summary: String,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub subject: Subject,
    pub inputs_digest: String,
    pub f_vector: FVectorReport,
    pub bad_faces: Vec<SignatureRow>,
    pub verdicts: VerdictTable,
    pub cusps: CuspTable,
    pub euler: EulerRecord,
    pub seeds: Seeds,
    /// Wall-clock milliseconds per stage; empty unless requested.
    pub timings: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub outcome: Outcome,
}

impl Report {
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_structured(text: &str, source_name: &str) -> Result<Self> {
        parse_json(text, source_name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.outcome.summary);
        let counts: Vec<String> = self.f_vector.clique_counts.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "polytope {}: dimension {}, faces by codimension {}",
            self.subject.polytope,
            counts.len().saturating_sub(2),
            counts[..counts.len().saturating_sub(1)].join(" ")
        );
        let sigs: Vec<String> = self
            .bad_faces
            .iter()
            .map(|r| format!("{} x{}", r.signature, r.count))
            .collect();
        let _ = writeln!(out, "bad faces: {}", if sigs.is_empty() { "none".into() } else { sigs.join(", ") });
        let hist: Vec<String> = self.verdicts.histogram.iter().map(|(k, v)| format!("{k} {v}")).collect();
        let _ = writeln!(
            out,
            "verdicts: {} faces x {} states = {} pairs; {}",
            self.verdicts.faces,
            self.verdicts.states.len(),
            self.verdicts.pairs,
            hist.join(", ")
        );
        let _ = writeln!(
            out,
            "euler: chi per copy {}, critical per copy {}",
            self.euler.chi_per_copy, self.euler.critical_per_copy
        );
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
        }
        for (k, v) in &self.timings {
            let _ = writeln!(out, "time {k}: {v:.1} ms");
        }
        if let Some(f) = &self.outcome.first_failure {
            let _ = writeln!(out, "first failure: {f}");
        }
        out
    }
}
