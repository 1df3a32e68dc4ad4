//! Corpus files: a list of quivers, each with the checks to run and the
//! outcome expected from each.

use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::checks::{run_check, Check, CheckReport, Outcome, Settings, Subject};
use crate::error::{Error, Result};
use crate::io::QuiverFile;
use crate::leavitt::SpecialEdgeChoice;
use crate::samples::Sample;
use crate::series::{LinearRep, RepFile};
use crate::tower::TowerSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub check: Check,
    pub expect: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    /// Quiver file, relative to the corpus file.
    pub quiver: String,
    /// Overrides the chain of the quiver file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<Vec<String>>>,
    /// Overrides the tower of the quiver file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerSpec>,
    /// Linear representation files, relative to the corpus file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reps: Vec<String>,
    pub checks: Vec<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryCheck {
    pub expected: Outcome,
    pub met: bool,
    #[serde(flatten)]
    pub report: CheckReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<EntryCheck>,
}

impl EntryReport {
    pub fn all_met(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.met)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &FsPath) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

impl Corpus {
    pub fn read(path: impl AsRef<FsPath>) -> Result<Self> {
        read_json(path.as_ref())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

impl CorpusEntry {
    /// Resolve the files named by the entry against `base`.
    pub fn load(&self, base: &FsPath) -> Result<Subject> {
        let mut file = QuiverFile::read(base.join(&self.quiver))?;
        if self.chain.is_some() {
            file.chain = self.chain.clone();
        }
        if self.tower.is_some() {
            file.tower = self.tower.clone();
        }
        let ctx = file.context()?;
        let reps = self
            .reps
            .iter()
            .map(|r| LinearRep::from_file(&ctx, &read_json::<RepFile>(&base.join(r))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Subject { ctx: ctx.clone(), choice: SpecialEdgeChoice::least(&ctx), reps })
    }

    pub fn run(&self, base: &FsPath, settings: &Settings) -> EntryReport {
        let subject = match self.load(base) {
            Ok(s) => s,
            Err(e) => return EntryReport { name: self.name.clone(), error: Some(e.to_string()), checks: Vec::new() },
        };
        let checks = self
            .checks
            .iter()
            .map(|x| {
                let report = run_check(&subject, x.check, settings);
                EntryCheck { expected: x.expect, met: report.outcome == x.expect, report }
            })
            .collect();
        EntryReport { name: self.name.clone(), error: None, checks }
    }
}

/// Run every entry of the corpus file at `path`; files named by entries
/// are resolved relative to its directory.
pub fn run_corpus(path: impl AsRef<FsPath>, settings: &Settings) -> Result<Vec<EntryReport>> {
    let path = path.as_ref();
    let corpus = Corpus::read(path)?;
    let base: PathBuf = path.parent().map(FsPath::to_path_buf).unwrap_or_default();
    Ok(corpus.entries.iter().map(|e| e.run(&base, settings)).collect())
}

/// What each check is expected to report on a sample.
pub fn expected_outcome(sample: &Sample, check: Check) -> Outcome {
    let finite = matches!(sample.tower, TowerSpec::FiniteField { .. } | TowerSpec::Constant { p: 1.., .. });
    match check {
        Check::Oracle if !finite => Outcome::Inconclusive,
        Check::Transduction if has_left_witness(sample) => Outcome::WitnessFound,
        _ => Outcome::Pass,
    }
}

/// A left transduction can leave the algebra only across a level jump:
/// an edge `e` with `lev(s(e)) < lev(r(e))`, and the fields must differ.
fn has_left_witness(sample: &Sample) -> bool {
    if matches!(sample.tower, TowerSpec::Constant { .. }) {
        return false;
    }
    let q = &sample.quiver;
    let depth = |v| sample.chain.depth(v);
    (0..q.edge_count()).any(|e| depth(q.src(e)) != depth(q.dst(e)))
}

/// Files for a corpus built from the bundled samples: `(relative path,
/// contents)` pairs, the corpus file itself named `corpus.json`.
pub fn sample_corpus_files() -> Vec<(String, String)> {
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for s in crate::samples::all() {
        let quiver = format!("quivers/{}.json", s.name);
        files.push((quiver.clone(), QuiverFile::from_sample(&s).to_json()));
        let mut reps = Vec::new();
        for (k, rep) in s.reps.iter().enumerate() {
            let name = format!("reps/{}.{k}.json", s.name);
            files.push((name.clone(), serde_json::to_string_pretty(rep).expect("plain data")));
            reps.push(name);
        }
        let checks = Check::ALL.iter().map(|&c| Expectation { check: c, expect: expected_outcome(&s, c) }).collect();
        entries.push(CorpusEntry { name: s.name.into(), quiver, chain: None, tower: None, reps, checks });
    }
    files.push(("corpus.json".into(), Corpus { entries }.to_json()));
    files.into_iter().map(|(p, c)| (p, c + "\n")).collect()
}
