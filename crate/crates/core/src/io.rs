//! File formats: argument files and protocol configs (JSON in), models, AvN
//! theories and protocol reports (JSON or CSV out).
//!
//! Exact rationals are written as `"p/q"` strings, floats as the shortest
//! decimal that round-trips.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{EquationSystem, FiniteAbelianGroup, GroupElement, PhaseSolution, RationalPhase};
use crate::contextuality::AvnTheory;
use crate::protocol::{DeviceBackend, InputMode, ProtocolConfig, ProtocolReport};
use crate::scenario::{validate_argument, ContextLabel, EmpiricalModel, MerminArgument};
use crate::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("CSV output failed: {0}")]
    Csv(String),
}

fn json_error(e: serde_json::Error) -> Error {
    IoError::Json(e.to_string()).into()
}

/// Reads a file, or standard input when `path` is `-`.
pub fn read_input(path: &str) -> Result<String, Error> {
    let mut text = String::new();
    let result = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| IoError::Read { path: path.to_string(), message: e.to_string() })?;
    Ok(text)
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| IoError::Write { path: p.display().to_string(), message: e.to_string() }.into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A group element written either as a bare residue (cyclic groups) or as a
/// residue list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRepr {
    Scalar(u64),
    Tuple(Vec<u64>),
}

impl ElementRepr {
    pub fn resolve(&self, group: &FiniteAbelianGroup) -> Result<GroupElement, Error> {
        let residues = match self {
            ElementRepr::Scalar(r) => vec![*r],
            ElementRepr::Tuple(rs) => rs.clone(),
        };
        Ok(group.element(residues)?)
    }
}

impl From<&GroupElement> for ElementRepr {
    fn from(g: &GroupElement) -> Self {
        ElementRepr::Tuple(g.residues().to_vec())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub coefficients: Vec<Vec<i64>>,
    pub rhs: Vec<ElementRepr>,
}

/// On-disk form of an argument. Without `beta` the phases come from the
/// torus solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentFile {
    pub group: Vec<u64>,
    pub system: SystemFile,
    pub parties: usize,
    /// One table per unknown, one `"p/q"` per character in enumeration order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Vec<RationalPhase>>>,
}

impl ArgumentFile {
    pub fn build(&self) -> Result<MerminArgument, Error> {
        let group = FiniteAbelianGroup::new(self.group.clone())?;
        let rhs = self.system.rhs.iter().map(|a| a.resolve(&group)).collect::<Result<Vec<_>, _>>()?;
        let system = EquationSystem::new(group.clone(), self.system.coefficients.clone(), rhs)?;
        let argument = match &self.beta {
            Some(tables) => {
                let beta = PhaseSolution::new(group.clone(), tables.clone())?;
                validate_argument(&group, system, beta, self.parties)?
            }
            None => MerminArgument::with_torus_solution(system, self.parties)?,
        };
        Ok(argument)
    }

    pub fn from_argument(argument: &MerminArgument) -> Self {
        let system = argument.system();
        Self {
            group: argument.group().factors().to_vec(),
            system: SystemFile {
                coefficients: system.coefficients().to_rows(),
                rhs: system.rhs().iter().map(ElementRepr::from).collect(),
            },
            parties: argument.parties(),
            beta: Some(argument.beta().tables().to_vec()),
        }
    }
}

pub fn parse_argument(text: &str) -> Result<MerminArgument, Error> {
    let file: ArgumentFile = serde_json::from_str(text).map_err(json_error)?;
    file.build()
}

pub fn argument_to_json(argument: &MerminArgument) -> String {
    to_json(&ArgumentFile::from_argument(argument))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// A probability type that can be written out.
pub trait Probability {
    fn to_json(&self) -> serde_json::Value;
    fn to_text(&self) -> String;
}

impl Probability for BigRational {
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_text())
    }

    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Probability for f64 {
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

#[derive(Serialize)]
struct OutcomeDoc {
    outcome: Vec<GroupElement>,
    probability: serde_json::Value,
}

#[derive(Serialize)]
struct ContextDoc {
    index: usize,
    label: ContextLabel,
    choices: Vec<usize>,
    outcomes: Vec<OutcomeDoc>,
}

#[derive(Serialize)]
struct ModelDoc<'a> {
    group: &'a FiniteAbelianGroup,
    parties: usize,
    contexts: Vec<ContextDoc>,
}

fn model_doc<P: Probability>(model: &EmpiricalModel<P>) -> ModelDoc<'_> {
    let group = model.group();
    let contexts = model
        .contexts()
        .iter()
        .zip(model.distributions())
        .enumerate()
        .map(|(index, (c, dist))| ContextDoc {
            index,
            label: c.label,
            choices: c.choices.clone(),
            outcomes: dist
                .iter()
                .map(|(o, p)| OutcomeDoc {
                    outcome: o.iter().map(|&g| group.element_at(g)).collect(),
                    probability: p.to_json(),
                })
                .collect(),
        })
        .collect();
    ModelDoc { group, parties: model.parties(), contexts }
}

pub fn model_to_json<P: Probability>(model: &EmpiricalModel<P>) -> String {
    to_json(&model_doc(model))
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// One row per (context, outcome): `context,label,choices,outcome,probability`.
pub fn model_to_csv<P: Probability>(model: &EmpiricalModel<P>) -> Result<String, Error> {
    let csv_error = |e: csv::Error| Error::from(IoError::Csv(e.to_string()));
    let group = model.group();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["context", "label", "choices", "outcome", "probability"]).map_err(csv_error)?;
    for (i, c, o, p) in model.rows() {
        writer
            .write_record([
                i.to_string(),
                c.label.to_string(),
                join(&c.choices),
                join(o.iter().map(|&g| group.element_at(g))),
                p.to_text(),
            ])
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| IoError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

#[derive(Serialize)]
struct QuantumDoc<'a> {
    max_abs_deviation: f64,
    model: ModelDoc<'a>,
}

pub fn quantum_to_json(model: &EmpiricalModel<f64>, max_abs_deviation: f64) -> String {
    to_json(&QuantumDoc { max_abs_deviation, model: model_doc(model) })
}

#[derive(Serialize)]
struct AvnEquationDoc {
    /// `"(party,choice)"` with 1-based parties, coefficient 1.
    coeffs: BTreeMap<String, u64>,
    rhs: GroupElement,
}

#[derive(Serialize)]
struct AvnDoc<'a> {
    group: &'a FiniteAbelianGroup,
    equations: Vec<AvnEquationDoc>,
    is_avn: bool,
}

pub fn avn_to_json(theory: &AvnTheory, is_avn: bool) -> String {
    let equations = theory
        .equations
        .iter()
        .map(|e| AvnEquationDoc {
            coeffs: e.variables.iter().map(|&(j, m)| (format!("({},{})", j + 1, m), 1)).collect(),
            rhs: e.rhs.clone(),
        })
        .collect();
    to_json(&AvnDoc { group: &theory.group, equations, is_avn })
}

/// Where a protocol config finds its argument.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ArgumentRef {
    /// Relative paths resolve against the config file's directory.
    Path(PathBuf),
    Inline(ArgumentFile),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendFile {
    IdealQuantum,
    MixedNoise { delta: f64 },
    AdversarialClassical { solution: Vec<ElementRepr> },
}

fn default_max_noise() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub argument: ArgumentRef,
    pub players: usize,
    pub test_probability: f64,
    pub rounds: u64,
    #[serde(default = "default_max_noise")]
    pub max_noise: f64,
    pub backend: BackendFile,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub input_mode: InputMode,
    #[serde(default)]
    pub plaintext: Vec<ElementRepr>,
    #[serde(default)]
    pub amplitude_cap: Option<u64>,
}

/// Parses a protocol config; `base` is the directory relative argument paths
/// are resolved against.
pub fn parse_protocol_config(text: &str, base: &Path) -> Result<(ProtocolConfig, Vec<GroupElement>), Error> {
    let file: ProtocolFile = serde_json::from_str(text).map_err(json_error)?;
    let argument = match &file.argument {
        ArgumentRef::Inline(a) => a.build()?,
        ArgumentRef::Path(p) => {
            let path = base.join(p);
            parse_argument(&read_input(&path.to_string_lossy())?)?
        }
    };
    let group = argument.group().clone();
    let backend = match &file.backend {
        BackendFile::IdealQuantum => DeviceBackend::IdealQuantum,
        BackendFile::MixedNoise { delta } => DeviceBackend::MixedNoise { delta: *delta },
        BackendFile::AdversarialClassical { solution } => DeviceBackend::AdversarialClassical {
            solution: solution.iter().map(|b| b.resolve(&group)).collect::<Result<_, _>>()?,
        },
    };
    let plaintext = file.plaintext.iter().map(|p| p.resolve(&group)).collect::<Result<Vec<_>, _>>()?;
    let config = ProtocolConfig {
        argument,
        players: file.players,
        test_probability: file.test_probability,
        rounds: file.rounds,
        max_noise: file.max_noise,
        backend,
        seed: file.seed,
        input_mode: file.input_mode,
        amplitude_cap: file.amplitude_cap.unwrap_or(crate::DEFAULT_AMPLITUDE_CAP),
    };
    config.validate()?;
    Ok((config, plaintext))
}

pub fn report_to_json(report: &ProtocolReport) -> String {
    to_json(report)
}

/// Fixed-width text summary of a report.
pub fn report_summary(report: &ProtocolReport) -> String {
    let r = &report.rounds;
    let mut s = String::new();
    let verdict = if report.success { "pass" } else { "fail" };
    writeln!(
        s,
        "rounds     attempted {}  invalid {}  valid {}  test {}  secret {}",
        r.attempted, r.invalid, r.valid, r.test, r.secret
    )
    .unwrap();
    writeln!(s, "test frac  {:.4}", report.test_fraction).unwrap();
    match &report.epsilon_exact {
        Some(exact) => {
            writeln!(s, "epsilon    {:.4} ({exact})  threshold {}  {verdict}", report.epsilon, report.max_noise)
        }
        None => writeln!(s, "epsilon    1 (some joint input never tested)  threshold {}  {verdict}", report.max_noise),
    }
    .unwrap();
    writeln!(s, "decode     {:.2}% of {} secret rounds", 100.0 * report.decode_success_fraction, r.secret).unwrap();
    writeln!(s, "eve        {:.2}%", 100.0 * report.eve_success_fraction).unwrap();
    writeln!(s).unwrap();
    writeln!(s, "{:<20} {:<22} {:>8}", "joint input", "label", "tests").unwrap();
    for c in &report.counts {
        writeln!(s, "{:<20} {:<22} {:>8}", join(&c.choices), c.label.to_string(), c.total).unwrap();
    }
    s
}
