//! Scenario files: a JSON tree with `network`, `algorithm`, `run`, `output`
//! and optional `axioms` blocks.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ifc_core::numkit::Mat;
use ifc_core::zoo::{db_to_linear, FixtureId, NetworkScenario};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Parse or validation failure, located by JSON path and, for syntax
/// errors, by line and column.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub field: String,
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{} (field `{}`, line {l}, column {c})", self.message, self.field),
            _ => write!(f, "{} (field `{}`)", self.message, self.field),
        }
    }
}

impl ParseError {
    fn at(field: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            field: field.into(),
            message: message.into(),
            line: None,
            column: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetUnit {
    #[serde(rename = "dB")]
    Db,
    #[serde(rename = "linear")]
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    pub unit: TargetUnit,
    pub values: Vec<f64>,
}

impl Targets {
    pub fn linear(&self) -> Vec<f64> {
        match self.unit {
            TargetUnit::Db => self.values.iter().map(|&d| db_to_linear(d)).collect(),
            TargetUnit::Linear => self.values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkBlock {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "R")]
    pub r: usize,
    /// Row-major by base: `gains[r][j]` is the gain from user `j` to base `r`.
    pub gains: Vec<Vec<f64>>,
    pub noise: Vec<f64>,
    pub targets: Targets,
    /// 1-based serving base per user; strongest server when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
}

/// Interference-function family named in `algorithm.family`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Linear,
    Mpa,
    Macro,
    MacroOver,
    Ubpc,
    Drpc,
    Fixture,
    Clamped(Box<Family>),
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "linear" => Family::Linear,
            "mpa" => Family::Mpa,
            "macro" => Family::Macro,
            "macro-over" => Family::MacroOver,
            "ubpc" => Family::Ubpc,
            "drpc" => Family::Drpc,
            "fixture" => Family::Fixture,
            _ => match s.strip_prefix("clamped-") {
                Some(inner) => {
                    let inner: Family = inner.parse()?;
                    if matches!(inner, Family::Clamped(_)) {
                        return Err(format!("nested clamping in `{s}`"));
                    }
                    Family::Clamped(Box::new(inner))
                }
                None => return Err(format!("unknown family `{s}`")),
            },
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Linear => f.write_str("linear"),
            Family::Mpa => f.write_str("mpa"),
            Family::Macro => f.write_str("macro"),
            Family::MacroOver => f.write_str("macro-over"),
            Family::Ubpc => f.write_str("ubpc"),
            Family::Drpc => f.write_str("drpc"),
            Family::Fixture => f.write_str("fixture"),
            Family::Clamped(inner) => write!(f, "clamped-{inner}"),
        }
    }
}

impl Family {
    fn base(&self) -> &Family {
        match self {
            Family::Clamped(inner) => inner,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmBlock {
    pub family: String,
    /// Scalar fixture name (`example1`, `example2`, `example3`, `no-fixed-point`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<Vec<f64>>,
    /// Interval bounds on the normalised gain matrix (DRPC).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<Vec<f64>>>,
}

impl AlgorithmBlock {
    pub fn family(&self) -> Result<Family, ParseError> {
        self.family
            .parse()
            .map_err(|m: String| ParseError::at("algorithm.family", m))
    }

    pub fn fixture_id(&self) -> Result<FixtureId, ParseError> {
        let name = self
            .fixture
            .as_deref()
            .ok_or_else(|| ParseError::at("algorithm.fixture", "fixture family needs a fixture name"))?;
        FixtureId::from_label(name)
            .ok_or_else(|| ParseError::at("algorithm.fixture", format!("unknown fixture `{name}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    #[default]
    Sync,
    Async,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    #[default]
    BoundedDelay,
    TotalAsync,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default)]
    pub mode: RunMode,
    /// Initial powers; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<Vec<f64>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub schedule: ScheduleKind,
    /// Delay bound for bounded-delay schedules.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Per-user delay bounds; overrides `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delays: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
    /// Forced-update window for total-async schedules.
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub update_prob: Option<f64>,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            mode: RunMode::Sync,
            p0: None,
            tol: default_tol(),
            max_iter: default_max_iter(),
            schedule: ScheduleKind::BoundedDelay,
            d: None,
            delays: None,
            seed: 0,
            window: None,
            growth: None,
            update_prob: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

/// Extra deterministic probe points for the axiom checkers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AxiomBlock {
    #[serde(default)]
    pub anchors: Vec<Vec<f64>>,
    /// Scalings `alpha` (scalability) / perturbations `eps` (contractivity).
    #[serde(default)]
    pub scales: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkBlock>,
    pub algorithm: AlgorithmBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axioms: Option<AxiomBlock>,
}

fn check_len(field: &str, got: usize, want: usize) -> Result<(), ParseError> {
    if got == want {
        Ok(())
    } else {
        Err(ParseError::at(field, format!("expected {want} entries, found {got}")))
    }
}

fn check_square(field: &str, m: &[Vec<f64>], k: usize) -> Result<(), ParseError> {
    check_len(field, m.len(), k)?;
    for (i, row) in m.iter().enumerate() {
        check_len(&format!("{field}[{i}]"), row.len(), k)?;
    }
    Ok(())
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ParseError {
                field: path,
                message: inner.to_string(),
                line: Some(inner.line()),
                column: Some(inner.column()),
            }
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ParseError::at("<file>", format!("cannot read {}: {e}", path.display())))?;
        ScenarioFile::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    /// Number of users implied by the file.
    pub fn users(&self) -> Result<usize, ParseError> {
        match (&self.network, self.algorithm.family()?.base()) {
            (_, Family::Fixture) => Ok(1),
            (Some(n), _) => Ok(n.k),
            (None, _) => Err(ParseError::at("network", "this family needs a network block")),
        }
    }

    /// Dimension and cross-block consistency checks.
    pub fn validate(&self) -> Result<(), ParseError> {
        let family = self.algorithm.family()?;
        if let Some(n) = &self.network {
            check_len("network.gains", n.gains.len(), n.r)?;
            for (r, row) in n.gains.iter().enumerate() {
                check_len(&format!("network.gains[{r}]"), row.len(), n.k)?;
            }
            check_len("network.noise", n.noise.len(), n.r)?;
            check_len("network.targets.values", n.targets.values.len(), n.k)?;
            if let Some(a) = &n.assignment {
                check_len("network.assignment", a.len(), n.k)?;
                if let Some(i) = a.iter().position(|&x| x == 0 || x > n.r) {
                    return Err(ParseError::at(
                        format!("network.assignment[{i}]"),
                        format!("base {} is outside 1..={}", a[i], n.r),
                    ));
                }
            }
        }
        let k = self.users()?;
        let alg = &self.algorithm;
        match family.base() {
            Family::Fixture => {
                alg.fixture_id()?;
            }
            Family::Ubpc => {
                for (name, v) in [("algorithm.a", &alg.a), ("algorithm.alpha", &alg.alpha)] {
                    let v = v
                        .as_ref()
                        .ok_or_else(|| ParseError::at(name, "required for the ubpc family"))?;
                    check_len(name, v.len(), k)?;
                }
            }
            Family::Drpc => {
                for (name, m) in [("algorithm.lower", &alg.lower), ("algorithm.upper", &alg.upper)] {
                    let m = m
                        .as_ref()
                        .ok_or_else(|| ParseError::at(name, "required for the drpc family"))?;
                    check_square(name, m, k)?;
                }
            }
            _ => {}
        }
        if matches!(family, Family::Clamped(_)) {
            for (name, v) in [("algorithm.p_min", &alg.p_min), ("algorithm.p_max", &alg.p_max)] {
                let v = v
                    .as_ref()
                    .ok_or_else(|| ParseError::at(name, "required for clamped families"))?;
                check_len(name, v.len(), k)?;
            }
        }
        let run = &self.run;
        if let Some(p0) = &run.p0 {
            check_len("run.p0", p0.len(), k)?;
        }
        if let Some(d) = &run.delays {
            check_len("run.delays", d.len(), k)?;
        }
        if run.mode == RunMode::Async
            && run.schedule == ScheduleKind::BoundedDelay
            && run.d.is_none()
            && run.delays.is_none()
        {
            return Err(ParseError::at("run.D", "bounded-delay runs need `D` or `delays`"));
        }
        if !(run.tol > 0.0) {
            return Err(ParseError::at("run.tol", "must be positive"));
        }
        if run.max_iter == 0 {
            return Err(ParseError::at("run.max_iter", "must be at least 1"));
        }
        Ok(())
    }

    /// Network scenario on a linear scale with a 0-based assignment.
    pub fn network_scenario(&self) -> Result<NetworkScenario, ParseError> {
        let n = self
            .network
            .as_ref()
            .ok_or_else(|| ParseError::at("network", "this family needs a network block"))?;
        let gains = Mat::from_rows(&n.gains).map_err(|e| ParseError::at("network.gains", e.to_string()))?;
        let assignment = n
            .assignment
            .as_ref()
            .map(|a| a.iter().map(|&x| x - 1).collect());
        NetworkScenario::new(gains, n.noise.clone(), n.targets.linear(), assignment)
            .map_err(|e| ParseError::at("network", e.to_string()))
    }

    pub fn p0(&self) -> Result<Vec<f64>, ParseError> {
        Ok(match &self.run.p0 {
            Some(p) => p.clone(),
            None => vec![0.0; self.users()?],
        })
    }
}
