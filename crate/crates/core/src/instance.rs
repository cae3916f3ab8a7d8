//! Benchmark instance files, problem parameters, and coverage scenarios.
//!
//! The on-disk format is the whitespace-separated table used by the
//! Schneider-style electric VRPTW benchmarks: one row per node with a
//! `d`/`f`/`c` type code, followed by five parameter lines whose values
//! sit between slashes (`Q Vehicle fuel tank capacity /77.75/`).

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Role of a node in the instance file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Depot,
    Customer,
    Station,
}

impl NodeKind {
    fn code(self) -> &'static str {
        match self {
            NodeKind::Depot => "d",
            NodeKind::Customer => "c",
            NodeKind::Station => "f",
        }
    }
}

/// One row of the instance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub x: f64,
    pub y: f64,
    /// Cargo demand; zero for depot and station rows.
    pub demand: f64,
    /// Earliest service start.
    pub ready: f64,
    /// Latest service start.
    pub due: f64,
    /// Service duration; zero for depot and station rows.
    pub service: f64,
}

impl Node {
    fn check(&self) -> Result<(), String> {
        if !(self.ready <= self.due) {
            return Err(format!(
                "node '{}' has inverted time window [{}, {}]",
                self.id, self.ready, self.due
            ));
        }
        if self.demand < 0.0 {
            return Err(format!("node '{}' has negative demand", self.id));
        }
        if self.service < 0.0 {
            return Err(format!("node '{}' has negative service time", self.id));
        }
        if self.kind != NodeKind::Customer && self.demand != 0.0 {
            return Err(format!("non-customer node '{}' has nonzero demand", self.id));
        }
        if self.kind != NodeKind::Customer && self.service != 0.0 {
            return Err(format!(
                "non-customer node '{}' has nonzero service time",
                self.id
            ));
        }
        Ok(())
    }
}

/// Fleet-wide vehicle parameters from the instance trailer lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Battery capacity `Q` (energy units).
    pub battery_capacity: f64,
    /// Cargo capacity `C`.
    pub cargo_capacity: f64,
    /// Energy consumed per unit distance `r`.
    pub consumption_rate: f64,
    /// Time per energy unit when recharging at a station `g`.
    pub inverse_refuel_rate: f64,
    /// Travel speed `v`; travel time is distance / velocity.
    pub velocity: f64,
}

impl VehicleParams {
    /// Duration of one full station recharge, `g * Q`.
    pub fn full_recharge_duration(&self) -> f64 {
        self.inverse_refuel_rate * self.battery_capacity
    }

    fn check(&self) -> Result<(), String> {
        let fields = [
            (self.battery_capacity, "battery capacity Q"),
            (self.cargo_capacity, "cargo capacity C"),
            (self.consumption_rate, "consumption rate r"),
            (self.inverse_refuel_rate, "inverse refuel rate g"),
            (self.velocity, "velocity v"),
        ];
        for (value, name) in fields {
            if !(value > 0.0) {
                return Err(format!("{name} must be strictly positive, got {value}"));
            }
        }
        Ok(())
    }
}

/// A parsed problem instance: exactly one depot, customers, stations,
/// and the vehicle parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub nodes: Vec<Node>,
    pub params: VehicleParams,
}

impl Instance {
    /// Validating constructor for programmatic use. Unlike the file
    /// parser this permits a customer-less instance (degenerate inputs
    /// show up in empty-case paths and generators).
    pub fn new(
        name: impl Into<String>,
        nodes: Vec<Node>,
        params: VehicleParams,
    ) -> Result<Self, ParseError> {
        let instance = Instance {
            name: name.into(),
            nodes,
            params,
        };
        instance.validate(false)?;
        Ok(instance)
    }

    /// Parse the instance file format. See the module docs for the layout.
    pub fn parse(text: &str, name: impl Into<String>) -> Result<Self, ParseError> {
        let mut nodes: Vec<Node> = Vec::new();
        let mut seen = HashSet::new();
        let mut params: BTreeMap<char, f64> = BTreeMap::new();
        let mut header_seen = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if !header_seen {
                if !trimmed.starts_with("StringID") {
                    return Err(ParseError::MalformedHeader { line });
                }
                header_seen = true;
                continue;
            }
            // Trailer lines carry their value between slashes.
            if trimmed.contains('/') {
                let key = trimmed.chars().next().unwrap();
                if !"QCrgv".contains(key) {
                    return Err(ParseError::MalformedParameter { line });
                }
                let value = parse_slash_value(trimmed)
                    .ok_or(ParseError::MalformedParameter { line })?;
                params.insert(key, value);
                continue;
            }
            let cols: Vec<&str> = trimmed.split_whitespace().collect();
            if cols.len() != 8 {
                return Err(ParseError::ColumnCount {
                    line,
                    found: cols.len(),
                });
            }
            let kind = match cols[1] {
                "d" => NodeKind::Depot,
                "c" => NodeKind::Customer,
                "f" => NodeKind::Station,
                other => {
                    return Err(ParseError::UnknownType {
                        line,
                        code: other.to_string(),
                    })
                }
            };
            let num = |text: &str, column: &'static str| -> Result<f64, ParseError> {
                text.parse::<f64>().map_err(|_| ParseError::NonNumeric {
                    line,
                    value: text.to_string(),
                    column,
                })
            };
            let node = Node {
                id: cols[0].to_string(),
                kind,
                x: num(cols[2], "x")?,
                y: num(cols[3], "y")?,
                demand: num(cols[4], "demand")?,
                ready: num(cols[5], "ReadyTime")?,
                due: num(cols[6], "DueDate")?,
                service: num(cols[7], "ServiceTime")?,
            };
            if !seen.insert(node.id.clone()) {
                return Err(ParseError::DuplicateId {
                    line,
                    id: node.id.clone(),
                });
            }
            if kind == NodeKind::Depot && nodes.iter().any(|n| n.kind == NodeKind::Depot) {
                return Err(ParseError::MultipleDepots { line });
            }
            node.check()
                .map_err(|message| ParseError::Invariant { line, message })?;
            nodes.push(node);
        }

        if !header_seen {
            return Err(ParseError::MalformedHeader { line: 1 });
        }
        let mut get = |key: char, name: &'static str| -> Result<f64, ParseError> {
            params
                .remove(&key)
                .ok_or(ParseError::MissingParameter { name })
        };
        let params = VehicleParams {
            battery_capacity: get('Q', "Q Vehicle fuel tank capacity")?,
            cargo_capacity: get('C', "C Vehicle load capacity")?,
            consumption_rate: get('r', "r fuel consumption rate")?,
            inverse_refuel_rate: get('g', "g inverse refueling rate")?,
            velocity: get('v', "v average Velocity")?,
        };

        let instance = Instance {
            name: name.into(),
            nodes,
            params,
        };
        instance.validate(true)?;
        Ok(instance)
    }

    /// Read and parse an instance file; the instance name is the file stem.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ParseError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".to_string());
        Instance::parse(&text, name)
    }

    fn validate(&self, require_customers: bool) -> Result<(), ParseError> {
        let depots = self.nodes.iter().filter(|n| n.kind == NodeKind::Depot).count();
        if depots == 0 {
            return Err(ParseError::NoDepot);
        }
        if depots > 1 {
            return Err(ParseError::MultipleDepots { line: 0 });
        }
        if require_customers && self.customers().next().is_none() {
            return Err(ParseError::NoCustomers);
        }
        let mut seen = HashSet::new();
        for node in &self.nodes {
            if !seen.insert(node.id.as_str()) {
                return Err(ParseError::Invalid {
                    message: format!("duplicate node id '{}'", node.id),
                });
            }
            node.check()
                .map_err(|message| ParseError::Invalid { message })?;
        }
        self.params
            .check()
            .map_err(|message| ParseError::Invalid { message })?;
        Ok(())
    }

    /// Serialize back to the instance file format. Parsing the output
    /// reproduces this instance exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("StringID Type x y demand ReadyTime DueDate ServiceTime\n");
        for n in &self.nodes {
            writeln!(
                out,
                "{} {} {} {} {} {} {} {}",
                n.id,
                n.kind.code(),
                n.x,
                n.y,
                n.demand,
                n.ready,
                n.due,
                n.service
            )
            .unwrap();
        }
        out.push('\n');
        writeln!(
            out,
            "Q Vehicle fuel tank capacity /{}/",
            self.params.battery_capacity
        )
        .unwrap();
        writeln!(out, "C Vehicle load capacity /{}/", self.params.cargo_capacity).unwrap();
        writeln!(
            out,
            "r fuel consumption rate /{}/",
            self.params.consumption_rate
        )
        .unwrap();
        writeln!(
            out,
            "g inverse refueling rate /{}/",
            self.params.inverse_refuel_rate
        )
        .unwrap();
        writeln!(out, "v average Velocity /{}/", self.params.velocity).unwrap();
        out
    }

    pub fn depot(&self) -> &Node {
        self.nodes
            .iter()
            .find(|n| n.kind == NodeKind::Depot)
            .expect("validated instance has a depot")
    }

    pub fn customers(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Customer)
    }

    pub fn stations(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Station)
    }
}

fn parse_slash_value(line: &str) -> Option<f64> {
    let start = line.find('/')?;
    let end = line.rfind('/')?;
    if end <= start {
        return None;
    }
    line[start + 1..end].trim().parse().ok()
}

pub fn euclidean(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt()
}

/// Symmetric Euclidean distance and travel-time matrices over the
/// instance nodes, indexed by position in `Instance::nodes`.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<f64>,
    time: Vec<f64>,
}

impl DistanceMatrix {
    pub fn build(instance: &Instance) -> Self {
        let n = instance.nodes.len();
        let mut dist = vec![0.0; n * n];
        let mut time = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let a = &instance.nodes[i];
                let b = &instance.nodes[j];
                let d = euclidean(a.x, a.y, b.x, b.y);
                dist[i * n + j] = d;
                time[i * n + j] = d / instance.params.velocity;
            }
        }
        DistanceMatrix { n, dist, time }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn time(&self, i: usize, j: usize) -> f64 {
        self.time[i * self.n + j]
    }
}

/// Per-arc wireless coverage fractions plus the transfer rate `w`.
///
/// Coverage is keyed by physical node ids; arcs without an explicit
/// override fall back to the uniform default (0 unless set). Replicated
/// station copies inherit the coverage of their physical station.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageScenario {
    wireless_rate: f64,
    default_coverage: f64,
    overrides: BTreeMap<(String, String), f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioDto {
    w: f64,
    #[serde(default)]
    default: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    arcs: Vec<ArcOverrideDto>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ArcOverrideDto {
    from: String,
    to: String,
    omega: f64,
}

impl CoverageScenario {
    /// Scenario applying the same coverage fraction to every arc.
    pub fn uniform(level: f64, wireless_rate: f64) -> Result<Self, ScenarioError> {
        check_fraction(level)?;
        check_rate(wireless_rate)?;
        Ok(CoverageScenario {
            wireless_rate,
            default_coverage: level,
            overrides: BTreeMap::new(),
        })
    }

    pub fn wireless_rate(&self) -> f64 {
        self.wireless_rate
    }

    pub fn default_coverage(&self) -> f64 {
        self.default_coverage
    }

    /// Coverage fraction of the directed arc between two physical node ids.
    pub fn coverage(&self, from: &str, to: &str) -> f64 {
        self.overrides
            .get(&(from.to_string(), to.to_string()))
            .copied()
            .unwrap_or(self.default_coverage)
    }

    pub fn set_arc(
        &mut self,
        from: impl Into<String>,
        to: impl Into<String>,
        omega: f64,
    ) -> Result<(), ScenarioError> {
        check_fraction(omega)?;
        self.overrides.insert((from.into(), to.into()), omega);
        Ok(())
    }

    /// Parse the scenario override document:
    /// `{"w": 0.9, "default": 0.4, "arcs": [{"from":"C1","to":"C2","omega":0.8}]}`.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let dto: ScenarioDto =
            serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))?;
        let mut scenario = CoverageScenario::uniform(dto.default, dto.w)?;
        for arc in dto.arcs {
            scenario.set_arc(arc.from, arc.to, arc.omega)?;
        }
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ScenarioDto {
            w: self.wireless_rate,
            default: self.default_coverage,
            arcs: self
                .overrides
                .iter()
                .map(|((from, to), omega)| ArcOverrideDto {
                    from: from.clone(),
                    to: to.clone(),
                    omega: *omega,
                })
                .collect(),
        })
        .expect("scenario serialization cannot fail")
    }
}

impl Serialize for CoverageScenario {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScenarioDto {
            w: self.wireless_rate,
            default: self.default_coverage,
            arcs: self
                .overrides
                .iter()
                .map(|((from, to), omega)| ArcOverrideDto {
                    from: from.clone(),
                    to: to.clone(),
                    omega: *omega,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoverageScenario {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = ScenarioDto::deserialize(deserializer)?;
        let mut scenario = CoverageScenario::uniform(dto.default, dto.w)
            .map_err(serde::de::Error::custom)?;
        for arc in dto.arcs {
            scenario
                .set_arc(arc.from, arc.to, arc.omega)
                .map_err(serde::de::Error::custom)?;
        }
        Ok(scenario)
    }
}

fn check_fraction(level: f64) -> Result<(), ScenarioError> {
    if !(0.0..=1.0).contains(&level) || level.is_nan() {
        return Err(ScenarioError::FractionOutOfRange(level));
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<(), ScenarioError> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(ScenarioError::NegativeRate(rate));
    }
    Ok(())
}

/// Objective weights: `weighted = m1 * vehicles + m2 * distance + m3 * time`.
///
/// Serializes as the 3-element array `[m1, m2, m3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl Serialize for Weights {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.m1, self.m2, self.m3].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [m1, m2, m3] = <[f64; 3]>::deserialize(deserializer)?;
        Weights::new(m1, m2, m3).map_err(serde::de::Error::custom)
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            m1: 10_000.0,
            m2: 1.0,
            m3: 1.0,
        }
    }
}

impl Weights {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self, ScenarioError> {
        let w = Weights { m1, m2, m3 };
        for v in [m1, m2, m3] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ScenarioError::NegativeRate(v));
            }
        }
        Ok(w)
    }

    pub fn weighted(&self, vehicles: usize, distance: f64, time: f64) -> f64 {
        self.m1 * vehicles as f64 + self.m2 * distance + self.m3 * time
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected a column header starting with 'StringID'")]
    MalformedHeader { line: usize },
    #[error("line {line}: expected 8 whitespace-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: unknown node type code '{code}' (expected d, c, or f)")]
    UnknownType { line: usize, code: String },
    #[error("line {line}: non-numeric {column} value '{value}'")]
    NonNumeric {
        line: usize,
        value: String,
        column: &'static str,
    },
    #[error("line {line}: duplicate node id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: {message}")]
    Invariant { line: usize, message: String },
    #[error("missing parameter line '{name}'")]
    MissingParameter { name: &'static str },
    #[error("line {line}: malformed parameter line, expected a value between slashes")]
    MalformedParameter { line: usize },
    #[error("instance has no depot row")]
    NoDepot,
    #[error("line {line}: more than one depot row")]
    MultipleDepots { line: usize },
    #[error("instance has no customer rows")]
    NoCustomers,
    #[error("{message}")]
    Invalid { message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("coverage fraction {0} outside [0, 1]")]
    FractionOutOfRange(f64),
    #[error("rate/weight {0} must be finite and non-negative")]
    NegativeRate(f64),
    #[error("scenario JSON: {0}")]
    Json(String),
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    pub(crate) const MINIMAL_FIXTURE: &str = "\
StringID Type x y demand ReadyTime DueDate ServiceTime
D0 d 0.0 0.0 0.0 0.0 100.0 0.0
C1 c 3.0 4.0 10.0 0.0 90.0 5.0

Q Vehicle fuel tank capacity /50.0/
C Vehicle load capacity /100.0/
r fuel consumption rate /1.0/
g inverse refueling rate /2.0/
v average Velocity /1.0/
";

    #[test]
    fn parses_minimal_fixture() {
        let inst = Instance::parse(MINIMAL_FIXTURE, "minimal").unwrap();
        assert_eq!(inst.nodes.len(), 2);
        assert_eq!(inst.params.battery_capacity, 50.0);
        assert_eq!(inst.params.cargo_capacity, 100.0);
        assert_eq!(inst.depot().id, "D0");
        assert_eq!(inst.customers().count(), 1);
        assert_eq!(inst.params.full_recharge_duration(), 100.0);
    }

    #[test]
    fn rejects_inverted_window() {
        let text = MINIMAL_FIXTURE.replace(
            "C1 c 3.0 4.0 10.0 0.0 90.0 5.0",
            "C1 c 3.0 4.0 10.0 50.0 40.0 5.0",
        );
        let err = Instance::parse(&text, "bad").unwrap_err();
        match err {
            ParseError::Invariant { line, ref message } => {
                assert_eq!(line, 3);
                assert!(message.contains("inverted"), "{message}");
            }
            other => panic!("expected window invariant error, got {other}"),
        }
    }

    #[test]
    fn rejects_duplicate_ids_and_multiple_depots() {
        let dup = format!("{}C1 c 1.0 1.0 5.0 0.0 10.0 0.0\n", MINIMAL_FIXTURE);
        assert!(matches!(
            Instance::parse(&dup, "dup").unwrap_err(),
            ParseError::DuplicateId { .. }
        ));
        let two = MINIMAL_FIXTURE.replace(
            "C1 c 3.0 4.0 10.0 0.0 90.0 5.0",
            "C1 c 3.0 4.0 10.0 0.0 90.0 5.0\nD1 d 1.0 1.0 0.0 0.0 100.0 0.0",
        );
        assert!(matches!(
            Instance::parse(&two, "two").unwrap_err(),
            ParseError::MultipleDepots { .. }
        ));
    }

    #[test]
    fn rejects_missing_parameter_and_bad_number() {
        let text = MINIMAL_FIXTURE.replace("v average Velocity /1.0/\n", "");
        assert!(matches!(
            Instance::parse(&text, "nov").unwrap_err(),
            ParseError::MissingParameter { name } if name.starts_with('v')
        ));
        let text = MINIMAL_FIXTURE.replace("3.0 4.0", "3.0 abc");
        let err = Instance::parse(&text, "nan").unwrap_err();
        assert!(matches!(err, ParseError::NonNumeric { line: 3, .. }), "{err}");
    }

    #[test]
    fn distance_matrix_three_four_five() {
        let inst = Instance::parse(MINIMAL_FIXTURE, "minimal").unwrap();
        let m = DistanceMatrix::build(&inst);
        assert_relative_eq!(m.dist(0, 1), 5.0);
        assert_relative_eq!(m.time(0, 1), 5.0);
        assert_relative_eq!(m.dist(0, 0), 0.0);
        assert_relative_eq!(m.dist(1, 1), 0.0);
    }

    #[test]
    fn travel_time_scales_with_velocity() {
        let text = MINIMAL_FIXTURE.replace("/1.0/\n", "/2.0/\n");
        // only the last parameter line (velocity) uses /1.0/ in the fixture
        // besides r; patch r back.
        let text = text.replace("r fuel consumption rate /2.0/", "r fuel consumption rate /1.0/");
        let inst = Instance::parse(&text, "fast").unwrap();
        assert_eq!(inst.params.velocity, 2.0);
        let m = DistanceMatrix::build(&inst);
        assert_relative_eq!(m.dist(0, 1), 5.0);
        assert_relative_eq!(m.time(0, 1), 2.5);
    }

    #[test]
    fn uniform_scenario_levels() {
        let zero = CoverageScenario::uniform(0.0, 0.9).unwrap();
        assert_eq!(zero.coverage("A", "B"), 0.0);
        let high = CoverageScenario::uniform(0.6, 0.9).unwrap();
        assert_eq!(high.coverage("A", "B"), 0.6);
        assert_eq!(high.coverage("B", "A"), 0.6);
        assert!(CoverageScenario::uniform(1.2, 0.9).is_err());
        assert!(CoverageScenario::uniform(-0.1, 0.9).is_err());
    }

    #[test]
    fn scenario_json_round_trip_with_overrides() {
        let text = r#"{"w": 0.9, "default": 0.4, "arcs": [{"from":"C1","to":"C2","omega":0.8}]}"#;
        let s = CoverageScenario::from_json(text).unwrap();
        assert_eq!(s.wireless_rate(), 0.9);
        assert_eq!(s.coverage("C1", "C2"), 0.8);
        assert_eq!(s.coverage("C2", "C1"), 0.4);
        let round = CoverageScenario::from_json(&s.to_json()).unwrap();
        assert_eq!(round, s);
        assert!(CoverageScenario::from_json(r#"{"w":0.9,"default":1.5}"#).is_err());
    }

    #[test]
    fn default_weights_match_experiment_setup() {
        let w = Weights::default();
        assert_eq!((w.m1, w.m2, w.m3), (10_000.0, 1.0, 1.0));
        assert_relative_eq!(w.weighted(2, 268.1, 1121.7), 21_389.8);
        assert!(Weights::new(-1.0, 0.0, 0.0).is_err());
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        let node = |kind: NodeKind, idx: usize| {
            (
                0.0..100.0f64,
                0.0..100.0f64,
                0.0..50.0f64,
                (0.0..500.0f64, 0.0..500.0f64),
                0.0..30.0f64,
            )
                .prop_map(move |(x, y, demand, (w0, w1), service)| {
                    let customer = kind == NodeKind::Customer;
                    Node {
                        id: match kind {
                            NodeKind::Depot => "D0".to_string(),
                            NodeKind::Customer => format!("C{idx}"),
                            NodeKind::Station => format!("S{idx}"),
                        },
                        kind,
                        x,
                        y,
                        demand: if customer { demand } else { 0.0 },
                        ready: w0.min(w1),
                        due: w0.max(w1) + 600.0,
                        service: if customer { service } else { 0.0 },
                    }
                })
        };
        (1usize..5, 0usize..3).prop_flat_map(move |(nc, ns)| {
            let customers: Vec<_> = (0..nc).map(|i| node(NodeKind::Customer, i)).collect();
            let stations: Vec<_> = (0..ns).map(|i| node(NodeKind::Station, i)).collect();
            (
                node(NodeKind::Depot, 0),
                customers,
                stations,
                0.1..200.0f64,
                1.0..300.0f64,
                0.1..3.0f64,
                0.1..5.0f64,
                0.1..4.0f64,
            )
                .prop_map(|(d, cs, ss, q, c, r, g, v)| {
                    let mut nodes = vec![d];
                    nodes.extend(cs);
                    nodes.extend(ss);
                    Instance::new(
                        "prop",
                        nodes,
                        VehicleParams {
                            battery_capacity: q,
                            cargo_capacity: c,
                            consumption_rate: r,
                            inverse_refuel_rate: g,
                            velocity: v,
                        },
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(inst in arb_instance()) {
            let text = inst.to_text();
            let back = Instance::parse(&text, inst.name.clone()).unwrap();
            prop_assert_eq!(back, inst);
        }

        #[test]
        fn distance_matrix_symmetry_and_triangle(inst in arb_instance()) {
            let m = DistanceMatrix::build(&inst);
            let n = inst.nodes.len();
            for i in 0..n {
                prop_assert_eq!(m.dist(i, i), 0.0);
                for j in 0..n {
                    prop_assert!((m.dist(i, j) - m.dist(j, i)).abs() < 1e-12);
                    for k in 0..n {
                        prop_assert!(m.dist(i, j) + m.dist(j, k) >= m.dist(i, k) - 1e-9);
                    }
                }
            }
        }
    }
}
