//! Resource propagation along routes, route/solution evaluation, and the
//! independent solution validator.
//!
//! A vehicle state is `(clock, battery, load)` where `clock` is the
//! *departure* time from the current node. Extending along an arc plays
//! the arrival rules forward:
//!
//! * arrival time = clock + travel time, must not exceed the head's due
//!   date (waiting for a window to open is free and unbounded);
//! * battery on arrival = min(capacity, battery + in-motion gain − consumption),
//!   must not drop below zero;
//! * customers consume cargo and service time, stations reset the battery
//!   to full for a fixed `g · Q` stop, the end depot just receives.
//!
//! Accumulated route *time* counts travel, customer service, and station
//! stops — waiting is deliberately excluded.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Arc, GraphNodeKind, NodeId, RoutingGraph};
use crate::instance::{CoverageScenario, Weights};
use crate::FEASIBILITY_EPS;

/// Vehicle resources at the moment of leaving a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceState {
    /// Departure time from the current node.
    pub clock: f64,
    /// Remaining energy at departure.
    pub battery: f64,
    /// Remaining cargo.
    pub load: f64,
}

impl ResourceState {
    /// State of a fresh vehicle leaving the depot.
    pub fn initial(graph: &RoutingGraph) -> Self {
        ResourceState {
            clock: graph.nodes[graph.depot].ready,
            battery: graph.params.battery_capacity,
            load: graph.params.cargo_capacity,
        }
    }
}

/// Result of one feasible arc traversal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub arrival: f64,
    pub battery_arrival: f64,
    /// Energy picked up in motion on this arc (`w · d · ω`).
    pub wireless_gain: f64,
    /// Post-service departure state at the head node.
    pub state: ResourceState,
}

/// Why a single arc traversal is impossible.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Infeasibility {
    #[error("arrival at '{node}' at {arrival:.3} misses the due date {due:.3}")]
    TimeWindow { node: String, arrival: f64, due: f64 },
    #[error("battery at '{node}' would reach {battery:.3}")]
    Battery { node: String, battery: f64 },
    #[error("load {load:.3} cannot cover demand {demand:.3} at '{node}'")]
    Capacity { node: String, load: f64, demand: f64 },
}

/// Traverse `arc` from the state at its tail to the node `to`, applying
/// window, battery, and cargo rules. `arc` must be `graph.arc(from, to)`
/// for some feasible tail; the tail itself is not re-checked.
pub fn extend(
    graph: &RoutingGraph,
    state: &ResourceState,
    arc: &Arc,
    to: NodeId,
) -> Result<Step, Infeasibility> {
    let target = &graph.nodes[to];
    let params = &graph.params;

    let arrival = state.clock + arc.time;
    if arrival > target.due + FEASIBILITY_EPS {
        return Err(Infeasibility::TimeWindow {
            node: target.label.clone(),
            arrival,
            due: target.due,
        });
    }

    let wireless_gain = graph.wireless_rate * arc.dist * arc.coverage;
    let battery_arrival = (state.battery + wireless_gain
        - params.consumption_rate * arc.dist)
        .min(params.battery_capacity);
    if battery_arrival < -FEASIBILITY_EPS {
        return Err(Infeasibility::Battery {
            node: target.label.clone(),
            battery: battery_arrival,
        });
    }

    let state = match target.kind {
        GraphNodeKind::Customer => {
            if state.load < target.demand - FEASIBILITY_EPS {
                return Err(Infeasibility::Capacity {
                    node: target.label.clone(),
                    load: state.load,
                    demand: target.demand,
                });
            }
            ResourceState {
                clock: arrival.max(target.ready) + target.service,
                battery: battery_arrival,
                load: state.load - target.demand,
            }
        }
        GraphNodeKind::StationCopy { .. } => ResourceState {
            clock: arrival.max(target.ready) + params.full_recharge_duration(),
            battery: params.battery_capacity,
            load: state.load,
        },
        GraphNodeKind::Depot | GraphNodeKind::EndDepot => ResourceState {
            clock: arrival,
            battery: battery_arrival,
            load: state.load,
        },
    };

    Ok(Step {
        arrival,
        battery_arrival,
        wireless_gain,
        state,
    })
}

/// Resource snapshot at one stop of an evaluated route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteState {
    pub arrival: f64,
    pub departure: f64,
    pub battery_arrival: f64,
    pub battery_departure: f64,
    pub load: f64,
}

/// A route checked end to end, with its resource profile and cost shares.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedRoute {
    pub node_ids: Vec<NodeId>,
    pub labels: Vec<String>,
    /// One snapshot per stop, including both depot endpoints.
    pub states: Vec<RouteState>,
    /// In-motion energy gain per arc (`len == labels.len() - 1`).
    pub arc_gains: Vec<f64>,
    pub distance: f64,
    /// Travel + customer service + station stops; waiting excluded.
    pub time: f64,
    pub customers: usize,
    pub station_visits: usize,
}

/// Why a route cannot be evaluated at all (as opposed to being cleanly
/// infeasible on resources, which [`RouteError::Infeasible`] wraps).
#[derive(Debug, Error)]
pub enum RouteError {
    #[error("route must have at least a depot, one stop, and the depot again")]
    TooShort,
    #[error("route must start and end with the depot label, got '{label}'")]
    BadEndpoint { label: String },
    #[error("unknown node label '{label}'")]
    UnknownLabel { label: String },
    #[error("depot label '{label}' may only appear at the route endpoints")]
    InteriorDepot { label: String },
    #[error("node '{label}' visited more than once in one route")]
    RepeatedVisit { label: String },
    #[error("no usable arc from '{from}' to '{to}'")]
    MissingArc { from: String, to: String },
    #[error("stop {position} ('{label}'): {source}")]
    Infeasible {
        position: usize,
        label: String,
        source: Infeasibility,
    },
}

/// Play a labelled route forward through the graph, checking every rule.
pub fn evaluate_route<S: AsRef<str>>(
    graph: &RoutingGraph,
    labels: &[S],
) -> Result<EvaluatedRoute, RouteError> {
    if labels.len() < 3 {
        return Err(RouteError::TooShort);
    }
    let depot_label = &graph.nodes[graph.depot].label;
    let first = labels.first().unwrap().as_ref();
    let last = labels.last().unwrap().as_ref();
    if first != depot_label {
        return Err(RouteError::BadEndpoint {
            label: first.to_string(),
        });
    }
    if last != depot_label {
        return Err(RouteError::BadEndpoint {
            label: last.to_string(),
        });
    }

    // Resolve interior labels; endpoints map to the split depot nodes.
    let mut ids = Vec::with_capacity(labels.len());
    ids.push(graph.depot);
    for label in &labels[1..labels.len() - 1] {
        let label = label.as_ref();
        if label == depot_label {
            return Err(RouteError::InteriorDepot {
                label: label.to_string(),
            });
        }
        let node = graph
            .node_by_label(label)
            .ok_or_else(|| RouteError::UnknownLabel {
                label: label.to_string(),
            })?;
        if ids.contains(&node.id) {
            return Err(RouteError::RepeatedVisit {
                label: label.to_string(),
            });
        }
        ids.push(node.id);
    }
    ids.push(graph.end);

    let mut state = ResourceState::initial(graph);
    let mut states = vec![RouteState {
        arrival: state.clock,
        departure: state.clock,
        battery_arrival: state.battery,
        battery_departure: state.battery,
        load: state.load,
    }];
    let mut arc_gains = Vec::with_capacity(ids.len() - 1);
    let mut distance = 0.0;
    let mut time = 0.0;
    let mut customers = 0;
    let mut station_visits = 0;

    for pos in 1..ids.len() {
        let (from, to) = (ids[pos - 1], ids[pos]);
        let arc = graph.arc(from, to).ok_or_else(|| RouteError::MissingArc {
            from: graph.nodes[from].label.clone(),
            to: graph.nodes[to].label.clone(),
        })?;
        let step = extend(graph, &state, arc, to).map_err(|source| RouteError::Infeasible {
            position: pos,
            label: graph.nodes[to].label.clone(),
            source,
        })?;
        let target = &graph.nodes[to];
        distance += arc.dist;
        time += arc.time;
        match target.kind {
            GraphNodeKind::Customer => {
                customers += 1;
                time += target.service;
            }
            GraphNodeKind::StationCopy { .. } => {
                station_visits += 1;
                time += graph.params.full_recharge_duration();
            }
            _ => {}
        }
        states.push(RouteState {
            arrival: step.arrival,
            departure: step.state.clock,
            battery_arrival: step.battery_arrival,
            battery_departure: step.state.battery,
            load: step.state.load,
        });
        arc_gains.push(step.wireless_gain);
        state = step.state;
    }

    Ok(EvaluatedRoute {
        node_ids: ids,
        labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
        states,
        arc_gains,
        distance,
        time,
        customers,
        station_visits,
    })
}

/// Hierarchical objective decomposition of a set of routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    /// Routes that serve at least one customer.
    pub vehicles: usize,
    pub distance: f64,
    pub time: f64,
    /// `m1 · vehicles + m2 · distance + m3 · time`.
    pub weighted: f64,
}

pub fn objective_of(routes: &[EvaluatedRoute], weights: &Weights) -> ObjectiveValue {
    let vehicles = routes.iter().filter(|r| r.customers > 0).count();
    let distance: f64 = routes.iter().map(|r| r.distance).sum();
    let time: f64 = routes.iter().map(|r| r.time).sum();
    ObjectiveValue {
        vehicles,
        distance,
        time,
        weighted: weights.weighted(vehicles, distance, time),
    }
}

/// One route of a serialized solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRoute {
    pub nodes: Vec<String>,
    pub states: Vec<RouteState>,
    pub arc_wireless_gains: Vec<f64>,
}

/// A complete solution document as written to and read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub instance: String,
    pub scenario: CoverageScenario,
    pub weights: Weights,
    pub routes: Vec<SolutionRoute>,
    pub objective: ObjectiveValue,
}

impl Solution {
    /// Assemble a solution document from evaluated routes.
    pub fn from_routes(
        instance: impl Into<String>,
        scenario: &CoverageScenario,
        weights: &Weights,
        routes: &[EvaluatedRoute],
    ) -> Self {
        Solution {
            instance: instance.into(),
            scenario: scenario.clone(),
            weights: *weights,
            routes: routes
                .iter()
                .map(|r| SolutionRoute {
                    nodes: r.labels.clone(),
                    states: r.states.clone(),
                    arc_wireless_gains: r.arc_gains.clone(),
                })
                .collect(),
            objective: objective_of(routes, weights),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Outcome of independently re-checking a solution against its graph.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// Objective recomputed from the node sequences alone.
    pub recomputed: Option<ObjectiveValue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-evaluate every route of `solution` from scratch on `graph` and
/// compare against the stored states, gains, and objective. The stored
/// numbers are never trusted: everything is recomputed from the node
/// sequences and diffs beyond `1e-6` are reported.
pub fn validate_solution(graph: &RoutingGraph, solution: &Solution) -> ValidationReport {
    const TOL: f64 = 1e-6;
    let mut report = ValidationReport::default();
    let mut evaluated = Vec::new();

    for (ri, route) in solution.routes.iter().enumerate() {
        match evaluate_route(graph, &route.nodes) {
            Ok(eval) => {
                if route.states.len() != eval.states.len() {
                    report.violations.push(format!(
                        "route {ri}: stored {} states for {} stops",
                        route.states.len(),
                        eval.states.len()
                    ));
                } else {
                    for (pos, (stored, fresh)) in
                        route.states.iter().zip(&eval.states).enumerate()
                    {
                        let diffs = [
                            ("arrival", stored.arrival, fresh.arrival),
                            ("departure", stored.departure, fresh.departure),
                            ("battery_arrival", stored.battery_arrival, fresh.battery_arrival),
                            (
                                "battery_departure",
                                stored.battery_departure,
                                fresh.battery_departure,
                            ),
                            ("load", stored.load, fresh.load),
                        ];
                        for (field, got, want) in diffs {
                            if (got - want).abs() > TOL {
                                report.violations.push(format!(
                                    "route {ri} stop {pos} ('{}'): stored {field} {got} \
                                     recomputes to {want}",
                                    eval.labels[pos]
                                ));
                            }
                        }
                    }
                }
                if route.arc_wireless_gains.len() != eval.arc_gains.len() {
                    report.violations.push(format!(
                        "route {ri}: stored {} wireless gains for {} arcs",
                        route.arc_wireless_gains.len(),
                        eval.arc_gains.len()
                    ));
                } else {
                    for (pos, (got, want)) in route
                        .arc_wireless_gains
                        .iter()
                        .zip(&eval.arc_gains)
                        .enumerate()
                    {
                        if (got - want).abs() > TOL {
                            report.violations.push(format!(
                                "route {ri} arc {pos}: stored wireless gain {got} \
                                 recomputes to {want}"
                            ));
                        }
                    }
                }
                evaluated.push(eval);
            }
            Err(err) => report.violations.push(format!("route {ri}: {err}")),
        }
    }

    // Visit-count rules hold across the whole solution, not per route.
    for &cid in &graph.customers {
        let label = &graph.nodes[cid].label;
        let count: usize = evaluated
            .iter()
            .map(|r| r.node_ids.iter().filter(|&&id| id == cid).count())
            .sum();
        if count != 1 {
            report
                .violations
                .push(format!("customer '{label}' served {count} times, expected 1"));
        }
    }
    for sid in graph.station_copies() {
        let label = &graph.nodes[sid].label;
        let count: usize = evaluated
            .iter()
            .map(|r| r.node_ids.iter().filter(|&&id| id == sid).count())
            .sum();
        if count > 1 {
            report
                .violations
                .push(format!("station copy '{label}' visited {count} times, expected at most 1"));
        }
    }

    if evaluated.len() == solution.routes.len() {
        let objective = objective_of(&evaluated, &solution.weights);
        let stored = &solution.objective;
        if stored.vehicles != objective.vehicles {
            report.violations.push(format!(
                "objective: stored {} vehicles, recomputed {}",
                stored.vehicles, objective.vehicles
            ));
        }
        for (field, got, want) in [
            ("distance", stored.distance, objective.distance),
            ("time", stored.time, objective.time),
            ("weighted", stored.weighted, objective.weighted),
        ] {
            if (got - want).abs() > TOL {
                report.violations.push(format!(
                    "objective: stored {field} {got} recomputes to {want}"
                ));
            }
        }
        report.recomputed = Some(objective);
    }

    report
}
