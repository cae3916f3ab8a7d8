//! Arc-flow mixed-integer model of the routing problem, exportable as a
//! CPLEX-style `.lp` file for external solvers.
//!
//! Decision variables, named after sanitized node labels:
//! - `x_<i>_<j>` — binary, arc `(i, j)` is driven;
//! - `tau_<j>` — service start time at `j` (window bounds);
//! - `u_<j>` — cargo remaining after serving `j`;
//! - `y_<j>` — battery charge when arriving at `j`.
//!
//! The end-depot node reuses the depot's label with an `_end` suffix so
//! its variables stay distinct from the start depot's.
//!
//! [`ModelMode`] selects between two published variants of the battery
//! and cargo rows. `Literal` reproduces a defective formulation: it
//! pins a visited station's battery variable to full capacity *at
//! arrival* (`y_s = Q · Σ x_js`), which contradicts the propagation row
//! along the used incoming arc whenever that arc consumes net energy —
//! so essentially every plan that charges at a station is cut off. Its
//! cargo rows also cover only customer heads, letting cargo quietly
//! reset when a route passes through a station. `Corrected` drops the
//! arrival-pinning row (station arrivals propagate like any node;
//! departures leave full via the station-tail rows) and extends cargo
//! propagation to every head with zero demand, so exactly the
//! operationally feasible plans satisfy the model. The regression tests
//! document the conflict; everything else in the crate uses `Corrected`.

use std::collections::BTreeMap;

use crate::eval::EvaluatedRoute;
use crate::graph::{NodeId, RoutingGraph};
use crate::instance::Weights;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMode {
    Corrected,
    Literal,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LinTerm {
    pub coeff: f64,
    pub var: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub terms: Vec<LinTerm>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct MilpModel {
    pub mode: ModelMode,
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    /// Objective terms of the minimized `hier_cost` expression.
    pub objective: Vec<LinTerm>,
    pub big_m: f64,
    lookup: BTreeMap<String, usize>,
}

const ROW_TOL: f64 = 1e-6;

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn node_token(graph: &RoutingGraph, id: NodeId) -> String {
    let base = sanitize(&graph.nodes[id].label);
    if id == graph.end {
        format!("{base}_end")
    } else {
        base
    }
}

/// Service-start delay paid when *departing* a node: customer service,
/// a full recharge at stations, nothing at the depots.
fn departure_delay(graph: &RoutingGraph, id: NodeId) -> f64 {
    let node = &graph.nodes[id];
    if node.is_customer() {
        node.service
    } else if node.is_station() {
        graph.params.full_recharge_duration()
    } else {
        0.0
    }
}

/// Net battery drain of driving arc `(i, j)`: consumption minus the
/// wireless charge picked up on the way. May be negative.
fn net_drain(graph: &RoutingGraph, from: NodeId, to: NodeId) -> f64 {
    let arc = graph.arc(from, to).expect("caller iterates existing arcs");
    graph.params.consumption_rate * arc.dist - graph.wireless_rate * arc.dist * arc.coverage
}

/// Build the arc-flow model for `graph` under the given objective
/// weights and row-formulation mode.
pub fn build_model(graph: &RoutingGraph, weights: &Weights, mode: ModelMode) -> MilpModel {
    let n = graph.len();
    let params = &graph.params;
    let capacity = params.cargo_capacity;
    let battery = params.battery_capacity;

    let mut max_travel = 0.0f64;
    for from in 0..n {
        for to in 0..n {
            if let Some(arc) = graph.arc(from, to) {
                max_travel = max_travel.max(arc.time);
            }
        }
    }
    let big_m = graph.nodes[graph.depot].due + params.full_recharge_duration() + max_travel;

    let mut model = MilpModel {
        mode,
        vars: Vec::new(),
        rows: Vec::new(),
        objective: Vec::new(),
        big_m,
        lookup: BTreeMap::new(),
    };

    // x variables, in (from, to) id order
    let mut arc_var = vec![usize::MAX; n * n];
    for from in 0..n {
        for to in 0..n {
            if graph.arc(from, to).is_some() {
                let name = format!("x_{}_{}", node_token(graph, from), node_token(graph, to));
                arc_var[from * n + to] = model.add_var(name, 0.0, 1.0, true);
            }
        }
    }
    // tau, u, y per node; the depot's departure clock, cargo, and
    // charge are fixed by its bounds
    let mut tau = Vec::with_capacity(n);
    let mut cargo = Vec::with_capacity(n);
    let mut charge = Vec::with_capacity(n);
    for id in 0..n {
        let node = &graph.nodes[id];
        let token = node_token(graph, id);
        let tau_hi = if id == graph.depot { node.ready } else { node.due };
        tau.push(model.add_var(format!("tau_{token}"), node.ready, tau_hi, false));
        let u_lo = if id == graph.depot { capacity } else { 0.0 };
        cargo.push(model.add_var(format!("u_{token}"), u_lo, capacity, false));
        let y_lo = if id == graph.depot { battery } else { 0.0 };
        charge.push(model.add_var(format!("y_{token}"), y_lo, battery, false));
    }

    // objective: vehicles leaving the depot, distance, and route time
    // (travel plus the tail's departure delay on every driven arc)
    for from in 0..n {
        for to in 0..n {
            let x = arc_var[from * n + to];
            if x == usize::MAX {
                continue;
            }
            let arc = graph.arc(from, to).expect("indexed above");
            let mut coeff = weights.m2 * arc.dist
                + weights.m3 * (arc.time + departure_delay(graph, from));
            if from == graph.depot {
                coeff += weights.m1;
            }
            model.objective.push(LinTerm { coeff, var: x });
        }
    }

    // c1: each customer is departed exactly once
    for &c in &graph.customers {
        let terms: Vec<LinTerm> = (0..n)
            .filter_map(|to| match arc_var[c * n + to] {
                usize::MAX => None,
                var => Some(LinTerm { coeff: 1.0, var }),
            })
            .collect();
        model.rows.push(Row {
            name: format!("c1_{}", node_token(graph, c)),
            terms,
            sense: RowSense::Eq,
            rhs: 1.0,
        });
    }

    // c2: each station copy is departed at most once
    for group in &graph.station_groups {
        for &s in group {
            let terms: Vec<LinTerm> = (0..n)
                .filter_map(|to| match arc_var[s * n + to] {
                    usize::MAX => None,
                    var => Some(LinTerm { coeff: 1.0, var }),
                })
                .collect();
            model.rows.push(Row {
                name: format!("c2_{}", node_token(graph, s)),
                terms,
                sense: RowSense::Le,
                rhs: 1.0,
            });
        }
    }

    // c3: flow conservation at customers and station copies
    for id in 0..n {
        if id == graph.depot || id == graph.end {
            continue;
        }
        let mut terms = Vec::new();
        for from in 0..n {
            if arc_var[from * n + id] != usize::MAX {
                terms.push(LinTerm {
                    coeff: 1.0,
                    var: arc_var[from * n + id],
                });
            }
        }
        for to in 0..n {
            if arc_var[id * n + to] != usize::MAX {
                terms.push(LinTerm {
                    coeff: -1.0,
                    var: arc_var[id * n + to],
                });
            }
        }
        model.rows.push(Row {
            name: format!("c3_{}", node_token(graph, id)),
            terms,
            sense: RowSense::Eq,
            rhs: 0.0,
        });
    }

    // c4/c5: service-start propagation along driven arcs,
    //   tau_i + (t_ij + delay_i) x_ij - M (1 - x_ij) <= tau_j,
    // split by tail kind (customers and depot pay service, stations a
    // full recharge)
    for from in 0..n {
        for to in 0..n {
            let x = arc_var[from * n + to];
            if x == usize::MAX {
                continue;
            }
            let arc = graph.arc(from, to).expect("indexed above");
            let delay = departure_delay(graph, from);
            let prefix = if graph.nodes[from].is_station() { "c5" } else { "c4" };
            model.rows.push(Row {
                name: format!(
                    "{prefix}_{}_{}",
                    node_token(graph, from),
                    node_token(graph, to)
                ),
                terms: vec![
                    LinTerm { coeff: 1.0, var: tau[from] },
                    LinTerm { coeff: -1.0, var: tau[to] },
                    LinTerm { coeff: arc.time + delay + big_m, var: x },
                ],
                sense: RowSense::Le,
                rhs: big_m,
            });
        }
    }

    // c6: cargo propagation, u_j <= u_i - q_j x_ij + C (1 - x_ij),
    // consuming the *head's* demand. The literal variant emits rows for
    // customer heads only, so cargo silently resets across a station
    // stop; the corrected variant covers every head (demand 0 there).
    for from in 0..n {
        for to in 0..n {
            let x = arc_var[from * n + to];
            if x == usize::MAX {
                continue;
            }
            if mode == ModelMode::Literal && !graph.nodes[to].is_customer() {
                continue;
            }
            let demand = graph.nodes[to].demand;
            model.rows.push(Row {
                name: format!(
                    "c6_{}_{}",
                    node_token(graph, from),
                    node_token(graph, to)
                ),
                terms: vec![
                    LinTerm { coeff: 1.0, var: cargo[to] },
                    LinTerm { coeff: -1.0, var: cargo[from] },
                    LinTerm { coeff: demand + capacity, var: x },
                ],
                sense: RowSense::Le,
                rhs: capacity,
            });
        }
    }

    // c7: battery propagation from customer tails (no charge gained at
    // the tail), y_j <= y_i - drain_ij x_ij + Q (1 - x_ij)
    for &from in &graph.customers {
        for to in 0..n {
            let x = arc_var[from * n + to];
            if x == usize::MAX {
                continue;
            }
            let drain = net_drain(graph, from, to);
            model.rows.push(Row {
                name: format!(
                    "c7_{}_{}",
                    node_token(graph, from),
                    node_token(graph, to)
                ),
                terms: vec![
                    LinTerm { coeff: 1.0, var: charge[to] },
                    LinTerm { coeff: -1.0, var: charge[from] },
                    LinTerm { coeff: drain + battery, var: x },
                ],
                sense: RowSense::Le,
                rhs: battery,
            });
        }
    }

    // c8: battery propagation from station and depot tails, which
    // depart with a full battery: y_j <= Q - drain_ij x_ij. Inert for
    // unused arcs (y_j <= Q is the variable's own bound).
    for from in 0..n {
        if graph.nodes[from].is_customer() || from == graph.end {
            continue;
        }
        for to in 0..n {
            let x = arc_var[from * n + to];
            if x == usize::MAX {
                continue;
            }
            let drain = net_drain(graph, from, to);
            model.rows.push(Row {
                name: format!(
                    "c8_{}_{}",
                    node_token(graph, from),
                    node_token(graph, to)
                ),
                terms: vec![
                    LinTerm { coeff: 1.0, var: charge[to] },
                    LinTerm { coeff: drain, var: x },
                ],
                sense: RowSense::Le,
                rhs: battery,
            });
        }
    }

    // c9 (literal only): pin a visited station copy's battery variable
    // to full capacity at arrival, y_s = Q * sum of incoming arcs. This
    // is the defective row: it contradicts c7/c8 along the used
    // incoming arc whenever that arc consumes net energy.
    if mode == ModelMode::Literal {
        for group in &graph.station_groups {
            for &s in group {
                let mut terms = vec![LinTerm { coeff: 1.0, var: charge[s] }];
                for from in 0..n {
                    if arc_var[from * n + s] != usize::MAX {
                        terms.push(LinTerm {
                            coeff: -battery,
                            var: arc_var[from * n + s],
                        });
                    }
                }
                model.rows.push(Row {
                    name: format!("c9_{}", node_token(graph, s)),
                    terms,
                    sense: RowSense::Eq,
                    rhs: 0.0,
                });
            }
        }
    }

    model
}

impl MilpModel {
    fn add_var(&mut self, name: String, lower: f64, upper: f64, binary: bool) -> usize {
        let idx = self.vars.len();
        let previous = self.lookup.insert(name.clone(), idx);
        assert!(previous.is_none(), "duplicate variable name {name}");
        self.vars.push(Variable {
            name,
            lower,
            upper,
            binary,
        });
        idx
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    /// Render the model in CPLEX LP format. Output is deterministic:
    /// identical models produce identical bytes.
    pub fn export_lp(&self) -> String {
        let mut out = String::new();
        out.push_str("Minimize\n");
        out.push_str(&self.render_expr("hier_cost", &self.objective));
        out.push_str("Subject To\n");
        for row in &self.rows {
            let mut line = self.render_expr(&row.name, &row.terms);
            line.pop(); // drop the newline to append the relation
            let rel = match row.sense {
                RowSense::Le => "<=",
                RowSense::Eq => "=",
            };
            out.push_str(&format!("{line} {rel} {}\n", fmt_num(row.rhs)));
        }
        out.push_str("Bounds\n");
        for var in &self.vars {
            if var.binary {
                continue; // declared in the Binaries section
            }
            if var.lower == var.upper {
                out.push_str(&format!(" {} = {}\n", var.name, fmt_num(var.lower)));
            } else {
                out.push_str(&format!(
                    " {} <= {} <= {}\n",
                    fmt_num(var.lower),
                    var.name,
                    fmt_num(var.upper)
                ));
            }
        }
        out.push_str("Binaries\n");
        for var in &self.vars {
            if var.binary {
                out.push_str(&format!(" {}\n", var.name));
            }
        }
        out.push_str("End\n");
        out
    }

    fn render_expr(&self, name: &str, terms: &[LinTerm]) -> String {
        let mut line = format!(" {name}:");
        let mut width = line.len();
        for (k, term) in terms.iter().enumerate() {
            let magnitude = fmt_num(term.coeff.abs());
            let sign = if term.coeff < 0.0 {
                "-"
            } else if k == 0 {
                ""
            } else {
                "+"
            };
            let piece = if sign.is_empty() {
                format!(" {magnitude} {}", self.vars[term.var].name)
            } else {
                format!(" {sign} {magnitude} {}", self.vars[term.var].name)
            };
            if width + piece.len() > 200 {
                line.push_str("\n   ");
                width = 3;
            }
            width += piece.len();
            line.push_str(&piece);
        }
        line.push('\n');
        line
    }

    /// Evaluate every row and bound against `assignment` (missing
    /// variables count as zero) and describe each violation.
    pub fn check_assignment(&self, assignment: &BTreeMap<String, f64>) -> Vec<String> {
        let value = |idx: usize| -> f64 {
            assignment
                .get(&self.vars[idx].name)
                .copied()
                .unwrap_or(0.0)
        };
        let mut violations = Vec::new();
        for (idx, var) in self.vars.iter().enumerate() {
            let v = value(idx);
            if v < var.lower - ROW_TOL || v > var.upper + ROW_TOL {
                violations.push(format!(
                    "{}: value {v} outside bounds [{}, {}]",
                    var.name, var.lower, var.upper
                ));
            }
            if var.binary && (v - v.round()).abs() > ROW_TOL {
                violations.push(format!("{}: value {v} is not integral", var.name));
            }
        }
        for row in &self.rows {
            let lhs: f64 = row.terms.iter().map(|t| t.coeff * value(t.var)).sum();
            let broken = match row.sense {
                RowSense::Le => lhs > row.rhs + ROW_TOL,
                RowSense::Eq => (lhs - row.rhs).abs() > ROW_TOL,
            };
            if broken {
                let rel = match row.sense {
                    RowSense::Le => "<=",
                    RowSense::Eq => "=",
                };
                violations.push(format!(
                    "{}: lhs {lhs:.6} violates {rel} {}",
                    row.name, row.rhs
                ));
            }
        }
        violations
    }

    /// Objective value of an assignment (missing variables are zero).
    pub fn objective_value(&self, assignment: &BTreeMap<String, f64>) -> f64 {
        self.objective
            .iter()
            .map(|t| {
                t.coeff
                    * assignment
                        .get(&self.vars[t.var].name)
                        .copied()
                        .unwrap_or(0.0)
            })
            .sum()
    }
}

/// Format a number for LP output: integers exactly, everything else via
/// the shortest representation that round-trips.
fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Parse an external solver's solution listing: one `name value` pair
/// per line, comments (`#` or `\`) and unparseable lines skipped.
/// Values of binary `x_*` variables are rounded to 0/1.
pub fn import_assignment(text: &str) -> BTreeMap<String, f64> {
    let mut assignment = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(raw)) = (parts.next(), parts.next()) else {
            continue;
        };
        let Ok(mut value) = raw.parse::<f64>() else {
            continue;
        };
        if name.starts_with("x_") {
            value = if value >= 0.5 { 1.0 } else { 0.0 };
        }
        assignment.insert(name.to_string(), value);
    }
    assignment
}

/// Translate evaluated routes into a full variable assignment for the
/// model built over the same graph, including zeros for every unused
/// arc and resting values for unvisited nodes.
pub fn assignment_from_solution(
    graph: &RoutingGraph,
    routes: &[EvaluatedRoute],
) -> BTreeMap<String, f64> {
    let n = graph.len();
    let mut assignment = BTreeMap::new();

    for from in 0..n {
        for to in 0..n {
            if graph.arc(from, to).is_some() {
                let name = format!("x_{}_{}", node_token(graph, from), node_token(graph, to));
                assignment.insert(name, 0.0);
            }
        }
    }
    for id in 0..n {
        let node = &graph.nodes[id];
        let token = node_token(graph, id);
        assignment.insert(format!("tau_{token}"), node.ready);
        assignment.insert(format!("u_{token}"), 0.0);
        assignment.insert(format!("y_{token}"), 0.0);
    }
    let depot_token = node_token(graph, graph.depot);
    assignment.insert(format!("u_{depot_token}"), graph.params.cargo_capacity);
    assignment.insert(format!("y_{depot_token}"), graph.params.battery_capacity);

    // the shared end-depot variables must satisfy every route's rows
    let mut end_tau = graph.nodes[graph.end].ready;
    let mut end_cargo = f64::INFINITY;
    let mut end_charge = f64::INFINITY;
    let mut any_route = false;

    for route in routes {
        for pair in route.node_ids.windows(2) {
            let name = format!(
                "x_{}_{}",
                node_token(graph, pair[0]),
                node_token(graph, pair[1])
            );
            assignment.insert(name, 1.0);
        }
        for (k, &id) in route.node_ids.iter().enumerate() {
            let state = &route.states[k];
            if id == graph.depot {
                continue;
            }
            if id == graph.end {
                any_route = true;
                end_tau = end_tau.max(state.arrival.max(graph.nodes[graph.end].ready));
                end_cargo = end_cargo.min(state.load);
                end_charge = end_charge.min(state.battery_arrival);
                continue;
            }
            let node = &graph.nodes[id];
            let token = node_token(graph, id);
            assignment.insert(format!("tau_{token}"), state.arrival.max(node.ready));
            assignment.insert(format!("u_{token}"), state.load);
            assignment.insert(format!("y_{token}"), state.battery_arrival);
        }
    }
    if any_route {
        let end_token = node_token(graph, graph.end);
        assignment.insert(format!("tau_{end_token}"), end_tau);
        assignment.insert(format!("u_{end_token}"), end_cargo);
        assignment.insert(format!("y_{end_token}"), end_charge);
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::instance::{CoverageScenario, Instance, Node, NodeKind, VehicleParams};
    use crate::solver::{solve, SearchLimits, SolverConfig};
    use crate::synth::{random_coverage, random_instance, SynthConfig};
    use approx::assert_relative_eq;

    fn node(id: &str, kind: NodeKind, x: f64, y: f64, demand: f64) -> Node {
        Node {
            id: id.to_string(),
            kind,
            x,
            y,
            demand,
            ready: 0.0,
            due: 10_000.0,
            service: if kind == NodeKind::Customer { 5.0 } else { 0.0 },
        }
    }

    /// One customer whose round trip exceeds the battery, a reachable
    /// station behind it, and a decoy station that stays unvisited.
    fn forced_station_fixture() -> Instance {
        Instance::new(
            "forced",
            vec![
                node("D0", NodeKind::Depot, 0.0, 0.0, 0.0),
                node("C1", NodeKind::Customer, 50.0, 0.0, 30.0),
                node("S0", NodeKind::Station, 80.0, 0.0, 0.0),
                node("S1", NodeKind::Station, -10.0, 0.0, 0.0),
            ],
            VehicleParams {
                battery_capacity: 80.0,
                cargo_capacity: 200.0,
                consumption_rate: 1.0,
                inverse_refuel_rate: 0.1,
                velocity: 1.0,
            },
        )
        .unwrap()
    }

    fn exact_config() -> SolverConfig {
        SolverConfig {
            limits: SearchLimits {
                gap: 0.0,
                ..SearchLimits::default()
            },
            ..SolverConfig::default()
        }
    }

    #[test]
    fn names_variables_after_sanitized_labels() {
        let inst = forced_station_fixture();
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let model = build_model(&g, &Weights::default(), ModelMode::Corrected);

        assert!(model.var("x_D0_C1").is_some());
        assert!(model.var("tau_S0_1").is_some(), "copy labels sanitized");
        assert!(model.var("tau_D0_end").is_some(), "end depot distinct");
        assert!(model.var("y_C1").is_some());
        // 18 arcs survive pruning plus tau/u/y for all 7 graph nodes
        assert_eq!(model.vars.len(), 18 + 3 * 7);
        let binaries = model.vars.iter().filter(|v| v.binary).count();
        assert_eq!(binaries, 18);
    }

    #[test]
    fn export_is_deterministic_and_well_formed() {
        let inst = forced_station_fixture();
        let scenario = CoverageScenario::uniform(0.2, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let model = build_model(&g, &Weights::default(), ModelMode::Corrected);
        let a = model.export_lp();
        let b = model.export_lp();
        assert_eq!(a, b);
        for section in ["Minimize", "hier_cost:", "Subject To", "Bounds", "Binaries", "End"] {
            assert!(a.contains(section), "missing section {section}");
        }
        assert!(!a.contains('#'), "labels must be sanitized for LP output");
        assert!(a.contains("u_D0 = 200"), "depot cargo is fixed");
        assert!(a.contains("y_D0 = 80"), "depot charge is fixed");
        assert!(a.contains("tau_D0 = 0"), "depot departure clock is fixed");
    }

    #[test]
    fn objective_matches_the_evaluator() {
        let inst = forced_station_fixture();
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let res = solve(&g, &exact_config());
        let routes = res.routes.unwrap();
        assert_eq!(routes[0].labels, vec!["D0", "C1", "S0#1", "D0"]);

        let model = build_model(&g, &Weights::default(), ModelMode::Corrected);
        let assignment = assignment_from_solution(&g, &routes);
        assert_relative_eq!(
            model.objective_value(&assignment),
            res.objective.unwrap().weighted,
            epsilon = 1e-9
        );
    }

    #[test]
    fn optimal_plan_satisfies_corrected_rows() {
        let inst = forced_station_fixture();
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let res = solve(&g, &exact_config());
        let routes = res.routes.unwrap();

        let model = build_model(&g, &Weights::default(), ModelMode::Corrected);
        let assignment = assignment_from_solution(&g, &routes);
        let violations = model.check_assignment(&assignment);
        assert!(violations.is_empty(), "unexpected violations: {violations:?}");
    }

    #[test]
    fn literal_rows_contradict_any_station_visit() {
        let inst = forced_station_fixture();
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let res = solve(&g, &exact_config());
        let routes = res.routes.unwrap();
        let assignment = assignment_from_solution(&g, &routes);

        let literal = build_model(&g, &Weights::default(), ModelMode::Literal);

        // honest arrival energy (0 after the 30-unit leg): the
        // visited-station pinning row demands a full battery instead
        let violations = literal.check_assignment(&assignment);
        assert!(!violations.is_empty());
        assert!(
            violations.iter().any(|v| v.starts_with("c9_S0_1")),
            "arrival-pinning row must reject the depleted arrival: {violations:?}"
        );

        // pinning the station variable to Q instead shifts the
        // contradiction onto the propagation row of the used arc
        let mut pinned = assignment.clone();
        pinned.insert("y_S0_1".to_string(), 80.0);
        let violations = literal.check_assignment(&pinned);
        assert!(
            violations.iter().any(|v| v.starts_with("c7_C1_S0_1")),
            "propagation row must reject the pinned arrival: {violations:?}"
        );

        // either way, at least one row of the pair breaks; the
        // corrected model accepts the honest assignment
        let corrected = build_model(&g, &Weights::default(), ModelMode::Corrected);
        assert!(corrected.check_assignment(&assignment).is_empty());
    }

    #[test]
    fn literal_mode_narrows_cargo_rows_and_adds_pinning_rows() {
        let inst = forced_station_fixture();
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let corrected = build_model(&g, &Weights::default(), ModelMode::Corrected);
        let literal = build_model(&g, &Weights::default(), ModelMode::Literal);
        let count = |m: &MilpModel, prefix: &str| {
            m.rows.iter().filter(|r| r.name.starts_with(prefix)).count()
        };
        // corrected: one cargo row per arc; literal: only the 5 arcs
        // that end at the customer
        assert_eq!(count(&corrected, "c6"), 18);
        assert_eq!(count(&literal, "c6"), 5);
        // pinning rows exist only in literal mode, one per copy
        assert_eq!(count(&corrected, "c9"), 0);
        assert_eq!(count(&literal, "c9"), 4);
    }

    #[test]
    fn import_rounds_binaries_and_skips_noise() {
        let text = "\
# solution dump
x_D0_C1 0.99998
x_D0_S1_1 0.002
tau_C1 51.25
\\ trailing comment
objective not-a-number
y_C1 30 extra-column
";
        let assignment = import_assignment(text);
        assert_eq!(assignment["x_D0_C1"], 1.0);
        assert_eq!(assignment["x_D0_S1_1"], 0.0);
        assert_relative_eq!(assignment["tau_C1"], 51.25);
        assert_relative_eq!(assignment["y_C1"], 30.0);
        assert!(!assignment.contains_key("objective"));
    }

    #[test]
    fn random_optima_satisfy_corrected_rows() {
        for seed in 40..46u64 {
            let inst = random_instance(
                &SynthConfig {
                    customers: 4,
                    stations: 1,
                    ..SynthConfig::default()
                },
                seed,
            );
            let scenario = random_coverage(&inst, 0.4, seed);
            let g = build_graph(&inst, &scenario, 2);
            let res = solve(&g, &exact_config());
            let Some(routes) = res.routes else {
                continue;
            };
            let model = build_model(&g, &Weights::default(), ModelMode::Corrected);
            let assignment = assignment_from_solution(&g, &routes);
            let violations = model.check_assignment(&assignment);
            assert!(
                violations.is_empty(),
                "seed {seed}: optimum breaks rows: {violations:?}"
            );
            assert_relative_eq!(
                model.objective_value(&assignment),
                res.objective.unwrap().weighted,
                epsilon = 1e-6
            );
        }
    }
}
