//! Exact depth-first branch-and-bound search over the routing graph.
//!
//! A search node is a partial solution: closed routes plus one route
//! under construction, with the vehicle's resource state at its tip.
//! Children extend the tip by an unserved customer or the next unused
//! copy of a station, or close the route and start the next one.
//!
//! Cost pruning uses an admissible lower bound (every unserved customer
//! must still be *entered* once, and pay its service time) so the
//! incumbent at exhaustion is a true optimum. Two symmetry rules cut
//! duplicated work without losing solutions: route first-customers are
//! explored in ascending order, and a station stop always takes the
//! lowest-numbered unused copy of its physical station.
//!
//! Child order is deterministic — customers before stations, then by arc
//! distance, then by node id, with "close the route" last — so repeated
//! runs produce identical trees, node counts, and solutions.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::eval::{
    evaluate_route, extend, objective_of, EvaluatedRoute, ObjectiveValue, ResourceState,
};
use crate::graph::{NodeId, RoutingGraph};
use crate::instance::{euclidean, Weights};

/// Hard resource limits on one `solve` call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    pub time_limit: Option<Duration>,
    /// Relative optimality gap at which the search may stop early and
    /// still report `Optimal`. `0.0` demands a full proof. Ignored in
    /// lexicographic mode.
    pub gap: f64,
    pub node_limit: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            time_limit: Some(Duration::from_secs(3000)),
            gap: 1e-3,
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub weights: Weights,
    pub limits: SearchLimits,
    /// Optimize `(vehicles, distance, time)` lexicographically instead
    /// of the weighted sum. The gap-based early stop is disabled.
    pub lexicographic: bool,
    /// Disable to fall back to plain exhaustive DFS (no cost pruning);
    /// useful for differential tests of the bound itself.
    pub use_lower_bound: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            weights: Weights::default(),
            limits: SearchLimits::default(),
            lexicographic: false,
            use_lower_bound: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Search exhausted (or closed the gap): the solution is optimal.
    Optimal,
    /// A limit fired with an incumbent in hand; optimality unproven.
    FeasibleTimeout,
    /// A limit fired before any feasible solution was found.
    NoSolutionFound,
    /// Search exhausted without finding any feasible solution.
    Infeasible,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleTimeout => "feasible_timeout",
            SolveStatus::NoSolutionFound => "no_solution_found",
            SolveStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes_explored: u64,
    pub pruned_by_bound: u64,
    pub pruned_infeasible: u64,
    pub solve_seconds: f64,
    /// Relative gap `(upper - lower) / upper` at termination;
    /// `Some(0.0)` after an exhaustive proof, `None` without both bounds.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Fully re-evaluated routes of the best solution found.
    pub routes: Option<Vec<EvaluatedRoute>>,
    pub objective: Option<ObjectiveValue>,
    pub stats: SolveStats,
}

/// Resource and bookkeeping state at one search node. Small and `Copy`:
/// the recursion passes it by value and undoes nothing.
#[derive(Debug, Clone, Copy)]
struct State {
    last: NodeId,
    clock: f64,
    battery: f64,
    load: f64,
    /// Unserved customers, as bits over `graph.customers` indices.
    unserved: u64,
    /// Station copies already visited, as bits over copy order.
    copies_used: u64,
    /// Routes serving at least one customer so far (current included).
    vehicles: usize,
    /// Customers on the route under construction.
    route_customers: usize,
    /// Head customer of the most recently started customer-route;
    /// the next route's head must exceed it.
    head_floor: Option<NodeId>,
    dist: f64,
    time: f64,
}

/// `(vehicles, distance, time, weighted)` of a complete solution or a
/// lower bound; comparison honors the configured mode.
#[derive(Debug, Clone, Copy)]
struct Key {
    vehicles: usize,
    dist: f64,
    time: f64,
    weighted: f64,
}

const TIE_EPS: f64 = 1e-9;

impl Key {
    fn improves(&self, incumbent: &Key, lexicographic: bool) -> bool {
        if lexicographic {
            if self.vehicles != incumbent.vehicles {
                return self.vehicles < incumbent.vehicles;
            }
            if (self.dist - incumbent.dist).abs() > TIE_EPS {
                return self.dist < incumbent.dist;
            }
            self.time < incumbent.time - TIE_EPS
        } else {
            self.weighted < incumbent.weighted - TIE_EPS
        }
    }
}

enum StopReason {
    TimeLimit,
    NodeLimit,
    GapClosed { lower: f64 },
}

/// One candidate child during expansion.
struct Child {
    to: NodeId,
    is_station: bool,
    arc_dist: f64,
    state: State,
    bound: Key,
}

/// The "drive to the end depot" branch of a node, when feasible.
enum CloseMove {
    /// All customers served: a complete solution with this exact key.
    Complete(Key),
    /// Customers remain: continue from a fresh vehicle at the depot.
    Continue(State, Key),
}

impl CloseMove {
    fn weighted(&self) -> f64 {
        match self {
            CloseMove::Complete(key) => key.weighted,
            CloseMove::Continue(_, bound) => bound.weighted,
        }
    }
}

struct Search<'a> {
    graph: &'a RoutingGraph,
    config: &'a SolverConfig,
    /// Cheapest way to enter each customer (aligned with `graph.customers`).
    min_in_dist: Vec<f64>,
    min_in_time: Vec<f64>,
    /// Bit index per station copy, parallel to `graph.station_groups`.
    copy_bits: Vec<Vec<u64>>,
    start: Instant,
    deadline: Option<Instant>,
    nodes: u64,
    pruned_by_bound: u64,
    pruned_infeasible: u64,
    incumbent: Option<Key>,
    best_routes: Vec<Vec<NodeId>>,
    /// Interior node ids of closed routes on the current path.
    closed_routes: Vec<Vec<NodeId>>,
    current_route: Vec<NodeId>,
    /// Per depth: bounds of this node's moves, and the index of the move
    /// currently being explored. Everything *after* that index is an
    /// unexplored frontier direction.
    open_bounds: Vec<(Vec<f64>, usize)>,
    track_frontier: bool,
    stop: Option<StopReason>,
}

/// Run the branch-and-bound search to provable optimality (within the
/// configured gap) or until a limit fires.
pub fn solve(graph: &RoutingGraph, config: &SolverConfig) -> SolveResult {
    let n = graph.customers.len();
    assert!(n <= 64, "solver uses 64-bit customer sets; got {n} customers");
    let total_copies: usize = graph.station_groups.iter().map(Vec::len).sum();
    assert!(
        total_copies <= 64,
        "solver uses 64-bit station-copy sets; got {total_copies} copies"
    );

    let mut min_in_dist = vec![f64::INFINITY; n];
    let mut min_in_time = vec![f64::INFINITY; n];
    for (idx, &c) in graph.customers.iter().enumerate() {
        for from in 0..graph.len() {
            if let Some(arc) = graph.arc(from, c) {
                min_in_dist[idx] = min_in_dist[idx].min(arc.dist);
                min_in_time[idx] = min_in_time[idx].min(arc.time);
            }
        }
    }
    let mut copy_bits = Vec::with_capacity(graph.station_groups.len());
    let mut next_bit = 0u32;
    for group in &graph.station_groups {
        copy_bits.push(
            group
                .iter()
                .map(|_| {
                    let bit = 1u64 << next_bit;
                    next_bit += 1;
                    bit
                })
                .collect(),
        );
    }

    let start = Instant::now();
    let mut search = Search {
        graph,
        config,
        min_in_dist,
        min_in_time,
        copy_bits,
        start,
        deadline: config.limits.time_limit.map(|d| start + d),
        nodes: 0,
        pruned_by_bound: 0,
        pruned_infeasible: 0,
        incumbent: None,
        best_routes: Vec::new(),
        closed_routes: Vec::new(),
        current_route: Vec::new(),
        open_bounds: Vec::new(),
        track_frontier: config.use_lower_bound && !config.lexicographic,
        stop: None,
    };

    if n == 0 {
        // nothing to serve: the empty plan is trivially optimal
        search.incumbent = Some(Key {
            vehicles: 0,
            dist: 0.0,
            time: 0.0,
            weighted: 0.0,
        });
    } else {
        let root = State {
            last: graph.depot,
            clock: graph.nodes[graph.depot].ready,
            battery: graph.params.battery_capacity,
            load: graph.params.cargo_capacity,
            unserved: u64::MAX >> (64 - n),
            copies_used: 0,
            vehicles: 0,
            route_customers: 0,
            head_floor: None,
            dist: 0.0,
            time: 0.0,
        };
        let root_bound = search.bound_of(&root);
        search.expand(root, root_bound);
    }

    search.finish()
}

impl Search<'_> {
    /// Admissible lower bound on any completion of `state`.
    fn bound_of(&self, state: &State) -> Key {
        let mut dist = state.dist;
        let mut time = state.time;
        let mut idx = 0;
        let mut rest = state.unserved;
        while rest != 0 {
            let shift = rest.trailing_zeros() as usize;
            idx += shift;
            dist += self.min_in_dist[idx];
            time += self.min_in_time[idx] + self.graph.nodes[self.graph.customers[idx]].service;
            rest >>= shift;
            rest >>= 1;
            idx += 1;
        }
        if state.unserved == 0 && state.last != self.graph.depot {
            // only the trip home remains; straight-line distance bounds
            // any station detour
            let (a, b) = (
                &self.graph.nodes[state.last],
                &self.graph.nodes[self.graph.end],
            );
            let home = euclidean(a.x, a.y, b.x, b.y);
            dist += home;
            time += home / self.graph.params.velocity;
        }
        // a fresh vehicle is unavoidable while customers remain and the
        // current route hasn't served anyone
        let vehicles =
            state.vehicles + usize::from(state.unserved != 0 && state.route_customers == 0);
        Key {
            vehicles,
            dist,
            time,
            weighted: self.config.weights.weighted(vehicles, dist, time),
        }
    }

    fn keeps_searching(&self, bound: &Key) -> bool {
        if !self.config.use_lower_bound {
            return true;
        }
        match &self.incumbent {
            None => true,
            Some(inc) => bound.improves(inc, self.config.lexicographic),
        }
    }

    fn offer_incumbent(&mut self, key: Key) {
        let improves = match &self.incumbent {
            None => true,
            Some(inc) => key.improves(inc, self.config.lexicographic),
        };
        if improves {
            self.incumbent = Some(key);
            let mut routes = self.closed_routes.clone();
            routes.push(self.current_route.clone());
            self.best_routes = routes;
        }
    }

    fn expand(&mut self, state: State, own_bound: Key) {
        if self.stop.is_some() {
            return;
        }
        self.nodes += 1;
        if let Some(limit) = self.config.limits.node_limit {
            if self.nodes >= limit {
                self.stop = Some(StopReason::NodeLimit);
                return;
            }
        }
        if self.nodes & 1023 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.stop = Some(StopReason::TimeLimit);
                    return;
                }
            }
            if self.track_frontier {
                if let Some(inc) = &self.incumbent {
                    let lower = self.frontier_bound(own_bound.weighted);
                    let gap = (inc.weighted - lower) / inc.weighted.abs().max(f64::MIN_POSITIVE);
                    if gap <= self.config.limits.gap {
                        self.stop = Some(StopReason::GapClosed { lower });
                        return;
                    }
                }
            }
        }

        let children = self.generate_children(&state);
        let close = self.prepare_close(&state);

        if self.track_frontier {
            let mut bounds: Vec<f64> = children.iter().map(|c| c.bound.weighted).collect();
            if let Some(cm) = &close {
                bounds.push(cm.weighted());
            }
            self.open_bounds.push((bounds, 0));
        }

        let child_count = children.len();
        for (i, child) in children.into_iter().enumerate() {
            if self.stop.is_some() {
                break;
            }
            if self.track_frontier {
                self.open_bounds.last_mut().expect("pushed above").1 = i;
            }
            // the incumbent may have improved since this child was scored
            if !self.keeps_searching(&child.bound) {
                self.pruned_by_bound += 1;
                continue;
            }
            self.current_route.push(child.to);
            self.expand(child.state, child.bound);
            self.current_route.pop();
        }

        if self.stop.is_none() {
            if let Some(close) = close {
                if self.track_frontier {
                    self.open_bounds.last_mut().expect("pushed above").1 = child_count;
                }
                match close {
                    CloseMove::Complete(key) => self.offer_incumbent(key),
                    CloseMove::Continue(next, bound) => {
                        if self.keeps_searching(&bound) {
                            self.closed_routes
                                .push(std::mem::take(&mut self.current_route));
                            self.expand(next, bound);
                            self.current_route =
                                self.closed_routes.pop().expect("pushed above");
                        } else {
                            self.pruned_by_bound += 1;
                        }
                    }
                }
            }
        }

        if self.track_frontier {
            self.open_bounds.pop();
        }
    }

    /// Feasible single-step extensions of the route tip, in the fixed
    /// deterministic order.
    fn generate_children(&mut self, state: &State) -> Vec<Child> {
        let graph = self.graph;
        let mut children = Vec::new();

        let mut idx = 0;
        let mut rest = state.unserved;
        while rest != 0 {
            let shift = rest.trailing_zeros() as usize;
            idx += shift;
            rest >>= shift;
            rest >>= 1;
            let customer = graph.customers[idx];
            let bit = 1u64 << idx;
            idx += 1;
            // ascending first-customers across routes
            if state.route_customers == 0 {
                if let Some(floor) = state.head_floor {
                    if customer <= floor {
                        continue;
                    }
                }
            }
            if let Some(child) = self.step(state, customer, bit) {
                children.push(child);
            }
        }

        for (gi, group) in graph.station_groups.iter().enumerate() {
            // lowest unused copy of this station, if any
            let mut pick = None;
            for (k, &copy) in group.iter().enumerate() {
                let bit = self.copy_bits[gi][k];
                if state.copies_used & bit == 0 {
                    pick = Some((copy, bit));
                    break;
                }
            }
            if let Some((copy, bit)) = pick {
                if let Some(child) = self.step(state, copy, bit) {
                    children.push(child);
                }
            }
        }

        children.sort_by(|a, b| {
            a.is_station
                .cmp(&b.is_station)
                .then(a.arc_dist.total_cmp(&b.arc_dist))
                .then(a.to.cmp(&b.to))
        });
        children
    }

    /// Build the child reached by traveling to `to`, or count it pruned.
    fn step(&mut self, state: &State, to: NodeId, bit: u64) -> Option<Child> {
        let arc = self.graph.arc(state.last, to)?;
        let resources = ResourceState {
            clock: state.clock,
            battery: state.battery,
            load: state.load,
        };
        let step = match extend(self.graph, &resources, arc, to) {
            Ok(step) => step,
            Err(_) => {
                self.pruned_infeasible += 1;
                return None;
            }
        };
        let node = &self.graph.nodes[to];
        let is_station = node.is_station();
        let mut child = State {
            last: to,
            clock: step.state.clock,
            battery: step.state.battery,
            load: step.state.load,
            dist: state.dist + arc.dist,
            time: state.time + arc.time,
            ..*state
        };
        if is_station {
            child.copies_used |= bit;
            child.time += self.graph.params.full_recharge_duration();
        } else {
            child.unserved &= !bit;
            child.time += node.service;
            child.route_customers += 1;
            if state.route_customers == 0 {
                child.vehicles += 1;
                child.head_floor = Some(to);
            }
        }
        let bound = self.bound_of(&child);
        if !self.keeps_searching(&bound) {
            self.pruned_by_bound += 1;
            return None;
        }
        Some(Child {
            to,
            is_station,
            arc_dist: arc.dist,
            state: child,
            bound,
        })
    }

    /// The close-route move: drive to the end depot, then either record
    /// a complete solution or hand a fresh vehicle to the remainder.
    fn prepare_close(&mut self, state: &State) -> Option<CloseMove> {
        if state.route_customers == 0 {
            return None;
        }
        let arc = self.graph.arc(state.last, self.graph.end)?;
        let resources = ResourceState {
            clock: state.clock,
            battery: state.battery,
            load: state.load,
        };
        if let Err(_e) = extend(self.graph, &resources, arc, self.graph.end) {
            self.pruned_infeasible += 1;
            return None;
        }
        let dist = state.dist + arc.dist;
        let time = state.time + arc.time;
        if state.unserved == 0 {
            return Some(CloseMove::Complete(Key {
                vehicles: state.vehicles,
                dist,
                time,
                weighted: self.config.weights.weighted(state.vehicles, dist, time),
            }));
        }
        let next = State {
            last: self.graph.depot,
            clock: self.graph.nodes[self.graph.depot].ready,
            battery: self.graph.params.battery_capacity,
            load: self.graph.params.cargo_capacity,
            route_customers: 0,
            dist,
            time,
            ..*state
        };
        let bound = self.bound_of(&next);
        Some(CloseMove::Continue(next, bound))
    }

    /// Smallest weighted bound among all unexplored frontier directions,
    /// including the node currently being expanded.
    fn frontier_bound(&self, current: f64) -> f64 {
        let mut lower = current;
        for (bounds, cursor) in &self.open_bounds {
            for b in bounds.iter().skip(cursor + 1) {
                lower = lower.min(*b);
            }
        }
        lower
    }

    fn finish(self) -> SolveResult {
        let solve_seconds = self.start.elapsed().as_secs_f64();
        let (routes, objective) = if self.incumbent.is_some() {
            if self.best_routes.is_empty() {
                // zero-customer instance: the empty solution
                (Some(Vec::new()), Some(objective_of(&[], &self.config.weights)))
            } else {
                let depot = &self.graph.nodes[self.graph.depot].label;
                let mut evaluated = Vec::with_capacity(self.best_routes.len());
                for ids in &self.best_routes {
                    let mut labels = Vec::with_capacity(ids.len() + 2);
                    labels.push(depot.clone());
                    labels.extend(ids.iter().map(|&id| self.graph.nodes[id].label.clone()));
                    labels.push(depot.clone());
                    let eval = evaluate_route(self.graph, &labels)
                        .expect("search only records routes it proved feasible");
                    evaluated.push(eval);
                }
                let objective = objective_of(&evaluated, &self.config.weights);
                (Some(evaluated), Some(objective))
            }
        } else {
            (None, None)
        };

        let (status, gap) = match (&self.stop, objective.is_some()) {
            (None, true) => (SolveStatus::Optimal, Some(0.0)),
            (None, false) => (SolveStatus::Infeasible, None),
            (Some(StopReason::GapClosed { lower }), true) => {
                let upper = objective.as_ref().expect("checked above").weighted;
                let gap = ((upper - lower) / upper.abs().max(f64::MIN_POSITIVE)).max(0.0);
                (SolveStatus::Optimal, Some(gap))
            }
            (Some(StopReason::GapClosed { .. }), false) => {
                unreachable!("gap stop requires an incumbent")
            }
            (Some(_), true) => (SolveStatus::FeasibleTimeout, None),
            (Some(_), false) => (SolveStatus::NoSolutionFound, None),
        };

        SolveResult {
            status,
            routes,
            objective,
            stats: SolveStats {
                nodes_explored: self.nodes,
                pruned_by_bound: self.pruned_by_bound,
                pruned_infeasible: self.pruned_infeasible,
                solve_seconds,
                gap,
            },
        }
    }
}
