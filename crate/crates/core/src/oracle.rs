//! Brute-force reference optimizer for differential testing.
//!
//! The oracle enumerates complete candidate solutions — every way to split
//! the customers into ordered routes, woven with station stops in any
//! position (before, between, or after customers) — and scores each one
//! with [`evaluate_route`] alone. It deliberately shares no incremental
//! state, bounding, or pruning with the branch-and-bound search, so
//! agreement between the two is meaningful evidence.
//!
//! Two symmetry reductions keep the space finite without losing any
//! objective value: route first-customers are generated in ascending
//! order (routes are an unordered set), and a station visit always takes
//! the lowest-numbered unused copy of its physical station (copies are
//! interchangeable). Neither can change the cost of the best solution.

use thiserror::Error;

use crate::eval::{evaluate_route, objective_of, EvaluatedRoute, ObjectiveValue};
use crate::graph::{NodeId, RoutingGraph};
use crate::instance::Weights;

/// Largest customer count the oracle will accept; the space beyond this
/// is too big to enumerate honestly.
pub const ORACLE_CUSTOMER_CAP: usize = 6;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Refuse instances with more customers than this.
    pub customer_cap: usize,
    /// Optional limit on station stops woven into one route;
    /// `None` allows as many as there are unused copies.
    pub station_insertions: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            customer_cap: ORACLE_CUSTOMER_CAP,
            station_insertions: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {customers} customers, oracle cap is {cap}")]
    TooLarge { customers: usize, cap: usize },
}

/// Best solution found by enumeration.
#[derive(Debug, Clone)]
pub struct OracleBest {
    pub routes: Vec<EvaluatedRoute>,
    pub objective: ObjectiveValue,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    /// `None` when no candidate was feasible.
    pub best: Option<OracleBest>,
    /// Complete candidate solutions evaluated.
    pub candidates: u64,
}

/// Exhaustively search the routing graph for the best feasible solution.
pub fn enumerate_oracle(
    graph: &RoutingGraph,
    weights: &Weights,
    config: &OracleConfig,
) -> Result<OracleReport, OracleError> {
    let n = graph.customers.len();
    if n > config.customer_cap {
        return Err(OracleError::TooLarge {
            customers: n,
            cap: config.customer_cap,
        });
    }
    let total_copies: usize = graph.station_groups.iter().map(Vec::len).sum();
    let mut state = Enumerator {
        graph,
        weights,
        per_route_cap: config.station_insertions.unwrap_or(total_copies),
        used: vec![0; graph.station_groups.len()],
        unplaced: if n == 0 { 0 } else { (1u64 << n) - 1 },
        routes: Vec::new(),
        current: Vec::new(),
        current_stations: 0,
        last_head: None,
        candidates: 0,
        best: None,
    };
    state.open_route();
    Ok(OracleReport {
        best: state.best,
        candidates: state.candidates,
    })
}

struct Enumerator<'a> {
    graph: &'a RoutingGraph,
    weights: &'a Weights,
    per_route_cap: usize,
    /// Copies of each station group already taken across the solution.
    used: Vec<usize>,
    /// Customers not yet placed, as bits over `graph.customers` indices.
    unplaced: u64,
    routes: Vec<Vec<NodeId>>,
    current: Vec<NodeId>,
    current_stations: usize,
    last_head: Option<NodeId>,
    candidates: u64,
    best: Option<OracleBest>,
}

impl Enumerator<'_> {
    /// Start a new route (or finish, if every customer is placed).
    fn open_route(&mut self) {
        if self.unplaced == 0 {
            self.score_candidate();
            return;
        }
        self.current_stations = 0;
        self.route_prefix();
    }

    /// Leading part of a route: optional station stops, then the first
    /// customer. Heads ascend across routes so each unordered set of
    /// routes is generated exactly once.
    fn route_prefix(&mut self) {
        for idx in 0..self.graph.customers.len() {
            if self.unplaced & (1 << idx) == 0 {
                continue;
            }
            let head = self.graph.customers[idx];
            if let Some(prev) = self.last_head {
                if head <= prev {
                    continue;
                }
            }
            let saved_head = self.last_head;
            self.last_head = Some(head);
            self.unplaced &= !(1 << idx);
            self.current.push(head);
            self.fill_route();
            self.current.pop();
            self.unplaced |= 1 << idx;
            self.last_head = saved_head;
        }
        self.for_each_station(|state| state.route_prefix());
    }

    /// Grow a route that already serves a customer: append another
    /// customer, weave in a station stop, or close it and recurse.
    fn fill_route(&mut self) {
        let stations_snapshot = self.current_stations;
        let route = std::mem::take(&mut self.current);
        self.routes.push(route);
        self.open_route();
        self.current = self.routes.pop().expect("route pushed above");
        self.current_stations = stations_snapshot;

        for idx in 0..self.graph.customers.len() {
            if self.unplaced & (1 << idx) == 0 {
                continue;
            }
            self.unplaced &= !(1 << idx);
            self.current.push(self.graph.customers[idx]);
            self.fill_route();
            self.current.pop();
            self.unplaced |= 1 << idx;
        }

        self.for_each_station(|state| state.fill_route());
    }

    /// Try appending the next unused copy of every physical station,
    /// calling `descend` for each. Adjacent copies of one physical
    /// station are skipped outright: that arc never exists.
    fn for_each_station(&mut self, descend: impl Fn(&mut Self)) {
        if self.current_stations >= self.per_route_cap {
            return;
        }
        for group in 0..self.graph.station_groups.len() {
            if self.used[group] >= self.graph.station_groups[group].len() {
                continue;
            }
            let copy = self.graph.station_groups[group][self.used[group]];
            if let Some(&last) = self.current.last() {
                if self.graph.nodes[last].is_station()
                    && self.graph.nodes[last].physical == self.graph.nodes[copy].physical
                {
                    continue;
                }
            }
            self.used[group] += 1;
            self.current.push(copy);
            self.current_stations += 1;
            descend(self);
            self.current_stations -= 1;
            self.current.pop();
            self.used[group] -= 1;
        }
    }

    /// All customers are placed: evaluate the complete candidate.
    fn score_candidate(&mut self) {
        self.candidates += 1;
        let depot = &self.graph.nodes[self.graph.depot].label;
        let mut evaluated = Vec::with_capacity(self.routes.len());
        for route in &self.routes {
            let mut labels = Vec::with_capacity(route.len() + 2);
            labels.push(depot.clone());
            labels.extend(route.iter().map(|&id| self.graph.nodes[id].label.clone()));
            labels.push(depot.clone());
            match evaluate_route(self.graph, &labels) {
                Ok(eval) => evaluated.push(eval),
                Err(_) => return, // candidate infeasible, skip
            }
        }
        let objective = objective_of(&evaluated, self.weights);
        let better = match &self.best {
            None => true,
            Some(best) => objective.weighted < best.objective.weighted,
        };
        if better {
            self.best = Some(OracleBest {
                routes: evaluated,
                objective,
            });
        }
    }
}
