//! Routing graph with replicated station copies and static arc pruning.
//!
//! The graph a search runs on is not the raw instance: each physical
//! charging station is expanded into a fixed number of copies so a tour
//! may pass "the same" station several times while every graph node is
//! still visited at most once, and the depot is split into a start node
//! `D` and an end node `E`. Arcs that can never be traversed by any
//! feasible vehicle are dropped up front.

use serde_json::json;

use crate::instance::{euclidean, CoverageScenario, Instance, VehicleParams};
use crate::FEASIBILITY_EPS;

/// Index into [`RoutingGraph::nodes`].
pub type NodeId = usize;

/// Default number of copies each physical station is replicated into.
pub const DEFAULT_STATION_COPIES: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphNodeKind {
    /// Route start node `D`.
    Depot,
    Customer,
    /// The `copy`-th replica (1-based) of a physical station.
    StationCopy { copy: usize },
    /// Route end node `E`; shares the depot's location and window.
    EndDepot,
}

#[derive(Debug, Clone)]
pub struct GraphNode {
    pub id: NodeId,
    /// Label used in solutions: the physical id, or `S3#2` for copies.
    /// The end node reuses the depot's id so routes read `D0 ... D0`.
    pub label: String,
    /// Id of the underlying physical node (copies map to their station,
    /// the end node to the depot).
    pub physical: String,
    pub kind: GraphNodeKind,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

impl GraphNode {
    pub fn is_station(&self) -> bool {
        matches!(self.kind, GraphNodeKind::StationCopy { .. })
    }

    pub fn is_customer(&self) -> bool {
        self.kind == GraphNodeKind::Customer
    }
}

/// Directed arc with its wireless coverage fraction baked in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub dist: f64,
    pub time: f64,
    /// Fraction of the arc length equipped with in-motion charging.
    pub coverage: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PruneStats {
    /// Arcs excluded by construction (into `D`, out of `E`, self loops,
    /// copies of one station, the empty `D -> E` tour).
    pub structural: usize,
    /// Earliest departure plus travel already misses the head's due date.
    pub time_window: usize,
    /// Net energy demand exceeds battery capacity even when fully charged.
    pub energy: usize,
}

#[derive(Debug, Clone)]
pub struct RoutingGraph {
    pub nodes: Vec<GraphNode>,
    /// Dense row-major adjacency; `None` marks a pruned or absent arc.
    arcs: Vec<Option<Arc>>,
    pub depot: NodeId,
    pub end: NodeId,
    pub customers: Vec<NodeId>,
    /// Copies grouped per physical station, in instance order; each inner
    /// list is ordered by copy number.
    pub station_groups: Vec<Vec<NodeId>>,
    pub wireless_rate: f64,
    pub params: VehicleParams,
    pub prune_stats: PruneStats,
}

impl RoutingGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn arc(&self, from: NodeId, to: NodeId) -> Option<&Arc> {
        self.arcs[from * self.nodes.len() + to].as_ref()
    }

    /// All station copies in node-id order.
    pub fn station_copies(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.station_groups.iter().flatten().copied()
    }

    /// Number of arcs that survived pruning.
    pub fn arc_count(&self) -> usize {
        self.arcs.iter().filter(|a| a.is_some()).count()
    }

    /// Look a node up by its label (`C3`, `S0#2`, ...). The shared
    /// depot/end label resolves to the start node.
    pub fn node_by_label(&self, label: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.label == label)
    }

    /// Debug dump of nodes and surviving arcs as a JSON document.
    pub fn to_json(&self) -> String {
        let nodes: Vec<_> = self
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "id": n.id,
                    "label": n.label,
                    "physical": n.physical,
                    "kind": match n.kind {
                        GraphNodeKind::Depot => "depot",
                        GraphNodeKind::Customer => "customer",
                        GraphNodeKind::StationCopy { .. } => "station",
                        GraphNodeKind::EndDepot => "end",
                    },
                    "x": n.x,
                    "y": n.y,
                    "demand": n.demand,
                    "ready": n.ready,
                    "due": n.due,
                    "service": n.service,
                })
            })
            .collect();
        let mut arcs = Vec::new();
        for from in 0..self.len() {
            for to in 0..self.len() {
                if let Some(arc) = self.arc(from, to) {
                    arcs.push(json!({
                        "from": from,
                        "to": to,
                        "dist": arc.dist,
                        "time": arc.time,
                        "omega": arc.coverage,
                    }));
                }
            }
        }
        serde_json::to_string_pretty(&json!({
            "wireless_rate": self.wireless_rate,
            "nodes": nodes,
            "arcs": arcs,
        }))
        .expect("graph dump cannot fail")
    }
}

/// Expand an instance into the replicated routing graph under a coverage
/// scenario, dropping arcs that no vehicle could ever traverse.
///
/// Node layout: `D` first, then customers in instance order, then the
/// station copies grouped per station, then `E`.
pub fn build_graph(
    instance: &Instance,
    scenario: &CoverageScenario,
    copies_per_station: usize,
) -> RoutingGraph {
    let depot = instance.depot().clone();
    let mut nodes: Vec<GraphNode> = Vec::new();
    let push = |nodes: &mut Vec<GraphNode>,
                label: String,
                physical: String,
                kind: GraphNodeKind,
                src: &crate::instance::Node| {
        let id = nodes.len();
        nodes.push(GraphNode {
            id,
            label,
            physical,
            kind,
            x: src.x,
            y: src.y,
            demand: src.demand,
            ready: src.ready,
            due: src.due,
            service: src.service,
        });
        id
    };

    push(
        &mut nodes,
        depot.id.clone(),
        depot.id.clone(),
        GraphNodeKind::Depot,
        &depot,
    );
    let mut customers = Vec::new();
    for c in instance.customers() {
        customers.push(push(
            &mut nodes,
            c.id.clone(),
            c.id.clone(),
            GraphNodeKind::Customer,
            c,
        ));
    }
    let mut station_groups = Vec::new();
    for s in instance.stations() {
        let mut group = Vec::new();
        for copy in 1..=copies_per_station {
            group.push(push(
                &mut nodes,
                format!("{}#{copy}", s.id),
                s.id.clone(),
                GraphNodeKind::StationCopy { copy },
                s,
            ));
        }
        station_groups.push(group);
    }
    let end = push(
        &mut nodes,
        depot.id.clone(),
        depot.id.clone(),
        GraphNodeKind::EndDepot,
        &depot,
    );

    let n = nodes.len();
    let params = instance.params;
    let w = scenario.wireless_rate();
    let mut arcs = vec![None; n * n];
    let mut stats = PruneStats::default();
    for i in 0..n {
        for j in 0..n {
            let structural = i == j
                || j == 0
                || i == end
                || (i == 0 && j == end)
                || (nodes[i].is_station()
                    && nodes[j].is_station()
                    && nodes[i].physical == nodes[j].physical);
            if structural {
                if i != j {
                    stats.structural += 1;
                }
                continue;
            }
            let (a, b) = (&nodes[i], &nodes[j]);
            let dist = euclidean(a.x, a.y, b.x, b.y);
            let time = dist / params.velocity;
            let coverage = scenario.coverage(&a.physical, &b.physical);

            // Earliest departure from the tail: window opening, service,
            // and for stations the fixed full-recharge stop.
            let delay = if a.is_station() {
                params.full_recharge_duration()
            } else {
                0.0
            };
            if a.ready.max(0.0) + a.service + delay + time > b.due + FEASIBILITY_EPS {
                stats.time_window += 1;
                continue;
            }
            // Net energy over the arc with in-motion charging credited;
            // if it exceeds a full battery the arc is untraversable.
            let net = params.consumption_rate * dist - w * dist * coverage;
            if net > params.battery_capacity + FEASIBILITY_EPS {
                stats.energy += 1;
                continue;
            }
            arcs[i * n + j] = Some(Arc {
                dist,
                time,
                coverage,
            });
        }
    }

    RoutingGraph {
        nodes,
        arcs,
        depot: 0,
        end,
        customers,
        station_groups,
        wireless_rate: w,
        params,
        prune_stats: stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Node, NodeKind, VehicleParams};
    use proptest::prelude::*;

    fn node(id: &str, kind: NodeKind, x: f64, y: f64) -> Node {
        Node {
            id: id.to_string(),
            kind,
            x,
            y,
            demand: if kind == NodeKind::Customer { 10.0 } else { 0.0 },
            ready: 0.0,
            due: 10_000.0,
            service: if kind == NodeKind::Customer { 5.0 } else { 0.0 },
        }
    }

    fn params() -> VehicleParams {
        VehicleParams {
            battery_capacity: 100.0,
            cargo_capacity: 200.0,
            consumption_rate: 1.0,
            inverse_refuel_rate: 2.0,
            velocity: 1.0,
        }
    }

    fn fixture(customers: usize, stations: usize) -> Instance {
        let mut nodes = vec![node("D0", NodeKind::Depot, 0.0, 0.0)];
        for i in 0..customers {
            nodes.push(node(&format!("C{}", i + 1), NodeKind::Customer, 3.0 + i as f64, 4.0));
        }
        for i in 0..stations {
            nodes.push(node(&format!("S{i}"), NodeKind::Station, 1.0, 1.0 + i as f64));
        }
        Instance::new("fixture", nodes, params()).unwrap()
    }

    #[test]
    fn replication_layout_and_labels() {
        let inst = fixture(5, 2);
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        // D + 5 customers + 2 stations x 2 copies + E
        assert_eq!(g.len(), 11);
        assert_eq!(g.nodes[0].label, "D0");
        assert_eq!(g.nodes[1].label, "C1");
        assert_eq!(g.nodes[6].label, "S0#1");
        assert_eq!(g.nodes[7].label, "S0#2");
        assert_eq!(g.nodes[8].label, "S1#1");
        assert_eq!(g.nodes[10].label, "D0");
        assert_eq!(g.nodes[10].kind, GraphNodeKind::EndDepot);
        assert_eq!(g.end, 10);
        assert_eq!(g.station_groups, vec![vec![6, 7], vec![8, 9]]);
        assert_eq!(g.nodes[6].physical, "S0");
    }

    #[test]
    fn single_customer_graph_has_exactly_two_arcs() {
        let inst = fixture(1, 0);
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        assert_eq!(g.len(), 3);
        assert!(g.arc(g.depot, 1).is_some(), "D -> C1 must exist");
        assert!(g.arc(1, g.end).is_some(), "C1 -> E must exist");
        assert!(g.arc(g.depot, g.end).is_none(), "empty tour D -> E is pruned");
        assert_eq!(g.arc_count(), 2);
    }

    #[test]
    fn same_station_copies_are_never_linked() {
        let inst = fixture(2, 2);
        let scenario = CoverageScenario::uniform(0.4, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let (a, b) = (g.station_groups[0][0], g.station_groups[0][1]);
        assert!(g.arc(a, b).is_none());
        assert!(g.arc(b, a).is_none());
        // copies of *different* stations do connect
        let c = g.station_groups[1][0];
        assert!(g.arc(a, c).is_some());
        assert!(g.arc(c, b).is_some());
    }

    #[test]
    fn energy_prune_respects_wireless_credit() {
        // 200 length units at consumption 1.0 against a 100 battery:
        // bare arc needs 200 > 100 -> pruned; at omega 0.6 and rate 0.9
        // the net drops to 200 - 108 = 92 -> kept.
        let mut nodes = vec![node("D0", NodeKind::Depot, 0.0, 0.0)];
        nodes.push(node("C1", NodeKind::Customer, 200.0, 0.0));
        let inst = Instance::new("far", nodes, params()).unwrap();

        let bare = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &bare, 2);
        assert!(g.arc(0, 1).is_none());
        assert!(g.prune_stats.energy >= 1);

        let covered = CoverageScenario::uniform(0.6, 0.9).unwrap();
        let g = build_graph(&inst, &covered, 2);
        let arc = g.arc(0, 1).expect("wireless credit keeps the arc");
        assert_eq!(arc.dist, 200.0);
        assert_eq!(arc.coverage, 0.6);
    }

    #[test]
    fn time_prune_counts_station_recharge_delay() {
        // Station at distance 5 from a customer whose window closes at 60:
        // leaving the station no earlier than ready + g*Q = 0 + 200 the
        // customer is unreachable; without the recharge delay it would be
        // fine, so the depot keeps its arc.
        let mut nodes = vec![node("D0", NodeKind::Depot, 0.0, 0.0)];
        let mut c = node("C1", NodeKind::Customer, 3.0, 4.0);
        c.due = 60.0;
        nodes.push(c);
        nodes.push(node("S0", NodeKind::Station, 0.0, 0.0));
        let inst = Instance::new("tight", nodes, params()).unwrap();
        let scenario = CoverageScenario::uniform(0.0, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 1);
        let station = g.station_groups[0][0];
        assert!(g.arc(g.depot, 1).is_some(), "depot reaches the customer");
        assert!(
            g.arc(station, 1).is_none(),
            "post-recharge departure misses the window"
        );
        assert!(g.prune_stats.time_window >= 1);
    }

    #[test]
    fn json_dump_mentions_every_node() {
        let inst = fixture(2, 1);
        let scenario = CoverageScenario::uniform(0.2, 0.9).unwrap();
        let g = build_graph(&inst, &scenario, 2);
        let dump = g.to_json();
        let value: serde_json::Value = serde_json::from_str(&dump).unwrap();
        assert_eq!(value["nodes"].as_array().unwrap().len(), g.len());
        assert_eq!(value["arcs"].as_array().unwrap().len(), g.arc_count());
        assert!(dump.contains("S0#2"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn structural_invariants(customers in 1usize..5, stations in 0usize..3,
                                 copies in 1usize..4, level in 0.0..1.0f64) {
            let inst = fixture(customers, stations);
            let scenario = CoverageScenario::uniform(level, 0.9).unwrap();
            let g = build_graph(&inst, &scenario, copies);
            prop_assert_eq!(g.len(), 2 + customers + stations * copies);
            for from in 0..g.len() {
                prop_assert!(g.arc(from, g.depot).is_none(), "no arcs into D");
                prop_assert!(g.arc(g.end, from).is_none(), "no arcs out of E");
                prop_assert!(g.arc(from, from).is_none(), "no self loops");
                for to in 0..g.len() {
                    if let Some(arc) = g.arc(from, to) {
                        prop_assert!(arc.dist >= 0.0);
                        prop_assert!((arc.coverage - level).abs() < 1e-12);
                        prop_assert!((arc.time - arc.dist / g.params.velocity).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
