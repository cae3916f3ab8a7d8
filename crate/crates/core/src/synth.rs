//! Seeded random problem generators for tests and benchmarks.
//!
//! Instances come out of a fixed-parameter family: depot in the middle of
//! a square, customers and stations uniform over it, battery sized around
//! the square's diagonal so recharging is sometimes—but not always—needed,
//! and windows anchored to the earliest reachable time so most (not all)
//! instances are feasible. Everything is driven by a ChaCha stream, so a
//! `(config, seed)` pair always reproduces the same instance on every
//! platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{euclidean, CoverageScenario, Instance, Node, NodeKind, VehicleParams};

/// Parameter ranges for [`random_instance`]; each sampled value is drawn
/// uniformly over its range.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub customers: usize,
    pub stations: usize,
    /// Side length of the square all nodes fall into.
    pub area: f64,
    /// Depot due date; the whole schedule must fit inside it.
    pub horizon: f64,
    pub demand: (f64, f64),
    pub service: (f64, f64),
    /// Width of customer time windows.
    pub window_width: (f64, f64),
    /// Battery capacity as a multiple of the area diagonal.
    pub battery_factor: (f64, f64),
    pub cargo: (f64, f64),
    pub inverse_refuel: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            customers: 5,
            stations: 2,
            area: 50.0,
            horizon: 1000.0,
            demand: (5.0, 25.0),
            service: (2.0, 10.0),
            window_width: (60.0, 300.0),
            battery_factor: (0.9, 1.8),
            cargo: (40.0, 80.0),
            inverse_refuel: (0.05, 0.25),
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.gen_range(range.0..range.1)
    }
}

/// Generate a deterministic random instance. Identical `(config, seed)`
/// pairs always produce identical instances.
pub fn random_instance(config: &SynthConfig, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = config.area / 2.0;
    let diag = config.area * std::f64::consts::SQRT_2;

    let mut nodes = vec![Node {
        id: "D0".to_string(),
        kind: NodeKind::Depot,
        x: center,
        y: center,
        demand: 0.0,
        ready: 0.0,
        due: config.horizon,
        service: 0.0,
    }];

    for i in 0..config.customers {
        let x = rng.gen_range(0.0..config.area);
        let y = rng.gen_range(0.0..config.area);
        let service = sample(&mut rng, config.service);
        // Anchor the window after the first possible arrival and leave
        // room to drive home before the depot closes.
        let from_depot = euclidean(center, center, x, y);
        let latest_start = (config.horizon - from_depot - service).max(1.0);
        let ready = rng.gen_range(0.0..(0.6 * latest_start));
        let width = sample(&mut rng, config.window_width);
        let due = (ready + width).min(latest_start).max(ready);
        nodes.push(Node {
            id: format!("C{}", i + 1),
            kind: NodeKind::Customer,
            x,
            y,
            demand: sample(&mut rng, config.demand),
            ready,
            due,
            service,
        });
    }

    for i in 0..config.stations {
        nodes.push(Node {
            id: format!("S{i}"),
            kind: NodeKind::Station,
            x: rng.gen_range(0.0..config.area),
            y: rng.gen_range(0.0..config.area),
            demand: 0.0,
            ready: 0.0,
            due: config.horizon,
            service: 0.0,
        });
    }

    let params = VehicleParams {
        battery_capacity: sample(&mut rng, config.battery_factor) * diag,
        cargo_capacity: sample(&mut rng, config.cargo),
        consumption_rate: 1.0,
        inverse_refuel_rate: sample(&mut rng, config.inverse_refuel),
        velocity: 1.0,
    };

    Instance::new(format!("synth-{seed}"), nodes, params)
        .expect("generated instance satisfies the structural invariants")
}

/// Deterministic random coverage: a uniform base level plus per-arc
/// overrides on roughly half of the customer-to-customer arcs.
pub fn random_coverage(instance: &Instance, wireless_rate: f64, seed: u64) -> CoverageScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ca1_ab1e);
    let base = rng.gen_range(0.0..0.8);
    let mut scenario =
        CoverageScenario::uniform(base, wireless_rate).expect("base level is within [0, 1]");
    let ids: Vec<&str> = instance.nodes.iter().map(|n| n.id.as_str()).collect();
    for from in &ids {
        for to in &ids {
            if from != to && rng.gen_bool(0.5) {
                scenario
                    .set_arc(*from, *to, rng.gen_range(0.0..1.0))
                    .expect("override is within [0, 1]");
            }
        }
    }
    scenario
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_reproduces_the_instance() {
        let config = SynthConfig::default();
        let a = random_instance(&config, 42);
        let b = random_instance(&config, 42);
        assert_eq!(a, b);
        let c = random_instance(&config, 43);
        assert_ne!(a, c, "different seeds should differ");
    }

    #[test]
    fn generated_instances_are_structurally_sound() {
        let config = SynthConfig {
            customers: 8,
            stations: 3,
            ..SynthConfig::default()
        };
        for seed in 0..20 {
            let inst = random_instance(&config, seed);
            assert_eq!(inst.customers().count(), 8);
            assert_eq!(inst.stations().count(), 3);
            for node in &inst.nodes {
                assert!(node.ready <= node.due, "window inverted on {}", node.id);
                assert!(node.due <= config.horizon + 1e-9);
                assert!(node.x >= 0.0 && node.x <= config.area);
            }
            // defaults keep every single customer within cargo capacity
            let max_demand = inst
                .customers()
                .map(|c| c.demand)
                .fold(0.0f64, f64::max);
            assert!(max_demand <= inst.params.cargo_capacity);
        }
    }

    #[test]
    fn random_coverage_is_deterministic_and_bounded() {
        let inst = random_instance(&SynthConfig::default(), 7);
        let a = random_coverage(&inst, 0.9, 11);
        let b = random_coverage(&inst, 0.9, 11);
        assert_eq!(a, b);
        for from in &inst.nodes {
            for to in &inst.nodes {
                let omega = a.coverage(&from.id, &to.id);
                assert!((0.0..=1.0).contains(&omega));
            }
        }
    }
}
