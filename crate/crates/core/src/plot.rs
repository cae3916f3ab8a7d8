//! Self-contained SVG plots of a plan: node glyphs (square depot,
//! circular customers, triangular stations), one polyline per route,
//! and a `+gain` label on every arc that picks up wireless charge.

use crate::eval::EvaluatedRoute;
use crate::graph::RoutingGraph;

#[derive(Debug, Clone, Copy)]
pub struct PlotConfig {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Label arcs with the wireless energy gained (only where positive).
    pub label_gains: bool,
}

impl Default for PlotConfig {
    fn default() -> Self {
        PlotConfig {
            width: 640.0,
            height: 480.0,
            margin: 40.0,
            label_gains: true,
        }
    }
}

const ROUTE_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Projector {
    min_x: f64,
    min_y: f64,
    scale: f64,
    height: f64,
    margin: f64,
}

impl Projector {
    fn fit(graph: &RoutingGraph, config: &PlotConfig) -> Self {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for node in &graph.nodes {
            min_x = min_x.min(node.x);
            max_x = max_x.max(node.x);
            min_y = min_y.min(node.y);
            max_y = max_y.max(node.y);
        }
        let span_x = (max_x - min_x).max(1e-9);
        let span_y = (max_y - min_y).max(1e-9);
        let usable_w = config.width - 2.0 * config.margin;
        let usable_h = config.height - 2.0 * config.margin;
        let scale = (usable_w / span_x).min(usable_h / span_y);
        Projector {
            min_x,
            min_y,
            scale,
            height: config.height,
            margin: config.margin,
        }
    }

    /// Map instance coordinates to the SVG plane (y points down).
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.margin + (x - self.min_x) * self.scale,
            self.height - self.margin - (y - self.min_y) * self.scale,
        )
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render the graph and any number of routes as one SVG document.
pub fn render_svg(
    graph: &RoutingGraph,
    routes: &[EvaluatedRoute],
    title: &str,
    config: &PlotConfig,
) -> String {
    let proj = Projector::fit(graph, config);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.0} {h:.0}\" \
         width=\"{w:.0}\" height=\"{h:.0}\">\n",
        w = config.width,
        h = config.height
    ));
    svg.push_str(&format!(
        "  <rect width=\"{:.0}\" height=\"{:.0}\" fill=\"#ffffff\"/>\n",
        config.width, config.height
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        config.width / 2.0,
        xml_escape(title)
    ));

    for (ri, route) in routes.iter().enumerate() {
        let color = ROUTE_COLORS[ri % ROUTE_COLORS.len()];
        let points: Vec<String> = route
            .node_ids
            .iter()
            .map(|&id| {
                let n = &graph.nodes[id];
                let (x, y) = proj.map(n.x, n.y);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
             stroke-width=\"1.5\"/>\n",
            points.join(" ")
        ));
        if config.label_gains {
            for (k, &gain) in route.arc_gains.iter().enumerate() {
                if gain <= 1e-9 {
                    continue;
                }
                let a = &graph.nodes[route.node_ids[k]];
                let b = &graph.nodes[route.node_ids[k + 1]];
                let (x, y) = proj.map((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
                svg.push_str(&format!(
                    "  <text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" \
                     font-size=\"10\" fill=\"{color}\" text-anchor=\"middle\">+{gain:.1}</text>\n",
                    y - 4.0
                ));
            }
        }
    }

    // glyphs last, so they sit on top of route lines
    for (id, node) in graph.nodes.iter().enumerate() {
        if id == graph.end {
            continue; // same point and label as the depot
        }
        let (x, y) = proj.map(node.x, node.y);
        if node.is_customer() {
            svg.push_str(&format!(
                "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"#333333\"/>\n"
            ));
        } else if node.is_station() {
            svg.push_str(&format!(
                "  <polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" \
                 fill=\"#f0b429\" stroke=\"#7a5c00\"/>\n",
                x,
                y - 5.5,
                x - 5.0,
                y + 4.0,
                x + 5.0,
                y + 4.0
            ));
        } else {
            svg.push_str(&format!(
                "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"9\" height=\"9\" \
                 fill=\"#111111\"/>\n",
                x - 4.5,
                y - 4.5
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" \
             font-size=\"9\" text-anchor=\"middle\">{}</text>\n",
            y + 14.0,
            xml_escape(&node.label)
        ));
    }

    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"middle\">\u{25a0} depot \u{25cf} customer \u{25b2} station</text>\n",
        config.width / 2.0,
        config.height - 10.0
    ));
    svg.push_str("</svg>\n");
    svg
}
