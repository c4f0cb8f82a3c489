use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::centrality::CentralityResult;
use crate::graph::CollaborationGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Dot,
    Graphml,
}

impl GraphFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            GraphFormat::Dot => "dot",
            GraphFormat::Graphml => "graphml",
        }
    }
}

/// Target interval for node sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: f64,
    pub max: f64,
}

impl Default for SizeRange {
    fn default() -> Self {
        SizeRange { min: 1.0, max: 10.0 }
    }
}

impl SizeRange {
    /// Affine map from `[lo, hi]` onto the range. A degenerate score range
    /// maps everything to the midpoint.
    fn map(&self, score: f64, lo: f64, hi: f64) -> f64 {
        if hi - lo > 0.0 {
            self.min + (score - lo) / (hi - lo) * (self.max - self.min)
        } else {
            (self.min + self.max) / 2.0
        }
    }
}

struct NodeRow<'a> {
    label: &'a str,
    papers: u64,
    citations: u64,
    score: String,
    size: String,
}

/// Nodes in label order, then edges as pairs of positions in that order.
type EdgeRow = (usize, usize, u64);

fn layout<'a, T: Scalar>(
    g: &'a CollaborationGraph,
    scores: &CentralityResult<T>,
    sizes: SizeRange,
) -> Result<(Vec<NodeRow<'a>>, Vec<EdgeRow>), ReportError> {
    if scores.scores.len() != g.n() {
        return Err(ReportError::ScoreMismatch {
            scores: scores.scores.len(),
            nodes: g.n(),
        });
    }
    let values: Vec<f64> = scores.scores.iter().map(|s| s.to_f64().unwrap_or(0.0)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let order = g.label_order();
    let mut position = vec![0; g.n()];
    for (pos, &idx) in order.iter().enumerate() {
        position[idx] = pos;
    }
    let nodes = order
        .iter()
        .map(|&idx| {
            let node = &g.nodes[idx];
            NodeRow {
                label: &node.label,
                papers: node.papers,
                citations: node.citations,
                score: scores.scores[idx].to_string(),
                size: format!("{:.6}", sizes.map(values[idx], lo, hi)),
            }
        })
        .collect();
    let mut edges: Vec<EdgeRow> = g
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (position[e.u], position[e.v]);
            (a.min(b), a.max(b), e.weight)
        })
        .collect();
    edges.sort_unstable();
    Ok((nodes, edges))
}

/// Writes `g` with per-node centrality scores and derived sizes.
pub fn export_graph<T: Scalar, W: Write>(
    g: &CollaborationGraph,
    scores: &CentralityResult<T>,
    format: GraphFormat,
    sizes: SizeRange,
    sink: &mut W,
) -> Result<(), ReportError> {
    let (nodes, edges) = layout(g, scores, sizes)?;
    let text = match format {
        GraphFormat::Dot => render_dot(g, &nodes, &edges),
        GraphFormat::Graphml => render_graphml(g, scores, &nodes, &edges),
    };
    sink.write_all(text.as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn render_dot(g: &CollaborationGraph, nodes: &[NodeRow<'_>], edges: &[EdgeRow]) -> String {
    let mut out = format!("graph {} {{\n", g.entity_kind.as_str());
    out.push_str("  node [shape=circle];\n");
    for (i, n) in nodes.iter().enumerate() {
        out.push_str(&format!(
            "  n{} [label={}, papers={}, citations={}, score={}, size={}];\n",
            i,
            dot_quote(n.label),
            n.papers,
            n.citations,
            dot_quote(&n.score),
            n.size
        ));
    }
    for &(u, v, w) in edges {
        out.push_str(&format!("  n{u} -- n{v} [weight={w}];\n"));
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // control characters other than tab/newline are not allowed in XML 1.0
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => out.push(' '),
            _ => out.push(c),
        }
    }
    out
}

fn render_graphml<T: Scalar>(
    g: &CollaborationGraph,
    scores: &CentralityResult<T>,
    nodes: &[NodeRow<'_>],
    edges: &[EdgeRow],
) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    for (id, domain, ty) in [
        ("label", "node", "string"),
        ("papers", "node", "long"),
        ("citations", "node", "long"),
        ("score", "node", "double"),
        ("size", "node", "double"),
        ("weight", "edge", "long"),
    ] {
        out.push_str(&format!(
            "  <key id=\"{id}\" for=\"{domain}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>\n"
        ));
    }
    out.push_str(&format!(
        "  <graph id=\"{}\" edgedefault=\"undirected\">\n",
        xml_escape(&format!("{}_{}", g.entity_kind.as_str(), scores.kind.as_str()))
    ));
    for (i, n) in nodes.iter().enumerate() {
        out.push_str(&format!("    <node id=\"n{i}\">\n"));
        out.push_str(&format!("      <data key=\"label\">{}</data>\n", xml_escape(n.label)));
        out.push_str(&format!("      <data key=\"papers\">{}</data>\n", n.papers));
        out.push_str(&format!("      <data key=\"citations\">{}</data>\n", n.citations));
        out.push_str(&format!(
            "      <data key=\"score\">{}</data>\n",
            graphml_double(&n.score)
        ));
        out.push_str(&format!("      <data key=\"size\">{}</data>\n", n.size));
        out.push_str("    </node>\n");
    }
    for (i, &(u, v, w)) in edges.iter().enumerate() {
        out.push_str(&format!("    <edge id=\"e{i}\" source=\"n{u}\" target=\"n{v}\">\n"));
        out.push_str(&format!("      <data key=\"weight\">{w}</data>\n"));
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// xsd:double spells infinity and NaN as `INF` and `NaN`.
fn graphml_double(s: &str) -> &str {
    match s {
        "inf" => "INF",
        "-inf" => "-INF",
        "NaN" => "NaN",
        other => other,
    }
}
