//! Independent oracles, generators and format checkers shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use scholarlens::graph::{CollaborationGraph, Edge, EntityKind, Node};
use scholarlens::normalize::{Affiliation, PaperRecord};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

// ---------------------------------------------------------------------------
// graphs

/// Random simple graph with `n` nodes, edge probability `p` and weights in
/// `1..=max_weight`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, max_weight: u64) -> CollaborationGraph {
    let nodes = (0..n)
        .map(|i| Node {
            label: format!("v{i:02}"),
            papers: 1,
            citations: 0,
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push(Edge {
                    u,
                    v,
                    weight: rng.gen_range(1..=max_weight),
                });
            }
        }
    }
    CollaborationGraph::from_parts(EntityKind::Author, nodes, edges)
}

pub fn graph_from_edges(n: usize, edges: &[(usize, usize, u64)]) -> CollaborationGraph {
    let nodes = (0..n)
        .map(|i| Node {
            label: format!("v{i:02}"),
            papers: 1,
            citations: 0,
        })
        .collect();
    CollaborationGraph::from_parts(
        EntityKind::Author,
        nodes,
        edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }),
    )
}

/// Betweenness by enumerating every simple path between every pair.
///
/// Path length is the hop count, or the sum of `1 / weight` when
/// `weighted`. Scores are pair counts over unordered pairs, scaled by
/// `2 / ((n - 1)(n - 2))` when `normalized`.
pub fn brute_force_betweenness(g: &CollaborationGraph, weighted: bool, normalized: bool) -> Vec<f64> {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for e in &g.edges {
        let len = if weighted { 1.0 / e.weight as f64 } else { 1.0 };
        adj[e.u].push((e.v, len));
        adj[e.v].push((e.u, len));
    }
    let mut scores = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut paths: Vec<(f64, Vec<usize>)> = Vec::new();
            let mut on_path = vec![false; n];
            let mut stack = vec![s];
            on_path[s] = true;
            enumerate(&adj, t, 0.0, &mut stack, &mut on_path, &mut paths);
            if paths.is_empty() {
                continue;
            }
            let best = paths.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let shortest: Vec<&Vec<usize>> = paths
                .iter()
                .filter(|p| p.0 <= best * (1.0 + 1e-12) + 1e-15)
                .map(|p| &p.1)
                .collect();
            let sigma = shortest.len() as f64;
            for path in &shortest {
                for &v in &path[1..path.len() - 1] {
                    scores[v] += 1.0 / sigma;
                }
            }
        }
    }
    if normalized {
        if n < 3 {
            return vec![0.0; n];
        }
        let scale = 2.0 / ((n - 1) as f64 * (n - 2) as f64);
        scores.iter_mut().for_each(|s| *s *= scale);
    }
    scores
}

fn enumerate(
    adj: &[Vec<(usize, f64)>],
    target: usize,
    length: f64,
    stack: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<(f64, Vec<usize>)>,
) {
    let at = *stack.last().unwrap();
    if at == target {
        out.push((length, stack.clone()));
        return;
    }
    for &(next, len) in &adj[at] {
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        stack.push(next);
        enumerate(adj, target, length + len, stack, on_path, out);
        stack.pop();
        on_path[next] = false;
    }
}

/// Column-stochastic transition matrix of the undirected graph; isolated
/// nodes jump uniformly.
fn transition(g: &CollaborationGraph, weighted: bool) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut a = vec![vec![0.0; n]; n];
    for e in &g.edges {
        let w = if weighted { e.weight as f64 } else { 1.0 };
        a[e.u][e.v] += w;
        a[e.v][e.u] += w;
    }
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        let out: f64 = (0..n).map(|i| a[i][j]).sum();
        for i in 0..n {
            m[i][j] = if out > 0.0 { a[i][j] / out } else { 1.0 / n as f64 };
        }
    }
    m
}

/// Dense power iteration `x <- (1-d)/n + d M x` run to a tight tolerance.
pub fn dense_pagerank(g: &CollaborationGraph, damping: f64, weighted: bool) -> Vec<f64> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let m = transition(g, weighted);
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n)
            .map(|i| (1.0 - damping) / n as f64 + damping * (0..n).map(|j| m[i][j] * x[j]).sum::<f64>())
            .collect();
        let diff: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if diff < 1e-15 {
            break;
        }
    }
    x
}

/// Stationary vector from `(I - dM) x = (1-d)/n` by Gaussian elimination
/// with partial pivoting.
pub fn solved_pagerank(g: &CollaborationGraph, damping: f64, weighted: bool) -> Vec<f64> {
    let n = g.n();
    let m = transition(g, weighted);
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .map(|j| if i == j { 1.0 } else { 0.0 } - damping * m[i][j])
                .collect();
            row.push((1.0 - damping) / n as f64);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

// ---------------------------------------------------------------------------
// corpora

pub const TOPIC_WORDS: [&str; 6] = [
    "machine learning",
    "deep learning",
    "digital twin",
    "blockchain",
    "internet of things",
    "virtual reality",
];

const FILLER: [&str; 12] = [
    "smart",
    "manufacturing",
    "analysis",
    "system",
    "framework",
    "production",
    "data",
    "model",
    "process",
    "quality",
    "network",
    "control",
];

/// Random cleaned corpus. Authors, institutions and countries are drawn
/// from pools of the given sizes.
pub fn synthetic_corpus(
    rng: &mut ChaCha8Rng,
    papers: usize,
    author_pool: usize,
    institution_pool: usize,
    country_pool: usize,
) -> Vec<PaperRecord> {
    (0..papers)
        .map(|i| {
            let n_authors = rng.gen_range(1..=6);
            let mut authors: Vec<String> = Vec::new();
            while authors.len() < n_authors.min(author_pool) {
                let a = format!("Author{:05}, A.", rng.gen_range(0..author_pool));
                if !authors.contains(&a) {
                    authors.push(a);
                }
            }
            let n_aff = rng.gen_range(0..=3);
            let affiliations = (0..n_aff)
                .map(|_| Affiliation {
                    institution: format!("Univ {:04}", rng.gen_range(0..institution_pool)),
                    country: format!("Country {:03}", rng.gen_range(0..country_pool)),
                    linked_authors: authors.choose(rng).into_iter().cloned().collect(),
                })
                .collect();
            let mut words: Vec<&str> = (0..rng.gen_range(4..10))
                .map(|_| *FILLER.choose(rng).unwrap())
                .collect();
            for topic in TOPIC_WORDS {
                if rng.gen_bool(0.2) {
                    words.push(topic);
                }
            }
            words.shuffle(rng);
            let text = words.join(" ");
            let (title, abstract_text) = text.split_at(text.len() / 2);
            PaperRecord {
                id: format!("10.5555/syn.{i}"),
                // numbered so title-and-year dedup never merges two records
                title: format!("{} {i}", title.trim()),
                doi: Some(format!("10.5555/syn.{i}")),
                abstract_text: Some(abstract_text.trim().to_owned()),
                year: rng.gen_range(2010..=2022),
                source: format!("Journal {}", rng.gen_range(0..30)),
                publisher: None,
                authors,
                affiliations,
                keywords: Vec::new(),
                times_cited: rng.gen_range(0..200),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// format checks

/// Structural check of a LaTeX table fragment: comments stripped, braces
/// balanced, environments properly nested, every tabular row carries the
/// declared number of columns and cell text has no unescaped specials.
pub fn check_latex(fragment: &str) -> Result<(), String> {
    let body: String = fragment
        .lines()
        .filter(|l| !l.trim_start().starts_with('%'))
        .collect::<Vec<_>>()
        .join("\n");

    let bytes = body.as_bytes();
    let mut depth = 0i64;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 1,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("unbalanced '}}' at byte {i}"));
                }
            }
            b'%' => return Err(format!("unescaped % at byte {i}")),
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err("unbalanced braces".into());
    }

    let env_re = regex::Regex::new(r"\\(begin|end)\{([a-z*]+)\}").unwrap();
    let mut stack = Vec::new();
    for cap in env_re.captures_iter(&body) {
        match &cap[1] {
            "begin" => stack.push(cap[2].to_owned()),
            _ => match stack.pop() {
                Some(open) if open == cap[2] => {}
                other => return Err(format!("\\end{{{}}} closes {:?}", &cap[2], other)),
            },
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed environments {stack:?}"));
    }

    let known = regex::Regex::new(
        r"^\\(begin|end|centering|caption|label|toprule|midrule|bottomrule|textbf|textasciitilde|textasciicircum|textbackslash|textless|textgreater|textbar)$",
    )
    .unwrap();
    let command = regex::Regex::new(r"\\([A-Za-z]+)").unwrap();
    for cap in command.captures_iter(&body) {
        if !known.is_match(&cap[0]) {
            return Err(format!("unexpected command {}", &cap[0]));
        }
    }

    let colfmt_re = regex::Regex::new(r"\\begin\{tabular\}\{([lcr]+)\}").unwrap();
    let columns = colfmt_re.captures(&body).ok_or("no tabular column format")?[1].len();
    let start = body.find("\\toprule").ok_or("no \\toprule")?;
    let end = body.find("\\bottomrule").ok_or("no \\bottomrule")?;
    for line in body[start..end].lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("\\toprule") || line.starts_with("\\midrule") {
            continue;
        }
        let row = line
            .strip_suffix("\\\\")
            .ok_or_else(|| format!("row not terminated: {line}"))?;
        let cells = split_unescaped(row, b'&');
        if cells.len() != columns {
            return Err(format!("row has {} cells, expected {columns}: {line}", cells.len()));
        }
        for cell in cells {
            for special in *b"_#$^~" {
                if split_unescaped(cell, special).len() > 1 {
                    return Err(format!("unescaped {:?} in cell {cell:?}", special as char));
                }
            }
        }
    }
    Ok(())
}

fn split_unescaped(text: &str, sep: u8) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut from = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'\\' {
            i += 2;
            continue;
        }
        // `\textasciitilde{}` and friends are written with their own braces
        if bytes[i] == sep {
            out.push(&text[from..i]);
            from = i + 1;
        }
        i += 1;
    }
    out.push(&text[from..]);
    out
}

pub const LATEX_PREAMBLE: &str =
    "\\documentclass{article}\n\\usepackage[T1]{fontenc}\n\\usepackage{booktabs}\n\\begin{document}\n";

/// Compiles the fragment with `pdflatex` when it is installed. Returns
/// `None` when no TeX installation is available.
pub fn compile_latex(fragment: &str) -> Option<Result<(), String>> {
    let probe = std::process::Command::new("pdflatex").arg("--version").output();
    if !matches!(probe, Ok(ref o) if o.status.success()) {
        return None;
    }
    let dir = tempfile::tempdir().ok()?;
    let doc = format!("{LATEX_PREAMBLE}{fragment}\n\\end{{document}}\n");
    std::fs::write(dir.path().join("doc.tex"), doc).ok()?;
    let out = std::process::Command::new("pdflatex")
        .args(["-interaction=nonstopmode", "-halt-on-error", "doc.tex"])
        .current_dir(dir.path())
        .output()
        .ok()?;
    Some(if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stdout).into_owned())
    })
}

const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";

/// Checks a GraphML document against the structure the GraphML schema
/// requires for what we emit, returning `(nodes, edges)`.
pub fn check_graphml(text: &str) -> Result<(usize, usize), String> {
    let doc = roxmltree::Document::parse(text).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    if root.tag_name().name() != "graphml" || root.tag_name().namespace() != Some(GRAPHML_NS) {
        return Err(format!("root is {:?}", root.tag_name()));
    }
    let mut keys: HashMap<String, String> = HashMap::new();
    let mut seen_graph = false;
    let mut nodes = 0;
    let mut edges = 0;
    for child in root.children().filter(|c| c.is_element()) {
        if child.tag_name().namespace() != Some(GRAPHML_NS) {
            return Err("element outside the GraphML namespace".into());
        }
        match child.tag_name().name() {
            "key" => {
                if seen_graph {
                    return Err("key after graph".into());
                }
                let id = child.attribute("id").ok_or("key without id")?;
                let domain = child.attribute("for").unwrap_or("all");
                if !["graph", "node", "edge", "all"].contains(&domain) {
                    return Err(format!("bad key domain {domain}"));
                }
                let ty = child.attribute("attr.type").unwrap_or("string");
                if !["boolean", "int", "long", "float", "double", "string"].contains(&ty) {
                    return Err(format!("bad attr.type {ty}"));
                }
                if keys.insert(id.to_owned(), domain.to_owned()).is_some() {
                    return Err(format!("duplicate key {id}"));
                }
            }
            "graph" => {
                seen_graph = true;
                match child.attribute("edgedefault") {
                    Some("directed") | Some("undirected") => {}
                    other => return Err(format!("bad edgedefault {other:?}")),
                }
                let mut ids = HashSet::new();
                let mut pending_edges = Vec::new();
                for item in child.children().filter(|c| c.is_element()) {
                    let kind = item.tag_name().name();
                    match kind {
                        "node" => {
                            let id = item.attribute("id").ok_or("node without id")?;
                            if !ids.insert(id.to_owned()) {
                                return Err(format!("duplicate node id {id}"));
                            }
                            nodes += 1;
                        }
                        "edge" => {
                            let s = item.attribute("source").ok_or("edge without source")?;
                            let t = item.attribute("target").ok_or("edge without target")?;
                            pending_edges.push((s.to_owned(), t.to_owned()));
                            edges += 1;
                        }
                        "data" | "desc" => continue,
                        other => return Err(format!("unexpected <{other}> in graph")),
                    }
                    for data in item.children().filter(|c| c.is_element()) {
                        if data.tag_name().name() != "data" {
                            return Err(format!("unexpected <{}> in {kind}", data.tag_name().name()));
                        }
                        let key = data.attribute("key").ok_or("data without key")?;
                        match keys.get(key).map(String::as_str) {
                            Some(d) if d == kind || d == "all" => {}
                            other => return Err(format!("data key {key} not declared for {kind} ({other:?})")),
                        }
                    }
                }
                for (s, t) in pending_edges {
                    if !ids.contains(&s) || !ids.contains(&t) {
                        return Err(format!("edge {s} -- {t} references a missing node"));
                    }
                }
            }
            "desc" => {}
            other => return Err(format!("unexpected <{other}> under graphml")),
        }
    }
    if !seen_graph {
        return Err("no graph element".into());
    }
    Ok((nodes, edges))
}

/// Parses DOT with an independent grammar and returns `(nodes, edges)`.
pub fn parse_dot(text: &str) -> Result<(usize, usize), String> {
    let ast = dot_parser::ast::Graph::try_from(text).map_err(|e| e.to_string())?;
    let graph = dot_parser::canonical::Graph::from(ast);
    Ok((graph.nodes.set.len(), graph.edges.set.len()))
}
