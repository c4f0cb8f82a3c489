mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scholarlens::centrality::{betweenness, pagerank, BetweennessParams, CentralityResult, PageRankParams};
use scholarlens::graph::{build_graph, EntityKind};
use scholarlens::normalize::{Affiliation, PaperRecord};
use scholarlens::relevance::{relevance_matrix, Bm25Params, TokenFilters};
use scholarlens::report::{
    export_graph, relevance_table, source_year_matrix, summary_json, top_entities_table, trending_table, GraphFormat,
    Metric, SizeRange, Summary, TableEntity,
};
use scholarlens::trends::{trend_table, TopicVector, TrendOptions};

const NASTY: [&str; 8] = [
    "Huazhong Univ Sci & Technol",
    "50% Lab_#1",
    "Price $ {braces}",
    "Tilde~Caret^Back\\slash",
    "<angle> | bar",
    "[bracketed] name",
    "Quote \"double\" 'single'",
    "Ünïcödé Straße",
];

fn nasty_corpus() -> Vec<PaperRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut corpus = common::synthetic_corpus(&mut rng, 40, 12, 6, 4);
    for (i, paper) in corpus.iter_mut().enumerate() {
        let name = NASTY[i % NASTY.len()];
        paper.authors.push(name.to_owned());
        paper.source = format!("{} Journal", NASTY[(i + 3) % NASTY.len()]);
        paper.affiliations.push(Affiliation {
            institution: name.to_owned(),
            country: NASTY[(i + 5) % NASTY.len()].to_owned(),
            linked_authors: vec![name.to_owned()],
        });
    }
    corpus
}

fn topics() -> Vec<TopicVector> {
    let mut t: Vec<TopicVector> = common::TOPIC_WORDS
        .iter()
        .map(|w| TopicVector::new(*w, &[*w]).unwrap())
        .collect();
    t.push(TopicVector::new("R&D_50%", &["data"]).unwrap());
    t
}

fn all_tables(corpus: &[PaperRecord]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for entity in TableEntity::ALL {
        for metric in Metric::ALL {
            out.push((
                format!("{entity:?}/{metric:?}"),
                top_entities_table(corpus, entity, metric, 15),
            ));
        }
    }
    out.push(("sources".into(), source_year_matrix(corpus, None, 10)));
    out.push((
        "sources-range".into(),
        source_year_matrix(corpus, Some((2015, 2018)), 3),
    ));
    let trends = trend_table::<f64>(corpus, &topics(), &TrendOptions::default()).unwrap();
    out.push(("trending".into(), trending_table(&trends, 4)));
    let matrix = relevance_matrix::<f64>(corpus, &topics(), &Bm25Params::default(), &TokenFilters::default()).unwrap();
    out.push(("relevance".into(), relevance_table(&matrix)));
    out.push((
        "empty".into(),
        top_entities_table(&[], TableEntity::Source, Metric::Papers, 5),
    ));
    out.push(("empty-sources".into(), source_year_matrix(&[], None, 5)));
    out
}

#[test]
fn latex_tables_are_well_formed() {
    let corpus = nasty_corpus();
    for (name, table) in all_tables(&corpus) {
        if let Err(e) = common::check_latex(&table) {
            panic!("{name}: {e}\n{table}");
        }
        if let Some(result) = common::compile_latex(&table) {
            result.unwrap_or_else(|log| panic!("{name} does not compile:\n{log}"));
        }
    }
}

#[test]
fn latex_checker_catches_mistakes() {
    let good = top_entities_table(&nasty_corpus(), TableEntity::Affiliation, Metric::Papers, 50);
    common::check_latex(&good).unwrap();
    assert!(common::check_latex(&good.replace("\\&", "&")).is_err());
    assert!(common::check_latex(&good.replace("\\end{tabular}", "")).is_err());
    assert!(
        common::check_latex("\\begin{tabular}{lr}\n\\toprule\na_b & 1 \\\\\n\\bottomrule\n\\end{tabular}").is_err()
    );
}

#[test]
fn escaped_affiliation_appears_verbatim() {
    let table = top_entities_table(&nasty_corpus(), TableEntity::Affiliation, Metric::Papers, 20);
    assert!(table.contains("Huazhong Univ Sci \\& Technol"));
    assert!(table.contains("50\\% Lab\\_\\#1"));
}

fn scored(corpus: &[PaperRecord], kind: EntityKind) -> Vec<(scholarlens::CollaborationGraph, CentralityResult<f64>)> {
    let g = build_graph(corpus, kind);
    let pr = pagerank::<f64>(&g, PageRankParams::default()).unwrap();
    let bc = betweenness::<f64>(&g, BetweennessParams::default());
    vec![(g.clone(), pr), (g, bc)]
}

#[test]
fn graph_exports_validate_and_round_trip() {
    let corpus = nasty_corpus();
    for kind in EntityKind::ALL {
        for (g, scores) in scored(&corpus, kind) {
            let mut xml = Vec::new();
            export_graph(&g, &scores, GraphFormat::Graphml, SizeRange::default(), &mut xml).unwrap();
            let (n, m) = common::check_graphml(std::str::from_utf8(&xml).unwrap()).unwrap();
            assert_eq!((n, m), (g.n(), g.m()));

            let mut dot = Vec::new();
            export_graph(&g, &scores, GraphFormat::Dot, SizeRange::default(), &mut dot).unwrap();
            let (n, m) = common::parse_dot(std::str::from_utf8(&dot).unwrap()).unwrap();
            assert_eq!((n, m), (g.n(), g.m()), "{kind:?}");
        }
    }
}

#[test]
fn graphml_labels_survive_escaping() {
    let corpus = nasty_corpus();
    let g = build_graph(&corpus, EntityKind::Institution);
    let pr = pagerank::<f64>(&g, PageRankParams::default()).unwrap();
    let mut xml = Vec::new();
    export_graph(&g, &pr, GraphFormat::Graphml, SizeRange::default(), &mut xml).unwrap();
    let text = String::from_utf8(xml).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let labels: Vec<&str> = doc
        .descendants()
        .filter(|n| n.has_tag_name("data") && n.attribute("key") == Some("label"))
        .filter_map(|n| n.text())
        .collect();
    for name in NASTY {
        assert!(labels.contains(&name), "{name} missing");
    }
    let mut sorted = labels.clone();
    sorted.sort();
    assert_eq!(labels, sorted);
}

#[test]
fn sizes_follow_scores() {
    let corpus = nasty_corpus();
    let g = build_graph(&corpus, EntityKind::Author);
    let pr = pagerank::<f64>(&g, PageRankParams::default()).unwrap();
    let range = SizeRange { min: 2.0, max: 8.0 };
    let mut xml = Vec::new();
    export_graph(&g, &pr, GraphFormat::Graphml, range, &mut xml).unwrap();
    let text = String::from_utf8(xml).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let value = |node: roxmltree::Node, key: &str| -> f64 {
        node.children()
            .find(|c| c.attribute("key") == Some(key))
            .and_then(|c| c.text())
            .unwrap()
            .parse()
            .unwrap()
    };
    let mut pairs: Vec<(f64, f64)> = doc
        .descendants()
        .filter(|n| n.has_tag_name("node"))
        .map(|n| (value(n, "score"), value(n, "size")))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!((pairs[0].1 - 2.0).abs() < 1e-6);
    assert!((pairs.last().unwrap().1 - 8.0).abs() < 1e-6);
    for w in pairs.windows(2) {
        assert!(w[1].1 >= w[0].1);
    }
}

#[test]
fn emitters_are_deterministic() {
    let corpus = nasty_corpus();
    assert_eq!(all_tables(&corpus), all_tables(&corpus));
    let render = || {
        let (g, scores) = scored(&corpus, EntityKind::Country).remove(1);
        let mut out = Vec::new();
        export_graph(&g, &scores, GraphFormat::Dot, SizeRange::default(), &mut out).unwrap();
        export_graph(&g, &scores, GraphFormat::Graphml, SizeRange::default(), &mut out).unwrap();
        out
    };
    assert_eq!(render(), render());
}

#[test]
fn summary_exposes_trend_triples() {
    let corpus = nasty_corpus();
    let trends = trend_table::<f64>(&corpus, &topics(), &TrendOptions::default()).unwrap();
    let summary = Summary {
        trends: trends.years.clone(),
        ..Summary::empty(Some("2024-01-01T00:00:00Z".into()))
    };
    let mut buf = Vec::new();
    summary_json(&summary, &mut buf).unwrap();
    let value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
    let years = value["trends"].as_array().unwrap();
    assert_eq!(years.len(), trends.years.len());
    for (json_year, year) in years.iter().zip(&trends.years) {
        for (cell, obs) in json_year["ranked"].as_array().unwrap().iter().zip(&year.ranked) {
            assert_eq!(cell["rho"], obs.rho);
            assert_eq!(cell["delta"], obs.delta);
            assert_eq!(cell["n_window"], obs.n_window);
        }
    }
    let back: Summary<f64> = serde_json::from_slice(&buf).unwrap();
    assert_eq!(back, summary);
}
