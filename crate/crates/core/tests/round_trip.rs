use arbor_ftp::eft::{build_eft_subgraph, build_perturbed, load_subgraph, BuildOptions};
use arbor_ftp::fault::{sweep_all_faults, SweepOptions};
use arbor_ftp::gen::gen_random_graph;
use arbor_ftp::Graph;

fn rows(g: &Graph, h: &arbor_ftp::eft::EftSubgraph) -> Vec<(usize, Option<i64>, Option<i64>, bool)> {
    sweep_all_faults(g, h, SweepOptions::default())
        .rows
        .iter()
        .map(|r| (r.fault, r.interim_cost().map(|c| c.0), r.exact_cost().map(|c| c.0), r.feasible()))
        .collect()
}

#[test]
fn serialized_subgraph_sweeps_like_the_original() {
    for seed in 0..20 {
        let g = gen_random_graph(15, 0.25, 4, seed).unwrap();
        let h = build_eft_subgraph(&g).unwrap();
        let reloaded = load_subgraph(&g, &h.serialize(&g, &[])).unwrap();
        assert_eq!(reloaded.edge_set, h.edge_set);
        assert_eq!(rows(&g, &h), rows(&g, &reloaded));

        let p = build_perturbed(&g, seed, 4, BuildOptions::default()).unwrap();
        let reloaded = load_subgraph(&g, &p.subgraph.serialize(&g, &[])).unwrap();
        assert_eq!(rows(&g, &p.subgraph), rows(&g, &reloaded));
    }
}

#[test]
fn graph_text_round_trip() {
    let g = gen_random_graph(30, 0.2, 1000, 8).unwrap();
    let again = Graph::parse(&g.to_edge_list()).unwrap();
    assert_eq!(again.edges(), g.edges());
}

#[test]
fn loading_without_tree_line_recomputes_it() {
    let g = gen_random_graph(10, 0.5, 9, 2).unwrap();
    let h = build_eft_subgraph(&g).unwrap();
    let text: String = h.serialize(&g, &[]).lines().filter(|l| !l.starts_with("# tree")).map(|l| format!("{l}\n")).collect();
    let reloaded = load_subgraph(&g, &text).unwrap();
    assert_eq!(reloaded.base_tree.total_cost, h.base_tree.total_cost);
}
