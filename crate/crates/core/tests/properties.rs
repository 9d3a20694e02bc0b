use proptest::prelude::*;

use walkscale_core::embed::{complete_count, graph_walk_density};
use walkscale_core::motif::{brute_force_walk_census, cycle_count_mitm, cycle_counts_dfs, scale_summaries};
use walkscale_core::netbuild::{osa_within, MessageRecord, WindowSpec};
use walkscale_core::sampler::replicate_count;
use walkscale_core::{
    aggregate_url_network, census, closed_walk_count, ind_count, restricted_damerau_levenshtein, subgraph_count,
    windowed_similarity_network, Graph,
};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut it = bits.into_iter();
            for a in 0..n {
                for b in a + 1..n {
                    if it.next().unwrap() {
                        edges.push((a, b));
                    }
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

/// Plain recursive OSA distance, exponential but obviously correct on short inputs.
fn osa_reference(a: &[char], b: &[char]) -> usize {
    match (a.len(), b.len()) {
        (0, m) => m,
        (n, 0) => n,
        (n, m) => {
            let sub = usize::from(a[n - 1] != b[m - 1]);
            let mut best = (osa_reference(&a[..n - 1], b) + 1)
                .min(osa_reference(a, &b[..m - 1]) + 1)
                .min(osa_reference(&a[..n - 1], &b[..m - 1]) + sub);
            if n > 1 && m > 1 && a[n - 1] == b[m - 2] && a[n - 2] == b[m - 1] {
                best = best.min(osa_reference(&a[..n - 2], &b[..m - 2]) + 1);
            }
            best
        }
    }
}

fn short_text() -> impl Strategy<Value = String> {
    "[ab c]{0,6}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shape_counts_partition_closed_walks(g in graph(8), k in 2usize..=7) {
        let total: u128 = census(k).unwrap().shapes().iter().map(|s| ind_count(s, &g, k).unwrap()).sum();
        prop_assert_eq!(total, closed_walk_count(&g, k).unwrap());
    }

    #[test]
    fn ind_counts_match_walk_enumeration(g in graph(7), k in 3usize..=6) {
        for (shape, count) in brute_force_walk_census(&g, k).unwrap() {
            prop_assert_eq!(ind_count(&shape, &g, k).unwrap(), count, "{}", shape.name);
        }
    }

    #[test]
    fn cycle_counters_agree(g in graph(9)) {
        let dfs = cycle_counts_dfs(&g, 8);
        for k in 3..=8 {
            prop_assert_eq!(cycle_count_mitm(&g, k).unwrap(), dfs[k]);
        }
    }

    #[test]
    fn walk_density_lies_in_unit_interval(g in graph(8), k in 3usize..=6) {
        for f in census(k).unwrap().shapes().iter().filter(|f| f.v <= g.n()) {
            let d = graph_walk_density(f, &g).unwrap();
            prop_assert!(*d.numer() <= *d.denom());
            prop_assert_eq!(subgraph_count(f, &g).unwrap() <= complete_count(f, g.n()).unwrap(), true);
        }
    }

    #[test]
    fn scale_summaries_lie_in_unit_interval(g in graph(10)) {
        for t in scale_summaries(&g, g.n().min(6)).unwrap() {
            prop_assert!((0.0..=1.0).contains(&t));
        }
    }

    #[test]
    fn banded_osa_matches_reference(a in short_text(), b in short_text(), max in 0usize..8) {
        let (ac, bc): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let d = osa_reference(&ac, &bc);
        prop_assert_eq!(restricted_damerau_levenshtein(&a, &b), d);
        prop_assert_eq!(osa_within(&ac, &bc, max), (d <= max).then_some(d));
    }

    #[test]
    fn osa_is_symmetric_with_zero_diagonal(a in "\\PC{0,12}", b in "\\PC{0,12}") {
        prop_assert_eq!(restricted_damerau_levenshtein(&a, &b), restricted_damerau_levenshtein(&b, &a));
        prop_assert_eq!(restricted_damerau_levenshtein(&a, &a), 0);
    }

    #[test]
    fn url_network_grows_with_time(
        posts in proptest::collection::vec((0usize..6, 0u32..100, 0usize..4), 0..25),
        t1 in 0u32..100,
        t2 in 0u32..100,
    ) {
        let records: Vec<MessageRecord> = posts
            .iter()
            .map(|&(u, t, l)| MessageRecord { user: format!("u{u}"), timestamp: t as f64, text: String::new(), urls: vec![format!("l{l}")] })
            .collect();
        let (lo, hi) = (t1.min(t2) as f64, t1.max(t2) as f64);
        let pairs = |g: &Graph| -> std::collections::BTreeSet<(String, String)> {
            g.edges().iter().map(|&(a, b)| (g.label(a as usize), g.label(b as usize))).collect()
        };
        let early = aggregate_url_network(&records, lo).unwrap();
        let late = aggregate_url_network(&records, hi).unwrap();
        prop_assert!(pairs(&early).is_subset(&pairs(&late)));
    }

    #[test]
    fn similarity_network_grows_with_threshold(
        posts in proptest::collection::vec((0usize..5, short_text()), 0..12),
        m1 in 0usize..5,
        m2 in 0usize..5,
    ) {
        let records: Vec<MessageRecord> = posts
            .iter()
            .enumerate()
            .map(|(i, (u, text))| MessageRecord { user: format!("u{u}"), timestamp: i as f64, text: text.clone(), urls: vec![] })
            .collect();
        let window = WindowSpec::new(0.0, 100.0).unwrap();
        let pairs = |g: &Graph| -> std::collections::BTreeSet<(String, String)> {
            g.edges().iter().map(|&(a, b)| (g.label(a as usize), g.label(b as usize))).collect()
        };
        let tight = windowed_similarity_network(&records, window, m1.min(m2)).unwrap();
        let loose = windowed_similarity_network(&records, window, m1.max(m2)).unwrap();
        prop_assert!(pairs(&tight).is_subset(&pairs(&loose)));
    }

    #[test]
    fn replicate_count_shrinks_as_alpha_grows(a in 0.01f64..0.45, d in 0.001f64..0.04, k in 3usize..=9) {
        prop_assert!(replicate_count(a + d, k).unwrap() <= replicate_count(a, k).unwrap());
        if k < 9 {
            prop_assert!(replicate_count(a, k).unwrap() <= replicate_count(a, k + 1).unwrap());
        }
    }
}
