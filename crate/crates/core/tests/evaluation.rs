use std::collections::HashMap;

use kernelguard::evaluation::{
    f_score_and_accuracy, mean_average_precision, mean_reciprocal_rank, precision_at_k, run_clone_eval,
    run_defect_eval, CloneEvalConfig, CloneScope, ConfusionCounts, DefectEvalConfig, RankedList,
};
use kernelguard::kernels::KernelConfig;
use kernelguard::synth;
use proptest::prelude::*;

fn arb_lists() -> impl Strategy<Value = Vec<Vec<bool>>> {
    prop::collection::vec(prop::collection::vec(any::<bool>(), 0..15), 1..20)
}

fn lists_of(rel: &[Vec<bool>]) -> Vec<RankedList> {
    rel.iter()
        .enumerate()
        .map(|(i, r)| RankedList::from_relevance(format!("q{i}"), r))
        .collect()
}

/// Relevant totals equal to the retrieved count plus `missing` per query,
/// keeping only queries with a positive total.
fn with_totals(rel: &[Vec<bool>], missing: usize) -> (Vec<RankedList>, HashMap<String, usize>) {
    let lists: Vec<RankedList> = lists_of(rel)
        .into_iter()
        .filter(|l| l.entries.iter().any(|e| e.1) || missing > 0)
        .collect();
    let totals = lists
        .iter()
        .map(|l| (l.query_id.clone(), l.entries.iter().filter(|e| e.1).count() + missing))
        .collect();
    (lists, totals)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metrics_stay_in_unit_interval(rel in arb_lists(), k in 1usize..12, missing in 0usize..3) {
        let lists = lists_of(&rel);
        let p = precision_at_k(&lists, k).unwrap();
        let mrr = mean_reciprocal_rank(&lists).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=1.0).contains(&mrr));
        let (lists, totals) = with_totals(&rel, missing);
        if !lists.is_empty() {
            let map = mean_average_precision(&lists, &totals).unwrap();
            prop_assert!((0.0..=1.0).contains(&map));
        }
    }

    #[test]
    fn query_order_does_not_matter(
        (rel, shuffled) in arb_lists().prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
        k in 1usize..12,
    ) {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        let (a, b) = (lists_of(&rel), lists_of(&shuffled));
        prop_assert!(close(precision_at_k(&a, k).unwrap(), precision_at_k(&b, k).unwrap()));
        prop_assert!(close(mean_reciprocal_rank(&a).unwrap(), mean_reciprocal_rank(&b).unwrap()));
        let (la, ta) = with_totals(&rel, 1);
        let (lb, tb) = with_totals(&shuffled, 1);
        // Ids differ after shuffling, so compare through each list's own totals.
        prop_assert!(close(
            mean_average_precision(&la, &ta).unwrap(),
            mean_average_precision(&lb, &tb).unwrap()
        ));
    }

    #[test]
    fn single_relevant_item_makes_map_equal_mrr(
        shapes in prop::collection::vec((1usize..15).prop_flat_map(|n| (Just(n), 0..n)), 1..20),
    ) {
        let rel: Vec<Vec<bool>> = shapes
            .iter()
            .map(|&(n, pos)| (0..n).map(|i| i == pos).collect())
            .collect();
        let lists = lists_of(&rel);
        let totals = lists.iter().map(|l| (l.query_id.clone(), 1)).collect();
        let map = mean_average_precision(&lists, &totals).unwrap();
        let mrr = mean_reciprocal_rank(&lists).unwrap();
        prop_assert!((map - mrr).abs() < 1e-12);
    }

    #[test]
    fn precision_at_one_is_top_hit_rate(rel in arb_lists()) {
        let lists = lists_of(&rel);
        let hits = rel.iter().filter(|r| r.first() == Some(&true)).count();
        prop_assert!((precision_at_k(&lists, 1).unwrap() - hits as f64 / rel.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn map_is_one_exactly_when_relevant_items_lead(rel in arb_lists()) {
        let (lists, totals) = with_totals(&rel, 0);
        prop_assume!(!lists.is_empty());
        let map = mean_average_precision(&lists, &totals).unwrap();
        let perfect = lists.iter().all(|l| {
            let first_miss = l.entries.iter().position(|e| !e.1).unwrap_or(l.entries.len());
            l.entries[first_miss..].iter().all(|e| !e.1)
        });
        prop_assert_eq!(perfect, (map - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_score_and_accuracy_in_range(tp in 0usize..50, fp in 0usize..50, tn in 0usize..50, fn_ in 0usize..50) {
        prop_assume!(tp + fp + tn + fn_ > 0);
        let (f, acc) = f_score_and_accuracy(ConfusionCounts::new(tp, fp, tn, fn_));
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((0.0..=1.0).contains(&acc));
    }
}

#[test]
fn planted_history_scores_perfectly() {
    let corpus = synth::planted_corpus(7, 40, "planted");
    let cfg = DefectEvalConfig {
        evaluate_from: Some(corpus.queries_from),
        ..Default::default()
    };
    let report = run_defect_eval(corpus.records, &cfg).unwrap();
    let m = &report.projects["planted"];
    assert_eq!(m.query_count, 40);
    assert_eq!(m.topk_accuracy[&1], 1.0);
    assert_eq!((m.mrr, m.f_score, m.accuracy), (Some(1.0), Some(1.0), Some(1.0)));
    assert_eq!(report.time_violations, 0);
}

#[test]
fn random_history_is_time_safe() {
    for seed in 0..3 {
        let report = run_defect_eval(synth::random_corpus(seed, 150, 12, "p"), &DefectEvalConfig::default()).unwrap();
        assert_eq!(report.time_violations, 0);
        assert_eq!(report.outcomes.len(), 150);
        let m = &report.projects["p"];
        for v in m.values() {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn synthetic_clone_bench_ranks_true_clones_first() {
    let bench = synth::clone_bench(3, 5, 5, 4);
    for scope in [CloneScope::InterProjectByFunctionality, CloneScope::IntraProject, CloneScope::ByCloneType] {
        let report = run_clone_eval(&bench, &CloneEvalConfig::new(KernelConfig::default(), scope)).unwrap();
        assert!(!report.groups.is_empty(), "{scope}");
        for v in report.overall.values() {
            assert!((0.0..=1.0).contains(&v), "{scope}");
        }
    }
    let by_fn = run_clone_eval(
        &bench,
        &CloneEvalConfig::new(KernelConfig::default(), CloneScope::InterProjectByFunctionality),
    )
    .unwrap();
    assert_eq!(by_fn.groups.len(), 5);
    assert!(by_fn.overall.map.unwrap() > 0.9, "{:?}", by_fn.overall);
}
