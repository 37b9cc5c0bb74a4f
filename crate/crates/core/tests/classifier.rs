use kernelguard::classifier::{biased_decision, classify, ClassifierConfig, Prediction};
use kernelguard::corpus::{build_snapshots, snapshot_for, ChangeLabel};
use kernelguard::synth;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn replayed_classifications_are_sound(seed in any::<u64>(), n in 10usize..50) {
        let records = synth::random_corpus(seed, n, 3, "p");
        let series = build_snapshots(records.clone()).unwrap();
        let cfg = ClassifierConfig::default().with_k(5).unwrap();
        for q in &records {
            let snap = snapshot_for(&series, q.timestamp);
            let res = classify(q, &snap, &cfg).unwrap();

            // Only strictly older history is ever consulted.
            prop_assert!(res.matches.iter().all(|m| m.timestamp < q.timestamp));
            prop_assert!(res.matches.len() <= snap.len());

            // Ranks are dense and kernel scores non-increasing.
            for (i, m) in res.matches.iter().enumerate() {
                prop_assert_eq!(m.rank, i + 1);
            }
            prop_assert!(res.matches.windows(2).all(|w| w[0].kernel_score >= w[1].kernel_score));

            // The decision follows the biased rule over the top k labels.
            let labels: Vec<ChangeLabel> = res.matches.iter().map(|m| m.label).collect();
            prop_assert_eq!(res.predicted_label, biased_decision(labels.iter().copied(), 5));
            match &res.flagged_match {
                Some(f) => {
                    let m = res.top_k().iter().find(|m| m.label == ChangeLabel::BugInducing).unwrap();
                    prop_assert_eq!(&f.change_id, &m.change_id);
                }
                None => prop_assert_eq!(res.predicted_label, Prediction::Clean),
            }

            // Growing k can only turn a clean verdict into a flag.
            let mut flagged = false;
            for k in 1..=5 {
                let p = biased_decision(labels.iter().copied(), k);
                prop_assert!(!flagged || p == Prediction::BugInducing);
                flagged = p == Prediction::BugInducing;
            }
        }
    }

    #[test]
    fn k_only_changes_the_decision(seed in any::<u64>()) {
        let records = synth::random_corpus(seed, 30, 2, "p");
        let series = build_snapshots(records.clone()).unwrap();
        let q = records.last().unwrap();
        let snap = snapshot_for(&series, q.timestamp);
        let one = classify(q, &snap, &ClassifierConfig::default()).unwrap();
        let five = classify(q, &snap, &ClassifierConfig::default().with_k(5).unwrap()).unwrap();
        prop_assert_eq!(&one.matches, &five.matches);
        if one.predicted_label == Prediction::BugInducing {
            prop_assert_eq!(five.predicted_label, Prediction::BugInducing);
        }
    }
}
