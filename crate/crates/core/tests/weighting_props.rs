mod support;

use nerctx_core::{build_weight_table, ContextConfig, Document, Side, WeightConfig};
use proptest::prelude::*;

use support::gen::{corpus, examples};
use support::oracle::{compare_with_library, ulps};

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn table_matches_brute_force(docs in corpus(), ex in examples(), len in 1usize..=3, side in side(), min in 1u64..=2) {
        if let Err(msg) = compare_with_library(&docs, &ex, len, side, min) {
            prop_assert!(false, "{}", msg);
        }
    }

    #[test]
    fn cf_sums_to_one(docs in corpus(), ex in examples(), len in 1usize..=3) {
        let config = WeightConfig { context: ContextConfig { length: len, side: Side::Left }, min_count: 1 };
        if let Ok(table) = build_weight_table(&docs, &ex, &config) {
            let sum: f64 = table.rows().iter().map(|r| r.cf).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9, "sum of cf = {}", sum);
            let hits: u64 = table.rows().iter().map(|r| r.stats.example_hits).sum();
            prop_assert_eq!(hits, table.global().total_example_hits);
        }
    }

    #[test]
    fn weight_is_product_of_factors(docs in corpus(), ex in examples()) {
        if let Ok(table) = build_weight_table(&docs, &ex, &WeightConfig::default()) {
            let g = table.global();
            for r in table.rows() {
                prop_assert!(ulps(r.w, r.cf * r.lef * r.df * r.icf) <= 4);
                let s = &r.stats;
                prop_assert_eq!(r.cf, s.example_hits as f64 / g.total_example_hits as f64);
                prop_assert_eq!(r.lef, s.distinct_examples as f64 / g.learning_examples as f64);
                prop_assert_eq!(r.df, s.distinct_sources as f64 / s.documents as f64);
                prop_assert_eq!(r.icf, s.example_hits as f64 / s.other_hits.max(1) as f64);
                prop_assert!(s.distinct_sources <= s.documents);
                prop_assert!(s.distinct_examples <= g.learning_examples);
                prop_assert!(s.example_hits >= 1);
            }
        }
    }

    #[test]
    fn document_order_does_not_matter(docs in corpus(), ex in examples(), seed in any::<u64>()) {
        let mut shuffled: Vec<Document> = docs.clone();
        // Deterministic Fisher-Yates driven by the seed.
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let a = build_weight_table(&docs, &ex, &WeightConfig::default());
        let b = build_weight_table(&shuffled, &ex, &WeightConfig::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn doubling_with_disjoint_sources(docs in corpus(), ex in examples()) {
        let copy: Vec<Document> = docs
            .iter()
            .map(|d| {
                let uri = d.uri.replace("http://", "http://mirror.");
                Document::from_raw(&format!("{}-copy", d.id), &uri, d.clean.as_bytes(), d.kind).unwrap()
            })
            .collect();
        let doubled: Vec<Document> = docs.iter().cloned().chain(copy).collect();
        let (Ok(one), Ok(two)) = (
            build_weight_table(&docs, &ex, &WeightConfig::default()),
            build_weight_table(&doubled, &ex, &WeightConfig::default()),
        ) else {
            return Ok(());
        };
        prop_assert_eq!(one.len(), two.len());
        for r in one.rows() {
            let d = two.get(r.context()).unwrap();
            prop_assert_eq!(d.stats.example_hits, 2 * r.stats.example_hits);
            prop_assert_eq!(d.stats.other_hits, 2 * r.stats.other_hits);
            prop_assert_eq!(d.stats.documents, 2 * r.stats.documents);
            prop_assert_eq!(d.stats.distinct_sources, 2 * r.stats.distinct_sources);
            prop_assert_eq!(d.cf, r.cf);
            prop_assert_eq!(d.lef, r.lef);
            prop_assert_eq!(d.df, r.df);
            if r.stats.other_hits > 0 {
                prop_assert_eq!(d.icf, r.icf);
            } else {
                // The floored denominator stays at 1, so icf doubles with the hits.
                prop_assert_eq!(d.icf, 2.0 * r.icf);
            }
        }
    }

    #[test]
    fn idf_of_ubiquitous_term_is_zero(n in 1u64..1_000_000) {
        prop_assert_eq!(nerctx_core::weighting::idf(n, n).unwrap(), 0.0);
    }
}
