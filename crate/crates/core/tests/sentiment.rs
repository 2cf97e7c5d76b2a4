use std::collections::HashMap;

use proptest::prelude::*;

use tweetcast::sentiment::{polarity_summary, CharLm, SentimentLabel, SentimentModel, BOS, EOS};
use SentimentLabel::*;

fn corpus_strategy() -> impl Strategy<Value = Vec<(String, SentimentLabel)>> {
    let label = prop_oneof![Just(Positive), Just(Negative), Just(Neutral)];
    prop::collection::vec(("[abcde ]{0,12}", label), 3..30).prop_map(|mut docs| {
        // every category needs at least one document
        for (i, l) in SentimentLabel::ALL.into_iter().enumerate() {
            docs[i].1 = l;
        }
        docs
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kgram_tables_are_prefix_consistent(
        texts in prop::collection::vec("[abc]{0,10}", 1..12),
        order in 1usize..6,
    ) {
        let mut lm = CharLm::new(order);
        for t in &texts {
            lm.train(t);
        }
        let grams: HashMap<Vec<char>, u64> = lm.ngrams().into_iter().collect();
        for (gram, &n) in &grams {
            prop_assert!(n > 0);
            if gram.len() < 2 {
                continue;
            }
            let prefix = &gram[..gram.len() - 1];
            prop_assert!(lm.ngram_count(prefix) >= n, "{:?}", gram);
            prop_assert!(lm.ngram_count(&gram[1..]) >= n, "{:?}", gram);
        }
        // each context not ending the text is continued exactly as often as it occurs
        for (gram, &n) in &grams {
            if gram.len() >= order || gram.last() == Some(&EOS) {
                continue;
            }
            let continued: u64 = grams
                .iter()
                .filter(|(g, _)| g.len() == gram.len() + 1 && g.starts_with(gram))
                .map(|(_, &c)| c)
                .sum();
            prop_assert_eq!(continued, n, "{:?}", gram);
        }
        prop_assert_eq!(lm.ngram_count(&[BOS]), texts.len() as u64);
    }

    #[test]
    fn next_char_distribution_sums_to_one(
        docs in corpus_strategy(),
        history in "[abcdexy ]{0,10}",
        order in 1usize..9,
    ) {
        let model = SentimentModel::train(&docs, order).unwrap();
        let mut framed = vec![BOS];
        framed.extend(history.chars());
        for label in SentimentLabel::ALL {
            let known: f64 = model
                .vocabulary()
                .iter()
                .map(|&c| model.char_prob(label, &framed, Some(c)))
                .sum();
            let total = known + model.char_prob(label, &framed, None);
            prop_assert!((total - 1.0).abs() < 1e-9, "{} sums to {}", label, total);
        }
    }

    #[test]
    fn classification_ignores_training_order(
        docs in corpus_strategy(),
        probes in prop::collection::vec("[abcdez ]{0,15}", 1..8),
        rotation in 0usize..30,
    ) {
        let a = SentimentModel::train(&docs, 4).unwrap();
        let mut shuffled = docs.clone();
        shuffled.reverse();
        let k = rotation % shuffled.len();
        shuffled.rotate_left(k);
        let b = SentimentModel::train(&shuffled, 4).unwrap();
        for p in &probes {
            prop_assert_eq!(a.classify(p), b.classify(p));
            prop_assert_eq!(a.classify(p), a.classify(p));
        }
    }

    #[test]
    fn polarity_ratios_survive_duplication(
        labels in prop::collection::vec(prop_oneof![Just(Positive), Just(Negative), Just(Neutral)], 0..50),
        copies in 2usize..6,
    ) {
        let once = polarity_summary(labels.iter().copied());
        let many = polarity_summary(labels.iter().copied().cycle().take(labels.len() * copies));
        prop_assert_eq!(once.subjectivity, many.subjectivity);
        prop_assert_eq!(once.pn_ratio, many.pn_ratio);
    }
}

/// On a corpus whose categories use disjoint alphabets, duplicating every
/// training document leaves every prediction unchanged.
#[test]
fn duplicating_separable_training_data_keeps_predictions() {
    let alphabets = [
        ("abcdef", Positive),
        ("ghijkl", Negative),
        ("mnopqr", Neutral),
    ];
    let mut docs = Vec::new();
    for (k, (alpha, label)) in alphabets.iter().enumerate() {
        let chars: Vec<char> = alpha.chars().collect();
        for i in 0..(10 + 3 * k) {
            let text: String = (0..8)
                .map(|j| chars[(i * 5 + j * 3) % chars.len()])
                .collect();
            docs.push((text, *label));
        }
    }
    let doubled: Vec<_> = docs.iter().chain(docs.iter()).cloned().collect();
    let a = SentimentModel::train(&docs, 5).unwrap();
    let b = SentimentModel::train(&doubled, 5).unwrap();
    let probes = [
        "abc", "fed", "ghij", "lkj", "mnop", "rq", "ace", "gik", "moq",
    ];
    for p in probes {
        assert_eq!(a.classify(p).label, b.classify(p).label, "{p}");
    }
}

#[test]
fn model_survives_save_and_load() {
    let docs = [
        ("great fun", Positive),
        ("awful bore", Negative),
        ("at noon", Neutral),
    ];
    let model = SentimentModel::train(&docs, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    model.save(&path).unwrap();
    let back = SentimentModel::load(&path).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.classify("fun bore"), model.classify("fun bore"));
}
