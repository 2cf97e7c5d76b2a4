use std::io::Cursor;

use chrono::{DateTime, Duration, TimeZone, Utc};
use proptest::prelude::*;
use unicode_normalization::UnicodeNormalization;

use tweetcast::corpus::{
    extract_flags, parse_instant, read_corpus, window, write_corpus, CorpusFormat, CriticalPeriod,
    KeywordMatcher, Tweet,
};
use tweetcast::features::{rate_timeseries, tweet_rate, weekly_percentages, BucketWidth};
use tweetcast::Error;

fn release() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2009, 12, 18, 0, 0, 0).unwrap()
}

fn tweet(i: usize, t: DateTime<Utc>, text: &str) -> Tweet {
    Tweet {
        id: format!("t{i}"),
        author: format!("u{}", i % 7),
        timestamp: t,
        text: text.to_string(),
    }
}

fn stream(offsets: &[i64], texts: &[String]) -> Vec<Tweet> {
    offsets
        .iter()
        .enumerate()
        .map(|(i, &s)| tweet(i, release() + Duration::seconds(s), &texts[i % texts.len()]))
        .collect()
}

#[test]
fn corpus_round_trips_through_jsonl() {
    let tweets = stream(
        &[-3600, 0, 7200],
        &["hello Avatar".into(), "RT @x: look http://a.b".into()],
    );
    let mut buf = Vec::new();
    write_corpus(&mut buf, &tweets).unwrap();
    let loaded = read_corpus(Cursor::new(buf), "mem.jsonl", CorpusFormat::Jsonl).unwrap();
    assert_eq!(loaded.tweets, tweets);
    assert!(loaded.malformed.is_empty());
}

#[test]
fn malformed_share_over_ten_percent_is_rejected() {
    let good = r#"{"id":"%","author":"a","ts":"2009-12-18T00:00:00Z","text":"ok"}"#;
    let mut lines: Vec<String> = (0..18).map(|i| good.replace('%', &i.to_string())).collect();
    lines.push("{not json".into());
    lines.push(r#"{"id":"x","author":"a","ts":"yesterday","text":"bad time"}"#.into());
    // 2 of 20 malformed: exactly 10% is tolerated
    let ok = read_corpus(Cursor::new(lines.join("\n")), "c", CorpusFormat::Jsonl).unwrap();
    assert_eq!((ok.tweets.len(), ok.malformed.len()), (18, 2));
    lines.push(r#"{"id":"0","author":"a","ts":0,"text":"duplicate id"}"#.into());
    let err = read_corpus(Cursor::new(lines.join("\n")), "c", CorpusFormat::Jsonl).unwrap_err();
    assert!(
        matches!(
            err,
            Error::CorpusQuality {
                malformed: 3,
                total: 21,
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn window_bounds_on_known_dates() {
    let p = CriticalPeriod::around(parse_instant("2009-12-18").unwrap());
    assert_eq!(p.start, parse_instant("2009-12-11").unwrap());
    assert_eq!(p.end, parse_instant("2010-01-01").unwrap());
}

#[test]
fn four_hundred_sixty_two_tweets_over_a_week() {
    let p = CriticalPeriod::around(release());
    let step = Duration::seconds(168 * 3600 / 462);
    let tweets: Vec<Tweet> = (0..462)
        .map(|i| tweet(i, p.start + step * i as i32, "x"))
        .collect();
    assert_eq!(tweet_rate(&tweets, p.start, p.release).unwrap(), 2.75);
}

proptest! {
    #[test]
    fn partition_is_complete(offsets in prop::collection::vec(-20 * 86_400i64..30 * 86_400, 0..300)) {
        let tweets = stream(&offsets, &["x".into()]);
        let p = CriticalPeriod::around(release());
        let part = window(&tweets, &p);
        prop_assert_eq!(part.in_range() + part.excluded, tweets.len());
        for k in 0..3 {
            let (a, b) = p.week_bounds(k);
            prop_assert!(part.week(k).iter().all(|t| t.timestamp >= a && t.timestamp < b));
        }
    }

    #[test]
    fn rate_is_additive(
        offsets in prop::collection::vec(0i64..30 * 86_400, 0..200),
        cut_a in 1i64..10 * 86_400,
        cut_b in 1i64..20 * 86_400,
    ) {
        let tweets = stream(&offsets, &["x".into()]);
        let a = release();
        let b = a + Duration::seconds(cut_a);
        let c = b + Duration::seconds(cut_b);
        let hours = |x: DateTime<Utc>, y: DateTime<Utc>| (y - x).num_seconds() as f64 / 3600.0;
        let lhs = tweet_rate(&tweets, a, c).unwrap() * hours(a, c);
        let rhs = tweet_rate(&tweets, a, b).unwrap() * hours(a, b)
            + tweet_rate(&tweets, b, c).unwrap() * hours(b, c);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn series_counts_cover_window(offsets in prop::collection::vec(-86_400i64..10 * 86_400, 0..200), buckets in 1usize..200) {
        let tweets = stream(&offsets, &["x".into()]);
        let s = rate_timeseries("t", &tweets, release(), buckets, BucketWidth::Hour);
        let end = release() + Duration::hours(buckets as i64);
        let inside = tweets.iter().filter(|t| t.timestamp >= release() && t.timestamp < end).count();
        prop_assert_eq!(s.total() as usize, inside);
    }

    #[test]
    fn percentages_survive_duplication(
        flags in prop::collection::vec((any::<bool>(), any::<bool>()), 0..60),
        copies in 2usize..5,
    ) {
        let texts: Vec<Tweet> = flags
            .iter()
            .enumerate()
            .map(|(i, &(url, rt))| {
                let mut text = String::from("movie talk");
                if rt { text = format!("RT @fan: {text}"); }
                if url { text.push_str(" https://t.co/x"); }
                tweet(i, release(), &text)
            })
            .collect();
        let once: Vec<&Tweet> = texts.iter().collect();
        let many: Vec<&Tweet> = texts.iter().cycle().take(texts.len() * copies).collect();
        let a = weekly_percentages([&once, &[], &once]);
        let b = weekly_percentages([&many, &[], &many]);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn matching_ignores_case_and_normal_form(
        prefix in "[a-z ]{0,12}",
        suffix in "[a-z !?]{0,12}",
        upper in any::<bool>(),
    ) {
        // "Amélie" in composed form as the keyword
        let keyword = "am\u{e9}lie";
        let m = KeywordMatcher::new(&[keyword]);
        let base = format!("{prefix} am\u{e9}lie {suffix}");
        let variants = [
            base.clone(),
            base.nfd().collect::<String>(),
            if upper { base.to_uppercase() } else { base.nfd().collect::<String>().to_uppercase() },
        ];
        for v in &variants {
            prop_assert!(m.is_match(v), "{:?}", v);
        }
        let decomposed = KeywordMatcher::new(&["ame\u{301}lie"]);
        prop_assert!(decomposed.is_match(&base));
    }

    #[test]
    fn flags_are_pure(text in "\\PC{0,80}") {
        let a = tweet(0, release(), &text);
        let b = tweet(1, release() + Duration::days(3), &text);
        prop_assert_eq!(extract_flags(&a), extract_flags(&b));
    }
}
