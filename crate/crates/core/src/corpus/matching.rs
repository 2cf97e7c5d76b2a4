use unicode_normalization::UnicodeNormalization;

use super::{TopicSpec, Tweet};

/// NFC, lowercase, runs of whitespace collapsed to one space, trimmed.
pub(crate) fn normalize(text: &str) -> String {
    let lowered: String = text.nfc().collect::<String>().to_lowercase();
    lowered.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

#[derive(Clone, Debug)]
struct Keyword {
    text: String,
    // single-word keywords must sit on word boundaries
    bounded: bool,
}

/// Case- and NFC-insensitive keyword matcher for one topic.
#[derive(Clone, Debug)]
pub struct KeywordMatcher {
    // longest first, so a phrase wins over a word it contains
    keywords: Vec<Keyword>,
}

impl KeywordMatcher {
    pub fn new<S: AsRef<str>>(keywords: &[S]) -> Self {
        let mut keywords: Vec<Keyword> = keywords
            .iter()
            .map(|k| normalize(k.as_ref()))
            .filter(|k| !k.is_empty())
            .map(|text| Keyword {
                bounded: !text.contains(' '),
                text,
            })
            .collect();
        keywords.sort_by(|a, b| b.text.len().cmp(&a.text.len()).then(a.text.cmp(&b.text)));
        keywords.dedup_by(|a, b| a.text == b.text);
        KeywordMatcher { keywords }
    }

    pub fn for_topic(topic: &TopicSpec) -> Self {
        Self::new(&topic.keywords)
    }

    /// Length in bytes of the keyword matching at byte offset `at` of a
    /// normalized string, if any.
    fn match_at(&self, normalized: &str, at: usize) -> Option<usize> {
        let before_ok = normalized[..at]
            .chars()
            .next_back()
            .is_none_or(|c| !is_word_char(c));
        let rest = &normalized[at..];
        self.keywords.iter().find_map(|kw| {
            if !rest.starts_with(&kw.text) {
                return None;
            }
            if kw.bounded {
                let after_ok = rest[kw.text.len()..]
                    .chars()
                    .next()
                    .is_none_or(|c| !is_word_char(c));
                if !(before_ok && after_ok) {
                    return None;
                }
            }
            Some(kw.text.len())
        })
    }

    pub fn is_match(&self, text: &str) -> bool {
        let normalized = normalize(text);
        self.is_match_normalized(&normalized)
    }

    pub(crate) fn is_match_normalized(&self, normalized: &str) -> bool {
        normalized
            .char_indices()
            .any(|(i, _)| self.match_at(normalized, i).is_some())
    }

    /// Replaces every keyword occurrence in an already-normalized string
    /// with ` token `.
    pub(crate) fn replace_normalized(&self, normalized: &str, token: &str) -> String {
        let mut out = String::with_capacity(normalized.len());
        let mut i = 0;
        while i < normalized.len() {
            if let Some(len) = self.match_at(normalized, i) {
                out.push(' ');
                out.push_str(token);
                out.push(' ');
                i += len;
            } else {
                let c = normalized[i..].chars().next().expect("in bounds");
                out.push(c);
                i += c.len_utf8();
            }
        }
        out
    }
}

/// True iff any of the topic's keywords occurs in the tweet text.
pub fn match_topic(tweet: &Tweet, topic: &TopicSpec) -> bool {
    KeywordMatcher::for_topic(topic).is_match(&tweet.text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matches(text: &str, kw: &str) -> bool {
        KeywordMatcher::new(&[kw]).is_match(text)
    }

    #[test]
    fn single_words_respect_boundaries() {
        assert!(matches("Watched Avatar tonight", "avatar"));
        assert!(!matches("avatars are cool", "avatar"));
        assert!(!matches("myavatar", "avatar"));
        assert!(matches("#avatar!", "avatar"));
        assert!(matches("AVATAR", "Avatar"));
    }

    #[test]
    fn phrases_match_as_substrings_with_whitespace_normalized() {
        assert!(matches("the book of eli rocks", "book of eli"));
        assert!(matches("The Book   of\tEli", "book of eli"));
        assert!(!matches("the book of life", "book of eli"));
    }

    #[test]
    fn matching_ignores_unicode_composition() {
        let composed = "Amélie tonight";
        let decomposed = "Ame\u{301}lie tonight";
        assert!(matches(composed, "amélie"));
        assert!(matches(decomposed, "amélie"));
        assert!(matches(composed, "ame\u{301}lie"));
    }

    #[test]
    fn phrase_oracle_agrees_with_naive_search() {
        // independent route: pad with spaces and look for the phrase in the
        // lowercased, whitespace-split text
        let cases = [
            ("the book of eli rocks", "book of eli"),
            ("book of eli", "book of eli"),
            ("a book on eli", "book of eli"),
            ("BOOK OF ELI!!", "book of eli"),
        ];
        for (text, kw) in cases {
            let words: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
            let oracle = words.join(" ").contains(kw);
            assert_eq!(matches(text, kw), oracle, "{text}");
        }
    }

    #[test]
    fn replacement_prefers_longest_keyword() {
        let m = KeywordMatcher::new(&["eli", "book of eli"]);
        let out = m.replace_normalized("the book of eli and eli", "MOV");
        assert_eq!(
            out.split_whitespace().collect::<Vec<_>>(),
            ["the", "MOV", "and", "MOV"]
        );
    }
}
