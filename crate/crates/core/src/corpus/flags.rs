use serde::Serialize;

use super::Tweet;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TweetFlags {
    pub has_url: bool,
    pub is_retweet: bool,
    pub mentions: Vec<String>,
}

pub(crate) fn is_url_token(token: &str) -> bool {
    let head: String = token
        .chars()
        .take(8)
        .collect::<String>()
        .to_ascii_lowercase();
    head.starts_with("http://") || head.starts_with("https://")
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Byte ranges of `@handle` mentions, `@` included. The `@` must not follow a
/// handle character, so e-mail addresses are not mentions.
pub(crate) fn mention_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut prev: Option<char> = None;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c == '@' && !prev.is_some_and(is_handle_char) {
            let start = i;
            let mut end = i + 1;
            while let Some(&(j, d)) = iter.peek() {
                if !is_handle_char(d) {
                    break;
                }
                end = j + d.len_utf8();
                iter.next();
            }
            if end > start + 1 {
                spans.push((start, end));
            }
            prev = text[..end].chars().next_back();
            continue;
        }
        prev = Some(c);
    }
    spans
}

fn is_retweet(text: &str) -> bool {
    let lower = text.to_ascii_lowercase();
    lower.starts_with("rt @") || lower.contains(" rt @")
}

/// Syntactic URL, retweet and mention markers of a tweet.
pub fn extract_flags(tweet: &Tweet) -> TweetFlags {
    flags_of(&tweet.text)
}

pub(crate) fn flags_of(text: &str) -> TweetFlags {
    TweetFlags {
        has_url: text.split_whitespace().any(is_url_token),
        is_retweet: is_retweet(text),
        mentions: mention_spans(text)
            .into_iter()
            .map(|(s, e)| text[s + 1..e].to_string())
            .collect(),
    }
}
