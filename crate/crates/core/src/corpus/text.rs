//! Unicode helpers shared by rule matching and the content statistics.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases and NFC-normalizes a hashtag, dropping any leading `#`.
pub fn normalize_hashtag(tag: &str) -> String {
    tag.trim()
        .trim_start_matches('#')
        .nfc()
        .collect::<String>()
        .to_lowercase()
}

/// Case- and accent-insensitive form of `text`.
///
/// Decomposes to NFD, strips combining marks (Greek tonos, dialytika, Latin
/// acute etc.), lowercases and maps final sigma `ς` onto `σ`. So
/// `"Υποκλοπές"` and `"υποκλοπεσ"` fold to the same string.
pub fn fold(text: &str) -> String {
    text.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .map(|c| if c == 'ς' { 'σ' } else { c })
        .collect()
}

/// Hashtags appearing in free text, normalized with [`normalize_hashtag`].
pub fn extract_hashtags(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let mut rest = token;
        while let Some(pos) = rest.find('#') {
            let tail = &rest[pos + '#'.len_utf8()..];
            let end = tail
                .char_indices()
                .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || is_combining_mark(*c)))
                .map_or(tail.len(), |(i, _)| i);
            if end > 0 {
                let tag = normalize_hashtag(&tail[..end]);
                if !out.contains(&tag) {
                    out.push(tag);
                }
            }
            rest = &tail[end..];
        }
    }
    out
}

/// Word tokens of a post: whitespace-separated URLs, `@mentions` and
/// `#hashtags` are skipped, the remainder is split on non-letter boundaries
/// and folded.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if chunk.starts_with('@')
            || chunk.starts_with('#')
            || chunk.starts_with("http://")
            || chunk.starts_with("https://")
            || chunk.starts_with("www.")
        {
            continue;
        }
        let folded = fold(chunk);
        out.extend(
            folded
                .split(|c: char| !c.is_alphabetic())
                .filter(|w| !w.is_empty())
                .map(str::to_owned),
        );
    }
    out
}
