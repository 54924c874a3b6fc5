use std::ops::Range;

use super::Lexicons;

const CLITICS: &[&str] = &["s", "t", "re", "ve", "ll", "d", "m"];

/// Lowercased word and punctuation tokens.
///
/// Clitics split at the apostrophe and keep it (`he's` -> `he`, `'s`). Runs of
/// periods form one token; every other non-alphanumeric character is its own
/// token.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower: Vec<char> = text
        .to_lowercase()
        .chars()
        .map(|c| match c {
            '\u{2019}' | '\u{2018}' | '\u{02bc}' => '\'',
            c => c,
        })
        .collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < lower.len() {
        let c = lower[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() {
            let start = i;
            while i < lower.len() && lower[i].is_alphanumeric() {
                i += 1;
            }
            tokens.push(lower[start..i].iter().collect());
        } else if c == '\'' {
            let start = i + 1;
            let mut end = start;
            while end < lower.len() && lower[end].is_alphanumeric() {
                end += 1;
            }
            let run: String = lower[start..end].iter().collect();
            if end > start && CLITICS.contains(&run.as_str()) {
                tokens.push(format!("'{run}"));
                i = end;
            } else {
                tokens.push("'".to_string());
                i += 1;
            }
        } else if c == '.' {
            let start = i;
            while i < lower.len() && lower[i] == '.' {
                i += 1;
            }
            tokens.push(lower[start..i].iter().collect());
        } else {
            tokens.push(c.to_string());
            i += 1;
        }
    }
    tokens
}

pub fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

pub fn is_punct(token: &str) -> bool {
    !token.is_empty() && !is_word(token)
}

fn is_terminator(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| matches!(c, '.' | '!' | '?'))
}

/// Sentence ranges over `tokens`. A sentence ends after a run of `.`, `!`
/// or `?` tokens, except for a single period after a known abbreviation.
/// The ranges partition `0..tokens.len()`.
pub fn split_sentences(tokens: &[String], lex: &Lexicons) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        let guarded = t == "." && i > 0 && lex.abbreviations.contains(&tokens[i - 1]);
        if is_terminator(t) && !guarded {
            while i + 1 < tokens.len() && is_terminator(&tokens[i + 1]) {
                i += 1;
            }
            out.push(start..i + 1);
            start = i + 1;
        }
        i += 1;
    }
    if start < tokens.len() {
        out.push(start..tokens.len());
    }
    out
}
