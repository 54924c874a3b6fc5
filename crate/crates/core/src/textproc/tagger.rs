//! Lexicon-plus-rules part-of-speech tagger over Penn Treebank tags.
//!
//! The model is a text table (see `docs/FORMATS.md`): a magic first line,
//! then `word<TAB>TAG[,TAG...]` rows. The first tag of a row is its default.
//! Tagging runs left to right; the previous tag selects among a word's
//! alternatives, and unknown words fall back to suffix rules.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const TAGGER_MAGIC: &str = "#! argmine-tagger v1";

const BUILTIN: &str = include_str!("../../data/tagger.tsv");

#[derive(Clone, Debug)]
pub struct Tagger {
    lexicon: HashMap<String, Vec<String>>,
}

const NOMINAL_CONTEXT: &[&str] = &["DT", "PRP$", "JJ", "JJR", "JJS", "IN", "POS", "CD"];
const SUBJECT_CONTEXT: &[&str] = &["PRP", "NN", "NNS", "NNP", "WP", "WDT", "EX"];

impl Tagger {
    pub fn parse(content: &str) -> Result<Self> {
        let mut lines = content.lines();
        if lines.next().map(str::trim_end) != Some(TAGGER_MAGIC) {
            return Err(Error::Format(format!("tagger model must start with {TAGGER_MAGIC:?}")));
        }
        let mut lexicon = HashMap::new();
        for (n, line) in lines.enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (word, tags) = line.split_once('\t').ok_or_else(|| {
                Error::Format(format!("tagger model line {}: expected word<TAB>tags", n + 2))
            })?;
            let tags: Vec<String> = tags.split(',').map(|t| t.trim().to_string()).collect();
            if tags.iter().any(String::is_empty) {
                return Err(Error::Format(format!("tagger model line {}: empty tag", n + 2)));
            }
            lexicon.insert(word.to_string(), tags);
        }
        Ok(Tagger { lexicon })
    }

    pub fn tag(&self, tokens: &[String]) -> Vec<String> {
        let mut out: Vec<String> = Vec::with_capacity(tokens.len());
        for tok in tokens {
            let prev = out.last().map(String::as_str).unwrap_or("");
            let tag = match self.lexicon.get(tok.as_str()) {
                Some(cands) => choose(cands, prev),
                None => unknown(tok, prev),
            };
            out.push(tag);
        }
        out
    }
}

fn choose(cands: &[String], prev: &str) -> String {
    let find = |want: &[&str]| cands.iter().find(|c| want.contains(&c.as_str())).cloned();
    let picked = if prev == "MD" || prev == "TO" {
        find(&["VB"]).or_else(|| find(&["VBP"]).map(|_| "VB".to_string()))
    } else if SUBJECT_CONTEXT.contains(&prev) {
        find(&["VBZ", "VBP", "VBD", "MD"])
    } else if NOMINAL_CONTEXT.contains(&prev) {
        find(&["NN", "NNS", "JJ"])
    } else {
        None
    };
    picked.unwrap_or_else(|| cands[0].clone())
}

fn unknown(tok: &str, prev: &str) -> String {
    if !tok.chars().any(char::is_alphanumeric) {
        return punct_tag(tok).to_string();
    }
    if tok.chars().all(|c| c.is_ascii_digit()) {
        return "CD".into();
    }
    let n = tok.chars().count();
    if prev == "MD" || prev == "TO" {
        return "VB".into();
    }
    let tag = if tok.ends_with("ing") && n > 4 {
        "VBG"
    } else if tok.ends_with("ed") && n > 3 {
        if SUBJECT_CONTEXT.contains(&prev) { "VBD" } else { "VBN" }
    } else if tok.ends_with("ly") && n > 3 {
        "RB"
    } else if ["tion", "ment", "ness", "ity", "ship"].iter().any(|s| tok.ends_with(s)) {
        "NN"
    } else if ["able", "ible", "ous", "ful", "ive", "less", "ish", "ical"].iter().any(|s| tok.ends_with(s)) {
        "JJ"
    } else if tok.ends_with('s') && !tok.ends_with("ss") && n > 3 {
        if prev == "PRP" { "VBZ" } else { "NNS" }
    } else {
        "NN"
    };
    tag.into()
}

fn punct_tag(tok: &str) -> &'static str {
    match tok {
        "." | "!" | "?" => ".",
        "," => ",",
        ";" | ":" | "-" | "--" => ":",
        "(" | "[" | "{" => "-LRB-",
        ")" | "]" | "}" => "-RRB-",
        "\"" | "'" | "`" => "''",
        "$" => "$",
        "#" => "#",
        t if t.chars().all(|c| c == '.') => ":",
        _ => "SYM",
    }
}

pub fn default_tagger() -> &'static Tagger {
    static TAGGER: OnceLock<Tagger> = OnceLock::new();
    TAGGER.get_or_init(|| Tagger::parse(BUILTIN).expect("built-in tagger model is valid"))
}

/// Tags `tokens` with the built-in model.
pub fn pos_tag(tokens: &[String]) -> Vec<String> {
    default_tagger().tag(tokens)
}
