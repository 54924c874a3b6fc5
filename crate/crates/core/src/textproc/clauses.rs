//! Shallow stand-ins for parse-tree features.

use serde::{Deserialize, Serialize};

use super::{is_punct, is_verb_tag, Lexicons, TokenizedMove};

/// Subordinating words that open a sub-clause.
pub const CLAUSE_OPENERS: &[&str] = &[
    "because", "although", "if", "since", "while", "that", "which", "who", "when",
];

const WINDOW: usize = 6;

/// Sub-clause count per sentence: openers followed within six tokens by a
/// verb. The look-ahead stops at punctuation or at the next opener, so each
/// verb is credited to the nearest opener before it.
pub fn clause_count(mv: &TokenizedMove, _lex: &Lexicons) -> Vec<usize> {
    (0..mv.sentences.len())
        .map(|s| {
            let toks = mv.sentence_tokens(s);
            let tags = mv.sentence_tags(s);
            (0..toks.len())
                .filter(|&i| CLAUSE_OPENERS.contains(&toks[i].as_str()))
                .filter(|&i| {
                    for j in i + 1..toks.len().min(i + 1 + WINDOW) {
                        if is_punct(&toks[j]) || CLAUSE_OPENERS.contains(&toks[j].as_str()) {
                            return false;
                        }
                        if is_verb_tag(&tags[j]) {
                            return true;
                        }
                    }
                    false
                })
                .count()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tense {
    Past,
    Present,
    ModalFuture,
    None,
}

/// Tense of the first verb-group tag in a sentence.
pub fn main_verb_tense(tags: &[String]) -> Tense {
    for t in tags {
        match t.as_str() {
            "VBD" | "VBN" => return Tense::Past,
            "VBP" | "VBZ" | "VBG" | "VB" => return Tense::Present,
            "MD" => return Tense::ModalFuture,
            _ => {}
        }
    }
    Tense::None
}
