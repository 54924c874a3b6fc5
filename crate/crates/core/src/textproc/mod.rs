//! Tokenization, sentence splitting, part-of-speech tagging and the shallow
//! clause heuristics shared by both feature extractors.

mod chars;
mod clauses;
mod lexicon;
mod tagger;
mod tokenize;

use std::ops::Range;

pub use chars::{alphabet_char, normalize_chars, ALPHABET, ALPHABET_SIZE};
pub use clauses::{clause_count, main_verb_tense, Tense, CLAUSE_OPENERS};
pub use lexicon::{LexiconSet, Lexicons};
pub use tagger::{default_tagger, pos_tag, Tagger, TAGGER_MAGIC};
pub use tokenize::{is_punct, is_word, split_sentences, tokenize};

/// A move after tokenization, sentence splitting and tagging.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenizedMove {
    pub tokens: Vec<String>,
    pub sentences: Vec<Range<usize>>,
    pub pos_tags: Vec<String>,
    /// Words whose first character was uppercase in the raw text.
    pub capitalized: usize,
}

impl TokenizedMove {
    pub fn sentence_tokens(&self, i: usize) -> &[String] {
        &self.tokens[self.sentences[i].clone()]
    }

    pub fn sentence_tags(&self, i: usize) -> &[String] {
        &self.pos_tags[self.sentences[i].clone()]
    }

    pub fn word_tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str).filter(|t| is_word(t))
    }
}

/// Runs the full pipeline on one move text.
pub fn analyze(text: &str, tagger: &Tagger, lex: &Lexicons) -> TokenizedMove {
    let tokens = tokenize(text);
    let sentences = split_sentences(&tokens, lex);
    let pos_tags = tagger.tag(&tokens);
    let capitalized = text
        .split_whitespace()
        .filter(|w| w.chars().next().is_some_and(char::is_uppercase))
        .count();
    TokenizedMove {
        tokens,
        sentences,
        pos_tags,
        capitalized,
    }
}

pub fn is_verb_tag(tag: &str) -> bool {
    matches!(tag, "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" | "MD")
}
