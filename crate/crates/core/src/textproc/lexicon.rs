use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A set of lowercase entries. Entries containing spaces are matched as
/// token sequences by [`LexiconSet::count_in`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexiconSet {
    words: HashSet<String>,
    phrases: Vec<Vec<String>>,
}

impl LexiconSet {
    /// Parses the plain-text lexicon format: UTF-8, one lowercase entry per
    /// line, `#` starts a comment.
    pub fn parse(name: &str, content: &str) -> Result<Self> {
        let mut set = LexiconSet::default();
        for (n, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.chars().any(char::is_uppercase) {
                return Err(Error::Format(format!(
                    "lexicon {name}, line {}: entry {line:?} is not lowercase",
                    n + 1
                )));
            }
            if line.contains(char::is_whitespace) {
                set.phrases
                    .push(line.split_whitespace().map(str::to_string).collect());
            } else {
                set.words.insert(line.to_string());
            }
        }
        if set.is_empty() {
            return Err(Error::Format(format!("lexicon {name} is empty")));
        }
        Ok(set)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len() + self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of single-word hits plus non-overlapping phrase hits.
    pub fn count_in(&self, tokens: &[String]) -> usize {
        let words = tokens.iter().filter(|t| self.words.contains(t.as_str())).count();
        let mut phrases = 0;
        for p in &self.phrases {
            let mut i = 0;
            while i + p.len() <= tokens.len() {
                if tokens[i..i + p.len()] == p[..] {
                    phrases += 1;
                    i += p.len();
                } else {
                    i += 1;
                }
            }
        }
        words + phrases
    }

    pub fn entries(&self) -> impl Iterator<Item = String> + '_ {
        self.words.iter().cloned().chain(self.phrases.iter().map(|p| p.join(" ")))
    }
}

/// Word lists consumed by the feature extractors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicons {
    pub argument_words: LexiconSet,
    pub discourse_connectives: LexiconSet,
    pub modal_verbs: LexiconSet,
    pub pronouns: LexiconSet,
    pub first_person_singular: LexiconSet,
    pub polar_words: LexiconSet,
    pub stopwords: LexiconSet,
    pub abbreviations: LexiconSet,
    pub argumentative_subjects: LexiconSet,
}

const FILES: [&str; 9] = [
    "argument_words",
    "discourse_connectives",
    "modal_verbs",
    "pronouns",
    "first_person_singular",
    "polar_words",
    "stopwords",
    "abbreviations",
    "argumentative_subjects",
];

const BUILTIN: [&str; 9] = [
    include_str!("../../data/lexicons/argument_words.txt"),
    include_str!("../../data/lexicons/discourse_connectives.txt"),
    include_str!("../../data/lexicons/modal_verbs.txt"),
    include_str!("../../data/lexicons/pronouns.txt"),
    include_str!("../../data/lexicons/first_person_singular.txt"),
    include_str!("../../data/lexicons/polar_words.txt"),
    include_str!("../../data/lexicons/stopwords.txt"),
    include_str!("../../data/lexicons/abbreviations.txt"),
    include_str!("../../data/lexicons/argumentative_subjects.txt"),
];

impl Lexicons {
    fn from_contents(contents: [&str; 9]) -> Result<Self> {
        let mut sets = FILES
            .iter()
            .zip(contents)
            .map(|(name, c)| LexiconSet::parse(name, c));
        let mut next = || sets.next().expect("nine lexicons");
        Ok(Lexicons {
            argument_words: next()?,
            discourse_connectives: next()?,
            modal_verbs: next()?,
            pronouns: next()?,
            first_person_singular: next()?,
            polar_words: next()?,
            stopwords: next()?,
            abbreviations: next()?,
            argumentative_subjects: next()?,
        })
    }

    /// Loads `<name>.txt` files from `dir`; missing files fall back to the
    /// built-in lists.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let mut owned = Vec::with_capacity(FILES.len());
        for (name, builtin) in FILES.iter().zip(BUILTIN) {
            let path = dir.as_ref().join(format!("{name}.txt"));
            owned.push(if path.exists() {
                fs::read_to_string(path)?
            } else {
                builtin.to_string()
            });
        }
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        Self::from_contents(refs.try_into().expect("nine lexicons"))
    }
}

impl Default for Lexicons {
    fn default() -> Self {
        Self::from_contents(BUILTIN).expect("built-in lexicons are valid")
    }
}
