//! Human-readable feature documentation, rendered to FEATURES.md.

use super::{dialogue::SEMANTIC_DENSITY_NAMES, wlda, FeatureGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub group: FeatureGroup,
    pub definition: &'static str,
    /// Where the feature comes from: the essay feature set, the online
    /// dialogue feature set, or a local substitute for an undefined one.
    pub origin: &'static str,
}

const ESSAY: &str = "essay argument features";
const ESSAY_ADAPTED: &str = "essay argument features, adapted to moves";
const ESSAY_SUBSTITUTE: &str = "essay argument features, local definition";
const DIALOGUE: &str = "online dialogue features";
const DIALOGUE_SUBSTITUTE: &str = "online dialogue features, local definition";

const DEFINITIONS: &[(&str, &str, &str)] = &[
    ("wlda_argument_words", "count of tokens in the argument-word lexicon (stands in for topic-abstracted argument words)", ESSAY_SUBSTITUTE),
    ("wlda_verbs", "count of tokens tagged VB*", ESSAY),
    ("wlda_adverbs", "count of tokens tagged RB*", ESSAY),
    ("wlda_modal", "1 if any token is a modal verb or tagged MD", ESSAY),
    ("wlda_connectives", "count of discourse connective tokens", ESSAY),
    ("wlda_first_person", "1 if any first-person singular pronoun occurs", ESSAY),
    ("wlda_arg_subject_verb", "1 if a pronoun or argumentative subject noun occurs up to three tokens before a verb", ESSAY_SUBSTITUTE),
    ("wlda_tense_past", "1 if the first finite main verb is past tense", ESSAY),
    ("wlda_tense_present", "1 if the first finite main verb is present tense", ESSAY),
    ("wlda_tense_modal", "1 if the first finite main verb is modal or future", ESSAY),
    ("wlda_tense_none", "1 if no finite main verb is found", ESSAY),
    ("wlda_subclauses", "number of subordinate clauses opened by clause-opening words", ESSAY),
    ("wlda_parse_depth", "deepest clause nesting plus one; 0 for an empty move", ESSAY_SUBSTITUTE),
    ("wlda_tokens", "number of tokens", ESSAY),
    ("wlda_type_token_ratio", "distinct tokens / tokens", ESSAY_SUBSTITUTE),
    ("wlda_punctuation", "number of punctuation tokens", ESSAY),
    ("wlda_position", "move index / (transcript length - 1)", ESSAY_ADAPTED),
    ("wlda_first_move", "1 for the first move of a transcript", ESSAY_ADAPTED),
    ("wlda_last_move", "1 for the last move of a transcript", ESSAY_ADAPTED),
    ("wlda_sentences", "number of sentences", ESSAY),
    ("wlda_prev_tokens", "token count of the previous move, 0 at the start", ESSAY_ADAPTED),
    ("wlda_prev_punctuation", "punctuation count of the previous move", ESSAY_ADAPTED),
    ("wlda_prev_subclauses", "subordinate clause count of the previous move", ESSAY_ADAPTED),
    ("wlda_prev_modal", "modal indicator of the previous move", ESSAY_ADAPTED),
    ("wlda_next_tokens", "token count of the next move, 0 at the end", ESSAY_ADAPTED),
    ("wlda_next_punctuation", "punctuation count of the next move", ESSAY_ADAPTED),
    ("wlda_next_subclauses", "subordinate clause count of the next move", ESSAY_ADAPTED),
    ("wlda_next_modal", "modal indicator of the next move", ESSAY_ADAPTED),
    ("dlg_pronouns", "count of pronoun word tokens", DIALOGUE),
    ("dlg_word_len_mean", "mean word length in characters", DIALOGUE),
    ("dlg_word_len_max", "longest word length in characters", DIALOGUE),
    ("dlg_word_len_sd", "population standard deviation of word length", DIALOGUE),
    ("dlg_len_1_3", "words of 1 to 3 characters", DIALOGUE),
    ("dlg_len_4_6", "words of 4 to 6 characters", DIALOGUE),
    ("dlg_len_7_9", "words of 7 to 9 characters", DIALOGUE),
    ("dlg_len_10_plus", "words of 10 or more characters", DIALOGUE),
    ("dlg_spec_tokens", "number of word tokens", DIALOGUE_SUBSTITUTE),
    ("dlg_spec_stopword_frac", "stopword tokens / word tokens", DIALOGUE_SUBSTITUTE),
    ("dlg_spec_digit_tokens", "word tokens containing a digit", DIALOGUE_SUBSTITUTE),
    ("dlg_spec_polar_words", "count of polarity lexicon words", DIALOGUE_SUBSTITUTE),
    ("dlg_spec_capitalized", "whitespace-separated words starting with an uppercase letter", DIALOGUE_SUBSTITUTE),
    ("dlg_spec_mean_idf", "mean training-fold idf of the word tokens", DIALOGUE_SUBSTITUTE),
];

/// Every dense feature in schema order.
pub fn feature_catalog() -> Vec<CatalogEntry> {
    let groups = wlda::CATALOG
        .iter()
        .copied()
        .chain(SEMANTIC_DENSITY_NAMES.iter().map(|n| (*n, FeatureGroup::DlgSemanticDensity)));
    groups
        .map(|(name, group)| {
            let (_, definition, origin) = DEFINITIONS
                .iter()
                .find(|(n, _, _)| *n == name)
                .expect("every catalog feature has a definition");
            CatalogEntry {
                name,
                group,
                definition,
                origin,
            }
        })
        .collect()
}

/// Markdown document describing every dense feature and the sparse families.
pub fn render_feature_catalog() -> String {
    let mut s = String::from("# Features\n\nGenerated by `argmine features`. Do not edit by hand.\n\n");
    s.push_str("## Dense features\n\n| Name | Group | Definition | Origin |\n|---|---|---|---|\n");
    for e in feature_catalog() {
        s.push_str(&format!("| `{}` | {} | {} | {} |\n", e.name, e.group, e.definition, e.origin));
    }
    s.push_str("\n## Sparse families\n\n| Name | Group | Definition | Origin |\n|---|---|---|---|\n");
    s.push_str(&format!(
        "| `tfidf:<term>` | {} | tf-idf of word unigrams and bigrams with document frequency >= min_df in the training fold; l2-normalised per move | {} |\n",
        FeatureGroup::DlgLexical,
        DIALOGUE
    ));
    s.push_str(&format!(
        "| `pos:<tags>` | {} | counts of POS-tag unigrams, bigrams and trigrams within a sentence, with document frequency >= min_df in the training fold | {} |\n",
        FeatureGroup::DlgSyntax,
        DIALOGUE
    ));
    s
}
