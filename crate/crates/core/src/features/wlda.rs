//! Essay-style argument features (lexical, parse, structural, context)
//! adapted to discussion moves: paragraphs become transcripts, and the
//! neighbouring sentence becomes the neighbouring move.

use std::collections::HashSet;

use super::{FeatureGroup, MoveView};
use crate::textproc::{clause_count, is_punct, is_verb_tag, main_verb_tense, Lexicons, Tense, TokenizedMove};

use FeatureGroup::{WldaContext as Ctx, WldaLexical as Lex, WldaParse as Parse, WldaStructural as Struct};

/// Dense catalog in emission order.
pub const CATALOG: &[(&str, FeatureGroup)] = &[
    ("wlda_argument_words", Lex),
    ("wlda_verbs", Lex),
    ("wlda_adverbs", Lex),
    ("wlda_modal", Lex),
    ("wlda_connectives", Lex),
    ("wlda_first_person", Lex),
    ("wlda_arg_subject_verb", Parse),
    ("wlda_tense_past", Parse),
    ("wlda_tense_present", Parse),
    ("wlda_tense_modal", Parse),
    ("wlda_tense_none", Parse),
    ("wlda_subclauses", Parse),
    ("wlda_parse_depth", Parse),
    ("wlda_tokens", Struct),
    ("wlda_type_token_ratio", Struct),
    ("wlda_punctuation", Struct),
    ("wlda_position", Struct),
    ("wlda_first_move", Struct),
    ("wlda_last_move", Struct),
    ("wlda_sentences", Struct),
    ("wlda_prev_tokens", Ctx),
    ("wlda_prev_punctuation", Ctx),
    ("wlda_prev_subclauses", Ctx),
    ("wlda_prev_modal", Ctx),
    ("wlda_next_tokens", Ctx),
    ("wlda_next_punctuation", Ctx),
    ("wlda_next_subclauses", Ctx),
    ("wlda_next_modal", Ctx),
];

fn indicator(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

fn has_modal(m: &TokenizedMove, lex: &Lexicons) -> bool {
    m.tokens.iter().any(|t| lex.modal_verbs.contains(t)) || m.pos_tags.iter().any(|t| t == "MD")
}

fn punctuation(m: &TokenizedMove) -> usize {
    m.tokens.iter().filter(|t| is_punct(t)).count()
}

fn subclauses(m: &TokenizedMove, lex: &Lexicons) -> usize {
    clause_count(m, lex).iter().sum()
}

/// A pronoun or argumentative subject noun up to three tokens before a verb.
fn arg_subject_verb(m: &TokenizedMove, lex: &Lexicons) -> bool {
    m.pos_tags.iter().enumerate().any(|(j, tag)| {
        is_verb_tag(tag)
            && m.tokens[j.saturating_sub(3)..j]
                .iter()
                .any(|t| lex.pronouns.contains(t) || lex.argumentative_subjects.contains(t))
    })
}

fn move_tense(m: &TokenizedMove) -> Tense {
    (0..m.sentences.len())
        .map(|s| main_verb_tense(m.sentence_tags(s)))
        .find(|t| *t != Tense::None)
        .unwrap_or(Tense::None)
}

fn context(m: Option<&TokenizedMove>, lex: &Lexicons) -> [f64; 4] {
    match m {
        None => [0.0; 4],
        Some(m) => [
            m.tokens.len() as f64,
            punctuation(m) as f64,
            subclauses(m, lex) as f64,
            indicator(has_modal(m, lex)),
        ],
    }
}

/// All catalog features for one move. Absent neighbours give zero context.
pub fn extract_wlda(view: &MoveView<'_>, lex: &Lexicons) -> Vec<(&'static str, f64)> {
    let m = view.tok;
    let n_tokens = m.tokens.len();
    let clauses = clause_count(m, lex);
    let tense = move_tense(m);
    let distinct: HashSet<&String> = m.tokens.iter().collect();
    let position = if view.transcript_len > 1 {
        view.position as f64 / (view.transcript_len - 1) as f64
    } else {
        0.0
    };
    let prev = context(view.prev, lex);
    let next = context(view.next, lex);

    let values = [
        lex.argument_words.count_in(&m.tokens) as f64,
        m.pos_tags.iter().filter(|t| t.starts_with("VB")).count() as f64,
        m.pos_tags.iter().filter(|t| t.starts_with("RB")).count() as f64,
        indicator(has_modal(m, lex)),
        lex.discourse_connectives.count_in(&m.tokens) as f64,
        indicator(m.tokens.iter().any(|t| lex.first_person_singular.contains(t))),
        indicator(arg_subject_verb(m, lex)),
        indicator(tense == Tense::Past),
        indicator(tense == Tense::Present),
        indicator(tense == Tense::ModalFuture),
        indicator(tense == Tense::None),
        clauses.iter().sum::<usize>() as f64,
        if n_tokens == 0 { 0.0 } else { (clauses.iter().copied().max().unwrap_or(0) + 1) as f64 },
        n_tokens as f64,
        if n_tokens == 0 { 0.0 } else { distinct.len() as f64 / n_tokens as f64 },
        punctuation(m) as f64,
        position,
        indicator(view.position == 0),
        indicator(view.position + 1 == view.transcript_len),
        m.sentences.len() as f64,
        prev[0],
        prev[1],
        prev[2],
        prev[3],
        next[0],
        next[1],
        next[2],
        next[3],
    ];
    CATALOG.iter().zip(values).map(|((name, _), v)| (*name, v)).collect()
}
