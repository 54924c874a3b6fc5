use std::collections::HashMap;

use argmine_core::models::{encode_char, encode_char_seq, encode_word, Embeddings, WORD_DIM};
use argmine_core::textproc::{alphabet_char, tokenize, ALPHABET_SIZE};
use proptest::prelude::*;

const MAX_LEN: usize = 40;

fn expected_chars(text: &str) -> String {
    let kept: String = text
        .to_lowercase()
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || c.is_whitespace())
        .collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn vocab() -> Embeddings {
    let words = ["the", "book", "page", "because", "i", "think", "fezzik", "42"];
    let map: HashMap<String, Vec<f64>> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.to_string(), (0..WORD_DIM).map(|j| (i * WORD_DIM + j) as f64 * 0.01 + 0.5).collect()))
        .collect();
    Embeddings::from_map(WORD_DIM, map).unwrap()
}

fn text_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        "\\PC{0,80}",
        "[a-zA-Z0-9 ,.!?'\"\\-\t\n]{0,80}",
        prop::collection::vec(
            prop::sample::select(vec!["the", "Book", "page", "because", "I", "think", "Fezzik", "42", "zzz", "!", "..."]),
            0..60
        )
        .prop_map(|w| w.join(" ")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn char_tensors_are_width_37_one_hot(text in text_strategy()) {
        let t = encode_char(&text, MAX_LEN);
        prop_assert_eq!(t.shape(), &[MAX_LEN, ALPHABET_SIZE]);
        let want = expected_chars(&text);
        let mut decoded = String::new();
        let mut ended = false;
        for r in 0..MAX_LEN {
            let row = t.row(r);
            let ones = row.iter().filter(|v| **v == 1.0).count();
            let zeros = row.iter().filter(|v| **v == 0.0).count();
            prop_assert_eq!(ones + zeros, ALPHABET_SIZE);
            prop_assert!(ones <= 1);
            if ones == 1 {
                prop_assert!(!ended, "one-hot row after padding");
                let idx = row.iter().position(|v| *v == 1.0).unwrap();
                decoded.push(alphabet_char(idx).unwrap());
            } else {
                ended = true;
            }
        }
        let want_prefix: String = want.chars().take(MAX_LEN).collect();
        prop_assert_eq!(&decoded, &want_prefix);
        let seq = encode_char_seq(&text, MAX_LEN);
        prop_assert_eq!(seq.len, want_prefix.chars().count());
        prop_assert_eq!(seq.truncated, want.chars().count() > MAX_LEN);
    }

    #[test]
    fn word_tensors_are_width_50_with_zero_oov(text in text_strategy()) {
        let emb = vocab();
        let tokens = tokenize(&text);
        let t = encode_word(&tokens, &emb, MAX_LEN);
        prop_assert_eq!(t.shape(), &[MAX_LEN, WORD_DIM]);
        for r in 0..MAX_LEN {
            let row = t.row(r);
            match tokens.get(r) {
                Some(tok) => match emb.get(tok) {
                    Some(v) => prop_assert_eq!(row, v),
                    None => prop_assert!(row.iter().all(|x| *x == 0.0)),
                },
                None => prop_assert!(row.iter().all(|x| *x == 0.0)),
            }
        }
    }
}

#[test]
fn specials_are_filtered() {
    let t = encode_char("Hi, @Bob! #42", 10);
    let decoded: String = (0..10)
        .filter_map(|r| t.row(r).iter().position(|v| *v == 1.0))
        .map(|i| alphabet_char(i).unwrap())
        .collect();
    assert_eq!(decoded, "hi bob 42");
}
