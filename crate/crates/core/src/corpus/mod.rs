//! Argument moves, transcripts, and the JSON-lines transcript format.

pub(crate) mod stats;
mod synth;

pub use stats::{corpus_stats, CorpusStats};
pub use synth::{generate_synthetic, SignalStyle, SynthConfig, DEFAULT_SPEC_GIVEN_ARG, TABLE2_ARG_COUNTS};

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Argument component label. Variant order is the confusion-matrix index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgComponent {
    Claim,
    Evidence,
    Warrant,
}

impl ArgComponent {
    pub const ALL: [ArgComponent; 3] = [ArgComponent::Claim, ArgComponent::Evidence, ArgComponent::Warrant];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ArgComponent::Claim => "claim",
            ArgComponent::Evidence => "evidence",
            ArgComponent::Warrant => "warrant",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "claim" => Ok(ArgComponent::Claim),
            "evidence" => Ok(ArgComponent::Evidence),
            "warrant" => Ok(ArgComponent::Warrant),
            other => Err(Error::Validation(format!("unknown argument label {other:?}"))),
        }
    }
}

impl fmt::Display for ArgComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordinal specificity label; `rank` is 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Specificity {
    Low,
    Med,
    High,
}

impl Specificity {
    pub const ALL: [Specificity; 3] = [Specificity::Low, Specificity::Med, Specificity::High];

    pub fn rank(self) -> usize {
        self as usize
    }

    pub fn from_rank(r: usize) -> Option<Self> {
        Self::ALL.get(r).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Specificity::Low => "low",
            Specificity::Med => "med",
            Specificity::High => "high",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Specificity::Low),
            "med" => Ok(Specificity::Med),
            "high" => Ok(Specificity::High),
            other => Err(Error::Validation(format!("unknown specificity label {other:?}"))),
        }
    }
}

impl fmt::Display for Specificity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One argumentative discourse unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgumentMove {
    pub transcript_id: String,
    pub move_index: usize,
    pub speaker: String,
    pub text: String,
    pub arg_label: ArgComponent,
    pub spec_label: Specificity,
}

impl ArgumentMove {
    /// Stable identifier `<transcript>#<index>` used in prediction logs.
    pub fn id(&self) -> String {
        format!("{}#{}", self.transcript_id, self.move_index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub id: String,
    pub moves: Vec<ArgumentMove>,
}

/// A validated, immutable collection of transcripts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    transcripts: Vec<Transcript>,
}

impl Corpus {
    /// Validates ids, move indices and texts.
    pub fn new(transcripts: Vec<Transcript>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &transcripts {
            if !seen.insert(t.id.as_str()) {
                return Err(Error::Validation(format!("duplicate transcript id {:?}", t.id)));
            }
            if t.moves.is_empty() {
                return Err(Error::Validation(format!("transcript {:?} has no moves", t.id)));
            }
            for (i, m) in t.moves.iter().enumerate() {
                if m.move_index != i {
                    return Err(Error::Validation(format!(
                        "transcript {:?}: move index {} at position {}",
                        t.id, m.move_index, i
                    )));
                }
                if m.transcript_id != t.id {
                    return Err(Error::Validation(format!(
                        "move {} claims transcript {:?} but sits in {:?}",
                        i, m.transcript_id, t.id
                    )));
                }
                if m.text.trim().is_empty() {
                    return Err(Error::Validation(format!(
                        "transcript {:?}: move {} has empty text",
                        t.id, i
                    )));
                }
            }
        }
        Ok(Corpus { transcripts })
    }

    pub fn transcripts(&self) -> &[Transcript] {
        &self.transcripts
    }

    pub fn moves(&self) -> impl Iterator<Item = &ArgumentMove> {
        self.transcripts.iter().flat_map(|t| t.moves.iter())
    }

    pub fn num_moves(&self) -> usize {
        self.transcripts.iter().map(|t| t.moves.len()).sum()
    }

    pub fn get(&self, id: &str) -> Option<&Transcript> {
        self.transcripts.iter().find(|t| t.id == id)
    }
}

#[derive(Serialize, Deserialize)]
struct RawTranscript {
    id: String,
    moves: Vec<RawMove>,
}

#[derive(Serialize, Deserialize)]
struct RawMove {
    speaker: String,
    text: String,
    arg: String,
    spec: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    speaker_role: Option<String>,
}

/// Reads a JSON-lines transcript file. Blank lines are skipped; moves whose
/// optional `speaker_role` is present and not `student` are dropped.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let file = File::open(path.as_ref())?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus(reader: impl BufRead) -> Result<Corpus> {
    let mut transcripts = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawTranscript = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let at_line = |e: Error| match e {
            Error::Validation(msg) => Error::Parse {
                line: lineno,
                message: msg,
            },
            other => other,
        };
        if !seen.insert(raw.id.clone()) {
            return Err(at_line(Error::Validation(format!(
                "duplicate transcript id {:?}",
                raw.id
            ))));
        }
        let mut moves = Vec::with_capacity(raw.moves.len());
        for rm in raw.moves {
            if let Some(role) = &rm.speaker_role {
                if !role.eq_ignore_ascii_case("student") {
                    continue;
                }
            }
            let arg_label = ArgComponent::parse(&rm.arg).map_err(at_line)?;
            let spec_label = Specificity::parse(&rm.spec).map_err(at_line)?;
            moves.push(ArgumentMove {
                transcript_id: raw.id.clone(),
                move_index: moves.len(),
                speaker: rm.speaker,
                text: rm.text,
                arg_label,
                spec_label,
            });
        }
        let t = Transcript { id: raw.id, moves };
        // validate per line so errors carry the line number
        Corpus::new(vec![t.clone()]).map_err(at_line)?;
        transcripts.push(t);
    }
    Corpus::new(transcripts)
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    write_corpus(corpus, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_corpus(corpus: &Corpus, mut w: impl Write) -> Result<()> {
    for t in corpus.transcripts() {
        let raw = RawTranscript {
            id: t.id.clone(),
            moves: t
                .moves
                .iter()
                .map(|m| RawMove {
                    speaker: m.speaker.clone(),
                    text: m.text.clone(),
                    arg: m.arg_label.as_str().to_string(),
                    spec: m.spec_label.as_str().to_string(),
                    speaker_role: None,
                })
                .collect(),
        };
        serde_json::to_writer(&mut w, &raw)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Builds a transcript from `(speaker, text, arg, spec)` tuples.
pub fn transcript_from_parts(
    id: &str,
    parts: impl IntoIterator<Item = (String, String, ArgComponent, Specificity)>,
) -> Transcript {
    Transcript {
        id: id.to_string(),
        moves: parts
            .into_iter()
            .enumerate()
            .map(|(i, (speaker, text, arg_label, spec_label))| ArgumentMove {
                transcript_id: id.to_string(),
                move_index: i,
                speaker,
                text,
                arg_label,
                spec_label,
            })
            .collect(),
    }
}
