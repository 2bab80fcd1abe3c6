//! Caption-side analysis: parse a table caption into noun phrases, type
//! them as quantitative (Q), object-category (OC), or time-related (T),
//! line them up with the table's columns, and extract the 19-bit caption
//! feature vector.
//!
//! Captions play the role queries play on the SQL side.  "Number of
//! employees of Acme from 2008 to 2015" tells us the measure (employees,
//! quantified), the time axis (the 2008–2015 span), and — together with the
//! table itself — which column carries each variable.

mod align;
mod features;
pub mod lexicon;
mod phrases;
pub mod tagger;

pub use align::{align_with_columns, AlignedVar, CaptionAlignment};
pub use features::extract_caption_features;
pub use lexicon::{CuratedLexicon, FileLexicon, LexiconProvider, QUANT_SEEDS};
pub use phrases::{detect_by_clauses, detect_timespan, extract_noun_phrases, identify_subject, parse_caption};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CaptionError {
    #[error("caption is empty")]
    EmptyCaption,
    #[error("caption contains no usable noun phrase")]
    NoNounPhrase,
    #[error("caption variables could not be aligned with the table: {0}")]
    NoAlignment(String),
}

/// Semantic type of a caption phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhraseType {
    /// Quantitative: names a measurable amount ("revenue", "market share").
    Q,
    /// Object category: names the things being compared ("partners").
    OC,
    /// Time-related ("year", or a detected timespan).
    T,
}

/// Where a phrase came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhraseSource {
    /// Ordinary noun run in the caption body.
    Body,
    /// Introduced by a "by ..." clause.
    ByClause,
    /// The "from X to Y" span itself.
    Timespan,
    /// Not in the caption at all; deduced from a leftover data column.
    Implicit,
}

/// One noun phrase extracted from a caption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NounPhrase {
    /// Full phrase text, lowercased ("market share").
    pub text: String,
    /// The operative noun: the last noun of the phrase, which carries the
    /// phrase's meaning for typing and matching ("share").
    pub operative: String,
    pub ptype: PhraseType,
    /// True when a quantifier head was absorbed ("number of employees").
    pub quantified: bool,
    /// How strongly the operative noun reads as a quantity, per the
    /// lexicon; the larger of the plural and singular form scores.
    pub quant_score: f64,
    pub source: PhraseSource,
    /// Index of the contiguous noun super-run this phrase belongs to; the
    /// subject is the head (last phrase) of super-run 0.
    pub super_run: usize,
}

/// Granularity of a detected timespan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeGranularity {
    Year,
    Month,
    Day,
}

/// A "from X to Y" span found in the caption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timespan {
    pub start: String,
    pub end: String,
    pub granularity: TimeGranularity,
}

/// Parsed caption: phrases, by-clauses, span, and the main phrase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionIR {
    pub caption: String,
    /// Tagged tokens of the analyzed text, after parenthetical stripping,
    /// context-prefix removal, and point-in-time pruning.
    pub tokens: Vec<tagger::TaggedWord>,
    /// Body noun phrases, in caption order.
    pub phrases: Vec<NounPhrase>,
    /// Phrases introduced by "by ..." clauses, in caption order.
    pub by_clauses: Vec<NounPhrase>,
    pub timespan: Option<Timespan>,
    /// Index into `phrases` of the main (subject) phrase.
    pub main_index: Option<usize>,
    /// Point-in-time chunks pruned before analysis ("in 2015").
    pub pruned: Vec<String>,
}

impl CaptionIR {
    pub fn main_phrase(&self) -> Option<&NounPhrase> {
        self.main_index.map(|i| &self.phrases[i])
    }

    /// All extracted phrases: body then by-clause.
    pub fn all_phrases(&self) -> impl Iterator<Item = &NounPhrase> {
        self.phrases.iter().chain(self.by_clauses.iter())
    }
}
