//! Noun phrase extraction from captions: tokenize and tag, prune
//! point-in-time qualifiers, detect timespans and by-clauses, pull out the
//! noun runs, and decide which phrase is the subject.

use crate::ingest::time_related_name;

use super::lexicon::LexiconProvider;
use super::tagger::{singularize, tag_tokens, tokenize, Tag, TaggedWord};
use super::{CaptionError, CaptionIR, NounPhrase, PhraseSource, PhraseType, TimeGranularity, Timespan};

/// Quantifier heads: "number of employees" means employees, quantified.
const QUANTIFIER_HEADS: [&str; 5] = ["number", "count", "amount", "quantity", "total"];

fn year_like(lower: &str) -> bool {
    lower.len() == 4 && lower.parse::<u32>().map(|y| (1000..3000).contains(&y)).unwrap_or(false)
}

fn day_like(lower: &str) -> bool {
    (1..=2).contains(&lower.len())
        && lower.parse::<u32>().map(|d| (1..=31).contains(&d)).unwrap_or(false)
}

/// Remove parenthesized chunks ("(in million US dollars)") — they carry
/// units, not variables.
fn strip_parentheticals(text: &str) -> String {
    let mut out = String::new();
    let mut depth = 0usize;
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(ch),
            _ => {}
        }
    }
    out
}

/// Drop a short context prefix before a colon ("Australia: Leading export
/// partners ..." — the country is context, not a variable).  Only prefixes
/// of a few words with no preposition qualify; anything longer is probably
/// a real clause.
fn strip_context_prefix(text: &str) -> &str {
    if let Some(idx) = text.find(':') {
        let prefix = &text[..idx];
        let words: Vec<&str> = prefix.split_whitespace().collect();
        let has_prep = words
            .iter()
            .any(|w| ["of", "in", "by", "from", "to", "for"].contains(&w.to_ascii_lowercase().as_str()));
        if !words.is_empty() && words.len() <= 4 && !has_prep {
            return text[idx + 1..].trim_start();
        }
    }
    text
}

/// A date-ish chunk inside a "from X to Y" span: consecutive date words,
/// numbers, and commas containing at least one year or month word.
struct DateChunk {
    text: String,
    has_month: bool,
    has_day: bool,
    has_year: bool,
    end: usize,
}

fn read_date_chunk(words: &[TaggedWord], start: usize) -> Option<DateChunk> {
    let mut i = start;
    let mut parts: Vec<&str> = Vec::new();
    let (mut has_month, mut has_day, mut has_year) = (false, false, false);
    while i < words.len() {
        let w = &words[i];
        match w.tag {
            Tag::DateWord => {
                has_month = true;
                parts.push(&w.word);
            }
            Tag::Number if year_like(&w.lower) => {
                has_year = true;
                parts.push(&w.word);
            }
            Tag::Number if day_like(&w.lower) => {
                has_day = true;
                parts.push(&w.word);
            }
            Tag::Punct if w.lower == "," && !parts.is_empty() => {}
            _ => break,
        }
        i += 1;
    }
    if parts.is_empty() || !(has_month || has_year) {
        return None;
    }
    Some(DateChunk { text: parts.join(" "), has_month, has_day, has_year, end: i })
}

/// Find a "from <date> to <date>" span.  Returns the span and the token
/// range it occupies.
pub fn detect_timespan(words: &[TaggedWord]) -> Option<(Timespan, std::ops::Range<usize>)> {
    for i in 0..words.len() {
        if words[i].lower != "from" {
            continue;
        }
        let Some(start_chunk) = read_date_chunk(words, i + 1) else { continue };
        if start_chunk.end >= words.len() || words[start_chunk.end].lower != "to" {
            continue;
        }
        let Some(end_chunk) = read_date_chunk(words, start_chunk.end + 1) else { continue };
        let granularity = if start_chunk.has_day || end_chunk.has_day {
            TimeGranularity::Day
        } else if start_chunk.has_month || end_chunk.has_month {
            TimeGranularity::Month
        } else {
            TimeGranularity::Year
        };
        let _ = (start_chunk.has_year, end_chunk.has_year);
        let span = Timespan { start: start_chunk.text, end: end_chunk.text, granularity };
        return Some((span, i..end_chunk.end));
    }
    None
}

/// Mark point-in-time qualifiers for pruning: "in 2015", "in January
/// 2014", "at 2020", "as of June 2017".  These scope the caption but do not
/// name a variable.
fn prune_point_in_time(words: &[TaggedWord], consumed: &mut [bool]) -> Vec<String> {
    let mut pruned = Vec::new();
    let mut i = 0;
    while i < words.len() {
        if consumed[i] {
            i += 1;
            continue;
        }
        let head_len = if matches!(words[i].lower.as_str(), "in" | "at") {
            1
        } else if words[i].lower == "as" && i + 1 < words.len() && words[i + 1].lower == "of" {
            2
        } else {
            i += 1;
            continue;
        };
        let mut j = i + head_len;
        // `end` tracks one past the last real date token so a trailing
        // comma ("in 2015, by region") is left alone.
        let mut end = j;
        let mut parts: Vec<&str> = Vec::new();
        let mut has_anchor = false;
        while j < words.len() && !consumed[j] {
            let w = &words[j];
            match w.tag {
                Tag::DateWord => {
                    has_anchor = true;
                    parts.push(&w.word);
                    end = j + 1;
                }
                Tag::Number if year_like(&w.lower) => {
                    has_anchor = true;
                    parts.push(&w.word);
                    end = j + 1;
                }
                Tag::Number if day_like(&w.lower) => {
                    parts.push(&w.word);
                    end = j + 1;
                }
                Tag::Punct if w.lower == "," && !parts.is_empty() => {}
                _ => break,
            }
            j += 1;
        }
        // Require a month or year in the chunk: "in 26" is not a date.
        if !parts.is_empty() && has_anchor {
            for c in consumed.iter_mut().take(end).skip(i) {
                *c = true;
            }
            let head = words[i..i + head_len].iter().map(|w| w.word.as_str());
            let text: Vec<&str> = head.chain(parts.iter().copied()).collect();
            pruned.push(text.join(" "));
            i = end;
        } else {
            i += 1;
        }
    }
    pruned
}

fn phrase_type(
    operative: &str,
    quantified: bool,
    lexicon: &dyn LexiconProvider,
) -> (PhraseType, f64) {
    let score = lexicon
        .quant_score(operative)
        .max(lexicon.quant_score(&singularize(operative)));
    if time_related_name(operative) {
        return (PhraseType::T, score);
    }
    if quantified || score >= lexicon.quant_threshold() {
        return (PhraseType::Q, score);
    }
    (PhraseType::OC, score)
}

/// Extract "by ..." clauses.  Each clause yields one phrase per
/// conjunction segment, distributing a shared head noun across segments:
/// "by single and album charts" → "single charts", "album charts".
pub fn detect_by_clauses(
    words: &[TaggedWord],
    consumed: &mut [bool],
    lexicon: &dyn LexiconProvider,
) -> Vec<NounPhrase> {
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < words.len() {
        if consumed[i] || words[i].lower != "by" {
            i += 1;
            continue;
        }
        // Collect clause tokens: modifiers, nouns, and conjunctions, up to
        // the next preposition or punctuation.
        let start = i + 1;
        let mut j = start;
        while j < words.len() && !consumed[j] {
            match words[j].tag {
                Tag::Noun { .. } | Tag::Adjective | Tag::Verb | Tag::Determiner
                | Tag::Conjunction => j += 1,
                _ => break,
            }
        }
        if j == start {
            i += 1;
            continue;
        }
        for c in consumed.iter_mut().take(j).skip(i) {
            *c = true;
        }

        // Split on conjunctions into segments.
        let mut segments: Vec<Vec<&TaggedWord>> = vec![Vec::new()];
        for w in &words[start..j] {
            if matches!(w.tag, Tag::Conjunction) {
                segments.push(Vec::new());
            } else if !matches!(w.tag, Tag::Determiner) {
                segments.last_mut().expect("segments never empty").push(w);
            }
        }
        segments.retain(|s| !s.is_empty());

        // The donor head comes from the last segment that has a noun.
        let donor: Option<&TaggedWord> = segments
            .iter()
            .rev()
            .find_map(|seg| seg.iter().rev().find(|w| w.is_common_noun()).copied());

        for seg in &segments {
            let mut text_words: Vec<&str> = seg
                .iter()
                .filter(|w| w.is_common_noun() || matches!(w.tag, Tag::Adjective))
                .map(|w| w.lower.as_str())
                .collect();
            if text_words.is_empty() {
                continue;
            }
            let mut operative =
                seg.iter().rev().find(|w| w.is_common_noun()).map(|w| w.lower.clone());
            if operative.is_none() {
                if let Some(d) = donor {
                    text_words.push(&d.lower);
                    operative = Some(d.lower.clone());
                }
            }
            let Some(operative) = operative else { continue };
            let text = text_words.join(" ");
            let (ptype, quant_score) = phrase_type(&operative, false, lexicon);
            phrases.push(NounPhrase {
                text,
                operative,
                ptype,
                quantified: false,
                quant_score,
                source: PhraseSource::ByClause,
                super_run: usize::MAX,
            });
        }
        i = j;
    }
    phrases
}

/// Extract body noun phrases from the unconsumed tokens.
///
/// Contiguous common-noun runs form super-runs; a quantifier head followed
/// by "of" is absorbed into the next run ("number of employees" →
/// "employees", quantified); runs split after internal plural nouns
/// ("operating systems market share" → "systems" + "market share", because
/// a plural noun ends a compound).
pub fn extract_noun_phrases(
    words: &[TaggedWord],
    consumed: &[bool],
    lexicon: &dyn LexiconProvider,
) -> Vec<NounPhrase> {
    // Gather contiguous noun runs as token index ranges.
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        if !consumed[i] && w.is_common_noun() {
            current.push(i);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }

    // Quantifier absorption: a run that is exactly one quantifier head,
    // followed by "of" and another run, folds into that run.
    let mut quantified: Vec<bool> = vec![false; runs.len()];
    let mut drop: Vec<bool> = vec![false; runs.len()];
    for r in 0..runs.len().saturating_sub(1) {
        let run = &runs[r];
        if run.len() != 1 || !QUANTIFIER_HEADS.contains(&words[run[0]].lower.as_str()) {
            continue;
        }
        // The next unconsumed word must be "of", immediately followed by
        // the next run.
        let mut k = run[0] + 1;
        while k < words.len() && consumed[k] {
            k += 1;
        }
        if k >= words.len() || words[k].lower != "of" {
            continue;
        }
        let mut m = k + 1;
        while m < words.len() && (consumed[m] || matches!(words[m].tag, Tag::Determiner)) {
            m += 1;
        }
        if runs[r + 1].first() == Some(&m) {
            drop[r] = true;
            quantified[r + 1] = true;
        }
    }

    // Split runs after internal plural nouns and emit phrases.
    let mut phrases = Vec::new();
    let mut super_run = 0usize;
    for (r, run) in runs.iter().enumerate() {
        if drop[r] {
            continue;
        }
        let mut piece: Vec<usize> = Vec::new();
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        for (pos, &idx) in run.iter().enumerate() {
            piece.push(idx);
            let is_last = pos + 1 == run.len();
            if words[idx].is_plural_noun() && !is_last {
                pieces.push(std::mem::take(&mut piece));
            }
        }
        if !piece.is_empty() {
            pieces.push(piece);
        }
        for piece in pieces {
            let text: Vec<&str> = piece.iter().map(|&i| words[i].lower.as_str()).collect();
            let operative = words[*piece.last().expect("piece non-empty")].lower.clone();
            let (ptype, quant_score) = phrase_type(&operative, quantified[r], lexicon);
            phrases.push(NounPhrase {
                text: text.join(" "),
                operative,
                ptype,
                quantified: quantified[r],
                quant_score,
                source: PhraseSource::Body,
                super_run,
            });
        }
        super_run += 1;
    }
    phrases
}

/// The subject (main phrase) of a caption: the head of the first noun
/// super-run.  "Mobile operating systems market share" parses into the
/// phrases "systems" and "market share" within one super-run; the compound
/// head — the last phrase — is what the caption is about.
pub fn identify_subject(phrases: &[NounPhrase]) -> Option<usize> {
    let first_run = phrases.iter().map(|p| p.super_run).min()?;
    phrases
        .iter()
        .enumerate()
        .filter(|(_, p)| p.super_run == first_run)
        .map(|(i, _)| i)
        .next_back()
}

/// Parse a caption end to end: strip context, prune point-in-time
/// qualifiers, detect the timespan and by-clauses, extract noun phrases,
/// and pick the subject.
pub fn parse_caption(
    caption: &str,
    lexicon: &dyn LexiconProvider,
) -> Result<CaptionIR, CaptionError> {
    let trimmed = caption.trim();
    if trimmed.is_empty() {
        return Err(CaptionError::EmptyCaption);
    }
    let text = strip_parentheticals(trimmed);
    let text = strip_context_prefix(&text);
    let tokens = tokenize(text);
    let words = tag_tokens(&tokens);
    let mut consumed = vec![false; words.len()];

    let timespan = match detect_timespan(&words) {
        Some((span, range)) => {
            for c in consumed.iter_mut().take(range.end).skip(range.start) {
                *c = true;
            }
            Some(span)
        }
        None => None,
    };
    let pruned = prune_point_in_time(&words, &mut consumed);
    let by_clauses = detect_by_clauses(&words, &mut consumed, lexicon);
    let phrases = extract_noun_phrases(&words, &consumed, lexicon);
    let main_index = identify_subject(&phrases);

    if phrases.is_empty() && by_clauses.is_empty() && timespan.is_none() {
        return Err(CaptionError::NoNounPhrase);
    }

    Ok(CaptionIR {
        caption: caption.to_string(),
        tokens: words,
        phrases,
        by_clauses,
        timespan,
        main_index,
        pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::super::lexicon::CuratedLexicon;
    use super::*;

    fn parse(caption: &str) -> CaptionIR {
        parse_caption(caption, &CuratedLexicon::new()).unwrap()
    }

    fn phrase_texts(ir: &CaptionIR) -> Vec<&str> {
        ir.phrases.iter().map(|p| p.text.as_str()).collect()
    }

    #[test]
    fn leading_export_partners() {
        let ir = parse("Australia: Leading export partners in 2015");
        assert_eq!(phrase_texts(&ir), vec!["partners"]);
        assert_eq!(ir.main_phrase().unwrap().ptype, PhraseType::OC);
        assert_eq!(ir.pruned, vec!["in 2015"]);
        assert!(ir.timespan.is_none());
        assert!(ir.by_clauses.is_empty());
    }

    #[test]
    fn number_of_employees_by_region() {
        let ir = parse("Number of employees of Acme worldwise in 2015, by region");
        assert_eq!(phrase_texts(&ir), vec!["employees"]);
        let main = ir.main_phrase().unwrap();
        assert_eq!(main.ptype, PhraseType::Q);
        assert!(main.quantified, "the quantifier head must be absorbed");
        assert_eq!(ir.by_clauses.len(), 1);
        assert_eq!(ir.by_clauses[0].text, "region");
        assert_eq!(ir.by_clauses[0].ptype, PhraseType::OC);
        assert_eq!(ir.pruned, vec!["in 2015"]);
    }

    #[test]
    fn number_of_employees_with_timespan() {
        let ir = parse("Number of employees of Acme worldwise from 2008 to 2015");
        assert_eq!(phrase_texts(&ir), vec!["employees"]);
        assert_eq!(ir.main_phrase().unwrap().ptype, PhraseType::Q);
        let span = ir.timespan.as_ref().unwrap();
        assert_eq!((span.start.as_str(), span.end.as_str()), ("2008", "2015"));
        assert_eq!(span.granularity, TimeGranularity::Year);
    }

    #[test]
    fn operating_systems_market_share() {
        let ir = parse(
            "Mobile operating systems market share worldwide from January 2014 to December 2016",
        );
        assert_eq!(phrase_texts(&ir), vec!["systems", "market share"]);
        let main = ir.main_phrase().unwrap();
        assert_eq!(main.text, "market share");
        assert_eq!(main.operative, "share");
        assert_eq!(main.ptype, PhraseType::Q);
        let span = ir.timespan.as_ref().unwrap();
        assert_eq!(span.granularity, TimeGranularity::Month);
        assert_eq!(span.start, "January 2014");
    }

    #[test]
    fn box_office_revenue_of_movies() {
        let ir = parse(
            "Box office revenue of the highest grossing movies in North America in 2016 (in million US dollars)",
        );
        assert_eq!(phrase_texts(&ir), vec!["box office revenue", "movies"]);
        let main = ir.main_phrase().unwrap();
        assert_eq!(main.text, "box office revenue");
        assert_eq!(main.ptype, PhraseType::Q);
        assert_eq!(ir.phrases[1].ptype, PhraseType::OC);
        assert_eq!(ir.pruned, vec!["in 2016"]);
    }

    #[test]
    fn record_labels_with_day_span_and_conjoined_by_clause() {
        let ir = parse(
            "Market share of record labels in Sweden from Dec 26, 2016 to Jan 1, 2017, by single and album charts",
        );
        assert_eq!(phrase_texts(&ir), vec!["market share", "record labels"]);
        assert_eq!(ir.main_phrase().unwrap().text, "market share");
        let span = ir.timespan.as_ref().unwrap();
        assert_eq!(span.granularity, TimeGranularity::Day);
        assert_eq!(span.start, "Dec 26 2016");
        assert_eq!(span.end, "Jan 1 2017");
        let by: Vec<&str> = ir.by_clauses.iter().map(|p| p.text.as_str()).collect();
        assert_eq!(by, vec!["single charts", "album charts"]);
        assert!(ir.by_clauses.iter().all(|p| p.ptype == PhraseType::OC));
    }

    #[test]
    fn by_year_is_time_typed() {
        let ir = parse("Revenue of Acme by year");
        assert_eq!(ir.by_clauses.len(), 1);
        assert_eq!(ir.by_clauses[0].ptype, PhraseType::T);
        assert_eq!(ir.main_phrase().unwrap().ptype, PhraseType::Q);
    }

    #[test]
    fn empty_and_nounless_captions_error() {
        let lex = CuratedLexicon::new();
        assert_eq!(parse_caption("   ", &lex), Err(CaptionError::EmptyCaption));
        assert_eq!(parse_caption("of the in by", &lex), Err(CaptionError::NoNounPhrase));
    }

    #[test]
    fn from_to_with_non_dates_is_not_a_timespan() {
        let ir = parse("Shipments from warehouses to stores");
        assert!(ir.timespan.is_none());
        assert!(phrase_texts(&ir).contains(&"shipments"));
    }
}
