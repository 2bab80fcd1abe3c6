//! Rule-based part-of-speech tagging for table captions.
//!
//! Captions are short, headline-style fragments ("Box office revenue of the
//! highest grossing movies in North America"), so a full statistical tagger
//! is overkill.  Closed word classes, a small override dictionary for words
//! that are ambiguous in caption style, suffix heuristics, and a
//! capitalization rule cover them well.  The tagger only has to be good at
//! one thing: not mistaking non-nouns for the common nouns that become
//! chart variables.

use serde::{Deserialize, Serialize};

use crate::ingest::looks_like_date;

/// Word class, as coarse as caption analysis needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    /// Common noun; `plural` drives phrase boundaries and singularization.
    Noun { plural: bool },
    /// Capitalized name (companies, places); never a chart variable.
    Proper,
    Verb,
    Adjective,
    Adverb,
    Preposition,
    Determiner,
    Conjunction,
    /// Numeric literal, including ordinals ("26", "2015", "1st").
    Number,
    /// Month or weekday name.
    DateWord,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedWord {
    /// Original token text.
    pub word: String,
    /// Lowercased form, used for all lexical checks.
    pub lower: String,
    pub tag: Tag,
}

impl TaggedWord {
    pub fn is_common_noun(&self) -> bool {
        matches!(self.tag, Tag::Noun { .. })
    }

    pub fn is_plural_noun(&self) -> bool {
        matches!(self.tag, Tag::Noun { plural: true })
    }
}

const DETERMINERS: [&str; 17] = [
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "all", "some", "any",
    "no", "its", "their", "his", "her",
];

const PREPOSITIONS: [&str; 27] = [
    "of", "in", "on", "at", "by", "from", "to", "for", "with", "over", "under", "across",
    "during", "between", "among", "within", "without", "through", "against", "vs", "versus",
    "per", "since", "until", "towards", "into", "onto",
];

const CONJUNCTIONS: [&str; 5] = ["and", "or", "nor", "but", "plus"];

const AUX_VERBS: [&str; 19] = [
    "is", "are", "was", "were", "be", "been", "has", "have", "had", "do", "does", "did", "will",
    "would", "can", "could", "may", "might", "should",
];

const MONTHS: [&str; 25] = [
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
    "january", "february", "march", "april", "june", "july", "august", "september", "october",
    "november", "december", "month_placeholder",
];

const WEEKDAYS: [&str; 14] = [
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday", "mon", "tue",
    "wed", "thu", "fri", "sat", "sun",
];

/// Words whose caption-style reading differs from their most common tag.
/// Caption fragments use a lot of verb participles and bare adjectives as
/// modifiers; left untagged these would glue onto the noun runs we extract.
fn dictionary_override(lower: &str) -> Option<Tag> {
    let tag = match lower {
        // Participles and verbs that modify nouns in captions.
        "leading" | "operating" | "grossing" | "selling" | "earning" | "performing"
        | "streaming" | "ranked" | "rated" | "export" | "import" | "compared" => Tag::Verb,
        // Modifiers captions use adjectivally.
        "mobile" | "single" | "top" | "best" | "worst" | "new" | "major" | "global"
        | "national" | "overall" | "average" | "median" | "public" | "private" | "digital"
        | "online" | "social" => Tag::Adjective,
        // Scope adverbs (including a common misspelling of "worldwide").
        "worldwide" | "worldwise" | "globally" | "nationwide" | "annually" | "yearly"
        | "monthly" | "weekly" | "daily" => Tag::Adverb,
        _ => return None,
    };
    Some(tag)
}

fn is_all_digits_or_ordinal(lower: &str) -> bool {
    if lower.is_empty() {
        return false;
    }
    if lower.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',') {
        return lower.chars().any(|c| c.is_ascii_digit());
    }
    // Ordinals: 1st, 2nd, 3rd, 26th.
    let digits: String = lower.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return false;
    }
    matches!(&lower[digits.len()..], "st" | "nd" | "rd" | "th")
}

fn plural_common_noun(lower: &str) -> bool {
    lower.len() > 2
        && lower.ends_with('s')
        && !lower.ends_with("ss")
        && !lower.ends_with("us")
        && !lower.ends_with("is")
}

/// Nouns that end in "-ie", where the usual "-ies" → "-y" rewrite would
/// mangle the stem ("movies" → "movy").
const IE_NOUNS: [&str; 8] =
    ["movie", "cookie", "calorie", "rookie", "zombie", "selfie", "smoothie", "pie"];

/// Singular form of a plural common noun ("movies" → "movie",
/// "countries" → "country", "branches" → "branch").
pub fn singularize(lower: &str) -> String {
    if let Some(stem) = lower.strip_suffix('s') {
        if stem.ends_with("ie") && IE_NOUNS.contains(&stem) {
            return stem.to_string();
        }
    }
    if let Some(stem) = lower.strip_suffix("ies") {
        if !stem.is_empty() {
            return format!("{stem}y");
        }
    }
    for suffix in ["ches", "shes", "xes", "zes", "sses"] {
        if let Some(stem) = lower.strip_suffix(suffix) {
            return format!("{stem}{}", &suffix[..suffix.len() - 2]);
        }
    }
    if plural_common_noun(lower) {
        return lower[..lower.len() - 1].to_string();
    }
    lower.to_string()
}

/// Split a caption into word and punctuation tokens.  Hyphenated words stay
/// together ("box-office"); other punctuation becomes its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '-' || ch == '\'' {
            current.push(ch);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if !ch.is_whitespace() {
                tokens.push(ch.to_string());
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Tag a token stream.  `first_word` handling: sentence-initial
/// capitalization is not evidence of a proper noun, so the first word falls
/// through to the ordinary rules.
pub fn tag_tokens(tokens: &[String]) -> Vec<TaggedWord> {
    let mut tagged = Vec::with_capacity(tokens.len());
    let mut seen_word = false;
    for token in tokens {
        let lower = token.to_ascii_lowercase();
        let first_char = token.chars().next().unwrap_or(' ');
        let tag = if !first_char.is_alphanumeric() {
            Tag::Punct
        } else if is_all_digits_or_ordinal(&lower) || looks_like_date(token) {
            if MONTHS.contains(&lower.trim_end_matches('.').trim_end_matches(|c: char| c.is_ascii_digit())) {
                Tag::DateWord
            } else {
                Tag::Number
            }
        } else if MONTHS.contains(&lower.trim_end_matches('.')) || WEEKDAYS.contains(&lower.as_str()) {
            Tag::DateWord
        } else if let Some(tag) = dictionary_override(&lower) {
            tag
        } else if DETERMINERS.contains(&lower.as_str()) {
            Tag::Determiner
        } else if PREPOSITIONS.contains(&lower.as_str()) {
            Tag::Preposition
        } else if CONJUNCTIONS.contains(&lower.as_str()) {
            Tag::Conjunction
        } else if AUX_VERBS.contains(&lower.as_str()) {
            Tag::Verb
        } else if seen_word && first_char.is_uppercase() {
            Tag::Proper
        } else if lower.ends_with("ing")
            || (lower.ends_with("ed") && !lower.ends_with("eed") && lower.len() > 4)
        {
            Tag::Verb
        } else if lower.ends_with("est") && lower.len() > 4 {
            Tag::Adjective
        } else if lower.ends_with("ly") && lower.len() > 3 {
            Tag::Adverb
        } else if lower.ends_with("ous") || lower.ends_with("ful") || lower.ends_with("less") {
            Tag::Adjective
        } else {
            Tag::Noun { plural: plural_common_noun(&lower) }
        };
        if first_char.is_alphanumeric() {
            seen_word = true;
        }
        tagged.push(TaggedWord { word: token.clone(), lower, tag });
    }
    tagged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(text: &str) -> Vec<(String, Tag)> {
        tag_tokens(&tokenize(text)).into_iter().map(|t| (t.lower, t.tag)).collect()
    }

    #[test]
    fn caption_style_modifiers_do_not_tag_as_nouns() {
        let tagged = tags("Leading export partners");
        assert_eq!(tagged[0].1, Tag::Verb);
        assert_eq!(tagged[1].1, Tag::Verb);
        assert_eq!(tagged[2].1, Tag::Noun { plural: true });

        let tagged = tags("Mobile operating systems market share worldwide");
        assert_eq!(tagged[0].1, Tag::Adjective);
        assert_eq!(tagged[1].1, Tag::Verb);
        assert_eq!(tagged[2].1, Tag::Noun { plural: true });
        assert_eq!(tagged[3].1, Tag::Noun { plural: false });
        assert_eq!(tagged[4].1, Tag::Noun { plural: false });
        assert_eq!(tagged[5].1, Tag::Adverb);
    }

    #[test]
    fn proper_nouns_need_a_preceding_word() {
        let tagged = tags("Box office revenue of movies in North America");
        let north = tagged.iter().find(|(w, _)| w == "north").unwrap();
        assert_eq!(north.1, Tag::Proper);
        // Sentence-initial "Box" is a common noun, not a proper noun.
        assert_eq!(tagged[0].1, Tag::Noun { plural: false });
    }

    #[test]
    fn dates_numbers_and_punctuation() {
        let tagged = tags("from Dec 26, 2016 to Jan 1, 2017");
        assert_eq!(tagged[1].1, Tag::DateWord);
        assert_eq!(tagged[2].1, Tag::Number);
        assert_eq!(tagged[3].1, Tag::Punct);
        assert_eq!(tagged[4].1, Tag::Number);
        assert_eq!(tagged[5].1, Tag::Preposition);
    }

    #[test]
    fn singularize_handles_common_patterns() {
        assert_eq!(singularize("movies"), "movie");
        assert_eq!(singularize("countries"), "country");
        assert_eq!(singularize("branches"), "branch");
        assert_eq!(singularize("labels"), "label");
        assert_eq!(singularize("share"), "share");
        assert_eq!(singularize("status"), "status");
        assert_eq!(singularize("classes"), "class");
    }

    #[test]
    fn suffix_rules() {
        let tagged = tags("the highest grossing movies performed strongly");
        assert_eq!(tagged[0].1, Tag::Determiner);
        assert_eq!(tagged[1].1, Tag::Adjective);
        assert_eq!(tagged[2].1, Tag::Verb);
        assert_eq!(tagged[3].1, Tag::Noun { plural: true });
        assert_eq!(tagged[4].1, Tag::Verb);
        assert_eq!(tagged[5].1, Tag::Adverb);
    }
}
