//! Quantifiability scoring for caption nouns.
//!
//! Deciding whether a noun names a measurable quantity ("revenue", "share")
//! or an object category ("partners", "movies") is the core judgment call
//! in caption analysis.  The scoring is pluggable so a richer source (a
//! word-embedding similarity model, a domain glossary) can slot in; the
//! built-in provider is a curated list seeded with direct synonyms of
//! quantifiability and extended with common measure nouns from statistical
//! table captions.

use std::collections::HashMap;

/// Scores words by how strongly they name a measurable quantity.
pub trait LexiconProvider {
    /// Score in [0, 1]; 1.0 means "this word directly denotes a quantity".
    /// Unknown words score 0.0.  Callers pass lowercase singular forms.
    fn quant_score(&self, word: &str) -> f64;

    /// Threshold above which a noun is treated as quantitative.
    fn quant_threshold(&self) -> f64 {
        0.5
    }
}

/// Direct synonyms of quantifiability; these anchor the lexicon at 1.0.
pub const QUANT_SEEDS: [&str; 8] =
    ["value", "measure", "number", "numeric", "quantity", "total", "amount", "percent"];

/// Curated quantitative-noun lexicon.
pub struct CuratedLexicon {
    scores: HashMap<&'static str, f64>,
}

impl Default for CuratedLexicon {
    fn default() -> Self {
        Self::new()
    }
}

impl CuratedLexicon {
    pub fn new() -> Self {
        let mut scores = HashMap::new();
        for seed in QUANT_SEEDS {
            scores.insert(seed, 1.0);
        }
        // Percent-like and ratio-like measures.
        for w in ["percentage", "share", "proportion", "ratio", "rate", "index", "margin"] {
            scores.insert(w, 0.85);
        }
        // Money.
        for w in [
            "revenue", "sales", "price", "cost", "income", "profit", "expenditure", "spending",
            "budget", "wage", "salary", "turnover", "earnings", "funding", "investment", "debt",
            "deficit", "surplus", "valuation", "gdp", "fare", "fee", "tax", "premium", "payout",
            "payroll", "balance", "savings", "capitalization",
        ] {
            scores.insert(w, 0.9);
        }
        // Physical and statistical measures.
        for w in [
            "volume", "weight", "height", "length", "width", "depth", "area", "size", "capacity",
            "density", "temperature", "speed", "distance", "frequency", "score", "population",
            "consumption", "production", "output", "emissions", "yield", "precipitation",
            "rainfall", "snowfall", "pressure", "elevation", "altitude", "mileage", "horsepower",
            "energy", "concentration", "dosage", "growth", "inflation",
        ] {
            scores.insert(w, 0.8);
        }
        // Counted outcomes that captions treat as quantities.
        for w in [
            "count", "sum", "average", "median", "headcount", "attendance", "enrollment",
            "viewership", "readership", "ridership", "circulation", "mortality", "fertility",
            "expectancy", "incidence", "prevalence", "probability", "likelihood", "odds",
            "downloads", "installs", "clicks", "impressions", "conversions", "pageviews",
            "subscriptions", "transactions", "bookings", "cancellations", "refunds",
            "fatalities", "casualties", "deaths", "births", "throughput", "bandwidth",
            "latency", "occupancy", "utilization", "efficiency", "unemployment",
            "users", "visitors", "subscribers", "followers", "viewers", "visits",
            "sessions", "registrations", "streams", "shipments",
        ] {
            scores.insert(w, 0.7);
        }
        // Weaker but still quantity-leaning.
        for w in ["figure", "level", "points", "minimum", "maximum", "audience"] {
            scores.insert(w, 0.6);
        }
        CuratedLexicon { scores }
    }

    /// Number of scored words (seed set included).
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// All entries, sorted by word, for the CLI dump.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut entries: Vec<(&'static str, f64)> =
            self.scores.iter().map(|(w, s)| (*w, *s)).collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        entries
    }
}

impl LexiconProvider for CuratedLexicon {
    fn quant_score(&self, word: &str) -> f64 {
        self.scores.get(word).copied().unwrap_or(0.0)
    }
}

/// Lexicon read from a plain-text word list: one term per line, blank
/// lines and `#` comments ignored.  Listed words score 1.0, everything
/// else 0.0 — an all-or-nothing domain glossary.
pub struct FileLexicon {
    words: std::collections::BTreeSet<String>,
}

impl FileLexicon {
    pub fn parse(text: &str) -> FileLexicon {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_ascii_lowercase())
            .collect();
        FileLexicon { words }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl LexiconProvider for FileLexicon {
    fn quant_score(&self, word: &str) -> f64 {
        if self.words.contains(word) {
            1.0
        } else {
            0.0
        }
    }
}
