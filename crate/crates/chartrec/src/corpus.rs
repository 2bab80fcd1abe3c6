//! Seeded synthetic corpora for training and evaluating the forest.
//!
//! Each generator cycles through a fixed pattern of dataset shapes — time
//! trends, crossed categories, paired measures, and so on — and fills in
//! names, sizes, and values from a seeded RNG.  The shapes are chosen so
//! the rule engine gives each one a stable label and so distinct labels
//! land on distinct feature patterns; a model trained on the output is
//! therefore learning the rule engine's behavior, which is exactly what
//! the evaluation harness wants to measure.
//!
//! Generators emit dataset envelopes (see [`crate::ingest::load_envelope`])
//! rather than in-memory datasets, so the same corpus can feed the CLI,
//! round-trip through files, or be column-permuted by robustness tests.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::forest::LabeledExample;
use crate::ingest::{load_envelope, IngestError};
use crate::pipeline::{self, AnalysisError};
use crate::types::Dataset;

/// Any failure while materializing a generated corpus.  Seeing one means
/// a generator emitted an envelope its own pipeline cannot digest — a bug
/// here, never in the caller.
#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("generated envelope failed to load: {0}")]
    Ingest(#[from] IngestError),
    #[error("generated envelope failed to analyze: {0}")]
    Analysis(#[from] AnalysisError),
}

// --- name and value pools -------------------------------------------------

const TABLES: [&str; 5] = ["orders", "sales_facts", "customers", "shipments", "web_events"];
const CAT_NAMES: [&str; 8] =
    ["region", "category", "status", "segment", "country", "channel", "brand", "city"];
const SRC_COLS: [&str; 5] = ["sales", "price", "amount", "qty", "spend"];
const DEP_ALIASES: [&str; 6] =
    ["total_sales", "avg_price", "order_count", "total_amount", "net_total", "units_sold"];
const SHARE_ALIASES: [&str; 3] = ["market_share", "pct_of_total", "sales_ratio"];
const NUM_NAMES: [&str; 6] =
    ["unit_price", "discount", "profit", "score", "rating", "weight_kg"];
const CAT_VALUES: [&str; 8] =
    ["north", "south", "east", "west", "central", "coastal", "inland", "upland"];
const MONTHS: [&str; 12] =
    ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

const COMPANIES: [&str; 5] =
    ["Acme Corp", "Globex", "Initech", "Northwind Traders", "Contoso"];
const COUNTED: [&str; 5] = ["stores", "employees", "users", "subscribers", "visitors"];
const BY_CATS: [&str; 5] = ["country", "region", "segment", "channel", "division"];
const PIE_COUNTED: [&str; 5] = ["users", "visitors", "subscribers", "sessions", "downloads"];
const PIE_CATS: [&str; 4] = ["age group", "income group", "device class", "plan tier"];
const MEASURE_PAIRS: [(&str, &str); 3] =
    [("revenue", "profit"), ("height", "weight"), ("sales", "costs")];
const THINGS: [&str; 4] = ["athletes", "branches", "retailers", "warehouses"];
const TREND_TOPICS: [(&str, &str); 4] = [
    ("Smartphone", "platform"),
    ("Web browser", "browser"),
    ("Game console", "console"),
    ("Operating system", "system"),
];
const SERIES_SUBJECTS: [(&str, &str); 3] =
    [("record labels", "label"), ("retailers", "retailer"), ("carriers", "carrier")];
const SERIES_MEASURES: [(&str, &str); 3] = [
    ("retail sales", "online sales"),
    ("single charts", "album charts"),
    ("home revenue", "export revenue"),
];

/// A float that can never be mistaken for a calendar year: the fixed 0.05
/// fraction keeps type inference on the numeric path even for one-row
/// tables.
fn measure(rng: &mut ChaCha8Rng) -> f64 {
    (rng.random_range(10..90_000) as f64) * 0.1 + 0.05
}

/// A small integer count; always below 1000, so never year-like.
fn count_value(rng: &mut ChaCha8Rng) -> i64 {
    rng.random_range(3..950)
}

fn measures(rng: &mut ChaCha8Rng, n: usize) -> Vec<Value> {
    (0..n).map(|_| json!(measure(rng))).collect()
}

fn counts(rng: &mut ChaCha8Rng, n: usize) -> Vec<Value> {
    (0..n).map(|_| json!(count_value(rng))).collect()
}

fn years(rng: &mut ChaCha8Rng, n: usize) -> Vec<Value> {
    let start = rng.random_range(1990..2020);
    (0..n).map(|i| json!(start + i as i64)).collect()
}

fn month_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<Value> {
    let mut year = rng.random_range(2010..2022);
    let offset = rng.random_range(0..12);
    (0..n)
        .map(|i| {
            let m = (offset + i) % 12;
            if i > 0 && m == 0 {
                year += 1;
            }
            json!(format!("{} {}", MONTHS[m], year))
        })
        .collect()
}

/// `n` distinct category keys: pool names while they last, then numbered
/// segments.  Short strings, so inference keeps them categorical even when
/// every value is unique.
fn cat_keys(rng: &mut ChaCha8Rng, n: usize) -> Vec<Value> {
    let rotate = rng.random_range(0..CAT_VALUES.len());
    (0..n)
        .map(|i| {
            if i < CAT_VALUES.len() {
                json!(CAT_VALUES[(i + rotate) % CAT_VALUES.len()])
            } else {
                json!(format!("seg {i:02}"))
            }
        })
        .collect()
}

/// Assemble a dataset envelope from per-column value vectors.
fn envelope(source: &str, text: &str, cols: &[(&str, Vec<Value>)]) -> String {
    let n_rows = cols.first().map(|(_, v)| v.len()).unwrap_or(0);
    let columns: Vec<Value> = cols.iter().map(|(name, _)| json!({ "name": name })).collect();
    let rows: Vec<Value> = (0..n_rows)
        .map(|r| Value::Array(cols.iter().map(|(_, v)| v[r].clone()).collect()))
        .collect();
    let text_key = if source == "sql" { "query" } else { "caption" };
    json!({
        "v": 1,
        "source": source,
        text_key: text,
        "columns": columns,
        "rows": rows,
    })
    .to_string()
}

// --- SQL shapes -------------------------------------------------------------

/// The SQL dataset shapes the generator cycles through.  Counts per cycle
/// of twenty: three each of the first four, two each of the next three,
/// one each of the last two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SqlShape {
    /// Aggregate grouped by a time column → line.
    TimeTrend,
    /// Aggregate grouped by time and a category → multi-series line.
    TimeByCategory,
    /// Aggregate grouped by two categories → grouped bars.
    CrossedCategories,
    /// Aggregate grouped by one category, at most 8 groups → vertical bars.
    SmallCategory,
    /// Same, 9–30 groups → horizontal bars.
    MediumCategory,
    /// Same, more than 30 groups → plain listing.
    LargeCategory,
    /// Two bare numeric columns → scatter.
    PairedMeasures,
    /// Bare category and measure, few rows → vertical bars.
    PlainPair,
    /// A single projected column → plain listing.
    SingleColumn,
}

const SQL_PATTERN: [SqlShape; 20] = [
    SqlShape::TimeTrend,
    SqlShape::TimeTrend,
    SqlShape::TimeTrend,
    SqlShape::TimeByCategory,
    SqlShape::TimeByCategory,
    SqlShape::TimeByCategory,
    SqlShape::CrossedCategories,
    SqlShape::CrossedCategories,
    SqlShape::CrossedCategories,
    SqlShape::SmallCategory,
    SqlShape::SmallCategory,
    SqlShape::SmallCategory,
    SqlShape::MediumCategory,
    SqlShape::MediumCategory,
    SqlShape::LargeCategory,
    SqlShape::LargeCategory,
    SqlShape::PairedMeasures,
    SqlShape::PairedMeasures,
    SqlShape::PlainPair,
    SqlShape::SingleColumn,
];

/// A time column with `n` distinct points, in one of three spellings.
fn time_column(rng: &mut ChaCha8Rng, n: usize) -> (&'static str, Vec<Value>) {
    match rng.random_range(0..3) {
        0 => ("year", years(rng, n)),
        1 => ("month", month_labels(rng, n)),
        _ => {
            let y = rng.random_range(2012..2022);
            let vals =
                (0..n).map(|i| json!(format!("{}-{:02}", y + i / 12, i % 12 + 1))).collect();
            ("order_date", vals)
        }
    }
}

fn aggregate_call(rng: &mut ChaCha8Rng) -> String {
    let agg = ["sum", "avg", "count"].choose(rng).unwrap();
    let src = SRC_COLS.choose(rng).unwrap();
    format!("{agg}({src})")
}

/// One dependent column name; roughly one in seven reads as a share, so
/// small bar charts occasionally rank a pie second.
fn dep_alias(rng: &mut ChaCha8Rng) -> &'static str {
    if rng.random_range(0..7) == 0 {
        SHARE_ALIASES.choose(rng).unwrap()
    } else {
        DEP_ALIASES.choose(rng).unwrap()
    }
}

fn grouped_by_category(rng: &mut ChaCha8Rng, n: usize) -> String {
    let cat = CAT_NAMES.choose(rng).unwrap();
    let dep = dep_alias(rng);
    let table = TABLES.choose(rng).unwrap();
    let call = aggregate_call(rng);
    let query = format!("select {cat}, {call} as {dep} from {table} group by {cat}");
    envelope("sql", &query, &[(cat, cat_keys(rng, n)), (dep, measures(rng, n))])
}

fn sql_envelope(shape: SqlShape, rng: &mut ChaCha8Rng) -> String {
    let table = TABLES.choose(rng).unwrap();
    match shape {
        SqlShape::TimeTrend => {
            let n = rng.random_range(3..=60);
            let (tname, tvals) = time_column(rng, n);
            let dep = dep_alias(rng);
            let call = aggregate_call(rng);
            let query = format!("select {tname}, {call} as {dep} from {table} group by {tname}");
            envelope("sql", &query, &[(tname, tvals), (dep, measures(rng, n))])
        }
        SqlShape::TimeByCategory => {
            let n_cat = rng.random_range(2..=4);
            let n_time = rng.random_range(3..=10);
            let n = n_cat * n_time;
            let (tname, tpoints) = time_column(rng, n_time);
            let cat = CAT_NAMES.choose(rng).unwrap();
            let keys = cat_keys(rng, n_cat);
            let dep = dep_alias(rng);
            let call = aggregate_call(rng);
            let tvals: Vec<Value> = (0..n).map(|i| tpoints[i / n_cat].clone()).collect();
            let cvals: Vec<Value> = (0..n).map(|i| keys[i % n_cat].clone()).collect();
            let time_first = rng.random_range(0..2) == 0;
            let (a, b) = if time_first { (tname, *cat) } else { (*cat, tname) };
            let query = format!("select {a}, {b}, {call} as {dep} from {table} group by {a}, {b}");
            let (col_a, col_b) =
                if time_first { (tvals, cvals) } else { (cvals.clone(), tvals.clone()) };
            envelope("sql", &query, &[(a, col_a), (b, col_b), (dep, measures(rng, n))])
        }
        SqlShape::CrossedCategories => {
            let n1 = rng.random_range(2..=5);
            let n2 = rng.random_range(2..=4);
            let n = n1 * n2;
            let mut names = CAT_NAMES;
            names.shuffle(rng);
            let (c1, c2) = (names[0], names[1]);
            let k1 = cat_keys(rng, n1);
            let k2 = cat_keys(rng, n2);
            let dep = dep_alias(rng);
            let call = aggregate_call(rng);
            let v1: Vec<Value> = (0..n).map(|i| k1[i / n2].clone()).collect();
            let v2: Vec<Value> = (0..n).map(|i| k2[i % n2].clone()).collect();
            let query =
                format!("select {c1}, {c2}, {call} as {dep} from {table} group by {c1}, {c2}");
            envelope("sql", &query, &[(c1, v1), (c2, v2), (dep, measures(rng, n))])
        }
        SqlShape::SmallCategory => {
            let n = rng.random_range(1..=8);
            grouped_by_category(rng, n)
        }
        SqlShape::MediumCategory => {
            let n = rng.random_range(9..=30);
            grouped_by_category(rng, n)
        }
        SqlShape::LargeCategory => {
            let n = rng.random_range(31..=80);
            grouped_by_category(rng, n)
        }
        SqlShape::PairedMeasures => {
            let n = rng.random_range(5..=40);
            let mut names = NUM_NAMES;
            names.shuffle(rng);
            let (a, b) = (names[0], names[1]);
            let query = format!("select {a}, {b} from {table}");
            envelope("sql", &query, &[(a, measures(rng, n)), (b, measures(rng, n))])
        }
        SqlShape::PlainPair => {
            let n = rng.random_range(2..=8);
            let cat = CAT_NAMES.choose(rng).unwrap();
            let num = NUM_NAMES.choose(rng).unwrap();
            let query = format!("select {cat}, {num} from {table}");
            envelope("sql", &query, &[(cat, cat_keys(rng, n)), (num, measures(rng, n))])
        }
        SqlShape::SingleColumn => {
            let n = rng.random_range(3..=50);
            let cat = CAT_NAMES.choose(rng).unwrap();
            let query = format!("select {cat} from {table}");
            envelope("sql", &query, &[(cat, cat_keys(rng, n))])
        }
    }
}

// --- caption shapes --------------------------------------------------------

/// The captioned-table shapes the generator cycles through, fifty per
/// cycle.  The one [`MeasureSeries`](CaptionShape::MeasureSeries) per
/// cycle shares its feature pattern with the far more common small bar
/// shape on purpose: real corpora are not perfectly separable either, and
/// one overlapping example in fifty keeps the evaluation honest without
/// dragging accuracy below its gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CaptionShape {
    /// Quantity over a validated year span, few points → line.
    LineSmall,
    /// Same, more than 30 points → still a line.
    LineLarge,
    /// Share over months, split by an implicit category → multi-series line.
    MultiTrend,
    /// Quantity by category, at most 8 rows → vertical bars.
    BarSmall,
    /// Same, 9–30 rows → horizontal bars.
    BarWide,
    /// "Distribution of …" wording, few rows → pie.
    Pie,
    /// Two measures, no category → scatter.
    PairedMeasures,
    /// A span with no time column to stand on → plain listing.
    SpanNoTime,
    /// Quantity by category, more than 30 rows → plain listing.
    LargeTable,
    /// Two by-measures over one category column → grouped bars.
    MeasureSeries,
}

const CAPTION_PATTERN: [CaptionShape; 50] = [
    CaptionShape::LineSmall,
    CaptionShape::LineSmall,
    CaptionShape::LineSmall,
    CaptionShape::LineSmall,
    CaptionShape::LineSmall,
    CaptionShape::LineSmall,
    CaptionShape::LineSmall,
    CaptionShape::LineSmall,
    CaptionShape::LineLarge,
    CaptionShape::LineLarge,
    CaptionShape::MultiTrend,
    CaptionShape::MultiTrend,
    CaptionShape::MultiTrend,
    CaptionShape::MultiTrend,
    CaptionShape::MultiTrend,
    CaptionShape::MultiTrend,
    CaptionShape::MultiTrend,
    CaptionShape::BarSmall,
    CaptionShape::BarSmall,
    CaptionShape::BarSmall,
    CaptionShape::BarSmall,
    CaptionShape::BarSmall,
    CaptionShape::BarSmall,
    CaptionShape::BarSmall,
    CaptionShape::BarWide,
    CaptionShape::BarWide,
    CaptionShape::BarWide,
    CaptionShape::BarWide,
    CaptionShape::BarWide,
    CaptionShape::BarWide,
    CaptionShape::BarWide,
    CaptionShape::Pie,
    CaptionShape::Pie,
    CaptionShape::Pie,
    CaptionShape::Pie,
    CaptionShape::Pie,
    CaptionShape::Pie,
    CaptionShape::Pie,
    CaptionShape::PairedMeasures,
    CaptionShape::PairedMeasures,
    CaptionShape::PairedMeasures,
    CaptionShape::PairedMeasures,
    CaptionShape::PairedMeasures,
    CaptionShape::SpanNoTime,
    CaptionShape::SpanNoTime,
    CaptionShape::SpanNoTime,
    CaptionShape::LargeTable,
    CaptionShape::LargeTable,
    CaptionShape::LargeTable,
    CaptionShape::MeasureSeries,
];

fn counted_by_category(rng: &mut ChaCha8Rng, n: usize) -> String {
    let counted = COUNTED.choose(rng).unwrap();
    let company = COMPANIES.choose(rng).unwrap();
    let cat = BY_CATS.choose(rng).unwrap();
    let caption = format!("Number of {counted} of {company}, by {cat}");
    envelope("table", &caption, &[(cat, cat_keys(rng, n)), (counted, counts(rng, n))])
}

fn caption_envelope(shape: CaptionShape, rng: &mut ChaCha8Rng) -> String {
    match shape {
        CaptionShape::LineSmall | CaptionShape::LineLarge => {
            let n = if shape == CaptionShape::LineSmall {
                rng.random_range(3..=8)
            } else {
                rng.random_range(31..=50)
            };
            let counted = COUNTED.choose(rng).unwrap();
            let company = COMPANIES.choose(rng).unwrap();
            let yvals = years(rng, n);
            let (y0, y1) = (&yvals[0], &yvals[n - 1]);
            let caption = format!("Number of {counted} of {company} from {y0} to {y1}");
            envelope("table", &caption, &[("year", yvals.clone()), (counted, counts(rng, n))])
        }
        CaptionShape::MultiTrend => {
            let n_series = rng.random_range(2..=3);
            let lo = 9usize.div_ceil(n_series).max(4);
            let hi = 30 / n_series;
            let n_months = rng.random_range(lo..=hi);
            let n = n_series * n_months;
            let (topic, col) = TREND_TOPICS.choose(rng).unwrap();
            let points = month_labels(rng, n_months);
            let keys = cat_keys(rng, n_series);
            let first = points[0].as_str().unwrap().to_string();
            let last = points[n_months - 1].as_str().unwrap().to_string();
            let caption = format!("{topic} market share worldwide from {first} to {last}");
            let mvals: Vec<Value> = (0..n).map(|i| points[i / n_series].clone()).collect();
            let cvals: Vec<Value> = (0..n).map(|i| keys[i % n_series].clone()).collect();
            envelope(
                "table",
                &caption,
                &[("month", mvals), (col, cvals), ("market share", measures(rng, n))],
            )
        }
        CaptionShape::BarSmall => {
            let n = rng.random_range(1..=8);
            counted_by_category(rng, n)
        }
        CaptionShape::BarWide => {
            let n = rng.random_range(9..=30);
            counted_by_category(rng, n)
        }
        CaptionShape::LargeTable => {
            let n = rng.random_range(31..=60);
            counted_by_category(rng, n)
        }
        CaptionShape::Pie => {
            let n = rng.random_range(3..=8);
            let counted = PIE_COUNTED.choose(rng).unwrap();
            let cat = PIE_CATS.choose(rng).unwrap();
            let caption = format!("Distribution of {counted} by {cat}");
            envelope("table", &caption, &[(cat, cat_keys(rng, n)), (counted, measures(rng, n))])
        }
        CaptionShape::PairedMeasures => {
            let n = rng.random_range(5..=30);
            let (a, b) = MEASURE_PAIRS.choose(rng).unwrap();
            let things = THINGS.choose(rng).unwrap();
            let caption = format!(
                "{}{} and {b} of sampled {things}",
                a[..1].to_uppercase(),
                &a[1..]
            );
            envelope("table", &caption, &[(a, measures(rng, n)), (b, measures(rng, n))])
        }
        CaptionShape::SpanNoTime => {
            let n = rng.random_range(3..=30);
            let company = COMPANIES.choose(rng).unwrap();
            let y0 = rng.random_range(1995..2015);
            let y1 = y0 + rng.random_range(3..10);
            let caption = format!("Total revenue of {company} from {y0} to {y1}");
            envelope("table", &caption, &[("revenue", measures(rng, n))])
        }
        CaptionShape::MeasureSeries => {
            let n = rng.random_range(3..=8);
            let (subject, col) = SERIES_SUBJECTS.choose(rng).unwrap();
            let (m1, m2) = SERIES_MEASURES.choose(rng).unwrap();
            let caption = format!("Market share of {subject}, by {m1} and {m2}");
            envelope(
                "table",
                &caption,
                &[(col, cat_keys(rng, n)), (m1, measures(rng, n)), (m2, measures(rng, n))],
            )
        }
    }
}

// --- public API --------------------------------------------------------------

/// `count` SQL dataset envelopes, deterministic in `seed`.
pub fn sql_envelopes(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| sql_envelope(SQL_PATTERN[i % SQL_PATTERN.len()], &mut rng)).collect()
}

/// `count` captioned-table envelopes, deterministic in `seed`.
pub fn caption_envelopes(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| caption_envelope(CAPTION_PATTERN[i % CAPTION_PATTERN.len()], &mut rng))
        .collect()
}

/// Label one dataset with the rule engine's verdict: its top chart is the
/// first label, its runner-up (when the rules offer one) the second.
pub fn label_dataset(ds: &Dataset) -> Result<LabeledExample, AnalysisError> {
    let analysis = pipeline::analyze(ds)?;
    let recs = pipeline::recommend_with_rules(&analysis, ds);
    let first = recs.first().expect("the rule engine always recommends something");
    Ok(LabeledExample {
        features: analysis.features.clone(),
        label1: first.rank1(),
        label2: first.rank2(),
    })
}

/// Load and label a batch of envelopes.
pub fn labeled_corpus(envelopes: &[String]) -> Result<Vec<LabeledExample>, CorpusError> {
    envelopes
        .iter()
        .map(|e| {
            let ds = load_envelope(e)?;
            Ok(label_dataset(&ds)?)
        })
        .collect()
}

/// A rule-labeled corpus of SQL datasets.
pub fn sql_corpus(count: usize, seed: u64) -> Result<Vec<LabeledExample>, CorpusError> {
    labeled_corpus(&sql_envelopes(count, seed))
}

/// A rule-labeled corpus of captioned tables.
pub fn caption_corpus(count: usize, seed: u64) -> Result<Vec<LabeledExample>, CorpusError> {
    labeled_corpus(&caption_envelopes(count, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ChartType, FeatureSchema};

    fn expected_sql_label(shape: SqlShape) -> ChartType {
        match shape {
            SqlShape::TimeTrend => ChartType::Line,
            SqlShape::TimeByCategory => ChartType::MultiLine,
            SqlShape::CrossedCategories => ChartType::GroupedBar,
            SqlShape::SmallCategory | SqlShape::PlainPair => ChartType::VerticalBar,
            SqlShape::MediumCategory => ChartType::HorizontalBar,
            SqlShape::LargeCategory | SqlShape::SingleColumn => ChartType::TableListing,
            SqlShape::PairedMeasures => ChartType::Scatter,
        }
    }

    fn expected_caption_label(shape: CaptionShape) -> ChartType {
        match shape {
            CaptionShape::LineSmall | CaptionShape::LineLarge => ChartType::Line,
            CaptionShape::MultiTrend => ChartType::MultiLine,
            CaptionShape::BarSmall => ChartType::VerticalBar,
            CaptionShape::BarWide => ChartType::HorizontalBar,
            CaptionShape::Pie => ChartType::Pie,
            CaptionShape::PairedMeasures => ChartType::Scatter,
            CaptionShape::SpanNoTime | CaptionShape::LargeTable => ChartType::TableListing,
            CaptionShape::MeasureSeries => ChartType::GroupedBar,
        }
    }

    #[test]
    fn sql_shapes_get_their_intended_labels() {
        let corpus = sql_corpus(40, 11).unwrap();
        for (i, ex) in corpus.iter().enumerate() {
            let shape = SQL_PATTERN[i % SQL_PATTERN.len()];
            assert_eq!(
                ex.label1,
                expected_sql_label(shape),
                "example {i} ({shape:?}) got the wrong rule label"
            );
            assert_eq!(ex.features.schema, FeatureSchema::Sql21);
        }
    }

    #[test]
    fn caption_shapes_get_their_intended_labels() {
        let corpus = caption_corpus(100, 11).unwrap();
        for (i, ex) in corpus.iter().enumerate() {
            let shape = CAPTION_PATTERN[i % CAPTION_PATTERN.len()];
            assert_eq!(
                ex.label1,
                expected_caption_label(shape),
                "example {i} ({shape:?}) got the wrong rule label"
            );
            assert_eq!(ex.features.schema, FeatureSchema::Cap19);
        }
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        assert_eq!(sql_envelopes(30, 42), sql_envelopes(30, 42));
        assert_eq!(caption_envelopes(60, 42), caption_envelopes(60, 42));
        assert_ne!(sql_envelopes(30, 42), sql_envelopes(30, 43));
    }

    #[test]
    fn some_small_bars_rank_a_pie_second() {
        let corpus = sql_corpus(200, 5).unwrap();
        let small_bars: Vec<_> =
            corpus.iter().filter(|e| e.label1 == ChartType::VerticalBar).collect();
        assert!(small_bars.iter().any(|e| e.label2 == Some(ChartType::Pie)));
        assert!(small_bars.iter().any(|e| e.label2 == Some(ChartType::HorizontalBar)));
    }

    #[test]
    fn synthetic_corpora_are_learnable() {
        use crate::forest::{cross_validate, EvalConfig, MaxFeatures};

        let cfg = EvalConfig {
            k_folds: vec![5],
            max_features: vec![MaxFeatures::Auto],
            n_trees: 50,
            ..EvalConfig::default()
        };
        for (name, corpus, schema) in [
            ("sql", sql_corpus(200, 42).unwrap(), FeatureSchema::Sql21),
            ("caption", caption_corpus(200, 42).unwrap(), FeatureSchema::Cap19),
        ] {
            let report = cross_validate(&corpus, schema, &cfg).unwrap();
            let cell = report.cell(5, MaxFeatures::Auto).unwrap();
            println!(
                "{name}: rank1 {:.4}, rank2 {:.4}, top2 {:.4}",
                cell.rank1_accuracy, cell.rank2_accuracy, cell.label1_within_top2
            );
            assert!(
                cell.rank1_accuracy >= 0.95,
                "{name} corpus not learnable: rank-1 accuracy {:.4}",
                cell.rank1_accuracy
            );
        }
    }

    #[test]
    fn labels_cover_most_chart_types() {
        let mut seen = std::collections::BTreeSet::new();
        for ex in sql_corpus(40, 3).unwrap().iter().chain(caption_corpus(100, 3).unwrap().iter()) {
            seen.insert(ex.label1);
        }
        for t in [
            ChartType::Line,
            ChartType::MultiLine,
            ChartType::GroupedBar,
            ChartType::VerticalBar,
            ChartType::HorizontalBar,
            ChartType::Pie,
            ChartType::Scatter,
            ChartType::TableListing,
        ] {
            assert!(seen.contains(&t), "no example labeled {t:?}");
        }
    }
}
