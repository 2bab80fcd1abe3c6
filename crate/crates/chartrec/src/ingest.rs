//! Input loading: the JSON dataset envelope, raw CSV tables, and column
//! type inference.
//!
//! Both analyzers consume a [`Dataset`].  A dataset arrives either as a
//! versioned JSON envelope (a query or caption plus columns and rows) or as
//! a bare CSV table paired with a caption on the command line.  Column types
//! may be declared in the envelope; anything undeclared is inferred from the
//! column name and its values.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::types::{Column, ColumnType, DataSource, Dataset, Scalar};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed envelope: {0}")]
    MalformedJson(String),
    #[error("envelope is missing required field `{0}`")]
    MissingField(&'static str),
    #[error("row {row} has {got} cells but the table declares {expected} columns")]
    ArityMismatch { row: usize, got: usize, expected: usize },
    #[error("CSV record {row} does not match the header width")]
    RaggedRow { row: usize },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("schema hint references unknown column `{0}`")]
    UnknownColumn(String),
    #[error("table has no data rows; a captioned table needs at least one")]
    EmptyTable,
    #[error("failed to read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Envelope format version this crate reads and writes.
pub const ENVELOPE_VERSION: u32 = 1;

#[derive(Deserialize)]
struct EnvelopeColumnDoc {
    name: String,
    #[serde(default)]
    dtype: Option<ColumnType>,
    #[serde(default)]
    primary_key: bool,
}

#[derive(Deserialize)]
struct EnvelopeDoc {
    v: u32,
    source: String,
    #[serde(default)]
    query: Option<String>,
    #[serde(default)]
    caption: Option<String>,
    columns: Vec<EnvelopeColumnDoc>,
    #[serde(default)]
    rows: Vec<Vec<Value>>,
    /// Schema hints: `"pk:<column>": "true"` marks a primary key,
    /// `"dtype:<column>": "<type>"` pins a column type.
    #[serde(default)]
    metadata: std::collections::BTreeMap<String, String>,
}

/// Parse a dataset envelope.
///
/// ```text
/// {
///   "v": 1,
///   "source": "sql" | "table",
///   "query":   "...",                  // required when source is "sql"
///   "caption": "...",                  // required when source is "table"
///   "columns": [{"name": "region", "dtype": "categorical", "primary_key": false}],
///   "rows": [["west", 10], ["east", 12]],
///   "metadata": {"pk:region": "true", "dtype:region": "categorical"}
/// }
/// ```
///
/// `dtype`, `primary_key`, and `metadata` are optional; missing types are
/// inferred, and `pk:`/`dtype:` metadata hints override both declarations
/// and inference (see [`apply_schema_hints`]).
/// A `"table"` envelope with zero rows is rejected ([`IngestError::EmptyTable`]);
/// a `"sql"` envelope may legitimately carry an empty result set.
pub fn load_envelope(json: &str) -> Result<Dataset, IngestError> {
    let doc: EnvelopeDoc =
        serde_json::from_str(json).map_err(|e| IngestError::MalformedJson(e.to_string()))?;
    if doc.v != ENVELOPE_VERSION {
        return Err(IngestError::MalformedJson(format!(
            "unsupported envelope version {} (expected {})",
            doc.v, ENVELOPE_VERSION
        )));
    }
    let source = match doc.source.as_str() {
        "sql" => {
            let query = doc.query.filter(|q| !q.trim().is_empty());
            DataSource::Sql { query: query.ok_or(IngestError::MissingField("query"))? }
        }
        "table" => {
            let caption = doc.caption.filter(|c| !c.trim().is_empty());
            DataSource::Caption { caption: caption.ok_or(IngestError::MissingField("caption"))? }
        }
        other => {
            return Err(IngestError::MalformedJson(format!(
                "unknown source `{other}` (expected \"sql\" or \"table\")"
            )))
        }
    };
    if doc.columns.is_empty() {
        return Err(IngestError::MissingField("columns"));
    }

    let n_cols = doc.columns.len();
    let mut values: Vec<Vec<Scalar>> = vec![Vec::with_capacity(doc.rows.len()); n_cols];
    for (row_idx, row) in doc.rows.iter().enumerate() {
        if row.len() != n_cols {
            return Err(IngestError::ArityMismatch {
                row: row_idx,
                got: row.len(),
                expected: n_cols,
            });
        }
        for (col_idx, cell) in row.iter().enumerate() {
            values[col_idx].push(scalar_from_value(cell, row_idx)?);
        }
    }

    let row_count = doc.rows.len();
    if row_count == 0 && matches!(source, DataSource::Caption { .. }) {
        return Err(IngestError::EmptyTable);
    }

    let mut columns = Vec::with_capacity(n_cols);
    let mut seen = std::collections::BTreeSet::new();
    for (doc_col, vals) in doc.columns.into_iter().zip(values) {
        if !seen.insert(doc_col.name.clone()) {
            return Err(IngestError::DuplicateColumn(doc_col.name));
        }
        let dtype = doc_col.dtype.unwrap_or_else(|| infer_type(&doc_col.name, &vals));
        columns.push(Column {
            name: doc_col.name,
            dtype,
            is_primary_key: doc_col.primary_key,
            values: vals,
        });
    }

    let mut dataset = Dataset { source, columns, row_count };
    apply_schema_hints(&mut dataset, &doc.metadata)?;
    Ok(dataset)
}

/// Apply `pk:`/`dtype:` schema hints to a loaded dataset.
///
/// Hints name columns that must exist ([`IngestError::UnknownColumn`]
/// otherwise) and take precedence over declared and inferred types — they
/// exist to correct both.  Keys without either prefix are ignored, so the
/// map can carry unrelated annotations.
pub fn apply_schema_hints(
    ds: &mut Dataset,
    hints: &std::collections::BTreeMap<String, String>,
) -> Result<(), IngestError> {
    for (key, value) in hints {
        if let Some(name) = key.strip_prefix("pk:") {
            let col = ds
                .columns
                .iter_mut()
                .find(|c| c.name == name)
                .ok_or_else(|| IngestError::UnknownColumn(name.to_string()))?;
            col.is_primary_key = match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                other => {
                    return Err(IngestError::MalformedJson(format!(
                        "hint `{key}` must be a boolean, got `{other}`"
                    )))
                }
            };
        } else if let Some(name) = key.strip_prefix("dtype:") {
            let col = ds
                .columns
                .iter_mut()
                .find(|c| c.name == name)
                .ok_or_else(|| IngestError::UnknownColumn(name.to_string()))?;
            col.dtype = serde_json::from_value(Value::String(value.clone())).map_err(|_| {
                IngestError::MalformedJson(format!("hint `{key}` names unknown type `{value}`"))
            })?;
        }
    }
    Ok(())
}

/// Read and parse an envelope file.
pub fn load_envelope_from_path(path: &Path) -> Result<Dataset, IngestError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    load_envelope(&text)
}

fn scalar_from_value(value: &Value, row: usize) -> Result<Scalar, IngestError> {
    match value {
        Value::Null => Ok(Scalar::Null),
        Value::Bool(b) => Ok(Scalar::Bool(*b)),
        Value::Number(n) => n
            .as_f64()
            .map(Scalar::Number)
            .ok_or_else(|| IngestError::MalformedJson(format!("non-finite number in row {row}"))),
        Value::String(s) => Ok(Scalar::Text(s.clone())),
        Value::Array(_) | Value::Object(_) => Err(IngestError::MalformedJson(format!(
            "row {row} contains a nested value; cells must be scalars"
        ))),
    }
}

/// Serialize a dataset back into envelope JSON (version 1).  Inverse of
/// [`load_envelope`] up to type inference: declared dtypes are always
/// written out, so a round trip preserves the dataset exactly.
pub fn envelope_json(ds: &Dataset, pretty: bool) -> String {
    let columns: Vec<Value> = ds
        .columns
        .iter()
        .map(|c| {
            let mut obj = serde_json::Map::new();
            obj.insert("name".into(), Value::String(c.name.clone()));
            obj.insert("dtype".into(), serde_json::to_value(c.dtype).expect("dtype serializes"));
            if c.is_primary_key {
                obj.insert("primary_key".into(), Value::Bool(true));
            }
            Value::Object(obj)
        })
        .collect();
    let rows: Vec<Value> = (0..ds.row_count)
        .map(|r| {
            Value::Array(
                ds.columns
                    .iter()
                    .map(|c| serde_json::to_value(&c.values[r]).expect("scalar serializes"))
                    .collect(),
            )
        })
        .collect();
    let mut doc = serde_json::Map::new();
    doc.insert("v".into(), Value::from(ENVELOPE_VERSION));
    match &ds.source {
        DataSource::Sql { query } => {
            doc.insert("source".into(), Value::String("sql".into()));
            doc.insert("query".into(), Value::String(query.clone()));
        }
        DataSource::Caption { caption } => {
            doc.insert("source".into(), Value::String("table".into()));
            doc.insert("caption".into(), Value::String(caption.clone()));
        }
    }
    doc.insert("columns".into(), Value::Array(columns));
    doc.insert("rows".into(), Value::Array(rows));
    let doc = Value::Object(doc);
    if pretty {
        serde_json::to_string_pretty(&doc).expect("envelope serializes")
    } else {
        serde_json::to_string(&doc).expect("envelope serializes")
    }
}

/// Load a bare CSV table as a caption-mode dataset.  The first record is
/// the header; empty cells become nulls; every column type is inferred.
pub fn load_csv(csv_text: &str, caption: &str) -> Result<Dataset, IngestError> {
    let (columns, row_count) = csv_columns(csv_text)?;
    if row_count == 0 {
        return Err(IngestError::EmptyTable);
    }
    Ok(Dataset {
        source: DataSource::Caption { caption: caption.to_string() },
        columns,
        row_count,
    })
}

/// Load a CSV file holding a query's result set.  Unlike a captioned
/// table, a result set may legitimately be empty.
pub fn load_sql_result(csv_text: &str, query: &str) -> Result<Dataset, IngestError> {
    let (columns, row_count) = csv_columns(csv_text)?;
    Ok(Dataset { source: DataSource::Sql { query: query.to_string() }, columns, row_count })
}

/// Shared CSV parsing: header names, trimmed cells, inferred types.
fn csv_columns(csv_text: &str) -> Result<(Vec<Column>, usize), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(csv_text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| IngestError::MalformedJson(format!("unreadable CSV header: {e}")))?
        .clone();
    let mut seen = std::collections::BTreeSet::new();
    for name in headers.iter() {
        if !seen.insert(name.to_string()) {
            return Err(IngestError::DuplicateColumn(name.to_string()));
        }
    }

    let n_cols = headers.len();
    let mut values: Vec<Vec<Scalar>> = vec![Vec::new(); n_cols];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { .. } => IngestError::RaggedRow { row: row_idx },
            _ => IngestError::MalformedJson(format!("unreadable CSV record {row_idx}: {e}")),
        })?;
        for (col_idx, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            values[col_idx].push(if cell.is_empty() {
                Scalar::Null
            } else {
                Scalar::Text(cell.to_string())
            });
        }
    }

    let row_count = values.first().map(|v| v.len()).unwrap_or(0);
    let columns = headers
        .iter()
        .zip(values)
        .map(|(name, vals)| Column {
            dtype: infer_type(name, &vals),
            name: name.to_string(),
            is_primary_key: false,
            values: vals,
        })
        .collect();
    Ok((columns, row_count))
}

/// Read and parse a CSV file as a caption-mode dataset.
pub fn load_csv_from_path(path: &Path, caption: &str) -> Result<Dataset, IngestError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    load_csv(&text, caption)
}

/// Tokens in a column name that mark it as time-related.
const TIME_LEXEMES: [&str; 7] = ["year", "month", "date", "day", "week", "quarter", "time"];

/// True when a column *name* reads as time-related: one of its underscore
/// or camelCase tokens is a time lexeme ("year", "order_date"), or a token
/// ends in "date"/"time" as a compound ("orderdate", "shipdate").  "update"
/// and its variants are explicitly excluded.
pub fn time_related_name(name: &str) -> bool {
    for token in name_tokens(name) {
        let token = token.as_str();
        if TIME_LEXEMES.iter().any(|lex| token == *lex || token == format!("{lex}s")) {
            return true;
        }
        if matches!(token, "update" | "updated" | "updates") {
            continue;
        }
        if (token.ends_with("date") || token.ends_with("time")) && token.len() > 4 {
            return true;
        }
    }
    false
}

/// Split a column name on underscores, digits–letter boundaries, and
/// camelCase humps, lowercasing each token.
fn name_tokens(name: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = name.chars().collect();
    for (i, &ch) in chars.iter().enumerate() {
        if ch.is_alphanumeric() {
            // A lower→upper transition starts a new camelCase token.
            if ch.is_uppercase() && i > 0 && chars[i - 1].is_lowercase() && !current.is_empty() {
                tokens.push(current.to_lowercase());
                current = String::new();
            }
            current.push(ch);
        } else if !current.is_empty() {
            tokens.push(current.to_lowercase());
            current = String::new();
        }
    }
    if !current.is_empty() {
        tokens.push(current.to_lowercase());
    }
    tokens
}

const MONTH_NAMES: [&str; 24] = [
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    "january", "february", "march", "april", "mayfull", "june", "july", "august", "september",
    "october", "november", "december",
];

fn is_month_word(word: &str) -> bool {
    let w = word.trim_end_matches('.').to_ascii_lowercase();
    // "mayfull" is a placeholder so the array stays distinct; real "may" is
    // already covered by the short form.
    MONTH_NAMES.iter().any(|m| *m != "mayfull" && *m == w) || w == "sept"
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

/// Heuristic date detector for common tabular formats: ISO dates
/// (2014-01-26, 2014/01/26, 2014-01), slashed dates (01/26/2014), month
/// names with years ("Jan 2014", "December 26, 2016", "26 Dec 2016"),
/// quarters ("Q1 2014"), and fiscal spans ("2014-15").
pub fn looks_like_date(text: &str) -> bool {
    let t = text.trim();
    if t.is_empty() {
        return false;
    }

    // Digit-and-separator forms.
    for sep in ['-', '/'] {
        let parts: Vec<&str> = t.split(sep).collect();
        if parts.len() >= 2 && parts.iter().all(|p| all_digits(p)) {
            let first_is_year = parts[0].len() == 4;
            let last_is_year = parts[parts.len() - 1].len() == 4;
            let fiscal = parts.len() == 2 && parts[0].len() == 4 && parts[1].len() == 2;
            if (first_is_year || last_is_year || fiscal) && parts.len() <= 3 {
                return true;
            }
        }
    }

    // Word forms: any token is a month name and some token is a plausible
    // year or day number.
    let words: Vec<&str> = t.split([' ', ',']).filter(|w| !w.is_empty()).collect();
    if words.len() <= 3 && words.iter().any(|w| is_month_word(w)) {
        let has_number = words.iter().any(|w| {
            all_digits(w) && (w.len() == 4 || (1..=2).contains(&w.len()))
        });
        if has_number || words.len() == 1 {
            return true;
        }
    }

    // Quarters: "Q1 2014", "Q3'15".
    let lower = t.to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix('q') {
        let mut chars = rest.chars();
        if matches!(chars.next(), Some('1'..='4')) {
            let tail: String = chars.collect();
            let tail = tail.trim_start_matches([' ', '\'']);
            if tail.is_empty() || all_digits(tail) {
                return true;
            }
        }
    }

    false
}

fn year_like_number(n: f64) -> bool {
    n.fract() == 0.0 && (1000.0..=2999.0).contains(&n)
}

fn flag_name(name: &str) -> bool {
    let tokens = name_tokens(name);
    tokens.iter().any(|t| {
        matches!(t.as_str(), "is" | "has" | "flag" | "active" | "enabled" | "valid" | "bool" | "boolean")
    })
}

/// Infer a column type from its name and values.
///
/// The checks run in a fixed order; the first match wins:
///
/// 1. time-related name → `Temporal`
/// 2. no non-null values → `Unknown`
/// 3. native booleans, or a flag-named column over {true, false, 0, 1} →
///    `Boolean`
/// 4. every value a whole number in 1000..=2999 → `Temporal` (year columns
///    routinely arrive as plain integers)
/// 5. every value date-like text → `Temporal`
/// 6. every value numeric → `Numeric`
/// 7. all distinct and long-form strings (mean length ≥ 20) → `Text`
/// 8. otherwise → `Categorical`
pub fn infer_type(name: &str, values: &[Scalar]) -> ColumnType {
    if time_related_name(name) {
        return ColumnType::Temporal;
    }
    let present: Vec<&Scalar> = values.iter().filter(|v| !v.is_null()).collect();
    if present.is_empty() {
        return ColumnType::Unknown;
    }

    if present.iter().all(|v| matches!(v, Scalar::Bool(_))) {
        return ColumnType::Boolean;
    }
    if flag_name(name) {
        let truthy = present.iter().all(|v| match v {
            Scalar::Bool(_) => true,
            Scalar::Number(n) => *n == 0.0 || *n == 1.0,
            Scalar::Text(t) => {
                matches!(t.to_ascii_lowercase().as_str(), "true" | "false" | "0" | "1")
            }
            Scalar::Null => false,
        });
        if truthy {
            return ColumnType::Boolean;
        }
    }

    let numbers: Option<Vec<f64>> = present.iter().map(|v| v.as_number()).collect();
    if let Some(ref ns) = numbers {
        if ns.iter().all(|n| year_like_number(*n)) {
            return ColumnType::Temporal;
        }
    }
    if present.iter().all(|v| v.as_text().map(looks_like_date).unwrap_or(false)) {
        return ColumnType::Temporal;
    }
    if numbers.is_some() {
        return ColumnType::Numeric;
    }

    let distinct = present.iter().map(|v| v.canon()).collect::<std::collections::BTreeSet<_>>();
    if distinct.len() == present.len() && present.len() == values.len() {
        let total_len: usize = present.iter().filter_map(|v| v.as_text()).map(|t| t.len()).sum();
        if total_len >= 20 * present.len() {
            return ColumnType::Text;
        }
    }
    ColumnType::Categorical
}
