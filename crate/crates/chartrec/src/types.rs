//! Core vocabulary shared by every stage of the recommendation pipeline.
//!
//! The pipeline turns a dataset (a SQL result set or a captioned table) into
//! one or more chart recommendations.  This module defines the data model for
//! that flow: column types and roles, the dataset envelope, binary feature
//! vectors with their fixed schemas, and the recommendation records that the
//! rule engine and the learned model both produce.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Chart types the engine can recommend.
///
/// The serialized names (snake_case) are part of the public contract: they
/// appear in corpus files, trained models, and CLI output, and must stay
/// stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Line,
    HorizontalBar,
    VerticalBar,
    Pie,
    MultiLine,
    GroupedBar,
    StackedBar,
    Scatter,
    TableListing,
}

impl ChartType {
    /// Every chart type, in canonical order.  The classifier uses this order
    /// for its class list and for deterministic tie-breaking.
    pub const ALL: [ChartType; 9] = [
        ChartType::Line,
        ChartType::HorizontalBar,
        ChartType::VerticalBar,
        ChartType::Pie,
        ChartType::MultiLine,
        ChartType::GroupedBar,
        ChartType::StackedBar,
        ChartType::Scatter,
        ChartType::TableListing,
    ];

    /// Stable serialized name (matches the serde representation).
    pub fn as_str(self) -> &'static str {
        match self {
            ChartType::Line => "line",
            ChartType::HorizontalBar => "horizontal_bar",
            ChartType::VerticalBar => "vertical_bar",
            ChartType::Pie => "pie",
            ChartType::MultiLine => "multi_line",
            ChartType::GroupedBar => "grouped_bar",
            ChartType::StackedBar => "stacked_bar",
            ChartType::Scatter => "scatter",
            ChartType::TableListing => "table_listing",
        }
    }

    /// Position in [`ChartType::ALL`]; doubles as the class index in models.
    pub fn class_index(self) -> usize {
        ChartType::ALL.iter().position(|c| *c == self).expect("ALL covers every variant")
    }

    /// Parse a serialized name back into a chart type.
    pub fn from_str_name(name: &str) -> Option<ChartType> {
        ChartType::ALL.iter().copied().find(|c| c.as_str() == name)
    }
}

/// Inferred type of a column's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Numeric,
    Temporal,
    Categorical,
    Text,
    Boolean,
    Unknown,
}

impl ColumnType {
    pub fn is_numeric(self) -> bool {
        self == ColumnType::Numeric
    }

    pub fn is_temporal(self) -> bool {
        self == ColumnType::Temporal
    }
}

/// Role a column plays in the relationship a chart would visualize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    Independent,
    Dependent,
    /// Actively excluded from charting — the column's values are unusable
    /// (for example, entirely null).
    Ignored,
    Unresolved,
}

/// Why a column was assigned its role.  Kept alongside the role so reports
/// and tests can check the reasoning, not just the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleReason {
    /// Column appears in a GROUP BY clause (or a caption "by" phrase).
    GroupBy,
    /// Column is a declared primary key or its values are all distinct.
    PrimaryKey,
    /// Column is the output of an aggregate function.
    Aggregated,
    /// Column holds plain numeric measurements.
    NumericSelected,
    /// Column is time-related by name or content.
    TimeSelected,
    /// No stronger signal applied; the general fallback analysis decided.
    Fallback,
}

/// Aggregate functions recognized in queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateFn {
    Max,
    Min,
    Avg,
    Sum,
    Count,
}

impl AggregateFn {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregateFn::Max => "max",
            AggregateFn::Min => "min",
            AggregateFn::Avg => "avg",
            AggregateFn::Sum => "sum",
            AggregateFn::Count => "count",
        }
    }

    /// Case-insensitive lookup: `"AVG"` and `"avg"` both resolve.
    pub fn from_name(name: &str) -> Option<AggregateFn> {
        match name.to_ascii_lowercase().as_str() {
            "max" => Some(AggregateFn::Max),
            "min" => Some(AggregateFn::Min),
            "avg" => Some(AggregateFn::Avg),
            "sum" => Some(AggregateFn::Sum),
            "count" => Some(AggregateFn::Count),
            _ => None,
        }
    }
}

/// A single cell value.  Serialized transparently so envelope JSON can use
/// ordinary literals (`null`, `true`, `3.5`, `"west"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Null,
    Bool(bool),
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn is_null(&self) -> bool {
        matches!(self, Scalar::Null)
    }

    /// Numeric view of the value, parsing text if necessary.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Scalar::Number(n) => Some(*n),
            Scalar::Bool(_) | Scalar::Null => None,
            Scalar::Text(t) => {
                let t = t.trim();
                if t.is_empty() {
                    None
                } else {
                    // Tolerate thousands separators: "31,534" is a number.
                    let cleaned: String = t.chars().filter(|c| *c != ',').collect();
                    cleaned.parse::<f64>().ok().filter(|n| n.is_finite())
                }
            }
        }
    }

    /// Textual view of the value for lexical checks.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Scalar::Text(t) => Some(t),
            _ => None,
        }
    }

    /// Canonical string used for distinct counting.  Tagged by kind so that
    /// the number 1 and the text "1" stay distinct.
    pub fn canon(&self) -> String {
        match self {
            Scalar::Null => "null".to_string(),
            Scalar::Bool(b) => format!("b:{b}"),
            Scalar::Number(n) => format!("n:{n}"),
            Scalar::Text(t) => format!("t:{t}"),
        }
    }
}

/// One column of a dataset: a name, an inferred type, and the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub dtype: ColumnType,
    /// True when the schema declared this column a primary key.
    #[serde(default)]
    pub is_primary_key: bool,
    pub values: Vec<Scalar>,
}

impl Column {
    /// Number of distinct non-null values.
    pub fn distinct_count(&self) -> usize {
        self.values
            .iter()
            .filter(|v| !v.is_null())
            .map(|v| v.canon())
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// True when every row holds a distinct non-null value.
    pub fn all_values_unique(&self) -> bool {
        !self.values.is_empty()
            && self.values.iter().all(|v| !v.is_null())
            && self.distinct_count() == self.values.len()
    }
}

/// Where a dataset came from.  The source decides which analyzer runs and
/// which feature schema applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    /// A SQL query together with its result set.
    Sql { query: String },
    /// A data table together with its natural language caption.
    Caption { caption: String },
}

/// A dataset ready for analysis: source context plus the tabular payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub source: DataSource,
    pub columns: Vec<Column>,
    pub row_count: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("dataset has no columns")]
    NoColumns,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{name}` has {got} values but the dataset declares {expected} rows")]
    ArityMismatch { name: String, got: usize, expected: usize },
}

impl Dataset {
    /// Check structural invariants: at least one column, unique column
    /// names, and every column holding exactly `row_count` values.
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.columns.is_empty() {
            return Err(DatasetError::NoColumns);
        }
        let mut seen = BTreeSet::new();
        for c in &self.columns {
            if !seen.insert(c.name.clone()) {
                return Err(DatasetError::DuplicateColumn(c.name.clone()));
            }
            if c.values.len() != self.row_count {
                return Err(DatasetError::ArityMismatch {
                    name: c.name.clone(),
                    got: c.values.len(),
                    expected: self.row_count,
                });
            }
        }
        Ok(())
    }

    /// Look up a column by name.
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Column names in table order.
    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }
}

/// Result set size, bucketed the way the feature schemas expect.  Ordered
/// by size, so `bucket <= SizeBucket::UpTo8` reads as "at most 8 rows".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeBucket {
    Zero,
    UpTo2,
    UpTo8,
    UpTo30,
    Over30,
}

/// Bucket a row count.  Boundaries are inclusive on the upper edge:
/// 0; 1..=2; 3..=8; 9..=30; 31 and up.
pub fn size_bucket(rows: usize) -> SizeBucket {
    match rows {
        0 => SizeBucket::Zero,
        1..=2 => SizeBucket::UpTo2,
        3..=8 => SizeBucket::UpTo8,
        9..=30 => SizeBucket::UpTo30,
        _ => SizeBucket::Over30,
    }
}

impl SizeBucket {
    /// Offset of this bucket within a size one-hot group.
    pub fn one_hot_offset(self) -> usize {
        match self {
            SizeBucket::Zero => 0,
            SizeBucket::UpTo2 => 1,
            SizeBucket::UpTo8 => 2,
            SizeBucket::UpTo30 => 3,
            SizeBucket::Over30 => 4,
        }
    }
}

/// Names of the 21 query features, in bit order.
pub const SQL_FEATURE_NAMES: [&str; 21] = [
    "select aggregate(A)",
    "select B, group by B and B is not time-related field",
    "select B,C group by B,C and B and C are time-related",
    "select B, C group by B,C and neither B or C are time-related",
    "select B,C group by B,C and B is time-related and C is not",
    "select B,C group by B,C and B is not time-related and C is",
    "select B where B is time-related",
    "select B where B is not time-related",
    "select A, A is numeric",
    "select B, where B is class label",
    "select B, where B is primary key or values are unique",
    "Presence of group by",
    "Presence of multiple group by",
    "result set size is 0",
    "result set size is 0 < x <= 2",
    "result set size is 2 < x <= 8",
    "result set size is 8 < x <= 30",
    "result set size is x > 30",
    "Only 1 column is selected",
    "Exactly 2 columns are selected",
    "More than 2 columns are selected",
];

/// Names of the 19 caption features, in bit order.
pub const CAPTION_FEATURE_NAMES: [&str; 19] = [
    "Main phrase is Q, secondary phrase is T",
    "Main phrase is Q, secondary phrase is OC",
    "Main phrase is T, secondary phrase is Q",
    "Main phrase is OC, secondary is Q",
    "Main phrase is Q, prepositional phrase is byT",
    "Main phrase is Q, prepositional phrase is byOC",
    "Main phrase is T, prepositional phrase is byQ",
    "Main phrase is OC, prepositional phrase is byQ",
    "Main phrase is Q, has timespan phrase",
    "Main phrase is Q, has OC1 and OC2",
    "Main phrase is OC, has Q1 and Q2",
    "Main phrase is Q, has OC and T",
    "Main phrase is Q, has T1 and T2",
    "Main phrase is OC, has term 'distribution'",
    "Only 1 data point",
    "Only 2 data points",
    "2 < nbr of data points <= 8",
    "8 < nbr of data points <= 30",
    "30 < nbr of data points",
];

/// Which feature layout a vector (or model) uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSchema {
    Sql21,
    Cap19,
}

impl FeatureSchema {
    pub fn len(self) -> usize {
        match self {
            FeatureSchema::Sql21 => 21,
            FeatureSchema::Cap19 => 19,
        }
    }

    #[allow(clippy::len_without_is_empty)]
    /// Feature names in bit order.
    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            FeatureSchema::Sql21 => &SQL_FEATURE_NAMES,
            FeatureSchema::Cap19 => &CAPTION_FEATURE_NAMES,
        }
    }

    /// Bit range (start, length) of the size one-hot group.
    pub fn size_group(self) -> (usize, usize) {
        match self {
            FeatureSchema::Sql21 => (13, 5),
            FeatureSchema::Cap19 => (14, 5),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSchema::Sql21 => "sql21",
            FeatureSchema::Cap19 => "cap19",
        }
    }
}

impl std::fmt::Display for FeatureSchema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureVectorError {
    #[error("schema {schema:?} expects {expected} bits, got {got}")]
    WrongLength { schema: FeatureSchema, expected: usize, got: usize },
    #[error("bit {index} is {value}, expected 0 or 1")]
    NotBinary { index: usize, value: u8 },
    #[error("one-hot group at bits {start}..{end} has {set} bits set, expected exactly 1")]
    OneHotViolation { start: usize, end: usize, set: usize },
}

/// A binary feature vector under one of the fixed schemas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub schema: FeatureSchema,
    pub bits: Vec<u8>,
}

impl FeatureVector {
    /// All-zero vector for a schema.
    pub fn zeros(schema: FeatureSchema) -> FeatureVector {
        FeatureVector { schema, bits: vec![0; schema.len()] }
    }

    pub fn set(&mut self, index: usize) {
        self.bits[index] = 1;
    }

    pub fn is_set(&self, index: usize) -> bool {
        self.bits.get(index).copied() == Some(1)
    }

    /// Indices of the set bits, ascending.
    pub fn set_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| if *b == 1 { Some(i) } else { None })
            .collect()
    }

    /// Names of the set bits, in bit order.
    pub fn set_names(&self) -> Vec<&'static str> {
        let names = self.schema.feature_names();
        self.set_indices().into_iter().map(|i| names[i]).collect()
    }

    /// Check length, binariness, and the schema's one-hot groups.
    ///
    /// Both schemas require exactly one size bit; the query schema also
    /// requires exactly one selected-column-count bit (bits 18..21).
    pub fn validate(&self) -> Result<(), FeatureVectorError> {
        let expected = self.schema.len();
        if self.bits.len() != expected {
            return Err(FeatureVectorError::WrongLength {
                schema: self.schema,
                expected,
                got: self.bits.len(),
            });
        }
        for (index, value) in self.bits.iter().enumerate() {
            if *value > 1 {
                return Err(FeatureVectorError::NotBinary { index, value: *value });
            }
        }
        let mut groups = vec![self.schema.size_group()];
        if self.schema == FeatureSchema::Sql21 {
            groups.push((18, 3));
        }
        for (start, len) in groups {
            let set = self.bits[start..start + len].iter().filter(|b| **b == 1).count();
            if set != 1 {
                return Err(FeatureVectorError::OneHotViolation {
                    start,
                    end: start + len,
                    set,
                });
            }
        }
        Ok(())
    }
}

/// One column bound to a role, with the reasoning that put it there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnRoleInfo {
    pub role: ColumnRole,
    pub reason: RoleReason,
}

/// A group of numeric columns that act as one measure split into series
/// (a wide table such as one value column per year or per category).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSeries {
    /// Display label for the combined measure.
    pub label: String,
    /// The member columns, in table order.
    pub columns: Vec<String>,
}

/// Role assignment for a dataset.  Lookup is by column name; the order
/// vectors preserve the query/caption order, which is stable even when the
/// table's column order is permuted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct RoleAssignment {
    pub columns: BTreeMap<String, ColumnRoleInfo>,
    pub independent_order: Vec<String>,
    pub dependent_order: Vec<String>,
    /// Present when several columns were folded into one series-split measure.
    pub measure_series: Option<MeasureSeries>,
}

impl RoleAssignment {
    pub fn role_of(&self, name: &str) -> Option<ColumnRole> {
        self.columns.get(name).map(|info| info.role)
    }

    /// Independent column names in analysis order.
    pub fn independents(&self) -> &[String] {
        &self.independent_order
    }

    /// Dependent column names in analysis order.
    pub fn dependents(&self) -> &[String] {
        &self.dependent_order
    }
}

/// Who produced a recommendation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum Provenance {
    Rule { id: String },
    Model { id: String },
}

/// How recommended chart types map onto dataset columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bindings {
    pub x_field: String,
    pub y_fields: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_field: Option<String>,
}

/// One chart type with its preference score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedChart {
    pub chart_type: ChartType,
    pub score: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecommendationError {
    #[error("recommendation has an empty ranking")]
    EmptyRanking,
    #[error("chart type `{0}` appears more than once in a ranking")]
    DuplicateChart(&'static str),
    #[error("ranking scores must be non-increasing and within [0, 1]")]
    BadScores,
}

/// A ranked chart suggestion for one dependent/independent relationship.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    /// Chart types by descending preference.  At least one entry; the first
    /// two are the rank-1 and rank-2 answers.
    pub ranked: Vec<RankedChart>,
    /// Column bindings, when the chart type calls for axes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bindings: Option<Bindings>,
    pub provenance: Provenance,
    /// True when this recommendation shares its independent columns with
    /// sibling recommendations and the charts could merge into one figure.
    pub combinable: bool,
}

impl Recommendation {
    pub fn rank1(&self) -> ChartType {
        self.ranked[0].chart_type
    }

    pub fn rank2(&self) -> Option<ChartType> {
        self.ranked.get(1).map(|r| r.chart_type)
    }

    /// Check ranking invariants: non-empty, pairwise distinct chart types,
    /// scores non-increasing within [0, 1].
    pub fn validate(&self) -> Result<(), RecommendationError> {
        if self.ranked.is_empty() {
            return Err(RecommendationError::EmptyRanking);
        }
        let mut seen = BTreeSet::new();
        for entry in &self.ranked {
            if !seen.insert(entry.chart_type) {
                return Err(RecommendationError::DuplicateChart(entry.chart_type.as_str()));
            }
            if !(0.0..=1.0).contains(&entry.score) {
                return Err(RecommendationError::BadScores);
            }
        }
        for pair in self.ranked.windows(2) {
            if pair[0].score < pair[1].score {
                return Err(RecommendationError::BadScores);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_bucket_boundaries() {
        assert_eq!(size_bucket(0), SizeBucket::Zero);
        assert_eq!(size_bucket(1), SizeBucket::UpTo2);
        assert_eq!(size_bucket(2), SizeBucket::UpTo2);
        assert_eq!(size_bucket(3), SizeBucket::UpTo8);
        assert_eq!(size_bucket(8), SizeBucket::UpTo8);
        assert_eq!(size_bucket(9), SizeBucket::UpTo30);
        assert_eq!(size_bucket(30), SizeBucket::UpTo30);
        assert_eq!(size_bucket(31), SizeBucket::Over30);
        assert_eq!(size_bucket(10_000), SizeBucket::Over30);
    }

    #[test]
    fn chart_type_names_are_stable() {
        let expected = [
            "line",
            "horizontal_bar",
            "vertical_bar",
            "pie",
            "multi_line",
            "grouped_bar",
            "stacked_bar",
            "scatter",
            "table_listing",
        ];
        for (chart, name) in ChartType::ALL.iter().zip(expected) {
            assert_eq!(chart.as_str(), name);
            let json = serde_json::to_string(chart).unwrap();
            assert_eq!(json, format!("\"{name}\""));
            assert_eq!(ChartType::from_str_name(name), Some(*chart));
        }
    }

    #[test]
    fn schema_lengths_and_names_line_up() {
        assert_eq!(FeatureSchema::Sql21.len(), 21);
        assert_eq!(FeatureSchema::Cap19.len(), 19);
        assert_eq!(FeatureSchema::Sql21.feature_names().len(), 21);
        assert_eq!(FeatureSchema::Cap19.feature_names().len(), 19);
    }

    #[test]
    fn feature_vector_length_is_enforced() {
        let mut v = FeatureVector::zeros(FeatureSchema::Sql21);
        v.bits.pop();
        assert_eq!(
            v.validate(),
            Err(FeatureVectorError::WrongLength {
                schema: FeatureSchema::Sql21,
                expected: 21,
                got: 20
            })
        );
    }

    #[test]
    fn feature_vector_one_hot_groups_are_enforced() {
        // All-zero vector: size group empty.
        let v = FeatureVector::zeros(FeatureSchema::Sql21);
        assert!(matches!(v.validate(), Err(FeatureVectorError::OneHotViolation { start: 13, .. })));

        // Size set but two column-count bits set.
        let mut v = FeatureVector::zeros(FeatureSchema::Sql21);
        v.set(13);
        v.set(18);
        v.set(19);
        assert!(matches!(v.validate(), Err(FeatureVectorError::OneHotViolation { start: 18, .. })));

        // One of each: valid.
        let mut v = FeatureVector::zeros(FeatureSchema::Sql21);
        v.set(13);
        v.set(18);
        assert_eq!(v.validate(), Ok(()));

        // Caption schema only has the size group.
        let mut v = FeatureVector::zeros(FeatureSchema::Cap19);
        v.set(16);
        assert_eq!(v.validate(), Ok(()));
    }

    #[test]
    fn set_indices_and_names_track_bits() {
        let mut v = FeatureVector::zeros(FeatureSchema::Cap19);
        v.set(5);
        v.set(16);
        assert_eq!(v.set_indices(), vec![5, 16]);
        assert_eq!(
            v.set_names(),
            vec![
                "Main phrase is Q, prepositional phrase is byOC",
                "2 < nbr of data points <= 8"
            ]
        );
    }

    #[test]
    fn dataset_validation_catches_duplicates_and_ragged_columns() {
        let mk = |name: &str, n: usize| Column {
            name: name.to_string(),
            dtype: ColumnType::Numeric,
            is_primary_key: false,
            values: vec![Scalar::Number(1.0); n],
        };
        let ds = Dataset {
            source: DataSource::Caption { caption: "x".into() },
            columns: vec![mk("a", 2), mk("a", 2)],
            row_count: 2,
        };
        assert_eq!(ds.validate(), Err(DatasetError::DuplicateColumn("a".into())));

        let ds = Dataset {
            source: DataSource::Caption { caption: "x".into() },
            columns: vec![mk("a", 2), mk("b", 3)],
            row_count: 2,
        };
        assert!(matches!(ds.validate(), Err(DatasetError::ArityMismatch { .. })));
    }

    #[test]
    fn distinct_count_ignores_nulls_and_keeps_kinds_apart() {
        let col = Column {
            name: "v".into(),
            dtype: ColumnType::Categorical,
            is_primary_key: false,
            values: vec![
                Scalar::Number(1.0),
                Scalar::Text("1".into()),
                Scalar::Null,
                Scalar::Number(1.0),
            ],
        };
        assert_eq!(col.distinct_count(), 2);
        assert!(!col.all_values_unique());
    }

    #[test]
    fn recommendation_invariants() {
        let rec = Recommendation {
            ranked: vec![
                RankedChart { chart_type: ChartType::VerticalBar, score: 1.0 },
                RankedChart { chart_type: ChartType::Pie, score: 0.5 },
            ],
            bindings: None,
            provenance: Provenance::Rule { id: "R4".into() },
            combinable: false,
        };
        assert_eq!(rec.validate(), Ok(()));
        assert_eq!(rec.rank1(), ChartType::VerticalBar);
        assert_eq!(rec.rank2(), Some(ChartType::Pie));

        let dup = Recommendation {
            ranked: vec![
                RankedChart { chart_type: ChartType::Pie, score: 1.0 },
                RankedChart { chart_type: ChartType::Pie, score: 0.5 },
            ],
            ..rec.clone()
        };
        assert_eq!(dup.validate(), Err(RecommendationError::DuplicateChart("pie")));

        let increasing = Recommendation {
            ranked: vec![
                RankedChart { chart_type: ChartType::Pie, score: 0.4 },
                RankedChart { chart_type: ChartType::Line, score: 0.5 },
            ],
            ..rec.clone()
        };
        assert_eq!(increasing.validate(), Err(RecommendationError::BadScores));
    }

    #[test]
    fn scalar_numeric_parsing_handles_text() {
        assert_eq!(Scalar::Text("31,534".into()).as_number(), Some(31534.0));
        assert_eq!(Scalar::Text(" 2.5 ".into()).as_number(), Some(2.5));
        assert_eq!(Scalar::Text("west".into()).as_number(), None);
        assert_eq!(Scalar::Null.as_number(), None);
    }
}
