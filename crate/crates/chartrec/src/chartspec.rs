//! Renderable chart specifications.
//!
//! A [`Recommendation`] names chart types and columns; a [`ChartSpec`] is
//! the concrete, serializable artifact a renderer consumes: one chart
//! type, titled, with axes bound to fields and the data either embedded
//! or referenced.  `bind` produces the spec for a single recommendation;
//! `bind_combined` merges a combinable group into one figure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sql::parse_sql;
use crate::types::{ChartType, ColumnType, DataSource, Dataset, Recommendation, Scalar};

/// Chart-spec format version this crate reads and writes.
pub const CHART_SPEC_VERSION: u32 = 1;

/// Cell budget under which chart data embeds inline by default.
pub const INLINE_CELL_LIMIT: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum ChartSpecError {
    #[error("recommendation has no column bindings to chart")]
    NoBindings,
    #[error("binding references unknown column `{0}`")]
    UnknownField(String),
    #[error("binding conflict: {0}")]
    BindingConflict(String),
    #[error("cannot merge: {0}")]
    MergeConflict(String),
    #[error("unsupported chart spec version {got} (expected {expected})")]
    VersionMismatch { got: u32, expected: u32 },
}

/// How an axis interprets its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Quantitative,
    Temporal,
    Nominal,
}

impl ValueKind {
    fn of(dtype: ColumnType) -> ValueKind {
        match dtype {
            ColumnType::Numeric => ValueKind::Quantitative,
            ColumnType::Temporal => ValueKind::Temporal,
            ColumnType::Categorical | ColumnType::Text | ColumnType::Boolean
            | ColumnType::Unknown => ValueKind::Nominal,
        }
    }
}

/// One chart dimension: the bound field and how to read its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub field: String,
    pub value_kind: ValueKind,
}

/// Chart data: embedded rows for small results, a reference for large
/// ones.  Inline rows carry only the referenced columns, in axis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartData {
    Inline { columns: Vec<String>, rows: Vec<Vec<Scalar>> },
    External { reference: String },
}

/// A complete, renderable chart description.
///
/// Invariants (checked by [`ChartSpec::validate`]):
/// - `x` is present for every chart type except `table_listing`, and `y`
///   is non-empty for those types;
/// - `pie` has exactly one `y`;
/// - `multi_line`, `grouped_bar`, and `stacked_bar` carry a `series` or
///   `group` axis, or at least two `y` entries (a wide table whose
///   measure columns are the series);
/// - every referenced field exists in inline data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub version: u32,
    pub chart_type: ChartType,
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Axis>,
    pub y: Vec<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Axis>,
    pub data: ChartData,
}

/// Knobs for [`bind_with`]; [`Default`] gives the documented behavior.
#[derive(Debug, Clone)]
pub struct BindOptions {
    /// Embed data inline when the emitted cell count stays below this.
    pub inline_cell_limit: usize,
    /// Where the data lives when it is not embedded.  Defaults to a
    /// description of the dataset source.
    pub external_reference: Option<String>,
    /// Chart title override.  Defaults to the caption, or to a
    /// pretty-printed synopsis of the query.
    pub title: Option<String>,
}

impl Default for BindOptions {
    fn default() -> Self {
        BindOptions { inline_cell_limit: INLINE_CELL_LIMIT, external_reference: None, title: None }
    }
}

impl ChartSpec {
    /// Check the structural invariants listed on the type.
    pub fn validate(&self) -> Result<(), ChartSpecError> {
        if self.version != CHART_SPEC_VERSION {
            return Err(ChartSpecError::VersionMismatch {
                got: self.version,
                expected: CHART_SPEC_VERSION,
            });
        }
        if self.chart_type != ChartType::TableListing {
            if self.x.is_none() {
                return Err(ChartSpecError::BindingConflict(format!(
                    "{} needs an x axis",
                    self.chart_type.as_str()
                )));
            }
            if self.y.is_empty() {
                return Err(ChartSpecError::BindingConflict(format!(
                    "{} needs at least one y axis",
                    self.chart_type.as_str()
                )));
            }
        }
        if self.chart_type == ChartType::Pie && self.y.len() != 1 {
            return Err(ChartSpecError::BindingConflict(format!(
                "a pie chart takes exactly one measure, got {}",
                self.y.len()
            )));
        }
        if matches!(
            self.chart_type,
            ChartType::MultiLine | ChartType::GroupedBar | ChartType::StackedBar
        ) && self.series.is_none()
            && self.group.is_none()
            && self.y.len() < 2
        {
            return Err(ChartSpecError::BindingConflict(format!(
                "{} needs a series or group axis, or several measures",
                self.chart_type.as_str()
            )));
        }
        if let ChartData::Inline { columns, .. } = &self.data {
            for axis in self.axes() {
                if !columns.contains(&axis.field) {
                    return Err(ChartSpecError::UnknownField(axis.field.clone()));
                }
            }
        }
        Ok(())
    }

    /// All bound axes: x, each y, then group and series when present.
    pub fn axes(&self) -> Vec<&Axis> {
        self.x
            .iter()
            .chain(self.y.iter())
            .chain(self.group.iter())
            .chain(self.series.iter())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chart spec serializes")
    }

    pub fn from_json(json: &str) -> Result<ChartSpec, ChartSpecError> {
        let spec: ChartSpec = serde_json::from_str(json)
            .map_err(|e| ChartSpecError::BindingConflict(format!("malformed chart spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Default chart title for a dataset: its caption, or a one-line synopsis
/// of its query.
pub fn default_title(ds: &Dataset) -> String {
    match &ds.source {
        DataSource::Caption { caption } => caption.clone(),
        DataSource::Sql { query } => match parse_sql(query) {
            Ok(ir) => ir.pretty_print().split_whitespace().collect::<Vec<_>>().join(" "),
            Err(_) => query.split_whitespace().collect::<Vec<_>>().join(" "),
        },
    }
}

fn axis_for(ds: &Dataset, field: &str) -> Result<Axis, ChartSpecError> {
    let col = ds.column(field).ok_or_else(|| ChartSpecError::UnknownField(field.to_string()))?;
    Ok(Axis { field: field.to_string(), value_kind: ValueKind::of(col.dtype) })
}

fn data_for(
    ds: &Dataset,
    fields: &[String],
    opts: &BindOptions,
) -> Result<ChartData, ChartSpecError> {
    let cells = ds.row_count * fields.len();
    if cells < opts.inline_cell_limit {
        let mut rows = Vec::with_capacity(ds.row_count);
        for r in 0..ds.row_count {
            let mut row = Vec::with_capacity(fields.len());
            for field in fields {
                let col = ds
                    .column(field)
                    .ok_or_else(|| ChartSpecError::UnknownField(field.clone()))?;
                row.push(col.values[r].clone());
            }
            rows.push(row);
        }
        Ok(ChartData::Inline { columns: fields.to_vec(), rows })
    } else {
        let reference = opts.external_reference.clone().unwrap_or_else(|| match &ds.source {
            DataSource::Sql { query } => {
                format!("sql:{}", query.split_whitespace().collect::<Vec<_>>().join(" "))
            }
            DataSource::Caption { caption } => format!("table:{caption}"),
        });
        Ok(ChartData::External { reference })
    }
}

/// Build the chart spec for a recommendation's rank-1 chart.
pub fn bind(rec: &Recommendation, ds: &Dataset) -> Result<ChartSpec, ChartSpecError> {
    bind_with(rec, ds, &BindOptions::default())
}

/// Build the chart spec for a recommendation's rank-1 chart.
///
/// The independent column lands on x and the dependents on y, with two
/// exceptions: a table listing binds no axes and embeds every column, and
/// a single-measure horizontal bar swaps its category onto the vertical
/// dimension so the measure reads along x.  A second independent becomes
/// the `group` or `series` axis as the recommendation dictates.
pub fn bind_with(
    rec: &Recommendation,
    ds: &Dataset,
    opts: &BindOptions,
) -> Result<ChartSpec, ChartSpecError> {
    let chart = rec.rank1();
    let title = opts.title.clone().unwrap_or_else(|| default_title(ds));

    if chart == ChartType::TableListing {
        let fields: Vec<String> = ds.columns.iter().map(|c| c.name.clone()).collect();
        let spec = ChartSpec {
            version: CHART_SPEC_VERSION,
            chart_type: chart,
            title,
            x: None,
            y: Vec::new(),
            group: None,
            series: None,
            data: data_for(ds, &fields, opts)?,
        };
        spec.validate()?;
        return Ok(spec);
    }

    let bindings = rec.bindings.as_ref().ok_or(ChartSpecError::NoBindings)?;
    if chart == ChartType::Pie && bindings.y_fields.len() != 1 {
        return Err(ChartSpecError::BindingConflict(format!(
            "a pie chart takes exactly one measure, got {}",
            bindings.y_fields.len()
        )));
    }

    let mut x = Some(axis_for(ds, &bindings.x_field)?);
    let mut y = bindings
        .y_fields
        .iter()
        .map(|f| axis_for(ds, f))
        .collect::<Result<Vec<_>, _>>()?;
    let group = bindings.group_field.as_deref().map(|f| axis_for(ds, f)).transpose()?;
    let series = bindings.series_field.as_deref().map(|f| axis_for(ds, f)).transpose()?;

    // Horizontal bars put the measure on x and the category on the
    // vertical dimension.  With several measures the category stays on x
    // (a measure list cannot fit a single axis).
    if chart == ChartType::HorizontalBar && y.len() == 1 {
        std::mem::swap(x.as_mut().expect("x set above"), &mut y[0]);
    }

    let mut fields: Vec<String> = Vec::new();
    for axis in x.iter().chain(y.iter()).chain(group.iter()).chain(series.iter()) {
        if !fields.contains(&axis.field) {
            fields.push(axis.field.clone());
        }
    }

    let spec = ChartSpec {
        version: CHART_SPEC_VERSION,
        chart_type: chart,
        title,
        x,
        y,
        group,
        series,
        data: data_for(ds, &fields, opts)?,
    };
    spec.validate()?;
    Ok(spec)
}

/// Merge a combinable group of recommendations into one figure.
///
/// The group must agree on chart type, x column, and grouping; the merged
/// spec carries every dependent column as a y axis, in group order — no
/// dependent is dropped.  A single recommendation binds as itself.
pub fn bind_combined(
    recs: &[Recommendation],
    ds: &Dataset,
    opts: &BindOptions,
) -> Result<ChartSpec, ChartSpecError> {
    let Some(first) = recs.first() else {
        return Err(ChartSpecError::MergeConflict("empty recommendation group".into()));
    };
    if recs.len() == 1 {
        return bind_with(first, ds, opts);
    }

    let chart = first.rank1();
    let lead = first.bindings.as_ref().ok_or(ChartSpecError::NoBindings)?;
    let mut y_fields: Vec<String> = Vec::new();
    for rec in recs {
        if !rec.combinable {
            return Err(ChartSpecError::MergeConflict(
                "every recommendation in a merged group must be combinable".into(),
            ));
        }
        if rec.rank1() != chart {
            return Err(ChartSpecError::MergeConflict(format!(
                "mixed chart types {} and {}",
                chart.as_str(),
                rec.rank1().as_str()
            )));
        }
        let b = rec.bindings.as_ref().ok_or(ChartSpecError::NoBindings)?;
        if b.x_field != lead.x_field
            || b.group_field != lead.group_field
            || b.series_field != lead.series_field
        {
            return Err(ChartSpecError::MergeConflict(format!(
                "recommendations disagree on the independent axes of `{}`",
                lead.x_field
            )));
        }
        for f in &b.y_fields {
            if !y_fields.contains(f) {
                y_fields.push(f.clone());
            }
        }
    }

    let merged = Recommendation {
        ranked: first.ranked.clone(),
        bindings: Some(crate::types::Bindings {
            x_field: lead.x_field.clone(),
            y_fields,
            series_field: lead.series_field.clone(),
            group_field: lead.group_field.clone(),
        }),
        provenance: first.provenance.clone(),
        combinable: true,
    };
    bind_with(&merged, ds, opts)
}

/// Bind a whole recommendation list, merging combinable runs as it goes.
///
/// Consecutive combinable recommendations that agree on chart type and
/// independent axes collapse into one figure via [`bind_combined`];
/// everything else binds on its own.  Eight mergeable aggregates become
/// one grouped-bar spec, not eight.
pub fn bind_all(
    recs: &[Recommendation],
    ds: &Dataset,
    opts: &BindOptions,
) -> Result<Vec<ChartSpec>, ChartSpecError> {
    fn mergeable(a: &Recommendation, b: &Recommendation) -> bool {
        let (Some(ba), Some(bb)) = (a.bindings.as_ref(), b.bindings.as_ref()) else {
            return false;
        };
        b.combinable
            && a.rank1() == b.rank1()
            && ba.x_field == bb.x_field
            && ba.group_field == bb.group_field
            && ba.series_field == bb.series_field
    }

    let mut specs = Vec::new();
    let mut i = 0;
    while i < recs.len() {
        let mut j = i + 1;
        if recs[i].combinable {
            while j < recs.len() && mergeable(&recs[i], &recs[j]) {
                j += 1;
            }
        }
        specs.push(bind_combined(&recs[i..j], ds, opts)?);
        i = j;
    }
    Ok(specs)
}
