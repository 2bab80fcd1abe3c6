//! Variable-of-interest analysis for query result sets.
//!
//! The query tells us most of what a chart needs to know: grouping columns
//! are independent variables, aggregate outputs are dependent measurements,
//! and the leftovers are classified from the result data itself.

use serde::{Deserialize, Serialize};

use crate::ingest::time_related_name;
use crate::types::{
    size_bucket, Column, ColumnRole, ColumnRoleInfo, ColumnType, Dataset, FeatureSchema,
    FeatureVector, RoleAssignment, RoleReason,
};

use super::{QueryIR, SelectItem, SelectKind, SqlError};

/// A column is time-related when its values are temporal or its name reads
/// like a time field ("year", "o_orderdate").
pub fn is_time_related(name: &str, dtype: ColumnType) -> bool {
    dtype.is_temporal() || time_related_name(name)
}

/// One select-list entry matched to its result-set column.
struct Binding<'a> {
    /// Result-set name (alias, expression text, or the table column name
    /// when the item came from `*` expansion).
    name: String,
    /// The matched column; absent only in degenerate mismatch situations
    /// that the caller has already rejected.
    column: &'a Column,
    /// The original select item; star expansion synthesizes plain items.
    item: SelectItem,
    /// True when this binding is named in GROUP BY.
    grouped: bool,
}

/// Match the query's select list against the result columns, expanding `*`
/// into whatever columns the named items did not claim.
fn bind_columns<'a>(ir: &QueryIR, ds: &'a Dataset) -> Result<Vec<Binding<'a>>, SqlError> {
    let mut bindings: Vec<Binding<'a>> = Vec::new();
    let mut claimed: Vec<&str> = Vec::new();

    for item in &ir.select_items {
        if matches!(item.kind, SelectKind::Star) {
            continue;
        }
        let name = item.display_name();
        let column = ds.column(&name).ok_or_else(|| {
            SqlError::ColumnMismatch(format!(
                "select item `{name}` has no matching column in the result set"
            ))
        })?;
        claimed.push(&column.name);
        bindings.push(Binding { name, column, item: item.clone(), grouped: false });
    }

    if ir.has_star() {
        for column in &ds.columns {
            if claimed.contains(&column.name.as_str()) {
                continue;
            }
            bindings.push(Binding {
                name: column.name.clone(),
                column,
                item: SelectItem {
                    kind: SelectKind::Plain { expr: column.name.clone() },
                    alias: None,
                },
                grouped: false,
            });
        }
    } else if bindings.len() != ds.columns.len() {
        let unclaimed: Vec<&str> = ds
            .columns
            .iter()
            .map(|c| c.name.as_str())
            .filter(|n| !claimed.contains(n))
            .collect();
        return Err(SqlError::ColumnMismatch(format!(
            "result set columns {unclaimed:?} are not produced by the query"
        )));
    }

    // Mark grouped bindings.  A GROUP BY entry names either the result
    // column (alias) or the underlying expression.
    for g in &ir.group_by {
        for b in bindings.iter_mut() {
            let matches_expr = matches!(&b.item.kind, SelectKind::Plain { expr } if expr == g);
            if b.name == *g || matches_expr {
                b.grouped = true;
            }
        }
    }

    Ok(bindings)
}

/// Decide each result column's role.
///
/// Signals are applied in a fixed priority order: GROUP BY membership,
/// declared primary keys, aggregate outputs, all-distinct key-like columns,
/// then value-based classification (numeric → dependent, time-related →
/// independent, categorical → independent as the general fallback).
pub fn identify_dependencies(ir: &QueryIR, ds: &Dataset) -> Result<RoleAssignment, SqlError> {
    let bindings = bind_columns(ir, ds)?;
    let mut roles = RoleAssignment::default();

    for b in &bindings {
        let dtype = b.column.dtype;
        let info = if b.grouped {
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::GroupBy }
        } else if b.column.is_primary_key {
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::PrimaryKey }
        } else if b.item.is_aggregate() {
            ColumnRoleInfo { role: ColumnRole::Dependent, reason: RoleReason::Aggregated }
        } else if b.column.all_values_unique()
            && matches!(dtype, ColumnType::Categorical | ColumnType::Text)
        {
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::PrimaryKey }
        } else if dtype.is_numeric() {
            ColumnRoleInfo { role: ColumnRole::Dependent, reason: RoleReason::NumericSelected }
        } else if is_time_related(&b.name, dtype) {
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::TimeSelected }
        } else if matches!(dtype, ColumnType::Categorical | ColumnType::Boolean) {
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::Fallback }
        } else {
            ColumnRoleInfo { role: ColumnRole::Unresolved, reason: RoleReason::Fallback }
        };
        roles.columns.insert(b.column.name.clone(), info);
    }

    // Independents follow GROUP BY order first, then select order; the
    // ordering comes from the query text, so permuting the result table's
    // columns cannot change it.
    for g in &ir.group_by {
        if let Some(b) = bindings.iter().find(|b| b.grouped && (b.name == *g
            || matches!(&b.item.kind, SelectKind::Plain { expr } if expr == g)))
        {
            if !roles.independent_order.contains(&b.column.name) {
                roles.independent_order.push(b.column.name.clone());
            }
        }
    }
    for b in &bindings {
        match roles.columns[&b.column.name].role {
            ColumnRole::Independent => {
                if !roles.independent_order.contains(&b.column.name) {
                    roles.independent_order.push(b.column.name.clone());
                }
            }
            ColumnRole::Dependent => roles.dependent_order.push(b.column.name.clone()),
            ColumnRole::Ignored | ColumnRole::Unresolved => {}
        }
    }

    Ok(roles)
}

/// One independent/dependent pairing a chart could plot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relationship {
    /// Independent columns, analysis order.
    pub independents: Vec<String>,
    /// The dependent column this relationship plots.
    pub dependent: String,
    /// True when sibling relationships share the same independents and the
    /// resulting charts could merge into one figure.
    pub combinable: bool,
}

/// Split a role assignment into one relationship per dependent column.
/// Every relationship shares the full independent set; multiple dependents
/// over the same independents are marked combinable.
pub fn pairwise_relationships(roles: &RoleAssignment) -> Result<Vec<Relationship>, SqlError> {
    if roles.independent_order.is_empty() || roles.dependent_order.is_empty() {
        return Err(SqlError::NoDependency);
    }
    let combinable = roles.dependent_order.len() > 1;
    Ok(roles
        .dependent_order
        .iter()
        .map(|dep| Relationship {
            independents: roles.independent_order.clone(),
            dependent: dep.clone(),
            combinable,
        })
        .collect())
}

/// Whether a grouping entry refers to something time-related, preferring
/// the bound result column and falling back to the name alone when the
/// grouping column is not projected.
fn group_entry_time_related(g: &str, ir: &QueryIR, ds: &Dataset) -> bool {
    for item in &ir.select_items {
        let matches_item = item.display_name() == *g
            || matches!(&item.kind, SelectKind::Plain { expr } if expr == g);
        if matches_item {
            if let Some(col) = ds.column(&item.display_name()) {
                return is_time_related(&col.name, col.dtype);
            }
        }
    }
    if let Some(col) = ds.column(g) {
        return is_time_related(&col.name, col.dtype);
    }
    time_related_name(g)
}

/// Extract the 21-bit query feature vector.
///
/// Bits 7 through 11 (plain-select signals) are evaluated over selected
/// columns that are *not* grouping columns: the grouping bits 2..=6
/// already describe those, and grouped output is trivially all-distinct,
/// which would otherwise spuriously fire the uniqueness bit.
pub fn extract_sql_features(ir: &QueryIR, ds: &Dataset) -> Result<FeatureVector, SqlError> {
    let bindings = bind_columns(ir, ds)?;
    let mut v = FeatureVector::zeros(FeatureSchema::Sql21);

    if bindings.iter().any(|b| b.item.is_aggregate()) {
        v.set(0);
    }

    let gb = &ir.group_by;
    let gb_time: Vec<bool> = gb.iter().map(|g| group_entry_time_related(g, ir, ds)).collect();
    match (gb.len(), gb_time.as_slice()) {
        (1, [t0]) if !t0 => v.set(1),
        (2, [true, true]) => v.set(2),
        (2, [false, false]) => v.set(3),
        (2, [true, false]) => v.set(4),
        (2, [false, true]) => v.set(5),
        _ => {}
    }

    for b in bindings.iter().filter(|b| !b.grouped && !b.item.is_aggregate()) {
        let dtype = b.column.dtype;
        if is_time_related(&b.name, dtype) {
            v.set(6);
        } else {
            v.set(7);
        }
        if dtype.is_numeric() {
            v.set(8);
        }
        let distinct = b.column.distinct_count();
        if dtype == ColumnType::Categorical && ds.row_count > 0 && distinct <= 8 && distinct < ds.row_count
        {
            v.set(9);
        }
        if b.column.is_primary_key
            || (b.column.all_values_unique()
                && matches!(dtype, ColumnType::Categorical | ColumnType::Text))
        {
            v.set(10);
        }
    }

    if !gb.is_empty() {
        v.set(11);
    }
    if gb.len() > 1 {
        v.set(12);
    }

    v.set(13 + size_bucket(ds.row_count).one_hot_offset());

    let n_selected = bindings.len();
    match n_selected {
        0 | 1 => v.set(18),
        2 => v.set(19),
        _ => v.set(20),
    }

    debug_assert_eq!(v.validate(), Ok(()));
    Ok(v)
}
