//! SQL-side analysis: parse a query, line it up with its result set,
//! decide which output columns are independent or dependent variables, and
//! extract the 21-bit query feature vector.
//!
//! The parser covers the subset the analyzers need: a single top-level
//! `SELECT` with optional `WHERE`, `GROUP BY`, `HAVING`, `ORDER BY`, and
//! `LIMIT`.  Subqueries are allowed anywhere parentheses balance, but only
//! the outermost statement is analyzed.

mod analyze;
mod lexer;
mod parser;

pub use analyze::{
    extract_sql_features, identify_dependencies, is_time_related, pairwise_relationships,
    Relationship,
};
pub use parser::parse_sql;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::AggregateFn;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SqlError {
    #[error("parse error at byte {position}: expected {expected}")]
    ParseError { position: usize, expected: String },
    #[error("unsupported statement: {0}")]
    UnsupportedStatement(String),
    #[error("query and result set do not line up: {0}")]
    ColumnMismatch(String),
    #[error("no independent/dependent column relationship in this dataset")]
    NoDependency,
}

/// What one select-list entry computes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectKind {
    /// Bare `*`.
    Star,
    /// Aggregate call, e.g. `sum(l_quantity)`; `arg` is the canonical
    /// argument text (`*` for `count(*)`).
    Aggregate { func: AggregateFn, arg: String },
    /// A plain column reference or scalar expression, canonical text.
    Plain { expr: String },
}

/// One select-list entry with its optional alias.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectItem {
    #[serde(flatten)]
    pub kind: SelectKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
}

impl SelectItem {
    /// The name this item carries in the result set: its alias when present,
    /// otherwise the expression text (`count(*)`, `l_returnflag`, `*`).
    pub fn display_name(&self) -> String {
        if let Some(alias) = &self.alias {
            return alias.clone();
        }
        match &self.kind {
            SelectKind::Star => "*".to_string(),
            SelectKind::Aggregate { func, arg } => format!("{}({})", func.as_str(), arg),
            SelectKind::Plain { expr } => expr.clone(),
        }
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self.kind, SelectKind::Aggregate { .. })
    }
}

/// Structural summary of a parsed query.  Clause bodies that the analyzers
/// treat as opaque (`WHERE`, `HAVING`, the full `FROM` clause) are stored as
/// canonical token text so the query can be reprinted losslessly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct QueryIR {
    pub select_items: Vec<SelectItem>,
    /// Grouping columns in clause order, resolved to result-set names when
    /// the clause used positions (`GROUP BY 1`).
    pub group_by: Vec<String>,
    pub has_where: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub where_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub having_text: Option<String>,
    /// Ordering keys, each with its optional `desc`/`asc` marker.
    pub order_by: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<String>,
    /// Top-level table names mentioned in `FROM` (subqueries contribute none).
    pub tables: Vec<String>,
    /// Canonical text of the whole `FROM` clause body.
    pub from_text: String,
}

impl QueryIR {
    /// Reprint the query in canonical form.  Parsing the result yields an
    /// identical `QueryIR`, making parse-then-print a fixed point.
    pub fn pretty_print(&self) -> String {
        let mut out = String::from("select ");
        for (i, item) in self.select_items.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            match &item.kind {
                SelectKind::Star => out.push('*'),
                SelectKind::Aggregate { func, arg } => {
                    out.push_str(&format!("{}({})", func.as_str(), arg));
                }
                SelectKind::Plain { expr } => out.push_str(expr),
            }
            if let Some(alias) = &item.alias {
                out.push_str(" as ");
                out.push_str(alias);
            }
        }
        out.push_str(" from ");
        out.push_str(&self.from_text);
        if let Some(w) = &self.where_text {
            out.push_str(" where ");
            out.push_str(w);
        }
        if !self.group_by.is_empty() {
            out.push_str(" group by ");
            out.push_str(&self.group_by.join(", "));
        }
        if let Some(h) = &self.having_text {
            out.push_str(" having ");
            out.push_str(h);
        }
        if !self.order_by.is_empty() {
            out.push_str(" order by ");
            out.push_str(&self.order_by.join(", "));
        }
        if let Some(l) = &self.limit {
            out.push_str(" limit ");
            out.push_str(l);
        }
        out
    }

    /// Names of the non-star select items, in select order.
    pub fn selected_names(&self) -> Vec<String> {
        self.select_items
            .iter()
            .filter(|item| !matches!(item.kind, SelectKind::Star))
            .map(|item| item.display_name())
            .collect()
    }

    pub fn has_star(&self) -> bool {
        self.select_items.iter().any(|item| matches!(item.kind, SelectKind::Star))
    }
}
