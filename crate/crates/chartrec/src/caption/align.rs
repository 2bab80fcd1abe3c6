//! Alignment of caption variables with table columns.
//!
//! A parsed caption names variables; the table has columns.  This module
//! matches the two, assigns independent/dependent roles, validates a
//! detected timespan against a temporal column, and recognizes the wide
//! layout where several "by" variables are really one measure split over
//! multiple numeric columns (a measure series).
//!
//! Everything here is deliberately order-insensitive with respect to the
//! table: resolution walks variables in caption order and candidate
//! columns in name order, so shuffling the columns of a table never
//! changes the outcome.

use std::collections::BTreeMap;

use crate::types::{
    Column, ColumnRole, ColumnRoleInfo, ColumnType, Dataset, MeasureSeries, RoleAssignment,
    RoleReason,
};

use super::tagger::singularize;
use super::{CaptionError, CaptionIR, NounPhrase, PhraseSource, PhraseType};

/// One caption variable after alignment.  `column` is `None` when the
/// variable was mentioned but no column matched it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedVar {
    /// Variable text — phrase text, or the column name for implicit vars.
    pub text: String,
    pub ptype: PhraseType,
    pub source: PhraseSource,
    /// Matched column name, if any.
    pub column: Option<String>,
    /// True for the caption's main (subject) variable.
    pub is_main: bool,
}

/// Result of aligning a caption with a table.
#[derive(Debug, Clone)]
pub struct CaptionAlignment {
    pub roles: RoleAssignment,
    /// All variables in resolution order: by-clause vars, timespan, main,
    /// secondary body phrases, then implicit (column-only) vars.
    pub vars: Vec<AlignedVar>,
    /// True when a detected timespan found a temporal column to stand on.
    pub timespan_validated: bool,
}

fn norm_tokens(text: &str) -> Vec<String> {
    text.to_ascii_lowercase()
        .replace('_', " ")
        .split_whitespace()
        .map(singularize)
        .collect()
}

/// Match strength between a phrase and a column name: 3 when the full
/// phrase equals the name, 2 when the operative noun appears in the name,
/// 1 on any other token overlap, 0 otherwise.  Plural/singular and
/// underscore/space differences are ignored.
fn match_score(phrase: &NounPhrase, column_name: &str) -> u8 {
    let pt = norm_tokens(&phrase.text);
    let ct = norm_tokens(column_name);
    if pt == ct {
        return 3;
    }
    let op = singularize(&phrase.operative.to_ascii_lowercase());
    if ct.contains(&op) {
        return 2;
    }
    if pt.iter().any(|t| ct.contains(t)) {
        return 1;
    }
    0
}

/// True when the column's type is the natural one for the phrase type:
/// quantities live in numeric columns, time in temporal ones, and other
/// categories in categorical ones.
fn dtype_compatible(ptype: PhraseType, dtype: ColumnType) -> bool {
    matches!(
        (ptype, dtype),
        (PhraseType::Q, ColumnType::Numeric)
            | (PhraseType::T, ColumnType::Temporal)
            | (PhraseType::OC, ColumnType::Categorical)
    )
}

/// Best-scoring unclaimed column for a phrase.  Name-score ties break
/// toward the column whose type matches the phrase type, then toward the
/// lexicographically smaller column name so results never depend on
/// column order.
fn best_match<'a>(
    phrase: &NounPhrase,
    columns: &'a [Column],
    claimed: &BTreeMap<String, ColumnRoleInfo>,
) -> Option<&'a Column> {
    let mut best: Option<(&Column, u8, bool)> = None;
    let mut names: Vec<&Column> = columns.iter().filter(|c| !claimed.contains_key(&c.name)).collect();
    names.sort_by(|a, b| a.name.cmp(&b.name));
    for col in names {
        let score = match_score(phrase, &col.name);
        if score == 0 {
            continue;
        }
        let compat = dtype_compatible(phrase.ptype, col.dtype);
        let better = match best {
            None => true,
            Some((_, s, c)) => score > s || (score == s && compat && !c),
        };
        if better {
            best = Some((col, score, compat));
        }
    }
    best.map(|(c, _, _)| c)
}

fn role_for_phrase(phrase: &NounPhrase, column: &Column) -> ColumnRoleInfo {
    match phrase.ptype {
        PhraseType::Q => ColumnRoleInfo {
            role: ColumnRole::Dependent,
            reason: if phrase.quantified { RoleReason::Aggregated } else { RoleReason::NumericSelected },
        },
        PhraseType::T => {
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::TimeSelected }
        }
        PhraseType::OC => ColumnRoleInfo {
            role: ColumnRole::Independent,
            reason: if column.is_primary_key || column.all_values_unique() {
                RoleReason::PrimaryKey
            } else {
                RoleReason::Fallback
            },
        },
    }
}

struct Resolver<'a> {
    dataset: &'a Dataset,
    columns: BTreeMap<String, ColumnRoleInfo>,
    independent_order: Vec<String>,
    dependent_order: Vec<String>,
    vars: Vec<AlignedVar>,
}

impl<'a> Resolver<'a> {
    fn claim(&mut self, name: &str, info: ColumnRoleInfo) {
        self.columns.insert(name.to_string(), info);
        match info.role {
            ColumnRole::Independent => self.independent_order.push(name.to_string()),
            ColumnRole::Dependent => self.dependent_order.push(name.to_string()),
            ColumnRole::Ignored | ColumnRole::Unresolved => {}
        }
    }

    /// Align one phrase: claim its best column if any, record the var.
    fn resolve_phrase(&mut self, phrase: &NounPhrase, is_main: bool) {
        let matched = best_match(phrase, &self.dataset.columns, &self.columns)
            .map(|c| (c.name.clone(), role_for_phrase(phrase, c)));
        let column = matched.as_ref().map(|(name, _)| name.clone());
        if let Some((name, info)) = matched {
            self.claim(&name, info);
        }
        self.vars.push(AlignedVar {
            text: phrase.text.clone(),
            ptype: phrase.ptype,
            source: phrase.source,
            column,
            is_main,
        });
    }
}

/// Align a parsed caption with the table it captions.
///
/// Resolution order: by-clause variables, timespan, main phrase,
/// secondary body phrases, then leftover columns as implicit variables.
/// Fails with [`CaptionError::NoAlignment`] when not a single caption
/// variable matches any column *and* the table has no numeric column to
/// fall back on — with a numeric column present, the data alone still
/// supports a measure, so analysis proceeds on the implicit variables.
pub fn align_with_columns(
    ir: &CaptionIR,
    dataset: &Dataset,
) -> Result<CaptionAlignment, CaptionError> {
    let mut r = Resolver {
        dataset,
        columns: BTreeMap::new(),
        independent_order: Vec::new(),
        dependent_order: Vec::new(),
        vars: Vec::new(),
    };
    let mut measure_series = None;

    // By-clause variables first.  When two or more of them match distinct
    // numeric columns, the table is wide: each "by" variable is one series
    // of the main measure, and those columns are the dependents.
    let by_matches: Vec<(usize, String)> = ir
        .by_clauses
        .iter()
        .enumerate()
        .scan(BTreeMap::new(), |claimed, (i, phrase)| {
            let hit = best_match(phrase, &dataset.columns, claimed).map(|c| {
                claimed.insert(c.name.clone(), ColumnRoleInfo {
                    role: ColumnRole::Unresolved,
                    reason: RoleReason::Fallback,
                });
                (i, c.name.clone())
            });
            Some(hit)
        })
        .flatten()
        .collect();
    let numeric_hits: Vec<&(usize, String)> = by_matches
        .iter()
        .filter(|(_, name)| {
            dataset.column(name).map(|c| c.dtype == ColumnType::Numeric).unwrap_or(false)
        })
        .collect();

    if numeric_hits.len() >= 2 {
        // Measure series: the by-columns hold the measure named by the
        // main phrase, one column per series.
        let series_cols: Vec<String> = numeric_hits.iter().map(|(_, n)| n.clone()).collect();
        let label = ir
            .main_phrase()
            .map(|p| p.text.clone())
            .unwrap_or_else(|| "value".to_string());
        for (i, phrase) in ir.by_clauses.iter().enumerate() {
            let column = by_matches.iter().find(|(bi, _)| *bi == i).map(|(_, n)| n.clone());
            if let Some(name) = &column {
                if series_cols.contains(name) {
                    r.claim(name, ColumnRoleInfo {
                        role: ColumnRole::Dependent,
                        reason: RoleReason::NumericSelected,
                    });
                } else {
                    r.claim(name, ColumnRoleInfo {
                        role: ColumnRole::Independent,
                        reason: RoleReason::GroupBy,
                    });
                }
            }
            r.vars.push(AlignedVar {
                text: phrase.text.clone(),
                ptype: phrase.ptype,
                source: phrase.source,
                column,
                is_main: false,
            });
        }
        measure_series = Some(MeasureSeries { label, columns: series_cols });
    } else {
        for phrase in &ir.by_clauses {
            let matched = best_match(phrase, &dataset.columns, &r.columns).map(|c| c.name.clone());
            if let Some(name) = &matched {
                r.claim(name, ColumnRoleInfo {
                    role: ColumnRole::Independent,
                    reason: RoleReason::GroupBy,
                });
            }
            r.vars.push(AlignedVar {
                text: phrase.text.clone(),
                ptype: phrase.ptype,
                source: phrase.source,
                column: matched,
                is_main: false,
            });
        }
    }

    // Timespan: stands on a temporal column when one exists.
    let mut timespan_validated = false;
    if let Some(span) = &ir.timespan {
        let mut candidates: Vec<&Column> = dataset
            .columns
            .iter()
            .filter(|c| !r.columns.contains_key(&c.name) && c.dtype == ColumnType::Temporal)
            .collect();
        candidates.sort_by(|a, b| a.name.cmp(&b.name));
        let column = candidates.first().map(|c| c.name.clone());
        if let Some(name) = &column {
            r.claim(name, ColumnRoleInfo {
                role: ColumnRole::Independent,
                reason: RoleReason::TimeSelected,
            });
            timespan_validated = true;
        }
        r.vars.push(AlignedVar {
            text: format!("{} to {}", span.start, span.end),
            ptype: PhraseType::T,
            source: PhraseSource::Timespan,
            column,
            is_main: false,
        });
    }

    // Main phrase, then remaining body phrases in caption order.  When a
    // measure series was recognized the main phrase names the series, so
    // it claims no column of its own.
    if let Some(main) = ir.main_phrase() {
        if measure_series.is_some() {
            r.vars.push(AlignedVar {
                text: main.text.clone(),
                ptype: main.ptype,
                source: main.source,
                column: None,
                is_main: true,
            });
        } else {
            r.resolve_phrase(main, true);
        }
    }
    for (i, phrase) in ir.phrases.iter().enumerate() {
        if Some(i) != ir.main_index {
            r.resolve_phrase(phrase, false);
        }
    }

    let any_numeric = dataset.columns.iter().any(|c| c.dtype == ColumnType::Numeric);
    if !r.vars.iter().any(|v| v.column.is_some()) && !any_numeric {
        let subject = ir
            .main_phrase()
            .map(|p| p.text.clone())
            .unwrap_or_else(|| ir.caption.clone());
        return Err(CaptionError::NoAlignment(subject));
    }

    // Leftover columns become implicit variables, typed from their data.
    let mut leftovers: Vec<&Column> = dataset
        .columns
        .iter()
        .filter(|c| !r.columns.contains_key(&c.name))
        .collect();
    leftovers.sort_by(|a, b| a.name.cmp(&b.name));
    for col in leftovers {
        let (info, ptype) = match col.dtype {
            ColumnType::Temporal => (
                ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::TimeSelected },
                Some(PhraseType::T),
            ),
            ColumnType::Numeric => (
                ColumnRoleInfo {
                    role: ColumnRole::Dependent,
                    reason: RoleReason::NumericSelected,
                },
                Some(PhraseType::Q),
            ),
            ColumnType::Categorical | ColumnType::Text | ColumnType::Boolean => (
                ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::Fallback },
                Some(PhraseType::OC),
            ),
            ColumnType::Unknown => (
                ColumnRoleInfo { role: ColumnRole::Ignored, reason: RoleReason::Fallback },
                None,
            ),
        };
        r.claim(&col.name, info);
        if let Some(ptype) = ptype {
            r.vars.push(AlignedVar {
                text: col.name.clone(),
                ptype,
                source: PhraseSource::Implicit,
                column: Some(col.name.clone()),
                is_main: false,
            });
        }
    }

    Ok(CaptionAlignment {
        roles: RoleAssignment {
            columns: r.columns,
            independent_order: r.independent_order,
            dependent_order: r.dependent_order,
            measure_series,
        },
        vars: r.vars,
        timespan_validated,
    })
}
