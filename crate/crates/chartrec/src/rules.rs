//! The rule engine: a fixed, ordered table of chart selection rules.
//!
//! Rules are keyed on the *shape* of the analyzed relationship — how many
//! independent variables there are, whether any is time-related, whether
//! the dependents form a measure series, and how many rows the result
//! holds — never on raw column types, which lie whenever category codes
//! happen to look numeric.  The first matching rule decides the chart
//! family; one recommendation is produced per dependent column, marked
//! combinable when several dependents share the same independents.

use serde::Serialize;

use crate::ingest::time_related_name;
use crate::sql::is_time_related;
use crate::types::{
    size_bucket, Bindings, ChartType, Dataset, Provenance, RankedChart, Recommendation,
    RoleAssignment, SizeBucket,
};

/// Rank-1 recommendations score 1.0, rank-2 0.5: the fixed confidence
/// split between "the rule's chart" and "its designated alternative".
pub const RANK1_SCORE: f64 = 1.0;
pub const RANK2_SCORE: f64 = 0.5;

/// Extra signals the rules need beyond roles and data.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleContext {
    /// True when the source text (a caption) literally says
    /// "distribution" — the one wording cue strong enough to outrank the
    /// size-based bar rules.
    pub has_distribution_term: bool,
}

impl RuleContext {
    pub fn from_caption(caption: &str) -> RuleContext {
        RuleContext {
            has_distribution_term: caption.to_ascii_lowercase().contains("distribution"),
        }
    }
}

/// Measures named like proportions render naturally as pie slices.
fn share_like(name: &str) -> bool {
    let n = name.to_ascii_lowercase();
    ["share", "percent", "pct", "proportion", "fraction", "ratio"]
        .iter()
        .any(|k| n.contains(k))
}

fn ranked(rank1: ChartType, rank2: ChartType) -> Vec<RankedChart> {
    vec![
        RankedChart { chart_type: rank1, score: RANK1_SCORE },
        RankedChart { chart_type: rank2, score: RANK2_SCORE },
    ]
}

fn rule(id: &str) -> Provenance {
    Provenance::Rule { id: id.to_string() }
}

/// Build one recommendation per dependent column.  `rank2` may depend on
/// the dependent's name (the share-like pie upgrade).
fn per_dependent(
    id: &str,
    rank1: ChartType,
    rank2: impl Fn(&str) -> ChartType,
    x: &str,
    deps: &[String],
    series_field: Option<&str>,
    group_field: Option<&str>,
) -> Vec<Recommendation> {
    let combinable = deps.len() > 1;
    deps.iter()
        .map(|dep| Recommendation {
            ranked: ranked(rank1, rank2(dep)),
            bindings: Some(Bindings {
                x_field: x.to_string(),
                y_fields: vec![dep.clone()],
                series_field: series_field.map(str::to_string),
                group_field: group_field.map(str::to_string),
            }),
            provenance: rule(id),
            combinable,
        })
        .collect()
}

/// One recommendation plotting every series column of a measure series.
fn for_series(
    id: &str,
    rank1: ChartType,
    rank2: ChartType,
    x: &str,
    columns: &[String],
) -> Vec<Recommendation> {
    vec![Recommendation {
        ranked: ranked(rank1, rank2),
        bindings: Some(Bindings {
            x_field: x.to_string(),
            y_fields: columns.to_vec(),
            series_field: None,
            group_field: None,
        }),
        provenance: rule(id),
        combinable: false,
    }]
}

/// Apply the rule table to an analyzed relationship.
///
/// Always returns at least one recommendation: the final rule is a
/// catch-all that falls back to listing the table.
pub fn recommend(roles: &RoleAssignment, dataset: &Dataset, ctx: &RuleContext) -> Vec<Recommendation> {
    let deps = &roles.dependent_order;
    let series = roles.measure_series.as_ref();
    let bucket = size_bucket(dataset.row_count);

    // An empty result set has nothing to draw; list it and stop.
    if dataset.row_count == 0 {
        return vec![Recommendation {
            ranked: vec![RankedChart { chart_type: ChartType::TableListing, score: RANK1_SCORE }],
            bindings: None,
            provenance: rule("table_fallback"),
            combinable: false,
        }];
    }

    let temporal_of = |name: &String| {
        dataset
            .column(name)
            .map(|c| is_time_related(&c.name, c.dtype))
            .unwrap_or_else(|| time_related_name(name))
    };
    let (temporal, plain): (Vec<&String>, Vec<&String>) =
        roles.independent_order.iter().partition(|n| temporal_of(n));

    // A lone time axis draws a line per dependent.
    if temporal.len() == 1 && plain.is_empty() && series.is_none() && !deps.is_empty() {
        return per_dependent(
            "line_over_time",
            ChartType::Line,
            |_| ChartType::VerticalBar,
            temporal[0],
            deps,
            None,
            None,
        );
    }

    // A time axis plus a second variable (a category, or a measure series)
    // draws one line per series.
    if !temporal.is_empty() && (series.is_some() || !plain.is_empty()) {
        if let Some(s) = series {
            return for_series(
                "multi_series_line",
                ChartType::MultiLine,
                ChartType::GroupedBar,
                temporal[0],
                &s.columns,
            );
        }
        if !deps.is_empty() {
            return per_dependent(
                "multi_series_line",
                ChartType::MultiLine,
                |_| ChartType::GroupedBar,
                temporal[0],
                deps,
                Some(plain[0]),
                None,
            );
        }
    }

    // Two category axes — or one category axis fanned out over a measure
    // series — group the bars.
    if temporal.is_empty() {
        if let Some(s) = series {
            if !plain.is_empty() {
                return for_series(
                    "grouped_categories",
                    ChartType::GroupedBar,
                    ChartType::StackedBar,
                    plain[0],
                    &s.columns,
                );
            }
        } else if plain.len() >= 2 && !deps.is_empty() {
            return per_dependent(
                "grouped_categories",
                ChartType::GroupedBar,
                |_| ChartType::StackedBar,
                plain[0],
                deps,
                None,
                Some(plain[1]),
            );
        }
    }

    // "Distribution of ..." over a handful of categories is the classic
    // pie chart, whatever the measure is called.
    if ctx.has_distribution_term
        && bucket <= SizeBucket::UpTo8
        && !roles.independent_order.is_empty()
        && !deps.is_empty()
        && series.is_none()
    {
        return per_dependent(
            "distribution_pie",
            ChartType::Pie,
            |_| ChartType::VerticalBar,
            roles.independent_order[0].as_str(),
            deps,
            None,
            None,
        );
    }

    // One category axis: bars, oriented by how many there are.  Up to
    // eight categories read fine as vertical bars — and as a pie, when the
    // measure is a share of something.
    if !roles.independent_order.is_empty() && !deps.is_empty() && series.is_none() {
        let x = roles.independent_order[0].as_str();
        if bucket <= SizeBucket::UpTo8 {
            return per_dependent(
                "small_category_bar",
                ChartType::VerticalBar,
                |dep| if share_like(dep) { ChartType::Pie } else { ChartType::HorizontalBar },
                x,
                deps,
                None,
                None,
            );
        }
        if bucket <= SizeBucket::UpTo30 {
            return per_dependent(
                "wide_category_bar",
                ChartType::HorizontalBar,
                |_| ChartType::VerticalBar,
                x,
                deps,
                None,
                None,
            );
        }
    }

    // Two measures and nothing to group them by: plot one against the
    // other.
    if roles.independent_order.is_empty() && deps.len() == 2 && series.is_none() {
        return vec![Recommendation {
            ranked: ranked(ChartType::Scatter, ChartType::TableListing),
            bindings: Some(Bindings {
                x_field: deps[0].clone(),
                y_fields: vec![deps[1].clone()],
                series_field: None,
                group_field: None,
            }),
            provenance: rule("paired_measures_scatter"),
            combinable: false,
        }];
    }

    // Nothing chartable: show the table.
    vec![Recommendation {
        ranked: vec![RankedChart { chart_type: ChartType::TableListing, score: RANK1_SCORE }],
        bindings: None,
        provenance: rule("table_fallback"),
        combinable: false,
    }]
}

/// One row of the rule table, for documentation dumps.
#[derive(Debug, Clone, Serialize)]
pub struct RuleDoc {
    pub id: &'static str,
    /// Position in the table; lower fires first.
    pub priority: usize,
    /// Human-readable condition.
    pub when: &'static str,
    pub rank1: ChartType,
    pub rank2: &'static str,
}

/// The rule table in evaluation order.
pub fn rule_docs() -> Vec<RuleDoc> {
    let table: [(&str, &str, ChartType, &str); 8] = [
        (
            "line_over_time",
            "exactly one independent variable and it is time-related",
            ChartType::Line,
            "vertical_bar",
        ),
        (
            "multi_series_line",
            "a time-related independent plus a category or a measure series",
            ChartType::MultiLine,
            "grouped_bar",
        ),
        (
            "grouped_categories",
            "two category independents, or one category fanned over a measure series",
            ChartType::GroupedBar,
            "stacked_bar",
        ),
        (
            "distribution_pie",
            "the caption says 'distribution' and there are at most 8 rows",
            ChartType::Pie,
            "vertical_bar",
        ),
        (
            "small_category_bar",
            "one category independent and at most 8 rows",
            ChartType::VerticalBar,
            "pie when the measure is share-like, horizontal_bar otherwise",
        ),
        (
            "wide_category_bar",
            "one category independent and at most 30 rows",
            ChartType::HorizontalBar,
            "vertical_bar",
        ),
        (
            "paired_measures_scatter",
            "no independents and exactly two measures",
            ChartType::Scatter,
            "table_listing",
        ),
        ("table_fallback", "anything else", ChartType::TableListing, "none"),
    ];
    table
        .into_iter()
        .enumerate()
        .map(|(i, (id, when, rank1, rank2))| RuleDoc { id, priority: i + 1, when, rank1, rank2 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caption::{align_with_columns, parse_caption, CuratedLexicon};
    use crate::ingest::load_csv;
    use crate::types::{ColumnRole, ColumnRoleInfo, RoleReason};
    use std::collections::BTreeMap;

    fn recs_for(caption: &str, csv: &str) -> Vec<Recommendation> {
        let dataset = load_csv(csv, caption).unwrap();
        let ir = parse_caption(caption, &CuratedLexicon::new()).unwrap();
        let alignment = align_with_columns(&ir, &dataset).unwrap();
        let recs = recommend(&alignment.roles, &dataset, &RuleContext::from_caption(caption));
        for rec in &recs {
            rec.validate().unwrap();
        }
        recs
    }

    fn charts(rec: &Recommendation) -> Vec<ChartType> {
        rec.ranked.iter().map(|r| r.chart_type).collect()
    }

    #[test]
    fn lone_time_axis_draws_a_line() {
        let recs = recs_for(
            "Number of employees of Acme worldwise from 2008 to 2015",
            "year,employees\n2008,32000\n2009,34300\n2010,46600\n2011,60400\n2012,72800\n2013,80300\n2014,92600\n2015,110000\n",
        );
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::Line, ChartType::VerticalBar]);
        let b = recs[0].bindings.as_ref().unwrap();
        assert_eq!(b.x_field, "year");
        assert_eq!(b.y_fields, vec!["employees"]);
        assert_eq!(recs[0].provenance, Provenance::Rule { id: "line_over_time".into() });
    }

    #[test]
    fn time_plus_category_draws_multiple_lines() {
        let recs = recs_for(
            "Mobile operating systems market share worldwide from January 2014 to December 2016",
            "month,system,share\nJan 2014,Android,43.7\nJan 2014,iOS,54.2\nFeb 2014,Android,45.0\nFeb 2014,iOS,52.9\n",
        );
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::MultiLine, ChartType::GroupedBar]);
        let b = recs[0].bindings.as_ref().unwrap();
        assert_eq!(b.x_field, "month");
        assert_eq!(b.series_field.as_deref(), Some("system"));
    }

    #[test]
    fn measure_series_groups_the_bars() {
        let recs = recs_for(
            "Market share of record labels in Sweden from Dec 26, 2016 to Jan 1, 2017, by single and album charts",
            "label,single charts,album charts\nUniversal,41.9,35.5\nSony,32.1,31.5\nWarner,18.3,17.4\nIndependent,7.7,15.6\n",
        );
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::GroupedBar, ChartType::StackedBar]);
        let b = recs[0].bindings.as_ref().unwrap();
        assert_eq!(b.x_field, "label");
        assert_eq!(b.y_fields, vec!["single charts", "album charts"]);
    }

    #[test]
    fn distribution_wording_upgrades_to_pie() {
        let recs = recs_for(
            "Distribution of smartphone users by age group",
            "age group,users\n18-24,21\n25-34,28\n35-44,19\n45-54,14\n",
        );
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::Pie, ChartType::VerticalBar]);
        assert_eq!(recs[0].provenance, Provenance::Rule { id: "distribution_pie".into() });
    }

    #[test]
    fn share_like_measure_gets_pie_as_runner_up() {
        let recs = recs_for(
            "Australia: Leading export partners in 2015",
            "partner,share\nChina,32.2\nJapan,15.9\nSouth Korea,7.1\nUnited States,5.4\nIndia,4.2\n",
        );
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::VerticalBar, ChartType::Pie]);
    }

    #[test]
    fn wide_category_lists_sideways() {
        let mut csv = String::from("movie,revenue\n");
        for i in 0..15 {
            csv.push_str(&format!("Movie {i},{}\n", 900 - i * 31));
        }
        let recs = recs_for("Box office revenue of the highest grossing movies in 2016", &csv);
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::HorizontalBar, ChartType::VerticalBar]);
    }

    #[test]
    fn two_bare_measures_scatter() {
        let mut columns = BTreeMap::new();
        for name in ["height", "weight"] {
            columns.insert(
                name.to_string(),
                ColumnRoleInfo { role: ColumnRole::Dependent, reason: RoleReason::NumericSelected },
            );
        }
        let roles = RoleAssignment {
            columns,
            independent_order: vec![],
            dependent_order: vec!["height".into(), "weight".into()],
            measure_series: None,
        };
        let dataset =
            load_csv("height,weight\n170,65\n182,80\n164,58\n", "Height and weight of athletes")
                .unwrap();
        let recs = recommend(&roles, &dataset, &RuleContext::default());
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::Scatter, ChartType::TableListing]);
        let b = recs[0].bindings.as_ref().unwrap();
        assert_eq!(b.x_field, "height");
        assert_eq!(b.y_fields, vec!["weight"]);
    }

    #[test]
    fn empty_result_sets_are_listed_not_charted() {
        use crate::types::{Column, ColumnType, DataSource};
        let mut columns = BTreeMap::new();
        columns.insert(
            "region".to_string(),
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::GroupBy },
        );
        columns.insert(
            "total".to_string(),
            ColumnRoleInfo { role: ColumnRole::Dependent, reason: RoleReason::Aggregated },
        );
        let roles = RoleAssignment {
            columns,
            independent_order: vec!["region".into()],
            dependent_order: vec!["total".into()],
            measure_series: None,
        };
        let dataset = Dataset {
            source: DataSource::Sql {
                query: "select region, sum(sales) as total from s group by region".into(),
            },
            columns: vec![
                Column {
                    name: "region".into(),
                    dtype: ColumnType::Categorical,
                    is_primary_key: false,
                    values: vec![],
                },
                Column {
                    name: "total".into(),
                    dtype: ColumnType::Numeric,
                    is_primary_key: false,
                    values: vec![],
                },
            ],
            row_count: 0,
        };
        let recs = recommend(&roles, &dataset, &RuleContext::default());
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::TableListing]);
        assert!(recs[0].bindings.is_none());
    }

    #[test]
    fn unchartable_shapes_fall_back_to_the_table() {
        let roles = RoleAssignment {
            columns: BTreeMap::new(),
            independent_order: vec![],
            dependent_order: vec![],
            measure_series: None,
        };
        let dataset = load_csv("a,b\n1,2\n", "whatever").unwrap();
        let recs = recommend(&roles, &dataset, &RuleContext::default());
        assert_eq!(recs.len(), 1);
        assert_eq!(charts(&recs[0]), vec![ChartType::TableListing]);
        assert!(recs[0].bindings.is_none());
        recs[0].validate().unwrap();
    }

    #[test]
    fn oversized_results_also_fall_back() {
        let mut csv = String::from("city,population\n");
        for i in 0..40 {
            csv.push_str(&format!("City {i},{}\n", 50000 + i * 313));
        }
        let recs = recs_for("Population of cities", &csv);
        assert_eq!(charts(&recs[0]), vec![ChartType::TableListing]);
    }

    #[test]
    fn multiple_dependents_are_combinable() {
        let mut columns = BTreeMap::new();
        columns.insert(
            "region".to_string(),
            ColumnRoleInfo { role: ColumnRole::Independent, reason: RoleReason::GroupBy },
        );
        for name in ["revenue", "profit"] {
            columns.insert(
                name.to_string(),
                ColumnRoleInfo { role: ColumnRole::Dependent, reason: RoleReason::Aggregated },
            );
        }
        let roles = RoleAssignment {
            columns,
            independent_order: vec!["region".into()],
            dependent_order: vec!["revenue".into(), "profit".into()],
            measure_series: None,
        };
        let dataset = load_csv(
            "region,revenue,profit\nWest,10,2\nEast,12,3\nSouth,8,1\n",
            "Revenue and profit by region",
        )
        .unwrap();
        let recs = recommend(&roles, &dataset, &RuleContext::default());
        assert_eq!(recs.len(), 2);
        assert!(recs.iter().all(|r| r.combinable));
        assert!(recs.iter().all(|r| r.rank1() == ChartType::VerticalBar));
        let ys: Vec<&str> = recs
            .iter()
            .map(|r| r.bindings.as_ref().unwrap().y_fields[0].as_str())
            .collect();
        assert_eq!(ys, vec!["revenue", "profit"]);
    }

    #[test]
    fn rule_docs_cover_the_table_in_order() {
        let docs = rule_docs();
        assert_eq!(docs.len(), 8);
        assert_eq!(docs[0].id, "line_over_time");
        assert_eq!(docs[7].id, "table_fallback");
        assert!(docs.windows(2).all(|w| w[0].priority < w[1].priority));
        let json = serde_json::to_string(&docs).unwrap();
        assert!(json.contains("\"rank1\":\"multi_line\""));
    }
}
