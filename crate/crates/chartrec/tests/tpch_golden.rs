//! Golden analysis results for three well-known benchmark queries.
//!
//! These queries exercise the main structural patterns: a single
//! non-temporal GROUP BY with one aggregate (Q4), a double GROUP BY with
//! eight aggregates (Q1), and a single GROUP BY with two aggregates over a
//! FROM-subquery (Q22).  The expected roles and feature bits are frozen;
//! any drift here is a regression in the analyzer, not in the fixtures.

use chartrec::ingest::load_csv;
use chartrec::rules::{recommend, RuleContext};
use chartrec::sql::{
    extract_sql_features, identify_dependencies, pairwise_relationships, parse_sql,
};
use chartrec::types::{ChartType, ColumnRole, DataSource, Dataset, RoleReason};

fn load(query_file: &str, csv_file: &str) -> (chartrec::sql::QueryIR, Dataset) {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let query = std::fs::read_to_string(format!("{dir}/{query_file}")).unwrap();
    let csv = std::fs::read_to_string(format!("{dir}/{csv_file}")).unwrap();
    let ir = parse_sql(&query).unwrap();
    // Reuse the CSV loader, then stamp the right source on the dataset.
    let mut ds = load_csv(&csv, "placeholder").unwrap();
    ds.source = DataSource::Sql { query };
    (ir, ds)
}

#[test]
fn q4_roles_features_and_relationships() {
    let (ir, ds) = load("tpch_q4.sql", "tpch_q4.csv");

    let roles = identify_dependencies(&ir, &ds).unwrap();
    let pri = &roles.columns["o_orderpriority"];
    assert_eq!((pri.role, pri.reason), (ColumnRole::Independent, RoleReason::GroupBy));
    let cnt = &roles.columns["order_count"];
    assert_eq!((cnt.role, cnt.reason), (ColumnRole::Dependent, RoleReason::Aggregated));

    let v = extract_sql_features(&ir, &ds).unwrap();
    v.validate().unwrap();
    // aggregate; single non-time group by; group-by presence; 2<rows<=8;
    // exactly two selected columns.
    assert_eq!(v.set_indices(), vec![0, 1, 11, 15, 19]);

    let rels = pairwise_relationships(&roles).unwrap();
    assert_eq!(rels.len(), 1);
    assert_eq!(rels[0].independents, vec!["o_orderpriority"]);
    assert_eq!(rels[0].dependent, "order_count");
    assert!(!rels[0].combinable);
}

#[test]
fn q1_roles_features_and_relationships() {
    let (ir, ds) = load("tpch_q1.sql", "tpch_q1.csv");

    let roles = identify_dependencies(&ir, &ds).unwrap();
    for name in ["l_returnflag", "l_linestatus"] {
        let info = &roles.columns[name];
        assert_eq!((info.role, info.reason), (ColumnRole::Independent, RoleReason::GroupBy));
    }
    let deps = [
        "sum_qty", "sum_base_price", "sum_disc_price", "sum_charge", "avg_qty", "avg_price",
        "avg_disc", "count_order",
    ];
    for name in deps {
        let info = &roles.columns[name];
        assert_eq!(
            (info.role, info.reason),
            (ColumnRole::Dependent, RoleReason::Aggregated),
            "column {name}"
        );
    }
    assert_eq!(roles.independent_order, vec!["l_returnflag", "l_linestatus"]);
    assert_eq!(roles.dependent_order, deps);

    let v = extract_sql_features(&ir, &ds).unwrap();
    v.validate().unwrap();
    // aggregate; two non-time group bys; presence + multiple group by;
    // 2<rows<=8; more than two selected columns.
    assert_eq!(v.set_indices(), vec![0, 3, 11, 12, 15, 20]);

    let rels = pairwise_relationships(&roles).unwrap();
    assert_eq!(rels.len(), 8);
    assert!(rels.iter().all(|r| r.combinable));
    assert!(rels.iter().all(|r| r.independents == ["l_returnflag", "l_linestatus"]));
}

#[test]
fn q22_roles_features_and_relationships() {
    let (ir, ds) = load("tpch_q22.sql", "tpch_q22.csv");

    assert!(ir.tables.is_empty(), "the FROM-subquery must not leak tables");
    assert_eq!(ir.group_by, vec!["cntrycode"]);

    let roles = identify_dependencies(&ir, &ds).unwrap();
    let code = &roles.columns["cntrycode"];
    assert_eq!((code.role, code.reason), (ColumnRole::Independent, RoleReason::GroupBy));
    for name in ["numcust", "totacctbal"] {
        let info = &roles.columns[name];
        assert_eq!((info.role, info.reason), (ColumnRole::Dependent, RoleReason::Aggregated));
    }

    let v = extract_sql_features(&ir, &ds).unwrap();
    v.validate().unwrap();
    // aggregate; single non-time group by; group-by presence; 2<rows<=8;
    // three selected columns.
    assert_eq!(v.set_indices(), vec![0, 1, 11, 15, 20]);

    let rels = pairwise_relationships(&roles).unwrap();
    assert_eq!(rels.len(), 2);
    assert!(rels.iter().all(|r| r.combinable && r.independents == ["cntrycode"]));
    assert_eq!(rels[0].dependent, "numcust");
    assert_eq!(rels[1].dependent, "totacctbal");
}

#[test]
fn recommended_charts_follow_the_frozen_rules() {
    let ranked = |rec: &chartrec::types::Recommendation| {
        rec.ranked.iter().map(|r| r.chart_type).collect::<Vec<_>>()
    };

    // Q4: one small category axis, one count.
    let (ir, ds) = load("tpch_q4.sql", "tpch_q4.csv");
    let roles = identify_dependencies(&ir, &ds).unwrap();
    let recs = recommend(&roles, &ds, &RuleContext::default());
    assert_eq!(recs.len(), 1);
    assert_eq!(ranked(&recs[0]), vec![ChartType::VerticalBar, ChartType::HorizontalBar]);
    let b = recs[0].bindings.as_ref().unwrap();
    assert_eq!((b.x_field.as_str(), b.y_fields.as_slice()), ("o_orderpriority", &["order_count".to_string()][..]));
    assert!(!recs[0].combinable);

    // Q1: two category axes, eight aggregates — grouped bars, combinable.
    let (ir, ds) = load("tpch_q1.sql", "tpch_q1.csv");
    let roles = identify_dependencies(&ir, &ds).unwrap();
    let recs = recommend(&roles, &ds, &RuleContext::default());
    assert_eq!(recs.len(), 8);
    for rec in &recs {
        rec.validate().unwrap();
        assert_eq!(ranked(rec), vec![ChartType::GroupedBar, ChartType::StackedBar]);
        assert!(rec.combinable);
        let b = rec.bindings.as_ref().unwrap();
        assert_eq!(b.x_field, "l_returnflag");
        assert_eq!(b.group_field.as_deref(), Some("l_linestatus"));
    }

    // Q22: one category axis whose codes merely look numeric, two
    // aggregates — two combinable bar charts, not a scatter.
    let (ir, ds) = load("tpch_q22.sql", "tpch_q22.csv");
    let roles = identify_dependencies(&ir, &ds).unwrap();
    let recs = recommend(&roles, &ds, &RuleContext::default());
    assert_eq!(recs.len(), 2);
    for rec in &recs {
        assert_eq!(ranked(rec), vec![ChartType::VerticalBar, ChartType::HorizontalBar]);
        assert!(rec.combinable);
        assert_eq!(rec.bindings.as_ref().unwrap().x_field, "cntrycode");
    }
    let ys: Vec<&str> =
        recs.iter().map(|r| r.bindings.as_ref().unwrap().y_fields[0].as_str()).collect();
    assert_eq!(ys, vec!["numcust", "totacctbal"]);
}

#[test]
fn queries_round_trip_through_pretty_print() {
    for file in ["tpch_q1.sql", "tpch_q4.sql", "tpch_q22.sql"] {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
        let query = std::fs::read_to_string(format!("{dir}/{file}")).unwrap();
        let ir = parse_sql(&query).unwrap();
        let printed = ir.pretty_print();
        let reparsed = parse_sql(&printed).unwrap();
        assert_eq!(ir, reparsed, "{file} did not round trip");
    }
}
