//! End-to-end analysis: dispatch a dataset to the SQL or caption pipeline,
//! then turn the result into chart recommendations with either engine.
//!
//! [`analyze`] looks at the dataset's [`DataSource`] and runs the matching
//! front end — query parsing and dependency detection for SQL, caption
//! parsing and column alignment for captioned tables.  Both paths end in
//! the same place: a [`RoleAssignment`] saying which columns vary freely
//! and which respond, plus a schema-tagged [`FeatureVector`].  From there,
//! [`recommend_with_rules`] applies the deterministic rule set and
//! [`recommend_with_model`] asks a trained forest to rank all chart types.

use crate::caption::{
    self, CaptionAlignment, CaptionError, CaptionIR, CuratedLexicon, LexiconProvider,
};
use crate::forest::{ForestError, RandomForest};
use crate::rules::{self, RuleContext};
use crate::sql::{self, QueryIR, SqlError};
use crate::types::{DataSource, Dataset, FeatureVector, Provenance, Recommendation, RoleAssignment};

/// Any failure between raw input and a finished analysis.
#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Sql(#[from] SqlError),
    #[error(transparent)]
    Caption(#[from] CaptionError),
    #[error(transparent)]
    Model(#[from] ForestError),
}

/// Everything the analysis front end learned about one dataset.
///
/// `roles` and `features` are always present; the remaining fields carry
/// the intermediate representation of whichever front end ran, so callers
/// can show *why* a column was classified the way it was.
#[derive(Debug, Clone)]
pub struct Analysis {
    /// Independent/dependent classification for every selected column.
    pub roles: RoleAssignment,
    /// Binary feature vector in the schema matching the data source.
    pub features: FeatureVector,
    /// Parsed query, for SQL-sourced datasets.
    pub query: Option<QueryIR>,
    /// Parsed caption, for caption-sourced datasets.
    pub caption: Option<CaptionIR>,
    /// Caption-variable-to-column alignment, for caption-sourced datasets.
    pub alignment: Option<CaptionAlignment>,
}

/// Analyze a dataset with the built-in quantifier lexicon.
pub fn analyze(ds: &Dataset) -> Result<Analysis, AnalysisError> {
    analyze_with_lexicon(ds, &CuratedLexicon::new())
}

/// Analyze a dataset, scoring caption nouns against a caller-supplied
/// lexicon.  The lexicon only matters for caption-sourced datasets; SQL
/// analysis never consults it.
pub fn analyze_with_lexicon(
    ds: &Dataset,
    lexicon: &dyn LexiconProvider,
) -> Result<Analysis, AnalysisError> {
    match &ds.source {
        DataSource::Sql { query } => {
            let ir = sql::parse_sql(query)?;
            let roles = sql::identify_dependencies(&ir, ds)?;
            let features = sql::extract_sql_features(&ir, ds)?;
            Ok(Analysis { roles, features, query: Some(ir), caption: None, alignment: None })
        }
        DataSource::Caption { caption: text } => {
            let ir = caption::parse_caption(text, lexicon)?;
            let alignment = caption::align_with_columns(&ir, ds)?;
            let features = caption::extract_caption_features(&ir, &alignment, ds.row_count);
            Ok(Analysis {
                roles: alignment.roles.clone(),
                features,
                query: None,
                caption: Some(ir),
                alignment: Some(alignment),
            })
        }
    }
}

/// Run the rule engine over a finished analysis.
///
/// Caption-sourced datasets get a [`RuleContext`] derived from the caption
/// text (so distribution wording can steer toward pie charts); SQL queries
/// carry no such signal and use the default context.
pub fn recommend_with_rules(analysis: &Analysis, ds: &Dataset) -> Vec<Recommendation> {
    let ctx = match &ds.source {
        DataSource::Caption { caption } => RuleContext::from_caption(caption),
        DataSource::Sql { .. } => RuleContext::default(),
    };
    rules::recommend(&analysis.roles, ds, &ctx)
}

/// Rank chart types with a trained forest.
///
/// The model scores every chart type from the feature vector alone; the
/// column bindings still come from the rule engine's top recommendation,
/// since the forest reasons over anonymized features and cannot name
/// columns.  Returns a single recommendation holding the full ranking.
pub fn recommend_with_model(
    analysis: &Analysis,
    ds: &Dataset,
    forest: &RandomForest,
) -> Result<Recommendation, AnalysisError> {
    let ranked = forest.predict_ranked(&analysis.features)?;
    let bindings = recommend_with_rules(analysis, ds).into_iter().next().and_then(|r| r.bindings);
    Ok(Recommendation {
        ranked,
        bindings,
        provenance: Provenance::Model { id: forest.id() },
        combinable: false,
    })
}

/// One-shot convenience: analyze and apply the rule engine.
pub fn recommend(ds: &Dataset) -> Result<Vec<Recommendation>, AnalysisError> {
    let analysis = analyze(ds)?;
    Ok(recommend_with_rules(&analysis, ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{read_corpus, write_corpus, LabeledExample, RandomForest, TrainConfig};
    use crate::ingest::load_envelope;
    use crate::types::{ChartType, ColumnRole, FeatureSchema};

    fn q4_dataset() -> Dataset {
        load_envelope(
            r#"{
                "v": 1,
                "source": "sql",
                "query": "select o_orderpriority, count(*) as order_count from orders group by o_orderpriority",
                "columns": [{"name": "o_orderpriority"}, {"name": "order_count"}],
                "rows": [["1-URGENT", 10], ["2-HIGH", 20], ["3-MEDIUM", 30]]
            }"#,
        )
        .unwrap()
    }

    fn caption_dataset() -> Dataset {
        load_envelope(
            r#"{
                "v": 1,
                "source": "table",
                "caption": "Number of stores of Abc Corp worldwide, by country",
                "columns": [{"name": "country"}, {"name": "stores"}],
                "rows": [["US", 120], ["DE", 45], ["FR", 30], ["JP", 25]]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn sql_datasets_run_the_query_pipeline() {
        let ds = q4_dataset();
        let a = analyze(&ds).unwrap();
        assert_eq!(a.features.schema, FeatureSchema::Sql21);
        assert!(a.query.is_some());
        assert!(a.caption.is_none() && a.alignment.is_none());
        assert_eq!(a.roles.columns["o_orderpriority"].role, ColumnRole::Independent);
        assert_eq!(a.roles.columns["order_count"].role, ColumnRole::Dependent);

        let recs = recommend_with_rules(&a, &ds);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].rank1(), ChartType::VerticalBar);
        assert_eq!(recs[0].rank2(), Some(ChartType::HorizontalBar));
    }

    #[test]
    fn caption_datasets_run_the_caption_pipeline() {
        let ds = caption_dataset();
        let a = analyze(&ds).unwrap();
        assert_eq!(a.features.schema, FeatureSchema::Cap19);
        assert!(a.query.is_none());
        assert!(a.caption.is_some() && a.alignment.is_some());
        assert_eq!(a.roles.columns["country"].role, ColumnRole::Independent);
        assert_eq!(a.roles.columns["stores"].role, ColumnRole::Dependent);

        let recs = recommend(&ds).unwrap();
        assert_eq!(recs[0].rank1(), ChartType::VerticalBar);
    }

    #[test]
    fn caption_distribution_context_reaches_the_rules() {
        let ds = load_envelope(
            r#"{
                "v": 1,
                "source": "table",
                "caption": "Distribution of smartphone users by age group",
                "columns": [{"name": "age group"}, {"name": "users"}],
                "rows": [["18-24", 31.5], ["25-34", 44.0], ["35-44", 24.5]]
            }"#,
        )
        .unwrap();
        let recs = recommend(&ds).unwrap();
        assert_eq!(recs[0].rank1(), ChartType::Pie);
    }

    #[test]
    fn model_engine_reports_model_provenance_and_rule_bindings() {
        let ds = q4_dataset();
        let a = analyze(&ds).unwrap();

        // A tiny forest trained on this one example must at least rank
        // the example's own label first.
        let corpus = vec![LabeledExample {
            features: a.features.clone(),
            label1: ChartType::VerticalBar,
            label2: Some(ChartType::HorizontalBar),
        }];
        let corpus = read_corpus(&write_corpus(&corpus)).unwrap();
        let forest = RandomForest::train(
            &corpus,
            FeatureSchema::Sql21,
            TrainConfig { n_trees: 5, ..TrainConfig::default() },
        )
        .unwrap();

        let rec = recommend_with_model(&a, &ds, &forest).unwrap();
        assert_eq!(rec.ranked.len(), ChartType::ALL.len());
        assert_eq!(rec.ranked[0].chart_type, ChartType::VerticalBar);
        assert!(matches!(&rec.provenance, Provenance::Model { id } if id == &forest.id()));
        assert!(!rec.combinable);
        let b = rec.bindings.expect("bindings borrowed from the rule engine");
        assert_eq!(b.x_field, "o_orderpriority");
        assert_eq!(b.y_fields, vec!["order_count".to_string()]);
    }

    #[test]
    fn bad_sql_surfaces_as_an_analysis_error() {
        let ds = Dataset {
            source: DataSource::Sql { query: "selec bogus".into() },
            columns: vec![],
            row_count: 0,
        };
        assert!(matches!(analyze(&ds), Err(AnalysisError::Sql(_))));
    }

    #[test]
    fn empty_caption_surfaces_as_an_analysis_error() {
        let ds = Dataset {
            source: DataSource::Caption { caption: "   ".into() },
            columns: vec![],
            row_count: 0,
        };
        assert!(matches!(analyze(&ds), Err(AnalysisError::Caption(CaptionError::EmptyCaption))));
    }
}
