//! A random forest over the binary feature schemas.
//!
//! Each tree trains on a bootstrap sample of the corpus and, at every
//! node, considers a fresh random subset of features.  Prediction averages
//! the per-tree leaf histograms into class probabilities over all nine
//! chart types.  Determinism is a contract: the same corpus, schema, and
//! seed produce byte-identical models regardless of thread count, because
//! every tree derives its own RNG stream from the seed and its index.

mod eval;
mod tree;

pub use eval::{cross_validate, EvalCell, EvalConfig, EvalReport, FoldAssignment};
pub use tree::{best_split, gini, DecisionTree, Node};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{ChartType, FeatureSchema, FeatureVector, RankedChart};

/// Model file format version this crate reads and writes.
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum ForestError {
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("example {index} uses schema {got} but this forest expects {expected}")]
    SchemaMismatch { index: usize, got: FeatureSchema, expected: FeatureSchema },
    #[error("gini impurity of an empty node is undefined")]
    EmptyNode,
    #[error("example {index}: rank-1 and rank-2 labels must differ")]
    DuplicateLabels { index: usize },
    #[error("invalid training configuration: {0}")]
    BadConfig(String),
    #[error("a corpus of {size} examples cannot fill {k} folds")]
    CorpusTooSmall { size: usize, k: usize },
    #[error("unsupported model version {got} (expected {expected})")]
    VersionMismatch { got: u64, expected: u32 },
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("corpus line {line}: {message}")]
    MalformedCorpus { line: usize, message: String },
}

/// One training example: a feature vector with the chart type that was
/// (or would be) used for it, and optionally the runner-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub label1: ChartType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label2: Option<ChartType>,
}

impl LabeledExample {
    /// An example may omit the runner-up label, but it must never repeat
    /// the first one.
    pub fn validate(&self) -> Result<(), ForestError> {
        if self.label2 == Some(self.label1) {
            return Err(ForestError::DuplicateLabels { index: 0 });
        }
        Ok(())
    }
}

/// How many features each node may consider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `⌊√(schema length)⌋` — 4 for both schemas.
    Auto,
    Fixed(usize),
}

impl MaxFeatures {
    pub fn resolve(self, schema_len: usize) -> usize {
        match self {
            MaxFeatures::Auto => (schema_len as f64).sqrt().floor() as usize,
            MaxFeatures::Fixed(k) => k,
        }
    }
}

impl std::fmt::Display for MaxFeatures {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaxFeatures::Auto => write!(f, "auto"),
            MaxFeatures::Fixed(k) => write!(f, "{k}"),
        }
    }
}

/// Training knobs.  `min_samples_leaf` is the smallest node that will
/// still be considered for a split: a node with fewer examples becomes a
/// leaf.  Setting it to the corpus size therefore caps trees at depth 1.
/// `bootstrap` is on for normal training; turning it off trains every
/// tree on the full corpus, which makes single-tree behavior exactly
/// reproducible against an exhaustive split search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub seed: u64,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n_trees: 100,
            max_features: MaxFeatures::Auto,
            seed: 42,
            min_samples_leaf: 1,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub schema: FeatureSchema,
    /// Class list in histogram order; prediction ties resolve to the
    /// earlier class.
    pub classes: Vec<ChartType>,
    pub config: TrainConfig,
    trees: Vec<DecisionTree>,
}

fn check_schema(corpus: &[LabeledExample], schema: FeatureSchema) -> Result<(), ForestError> {
    for (index, ex) in corpus.iter().enumerate() {
        if ex.features.schema != schema {
            return Err(ForestError::SchemaMismatch {
                index,
                got: ex.features.schema,
                expected: schema,
            });
        }
        if ex.label2 == Some(ex.label1) {
            return Err(ForestError::DuplicateLabels { index });
        }
    }
    Ok(())
}

impl RandomForest {
    /// Train a forest on a labeled corpus.
    ///
    /// Tree `i` seeds a dedicated [`ChaCha8Rng`] stream from
    /// `(config.seed, i)`, so training order — sequential or parallel —
    /// cannot change the result.
    pub fn train(
        corpus: &[LabeledExample],
        schema: FeatureSchema,
        config: TrainConfig,
    ) -> Result<RandomForest, ForestError> {
        if corpus.is_empty() {
            return Err(ForestError::EmptyCorpus);
        }
        check_schema(corpus, schema)?;
        if config.n_trees == 0 {
            return Err(ForestError::BadConfig("n_trees must be at least 1".into()));
        }
        let schema_len = schema.len();
        let m = config.max_features.resolve(schema_len);
        if m == 0 || m > schema_len {
            return Err(ForestError::BadConfig(format!(
                "max_features must be between 1 and {schema_len}, got {m}"
            )));
        }
        if config.min_samples_leaf == 0 {
            return Err(ForestError::BadConfig("min_samples_leaf must be at least 1".into()));
        }

        let grow_cfg = tree::GrowConfig {
            schema_len,
            n_classes: ChartType::ALL.len(),
            max_features: m,
            min_samples_leaf: config.min_samples_leaf,
        };
        let n = corpus.len();
        let trees: Vec<DecisionTree> = (0..config.n_trees)
            .into_par_iter()
            .map(|tree_index| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(tree_index as u64);
                let members: Vec<usize> = if config.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                tree::grow(corpus, members, &grow_cfg, &mut rng)
            })
            .collect();

        Ok(RandomForest { schema, classes: ChartType::ALL.to_vec(), config, trees })
    }

    /// Rank all chart types for a feature vector, most probable first.
    ///
    /// Probabilities are the mean of each tree's leaf-histogram
    /// proportions, so they always sum to 1.  Ties keep class-list order.
    /// Every class appears, whatever its probability — more trees refine
    /// the numbers but never change the set.
    pub fn predict_ranked(&self, features: &FeatureVector) -> Result<Vec<RankedChart>, ForestError> {
        if features.schema != self.schema {
            return Err(ForestError::SchemaMismatch {
                index: 0,
                got: features.schema,
                expected: self.schema,
            });
        }
        let n_classes = self.classes.len();
        let mut probabilities = vec![0.0f64; n_classes];
        for tree in &self.trees {
            let counts = tree.leaf_counts(&features.bits);
            let total: u32 = counts.iter().sum();
            debug_assert!(total > 0, "grown leaves are never empty");
            for (p, &c) in probabilities.iter_mut().zip(counts) {
                *p += f64::from(c) / f64::from(total);
            }
        }
        let n_trees = self.trees.len() as f64;
        for p in &mut probabilities {
            *p /= n_trees;
        }

        let mut order: Vec<usize> = (0..n_classes).collect();
        order.sort_by(|&a, &b| {
            probabilities[b].partial_cmp(&probabilities[a]).expect("finite").then(a.cmp(&b))
        });
        Ok(order
            .into_iter()
            .map(|i| RankedChart { chart_type: self.classes[i], score: probabilities[i] })
            .collect())
    }

    /// Stable identifier naming the schema and training recipe.
    pub fn id(&self) -> String {
        format!(
            "forest-{}-t{}-m{}-s{}",
            self.schema.as_str(),
            self.config.n_trees,
            self.config.max_features,
            self.config.seed
        )
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn tree(&self, index: usize) -> &DecisionTree {
        &self.trees[index]
    }

    /// Serialize as versioned JSON.  Output is byte-stable for a given
    /// model, so identical training runs write identical files.
    pub fn to_json(&self) -> String {
        let doc = ModelDoc { v: MODEL_VERSION, model: self.clone() };
        serde_json::to_string(&doc).expect("model serializes")
    }

    /// Parse a model file, checking its version first.
    pub fn from_json(json: &str) -> Result<RandomForest, ForestError> {
        let value: serde_json::Value = serde_json::from_str(json)
            .map_err(|e| ForestError::MalformedModel(e.to_string()))?;
        let got = value
            .get("v")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| ForestError::MalformedModel("missing version field `v`".into()))?;
        if got != u64::from(MODEL_VERSION) {
            return Err(ForestError::VersionMismatch { got, expected: MODEL_VERSION });
        }
        let doc: ModelDoc = serde_json::from_value(value)
            .map_err(|e| ForestError::MalformedModel(e.to_string()))?;
        if doc.model.trees.is_empty() {
            return Err(ForestError::MalformedModel("model has no trees".into()));
        }
        if doc.model.classes.is_empty() {
            return Err(ForestError::MalformedModel("model has no classes".into()));
        }
        Ok(doc.model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    v: u32,
    #[serde(flatten)]
    model: RandomForest,
}

/// Parse a JSON-lines corpus: one [`LabeledExample`] per line, blank
/// lines ignored.
pub fn read_corpus(text: &str) -> Result<Vec<LabeledExample>, ForestError> {
    let mut corpus = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ex: LabeledExample = serde_json::from_str(line)
            .map_err(|e| ForestError::MalformedCorpus { line: i + 1, message: e.to_string() })?;
        if ex.label2 == Some(ex.label1) {
            return Err(ForestError::MalformedCorpus {
                line: i + 1,
                message: "rank-1 and rank-2 labels must differ".into(),
            });
        }
        corpus.push(ex);
    }
    Ok(corpus)
}

/// Serialize a corpus as JSON lines, the inverse of [`read_corpus`].
pub fn write_corpus(corpus: &[LabeledExample]) -> String {
    let mut out = String::new();
    for ex in corpus {
        out.push_str(&serde_json::to_string(ex).expect("example serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(schema: FeatureSchema, bits: &[usize]) -> FeatureVector {
        let mut v = FeatureVector::zeros(schema);
        for &b in bits {
            v.set(b);
        }
        v
    }

    fn example(bits: &[usize], label1: ChartType, label2: Option<ChartType>) -> LabeledExample {
        LabeledExample { features: fv(FeatureSchema::Sql21, bits), label1, label2 }
    }

    /// A corpus where bit 0 separates lines from vertical bars exactly.
    fn separable_corpus() -> Vec<LabeledExample> {
        let mut corpus = Vec::new();
        for i in 0..10 {
            corpus.push(example(
                &[0, 13 + (i % 3), 18],
                ChartType::Line,
                Some(ChartType::VerticalBar),
            ));
            corpus.push(example(
                &[1, 13 + (i % 3), 18],
                ChartType::VerticalBar,
                Some(ChartType::HorizontalBar),
            ));
        }
        corpus
    }

    #[test]
    fn gini_has_the_textbook_values() {
        assert_eq!(gini(&[8, 0, 0]).unwrap(), 0.0);
        assert_eq!(gini(&[4, 4]).unwrap(), 0.5);
        assert_eq!(gini(&[3, 1]).unwrap(), 0.375);
        assert_eq!(gini(&[]).unwrap_err(), ForestError::EmptyNode);
        assert_eq!(gini(&[0, 0]).unwrap_err(), ForestError::EmptyNode);
    }

    #[test]
    fn training_rejects_degenerate_inputs() {
        assert_eq!(
            RandomForest::train(&[], FeatureSchema::Sql21, TrainConfig::default()).unwrap_err(),
            ForestError::EmptyCorpus
        );

        let mixed = vec![LabeledExample {
            features: FeatureVector::zeros(FeatureSchema::Cap19),
            label1: ChartType::Line,
            label2: None,
        }];
        assert!(matches!(
            RandomForest::train(&mixed, FeatureSchema::Sql21, TrainConfig::default()),
            Err(ForestError::SchemaMismatch { index: 0, .. })
        ));

        let twins = vec![example(&[0], ChartType::Line, Some(ChartType::Line))];
        assert_eq!(
            RandomForest::train(&twins, FeatureSchema::Sql21, TrainConfig::default()).unwrap_err(),
            ForestError::DuplicateLabels { index: 0 }
        );

        let ok = separable_corpus();
        let bad = TrainConfig { max_features: MaxFeatures::Fixed(22), ..TrainConfig::default() };
        assert!(matches!(
            RandomForest::train(&ok, FeatureSchema::Sql21, bad),
            Err(ForestError::BadConfig(_))
        ));
    }

    #[test]
    fn a_separating_bit_is_found_and_used() {
        let corpus = separable_corpus();
        let config = TrainConfig {
            n_trees: 1,
            max_features: MaxFeatures::Fixed(21),
            seed: 7,
            min_samples_leaf: corpus.len(),
            bootstrap: false,
        };
        let forest = RandomForest::train(&corpus, FeatureSchema::Sql21, config).unwrap();
        match forest.tree(0).root() {
            Node::Split { feature, .. } => assert_eq!(*feature, 0),
            other => panic!("expected a root split, got {other:?}"),
        }
        assert_eq!(forest.tree(0).nodes.len(), 3, "depth capped at one split");

        let ranked = forest.predict_ranked(&fv(FeatureSchema::Sql21, &[0, 13, 18])).unwrap();
        assert_eq!(ranked[0].chart_type, ChartType::Line);
        assert_eq!(ranked[0].score, 1.0);
    }

    #[test]
    fn probabilities_cover_every_class_and_sum_to_one() {
        let forest = RandomForest::train(
            &separable_corpus(),
            FeatureSchema::Sql21,
            TrainConfig { n_trees: 25, ..TrainConfig::default() },
        )
        .unwrap();
        let ranked = forest.predict_ranked(&fv(FeatureSchema::Sql21, &[1, 14, 18])).unwrap();
        assert_eq!(ranked.len(), ChartType::ALL.len());
        let sum: f64 = ranked.iter().map(|r| r.score).sum();
        assert!((sum - 1.0).abs() <= 1e-9, "probabilities sum to {sum}");
        for pair in ranked.windows(2) {
            assert!(pair[0].score >= pair[1].score, "ranking must be non-increasing");
        }
        assert_eq!(ranked[0].chart_type, ChartType::VerticalBar);
    }

    #[test]
    fn probability_ties_keep_class_list_order() {
        // One example per class pair, single leaf: both classes score 0.5
        // and the class list decides who ranks first.
        let corpus = vec![
            example(&[13, 18], ChartType::Pie, None),
            example(&[13, 18], ChartType::Scatter, None),
        ];
        let config = TrainConfig {
            n_trees: 1,
            min_samples_leaf: usize::MAX,
            bootstrap: false,
            ..TrainConfig::default()
        };
        let forest = RandomForest::train(&corpus, FeatureSchema::Sql21, config).unwrap();
        let ranked = forest.predict_ranked(&fv(FeatureSchema::Sql21, &[13, 18])).unwrap();
        assert_eq!(ranked[0].chart_type, ChartType::Pie);
        assert_eq!(ranked[1].chart_type, ChartType::Scatter);
        assert_eq!(ranked[0].score, ranked[1].score);
        let pie = ChartType::ALL.iter().position(|c| *c == ChartType::Pie).unwrap();
        let scatter = ChartType::ALL.iter().position(|c| *c == ChartType::Scatter).unwrap();
        assert!(pie < scatter, "tie order must follow the class list");
    }

    #[test]
    fn same_seed_means_identical_models() {
        let corpus = separable_corpus();
        let a = RandomForest::train(&corpus, FeatureSchema::Sql21, TrainConfig::default()).unwrap();
        let b = RandomForest::train(&corpus, FeatureSchema::Sql21, TrainConfig::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());

        let other_seed = TrainConfig { seed: 43, ..TrainConfig::default() };
        let c = RandomForest::train(&corpus, FeatureSchema::Sql21, other_seed).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn model_files_round_trip_and_version_check() {
        let corpus = separable_corpus();
        let config = TrainConfig { n_trees: 5, ..TrainConfig::default() };
        let forest = RandomForest::train(&corpus, FeatureSchema::Sql21, config).unwrap();
        let json = forest.to_json();

        let reloaded = RandomForest::from_json(&json).unwrap();
        assert_eq!(reloaded, forest);
        assert_eq!(reloaded.to_json(), json);

        let vandalized = json.replacen("\"v\":1", "\"v\":99", 1);
        assert_eq!(
            RandomForest::from_json(&vandalized).unwrap_err(),
            ForestError::VersionMismatch { got: 99, expected: MODEL_VERSION }
        );

        let truncated = &json[..json.len() / 2];
        assert!(matches!(
            RandomForest::from_json(truncated),
            Err(ForestError::MalformedModel(_))
        ));
    }

    #[test]
    fn prediction_rejects_the_wrong_schema() {
        let forest = RandomForest::train(
            &separable_corpus(),
            FeatureSchema::Sql21,
            TrainConfig { n_trees: 2, ..TrainConfig::default() },
        )
        .unwrap();
        let err = forest.predict_ranked(&FeatureVector::zeros(FeatureSchema::Cap19)).unwrap_err();
        assert!(matches!(err, ForestError::SchemaMismatch { .. }));
    }

    #[test]
    fn corpus_files_round_trip() {
        let corpus = separable_corpus();
        let text = write_corpus(&corpus);
        let reread = read_corpus(&text).unwrap();
        assert_eq!(reread, corpus);

        let with_blanks = format!("\n{text}\n");
        assert_eq!(read_corpus(&with_blanks).unwrap(), corpus);

        let err = read_corpus("{\"features\":").unwrap_err();
        assert!(matches!(err, ForestError::MalformedCorpus { line: 1, .. }));
    }

    #[test]
    fn more_trees_never_change_the_class_set() {
        let corpus = separable_corpus();
        let probe = fv(FeatureSchema::Sql21, &[0, 15, 18]);
        let mut class_sets = Vec::new();
        for n_trees in [1, 10, 50] {
            let forest = RandomForest::train(
                &corpus,
                FeatureSchema::Sql21,
                TrainConfig { n_trees, ..TrainConfig::default() },
            )
            .unwrap();
            let mut classes: Vec<ChartType> =
                forest.predict_ranked(&probe).unwrap().iter().map(|r| r.chart_type).collect();
            classes.sort_by_key(|c| c.class_index());
            class_sets.push(classes);
        }
        assert_eq!(class_sets[0], class_sets[1]);
        assert_eq!(class_sets[1], class_sets[2]);
    }
}
