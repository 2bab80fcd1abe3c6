//! K-fold cross-validation over a parameter grid.
//!
//! For every fold count the corpus is shuffled once with a seeded RNG and
//! cut into contiguous folds, so fold membership is reproducible and
//! recorded in the report.  Every (fold count × feature budget) cell
//! trains one forest per fold and averages the fold accuracies.
//!
//! Three flavors of second-rank accuracy are reported, because "the
//! runner-up was right" has three defensible readings: the model's second
//! choice equals the runner-up label (strict), the runner-up label
//! appears anywhere in the top two, and the *first* label appears in the
//! top two (lenient).  The strict reading is the headline `rank2`
//! number.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ForestError, LabeledExample, MaxFeatures, RandomForest, TrainConfig};
use crate::types::FeatureSchema;

/// Grid and training parameters for [`cross_validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub k_folds: Vec<usize>,
    pub max_features: Vec<MaxFeatures>,
    pub n_trees: usize,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            k_folds: vec![10, 5, 3],
            max_features: vec![MaxFeatures::Auto],
            n_trees: 100,
            min_samples_leaf: 1,
            seed: 42,
        }
    }
}

/// Accuracies for one grid cell, averaged over its folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCell {
    pub k: usize,
    pub max_features: MaxFeatures,
    /// Fraction of examples whose top prediction was the rank-1 label.
    pub rank1_accuracy: f64,
    /// Fraction whose *second* prediction was the rank-2 label, among
    /// examples that carry one.
    pub rank2_accuracy: f64,
    /// Rank-2 label anywhere in the top two predictions.
    pub rank2_within_top2: f64,
    /// Rank-1 label anywhere in the top two predictions.
    pub label1_within_top2: f64,
}

/// Which fold each example landed in, for one fold count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    /// `folds[i]` is the fold of corpus example `i`.
    pub folds: Vec<usize>,
}

/// Cross-validation results: the full accuracy grid plus everything
/// needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema: FeatureSchema,
    pub corpus_size: usize,
    pub seed: u64,
    pub n_trees: usize,
    pub min_samples_leaf: usize,
    pub fold_assignments: Vec<FoldAssignment>,
    pub cells: Vec<EvalCell>,
}

impl EvalReport {
    pub fn cell(&self, k: usize, max_features: MaxFeatures) -> Option<&EvalCell> {
        self.cells.iter().find(|c| c.k == k && c.max_features == max_features)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The accuracy grid as CSV: one row per feature budget, a rank-1 and
    /// rank-2 column pair per fold count.
    pub fn to_csv(&self) -> String {
        let mut ks: Vec<usize> = Vec::new();
        for cell in &self.cells {
            if !ks.contains(&cell.k) {
                ks.push(cell.k);
            }
        }
        let mut ms: Vec<MaxFeatures> = Vec::new();
        for cell in &self.cells {
            if !ms.contains(&cell.max_features) {
                ms.push(cell.max_features);
            }
        }

        let mut out = String::from("max_features");
        for k in &ks {
            out.push_str(&format!(",{k}_fold_rank1,{k}_fold_rank2"));
        }
        out.push('\n');
        for m in &ms {
            out.push_str(&m.to_string());
            for k in &ks {
                match self.cell(*k, *m) {
                    Some(cell) => out.push_str(&format!(
                        ",{:.4},{:.4}",
                        cell.rank1_accuracy, cell.rank2_accuracy
                    )),
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Mix a cell's coordinates into the base seed so every (k, features,
/// fold) trains with its own deterministic stream family.
fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut x = seed;
    for &part in parts {
        x ^= part.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(x << 6).wrapping_add(x >> 2);
        let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x = z ^ (z >> 31);
    }
    x
}

fn max_features_code(m: MaxFeatures) -> u64 {
    match m {
        MaxFeatures::Auto => 0,
        MaxFeatures::Fixed(k) => 1 + k as u64,
    }
}

/// Seeded shuffle cut into `k` contiguous, near-equal folds; returns the
/// fold index of each corpus example.
fn assign_folds(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    order.shuffle(&mut rng);
    let mut folds = vec![0usize; n];
    for (pos, &example) in order.iter().enumerate() {
        folds[example] = pos * k / n;
    }
    folds
}

struct Tally {
    rank1: (usize, usize),
    rank2: (usize, usize),
    rank2_top2: (usize, usize),
    label1_top2: (usize, usize),
}

/// Run the full grid.  The corpus must fill the largest requested fold
/// count ([`ForestError::CorpusTooSmall`] otherwise).
pub fn cross_validate(
    corpus: &[LabeledExample],
    schema: FeatureSchema,
    cfg: &EvalConfig,
) -> Result<EvalReport, ForestError> {
    if corpus.is_empty() {
        return Err(ForestError::EmptyCorpus);
    }
    let max_k = cfg.k_folds.iter().copied().max().unwrap_or(0);
    if max_k < 2 {
        return Err(ForestError::BadConfig("need at least 2 folds".into()));
    }
    if corpus.len() < max_k {
        return Err(ForestError::CorpusTooSmall { size: corpus.len(), k: max_k });
    }
    super::check_schema(corpus, schema)?;

    let n = corpus.len();
    let fold_assignments: Vec<FoldAssignment> = cfg
        .k_folds
        .iter()
        .map(|&k| FoldAssignment { k, folds: assign_folds(n, k, cfg.seed) })
        .collect();

    let mut cells = Vec::new();
    for &m in &cfg.max_features {
        for assignment in &fold_assignments {
            let k = assignment.k;
            let mut fold_tallies: Vec<Tally> = Vec::with_capacity(k);
            for fold in 0..k {
                let train_set: Vec<LabeledExample> = corpus
                    .iter()
                    .zip(&assignment.folds)
                    .filter(|(_, &f)| f != fold)
                    .map(|(ex, _)| ex.clone())
                    .collect();
                let config = TrainConfig {
                    n_trees: cfg.n_trees,
                    max_features: m,
                    seed: mix_seed(cfg.seed, &[k as u64, max_features_code(m), fold as u64]),
                    min_samples_leaf: cfg.min_samples_leaf,
                    bootstrap: true,
                };
                let forest = RandomForest::train(&train_set, schema, config)?;

                let mut tally = Tally {
                    rank1: (0, 0),
                    rank2: (0, 0),
                    rank2_top2: (0, 0),
                    label1_top2: (0, 0),
                };
                for (ex, &f) in corpus.iter().zip(&assignment.folds) {
                    if f != fold {
                        continue;
                    }
                    let ranked = forest.predict_ranked(&ex.features)?;
                    let top = ranked[0].chart_type;
                    let second = ranked[1].chart_type;

                    tally.rank1.1 += 1;
                    if top == ex.label1 {
                        tally.rank1.0 += 1;
                    }
                    tally.label1_top2.1 += 1;
                    if top == ex.label1 || second == ex.label1 {
                        tally.label1_top2.0 += 1;
                    }
                    if let Some(l2) = ex.label2 {
                        tally.rank2.1 += 1;
                        if second == l2 {
                            tally.rank2.0 += 1;
                        }
                        tally.rank2_top2.1 += 1;
                        if top == l2 || second == l2 {
                            tally.rank2_top2.0 += 1;
                        }
                    }
                }
                fold_tallies.push(tally);
            }

            let mean = |pick: &dyn Fn(&Tally) -> (usize, usize)| -> f64 {
                let rates: Vec<f64> = fold_tallies
                    .iter()
                    .map(pick)
                    .filter(|(_, d)| *d > 0)
                    .map(|(h, d)| h as f64 / d as f64)
                    .collect();
                if rates.is_empty() {
                    0.0
                } else {
                    rates.iter().sum::<f64>() / rates.len() as f64
                }
            };
            cells.push(EvalCell {
                k,
                max_features: m,
                rank1_accuracy: mean(&|t: &Tally| t.rank1),
                rank2_accuracy: mean(&|t: &Tally| t.rank2),
                rank2_within_top2: mean(&|t: &Tally| t.rank2_top2),
                label1_within_top2: mean(&|t: &Tally| t.label1_top2),
            });
        }
    }

    Ok(EvalReport {
        schema,
        corpus_size: n,
        seed: cfg.seed,
        n_trees: cfg.n_trees,
        min_samples_leaf: cfg.min_samples_leaf,
        fold_assignments,
        cells,
    })
}
