//! Decision trees over binary feature vectors.
//!
//! Splits are exhaustive over the candidate features a node is offered:
//! every candidate bit partitions the node's examples into unset/set
//! halves, and the bit with the largest Gini gain wins, ties going to the
//! lowest feature index.  Growth stops at purity, at nodes smaller than
//! the configured minimum, or when no split improves impurity.

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ForestError, LabeledExample};

/// Gini impurity of a class histogram: `1 − Σ pᵢ²`.
///
/// A pure node scores 0, an even two-way split 0.5, and a 3:1 split
/// 0.375.  An empty histogram has no impurity to measure.
pub fn gini(counts: &[u32]) -> Result<f64, ForestError> {
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return Err(ForestError::EmptyNode);
    }
    let t = f64::from(total);
    Ok(1.0 - counts.iter().map(|&c| (f64::from(c) / t).powi(2)).sum::<f64>())
}

/// Gain below this is treated as zero; binary splits either move real
/// mass or they don't, so anything smaller is floating-point dust.
const MIN_GAIN: f64 = 1e-12;

/// One tree node.  `Split` children index into [`DecisionTree::nodes`];
/// examples with the feature bit unset go left, set go right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf { counts: Vec<u32> },
    Split { feature: usize, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// Class histogram of the leaf this feature vector falls into.
    pub fn leaf_counts(&self, bits: &[u8]) -> &[u32] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return counts,
                Node::Split { feature, left, right } => {
                    at = if bits.get(*feature).copied() == Some(1) { *right } else { *left };
                }
            }
        }
    }
}

/// Exhaustive best split of `members` over `candidates` (which must be
/// sorted ascending): the feature with the largest Gini gain, with its
/// gain.  `None` when no candidate separates the examples with positive
/// gain.
pub fn best_split(
    corpus: &[LabeledExample],
    members: &[usize],
    candidates: &[usize],
    n_classes: usize,
) -> Option<(usize, f64)> {
    let mut parent = vec![0u32; n_classes];
    for &i in members {
        parent[corpus[i].label1.class_index()] += 1;
    }
    let parent_gini = gini(&parent).expect("node is non-empty");
    let total = members.len() as f64;

    let mut best: Option<(usize, f64)> = None;
    for &feature in candidates {
        let mut left = vec![0u32; n_classes];
        let mut right = vec![0u32; n_classes];
        for &i in members {
            let side =
                if corpus[i].features.is_set(feature) { &mut right } else { &mut left };
            side[corpus[i].label1.class_index()] += 1;
        }
        let left_total: u32 = left.iter().sum();
        let right_total: u32 = right.iter().sum();
        if left_total == 0 || right_total == 0 {
            continue;
        }
        let weighted = f64::from(left_total) / total * gini(&left).expect("non-empty")
            + f64::from(right_total) / total * gini(&right).expect("non-empty");
        let gain = parent_gini - weighted;
        if gain > MIN_GAIN && best.map(|(_, g)| gain > g).unwrap_or(true) {
            best = Some((feature, gain));
        }
    }
    best
}

pub(super) struct GrowConfig {
    pub schema_len: usize,
    pub n_classes: usize,
    pub max_features: usize,
    pub min_samples_leaf: usize,
}

/// Grow one tree over the given bootstrap members, depth-first.
pub(super) fn grow(
    corpus: &[LabeledExample],
    members: Vec<usize>,
    cfg: &GrowConfig,
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    let mut nodes = Vec::new();
    grow_node(corpus, members, cfg, rng, &mut nodes);
    DecisionTree { nodes }
}

fn leaf_counts_of(corpus: &[LabeledExample], members: &[usize], n_classes: usize) -> Vec<u32> {
    let mut counts = vec![0u32; n_classes];
    for &i in members {
        counts[corpus[i].label1.class_index()] += 1;
    }
    counts
}

fn grow_node(
    corpus: &[LabeledExample],
    members: Vec<usize>,
    cfg: &GrowConfig,
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<Node>,
) -> usize {
    let id = nodes.len();

    let first_class = corpus[members[0]].label1;
    let pure = members.iter().all(|&i| corpus[i].label1 == first_class);
    if pure || members.len() < cfg.min_samples_leaf {
        nodes.push(Node::Leaf { counts: leaf_counts_of(corpus, &members, cfg.n_classes) });
        return id;
    }

    // Each node draws its own feature subset, without replacement, then
    // sorts it so gain ties always resolve to the lowest feature index.
    let mut candidates = index::sample(rng, cfg.schema_len, cfg.max_features).into_vec();
    candidates.sort_unstable();

    let Some((feature, _gain)) = best_split(corpus, &members, &candidates, cfg.n_classes) else {
        nodes.push(Node::Leaf { counts: leaf_counts_of(corpus, &members, cfg.n_classes) });
        return id;
    };

    let (right, left): (Vec<usize>, Vec<usize>) =
        members.into_iter().partition(|&i| corpus[i].features.is_set(feature));

    // Reserve this node's slot, then grow children left-first so node
    // layout (and with it the serialized model) is deterministic.
    nodes.push(Node::Split { feature, left: 0, right: 0 });
    let left_id = grow_node(corpus, left, cfg, rng, nodes);
    let right_id = grow_node(corpus, right, cfg, rng, nodes);
    nodes[id] = Node::Split { feature, left: left_id, right: right_id };
    id
}
