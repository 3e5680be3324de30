//! Single-elimination tournaments over the classes (filter trees).

use serde::{Deserialize, Serialize};

use super::{train_or_constant, MulticlassModel, TrainOptions, TrainSet};
use crate::dataset::{ClassWeights, CostVector, Label};
use crate::error::Result;
use crate::learner::{BinaryModel, BinarySpec, Probe, Sign};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeChild {
    Leaf(Label),
    Node(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub left: TreeChild,
    pub right: TreeChild,
    /// Round in which the node is played, from 0.
    pub level: usize,
}

/// Leaves are the classes in label order; adjacent entries are paired level
/// by level and an odd entry out is promoted unchanged (a bye). Nodes are
/// stored bottom-up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentTree {
    classes: usize,
    nodes: Vec<TreeNode>,
    root: TreeChild,
}

impl TournamentTree {
    pub fn new(classes: usize) -> Self {
        assert!(classes >= 1);
        let mut nodes = Vec::new();
        let mut current: Vec<TreeChild> = (0..classes).map(|k| TreeChild::Leaf(Label::from_index(k))).collect();
        let mut level = 0;
        while current.len() > 1 {
            let mut next = Vec::with_capacity(current.len().div_ceil(2));
            for chunk in current.chunks(2) {
                match *chunk {
                    [left, right] => {
                        nodes.push(TreeNode { left, right, level });
                        next.push(TreeChild::Node(nodes.len() - 1));
                    }
                    [bye] => next.push(bye),
                    _ => unreachable!(),
                }
            }
            current = next;
            level += 1;
        }
        TournamentTree {
            classes,
            nodes,
            root: current[0],
        }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> TreeChild {
        self.root
    }

    pub fn depth(&self) -> usize {
        fn depth_of(tree: &TournamentTree, c: TreeChild) -> usize {
            match c {
                TreeChild::Leaf(_) => 0,
                TreeChild::Node(i) => {
                    let n = tree.nodes[i];
                    1 + depth_of(tree, n.left).max(depth_of(tree, n.right))
                }
            }
        }
        depth_of(self, self.root)
    }

    pub fn leaves(&self) -> Vec<Label> {
        fn collect(tree: &TournamentTree, c: TreeChild, out: &mut Vec<Label>) {
            match c {
                TreeChild::Leaf(l) => out.push(l),
                TreeChild::Node(i) => {
                    collect(tree, tree.nodes[i].left, out);
                    collect(tree, tree.nodes[i].right, out);
                }
            }
        }
        let mut out = Vec::new();
        collect(self, self.root, &mut out);
        out
    }

    /// Node indices grouped by level, bottom-up.
    fn levels(&self) -> Vec<Vec<usize>> {
        let mut levels: Vec<Vec<usize>> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if levels.len() <= n.level {
                levels.resize(n.level + 1, Vec::new());
            }
            levels[n.level].push(i);
        }
        levels
    }
}

/// A tournament tree with one binary classifier per internal node; a
/// positive decision advances the right child.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub tree: TournamentTree,
    pub models: Vec<BinaryModel>,
}

impl TreeModel {
    pub fn predict(&self, probe: Probe<'_>) -> Label {
        let mut at = self.tree.root;
        loop {
            match at {
                TreeChild::Leaf(label) => return label,
                TreeChild::Node(i) => {
                    let node = self.tree.nodes[i];
                    at = if self.models[i].expansion.eval(probe) > 0.0 {
                        node.right
                    } else {
                        node.left
                    };
                }
            }
        }
    }
}

/// Cost-sensitive filter tree. Nodes are trained bottom-up; each node sees
/// every row, with the classes `a`, `b` its two subtrees currently predict
/// for that row, sign toward the cheaper one and weight `|c[a] - c[b]|`.
pub fn train_csft(set: &TrainSet<'_>, lambda: f64, options: &TrainOptions) -> Result<MulticlassModel> {
    Ok(train_csft_traced(set, lambda, options)?.0)
}

/// [`train_csft`], also returning the sub-problem built at each node.
pub fn train_csft_traced(
    set: &TrainSet<'_>,
    lambda: f64,
    options: &TrainOptions,
) -> Result<(MulticlassModel, Vec<BinarySpec>)> {
    set.require_classes()?;
    set.require_costs()?;
    let tree = TournamentTree::new(set.classes);
    let n_nodes = tree.nodes.len();
    let mut models: Vec<Option<BinaryModel>> = vec![None; n_nodes];
    let mut specs: Vec<BinarySpec> = vec![BinarySpec::default(); n_nodes];
    // winners[node][pos]: class the subtree at `node` predicts for set.rows[pos]
    let mut winners: Vec<Vec<Label>> = vec![Vec::new(); n_nodes];

    for level in tree.levels() {
        let trained = par::map_slice(options.mode, &level, |&i| {
            let node = tree.nodes[i];
            let side = |c: TreeChild, pos: usize| match c {
                TreeChild::Leaf(l) => l,
                TreeChild::Node(j) => winners[j][pos],
            };
            let mut spec = BinarySpec::default();
            for (pos, &r) in set.rows.iter().enumerate() {
                let (a, b) = (side(node.left, pos), side(node.right, pos));
                let cost: &CostVector = set.cost(r);
                let (ca, cb) = (cost.cost(a), cost.cost(b));
                let weight = (ca - cb).abs();
                if weight == 0.0 {
                    continue;
                }
                spec.push(r, if ca < cb { Sign::Negative } else { Sign::Positive }, weight);
            }
            let model = train_or_constant(set.gram, &spec, lambda, options)?
                .unwrap_or_else(|| BinaryModel::constant(set.gram.kernel(), Sign::Negative));
            let won: Vec<Label> = set
                .rows
                .iter()
                .enumerate()
                .map(|(pos, &r)| {
                    if model.decision_at(set.gram, r) > 0.0 {
                        side(node.right, pos)
                    } else {
                        side(node.left, pos)
                    }
                })
                .collect();
            Ok::<_, crate::error::Error>((spec, model, won))
        });
        for (&i, result) in level.iter().zip(trained) {
            let (spec, model, won) = result?;
            specs[i] = spec;
            models[i] = Some(model);
            winners[i] = won;
        }
    }
    let model = TreeModel {
        tree,
        models: models.into_iter().map(|m| m.expect("every node trained")).collect(),
    };
    Ok((MulticlassModel::Tree(model), specs))
}

/// Filter tree for regular classification: CSFT on 0/1 costs.
pub fn train_ft(set: &TrainSet<'_>, lambda: f64, options: &TrainOptions) -> Result<MulticlassModel> {
    set.require_all_classes()?;
    let costs = regular_costs(set, None);
    let regular = TrainSet { costs: &costs, ..*set };
    train_csft(&regular, lambda, options)
}

/// Filter tree on weighted 0/1 costs `w_y * [y != k]`.
pub fn train_weighted_ft(
    set: &TrainSet<'_>,
    weights: &ClassWeights,
    lambda: f64,
    options: &TrainOptions,
) -> Result<MulticlassModel> {
    set.require_all_classes()?;
    let costs = regular_costs(set, Some(weights));
    let weighted = TrainSet { costs: &costs, ..*set };
    train_csft(&weighted, lambda, options)
}

pub(crate) fn regular_costs(set: &TrainSet<'_>, weights: Option<&ClassWeights>) -> Vec<CostVector> {
    set.labels
        .iter()
        .map(|&y| {
            let w = weights.map_or(1.0, |w| w.get(y));
            let costs = (0..set.classes)
                .map(|k| if k == y.index() { 0.0 } else { w })
                .collect();
            CostVector::new(costs, y).expect("valid weighted regular costs")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::clusters;
    use super::*;
    use crate::dataset::CostMatrix;
    use crate::kernel::Kernel;
    use crate::learner::KernelExpansion;

    #[test]
    fn tree_shapes() {
        for k in 1..=9 {
            let t = TournamentTree::new(k);
            assert_eq!(t.leaves(), (0..k).map(Label::from_index).collect::<Vec<_>>());
            assert_eq!(t.depth(), (k as f64).log2().ceil() as usize);
            assert_eq!(t.nodes().len(), k - 1);
        }
        let three = TournamentTree::new(3);
        let root = match three.root() {
            TreeChild::Node(i) => three.nodes()[i],
            _ => panic!(),
        };
        assert_eq!(root.right, TreeChild::Leaf(Label::from_index(2)));
        assert!(matches!(root.left, TreeChild::Node(_)));
    }

    #[test]
    fn descent_follows_decision_sign() {
        let m = TreeModel {
            tree: TournamentTree::new(2),
            models: vec![BinaryModel {
                expansion: KernelExpansion::constant(Kernel::Perceptron, 1.0),
                stats: Default::default(),
            }],
        };
        assert_eq!(m.predict(Probe::Point(&Default::default())).get(), 2);
    }

    #[test]
    fn binary_csft_weights_class_two_examples_by_u() {
        let u = 7.0;
        let data = clusters(&[3, 4], 0.3, 2)
            .with_matrix(&CostMatrix::new(vec![vec![0.0, 1.0], vec![u, 0.0]]).unwrap());
        let (_, specs) = train_csft_traced(&data.set(), 1.0, &TrainOptions::default()).unwrap();
        assert_eq!(specs.len(), 1);
        for ((&r, s), w) in specs[0].rows.iter().zip(&specs[0].signs).zip(&specs[0].weights) {
            if data.labels[r].index() == 1 {
                assert_eq!((*s, *w), (Sign::Positive, u));
            } else {
                assert_eq!((*s, *w), (Sign::Negative, 1.0));
            }
        }
    }

    #[test]
    fn ft_fits_four_separated_clusters() {
        let data = clusters(&[10, 10, 10, 10], 0.3, 21);
        let model = train_ft(&data.set(), 0.25, &TrainOptions::default()).unwrap();
        for &r in &data.rows {
            assert_eq!(model.predict_row(&data.gram, r), data.labels[r]);
        }
    }

    #[test]
    fn heavy_column_is_avoided() {
        let mut rows = vec![vec![0.0, 1.0, 1.0, 100.0]; 4];
        for (y, row) in rows.iter_mut().enumerate() {
            row[3] = if y == 3 { 0.0 } else { 100.0 };
            row[y] = 0.0;
            for k in 0..3 {
                if k != y {
                    row[k] = 1.0;
                }
            }
        }
        let data = clusters(&[10, 10, 10, 10], 0.3, 5).with_matrix(&CostMatrix::new(rows).unwrap());
        let model = train_csft(&data.set(), 0.25, &TrainOptions::default()).unwrap();
        for &r in data.rows.iter().filter(|&&r| data.labels[r].index() != 3) {
            assert_ne!(model.predict_row(&data.gram, r).get(), 4);
        }
    }
}
