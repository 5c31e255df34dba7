//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use aoea_core::atomic::AtomicOp;
use aoea_core::optree::{OpNode, OperatorTree};

/// Every valid operator tree with exactly `n` nodes, built from the arity
/// rules alone.
pub fn trees_of_size(n: usize) -> Vec<OpNode> {
    let mut out = Vec::new();
    if n == 1 {
        out.push(OpNode::leaf(AtomicOp::NullFirst));
        out.push(OpNode::leaf(AtomicOp::NullSecond));
        return out;
    }
    for op in [AtomicOp::SwapGenes, AtomicOp::GaussianNoise] {
        for c in trees_of_size(n - 1) {
            out.push(OpNode::unary(op, c));
        }
    }
    for op in [
        AtomicOp::SinglePointCrossover,
        AtomicOp::UniformCrossover,
        AtomicOp::AverageCrossover,
        AtomicOp::LinearCrossover,
    ] {
        for k in 1..n - 1 {
            for l in trees_of_size(k) {
                for r in trees_of_size(n - 1 - k) {
                    out.push(OpNode::binary(op, l.clone(), r));
                }
            }
        }
    }
    out
}

pub fn trees_up_to(n: usize) -> Vec<OperatorTree> {
    (1..=n)
        .flat_map(trees_of_size)
        .map(|r| OperatorTree::new(r).unwrap())
        .collect()
}

/// Generic ordered labelled tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct G {
    pub label: u8,
    pub children: Vec<G>,
}

pub fn to_generic(node: &OpNode) -> G {
    G {
        label: node.op.id(),
        children: node.children().map(to_generic).collect(),
    }
}

fn forest_size(f: &[G]) -> usize {
    f.iter().map(|t| 1 + forest_size(&t.children)).sum()
}

/// Pre-order labels and parent links.
fn flatten(t: &G) -> (Vec<u8>, Vec<Option<usize>>) {
    fn go(t: &G, parent: Option<usize>, labels: &mut Vec<u8>, parents: &mut Vec<Option<usize>>) {
        let me = labels.len();
        labels.push(t.label);
        parents.push(parent);
        for c in &t.children {
            go(c, Some(me), labels, parents);
        }
    }
    let (mut l, mut p) = (Vec::new(), Vec::new());
    go(t, None, &mut l, &mut p);
    (l, p)
}

fn is_ancestor(parents: &[Option<usize>], a: usize, mut d: usize) -> bool {
    while let Some(p) = parents[d] {
        if p == a {
            return true;
        }
        d = p;
    }
    false
}

/// Minimum cost over all edit mappings (one-to-one, ancestor- and
/// sibling-order preserving) between the two trees, by exhaustive search.
pub fn mapping_distance(t1: &G, t2: &G) -> usize {
    let (l1, p1) = flatten(t1);
    let (l2, p2) = flatten(t2);
    let mut best = l1.len() + l2.len();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; l2.len()];
    search(0, &l1, &p1, &l2, &p2, &mut pairs, &mut used, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn search(
    i: usize,
    l1: &[u8],
    p1: &[Option<usize>],
    l2: &[u8],
    p2: &[Option<usize>],
    pairs: &mut Vec<(usize, usize)>,
    used: &mut [bool],
    best: &mut usize,
) {
    if i == l1.len() {
        let relabels = pairs.iter().filter(|(a, b)| l1[*a] != l2[*b]).count();
        let cost = relabels + (l1.len() - pairs.len()) + (l2.len() - pairs.len());
        *best = (*best).min(cost);
        return;
    }
    search(i + 1, l1, p1, l2, p2, pairs, used, best);
    for j in 0..l2.len() {
        if used[j] {
            continue;
        }
        let consistent = pairs.iter().all(|&(a, b)| {
            // Pre-order position and ancestry must agree.
            (a < i) == (b < j) && is_ancestor(p1, a, i) == is_ancestor(p2, b, j)
        });
        if consistent {
            used[j] = true;
            pairs.push((i, j));
            search(i + 1, l1, p1, l2, p2, pairs, used, best);
            pairs.pop();
            used[j] = false;
        }
    }
}

/// Every forest one insert, delete or relabel away from `f`, restricted to
/// `labels` and at most `max_size` nodes.
fn neighbours(f: &[G], labels: &[u8], max_size: usize, out: &mut Vec<Vec<G>>) {
    let size = forest_size(f);
    // Edits at this level.
    for i in 0..f.len() {
        let mut g = f.to_vec();
        let removed = g.remove(i);
        for (k, c) in removed.children.iter().enumerate() {
            g.insert(i + k, c.clone());
        }
        out.push(g);
        for &l in labels {
            if l != f[i].label {
                let mut g = f.to_vec();
                g[i].label = l;
                out.push(g);
            }
        }
    }
    if size < max_size {
        for s in 0..=f.len() {
            for e in s..=f.len() {
                for &l in labels {
                    let mut g = f[..s].to_vec();
                    g.push(G {
                        label: l,
                        children: f[s..e].to_vec(),
                    });
                    g.extend_from_slice(&f[e..]);
                    out.push(g);
                }
            }
        }
    }
    // Edits inside each subtree.
    for i in 0..f.len() {
        let mut inner = Vec::new();
        neighbours(&f[i].children, labels, max_size - (size - forest_size(&f[i].children)), &mut inner);
        for children in inner {
            let mut g = f.to_vec();
            g[i].children = children;
            out.push(g);
        }
    }
}

/// Shortest unit-cost edit script between two trees by breadth-first search
/// over forests. Labels are limited to those of the two trees and sizes to
/// the larger tree, neither of which can shorten an optimal script.
pub fn edit_script_distance(t1: &G, t2: &G) -> usize {
    let start = vec![t1.clone()];
    let goal = vec![t2.clone()];
    let mut labels: Vec<u8> = flatten(t1).0.into_iter().chain(flatten(t2).0).collect();
    labels.sort_unstable();
    labels.dedup();
    let max_size = forest_size(&start).max(forest_size(&goal));
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((f, d)) = queue.pop_front() {
        if f == goal {
            return d;
        }
        let mut next = Vec::new();
        neighbours(&f, &labels, max_size, &mut next);
        for g in next {
            if seen.insert(g.clone()) {
                queue.push_back((g, d + 1));
            }
        }
    }
    unreachable!("any two trees are connected by edits")
}

/// Exact two-sided signed-rank p-value `min(1, 2·P(T⁺ ≤ w))` by listing all
/// 2ⁿ sign assignments.
pub fn enumerated_p_value(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len();
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let t: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| ranks[k]).sum();
        if t <= w + 1e-9 {
            hits += 1;
        }
    }
    (2.0 * hits as f64 / (1u64 << n) as f64).min(1.0)
}

/// Average ranks of |d| for nonzero `d`, computed by counting.
pub fn naive_ranks(d: &[f64]) -> Vec<f64> {
    let m: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    m.iter()
        .map(|&x| {
            let below = m.iter().filter(|&&y| y < x).count() as f64;
            let equal = m.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}
pub mod props;
