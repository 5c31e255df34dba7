use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::atomic::AtomicOp;
use crate::optree::{OpNode, OperatorTree};
use crate::{Error, Result};

/// A tree flattened in post-order, as Zhang and Shasha index it.
struct Postorder {
    labels: Vec<AtomicOp>,
    /// Post-order index of each node's leftmost leaf descendant.
    leftmost: Vec<usize>,
    keyroots: Vec<usize>,
}

impl Postorder {
    fn new(tree: &OperatorTree) -> Self {
        let mut out = Postorder {
            labels: Vec::with_capacity(tree.size()),
            leftmost: Vec::with_capacity(tree.size()),
            keyroots: Vec::new(),
        };
        out.visit(tree.root());
        // A keyroot is the highest node with a given leftmost leaf.
        let n = out.labels.len();
        let mut seen = vec![false; n];
        for i in (0..n).rev() {
            if !seen[out.leftmost[i]] {
                seen[out.leftmost[i]] = true;
                out.keyroots.push(i);
            }
        }
        out.keyroots.sort_unstable();
        out
    }

    fn visit(&mut self, node: &OpNode) -> usize {
        let mut first = None;
        for child in node.children() {
            let l = self.visit(child);
            first.get_or_insert(l);
        }
        let index = self.labels.len();
        self.labels.push(node.op);
        self.leftmost.push(first.unwrap_or(index));
        self.leftmost[index]
    }
}

/// Ordered tree edit distance with unit insert, delete and relabel costs.
/// Labels are operator ids, so the two null leaves differ.
pub fn tree_edit_distance(t1: &OperatorTree, t2: &OperatorTree) -> usize {
    let a = Postorder::new(t1);
    let b = Postorder::new(t2);
    let (n, m) = (a.labels.len(), b.labels.len());
    let mut td = vec![vec![0usize; m]; n];
    let mut fd = vec![vec![0usize; m + 1]; n + 1];
    for &i in &a.keyroots {
        for &j in &b.keyroots {
            let (li, lj) = (a.leftmost[i], b.leftmost[j]);
            // fd[x][y] is the forest distance between a[li..li+x) and b[lj..lj+y).
            let (rows, cols) = (i - li + 1, j - lj + 1);
            fd[0][0] = 0;
            for x in 1..=rows {
                fd[x][0] = x;
            }
            for y in 1..=cols {
                fd[0][y] = y;
            }
            for x in 1..=rows {
                let p = li + x - 1;
                for y in 1..=cols {
                    let q = lj + y - 1;
                    let del = fd[x - 1][y] + 1;
                    let ins = fd[x][y - 1] + 1;
                    if a.leftmost[p] == li && b.leftmost[q] == lj {
                        let relabel = fd[x - 1][y - 1] + usize::from(a.labels[p] != b.labels[q]);
                        fd[x][y] = del.min(ins).min(relabel);
                        td[p][q] = fd[x][y];
                    } else {
                        let px = a.leftmost[p] - li;
                        let qy = b.leftmost[q] - lj;
                        fd[x][y] = del.min(ins).min(fd[px][qy] + td[p][q]);
                    }
                }
            }
        }
    }
    td[n - 1][m - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Normalization {
    /// Raw edit counts.
    None,
    /// Divide by the summed sizes of the two trees; values lie in `[0, 1]`.
    #[default]
    SizeSum,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::None => "none",
            Normalization::SizeSum => "size_sum",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "none" => Ok(Normalization::None),
            "size_sum" => Ok(Normalization::SizeSum),
            other => Err(Error::InvalidConfig(format!("unknown normalization `{other}`"))),
        }
    }
}

/// Symmetric matrix with zero diagonal, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Build from a full row-major square. Symmetry, a zero diagonal and
    /// nonnegative finite entries are checked.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidConfig("distance matrix is not square".into()));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::InvalidConfig(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !(v >= 0.0) || !v.is_finite() || v != rows[j][i] {
                    return Err(Error::InvalidConfig(format!("bad entry at ({i}, {j})")));
                }
            }
        }
        Ok(Self {
            n,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n + j] = v;
        self.values[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Mean over the off-diagonal pairs; zero for fewer than two points.
    pub fn mean_off_diagonal(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                sum += self.get(i, j);
            }
        }
        sum / (self.n * (self.n - 1) / 2) as f64
    }

    /// The matrix as a square CSV block, one row per line, no header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub fn pairwise_distances(trees: &[OperatorTree], normalization: Normalization) -> Result<DistanceMatrix> {
    if trees.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "pairwise distances need at least 2 trees, got {}",
            trees.len()
        )));
    }
    let mut m = DistanceMatrix::zeros(trees.len());
    for i in 0..trees.len() {
        for j in i + 1..trees.len() {
            let d = tree_edit_distance(&trees[i], &trees[j]) as f64;
            let d = match normalization {
                Normalization::None => d,
                Normalization::SizeSum => d / (trees[i].size() + trees[j].size()) as f64,
            };
            m.set(i, j, d);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> OperatorTree {
        s.parse().unwrap()
    }

    #[test]
    fn identity_and_relabel() {
        assert_eq!(tree_edit_distance(&t("(0)"), &t("(0)")), 0);
        assert_eq!(tree_edit_distance(&t("(0)"), &t("(1)")), 1);
        let fig = t("(6 (5 (0) (1)) (2 (1)))");
        assert_eq!(tree_edit_distance(&fig, &fig), 0);
    }

    #[test]
    fn leaf_to_cherry_is_two_insertions() {
        assert_eq!(tree_edit_distance(&t("(0)"), &t("(4 (0) (1))")), 2);
        assert_eq!(tree_edit_distance(&t("(4 (0) (1))"), &t("(0)")), 2);
    }

    #[test]
    fn order_matters() {
        assert_eq!(tree_edit_distance(&t("(4 (0) (1))"), &t("(4 (1) (0))")), 2);
    }

    #[test]
    fn matrix_shape() {
        let trees = vec![t("(0)"), t("(1)"), t("(4 (0) (1))")];
        let m = pairwise_distances(&trees, Normalization::SizeSum).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(2, 0), 0.5);
        assert_eq!(m.get(1, 1), 0.0);
        assert!(pairwise_distances(&trees[..1], Normalization::None).is_err());
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }
}
