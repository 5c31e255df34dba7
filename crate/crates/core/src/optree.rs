//! Operator trees.
//!
//! An operator is a binary tree of [`AtomicOp`] nodes. Evaluated on two
//! genomes `(a, b)`:
//!
//! - a binary node applies its operator to the results of its left and right
//!   subtrees,
//! - a unary node applies its operator to the result of its single subtree,
//!   which is always stored in the right slot,
//! - a leaf is a null operator and returns `a` or `b`.
//!
//! Every subtree receives the root's original `(a, b)`.
//!
//! Trees serialize to a pre-order text form, `(op child child)`, with leaves
//! written `(0)` or `(1)`.

use std::fmt;
use std::str::FromStr;

use crate::atomic::{ApplyContext, AtomicOp};
use crate::types::{Problem, RealGenome};
use crate::{Error, RandomStream, Result};

/// Default bound on tree size after recombination.
pub const DEFAULT_MAX_NODES: usize = 256;

/// Depth bound of freshly generated trees.
pub const DEFAULT_INIT_DEPTH: usize = 4;

/// Attempts at drawing a size-respecting crossover before giving up.
const RECOMBINE_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpNode {
    pub op: AtomicOp,
    pub left: Option<Box<OpNode>>,
    pub right: Option<Box<OpNode>>,
}

impl OpNode {
    pub fn leaf(op: AtomicOp) -> Self {
        Self {
            op,
            left: None,
            right: None,
        }
    }

    pub fn unary(op: AtomicOp, child: OpNode) -> Self {
        Self {
            op,
            left: None,
            right: Some(Box::new(child)),
        }
    }

    pub fn binary(op: AtomicOp, left: OpNode, right: OpNode) -> Self {
        Self {
            op,
            left: Some(Box::new(left)),
            right: Some(Box::new(right)),
        }
    }

    /// Children in order (left before right), skipping empty slots.
    pub fn children(&self) -> impl Iterator<Item = &OpNode> {
        self.left.iter().chain(self.right.iter()).map(|b| &**b)
    }

    fn size(&self) -> usize {
        1 + self.children().map(OpNode::size).sum::<usize>()
    }

    fn depth(&self) -> usize {
        1 + self.children().map(OpNode::depth).max().unwrap_or(0)
    }

    fn validate(&self) -> Result<()> {
        let ok = match (self.op.child_count(), &self.left, &self.right) {
            (0, None, None) => true,
            (1, None, Some(_)) => true,
            (2, Some(_), Some(_)) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::MalformedTree(format!(
                "node `{}` has an invalid child layout",
                self.op
            )));
        }
        self.children().try_for_each(OpNode::validate)
    }

    fn evaluate(&self, a: &[f64], b: &[f64], ctx: &ApplyContext, rng: &mut RandomStream) -> Vec<f64> {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => {
                let left = l.evaluate(a, b, ctx, rng);
                let right = r.evaluate(a, b, ctx, rng);
                ctx.apply(self.op, left, Some(&right), rng)
            }
            (None, Some(r)) => {
                let inner = r.evaluate(a, b, ctx, rng);
                ctx.apply(self.op, inner, None, rng)
            }
            _ => ctx.apply(self.op, a.to_vec(), Some(b), rng),
        }
    }

    /// Pre-order node at position `*idx`, counting down.
    fn nth(&self, idx: &mut usize) -> Option<&OpNode> {
        if *idx == 0 {
            return Some(self);
        }
        *idx -= 1;
        self.children().find_map(|c| c.nth(idx))
    }

    fn nth_mut(&mut self, idx: &mut usize) -> Option<&mut OpNode> {
        if *idx == 0 {
            return Some(self);
        }
        *idx -= 1;
        if let Some(l) = self.left.as_deref_mut() {
            if let Some(n) = l.nth_mut(idx) {
                return Some(n);
            }
        }
        self.right.as_deref_mut().and_then(|r| r.nth_mut(idx))
    }

    fn preorder<'a>(&'a self, out: &mut Vec<&'a OpNode>) {
        out.push(self);
        for c in self.children() {
            c.preorder(out);
        }
    }

    fn random(depth: usize, max_depth: usize, rng: &mut RandomStream) -> OpNode {
        let op = if depth >= max_depth {
            if rng.coin() {
                AtomicOp::NullFirst
            } else {
                AtomicOp::NullSecond
            }
        } else if depth == 1 {
            AtomicOp::NON_NULL[rng.index(AtomicOp::NON_NULL.len())]
        } else {
            AtomicOp::ALL[rng.index(AtomicOp::ALL.len())]
        };
        match op.child_count() {
            0 => OpNode::leaf(op),
            1 => OpNode::unary(op, OpNode::random(depth + 1, max_depth, rng)),
            _ => {
                let left = OpNode::random(depth + 1, max_depth, rng);
                let right = OpNode::random(depth + 1, max_depth, rng);
                OpNode::binary(op, left, right)
            }
        }
    }

    fn write_sexpr(&self, f: &mut impl fmt::Write) -> fmt::Result {
        write!(f, "({}", self.op.id())?;
        for c in self.children() {
            f.write_char(' ')?;
            c.write_sexpr(f)?;
        }
        f.write_char(')')
    }
}

/// An evolvable operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperatorTree {
    root: OpNode,
}

impl OperatorTree {
    /// Wrap `root`, checking the structural invariants.
    pub fn new(root: OpNode) -> Result<Self> {
        root.validate()?;
        Ok(Self { root })
    }

    pub fn leaf(op: AtomicOp) -> Result<Self> {
        Self::new(OpNode::leaf(op))
    }

    pub fn root(&self) -> &OpNode {
        &self.root
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn validate(&self) -> Result<()> {
        self.root.validate()
    }

    /// Nodes in pre-order; index `i` here is the node index used by
    /// [`random_node`](Self::random_node) and [`subtree`](Self::subtree).
    pub fn nodes(&self) -> Vec<&OpNode> {
        let mut out = Vec::new();
        self.root.preorder(&mut out);
        out
    }

    pub fn node(&self, index: usize) -> Option<&OpNode> {
        let mut i = index;
        self.root.nth(&mut i)
    }

    pub fn subtree(&self, index: usize) -> Option<OperatorTree> {
        self.node(index).map(|n| OperatorTree { root: n.clone() })
    }

    /// Replace the subtree rooted at pre-order `index` with `replacement`.
    pub fn with_subtree(&self, index: usize, replacement: OpNode) -> Result<OperatorTree> {
        let mut out = self.clone();
        let mut i = index;
        let slot = out
            .root
            .nth_mut(&mut i)
            .ok_or_else(|| Error::MalformedTree(format!("no node at index {index}")))?;
        *slot = replacement;
        Ok(out)
    }

    /// Apply the operator to `(a, b)`.
    pub fn evaluate(
        &self,
        a: &RealGenome,
        b: &RealGenome,
        problem: &Problem,
        rng: &mut RandomStream,
    ) -> Result<RealGenome> {
        let dim = problem.dimensionality();
        for g in [a, b] {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: g.len(),
                });
            }
        }
        Ok(RealGenome::new(self.evaluate_unchecked(a, b, &ApplyContext::new(problem), rng)))
    }

    pub(crate) fn evaluate_unchecked(
        &self,
        a: &[f64],
        b: &[f64],
        ctx: &ApplyContext,
        rng: &mut RandomStream,
    ) -> Vec<f64> {
        self.root.evaluate(a, b, ctx, rng)
    }

    /// A random tree of depth at most `max_depth`.
    ///
    /// Grow-style: below the depth bound each node draws its label uniformly
    /// from all eight atomics (the root from the six non-null ones) and gets
    /// as many children as the label's arity, a null label ending the branch.
    /// Nodes at the bound flip a fair coin between the two nulls.
    pub fn random(max_depth: usize, rng: &mut RandomStream) -> Result<OperatorTree> {
        if max_depth == 0 {
            return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
        }
        Ok(OperatorTree {
            root: OpNode::random(1, max_depth, rng),
        })
    }

    /// Pre-order index of a node drawn uniformly, by single-pass reservoir
    /// sampling: the `i`-th visited node replaces the pick with probability
    /// `1/i`.
    pub fn random_node(&self, rng: &mut RandomStream) -> usize {
        let mut chosen = 0;
        let mut stack = vec![&self.root];
        let mut seen = 0usize;
        while let Some(n) = stack.pop() {
            seen += 1;
            if rng.index(seen) == 0 {
                chosen = seen - 1;
            }
            if let Some(r) = n.right.as_deref() {
                stack.push(r);
            }
            if let Some(l) = n.left.as_deref() {
                stack.push(l);
            }
        }
        chosen
    }

    /// Relabel one uniformly chosen node with a different operator of the
    /// same arity. Shape is never changed.
    pub fn mutate(&self, rng: &mut RandomStream) -> OperatorTree {
        let index = self.random_node(rng);
        let mut out = self.clone();
        let mut i = index;
        let node = out.root.nth_mut(&mut i).expect("reservoir index within tree");
        let candidates: Vec<AtomicOp> = node
            .op
            .same_arity_class()
            .iter()
            .copied()
            .filter(|&op| op != node.op)
            .collect();
        node.op = candidates[rng.index(candidates.len())];
        out
    }

    /// Subtree crossover: swap the subtrees rooted at one random node of each
    /// parent. Draws producing a child larger than `max_nodes` are rejected;
    /// after 16 rejections the parents are returned unchanged.
    pub fn recombine(
        p1: &OperatorTree,
        p2: &OperatorTree,
        max_nodes: usize,
        rng: &mut RandomStream,
    ) -> (OperatorTree, OperatorTree) {
        let (n1, n2) = (p1.size(), p2.size());
        for _ in 0..RECOMBINE_ATTEMPTS {
            let i = p1.random_node(rng);
            let j = p2.random_node(rng);
            let s1 = p1.node(i).expect("index within tree");
            let s2 = p2.node(j).expect("index within tree");
            let (k1, k2) = (s1.size(), s2.size());
            if n1 - k1 + k2 > max_nodes || n2 - k2 + k1 > max_nodes {
                continue;
            }
            let c1 = p1.with_subtree(i, s2.clone()).expect("index within tree");
            let c2 = p2.with_subtree(j, s1.clone()).expect("index within tree");
            return (c1, c2);
        }
        (p1.clone(), p2.clone())
    }
}

impl fmt::Display for OperatorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write_sexpr(f)
    }
}

impl FromStr for OperatorTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser { src: s.as_bytes(), pos: 0 };
        let root = parser.node()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(Error::Parse(format!("trailing input at byte {}", parser.pos)));
        }
        OperatorTree::new(root)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected `{}` at byte {}",
                c as char, self.pos
            )))
        }
    }

    fn node(&mut self) -> Result<OpNode> {
        self.expect(b'(')?;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let id: u8 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected operator id at byte {start}")))?;
        let op = AtomicOp::from_id(id)?;
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.src.get(self.pos) {
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(b'(') => children.push(self.node()?),
                _ => return Err(Error::Parse(format!("unexpected input at byte {}", self.pos))),
            }
        }
        if children.len() != op.child_count() {
            return Err(Error::MalformedTree(format!(
                "`{op}` needs {} children, found {}",
                op.child_count(),
                children.len()
            )));
        }
        let mut it = children.into_iter();
        Ok(match op.child_count() {
            0 => OpNode::leaf(op),
            1 => OpNode::unary(op, it.next().unwrap()),
            _ => {
                let l = it.next().unwrap();
                let r = it.next().unwrap();
                OpNode::binary(op, l, r)
            }
        })
    }
}
