//! Hash-consed formula store with per-node satisfaction sets in both models.

use std::collections::HashMap;

use crate::bisim::{ModelPair, Side};
use crate::formula::{Formula, PropId};
use crate::model::WorldId;

use super::CharFormError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    /// The node stored `index`-th in its DAG.
    pub fn from_index(index: usize) -> Self {
        NodeId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Bottom,
    Atom(PropId),
    Neg(NodeId),
    Conj(Vec<NodeId>),
    Disj(Vec<NodeId>),
    Impl(NodeId, NodeId),
}

/// Extensions of one formula in the left and right model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub left: Vec<bool>,
    pub right: Vec<bool>,
}

impl Pattern {
    pub fn side(&self, side: Side) -> &[bool] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

pub struct FormulaDag<'a> {
    pair: ModelPair<'a>,
    nodes: Vec<Node>,
    patterns: Vec<Pattern>,
    lookup: HashMap<Node, NodeId>,
    sizes: Vec<Option<u64>>,
    cap: usize,
}

impl<'a> FormulaDag<'a> {
    pub fn new(pair: ModelPair<'a>, cap: usize) -> Self {
        FormulaDag {
            pair,
            nodes: Vec::new(),
            patterns: Vec::new(),
            lookup: HashMap::new(),
            sizes: Vec::new(),
            cap,
        }
    }

    pub fn pair(&self) -> ModelPair<'a> {
        self.pair
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn pattern(&self, id: NodeId) -> &Pattern {
        &self.patterns[id.0 as usize]
    }

    /// Memoized satisfaction of node `id` at world `w` of the `side` model.
    pub fn holds(&self, id: NodeId, side: Side, w: WorldId) -> bool {
        self.pattern(id).side(side)[w.0]
    }

    /// Satisfaction sets of `node` without storing it. Children must be interned.
    pub fn pattern_of(&self, node: &Node) -> Pattern {
        let ext = |side: Side| -> Vec<bool> {
            let model = self.pair.source(side);
            let child = |id: &NodeId| self.pattern(*id).side(side);
            match node {
                Node::Bottom => vec![false; model.len()],
                Node::Atom(p) => model
                    .worlds()
                    .map(|w| model.holds_atom(p, w).unwrap_or(false))
                    .collect(),
                Node::Neg(inner) => model.negation_extension(child(inner)),
                Node::Conj(items) => model
                    .worlds()
                    .map(|w| items.iter().all(|i| child(i)[w.0]))
                    .collect(),
                Node::Disj(items) => model
                    .worlds()
                    .map(|w| items.iter().any(|i| child(i)[w.0]))
                    .collect(),
                Node::Impl(a, b) => model.implication_extension(child(a), child(b)),
            }
        };
        Pattern {
            left: ext(Side::Left),
            right: ext(Side::Right),
        }
    }

    pub fn intern(&mut self, node: Node) -> Result<NodeId, CharFormError> {
        if let Some(&id) = self.lookup.get(&node) {
            return Ok(id);
        }
        let pattern = self.pattern_of(&node);
        self.intern_with(node, pattern)
    }

    /// Stores `node` with a pattern already computed by [`Self::pattern_of`].
    pub(crate) fn intern_with(
        &mut self,
        node: Node,
        pattern: Pattern,
    ) -> Result<NodeId, CharFormError> {
        if let Some(&id) = self.lookup.get(&node) {
            return Ok(id);
        }
        if self.nodes.len() >= self.cap {
            return Err(CharFormError::BudgetExceeded { cap: self.cap });
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.patterns.push(pattern);
        self.sizes.push(None);
        self.lookup.insert(node, id);
        Ok(id)
    }

    /// Number of nodes in the tree obtained by unsharing `id`, saturating.
    pub fn tree_size(&mut self, id: NodeId) -> u64 {
        if let Some(size) = self.sizes[id.0 as usize] {
            return size;
        }
        let children: Vec<NodeId> = match self.node(id) {
            Node::Bottom | Node::Atom(_) => vec![],
            Node::Neg(a) => vec![*a],
            Node::Conj(items) | Node::Disj(items) => items.clone(),
            Node::Impl(a, b) => vec![*a, *b],
        };
        let size = children
            .into_iter()
            .fold(1u64, |acc, c| acc.saturating_add(self.tree_size(c)));
        self.sizes[id.0 as usize] = Some(size);
        size
    }

    /// Expands `id` into a formula tree of at most `max_size` nodes.
    pub fn materialize(&mut self, id: NodeId, max_size: u64) -> Result<Formula, CharFormError> {
        let size = self.tree_size(id);
        if size > max_size {
            return Err(CharFormError::TooLarge {
                size,
                cap: max_size,
            });
        }
        Ok(self.unshare(id))
    }

    fn unshare(&self, id: NodeId) -> Formula {
        match self.node(id) {
            Node::Bottom => Formula::Bottom,
            Node::Atom(p) => Formula::Atom(p.clone()),
            Node::Neg(a) => self.unshare(*a).neg(),
            Node::Conj(items) => Formula::Conj(items.iter().map(|i| self.unshare(*i)).collect()),
            Node::Disj(items) => Formula::Disj(items.iter().map(|i| self.unshare(*i)).collect()),
            Node::Impl(a, b) => self.unshare(*a).implies(self.unshare(*b)),
        }
    }
}
