use std::cmp::Ordering;
use std::fmt;

use super::AstError;

/// Deepest tree accepted by the parsers and the builder.
pub const MAX_DEPTH: usize = 10_000;

/// A node label: `Kind` or `Kind:value`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    kind: String,
    value: Option<String>,
}

impl Label {
    /// Label without a value, e.g. `Block`.
    pub fn new(kind: impl Into<String>) -> Result<Self, AstError> {
        let kind = kind.into();
        validate_kind(&kind)?;
        Ok(Label { kind, value: None })
    }

    /// Label with a value, e.g. `SimpleName:foo`. The value is trimmed; internal
    /// whitespace is kept verbatim.
    pub fn with_value(kind: impl Into<String>, value: impl AsRef<str>) -> Result<Self, AstError> {
        let kind = kind.into();
        validate_kind(&kind)?;
        let value = value.as_ref().trim();
        if value.is_empty() {
            return Err(AstError::EmptyLabel { offset: 0 });
        }
        Ok(Label {
            kind,
            value: Some(value.to_string()),
        })
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn value(&self) -> Option<&str> {
        self.value.as_deref()
    }
}

fn validate_kind(kind: &str) -> Result<(), AstError> {
    if kind.is_empty() {
        return Err(AstError::EmptyLabel { offset: 0 });
    }
    if let Some(c) = kind
        .chars()
        .find(|c| matches!(c, '(' | ')' | ':' | '\\') || c.is_whitespace())
    {
        return Err(AstError::InvalidKind {
            kind: kind.to_string(),
            found: c,
        });
    }
    Ok(())
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Some(v) => write!(f, "{}:{}", self.kind, v),
            None => f.write_str(&self.kind),
        }
    }
}

/// Index of a node inside its [`Tree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    label: Label,
    children: Vec<NodeId>,
}

impl Node {
    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Rooted, ordered, labeled tree.
///
/// Nodes are stored in pre-order, so the root is node 0 and every child has a
/// larger index than its parent. All constructors go through [`TreeBuilder`],
/// which keeps that layout; derived equality is therefore structural equality.
/// Trees are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    /// Single-node tree.
    pub fn leaf(label: Label) -> Tree {
        Tree {
            nodes: vec![Node {
                label,
                children: Vec::new(),
            }],
        }
    }

    /// Tree with `label` at the root and `children` as ordered subtrees.
    pub fn node(label: Label, children: Vec<Tree>) -> Result<Tree, AstError> {
        let mut b = TreeBuilder::new();
        b.open(label)?;
        for child in &children {
            b.append_tree(child)?;
        }
        b.close()?;
        b.finish()
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn get(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn label(&self, id: NodeId) -> &Label {
        &self.nodes[id.index()].label
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.index()].children
    }

    /// Nodes in pre-order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut depth = vec![1usize; self.nodes.len()];
        let mut best = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            for c in &node.children {
                depth[c.index()] = depth[i] + 1;
            }
            best = best.max(depth[i]);
        }
        best
    }

    /// Copy of the subtree rooted at `id`.
    pub fn subtree(&self, id: NodeId) -> Tree {
        let mut b = TreeBuilder::new();
        b.append_subtree(self, id)
            .expect("subtree of a valid tree is valid");
        b.finish().expect("subtree is complete")
    }

    /// Total order on tree structure: node count first, then pre-order labels
    /// and arities. Equal iff the trees are structurally equal.
    pub fn structural_cmp(&self, other: &Tree) -> Ordering {
        self.nodes.len().cmp(&other.nodes.len()).then_with(|| {
            for (a, b) in self.nodes.iter().zip(&other.nodes) {
                let ord = a
                    .children
                    .len()
                    .cmp(&b.children.len())
                    .then_with(|| a.label.cmp(&b.label));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    }
}

/// Incremental pre-order tree construction with `open`/`close` pairs.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
    stack: Vec<NodeId>,
    closed_root: bool,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens a node as the next child of the currently open node.
    pub fn open(&mut self, label: Label) -> Result<NodeId, AstError> {
        if self.closed_root {
            return Err(AstError::MultipleRoots);
        }
        if self.stack.len() >= MAX_DEPTH {
            return Err(AstError::TooDeep { limit: MAX_DEPTH });
        }
        let id = NodeId(self.nodes.len() as u32);
        if let Some(parent) = self.stack.last() {
            self.nodes[parent.index()].children.push(id);
        }
        self.nodes.push(Node {
            label,
            children: Vec::new(),
        });
        self.stack.push(id);
        Ok(id)
    }

    pub fn close(&mut self) -> Result<(), AstError> {
        self.stack.pop().ok_or(AstError::UnbalancedClose)?;
        if self.stack.is_empty() {
            self.closed_root = true;
        }
        Ok(())
    }

    /// Convenience for `open` immediately followed by `close`.
    pub fn leaf(&mut self, label: Label) -> Result<NodeId, AstError> {
        let id = self.open(label)?;
        self.close()?;
        Ok(id)
    }

    /// Copies a whole tree in as the next child of the open node.
    pub fn append_tree(&mut self, tree: &Tree) -> Result<(), AstError> {
        self.append_subtree(tree, tree.root())
    }

    fn append_subtree(&mut self, tree: &Tree, id: NodeId) -> Result<(), AstError> {
        // Explicit stack: (node, next child position).
        let mut work: Vec<(NodeId, usize)> = vec![(id, 0)];
        self.open(tree.label(id).clone())?;
        while let Some((node, pos)) = work.last_mut() {
            let children = tree.children(*node);
            if *pos < children.len() {
                let child = children[*pos];
                *pos += 1;
                self.open(tree.label(child).clone())?;
                work.push((child, 0));
            } else {
                self.close()?;
                work.pop();
            }
        }
        Ok(())
    }

    pub fn open_depth(&self) -> usize {
        self.stack.len()
    }

    pub fn finish(self) -> Result<Tree, AstError> {
        if self.nodes.is_empty() {
            return Err(AstError::EmptyTree);
        }
        if !self.stack.is_empty() {
            return Err(AstError::UnclosedNodes {
                open: self.stack.len(),
            });
        }
        Ok(Tree { nodes: self.nodes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(k: &str) -> Label {
        Label::new(k).unwrap()
    }

    #[test]
    fn builder_keeps_preorder_layout() {
        let t = Tree::node(
            l("A"),
            vec![
                Tree::node(l("B"), vec![Tree::leaf(l("D"))]).unwrap(),
                Tree::leaf(l("C")),
            ],
        )
        .unwrap();
        let kinds: Vec<_> = t.nodes().iter().map(|n| n.label().kind()).collect();
        assert_eq!(kinds, ["A", "B", "D", "C"]);
        assert_eq!(t.children(t.root()), &[NodeId(1), NodeId(3)]);
        assert_eq!(t.depth(), 3);
        assert_eq!(t.subtree(NodeId(1)).node_count(), 2);
    }

    #[test]
    fn kind_rejects_separators() {
        assert!(Label::new("A B").is_err());
        assert!(Label::new("A:B").is_err());
        assert!(Label::new("A(").is_err());
        assert!(Label::new("").is_err());
        assert!(Label::with_value("A", "   ").is_err());
        assert_eq!(Label::with_value("A", " x y ").unwrap().value(), Some("x y"));
    }

    #[test]
    fn builder_rejects_second_root_and_depth_overflow() {
        let mut b = TreeBuilder::new();
        b.leaf(l("A")).unwrap();
        assert!(matches!(b.open(l("B")), Err(AstError::MultipleRoots)));

        let mut b = TreeBuilder::new();
        for _ in 0..MAX_DEPTH {
            b.open(l("A")).unwrap();
        }
        assert!(matches!(b.open(l("A")), Err(AstError::TooDeep { .. })));
    }

    #[test]
    fn structural_cmp_is_consistent_with_eq() {
        let a = Tree::node(l("A"), vec![Tree::leaf(l("B"))]).unwrap();
        let b = Tree::node(l("A"), vec![Tree::leaf(l("C"))]).unwrap();
        assert_eq!(a.structural_cmp(&a.clone()), Ordering::Equal);
        assert_eq!(a.structural_cmp(&b), Ordering::Less);
        assert_eq!(b.structural_cmp(&a), Ordering::Greater);
    }
}
