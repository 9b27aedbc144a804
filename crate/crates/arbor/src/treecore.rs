//! Labeled rooted trees and forests.
//!
//! Vertices are identified with indices into a [`LabelTable`], which stores
//! the distinct alphanumeric labels in lexicographic order; that order is
//! the global vertex order used for every canonical rendering and sign
//! convention in the crate.  A [`Forest`] is a parent map over the table
//! (roots have no parent) and a [`RootedTree`] is a forest with exactly one
//! root.
//!
//! The text grammar is
//!
//! ```text
//! tree   := label [ '(' tree (',' tree)* ')' ]
//! forest := tree (';' tree)*
//! label  := [A-Za-z0-9]+
//! ```
//!
//! with optional whitespace between tokens and duplicate labels rejected.
//! Canonical rendering sorts children (and the trees of a forest) by label,
//! so `parse` followed by `render` normalizes any conforming input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Vertex index into a [`LabelTable`].
pub type Vertex = usize;

// ===========================================================================
// Errors
// ===========================================================================

/// Errors from parsing or assembling trees and forests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    /// Unexpected input at a byte offset.
    Syntax { pos: usize, expected: &'static str },
    /// The same label occurred twice.
    DuplicateLabel { label: String },
    /// A label was required but not found in the table.
    UnknownLabel { label: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { pos, expected } => {
                write!(f, "syntax error at byte {pos}: expected {expected}")
            }
            ParseError::DuplicateLabel { label } => write!(f, "duplicate label {label:?}"),
            ParseError::UnknownLabel { label } => write!(f, "unknown label {label:?}"),
        }
    }
}

impl std::error::Error for ParseError {}

// ===========================================================================
// LabelTable
// ===========================================================================

/// The ambient label set, sorted lexicographically.  Index = vertex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LabelTable {
    labels: Vec<String>,
}

impl LabelTable {
    /// Sorts the labels; rejects duplicates.
    pub fn new(mut labels: Vec<String>) -> Result<Self, ParseError> {
        labels.sort();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(ParseError::DuplicateLabel {
                    label: w[0].clone(),
                });
            }
        }
        Ok(LabelTable { labels })
    }

    pub fn from_strs(labels: &[&str]) -> Result<Self, ParseError> {
        LabelTable::new(labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<Vertex> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

// ===========================================================================
// Forest
// ===========================================================================

/// A forest of rooted trees on a label table: `parent[v] == None` exactly
/// when `v` is a root.  Equal label tables and equal parent maps define
/// equal forests.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Forest {
    labels: LabelTable,
    parent: Vec<Option<Vertex>>,
}

impl Forest {
    /// Build from a parent map, validating arity and acyclicity.
    ///
    /// # Panics
    ///
    /// Panics if `parent.len() != labels.len()`, if some parent index is out
    /// of range, or if the parent map has a cycle.
    pub fn new(labels: LabelTable, parent: Vec<Option<Vertex>>) -> Self {
        let n = labels.len();
        assert_eq!(parent.len(), n, "parent map length must match label count");
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                assert!(*p < n, "parent of vertex {v} out of range");
                assert_ne!(*p, v, "vertex {v} is its own parent");
            }
        }
        let f = Forest { labels, parent };
        for v in 0..n {
            let mut steps = 0;
            let mut cur = v;
            while let Some(p) = f.parent[cur] {
                cur = p;
                steps += 1;
                assert!(steps <= n, "parent map has a cycle through vertex {v}");
            }
        }
        f
    }

    /// The forest with no edges (every vertex a root).
    pub fn trivial(labels: LabelTable) -> Self {
        let n = labels.len();
        Forest {
            labels,
            parent: vec![None; n],
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let raw = parse_forest_ast(text)?;
        forest_from_ast(&raw)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    pub fn parent_map(&self) -> &[Option<Vertex>] {
        &self.parent
    }

    pub fn roots(&self) -> Vec<Vertex> {
        (0..self.n()).filter(|&v| self.parent[v].is_none()).collect()
    }

    /// Non-root vertices, ascending.
    pub fn nodes(&self) -> Vec<Vertex> {
        (0..self.n()).filter(|&v| self.parent[v].is_some()).collect()
    }

    pub fn node_set(&self) -> BTreeSet<Vertex> {
        self.nodes().into_iter().collect()
    }

    /// Number of non-root vertices (the degree of the forest).
    pub fn node_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    pub fn children(&self, v: Vertex) -> Vec<Vertex> {
        (0..self.n()).filter(|&c| self.parent[c] == Some(v)).collect()
    }

    /// Edges as `(parent, child)` pairs, sorted by child.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        (0..self.n())
            .filter_map(|c| self.parent[c].map(|p| (p, c)))
            .collect()
    }

    /// Root of the component containing `v`.
    pub fn root_of(&self, v: Vertex) -> Vertex {
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            cur = p;
        }
        cur
    }

    /// Number of edges from `v` up to its root.
    pub fn depth(&self, v: Vertex) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            cur = p;
            d += 1;
        }
        d
    }

    /// The forest order: `i <= j` iff `i` lies on the path from `j` to its
    /// root (reflexively).
    pub fn leq(&self, i: Vertex, j: Vertex) -> bool {
        let mut cur = j;
        loop {
            if cur == i {
                return true;
            }
            match self.parent[cur] {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// The partition of the vertex set into components.
    pub fn partition(&self) -> PartitionOfI {
        let ids: Vec<usize> = (0..self.n()).map(|v| self.root_of(v)).collect();
        PartitionOfI::from_block_ids(&ids)
    }

    /// Containment of forests: `self ⊆ other` iff the partition of `self`
    /// refines the partition of `other` and every block of `self` carries
    /// exactly the order induced by `other` on that block.
    ///
    /// # Panics
    ///
    /// Panics when the two forests live on different label tables.
    pub fn is_subforest(&self, other: &Forest) -> bool {
        assert_eq!(
            self.labels, other.labels,
            "subforest comparison across different label sets"
        );
        let n = self.n();
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                if self.root_of(u) == self.root_of(v) {
                    // same block of self: orders must agree both ways
                    if self.leq(u, v) != other.leq(u, v) {
                        return false;
                    }
                } else if self.leq(u, v) {
                    unreachable!("different components cannot be comparable");
                }
            }
        }
        // refinement of partitions
        for u in 0..n {
            for v in 0..n {
                if self.root_of(u) == self.root_of(v) && other.root_of(u) != other.root_of(v) {
                    return false;
                }
            }
        }
        true
    }

    /// The edge-wise order: `self ⪯ other` iff for every edge `(i, j)` of
    /// `self` (parent `i`, child `j`) we have `i <= j` in `other`.
    ///
    /// # Panics
    ///
    /// Panics when the two forests live on different label tables.
    pub fn precedes(&self, other: &Forest) -> bool {
        assert_eq!(
            self.labels, other.labels,
            "order comparison across different label sets"
        );
        self.edges().iter().all(|&(p, c)| other.leq(p, c))
    }

    /// Rebuild the forest a partition induces: each block must have a unique
    /// minimal element under the order of `self`; inside a block, the parent
    /// of `v` is the maximal element of the block strictly below `v`.
    /// Returns `None` when some block has several minimal elements (the
    /// partition does not come from a subforest).
    pub fn induce_from_partition(&self, part: &PartitionOfI) -> Option<Forest> {
        assert_eq!(part.n(), self.n(), "partition size must match forest size");
        let mut parent = vec![None; self.n()];
        for block in part.blocks() {
            for &v in block {
                // elements of the block strictly below v form a chain in
                // self; the parent is the deepest of them
                let mut best: Option<Vertex> = None;
                for &u in block {
                    if u != v && self.leq(u, v) {
                        best = match best {
                            None => Some(u),
                            Some(b) => Some(if self.leq(b, u) { u } else { b }),
                        };
                    }
                }
                parent[v] = best;
            }
            // unique minimal element = exactly one parentless vertex per block
            let minima = block.iter().filter(|&&v| parent[v].is_none()).count();
            if minima != 1 {
                return None;
            }
        }
        Some(Forest {
            labels: self.labels.clone(),
            parent,
        })
    }

    /// Canonical rendering: trees sorted by root label, children by label.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .roots()
            .iter()
            .map(|&r| self.render_subtree(r))
            .collect();
        parts.sort(); // roots() is ascending already; keep it explicit
        parts.join(";")
    }

    fn render_subtree(&self, v: Vertex) -> String {
        let kids = self.children(v);
        if kids.is_empty() {
            self.labels.label(v).to_string()
        } else {
            let inner: Vec<String> = kids.iter().map(|&c| self.render_subtree(c)).collect();
            format!("{}({})", self.labels.label(v), inner.join(","))
        }
    }
}

// ===========================================================================
// RootedTree
// ===========================================================================

/// A forest with exactly one root.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RootedTree {
    forest: Forest,
}

impl std::ops::Deref for RootedTree {
    type Target = Forest;

    fn deref(&self) -> &Forest {
        &self.forest
    }
}

impl RootedTree {
    /// # Panics
    ///
    /// Panics when the forest does not have exactly one root.
    pub fn new(forest: Forest) -> Self {
        assert_eq!(
            forest.roots().len(),
            1,
            "a rooted tree has exactly one root"
        );
        RootedTree { forest }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let ast = parse_forest_ast(text)?;
        if ast.len() != 1 {
            return Err(ParseError::Syntax {
                pos: 0,
                expected: "a single tree, not a forest",
            });
        }
        Ok(RootedTree::new(forest_from_ast(&ast)?))
    }

    pub fn as_forest(&self) -> &Forest {
        &self.forest
    }

    pub fn into_forest(self) -> Forest {
        self.forest
    }

    pub fn root(&self) -> Vertex {
        self.forest.roots()[0]
    }

    /// Attach a fresh root above the current one.  The new label must not
    /// already occur.
    pub fn graft_root(&self, label: &str) -> Result<RootedTree, ParseError> {
        if self.labels().index_of(label).is_some() {
            return Err(ParseError::DuplicateLabel {
                label: label.to_string(),
            });
        }
        let mut labels: Vec<String> = self.labels().iter().map(str::to_string).collect();
        labels.push(label.to_string());
        let table = LabelTable::new(labels)?;
        // indices shift: old vertex v maps to table.index_of(old label)
        let map: Vec<Vertex> = (0..self.n())
            .map(|v| table.index_of(self.labels().label(v)).expect("label kept"))
            .collect();
        let new_root = table.index_of(label).expect("label inserted");
        let mut parent = vec![None; table.len()];
        for v in 0..self.n() {
            parent[map[v]] = match self.parent(v) {
                Some(p) => Some(map[p]),
                None => Some(new_root),
            };
        }
        Ok(RootedTree::new(Forest::new(table, parent)))
    }

    /// Split at the root: one tree per root child, each consisting of the
    /// root together with that child's subtree, on its own label table.
    /// Rejects the single-vertex tree, which has no such decomposition.
    pub fn root_decompose(&self) -> Result<Vec<RootedTree>, ParseError> {
        let root = self.root();
        let kids = self.children(root);
        if kids.is_empty() {
            return Err(ParseError::Syntax {
                pos: 0,
                expected: "a tree with at least two vertices",
            });
        }
        let mut out = Vec::with_capacity(kids.len());
        for &c in &kids {
            let mut verts: Vec<Vertex> = (0..self.n()).filter(|&v| self.leq(c, v)).collect();
            verts.push(root);
            verts.sort_unstable();
            let labels = LabelTable::new(
                verts
                    .iter()
                    .map(|&v| self.labels().label(v).to_string())
                    .collect(),
            )?;
            let mut parent = vec![None; labels.len()];
            for &v in &verts {
                if v == root {
                    continue;
                }
                let p = if v == c { root } else { self.parent(v).expect("non-root") };
                let vi = labels.index_of(self.labels().label(v)).expect("kept");
                let pi = labels.index_of(self.labels().label(p)).expect("kept");
                parent[vi] = Some(pi);
            }
            out.push(RootedTree::new(Forest::new(labels, parent)));
        }
        Ok(out)
    }

    /// Remove a root of valence one; its only child becomes the root.  The
    /// inverse of [`RootedTree::graft_root`].  `None` for the single-vertex
    /// tree or when the root has several children.
    pub fn peel_root(&self) -> Option<RootedTree> {
        let root = self.root();
        let kids = self.children(root);
        if kids.len() != 1 {
            return None;
        }
        let keep: Vec<Vertex> = (0..self.n()).filter(|&v| v != root).collect();
        let labels = LabelTable::new(
            keep.iter()
                .map(|&v| self.labels().label(v).to_string())
                .collect(),
        )
        .expect("labels stay distinct");
        let mut parent = vec![None; labels.len()];
        for &v in &keep {
            if let Some(p) = self.parent(v) {
                if p != root {
                    let vi = labels.index_of(self.labels().label(v)).expect("kept");
                    let pi = labels.index_of(self.labels().label(p)).expect("kept");
                    parent[vi] = Some(pi);
                }
            }
        }
        Some(RootedTree::new(Forest::new(labels, parent)))
    }

    /// The comparability graph: vertices of the tree, an edge for every
    /// strictly comparable pair.
    pub fn comparability_graph(&self) -> SimpleGraph {
        let n = self.n();
        let mut g = SimpleGraph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if self.leq(i, j) || self.leq(j, i) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

// ===========================================================================
// PartitionOfI
// ===========================================================================

/// A set partition of the vertex set `{0, .., n-1}`.  Blocks are sorted
/// internally and by minimum, so equal partitions compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PartitionOfI {
    blocks: Vec<Vec<Vertex>>,
}

impl PartitionOfI {
    /// From a vector assigning each vertex a block id (ids arbitrary).
    pub fn from_block_ids(ids: &[usize]) -> Self {
        let mut by_id: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        for (v, &id) in ids.iter().enumerate() {
            by_id.entry(id).or_default().push(v);
        }
        let mut blocks: Vec<Vec<Vertex>> = by_id.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        PartitionOfI { blocks }
    }

    pub fn singletons(n: usize) -> Self {
        PartitionOfI {
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn blocks(&self) -> &[Vec<Vertex>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block ids as a vector indexed by vertex.
    pub fn block_id_vec(&self) -> Vec<usize> {
        let mut ids = vec![0; self.n()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &v in block {
                ids[v] = b;
            }
        }
        ids
    }

    pub fn block_containing(&self, v: Vertex) -> &[Vertex] {
        &self.blocks[self.block_id_vec()[v]]
    }

    /// True when every block of `self` is contained in a block of `other`.
    pub fn refines(&self, other: &PartitionOfI) -> bool {
        assert_eq!(self.n(), other.n(), "partitions of different ground sets");
        let oid = other.block_id_vec();
        self.blocks
            .iter()
            .all(|block| block.iter().all(|&v| oid[v] == oid[block[0]]))
    }

    /// Join in the partition lattice: finest partition coarser than both.
    pub fn join(&self, other: &PartitionOfI) -> PartitionOfI {
        assert_eq!(self.n(), other.n(), "partitions of different ground sets");
        let n = self.n();
        let mut uf = UnionFind::new(n);
        for block in self.blocks.iter().chain(other.blocks.iter()) {
            for w in block.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let ids: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
        PartitionOfI::from_block_ids(&ids)
    }
}

/// Minimal union-find for partition joins and flat closures.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            let r = self.find(self.parent[v]);
            self.parent[v] = r;
        }
        self.parent[v]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

// ===========================================================================
// SimpleGraph
// ===========================================================================

/// Small undirected simple graph on at most 64 vertices, adjacency as
/// bitmasks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= 64, "graph too large for bitmask adjacency");
        SimpleGraph {
            n,
            adj: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "bad edge");
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbors_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }
}

/// Check that eliminating the vertices of the comparability graph in
/// reverse of `order` always removes a simplicial vertex (its not yet
/// eliminated neighbors form a clique).  In other words, `order` is a
/// perfect elimination ordering read back to front.
///
/// # Panics
///
/// Panics if `order` is not a permutation of the vertices.
pub fn check_chordal_peo(t: &RootedTree, order: &[Vertex]) -> bool {
    let n = t.n();
    assert_eq!(order.len(), n, "order must list every vertex once");
    let mut seen = vec![false; n];
    for &v in order {
        assert!(v < n && !seen[v], "order must be a permutation");
        seen[v] = true;
    }
    let g = t.comparability_graph();
    let mut present: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    for k in (0..n).rev() {
        let v = order[k];
        present &= !(1 << v);
        let mut nb = g.neighbors_mask(v) & present;
        // every pair of remaining neighbors must be adjacent
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if g.neighbors_mask(u) & nb != nb {
                return false;
            }
        }
    }
    true
}

/// All linear extensions of the tree order, each listing ancestors before
/// descendants, generated in lexicographic order.
pub fn linear_extensions(t: &RootedTree) -> Vec<Vec<Vertex>> {
    let n = t.n();
    let mut out = Vec::new();
    let mut placed = vec![false; n];
    let mut acc = Vec::with_capacity(n);
    fn rec(
        t: &RootedTree,
        placed: &mut Vec<bool>,
        acc: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let n = t.n();
        if acc.len() == n {
            out.push(acc.clone());
            return;
        }
        for v in 0..n {
            if placed[v] {
                continue;
            }
            let ready = match t.parent(v) {
                None => true,
                Some(p) => placed[p],
            };
            if ready {
                placed[v] = true;
                acc.push(v);
                rec(t, placed, acc, out);
                acc.pop();
                placed[v] = false;
            }
        }
    }
    rec(t, &mut placed, &mut acc, &mut out);
    out
}

/// The lexicographically smallest linear extension (greedy).
pub fn lex_min_linear_extension(t: &RootedTree) -> Vec<Vertex> {
    let n = t.n();
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = (0..n)
            .find(|&v| {
                !placed[v]
                    && match t.parent(v) {
                        None => true,
                        Some(p) => placed[p],
                    }
            })
            .expect("a tree order always has an available vertex");
        placed[v] = true;
        out.push(v);
    }
    out
}

// ===========================================================================
// Parsing
// ===========================================================================

struct AstNode {
    label: String,
    children: Vec<AstNode>,
}

fn parse_forest_ast(text: &str) -> Result<Vec<AstNode>, ParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut trees = Vec::new();
    loop {
        let node = parse_tree_node(bytes, &mut pos)?;
        trees.push(node);
        skip_ws(bytes, &mut pos);
        if pos < bytes.len() && bytes[pos] == b';' {
            pos += 1;
            continue;
        }
        break;
    }
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(ParseError::Syntax {
            pos,
            expected: "end of input, ';', ',', '(' or ')'",
        });
    }
    Ok(trees)
}

fn parse_tree_node(bytes: &[u8], pos: &mut usize) -> Result<AstNode, ParseError> {
    skip_ws(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_alphanumeric() {
        *pos += 1;
    }
    if *pos == start {
        return Err(ParseError::Syntax {
            pos: start,
            expected: "an alphanumeric label",
        });
    }
    let label = std::str::from_utf8(&bytes[start..*pos])
        .expect("alphanumeric bytes are valid UTF-8")
        .to_string();
    let mut children = Vec::new();
    skip_ws(bytes, pos);
    if *pos < bytes.len() && bytes[*pos] == b'(' {
        *pos += 1;
        loop {
            children.push(parse_tree_node(bytes, pos)?);
            skip_ws(bytes, pos);
            if *pos < bytes.len() && bytes[*pos] == b',' {
                *pos += 1;
                continue;
            }
            break;
        }
        if *pos >= bytes.len() || bytes[*pos] != b')' {
            return Err(ParseError::Syntax {
                pos: *pos,
                expected: "',' or ')'",
            });
        }
        *pos += 1;
    }
    Ok(AstNode { label, children })
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn collect_labels(node: &AstNode, out: &mut Vec<String>) {
    out.push(node.label.clone());
    for c in &node.children {
        collect_labels(c, out);
    }
}

fn forest_from_ast(trees: &[AstNode]) -> Result<Forest, ParseError> {
    let mut labels = Vec::new();
    for t in trees {
        collect_labels(t, &mut labels);
    }
    {
        let mut sorted = labels.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(ParseError::DuplicateLabel {
                    label: w[0].clone(),
                });
            }
        }
    }
    let table = LabelTable::new(labels)?;
    let mut parent = vec![None; table.len()];
    fn wire(
        node: &AstNode,
        parent_of: Option<Vertex>,
        table: &LabelTable,
        parent: &mut [Option<Vertex>],
    ) {
        let v = table.index_of(&node.label).expect("label collected");
        parent[v] = parent_of;
        for c in &node.children {
            wire(c, Some(v), table, parent);
        }
    }
    for t in trees {
        wire(t, None, &table, &mut parent);
    }
    Ok(Forest::new(table, parent))
}

// ===========================================================================
// Enumeration
// ===========================================================================

/// `n^(n-1)`, the number of labeled rooted trees on `n` vertices.
pub fn tree_count(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    (n as u64).pow(n as u32 - 1)
}

/// `(n+1)^(n-1)`, the number of rooted forests on `n` vertices.
pub fn forest_count(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    (n as u64 + 1).pow(n as u32 - 1)
}

/// Stream every labeled rooted tree on the given labels exactly once.
///
/// Unrooted trees are decoded from Prufer sequences; every choice of root of
/// every unrooted tree gives a distinct rooted tree, `n^(n-1)` in total.
/// Intended for `n <= 7`.
pub fn enumerate_trees(labels: &LabelTable) -> impl Iterator<Item = RootedTree> {
    let table = labels.clone();
    let n = table.len();
    assert!(n >= 1, "enumeration needs at least one label");
    let per_root = if n >= 2 { (n as u64).pow(n as u32 - 2) } else { 1 };
    (0..tree_count(n)).map(move |idx| {
        let root = (idx / per_root) as usize;
        let seq = digits(idx % per_root, n as u64, n.saturating_sub(2));
        let edges = prufer_decode(&seq, n);
        let parent = orient_from_root(&edges, n, root);
        RootedTree::new(Forest::new(table.clone(), parent))
    })
}

/// Stream every rooted forest on the given labels exactly once.
///
/// A forest on `n` labels is a tree on `n + 1` vertices rooted at an
/// auxiliary extra vertex whose children are the forest roots; Prufer
/// decoding of the `(n+1)^(n-1)` sequences with the root pinned to the
/// auxiliary vertex yields each forest exactly once.  Intended for `n <= 6`.
pub fn enumerate_forests(labels: &LabelTable) -> impl Iterator<Item = Forest> {
    let table = labels.clone();
    let n = table.len();
    assert!(n >= 1, "enumeration needs at least one label");
    let m = n + 1; // auxiliary root vertex has index n
    (0..forest_count(n)).map(move |idx| {
        let seq = digits(idx, m as u64, m - 2);
        let edges = prufer_decode(&seq, m);
        let parent_ext = orient_from_root(&edges, m, n);
        let parent: Vec<Option<Vertex>> = (0..n)
            .map(|v| match parent_ext[v] {
                Some(p) if p == n => None,
                other => other,
            })
            .collect();
        Forest::new(table.clone(), parent)
    })
}

/// A label table `a, b, c, ...` of size `n` (single letters, so `n <= 26`).
pub fn alphabet_labels(n: usize) -> LabelTable {
    assert!((1..=26).contains(&n), "alphabet labels support 1..=26 vertices");
    LabelTable::new(
        (0..n)
            .map(|k| char::from(b'a' + k as u8).to_string())
            .collect(),
    )
    .expect("letters are distinct")
}

fn digits(mut idx: u64, base: u64, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % base) as usize;
        idx /= base;
    }
    out
}

/// Decode a Prufer sequence over `0..n` (length `n - 2`) into the edge list
/// of the unrooted labeled tree it encodes.
fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    assert!(n >= 1);
    if n == 1 {
        return Vec::new();
    }
    assert_eq!(seq.len(), n - 2, "Prufer sequence has length n - 2");
    let mut degree = vec![1u32; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut used = vec![false; n];
    for &s in seq {
        let leaf = (0..n)
            .find(|&v| !used[v] && degree[v] == 1)
            .expect("a leaf always exists");
        edges.push((leaf, s));
        used[leaf] = true;
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut last = (0..n).filter(|&v| !used[v] && degree[v] == 1);
    let a = last.next().expect("two vertices remain");
    let b = last.next().expect("two vertices remain");
    edges.push((a, b));
    edges
}

fn orient_from_root(edges: &[(usize, usize)], n: usize, root: usize) -> Vec<Option<Vertex>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parent = vec![None; n];
    let mut visited = vec![false; n];
    let mut stack = vec![root];
    visited[root] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                parent[w] = Some(v);
                stack.push(w);
            }
        }
    }
    parent
}

/// All set partitions of `{0, .., n-1}` as block-id vectors in restricted
/// growth form, lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<Vec<usize>> {
    assert!(n >= 1, "partitions need a nonempty ground set");
    let mut out = Vec::new();
    let mut ids = vec![0usize; n];
    fn rec(ids: &mut Vec<usize>, k: usize, maxid: usize, out: &mut Vec<Vec<usize>>) {
        if k == ids.len() {
            out.push(ids.clone());
            return;
        }
        for id in 0..=maxid + 1 {
            ids[k] = id;
            rec(ids, k + 1, maxid.max(id), out);
        }
    }
    rec(&mut ids, 1, 0, &mut out);
    out
}

// ===========================================================================
// Tests
// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str) -> RootedTree {
        RootedTree::parse(s).expect("test tree parses")
    }

    fn forest(s: &str) -> Forest {
        Forest::parse(s).expect("test forest parses")
    }

    #[test]
    fn parse_and_render_round_trip() {
        assert_eq!(tree("a(b(c))").render(), "a(b(c))");
        assert_eq!(tree("a(c,b)").render(), "a(b,c)");
        assert_eq!(forest("b;a(c)").render(), "a(c);b");
        assert_eq!(tree("  a ( b , c ) ").render(), "a(b,c)");
        assert_eq!(tree("x1(x10,x2)").render(), "x1(x10,x2)");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            RootedTree::parse("a(b"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            RootedTree::parse("a(b,)"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            RootedTree::parse(""),
            Err(ParseError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            RootedTree::parse("a)b"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            RootedTree::parse("a(b);c"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            Forest::parse("a(b,b)"),
            Err(ParseError::DuplicateLabel { .. })
        ));
        assert!(matches!(
            Forest::parse("a-b"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn depth_and_leq_on_chain() {
        let t = tree("a(b(c))");
        let a = t.labels().index_of("a").unwrap();
        let b = t.labels().index_of("b").unwrap();
        let c = t.labels().index_of("c").unwrap();
        assert_eq!(t.depth(a), 0);
        assert_eq!(t.depth(b), 1);
        assert_eq!(t.depth(c), 2);
        assert!(t.leq(a, c) && t.leq(a, a) && t.leq(b, c));
        assert!(!t.leq(c, a));
    }

    #[test]
    fn leq_across_components_is_false() {
        let f = forest("a;b");
        let a = f.labels().index_of("a").unwrap();
        let b = f.labels().index_of("b").unwrap();
        assert!(!f.leq(a, b));
        assert!(!f.leq(b, a));
    }

    #[test]
    fn subforest_examples_on_the_chain() {
        let t = tree("a(b(c))");
        let big = t.as_forest();
        assert!(forest("a(b);c").is_subforest(big));
        // {a,c} inherits a < c from the chain, so this is a subforest too
        assert!(forest("a(c);b").is_subforest(big));
        assert!(forest("b(c);a").is_subforest(big));
        assert!(forest("a;b;c").is_subforest(big));
        // wrong induced order inside the block {b, c}
        assert!(!forest("c(b);a").is_subforest(big));
        // {a, b, c} with parent map b(a), c loose: order disagrees
        assert!(!forest("b(a);c").is_subforest(big));
    }

    #[test]
    fn subforest_requires_refinement() {
        let t = tree("a(b,c)");
        assert!(!t.as_forest().is_subforest(&forest("a(b);c")));
        assert!(forest("a(b);c").is_subforest(t.as_forest()));
        // {b, c} has two minimal elements in a(b,c): cannot be one block of
        // a subforest, and b(c) gets the order wrong anyway
        assert!(!forest("b(c);a").is_subforest(t.as_forest()));
    }

    #[test]
    fn subforest_brute_force_is_a_partial_order() {
        let labels = alphabet_labels(3);
        let all: Vec<Forest> = enumerate_forests(&labels).collect();
        assert_eq!(all.len(), 16);
        // reflexive, antisymmetric, transitive
        let leq: Vec<Vec<bool>> = all
            .iter()
            .map(|f| all.iter().map(|g| f.is_subforest(g)).collect())
            .collect();
        for (i, _) in all.iter().enumerate() {
            assert!(leq[i][i]);
            for j in 0..all.len() {
                if i != j && leq[i][j] {
                    assert!(!leq[j][i], "antisymmetry");
                }
                for k in 0..all.len() {
                    if leq[i][j] && leq[j][k] {
                        assert!(leq[i][k], "transitivity");
                    }
                }
            }
        }
    }

    #[test]
    fn precedes_examples() {
        let star = forest("a(b,c)");
        let chain = forest("a(b(c))");
        let chain2 = forest("a(c(b))");
        assert!(star.precedes(&chain));
        assert!(star.precedes(&chain2));
        assert!(!chain.precedes(&star));
        assert!(star.precedes(&star));
        let single = forest("a(b);c");
        assert!(single.precedes(&star));
        assert!(single.precedes(&chain));
    }

    #[test]
    fn precedes_is_coarser_than_subforest() {
        // every subforest relation is also an edge-wise relation
        let labels = alphabet_labels(3);
        let all: Vec<Forest> = enumerate_forests(&labels).collect();
        for f in &all {
            for g in &all {
                if f.is_subforest(g) {
                    assert!(f.precedes(g));
                }
            }
        }
    }

    #[test]
    fn graft_and_peel_are_inverse() {
        let t = tree("b(c)");
        let grafted = t.graft_root("a").unwrap();
        assert_eq!(grafted.render(), "a(b(c))");
        assert_eq!(grafted.peel_root().unwrap().render(), "b(c)");
        assert!(tree("a(b,c)").peel_root().is_none());
        assert!(tree("a").peel_root().is_none());
        assert!(matches!(
            t.graft_root("c"),
            Err(ParseError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn root_decompose_splits_at_the_root() {
        let t = tree("a(b(d),c)");
        let parts = t.root_decompose().unwrap();
        let rendered: Vec<String> = parts.iter().map(|p| p.render()).collect();
        assert_eq!(rendered, vec!["a(b(d))", "a(c)"]);
        assert!(tree("a").root_decompose().is_err());
        let chain = tree("a(b(c))");
        assert_eq!(chain.root_decompose().unwrap()[0].render(), "a(b(c))");
    }

    #[test]
    fn partitions_and_join() {
        let f = forest("a(b);c");
        let p = f.partition();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);
        let q = forest("b(c);a").partition();
        let join = p.join(&q);
        assert_eq!(join.num_blocks(), 1);
        assert!(p.refines(&join));
        assert!(q.refines(&join));
        assert!(PartitionOfI::singletons(3).refines(&p));
        assert!(!p.refines(&q));
    }

    #[test]
    fn induce_from_partition_needs_unique_minimum() {
        let t = tree("a(b,c)");
        let ab = PartitionOfI::from_block_ids(&[0, 0, 1]);
        let f = t.as_forest().induce_from_partition(&ab).unwrap();
        assert_eq!(f.render(), "a(b);c");
        // {b, c} has two minimal elements
        let bc = PartitionOfI::from_block_ids(&[0, 1, 1]);
        assert!(t.as_forest().induce_from_partition(&bc).is_none());
        // on the chain, {a, c} skips b and still works
        let chain = tree("a(b(c))");
        let ac = PartitionOfI::from_block_ids(&[0, 1, 0]);
        let g = chain.as_forest().induce_from_partition(&ac).unwrap();
        assert_eq!(g.render(), "a(c);b");
    }

    #[test]
    fn comparability_graph_of_chain_is_complete() {
        let g = tree("a(b(c))").comparability_graph();
        assert_eq!(g.edge_count(), 3);
        let g = tree("a(b,c)").comparability_graph();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(0, 2) && !g.has_edge(1, 2));
    }

    #[test]
    fn chordal_peo_examples() {
        let t = tree("a(b,c)");
        // order (b, a, c): eliminate c, then a, then b
        let b = 1;
        let a = 0;
        let c = 2;
        assert!(check_chordal_peo(&t, &[b, a, c]));
        assert!(check_chordal_peo(&t, &[a, b, c]));
        // chains have complete comparability graphs: every order works
        let chain = tree("a(b(c))");
        assert!(check_chordal_peo(&chain, &[2, 0, 1]));
    }

    #[test]
    fn chordal_peo_detects_a_bad_order() {
        // path graph b - a - c as comparability graph of a(b,c); eliminating
        // a first leaves b, c nonadjacent, so any order ending in a fails
        let t = tree("a(b,c)");
        assert!(!check_chordal_peo(&t, &[1, 2, 0]));
    }

    #[test]
    fn linear_extensions_of_star_and_chain() {
        let star = tree("a(b,c)");
        let ext = linear_extensions(&star);
        assert_eq!(ext.len(), 2);
        assert_eq!(ext[0], vec![0, 1, 2]);
        assert_eq!(ext[1], vec![0, 2, 1]);
        let chain = tree("a(b(c))");
        assert_eq!(linear_extensions(&chain).len(), 1);
        assert_eq!(lex_min_linear_extension(&star), vec![0, 1, 2]);
    }

    #[test]
    fn enumeration_counts_match_the_closed_forms() {
        for n in 1..=5 {
            let labels = alphabet_labels(n);
            let trees: Vec<RootedTree> = enumerate_trees(&labels).collect();
            assert_eq!(trees.len() as u64, tree_count(n), "tree count at n={n}");
            let distinct: BTreeSet<RootedTree> = trees.iter().cloned().collect();
            assert_eq!(distinct.len(), trees.len(), "no duplicate trees at n={n}");
        }
        assert_eq!(tree_count(5), 625);
        for n in 1..=5 {
            let labels = alphabet_labels(n);
            let forests: Vec<Forest> = enumerate_forests(&labels).collect();
            assert_eq!(
                forests.len() as u64,
                forest_count(n),
                "forest count at n={n}"
            );
            let distinct: BTreeSet<Forest> = forests.iter().cloned().collect();
            assert_eq!(distinct.len(), forests.len(), "no duplicate forests at n={n}");
        }
        assert_eq!(forest_count(4), 125);
    }

    #[test]
    fn enumerated_forests_include_the_trivial_and_full_ones() {
        let labels = alphabet_labels(3);
        let all: BTreeSet<String> = enumerate_forests(&labels).map(|f| f.render()).collect();
        assert!(all.contains("a;b;c"));
        assert!(all.contains("a(b(c))"));
        assert!(all.contains("a(b,c)"));
        assert!(all.contains("a(b);c"));
    }

    #[test]
    fn partition_enumeration_hits_bell_numbers() {
        assert_eq!(enumerate_partitions(1).len(), 1);
        assert_eq!(enumerate_partitions(3).len(), 5);
        assert_eq!(enumerate_partitions(4).len(), 15);
        assert_eq!(enumerate_partitions(5).len(), 52);
    }
}
