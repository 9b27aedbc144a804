//! The graded coalgebra on forests, its dual algebra, and the presented
//! algebra with normal-form reduction.
//!
//! The free module on the forests over a fixed label set carries a
//! coproduct: split the node set of a forest into an ordered pair of
//! blocks, emit every pair of subforests realizing the two blocks, and
//! weight the pair by the parity of the shuffle that sorts the two blocks
//! back into ascending order.  Forests are always stored against their
//! canonical orientation (nodes wedged in ascending label order), with
//! signs folded into integer coefficients.
//!
//! Dualizing gives an algebra on the same basis; the graded-commutative
//! algebra presented by degree-one generators, one per ordered pair of
//! distinct labels, modulo the two-parents and oriented-cycle relations,
//! maps onto it by sending each generator to the dual basis element of the
//! corresponding single-edge forest.  `iso_check` certifies that this map
//! is an isomorphism at a given size by exhibiting the transition matrix
//! and checking unimodularity block by block.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::cert::Certificate;
use crate::exactpoly::linalg;
use crate::treecore::{
    enumerate_forests, enumerate_partitions, forest_count, Forest, LabelTable, ParseError,
    PartitionOfI, Vertex,
};

// ===========================================================================
// Elements
// ===========================================================================

/// An integer combination of forests on a fixed label set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraElement {
    labels: LabelTable,
    terms: BTreeMap<Forest, i64>,
}

impl CoalgebraElement {
    pub fn zero(labels: LabelTable) -> Self {
        CoalgebraElement {
            labels,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_forest(f: &Forest) -> Self {
        let mut e = CoalgebraElement::zero(f.labels().clone());
        e.add_term(f.clone(), 1);
        e
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn terms(&self) -> &BTreeMap<Forest, i64> {
        &self.terms
    }

    pub fn coeff(&self, f: &Forest) -> i64 {
        self.terms.get(f).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: Forest, c: i64) {
        if c == 0 {
            return;
        }
        assert_eq!(f.labels(), &self.labels, "term label set must match");
        match self.terms.get_mut(&f) {
            Some(slot) => {
                *slot += c;
                if *slot == 0 {
                    self.terms.remove(&f);
                }
            }
            None => {
                self.terms.insert(f, c);
            }
        }
    }

    pub fn add(&self, other: &CoalgebraElement) -> CoalgebraElement {
        assert_eq!(self.labels, other.labels, "label sets must match");
        let mut out = self.clone();
        for (f, &c) in &other.terms {
            out.add_term(f.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: i64) -> CoalgebraElement {
        let mut out = CoalgebraElement::zero(self.labels.clone());
        for (f, &v) in &self.terms {
            out.add_term(f.clone(), v * c);
        }
        out
    }

    pub fn render(&self) -> String {
        render_terms(&self.terms, |f| format!("[{}]", f.render()))
    }
}

/// An integer combination of ordered tuples of forests, all of one width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    labels: LabelTable,
    width: usize,
    terms: BTreeMap<Vec<Forest>, i64>,
}

impl TensorElement {
    pub fn zero(labels: LabelTable, width: usize) -> Self {
        assert!(width >= 1, "tensor width must be positive");
        TensorElement {
            labels,
            width,
            terms: BTreeMap::new(),
        }
    }

    /// Width-one tensor wrapping an element.
    pub fn from_element(x: &CoalgebraElement) -> Self {
        let mut t = TensorElement::zero(x.labels().clone(), 1);
        for (f, &c) in x.terms() {
            t.add_term(vec![f.clone()], c);
        }
        t
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Forest>, i64> {
        &self.terms
    }

    pub fn coeff(&self, tuple: &[Forest]) -> i64 {
        self.terms.get(tuple).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, tuple: Vec<Forest>, c: i64) {
        if c == 0 {
            return;
        }
        assert_eq!(tuple.len(), self.width, "tuple width must match");
        match self.terms.get_mut(&tuple) {
            Some(slot) => {
                *slot += c;
                if *slot == 0 {
                    self.terms.remove(&tuple);
                }
            }
            None => {
                self.terms.insert(tuple, c);
            }
        }
    }

    pub fn render(&self) -> String {
        render_terms(&self.terms, |tuple| {
            tuple
                .iter()
                .map(|f| format!("[{}]", f.render()))
                .collect::<Vec<_>>()
                .join("\u{2297}")
        })
    }
}

/// An integer combination of dual basis elements, indexed by forests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualElement {
    labels: LabelTable,
    terms: BTreeMap<Forest, i64>,
}

impl DualElement {
    pub fn zero(labels: LabelTable) -> Self {
        DualElement {
            labels,
            terms: BTreeMap::new(),
        }
    }

    /// The dual basis element of a single forest.
    pub fn dual_of(f: &Forest) -> Self {
        let mut e = DualElement::zero(f.labels().clone());
        e.add_term(f.clone(), 1);
        e
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn terms(&self) -> &BTreeMap<Forest, i64> {
        &self.terms
    }

    pub fn coeff(&self, f: &Forest) -> i64 {
        self.terms.get(f).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> BTreeSet<Forest> {
        self.terms.keys().cloned().collect()
    }

    pub fn add_term(&mut self, f: Forest, c: i64) {
        if c == 0 {
            return;
        }
        assert_eq!(f.labels(), &self.labels, "term label set must match");
        match self.terms.get_mut(&f) {
            Some(slot) => {
                *slot += c;
                if *slot == 0 {
                    self.terms.remove(&f);
                }
            }
            None => {
                self.terms.insert(f, c);
            }
        }
    }

    pub fn render(&self) -> String {
        render_terms(&self.terms, |f| format!("[{}]*", f.render()))
    }
}

fn render_terms<K>(terms: &BTreeMap<K, i64>, show: impl Fn(&K) -> String) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    terms
        .iter()
        .map(|(k, c)| format!("{c:+}\u{00b7}{}", show(k)))
        .collect::<Vec<_>>()
        .join(" ")
}

// ===========================================================================
// Gamma and the coproduct
// ===========================================================================

/// All subforests of `f` whose node set is exactly `nodes`: scan the
/// partitions of the label set, keep those inducing a subforest of `f`,
/// and filter by node set.
///
/// # Panics
///
/// Panics when `nodes` is not a subset of the nodes of `f`.
pub fn gamma(f: &Forest, nodes: &BTreeSet<Vertex>) -> BTreeSet<Forest> {
    assert!(
        nodes.is_subset(&f.node_set()),
        "requested nodes must be nodes of the forest"
    );
    let mut out = BTreeSet::new();
    for ids in enumerate_partitions(f.n()) {
        let part = PartitionOfI::from_block_ids(&ids);
        if let Some(sub) = f.induce_from_partition(&part) {
            if &sub.node_set() == nodes {
                out.insert(sub);
            }
        }
    }
    out
}

/// Parity sign of the shuffle sorting the concatenation of two ascending
/// sequences into one ascending sequence.
fn shuffle_sign(n1: &[Vertex], n2: &[Vertex]) -> i64 {
    let mut inversions = 0usize;
    for &a in n1 {
        for &b in n2 {
            if b < a {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The coproduct: for each term, sum over ordered splittings of its node
/// set (empty blocks included) of all pairs of subforests realizing the
/// blocks, signed by the shuffle parity of the splitting.
pub fn coproduct(x: &CoalgebraElement) -> TensorElement {
    let mut out = TensorElement::zero(x.labels().clone(), 2);
    for (f, &c) in x.terms() {
        let nodes = f.nodes();
        let d = nodes.len();
        for mask in 0u32..1 << d {
            let n1: Vec<Vertex> = (0..d)
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| nodes[k])
                .collect();
            let n2: Vec<Vertex> = (0..d)
                .filter(|&k| mask >> k & 1 == 0)
                .map(|k| nodes[k])
                .collect();
            let sign = shuffle_sign(&n1, &n2);
            let s1: BTreeSet<Vertex> = n1.iter().copied().collect();
            let s2: BTreeSet<Vertex> = n2.iter().copied().collect();
            for f1 in gamma(f, &s1) {
                for f2 in gamma(f, &s2) {
                    out.add_term(vec![f1.clone(), f2.clone()], c * sign);
                }
            }
        }
    }
    out
}

/// Apply the coproduct to one slot of a tensor, splicing the two new slots
/// in place.  The coproduct preserves degree, so no extra sign appears.
pub fn expand_slot(t: &TensorElement, slot: usize) -> TensorElement {
    assert!(slot < t.width(), "slot out of range");
    let mut out = TensorElement::zero(t.labels().clone(), t.width() + 1);
    for (tuple, &c) in t.terms() {
        let inner = coproduct(&CoalgebraElement::from_forest(&tuple[slot]));
        for (pair, &d) in inner.terms() {
            let mut next = Vec::with_capacity(tuple.len() + 1);
            next.extend_from_slice(&tuple[..slot]);
            next.extend_from_slice(pair);
            next.extend_from_slice(&tuple[slot + 1..]);
            out.add_term(next, c * d);
        }
    }
    out
}

/// The `(k-1)`-fold coproduct into `k` slots, expanding the leftmost slot
/// each time.
pub fn iterated_coproduct(x: &CoalgebraElement, k: usize) -> TensorElement {
    assert!(k >= 1, "at least one slot");
    let mut t = TensorElement::from_element(x);
    for _ in 1..k {
        t = expand_slot(&t, 0);
    }
    t
}

/// The coefficient of the edgeless forest.
pub fn counit(x: &CoalgebraElement) -> i64 {
    x.coeff(&Forest::trivial(x.labels().clone()))
}

// ===========================================================================
// Dual algebra
// ===========================================================================

/// Product on dual elements straight from the definition: the coefficient
/// of each dual basis vector is the pairing of the factors with the two
/// coproduct slots of that vector.  Recomputes every coproduct; see
/// [`DualContext`] for the cached version.
pub fn dual_multiply(a: &DualElement, b: &DualElement) -> DualElement {
    assert_eq!(a.labels(), b.labels(), "label sets must match");
    let mut out = DualElement::zero(a.labels().clone());
    for g in enumerate_forests(a.labels()) {
        let delta = coproduct(&CoalgebraElement::from_forest(&g));
        let mut total = 0i64;
        for (pair, &c) in delta.terms() {
            total += c * a.coeff(&pair[0]) * b.coeff(&pair[1]);
        }
        out.add_term(g, total);
    }
    out
}

/// Dual-algebra workspace for one label set: all forests and their
/// coproducts, computed once.
pub struct DualContext {
    labels: LabelTable,
    forests: Vec<Forest>,
    coproducts: Vec<Vec<(Forest, Forest, i64)>>,
}

impl DualContext {
    pub fn new(labels: &LabelTable) -> Self {
        let forests: Vec<Forest> = enumerate_forests(labels).collect();
        let coproducts = forests
            .iter()
            .map(|g| {
                coproduct(&CoalgebraElement::from_forest(g))
                    .terms()
                    .iter()
                    .map(|(pair, &c)| (pair[0].clone(), pair[1].clone(), c))
                    .collect()
            })
            .collect();
        DualContext {
            labels: labels.clone(),
            forests,
            coproducts,
        }
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    /// Every forest on the label set, in enumeration order.
    pub fn forests(&self) -> &[Forest] {
        &self.forests
    }

    /// The unit: the dual of the edgeless forest.
    pub fn unit(&self) -> DualElement {
        DualElement::dual_of(&Forest::trivial(self.labels.clone()))
    }

    /// The degree-one generator for an edge `parent -> child`.
    pub fn generator(&self, parent: Vertex, child: Vertex) -> DualElement {
        assert!(parent != child, "generator needs two distinct vertices");
        let n = self.labels.len();
        assert!(parent < n && child < n, "vertex out of range");
        let mut parents = vec![None; n];
        parents[child] = Some(parent);
        DualElement::dual_of(&Forest::new(self.labels.clone(), parents))
    }

    pub fn multiply(&self, a: &DualElement, b: &DualElement) -> DualElement {
        assert_eq!(a.labels(), &self.labels, "label sets must match");
        assert_eq!(b.labels(), &self.labels, "label sets must match");
        let mut out = DualElement::zero(self.labels.clone());
        for (g, delta) in self.forests.iter().zip(&self.coproducts) {
            let mut total = 0i64;
            for (f1, f2, c) in delta {
                total += c * a.coeff(f1) * b.coeff(f2);
            }
            out.add_term(g.clone(), total);
        }
        out
    }

    /// The image of a word: the product of its generators, left to right.
    pub fn rho(&self, w: &AlgebraWord) -> DualElement {
        assert_eq!(w.labels(), &self.labels, "label sets must match");
        let mut acc = self.unit();
        for &(p, c) in w.factors() {
            acc = self.multiply(&acc, &self.generator(p, c));
        }
        acc
    }
}

// ===========================================================================
// Presented algebra words
// ===========================================================================

/// A word in the degree-one generators of the presented algebra: an ordered
/// list of `(parent, child)` pairs over a fixed label set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraWord {
    labels: LabelTable,
    factors: Vec<(Vertex, Vertex)>,
}

impl AlgebraWord {
    /// # Panics
    ///
    /// Panics on an empty label set, a factor with equal ends, or a vertex
    /// out of range.
    pub fn new(labels: LabelTable, factors: Vec<(Vertex, Vertex)>) -> Self {
        assert!(!labels.is_empty(), "words need a nonempty label set");
        for &(p, c) in &factors {
            assert!(p != c, "generator needs two distinct vertices");
            assert!(p < labels.len() && c < labels.len(), "vertex out of range");
        }
        AlgebraWord { labels, factors }
    }

    /// Parse a comma-separated list of single-edge factors, each written as
    /// `parent(child)` in the tree grammar; for example `"a(b),a(c)"`.  The
    /// ambient label set is the union of the factor labels and `ambient`;
    /// an empty word needs a nonempty `ambient`.
    pub fn parse(text: &str, ambient: &[String]) -> Result<Self, ParseError> {
        let mut labels: BTreeSet<String> = ambient.iter().cloned().collect();
        let mut raw: Vec<(String, String)> = Vec::new();
        let trimmed = text.trim();
        if !trimmed.is_empty() {
            for chunk in trimmed.split(',') {
                let t = crate::treecore::RootedTree::parse(chunk)?;
                if t.n() != 2 {
                    return Err(ParseError::Syntax {
                        pos: 0,
                        expected: "a single-edge factor of the form parent(child)",
                    });
                }
                let root = t.root();
                let child = t.children(root)[0];
                raw.push((
                    t.labels().label(root).to_string(),
                    t.labels().label(child).to_string(),
                ));
                labels.insert(t.labels().label(root).to_string());
                labels.insert(t.labels().label(child).to_string());
            }
        }
        if labels.is_empty() {
            return Err(ParseError::Syntax {
                pos: 0,
                expected: "at least one factor or an ambient label set",
            });
        }
        let table = LabelTable::new(labels.into_iter().collect())?;
        let factors = raw
            .into_iter()
            .map(|(p, c)| {
                (
                    table.index_of(&p).expect("label collected"),
                    table.index_of(&c).expect("label collected"),
                )
            })
            .collect();
        Ok(AlgebraWord::new(table, factors))
    }

    /// The canonical monomial word of a forest: its edges as factors,
    /// sorted by child label.
    pub fn monomial_of(f: &Forest) -> Self {
        AlgebraWord::new(f.labels().clone(), f.edges())
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn factors(&self) -> &[(Vertex, Vertex)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn render(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|&(p, c)| format!("{}({})", self.labels.label(p), self.labels.label(c)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Normal form of a word in the presented algebra: `None` when the word
/// vanishes because some child has two parents (including a repeated
/// factor) or the factors close an oriented cycle; otherwise the sign of
/// the permutation sorting the factors by child label, together with the
/// forest the factors form.
pub fn algebra_reduce(w: &AlgebraWord) -> Option<(i8, Forest)> {
    let n = w.labels().len();
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    for &(p, c) in w.factors() {
        if parent[c].is_some() {
            return None;
        }
        parent[c] = Some(p);
    }
    for v in 0..n {
        let mut cur = v;
        let mut steps = 0;
        while let Some(p) = parent[cur] {
            cur = p;
            steps += 1;
            if steps > n {
                return None;
            }
        }
    }
    let forest = Forest::new(w.labels().clone(), parent);
    let children: Vec<Vertex> = w.factors().iter().map(|&(_, c)| c).collect();
    let mut inversions = 0usize;
    for i in 0..children.len() {
        for j in i + 1..children.len() {
            if children[i] > children[j] {
                inversions += 1;
            }
        }
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Some((sign, forest))
}

// ===========================================================================
// Isomorphism certificate
// ===========================================================================

/// The predicted support of the image of a forest's monomial: every forest
/// with the same node set whose order relation extends the given one.
pub fn imagemono_predicted(f: &Forest) -> BTreeSet<Forest> {
    let nodes = f.node_set();
    enumerate_forests(f.labels())
        .filter(|g| g.node_set() == nodes && f.precedes(g))
        .collect()
}

/// Certify the isomorphism between the presented algebra and the dual
/// algebra on a label set: for every forest, the image of its monomial is
/// supported exactly on the predicted order-extension set with coefficients
/// of magnitude one, and the transition matrix, block by node set, is
/// triangular with unit diagonal and has determinant of magnitude one.
pub fn iso_check(labels: &LabelTable) -> Certificate {
    let n = labels.len();
    let claim = format!(
        "the presented algebra on {{{}}} maps isomorphically onto the dual forest algebra",
        labels.iter().collect::<Vec<_>>().join(",")
    );
    let ctx = DualContext::new(labels);
    let mut support_ok = true;
    let mut unit_coeffs_ok = true;
    let mut images: BTreeMap<Forest, DualElement> = BTreeMap::new();
    for f in ctx.forests() {
        let image = ctx.rho(&AlgebraWord::monomial_of(f));
        if image.support() != imagemono_predicted(f) {
            support_ok = false;
        }
        if image.terms().values().any(|&c| c != 1 && c != -1) {
            unit_coeffs_ok = false;
        }
        images.insert(f.clone(), image);
    }

    // block structure by node set
    let mut blocks: BTreeMap<BTreeSet<Vertex>, Vec<Forest>> = BTreeMap::new();
    for f in ctx.forests() {
        blocks.entry(f.node_set()).or_default().push(f.clone());
    }
    let mut triangular_ok = true;
    let mut unimodular_ok = true;
    for members in blocks.values() {
        let order = order_extension_sort(members);
        let size = order.len();
        let mut matrix = vec![vec![BigInt::from(0); size]; size];
        for (row, f) in order.iter().enumerate() {
            let image = &images[f];
            for (col, g) in order.iter().enumerate() {
                let c = image.coeff(g);
                matrix[row][col] = BigInt::from(c);
                if c != 0 && row > col {
                    triangular_ok = false;
                }
                if row == col && c.abs() != 1 {
                    triangular_ok = false;
                }
            }
        }
        let det = linalg::bareiss_det(matrix);
        if det != BigInt::from(1) && det != BigInt::from(-1) {
            unimodular_ok = false;
        }
    }

    let pass = support_ok && unit_coeffs_ok && triangular_ok && unimodular_ok;
    let witness = format!(
        "{} forests (expected {}) in {} node-set blocks; supports match the order-extension \
         prediction: {support_ok}; all coefficients are of magnitude one: {unit_coeffs_ok}; \
         blocks triangular with unit diagonal: {triangular_ok}; block determinants of \
         magnitude one: {unimodular_ok}",
        ctx.forests().len(),
        forest_count(n),
        blocks.len()
    );
    Certificate::new(claim, pass, witness)
}

/// Topological sort of forests sharing a node set along the order-extension
/// relation, with canonical tie-breaking.
fn order_extension_sort(members: &[Forest]) -> Vec<Forest> {
    let mut remaining: Vec<Forest> = members.to_vec();
    remaining.sort();
    let mut out: Vec<Forest> = Vec::with_capacity(members.len());
    while !remaining.is_empty() {
        let pos = remaining
            .iter()
            .position(|g| {
                remaining
                    .iter()
                    .all(|h| h == g || !h.precedes(g) || g.precedes(h))
            })
            .expect("order extension is acyclic");
        out.push(remaining.remove(pos));
    }
    out
}

// ===========================================================================
// Tests
// ===========================================================================
