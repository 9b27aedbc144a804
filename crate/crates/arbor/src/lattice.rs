//! The intersection lattice of a tree arrangement, realized as forests.
//!
//! The flats of the arrangement of a rooted tree correspond to the forests
//! contained in the tree, or equivalently to the partitions of the vertex
//! set in which every block has a unique minimal element for the tree
//! order.  This module enumerates that lattice, computes its Moebius
//! function and characteristic polynomial, suprema, the two-variable
//! cardinality polynomial with its recursion and product decomposition,
//! and renders Hasse diagrams; a brute-force flat enumeration over
//! hyperplane subsets serves as the independent oracle.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::exactpoly::{BiPoly, UniPoly};
use crate::treecore::{enumerate_partitions, Forest, PartitionOfI, RootedTree, UnionFind, Vertex};

// ===========================================================================
// Lattice
// ===========================================================================

/// The interval of forests below a tree, ordered by containment
/// (equivalently, partition refinement), with elements sorted by rank and
/// then canonically: index 0 is the edgeless forest, the last index is the
/// tree itself.
#[derive(Clone, Debug)]
pub struct Lattice {
    tree: RootedTree,
    elements: Vec<Forest>,
    partitions: Vec<PartitionOfI>,
    rank: Vec<usize>,
    hasse: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn elements(&self) -> &[Forest] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rank of an element: its number of nodes (non-root vertices).
    pub fn rank(&self, idx: usize) -> usize {
        self.rank[idx]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    /// Cover edges `(lower, upper)`, sorted.
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// The lattice order: partition refinement between elements.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.partitions[i].refines(&self.partitions[j])
    }

    pub fn index_of(&self, f: &Forest) -> Option<usize> {
        self.elements.iter().position(|e| e == f)
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn partition_signatures(&self) -> BTreeSet<PartitionOfI> {
        self.partitions.iter().cloned().collect()
    }
}

/// Enumerate the lattice of a tree: scan the partitions of the vertex set,
/// keep those whose blocks each have a unique minimal element, and equip
/// every block with the induced order.
pub fn build_lattice(t: &RootedTree) -> Lattice {
    let n = t.n();
    let mut elements: Vec<Forest> = Vec::new();
    for ids in enumerate_partitions(n) {
        let part = PartitionOfI::from_block_ids(&ids);
        if let Some(f) = t.as_forest().induce_from_partition(&part) {
            elements.push(f);
        }
    }
    elements.sort_by_key(|f| (f.node_count(), f.clone()));
    let partitions: Vec<PartitionOfI> = elements.iter().map(|f| f.partition()).collect();
    let rank: Vec<usize> = elements.iter().map(|f| f.node_count()).collect();
    let mut hasse = Vec::new();
    for i in 0..elements.len() {
        for j in 0..elements.len() {
            if rank[j] == rank[i] + 1 && partitions[i].refines(&partitions[j]) {
                hasse.push((i, j));
            }
        }
    }
    hasse.sort_unstable();
    Lattice {
        tree: t.clone(),
        elements,
        partitions,
        rank,
        hasse,
    }
}

/// Independent oracle: enumerate every subset of the hyperplanes, take the
/// partition generated by its equalities, and collect the distinct
/// partition signatures.
pub fn brute_force_flats(t: &RootedTree) -> BTreeSet<PartitionOfI> {
    let n = t.n();
    let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && t.leq(i, j) {
                pairs.push((i, j));
            }
        }
    }
    let m = pairs.len();
    assert!(m <= 24, "brute-force flat enumeration is exponential");
    let mut flats = BTreeSet::new();
    for mask in 0u32..1 << m {
        let mut uf = UnionFind::new(n);
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                uf.union(i, j);
            }
        }
        let ids: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
        flats.insert(PartitionOfI::from_block_ids(&ids));
    }
    flats
}

// ===========================================================================
// Moebius function and characteristic polynomial
// ===========================================================================

/// Moebius values from the bottom element, indexed like the lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTable {
    pub mu: Vec<i64>,
}

/// Moebius function of the lattice from the bottom: 1 at the bottom, and
/// the negated sum over all strictly smaller elements elsewhere.  Elements
/// come sorted by rank, so one forward pass suffices.
pub fn mobius(lat: &Lattice) -> MobiusTable {
    let len = lat.len();
    let mut mu = vec![0i64; len];
    mu[0] = 1;
    for a in 1..len {
        let below: i64 = (0..a).filter(|&b| lat.leq(b, a)).map(|b| mu[b]).sum();
        mu[a] = -below;
    }
    MobiusTable { mu }
}

/// Characteristic polynomial as the Moebius-weighted sum of `y^dim`, where
/// the dimension of an element is the vertex count minus its rank.
pub fn char_poly_mobius(lat: &Lattice) -> UniPoly {
    let n = lat.tree().n();
    let table = mobius(lat);
    let mut out = UniPoly::zero();
    for (a, &m) in table.mu.iter().enumerate() {
        out = out.add_scaled_power(&BigInt::from(m), n - lat.rank(a));
    }
    out
}

// ===========================================================================
// Suprema
// ===========================================================================

/// Least upper bound of two lattice elements.
///
/// # Panics
///
/// Panics when an argument is not an element of the lattice.
pub fn supremum(lat: &Lattice, f1: &Forest, f2: &Forest) -> Forest {
    let i1 = lat
        .index_of(f1)
        .expect("first argument must be a lattice element");
    let i2 = lat
        .index_of(f2)
        .expect("second argument must be a lattice element");
    let uppers: Vec<usize> = (0..lat.len())
        .filter(|&k| lat.leq(i1, k) && lat.leq(i2, k))
        .collect();
    let &least = uppers
        .iter()
        .min_by_key(|&&k| lat.rank(k))
        .expect("the top element is a common upper bound");
    assert!(
        uppers.iter().all(|&k| lat.leq(least, k)),
        "common upper bounds must have a least element"
    );
    lat.elements[least].clone()
}

// ===========================================================================
// Cardinality polynomial
// ===========================================================================

/// The two-variable cardinality polynomial: the sum over lattice elements
/// of `y^corank * z^stump`, where the corank is one less than the number
/// of roots and the stump is one less than the size of the block containing
/// the tree's root.
pub fn cardinality_poly(lat: &Lattice) -> BiPoly {
    let root = lat.tree().root();
    let mut out = BiPoly::zero();
    for f in lat.elements() {
        let crk = f.roots().len() - 1;
        let stump = f.partition().block_containing(root).len() - 1;
        out.add_term(crk as u32, stump as u32, BigInt::from(1));
    }
    out
}

/// The cardinality polynomial by structural recursion, never touching the
/// lattice: a single vertex gives 1; a root of valence one is removed and
/// the subtree's polynomial re-enters as `z*C(y,z) + y*C(y,1+z)`; a root of
/// higher valence splits the tree into root-plus-child-subtree factors
/// whose polynomials multiply.
pub fn cardinality_poly_recursive(t: &RootedTree) -> BiPoly {
    if t.n() == 1 {
        return BiPoly::one();
    }
    let root = t.root();
    if t.children(root).len() == 1 {
        let inner = t.peel_root().expect("a valence-one root peels off");
        let c = cardinality_poly_recursive(&inner);
        let z_c = c.mul(&BiPoly::monomial(0, 1));
        let y_c_shift = c.subst_z_plus_one().mul(&BiPoly::monomial(1, 0));
        return z_c.add(&y_c_shift);
    }
    let mut acc = BiPoly::one();
    for factor in t.root_decompose().expect("a multi-vertex tree decomposes") {
        acc = acc.mul(&cardinality_poly_recursive(&factor));
    }
    acc
}

// ===========================================================================
// DOT rendering
// ===========================================================================

/// Render the Hasse diagram as a DOT digraph, drawn bottom-up with one
/// aligned row per rank and nodes labeled by canonical forest strings.
pub fn hasse_dot(lat: &Lattice) -> String {
    let mut out = String::new();
    out.push_str("digraph lattice {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box, fontname=\"Courier\"];\n");
    for (idx, f) in lat.elements().iter().enumerate() {
        out.push_str(&format!("  n{idx} [label=\"{}\"];\n", f.render()));
    }
    let max_rank = *lat.ranks().iter().max().expect("lattice is never empty");
    for r in 0..=max_rank {
        let row: Vec<String> = (0..lat.len())
            .filter(|&i| lat.rank(i) == r)
            .map(|i| format!("n{i}"))
            .collect();
        if row.len() > 1 {
            out.push_str(&format!("  {{ rank=same; {}; }}\n", row.join("; ")));
        }
    }
    for &(i, j) in lat.hasse() {
        out.push_str(&format!("  n{i} -> n{j};\n"));
    }
    out.push_str("}\n");
    out
}

// ===========================================================================
// Tests
// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treecore::{alphabet_labels, enumerate_trees};
    use num_traits::One;

    fn tree(s: &str) -> RootedTree {
        RootedTree::parse(s).expect("test tree parses")
    }

    #[test]
    fn element_counts_on_small_trees() {
        assert_eq!(build_lattice(&tree("a")).len(), 1);
        assert_eq!(build_lattice(&tree("a(b)")).len(), 2);
        assert_eq!(build_lattice(&tree("a(b(c))")).len(), 5);
        assert_eq!(build_lattice(&tree("a(b,c)")).len(), 4);
    }

    #[test]
    fn bottom_and_top_are_the_extremes() {
        let lat = build_lattice(&tree("a(b(c))"));
        assert_eq!(lat.elements()[lat.bottom()].render(), "a;b;c");
        assert_eq!(lat.elements()[lat.top()].render(), "a(b(c))");
        assert_eq!(lat.rank(lat.bottom()), 0);
        assert_eq!(lat.rank(lat.top()), 2);
    }

    #[test]
    fn elements_match_brute_force_flats() {
        for n in 1..=4 {
            for t in enumerate_trees(&alphabet_labels(n)) {
                let lat = build_lattice(&t);
                let flats = brute_force_flats(&t);
                assert_eq!(
                    lat.partition_signatures(),
                    flats,
                    "flat mismatch on {}",
                    t.render()
                );
            }
        }
    }

    #[test]
    fn hasse_edges_are_exactly_the_covers() {
        for t in [tree("a(b(c))"), tree("a(b,c)"), tree("a(b(c),d)")] {
            let lat = build_lattice(&t);
            let mut covers = Vec::new();
            for i in 0..lat.len() {
                for j in 0..lat.len() {
                    if i != j && lat.leq(i, j) {
                        let strictly_between = (0..lat.len()).any(|k| {
                            k != i && k != j && lat.leq(i, k) && lat.leq(k, j)
                        });
                        if !strictly_between {
                            covers.push((i, j));
                        }
                    }
                }
            }
            covers.sort_unstable();
            assert_eq!(lat.hasse(), covers.as_slice(), "on {}", t.render());
            // gradedness: every cover climbs exactly one rank
            for &(i, j) in lat.hasse() {
                assert_eq!(lat.rank(j), lat.rank(i) + 1);
            }
        }
    }

    #[test]
    fn lattice_order_agrees_with_forest_containment() {
        let lat = build_lattice(&tree("a(b(c),d)"));
        for i in 0..lat.len() {
            for j in 0..lat.len() {
                assert_eq!(
                    lat.leq(i, j),
                    lat.elements()[i].is_subforest(&lat.elements()[j])
                );
            }
        }
    }

    #[test]
    fn mobius_values_on_the_three_chain() {
        let lat = build_lattice(&tree("a(b(c))"));
        let table = mobius(&lat);
        assert_eq!(table.mu[lat.bottom()], 1);
        for i in 0..lat.len() {
            if lat.rank(i) == 1 {
                assert_eq!(table.mu[i], -1);
            }
        }
        assert_eq!(table.mu[lat.top()], 2);
        // defining property: the sum over each lower interval vanishes
        for a in 1..lat.len() {
            let total: i64 = (0..lat.len())
                .filter(|&b| lat.leq(b, a))
                .map(|b| table.mu[b])
                .sum();
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn characteristic_polynomial_via_mobius_matches_the_product() {
        use crate::arrangement::char_poly_product;
        assert_eq!(
            char_poly_mobius(&build_lattice(&tree("a(b(c))"))).render("y"),
            "y^3 - 3*y^2 + 2*y"
        );
        assert_eq!(
            char_poly_mobius(&build_lattice(&tree("a(b,c)"))).render("y"),
            "y^3 - 2*y^2 + y"
        );
        assert_eq!(char_poly_mobius(&build_lattice(&tree("a"))).render("y"), "y");
        for n in 1..=4 {
            for t in enumerate_trees(&alphabet_labels(n)) {
                assert_eq!(
                    char_poly_mobius(&build_lattice(&t)),
                    char_poly_product(&t),
                    "on {}",
                    t.render()
                );
            }
        }
    }

    #[test]
    fn chambers_equal_the_characteristic_polynomial_at_minus_one() {
        use crate::arrangement::chamber_count;
        for n in 1..=4 {
            for t in enumerate_trees(&alphabet_labels(n)) {
                let chi = char_poly_mobius(&build_lattice(&t));
                let value = chi.eval_int(&BigInt::from(-1));
                let magnitude: u64 = value.magnitude().try_into().expect("small count");
                assert_eq!(magnitude, chamber_count(&t), "on {}", t.render());
            }
        }
    }

    #[test]
    fn supremum_frozen_example_and_laws() {
        let t = tree("a(b(c))");
        let lat = build_lattice(&t);
        let f1 = Forest::parse("a(b);c").unwrap();
        let f2 = Forest::parse("b(c);a").unwrap();
        assert_eq!(supremum(&lat, &f1, &f2).render(), "a(b(c))");
        let bottom = lat.elements()[lat.bottom()].clone();
        for f in lat.elements() {
            assert_eq!(&supremum(&lat, &bottom, f), f);
            assert_eq!(&supremum(&lat, f, f), f);
        }
    }

    #[test]
    fn supremum_is_induced_from_the_partition_join() {
        for n in 1..=4 {
            for t in enumerate_trees(&alphabet_labels(n)) {
                let lat = build_lattice(&t);
                for f1 in lat.elements() {
                    for f2 in lat.elements() {
                        let sup = supremum(&lat, f1, f2);
                        let join = f1.partition().join(&f2.partition());
                        let induced = t
                            .as_forest()
                            .induce_from_partition(&join)
                            .expect("the join of two flats is a flat");
                        assert_eq!(sup, induced, "on {}", t.render());
                    }
                }
            }
        }
    }

    #[test]
    fn supremum_node_sets_add_when_disjoint() {
        for n in 1..=4 {
            for t in enumerate_trees(&alphabet_labels(n)) {
                let lat = build_lattice(&t);
                for f1 in lat.elements() {
                    for f2 in lat.elements() {
                        let n1 = f1.node_set();
                        let n2 = f2.node_set();
                        if n1.is_disjoint(&n2) {
                            let sup = supremum(&lat, f1, f2);
                            let expected: BTreeSet<Vertex> =
                                n1.union(&n2).copied().collect();
                            assert_eq!(sup.node_set(), expected, "on {}", t.render());
                        }
                    }
                }
            }
        }
    }

    #[test]
    #[should_panic(expected = "must be a lattice element")]
    fn supremum_rejects_foreign_forests() {
        let lat = build_lattice(&tree("a(b,c)"));
        // b(c);a is not a subforest of the star
        let foreign = Forest::parse("b(c);a").unwrap();
        supremum(&lat, &foreign, &foreign);
    }

    #[test]
    fn cardinality_polynomial_frozen_values() {
        assert_eq!(cardinality_poly(&build_lattice(&tree("a"))).render(), "1");
        assert_eq!(
            cardinality_poly(&build_lattice(&tree("a(b)"))).render(),
            "y + z"
        );
        assert_eq!(
            cardinality_poly(&build_lattice(&tree("a(b(c))"))).render(),
            "y^2 + 2*y*z + z^2 + y"
        );
        assert_eq!(
            cardinality_poly(&build_lattice(&tree("a(b,c)"))).render(),
            "y^2 + 2*y*z + z^2"
        );
    }

    #[test]
    fn cardinality_recursion_agrees_with_direct_enumeration() {
        assert_eq!(cardinality_poly_recursive(&tree("a(b)")).render(), "y + z");
        assert_eq!(
            cardinality_poly_recursive(&tree("a(b(c))")).render(),
            "y^2 + 2*y*z + z^2 + y"
        );
        for n in 1..=4 {
            for t in enumerate_trees(&alphabet_labels(n)) {
                let lat = build_lattice(&t);
                assert_eq!(
                    cardinality_poly(&lat),
                    cardinality_poly_recursive(&t),
                    "on {}",
                    t.render()
                );
                // specializing both variables to 1 counts the elements
                let size = cardinality_poly(&lat).eval_int(&BigInt::one(), &BigInt::one());
                assert_eq!(size, BigInt::from(lat.len()));
            }
        }
    }

    #[test]
    fn dot_output_shape() {
        let single = hasse_dot(&build_lattice(&tree("a")));
        assert!(single.contains("n0 [label=\"a\"]"));
        assert!(!single.contains("->"));

        let edge = hasse_dot(&build_lattice(&tree("a(b)")));
        assert_eq!(edge.matches("label=").count(), 2);
        assert_eq!(edge.matches("->").count(), 1);

        let chain = hasse_dot(&build_lattice(&tree("a(b(c))")));
        assert_eq!(chain.matches("label=").count(), 5);
        assert_eq!(chain.matches("->").count(), 6);
        assert!(chain.contains("rank=same"));
        assert!(chain.starts_with("digraph lattice {"));
    }

    #[test]
    fn mobius_sum_counts_signed_chambers_on_a_bigger_tree() {
        // five-vertex tree exercised end to end
        let t = tree("a(b(c,d),e)");
        let lat = build_lattice(&t);
        let chi = char_poly_mobius(&lat);
        use crate::arrangement::{chamber_count, char_poly_product};
        assert_eq!(chi, char_poly_product(&t));
        let at_minus_one = chi.eval_int(&BigInt::from(-1));
        let magnitude: u64 = at_minus_one.magnitude().try_into().unwrap();
        assert_eq!(magnitude, chamber_count(&t));
    }
}
