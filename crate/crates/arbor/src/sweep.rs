//! Batch verification: run every library invariant over all trees and
//! forests up to a size bound and report per-property outcomes.
//!
//! Each property has its own exhaustive size cap, chosen so the whole sweep
//! finishes in seconds to minutes with exact arithmetic throughout.  The
//! requested bound is clamped per property; the report records the bound
//! actually swept.  Output order is fixed, independent of execution order.

use crate::arrangement::{
    chamber_count, char_poly_product, count_acyclic_orientations, duality_check, exponents,
    field_is_logarithmic, omega_is_logarithmic, relation_span_check, saito_check, Arrangement,
};
use crate::coalg::{
    coproduct, counit, expand_slot, iso_check, iterated_coproduct, CoalgebraElement,
    TensorElement,
};
use crate::lattice::{
    brute_force_flats, build_lattice, cardinality_poly, cardinality_poly_recursive,
    char_poly_mobius,
};
use crate::treecore::{
    alphabet_labels, check_chordal_peo, enumerate_forests, enumerate_trees, forest_count,
    linear_extensions, tree_count, Forest, RootedTree,
};

use num_bigint::BigInt;

/// Outcome of one swept property.
#[derive(Clone, Debug)]
pub struct PropertyResult {
    pub name: &'static str,
    /// Largest vertex count actually swept.
    pub bound: usize,
    pub pass: bool,
    /// Item counts on success, the first counterexample on failure.
    pub detail: String,
}

/// Enumeration self-check for one size: counts from the iterators against
/// the closed-form values.
#[derive(Clone, Debug)]
pub struct CountRow {
    pub n: usize,
    pub trees: u64,
    pub trees_expected: u64,
    pub forests: u64,
    pub forests_expected: u64,
}

impl CountRow {
    pub fn pass(&self) -> bool {
        self.trees == self.trees_expected && self.forests == self.forests_expected
    }
}

/// Full sweep outcome.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub max_n: usize,
    pub grid_offset: i64,
    pub counts: Vec<CountRow>,
    pub properties: Vec<PropertyResult>,
}

impl SweepReport {
    pub fn all_pass(&self) -> bool {
        self.counts.iter().all(CountRow::pass) && self.properties.iter().all(|p| p.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "sweep up to n = {} (grid offset {})\n",
            self.max_n, self.grid_offset
        ));
        out.push_str("counts:\n");
        for row in &self.counts {
            out.push_str(&format!(
                "  n={}: trees {}/{}, forests {}/{} {}\n",
                row.n,
                row.trees,
                row.trees_expected,
                row.forests,
                row.forests_expected,
                if row.pass() { "ok" } else { "MISMATCH" }
            ));
        }
        out.push_str("properties:\n");
        for p in &self.properties {
            out.push_str(&format!(
                "  {} {} (n <= {}): {}\n",
                if p.pass { "pass" } else { "FAIL" },
                p.name,
                p.bound,
                p.detail
            ));
        }
        let verdict = if self.all_pass() { "pass" } else { "FAIL" };
        out.push_str(&format!(
            "result: {verdict} ({} properties)\n",
            self.properties.len()
        ));
        out
    }
}

/// Run the whole suite over all trees and forests with at most `max_n`
/// vertices (per-property caps may clamp lower).
///
/// # Panics
///
/// Panics unless `1 <= max_n <= 6`.
pub fn run_sweep(max_n: usize, grid_offset: i64) -> SweepReport {
    assert!((1..=6).contains(&max_n), "sweep bound must be 1..=6");
    let counts = (1..=max_n)
        .map(|n| {
            let labels = alphabet_labels(n);
            CountRow {
                n,
                trees: enumerate_trees(&labels).count() as u64,
                trees_expected: tree_count(n),
                forests: enumerate_forests(&labels).count() as u64,
                forests_expected: forest_count(n),
            }
        })
        .collect();
    let properties = vec![
        freeness_property(max_n.min(5), grid_offset),
        logarithmic_property(max_n.min(6)),
        duality_property(max_n.min(4), grid_offset),
        flats_property(max_n.min(5)),
        char_poly_property(max_n.min(5)),
        chambers_property(max_n.min(6)),
        cardinality_property(max_n.min(6)),
        coalgebra_property(max_n.min(4)),
        isomorphism_property(max_n.min(4)),
        chordality_property(max_n.min(6)),
        relations_property(max_n.min(6)),
    ];
    SweepReport {
        max_n,
        grid_offset,
        counts,
        properties,
    }
}

fn for_each_tree(
    bound: usize,
    mut check: impl FnMut(&RootedTree) -> Option<String>,
) -> (u64, Option<String>) {
    let mut seen = 0;
    for n in 1..=bound {
        for t in enumerate_trees(&alphabet_labels(n)) {
            seen += 1;
            if let Some(failure) = check(&t) {
                return (seen, Some(format!("counterexample {}: {failure}", t.render())));
            }
        }
    }
    (seen, None)
}

fn tree_property(
    name: &'static str,
    bound: usize,
    what: &str,
    check: impl FnMut(&RootedTree) -> Option<String>,
) -> PropertyResult {
    let (seen, failure) = for_each_tree(bound, check);
    match failure {
        Some(detail) => PropertyResult {
            name,
            bound,
            pass: false,
            detail,
        },
        None => PropertyResult {
            name,
            bound,
            pass: true,
            detail: format!("{what} on {seen} trees"),
        },
    }
}

fn freeness_property(bound: usize, grid_offset: i64) -> PropertyResult {
    tree_property(
        "freeness determinant",
        bound,
        "determinant certificates and depth exponents",
        |t| {
            let arr = Arrangement::new(t.clone());
            let cert = saito_check(&arr, grid_offset);
            if !cert.pass {
                return Some(cert.witness);
            }
            let mut depths: Vec<usize> = (0..t.n()).map(|v| t.depth(v)).collect();
            depths.sort_unstable();
            if exponents(t) != depths {
                return Some("exponents differ from the depth multiset".to_string());
            }
            None
        },
    )
}

fn logarithmic_property(bound: usize) -> PropertyResult {
    tree_property(
        "logarithmic derivations and forms",
        bound,
        "all rows of both frames",
        |t| {
            let arr = Arrangement::new(t.clone());
            for i in 0..t.n() {
                if !field_is_logarithmic(&arr, &arr.theta(i)) {
                    return Some(format!("derivation row {} is not logarithmic", i));
                }
                if !omega_is_logarithmic(&arr, i) {
                    return Some(format!("form row {} is not logarithmic", i));
                }
            }
            None
        },
    )
}

fn duality_property(bound: usize, grid_offset: i64) -> PropertyResult {
    tree_property("duality pairings", bound, "all row pairings", |t| {
        let cert = duality_check(&Arrangement::new(t.clone()), grid_offset);
        if cert.pass {
            None
        } else {
            Some(cert.witness)
        }
    })
}

fn flats_property(bound: usize) -> PropertyResult {
    tree_property(
        "intersection lattice flats",
        bound,
        "lattice elements against brute-force flats",
        |t| {
            if build_lattice(t).partition_signatures() == brute_force_flats(t) {
                None
            } else {
                Some("lattice signatures differ from brute-force flats".to_string())
            }
        },
    )
}

fn char_poly_property(bound: usize) -> PropertyResult {
    tree_property(
        "characteristic polynomial agreement",
        bound,
        "interval computation against the depth product",
        |t| {
            let lat = build_lattice(t);
            if char_poly_mobius(&lat) == char_poly_product(t) {
                None
            } else {
                Some("interval and product characteristic polynomials differ".to_string())
            }
        },
    )
}

fn chambers_property(bound: usize) -> PropertyResult {
    tree_property(
        "chambers and acyclic orientations",
        bound,
        "chamber product, evaluation, and orientation counts",
        |t| {
            let chambers = chamber_count(t);
            let orientations = count_acyclic_orientations(&t.comparability_graph());
            let at_minus_one = char_poly_product(t)
                .eval_int(&BigInt::from(-1))
                .magnitude()
                .clone();
            if chambers != orientations {
                return Some(format!(
                    "chamber product {chambers} differs from {orientations} acyclic orientations"
                ));
            }
            if BigInt::from(chambers) != BigInt::from(at_minus_one) {
                return Some("chamber product differs from the evaluation at -1".to_string());
            }
            None
        },
    )
}

fn cardinality_property(bound: usize) -> PropertyResult {
    tree_property(
        "cardinality polynomial recursion",
        bound,
        "direct and recursive polynomials",
        |t| {
            if cardinality_poly(&build_lattice(t)) == cardinality_poly_recursive(t) {
                None
            } else {
                Some("direct and recursive cardinality polynomials differ".to_string())
            }
        },
    )
}

fn coalgebra_property(bound: usize) -> PropertyResult {
    let name = "coalgebra axioms";
    let mut seen = 0u64;
    for n in 1..=bound {
        let labels = alphabet_labels(n);
        let trivial = Forest::trivial(labels.clone());
        for f in enumerate_forests(&labels) {
            seen += 1;
            let x = CoalgebraElement::from_forest(&f);
            let delta = coproduct(&x);

            let mut flipped = TensorElement::zero(labels.clone(), 2);
            let mut left_counit = CoalgebraElement::zero(labels.clone());
            let mut right_counit = CoalgebraElement::zero(labels.clone());
            let mut disjoint = true;
            for (pair, &c) in delta.terms() {
                let d1 = pair[0].node_count();
                let d2 = pair[1].node_count();
                let sign = if (d1 * d2) % 2 == 0 { 1 } else { -1 };
                flipped.add_term(vec![pair[1].clone(), pair[0].clone()], c * sign);
                if pair[0] == trivial {
                    left_counit.add_term(pair[1].clone(), c);
                }
                if pair[1] == trivial {
                    right_counit.add_term(pair[0].clone(), c);
                }
                if !pair[0].node_set().is_disjoint(&pair[1].node_set()) {
                    disjoint = false;
                }
            }
            let fail = |reason: &str| PropertyResult {
                name,
                bound,
                pass: false,
                detail: format!("counterexample {}: {reason}", f.render()),
            };
            if flipped != delta {
                return fail("the coproduct is not graded cocommutative");
            }
            if left_counit != x || right_counit != x {
                return fail("a counit law fails");
            }
            if !disjoint {
                return fail("a tensor term has overlapping node sets");
            }
            if counit(&x) != i64::from(f.node_count() == 0) {
                return fail("the counit value is wrong");
            }
            let left = expand_slot(&delta, 0);
            if left != expand_slot(&delta, 1) {
                return fail("the coproduct is not coassociative");
            }
            for tuple in iterated_coproduct(&x, 3).terms().keys() {
                for slot in tuple {
                    if !slot.precedes(&f) {
                        return fail("an iterated term does not extend to the original order");
                    }
                }
            }
        }
    }
    PropertyResult {
        name,
        bound,
        pass: true,
        detail: format!("flip, counit, splitting, and ascent laws on {seen} forests"),
    }
}

fn isomorphism_property(bound: usize) -> PropertyResult {
    let name = "dual algebra isomorphism";
    for n in 1..=bound {
        let cert = iso_check(&alphabet_labels(n));
        if !cert.pass {
            return PropertyResult {
                name,
                bound,
                pass: false,
                detail: format!("counterexample at {n} labels: {}", cert.witness),
            };
        }
    }
    PropertyResult {
        name,
        bound,
        pass: true,
        detail: format!("transition matrices unimodular for 1..={bound} labels"),
    }
}

fn chordality_property(bound: usize) -> PropertyResult {
    tree_property(
        "chordal elimination orders",
        bound,
        "every linear extension eliminates perfectly",
        |t| {
            for order in linear_extensions(t) {
                if !check_chordal_peo(t, &order) {
                    return Some(format!("extension {order:?} fails to eliminate"));
                }
            }
            None
        },
    )
}

fn relations_property(bound: usize) -> PropertyResult {
    tree_property(
        "relation spanning",
        bound,
        "three-term relations span the kernel",
        |t| {
            let cert = relation_span_check(&Arrangement::new(t.clone()));
            if cert.pass {
                None
            } else {
                Some(cert.witness)
            }
        },
    )
}
