//! Pass/fail certificates for the verification routines.
//!
//! Every check that certifies a nontrivial identity (determinant formulas,
//! duality pairings, lattice isomorphisms, spanning statements) reports its
//! outcome through a [`Certificate`]: the claim that was tested, whether it
//! held, and a short witness string with the numbers that make the outcome
//! reproducible (unit constants, grid sizes, dimensions).  A failed
//! certificate carries the first counterexample encountered.

use std::fmt;

/// Outcome of one verification routine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// What was checked, in one sentence.
    pub claim: String,
    /// Whether the claim held.
    pub pass: bool,
    /// Reproducibility data: unit constants, grid sizes, dimensions, or the
    /// first counterexample on failure.
    pub witness: String,
}

impl Certificate {
    pub fn new(claim: impl Into<String>, pass: bool, witness: impl Into<String>) -> Self {
        Certificate {
            claim: claim.into(),
            pass,
            witness: witness.into(),
        }
    }

    pub fn status(&self) -> &'static str {
        if self.pass {
            "pass"
        } else {
            "fail"
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claim: {}", self.claim)?;
        writeln!(f, "status: {}", self.status())?;
        write!(f, "witness: {}", self.witness)
    }
}
