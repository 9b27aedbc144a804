//! Sparse multivariate polynomials and factored rational functions over the
//! integers.
//!
//! Polynomials are stored as maps from monomials to nonzero `BigInt`
//! coefficients, with monomials ordered in graded lexicographic order on
//! variable indices.  The rational functions that appear as coefficients of
//! logarithmic forms are never expanded: they are kept as a sign together
//! with numerator and denominator multisets of linear differences
//! `x_a - x_b`, which makes products, cancellations, and substitutions cheap
//! and exact.  Expansion to a `Polynomial` happens only at the few places
//! where an identity is decided by symbolic denominator clearing.
//!
//! There is no factorization, no Grobner machinery, and no floating point:
//! the only division ever needed is exact division, decided by repeated
//! leading-term elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Index into the ambient variable set (the label table of a tree).
pub type VarIdx = usize;

// ===========================================================================
// Monomial
// ===========================================================================

/// A monomial: finitely many variables with positive exponents.
///
/// The `Ord` implementation is graded lexicographic: higher total degree
/// first, ties broken by the exponent vector read from the smallest variable
/// index upward (larger exponent at the earliest differing variable wins).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: BTreeMap<VarIdx, u32>,
}

impl Monomial {
    /// The empty monomial (constant 1).
    pub fn one() -> Self {
        Monomial::default()
    }

    /// The monomial `x_v`.
    pub fn var(v: VarIdx) -> Self {
        let mut exps = BTreeMap::new();
        exps.insert(v, 1);
        Monomial { exps }
    }

    pub fn from_pairs(pairs: &[(VarIdx, u32)]) -> Self {
        let mut exps = BTreeMap::new();
        for &(v, e) in pairs {
            if e > 0 {
                *exps.entry(v).or_insert(0) += e;
            }
        }
        Monomial { exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.values().sum()
    }

    pub fn degree_of(&self, v: VarIdx) -> u32 {
        self.exps.get(&v).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (VarIdx, u32)> + '_ {
        self.exps.iter().map(|(&v, &e)| (v, e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            *exps.entry(v).or_insert(0) += e;
        }
        Monomial { exps }
    }

    /// Exact monomial quotient, or `None` when some exponent would go
    /// negative.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            let slot = exps.get_mut(&v)?;
            if *slot < e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                exps.remove(&v);
            }
        }
        Some(Monomial { exps })
    }

    /// Rename `from` to `to`, merging exponents (the substitution
    /// `x_from := x_to`).
    pub fn subst_var(&self, from: VarIdx, to: VarIdx) -> Monomial {
        match self.exps.get(&from) {
            None => self.clone(),
            Some(&e) => {
                let mut exps = self.exps.clone();
                exps.remove(&from);
                *exps.entry(to).or_insert(0) += e;
                Monomial { exps }
            }
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.exps.iter().peekable();
        let mut b = other.exps.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(&va, &ea)), Some(&(&vb, &eb))) => {
                    if va < vb {
                        return Ordering::Greater;
                    }
                    if va > vb {
                        return Ordering::Less;
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    a.next();
                    b.next();
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// ===========================================================================
// Polynomial
// ===========================================================================

/// Sparse multivariate polynomial with `BigInt` coefficients.
///
/// Invariant: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn variable(v: VarIdx) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(v), BigInt::one());
        p
    }

    /// The linear form `x_a - x_b`.
    pub fn linear_difference(a: VarIdx, b: VarIdx) -> Self {
        assert_ne!(a, b, "linear difference needs two distinct variables");
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(a), BigInt::one());
        p.add_term(Monomial::var(b), -BigInt::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Add `coeff * mono`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, mono: Monomial, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// `self * coeff * mono` in one pass.
    pub fn mul_term(&self, mono: &Monomial, coeff: &BigInt) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.mul(mono), c * coeff);
        }
        out
    }

    /// Leading term in graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn degree_of(&self, v: VarIdx) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_of(v))
            .max()
            .unwrap_or(0)
    }

    /// Exact division: `Some(q)` with `self = q * d`, or `None` when `d`
    /// does not divide `self` over the integers.  Proceeds by repeated
    /// elimination of the graded-lex leading term; any step that fails
    /// signals non-divisibility.
    ///
    /// # Panics
    ///
    /// Panics if `d` is the zero polynomial.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (dm, dc) = d.leading().expect("nonzero divisor has a leading term");
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.try_div(dm)?;
            let (qc, r) = num_integer_div_rem(rc, dc);
            if !r.is_zero() {
                return None;
            }
            quot.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&d.mul_term(&qm, &qc));
        }
        Some(quot)
    }

    /// Evaluate at a rational point; `point[v]` is the value of `x_v`.
    ///
    /// # Panics
    ///
    /// Panics if some variable of `self` has no assigned value.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (v, e) in m.exponents() {
                assert!(v < point.len(), "unassigned variable x_{v}");
                t *= rat_pow(&point[v], e);
            }
            acc += t;
        }
        acc
    }

    /// Evaluate at an integer point.
    pub fn eval_int(&self, point: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.exponents() {
                assert!(v < point.len(), "unassigned variable x_{v}");
                t *= int_pow(&point[v], e);
            }
            acc += t;
        }
        acc
    }

    /// The substitution `x_from := x_to`.
    pub fn subst_var(&self, from: VarIdx, to: VarIdx) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.subst_var(from, to), c.clone());
        }
        out
    }

    /// Render with a caller-supplied variable labeler, terms in descending
    /// graded-lex order, e.g. `x_a^2 - 2*x_a*x_b + x_b^2`.  The variable of
    /// label `l` prints as `x_l`.
    pub fn render(&self, name_of: &dyn Fn(VarIdx) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_monomial(m, name_of);
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&abs.to_string());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn render_monomial(m: &Monomial, name_of: &dyn Fn(VarIdx) -> String) -> String {
    let mut parts = Vec::new();
    for (v, e) in m.exponents() {
        if e == 1 {
            parts.push(format!("x_{}", name_of(v)));
        } else {
            parts.push(format!("x_{}^{}", name_of(v), e));
        }
    }
    parts.join("*")
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let q = a / b;
    let r = a - &q * b;
    (q, r)
}

fn rat_pow(base: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

fn int_pow(base: &BigInt, e: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

// ===========================================================================
// Linear differences and factored rationals
// ===========================================================================

/// The linear form `x_plus - x_minus` with `plus != minus`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinearDifference {
    pub plus: VarIdx,
    pub minus: VarIdx,
}

impl LinearDifference {
    pub fn new(plus: VarIdx, minus: VarIdx) -> Self {
        assert_ne!(plus, minus, "degenerate linear difference x_v - x_v");
        LinearDifference { plus, minus }
    }

    pub fn to_poly(self) -> Polynomial {
        Polynomial::linear_difference(self.plus, self.minus)
    }

    pub fn eval(self, point: &[BigRational]) -> BigRational {
        &point[self.plus] - &point[self.minus]
    }

    pub fn eval_int(self, point: &[BigInt]) -> BigInt {
        &point[self.plus] - &point[self.minus]
    }

    pub fn render(self, name_of: &dyn Fn(VarIdx) -> String) -> String {
        format!("(x_{} - x_{})", name_of(self.plus), name_of(self.minus))
    }
}

/// A rational function kept in factored form: a sign together with numerator
/// and denominator multisets of linear differences.
///
/// Canonical form: every factor is stored with `plus < minus` (flipping the
/// sign when necessary), both multisets are sorted, and no factor occurs in
/// both the numerator and the denominator.  Zero is `sign == 0` with both
/// multisets empty, so structural equality decides equality of the rational
/// functions they denote.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactoredRational {
    sign: i8,
    numer: Vec<LinearDifference>,
    denom: Vec<LinearDifference>,
}

impl FactoredRational {
    pub fn zero() -> Self {
        FactoredRational {
            sign: 0,
            numer: Vec::new(),
            denom: Vec::new(),
        }
    }

    pub fn one() -> Self {
        FactoredRational {
            sign: 1,
            numer: Vec::new(),
            denom: Vec::new(),
        }
    }

    /// Build from raw parts and canonicalize.
    pub fn new(
        sign: i8,
        numer: impl IntoIterator<Item = LinearDifference>,
        denom: impl IntoIterator<Item = LinearDifference>,
    ) -> Self {
        assert!(sign == -1 || sign == 0 || sign == 1, "sign must be 0 or ±1");
        if sign == 0 {
            return FactoredRational::zero();
        }
        let mut s = sign;
        let mut num: Vec<LinearDifference> = Vec::new();
        for f in numer {
            num.push(canonical_factor(f, &mut s));
        }
        let mut den: Vec<LinearDifference> = Vec::new();
        for f in denom {
            den.push(canonical_factor(f, &mut s));
        }
        num.sort();
        den.sort();
        cancel_common(&mut num, &mut den);
        FactoredRational {
            sign: s,
            numer: num,
            denom: den,
        }
    }

    /// Product of numerator factors only.
    pub fn from_numerator(factors: impl IntoIterator<Item = LinearDifference>) -> Self {
        FactoredRational::new(1, factors, std::iter::empty())
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn numer(&self) -> &[LinearDifference] {
        &self.numer
    }

    pub fn denom(&self) -> &[LinearDifference] {
        &self.denom
    }

    /// True when the denominator is empty (the function is a polynomial).
    pub fn is_polynomial(&self) -> bool {
        self.denom.is_empty()
    }

    pub fn mul(&self, other: &FactoredRational) -> FactoredRational {
        if self.is_zero() || other.is_zero() {
            return FactoredRational::zero();
        }
        FactoredRational::new(
            self.sign * other.sign,
            self.numer.iter().chain(&other.numer).copied(),
            self.denom.iter().chain(&other.denom).copied(),
        )
    }

    pub fn neg(&self) -> FactoredRational {
        let mut out = self.clone();
        out.sign = -out.sign;
        out
    }

    /// Divide by a single linear factor.
    pub fn over_factor(&self, f: LinearDifference) -> FactoredRational {
        if self.is_zero() {
            return FactoredRational::zero();
        }
        FactoredRational::new(
            self.sign,
            self.numer.iter().copied(),
            self.denom.iter().copied().chain(std::iter::once(f)),
        )
    }

    /// Multiply by a single linear factor.
    pub fn times_factor(&self, f: LinearDifference) -> FactoredRational {
        if self.is_zero() {
            return FactoredRational::zero();
        }
        FactoredRational::new(
            self.sign,
            self.numer.iter().copied().chain(std::iter::once(f)),
            self.denom.iter().copied(),
        )
    }

    /// Expand into a `Polynomial`.
    ///
    /// # Panics
    ///
    /// Panics when the denominator is nonempty.
    pub fn expand(&self) -> Polynomial {
        assert!(
            self.is_polynomial(),
            "cannot expand a factored rational with a nonempty denominator"
        );
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut acc = Polynomial::constant(BigInt::from(self.sign));
        for f in &self.numer {
            acc = acc.mul(&f.to_poly());
        }
        acc
    }

    /// Evaluate at a rational point.
    ///
    /// # Panics
    ///
    /// Panics when a denominator factor vanishes at the point.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut acc = BigRational::from_integer(BigInt::from(self.sign));
        for f in &self.numer {
            acc *= f.eval(point);
        }
        for f in &self.denom {
            let d = f.eval(point);
            assert!(!d.is_zero(), "denominator factor vanishes at the point");
            acc /= d;
        }
        acc
    }

    /// The substitution `x_from := x_to`.  A numerator factor that collapses
    /// makes the whole function zero.
    ///
    /// # Panics
    ///
    /// Panics when a denominator factor collapses (a pole of the
    /// substituted function).
    pub fn subst_var(&self, from: VarIdx, to: VarIdx) -> FactoredRational {
        if self.is_zero() {
            return FactoredRational::zero();
        }
        let sub = |f: &LinearDifference| -> Option<LinearDifference> {
            let p = if f.plus == from { to } else { f.plus };
            let m = if f.minus == from { to } else { f.minus };
            if p == m {
                None
            } else {
                Some(LinearDifference::new(p, m))
            }
        };
        let mut num = Vec::with_capacity(self.numer.len());
        for f in &self.numer {
            match sub(f) {
                Some(g) => num.push(g),
                None => return FactoredRational::zero(),
            }
        }
        let den: Vec<_> = self
            .denom
            .iter()
            .map(|f| sub(f).expect("substitution collapses a denominator factor"))
            .collect();
        FactoredRational::new(self.sign, num, den)
    }

    /// Render as a product of factors, e.g. `(x_a - x_b)(x_a - x_c)` or
    /// `-1/((x_a - x_b))`.
    pub fn render(&self, name_of: &dyn Fn(VarIdx) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let numer: String = self.numer.iter().map(|f| f.render(name_of)).collect();
        let denom: String = self.denom.iter().map(|f| f.render(name_of)).collect();
        let head = if numer.is_empty() {
            (if self.sign < 0 { "-1" } else { "1" }).to_string()
        } else if self.sign < 0 {
            format!("-{numer}")
        } else {
            numer
        };
        if denom.is_empty() {
            head
        } else {
            format!("{head}/({denom})")
        }
    }
}

fn canonical_factor(f: LinearDifference, sign: &mut i8) -> LinearDifference {
    if f.plus < f.minus {
        f
    } else {
        *sign = -*sign;
        LinearDifference::new(f.minus, f.plus)
    }
}

fn cancel_common(num: &mut Vec<LinearDifference>, den: &mut Vec<LinearDifference>) {
    let mut out_num = Vec::with_capacity(num.len());
    let mut out_den = Vec::with_capacity(den.len());
    let mut i = 0;
    let mut j = 0;
    while i < num.len() && j < den.len() {
        match num[i].cmp(&den[j]) {
            Ordering::Less => {
                out_num.push(num[i]);
                i += 1;
            }
            Ordering::Greater => {
                out_den.push(den[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out_num.extend_from_slice(&num[i..]);
    out_den.extend_from_slice(&den[j..]);
    *num = out_num;
    *den = out_den;
}

/// Multiset union-with-maximum-multiplicity of two sorted factor lists (the
/// least common multiple of two squarefree-by-factor products).
pub fn multiset_lcm(a: &[LinearDifference], b: &[LinearDifference]) -> Vec<LinearDifference> {
    let mut out = Vec::new();
    let mut i = 0;
    let mut j = 0;
    while i < a.len() || j < b.len() {
        if i == a.len() {
            out.push(b[j]);
            j += 1;
            continue;
        }
        if j == b.len() {
            out.push(a[i]);
            i += 1;
            continue;
        }
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                // same factor: count multiplicities on both sides, keep max
                let f = a[i];
                let mut ca = 0;
                while i < a.len() && a[i] == f {
                    ca += 1;
                    i += 1;
                }
                let mut cb = 0;
                while j < b.len() && b[j] == f {
                    cb += 1;
                    j += 1;
                }
                for _ in 0..ca.max(cb) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Multiset difference `a \ b` of sorted factor lists.
///
/// # Panics
///
/// Panics when `b` is not a sub-multiset of `a`.
pub fn multiset_diff(a: &[LinearDifference], b: &[LinearDifference]) -> Vec<LinearDifference> {
    let mut out = Vec::new();
    let mut j = 0;
    for &f in a {
        if j < b.len() && b[j] == f {
            j += 1;
        } else {
            out.push(f);
        }
    }
    assert_eq!(j, b.len(), "multiset difference of a non-sub-multiset");
    out
}

/// Expand a factor list into a polynomial.
pub fn expand_factors(factors: &[LinearDifference]) -> Polynomial {
    let mut acc = Polynomial::one();
    for f in factors {
        acc = acc.mul(&f.to_poly());
    }
    acc
}

// ===========================================================================
// Univariate and bivariate polynomials
// ===========================================================================

/// Dense univariate polynomial with `BigInt` coefficients (used for
/// characteristic polynomials in the variable `y`).
///
/// Invariant: no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UniPoly {
    coeffs: Vec<BigInt>, // coeffs[k] multiplies y^k
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn one() -> Self {
        UniPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn add_scaled_power(&self, c: &BigInt, k: usize) -> UniPoly {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() <= k {
            coeffs.resize(k + 1, BigInt::zero());
        }
        coeffs[k] += c;
        UniPoly::from_coeffs(coeffs)
    }

    /// Multiply by the linear factor `y - c`.
    pub fn mul_linear(&self, c: &BigInt) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            coeffs[k + 1] += a;
            coeffs[k] -= a * c;
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// `prod_k (y - roots[k])`.
    pub fn from_roots(roots: &[BigInt]) -> UniPoly {
        let mut acc = UniPoly::one();
        for r in roots {
            acc = acc.mul_linear(r);
        }
        acc
    }

    pub fn eval_int(&self, y: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc
    }

    /// Render in descending powers, e.g. `y^3 - 3*y^2 + 2*y`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let var_part = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if var_part.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&var_part);
            } else {
                out.push_str(&format!("{abs}*{var_part}"));
            }
        }
        out
    }
}

/// Sparse bivariate polynomial in `y` and `z` with `BigInt` coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigInt>, // (deg_y, deg_z) -> coeff
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn one() -> Self {
        BiPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = BiPoly::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn monomial(dy: u32, dz: u32) -> Self {
        let mut p = BiPoly::zero();
        p.add_term(dy, dz, BigInt::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, dy: u32, dz: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((dy, dz)).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(dy, dz));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &BigInt)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(dy, dz), c) in &other.terms {
            out.add_term(dy, dz, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(ay, az), ac) in &self.terms {
            for (&(by, bz), bc) in &other.terms {
                out.add_term(ay + by, az + bz, ac * bc);
            }
        }
        out
    }

    /// The substitution `z := z + 1`, expanded by binomials.
    pub fn subst_z_plus_one(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(dy, dz), c) in &self.terms {
            // (z + 1)^dz = sum_k C(dz, k) z^k
            let mut binom = BigInt::one();
            for k in 0..=dz {
                out.add_term(dy, k, c * &binom);
                // next binomial coefficient C(dz, k+1)
                binom = &binom * BigInt::from(dz - k) / BigInt::from(k + 1);
            }
        }
        out
    }

    pub fn eval_int(&self, y: &BigInt, z: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for (&(dy, dz), c) in &self.terms {
            acc += c * int_pow(y, dy) * int_pow(z, dz);
        }
        acc
    }

    /// Render with terms in descending graded-lex order (`y` before `z`),
    /// e.g. `y^2 + 2*y*z + z^2 + y`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| {
            let (ay, az) = *a;
            let (by, bz) = *b;
            (ay + az, ay).cmp(&(by + bz, by)).reverse()
        });
        let mut out = String::new();
        for (dy, dz) in keys {
            let c = &self.terms[&(dy, dz)];
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut parts = Vec::new();
            match dy {
                0 => {}
                1 => parts.push("y".to_string()),
                _ => parts.push(format!("y^{dy}")),
            }
            match dz {
                0 => {}
                1 => parts.push("z".to_string()),
                _ => parts.push(format!("z^{dz}")),
            }
            let var_part = parts.join("*");
            if var_part.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&var_part);
            } else {
                out.push_str(&format!("{abs}*{var_part}"));
            }
        }
        out
    }
}

// ===========================================================================
// Small exact linear algebra
// ===========================================================================

/// Exact linear algebra helpers for the verification routines.  Dimensions
/// are tiny (at most a few hundred), so simple cubic algorithms are fine.
pub mod linalg {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    /// Determinant by fraction-free (Bareiss) elimination with row pivoting.
    pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
        let n = m.len();
        for row in &m {
            assert_eq!(row.len(), n, "determinant of a non-square matrix");
        }
        if n == 0 {
            return BigInt::one();
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = t / &prev; // exact by the Bareiss identity
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }

    /// Determinant over `i128` with overflow detection: `None` means some
    /// intermediate value did not fit and the caller should fall back to
    /// `bareiss_det`.
    pub fn bareiss_det_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
        let n = m.len();
        if n == 0 {
            return Some(1);
        }
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..n - 1 {
            if m[k][k] == 0 {
                match (k + 1..n).find(|&r| m[r][k] != 0) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Some(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let a = m[i][j].checked_mul(m[k][k])?;
                    let b = m[i][k].checked_mul(m[k][j])?;
                    m[i][j] = a.checked_sub(b)? / prev;
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        sign.checked_mul(m[n - 1][n - 1])
    }

    /// Rank by exact rational Gaussian elimination.
    pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
        let mut m: Vec<Vec<BigRational>> = rows.to_vec();
        let nrows = m.len();
        let ncols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let (pivot_rows, rest) = m.split_at_mut(rank + 1);
            let pivot_row = &pivot_rows[rank];
            for row in rest.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] / &pivot_row[col];
                for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    let delta = &factor * src;
                    *dst -= delta;
                }
            }
            rank += 1;
            if rank == nrows {
                break;
            }
        }
        rank
    }

    /// Rank of an integer matrix (over the rationals).
    pub fn rank_int(rows: &[Vec<BigInt>]) -> usize {
        let rat: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|c| BigRational::from_integer(c.clone())).collect())
            .collect();
        rank_rational(&rat)
    }
}

// ===========================================================================
// Tests
// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn name(v: VarIdx) -> String {
        // variables named a, b, c, ... for readable assertions
        char::from(b'a' + v as u8).to_string()
    }

    fn ld(a: VarIdx, b: VarIdx) -> LinearDifference {
        LinearDifference::new(a, b)
    }

    #[test]
    fn grlex_orders_degree_first() {
        let x0 = Monomial::var(0);
        let x1 = Monomial::var(1);
        let x0x0 = x0.mul(&x0);
        assert!(x0x0 > x0);
        assert!(x0 > x1); // same degree: earlier variable wins
        assert!(x0.mul(&x1) < x0x0);
        assert!(Monomial::one() < x1);
    }

    #[test]
    fn add_cancels_to_zero() {
        let p = Polynomial::linear_difference(0, 1);
        let q = Polynomial::linear_difference(1, 0);
        assert!(p.add(&q).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let sum = Polynomial::variable(0).add(&Polynomial::variable(1));
        let diff = Polynomial::linear_difference(0, 1);
        let prod = sum.mul(&diff);
        let mut expect = Polynomial::zero();
        expect.add_term(Monomial::from_pairs(&[(0, 2)]), BigInt::one());
        expect.add_term(Monomial::from_pairs(&[(1, 2)]), -BigInt::one());
        assert_eq!(prod, expect);
        assert_eq!(prod.render(&|v| name(v)), "x_a^2 - x_b^2");
    }

    #[test]
    fn exact_division_recovers_factor() {
        let d = Polynomial::linear_difference(0, 1);
        let q = Polynomial::linear_difference(0, 2);
        let p = d.mul(&q);
        assert_eq!(p.div_exact(&d), Some(q.clone()));
        assert_eq!(p.div_exact(&q), Some(d.clone()));
        // x_0 - x_2 is not divisible by x_0 - x_1
        assert_eq!(q.div_exact(&d), None);
    }

    #[test]
    fn division_detects_non_integer_quotient() {
        let p = Polynomial::variable(0);
        let d = Polynomial::variable(0).scale(&BigInt::from(2));
        assert_eq!(p.div_exact(&d), None);
        assert_eq!(d.div_exact(&Polynomial::variable(0)), Some(Polynomial::constant(BigInt::from(2))));
    }

    #[test]
    #[should_panic(expected = "zero polynomial")]
    fn division_by_zero_rejected() {
        let _ = Polynomial::one().div_exact(&Polynomial::zero());
    }

    #[test]
    fn eval_at_rational_point() {
        // (x_0 - x_1)(x_0 - x_2) at (3, 1, 2) = 2 * 1 = 2
        let p = Polynomial::linear_difference(0, 1).mul(&Polynomial::linear_difference(0, 2));
        let pt: Vec<BigRational> = [3, 1, 2]
            .iter()
            .map(|&k| BigRational::from_integer(BigInt::from(k)))
            .collect();
        assert_eq!(p.eval(&pt), BigRational::from_integer(BigInt::from(2)));
        let ipt: Vec<BigInt> = [3, 1, 2].iter().map(|&k| BigInt::from(k)).collect();
        assert_eq!(p.eval_int(&ipt), BigInt::from(2));
    }

    #[test]
    fn subst_var_merges_exponents() {
        // x_0 * x_1 with x_1 := x_0 becomes x_0^2
        let p = Polynomial::variable(0).mul(&Polynomial::variable(1));
        let mut expect = Polynomial::zero();
        expect.add_term(Monomial::from_pairs(&[(0, 2)]), BigInt::one());
        assert_eq!(p.subst_var(1, 0), expect);
        // x_0 - x_1 collapses to zero
        assert!(Polynomial::linear_difference(0, 1).subst_var(1, 0).is_zero());
    }

    #[test]
    fn factored_canonicalization_flips_and_cancels() {
        // (x_1 - x_0) canonicalizes to -(x_0 - x_1)
        let f = FactoredRational::from_numerator([ld(1, 0)]);
        assert_eq!(f.sign(), -1);
        assert_eq!(f.numer(), &[ld(0, 1)]);
        // (x_0 - x_1)/(x_1 - x_0) = -1
        let g = FactoredRational::new(1, [ld(0, 1)], [ld(1, 0)]);
        assert_eq!(g.sign(), -1);
        assert!(g.numer().is_empty() && g.denom().is_empty());
    }

    #[test]
    fn factored_multiplication_cancels() {
        let a = FactoredRational::new(1, [ld(0, 1)], [ld(0, 2)]);
        let b = FactoredRational::new(1, [ld(0, 2)], [ld(1, 2)]);
        let p = a.mul(&b);
        assert_eq!(p.numer(), &[ld(0, 1)]);
        assert_eq!(p.denom(), &[ld(1, 2)]);
        assert!(a.mul(&FactoredRational::zero()).is_zero());
    }

    #[test]
    fn factored_expand_and_render() {
        let q = FactoredRational::from_numerator([ld(0, 1), ld(0, 2), ld(1, 2)]);
        let p = q.expand();
        assert_eq!(p.total_degree(), 3);
        assert_eq!(q.render(&|v| name(v)), "(x_a - x_b)(x_a - x_c)(x_b - x_c)");
        assert_eq!(FactoredRational::one().render(&|v| name(v)), "1");
        let w = FactoredRational::new(-1, [], [ld(0, 1)]);
        assert_eq!(w.render(&|v| name(v)), "-1/((x_a - x_b))");
    }

    #[test]
    #[should_panic(expected = "nonempty denominator")]
    fn expand_rejects_denominator() {
        let f = FactoredRational::new(1, [], [ld(0, 1)]);
        let _ = f.expand();
    }

    #[test]
    fn factored_subst_kills_numerator() {
        let f = FactoredRational::from_numerator([ld(0, 1), ld(0, 2)]);
        assert!(f.subst_var(1, 0).is_zero());
        let g = f.subst_var(2, 1);
        assert_eq!(g.numer(), &[ld(0, 1), ld(0, 1)]);
    }

    #[test]
    fn multiset_helpers() {
        let a = vec![ld(0, 1), ld(0, 1), ld(0, 2)];
        let b = vec![ld(0, 1), ld(1, 2)];
        assert_eq!(
            multiset_lcm(&a, &b),
            vec![ld(0, 1), ld(0, 1), ld(0, 2), ld(1, 2)]
        );
        assert_eq!(multiset_diff(&a, &[ld(0, 1)]), vec![ld(0, 1), ld(0, 2)]);
    }

    #[test]
    fn unipoly_from_roots_and_eval() {
        // (y - 0)(y - 1)(y - 2) = y^3 - 3y^2 + 2y
        let p = UniPoly::from_roots(&[BigInt::from(0), BigInt::from(1), BigInt::from(2)]);
        assert_eq!(p.render("y"), "y^3 - 3*y^2 + 2*y");
        assert_eq!(p.eval_int(&BigInt::from(-1)), BigInt::from(-6));
        assert_eq!(p.coeff(1), BigInt::from(2));
    }

    #[test]
    fn bipoly_subst_and_render() {
        // (y + z)^2 = y^2 + 2yz + z^2
        let s = BiPoly::monomial(1, 0).add(&BiPoly::monomial(0, 1));
        let sq = s.mul(&s);
        assert_eq!(sq.render(), "y^2 + 2*y*z + z^2");
        // z^2 with z := z + 1 gives z^2 + 2z + 1
        let z2 = BiPoly::monomial(0, 2);
        assert_eq!(z2.subst_z_plus_one().render(), "z^2 + 2*z + 1");
        assert_eq!(
            sq.eval_int(&BigInt::from(1), &BigInt::from(1)),
            BigInt::from(4)
        );
    }

    #[test]
    fn bareiss_small_determinants() {
        let m = vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(3), BigInt::from(4)],
        ];
        assert_eq!(linalg::bareiss_det(m), BigInt::from(-2));
        // needs a row swap
        let m = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(linalg::bareiss_det(m), BigInt::from(-1));
        let m = vec![
            vec![BigInt::from(1), BigInt::from(1)],
            vec![BigInt::from(2), BigInt::from(2)],
        ];
        assert_eq!(linalg::bareiss_det(m), BigInt::from(0));
        assert_eq!(linalg::bareiss_det(Vec::new()), BigInt::from(1));
    }

    #[test]
    fn i128_determinant_matches_bigint() {
        let rows = [vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]];
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let a = linalg::bareiss_det_i128(rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
        assert_eq!(a, Some(-90));
        assert_eq!(linalg::bareiss_det(big), BigInt::from(-90));
    }

    #[test]
    fn rational_rank() {
        use num_rational::BigRational;
        let q = |k: i64| BigRational::from_integer(BigInt::from(k));
        // rank 2: third row is the sum of the first two
        let rows = vec![
            vec![q(1), q(-1), q(0)],
            vec![q(0), q(1), q(-1)],
            vec![q(1), q(0), q(-1)],
        ];
        assert_eq!(linalg::rank_rational(&rows), 2);
        assert_eq!(linalg::rank_rational(&[]), 0);
    }

    // -----------------------------------------------------------------
    // property tests
    // -----------------------------------------------------------------

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        // up to 5 terms in 3 variables, exponents <= 2, coefficients in ±9
        proptest::collection::vec(
            (
                proptest::collection::vec((0usize..3, 0u32..3), 0..3),
                -9i64..10,
            ),
            0..5,
        )
        .prop_map(|terms| {
            let mut p = Polynomial::zero();
            for (pairs, c) in terms {
                p.add_term(Monomial::from_pairs(&pairs), BigInt::from(c));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
            prop_assert_eq!(a.mul(&Polynomial::one()), a.clone());
        }

        #[test]
        fn division_round_trip(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let p = a.mul(&b);
            let q = p.div_exact(&b);
            prop_assert_eq!(q, Some(a));
        }

        #[test]
        fn factored_canonical_idempotent(
            pairs in proptest::collection::vec((0usize..4, 0usize..4), 0..4),
            dens in proptest::collection::vec((0usize..4, 0usize..4), 0..3),
        ) {
            let numer: Vec<LinearDifference> = pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| LinearDifference::new(a, b))
                .collect();
            let denom: Vec<LinearDifference> = dens
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| LinearDifference::new(a, b))
                .collect();
            let f = FactoredRational::new(1, numer.iter().copied(), denom.iter().copied());
            let again = FactoredRational::new(f.sign(), f.numer().iter().copied(), f.denom().iter().copied());
            prop_assert_eq!(f, again);
        }

        #[test]
        fn factored_mul_matches_expand(
            pa in proptest::collection::vec((0usize..4, 0usize..4), 0..4),
            pb in proptest::collection::vec((0usize..4, 0usize..4), 0..4),
        ) {
            let fa: Vec<_> = pa.into_iter().filter(|(a, b)| a != b).map(|(a, b)| ld(a, b)).collect();
            let fb: Vec<_> = pb.into_iter().filter(|(a, b)| a != b).map(|(a, b)| ld(a, b)).collect();
            let a = FactoredRational::from_numerator(fa);
            let b = FactoredRational::from_numerator(fb);
            prop_assert_eq!(a.mul(&b).expand(), a.expand().mul(&b.expand()));
        }
    }
}
