//! The coinvariant algebra `Q[x_1..x_n] / (e_1, .., e_n)` with its `S_n` action.
//!
//! This is `H*(U(n)/T)` with `x_i` in topological degree 2. Elements are kept in
//! the Artin basis `x^a`, `a_i <= n - i` (1-based). Normal forms use the
//! Gröbner basis `g_i = h_{n-i+1}(x_1, .., x_i)` for the lex order
//! `x_n > .. > x_1`, whose leading monomials `x_i^{n-i+1}` are pairwise coprime.
//!
//! Invariant dimensions of mixing spaces `G/T ×_W X` are computed by averaging
//! products of graded characters over a subgroup of `S_n`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::liecat::{t2_orbits, GroupId, WeylOrbit};
use crate::perm::{Perm, PermGroup};
use crate::series::{rat, Rational, RationalPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoinvError {
    #[error("permutation set of order {0} is not closed under composition")]
    NotClosed(usize),
    #[error(
        "averaged invariant dimension in degree {degree} is {value}, not a nonnegative integer"
    )]
    NotADimension { degree: usize, value: String },
    #[error("character family acts on {found} letters, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },
}

pub type Exponent = Vec<u32>;

/// Polynomial in `x_1..x_n` with rational coefficients; zero terms are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    n: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl MPoly {
    pub fn zero(n: usize) -> Self {
        MPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::term(n, vec![0; n], c)
    }

    pub fn term(n: usize, exponent: Exponent, c: Rational) -> Self {
        assert_eq!(exponent.len(), n);
        let mut p = Self::zero(n);
        p.add_term(exponent, c);
        p
    }

    /// `x_i`, 0-based.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::term(n, e, rat(1))
    }

    pub fn monomial(exponent: &[u32]) -> Self {
        Self::term(exponent.len(), exponent.to_vec(), rat(1))
    }

    /// `Σ c_i x_i`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Elementary symmetric polynomial `e_k(x_1..x_n)`.
    pub fn elementary(n: usize, k: usize) -> Self {
        let mut p = Self::zero(n);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                p.add_term((0..n).map(|i| (mask >> i) & 1).collect(), rat(1));
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exponent: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        let mut out = Self::zero(self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        (0..k).fold(Self::constant(self.n, rat(1)), |acc, _| acc.mul(self))
    }

    /// Substitute `x_i ↦ x_{w(i)}`.
    pub fn substitute(&self, w: &Perm) -> MPoly {
        assert_eq!(w.degree(), self.n);
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut image = vec![0; self.n];
            for (i, &a) in e.iter().enumerate() {
                image[w.image(i)] = a;
            }
            out.add_term(image, c.clone());
        }
        out
    }
}

/// Upper bound on the exponent of `x_i` (0-based) in the Artin basis.
fn artin_bound(n: usize, i: usize) -> u32 {
    (n - 1 - i) as u32
}

/// All exponent vectors of length `len` summing to `total`.
fn compositions(len: usize, total: u32, bounds: Option<&dyn Fn(usize) -> u32>) -> Vec<Exponent> {
    fn go(
        idx: usize,
        len: usize,
        left: u32,
        bounds: Option<&dyn Fn(usize) -> u32>,
        cur: &mut Exponent,
        out: &mut Vec<Exponent>,
    ) {
        if idx == len {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let cap = bounds.map_or(left, |b| b(idx).min(left));
        for a in 0..=cap {
            cur.push(a);
            go(idx + 1, len, left - a, bounds, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(
        0,
        len,
        total,
        bounds,
        &mut Vec::with_capacity(len),
        &mut out,
    );
    out
}

/// Artin basis monomials of algebraic degree `degree`.
pub fn artin_basis(n: usize, degree: usize) -> Vec<Exponent> {
    let bound = move |i: usize| artin_bound(n, i);
    compositions(n, degree as u32, Some(&bound))
}

/// Top algebraic degree `n(n-1)/2`.
pub fn top_degree(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `dim` of each algebraic degree `0..=top_degree(n)`.
pub fn artin_dimensions(n: usize) -> Vec<usize> {
    (0..=top_degree(n))
        .map(|d| artin_basis(n, d).len())
        .collect()
}

/// Rewrite rule for `x_j^{n-j}` (0-based): the tail `x_j^{n-j} - h_{n-j}(x_0..x_j)`,
/// i.e. minus every other monomial of the complete homogeneous polynomial.
fn rewrite_tail(n: usize, j: usize) -> Vec<Exponent> {
    let k = (n - j) as u32;
    compositions(j + 1, k, None)
        .into_iter()
        .filter(|e| e[j] != k)
        .map(|mut e| {
            e.resize(n, 0);
            e
        })
        .collect()
}

/// Element of the coinvariant algebra in Artin normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinvariantElement {
    n: usize,
    terms: BTreeMap<Exponent, Rational>,
}

/// Normal form of `p` modulo the symmetric ideal.
pub fn reduce(p: &MPoly) -> CoinvariantElement {
    let n = p.n;
    let tails: Vec<Vec<Exponent>> = (0..n).map(|j| rewrite_tail(n, j)).collect();
    // Keys are reversed exponents so that pop_last yields the lex-largest
    // monomial for x_n > .. > x_1 and cancellations happen before expansion.
    let mut pending: BTreeMap<Exponent, Rational> = p
        .terms
        .iter()
        .map(|(e, c)| (e.iter().rev().copied().collect(), c.clone()))
        .collect();
    let mut out = MPoly::zero(n);
    while let Some((rev, c)) = pending.pop_last() {
        if c.is_zero() {
            continue;
        }
        let mono: Exponent = rev.into_iter().rev().collect();
        let Some(j) = (0..n).rev().find(|&j| mono[j] > artin_bound(n, j)) else {
            out.add_term(mono, c);
            continue;
        };
        let mut base = mono.clone();
        base[j] -= (n - j) as u32;
        for t in &tails[j] {
            let key: Exponent = base.iter().zip(t).map(|(a, b)| a + b).rev().collect();
            *pending.entry(key).or_insert_with(Rational::zero) -= &c;
        }
    }
    CoinvariantElement {
        n,
        terms: out.terms,
    }
}

impl CoinvariantElement {
    pub fn zero(n: usize) -> Self {
        CoinvariantElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        reduce(&MPoly::constant(n, rat(1)))
    }

    pub fn basis(exponent: &[u32]) -> Self {
        reduce(&MPoly::monomial(exponent))
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, exponent: &[u32]) -> Rational {
        self.terms
            .get(exponent)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_mpoly(&self) -> MPoly {
        MPoly {
            n: self.n,
            terms: self.terms.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        reduce(&self.to_mpoly().add(&other.to_mpoly()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        reduce(&self.to_mpoly().mul(&other.to_mpoly()))
    }

    pub fn homogeneous_component(&self, degree: usize) -> Self {
        CoinvariantElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() as usize == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Every stored monomial satisfies the Artin bounds.
    pub fn is_normal(&self) -> bool {
        self.terms.keys().all(|e| {
            e.iter()
                .enumerate()
                .all(|(i, &a)| a <= artin_bound(self.n, i))
        })
    }
}

/// `x_i ↦ x_{w(i)}` followed by normalization.
pub fn permute(w: &Perm, e: &CoinvariantElement) -> CoinvariantElement {
    reduce(&e.to_mpoly().substitute(w))
}

/// Traces of one permutation on a graded space, indexed by topological degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedCharacter {
    pub element: Perm,
    #[serde(serialize_with = "crate::series::serialize_rationals")]
    pub traces: Vec<Rational>,
}

impl GradedCharacter {
    pub fn as_poly(&self) -> RationalPoly {
        RationalPoly::from_coeffs(self.traces.clone())
    }
}

/// Graded character of `w` on the coinvariant algebra (topological grading).
pub fn coinvariant_character(w: &Perm) -> GradedCharacter {
    let n = w.degree();
    let mut traces = vec![Rational::zero(); 2 * top_degree(n) + 1];
    for d in 0..=top_degree(n) {
        traces[2 * d] = artin_basis(n, d)
            .iter()
            .map(|b| permute(w, &CoinvariantElement::basis(b)).coefficient(b))
            .fold(Rational::zero(), |a, b| a + b);
    }
    GradedCharacter {
        element: w.clone(),
        traces,
    }
}

/// `det(1 + s·P_w)` for the permutation matrix: one factor `1 - (-s)^L` per cycle.
fn permutation_exterior_poly(w: &Perm) -> RationalPoly {
    w.cycle_type()
        .into_iter()
        .map(|len| {
            let sign = if len % 2 == 0 { -1 } else { 1 };
            RationalPoly::one() + RationalPoly::monomial(rat(sign), len)
        })
        .product()
}

/// Exact division by `1 + s`.
fn divide_by_one_plus_t(f: &RationalPoly) -> RationalPoly {
    let Some(deg) = f.degree() else {
        return RationalPoly::zero();
    };
    let mut q = vec![Rational::zero(); deg];
    let mut carry = Rational::zero();
    for (k, slot) in q.iter_mut().enumerate() {
        carry = f.coeff(k) - carry;
        *slot = carry.clone();
    }
    assert_eq!(carry, f.coeff(deg), "{f} is not divisible by 1 + t");
    RationalPoly::from_coeffs(q)
}

/// Character of `w` on the exterior algebra of the `(n-1)`-dimensional
/// reflection representation, `Λ^k` in degree `k`.
pub fn exterior_character(w: &Perm) -> GradedCharacter {
    assert!(w.degree() >= 2, "reflection representation needs n >= 2");
    let p = divide_by_one_plus_t(&permutation_exterior_poly(w));
    GradedCharacter {
        element: w.clone(),
        traces: (0..w.degree()).map(|k| p.coeff(k)).collect(),
    }
}

/// Same as [`exterior_character`] but on the full `n`-dimensional permutation
/// representation (the `U(n)` torus).
pub fn permutation_exterior_character(w: &Perm) -> GradedCharacter {
    let p = permutation_exterior_poly(w);
    GradedCharacter {
        element: w.clone(),
        traces: (0..=w.degree()).map(|k| p.coeff(k)).collect(),
    }
}

/// A graded representation of `S_n`, given by its character on each element.
pub trait CharacterFamily: Sync {
    fn degree(&self) -> usize;
    fn character(&self, w: &Perm) -> GradedCharacter;
}

/// `H*(U(n)/T)`.
#[derive(Clone, Copy, Debug)]
pub struct Coinvariants(pub usize);

/// `H*(T)` for the `SU(n)` torus.
#[derive(Clone, Copy, Debug)]
pub struct ReflectionExterior(pub usize);

/// `H*(T)` for the `U(n)` torus.
#[derive(Clone, Copy, Debug)]
pub struct PermutationExterior(pub usize);

impl CharacterFamily for Coinvariants {
    fn degree(&self) -> usize {
        self.0
    }
    fn character(&self, w: &Perm) -> GradedCharacter {
        coinvariant_character(w)
    }
}

impl CharacterFamily for ReflectionExterior {
    fn degree(&self) -> usize {
        self.0
    }
    fn character(&self, w: &Perm) -> GradedCharacter {
        exterior_character(w)
    }
}

impl CharacterFamily for PermutationExterior {
    fn degree(&self) -> usize {
        self.0
    }
    fn character(&self, w: &Perm) -> GradedCharacter {
        permutation_exterior_character(w)
    }
}

/// Poincaré polynomial of the `H`-invariants of the tensor product of the
/// factors: `(1/|H|) Σ_h ∏ χ(h)` in each degree.
pub fn invariant_series(
    subgroup: &PermGroup,
    factors: &[&dyn CharacterFamily],
) -> Result<RationalPoly, CoinvError> {
    if !subgroup.is_closed() {
        return Err(CoinvError::NotClosed(subgroup.order()));
    }
    for f in factors {
        if f.degree() != subgroup.degree() {
            return Err(CoinvError::DegreeMismatch {
                expected: subgroup.degree(),
                found: f.degree(),
            });
        }
    }
    let total: RationalPoly = subgroup
        .elements()
        .par_iter()
        .map(|h| {
            factors
                .iter()
                .map(|f| f.character(h).as_poly())
                .product::<RationalPoly>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let averaged = total.scale(&Rational::new(1.into(), subgroup.order().into()));
    for (degree, c) in averaged.coeffs().iter().enumerate() {
        if !c.is_integer() || c.is_negative() {
            return Err(CoinvError::NotADimension {
                degree,
                value: c.to_string(),
            });
        }
    }
    Ok(averaged)
}

/// Contribution of one Weyl orbit of the torus 2-torsion to `H*(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitContribution {
    pub orbit: WeylOrbit,
    pub poincare: RationalPoly,
}

/// `H*(G/T ×_W (T × T_2))` split by orbits of `W` on `T_2`: each orbit with
/// stabilizer `H` contributes `(H*(G/T) ⊗ H*(T))^H`.
pub fn mixing_breakdown(g: GroupId) -> Result<Vec<OrbitContribution>, CoinvError> {
    let n = g.n();
    let coinv = Coinvariants(n);
    let refl = ReflectionExterior(n);
    let perm = PermutationExterior(n);
    let exterior: &dyn CharacterFamily = if g.is_special() { &refl } else { &perm };
    t2_orbits(g)
        .into_iter()
        .map(|orbit| {
            let stabilizer = PermGroup::generate(n, &orbit.stabilizer_generators);
            let poincare = invariant_series(&stabilizer, &[&coinv, exterior])?;
            Ok(OrbitContribution { orbit, poincare })
        })
        .collect()
}

/// Poincaré polynomial of the commuting-pair stratum `A`.
pub fn pt_a(g: GroupId) -> Result<RationalPoly, CoinvError> {
    Ok(mixing_breakdown(g)?.into_iter().map(|c| c.poincare).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecat::{pt_full_flag, pt_torus};
    use crate::perm::all_perms;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c)
    }

    fn x(n: usize, i: usize) -> MPoly {
        MPoly::var(n, i)
    }

    #[test]
    fn artin_basis_counts() {
        assert_eq!(artin_dimensions(3), vec![1, 2, 2, 1]);
        assert_eq!(artin_basis(1, 0), vec![vec![0u32]]);
        assert!(artin_basis(1, 1).is_empty());
        // n! via brute force over the box ∏ [0, n-i]
        for n in 1..=5 {
            let factorial: usize = (1..=n).product();
            assert_eq!(artin_dimensions(n).iter().sum::<usize>(), factorial);
            let dims = artin_dimensions(n);
            assert!(dims.iter().eq(dims.iter().rev()), "palindromic for n={n}");
        }
    }

    #[test]
    fn symmetric_polynomials_vanish() {
        for n in 1..=5 {
            for k in 1..=n {
                assert!(reduce(&MPoly::elementary(n, k)).is_zero(), "e_{k} in n={n}");
            }
            // power sums too
            for k in 1..=n as u32 + 2 {
                let pk = (0..n).fold(MPoly::zero(n), |acc, i| acc.add(&x(n, i).pow(k)));
                assert!(reduce(&pk).is_zero());
            }
        }
        assert!(reduce(&x(3, 0).add(&x(3, 1)).add(&x(3, 2))).is_zero());
    }

    #[test]
    fn cube_consistency_two_paths() {
        let n = 3;
        let x1 = reduce(&x(n, 0));
        let direct = reduce(&x(n, 0).pow(3));
        let stepwise = x1.mul(&x1).mul(&x1);
        assert_eq!(direct, stepwise);
        assert!(direct.is_normal());
        // x_1^3 vanishes: x_1 is a root of ∏(T - x_i) = T^3 in the quotient.
        assert!(direct.is_zero());
    }

    #[test]
    fn top_degree_annihilation() {
        let n = 3;
        let top = CoinvariantElement::basis(&artin_basis(n, top_degree(n))[0]);
        assert!(!top.is_zero());
        let form = reduce(&x(n, 1).sub(&x(n, 0)));
        assert!(form.mul(&top).is_zero());
    }

    #[test]
    fn permute_basics() {
        let n = 3;
        let e = reduce(&x(n, 0).mul(&x(n, 1)).add(&x(n, 0)));
        assert_eq!(permute(&Perm::identity(n), &e), e);
        assert_eq!(
            permute(&Perm::transposition(n, 0, 1), &reduce(&x(n, 0))),
            reduce(&x(n, 1))
        );
    }

    // Σ_d tr(w | C_d) q^d = ∏_{i=1}^n (1 - q^i) / det(1 - q P_w), computed with
    // machine integers by series division.
    fn graded_trace_oracle(w: &Perm) -> Vec<i64> {
        let n = w.degree();
        let top = top_degree(n);
        let mut num = vec![0i64; top + 1];
        num[0] = 1;
        for i in 1..=n {
            let mut next = num.clone();
            for d in i..=top {
                next[d] -= num[d - i];
            }
            num = next;
        }
        let mut quotient = num;
        for len in w.cycle_type() {
            // divide by (1 - q^len): prefix sums with stride len
            for d in len..=top {
                quotient[d] += quotient[d - len];
            }
        }
        quotient
    }

    #[test]
    fn coinvariant_characters_match_product_formula() {
        let c = coinvariant_character(&Perm::cycle(3, &[0, 1, 2]));
        let by_alg: Vec<Rational> = c.traces.iter().step_by(2).cloned().collect();
        assert_eq!(by_alg, vec![rat(1), rat(-1), rat(-1), rat(1)]);
        for n in 1..=4 {
            for w in all_perms(n) {
                let c = coinvariant_character(&w);
                let by_alg: Vec<i64> = c
                    .as_poly()
                    .to_i64_coeffs()
                    .unwrap()
                    .into_iter()
                    .step_by(2)
                    .collect();
                let mut oracle = graded_trace_oracle(&w);
                while oracle.last() == Some(&0) {
                    oracle.pop();
                }
                assert_eq!(by_alg, oracle, "{w}");
            }
        }
    }

    #[test]
    fn characters_sum_to_regular_character() {
        for n in 1..=4 {
            let factorial: i64 = (1..=n as i64).product();
            for w in all_perms(n) {
                let total = coinvariant_character(&w).as_poly().eval_at_one();
                let expected = if w.is_identity() { factorial } else { 0 };
                assert_eq!(total, rat(expected), "{w}");
            }
        }
    }

    // Determinant by cofactor expansion; the matrices here are at most 4×4.
    fn det(m: &[Vec<i64>]) -> i64 {
        if m.is_empty() {
            return 1;
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum()
    }

    // Reflection representation in the basis f_i = e_i - e_n, i < n: w sends
    // f_i to e_{w(i)} - e_{w(n)} = f_{w(i)} - f_{w(n)} (with f_n = 0).
    fn reflection_matrix(w: &Perm) -> Vec<Vec<i64>> {
        let n = w.degree();
        let mut m = vec![vec![0i64; n - 1]; n - 1];
        for i in 0..n - 1 {
            if w.image(i) < n - 1 {
                m[w.image(i)][i] += 1;
            }
            if w.image(n - 1) < n - 1 {
                m[w.image(n - 1)][i] -= 1;
            }
        }
        m
    }

    // tr(Λ^k M) = sum of principal k×k minors
    fn exterior_trace_oracle(m: &[Vec<i64>], k: usize) -> i64 {
        let d = m.len();
        (0u32..(1 << d))
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| {
                let idx: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
                let sub: Vec<Vec<i64>> = idx
                    .iter()
                    .map(|&r| idx.iter().map(|&c| m[r][c]).collect())
                    .collect();
                det(&sub)
            })
            .sum()
    }

    #[test]
    fn exterior_characters_match_minor_oracle() {
        let traces = |w: &Perm| exterior_character(w).as_poly().to_i64_coeffs().unwrap();
        assert_eq!(traces(&Perm::identity(3)), vec![1, 2, 1]);
        assert_eq!(traces(&Perm::transposition(3, 0, 1)), vec![1, 0, -1]);
        assert_eq!(traces(&Perm::cycle(3, &[0, 1, 2])), vec![1, -1, 1]);
        for n in 2..=5 {
            for w in all_perms(n) {
                let m = reflection_matrix(&w);
                let c = exterior_character(&w);
                for k in 0..n {
                    assert_eq!(c.traces[k], rat(exterior_trace_oracle(&m, k)), "{w} Λ^{k}");
                }
            }
        }
    }

    fn s3_factors() -> (Coinvariants, ReflectionExterior) {
        (Coinvariants(3), ReflectionExterior(3))
    }

    #[test]
    fn invariant_series_examples() {
        let (c, e) = s3_factors();
        let full = invariant_series(&PermGroup::symmetric(3), &[&c, &e]).unwrap();
        assert_eq!(full, RationalPoly::from_degrees(&[0, 3, 5, 8]));

        let trivial = invariant_series(&PermGroup::trivial(3), &[&c, &e]).unwrap();
        assert_eq!(trivial, pt_full_flag(3) * pt_torus(2));

        let order_two = PermGroup::generate(3, &[Perm::transposition(3, 1, 2)]);
        let second = invariant_series(&order_two, &[&c, &e]).unwrap();
        assert_eq!(second, p(&[1, 1, 1, 2, 2, 2, 1, 1, 1]));
        assert_eq!(second, p(&[1, 0, 1, 0, 1]) * p(&[1, 1]) * p(&[1, 0, 0, 1]));

        assert_eq!(
            invariant_series(&PermGroup::symmetric(4), &[&Coinvariants(4)]).unwrap(),
            RationalPoly::one()
        );
    }

    #[test]
    fn invariant_series_rejects_unclosed_sets() {
        let (c, e) = s3_factors();
        let bogus =
            PermGroup::from_elements(3, vec![Perm::identity(3), Perm::cycle(3, &[0, 1, 2])]);
        assert_eq!(
            invariant_series(&bogus, &[&c, &e]),
            Err(CoinvError::NotClosed(2))
        );
        assert!(matches!(
            invariant_series(&PermGroup::symmetric(3), &[&Coinvariants(4)]),
            Err(CoinvError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn invariant_series_over_all_subgroups() {
        for n in [3, 4] {
            let perms = all_perms(n);
            let mut seen = std::collections::BTreeSet::new();
            for a in &perms {
                for b in &perms {
                    let h = PermGroup::generate(n, &[a.clone(), b.clone()]);
                    if !seen.insert(h.elements().to_vec()) {
                        continue;
                    }
                    let (c, e) = (Coinvariants(n), ReflectionExterior(n));
                    let poly = invariant_series(&h, &[&c, &e]).unwrap();
                    assert!(poly.is_nonnegative());
                    // the trivial representation occurs once in degree 0
                    assert_eq!(poly.coeff(0), rat(1));
                    let alone = invariant_series(&h, &[&c]).unwrap();
                    assert_eq!(
                        alone.eval_at_one(),
                        rat(((1..=n).product::<usize>() / h.order()) as i64)
                    );
                }
            }
            // S_3 has 6 subgroups, S_4 has 30
            assert_eq!(seen.len(), if n == 3 { 6 } else { 30 });
        }
    }

    #[test]
    fn mixing_space_polynomials() {
        let a = pt_a(GroupId::su(3)).unwrap();
        assert_eq!(a.to_i64_coeffs().unwrap(), vec![2, 1, 1, 3, 2, 3, 1, 1, 2]);
        assert_eq!(
            a,
            p(&[1, 0, 0, 1]) * p(&[1, 0, 0, 0, 0, 1])
                + p(&[1, 0, 1, 0, 1]) * p(&[1, 1]) * p(&[1, 0, 0, 1])
        );
        assert_eq!(a.eval_at_one(), pt_torus(2).eval_at_one() * rat(4));

        // Both 2-torsion points of SU(2) are central, so each contributes the
        // full S_2-invariants (1 + t)(1 + t²) averaged with (1 - t)(1 - t²).
        let oracle = (p(&[1, 1]) * p(&[1, 0, 1]) + p(&[1, -1]) * p(&[1, 0, -1]))
            .scale(&Rational::new(1.into(), 2.into()));
        assert_eq!(oracle, p(&[1, 0, 0, 1]));
        assert_eq!(pt_a(GroupId::su(2)).unwrap(), oracle.scale(&rat(2)));

        for n in 2..=4 {
            let g = GroupId::su(n);
            assert_eq!(pt_a(g).unwrap().eval_at_one(), rat(1 << (2 * g.rank())));
        }
    }

    fn arb_mpoly(n: usize) -> impl Strategy<Value = MPoly> {
        prop::collection::vec((prop::collection::vec(0u32..4, n), -3i64..4), 0..5).prop_map(
            move |terms| {
                terms.into_iter().fold(MPoly::zero(n), |acc, (e, c)| {
                    acc.add(&MPoly::term(n, e, rat(c)))
                })
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn reduce_is_idempotent_ring_hom(a in arb_mpoly(3), b in arb_mpoly(3)) {
            let ra = reduce(&a);
            let rb = reduce(&b);
            prop_assert!(ra.is_normal());
            prop_assert_eq!(reduce(&ra.to_mpoly()), ra.clone());
            prop_assert_eq!(reduce(&a.mul(&b)), ra.mul(&rb));
            prop_assert_eq!(reduce(&a.add(&b)), ra.add(&rb));
        }

        #[test]
        fn permute_is_multiplicative(a in arb_mpoly(3), i in 0usize..6, j in 0usize..6) {
            let perms = all_perms(3);
            let (v, w) = (&perms[i], &perms[j]);
            let e = reduce(&a);
            prop_assert_eq!(permute(&v.compose(w), &e), permute(v, &permute(w, &e)));
        }

        #[test]
        fn permute_is_an_algebra_map(a in arb_mpoly(3), b in arb_mpoly(3), i in 0usize..6) {
            let w = &all_perms(3)[i];
            let (ra, rb) = (reduce(&a), reduce(&b));
            prop_assert_eq!(permute(w, &ra.mul(&rb)), permute(w, &ra).mul(&permute(w, &rb)));
        }
    }
}
