//! The monotone Fock space, realized exactly and without truncation.
//!
//! Basis vectors are strictly increasing integer tuples; `()` is the vacuum.
//! `c(i)` prepends `i` when `i` is below the current minimum and `a(i)`
//! removes a leading `i`. Every generator maps a basis vector to zero or to
//! exactly one basis vector, so finite vectors stay finite.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{ascending_tuples, BasisIndex, BasisKind, Element, Index, Letter, LetterKind, LetterWord};
use crate::scalar::{format_scalar, parse_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("basis vector indices must be strictly increasing, got {0:?}")]
    NotIncreasing(Vec<Index>),
    #[error("malformed basis vector literal `{0}`")]
    Malformed(String),
}

/// `e_(i1,…,ik)` with `i1 < … < ik`. Ordered by particle number, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FockBasisVector(Vec<Index>);

impl Ord for FockBasisVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl PartialOrd for FockBasisVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl FockBasisVector {
    pub fn new(indices: Vec<Index>) -> Result<Self, FockError> {
        if indices.windows(2).all(|w| w[0] < w[1]) {
            Ok(FockBasisVector(indices))
        } else {
            Err(FockError::NotIncreasing(indices))
        }
    }

    pub fn vacuum() -> Self {
        FockBasisVector(Vec::new())
    }

    pub fn single(i: Index) -> Self {
        FockBasisVector(vec![i])
    }

    pub fn indices(&self) -> &[Index] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `(i1,i2,...)`; `()` is the vacuum.
    pub fn parse(src: &str) -> Result<Self, FockError> {
        let malformed = || FockError::Malformed(src.to_string());
        let inner = src
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(malformed)?;
        if inner.trim().is_empty() {
            return Ok(FockBasisVector::vacuum());
        }
        let indices = inner
            .split(',')
            .map(|t| t.trim().parse::<Index>().map_err(|_| malformed()))
            .collect::<Result<Vec<_>, _>>()?;
        FockBasisVector::new(indices)
    }
}

impl fmt::Display for FockBasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

/// Finite rational combination of basis vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: BTreeMap<FockBasisVector, Scalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn basis(e: FockBasisVector) -> Self {
        let mut v = FockVector::zero();
        v.add_term(e, Scalar::one());
        v
    }

    pub fn vacuum() -> Self {
        FockVector::basis(FockBasisVector::vacuum())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (FockBasisVector, Scalar)>) -> Self {
        let mut v = FockVector::zero();
        for (e, c) in terms {
            v.add_term(e, c);
        }
        v
    }

    pub fn add_term(&mut self, e: FockBasisVector, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: &FockBasisVector) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockBasisVector, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> FockVector {
        FockVector::from_terms(self.terms.iter().map(|(e, v)| (e.clone(), v * c)))
    }
}

impl From<FockBasisVector> for FockVector {
    fn from(e: FockBasisVector) -> Self {
        FockVector::basis(e)
    }
}

impl Add<&FockVector> for &FockVector {
    type Output = FockVector;
    fn add(self, rhs: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub<&FockVector> for &FockVector {
    type Output = FockVector;
    fn sub(self, rhs: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}·e{}", format_scalar(c), e)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FockTermRepr {
    v: Vec<Index>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct FockVectorRepr {
    terms: Vec<FockTermRepr>,
}

impl Serialize for FockVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FockVectorRepr {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| FockTermRepr {
                    v: e.0.clone(),
                    coeff: format_scalar(c),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FockVectorRepr::deserialize(deserializer)?;
        let mut v = FockVector::zero();
        for t in repr.terms {
            let e = FockBasisVector::new(t.v).map_err(serde::de::Error::custom)?;
            let c = parse_scalar(&t.coeff).map_err(serde::de::Error::custom)?;
            v.add_term(e, c);
        }
        Ok(v)
    }
}

/// A word applied to a basis vector: zero (`None`) or a single basis vector.
/// Letters act right to left.
pub fn act_word(w: &[Letter], e: &FockBasisVector) -> Option<FockBasisVector> {
    // Reversed so the minimum sits at the end.
    let mut stack: Vec<Index> = Vec::with_capacity(e.0.len() + w.len());
    stack.extend(e.0.iter().rev());
    for l in w.iter().rev() {
        match l.kind {
            LetterKind::Creator => match stack.last() {
                Some(&min) if l.index >= min => return None,
                _ => stack.push(l.index),
            },
            LetterKind::Annihilator => {
                if stack.last() != Some(&l.index) {
                    return None;
                }
                stack.pop();
            }
        }
    }
    stack.reverse();
    Some(FockBasisVector(stack))
}

pub fn act_letter(l: Letter, e: &FockBasisVector) -> Option<FockBasisVector> {
    act_word(&[l], e)
}

pub fn apply_letter(l: Letter, e: &FockBasisVector) -> FockVector {
    act_letter(l, e).map_or_else(FockVector::zero, FockVector::basis)
}

pub fn apply_word(w: &LetterWord, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (e, c) in v.iter() {
        if let Some(e2) = act_word(w.letters(), e) {
            out.add_term(e2, c.clone());
        }
    }
    out
}

/// Basis words expanded to letters once, for repeated application.
pub struct CompiledElement {
    terms: Vec<(LetterWord, Scalar)>,
}

impl CompiledElement {
    pub fn new(x: &Element) -> Self {
        CompiledElement {
            terms: x.iter().map(|(b, c)| (b.letters(), c.clone())).collect(),
        }
    }

    pub fn apply_basis(&self, e: &FockBasisVector) -> FockVector {
        let mut out = FockVector::zero();
        for (w, c) in &self.terms {
            if let Some(e2) = act_word(w.letters(), e) {
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (e, c) in v.iter() {
            for (e2, d) in self.apply_basis(e).terms {
                out.add_term(e2, d * c);
            }
        }
        out
    }
}

pub fn apply_element(x: &Element, v: &FockVector) -> FockVector {
    CompiledElement::new(x).apply(v)
}

/// Bilinear pairing with the basis orthonormal.
pub fn inner(u: &FockVector, v: &FockVector) -> Scalar {
    let (small, large) = if u.len() <= v.len() { (u, v) } else { (v, u) };
    let mut acc = Scalar::zero();
    for (e, c) in small.iter() {
        if let Some(d) = large.terms.get(e) {
            acc += c * d;
        }
    }
    acc
}

/// `<x xi, eta>`
pub fn matrix_element(x: &Element, xi: &FockVector, eta: &FockVector) -> Scalar {
    inner(&apply_element(x, xi), eta)
}

/// `U^k e_B = e_{B+k}`.
pub fn shift_basis(k: Index, e: &FockBasisVector) -> FockBasisVector {
    FockBasisVector(
        e.0.iter()
            .map(|&i| i.checked_add(k).expect("index overflow"))
            .collect(),
    )
}

pub fn shift_vector(k: Index, v: &FockVector) -> FockVector {
    FockVector::from_terms(v.iter().map(|(e, c)| (shift_basis(k, e), c.clone())))
}

/// Every basis vector with indices in `[lo, hi]` and at most `max_len` particles.
pub fn fock_window(lo: Index, hi: Index, max_len: usize) -> Vec<FockBasisVector> {
    ascending_tuples(lo, hi, max_len)
        .into_iter()
        .map(FockBasisVector)
        .collect()
}

/// Default sweep for comparing operators: indices two beyond the span of
/// both sides, particle number up to two beyond the longest word.
pub fn comparison_window(
    index_range: Option<(Index, Index)>,
    max_word_length: usize,
) -> Vec<FockBasisVector> {
    let (lo, hi) = index_range.unwrap_or((0, 0));
    fock_window(lo - 2, hi + 2, max_word_length + 2)
}

fn merge_ranges(a: Option<(Index, Index)>, b: Option<(Index, Index)>) -> Option<(Index, Index)> {
    match (a, b) {
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
        (x, None) | (None, x) => x,
    }
}

pub fn word_index_range(w: &LetterWord) -> Option<(Index, Index)> {
    let lo = w.letters().iter().map(|l| l.index).min()?;
    let hi = w.letters().iter().map(|l| l.index).max()?;
    Some((lo, hi))
}

/// Window for comparing a raw word with an element.
pub fn word_element_window(w: &LetterWord, x: &Element) -> Vec<FockBasisVector> {
    comparison_window(
        merge_ranges(word_index_range(w), x.index_range()),
        w.len().max(x.max_word_length()),
    )
}

/// A matrix-element probe `<X xi, eta>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub xi: FockVector,
    pub eta: FockVector,
}

impl Witness {
    fn diagonal(e: FockBasisVector) -> Self {
        let v = FockVector::basis(e);
        Witness {
            xi: v.clone(),
            eta: v,
        }
    }
}

/// One witness per member of `s` such that the evaluation matrix
/// `M[x][w] = <X_x xi_w, eta_w>` is invertible. Consequently a combination
/// supported on `s` vanishes iff all its witness matrix elements vanish.
///
/// * λ-form: `xi = e_{l2}`, `eta = e_{l1}` (its own matrix element is 1 and
///   only strictly shorter λ-forms can hit the same pair).
/// * `a(k)c(k)`: `xi = eta = e_(k+1)`, lower triangular among projections,
///   orthogonal to every λ-form of positive length.
/// * identity: `xi = eta = e_(p)` with `p` below every annihilator block,
///   projection index and creator-only block, so only the identity sees it.
pub fn independence_witnesses(
    s: impl IntoIterator<Item = BasisIndex>,
) -> Vec<(BasisIndex, Witness)> {
    let set: std::collections::BTreeSet<BasisIndex> = s.into_iter().collect();
    let probe = set
        .iter()
        .filter_map(|b| match b.kind() {
            BasisKind::Identity => None,
            BasisKind::TrivialPi(k) => Some(k),
            BasisKind::LambdaForm => match b.l2().first() {
                Some(&jn) => Some(jn),
                None => b.l1().last().copied(),
            },
        })
        .min()
        .map_or(0, |p| p - 1);
    set.into_iter()
        .map(|b| {
            let w = match b.kind() {
                BasisKind::Identity => Witness::diagonal(FockBasisVector::single(probe)),
                BasisKind::TrivialPi(k) => Witness::diagonal(FockBasisVector::single(k + 1)),
                BasisKind::LambdaForm => Witness {
                    xi: FockVector::basis(FockBasisVector(b.l2().to_vec())),
                    eta: FockVector::basis(FockBasisVector(b.l1().to_vec())),
                },
            };
            (b, w)
        })
        .collect()
}

/// `M[r][c] = <X_r xi_c, eta_c>` over the witness list.
pub fn evaluation_matrix(witnesses: &[(BasisIndex, Witness)]) -> Vec<Vec<Scalar>> {
    witnesses
        .iter()
        .map(|(b, _)| {
            let x = CompiledElement::new(&Element::basis(b.clone()));
            witnesses
                .iter()
                .map(|(_, w)| inner(&x.apply(&w.xi), &w.eta))
                .collect()
        })
        .collect()
}

/// Rank by exact Gaussian elimination.
pub fn rank(matrix: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = matrix.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = m[r][col].recip();
        for i in (r + 1)..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let f = &m[i][col] * &inv;
            let (top, rest) = m.split_at_mut(i);
            for (dst, src) in rest[0][col..].iter_mut().zip(&top[r][col..]) {
                *dst -= &f * src;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Identical basis expansions, so equal as operators.
    Equal,
    /// A matrix element on which the two sides disagree.
    Distinguished {
        witness: Witness,
        left: Scalar,
        right: Scalar,
    },
}

/// Decides operator equality of two elements with a Fock-space certificate:
/// a sweep over the comparison window, then the independence witnesses of
/// the support of the difference.
pub fn compare(x: &Element, y: &Element) -> Comparison {
    let (cx, cy) = (CompiledElement::new(x), CompiledElement::new(y));
    let window = comparison_window(
        merge_ranges(x.index_range(), y.index_range()),
        x.max_word_length().max(y.max_word_length()),
    );
    for e in window {
        let (u, v) = (cx.apply_basis(&e), cy.apply_basis(&e));
        if u != v {
            // Pick a coordinate where they differ.
            let probe = u
                .iter()
                .chain(v.iter())
                .map(|(f, _)| f.clone())
                .find(|f| u.coeff(f) != v.coeff(f))
                .expect("vectors differ");
            return Comparison::Distinguished {
                left: u.coeff(&probe),
                right: v.coeff(&probe),
                witness: Witness {
                    xi: FockVector::basis(e),
                    eta: FockVector::basis(probe),
                },
            };
        }
    }
    let diff = x - y;
    if diff.is_zero() {
        return Comparison::Equal;
    }
    for (_, w) in independence_witnesses(diff.support().cloned()) {
        let left = inner(&cx.apply(&w.xi), &w.eta);
        let right = inner(&cy.apply(&w.xi), &w.eta);
        if left != right {
            return Comparison::Distinguished {
                witness: w,
                left,
                right,
            };
        }
    }
    unreachable!("independence witnesses separate distinct elements")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn e(v: &[Index]) -> FockBasisVector {
        FockBasisVector::new(v.to_vec()).unwrap()
    }
    fn fv(v: &[Index]) -> FockVector {
        FockVector::basis(e(v))
    }

    #[test]
    fn letter_examples() {
        assert_eq!(apply_letter(Letter::creator(1), &e(&[2, 5])), fv(&[1, 2, 5]));
        assert!(apply_letter(Letter::creator(1), &e(&[0, 3])).is_zero());
        assert_eq!(apply_letter(Letter::annihilator(2), &e(&[2, 5])), fv(&[5]));
        assert!(apply_letter(Letter::annihilator(2), &FockBasisVector::vacuum()).is_zero());
        assert_eq!(apply_letter(Letter::creator(7), &FockBasisVector::vacuum()), fv(&[7]));
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(FockBasisVector::new(vec![1, 1]).is_err());
        assert!(FockBasisVector::new(vec![3, 2]).is_err());
        assert!(FockBasisVector::parse("(1,2,2)").is_err());
        assert_eq!(FockBasisVector::parse("( )").unwrap(), FockBasisVector::vacuum());
        assert_eq!(FockBasisVector::parse("(-1, 4)").unwrap(), e(&[-1, 4]));
        assert_eq!(e(&[-1, 4]).to_string(), "(-1,4)");
    }

    #[test]
    fn projection_action() {
        let p1 = Element::basis(BasisIndex::trivial_pi(1));
        assert_eq!(apply_element(&p1, &fv(&[3])), fv(&[3]));
        assert!(apply_element(&p1, &fv(&[0])).is_zero());
        assert_eq!(apply_element(&Element::identity(), &fv(&[0, 9])), fv(&[0, 9]));
    }

    #[test]
    fn inner_products() {
        assert_eq!(inner(&fv(&[1, 2]), &fv(&[1, 2])), int(1));
        assert_eq!(inner(&fv(&[1, 2]), &fv(&[1, 3])), int(0));
    }

    #[test]
    fn matrix_element_lambda_form() {
        let x = Element::basis(BasisIndex::new([1, 2], [3, 4]));
        assert_eq!(x.iter().next().unwrap().0.to_string(), "c(1)c(2)a(4)a(3)");
        assert_eq!(matrix_element(&x, &fv(&[3, 4]), &fv(&[1, 2])), int(1));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_basis(1, &e(&[0, 2])), e(&[1, 3]));
        assert_eq!(shift_basis(0, &e(&[0, 2])), e(&[0, 2]));
        assert_eq!(shift_basis(1, &shift_basis(-1, &e(&[0, 2]))), e(&[0, 2]));
    }

    #[test]
    fn witness_examples() {
        let w = independence_witnesses([BasisIndex::identity()]);
        assert_eq!(w.len(), 1);
        assert_eq!(evaluation_matrix(&w), vec![vec![int(1)]]);

        let w = independence_witnesses([BasisIndex::trivial_pi(0), BasisIndex::trivial_pi(5)]);
        assert_eq!(w[0].1.xi, fv(&[1]));
        assert_eq!(w[1].1.xi, fv(&[6]));
        assert_eq!(
            evaluation_matrix(&w),
            vec![vec![int(1), int(1)], vec![int(0), int(1)]]
        );

        let w = independence_witnesses([BasisIndex::new([1], [2])]);
        assert_eq!(w[0].1.xi, fv(&[2]));
        assert_eq!(w[0].1.eta, fv(&[1]));
        assert_eq!(evaluation_matrix(&w), vec![vec![int(1)]]);
    }

    #[test]
    fn rank_of_singular_matrix() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn compare_distinguishes() {
        let x = Element::basis(BasisIndex::creator(0));
        let y = Element::basis(BasisIndex::creator(1));
        assert!(matches!(compare(&x, &y), Comparison::Distinguished { .. }));
        assert_eq!(compare(&x, &x), Comparison::Equal);
    }

    #[test]
    fn json_shape() {
        let v = &fv(&[2]) - &fv(&[0, 2]).scale(&int(2));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"terms":[{"v":[2],"coeff":"1"},{"v":[0,2],"coeff":"-2"}]}"#);
        let back: FockVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
