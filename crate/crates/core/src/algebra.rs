//! Generators, raw words, the Hamel-basis index encoding and formal linear
//! combinations of basis words.
//!
//! A basis word is named by a pair `(l1, l2)` of finite ascending integer
//! sets. `(∅, ∅)` is the identity, `({i}, {i})` is the trivial π-form
//! `a(i)c(i)`, and every other pair is the Wick-ordered word
//! `c(i1)…c(im) a(jn)…a(j1)` with `l1 = {i1 < … < im}` and
//! `l2 = {j1 < … < jn}`: annihilators appear in descending order in the word.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{format_scalar, parse_scalar, Scalar};

pub type Index = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterKind {
    Creator,
    Annihilator,
}

/// A single generator `c(i)` (creator a_i†) or `a(i)` (annihilator a_i).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub kind: LetterKind,
    pub index: Index,
}

impl Letter {
    pub const fn creator(index: Index) -> Self {
        Letter {
            kind: LetterKind::Creator,
            index,
        }
    }

    pub const fn annihilator(index: Index) -> Self {
        Letter {
            kind: LetterKind::Annihilator,
            index,
        }
    }

    pub fn is_creator(&self) -> bool {
        self.kind == LetterKind::Creator
    }

    pub fn is_annihilator(&self) -> bool {
        self.kind == LetterKind::Annihilator
    }

    pub fn adjoint(self) -> Self {
        match self.kind {
            LetterKind::Creator => Letter::annihilator(self.index),
            LetterKind::Annihilator => Letter::creator(self.index),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LetterKind::Creator => write!(f, "c({})", self.index),
            LetterKind::Annihilator => write!(f, "a({})", self.index),
        }
    }
}

/// A raw product of generators, read left to right as an operator product.
/// The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterWord(pub Vec<Letter>);

impl LetterWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        LetterWord(letters)
    }

    pub fn empty() -> Self {
        LetterWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reversed word with every letter adjoined.
    pub fn adjoint(&self) -> Self {
        LetterWord(self.0.iter().rev().map(|l| l.adjoint()).collect())
    }

    pub fn concat(&self, other: &LetterWord) -> Self {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        LetterWord(letters)
    }
}

impl From<Vec<Letter>> for LetterWord {
    fn from(letters: Vec<Letter>) -> Self {
        LetterWord(letters)
    }
}

impl fmt::Display for LetterWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Identity,
    /// `a(i)c(i)`
    TrivialPi(Index),
    LambdaForm,
}

/// Name of a Hamel-basis word: a pair of finite ascending integer sets.
///
/// Ordered canonically by word length, then `l1`, then `l2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    l1: Vec<Index>,
    l2: Vec<Index>,
}

fn to_set(it: impl IntoIterator<Item = Index>) -> Vec<Index> {
    let mut v: Vec<Index> = it.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl BasisIndex {
    /// Builds an index from arbitrary iterables; input order and
    /// duplicates are irrelevant (set semantics).
    pub fn new(
        l1: impl IntoIterator<Item = Index>,
        l2: impl IntoIterator<Item = Index>,
    ) -> Self {
        BasisIndex {
            l1: to_set(l1),
            l2: to_set(l2),
        }
    }

    /// Caller guarantees both vectors are strictly ascending.
    pub(crate) fn from_sorted(l1: Vec<Index>, l2: Vec<Index>) -> Self {
        debug_assert!(l1.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(l2.windows(2).all(|w| w[0] < w[1]));
        BasisIndex { l1, l2 }
    }

    pub fn identity() -> Self {
        BasisIndex {
            l1: Vec::new(),
            l2: Vec::new(),
        }
    }

    pub fn trivial_pi(i: Index) -> Self {
        BasisIndex {
            l1: vec![i],
            l2: vec![i],
        }
    }

    pub fn creator(i: Index) -> Self {
        BasisIndex {
            l1: vec![i],
            l2: Vec::new(),
        }
    }

    pub fn annihilator(i: Index) -> Self {
        BasisIndex {
            l1: Vec::new(),
            l2: vec![i],
        }
    }

    /// Creator indices, ascending.
    pub fn l1(&self) -> &[Index] {
        &self.l1
    }

    /// Annihilator indices, ascending (the word lists them descending).
    pub fn l2(&self) -> &[Index] {
        &self.l2
    }

    pub fn kind(&self) -> BasisKind {
        match (self.l1.as_slice(), self.l2.as_slice()) {
            ([], []) => BasisKind::Identity,
            ([i], [j]) if i == j => BasisKind::TrivialPi(*i),
            _ => BasisKind::LambdaForm,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.l1.is_empty() && self.l2.is_empty()
    }

    /// `m + n` for λ-forms, 2 for trivial π-forms, 0 for the identity.
    pub fn word_length(&self) -> usize {
        self.l1.len() + self.l2.len()
    }

    pub fn adjoint(&self) -> Self {
        BasisIndex {
            l1: self.l2.clone(),
            l2: self.l1.clone(),
        }
    }

    /// Expansion into generators.
    pub fn letters(&self) -> LetterWord {
        if let BasisKind::TrivialPi(i) = self.kind() {
            return LetterWord(vec![Letter::annihilator(i), Letter::creator(i)]);
        }
        let mut letters = Vec::with_capacity(self.word_length());
        letters.extend(self.l1.iter().map(|&i| Letter::creator(i)));
        letters.extend(self.l2.iter().rev().map(|&j| Letter::annihilator(j)));
        LetterWord(letters)
    }

    pub fn indices(&self) -> impl Iterator<Item = Index> + '_ {
        self.l1.iter().chain(self.l2.iter()).copied()
    }

    pub fn min_index(&self) -> Option<Index> {
        self.indices().min()
    }

    pub fn max_index(&self) -> Option<Index> {
        self.indices().max()
    }
}

impl Ord for BasisIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word_length()
            .cmp(&other.word_length())
            .then_with(|| self.l1.cmp(&other.l1))
            .then_with(|| self.l2.cmp(&other.l2))
    }
}

impl PartialOrd for BasisIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letters())
    }
}

/// All strictly increasing tuples over `[lo, hi]` of length at most `max_len`,
/// shortest first and lexicographic within a length.
pub fn ascending_tuples(lo: Index, hi: Index, max_len: usize) -> Vec<Vec<Index>> {
    let mut out = vec![Vec::new()];
    if lo > hi {
        return out;
    }
    let mut frontier: Vec<Vec<Index>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for t in &frontier {
            let start = t.last().map_or(lo, |&x| x + 1);
            for i in start..=hi {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every basis index with entries in `[lo, hi]` and word length at most
/// `max_len`, in canonical order.
pub fn basis_window(lo: Index, hi: Index, max_len: usize) -> Vec<BasisIndex> {
    let sets = ascending_tuples(lo, hi, max_len);
    let mut out = Vec::new();
    for a in &sets {
        for b in &sets {
            if a.len() + b.len() <= max_len {
                out.push(BasisIndex::from_sorted(a.clone(), b.clone()));
            }
        }
    }
    out.sort();
    out
}

/// A finite rational linear combination of basis words. Zero coefficients
/// are never stored, so structural equality is operator equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn identity() -> Self {
        Element::basis(BasisIndex::identity())
    }

    pub fn basis(b: BasisIndex) -> Self {
        Element::term(b, Scalar::one())
    }

    pub fn term(b: BasisIndex, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(b, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisIndex, Scalar)>) -> Self {
        let mut e = Element::zero();
        for (b, c) in terms {
            e.add_term(b, c);
        }
        e
    }

    pub fn add_term(&mut self, b: BasisIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, b: &BasisIndex) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(Scalar::zero)
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

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &BasisIndex> {
        self.terms.keys()
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self
                .terms
                .iter()
                .map(|(b, v)| (b.clone(), v * c))
                .collect(),
        }
    }

    /// Linear extension of a map on basis words.
    pub fn map_basis<F>(&self, mut f: F) -> Element
    where
        F: FnMut(&BasisIndex) -> Element,
    {
        let mut out = Element::zero();
        for (b, c) in &self.terms {
            for (b2, c2) in f(b).terms {
                out.add_term(b2, c2 * c);
            }
        }
        out
    }

    pub fn max_word_length(&self) -> usize {
        self.support().map(BasisIndex::word_length).max().unwrap_or(0)
    }

    /// Smallest and largest generator index occurring in any term.
    pub fn index_range(&self) -> Option<(Index, Index)> {
        let mut range: Option<(Index, Index)> = None;
        for i in self.support().flat_map(|b| b.indices()) {
            range = Some(match range {
                None => (i, i),
                Some((lo, hi)) => (lo.min(i), hi.max(i)),
            });
        }
        range
    }
}

impl From<BasisIndex> for Element {
    fn from(b: BasisIndex) -> Self {
        Element::basis(b)
    }
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        for (b, c) in &rhs.terms {
            self.add_term(b.clone(), c.clone());
        }
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Element {
    type Output = Element;
    fn add(mut self, rhs: Element) -> Element {
        self += &rhs;
        self
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            terms: self.terms.iter().map(|(b, c)| (b.clone(), -c)).collect(),
        }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.add_term(b.clone(), -c);
        }
        out
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Mul<&Element> for &Scalar {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    l1: Vec<Index>,
    l2: Vec<Index>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElementRepr {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| TermRepr {
                    l1: b.l1.clone(),
                    l2: b.l2.clone(),
                    coeff: format_scalar(c),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(deserializer)?;
        let mut e = Element::zero();
        for t in repr.terms {
            let c = parse_scalar(&t.coeff).map_err(serde::de::Error::custom)?;
            e.add_term(BasisIndex::new(t.l1, t.l2), c);
        }
        Ok(e)
    }
}
