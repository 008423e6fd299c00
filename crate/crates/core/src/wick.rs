//! Normal ordering of arbitrary words into the Hamel basis.
//!
//! Words are rewritten with the monotone relations until only basis words
//! remain:
//!
//! * `c(i)c(j)` with `i >= j`, `a(j)a(i)` with `i >= j`, and `a(i)c(j)` with
//!   `i != j` are zero;
//! * the leftmost adjacent `a(k)c(k)` is expanded with
//!   `a(k)c(k) = I - Σ_{l<=k} c(l)a(l)`, where the neighbours of the pair cut
//!   the sum down to `l` in `(bound, k]`;
//! * the lone λ-form `c(i)a(i)` becomes `a(i-1)c(i-1) - a(i)c(i)`.
//!
//! Each expansion either shortens a word by two or trades one
//! annihilator→creator adjacency for a creator→annihilator one, so
//! `(length, adjacencies)` strictly decreases and the rewriting halts.
//! Pending words are processed largest-measure first, which means a word is
//! never revisited once expanded and equal words always merge before they
//! are expanded.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{BasisIndex, BasisKind, Element, Index, Letter, LetterKind, LetterWord};
use crate::scalar::{format_scalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewriteRule {
    /// `c(i)c(j) = 0` for `i >= j`
    CreatorOrder,
    /// `a(j)a(i) = 0` for `i >= j`
    AnnihilatorOrder,
    /// `a(i)c(j) = 0` for `i != j`
    Mismatch,
    /// `a(k)c(k) = I - Σ c(l)a(l)` in context
    ProjectionExpand,
    /// `c(i)a(i) = a(i-1)c(i-1) - a(i)c(i)`
    NumberSplit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: RewriteRule,
    /// Offset of the first letter of the matched pattern.
    pub position: usize,
    pub before: LetterWord,
    pub after: Vec<(LetterWord, Scalar)>,
}

/// Record of a normalization run. Replaying the steps against `input`
/// reproduces the normalized element.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub input: Vec<(LetterWord, Scalar)>,
    pub steps: Vec<RewriteStep>,
}

impl RewriteTrace {
    /// Re-executes the recorded steps. Returns `None` if a step refers to a
    /// word that is not pending or if a non-basis word is left over.
    pub fn replay(&self) -> Option<Element> {
        let mut state: BTreeMap<LetterWord, Scalar> = BTreeMap::new();
        for (w, c) in &self.input {
            accumulate(&mut state, w.clone(), c.clone());
        }
        for step in &self.steps {
            let c = state.remove(&step.before)?;
            for (w, d) in &step.after {
                accumulate(&mut state, w.clone(), &c * d);
            }
        }
        let mut out = Element::zero();
        for (w, c) in state {
            match analyze(w.letters()) {
                Action::Terminal(b) => out.add_term(b, c),
                _ => return None,
            }
        }
        Some(out)
    }
}

fn accumulate(state: &mut BTreeMap<LetterWord, Scalar>, w: LetterWord, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = state.entry(w.clone()).or_insert_with(Scalar::zero);
    *slot += c;
    if slot.is_zero() {
        state.remove(&w);
    }
}

#[derive(Serialize)]
struct WordTermRepr {
    word: String,
    coeff: String,
}

#[derive(Serialize)]
struct StepRepr {
    rule: RewriteRule,
    position: usize,
    before: String,
    after: Vec<WordTermRepr>,
}

#[derive(Serialize)]
struct TraceRepr {
    input: Vec<WordTermRepr>,
    steps: Vec<StepRepr>,
}

fn word_terms(terms: &[(LetterWord, Scalar)]) -> Vec<WordTermRepr> {
    terms
        .iter()
        .map(|(w, c)| WordTermRepr {
            word: w.to_string(),
            coeff: format_scalar(c),
        })
        .collect()
}

impl Serialize for RewriteTrace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TraceRepr {
            input: word_terms(&self.input),
            steps: self
                .steps
                .iter()
                .map(|s| StepRepr {
                    rule: s.rule,
                    position: s.position,
                    before: s.before.to_string(),
                    after: word_terms(&s.after),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

enum Action {
    Zero(RewriteRule, usize),
    Expand(usize),
    NumberSplit(Index),
    Terminal(BasisIndex),
}

fn analyze(w: &[Letter]) -> Action {
    let mut first_pair = None;
    for (p, pair) in w.windows(2).enumerate() {
        let (x, y) = (pair[0], pair[1]);
        match (x.kind, y.kind) {
            (LetterKind::Creator, LetterKind::Creator) if x.index >= y.index => {
                return Action::Zero(RewriteRule::CreatorOrder, p)
            }
            (LetterKind::Annihilator, LetterKind::Annihilator) if y.index >= x.index => {
                return Action::Zero(RewriteRule::AnnihilatorOrder, p)
            }
            (LetterKind::Annihilator, LetterKind::Creator) => {
                if x.index != y.index {
                    return Action::Zero(RewriteRule::Mismatch, p);
                }
                first_pair.get_or_insert(p);
            }
            _ => {}
        }
    }
    if let Some(p) = first_pair {
        if w.len() == 2 {
            return Action::Terminal(BasisIndex::trivial_pi(w[0].index));
        }
        return Action::Expand(p);
    }
    // Creators ascending followed by annihilators descending.
    if let [x, y] = w {
        if x.is_creator() && y.is_annihilator() && x.index == y.index {
            return Action::NumberSplit(x.index);
        }
    }
    let split = w.iter().position(|l| l.is_annihilator()).unwrap_or(w.len());
    let creators = w[..split].iter().map(|l| l.index).collect();
    let annihilators = w[split..].iter().rev().map(|l| l.index).collect();
    Action::Terminal(BasisIndex::from_sorted(creators, annihilators))
}

fn adjacencies(w: &[Letter]) -> usize {
    w.windows(2)
        .filter(|p| p[0].is_annihilator() && p[1].is_creator())
        .count()
}

/// Expansion of the pair `a(k)c(k)` at offset `p` of `w` (not the whole word).
fn expand_pair(w: &[Letter], p: usize) -> Vec<(LetterWord, Scalar)> {
    let k = w[p].index;
    let (left, right) = (&w[..p], &w[p + 2..]);
    let mut out = Vec::new();
    let bare: Vec<Letter> = left.iter().chain(right).copied().collect();
    out.push((LetterWord(bare), Scalar::one()));

    // An annihilator on the left or a creator on the right kills every
    // summand c(l)a(l) with l <= k (the word is nonzero only if its index
    // exceeds k).
    let left_creator = match left.last() {
        Some(l) if l.is_annihilator() => return out,
        Some(l) => Some(l.index),
        None => None,
    };
    let right_annihilator = match right.first() {
        Some(r) if r.is_creator() => return out,
        Some(r) => Some(r.index),
        None => None,
    };
    let bound = match (left_creator, right_annihilator) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => unreachable!("whole-word pair is terminal"),
    };
    for l in (bound + 1)..=k {
        let mut letters = Vec::with_capacity(w.len());
        letters.extend_from_slice(left);
        letters.push(Letter::creator(l));
        letters.push(Letter::annihilator(l));
        letters.extend_from_slice(right);
        out.push((LetterWord(letters), -Scalar::one()));
    }
    out
}

fn number_split(i: Index) -> Vec<(LetterWord, Scalar)> {
    vec![
        (
            LetterWord(vec![Letter::annihilator(i - 1), Letter::creator(i - 1)]),
            Scalar::one(),
        ),
        (
            LetterWord(vec![Letter::annihilator(i), Letter::creator(i)]),
            -Scalar::one(),
        ),
    ]
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    len: usize,
    adjacencies: usize,
    word: Vec<Letter>,
}

impl Pending {
    fn new(word: Vec<Letter>) -> Self {
        Pending {
            len: word.len(),
            adjacencies: adjacencies(&word),
            word,
        }
    }
}

fn run(
    input: impl IntoIterator<Item = (Vec<Letter>, Scalar)>,
    mut trace: Option<&mut RewriteTrace>,
) -> Element {
    let mut pending: BTreeMap<Pending, Scalar> = BTreeMap::new();
    let push = |pending: &mut BTreeMap<Pending, Scalar>, w: Vec<Letter>, c: Scalar| {
        if c.is_zero() {
            return;
        }
        let key = Pending::new(w);
        let slot = pending.entry(key.clone()).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            pending.remove(&key);
        }
    };
    for (w, c) in input {
        if let Some(t) = trace.as_deref_mut() {
            t.input.push((LetterWord(w.clone()), c.clone()));
        }
        push(&mut pending, w, c);
    }

    let mut out = Element::zero();
    while let Some((key, c)) = pending.pop_last() {
        let w = key.word;
        let (rule, position, after) = match analyze(&w) {
            Action::Terminal(b) => {
                out.add_term(b, c);
                continue;
            }
            Action::Zero(rule, p) => (rule, p, Vec::new()),
            Action::Expand(p) => (RewriteRule::ProjectionExpand, p, expand_pair(&w, p)),
            Action::NumberSplit(i) => (RewriteRule::NumberSplit, 0, number_split(i)),
        };
        for (w2, d) in &after {
            push(&mut pending, w2.0.clone(), &c * d);
        }
        if let Some(t) = trace.as_deref_mut() {
            t.steps.push(RewriteStep {
                rule,
                position,
                before: LetterWord(w),
                after,
            });
        }
    }
    out
}

/// The unique basis expansion of a raw word.
pub fn normalize_word(w: &LetterWord) -> Element {
    run([(w.0.clone(), Scalar::one())], None)
}

pub fn normalize_word_traced(w: &LetterWord) -> (Element, RewriteTrace) {
    let mut trace = RewriteTrace::default();
    let e = run([(w.0.clone(), Scalar::one())], Some(&mut trace));
    (e, trace)
}

/// Normalizes a formal combination of raw words.
pub fn normalize_combination(
    words: impl IntoIterator<Item = (LetterWord, Scalar)>,
    trace: Option<&mut RewriteTrace>,
) -> Element {
    run(words.into_iter().map(|(w, c)| (w.0, c)), trace)
}

fn product_words(x: &Element, y: &Element) -> Vec<(LetterWord, Scalar)> {
    let right: Vec<(LetterWord, &Scalar)> = y.iter().map(|(b, c)| (b.letters(), c)).collect();
    let mut words = Vec::with_capacity(x.len() * y.len());
    for (b1, c1) in x.iter() {
        let w1 = b1.letters();
        for (w2, c2) in &right {
            words.push((w1.concat(w2), c1 * *c2));
        }
    }
    words
}

/// Product in the *-algebra: concatenate basis words and normalize.
pub fn multiply(x: &Element, y: &Element) -> Element {
    normalize_combination(product_words(x, y), None)
}

pub fn multiply_traced(x: &Element, y: &Element, trace: &mut RewriteTrace) -> Element {
    normalize_combination(product_words(x, y), Some(trace))
}

/// Involution. Coefficients are rational, so conjugation is trivial.
pub fn adjoint(x: &Element) -> Element {
    Element::from_terms(x.iter().map(|(b, c)| (b.adjoint(), c.clone())))
}

/// `1` if `h < j`, else `0`.
pub fn delta_below(j: Index, h: Index) -> u8 {
    u8::from(h < j)
}

fn below(j: Index, h: Index) -> bool {
    delta_below(j, h) == 1
}

fn projection(i: Index) -> Element {
    Element::basis(BasisIndex::trivial_pi(i))
}

/// The λ-form `c(creators…) a(annihilators…)` with annihilators given in
/// word (descending) order; `c(i)a(i)` is split into trivial π-forms.
fn lambda_word(creators: &[Index], annihilators: &[Index]) -> Element {
    if let ([i], [j]) = (creators, annihilators) {
        if i == j {
            return &projection(i - 1) - &projection(*i);
        }
    }
    let l2: Vec<Index> = annihilators.iter().rev().copied().collect();
    Element::basis(BasisIndex::from_sorted(creators.to_vec(), l2))
}

fn concat(a: &[Index], b: &[Index]) -> Vec<Index> {
    a.iter().chain(b).copied().collect()
}

/// `c(creators…) a(q)c(q) a(annihilators…)`, not both outer blocks empty.
fn sandwich(creators: &[Index], q: Index, annihilators: &[Index]) -> Element {
    let last_creator = creators.last().copied();
    let first_annihilator = annihilators.first().copied();
    if last_creator.is_some_and(|i| i >= q) || first_annihilator.is_some_and(|j| j >= q) {
        return lambda_word(creators, annihilators);
    }
    // Genuine π-form: expand.
    let bound = last_creator
        .into_iter()
        .chain(first_annihilator)
        .max()
        .expect("sandwich needs an outer letter");
    let mut out = lambda_word(creators, annihilators);
    for l in (bound + 1)..=q {
        let c = concat(creators, &[l]);
        let a = concat(&[l], annihilators);
        out = &out - &lambda_word(&c, &a);
    }
    out
}

/// λ-form times λ-form.
fn lambda_lambda(x1: &BasisIndex, x2: &BasisIndex) -> Element {
    let i = x1.l1();
    let j: Vec<Index> = x1.l2().iter().rev().copied().collect();
    let k = x2.l1();
    let l: Vec<Index> = x2.l2().iter().rev().copied().collect();
    let (m, s, r) = (i.len(), j.len(), k.len());

    // Contract the innermost annihilators of x1 against the leading
    // creators of x2: j_{s-h+1} must equal k_h.
    for h in 1..=s.min(r) {
        if j[s - h] != k[h - 1] {
            return Element::zero();
        }
    }
    if s < r {
        if m > 0 && !below(k[s], i[m - 1]) {
            return Element::zero();
        }
        lambda_word(&concat(i, &k[s..]), &l)
    } else if r < s {
        if let Some(&l1) = l.first() {
            if !below(j[s - r - 1], l1) {
                return Element::zero();
            }
        }
        lambda_word(i, &concat(&j[..s - r], &l))
    } else if s == 0 {
        lambda_word(i, &l)
    } else {
        // Full contraction leaves the projection a(j_1)c(j_1) in the middle.
        let q = j[0];
        if m == 0 && l.is_empty() {
            projection(q)
        } else {
            sandwich(i, q, &l)
        }
    }
}

/// λ-form times `a(q)c(q)`.
fn lambda_pi(x1: &BasisIndex, q: Index) -> Element {
    let i = x1.l1();
    let j: Vec<Index> = x1.l2().iter().rev().copied().collect();
    if let Some(&js) = j.last() {
        return if below(js, q) {
            Element::basis(x1.clone())
        } else {
            Element::zero()
        };
    }
    let im = *i.last().expect("identity handled by caller");
    if q <= im {
        return Element::basis(x1.clone());
    }
    let mut out = Element::basis(x1.clone());
    for t in (im + 1)..=q {
        out = &out - &lambda_word(&concat(i, &[t]), &[t]);
    }
    out
}

/// `a(q)c(q)` times λ-form.
fn pi_lambda(q: Index, x1: &BasisIndex) -> Element {
    let i = x1.l1();
    let j: Vec<Index> = x1.l2().iter().rev().copied().collect();
    if let Some(&i1) = i.first() {
        return if below(i1, q) {
            Element::basis(x1.clone())
        } else {
            Element::zero()
        };
    }
    let j1 = *j.first().expect("identity handled by caller");
    if q <= j1 {
        return Element::basis(x1.clone());
    }
    let mut out = Element::basis(x1.clone());
    for t in (j1 + 1)..=q {
        out = &out - &lambda_word(&[t], &concat(&[t], &j));
    }
    out
}

/// Product of two basis words from the closed-form product rules, without
/// going through the rewriting engine. Agrees with [`multiply`].
pub fn product_closed_form(b1: &BasisIndex, b2: &BasisIndex) -> Element {
    match (b1.kind(), b2.kind()) {
        (BasisKind::Identity, _) => Element::basis(b2.clone()),
        (_, BasisKind::Identity) => Element::basis(b1.clone()),
        (BasisKind::TrivialPi(i), BasisKind::TrivialPi(j)) => projection(i.max(j)),
        (BasisKind::LambdaForm, BasisKind::TrivialPi(q)) => lambda_pi(b1, q),
        (BasisKind::TrivialPi(q), BasisKind::LambdaForm) => pi_lambda(q, b2),
        (BasisKind::LambdaForm, BasisKind::LambdaForm) => lambda_lambda(b1, b2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn c(i: Index) -> Letter {
        Letter::creator(i)
    }
    fn a(i: Index) -> Letter {
        Letter::annihilator(i)
    }
    fn word(ls: &[Letter]) -> LetterWord {
        LetterWord(ls.to_vec())
    }
    fn p(i: Index) -> Element {
        projection(i)
    }
    fn lam(l1: &[Index], l2: &[Index]) -> Element {
        Element::basis(BasisIndex::new(l1.to_vec(), l2.to_vec()))
    }

    #[test]
    fn number_operator_splits_into_projections() {
        assert_eq!(normalize_word(&word(&[c(3), a(3)])), &p(2) - &p(3));
    }

    #[test]
    fn empty_word_is_identity() {
        assert_eq!(normalize_word(&LetterWord::empty()), Element::identity());
    }

    #[test]
    fn pi_form_expands_with_truncated_sum() {
        // c(1) a(3)c(3) a(2): l runs over 3..=3
        let got = normalize_word(&word(&[c(1), a(3), c(3), a(2)]));
        assert_eq!(got, &lam(&[1], &[2]) - &lam(&[1, 3], &[2, 3]));
    }

    #[test]
    fn zero_patterns() {
        assert!(normalize_word(&word(&[a(2), a(5)])).is_zero());
        assert!(normalize_word(&word(&[a(2), c(3)])).is_zero());
        assert!(normalize_word(&word(&[c(2), c(2)])).is_zero());
        assert!(normalize_word(&word(&[c(3), c(2)])).is_zero());
        // repeated equal annihilators
        assert!(normalize_word(&word(&[a(4), a(4)])).is_zero());
    }

    #[test]
    fn multiply_examples() {
        let x = lam(&[1], &[3]).scale(&ratio(2, 7));
        assert_eq!(multiply(&Element::identity(), &x), x);
        assert_eq!(multiply(&p(1), &p(4)), p(4));
        assert_eq!(multiply(&lam(&[1], &[]), &lam(&[], &[1])), &p(0) - &p(1));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&Element::identity()), Element::identity());
        let x = lam(&[1], &[4]).scale(&ratio(2, 3));
        assert_eq!(adjoint(&x), lam(&[4], &[1]).scale(&ratio(2, 3)));
        assert_eq!(adjoint(&adjoint(&x)), x);
    }

    #[test]
    fn closed_form_examples() {
        // one contraction a(4)c(4), then the order check 1 < 5
        let x1 = BasisIndex::new([1], [4]);
        let x2 = BasisIndex::new([4, 5], [0]);
        assert_eq!(product_closed_form(&x1, &x2), lam(&[1, 5], &[0]));
        assert_eq!(multiply(&x1.clone().into(), &x2.clone().into()), lam(&[1, 5], &[0]));
        // c(1)a(4) · c(2)c(4)a(0): a(4)c(2) = 0
        assert!(product_closed_form(&x1, &BasisIndex::new([2, 4], [0])).is_zero());

        let y = BasisIndex::trivial_pi(3);
        let x = BasisIndex::new([1], [0]);
        assert!(product_closed_form(&x, &y).is_zero());
        assert!(multiply(&x.clone().into(), &y.clone().into()).is_zero());

        let q = BasisIndex::trivial_pi(2);
        assert_eq!(product_closed_form(&q, &q), p(2));
    }

    #[test]
    fn closed_form_full_contraction_keeps_projection() {
        // a(0) · c(0) = a(0)c(0), not the identity
        let x1 = BasisIndex::annihilator(0);
        let x2 = BasisIndex::creator(0);
        assert_eq!(product_closed_form(&x1, &x2), p(0));
        // c(1)a(3) · c(3)a(2) = c(1)a(3)c(3)a(2)
        let got = product_closed_form(&BasisIndex::new([1], [3]), &BasisIndex::new([3], [2]));
        assert_eq!(got, &lam(&[1], &[2]) - &lam(&[1, 3], &[2, 3]));
    }

    #[test]
    fn delta_below_examples() {
        assert_eq!(delta_below(5, 3), 1);
        assert_eq!(delta_below(3, 3), 0);
        assert_eq!(delta_below(-2, -7), 1);
    }

    #[test]
    fn trace_replays_to_result() {
        let w = word(&[a(1), c(1), c(2), a(3), c(3), a(2), a(0), c(0)]);
        let (e, trace) = normalize_word_traced(&w);
        assert_eq!(trace.replay(), Some(e.clone()));
        assert_eq!(normalize_word(&w), e);
        assert!(!trace.steps.is_empty());
    }

    #[test]
    fn trace_json_shape() {
        let (_, trace) = normalize_word_traced(&word(&[c(3), a(3)]));
        let s = serde_json::to_string(&trace).unwrap();
        assert_eq!(
            s,
            r#"{"input":[{"word":"c(3)a(3)","coeff":"1"}],"steps":[{"rule":"number-split","position":0,"before":"c(3)a(3)","after":[{"word":"a(2)c(2)","coeff":"1"},{"word":"a(3)c(3)","coeff":"-1"}]}]}"#
        );
    }

    #[test]
    fn projections_are_idempotent_and_self_adjoint() {
        for i in -3..=3 {
            assert_eq!(multiply(&p(i), &p(i)), p(i));
            assert_eq!(adjoint(&p(i)), p(i));
        }
    }
}
