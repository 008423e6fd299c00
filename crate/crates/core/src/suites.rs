//! Named verification suites, runnable from the CLI and the acceptance test.
//!
//! Every suite is deterministic: random instances come from a ChaCha stream
//! with a fixed seed.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{basis_window, BasisIndex, Element, Index, Letter, LetterWord};
use crate::expr::{format_element, parse_element, NormalizeReport, OutputFormat};
use crate::fock::{
    act_word, apply_word, evaluation_matrix, fock_window, independence_witnesses,
    inner, matrix_element, rank, word_element_window, CompiledElement, FockBasisVector, FockVector,
};
use crate::scalar::{format_scalar, int, ratio, Scalar};
use crate::states::{check_invariance, positivity_probe, BasisWindow, StateSpec, Transform};
use crate::symmetry::{
    alpha, beta, cycle_for_shift, gamma, spread_witness, t_sigma, IndexMap, MonoidElement,
    PartialShift, Permutation,
};
use crate::wick::{adjoint, multiply, normalize_word, product_closed_form};

const MAX_REPORTED: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failed: usize,
    /// The first few failures, human readable.
    pub failures: Vec<String>,
    #[serde(serialize_with = "as_millis")]
    pub elapsed: Duration,
    #[serde(serialize_with = "opt_as_millis")]
    pub time_limit: Option<Duration>,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

fn opt_as_millis<S: serde::Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_some(&(d.as_secs_f64() * 1e3)),
        None => s.serialize_none(),
    }
}

impl SuiteReport {
    pub fn over_time(&self) -> bool {
        self.time_limit.is_some_and(|l| self.elapsed > l)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {:<20} {} checks, {} failed, {:.3?}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.checked,
            self.failed,
            self.elapsed,
        )?;
        if let Some(limit) = self.time_limit {
            write!(f, " (limit {limit:?})")?;
        }
        for msg in &self.failures {
            write!(f, "\n      {msg}")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(detail());
            }
        }
    }
}

pub struct Suite {
    pub criterion: u8,
    pub name: &'static str,
    pub summary: &'static str,
    pub time_limit: Option<Duration>,
    body: fn(&mut Tally),
}

impl Suite {
    pub fn run(&self) -> SuiteReport {
        let mut tally = Tally::default();
        let start = Instant::now();
        (self.body)(&mut tally);
        let elapsed = start.elapsed();
        let mut report = SuiteReport {
            criterion: self.criterion,
            name: self.name,
            passed: false,
            checked: tally.checked,
            failed: tally.failed,
            failures: tally.failures,
            elapsed,
            time_limit: self.time_limit,
        };
        if report.over_time() {
            report.failures.push(format!(
                "took {:?}, limit {:?}",
                report.elapsed,
                self.time_limit.unwrap()
            ));
        }
        report.passed = report.failed == 0 && !report.over_time();
        report
    }
}

pub fn all() -> &'static [Suite] {
    SUITES
}

/// Looks a suite up by name or criterion number.
pub fn find(key: &str) -> Option<&'static Suite> {
    SUITES
        .iter()
        .find(|s| s.name == key || s.criterion.to_string() == key)
}

static SUITES: &[Suite] = &[
    Suite {
        criterion: 1,
        name: "non-positivity",
        summary: "permuted square has matrix element -2",
        time_limit: Some(Duration::from_millis(1)),
        body: non_positivity,
    },
    Suite {
        criterion: 2,
        name: "number-split",
        summary: "c(i)a(i) = a(i-1)c(i-1) - a(i)c(i) for i in [-10,10]",
        time_limit: None,
        body: number_split,
    },
    Suite {
        criterion: 3,
        name: "pi-forms",
        summary: "500 random inserted-pair words match the finite expansion",
        time_limit: Some(Duration::from_secs(5)),
        body: pi_forms,
    },
    Suite {
        criterion: 4,
        name: "projection-identity",
        summary: "a(i)c(i) e_B = e_B - sum over k <= i of c(k)a(k) e_B",
        time_limit: None,
        body: projection_identity,
    },
    Suite {
        criterion: 5,
        name: "oracle-equivalence",
        summary: "1000 random words act like their normal forms",
        time_limit: Some(Duration::from_secs(30)),
        body: oracle_equivalence,
    },
    Suite {
        criterion: 6,
        name: "closed-form",
        summary: "closed-form products agree with the rewrite engine on [-3,3]",
        time_limit: None,
        body: closed_form,
    },
    Suite {
        criterion: 7,
        name: "independence",
        summary: "witness matrices are invertible and detect nonzero combinations",
        time_limit: None,
        body: independence,
    },
    Suite {
        criterion: 8,
        name: "endomorphisms",
        summary: "beta(0), gamma(0), alpha(1) multiplicative and *-preserving; conjugated shifts",
        time_limit: None,
        body: endomorphisms,
    },
    Suite {
        criterion: 9,
        name: "spread-witness",
        summary: "100 random increasing maps realized by partial shifts",
        time_limit: None,
        body: spread,
    },
    Suite {
        criterion: 10,
        name: "state-invariance",
        summary: "vacuum, infinity and mixtures invariant and positive",
        time_limit: None,
        body: state_invariance,
    },
    Suite {
        criterion: 11,
        name: "permutation-shift",
        summary: "cycles realize the shift; permutations do not act",
        time_limit: None,
        body: permutation_shift,
    },
    Suite {
        criterion: 12,
        name: "round-trip",
        summary: "300 elements survive format/parse; golden documents match",
        time_limit: None,
        body: round_trip,
    },
];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subset(rng: &mut ChaCha8Rng, lo: Index, hi: Index, size: usize) -> Vec<Index> {
    let pool: Vec<Index> = (lo..=hi).collect();
    let mut s: Vec<Index> = pool.choose_multiple(rng, size).copied().collect();
    s.sort_unstable();
    s
}

fn random_basis(rng: &mut ChaCha8Rng, lo: Index, hi: Index, max_len: usize) -> BasisIndex {
    let width = (hi - lo + 1) as usize;
    match rng.gen_range(0..10) {
        0 => BasisIndex::identity(),
        1 | 2 => BasisIndex::trivial_pi(rng.gen_range(lo..=hi)),
        _ => loop {
            let n1 = rng.gen_range(0..=max_len.min(width));
            let n2 = rng.gen_range(0..=(max_len - n1).min(width));
            if n1 + n2 > 0 {
                break BasisIndex::new(subset(rng, lo, hi, n1), subset(rng, lo, hi, n2));
            }
        },
    }
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    ratio(rng.gen_range(-6..=6), rng.gen_range(1..=5))
}

fn random_element(rng: &mut ChaCha8Rng, lo: Index, hi: Index, max_len: usize, max_terms: usize) -> Element {
    let mut x = Element::zero();
    for _ in 0..rng.gen_range(0..=max_terms) {
        x.add_term(random_basis(rng, lo, hi, max_len), random_scalar(rng));
    }
    x
}

fn random_word(rng: &mut ChaCha8Rng, lo: Index, hi: Index, max_len: usize) -> LetterWord {
    let len = rng.gen_range(0..=max_len);
    LetterWord::new(
        (0..len)
            .map(|_| {
                let i = rng.gen_range(lo..=hi);
                if rng.gen_bool(0.5) {
                    Letter::creator(i)
                } else {
                    Letter::annihilator(i)
                }
            })
            .collect(),
    )
}

fn text(x: &Element) -> String {
    format_element(x, OutputFormat::Text)
}

fn projection(k: Index) -> Element {
    Element::basis(BasisIndex::trivial_pi(k))
}

/// `(a(0)c(0) + c(1))*(a(0)c(0) + c(1))`, its image under the transposition
/// `(0 1)`, the probe vector `e_(2) - 2e_(0,2)` and the matrix element.
pub struct NonPositivity {
    pub square: Element,
    pub permuted: Element,
    pub permutation: Permutation,
    pub probe: FockVector,
    pub value: Scalar,
}

pub fn non_positivity_instance() -> NonPositivity {
    let x1 = multiply(
        &Element::basis(BasisIndex::annihilator(0)),
        &Element::basis(BasisIndex::creator(0)),
    );
    let x2 = Element::basis(BasisIndex::creator(1));
    let sum = &x1 + &x2;
    let square = multiply(&adjoint(&sum), &sum);
    let permutation = Permutation::transposition(0, 1);
    let permuted = t_sigma(&permutation, &square);
    let probe = &FockVector::basis(FockBasisVector::single(2))
        - &FockVector::basis(FockBasisVector::new(vec![0, 2]).expect("increasing")).scale(&int(2));
    let value = matrix_element(&permuted, &probe, &probe);
    NonPositivity {
        square,
        permuted,
        permutation,
        probe,
        value,
    }
}

fn non_positivity(t: &mut Tally) {
    let inst = non_positivity_instance();
    t.check(inst.value == int(-2), || {
        format!("matrix element {} instead of -2", format_scalar(&inst.value))
    });
}

fn number_split(t: &mut Tally) {
    for i in -10..=10 {
        let w = LetterWord::new(vec![Letter::creator(i), Letter::annihilator(i)]);
        let x = normalize_word(&w);
        let expected = projection(i - 1) - projection(i);
        t.check(x == expected, || format!("i = {i}: got {}", text(&x)));
        let compiled = CompiledElement::new(&expected);
        for e in fock_window(i - 3, i + 3, 3) {
            let direct = apply_word(&w, &FockVector::basis(e.clone()));
            let via = compiled.apply_basis(&e);
            t.check(direct == via, || format!("i = {i}: disagree on e{e}"));
        }
    }
}

/// `c(I)a(J)` as a basis element; a lone `c(i)a(i)` is split into projections.
fn lambda_element(l1: Vec<Index>, l2: Vec<Index>) -> Element {
    if l1.len() == 1 && l1 == l2 {
        projection(l1[0] - 1) - projection(l1[0])
    } else {
        Element::basis(BasisIndex::new(l1, l2))
    }
}

fn pi_forms(t: &mut Tally) {
    let mut rng = rng(3);
    let mut done = 0;
    while done < 500 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let k: Index = rng.gen_range(-6..=6);
        if k + 6 < m.max(n) as Index {
            continue;
        }
        let creators = subset(&mut rng, -6, k - 1, m);
        let annihilators = subset(&mut rng, -6, k - 1, n);
        let mut letters: Vec<Letter> = creators.iter().map(|&i| Letter::creator(i)).collect();
        letters.push(Letter::annihilator(k));
        letters.push(Letter::creator(k));
        letters.extend(annihilators.iter().rev().map(|&j| Letter::annihilator(j)));
        let word = LetterWord::new(letters);

        let low = creators.last().unwrap().max(annihilators.last().unwrap()) + 1;
        let mut expected = lambda_element(creators.clone(), annihilators.clone());
        for l in low..=k {
            let mut c = creators.clone();
            c.push(l);
            let mut a = annihilators.clone();
            a.push(l);
            expected = expected - lambda_element(c, a);
        }
        let got = normalize_word(&word);
        t.check(got == expected, || {
            format!("{word}: got {}, expected {}", text(&got), text(&expected))
        });
        done += 1;
    }
}

fn projection_identity(t: &mut Tally) {
    for i in -5..=5 {
        let p = CompiledElement::new(&projection(i));
        for e in fock_window(i - 4, i + 4, 4) {
            let lhs = p.apply_basis(&e);
            let mut rhs = FockVector::basis(e.clone());
            if let Some(&lo) = e.indices().first() {
                for k in lo..=i {
                    let w = [Letter::creator(k), Letter::annihilator(k)];
                    if let Some(f) = act_word(&w, &e) {
                        rhs.add_term(f, -Scalar::one());
                    }
                }
            }
            t.check(lhs == rhs, || format!("i = {i}, e{e}"));
        }
    }
}

fn oracle_equivalence(t: &mut Tally) {
    let mut rng = rng(5);
    for _ in 0..1000 {
        let w = random_word(&mut rng, -5, 5, 7);
        let x = normalize_word(&w);
        let compiled = CompiledElement::new(&x);
        let mut bad = None;
        for e in word_element_window(&w, &x) {
            let direct = act_word(w.letters(), &e).map_or_else(FockVector::zero, FockVector::basis);
            if direct != compiled.apply_basis(&e) {
                bad = Some(e);
                break;
            }
        }
        t.check(bad.is_none(), || {
            format!("{w} -> {} disagrees on e{}", text(&x), bad.unwrap())
        });
    }
}

fn closed_form(t: &mut Tally) {
    let words = basis_window(-3, 3, 4);
    let elements: Vec<Element> = words.iter().cloned().map(Element::basis).collect();
    for (b1, x1) in words.iter().zip(&elements) {
        for (b2, x2) in words.iter().zip(&elements) {
            let engine = multiply(x1, x2);
            let closed = product_closed_form(b1, b2);
            t.check(engine == closed, || {
                format!(
                    "({b1})({b2}): engine {}, closed form {}",
                    text(&engine),
                    text(&closed)
                )
            });
        }
    }
}

fn independence(t: &mut Tally) {
    let mut rng = rng(7);
    for _ in 0..200 {
        let size = rng.gen_range(1..=8);
        let set: BTreeSet<BasisIndex> = (0..size).map(|_| random_basis(&mut rng, -5, 5, 5)).collect();
        let witnesses = independence_witnesses(set.iter().cloned());
        let m = evaluation_matrix(&witnesses);
        t.check(rank(&m) == set.len(), || {
            format!("singular witness matrix for {set:?}")
        });
        for _ in 0..5 {
            let mut x = Element::zero();
            while x.is_zero() {
                for b in &set {
                    x.add_term(b.clone(), random_scalar(&mut rng));
                }
            }
            let compiled = CompiledElement::new(&x);
            let seen = witnesses
                .iter()
                .any(|(_, w)| !inner(&compiled.apply(&w.xi), &w.eta).is_zero());
            t.check(seen, || format!("witnesses miss {}", text(&x)));
        }
    }
}

fn endomorphisms(t: &mut Tally) {
    let mut rng = rng(8);
    type Map = fn(&Element) -> Element;
    let maps: [(&str, Map); 3] = [
        ("beta(0)", |x| beta(0, x)),
        ("gamma(0)", |x| gamma(0, x)),
        ("alpha(1)", |x| alpha(1, x)),
    ];
    for _ in 0..500 {
        let b1 = Element::basis(random_basis(&mut rng, -5, 5, 4));
        let b2 = Element::basis(random_basis(&mut rng, -5, 5, 4));
        for (name, f) in &maps {
            let lhs = f(&multiply(&b1, &b2));
            let rhs = multiply(&f(&b1), &f(&b2));
            t.check(lhs == rhs, || {
                format!(
                    "{name} not multiplicative on ({})({}): {} vs {}",
                    text(&b1),
                    text(&b2),
                    text(&lhs),
                    text(&rhs)
                )
            });
            let ok = f(&adjoint(&b1)) == adjoint(&f(&b1));
            t.check(ok, || format!("{name} does not commute with * on {}", text(&b1)));
        }
    }
    for k in -5..=5 {
        for l in -5..=5 {
            let theta: MonoidElement = format!("tau:{k} theta:{l} tau:{}", -k).parse().expect("syntax");
            let psi: MonoidElement = format!("tau:{k} psi:{l} tau:{}", -k).parse().expect("syntax");
            let ok = (-20..=20).all(|x| {
                theta.eval(x) == PartialShift::theta(k + l).eval(x)
                    && psi.eval(x) == PartialShift::psi(k + l).eval(x)
            });
            t.check(ok, || format!("conjugated shift fails for k = {k}, l = {l}"));
        }
    }
}

fn spread(t: &mut Tally) {
    let mut rng = rng(9);
    for case in 0..100 {
        let m: Index = rng.gen_range(-10..=10);
        let n = m + rng.gen_range(0..=6);
        let len = (n - m + 1) as usize;
        let span = rng.gen_range((len as Index - 1)..=12);
        // Alternate between starting at or above m and strictly below it.
        let start = if case % 2 == 0 {
            m + rng.gen_range(0..=8)
        } else {
            m - rng.gen_range(1..=8)
        };
        let mut inner: Vec<Index> = subset(&mut rng, start + 1, start + span - 1, len.saturating_sub(2));
        let mut targets = vec![start];
        targets.append(&mut inner);
        if len > 1 {
            targets.push(start + span);
        }
        match spread_witness(m, n, &targets) {
            Ok(r) => {
                let ok = r.is_partial_shift_word()
                    && (m..=n).zip(&targets).all(|(j, &l)| r.eval(j) == l);
                t.check(ok, || format!("[{m},{n}] -> {targets:?}: {r} is wrong"));
            }
            Err(e) => t.check(false, || format!("[{m},{n}] -> {targets:?}: {e}")),
        }
    }
}

fn state_invariance(t: &mut Tally) {
    let mut states = vec![StateSpec::Vacuum, StateSpec::Infinity];
    for (p, q) in [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)] {
        states.push(StateSpec::mixed(ratio(p, q)).expect("in range"));
    }
    let window = BasisWindow::default();
    for s in &states {
        for k in -3..=3 {
            for tr in [Transform::Beta(k), Transform::Gamma(k)] {
                let report = check_invariance(s, &tr, &window);
                t.checked += report.checked - 1;
                t.check(report.is_invariant(), || {
                    let v = &report.violations[0];
                    format!(
                        "{s} under {tr}: {} violations, first {} ({} vs {})",
                        report.violations.len(),
                        v.basis,
                        format_scalar(&v.expected),
                        format_scalar(&v.found)
                    )
                });
            }
        }
    }
    let mut rng = rng(10);
    for s in &states {
        for _ in 0..200 {
            let z = random_element(&mut rng, -3, 3, 3, 4);
            let v = positivity_probe(s, &z);
            t.check(v >= Scalar::zero(), || {
                format!("{s}: negative value {} at {}", format_scalar(&v), text(&z))
            });
        }
    }
}

fn permutation_shift(t: &mut Tally) {
    for b in BasisWindow::default().words() {
        let x = Element::basis(b.clone());
        let sigma = cycle_for_shift(&b);
        let ok = t_sigma(&sigma, &x) == alpha(1, &x);
        t.check(ok, || format!("cycle {sigma} does not shift {b}"));
    }
    let x = Element::basis(BasisIndex::new([1, 2], [0]));
    let sigma = Permutation::transposition(1, 2);
    let back = t_sigma(&sigma.inverse(), &t_sigma(&sigma, &x));
    let exhibited = x.max_word_length() >= 2
        && !crate::symmetry::is_order_preserving(&sigma, x.iter().next().unwrap().0.l1())
        && back.is_zero()
        && back != x;
    t.check(exhibited, || format!("inverse pair does not annihilate {}", text(&x)));
}

/// A reproducible JSON document: file name plus its exact bytes.
pub struct GoldenDocument {
    pub file: &'static str,
    pub contents: String,
}

#[derive(Serialize)]
struct NonPositivityDoc<'a> {
    square: &'a Element,
    permutation: String,
    permuted: &'a Element,
    probe: &'a FockVector,
    value: String,
}

/// Canonical documents for the non-positivity example, the number split at 3
/// and an inserted-pair expansion. Each is compact JSON plus a newline.
pub fn golden_documents() -> Vec<GoldenDocument> {
    let inst = non_positivity_instance();
    let doc = NonPositivityDoc {
        square: &inst.square,
        permutation: inst.permutation.to_string(),
        permuted: &inst.permuted,
        probe: &inst.probe,
        value: format_scalar(&inst.value),
    };
    let normalize = |src: &str| {
        let report = NormalizeReport::new(src, true).expect("valid expression");
        serde_json::to_string(&report).expect("serializable") + "\n"
    };
    vec![
        GoldenDocument {
            file: "non_positivity.json",
            contents: serde_json::to_string(&doc).expect("serializable") + "\n",
        },
        GoldenDocument {
            file: "number_split.json",
            contents: normalize("c(3) a(3)"),
        },
        GoldenDocument {
            file: "pi_form.json",
            contents: normalize("c(1) a(3) c(3) a(2)"),
        },
    ]
}

const GOLDEN: [(&str, &str); 3] = [
    ("non_positivity.json", include_str!("../tests/golden/non_positivity.json")),
    ("number_split.json", include_str!("../tests/golden/number_split.json")),
    ("pi_form.json", include_str!("../tests/golden/pi_form.json")),
];

fn round_trip(t: &mut Tally) {
    let mut rng = rng(12);
    for _ in 0..300 {
        let x = random_element(&mut rng, -6, 6, 5, 6);
        let printed = text(&x);
        let back = parse_element(&printed);
        t.check(back.as_ref() == Ok(&x), || format!("text round trip failed for {printed}"));
        let json = format_element(&x, OutputFormat::Json);
        let again: Result<Element, _> = serde_json::from_str(&json);
        let ok = again
            .as_ref()
            .is_ok_and(|y| y == &x && format_element(y, OutputFormat::Json) == json);
        t.check(ok, || format!("json round trip failed for {json}"));
    }
    for doc in golden_documents() {
        let stored = GOLDEN.iter().find(|(f, _)| *f == doc.file).map(|(_, c)| *c);
        t.check(stored == Some(doc.contents.as_str()), || {
            format!("{} differs from the stored document", doc.file)
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names: BTreeSet<_> = all().iter().map(|s| s.name).collect();
        assert_eq!(names.len(), 12);
        assert_eq!(find("6").unwrap().name, "closed-form");
        assert!(find("nope").is_none());
    }

    #[test]
    fn fast_suites_pass() {
        for key in ["number-split", "pi-forms", "projection-identity", "spread-witness"] {
            let r = find(key).unwrap().run();
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn counterexample_value() {
        let inst = non_positivity_instance();
        assert_eq!(inst.value, int(-2));
        assert_eq!(
            text(&inst.permuted),
            "1·a(0) + 1·c(0) + 1·a(0)c(0) + 1·a(1)c(1)"
        );
    }
}
