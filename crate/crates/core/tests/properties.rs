use proptest::collection::vec;
use proptest::prelude::*;

use monowick::algebra::{BasisIndex, Element, Index, Letter, LetterWord};
use monowick::expr::{format_element, parse_element, OutputFormat};
use monowick::fock::{
    apply_element, comparison_window, compare, matrix_element, shift_vector, Comparison,
    FockBasisVector, FockVector,
};
use monowick::scalar::{ratio, Scalar};
use monowick::states::{evaluate, positivity_probe, vacuum_expectation, StateSpec};
use monowick::symmetry::{alpha, spread_witness, t_sigma, IndexMap, PartialShift, Permutation};
use monowick::wick::{adjoint, multiply, normalize_word, normalize_word_traced, product_closed_form};

fn basis_index() -> impl Strategy<Value = BasisIndex> {
    prop_oneof![
        1 => Just(BasisIndex::identity()),
        2 => (-4i64..=4).prop_map(BasisIndex::trivial_pi),
        6 => (vec(-4i64..=4, 0..3), vec(-4i64..=4, 0..3))
            .prop_filter("nonempty", |(a, b)| !a.is_empty() || !b.is_empty())
            .prop_map(|(a, b)| BasisIndex::new(a, b)),
    ]
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-5i64..=5, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn element() -> impl Strategy<Value = Element> {
    vec((basis_index(), scalar()), 0..4).prop_map(Element::from_terms)
}

fn word() -> impl Strategy<Value = LetterWord> {
    vec((any::<bool>(), -4i64..=4), 0..7).prop_map(|ls| {
        LetterWord::new(
            ls.into_iter()
                .map(|(c, i)| if c { Letter::creator(i) } else { Letter::annihilator(i) })
                .collect(),
        )
    })
}

fn fock_vector() -> impl Strategy<Value = FockVector> {
    vec((vec(-6i64..=6, 0..4), scalar()), 0..4).prop_map(|terms| {
        FockVector::from_terms(terms.into_iter().map(|(mut v, c)| {
            v.sort_unstable();
            v.dedup();
            (FockBasisVector::new(v).unwrap(), c)
        }))
    })
}

fn probe_vectors() -> Vec<FockBasisVector> {
    comparison_window(Some((-4, 4)), 4)
        .into_iter()
        .filter(|e| e.len() <= 3)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn product_is_associative(x in element(), y in element(), z in element()) {
        prop_assert_eq!(multiply(&multiply(&x, &y), &z), multiply(&x, &multiply(&y, &z)));
    }

    #[test]
    fn adjoint_reverses_products(x in element(), y in element()) {
        prop_assert_eq!(adjoint(&multiply(&x, &y)), multiply(&adjoint(&y), &adjoint(&x)));
        prop_assert_eq!(adjoint(&adjoint(&x)), x);
    }

    #[test]
    fn product_acts_as_composition(x in element(), y in element()) {
        let xy = multiply(&x, &y);
        for e in probe_vectors() {
            let v = FockVector::basis(e);
            prop_assert_eq!(apply_element(&xy, &v), apply_element(&x, &apply_element(&y, &v)));
        }
    }

    #[test]
    fn closed_form_matches_engine(b1 in basis_index(), b2 in basis_index()) {
        prop_assert_eq!(
            product_closed_form(&b1, &b2),
            multiply(&Element::basis(b1), &Element::basis(b2))
        );
    }

    #[test]
    fn normal_form_is_certified_equal(w in word()) {
        let x = normalize_word(&w);
        // Rebuild the word as a product of generators and compare both routes.
        let mut y = Element::identity();
        for l in w.letters() {
            let g = if l.is_creator() { BasisIndex::creator(l.index) } else { BasisIndex::annihilator(l.index) };
            y = multiply(&y, &Element::basis(g));
        }
        prop_assert_eq!(compare(&x, &y), Comparison::Equal);
    }

    #[test]
    fn trace_replays_to_normal_form(w in word()) {
        let (x, trace) = normalize_word_traced(&w);
        prop_assert_eq!(trace.replay(), Some(x));
    }

    #[test]
    fn matrix_elements_respect_adjoint(x in element(), xi in fock_vector(), eta in fock_vector()) {
        prop_assert_eq!(matrix_element(&x, &xi, &eta), matrix_element(&adjoint(&x), &eta, &xi));
    }

    #[test]
    fn distinct_elements_are_distinguished(x in element(), y in element()) {
        match compare(&x, &y) {
            Comparison::Equal => prop_assert_eq!(x, y),
            Comparison::Distinguished { witness, left, right } => {
                prop_assert_ne!(&left, &right);
                prop_assert_eq!(matrix_element(&x, &witness.xi, &witness.eta), left);
                prop_assert_eq!(matrix_element(&y, &witness.xi, &witness.eta), right);
            }
        }
    }

    #[test]
    fn shift_is_implemented_by_translation(
        k in -3i64..=3,
        x in element(),
        xi in fock_vector(),
        eta in fock_vector(),
    ) {
        prop_assert_eq!(
            matrix_element(&alpha(k, &x), &shift_vector(k, &xi), &shift_vector(k, &eta)),
            matrix_element(&x, &xi, &eta)
        );
    }

    #[test]
    fn shift_is_an_endomorphism(k in -3i64..=3, x in element(), y in element()) {
        prop_assert_eq!(alpha(k, &multiply(&x, &y)), multiply(&alpha(k, &x), &alpha(k, &y)));
        prop_assert_eq!(alpha(k, &adjoint(&x)), adjoint(&alpha(k, &x)));
    }

    #[test]
    fn permutations_commute_with_adjoint(
        cycle in proptest::sample::subsequence((-4i64..=4).collect::<Vec<_>>(), 2..6),
        shuffle in any::<proptest::sample::Index>(),
        x in element(),
    ) {
        let mut c = cycle;
        let last = c.len() - 1;
        let pick = shuffle.index(c.len());
        c.swap(pick, last);
        let sigma = Permutation::from_cycles(&[c]).unwrap();
        prop_assert_eq!(t_sigma(&sigma, &adjoint(&x)), adjoint(&t_sigma(&sigma, &x)));
    }

    #[test]
    fn vacuum_closed_form_matches_fock_space(x in element()) {
        prop_assert_eq!(evaluate(&StateSpec::Vacuum, &x), vacuum_expectation(&x));
    }

    #[test]
    fn states_are_positive(z in element(), p in 0i64..=4) {
        let states = [
            StateSpec::Vacuum,
            StateSpec::Infinity,
            StateSpec::mixed(ratio(p, 4)).unwrap(),
        ];
        for s in &states {
            prop_assert!(positivity_probe(s, &z) >= Scalar::from_integer(0.into()));
            prop_assert_eq!(evaluate(s, &Element::identity()), Scalar::from_integer(1.into()));
        }
    }

    #[test]
    fn text_round_trip(x in element()) {
        let printed = format_element(&x, OutputFormat::Text);
        prop_assert_eq!(parse_element(&printed), Ok(x));
    }

    #[test]
    fn partial_shifts_are_increasing(h in -10i64..=10, e in 0u64..4) {
        let window: Vec<Index> = (-30..=30).collect();
        for w in window.windows(2) {
            prop_assert!(PartialShift::theta(h).try_eval_power(e, w[0]) < PartialShift::theta(h).try_eval_power(e, w[1]));
            prop_assert!(PartialShift::psi(h).try_eval_power(e, w[0]) < PartialShift::psi(h).try_eval_power(e, w[1]));
        }
        prop_assert!(window.iter().all(|&k| PartialShift::theta(h).eval(k) != h));
        prop_assert!(window.iter().all(|&k| PartialShift::psi(h).eval(k) != h));
    }

    #[test]
    fn spread_witness_realizes_targets(
        m in -20i64..=20,
        steps in vec(1i64..=4, 0..6),
        offset in -10i64..=10,
    ) {
        let n = m + steps.len() as Index;
        let mut targets = vec![m + offset];
        for s in &steps {
            let last = *targets.last().unwrap();
            targets.push(last + s);
        }
        let r = spread_witness(m, n, &targets).unwrap();
        prop_assert!(r.is_partial_shift_word());
        for (j, l) in (m..=n).zip(&targets) {
            prop_assert_eq!(r.eval(j), *l);
        }
    }
}
