//! The vacuum state, the state at infinity and their convex mixtures.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{basis_window, BasisIndex, BasisKind, Element, Index};
use crate::fock::{matrix_element, FockVector};
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use crate::symmetry::{alpha, beta, gamma, t_sigma, Permutation};
use crate::wick::{adjoint, multiply};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("mixing weight {0} is outside [0, 1]")]
    WeightOutOfRange(String),
    #[error("unknown state `{0}` (expected vacuum, infinity or mixed:x)")]
    Unknown(String),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarParseError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSpec {
    /// `X ↦ <X Ω, Ω>`
    Vacuum,
    /// Coefficient of the identity.
    Infinity,
    /// `(1-x)·infinity + x·vacuum`
    Mixed(Scalar),
}

impl StateSpec {
    pub fn mixed(x: Scalar) -> Result<Self, StateError> {
        if x < Scalar::zero() || x > Scalar::one() {
            return Err(StateError::WeightOutOfRange(format_scalar(&x)));
        }
        Ok(StateSpec::Mixed(x))
    }
}

impl FromStr for StateSpec {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "vacuum" => Ok(StateSpec::Vacuum),
            "infinity" => Ok(StateSpec::Infinity),
            other => match other.strip_prefix("mixed:") {
                Some(x) => StateSpec::mixed(parse_scalar(x)?),
                None => Err(StateError::Unknown(other.to_string())),
            },
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Vacuum => f.write_str("vacuum"),
            StateSpec::Infinity => f.write_str("infinity"),
            StateSpec::Mixed(x) => write!(f, "mixed:{}", format_scalar(x)),
        }
    }
}

fn vacuum_closed_form(x: &Element) -> Scalar {
    x.iter()
        .filter(|(b, _)| matches!(b.kind(), BasisKind::Identity | BasisKind::TrivialPi(_)))
        .map(|(_, c)| c.clone())
        .sum()
}

/// Closed form on the basis expansion: only the identity and the
/// projections `a(k)c(k)` have nonzero vacuum expectation, all equal to one.
pub fn evaluate(s: &StateSpec, x: &Element) -> Scalar {
    match s {
        StateSpec::Vacuum => vacuum_closed_form(x),
        StateSpec::Infinity => x.coeff(&BasisIndex::identity()),
        StateSpec::Mixed(w) => {
            (Scalar::one() - w) * x.coeff(&BasisIndex::identity()) + w * vacuum_closed_form(x)
        }
    }
}

/// `<X Ω, Ω>` computed on the Fock space.
pub fn vacuum_expectation(x: &Element) -> Scalar {
    let omega = FockVector::vacuum();
    matrix_element(x, &omega, &omega)
}

/// `s(z* z)`, which a state keeps nonnegative.
pub fn positivity_probe(s: &StateSpec, z: &Element) -> Scalar {
    evaluate(s, &multiply(&adjoint(z), z))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    Beta(Index),
    Gamma(Index),
    Alpha(Index),
    TSigma(Permutation),
}

impl Transform {
    pub fn apply(&self, x: &Element) -> Element {
        match self {
            Transform::Beta(k) => beta(*k, x),
            Transform::Gamma(k) => gamma(*k, x),
            Transform::Alpha(k) => alpha(*k, x),
            Transform::TSigma(p) => t_sigma(p, x),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Beta(k) => write!(f, "beta({k})"),
            Transform::Gamma(k) => write!(f, "gamma({k})"),
            Transform::Alpha(k) => write!(f, "alpha({k})"),
            Transform::TSigma(p) => write!(f, "t_sigma{p}"),
        }
    }
}

/// Basis words with every index in `[lo, hi]` and length at most `max_len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisWindow {
    pub lo: Index,
    pub hi: Index,
    pub max_len: usize,
}

impl Default for BasisWindow {
    fn default() -> Self {
        BasisWindow {
            lo: -5,
            hi: 5,
            max_len: 5,
        }
    }
}

impl BasisWindow {
    pub fn words(&self) -> Vec<BasisIndex> {
        basis_window(self.lo, self.hi, self.max_len)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub basis: BasisIndex,
    pub expected: Scalar,
    pub found: Scalar,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvarianceReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl InvarianceReport {
    pub fn is_invariant(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares `s ∘ t` with `s` on every basis word of the window.
pub fn check_invariance(s: &StateSpec, t: &Transform, window: &BasisWindow) -> InvarianceReport {
    let mut report = InvarianceReport::default();
    for b in window.words() {
        let x = Element::basis(b.clone());
        let expected = evaluate(s, &x);
        let found = evaluate(s, &t.apply(&x));
        report.checked += 1;
        if expected != found {
            report.violations.push(Violation {
                basis: b,
                expected,
                found,
            });
        }
    }
    report
}
