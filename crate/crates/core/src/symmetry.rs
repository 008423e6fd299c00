//! Index relabelings and the maps they induce on elements.
//!
//! Partial shifts `θ_h`, `ψ_h` generate a monoid of strictly increasing maps
//! of the integers; the shift `τ` and finite permutations act alongside them.
//! Strictly increasing maps act on basis words componentwise. Permutations
//! act through `t_sigma`, which kills every word on whose creator or
//! annihilator block the permutation is not increasing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{BasisIndex, Element, Index};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("map is not strictly increasing on {0:?}")]
    NotOrderPreserving(Vec<Index>),
    #[error("index arithmetic overflowed")]
    Overflow,
    #[error("targets must be strictly increasing, got {0:?}")]
    NotIncreasing(Vec<Index>),
    #[error("interval [{m},{n}] needs {expected} targets, got {got}")]
    TargetCount {
        m: Index,
        n: Index,
        expected: u128,
        got: usize,
    },
    #[error("empty interval [{0},{1}]")]
    EmptyInterval(Index, Index),
    #[error("point {0} appears in more than one cycle position")]
    RepeatedPoint(Index),
    #[error("malformed permutation `{0}`")]
    MalformedPermutation(String),
    #[error("malformed map `{0}`")]
    MalformedMap(String),
}

/// A map of the integers that can be evaluated pointwise.
pub trait IndexMap {
    /// `None` on arithmetic overflow.
    fn try_eval(&self, k: Index) -> Option<Index>;

    fn eval(&self, k: Index) -> Index {
        self.try_eval(k).expect("index overflow")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    Theta,
    Psi,
}

/// `θ_h(k) = k` below `h`, `k+1` from `h` on.
/// `ψ_h(k) = k-1` up to `h`, `k` above `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartialShift {
    pub kind: ShiftKind,
    pub base: Index,
}

impl PartialShift {
    pub fn theta(h: Index) -> Self {
        PartialShift {
            kind: ShiftKind::Theta,
            base: h,
        }
    }

    pub fn psi(h: Index) -> Self {
        PartialShift {
            kind: ShiftKind::Psi,
            base: h,
        }
    }

    /// `self` applied `power` times.
    pub fn try_eval_power(&self, power: u64, k: Index) -> Option<Index> {
        let p = Index::try_from(power).ok()?;
        match self.kind {
            ShiftKind::Theta if k >= self.base => k.checked_add(p),
            ShiftKind::Psi if k <= self.base => k.checked_sub(p),
            _ => Some(k),
        }
    }
}

impl IndexMap for PartialShift {
    fn try_eval(&self, k: Index) -> Option<Index> {
        self.try_eval_power(1, k)
    }
}

/// One factor of a monoid word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Partial { shift: PartialShift, power: u64 },
    /// `τ^k`, any sign.
    Tau(Index),
}

impl Generator {
    pub fn theta(h: Index, power: u64) -> Self {
        Generator::Partial {
            shift: PartialShift::theta(h),
            power,
        }
    }

    pub fn psi(h: Index, power: u64) -> Self {
        Generator::Partial {
            shift: PartialShift::psi(h),
            power,
        }
    }
}

impl IndexMap for Generator {
    fn try_eval(&self, k: Index) -> Option<Index> {
        match *self {
            Generator::Partial { shift, power } => shift.try_eval_power(power, k),
            Generator::Tau(s) => k.checked_add(s),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::Partial { shift, power } => {
                let name = match shift.kind {
                    ShiftKind::Theta => "theta",
                    ShiftKind::Psi => "psi",
                };
                write!(f, "{name}:{}", shift.base)?;
                if power != 1 {
                    write!(f, "^{power}")?;
                }
                Ok(())
            }
            Generator::Tau(k) => write!(f, "tau:{k}"),
        }
    }
}

impl FromStr for Generator {
    type Err = SymmetryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SymmetryError::MalformedMap(s.to_string());
        let (name, rest) = s.split_once(':').ok_or_else(bad)?;
        let (base, power) = match rest.split_once('^') {
            Some((b, p)) => (b, Some(p)),
            None => (rest, None),
        };
        let base: Index = base.parse().map_err(|_| bad())?;
        let power: u64 = match power {
            Some(p) => p.parse().map_err(|_| bad())?,
            None => 1,
        };
        match name {
            "theta" => Ok(Generator::theta(base, power)),
            "psi" => Ok(Generator::psi(base, power)),
            "tau" if power == 1 => Ok(Generator::Tau(base)),
            "tau" => base
                .checked_mul(Index::try_from(power).map_err(|_| SymmetryError::Overflow)?)
                .map(Generator::Tau)
                .ok_or(SymmetryError::Overflow),
            _ => Err(bad()),
        }
    }
}

/// A word in the generators, written in functional order: the rightmost
/// factor is applied first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MonoidElement {
    factors: Vec<Generator>,
}

impl MonoidElement {
    pub fn identity() -> Self {
        MonoidElement::default()
    }

    pub fn new(factors: Vec<Generator>) -> Self {
        MonoidElement { factors }
    }

    pub fn factors(&self) -> &[Generator] {
        &self.factors
    }

    /// True when every factor is a partial shift.
    pub fn is_partial_shift_word(&self) -> bool {
        self.factors
            .iter()
            .all(|g| matches!(g, Generator::Partial { .. }))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &MonoidElement) -> MonoidElement {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        MonoidElement { factors }
    }
}

impl IndexMap for MonoidElement {
    fn try_eval(&self, k: Index) -> Option<Index> {
        self.factors.iter().rev().try_fold(k, |acc, g| g.try_eval(acc))
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("id");
        }
        for (n, g) in self.factors.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for MonoidElement {
    type Err = SymmetryError;

    /// Whitespace-separated `theta:h[^e]`, `psi:h[^e]`, `tau:k`; `id` or
    /// blank is the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "id" {
            return Ok(MonoidElement::identity());
        }
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(MonoidElement::new)
    }
}

/// A finitely supported bijection of the integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// Non-fixed points only.
    moves: BTreeMap<Index, Index>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    pub fn transposition(i: Index, j: Index) -> Self {
        Permutation::from_cycles(&[vec![i, j]]).expect("two points")
    }

    /// Disjoint cycles; `(a b c)` sends `a→b→c→a`.
    pub fn from_cycles(cycles: &[Vec<Index>]) -> Result<Self, SymmetryError> {
        let mut seen = BTreeSet::new();
        let mut moves = BTreeMap::new();
        for cycle in cycles {
            for &p in cycle {
                if !seen.insert(p) {
                    return Err(SymmetryError::RepeatedPoint(p));
                }
            }
            if cycle.len() < 2 {
                continue;
            }
            for (n, &p) in cycle.iter().enumerate() {
                moves.insert(p, cycle[(n + 1) % cycle.len()]);
            }
        }
        Ok(Permutation { moves })
    }

    /// Builds from explicit `(from, to)` pairs; they must form a bijection
    /// of their support.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Index, Index)>) -> Result<Self, SymmetryError> {
        let mut moves = BTreeMap::new();
        for (a, b) in pairs {
            if moves.insert(a, b).is_some() {
                return Err(SymmetryError::RepeatedPoint(a));
            }
        }
        let domain: BTreeSet<Index> = moves.keys().copied().collect();
        let image: BTreeSet<Index> = moves.values().copied().collect();
        if domain != image || image.len() != moves.len() {
            return Err(SymmetryError::MalformedPermutation(format!("{moves:?}")));
        }
        moves.retain(|a, b| a != b);
        Ok(Permutation { moves })
    }

    pub fn support(&self) -> impl Iterator<Item = Index> + '_ {
        self.moves.keys().copied()
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            moves: self.moves.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    pub fn cycles(&self) -> Vec<Vec<Index>> {
        let mut done = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.moves.keys() {
            if done.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            done.insert(start);
            let mut p = self.moves[&start];
            while p != start {
                cycle.push(p);
                done.insert(p);
                p = self.moves[&p];
            }
            out.push(cycle);
        }
        out
    }
}

impl IndexMap for Permutation {
    fn try_eval(&self, k: Index) -> Option<Index> {
        Some(self.moves.get(&k).copied().unwrap_or(k))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(Index::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = SymmetryError;

    /// Cycle notation such as `(0 1)(3 5 4)`; `()` or blank is the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SymmetryError::MalformedPermutation(s.to_string());
        let mut rest = s.trim();
        let mut cycles = Vec::new();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let points = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<Index>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            cycles.push(points);
            rest = body[close + 1..].trim_start();
        }
        Permutation::from_cycles(&cycles)
    }
}

/// True iff `g` is strictly increasing on the ascending set `s`.
pub fn is_order_preserving<M: IndexMap + ?Sized>(g: &M, s: &[Index]) -> bool {
    s.windows(2).all(|w| g.eval(w[0]) < g.eval(w[1]))
}

fn map_set<M: IndexMap + ?Sized>(g: &M, s: &[Index]) -> Result<Vec<Index>, SymmetryError> {
    s.iter()
        .map(|&i| g.try_eval(i).ok_or(SymmetryError::Overflow))
        .collect()
}

/// Componentwise image `(g(l1), g(l2))`; `g` must be strictly increasing on
/// `l1 ∪ l2`.
pub fn act_on_index<M: IndexMap + ?Sized>(g: &M, b: &BasisIndex) -> Result<BasisIndex, SymmetryError> {
    let union: BTreeSet<Index> = b.indices().collect();
    let union: Vec<Index> = union.into_iter().collect();
    let image = map_set(g, &union)?;
    if !image.windows(2).all(|w| w[0] < w[1]) {
        return Err(SymmetryError::NotOrderPreserving(union));
    }
    Ok(BasisIndex::from_sorted(map_set(g, b.l1())?, map_set(g, b.l2())?))
}

/// Linear extension of [`act_on_index`].
pub fn act<M: IndexMap + ?Sized>(g: &M, x: &Element) -> Result<Element, SymmetryError> {
    let mut out = Element::zero();
    for (b, c) in x.iter() {
        out.add_term(act_on_index(g, b)?, c.clone());
    }
    Ok(out)
}

fn act_increasing<M: IndexMap>(g: &M, x: &Element) -> Element {
    act(g, x).unwrap_or_else(|e| panic!("{e}"))
}

/// Induced by `θ_k`.
pub fn beta(k: Index, x: &Element) -> Element {
    act_increasing(&PartialShift::theta(k), x)
}

/// Induced by `ψ_k`.
pub fn gamma(k: Index, x: &Element) -> Element {
    act_increasing(&PartialShift::psi(k), x)
}

/// Induced by `τ^k`.
pub fn alpha(k: Index, x: &Element) -> Element {
    act_increasing(&Generator::Tau(k), x)
}

/// Permutation action on basis words: the componentwise image when `σ` is
/// increasing on both `l1` and `l2`, zero otherwise. Linear and compatible
/// with the adjoint, but neither multiplicative nor positive.
pub fn t_sigma(sigma: &Permutation, x: &Element) -> Element {
    x.map_basis(|b| {
        if is_order_preserving(sigma, b.l1()) && is_order_preserving(sigma, b.l2()) {
            let l1 = b.l1().iter().map(|&i| sigma.eval(i)).collect();
            let l2 = b.l2().iter().map(|&i| sigma.eval(i)).collect();
            Element::basis(BasisIndex::from_sorted(l1, l2))
        } else {
            Element::zero()
        }
    })
}

fn theta_chain(start: Index, targets: &[Index]) -> Result<Vec<Generator>, SymmetryError> {
    // Application order; zero exponents dropped.
    let mut chain = Vec::new();
    let mut push = |h: Index, e: i128| -> Result<(), SymmetryError> {
        let e = u64::try_from(e).map_err(|_| SymmetryError::Overflow)?;
        if e > 0 {
            chain.push(Generator::theta(h, e));
        }
        Ok(())
    };
    push(start, targets[0] as i128 - start as i128)?;
    for w in targets.windows(2) {
        let h = w[0].checked_add(1).ok_or(SymmetryError::Overflow)?;
        push(h, w[1] as i128 - w[0] as i128 - 1)?;
    }
    Ok(chain)
}

/// A partial-shift word `r` with `r(j) = targets[j - m]` for every `j` in
/// `[m, n]`. Built as `θ_{l(n-1)+1}^{l(n)-l(n-1)-1} ⋯ θ_m^{l(m)-m}`, preceded
/// (in application order) by `ψ_n^{m-l(m)}` when `l(m) < m`. Factors with
/// exponent zero are omitted.
pub fn spread_witness(m: Index, n: Index, targets: &[Index]) -> Result<MonoidElement, SymmetryError> {
    if m > n {
        return Err(SymmetryError::EmptyInterval(m, n));
    }
    let expected = (n as i128 - m as i128 + 1) as u128;
    if targets.len() as u128 != expected {
        return Err(SymmetryError::TargetCount {
            m,
            n,
            expected,
            got: targets.len(),
        });
    }
    if !targets.windows(2).all(|w| w[0] < w[1]) {
        return Err(SymmetryError::NotIncreasing(targets.to_vec()));
    }
    let lm = targets[0];
    let mut applied = Vec::new();
    let start = if lm < m {
        let d = u64::try_from(m as i128 - lm as i128).map_err(|_| SymmetryError::Overflow)?;
        applied.push(Generator::psi(n, d));
        lm
    } else {
        m
    };
    applied.extend(theta_chain(start, targets)?);
    applied.reverse();
    Ok(MonoidElement::new(applied))
}

/// A cycle agreeing with `τ` on every index of `b` and increasing on
/// `l1 ∪ l2`: `x ↦ x+1` on `[min, max]` and `max+1 ↦ min`.
pub fn cycle_for_shift(b: &BasisIndex) -> Permutation {
    let (Some(lo), Some(hi)) = (b.min_index(), b.max_index()) else {
        return Permutation::identity();
    };
    let top = hi.checked_add(1).expect("index overflow");
    let pairs = (lo..=hi).map(|x| (x, x + 1)).chain(std::iter::once((top, lo)));
    Permutation::from_pairs(pairs).expect("a single cycle")
}
