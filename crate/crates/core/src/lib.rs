//! Exact symbolic kernel for the *-algebra generated by monotone creation and
//! annihilation operators on the monotone Fock space.
//!
//! * [`algebra`]: generators, raw words, basis indices, linear combinations.
//! * [`wick`]: normal ordering into the Hamel basis, products, adjoints.
//! * [`fock`]: exact matrix-free Fock-space model used as an oracle.
//! * [`symmetry`]: partial shifts, the shift, permutations and their actions.
//! * [`states`]: the vacuum state, the state at infinity and their mixtures.
//! * [`expr`]: a small operator-expression language.
//! * [`suites`]: reproducible verification suites.

pub mod algebra;
pub mod expr;
pub mod fock;
pub mod scalar;
pub mod states;
pub mod suites;
pub mod symmetry;
pub mod wick;

pub use algebra::{BasisIndex, BasisKind, Element, Index, Letter, LetterKind, LetterWord};
pub use scalar::Scalar;
