//! Exact operator-ordering algebra for a single bosonic mode with `[Q, P] = i`,
//! together with the numeric machinery used to check it: truncated Fock-space
//! matrices, the Wigner operator as a displaced parity, and the two-fold
//! phase-space transform with kernel `e^{±2i(p-p')(q-q')}/π`.
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the
//! command-line front end live in the `weylcalc` crate.

#![no_std]

extern crate alloc;

pub mod exactnum;
pub mod exprio;
pub mod fockspace;
pub mod opalg;
pub mod phasexform;
pub mod ordering;

pub use exactnum::{ExactError, ExactScalar, Rational};
pub use exprio::{parse, parse_polynomial, render, ParseError, Parsed};
pub use fockspace::{FockError, FockMatrix, PhasePoint};
pub use opalg::{FreeExpression, LadderPolynomial, Monomial, OrderTag, OrderedPolynomial, Symbol};
pub use ordering::CommutativePoly2;
pub use phasexform::SampledField;
