//! Positive representations of split real quantum Borel algebras.
//!
//! Exact exponential-operator algebra over formal `q`, the standard
//! presentations for types A1, A2, A3 and B2, quantum-dilogarithm rewriting
//! scripts, and numerical checks of the non-compact quantum dilogarithm.

pub mod cartan;
pub mod dilog;
pub mod error;
pub mod linalg;
pub mod opalg;
pub mod qscalar;
pub mod repbuild;
pub mod rewrite;
pub mod verify;

pub use cartan::{
    cartan_datum, check_longest_word, coordinate_labels, CartanDatum, CoordinateLabels, LieType,
    ReducedWord,
};
pub use dilog::BParam;
pub use error::{Error, Result};
pub use opalg::{
    bracket, embed_leg, is_standard_positive, q_commutator, ExpMonomial, Exponent, OperatorSum,
    PositiveTerm, VariableSpace,
};
pub use qscalar::{QScalar, Rat};
pub use repbuild::{
    build_canonical, build_preset, coproduct, flip, nonsimple_vectors, Generator, LambdaMode,
    Representation,
};
pub use rewrite::{
    apply_script, apply_script_rep, builtin_script, dilog_conjugate, remove_lambda, Direction,
    Move, TransformScript,
};
pub use verify::{Check, CheckReport};
