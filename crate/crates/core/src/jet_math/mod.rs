//! Taylor-jet arithmetic and the phase-expression language.
//!
//! Expressions are parsed once into a [`PhaseExpr`] tree and evaluated on
//! either plain `f64` or [`Jet3`] inputs, which gives θ̇, θ̈ and θ⃛ to
//! round-off without finite differences.

mod expr;
mod jet;
mod parser;

pub use expr::{
    eval_jet, parse, schwarzian, schwarzian_of_jet, BinOp, EvalError, Func, Node, PhaseExpr,
    SchwarzianError, DEFAULT_DERIVATIVE_FLOOR,
};
pub use jet::{Jet3, Scalar};
pub use parser::{ParseError, ParseErrorKind};
