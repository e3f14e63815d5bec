//! Least fixed points of guarded recursion schemes over hereditarily finite
//! lists, with an abstract cost model and audits of the polynomial bounds.
//!
//! A [`GnfSystem`] is loaded from a `.gnf` file, checked against the five
//! structural conditions, then evaluated on demand ([`engine::evaluate`]) or
//! stage by stage over a finite slice ([`engine::run_to_fixpoint`]).

pub mod complexity;
pub mod cost;
pub mod element;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod poly;
pub mod signature;
pub mod system;
pub mod term;

pub use cost::{Charge, Meter, COST_MODEL_VERSION};
pub use element::{parse_element, render_element, Alphabet, Atom, HElement, SizeRank};
pub use error::{EvalError, FitError, StripError, SyntaxError, SystemError, TermError, UniverseError};
pub use signature::{Arity, BaseOpDecl, Builtin, CostFn, Signature, SizeLaw};
pub use system::{CheckReport, Condition, GnfSystem};
pub use term::{parse_term, strip_recursive, Term};

/// Exact bound values.
pub type Bound = num_bigint::BigUint;
/// Symbolic costs, in the total size of the bound variables.
pub type CostPoly = poly::Poly<num_bigint::BigInt>;
/// Fitted log-log slopes.
pub type Exponent = f64;
