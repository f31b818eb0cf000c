//! Exact minimization of integer-valued submodular functions given as sums
//! of low-order terms,
//!
//! ```text
//! f(S) = offset + Σ_{i∈S} c_it + Σ_{i∉S} c_si + Σ_Q f_Q(S ∩ Q),
//! ```
//!
//! by capacity scaling with augmenting paths. Four term kinds are
//! supported: pairwise, concave cardinality `g(|S∩Q|)`, bi-cardinality
//! `g(|S∩Q'|, |S∩Q''|)` and arbitrary tables.
//!
//! Everything is generic over the integer [`Weight`]; the aliases at the
//! crate root fix it to `i64`.
//!
//! ```
//! use submin::{solve, Instance, Term};
//!
//! let instance = Instance::builder(2)
//!     .unary(0, 3, 0)
//!     .unary(1, 0, 2)
//!     .term(Term::pairwise(0, 1, 1, 1))
//!     .build()
//!     .unwrap();
//! let result = solve(&instance).unwrap();
//! assert_eq!(result.minimum, 1);
//! assert_eq!(result.minimizer, vec![0]);
//! ```

pub mod error;
pub mod instance;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod phase;
pub mod smawk;
pub mod solver;
pub mod term;
pub mod weight;

pub use error::{Error, Result};
pub use instance::{TermKind, ValidationReport, Violation};
pub use solver::{solve, solve_with, AugmentingPath, Hop, SolveOptions};
pub use term::{TermCounters, TermOps};
pub use weight::Weight;

pub type Instance = instance::Instance<i64>;
pub type InstanceBuilder = instance::InstanceBuilder<i64>;
pub type Term = instance::Term<i64>;
pub type Phase = phase::Phase<i64>;
pub type SolveResult = solver::SolveResult<i64>;
pub type PhaseStats = solver::PhaseStats<i64>;
pub type Solver<'a> = solver::Solver<'a, i64>;
pub type TermState = term::TermState<i64>;
