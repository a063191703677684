//! Third-order traffic model: closures, wave structure, exact Riemann solver,
//! microscopic car-following simulators, finite-volume relaxation solvers and
//! stability diagnostics.

pub mod analysis;
pub mod closures;
pub mod error;
pub mod macrosolve;
pub mod micro;
pub mod ode;
pub mod output;
pub mod riemann;
pub mod state;
pub mod waves;

pub use closures::{BivariateClosure, ClosureKind, ClosureSet, Domain, ScalarClosure};
pub use error::{Result, TomError};
pub use riemann::{solve_riemann, Region, RiemannSolution, Wave1};
pub use state::{ConsState, LagState, PrimState};
