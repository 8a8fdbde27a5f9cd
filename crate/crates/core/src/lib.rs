//! Minimum-spread submodular flows with exact rational arithmetic.
//!
//! A submodular flow on a digraph is an arc vector `x` whose net inflow into
//! every vertex set `X` is at most `b(X)` for a submodular `b`. The solvers
//! here find such a flow whose largest and smallest arc values (optionally
//! scaled by arc weights) are as close as possible, together with a dual
//! certificate proving the gap cannot be smaller.

pub mod balanced;
pub mod commands;
pub mod error;
pub mod feasibility;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod integral;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod setfn;
pub mod weighted;

pub use balanced::{
    kappa_xy, sigma_xy, solve_basic_xy, solve_eulerian, solve_improved_xy, Algorithm, DualCertificate, SolveOptions,
    SolveReport, Status, TraceStep,
};
pub use error::{Error, Result};
pub use feasibility::{check_feasible, recover_flow, recover_integral_flow, FeasibilityOutcome};
pub use graph::{spread, weighted_spread, Digraph, FlowVector, VertexSet, WeightVector};
pub use integral::{s_i, solve_integral, IntegralResult};
pub use rational::Rational;
pub use setfn::{BruteForceSfm, SetFunction, SetOracle, Sfm};
pub use weighted::{kappa_max, s_kappa, solve_weighted, KappaMax, SKappaResult};
