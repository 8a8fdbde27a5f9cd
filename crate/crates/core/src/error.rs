use thiserror::Error;

use crate::graph::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("ground set of {n} elements exceeds the enumeration limit of {max}")]
    GroundSetTooLarge { n: usize, max: usize },
    #[error("arc {arc} references vertex {vertex}, but the graph has {n} vertices")]
    ArcOutOfRange { arc: usize, vertex: usize, n: usize },
    #[error("vertex {0} is isolated (no arc crosses its boundary)")]
    IsolatedVertex(usize),
    #[error("vector has length {found}, expected one entry per arc ({expected})")]
    LengthMismatch { expected: usize, found: usize },
    #[error("set function is defined on {found} elements, graph has {expected} vertices")]
    GroundSetMismatch { expected: usize, found: usize },
    #[error("weight of arc {arc} is {value}, weights must be strictly positive")]
    NonPositiveWeight { arc: usize, value: String },
    #[error("capacity of auxiliary arc {arc} is negative")]
    NegativeCapacity { arc: usize },
    #[error("table has {found} entries, expected 2^{n} = {expected}")]
    TableSize { n: usize, expected: usize, found: usize },
    #[error("set function is not submodular: b(X+{v}) + b(X+{w}) < b(X+{v}+{w}) + b(X) at X = {x}")]
    NotSubmodular { x: VertexSet, v: usize, w: usize },
    #[error("set {0} has no boundary arcs but a negative value, so no submodular flow exists")]
    BoundaryFreeDeficit(VertexSet),
    #[error("spread is undefined for a vector with no entries")]
    EmptyVector,
    #[error("the set function must be integer valued (b({0}) is not an integer)")]
    NonIntegral(VertexSet),
    #[error("the graph is not Eulerian; use a non-Eulerian solver")]
    NotEulerian,
    #[error("the graph is Eulerian; use the Eulerian solver")]
    EulerianInput,
    #[error("dual ratio is undefined for ({x}, {y}): zero denominator")]
    DegenerateRatio { x: VertexSet, y: VertexSet },
    #[error("lower bound exceeds upper bound on arc {0}")]
    CrossedBounds(usize),
    #[error("box is infeasible: set {0} violates the cut condition")]
    InfeasibleBox(VertexSet),
    #[error("s(kappa) is undefined at kappa = {0}")]
    UndefinedSKappa(String),
    #[error("invalid bracket: subgradients {alpha} and {beta} must be negative and positive")]
    InvalidBracket { alpha: String, beta: String },
    #[error("the submodular flow problem is infeasible (certificate {0})")]
    Infeasible(VertexSet),
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
