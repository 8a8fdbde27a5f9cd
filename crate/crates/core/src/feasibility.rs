//! Box-constrained feasibility: does a submodular flow `x` with `l <= x <= u`
//! exist, and if so, find one.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{check_len, Digraph, FlowVector, VertexSet};
use crate::rational::{one, Rational};
use crate::setfn::{Composite, CutKind, SetOracle, Sfm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Infeasibility {
    /// `l > u` on this arc.
    CrossedBounds { arc: usize },
    /// `entering_l(X) - leaving_u(X) > b(X)`.
    ViolatedSet(VertexSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityOutcome {
    Feasible,
    Infeasible(Infeasibility),
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible)
    }
}

/// `b(X) - entering_l(X) + leaving_u(X)`; the box is feasible iff its minimum is nonnegative.
pub fn margin_function<'a>(
    g: &'a Digraph,
    b: &'a dyn SetOracle,
    l: &'a [Rational],
    u: &'a [Rational],
) -> Composite<'a> {
    Composite::new(b, g)
        .term(CutKind::Entering, -one(), Some(l))
        .term(CutKind::Leaving, one(), Some(u))
}

pub fn check_feasible(
    g: &Digraph,
    b: &dyn SetOracle,
    l: &FlowVector,
    u: &FlowVector,
    sfm: &dyn Sfm,
) -> Result<FeasibilityOutcome> {
    check_len(g, l.len())?;
    check_len(g, u.len())?;
    if let Some(arc) = (0..l.len()).find(|&a| l.0[a] > u.0[a]) {
        return Ok(FeasibilityOutcome::Infeasible(Infeasibility::CrossedBounds { arc }));
    }
    let r = sfm.argmin(&margin_function(g, b, &l.0, &u.0))?;
    Ok(if r.value.is_negative() {
        FeasibilityOutcome::Infeasible(Infeasibility::ViolatedSet(r.minimizer))
    } else {
        FeasibilityOutcome::Feasible
    })
}

/// Finds a submodular flow inside `[l, u]` by fixing arcs one at a time, in
/// index order, to the smallest value that keeps the remaining box feasible.
///
/// For a single arc the margin `min_X [b(X) - entering_l(X) + leaving_u(X)]`
/// is concave and piecewise linear in the arc's value, so the smallest
/// feasible value is reached by Newton steps from the lower bound, each step
/// costing one minimization.
pub fn recover_flow(
    g: &Digraph,
    b: &dyn SetOracle,
    l: &FlowVector,
    u: &FlowVector,
    sfm: &dyn Sfm,
) -> Result<FlowVector> {
    fix_arcs(g, b, l, u, sfm, false)
}

/// As [`recover_flow`] for integral `b`, `l`, `u`; returns an integral flow.
pub fn recover_integral_flow(
    g: &Digraph,
    b: &dyn SetOracle,
    l: &FlowVector,
    u: &FlowVector,
    sfm: &dyn Sfm,
) -> Result<FlowVector> {
    if !l.is_integral() || !u.is_integral() {
        return Err(Error::InvalidParameter(
            "integral recovery needs integral bounds".into(),
        ));
    }
    fix_arcs(g, b, l, u, sfm, true)
}

fn fix_arcs(
    g: &Digraph,
    b: &dyn SetOracle,
    l: &FlowVector,
    u: &FlowVector,
    sfm: &dyn Sfm,
    integral: bool,
) -> Result<FlowVector> {
    if let FeasibilityOutcome::Infeasible(why) = check_feasible(g, b, l, u, sfm)? {
        return Err(match why {
            Infeasibility::CrossedBounds { arc } => Error::CrossedBounds(arc),
            Infeasibility::ViolatedSet(x) => Error::InfeasibleBox(x),
        });
    }
    let mut lower = l.0.clone();
    let mut upper = u.0.clone();
    for e in 0..g.arc_count() {
        let mut t = lower[e].clone();
        loop {
            lower[e] = t.clone();
            upper[e] = t.clone();
            let r = sfm.argmin(&margin_function(g, b, &lower, &upper))?;
            if !r.value.is_negative() {
                break;
            }
            // d(margin of X)/dt is +1 if e leaves X and -1 if it enters
            let slope = -g.crossing(e, r.minimizer);
            if slope <= 0 {
                return Err(Error::InfeasibleBox(r.minimizer));
            }
            t -= &r.value;
            if integral {
                t = t.ceil();
            }
            if t > u.0[e] {
                return Err(Error::InfeasibleBox(r.minimizer));
            }
        }
        debug_assert!(!integral || t.is_integer());
    }
    debug_assert!(lower.iter().zip(&l.0).all(|(x, lo)| (x - lo) >= Rational::zero()));
    Ok(FlowVector(lower))
}
