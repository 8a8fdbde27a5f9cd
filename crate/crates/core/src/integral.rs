//! Minimum spread over integral flows, for integer-valued `b` and unit
//! weights. For integer `kappa` the integral width is `ceil(s(kappa))`, and
//! since `s` is convex the best integer level is next to a real minimizer.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::balanced::{Algorithm, SolveOptions, SolveReport, Status};
use crate::error::{Error, Result};
use crate::feasibility::recover_integral_flow;
use crate::graph::{Digraph, FlowVector, VertexSet, WeightVector};
use crate::rational::{serde_rational, Rational};
use crate::setfn::SetOracle;
use crate::weighted::{KappaMax, WeightedSolver};

/// Integral optimum: every arc of the flow lies in `[kappa_i, kappa_i + sigma_i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralResult {
    #[serde(with = "serde_rational")]
    pub sigma_i: Rational,
    #[serde(with = "serde_rational")]
    pub kappa_i: Rational,
}

pub fn check_integral(b: &dyn SetOracle) -> Result<()> {
    match VertexSet::all(b.ground_size()).find(|&x| !b.eval(x).is_integer()) {
        Some(x) => Err(Error::NonIntegral(x)),
        None => Ok(()),
    }
}

/// `ceil(s(kappa))` with unit weights.
pub fn s_i(g: &Digraph, b: &dyn SetOracle, kappa: &Rational, opts: &SolveOptions) -> Result<Rational> {
    if !kappa.is_integer() {
        return Err(Error::InvalidParameter(format!(
            "integral level must be an integer, got {kappa}"
        )));
    }
    check_integral(b)?;
    let w = WeightVector::unit(g.arc_count());
    let solver = WeightedSolver::new(g, b, &w, opts.sfm)?;
    let r = solver.s_kappa(kappa)?;
    r.sigma
        .map(|s| s.ceil())
        .ok_or_else(|| Error::UndefinedSKappa(kappa.to_string()))
}

/// Fractional optimum, then the better of the two integer levels around its
/// minimizer, then an integral flow in that box. The flow is always
/// recovered; `opts.emit_flow` is ignored.
pub fn solve_integral(g: &Digraph, b: &dyn SetOracle, opts: &SolveOptions) -> Result<SolveReport> {
    check_integral(b)?;
    let w = WeightVector::unit(g.arc_count());
    let solver = WeightedSolver::new(g, b, &w, opts.sfm)?;
    let opt = match solver.optimum() {
        Ok(opt) => opt,
        Err(Error::Infeasible(set)) => {
            return Ok(SolveReport::infeasible(
                Algorithm::Integral,
                set,
                solver.trace(),
                solver.sfm_calls(),
            ));
        }
        Err(e) => return Err(e),
    };
    let kmax = if solver.is_constant() {
        KappaMax::Unbounded
    } else {
        solver.kappa_max()?
    };
    let lo = opt.kappa.floor();
    let hi = opt.kappa.ceil();
    let mut best: Option<(Rational, Rational)> = None;
    let mut levels = vec![lo.clone()];
    if hi != lo && kmax.admits(&hi) {
        levels.push(hi);
    }
    for k in levels {
        let s = solver
            .s_kappa(&k)?
            .sigma
            .ok_or_else(|| Error::UndefinedSKappa(k.to_string()))?
            .ceil();
        if best.as_ref().is_none_or(|(bs, _)| &s < bs) {
            best = Some((s, k));
        }
    }
    let (sigma_i, kappa_i) = best.expect("floor of a feasible level is feasible");
    let m = g.arc_count();
    let top = &kappa_i + &sigma_i;
    let flow = recover_integral_flow(
        g,
        b,
        &FlowVector::constant(m, &kappa_i),
        &FlowVector::constant(m, &top),
        opts.sfm,
    )?;
    debug_assert!(!sigma_i.is_zero() || flow.0.iter().all(|x| x == &kappa_i));
    let trace = solver.trace();
    Ok(SolveReport {
        algorithm: Algorithm::Integral,
        status: Status::Optimal,
        certificate: Some(opt.certificate()),
        infeasible_set: None,
        flow: Some(flow),
        integral: Some(IntegralResult { sigma_i, kappa_i }),
        iterations: trace.len(),
        sfm_calls: solver.sfm_calls(),
        trace,
    })
}
