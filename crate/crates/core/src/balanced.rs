//! Minimum-spread submodular flows with unit weights.
//!
//! Three solvers are provided:
//!
//! * [`solve_eulerian`]: when in-degree equals out-degree everywhere, flows can
//!   be shifted by constants, so the optimum is the root of
//!   `sigma -> min_X [b(X) + sigma * leaving(X)]`, found by discrete Newton.
//! * [`solve_basic_xy`]: for other graphs the optimum is attained by a pair of
//!   sets `(X, Y)`; the pair is improved one set at a time.
//! * [`solve_improved_xy`]: the same dual, but all previously found sets are
//!   kept as the two halves of an upper envelope of lines so no set is found
//!   twice.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::recover_flow;
use crate::graph::{Digraph, FlowVector, VertexSet};
use crate::integral::IntegralResult;
use crate::rational::{rat, serde_rational, serde_rational_opt, Rational};
use crate::setfn::{BruteForceSfm, Composite, CountingSfm, CutKind, SetOracle, Sfm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Eulerian,
    #[serde(rename = "basic")]
    BasicXy,
    #[serde(rename = "improved")]
    ImprovedXy,
    Weighted,
    Integral,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Eulerian => "eulerian",
            Algorithm::BasicXy => "basic",
            Algorithm::ImprovedXy => "improved",
            Algorithm::Weighted => "weighted",
            Algorithm::Integral => "integral",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
}

/// Dual witness of optimality.
///
/// When `sigma_star > 0` the sets are present and their dual ratio equals
/// `sigma_star`; for a zero optimum they are optional. `kappa_star` is the
/// lower end of an optimal box (absent for Eulerian graphs, where 0 works).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCertificate {
    #[serde(with = "serde_rational")]
    pub sigma_star: Rational,
    #[serde(with = "serde_rational_opt")]
    pub kappa_star: Option<Rational>,
    pub x: Option<VertexSet>,
    pub y: Option<VertexSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(with = "serde_rational")]
    pub sigma: Rational,
    #[serde(with = "serde_rational_opt")]
    pub kappa: Option<Rational>,
    pub set: VertexSet,
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub status: Status,
    pub certificate: Option<DualCertificate>,
    /// Set with no boundary and negative value, when infeasible.
    pub infeasible_set: Option<VertexSet>,
    pub flow: Option<FlowVector>,
    pub integral: Option<IntegralResult>,
    pub iterations: usize,
    pub sfm_calls: usize,
    pub trace: Vec<TraceStep>,
}

impl SolveReport {
    pub fn sigma_star(&self) -> Option<&Rational> {
        self.certificate.as_ref().map(|c| &c.sigma_star)
    }

    pub fn kappa_star(&self) -> Option<&Rational> {
        self.certificate.as_ref().and_then(|c| c.kappa_star.as_ref())
    }

    pub(crate) fn infeasible(algorithm: Algorithm, set: VertexSet, trace: Vec<TraceStep>, sfm_calls: usize) -> Self {
        SolveReport {
            algorithm,
            status: Status::Infeasible,
            certificate: None,
            infeasible_set: Some(set),
            flow: None,
            integral: None,
            iterations: trace.len(),
            sfm_calls,
            trace,
        }
    }
}

#[derive(Clone, Copy)]
pub struct SolveOptions<'a> {
    pub sfm: &'a dyn Sfm,
    pub emit_flow: bool,
    /// Safety net against non-termination; `None` picks a bound from `m`.
    pub max_iterations: Option<usize>,
}

impl Default for SolveOptions<'static> {
    fn default() -> Self {
        SolveOptions {
            sfm: &BruteForceSfm,
            emit_flow: false,
            max_iterations: None,
        }
    }
}

impl SolveOptions<'_> {
    pub fn with_flow(mut self) -> Self {
        self.emit_flow = true;
        self
    }

    pub(crate) fn iteration_limit(&self, m: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| (m + 1).pow(4) + 16)
    }
}

/// `b`, entering, and leaving values of one vertex set, with arc weights
/// already applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetProfile {
    pub set: VertexSet,
    pub b: Rational,
    pub entering: Rational,
    pub leaving: Rational,
}

impl SetProfile {
    pub fn new(g: &Digraph, b: &dyn SetOracle, set: VertexSet, weights: Option<&[Rational]>) -> Self {
        let (entering, leaving) = match weights {
            None => {
                let c = g.cut_counts(set);
                (rat(c.entering), rat(c.leaving))
            }
            Some(w) => {
                let c = g.cut_weighted(set, w);
                (c.entering, c.leaving)
            }
        };
        SetProfile {
            set,
            b: b.eval(set),
            entering,
            leaving,
        }
    }

    pub fn net(&self) -> Rational {
        &self.entering - &self.leaving
    }

    pub fn has_boundary(&self) -> bool {
        !(self.entering.is_zero() && self.leaving.is_zero())
    }

    /// Same `(b, entering, leaving)` triple.
    pub fn equivalent(&self, other: &SetProfile) -> bool {
        self.b == other.b && self.entering == other.entering && self.leaving == other.leaving
    }

    /// Spread lower bound this set imposes on boxes starting at `kappa`:
    /// `(kappa * net - b) / leaving`.
    pub fn line_at(&self, kappa: &Rational) -> Option<Rational> {
        (!self.leaving.is_zero()).then(|| (kappa * self.net() - &self.b) / &self.leaving)
    }
}

fn pair_denominator(x: &SetProfile, y: &SetProfile) -> Rational {
    &y.leaving * x.net() - &x.leaving * y.net()
}

/// `[b(X) net(Y) - b(Y) net(X)] / [leaving(Y) net(X) - leaving(X) net(Y)]`
pub fn pair_sigma(x: &SetProfile, y: &SetProfile) -> Result<Rational> {
    let d = pair_denominator(x, y);
    if d.is_zero() {
        return Err(Error::DegenerateRatio { x: x.set, y: y.set });
    }
    Ok((&x.b * y.net() - &y.b * x.net()) / d)
}

/// `[b(X) leaving(Y) - b(Y) leaving(X)] / [leaving(Y) net(X) - leaving(X) net(Y)]`,
/// the abscissa where the two sets' lines meet.
pub fn pair_kappa(x: &SetProfile, y: &SetProfile) -> Result<Rational> {
    let d = pair_denominator(x, y);
    if d.is_zero() {
        return Err(Error::DegenerateRatio { x: x.set, y: y.set });
    }
    Ok((&x.b * &y.leaving - &y.b * &x.leaving) / d)
}

/// `net(X) >= 0`, `net(Y) < 0`, and `X` has a boundary.
pub fn is_admissible_pair(x: &SetProfile, y: &SetProfile) -> bool {
    !x.net().is_negative() && y.net().is_negative() && x.has_boundary()
}

pub fn sigma_xy(g: &Digraph, b: &dyn SetOracle, x: VertexSet, y: VertexSet) -> Result<Rational> {
    pair_sigma(&SetProfile::new(g, b, x, None), &SetProfile::new(g, b, y, None))
}

pub fn kappa_xy(g: &Digraph, b: &dyn SetOracle, x: VertexSet, y: VertexSet) -> Result<Rational> {
    pair_kappa(&SetProfile::new(g, b, x, None), &SetProfile::new(g, b, y, None))
}

fn check_instance(g: &Digraph, b: &dyn SetOracle) -> Result<()> {
    if b.ground_size() != g.vertex_count() {
        return Err(Error::GroundSetMismatch {
            expected: g.vertex_count(),
            found: b.ground_size(),
        });
    }
    if let Some(v) = g.isolated_vertex() {
        return Err(Error::IsolatedVertex(v));
    }
    Ok(())
}

fn finish(
    g: &Digraph,
    b: &dyn SetOracle,
    algorithm: Algorithm,
    certificate: DualCertificate,
    trace: Vec<TraceStep>,
    sfm: &CountingSfm,
    emit_flow: bool,
) -> Result<SolveReport> {
    let flow = if emit_flow {
        let kappa = certificate.kappa_star.clone().unwrap_or_else(Rational::zero);
        let upper = &kappa + &certificate.sigma_star;
        let m = g.arc_count();
        Some(recover_flow(
            g,
            b,
            &FlowVector::constant(m, &kappa),
            &FlowVector::constant(m, &upper),
            sfm,
        )?)
    } else {
        None
    };
    Ok(SolveReport {
        algorithm,
        status: Status::Optimal,
        certificate: Some(certificate),
        infeasible_set: None,
        flow,
        integral: None,
        iterations: trace.len(),
        sfm_calls: sfm.calls(),
        trace,
    })
}

/// Discrete Newton on `f(sigma) = min_X [b(X) + sigma * leaving(X)]` from
/// `sigma = 0`. The certificate set is the one whose ratio `-b(X)/leaving(X)`
/// produced the final `sigma`.
pub fn solve_eulerian(g: &Digraph, b: &dyn SetOracle, opts: &SolveOptions) -> Result<SolveReport> {
    check_instance(g, b)?;
    if !g.is_eulerian() {
        return Err(Error::NotEulerian);
    }
    let sfm = CountingSfm::new(opts.sfm);
    let limit = opts.iteration_limit(g.arc_count());
    let mut sigma = Rational::zero();
    let mut witness: Option<VertexSet> = None;
    let mut trace = Vec::new();
    loop {
        if trace.len() >= limit {
            return Err(Error::IterationLimit(limit));
        }
        let obj = Composite::new(b, g).term(CutKind::Leaving, sigma.clone(), None);
        let r = sfm.argmin(&obj)?;
        trace.push(TraceStep {
            sigma: sigma.clone(),
            kappa: None,
            set: r.minimizer,
            value: r.value.clone(),
        });
        if !r.value.is_negative() {
            let certificate = DualCertificate {
                sigma_star: sigma,
                kappa_star: None,
                x: Some(witness.unwrap_or(r.minimizer)),
                y: None,
            };
            return finish(g, b, Algorithm::Eulerian, certificate, trace, &sfm, opts.emit_flow);
        }
        let leaving = g.cut_counts(r.minimizer).leaving;
        if leaving == 0 {
            let calls = sfm.calls();
            return Ok(SolveReport::infeasible(Algorithm::Eulerian, r.minimizer, trace, calls));
        }
        sigma = -b.eval(r.minimizer) / rat(leaving);
        witness = Some(r.minimizer);
    }
}

/// Lowest-index vertex with nonnegative net degree and lowest-index vertex
/// with negative net degree.
fn initial_pair(g: &Digraph) -> Result<(VertexSet, VertexSet)> {
    let net = |v: usize| g.cut_counts(VertexSet::singleton(v)).net();
    let n = g.vertex_count();
    let x = (0..n).find(|&v| net(v) >= 0);
    let y = (0..n).find(|&v| net(v) < 0);
    match (x, y) {
        (Some(x), Some(y)) => Ok((VertexSet::singleton(x), VertexSet::singleton(y))),
        _ => Err(Error::EulerianInput),
    }
}

fn xy_objective<'a>(g: &'a Digraph, b: &'a dyn SetOracle, sigma: &Rational, kappa: &Rational) -> Composite<'a> {
    Composite::new(b, g)
        .term(CutKind::Leaving, sigma.clone(), None)
        .term(CutKind::Net, -kappa, None)
}

fn xy_certificate(sigma: Rational, kappa: Rational, x: VertexSet, y: VertexSet) -> DualCertificate {
    let sigma_star = if sigma.is_negative() { Rational::zero() } else { sigma };
    DualCertificate {
        sigma_star,
        kappa_star: Some(kappa),
        x: Some(x),
        y: Some(y),
    }
}

pub fn solve_basic_xy(g: &Digraph, b: &dyn SetOracle, opts: &SolveOptions) -> Result<SolveReport> {
    check_instance(g, b)?;
    if g.is_eulerian() {
        return Err(Error::EulerianInput);
    }
    let sfm = CountingSfm::new(opts.sfm);
    let limit = opts.iteration_limit(g.arc_count());
    let (x0, y0) = initial_pair(g)?;
    let mut x = SetProfile::new(g, b, x0, None);
    let mut y = SetProfile::new(g, b, y0, None);
    let mut trace = Vec::new();
    loop {
        if trace.len() >= limit {
            return Err(Error::IterationLimit(limit));
        }
        let sigma = pair_sigma(&x, &y)?;
        let kappa = pair_kappa(&x, &y)?;
        let r = sfm.argmin(&xy_objective(g, b, &sigma, &kappa))?;
        trace.push(TraceStep {
            sigma: sigma.clone(),
            kappa: Some(kappa.clone()),
            set: r.minimizer,
            value: r.value.clone(),
        });
        if !r.value.is_negative() {
            let cert = xy_certificate(sigma, kappa, x.set, y.set);
            return finish(g, b, Algorithm::BasicXy, cert, trace, &sfm, opts.emit_flow);
        }
        let c = SetProfile::new(g, b, r.minimizer, None);
        if !c.has_boundary() {
            let calls = sfm.calls();
            return Ok(SolveReport::infeasible(Algorithm::BasicXy, c.set, trace, calls));
        }
        if c.net().is_negative() {
            y = c;
        } else {
            x = c;
        }
    }
}

/// `net(a)/leaving(a) <= net(b)/leaving(b)` for sets with leaving arcs.
fn ratio_le(a: &SetProfile, b: &SetProfile) -> bool {
    a.net() * &b.leaving <= b.net() * &a.leaving
}

/// Envelope of the lines `kappa -> (kappa * net(Z) - b(Z)) / leaving(Z)`.
///
/// `xs` holds sets with `net >= 0` in decreasing slope order, `ys` sets with
/// `net < 0` in increasing slope order; a set with no leaving arc caps `kappa`
/// from above and can only sit at the bottom of `xs`. The current optimum
/// candidate is the crossing of the two tops.
struct Envelope {
    xs: Vec<SetProfile>,
    ys: Vec<SetProfile>,
}

impl Envelope {
    fn top(&self) -> (&SetProfile, &SetProfile) {
        (
            self.xs.last().expect("x side never empties"),
            self.ys.last().expect("y side never empties"),
        )
    }

    /// Inserts `c`, whose line lies strictly above the current crossing.
    fn insert(&mut self, c: SetProfile) -> Result<()> {
        if c.leaving.is_zero() {
            // new cap on kappa, left of the current crossing: every sloped
            // x-side line is now irrelevant
            while self.ys.len() >= 2 {
                let j = self.ys.len();
                if pair_sigma(&c, &self.ys[j - 1])? <= pair_sigma(&c, &self.ys[j - 2])? {
                    self.ys.pop();
                } else {
                    break;
                }
            }
            self.xs = vec![c];
            return Ok(());
        }
        while let Some(top) = self.xs.last() {
            let i = self.xs.len();
            let pop = if top.leaving.is_zero() {
                false
            } else if ratio_le(top, &c) {
                true
            } else if i >= 2 {
                pair_kappa(&c, top)? >= pair_kappa(&c, &self.xs[i - 2])?
            } else {
                false
            };
            if !pop {
                break;
            }
            self.xs.pop();
        }
        while let Some(top) = self.ys.last() {
            let j = self.ys.len();
            let pop = if ratio_le(&c, top) {
                true
            } else if j >= 2 {
                pair_kappa(&c, top)? <= pair_kappa(&c, &self.ys[j - 2])?
            } else {
                false
            };
            if !pop {
                break;
            }
            self.ys.pop();
        }
        if c.net().is_negative() {
            self.ys.push(c);
        } else {
            self.xs.push(c);
        }
        debug_assert!(!self.xs.is_empty() && !self.ys.is_empty());
        Ok(())
    }
}

pub fn solve_improved_xy(g: &Digraph, b: &dyn SetOracle, opts: &SolveOptions) -> Result<SolveReport> {
    check_instance(g, b)?;
    if g.is_eulerian() {
        return Err(Error::EulerianInput);
    }
    let sfm = CountingSfm::new(opts.sfm);
    let limit = opts.iteration_limit(g.arc_count());
    let (x0, y0) = initial_pair(g)?;
    let mut env = Envelope {
        xs: vec![SetProfile::new(g, b, x0, None)],
        ys: vec![SetProfile::new(g, b, y0, None)],
    };
    let mut trace = Vec::new();
    loop {
        if trace.len() >= limit {
            return Err(Error::IterationLimit(limit));
        }
        let (x, y) = env.top();
        let sigma = pair_sigma(x, y)?;
        let kappa = pair_kappa(x, y)?;
        let r = sfm.argmin(&xy_objective(g, b, &sigma, &kappa))?;
        trace.push(TraceStep {
            sigma: sigma.clone(),
            kappa: Some(kappa.clone()),
            set: r.minimizer,
            value: r.value.clone(),
        });
        if !r.value.is_negative() {
            let cert = xy_certificate(sigma, kappa, x.set, y.set);
            return finish(g, b, Algorithm::ImprovedXy, cert, trace, &sfm, opts.emit_flow);
        }
        let c = SetProfile::new(g, b, r.minimizer, None);
        if !c.has_boundary() {
            let calls = sfm.calls();
            return Ok(SolveReport::infeasible(Algorithm::ImprovedXy, c.set, trace, calls));
        }
        env.insert(c)?;
    }
}
