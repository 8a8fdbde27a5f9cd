//! Weighted minimum spread.
//!
//! For a lower level `kappa`, `s(kappa)` is the smallest `sigma >= 0` such
//! that a submodular flow exists in the box `[kappa * c~, (kappa + sigma) * c~]`
//! where `c~ = 1/c`. The box is feasible iff
//! `min_X [b(X) - kappa * net(X) + sigma * leaving(X)] >= 0` (cut terms
//! weighted by `c~`), so `s(kappa)` is the smallest root of a concave
//! piecewise-linear function of `sigma` and is found by discrete Newton.
//!
//! `s` is convex in `kappa`, defined exactly for `kappa <= kappa_max`, and is
//! the upper envelope of the lines `(kappa * net(X) - b(X)) / leaving(X)` and
//! zero. Its minimum is found with the Handler–Zang tangent-intersection
//! method after a Newton search for a bracketing interval.

use std::cell::RefCell;

use num_traits::{Signed, Zero};

use crate::balanced::{
    pair_sigma, Algorithm, DualCertificate, SetProfile, SolveOptions, SolveReport, Status, TraceStep,
};
use crate::error::{Error, Result};
use crate::feasibility::recover_flow;
use crate::graph::{Digraph, FlowVector, VertexSet, WeightVector};
use crate::rational::{one, rat, Rational};
use crate::setfn::{
    minimize_without_leaving, BruteForceSfm, Composite, CountingSfm, CutKind, LatticeMethod, SetOracle, Sfm,
};

pub mod handler_zang;

pub use handler_zang::{handler_zang, HandlerZangState, HzStep, HzStop, Probe};

/// One discrete Newton iteration inside [`s_kappa`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonStep {
    pub sigma: Rational,
    /// Minimum of the box-margin function at `sigma`.
    pub h: Rational,
    /// Weighted leaving value of the minimizer.
    pub a: Rational,
    pub set: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SKappaResult {
    pub kappa: Rational,
    /// `None` when no flow with lower bound `kappa * c~` exists.
    pub sigma: Option<Rational>,
    /// Set whose line is tight at `kappa` (or the lowest minimizer when
    /// `sigma = 0`); when undefined, a set with no leaving arc violating the
    /// lower bound.
    pub set: VertexSet,
    /// `net(set) / leaving(set)`, or 0 when `sigma = 0`.
    pub subgradient: Option<Rational>,
    pub newton: Vec<NewtonStep>,
}

impl SKappaResult {
    pub fn is_defined(&self) -> bool {
        self.sigma.is_some()
    }

    pub fn newton_iterations(&self) -> usize {
        self.newton.len()
    }

    /// Generic discrete Newton properties: `h` strictly increases, `a`
    /// strictly decreases, and `h[i+1]/h[i] + a[i+1]/a[i] <= 1`.
    ///
    /// When `s` is undefined there is no root; the last step only has to
    /// keep `h` from decreasing, since a set with `a = 0` may tie with the
    /// previous minimizer.
    pub fn newton_claims_hold(&self) -> bool {
        let steps = &self.newton;
        let rooted = if self.is_defined() {
            steps.len()
        } else {
            steps.len().saturating_sub(1)
        };
        let strict = steps[..rooted].windows(2).all(|w| {
            let (p, q) = (&w[0], &w[1]);
            // earlier steps have h < 0 and a > 0
            p.h < q.h && p.a > q.a && &q.h / &p.h + &q.a / &p.a <= one()
        });
        let tail = self.is_defined() || steps.len() < 2 || steps[steps.len() - 2].h <= steps[steps.len() - 1].h;
        strict && tail
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KappaMax {
    /// `s` is defined up to `value`; `binding` has no leaving arc and
    /// `b(binding) = value * entering(binding)`.
    Finite {
        value: Rational,
        binding: VertexSet,
    },
    Unbounded,
}

impl KappaMax {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            KappaMax::Finite { value, .. } => Some(value),
            KappaMax::Unbounded => None,
        }
    }

    pub fn admits(&self, kappa: &Rational) -> bool {
        self.value().is_none_or(|k| kappa <= k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitialInterval {
    /// `s(kappa) = 0`.
    RootFound(Rational),
    /// `0` is a subgradient at `kappa`.
    MinFound(Rational),
    /// Subgradients at the ends have opposite signs, negative on the left.
    Bracket(Rational, Rational),
    /// The Newton step from the left end overshot `kappa_max`.
    BracketAtKappaMax(Rational, Rational),
}

/// Weighted problem bound to one instance; every `s` evaluation is logged.
pub struct WeightedSolver<'a> {
    g: &'a Digraph,
    b: &'a dyn SetOracle,
    w: &'a WeightVector,
    sfm: CountingSfm<'a>,
    lattice: LatticeMethod,
    evaluations: RefCell<Vec<SKappaResult>>,
}

impl<'a> WeightedSolver<'a> {
    pub fn new(g: &'a Digraph, b: &'a dyn SetOracle, w: &'a WeightVector, sfm: &'a dyn Sfm) -> Result<Self> {
        if b.ground_size() != g.vertex_count() {
            return Err(Error::GroundSetMismatch {
                expected: g.vertex_count(),
                found: b.ground_size(),
            });
        }
        if w.len() != g.arc_count() {
            return Err(Error::LengthMismatch {
                expected: g.arc_count(),
                found: w.len(),
            });
        }
        if let Some(v) = g.isolated_vertex() {
            return Err(Error::IsolatedVertex(v));
        }
        Ok(WeightedSolver {
            g,
            b,
            w,
            sfm: CountingSfm::new(sfm),
            lattice: LatticeMethod::default(),
            evaluations: RefCell::new(Vec::new()),
        })
    }

    pub fn with_lattice_method(mut self, method: LatticeMethod) -> Self {
        self.lattice = method;
        self
    }

    pub fn sfm_calls(&self) -> usize {
        self.sfm.calls()
    }

    /// Every distinct `s` evaluation so far, in order.
    pub fn evaluations(&self) -> Vec<SKappaResult> {
        self.evaluations.borrow().clone()
    }

    pub fn profile(&self, set: VertexSet) -> SetProfile {
        SetProfile::new(self.g, self.b, set, self.w.term_weights())
    }

    /// `net` vanishes on every set (equivalently on every vertex).
    pub fn is_constant(&self) -> bool {
        (0..self.g.vertex_count()).all(|v| self.profile(VertexSet::singleton(v)).net().is_zero())
    }

    pub fn s_kappa(&self, kappa: &Rational) -> Result<SKappaResult> {
        if let Some(r) = self.evaluations.borrow().iter().find(|r| &r.kappa == kappa) {
            return Ok(r.clone());
        }
        let r = self.newton_s(kappa)?;
        debug_assert!(r.newton_claims_hold(), "{:#?}", r);
        self.evaluations.borrow_mut().push(r.clone());
        Ok(r)
    }

    fn newton_s(&self, kappa: &Rational) -> Result<SKappaResult> {
        let wt = self.w.term_weights();
        let limit = (self.g.arc_count() + 1).pow(3) + (1 << self.g.vertex_count().min(20)) + 16;
        let mut sigma = Rational::zero();
        let mut tight: Option<SetProfile> = None;
        let mut newton = Vec::new();
        loop {
            if newton.len() >= limit {
                return Err(Error::IterationLimit(limit));
            }
            let obj =
                Composite::new(self.b, self.g)
                    .term(CutKind::Net, -kappa, wt)
                    .term(CutKind::Leaving, sigma.clone(), wt);
            let r = self.sfm.argmin(&obj)?;
            let p = self.profile(r.minimizer);
            newton.push(NewtonStep {
                sigma: sigma.clone(),
                h: r.value.clone(),
                a: p.leaving.clone(),
                set: p.set,
            });
            if !r.value.is_negative() {
                let (set, subgradient) = match tight {
                    Some(t) => {
                        let g = t.net() / &t.leaving;
                        (t.set, g)
                    }
                    None => (r.minimizer, Rational::zero()),
                };
                return Ok(SKappaResult {
                    kappa: kappa.clone(),
                    sigma: Some(sigma),
                    set,
                    subgradient: Some(subgradient),
                    newton,
                });
            }
            match p.line_at(kappa) {
                None => {
                    return Ok(SKappaResult {
                        kappa: kappa.clone(),
                        sigma: None,
                        set: p.set,
                        subgradient: None,
                        newton,
                    })
                }
                Some(next) => {
                    sigma = next;
                    tight = Some(p);
                }
            }
        }
    }

    /// Largest `kappa` with `s(kappa)` defined: the largest root of
    /// `min { b(X) - kappa * entering(X) : leaving(X) = 0 }`, by Newton
    /// steps from an upper bound downwards.
    pub fn kappa_max(&self) -> Result<KappaMax> {
        let wt = self.w.term_weights();
        let lattice_min = |kappa: &Rational| {
            // on sets with no leaving arc, net = entering
            let f = Composite::new(self.b, self.g).term(CutKind::Net, -kappa, wt);
            minimize_without_leaving(&self.sfm, &f, self.g, wt, self.lattice)
        };
        // b(X) <= b(0) + sum_v max(0, b({v}) - b(0)) by submodularity
        let empty = self.b.eval(VertexSet::EMPTY);
        let mut upper = empty.clone();
        for v in 0..self.g.vertex_count() {
            let gain = self.b.eval(VertexSet::singleton(v)) - &empty;
            if gain.is_positive() {
                upper += gain;
            }
        }
        let lowest = lattice_min(&Rational::zero())?;
        let bound = upper.abs().max(lowest.value.abs());
        let min_weight = self.w.reciprocals().iter().min().cloned().unwrap_or_else(one);
        // any set with entering > 0 is violated here
        let mut kappa = bound / min_weight + one();
        let mut binding: Option<VertexSet> = None;
        let limit = (self.g.arc_count() + 1).pow(3) + (1 << self.g.vertex_count().min(20)) + 16;
        for _ in 0..limit {
            let r = lattice_min(&kappa)?;
            if !r.value.is_negative() {
                return Ok(match binding {
                    None => KappaMax::Unbounded,
                    Some(set) => KappaMax::Finite {
                        value: kappa,
                        binding: set,
                    },
                });
            }
            let p = self.profile(r.minimizer);
            if p.entering.is_zero() {
                return Err(Error::Infeasible(p.set));
            }
            kappa = &p.b / &p.entering;
            binding = Some(p.set);
        }
        Err(Error::IterationLimit(limit))
    }

    /// Newton steps `kappa <- kappa - s(kappa) / g(kappa)` from `kappa0`.
    pub fn find_initial_interval(&self, kappa0: &Rational, kmax: &KappaMax) -> Result<InitialInterval> {
        let mut cur = self.defined(kappa0)?;
        let limit = (self.g.arc_count() + 1).pow(4) + 16;
        for _ in 0..limit {
            let s = cur.sigma.clone().expect("defined");
            let g = cur.subgradient.clone().expect("defined");
            if s.is_zero() {
                return Ok(InitialInterval::RootFound(cur.kappa));
            }
            if g.is_zero() {
                return Ok(InitialInterval::MinFound(cur.kappa));
            }
            let next = &cur.kappa - &s / &g;
            if let Some(k) = kmax.value() {
                if &next > k {
                    return Ok(InitialInterval::BracketAtKappaMax(cur.kappa, k.clone()));
                }
            }
            let nxt = self.defined(&next)?;
            let h = nxt.subgradient.clone().expect("defined");
            if !nxt.sigma.as_ref().expect("defined").is_zero() && !h.is_zero() && h.is_positive() != g.is_positive() {
                return Ok(if next < cur.kappa {
                    InitialInterval::Bracket(next, cur.kappa)
                } else {
                    InitialInterval::Bracket(cur.kappa, next)
                });
            }
            cur = nxt;
        }
        Err(Error::IterationLimit(limit))
    }

    fn defined(&self, kappa: &Rational) -> Result<SKappaResult> {
        let r = self.s_kappa(kappa)?;
        if r.is_defined() {
            Ok(r)
        } else {
            Err(Error::UndefinedSKappa(kappa.to_string()))
        }
    }

    fn probe(&self, kappa: &Rational) -> Result<Probe<VertexSet>> {
        let r = self.defined(kappa)?;
        Ok(Probe {
            value: r.sigma.expect("defined"),
            subgradient: r.subgradient.expect("defined"),
            tag: r.set,
        })
    }

    /// Runs Handler–Zang on `[a, b]` and assembles the dual pair.
    pub fn handler_zang_minimize(
        &self,
        a: &Rational,
        b: &Rational,
    ) -> Result<(WeightedOptimum, HandlerZangState<VertexSet>)> {
        let limit = (self.g.arc_count() + 1).pow(4) + 16;
        let st = handler_zang(a.clone(), b.clone(), |k| self.probe(k), limit)?;
        let opt = match st.stop {
            HzStop::Exact => {
                // tangent lines at both ends meet at the optimum
                let x = st.b_probe.tag;
                let y = st.a_probe.tag;
                let value = st.c_probe.value.clone();
                let pair = if value.is_positive() { Some((x, Some(y))) } else { None };
                WeightedOptimum {
                    kappa: st.c.clone(),
                    sigma: value,
                    pair,
                }
            }
            HzStop::FlatSubgradient => self.optimum_at(&st.c)?,
        };
        Ok((opt, st))
    }

    /// Optimum at a point with subgradient 0.
    fn optimum_at(&self, kappa: &Rational) -> Result<WeightedOptimum> {
        let r = self.defined(kappa)?;
        let sigma = r.sigma.expect("defined");
        let pair = sigma.is_positive().then(|| (r.set, self.negative_singleton()));
        Ok(WeightedOptimum {
            kappa: kappa.clone(),
            sigma,
            pair,
        })
    }

    /// Lowest vertex with negative weighted net degree.
    fn negative_singleton(&self) -> Option<VertexSet> {
        (0..self.g.vertex_count())
            .map(VertexSet::singleton)
            .find(|&v| self.profile(v).net().is_negative())
    }

    pub fn optimum(&self) -> Result<WeightedOptimum> {
        if self.is_constant() {
            let r = self.s_kappa(&Rational::zero())?;
            let sigma = r.sigma.ok_or(Error::Infeasible(r.set))?;
            let pair = sigma.is_positive().then_some((r.set, None));
            return Ok(WeightedOptimum {
                kappa: Rational::zero(),
                sigma,
                pair,
            });
        }
        let kmax = self.kappa_max()?;
        let zero = Rational::zero();
        let kappa0 = if kmax.admits(&zero) {
            zero
        } else {
            kmax.value().expect("finite").clone()
        };
        match self.find_initial_interval(&kappa0, &kmax)? {
            InitialInterval::RootFound(k) | InitialInterval::MinFound(k) => self.optimum_at(&k),
            InitialInterval::Bracket(a, b) => Ok(self.handler_zang_minimize(&a, &b)?.0),
            InitialInterval::BracketAtKappaMax(a, k) => {
                let KappaMax::Finite { binding, .. } = kmax else {
                    unreachable!("bracket needs a finite end")
                };
                let at = self.defined(&k)?;
                let beta = at.subgradient.clone().expect("defined");
                let sigma = at.sigma.clone().expect("defined");
                if a == k || !beta.is_positive() || sigma.is_zero() {
                    if beta.is_negative() && sigma.is_positive() {
                        // the wall and the decreasing tight line meet at kappa_max
                        return Ok(WeightedOptimum {
                            kappa: k,
                            sigma,
                            pair: Some((binding, Some(at.set))),
                        });
                    }
                    return self.optimum_at(&k);
                }
                Ok(self.handler_zang_minimize(&a, &k)?.0)
            }
        }
    }
}

/// Minimizer of `s` with its value and dual witness (`X`, `Y`), present when
/// the value is positive. `Y` is absent only when `net` vanishes everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedOptimum {
    pub kappa: Rational,
    pub sigma: Rational,
    pub pair: Option<(VertexSet, Option<VertexSet>)>,
}

/// Dual ratio `(b(Y) net(X) - b(X) net(Y)) / (leaving(X) net(Y) - leaving(Y) net(X))`
/// with reciprocal weights; requires `net(X) >= 0`, `net(Y) < 0`, and a
/// boundary on `X`.
pub fn weighted_ratio(
    g: &Digraph,
    b: &dyn SetOracle,
    w: &WeightVector,
    x: VertexSet,
    y: VertexSet,
) -> Result<Rational> {
    let px = SetProfile::new(g, b, x, w.term_weights());
    let py = SetProfile::new(g, b, y, w.term_weights());
    pair_sigma(&px, &py)
}

pub fn s_kappa(g: &Digraph, b: &dyn SetOracle, w: &WeightVector, kappa: &Rational) -> Result<SKappaResult> {
    WeightedSolver::new(g, b, w, &BruteForceSfm)?.s_kappa(kappa)
}

pub fn kappa_max(g: &Digraph, b: &dyn SetOracle, w: &WeightVector) -> Result<KappaMax> {
    WeightedSolver::new(g, b, w, &BruteForceSfm)?.kappa_max()
}

pub fn find_initial_interval(
    g: &Digraph,
    b: &dyn SetOracle,
    w: &WeightVector,
    kappa0: &Rational,
) -> Result<InitialInterval> {
    let solver = WeightedSolver::new(g, b, w, &BruteForceSfm)?;
    let kmax = solver.kappa_max()?;
    solver.find_initial_interval(kappa0, &kmax)
}

pub fn handler_zang_minimize(
    g: &Digraph,
    b: &dyn SetOracle,
    w: &WeightVector,
    lo: &Rational,
    hi: &Rational,
) -> Result<(WeightedOptimum, HandlerZangState<VertexSet>)> {
    WeightedSolver::new(g, b, w, &BruteForceSfm)?.handler_zang_minimize(lo, hi)
}

impl WeightedSolver<'_> {
    /// One trace step per distinct `s` evaluation; `value` holds the
    /// subgradient, and an undefined `s` is logged as `sigma = -1`.
    pub(crate) fn trace(&self) -> Vec<TraceStep> {
        self.evaluations()
            .into_iter()
            .map(|r| TraceStep {
                sigma: r.sigma.unwrap_or_else(|| rat(-1)),
                kappa: Some(r.kappa),
                set: r.set,
                value: r.subgradient.unwrap_or_else(Rational::zero),
            })
            .collect()
    }
}

impl WeightedOptimum {
    pub fn certificate(&self) -> DualCertificate {
        DualCertificate {
            sigma_star: self.sigma.clone(),
            kappa_star: Some(self.kappa.clone()),
            x: self.pair.map(|p| p.0),
            y: self.pair.and_then(|p| p.1),
        }
    }
}

pub fn solve_weighted(g: &Digraph, b: &dyn SetOracle, w: &WeightVector, opts: &SolveOptions) -> Result<SolveReport> {
    let solver = WeightedSolver::new(g, b, w, opts.sfm)?;
    let opt = match solver.optimum() {
        Ok(opt) => opt,
        Err(Error::Infeasible(set)) => {
            return Ok(SolveReport::infeasible(
                Algorithm::Weighted,
                set,
                solver.trace(),
                solver.sfm_calls(),
            ));
        }
        Err(e) => return Err(e),
    };
    let flow = if opts.emit_flow {
        let r = w.reciprocals();
        let lower = FlowVector(r.iter().map(|q| q * &opt.kappa).collect());
        let top = &opt.kappa + &opt.sigma;
        let upper = FlowVector(r.iter().map(|q| q * &top).collect());
        Some(recover_flow(g, b, &lower, &upper, &solver.sfm)?)
    } else {
        None
    };
    let trace = solver.trace();
    Ok(SolveReport {
        algorithm: Algorithm::Weighted,
        status: Status::Optimal,
        certificate: Some(opt.certificate()),
        infeasible_set: None,
        flow,
        integral: None,
        iterations: trace.len(),
        sfm_calls: solver.sfm_calls(),
        trace,
    })
}
