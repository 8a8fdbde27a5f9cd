//! Set functions on the vertex set and the minimization oracle used by every
//! solver.
//!
//! Solvers only talk to [`SetOracle`] and [`Sfm`]; the enumeration backend in
//! [`BruteForceSfm`] can be replaced by a polynomial minimizer without touching
//! them.

use std::cell::Cell;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexSet, MAX_VERTICES};
use crate::rational::{max_abs, one, rat, Rational};

/// An evaluable set function `2^V -> Q`.
pub trait SetOracle {
    fn ground_size(&self) -> usize;
    fn eval(&self, x: VertexSet) -> Rational;
}

/// Concrete representations of the input function `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetFunction {
    /// One value per subset, indexed by bitmask.
    Table { n: usize, values: Vec<Rational> },
    /// `constant + sum of values[v] over v in X`.
    Modular { constant: Rational, values: Vec<Rational> },
    /// Capacity of auxiliary arcs leaving `X`, plus a modular offset.
    CutCapacity {
        n: usize,
        arcs: Vec<(usize, usize, Rational)>,
        offset: Vec<Rational>,
    },
}

impl SetFunction {
    pub fn table(n: usize, values: Vec<Rational>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::GroundSetTooLarge { n, max: MAX_VERTICES });
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(Error::TableSize {
                n,
                expected,
                found: values.len(),
            });
        }
        Ok(SetFunction::Table { n, values })
    }

    pub fn modular(constant: Rational, values: Vec<Rational>) -> Self {
        SetFunction::Modular { constant, values }
    }

    pub fn cut_capacity(n: usize, arcs: Vec<(usize, usize, Rational)>, offset: Option<Vec<Rational>>) -> Result<Self> {
        for (i, (t, h, c)) in arcs.iter().enumerate() {
            if let Some(&v) = [t, h].into_iter().find(|&&v| v >= n) {
                return Err(Error::ArcOutOfRange { arc: i, vertex: v, n });
            }
            if c.is_negative() {
                return Err(Error::NegativeCapacity { arc: i });
            }
        }
        let offset = offset.unwrap_or_else(|| vec![Rational::zero(); n]);
        if offset.len() != n {
            return Err(Error::GroundSetMismatch {
                expected: n,
                found: offset.len(),
            });
        }
        Ok(SetFunction::CutCapacity { n, arcs, offset })
    }

    pub fn zero(n: usize) -> Self {
        SetFunction::modular(Rational::zero(), vec![Rational::zero(); n])
    }

    /// Materializes any oracle as a table.
    pub fn tabulate(f: &dyn SetOracle) -> Self {
        let n = f.ground_size();
        SetFunction::Table {
            n,
            values: VertexSet::all(n).map(|x| f.eval(x)).collect(),
        }
    }
}

impl SetOracle for SetFunction {
    fn ground_size(&self) -> usize {
        match self {
            SetFunction::Table { n, .. } | SetFunction::CutCapacity { n, .. } => *n,
            SetFunction::Modular { values, .. } => values.len(),
        }
    }

    fn eval(&self, x: VertexSet) -> Rational {
        match self {
            SetFunction::Table { values, .. } => values[x.bits() as usize].clone(),
            SetFunction::Modular { constant, values } => x.iter().fold(constant.clone(), |acc, v| acc + &values[v]),
            SetFunction::CutCapacity { arcs, offset, .. } => {
                let cut = arcs
                    .iter()
                    .filter(|(t, h, _)| x.contains(*t) && !x.contains(*h))
                    .fold(Rational::zero(), |acc, (_, _, c)| acc + c);
                x.iter().fold(cut, |acc, v| acc + &offset[v])
            }
        }
    }
}

impl<T: SetOracle + ?Sized> SetOracle for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }

    fn eval(&self, x: VertexSet) -> Rational {
        (**self).eval(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutKind {
    Entering,
    Leaving,
    Net,
}

/// `coef * (entering | leaving | net)` with the given arc weights, or arc
/// counts when `weights` is `None`.
#[derive(Clone, Debug)]
pub struct CutTerm<'a> {
    pub kind: CutKind,
    pub coef: Rational,
    pub weights: Option<&'a [Rational]>,
}

/// A base function plus a linear combination of cut terms of a digraph.
///
/// This is the shape of every objective the solvers minimize, e.g.
/// `b(X) + sigma * leaving(X) - kappa * net(X)`.
pub struct Composite<'a> {
    base: &'a dyn SetOracle,
    graph: &'a Digraph,
    terms: Vec<CutTerm<'a>>,
}

impl<'a> Composite<'a> {
    pub fn new(base: &'a dyn SetOracle, graph: &'a Digraph) -> Self {
        debug_assert_eq!(base.ground_size(), graph.vertex_count());
        Composite {
            base,
            graph,
            terms: Vec::new(),
        }
    }

    pub fn term(mut self, kind: CutKind, coef: Rational, weights: Option<&'a [Rational]>) -> Self {
        if let Some(w) = weights {
            debug_assert_eq!(w.len(), self.graph.arc_count());
        }
        if !coef.is_zero() {
            self.terms.push(CutTerm { kind, coef, weights });
        }
        self
    }

    pub fn terms(&self) -> &[CutTerm<'a>] {
        &self.terms
    }
}

impl SetOracle for Composite<'_> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn eval(&self, x: VertexSet) -> Rational {
        let mut value = self.base.eval(x);
        for t in &self.terms {
            let (entering, leaving) = match t.weights {
                None => {
                    let c = self.graph.cut_counts(x);
                    (rat(c.entering), rat(c.leaving))
                }
                Some(w) => {
                    let c = self.graph.cut_weighted(x, w);
                    (c.entering, c.leaving)
                }
            };
            let q = match t.kind {
                CutKind::Entering => entering,
                CutKind::Leaving => leaving,
                CutKind::Net => entering - leaving,
            };
            value += &t.coef * q;
        }
        value
    }
}

/// A failed exchange inequality `f(X+v) + f(X+w) >= f(X+v+w) + f(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExchangeViolation {
    pub x: VertexSet,
    pub v: usize,
    pub w: usize,
}

impl From<ExchangeViolation> for Error {
    fn from(e: ExchangeViolation) -> Self {
        Error::NotSubmodular { x: e.x, v: e.v, w: e.w }
    }
}

/// Checks submodularity through the local exchange inequality, which is
/// equivalent to the lattice inequality on all pairs.
pub fn verify_submodular(f: &dyn SetOracle) -> std::result::Result<(), ExchangeViolation> {
    let n = f.ground_size();
    let values: Vec<Rational> = VertexSet::all(n).map(|x| f.eval(x)).collect();
    let at = |s: VertexSet| &values[s.bits() as usize];
    for x in VertexSet::all(n) {
        for v in (0..n).filter(|&v| !x.contains(v)) {
            for w in (v + 1..n).filter(|&w| !x.contains(w)) {
                let (xv, xw) = (x.with(v), x.with(w));
                if at(xv) + at(xw) < at(xv.with(w)) + at(x) {
                    return Err(ExchangeViolation { x, v, w });
                }
            }
        }
    }
    Ok(())
}

/// Bounds the search to `force_in <= S <= V - force_out`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Restriction {
    pub force_in: VertexSet,
    pub force_out: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfmResult {
    pub minimizer: VertexSet,
    pub value: Rational,
}

/// Submodular function minimization oracle.
///
/// Among all minimizers the smallest bitmask is returned.
pub trait Sfm {
    fn minimize(&self, f: &dyn SetOracle, restriction: &Restriction) -> Result<SfmResult>;

    fn argmin(&self, f: &dyn SetOracle) -> Result<SfmResult> {
        self.minimize(f, &Restriction::default())
    }
}

/// Exhaustive enumeration in increasing bitmask order.
#[derive(Clone, Copy, Debug, Default)]
pub struct BruteForceSfm;

impl BruteForceSfm {
    pub fn minimize_filtered(
        &self,
        f: &dyn SetOracle,
        restriction: &Restriction,
        keep: &dyn Fn(VertexSet) -> bool,
    ) -> Result<SfmResult> {
        let n = f.ground_size();
        if n > MAX_VERTICES {
            return Err(Error::GroundSetTooLarge { n, max: MAX_VERTICES });
        }
        let free = VertexSet::full(n).bits() & !restriction.force_in.bits() & !restriction.force_out.bits();
        let mut best: Option<SfmResult> = None;
        let mut sub = 0u32;
        loop {
            let x = VertexSet::from_bits(sub | restriction.force_in.bits());
            if x.is_subset_of(VertexSet::full(n)) && keep(x) {
                let value = f.eval(x);
                if best.as_ref().is_none_or(|b| value < b.value) {
                    best = Some(SfmResult { minimizer: x, value });
                }
            }
            // next submask of `free` in increasing order
            sub = sub.wrapping_sub(free) & free;
            if sub == 0 {
                break;
            }
        }
        best.ok_or_else(|| Error::InvalidParameter("restriction admits no set".into()))
    }
}

impl Sfm for BruteForceSfm {
    fn minimize(&self, f: &dyn SetOracle, restriction: &Restriction) -> Result<SfmResult> {
        self.minimize_filtered(f, restriction, &|_| true)
    }
}

/// Wraps an oracle and counts calls.
pub struct CountingSfm<'a> {
    inner: &'a dyn Sfm,
    calls: Cell<usize>,
}

impl<'a> CountingSfm<'a> {
    pub fn new(inner: &'a dyn Sfm) -> Self {
        CountingSfm {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }
}

impl Sfm for CountingSfm<'_> {
    fn minimize(&self, f: &dyn SetOracle, restriction: &Restriction) -> Result<SfmResult> {
        self.calls.set(self.calls.get() + 1);
        self.inner.minimize(f, restriction)
    }
}

/// How to minimize over the lattice `{X : leaving_w(X) = 0}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LatticeMethod {
    /// Enumerate and skip sets with leaving arcs.
    #[default]
    Filtered,
    /// Unconstrained minimization of `f + M * leaving_w` with a large `M`.
    BigM,
}

/// Minimizes `f` over the sets with no leaving arc. Arc weights only matter
/// through their minimum, used to size the big-M penalty.
pub fn minimize_without_leaving(
    sfm: &dyn Sfm,
    f: &dyn SetOracle,
    g: &Digraph,
    weights: Option<&[Rational]>,
    method: LatticeMethod,
) -> Result<SfmResult> {
    match method {
        LatticeMethod::Filtered => {
            BruteForceSfm.minimize_filtered(f, &Restriction::default(), &|x| g.cut_counts(x).leaving == 0)
        }
        LatticeMethod::BigM => {
            let n = f.ground_size();
            let values: Vec<Rational> = VertexSet::all(n).map(|x| f.eval(x)).collect();
            let min_weight = weights
                .and_then(|w| w.iter().filter(|q| q.is_positive()).min().cloned())
                .unwrap_or_else(one);
            let penalty = (max_abs(&values) * rat(2) + one()) / min_weight;
            let obj = Composite::new(f, g).term(CutKind::Leaving, penalty, weights);
            let r = sfm.argmin(&obj)?;
            if g.cut_counts(r.minimizer).leaving != 0 {
                return Err(Error::InvalidParameter("big-M penalty too small".into()));
            }
            Ok(SfmResult {
                value: f.eval(r.minimizer),
                minimizer: r.minimizer,
            })
        }
    }
}
