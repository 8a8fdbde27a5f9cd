//! Exhaustive reference answers for small instances.
//!
//! Nothing here calls a minimization oracle or the solver helpers: cut values
//! come from a local loop over the arcs, and every maximum or feasibility
//! question is answered by scanning all vertex sets.

use std::ops::RangeInclusive;

use num_traits::{Signed, Zero};

use crate::graph::{Digraph, FlowVector, VertexSet, WeightVector};
use crate::rational::{rat, Rational};
use crate::setfn::SetOracle;

/// (entering, leaving) sums of `w` (or counts) over arcs crossing `x`.
fn crossing_sums(g: &Digraph, x: VertexSet, w: Option<&[Rational]>) -> (Rational, Rational) {
    let mut entering = Rational::zero();
    let mut leaving = Rational::zero();
    for (i, &(t, h)) in g.arcs().iter().enumerate() {
        let amount = w.map_or_else(|| rat(1), |w| w[i].clone());
        match (x.contains(t), x.contains(h)) {
            (false, true) => entering += amount,
            (true, false) => leaving += amount,
            _ => {}
        }
    }
    (entering, leaving)
}

struct Row {
    set: VertexSet,
    b: Rational,
    entering: Rational,
    leaving: Rational,
    net: Rational,
}

fn rows(g: &Digraph, b: &dyn SetOracle, w: Option<&[Rational]>) -> Vec<Row> {
    (0..1u32 << g.vertex_count())
        .map(|bits| {
            let set = VertexSet::from_bits(bits);
            let (entering, leaving) = crossing_sums(g, set, w);
            let net = &entering - &leaving;
            Row {
                set,
                b: b.eval(set),
                entering,
                leaving,
                net,
            }
        })
        .collect()
}

/// Maximum of `-b(X)/leaving(X)` over sets with a leaving arc, clamped at 0.
/// The set is the first maximizer, reported only when the maximum is
/// nonnegative.
pub fn brute_dual_eulerian(g: &Digraph, b: &dyn SetOracle) -> (Rational, Option<VertexSet>) {
    let mut best: Option<(Rational, VertexSet)> = None;
    for r in rows(g, b, None) {
        if r.leaving.is_zero() {
            continue;
        }
        let ratio = -&r.b / &r.leaving;
        if best.as_ref().is_none_or(|(v, _)| &ratio > v) {
            best = Some((ratio, r.set));
        }
    }
    match best {
        Some((v, x)) if !v.is_negative() => (v, Some(x)),
        _ => (Rational::zero(), None),
    }
}

/// Largest dual ratio over pairs `(X, Y)` with `net(X) >= 0`, `net(Y) < 0`
/// and a boundary on `X`, clamped at 0, under reciprocal weights when given.
///
/// When `net` vanishes on every set there is no such pair and the maximum of
/// `-b(X)/leaving(X)` over sets with `b(X) < 0` is used instead; the pair
/// then has no `Y`.
pub fn brute_dual_xy(
    g: &Digraph,
    b: &dyn SetOracle,
    weights: Option<&WeightVector>,
) -> (Rational, Option<(VertexSet, Option<VertexSet>)>) {
    let w = weights.map(|w| w.reciprocals());
    let table = rows(g, b, w);
    let mut best: Option<(Rational, VertexSet, Option<VertexSet>)> = None;
    if table.iter().all(|r| r.net.is_zero()) {
        for r in &table {
            if r.b.is_negative() && r.leaving.is_positive() {
                let v = -&r.b / &r.leaving;
                if best.as_ref().is_none_or(|(bv, ..)| &v > bv) {
                    best = Some((v, r.set, None));
                }
            }
        }
    } else {
        for x in table
            .iter()
            .filter(|r| !r.net.is_negative() && !(r.entering.is_zero() && r.leaving.is_zero()))
        {
            for y in table.iter().filter(|r| r.net.is_negative()) {
                let num = &y.b * &x.net - &x.b * &y.net;
                let den = &x.leaving * &y.net - &y.leaving * &x.net;
                let v = num / den;
                if best.as_ref().is_none_or(|(bv, ..)| &v > bv) {
                    best = Some((v, x.set, Some(y.set)));
                }
            }
        }
    }
    match best {
        Some((v, x, y)) if !v.is_negative() => (v, Some((x, y))),
        _ => (Rational::zero(), None),
    }
}

/// Checks `entering_l(X) - leaving_u(X) <= b(X)` on every set. Crossed bounds
/// fail with no set; otherwise the first violated set is returned.
pub fn brute_feasible(g: &Digraph, b: &dyn SetOracle, l: &FlowVector, u: &FlowVector) -> (bool, Option<VertexSet>) {
    if l.0.iter().zip(&u.0).any(|(lo, hi)| lo > hi) {
        return (false, None);
    }
    for bits in 0..1u32 << g.vertex_count() {
        let x = VertexSet::from_bits(bits);
        let (entering, _) = crossing_sums(g, x, Some(&l.0));
        let (_, leaving) = crossing_sums(g, x, Some(&u.0));
        if entering - leaving > b.eval(x) {
            return (false, Some(x));
        }
    }
    (true, None)
}

/// Integer values of `b` with the integer cut test, for the grid searches.
struct IntegerCheck {
    n: usize,
    arcs: Vec<(usize, usize)>,
    b: Vec<i64>,
}

impl IntegerCheck {
    fn new(g: &Digraph, b: &dyn SetOracle) -> Option<Self> {
        let b = (0..1u32 << g.vertex_count())
            .map(|bits| {
                let v = b.eval(VertexSet::from_bits(bits));
                v.is_integer().then(|| v.to_integer().try_into().ok()).flatten()
            })
            .collect::<Option<Vec<i64>>>()?;
        Some(IntegerCheck {
            n: g.vertex_count(),
            arcs: g.arcs().to_vec(),
            b,
        })
    }

    fn feasible(&self, x: &[i64]) -> bool {
        (0..1u32 << self.n).all(|bits| {
            let mut net = 0i64;
            for (&(t, h), &v) in self.arcs.iter().zip(x) {
                let (ti, hi) = (bits >> t & 1 == 1, bits >> h & 1 == 1);
                if hi && !ti {
                    net += v;
                } else if ti && !hi {
                    net -= v;
                }
            }
            net <= self.b[bits as usize]
        })
    }

    /// Visits every vector in `[lo, hi]^m`, arc 0 varying fastest, until
    /// `visit` returns true.
    fn scan(&self, lo: i64, hi: i64, mut visit: impl FnMut(&[i64]) -> bool) {
        let m = self.arcs.len();
        let mut x = vec![lo; m];
        loop {
            if visit(&x) {
                return;
            }
            let mut i = 0;
            while i < m && x[i] == hi {
                x[i] = lo;
                i += 1;
            }
            if i == m {
                return;
            }
            x[i] += 1;
        }
    }
}

/// Smallest spread of an integral submodular flow with every arc in
/// `[kappa, kappa + max_width]` for some `kappa` in the range, with the first
/// such flow found. `None` when `b` is not integral or nothing is feasible.
pub fn brute_integral_spread(
    g: &Digraph,
    b: &dyn SetOracle,
    kappa_range: RangeInclusive<i64>,
    max_width: i64,
) -> Option<(Rational, FlowVector)> {
    let check = IntegerCheck::new(g, b)?;
    let mut best: Option<(i64, Vec<i64>)> = None;
    for kappa in kappa_range {
        check.scan(kappa, kappa + max_width, |x| {
            let spread = x.iter().max().unwrap_or(&0) - x.iter().min().unwrap_or(&0);
            if best.as_ref().is_none_or(|(s, _)| spread < *s) && check.feasible(x) {
                best = Some((spread, x.to_vec()));
            }
            false
        });
    }
    best.map(|(s, x)| (rat(s), FlowVector(x.into_iter().map(rat).collect())))
}

/// `min { max(x) - kappa }` over integral submodular flows `x` in
/// `[kappa, kappa + max_width]`; `None` if there is none.
pub fn brute_integral_width(g: &Digraph, b: &dyn SetOracle, kappa: i64, max_width: i64) -> Option<Rational> {
    let check = IntegerCheck::new(g, b)?;
    let mut best: Option<i64> = None;
    check.scan(kappa, kappa + max_width, |x| {
        let width = x.iter().max().copied().unwrap_or(kappa) - kappa;
        if best.is_none_or(|b| width < b) && check.feasible(x) {
            best = Some(width);
        }
        best == Some(0)
    });
    best.map(rat)
}
