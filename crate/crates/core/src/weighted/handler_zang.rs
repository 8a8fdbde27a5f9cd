//! Handler–Zang minimization of a univariate convex piecewise-linear
//! function given by a value-and-subgradient oracle.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Oracle answer at one point; `tag` carries whatever produced the
/// supporting line (for `s`, the tight vertex set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe<T> {
    pub value: Rational,
    pub subgradient: Rational,
    pub tag: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HzStep {
    pub a: Rational,
    pub b: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    /// Crossing of the two tangent lines and its height.
    pub c: Rational,
    pub sigma: Rational,
    /// Subgradient at `c`; not consulted on the exact final step.
    pub gamma: Option<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HzStop {
    /// `f(c) = sigma`: `c` is a minimizer.
    Exact,
    /// Subgradient 0 at `c`: `c` is a minimizer.
    FlatSubgradient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandlerZangState<T> {
    pub c: Rational,
    pub stop: HzStop,
    pub a_probe: Probe<T>,
    pub b_probe: Probe<T>,
    pub c_probe: Probe<T>,
    pub log: Vec<HzStep>,
}

impl<T> HandlerZangState<T> {
    /// Ends move inwards, end subgradients move towards 0, and no
    /// subgradient repeats.
    pub fn claims_hold(&self) -> bool {
        let ordered = self
            .log
            .windows(2)
            .all(|w| w[0].a <= w[1].a && w[0].b >= w[1].b && w[0].alpha <= w[1].alpha && w[0].beta >= w[1].beta);
        let gammas: Vec<&Rational> = self.log.iter().filter_map(|s| s.gamma.as_ref()).collect();
        let distinct = gammas.iter().enumerate().all(|(i, g)| !gammas[..i].contains(g));
        ordered && distinct
    }
}

/// Minimizes `f` on `[a, b]` given `f'(a) < 0 < f'(b)`.
pub fn handler_zang<T: Clone, F>(mut a: Rational, mut b: Rational, f: F, limit: usize) -> Result<HandlerZangState<T>>
where
    F: Fn(&Rational) -> Result<Probe<T>>,
{
    let mut pa = f(&a)?;
    let mut pb = f(&b)?;
    if !(pa.subgradient.is_negative() && pb.subgradient.is_positive()) {
        return Err(Error::InvalidBracket {
            alpha: pa.subgradient.to_string(),
            beta: pb.subgradient.to_string(),
        });
    }
    let mut log = Vec::new();
    for _ in 0..limit {
        let (alpha, beta) = (&pa.subgradient, &pb.subgradient);
        let denom = alpha - beta;
        let c = (&pb.value - &pa.value + alpha * &a - beta * &b) / &denom;
        let sigma = (alpha * &pb.value - beta * &pa.value + alpha * beta * (&a - &b)) / &denom;
        let pc = f(&c)?;
        log.push(HzStep {
            a: a.clone(),
            b: b.clone(),
            alpha: alpha.clone(),
            beta: beta.clone(),
            c: c.clone(),
            sigma: sigma.clone(),
            gamma: (pc.value != sigma).then(|| pc.subgradient.clone()),
        });
        let stop = if pc.value == sigma {
            Some(HzStop::Exact)
        } else if pc.subgradient.is_zero() {
            Some(HzStop::FlatSubgradient)
        } else {
            None
        };
        if let Some(stop) = stop {
            return Ok(HandlerZangState {
                c,
                stop,
                a_probe: pa,
                b_probe: pb,
                c_probe: pc,
                log,
            });
        }
        if pc.subgradient.is_negative() {
            a = c;
            pa = pc;
        } else {
            b = c;
            pb = pc;
        }
    }
    Err(Error::IterationLimit(limit))
}
