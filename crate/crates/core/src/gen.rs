//! Seeded random instances.
//!
//! Every `b` is submodular by construction: a cut function of a random
//! capacitated auxiliary digraph, a modular function, or a cut function plus
//! a concave function of `|X ∩ S|`. Offsets are chosen so that every union of
//! weak components keeps `b >= 0`.

use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexSet, WeightVector, MAX_VERTICES};
use crate::instance::Instance;
use crate::rational::{rat, Rational};
use crate::setfn::{SetFunction, SetOracle};

/// Largest ground set the generator accepts; tables have `2^n` entries.
pub const MAX_GEN_VERTICES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    Cut,
    Modular,
    PerturbedCut,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Cut => "cut",
            FunctionKind::Modular => "modular",
            FunctionKind::PerturbedCut => "perturbed-cut",
        }
    }
}

impl FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cut" => Ok(FunctionKind::Cut),
            "modular" => Ok(FunctionKind::Modular),
            "perturbed-cut" => Ok(FunctionKind::PerturbedCut),
            _ => Err(Error::InvalidParameter(format!("unknown function kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub kind: FunctionKind,
    /// Build the graph from directed cycles (plus a self-loop for an odd
    /// leftover arc) so that it is Eulerian.
    pub eulerian: bool,
    /// Closed range for arc weights; `None` leaves the instance unweighted.
    pub weight_range: Option<(Rational, Rational)>,
    /// Closed range for offsets and modular values.
    pub value_range: (i64, i64),
}

impl GenParams {
    pub fn new(seed: u64, n: usize, m: usize, kind: FunctionKind) -> Self {
        GenParams {
            seed,
            n,
            m,
            kind,
            eulerian: false,
            weight_range: None,
            value_range: (-3, 3),
        }
    }

    pub fn eulerian(mut self, on: bool) -> Self {
        self.eulerian = on;
        self
    }

    pub fn weights(mut self, lo: Rational, hi: Rational) -> Self {
        self.weight_range = Some((lo, hi));
        self
    }

    pub fn values(mut self, lo: i64, hi: i64) -> Self {
        self.value_range = (lo, hi);
        self
    }

    /// Fewest arcs that cover every vertex.
    pub fn min_arcs(&self) -> usize {
        if self.eulerian {
            self.n
        } else {
            self.n.div_ceil(2)
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 || self.n > MAX_GEN_VERTICES.min(MAX_VERTICES) {
            return bad(format!("n must be in 2..={MAX_GEN_VERTICES}, got {}", self.n));
        }
        if self.m < self.min_arcs() {
            return bad(format!(
                "m = {} cannot cover {} vertices (need at least {})",
                self.m,
                self.n,
                self.min_arcs()
            ));
        }
        if self.value_range.0 > self.value_range.1 {
            return bad(format!("empty value range {:?}", self.value_range));
        }
        if let Some((lo, hi)) = &self.weight_range {
            if !lo.is_positive() || lo > hi {
                return bad(format!("weight range [{lo}, {hi}] must be positive and nonempty"));
            }
        }
        Ok(())
    }
}

pub fn generate(p: &GenParams) -> Result<Instance> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let arcs = if p.eulerian {
        eulerian_arcs(&mut rng, p.n, p.m)
    } else {
        covering_arcs(&mut rng, p.n, p.m)
    };
    let graph = Digraph::new(p.n, arcs)?;
    let comps = graph.components();
    let b = match p.kind {
        FunctionKind::Cut => random_cut(&mut rng, p.n, &comps, p.value_range)?,
        FunctionKind::Modular => random_modular(&mut rng, p.n, &comps, p.value_range),
        FunctionKind::PerturbedCut => {
            let cut = random_cut(&mut rng, p.n, &comps, p.value_range)?;
            let s = VertexSet::from_bits(rng.gen_range(1..1u32 << p.n));
            let cap = rng.gen_range(1..=s.len()) as i64;
            let scale = rat(rng.gen_range(1..=3));
            let values = VertexSet::all(p.n)
                .map(|x| cut.eval(x) + &scale * rat((x.intersection(s).len() as i64).min(cap)))
                .collect();
            SetFunction::table(p.n, values)?
        }
    };
    let weights = match &p.weight_range {
        Some((lo, hi)) => {
            let step = (hi - lo) / rat(6);
            Some(WeightVector::new(
                (0..p.m).map(|_| lo + &step * rat(rng.gen_range(0..=6))).collect(),
            )?)
        }
        None => None,
    };
    let comment = format!("seed={} n={} m={} kind={}", p.seed, p.n, p.m, p.kind.name());
    Instance::new(graph, b, weights, comment)
}

/// Vertices paired up in random order so that each one meets an arc, then
/// uniform extra arcs between distinct vertices.
fn covering_arcs(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs = Vec::with_capacity(m);
    for pair in order.chunks(2) {
        let (u, v) = match *pair {
            [u, v] => (u, v),
            [u] => (u, *order.iter().find(|&&w| w != u).expect("n >= 2")),
            _ => unreachable!(),
        };
        arcs.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
    }
    while arcs.len() < m {
        let t = rng.gen_range(0..n);
        let h = (t + rng.gen_range(1..n)) % n;
        arcs.push((t, h));
    }
    arcs
}

/// Disjoint cycles of length 2 to 4 through every vertex, then random extra
/// cycles; a single leftover arc becomes a self-loop.
fn eulerian_arcs(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    fn close(cycle: &[usize], arcs: &mut Vec<(usize, usize)>) {
        for (i, &v) in cycle.iter().enumerate() {
            arcs.push((v, cycle[(i + 1) % cycle.len()]));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs = Vec::with_capacity(m);
    let mut rest = &order[..];
    while !rest.is_empty() {
        let mut k = rng.gen_range(2..=rest.len().min(4));
        if rest.len() - k == 1 {
            k = if k < 4 && k < rest.len() { k + 1 } else { k - 1 };
        }
        close(&rest[..k], &mut arcs);
        rest = &rest[k..];
    }
    while arcs.len() < m {
        let left = m - arcs.len();
        if left == 1 {
            let v = rng.gen_range(0..n);
            arcs.push((v, v));
            break;
        }
        let k = rng.gen_range(2..=left.min(4).min(n));
        let mut pick: Vec<usize> = (0..n).collect();
        pick.shuffle(rng);
        close(&pick[..k], &mut arcs);
    }
    arcs
}

/// Offsets in `range` that sum to zero on every component, so the modular
/// part vanishes on component unions.
fn balanced_offsets(rng: &mut ChaCha8Rng, n: usize, comps: &[VertexSet], range: (i64, i64)) -> Vec<Rational> {
    let mut offset = vec![0i64; n];
    for c in comps {
        let members: Vec<usize> = c.iter().collect();
        for &v in &members {
            offset[v] = rng.gen_range(range.0..=range.1);
        }
        let last = *members.last().expect("components are nonempty");
        offset[last] -= members.iter().map(|&v| offset[v]).sum::<i64>();
    }
    offset.into_iter().map(rat).collect()
}

fn random_cut(rng: &mut ChaCha8Rng, n: usize, comps: &[VertexSet], range: (i64, i64)) -> Result<SetFunction> {
    let count = rng.gen_range(n..=2 * n);
    let aux = (0..count)
        .map(|_| {
            let t = rng.gen_range(0..n);
            let h = (t + rng.gen_range(1..n)) % n;
            (t, h, rat(rng.gen_range(0..=3)))
        })
        .collect();
    let offset = balanced_offsets(rng, n, comps, range);
    SetFunction::cut_capacity(n, aux, Some(offset))
}

/// Modular values in `range`, lifted where needed so each component sums to
/// at least zero.
fn random_modular(rng: &mut ChaCha8Rng, n: usize, comps: &[VertexSet], range: (i64, i64)) -> SetFunction {
    let mut values: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(range.0..=range.1))).collect();
    for c in comps {
        let sum: Rational = c.iter().map(|v| values[v].clone()).sum();
        if sum.is_negative() {
            let last = c.iter().last().expect("components are nonempty");
            values[last] -= sum;
        }
    }
    SetFunction::modular(Rational::zero(), values)
}
