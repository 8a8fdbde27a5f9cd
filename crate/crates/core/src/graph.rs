//! Instance model: digraphs, vertex sets, arc vectors and cut quantities.
//!
//! For a vertex set `X`, an arc *enters* `X` when its head is in `X` and its
//! tail is not, and *leaves* `X` in the opposite case. Self-loops never cross
//! a boundary.

use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest ground set a [`VertexSet`] can index.
pub const MAX_VERTICES: usize = 30;

/// A subset of `0..n` stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        VertexSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(v: usize) -> Self {
        debug_assert!(v < MAX_VERTICES);
        VertexSet(1 << v)
    }

    pub fn from_vertices(vs: impl IntoIterator<Item = usize>) -> Self {
        vs.into_iter().fold(Self::EMPTY, |s, v| s.with(v))
    }

    pub fn contains(self, v: usize) -> bool {
        v < 32 && self.0 >> v & 1 == 1
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1 << v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1 << v))
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        VertexSet(!self.0 & Self::full(n).0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |v| bits >> v & 1 == 1)
    }

    /// All subsets of `0..n` in increasing bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = VertexSet> {
        debug_assert!(n <= MAX_VERTICES);
        (0..1u32 << n).map(VertexSet)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let vs = Vec::<usize>::deserialize(d)?;
        if let Some(v) = vs.iter().find(|&&v| v >= MAX_VERTICES) {
            return Err(serde::de::Error::custom(format!("vertex {v} out of range")));
        }
        Ok(VertexSet::from_vertices(vs))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CutCounts {
    pub entering: i64,
    pub leaving: i64,
}

impl CutCounts {
    pub fn net(&self) -> i64 {
        self.entering - self.leaving
    }

    pub fn boundary(&self) -> i64 {
        self.entering + self.leaving
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedCut {
    pub entering: Rational,
    pub leaving: Rational,
}

impl WeightedCut {
    pub fn net(&self) -> Rational {
        &self.entering - &self.leaving
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > MAX_VERTICES {
            return Err(Error::GroundSetTooLarge { n, max: MAX_VERTICES });
        }
        for (i, &(t, h)) in arcs.iter().enumerate() {
            if let Some(v) = [t, h].into_iter().find(|&v| v >= n) {
                return Err(Error::ArcOutOfRange { arc: i, vertex: v, n });
            }
        }
        Ok(Digraph { n, arcs })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// `+1` if arc `a` enters `x`, `-1` if it leaves, `0` otherwise.
    pub fn crossing(&self, a: usize, x: VertexSet) -> i8 {
        let (t, h) = self.arcs[a];
        match (x.contains(t), x.contains(h)) {
            (false, true) => 1,
            (true, false) => -1,
            _ => 0,
        }
    }

    pub fn cut_counts(&self, x: VertexSet) -> CutCounts {
        let mut c = CutCounts::default();
        for a in 0..self.arcs.len() {
            match self.crossing(a, x) {
                1 => c.entering += 1,
                -1 => c.leaving += 1,
                _ => {}
            }
        }
        c
    }

    /// Sums of `w` over entering and leaving arcs.
    pub fn cut_weighted(&self, x: VertexSet, w: &[Rational]) -> WeightedCut {
        debug_assert_eq!(w.len(), self.arcs.len());
        let mut c = WeightedCut::default();
        for (a, wa) in w.iter().enumerate() {
            match self.crossing(a, x) {
                1 => c.entering += wa,
                -1 => c.leaving += wa,
                _ => {}
            }
        }
        c
    }

    /// In-degree equals out-degree at every vertex. Connectivity is not required.
    pub fn is_eulerian(&self) -> bool {
        (0..self.n).all(|v| self.cut_counts(VertexSet::singleton(v)).net() == 0)
    }

    /// First vertex whose boundary is empty (self-loops do not count).
    pub fn isolated_vertex(&self) -> Option<usize> {
        (0..self.n).find(|&v| self.cut_counts(VertexSet::singleton(v)).boundary() == 0)
    }

    /// Weakly connected components, ignoring self-loops, as vertex sets.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while p[r] != r {
                r = p[r];
            }
            let mut c = v;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for &(t, h) in &self.arcs {
            let (rt, rh) = (find(&mut parent, t), find(&mut parent, h));
            if rt != rh {
                parent[rt.max(rh)] = rt.min(rh);
            }
        }
        let mut comps: Vec<VertexSet> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for v in 0..self.n {
            let r = find(&mut parent, v);
            match roots.iter().position(|&x| x == r) {
                Some(i) => comps[i] = comps[i].with(v),
                None => {
                    roots.push(r);
                    comps.push(VertexSet::singleton(v));
                }
            }
        }
        comps
    }
}

/// One exact value per arc.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlowVector(#[serde(with = "crate::rational::serde_rational_vec")] pub Vec<Rational>);

impl FlowVector {
    pub fn constant(m: usize, value: &Rational) -> Self {
        FlowVector(vec![value.clone(); m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|q| q.is_integer())
    }
}

/// Strictly positive arc weights `c` together with their reciprocals `1/c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<Rational>,
    reciprocals: Vec<Rational>,
    unit: bool,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some((arc, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_positive()) {
            return Err(Error::NonPositiveWeight {
                arc,
                value: w.to_string(),
            });
        }
        let reciprocals = weights.iter().map(|w| w.recip()).collect();
        let unit = weights.iter().all(|w| w.is_one());
        Ok(WeightVector {
            weights,
            reciprocals,
            unit,
        })
    }

    pub fn unit(m: usize) -> Self {
        WeightVector::new(vec![Rational::one(); m]).expect("unit weights are positive")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn reciprocals(&self) -> &[Rational] {
        &self.reciprocals
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    /// Reciprocal weights, or `None` when they are all one (counting form).
    pub fn term_weights(&self) -> Option<&[Rational]> {
        if self.unit {
            None
        } else {
            Some(&self.reciprocals)
        }
    }
}

pub fn spread(x: &FlowVector) -> Result<Rational> {
    let max = x.0.iter().max().ok_or(Error::EmptyVector)?;
    let min = x.0.iter().min().ok_or(Error::EmptyVector)?;
    Ok(max - min)
}

pub fn weighted_spread(x: &FlowVector, c: &WeightVector) -> Result<Rational> {
    if x.len() != c.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            found: x.len(),
        });
    }
    let scaled: Vec<Rational> = x.0.iter().zip(c.weights()).map(|(v, w)| v * w).collect();
    spread(&FlowVector(scaled))
}

pub(crate) fn check_len(g: &Digraph, len: usize) -> Result<()> {
    if len != g.arc_count() {
        return Err(Error::LengthMismatch {
            expected: g.arc_count(),
            found: len,
        });
    }
    Ok(())
}
