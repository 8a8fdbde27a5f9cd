#![allow(dead_code)]

use std::path::PathBuf;

use balflow::gen::{generate, FunctionKind, GenParams};
use balflow::instance::Instance;
use balflow::rational::{rat, ratio};
use balflow::{Digraph, FlowVector, Rational, VertexSet};

pub const KINDS: [FunctionKind; 3] = [FunctionKind::Cut, FunctionKind::Modular, FunctionKind::PerturbedCut];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Instance {
    Instance::load(&fixture_path(name)).unwrap()
}

/// Parameters for the `i`-th instance of a mixed family: sizes cycle through
/// `2..=max_n`, even indices are Eulerian, and the function kind rotates.
pub fn mixed_params(i: u64, max_n: usize, max_m: usize) -> GenParams {
    let n = 2 + (i as usize) % (max_n - 1);
    let eulerian = i.is_multiple_of(2);
    let kind = KINDS[(i as usize / 2) % KINDS.len()];
    let p = GenParams::new(1000 + i, n, 0, kind).eulerian(eulerian);
    let lo = p.min_arcs();
    let m = lo + (i as usize * 7 + 3) % (max_m - lo + 1);
    GenParams { m, ..p }
}

pub fn mixed_instances(count: u64, max_n: usize, max_m: usize) -> Vec<Instance> {
    (0..count)
        .map(|i| generate(&mixed_params(i, max_n, max_m)).unwrap())
        .collect()
}

/// Mixed family with arc weights drawn from `[1/2, 3]`.
pub fn weighted_instances(count: u64, max_n: usize, max_m: usize) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let p = mixed_params(i, max_n, max_m);
            let p = GenParams { seed: 5000 + i, ..p }.weights(ratio(1, 2), rat(3));
            generate(&p).unwrap()
        })
        .collect()
}

/// `entering_l(X) - leaving_u(X)`, from a plain loop over the arcs.
pub fn box_inflow(g: &Digraph, x: VertexSet, l: &FlowVector, u: &FlowVector) -> Rational {
    let mut total = rat(0);
    for (a, &(t, h)) in g.arcs().iter().enumerate() {
        match (x.contains(t), x.contains(h)) {
            (false, true) => total += &l.0[a],
            (true, false) => total -= &u.0[a],
            _ => {}
        }
    }
    total
}

pub fn spread_of(x: &FlowVector) -> Rational {
    let max = x.0.iter().max().unwrap();
    let min = x.0.iter().min().unwrap();
    max - min
}

/// `max(c x) - min(c x)`.
pub fn weighted_spread_of(x: &FlowVector, c: &[Rational]) -> Rational {
    let scaled: Vec<Rational> = x.0.iter().zip(c).map(|(v, w)| v * w).collect();
    scaled.iter().max().unwrap() - scaled.iter().min().unwrap()
}
