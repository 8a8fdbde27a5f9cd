//! JSON instance files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "n": 2,
//!   "arcs": [[0, 1], [0, 1]],
//!   "weights": ["1", "2"],
//!   "b": {"kind": "table", "payload": ["0", "-1", "1", "0"]},
//!   "comment": "parallel pair"
//! }
//! ```
//!
//! Rationals are `"p/q"` strings. `b` is one of
//! `table` (the `2^n` values in bitmask order), `modular`
//! (`{"constant", "values"}`) or `cut` (`{"arcs": [[t, h, "cap"]], "offset"}`,
//! the leaving capacity plus an optional per-vertex modular offset).

use std::path::Path;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::balanced::{solve_basic_xy, solve_eulerian, solve_improved_xy, Algorithm, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexSet, WeightVector};
use crate::integral::solve_integral;
use crate::rational::{format, parse, Rational};
use crate::setfn::{verify_submodular, SetFunction, SetOracle};
use crate::weighted::solve_weighted;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    pub b: FunctionSpec,
    #[serde(default)]
    pub comment: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum FunctionSpec {
    Table(Vec<String>),
    Modular {
        constant: String,
        values: Vec<String>,
    },
    Cut {
        arcs: Vec<(usize, usize, String)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<String>>,
    },
}

/// Algorithm selection on the command line; `Auto` picks weighted when the
/// instance has weights, else Eulerian or the improved pair method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmChoice {
    Auto,
    Fixed(Algorithm),
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Digraph,
    pub b: SetFunction,
    pub weights: Option<WeightVector>,
    pub comment: String,
}

fn field(name: String, s: &str) -> Result<Rational> {
    parse(s).map_err(|_| Error::Format(format!("{name}: not a rational: {s:?}")))
}

fn fields(name: &str, v: &[String]) -> Result<Vec<Rational>> {
    v.iter()
        .enumerate()
        .map(|(i, s)| field(format!("{name}[{i}]"), s))
        .collect()
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format).collect()
}

impl Instance {
    /// Validates: submodular table, no isolated vertex, matching weight
    /// count, and `b >= 0` on every set with no boundary.
    pub fn new(graph: Digraph, b: SetFunction, weights: Option<WeightVector>, comment: String) -> Result<Self> {
        if b.ground_size() != graph.vertex_count() {
            return Err(Error::GroundSetMismatch {
                expected: graph.vertex_count(),
                found: b.ground_size(),
            });
        }
        if let Some(w) = &weights {
            if w.len() != graph.arc_count() {
                return Err(Error::LengthMismatch {
                    expected: graph.arc_count(),
                    found: w.len(),
                });
            }
        }
        if let SetFunction::Table { .. } = b {
            verify_submodular(&b)?;
        }
        if let Some(v) = graph.isolated_vertex() {
            return Err(Error::IsolatedVertex(v));
        }
        // sets with no boundary are exactly unions of weak components
        let comps = graph.components();
        for mask in 1u64..1 << comps.len() {
            let u = comps
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(VertexSet::EMPTY, |acc, (_, c)| acc.union(*c));
            if b.eval(u).is_negative() {
                return Err(Error::BoundaryFreeDeficit(u));
            }
        }
        Ok(Instance {
            graph,
            b,
            weights,
            comment,
        })
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        if file.version != FORMAT_VERSION {
            return Err(Error::Format(format!("version: unsupported {}", file.version)));
        }
        let graph = Digraph::new(file.n, file.arcs.clone())?;
        let b = match &file.b {
            FunctionSpec::Table(values) => SetFunction::table(file.n, fields("b.payload", values)?)?,
            FunctionSpec::Modular { constant, values } => {
                if values.len() != file.n {
                    return Err(Error::Format(format!(
                        "b.payload.values: expected {} entries, found {}",
                        file.n,
                        values.len()
                    )));
                }
                SetFunction::modular(
                    field("b.payload.constant".into(), constant)?,
                    fields("b.payload.values", values)?,
                )
            }
            FunctionSpec::Cut { arcs, offset } => {
                let arcs = arcs
                    .iter()
                    .enumerate()
                    .map(|(i, (t, h, c))| Ok((*t, *h, field(format!("b.payload.arcs[{i}]"), c)?)))
                    .collect::<Result<Vec<_>>>()?;
                let offset = offset.as_ref().map(|o| fields("b.payload.offset", o)).transpose()?;
                SetFunction::cut_capacity(file.n, arcs, offset)?
            }
        };
        let weights = file
            .weights
            .as_ref()
            .map(|w| fields("weights", w))
            .transpose()?
            .map(WeightVector::new)
            .transpose()?;
        Instance::new(graph, b, weights, file.comment.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Instance::from_file(&file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Instance::from_json(&text)
    }

    /// Canonical file form: rationals in lowest terms.
    pub fn to_file(&self) -> InstanceFile {
        let b = match &self.b {
            SetFunction::Table { values, .. } => FunctionSpec::Table(strings(values)),
            SetFunction::Modular { constant, values } => FunctionSpec::Modular {
                constant: format(constant),
                values: strings(values),
            },
            SetFunction::CutCapacity { arcs, offset, .. } => FunctionSpec::Cut {
                arcs: arcs.iter().map(|(t, h, c)| (*t, *h, format(c))).collect(),
                offset: (!offset.iter().all(Zero::is_zero)).then(|| strings(offset)),
            },
        };
        InstanceFile {
            version: FORMAT_VERSION,
            n: self.graph.vertex_count(),
            arcs: self.graph.arcs().to_vec(),
            weights: self.weights.as_ref().map(|w| strings(w.weights())),
            b,
            comment: self.comment.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("instance serializes");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical form without the comment.
    pub fn digest(&self) -> String {
        let mut file = self.to_file();
        file.comment.clear();
        let bytes = serde_json::to_vec(&file).expect("instance serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn resolve(&self, choice: AlgorithmChoice) -> Algorithm {
        match choice {
            AlgorithmChoice::Fixed(a) => a,
            AlgorithmChoice::Auto if self.weights.as_ref().is_some_and(|w| !w.is_unit()) => Algorithm::Weighted,
            AlgorithmChoice::Auto if self.graph.is_eulerian() => Algorithm::Eulerian,
            AlgorithmChoice::Auto => Algorithm::ImprovedXy,
        }
    }

    pub fn solve(&self, choice: AlgorithmChoice, opts: &SolveOptions) -> Result<SolveReport> {
        let algorithm = self.resolve(choice);
        let weighted = self.weights.as_ref().is_some_and(|w| !w.is_unit());
        if weighted && algorithm != Algorithm::Weighted {
            return Err(Error::InvalidParameter(format!(
                "instance has arc weights; algorithm {} is unweighted",
                algorithm.name()
            )));
        }
        let (g, b) = (&self.graph, &self.b);
        match algorithm {
            Algorithm::Eulerian => solve_eulerian(g, b, opts),
            Algorithm::BasicXy => solve_basic_xy(g, b, opts),
            Algorithm::ImprovedXy => solve_improved_xy(g, b, opts),
            Algorithm::Weighted => {
                let unit;
                let w = match &self.weights {
                    Some(w) => w,
                    None => {
                        unit = WeightVector::unit(g.arc_count());
                        &unit
                    }
                };
                solve_weighted(g, b, w, opts)
            }
            Algorithm::Integral => solve_integral(g, b, opts),
        }
    }

    /// Reciprocal weights, or all ones.
    pub fn weight_vector(&self) -> WeightVector {
        self.weights
            .clone()
            .unwrap_or_else(|| WeightVector::unit(self.graph.arc_count()))
    }
}
