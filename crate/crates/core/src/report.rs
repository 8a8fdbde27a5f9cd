//! Report files and their independent verification.

use std::path::Path;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::balanced::{is_admissible_pair, pair_sigma, Algorithm, SetProfile, SolveReport, Status};
use crate::error::{Error, Result};
use crate::feasibility::check_feasible;
use crate::graph::{spread, weighted_spread, FlowVector, VertexSet};
use crate::instance::Instance;
use crate::oracle::{brute_dual_xy, brute_feasible};
use crate::rational::{one, Rational};
use crate::setfn::{BruteForceSfm, SetOracle};

pub const REPORT_VERSION: u32 = 1;

/// Largest instance for which `verify` runs the exhaustive pair scan.
pub const ORACLE_MAX_VERTICES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: u32,
    pub instance_digest: String,
    #[serde(flatten)]
    pub report: SolveReport,
    /// Absent unless timing was requested, so reruns are byte-identical.
    pub wall_time_ms: Option<u64>,
}

impl ReportFile {
    pub fn new(instance: &Instance, report: SolveReport, wall_time_ms: Option<u64>) -> Self {
        ReportFile {
            version: REPORT_VERSION,
            instance_digest: instance.digest(),
            report,
            wall_time_ms,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        ReportFile::from_json(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Re-derives every claim of a report from the instance alone.
///
/// Fails with an error (not a failed check) when the report belongs to a
/// different instance.
pub fn verify(instance: &Instance, file: &ReportFile) -> Result<Vec<Check>> {
    let digest = instance.digest();
    if file.instance_digest != digest {
        return Err(Error::Format(format!(
            "instance_digest: report is for {}, instance is {digest}",
            file.instance_digest
        )));
    }
    let r = &file.report;
    let mut out = vec![check(
        "iterations",
        r.iterations == r.trace.len(),
        format!("{} iterations, {} trace steps", r.iterations, r.trace.len()),
    )];
    match r.status {
        Status::Infeasible => out.push(verify_infeasible(instance, r)),
        Status::Optimal => verify_optimal(instance, r, &mut out),
    }
    Ok(out)
}

fn verify_infeasible(inst: &Instance, r: &SolveReport) -> Check {
    let Some(x) = r.infeasible_set else {
        return check("infeasibility-certificate", false, "no set given");
    };
    let cut = inst.graph.cut_counts(x);
    let value = inst.b.eval(x);
    check(
        "infeasibility-certificate",
        cut.boundary() == 0 && value.is_negative(),
        format!("set {x}: boundary {}, b = {value}", cut.boundary()),
    )
}

fn verify_optimal(inst: &Instance, r: &SolveReport, out: &mut Vec<Check>) {
    let Some(cert) = &r.certificate else {
        out.push(check("certificate", false, "optimal report without certificate"));
        return;
    };
    let g = &inst.graph;
    let b: &dyn SetOracle = &inst.b;
    let w = inst.weight_vector();
    let wt = w.term_weights();
    let sigma = &cert.sigma_star;
    let kappa = cert.kappa_star.clone().unwrap_or_else(Rational::zero);
    let m = g.arc_count();

    // the box [kappa c~, (kappa + sigma) c~] holds a submodular flow
    let top = &kappa + sigma;
    let lower = FlowVector(w.reciprocals().iter().map(|q| q * &kappa).collect());
    let upper = FlowVector(w.reciprocals().iter().map(|q| q * &top).collect());
    let feasible = !sigma.is_negative()
        && check_feasible(g, b, &lower, &upper, &BruteForceSfm)
            .map(|o| o.is_feasible())
            .unwrap_or(false);
    out.push(check(
        "feasibility",
        feasible,
        format!("box at kappa = {kappa}, width {sigma}"),
    ));

    let profile = |x: VertexSet| SetProfile::new(g, b, x, wt);
    let constant = (0..g.vertex_count()).all(|v| profile(VertexSet::singleton(v)).net().is_zero());
    let ratio = match (cert.x, cert.y) {
        (Some(x), Some(y)) => {
            let (px, py) = (profile(x), profile(y));
            let ok = is_admissible_pair(&px, &py);
            out.push(check("sign-preconditions", ok, format!("X = {x}, Y = {y}")));
            if ok {
                pair_sigma(&px, &py).ok()
            } else {
                None
            }
        }
        (Some(x), None) => {
            let px = profile(x);
            let ok = constant && px.leaving.is_positive();
            out.push(check("sign-preconditions", ok, format!("X = {x} without Y")));
            ok.then(|| -&px.b / &px.leaving)
        }
        (None, Some(_)) => {
            out.push(check("sign-preconditions", false, "Y without X"));
            None
        }
        (None, None) => None,
    };
    let ratio_ok = match &ratio {
        Some(v) if sigma.is_positive() => v == sigma,
        Some(v) => !v.is_positive(),
        None => sigma.is_zero() && cert.x.is_none() && cert.y.is_none(),
    };
    out.push(check(
        "certificate-ratio",
        ratio_ok,
        format!(
            "ratio {} vs sigma {sigma}",
            ratio.map_or("none".into(), |v| v.to_string())
        ),
    ));

    // weak duality on pairs built from single vertices and their complements
    let n = g.vertex_count();
    let probes: Vec<VertexSet> = (0..n)
        .flat_map(|v| [VertexSet::singleton(v), VertexSet::singleton(v).complement(n)])
        .map(profile)
        .map(|p| p.set)
        .collect();
    let mut worst: Option<(Rational, VertexSet, VertexSet)> = None;
    for &x in &probes {
        for &y in &probes {
            let (px, py) = (profile(x), profile(y));
            if is_admissible_pair(&px, &py) {
                if let Ok(v) = pair_sigma(&px, &py) {
                    if worst.as_ref().is_none_or(|(wv, ..)| &v > wv) {
                        worst = Some((v, x, y));
                    }
                }
            }
        }
    }
    let lb_ok = worst.as_ref().is_none_or(|(v, ..)| v <= sigma);
    out.push(check(
        "lower-bound",
        lb_ok,
        worst.map_or("no admissible probe pair".into(), |(v, x, y)| {
            format!("best probe ({x}, {y}) gives {v}")
        }),
    ));

    if n <= ORACLE_MAX_VERTICES {
        let (best, _) = brute_dual_xy(g, b, Some(&w));
        out.push(check(
            "oracle-agreement",
            &best == sigma,
            format!("exhaustive dual {best}"),
        ));
    }

    if let Some(flow) = &r.flow {
        out.push(verify_flow(inst, r, flow, &lower, &upper));
    }
    if r.algorithm == Algorithm::Integral {
        out.push(verify_integral(r, sigma, m));
    }
}

fn verify_flow(inst: &Instance, r: &SolveReport, flow: &FlowVector, lower: &FlowVector, upper: &FlowVector) -> Check {
    let g = &inst.graph;
    if flow.len() != g.arc_count() {
        return check(
            "flow",
            false,
            format!("{} values for {} arcs", flow.len(), g.arc_count()),
        );
    }
    let (feasible, violated) = brute_feasible(g, &inst.b, flow, flow);
    if !feasible {
        return check(
            "flow",
            false,
            format!("violates set {}", violated.map_or("?".into(), |x| x.to_string())),
        );
    }
    let sigma = r.sigma_star().cloned().unwrap_or_else(Rational::zero);
    match (&r.integral, r.algorithm) {
        (Some(int), Algorithm::Integral) => {
            let in_box = flow.is_integral()
                && flow
                    .0
                    .iter()
                    .all(|x| x >= &int.kappa_i && x <= &(&int.kappa_i + &int.sigma_i));
            check(
                "flow",
                in_box,
                format!("integral flow in [{}, {}]", int.kappa_i, &int.kappa_i + &int.sigma_i),
            )
        }
        _ => {
            let s = match &inst.weights {
                Some(w) => weighted_spread(flow, w),
                None => spread(flow),
            };
            let in_box = flow
                .0
                .iter()
                .zip(&lower.0)
                .zip(&upper.0)
                .all(|((x, l), u)| l <= x && x <= u);
            let ok = in_box && s.as_ref().is_ok_and(|s| s == &sigma);
            check(
                "flow",
                ok,
                format!("spread {} vs sigma {sigma}", s.map_or("?".into(), |s| s.to_string())),
            )
        }
    }
}

fn verify_integral(r: &SolveReport, sigma: &Rational, m: usize) -> Check {
    let Some(int) = &r.integral else {
        return check("integral", false, "integral report without integral result");
    };
    let ok = int.sigma_i.is_integer()
        && int.kappa_i.is_integer()
        && &int.sigma_i >= sigma
        && int.sigma_i <= sigma + one()
        && r.flow.as_ref().is_some_and(|f| f.len() == m);
    check(
        "integral",
        ok,
        format!("integral width {} vs fractional {sigma}", int.sigma_i),
    )
}
