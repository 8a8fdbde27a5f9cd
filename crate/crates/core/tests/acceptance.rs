//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use balflow::instance::{AlgorithmChoice, Instance};
use balflow::integral::s_i;
use balflow::oracle::{
    brute_dual_eulerian, brute_dual_xy, brute_feasible, brute_integral_spread, brute_integral_width,
};
use balflow::rational::{rat, ratio};
use balflow::report::ReportFile;
use balflow::setfn::SetOracle;
use balflow::weighted::{KappaMax, WeightedSolver};
use balflow::{
    check_feasible, solve_integral, solve_weighted, Algorithm, BruteForceSfm, FeasibilityOutcome, FlowVector, Rational,
    SolveOptions, Status, VertexSet, WeightVector,
};
use common::{box_inflow, fixture, mixed_instances, spread_of, weighted_instances, weighted_spread_of};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fail<E: std::fmt::Display>(context: String) -> impl FnOnce(E) -> String {
    move |e| format!("{context}: {e}")
}

fn optimal_sigma(inst: &Instance, choice: AlgorithmChoice, i: usize) -> Result<Rational, String> {
    let r = inst
        .solve(choice, &SolveOptions::default())
        .map_err(fail(format!("instance {i}")))?;
    r.sigma_star()
        .cloned()
        .ok_or_else(|| format!("instance {i}: not optimal"))
}

fn unit_weights(inst: &Instance) -> WeightVector {
    WeightVector::unit(inst.graph.arc_count())
}

/// Solver sigma* equals the exhaustive dual on 200 mixed instances.
fn dual_primal_equality() -> Outcome {
    let insts = mixed_instances(200, 8, 12);
    let mut eulerian = 0;
    for (i, inst) in insts.iter().enumerate() {
        let (g, b) = (&inst.graph, &inst.b);
        ensure!(g.vertex_count() <= 8 && g.arc_count() <= 12, "instance {i} too large");
        let sigma = optimal_sigma(inst, AlgorithmChoice::Auto, i)?;
        let expected = if g.is_eulerian() {
            eulerian += 1;
            brute_dual_eulerian(g, b).0
        } else {
            brute_dual_xy(g, b, None).0
        };
        ensure!(
            sigma == expected,
            "instance {i}: solver {sigma}, exhaustive dual {expected}"
        );
    }
    Ok(format!("{} instances, {eulerian} Eulerian", insts.len()))
}

/// Pair methods agree and stay within their iteration bounds.
fn cross_algorithm_agreement() -> Outcome {
    let insts = mixed_instances(200, 8, 12);
    let opts = SolveOptions::default();
    let (mut pairs, mut eulerian) = (0, 0);
    for (i, inst) in insts.iter().enumerate() {
        let (g, b) = (&inst.graph, &inst.b);
        let m = g.arc_count();
        if g.is_eulerian() {
            let r = inst
                .solve(AlgorithmChoice::Fixed(Algorithm::Eulerian), &opts)
                .map_err(fail(format!("instance {i}")))?;
            ensure!(
                r.iterations <= m + 1,
                "instance {i}: Eulerian took {} > {} iterations",
                r.iterations,
                m + 1
            );
            eulerian += 1;
            continue;
        }
        let basic = inst
            .solve(AlgorithmChoice::Fixed(Algorithm::BasicXy), &opts)
            .map_err(fail(format!("instance {i}")))?;
        let improved = inst
            .solve(AlgorithmChoice::Fixed(Algorithm::ImprovedXy), &opts)
            .map_err(fail(format!("instance {i}")))?;
        let bound = (m + 1) * (m + 1);
        ensure!(
            improved.iterations <= bound,
            "instance {i}: improved took {} > {bound} iterations",
            improved.iterations
        );
        ensure!(
            basic.sigma_star() == improved.sigma_star(),
            "instance {i}: basic {:?}, improved {:?}",
            basic.sigma_star(),
            improved.sigma_star()
        );
        let sigma = improved
            .sigma_star()
            .cloned()
            .ok_or_else(|| format!("instance {i}: not optimal"))?;
        for r in [&basic, &improved] {
            let kappa = r
                .kappa_star()
                .cloned()
                .ok_or_else(|| format!("instance {i}: no kappa*"))?;
            let l = FlowVector::constant(m, &kappa);
            let u = FlowVector::constant(m, &(&kappa + &sigma));
            ensure!(
                brute_feasible(g, b, &l, &u).0,
                "instance {i}: {} box at kappa* = {kappa} infeasible",
                r.algorithm.name()
            );
        }
        pairs += 1;
    }
    Ok(format!(
        "{pairs} non-Eulerian pairs agree, {eulerian} Eulerian within m+1"
    ))
}

/// Random boxes by mode: 0 crosses one arc, 1 squeezes every arc to width
/// at most 1/4, 2 leaves widths up to 3.
fn random_box(rng: &mut ChaCha8Rng, m: usize, mode: usize) -> (FlowVector, FlowVector) {
    let mut l = Vec::with_capacity(m);
    let mut u = Vec::with_capacity(m);
    for _ in 0..m {
        let lo = ratio(rng.gen_range(-4..=4), 2);
        let width = if mode == 1 {
            ratio(rng.gen_range(0..=1), 4)
        } else {
            ratio(rng.gen_range(0..=6), 2)
        };
        u.push(&lo + width);
        l.push(lo);
    }
    if mode == 0 {
        let a = rng.gen_range(0..m);
        u[a] = &l[a] - ratio(rng.gen_range(1..=4), 4);
    }
    (FlowVector(l), FlowVector(u))
}

/// `check_feasible` matches the exhaustive check on 500 boxes.
fn feasibility_equivalence() -> Outcome {
    let insts = mixed_instances(50, 6, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut feasible, mut crossed, mut violated) = (0, 0, 0);
    for t in 0..500 {
        let inst = &insts[t % insts.len()];
        let (g, b) = (&inst.graph, &inst.b);
        let mode = [0, 1, 1, 1, 2, 2, 2, 2, 2, 2][t % 10];
        let (l, u) = random_box(&mut rng, g.arc_count(), mode);
        let outcome = check_feasible(g, b, &l, &u, &BruteForceSfm).map_err(fail(format!("triple {t}")))?;
        let (expected, _) = brute_feasible(g, b, &l, &u);
        ensure!(
            outcome.is_feasible() == expected,
            "triple {t}: solver {outcome:?}, exhaustive {expected}"
        );
        match outcome {
            FeasibilityOutcome::Feasible => feasible += 1,
            FeasibilityOutcome::Infeasible(balflow::feasibility::Infeasibility::CrossedBounds { arc }) => {
                ensure!(l.0[arc] > u.0[arc], "triple {t}: arc {arc} is not crossed");
                crossed += 1;
            }
            FeasibilityOutcome::Infeasible(balflow::feasibility::Infeasibility::ViolatedSet(x)) => {
                let inflow = box_inflow(g, x, &l, &u);
                ensure!(
                    inflow > b.eval(x),
                    "triple {t}: set {x} has inflow {inflow} <= b = {}",
                    b.eval(x)
                );
                violated += 1;
            }
        }
    }
    ensure!(
        feasible > 0 && crossed > 0 && violated > 0,
        "degenerate mix: {feasible}/{crossed}/{violated}"
    );
    Ok(format!(
        "{feasible} feasible, {violated} violated-set, {crossed} crossed-bound boxes"
    ))
}

fn weighted_optimum(inst: &Instance, w: &WeightVector, i: usize) -> Result<(Rational, usize), String> {
    let solver = WeightedSolver::new(&inst.graph, &inst.b, w, &BruteForceSfm).map_err(fail(format!("instance {i}")))?;
    let opt = solver.optimum().map_err(fail(format!("instance {i}")))?;
    let evals = solver.evaluations();
    if let Some(bad) = evals.iter().find(|r| !r.newton_claims_hold()) {
        return Err(format!(
            "instance {i}: Newton claims fail at kappa = {}: {:?}",
            bad.kappa, bad.newton
        ));
    }
    Ok((opt.sigma, evals.len()))
}

/// Unit weights reproduce the unweighted optimum; random weights match the
/// weighted exhaustive dual; every Newton run satisfies its claims.
fn weighted_reduction() -> Outcome {
    let mut calls = 0;
    let insts = mixed_instances(200, 8, 12);
    for (i, inst) in insts.iter().enumerate() {
        let (sigma, n) = weighted_optimum(inst, &unit_weights(inst), i)?;
        let expected = optimal_sigma(inst, AlgorithmChoice::Auto, i)?;
        ensure!(
            sigma == expected,
            "instance {i}: unit-weight {sigma}, unweighted {expected}"
        );
        calls += n;
    }
    let winsts = weighted_instances(80, 6, 10);
    for (i, inst) in winsts.iter().enumerate() {
        let w = inst.weights.clone().expect("weighted family");
        let (sigma, n) = weighted_optimum(inst, &w, i)?;
        let expected = brute_dual_xy(&inst.graph, &inst.b, Some(&w)).0;
        ensure!(
            sigma == expected,
            "weighted instance {i}: solver {sigma}, exhaustive dual {expected}"
        );
        calls += n;
    }
    Ok(format!(
        "{} unit-weight, {} weighted instances, {calls} s(kappa) evaluations",
        insts.len(),
        winsts.len()
    ))
}

/// Exact midpoint convexity of `s` on 50 instances, 5 pairs each.
fn convexity() -> Outcome {
    let mut insts = mixed_instances(25, 6, 10);
    insts.extend(weighted_instances(25, 6, 10));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lambdas = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let mut checks = 0;
    for (i, inst) in insts.iter().enumerate() {
        let w = inst.weight_vector();
        let solver =
            WeightedSolver::new(&inst.graph, &inst.b, &w, &BruteForceSfm).map_err(fail(format!("instance {i}")))?;
        let hi = match solver.kappa_max().map_err(fail(format!("instance {i}")))? {
            KappaMax::Finite { value, .. } => value,
            KappaMax::Unbounded => rat(3),
        };
        let s = |k: &Rational| -> Result<Rational, String> {
            let r = solver.s_kappa(k).map_err(fail(format!("instance {i}")))?;
            r.sigma
                .ok_or_else(|| format!("instance {i}: s undefined at {k} <= kappa_max"))
        };
        for _ in 0..5 {
            let a = &hi - ratio(rng.gen_range(0..=24), 4);
            let b = &hi - ratio(rng.gen_range(0..=24), 4);
            let (sa, sb) = (s(&a)?, s(&b)?);
            for lam in &lambdas {
                let mid = lam * &a + (rat(1) - lam) * &b;
                let smid = s(&mid)?;
                let chord = lam * &sa + (rat(1) - lam) * &sb;
                ensure!(
                    smid <= chord,
                    "instance {i}: s({mid}) = {smid} above chord {chord} between {a} and {b}"
                );
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} convexity checks on {} instances", insts.len()))
}

/// Integral widths against exhaustive integer search, the parallel-pair gap,
/// and the one-unit sandwich.
fn integral_claims() -> Outcome {
    let insts = mixed_instances(50, 6, 6);
    let opts = SolveOptions::default();
    let mut levels = 0;
    for (i, inst) in insts.iter().enumerate() {
        let (g, b) = (&inst.graph, &inst.b);
        let r = solve_integral(g, b, &opts).map_err(fail(format!("instance {i}")))?;
        let sigma = r
            .sigma_star()
            .cloned()
            .ok_or_else(|| format!("instance {i}: not optimal"))?;
        let int = r
            .integral
            .clone()
            .ok_or_else(|| format!("instance {i}: no integral result"))?;
        ensure!(
            sigma <= int.sigma_i && int.sigma_i <= &sigma + rat(1),
            "instance {i}: {sigma} vs integral {}",
            int.sigma_i
        );

        let k: i64 = int
            .kappa_i
            .to_integer()
            .try_into()
            .map_err(|_| format!("instance {i}: kappa_i too large"))?;
        let width: i64 = int
            .sigma_i
            .to_integer()
            .try_into()
            .map_err(|_| format!("instance {i}: sigma_i too large"))?;
        let (best, _) = brute_integral_spread(g, b, k - 3..=k + 3, width)
            .ok_or_else(|| format!("instance {i}: no integral flow of spread {width} near {k}"))?;
        ensure!(
            best == int.sigma_i,
            "instance {i}: exhaustive integral spread {best}, solver {}",
            int.sigma_i
        );

        let w = unit_weights(inst);
        let solver = WeightedSolver::new(g, b, &w, &BruteForceSfm).map_err(fail(format!("instance {i}")))?;
        let kmax = solver.kappa_max().map_err(fail(format!("instance {i}")))?;
        for kappa in k - 2..=k + 2 {
            let kr = rat(kappa);
            if kmax.admits(&kr) {
                let si = s_i(g, b, &kr, &opts).map_err(fail(format!("instance {i}")))?;
                let sk = solver
                    .s_kappa(&kr)
                    .map_err(fail(format!("instance {i}")))?
                    .sigma
                    .expect("admitted level");
                ensure!(
                    si == sk.ceil(),
                    "instance {i}: s_I({kappa}) = {si}, ceil s = {}",
                    sk.ceil()
                );
                let cap = si.to_integer().try_into().unwrap_or(i64::MAX) + 1;
                let brute = brute_integral_width(g, b, kappa, cap);
                ensure!(
                    brute == Some(si.clone()),
                    "instance {i}: s_I({kappa}) = {si}, exhaustive {brute:?}"
                );
            } else {
                let brute = brute_integral_width(g, b, kappa, 3);
                ensure!(
                    brute.is_none(),
                    "instance {i}: level {kappa} above kappa_max has flow of width {brute:?}"
                );
            }
            levels += 1;
        }
    }
    let n1 = fixture("n1.json");
    let r = solve_integral(&n1.graph, &n1.b, &opts).map_err(fail("n1".into()))?;
    let gap = (r.sigma_star().cloned(), r.integral.map(|x| x.sigma_i));
    ensure!(
        gap == (Some(rat(0)), Some(rat(1))),
        "parallel pair: (fractional, integral) = {gap:?}"
    );
    Ok(format!(
        "{} instances, {levels} integer levels, parallel-pair gap 0 -> 1",
        insts.len()
    ))
}

/// The three hand-checked fixtures.
fn fixtures() -> Outcome {
    let opts = SolveOptions::default();
    let (u, v) = (VertexSet::singleton(0), VertexSet::singleton(1));

    let e1 = fixture("e1.json");
    let r = e1.solve(AlgorithmChoice::Auto, &opts).map_err(fail("e1".into()))?;
    let c = r.certificate.clone().ok_or("e1: no certificate")?;
    ensure!(
        r.algorithm == Algorithm::Eulerian,
        "e1 dispatched to {}",
        r.algorithm.name()
    );
    ensure!(
        c.sigma_star == rat(2) && c.x == Some(v),
        "e1: sigma* = {}, X = {:?}",
        c.sigma_star,
        c.x
    );

    let n1 = fixture("n1.json");
    for a in [Algorithm::BasicXy, Algorithm::ImprovedXy] {
        let r = n1.solve(AlgorithmChoice::Fixed(a), &opts).map_err(fail("n1".into()))?;
        let c = r.certificate.ok_or("n1: no certificate")?;
        ensure!(
            c.sigma_star == rat(0) && c.kappa_star == Some(ratio(1, 2)) && c.x == Some(v) && c.y == Some(u),
            "n1 ({}): {c:?}",
            a.name()
        );
    }

    let w1 = fixture("w1.json");
    let w = w1.weights.clone().ok_or("w1: no weights")?;
    let r = solve_weighted(&w1.graph, &w1.b, &w, &opts).map_err(fail("w1".into()))?;
    let c = r.certificate.ok_or("w1: no certificate")?;
    ensure!(c.sigma_star == rat(0) && c.kappa_star == Some(ratio(2, 3)), "w1: {c:?}");
    let solver = WeightedSolver::new(&w1.graph, &w1.b, &w, &BruteForceSfm).map_err(fail("w1".into()))?;
    let kmax = solver.kappa_max().map_err(fail("w1".into()))?;
    ensure!(kmax.value() == Some(&ratio(2, 3)), "w1: kappa_max {kmax:?}");
    let s0 = solver.s_kappa(&rat(0)).map_err(fail("w1".into()))?.sigma;
    let s1 = solver.s_kappa(&rat(1)).map_err(fail("w1".into()))?.sigma;
    ensure!(
        s0 == Some(ratio(2, 3)) && s1.is_none(),
        "w1: s(0) = {s0:?}, s(1) = {s1:?}"
    );
    Ok("E1, N1, W1 exact".into())
}

fn check_flow(inst: &Instance, r: &balflow::SolveReport, label: &str) -> Result<(), String> {
    if r.status != Status::Optimal {
        return Ok(());
    }
    let x = r.flow.as_ref().ok_or_else(|| format!("{label}: no flow"))?;
    ensure!(
        x.len() == inst.graph.arc_count(),
        "{label}: flow has {} entries",
        x.len()
    );
    let (ok, set) = brute_feasible(&inst.graph, &inst.b, x, x);
    ensure!(ok, "{label}: flow violates {set:?}");
    let sigma = r.sigma_star().expect("optimal");
    let spread = match (&r.integral, &inst.weights) {
        (Some(int), _) => {
            ensure!(x.is_integral(), "{label}: integral flow has fractional entries");
            ensure!(
                spread_of(x) == int.sigma_i,
                "{label}: spread {} vs integral {}",
                spread_of(x),
                int.sigma_i
            );
            return Ok(());
        }
        (None, Some(w)) => weighted_spread_of(x, w.weights()),
        (None, None) => spread_of(x),
    };
    ensure!(&spread == sigma, "{label}: spread {spread} vs sigma* {sigma}");
    Ok(())
}

/// Every optimal solve with flow output yields a certified flow.
fn flow_recovery() -> Outcome {
    let opts = SolveOptions::default().with_flow();
    let mut count = 0;
    let mut run = |inst: &Instance, choice: AlgorithmChoice, label: String| -> Result<(), String> {
        let r = inst.solve(choice, &opts).map_err(fail(label.clone()))?;
        check_flow(inst, &r, &label)?;
        count += 1;
        Ok(())
    };
    for (i, inst) in mixed_instances(200, 8, 12).iter().enumerate() {
        run(inst, AlgorithmChoice::Auto, format!("instance {i} auto"))?;
        if !inst.graph.is_eulerian() {
            run(
                inst,
                AlgorithmChoice::Fixed(Algorithm::BasicXy),
                format!("instance {i} basic"),
            )?;
        }
    }
    for (i, inst) in weighted_instances(80, 6, 10).iter().enumerate() {
        run(inst, AlgorithmChoice::Auto, format!("weighted instance {i}"))?;
    }
    for (i, inst) in mixed_instances(50, 6, 6).iter().enumerate() {
        run(
            inst,
            AlgorithmChoice::Fixed(Algorithm::Integral),
            format!("instance {i} integral"),
        )?;
    }
    for name in ["e1.json", "n1.json", "w1.json"] {
        run(&fixture(name), AlgorithmChoice::Auto, name.to_string())?;
    }
    Ok(format!("{count} flows verified"))
}

/// Reports are byte-identical across runs, through the library and the CLI.
fn determinism() -> Outcome {
    let opts = SolveOptions::default().with_flow();
    let mut insts = mixed_instances(20, 8, 12);
    insts.extend(weighted_instances(10, 6, 10));
    let mut reports = 0;
    for (i, inst) in insts.iter().enumerate() {
        let mut choices = vec![AlgorithmChoice::Auto, AlgorithmChoice::Fixed(Algorithm::Weighted)];
        if inst.weights.is_none() {
            choices.push(AlgorithmChoice::Fixed(Algorithm::Integral));
        }
        for choice in choices {
            let render = || -> Result<String, String> {
                let r = inst.solve(choice, &opts).map_err(fail(format!("instance {i}")))?;
                Ok(ReportFile::new(inst, r, None).to_json())
            };
            ensure!(render()? == render()?, "instance {i}: {choice:?} reports differ");
            reports += 1;
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("instance.json");
    std::fs::write(&input, insts[3].to_json()).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("report{run}.json"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_balflow"))
            .args(["solve", "--emit-flow", "--out"])
            .args([&out, &input])
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(status.code() == Some(0), "cli run {run} exited with {status}");
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure!(outputs[0] == outputs[1], "cli reports differ");
    Ok(format!("{reports} report pairs and one CLI pair identical"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("dual-primal equality, unweighted", dual_primal_equality),
        (
            "cross-algorithm agreement and iteration bounds",
            cross_algorithm_agreement,
        ),
        ("feasibility oracle equivalence", feasibility_equivalence),
        ("weighted reduction and duality", weighted_reduction),
        ("convexity of s(kappa)", convexity),
        ("integral claims", integral_claims),
        ("fixture regression", fixtures),
        ("flow recovery", flow_recovery),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                println!("FAIL criterion {}: {name}: {why} ({secs:.1}s)", i + 1);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
