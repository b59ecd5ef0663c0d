//! Acceptance gate: one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use submodular_certify::curvature::{
    bound_general_matroid, bound_uniform_matroid, matroid_curvature, total_curvature,
};
use submodular_certify::extension::{
    extend, verify_extension, verify_iff_condition, ExtensionPolicy, ExtensionStatus,
};
use submodular_certify::instance::Instance;
use submodular_certify::random::{random_instance, suite};
use submodular_certify::reproduce::{builtin_instance, Target};
use submodular_certify::solver::{greedy, ScanMode};
use submodular_certify::subset::all_subsets;
use submodular_certify::{MatroidOracle, SetFunction, SubsetKey};

const TOL: f64 = 1e-9;
const FIXED: [ExtensionPolicy; 3] = [
    ExtensionPolicy::Zero,
    ExtensionPolicy::Max,
    ExtensionPolicy::TargetB,
];

struct Outcome {
    failures: Vec<String>,
    summary: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            summary: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, tol: f64, name: &str, got: f64, want: f64) {
        self.check((got - want).abs() <= tol, || {
            format!("{name}: got {got}, want {want} ± {tol}")
        });
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.check(elapsed < limit, || {
            format!("runtime {elapsed:?} exceeds {limit:?}")
        });
    }
}

fn set(elems: &[usize]) -> SubsetKey {
    SubsetKey::from_elements(elems.iter().copied())
}

fn builtin(t: Target) -> Instance {
    builtin_instance(t).build().unwrap()
}

/// Best value over every independent set, found by filtering the whole power
/// set through the oracle.
fn brute_force_optimum(f: &SetFunction, m: &MatroidOracle) -> f64 {
    all_subsets(m.ground_size())
        .filter(|&s| m.is_independent(s).unwrap())
        .map(|s| f.evaluate(s).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let inst = builtin(Target::TaskScheduling);
    let (f, m) = (&inst.objective, &inst.matroid);
    let b = matroid_curvature(f, m, ScanMode::Independent, TOL)
        .unwrap()
        .value;
    let c = total_curvature(f, TOL).unwrap().value;
    o.close(1e-3, "b(f)", b, 0.9);
    o.close(1e-3, "c(f)", c, 0.992);
    let r = extend(f, m, ExtensionPolicy::TargetB, TOL).unwrap();
    o.check(r.is_feasible(), || {
        format!("target-b status {:?}", r.status)
    });
    if let Some(g) = r.g() {
        for (name, s, v) in [
            ("g({a1,a2,a3})", set(&[0, 1, 2]), 0.96),
            ("g({a1,a2,a4})", set(&[0, 1, 3]), 1.0),
            ("g({a1,a3,a4})", set(&[0, 2, 3]), 1.02),
            ("g({a2,a3,a4})", set(&[1, 2, 3]), 1.04),
            ("g(X)", set(&[0, 1, 2, 3]), 1.08),
        ] {
            o.close(1e-3, name, g.evaluate(s).unwrap(), v);
        }
    }
    o.close(1e-3, "c(g)", r.achieved_c().unwrap_or(f64::NAN), 0.9);
    o.close(
        1e-3,
        "bound at b(f)",
        bound_uniform_matroid(b, 2).unwrap().value,
        0.775,
    );
    o.close(
        1e-3,
        "bound at c(f)",
        bound_uniform_matroid(c, 2).unwrap().value,
        0.752,
    );
    o.within(start.elapsed(), Duration::from_secs(1));
    o.summary = format!(
        "b={b:.4} c={c:.4} c(g)={:.4}",
        r.achieved_c().unwrap_or(f64::NAN)
    );
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let inst = builtin(Target::AdaptiveSensing);
    let (f, m) = (&inst.objective, &inst.matroid);
    let b = matroid_curvature(f, m, ScanMode::Independent, TOL)
        .unwrap()
        .value;
    let c = total_curvature(f, TOL).unwrap().value;
    o.close(5e-4, "b(f)", b, 0.3001);
    o.close(5e-4, "c(f)", c, 0.4509);

    let target = extend(f, m, ExtensionPolicy::TargetB, TOL).unwrap();
    match target.status {
        ExtensionStatus::TargetInfeasible { lower, .. } => {
            o.close(1e-3, "lower limit on d at X", lower, 0.5 * 1.7232f64.ln())
        }
        ref other => o.failures.push(format!("target-b status {other:?}")),
    }

    let max = extend(f, m, ExtensionPolicy::Max, TOL).unwrap();
    let cg = max.achieved_c().unwrap_or(f64::NAN);
    o.check(max.is_feasible(), || "max policy infeasible".into());
    o.check((0.300..=0.340).contains(&cg), || {
        format!("max-policy c(g) = {cg}")
    });
    o.check((0.300..=0.340).contains(&0.3317), || {
        "published c(g) outside bracket".into()
    });

    let report = submodular_certify::report::run_extend(&inst, ExtensionPolicy::Max).unwrap();
    let annotated = report
        .annotations
        .iter()
        .any(|a| a.published == "1/2 ln 1.6799")
        && report.annotations.iter().any(|a| a.published == "0.3317");
    o.check(annotated, || {
        "max-policy report lacks the discrepancy annotation".into()
    });

    o.close(
        5e-4,
        "bound at c(f)",
        bound_uniform_matroid(c, 2).unwrap().value,
        0.8873,
    );
    o.within(start.elapsed(), Duration::from_secs(1));
    o.summary = format!("b={b:.4} c={c:.4} max c(g)={cg:.4}");
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let inst = builtin(Target::Counterexample);
    let mut policies = FIXED.to_vec();
    policies.push(ExtensionPolicy::Search {
        resolution: 16,
        width: 8,
    });
    for p in policies {
        let r = extend(&inst.objective, &inst.matroid, p, TOL).unwrap();
        match r.status {
            ExtensionStatus::Infeasible { witness } => {
                o.check(witness.slack == -1.0, || {
                    format!("{p}: witness slack {}", witness.slack)
                });
                o.check(
                    (witness.set, witness.subset, witness.element)
                        == (set(&[0, 1, 2]), set(&[0, 1]), 1),
                    || format!("{p}: witness {witness:?}"),
                );
            }
            other => o.failures.push(format!("{p}: status {other:?}")),
        }
    }
    o.summary = "4 policies infeasible, slack -1".into();
    o
}

/// Everything computed once over the random suite and shared by
/// criteria 4, 5, 6 and 8.
struct SuiteRun {
    c4: Outcome,
    c5: Outcome,
    c6: Outcome,
    c8: Outcome,
}

fn run_suite() -> SuiteRun {
    let (mut c4, mut c5, mut c6, mut c8) = (
        Outcome::new(),
        Outcome::new(),
        Outcome::new(),
        Outcome::new(),
    );
    let start = Instant::now();
    let (mut uniform, mut feasible, mut iff_true, mut iff_false) = (0, 0, 0, 0);
    let mut per_policy = [0usize; 3];
    let specs: Vec<_> = suite(500, 7).collect();
    for spec in &specs {
        let inst = random_instance(spec).unwrap().build().unwrap();
        let (f, m) = (&inst.objective, &inst.matroid);
        let id = &inst.id;

        // Criterion 4.
        let g = greedy(f, m, TOL).unwrap();
        let opt = brute_force_optimum(f, m);
        let ratio = if opt > 0.0 { g.final_value / opt } else { 1.0 };
        let c = total_curvature(f, TOL).unwrap().value;
        let general = bound_general_matroid(c).unwrap();
        c4.check(ratio >= general - TOL, || {
            format!("{id}: ratio {ratio} < 1/(1+c) = {general}")
        });
        if let Some(k) = m.uniform_rank() {
            uniform += 1;
            let u = bound_uniform_matroid(c, k).unwrap().value;
            c4.check(ratio >= u - TOL, || {
                format!("{id}: ratio {ratio} < uniform bound {u} (K={k})")
            });
        }

        // Criterion 8.
        let b = matroid_curvature(f, m, ScanMode::Independent, TOL)
            .unwrap()
            .value;
        let b_bases = matroid_curvature(f, m, ScanMode::Bases, TOL).unwrap().value;
        c8.check((b - b_bases).abs() <= 1e-12, || {
            format!("{id}: b over independent sets {b} vs bases {b_bases}")
        });

        // Criteria 5 and 6.
        for (i, p) in FIXED.iter().enumerate() {
            let r = extend(f, m, *p, TOL).unwrap();
            if !r.is_feasible() {
                continue;
            }
            feasible += 1;
            per_policy[i] += 1;
            let v = verify_extension(&r, f, m, TOL).unwrap();
            c5.check(v.agrees(), || {
                format!("{id} {p}: g differs from f at {:?}", v.disagreement)
            });
            c5.check(v.polymatroid.passed(), || {
                format!("{id} {p}: g not polymatroid")
            });
            c5.check(v.solutions_match(), || {
                format!("{id} {p}: greedy/optimum differ")
            });
            c5.check(v.achieved_c >= b - TOL, || {
                format!("{id} {p}: c(g) {} < b(f) {b}", v.achieved_c)
            });

            let gfun = r.g().unwrap();
            let cg = r.achieved_c().unwrap();
            let verdict = verify_iff_condition(&gfun, b, TOL).unwrap().holds;
            let expected = (cg - b).abs() <= TOL;
            if expected {
                iff_true += 1;
            } else {
                iff_false += 1;
            }
            c6.check(verdict == expected, || {
                format!(
                    "{id} {p}: iff verdict {verdict}, |c(g) - b| = {}",
                    (cg - b).abs()
                )
            });
        }
    }
    let elapsed = start.elapsed();
    c4.within(elapsed, Duration::from_secs(60));
    c4.summary = format!(
        "{} instances ({uniform} uniform), {:.2?}",
        specs.len(),
        elapsed
    );
    c5.summary = format!(
        "{feasible} feasible extensions (zero {}, max {}, target-b {})",
        per_policy[0], per_policy[1], per_policy[2]
    );
    c6.check(iff_true > 0 && iff_false > 0, || {
        format!("only one direction exercised: {iff_true} equal, {iff_false} unequal")
    });
    c6.summary = format!("{iff_true} with c(g) = b, {iff_false} with c(g) != b");
    c8.summary = format!("{} instances", specs.len());
    SuiteRun { c4, c5, c6, c8 }
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let mut points = 0;
    for k in 2..=10 {
        let mut prev: Option<(f64, f64, f64)> = None;
        for i in 1..=100 {
            let c = i as f64 / 100.0;
            let u = bound_uniform_matroid(c, k).unwrap();
            let g = bound_general_matroid(c).unwrap();
            // Independent evaluation of the same formulas.
            let u_ref = (1.0 - (1.0 - c / k as f64).powi(k as i32)) / c;
            let lim_ref = (1.0 - (-c).exp()) / c;
            o.close(1e-12, "uniform formula", u.value, u_ref);
            o.close(1e-12, "limit formula", u.limit, lim_ref);
            o.close(1e-12, "general formula", g, 1.0 / (1.0 + c));
            o.check(u.value > u.limit && u.limit > g && g >= 0.5, || {
                format!(
                    "ordering fails at c={c}, K={k}: {} {} {g}",
                    u.value, u.limit
                )
            });
            if let Some((pu, pl, pg)) = prev {
                o.check(u.value <= pu && u.limit <= pl && g <= pg, || {
                    format!("not nonincreasing at c={c}, K={k}")
                });
            }
            prev = Some((u.value, u.limit, g));
            points += 1;
        }
    }
    o.summary = format!("{points} grid points");
    o
}

#[test]
fn acceptance_criteria() {
    let suite = run_suite();
    let results = [
        ("1 task-scheduling reproduction", criterion_1()),
        ("2 adaptive-sensing reproduction", criterion_2()),
        (
            "3 counterexample infeasible under every policy",
            criterion_3(),
        ),
        ("4 bound validity on random instances", suite.c4),
        ("5 extension soundness", suite.c5),
        ("6 curvature-equality condition cross-check", suite.c6),
        ("7 analytic bound grid", criterion_7()),
        ("8 bases-only b equals independent-set b", suite.c8),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        if o.failures.is_empty() {
            println!("PASS criterion {name}: {}", o.summary);
        } else {
            failed += 1;
            println!(
                "FAIL criterion {name}: {} violation(s); first: {}",
                o.failures.len(),
                o.failures[0]
            );
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
