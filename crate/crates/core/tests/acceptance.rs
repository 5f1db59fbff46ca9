//! Acceptance battery: one line per criterion, nonzero exit on any failure.

use std::ops::{AddAssign, SubAssign};
use std::process::Command;
use std::time::{Duration, Instant};

use pdsplit::linalg::{self, Matrix, Vector};
use pdsplit::verify;

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(name: &str, seed: u64, budget: Option<Duration>) -> Outcome {
    let started = Instant::now();
    let report = verify::run_check(name, seed).expect("known check");
    let elapsed = started.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    Outcome {
        passed: report.passed && in_time,
        detail: format!("{} in {elapsed:.2?}{}", report.detail, if in_time { "" } else { " (over time budget)" }),
    }
}

/// Independent spot checks of the skew example, outside the battery.
fn skew_spot_checks() -> Outcome {
    let t = pdsplit::instances::skew().expect("skew instance").triple;
    let a = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let x = Vector::from_row_slice(&[1.0, 2.0]);
    let on = t.saddle_residual(&x, &(-&a * &x)).unwrap();
    let off = t
        .saddle_residual(&Vector::from_row_slice(&[1.0, 0.0]), &Vector::from_row_slice(&[1.0, 0.0]))
        .unwrap();
    Outcome {
        passed: on <= 1e-12 && off >= 0.1,
        detail: format!("residual on graph {on:e}, off graph {off:e}"),
    }
}

/// The M-preconditioned CP step equals the resolvent of A + M applied to M,
/// recomputed here from the explicit block matrix.
fn resolvent_identity_from_matrix() -> Outcome {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let l = linalg::gaussian_matrix(&mut rng, 2, 3);
    let s = 0.9_f64.sqrt() / linalg::operator_norm(&l, 1e-12).unwrap();
    let t = pdsplit::problem::Triple::new(
        pdsplit::operators::Operator::zero(3),
        l,
        pdsplit::operators::Operator::identity(2),
        s,
        s,
    )
    .unwrap();
    let m = pdsplit::splitting::preconditioner_matrix(&t);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let u = linalg::gaussian(&mut rng, 5, 1.0);
        let (x, y) = linalg::split(&u, 3);
        let (px, py) = pdsplit::splitting::cp_step(&t, &x, &y).unwrap();
        // A = 0, B = Id: the block operator is [[0, L*], [−L, Id]]
        let mut am = m.clone();
        am.view_mut((0, 3), (3, 2)).add_assign(t.lt());
        am.view_mut((3, 0), (2, 3)).sub_assign(&t.l);
        for i in 3..5 {
            am[(i, i)] += 1.0;
        }
        let want = am.lu().solve(&(&m * &u)).unwrap();
        worst = worst.max((linalg::concat(&[&px, &py]) - want).norm());
    }
    Outcome {
        passed: worst <= 1e-10,
        detail: format!("max gap {worst:e} on 200 points"),
    }
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    Outcome {
        passed: a.passed && b.passed,
        detail: format!("{}; {}", a.detail, b.detail),
    }
}

fn verify_binary() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let started = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_pdsplit"))
        .args(["verify", "--out"])
        .arg(dir.path())
        .output()
        .expect("run pdsplit verify");
    let elapsed = started.elapsed();
    let report_ok = std::fs::read_to_string(dir.path().join("verify.json"))
        .ok()
        .and_then(|s| serde_json::from_str::<serde_json::Value>(&s).ok())
        .is_some_and(|v| v["passed"] == serde_json::Value::Bool(true));
    Outcome {
        passed: status.status.success() && report_ok && elapsed < Duration::from_secs(120),
        detail: format!("exit {:?}, report passed = {report_ok}, {elapsed:.2?}", status.status.code()),
    }
}

fn main() {
    let seed = 42;
    let criteria: Vec<Criterion> = vec![
        (
            "skew counterexample grid scan",
            Box::new(move || both(check("grid-scan", seed, Some(Duration::from_secs(10))), skew_spot_checks())),
        ),
        ("rectangle property on paramonotone instances", Box::new(move || check("rectangle", seed, None))),
        ("skew pairing of solution pairs", Box::new(move || check("skew-check", seed, None))),
        (
            "factor and resolvent identities",
            Box::new(move || both(check("factors", seed, None), resolvent_identity_from_matrix())),
        ),
        ("fixed-point sets of reduced operators", Box::new(move || check("fixed-points", seed, None))),
        ("projection theorems against oracles", Box::new(move || check("projections", seed, None))),
        (
            "total duality on desk LASSO",
            Box::new(move || check("duality", seed, Some(Duration::from_secs(30)))),
        ),
        ("LASSO solution-set recovery", Box::new(move || check("lasso-recovery", seed, None))),
        ("feasibility formulas and common zeros", Box::new(move || check("feasibility", seed, None))),
        ("zero gap without attainment", Box::new(move || check("exp", seed, None))),
        ("product-space splitting", Box::new(move || check("product", seed, None))),
        ("verify command on bundled battery", Box::new(verify_binary)),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        if !out.passed {
            failures += 1;
        }
        println!("criterion {:>2} {:<48} {}", i + 1, name, if out.passed { "PASS" } else { "FAIL" });
        if !out.passed || std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
            println!("    {}", out.detail);
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
