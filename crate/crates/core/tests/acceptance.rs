//! Acceptance criteria, one PASS/FAIL line each. All comparisons are exact
//! over the rationals; degree bounds are the crate defaults unless stated.

use std::sync::Arc;
use std::thread;

use nilcoxeter::demazure::{self, InvariantSpaces};
use nilcoxeter::verify::{self, run, CheckReport, Outcome};
use nilcoxeter::{CoxeterSystem, Realization};

const SEED: u64 = 0;

fn all_of(parts: Vec<(&str, Outcome)>) -> Outcome {
    let mut details = Vec::new();
    for (name, o) in parts {
        details.push(format!("{name}: {}", o.map_err(|e| format!("{name}: {e}"))?));
    }
    Ok(details.join("; "))
}

fn perm4() -> Arc<Realization> {
    Arc::new(Realization::permutation(4).unwrap())
}

fn sys(name: &str) -> CoxeterSystem {
    CoxeterSystem::named(name).unwrap()
}

fn c1() -> Outcome {
    verify::worked_example()
}

fn c2() -> Outcome {
    let b3 = Realization::geometric_named("B3").unwrap();
    all_of(vec![("S4", verify::demazure_oracle(&perm4(), 50, 10, SEED)), ("B3", verify::demazure_oracle(&b3, 50, 10, SEED))])
}

fn c3() -> Outcome {
    let real = perm4();
    let bound = demazure::default_degree_bound(&real).unwrap();
    verify::nilcoxeter_rank(&InvariantSpaces::new(real), bound)
}

fn c4() -> Outcome {
    let s3 = Arc::new(Realization::permutation(3).unwrap());
    let s3_bound = demazure::default_degree_bound(&s3).unwrap();
    let s4 = perm4();
    let s4_bound = demazure::default_degree_bound(&s4).unwrap();
    all_of(vec![
        ("S3 width ≤ 6", verify::expression_operators(&InvariantSpaces::new(s3), Some(6), 0, 0, SEED, s3_bound)),
        ("S4 sample", verify::expression_operators(&InvariantSpaces::new(s4), None, 500, 8, SEED, s4_bound)),
    ])
}

fn c5() -> Outcome {
    let mut parts: Vec<(&str, Outcome)> = ["A2", "A3", "B2", "B3", "G2"].into_iter().map(|n| (n, verify::matsumoto(&sys(n)))).collect();
    parts.push(("switchback A3", verify::type_a_switchbacks(&sys("A3"))));
    parts.push(("switchback A4", verify::type_a_switchbacks(&sys("A4"))));
    all_of(parts)
}

fn c6() -> Outcome {
    verify::frobenius_chain(&perm4(), SEED)
}

fn c7() -> Outcome {
    verify::dual_bases_in_image(&perm4())
}

fn c8() -> Outcome {
    all_of(vec![("S4", verify::star(&perm4())), ("dihedral", verify::star_dihedral())])
}

fn c9() -> Outcome {
    verify::coset_structure(&sys("A3"))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 worked example in S4", c1),
        ("2 Demazure oracle equivalence", c2),
        ("3 nilCoxeter basis rank", c3),
        ("4 reduced expressions give ∂_p, others 0", c4),
        ("5 Matsumoto connectivity and type-A switchbacks", c5),
        ("6 Frobenius chains", c6),
        ("7 dual bases in the image of ∂_p̲", c7),
        ("8 (★) and its affine failure", c8),
        ("9 coset structure", c9),
    ];
    let handles: Vec<_> = criteria.into_iter().map(|(name, f)| thread::spawn(move || run(name, f))).collect();
    let reports: Vec<CheckReport> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    let mut failed = 0;
    for r in &reports {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{}] ({:.1}s) {}", r.name, r.seconds, r.detail);
        failed += usize::from(!r.passed);
    }
    println!("{} passed, {failed} failed", reports.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
