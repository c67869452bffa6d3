//! Named verification suites. Each check returns a one-line detail on success
//! and a message naming the failing invariant otherwise.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cosets::{self, DoubleCoset};
use crate::coxeter::{CoxeterSystem, GroupElement, Side};
use crate::demazure::{self, partial_word, DemazureOp, InvariantSpaces};
use crate::expressions::{self, Expression};
use crate::frobenius::{self, Modify};
use crate::genset::GenSet;
use crate::polyring::{Poly, Realization};
use crate::rewrite::{self, Rewriter};

pub type Outcome = Result<String, String>;

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Runs a check, turning panics into failures.
pub fn run(name: &str, f: impl FnOnce() -> Outcome) -> CheckReport {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckReport { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `A<n>` uses the permutation realization of `S_{n+1}`; other types use the
/// geometric one.
pub fn realization_for(group: &str) -> Result<Realization, String> {
    if let Some(n) = group.strip_prefix('A').and_then(|n| n.parse::<usize>().ok()) {
        return Realization::permutation(n + 1).map_err(err);
    }
    Realization::geometric_named(group).map_err(err)
}

fn finitary_subsets(sys: &CoxeterSystem) -> Vec<GenSet> {
    sys.all().subsets().filter(|&s| sys.is_finitary(s).unwrap_or(false)).collect()
}

fn elements(sys: &CoxeterSystem, set: GenSet) -> Result<Vec<GroupElement>, String> {
    Ok(sys.parabolic(set).map_err(err)?.elements.clone())
}

/// The identities of the `S_4` example with `I = {s1, s3}` and `p̲ = s2`.
pub fn worked_example() -> Outcome {
    let real = Realization::permutation(4).map_err(err)?;
    let sys = real.system();
    let ps = frobenius::p_of(&real, sys.all()).map_err(err)?;
    let pw = |w: &[usize], f: &Poly| partial_word(&real, &w.iter().map(|i| i - 1).collect::<Vec<_>>(), f).map_err(err);
    let pi = pw(&[2, 1, 3, 2], &ps)?;
    let cases: [(&[usize], &[usize]); 4] = [(&[2], &[]), (&[2, 1], &[3]), (&[2, 3], &[1]), (&[2, 3, 1], &[1, 3])];
    for (tail, front) in cases {
        let lhs = pw(&[2, 1, 3], &pw(tail, &ps)?)?;
        let rhs = pw(front, &pi)?;
        ensure(lhs == rhs, || format!("∂2∂13∂{tail:?}(P_S) = {lhs:?} but ∂{front:?}(P_I) = {rhs:?}"))?;
    }
    ensure(pw(&[1, 3], &pi)? == real.one(), || "∂13(P_I) ≠ 1".into())?;
    Ok("4 identities exact".into())
}

/// Composed `∂_I` against the alternating-sum formula on seeded random inputs.
pub fn demazure_oracle(real: &Realization, samples: usize, max_degree: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = finitary_subsets(real.system());
    let polys: Vec<Poly> = (0..samples).map(|_| Poly::random(&mut rng, real.dim(), max_degree, 6)).collect();
    for &set in &sets {
        let op = DemazureOp::parabolic(real, set).map_err(err)?;
        for f in &polys {
            let a = op.apply_unchecked(real, f).map_err(err)?;
            let b = demazure::partial_i_altsum(real, set, f).map_err(err)?;
            ensure(a == b, || format!("∂_{set:?} disagrees with the alternating sum on {f:?}"))?;
        }
    }
    Ok(format!("{} subsets × {} inputs (degree ≤ {max_degree}, seed {seed})", sets.len(), samples))
}

/// Number of `(I, J)`-cosets by partitioning the group with orbit sets.
fn brute_force_coset_count(sys: &CoxeterSystem, i: GenSet, j: GenSet) -> Result<usize, String> {
    let all = elements(sys, sys.all())?;
    let (wi, wj) = (elements(sys, i)?, elements(sys, j)?);
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut count = 0;
    for w in &all {
        if seen.contains(w) {
            continue;
        }
        count += 1;
        for u in &wi {
            for v in &wj {
                seen.insert(sys.product([u, w, v]).map_err(err)?);
            }
        }
    }
    Ok(count)
}

/// Rank of `{∂_p}` equals the number of cosets for every pair `(I, J)`.
pub fn nilcoxeter_rank(spaces: &InvariantSpaces, bound: usize) -> Outcome {
    let real = spaces.realization();
    let sys = real.system();
    let mut pairs = 0;
    for i in sys.all().subsets() {
        for j in sys.all().subsets() {
            let n = cosets::enumerate_cosets(sys, i, j).map_err(err)?.len();
            let brute = brute_force_coset_count(sys, i, j)?;
            ensure(n == brute, || format!("({i:?},{j:?}): {n} cosets enumerated, {brute} by partition"))?;
            let report = demazure::rank_check(spaces, i, j, bound).map_err(err)?;
            ensure(report.rank == n, || format!("({i:?},{j:?}): rank {} but {n} cosets", report.rank))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, degree bound {bound}"))
}

/// All singlestep expressions of width at most `max_width`.
pub fn all_expressions(sys: &CoxeterSystem, max_width: usize) -> Result<Vec<Expression>, String> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<GenSet>> = finitary_subsets(sys).into_iter().map(|s| vec![s]).collect();
    for w in 0..=max_width {
        let mut next = Vec::new();
        for sets in frontier {
            out.push(Expression::new(sys, sets.clone()).map_err(err)?);
            if w == max_width {
                continue;
            }
            let last = *sets.last().unwrap();
            for s in 0..sys.rank() {
                let n = if last.contains(s) { last.without(s) } else { last.with(s) };
                if sys.is_finitary(n).map_err(err)? {
                    let mut v = sets.clone();
                    v.push(n);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// A seeded random singlestep expression of width at most `max_width`.
pub fn random_expression(sys: &CoxeterSystem, rng: &mut impl Rng, max_width: usize) -> Result<Expression, String> {
    let subsets = finitary_subsets(sys);
    let mut sets = vec![subsets[rng.gen_range(0..subsets.len())]];
    let width = rng.gen_range(0..=max_width);
    while sets.len() <= width {
        let last = *sets.last().unwrap();
        let s = rng.gen_range(0..sys.rank());
        let n = if last.contains(s) { last.without(s) } else { last.with(s) };
        if sys.is_finitary(n).map_err(err)? {
            sets.push(n);
        }
    }
    Expression::new(sys, sets).map_err(err)
}

fn check_expression_operator(spaces: &InvariantSpaces, e: &Expression, bound: usize) -> Result<bool, String> {
    let real = spaces.realization();
    let sys = real.system();
    let op = DemazureOp::expression(real, e).map_err(err)?;
    if e.is_reduced(sys).map_err(err)? {
        let p = e.expressed_coset(sys).map_err(err)?;
        let target = DemazureOp::coset(real, &p).map_err(err)?;
        let a = demazure::ops_agree(spaces, &op, &target, e.last(), bound).map_err(err)?;
        ensure(a.agree, || format!("reduced {e} differs from ∂_p for {p:?}"))?;
        Ok(true)
    } else {
        ensure(demazure::op_is_zero(spaces, &op, e.last(), bound).map_err(err)?, || format!("non-reduced {e} is nonzero"))?;
        Ok(false)
    }
}

/// Expression operators: `∂_p` when reduced, zero otherwise.
pub fn expression_operators(spaces: &InvariantSpaces, exhaustive_width: Option<usize>, samples: usize, sample_width: usize, seed: u64, bound: usize) -> Outcome {
    let sys = spaces.realization().system();
    let mut exprs = match exhaustive_width {
        Some(w) => all_expressions(sys, w)?,
        None => Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        exprs.push(random_expression(sys, &mut rng, sample_width)?);
    }
    let mut reduced = 0;
    for e in &exprs {
        if check_expression_operator(spaces, e, bound)? {
            reduced += 1;
        }
    }
    Ok(format!("{} expressions ({reduced} reduced), degree bound {bound}", exprs.len()))
}

pub fn all_cosets(sys: &CoxeterSystem) -> Result<Vec<DoubleCoset>, String> {
    let mut out = Vec::new();
    for i in finitary_subsets(sys) {
        for j in finitary_subsets(sys) {
            out.extend(cosets::enumerate_cosets(sys, i, j).map_err(err)?);
        }
    }
    Ok(out)
}

/// Matsumoto graphs of all cosets are connected.
pub fn matsumoto(sys: &CoxeterSystem) -> Outcome {
    let rw = Rewriter::new(sys);
    let ps = all_cosets(sys)?;
    let mut vertices = 0;
    for p in &ps {
        let g = rewrite::matsumoto_graph(&rw, p, rewrite::DEFAULT_BUDGET).map_err(err)?;
        ensure(!g.vertices.is_empty(), || format!("{p:?} has no reduced expression"))?;
        ensure(g.is_connected(), || format!("{p:?}: {} components", g.component_count()))?;
        vertices += g.vertices.len();
    }
    Ok(format!("{} cosets, {vertices} reduced expressions", ps.len()))
}

/// Type `A_{n-1}` switchbacks match `[L − s_c + s_a − s_b + s_c]`.
pub fn type_a_switchbacks(sys: &CoxeterSystem) -> Outcome {
    let rw = Rewriter::new(sys);
    let n = sys.rank() + 1;
    let all = sys.all();
    let mut count = 0;
    for a in 1..n {
        let l = all.without(a - 1);
        for b in 1..n {
            let res = rw.switchback_rhs(l, a - 1, b - 1);
            if a + b == n {
                ensure(res.is_err(), || format!("a={a}, b={b}: switchback should not exist"))?;
                continue;
            }
            let c = if a + b < n { a + b } else { a + b - n };
            let text = format!("[{:?} - {} + {} - {} + {}]", l, c - 1, a - 1, b - 1, c - 1);
            let expected = Expression::parse(sys, &text).map_err(err)?;
            let got = res.map_err(err)?;
            ensure(got == expected, || format!("a={a}, b={b}: got {got}, expected {expected}"))?;
            let searched = rw.switchback_by_search(l, a - 1, b - 1).map_err(err)?;
            ensure(searched == expected, || format!("a={a}, b={b}: search found {searched}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} instances"))
}

/// Almost dual pairing is lower-unitriangular and Gram–Schmidt gives exact duals.
pub fn frobenius_chain(real: &Realization, seed: u64) -> Outcome {
    let sys = real.system();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chains = 0;
    for j in finitary_subsets(sys) {
        for i in j.subsets() {
            let pair = frobenius::almost_dual_bases(real, i, j).map_err(|e| format!("({i:?} ⊆ {j:?}): {e}"))?;
            let want = sys.parabolic(j).map_err(err)?.order() / sys.parabolic(i).map_err(err)?.order();
            ensure(pair.len() == want, || format!("({i:?} ⊆ {j:?}): basis has {} elements, expected {want}", pair.len()))?;
            let dual = frobenius::gram_schmidt_dualize(real, &pair, Modify::D).map_err(|e| format!("({i:?} ⊆ {j:?}): {e}"))?;
            let f = DemazureOp::parabolic(real, i).map_err(err)?.apply_unchecked(real, &Poly::random(&mut rng, real.dim(), 8, 4)).map_err(err)?;
            dual.express_in_basis(real, &f).map_err(|e| format!("({i:?} ⊆ {j:?}): {e}"))?;
            chains += 1;
        }
    }
    Ok(format!("{chains} chains"))
}

/// Dual bases in the image of `∂_{p̲}` for every coset, with `L = S`.
pub fn dual_bases_in_image(real: &Realization) -> Outcome {
    let sys = real.system();
    let ps = all_cosets(sys)?;
    let mut elements = 0;
    for p in &ps {
        let pair = frobenius::dual_bases_in_image(real, p, sys.all()).map_err(|e| format!("{p:?}: {e}"))?;
        let pmin = p.pmin();
        for (g, d) in pair.witnesses.as_ref().unwrap().iter().zip(&pair.d) {
            ensure(real.is_invariant(g, p.right()), || format!("{p:?}: witness not J-invariant"))?;
            ensure(partial_word(real, pmin.word(), g).map_err(err)? == *d, || format!("{p:?}: d ≠ ∂_p̲(g)"))?;
        }
        elements += pair.len();
    }
    Ok(format!("{} cosets, {elements} basis elements", ps.len()))
}

/// `(★)` for every pair `I, J` of the realization's group.
pub fn star(real: &Realization) -> Outcome {
    let sys = real.system();
    let sets = finitary_subsets(sys);
    let mut pairs = 0;
    for &i in &sets {
        for &j in &sets {
            if !sys.is_finitary(i.union(j)).map_err(err)? {
                continue;
            }
            frobenius::check_star(real, i, j).map_err(|e| format!("({i:?},{j:?}): {e}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// `(★)` for finite dihedral groups and the fundamental-weight criterion,
/// including its failure for affine `Ã_1`.
pub fn star_dihedral() -> Outcome {
    for m in [2, 3, 4, 6] {
        let real = Realization::geometric_named(&format!("I2({m})")).map_err(err)?;
        star(&real).map_err(|e| format!("m={m}: {e}"))?;
        for (s, t) in [(0, 1), (1, 0)] {
            let w = frobenius::fundamental_weight(&real, s, t).map_err(err)?;
            ensure(w.is_some(), || format!("m={m}: no fundamental weight for ({s},{t})"))?;
        }
    }
    let aff = Realization::affine_a1().map_err(err)?;
    ensure(aff.same_hyperplane(0, 1), || "affine A~1: H_s ≠ H_t".into())?;
    ensure(frobenius::fundamental_weight(&aff, 0, 1).map_err(err)?.is_none(), || "affine A~1 has a fundamental weight".into())?;
    Ok("m ∈ {2,3,4,6} pass; affine A~1 has no fundamental weight".into())
}

/// Whether some reduced expression of `p` begins `[I, first, …]`.
fn starts_with(sys: &CoxeterSystem, p: &DoubleCoset, first: GenSet) -> Result<bool, String> {
    let step = cosets::identity_coset(sys, p.left(), first).map_err(err)?;
    for q in cosets::enumerate_cosets(sys, first, p.right()).map_err(err)? {
        if expressions::reduced_composition(sys, &step, &q).map_err(err)?.as_ref() == Some(p) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Maximal-element factorizations, torsor cardinality, core idempotence and
/// the first-step criteria.
pub fn coset_structure(sys: &CoxeterSystem) -> Outcome {
    let ps = all_cosets(sys)?;
    let len = |x: &GroupElement| x.length();
    for p in &ps {
        let (i, j) = (p.left(), p.right());
        let (lr, rr) = (p.left_redundancy(), p.right_redundancy());
        let w = |s: GenSet| sys.longest_element(s).map_err(err);
        let (wi, wj, wlr, wrr) = (w(i)?, w(j)?, w(lr)?, w(rr)?);
        let right = sys.multiply(&wrr, &wj).map_err(err)?;
        let left = sys.multiply(&wi, &wlr).map_err(err)?;
        let f1 = sys.product([&wi, p.pmin(), &right]).map_err(err)?;
        let f2 = sys.product([&left, p.pmin(), &wj]).map_err(err)?;
        ensure(f1 == *p.pmax() && f2 == *p.pmax(), || format!("{p:?}: factorizations of p̄ disagree"))?;
        ensure(len(&wi) + len(p.pmin()) + len(&right) == len(p.pmax()), || format!("{p:?}: w_I.p̲.(w_rr w_J) not length-additive"))?;
        ensure(len(&left) + len(p.pmin()) + len(&wj) == len(p.pmax()), || format!("{p:?}: (w_I w_lr).p̲.w_J not length-additive"))?;

        let members = cosets::elements(sys, p).map_err(err)?;
        let order = |s: GenSet| sys.parabolic(s).map(|g| g.order()).map_err(err);
        ensure(members.len() * order(lr)? == order(i)? * order(j)?, || format!("{p:?}: torsor cardinality fails"))?;
        for x in &members {
            let top = i.is_subset(sys.descents(x, Side::Left)) && j.is_subset(sys.descents(x, Side::Right));
            ensure(top == (x == p.pmax()), || format!("{p:?}: descent criterion for p̄ fails at {x:?}"))?;
        }

        let c = cosets::core(sys, p).map_err(err)?;
        ensure(cosets::core(sys, &c).map_err(err)? == c, || format!("{p:?}: core is not idempotent"))?;

        let (ldes, _) = cosets::coset_descents(sys, p);
        for s in 0..sys.rank() {
            if i.contains(s) {
                let found = starts_with(sys, p, i.without(s))?;
                ensure(found == !lr.contains(s), || format!("{p:?}: [I, I∖{s}, …] exists = {found}"))?;
            } else if sys.is_finitary(i.with(s)).map_err(err)? {
                let found = starts_with(sys, p, i.with(s))?;
                ensure(found == ldes.contains(s), || format!("{p:?}: [I, I+{s}, …] exists = {found}"))?;
            }
        }
    }
    Ok(format!("{} cosets", ps.len()))
}

/// The suite run by `verify all`: every check that applies to one group.
pub fn suite(group: &str, seed: u64, bound: Option<usize>) -> Result<Vec<CheckReport>, String> {
    let real = Arc::new(realization_for(group)?);
    let sys = real.system();
    if !sys.is_finitary(sys.all()).map_err(err)? {
        return Err(format!("{group} is not finite"));
    }
    let spaces = InvariantSpaces::new(real.clone());
    let bound = match bound {
        Some(b) => b,
        None => demazure::default_degree_bound(&real).map_err(err)?,
    };
    let mut out = vec![
        run("coset-structure", || coset_structure(sys)),
        run("demazure-oracle", || demazure_oracle(&real, 20, 8, seed)),
        run("nilcoxeter-rank", || nilcoxeter_rank(&spaces, bound)),
        run("expression-operators", || expression_operators(&spaces, Some(4), 100, 8, seed, bound)),
        run("matsumoto", || matsumoto(sys)),
    ];
    if group.starts_with('A') {
        out.push(run("type-a-switchback", || type_a_switchbacks(sys)));
    }
    out.push(run("frobenius-chain", || frobenius_chain(&real, seed)));
    out.push(run("dual-bases-in-image", || dual_bases_in_image(&real)));
    out.push(run("star", || star(&real)));
    Ok(out)
}
