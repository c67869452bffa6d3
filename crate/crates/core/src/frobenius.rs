//! Frobenius extensions of invariant rings: `P_I`, bases over subrings,
//! almost dual and dual bases, and the dihedral fundamental weight.

use num_traits::{One, Zero};
use serde_json::json;
use thiserror::Error;

use crate::cosets::DoubleCoset;
use crate::coxeter::{CoxeterError, CoxeterSystem, GroupElement, Side};
use crate::demazure::{self, partial_word, DemazureError, DemazureOp};
use crate::genset::GenSet;
use crate::linalg;
use crate::polyring::{Poly, Realization, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrobError {
    #[error("pairing entry ({i},{j}) is {entry:?}, which is not {expected} modulo positive-degree invariants")]
    NotAlmostDual { i: usize, j: usize, entry: Poly, expected: u8 },
    #[error("pairing entry ({i},{j}) is {entry:?} after dualizing")]
    NotDual { i: usize, j: usize, entry: Poly },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Invariant(String),
    #[error("coefficients do not reconstruct the polynomial")]
    Reconstruction,
    #[error(transparent)]
    Demazure(#[from] DemazureError),
}

impl From<CoxeterError> for FrobError {
    fn from(e: CoxeterError) -> Self {
        FrobError::Demazure(e.into())
    }
}

impl From<crate::polyring::PolyError> for FrobError {
    fn from(e: crate::polyring::PolyError) -> Self {
        FrobError::Demazure(e.into())
    }
}

/// `P_I = μ_I / |W_I|`, so that `∂_I(P_I) = 1`.
pub fn p_of(real: &Realization, set: GenSet) -> Result<Poly, FrobError> {
    let order = real.system().parabolic(set)?.order();
    Ok(demazure::mu(real, set)?.scale(&Q::new(1.into(), (order as i64).into())))
}

/// Minimal representatives of the right cosets `W_I y` in `W_J`, sorted by
/// length then ShortLex.
pub fn min_reps(sys: &CoxeterSystem, i: GenSet, j: GenSet) -> Result<Vec<GroupElement>, FrobError> {
    let group = sys.parabolic(j)?;
    Ok(group.elements.iter().filter(|y| i.iter().all(|s| !sys.is_descent(y, s, Side::Left))).cloned().collect())
}

/// `{∂_I ∂_y (P_J)}` over minimal representatives `y` of `W_I \ W_J`.
pub fn basis_over(real: &Realization, i: GenSet, j: GenSet) -> Result<Vec<Poly>, FrobError> {
    if !i.is_subset(j) {
        return Err(FrobError::Precondition(format!("{i:?} is not a subset of {j:?}")));
    }
    let pj = p_of(real, j)?;
    let wi = real.system().longest_element(i)?;
    min_reps(real.system(), i, j)?
        .iter()
        .map(|y| {
            let f = partial_word(real, y.word(), &pj)?;
            Ok(partial_word(real, wi.word(), &f)?)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    AlmostDual,
    Dual,
}

/// Which basis Gram–Schmidt modifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modify {
    /// `d'_k = d_k − Σ_{j>k} ∂(c_j d_k) d'_j`, processing `d` from the top degree down.
    D,
    /// `c'_i = c_i − Σ_{j<i} ∂(c_i d_j) c'_j`, keeping `d` fixed.
    C,
}

/// Bases `c`, `d` of `R^ext` over `R^base` with trace `∂^ext_base`, with `c`
/// in ascending degree.
#[derive(Clone, Debug)]
pub struct DualBasisPair {
    pub base: GenSet,
    pub ext: GenSet,
    pub trace: DemazureOp,
    /// Half the degree drop of the trace.
    pub ell: usize,
    pub c: Vec<Poly>,
    pub d: Vec<Poly>,
    /// `g_k ∈ R^J` with `d_k = ∂_{p̲}(g_k)`, when the pair comes from a coset.
    pub witnesses: Option<Vec<Poly>>,
    pub status: Status,
}

impl DualBasisPair {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `M[i][j] = ∂(c_i d_j)`.
    pub fn pairing_matrix(&self, real: &Realization) -> Result<Vec<Vec<Poly>>, FrobError> {
        self.c
            .iter()
            .map(|ci| self.d.iter().map(|dj| Ok(self.trace.apply(real, &(ci * dj))?)).collect())
            .collect()
    }

    /// Checks lower unitriangularity: zero above the diagonal, one on it, and
    /// positive-degree `base`-invariants below it.
    pub fn check_almost_dual(&self, real: &Realization) -> Result<(), FrobError> {
        let m = self.pairing_matrix(real)?;
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let expected = u8::from(i == j);
                let ok = if i < j {
                    e.is_zero()
                } else {
                    e.constant_term() == Q::from_integer(expected.into()) && real.is_invariant(e, self.base)
                };
                if !ok {
                    return Err(FrobError::NotAlmostDual { i, j, entry: e.clone(), expected });
                }
            }
        }
        Ok(())
    }

    pub fn check_dual(&self, real: &Realization) -> Result<(), FrobError> {
        let m = self.pairing_matrix(real)?;
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let want = if i == j { real.one() } else { real.zero() };
                if *e != want {
                    return Err(FrobError::NotDual { i, j, entry: e.clone() });
                }
            }
        }
        Ok(())
    }

    /// Coefficients `a_i = ∂(f d_i)` with `Σ a_i c_i = f`, for an exact dual pair.
    pub fn express_in_basis(&self, real: &Realization, f: &Poly) -> Result<Vec<Poly>, FrobError> {
        if self.status != Status::Dual {
            return Err(FrobError::Precondition("pair is not dual".into()));
        }
        let coeffs: Vec<Poly> = self.d.iter().map(|di| self.trace.apply(real, &(f * di))).collect::<Result<_, _>>()?;
        let mut back = real.zero();
        for (a, ci) in coeffs.iter().zip(&self.c) {
            back = &back + &(a * ci);
        }
        if back != *f {
            return Err(FrobError::Reconstruction);
        }
        Ok(coeffs)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let polys = |v: &[Poly]| v.iter().map(Poly::to_terms_json).collect::<Vec<_>>();
        json!({
            "c": polys(&self.c),
            "d": polys(&self.d),
            "trace": { "kind": "relative", "I": self.ext, "J": self.base, "ell": self.ell },
            "witnesses": self.witnesses.as_deref().map(polys),
            "status": match self.status { Status::AlmostDual => "almost-dual", Status::Dual => "dual" },
        })
    }
}

/// Sorts paired entries by ascending degree of `c`, stably.
fn sort_by_c_degree(c: &mut Vec<Poly>, d: &mut Vec<Poly>, w: Option<&mut Vec<Poly>>) {
    let mut idx: Vec<usize> = (0..c.len()).collect();
    idx.sort_by_key(|&i| c[i].total_degree().unwrap_or(0));
    let pick = |v: &Vec<Poly>| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
    *c = pick(c);
    *d = pick(d);
    if let Some(w) = w {
        *w = pick(w);
    }
}

/// Almost dual bases `{∂_I ∂_y(P_J)}`, `{∂_I ∂_{y°}(P_J)}` of `R^I` over
/// `R^J`, where `y⁻¹ . w_I . y° = w_J`.
pub fn almost_dual_bases(real: &Realization, i: GenSet, j: GenSet) -> Result<DualBasisPair, FrobError> {
    if !i.is_subset(j) {
        return Err(FrobError::Precondition(format!("{i:?} is not a subset of {j:?}")));
    }
    let sys = real.system();
    let pj = p_of(real, j)?;
    let wi = sys.longest_element(i)?;
    let wj = sys.longest_element(j)?;
    let ys = min_reps(sys, i, j)?;
    let eval = |y: &GroupElement| -> Result<Poly, FrobError> { Ok(partial_word(real, wi.word(), &partial_word(real, y.word(), &pj)?)?) };
    let mut c = Vec::new();
    let mut d = Vec::new();
    let mut circs = Vec::new();
    for y in &ys {
        let yc = sys.product([&wi, y, &wj])?;
        let chain = sys.product([&sys.inverse(y), &wi, &yc])?;
        if chain != wj || y.length() + wi.length() + yc.length() != wj.length() {
            return Err(FrobError::Invariant(format!("y° of {y:?} is not length-additive")));
        }
        if !ys.contains(&yc) {
            return Err(FrobError::Invariant(format!("y° = {yc:?} is not a minimal representative")));
        }
        circs.push(yc.clone());
        c.push(eval(y)?);
        d.push(eval(&yc)?);
    }
    circs.sort();
    circs.dedup();
    if circs.len() != ys.len() {
        return Err(FrobError::Invariant("y ↦ y° is not a bijection".into()));
    }
    sort_by_c_degree(&mut c, &mut d, None);
    let trace = DemazureOp::relative(real, i, j)?;
    let pair = DualBasisPair { base: j, ext: i, ell: trace.length(), trace, c, d, witnesses: None, status: Status::AlmostDual };
    pair.check_almost_dual(real)?;
    Ok(pair)
}

/// Turns an almost dual pair into an exact dual pair.
pub fn gram_schmidt_dualize(real: &Realization, pair: &DualBasisPair, modify: Modify) -> Result<DualBasisPair, FrobError> {
    let n = pair.len();
    let tr = |f: &Poly| pair.trace.apply(real, f);
    let mut out = pair.clone();
    match modify {
        Modify::D => {
            let mut dp: Vec<Poly> = vec![real.zero(); n];
            for k in (0..n).rev() {
                let mut v = pair.d[k].clone();
                for j in k + 1..n {
                    let a = tr(&(&pair.c[j] * &pair.d[k]))?;
                    v = &v - &(&a * &dp[j]);
                }
                dp[k] = v;
            }
            out.d = dp;
        }
        Modify::C => {
            let mut cp: Vec<Poly> = Vec::with_capacity(n);
            for i in 0..n {
                let mut v = pair.c[i].clone();
                for (j, cj) in cp.iter().enumerate() {
                    let a = tr(&(&pair.c[i] * &pair.d[j]))?;
                    v = &v - &(&a * cj);
                }
                cp.push(v);
            }
            out.c = cp;
        }
    }
    out.status = Status::Dual;
    out.check_dual(real)?;
    Ok(out)
}

/// Whether `u ≤ w` in the left weak order, i.e. `w = v . u` length-additively.
pub fn left_weak_le(sys: &CoxeterSystem, u: &GroupElement, w: &GroupElement) -> Result<bool, FrobError> {
    let v = sys.multiply(w, &sys.inverse(u))?;
    Ok(v.length() + u.length() == w.length())
}

/// Dual bases of `R^K` over `R^I` (`K = leftred(p)`) with the `d` side in the
/// image of `∂_{p̲} : R^J → R^K`, each `d_k` witnessed by `g_k ∈ R^J`.
pub fn dual_bases_in_image(real: &Realization, p: &DoubleCoset, l: GenSet) -> Result<DualBasisPair, FrobError> {
    let sys = real.system();
    let (i, j, k) = (p.left(), p.right(), p.left_redundancy());
    if !i.union(j).is_subset(l) || !sys.is_finitary(l)? || !sys.in_parabolic(p.pmin(), l) {
        return Err(FrobError::Precondition(format!("need I ∪ J ⊆ L finitary and p ⊆ W_L for {p:?}, L = {l:?}")));
    }
    let pi = p_of(real, i)?;
    let pl = p_of(real, l)?;
    let (wk, wj, wl) = (sys.longest_element(k)?, sys.longest_element(j)?, sys.longest_element(l)?);
    let pmin = p.pmin();
    let pmin_wj = sys.multiply(pmin, &wj)?;
    let ys = min_reps(sys, k, i)?;
    let mut c = Vec::new();
    let mut d = Vec::new();
    let mut witnesses = Vec::new();
    let mut xs = Vec::new();
    for y in &ys {
        let yc = sys.product([&wj, &sys.inverse(pmin), y, &wl])?;
        let x = sys.multiply(&sys.inverse(y), &pmin_wj)?;
        if x.length() != y.length() + pmin_wj.length() || sys.multiply(&x, &yc)? != wl || x.length() + yc.length() != wl.length() {
            return Err(FrobError::Invariant(format!("y⁻¹ . p̲ . w_J . y° = w_L fails for y = {y:?}")));
        }
        xs.push(x);
        c.push(partial_word(real, wk.word(), &partial_word(real, y.word(), &pi)?)?);
        let g = partial_word(real, wj.word(), &partial_word(real, yc.word(), &pl)?)?;
        if !real.is_invariant(&g, j) {
            return Err(FrobError::Invariant(format!("witness for y = {y:?} is not {j:?}-invariant")));
        }
        let dy = partial_word(real, pmin.word(), &g)?;
        if !real.is_invariant(&dy, k) {
            return Err(FrobError::Invariant(format!("∂_p̲ of the witness for y = {y:?} is not {k:?}-invariant")));
        }
        witnesses.push(g);
        d.push(dy);
    }
    // The x = y⁻¹.p̲.w_J are exactly the elements of p between p̲ w_J and p̄.
    let mut expected = Vec::new();
    for x in crate::cosets::elements(sys, p)? {
        if left_weak_le(sys, &pmin_wj, &x)? && left_weak_le(sys, &x, p.pmax())? {
            expected.push(x);
        }
    }
    xs.sort();
    if xs != expected {
        return Err(FrobError::Invariant(format!("elements y⁻¹.p̲.w_J of {p:?} do not fill the interval [p̲ w_J, p̄]")));
    }
    sort_by_c_degree(&mut c, &mut d, Some(&mut witnesses));
    let trace = DemazureOp::relative(real, k, i)?;
    let pair = DualBasisPair { base: i, ext: k, ell: trace.length(), trace, c, d, witnesses: Some(witnesses), status: Status::AlmostDual };
    pair.check_almost_dual(real)?;
    gram_schmidt_dualize(real, &pair, Modify::C)
}

/// `(★)`: dual bases of `R^{I∩J}` over `R^I` with one basis inside `R^J`.
pub fn check_star(real: &Realization, i: GenSet, j: GenSet) -> Result<DualBasisPair, FrobError> {
    let p = crate::cosets::identity_coset(real.system(), i, j)?;
    let pair = dual_bases_in_image(real, &p, i.union(j))?;
    if pair.ext != i.intersection(j) {
        return Err(FrobError::Invariant("left redundancy of the identity coset is not I ∩ J".into()));
    }
    if let Some(bad) = pair.d.iter().position(|f| !real.is_invariant(f, j)) {
        return Err(FrobError::Invariant(format!("basis element {bad} is not {j:?}-invariant")));
    }
    Ok(pair)
}

/// A linear `g` with `∂_s(g) = 1` and `∂_t(g) = 0`, if one exists.
pub fn fundamental_weight(real: &Realization, s: usize, t: usize) -> Result<Option<Poly>, FrobError> {
    let a = vec![real.coroot(s).to_vec(), real.coroot(t).to_vec()];
    let b = vec![Q::one(), Q::zero()];
    let g = linalg::solve(&a, &b).map(|x| Poly::linear(&x));
    if g.is_some() == real.same_hyperplane(s, t) {
        return Err(FrobError::Invariant(format!("fundamental weight existence disagrees with the hyperplane test for ({s},{t})")));
    }
    if let Some(g) = &g {
        let ds = demazure::partial_s(real, s, g)?;
        let dt = demazure::partial_s(real, t, g)?;
        if ds != real.one() || !dt.is_zero() {
            return Err(FrobError::Invariant("solved weight fails ∂_s g = 1, ∂_t g = 0".into()));
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::qf;

    fn g(xs: &[usize]) -> GenSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn p_for_single_generator() {
        let real = Realization::permutation(3).unwrap();
        assert_eq!(p_of(&real, g(&[0])).unwrap(), real.root_poly(0).scale(&qf(1, 2)));
        assert_eq!(basis_over(&real, GenSet::EMPTY, g(&[0])).unwrap().len(), 2);
        assert_eq!(basis_over(&real, g(&[0]), g(&[0])).unwrap(), vec![real.one()]);
    }

    #[test]
    fn rank_one_pairs() {
        let real = Realization::permutation(3).unwrap();
        let pair = almost_dual_bases(&real, GenSet::EMPTY, g(&[0])).unwrap();
        assert_eq!(pair.c[0], real.one());
        let dual = gram_schmidt_dualize(&real, &pair, Modify::D).unwrap();
        let again = gram_schmidt_dualize(&real, &dual, Modify::D).unwrap();
        assert_eq!(again.d, dual.d);
        let f = Poly::var(3, 0).pow(3);
        let coeffs = dual.express_in_basis(&real, &f).unwrap();
        assert_eq!(coeffs.len(), 2);
    }

    #[test]
    fn s3_chain() {
        let real = Realization::permutation(3).unwrap();
        let pair = almost_dual_bases(&real, GenSet::EMPTY, real.system().all()).unwrap();
        assert_eq!(pair.len(), 6);
        gram_schmidt_dualize(&real, &pair, Modify::D).unwrap();
        gram_schmidt_dualize(&real, &pair, Modify::C).unwrap();
    }

    #[test]
    fn dihedral_star() {
        for m in [2, 3, 4, 6] {
            let real = Realization::geometric_named(&format!("I2({m})")).unwrap();
            let w = fundamental_weight(&real, 0, 1).unwrap().expect("finite dihedral has a weight");
            assert!(real.is_invariant(&w, g(&[1])));
            check_star(&real, g(&[0]), g(&[1])).unwrap();
        }
        let aff = Realization::affine_a1().unwrap();
        assert!(fundamental_weight(&aff, 0, 1).unwrap().is_none());
    }

    #[test]
    fn dihedral_three_explicit_dual() {
        let real = Realization::geometric_named("I2(3)").unwrap();
        let p = fundamental_weight(&real, 0, 1).unwrap().unwrap();
        let trace = DemazureOp::simple(&real, 0).unwrap();
        let c = [real.one(), p.clone()];
        let d = [&real.root_poly(0) - &p, real.one()];
        for (i, ci) in c.iter().enumerate() {
            for (j, dj) in d.iter().enumerate() {
                let want = if i == j { real.one() } else { real.zero() };
                assert_eq!(trace.apply(&real, &(ci * dj)).unwrap(), want);
            }
        }
        assert!(!real.is_invariant(&d[0], g(&[1])));
    }
}
