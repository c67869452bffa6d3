//! Demazure operators on a realization: simple, element, parabolic, relative,
//! coset and expression operators, plus degree-bounded equality and rank
//! checks on invariant subrings.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cosets::{self, DoubleCoset};
use crate::coxeter::{CoxeterError, GroupElement, Side};
use crate::expressions::{self, ExprError, Expression};
use crate::genset::GenSet;
use crate::linalg;
use crate::polyring::{monomials_of_degree, Monomial, Poly, PolyError, Realization, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DemazureError {
    #[error("input is not invariant under {0:?}")]
    DomainViolation(GenSet),
    #[error("output is not invariant under {0:?}")]
    CodomainViolation(GenSet),
    #[error("{0:?} is not a subset of {1:?}")]
    NotSubset(GenSet, GenSet),
    #[error("cosets are not composable: {0:?} != {1:?}")]
    MiddleMismatch(GenSet, GenSet),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `∂_s(f) = (f − s f) / α_s`.
pub fn partial_s(real: &Realization, s: usize, f: &Poly) -> Result<Poly, DemazureError> {
    let diff = f - &real.act_generator(s, f);
    Ok(diff.divide_by_linear(&real.root_poly(s))?)
}

/// `∂_{s_1} ∘ ⋯ ∘ ∂_{s_d}` applied to `f` (the last letter acts first).
pub fn partial_word(real: &Realization, word: &[usize], f: &Poly) -> Result<Poly, DemazureError> {
    let mut g = f.clone();
    for &s in word.iter().rev() {
        if g.is_zero() {
            break;
        }
        g = partial_s(real, s, &g)?;
    }
    Ok(g)
}

/// What an operator was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpTag {
    Simple(usize),
    Element(GroupElement),
    Parabolic(GenSet),
    Relative(GenSet, GenSet),
    Coset(DoubleCoset),
    Expression(Expression),
}

/// A composite Demazure operator `∂_{x_1} ∘ ⋯ ∘ ∂_{x_k}`, defined on
/// `R^domain` and landing in `R^codomain`.
#[derive(Clone, Debug)]
pub struct DemazureOp {
    pub tag: OpTag,
    factors: Vec<GroupElement>,
    pub domain: GenSet,
    pub codomain: GenSet,
}

impl DemazureOp {
    pub fn simple(real: &Realization, s: usize) -> Result<Self, DemazureError> {
        let x = real.system().generator(s)?;
        Ok(DemazureOp { tag: OpTag::Simple(s), factors: vec![x], domain: GenSet::EMPTY, codomain: GenSet::singleton(s) })
    }

    /// `∂_x`, landing in `R^I` for `I` the left descent set of `x`.
    pub fn element(real: &Realization, x: &GroupElement) -> Self {
        let codomain = real.system().descents(x, Side::Left);
        DemazureOp { tag: OpTag::Element(x.clone()), factors: vec![x.clone()], domain: GenSet::EMPTY, codomain }
    }

    /// `∂_I = ∂_{w_I}`.
    pub fn parabolic(real: &Realization, set: GenSet) -> Result<Self, DemazureError> {
        let w = real.system().longest_element(set)?;
        Ok(DemazureOp { tag: OpTag::Parabolic(set), factors: vec![w], domain: GenSet::EMPTY, codomain: set })
    }

    /// `∂^I_J = ∂_{w_J w_I⁻¹}` for `I ⊆ J`.
    pub fn relative(real: &Realization, i: GenSet, j: GenSet) -> Result<Self, DemazureError> {
        if !i.is_subset(j) {
            return Err(DemazureError::NotSubset(i, j));
        }
        let sys = real.system();
        let x = sys.multiply(&sys.longest_element(j)?, &sys.inverse(&sys.longest_element(i)?))?;
        Ok(DemazureOp { tag: OpTag::Relative(i, j), factors: vec![x], domain: i, codomain: j })
    }

    /// `∂_p = ∂_{p̄ w_J⁻¹}` on `R^J`, landing in `R^I`.
    pub fn coset(real: &Realization, p: &DoubleCoset) -> Result<Self, DemazureError> {
        let sys = real.system();
        let x = sys.multiply(p.pmax(), &sys.inverse(&sys.longest_element(p.right())?))?;
        assert_eq!(x.length() + sys.parabolic_length(p.right())?, p.pmax().length());
        Ok(DemazureOp { tag: OpTag::Coset(p.clone()), factors: vec![x], domain: p.right(), codomain: p.left() })
    }

    /// The literal composite `∂_{w_{K_1} w_{I_1}⁻¹} ∘ ⋯ ∘ ∂_{w_{K_m} w_{I_m}⁻¹}`.
    pub fn expression(real: &Realization, e: &Expression) -> Result<Self, DemazureError> {
        let sys = real.system();
        let m = e.to_multistep();
        let mut factors = Vec::new();
        for (j, &k) in m.tops().iter().enumerate() {
            let x = sys.multiply(&sys.longest_element(k)?, &sys.inverse(&sys.longest_element(m.bottoms()[j + 1])?))?;
            factors.push(x);
        }
        Ok(DemazureOp { tag: OpTag::Expression(e.clone()), factors, domain: e.last(), codomain: e.first() })
    }

    pub fn factors(&self) -> &[GroupElement] {
        &self.factors
    }

    /// Total number of simple operators composed, i.e. the degree drop.
    pub fn length(&self) -> usize {
        self.factors.iter().map(GroupElement::length).sum()
    }

    /// Evaluates the operator, checking that the input lies in `R^domain`
    /// and the output in `R^codomain`.
    pub fn apply(&self, real: &Realization, f: &Poly) -> Result<Poly, DemazureError> {
        if !real.is_invariant(f, self.domain) {
            return Err(DemazureError::DomainViolation(self.domain));
        }
        let g = self.apply_unchecked(real, f)?;
        if !real.is_invariant(&g, self.codomain) {
            return Err(DemazureError::CodomainViolation(self.codomain));
        }
        Ok(g)
    }

    /// Evaluates the operator without invariance checks.
    pub fn apply_unchecked(&self, real: &Realization, f: &Poly) -> Result<Poly, DemazureError> {
        let mut g = f.clone();
        for x in self.factors.iter().rev() {
            g = partial_word(real, x.word(), &g)?;
        }
        Ok(g)
    }
}

/// Positive roots of `W_I`: the distinct `w(α_s)` with `s ∈ I` and `ws > w`.
pub fn positive_roots(real: &Realization, set: GenSet) -> Result<Vec<Poly>, DemazureError> {
    let sys = real.system();
    let group = sys.parabolic(set)?;
    let mut roots: Vec<Poly> = Vec::new();
    for w in &group.elements {
        for s in set.iter() {
            if !sys.is_descent(w, s, Side::Right) {
                let r = real.act(w, &real.root_poly(s))?;
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    assert_eq!(roots.len(), group.length(), "positive roots of {set:?} do not match ℓ(w_I)");
    Ok(roots)
}

/// `μ_I`, the product of the positive roots of `W_I`.
pub fn mu(real: &Realization, set: GenSet) -> Result<Poly, DemazureError> {
    let mut acc = real.one();
    for r in positive_roots(real, set)? {
        acc = &acc * &r;
    }
    Ok(acc)
}

/// `∂_I(f)` via `Σ (−1)^{ℓ(w)} w(f)` divided by every positive root of `W_I`.
pub fn partial_i_altsum(real: &Realization, set: GenSet, f: &Poly) -> Result<Poly, DemazureError> {
    let group = real.system().parabolic(set)?;
    let mut sum = real.zero();
    for w in &group.elements {
        let wf = real.act(w, f)?;
        sum = if w.length() % 2 == 0 { &sum + &wf } else { &sum - &wf };
    }
    for r in positive_roots(real, set)? {
        sum = sum.divide_by_linear(&r)?;
    }
    Ok(sum)
}

/// The reduced composition `q.p` of a `(K, I)`-coset `q` and an
/// `(I, J)`-coset `p`, or `None` when `∂_q ∘ ∂_p = 0`.
pub fn algebroid_compose(real: &Realization, q: &DoubleCoset, p: &DoubleCoset) -> Result<Option<DoubleCoset>, DemazureError> {
    if q.right() != p.left() {
        return Err(DemazureError::MiddleMismatch(q.right(), p.left()));
    }
    Ok(expressions::reduced_composition(real.system(), q, p)?)
}

/// Default degree bound in the grading with `deg α = 2`.
pub fn default_degree_bound(real: &Realization) -> Result<usize, DemazureError> {
    Ok(2 * (real.system().parabolic_length(real.system().all())? + 2))
}

/// Bases of the graded pieces of invariant subrings `R^J`, built by
/// symmetrizing monomials over `W_J` and reducing to echelon form.
pub struct InvariantSpaces {
    real: Arc<Realization>,
    cache: Mutex<HashMap<(GenSet, usize), Arc<Vec<Poly>>>>,
}

impl InvariantSpaces {
    pub fn new(real: Arc<Realization>) -> Self {
        InvariantSpaces { real, cache: Mutex::new(HashMap::new()) }
    }

    pub fn realization(&self) -> &Realization {
        &self.real
    }

    /// A basis of the homogeneous polynomials of degree `d` in `R^J`.
    pub fn basis(&self, set: GenSet, d: usize) -> Result<Arc<Vec<Poly>>, DemazureError> {
        if let Some(b) = self.cache.lock().unwrap().get(&(set, d)) {
            return Ok(b.clone());
        }
        let real = &self.real;
        let group = real.system().parabolic(set)?;
        let mut echelon: BTreeMap<Monomial, Poly> = BTreeMap::new();
        let mut basis = Vec::new();
        for m in monomials_of_degree(real.dim(), d) {
            let f = Poly::monomial(real.dim(), m, Q::one());
            let mut sym = real.zero();
            for w in &group.elements {
                sym = &sym + &real.act(w, &f)?;
            }
            if let Some(r) = reduce(&echelon, &sym) {
                let lead = r.terms().next_back().unwrap().0.clone();
                echelon.insert(lead, r);
                basis.push(sym);
            }
        }
        let b = Arc::new(basis);
        self.cache.lock().unwrap().insert((set, d), b.clone());
        Ok(b)
    }
}

/// Reduces `f` by the echelon rows; returns the monic remainder if nonzero.
fn reduce(echelon: &BTreeMap<Monomial, Poly>, f: &Poly) -> Option<Poly> {
    let mut r = f.clone();
    loop {
        let (lead, c) = {
            let (m, c) = r.terms().next_back()?;
            (m.clone(), c.clone())
        };
        match echelon.get(&lead) {
            Some(row) => r = &r - &row.scale(&c),
            None => {
                // Only cancel leading terms; the remainder's lead is new.
                return Some(r.scale(&c.recip()));
            }
        }
    }
}

/// Report of a degree-bounded operator comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub agree: bool,
    /// Degree bound used, with `deg α = 2`.
    pub degree_bound: usize,
    pub inputs_checked: usize,
}

/// Compares two operators on a basis of `R^J` in degrees up to `bound`
/// (`deg α = 2`). Equality beyond the bound is assumed, not proved.
pub fn ops_agree(spaces: &InvariantSpaces, a: &DemazureOp, b: &DemazureOp, domain: GenSet, bound: usize) -> Result<Agreement, DemazureError> {
    let real = spaces.realization();
    let mut inputs = 0;
    for d in 0..=bound / 2 {
        for f in spaces.basis(domain, d)?.iter() {
            inputs += 1;
            if a.apply_unchecked(real, f)? != b.apply_unchecked(real, f)? {
                return Ok(Agreement { agree: false, degree_bound: bound, inputs_checked: inputs });
            }
        }
    }
    Ok(Agreement { agree: true, degree_bound: bound, inputs_checked: inputs })
}

/// Whether `op` vanishes on `R^J` up to `bound` (`deg α = 2`).
pub fn op_is_zero(spaces: &InvariantSpaces, op: &DemazureOp, domain: GenSet, bound: usize) -> Result<bool, DemazureError> {
    let real = spaces.realization();
    for d in 0..=bound / 2 {
        for f in spaces.basis(domain, d)?.iter() {
            if !op.apply_unchecked(real, f)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub cosets: usize,
    pub degree_bound: usize,
}

/// Rank of `{∂_p}` over the `(I, J)`-cosets, evaluated on a basis of `R^J`
/// up to `bound` (`deg α = 2`). Stops early once the rank is full.
pub fn rank_check(spaces: &InvariantSpaces, left: GenSet, right: GenSet, bound: usize) -> Result<RankReport, DemazureError> {
    let real = spaces.realization();
    let ps = cosets::enumerate_cosets(real.system(), left, right)?;
    let ops: Vec<DemazureOp> = ps.iter().map(|p| DemazureOp::coset(real, p)).collect::<Result<_, _>>()?;
    let mut columns: HashMap<(usize, Monomial), usize> = HashMap::new();
    let mut rows: Vec<Vec<(usize, Q)>> = vec![Vec::new(); ops.len()];
    let mut input = 0;
    let mut rank = 0;
    for d in 0..=bound / 2 {
        for f in spaces.basis(right, d)?.iter() {
            for (i, op) in ops.iter().enumerate() {
                let g = op.apply(real, f)?;
                for (m, c) in g.terms() {
                    let next = columns.len();
                    let col = *columns.entry((input, m.clone())).or_insert(next);
                    rows[i].push((col, c.clone()));
                }
            }
            input += 1;
        }
        let dense: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![Q::zero(); columns.len()];
                for (c, x) in r {
                    v[*c] = x.clone();
                }
                v
            })
            .collect();
        rank = linalg::rank(&dense);
        if rank == ops.len() {
            break;
        }
    }
    Ok(RankReport { rank, cosets: ops.len(), degree_bound: bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(xs: &[usize]) -> GenSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn simple_examples() {
        let real = Realization::permutation(3).unwrap();
        assert!(partial_s(&real, 0, &real.one()).unwrap().is_zero());
        assert_eq!(partial_s(&real, 0, &real.root_poly(0)).unwrap(), Poly::constant(3, q(2)));
        assert_eq!(partial_s(&real, 0, &real.root_poly(1)).unwrap(), Poly::constant(3, q(-1)));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = Poly::random(&mut rng, 3, 5, 8);
        assert!(partial_word(&real, &[0, 0], &f).unwrap().is_zero());
        assert_eq!(partial_word(&real, &[0, 1, 0], &f).unwrap(), partial_word(&real, &[1, 0, 1], &f).unwrap());
        assert_eq!(partial_word(&real, &[], &f).unwrap(), f);
    }

    #[test]
    fn altsum_matches_composition() {
        let real = Realization::permutation(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for set in real.system().all().subsets() {
            let op = DemazureOp::parabolic(&real, set).unwrap();
            for _ in 0..5 {
                let f = Poly::random(&mut rng, 3, 6, 6);
                let a = op.apply(&real, &f).unwrap();
                assert_eq!(a, partial_i_altsum(&real, set, &f).unwrap());
            }
        }
        let all = real.system().all();
        assert_eq!(DemazureOp::parabolic(&real, all).unwrap().apply(&real, &mu(&real, all).unwrap()).unwrap(), Poly::constant(3, q(6)));
    }

    #[test]
    fn coset_operators() {
        let real = Realization::permutation(3).unwrap();
        let sys = real.system();
        let (i, j) = (g(&[0]), sys.all());
        let p = cosets::identity_coset(sys, i, j).unwrap();
        let f = mu(&real, j).unwrap();
        let sym = &f * &f;
        assert_eq!(DemazureOp::coset(&real, &p).unwrap().apply(&real, &sym).unwrap(), sym);
        let qc = cosets::identity_coset(sys, j, i).unwrap();
        let a = DemazureOp::coset(&real, &qc).unwrap();
        let b = DemazureOp::relative(&real, i, j).unwrap();
        let h = DemazureOp::parabolic(&real, i).unwrap().apply(&real, &Poly::var(3, 0).pow(3)).unwrap();
        assert_eq!(a.apply(&real, &h).unwrap(), b.apply(&real, &h).unwrap());
        assert!(matches!(a.apply(&real, &Poly::var(3, 0)), Err(DemazureError::DomainViolation(_))));
    }

    #[test]
    fn expression_operators() {
        let spaces = InvariantSpaces::new(Arc::new(Realization::permutation(3).unwrap()));
        let real2 = spaces.realization();
        let e1 = Expression::parse(real2.system(), "[{0} - 0 + 1 - 1 + 0]").unwrap();
        let e2 = Expression::parse(real2.system(), "[{0} + 1 - 1]").unwrap();
        let a = DemazureOp::expression(real2, &e1).unwrap();
        let b = DemazureOp::expression(real2, &e2).unwrap();
        assert!(ops_agree(&spaces, &a, &b, g(&[0]), 8).unwrap().agree);
        let v = Expression::parse(real2.system(), "[{0} - 0 + 0]").unwrap();
        assert!(op_is_zero(&spaces, &DemazureOp::expression(real2, &v).unwrap(), g(&[0]), 8).unwrap());
    }

    #[test]
    fn rank_examples() {
        let spaces = InvariantSpaces::new(Arc::new(Realization::permutation(3).unwrap()));
        let all = spaces.realization().system().all();
        let r = rank_check(&spaces, GenSet::EMPTY, GenSet::EMPTY, 10).unwrap();
        assert_eq!((r.rank, r.cosets), (6, 6));
        assert_eq!(rank_check(&spaces, all, all, 10).unwrap().rank, 1);
        assert_eq!(rank_check(&spaces, g(&[0]), g(&[1]), 10).unwrap().rank, 2);
    }

    #[test]
    fn invariant_bases() {
        let spaces = InvariantSpaces::new(Arc::new(Realization::permutation(3).unwrap()));
        let all = spaces.realization().system().all();
        // Symmetric polynomials in 3 variables: degree 2 has e1², e2.
        assert_eq!(spaces.basis(all, 2).unwrap().len(), 2);
        assert_eq!(spaces.basis(GenSet::EMPTY, 2).unwrap().len(), 6);
    }
}
