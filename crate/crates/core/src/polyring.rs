//! Exact sparse polynomials over the rationals and realizations of Coxeter
//! systems.
//!
//! A [`Realization`] fixes a vector space `V` with roots and coroots; the
//! polynomial ring is `R = Sym(V)` in the coordinates of a fixed basis of `V`.
//! Degrees follow the convention `deg V = 2`: [`Poly::total_degree`] counts
//! variables, [`Poly::graded_degree`] doubles it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::coxeter::{Bond, CoxeterError, CoxeterSystem, GroupElement};
use crate::genset::GenSet;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial is not divisible by {divisor} (nonzero remainder)")]
    NotDivisible { divisor: String },
    #[error("divisor must be a nonzero homogeneous linear form")]
    BadDivisor,
    #[error("polynomials live in rings of different dimension ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("group element does not belong to the realization's Coxeter system")]
    MismatchedRealization,
    #[error("invalid realization: {0}")]
    InvalidRealization(String),
    #[error("malformed polynomial: {0}")]
    Malformed(String),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then the larger exponent of the earliest differing variable wins.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// All monomials of total degree `degree` in `nvars` variables, ascending.
pub fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Monomial> {
    fn rec(nvars: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if cur.len() + 1 == nvars {
            cur.push(left as u16);
            out.push(Monomial::from_exponents(cur));
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e as u16);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    rec(nvars, degree, &mut Vec::with_capacity(nvars), &mut out);
    out.sort();
    out
}

/// All monomials of total degree at most `max_degree`, ascending.
pub fn monomials_up_to(nvars: usize, max_degree: usize) -> Vec<Monomial> {
    (0..=max_degree).flat_map(|d| monomials_of_degree(nvars, d)).collect()
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Monomial::var(nvars, i), Q::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Q) -> Self {
        assert_eq!(m.0.len(), nvars, "monomial arity");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// `Σ coeffs[i] x_i`.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(Monomial::var(n, i), c.clone());
            }
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one(self.nvars))
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree with `deg V = 2`.
    pub fn graded_degree(&self) -> Option<usize> {
        self.total_degree().map(|d| 2 * d)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Part of total degree exactly `degree`.
    pub fn homogeneous_component(&self, degree: usize) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == degree).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Distinct total degrees present, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self.terms.keys().map(Monomial::degree).collect();
        ds.dedup();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(self.nvars));
        }
        let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                acc.entry(ma.mul(mb)).and_modify(|x| *x += &c).or_insert(c);
            }
        }
        Ok(Poly { nvars: self.nvars, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    fn same_ring(&self, other: &Poly) -> Result<(), PolyError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(PolyError::DimensionMismatch(self.nvars, other.nvars))
        }
    }

    /// Ring homomorphism sending `x_i` to `images[i]`.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let nv = images.first().map_or(self.nvars, Poly::nvars);
        // Fast path: every image is a single variable with coefficient one.
        let perm: Option<Vec<usize>> = images
            .iter()
            .map(|p| {
                let mut it = p.terms.iter();
                match (it.next(), it.next()) {
                    (Some((m, c)), None) if c.is_one() && m.degree() == 1 => m.0.iter().position(|&e| e == 1),
                    _ => None,
                }
            })
            .collect();
        if let Some(perm) = perm {
            let mut out = Poly::zero(nv);
            for (m, c) in &self.terms {
                let mut e = Monomial::one(nv);
                for (i, &k) in m.0.iter().enumerate() {
                    e.0[perm[i]] += k;
                }
                out.add_term(e, c.clone());
            }
            return out;
        }
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(nv), p.clone()]).collect();
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(nv, c.clone());
            for (i, &k) in m.0.iter().enumerate() {
                let k = k as usize;
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k];
            }
            for (mm, cc) in term.terms {
                acc.entry(mm).and_modify(|x| *x += &cc).or_insert(cc);
            }
        }
        Poly { nvars: nv, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Exact quotient by a nonzero homogeneous linear form.
    ///
    /// Synthetic division in the first variable of `lambda`; a nonzero
    /// remainder is reported as [`PolyError::NotDivisible`].
    pub fn divide_by_linear(&self, lambda: &Poly) -> Result<Poly, PolyError> {
        self.same_ring(lambda)?;
        if lambda.is_zero() || !lambda.terms.keys().all(|m| m.degree() == 1) {
            return Err(PolyError::BadDivisor);
        }
        let n = self.nvars;
        let k = (0..n).find(|&i| !lambda.coefficient(&Monomial::var(n, i)).is_zero()).expect("nonzero linear form");
        let lead = Monomial::var(n, k);
        let inv_lead = lambda.coefficient(&lead).recip();
        let mut rest = lambda.clone();
        rest.terms.remove(&lead);

        // f = Σ_j f_j x_k^j with f_j free of x_k.
        let mut slices: BTreeMap<u16, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let j = m.0[k];
            let mut mm = m.clone();
            mm.0[k] = 0;
            slices.entry(j).or_insert_with(|| Poly::zero(n)).add_term(mm, c.clone());
        }
        let Some((&top, _)) = slices.iter().next_back() else {
            return Ok(Poly::zero(n));
        };
        let mut quotient = Poly::zero(n);
        let mut carry = Poly::zero(n); // q_j from the previous step
        for j in (0..=top).rev() {
            let fj = slices.remove(&j).unwrap_or_else(|| Poly::zero(n));
            let reduced = &fj - &(&rest * &carry);
            if j == 0 {
                if !reduced.is_zero() {
                    return Err(PolyError::NotDivisible { divisor: format!("{lambda:?}") });
                }
                break;
            }
            let qj = reduced.scale(&inv_lead);
            for (m, c) in &qj.terms {
                let mut mm = m.clone();
                mm.0[k] = j - 1;
                quotient.add_term(mm, c.clone());
            }
            carry = qj;
        }
        Ok(quotient)
    }

    /// Seeded random polynomial with small integer coefficients.
    pub fn random<R: Rng>(rng: &mut R, nvars: usize, max_degree: usize, nterms: usize) -> Poly {
        let mut p = Poly::zero(nvars);
        for _ in 0..nterms {
            let d = rng.gen_range(0..=max_degree);
            let mut exps = vec![0u16; nvars];
            for _ in 0..d {
                exps[rng.gen_range(0..nvars)] += 1;
            }
            let c = rng.gen_range(-5i64..=5);
            p.add_term(Monomial::from_exponents(&exps), q(c));
        }
        p
    }

    pub fn to_terms_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| TermJson { exp: m.0.to_vec(), num: c.numer().to_string(), den: c.denom().to_string() })
            .collect()
    }

    pub fn from_terms_json(nvars: usize, terms: &[TermJson]) -> Result<Poly, PolyError> {
        let mut p = Poly::zero(nvars);
        for (i, t) in terms.iter().enumerate() {
            if t.exp.len() != nvars {
                return Err(PolyError::Malformed(format!("term {i}: exponent vector has length {}, expected {nvars}", t.exp.len())));
            }
            let num: BigInt = t.num.parse().map_err(|_| PolyError::Malformed(format!("term {i}: bad numerator {:?}", t.num)))?;
            let den: BigInt = t.den.parse().map_err(|_| PolyError::Malformed(format!("term {i}: bad denominator {:?}", t.den)))?;
            if den.is_zero() {
                return Err(PolyError::Malformed(format!("term {i}: zero denominator")));
            }
            p.add_term(Monomial::from_exponents(&t.exp), Q::new(num, den));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_terms_json()).expect("serializable")
    }

    pub fn from_json(nvars: usize, text: &str) -> Result<Poly, PolyError> {
        let terms: Vec<TermJson> = serde_json::from_str(text)
            .map_err(|e| PolyError::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_terms_json(nvars, &terms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub num: String,
    pub den: String,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("same ring")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_add(&-rhs).expect("same ring")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("same ring")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

/// A realization of a Coxeter system: roots `α_s ∈ V`, coroots
/// `α_s^∨ ∈ V*`, and the action `s(v) = v − <α_s^∨, v> α_s`.
#[derive(Clone)]
pub struct Realization {
    name: String,
    system: Arc<CoxeterSystem>,
    roots: Vec<Vec<Q>>,
    coroots: Vec<Vec<Q>>,
    /// `reflections[s][i]` is the image of the basis vector `e_i` under `s`.
    reflections: Vec<Vec<Poly>>,
}

impl fmt::Debug for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Realization").field("name", &self.name).field("roots", &self.roots).field("coroots", &self.coroots).finish()
    }
}

impl Realization {
    /// Builds and validates a realization: `<α_s^∨, α_s> = 2`, the Coxeter
    /// relations, balancedness, and faithfulness on finitary parabolics.
    pub fn new(name: impl Into<String>, system: Arc<CoxeterSystem>, roots: Vec<Vec<Q>>, coroots: Vec<Vec<Q>>) -> Result<Self, PolyError> {
        let bad = |m: String| PolyError::InvalidRealization(m);
        let n = system.rank();
        if roots.len() != n || coroots.len() != n {
            return Err(bad(format!("expected {n} roots and coroots")));
        }
        let dim = roots.first().map_or(0, Vec::len);
        if roots.iter().chain(coroots.iter()).any(|v| v.len() != dim) || dim == 0 {
            return Err(bad("roots and coroots must share a positive dimension".into()));
        }
        let reflections = (0..n)
            .map(|s| {
                (0..dim)
                    .map(|j| {
                        let mut v = vec![Q::zero(); dim];
                        v[j] = Q::one();
                        for (vi, ai) in v.iter_mut().zip(&roots[s]) {
                            *vi -= &coroots[s][j] * ai;
                        }
                        Poly::linear(&v)
                    })
                    .collect()
            })
            .collect();
        let rz = Realization { name: name.into(), system, roots, coroots, reflections };
        rz.validate()?;
        Ok(rz)
    }

    fn validate(&self) -> Result<(), PolyError> {
        let bad = |m: String| PolyError::InvalidRealization(m);
        let n = self.system.rank();
        for s in 0..n {
            if self.cartan(s, s) != q(2) {
                return Err(bad(format!("<α_{s}^∨, α_{s}> must equal 2")));
            }
        }
        for s in 0..n {
            for t in s + 1..n {
                let (a, b) = (self.cartan(s, t), self.cartan(t, s));
                if a.is_positive() || b.is_positive() || (a.is_zero() != b.is_zero()) {
                    return Err(bad(format!("Cartan entries ({s},{t}) must be nonpositive and vanish together")));
                }
                let prod = &a * &b;
                match self.system.matrix().bond(s, t) {
                    Bond::Finite(m) => {
                        let want = match m {
                            2 => 0,
                            3 => 1,
                            4 => 2,
                            6 => 3,
                            _ => unreachable!(),
                        };
                        if prod != q(want) {
                            return Err(bad(format!("a({s},{t})·a({t},{s}) = {prod}, expected {want} for m = {m}")));
                        }
                        if m % 2 == 1 && a != b {
                            return Err(bad(format!("unbalanced: a({s},{t}) = {a} but a({t},{s}) = {b} with m = {m}")));
                        }
                        // (st)^m acts trivially on the basis.
                        let word: Vec<usize> = std::iter::repeat_n([s, t], m as usize).flatten().collect();
                        let mat = self.word_images(&word);
                        for (j, img) in mat.iter().enumerate() {
                            if *img != Poly::var(self.dim(), j) {
                                return Err(bad(format!("(s{s} s{t})^{m} does not act trivially")));
                            }
                        }
                    }
                    Bond::Infinite => {
                        if prod < q(4) {
                            return Err(bad(format!("a({s},{t})·a({t},{s}) must be at least 4 for m = ∞")));
                        }
                    }
                }
            }
        }
        self.check_faithful()
    }

    /// Injectivity of the action on each maximal finitary parabolic.
    fn check_faithful(&self) -> Result<(), PolyError> {
        let all = self.system.all();
        let finitary: Vec<GenSet> = all.subsets().filter(|&i| matches!(self.system.is_finitary(i), Ok(true))).collect();
        for &i in &finitary {
            if finitary.iter().any(|&j| j != i && i.is_subset(j)) {
                continue;
            }
            let p = self.system.parabolic(i)?;
            let mut seen = std::collections::HashSet::new();
            for w in &p.elements {
                let images: Vec<String> = self.word_images(w.word()).iter().map(|p| format!("{p:?}")).collect();
                if !seen.insert(images) {
                    return Err(PolyError::InvalidRealization(format!("action of W_{i:?} is not faithful")));
                }
            }
        }
        Ok(())
    }

    /// The permutation realization of `S_n` on `x_1..x_n`,
    /// with `α_i = x_i − x_{i+1}`.
    pub fn permutation(n: usize) -> Result<Self, PolyError> {
        if n < 2 {
            return Err(PolyError::InvalidRealization("permutation realization needs n ≥ 2".into()));
        }
        let system = Arc::new(CoxeterSystem::named(&format!("A{}", n - 1))?);
        let mut roots = Vec::new();
        for i in 0..n - 1 {
            let mut v = vec![Q::zero(); n];
            v[i] = q(1);
            v[i + 1] = q(-1);
            roots.push(v);
        }
        let coroots = roots.clone();
        Self::new(format!("permutation S{n}"), system, roots, coroots)
    }

    /// Realization spanned by simple roots, with the symmetric Cartan matrix
    /// for simply-laced bonds and `(−1,−2)`, `(−1,−3)`, `(−2,−2)` for
    /// m = 4, 6, ∞.
    pub fn geometric(system: Arc<CoxeterSystem>) -> Result<Self, PolyError> {
        let n = system.rank();
        let roots: Vec<Vec<Q>> = (0..n)
            .map(|s| {
                let mut v = vec![Q::zero(); n];
                v[s] = q(1);
                v
            })
            .collect();
        let coroots = (0..n).map(|s| (0..n).map(|t| q(system.cartan(s, t))).collect()).collect();
        let name = format!("geometric {:?}", system.labels());
        Self::new(name, system, roots, coroots)
    }

    /// Geometric realization of a named type.
    pub fn geometric_named(name: &str) -> Result<Self, PolyError> {
        let mut rz = Self::geometric(Arc::new(CoxeterSystem::named(name)?))?;
        rz.name = format!("geometric {name}");
        Ok(rz)
    }

    /// The affine `Ã_1` Cartan matrix `(2, −2; −2, 2)` on the span of the roots.
    pub fn affine_a1() -> Result<Self, PolyError> {
        let mut rz = Self::geometric(Arc::new(CoxeterSystem::named("A~1")?))?;
        rz.name = "affine A~1".into();
        Ok(rz)
    }

    /// Built-in realizations by name: `perm:<n>`, `geometric:<type>`, `affine-A1`.
    pub fn builtin(name: &str) -> Result<Self, PolyError> {
        if let Some(n) = name.strip_prefix("perm:") {
            let n: usize = n.parse().map_err(|_| PolyError::InvalidRealization(format!("bad size in {name:?}")))?;
            return Self::permutation(n);
        }
        if let Some(t) = name.strip_prefix("geometric:") {
            return Self::geometric_named(t);
        }
        if name == "affine-A1" || name == "A~1" {
            return Self::affine_a1();
        }
        Err(PolyError::InvalidRealization(format!("unknown built-in realization {name:?}")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn system(&self) -> &CoxeterSystem {
        &self.system
    }

    pub fn system_arc(&self) -> &Arc<CoxeterSystem> {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.roots[0].len()
    }

    pub fn root(&self, s: usize) -> &[Q] {
        &self.roots[s]
    }

    pub fn coroot(&self, s: usize) -> &[Q] {
        &self.coroots[s]
    }

    pub fn root_poly(&self, s: usize) -> Poly {
        Poly::linear(&self.roots[s])
    }

    /// `<α_s^∨, α_t>`.
    pub fn cartan(&self, s: usize, t: usize) -> Q {
        self.coroots[s].iter().zip(&self.roots[t]).map(|(a, b)| a * b).sum()
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.dim())
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.dim())
    }

    /// Images of the basis vectors under the product of generators along `word`.
    fn word_images(&self, word: &[usize]) -> Vec<Poly> {
        let dim = self.dim();
        let mut images: Vec<Poly> = (0..dim).map(|j| Poly::var(dim, j)).collect();
        // w = s_1 ⋯ s_k, so w(e_j) = s_1(⋯ s_k(e_j)): apply the innermost first.
        for &s in word.iter().rev() {
            images = images.iter().map(|p| p.substitute(&self.reflections[s])).collect();
        }
        images
    }

    pub fn act_generator(&self, s: usize, f: &Poly) -> Poly {
        f.substitute(&self.reflections[s])
    }

    /// `w(f)`: substitute each basis vector by its image under `w`.
    pub fn act(&self, w: &GroupElement, f: &Poly) -> Result<Poly, PolyError> {
        if w.system_id() != self.system.id() {
            return Err(PolyError::MismatchedRealization);
        }
        if f.nvars() != self.dim() {
            return Err(PolyError::DimensionMismatch(f.nvars(), self.dim()));
        }
        Ok(f.substitute(&self.word_images(w.word())))
    }

    /// `f ∈ R^I`: checked on generators of `I`.
    pub fn is_invariant(&self, f: &Poly, set: GenSet) -> bool {
        set.iter().all(|s| self.act_generator(s, f) == *f)
    }

    /// Subspace test for `H_s = H_t`, i.e. proportional coroots.
    pub fn same_hyperplane(&self, s: usize, t: usize) -> bool {
        let a = &self.coroots[s];
        let b = &self.coroots[t];
        (0..a.len()).all(|i| (i..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn divide_examples() {
        let n = 3;
        let a = &x(n, 0) - &x(n, 1);
        assert_eq!((&a * &a).divide_by_linear(&a).unwrap(), a);
        let diff = &(&x(n, 0) * &x(n, 0)) - &(&x(n, 1) * &x(n, 1));
        assert_eq!(diff.divide_by_linear(&a).unwrap(), &x(n, 0) + &x(n, 1));
        let f = &a + &x(n, 2);
        assert!(matches!(f.divide_by_linear(&a), Err(PolyError::NotDivisible { .. })));
        assert!(matches!(f.divide_by_linear(&Poly::one(n)), Err(PolyError::BadDivisor)));
    }

    #[test]
    fn permutation_action() {
        let rz = Realization::permutation(3).unwrap();
        let sys = rz.system();
        let s1 = sys.generator(0).unwrap();
        assert_eq!(rz.act(&s1, &x(3, 0)).unwrap(), x(3, 1));
        assert_eq!(rz.act(&sys.identity(), &x(3, 2)).unwrap(), x(3, 2));
        let a = rz.root_poly(0);
        assert_eq!(rz.act(&s1, &a).unwrap(), -&a);
        assert_eq!(rz.cartan(0, 1), q(-1));
        assert_eq!(rz.cartan(1, 0), q(-1));
    }

    #[test]
    fn action_is_multiplicative_on_s3() {
        let rz = Realization::permutation(3).unwrap();
        let sys = rz.system();
        let elems = sys.parabolic(sys.all()).unwrap().elements.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = Poly::random(&mut rng, 3, 4, 6);
        for a in &elems {
            for b in &elems {
                let ab = sys.multiply(a, b).unwrap();
                assert_eq!(rz.act(&ab, &f).unwrap(), rz.act(a, &rz.act(b, &f).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn invariance() {
        let rz = Realization::permutation(4).unwrap();
        let all = rz.system().all();
        assert!(rz.is_invariant(&Poly::constant(4, q(7)), all));
        let e1 = (0..4).fold(Poly::zero(4), |acc, i| &acc + &x(4, i));
        assert!(rz.is_invariant(&e1, all));
        assert!(!rz.is_invariant(&rz.root_poly(0), GenSet::singleton(0)));
    }

    #[test]
    fn builtin_realizations_validate() {
        for name in ["perm:4", "geometric:A3", "geometric:B3", "geometric:D4", "geometric:G2", "affine-A1", "geometric:I2(4)"] {
            Realization::builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unbalanced_rejected() {
        let sys = Arc::new(CoxeterSystem::named("A2").unwrap());
        let roots = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let coroots = vec![vec![q(2), qf(-1, 2)], vec![q(-2), q(2)]];
        let err = Realization::new("bad", sys, roots, coroots).unwrap_err();
        assert!(err.to_string().contains("unbalanced"), "{err}");
    }

    #[test]
    fn json_roundtrip_order() {
        let p = &(&x(2, 0) * &x(2, 0)).scale(&qf(1, 2)) - &x(2, 1);
        let s = p.to_json();
        assert!(s.starts_with(r#"[{"exp":[2,0],"num":"1","den":"2"}"#), "{s}");
        assert_eq!(Poly::from_json(2, &s).unwrap(), p);
        assert!(Poly::from_json(3, &s).is_err());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(4, 3).len(), 20);
        assert_eq!(monomials_up_to(3, 2).len(), 10);
    }

    proptest::proptest! {
        #[test]
        fn divide_roundtrip(seed in 0u64..1000, lin in proptest::collection::vec(-3i64..=3, 3)) {
            proptest::prop_assume!(lin.iter().any(|&c| c != 0));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Poly::random(&mut rng, 3, 5, 6);
            let lambda = Poly::linear(&lin.iter().map(|&c| q(c)).collect::<Vec<_>>());
            proptest::prop_assert_eq!((&f * &lambda).divide_by_linear(&lambda).unwrap(), f);
        }
    }
}
