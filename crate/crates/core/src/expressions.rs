//! Singular expressions: singlestep sequences of finitary subsets and their
//! multistep (local extrema) form.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::cosets::{self, DoubleCoset};
use crate::coxeter::{CoxeterError, CoxeterSystem, GroupElement};
use crate::genset::GenSet;

/// Default cap on the number of partial expressions visited by enumeration.
pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("expression is empty")]
    Empty,
    #[error("subsets at positions {0} and the next do not differ by exactly one generator")]
    NotAdjacent(usize),
    #[error("subset {0:?} in the expression is not finitary")]
    NotFinitary(GenSet),
    #[error("multistep chain is not alternating at position {0}")]
    NotAlternating(usize),
    #[error("expressions are not composable: {0:?} != {1:?}")]
    NotComposable(GenSet, GenSet),
    #[error("right subset {0:?} of the first coset differs from left subset {1:?} of the second")]
    MiddleMismatch(GenSet, GenSet),
    #[error("cannot parse expression: {0}")]
    Parse(String),
    #[error("search exceeded its budget of {0} nodes")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// A single step of a singlestep expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Up(usize),
    Down(usize),
}

impl Step {
    pub fn generator(self) -> usize {
        match self {
            Step::Up(s) | Step::Down(s) => s,
        }
    }

    pub fn apply(self, set: GenSet) -> GenSet {
        match self {
            Step::Up(s) => set.with(s),
            Step::Down(s) => set.without(s),
        }
    }
}

/// `[I_0, …, I_d]` with consecutive subsets differing by one generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expression {
    sets: Vec<GenSet>,
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The `+/-` notation, with generators as 0-based indices.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}", self.sets[0])?;
        for st in self.steps() {
            match st {
                Step::Up(s) => write!(f, " + {s}")?,
                Step::Down(s) => write!(f, " - {s}")?,
            }
        }
        write!(f, "]")
    }
}

fn check_finitary(sys: &CoxeterSystem, set: GenSet) -> Result<(), ExprError> {
    if set.iter().any(|s| s >= sys.rank()) {
        return Err(CoxeterError::GeneratorOutOfRange(set.iter().max().unwrap_or(0)).into());
    }
    if !sys.is_finitary(set)? {
        return Err(ExprError::NotFinitary(set));
    }
    Ok(())
}

impl Expression {
    pub fn new(sys: &CoxeterSystem, sets: Vec<GenSet>) -> Result<Self, ExprError> {
        if sets.is_empty() {
            return Err(ExprError::Empty);
        }
        for (k, w) in sets.windows(2).enumerate() {
            if w[0].single_difference(w[1]).is_none() {
                return Err(ExprError::NotAdjacent(k));
            }
        }
        for &set in &sets {
            check_finitary(sys, set)?;
        }
        Ok(Expression { sets })
    }

    /// The width-0 expression `[I]`.
    pub fn trivial(sys: &CoxeterSystem, set: GenSet) -> Result<Self, ExprError> {
        Self::new(sys, vec![set])
    }

    pub fn from_steps(sys: &CoxeterSystem, start: GenSet, steps: &[Step]) -> Result<Self, ExprError> {
        let mut sets = vec![start];
        for (k, st) in steps.iter().enumerate() {
            let cur = *sets.last().unwrap();
            let ok = match *st {
                Step::Up(s) => !cur.contains(s),
                Step::Down(s) => cur.contains(s),
            };
            if !ok || st.generator() >= sys.rank() {
                return Err(ExprError::NotAdjacent(k));
            }
            sets.push(st.apply(cur));
        }
        Self::new(sys, sets)
    }

    pub fn sets(&self) -> &[GenSet] {
        &self.sets
    }

    pub fn width(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn first(&self) -> GenSet {
        self.sets[0]
    }

    pub fn last(&self) -> GenSet {
        *self.sets.last().unwrap()
    }

    pub fn steps(&self) -> Vec<Step> {
        self.sets
            .windows(2)
            .map(|w| {
                let s = w[0].single_difference(w[1]).expect("adjacent subsets");
                if w[1].contains(s) {
                    Step::Up(s)
                } else {
                    Step::Down(s)
                }
            })
            .collect()
    }

    pub fn reverse(&self) -> Expression {
        let mut sets = self.sets.clone();
        sets.reverse();
        Expression { sets }
    }

    pub fn concatenate(&self, other: &Expression) -> Result<Expression, ExprError> {
        if self.last() != other.first() {
            return Err(ExprError::NotComposable(self.last(), other.first()));
        }
        let mut sets = self.sets.clone();
        sets.extend_from_slice(&other.sets[1..]);
        Ok(Expression { sets })
    }

    /// The contiguous subword `[I_a, …, I_b]`.
    pub fn subword(&self, a: usize, b: usize) -> Expression {
        Expression { sets: self.sets[a..=b].to_vec() }
    }

    /// Replaces `[I_a, …, I_b]` by `rep`, whose endpoints must match.
    pub fn splice(&self, a: usize, b: usize, rep: &Expression) -> Expression {
        assert_eq!(self.sets[a], rep.first());
        assert_eq!(self.sets[b], rep.last());
        let mut sets = self.sets[..a].to_vec();
        sets.extend_from_slice(&rep.sets);
        sets.extend_from_slice(&self.sets[b + 1..]);
        Expression { sets }
    }

    pub fn to_multistep(&self) -> MultistepExpression {
        #[derive(PartialEq)]
        enum Phase {
            Start,
            Rising,
            Falling,
        }
        let mut bottoms = vec![self.sets[0]];
        let mut tops = Vec::new();
        let mut phase = Phase::Start;
        for k in 1..self.sets.len() {
            let up = self.sets[k - 1].is_subset(self.sets[k]);
            match (&phase, up) {
                (Phase::Start, true) | (Phase::Falling, true) => {
                    if phase == Phase::Falling {
                        bottoms.push(self.sets[k - 1]);
                    }
                    phase = Phase::Rising;
                }
                (Phase::Start, false) | (Phase::Rising, false) => {
                    tops.push(self.sets[k - 1]);
                    phase = Phase::Falling;
                }
                _ => {}
            }
        }
        match phase {
            Phase::Start => {}
            Phase::Rising => {
                tops.push(self.last());
                bottoms.push(self.last());
            }
            Phase::Falling => bottoms.push(self.last()),
        }
        MultistepExpression::absorbed(bottoms, tops)
    }

    pub fn element(&self, sys: &CoxeterSystem) -> Result<GroupElement, ExprError> {
        self.to_multistep().element(sys)
    }

    pub fn alternating_length(&self, sys: &CoxeterSystem) -> Result<usize, ExprError> {
        self.to_multistep().alternating_length(sys)
    }

    pub fn is_reduced(&self, sys: &CoxeterSystem) -> Result<bool, ExprError> {
        self.to_multistep().is_reduced(sys)
    }

    /// The accumulated `⋆`-product: starts at `w_{I_0}` and is `⋆`-multiplied by
    /// `w_{I_k}` at every up-step.
    pub fn star_fold(&self, sys: &CoxeterSystem) -> Result<GroupElement, ExprError> {
        let mut acc = sys.longest_element(self.first())?;
        for w in self.sets.windows(2) {
            if w[0].is_subset(w[1]) {
                acc = sys.star_product(&acc, &sys.longest_element(w[1])?)?;
            }
        }
        Ok(acc)
    }

    /// The `(I_0, I_d)`-coset expressed by the expression.
    ///
    /// The maximal element is the `⋆`-fold; for reduced expressions this agrees
    /// with the product element.
    pub fn expressed_coset(&self, sys: &CoxeterSystem) -> Result<DoubleCoset, ExprError> {
        let acc = self.star_fold(sys)?;
        let p = cosets::coset_of(sys, &acc, self.first(), self.last())?;
        assert_eq!(p.pmax(), &acc, "the ⋆-fold of {self} is not maximal in its coset");
        Ok(p)
    }

    /// Parses the `+/-` notation, e.g. `[{0,2} + 1 - 0]` or `[∅ + s1 − s2]`.
    ///
    /// Generators may be given by 0-based index or by label.
    pub fn parse(sys: &CoxeterSystem, text: &str) -> Result<Expression, ExprError> {
        let err = |m: &str| ExprError::Parse(format!("{m} in {text:?}"));
        let body = text.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(|| err("missing brackets"))?;
        let body = body.trim();
        let (start, rest) = if let Some(r) = body.strip_prefix('∅') {
            (GenSet::EMPTY, r)
        } else if let Some(r) = body.strip_prefix('{') {
            let close = r.find('}').ok_or_else(|| err("unclosed '{'"))?;
            let mut set = GenSet::EMPTY;
            for tok in r[..close].split(',').map(str::trim).filter(|t| !t.is_empty()) {
                set = set.with(parse_generator(sys, tok).ok_or_else(|| err(&format!("unknown generator {tok:?}")))?);
            }
            (set, &r[close + 1..])
        } else {
            return Err(err("expected a starting subset"));
        };
        let mut steps = Vec::new();
        let mut rest = rest.trim_start();
        while !rest.is_empty() {
            let (up, r) = if let Some(r) = rest.strip_prefix('+') {
                (true, r)
            } else if let Some(r) = rest.strip_prefix('-').or_else(|| rest.strip_prefix('−')) {
                (false, r)
            } else {
                return Err(err("expected '+' or '-'"));
            };
            let r = r.trim_start();
            let end = r.find(|c: char| c.is_whitespace() || c == '+' || c == '-' || c == '−').unwrap_or(r.len());
            let tok = &r[..end];
            let s = parse_generator(sys, tok).ok_or_else(|| err(&format!("unknown generator {tok:?}")))?;
            steps.push(if up { Step::Up(s) } else { Step::Down(s) });
            rest = r[end..].trim_start();
        }
        Expression::from_steps(sys, start, &steps)
    }

    /// JSON form: a list of generator-index arrays.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(&self.sets).expect("subsets serialize")
    }

    pub fn from_json_value(sys: &CoxeterSystem, v: &serde_json::Value) -> Result<Expression, ExprError> {
        let sets: Vec<GenSet> = serde_json::from_value(v.clone()).map_err(|e| ExprError::Parse(e.to_string()))?;
        Expression::new(sys, sets)
    }
}

fn parse_generator(sys: &CoxeterSystem, tok: &str) -> Option<usize> {
    if let Some(i) = sys.labels().iter().position(|l| l == tok) {
        return Some(i);
    }
    tok.parse::<usize>().ok().filter(|&i| i < sys.rank())
}

/// `I_0 ⊆ K_1 ⊇ I_1 ⊆ … ⊆ K_m ⊇ I_m` with internal equalities absorbed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultistepExpression {
    bottoms: Vec<GenSet>,
    tops: Vec<GenSet>,
}

impl MultistepExpression {
    pub fn new(sys: &CoxeterSystem, bottoms: Vec<GenSet>, tops: Vec<GenSet>) -> Result<Self, ExprError> {
        if bottoms.len() != tops.len() + 1 {
            return Err(ExprError::NotAlternating(0));
        }
        for (j, &k) in tops.iter().enumerate() {
            if !bottoms[j].is_subset(k) || !bottoms[j + 1].is_subset(k) {
                return Err(ExprError::NotAlternating(j));
            }
        }
        for &set in bottoms.iter().chain(&tops) {
            check_finitary(sys, set)?;
        }
        Ok(Self::absorbed(bottoms, tops))
    }

    fn absorbed(mut bottoms: Vec<GenSet>, mut tops: Vec<GenSet>) -> Self {
        loop {
            let m = tops.len();
            let hit = (0..m).find_map(|j| {
                if (tops[j] == bottoms[j] && tops[j] == bottoms[j + 1]) || (tops[j] == bottoms[j + 1] && j + 1 < m) {
                    Some((j, j + 1))
                } else if tops[j] == bottoms[j] && j > 0 {
                    Some((j, j))
                } else {
                    None
                }
            });
            match hit {
                Some((t, b)) => {
                    tops.remove(t);
                    bottoms.remove(b);
                }
                None => return MultistepExpression { bottoms, tops },
            }
        }
    }

    pub fn bottoms(&self) -> &[GenSet] {
        &self.bottoms
    }

    pub fn tops(&self) -> &[GenSet] {
        &self.tops
    }

    /// `w_{K_1} w_{I_1}^{-1} w_{K_2} ⋯ w_{K_m}`, or `w_{I_0}` for `[I_0]`.
    pub fn element(&self, sys: &CoxeterSystem) -> Result<GroupElement, ExprError> {
        if self.tops.is_empty() {
            return Ok(sys.longest_element(self.bottoms[0])?);
        }
        let mut acc = sys.identity();
        for (j, &k) in self.tops.iter().enumerate() {
            if j > 0 {
                acc = sys.multiply(&acc, &sys.inverse(&sys.longest_element(self.bottoms[j])?))?;
            }
            acc = sys.multiply(&acc, &sys.longest_element(k)?)?;
        }
        Ok(acc)
    }

    /// `ℓ(K_1) − ℓ(I_1) + ℓ(K_2) − ⋯ + ℓ(K_m)`.
    pub fn alternating_length(&self, sys: &CoxeterSystem) -> Result<usize, ExprError> {
        if self.tops.is_empty() {
            return Ok(sys.parabolic_length(self.bottoms[0])?);
        }
        let mut total = 0usize;
        for (j, &k) in self.tops.iter().enumerate() {
            if j > 0 {
                total -= sys.parabolic_length(self.bottoms[j])?;
            }
            total += sys.parabolic_length(k)?;
        }
        Ok(total)
    }

    pub fn is_reduced(&self, sys: &CoxeterSystem) -> Result<bool, ExprError> {
        Ok(self.element(sys)?.length() == self.alternating_length(sys)?)
    }

    /// A singlestep refinement: each climb adds generators in increasing
    /// order, each descent removes them in increasing order.
    pub fn to_singlestep(&self) -> Expression {
        let mut sets = vec![self.bottoms[0]];
        for (j, &k) in self.tops.iter().enumerate() {
            let mut cur = *sets.last().unwrap();
            for s in k.difference(cur).iter() {
                cur = cur.with(s);
                sets.push(cur);
            }
            for s in k.difference(self.bottoms[j + 1]).iter() {
                cur = cur.without(s);
                sets.push(cur);
            }
        }
        Expression { sets }
    }
}

/// The reduced composition `p.q`, if `p̄ w_J⁻¹ q̄` is length-additive in both
/// bracketings.
pub fn reduced_composition(sys: &CoxeterSystem, p: &DoubleCoset, q: &DoubleCoset) -> Result<Option<DoubleCoset>, ExprError> {
    if p.right() != q.left() {
        return Err(ExprError::MiddleMismatch(p.right(), q.left()));
    }
    let wj = sys.longest_element(p.right())?;
    let a = sys.multiply(&wj, q.pmax())?;
    let b = sys.multiply(p.pmax(), &wj)?;
    let r = sys.multiply(p.pmax(), &a)?;
    let ok = r.length() == p.pmax().length() + a.length() && r.length() == b.length() + q.pmax().length();
    if !ok {
        return Ok(None);
    }
    let c = cosets::coset_of(sys, &r, p.left(), q.right())?;
    assert_eq!(c.pmax(), &r, "reduced composition is not maximal in its coset");
    Ok(Some(c))
}

/// All reduced singlestep expressions for `p`, sorted by width and then by
/// the subset sequence.
///
/// Breadth-first over single steps. A prefix ending at `X` with product
/// element `x` is kept only while it is reduced and `x` is a prefix of `p̄`
/// in the right weak order. An up-step to `Xs` multiplies `x` by
/// `w_X w_{Xs}`; a down-step leaves `x` unchanged.
pub fn reduced_expressions_of(sys: &CoxeterSystem, p: &DoubleCoset, max_width: Option<usize>, budget: usize) -> Result<Vec<Expression>, ExprError> {
    let target = p.pmax();
    let n = sys.rank();
    let is_prefix = |x: &GroupElement| -> Result<bool, ExprError> {
        let rest = sys.multiply(&sys.inverse(x), target)?;
        Ok(rest.length() + x.length() == target.length())
    };
    let start = sys.longest_element(p.left())?;
    let mut out = Vec::new();
    let mut visited = 0usize;
    let mut queue: VecDeque<(Vec<GenSet>, GroupElement)> = VecDeque::new();
    if is_prefix(&start)? {
        queue.push_back((vec![p.left()], start));
    }
    while let Some((path, x)) = queue.pop_front() {
        visited += 1;
        if visited > budget {
            return Err(ExprError::BudgetExceeded(budget));
        }
        let cur = *path.last().unwrap();
        if cur == p.right() && &x == target {
            out.push(Expression { sets: path.clone() });
        }
        if max_width.is_some_and(|w| path.len() > w) {
            continue;
        }
        let w_cur = sys.longest_element(cur)?;
        for s in 0..n {
            if cur.contains(s) {
                let mut next = path.clone();
                next.push(cur.without(s));
                queue.push_back((next, x.clone()));
            } else {
                let up = cur.with(s);
                if !sys.is_finitary(up)? {
                    continue;
                }
                let w_up = sys.longest_element(up)?;
                let y = sys.product([&x, &w_cur, &w_up])?;
                if y.length() == x.length() + w_up.length() - w_cur.length() && is_prefix(&y)? {
                    let mut next = path.clone();
                    next.push(up);
                    queue.push_back((next, y));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.width(), &a.sets).cmp(&(b.width(), &b.sets)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(xs: &[usize]) -> GenSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn multistep_readoff() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let e = Expression::new(&sys, vec![g(&[]), g(&[0]), g(&[]), g(&[1]), g(&[])]).unwrap();
        let m = e.to_multistep();
        assert_eq!(m.bottoms(), &[g(&[]), g(&[]), g(&[])]);
        assert_eq!(m.tops(), &[g(&[0]), g(&[1])]);
        assert_eq!(e.element(&sys).unwrap(), sys.element(&[0, 1]).unwrap());
        let triv = Expression::trivial(&sys, g(&[0])).unwrap().to_multistep();
        assert!(triv.tops().is_empty());
        let full = Expression::parse(&sys, "[∅ + 0 + 1 - 0 - 1]").unwrap();
        assert_eq!(full.element(&sys).unwrap(), sys.element(&[0, 1, 0]).unwrap());
        assert!(full.is_reduced(&sys).unwrap());
    }

    #[test]
    fn absorption() {
        let sys = CoxeterSystem::named("A3").unwrap();
        let m = MultistepExpression::new(&sys, vec![g(&[]), g(&[0]), g(&[])], vec![g(&[0]), g(&[0, 1])]).unwrap();
        assert_eq!(m.tops(), &[g(&[0, 1])]);
        let m = MultistepExpression::new(&sys, vec![g(&[]), g(&[]), g(&[])], vec![g(&[0]), g(&[])]).unwrap();
        assert_eq!(m.tops(), &[g(&[0])]);
        assert_eq!(m.to_singlestep().to_multistep(), m);
    }

    #[test]
    fn reducedness_examples() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let v = Expression::parse(&sys, "[{0} - 0 + 0]").unwrap();
        assert!(!v.is_reduced(&sys).unwrap());
        let p = v.expressed_coset(&sys).unwrap();
        assert_eq!((p.left(), p.right()), (g(&[0]), g(&[0])));
        assert!(p.pmin().is_identity());
        assert!(Expression::parse(&sys, "[{0} + 1]").unwrap().is_reduced(&sys).unwrap());
        assert!(Expression::parse(&sys, "[{0,1} - 1]").unwrap().is_reduced(&sys).unwrap());
        assert!(Expression::parse(&sys, "[∅ + s1 − s1]").unwrap().is_reduced(&sys).unwrap());
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let sys = CoxeterSystem::named("A3").unwrap();
        let e = Expression::parse(&sys, "[{0,2} + 1 - 0]").unwrap();
        assert_eq!(e.sets(), &[g(&[0, 2]), g(&[0, 1, 2]), g(&[1, 2])]);
        assert_eq!(Expression::parse(&sys, &e.to_string()).unwrap(), e);
        assert!(Expression::parse(&sys, "[{0} + 0]").is_err());
        assert!(Expression::parse(&sys, "{0} + 1").is_err());
        let v = e.to_json_value();
        assert_eq!(Expression::from_json_value(&sys, &v).unwrap(), e);
        let aff = CoxeterSystem::named("A~1").unwrap();
        assert!(matches!(Expression::parse(&aff, "[∅ + 0 + 1]"), Err(ExprError::NotFinitary(_))));
    }

    #[test]
    fn concatenation_and_composition() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let a = Expression::parse(&sys, "[∅ + 0]").unwrap();
        let b = Expression::parse(&sys, "[{0} - 0]").unwrap();
        assert_eq!(a.concatenate(&b).unwrap().sets(), &[g(&[]), g(&[0]), g(&[])]);
        assert!(b.concatenate(&b).is_err());
        let s = cosets::coset_of(&sys, &sys.generator(0).unwrap(), GenSet::EMPTY, GenSet::EMPTY).unwrap();
        assert!(reduced_composition(&sys, &s, &s).unwrap().is_none());
        let id = cosets::identity_coset(&sys, g(&[0]), g(&[0])).unwrap();
        let q = cosets::coset_of(&sys, &sys.element(&[1, 0]).unwrap(), g(&[0]), GenSet::EMPTY).unwrap();
        assert_eq!(reduced_composition(&sys, &id, &q).unwrap().unwrap(), q);
    }

    #[test]
    fn enumeration_small() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let p = cosets::coset_of(&sys, &sys.element(&[0, 1, 0]).unwrap(), GenSet::EMPTY, GenSet::EMPTY).unwrap();
        let rex = reduced_expressions_of(&sys, &p, None, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(rex.contains(&Expression::parse(&sys, "[∅ + 0 + 1 - 0 - 1]").unwrap()));
        assert!(rex.contains(&Expression::parse(&sys, "[∅ + 0 - 0 + 1 - 1 + 0 - 0]").unwrap()));
        for e in &rex {
            assert!(e.is_reduced(&sys).unwrap());
            assert_eq!(e.expressed_coset(&sys).unwrap(), p);
        }
        let up = cosets::identity_coset(&sys, GenSet::EMPTY, sys.all()).unwrap();
        let rex = reduced_expressions_of(&sys, &up, None, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(rex.len(), 2);
    }
}
