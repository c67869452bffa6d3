//! Parabolic double cosets `W_I \ W / W_J`.
//!
//! A coset is the triple `(I, J, p̲)`: two cosets with the same underlying
//! set but different parabolic pair are different values.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::coxeter::{CoxeterError, CoxeterSystem, GroupElement, Side};
use crate::genset::GenSet;

#[derive(Clone)]
pub struct DoubleCoset {
    left: GenSet,
    right: GenSet,
    pmin: GroupElement,
    pmax: GroupElement,
    leftred: GenSet,
    rightred: GenSet,
}

impl PartialEq for DoubleCoset {
    fn eq(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right && self.pmin == other.pmin
    }
}

impl Eq for DoubleCoset {}

impl Hash for DoubleCoset {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.left.hash(state);
        self.right.hash(state);
        self.pmin.hash(state);
    }
}

impl PartialOrd for DoubleCoset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DoubleCoset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.left, self.right, &self.pmin).cmp(&(other.left, other.right, &other.pmin))
    }
}

impl fmt::Debug for DoubleCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?})-coset of {:?}", self.left, self.right, self.pmin)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetJson {
    #[serde(rename = "I")]
    pub left: GenSet,
    #[serde(rename = "J")]
    pub right: GenSet,
    pub pmin: Vec<usize>,
}

impl DoubleCoset {
    /// The left parabolic subset `I`.
    pub fn left(&self) -> GenSet {
        self.left
    }

    /// The right parabolic subset `J`.
    pub fn right(&self) -> GenSet {
        self.right
    }

    pub fn pmin(&self) -> &GroupElement {
        &self.pmin
    }

    pub fn pmax(&self) -> &GroupElement {
        &self.pmax
    }

    pub fn left_redundancy(&self) -> GenSet {
        self.leftred
    }

    pub fn right_redundancy(&self) -> GenSet {
        self.rightred
    }

    pub fn to_json(&self) -> CosetJson {
        CosetJson { left: self.left, right: self.right, pmin: self.pmin.word().to_vec() }
    }
}

/// Greedy stripping of left descents in `I` and right descents in `J`.
fn strip_to_min(sys: &CoxeterSystem, w: &GroupElement, left: GenSet, right: GenSet) -> Result<GroupElement, CoxeterError> {
    let mut x = w.clone();
    loop {
        if let Some(s) = left.iter().find(|&s| sys.is_descent(&x, s, Side::Left)) {
            x = sys.multiply(&sys.generator(s)?, &x)?;
        } else if let Some(s) = right.iter().find(|&s| sys.is_descent(&x, s, Side::Right)) {
            x = sys.multiply(&x, &sys.generator(s)?)?;
        } else {
            return Ok(x);
        }
    }
}

/// `I ∩ x J x⁻¹`, by conjugating each generator of `J`.
fn conjugate_meet(sys: &CoxeterSystem, x: &GroupElement, left: GenSet, right: GenSet) -> Result<GenSet, CoxeterError> {
    let mut out = GenSet::EMPTY;
    for t in right.iter() {
        if let Some(s) = sys.conjugate_to_generator(x, t)? {
            if left.contains(s) {
                out = out.with(s);
            }
        }
    }
    Ok(out)
}

/// Builds the `(I, J)`-coset with the given minimal element.
///
/// Fails with `NotFinitary` if `I` or `J` is not finitary; panics if `pmin`
/// is not minimal, which signals a caller bug.
pub fn from_min(sys: &CoxeterSystem, left: GenSet, right: GenSet, pmin: GroupElement) -> Result<DoubleCoset, CoxeterError> {
    let w_left = sys.longest_element(left)?;
    let w_right = sys.longest_element(right)?;
    assert!(
        left.iter().all(|s| !sys.is_descent(&pmin, s, Side::Left)) && right.iter().all(|s| !sys.is_descent(&pmin, s, Side::Right)),
        "{pmin:?} is not minimal in its ({left:?},{right:?})-coset"
    );
    let leftred = conjugate_meet(sys, &pmin, left, right)?;
    let rightred = conjugate_meet(sys, &sys.inverse(&pmin), right, left)?;
    let w_lr = sys.longest_element(leftred)?;
    let w_rr = sys.longest_element(rightred)?;

    // p̄ = w_I . p̲ . (w_rightred⁻¹ w_J) = (w_I w_leftred⁻¹) . p̲ . w_J
    let tail = sys.multiply(&w_rr, &w_right)?;
    let pmax = sys.product([&w_left, &pmin, &tail])?;
    let head = sys.multiply(&w_left, &w_lr)?;
    let other = sys.product([&head, &pmin, &w_right])?;
    assert_eq!(pmax, other, "the two factorizations of the maximal element disagree");
    assert_eq!(pmax.length(), w_left.length() + pmin.length() + tail.length());
    assert_eq!(pmax.length(), head.length() + pmin.length() + w_right.length());
    assert_eq!(tail.length(), w_right.length() - w_rr.length());
    assert_eq!(head.length(), w_left.length() - w_lr.length());

    Ok(DoubleCoset { left, right, pmin, pmax, leftred, rightred })
}

/// The `(I, J)`-coset containing `w`.
pub fn coset_of(sys: &CoxeterSystem, w: &GroupElement, left: GenSet, right: GenSet) -> Result<DoubleCoset, CoxeterError> {
    let pmin = strip_to_min(sys, w, left, right)?;
    from_min(sys, left, right, pmin)
}

pub fn from_json(sys: &CoxeterSystem, json: &CosetJson) -> Result<DoubleCoset, CoxeterError> {
    let w = sys.element(&json.pmin)?;
    coset_of(sys, &w, json.left, json.right)
}

/// The core: the `(leftred, rightred)`-coset with the same minimal element.
pub fn core(sys: &CoxeterSystem, p: &DoubleCoset) -> Result<DoubleCoset, CoxeterError> {
    let c = from_min(sys, p.leftred, p.rightred, p.pmin.clone())?;
    assert_eq!(c.leftred, p.leftred, "core changes the left redundancy");
    assert_eq!(c.rightred, p.rightred, "core changes the right redundancy");
    Ok(c)
}

/// Left and right descent sets of `p̄`.
pub fn coset_descents(sys: &CoxeterSystem, p: &DoubleCoset) -> (GenSet, GenSet) {
    let l = sys.descents(&p.pmax, Side::Left);
    let r = sys.descents(&p.pmax, Side::Right);
    assert!(p.left.is_subset(l) && p.right.is_subset(r), "descent sets of {p:?} miss I or J");
    (l, r)
}

/// All elements `x p̲ y` with `x ∈ W_I`, `y ∈ W_J`, sorted.
pub fn elements(sys: &CoxeterSystem, p: &DoubleCoset) -> Result<Vec<GroupElement>, CoxeterError> {
    let wl = sys.parabolic(p.left)?;
    let wr = sys.parabolic(p.right)?;
    let mut out = BTreeSet::new();
    for x in &wl.elements {
        let xp = sys.multiply(x, &p.pmin)?;
        for y in &wr.elements {
            out.insert(sys.multiply(&xp, y)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// All `(I, J)`-cosets in `W_L`, ordered by `(ℓ(p̲), canonical word)`.
pub fn enumerate_cosets_in(sys: &CoxeterSystem, left: GenSet, right: GenSet, ambient: GenSet) -> Result<Vec<DoubleCoset>, CoxeterError> {
    assert!(left.union(right).is_subset(ambient), "I and J must lie in the ambient subset");
    let group = sys.parabolic(ambient)?;
    let mut mins = BTreeSet::new();
    for w in &group.elements {
        mins.insert(strip_to_min(sys, w, left, right)?);
    }
    mins.into_iter().map(|m| from_min(sys, left, right, m)).collect()
}

/// All `(I, J)`-cosets of the (finite) ambient group.
pub fn enumerate_cosets(sys: &CoxeterSystem, left: GenSet, right: GenSet) -> Result<Vec<DoubleCoset>, CoxeterError> {
    enumerate_cosets_in(sys, left, right, sys.all())
}

/// The `(I, J)`-coset containing the identity.
pub fn identity_coset(sys: &CoxeterSystem, left: GenSet, right: GenSet) -> Result<DoubleCoset, CoxeterError> {
    from_min(sys, left, right, sys.identity())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(xs: &[usize]) -> GenSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn s3_examples() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let (i, j) = (g(&[0]), g(&[1]));
        let e = sys.identity();
        assert!(coset_of(&sys, &e, i, j).unwrap().pmin().is_identity());
        let st = sys.element(&[0, 1]).unwrap();
        let p = coset_of(&sys, &st, i, j).unwrap();
        assert!(p.pmin().is_identity());
        assert_eq!(p.pmax(), &st);
        let sts = sys.element(&[0, 1, 0]).unwrap();
        let q = coset_of(&sys, &sts, i, j).unwrap();
        assert_eq!(q.pmin(), &sys.element(&[1, 0]).unwrap());
        assert_eq!(q.pmax(), &sts);
        assert_eq!(q.left_redundancy(), g(&[0]));
        assert_eq!(q.right_redundancy(), g(&[1]));
        let c = core(&sys, &q).unwrap();
        assert_eq!((c.left(), c.right()), (g(&[0]), g(&[1])));
        assert_eq!(coset_descents(&sys, &p), (g(&[0]), g(&[1])));
        assert_eq!(enumerate_cosets(&sys, i, j).unwrap().len(), 2);
        assert_eq!(enumerate_cosets(&sys, GenSet::EMPTY, GenSet::EMPTY).unwrap().len(), 6);
        assert_eq!(enumerate_cosets(&sys, sys.all(), sys.all()).unwrap().len(), 1);
    }

    #[test]
    fn minimal_coset_examples() {
        let sys = CoxeterSystem::named("A3").unwrap();
        let (i, j) = (g(&[0]), g(&[0, 1]));
        let p = identity_coset(&sys, i, j).unwrap();
        assert_eq!(p.pmax(), &sys.longest_element(j).unwrap());
        assert_eq!(p.left_redundancy(), i.intersection(j));
        let c = core(&sys, &p).unwrap();
        assert_eq!((c.left(), c.right()), (i, i));
        assert_eq!(core(&sys, &c).unwrap(), c);
        assert!(identity_coset(&sys, GenSet::EMPTY, j).unwrap().left_redundancy().is_empty());
    }

    #[test]
    fn same_set_different_pair_are_distinct() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let a = identity_coset(&sys, sys.all(), sys.all()).unwrap();
        let b = identity_coset(&sys, sys.all(), g(&[0])).unwrap();
        assert_eq!(elements(&sys, &a).unwrap(), elements(&sys, &b).unwrap());
        assert_ne!(a, b);
    }

    #[test]
    fn not_finitary() {
        let sys = CoxeterSystem::named("A~1").unwrap();
        assert!(matches!(coset_of(&sys, &sys.identity(), sys.all(), GenSet::EMPTY), Err(CoxeterError::NotFinitary(_))));
        assert!(enumerate_cosets(&sys, GenSet::EMPTY, GenSet::EMPTY).is_err());
    }
}
