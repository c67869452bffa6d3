//! Coxeter-system kernel.
//!
//! Elements are stored as integer matrices of their action on simple-root
//! coordinates, using a crystallographic Cartan matrix chosen per bond order.
//! The sign of `w(α_s)` decides descents, and every element carries its
//! ShortLex-minimal reduced word.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genset::{GenSet, MAX_GENERATORS};

pub const DEFAULT_ENUMERATION_CAP: usize = 50_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("invalid Coxeter matrix: {0}")]
    InvalidMatrix(String),
    #[error("unsupported bond order m({s},{t}) = {m}; only 2, 3, 4, 6 and infinity are supported")]
    UnsupportedOrder { s: usize, t: usize, m: u32 },
    #[error("elements belong to different Coxeter systems")]
    MismatchedSystems,
    #[error("generator index {0} out of range")]
    GeneratorOutOfRange(usize),
    #[error("parabolic subset {0:?} is not finitary")]
    NotFinitary(GenSet),
    #[error("enumeration of W_{subset:?} exceeded the cap of {cap} elements")]
    CapExceeded { subset: GenSet, cap: usize },
}

/// Order of the product `st` of two distinct generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bond {
    Finite(u32),
    Infinite,
}

impl Bond {
    pub fn finite(self) -> Option<u32> {
        match self {
            Bond::Finite(m) => Some(m),
            Bond::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterMatrix {
    m: Vec<Vec<Bond>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BondJson {
    Num(u32),
    Str(String),
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    labels: Vec<String>,
    m: Vec<Vec<BondJson>>,
}

impl CoxeterMatrix {
    pub fn new(m: Vec<Vec<Bond>>) -> Result<Self, CoxeterError> {
        let n = m.len();
        if n == 0 {
            return Err(CoxeterError::InvalidMatrix("empty matrix".into()));
        }
        if n > MAX_GENERATORS {
            return Err(CoxeterError::InvalidMatrix(format!("rank {n} exceeds {MAX_GENERATORS}")));
        }
        for (s, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(CoxeterError::InvalidMatrix(format!("row {s} has length {}, expected {n}", row.len())));
            }
            for (t, &b) in row.iter().enumerate() {
                if b != m[t][s] {
                    return Err(CoxeterError::InvalidMatrix(format!("not symmetric at ({s},{t})")));
                }
                if s == t {
                    if b != Bond::Finite(1) {
                        return Err(CoxeterError::InvalidMatrix(format!("diagonal entry ({s},{s}) must be 1")));
                    }
                } else if let Bond::Finite(v) = b {
                    if !matches!(v, 2 | 3 | 4 | 6) {
                        if v < 2 {
                            return Err(CoxeterError::InvalidMatrix(format!("off-diagonal entry ({s},{t}) must be at least 2")));
                        }
                        return Err(CoxeterError::UnsupportedOrder { s, t, m: v });
                    }
                }
            }
        }
        Ok(CoxeterMatrix { m })
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn bond(&self, s: usize, t: usize) -> Bond {
        self.m[s][t]
    }

    /// Coxeter matrices for the named types used throughout the crate:
    /// `A<n>`, `B<n>`, `D<n>`, `E6`-`E8`, `F4`, `G2`, `I2(<m>)` and `A~1`.
    pub fn named(name: &str) -> Result<Self, CoxeterError> {
        let bad = || CoxeterError::InvalidMatrix(format!("unknown type name {name:?}"));
        let name = name.trim();
        if name.eq_ignore_ascii_case("A~1") || name.eq_ignore_ascii_case("affine-A1") {
            return Self::dihedral(None);
        }
        if let Some(rest) = name.strip_prefix("I2(").and_then(|r| r.strip_suffix(')')) {
            if rest == "inf" {
                return Self::dihedral(None);
            }
            let m: u32 = rest.parse().map_err(|_| bad())?;
            return Self::dihedral(Some(m));
        }
        let (kind, n) = name.split_at(1);
        let n: usize = n.parse().map_err(|_| bad())?;
        match (kind, n) {
            ("A", n) if n >= 1 => Self::from_path(n, &[]),
            ("B" | "C", n) if n >= 2 => Self::from_path(n, &[(n - 2, 4)]),
            ("D", n) if n >= 4 => {
                let mut edges: Vec<(usize, usize, u32)> = (0..n - 2).map(|i| (i, i + 1, 3)).collect();
                edges.push((n - 3, n - 1, 3));
                Self::from_edges(n, &edges)
            }
            ("E", n @ 6..=8) => {
                // Bourbaki labelling: 1-3-4-5-..., 2 attached to 4.
                let mut edges = vec![(0, 2, 3), (1, 3, 3)];
                edges.extend((2..n - 1).map(|i| (i, i + 1, 3)));
                Self::from_edges(n, &edges)
            }
            ("F", 4) => Self::from_path(4, &[(1, 4)]),
            ("G", 2) => Self::dihedral(Some(6)),
            _ => Err(bad()),
        }
    }

    fn dihedral(m: Option<u32>) -> Result<Self, CoxeterError> {
        let b = m.map_or(Bond::Infinite, Bond::Finite);
        Self::new(vec![vec![Bond::Finite(1), b], vec![b, Bond::Finite(1)]])
    }

    /// Path diagram on `n` nodes; `special` overrides the label of edge `(i, i+1)`.
    fn from_path(n: usize, special: &[(usize, u32)]) -> Result<Self, CoxeterError> {
        let edges: Vec<_> = (0..n.saturating_sub(1))
            .map(|i| {
                let m = special.iter().find(|(e, _)| *e == i).map_or(3, |&(_, m)| m);
                (i, i + 1, m)
            })
            .collect();
        Self::from_edges(n, &edges)
    }

    fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self, CoxeterError> {
        let mut m = vec![vec![Bond::Finite(2); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Bond::Finite(1);
        }
        for &(a, b, v) in edges {
            m[a][b] = Bond::Finite(v);
            m[b][a] = Bond::Finite(v);
        }
        Self::new(m)
    }

    /// Parses `{"labels":[...],"m":[[...]]}` with `"inf"` for infinity.
    pub fn from_json(text: &str) -> Result<(Self, Vec<String>), CoxeterError> {
        let raw: MatrixJson = serde_json::from_str(text).map_err(|e| {
            CoxeterError::InvalidMatrix(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        let mut rows = Vec::with_capacity(raw.m.len());
        for (i, row) in raw.m.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, entry) in row.into_iter().enumerate() {
                out.push(match entry {
                    BondJson::Num(v) => Bond::Finite(v),
                    BondJson::Str(s) if s == "inf" => Bond::Infinite,
                    BondJson::Str(s) => {
                        return Err(CoxeterError::InvalidMatrix(format!("entry [{i}][{j}]: expected integer or \"inf\", got {s:?}")))
                    }
                });
            }
            rows.push(out);
        }
        let matrix = Self::new(rows)?;
        if raw.labels.len() != matrix.rank() {
            return Err(CoxeterError::InvalidMatrix(format!(
                "{} labels for a rank-{} matrix",
                raw.labels.len(),
                matrix.rank()
            )));
        }
        Ok((matrix, raw.labels))
    }

    pub fn to_json(&self, labels: &[String]) -> String {
        let m = self
            .m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|b| match b {
                        Bond::Finite(v) => BondJson::Num(*v),
                        Bond::Infinite => BondJson::Str("inf".into()),
                    })
                    .collect()
            })
            .collect();
        serde_json::to_string(&MatrixJson { labels: labels.to_vec(), m }).expect("serializable")
    }
}

/// Which side a descent or multiplication happens on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Finite irreducible types reachable with bond orders 2, 3, 4, 6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiniteType {
    A(usize),
    B(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl FiniteType {
    pub fn order(self) -> u128 {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        match self {
            FiniteType::A(n) => fact(n + 1),
            FiniteType::B(n) => (1u128 << n) * fact(n),
            FiniteType::D(n) => (1u128 << (n - 1)) * fact(n),
            FiniteType::E(6) => 51_840,
            FiniteType::E(7) => 2_903_040,
            FiniteType::E(_) => 696_729_600,
            FiniteType::F4 => 1152,
            FiniteType::G2 => 12,
        }
    }
}

/// An element of a Coxeter group.
///
/// Equality and hashing use the matrix; ordering is ShortLex on the
/// canonical word.
#[derive(Clone)]
pub struct GroupElement {
    sys: u64,
    mat: Box<[i64]>,
    inv: Box<[i64]>,
    word: Vec<usize>,
}

impl GroupElement {
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Row-major action on simple-root coordinates.
    pub fn matrix(&self) -> &[i64] {
        &self.mat
    }

    pub fn system_id(&self) -> u64 {
        self.sys
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.sys == other.sys && self.mat == other.mat
    }
}

impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sys.hash(state);
        self.mat.hash(state);
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.sys, self.word.len(), &self.word).cmp(&(other.sys, other.word.len(), &other.word))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        let w: Vec<String> = self.word.iter().map(|s| (s + 1).to_string()).collect();
        write!(f, "s{}", w.join("."))
    }
}

/// A finitary parabolic subgroup with its cached enumeration.
#[derive(Debug)]
pub struct Parabolic {
    pub set: GenSet,
    /// Elements sorted by length, then ShortLex.
    pub elements: Vec<GroupElement>,
    pub longest: GroupElement,
}

impl Parabolic {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn length(&self) -> usize {
        self.longest.length()
    }
}

static NEXT_SYSTEM_ID: AtomicU64 = AtomicU64::new(1);

pub struct CoxeterSystem {
    id: u64,
    matrix: CoxeterMatrix,
    labels: Vec<String>,
    /// `cartan[s][t] = <α_s^∨, α_t>`.
    cartan: Vec<Vec<i64>>,
    cap: usize,
    parabolics: RwLock<HashMap<GenSet, Arc<Parabolic>>>,
}

impl fmt::Debug for CoxeterSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterSystem").field("labels", &self.labels).field("matrix", &self.matrix).finish()
    }
}

impl CoxeterSystem {
    pub fn new(matrix: CoxeterMatrix) -> Self {
        let labels = (1..=matrix.rank()).map(|i| format!("s{i}")).collect();
        Self::with_labels(matrix, labels)
    }

    pub fn with_labels(matrix: CoxeterMatrix, labels: Vec<String>) -> Self {
        let n = matrix.rank();
        let mut cartan = vec![vec![0i64; n]; n];
        for s in 0..n {
            for t in 0..n {
                cartan[s][t] = if s == t {
                    2
                } else {
                    // (a(lo,hi), a(hi,lo)) per bond order.
                    let (lo_hi, hi_lo) = match matrix.bond(s, t) {
                        Bond::Finite(2) => (0, 0),
                        Bond::Finite(3) => (-1, -1),
                        Bond::Finite(4) => (-1, -2),
                        Bond::Finite(6) => (-1, -3),
                        Bond::Infinite => (-2, -2),
                        Bond::Finite(_) => unreachable!("validated in CoxeterMatrix::new"),
                    };
                    if s < t {
                        lo_hi
                    } else {
                        hi_lo
                    }
                };
            }
        }
        CoxeterSystem {
            id: NEXT_SYSTEM_ID.fetch_add(1, Ordering::Relaxed),
            matrix,
            labels,
            cartan,
            cap: DEFAULT_ENUMERATION_CAP,
            parabolics: RwLock::new(HashMap::new()),
        }
    }

    pub fn named(name: &str) -> Result<Self, CoxeterError> {
        Ok(Self::new(CoxeterMatrix::named(name)?))
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cartan(&self, s: usize, t: usize) -> i64 {
        self.cartan[s][t]
    }

    pub fn all(&self) -> GenSet {
        GenSet::full(self.rank())
    }

    pub fn enumeration_cap(&self) -> usize {
        self.cap
    }

    fn check(&self, x: &GroupElement) -> Result<(), CoxeterError> {
        if x.sys == self.id {
            Ok(())
        } else {
            Err(CoxeterError::MismatchedSystems)
        }
    }

    fn check_gen(&self, s: usize) -> Result<(), CoxeterError> {
        if s < self.rank() {
            Ok(())
        } else {
            Err(CoxeterError::GeneratorOutOfRange(s))
        }
    }

    // ---- raw matrix helpers -------------------------------------------------

    fn mat_mul(&self, a: &[i64], b: &[i64]) -> Box<[i64]> {
        let n = self.rank();
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += aik * b[k * n + j];
                }
            }
        }
        out.into_boxed_slice()
    }

    /// `M_s · a`: only row `s` changes.
    fn left_reflect(&self, s: usize, a: &mut [i64]) {
        let n = self.rank();
        for j in 0..n {
            let mut acc = 0;
            for k in 0..n {
                acc += self.cartan[s][k] * a[k * n + j];
            }
            a[s * n + j] -= acc;
        }
    }

    /// `a · M_s`.
    fn right_reflect(&self, s: usize, a: &mut [i64]) {
        let n = self.rank();
        for i in 0..n {
            let ais = a[i * n + s];
            if ais == 0 {
                continue;
            }
            for j in 0..n {
                a[i * n + j] -= ais * self.cartan[s][j];
            }
        }
    }

    /// Column `s` of `a` is a root; all-nonpositive means negative.
    fn column_negative(&self, a: &[i64], s: usize) -> bool {
        let n = self.rank();
        (0..n).all(|i| a[i * n + s] <= 0)
    }

    fn identity_matrix(&self) -> Box<[i64]> {
        let n = self.rank();
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        m.into_boxed_slice()
    }

    /// ShortLex-minimal reduced word: strip the smallest left descent until
    /// the identity is reached.
    fn canonical_word(&self, mat: &[i64], inv: &[i64]) -> Vec<usize> {
        let n = self.rank();
        let mut mat = mat.to_vec();
        let mut inv = inv.to_vec();
        let mut word = Vec::new();
        loop {
            // Left descents of w are the s with w^{-1}(α_s) < 0.
            let Some(s) = (0..n).find(|&s| self.column_negative(&inv, s)) else {
                break;
            };
            word.push(s);
            self.left_reflect(s, &mut mat);
            self.right_reflect(s, &mut inv);
        }
        word
    }

    fn from_matrices(&self, mat: Box<[i64]>, inv: Box<[i64]>) -> GroupElement {
        let word = self.canonical_word(&mat, &inv);
        GroupElement { sys: self.id, mat, inv, word }
    }

    // ---- element construction -----------------------------------------------

    pub fn identity(&self) -> GroupElement {
        GroupElement { sys: self.id, mat: self.identity_matrix(), inv: self.identity_matrix(), word: Vec::new() }
    }

    pub fn generator(&self, s: usize) -> Result<GroupElement, CoxeterError> {
        self.check_gen(s)?;
        let mut mat = self.identity_matrix();
        self.left_reflect(s, &mut mat);
        Ok(GroupElement { sys: self.id, inv: mat.clone(), mat, word: vec![s] })
    }

    /// The product of the generators along `word` (which need not be reduced).
    pub fn element(&self, word: &[usize]) -> Result<GroupElement, CoxeterError> {
        let mut mat = self.identity_matrix();
        let mut inv = self.identity_matrix();
        for &s in word {
            self.check_gen(s)?;
            self.right_reflect(s, &mut mat);
            self.left_reflect(s, &mut inv);
        }
        Ok(self.from_matrices(mat, inv))
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement, CoxeterError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.from_matrices(self.mat_mul(&x.mat, &y.mat), self.mat_mul(&y.inv, &x.inv)))
    }

    /// Product of several elements, left to right.
    pub fn product<'a>(&self, xs: impl IntoIterator<Item = &'a GroupElement>) -> Result<GroupElement, CoxeterError> {
        let mut acc = self.identity();
        for x in xs {
            acc = self.multiply(&acc, x)?;
        }
        Ok(acc)
    }

    pub fn inverse(&self, x: &GroupElement) -> GroupElement {
        let mut word = x.word.clone();
        word.reverse();
        let rev = GroupElement { sys: x.sys, mat: x.inv.clone(), inv: x.mat.clone(), word: Vec::new() };
        // Reversed canonical word is reduced but not necessarily ShortLex-minimal.
        let canon = self.canonical_word(&rev.mat, &rev.inv);
        debug_assert_eq!(canon.len(), word.len());
        GroupElement { word: canon, ..rev }
    }

    /// `x · s` without validation of `s`.
    fn times_gen(&self, x: &GroupElement, s: usize) -> GroupElement {
        let mut mat = x.mat.clone();
        let mut inv = x.inv.clone();
        self.right_reflect(s, &mut mat);
        self.left_reflect(s, &mut inv);
        self.from_matrices(mat, inv)
    }

    // ---- length and descents --------------------------------------------------

    pub fn length(&self, x: &GroupElement) -> usize {
        x.word.len()
    }

    /// Recomputes the length from scratch by stripping right descents; used to
    /// cross-check the cached canonical word.
    pub fn length_by_stripping(&self, x: &GroupElement) -> usize {
        let n = self.rank();
        let mut mat = x.mat.to_vec();
        let mut len = 0;
        while let Some(s) = (0..n).find(|&s| self.column_negative(&mat, s)) {
            self.right_reflect(s, &mut mat);
            len += 1;
        }
        len
    }

    pub fn is_descent(&self, x: &GroupElement, s: usize, side: Side) -> bool {
        match side {
            Side::Right => self.column_negative(&x.mat, s),
            Side::Left => self.column_negative(&x.inv, s),
        }
    }

    pub fn descents(&self, x: &GroupElement, side: Side) -> GenSet {
        (0..self.rank()).filter(|&s| self.is_descent(x, s, side)).collect()
    }

    /// `x · s` if that is longer than `x`, else `x`.
    pub fn star_multiply(&self, x: &GroupElement, s: usize) -> Result<GroupElement, CoxeterError> {
        self.check(x)?;
        self.check_gen(s)?;
        if self.is_descent(x, s, Side::Right) {
            Ok(x.clone())
        } else {
            Ok(self.times_gen(x, s))
        }
    }

    /// Demazure product `x ⋆ y`, folding the canonical word of `y`.
    pub fn star_product(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement, CoxeterError> {
        self.check(x)?;
        self.check(y)?;
        let mut acc = x.clone();
        for &s in &y.word {
            if !self.is_descent(&acc, s, Side::Right) {
                acc = self.times_gen(&acc, s);
            }
        }
        Ok(acc)
    }

    /// Whether `x·y` is a reduced composition (lengths add).
    pub fn is_length_additive(&self, x: &GroupElement, y: &GroupElement) -> Result<bool, CoxeterError> {
        Ok(self.multiply(x, y)?.length() == x.length() + y.length())
    }

    /// If `x s x^{-1}` is a simple reflection, return it.
    pub fn conjugate_to_generator(&self, x: &GroupElement, s: usize) -> Result<Option<usize>, CoxeterError> {
        let g = self.generator(s)?;
        let c = self.multiply(&self.multiply(x, &g)?, &self.inverse(x))?;
        Ok((c.length() == 1).then(|| c.word[0]))
    }

    // ---- parabolic subgroups -------------------------------------------------

    /// Connected components of the Coxeter graph restricted to `set`.
    pub fn components(&self, set: GenSet) -> Vec<GenSet> {
        let mut seen = GenSet::EMPTY;
        let mut out = Vec::new();
        for s in set.iter() {
            if seen.contains(s) {
                continue;
            }
            let mut comp = GenSet::singleton(s);
            let mut stack = vec![s];
            while let Some(a) = stack.pop() {
                for b in set.iter() {
                    if !comp.contains(b) && self.matrix.bond(a, b) != Bond::Finite(2) && a != b {
                        comp = comp.with(b);
                        stack.push(b);
                    }
                }
            }
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    /// Classifies a connected subset; `None` means the parabolic subgroup is infinite.
    pub fn classify_component(&self, comp: GenSet) -> Option<FiniteType> {
        let nodes = comp.to_vec();
        let n = nodes.len();
        if n == 1 {
            return Some(FiniteType::A(1));
        }
        let mut edges = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                match self.matrix.bond(a, b) {
                    Bond::Finite(2) => {}
                    Bond::Infinite => return None,
                    Bond::Finite(m) => edges.push((a, b, m)),
                }
            }
        }
        if edges.len() != n - 1 {
            return None;
        }
        let degree = |v: usize| edges.iter().filter(|&&(a, b, _)| a == v || b == v).count();
        let sixes = edges.iter().filter(|e| e.2 == 6).count();
        let fours: Vec<_> = edges.iter().filter(|e| e.2 == 4).collect();
        if sixes > 0 {
            return (n == 2 && sixes == 1).then_some(FiniteType::G2);
        }
        let branch: Vec<usize> = nodes.iter().copied().filter(|&v| degree(v) >= 3).collect();
        if nodes.iter().any(|&v| degree(v) > 3) || branch.len() > 1 {
            return None;
        }
        match fours.len() {
            0 => {
                if branch.is_empty() {
                    return Some(FiniteType::A(n));
                }
                let c = branch[0];
                let mut legs: Vec<usize> = edges
                    .iter()
                    .filter_map(|&(a, b, _)| if a == c { Some(b) } else if b == c { Some(a) } else { None })
                    .map(|start| {
                        // Walk outward counting nodes.
                        let (mut prev, mut cur, mut len) = (c, start, 1);
                        loop {
                            let next = edges.iter().find_map(|&(a, b, _)| {
                                if a == cur && b != prev {
                                    Some(b)
                                } else if b == cur && a != prev {
                                    Some(a)
                                } else {
                                    None
                                }
                            });
                            match next {
                                Some(nx) => {
                                    prev = cur;
                                    cur = nx;
                                    len += 1;
                                }
                                None => break len,
                            }
                        }
                    })
                    .collect();
                legs.sort_unstable();
                match legs.as_slice() {
                    [1, 1, _] => Some(FiniteType::D(n)),
                    [1, 2, 2] => Some(FiniteType::E(6)),
                    [1, 2, 3] => Some(FiniteType::E(7)),
                    [1, 2, 4] => Some(FiniteType::E(8)),
                    _ => None,
                }
            }
            1 => {
                if !branch.is_empty() {
                    return None;
                }
                let (a, b, _) = *fours[0];
                let end = degree(a) == 1 || degree(b) == 1;
                if end {
                    Some(FiniteType::B(n))
                } else if n == 4 {
                    Some(FiniteType::F4)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Predicted `|W_I|` from the classification, or `None` if infinite.
    pub fn predicted_order(&self, set: GenSet) -> Option<u128> {
        self.components(set).into_iter().try_fold(1u128, |acc, c| Some(acc * self.classify_component(c)?.order()))
    }

    /// True iff `W_I` is finite. Infinite subsets are recognised from the
    /// Coxeter graph; finite ones are enumerated (and cached) under the cap.
    pub fn is_finitary(&self, set: GenSet) -> Result<bool, CoxeterError> {
        match self.parabolic(set) {
            Ok(_) => Ok(true),
            Err(CoxeterError::NotFinitary(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn parabolic(&self, set: GenSet) -> Result<Arc<Parabolic>, CoxeterError> {
        if let Some(p) = self.parabolics.read().expect("lock").get(&set) {
            return Ok(p.clone());
        }
        if let Some(bad) = set.iter().find(|&s| s >= self.rank()) {
            return Err(CoxeterError::GeneratorOutOfRange(bad));
        }
        let predicted = self.predicted_order(set).ok_or(CoxeterError::NotFinitary(set))?;
        if predicted > self.cap as u128 {
            return Err(CoxeterError::CapExceeded { subset: set, cap: self.cap });
        }
        let p = Arc::new(self.enumerate_parabolic(set)?);
        debug_assert_eq!(p.order() as u128, predicted);
        Ok(self.parabolics.write().expect("lock").entry(set).or_insert(p).clone())
    }

    fn enumerate_parabolic(&self, set: GenSet) -> Result<Parabolic, CoxeterError> {
        let mut seen: HashSet<Box<[i64]>> = HashSet::new();
        let id = self.identity();
        seen.insert(id.mat.clone());
        let mut layer = vec![id];
        let mut elements = Vec::new();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for x in &layer {
                for s in set.iter() {
                    if self.is_descent(x, s, Side::Right) {
                        continue;
                    }
                    let y = self.times_gen(x, s);
                    if seen.insert(y.mat.clone()) {
                        next.push(y);
                    }
                }
            }
            elements.append(&mut layer);
            if elements.len() + next.len() > self.cap {
                return Err(CoxeterError::CapExceeded { subset: set, cap: self.cap });
            }
            layer = next;
        }
        elements.sort();
        let longest = elements.last().expect("identity present").clone();
        Ok(Parabolic { set, elements, longest })
    }

    pub fn longest_element(&self, set: GenSet) -> Result<GroupElement, CoxeterError> {
        Ok(self.parabolic(set)?.longest.clone())
    }

    /// `ℓ(w_I)`.
    pub fn parabolic_length(&self, set: GenSet) -> Result<usize, CoxeterError> {
        Ok(self.parabolic(set)?.length())
    }

    /// Whether `x ∈ W_I` (every letter of the canonical word lies in `I`).
    pub fn in_parabolic(&self, x: &GroupElement, set: GenSet) -> bool {
        x.word.iter().all(|&s| set.contains(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(xs: &[usize]) -> GenSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn involution_and_braid() {
        let w = CoxeterSystem::named("A2").unwrap();
        let s = w.generator(0).unwrap();
        let t = w.generator(1).unwrap();
        assert!(w.multiply(&s, &s).unwrap().is_identity());
        assert_eq!(w.element(&[0, 1, 0]).unwrap(), w.element(&[1, 0, 1]).unwrap());
        assert_eq!(w.multiply(&s, &t).unwrap().length(), 2);
    }

    #[test]
    fn longest_lengths() {
        for (name, len, order) in [("A3", 6, 24), ("B3", 9, 48), ("G2", 6, 12), ("D4", 12, 192), ("F4", 24, 1152)] {
            let w = CoxeterSystem::named(name).unwrap();
            let p = w.parabolic(w.all()).unwrap();
            assert_eq!(p.length(), len, "{name}");
            assert_eq!(p.order(), order, "{name}");
            let max = p.elements.iter().map(|x| x.length()).max().unwrap();
            assert_eq!(max, len);
        }
    }

    #[test]
    fn descents_in_s3() {
        let w = CoxeterSystem::named("A2").unwrap();
        let id = w.identity();
        assert!(w.descents(&id, Side::Left).is_empty());
        let w0 = w.longest_element(w.all()).unwrap();
        assert_eq!(w.descents(&w0, Side::Left), w.all());
        assert_eq!(w.descents(&w0, Side::Right), w.all());
        let st = w.element(&[0, 1]).unwrap();
        assert_eq!(w.descents(&st, Side::Left), gens(&[0]));
        assert_eq!(w.descents(&st, Side::Right), gens(&[1]));
        assert_eq!(w0.word(), &[0, 1, 0]);
    }

    #[test]
    fn finitary_detection() {
        let aff = CoxeterSystem::named("A~1").unwrap();
        assert!(aff.is_finitary(gens(&[0])).unwrap());
        assert!(!aff.is_finitary(aff.all()).unwrap());
        assert!(matches!(aff.longest_element(aff.all()), Err(CoxeterError::NotFinitary(_))));
        // Triangle of 3s is affine A2.
        let m = CoxeterMatrix::new(vec![
            vec![Bond::Finite(1), Bond::Finite(3), Bond::Finite(3)],
            vec![Bond::Finite(3), Bond::Finite(1), Bond::Finite(3)],
            vec![Bond::Finite(3), Bond::Finite(3), Bond::Finite(1)],
        ])
        .unwrap();
        let w = CoxeterSystem::new(m);
        assert!(!w.is_finitary(w.all()).unwrap());
        assert!(w.is_finitary(gens(&[0, 1])).unwrap());
        let small = CoxeterSystem::named("A4").unwrap().with_cap(100);
        assert!(matches!(small.is_finitary(small.all()), Err(CoxeterError::CapExceeded { .. })));
    }

    #[test]
    fn star_product_basics() {
        let w = CoxeterSystem::named("A2").unwrap();
        let s = w.generator(0).unwrap();
        assert_eq!(w.star_multiply(&s, 0).unwrap(), s);
        let st = w.element(&[0, 1]).unwrap();
        assert_eq!(w.star_product(&w.identity(), &st).unwrap(), st);
    }

    #[test]
    fn matrix_json_roundtrip_and_errors() {
        let (m, labels) = CoxeterMatrix::from_json(r#"{"labels":["s","t"],"m":[[1,"inf"],["inf",1]]}"#).unwrap();
        assert_eq!(m.bond(0, 1), Bond::Infinite);
        let text = m.to_json(&labels);
        assert_eq!(CoxeterMatrix::from_json(&text).unwrap().0, m);
        let err = CoxeterMatrix::from_json(r#"{"labels":["s","t"],"m":[[1,5],[5,1]]}"#).unwrap_err();
        assert!(matches!(err, CoxeterError::UnsupportedOrder { m: 5, .. }));
        let err = CoxeterMatrix::from_json("{\"labels\":[\"s\"],\n \"m\":[[1,]]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(CoxeterMatrix::from_json(r#"{"labels":["s","t"],"m":[[1,3],[4,1]]}"#).is_err());
    }

    #[test]
    fn mismatched_systems() {
        let a = CoxeterSystem::named("A2").unwrap();
        let b = CoxeterSystem::named("A2").unwrap();
        assert_eq!(
            a.multiply(&a.generator(0).unwrap(), &b.generator(0).unwrap()),
            Err(CoxeterError::MismatchedSystems)
        );
    }
}
