//! Singular braid relations on expressions, Matsumoto graphs, and reduction
//! of non-reduced expressions.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Mutex;

use petgraph::graph::{NodeIndex, UnGraph};
use serde::Serialize;
use thiserror::Error;

use crate::cosets::DoubleCoset;
use crate::coxeter::{CoxeterError, CoxeterSystem, FiniteType};
use crate::expressions::{self, ExprError, Expression, Step};
use crate::genset::GenSet;

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Longest rotation sequence tried by the switchback search.
const MAX_DELTA: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("no switchback relation for L = {l:?}, s = {s}, t = {t}: t = w_Ls s w_Ls")]
    NoSwitchback { l: GenSet, s: usize, t: usize },
    #[error("switchback precondition failed: {0}")]
    Precondition(String),
    #[error("expected a unique zigzag expression for L = {l:?}, s = {s}, t = {t}, found {found}")]
    NotUnique { l: GenSet, s: usize, t: usize, found: usize },
    #[error("search exceeded its budget of {budget} nodes after {} moves", partial.len())]
    BudgetExceeded { budget: usize, partial: Vec<BraidMove> },
    #[error("move {index} of the trace does not apply")]
    BadTrace { index: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<CoxeterError> for RewriteError {
    fn from(e: CoxeterError) -> Self {
        RewriteError::Expr(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    UpUp,
    DownDown,
    Commuting,
    Switchback,
    StarQuadraticContract,
}

impl MoveKind {
    pub fn is_invertible(self) -> bool {
        self != MoveKind::StarQuadraticContract
    }

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::UpUp => "up-up",
            MoveKind::DownDown => "down-down",
            MoveKind::Commuting => "commuting",
            MoveKind::Switchback => "switchback",
            MoveKind::StarQuadraticContract => "star-quadratic-contract",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Replacement of the subword starting at `position` by `after`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidMove {
    pub kind: MoveKind,
    pub position: usize,
    pub generators: Vec<usize>,
    pub before: Expression,
    pub after: Expression,
}

impl BraidMove {
    pub fn apply(&self, e: &Expression) -> Option<Expression> {
        let end = self.position + self.before.width();
        if end >= e.sets().len() || e.subword(self.position, end) != self.before {
            return None;
        }
        Some(e.splice(self.position, end, &self.after))
    }

    pub fn inverse(&self) -> Option<BraidMove> {
        self.kind.is_invertible().then(|| BraidMove { before: self.after.clone(), after: self.before.clone(), ..self.clone() })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "position": self.position,
            "payload": {
                "generators": self.generators,
                "before": self.before.to_json_value(),
                "after": self.after.to_json_value(),
            }
        })
    }
}

/// Finds and applies braid moves, caching switchback right-hand sides.
pub struct Rewriter<'a> {
    sys: &'a CoxeterSystem,
    cache: Mutex<HashMap<(GenSet, usize, usize), Result<Expression, RewriteError>>>,
}

impl<'a> Rewriter<'a> {
    pub fn new(sys: &'a CoxeterSystem) -> Self {
        Rewriter { sys, cache: Mutex::new(HashMap::new()) }
    }

    pub fn system(&self) -> &CoxeterSystem {
        self.sys
    }

    /// The right-hand side of the switchback relation for `[L + s - t]`.
    ///
    /// Commuting case when `s` and `t` lie in different components of `Ls`;
    /// the closed form in type A components; otherwise the unique reduced
    /// zigzag found by [`switchback_by_search`](Self::switchback_by_search).
    pub fn switchback_rhs(&self, l: GenSet, s: usize, t: usize) -> Result<Expression, RewriteError> {
        if let Some(r) = self.cache.lock().unwrap().get(&(l, s, t)) {
            return r.clone();
        }
        let r = self.compute_switchback(l, s, t);
        self.cache.lock().unwrap().insert((l, s, t), r.clone());
        r
    }

    fn check_switchback(&self, l: GenSet, s: usize, t: usize) -> Result<GenSet, RewriteError> {
        let sys = self.sys;
        if l.contains(s) || !l.with(s).contains(t) || s >= sys.rank() {
            return Err(RewriteError::Precondition(format!("need s ∉ L and t ∈ Ls, got L = {l:?}, s = {s}, t = {t}")));
        }
        let ls = l.with(s);
        if !sys.is_finitary(ls)? {
            return Err(ExprError::NotFinitary(ls).into());
        }
        let w = sys.longest_element(ls)?;
        if sys.conjugate_to_generator(&w, s)? == Some(t) {
            return Err(RewriteError::NoSwitchback { l, s, t });
        }
        Ok(ls)
    }

    fn compute_switchback(&self, l: GenSet, s: usize, t: usize) -> Result<Expression, RewriteError> {
        let ls = self.check_switchback(l, s, t)?;
        let sys = self.sys;
        let comp = sys.components(ls).into_iter().find(|c| c.contains(s)).expect("s lies in Ls");
        if !comp.contains(t) {
            return Ok(Expression::from_steps(sys, l, &[Step::Down(t), Step::Up(s)])?);
        }
        if let Some(FiniteType::A(_)) = sys.classify_component(comp) {
            let rhs = self.switchback_type_a(l, comp, s, t)?;
            debug_assert!(rhs.is_reduced(sys)?);
            return Ok(rhs);
        }
        self.switchback_by_search(l, s, t)
    }

    /// `[L - s_c + s_a - s_b + s_c]`, labelling the path `comp` as `s_1, …, s_{n-1}`.
    fn switchback_type_a(&self, l: GenSet, comp: GenSet, s: usize, t: usize) -> Result<Expression, RewriteError> {
        let path = self.path_order(comp);
        let n = path.len() + 1;
        let a = path.iter().position(|&x| x == s).unwrap() + 1;
        let b = path.iter().position(|&x| x == t).unwrap() + 1;
        let c = if a + b < n { a + b } else { a + b - n };
        let sc = path[c - 1];
        Ok(Expression::from_steps(self.sys, l, &[Step::Down(sc), Step::Up(s), Step::Down(t), Step::Up(sc)])?)
    }

    fn path_order(&self, comp: GenSet) -> Vec<usize> {
        let sys = self.sys;
        let linked = |a: usize, b: usize| a != b && sys.matrix().bond(a, b).finite() != Some(2);
        let start = comp.iter().find(|&a| comp.iter().filter(|&b| linked(a, b)).count() <= 1).expect("path has an endpoint");
        let mut path = vec![start];
        while let Some(next) = comp.iter().find(|&b| !path.contains(&b) && linked(*path.last().unwrap(), b)) {
            path.push(next);
        }
        path
    }

    /// Searches the zigzags `[L - u_1 + u_0 - u_2 + u_1 - ⋯ - u_δ + u_{δ-1}]`
    /// with `u_0 = s`, `u_δ = t` for reduced ones expressing the same coset as
    /// `[L + s - t]`, and requires exactly one.
    pub fn switchback_by_search(&self, l: GenSet, s: usize, t: usize) -> Result<Expression, RewriteError> {
        let ls = self.check_switchback(l, s, t)?;
        let sys = self.sys;
        let target = sys.longest_element(ls)?;
        let end = ls.without(t);
        let prefix_ok = |e: &Expression| -> Result<bool, RewriteError> {
            if !e.is_reduced(sys)? {
                return Ok(false);
            }
            let x = e.element(sys)?;
            let rest = sys.multiply(&sys.inverse(&x), &target)?;
            Ok(rest.length() + x.length() == target.length())
        };
        let mut found = Vec::new();
        // Stack entries: (steps so far, u_k = the generator to add back next).
        let mut stack: Vec<(Vec<Step>, usize)> = Vec::new();
        for u1 in l.iter() {
            stack.push((vec![Step::Down(u1), Step::Up(s)], u1));
        }
        while let Some((steps, pending)) = stack.pop() {
            let Ok(e) = Expression::from_steps(sys, l, &steps) else { continue };
            if !prefix_ok(&e)? {
                continue;
            }
            let delta = steps.len() / 2;
            let cur = e.last();
            for u in cur.iter() {
                let mut next = steps.clone();
                next.push(Step::Down(u));
                next.push(Step::Up(pending));
                if u == t {
                    let Ok(cand) = Expression::from_steps(sys, l, &next) else { continue };
                    if cand.last() == end && cand.is_reduced(sys)? && cand.element(sys)? == target {
                        found.push(cand);
                    }
                }
                if delta + 1 < MAX_DELTA {
                    stack.push((next, u));
                }
            }
        }
        found.sort();
        found.dedup();
        match found.len() {
            1 => Ok(found.pop().unwrap()),
            n => Err(RewriteError::NotUnique { l, s, t, found: n }),
        }
    }

    /// All braid moves whose left- or right-hand side occurs in `e`.
    pub fn applicable_moves(&self, e: &Expression) -> Result<Vec<BraidMove>, RewriteError> {
        let sys = self.sys;
        let steps = e.steps();
        let sets = e.sets();
        let mut out = Vec::new();
        let mk = |kind, k: usize, gens: Vec<usize>, len: usize, rep: Expression| BraidMove { kind, position: k, generators: gens, before: e.subword(k, k + len), after: rep };
        for k in 0..steps.len() {
            let l = sets[k];
            if k + 1 < steps.len() {
                match (steps[k], steps[k + 1]) {
                    (Step::Up(s), Step::Up(t)) => {
                        let rep = Expression::from_steps(sys, l, &[Step::Up(t), Step::Up(s)])?;
                        out.push(mk(MoveKind::UpUp, k, vec![s, t], 2, rep));
                    }
                    (Step::Down(s), Step::Down(t)) => {
                        let rep = Expression::from_steps(sys, l, &[Step::Down(t), Step::Down(s)])?;
                        out.push(mk(MoveKind::DownDown, k, vec![s, t], 2, rep));
                    }
                    (Step::Down(s), Step::Up(u)) if s == u => {
                        out.push(mk(MoveKind::StarQuadraticContract, k, vec![s], 2, Expression::trivial(sys, l)?));
                    }
                    (Step::Up(s), Step::Down(t)) => match self.switchback_rhs(l, s, t) {
                        Ok(rep) => {
                            let kind = if rep.width() == 2 { MoveKind::Commuting } else { MoveKind::Switchback };
                            out.push(mk(kind, k, vec![s, t], 2, rep));
                        }
                        Err(RewriteError::NoSwitchback { .. }) => {}
                        Err(err) => return Err(err),
                    },
                    (Step::Down(t), Step::Up(s)) => {
                        let ls = l.with(s);
                        if sys.is_finitary(ls)? && sys.components(ls).iter().any(|c| c.contains(s) && !c.contains(t)) {
                            let rep = Expression::from_steps(sys, l, &[Step::Up(s), Step::Down(t)])?;
                            out.push(mk(MoveKind::Commuting, k, vec![s, t], 2, rep));
                        }
                    }
                }
            }
            // Right-hand sides of switchbacks: D(u1) U(u0) D(u2) U(u1) … D(uδ) U(uδ-1), δ ≥ 2.
            let mut delta = 2;
            while k + 2 * delta <= steps.len() {
                let window = &steps[k..k + 2 * delta];
                let shaped = window.iter().enumerate().all(|(i, st)| matches!((i % 2, st), (0, Step::Down(_)) | (1, Step::Up(_))))
                    && (1..delta).all(|i| window[2 * i + 1].generator() == window[2 * i - 2].generator());
                if !shaped {
                    break;
                }
                let s = window[1].generator();
                let t = window[2 * delta - 2].generator();
                if !l.contains(s) && l.with(s).contains(t) {
                    if let Ok(rhs) = self.switchback_rhs(l, s, t) {
                        if rhs.width() == 2 * delta && e.subword(k, k + 2 * delta) == rhs {
                            let rep = Expression::from_steps(sys, l, &[Step::Up(s), Step::Down(t)])?;
                            out.push(mk(MoveKind::Switchback, k, vec![s, t], 2 * delta, rep));
                        }
                    }
                }
                delta += 1;
            }
        }
        Ok(out)
    }
}

/// Reduced expressions of a coset with invertible braid moves as edges.
pub struct MatsumotoGraph {
    pub vertices: Vec<Expression>,
    /// `(i, j, kind)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize, MoveKind)>,
    graph: UnGraph<usize, MoveKind>,
}

impl MatsumotoGraph {
    pub fn is_connected(&self) -> bool {
        self.vertices.len() <= 1 || petgraph::algo::connected_components(&self.graph) == 1
    }

    pub fn component_count(&self) -> usize {
        petgraph::algo::connected_components(&self.graph)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph matsumoto {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  {i} [label=\"{v}\"];\n"));
        }
        for (i, j, k) in &self.edges {
            out.push_str(&format!("  {i} -- {j} [label=\"{k}\"];\n"));
        }
        out.push_str("}\n");
        out
    }
}

pub fn matsumoto_graph(rw: &Rewriter, p: &DoubleCoset, budget: usize) -> Result<MatsumotoGraph, RewriteError> {
    let sys = rw.system();
    let vertices = expressions::reduced_expressions_of(sys, p, None, budget)?;
    let index: HashMap<&Expression, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        for mv in rw.applicable_moves(v)? {
            if !mv.kind.is_invertible() {
                continue;
            }
            let w = mv.apply(v).expect("discovered move applies");
            let j = *index.get(&w).unwrap_or_else(|| panic!("{} move at {} takes reduced {v} outside the reduced expressions of {p:?}: {w}", mv.kind, mv.position));
            if i < j {
                edges.push((i, j, mv.kind));
            }
        }
    }
    edges.sort();
    edges.dedup();
    let mut graph = UnGraph::with_capacity(vertices.len(), edges.len());
    let nodes: Vec<NodeIndex> = (0..vertices.len()).map(|i| graph.add_node(i)).collect();
    for &(i, j, k) in &edges {
        graph.add_edge(nodes[i], nodes[j], k);
    }
    Ok(MatsumotoGraph { vertices, edges, graph })
}

/// Breadth-first search over invertible moves from `start` until `goal`
/// accepts a node; returns the node and the moves leading to it.
fn bfs<F>(rw: &Rewriter, start: &Expression, budget: usize, done: &[BraidMove], mut goal: F) -> Result<Option<(Expression, Vec<BraidMove>)>, RewriteError>
where
    F: FnMut(&Expression, &[BraidMove]) -> Result<bool, RewriteError>,
{
    let mut parent: HashMap<Expression, Option<(Expression, BraidMove)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(start.clone(), None);
    queue.push_back(start.clone());
    let path_to = |parent: &HashMap<Expression, Option<(Expression, BraidMove)>>, mut x: Expression| {
        let mut moves = Vec::new();
        while let Some(Some((prev, mv))) = parent.get(&x) {
            moves.push(mv.clone());
            x = prev.clone();
        }
        moves.reverse();
        moves
    };
    while let Some(x) = queue.pop_front() {
        let moves = rw.applicable_moves(&x)?;
        if goal(&x, &moves)? {
            let trace = path_to(&parent, x.clone());
            return Ok(Some((x, trace)));
        }
        for mv in moves.into_iter().filter(|m| m.kind.is_invertible()) {
            let y = mv.apply(&x).expect("discovered move applies");
            if !parent.contains_key(&y) {
                if parent.len() >= budget {
                    let mut partial = done.to_vec();
                    partial.extend(path_to(&parent, x.clone()));
                    return Err(RewriteError::BudgetExceeded { budget, partial });
                }
                parent.insert(y.clone(), Some((x.clone(), mv)));
                queue.push_back(y);
            }
        }
    }
    Ok(None)
}

/// Rewrites `e` into a reduced expression of minimal width for the same coset.
///
/// Repeatedly takes the shortest non-reduced prefix, moves within it until a
/// `[L - s + s]` appears, and contracts it. Once reduced, searches the
/// invertible-move component for a narrowest expression.
pub fn reduce_expression(rw: &Rewriter, e: &Expression, budget: usize) -> Result<(Expression, Vec<BraidMove>), RewriteError> {
    let sys = rw.system();
    let mut cur = e.clone();
    let mut trace: Vec<BraidMove> = Vec::new();
    while !cur.is_reduced(sys)? {
        let k = (1..=cur.width()).find(|&k| !cur.subword(0, k).is_reduced(sys).unwrap_or(true)).expect("some prefix is not reduced");
        let prefix = cur.subword(0, k);
        let found = bfs(rw, &prefix, budget, &trace, |_, moves| Ok(moves.iter().any(|m| m.kind == MoveKind::StarQuadraticContract)))?;
        let Some((mut x, moves)) = found else {
            return Err(RewriteError::BudgetExceeded { budget, partial: trace });
        };
        trace.extend(moves);
        let contract = rw.applicable_moves(&x)?.into_iter().find(|m| m.kind == MoveKind::StarQuadraticContract).unwrap();
        x = contract.apply(&x).unwrap();
        trace.push(contract);
        cur = x.concatenate(&cur.subword(k, cur.width()))?;
    }
    // Narrowest reachable reduced expression; ties broken by subset sequence.
    let mut best: Option<Expression> = None;
    bfs(rw, &cur, budget, &trace, |x, _| {
        if best.as_ref().is_none_or(|b| (x.width(), x.sets()) < (b.width(), b.sets())) {
            best = Some(x.clone());
        }
        Ok(false)
    })?;
    let best = best.expect("start node is visited");
    if best != cur {
        let target = best.clone();
        let (_, moves) = bfs(rw, &cur, budget, &trace, |x, _| Ok(*x == target))?.expect("target was reached before");
        trace.extend(moves);
        cur = best;
    }
    Ok((cur, trace))
}

/// Applies `trace` to `e`, checking that every move matches.
pub fn replay(e: &Expression, trace: &[BraidMove]) -> Result<Expression, RewriteError> {
    let mut cur = e.clone();
    for (index, mv) in trace.iter().enumerate() {
        cur = mv.apply(&cur).ok_or(RewriteError::BadTrace { index })?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets;

    fn g(xs: &[usize]) -> GenSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn basic_moves() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let rw = Rewriter::new(&sys);
        let e = Expression::parse(&sys, "[∅ + 0 + 1]").unwrap();
        let moves = rw.applicable_moves(&e).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].kind, MoveKind::UpUp);
        assert_eq!(moves[0].apply(&e).unwrap(), Expression::parse(&sys, "[∅ + 1 + 0]").unwrap());
        let v = Expression::parse(&sys, "[{0} - 0 + 0]").unwrap();
        let moves = rw.applicable_moves(&v).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].apply(&v).unwrap(), Expression::trivial(&sys, g(&[0])).unwrap());
    }

    #[test]
    fn type_a_switchback() {
        let sys = CoxeterSystem::named("A3").unwrap();
        let rw = Rewriter::new(&sys);
        // S4: a = 1, b = 2 gives c = 3.
        let rhs = rw.switchback_rhs(g(&[1, 2]), 0, 1).unwrap();
        assert_eq!(rhs, Expression::parse(&sys, "[{1,2} - 2 + 0 - 1 + 2]").unwrap());
        assert_eq!(rw.switchback_by_search(g(&[1, 2]), 0, 1).unwrap(), rhs);
        assert!(matches!(rw.switchback_rhs(g(&[1, 2]), 0, 2), Err(RewriteError::NoSwitchback { .. })));
        let lhs = Expression::parse(&sys, "[{1,2} + 0 - 1]").unwrap();
        assert_eq!(lhs.expressed_coset(&sys).unwrap(), rhs.expressed_coset(&sys).unwrap());
        let back = rw.applicable_moves(&rhs).unwrap();
        assert!(back.iter().any(|m| m.kind == MoveKind::Switchback && m.apply(&rhs).unwrap() == lhs));
    }

    #[test]
    fn commuting_case() {
        let sys = CoxeterSystem::named("A3").unwrap();
        let rw = Rewriter::new(&sys);
        let rhs = rw.switchback_rhs(g(&[2]), 0, 2).unwrap();
        assert_eq!(rhs, Expression::parse(&sys, "[{2} - 2 + 0]").unwrap());
    }

    #[test]
    fn s3_graph_connected() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let rw = Rewriter::new(&sys);
        let p = cosets::coset_of(&sys, &sys.element(&[0, 1, 0]).unwrap(), GenSet::EMPTY, GenSet::EMPTY).unwrap();
        let graph = matsumoto_graph(&rw, &p, DEFAULT_BUDGET).unwrap();
        assert!(graph.is_connected(), "{}", graph.to_dot());
        assert!(graph.to_dot().starts_with("graph matsumoto {"));
    }

    #[test]
    fn reduce_small() {
        let sys = CoxeterSystem::named("A2").unwrap();
        let rw = Rewriter::new(&sys);
        let v = Expression::parse(&sys, "[{0} - 0 + 0]").unwrap();
        let (r, trace) = reduce_expression(&rw, &v, DEFAULT_BUDGET).unwrap();
        assert_eq!(r, Expression::trivial(&sys, g(&[0])).unwrap());
        assert_eq!(replay(&v, &trace).unwrap(), r);
        let ok = Expression::parse(&sys, "[∅ + 0 + 1]").unwrap();
        let (r, trace) = reduce_expression(&rw, &ok, DEFAULT_BUDGET).unwrap();
        assert_eq!(r, ok);
        assert!(trace.is_empty());
    }
}
