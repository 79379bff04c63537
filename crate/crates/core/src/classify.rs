//! Fractionality classification of weights: interval representations,
//! oriented-tree realizations and their laminar cut families, proper
//! terminals, and commodity-graph recognition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::distances::{is_laminar_family, DirectedDistance, LaminarDecomposition, PartialCut};
use crate::error::{Error, Result};
use crate::geometry::LabeledPoint;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{self, rat, Rational};

/// Segments `[a_s, b_s]` with `mu(s,t) = (a_t - b_s)_+`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalRepresentation {
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
}

impl IntervalRepresentation {
    pub fn validate(&self, mu: &DirectedDistance) -> Result<()> {
        let n = mu.len();
        if self.a.len() != n || self.b.len() != n {
            return Err(Error::Invalid("one segment per terminal required".into()));
        }
        for s in 0..n {
            if self.a[s] > self.b[s] {
                return Err(Error::Invalid(format!("a > b at {}", mu.elements()[s])));
            }
            for t in 0..n {
                let v = rational::positive_part(&self.a[t] - &self.b[s]);
                if v != *mu.get(s, t) {
                    return Err(Error::Invalid(format!(
                        "segments give {} at ({}, {})",
                        rational::format(&v),
                        mu.elements()[s],
                        mu.elements()[t]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        let segs: BTreeMap<&String, Value> = names
            .iter()
            .enumerate()
            .map(|(i, s)| {
                (
                    s,
                    json!([rational::to_json_entry(&self.a[i]), rational::to_json_entry(&self.b[i])]),
                )
            })
            .collect();
        json!(segs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntervalOutcome {
    Representable(IntervalRepresentation),
    /// A cycle of contradictory difference constraints.
    NotRepresentable(Vec<String>),
}

impl IntervalOutcome {
    pub fn representation(&self) -> Option<&IntervalRepresentation> {
        match self {
            IntervalOutcome::Representable(r) => Some(r),
            IntervalOutcome::NotRepresentable(_) => None,
        }
    }
}

/// Solve the difference-constraint system for `a`, `b` by Bellman-Ford.
pub fn interval_representation(mu: &DirectedDistance) -> IntervalOutcome {
    let n = mu.len();
    // variable a_s = s, b_s = n + s; arc (i, j, w) means x_j - x_i <= w
    let mut arcs: Vec<(usize, usize, Rational, String)> = Vec::new();
    let name = |i: usize| {
        if i < n {
            format!("a_{}", mu.elements()[i])
        } else {
            format!("b_{}", mu.elements()[i - n])
        }
    };
    for s in 0..n {
        arcs.push((n + s, s, Rational::zero(), format!("{} <= {}", name(s), name(n + s))));
        for t in 0..n {
            if s == t {
                continue;
            }
            let m = mu.get(s, t);
            if m.is_positive() {
                let txt = format!("{} - {} = {}", name(t), name(n + s), rational::format(m));
                arcs.push((n + s, t, m.clone(), txt.clone()));
                arcs.push((t, n + s, -m.clone(), txt));
            } else {
                arcs.push((n + s, t, Rational::zero(), format!("{} <= {}", name(t), name(n + s))));
            }
        }
    }
    let v = 2 * n;
    let mut dist = vec![Rational::zero(); v];
    let mut pred: Vec<Option<usize>> = vec![None; v];
    let mut last = None;
    for _ in 0..=v {
        last = None;
        for (k, (i, j, w, _)) in arcs.iter().enumerate() {
            let cand = &dist[*i] + w;
            if cand < dist[*j] {
                dist[*j] = cand;
                pred[*j] = Some(k);
                last = Some(*j);
            }
        }
        if last.is_none() {
            break;
        }
    }
    match last {
        None => {
            // shift so that every value is nonnegative
            let low = dist.iter().min().cloned().unwrap_or_default();
            let dist: Vec<Rational> = dist.into_iter().map(|d| d - &low).collect();
            IntervalOutcome::Representable(IntervalRepresentation {
                a: dist[..n].to_vec(),
                b: dist[n..].to_vec(),
            })
        }
        Some(mut x) => {
            for _ in 0..v {
                x = arcs[pred[x].expect("relaxed")].0;
            }
            let start = x;
            let mut cert = Vec::new();
            loop {
                let k = pred[x].expect("on cycle");
                cert.push(arcs[k].3.clone());
                x = arcs[k].0;
                if x == start {
                    break;
                }
            }
            cert.reverse();
            IntervalOutcome::NotRepresentable(cert)
        }
    }
}

/// Oriented tree with edge lengths and one subtree per terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedTreeRealization {
    pub terminals: Vec<String>,
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub alpha: Vec<Rational>,
    pub subtrees: Vec<BTreeSet<usize>>,
}

impl OrientedTreeRealization {
    fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.edges.iter().enumerate().filter_map(move |(i, &(x, y))| {
            if x == u {
                Some((y, i, true))
            } else if y == u {
                Some((x, i, false))
            } else {
                None
            }
        })
    }

    /// Edges of the unique `u`-`v` walk with their traversal direction.
    fn walk(&self, u: usize, v: usize) -> Vec<(usize, bool)> {
        let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[u] = true;
        let mut q = VecDeque::from([u]);
        while let Some(x) = q.pop_front() {
            for (y, e, fwd) in self.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, e, fwd));
                    q.push_back(y);
                }
            }
        }
        let mut out = Vec::new();
        let mut x = v;
        while x != u {
            let (p, e, fwd) = prev[x].expect("tree is connected");
            out.push((e, fwd));
            x = p;
        }
        out.reverse();
        out
    }

    /// Length of the forward edges on the `u`-`v` walk.
    pub fn tree_distance(&self, u: usize, v: usize) -> Result<Rational> {
        if u >= self.nodes.len() || v >= self.nodes.len() {
            return Err(Error::UnknownElement(format!("tree node #{}", u.max(v))));
        }
        Ok(self
            .walk(u, v)
            .into_iter()
            .filter(|&(_, fwd)| fwd)
            .map(|(e, _)| self.alpha[e].clone())
            .sum())
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// `D(F_s, F_t)`.
    pub fn subtree_distance(&self, s: usize, t: usize) -> Rational {
        let mut best: Option<Rational> = None;
        for &u in &self.subtrees[s] {
            for &v in &self.subtrees[t] {
                let d = self.tree_distance(u, v).expect("valid nodes");
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
        }
        best.expect("nonempty subtrees")
    }

    /// The induced distance on the terminals.
    pub fn distance(&self) -> Result<DirectedDistance> {
        DirectedDistance::from_fn(self.terminals.clone(), |s, t| self.subtree_distance(s, t))
    }

    fn is_connected_set(&self, set: &BTreeSet<usize>) -> bool {
        let Some(&start) = set.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for (y, _, _) in self.neighbors(x) {
                if set.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == set.len()
    }

    /// Structural checks plus `mu(s,t) = D(F_s, F_t)`.
    pub fn validate(&self, mu: &DirectedDistance) -> Result<()> {
        let k = self.nodes.len();
        if k == 0 || self.edges.len() + 1 != k || self.alpha.len() != self.edges.len() {
            return Err(Error::Invalid("not a tree: wrong edge count".into()));
        }
        if self.edges.iter().any(|&(x, y)| x >= k || y >= k || x == y) {
            return Err(Error::Invalid("bad tree edge".into()));
        }
        if !self.is_connected_set(&(0..k).collect()) {
            return Err(Error::Invalid("tree is disconnected".into()));
        }
        if self.alpha.iter().any(|a| a.is_negative()) {
            return Err(Error::Invalid("negative edge length".into()));
        }
        if self.terminals.as_slice() != mu.elements() || self.subtrees.len() != mu.len() {
            return Err(Error::Invalid("one subtree per terminal required".into()));
        }
        for (s, f) in self.subtrees.iter().enumerate() {
            if f.iter().any(|&u| u >= k) || !self.is_connected_set(f) {
                return Err(Error::Invalid(format!(
                    "subtree of {} is empty or disconnected",
                    self.terminals[s]
                )));
            }
        }
        for (s, t) in mu.pairs() {
            let d = self.subtree_distance(s, t);
            if d != *mu.get(s, t) {
                return Err(Error::Invalid(format!(
                    "tree distance {} differs from mu at ({}, {})",
                    rational::format(&d),
                    self.terminals[s],
                    self.terminals[t]
                )));
            }
        }
        Ok(())
    }

    /// Whether `F_s` is a single node or a directed path.
    pub fn is_path_subtree(&self, s: usize) -> bool {
        let f = &self.subtrees[s];
        let mut indeg = BTreeMap::new();
        let mut outdeg = BTreeMap::new();
        let mut inside = 0;
        for &(x, y) in &self.edges {
            if f.contains(&x) && f.contains(&y) {
                inside += 1;
                *outdeg.entry(x).or_insert(0) += 1;
                *indeg.entry(y).or_insert(0) += 1;
            }
        }
        inside + 1 == f.len()
            && indeg.values().all(|&d| d <= 1)
            && outdeg.values().all(|&d| d <= 1)
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .zip(&self.alpha)
            .map(|(&(x, y), a)| json!([self.nodes[x], self.nodes[y], rational::to_json_entry(a)]))
            .collect();
        let subtrees: BTreeMap<&String, Vec<&String>> = self
            .terminals
            .iter()
            .zip(&self.subtrees)
            .map(|(s, f)| (s, f.iter().map(|&u| &self.nodes[u]).collect()))
            .collect();
        json!({
            "terminals": self.terminals,
            "nodes": self.nodes,
            "edges": edges,
            "subtrees": subtrees,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let strings = |val: Option<&Value>, what: &str| -> Result<Vec<String>> {
            val.and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing {what:?}")))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Parse(format!("{what:?} entries must be strings")))
                })
                .collect()
        };
        let terminals = strings(v.get("terminals"), "terminals")?;
        let nodes = strings(v.get("nodes"), "nodes")?;
        let find = |s: &str| {
            nodes
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::Parse(format!("unknown tree node {s:?}")))
        };
        let mut edges = Vec::new();
        let mut alpha = Vec::new();
        for e in v
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"edges\"".into()))?
        {
            let parts = e
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::Parse("tree edges must be [tail, head, length]".into()))?;
            let x = find(parts[0].as_str().unwrap_or_default())?;
            let y = find(parts[1].as_str().unwrap_or_default())?;
            edges.push((x, y));
            alpha.push(rational::from_json_entry(&parts[2])?);
        }
        let sub = v
            .get("subtrees")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("missing \"subtrees\"".into()))?;
        let subtrees = terminals
            .iter()
            .map(|s| {
                strings(sub.get(s), s)?
                    .iter()
                    .map(|u| find(u))
                    .collect::<Result<BTreeSet<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OrientedTreeRealization {
            terminals,
            nodes,
            edges,
            alpha,
            subtrees,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph Tree {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let owners: Vec<&str> = self
                .terminals
                .iter()
                .zip(&self.subtrees)
                .filter(|(_, f)| f.contains(&i))
                .map(|(s, _)| s.as_str())
                .collect();
            out.push_str(&format!("  \"{n}\" [label=\"{n}\\n{{{}}}\"];\n", owners.join(",")));
        }
        for (&(x, y), a) in self.edges.iter().zip(&self.alpha) {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.nodes[x],
                self.nodes[y],
                rational::format(a)
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Points `p_w(t^c) = D(F_t, w)`, `p_w(t^r) = D(w, F_t)` per tree node.
    pub fn node_points(&self) -> Vec<LabeledPoint> {
        (0..self.nodes.len())
            .map(|w| {
                let c = (0..self.terminals.len())
                    .map(|t| self.min_over(t, |u| self.tree_distance(u, w).expect("valid")))
                    .collect();
                let r = (0..self.terminals.len())
                    .map(|t| self.min_over(t, |u| self.tree_distance(w, u).expect("valid")))
                    .collect();
                LabeledPoint {
                    base: self.terminals.clone(),
                    c,
                    r,
                }
            })
            .collect()
    }

    fn min_over(&self, t: usize, f: impl Fn(usize) -> Rational) -> Rational {
        self.subtrees[t].iter().map(|&u| f(u)).min().expect("nonempty")
    }
}

/// Side of each tree node after deleting edge `e`: `true` on the tail side.
fn tail_side(real: &OrientedTreeRealization, e: usize) -> Vec<bool> {
    let (x, _) = real.edges[e];
    let mut side = vec![false; real.nodes.len()];
    side[x] = true;
    let mut stack = vec![x];
    while let Some(u) = stack.pop() {
        for (v, i, _) in real.neighbors(u) {
            if i != e && !side[v] {
                side[v] = true;
                stack.push(v);
            }
        }
    }
    side
}

/// `(A_e, B_e)` for every edge, by deleting it from the tree.
pub fn edge_cuts(real: &OrientedTreeRealization) -> Vec<PartialCut> {
    (0..real.edges.len())
        .map(|e| {
            let side = tail_side(real, e);
            let a = (0..real.terminals.len()).filter(|&s| real.subtrees[s].iter().all(|&u| side[u]));
            let b = (0..real.terminals.len()).filter(|&s| real.subtrees[s].iter().all(|&u| !side[u]));
            PartialCut::new(a, b).expect("sides are disjoint")
        })
        .collect()
}

pub fn cut_decomposition(real: &OrientedTreeRealization, mu: &DirectedDistance) -> Result<LaminarDecomposition> {
    real.validate(mu)?;
    let mut merged: BTreeMap<PartialCut, Rational> = BTreeMap::new();
    for (cut, a) in edge_cuts(real).into_iter().zip(&real.alpha) {
        if a.is_positive() && !cut.a.is_empty() && !cut.b.is_empty() {
            *merged.entry(cut).or_insert_with(Rational::zero) += a;
        }
    }
    let (cuts, weights) = merged.into_iter().unzip();
    let dec = LaminarDecomposition { cuts, weights };
    dec.validate(mu)?;
    Ok(dec)
}

/// Which side combination a laminar pair forbids: `(sign_i, sign_j)` with
/// `false` for the A-side.
fn forbidden(ci: &PartialCut, cj: &PartialCut) -> Option<(bool, bool)> {
    let (a, b, a2, b2) = (&ci.a, &ci.b, &cj.a, &cj.b);
    if a.is_subset(b2) && b.is_superset(a2) {
        Some((false, false))
    } else if a.is_subset(a2) && b.is_superset(b2) {
        Some((false, true))
    } else if a.is_superset(a2) && b.is_subset(b2) {
        Some((true, false))
    } else if a.is_superset(b2) && b.is_subset(a2) {
        Some((true, true))
    } else {
        None
    }
}

/// Build the tree of a weighted laminar family: one node per consistent
/// choice of sides, edges oriented from the A-side to the B-side.
pub fn laminar_to_realization(ground: &[String], dec: &LaminarDecomposition) -> Result<OrientedTreeRealization> {
    let k = dec.cuts.len();
    let n = ground.len();
    let mut forbid = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                forbid[i][j] = Some(forbidden(&dec.cuts[i], &dec.cuts[j]).ok_or_else(|| {
                    Error::Invalid("family is not laminar".into())
                })?);
            }
        }
    }
    let consistent = |sig: &[bool]| {
        (0..k).all(|i| (0..k).all(|j| i == j || forbid[i][j] != Some((sig[i], sig[j]))))
    };
    // one consistent vector by backtracking
    fn extend(
        sig: &mut Vec<bool>,
        k: usize,
        forbid: &[Vec<Option<(bool, bool)>>],
    ) -> bool {
        let i = sig.len();
        if i == k {
            return true;
        }
        for v in [false, true] {
            if (0..i).all(|j| forbid[j][i] != Some((sig[j], v))) {
                sig.push(v);
                if extend(sig, k, forbid) {
                    return true;
                }
                sig.pop();
            }
        }
        false
    }
    let mut first = Vec::new();
    if !extend(&mut first, k, &forbid) {
        return Err(Error::Invalid("laminar family has no consistent side choice".into()));
    }
    let mut nodes: Vec<Vec<bool>> = vec![first];
    let mut edges = Vec::new();
    let mut alpha = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        for c in 0..k {
            let mut next = nodes[i].clone();
            next[c] = !next[c];
            if !consistent(&next) {
                continue;
            }
            let j = match nodes.iter().position(|s| *s == next) {
                Some(j) => j,
                None => {
                    nodes.push(next);
                    nodes.len() - 1
                }
            };
            let (tail, head) = if nodes[i][c] { (j, i) } else { (i, j) };
            if !edges.contains(&(tail, head)) {
                edges.push((tail, head));
                alpha.push(dec.weights[c].clone());
            }
        }
        i += 1;
    }
    if nodes.len() != k + 1 {
        return Err(Error::Invalid("side choices do not form a tree".into()));
    }
    let subtrees = (0..n)
        .map(|s| {
            (0..nodes.len())
                .filter(|&u| {
                    (0..k).all(|c| {
                        let cut = &dec.cuts[c];
                        (!cut.a.contains(&s) || !nodes[u][c]) && (!cut.b.contains(&s) || nodes[u][c])
                    })
                })
                .collect()
        })
        .collect();
    Ok(OrientedTreeRealization {
        terminals: ground.to_vec(),
        nodes: (0..nodes.len()).map(|i| format!("v{i}")).collect(),
        edges,
        alpha,
        subtrees,
    })
}

#[derive(Clone, Debug)]
pub struct RealizationConfig {
    pub max_terminals: usize,
    pub node_budget: usize,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        RealizationConfig {
            max_terminals: 8,
            node_budget: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealizationOutcome {
    Found(OrientedTreeRealization, LaminarDecomposition),
    NoRealization,
    UndecidedByBudget,
}

impl RealizationOutcome {
    pub fn realization(&self) -> Option<&OrientedTreeRealization> {
        match self {
            RealizationOutcome::Found(r, _) => Some(r),
            _ => None,
        }
    }
}

fn mask(set: &BTreeSet<usize>) -> u32 {
    set.iter().fold(0, |m, &i| m | 1 << i)
}

/// Partial cuts with both sides nonempty and `A x B` inside the support.
fn candidate_cuts(mu: &DirectedDistance) -> Vec<PartialCut> {
    let n = mu.len();
    let mut out = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut x = code;
        let mut a = BTreeSet::new();
        let mut b = BTreeSet::new();
        for s in 0..n {
            match x % 3 {
                1 => {
                    a.insert(s);
                }
                2 => {
                    b.insert(s);
                }
                _ => {}
            }
            x /= 3;
        }
        if a.is_empty() || b.is_empty() {
            continue;
        }
        if a.iter().all(|&s| b.iter().all(|&t| mu.get(s, t).is_positive())) {
            out.push(PartialCut { a, b });
        }
    }
    out.sort_by(|x, y| {
        (y.a.len() + y.b.len())
            .cmp(&(x.a.len() + x.b.len()))
            .then((mask(&x.a), mask(&x.b)).cmp(&(mask(&y.a), mask(&y.b))))
    });
    out
}

/// Nonnegative weights on `cuts` summing to `mu`, if any.
fn weights_for(mu: &DirectedDistance, cuts: &[&PartialCut]) -> Option<Vec<Rational>> {
    let pairs: Vec<(usize, usize)> = mu.pairs().collect();
    // pairs with positive weight must be covered
    for &(s, t) in &pairs {
        if mu.get(s, t).is_positive() && !cuts.iter().any(|c| c.a.contains(&s) && c.b.contains(&t)) {
            return None;
        }
    }
    let mut lp = LinearProgram::new(cuts.len());
    for &(s, t) in &pairs {
        let coeffs: Vec<(usize, Rational)> = cuts
            .iter()
            .enumerate()
            .filter(|(_, c)| c.a.contains(&s) && c.b.contains(&t))
            .map(|(i, _)| (i, rat(1)))
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        lp.add(coeffs, Relation::Eq, mu.get(s, t).clone());
    }
    match lp.solve() {
        LpOutcome::Optimal(sol) => Some(sol.x),
        _ => None,
    }
}

fn support_family(cuts: &[&PartialCut], w: &[Rational]) -> LaminarDecomposition {
    let (cuts, weights) = cuts
        .iter()
        .zip(w)
        .filter(|(_, w)| w.is_positive())
        .map(|(c, w)| ((*c).clone(), w.clone()))
        .unzip();
    LaminarDecomposition { cuts, weights }
}

struct Search<'a> {
    mu: &'a DirectedDistance,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    /// Include/exclude branching over the pool with LP feasibility pruning.
    fn run(&mut self, chosen: &mut Vec<PartialCut>, pool: &[PartialCut]) -> Option<Option<LaminarDecomposition>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let mine: Vec<&PartialCut> = chosen.iter().collect();
        if let Some(w) = weights_for(self.mu, &mine) {
            return Some(Some(support_family(&mine, &w)));
        }
        let all: Vec<&PartialCut> = chosen.iter().chain(pool).collect();
        let Some(w) = weights_for(self.mu, &all) else {
            return Some(None);
        };
        let dec = support_family(&all, &w);
        if is_laminar_family(&dec.cuts) && !chosen.is_empty() {
            return Some(Some(dec));
        }
        let Some((first, rest)) = pool.split_first() else {
            return Some(None);
        };
        let compatible: Vec<PartialCut> = rest.iter().filter(|c| c.laminar_with(first)).cloned().collect();
        chosen.push(first.clone());
        let inc = self.run(chosen, &compatible);
        chosen.pop();
        match inc {
            None => return None,
            Some(Some(d)) => return Some(Some(d)),
            Some(None) => {}
        }
        self.run(chosen, rest)
    }
}

/// Decide whether `mu` is a positive combination of a laminar family of
/// partial cuts, and build the corresponding tree.
pub fn oriented_tree_realization(mu: &DirectedDistance, config: &RealizationConfig) -> Result<RealizationOutcome> {
    if mu.len() > config.max_terminals {
        return Ok(RealizationOutcome::UndecidedByBudget);
    }
    let pool = candidate_cuts(mu);
    let mut search = Search {
        mu,
        nodes: 0,
        budget: config.node_budget,
    };
    let found = match search.run(&mut Vec::new(), &pool) {
        None => return Ok(RealizationOutcome::UndecidedByBudget),
        Some(None) => return Ok(RealizationOutcome::NoRealization),
        Some(Some(dec)) => dec,
    };
    dec_to_outcome(mu, found)
}

fn dec_to_outcome(mu: &DirectedDistance, dec: LaminarDecomposition) -> Result<RealizationOutcome> {
    dec.validate(mu)?;
    let real = laminar_to_realization(mu.elements(), &dec)?;
    real.validate(mu)
        .map_err(|e| Error::TheoremViolation(format!("laminar family gave an invalid tree: {e}")))?;
    Ok(RealizationOutcome::Found(real, dec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProperMode {
    FromRealization,
    Conservative,
}

/// Terminals whose subtree is a single node or a directed path (sufficient
/// for properness); the empty set without a realization.
pub fn proper_terminals(real: Option<&OrientedTreeRealization>) -> (BTreeSet<usize>, ProperMode) {
    match real {
        Some(r) => (
            (0..r.terminals.len()).filter(|&s| r.is_path_subtree(s)).collect(),
            ProperMode::FromRealization,
        ),
        None => (BTreeSet::new(), ProperMode::Conservative),
    }
}

/// Simple loopless digraph on named nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommodityGraph {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl CommodityGraph {
    pub fn new(nodes: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if edges.iter().any(|&(x, y)| x == y || x >= nodes.len() || y >= nodes.len()) {
            return Err(Error::Invalid("commodity graph must be loopless on its nodes".into()));
        }
        Ok(CommodityGraph { nodes, edges })
    }

    pub fn from_distance(mu: &DirectedDistance) -> Result<Self> {
        let mut edges = Vec::new();
        for (s, t) in mu.pairs() {
            let v = mu.get(s, t);
            if *v == rat(1) {
                edges.push((s, t));
            } else if !v.is_zero() {
                return Err(Error::Invalid("distance is not 0-1 valued".into()));
            }
        }
        CommodityGraph::new(mu.elements().to_vec(), edges)
    }

    fn has(&self, x: usize, y: usize) -> bool {
        self.edges.contains(&(x, y))
    }
}

pub fn commodity_to_distance(h: &CommodityGraph) -> Result<DirectedDistance> {
    DirectedDistance::from_fn(h.nodes.clone(), |s, t| {
        if h.has(s, t) {
            rat(1)
        } else {
            Rational::zero()
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuasiType {
    Source,
    Sink,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommodityRecognition {
    pub quasi_complete: Option<(BTreeSet<usize>, QuasiType)>,
    /// The collapsed base graph and, per base node, the original nodes.
    pub multipartite_extension: Option<(CommodityGraph, Vec<Vec<usize>>)>,
}

impl CommodityRecognition {
    pub fn succeeds(&self) -> bool {
        self.quasi_complete.is_some() || self.multipartite_extension.is_some()
    }
}

/// Largest complete part `T` satisfying conditions (0)-(2), if any.
pub fn quasi_complete_part(h: &CommodityGraph) -> Option<(BTreeSet<usize>, QuasiType)> {
    let n = h.nodes.len();
    let mut subsets: Vec<u32> = (1u32..1 << n).collect();
    subsets.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    for m in subsets {
        let inside = |x: usize| m >> x & 1 == 1;
        let t: Vec<usize> = (0..n).filter(|&x| inside(x)).collect();
        if !h.edges.iter().all(|&(x, y)| inside(x) || inside(y)) {
            continue;
        }
        if !t.iter().all(|&x| t.iter().all(|&y| x == y || h.has(x, y))) {
            continue;
        }
        let between: Vec<&(usize, usize)> = h.edges.iter().filter(|&&(x, y)| inside(x) != inside(y)).collect();
        let entering = between.iter().all(|&&(_, y)| inside(y));
        let leaving = between.iter().all(|&&(x, _)| inside(x));
        if entering {
            return Some((t.into_iter().collect(), QuasiType::Source));
        }
        if leaving {
            return Some((t.into_iter().collect(), QuasiType::Sink));
        }
    }
    None
}

pub fn recognize_commodity_graph(h: &CommodityGraph) -> CommodityRecognition {
    let n = h.nodes.len();
    let quasi_complete = quasi_complete_part(h);
    // collapse classes of non-adjacent twins
    let twins = |x: usize, y: usize| {
        !h.has(x, y)
            && !h.has(y, x)
            && (0..n).all(|z| z == x || z == y || (h.has(x, z) == h.has(y, z) && h.has(z, x) == h.has(z, y)))
    };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        match classes.iter_mut().find(|c| twins(c[0], x)) {
            Some(c) => c.push(x),
            None => classes.push(vec![x]),
        }
    }
    let base_nodes: Vec<String> = classes.iter().map(|c| h.nodes[c[0]].clone()).collect();
    let base_edges = (0..classes.len()).flat_map(|i| (0..classes.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && h.has(classes[i][0], classes[j][0]));
    let base = CommodityGraph::new(base_nodes, base_edges.collect::<Vec<_>>()).expect("loopless");
    let multipartite_extension = quasi_complete_part(&base).map(|_| (base, classes));
    CommodityRecognition {
        quasi_complete,
        multipartite_extension,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn all_one() -> DirectedDistance {
        DirectedDistance::all_one(names(&["s", "t", "u"]))
    }

    fn star() -> OrientedTreeRealization {
        OrientedTreeRealization {
            terminals: names(&["x", "y"]),
            nodes: names(&["v0", "v1", "v2"]),
            edges: vec![(1, 0), (2, 0)],
            alpha: vec![rat(1), rat(1)],
            subtrees: vec![BTreeSet::from([1]), BTreeSet::from([2])],
        }
    }

    #[test]
    fn tree_distance_examples() {
        let t = star();
        assert_eq!(t.tree_distance(1, 2).unwrap(), rat(1));
        assert_eq!(t.tree_distance(1, 1).unwrap(), rat(0));
        assert!(t.tree_distance(0, 7).is_err());
        let path = OrientedTreeRealization {
            terminals: names(&["s"]),
            nodes: names(&["a", "b", "c"]),
            edges: vec![(0, 1), (1, 2)],
            alpha: vec![rat(2), rat(3)],
            subtrees: vec![BTreeSet::from([0])],
        };
        assert_eq!(path.tree_distance(0, 2).unwrap(), rat(5));
        assert_eq!(path.tree_distance(2, 0).unwrap(), rat(0));
    }

    #[test]
    fn interval_examples() {
        let single = DirectedDistance::from_int_rows(&["s", "t"], &[&[0, 1], &[0, 0]]).unwrap();
        let rep = interval_representation(&single);
        rep.representation().unwrap().validate(&single).unwrap();
        match interval_representation(&all_one()) {
            IntervalOutcome::NotRepresentable(cert) => assert!(!cert.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
        let zero = DirectedDistance::zeros(names(&["a", "b", "c"]));
        let rep = interval_representation(&zero);
        let rep = rep.representation().unwrap();
        rep.validate(&zero).unwrap();
        assert!(rep.a.iter().chain(&rep.b).all(|v| v.is_zero()));
    }

    #[test]
    fn all_one_is_a_sink_star() {
        let mu = all_one();
        let out = oriented_tree_realization(&mu, &RealizationConfig::default()).unwrap();
        let real = out.realization().expect("realizable");
        real.validate(&mu).unwrap();
        assert_eq!(real.nodes.len(), 4);
        let center = (0..4).find(|&u| real.edges.iter().filter(|e| e.1 == u).count() == 3).unwrap();
        assert!(real.edges.iter().all(|&(_, y)| y == center));
        assert!(real.subtrees.iter().all(|f| f.len() == 1 && !f.contains(&center)));
        let (proper, mode) = proper_terminals(Some(real));
        assert_eq!(proper.len(), 3);
        assert_eq!(mode, ProperMode::FromRealization);
        assert_eq!(proper_terminals(None), (BTreeSet::new(), ProperMode::Conservative));
        let dec = cut_decomposition(real, &mu).unwrap();
        assert_eq!(dec.cuts.len(), 3);
        assert!(dec.cuts.iter().all(|c| c.a.len() == 1 && c.b.len() == 2));
    }

    #[test]
    fn two_commodity_has_no_realization() {
        let mu = DirectedDistance::from_int_rows(
            &["s", "t", "s2", "t2"],
            &[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]],
        )
        .unwrap();
        let out = oriented_tree_realization(&mu, &RealizationConfig::default()).unwrap();
        assert_eq!(out, RealizationOutcome::NoRealization);
    }

    #[test]
    fn single_cut_is_one_edge() {
        let g = names(&["s", "t", "u"]);
        let mu = crate::distances::cut_distance(&PartialCut::new([0], [1, 2]).unwrap(), &g).unwrap();
        let out = oriented_tree_realization(&mu, &RealizationConfig::default()).unwrap();
        let real = out.realization().unwrap();
        assert_eq!(real.edges.len(), 1);
        let dec = cut_decomposition(real, &mu).unwrap();
        assert_eq!(dec.cuts, vec![PartialCut::new([0], [1, 2]).unwrap()]);
    }

    #[test]
    fn path_decomposition() {
        let real = OrientedTreeRealization {
            terminals: names(&["s", "t", "u"]),
            nodes: names(&["a", "b", "c"]),
            edges: vec![(0, 1), (1, 2)],
            alpha: vec![rat(1), rat(1)],
            subtrees: vec![BTreeSet::from([0]), BTreeSet::from([1]), BTreeSet::from([2])],
        };
        let mu = real.distance().unwrap();
        let dec = cut_decomposition(&real, &mu).unwrap();
        assert!(dec.cuts.contains(&PartialCut::new([0], [1, 2]).unwrap()));
        assert!(dec.cuts.contains(&PartialCut::new([0, 1], [2]).unwrap()));
        let back = laminar_to_realization(mu.elements(), &dec).unwrap();
        back.validate(&mu).unwrap();
        assert_eq!(OrientedTreeRealization::from_json(&real.to_json()).unwrap(), real);
    }

    #[test]
    fn commodity_graph_examples() {
        let complete = CommodityGraph::new(names(&["a", "b", "c"]), [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]).unwrap();
        let rec = recognize_commodity_graph(&complete);
        assert_eq!(rec.quasi_complete.unwrap().0.len(), 3);
        assert_eq!(commodity_to_distance(&complete).unwrap(), DirectedDistance::all_one(names(&["a", "b", "c"])));
        let into_t = CommodityGraph::new(names(&["t", "a", "b"]), [(1, 0), (2, 0)]).unwrap();
        let (t, kind) = recognize_commodity_graph(&into_t).quasi_complete.unwrap();
        assert_eq!(t, BTreeSet::from([0]));
        assert_eq!(kind, QuasiType::Source);
        let two = CommodityGraph::new(names(&["s", "t", "s2", "t2"]), [(0, 1), (2, 3)]).unwrap();
        assert!(!recognize_commodity_graph(&two).succeeds());
        let empty = CommodityGraph::new(names(&["a", "b"]), []).unwrap();
        assert!(commodity_to_distance(&empty).unwrap().is_zero());
    }
}
