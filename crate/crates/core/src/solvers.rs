//! Solvers for the weighted maximum multiflow problem: the metric LP dual,
//! the path LP, tree min-max via min-cuts, splitting-off, the min-cost
//! circulation reduction for interval weights, and locking.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::classify::{edge_cuts, laminar_to_realization, IntervalRepresentation, OrientedTreeRealization};
use crate::distances::{is_laminar_family, DirectedDistance, LaminarDecomposition, PartialCut};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, PivotRule, Relation};
use crate::network::{
    decompose_circulation, eulerian_status, min_cost_circulation, min_cut, Edge, Network,
};
use crate::rational::{self, rat, Rational};

/// S-paths as node sequences with positive values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multiflow {
    pub paths: Vec<Vec<usize>>,
    pub values: Vec<Rational>,
}

impl Multiflow {
    pub fn new() -> Self {
        Multiflow::default()
    }

    /// Add `value` on `path`, merging with an identical path.
    pub fn push(&mut self, path: Vec<usize>, value: Rational) {
        if !value.is_positive() {
            return;
        }
        match self.paths.iter().position(|p| *p == path) {
            Some(i) => self.values[i] += value,
            None => {
                self.paths.push(path);
                self.values.push(value);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(rational::is_integral)
    }

    pub fn max_denominator(&self) -> BigInt {
        self.values
            .iter()
            .map(|v| v.denom().clone())
            .max()
            .unwrap_or_else(BigInt::one)
    }

    /// Capacity and S-path checks; names the first violated edge.
    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.paths.len() != self.values.len() {
            return Err(Error::Invalid("one value per path required".into()));
        }
        let mut load: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (p, v) in self.paths.iter().zip(&self.values) {
            if v.is_negative() {
                return Err(Error::Infeasible("negative path value".into()));
            }
            let (Some(&s), Some(&t)) = (p.first(), p.last()) else {
                return Err(Error::Infeasible("empty path".into()));
            };
            if p.iter().any(|&u| u >= net.node_count()) {
                return Err(Error::Infeasible("path node out of range".into()));
            }
            if s == t || !net.is_terminal(s) || !net.is_terminal(t) {
                return Err(Error::Infeasible("path does not join distinct terminals".into()));
            }
            if p.iter().collect::<BTreeSet<_>>().len() != p.len() {
                return Err(Error::Infeasible("path repeats a node".into()));
            }
            for w in p.windows(2) {
                *load.entry((w[0], w[1])).or_insert_with(Rational::zero) += v;
            }
        }
        let caps = pair_capacities(net);
        for ((x, y), l) in load {
            let c = caps.get(&(x, y)).copied().unwrap_or(0);
            if l > rat(c) {
                return Err(Error::Infeasible(format!(
                    "capacity exceeded on edge {} -> {}: {} > {}",
                    net.nodes()[x],
                    net.nodes()[y],
                    rational::format(&l),
                    c
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, net: &Network) -> Value {
        let paths: Vec<Value> = self
            .paths
            .iter()
            .zip(&self.values)
            .map(|(p, v)| {
                json!({
                    "nodes": p.iter().map(|&u| net.nodes()[u].clone()).collect::<Vec<_>>(),
                    "value": rational::to_json_value(v),
                })
            })
            .collect();
        json!(paths)
    }

    pub fn from_json(v: &Value, net: &Network) -> Result<Self> {
        let mut out = Multiflow::new();
        for item in v
            .as_array()
            .ok_or_else(|| Error::Parse("multiflow must be a list of paths".into()))?
        {
            let nodes = item
                .get("nodes")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("path needs \"nodes\"".into()))?
                .iter()
                .map(|n| {
                    n.as_str()
                        .ok_or_else(|| Error::Parse("node names must be strings".into()))
                        .and_then(|s| net.node_index(s))
                })
                .collect::<Result<Vec<_>>>()?;
            let value = rational::from_json_value(
                item.get("value").ok_or_else(|| Error::Parse("path needs \"value\"".into()))?,
            )?;
            out.paths.push(nodes);
            out.values.push(value);
        }
        Ok(out)
    }
}

/// Total capacity per ordered node pair.
fn pair_capacities(net: &Network) -> BTreeMap<(usize, usize), i64> {
    let mut caps = BTreeMap::new();
    for e in net.edges() {
        if e.tail != e.head {
            *caps.entry((e.tail, e.head)).or_insert(0) += e.cap;
        }
    }
    caps
}

/// Network node of each element of `mu`; the element set must equal the
/// terminal set.
pub fn terminal_nodes(names: &[String], net: &Network) -> Result<Vec<usize>> {
    let ours: BTreeSet<&String> = names.iter().collect();
    let theirs: BTreeSet<String> = net.terminal_names().into_iter().collect();
    if ours.len() != theirs.len() || ours.iter().any(|s| !theirs.contains(*s)) {
        return Err(Error::Invalid(
            "weight elements must coincide with the network terminals".into(),
        ));
    }
    names.iter().map(|s| net.node_index(s)).collect()
}

pub fn flow_value(mu: &DirectedDistance, net: &Network, f: &Multiflow) -> Result<Rational> {
    f.validate(net)?;
    let nodes = terminal_nodes(mu.elements(), net)?;
    let idx = |u: usize| nodes.iter().position(|&x| x == u).expect("terminal");
    Ok(f
        .paths
        .iter()
        .zip(&f.values)
        .map(|(p, v)| v * mu.get(idx(p[0]), idx(*p.last().expect("nonempty"))))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Lp,
    Tree,
    Mcc,
    Locking,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Lp => "lp",
            Method::Tree => "tree",
            Method::Mcc => "mcc",
            Method::Locking => "locking",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Method::Lp),
            "tree" => Ok(Method::Tree),
            "mcc" => Ok(Method::Mcc),
            "locking" => Ok(Method::Locking),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A constrained min-cut `X` for the terminal cut `(A, B)`.
    MinCut {
        a: Vec<String>,
        b: Vec<String>,
        side: Vec<String>,
        capacity: i64,
        weight: Rational,
    },
    /// An optimal node map into the tree.
    Location {
        assignment: BTreeMap<String, String>,
        value: Rational,
    },
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        match self {
            Certificate::MinCut {
                a,
                b,
                side,
                capacity,
                weight,
            } => json!({
                "kind": "min_cut",
                "A": a,
                "B": b,
                "X": side,
                "capacity": capacity,
                "weight": rational::to_json_value(weight),
            }),
            Certificate::Location { assignment, value } => json!({
                "kind": "location",
                "assignment": assignment,
                "value": rational::to_json_value(value),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let strings = |key: &str| -> Result<Vec<String>> {
            serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
                .map_err(|_| Error::Parse(format!("certificate needs string list {key:?}")))
        };
        let value_of = |key: &str| {
            rational::from_json_value(v.get(key).ok_or_else(|| Error::Parse(format!("missing {key:?}")))?)
        };
        match v.get("kind").and_then(Value::as_str) {
            Some("min_cut") => Ok(Certificate::MinCut {
                a: strings("A")?,
                b: strings("B")?,
                side: strings("X")?,
                capacity: v
                    .get("capacity")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| Error::Parse("missing \"capacity\"".into()))?,
                weight: value_of("weight")?,
            }),
            Some("location") => Ok(Certificate::Location {
                assignment: serde_json::from_value(v.get("assignment").cloned().unwrap_or(Value::Null))
                    .map_err(|_| Error::Parse("bad \"assignment\"".into()))?,
                value: value_of("value")?,
            }),
            _ => Err(Error::Parse("unknown certificate kind".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub value: Rational,
    pub multiflow: Option<Multiflow>,
    pub dual_metric: Option<DirectedDistance>,
    pub method: Method,
    /// False when `value` is only an upper bound on the optimum.
    pub certified: bool,
    pub certificates: Vec<Certificate>,
}

impl SolveReport {
    fn new(value: Rational, method: Method) -> Self {
        SolveReport {
            value,
            multiflow: None,
            dual_metric: None,
            method,
            certified: true,
            certificates: Vec::new(),
        }
    }

    pub fn to_json(&self, net: &Network) -> Value {
        json!({
            "value": rational::to_json_value(&self.value),
            "method": self.method.name(),
            "certified": self.certified,
            "multiflow": self.multiflow.as_ref().map(|f| f.to_json(net)),
            "dual_metric": self.dual_metric.as_ref().map(DirectedDistance::to_json),
            "certificates": self.certificates.iter().map(Certificate::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, net: &Network) -> Result<Self> {
        let value = rational::from_json_value(v.get("value").ok_or_else(|| Error::Parse("missing \"value\"".into()))?)?;
        let method = Method::parse(v.get("method").and_then(Value::as_str).unwrap_or_default())?;
        let multiflow = match v.get("multiflow") {
            None | Some(Value::Null) => None,
            Some(f) => Some(Multiflow::from_json(f, net)?),
        };
        let dual_metric = match v.get("dual_metric") {
            None | Some(Value::Null) => None,
            Some(d) => Some(DirectedDistance::from_json(d)?),
        };
        let certificates = match v.get("certificates").and_then(Value::as_array) {
            Some(list) => list.iter().map(Certificate::from_json).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        Ok(SolveReport {
            value,
            multiflow,
            dual_metric,
            method,
            certified: v.get("certified").and_then(Value::as_bool).unwrap_or(true),
            certificates,
        })
    }
}

/// Minimum of `sum c(xy) d(x,y)` over metrics `d` with `d(s,t) >= mu(s,t)`.
pub fn solve_lpd(mu: &DirectedDistance, net: &Network) -> Result<SolveReport> {
    let nodes = terminal_nodes(mu.elements(), net)?;
    let n = net.node_count();
    let var = |x: usize, y: usize| x * (n - 1) + if y > x { y - 1 } else { y };
    let mut lp = LinearProgram::new(n * (n - 1));
    for ((x, y), c) in pair_capacities(net) {
        lp.objective[var(x, y)] = rat(-c);
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != y && y != z && x != z {
                    lp.add(
                        vec![(var(x, z), rat(1)), (var(x, y), rat(-1)), (var(y, z), rat(-1))],
                        Relation::Le,
                        rat(0),
                    );
                }
            }
        }
    }
    for (s, t) in mu.pairs() {
        if mu.get(s, t).is_positive() {
            lp.add(vec![(var(nodes[s], nodes[t]), rat(1))], Relation::Ge, mu.get(s, t).clone());
        }
    }
    let sol = match lp.solve() {
        LpOutcome::Optimal(sol) => sol,
        other => {
            return Err(Error::TheoremViolation(format!(
                "metric LP should be feasible and bounded, got {other:?}"
            )))
        }
    };
    let d = DirectedDistance::from_fn(net.nodes().to_vec(), |x, y| {
        if x == y {
            Rational::zero()
        } else {
            sol.x[var(x, y)].clone()
        }
    })?;
    let mut report = SolveReport::new(-sol.value, Method::Lp);
    report.dual_metric = Some(d);
    Ok(report)
}

pub const DEFAULT_PATH_BUDGET: usize = 10;
const MAX_PATHS: usize = 20_000;

/// Simple paths from `s` to `t` in adjacency order.
fn simple_paths(adj: &[Vec<usize>], s: usize, t: usize, out: &mut Vec<Vec<usize>>) -> Result<()> {
    fn go(adj: &[Vec<usize>], t: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) -> Result<()> {
        let u = *path.last().expect("nonempty");
        if u == t {
            if out.len() >= MAX_PATHS {
                return Err(Error::Budget(format!("more than {MAX_PATHS} S-paths")));
            }
            out.push(path.clone());
            return Ok(());
        }
        for &v in &adj[u] {
            if !on[v] {
                on[v] = true;
                path.push(v);
                go(adj, t, path, on, out)?;
                path.pop();
                on[v] = false;
            }
        }
        Ok(())
    }
    let mut on = vec![false; adj.len()];
    on[s] = true;
    go(adj, t, &mut vec![s], &mut on, out)
}

/// All simple S-paths for pairs with positive weight, with their weights.
pub(crate) fn weighted_paths(mu: &DirectedDistance, net: &Network, reverse: bool) -> Result<Vec<(Vec<usize>, Rational)>> {
    let nodes = terminal_nodes(mu.elements(), net)?;
    let caps = pair_capacities(net);
    let mut adj = vec![Vec::new(); net.node_count()];
    for (&(x, y), &c) in &caps {
        if c > 0 {
            adj[x].push(y);
        }
    }
    if reverse {
        adj.iter_mut().for_each(|a| a.reverse());
    }
    let mut pairs: Vec<(usize, usize)> = mu.pairs().filter(|&(s, t)| mu.get(s, t).is_positive()).collect();
    if reverse {
        pairs.reverse();
    }
    let mut out = Vec::new();
    for (s, t) in pairs {
        let mut found = Vec::new();
        simple_paths(&adj, nodes[s], nodes[t], &mut found)?;
        out.extend(found.into_iter().map(|p| (p, mu.get(s, t).clone())));
        if out.len() > MAX_PATHS {
            return Err(Error::Budget(format!("more than {MAX_PATHS} S-paths")));
        }
    }
    Ok(out)
}

fn packing_lp(net: &Network, paths: &[(Vec<usize>, Rational)]) -> LinearProgram {
    let mut lp = LinearProgram::new(paths.len());
    for ((x, y), c) in pair_capacities(net) {
        let coeffs: Vec<(usize, Rational)> = paths
            .iter()
            .enumerate()
            .filter(|(_, (p, _))| p.windows(2).any(|w| w[0] == x && w[1] == y))
            .map(|(j, _)| (j, rat(1)))
            .collect();
        if !coeffs.is_empty() {
            lp.add(coeffs, Relation::Le, rat(c));
        }
    }
    lp
}

fn to_multiflow(paths: &[(Vec<usize>, Rational)], x: &[Rational]) -> Multiflow {
    let mut f = Multiflow::new();
    for (j, (p, _)) in paths.iter().enumerate() {
        f.push(p.clone(), x[j].clone());
    }
    f
}

/// Packing LP over the given paths.
pub(crate) fn path_packing(net: &Network, paths: &[(Vec<usize>, Rational)], rule: PivotRule) -> Result<(Rational, Multiflow)> {
    let mut lp = packing_lp(net, paths);
    lp.pivot_rule = rule;
    for (j, (_, w)) in paths.iter().enumerate() {
        lp.objective[j] = w.clone();
    }
    let sol = lp
        .solve_primal()
        .optimal()
        .ok_or_else(|| Error::TheoremViolation("path LP should have an optimum".into()))?;
    Ok((sol.value, to_multiflow(paths, &sol.x)))
}

/// Vertices of the optimal face reached by maximizing and minimizing each
/// of the first `limit` path values with the optimum held fixed.
pub(crate) fn optimal_face_vertices(
    net: &Network,
    paths: &[(Vec<usize>, Rational)],
    value: &Rational,
    limit: usize,
) -> Result<Vec<Multiflow>> {
    let mut base = packing_lp(net, paths);
    base.add(
        paths.iter().enumerate().map(|(j, (_, w))| (j, w.clone())).collect(),
        Relation::Eq,
        value.clone(),
    );
    let mut out = Vec::new();
    for j in 0..paths.len().min(limit) {
        for sign in [1, -1] {
            let mut lp = base.clone();
            lp.objective[j] = rat(sign);
            let sol = lp
                .solve_primal()
                .optimal()
                .ok_or_else(|| Error::TheoremViolation("optimal face is empty".into()))?;
            out.push(to_multiflow(paths, &sol.x));
        }
    }
    Ok(out)
}

/// Exact path LP over all simple S-paths.
pub fn solve_path_lp(mu: &DirectedDistance, net: &Network, budget: usize) -> Result<SolveReport> {
    if net.node_count() > budget {
        return Err(Error::Budget(format!(
            "{} nodes exceed the path-enumeration budget {budget}",
            net.node_count()
        )));
    }
    let paths = weighted_paths(mu, net, false)?;
    let (value, f) = path_packing(net, &paths, PivotRule::Bland)?;
    let mut report = SolveReport::new(value, Method::Lp);
    report.multiflow = Some(f);
    Ok(report)
}

/// Terminals whose subtree is neither a node nor a directed path.
fn non_path_terminals(real: &OrientedTreeRealization) -> Vec<usize> {
    (0..real.terminals.len()).filter(|&s| !real.is_path_subtree(s)).collect()
}

/// Eulerian hypothesis of the tree min-max; returns the violated condition.
pub fn tree_hypothesis(real: &OrientedTreeRealization, net: &Network) -> Result<Option<String>> {
    let nodes = terminal_nodes(&real.terminals, net)?;
    let proper: BTreeSet<usize> = (0..real.terminals.len())
        .filter(|&s| real.is_path_subtree(s))
        .map(|s| nodes[s])
        .collect();
    let st = eulerian_status(net, &proper);
    if !st.inner {
        return Ok(Some(format!(
            "inner Eulerian condition fails at {}",
            names(net, &st.violating_nodes)
        )));
    }
    if !st.violating_terminals.is_empty() {
        return Ok(Some(format!(
            "Eulerian condition fails at terminals {} whose subtrees are not directed paths",
            names(net, &st.violating_terminals)
        )));
    }
    debug_assert!(non_path_terminals(real).iter().all(|&s| net.imbalance(nodes[s]) == 0));
    Ok(None)
}

fn names(net: &Network, list: &[usize]) -> String {
    list.iter()
        .map(|&u| net.nodes()[u].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// `(A_e, B_e)` per tree edge as network node sets.
fn edge_cut_nodes(real: &OrientedTreeRealization, nodes: &[usize]) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
    edge_cuts(real)
        .into_iter()
        .map(|c| {
            (
                c.a.iter().map(|&s| nodes[s]).collect(),
                c.b.iter().map(|&s| nodes[s]).collect(),
            )
        })
        .collect()
}

/// `sum alpha(e) min { c(out(X)) : A_e ⊆ X ⊆ V - B_e }`.
fn cut_sum(real: &OrientedTreeRealization, net: &Network, sides: &[(BTreeSet<usize>, BTreeSet<usize>)]) -> Result<Rational> {
    let mut total = Rational::zero();
    for (e, (a, b)) in sides.iter().enumerate() {
        if real.alpha[e].is_positive() {
            total += &real.alpha[e] * rat(min_cut(net, a, b)?.0);
        }
    }
    Ok(total)
}

pub const LOCATION_LIMIT: usize = 64;
const LOCATION_NODES: usize = 2_000_000;

/// Exhaustive minimum of `sum c(xy) D(rho(x), rho(y))` with `rho(s) ∈ F_s`,
/// stopping early once `target` (a lower bound) is reached. `None` when
/// the search budget runs out.
pub fn location_optimum(
    real: &OrientedTreeRealization,
    net: &Network,
    target: &Rational,
) -> Result<Option<(Rational, Vec<usize>)>> {
    let nodes = terminal_nodes(&real.terminals, net)?;
    let k = real.nodes.len();
    let mut dist = vec![vec![Rational::zero(); k]; k];
    for (u, row) in dist.iter_mut().enumerate() {
        for (v, d) in row.iter_mut().enumerate() {
            *d = real.tree_distance(u, v)?;
        }
    }
    let n = net.node_count();
    let mut order: Vec<usize> = nodes.clone();
    order.extend((0..n).filter(|u| !nodes.contains(u)));
    let choices: Vec<Vec<usize>> = order
        .iter()
        .map(|&x| match nodes.iter().position(|&u| u == x) {
            Some(s) => real.subtrees[s].iter().copied().collect(),
            None => (0..k).collect(),
        })
        .collect();
    let caps = pair_capacities(net);
    // edges charged once both ends are placed
    let pos: Vec<usize> = {
        let mut p = vec![0; n];
        for (i, &x) in order.iter().enumerate() {
            p[x] = i;
        }
        p
    };
    let mut by_step: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); n];
    for (&(x, y), &c) in &caps {
        if c > 0 {
            by_step[pos[x].max(pos[y])].push((x, y, rat(c)));
        }
    }
    struct State<'a> {
        order: &'a [usize],
        choices: &'a [Vec<usize>],
        by_step: &'a [Vec<(usize, usize, Rational)>],
        dist: &'a [Vec<Rational>],
        rho: Vec<usize>,
        best: Option<(Rational, Vec<usize>)>,
        target: &'a Rational,
        visited: usize,
    }
    fn go(st: &mut State, i: usize, cost: Rational) -> bool {
        st.visited += 1;
        if st.visited > LOCATION_NODES {
            return false;
        }
        if let Some((b, _)) = &st.best {
            if cost >= *b || *b == *st.target {
                return true;
            }
        }
        if i == st.order.len() {
            st.best = Some((cost, st.rho.clone()));
            return true;
        }
        let x = st.order[i];
        let mut options: Vec<(Rational, usize)> = st.choices[i]
            .iter()
            .map(|&w| {
                st.rho[x] = w;
                let add: Rational = st.by_step[i]
                    .iter()
                    .map(|(a, b, c)| c * &st.dist[st.rho[*a]][st.rho[*b]])
                    .sum();
                (add, w)
            })
            .collect();
        options.sort();
        for (add, w) in options {
            st.rho[x] = w;
            if !go(st, i + 1, &cost + add) {
                return false;
            }
        }
        true
    }
    let mut st = State {
        order: &order,
        choices: &choices,
        by_step: &by_step,
        dist: &dist,
        rho: vec![0; n],
        best: None,
        target,
        visited: 0,
    };
    if !go(&mut st, 0, Rational::zero()) {
        return Ok(None);
    }
    Ok(st.best)
}

/// Tree min-max: the weighted sum of constrained min-cuts, certified when
/// the Eulerian hypothesis holds and an upper bound otherwise.
pub fn solve_tree(real: &OrientedTreeRealization, net: &Network) -> Result<SolveReport> {
    let mu = real.distance()?;
    real.validate(&mu)?;
    let nodes = terminal_nodes(&real.terminals, net)?;
    let sides = edge_cut_nodes(real, &nodes);
    let mut report = SolveReport::new(Rational::zero(), Method::Tree);
    for (e, (a, b)) in sides.iter().enumerate() {
        let (cap, x) = min_cut(net, a, b)?;
        report.value += &real.alpha[e] * rat(cap);
        let named = |set: &BTreeSet<usize>| set.iter().map(|&u| net.nodes()[u].clone()).collect();
        report.certificates.push(Certificate::MinCut {
            a: named(a),
            b: named(b),
            side: named(&x),
            capacity: cap,
            weight: real.alpha[e].clone(),
        });
    }
    report.certified = tree_hypothesis(real, net)?.is_none();
    if net.node_count() * real.nodes.len() <= LOCATION_LIMIT {
        if let Some((loc, rho)) = location_optimum(real, net, &report.value)? {
            if loc < report.value {
                return Err(Error::TheoremViolation(format!(
                    "location value {} is below the cut sum {}",
                    rational::format(&loc),
                    rational::format(&report.value)
                )));
            }
            if report.certified && loc != report.value {
                return Err(Error::TheoremViolation(format!(
                    "location optimum {} differs from the cut sum {}",
                    rational::format(&loc),
                    rational::format(&report.value)
                )));
            }
            report.certificates.push(Certificate::Location {
                assignment: rho
                    .iter()
                    .enumerate()
                    .map(|(x, &w)| (net.nodes()[x].clone(), real.nodes[w].clone()))
                    .collect(),
                value: loc,
            });
        }
    }
    Ok(report)
}

/// Unit-capacity edge with the original edge ids it stands for.
#[derive(Clone, Debug)]
struct UnitEdge {
    tail: usize,
    head: usize,
    route: Vec<usize>,
}

fn unit_network(net: &Network, units: &[UnitEdge]) -> Result<Network> {
    net.with_edges(
        units
            .iter()
            .map(|u| Edge {
                tail: u.tail,
                head: u.head,
                cap: 1,
            })
            .collect(),
    )
}

/// Drop closed sub-walks so that the route visits each node once.
fn shortcut(net: &Network, route: &[usize]) -> Vec<usize> {
    let mut nodes = vec![net.edges()[route[0]].tail];
    for &e in route {
        let h = net.edges()[e].head;
        if let Some(p) = nodes.iter().position(|&u| u == h) {
            nodes.truncate(p + 1);
        } else {
            nodes.push(h);
        }
    }
    nodes
}

/// Integral optimum by splitting off consecutive edge pairs while the
/// min-cut sum stays unchanged.
pub fn solve_tree_integral(real: &OrientedTreeRealization, net: &Network) -> Result<SolveReport> {
    let mu = real.distance()?;
    real.validate(&mu)?;
    if let Some(why) = tree_hypothesis(real, net)? {
        return Err(Error::Hypothesis(why));
    }
    let nodes = terminal_nodes(&real.terminals, net)?;
    let sides = edge_cut_nodes(real, &nodes);
    let term_of = |u: usize| nodes.iter().position(|&x| x == u);
    let direct = |units: &[UnitEdge]| -> Rational {
        units
            .iter()
            .filter_map(|u| match (term_of(u.tail), term_of(u.head)) {
                (Some(s), Some(t)) => Some(mu.get(s, t).clone()),
                _ => None,
            })
            .sum()
    };
    let mut units: Vec<UnitEdge> = Vec::new();
    for (i, e) in net.edges().iter().enumerate() {
        if e.tail != e.head {
            for _ in 0..e.cap {
                units.push(UnitEdge {
                    tail: e.tail,
                    head: e.head,
                    route: vec![i],
                });
            }
        }
    }
    let target = cut_sum(real, net, &sides)?;
    let cut_values: Vec<i64> = sides
        .iter()
        .map(|(a, b)| min_cut(net, a, b).map(|r| r.0))
        .collect::<Result<_>>()?;
    while direct(&units) < target {
        let mut accepted = None;
        // splits at inner nodes first, then at terminals
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for inner_pass in [true, false] {
            for (i, ei) in units.iter().enumerate() {
                let y = ei.head;
                if net.is_terminal(y) == inner_pass {
                    continue;
                }
                for (j, ej) in units.iter().enumerate() {
                    if i != j && ej.tail == y {
                        pairs.push((i, j));
                    }
                }
            }
        }
        for (i, j) in pairs {
            let mut next: Vec<UnitEdge> = Vec::with_capacity(units.len() - 1);
            let (x, z) = (units[i].tail, units[j].head);
            for (k, u) in units.iter().enumerate() {
                if k != i && k != j {
                    next.push(u.clone());
                }
            }
            if x != z {
                let mut route = units[i].route.clone();
                route.extend(&units[j].route);
                next.push(UnitEdge { tail: x, head: z, route });
            }
            let trial = unit_network(net, &next)?;
            let mut keeps = true;
            for (e, (a, b)) in sides.iter().enumerate() {
                if real.alpha[e].is_positive() && min_cut(&trial, a, b)?.0 < cut_values[e] {
                    keeps = false;
                    break;
                }
            }
            if keeps {
                accepted = Some(next);
                break;
            }
        }
        units = accepted.ok_or_else(|| {
            Error::TheoremViolation("no value-preserving split exists".into())
        })?;
    }
    let mut f = Multiflow::new();
    for u in &units {
        if let (Some(s), Some(t)) = (term_of(u.tail), term_of(u.head)) {
            if mu.get(s, t).is_positive() {
                f.push(shortcut(net, &u.route), rat(1));
            }
        }
    }
    let value = flow_value(&mu, net, &f)?;
    if value != target {
        return Err(Error::TheoremViolation(format!(
            "integral flow value {} differs from the cut sum {}",
            rational::format(&value),
            rational::format(&target)
        )));
    }
    let mut report = SolveReport::new(value, Method::Tree);
    report.multiflow = Some(f);
    Ok(report)
}

/// Integral optimum for interval-representable weights through a
/// min-cost circulation with one terminal edge per weighted pair.
pub fn solve_interval_mcc(mu: &DirectedDistance, rep: &IntervalRepresentation, net: &Network) -> Result<SolveReport> {
    rep.validate(mu)?;
    let nodes = terminal_nodes(mu.elements(), net)?;
    let scale = rational::common_denominator(mu.pairs().map(|(s, t)| mu.get(s, t)));
    let big_cap = net.total_capacity();
    let m0 = net.edges().len();
    let mut edges = net.edges().to_vec();
    let mut cost = vec![0i64; m0];
    let mut commodity = Vec::new();
    for (s, t) in mu.pairs() {
        let w = mu.get(s, t);
        if w.is_positive() {
            let c = (w * Rational::from_integer(scale.clone()))
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Invalid("weights too large".into()))?;
            edges.push(Edge {
                tail: nodes[t],
                head: nodes[s],
                cap: big_cap,
            });
            cost.push(-c);
            commodity.push((s, t));
        }
    }
    let aug = net.with_edges(edges)?;
    let (flow, total) = min_cost_circulation(&aug, &cost)?;
    let flow: Vec<Rational> = flow.into_iter().map(rat).collect();
    let dec = decompose_circulation(&aug, &flow)?;
    let term_of = |u: usize| nodes.iter().position(|&x| x == u).expect("terminal");
    let mut f = Multiflow::new();
    for (cycle, k) in &dec.cycles {
        let Some(first) = cycle.iter().position(|&e| e >= m0) else {
            continue;
        };
        let rotated: Vec<usize> = cycle[first..].iter().chain(&cycle[..first]).copied().collect();
        let mut claimed = Rational::zero();
        let mut gained = Rational::zero();
        let mut segment: Vec<usize> = Vec::new();
        let flush = |segment: &mut Vec<usize>, f: &mut Multiflow, gained: &mut Rational| {
            if !segment.is_empty() {
                let path = crate::network::FlowDecomposition::node_sequence(&aug, segment);
                let (s, t) = (term_of(path[0]), term_of(*path.last().expect("nonempty")));
                *gained += mu.get(s, t);
                f.push(path, k.clone());
                segment.clear();
            }
        };
        for &e in &rotated {
            if e >= m0 {
                flush(&mut segment, &mut f, &mut gained);
                let (s, t) = commodity[e - m0];
                claimed += mu.get(s, t);
            } else {
                segment.push(e);
            }
        }
        flush(&mut segment, &mut f, &mut gained);
        if claimed > gained {
            return Err(Error::TheoremViolation(format!(
                "cycle claims {} but its paths carry {}",
                rational::format(&claimed),
                rational::format(&gained)
            )));
        }
    }
    let value = flow_value(mu, net, &f)?;
    let relaxed = Rational::new(BigInt::from(-total), scale);
    if value != relaxed {
        return Err(Error::TheoremViolation(format!(
            "multiflow value {} differs from the circulation bound {}",
            rational::format(&value),
            rational::format(&relaxed)
        )));
    }
    let mut report = SolveReport::new(value, Method::Mcc);
    report.multiflow = Some(f);
    Ok(report)
}

/// Merge repeated cuts and drop cuts with an empty side.
fn merged_family(family: &[PartialCut]) -> LaminarDecomposition {
    let mut merged: BTreeMap<&PartialCut, Rational> = BTreeMap::new();
    for c in family {
        if !c.a.is_empty() && !c.b.is_empty() {
            *merged.entry(c).or_insert_with(Rational::zero) += rat(1);
        }
    }
    let (cuts, weights) = merged.into_iter().map(|(c, w)| (c.clone(), w)).unzip();
    LaminarDecomposition { cuts, weights }
}

/// Integral multiflow that is a maximum `(A,B)`-flow for every cut of a
/// laminar family. Cut indices refer to `ground`, the terminal names.
pub fn lock(family: &[PartialCut], ground: &[String], net: &Network) -> Result<SolveReport> {
    if !is_laminar_family(family) {
        return Err(Error::Invalid("family is not laminar".into()));
    }
    terminal_nodes(ground, net)?;
    let dec = merged_family(family);
    let real = if dec.cuts.is_empty() {
        OrientedTreeRealization {
            terminals: ground.to_vec(),
            nodes: vec!["v0".into()],
            edges: Vec::new(),
            alpha: Vec::new(),
            subtrees: vec![BTreeSet::from([0]); ground.len()],
        }
    } else {
        laminar_to_realization(ground, &dec)?
    };
    let mut report = solve_tree_integral(&real, net)?;
    report.method = Method::Locking;
    let f = report.multiflow.as_ref().expect("integral solver returns a flow");
    if !verify_locking(f, family, ground, net)? {
        return Err(Error::TheoremViolation("integral optimum does not lock the family".into()));
    }
    Ok(report)
}

/// Whether the flow from `A` to `B` equals the min-cut for every cut.
pub fn verify_locking(f: &Multiflow, family: &[PartialCut], ground: &[String], net: &Network) -> Result<bool> {
    f.validate(net)?;
    let nodes = terminal_nodes(ground, net)?;
    for cut in family {
        let a: BTreeSet<usize> = cut.a.iter().map(|&s| nodes[s]).collect();
        let b: BTreeSet<usize> = cut.b.iter().map(|&s| nodes[s]).collect();
        let carried: Rational = f
            .paths
            .iter()
            .zip(&f.values)
            .filter(|(p, _)| a.contains(&p[0]) && b.contains(p.last().expect("nonempty")))
            .map(|(_, v)| v.clone())
            .sum();
        if carried != rat(min_cut(net, &a, &b)?.0) {
            return Ok(false);
        }
    }
    Ok(true)
}
