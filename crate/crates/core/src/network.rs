//! Directed capacitated networks with terminals: Eulerian predicates,
//! max-flow / constrained min-cut, min-cost circulation, decompositions.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub cap: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<String>,
    terminals: Vec<usize>,
    edges: Vec<Edge>,
}

impl Network {
    pub fn new(nodes: Vec<String>, terminals: Vec<usize>, edges: Vec<Edge>) -> Result<Self> {
        let n = nodes.len();
        let distinct: BTreeSet<&String> = nodes.iter().collect();
        if distinct.len() != n {
            return Err(Error::Invalid("duplicate node names".into()));
        }
        let tset: BTreeSet<usize> = terminals.iter().copied().collect();
        if tset.len() != terminals.len() || terminals.iter().any(|&t| t >= n) {
            return Err(Error::Invalid("terminals must be distinct nodes".into()));
        }
        if terminals.is_empty() {
            return Err(Error::Invalid("terminal set is empty".into()));
        }
        for e in &edges {
            if e.tail >= n || e.head >= n {
                return Err(Error::Invalid("edge endpoint out of range".into()));
            }
            if e.cap < 0 {
                return Err(Error::Invalid("negative capacity".into()));
            }
        }
        Ok(Network {
            nodes,
            terminals,
            edges,
        })
    }

    pub fn from_names(
        nodes: &[&str],
        terminals: &[&str],
        edges: &[(&str, &str, i64)],
    ) -> Result<Self> {
        let nodes: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
        let find = |s: &str| {
            nodes
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let terminals = terminals.iter().map(|t| find(t)).collect::<Result<_>>()?;
        let edges = edges
            .iter()
            .map(|&(a, b, c)| {
                Ok(Edge {
                    tail: find(a)?,
                    head: find(b)?,
                    cap: c,
                })
            })
            .collect::<Result<_>>()?;
        Network::new(nodes, terminals, edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn terminal_names(&self) -> Vec<String> {
        self.terminals.iter().map(|&t| self.nodes[t].clone()).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_terminal(&self, u: usize) -> bool {
        self.terminals.contains(&u)
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn with_edges(&self, edges: Vec<Edge>) -> Result<Self> {
        Network::new(self.nodes.clone(), self.terminals.clone(), edges)
    }

    pub fn total_capacity(&self) -> i64 {
        self.edges.iter().map(|e| e.cap).sum()
    }

    /// Out-capacity minus in-capacity.
    pub fn imbalance(&self, u: usize) -> i64 {
        self.edges
            .iter()
            .map(|e| {
                i64::from(e.tail == u) * e.cap - i64::from(e.head == u) * e.cap
            })
            .sum()
    }

    /// Capacity of the edges leaving `x`.
    pub fn cut_capacity(&self, x: &BTreeSet<usize>) -> i64 {
        self.edges
            .iter()
            .filter(|e| x.contains(&e.tail) && !x.contains(&e.head))
            .map(|e| e.cap)
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| json!([self.nodes[e.tail], self.nodes[e.head], e.cap]))
            .collect();
        json!({
            "nodes": self.nodes,
            "terminals": self.terminal_names(),
            "edges": edges,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let strings = |key: &str| -> Result<Vec<String>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing {key:?} array")))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Parse(format!("{key:?} entries must be strings")))
                })
                .collect()
        };
        let nodes = strings("nodes")?;
        let terminals = strings("terminals")?;
        let find = |s: &str| {
            nodes
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::Parse(format!("unknown node {s:?}")))
        };
        let terminals = terminals.iter().map(|t| find(t)).collect::<Result<Vec<_>>>()?;
        let edges = v
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"edges\" array".into()))?
            .iter()
            .map(|e| {
                let parts = e
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| Error::Parse("edges must be [tail, head, cap]".into()))?;
                let name = |i: usize| {
                    parts[i]
                        .as_str()
                        .ok_or_else(|| Error::Parse("edge endpoints must be strings".into()))
                };
                let cap = parts[2]
                    .as_i64()
                    .ok_or_else(|| Error::Parse("capacities must be integers".into()))?;
                Ok(Edge {
                    tail: find(name(0)?)?,
                    head: find(name(1)?)?,
                    cap,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Network::new(nodes, terminals, edges).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            if self.is_terminal(i) {
                out.push_str(&format!("  \"{n}\" [style=filled, fillcolor=gray];\n"));
            } else {
                out.push_str(&format!("  \"{n}\";\n"));
            }
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.nodes[e.tail], self.nodes[e.head], e.cap
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianStatus {
    pub inner: bool,
    pub totally: bool,
    pub properly_inner: bool,
    /// Unbalanced non-terminal nodes.
    pub violating_nodes: Vec<usize>,
    /// Unbalanced terminals outside the proper set.
    pub violating_terminals: Vec<usize>,
}

pub fn eulerian_status(net: &Network, proper: &BTreeSet<usize>) -> EulerianStatus {
    let unbalanced: Vec<usize> = (0..net.node_count())
        .filter(|&u| net.imbalance(u) != 0)
        .collect();
    let violating_nodes: Vec<usize> = unbalanced
        .iter()
        .copied()
        .filter(|&u| !net.is_terminal(u))
        .collect();
    let violating_terminals: Vec<usize> = unbalanced
        .iter()
        .copied()
        .filter(|&u| net.is_terminal(u) && !proper.contains(&u))
        .collect();
    EulerianStatus {
        inner: violating_nodes.is_empty(),
        totally: unbalanced.is_empty(),
        properly_inner: violating_nodes.is_empty() && violating_terminals.is_empty(),
        violating_nodes,
        violating_terminals,
    }
}

struct Dinic {
    n: usize,
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            n,
            head: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        self.head.push(u);
        self.to.push(v);
        self.cap.push(c);
        self.adj[u].push(id);
        self.head.push(v);
        self.to.push(u);
        self.cap.push(0);
        self.adj[v].push(id + 1);
        id
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.n];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, f: i64, level: &[usize], it: &mut [usize]) -> i64 {
        if u == t {
            return f;
        }
        while it[u] < self.adj[u].len() {
            let e = self.adj[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let d = self.push(v, t, f.min(self.cap[e]), level, it);
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut it = vec![0; self.n];
            loop {
                let f = self.push(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let level = self.levels(s);
        level.iter().map(|&l| l != usize::MAX).collect()
    }
}

fn check_sides(net: &Network, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<()> {
    if !a.is_disjoint(b) {
        return Err(Error::Invalid("source and sink sides overlap".into()));
    }
    if a.iter().chain(b).any(|&u| u >= net.node_count()) {
        return Err(Error::Invalid("node out of range".into()));
    }
    Ok(())
}

struct FlowRun {
    value: i64,
    flow: Vec<i64>,
    source_side: BTreeSet<usize>,
}

fn run_flow(net: &Network, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> FlowRun {
    let n = net.node_count();
    let (src, snk) = (n, n + 1);
    let big = net.total_capacity() + 1;
    let mut d = Dinic::new(n + 2);
    let ids: Vec<usize> = net.edges().iter().map(|e| d.add(e.tail, e.head, e.cap)).collect();
    for &u in a {
        d.add(src, u, big);
    }
    for &u in b {
        d.add(u, snk, big);
    }
    let value = if a.is_empty() || b.is_empty() { 0 } else { d.run(src, snk) };
    let flow = ids.iter().map(|&id| d.cap[id ^ 1]).collect();
    let reach = d.reachable(src);
    let source_side = (0..n).filter(|&u| reach[u]).collect();
    FlowRun {
        value,
        flow,
        source_side,
    }
}

/// `min { c(out(X)) : A ⊆ X ⊆ V - B }` with the inclusion-minimal minimizer.
pub fn min_cut(net: &Network, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<(i64, BTreeSet<usize>)> {
    check_sides(net, a, b)?;
    if a.is_empty() {
        return Ok((0, BTreeSet::new()));
    }
    let run = run_flow(net, a, b);
    Ok((run.value, run.source_side))
}

pub fn max_flow(net: &Network, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<(i64, Vec<i64>)> {
    check_sides(net, a, b)?;
    let run = run_flow(net, a, b);
    Ok((run.value, run.flow))
}

/// Minimum-cost circulation by negative cycle canceling.
pub fn min_cost_circulation(net: &Network, cost: &[i64]) -> Result<(Vec<i64>, i64)> {
    if cost.len() != net.edges().len() {
        return Err(Error::Invalid("one cost per edge required".into()));
    }
    let n = net.node_count();
    let m = net.edges().len();
    let mut flow = vec![0i64; m];
    loop {
        // residual arcs: (from, to, cost, edge, forward)
        let mut arcs: Vec<(usize, usize, i64, usize, bool)> = Vec::new();
        for (i, e) in net.edges().iter().enumerate() {
            if flow[i] < e.cap {
                arcs.push((e.tail, e.head, cost[i], i, true));
            }
            if flow[i] > 0 {
                arcs.push((e.head, e.tail, -cost[i], i, false));
            }
        }
        let Some(cycle) = negative_cycle(n, &arcs) else {
            break;
        };
        let delta = cycle
            .iter()
            .map(|&a| {
                let (_, _, _, i, fwd) = arcs[a];
                if fwd {
                    net.edges()[i].cap - flow[i]
                } else {
                    flow[i]
                }
            })
            .min()
            .expect("nonempty cycle");
        for &a in &cycle {
            let (_, _, _, i, fwd) = arcs[a];
            flow[i] += if fwd { delta } else { -delta };
        }
    }
    let total = flow.iter().zip(cost).map(|(f, c)| f * c).sum();
    Ok((flow, total))
}

/// Arc indices of a negative cycle, found by Bellman-Ford from a virtual root.
fn negative_cycle(n: usize, arcs: &[(usize, usize, i64, usize, bool)]) -> Option<Vec<usize>> {
    let mut dist = vec![0i64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..n {
        last = None;
        for (a, &(u, v, c, _, _)) in arcs.iter().enumerate() {
            if dist[u] + c < dist[v] {
                dist[v] = dist[u] + c;
                pred[v] = Some(a);
                last = Some(v);
            }
        }
        last?;
    }
    let mut v = last?;
    for _ in 0..n {
        v = arcs[pred[v].expect("relaxed")].0;
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let a = pred[v].expect("on cycle");
        cycle.push(a);
        v = arcs[a].0;
        if v == start {
            break;
        }
    }
    cycle.reverse();
    Some(cycle)
}

/// Whether the residual graph of a circulation has a negative cycle.
pub fn has_negative_residual_cycle(net: &Network, cost: &[i64], flow: &[i64]) -> bool {
    let mut arcs = Vec::new();
    for (i, e) in net.edges().iter().enumerate() {
        if flow[i] < e.cap {
            arcs.push((e.tail, e.head, cost[i], i, true));
        }
        if flow[i] > 0 {
            arcs.push((e.head, e.tail, -cost[i], i, false));
        }
    }
    negative_cycle(net.node_count(), &arcs).is_some()
}

/// Cycles and S-paths as edge-id sequences with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowDecomposition {
    pub cycles: Vec<(Vec<usize>, Rational)>,
    pub paths: Vec<(Vec<usize>, Rational)>,
}

impl FlowDecomposition {
    /// Sum of the incidence vectors, per edge.
    pub fn resum(&self, edge_count: usize) -> Vec<Rational> {
        let mut total = vec![Rational::zero(); edge_count];
        for (seq, k) in self.cycles.iter().chain(&self.paths) {
            for &e in seq {
                total[e] += k;
            }
        }
        total
    }

    pub fn node_sequence(net: &Network, seq: &[usize]) -> Vec<usize> {
        let mut out = vec![net.edges()[seq[0]].tail];
        out.extend(seq.iter().map(|&e| net.edges()[e].head));
        out
    }
}

fn excess(net: &Network, g: &[Rational], u: usize) -> Rational {
    let mut x = Rational::zero();
    for (i, e) in net.edges().iter().enumerate() {
        if e.tail == u {
            x += &g[i];
        }
        if e.head == u {
            x -= &g[i];
        }
    }
    x
}

fn decompose(net: &Network, mut g: Vec<Rational>, allow_terminals: bool) -> Result<FlowDecomposition> {
    if g.len() != net.edges().len() {
        return Err(Error::Invalid("one value per edge required".into()));
    }
    if let Some(i) = g.iter().position(|v| v.is_negative()) {
        return Err(Error::Invalid(format!("negative value on edge {i}")));
    }
    for u in 0..net.node_count() {
        let free = allow_terminals && net.is_terminal(u);
        if !free && !excess(net, &g, u).is_zero() {
            return Err(Error::Invalid(format!(
                "conservation violated at {}",
                net.nodes()[u]
            )));
        }
    }
    let mut out = FlowDecomposition::default();
    loop {
        let source = net
            .terminals()
            .iter()
            .copied()
            .find(|&s| allow_terminals && excess(net, &g, s).is_positive());
        let start = match source {
            Some(s) => s,
            None => match g.iter().position(|v| v.is_positive()) {
                Some(e) => net.edges()[e].tail,
                None => break,
            },
        };
        let path_mode = source.is_some();
        let mut walk: Vec<usize> = Vec::new();
        let mut at = start;
        let mut visited = vec![start];
        loop {
            if path_mode && at != start && net.is_terminal(at) && excess(net, &g, at).is_negative() {
                let mut k = walk.iter().map(|&e| g[e].clone()).min().expect("nonempty");
                k = k.min(excess(net, &g, start)).min(-excess(net, &g, at));
                for &e in &walk {
                    g[e] -= &k;
                }
                out.paths.push((walk, k));
                break;
            }
            let e = (0..g.len())
                .find(|&e| net.edges()[e].tail == at && g[e].is_positive())
                .expect("conservation guarantees an outgoing edge");
            walk.push(e);
            at = net.edges()[e].head;
            if let Some(pos) = visited.iter().position(|&v| v == at) {
                let cyc: Vec<usize> = walk.split_off(pos);
                let k = cyc.iter().map(|&e| g[e].clone()).min().expect("nonempty");
                for &e in &cyc {
                    g[e] -= &k;
                }
                out.cycles.push((cyc, k));
                visited.truncate(pos + 1);
                if !path_mode {
                    break;
                }
                continue;
            }
            visited.push(at);
        }
    }
    Ok(out)
}

/// Decompose an inner Eulerian capacity into cycles and S-paths.
pub fn decompose_eulerian_capacity(net: &Network) -> Result<FlowDecomposition> {
    let st = eulerian_status(net, &BTreeSet::new());
    if !st.inner {
        return Err(Error::Hypothesis(format!(
            "network is not inner Eulerian at {:?}",
            st.violating_nodes
                .iter()
                .map(|&u| net.nodes()[u].clone())
                .collect::<Vec<_>>()
        )));
    }
    let g = net.edges().iter().map(|e| Rational::from_integer(e.cap.into())).collect();
    decompose(net, g, true)
}

/// Path/cycle decomposition of a flow conserved at non-terminals.
pub fn decompose_flow(net: &Network, flow: &[Rational]) -> Result<FlowDecomposition> {
    decompose(net, flow.to_vec(), true)
}

/// Cycle decomposition of a circulation conserved everywhere.
pub fn decompose_circulation(net: &Network, flow: &[Rational]) -> Result<FlowDecomposition> {
    decompose(net, flow.to_vec(), false)
}
