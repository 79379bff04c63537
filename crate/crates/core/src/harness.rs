//! Seeded instance generators, an independent path-LP oracle, and
//! denominator probes over batches.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::classify::{
    edge_cuts, interval_representation, laminar_to_realization, oriented_tree_realization,
    IntervalRepresentation, OrientedTreeRealization, RealizationConfig,
};
use crate::distances::{is_laminar_family, DirectedDistance, LaminarDecomposition, PartialCut};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, PivotRule, Relation};
use crate::network::{eulerian_status, Edge, Network};
use crate::rational::{self, rat, Rational};
use crate::solvers::{self, Multiflow};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerianMode {
    None,
    Inner,
    Totally,
    ProperlyInner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    RandomDistance,
    RandomMetric,
    TreeRealizable,
    IntervalRepresentable,
    CommodityGraph,
    TwoCommodity,
    AllOne,
}

impl EulerianMode {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => EulerianMode::None,
            "inner" => EulerianMode::Inner,
            "totally" => EulerianMode::Totally,
            "properly_inner" => EulerianMode::ProperlyInner,
            _ => return Err(Error::Parse(format!("unknown Eulerian mode {s:?}"))),
        })
    }
}

impl WeightMode {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "random_distance" => WeightMode::RandomDistance,
            "random_metric" => WeightMode::RandomMetric,
            "tree_realizable" => WeightMode::TreeRealizable,
            "interval_representable" => WeightMode::IntervalRepresentable,
            "commodity_graph" => WeightMode::CommodityGraph,
            "two_commodity" => WeightMode::TwoCommodity,
            "all_one" => WeightMode::AllOne,
            _ => return Err(Error::Parse(format!("unknown weight mode {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub seed: u64,
    pub node_count: usize,
    pub terminal_count: usize,
    pub edge_count: usize,
    pub capacity: i64,
    pub eulerian_mode: EulerianMode,
    pub weight_mode: WeightMode,
}

impl InstanceSpec {
    pub fn new(seed: u64, weight_mode: WeightMode, eulerian_mode: EulerianMode) -> Self {
        InstanceSpec {
            seed,
            node_count: 6,
            terminal_count: 3,
            edge_count: 10,
            capacity: 3,
            eulerian_mode,
            weight_mode,
        }
    }
}

/// A generated network and weight, with whatever structure the weight
/// mode guarantees.
#[derive(Clone, Debug)]
pub struct Instance {
    pub net: Network,
    pub mu: DirectedDistance,
    pub realization: Option<OrientedTreeRealization>,
    pub interval: Option<IntervalRepresentation>,
}

fn terminal_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("s{i}")).collect()
}

fn random_weight(rng: &mut ChaCha8Rng, names: &[String], mode: WeightMode) -> Result<DirectedDistance> {
    let k = names.len();
    match mode {
        WeightMode::RandomDistance => {
            DirectedDistance::from_fn(names.to_vec(), |s, t| if s == t { rat(0) } else { rat(rng.gen_range(0..=3)) })
        }
        WeightMode::RandomMetric => {
            let mut d: Vec<Vec<i64>> = (0..k)
                .map(|s| (0..k).map(|t| if s == t { 0 } else { rng.gen_range(0..=4) }).collect())
                .collect();
            for m in 0..k {
                for s in 0..k {
                    for t in 0..k {
                        d[s][t] = d[s][t].min(d[s][m] + d[m][t]);
                    }
                }
            }
            DirectedDistance::from_fn(names.to_vec(), |s, t| rat(d[s][t]))
        }
        WeightMode::TreeRealizable => random_tree(rng, names, false).distance(),
        WeightMode::IntervalRepresentable => {
            let segs: Vec<(i64, i64)> = (0..k)
                .map(|_| {
                    let a = rng.gen_range(0..=5);
                    (a, a + rng.gen_range(0..=2))
                })
                .collect();
            DirectedDistance::from_fn(names.to_vec(), |s, t| rat((segs[t].0 - segs[s].1).max(0)))
        }
        WeightMode::CommodityGraph => {
            DirectedDistance::from_fn(names.to_vec(), |s, t| rat(i64::from(s != t && rng.gen_bool(0.4))))
        }
        WeightMode::TwoCommodity => {
            if k != 4 {
                return Err(Error::Invalid("two_commodity needs exactly 4 terminals".into()));
            }
            DirectedDistance::from_fn(names.to_vec(), |s, t| rat(i64::from((s, t) == (0, 1) || (s, t) == (2, 3))))
        }
        WeightMode::AllOne => Ok(DirectedDistance::all_one(names.to_vec())),
    }
}

/// Random oriented tree with connected subtrees; single nodes when `points`.
pub fn random_tree(rng: &mut ChaCha8Rng, names: &[String], points: bool) -> OrientedTreeRealization {
    let q = rng.gen_range(2..=names.len() + 2);
    let mut edges = Vec::new();
    let mut alpha = Vec::new();
    for v in 1..q {
        let u = rng.gen_range(0..v);
        edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
        alpha.push(rat(rng.gen_range(1..=3)));
    }
    let subtrees = names
        .iter()
        .map(|_| {
            let mut f = BTreeSet::from([rng.gen_range(0..q)]);
            if !points {
                for _ in 0..rng.gen_range(0..=2) {
                    let border: Vec<usize> = edges
                        .iter()
                        .filter_map(|&(x, y)| match (f.contains(&x), f.contains(&y)) {
                            (true, false) => Some(y),
                            (false, true) => Some(x),
                            _ => None,
                        })
                        .collect();
                    if let Some(&w) = border.choose(rng) {
                        f.insert(w);
                    }
                }
            }
            f
        })
        .collect();
    OrientedTreeRealization {
        terminals: names.to_vec(),
        nodes: (0..q).map(|i| format!("w{i}")).collect(),
        edges,
        alpha,
        subtrees,
    }
}

/// Add a random directed cycle (or an S-path between two `ends`) with a
/// random capacity.
fn add_route(rng: &mut ChaCha8Rng, caps: &mut BTreeMap<(usize, usize), i64>, n: usize, k: usize, ends: Option<&[usize]>, cap: i64) {
    let c = rng.gen_range(1..=cap);
    let inner: Vec<usize> = (k..n).collect();
    match ends {
        None => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            let len = rng.gen_range(2..=n.min(5));
            let cyc = &all[..len];
            for i in 0..len {
                *caps.entry((cyc[i], cyc[(i + 1) % len])).or_insert(0) += c;
            }
        }
        Some(ends) => {
            let mut pair: Vec<usize> = ends.to_vec();
            pair.shuffle(rng);
            let mut mid = inner.clone();
            mid.shuffle(rng);
            let len = rng.gen_range(0..=mid.len().min(3));
            let mut path = vec![pair[0]];
            path.extend(&mid[..len]);
            path.push(pair[1]);
            for w in path.windows(2) {
                *caps.entry((w[0], w[1])).or_insert(0) += c;
            }
        }
    }
}

fn random_network(rng: &mut ChaCha8Rng, spec: &InstanceSpec, proper: &[usize]) -> Result<Network> {
    let (n, k) = (spec.node_count, spec.terminal_count);
    let mut caps: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let terminals: Vec<usize> = (0..k).collect();
    let mut guard = 0;
    while caps.len() < spec.edge_count && guard < 10 * spec.edge_count + 10 {
        guard += 1;
        match spec.eulerian_mode {
            EulerianMode::None => {
                let x = rng.gen_range(0..n);
                let y = rng.gen_range(0..n);
                if x != y {
                    *caps.entry((x, y)).or_insert(0) += rng.gen_range(1..=spec.capacity);
                }
            }
            EulerianMode::Totally => add_route(rng, &mut caps, n, k, None, spec.capacity),
            EulerianMode::Inner | EulerianMode::ProperlyInner => {
                let ends: &[usize] = if spec.eulerian_mode == EulerianMode::Inner { &terminals } else { proper };
                if ends.len() >= 2 && rng.gen_bool(0.5) {
                    add_route(rng, &mut caps, n, k, Some(ends), spec.capacity);
                } else {
                    add_route(rng, &mut caps, n, k, None, spec.capacity);
                }
            }
        }
    }
    let nodes: Vec<String> = terminal_names(k)
        .into_iter()
        .chain((k..n).map(|i| format!("x{}", i - k)))
        .collect();
    let edges = caps
        .into_iter()
        .map(|((tail, head), cap)| Edge { tail, head, cap })
        .collect();
    Network::new(nodes, terminals, edges)
}

/// Deterministic instance for `spec`; post-conditions are re-checked.
pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    let (n, k) = (spec.node_count, spec.terminal_count);
    if k < 2 || k > n || spec.capacity < 1 || n > 64 {
        return Err(Error::Invalid("inconsistent instance bounds".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let names = terminal_names(k);
    let mu = random_weight(&mut rng, &names, spec.weight_mode)?;
    let mut realization = None;
    let mut interval = None;
    match spec.weight_mode {
        WeightMode::TreeRealizable | WeightMode::AllOne => {
            let out = oriented_tree_realization(&mu, &RealizationConfig::default())?;
            let real = out
                .realization()
                .cloned()
                .ok_or_else(|| Error::TheoremViolation("generated weight is not tree-realizable".into()))?;
            realization = Some(real);
        }
        WeightMode::IntervalRepresentable => {
            let rep = interval_representation(&mu)
                .representation()
                .cloned()
                .ok_or_else(|| Error::TheoremViolation("generated weight has no interval representation".into()))?;
            interval = Some(rep);
        }
        _ => {}
    }
    let proper: Vec<usize> = match &realization {
        Some(r) => (0..k).filter(|&s| r.is_path_subtree(s)).collect(),
        None => Vec::new(),
    };
    let net = random_network(&mut rng, spec, &proper)?;
    check_mode(&net, spec.eulerian_mode, &proper)?;
    Ok(Instance {
        net,
        mu,
        realization,
        interval,
    })
}

fn check_mode(net: &Network, mode: EulerianMode, proper: &[usize]) -> Result<()> {
    let st = eulerian_status(net, &proper.iter().copied().collect());
    let ok = match mode {
        EulerianMode::None => true,
        EulerianMode::Inner => st.inner,
        EulerianMode::Totally => st.totally,
        EulerianMode::ProperlyInner => st.properly_inner,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::TheoremViolation(format!("generated network violates {mode:?}")))
    }
}

/// Random laminar family of partial cuts (full cuts when `full`) with a
/// network satisfying the locking hypothesis.
pub fn generate_locking(seed: u64, k: usize, n: usize, full: bool) -> Result<(Vec<PartialCut>, Network)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = terminal_names(k);
    // resample thin families a bounded number of times
    let mut family = Vec::new();
    for _ in 0..50 {
        let tree = random_tree(&mut rng, &names, full);
        family = edge_cuts(&tree)
            .into_iter()
            .filter(|c| !c.a.is_empty() && !c.b.is_empty())
            .collect();
        family.sort();
        family.dedup();
        if family.len() >= 2 {
            break;
        }
    }
    if !is_laminar_family(&family) {
        return Err(Error::TheoremViolation("tree cuts are not laminar".into()));
    }
    let proper: Vec<usize> = if family.is_empty() {
        (0..k).collect()
    } else {
        let dec = LaminarDecomposition {
            weights: vec![rat(1); family.len()],
            cuts: family.clone(),
        };
        let real = laminar_to_realization(&names, &dec)?;
        (0..k).filter(|&s| real.is_path_subtree(s)).collect()
    };
    let mode = if full {
        EulerianMode::Inner
    } else {
        EulerianMode::ProperlyInner
    };
    let spec = InstanceSpec {
        seed,
        node_count: n,
        terminal_count: k,
        edge_count: 2 * n,
        capacity: 2,
        eulerian_mode: mode,
        weight_mode: WeightMode::AllOne,
    };
    let net = random_network(&mut rng, &spec, &proper)?;
    check_mode(&net, mode, &proper)?;
    Ok((family, net))
}

pub const ORACLE_BUDGET: usize = 8;

/// Independent path-enumeration LP: explicit-stack enumeration in reverse
/// adjacency order, one row per edge of the network, Dantzig pivoting.
pub fn oracle_mfp(mu: &DirectedDistance, net: &Network) -> Result<Rational> {
    if net.node_count() > ORACLE_BUDGET {
        return Err(Error::Budget(format!("oracle handles at most {ORACLE_BUDGET} nodes")));
    }
    let nodes = solvers::terminal_nodes(mu.elements(), net)?;
    let n = net.node_count();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in net.edges().iter().enumerate().rev() {
        if e.cap > 0 && e.tail != e.head {
            out_edges[e.tail].push(i);
        }
    }
    // paths as edge lists; parallel edges give distinct columns
    let mut columns: Vec<(Vec<usize>, Rational)> = Vec::new();
    for (s, t) in mu.pairs().collect::<Vec<_>>().into_iter().rev() {
        let w = mu.get(s, t);
        if w.is_zero() {
            continue;
        }
        let (src, dst) = (nodes[s], nodes[t]);
        let mut stack: Vec<(usize, Vec<usize>, Vec<usize>)> = vec![(src, vec![src], Vec::new())];
        while let Some((u, seen, path)) = stack.pop() {
            if u == dst {
                columns.push((path, w.clone()));
                if columns.len() > 50_000 {
                    return Err(Error::Budget("too many paths for the oracle".into()));
                }
                continue;
            }
            for &e in &out_edges[u] {
                let v = net.edges()[e].head;
                if !seen.contains(&v) {
                    let mut seen2 = seen.clone();
                    seen2.push(v);
                    let mut p2 = path.clone();
                    p2.push(e);
                    stack.push((v, seen2, p2));
                }
            }
        }
    }
    let mut lp = LinearProgram::new(columns.len());
    lp.pivot_rule = PivotRule::Dantzig;
    for (j, (_, w)) in columns.iter().enumerate() {
        lp.objective[j] = w.clone();
    }
    for (i, e) in net.edges().iter().enumerate() {
        let coeffs: Vec<(usize, Rational)> = columns
            .iter()
            .enumerate()
            .filter(|(_, (p, _))| p.contains(&i))
            .map(|(j, _)| (j, Rational::one()))
            .collect();
        if !coeffs.is_empty() {
            lp.add(coeffs, Relation::Le, rat(e.cap));
        }
    }
    lp.solve_primal()
        .optimal()
        .map(|s| s.value)
        .ok_or_else(|| Error::TheoremViolation("oracle LP has no optimum".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeItem {
    pub seed: u64,
    pub value: Rational,
    /// Largest denominator over the optimal vertex multiflows inspected.
    pub max_lambda_den: BigInt,
    /// Smallest denominator over every optimal multiflow obtained,
    /// including those of the integral solvers.
    pub best_lambda_den: BigInt,
    /// Per-method agreement with the metric LP value.
    pub agreement: BTreeMap<String, bool>,
}

impl ProbeItem {
    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "value": rational::to_json_value(&self.value),
            "max_lambda_den": self.max_lambda_den.to_string(),
            "best_lambda_den": self.best_lambda_den.to_string(),
            "agreement": self.agreement,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub items: Vec<ProbeItem>,
    pub max_denominator: BigInt,
    /// Whether some denominator exceeds the probed `k`.
    pub exceeds_k: bool,
}

impl ProbeReport {
    pub fn json_lines(&self) -> String {
        self.items.iter().map(|i| i.to_json().to_string() + "\n").collect()
    }
}

/// Paths whose value is pushed up and down when exploring the optimal face.
pub const FACE_LIMIT: usize = 40;

fn den(f: &Multiflow, value: &Rational) -> BigInt {
    f.max_denominator().max(value.denom().clone())
}

/// Exact denominators of optimal values and of optimal vertex multiflows
/// (one per pivot rule, plus vertices of the optimal face) over a batch. `mu` overrides the generated weight
/// when given.
pub fn denominator_probe(mu: Option<&DirectedDistance>, specs: &[InstanceSpec], k: u64) -> Result<ProbeReport> {
    let mut items = Vec::new();
    for spec in specs {
        let inst = generate(spec)?;
        let mu = mu.cloned().unwrap_or(inst.mu.clone());
        let net = &inst.net;
        let lpd = solvers::solve_lpd(&mu, net)?.value;
        let paths = solvers::weighted_paths(&mu, net, false)?;
        let mut agreement = BTreeMap::new();
        let mut max_den = lpd.denom().clone();
        let mut best_den: Option<BigInt> = None;
        let mut note = |d: BigInt| {
            if best_den.as_ref().is_none_or(|b| d < *b) {
                best_den = Some(d);
            }
        };
        for rule in [PivotRule::Bland, PivotRule::Dantzig, PivotRule::Reverse] {
            let (value, f) = solvers::path_packing(net, &paths, rule)?;
            agreement.insert(format!("path_lp_{rule:?}").to_lowercase(), value == lpd);
            max_den = max_den.max(den(&f, &value));
            note(den(&f, &value));
        }
        for f in solvers::optimal_face_vertices(net, &paths, &lpd, FACE_LIMIT)? {
            max_den = max_den.max(f.max_denominator());
            note(f.max_denominator());
        }
        if let Some(rep) = &inst.interval {
            let r = solvers::solve_interval_mcc(&mu, rep, net)?;
            let f = r.multiflow.as_ref().expect("flow");
            agreement.insert("mcc".into(), r.value == lpd && f.is_integral());
            note(den(f, &r.value));
        }
        if let Some(real) = &inst.realization {
            if solvers::tree_hypothesis(real, net)?.is_none() {
                let r = solvers::solve_tree_integral(real, net)?;
                let f = r.multiflow.as_ref().expect("flow");
                agreement.insert("tree_integral".into(), r.value == lpd && f.is_integral());
                note(den(f, &r.value));
            }
        }
        items.push(ProbeItem {
            seed: spec.seed,
            value: lpd,
            max_lambda_den: max_den,
            best_lambda_den: best_den.expect("at least one solve"),
            agreement,
        });
    }
    let max_denominator = items
        .iter()
        .map(|i| i.max_lambda_den.clone())
        .max()
        .unwrap_or_else(BigInt::one);
    Ok(ProbeReport {
        exceeds_k: max_denominator > BigInt::from(k),
        items,
        max_denominator,
    })
}
