//! Acceptance suite: every criterion at exact tolerance, one line each.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use dirflow::classify::{
    edge_cuts, oriented_tree_realization, recognize_commodity_graph, CommodityGraph,
    RealizationConfig, RealizationOutcome,
};
use dirflow::distances::{extension_status, extremality_status, gamma_metric, DirectedDistance};
use dirflow::geometry::{dim_witness_search, slim_vertex_graph, SearchConfig, WitnessOutcome, WitnessTarget};
use dirflow::harness::{
    denominator_probe, generate, generate_locking, oracle_mfp, EulerianMode, InstanceSpec, WeightMode,
};
use dirflow::network::{max_flow, min_cut, Network};
use dirflow::rational::rat;
use dirflow::solvers::{
    lock, solve_interval_mcc, solve_lpd, solve_path_lp, solve_tree, solve_tree_integral,
    verify_locking, Certificate, LOCATION_LIMIT,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn spec(seed: u64, n: usize, k: usize, w: WeightMode, e: EulerianMode) -> InstanceSpec {
    InstanceSpec {
        seed,
        node_count: n,
        terminal_count: k,
        edge_count: n + n / 2 + 1,
        capacity: 3,
        eulerian_mode: e,
        weight_mode: w,
    }
}

fn exhaustive_min_cut(net: &Network, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> i64 {
    let n = net.node_count();
    (0u32..1 << n)
        .filter(|m| a.iter().all(|&x| m >> x & 1 == 1) && b.iter().all(|&x| m >> x & 1 == 0))
        .map(|m| net.cut_capacity(&(0..n).filter(|&x| m >> x & 1 == 1).collect()))
        .min()
        .expect("some X")
}

fn maxflow_mincut() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..200 {
        let n = rng.gen_range(2..=10);
        let k = rng.gen_range(2..=n.min(4));
        let inst = generate(&spec(seed, n, k, WeightMode::RandomDistance, EulerianMode::None)).map_err(err)?;
        let (mut a, mut b) = (BTreeSet::new(), BTreeSet::new());
        for x in 0..n {
            match rng.gen_range(0..4) {
                0 => {
                    a.insert(x);
                }
                1 => {
                    b.insert(x);
                }
                _ => {}
            }
        }
        if a.is_empty() {
            a.insert(0);
            b.remove(&0);
        }
        let flow = max_flow(&inst.net, &a, &b).map_err(err)?.0;
        let (cut, x) = min_cut(&inst.net, &a, &b).map_err(err)?;
        let brute = exhaustive_min_cut(&inst.net, &a, &b);
        check(flow == cut && cut == brute && inst.net.cut_capacity(&x) == cut, || {
            format!("seed {seed}: flow {flow}, cut {cut}, exhaustive {brute}")
        })?;
    }
    Ok("200 networks".into())
}

fn lp_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..100 {
        let n = rng.gen_range(3..=8);
        let k = rng.gen_range(2..=n.min(4));
        let inst = generate(&spec(seed, n, k, WeightMode::RandomDistance, EulerianMode::None)).map_err(err)?;
        let p = solve_path_lp(&inst.mu, &inst.net, 10).map_err(err)?.value;
        let d = solve_lpd(&inst.mu, &inst.net).map_err(err)?.value;
        let o = oracle_mfp(&inst.mu, &inst.net).map_err(err)?;
        check(p == d && d == o, || format!("seed {seed}: path {p}, dual {d}, oracle {o}"))?;
    }
    Ok("100 instances".into())
}

fn lomonosov_frank() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..50 {
        let k = rng.gen_range(3..=4);
        let n = k + rng.gen_range(0..=3);
        let inst = generate(&spec(seed, n, k, WeightMode::AllOne, EulerianMode::Inner)).map_err(err)?;
        let terms: BTreeSet<usize> = inst.net.terminals().iter().copied().collect();
        let mut expected = 0;
        for &s in &terms {
            let rest = terms.iter().copied().filter(|&t| t != s).collect();
            expected += min_cut(&inst.net, &BTreeSet::from([s]), &rest).map_err(err)?.0;
        }
        let d = solve_lpd(&inst.mu, &inst.net).map_err(err)?.value;
        let real = inst.realization.as_ref().ok_or("all-one weight without a realization")?;
        let r = solve_tree_integral(real, &inst.net).map_err(err)?;
        let f = r.multiflow.as_ref().ok_or("no multiflow")?;
        let v = dirflow::solvers::flow_value(&inst.mu, &inst.net, f).map_err(err)?;
        check(d == rat(expected) && v == d && f.is_integral(), || {
            format!("seed {seed}: dual {d}, cut sum {expected}, integral flow {v}")
        })?;
    }
    Ok("50 instances".into())
}

fn tree_min_max() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut located = 0;
    for seed in 0..50 {
        let k = rng.gen_range(2..=5);
        let n = k + rng.gen_range(0..=3);
        let inst = generate(&spec(seed, n, k, WeightMode::TreeRealizable, EulerianMode::ProperlyInner)).map_err(err)?;
        let real = inst.realization.as_ref().ok_or("no realization")?;
        let r = solve_tree(real, &inst.net).map_err(err)?;
        let d = solve_lpd(&inst.mu, &inst.net).map_err(err)?.value;
        let mut cut_sum = rat(0);
        for (e, cut) in edge_cuts(real).iter().enumerate() {
            let a = cut.a.iter().map(|&s| inst.net.node_index(&real.terminals[s]).unwrap()).collect();
            let b = cut.b.iter().map(|&s| inst.net.node_index(&real.terminals[s]).unwrap()).collect();
            cut_sum += &real.alpha[e] * rat(exhaustive_min_cut(&inst.net, &a, &b));
        }
        check(r.certified && r.value == d && d == cut_sum, || {
            format!("seed {seed}: tree {}, dual {d}, cut sum {cut_sum}", r.value)
        })?;
        if inst.net.node_count() * real.nodes.len() <= LOCATION_LIMIT {
            let loc = r.certificates.iter().find_map(|c| match c {
                Certificate::Location { value, .. } => Some(value.clone()),
                _ => None,
            });
            check(loc.as_ref() == Some(&d), || format!("seed {seed}: location {loc:?} vs {d}"))?;
            located += 1;
        }
    }
    Ok(format!("50 instances, {located} with location check"))
}

fn interval_mcc() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..50 {
        let k = rng.gen_range(2..=4);
        let n = k + rng.gen_range(0..=3);
        let inst = generate(&spec(seed, n, k, WeightMode::IntervalRepresentable, EulerianMode::None)).map_err(err)?;
        let rep = inst.interval.as_ref().ok_or("no representation")?;
        let r = solve_interval_mcc(&inst.mu, rep, &inst.net).map_err(err)?;
        let d = solve_lpd(&inst.mu, &inst.net).map_err(err)?.value;
        let f = r.multiflow.as_ref().ok_or("no multiflow")?;
        check(r.value == d && f.is_integral(), || format!("seed {seed}: mcc {}, dual {d}", r.value))?;
    }
    Ok("50 instances".into())
}

fn locking() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut cuts, mut partial, mut flow) = (0, 0, rat(0));
    for seed in 0..30 {
        let full = seed % 2 == 0;
        let k = rng.gen_range(2..=4);
        let n = k + rng.gen_range(0..=3);
        let (family, net) = generate_locking(seed, k, n, full).map_err(err)?;
        let ground = net.terminal_names();
        let r = lock(&family, &ground, &net).map_err(err)?;
        let f = r.multiflow.as_ref().ok_or("no multiflow")?;
        check(verify_locking(f, &family, &ground, &net).map_err(err)? && f.is_integral(), || {
            format!("seed {seed}: flow does not lock the family")
        })?;
        cuts += family.len();
        partial += family.iter().filter(|c| !c.is_full(k)).count();
        flow += f.values.iter().sum::<dirflow::rational::Rational>();
    }
    Ok(format!("15 full-cut and 15 partial-cut families: {cuts} cuts ({partial} partial), total locked flow {flow}"))
}

/// One representative per isomorphism class of loopless digraphs on `n` nodes.
fn digraph_classes(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(b, _)| m >> b & 1 == 1).map(|(_, &e)| e).collect();
        let canon = perms
            .iter()
            .map(|p| {
                let mut img: Vec<(usize, usize)> = edges.iter().map(|&(x, y)| (p[x], p[y])).collect();
                img.sort();
                img
            })
            .min()
            .expect("some permutation");
        if seen.insert(canon) {
            out.push(edges.into_iter().collect());
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn classification() -> Outcome {
    let config = RealizationConfig::default();
    let mut classes = 0;
    for n in 1..=4 {
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        for edges in digraph_classes(n) {
            classes += 1;
            let h = CommodityGraph::new(names.clone(), edges).map_err(err)?;
            let mu = dirflow::classify::commodity_to_distance(&h).map_err(err)?;
            let out = oriented_tree_realization(&mu, &config).map_err(err)?;
            check(out != RealizationOutcome::UndecidedByBudget, || format!("{:?}: undecided", h.edges))?;
            let rec = recognize_commodity_graph(&h).succeeds();
            check(out.realization().is_some() == rec, || {
                format!("{:?}: realization {} vs recognition {rec}", h.edges, out.realization().is_some())
            })?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unrealizable = 0;
    for i in 0..100 {
        let k = rng.gen_range(2..=4);
        let names: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
        let mu = DirectedDistance::from_fn(names, |s, t| if s == t { rat(0) } else { rat(rng.gen_range(0..=2)) }).map_err(err)?;
        let out = oriented_tree_realization(&mu, &config).map_err(err)?;
        match out {
            RealizationOutcome::Found(..) => {}
            RealizationOutcome::UndecidedByBudget => return Err(format!("random #{i}: undecided")),
            RealizationOutcome::NoRealization => {
                unrealizable += 1;
                let w = dim_witness_search(&mu, WitnessTarget::QSlim, &SearchConfig { seed: i, ..SearchConfig::default() });
                let dim = w.witness().map(|w| w.dimension);
                check(dim.is_some_and(|d| d >= 2), || format!("random #{i}: no slim witness ({w:?})"))?;
            }
        }
    }
    Ok(format!("{classes} digraph classes, 100 random weights ({unrealizable} without realization)"))
}

fn geometry_fixtures() -> Outcome {
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let config = SearchConfig::default();
    let all = DirectedDistance::all_one(names(&["s", "t", "u"]));
    let (verts, edges) = slim_vertex_graph(&all);
    let mut deg = vec![0; verts.len()];
    for &(a, b) in &edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg.sort();
    check(deg == vec![1, 1, 1, 3], || format!("all-one slim vertex degrees {deg:?}"))?;
    let dim_of = |mu: &DirectedDistance, t: WitnessTarget| match dim_witness_search(mu, t, &config) {
        WitnessOutcome::Found(w) => Some(w.dimension),
        _ => None,
    };
    check(dim_of(&all, WitnessTarget::T) == Some(2), || "all-one: no 2-dimensional T witness".into())?;
    let two = DirectedDistance::from_int_rows(
        &["s", "t", "s2", "t2"],
        &[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]],
    )
    .map_err(err)?;
    check(dim_of(&two, WitnessTarget::T) == Some(2), || "two-commodity: no T witness".into())?;
    check(dim_of(&two, WitnessTarget::QSlim) == Some(2), || "two-commodity: no slim witness".into())?;
    let d = DirectedDistance::from_int_rows(
        &["s", "t", "u", "v"],
        &[&[0, 1, 1, 0], &[1, 0, 1, 0], &[0, 0, 0, 0], &[1, 1, 1, 0]],
    )
    .map_err(err)?;
    let mu = DirectedDistance::from_int_rows(&["s", "t"], &[&[0, 1], &[1, 0]]).map_err(err)?;
    let st = extension_status(&d, &mu).map_err(err)?;
    check(st.tight && !st.cyclically_tight, || format!("table extension status {st:?}"))?;
    Ok("star, folder, square, table".into())
}

fn fractionality_probe() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let specs: Vec<InstanceSpec> = (0..200)
        .map(|seed| {
            let n = rng.gen_range(6..=7);
            InstanceSpec {
                edge_count: 2 * n,
                capacity: 1,
                ..spec(seed, n, 4, WeightMode::TwoCommodity, EulerianMode::Totally)
            }
        })
        .collect();
    let report = denominator_probe(None, &specs, 1).map_err(err)?;
    let fractional = report.items.iter().filter(|i| i.max_lambda_den >= BigInt::from(2)).count();
    check(fractional > 0, || "no fractional optimal vertex in the two-commodity batch".into())?;
    check(report.items.iter().all(|i| i.agreement.values().all(|&a| a)), || "method disagreement".into())?;
    let control: Vec<InstanceSpec> = (0..50)
        .map(|seed| {
            let k = rng.gen_range(2..=4);
            let n = k + rng.gen_range(0..=3);
            spec(1000 + seed, n, k, WeightMode::TreeRealizable, EulerianMode::ProperlyInner)
        })
        .collect();
    let ctrl = denominator_probe(None, &control, 1).map_err(err)?;
    let one = BigInt::from(1);
    check(
        ctrl.items.iter().all(|i| {
            i.best_lambda_den == one && i.value.denom() == &one && i.agreement.values().all(|&a| a)
        }),
        || "control batch has a fractional optimum".into(),
    )?;
    Ok(format!(
        "{fractional}/200 two-commodity networks with a fractional optimal vertex (max denominator {}); control all integral",
        report.max_denominator
    ))
}

fn gamma_family() -> Outcome {
    for n in [1, 2] {
        let g = gamma_metric(n).map_err(err)?;
        let st = extremality_status(&g).map_err(err)?;
        check(st.extreme && st.c_extreme, || format!("gamma_{n}: {st:?}"))?;
    }
    Ok("gamma_1, gamma_2 extreme and c-extreme".into())
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: Vec<Criterion> = vec![
        ("max-flow min-cut", maxflow_mincut, Duration::from_secs(10)),
        ("LP strong duality", lp_duality, Duration::from_secs(120)),
        ("Lomonosov-Frank", lomonosov_frank, Duration::from_secs(60)),
        ("tree min-max", tree_min_max, Duration::from_secs(180)),
        ("interval min-cost circulation", interval_mcc, Duration::from_secs(60)),
        ("locking", locking, Duration::from_secs(60)),
        ("classification cross-consistency", classification, Duration::from_secs(300)),
        ("geometry fixtures", geometry_fixtures, Duration::from_secs(30)),
        ("fractionality probe", fractionality_probe, Duration::from_secs(300)),
        ("gamma family", gamma_family, Duration::from_secs(5)),
    ];
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, run, _)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
                    (out, start.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("joined")).collect()
    });
    let mut failed = 0;
    for (i, ((name, _, limit), (out, took))) in criteria.iter().zip(results).enumerate() {
        let (status, detail) = match out {
            Ok(d) if took <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {}s limit", limit.as_secs())),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name} ({:.1}s): {detail}", i + 1, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
