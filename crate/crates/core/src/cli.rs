//! The `dirflow` command line: classify weights, solve, lock, verify,
//! generate instances and run denominator probes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classify::{
    cut_decomposition, interval_representation, oriented_tree_realization, proper_terminals,
    recognize_commodity_graph, CommodityGraph, IntervalOutcome, ProperMode, QuasiType,
    RealizationConfig, RealizationOutcome,
};
use crate::distances::{DirectedDistance, PartialCut};
use crate::error::{Error, Result};
use crate::geometry::{dim_witness_search, tightness_graph, SearchConfig, WitnessOutcome, WitnessTarget};
use crate::harness::{self, EulerianMode, InstanceSpec, WeightMode};
use crate::network::Network;
use crate::solvers::{self, Multiflow, SolveReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lp,
    Tree,
    Mcc,
    Auto,
}

#[derive(Debug, Parser)]
#[command(name = "dirflow", version, about = "Directed multiflow classification and exact solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Seed for randomized steps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Search budget (realization nodes or witness samples).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Write a DOT rendering here.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Interval representation, tree realization and dimension witnesses of a weight.
    Classify { mu: PathBuf },
    /// Maximum multiflow; takes a network and a weight, or one instance file.
    Solve {
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Integral multiflow locking a laminar family of cuts.
    Lock { network: PathBuf, family: PathBuf },
    /// Check that a multiflow locks a family.
    Verify {
        network: PathBuf,
        family: PathBuf,
        flow: PathBuf,
    },
    /// Generate a seeded instance.
    Gen {
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        terminals: usize,
        #[arg(long, default_value_t = 10)]
        edges: usize,
        #[arg(long, default_value_t = 3)]
        capacity: i64,
        #[arg(long, default_value = "none")]
        eulerian: String,
        #[arg(long, default_value = "random_distance")]
        weight: String,
    },
    /// Denominator probe over a seeded batch; prints JSON lines.
    Probe {
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        terminals: usize,
        #[arg(long, default_value_t = 12)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        capacity: i64,
        #[arg(long, default_value = "totally")]
        eulerian: String,
        #[arg(long, default_value = "two_commodity")]
        weight: String,
        /// Report whether some denominator exceeds this.
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::Io(_) | Error::UnknownElement(_) => EXIT_PARSE,
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
        _ => EXIT_FAILED,
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A weight either stored bare or under a `"mu"` key.
fn read_mu(path: &Path) -> Result<DirectedDistance> {
    let v = read_json(path)?;
    DirectedDistance::from_json(v.get("mu").unwrap_or(&v))
}

fn read_network(path: &Path) -> Result<Network> {
    let v = read_json(path)?;
    Network::from_json(v.get("network").unwrap_or(&v))
}

fn read_family(path: &Path, ground: &[String]) -> Result<Vec<PartialCut>> {
    let v = read_json(path)?;
    v.get("family")
        .unwrap_or(&v)
        .as_array()
        .ok_or_else(|| Error::Parse("family must be a list of cuts".into()))?
        .iter()
        .map(|c| PartialCut::from_json(c, ground).map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

fn read_flow(path: &Path, net: &Network) -> Result<Multiflow> {
    let v = read_json(path)?;
    Multiflow::from_json(v.get("multiflow").unwrap_or(&v), net)
}

fn emit(cli: &Cli, value: &Value, out: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match &cli.json {
        Some(p) => fs::write(p, text + "\n")?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn emit_dot(cli: &Cli, dot: Option<String>) -> Result<()> {
    if let (Some(path), Some(dot)) = (&cli.dot, dot) {
        fs::write(path, dot)?;
    }
    Ok(())
}

fn realization_config(cli: &Cli) -> RealizationConfig {
    let mut config = RealizationConfig::default();
    if let Some(b) = cli.budget {
        config.node_budget = b;
    }
    config
}

fn witness_json(out: &WitnessOutcome) -> Value {
    match out {
        WitnessOutcome::Found(w) => json!({
            "status": "found",
            "dimension": w.dimension,
            "point": w.point.to_json(),
        }),
        WitnessOutcome::NoneFound => json!({ "status": "none" }),
        WitnessOutcome::BudgetExhausted => json!({ "status": "budget_exhausted" }),
    }
}

fn classify(cli: &Cli, path: &Path, out: &mut dyn Write) -> Result<()> {
    let mu = read_mu(path)?;
    let sampling = cli.seed.map(|s| (s, cli.budget.unwrap_or(2000)));
    let (report, dot) = classify_report(&mu, &realization_config(cli), sampling)?;
    emit_dot(cli, dot)?;
    emit(cli, &report, out)
}

/// Full classification report plus an optional DOT drawing. Random witness
/// sampling runs only when `sampling` carries a seed and a sample count.
pub fn classify_report(
    mu: &DirectedDistance,
    config: &RealizationConfig,
    sampling: Option<(u64, usize)>,
) -> Result<(Value, Option<String>)> {
    let names = mu.elements().to_vec();
    let interval = match interval_representation(mu) {
        IntervalOutcome::Representable(rep) => json!({ "segments": rep.to_json(&names) }),
        IntervalOutcome::NotRepresentable(cycle) => json!({ "none": { "negative_cycle": cycle } }),
    };
    let outcome = oriented_tree_realization(mu, config)?;
    let (tree, proper) = match &outcome {
        RealizationOutcome::Found(real, _) => {
            let dec = cut_decomposition(real, mu)?;
            let cuts: Vec<Value> = dec
                .cuts
                .iter()
                .zip(&dec.weights)
                .map(|(c, w)| json!({ "cut": c.to_json(&names), "weight": crate::rational::to_json_value(w) }))
                .collect();
            let mut t = real.to_json();
            t["cut_decomposition"] = json!(cuts);
            (t, proper_terminals(Some(real)))
        }
        RealizationOutcome::NoRealization => (json!("none"), proper_terminals(None)),
        RealizationOutcome::UndecidedByBudget => (json!("undecided_by_budget"), proper_terminals(None)),
    };
    let search = SearchConfig {
        seed: sampling.map_or(0, |s| s.0),
        samples: sampling.map_or(0, |s| s.1),
        ..SearchConfig::default()
    };
    let w_t = dim_witness_search(mu, WitnessTarget::T, &search);
    let w_slim = dim_witness_search(mu, WitnessTarget::QSlim, &search);
    let mut report = json!({
        "elements": names,
        "interval_representation": interval,
        "oriented_tree_realization": tree,
        "proper_terminals": {
            "terminals": proper.0.iter().map(|&s| names[s].clone()).collect::<Vec<_>>(),
            "mode": if proper.1 == ProperMode::FromRealization { "from_realization" } else { "conservative" },
        },
        "witnesses": { "T": witness_json(&w_t), "Q_slim": witness_json(&w_slim) },
    });
    if let Ok(h) = CommodityGraph::from_distance(mu) {
        let rec = recognize_commodity_graph(&h);
        report["commodity_graph"] = json!({
            "quasi_complete": rec.quasi_complete.as_ref().map(|(t, kind)| json!({
                "T": t.iter().map(|&s| names[s].clone()).collect::<Vec<_>>(),
                "type": if *kind == QuasiType::Source { "source" } else { "sink" },
            })),
            "multipartite_extension": rec.multipartite_extension.as_ref().map(|(_, classes)| {
                classes.iter().map(|c| c.iter().map(|&s| names[s].clone()).collect::<Vec<_>>()).collect::<Vec<_>>()
            }),
            "succeeds": rec.succeeds(),
        });
    }
    let dot = match (&outcome, &w_slim) {
        (RealizationOutcome::Found(real, _), _) => Some(real.to_dot()),
        (_, WitnessOutcome::Found(w)) => Some(tightness_graph(mu, &w.point)?.to_dot(&names)),
        _ => None,
    };
    Ok((report, dot))
}

/// Auto selection: min-cost circulation for interval weights, splitting-off
/// for tree weights under the Eulerian hypothesis, the LP otherwise.
pub fn solve(mu: &DirectedDistance, net: &Network, method: MethodArg, config: &RealizationConfig) -> Result<SolveReport> {
    let tree = |required: bool| -> Result<Option<SolveReport>> {
        match oriented_tree_realization(mu, config)? {
            RealizationOutcome::Found(real, _) => {
                if solvers::tree_hypothesis(&real, net)?.is_none() {
                    solvers::solve_tree_integral(&real, net).map(Some)
                } else if required {
                    solvers::solve_tree(&real, net).map(Some)
                } else {
                    Ok(None)
                }
            }
            _ if required => Err(Error::Hypothesis("weight has no oriented-tree realization".into())),
            _ => Ok(None),
        }
    };
    let mcc = |required: bool| -> Result<Option<SolveReport>> {
        match interval_representation(mu) {
            IntervalOutcome::Representable(rep) => solvers::solve_interval_mcc(mu, &rep, net).map(Some),
            IntervalOutcome::NotRepresentable(_) if required => {
                Err(Error::Hypothesis("weight has no interval representation".into()))
            }
            _ => Ok(None),
        }
    };
    let lp = || -> Result<SolveReport> {
        let mut report = solvers::solve_lpd(mu, net)?;
        if net.node_count() <= solvers::DEFAULT_PATH_BUDGET {
            let primal = solvers::solve_path_lp(mu, net, solvers::DEFAULT_PATH_BUDGET)?;
            if primal.value != report.value {
                return Err(Error::TheoremViolation("path LP and metric LP disagree".into()));
            }
            report.multiflow = primal.multiflow;
        }
        Ok(report)
    };
    match method {
        MethodArg::Lp => lp(),
        MethodArg::Mcc => Ok(mcc(true)?.expect("required")),
        MethodArg::Tree => Ok(tree(true)?.expect("required")),
        MethodArg::Auto => {
            if let Some(r) = mcc(false)? {
                return Ok(r);
            }
            if let Some(r) = tree(false)? {
                return Ok(r);
            }
            lp()
        }
    }
}

fn parse_spec(seed: u64, n: usize, k: usize, m: usize, cap: i64, eulerian: &str, weight: &str) -> Result<InstanceSpec> {
    Ok(InstanceSpec {
        seed,
        node_count: n,
        terminal_count: k,
        edge_count: m,
        capacity: cap,
        eulerian_mode: EulerianMode::parse(eulerian)?,
        weight_mode: WeightMode::parse(weight)?,
    })
}

fn require_seed(cli: &Cli) -> Result<u64> {
    cli.seed
        .ok_or_else(|| Error::Parse("this command is randomized and needs an explicit --seed".into()))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.verb {
        Verb::Classify { mu } => classify(cli, mu, out)?,
        Verb::Solve { inputs, method } => {
            let (net, mu) = if inputs.len() == 2 {
                (read_network(&inputs[0])?, read_mu(&inputs[1])?)
            } else {
                (read_network(&inputs[0])?, read_mu(&inputs[0])?)
            };
            let report = solve(&mu, &net, *method, &realization_config(cli))?;
            emit_dot(cli, Some(net.to_dot()))?;
            emit(cli, &report.to_json(&net), out)?;
        }
        Verb::Lock { network, family } => {
            let net = read_network(network)?;
            let ground = net.terminal_names();
            let family = read_family(family, &ground)?;
            let report = solvers::lock(&family, &ground, &net)?;
            emit_dot(cli, Some(net.to_dot()))?;
            emit(cli, &report.to_json(&net), out)?;
        }
        Verb::Verify { network, family, flow } => {
            let net = read_network(network)?;
            let ground = net.terminal_names();
            let family = read_family(family, &ground)?;
            let f = read_flow(flow, &net)?;
            let ok = solvers::verify_locking(&f, &family, &ground, &net)?;
            emit(cli, &json!({ "locks": ok }), out)?;
            return Ok(if ok { EXIT_OK } else { EXIT_FAILED });
        }
        Verb::Gen {
            nodes,
            terminals,
            edges,
            capacity,
            eulerian,
            weight,
        } => {
            let spec = parse_spec(require_seed(cli)?, *nodes, *terminals, *edges, *capacity, eulerian, weight)?;
            let inst = harness::generate(&spec)?;
            emit_dot(cli, Some(inst.net.to_dot()))?;
            emit(cli, &json!({ "network": inst.net.to_json(), "mu": inst.mu.to_json() }), out)?;
        }
        Verb::Probe {
            count,
            nodes,
            terminals,
            edges,
            capacity,
            eulerian,
            weight,
            k,
        } => {
            let seed = require_seed(cli)?;
            let specs = (seed..seed + count)
                .map(|s| parse_spec(s, *nodes, *terminals, *edges, *capacity, eulerian, weight))
                .collect::<Result<Vec<_>>>()?;
            let report = harness::denominator_probe(None, &specs, *k)?;
            let lines = report.json_lines();
            match &cli.json {
                Some(p) => fs::write(p, &lines)?,
                None => write!(out, "{lines}")?,
            }
            writeln!(
                out,
                "{}",
                json!({ "max_denominator": report.max_denominator.to_string(), "exceeds_k": report.exceeds_k })
            )?;
        }
    }
    Ok(EXIT_OK)
}

/// Run with explicit arguments; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
