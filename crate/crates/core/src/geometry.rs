//! Points of `P_mu` over the doubled index set, tightness graphs, membership
//! and local dimension tests, fats, lifting, and the dimension witness search.

use std::collections::{BTreeSet, HashSet};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::distances::DirectedDistance;
use crate::error::{Error, Result};
use crate::rational::{self, common_denominator, rat, Rational};

/// A vector over `S^c ∪ S^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledPoint {
    pub base: Vec<String>,
    pub c: Vec<Rational>,
    pub r: Vec<Rational>,
}

impl LabeledPoint {
    pub fn new(base: Vec<String>, c: Vec<Rational>, r: Vec<Rational>) -> Result<Self> {
        if c.len() != base.len() || r.len() != base.len() {
            return Err(Error::Invalid("point parts must match the ground set".into()));
        }
        Ok(LabeledPoint { base, c, r })
    }

    pub fn zero(base: Vec<String>) -> Self {
        let n = base.len();
        LabeledPoint {
            base,
            c: vec![Rational::zero(); n],
            r: vec![Rational::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Value at a node of the doubled set: `u < n` is `u^c`, else `(u-n)^r`.
    pub fn node(&self, u: usize) -> &Rational {
        let n = self.len();
        if u < n {
            &self.c[u]
        } else {
            &self.r[u - n]
        }
    }

    /// `p + alpha (1, -1)`.
    pub fn shift(&self, alpha: &Rational) -> Self {
        LabeledPoint {
            base: self.base.clone(),
            c: self.c.iter().map(|v| v + alpha).collect(),
            r: self.r.iter().map(|v| v - alpha).collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.c.iter().chain(&self.r).all(|v| !v.is_negative())
    }

    /// Representative modulo the lineality direction with `c[0] = 0`.
    pub fn normalized(&self) -> Self {
        match self.c.first() {
            Some(v) => self.shift(&-v.clone()),
            None => self.clone(),
        }
    }

    /// Shift into the nonnegative orthant along `(1, -1)` when possible.
    pub fn nonnegative_representative(&self) -> Option<Self> {
        let min_c = self.c.iter().min()?;
        let p = self.shift(&-min_c.clone());
        p.is_nonnegative().then_some(p)
    }

    pub fn combination(points: &[&LabeledPoint]) -> Self {
        let k = Rational::from_integer(points.len().into());
        let n = points[0].len();
        let sum = |f: &dyn Fn(&LabeledPoint) -> &Vec<Rational>| -> Vec<Rational> {
            (0..n)
                .map(|i| points.iter().map(|p| &f(p)[i]).sum::<Rational>() / &k)
                .collect()
        };
        LabeledPoint {
            base: points[0].base.clone(),
            c: sum(&|p| &p.c),
            r: sum(&|p| &p.r),
        }
    }

    pub fn to_json(&self) -> Value {
        let part = |v: &[Rational]| {
            let mut m = Map::new();
            for (name, x) in self.base.iter().zip(v) {
                m.insert(name.clone(), rational::to_json_entry(x));
            }
            Value::Object(m)
        };
        json!({ "c": part(&self.c), "r": part(&self.r) })
    }

    pub fn from_json(v: &Value, base: &[String]) -> Result<Self> {
        let part = |key: &str| -> Result<Vec<Rational>> {
            let m = v
                .get(key)
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse(format!("point is missing {key:?}")))?;
            if m.len() != base.len() {
                return Err(Error::Parse(format!("point part {key:?} has wrong size")));
            }
            base.iter()
                .map(|s| {
                    m.get(s)
                        .ok_or_else(|| Error::UnknownElement(s.clone()))
                        .and_then(rational::from_json_entry)
                })
                .collect()
        };
        LabeledPoint::new(base.to_vec(), part("c")?, part("r")?)
    }
}

fn check_index(mu: &DirectedDistance, p: &LabeledPoint) -> Result<()> {
    if p.base.as_slice() != mu.elements() {
        return Err(Error::Invalid("point is indexed by a different ground set".into()));
    }
    Ok(())
}

/// `K(p)`: bipartite graph of tight defining inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightnessGraph {
    n: usize,
    adj: Vec<Vec<bool>>,
}

impl TightnessGraph {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        self.adj[s][t]
    }

    /// Edges `(s, t)` meaning `s^c t^r`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|s| (0..self.n).map(move |t| (s, t)))
            .filter(|&(s, t)| self.adj[s][t])
            .collect()
    }

    /// `N_p(U)` for a set of column nodes, as row indices.
    pub fn column_neighbors(&self, u: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.n)
            .filter(|&t| u.iter().any(|&s| self.adj[s][t]))
            .collect()
    }

    /// `N_p(U)` for a set of row nodes, as column indices.
    pub fn row_neighbors(&self, u: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.n)
            .filter(|&s| u.iter().any(|&t| self.adj[s][t]))
            .collect()
    }

    pub fn is_subgraph_of(&self, other: &TightnessGraph) -> bool {
        self.edges().iter().all(|&(s, t)| other.adj[s][t])
    }

    /// Connected components over nodes `0..2n` (columns then rows).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut label = vec![usize::MAX; 2 * n];
        let mut out = Vec::new();
        for start in 0..2 * n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![start];
            label[start] = id;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                let nbrs: Vec<usize> = if u < n {
                    (0..n).filter(|&t| self.adj[u][t]).map(|t| n + t).collect()
                } else {
                    (0..n).filter(|&s| self.adj[s][u - n]).collect()
                };
                for v in nbrs {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        let n = self.n;
        (0..2 * n)
            .filter(|&u| {
                if u < n {
                    !self.adj[u].iter().any(|&b| b)
                } else {
                    !(0..n).any(|s| self.adj[s][u - n])
                }
            })
            .collect()
    }

    pub fn to_dot(&self, names: &[String]) -> String {
        let mut out = String::from("graph K {\n  rankdir=LR;\n");
        out.push_str("  { rank=same; ");
        for s in names {
            out.push_str(&format!("\"{s}^c\"; "));
        }
        out.push_str("}\n  { rank=same; ");
        for s in names {
            out.push_str(&format!("\"{s}^r\"; "));
        }
        out.push_str("}\n");
        for (s, t) in self.edges() {
            out.push_str(&format!("  \"{}^c\" -- \"{}^r\";\n", names[s], names[t]));
        }
        out.push_str("}\n");
        out
    }
}

pub fn tightness_graph(mu: &DirectedDistance, p: &LabeledPoint) -> Result<TightnessGraph> {
    check_index(mu, p)?;
    let n = mu.len();
    let adj = (0..n)
        .map(|s| (0..n).map(|t| &p.c[s] + &p.r[t] == *mu.get(s, t)).collect())
        .collect();
    Ok(TightnessGraph { n, adj })
}

pub fn in_p(mu: &DirectedDistance, p: &LabeledPoint) -> bool {
    let n = mu.len();
    (0..n).all(|s| (0..n).all(|t| &p.c[s] + &p.r[t] >= *mu.get(s, t)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointClassification {
    pub in_p: bool,
    pub in_p_plus: bool,
    pub in_q: bool,
    pub in_t: bool,
    pub in_q_slim: bool,
    pub face_dim_t: Option<usize>,
    /// Local dimension modulo the lineality direction.
    pub face_dim_q: Option<usize>,
    /// Lower bound on the local dimension in the slimmed quotient.
    pub slim_dim: Option<usize>,
    pub terminal_regions: Vec<usize>,
    pub fat_relative_to: Option<Vec<usize>>,
    pub degenerate_relative_to: Option<Vec<usize>>,
}

impl PointClassification {
    pub fn to_json(&self, names: &[String]) -> Value {
        let set = |v: &[usize]| v.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();
        json!({
            "in_P": self.in_p,
            "in_P_plus": self.in_p_plus,
            "in_Q": self.in_q,
            "in_T": self.in_t,
            "in_Q_slim": self.in_q_slim,
            "face_dim_T": self.face_dim_t,
            "face_dim_Q": self.face_dim_q,
            "slim_dim": self.slim_dim,
            "terminal_regions": set(&self.terminal_regions),
            "fat_relative_to": self.fat_relative_to.as_deref().map(set),
            "degenerate_relative_to": self.degenerate_relative_to.as_deref().map(set),
        })
    }
}

pub fn classify_point(mu: &DirectedDistance, p: &LabeledPoint) -> Result<PointClassification> {
    check_index(mu, p)?;
    let n = mu.len();
    let k = tightness_graph(mu, p)?;
    let in_p = in_p(mu, p);
    let in_p_plus = in_p && p.is_nonnegative();
    let isolated = k.isolated_nodes();
    let in_q = in_p && isolated.is_empty();
    let in_t = in_p_plus && isolated.iter().all(|&u| !p.node(u).is_positive());
    let comps = k.components();
    let face_dim_t = in_t.then(|| {
        comps
            .iter()
            .filter(|c| c.iter().all(|&u| !p.node(u).is_zero()))
            .count()
    });
    let face_dim_q = in_q.then(|| comps.len() - 1);
    let terminal_regions: Vec<usize> = (0..n).filter(|&s| k.has_edge(s, s)).collect();

    let mut fat = None;
    let mut degenerate = None;
    if in_q && !terminal_regions.is_empty() {
        let x: BTreeSet<usize> = terminal_regions.iter().copied().collect();
        let rest: BTreeSet<usize> = (0..n).filter(|s| !x.contains(s)).collect();
        let nc = k.column_neighbors(&rest);
        let nr = k.row_neighbors(&rest);
        if nc.is_subset(&rest) || nr.is_subset(&rest) {
            fat = Some(terminal_regions.clone());
        }
        if nc == rest || nr == rest {
            degenerate = Some(terminal_regions.clone());
        }
    }
    let proper_fat = fat.is_some() && degenerate.is_none();
    let in_q_slim = in_q && !proper_fat;
    let slim_dim = if in_q_slim {
        let d = comps.len() - 1;
        Some(if degenerate.is_some() { d.saturating_sub(1) } else { d })
    } else {
        None
    };
    Ok(PointClassification {
        in_p,
        in_p_plus,
        in_q,
        in_t,
        in_q_slim,
        face_dim_t,
        face_dim_q,
        slim_dim,
        terminal_regions,
        fat_relative_to: fat,
        degenerate_relative_to: degenerate,
    })
}

/// Fat test through the perturbation `p^c - eps 1_{(S-X)^c}` (or the row
/// analogue) staying in the column (row) projection of `Q^+_{mu,X}`.
/// `None` when `p` is not in `Q^+` or `X_p` is empty.
pub fn is_fat_by_perturbation(mu: &DirectedDistance, p: &LabeledPoint) -> Result<Option<bool>> {
    let cls = classify_point(mu, p)?;
    if !cls.in_q || !p.is_nonnegative() || cls.terminal_regions.is_empty() {
        return Ok(None);
    }
    let n = mu.len();
    let x = &cls.terminal_regions;
    // below every positive slack and every positive coordinate
    let mut gap: Option<Rational> = None;
    let mut note = |v: Rational| {
        if v.is_positive() && gap.as_ref().is_none_or(|g| v < *g) {
            gap = Some(v);
        }
    };
    for s in 0..n {
        for t in 0..n {
            note(&p.c[s] + &p.r[t] - mu.get(s, t));
        }
        note(p.c[s].clone());
        note(p.r[s].clone());
    }
    let eps = gap.unwrap_or_else(|| rat(1)) / rat(4);
    let same_region = |q: &LabeledPoint| -> bool {
        let c = classify_point(mu, q).expect("indexed");
        c.in_q && q.is_nonnegative() && c.terminal_regions == *x
    };
    let mut qc = p.c.clone();
    for s in 0..n {
        if !x.contains(&s) {
            qc[s] -= &eps;
        }
    }
    let by_column = qc.iter().all(|v| !v.is_negative()) && {
        let r = row_lift(mu, &qc);
        let q = LabeledPoint { base: p.base.clone(), c: qc, r };
        q.r.iter().all(|v| !v.is_negative()) && same_region(&q)
    };
    let mut qr = p.r.clone();
    for s in 0..n {
        if !x.contains(&s) {
            qr[s] -= &eps;
        }
    }
    let by_row = qr.iter().all(|v| !v.is_negative()) && {
        let c = column_lift(mu, &qr);
        let q = LabeledPoint { base: p.base.clone(), c, r: qr };
        q.c.iter().all(|v| !v.is_negative()) && same_region(&q)
    };
    Ok(Some(by_column || by_row))
}

/// `mu_s = (mu(., s) | mu(s, .))`.
pub fn column_row_point(mu: &DirectedDistance, s: usize) -> Result<LabeledPoint> {
    let n = mu.len();
    if s >= n {
        return Err(Error::UnknownElement(format!("#{s}")));
    }
    LabeledPoint::new(
        mu.elements().to_vec(),
        (0..n).map(|t| mu.get(t, s).clone()).collect(),
        (0..n).map(|t| mu.get(s, t).clone()).collect(),
    )
}

/// `r(t) = max_s (mu(s,t) - q(s))`.
pub fn row_lift(mu: &DirectedDistance, q: &[Rational]) -> Vec<Rational> {
    let n = mu.len();
    (0..n)
        .map(|t| (0..n).map(|s| mu.get(s, t) - &q[s]).max().expect("nonempty"))
        .collect()
}

/// `c(s) = max_t (mu(s,t) - r(t))`.
pub fn column_lift(mu: &DirectedDistance, r: &[Rational]) -> Vec<Rational> {
    let n = mu.len();
    (0..n)
        .map(|s| (0..n).map(|t| mu.get(s, t) - &r[t]).max().expect("nonempty"))
        .collect()
}

/// Lift a column part into `Q_mu`; fails when the result is not in `Q_mu`.
pub fn lift_column(mu: &DirectedDistance, q: &[Rational]) -> Result<LabeledPoint> {
    if q.len() != mu.len() {
        return Err(Error::Invalid("column part has wrong size".into()));
    }
    if mu.is_empty() {
        return Ok(LabeledPoint::zero(Vec::new()));
    }
    let p = LabeledPoint::new(mu.elements().to_vec(), q.to_vec(), row_lift(mu, q))?;
    if !classify_point(mu, &p)?.in_q {
        return Err(Error::Invalid(
            "lifted point is not in Q: the column part is not a projection of Q".into(),
        ));
    }
    Ok(p)
}

/// Tropical projection of an arbitrary column vector onto `Q_mu`.
pub fn project_to_q(mu: &DirectedDistance, q: &[Rational]) -> LabeledPoint {
    let r = row_lift(mu, q);
    let c = column_lift(mu, &r);
    LabeledPoint {
        base: mu.elements().to_vec(),
        c,
        r,
    }
}

/// Projection of a column vector onto `T_mu` (clamped at zero).
pub fn project_to_t(mu: &DirectedDistance, q: &[Rational]) -> LabeledPoint {
    let q: Vec<Rational> = q.iter().map(|v| rational::positive_part(v.clone())).collect();
    let r: Vec<Rational> = row_lift(mu, &q).into_iter().map(rational::positive_part).collect();
    let c = column_lift(mu, &r).into_iter().map(rational::positive_part).collect();
    LabeledPoint {
        base: mu.elements().to_vec(),
        c,
        r,
    }
}

/// `D_inf^+(a, b) = max_i (b_i - a_i)_+`.
pub fn d_inf_plus(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .map(|(x, y)| y - x)
        .fold(Rational::zero(), |m, v| if v > m { v } else { m })
}

pub fn directed_linf(p: &LabeledPoint, q: &LabeledPoint) -> Result<Rational> {
    if p.base != q.base {
        return Err(Error::Invalid("points indexed by different ground sets".into()));
    }
    let a = d_inf_plus(&p.c, &q.c);
    let b = d_inf_plus(&q.r, &p.r);
    Ok(if a > b { a } else { b })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessTarget {
    T,
    QSlim,
}

impl WitnessTarget {
    pub fn local_dimension(self, cls: &PointClassification) -> Option<usize> {
        match self {
            WitnessTarget::T => cls.face_dim_t,
            WitnessTarget::QSlim => cls.slim_dim,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub point: LabeledPoint,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    Found(Witness),
    /// Every planned candidate was examined and none qualified.
    NoneFound,
    /// The search stopped on its budget before finishing.
    BudgetExhausted,
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            WitnessOutcome::Found(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub seed: u64,
    pub samples: usize,
    /// Largest ground set for which complex vertices are enumerated.
    pub enumeration_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            samples: 2000,
            enumeration_limit: 5,
        }
    }
}

/// Vertices of the polyhedral complex of the target: connected tightness
/// graphs (normalized with `c[0] = 0`) for `Q`, or every component pinned by
/// a zero coordinate for `T`.
///
/// Every such vertex is reached by growing its tightness graph one node at a
/// time from a pinned node, where each added node takes the smallest value
/// compatible with the nodes already placed.
pub fn complex_vertices(mu: &DirectedDistance, target: WitnessTarget) -> Vec<LabeledPoint> {
    let n = mu.len();
    if n == 0 {
        return Vec::new();
    }
    let m = 2 * n;
    let mut seen: HashSet<(u64, Vec<Option<Rational>>)> = HashSet::new();
    let mut found: BTreeSet<LabeledPoint> = BTreeSet::new();
    let mut stack: Vec<(u64, Vec<Option<Rational>>)> = Vec::new();
    match target {
        WitnessTarget::QSlim => {
            let mut vals = vec![None; m];
            vals[0] = Some(Rational::zero());
            stack.push((1, vals));
        }
        WitnessTarget::T => stack.push((0, vec![None; m])),
    }
    let pair = |u: usize, v: usize| -> &Rational {
        if u < n {
            mu.get(u, v - n)
        } else {
            mu.get(v, u - n)
        }
    };
    while let Some((mask, vals)) = stack.pop() {
        if mask == (1u64 << m) - 1 {
            let c = vals[..n].iter().map(|v| v.clone().expect("set")).collect();
            let r = vals[n..].iter().map(|v| v.clone().expect("set")).collect();
            found.insert(LabeledPoint {
                base: mu.elements().to_vec(),
                c,
                r,
            });
            continue;
        }
        for u in 0..m {
            if mask >> u & 1 == 1 {
                continue;
            }
            let other = if u < n { n..m } else { 0..n };
            let best = other
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| pair(u, v) - vals[v].as_ref().expect("set"))
                .max();
            let value = match target {
                WitnessTarget::QSlim => match best {
                    Some(b) => b,
                    None => continue,
                },
                WitnessTarget::T => match best {
                    Some(b) if b.is_positive() => b,
                    _ => Rational::zero(),
                },
            };
            let mut next = vals.clone();
            next[u] = Some(value);
            let key = (mask | 1 << u, next);
            if seen.insert(key.clone()) {
                stack.push(key);
            }
        }
    }
    found
        .into_iter()
        .filter(|p| {
            let cls = classify_point(mu, p).expect("indexed");
            match target {
                WitnessTarget::T => cls.face_dim_t == Some(0),
                WitnessTarget::QSlim => cls.face_dim_q == Some(0),
            }
        })
        .collect()
}

/// Vertex graph of the slimmed tropical polytope, for fixtures where no
/// degenerate collapse occurs. Vertices are normalized modulo the lineality
/// direction; `u`–`v` is an edge when a one-dimensional slim cell has both
/// as its endpoints.
pub fn slim_vertex_graph(mu: &DirectedDistance) -> (Vec<LabeledPoint>, Vec<(usize, usize)>) {
    let verts: Vec<LabeledPoint> = complex_vertices(mu, WitnessTarget::QSlim)
        .into_iter()
        .filter(|p| classify_point(mu, p).is_ok_and(|c| c.in_q_slim))
        .collect();
    let graphs: Vec<TightnessGraph> = verts
        .iter()
        .map(|p| tightness_graph(mu, p).expect("indexed"))
        .collect();
    let mut edges = Vec::new();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            let mid = LabeledPoint::combination(&[&verts[i], &verts[j]]);
            let cls = classify_point(mu, &mid).expect("indexed");
            if cls.slim_dim != Some(1) || cls.face_dim_q != Some(1) {
                continue;
            }
            let g = tightness_graph(mu, &mid).expect("indexed");
            if g.is_subgraph_of(&graphs[i]) && g.is_subgraph_of(&graphs[j]) {
                edges.push((i, j));
            }
        }
    }
    (verts, edges)
}

fn qualifies(mu: &DirectedDistance, p: &LabeledPoint, target: WitnessTarget) -> Option<Witness> {
    let cls = classify_point(mu, p).ok()?;
    let member = match target {
        WitnessTarget::T => cls.in_t,
        WitnessTarget::QSlim => cls.in_q_slim,
    };
    let dim = target.local_dimension(&cls)?;
    if !member || dim < 2 {
        return None;
    }
    let point = match target {
        WitnessTarget::T => p.clone(),
        WitnessTarget::QSlim => p.nonnegative_representative().unwrap_or_else(|| p.clone()),
    };
    Some(Witness {
        point,
        dimension: dim,
    })
}

fn project(mu: &DirectedDistance, q: &[Rational], target: WitnessTarget) -> LabeledPoint {
    match target {
        WitnessTarget::T => project_to_t(mu, q),
        WitnessTarget::QSlim => project_to_q(mu, q),
    }
}

/// Perturbations `q - eps 1_U` of a column part, re-projected.
fn perturbations(
    mu: &DirectedDistance,
    p: &LabeledPoint,
    eps: &Rational,
    target: WitnessTarget,
) -> Vec<LabeledPoint> {
    let n = mu.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let q: Vec<Rational> = (0..n)
            .map(|s| {
                if mask >> s & 1 == 1 {
                    &p.c[s] - eps
                } else {
                    p.c[s].clone()
                }
            })
            .collect();
        out.push(project(mu, &q, target));
    }
    out
}

/// Look for a point of local dimension at least two in `T_mu` or in the
/// slimmed polytope. Candidates, in order: the points `mu_s` and their
/// perturbations, barycenters of complex vertices (when the ground set is
/// within the enumeration limit), then seeded random projections.
pub fn dim_witness_search(
    mu: &DirectedDistance,
    target: WitnessTarget,
    config: &SearchConfig,
) -> WitnessOutcome {
    let n = mu.len();
    if n < 2 {
        return WitnessOutcome::NoneFound;
    }
    let den = common_denominator(mu.support().iter().map(|&(s, t)| mu.get(s, t)));
    let unit = Rational::new(1.into(), den.clone());
    let seeds: Vec<LabeledPoint> = (0..n)
        .map(|s| column_row_point(mu, s).expect("in range"))
        .collect();
    for p in &seeds {
        if let Some(w) = qualifies(mu, p, target) {
            return WitnessOutcome::Found(w);
        }
    }
    for k in [2i64, 3, 4] {
        let eps = &unit / rat(k);
        for p in &seeds {
            for q in perturbations(mu, p, &eps, target) {
                if let Some(w) = qualifies(mu, &q, target) {
                    return WitnessOutcome::Found(w);
                }
            }
        }
    }
    let exhaustive = n <= config.enumeration_limit;
    if exhaustive {
        let verts = complex_vertices(mu, target);
        let v = verts.len();
        for a in 0..v {
            for b in a + 1..v {
                for c in b + 1..v {
                    let bary = LabeledPoint::combination(&[&verts[a], &verts[b], &verts[c]]);
                    if let Some(w) = qualifies(mu, &bary, target) {
                        return WitnessOutcome::Found(w);
                    }
                }
            }
        }
        if target == WitnessTarget::QSlim {
            // degenerate cells lose one dimension in the quotient
            for a in 0..v {
                for b in a + 1..v {
                    for c in b + 1..v {
                        for d in c + 1..v {
                            let bary = LabeledPoint::combination(&[
                                &verts[a], &verts[b], &verts[c], &verts[d],
                            ]);
                            if let Some(w) = qualifies(mu, &bary, target) {
                                return WitnessOutcome::Found(w);
                            }
                        }
                    }
                }
            }
        }
    }
    let top: Rational = mu
        .support()
        .iter()
        .map(|&(s, t)| mu.get(s, t).clone())
        .max()
        .unwrap_or_else(|| rat(1));
    let grain = &unit / rat(12);
    let steps = (rat(2) * &top / &grain).to_integer();
    let steps = i64::try_from(steps).unwrap_or(i64::MAX / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.samples {
        let q: Vec<Rational> = (0..n)
            .map(|s| {
                if s == 0 && target == WitnessTarget::QSlim {
                    return Rational::zero();
                }
                let k: i64 = rng.gen_range(-steps..=steps);
                let scale = &grain * rat(k);
                match target {
                    WitnessTarget::T => rational::positive_part(scale),
                    WitnessTarget::QSlim => scale,
                }
            })
            .collect();
        let p = project(mu, &q, target);
        if let Some(w) = qualifies(mu, &p, target) {
            return WitnessOutcome::Found(w);
        }
    }
    if exhaustive {
        WitnessOutcome::NoneFound
    } else {
        WitnessOutcome::BudgetExhausted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn all_one() -> DirectedDistance {
        DirectedDistance::all_one(names(&["s", "t", "u"]))
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn mu_s_of_all_one() {
        let mu = all_one();
        let p = column_row_point(&mu, 0).unwrap();
        assert_eq!(p.c, ints(&[0, 1, 1]));
        assert_eq!(p.r, ints(&[0, 1, 1]));
        let k = tightness_graph(&mu, &p).unwrap();
        assert!((0..3).all(|t| k.has_edge(0, t) && k.has_edge(t, 0)));
        let cls = classify_point(&mu, &p).unwrap();
        assert!(cls.in_t && cls.in_q && cls.in_q_slim);
        assert_eq!(cls.terminal_regions, vec![0]);
        assert_eq!(cls.face_dim_q, Some(0));
        assert_eq!(cls.face_dim_t, Some(0));
    }

    #[test]
    fn huge_point_has_no_tight_edges() {
        let mu = all_one();
        let p = LabeledPoint::new(mu.elements().to_vec(), ints(&[9, 9, 9]), ints(&[9, 9, 9])).unwrap();
        assert!(tightness_graph(&mu, &p).unwrap().edges().is_empty());
        let cls = classify_point(&mu, &p).unwrap();
        assert!(cls.in_p && !cls.in_q && !cls.in_t);
    }

    #[test]
    fn lineality_shift_keeps_q() {
        let mu = all_one();
        let p = column_row_point(&mu, 1).unwrap().shift(&rat(-3));
        let cls = classify_point(&mu, &p).unwrap();
        assert!(cls.in_q && !cls.in_p_plus);
    }

    #[test]
    fn single_commodity_point() {
        let mu = DirectedDistance::from_int_rows(&["s", "t"], &[&[0, 1], &[0, 0]]).unwrap();
        let p = column_row_point(&mu, 0).unwrap();
        assert_eq!(p.c[1], rat(0));
        assert_eq!(p.r[1], rat(1));
        let z = DirectedDistance::zeros(names(&["a", "b"]));
        assert!(column_row_point(&z, 1).unwrap().is_nonnegative());
        assert!(column_row_point(&z, 2).is_err());
    }

    #[test]
    fn lifting() {
        let mu = all_one();
        let p = lift_column(&mu, &ints(&[0, 1, 1])).unwrap();
        assert_eq!(p, column_row_point(&mu, 0).unwrap());
        let z = DirectedDistance::zeros(names(&["a", "b"]));
        assert_eq!(lift_column(&z, &ints(&[0, 0])).unwrap(), LabeledPoint::zero(names(&["a", "b"])));
        // column 1 of u cannot be tight with any row
        assert!(lift_column(&mu, &ints(&[0, 0, 5])).is_err());
    }

    #[test]
    fn linf_examples() {
        let mu = all_one();
        let ps = column_row_point(&mu, 0).unwrap();
        let pt = column_row_point(&mu, 1).unwrap();
        assert_eq!(directed_linf(&ps, &ps).unwrap(), rat(0));
        assert_eq!(directed_linf(&ps, &pt).unwrap(), rat(1));
        let z = LabeledPoint::zero(mu.elements().to_vec());
        let one = LabeledPoint::new(mu.elements().to_vec(), ints(&[1, 1, 1]), ints(&[1, 1, 1])).unwrap();
        assert_eq!(directed_linf(&z, &one).unwrap(), rat(1));
    }

    #[test]
    fn all_one_vertex_graph_is_a_star() {
        let (verts, edges) = slim_vertex_graph(&all_one());
        assert_eq!(verts.len(), 4);
        assert_eq!(edges.len(), 3);
        let mut deg = vec![0; 4];
        for (a, b) in edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.sort_unstable();
        assert_eq!(deg, vec![1, 1, 1, 3]);
    }

    #[test]
    fn all_one_witnesses() {
        let mu = all_one();
        let cfg = SearchConfig::default();
        let w = dim_witness_search(&mu, WitnessTarget::T, &cfg);
        assert_eq!(w.witness().unwrap().dimension, 2);
        assert_eq!(dim_witness_search(&mu, WitnessTarget::QSlim, &cfg), WitnessOutcome::NoneFound);
    }

    fn half(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| frac(x, 2)).collect()
    }

    #[test]
    fn two_commodity_square_center() {
        let mu = DirectedDistance::from_int_rows(
            &["s", "t", "s2", "t2"],
            &[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]],
        )
        .unwrap();
        // alpha = beta = 1/2 on the square face
        let p = LabeledPoint::new(mu.elements().to_vec(), half(&[1, 0, 1, 0]), half(&[0, 1, 0, 1])).unwrap();
        let k = tightness_graph(&mu, &p).unwrap();
        assert!(k.isolated_nodes().is_empty());
        let mut comps: Vec<usize> = k.components().iter().map(Vec::len).collect();
        comps.sort_unstable();
        assert_eq!(comps, vec![2, 2, 4]);
        let cls = classify_point(&mu, &p).unwrap();
        assert!(cls.in_t && cls.in_q_slim);
        assert_eq!(cls.face_dim_t, Some(2));
        assert_eq!(cls.face_dim_q, Some(2));
    }

    fn fat_weight() -> DirectedDistance {
        DirectedDistance::from_int_rows(
            &["s", "t", "u", "v"],
            &[&[0, 1, 1, 0], &[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]],
        )
        .unwrap()
    }

    #[test]
    fn proper_fat_relative_to_v() {
        let mu = fat_weight();
        let p = LabeledPoint::new(mu.elements().to_vec(), half(&[1, 1, 0, 0]), half(&[1, 1, 1, 0])).unwrap();
        let cls = classify_point(&mu, &p).unwrap();
        assert!(cls.in_q && !cls.in_q_slim);
        assert_eq!(cls.fat_relative_to, Some(vec![3]));
        assert_eq!(cls.degenerate_relative_to, None);
        assert_eq!(is_fat_by_perturbation(&mu, &p).unwrap(), Some(true));
    }

    /// Every point of the half-integer grid in `[0, 1]^{2n}`.
    fn grid(mu: &DirectedDistance) -> Vec<LabeledPoint> {
        let n = mu.len();
        (0..3usize.pow(2 * n as u32))
            .map(|mut code| {
                let mut v = Vec::with_capacity(2 * n);
                for _ in 0..2 * n {
                    v.push(frac((code % 3) as i64, 2));
                    code /= 3;
                }
                let r = v.split_off(n);
                LabeledPoint::new(mu.elements().to_vec(), v, r).unwrap()
            })
            .collect()
    }

    #[test]
    fn fat_predicates_agree() {
        let mut checked = 0;
        for mu in [fat_weight(), all_one()] {
            for p in grid(&mu) {
                if let Some(by_perturbation) = is_fat_by_perturbation(&mu, &p).unwrap() {
                    let cls = classify_point(&mu, &p).unwrap();
                    assert_eq!(cls.fat_relative_to.is_some(), by_perturbation, "{:?}", p.to_json());
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn metrics_have_no_fats() {
        let mu = all_one();
        assert!(mu.is_metric());
        for p in grid(&mu) {
            assert_eq!(classify_point(&mu, &p).unwrap().fat_relative_to, None);
        }
    }
}
