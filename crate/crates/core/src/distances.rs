//! Directed distances, cut distances, laminar families and the
//! extremality / minimality predicates.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lp::rank;
use crate::rational::{self, rat, Rational};

/// Nonnegative pair function with zero diagonal over an ordered ground set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectedDistance {
    elements: Vec<String>,
    values: Vec<Rational>,
}

impl fmt::Debug for DirectedDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DirectedDistance {:?}", self.elements)?;
        for i in 0..self.len() {
            let row: Vec<String> = (0..self.len())
                .map(|j| rational::format(self.get(i, j)))
                .collect();
            writeln!(f, "  {}: {}", self.elements[i], row.join(" "))?;
        }
        Ok(())
    }
}

impl DirectedDistance {
    pub fn new(elements: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = elements.len();
        let distinct: BTreeSet<&String> = elements.iter().collect();
        if distinct.len() != n {
            return Err(Error::Invalid("duplicate element names".into()));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("expected a {n}x{n} matrix")));
        }
        let values: Vec<Rational> = rows.into_iter().flatten().collect();
        let d = DirectedDistance { elements, values };
        for i in 0..n {
            if !d.get(i, i).is_zero() {
                return Err(Error::Invalid(format!(
                    "nonzero diagonal at {}",
                    d.elements[i]
                )));
            }
            for j in 0..n {
                if d.get(i, j).is_negative() {
                    return Err(Error::Invalid(format!(
                        "negative value at ({}, {})",
                        d.elements[i], d.elements[j]
                    )));
                }
            }
        }
        Ok(d)
    }

    pub fn from_fn(
        elements: Vec<String>,
        mut f: impl FnMut(usize, usize) -> Rational,
    ) -> Result<Self> {
        let n = elements.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::zero() } else { f(i, j) })
                    .collect()
            })
            .collect();
        Self::new(elements, rows)
    }

    pub fn from_int_rows(elements: &[&str], rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            elements.iter().map(|s| s.to_string()).collect(),
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn zeros(elements: Vec<String>) -> Self {
        let n = elements.len();
        DirectedDistance {
            elements,
            values: vec![Rational::zero(); n * n],
        }
    }

    pub fn all_one(elements: Vec<String>) -> Self {
        Self::from_fn(elements, |_, _| rat(1)).expect("valid")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[i * self.len() + j]
    }

    pub fn value(&self, s: &str, t: &str) -> Result<&Rational> {
        Ok(self.get(self.index_of(s)?, self.index_of(t)?))
    }

    /// Copy with one off-diagonal entry replaced.
    pub fn with_value(&self, i: usize, j: usize, v: Rational) -> Result<Self> {
        if i == j && !v.is_zero() {
            return Err(Error::Invalid("diagonal must stay zero".into()));
        }
        if v.is_negative() {
            return Err(Error::Invalid("negative value".into()));
        }
        let mut d = self.clone();
        let n = d.len();
        d.values[i * n + j] = v;
        Ok(d)
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.values.chunks(self.len().max(1)).map(|r| r.to_vec()).take(self.len()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
    }

    /// Ordered pairs with a positive value.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.pairs().filter(|&(i, j)| self.get(i, j).is_positive()).collect()
    }

    pub fn add(&self, other: &DirectedDistance) -> Result<Self> {
        if self.elements != other.elements {
            return Err(Error::Invalid("ground sets differ".into()));
        }
        Ok(DirectedDistance {
            elements: self.elements.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, k: &Rational) -> Result<Self> {
        if k.is_negative() {
            return Err(Error::Invalid("negative scale".into()));
        }
        Ok(DirectedDistance {
            elements: self.elements.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        })
    }

    /// Restriction to a subset of the ground set, in the given order.
    pub fn restrict(&self, names: &[String]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|s| self.index_of(s))
            .collect::<Result<_>>()?;
        Self::from_fn(names.to_vec(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    pub fn is_metric(&self) -> bool {
        let n = self.len();
        for s in 0..n {
            for t in 0..n {
                for u in 0..n {
                    if self.get(s, t) + self.get(t, u) < *self.get(s, u) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.len())
            .map(|i| {
                Value::Array(
                    (0..self.len())
                        .map(|j| rational::to_json_entry(self.get(i, j)))
                        .collect(),
                )
            })
            .collect();
        json!({ "elements": self.elements, "rows": rows })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let elements = v
            .get("elements")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"elements\" array".into()))?
            .iter()
            .map(|e| {
                e.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse("element names must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"rows\" array".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("rows must be arrays".into()))?
                    .iter()
                    .map(rational::from_json_entry)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements, rows).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A pair of disjoint index sets of a ground set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialCut {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
}

impl PartialCut {
    pub fn new(a: impl IntoIterator<Item = usize>, b: impl IntoIterator<Item = usize>) -> Result<Self> {
        let a: BTreeSet<usize> = a.into_iter().collect();
        let b: BTreeSet<usize> = b.into_iter().collect();
        if !a.is_disjoint(&b) {
            return Err(Error::Invalid("cut sides overlap".into()));
        }
        Ok(PartialCut { a, b })
    }

    pub fn from_names(a: &[&str], b: &[&str], ground: &[String]) -> Result<Self> {
        let find = |s: &&str| {
            ground
                .iter()
                .position(|g| g == s)
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        Self::new(
            a.iter().map(find).collect::<Result<Vec<_>>>()?,
            b.iter().map(find).collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn is_full(&self, n: usize) -> bool {
        self.a.len() + self.b.len() == n
    }

    fn fits(&self, n: usize) -> bool {
        self.a.iter().chain(&self.b).all(|&i| i < n)
    }

    pub fn laminar_with(&self, other: &PartialCut) -> bool {
        let (a, b, a2, b2) = (&self.a, &self.b, &other.a, &other.b);
        (a.is_subset(a2) && b.is_superset(b2))
            || (a.is_subset(b2) && b.is_superset(a2))
            || (a.is_superset(a2) && b.is_subset(b2))
            || (a.is_superset(b2) && b.is_subset(a2))
    }

    pub fn to_json(&self, ground: &[String]) -> Value {
        let names = |s: &BTreeSet<usize>| s.iter().map(|&i| ground[i].clone()).collect::<Vec<_>>();
        json!({ "A": names(&self.a), "B": names(&self.b) })
    }

    pub fn from_json(v: &Value, ground: &[String]) -> Result<Self> {
        let side = |key: &str| -> Result<Vec<String>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("cut is missing {key:?}")))?
                .iter()
                .map(|e| {
                    e.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Parse("cut members must be strings".into()))
                })
                .collect()
        };
        let a = side("A")?;
        let b = side("B")?;
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        let b: Vec<&str> = b.iter().map(String::as_str).collect();
        Self::from_names(&a, &b, ground)
    }
}

pub fn cut_distance(cut: &PartialCut, ground: &[String]) -> Result<DirectedDistance> {
    if !cut.a.is_disjoint(&cut.b) {
        return Err(Error::Invalid("cut sides overlap".into()));
    }
    if !cut.fits(ground.len()) {
        return Err(Error::Invalid("cut member outside the ground set".into()));
    }
    DirectedDistance::from_fn(ground.to_vec(), |i, j| {
        if cut.a.contains(&i) && cut.b.contains(&j) {
            rat(1)
        } else {
            Rational::zero()
        }
    })
}

pub fn is_laminar_family(cuts: &[PartialCut]) -> bool {
    cuts.iter()
        .enumerate()
        .all(|(i, c)| cuts[i + 1..].iter().all(|d| c.laminar_with(d)))
}

/// Weighted laminar family of partial cuts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarDecomposition {
    pub cuts: Vec<PartialCut>,
    pub weights: Vec<Rational>,
}

impl LaminarDecomposition {
    pub fn sum(&self, ground: &[String]) -> Result<DirectedDistance> {
        let mut total = DirectedDistance::zeros(ground.to_vec());
        for (cut, w) in self.cuts.iter().zip(&self.weights) {
            total = total.add(&cut_distance(cut, ground)?.scale(w)?)?;
        }
        Ok(total)
    }

    /// Checks laminarity, positive weights and exact reconstruction of `mu`.
    pub fn validate(&self, mu: &DirectedDistance) -> Result<()> {
        if self.cuts.len() != self.weights.len() {
            return Err(Error::Invalid("one weight per cut required".into()));
        }
        if self.weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Invalid("weights must be positive".into()));
        }
        if !is_laminar_family(&self.cuts) {
            return Err(Error::Invalid("family is not laminar".into()));
        }
        if self.sum(mu.elements())? != *mu {
            return Err(Error::Invalid("weighted cut sum differs from the distance".into()));
        }
        Ok(())
    }
}

/// The class `[xy]` of edges from `[x]` to `[y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
}

impl EdgeClass {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.from
            .iter()
            .flat_map(move |&x| self.to.iter().map(move |&y| (x, y)))
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.from.contains(&x) && self.to.contains(&y)
    }
}

/// Classes of `x ~ y  <=>  d(xy) = d(yx) = 0`, as a label per element.
pub fn zero_classes(d: &DirectedDistance) -> Vec<usize> {
    let n = d.len();
    let mut label: Vec<usize> = (0..n).collect();
    for x in 0..n {
        for y in 0..x {
            if d.get(x, y).is_zero() && d.get(y, x).is_zero() {
                label[x] = label[y];
                break;
            }
        }
    }
    label
}

fn class_members(label: &[usize]) -> Vec<Vec<usize>> {
    let mut reps: Vec<usize> = label.to_vec();
    reps.sort_unstable();
    reps.dedup();
    reps.iter()
        .map(|&r| (0..label.len()).filter(|&i| label[i] == r).collect())
        .collect()
}

fn is_extremal_edge(d: &DirectedDistance, x: usize, y: usize, label: &[usize]) -> bool {
    if label[x] == label[y] {
        return false;
    }
    let n = d.len();
    for s in 0..n {
        for t in 0..n {
            if s == t || (label[s] == label[x] && label[t] == label[y]) {
                continue;
            }
            if *d.get(s, t) == d.get(s, x) + d.get(x, y) + d.get(y, t) {
                return false;
            }
        }
    }
    true
}

/// Extremal edge classes of a metric, in order of their representatives.
pub fn extremal_classes(d: &DirectedDistance) -> Vec<EdgeClass> {
    let label = zero_classes(d);
    let classes = class_members(&label);
    let mut out = Vec::new();
    for cx in &classes {
        for cy in &classes {
            if cx[0] != cy[0] && is_extremal_edge(d, cx[0], cy[0], &label) {
                out.push(EdgeClass {
                    from: cx.clone(),
                    to: cy.clone(),
                });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimalityStatus {
    pub minimal: bool,
    pub c_minimal: bool,
}

fn check_dominates(d: &DirectedDistance, mu: &DirectedDistance) -> Result<()> {
    if d.elements() != mu.elements() {
        return Err(Error::Invalid("d and mu must share the ground set".into()));
    }
    if !d.is_metric() {
        return Err(Error::Invalid("d is not a metric".into()));
    }
    if let Some((i, j)) = d.pairs().find(|&(i, j)| d.get(i, j) < mu.get(i, j)) {
        return Err(Error::Invalid(format!(
            "d({}, {}) is below mu",
            d.elements()[i],
            d.elements()[j]
        )));
    }
    Ok(())
}

/// Strongly connected component label per node of a digraph on `0..n`.
pub(crate) fn strong_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        reach[i][i] = true;
    }
    for &(u, v) in edges {
        reach[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n)
        .map(|i| (0..n).find(|&j| reach[i][j] && reach[j][i]).unwrap_or(i))
        .collect()
}

pub fn minimality_status(d: &DirectedDistance, mu: &DirectedDistance) -> Result<MinimalityStatus> {
    check_dominates(d, mu)?;
    let h: Vec<(usize, usize)> = d.pairs().filter(|&(i, j)| d.get(i, j) == mu.get(i, j)).collect();
    let comp = strong_components(d.len(), &h);
    let mut minimal = true;
    let mut c_minimal = true;
    for class in extremal_classes(d) {
        let meets = class.edges().any(|e| h.contains(&e));
        let on_cycle = class
            .edges()
            .any(|(x, y)| h.contains(&(x, y)) && comp[x] == comp[y]);
        minimal &= meets;
        c_minimal &= on_cycle;
    }
    Ok(MinimalityStatus { minimal, c_minimal })
}

/// A strictly smaller member of the dominating set, obtained by lowering one
/// extremal class that misses `H`; `None` when `d` is minimal.
pub fn decrease_witness(d: &DirectedDistance, mu: &DirectedDistance) -> Result<Option<DirectedDistance>> {
    check_dominates(d, mu)?;
    let n = d.len();
    let Some(class) = extremal_classes(d)
        .into_iter()
        .find(|c| c.edges().all(|(x, y)| d.get(x, y) > mu.get(x, y)))
    else {
        return Ok(None);
    };
    let ind = |a: usize, b: usize| i64::from(class.contains(a, b));
    let mut eps: Option<Rational> = None;
    let mut lower = |v: Rational| {
        if eps.as_ref().is_none_or(|e| v < *e) {
            eps = Some(v);
        }
    };
    for (x, y) in class.edges() {
        lower(d.get(x, y) - mu.get(x, y));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let k = ind(a, b) + ind(b, c) - ind(a, c);
                if k > 0 {
                    let slack = d.get(a, b) + d.get(b, c) - d.get(a, c);
                    lower(slack / rat(k));
                }
            }
        }
    }
    let eps = eps.expect("class is nonempty");
    debug_assert!(eps.is_positive());
    let out = DirectedDistance::from_fn(d.elements().to_vec(), |i, j| {
        if class.contains(i, j) {
            d.get(i, j) - &eps
        } else {
            d.get(i, j).clone()
        }
    })?;
    Ok(Some(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtensionStatus {
    pub tight: bool,
    pub cyclically_tight: bool,
}

/// Tightness of a metric extension `d` on `V` of `mu` on `S`.
pub fn extension_status(d: &DirectedDistance, mu: &DirectedDistance) -> Result<ExtensionStatus> {
    let idx: Vec<usize> = mu
        .elements()
        .iter()
        .map(|s| d.index_of(s))
        .collect::<Result<_>>()?;
    for (i, j) in mu.pairs() {
        if d.get(idx[i], idx[j]) != mu.get(i, j) {
            return Err(Error::Invalid(format!(
                "d and mu differ at ({}, {})",
                mu.elements()[i],
                mu.elements()[j]
            )));
        }
    }
    let bar = DirectedDistance::from_fn(d.elements().to_vec(), |x, y| {
        match (idx.iter().position(|&v| v == x), idx.iter().position(|&v| v == y)) {
            (Some(i), Some(j)) => mu.get(i, j).clone(),
            _ => Rational::zero(),
        }
    })?;
    let st = minimality_status(d, &bar)?;
    Ok(ExtensionStatus {
        tight: st.minimal,
        cyclically_tight: st.c_minimal,
    })
}

/// `D_inf^+` metric on the lattice points `(i/n, j/n)`, `0 <= j <= i <= n`.
pub fn gamma_metric(n: usize) -> Result<DirectedDistance> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let pts: Vec<(i64, i64)> = (0..=n as i64)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .collect();
    let names = pts.iter().map(|(i, j)| format!("({i},{j})")).collect();
    DirectedDistance::from_fn(names, |a, b| {
        let (p, q) = (pts[a], pts[b]);
        let m = (q.0 - p.0).max(q.1 - p.1).max(0);
        Rational::new(m.into(), (n as i64).into())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtremalityStatus {
    pub extreme: bool,
    pub c_extreme: bool,
}

/// Dimension of the solution space of the tight triangle equalities of `d`,
/// together with `x(xy) = 0` for the pairs selected by `zero`.
fn tight_space_dim(d: &DirectedDistance, zero: impl Fn(usize, usize) -> bool) -> usize {
    let n = d.len();
    let var: Vec<(usize, usize)> = d.pairs().collect();
    let col = |i: usize, j: usize| var.iter().position(|&p| p == (i, j)).expect("pair");
    let mut rows = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == b || b == c || a == c {
                    continue;
                }
                if *d.get(a, c) == d.get(a, b) + d.get(b, c) {
                    let mut row = vec![Rational::zero(); var.len()];
                    row[col(a, c)] += rat(1);
                    row[col(a, b)] -= rat(1);
                    row[col(b, c)] -= rat(1);
                    rows.push(row);
                }
            }
        }
    }
    for &(i, j) in &var {
        if zero(i, j) {
            let mut row = vec![Rational::zero(); var.len()];
            row[col(i, j)] = rat(1);
            rows.push(row);
        }
    }
    var.len() - rank(&rows)
}

/// Exact rank test for extreme rays of the metric cone, and the same test
/// modulo node potentials.
pub fn extremality_status(d: &DirectedDistance) -> Result<ExtremalityStatus> {
    if d.is_zero() {
        return Err(Error::Invalid("zero metric".into()));
    }
    if !d.is_metric() {
        return Err(Error::Invalid("not a metric".into()));
    }
    let extreme = tight_space_dim(d, |i, j| d.get(i, j).is_zero()) == 1;
    // Potentials p(y) - p(x) satisfy every path equality; pinning them on
    // the zero classes leaves (#classes - 1) dimensions of gauge.
    let label = zero_classes(d);
    let classes = class_members(&label).len();
    let c_extreme = tight_space_dim(d, |i, j| label[i] == label[j]) == classes;
    Ok(ExtremalityStatus { extreme, c_extreme })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn metric_checks() {
        assert!(DirectedDistance::all_one(names(&["s", "t", "u"])).is_metric());
        let d = DirectedDistance::from_int_rows(
            &["s", "t", "u"],
            &[&[0, 1, 3], &[0, 0, 1], &[0, 0, 0]],
        )
        .unwrap();
        assert!(!d.is_metric());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(DirectedDistance::from_int_rows(&["s", "t"], &[&[1, 0], &[0, 0]]).is_err());
        assert!(DirectedDistance::from_int_rows(&["s", "t"], &[&[0, -1], &[0, 0]]).is_err());
        assert!(DirectedDistance::from_int_rows(&["s", "s"], &[&[0, 0], &[0, 0]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = DirectedDistance::from_fn(names(&["a", "b"]), |i, _| frac(1 + i as i64, 3)).unwrap();
        assert_eq!(DirectedDistance::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn cut_distance_examples() {
        let g = names(&["s", "t", "u"]);
        let d = cut_distance(&PartialCut::new([0], [1, 2]).unwrap(), &g).unwrap();
        assert_eq!(d.support(), vec![(0, 1), (0, 2)]);
        assert!(cut_distance(&PartialCut::new([], [1]).unwrap(), &g).unwrap().is_zero());
        assert!(PartialCut::new([0], [0, 1]).is_err());
        let star = LaminarDecomposition {
            cuts: (0..3)
                .map(|x| PartialCut::new([x], (0..3).filter(|&y| y != x)).unwrap())
                .collect(),
            weights: vec![rat(1); 3],
        };
        star.validate(&DirectedDistance::all_one(g)).unwrap();
    }

    #[test]
    fn laminarity_cases() {
        let c = |a: &[usize], b: &[usize]| PartialCut::new(a.to_vec(), b.to_vec()).unwrap();
        assert!(c(&[0], &[1, 2]).laminar_with(&c(&[0, 1], &[2])));
        assert!(c(&[0], &[1]).laminar_with(&c(&[1], &[0])));
        assert!(!c(&[0], &[1]).laminar_with(&c(&[2], &[3])));
        assert!(!c(&[0], &[1, 2, 3]).laminar_with(&c(&[2], &[3])));
        assert!(c(&[0], &[1, 2, 3]).laminar_with(&c(&[0, 2], &[3])));
    }

    #[test]
    fn extremal_classes_examples() {
        let d = DirectedDistance::all_one(names(&["s", "t"]));
        assert_eq!(extremal_classes(&d).len(), 2);
        // u is glued to s
        let d = DirectedDistance::from_int_rows(
            &["s", "t", "u"],
            &[&[0, 1, 0], &[1, 0, 1], &[0, 1, 0]],
        )
        .unwrap();
        let classes = extremal_classes(&d);
        assert!(classes.iter().all(|c| c.from.len() + c.to.len() == 3));
        assert!(!classes.iter().any(|c| c.contains(0, 2)));
    }

    #[test]
    fn gamma_one() {
        let g = gamma_metric(1).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(*g.get(0, 1), rat(1));
        assert_eq!(*g.get(0, 2), rat(1));
        assert_eq!(*g.get(1, 2), rat(1));
        assert!(g.get(1, 0).is_zero() && g.get(2, 0).is_zero() && g.get(2, 1).is_zero());
        assert!(gamma_metric(0).is_err());
        assert_eq!(gamma_metric(3).unwrap().len(), 10);
    }

    #[test]
    fn gamma_two() {
        let g = gamma_metric(2).unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.is_metric());
        let half = frac(1, 2);
        for (a, b) in [("(0,0)", "(1,0)"), ("(1,0)", "(1,1)"), ("(1,0)", "(2,0)"), ("(2,1)", "(2,2)")] {
            assert_eq!(*g.value(a, b).unwrap(), half);
            assert!(g.value(b, a).unwrap().is_zero());
        }
        assert_eq!(*g.value("(0,0)", "(2,2)").unwrap(), rat(1));
        assert!(extremality_status(&g).unwrap().extreme);
    }

    #[test]
    fn extremality_examples() {
        let st = extremality_status(&gamma_metric(1).unwrap()).unwrap();
        assert!(st.extreme && st.c_extreme);
        let two = DirectedDistance::all_one(names(&["s", "t"]));
        assert!(!extremality_status(&two).unwrap().extreme);
        let cut = cut_distance(&PartialCut::new([0], [1]).unwrap(), &names(&["s", "t"])).unwrap();
        assert!(extremality_status(&cut).unwrap().extreme);
        assert!(extremality_status(&DirectedDistance::zeros(names(&["s"]))).is_err());
    }

    #[test]
    fn minimality_examples() {
        let mu = DirectedDistance::all_one(names(&["s", "t", "u"]));
        let st = minimality_status(&mu, &mu).unwrap();
        assert!(st.minimal && st.c_minimal);
        let two = DirectedDistance::all_one(names(&["s", "t"]));
        let raised = two.with_value(0, 1, rat(2)).unwrap();
        assert!(!minimality_status(&raised, &two).unwrap().minimal);
        let w = decrease_witness(&raised, &two).unwrap().unwrap();
        assert_eq!(w, two);
        assert!(minimality_status(&mu, &mu.scale(&rat(2)).unwrap()).is_err());
        // u sits with t on the far side of both cuts
        let g = names(&["s", "t", "u"]);
        let d = cut_distance(&PartialCut::new([0], [1, 2]).unwrap(), &g)
            .unwrap()
            .add(&cut_distance(&PartialCut::new([1, 2], [0]).unwrap(), &g).unwrap())
            .unwrap();
        assert!(d.is_metric());
        let st = minimality_status(&d, &d).unwrap();
        assert!(st.minimal && st.c_minimal);
    }

    fn table() -> DirectedDistance {
        DirectedDistance::from_int_rows(
            &["s", "t", "u", "v"],
            &[&[0, 1, 1, 0], &[1, 0, 1, 0], &[0, 0, 0, 0], &[1, 1, 1, 0]],
        )
        .unwrap()
    }

    #[test]
    fn extension_examples() {
        let mu = DirectedDistance::all_one(names(&["s", "t"]));
        let st = extension_status(&table(), &mu).unwrap();
        assert!(st.tight && !st.cyclically_tight);
        let same = extension_status(&mu, &mu).unwrap();
        assert!(same.tight && same.cyclically_tight);
        // raising d(u, v) breaks u -> s -> v, so raise d(u, s) instead
        let d = table();
        assert!(!d.with_value(2, 3, rat(1)).unwrap().is_metric());
        let raised = d.with_value(2, 0, rat(1)).unwrap();
        assert!(raised.is_metric());
        assert!(!extension_status(&raised, &mu).unwrap().tight);
        assert!(extension_status(&table(), &mu.scale(&rat(2)).unwrap()).is_err());
    }
}
