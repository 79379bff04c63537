//! Exact rational simplex kernel.
//!
//! Dense tableau over `BigRational`. The primal method is two-phase with a
//! choice of pivot rule; when the slack basis is already dual feasible the
//! dual simplex is used instead, which is much faster for covering problems.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest-index rule; never cycles.
    #[default]
    Bland,
    /// Most negative reduced cost, falling back to Bland after a run of
    /// degenerate pivots.
    Dantzig,
    /// Largest-index eligible column; reaches different vertices on
    /// degenerate problems. Falls back to Bland like `Dantzig`.
    Reverse,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Maximize `objective · x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub pivot_rule: PivotRule,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            pivot_rule: PivotRule::Bland,
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> LpOutcome {
        if self.objective.iter().all(|c| !c.is_positive())
            && self.constraints.iter().all(|c| c.relation != Relation::Eq)
        {
            return self.solve_dual();
        }
        self.solve_primal()
    }

    /// Two-phase primal simplex, regardless of the shape of the problem.
    pub fn solve_primal(&self) -> LpOutcome {
        let n = self.num_vars;
        let m = self.constraints.len();
        let mut slack_cols = 0;
        let mut art_cols = 0;
        for c in &self.constraints {
            let flip = c.rhs.is_negative();
            match (c.relation, flip) {
                (Relation::Le, false) => slack_cols += 1,
                (Relation::Ge, true) => slack_cols += 1,
                (Relation::Eq, _) => art_cols += 1,
                _ => {
                    slack_cols += 1;
                    art_cols += 1;
                }
            }
        }
        let width = n + slack_cols + art_cols;
        let mut t = Tableau::new(m, width);
        let mut next_slack = n;
        let mut next_art = n + slack_cols;
        for (i, c) in self.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let sign = if flip { -Rational::one() } else { Rational::one() };
            for (j, a) in &c.coeffs {
                let v = &t.rows[i][*j] + a * &sign;
                t.rows[i][*j] = v;
            }
            t.rows[i][width] = &c.rhs * &sign;
            let rel = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match rel {
                Relation::Le => {
                    t.rows[i][next_slack] = Rational::one();
                    t.basis[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    t.rows[i][next_slack] = -Rational::one();
                    next_slack += 1;
                    t.rows[i][next_art] = Rational::one();
                    t.basis[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    t.rows[i][next_art] = Rational::one();
                    t.basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        let art_start = n + slack_cols;
        if art_cols > 0 {
            // phase 1: maximize -(sum of artificials)
            let mut obj = vec![Rational::zero(); width + 1];
            for i in 0..m {
                if t.basis[i] >= art_start {
                    for j in 0..=width {
                        if (j < art_start || j == width)
                            && !t.rows[i][j].is_zero() {
                                obj[j] -= &t.rows[i][j];
                            }
                    }
                }
            }
            t.obj = obj;
            match t.primal(self.pivot_rule, width) {
                Ok(()) => {}
                Err(_) => unreachable!("phase one is bounded"),
            }
            if t.obj[width].is_negative() {
                return LpOutcome::Infeasible;
            }
            // drive remaining artificials out of the basis
            let mut i = 0;
            while i < t.rows.len() {
                if t.basis[i] >= art_start {
                    let col = (0..art_start).find(|&j| !t.rows[i][j].is_zero());
                    match col {
                        Some(j) => {
                            t.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            t.rows.remove(i);
                            t.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
            for row in t.rows.iter_mut() {
                let rhs = row[width].clone();
                row.truncate(art_start);
                row.push(rhs);
            }
        }
        let width = art_start;
        t.width = width;
        t.price_out(&self.objective);
        match t.primal(self.pivot_rule, width) {
            Ok(()) => LpOutcome::Optimal(t.solution(n)),
            Err(()) => LpOutcome::Unbounded,
        }
    }

    fn solve_dual(&self) -> LpOutcome {
        let n = self.num_vars;
        let m = self.constraints.len();
        let width = n + m;
        let mut t = Tableau::new(m, width);
        for (i, c) in self.constraints.iter().enumerate() {
            let sign = if c.relation == Relation::Ge {
                -Rational::one()
            } else {
                Rational::one()
            };
            for (j, a) in &c.coeffs {
                let v = &t.rows[i][*j] + a * &sign;
                t.rows[i][*j] = v;
            }
            t.rows[i][n + i] = Rational::one();
            t.rows[i][width] = &c.rhs * &sign;
            t.basis[i] = n + i;
        }
        t.price_out(&self.objective);
        if !t.dual() {
            return LpOutcome::Infeasible;
        }
        match t.primal(self.pivot_rule, width) {
            Ok(()) => LpOutcome::Optimal(t.solution(n)),
            Err(()) => LpOutcome::Unbounded,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn new(m: usize, width: usize) -> Self {
        Tableau {
            rows: vec![vec![Rational::zero(); width + 1]; m],
            obj: vec![Rational::zero(); width + 1],
            basis: vec![usize::MAX; m],
            width,
        }
    }

    fn price_out(&mut self, objective: &[Rational]) {
        let width = self.width;
        let mut obj = vec![Rational::zero(); width + 1];
        for (j, c) in objective.iter().enumerate() {
            obj[j] = -c.clone();
        }
        for (i, &b) in self.basis.iter().enumerate() {
            if b < objective.len() && !objective[b].is_zero() {
                let cb = &objective[b];
                for j in 0..=width {
                    if !self.rows[i][j].is_zero() {
                        obj[j] += cb * &self.rows[i][j];
                    }
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.rows[r].len() - 1;
        let inv = Rational::one() / &self.rows[r][c];
        let nz: Vec<usize> = (0..=width).filter(|&j| !self.rows[r][j].is_zero()).collect();
        for &j in &nz {
            let v = &self.rows[r][j] * &inv;
            self.rows[r][j] = v;
        }
        let prow = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let v = &row[j] - &f * &prow[j];
                row[j] = v;
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                let v = &self.obj[j] - &f * &prow[j];
                self.obj[j] = v;
            }
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    /// Primal simplex over columns `0..limit`. `Err` on unboundedness.
    fn primal(&mut self, rule: PivotRule, limit: usize) -> Result<(), ()> {
        let rhs = self.rows.first().map_or(0, |r| r.len() - 1);
        let mut degenerate_run = 0usize;
        loop {
            let use_bland = rule == PivotRule::Bland || degenerate_run > 50;
            let entering = if use_bland {
                (0..limit).find(|&j| self.obj[j].is_negative())
            } else if rule == PivotRule::Reverse {
                (0..limit).rev().find(|&j| self.obj[j].is_negative())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..limit {
                    if self.obj[j].is_negative()
                        && best.is_none_or(|b| self.obj[j] < self.obj[b])
                    {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(());
            };
            if ratio.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }

    /// Dual simplex from a dual-feasible basis. `false` if primal infeasible.
    fn dual(&mut self) -> bool {
        let width = self.width;
        loop {
            let mut leave: Option<usize> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[width].is_negative()
                    && leave.is_none_or(|l| self.basis[i] < self.basis[l])
                {
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return true;
            };
            let mut enter: Option<(usize, Rational)> = None;
            for j in 0..width {
                let a = &self.rows[r][j];
                if a.is_negative() {
                    let ratio = &self.obj[j] / -a;
                    if enter.as_ref().is_none_or(|(_, best)| ratio < *best) {
                        enter = Some((j, ratio));
                    }
                }
            }
            let Some((c, _)) = enter else {
                return false;
            };
            self.pivot(r, c);
        }
    }

    fn solution(&self, n: usize) -> LpSolution {
        let mut x = vec![Rational::zero(); n];
        let rhs = self.width;
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rows[i][rhs].clone();
            }
        }
        LpSolution {
            value: self.obj[rhs].clone(),
            x,
        }
    }
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = Rational::one() / &m[rank][c];
        let prow: Vec<Rational> = m[rank].iter().map(|v| v * &inv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for j in c..cols {
                    if !prow[j].is_zero() {
                        let v = &row[j] - &f * &prow[j];
                        row[j] = v;
                    }
                }
            }
        }
        m[rank] = prow;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};

    fn value(lp: &LinearProgram) -> Rational {
        lp.solve().optimal().expect("optimal").value
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![rat(3), rat(5)];
        lp.add(vec![(0, rat(1))], Relation::Le, rat(4));
        lp.add(vec![(1, rat(2))], Relation::Le, rat(12));
        lp.add(vec![(0, rat(3)), (1, rat(2))], Relation::Le, rat(18));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.value, rat(36));
        assert_eq!(s.x, vec![rat(2), rat(6)]);
    }

    #[test]
    fn covering_uses_dual_path() {
        // min x + y s.t. x + 2y >= 3, 2x + y >= 3 -> 2 at (1, 1)
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![rat(-1), rat(-1)];
        lp.add(vec![(0, rat(1)), (1, rat(2))], Relation::Ge, rat(3));
        lp.add(vec![(0, rat(2)), (1, rat(1))], Relation::Ge, rat(3));
        assert_eq!(value(&lp), rat(-2));
        assert_eq!(lp.solve_primal().optimal().unwrap().value, rat(-2));
    }

    #[test]
    fn equality_and_fractions() {
        // max x s.t. 3x + 3y = 1 -> 1/3
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![rat(1), rat(0)];
        lp.add(vec![(0, rat(3)), (1, rat(3))], Relation::Eq, rat(1));
        assert_eq!(value(&lp), frac(1, 3));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![(0, rat(1))], Relation::Le, rat(1));
        lp.add(vec![(0, rat(1))], Relation::Ge, rat(2));
        assert!(matches!(lp.solve(), LpOutcome::Infeasible));
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![rat(1)];
        assert!(matches!(lp.solve(), LpOutcome::Unbounded));
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![rat(-1)];
        lp.add(vec![(0, rat(1))], Relation::Le, rat(-1));
        assert!(matches!(lp.solve(), LpOutcome::Infeasible));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![rat(1), rat(2)];
        lp.add(vec![(0, rat(1)), (1, rat(1))], Relation::Eq, rat(1));
        lp.add(vec![(0, rat(2)), (1, rat(2))], Relation::Eq, rat(2));
        assert_eq!(value(&lp), rat(2));
    }

    #[test]
    fn pivot_rules_agree_on_value() {
        for rule in [PivotRule::Bland, PivotRule::Dantzig, PivotRule::Reverse] {
            let mut lp = LinearProgram::new(3);
            lp.pivot_rule = rule;
            lp.objective = vec![rat(2), rat(3), rat(1)];
            lp.add(vec![(0, rat(1)), (1, rat(1)), (2, rat(1))], Relation::Le, rat(4));
            lp.add(vec![(0, rat(1)), (1, rat(3))], Relation::Le, rat(6));
            lp.add(vec![(2, rat(1))], Relation::Ge, rat(1));
            assert_eq!(value(&lp), frac(17, 2));
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = vec![
            vec![rat(1), rat(2), rat(3)],
            vec![rat(2), rat(4), rat(6)],
            vec![rat(0), rat(1), rat(1)],
        ];
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&[]), 0);
    }
}
