//! Exact two-phase simplex over rationals with Bland's anti-cycling rule.
//!
//! Solves `max c·x` subject to linear constraints and `x ≥ 0`.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Scalar>,
    pub relation: Relation,
    pub rhs: Scalar,
}

impl Constraint {
    pub fn new(coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Scalar>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Scalar, point: Vec<Scalar> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![Scalar::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn maximize(&self) -> LpOutcome {
        Tableau::build(self).solve(&self.objective, self.num_vars)
    }
}

struct Tableau {
    rows: Vec<Vec<Scalar>>,
    basis: Vec<usize>,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
    width: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars;
        let mut normalized: Vec<(Vec<Scalar>, Relation, Scalar)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|x| -x).collect(), flipped, -&c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let slack_count = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
        let artificial_count = normalized.iter().filter(|c| c.1 != Relation::Le).count();
        let first_artificial = n + slack_count;
        let width = first_artificial + artificial_count;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut slack, mut artificial) = (n, first_artificial);
        for (coeffs, relation, rhs) in normalized.drain(..) {
            let mut row = coeffs;
            row.resize(width + 1, Scalar::zero());
            row[width] = rhs;
            match relation {
                Relation::Le => {
                    row[slack] = Scalar::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = Scalar::from_int(-1);
                    slack += 1;
                    row[artificial] = Scalar::one();
                    basis.push(artificial);
                    artificial += 1;
                }
                Relation::Eq => {
                    row[artificial] = Scalar::one();
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, first_artificial, width }
    }

    /// Reduced-cost row `z_j − c_j` for maximizing `cost` over the current basis.
    fn objective_row(&self, cost: &[Scalar]) -> Vec<Scalar> {
        let mut z: Vec<Scalar> = (0..=self.width).map(|j| if j < cost.len() { -&cost[j] } else { Scalar::zero() }).collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost.get(b).cloned().unwrap_or_else(Scalar::zero);
            if !cb.is_zero() {
                for (zj, rj) in z.iter_mut().zip(row) {
                    *zj += &cb * rj;
                }
            }
        }
        z
    }

    fn pivot(&mut self, z: &mut [Scalar], r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |target: &mut [Scalar]| {
            let factor = target[c].clone();
            if factor.is_zero() {
                return;
            }
            for (t, p) in target.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(z);
        self.basis[r] = c;
    }

    /// Primal simplex with Bland's rule over columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, z: &mut [Scalar], limit: usize) -> bool {
        loop {
            let Some(c) = (0..limit).find(|&j| z[j].is_negative()) else { return true };
            let mut best: Option<(Scalar, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.width] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else { return false };
            self.pivot(z, r, c);
        }
    }

    fn solve(mut self, cost: &[Scalar], n: usize) -> LpOutcome {
        if self.first_artificial < self.width {
            let phase_one: Vec<Scalar> =
                (0..self.width).map(|j| if j >= self.first_artificial { Scalar::from_int(-1) } else { Scalar::zero() }).collect();
            let mut z = self.objective_row(&phase_one);
            self.optimize(&mut z, self.width);
            if z[self.width].is_negative() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-valued artificials out of the basis, dropping redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                        Some(c) => self.pivot(&mut z, r, c),
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }
        let mut z = self.objective_row(cost);
        if !self.optimize(&mut z, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![Scalar::zero(); n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < n {
                point[b] = row[self.width].clone();
            }
        }
        LpOutcome::Optimal { value: z[self.width].clone(), point }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn row(vs: &[i64]) -> Vec<Scalar> {
        vs.iter().map(|&v| s(v)).collect()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.objective = row(&[3, 5]);
        lp.push(row(&[1, 0]), Relation::Le, s(4));
        lp.push(row(&[0, 2]), Relation::Le, s(12));
        lp.push(row(&[3, 2]), Relation::Le, s(18));
        assert_eq!(lp.maximize(), LpOutcome::Optimal { value: s(36), point: row(&[2, 6]) });
    }

    #[test]
    fn equality_and_fractions() {
        // max x + y, x + 3y = 2, x ≤ 1/2 → x = 1/2, y = 1/2
        let mut lp = LinearProgram::new(2);
        lp.objective = row(&[1, 1]);
        lp.push(row(&[1, 3]), Relation::Eq, s(2));
        lp.push(row(&[1, 0]), Relation::Le, Scalar::new(1, 2));
        assert_eq!(
            lp.maximize(),
            LpOutcome::Optimal { value: s(1), point: vec![Scalar::new(1, 2), Scalar::new(1, 2)] }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.objective = row(&[1]);
        lp.push(row(&[1]), Relation::Ge, s(3));
        lp.push(row(&[1]), Relation::Le, s(2));
        assert_eq!(lp.maximize(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.objective = row(&[1, 0]);
        lp.push(row(&[1, -1]), Relation::Le, s(1));
        assert_eq!(lp.maximize(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // -x ≤ -1 (x ≥ 1), x + y = 3 twice, max -x → x = 1
        let mut lp = LinearProgram::new(2);
        lp.objective = row(&[-1, 0]);
        lp.push(row(&[-1, 0]), Relation::Le, s(-1));
        lp.push(row(&[1, 1]), Relation::Eq, s(3));
        lp.push(row(&[2, 2]), Relation::Eq, s(6));
        assert_eq!(lp.maximize(), LpOutcome::Optimal { value: s(-1), point: row(&[1, 2]) });
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let q = |p, r| Scalar::new(p, r);
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![q(3, 4), s(-150), q(1, 50), s(-6)];
        lp.push(vec![q(1, 4), s(-60), q(-1, 25), s(9)], Relation::Le, s(0));
        lp.push(vec![q(1, 2), s(-90), q(-1, 50), s(3)], Relation::Le, s(0));
        lp.push(vec![s(0), s(0), s(1), s(0)], Relation::Le, s(1));
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 20)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
