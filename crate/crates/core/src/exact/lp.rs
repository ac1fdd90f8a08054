//! Exact linear programming over the rationals.
//!
//! Dense two-phase simplex with Bland's rule. Strict inequalities are handled
//! by maximising a common slack `eps` and asking for `eps > 0`.

use num_traits::{One, Signed, Zero};

use super::Rational;

/// Affine form `coeffs . x + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Self { coeffs, constant }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).fold(self.constant.clone(), |acc, (c, v)| acc + c * v)
    }

    pub fn negated(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect(), constant: -&self.constant }
    }
}

/// Relation of a form to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `form >= 0`
    Ge,
    /// `form > 0`
    Gt,
    /// `form = 0`
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub form: LinearForm,
    pub relation: Relation,
}

/// Conjunction of constraints over `Q^dim`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InequalitySystem {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
}

impl InequalitySystem {
    pub fn new(dim: usize) -> Self {
        Self { dim, constraints: Vec::new() }
    }

    pub fn push(&mut self, form: LinearForm, relation: Relation) {
        assert_eq!(form.coeffs.len(), self.dim, "constraint dimension");
        self.constraints.push(Constraint { form, relation });
    }

    /// `form >= 0`
    pub fn ge(&mut self, form: LinearForm) {
        self.push(form, Relation::Ge);
    }

    /// `form > 0`
    pub fn gt(&mut self, form: LinearForm) {
        self.push(form, Relation::Gt);
    }

    /// `form <= 0`
    pub fn le(&mut self, form: LinearForm) {
        self.push(form.negated(), Relation::Ge);
    }

    /// `form < 0`
    pub fn lt(&mut self, form: LinearForm) {
        self.push(form.negated(), Relation::Gt);
    }

    pub fn equal(&mut self, form: LinearForm) {
        self.push(form, Relation::Eq);
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.constraints.iter().all(|c| {
            let v = c.form.eval(x);
            match c.relation {
                Relation::Ge => !v.is_negative(),
                Relation::Gt => v.is_positive(),
                Relation::Eq => v.is_zero(),
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

/// Decides a mixed system of `>=`, `>` and `=` constraints and returns an exact
/// witness satisfying every constraint when one exists.
pub fn solve_mixed_inequalities(sys: &InequalitySystem) -> Feasibility {
    let d = sys.dim;
    // Variables bounded below by an explicit `x_j >= 0` need no negative part.
    let is_sign_row = |c: &Constraint| {
        c.relation == Relation::Ge
            && c.form.constant.is_zero()
            && c.form.coeffs.iter().filter(|x| !x.is_zero()).count() == 1
            && c.form.coeffs.iter().all(|x| x.is_zero() || x.is_one())
    };
    let mut nonneg = vec![false; d];
    for c in &sys.constraints {
        if is_sign_row(c) {
            let j = c.form.coeffs.iter().position(|x| x.is_one()).expect("one nonzero coefficient");
            nonneg[j] = true;
        }
    }
    let rows: Vec<&Constraint> = sys.constraints.iter().filter(|c| !is_sign_row(c)).collect();
    // Columns: positive parts (d), negative parts of free variables, eps (1 if
    // strict), slacks (one per inequality).
    let mut neg_col = vec![usize::MAX; d];
    let mut next = d;
    for j in 0..d {
        if !nonneg[j] {
            neg_col[j] = next;
            next += 1;
        }
    }
    let has_strict = rows.iter().any(|c| c.relation == Relation::Gt);
    let n_ineq = rows.iter().filter(|c| c.relation != Relation::Eq).count();
    let eps_col = next;
    let first_slack = next + usize::from(has_strict);
    let n_vars = first_slack + n_ineq + usize::from(has_strict);
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    let mut slack = first_slack;
    for c in &rows {
        let mut row = vec![Rational::zero(); n_vars];
        for (j, coef) in c.form.coeffs.iter().enumerate() {
            row[j] = coef.clone();
            if neg_col[j] != usize::MAX {
                row[neg_col[j]] = -coef;
            }
        }
        match c.relation {
            Relation::Eq => {}
            Relation::Ge => {
                row[slack] = -Rational::one();
                slack += 1;
            }
            Relation::Gt => {
                row[eps_col] = -Rational::one();
                row[slack] = -Rational::one();
                slack += 1;
            }
        }
        a.push(row);
        b.push(-&c.form.constant);
    }
    let mut objective = vec![Rational::zero(); n_vars];
    if has_strict {
        // eps + s = 1 keeps the problem bounded.
        let mut row = vec![Rational::zero(); n_vars];
        row[eps_col] = Rational::one();
        row[slack] = Rational::one();
        a.push(row);
        b.push(Rational::one());
        objective[eps_col] = Rational::one();
    }
    if a.is_empty() {
        return Feasibility::Feasible(vec![Rational::zero(); d]);
    }
    match maximize_standard(&a, &b, &objective) {
        LpOutcome::Infeasible => Feasibility::Infeasible,
        LpOutcome::Unbounded => unreachable!("eps is bounded by 1"),
        LpOutcome::Optimal { x, value } => {
            if has_strict && !value.is_positive() {
                return Feasibility::Infeasible;
            }
            let witness: Vec<Rational> =
                (0..d).map(|j| if neg_col[j] == usize::MAX { x[j].clone() } else { &x[j] - &x[neg_col[j]] }).collect();
            debug_assert!(sys.is_satisfied_by(&witness));
            Feasibility::Feasible(witness)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rational>, value: Rational },
}

/// Maximises `c . y` subject to `A y = b`, `y >= 0`.
pub fn maximize_standard(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // Phase 1 tableau: columns 0..n real, n..n+m artificial, last column rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[j] = if flip { -&a[i][j] } else { a[i][j].clone() };
        }
        row[n + i] = Rational::one();
        row[width - 1] = if flip { -&b[i] } else { b[i].clone() };
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut phase1 = vec![Rational::zero(); n + m];
    for cost in phase1.iter_mut().skip(n) {
        *cost = -Rational::one();
    }
    let allowed: Vec<bool> = (0..n + m).map(|_| true).collect();
    run_simplex(&mut t, &mut basis, &phase1, &allowed);
    let infeasibility: Rational = basis
        .iter()
        .zip(&t)
        .filter(|(&bv, _)| bv >= n)
        .map(|(_, row)| row[width - 1].clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            match (0..n).find(|&j| !t[i][j].is_zero()) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut allowed = vec![true; n + m];
    for flag in allowed.iter_mut().skip(n) {
        *flag = false;
    }
    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    if !run_simplex(&mut t, &mut basis, &cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &bv) in t.iter().zip(&basis) {
        if bv < n {
            x[bv] = row[width - 1].clone();
        }
    }
    let value = x.iter().zip(c).map(|(v, k)| v * k).sum();
    LpOutcome::Optimal { x, value }
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c].clone();
    for x in t[r].iter_mut() {
        *x /= &p;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *x -= pv * &f;
            }
        }
    }
    basis[r] = c;
}

/// Runs primal simplex iterations (Bland's rule). Returns false if unbounded.
fn run_simplex(t: &mut [Vec<Rational>], basis: &mut [usize], cost: &[Rational], allowed: &[bool]) -> bool {
    let width = t.first().map_or(0, |r| r.len());
    let rhs = width.saturating_sub(1);
    loop {
        // Reduced costs: c_j - c_B B^-1 A_j.
        let entering = (0..cost.len()).filter(|&j| allowed[j] && !basis.contains(&j)).find(|&j| {
            let mut rc = cost[j].clone();
            for (row, &bv) in t.iter().zip(basis.iter()) {
                if !row[j].is_zero() && !cost[bv].is_zero() {
                    rc -= &cost[bv] * &row[j];
                }
            }
            rc.is_positive()
        });
        let Some(j) = entering else { return true };
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[j].is_positive() {
                let ratio = &row[rhs] / &row[j];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = best else { return false };
        pivot(t, basis, r, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn form(c: &[Rational], k: Rational) -> LinearForm {
        LinearForm::new(c.to_vec(), k)
    }

    #[test]
    fn one_dimensional_examples() {
        // x >= 0, x > 1/2, x < 1
        let mut s = InequalitySystem::new(1);
        s.ge(form(&[int(1)], int(0)));
        s.gt(form(&[int(1)], rat(-1, 2)));
        s.lt(form(&[int(1)], int(-1)));
        let f = solve_mixed_inequalities(&s);
        let w = f.witness().expect("feasible");
        assert!(w[0] > rat(1, 2) && w[0] < int(1));

        // x >= 1, x < 1
        let mut s = InequalitySystem::new(1);
        s.ge(form(&[int(1)], int(-1)));
        s.lt(form(&[int(1)], int(-1)));
        assert_eq!(solve_mixed_inequalities(&s), Feasibility::Infeasible);
    }

    #[test]
    fn equalities_and_unbounded_directions() {
        // x + y = 1, x - y > 3 has a solution (e.g. x = 2.5, y = -1.5).
        let mut s = InequalitySystem::new(2);
        s.equal(form(&[int(1), int(1)], int(-1)));
        s.gt(form(&[int(1), int(-1)], int(-3)));
        assert!(s.is_satisfied_by(solve_mixed_inequalities(&s).witness().unwrap()));
        // x >= 0 with no other constraint.
        let mut s = InequalitySystem::new(1);
        s.ge(form(&[int(1)], int(0)));
        assert!(solve_mixed_inequalities(&s).is_feasible());
    }

    #[test]
    fn maximize_small_program() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
        let a = vec![vec![int(1), int(2), int(1), int(0)], vec![int(3), int(1), int(0), int(1)]];
        let b = vec![int(4), int(6)];
        let c = vec![int(1), int(1), int(0), int(0)];
        match maximize_standard(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(14, 5)),
            other => panic!("{other:?}"),
        }
    }
}
