//! 2D bin configurations and the exact covering LP over them.
//!
//! A configuration is a validated layout of one unit bin into typed
//! containers. The covering LP chooses fractional multiplicities so that
//! big-item counts, vertical widths, horizontal depths and tiny area are
//! all covered; it is solved exactly with a two-phase tableau simplex under
//! Bland's rule, so the returned solution is a vertex with at most one
//! nonzero per constraint row.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{rint, Rat};

/// Rounded size families shared by items, containers and configurations.
#[derive(Debug, Clone, Default)]
pub struct TypeSpaces {
    /// Big item types as (width, depth).
    pub big: Vec<(Rat, Rat)>,
    /// Rounded widths of horizontal items.
    pub widths: Vec<Rat>,
    /// Rounded depths of vertical items.
    pub depths: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContainerKind {
    Big(usize),
    Horizontal(usize),
    Vertical(usize),
    Tiny,
}

/// A placed container inside the unit square.
#[derive(Debug, Clone)]
pub struct Container2D {
    pub kind: ContainerKind,
    pub x: Rat,
    pub y: Rat,
    pub w: Rat,
    pub d: Rat,
}

impl Container2D {
    fn overlaps(&self, other: &Container2D) -> bool {
        self.x < &other.x + &other.w
            && other.x < &self.x + &self.w
            && self.y < &other.y + &other.d
            && other.y < &self.y + &self.d
    }
}

/// A validated one-bin layout.
#[derive(Debug, Clone)]
pub struct Configuration2D {
    pub containers: Vec<Container2D>,
}

/// The integer count vector of a configuration: per big type the number of
/// containers, per horizontal width the total depth in units of `mu`, per
/// vertical depth the total width in units of `mu`, and the tiny area in
/// units of `mu^2`.
#[derive(Debug, Clone)]
pub struct ConfigVector {
    pub big_counts: Vec<u64>,
    pub horizontal_depth_units: Vec<u64>,
    pub vertical_width_units: Vec<u64>,
    pub tiny_area_units: u64,
}

impl Configuration2D {
    /// Checks the layout: containment in the unit square, pairwise
    /// disjointness, and the per-kind size discipline (big containers match
    /// their type exactly; horizontal depths, vertical widths and tiny
    /// sides are positive multiples of `mu`).
    pub fn validate(&self, spaces: &TypeSpaces, mu: &Rat) -> Result<()> {
        let one = rint(1);
        for c in &self.containers {
            if c.x.is_negative() || c.y.is_negative() || &c.x + &c.w > one || &c.y + &c.d > one {
                return Err(Error::Precondition("container outside the unit square".into()));
            }
            if !c.w.is_positive() || !c.d.is_positive() {
                return Err(Error::Precondition("container with non-positive extent".into()));
            }
            match &c.kind {
                ContainerKind::Big(t) => {
                    let (w, d) = spaces
                        .big
                        .get(*t)
                        .ok_or_else(|| Error::Precondition(format!("unknown big type {t}")))?;
                    if &c.w != w || &c.d != d {
                        return Err(Error::Precondition(
                            "big container size differs from its type".into(),
                        ));
                    }
                }
                ContainerKind::Horizontal(wi) => {
                    let w = spaces.widths.get(*wi).ok_or_else(|| {
                        Error::Precondition(format!("unknown horizontal width {wi}"))
                    })?;
                    if &c.w != w || !(&c.d / mu).is_integer() {
                        return Err(Error::Precondition(
                            "horizontal container needs its type width and a depth multiple of mu"
                                .into(),
                        ));
                    }
                }
                ContainerKind::Vertical(di) => {
                    let d = spaces.depths.get(*di).ok_or_else(|| {
                        Error::Precondition(format!("unknown vertical depth {di}"))
                    })?;
                    if &c.d != d || !(&c.w / mu).is_integer() {
                        return Err(Error::Precondition(
                            "vertical container needs its type depth and a width multiple of mu"
                                .into(),
                        ));
                    }
                }
                ContainerKind::Tiny => {
                    if !(&c.w / mu).is_integer() || !(&c.d / mu).is_integer() {
                        return Err(Error::Precondition(
                            "tiny container sides must be multiples of mu".into(),
                        ));
                    }
                }
            }
        }
        for (i, a) in self.containers.iter().enumerate() {
            for b in &self.containers[i + 1..] {
                if a.overlaps(b) {
                    return Err(Error::Precondition("containers overlap".into()));
                }
            }
        }
        Ok(())
    }

    pub fn vector(&self, spaces: &TypeSpaces, mu: &Rat) -> ConfigVector {
        let mut big_counts = vec![0u64; spaces.big.len()];
        let mut horizontal = vec![Rat::zero(); spaces.widths.len()];
        let mut vertical = vec![Rat::zero(); spaces.depths.len()];
        let mut tiny_area = Rat::zero();
        for c in &self.containers {
            match &c.kind {
                ContainerKind::Big(t) => big_counts[*t] += 1,
                ContainerKind::Horizontal(wi) => horizontal[*wi] += &c.d,
                ContainerKind::Vertical(di) => vertical[*di] += &c.w,
                ContainerKind::Tiny => tiny_area += &c.w * &c.d,
            }
        }
        let to_units = |v: &Rat, unit: &Rat| -> u64 {
            let q = v / unit;
            debug_assert!(q.is_integer());
            num_traits::ToPrimitive::to_u64(&q.to_integer()).expect("unit count fits u64")
        };
        ConfigVector {
            big_counts,
            horizontal_depth_units: horizontal.iter().map(|v| to_units(v, mu)).collect(),
            vertical_width_units: vertical.iter().map(|v| to_units(v, mu)).collect(),
            tiny_area_units: to_units(&tiny_area, &(mu * mu)),
        }
    }
}

/// Demand side of the covering LP.
#[derive(Debug, Clone, Default)]
pub struct Demands {
    /// Number of big 2D rects per type.
    pub big_counts: Vec<Rat>,
    /// Total width of vertical rects per rounded depth.
    pub vertical_widths: Vec<Rat>,
    /// Total depth of horizontal rects per rounded width.
    pub horizontal_depths: Vec<Rat>,
    /// Total area of tiny rects.
    pub tiny_area: Rat,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub multiplicities: Vec<Rat>,
    pub objective: Rat,
    /// Number of constraint rows in the LP, bounding the nonzero count.
    pub constraint_count: usize,
}

/// Solves `min sum x_C` over the given configurations subject to the
/// covering constraints; configurations must be validated by the caller.
pub fn config_lp_solve(
    configs: &[Configuration2D],
    spaces: &TypeSpaces,
    demands: &Demands,
    mu: &Rat,
) -> Result<LpOutcome> {
    if configs.is_empty() {
        return Err(Error::Precondition("empty configuration set".into()));
    }
    let vectors: Vec<ConfigVector> = configs.iter().map(|c| c.vector(spaces, mu)).collect();
    let n = configs.len();
    let mut rows: Vec<(Vec<Rat>, Cmp, Rat)> = Vec::new();
    for (t, demand) in demands.big_counts.iter().enumerate() {
        let coeffs: Vec<Rat> = vectors.iter().map(|v| rint(v.big_counts[t] as i64)).collect();
        rows.push((coeffs, Cmp::Ge, demand.clone()));
    }
    for (d, demand) in demands.vertical_widths.iter().enumerate() {
        let coeffs: Vec<Rat> = vectors
            .iter()
            .map(|v| rint(v.vertical_width_units[d] as i64) * mu)
            .collect();
        rows.push((coeffs, Cmp::Ge, demand.clone()));
    }
    for (w, demand) in demands.horizontal_depths.iter().enumerate() {
        let coeffs: Vec<Rat> = vectors
            .iter()
            .map(|v| rint(v.horizontal_depth_units[w] as i64) * mu)
            .collect();
        rows.push((coeffs, Cmp::Ge, demand.clone()));
    }
    let mu2 = mu * mu;
    let coeffs: Vec<Rat> = vectors
        .iter()
        .map(|v| rint(v.tiny_area_units as i64) * &mu2)
        .collect();
    rows.push((coeffs, Cmp::Ge, demands.tiny_area.clone()));

    let constraint_count = rows.len();
    let problem = LpProblem { objective: vec![rint(1); n], rows };
    match simplex_solve(&problem)? {
        Some(solution) => Ok(LpOutcome {
            multiplicities: solution.x,
            objective: solution.objective,
            constraint_count,
        }),
        None => Err(Error::Infeasible(
            "configuration set cannot cover the demands".into(),
        )),
    }
}

/// Row comparison of an LP constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// `min c^T x` subject to the rows and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<Rat>,
    pub rows: Vec<(Vec<Rat>, Cmp, Rat)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<Rat>,
    pub objective: Rat,
}

/// Exact two-phase primal simplex with Bland's rule. Returns `None` when
/// the problem is infeasible; errors on unbounded problems.
pub fn simplex_solve(problem: &LpProblem) -> Result<Option<LpSolution>> {
    let n = problem.objective.len();
    let m = problem.rows.len();

    // Normalize to b >= 0 and count auxiliary columns.
    let mut rows: Vec<(Vec<Rat>, Cmp, Rat)> = Vec::with_capacity(m);
    for (coeffs, cmp, b) in &problem.rows {
        if coeffs.len() != n {
            return Err(Error::Precondition("row length mismatch".into()));
        }
        if b.is_negative() {
            let flipped: Vec<Rat> = coeffs.iter().map(|c| -c.clone()).collect();
            let cmp = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
            rows.push((flipped, cmp, -b.clone()));
        } else {
            rows.push((coeffs.clone(), *cmp, b.clone()));
        }
    }

    let slack_count = rows.iter().filter(|(_, c, _)| *c != Cmp::Eq).count();
    let artificial_count = rows.iter().filter(|(_, c, _)| *c != Cmp::Le).count();
    let total = n + slack_count + artificial_count;

    // tableau[r] = coefficients row + rhs in the last position.
    let mut tableau: Vec<Vec<Rat>> = vec![vec![Rat::zero(); total + 1]; m];
    let mut basis: Vec<usize> = vec![0; m];
    let mut slack_idx = n;
    let mut art_idx = n + slack_count;
    let mut artificial_cols: Vec<usize> = Vec::new();
    for (r, (coeffs, cmp, b)) in rows.iter().enumerate() {
        for (j, c) in coeffs.iter().enumerate() {
            tableau[r][j] = c.clone();
        }
        tableau[r][total] = b.clone();
        match cmp {
            Cmp::Le => {
                tableau[r][slack_idx] = rint(1);
                basis[r] = slack_idx;
                slack_idx += 1;
            }
            Cmp::Ge => {
                tableau[r][slack_idx] = rint(-1);
                slack_idx += 1;
                tableau[r][art_idx] = rint(1);
                basis[r] = art_idx;
                artificial_cols.push(art_idx);
                art_idx += 1;
            }
            Cmp::Eq => {
                tableau[r][art_idx] = rint(1);
                basis[r] = art_idx;
                artificial_cols.push(art_idx);
                art_idx += 1;
            }
        }
    }

    // Phase 1: minimize the sum of artificials.
    if !artificial_cols.is_empty() {
        let mut cost = vec![Rat::zero(); total + 1];
        for &col in &artificial_cols {
            cost[col] = rint(1);
        }
        reduce_cost_row(&mut cost, &tableau, &basis);
        run_simplex(&mut tableau, &mut basis, &mut cost, total)?;
        let phase1_value = -cost[total].clone();
        if !phase1_value.is_zero() {
            return Ok(None);
        }
        // Pivot artificials out of the basis where possible; a row with no
        // eligible pivot is redundant and stays with a zero artificial.
        for r in 0..m {
            if artificial_cols.contains(&basis[r]) {
                if let Some(col) = (0..n + slack_count).find(|&j| !tableau[r][j].is_zero()) {
                    pivot(&mut tableau, &mut basis, r, col, total);
                }
            }
        }
    }

    // Phase 2: original objective; artificial columns are frozen by giving
    // them a prohibitive reduced cost guard (they are zero and never enter
    // because Bland only picks negative reduced costs and we strip them).
    for row in tableau.iter_mut() {
        for &col in &artificial_cols {
            row[col] = Rat::zero();
        }
    }
    let mut cost = vec![Rat::zero(); total + 1];
    for (j, c) in problem.objective.iter().enumerate() {
        cost[j] = c.clone();
    }
    reduce_cost_row(&mut cost, &tableau, &basis);
    run_simplex(&mut tableau, &mut basis, &mut cost, total)?;

    let mut x = vec![Rat::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tableau[r][total].clone();
        }
    }
    let objective: Rat = problem
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum();
    Ok(Some(LpSolution { x, objective }))
}

/// Makes the cost row consistent with the current basis (zero reduced cost
/// on basic columns).
fn reduce_cost_row(cost: &mut [Rat], tableau: &[Vec<Rat>], basis: &[usize]) {
    for (r, &b) in basis.iter().enumerate() {
        if !cost[b].is_zero() {
            let factor = cost[b].clone();
            for j in 0..cost.len() {
                let delta = &factor * &tableau[r][j];
                cost[j] -= delta;
            }
        }
    }
}

fn run_simplex(
    tableau: &mut [Vec<Rat>],
    basis: &mut [usize],
    cost: &mut [Rat],
    total: usize,
) -> Result<()> {
    loop {
        // Bland: entering column = lowest index with negative reduced cost.
        let entering = (0..total).find(|&j| cost[j].is_negative());
        let Some(col) = entering else { return Ok(()) };
        // Leaving row: minimum ratio, ties by lowest basis index.
        let mut leave: Option<(usize, Rat)> = None;
        for (r, row) in tableau.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[total] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Infeasible("LP is unbounded".into()));
        };
        pivot_with_cost(tableau, basis, cost, row, col, total);
    }
}

fn pivot(tableau: &mut [Vec<Rat>], basis: &mut [usize], row: usize, col: usize, total: usize) {
    let factor = tableau[row][col].clone();
    for cell in tableau[row].iter_mut().take(total + 1) {
        *cell = &*cell / &factor;
    }
    let pivot_row = tableau[row].clone();
    for (r, other) in tableau.iter_mut().enumerate() {
        if r != row && !other[col].is_zero() {
            let f = other[col].clone();
            for (cell, p) in other.iter_mut().zip(&pivot_row).take(total + 1) {
                let delta = &f * p;
                *cell -= delta;
            }
        }
    }
    basis[row] = col;
}

fn pivot_with_cost(
    tableau: &mut [Vec<Rat>],
    basis: &mut [usize],
    cost: &mut [Rat],
    row: usize,
    col: usize,
    total: usize,
) {
    pivot(tableau, basis, row, col, total);
    if !cost[col].is_zero() {
        let f = cost[col].clone();
        for j in 0..=total {
            let delta = &f * &tableau[row][j];
            cost[j] -= delta;
        }
    }
}
