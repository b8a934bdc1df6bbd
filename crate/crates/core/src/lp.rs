//! Minimum-cost fractional set cover.
//!
//! The primal `min Σ αᵢ·cost(Tᵢ)` s.t. every element of `S` is covered with
//! total weight ≥ 1 has as many variables as there are candidates, but its
//! dual
//!
//! ```text
//! max Σ_{j∈S} y_j   s.t.  Σ_{j∈Tᵢ∩S} y_j ≤ cost(Tᵢ),  y ≥ 0
//! ```
//!
//! has only `|S| ≤ 16` variables. We run a dense simplex on the dual in
//! exchange (Tucker) form, so a pivot costs `O(|candidates|·|S|)`, with
//! Bland's rule against cycling. The primal weights are the shadow prices of
//! the slack rows in the final dictionary.

use crate::error::{Error, Result};
use crate::setfn::SubsetId;

const PIVOT_EPS: f64 = 1e-9;
/// Costs in `[-NEG_COST_TOL, 0)` are treated as zero rather than unbounded.
const NEG_COST_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CoverInstance {
    pub elements: SubsetId,
    pub candidates: Vec<(SubsetId, f64)>,
}

impl CoverInstance {
    pub fn new(elements: SubsetId, candidates: Vec<(SubsetId, f64)>) -> Self {
        Self { elements, candidates }
    }
}

#[derive(Clone, Debug)]
pub struct CoverSolution {
    pub objective: f64,
    /// `(candidate index, αᵢ)` for every candidate with positive weight.
    pub weights: Vec<(usize, f64)>,
    /// Optimal dual, one entry per element of `S` in increasing order.
    pub dual: Vec<f64>,
}

impl CoverSolution {
    /// Coverage `Σ_{i: j∈Tᵢ} αᵢ` of each element of `S`.
    pub fn coverage(&self, instance: &CoverInstance) -> Vec<f64> {
        instance
            .elements
            .elements()
            .map(|j| {
                self.weights
                    .iter()
                    .filter(|(i, _)| instance.candidates[*i].0.contains(j))
                    .map(|(_, a)| a)
                    .sum()
            })
            .collect()
    }
}

pub fn min_fractional_cover(instance: &CoverInstance) -> Result<CoverSolution> {
    let elems: Vec<usize> = instance.elements.elements().collect();
    if elems.is_empty() {
        return Ok(CoverSolution {
            objective: 0.0,
            weights: Vec::new(),
            dual: Vec::new(),
        });
    }
    let mut costs = Vec::with_capacity(instance.candidates.len());
    for &(_, c) in &instance.candidates {
        if !c.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite cover cost {c}")));
        }
        if c < -NEG_COST_TOL {
            return Err(Error::Unbounded);
        }
        costs.push(c.max(0.0));
    }
    for &j in &elems {
        if !instance.candidates.iter().any(|(t, _)| t.contains(j)) {
            return Err(Error::Infeasible(j));
        }
    }

    let k = elems.len();
    let m = costs.len();
    // Variables 0..k are the duals y_j, k..k+m the slacks of candidate rows.
    let mut tableau: Vec<f64> = Vec::with_capacity(m * k);
    for (t, _) in &instance.candidates {
        tableau.extend(elems.iter().map(|&j| if t.contains(j) { 1.0 } else { 0.0 }));
    }
    let mut rhs = costs;
    let mut reduced = vec![1.0; k];
    let mut objective = 0.0;
    let mut nonbasic: Vec<usize> = (0..k).collect();
    let mut basic: Vec<usize> = (k..k + m).collect();

    loop {
        // Bland: entering variable with the smallest label among improving columns.
        let entering = (0..k)
            .filter(|&c| reduced[c] > PIVOT_EPS)
            .min_by_key(|&c| nonbasic[c]);
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = tableau[r * k + col];
            if a > PIVOT_EPS {
                let ratio = rhs[r] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        if ratio < best - PIVOT_EPS
                            || (ratio <= best + PIVOT_EPS && basic[r] < basic[br])
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
        }
        // An improving column with no blocking row means some element is
        // coverable by no candidate; excluded above.
        let Some((row, _)) = leave else {
            return Err(Error::Infeasible(elems[col.min(k - 1)]));
        };
        pivot(&mut tableau, &mut rhs, &mut reduced, &mut objective, k, row, col);
        std::mem::swap(&mut basic[row], &mut nonbasic[col]);
    }

    let mut weights = Vec::new();
    let mut dual = vec![0.0; k];
    for (c, &var) in nonbasic.iter().enumerate() {
        if var >= k {
            let alpha = -reduced[c];
            if alpha > PIVOT_EPS {
                weights.push((var - k, alpha));
            }
        }
    }
    for (r, &var) in basic.iter().enumerate() {
        if var < k {
            dual[var] = rhs[r];
        }
    }
    weights.sort_by_key(|w| w.0);
    Ok(CoverSolution {
        objective,
        weights,
        dual,
    })
}

/// `min c·x` s.t. `A x ≤ b`, `x ≥ 0`, for `c ≥ 0` and any sign of `b`.
///
/// The slack basis is dual feasible when `c ≥ 0`, so the dual simplex runs
/// from it directly; rows with negative right-hand side leave first, lowest
/// index first, and the entering column is the smallest ratio with ties to
/// the smallest label.
pub fn dual_simplex_min(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<f64> {
    let k = c.len();
    let m = b.len();
    if c.iter().any(|&x| x < -NEG_COST_TOL) {
        return Err(Error::Unbounded);
    }
    let mut tableau: Vec<f64> = Vec::with_capacity(m * k);
    for row in a {
        debug_assert_eq!(row.len(), k);
        tableau.extend_from_slice(row);
    }
    let mut rhs = b.to_vec();
    // Stored negated so `pivot` (written for maximisation) applies unchanged.
    let mut reduced: Vec<f64> = c.iter().map(|&x| -x.max(0.0)).collect();
    let mut objective = 0.0;
    let mut nonbasic: Vec<usize> = (0..k).collect();
    let mut basic: Vec<usize> = (k..k + m).collect();
    loop {
        let leaving = (0..m)
            .filter(|&r| rhs[r] < -PIVOT_EPS)
            .min_by_key(|&r| basic[r]);
        let Some(row) = leaving else { break };
        let mut enter: Option<(usize, f64)> = None;
        for col in 0..k {
            let a_rc = tableau[row * k + col];
            if a_rc < -PIVOT_EPS {
                let ratio = reduced[col] / a_rc;
                enter = match enter {
                    Some((bc, best))
                        if !(ratio < best - PIVOT_EPS
                            || (ratio <= best + PIVOT_EPS && nonbasic[col] < nonbasic[bc])) =>
                    {
                        Some((bc, best))
                    }
                    _ => Some((col, ratio)),
                };
            }
        }
        let Some((col, _)) = enter else {
            return Err(Error::InfeasibleLp);
        };
        pivot(&mut tableau, &mut rhs, &mut reduced, &mut objective, k, row, col);
        std::mem::swap(&mut basic[row], &mut nonbasic[col]);
    }
    Ok(-objective)
}

fn pivot(
    tableau: &mut [f64],
    rhs: &mut [f64],
    reduced: &mut [f64],
    objective: &mut f64,
    k: usize,
    row: usize,
    col: usize,
) {
    let m = rhs.len();
    let p = tableau[row * k + col];
    for c in 0..k {
        if c != col {
            tableau[row * k + c] /= p;
        }
    }
    tableau[row * k + col] = 1.0 / p;
    rhs[row] /= p;

    let (pivot_row, pivot_rhs) = (tableau[row * k..(row + 1) * k].to_vec(), rhs[row]);
    for r in 0..m {
        if r == row {
            continue;
        }
        let factor = tableau[r * k + col];
        if factor == 0.0 {
            continue;
        }
        for c in 0..k {
            if c != col {
                tableau[r * k + c] -= factor * pivot_row[c];
            }
        }
        tableau[r * k + col] = -factor * pivot_row[col];
        rhs[r] -= factor * pivot_rhs;
        // Guard degenerate rows against drifting just below zero.
        if rhs[r] < 0.0 && rhs[r] > -PIVOT_EPS {
            rhs[r] = 0.0;
        }
    }
    let d = reduced[col];
    for c in 0..k {
        if c != col {
            reduced[c] -= d * pivot_row[c];
        }
    }
    reduced[col] = -d * pivot_row[col];
    *objective += d * pivot_rhs;
}
