//! Multiplicative quality of a (lower, upper) bound pair.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::completions::bounds;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::planners::{greedy_on_samples, PlanConfig, SampleSet};
use crate::setfn::{minimal_information, GroundSet, IncompleteSetFunction, SetFunction, SubsetId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaReport {
    pub alpha: f64,
    pub witness: SubsetId,
    /// Sets with `lower = upper = 0`.
    pub skipped: usize,
}

/// `max_S upper(S)/lower(S)` over sets with positive lower value.
pub fn alpha_ratio(lower: &SetFunction, upper: &SetFunction) -> Result<AlphaReport> {
    if lower.ground() != upper.ground() {
        return Err(Error::GroundMismatch(lower.n(), upper.n()));
    }
    if lower.values().iter().chain(upper.values()).any(|&v| v < 0.0) {
        return Err(Error::NegativeValues);
    }
    let mut alpha = f64::NEG_INFINITY;
    let mut witness = SubsetId::EMPTY;
    let mut skipped = 0;
    for s in lower.ground().subsets() {
        let (l, u) = (lower.get(s), upper.get(s));
        if l > 0.0 {
            let r = u / l;
            if r > alpha {
                alpha = r;
                witness = s;
            }
        } else if u > 0.0 {
            return Err(Error::Unbounded);
        } else {
            skipped += 1;
        }
    }
    if alpha == f64::NEG_INFINITY {
        alpha = 1.0;
    }
    Ok(AlphaReport { alpha, witness, skipped })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SketchRow {
    pub distribution: String,
    pub n: usize,
    pub budget: usize,
    pub sample_index: u64,
    pub alpha: f64,
    pub witness: SubsetId,
}

/// Greedy plan from `cfg.kappa` training samples; each of `eval_samples`
/// held-out samples (indices from `kappa` on) has the planned sets revealed
/// and its bound pair scored. One row per (budget, sample).
pub fn sketch_experiment(
    dist: &DistributionSpec,
    cfg: &PlanConfig,
    budgets: &[usize],
    eval_samples: usize,
) -> Result<Vec<SketchRow>> {
    let max_budget = budgets.iter().copied().max().unwrap_or(0);
    let training = SampleSet::from_distribution(dist, 0, cfg.kappa)?;
    let plan = greedy_on_samples(&training, &PlanConfig { t: max_budget, ..cfg.clone() })?;
    let k0 = minimal_information(GroundSet::new(dist.n)?);
    let rows: Vec<Vec<SketchRow>> = (0..eval_samples as u64)
        .into_par_iter()
        .map(|i| {
            let index = cfg.kappa as u64 + i;
            let f = std::sync::Arc::new(dist.sample(index));
            budgets
                .iter()
                .map(|&b| {
                    let mask = k0.with_all(plan.queries[..b].iter().copied());
                    let bd = bounds(&IncompleteSetFunction::new(f.clone(), mask)?, &cfg.class)?;
                    let rep = alpha_ratio(&bd.lower, &bd.upper)?;
                    Ok(SketchRow {
                        distribution: dist.name().to_string(),
                        n: dist.n,
                        budget: b,
                        sample_index: index,
                        alpha: rep.alpha,
                        witness: rep.witness,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SketchRow> = rows.into_iter().flatten().collect();
    rows.sort_by_key(|r| (r.budget, r.sample_index));
    Ok(rows)
}

/// Mean alpha per budget, in increasing budget order.
pub fn mean_alpha_by_budget(rows: &[SketchRow]) -> Vec<(usize, f64)> {
    let mut budgets: Vec<usize> = rows.iter().map(|r| r.budget).collect();
    budgets.sort_unstable();
    budgets.dedup();
    budgets
        .into_iter()
        .map(|b| {
            let xs: Vec<f64> = rows.iter().filter(|r| r.budget == b).map(|r| r.alpha).collect();
            (b, xs.iter().sum::<f64>() / xs.len() as f64)
        })
        .collect()
}

pub fn write_sketch_csv<W: Write>(rows: &[SketchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["distribution", "n", "budget", "sample_index", "alpha", "witness"])?;
    for r in rows {
        w.write_record([
            r.distribution.clone(),
            r.n.to_string(),
            r.budget.to_string(),
            r.sample_index.to_string(),
            r.alpha.to_string(),
            r.witness.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::FunctionClass;

    #[test]
    fn identical_pair_is_one() {
        let f = SetFunction::from_fn(GroundSet::new(3).unwrap(), |s| s.len() as f64);
        let r = alpha_ratio(&f, &f).unwrap();
        assert_eq!(r.alpha, 1.0);
        assert_eq!(r.skipped, 1);
    }

    #[test]
    fn doubled_pairs() {
        let g = GroundSet::new(3).unwrap();
        let lower = SetFunction::from_fn(g, |s| s.len() as f64);
        let upper = SetFunction::from_fn(g, |s| if s.len() == 2 { 4.0 } else { s.len() as f64 });
        let r = alpha_ratio(&lower, &upper).unwrap();
        assert_eq!(r.alpha, 2.0);
        assert_eq!(r.witness, SubsetId(0b011));
        assert!(matches!(alpha_ratio(&SetFunction::zeros(g), &upper), Err(Error::Unbounded)));
        assert!(matches!(
            alpha_ratio(&lower.affine(-1.0, &[0.0; 3]), &upper),
            Err(Error::NegativeValues)
        ));
    }

    #[test]
    fn full_budget_gives_one() {
        let dist = DistributionSpec::named("coverage", 3, 2).unwrap();
        let cfg = PlanConfig::new(0, 4, FunctionClass::Sam);
        let rows = sketch_experiment(&dist, &cfg, &[0, 3], 5).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().filter(|r| r.budget == 3).all(|r| r.alpha == 1.0));
        let mut buf = Vec::new();
        write_sketch_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("distribution,n,budget"));
    }
}
