//! Query planners: which unknown sets to reveal under a budget.
//!
//! Offline planners score a reveal set by its mean divergence over `κ`
//! shared samples (indices `0..κ` of the prior). Oracle planners score it
//! by the exact divergence of one known function and are the one-sample
//! special case.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::divergence::{divergence_value, Norm};
use crate::error::{Error, Result};
use crate::setfn::{
    minimal_information, FunctionClass, IncompleteSetFunction, KnownMask, SetFunction, SubsetId,
};

pub const DEFAULT_MAX_CANDIDATES: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub t: usize,
    pub kappa: usize,
    pub class: FunctionClass,
    #[serde(default)]
    pub norm: Norm,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_candidates")]
    pub max_candidates: u128,
}

fn default_max_candidates() -> u128 {
    DEFAULT_MAX_CANDIDATES
}

impl PlanConfig {
    pub fn new(t: usize, kappa: usize, class: FunctionClass) -> Self {
        Self {
            t,
            kappa,
            class,
            norm: Norm::L1,
            seed: 0,
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub queries: Vec<SubsetId>,
    /// Estimated divergence after `0..=t` reveals.
    pub step_divergence: Vec<f64>,
    pub samples_used: usize,
}

/// The functions a plan is scored against.
pub struct SampleSet {
    functions: Vec<Arc<SetFunction>>,
    /// Every sample is the same function; its divergence is used as is
    /// instead of an average of equal terms.
    degenerate: bool,
    k0: KnownMask,
}

impl SampleSet {
    pub fn new(functions: Vec<SetFunction>) -> Result<Self> {
        let first = functions
            .first()
            .ok_or_else(|| Error::InvalidConfig("at least one sample is required".into()))?;
        let ground = first.ground();
        if let Some(f) = functions.iter().find(|f| f.ground() != ground) {
            return Err(Error::GroundMismatch(f.n(), ground.size()));
        }
        let degenerate = functions.iter().all(|f| f == first);
        Ok(Self {
            k0: minimal_information(ground),
            degenerate,
            functions: functions.into_iter().map(Arc::new).collect(),
        })
    }

    pub fn from_distribution(dist: &DistributionSpec, start: u64, count: usize) -> Result<Self> {
        dist.validate()?;
        Self::new(dist.samples(start, count))
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> impl Iterator<Item = &SetFunction> {
        self.functions.iter().map(|f| f.as_ref())
    }

    /// Sets outside the minimal mask, in increasing order.
    pub fn unknown(&self) -> Vec<SubsetId> {
        self.k0.unknown()
    }

    fn mask(&self, revealed: &[SubsetId]) -> KnownMask {
        self.k0.with_all(revealed.iter().copied())
    }

    /// Mean divergence after revealing `revealed`, summed in sample order.
    pub fn mean_divergence(&self, revealed: &[SubsetId], class: &FunctionClass, norm: Norm) -> Result<f64> {
        let mask = self.mask(revealed);
        if self.degenerate {
            let g = IncompleteSetFunction::new(self.functions[0].clone(), mask)?;
            return divergence_value(&g, class, norm);
        }
        let mut total = 0.0;
        for f in &self.functions {
            let g = IncompleteSetFunction::new(f.clone(), mask.clone())?;
            total += divergence_value(&g, class, norm)?;
        }
        Ok(total / self.functions.len() as f64)
    }
}

fn check_budget(t: usize, unknown: usize) -> Result<()> {
    if t > unknown {
        return Err(Error::InvalidConfig(format!(
            "budget {t} exceeds the {unknown} unknown sets"
        )));
    }
    Ok(())
}

/// Greedy argmin of the mean divergence, ties to the smallest set.
pub fn greedy_on_samples(samples: &SampleSet, cfg: &PlanConfig) -> Result<PlanResult> {
    let unknown = samples.unknown();
    check_budget(cfg.t, unknown.len())?;
    let mut queries: Vec<SubsetId> = Vec::with_capacity(cfg.t);
    let mut steps = vec![samples.mean_divergence(&[], &cfg.class, cfg.norm)?];
    for _ in 0..cfg.t {
        let candidates: Vec<SubsetId> = unknown.iter().copied().filter(|s| !queries.contains(s)).collect();
        let scores: Vec<f64> = candidates
            .par_iter()
            .map(|&s| {
                let mut revealed = queries.clone();
                revealed.push(s);
                samples.mean_divergence(&revealed, &cfg.class, cfg.norm)
            })
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (i, &v) in scores.iter().enumerate() {
            if v < scores[best] {
                best = i;
            }
        }
        queries.push(candidates[best]);
        steps.push(scores[best]);
    }
    Ok(PlanResult {
        queries,
        step_divergence: steps,
        samples_used: samples.len(),
    })
}

/// `C(m, t)`, saturating.
pub fn binomial(m: usize, t: usize) -> u128 {
    if t > m {
        return 0;
    }
    let t = t.min(m - t);
    let mut acc: u128 = 1;
    for i in 0..t {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// The `rank`-th `t`-combination of `0..m` in lexicographic order.
fn unrank(mut rank: u128, m: usize, t: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(t);
    let mut next = 0;
    for left in (1..=t).rev() {
        loop {
            let with_next = binomial(m - next - 1, left - 1);
            if rank < with_next {
                break;
            }
            rank -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advance to the next combination; false after the last one.
fn next_combination(c: &mut [usize], m: usize) -> bool {
    let t = c.len();
    for i in (0..t).rev() {
        if c[i] < m - t + i {
            c[i] += 1;
            for j in i + 1..t {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

const CHUNK: u128 = 2048;

/// Exact argmin over all size-`t` reveal sets. The chosen set is reported in
/// greedy order with its prefix divergences.
pub fn optimal_on_samples(samples: &SampleSet, cfg: &PlanConfig) -> Result<PlanResult> {
    let unknown = samples.unknown();
    let m = unknown.len();
    check_budget(cfg.t, m)?;
    let total = binomial(m, cfg.t);
    if total > cfg.max_candidates {
        return Err(Error::TooLarge {
            what: "optimal planner candidate sets",
            size: total,
            limit: cfg.max_candidates,
        });
    }
    let chunks = total.div_ceil(CHUNK) as u64;
    let best = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<Option<(f64, u128)>> {
            let start = chunk as u128 * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut combo = unrank(start, m, cfg.t);
            let mut revealed: Vec<SubsetId> = Vec::with_capacity(cfg.t);
            let mut best: Option<(f64, u128)> = None;
            for rank in start..end {
                revealed.clear();
                revealed.extend(combo.iter().map(|&i| unknown[i]));
                let v = samples.mean_divergence(&revealed, &cfg.class, cfg.norm)?;
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, rank));
                }
                next_combination(&mut combo, m);
            }
            Ok(best)
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(x), Some(y)) => Some(if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
                    (x, None) => x,
                    (None, y) => y,
                })
            },
        )?;
    let (_, rank) = best.expect("at least one combination");
    let chosen: Vec<SubsetId> = unrank(rank, m, cfg.t).into_iter().map(|i| unknown[i]).collect();
    order_greedily(samples, &chosen, cfg)
}

fn order_greedily(samples: &SampleSet, chosen: &[SubsetId], cfg: &PlanConfig) -> Result<PlanResult> {
    let mut queries = Vec::with_capacity(chosen.len());
    let mut steps = vec![samples.mean_divergence(&[], &cfg.class, cfg.norm)?];
    let mut left = chosen.to_vec();
    while !left.is_empty() {
        let mut best: Option<(f64, usize)> = None;
        for (i, &s) in left.iter().enumerate() {
            let mut revealed = queries.clone();
            revealed.push(s);
            let v = samples.mean_divergence(&revealed, &cfg.class, cfg.norm)?;
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, i));
            }
        }
        let (v, i) = best.expect("nonempty");
        queries.push(left.remove(i));
        steps.push(v);
    }
    Ok(PlanResult {
        queries,
        step_divergence: steps,
        samples_used: samples.len(),
    })
}

/// Uniformly random distinct unknown sets.
pub fn random_trajectory(unknown: &[SubsetId], t: usize, rng: &mut ChaCha8Rng) -> Vec<SubsetId> {
    unknown.choose_multiple(rng, t).copied().collect()
}

/// One seeded random trajectory scored on `samples`.
pub fn random_on_samples(samples: &SampleSet, cfg: &PlanConfig) -> Result<PlanResult> {
    let unknown = samples.unknown();
    check_budget(cfg.t, unknown.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let queries = random_trajectory(&unknown, cfg.t, &mut rng);
    let steps = (0..=queries.len())
        .map(|k| samples.mean_divergence(&queries[..k], &cfg.class, cfg.norm))
        .collect::<Result<_>>()?;
    Ok(PlanResult {
        queries,
        step_divergence: steps,
        samples_used: samples.len(),
    })
}

/// Divergence of `f` after each prefix of `queries`, `0..=len`.
pub fn trajectory_divergences(
    f: &SetFunction,
    queries: &[SubsetId],
    class: &FunctionClass,
    norm: Norm,
) -> Result<Vec<f64>> {
    let f = Arc::new(f.clone());
    let k0 = minimal_information(f.ground());
    (0..=queries.len())
        .map(|k| {
            let g = IncompleteSetFunction::new(f.clone(), k0.with_all(queries[..k].iter().copied()))?;
            divergence_value(&g, class, norm)
        })
        .collect()
}

fn training_samples(dist: &DistributionSpec, cfg: &PlanConfig) -> Result<SampleSet> {
    if cfg.kappa == 0 {
        return Err(Error::InvalidConfig("kappa must be at least 1".into()));
    }
    SampleSet::from_distribution(dist, 0, cfg.kappa)
}

pub fn offline_greedy(dist: &DistributionSpec, cfg: &PlanConfig) -> Result<PlanResult> {
    greedy_on_samples(&training_samples(dist, cfg)?, cfg)
}

pub fn offline_optimal(dist: &DistributionSpec, cfg: &PlanConfig) -> Result<PlanResult> {
    optimal_on_samples(&training_samples(dist, cfg)?, cfg)
}

pub fn oracle_greedy(f: &SetFunction, cfg: &PlanConfig) -> Result<PlanResult> {
    greedy_on_samples(&SampleSet::new(vec![f.clone()])?, cfg)
}

pub fn oracle_optimal(f: &SetFunction, cfg: &PlanConfig) -> Result<PlanResult> {
    optimal_on_samples(&SampleSet::new(vec![f.clone()])?, cfg)
}

/// Seeded random baseline scored on the training samples.
pub fn random_plan(dist: &DistributionSpec, cfg: &PlanConfig) -> Result<PlanResult> {
    random_on_samples(&training_samples(dist, cfg)?, cfg)
}

/// Seeded random baseline scored exactly on `f`.
pub fn oracle_random_plan(f: &SetFunction, cfg: &PlanConfig) -> Result<PlanResult> {
    random_on_samples(&SampleSet::new(vec![f.clone()])?, cfg)
}
