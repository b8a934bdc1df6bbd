//! Planner comparison runs producing `results.csv` and `run.json`.

use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, PlannerKind};
use crate::divergence::{divergence_of_reveal, Norm};
use crate::error::Result;
use crate::planners::{
    greedy_on_samples, optimal_on_samples, random_trajectory, trajectory_divergences, PlanConfig,
    SampleSet,
};
use crate::setfn::{minimal_information, normalize, FunctionClass, SetFunction, SubsetId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepStat {
    pub step: usize,
    pub mean: f64,
    pub stderr: f64,
    pub mean_insample: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub algorithm: PlannerKind,
    pub steps: Vec<StepStat>,
    /// Offline planners: the trajectory (greedy) or one optimal set per
    /// budget (optimal). Empty for per-sample planners.
    pub queries: Vec<Vec<SubsetId>>,
    pub seconds: f64,
}

impl Curve {
    pub fn at(&self, step: usize) -> Option<&StepStat> {
        self.steps.iter().find(|s| s.step == step)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub class: FunctionClass,
    pub normalized: bool,
    pub planning_indices: (u64, u64),
    pub eval_indices: (u64, u64),
    pub rng: &'static str,
    pub sampling: &'static str,
    pub offline_optimal_mode: &'static str,
    pub random_mode: &'static str,
    pub version: &'static str,
    pub total_seconds: f64,
    pub curves: Vec<Curve>,
}

impl RunRecord {
    pub fn curve(&self, kind: PlannerKind) -> Option<&Curve> {
        self.curves.iter().find(|c| c.algorithm == kind)
    }
}

struct Context {
    class: FunctionClass,
    norm: Norm,
    training: Vec<SetFunction>,
    eval: Vec<SetFunction>,
    eval_start: u64,
}

fn prepare(f: SetFunction, normalized: bool) -> Result<SetFunction> {
    Ok(if normalized { normalize(&f)?.0 } else { f })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Column means of per-sample step curves.
fn column_stats(rows: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let steps = rows.first().map_or(0, |r| r.len());
    (0..steps)
        .map(|k| mean_stderr(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect()
}

fn eval_queries(ctx: &Context, queries: &[SubsetId]) -> Result<Vec<Vec<f64>>> {
    ctx.eval
        .par_iter()
        .map(|f| trajectory_divergences(f, queries, &ctx.class, ctx.norm))
        .collect()
}

/// Divergence of each sample after revealing exactly `queries`.
fn eval_final(ctx: &Context, queries: &[SubsetId]) -> Result<Vec<f64>> {
    ctx.eval
        .par_iter()
        .map(|f| divergence_of_reveal(f, &ctx.class, queries, ctx.norm))
        .collect()
}

fn stats(steps: Vec<(f64, f64)>, insample: Vec<f64>) -> Vec<StepStat> {
    steps
        .into_iter()
        .zip(insample)
        .enumerate()
        .map(|(step, ((mean, stderr), mean_insample))| StepStat {
            step,
            mean,
            stderr,
            mean_insample,
        })
        .collect()
}

fn run_planner(kind: PlannerKind, cfg: &ExperimentConfig, ctx: &Context) -> Result<Curve> {
    let started = Instant::now();
    let plan_cfg = PlanConfig {
        t: cfg.t_max,
        kappa: cfg.kappa,
        class: ctx.class.clone(),
        norm: ctx.norm,
        seed: cfg.seed,
        max_candidates: cfg.max_candidates,
    };
    let (steps, queries) = match kind {
        PlannerKind::OfflineGreedy => {
            let plan = greedy_on_samples(&SampleSet::new(ctx.training.clone())?, &plan_cfg)?;
            let eval = column_stats(&eval_queries(ctx, &plan.queries)?);
            (stats(eval, plan.step_divergence), vec![plan.queries])
        }
        PlannerKind::OfflineOptimal => {
            let training = SampleSet::new(ctx.training.clone())?;
            let mut steps = Vec::new();
            let mut chosen = Vec::new();
            for t in 0..=cfg.optimal_budget() {
                let plan = optimal_on_samples(&training, &PlanConfig { t, ..plan_cfg.clone() })?;
                let (mean, stderr) = mean_stderr(&eval_final(ctx, &plan.queries)?);
                steps.push(StepStat {
                    step: t,
                    mean,
                    stderr,
                    mean_insample: plan.step_divergence[t],
                });
                let mut q = plan.queries;
                q.sort();
                chosen.push(q);
            }
            (steps, chosen)
        }
        PlannerKind::Random => {
            let eval = random_curves(cfg, ctx, &ctx.eval, ctx.eval_start)?;
            let train = random_curves(cfg, ctx, &ctx.training, 0)?;
            let insample = column_stats(&train).into_iter().map(|s| s.0).collect();
            (stats(column_stats(&eval), insample), Vec::new())
        }
        PlannerKind::OracleGreedy => {
            let run = |samples: &[SetFunction]| -> Result<Vec<Vec<f64>>> {
                samples
                    .par_iter()
                    .map(|f| Ok(greedy_on_samples(&SampleSet::new(vec![f.clone()])?, &plan_cfg)?.step_divergence))
                    .collect()
            };
            let eval = column_stats(&run(&ctx.eval)?);
            let insample = column_stats(&run(&ctx.training)?).into_iter().map(|s| s.0).collect();
            (stats(eval, insample), Vec::new())
        }
        PlannerKind::OracleOptimal => {
            let run = |samples: &[SetFunction]| -> Result<Vec<Vec<f64>>> {
                samples
                    .par_iter()
                    .map(|f| {
                        let set = SampleSet::new(vec![f.clone()])?;
                        (0..=cfg.optimal_budget())
                            .map(|t| {
                                let p = optimal_on_samples(&set, &PlanConfig { t, ..plan_cfg.clone() })?;
                                Ok(p.step_divergence[t])
                            })
                            .collect()
                    })
                    .collect()
            };
            let eval = column_stats(&run(&ctx.eval)?);
            let insample = column_stats(&run(&ctx.training)?).into_iter().map(|s| s.0).collect();
            (stats(eval, insample), Vec::new())
        }
    };
    Ok(Curve {
        algorithm: kind,
        steps,
        queries,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// One random trajectory per sample, keyed by the experiment seed and the
/// sample's index.
fn random_curves(cfg: &ExperimentConfig, ctx: &Context, samples: &[SetFunction], start: u64) -> Result<Vec<Vec<f64>>> {
    let unknown = minimal_information(crate::setfn::GroundSet::new(cfg.distribution.n)?).unknown();
    samples
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(start + i as u64);
            let queries = random_trajectory(&unknown, cfg.t_max, &mut rng);
            trajectory_divergences(f, &queries, &ctx.class, ctx.norm)
        })
        .collect()
}

/// Runs every configured planner. Writes `results.csv` and `run.json` into
/// `out_dir` when given.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let normalized = cfg.normalizes();
    let dist = &cfg.distribution;
    let kappa = cfg.kappa as u64;
    let load = |start: u64, count: usize| -> Result<Vec<SetFunction>> {
        dist.samples(start, count).into_iter().map(|f| prepare(f, normalized)).collect()
    };
    let ctx = Context {
        class: cfg.class(),
        norm: cfg.norm,
        training: load(0, cfg.kappa)?,
        eval: load(kappa, cfg.eval_samples)?,
        eval_start: kappa,
    };
    let curves = cfg
        .planners
        .iter()
        .map(|&kind| run_planner(kind, cfg, &ctx))
        .collect::<Result<Vec<_>>>()?;
    let record = RunRecord {
        config: cfg.clone(),
        class: ctx.class.clone(),
        normalized,
        planning_indices: (0, kappa),
        eval_indices: (kappa, kappa + cfg.eval_samples as u64),
        rng: "ChaCha8Rng::seed_from_u64(distribution.seed), stream = sample index",
        sampling: "common random numbers: planning samples shared across candidates and steps",
        offline_optimal_mode: "independent optimal set per budget",
        random_mode: "independent random trajectory per sample, ChaCha8Rng::seed_from_u64(seed), stream = sample index",
        version: env!("CARGO_PKG_VERSION"),
        total_seconds: started.elapsed().as_secs_f64(),
        curves,
    };
    if let Some(dir) = out_dir {
        write_outputs(&record, dir)?;
    }
    Ok(record)
}

pub const RESULTS_HEADER: [&str; 9] = [
    "step",
    "algorithm",
    "mean_divergence",
    "stderr",
    "n",
    "distribution",
    "class",
    "norm",
    "mean_divergence_insample",
];

pub fn write_outputs(record: &RunRecord, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("results.csv"))?;
    w.write_record(RESULTS_HEADER)?;
    let norm = serde_json::to_value(record.config.norm)?;
    let norm = norm.as_str().unwrap_or("l1").to_string();
    for curve in &record.curves {
        for s in &curve.steps {
            w.write_record([
                s.step.to_string(),
                curve.algorithm.name().to_string(),
                s.mean.to_string(),
                s.stderr.to_string(),
                record.config.distribution.n.to_string(),
                record.config.distribution.name().to_string(),
                record.class.tag().to_string(),
                norm.clone(),
                s.mean_insample.to_string(),
            ])?;
        }
    }
    w.flush()?;
    std::fs::write(dir.join("run.json"), serde_json::to_string_pretty(record)?)?;
    Ok(())
}
