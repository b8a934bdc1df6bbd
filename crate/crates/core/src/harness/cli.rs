//! `subfn` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, PlannerKind};
use super::experiment::run_experiment;
use crate::completions::{bounds, sam_upper_iterative};
use crate::distributions::DistributionSpec;
use crate::divergence::{audit_divergence_supermodularity, divergence, AuditMode, Norm};
use crate::error::{Error, Result};
use crate::oracles;
use crate::planners::{self, PlanConfig};
use crate::setfn::{
    check_class, minimal_information, normalize, FunctionClass, IncompleteSetFunction, KnownMask,
    SetFunction, SubsetId,
};
use crate::sketch::{mean_alpha_by_budget, sketch_experiment, write_sketch_csv};

#[derive(Parser, Debug)]
#[command(name = "subfn", version, about = "Bounds, divergence and query planning for incomplete set functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct ClassArgs {
    /// One of s, sam, xos, ss, ca.
    #[arg(long, default_value = "s")]
    pub class: String,
    /// Additive weights for class ca, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
}

impl ClassArgs {
    fn class(&self) -> Result<FunctionClass> {
        FunctionClass::parse(&self.class, self.weights.clone())
    }
}

#[derive(clap::Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Set function JSON: {"n": .., "values": [..]}.
    #[arg(long = "fn")]
    pub function: PathBuf,
    /// Known mask JSON: {"n": .., "known": [bitmasks]}. Defaults to the
    /// minimal mask.
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

impl InstanceArgs {
    fn load(&self) -> Result<IncompleteSetFunction> {
        let f = read_function(&self.function)?;
        let mask = match &self.mask {
            Some(p) => serde_json::from_str::<KnownMask>(&std::fs::read_to_string(p)?)?,
            None => minimal_information(f.ground()),
        };
        IncompleteSetFunction::new(f, mask)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lower and upper completions.
    Bounds {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        class: ClassArgs,
        /// Use the iterative SAM upper function with this many steps.
        #[arg(long)]
        iterative: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Divergence of an incomplete function.
    Divergence {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value = "l1")]
        norm: String,
    },
    /// Class membership of a complete function.
    Check {
        #[arg(long = "fn")]
        function: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Normalize a function: singletons to 0, ground set to ±1.
    Normalize {
        #[arg(long = "fn")]
        function: PathBuf,
    },
    /// Plan queries with one planner.
    Plan {
        /// convex, xos6, coverage or kbudget.
        #[arg(long)]
        dist: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Function JSON for the oracle planners (or a point-mass prior).
        #[arg(long = "fn")]
        function: Option<PathBuf>,
        #[arg(long, default_value = "offline_greedy")]
        planner: String,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 90)]
        kappa: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to the distribution's class.
        #[arg(long)]
        class: Option<String>,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long, default_value = "l1")]
        norm: String,
    },
    /// Run a planner comparison from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Alpha of revealed-value bounds after greedy planning.
    Sketch {
        #[arg(long, default_value = "coverage")]
        dist: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "11")]
        budgets: Vec<usize>,
        #[arg(long, default_value_t = 90)]
        kappa: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "sam")]
        class: String,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
        /// partition, cover, fractional, s-tight, extension or certify.
        #[arg(long)]
        routine: String,
        /// Target set as comma separated elements, e.g. 0,2.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Supermodularity audit of the L1 divergence.
    Audit {
        #[arg(long = "fn")]
        function: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        /// i,j,k,l for the targeted check; exhaustive otherwise.
        #[arg(long, value_delimiter = ',')]
        targeted: Option<Vec<usize>>,
    },
}

fn read_function(path: &Path) -> Result<SetFunction> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Sizes the global thread pool from `SUBFN_THREADS`.
pub fn init_threads() {
    if let Some(n) = std::env::var("SUBFN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if the pool already exists, in which case it stays as is.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bounds {
            instance,
            class,
            iterative,
            eps,
        } => {
            let g = instance.load()?;
            let class = class.class()?;
            let b = bounds(&g, &class)?;
            let upper = match iterative {
                Some(steps) => sam_upper_iterative(&g, steps, eps),
                None => b.upper.clone(),
            };
            print_json(&json!({
                "class": class,
                "lower": b.lower.values(),
                "upper": upper.values(),
            }))
        }
        Command::Divergence { instance, class, norm } => {
            let g = instance.load()?;
            let r = divergence(&g, &class.class()?, Norm::parse(&norm)?)?;
            print_json(&json!({ "value": r.value, "per_set_gap": r.per_set_gap.values() }))
        }
        Command::Check { function, class } => {
            let f = read_function(&function)?;
            let class = class.class()?;
            print_json(&json!({ "class": class, "member": check_class(&f, &class) }))
        }
        Command::Normalize { function } => {
            let (g, map) = normalize(&read_function(&function)?)?;
            print_json(&json!({ "function": g, "scale": map.scale, "shift": map.shift }))
        }
        Command::Plan {
            dist,
            n,
            function,
            planner,
            t,
            kappa,
            seed,
            class,
            weights,
            norm,
        } => {
            let kind = PlannerKind::parse(&planner)?;
            let spec = match (&dist, &function) {
                (Some(d), _) => DistributionSpec::named(
                    d,
                    n.ok_or_else(|| Error::InvalidConfig("--n is required with --dist".into()))?,
                    seed,
                )?,
                (None, Some(p)) => DistributionSpec::point_mass(read_function(p)?),
                (None, None) => return Err(Error::InvalidConfig("give --dist or --fn".into())),
            };
            let class = match class {
                Some(c) => FunctionClass::parse(&c, weights)?,
                None => spec.default_class(),
            };
            let cfg = PlanConfig {
                norm: Norm::parse(&norm)?,
                seed,
                ..PlanConfig::new(t, kappa, class)
            };
            let oracle_f = || -> Result<SetFunction> {
                match &function {
                    Some(p) => read_function(p),
                    None => Err(Error::InvalidConfig(format!("{kind} needs --fn"))),
                }
            };
            let result = match kind {
                PlannerKind::OfflineGreedy => planners::offline_greedy(&spec, &cfg)?,
                PlannerKind::OfflineOptimal => planners::offline_optimal(&spec, &cfg)?,
                PlannerKind::Random => planners::random_plan(&spec, &cfg)?,
                PlannerKind::OracleGreedy => planners::oracle_greedy(&oracle_f()?, &cfg)?,
                PlannerKind::OracleOptimal => planners::oracle_optimal(&oracle_f()?, &cfg)?,
            };
            print_json(&result)
        }
        Command::Experiment { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let record = run_experiment(&cfg, Some(&out))?;
            for curve in &record.curves {
                let last = curve.steps.last().expect("at least step 0");
                eprintln!(
                    "{:>16}: step {:>2} mean {:.6} (stderr {:.6}) in {:.1}s",
                    curve.algorithm.name(),
                    last.step,
                    last.mean,
                    last.stderr,
                    curve.seconds
                );
            }
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Sketch {
            dist,
            n,
            budgets,
            kappa,
            samples,
            seed,
            class,
            out,
        } => {
            let spec = DistributionSpec::named(&dist, n, seed)?;
            let cfg = PlanConfig::new(0, kappa, FunctionClass::parse(&class, None)?);
            let rows = sketch_experiment(&spec, &cfg, &budgets, samples)?;
            match out {
                Some(p) => write_sketch_csv(&rows, std::fs::File::create(p)?)?,
                None => write_sketch_csv(&rows, std::io::stdout().lock())?,
            }
            for (b, a) in mean_alpha_by_budget(&rows) {
                eprintln!("budget {b:>3}: mean alpha {a:.4}");
            }
            Ok(())
        }
        Command::Oracle {
            instance,
            routine,
            set,
            class,
            seed,
        } => {
            let g = instance.load()?;
            let target = || -> Result<SubsetId> {
                let s = SubsetId::from_elements(
                    set.clone()
                        .ok_or_else(|| Error::InvalidConfig("--set is required".into()))?,
                );
                g.ground().check(s)
            };
            let class = class.class()?;
            match routine.as_str() {
                "partition" => print_json(&json!({ "value": oracles::brute_partition_upper(&g, target()?)? })),
                "cover" => print_json(&json!({ "value": oracles::brute_cover_upper(&g, target()?)? })),
                "fractional" => print_json(&json!({ "value": oracles::brute_fractional_upper(&g, target()?)? })),
                "s-tight" => print_json(&oracles::construct_s_tight_extension(&g, target()?)?),
                "extension" => print_json(&oracles::sample_extension(&g, &class, seed)?),
                "certify" => {
                    let r = oracles::certify_tightness(&g, &class, seed)?;
                    print_json(&json!({ "checked": r.checked, "failures": r.failures }))
                }
                other => Err(Error::InvalidConfig(format!("unknown oracle routine {other:?}"))),
            }
        }
        Command::Audit {
            function,
            class,
            targeted,
        } => {
            let f = read_function(&function)?;
            let mode = match targeted.as_deref() {
                None => AuditMode::Exhaustive,
                Some(&[i, j, k, l]) => AuditMode::Targeted(i, j, k, l),
                Some(_) => return Err(Error::InvalidConfig("--targeted takes four elements".into())),
            };
            let v = audit_divergence_supermodularity(&f, &class.class()?, mode)?;
            print_json(&json!({ "violations": v.len(), "details": v }))
        }
    }
}
