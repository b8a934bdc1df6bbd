//! Seeded priors over set functions.
//!
//! Sample `index` of a spec is drawn from a ChaCha8 stream keyed by
//! `(seed, index)`, so any sample can be regenerated on its own and in any
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setfn::{FunctionClass, GroundSet, SetFunction, SubsetId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionKind {
    /// Negated monotone supermodular functions scaled into `[-1, 0]`.
    Convex,
    /// Pointwise max of `count` random additive functions.
    Xos6 {
        #[serde(default = "default_xos_count")]
        count: usize,
    },
    /// `f(S) = |∪_{i∈S} X_i|` with random `X_i ⊆ [universe]`.
    Coverage {
        #[serde(default)]
        universe: Option<usize>,
        #[serde(default = "default_inclusion")]
        inclusion_p: f64,
    },
    /// `f(S) = min(k, |S|)` with `k` uniform on `1..=n`.
    Kbudget,
    Pointmass { function: SetFunction },
}

fn default_xos_count() -> usize {
    6
}

fn default_inclusion() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub kind: DistributionKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind, n: usize, seed: u64) -> Result<Self> {
        let spec = Self { kind, n, seed };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec from a kind name with default parameters.
    pub fn named(kind: &str, n: usize, seed: u64) -> Result<Self> {
        let kind = match kind {
            "convex" => DistributionKind::Convex,
            "xos6" => DistributionKind::Xos6 { count: 6 },
            "coverage" => DistributionKind::Coverage {
                universe: None,
                inclusion_p: 0.5,
            },
            "kbudget" => DistributionKind::Kbudget,
            other => {
                return Err(Error::InvalidConfig(format!("unknown distribution {other:?}")));
            }
        };
        Self::new(kind, n, seed)
    }

    pub fn point_mass(f: SetFunction) -> Self {
        Self {
            n: f.n(),
            kind: DistributionKind::Pointmass { function: f },
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ground = GroundSet::new(self.n)?;
        match &self.kind {
            DistributionKind::Xos6 { count } if *count == 0 => {
                Err(Error::InvalidConfig("xos6 needs at least one additive function".into()))
            }
            DistributionKind::Coverage { universe, inclusion_p } => {
                let u = universe.unwrap_or(2 * self.n);
                if u == 0 || u > 64 {
                    return Err(Error::InvalidConfig(format!("coverage universe {u} outside 1..=64")));
                }
                if !(0.0..=1.0).contains(inclusion_p) {
                    return Err(Error::InvalidConfig(format!(
                        "inclusion probability {inclusion_p} outside [0, 1]"
                    )));
                }
                Ok(())
            }
            DistributionKind::Pointmass { function } if function.ground() != ground => {
                Err(Error::GroundMismatch(function.n(), self.n))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DistributionKind::Convex => "convex",
            DistributionKind::Xos6 { .. } => "xos6",
            DistributionKind::Coverage { .. } => "coverage",
            DistributionKind::Kbudget => "kbudget",
            DistributionKind::Pointmass { .. } => "pointmass",
        }
    }

    /// Class whose bounds the experiments use for this prior.
    pub fn default_class(&self) -> FunctionClass {
        match self.kind {
            DistributionKind::Convex | DistributionKind::Pointmass { .. } => FunctionClass::S,
            DistributionKind::Xos6 { .. } | DistributionKind::Coverage { .. } => FunctionClass::Sam,
            DistributionKind::Kbudget => FunctionClass::Ss,
        }
    }

    /// The RNG behind sample `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    pub fn sample(&self, index: u64) -> SetFunction {
        let ground = GroundSet::new(self.n).expect("validated spec");
        let mut rng = self.rng(index);
        match &self.kind {
            DistributionKind::Convex => convex(ground, &mut rng),
            DistributionKind::Xos6 { count } => xos(ground, *count, &mut rng),
            DistributionKind::Coverage { universe, inclusion_p } => {
                let sets = coverage_sets(self.n, universe.unwrap_or(2 * self.n), *inclusion_p, &mut rng);
                coverage_function(ground, &sets)
            }
            DistributionKind::Kbudget => {
                let k = rng.gen_range(1..=self.n);
                SetFunction::from_fn(ground, |s| s.len().min(k) as f64)
            }
            DistributionKind::Pointmass { function } => function.clone(),
        }
    }

    /// Samples `start..start+count`, generated in parallel.
    pub fn samples(&self, start: u64, count: usize) -> Vec<SetFunction> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.sample(start + i))
            .collect()
    }
}

fn convex(ground: GroundSet, rng: &mut ChaCha8Rng) -> SetFunction {
    let n = ground.size();
    let mut h: Vec<f64> = ground
        .subsets()
        .map(|t| if t.len() >= 2 { rng.gen::<f64>() } else { 0.0 })
        .collect();
    // Zeta transform: h(S) = Σ_{T⊆S} w(T).
    for i in 0..n {
        let bit = 1usize << i;
        for s in 0..h.len() {
            if s & bit != 0 {
                h[s] += h[s ^ bit];
            }
        }
    }
    let top = h[ground.full().index()];
    if top <= 0.0 {
        return SetFunction::zeros(ground);
    }
    SetFunction::new(ground, h.into_iter().map(|v| -v / top).collect()).expect("length matches")
}

fn xos(ground: GroundSet, count: usize, rng: &mut ChaCha8Rng) -> SetFunction {
    let n = ground.size();
    let clauses: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
        .collect();
    SetFunction::from_fn(ground, |s| {
        clauses
            .iter()
            .map(|w| s.elements().map(|i| w[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    })
}

fn coverage_sets(n: usize, universe: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..n)
        .map(|_| {
            (0..universe)
                .filter(|_| rng.gen_bool(p))
                .fold(0u64, |acc, j| acc | 1 << j)
        })
        .collect()
}

/// Coverage function of the given item sets, each a bitmask over the universe.
pub fn coverage_function(ground: GroundSet, sets: &[u64]) -> SetFunction {
    SetFunction::from_fn(ground, |s: SubsetId| {
        s.elements().fold(0u64, |acc, i| acc | sets[i]).count_ones() as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::{check_class, is_submodular, is_supermodular};

    #[test]
    fn kbudget_values() {
        let spec = DistributionSpec::named("kbudget", 5, 3).unwrap();
        for i in 0..20 {
            let f = spec.sample(i);
            let k = f.get(SubsetId(0b11111));
            assert!((1.0..=5.0).contains(&k));
            assert_eq!(f.get(SubsetId(0b11)), k.min(2.0));
            assert!(check_class(&f, &FunctionClass::Ss));
        }
    }

    #[test]
    fn coverage_example() {
        let g = GroundSet::new(3).unwrap();
        let f = coverage_function(g, &[0b0011, 0b0110, 0b1000]);
        assert_eq!(f.get(SubsetId(0b011)), 3.0);
        assert_eq!(f.get(SubsetId(0b111)), 4.0);
    }

    #[test]
    fn samples_belong_to_their_classes() {
        for i in 0..30 {
            let f = DistributionSpec::named("convex", 5, 1).unwrap().sample(i);
            let neg = f.affine(-1.0, &[0.0; 5]);
            assert!(is_supermodular(&neg));
            assert!(f.values().iter().all(|v| (-1.0 - 1e-12..=1e-12).contains(v)));
            assert_eq!(f.get(SubsetId(0b11111)), -1.0);
            assert!(check_class(&f, &FunctionClass::S));

            let f = DistributionSpec::named("xos6", 5, 1).unwrap().sample(i);
            assert!(check_class(&f, &FunctionClass::Xos));
            let f = DistributionSpec::named("coverage", 5, 1).unwrap().sample(i);
            assert!(check_class(&f, &FunctionClass::Sam));
            assert!(is_submodular(&f));
        }
    }

    #[test]
    fn determinism_and_independent_streams() {
        let spec = DistributionSpec::named("xos6", 4, 99).unwrap();
        assert_eq!(spec.sample(7), spec.sample(7));
        assert_ne!(spec.sample(7), spec.sample(8));
        let batch = spec.samples(5, 4);
        assert_eq!(batch[2], spec.sample(7));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = DistributionSpec::named("coverage", 5, 4).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"coverage\""));
        let back: DistributionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let minimal: DistributionSpec =
            serde_json::from_str(r#"{"kind":"xos6","n":4,"seed":2}"#).unwrap();
        assert_eq!(minimal.kind, DistributionKind::Xos6 { count: 6 });
    }
}
