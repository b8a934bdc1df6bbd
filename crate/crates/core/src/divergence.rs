//! Divergence of an incomplete function and the supermodularity audit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::completions::bounds;
use crate::error::{Error, Result};
use crate::setfn::{
    minimal_information, FunctionClass, IncompleteSetFunction, KnownMask, SetFunction, SubsetId,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn apply(self, xs: &[f64]) -> f64 {
        match self {
            Norm::L1 => xs.iter().map(|x| x.abs()).sum(),
            Norm::L2 => xs.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => xs.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(Error::InvalidConfig(format!("unknown norm {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DivergenceReport {
    pub value: f64,
    /// `upper − lower` at every subset.
    pub per_set_gap: SetFunction,
}

pub fn divergence(g: &IncompleteSetFunction, class: &FunctionClass, norm: Norm) -> Result<DivergenceReport> {
    let per_set_gap = bounds(g, class)?.gap();
    Ok(DivergenceReport {
        value: norm.apply(per_set_gap.values()),
        per_set_gap,
    })
}

/// [`divergence`] without the per-set report.
pub fn divergence_value(g: &IncompleteSetFunction, class: &FunctionClass, norm: Norm) -> Result<f64> {
    let b = bounds(g, class)?;
    let gaps: Vec<f64> = b
        .upper
        .values()
        .iter()
        .zip(b.lower.values())
        .map(|(u, l)| u - l)
        .collect();
    Ok(norm.apply(&gaps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditMode {
    Exhaustive,
    /// Base `{jk}`, `S = {ij}`, `Z = {kl}`.
    Targeted(usize, usize, usize, usize),
}

/// A triple breaking
/// `Δ(K̂∪S∪Z) − Δ(K̂∪S) ≥ Δ(K̂∪Z) − Δ(K̂)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Revealed sets beyond the minimal mask.
    pub base: Vec<SubsetId>,
    pub s: SubsetId,
    pub z: SubsetId,
    /// `Δ(K̂∪S∪Z) − Δ(K̂∪S)`.
    pub lhs: f64,
    /// `Δ(K̂∪Z) − Δ(K̂)`.
    pub rhs: f64,
}

pub const AUDIT_MAX_N: usize = 4;

/// L1 class-divergence supermodularity audit of `f` as a function of the
/// revealed sets.
pub fn audit_divergence_supermodularity(
    f: &SetFunction,
    class: &FunctionClass,
    mode: AuditMode,
) -> Result<Vec<Violation>> {
    let ground = f.ground();
    let tol = 1e-9 * f.magnitude().max(1.0);
    let k0 = minimal_information(ground);
    let func = std::sync::Arc::new(f.clone());
    let delta = |revealed: &[SubsetId]| -> Result<f64> {
        let g = IncompleteSetFunction::new(func.clone(), k0.with_all(revealed.iter().copied()))?;
        divergence_value(&g, class, Norm::L1)
    };

    match mode {
        AuditMode::Targeted(i, j, k, l) => {
            let n = ground.size();
            let ids = [i, j, k, l];
            if ids.iter().any(|&x| x >= n) || (1..4).any(|a| ids[..a].contains(&ids[a])) {
                return Err(Error::InvalidConfig(format!(
                    "targeted audit needs four distinct elements below {n}"
                )));
            }
            let base = vec![SubsetId::from_elements([j, k])];
            let s = SubsetId::from_elements([i, j]);
            let z = SubsetId::from_elements([k, l]);
            let d = delta(&base)?;
            let ds = delta(&[base[0], s])?;
            let dz = delta(&[base[0], z])?;
            let dsz = delta(&[base[0], s, z])?;
            let (lhs, rhs) = (dsz - ds, dz - d);
            Ok(if lhs < rhs - tol {
                vec![Violation { base, s, z, lhs, rhs }]
            } else {
                Vec::new()
            })
        }
        AuditMode::Exhaustive => {
            let n = ground.size();
            if n > AUDIT_MAX_N {
                return Err(Error::TooLarge {
                    what: "exhaustive supermodularity audit (n)",
                    size: n as u128,
                    limit: AUDIT_MAX_N as u128,
                });
            }
            let unknown = k0.unknown();
            let m = unknown.len();
            let sets_of = |bits: u32| -> Vec<SubsetId> {
                (0..m).filter(|b| bits >> b & 1 == 1).map(|b| unknown[b]).collect()
            };
            let table: Vec<f64> = (0u32..1 << m)
                .into_par_iter()
                .map(|bits| delta(&sets_of(bits)))
                .collect::<Result<_>>()?;

            let mut out: Vec<Violation> = (0u32..1 << m)
                .into_par_iter()
                .flat_map_iter(|base| {
                    let table = &table;
                    let sets_of = &sets_of;
                    let free: Vec<usize> = (0..m).filter(|b| base >> b & 1 == 0).collect();
                    let mut found = Vec::new();
                    for (x, &a) in free.iter().enumerate() {
                        for &b in &free[x + 1..] {
                            let (sa, sb) = (1u32 << a, 1u32 << b);
                            let lhs = table[(base | sa | sb) as usize] - table[(base | sa) as usize];
                            let rhs = table[(base | sb) as usize] - table[base as usize];
                            if lhs < rhs - tol {
                                found.push(Violation {
                                    base: sets_of(base),
                                    s: unknown[a],
                                    z: unknown[b],
                                    lhs,
                                    rhs,
                                });
                            }
                        }
                    }
                    found
                })
                .collect();
            out.sort_by(|a, b| (&a.base, a.s, a.z).cmp(&(&b.base, b.s, b.z)));
            Ok(out)
        }
    }
}

/// Reveal-set view of the divergence: `K ↦ Δ_f(K₀ ∪ K)`.
pub fn divergence_of_reveal(
    f: &SetFunction,
    class: &FunctionClass,
    revealed: &[SubsetId],
    norm: Norm,
) -> Result<f64> {
    let mask: KnownMask = minimal_information(f.ground()).with_all(revealed.iter().copied());
    divergence_value(&IncompleteSetFunction::new(f.clone(), mask)?, class, norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::GroundSet;

    fn gap_instance(n: usize, top: f64) -> SetFunction {
        SetFunction::from_fn(GroundSet::new(n).unwrap(), |s| match s.len() {
            0 => 0.0,
            1 => 1.0,
            k if k == n => top,
            _ => 1.5,
        })
    }

    #[test]
    fn three_pairs_with_unit_gap() {
        let f = gap_instance(3, 2.0);
        let g = IncompleteSetFunction::minimal(f);
        let r = divergence(&g, &FunctionClass::S, Norm::L1).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.per_set_gap.values().iter().sum::<f64>(), 3.0);
        assert_eq!(divergence_value(&g, &FunctionClass::S, Norm::Linf).unwrap(), 1.0);
        assert!((divergence_value(&g, &FunctionClass::S, Norm::L2).unwrap() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn full_mask_is_zero() {
        let f = gap_instance(4, 2.0);
        let g = IncompleteSetFunction::new(f.clone(), KnownMask::full(f.ground())).unwrap();
        for class in [FunctionClass::S, FunctionClass::Sam] {
            assert_eq!(divergence_value(&g, &class, Norm::L1).unwrap(), 0.0);
        }
    }

    #[test]
    fn gap_separation_values() {
        for n in 3..=6 {
            let g = IncompleteSetFunction::minimal(gap_instance(n, 1.0));
            assert_eq!(divergence_value(&g, &FunctionClass::Sam, Norm::L1).unwrap(), 0.0);
            let s = divergence_value(&g, &FunctionClass::S, Norm::L1).unwrap();
            assert!(s >= (1u64 << n) as f64 - n as f64 - 2.0);
        }
    }

    #[test]
    fn targeted_pairwise_synergy_violation() {
        let f = SetFunction::from_fn(GroundSet::new(6).unwrap(), |s| {
            let k = s.len() as f64;
            -k * (k - 1.0) / 2.0
        });
        let v = audit_divergence_supermodularity(&f, &FunctionClass::S, AuditMode::Targeted(0, 1, 2, 3))
            .unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].lhs < v[0].rhs);
    }

    #[test]
    fn exhaustive_requires_small_ground() {
        let f = gap_instance(5, 2.0);
        assert!(matches!(
            audit_divergence_supermodularity(&f, &FunctionClass::S, AuditMode::Exhaustive),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn exhaustive_small_instance_is_supermodular() {
        let f = gap_instance(3, 2.0);
        let v = audit_divergence_supermodularity(&f, &FunctionClass::S, AuditMode::Exhaustive).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }
}
