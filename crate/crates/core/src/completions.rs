//! Lower and upper completions of an incomplete set function, per class.
//!
//! Every routine works on an [`IncompleteSetFunction`] and reads only masked
//! values. Internally each bound is computed for every subset, including the
//! masked ones; a masked set whose recomputed bound disagrees with its
//! observed value is how non-extendable inputs are detected. The returned
//! [`Bounds`] carry the observed values verbatim on the mask.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{dual_simplex_min, min_fractional_cover, CoverInstance};
use crate::setfn::{
    additive_value, collapse_points, same_x, FunctionClass, Point, IncompleteSetFunction, SetFunction,
    SubsetId,
};

const EXTEND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: SetFunction,
    pub upper: SetFunction,
    pub class: FunctionClass,
}

impl Bounds {
    /// `upper − lower`, pointwise.
    pub fn gap(&self) -> SetFunction {
        SetFunction::from_fn(self.lower.ground(), |s| self.upper.get(s) - self.lower.get(s))
    }
}

/// Bounds for any class.
pub fn bounds(g: &IncompleteSetFunction, class: &FunctionClass) -> Result<Bounds> {
    match class {
        FunctionClass::S => s_bounds(g),
        FunctionClass::Sam => sam_bounds(g),
        FunctionClass::Xos => xos_bounds(g),
        FunctionClass::Ss => ss_bounds(g),
        FunctionClass::Ca(w) => ca_bounds(g, w),
    }
}

fn tolerance(g: &IncompleteSetFunction) -> f64 {
    let scale = g
        .mask()
        .members()
        .iter()
        .fold(1.0f64, |m, &s| m.max(g.known(s).abs()));
    EXTEND_TOL * scale
}

/// Cheapest partition of each subset into known sets. The block holding the
/// lowest element of `S` is some known `T ⊆ S`, so
/// `u(S) = min_{T∈K, low(S)∈T⊆S} f(T) + u(S∖T)`.
pub(crate) fn partition_upper(g: &IncompleteSetFunction) -> Vec<f64> {
    let size = g.ground().num_subsets();
    let known: Vec<(u32, f64)> = g.mask().members().iter().map(|&t| (t.0, g.known(t))).collect();
    let mut u = vec![f64::INFINITY; size];
    u[0] = 0.0;
    for s in 1..size as u32 {
        let low = s & s.wrapping_neg();
        let mut best = f64::INFINITY;
        for &(t, ft) in &known {
            if t & low != 0 && t & !s == 0 {
                let cand = ft + u[(s & !t) as usize];
                if cand < best {
                    best = cand;
                }
            }
        }
        u[s as usize] = best;
    }
    u
}

/// Cheapest cover of each subset by known sets: some known `T` covers the
/// lowest element, so `u(S) = min_{T∈K, low(S)∈T} f(T) + u(S∖T)`.
pub(crate) fn cover_upper(g: &IncompleteSetFunction) -> Vec<f64> {
    let size = g.ground().num_subsets();
    let known: Vec<(u32, f64)> = g.mask().members().iter().map(|&t| (t.0, g.known(t))).collect();
    let mut u = vec![f64::INFINITY; size];
    u[0] = 0.0;
    for s in 1..size as u32 {
        let low = s & s.wrapping_neg();
        let mut best = f64::INFINITY;
        for &(t, ft) in &known {
            if t & low != 0 {
                let cand = ft + u[(s & !t) as usize];
                if cand < best {
                    best = cand;
                }
            }
        }
        u[s as usize] = best;
    }
    u
}

fn fractional_upper(g: &IncompleteSetFunction) -> Result<Vec<f64>> {
    let known: Vec<(SubsetId, f64)> = g
        .mask()
        .members()
        .iter()
        .filter(|t| !t.is_empty())
        .map(|&t| (t, g.known(t)))
        .collect();
    g.ground()
        .subsets()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| {
            if s.is_empty() {
                return Ok(0.0);
            }
            let candidates = known.iter().copied().filter(|(t, _)| t.intersects(s)).collect();
            min_fractional_cover(&CoverInstance::new(s, candidates)).map(|sol| sol.objective)
        })
        .collect()
}

/// `max_{X∈K, S⊆X} f(X) − u(X∖S)`. With `monotone` every known `X` counts,
/// since then `f(X) ≤ f(X∪S) ≤ g(S) + u(X∖S)`; known subsets of `S` enter
/// as `u(∅) = 0`.
fn lower_from_upper(g: &IncompleteSetFunction, upper: &[f64], monotone: bool) -> Vec<f64> {
    let known: Vec<(u32, f64)> = g.mask().members().iter().map(|&t| (t.0, g.known(t))).collect();
    (0..upper.len() as u32)
        .map(|s| {
            known
                .iter()
                .filter(|&&(x, _)| monotone || s & !x == 0)
                .map(|&(x, fx)| fx - upper[(x & !s) as usize])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Validate the internal bounds against the mask and assemble the result.
fn assemble(
    g: &IncompleteSetFunction,
    lower: Vec<f64>,
    upper: Vec<f64>,
    class: FunctionClass,
) -> Result<Bounds> {
    let tol = tolerance(g);
    let ground = g.ground();
    let mut lo = SetFunction::zeros(ground);
    let mut up = SetFunction::zeros(ground);
    for s in ground.subsets() {
        let (l, u) = (lower[s.index()], upper[s.index()]);
        if g.is_known(s) {
            let v = g.known(s);
            if u < v - tol {
                return Err(Error::NotExtendable { set: s, lower: v, upper: u });
            }
            if l > v + tol {
                return Err(Error::NotExtendable { set: s, lower: l, upper: v });
            }
            lo.set(s, v);
            up.set(s, v);
        } else {
            if l.is_nan() || u.is_nan() || l > u + tol {
                return Err(Error::NotExtendable { set: s, lower: l, upper: u });
            }
            lo.set(s, l);
            up.set(s, u);
        }
    }
    Ok(Bounds {
        lower: lo,
        upper: up,
        class,
    })
}

/// Tight bounds for subadditive functions.
pub fn s_bounds(g: &IncompleteSetFunction) -> Result<Bounds> {
    let upper = partition_upper(g);
    let lower = lower_from_upper(g, &upper, false);
    assemble(g, lower, upper, FunctionClass::S)
}

/// Tight bounds for subadditive monotone functions.
pub fn sam_bounds(g: &IncompleteSetFunction) -> Result<Bounds> {
    let upper = cover_upper(g);
    let lower = lower_from_upper(g, &upper, true);
    assemble(g, lower, upper, FunctionClass::Sam)
}

/// Tight bounds for XOS functions: fractional cover above, and below the
/// smallest value at `S` that keeps every known `X` coverable.
pub fn xos_bounds(g: &IncompleteSetFunction) -> Result<Bounds> {
    let upper = fractional_upper(g)?;
    let mut lower = lower_from_upper(g, &upper, true);
    let unknown: Vec<SubsetId> = g.ground().subsets().filter(|&s| !g.is_known(s)).collect();
    let exact: Vec<(usize, f64)> = unknown
        .into_par_iter()
        .map(|s| (s.index(), xos_exact_lower(g, s)))
        .collect();
    for (i, v) in exact {
        lower[i] = lower[i].max(v);
    }
    assemble(g, lower, upper, FunctionClass::Xos)
}

/// Revealing `g(S) = L` keeps `X` coverable iff some `y ≥ 0` on `X` packs
/// under every known set (`y(T∩X) ≤ f(T)`), reaches `y(X) ≥ f(X)` and has
/// `y(S∩X) ≤ L`. The least such `L`, maximised over `X`, is the bound.
fn xos_exact_lower(g: &IncompleteSetFunction, s: SubsetId) -> f64 {
    let known: Vec<(u32, f64)> = g
        .mask()
        .members()
        .iter()
        .filter(|t| !t.is_empty())
        .map(|&t| (t.0, g.known(t)))
        .collect();
    let mut best = 0.0f64;
    for &(x, fx) in &known {
        if x & s.0 == 0 {
            continue;
        }
        if x & !s.0 == 0 {
            best = best.max(fx);
            continue;
        }
        let elems: Vec<u32> = (0..32).filter(|j| x >> j & 1 == 1).collect();
        let cost: Vec<f64> = elems.iter().map(|&j| f64::from((s.0 >> j) & 1)).collect();
        let mut rows = vec![vec![-1.0; elems.len()]];
        let mut rhs = vec![-fx];
        for &(t, ft) in &known {
            if t & x != 0 {
                rows.push(elems.iter().map(|&j| f64::from((t >> j) & 1)).collect());
                rhs.push(ft);
            }
        }
        // Infeasible means `X` is not coverable at all; `assemble` reports it.
        if let Ok(v) = dual_simplex_min(&cost, &rows, &rhs) {
            best = best.max(v);
        }
    }
    best
}

/// Iterative (sound, not necessarily tight) SAM upper function.
pub fn sam_upper_iterative(g: &IncompleteSetFunction, max_steps: usize, eps: f64) -> SetFunction {
    sam_upper_iterative_trace(g, max_steps, eps)
        .pop()
        .expect("trace holds at least the seed")
}

/// Every iterate of [`sam_upper_iterative`], seed first.
pub fn sam_upper_iterative_trace(
    g: &IncompleteSetFunction,
    max_steps: usize,
    eps: f64,
) -> Vec<SetFunction> {
    let ground = g.ground();
    let n = ground.size();
    let mut seed = partition_upper(g);
    superset_min(&mut seed, n);

    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for s in ground.subsets() {
        by_size[s.len()].push(s.0);
    }

    let mut trace = vec![SetFunction::new(ground, seed.clone()).expect("length matches")];
    let mut prev = seed;
    for _ in 0..max_steps {
        let mut next = prev.clone();
        for size in (1..=n).rev() {
            for &s in &by_size[size] {
                let split = SubsetId(s)
                    .subsets()
                    .map(|x| prev[x.index()] + prev[(s & !x.0) as usize])
                    .fold(f64::INFINITY, f64::min);
                // Supersets were finalised at larger cardinalities.
                let sup = (0..n)
                    .filter(|i| s >> i & 1 == 0)
                    .map(|i| next[(s | 1 << i) as usize])
                    .fold(f64::INFINITY, f64::min);
                next[s as usize] = split.min(sup);
            }
        }
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        trace.push(SetFunction::new(ground, next.clone()).expect("length matches"));
        prev = next;
        if change < eps {
            break;
        }
    }
    trace
}

/// `v(S) ← min_{T⊇S} v(T)`.
fn superset_min(v: &mut [f64], n: usize) {
    for i in 0..n {
        let bit = 1usize << i;
        for s in 0..v.len() {
            if s & bit == 0 && v[s | bit] < v[s] {
                v[s] = v[s | bit];
            }
        }
    }
}

/// Verify the known profile points admit a nondecreasing concave completion.
fn check_profile(points: &[Point], tol: f64) -> Result<()> {
    for w in points.windows(2) {
        if w[1].1 < w[0].1 - tol {
            return Err(Error::NotExtendable {
                set: w[1].2,
                lower: w[0].1,
                upper: w[1].1,
            });
        }
    }
    for w in points.windows(3) {
        let chord = interpolate(&w[0], &w[2], w[1].0);
        if w[1].1 < chord - tol {
            return Err(Error::NotExtendable {
                set: w[1].2,
                lower: chord,
                upper: w[1].1,
            });
        }
    }
    Ok(())
}

/// Value at `x` of the line through `a` and `b`.
#[inline]
fn interpolate(a: &Point, b: &Point, x: f64) -> f64 {
    a.1 + (x - a.0) * (b.1 - a.1) / (b.0 - a.0)
}

/// Interval for an unknown position `x` given the sorted known points.
///
/// Lower: chord between the neighbours. Upper: the smallest of the forward
/// extrapolation of the two known points below, the backward extrapolation
/// of the two known points above, and the value of the next known point
/// above (monotonicity).
fn profile_interval(points: &[Point], x: f64) -> (f64, f64) {
    if let Some(p) = points.iter().find(|p| same_x(p.0, x)) {
        return (p.1, p.1);
    }
    let above = points.partition_point(|p| p.0 < x);
    debug_assert!(above > 0 && above < points.len(), "x outside the known range");
    let (lo_pt, hi_pt) = (&points[above - 1], &points[above]);
    let lower = interpolate(lo_pt, hi_pt, x);
    let mut upper = hi_pt.1;
    if above >= 2 {
        upper = upper.min(interpolate(&points[above - 2], lo_pt, x));
    }
    if above + 1 < points.len() {
        upper = upper.min(interpolate(hi_pt, &points[above + 1], x));
    }
    (lower, upper)
}

fn profile_bounds(
    g: &IncompleteSetFunction,
    points: &[Point],
    x_of: impl Fn(SubsetId) -> f64,
    class: FunctionClass,
) -> Result<Bounds> {
    let ground = g.ground();
    let mut lower = SetFunction::zeros(ground);
    let mut upper = SetFunction::zeros(ground);
    for s in ground.subsets() {
        let (l, u) = if g.is_known(s) {
            (g.known(s), g.known(s))
        } else {
            profile_interval(points, x_of(s))
        };
        lower.set(s, l);
        upper.set(s, u);
    }
    Ok(Bounds { lower, upper, class })
}

/// Tight bounds for symmetric submodular functions `f(S) = g(|S|)`.
pub fn ss_bounds(g: &IncompleteSetFunction) -> Result<Bounds> {
    let tol = tolerance(g);
    let mut by_card: Vec<Option<(f64, SubsetId)>> = vec![None; g.n() + 1];
    for &t in g.mask().members() {
        let v = g.known(t);
        match by_card[t.len()] {
            None => by_card[t.len()] = Some((v, t)),
            Some((w, _)) if (w - v).abs() > tol => return Err(Error::NotSymmetric(t.len())),
            Some(_) => {}
        }
    }
    let points: Vec<Point> = by_card
        .iter()
        .enumerate()
        .filter_map(|(k, p)| p.map(|(v, t)| (k as f64, v, t)))
        .collect();
    check_profile(&points, tol)?;
    profile_bounds(g, &points, |s| s.len() as f64, FunctionClass::Ss)
}

/// Bounds for concave additive functions `f(S) = g(a(S))` with the additive
/// part `a` known exactly.
pub fn ca_bounds(g: &IncompleteSetFunction, weights: &[f64]) -> Result<Bounds> {
    let class = FunctionClass::concave_additive(weights.to_vec())?;
    class.weights_for(g.n())?;
    let tol = tolerance(g);
    let raw: Vec<Point> = g
        .mask()
        .members()
        .iter()
        .map(|&t| (additive_value(weights, t), g.known(t), t))
        .collect();
    let points = collapse_points(raw, tol).map_err(|(a, b)| Error::Inconsistent(a, b))?;
    check_profile(&points, tol)?;
    profile_bounds(g, &points, |s| additive_value(weights, s), class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::{GroundSet, KnownMask};

    fn ground(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    /// f(i)=1, f(N)=top, everything else unknown.
    fn k0_instance(n: usize, top: f64) -> IncompleteSetFunction {
        let gs = ground(n);
        let f = SetFunction::from_fn(gs, |s| match s.len() {
            0 => 0.0,
            1 => 1.0,
            k if k == n => top,
            _ => f64::NAN,
        });
        IncompleteSetFunction::minimal(f)
    }

    fn pairs(n: usize) -> Vec<SubsetId> {
        ground(n).subsets().filter(|s| s.len() == 2).collect()
    }

    #[test]
    fn s_bounds_on_three_elements() {
        let b = s_bounds(&k0_instance(3, 2.0)).unwrap();
        for p in pairs(3) {
            assert_eq!(b.upper.get(p), 2.0);
            assert_eq!(b.lower.get(p), 1.0);
        }
        assert_eq!(b.upper.get(SubsetId(7)), 2.0);
        assert_eq!(b.lower.get(SubsetId(1)), 1.0);
    }

    #[test]
    fn gap_separation_bounds() {
        let g = k0_instance(3, 1.0);
        let s = s_bounds(&g).unwrap();
        let sam = sam_bounds(&g).unwrap();
        for p in pairs(3) {
            assert_eq!(s.upper.get(p), 2.0);
            assert_eq!(s.lower.get(p), 0.0);
            assert_eq!(sam.upper.get(p), 1.0);
            assert_eq!(sam.lower.get(p), 1.0);
        }
    }

    fn xos_separation(k: i32) -> IncompleteSetFunction {
        let base = 2f64.powi(k);
        let gs = ground(4);
        let f = SetFunction::from_fn(gs, |s| match s.len() {
            0 => 0.0,
            1 | 2 => base,
            3 => 1.5 * base,
            _ => 2.0 * base,
        });
        let mask = KnownMask::from_sets(gs, gs.subsets().filter(|s| s.len() != 3)).unwrap();
        IncompleteSetFunction::new(f, mask).unwrap()
    }

    #[test]
    fn xos_separation_upper_values() {
        for k in [0, 5] {
            let g = xos_separation(k);
            let base = 2f64.powi(k);
            let sam = sam_bounds(&g).unwrap();
            let xos = xos_bounds(&g).unwrap();
            for t in ground(4).subsets().filter(|s| s.len() == 3) {
                assert_eq!(sam.upper.get(t), 2.0 * base);
                assert!((xos.upper.get(t) - 1.5 * base).abs() < 1e-9 * base);
            }
        }
    }

    #[test]
    fn known_sets_are_pinned() {
        let g = k0_instance(4, 2.5);
        for b in [s_bounds(&g), sam_bounds(&g), xos_bounds(&g)] {
            let b = b.unwrap();
            for &t in g.mask().members() {
                assert_eq!(b.lower.get(t), g.known(t));
                assert_eq!(b.upper.get(t), g.known(t));
            }
        }
    }

    #[test]
    fn non_extendable_inputs_error() {
        // f(N) above the sum of singletons violates subadditivity.
        let g = k0_instance(3, 3.5);
        assert!(matches!(s_bounds(&g), Err(Error::NotExtendable { .. })));
        assert!(matches!(sam_bounds(&g), Err(Error::NotExtendable { .. })));
        // A negative singleton cannot be monotone from f(∅)=0.
        let gs = ground(2);
        let f = SetFunction::new(gs, vec![0.0, -1.0, 1.0, -0.5]).unwrap();
        let g = IncompleteSetFunction::minimal(f);
        assert!(s_bounds(&g).is_ok());
        assert!(matches!(sam_bounds(&g), Err(Error::NotExtendable { .. })));
        assert!(matches!(xos_bounds(&g), Err(Error::Unbounded)));
    }

    #[test]
    fn sam_lower_uses_partially_overlapping_known_sets() {
        // S = {1,2,3} meets the known {0,1,2} in two unknown elements.
        let gs = ground(5);
        let x = SubsetId::from_elements([0, 1, 2]);
        let s = SubsetId::from_elements([1, 2, 3]);
        let f = SetFunction::from_fn(gs, |t| match t.len() {
            0 => 0.0,
            1 => 1.0,
            5 => 2.6,
            _ if t == x => 2.5,
            _ => f64::NAN,
        });
        let mask = minimal_information_with(gs, x);
        let g = IncompleteSetFunction::new(f.clone(), mask.clone()).unwrap();
        let b = sam_bounds(&g).unwrap();
        assert!((b.lower.get(s) - 1.5).abs() < 1e-12);
        // The bound is attained: fixing S at 1.5 stays extendable.
        let mut h = f;
        h.set(s, 1.5);
        assert!(sam_bounds(&IncompleteSetFunction::new(h, mask.with(s)).unwrap()).is_ok());
    }

    fn minimal_information_with(gs: GroundSet, s: SubsetId) -> KnownMask {
        crate::setfn::minimal_information(gs).with(s)
    }

    #[test]
    fn ss_bounds_interpolation_and_extrapolation() {
        // Known cardinalities (0,0),(1,1),(3,2.5),(4,3).
        let gs = ground(4);
        let prof = [0.0, 1.0, f64::NAN, 2.5, 3.0];
        let f = SetFunction::from_fn(gs, |s| prof[s.len()]);
        let mask = KnownMask::from_sets(gs, gs.subsets().filter(|s| s.len() == 3)).unwrap();
        let g = IncompleteSetFunction::new(f, mask).unwrap();
        let b = ss_bounds(&g).unwrap();
        for p in pairs(4) {
            assert!((b.lower.get(p) - 1.75).abs() < 1e-12);
            assert!((b.upper.get(p) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ss_bounds_on_linear_budget() {
        let gs = ground(5);
        let f = SetFunction::from_fn(gs, |s| s.len() as f64);
        let b = ss_bounds(&IncompleteSetFunction::minimal(f)).unwrap();
        for s in gs.subsets() {
            assert_eq!(b.lower.get(s), s.len() as f64);
            assert_eq!(b.upper.get(s), s.len() as f64);
        }
    }

    #[test]
    fn ss_bounds_errors() {
        let gs = ground(3);
        let f = SetFunction::new(gs, vec![0.0, 1.0, 1.0, 2.0, 1.0, 1.9, 1.8, 2.5]).unwrap();
        let mask = KnownMask::full(gs);
        let g = IncompleteSetFunction::new(f, mask).unwrap();
        assert!(matches!(ss_bounds(&g), Err(Error::NotSymmetric(2))));
        // Convex profile.
        let f = SetFunction::from_fn(gs, |s| (s.len() * s.len()) as f64);
        let g = IncompleteSetFunction::new(f, KnownMask::full(gs)).unwrap();
        assert!(matches!(ss_bounds(&g), Err(Error::NotExtendable { .. })));
    }

    #[test]
    fn monotonicity_cap_applies_when_only_one_point_above() {
        // Known: 0 -> 0, 1 -> 1, 4 -> 1.2. At size 2 the forward line gives 2,
        // no pair exists above, so the cap 1.2 binds.
        let gs = ground(4);
        let prof = [0.0, 1.0, f64::NAN, f64::NAN, 1.2];
        let f = SetFunction::from_fn(gs, |s| prof[s.len()]);
        let b = ss_bounds(&IncompleteSetFunction::minimal(f)).unwrap();
        assert!((b.upper.get(SubsetId(3)) - 1.2).abs() < 1e-12);
        assert!((b.lower.get(SubsetId(3)) - (1.0 + 0.2 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn ca_with_unit_weights_matches_ss() {
        let gs = ground(4);
        let prof = [0.0, 1.0, 1.7, 2.2, 2.5];
        let f = SetFunction::from_fn(gs, |s| prof[s.len()]);
        let g = IncompleteSetFunction::minimal(f);
        assert_eq!(
            ca_bounds(&g, &[1.0; 4]).unwrap().upper,
            ss_bounds(&g).unwrap().upper
        );
        assert_eq!(
            ca_bounds(&g, &[1.0; 4]).unwrap().lower,
            ss_bounds(&g).unwrap().lower
        );
    }

    #[test]
    fn ca_sqrt_is_bracketed() {
        let gs = ground(3);
        let w = [1.0, 2.0, 4.0];
        let f = SetFunction::from_fn(gs, |s| additive_value(&w, s).sqrt());
        let b = ca_bounds(&IncompleteSetFunction::minimal(f.clone()), &w).unwrap();
        for s in gs.subsets() {
            assert!(b.lower.get(s) <= f.get(s) + 1e-12, "{s}");
            assert!(f.get(s) <= b.upper.get(s) + 1e-12, "{s}");
        }
    }

    #[test]
    fn ca_inconsistent_equal_weights() {
        let gs = ground(2);
        let f = SetFunction::new(gs, vec![0.0, 1.0, 1.5, 2.0]).unwrap();
        let g = IncompleteSetFunction::minimal(f);
        assert!(matches!(ca_bounds(&g, &[1.0, 1.0]), Err(Error::Inconsistent(..))));
        assert!(matches!(ca_bounds(&g, &[1.0]), Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn xos_lower_is_attained() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let mut strict = 0;
        for _ in 0..60 {
            let (g, _) = crate::oracles::random_instance("xos", 4, 0.3, &mut rng).unwrap();
            let b = xos_bounds(&g).unwrap();
            let template = lower_from_upper(&g, b.upper.values(), true);
            for s in g.ground().subsets().filter(|&s| !g.is_known(s)) {
                let lo = b.lower.get(s);
                assert!(lo >= template[s.index()] - 1e-12);
                strict += usize::from(lo > template[s.index()] + 1e-9);
                // Revealing the bound keeps the data XOS-extendable.
                let mut h = (**g.underlying()).clone();
                h.set(s, lo);
                let revealed = IncompleteSetFunction::new(h, g.mask().with(s)).unwrap();
                assert!(xos_bounds(&revealed).is_ok(), "lower {lo} at {s} not attainable");
            }
        }
        assert!(strict > 0, "no instance where the template is loose");
    }

    #[test]
    fn iterative_sam_on_gap_instance() {
        let g = k0_instance(4, 1.0);
        let trace = sam_upper_iterative_trace(&g, 10, 1e-12);
        assert!(trace.len() <= 3);
        let last = trace.last().unwrap();
        for s in ground(4).subsets().skip(1) {
            assert_eq!(last.get(s), 1.0);
        }
        // Zero steps returns the seed.
        let seed = sam_upper_iterative(&g, 0, 1e-12);
        assert_eq!(&seed, &trace[0]);
    }
}
