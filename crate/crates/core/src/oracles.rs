//! Brute-force references and extension constructors.
//!
//! Nothing here shares code with the dynamic programs in
//! [`crate::completions`] or the simplex in [`crate::lp`]; the point is to
//! recompute the same quantities another way.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::completions::{bounds, s_bounds};
use crate::error::{Error, Result};
use crate::lp::CoverInstance;
use crate::setfn::{
    check_class, minimal_information, FunctionClass, GroundSet, IncompleteSetFunction, KnownMask,
    SetFunction, SubsetId,
};

pub const PARTITION_MAX_N: usize = 6;
pub const COVER_MAX_N: usize = 5;
pub const EXTENSION_MAX_N: usize = 5;
pub const RESTARTS: usize = 50;
const VERTEX_LIMIT: u128 = 5_000_000;
const AGREE_TOL: f64 = 1e-9;

fn require_n(g: &IncompleteSetFunction, limit: usize, what: &'static str) -> Result<()> {
    if g.n() > limit {
        return Err(Error::TooLarge {
            what,
            size: g.n() as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// Every set partition of `s`, blocks in order of their lowest element.
pub fn set_partitions(s: SubsetId) -> Vec<Vec<SubsetId>> {
    let elems: Vec<usize> = s.elements().collect();
    let mut out = Vec::new();
    let mut labels = vec![0usize; elems.len()];
    fn rec(i: usize, blocks: usize, labels: &mut [usize], elems: &[usize], out: &mut Vec<Vec<SubsetId>>) {
        if i == elems.len() {
            let mut parts = vec![SubsetId::EMPTY; blocks];
            for (e, &b) in elems.iter().zip(labels.iter()) {
                parts[b] = parts[b].union(SubsetId::singleton(*e));
            }
            out.push(parts);
            return;
        }
        for b in 0..=blocks {
            labels[i] = b;
            rec(i + 1, blocks.max(b + 1), labels, elems, out);
        }
    }
    rec(0, 0, &mut labels, &elems, &mut out);
    out
}

/// Cheapest partition of `s` into known blocks, by listing all partitions.
pub fn brute_partition_upper(g: &IncompleteSetFunction, s: SubsetId) -> Result<f64> {
    require_n(g, PARTITION_MAX_N, "partition enumeration (n)")?;
    g.ground().check(s)?;
    if s.is_empty() {
        return Ok(0.0);
    }
    Ok(set_partitions(s)
        .into_iter()
        .filter(|p| p.iter().all(|&b| g.is_known(b)))
        .map(|p| p.iter().map(|&b| g.value(b).expect("known")).sum::<f64>())
        .fold(f64::INFINITY, f64::min))
}

/// `max_{T∈K, S⊆T} f(T) − upper(T∖S)` with the brute-force upper.
pub fn brute_s_lower(g: &IncompleteSetFunction, s: SubsetId) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &t in g.mask().members() {
        if s.is_subset_of(t) {
            best = best.max(g.value(t)? - brute_partition_upper(g, t.difference(s))?);
        }
    }
    Ok(best)
}

/// Cheapest collection of known sets (each used once) whose union covers
/// `s`, by branch and bound over subsets of the mask.
pub fn brute_cover_upper(g: &IncompleteSetFunction, s: SubsetId) -> Result<f64> {
    require_n(g, COVER_MAX_N, "cover enumeration (n)")?;
    g.ground().check(s)?;
    let cands: Vec<(SubsetId, f64)> = g
        .mask()
        .members()
        .iter()
        .map(|&t| (t, g.value(t).expect("known")))
        .collect();
    if cands.iter().any(|&(_, v)| v < 0.0) {
        return Err(Error::NegativeValues);
    }
    let cands: Vec<(SubsetId, f64)> = cands.into_iter().filter(|(t, _)| t.intersects(s)).collect();
    fn rec(i: usize, covered: SubsetId, cost: f64, s: SubsetId, cands: &[(SubsetId, f64)], best: &mut f64) {
        if cost >= *best {
            return;
        }
        if s.is_subset_of(covered) {
            *best = cost;
            return;
        }
        if i == cands.len() {
            return;
        }
        let (t, v) = cands[i];
        rec(i + 1, covered.union(t), cost + v, s, cands, best);
        rec(i + 1, covered, cost, s, cands, best);
    }
    let mut best = f64::INFINITY;
    rec(0, SubsetId::EMPTY, 0.0, s, &cands, &mut best);
    Ok(best)
}

/// The printed monotone lower formula
/// `max(max_{Y∈K, Y⊆S} f(Y), max_{X∈K, S⊆X} f(X) − upper(X∖S))`
/// with the given upper oracle.
pub fn brute_monotone_lower(
    g: &IncompleteSetFunction,
    s: SubsetId,
    upper: impl Fn(&IncompleteSetFunction, SubsetId) -> Result<f64>,
) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &t in g.mask().members() {
        if t.is_subset_of(s) {
            best = best.max(g.value(t)?);
        }
        if s.is_subset_of(t) {
            best = best.max(g.value(t)? - upper(g, t.difference(s))?);
        }
    }
    Ok(best)
}

/// `max_{X∈K} f(X) − upper(X∖S)` with the given upper oracle.
pub fn brute_overlap_lower(
    g: &IncompleteSetFunction,
    s: SubsetId,
    upper: impl Fn(&IncompleteSetFunction, SubsetId) -> Result<f64>,
) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &t in g.mask().members() {
        best = best.max(g.value(t)? - upper(g, t.difference(s))?);
    }
    Ok(best)
}

/// Fractional cover value by enumerating every vertex of the dual polytope.
pub fn dual_vertex_cover(instance: &CoverInstance) -> Result<f64> {
    let elems: Vec<usize> = instance.elements.elements().collect();
    let k = elems.len();
    if k == 0 {
        return Ok(0.0);
    }
    if instance.candidates.iter().any(|&(_, c)| c < 0.0) {
        return Err(Error::Unbounded);
    }
    for &j in &elems {
        if !instance.candidates.iter().any(|(t, _)| t.contains(j)) {
            return Err(Error::Infeasible(j));
        }
    }
    // Rows: candidate constraints, then -y_j <= 0.
    let mut rows: Vec<(Vec<f64>, f64)> = instance
        .candidates
        .iter()
        .map(|(t, c)| (elems.iter().map(|&j| if t.contains(j) { 1.0 } else { 0.0 }).collect(), *c))
        .collect();
    for j in 0..k {
        let mut r = vec![0.0; k];
        r[j] = -1.0;
        rows.push((r, 0.0));
    }
    let total = crate::planners::binomial(rows.len(), k);
    if total > VERTEX_LIMIT {
        return Err(Error::TooLarge {
            what: "dual vertex enumeration",
            size: total,
            limit: VERTEX_LIMIT,
        });
    }
    let scale = instance.candidates.iter().fold(1.0f64, |m, &(_, c)| m.max(c));
    let tol = 1e-9 * scale;
    let mut best = f64::NEG_INFINITY;
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let a: Vec<Vec<f64>> = pick.iter().map(|&r| rows[r].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&r| rows[r].1).collect();
        if let Some(y) = solve(a, b) {
            let feasible = rows
                .iter()
                .all(|(r, c)| r.iter().zip(&y).map(|(a, y)| a * y).sum::<f64>() <= c + tol);
            if feasible {
                best = best.max(y.iter().sum());
            }
        }
        // Next k-combination of the rows.
        let m = rows.len();
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if pick[i] < m - k + i {
                pick[i] += 1;
                for j in i + 1..k {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..k {
            if r != col {
                let factor = a[r][col] / a[col][col];
                if factor != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= factor * p;
                    }
                    b[r] -= factor * b[col];
                }
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}

/// `min Σαᵢ f(Tᵢ)` over fractional covers of `s` by known sets, via
/// [`dual_vertex_cover`].
pub fn brute_fractional_upper(g: &IncompleteSetFunction, s: SubsetId) -> Result<f64> {
    let candidates = g
        .mask()
        .members()
        .iter()
        .filter(|t| t.intersects(s))
        .map(|&t| (t, g.value(t).expect("known")))
        .collect();
    dual_vertex_cover(&CoverInstance::new(s, candidates))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionSample {
    pub g: SetFunction,
    pub class: FunctionClass,
}

/// Fixes the unknown sets one at a time in random order, each to a uniform
/// value within the class bounds of the current mask, and keeps the result
/// if it passes [`check_class`].
pub fn sample_extension(g: &IncompleteSetFunction, class: &FunctionClass, seed: u64) -> Result<ExtensionSample> {
    require_n(g, EXTENSION_MAX_N, "extension sampling (n)")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESTARTS {
        if let Some(h) = sample_once(g, class, &mut rng) {
            return Ok(ExtensionSample { g: h, class: class.clone() });
        }
    }
    Err(Error::NotFound(RESTARTS))
}

fn sample_once(g: &IncompleteSetFunction, class: &FunctionClass, rng: &mut ChaCha8Rng) -> Option<SetFunction> {
    let mut order = g.mask().unknown();
    order.shuffle(rng);
    let mut values = g.observed();
    let mut mask = g.mask().clone();
    for s in order {
        let cur = IncompleteSetFunction::new(values.clone(), mask.clone()).ok()?;
        let b = bounds(&cur, class).ok()?;
        let (lo, up) = (b.lower.get(s), b.upper.get(s));
        if !(lo.is_finite() && up.is_finite()) || up < lo - AGREE_TOL {
            return None;
        }
        let v = if up > lo { rng.gen_range(lo..=up) } else { lo };
        values.set(s, v);
        mask.insert(s);
    }
    check_class(&values, class).then_some(values)
}

/// `f^S(T) = lower(T)` for `T ⊇ S` and `upper(T)` otherwise, with the S
/// bounds. It is a subadditive extension taking the lower value at `S`;
/// `f^N` is the upper function itself.
pub fn construct_s_tight_extension(g: &IncompleteSetFunction, s: SubsetId) -> Result<SetFunction> {
    g.ground().check(s)?;
    let b = s_bounds(g)?;
    Ok(SetFunction::from_fn(g.ground(), |t| {
        if s.is_subset_of(t) {
            b.lower.get(t)
        } else {
            b.upper.get(t)
        }
    }))
}

/// A class extension of `g` taking `value` at the unknown set `s`.
///
/// Tries the upper and lower functions of the mask grown by `(s, value)`
/// first and falls back to [`sample_extension`].
pub fn extension_through(
    g: &IncompleteSetFunction,
    class: &FunctionClass,
    s: SubsetId,
    value: f64,
    seed: u64,
) -> Result<SetFunction> {
    if g.is_known(s) {
        return Err(Error::InvalidConfig(format!("{s} is already known")));
    }
    let mut values = g.observed();
    values.set(s, value);
    let grown = IncompleteSetFunction::new(values, g.mask().with(s))?;
    if let Ok(b) = bounds(&grown, class) {
        for cand in [b.upper, b.lower] {
            if check_class(&cand, class) && agrees(&cand, &grown) {
                return Ok(cand);
            }
        }
    }
    if grown.n() <= EXTENSION_MAX_N {
        let h = sample_extension(&grown, class, seed)?.g;
        if agrees(&h, &grown) {
            return Ok(h);
        }
    }
    Err(Error::NotFound(RESTARTS))
}

fn agrees(h: &SetFunction, g: &IncompleteSetFunction) -> bool {
    g.mask()
        .members()
        .iter()
        .all(|&t| (h.get(t) - g.value(t).expect("known")).abs() <= AGREE_TOL * g.value(t).unwrap().abs().max(1.0))
}

/// Certificates that both bounds are attained at every unknown set.
#[derive(Clone, Debug)]
pub struct TightnessReport {
    pub checked: usize,
    /// `(set, which bound, bound value)` for every uncertified bound.
    pub failures: Vec<(SubsetId, &'static str, f64)>,
}

pub fn certify_tightness(g: &IncompleteSetFunction, class: &FunctionClass, seed: u64) -> Result<TightnessReport> {
    let b = bounds(g, class)?;
    let mut report = TightnessReport { checked: 0, failures: Vec::new() };
    for s in g.mask().unknown() {
        for (which, v) in [("lower", b.lower.get(s)), ("upper", b.upper.get(s))] {
            report.checked += 1;
            let ok = match extension_through(g, class, s, v, seed ^ s.0 as u64) {
                Ok(h) => (h.get(s) - v).abs() <= 1e-6 * v.abs().max(1.0) && check_class(&h, class),
                Err(_) => false,
            };
            if !ok {
                report.failures.push((s, which, v));
            }
        }
    }
    Ok(report)
}

/// A random member of the class named by `tag` (`s`, `sam`, `xos`, `ss`,
/// `ca`); for `ca` the drawn weights come back in the class.
pub fn random_member(tag: &str, n: usize, rng: &mut ChaCha8Rng) -> Result<(SetFunction, FunctionClass)> {
    let ground = GroundSet::new(n)?;
    let f = match tag {
        "s" => {
            // Partition closure of random costs plus a signed modular part.
            let shift: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            return Ok((partition_closure(ground, rng).affine(1.0, &shift), FunctionClass::S));
        }
        "sam" => cover_closure(ground, rng),
        "xos" => {
            let clauses: Vec<Vec<f64>> = (0..rng.gen_range(1..=4))
                .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
                .collect();
            SetFunction::from_fn(ground, |s| {
                clauses
                    .iter()
                    .map(|w| s.elements().map(|i| w[i]).sum::<f64>())
                    .fold(0.0, f64::max)
            })
        }
        "ss" => {
            let profile = concave_profile(n, rng);
            SetFunction::from_fn(ground, |s| profile[s.len()])
        }
        "ca" => {
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            let lines: Vec<(f64, f64)> = (0..3)
                .map(|i| if i == 0 { (rng.gen_range(0.5..1.5), 0.0) } else { (rng.gen::<f64>(), rng.gen_range(0.0..2.0)) })
                .collect();
            let f = SetFunction::from_fn(ground, |s| {
                let x: f64 = s.elements().map(|i| weights[i]).sum();
                lines.iter().map(|(a, b)| a * x + b).fold(f64::INFINITY, f64::min)
            });
            return Ok((f, FunctionClass::concave_additive(weights)?));
        }
        other => return Err(Error::InvalidConfig(format!("unknown class {other:?}"))),
    };
    Ok((f, FunctionClass::parse(tag, None)?))
}

fn partition_closure(ground: GroundSet, rng: &mut ChaCha8Rng) -> SetFunction {
    let mut v: Vec<f64> = ground.subsets().map(|s| if s.is_empty() { 0.0 } else { rng.gen::<f64>() * s.len() as f64 }).collect();
    for s in ground.subsets().skip(1) {
        for x in s.subsets() {
            if !x.is_empty() && x != s {
                let c = v[x.index()] + v[s.difference(x).index()];
                if c < v[s.index()] {
                    v[s.index()] = c;
                }
            }
        }
    }
    SetFunction::new(ground, v).expect("length matches")
}

/// Cheapest cover by sets with random costs; monotone and subadditive.
fn cover_closure(ground: GroundSet, rng: &mut ChaCha8Rng) -> SetFunction {
    let costs: Vec<f64> = ground.subsets().map(|s| if s.is_empty() { 0.0 } else { rng.gen::<f64>() * s.len() as f64 }).collect();
    let full = KnownMask::full(ground);
    let g = IncompleteSetFunction::new(SetFunction::new(ground, costs).expect("length matches"), full)
        .expect("same ground");
    SetFunction::new(ground, crate::completions::cover_upper(&g)).expect("length matches")
}

/// `g(0..=n)` with `g(0)=0`, nonnegative nonincreasing increments.
fn concave_profile(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut inc: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    inc.sort_by(|a, b| b.total_cmp(a));
    let mut out = vec![0.0];
    for d in inc {
        out.push(out.last().unwrap() + d);
    }
    out
}

/// `K₀` plus each other set independently with probability `p`.
pub fn random_mask(ground: GroundSet, p: f64, rng: &mut ChaCha8Rng) -> KnownMask {
    let mut mask = minimal_information(ground);
    for s in mask.unknown() {
        if rng.gen_bool(p) {
            mask.insert(s);
        }
    }
    mask
}

/// A random masked instance of a class, for property tests.
pub fn random_instance(tag: &str, n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<(IncompleteSetFunction, FunctionClass)> {
    let (f, class) = random_member(tag, n, rng)?;
    let mask = random_mask(f.ground(), p, rng);
    Ok((IncompleteSetFunction::new(f, mask)?, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completions::{sam_bounds, xos_bounds};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=5).map(|k| set_partitions(SubsetId((1 << k) - 1)).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn random_members_are_in_class() {
        let mut r = rng(1);
        for tag in ["s", "sam", "xos", "ss", "ca"] {
            for n in 1..=5 {
                let (f, class) = random_member(tag, n, &mut r).unwrap();
                assert!(check_class(&f, &class), "{tag} n={n}");
            }
        }
    }

    #[test]
    fn brute_uppers_on_small_examples() {
        let gs = GroundSet::new(3).unwrap();
        let f = SetFunction::from_fn(gs, |s| match s.len() {
            0 => 0.0,
            1 => 1.0,
            3 => 2.0,
            _ => f64::NAN,
        });
        let g = IncompleteSetFunction::minimal(f);
        for p in [3u32, 5, 6] {
            assert_eq!(brute_partition_upper(&g, SubsetId(p)).unwrap(), 2.0);
            assert_eq!(brute_s_lower(&g, SubsetId(p)).unwrap(), 1.0);
        }
        assert_eq!(brute_partition_upper(&g, SubsetId(1)).unwrap(), 1.0);
        let f1 = SetFunction::from_fn(gs, |s| if s.is_empty() { 0.0 } else { 1.0 });
        let g1 = IncompleteSetFunction::minimal(f1);
        for s in gs.subsets().skip(1) {
            assert_eq!(brute_cover_upper(&g1, s).unwrap(), 1.0);
        }
    }

    #[test]
    fn dual_vertices_match_simplex() {
        let mut r = rng(2);
        for _ in 0..30 {
            let (g, _) = random_instance("xos", 4, 0.4, &mut r).unwrap();
            let b = xos_bounds(&g).unwrap();
            for s in g.mask().unknown() {
                let v = brute_fractional_upper(&g, s).unwrap();
                assert!((v - b.upper.get(s)).abs() < 1e-9, "{s}");
            }
        }
    }

    #[test]
    fn s_tight_extension_attains_bounds() {
        let mut r = rng(3);
        for _ in 0..20 {
            let (g, _) = random_instance("s", 4, 0.3, &mut r).unwrap();
            let b = s_bounds(&g).unwrap();
            for s in g.mask().unknown() {
                let h = construct_s_tight_extension(&g, s).unwrap();
                assert!(check_class(&h, &FunctionClass::S));
                assert!((h.get(s) - b.lower.get(s)).abs() < 1e-12);
            }
            let top = construct_s_tight_extension(&g, g.ground().full()).unwrap();
            assert_eq!(top, b.upper);
        }
    }

    #[test]
    fn sampled_extensions_lie_within_bounds() {
        let mut r = rng(4);
        for tag in ["s", "sam", "xos", "ss", "ca"] {
            let (g, class) = random_instance(tag, 4, 0.3, &mut r).unwrap();
            let b = bounds(&g, &class).unwrap();
            for seed in 0..5 {
                let h = sample_extension(&g, &class, seed).unwrap().g;
                for s in g.ground().subsets() {
                    assert!(b.lower.get(s) <= h.get(s) + 1e-9 && h.get(s) <= b.upper.get(s) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn full_mask_extension_is_identity() {
        let mut r = rng(5);
        let (f, class) = random_member("sam", 3, &mut r).unwrap();
        let g = IncompleteSetFunction::new(f.clone(), KnownMask::full(f.ground())).unwrap();
        assert_eq!(sample_extension(&g, &class, 0).unwrap().g, f);
        assert!(sam_bounds(&g).is_ok());
    }
}
