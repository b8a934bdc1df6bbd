//! Ground sets, subsets as bitmasks, dense set functions and the incomplete
//! (masked) view of a set function.
//!
//! A subset of an `n`-element ground set is a `u32` bitmask with bit `i` set
//! iff element `i` belongs to it. The integer order of the masks is the global
//! tie-breaking order used by every argmin in the crate.

use std::fmt;
use std::ops::Index;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{min_fractional_cover, CoverInstance};

pub const MAX_GROUND: usize = 16;

/// Absolute tolerance used by membership checks, scaled by the magnitude of
/// the function being checked.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(Error::InvalidGroundSet(n));
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of subsets, `2^n`.
    pub fn num_subsets(&self) -> usize {
        1 << self.n
    }

    pub fn full(&self) -> SubsetId {
        SubsetId((1u32 << self.n) - 1)
    }

    pub fn singleton(&self, i: usize) -> SubsetId {
        debug_assert!(i < self.n);
        SubsetId(1 << i)
    }

    pub fn subsets(&self) -> impl DoubleEndedIterator<Item = SubsetId> + ExactSizeIterator {
        (0..self.num_subsets() as u32).map(SubsetId)
    }

    pub fn contains(&self, s: SubsetId) -> bool {
        (s.0 as usize) < self.num_subsets()
    }

    pub fn check(&self, s: SubsetId) -> Result<SubsetId> {
        if self.contains(s) {
            Ok(s)
        } else {
            Err(Error::SubsetOutOfRange(s.0, self.n))
        }
    }
}

impl TryFrom<usize> for GroundSet {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<GroundSet> for usize {
    fn from(g: GroundSet) -> usize {
        g.n
    }
}

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetId(pub u32);

impl SubsetId {
    pub const EMPTY: SubsetId = SubsetId(0);

    pub fn singleton(i: usize) -> Self {
        SubsetId(1 << i)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        SubsetId(elements.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: SubsetId) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: SubsetId) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn union(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 & !other.0)
    }

    /// The lowest-indexed element, if any.
    #[inline]
    pub fn lowest(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// All subsets of `self` (including `∅` and `self`), in decreasing
    /// integer order.
    pub fn subsets(self) -> impl Iterator<Item = SubsetId> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(SubsetId(cur))
        })
    }
}

impl fmt::Debug for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.elements().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Dense table of `2^n` values indexed by [`SubsetId`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetFunctionRepr", into = "SetFunctionRepr")]
pub struct SetFunction {
    ground: GroundSet,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SetFunctionRepr {
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<SetFunctionRepr> for SetFunction {
    type Error = Error;

    fn try_from(r: SetFunctionRepr) -> Result<Self> {
        SetFunction::new(GroundSet::new(r.n)?, r.values)
    }
}

impl From<SetFunction> for SetFunctionRepr {
    fn from(f: SetFunction) -> Self {
        SetFunctionRepr {
            n: f.ground.size(),
            values: f.values,
        }
    }
}

impl SetFunction {
    pub fn new(ground: GroundSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != ground.num_subsets() {
            return Err(Error::LengthMismatch {
                expected: ground.num_subsets(),
                actual: values.len(),
            });
        }
        Ok(Self { ground, values })
    }

    pub fn zeros(ground: GroundSet) -> Self {
        Self {
            ground,
            values: vec![0.0; ground.num_subsets()],
        }
    }

    pub fn from_fn(ground: GroundSet, mut f: impl FnMut(SubsetId) -> f64) -> Self {
        let values = ground.subsets().map(&mut f).collect();
        Self { ground, values }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.size()
    }

    #[inline]
    pub fn get(&self, s: SubsetId) -> f64 {
        self.values[s.index()]
    }

    #[inline]
    pub fn set(&mut self, s: SubsetId, value: f64) {
        self.values[s.index()] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Largest absolute value, used to scale tolerances.
    pub fn magnitude(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `S ↦ scale·f(S) + Σ_{i∈S} shift[i]`.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> SetFunction {
        assert_eq!(shift.len(), self.n());
        SetFunction::from_fn(self.ground, |s| {
            scale * self.get(s) + s.elements().map(|i| shift[i]).sum::<f64>()
        })
    }
}

impl Index<SubsetId> for SetFunction {
    type Output = f64;

    fn index(&self, s: SubsetId) -> &f64 {
        &self.values[s.index()]
    }
}

/// The set of subsets whose values are observable. Always contains the
/// minimal information `{∅, N} ∪ {{i}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnownMask {
    ground: GroundSet,
    flags: Vec<bool>,
    members: Vec<SubsetId>,
}

#[derive(Serialize, Deserialize)]
struct KnownMaskRepr {
    n: usize,
    known: Vec<u32>,
}

impl Serialize for KnownMask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        KnownMaskRepr {
            n: self.ground.size(),
            known: self.members.iter().map(|s| s.0).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KnownMask {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = KnownMaskRepr::deserialize(deserializer)?;
        let ground = GroundSet::new(repr.n).map_err(serde::de::Error::custom)?;
        KnownMask::from_sets(ground, repr.known.into_iter().map(SubsetId))
            .map_err(serde::de::Error::custom)
    }
}

pub fn minimal_information(ground: GroundSet) -> KnownMask {
    let mut flags = vec![false; ground.num_subsets()];
    flags[0] = true;
    flags[ground.full().index()] = true;
    for i in 0..ground.size() {
        flags[1 << i] = true;
    }
    KnownMask::from_flags(ground, flags)
}

impl KnownMask {
    fn from_flags(ground: GroundSet, flags: Vec<bool>) -> Self {
        let members = ground.subsets().filter(|s| flags[s.index()]).collect();
        Self {
            ground,
            flags,
            members,
        }
    }

    /// The minimal information plus `sets`.
    pub fn from_sets<I: IntoIterator<Item = SubsetId>>(ground: GroundSet, sets: I) -> Result<Self> {
        let mut flags = minimal_information(ground).flags;
        for s in sets {
            flags[ground.check(s)?.index()] = true;
        }
        Ok(Self::from_flags(ground, flags))
    }

    /// Every subset known.
    pub fn full(ground: GroundSet) -> Self {
        Self::from_flags(ground, vec![true; ground.num_subsets()])
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    #[inline]
    pub fn contains(&self, s: SubsetId) -> bool {
        self.flags[s.index()]
    }

    /// Known sets in increasing [`SubsetId`] order.
    pub fn members(&self) -> &[SubsetId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.members.len() == self.ground.num_subsets()
    }

    /// Subsets outside the mask, increasing.
    pub fn unknown(&self) -> Vec<SubsetId> {
        self.ground.subsets().filter(|s| !self.contains(*s)).collect()
    }

    pub fn with(&self, s: SubsetId) -> KnownMask {
        let mut out = self.clone();
        out.insert(s);
        out
    }

    pub fn with_all<I: IntoIterator<Item = SubsetId>>(&self, sets: I) -> KnownMask {
        let mut flags = self.flags.clone();
        for s in sets {
            flags[s.index()] = true;
        }
        Self::from_flags(self.ground, flags)
    }

    pub fn insert(&mut self, s: SubsetId) {
        if !self.flags[s.index()] {
            self.flags[s.index()] = true;
            let pos = self.members.partition_point(|m| *m < s);
            self.members.insert(pos, s);
        }
    }

    /// Sets revealed beyond the minimal information.
    pub fn revealed(&self) -> Vec<SubsetId> {
        let k0 = minimal_information(self.ground);
        self.members.iter().copied().filter(|s| !k0.contains(*s)).collect()
    }
}

/// A set function observed only on a [`KnownMask`].
#[derive(Clone, Debug)]
pub struct IncompleteSetFunction {
    f: Arc<SetFunction>,
    mask: KnownMask,
}

impl IncompleteSetFunction {
    pub fn new(f: impl Into<Arc<SetFunction>>, mask: KnownMask) -> Result<Self> {
        let f = f.into();
        if f.ground() != mask.ground() {
            return Err(Error::GroundMismatch(f.n(), mask.ground().size()));
        }
        Ok(Self { f, mask })
    }

    /// `f` observed on the minimal information only.
    pub fn minimal(f: impl Into<Arc<SetFunction>>) -> Self {
        let f = f.into();
        let mask = minimal_information(f.ground());
        Self { f, mask }
    }

    pub fn ground(&self) -> GroundSet {
        self.mask.ground()
    }

    pub fn n(&self) -> usize {
        self.mask.ground().size()
    }

    pub fn mask(&self) -> &KnownMask {
        &self.mask
    }

    pub fn is_known(&self, s: SubsetId) -> bool {
        self.mask.contains(s)
    }

    pub fn value(&self, s: SubsetId) -> Result<f64> {
        self.ground().check(s)?;
        if self.mask.contains(s) {
            Ok(self.f.get(s))
        } else {
            Err(Error::Unobservable(s))
        }
    }

    /// Read a value that the caller has already checked is in the mask.
    #[inline]
    pub(crate) fn known(&self, s: SubsetId) -> f64 {
        debug_assert!(self.mask.contains(s), "read of unknown set {s}");
        self.f.get(s)
    }

    /// Reveal more sets of the same underlying function.
    pub fn reveal<I: IntoIterator<Item = SubsetId>>(&self, sets: I) -> Self {
        Self {
            f: Arc::clone(&self.f),
            mask: self.mask.with_all(sets),
        }
    }

    pub fn with_mask(&self, mask: KnownMask) -> Result<Self> {
        Self::new(Arc::clone(&self.f), mask)
    }

    /// The masked values, with unknown entries set to NaN.
    pub fn observed(&self) -> SetFunction {
        SetFunction::from_fn(self.ground(), |s| if self.mask.contains(s) { self.f.get(s) } else { f64::NAN })
    }

    /// Access to the hidden complete function; for test and experiment code
    /// that plays the role of the value oracle.
    pub fn underlying(&self) -> &Arc<SetFunction> {
        &self.f
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    /// Subadditive.
    S,
    /// Subadditive and monotone.
    Sam,
    /// Fractionally subadditive (max of nonnegative additive functions).
    Xos,
    /// Symmetric submodular: `f(S) = g(|S|)`, `g` nondecreasing concave.
    Ss,
    /// Concave additive with a known additive part: `f(S) = g(a(S))`.
    Ca(Vec<f64>),
}

impl FunctionClass {
    pub fn concave_additive(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!("weight {w} is not a finite nonnegative number")));
        }
        Ok(FunctionClass::Ca(weights))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FunctionClass::S => "s",
            FunctionClass::Sam => "sam",
            FunctionClass::Xos => "xos",
            FunctionClass::Ss => "ss",
            FunctionClass::Ca(_) => "ca",
        }
    }

    /// Parse a tag; `ca` needs `weights`.
    pub fn parse(tag: &str, weights: Option<Vec<f64>>) -> Result<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "s" => Ok(FunctionClass::S),
            "sam" => Ok(FunctionClass::Sam),
            "xos" => Ok(FunctionClass::Xos),
            "ss" => Ok(FunctionClass::Ss),
            "ca" => FunctionClass::concave_additive(
                weights.ok_or_else(|| Error::InvalidConfig("class ca requires weights".into()))?,
            ),
            other => Err(Error::InvalidConfig(format!("unknown class {other:?}"))),
        }
    }

    pub(crate) fn weights_for(&self, n: usize) -> Result<Option<&[f64]>> {
        match self {
            FunctionClass::Ca(w) if w.len() != n => Err(Error::InvalidWeights(format!(
                "expected {n} weights, got {}",
                w.len()
            ))),
            FunctionClass::Ca(w) => Ok(Some(w)),
            _ => Ok(None),
        }
    }
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The affine map `g(S) = scale·f(S) + Σ_{i∈S} shift[i]` returned by
/// [`normalize`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: Vec<f64>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        Self {
            scale: 1.0,
            shift: vec![0.0; n],
        }
    }

    pub fn apply(&self, f: &SetFunction) -> SetFunction {
        f.affine(self.scale, &self.shift)
    }

    pub fn invert(&self, g: &SetFunction) -> SetFunction {
        let shift: Vec<f64> = self.shift.iter().map(|b| -b / self.scale).collect();
        g.affine(1.0 / self.scale, &shift)
    }
}

/// Map `f` affinely so that singletons are 0 and `N` is ±1.
pub fn normalize(f: &SetFunction) -> Result<(SetFunction, AffineMap)> {
    let ground = f.ground();
    let singleton_sum: f64 = (0..ground.size()).map(|i| f.get(ground.singleton(i))).sum();
    let gap = f.get(ground.full()) - singleton_sum;
    if gap == 0.0 || !gap.is_finite() {
        return Err(Error::DegenerateNormalization);
    }
    let scale = 1.0 / gap.abs();
    let shift: Vec<f64> = (0..ground.size())
        .map(|i| -(scale * f.get(ground.singleton(i))))
        .collect();
    let map = AffineMap { scale, shift };
    let mut g = map.apply(f);
    // Pin the targets exactly; the affine evaluation can be off by an ulp.
    g.set(SubsetId::EMPTY, scale * f.get(SubsetId::EMPTY));
    for i in 0..ground.size() {
        g.set(ground.singleton(i), 0.0);
    }
    g.set(ground.full(), gap.signum());
    Ok((g, map))
}

fn tol_for(f: &SetFunction) -> f64 {
    CHECK_TOL * f.magnitude().max(1.0)
}

/// Membership of a complete function in `class`.
pub fn check_class(f: &SetFunction, class: &FunctionClass) -> bool {
    match class {
        FunctionClass::S => is_subadditive(f),
        FunctionClass::Sam => is_subadditive(f) && is_monotone(f),
        FunctionClass::Xos => is_fractionally_subadditive(f),
        FunctionClass::Ss => symmetric_profile(f).is_some_and(|g| is_concave_nondecreasing(&points_of(&g), tol_for(f))),
        FunctionClass::Ca(w) => is_concave_additive(f, w),
    }
}

pub fn is_subadditive(f: &SetFunction) -> bool {
    let tol = tol_for(f);
    let full = f.ground().full();
    f.ground().subsets().all(|s| {
        full.difference(s)
            .subsets()
            .all(|t| f.get(s) + f.get(t) >= f.get(s.union(t)) - tol)
    })
}

pub fn is_monotone(f: &SetFunction) -> bool {
    let tol = tol_for(f);
    let n = f.n();
    f.ground().subsets().all(|s| {
        (0..n)
            .filter(|i| !s.contains(*i))
            .all(|i| f.get(s) <= f.get(s.union(SubsetId::singleton(i))) + tol)
    })
}

/// `f(S∪i) + f(S∪j) ≥ f(S∪{i,j}) + f(S)` for all `S` and `i ≠ j ∉ S`.
pub fn is_submodular(f: &SetFunction) -> bool {
    let tol = tol_for(f);
    local_exchange(f, |si, sj, sij, s| si + sj >= sij + s - tol)
}

pub fn is_supermodular(f: &SetFunction) -> bool {
    let tol = tol_for(f);
    local_exchange(f, |si, sj, sij, s| si + sj <= sij + s + tol)
}

fn local_exchange(f: &SetFunction, ok: impl Fn(f64, f64, f64, f64) -> bool) -> bool {
    let n = f.n();
    f.ground().subsets().all(|s| {
        (0..n).filter(|i| !s.contains(*i)).all(|i| {
            (i + 1..n).filter(|j| !s.contains(*j)).all(|j| {
                let si = s.union(SubsetId::singleton(i));
                let sj = s.union(SubsetId::singleton(j));
                ok(f.get(si), f.get(sj), f.get(si.union(sj)), f.get(s))
            })
        })
    })
}

/// XOS membership via the fractional cover characterization: for every `S`,
/// no fractional cover of `S` by nonempty subsets is cheaper than `f(S)`.
pub fn is_fractionally_subadditive(f: &SetFunction) -> bool {
    let tol = tol_for(f);
    if f.get(SubsetId::EMPTY).abs() > tol {
        return false;
    }
    let ground = f.ground();
    let nonempty: Vec<SubsetId> = ground.subsets().skip(1).collect();
    nonempty.iter().all(|&s| {
        let candidates = nonempty
            .iter()
            .filter(|t| t.intersects(s))
            .map(|&t| (t, f.get(t)))
            .collect();
        match min_fractional_cover(&CoverInstance::new(s, candidates)) {
            Ok(sol) => sol.objective >= f.get(s) - tol * 10.0,
            Err(_) => false,
        }
    })
}

/// `Some(g)` with `g[k] = f(S)` for `|S| = k` if `f` depends only on cardinality.
pub fn symmetric_profile(f: &SetFunction) -> Option<Vec<f64>> {
    let tol = tol_for(f);
    let mut profile: Vec<Option<f64>> = vec![None; f.n() + 1];
    for s in f.ground().subsets() {
        match profile[s.len()] {
            None => profile[s.len()] = Some(f.get(s)),
            Some(v) if (v - f.get(s)).abs() > tol => return None,
            Some(_) => {}
        }
    }
    profile.into_iter().collect()
}

fn points_of(g: &[f64]) -> Vec<(f64, f64)> {
    g.iter().enumerate().map(|(k, v)| (k as f64, *v)).collect()
}

/// Points sorted by strictly increasing x: values nondecreasing and chord
/// slopes nonincreasing.
pub(crate) fn is_concave_nondecreasing(points: &[(f64, f64)], tol: f64) -> bool {
    let slopes: Vec<f64> = points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let rises_ok = points.windows(2).all(|w| w[1].1 >= w[0].1 - tol);
    // Compare slopes through the value they predict at the next point so the
    // tolerance stays in value units.
    let bends_ok = points.windows(3).zip(slopes.windows(2)).all(|(p, s)| {
        let dx = p[2].0 - p[1].0;
        s[1] * dx <= s[0] * dx + tol
    });
    rises_ok && bends_ok
}

/// `(x, value, witness)` for profile-style bounds.
pub(crate) type Point = (f64, f64, SubsetId);

/// Groups `(x, value)` pairs by x (within a relative tolerance) and returns
/// the distinct points, or the pair of ids whose values disagree.
pub(crate) fn collapse_points(
    mut pts: Vec<Point>,
    tol: f64,
) -> std::result::Result<Vec<Point>, (SubsetId, SubsetId)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut out: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(last) if same_x(last.0, p.0) => {
                if (last.1 - p.1).abs() > tol {
                    return Err((last.2, p.2));
                }
            }
            _ => out.push(p),
        }
    }
    Ok(out)
}

#[inline]
pub(crate) fn same_x(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub(crate) fn additive_value(weights: &[f64], s: SubsetId) -> f64 {
    s.elements().map(|i| weights[i]).sum()
}

fn is_concave_additive(f: &SetFunction, weights: &[f64]) -> bool {
    if weights.len() != f.n() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return false;
    }
    let tol = tol_for(f);
    let pts = f
        .ground()
        .subsets()
        .map(|s| (additive_value(weights, s), f.get(s), s))
        .collect();
    match collapse_points(pts, tol) {
        Ok(pts) => {
            let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.1)).collect();
            is_concave_nondecreasing(&xy, tol)
        }
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn minimal_information_sizes() {
        let m1 = minimal_information(ground(1));
        assert_eq!(m1.members(), &[SubsetId(0), SubsetId(1)]);
        let m3 = minimal_information(ground(3));
        assert_eq!(
            m3.members(),
            &[SubsetId(0), SubsetId(1), SubsetId(2), SubsetId(4), SubsetId(7)]
        );
        assert_eq!(minimal_information(ground(5)).len(), 7);
    }

    #[test]
    fn ground_set_limits() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(17).is_err());
        assert!(GroundSet::new(16).is_ok());
    }

    #[test]
    fn subset_enumeration_covers_all_submasks() {
        let s = SubsetId(0b1011);
        let subs: Vec<u32> = s.subsets().map(|t| t.0).collect();
        assert_eq!(subs, vec![11, 10, 9, 8, 3, 2, 1, 0]);
        assert_eq!(s.elements().collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(s.to_string(), "{0,1,3}");
    }

    #[test]
    fn unknown_reads_are_errors() {
        let f = SetFunction::from_fn(ground(3), |s| s.len() as f64);
        let g = IncompleteSetFunction::minimal(f);
        assert_eq!(g.value(SubsetId(7)).unwrap(), 3.0);
        assert!(matches!(g.value(SubsetId(3)), Err(Error::Unobservable(_))));
        assert!(matches!(g.value(SubsetId(8)), Err(Error::SubsetOutOfRange(8, 3))));
    }

    #[test]
    fn normalize_two_elements() {
        let f = SetFunction::new(ground(2), vec![0.0, 2.0, 3.0, 4.0]).unwrap();
        let (g, map) = normalize(&f).unwrap();
        assert_eq!(map.scale, 1.0);
        assert_eq!(map.shift, vec![-2.0, -3.0]);
        assert_eq!(g.values(), &[0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn normalize_fixed_point() {
        let f = SetFunction::new(ground(2), vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let (g, map) = normalize(&f).unwrap();
        assert_eq!(map, AffineMap::identity(2));
        assert_eq!(g, f);
    }

    #[test]
    fn normalize_scales_top() {
        let f = SetFunction::from_fn(ground(3), |s| if s == SubsetId(7) { 5.0 } else { 0.0 });
        let (g, map) = normalize(&f).unwrap();
        assert!((map.scale - 0.2).abs() < 1e-15);
        assert_eq!(g.get(SubsetId(7)), 1.0);
    }

    #[test]
    fn normalize_degenerate() {
        let f = SetFunction::from_fn(ground(3), |s| s.len() as f64);
        assert!(matches!(normalize(&f), Err(Error::DegenerateNormalization)));
    }

    #[test]
    fn additive_is_in_every_class() {
        let f = SetFunction::from_fn(ground(4), |s| s.len() as f64);
        for class in [
            FunctionClass::S,
            FunctionClass::Sam,
            FunctionClass::Xos,
            FunctionClass::Ss,
            FunctionClass::Ca(vec![1.0; 4]),
        ] {
            assert!(check_class(&f, &class), "{class}");
        }
    }

    #[test]
    fn superadditive_pair_is_rejected() {
        let f = SetFunction::new(ground(2), vec![0.0, 1.0, 1.0, 2.5]).unwrap();
        assert!(!check_class(&f, &FunctionClass::S));
    }

    #[test]
    fn xos_separation_instance_is_xos() {
        // f(i)=f(ij)=1, f(ijk)=1.5, f(N)=2
        let f = SetFunction::from_fn(ground(4), |s| match s.len() {
            0 => 0.0,
            1 | 2 => 1.0,
            3 => 1.5,
            _ => 2.0,
        });
        assert!(check_class(&f, &FunctionClass::Xos));
        assert!(check_class(&f, &FunctionClass::Sam));
        // Raising the triples above the fractional cover of the pairs breaks XOS.
        let mut g = f.clone();
        g.set(SubsetId(0b0111), 1.6);
        assert!(!check_class(&g, &FunctionClass::Xos));
    }

    #[test]
    fn symmetric_checks() {
        let g = [0.0, 1.0, 1.8, 2.4, 2.8];
        let f = SetFunction::from_fn(ground(4), |s| g[s.len()]);
        assert!(check_class(&f, &FunctionClass::Ss));
        let convex = SetFunction::from_fn(ground(4), |s| (s.len() * s.len()) as f64);
        assert!(!check_class(&convex, &FunctionClass::Ss));
        let mut asym = f.clone();
        asym.set(SubsetId(3), 1.7);
        assert!(!check_class(&asym, &FunctionClass::Ss));
    }

    #[test]
    fn concave_additive_checks() {
        let w = vec![1.0, 2.0, 4.0];
        let f = SetFunction::from_fn(ground(3), |s| additive_value(&w, s).sqrt());
        assert!(check_class(&f, &FunctionClass::Ca(w.clone())));
        let sq = SetFunction::from_fn(ground(3), |s| additive_value(&w, s).powi(2));
        assert!(!check_class(&sq, &FunctionClass::Ca(w)));
        // Equal additive values must share f.
        let w2 = vec![1.0, 1.0, 2.0];
        let mut h = SetFunction::from_fn(ground(3), |s| additive_value(&w2, s).sqrt());
        assert!(check_class(&h, &FunctionClass::Ca(w2.clone())));
        h.set(SubsetId(0b100), h.get(SubsetId(0b100)) + 0.01);
        assert!(!check_class(&h, &FunctionClass::Ca(w2)));
    }

    #[test]
    fn mask_json_roundtrip_keeps_minimal_information() {
        let mask: KnownMask = serde_json::from_str(r#"{"n":3,"known":[3]}"#).unwrap();
        assert_eq!(mask.len(), 6);
        assert!(mask.contains(SubsetId(3)));
        let back = serde_json::to_string(&mask).unwrap();
        assert_eq!(back, r#"{"n":3,"known":[0,1,2,3,4,7]}"#);
        let f: SetFunction = serde_json::from_str(r#"{"n":1,"values":[0,2]}"#).unwrap();
        assert_eq!(f.get(SubsetId(1)), 2.0);
        assert!(serde_json::from_str::<SetFunction>(r#"{"n":2,"values":[0,2]}"#).is_err());
    }

    #[test]
    fn class_tags_parse() {
        assert_eq!(FunctionClass::parse("SAM", None).unwrap(), FunctionClass::Sam);
        assert!(FunctionClass::parse("ca", None).is_err());
        assert!(FunctionClass::concave_additive(vec![1.0, -1.0]).is_err());
        let json = serde_json::to_string(&FunctionClass::Ca(vec![1.0, 2.0])).unwrap();
        assert_eq!(json, r#"{"ca":[1.0,2.0]}"#);
        assert_eq!(serde_json::to_string(&FunctionClass::Ss).unwrap(), r#""ss""#);
    }
}
