//! The exceptional curve families f^-n({y = 0}) and f^n({y = -x}).
//!
//! Both are parametrised by t: f^-n(t, 0) and f^n(t, -t). Writing
//! g_j(t) = f^-j_x(t, 0) + f^-j_y(t, 0), the level-n curves break at the roots
//! of g_0, ..., g_{n-1}; each g_j is increasing with exactly one root on every
//! component of the level-j parameter line, so level n has 2^n - 1 breaks.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::map::{apply_f, apply_f_inv, ExactPoint, FloatPoint, HomPoint, MapConfig, MapError, Point};
use crate::scalar::{format_rational, int, midpoint, rat, rational_to_f64, simplest_between, Rational, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    PreimageOfYZero,
    ImageOfAntiDiagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MirrorSide {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Approach {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CurvesError {
    #[error("parameter hits a discontinuity at step {level}: {source}")]
    DiscontinuityHit { level: usize, source: MapError },
    #[error(transparent)]
    Map(MapError),
    #[error("no sign change found for {what}")]
    BracketNotFound { what: String },
    #[error("{0} is not a discontinuity parameter at this level")]
    NotADiscontinuity(String),
}

fn lift(level: usize) -> impl Fn(MapError) -> CurvesError {
    move |e| match e {
        MapError::DiscontinuityHit { .. } => CurvesError::DiscontinuityHit { level, source: e },
        other => CurvesError::Map(other),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvesConfig {
    pub map: MapConfig,
    /// Target bracket width for roots.
    pub bracket_width: Rational,
    /// Sweeps for sign changes stay within |t| <= this bound.
    pub sweep_bound: Rational,
}

impl Default for CurvesConfig {
    fn default() -> Self {
        // 2^-40 < 1e-12
        CurvesConfig {
            map: MapConfig::default(),
            bracket_width: Rational::new(BigInt::one(), BigInt::one() << 40usize),
            sweep_bound: int(1_000_000),
        }
    }
}

/// Exact bracket [lo, hi] around a root; lo == hi when the root is rational and was hit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootBracket {
    #[serde(with = "crate::suite::rational_text")]
    pub lo: Rational,
    #[serde(with = "crate::suite::rational_text")]
    pub hi: Rational,
}

impl RootBracket {
    pub fn exact(q: Rational) -> Self {
        RootBracket { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        rational_to_f64(&midpoint(&self.lo, &self.hi))
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn negate(&self) -> Self {
        RootBracket { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }
}

/// A break point of the level-n parameter line: a root of g_order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscontinuityParam {
    pub bracket: RootBracket,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscontinuitySet {
    pub level: usize,
    pub params: Vec<DiscontinuityParam>,
}

impl DiscontinuitySet {
    /// Parameter intervals between consecutive breaks, with open ends at infinity.
    pub fn components(&self) -> Vec<(Option<RootBracket>, Option<RootBracket>)> {
        let mut out = Vec::with_capacity(self.params.len() + 1);
        let mut prev: Option<RootBracket> = None;
        for p in &self.params {
            out.push((prev.clone(), Some(p.bracket.clone())));
            prev = Some(p.bracket.clone());
        }
        out.push((prev, None));
        out
    }

    pub fn brackets(&self) -> impl Iterator<Item = &RootBracket> {
        self.params.iter().map(|p| &p.bracket)
    }
}

/// One smooth piece of a level-n curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveBranch {
    pub family: Family,
    pub level: usize,
    /// None stands for -infinity.
    pub lower: Option<RootBracket>,
    /// None stands for +infinity.
    pub upper: Option<RootBracket>,
    pub side: MirrorSide,
}

impl CurveBranch {
    /// Parameter for u in (0, 1), increasing in u and covering the branch.
    pub fn param_at(&self, u: &Rational) -> Rational {
        let one = Rational::one();
        match (&self.lower, &self.upper) {
            (Some(a), Some(b)) => &a.hi + (&b.lo - &a.hi) * u,
            (Some(a), None) => &a.hi + u / (&one - u),
            (None, Some(b)) => &b.lo - (&one - u) / u,
            (None, None) => (u - rat(1, 2)) / (u * (&one - u)),
        }
    }

    pub fn param_at_f64(&self, u: f64) -> f64 {
        param_from_ends(self.float_ends(), u)
    }

    /// Branch ends as floats, for repeated float evaluation.
    pub fn float_ends(&self) -> (Option<f64>, Option<f64>) {
        (self.lower.as_ref().map(|a| rational_to_f64(&a.hi)), self.upper.as_ref().map(|b| rational_to_f64(&b.lo)))
    }

    /// `count` exact parameters strictly inside the branch, increasing.
    pub fn sample_params(&self, count: usize) -> Vec<Rational> {
        (1..=count).map(|k| self.param_at(&rat(k as i64, count as i64 + 1))).collect()
    }
}

/// Float counterpart of [`CurveBranch::param_at`] from precomputed ends.
pub fn param_from_ends(ends: (Option<f64>, Option<f64>), u: f64) -> f64 {
    match ends {
        (Some(lo), Some(hi)) => lo + (hi - lo) * u,
        (Some(lo), None) => lo + u / (1.0 - u),
        (None, Some(hi)) => hi - (1.0 - u) / u,
        (None, None) => (u - 0.5) / (u * (1.0 - u)),
    }
}

/// f^-n(t, 0) on homogeneous triples.
pub fn preimage_hom(n: usize, t: &Rational, cfg: &MapConfig) -> Result<HomPoint, CurvesError> {
    let mut p = HomPoint::from_point(&Point::new(t.clone(), Rational::zero()));
    for j in 0..n {
        p = p.backward(cfg).map_err(lift(j))?;
    }
    Ok(p)
}

/// f^-n(t, 0) in exact arithmetic.
pub fn preimage_point(n: usize, t: &Rational, cfg: &MapConfig) -> Result<ExactPoint, CurvesError> {
    Ok(preimage_hom(n, t, cfg)?.to_point())
}

pub fn preimage_point_f64(n: usize, t: f64, cfg: &MapConfig) -> Result<FloatPoint, CurvesError> {
    let mut p = Point::new(t, 0.0);
    for j in 0..n {
        p = apply_f_inv(&p, cfg).map_err(lift(j))?;
    }
    Ok(p)
}

/// f^n(t, -t) by forward iteration.
pub fn image_hom(n: usize, t: &Rational, cfg: &MapConfig) -> Result<HomPoint, CurvesError> {
    let mut p = HomPoint::from_point(&Point::new(t.clone(), -t.clone()));
    for j in 0..n {
        p = p.forward(cfg).map_err(lift(j))?;
    }
    Ok(p)
}

pub fn image_point(n: usize, t: &Rational, cfg: &MapConfig) -> Result<ExactPoint, CurvesError> {
    Ok(image_hom(n, t, cfg)?.to_point())
}

pub fn image_point_f64(n: usize, t: f64, cfg: &MapConfig) -> Result<FloatPoint, CurvesError> {
    let mut p = Point::new(t, -t);
    for j in 0..n {
        p = apply_f(&p, cfg).map_err(lift(j))?;
    }
    Ok(p)
}

pub fn curve_point(family: Family, n: usize, t: &Rational, cfg: &MapConfig) -> Result<HomPoint, CurvesError> {
    match family {
        Family::PreimageOfYZero => preimage_hom(n, t, cfg),
        Family::ImageOfAntiDiagonal => image_hom(n, t, cfg),
    }
}

pub fn curve_point_f64(family: Family, n: usize, t: f64, cfg: &MapConfig) -> Result<FloatPoint, CurvesError> {
    match family {
        Family::PreimageOfYZero => preimage_point_f64(n, t, cfg),
        Family::ImageOfAntiDiagonal => image_point_f64(n, t, cfg),
    }
}

/// f^n(t, -t) == (f^-n_x(t, 0), -f^-(n+1)_y(t, 0)), exactly.
pub fn image_identity_check(n: usize, t: &Rational, cfg: &MapConfig) -> Result<bool, CurvesError> {
    let lhs = image_point(n, t, cfg)?;
    let pre = preimage_hom(n, t, cfg)?;
    let next = pre.backward(cfg).map_err(lift(n))?;
    let rhs = Point::new(pre.to_point().x, -next.to_point().y);
    Ok(lhs == rhs)
}

/// f^-n_x(t, 0) == t - sum_{j=1..n} 1 / f^-j_y(t, 0), on reduced rationals.
pub fn telescoped_x_check(n: usize, t: &Rational, cfg: &MapConfig) -> Result<bool, CurvesError> {
    let mut p = Point::new(t.clone(), Rational::zero());
    let mut sum = Rational::zero();
    for j in 0..n {
        p = apply_f_inv(&p, cfg).map_err(lift(j))?;
        sum += p.y.recip();
    }
    Ok(p.x == t - sum)
}

/// Sign of g_j(t) = f^-j_x(t, 0) + f^-j_y(t, 0).
pub fn g_sign(j: usize, t: &Rational, cfg: &MapConfig) -> Result<Sign, CurvesError> {
    Ok(preimage_hom(j, t, cfg)?.sign_sum())
}

/// Certified bisection for an increasing function known by its sign, with
/// sign(lo) < 0 < sign(hi). A rational root is returned as an exact bracket.
pub fn bisect_increasing<E, F>(f: F, mut lo: Rational, mut hi: Rational, width: &Rational) -> Result<RootBracket, E>
where
    F: Fn(&Rational) -> Result<Sign, E>,
{
    while &(&hi - &lo) > width {
        let mid = midpoint(&lo, &hi);
        match f(&mid)? {
            Sign::Zero => return Ok(RootBracket::exact(mid)),
            Sign::Negative => lo = mid,
            Sign::Positive => hi = mid,
        }
    }
    let q = simplest_between(&lo, &hi);
    if f(&q)? == Sign::Zero {
        return Ok(RootBracket::exact(q));
    }
    Ok(RootBracket { lo, hi })
}

/// Locates the single root of an increasing function on the open component
/// (a, b), probing geometrically toward each end for the sign change.
pub fn root_on_component<F>(
    f: F,
    a: Option<&RootBracket>,
    b: Option<&RootBracket>,
    cfg: &CurvesConfig,
    what: &str,
) -> Result<RootBracket, CurvesError>
where
    F: Fn(&Rational) -> Result<Sign, CurvesError>,
{
    let not_found = || CurvesError::BracketNotFound { what: what.to_string() };
    let probe = |t: &Rational| -> Result<Option<Sign>, CurvesError> {
        match f(t) {
            Ok(s) => Ok(Some(s)),
            Err(CurvesError::DiscontinuityHit { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let span = match (a, b) {
        (Some(a), Some(b)) => &b.lo - &a.hi,
        _ => Rational::one(),
    };
    let mut candidates_lo: Vec<Rational> = Vec::new();
    let mut candidates_hi: Vec<Rational> = Vec::new();
    for k in 1..=120u32 {
        let scale = Rational::new(BigInt::one(), BigInt::one() << k as usize);
        let grow = Rational::from_integer(BigInt::one() << (k as usize - 1));
        match a {
            Some(a) => candidates_lo.push(&a.hi + &span * &scale),
            None => {
                let t = match b {
                    Some(b) => &b.lo - &grow,
                    None => -grow.clone(),
                };
                if t.abs() <= cfg.sweep_bound {
                    candidates_lo.push(t);
                }
            }
        }
        match b {
            Some(b) => candidates_hi.push(&b.lo - &span * &scale),
            None => {
                let t = match a {
                    Some(a) => &a.hi + &grow,
                    None => grow.clone(),
                };
                if t.abs() <= cfg.sweep_bound {
                    candidates_hi.push(t);
                }
            }
        }
    }
    let mut lo = None;
    for t in &candidates_lo {
        match probe(t)? {
            Some(Sign::Zero) => return Ok(RootBracket::exact(t.clone())),
            Some(Sign::Negative) => {
                lo = Some(t.clone());
                break;
            }
            _ => {}
        }
    }
    let mut hi = None;
    for t in &candidates_hi {
        match probe(t)? {
            Some(Sign::Zero) => return Ok(RootBracket::exact(t.clone())),
            Some(Sign::Positive) => {
                hi = Some(t.clone());
                break;
            }
            _ => {}
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo < hi => bisect_increasing(&f, lo, hi, &cfg.bracket_width),
        _ => Err(not_found()),
    }
}

/// Breaks of the level-n parameter line, built level by level.
pub fn discontinuity_params(n: usize, cfg: &CurvesConfig) -> Result<DiscontinuitySet, CurvesError> {
    let mut set = DiscontinuitySet { level: 0, params: Vec::new() };
    for j in 0..n {
        let mut new = Vec::new();
        for (a, b) in set.components() {
            let what = format!("g_{j} on a level-{j} component");
            let br = root_on_component(|t| g_sign(j, t, &cfg.map), a.as_ref(), b.as_ref(), cfg, &what)?;
            new.push(DiscontinuityParam { bracket: br, order: j });
        }
        set.params.extend(new);
        set.params.sort_by(|p, q| p.bracket.lo.cmp(&q.bracket.lo));
        set.level = j + 1;
    }
    Ok(set)
}

/// Breaks inside [lo, hi] only.
pub fn discontinuity_params_in(
    n: usize,
    lo: &Rational,
    hi: &Rational,
    cfg: &CurvesConfig,
) -> Result<DiscontinuitySet, CurvesError> {
    let mut set = discontinuity_params(n, cfg)?;
    set.params.retain(|p| &p.bracket.hi >= lo && &p.bracket.lo <= hi);
    Ok(set)
}

pub fn branches_from(family: Family, set: &DiscontinuitySet) -> Vec<CurveBranch> {
    set.components()
        .into_iter()
        .map(|(lower, upper)| {
            let side = match &lower {
                Some(a) if !a.lo.is_negative() => MirrorSide::Positive,
                _ => MirrorSide::Negative,
            };
            CurveBranch { family, level: set.level, lower, upper, side }
        })
        .collect()
}

pub fn branches(family: Family, level: usize, cfg: &CurvesConfig) -> Result<Vec<CurveBranch>, CurvesError> {
    Ok(branches_from(family, &discontinuity_params(level, cfg)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub family: Family,
    pub level: usize,
    pub samples: usize,
    pub pass: bool,
    /// (sample index, coordinate) of the first pair out of order.
    pub first_violation: Option<(usize, char)>,
}

/// Exact check that x increases along the branch and y increases (pre-images)
/// or decreases (images).
pub fn monotonicity_check(
    branch: &CurveBranch,
    samples: usize,
    cfg: &MapConfig,
) -> Result<MonotonicityReport, CurvesError> {
    let pts: Vec<HomPoint> = branch
        .sample_params(samples)
        .iter()
        .map(|t| curve_point(branch.family, branch.level, t, cfg))
        .collect::<Result<_, _>>()?;
    let want_y = match branch.family {
        Family::PreimageOfYZero => Ordering::Less,
        Family::ImageOfAntiDiagonal => Ordering::Greater,
    };
    let mut first_violation = None;
    for (k, w) in pts.windows(2).enumerate() {
        if w[0].cmp_x(&w[1]) != Ordering::Less {
            first_violation = Some((k, 'x'));
            break;
        }
        if w[0].cmp_y(&w[1]) != want_y {
            first_violation = Some((k, 'y'));
            break;
        }
    }
    Ok(MonotonicityReport {
        family: branch.family,
        level: branch.level,
        samples,
        pass: first_violation.is_none(),
        first_violation,
    })
}

/// A level-n sample and the level-(n-1) point at the same height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedGap {
    pub upper_branch: usize,
    pub lower_branch: usize,
    pub t_upper: f64,
    pub t_lower: f64,
    pub y: f64,
    /// x on the level-(n-1) curve minus x on the level-n curve.
    pub gap: f64,
}

fn y_increasing(family: Family) -> bool {
    family == Family::PreimageOfYZero
}

/// For each level-n sample, the level-(n-1) points at the same y.
pub fn matched_gaps(
    family: Family,
    n: usize,
    samples: usize,
    cfg: &CurvesConfig,
) -> Result<Vec<MatchedGap>, CurvesError> {
    assert!(n >= 2, "needs two consecutive levels");
    let upper = branches(family, n, cfg)?;
    let lower = branches(family, n - 1, cfg)?;
    let m = &cfg.map;
    let ends_up: Vec<_> = upper.iter().map(CurveBranch::float_ends).collect();
    let ends_lo: Vec<_> = lower.iter().map(CurveBranch::float_ends).collect();
    let eval = |level: usize, ends: (Option<f64>, Option<f64>), u: f64| {
        curve_point_f64(family, level, param_from_ends(ends, u), m).ok()
    };
    let edge = 1e-9;
    let inc = y_increasing(family);
    let ranges: Vec<Option<(f64, f64)>> = ends_lo
        .iter()
        .map(|&e| {
            let (a, b) = (eval(n - 1, e, edge)?, eval(n - 1, e, 1.0 - edge)?);
            Some(if inc { (a.y, b.y) } else { (b.y, a.y) })
        })
        .collect();
    let mut out = Vec::new();
    for (ui, &ue) in ends_up.iter().enumerate() {
        for k in 1..=samples {
            let u = k as f64 / (samples + 1) as f64;
            let Some(p) = eval(n, ue, u) else { continue };
            for (li, &le) in ends_lo.iter().enumerate() {
                // Solve y_lower(v) = p.y for v in (0, 1); y is monotone in v.
                let Some((ylo, yhi)) = ranges[li] else { continue };
                if !(ylo < p.y && p.y < yhi) {
                    continue;
                }
                let (mut v0, mut v1) = (edge, 1.0 - edge);
                for _ in 0..200 {
                    let vm = 0.5 * (v0 + v1);
                    let Some(q) = eval(n - 1, le, vm) else { break };
                    if (q.y < p.y) == inc {
                        v0 = vm;
                    } else {
                        v1 = vm;
                    }
                    if v1 - v0 < 1e-16 {
                        break;
                    }
                }
                let v = 0.5 * (v0 + v1);
                let Some(q) = eval(n - 1, le, v) else { continue };
                out.push(MatchedGap {
                    upper_branch: ui,
                    lower_branch: li,
                    t_upper: param_from_ends(ue, u),
                    t_lower: param_from_ends(le, v),
                    y: p.y,
                    gap: q.x - p.x,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub family: Family,
    pub level: usize,
    pub samples_per_branch: usize,
    pub matched_pairs: usize,
    pub min_gap: f64,
    /// Branch pairs whose horizontal gap changes sign between samples.
    pub sign_changes: usize,
    pub pass: bool,
}

/// Sampled witness that level n and level n-1 curves do not meet: at matched
/// heights the horizontal gap never changes sign along a branch and stays above `min_gap`.
pub fn disjointness_check(
    family: Family,
    n: usize,
    samples: usize,
    min_gap: f64,
    cfg: &CurvesConfig,
) -> Result<DisjointnessReport, CurvesError> {
    let gaps = matched_gaps(family, n, samples, cfg)?;
    let mut sign_changes = 0;
    let mut last: std::collections::HashMap<(usize, usize), f64> = std::collections::HashMap::new();
    let mut observed = f64::INFINITY;
    for g in &gaps {
        observed = observed.min(g.gap.abs());
        if let Some(prev) = last.insert((g.upper_branch, g.lower_branch), g.gap) {
            if prev.signum() != g.gap.signum() {
                sign_changes += 1;
            }
        }
    }
    Ok(DisjointnessReport {
        family,
        level: n,
        samples_per_branch: samples,
        matched_pairs: gaps.len(),
        min_gap: observed,
        sign_changes,
        pass: !gaps.is_empty() && sign_changes == 0 && observed > min_gap,
    })
}

/// Expected limiting behaviour of one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    PlusInfinity,
    MinusInfinity,
    ZeroFromAbove,
    ZeroFromBelow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LimitTarget {
    PlusInfinity,
    MinusInfinity,
    /// A parameter inside (or within 1e-9 of) a bracket of the level-n set.
    Param(#[serde(with = "crate::suite::rational_text")] Rational),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub level: usize,
    pub target: String,
    pub side: Option<Approach>,
    /// Which g_j the target is a root of (None at infinity).
    pub order: Option<usize>,
    pub expected_x: Trend,
    pub expected_y: Trend,
    /// (distance or |t|, x, y) per probe.
    pub probes: Vec<(f64, f64, f64)>,
    pub pass_x: bool,
    pub pass_y: bool,
}

impl LimitReport {
    pub fn pass(&self) -> bool {
        self.pass_x && self.pass_y
    }
}

/// At +-infinity both coordinates follow t. At a root of g_{n-1} x flips from
/// +inf (left) to -inf (right) while y passes through 0. At a root of an older
/// g_j, y flips from +inf to -inf as well.
pub fn expected_limits(level: usize, order: Option<usize>, side: Approach) -> (Trend, Trend) {
    match order {
        None => match side {
            Approach::Right => (Trend::PlusInfinity, Trend::PlusInfinity),
            Approach::Left => (Trend::MinusInfinity, Trend::MinusInfinity),
        },
        Some(j) => {
            let newest = j + 1 == level;
            match (side, newest) {
                (Approach::Left, true) => (Trend::PlusInfinity, Trend::ZeroFromBelow),
                (Approach::Right, true) => (Trend::MinusInfinity, Trend::ZeroFromAbove),
                (Approach::Left, false) => (Trend::PlusInfinity, Trend::PlusInfinity),
                (Approach::Right, false) => (Trend::MinusInfinity, Trend::MinusInfinity),
            }
        }
    }
}

fn trend_holds(trend: Trend, values: &[f64]) -> bool {
    let tail = &values[values.len() / 2..];
    let last = *tail.last().expect("probes");
    match trend {
        Trend::PlusInfinity | Trend::MinusInfinity => {
            let want = if trend == Trend::PlusInfinity { 1.0 } else { -1.0 };
            tail.iter().all(|v| v.signum() == want)
                && tail.windows(2).all(|w| w[1].abs() > w[0].abs())
                && last.abs() > 1e4
        }
        Trend::ZeroFromAbove | Trend::ZeroFromBelow => {
            let want = if trend == Trend::ZeroFromAbove { 1.0 } else { -1.0 };
            tail.iter().all(|v| v.signum() == want && *v != 0.0)
                && tail.windows(2).all(|w| w[1].abs() < w[0].abs())
                && last.abs() < 1e-4
        }
    }
}

/// Probes f^-n(t, 0) geometrically toward `target` and compares with the
/// expected limits. `side` is ignored at infinity.
pub fn boundary_limits_check(
    n: usize,
    target: &LimitTarget,
    side: Approach,
    probe_count: usize,
    cfg: &CurvesConfig,
) -> Result<LimitReport, CurvesError> {
    let probe_count = probe_count.max(4);
    let m = &cfg.map;
    let (order, side_used, ts, dists): (Option<usize>, Option<Approach>, Vec<Rational>, Vec<f64>) = match target {
        LimitTarget::PlusInfinity | LimitTarget::MinusInfinity => {
            let s = if matches!(target, LimitTarget::PlusInfinity) { 1 } else { -1 };
            let ts: Vec<Rational> = (1..=probe_count).map(|k| int(s) * int(10).pow(k as i32)).collect();
            let d = ts.iter().map(|t| rational_to_f64(t).abs()).collect();
            (None, None, ts, d)
        }
        LimitTarget::Param(t) => {
            let set = discontinuity_params(n, cfg)?;
            let slack = rat(1, 1_000_000_000);
            let idx = set
                .params
                .iter()
                .position(|p| &p.bracket.lo - &slack <= *t && *t <= &p.bracket.hi + &slack)
                .ok_or_else(|| CurvesError::NotADiscontinuity(format_rational(t)))?;
            let p = &set.params[idx];
            // Stay well inside the neighbouring component.
            let room = match side {
                Approach::Left => idx.checked_sub(1).map(|k| &p.bracket.lo - &set.params[k].bracket.hi),
                Approach::Right => set.params.get(idx + 1).map(|q| &q.bracket.lo - &p.bracket.hi),
            }
            .unwrap_or_else(Rational::one)
            .min(Rational::one());
            let mut ts = Vec::new();
            let mut d = Vec::new();
            for k in 1..=probe_count {
                let delta = &room / int(10).pow(k as i32);
                d.push(rational_to_f64(&delta));
                ts.push(match side {
                    Approach::Left => &p.bracket.lo - &delta,
                    Approach::Right => &p.bracket.hi + &delta,
                });
            }
            (Some(p.order), Some(side), ts, d)
        }
    };
    let effective_side = match target {
        LimitTarget::PlusInfinity => Approach::Right,
        LimitTarget::MinusInfinity => Approach::Left,
        LimitTarget::Param(_) => side,
    };
    let (ex, ey) = expected_limits(n, order, effective_side);
    let mut probes = Vec::new();
    for (t, d) in ts.iter().zip(dists) {
        let p = preimage_hom(n, t, m)?.to_f64();
        probes.push((d, p.x, p.y));
    }
    let xs: Vec<f64> = probes.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = probes.iter().map(|p| p.2).collect();
    Ok(LimitReport {
        level: n,
        target: match target {
            LimitTarget::PlusInfinity => "+inf".into(),
            LimitTarget::MinusInfinity => "-inf".into(),
            LimitTarget::Param(t) => format_rational(t),
        },
        side: side_used,
        order,
        expected_x: ex,
        expected_y: ey,
        pass_x: trend_holds(ex, &xs),
        pass_y: trend_holds(ey, &ys),
        probes,
    })
}

/// Largest root of each g_j, j < count: the left ends of the all-positive branches.
pub fn largest_roots(count: usize, cfg: &CurvesConfig) -> Result<Vec<RootBracket>, CurvesError> {
    let mut out: Vec<RootBracket> = Vec::new();
    for j in 0..count {
        let prev = out.last().cloned();
        let what = format!("largest root of g_{j}");
        out.push(root_on_component(|t| g_sign(j, t, &cfg.map), prev.as_ref(), None, cfg, &what)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCrossing {
    pub n: usize,
    pub t: RootBracket,
    /// Exact enclosure of f^-n_y(t_n, 0).
    pub y: RootBracket,
    pub y_approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCrossingReport {
    pub rows: Vec<ZeroCrossing>,
    pub strictly_increasing: bool,
}

/// For n = 1..=max_n, the parameter on the all-positive branch where the
/// level-n curve meets x = 0, and the height there.
pub fn zero_crossing_sequence(max_n: usize, cfg: &CurvesConfig) -> Result<ZeroCrossingReport, CurvesError> {
    let roots = largest_roots(max_n, cfg)?;
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let left = &roots[n - 1];
        let m = &cfg.map;
        let what = format!("x = 0 on the all-positive level-{n} branch");
        let t = root_on_component(|t| Ok(preimage_hom(n, t, m)?.sign_x()), Some(left), None, cfg, &what)?;
        let ylo = preimage_point(n, &t.lo, m)?.y;
        let yhi = preimage_point(n, &t.hi, m)?.y;
        let y = RootBracket { lo: ylo.clone().min(yhi.clone()), hi: ylo.max(yhi) };
        let y_approx = y.mid_f64();
        rows.push(ZeroCrossing { n, t, y, y_approx });
    }
    let strictly_increasing = rows.windows(2).all(|w| w[0].y.hi < w[1].y.lo);
    Ok(ZeroCrossingReport { rows, strictly_increasing })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveHeight {
    pub n: usize,
    /// max |y| over the sampled abscissae.
    pub height: f64,
    pub at_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveHeightsReport {
    pub abscissae: Vec<f64>,
    pub rows: Vec<CurveHeight>,
    pub decreasing: bool,
}

/// Default abscissae for the height samples: 0, 1/4, ..., 2.
pub fn default_abscissae() -> Vec<Rational> {
    (0..=8).map(|k| rat(k, 4)).collect()
}

/// Heights of the curves f^-(n+1)(t, 0), t in (r_{n-1}, r_n): the parameters
/// whose n-th pre-image is the first to cross the anti-diagonal.
/// Each curve is a graph over the whole x axis; it is sampled at fixed x.
pub fn d_curve_heights(
    max_n: usize,
    abscissae: &[Rational],
    cfg: &CurvesConfig,
) -> Result<CurveHeightsReport, CurvesError> {
    let roots = largest_roots(max_n + 1, cfg)?;
    let m = &cfg.map;
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let (a, b) = (&roots[n - 1], &roots[n]);
        let mut best = CurveHeight { n, height: -1.0, at_x: 0.0 };
        for xs in abscissae {
            let what = format!("x = {} on D_{n}", format_rational(xs));
            let t =
                root_on_component(|t| Ok(preimage_hom(n + 1, t, m)?.sign_x_minus(xs)), Some(a), Some(b), cfg, &what)?;
            let y = preimage_hom(n + 1, &midpoint(&t.lo, &t.hi), m)?.to_f64().y;
            if y.abs() > best.height {
                best = CurveHeight { n, height: y.abs(), at_x: rational_to_f64(xs) };
            }
        }
        rows.push(best);
    }
    let decreasing = rows.windows(2).all(|w| w[1].height < w[0].height);
    Ok(CurveHeightsReport { abscissae: abscissae.iter().map(rational_to_f64).collect(), rows, decreasing })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct T0Report {
    /// Smallest positive root of f^-2_x(t, 0), i.e. of 2t^4 - 4t^2 + 1.
    pub t0: RootBracket,
    pub x_sign_lo: i64,
    pub x_sign_hi: i64,
    /// Enclosure of f^-2_y(t0, 0).
    pub y: RootBracket,
    pub y_approx: f64,
    pub note: String,
}

/// Locates t0 on (0, r_1) and the height of the level-2 curve there.
pub fn t0_check(cfg: &CurvesConfig) -> Result<T0Report, CurvesError> {
    let roots = largest_roots(2, cfg)?;
    let m = &cfg.map;
    let t0 = root_on_component(|t| Ok(preimage_hom(2, t, m)?.sign_x()), Some(&roots[0]), Some(&roots[1]), cfg, "t0")?;
    let lo = preimage_hom(2, &t0.lo, m)?;
    let hi = preimage_hom(2, &t0.hi, m)?;
    let (ya, yb) = (lo.to_point().y, hi.to_point().y);
    let y = RootBracket { lo: ya.clone().min(yb.clone()), hi: ya.max(yb) };
    let y_approx = y.mid_f64();
    Ok(T0Report {
        x_sign_lo: lo.sign_x().as_i64(),
        x_sign_hi: hi.sign_x().as_i64(),
        t0,
        y,
        y_approx,
        note: "2*t0 - 1/t0 = sqrt(4 - 2*sqrt(2)) - sqrt(2 + sqrt(2)) ~ -0.7653669; the closed form \
               sqrt(4 - sqrt(2)) - sqrt(2 + sqrt(2)) ~ -0.2397 does not satisfy 2t^4 - 4t^2 + 1 = 0"
            .into(),
    })
}

/// Adaptive sampling for export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Initial samples per branch.
    pub samples: usize,
    /// Segments longer than this (in plane units) are split.
    pub threshold: f64,
    /// Refinement only inside |x|, |y| <= view.
    pub view: f64,
    pub max_points: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { samples: 100, threshold: 0.05, view: 10.0, max_points: 2000 }
    }
}

/// (t, x, y) along a branch, doubling density where consecutive points are far apart.
pub fn sample_branch(branch: &CurveBranch, sc: &SamplingConfig, cfg: &MapConfig) -> Vec<(f64, f64, f64)> {
    let ends = branch.float_ends();
    let eval = |u: f64| {
        let t = param_from_ends(ends, u);
        curve_point_f64(branch.family, branch.level, t, cfg).ok().map(|p| (u, t, p))
    };
    let n = sc.samples.max(2);
    let mut pts: Vec<(f64, f64, FloatPoint)> = (1..=n).filter_map(|k| eval(k as f64 / (n + 1) as f64)).collect();
    let inside = |p: &FloatPoint| p.x.abs() <= sc.view && p.y.abs() <= sc.view;
    loop {
        if pts.len() >= sc.max_points {
            break;
        }
        let mut next = Vec::with_capacity(pts.len() * 2);
        let mut added = false;
        for w in pts.windows(2) {
            next.push(w[0].clone());
            let (a, b) = (&w[0].2, &w[1].2);
            let far = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt() > sc.threshold;
            if far && (inside(a) || inside(b)) && next.len() + pts.len() < sc.max_points {
                if let Some(m) = eval(0.5 * (w[0].0 + w[1].0)) {
                    next.push(m);
                    added = true;
                }
            }
        }
        if let Some(l) = pts.last() {
            next.push(l.clone());
        }
        pts = next;
        if !added {
            break;
        }
    }
    pts.into_iter().map(|(_, t, p)| (t, p.x, p.y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preimage_and_image_examples() {
        let m = MapConfig::default();
        assert_eq!(preimage_point(1, &int(1), &m).unwrap(), Point::new(int(0), int(1)));
        assert_eq!(preimage_point(1, &int(2), &m).unwrap(), Point::new(rat(3, 2), int(2)));
        assert_eq!(image_point(1, &int(1), &m).unwrap(), Point::new(int(0), int(-1)));
        assert_eq!(image_point(1, &int(2), &m).unwrap(), Point::new(rat(3, 2), rat(-7, 2)));
        assert!(matches!(preimage_point(1, &int(0), &m), Err(CurvesError::DiscontinuityHit { level: 0, .. })));
    }

    #[test]
    fn level_one_and_two_sets() {
        let cfg = CurvesConfig::default();
        let d1 = discontinuity_params(1, &cfg).unwrap();
        assert_eq!(d1.params.len(), 1);
        assert!(d1.params[0].bracket.is_exact());
        let d2 = discontinuity_params(2, &cfg).unwrap();
        assert_eq!(d2.params.len(), 3);
    }

    #[test]
    fn simplest_rational_catches_exact_roots() {
        let cfg = CurvesConfig::default();
        let d3 = discontinuity_params(3, &cfg).unwrap();
        assert!(d3.params.iter().any(|p| p.bracket == RootBracket::exact(int(1))));
        assert!(d3.params.iter().any(|p| p.bracket == RootBracket::exact(int(-1))));
    }
}
