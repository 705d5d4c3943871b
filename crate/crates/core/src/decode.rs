//! From words back to points: cylinder location, points on pre-image curves
//! with a finite i-word, and periodic points of periodic words.

use serde::{Deserialize, Serialize};

use crate::coding::{backward_word, forward_word, i_word, j_word, CodingError, CoordinateWord, FloatHenon};
use crate::curves::{
    g_sign, preimage_hom, root_on_component, CurveBranch, CurvesConfig, CurvesError, Family, MirrorSide, RootBracket,
};
use crate::map::{apply_f, jacobian, ExactPoint, FloatPoint, HomPoint, MapConfig, MapError, Matrix2, Point};
use crate::scalar::{f64_to_rational, int, rat, rational_to_f64, simplest_between, Rational, Sign};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    #[serde(with = "crate::suite::rational_text")]
    pub x_min: Rational,
    #[serde(with = "crate::suite::rational_text")]
    pub x_max: Rational,
    #[serde(with = "crate::suite::rational_text")]
    pub y_min: Rational,
    #[serde(with = "crate::suite::rational_text")]
    pub y_max: Rational,
}

impl SearchBox {
    pub fn new(x_min: Rational, x_max: Rational, y_min: Rational, y_max: Rational) -> Self {
        SearchBox { x_min, x_max, y_min, y_max }
    }

    pub fn from_ints(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Self {
        SearchBox::new(int(x_min), int(x_max), int(y_min), int(y_max))
    }

    fn width(&self) -> Rational {
        &self.x_max - &self.x_min
    }

    fn height(&self) -> Rational {
        &self.y_max - &self.y_min
    }

    pub fn diameter(&self) -> f64 {
        rational_to_f64(&self.width()).hypot(rational_to_f64(&self.height()))
    }

    fn split(&self, nx: i64, ny: i64) -> Vec<SearchBox> {
        let (dx, dy) = (self.width() / int(nx), self.height() / int(ny));
        let mut out = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let x0 = &self.x_min + &dx * int(i);
                let y0 = &self.y_min + &dy * int(j);
                out.push(SearchBox::new(x0.clone(), &x0 + &dx, y0.clone(), &y0 + &dy));
            }
        }
        out
    }

    /// Center and the four quarter points.
    fn probes(&self) -> Vec<ExactPoint> {
        let (cx, cy) = ((&self.x_min + &self.x_max) / int(2), (&self.y_min + &self.y_max) / int(2));
        let (qx, qy) = (self.width() / int(4), self.height() / int(4));
        vec![
            Point::new(cx.clone(), cy.clone()),
            Point::new(&cx - &qx, &cy - &qy),
            Point::new(&cx + &qx, &cy - &qy),
            Point::new(&cx - &qx, &cy + &qy),
            Point::new(&cx + &qx, &cy + &qy),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderQuery {
    pub i_prefix: Vec<i64>,
    pub j_prefix: Vec<i64>,
    pub search_box: SearchBox,
    /// Target cell diameter.
    pub tolerance: f64,
    pub max_refinements: usize,
    /// Beam width: surviving cells kept per refinement level.
    pub max_cells: usize,
}

impl CylinderQuery {
    pub fn new(i_prefix: Vec<i64>, j_prefix: Vec<i64>, search_box: SearchBox) -> Self {
        CylinderQuery { i_prefix, j_prefix, search_box, tolerance: 1e-6, max_refinements: 40, max_cells: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: SearchBox,
    pub matching_probes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub reason: String,
    pub refinements: usize,
    pub probes: usize,
    /// Last surviving cells, best first.
    pub surviving_cells: Vec<CellReport>,
    /// Residual norms per Newton step, when a Newton run was involved.
    pub newton_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("not found: {}", .0.reason)]
    NotFound(Box<Diagnostics>),
    #[error("no branch realises the word: {0}")]
    BranchNotFound(String),
    #[error("Newton iteration diverged")]
    NewtonDiverged(Box<Diagnostics>),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Curves(#[from] CurvesError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocatedPoint {
    pub point: ExactPoint,
    pub cell_diameter: f64,
    pub refinements: usize,
    pub probes: usize,
    pub i_word: CoordinateWord,
    pub j_word: CoordinateWord,
}

fn prefix_depth(prefix: &[i64]) -> usize {
    prefix.iter().map(|e| e.unsigned_abs() as usize).sum::<usize>() + 1
}

/// Float words of p deep enough to decide the prefixes, or None on a discontinuity.
fn float_probe_matches(p: &FloatPoint, q: &CylinderQuery, m: &FloatHenon) -> bool {
    let wi = forward_word(m, p, prefix_depth(&q.i_prefix));
    let wj = backward_word(m, p, prefix_depth(&q.j_prefix));
    match (wi, wj) {
        (Ok(wi), Ok(wj)) => wi.matches_prefix(&q.i_prefix) && wj.matches_prefix(&q.j_prefix),
        _ => false,
    }
}

/// Exact words of p, when both match the prefixes.
fn exact_match(
    p: &ExactPoint,
    q: &CylinderQuery,
    cfg: &MapConfig,
) -> Result<Option<(CoordinateWord, CoordinateWord)>, DecodeError> {
    let wi = match i_word(p, prefix_depth(&q.i_prefix), cfg) {
        Ok(w) => w,
        Err(CodingError::OnDiscontinuity) | Err(CodingError::Map(MapError::DiscontinuityHit { .. })) => {
            return Ok(None)
        }
        Err(e) => return Err(e.into()),
    };
    let wj = match j_word(p, prefix_depth(&q.j_prefix), cfg) {
        Ok(w) => w,
        Err(CodingError::OnDiscontinuity) | Err(CodingError::Map(MapError::DiscontinuityHit { .. })) => {
            return Ok(None)
        }
        Err(e) => return Err(e.into()),
    };
    Ok((wi.matches_prefix(&q.i_prefix) && wj.matches_prefix(&q.j_prefix)).then_some((wi, wj)))
}

/// Sign pattern a word must start with: the prefix runs followed by the sign that closes the last run.
fn sign_pattern(prefix: &[i64]) -> Vec<bool> {
    let mut out: Vec<bool> =
        prefix.iter().flat_map(|&e| std::iter::repeat(e > 0).take(e.unsigned_abs() as usize)).collect();
    if let Some(&last) = prefix.last() {
        out.push(last < 0);
    }
    out
}

fn leading_agreement(w: &CoordinateWord, pattern: &[bool]) -> usize {
    let signs = w.entries().iter().flat_map(|&e| std::iter::repeat(e > 0).take(e.unsigned_abs() as usize));
    signs.zip(pattern).take_while(|(a, b)| a == *b).count()
}

/// Number of leading pattern signs reproduced by the float words of p, summed over both directions.
fn float_partial_score(p: &FloatPoint, m: &FloatHenon, pi: &[bool], pj: &[bool]) -> usize {
    let si = forward_word(m, p, pi.len().max(1)).map(|w| leading_agreement(&w, pi)).unwrap_or(0);
    let sj = backward_word(m, p, pj.len().max(1)).map(|w| leading_agreement(&w, pj)).unwrap_or(0);
    si + sj
}

struct Scored {
    cell: SearchBox,
    hits: Vec<ExactPoint>,
}

/// Cells kept per level while following partial agreement toward a thin cylinder.
const GUIDED_BEAM: usize = 256;

/// Cells probed in one uniform pass before the search gives up on finding any match.
const MAX_UNIFORM_CELLS: usize = 1 << 16;

/// Adaptive quadtree search for a point whose words start with both prefixes.
///
/// Probes are coded in float mode; the returned point is re-coded exactly.
pub fn cylinder_locate(q: &CylinderQuery, cfg: &MapConfig) -> Result<LocatedPoint, DecodeError> {
    Ok(cylinder_locate_all(q, cfg)?.remove(0))
}

/// As [`cylinder_locate`], returning one verified point per final cell, best first.
pub fn cylinder_locate_all(q: &CylinderQuery, cfg: &MapConfig) -> Result<Vec<LocatedPoint>, DecodeError> {
    CoordinateWord::truncated(q.i_prefix.clone()).map_err(|e| DecodeError::InvalidQuery(e.to_string()))?;
    CoordinateWord::truncated(q.j_prefix.clone()).map_err(|e| DecodeError::InvalidQuery(e.to_string()))?;
    let b = &q.search_box;
    if b.x_min >= b.x_max || b.y_min >= b.y_max {
        return Err(DecodeError::InvalidQuery("empty search box".into()));
    }
    if q.tolerance.is_nan() || q.tolerance <= 0.0 {
        return Err(DecodeError::InvalidQuery("tolerance must be positive".into()));
    }
    let fm = FloatHenon { cfg: cfg.clone() };
    let mut probes = 0usize;
    // Guided phase: cylinders of longer prefixes nest inside those of shorter ones, so cells whose
    // probes reproduce more leading signs are refined first.
    let (pi, pj) = (sign_pattern(&q.i_prefix), sign_pattern(&q.j_prefix));
    let full = pi.len() + pj.len();
    let mut guided: Vec<SearchBox> = b.split(8, 8);
    let mut refinements = 0;
    let mut found: Vec<Scored> = Vec::new();
    while refinements < q.max_refinements {
        let mut ranked: Vec<(usize, SearchBox)> = Vec::with_capacity(guided.len());
        for cell in guided.drain(..) {
            let mut best = 0;
            let mut hits = Vec::new();
            for p in cell.probes() {
                probes += 1;
                let fp = p.to_f64();
                let s = float_partial_score(&fp, &fm, &pi, &pj);
                best = best.max(s);
                if s == full && float_probe_matches(&fp, q, &fm) {
                    hits.push(p);
                }
            }
            if hits.is_empty() {
                ranked.push((best, cell));
            } else {
                found.push(Scored { cell, hits });
            }
        }
        if !found.is_empty() || ranked.is_empty() || ranked[0].1.diameter() <= q.tolerance {
            break;
        }
        // stable: ties keep grid order
        ranked.sort_by_key(|r| std::cmp::Reverse(r.0));
        ranked.truncate(GUIDED_BEAM);
        guided = ranked.iter().flat_map(|(_, c)| c.split(2, 2)).collect();
        refinements += 1;
    }

    let mut score = |cell: SearchBox| -> Scored {
        let mut hits = Vec::new();
        for p in cell.probes() {
            probes += 1;
            if float_probe_matches(&p.to_f64(), q, &fm) {
                hits.push(p);
            }
        }
        Scored { cell, hits }
    };
    let report = |beam: &[Scored]| -> Vec<CellReport> {
        beam.iter().map(|s| CellReport { cell: s.cell.clone(), matching_probes: s.hits.len() }).collect()
    };
    let keep = |v: &mut Vec<Scored>| {
        // stable: ties keep grid order
        v.sort_by_key(|s| std::cmp::Reverse(s.hits.len()));
        v.truncate(q.max_cells.max(1));
    };

    // Uniform refinement until some probe matches, when the guided phase lost the cylinder.
    let mut beam: Vec<Scored> = found;
    let mut cells = if beam.is_empty() { b.split(8, 8) } else { Vec::new() };
    if beam.is_empty() {
        refinements = 0;
    }
    while beam.is_empty() {
        beam = cells.into_iter().map(&mut score).filter(|s| !s.hits.is_empty()).collect();
        if !beam.is_empty() {
            break;
        }
        let side = 8usize << refinements;
        if refinements >= q.max_refinements || side * side * 4 > MAX_UNIFORM_CELLS {
            return Err(DecodeError::NotFound(Box::new(Diagnostics {
                reason: format!("no probe matches both prefixes on a {side}x{side} grid"),
                refinements,
                probes,
                surviving_cells: Vec::new(),
                newton_trace: Vec::new(),
            })));
        }
        cells = b.split(2 * side as i64, 2 * side as i64);
        refinements += 1;
    }
    keep(&mut beam);

    loop {
        let diam = beam[0].cell.diameter();
        if diam <= q.tolerance {
            break;
        }
        if refinements >= q.max_refinements {
            return Err(DecodeError::NotFound(Box::new(Diagnostics {
                reason: format!(
                    "tolerance {} not reached after {refinements} refinements (cell diameter {diam:e})",
                    q.tolerance
                ),
                refinements,
                probes,
                surviving_cells: report(&beam),
                newton_trace: Vec::new(),
            })));
        }
        let mut next: Vec<Scored> =
            beam.iter().flat_map(|s| s.cell.split(2, 2)).map(&mut score).filter(|s| !s.hits.is_empty()).collect();
        refinements += 1;
        if next.is_empty() {
            return Err(DecodeError::NotFound(Box::new(Diagnostics {
                reason: "cylinder thinner than the probe spacing: every child cell lost its matches".into(),
                refinements,
                probes,
                surviving_cells: report(&beam),
                newton_trace: Vec::new(),
            })));
        }
        keep(&mut next);
        beam = next;
    }

    let mut out = Vec::new();
    for s in beam.iter().filter(|s| s.cell.diameter() <= q.tolerance) {
        for p in &s.hits {
            if let Some((wi, wj)) = exact_match(p, q, cfg)? {
                out.push(LocatedPoint {
                    point: p.clone(),
                    cell_diameter: s.cell.diameter(),
                    refinements,
                    probes,
                    i_word: wi,
                    j_word: wj,
                });
                break;
            }
        }
    }
    if out.is_empty() {
        return Err(DecodeError::NotFound(Box::new(Diagnostics {
            reason: "float matches did not survive exact re-coding".into(),
            refinements,
            probes,
            surviving_cells: report(&beam),
            newton_trace: Vec::new(),
        })));
    }
    Ok(out)
}

/// Closed runs of a word: all entries when Finite, all but the open last run otherwise.
pub fn closed_prefix(w: &CoordinateWord) -> Vec<i64> {
    let e = w.entries();
    if w.is_finite() {
        e.to_vec()
    } else {
        e[..e.len().saturating_sub(1)].to_vec()
    }
}

/// Query for the cylinder of `p`: closed runs of its depth-`depth` words and a
/// square box of half side `half_side` centred on the dyadic rounding of `p`.
pub fn query_around(
    p: &ExactPoint,
    depth: usize,
    half_side: &Rational,
    cfg: &MapConfig,
) -> Result<CylinderQuery, DecodeError> {
    let wi = i_word(p, depth, cfg)?;
    let wj = j_word(p, depth, cfg)?;
    let snap =
        |v: &Rational| f64_to_rational((rational_to_f64(v) * 1024.0).round() / 1024.0).unwrap_or_else(|| v.clone());
    let (cx, cy) = (snap(&p.x), snap(&p.y));
    let b = SearchBox::new(&cx - half_side, &cx + half_side, &cy - half_side, &cy + half_side);
    Ok(CylinderQuery::new(closed_prefix(&wi), closed_prefix(&wj), b))
}

/// A point whose i-word is the given Finite word: it lies on the level-n
/// pre-image of {y = 0}, n = total length, on the branch where
/// sign g_j(t) = s_{n-1-j} for every j < n.
pub fn curve_point_from_finite_iword(wi: &CoordinateWord, cfg: &CurvesConfig) -> Result<ExactPoint, DecodeError> {
    if !wi.is_finite() || wi.is_empty() {
        return Err(DecodeError::InvalidQuery("word must be Finite and nonempty".into()));
    }
    let signs = wi.signs();
    let n = signs.len();
    let (mut lo, mut hi): (Option<RootBracket>, Option<RootBracket>) = (None, None);
    for j in 0..n {
        let what = format!("g_{j} on the selected branch");
        let r = root_on_component(|t| g_sign(j, t, &cfg.map), lo.as_ref(), hi.as_ref(), cfg, &what)
            .map_err(|e| DecodeError::BranchNotFound(e.to_string()))?;
        match signs[n - 1 - j] {
            Sign::Positive => lo = Some(r),
            _ => hi = Some(r),
        }
    }
    let side = if lo.as_ref().is_some_and(|a| a.lo >= int(0)) { MirrorSide::Positive } else { MirrorSide::Negative };
    let branch = CurveBranch { family: Family::PreimageOfYZero, level: n, lower: lo, upper: hi, side };
    // Shortest parameter in the middle third keeps exact iteration cheap.
    let t = simplest_between(&branch.param_at(&rat(1, 3)), &branch.param_at(&rat(2, 3)));
    let p = preimage_hom(n, &t, &cfg.map)?.to_point();
    let back = i_word(&p, n + 1, &cfg.map)?;
    if &back != wi {
        return Err(DecodeError::BranchNotFound(format!("re-coding gives {back}, expected {wi}")));
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOptions {
    pub seed_tolerance: f64,
    pub max_seeds: usize,
    pub newton_steps: usize,
    /// Float residual at which the exact polish starts.
    pub float_tolerance: f64,
    pub exact_polish_steps: usize,
    /// Bits kept after each exact polish step.
    pub polish_bits: usize,
    pub hyperbolic_margin: f64,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions {
            seed_tolerance: 1e-3,
            max_seeds: 8,
            newton_steps: 100,
            float_tolerance: 1e-12,
            exact_polish_steps: 2,
            polish_bits: 256,
            hyperbolic_margin: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicCandidate {
    pub point: ExactPoint,
    pub point_approx: FloatPoint,
    pub period: usize,
    /// max |f^P(p) - p| over both coordinates, evaluated exactly.
    pub residual: f64,
    /// Trace of the P-step Jacobian product, evaluated exactly at `point`.
    pub trace: f64,
    pub det_is_one: bool,
    /// Eigenvalues as (re, im).
    pub multipliers: [(f64, f64); 2],
    pub hyperbolic: bool,
    pub newton_steps: usize,
    pub seed: ExactPoint,
    /// The orbit's sign sequence repeats the requested cycle.
    pub coding_matches: bool,
}

fn check_cycles(i_cycle: &[i64], j_cycle: &[i64]) -> Result<usize, DecodeError> {
    let bad = |m: &str| Err(DecodeError::InvalidQuery(m.into()));
    if i_cycle.is_empty() || i_cycle.contains(&0) {
        return bad("i cycle must be nonempty with nonzero entries");
    }
    let period: usize = i_cycle.iter().map(|e| e.unsigned_abs() as usize).sum();
    if period == 1 {
        return Ok(1);
    }
    let m = i_cycle.len();
    if m % 2 == 1 {
        return bad("a repeated cycle with an odd number of runs cannot alternate in sign");
    }
    for k in 0..m {
        if i_cycle[k].signum() == i_cycle[(k + 1) % m].signum() {
            return bad("cycle entries must alternate in sign, cyclically");
        }
    }
    let rev: Vec<i64> = i_cycle.iter().rev().copied().collect();
    if j_cycle != rev.as_slice() {
        return bad("at a run boundary the j cycle is the i cycle reversed");
    }
    Ok(period)
}

fn cycle_signs(i_cycle: &[i64], reps: usize) -> Vec<Sign> {
    let one = CoordinateWord::truncated(i_cycle.to_vec()).expect("checked").signs();
    let mut out = Vec::new();
    for _ in 0..reps {
        out.extend_from_slice(&one);
    }
    out
}

fn float_residual(p: &FloatPoint, period: usize, cfg: &MapConfig) -> Option<(FloatPoint, Matrix2<f64>)> {
    let mut q = p.clone();
    let mut m = Matrix2::<f64>::identity();
    for _ in 0..period {
        m = jacobian(&q, cfg).ok()?.mul(&m);
        q = apply_f(&q, cfg).ok()?;
    }
    Some((Point::new(q.x - p.x, q.y - p.y), m))
}

fn newton_float(
    seed: &FloatPoint,
    period: usize,
    opts: &PeriodicOptions,
    cfg: &MapConfig,
) -> (Option<FloatPoint>, Vec<f64>) {
    let norm = |r: &FloatPoint| r.x.abs().max(r.y.abs());
    let mut p = seed.clone();
    let mut trace = Vec::new();
    let Some((mut r, mut m)) = float_residual(&p, period, cfg) else { return (None, trace) };
    trace.push(norm(&r));
    for _ in 0..opts.newton_steps {
        if norm(&r) < opts.float_tolerance {
            return (Some(p), trace);
        }
        // (M - I) d = -r
        let (a, b, c, d) = (m.a - 1.0, m.b, m.c, m.d - 1.0);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return (None, trace);
        }
        let dx = -(d * r.x - b * r.y) / det;
        let dy = -(-c * r.x + a * r.y) / det;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = Point::new(p.x + lambda * dx, p.y + lambda * dy);
            if let Some((r2, m2)) = float_residual(&cand, period, cfg) {
                if norm(&r2) < norm(&r) {
                    accepted = Some((cand, r2, m2));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((cand, r2, m2)) = accepted else { return (None, trace) };
        p = cand;
        r = r2;
        m = m2;
        trace.push(norm(&r));
    }
    (if norm(&r) < opts.float_tolerance { Some(p) } else { None }, trace)
}

fn exact_chain(p: &ExactPoint, period: usize, cfg: &MapConfig) -> Result<(ExactPoint, Matrix2<Rational>), MapError> {
    let mut q = HomPoint::from_point(p);
    let mut m = Matrix2::<Rational>::identity();
    for _ in 0..period {
        let qp = q.to_point();
        m = jacobian(&qp, cfg)?.mul(&m);
        q = q.forward(cfg)?;
    }
    Ok((q.to_point(), m))
}

fn round_to_bits(q: &Rational, bits: usize) -> Rational {
    let scale = Rational::from_integer(num_bigint::BigInt::from(1) << bits);
    (q * &scale).round() / scale
}

fn exact_newton(
    p: &ExactPoint,
    period: usize,
    opts: &PeriodicOptions,
    cfg: &MapConfig,
) -> Result<ExactPoint, MapError> {
    let mut p = p.clone();
    for _ in 0..opts.exact_polish_steps {
        let (q, m) = exact_chain(&p, period, cfg)?;
        let (rx, ry) = (&q.x - &p.x, &q.y - &p.y);
        let one = int(1);
        let (a, b, c, d) = (&m.a - &one, m.b.clone(), m.c.clone(), &m.d - &one);
        let det = &a * &d - &b * &c;
        if det == int(0) {
            break;
        }
        let dx = -(&d * &rx - &b * &ry) / &det;
        let dy = -(-(&c * &rx) + &a * &ry) / &det;
        p = Point::new(round_to_bits(&(&p.x + dx), opts.polish_bits), round_to_bits(&(&p.y + dy), opts.polish_bits));
    }
    Ok(p)
}

fn multipliers(trace: f64) -> [(f64, f64); 2] {
    let disc = trace * trace - 4.0;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // larger root first; the other from the product 1 to avoid cancellation
        let l1 = if trace >= 0.0 { (trace + s) / 2.0 } else { (trace - s) / 2.0 };
        [(l1, 0.0), (1.0 / l1, 0.0)]
    } else {
        let im = (-disc).sqrt() / 2.0;
        [(trace / 2.0, im), (trace / 2.0, -im)]
    }
}

fn orbit_signs(p: &ExactPoint, n: usize, cfg: &MapConfig) -> Option<Vec<Sign>> {
    let mut q = HomPoint::from_point(p);
    let mut out = Vec::new();
    for _ in 0..n {
        out.push(q.sign_y());
        q = q.forward(cfg).ok()?;
    }
    Some(out)
}

/// Periodic point whose forward sign sequence repeats `i_cycle`, taken at a
/// run boundary (so the backward word repeats `j_cycle` = reversed `i_cycle`).
pub fn periodic_search(
    i_cycle: &[i64],
    j_cycle: &[i64],
    seed_box: &SearchBox,
    opts: &PeriodicOptions,
    cfg: &MapConfig,
) -> Result<PeriodicCandidate, DecodeError> {
    let period = check_cycles(i_cycle, j_cycle)?;
    let not_found = |reason: String, trace: Vec<f64>, cells: Vec<CellReport>| {
        DecodeError::NotFound(Box::new(Diagnostics {
            reason,
            refinements: 0,
            probes: 0,
            surviving_cells: cells,
            newton_trace: trace,
        }))
    };
    if period == 1 {
        return Err(not_found("no fixed points: f(p) = p forces 1/y = 0".into(), vec![], vec![]));
    }
    // Seeds from the cycle repeated twice, then from a single cycle.
    let mut seeds = Vec::new();
    let mut seed_errors = Vec::new();
    for reps in [2, 1] {
        let q = CylinderQuery {
            i_prefix: i_cycle.repeat(reps),
            j_prefix: j_cycle.repeat(reps),
            search_box: seed_box.clone(),
            tolerance: opts.seed_tolerance,
            max_refinements: 30,
            max_cells: 32,
        };
        match cylinder_locate_all(&q, cfg) {
            Ok(s) => seeds.extend(s),
            Err(DecodeError::NotFound(d)) => seed_errors.push(format!("{reps}x cycle: {}", d.reason)),
            Err(e) => return Err(e),
        }
    }
    if seeds.is_empty() {
        return Err(not_found(format!("no seed: {}", seed_errors.join("; ")), vec![], vec![]));
    }
    let want = cycle_signs(i_cycle, 2);
    let mut last_trace = Vec::new();
    let mut tried = 0;
    for seed in seeds.iter().take(opts.max_seeds.max(1)) {
        tried += 1;
        let (found, trace) = newton_float(&seed.point.to_f64(), period, opts, cfg);
        last_trace = trace.clone();
        let Some(pf) = found else { continue };
        let (Some(x), Some(y)) = (f64_to_rational(pf.x), f64_to_rational(pf.y)) else { continue };
        let p = exact_newton(&Point::new(x, y), period, opts, cfg)?;
        let Ok((q, m)) = exact_chain(&p, period, cfg) else { continue };
        let residual = rational_to_f64(&(&q.x - &p.x)).abs().max(rational_to_f64(&(&q.y - &p.y)).abs());
        let trace_v = rational_to_f64(&m.trace());
        let mult = multipliers(trace_v);
        let hyperbolic = mult.iter().all(|(re, im)| (re.hypot(*im) - 1.0).abs() > opts.hyperbolic_margin);
        let coding_matches = orbit_signs(&p, want.len(), cfg).as_deref() == Some(want.as_slice());
        if !coding_matches {
            continue;
        }
        return Ok(PeriodicCandidate {
            point_approx: p.to_f64(),
            point: p,
            period,
            residual,
            trace: trace_v,
            det_is_one: m.det() == int(1),
            multipliers: mult,
            hyperbolic,
            newton_steps: trace.len().saturating_sub(1),
            seed: seed.point.clone(),
            coding_matches,
        });
    }
    Err(not_found(
        format!("{tried} seeds tried; none converged to an orbit with the requested coding"),
        last_trace,
        seeds
            .iter()
            .map(|s| CellReport {
                cell: SearchBox::new(s.point.x.clone(), s.point.x.clone(), s.point.y.clone(), s.point.y.clone()),
                matching_probes: 1,
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_consistency() {
        assert_eq!(check_cycles(&[1, -1], &[-1, 1]).unwrap(), 2);
        assert_eq!(check_cycles(&[1], &[1]).unwrap(), 1);
        assert!(check_cycles(&[2, -1, 1], &[1, -1, 2]).is_err());
        assert!(check_cycles(&[1, -1], &[1, -1]).is_err());
        assert!(check_cycles(&[1, 1], &[1, 1]).is_err());
    }

    #[test]
    fn multipliers_of_trace() {
        let m = multipliers(34.0);
        assert!((m[0].0 * m[1].0 - 1.0).abs() < 1e-12);
        assert!((m[0].0 + m[1].0 - 34.0).abs() < 1e-12);
        let m = multipliers(1.0);
        assert!((m[0].0.hypot(m[0].1) - 1.0).abs() < 1e-12);
    }
}
