//! The Boole transformation B(x) = x - 1/x and its one-sided coding.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coding::{
    forward_word, shift, CodingError, CoordinateWord, ForwardCoded, SequenceKind, SideEnd, SymbolSequence, WordStatus,
};
use crate::curves::{bisect_increasing, RootBracket};
use crate::map::{Discontinuity, MapConfig, MapError};
use crate::scalar::{int, ratio_to_f64, Rational, Scalar, Sign};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BooleError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("empty cylinder: {0}")]
    EmptyCylinder(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoolePoint<S> {
    pub x: S,
}

fn origin_hit<S: Scalar>(x: &S) -> MapError {
    MapError::DiscontinuityHit { line: Discontinuity::Origin, x: x.render(), y: String::new() }
}

/// B(x) = x - 1/x.
pub fn apply_b<S: Scalar>(x: &S, cfg: &MapConfig) -> Result<S, MapError> {
    if x.sign(cfg.epsilon).is_zero() {
        return Err(origin_hit(x));
    }
    Ok(x.clone() - S::one() / x.clone())
}

/// Exact x = X/Z with Z > 0; B sends (X, Z) to (X^2 - Z^2, XZ).
#[derive(Clone, Debug, PartialEq)]
pub struct BooleHom {
    x: BigInt,
    z: BigInt,
}

impl BooleHom {
    pub fn new(q: &Rational) -> Self {
        BooleHom { x: q.numer().clone(), z: q.denom().clone() }
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.x.clone(), self.z.clone())
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.x, &self.z)
    }

    pub fn sign(&self) -> Sign {
        Sign::of_bigint(&self.x)
    }

    pub fn forward(&self, cfg: &MapConfig) -> Result<BooleHom, MapError> {
        if self.x.is_zero() {
            return Err(origin_hit(&self.value()));
        }
        let nx = &self.x * &self.x - &self.z * &self.z;
        let nz = &self.x * &self.z;
        let (nx, nz) = if nz.is_negative() { (-nx, -nz) } else { (nx, nz) };
        let bits = nx.bits() + nz.bits();
        if bits > cfg.max_bits {
            return Err(MapError::ResourceLimit { bits, limit: cfg.max_bits });
        }
        Ok(BooleHom { x: nx, z: nz })
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExactBoole {
    pub cfg: MapConfig,
}

impl ForwardCoded for ExactBoole {
    type State = BooleHom;
    fn forward(&self, s: &BooleHom) -> Result<BooleHom, MapError> {
        s.forward(&self.cfg)
    }
    fn forward_side(&self, s: &BooleHom) -> Sign {
        s.sign()
    }
}

#[derive(Clone, Debug, Default)]
pub struct FloatBoole {
    pub cfg: MapConfig,
}

impl ForwardCoded for FloatBoole {
    type State = f64;
    fn forward(&self, s: &f64) -> Result<f64, MapError> {
        apply_b(s, &self.cfg)
    }
    fn forward_side(&self, s: &f64) -> Sign {
        s.sign(self.cfg.epsilon)
    }
}

/// Run-length word of the signs of B^k(x), k < max_depth, by exact iteration.
/// Sizes double at every step; see [`b_word`] for the fast route.
pub fn b_word_exact(x: &Rational, max_depth: usize, cfg: &MapConfig) -> Result<CoordinateWord, BooleError> {
    Ok(forward_word(&ExactBoole { cfg: cfg.clone() }, &BooleHom::new(x), max_depth)?)
}

/// Run-length word of the signs of B^k(x), k < max_depth. Landing on 0 closes
/// the word. Signs are certified by outward-rounded dyadic interval iteration.
pub fn b_word(x: &Rational, max_depth: usize, cfg: &MapConfig) -> Result<CoordinateWord, BooleError> {
    let max_depth = max_depth.max(1);
    match certified_signs(x, usize::MAX, max_depth, cfg)? {
        (signs, Stop::Zero) => Ok(CoordinateWord::from_signs(&signs, WordStatus::Finite)),
        (signs, _) => Ok(CoordinateWord::from_signs(&signs, WordStatus::Truncated(max_depth))),
    }
}

/// Word with exactly `entries` complete runs (fewer if the orbit lands on 0).
pub fn b_word_entries(
    x: &Rational,
    entries: usize,
    max_steps: usize,
    cfg: &MapConfig,
) -> Result<CoordinateWord, BooleError> {
    match certified_signs(x, entries, max_steps, cfg)? {
        (signs, Stop::Zero) => Ok(CoordinateWord::from_signs(&signs, WordStatus::Finite)),
        (signs, Stop::Runs) => {
            let depth = signs.len();
            Ok(CoordinateWord::from_signs(&signs, WordStatus::Truncated(depth)))
        }
        (_, Stop::Steps) => Err(MapError::ResourceLimit { bits: max_steps as u64, limit: max_steps as u64 }.into()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stop {
    Zero,
    Runs,
    Steps,
}

/// Signs of the orbit until it lands on 0, a run beyond `max_runs` starts, or
/// `max_steps` signs are known. Precision doubles whenever an interval meets 0.
fn certified_signs(
    x: &Rational,
    max_runs: usize,
    max_steps: usize,
    cfg: &MapConfig,
) -> Result<(Vec<Sign>, Stop), BooleError> {
    if x.is_zero() {
        return Err(CodingError::OnDiscontinuity.into());
    }
    let mut precision = 64u64;
    loop {
        if let Some(r) = interval_signs(x, max_runs, max_steps, precision as usize) {
            return Ok(r);
        }
        precision *= 2;
        if precision > cfg.max_bits {
            return Err(MapError::ResourceLimit { bits: precision, limit: cfg.max_bits }.into());
        }
    }
}

fn round_dyadic(q: &Rational, bits: usize, up: bool) -> Rational {
    use num_integer::Integer;
    let scaled = q.numer() << bits;
    let (d, r) = scaled.div_mod_floor(q.denom());
    let d = if up && !r.is_zero() { d + 1 } else { d };
    Rational::new(d, BigInt::from(1) << bits)
}

fn interval_signs(x: &Rational, max_runs: usize, max_steps: usize, bits: usize) -> Option<(Vec<Sign>, Stop)> {
    let (mut a, mut b) = (x.clone(), x.clone());
    let mut signs: Vec<Sign> = Vec::new();
    let mut runs = 0;
    while signs.len() < max_steps {
        let s = if a.is_zero() && b.is_zero() {
            return Some((signs, Stop::Zero));
        } else if a.is_positive() {
            Sign::Positive
        } else if b.is_negative() {
            Sign::Negative
        } else {
            return None;
        };
        if signs.last() != Some(&s) {
            runs += 1;
            if runs > max_runs {
                return Some((signs, Stop::Runs));
            }
        }
        signs.push(s);
        // B is increasing on each side of 0; dyadic values survive the rounding
        // exactly, so 1 -> 0 is kept.
        a = round_dyadic(&(&a - a.recip()), bits, false);
        b = round_dyadic(&(&b - b.recip()), bits, true);
    }
    Some((signs, Stop::Steps))
}

/// Future-only symbol sequence of `depth` symbols; x = 0 codes as a lone 0.
pub fn h_b(x: &Rational, depth: usize, cfg: &MapConfig) -> Result<SymbolSequence, BooleError> {
    let w = match b_word(x, depth + 1, cfg) {
        Ok(w) => Ok(w),
        Err(BooleError::Coding(e)) => Err(e),
        Err(e) => return Err(e),
    };
    Ok(crate::coding::one_sided_from_word(w, depth)?)
}

/// The same sequence from exact iteration.
pub fn h_b_exact(x: &Rational, depth: usize, cfg: &MapConfig) -> Result<SymbolSequence, BooleError> {
    let m = ExactBoole { cfg: cfg.clone() };
    Ok(crate::coding::forward_symbol_sequence(&m, &BooleHom::new(x), depth)?)
}

/// Float counterpart, guarded by the configured epsilon.
pub fn h_b_float(x: f64, depth: usize, cfg: &MapConfig) -> Result<SymbolSequence, BooleError> {
    let m = FloatBoole { cfg: cfg.clone() };
    Ok(crate::coding::forward_symbol_sequence(&m, &x, depth)?)
}

/// shift(h_B(x)) agrees with h_B(B(x)) on `depth - 1` symbols.
pub fn boole_commutation(x: &Rational, depth: usize, cfg: &MapConfig) -> Result<bool, BooleError> {
    let window = depth.saturating_sub(1).max(1);
    let bx = apply_b(x, cfg)?;
    let a = shift(&h_b(x, window + 1, cfg)?)?;
    let b = h_b(&bx, window, cfg)?;
    let one_sided = SymbolSequence {
        kind: SequenceKind::I,
        past: Vec::new(),
        future: a.future,
        past_end: SideEnd::Terminated,
        future_end: a.future_end,
    };
    Ok(one_sided.agrees_with(&b))
}

/// Cylinder end: an exact bracket around an algebraic endpoint, or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    NegInfinity,
    Finite(RootBracket),
    PosInfinity,
}

impl Bound {
    fn to_f64(&self) -> f64 {
        match self {
            Bound::NegInfinity => f64::NEG_INFINITY,
            Bound::PosInfinity => f64::INFINITY,
            Bound::Finite(b) => b.mid_f64(),
        }
    }
}

/// Enclosure of the set of x sharing a sign pattern: (lo, hi), or one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub lo: Bound,
    pub hi: Bound,
    /// Number of signs the pattern fixes.
    pub depth: usize,
}

impl Cylinder {
    /// Outer width: from the low end of `lo` to the high end of `hi`.
    pub fn width(&self) -> Option<Rational> {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Some(&b.hi - &a.lo),
            _ => None,
        }
    }

    pub fn width_f64(&self) -> f64 {
        self.width().map_or(f64::INFINITY, |w| crate::scalar::rational_to_f64(&w))
    }

    /// True when x lies in the outer enclosure.
    pub fn contains(&self, x: &Rational) -> bool {
        let above = match &self.lo {
            Bound::NegInfinity => true,
            Bound::Finite(a) => &a.lo <= x,
            Bound::PosInfinity => false,
        };
        let below = match &self.hi {
            Bound::NegInfinity => false,
            Bound::Finite(b) => x <= &b.hi,
            Bound::PosInfinity => true,
        };
        above && below
    }

    pub fn approx(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

/// What follows the listed signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternTail {
    /// Nothing is known about later signs.
    Open,
    /// The next sign differs from the last listed one: the last run is complete.
    Flip,
    /// The next iterate is exactly 0.
    Zero,
}

/// Positive root of x^2 - yx - 1, bracketed to `width`.
fn inv_plus(y: &Rational, width: &Rational) -> RootBracket {
    let q = |x: &Rational| -> Result<Sign, std::convert::Infallible> { Ok((x * x - y * x - int(1)).sign(0.0)) };
    let lo = if y.is_positive() { y.clone() } else { int(0) };
    let hi = &lo + int(1);
    match bisect_increasing(q, lo, hi, width) {
        Ok(b) => b,
        Err(e) => match e {},
    }
}

fn inv_branch(s: Sign, b: &Bound, width: &Rational) -> Bound {
    match (s, b) {
        (Sign::Positive, Bound::NegInfinity) | (Sign::Negative, Bound::PosInfinity) => {
            Bound::Finite(RootBracket::exact(int(0)))
        }
        (Sign::Positive, Bound::PosInfinity) => Bound::PosInfinity,
        (Sign::Negative, Bound::NegInfinity) => Bound::NegInfinity,
        (_, Bound::Finite(r)) => {
            // Both inverse branches are increasing: map lo and hi outward.
            // The negative branch is y -> -B+^-1(-y).
            let image = |y: &Rational| match s {
                Sign::Negative => inv_plus(&-y.clone(), width).negate(),
                _ => inv_plus(y, width),
            };
            let a = image(&r.lo);
            let b = if r.is_exact() { a.clone() } else { image(&r.hi) };
            Bound::Finite(RootBracket { lo: a.lo, hi: b.hi })
        }
        (Sign::Zero, _) => unreachable!("pattern signs are nonzero"),
    }
}

/// Cylinder of x with sign(B^k x) = signs[k], followed by `tail`.
/// Each endpoint is enclosed to within `tol`.
pub fn cylinder_of_signs(signs: &[Sign], tail: PatternTail, tol: &Rational) -> Result<Cylinder, BooleError> {
    if signs.is_empty() {
        return Err(BooleError::EmptyCylinder("no signs".into()));
    }
    if signs.iter().any(|s| s.is_zero()) {
        return Err(BooleError::EmptyCylinder("zero in sign pattern".into()));
    }
    let n = signs.len();
    let delta = tol / int(4 * (n as i64 + 1));
    let (mut lo, mut hi) = match tail {
        PatternTail::Open => (Bound::NegInfinity, Bound::PosInfinity),
        PatternTail::Zero => {
            let z = Bound::Finite(RootBracket::exact(int(0)));
            (z.clone(), z)
        }
        PatternTail::Flip => match signs[n - 1] {
            Sign::Positive => (Bound::NegInfinity, Bound::Finite(RootBracket::exact(int(0)))),
            _ => (Bound::Finite(RootBracket::exact(int(0))), Bound::PosInfinity),
        },
    };
    for &s in signs.iter().rev() {
        lo = inv_branch(s, &lo, &delta);
        hi = inv_branch(s, &hi, &delta);
    }
    Ok(Cylinder { lo, hi, depth: n })
}

/// Enclosure of every x whose word starts with `prefix`, runs taken as complete;
/// a Finite prefix pins the orbit to land on 0 right after it.
pub fn decode_b(prefix: &CoordinateWord, tol: &Rational) -> Result<Cylinder, BooleError> {
    let tail = if prefix.is_finite() { PatternTail::Zero } else { PatternTail::Flip };
    cylinder_of_signs(&prefix.signs(), tail, tol)
}

/// Enclosure of the x sharing the first `depth` signs with x.
pub fn decode_round_trip(x: &Rational, depth: usize, tol: &Rational, cfg: &MapConfig) -> Result<Cylinder, BooleError> {
    let w = b_word(x, depth, cfg)?;
    let tail = if w.is_finite() { PatternTail::Zero } else { PatternTail::Open };
    cylinder_of_signs(&w.signs(), tail, tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub y: f64,
    pub x_plus: f64,
    pub x_minus: f64,
    /// Sum over both pre-images of 1 / B'(x).
    pub sum: f64,
    pub pass: bool,
}

/// Both pre-images of y solve x^2 - yx - 1 = 0; their weights 1/B'(x) = x^2/(x^2+1) must sum to 1.
pub fn measure_preservation_check(y: f64, tol: f64) -> MeasureReport {
    let r = (y * y + 4.0).sqrt();
    // cancellation-free quadratic roots
    let (x_plus, x_minus) = if y >= 0.0 { ((y + r) / 2.0, -2.0 / (y + r)) } else { (2.0 / (r - y), (y - r) / 2.0) };
    let w = |x: f64| x * x / (x * x + 1.0);
    let sum = w(x_plus) + w(x_minus);
    MeasureReport { y, x_plus, x_minus, sum, pass: (sum - 1.0).abs() <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn apply_examples() {
        let m = MapConfig::default();
        assert_eq!(apply_b(&int(2), &m).unwrap(), rat(3, 2));
        assert_eq!(apply_b(&int(1), &m).unwrap(), int(0));
        assert_eq!(apply_b(&rat(-1, 2), &m).unwrap(), rat(3, 2));
        assert!(apply_b(&int(0), &m).is_err());
        let h = BooleHom::new(&rat(-1, 2)).forward(&m).unwrap();
        assert_eq!(h.value(), rat(3, 2));
    }

    #[test]
    fn inverse_branch_hits_rationals() {
        assert_eq!(inv_plus(&int(0), &rat(1, 1 << 30)), RootBracket::exact(int(1)));
        assert_eq!(inv_plus(&rat(3, 2), &rat(1, 1 << 30)), RootBracket::exact(int(2)));
    }
}
