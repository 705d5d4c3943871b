//! The map f(x, y) = (x + 1/y, y - 1/y - x), its inverse, Jacobian and orbits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{gcd3, ratio_to_f64, Rational, Scalar, Sign};

/// Limits shared by every exact and float computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    /// Float-mode guard: |v| < epsilon counts as lying on a discontinuity.
    pub epsilon: f64,
    pub max_depth: usize,
    /// Abort when a coordinate's numerator plus denominator exceeds this many bits.
    pub max_bits: u64,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig { epsilon: 1e-12, max_depth: 64, max_bits: 1_000_000 }
    }
}

/// Which line an iterate fell on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Discontinuity {
    /// {y = 0}, where f is undefined.
    YZero,
    /// {x + y = 0}, where the inverse is undefined.
    AntiDiagonal,
    /// x = 0 for the one-dimensional map x - 1/x.
    Origin,
}

impl fmt::Display for Discontinuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discontinuity::YZero => write!(f, "y = 0"),
            Discontinuity::AntiDiagonal => write!(f, "x + y = 0"),
            Discontinuity::Origin => write!(f, "x = 0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("point ({x}, {y}) lies on the discontinuity {line}")]
    DiscontinuityHit { line: Discontinuity, x: String, y: String },
    #[error("operand of {bits} bits exceeds the limit of {limit} bits")]
    ResourceLimit { bits: u64, limit: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Serialize for Point<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Point", 2)?;
        st.serialize_field("x", &self.x.to_json())?;
        st.serialize_field("y", &self.y.to_json())?;
        st.end()
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Point<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            x: serde_json::Value,
            y: serde_json::Value,
        }
        let raw = Raw::deserialize(d)?;
        let conv =
            |v: &serde_json::Value| S::from_json(v).ok_or_else(|| serde::de::Error::custom(format!("bad scalar {v}")));
        Ok(Point { x: conv(&raw.x)?, y: conv(&raw.y)? })
    }
}

pub type ExactPoint = Point<Rational>;
pub type FloatPoint = Point<f64>;

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn to_f64(&self) -> FloatPoint {
        Point { x: self.x.to_f64(), y: self.y.to_f64() }
    }

    fn hit(&self, line: Discontinuity) -> MapError {
        MapError::DiscontinuityHit { line, x: self.x.render(), y: self.y.render() }
    }

    fn check_bits(&self, cfg: &MapConfig) -> Result<(), MapError> {
        let bits = self.x.bits().max(self.y.bits());
        if bits > cfg.max_bits {
            return Err(MapError::ResourceLimit { bits, limit: cfg.max_bits });
        }
        Ok(())
    }
}

impl ExactPoint {
    pub fn from_ints(x: i64, y: i64) -> Self {
        Point { x: Rational::from_integer(x.into()), y: Rational::from_integer(y.into()) }
    }
}

/// f(x, y) = (x + 1/y, y - 1/y - x).
pub fn apply_f<S: Scalar>(p: &Point<S>, cfg: &MapConfig) -> Result<Point<S>, MapError> {
    if p.y.sign(cfg.epsilon).is_zero() {
        return Err(p.hit(Discontinuity::YZero));
    }
    let inv = S::one() / p.y.clone();
    let out = Point { x: p.x.clone() + inv.clone(), y: p.y.clone() - inv - p.x.clone() };
    out.check_bits(cfg)?;
    Ok(out)
}

/// f^{-1}(x, y) = (x - 1/(x+y), x+y).
pub fn apply_f_inv<S: Scalar>(p: &Point<S>, cfg: &MapConfig) -> Result<Point<S>, MapError> {
    let s = p.x.clone() + p.y.clone();
    if s.sign(cfg.epsilon).is_zero() {
        return Err(p.hit(Discontinuity::AntiDiagonal));
    }
    let out = Point { x: p.x.clone() - S::one() / s.clone(), y: s };
    out.check_bits(cfg)?;
    Ok(out)
}

pub fn mirror<S: Scalar>(p: &Point<S>) -> Point<S> {
    Point { x: -p.x.clone(), y: -p.y.clone() }
}

/// Row-major 2x2 matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> Matrix2<S> {
    pub fn identity() -> Self {
        Matrix2 { a: S::one(), b: S::zero(), c: S::zero(), d: S::one() }
    }

    pub fn det(&self) -> S {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn trace(&self) -> S {
        self.a.clone() + self.d.clone()
    }

    /// self * rhs
    pub fn mul(&self, rhs: &Matrix2<S>) -> Matrix2<S> {
        Matrix2 {
            a: self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.c.clone(),
            b: self.a.clone() * rhs.b.clone() + self.b.clone() * rhs.d.clone(),
            c: self.c.clone() * rhs.a.clone() + self.d.clone() * rhs.c.clone(),
            d: self.c.clone() * rhs.b.clone() + self.d.clone() * rhs.d.clone(),
        }
    }
}

/// Df = [[1, -1/y^2], [-1, 1 + 1/y^2]].
pub fn jacobian<S: Scalar>(p: &Point<S>, cfg: &MapConfig) -> Result<Matrix2<S>, MapError> {
    if p.y.sign(cfg.epsilon).is_zero() {
        return Err(p.hit(Discontinuity::YZero));
    }
    let w = S::one() / (p.y.clone() * p.y.clone());
    Ok(Matrix2 { a: S::one(), b: -w.clone(), c: -S::one(), d: S::one() + w })
}

/// Exact point in homogeneous form (X : Y : Z), Z > 0.
///
/// Iterating f on reduced rationals spends almost all its time in gcds;
/// the triple form needs only multiplications and is reduced on output.
#[derive(Clone, Debug)]
pub struct HomPoint {
    x: BigInt,
    y: BigInt,
    z: BigInt,
}

impl HomPoint {
    pub fn from_point(p: &ExactPoint) -> Self {
        let z = p.x.denom() * p.y.denom();
        let x = p.x.numer() * p.y.denom();
        let y = p.y.numer() * p.x.denom();
        HomPoint { x, y, z }
    }

    pub fn from_ints(x: BigInt, y: BigInt, z: BigInt) -> Self {
        assert!(!z.is_zero(), "zero homogeneous denominator");
        if z.is_negative() {
            HomPoint { x: -x, y: -y, z: -z }
        } else {
            HomPoint { x, y, z }
        }
    }

    pub fn to_point(&self) -> ExactPoint {
        let g = gcd3(&self.x, &self.y, &self.z);
        let (x, y, z) = if g.is_one() || g.is_zero() {
            (self.x.clone(), self.y.clone(), self.z.clone())
        } else {
            (&self.x / &g, &self.y / &g, &self.z / &g)
        };
        Point { x: Rational::new(x, z.clone()), y: Rational::new(y, z) }
    }

    pub fn to_f64(&self) -> FloatPoint {
        Point { x: ratio_to_f64(&self.x, &self.z), y: ratio_to_f64(&self.y, &self.z) }
    }

    pub fn sign_y(&self) -> Sign {
        Sign::of_bigint(&self.y)
    }

    pub fn sign_x(&self) -> Sign {
        Sign::of_bigint(&self.x)
    }

    pub fn sign_sum(&self) -> Sign {
        Sign::of_bigint(&(&self.x + &self.y))
    }

    /// Bit size comparable to the reduced-rational measure (upper bound).
    pub fn bits(&self) -> u64 {
        self.x.bits().max(self.y.bits()) + self.z.bits()
    }

    fn checked(self, cfg: &MapConfig) -> Result<Self, MapError> {
        let bits = self.bits();
        if bits > cfg.max_bits {
            return Err(MapError::ResourceLimit { bits, limit: cfg.max_bits });
        }
        Ok(self)
    }

    fn hit(&self, line: Discontinuity) -> MapError {
        let p = self.to_point();
        MapError::DiscontinuityHit { line, x: p.x.render(), y: p.y.render() }
    }

    /// (X, Y, Z) -> (XY + Z^2, Y^2 - Z^2 - XY, ZY), renormalised to Z > 0.
    pub fn forward(&self, cfg: &MapConfig) -> Result<HomPoint, MapError> {
        if self.y.is_zero() {
            return Err(self.hit(Discontinuity::YZero));
        }
        let xy = &self.x * &self.y;
        let zz = &self.z * &self.z;
        let nx = &xy + &zz;
        let ny = &self.y * &self.y - &zz - &xy;
        let nz = &self.z * &self.y;
        HomPoint::from_ints(nx, ny, nz).checked(cfg)
    }

    /// (X, Y, Z) -> (X(X+Y) - Z^2, (X+Y)^2, Z(X+Y)), renormalised to Z > 0.
    pub fn backward(&self, cfg: &MapConfig) -> Result<HomPoint, MapError> {
        let s = &self.x + &self.y;
        if s.is_zero() {
            return Err(self.hit(Discontinuity::AntiDiagonal));
        }
        let nx = &self.x * &s - &self.z * &self.z;
        let nz = &self.z * &s;
        let ny = &s * &s;
        HomPoint::from_ints(nx, ny, nz).checked(cfg)
    }

    pub fn neg(&self) -> HomPoint {
        HomPoint { x: -&self.x, y: -&self.y, z: self.z.clone() }
    }

    pub fn cmp_x(&self, other: &HomPoint) -> Ordering {
        (&self.x * &other.z).cmp(&(&other.x * &self.z))
    }

    pub fn cmp_y(&self, other: &HomPoint) -> Ordering {
        (&self.y * &other.z).cmp(&(&other.y * &self.z))
    }

    /// Sign of x - q.
    pub fn sign_x_minus(&self, q: &Rational) -> Sign {
        Sign::of_bigint(&(&self.x * q.denom() - q.numer() * &self.z))
    }

    /// Sign of y - q.
    pub fn sign_y_minus(&self, q: &Rational) -> Sign {
        Sign::of_bigint(&(&self.y * q.denom() - q.numer() * &self.z))
    }
}

impl PartialEq for HomPoint {
    fn eq(&self, other: &Self) -> bool {
        &self.x * &other.z == &other.x * &self.z && &self.y * &other.z == &other.y * &self.z
    }
}

/// How the forward orbit ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForwardTermination {
    /// All requested steps were taken.
    Alive,
    /// y vanished at this time, so f is undefined there.
    HitYZero(i64),
    /// Stopped at the configured depth cap before the requested count.
    Truncated(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackwardTermination {
    Alive,
    HitAntiDiagonal(i64),
    Truncated(usize),
}

/// Orbit samples at times -m..=n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct OrbitRecord<S> {
    /// Times 0, 1, 2, ...
    pub forward: Vec<Point<S>>,
    /// Times -1, -2, ...
    pub backward: Vec<Point<S>>,
    pub forward_termination: ForwardTermination,
    pub backward_termination: BackwardTermination,
}

impl<S: Clone> OrbitRecord<S> {
    pub fn first_time(&self) -> i64 {
        -(self.backward.len() as i64)
    }

    pub fn last_time(&self) -> i64 {
        self.forward.len() as i64 - 1
    }

    pub fn point_at(&self, t: i64) -> Option<&Point<S>> {
        if t >= 0 {
            self.forward.get(t as usize)
        } else {
            self.backward.get((-t - 1) as usize)
        }
    }

    /// (time, point) pairs in increasing time order.
    pub fn timeline(&self) -> Vec<(i64, Point<S>)> {
        let mut out: Vec<(i64, Point<S>)> =
            self.backward.iter().enumerate().rev().map(|(k, p)| (-(k as i64) - 1, p.clone())).collect();
        out.extend(self.forward.iter().enumerate().map(|(k, p)| (k as i64, p.clone())));
        out
    }
}

/// One step of whichever representation an orbit runs on.
pub trait OrbitStepper: Clone {
    type Out: Clone;
    fn step_forward(&self, cfg: &MapConfig) -> Result<Self, MapError>;
    fn step_backward(&self, cfg: &MapConfig) -> Result<Self, MapError>;
    fn on_y_zero(&self, cfg: &MapConfig) -> bool;
    fn on_anti_diagonal(&self, cfg: &MapConfig) -> bool;
    fn output(&self) -> Point<Self::Out>;
}

impl OrbitStepper for HomPoint {
    type Out = Rational;
    fn step_forward(&self, cfg: &MapConfig) -> Result<Self, MapError> {
        self.forward(cfg)
    }
    fn step_backward(&self, cfg: &MapConfig) -> Result<Self, MapError> {
        self.backward(cfg)
    }
    fn on_y_zero(&self, _cfg: &MapConfig) -> bool {
        self.sign_y().is_zero()
    }
    fn on_anti_diagonal(&self, _cfg: &MapConfig) -> bool {
        self.sign_sum().is_zero()
    }
    fn output(&self) -> ExactPoint {
        self.to_point()
    }
}

impl OrbitStepper for FloatPoint {
    type Out = f64;
    fn step_forward(&self, cfg: &MapConfig) -> Result<Self, MapError> {
        apply_f(self, cfg)
    }
    fn step_backward(&self, cfg: &MapConfig) -> Result<Self, MapError> {
        apply_f_inv(self, cfg)
    }
    fn on_y_zero(&self, cfg: &MapConfig) -> bool {
        self.y.sign(cfg.epsilon).is_zero()
    }
    fn on_anti_diagonal(&self, cfg: &MapConfig) -> bool {
        (self.x + self.y).sign(cfg.epsilon).is_zero()
    }
    fn output(&self) -> FloatPoint {
        self.clone()
    }
}

/// Iterates forward `n_fwd` and backward `n_bwd` steps, recording where the orbit dies.
/// Only resource exhaustion is an error; discontinuities are recorded as data.
pub fn orbit_with<T: OrbitStepper>(
    start: &T,
    n_fwd: usize,
    n_bwd: usize,
    cfg: &MapConfig,
) -> Result<OrbitRecord<T::Out>, MapError> {
    let mut forward = vec![start.output()];
    let mut forward_termination = ForwardTermination::Alive;
    let mut cur = start.clone();
    for k in 0..n_fwd {
        if k >= cfg.max_depth {
            forward_termination = ForwardTermination::Truncated(cfg.max_depth);
            break;
        }
        if cur.on_y_zero(cfg) {
            forward_termination = ForwardTermination::HitYZero(k as i64);
            break;
        }
        cur = cur.step_forward(cfg)?;
        forward.push(cur.output());
    }
    let mut backward = Vec::new();
    let mut backward_termination = BackwardTermination::Alive;
    let mut cur = start.clone();
    for k in 0..n_bwd {
        if k >= cfg.max_depth {
            backward_termination = BackwardTermination::Truncated(cfg.max_depth);
            break;
        }
        if cur.on_anti_diagonal(cfg) {
            backward_termination = BackwardTermination::HitAntiDiagonal(-(k as i64));
            break;
        }
        cur = cur.step_backward(cfg)?;
        backward.push(cur.output());
    }
    Ok(OrbitRecord { forward, backward, forward_termination, backward_termination })
}

pub fn orbit(p: &ExactPoint, n_fwd: usize, n_bwd: usize, cfg: &MapConfig) -> Result<OrbitRecord<Rational>, MapError> {
    orbit_with(&HomPoint::from_point(p), n_fwd, n_bwd, cfg)
}

pub fn orbit_float(p: &FloatPoint, n_fwd: usize, n_bwd: usize, cfg: &MapConfig) -> Result<OrbitRecord<f64>, MapError> {
    orbit_with(p, n_fwd, n_bwd, cfg)
}
