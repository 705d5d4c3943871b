//! Word extraction for any map with a forward (and optionally backward) side functional.

use super::word::{CoordinateWord, WordStatus};
use super::CodingError;
use crate::map::{apply_f, apply_f_inv, FloatPoint, HomPoint, MapConfig, MapError};
use crate::scalar::{Scalar, Sign};

/// A map whose forward orbit is coded by the sign of one functional.
pub trait ForwardCoded {
    type State: Clone;
    fn forward(&self, s: &Self::State) -> Result<Self::State, MapError>;
    /// Sign whose zero set is where `forward` is undefined.
    fn forward_side(&self, s: &Self::State) -> Sign;
}

/// A map with an inverse coded by a second functional.
pub trait TwoSidedCoded: ForwardCoded {
    fn backward(&self, s: &Self::State) -> Result<Self::State, MapError>;
    fn backward_side(&self, s: &Self::State) -> Sign;
}

/// Exact arithmetic on homogeneous triples.
#[derive(Clone, Debug, Default)]
pub struct ExactHenon {
    pub cfg: MapConfig,
}

impl ForwardCoded for ExactHenon {
    type State = HomPoint;
    fn forward(&self, s: &HomPoint) -> Result<HomPoint, MapError> {
        s.forward(&self.cfg)
    }
    fn forward_side(&self, s: &HomPoint) -> Sign {
        s.sign_y()
    }
}

impl TwoSidedCoded for ExactHenon {
    fn backward(&self, s: &HomPoint) -> Result<HomPoint, MapError> {
        s.backward(&self.cfg)
    }
    fn backward_side(&self, s: &HomPoint) -> Sign {
        s.sign_sum()
    }
}

/// Binary floats with the epsilon guard.
#[derive(Clone, Debug, Default)]
pub struct FloatHenon {
    pub cfg: MapConfig,
}

impl ForwardCoded for FloatHenon {
    type State = FloatPoint;
    fn forward(&self, s: &FloatPoint) -> Result<FloatPoint, MapError> {
        apply_f(s, &self.cfg)
    }
    fn forward_side(&self, s: &FloatPoint) -> Sign {
        s.y.sign(self.cfg.epsilon)
    }
}

impl TwoSidedCoded for FloatHenon {
    fn backward(&self, s: &FloatPoint) -> Result<FloatPoint, MapError> {
        apply_f_inv(s, &self.cfg)
    }
    fn backward_side(&self, s: &FloatPoint) -> Sign {
        (s.x + s.y).sign(self.cfg.epsilon)
    }
}

/// Run-length word of the forward side signs, examining at most `depth` iterates.
///
/// Landing on the zero set closes the word; that iterate is not counted.
pub fn forward_word<M: ForwardCoded>(m: &M, s: &M::State, depth: usize) -> Result<CoordinateWord, CodingError> {
    let depth = depth.max(1);
    let first = m.forward_side(s);
    if first.is_zero() {
        return Err(CodingError::OnDiscontinuity);
    }
    let mut signs = vec![first];
    let mut cur = s.clone();
    while signs.len() < depth {
        cur = m.forward(&cur)?;
        let sg = m.forward_side(&cur);
        if sg.is_zero() {
            return Ok(CoordinateWord::from_signs(&signs, WordStatus::Finite));
        }
        signs.push(sg);
    }
    Ok(CoordinateWord::from_signs(&signs, WordStatus::Truncated(depth)))
}

/// Run-length word of the backward side signs.
///
/// Landing on the zero set closes the word; that iterate counts in the current run.
pub fn backward_word<M: TwoSidedCoded>(m: &M, s: &M::State, depth: usize) -> Result<CoordinateWord, CodingError> {
    let depth = depth.max(1);
    let first = m.backward_side(s);
    if first.is_zero() {
        return Err(CodingError::OnDiscontinuity);
    }
    let mut signs = vec![first];
    let mut cur = s.clone();
    while signs.len() < depth {
        cur = m.backward(&cur)?;
        let sg = m.backward_side(&cur);
        if sg.is_zero() {
            signs.push(*signs.last().expect("nonempty"));
            return Ok(CoordinateWord::from_signs(&signs, WordStatus::Finite));
        }
        signs.push(sg);
    }
    Ok(CoordinateWord::from_signs(&signs, WordStatus::Truncated(depth)))
}
