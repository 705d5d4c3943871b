//! Two-word symbolic coding: coordinate words, symbol sequences, block
//! assembly and the commutation checks.

mod assemble;
mod engine;
mod symbols;
mod word;

use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
pub(crate) use assemble::{forward_symbol_sequence, one_sided_from_word};
pub use assemble::{
    h, h_i_assemble, h_i_assemble_sides, h_j_assemble, h_j_assemble_sides, h_per_iterate, h_per_iterate_with, h_with,
    i_word, j_word, words_at,
};
pub use engine::{backward_word, forward_word, ExactHenon, FloatHenon, ForwardCoded, TwoSidedCoded};
pub use symbols::{shift, sigma_membership, symbol_of, SequenceKind, SideEnd, Symbol, SymbolSequence};
pub use word::{coordinate_step, CoordinateWord, WordStatus};

use crate::map::{ExactPoint, HomPoint, MapConfig, MapError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeqSide {
    Past,
    Future,
}

impl std::fmt::Display for SeqSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeqSide::Past => write!(f, "past"),
            SeqSide::Future => write!(f, "future"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CodingError {
    #[error("point lies on the discontinuity of this coordinate")]
    OnDiscontinuity,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("word has no entry left to step")]
    ExhaustedWord,
    #[error("window of {requested} exceeds the {fillable} symbols the words determine on the {side} side")]
    WindowExceedsWords { side: SeqSide, requested: usize, fillable: usize },
    #[error("future side is empty")]
    EmptyFuture,
    #[error("invalid word: {0}")]
    InvalidWord(String),
}

/// Outcome of comparing shift(h(p)) with h(f(p)).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub window: usize,
    pub i_pass: bool,
    pub j_pass: bool,
    /// Set when f(p) is undefined and nothing was compared.
    pub skipped: Option<String>,
}

impl CommutationReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_none() && self.i_pass && self.j_pass
    }
}

/// Checks both shift relations on a window of `depth - 2` symbols per side,
/// which keeps every iterate used within `depth` steps of p.
pub fn verify_commutation(p: &ExactPoint, depth: usize, cfg: &MapConfig) -> Result<CommutationReport, CodingError> {
    let window = depth.saturating_sub(2).max(1);
    let m = ExactHenon { cfg: cfg.clone() };
    let s = HomPoint::from_point(p);
    let s1 = match s.forward(cfg) {
        Ok(s1) => s1,
        Err(MapError::DiscontinuityHit { .. }) => {
            return Ok(CommutationReport {
                window,
                i_pass: false,
                j_pass: false,
                skipped: Some("f(p) undefined".into()),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let (hi, hj) = h_with(&m, &s, window)?;
    let (hi1, hj1) = h_with(&m, &s1, window)?;
    let i_pass = shift(&hi).map(|a| a.agrees_with(&hi1)).unwrap_or(false);
    let j_pass = shift(&hj).map(|a| a.agrees_with(&hj1)).unwrap_or(false);
    Ok(CommutationReport { window, i_pass, j_pass, skipped: None })
}
