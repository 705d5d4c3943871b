use std::fmt;

use serde::{Deserialize, Serialize};

use super::CodingError;

/// A letter of the alphabet {-2, -1, 0, 1, 2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct Symbol(i8);

impl Symbol {
    pub const ZERO: Symbol = Symbol(0);

    pub fn new(v: i8) -> Option<Symbol> {
        (-2..=2).contains(&v).then_some(Symbol(v))
    }

    /// sign * magnitude, with sign in {-1, 1} and magnitude in {1, 2}.
    pub fn signed(sign: i64, magnitude: i8) -> Symbol {
        debug_assert!(sign == 1 || sign == -1);
        debug_assert!(magnitude == 1 || magnitude == 2);
        Symbol(if sign > 0 { magnitude } else { -magnitude })
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn sign(self) -> i8 {
        self.0.signum()
    }

    pub fn magnitude(self) -> i8 {
        self.0.abs()
    }

    pub fn negate(self) -> Symbol {
        Symbol(-self.0)
    }
}

impl TryFrom<i8> for Symbol {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        Symbol::new(v).ok_or_else(|| format!("{v} is not in the alphabet"))
    }
}

impl From<Symbol> for i8 {
    fn from(s: Symbol) -> i8 {
        s.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Symbol for a leading entry: |i0| > 1 codes 2, |i0| = 1 codes 1, signed.
pub fn symbol_of(i0: i64) -> Symbol {
    assert!(i0 != 0, "symbol_of needs a nonzero entry");
    Symbol::signed(i0.signum(), if i0.abs() == 1 { 1 } else { 2 })
}

/// Which coordinate's grammar a sequence follows.
///
/// In an i-sequence a run of equal-sign symbols closes with a 1; in a
/// j-sequence a run opens with one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    I,
    J,
}

/// How one side of a sequence ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideEnd {
    /// Cut at the window; the sequence continues.
    Truncated(usize),
    /// The orbit ended; nothing lies beyond.
    Terminated,
}

/// Two-sided window of symbols with the origin between `past` and `future`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSequence {
    pub kind: SequenceKind,
    /// Times -1, -2, ...
    pub past: Vec<Symbol>,
    /// Times 0, 1, ...
    pub future: Vec<Symbol>,
    pub past_end: SideEnd,
    pub future_end: SideEnd,
}

impl SymbolSequence {
    /// Symbols in increasing time order and the index of time 0.
    pub fn time_ordered(&self) -> (Vec<Symbol>, usize) {
        let mut out: Vec<Symbol> = self.past.iter().rev().copied().collect();
        let origin = out.len();
        out.extend(self.future.iter().copied());
        (out, origin)
    }

    pub fn values(&self) -> (Vec<i8>, Vec<i8>) {
        (self.past.iter().map(|s| s.value()).collect(), self.future.iter().map(|s| s.value()).collect())
    }

    pub fn negate(&self) -> Self {
        SymbolSequence {
            kind: self.kind,
            past: self.past.iter().map(|s| s.negate()).collect(),
            future: self.future.iter().map(|s| s.negate()).collect(),
            past_end: self.past_end,
            future_end: self.future_end,
        }
    }

    /// Compares the symbols both sequences determine.
    ///
    /// A terminated side only agrees with a side of the same length.
    pub fn agrees_with(&self, other: &SymbolSequence) -> bool {
        side_agrees(&self.past, self.past_end, &other.past, other.past_end)
            && side_agrees(&self.future, self.future_end, &other.future, other.future_end)
    }
}

fn side_agrees(a: &[Symbol], ae: SideEnd, b: &[Symbol], be: SideEnd) -> bool {
    let n = a.len().min(b.len());
    if a[..n] != b[..n] {
        return false;
    }
    let short_terminated = |len: usize, end: SideEnd, other_len: usize| end == SideEnd::Terminated && len < other_len;
    !(short_terminated(a.len(), ae, b.len()) || short_terminated(b.len(), be, a.len()))
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if matches!(self.past_end, SideEnd::Truncated(_)) {
            parts.push("\u{2026}".into());
        }
        parts.extend(self.past.iter().rev().map(|s| s.to_string()));
        parts.push(";".into());
        parts.extend(self.future.iter().map(|s| s.to_string()));
        if matches!(self.future_end, SideEnd::Truncated(_)) {
            parts.push("\u{2026}".into());
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Moves the origin one step forward.
pub fn shift(seq: &SymbolSequence) -> Result<SymbolSequence, CodingError> {
    let last_terminal = seq.future_end == SideEnd::Terminated && seq.future.len() == 1;
    if seq.future.is_empty() || last_terminal {
        return Err(CodingError::EmptyFuture);
    }
    let mut past = Vec::with_capacity(seq.past.len() + 1);
    past.push(seq.future[0]);
    past.extend_from_slice(&seq.past);
    let past_end = match seq.past_end {
        SideEnd::Truncated(d) => SideEnd::Truncated(d + 1),
        SideEnd::Terminated => SideEnd::Terminated,
    };
    let future_end = match seq.future_end {
        SideEnd::Truncated(d) => SideEnd::Truncated(d.saturating_sub(1)),
        SideEnd::Terminated => SideEnd::Terminated,
    };
    Ok(SymbolSequence { kind: seq.kind, past, future: seq.future[1..].to_vec(), past_end, future_end })
}

/// Membership in the admissible sequence space.
///
/// Zeros may only sit at the outer end of a terminated side; a nonempty
/// terminated side must end in one. Between nonzero neighbours (a, b) the
/// sign changes exactly when the 1 sits on the run boundary: |a| = 1 for
/// i-sequences, |b| = 1 for j-sequences.
pub fn sigma_membership(seq: &SymbolSequence) -> bool {
    let side_ok = |side: &[Symbol], end: SideEnd| -> bool {
        let zeros: Vec<usize> = side.iter().enumerate().filter(|(_, s)| s.is_zero()).map(|(k, _)| k).collect();
        match end {
            SideEnd::Truncated(_) => zeros.is_empty(),
            SideEnd::Terminated => side.is_empty() || zeros == [side.len() - 1],
        }
    };
    if !side_ok(&seq.past, seq.past_end) || !side_ok(&seq.future, seq.future_end) {
        return false;
    }
    let (all, _) = seq.time_ordered();
    all.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        if a.is_zero() || b.is_zero() {
            return true;
        }
        let flips = a.sign() != b.sign();
        match seq.kind {
            SequenceKind::I => flips == (a.magnitude() == 1),
            SequenceKind::J => flips == (b.magnitude() == 1),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(v: &[i8]) -> Vec<Symbol> {
        v.iter().map(|&x| Symbol::new(x).unwrap()).collect()
    }

    fn seq(kind: SequenceKind, past_time_order: &[i8], future: &[i8], fut_end: SideEnd) -> SymbolSequence {
        let mut past = syms(past_time_order);
        past.reverse();
        SymbolSequence {
            kind,
            past_end: SideEnd::Truncated(past.len()),
            past,
            future: syms(future),
            future_end: fut_end,
        }
    }

    #[test]
    fn symbol_map() {
        assert_eq!(symbol_of(3).value(), 2);
        assert_eq!(symbol_of(1).value(), 1);
        assert_eq!(symbol_of(-1).value(), -1);
        assert_eq!(symbol_of(-2).value(), -2);
    }

    #[test]
    fn membership_examples() {
        let tr = SideEnd::Truncated(4);
        assert!(sigma_membership(&seq(SequenceKind::I, &[], &[2, 2, 1, -2], tr)));
        assert!(!sigma_membership(&seq(SequenceKind::I, &[], &[2, 0, 2], tr)));
        assert!(!sigma_membership(&seq(SequenceKind::I, &[], &[2, 2, -2], tr)));
        assert!(sigma_membership(&seq(SequenceKind::I, &[2, 2], &[2, 0], SideEnd::Terminated)));
        assert!(sigma_membership(&seq(SequenceKind::J, &[-1, -2, -2, -2], &[1, 2, 2, 2, -1, -2], tr)));
        assert!(!sigma_membership(&seq(SequenceKind::J, &[], &[2, 2, 1, -2], tr)));
    }

    #[test]
    fn shift_moves_origin() {
        let s = seq(SequenceKind::I, &[1], &[2, 2], SideEnd::Truncated(2));
        let t = shift(&s).unwrap();
        assert_eq!(t.values(), (vec![2, 1], vec![2]));
        let u = shift(&t).unwrap();
        assert_eq!(u.values(), (vec![2, 2, 1], vec![]));
        assert_eq!(shift(&u), Err(CodingError::EmptyFuture));
        let term = seq(SequenceKind::I, &[], &[0], SideEnd::Terminated);
        assert_eq!(shift(&term), Err(CodingError::EmptyFuture));
    }

    #[test]
    fn display_form() {
        let s = seq(SequenceKind::I, &[-2, -1, 2], &[2, 2, 0], SideEnd::Terminated);
        assert_eq!(s.to_string(), "\u{2026} -2 -1 2 ; 2 2 0");
    }
}
