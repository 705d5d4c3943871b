//! Closed-form block assembly of h_i and h_j from a pair of words, and the
//! independent per-iterate extraction used to cross-check it.

use super::engine::{backward_word, forward_word, ExactHenon, ForwardCoded, TwoSidedCoded};
use super::symbols::{symbol_of, SequenceKind, SideEnd, Symbol, SymbolSequence};
use super::word::{CoordinateWord, WordStatus};
use super::{CodingError, SeqSide};
use crate::map::{ExactPoint, HomPoint, MapConfig};

/// Symbols a side can produce, and whether they end the orbit.
struct Generated {
    symbols: Vec<Symbol>,
    terminated: bool,
}

fn two(sign: i64) -> Symbol {
    Symbol::signed(sign, 2)
}

fn one(sign: i64) -> Symbol {
    Symbol::signed(sign, 1)
}

fn fit(side: SeqSide, g: Generated, window: usize) -> Result<(Vec<Symbol>, SideEnd), CodingError> {
    let Generated { mut symbols, terminated } = g;
    if terminated && symbols.len() <= window {
        return Ok((symbols, SideEnd::Terminated));
    }
    if symbols.len() < window {
        return Err(CodingError::WindowExceedsWords { side, requested: window, fillable: symbols.len() });
    }
    symbols.truncate(window);
    Ok((symbols, SideEnd::Truncated(window)))
}

/// i-blocks in time order: (|e|-1) twos then a one per entry. A finite word puts
/// 0 in place of its last one; a truncated word's last one is not yet known.
fn i_future(wi: &CoordinateWord, limit: usize) -> Generated {
    let n = wi.entries().len();
    let mut out = Vec::new();
    for (k, &e) in wi.entries().iter().enumerate() {
        let s = e.signum();
        for _ in 1..e.abs() {
            out.push(two(s));
            if out.len() > limit {
                return Generated { symbols: out, terminated: false };
            }
        }
        if k + 1 < n {
            out.push(one(s));
        } else if wi.is_finite() {
            out.push(Symbol::ZERO);
        }
        if out.len() > limit {
            return Generated { symbols: out, terminated: false };
        }
    }
    Generated { symbols: out, terminated: wi.is_finite() }
}

/// h_i past, latest first. The j0 block ends next to the origin in a one
/// exactly when sign(j0) differs from sign(i0); older blocks end in a one.
fn i_past(sigma: i64, wj: &CoordinateWord, limit: usize) -> Generated {
    let mut out = Vec::new();
    for (m, &e) in wj.entries().iter().enumerate() {
        let s = e.signum();
        let lead = if m == 0 && s == sigma { two(s) } else { one(s) };
        out.push(lead);
        for _ in 1..e.abs() {
            out.push(two(s));
        }
        if out.len() > limit {
            return Generated { symbols: out, terminated: false };
        }
    }
    if wj.is_finite() {
        out.push(Symbol::ZERO);
    }
    Generated { symbols: out, terminated: wj.is_finite() }
}

/// h_i with separate window lengths for each side.
pub fn h_i_assemble_sides(
    wi: &CoordinateWord,
    wj: &CoordinateWord,
    past: usize,
    future: usize,
) -> Result<SymbolSequence, CodingError> {
    let Some(i0) = wi.first() else {
        return Ok(single_zero(SequenceKind::I));
    };
    let past_gen = if wj.is_empty() {
        Generated { symbols: vec![Symbol::ZERO], terminated: true }
    } else {
        i_past(i0.signum(), wj, past)
    };
    let (past_syms, past_end) = fit(SeqSide::Past, past_gen, past)?;
    let (future_syms, future_end) = fit(SeqSide::Future, i_future(wi, future), future)?;
    Ok(SymbolSequence { kind: SequenceKind::I, past: past_syms, future: future_syms, past_end, future_end })
}

pub fn h_i_assemble(wi: &CoordinateWord, wj: &CoordinateWord, window: usize) -> Result<SymbolSequence, CodingError> {
    h_i_assemble_sides(wi, wj, window, window)
}

/// j-blocks latest first: each run contributes (|e|-1) twos then its
/// opening one. The opening one of a truncated last run is not yet known.
fn j_reversed(wj: &CoordinateWord, limit: usize) -> Generated {
    let n = wj.entries().len();
    let mut out = Vec::new();
    for (k, &e) in wj.entries().iter().enumerate() {
        let s = e.signum();
        for _ in 1..e.abs() {
            out.push(two(s));
        }
        if k + 1 < n || wj.is_finite() {
            out.push(one(s));
        }
        if out.len() > limit {
            return Generated { symbols: out, terminated: false };
        }
    }
    if wj.is_finite() {
        out.push(Symbol::ZERO);
    }
    Generated { symbols: out, terminated: wj.is_finite() }
}

/// h_j future after time 0: i-blocks opening with a one, except that the i0
/// block opens with a two when sign(i0) = sign(j0). A finite i-word appends 0.
fn j_future_tail(j0: i64, wi: &CoordinateWord, limit: usize) -> Generated {
    let mut out = Vec::new();
    for (k, &e) in wi.entries().iter().enumerate() {
        let s = e.signum();
        let lead = if k == 0 && s == j0.signum() { two(s) } else { one(s) };
        out.push(lead);
        for _ in 1..e.abs() {
            out.push(two(s));
        }
        if out.len() > limit {
            return Generated { symbols: out, terminated: false };
        }
    }
    if wi.is_finite() {
        out.push(Symbol::ZERO);
    }
    Generated { symbols: out, terminated: wi.is_finite() }
}

pub fn h_j_assemble_sides(
    wi: &CoordinateWord,
    wj: &CoordinateWord,
    past: usize,
    future: usize,
) -> Result<SymbolSequence, CodingError> {
    let Some(j0) = wj.first() else {
        return Ok(single_zero(SequenceKind::J));
    };
    let rev = j_reversed(wj, past + 1);
    let (now, older) = match rev.symbols.split_first() {
        Some((now, older)) => (Some(*now), older.to_vec()),
        None => (None, Vec::new()),
    };
    let past_gen = Generated { symbols: older, terminated: rev.terminated };
    let (past_syms, past_end) = fit(SeqSide::Past, past_gen, past)?;

    let future_gen = match now {
        None => Generated { symbols: Vec::new(), terminated: false },
        Some(now) => {
            let mut g = if wi.is_empty() && wi.is_finite() {
                Generated { symbols: vec![Symbol::ZERO], terminated: true }
            } else {
                j_future_tail(j0, wi, future)
            };
            g.symbols.insert(0, now);
            g
        }
    };
    let (future_syms, future_end) = fit(SeqSide::Future, future_gen, future)?;
    Ok(SymbolSequence { kind: SequenceKind::J, past: past_syms, future: future_syms, past_end, future_end })
}

pub fn h_j_assemble(wi: &CoordinateWord, wj: &CoordinateWord, window: usize) -> Result<SymbolSequence, CodingError> {
    h_j_assemble_sides(wi, wj, window, window)
}

/// The side of a point that sits on that coordinate's discontinuity.
fn single_zero(kind: SequenceKind) -> SymbolSequence {
    SymbolSequence {
        kind,
        past: Vec::new(),
        future: vec![Symbol::ZERO],
        past_end: SideEnd::Terminated,
        future_end: SideEnd::Terminated,
    }
}

fn or_empty(r: Result<CoordinateWord, CodingError>) -> Result<CoordinateWord, CodingError> {
    match r {
        Err(CodingError::OnDiscontinuity) => Ok(CoordinateWord::empty_finite()),
        other => other,
    }
}

/// Both words of a point at the given depth; a coordinate whose line contains
/// the point yields the empty finite word.
pub fn words_at<M: TwoSidedCoded>(
    m: &M,
    s: &M::State,
    depth: usize,
) -> Result<(CoordinateWord, CoordinateWord), CodingError> {
    Ok((or_empty(forward_word(m, s, depth))?, or_empty(backward_word(m, s, depth))?))
}

/// (h_i, h_j) for any two-sided coded map, each side filled to `window`.
pub fn h_with<M: TwoSidedCoded>(
    m: &M,
    s: &M::State,
    window: usize,
) -> Result<(SymbolSequence, SymbolSequence), CodingError> {
    let (wi, wj) = words_at(m, s, window + 2)?;
    Ok((h_i_assemble(&wi, &wj, window)?, h_j_assemble(&wi, &wj, window)?))
}

/// (h_i(p), h_j(p)) in exact arithmetic.
pub fn h(p: &ExactPoint, window: usize, cfg: &MapConfig) -> Result<(SymbolSequence, SymbolSequence), CodingError> {
    h_with(&ExactHenon { cfg: cfg.clone() }, &HomPoint::from_point(p), window)
}

/// Leading i-symbol from a depth-2 word: the first run's length decides 1 or 2,
/// and an orbit that stops after one step gives 0.
fn leading_i_symbol(w: &CoordinateWord) -> Result<Symbol, CodingError> {
    let i0 = w.first().ok_or(CodingError::OnDiscontinuity)?;
    if i0.abs() > 1 || w.entries().len() > 1 {
        return Ok(symbol_of(i0));
    }
    match w.status() {
        WordStatus::Finite => Ok(Symbol::ZERO),
        WordStatus::Truncated(_) => Err(CodingError::ExhaustedWord),
    }
}

fn leading_j_symbol(w: &CoordinateWord) -> Result<Symbol, CodingError> {
    let j0 = w.first().ok_or(CodingError::OnDiscontinuity)?;
    if j0.abs() == 1 && w.entries().len() == 1 && !w.is_finite() {
        return Err(CodingError::ExhaustedWord);
    }
    Ok(symbol_of(j0))
}

/// (h_i, h_j) by coding every iterate separately: the symbol at time n is the
/// leading symbol of the words of f^n(p). Only meaningful on orbits that stay
/// off both discontinuities throughout the window.
pub fn h_per_iterate_with<M: TwoSidedCoded>(
    m: &M,
    s: &M::State,
    window: usize,
) -> Result<(SymbolSequence, SymbolSequence), CodingError> {
    let mut states_fwd = vec![s.clone()];
    while states_fwd.len() < window {
        let next = m.forward(states_fwd.last().expect("nonempty"))?;
        states_fwd.push(next);
    }
    let mut states_bwd: Vec<M::State> = Vec::new();
    let mut cur = s.clone();
    for _ in 0..window {
        cur = m.backward(&cur)?;
        states_bwd.push(cur.clone());
    }
    let code = |st: &M::State| -> Result<(Symbol, Symbol), CodingError> {
        let wi = forward_word(m, st, 2)?;
        let wj = backward_word(m, st, 2)?;
        Ok((leading_i_symbol(&wi)?, leading_j_symbol(&wj)?))
    };
    let mut fi = Vec::new();
    let mut fj = Vec::new();
    for st in states_fwd.iter().take(window) {
        let (a, b) = code(st)?;
        fi.push(a);
        fj.push(b);
    }
    let mut pi = Vec::new();
    let mut pj = Vec::new();
    for st in &states_bwd {
        let (a, b) = code(st)?;
        pi.push(a);
        pj.push(b);
    }
    let end = SideEnd::Truncated(window);
    Ok((
        SymbolSequence { kind: SequenceKind::I, past: pi, future: fi, past_end: end, future_end: end },
        SymbolSequence { kind: SequenceKind::J, past: pj, future: fj, past_end: end, future_end: end },
    ))
}

pub fn h_per_iterate(
    p: &ExactPoint,
    window: usize,
    cfg: &MapConfig,
) -> Result<(SymbolSequence, SymbolSequence), CodingError> {
    h_per_iterate_with(&ExactHenon { cfg: cfg.clone() }, &HomPoint::from_point(p), window)
}

/// i_word of a point in exact arithmetic.
pub fn i_word(p: &ExactPoint, max_depth: usize, cfg: &MapConfig) -> Result<CoordinateWord, CodingError> {
    let m = ExactHenon { cfg: cfg.clone() };
    forward_word(&m, &HomPoint::from_point(p), max_depth)
}

/// j_word of a point in exact arithmetic.
pub fn j_word(p: &ExactPoint, max_depth: usize, cfg: &MapConfig) -> Result<CoordinateWord, CodingError> {
    let m = ExactHenon { cfg: cfg.clone() };
    backward_word(&m, &HomPoint::from_point(p), max_depth)
}

/// Future-only sequence of a one-dimensional forward coding.
pub(crate) fn forward_symbol_sequence<M: ForwardCoded>(
    m: &M,
    s: &M::State,
    window: usize,
) -> Result<SymbolSequence, CodingError> {
    one_sided_from_word(forward_word(m, s, window + 1), window)
}

/// Future-only sequence from a word examined to at least `window + 1` signs.
/// A point on the discontinuity codes as a lone 0.
pub(crate) fn one_sided_from_word(
    wi: Result<CoordinateWord, CodingError>,
    window: usize,
) -> Result<SymbolSequence, CodingError> {
    let wi = match wi {
        Err(CodingError::OnDiscontinuity) => return Ok(single_zero(SequenceKind::I)),
        other => other?,
    };
    let (future, future_end) = fit(SeqSide::Future, i_future(&wi, window), window)?;
    Ok(SymbolSequence { kind: SequenceKind::I, past: Vec::new(), future, past_end: SideEnd::Terminated, future_end })
}
