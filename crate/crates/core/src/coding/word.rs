use std::fmt;

use serde::{Deserialize, Serialize};

use super::CodingError;
use crate::scalar::Sign;

/// Whether a word is complete or was cut at the extraction depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordStatus {
    /// Number of orbit signs examined; the last entry may still grow.
    Truncated(usize),
    /// The orbit reached the discontinuity; every entry is final.
    Finite,
}

/// Alternating-sign integer word i0 (+) i1 (+) ...
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateWord {
    entries: Vec<i64>,
    status: WordStatus,
}

impl CoordinateWord {
    pub fn new(entries: Vec<i64>, status: WordStatus) -> Result<Self, CodingError> {
        if let Some(k) = entries.iter().position(|&e| e == 0) {
            return Err(CodingError::InvalidWord(format!("entry {k} is zero")));
        }
        if let Some(k) = entries.windows(2).position(|w| (w[0] > 0) == (w[1] > 0)) {
            return Err(CodingError::InvalidWord(format!("entries {k} and {} do not alternate in sign", k + 1)));
        }
        Ok(CoordinateWord { entries, status })
    }

    pub fn finite(entries: Vec<i64>) -> Result<Self, CodingError> {
        Self::new(entries, WordStatus::Finite)
    }

    /// Truncated word whose depth is the total run length it covers.
    pub fn truncated(entries: Vec<i64>) -> Result<Self, CodingError> {
        let depth = entries.iter().map(|e| e.unsigned_abs() as usize).sum();
        Self::new(entries, WordStatus::Truncated(depth))
    }

    pub fn empty_finite() -> Self {
        CoordinateWord { entries: Vec::new(), status: WordStatus::Finite }
    }

    /// Signed run-length encoding of a nonzero sign sequence.
    pub fn from_signs(signs: &[Sign], status: WordStatus) -> Self {
        let mut entries: Vec<i64> = Vec::new();
        for s in signs {
            let v = s.as_i64();
            debug_assert!(v != 0);
            match entries.last_mut() {
                Some(last) if (*last > 0) == (v > 0) => *last += v,
                _ => entries.push(v),
            }
        }
        CoordinateWord { entries, status }
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn status(&self) -> WordStatus {
        self.status
    }

    pub fn is_finite(&self) -> bool {
        self.status == WordStatus::Finite
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first(&self) -> Option<i64> {
        self.entries.first().copied()
    }

    /// Sum of |entries|.
    pub fn total_len(&self) -> usize {
        self.entries.iter().map(|e| e.unsigned_abs() as usize).sum()
    }

    /// Run-length decoding back to the sign sequence.
    pub fn signs(&self) -> Vec<Sign> {
        self.entries.iter().flat_map(|&e| std::iter::repeat(Sign::of_i64(e)).take(e.unsigned_abs() as usize)).collect()
    }

    pub fn negate(&self) -> Self {
        CoordinateWord { entries: self.entries.iter().map(|e| -e).collect(), status: self.status }
    }

    /// True when the word starts with `prefix` and the last prefix run is known to be closed.
    pub fn matches_prefix(&self, prefix: &[i64]) -> bool {
        let k = prefix.len();
        if k == 0 {
            return true;
        }
        if self.entries.len() < k || self.entries[..k] != *prefix {
            return false;
        }
        self.entries.len() > k || self.is_finite()
    }
}

impl fmt::Display for CoordinateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", body.join("\u{2295}"))?;
        if let WordStatus::Truncated(_) = self.status {
            if !self.entries.is_empty() {
                write!(f, "\u{2295}")?;
            }
            write!(f, "\u{2026}")?;
        }
        Ok(())
    }
}

/// The action of f on the pair of words.
///
/// With sigma = sign(i0): the i-word loses one step from its first run,
/// the j-word gains one step of sign sigma at its front. An empty finite
/// j-word (a point on x + y = 0) becomes [2 sigma]: the image looks back
/// onto the anti-diagonal, which counts inclusively.
pub fn coordinate_step(
    wi: &CoordinateWord,
    wj: &CoordinateWord,
) -> Result<(CoordinateWord, CoordinateWord), CodingError> {
    let i0 = wi.first().ok_or(CodingError::OnDiscontinuity)?;
    let sigma = i0.signum();

    let mut ie = wi.entries.clone();
    if i0.abs() > 1 {
        ie[0] -= sigma;
    } else {
        if ie.len() == 1 && !wi.is_finite() {
            return Err(CodingError::ExhaustedWord);
        }
        ie.remove(0);
    }
    let i_status = match wi.status {
        WordStatus::Truncated(d) => WordStatus::Truncated(d.saturating_sub(1)),
        WordStatus::Finite => WordStatus::Finite,
    };

    let mut je = wj.entries.clone();
    match je.first_mut() {
        None => je.push(2 * sigma),
        Some(j0) if j0.signum() == sigma => *j0 += sigma,
        Some(_) => je.insert(0, sigma),
    }
    let j_status = match wj.status {
        WordStatus::Truncated(d) => WordStatus::Truncated(d + 1),
        WordStatus::Finite => WordStatus::Finite,
    };

    Ok((CoordinateWord { entries: ie, status: i_status }, CoordinateWord { entries: je, status: j_status }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> CoordinateWord {
        CoordinateWord::truncated(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_words() {
        assert!(CoordinateWord::finite(vec![2, 0]).is_err());
        assert!(CoordinateWord::finite(vec![2, 3]).is_err());
        assert!(CoordinateWord::finite(vec![2, -3, 1]).is_ok());
    }

    #[test]
    fn step_cases() {
        let (a, b) = coordinate_step(&t(&[3, -2]), &t(&[1, -4])).unwrap();
        assert_eq!((a.entries(), b.entries()), (&[2, -2][..], &[2, -4][..]));
        let (a, b) = coordinate_step(&t(&[1, -2]), &t(&[3, -4])).unwrap();
        assert_eq!((a.entries(), b.entries()), (&[-2][..], &[4, -4][..]));
        let (a, b) = coordinate_step(&t(&[2, -2]), &t(&[-1, 4])).unwrap();
        assert_eq!((a.entries(), b.entries()), (&[1, -2][..], &[1, -1, 4][..]));
    }

    #[test]
    fn step_exhaustion_and_finite_pop() {
        assert_eq!(coordinate_step(&t(&[1]), &t(&[1])), Err(CodingError::ExhaustedWord));
        let (a, _) = coordinate_step(&CoordinateWord::finite(vec![1]).unwrap(), &t(&[1])).unwrap();
        assert!(a.is_empty() && a.is_finite());
        let (_, b) = coordinate_step(&t(&[-2, 1]), &CoordinateWord::empty_finite()).unwrap();
        assert_eq!(b.entries(), &[-2]);
    }

    #[test]
    fn prefix_matching() {
        let w = t(&[2, -1, 3]);
        assert!(w.matches_prefix(&[2]));
        assert!(w.matches_prefix(&[2, -1]));
        assert!(!w.matches_prefix(&[2, -1, 3]));
        assert!(CoordinateWord::finite(vec![2, -1]).unwrap().matches_prefix(&[2, -1]));
        assert!(!w.matches_prefix(&[1]));
    }

    #[test]
    fn display() {
        assert_eq!(t(&[3, -2]).to_string(), "3\u{2295}-2\u{2295}\u{2026}");
        assert_eq!(CoordinateWord::finite(vec![1, -4]).unwrap().to_string(), "1\u{2295}-4");
    }
}
