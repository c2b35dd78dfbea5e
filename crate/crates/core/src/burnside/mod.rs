//! Elementary moves, common-descendant search and finite Burnside quotients.
//!
//! An `(n, ξ)`-elementary move replaces a factor `u^m` of a reduced word,
//! with `u` primitive and `m > n/2 - ξ`, by `u^(m-n)` and reduces. It
//! multiplies the element by an `n`-th power, so it never changes the image
//! in the free Burnside group `B(r, n)`.
//!
//! For `n ∈ {2, 3}` the group `B(r, n)` is finite and [`burnside_oracle`]
//! builds it by coset enumeration.

mod coset;
mod quotient;
mod search;

pub use coset::{todd_coxeter, CosetTable, EnumerationStats};
pub use quotient::{
    burnside_oracle, burnside_oracle_with, induced_order, power_relators, FiniteQuotient,
    InducedOrder, OracleConfig,
};
pub use search::{common_descendant_search, MoveRecord, SearchBudget, SearchOutcome};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{find_power_runs, flip, reduce, GroupWord, PowerRun};

/// Exponent `n` and slack `ξ` of the elementary moves, with the derived
/// threshold `m_min`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveParams {
    n: u32,
    xi: Ratio<u64>,
    min_exponent: usize,
}

impl MoveParams {
    pub fn new(n: u32, xi: Ratio<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("exponent must be positive".into()));
        }
        // smallest integer strictly above n/2 - xi
        let half = Ratio::new(i128::from(n), 2);
        let xi_signed = Ratio::new(i128::from(*xi.numer()), i128::from(*xi.denom()));
        let threshold = half - xi_signed;
        let m_min = threshold.floor().to_integer() + 1;
        Ok(MoveParams {
            n,
            xi,
            min_exponent: m_min.max(1) as usize,
        })
    }

    /// Parameters with an integer slack.
    pub fn with_integer_xi(n: u32, xi: u64) -> Result<Self> {
        Self::new(n, Ratio::from_integer(xi))
    }

    /// Replaces the derived threshold, e.g. to exercise the symmetric
    /// `m ≥ n/4 - ξ/2` variant. Nothing is claimed about such moves beyond
    /// their exactness in `B(r, n)`.
    pub fn with_min_exponent(mut self, m_min: usize) -> Self {
        self.min_exponent = m_min.max(1);
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn xi(&self) -> Ratio<u64> {
        self.xi
    }

    /// Smallest admissible multiplicity `m`.
    pub fn min_exponent(&self) -> usize {
        self.min_exponent
    }
}

/// Parses a non-negative rational written as `3`, `3/2` or `1.25`.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidArgument(format!("`{text}` is not a non-negative rational"));
    let text = text.trim();
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac.parse::<u64>().ok()?))
            .ok_or_else(bad)?;
        return Ok(Ratio::new(num, den));
    }
    let r: Ratio<u64> = text.parse().map_err(|_| bad())?;
    Ok(r)
}

/// One applicable move: the maximal run `u^m` it consumes and the reduced
/// word it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementaryMove {
    pub run: PowerRun,
    #[serde(skip)]
    pub result: GroupWord,
}

impl ElementaryMove {
    pub fn position(&self) -> usize {
        self.run.start
    }

    pub fn multiplicity(&self) -> usize {
        self.run.exponent
    }
}

fn rewrite(w: &[crate::words::Letter], run: &PowerRun, n: u32) -> GroupWord {
    let m = run.exponent as i64;
    let target = m - i64::from(n);
    let replacement = if target >= 0 {
        run.period.pow(target as usize)
    } else {
        flip(&run.period).pow((-target) as usize)
    };
    let mut letters = Vec::with_capacity(w.len() + replacement.len());
    letters.extend_from_slice(&w[..run.start]);
    letters.extend_from_slice(&replacement);
    letters.extend_from_slice(&w[run.end()..]);
    reduce(&letters)
}

/// Every move available on `w`: one per maximal run `u^m` with
/// `m ≥ max(m_min, 2)`, taken at the start of the run, in run order.
///
/// Shifting the window along a run or shrinking `m` gives the same reduced
/// result, so one move per run loses nothing.
pub fn find_elementary_moves(w: &GroupWord, params: &MoveParams) -> Vec<ElementaryMove> {
    find_power_runs(w, params.min_exponent)
        .into_iter()
        .map(|run| {
            let result = rewrite(w, &run, params.n);
            ElementaryMove { run, result }
        })
        .collect()
}

/// Applies `mv` to `w`, failing with [`Error::StaleMove`] when `w` no
/// longer carries the consumed run.
pub fn apply_elementary_move(
    w: &GroupWord,
    mv: &ElementaryMove,
    params: &MoveParams,
) -> Result<GroupWord> {
    let run = &mv.run;
    if run.exponent < params.min_exponent || run.period.is_empty() || run.end() > w.len() {
        return Err(Error::StaleMove);
    }
    let p = run.period.len();
    let matches = (0..run.exponent).all(|k| {
        let s = run.start + k * p;
        w[s..s + p] == run.period[..]
    });
    if !matches {
        return Err(Error::StaleMove);
    }
    Ok(rewrite(w, run, params.n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::InverseAlphabet;

    fn gw(s: &str) -> GroupWord {
        let a = InverseAlphabet::from_chars("abc").unwrap();
        reduce(&a.parse_word(s).unwrap())
    }

    fn params(n: u32, xi: u64) -> MoveParams {
        MoveParams::with_integer_xi(n, xi).unwrap()
    }

    #[test]
    fn threshold() {
        assert_eq!(params(5, 1).min_exponent(), 2);
        assert_eq!(params(5, 0).min_exponent(), 3);
        assert_eq!(params(4, 0).min_exponent(), 3);
        assert_eq!(params(4, 10).min_exponent(), 1);
        let half = MoveParams::new(5, Ratio::new(1, 2)).unwrap();
        assert_eq!(half.min_exponent(), 3);
        assert!(MoveParams::with_integer_xi(0, 0).is_err());
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("3").unwrap(), Ratio::from_integer(3));
        assert_eq!(parse_ratio("3/2").unwrap(), Ratio::new(3, 2));
        assert_eq!(parse_ratio("1.25").unwrap(), Ratio::new(5, 4));
        assert_eq!(parse_ratio(".5").unwrap(), Ratio::new(1, 2));
        assert!(parse_ratio("-1").is_err());
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1.").is_err());
    }

    #[test]
    fn moves_found() {
        let p = params(5, 1);
        let moves = find_elementary_moves(&gw("aaaaaaab"), &p);
        assert!(moves
            .iter()
            .any(|m| m.run.period[..] == gw("a")[..] && m.run.exponent == 7));
        assert!(find_elementary_moves(&gw("ab"), &p).is_empty());
        let moves = find_elementary_moves(&gw("abababababababab c"), &p);
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].run.period[..], gw("ab")[..]);
        assert_eq!(moves[0].run.exponent, 8);
        assert_eq!(moves[0].result, gw("ababab c"));
    }

    #[test]
    fn moves_applied() {
        let p = params(5, 1);
        let w = gw("aaaaa");
        let mv = &find_elementary_moves(&w, &p)[0];
        assert!(apply_elementary_move(&w, mv, &p).unwrap().is_empty());

        let w = gw("aaab");
        let mv = &find_elementary_moves(&w, &p)[0];
        assert_eq!(apply_elementary_move(&w, mv, &p).unwrap(), gw("AAb"));

        let w = gw("abababababababab");
        let mv = &find_elementary_moves(&w, &p)[0];
        assert_eq!(apply_elementary_move(&w, mv, &p).unwrap(), gw("ababab"));
    }

    #[test]
    fn stale_move_rejected() {
        let p = params(5, 1);
        let mv = find_elementary_moves(&gw("aaab"), &p).remove(0);
        assert_eq!(
            apply_elementary_move(&gw("abab"), &mv, &p),
            Err(Error::StaleMove)
        );
        assert_eq!(
            apply_elementary_move(&gw("a"), &mv, &p),
            Err(Error::StaleMove)
        );
        let strict = params(5, 0);
        assert_eq!(
            apply_elementary_move(&gw("aaab"), &mv, &strict).unwrap(),
            gw("AAb")
        );
        let mv2 = find_elementary_moves(&gw("aab"), &p).remove(0);
        assert_eq!(
            apply_elementary_move(&gw("aab"), &mv2, &strict),
            Err(Error::StaleMove)
        );
    }

    #[test]
    fn moves_may_lengthen() {
        let p = params(9, 3);
        let w = gw("aab");
        let mv = &find_elementary_moves(&w, &p)[0];
        let out = apply_elementary_move(&w, mv, &p).unwrap();
        assert_eq!(out, gw("AAAAAAAb"));
        assert!(out.len() > w.len());
    }
}
