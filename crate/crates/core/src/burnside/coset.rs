//! Todd-Coxeter coset enumeration over the trivial subgroup, HLT strategy.
//!
//! Cosets are scanned in index order; each live coset is traced through
//! every relator (defining new cosets where the trace stops) and then its
//! row is filled. Coincidences are merged with the usual union-find queue.
//! The procedure is deterministic for a fixed relator order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::words::{GroupWord, InverseAlphabet, Letter};

const NONE: u32 = u32::MAX;

/// Closed coset table of the trivial subgroup: a regular permutation
/// representation of the group. Row `c`, column `x.index()` is `c · x`;
/// coset 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    rank: usize,
    width: usize,
    cells: Vec<u32>,
    stats: EnumerationStats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Total cosets defined, including those later merged away.
    pub defined: usize,
    /// Largest number of simultaneously live cosets.
    pub max_live: usize,
}

impl CosetTable {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of cosets, which is the group order.
    pub fn len(&self) -> usize {
        self.cells.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn act(&self, coset: usize, letter: Letter) -> usize {
        self.cells[coset * self.width + letter.index()] as usize
    }

    /// Coset reached from `coset` by reading `word`.
    pub fn trace(&self, mut coset: usize, word: &[Letter]) -> usize {
        for &l in word {
            coset = self.act(coset, l);
        }
        coset
    }

    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    /// CSV export: one row per coset, one column per letter (generators
    /// and their inverses, in letter order).
    pub fn to_csv(&self, alphabet: &InverseAlphabet) -> String {
        let mut out = String::from("coset");
        for l in alphabet.letters().take(self.width) {
            out.push(',');
            out.push_str(&alphabet.name(l));
        }
        out.push('\n');
        for c in 0..self.len() {
            let _ = write!(out, "{c}");
            for x in 0..self.width {
                let _ = write!(out, ",{}", self.cells[c * self.width + x]);
            }
            out.push('\n');
        }
        out
    }
}

struct Enumerator {
    width: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    queue: Vec<u32>,
    limit: usize,
    live: usize,
    max_live: usize,
}

impl Enumerator {
    fn new(rank: usize, limit: usize) -> Self {
        let width = 2 * rank;
        Enumerator {
            width,
            table: vec![NONE; width],
            parent: vec![0],
            queue: Vec::new(),
            limit,
            live: 1,
            max_live: 1,
        }
    }

    fn total(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.width + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.width + x] = d;
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> Result<()> {
        if self.total() >= self.limit {
            return Err(Error::CosetLimit {
                limit: self.limit,
                defined: self.total(),
                live: self.live,
            });
        }
        let d = self.total() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat(NONE).take(self.width));
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        self.live += 1;
        self.max_live = self.max_live.max(self.live);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, k: u32, l: u32) {
        let (a, b) = (self.rep(k), self.rep(l));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.parent[hi as usize] = lo;
            self.queue.push(hi);
            self.live -= 1;
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.width {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                self.set(d, x ^ 1, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mux = self.get(mu, x);
                if mux != NONE {
                    self.merge(nu, mux);
                } else {
                    let nux = self.get(nu, x ^ 1);
                    if nux != NONE {
                        self.merge(mu, nux);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                    }
                }
            }
        }
        self.queue.clear();
    }

    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> Result<()> {
        let (mut f, mut i) = (c, 0usize);
        let (mut b, mut j) = (c, w.len());
        loop {
            while i < j {
                let t = self.get(f, w[i]);
                if t == NONE {
                    break;
                }
                f = t;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                let t = self.get(b, w[j - 1] ^ 1);
                if t == NONE {
                    break;
                }
                b = t;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn run(&mut self, relators: &[Vec<usize>]) -> Result<()> {
        let mut c = 0u32;
        while (c as usize) < self.total() {
            if self.alive(c) {
                for r in relators {
                    self.scan_and_fill(c, r)?;
                    if !self.alive(c) {
                        break;
                    }
                }
                if self.alive(c) {
                    for x in 0..self.width {
                        if self.get(c, x) == NONE {
                            self.define(c, x)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    fn compact(mut self, rank: usize) -> CosetTable {
        let total = self.total();
        let mut renumber = vec![NONE; total];
        let mut n = 0u32;
        for c in 0..total as u32 {
            if self.alive(c) {
                renumber[c as usize] = n;
                n += 1;
            }
        }
        let mut cells = Vec::with_capacity(n as usize * self.width);
        for c in 0..total as u32 {
            if !self.alive(c) {
                continue;
            }
            for x in 0..self.width {
                let d = self.get(c, x);
                let d = self.rep(d);
                cells.push(renumber[d as usize]);
            }
        }
        CosetTable {
            rank,
            width: self.width,
            cells,
            stats: EnumerationStats {
                defined: total,
                max_live: self.max_live,
            },
        }
    }
}

/// Enumerates the cosets of the trivial subgroup in
/// `⟨x_1..x_rank | relators⟩`.
///
/// Fails with [`Error::CosetLimit`] once more than `max_cosets` cosets have
/// been defined.
pub fn todd_coxeter(rank: usize, relators: &[GroupWord], max_cosets: usize) -> Result<CosetTable> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let mut rels = Vec::with_capacity(relators.len());
    for r in relators {
        if let Some(l) = r.iter().find(|l| l.symbol() >= rank) {
            return Err(Error::InvalidArgument(format!(
                "relator uses generator {} beyond rank {rank}",
                l.symbol()
            )));
        }
        if !r.is_cyclically_reduced() {
            return Err(Error::InvalidArgument(
                "relators must be cyclically reduced".into(),
            ));
        }
        if !r.is_empty() {
            rels.push(r.iter().map(|l| l.index()).collect::<Vec<_>>());
        }
    }
    let mut e = Enumerator::new(rank, max_cosets.max(1));
    e.run(&rels)?;
    Ok(e.compact(rank))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::reduce;

    fn rels(alphabet: &InverseAlphabet, words: &[&str]) -> Vec<GroupWord> {
        words
            .iter()
            .map(|w| reduce(&alphabet.parse_word(w).unwrap()))
            .collect()
    }

    #[test]
    fn cyclic_group() {
        let a = InverseAlphabet::from_chars("a").unwrap();
        let t = todd_coxeter(1, &rels(&a, &["aaa"]), 100).unwrap();
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn klein_four() {
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let t = todd_coxeter(2, &rels(&a, &["aa", "bb", "abab"]), 1000).unwrap();
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn exponent_three_rank_two() {
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let t = todd_coxeter(2, &rels(&a, &["aaa", "bbb", "ababab", "aBaBaB"]), 10_000).unwrap();
        assert_eq!(t.len(), 27);
    }

    #[test]
    fn symmetric_group() {
        // S3 = <a, b | a^2, b^3, (ab)^2>
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let t = todd_coxeter(2, &rels(&a, &["aa", "bbb", "abab"]), 1000).unwrap();
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn table_is_a_permutation_representation() {
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let t = todd_coxeter(2, &rels(&a, &["aa", "bbb", "abab"]), 1000).unwrap();
        for c in 0..t.len() {
            for l in a.letters() {
                assert_eq!(t.act(t.act(c, l), l.inverse()), c);
            }
        }
        let csv = t.to_csv(&a);
        assert!(csv.starts_with("coset,a,a^-1,b,b^-1\n"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn infinite_presentation_hits_limit() {
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let err = todd_coxeter(2, &rels(&a, &["aa", "bb"]), 500).unwrap_err();
        assert!(matches!(err, Error::CosetLimit { limit: 500, .. }));
    }

    #[test]
    fn trivial_and_free_cases() {
        let a = InverseAlphabet::from_chars("a").unwrap();
        assert_eq!(todd_coxeter(1, &rels(&a, &["a"]), 10).unwrap().len(), 1);
        assert!(todd_coxeter(1, &[], 10).is_err());
        assert!(todd_coxeter(1, &rels(&a, &["a A"]), 10).is_err());
    }
}
