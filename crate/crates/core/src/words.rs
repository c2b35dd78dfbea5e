//! Words over inverse-closed alphabets.
//!
//! Letters are interned: an [`InverseAlphabet`] with `k` named symbols owns
//! `2k` letters, where the letter with index `2i` is the `i`-th symbol and
//! `2i + 1` is its formal inverse. Inversion is therefore a bit flip and is
//! fixed-point free by construction.
//!
//! Textual syntax: whitespace-separated tokens, each a letter name, `x^-1`,
//! `inv(x)`, or an uppercase single character `X` standing for the inverse of
//! `x`. A token that is not a name is read character by character, so
//! `abaab` and `a b a a b` denote the same word over single-character names.
//! The token `1` is the empty word.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};

/// A letter of an [`InverseAlphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter(u32);

impl Letter {
    pub fn new(symbol: usize, inverted: bool) -> Self {
        Letter((symbol as u32) << 1 | inverted as u32)
    }

    /// Rebuilds a letter from [`Letter::index`].
    pub fn from_index(index: usize) -> Self {
        Letter(index as u32)
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Index of the underlying symbol (shared by the letter and its inverse).
    #[inline]
    pub fn symbol(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// The non-inverted letter of the pair.
    #[inline]
    pub fn positive(self) -> Self {
        Letter(self.0 & !1)
    }

    /// Dense index in `0..2k`, usable for table lookups.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Optional tag carried by a symbol and its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Color {
    Yellow,
    Red,
}

/// A finite set of named symbols together with their formal inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseAlphabet {
    names: Vec<String>,
    colors: Vec<Option<Color>>,
    lookup: HashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "1"
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '^' | '(' | ')' | '#' | ':' | ','))
}

impl InverseAlphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut lookup = HashMap::new();
        let mut owned = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if !valid_name(name) {
                return Err(Error::InvalidName(name.to_string()));
            }
            if lookup.insert(name.to_string(), i).is_some() {
                return Err(Error::DuplicateName(name.to_string()));
            }
            owned.push(name.to_string());
        }
        Ok(InverseAlphabet {
            colors: vec![None; owned.len()],
            names: owned,
            lookup,
        })
    }

    /// Alphabet whose symbols are the characters of `symbols`.
    pub fn from_chars(symbols: &str) -> Result<Self> {
        let names: Vec<String> = symbols.chars().map(String::from).collect();
        Self::new(&names)
    }

    pub fn with_colors(mut self, colors: Vec<Option<Color>>) -> Result<Self> {
        if colors.len() != self.names.len() {
            return Err(Error::DimensionMismatch(colors.len(), self.names.len()));
        }
        self.colors = colors;
        Ok(self)
    }

    /// Number of symbols (half the number of letters).
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn color(&self, letter: Letter) -> Option<Color> {
        self.colors[letter.symbol()]
    }

    /// Positive letters in alphabet order.
    pub fn positive_letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.rank()).map(|i| Letter::new(i, false))
    }

    /// All letters, each positive letter followed by its inverse.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..2 * self.rank()).map(Letter::from_index)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.symbol() < self.rank()
    }

    /// The positive letter with this name.
    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.lookup.get(name).map(|&i| Letter::new(i, false))
    }

    pub fn name(&self, letter: Letter) -> String {
        let base = &self.names[letter.symbol()];
        if letter.is_inverse() {
            format!("{base}^-1")
        } else {
            base.clone()
        }
    }

    fn single_char_names(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    fn parse_char(&self, c: char) -> Option<Letter> {
        let mut buf = [0u8; 4];
        if let Some(l) = self.letter(c.encode_utf8(&mut buf)) {
            return Some(l);
        }
        if c.is_uppercase() {
            let lower: String = c.to_lowercase().collect();
            return self.letter(&lower).map(Letter::inverse);
        }
        None
    }

    fn parse_token(&self, token: &str, out: &mut Vec<Letter>) -> Option<()> {
        if token == "1" && self.letter("1").is_none() {
            return Some(());
        }
        if let Some(l) = self.letter(token) {
            out.push(l);
            return Some(());
        }
        if let Some(inner) = token.strip_prefix("inv(").and_then(|t| t.strip_suffix(')')) {
            out.push(self.letter(inner)?.inverse());
            return Some(());
        }
        if let Some(base) = token.strip_suffix("^-1") {
            if let Some(l) = self.letter(base) {
                out.push(l.inverse());
                return Some(());
            }
        }
        let mut rest = token;
        while let Some(c) = rest.chars().next() {
            let mut letter = self.parse_char(c)?;
            rest = &rest[c.len_utf8()..];
            if let Some(tail) = rest.strip_prefix("^-1") {
                letter = letter.inverse();
                rest = tail;
            }
            out.push(letter);
        }
        Some(())
    }

    /// Parses the textual word syntax described in the module docs.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            self.parse_token(token, &mut out)
                .ok_or_else(|| Error::UnknownLetter(token.to_string()))?;
        }
        Ok(Word(out))
    }

    /// Compact rendering: letters are juxtaposed when every name is a single
    /// character, otherwise separated by spaces. The empty word prints as `1`.
    pub fn format(&self, word: &[Letter]) -> String {
        if self.single_char_names() {
            if word.is_empty() {
                return "1".to_string();
            }
            word.iter().map(|&l| self.name(l)).collect()
        } else {
            self.format_tokens(word)
        }
    }

    /// Space-separated rendering, always re-parseable.
    pub fn format_tokens(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        word.iter()
            .map(|&l| self.name(l))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finite sequence of letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn into_vec(self) -> Vec<Letter> {
        self.0
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn extend_from_slice(&mut self, letters: &[Letter]) {
        self.0.extend_from_slice(letters);
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    /// `self` repeated `m` times.
    pub fn pow(&self, m: usize) -> Word {
        Word(self.0.repeat(m))
    }

    /// Reverses the word and inverts every letter.
    pub fn flip(&self) -> Word {
        flip(&self.0)
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    /// Alphabet-free rendering (`x3`, `x3'` for inverses); use
    /// [`InverseAlphabet::format`] for named output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", l.symbol())?;
            if l.is_inverse() {
                f.write_str("'")?;
            }
        }
        Ok(())
    }
}

/// A freely reduced word: no letter is followed by its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(Word);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Word::empty())
    }

    /// Wraps `w` after checking that it is freely reduced.
    pub fn try_new(w: Word) -> Result<Self> {
        match w.windows(2).position(|p| p[1] == p[0].inverse()) {
            Some(i) => Err(Error::NotTight(i + 1)),
            None => Ok(GroupWord(w)),
        }
    }

    pub fn as_word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.flip())
    }

    /// Product in the free group.
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut acc = Reducer::with_capacity(self.len() + other.len());
        acc.push_all(&self.0);
        acc.push_all(&other.0);
        acc.finish()
    }

    /// Removes matching inverse letters from both ends. The result is a
    /// shortest representative of the conjugacy class.
    pub fn cyclic_reduce(&self) -> GroupWord {
        let w = &self.0;
        let (mut i, mut j) = (0, w.len());
        while j - i >= 2 && w[j - 1] == w[i].inverse() {
            i += 1;
            j -= 1;
        }
        GroupWord(Word(w[i..j].to_vec()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.len() < 2 || self.0[0] != self.0[self.len() - 1].inverse()
    }
}

impl Deref for GroupWord {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

/// Incremental free reduction: pushing a letter cancels it against the
/// current last letter when they are mutually inverse.
#[derive(Debug, Default, Clone)]
pub struct Reducer(Vec<Letter>);

impl Reducer {
    pub fn with_capacity(n: usize) -> Self {
        Reducer(Vec::with_capacity(n))
    }

    #[inline]
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn push_all(&mut self, w: &[Letter]) {
        for &l in w {
            self.push(l);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn finish(self) -> GroupWord {
        GroupWord(Word(self.0))
    }
}

/// Free reduction by iterated cancellation of adjacent inverse pairs.
pub fn reduce(w: &[Letter]) -> GroupWord {
    let mut r = Reducer::with_capacity(w.len());
    r.push_all(w);
    r.finish()
}

/// Reversed word with every letter inverted.
pub fn flip(w: &[Letter]) -> Word {
    Word(w.iter().rev().map(|l| l.inverse()).collect())
}

/// Border array: `border[i]` is the length of the longest proper border of
/// `w[..i]`.
fn borders<T: Eq>(w: &[T]) -> Vec<usize> {
    let mut b = vec![0usize; w.len() + 1];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = b[k];
        }
        if w[i] == w[k] {
            k += 1;
        }
        b[i + 1] = k;
    }
    b
}

/// Smallest `p` dividing `|w|` with `w = w[..p]^(|w|/p)`.
fn root_len<T: Eq>(w: &[T]) -> usize {
    let n = w.len();
    let p = n - borders(w)[n];
    if n % p == 0 {
        p
    } else {
        n
    }
}

/// True when `w` is nonempty and not a proper power.
pub fn is_primitive<T: Eq>(w: &[T]) -> bool {
    !w.is_empty() && root_len(w) == w.len()
}

/// Writes `w = u^m` with `u` primitive and `m` maximal.
pub fn primitive_root(w: &[Letter]) -> Result<(Word, usize)> {
    if w.is_empty() {
        return Err(Error::TrivialWord);
    }
    let p = root_len(w);
    Ok((Word(w[..p].to_vec()), w.len() / p))
}

/// A maximal repetition `u^m` inside a word.
///
/// The run occupies `start .. start + stretch`; `stretch` may exceed
/// `exponent * |period|` by a fractional tail of fewer than `|period|`
/// letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerRun {
    pub start: usize,
    #[serde(skip)]
    pub period: Word,
    pub exponent: usize,
    pub stretch: usize,
}

impl PowerRun {
    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// End of the integer part `u^m`.
    pub fn end(&self) -> usize {
        self.start + self.exponent * self.period.len()
    }
}

/// Maximal periodic stretches with exponent at least 2, as
/// `(start, period length, stretch length)`.
///
/// For each shift `p` the word is scanned for maximal intervals on which
/// `w[i] == w[i + p]`; an interval of length `t` gives a stretch of length
/// `t + p`. A stretch is kept when it holds at least two periods and its
/// first `p` letters are primitive, which makes `p` its smallest period and
/// reports each stretch exactly once.
pub(crate) fn maximal_stretches<T: Eq>(w: &[T]) -> Vec<(usize, usize, usize)> {
    let n = w.len();
    let mut out = Vec::new();
    for p in 1..=n / 2 {
        let mut i = 0;
        while i + p < n {
            if w[i] != w[i + p] {
                i += 1;
                continue;
            }
            let s = i;
            while i + p < n && w[i] == w[i + p] {
                i += 1;
            }
            let len = i - s + p;
            if len >= 2 * p && is_primitive(&w[s..s + p]) {
                out.push((s, p, len));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Largest `m` such that some nonempty `u^m` is a factor of `w`.
///
/// By convention the empty word has index 0 and every other word at least 1.
pub fn max_power_index<T: Eq>(w: &[T]) -> usize {
    if w.is_empty() {
        return 0;
    }
    maximal_stretches(w)
        .into_iter()
        .map(|(_, p, len)| len / p)
        .max()
        .unwrap_or(1)
}

/// All maximal runs `u^m` with primitive `u` and `m >= min_exponent`,
/// sorted by start then period length.
pub fn find_power_runs(w: &[Letter], min_exponent: usize) -> Vec<PowerRun> {
    let min_exponent = min_exponent.max(2);
    maximal_stretches(w)
        .into_iter()
        .filter(|&(_, p, len)| len / p >= min_exponent)
        .map(|(start, p, len)| PowerRun {
            start,
            period: Word(w[start..start + p].to_vec()),
            exponent: len / p,
            stretch: len,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> InverseAlphabet {
        InverseAlphabet::from_chars("abcd").unwrap()
    }

    fn w(s: &str) -> Word {
        ab().parse_word(s).unwrap()
    }

    /// Triple loop over (start, period, count of consecutive copies).
    fn brute_index<T: Eq>(w: &[T]) -> usize {
        let n = w.len();
        let mut best = if n == 0 { 0 } else { 1 };
        for s in 0..n {
            for p in 1..=(n - s) / 2 {
                let mut m = 1;
                while s + (m + 1) * p <= n && w[s + m * p..s + (m + 1) * p] == w[s..s + p] {
                    m += 1;
                }
                best = best.max(m);
            }
        }
        best
    }

    #[test]
    fn parse_and_format() {
        let a = ab();
        assert_eq!(
            a.parse_word("a b^-1 inv(c) D").unwrap(),
            a.parse_word("aB c^-1 d^-1").unwrap()
        );
        assert_eq!(a.format(&w("a B")), "ab^-1");
        assert_eq!(a.format(&Word::empty()), "1");
        assert!(a.parse_word("1").unwrap().is_empty());
        assert!(matches!(a.parse_word("a z"), Err(Error::UnknownLetter(_))));
        let long = InverseAlphabet::new(&["e1", "e2"]).unwrap();
        let x = long.parse_word("e1 e2^-1 inv(e1)").unwrap();
        assert_eq!(long.format(&x), "e1 e2^-1 e1^-1");
        assert_eq!(long.parse_word(&long.format(&x)).unwrap(), x);
    }

    #[test]
    fn alphabet_rejects_bad_names() {
        assert!(matches!(
            InverseAlphabet::new(&["a", "a"]),
            Err(Error::DuplicateName(_))
        ));
        assert!(matches!(
            InverseAlphabet::new(&["a^"]),
            Err(Error::InvalidName(_))
        ));
        assert!(matches!(
            InverseAlphabet::new(&["1"]),
            Err(Error::InvalidName(_))
        ));
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&w("a b B")).as_word(), &w("a"));
        assert!(reduce(&w("a A")).is_empty());
        assert_eq!(reduce(&w("aba")).as_word(), &w("aba"));
        assert_eq!(reduce(&w("ab BA c")).as_word(), &w("c"));
    }

    #[test]
    fn flip_examples() {
        assert_eq!(w("ab").flip(), w("B A"));
        assert_eq!(Word::empty().flip(), Word::empty());
        assert_eq!(w("a").flip(), w("A"));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(&w("abab")).unwrap(), (w("ab"), 2));
        assert_eq!(primitive_root(&w("aba")).unwrap(), (w("aba"), 1));
        assert_eq!(primitive_root(&w("aaa")).unwrap(), (w("a"), 3));
        assert_eq!(primitive_root(&[]), Err(Error::TrivialWord));
    }

    #[test]
    fn power_index_examples() {
        assert_eq!(brute_index(&w("abaababa")), 2);
        assert_eq!(max_power_index(&w("abaababa")), 2);
        assert_eq!(max_power_index(&w("aaa")), 3);
        assert!(max_power_index(&w("abaababaabaababaababa")) < 4);
        assert_eq!(max_power_index::<Letter>(&[]), 0);
        assert_eq!(max_power_index(&w("c")), 1);
    }

    #[test]
    fn power_run_examples() {
        let runs = find_power_runs(&w("aaaaab"), 3);
        assert_eq!(runs.len(), 1);
        assert_eq!(
            (runs[0].start, runs[0].period.clone(), runs[0].exponent),
            (0, w("a"), 5)
        );
        assert!(find_power_runs(&w("abaababa"), 3).is_empty());
        let runs = find_power_runs(&w("abababc"), 2);
        assert_eq!(runs.len(), 1);
        assert_eq!(
            (runs[0].start, runs[0].period.clone(), runs[0].exponent),
            (0, w("ab"), 3)
        );
        assert_eq!(runs[0].stretch, 6);
    }

    #[test]
    fn conjugate_periods_reported_once() {
        // "abababa" is one stretch of period 2; "ba" shifts are not separate runs.
        let runs = find_power_runs(&w("abababa"), 2);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].stretch, 7);
        assert_eq!(runs[0].exponent, 3);
    }

    #[test]
    fn cyclic_reduction() {
        let g = reduce(&w("a b c A"));
        assert_eq!(g.cyclic_reduce().as_word(), &w("bc"));
        assert!(!g.is_cyclically_reduced());
    }

    #[test]
    fn exhaustive_index_matches_brute_force() {
        for n in 0..=14usize {
            for bits in 0u32..(1 << n) {
                let v: Vec<u8> = (0..n).map(|i| (bits >> i & 1) as u8).collect();
                assert_eq!(max_power_index(&v), brute_index(&v), "{v:?}");
            }
        }
    }

    #[test]
    fn exhaustive_flip_involution() {
        // letters a, A, b, B; the integration suite goes to length 12
        fn rec(prefix: &mut Vec<Letter>, depth: usize) {
            assert_eq!(flip(&flip(prefix)).as_slice(), prefix.as_slice());
            if depth == 0 {
                return;
            }
            for i in 0..4 {
                prefix.push(Letter::from_index(i));
                rec(prefix, depth - 1);
                prefix.pop();
            }
        }
        rec(&mut Vec::new(), 8);
    }
}
