//! Finite quotients given by a closed coset table, and the Burnside oracle.

use std::collections::VecDeque;

use serde::Serialize;

use super::coset::{todd_coxeter, CosetTable};
use crate::automorphisms::BasisMap;
use crate::error::{Error, Result};
use crate::words::{is_primitive, GroupWord, Letter, Word};

/// A finite group presented by its regular permutation representation.
///
/// Elements are coset indices; 0 is the identity.
#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    exponent: u32,
    relator_length: usize,
    table: CosetTable,
    representatives: Vec<Word>,
    certified: bool,
}

impl FiniteQuotient {
    /// Wraps a closed table, computing shortest representatives and checking
    /// that every element has order dividing `exponent`.
    pub fn from_table(table: CosetTable, exponent: u32, relator_length: usize) -> Self {
        let representatives = shortest_representatives(&table);
        let mut q = FiniteQuotient {
            exponent,
            relator_length,
            table,
            representatives,
            certified: false,
        };
        q.certified = q.check_exponent();
        q
    }

    pub fn rank(&self) -> usize {
        self.table.rank()
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    /// Every element satisfies `g^n = 1`.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Longest `w` whose power `w^n` was imposed as a relator.
    pub fn relator_length(&self) -> usize {
        self.relator_length
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// A shortest word (shortlex-least in letter order) for `g`.
    pub fn representative(&self, g: usize) -> &Word {
        &self.representatives[g]
    }

    pub fn eval(&self, w: &[Letter]) -> usize {
        self.table.trace(0, w)
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table.trace(g, &self.representatives[h])
    }

    pub fn inverse(&self, g: usize) -> usize {
        let rep = &self.representatives[g];
        rep.iter()
            .rev()
            .fold(0, |c, &l| self.table.act(c, l.inverse()))
    }

    pub fn pow(&self, g: usize, k: u64) -> usize {
        let rep = &self.representatives[g];
        (0..k).fold(0, |c, _| self.table.trace(c, rep))
    }

    /// Order of the element `g`.
    pub fn element_order(&self, g: usize) -> usize {
        let rep = &self.representatives[g];
        let mut c = self.table.trace(0, rep);
        let mut k = 1;
        while c != 0 {
            c = self.table.trace(c, rep);
            k += 1;
        }
        k
    }

    fn check_exponent(&self) -> bool {
        (0..self.order()).all(|g| self.pow(g, u64::from(self.exponent)) == 0)
    }
}

fn shortest_representatives(table: &CosetTable) -> Vec<Word> {
    let n = table.len();
    let mut reps: Vec<Option<Word>> = vec![None; n];
    reps[0] = Some(Word::empty());
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for x in 0..2 * table.rank() {
            let l = Letter::from_index(x);
            let d = table.act(c, l);
            if reps[d].is_none() {
                let mut w = reps[c].clone().expect("queued cosets have words");
                w.push(l);
                reps[d] = Some(w);
                queue.push_back(d);
            }
        }
    }
    reps.into_iter()
        .map(|w| w.expect("closed coset table is connected"))
        .collect()
}

/// Limits for [`burnside_oracle_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Coset limit for each enumeration attempt.
    pub max_cosets: usize,
    /// Longest base word whose power is imposed.
    pub max_relator_length: usize,
    /// Largest group order the oracle is asked to build.
    pub max_order: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_cosets: 1 << 21,
            max_relator_length: 8,
            max_order: 100_000,
        }
    }
}

/// Cyclically reduced, primitive words of length `1..=max_len` over `rank`
/// generators, one per class under rotation and inversion, each raised to
/// the power `n`. Sorted by base length, then letter order.
pub fn power_relators(rank: usize, n: u32, max_len: usize) -> Vec<GroupWord> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut current = Vec::with_capacity(len);
        collect_classes(rank, len, &mut current, &mut out);
    }
    out.into_iter()
        .map(|w: Vec<Letter>| {
            GroupWord::try_new(Word::new(w).pow(n as usize))
                .expect("powers of cyclically reduced words are reduced")
        })
        .collect()
}

fn collect_classes(rank: usize, len: usize, current: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
    if current.len() == len {
        if current[0] != current[len - 1].inverse()
            && is_primitive(current)
            && is_class_minimum(current)
        {
            out.push(current.clone());
        }
        return;
    }
    for x in 0..2 * rank {
        let l = Letter::from_index(x);
        if current.last().is_some_and(|&p| p == l.inverse()) {
            continue;
        }
        current.push(l);
        collect_classes(rank, len, current, out);
        current.pop();
    }
}

fn is_class_minimum(w: &[Letter]) -> bool {
    let n = w.len();
    let inv: Vec<Letter> = w.iter().rev().map(|l| l.inverse()).collect();
    for k in 0..n {
        for source in [w, &inv[..]] {
            let rotated = source[k..].iter().chain(&source[..k]);
            if rotated.lt(w.iter()) {
                return false;
            }
        }
    }
    true
}

/// Classical orders, used only to refuse oversized requests: `|B(r,2)| = 2^r`,
/// `|B(r,3)| = 3^(r + C(r,2) + C(r,3))`.
fn expected_order(rank: usize, n: u32) -> Option<u64> {
    let r = rank as u32;
    let exp = match n {
        2 => r,
        3 => r + r * r.saturating_sub(1) / 2 + r * r.saturating_sub(1) * r.saturating_sub(2) / 6,
        _ => return None,
    };
    u64::from(n).checked_pow(exp)
}

/// `B(rank, n)` for `n ∈ {2, 3}` with default limits.
pub fn burnside_oracle(rank: usize, n: u32) -> Result<FiniteQuotient> {
    burnside_oracle_with(rank, n, &OracleConfig::default())
}

/// Enumerates `⟨x_1..x_r | w^n : |w| ≤ L⟩` for `L = 1, 2, …` until an
/// enumeration closes and the resulting group has exponent `n`.
///
/// A closed quotient of exponent `n` is `B(r, n)`. Its relators are `n`-th
/// powers, so its kernel lies inside the kernel of `F_r → B(r, n)`; having
/// exponent `n`, its kernel contains every `n`-th power, hence equals it.
pub fn burnside_oracle_with(rank: usize, n: u32, config: &OracleConfig) -> Result<FiniteQuotient> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let bound = expected_order(rank, n).ok_or(Error::UnsupportedExponent(n))?;
    if bound > config.max_order {
        return Err(Error::InvalidArgument(format!(
            "B({rank},{n}) is too large for the configured cap of {}",
            config.max_order
        )));
    }
    let mut last_error = None;
    for len in 1..=config.max_relator_length {
        let relators = power_relators(rank, n, len);
        match todd_coxeter(rank, &relators, config.max_cosets) {
            Ok(table) => {
                let q = FiniteQuotient::from_table(table, n, len);
                if q.is_certified() {
                    return Ok(q);
                }
                last_error = Some(Error::CertificationFailed(len));
            }
            Err(e @ Error::CosetLimit { .. }) => last_error = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_error.unwrap_or(Error::CertificationFailed(config.max_relator_length)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InducedOrder {
    Order { k: u64 },
    ExceedsBound { max_k: u64 },
}

/// Smallest `k ≤ max_k` such that `φ^k` acts trivially on the generators of
/// `q`, i.e. the order of the automorphism of `q` induced by `φ`.
pub fn induced_order(phi: &BasisMap, q: &FiniteQuotient, max_k: u64) -> Result<InducedOrder> {
    if phi.rank() != q.rank() {
        return Err(Error::BasisMismatch);
    }
    let targets: Vec<usize> = (0..phi.rank())
        .map(|i| q.eval(&[Letter::new(i, false)]))
        .collect();
    // images of the generators under phi^k, as elements of q
    let mut current = targets.clone();
    for k in 1..=max_k {
        let next: Vec<usize> = (0..phi.rank())
            .map(|i| {
                phi.image(Letter::new(i, false)).iter().fold(0, |acc, l| {
                    let g = current[l.symbol()];
                    let g = if l.is_inverse() { q.inverse(g) } else { g };
                    q.mul(acc, g)
                })
            })
            .collect();
        current = next;
        if current == targets {
            return Ok(InducedOrder::Order { k });
        }
    }
    Ok(InducedOrder::ExceedsBound { max_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{reduce, InverseAlphabet};

    #[test]
    fn relator_classes() {
        let rels = power_relators(2, 1, 2);
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let shown: Vec<String> = rels.iter().map(|w| a.format(w)).collect();
        assert_eq!(shown, ["a", "b", "ab", "ab^-1"]);
        // rank 1: only a itself is primitive and cyclically reduced
        assert_eq!(power_relators(1, 3, 4).len(), 1);
    }

    #[test]
    fn small_oracles() {
        let q = burnside_oracle(2, 2).unwrap();
        assert_eq!(q.order(), 4);
        assert!(q.is_certified());
        let q = burnside_oracle(1, 3).unwrap();
        assert_eq!(q.order(), 3);
        let q = burnside_oracle(2, 3).unwrap();
        assert_eq!(q.order(), 27);
        assert!(matches!(
            burnside_oracle(2, 5),
            Err(Error::UnsupportedExponent(5))
        ));
    }

    #[test]
    fn quotient_arithmetic() {
        let q = burnside_oracle(2, 3).unwrap();
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let w = |s: &str| q.eval(&a.parse_word(s).unwrap());
        assert_eq!(w("aaa"), 0);
        assert_eq!(q.mul(w("ab"), w("B")), w("a"));
        assert_eq!(q.inverse(w("ab")), w("BA"));
        assert_ne!(w("ab"), w("ba"));
        for g in 0..q.order() {
            assert_eq!(q.eval(q.representative(g)), g);
            assert_eq!(q.mul(g, q.inverse(g)), 0);
            assert!(matches!(q.element_order(g), 1 | 3));
        }
    }

    #[test]
    fn uncertified_table() {
        // S3 has elements of order 2, so it is not of exponent 3
        let a = InverseAlphabet::from_chars("ab").unwrap();
        let rels: Vec<GroupWord> = ["aa", "bbb", "abab"]
            .iter()
            .map(|s| reduce(&a.parse_word(s).unwrap()))
            .collect();
        let t = todd_coxeter(2, &rels, 100).unwrap();
        assert!(!FiniteQuotient::from_table(t, 3, 0).is_certified());
    }

    #[test]
    fn induced_orders() {
        let q = burnside_oracle(2, 3).unwrap();
        let dehn = BasisMap::from_rules(&[("a", "a"), ("b", "b a")]).unwrap();
        assert_eq!(
            induced_order(&dehn, &q, 100).unwrap(),
            InducedOrder::Order { k: 3 }
        );
        let family3 =
            BasisMap::from_rules(&[("a", "a b a a a b a a a b a a a"), ("b", "b a a a")]).unwrap();
        assert_eq!(
            induced_order(&family3, &q, 100).unwrap(),
            InducedOrder::Order { k: 1 }
        );
        let id = BasisMap::from_rules(&[("a", "a"), ("b", "b")]).unwrap();
        assert_eq!(
            induced_order(&id, &q, 1).unwrap(),
            InducedOrder::Order { k: 1 }
        );
        assert_eq!(
            induced_order(&dehn, &q, 2).unwrap(),
            InducedOrder::ExceedsBound { max_k: 2 }
        );
        let rank1 = BasisMap::from_rules(&[("a", "a")]).unwrap();
        assert_eq!(induced_order(&rank1, &q, 3), Err(Error::BasisMismatch));
    }
}
