//! Endomorphisms of free groups given by the images of a basis.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrices::bareiss_determinant;
use crate::substitutions::DEFAULT_LENGTH_CAP;
use crate::words::{reduce, GroupWord, InverseAlphabet, Letter, Reducer, Word};

/// A free group endomorphism `x ↦ images[x]` on the basis of `alphabet`,
/// extended to inverse letters by inverting the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMap {
    alphabet: InverseAlphabet,
    images: Vec<GroupWord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Growth {
    Exponential,
    Polynomial,
}

/// Signed letter counts: entry `(i, j)` is the exponent sum of the `i`-th
/// basis letter in the image of the `j`-th.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianizationMatrix(pub Vec<Vec<i64>>);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    /// `‖φ^depth(g)‖^(1/depth)`.
    pub estimate: f64,
    /// `‖φ^p(g)‖` for `p = 0..=depth`.
    pub lengths: Vec<usize>,
}

impl BasisMap {
    /// Images are freely reduced on construction.
    pub fn new(alphabet: InverseAlphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != alphabet.rank() {
            return Err(Error::DimensionMismatch(images.len(), alphabet.rank()));
        }
        for w in &images {
            if let Some(l) = w.iter().find(|l| !alphabet.contains(**l)) {
                return Err(Error::UnknownLetter(format!("#{}", l.index())));
            }
        }
        Ok(BasisMap {
            alphabet,
            images: images.iter().map(|w| reduce(w)).collect(),
        })
    }

    /// `rules` lists `(basis letter, image)` pairs in basis order.
    pub fn from_rules(rules: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<&str> = rules.iter().map(|r| r.0).collect();
        let alphabet = InverseAlphabet::new(&names)?;
        let images = rules
            .iter()
            .map(|r| alphabet.parse_word(r.1))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    pub fn identity(alphabet: InverseAlphabet) -> Self {
        let images = alphabet
            .positive_letters()
            .map(|l| GroupWord::try_new(Word::new(vec![l])).expect("single letter"))
            .collect();
        BasisMap { alphabet, images }
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn alphabet(&self) -> &InverseAlphabet {
        &self.alphabet
    }

    /// Image of a basis letter or its inverse.
    pub fn image(&self, letter: Letter) -> GroupWord {
        let w = &self.images[letter.symbol()];
        if letter.is_inverse() {
            w.inverse()
        } else {
            w.clone()
        }
    }

    pub fn images(&self) -> &[GroupWord] {
        &self.images
    }

    pub fn apply(&self, w: &[Letter]) -> GroupWord {
        self.apply_capped(w, usize::MAX).expect("uncapped")
    }

    pub fn apply_capped(&self, w: &[Letter], cap: usize) -> Result<GroupWord> {
        let mut acc = Reducer::default();
        for &l in w {
            let img = &self.images[l.symbol()];
            if l.is_inverse() {
                img.iter().rev().for_each(|x| acc.push(x.inverse()));
            } else {
                acc.push_all(img);
            }
            if acc.len() > cap {
                return Err(Error::LengthCap { cap });
            }
        }
        Ok(acc.finish())
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &BasisMap) -> Result<BasisMap> {
        if self.alphabet != other.alphabet {
            return Err(Error::BasisMismatch);
        }
        Ok(BasisMap {
            alphabet: self.alphabet.clone(),
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        })
    }

    /// `self^p` by repeated squaring.
    pub fn power(&self, mut p: u32) -> BasisMap {
        let mut base = self.clone();
        let mut acc = BasisMap::identity(self.alphabet.clone());
        while p > 0 {
            if p & 1 == 1 {
                acc = acc.compose(&base).expect("same basis");
            }
            p >>= 1;
            if p > 0 {
                base = base.compose(&base).expect("same basis");
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w[..] == [Letter::new(i, false)])
    }

    /// Both composites are the identity on every basis letter.
    pub fn verify_automorphism(&self, inverse: &BasisMap) -> bool {
        match (self.compose(inverse), inverse.compose(self)) {
            (Ok(a), Ok(b)) => a.is_identity() && b.is_identity(),
            _ => false,
        }
    }

    pub fn abelianization(&self) -> AbelianizationMatrix {
        let r = self.rank();
        let mut m = vec![vec![0i64; r]; r];
        for (j, w) in self.images.iter().enumerate() {
            for l in w.iter() {
                m[l.symbol()][j] += if l.is_inverse() { -1 } else { 1 };
            }
        }
        AbelianizationMatrix(m)
    }

    /// Rank-2 growth test: exponential iff `|trace(M²)| > 2` for the
    /// abelianization `M`.
    pub fn growth_rank2(&self) -> Result<Growth> {
        if self.rank() != 2 {
            return Err(Error::RankNotTwo(self.rank()));
        }
        let m = self.abelianization();
        let det = m.determinant();
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        if m.square().trace().abs() > 2 {
            Ok(Growth::Exponential)
        } else {
            Ok(Growth::Polynomial)
        }
    }

    /// Point estimate `‖φ^depth(g)‖^(1/depth)` of the growth rate of the
    /// conjugacy class of `g`, where `‖·‖` is cyclically reduced length.
    pub fn growth_rate_estimate(&self, g: &[Letter], depth: usize) -> Result<GrowthEstimate> {
        self.growth_rate_estimate_capped(g, depth, DEFAULT_LENGTH_CAP)
    }

    pub fn growth_rate_estimate_capped(
        &self,
        g: &[Letter],
        depth: usize,
        cap: usize,
    ) -> Result<GrowthEstimate> {
        if depth < 2 {
            return Err(Error::InvalidArgument("depth must be at least 2".into()));
        }
        let mut cur = reduce(g).cyclic_reduce();
        if cur.is_empty() {
            return Err(Error::TrivialWord);
        }
        let mut lengths = vec![cur.len()];
        for _ in 0..depth {
            // φ(cyclic reduction) is conjugate to φ(g), so reducing cyclically
            // at every step keeps the conjugacy class.
            cur = self.apply_capped(&cur, cap)?.cyclic_reduce();
            lengths.push(cur.len());
        }
        let last = *lengths.last().expect("nonempty") as f64;
        Ok(GrowthEstimate {
            estimate: last.powf(1.0 / depth as f64),
            lengths,
        })
    }
}

impl AbelianizationMatrix {
    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.size();
        let mut out = vec![vec![0i64; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[i][j] += self.0[i][k] * other.0[k][j];
                }
            }
        }
        AbelianizationMatrix(out)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn trace(&self) -> i64 {
        (0..self.size()).map(|i| self.0[i][i]).sum()
    }

    pub fn determinant(&self) -> i128 {
        let mut a: Vec<Vec<BigInt>> = self
            .0
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        bareiss_determinant(&mut a)
            .to_i128()
            .expect("determinant fits in i128")
    }
}

/// `n^(2(2^(r-1) - 1))`: after this many iterations a polynomially growing
/// automorphism of rank `r` acts trivially on the exponent-`n` quotient.
pub fn polynomial_order_bound(r: u32, n: u64) -> Result<BigUint> {
    if r == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "rank and exponent must be positive".into(),
        ));
    }
    if r > 32 {
        return Err(Error::InvalidArgument("rank too large".into()));
    }
    let exponent = 2 * ((1u64 << (r - 1)) - 1);
    let exponent =
        u32::try_from(exponent).map_err(|_| Error::InvalidArgument("rank too large".into()))?;
    Ok(num_traits::pow(BigUint::from(n), exponent as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> BasisMap {
        BasisMap::from_rules(&[("a", "ab"), ("b", "a")]).unwrap()
    }

    fn mixed() -> BasisMap {
        BasisMap::from_rules(&[("a", "a"), ("b", "ba"), ("c", "cbcd"), ("d", "c")]).unwrap()
    }

    fn dehn() -> BasisMap {
        BasisMap::from_rules(&[("a", "a"), ("b", "ba")]).unwrap()
    }

    fn family(n: usize) -> BasisMap {
        let ban = format!("b{}", "a".repeat(n));
        let a_img = format!("a{}", ban.repeat(n));
        BasisMap::from_rules(&[("a", &a_img), ("b", &ban)]).unwrap()
    }

    fn word(m: &BasisMap, s: &str) -> Word {
        m.alphabet().parse_word(s).unwrap()
    }

    fn show(m: &BasisMap, w: &[Letter]) -> String {
        m.alphabet().format(w)
    }

    #[test]
    fn apply_examples() {
        let p = mixed();
        assert_eq!(show(&p, &p.apply(&word(&p, "d"))), "c");
        let f = fib();
        let once = f.apply(&word(&f, "b"));
        assert_eq!(show(&f, &f.apply(&once)), "ab");
        assert!(f.apply(&[]).is_empty());
        assert_eq!(show(&f, &f.apply(&word(&f, "B"))), "a^-1");
    }

    #[test]
    fn powers_and_composition() {
        let f = fib();
        assert_eq!(show(&f, &f.power(4).apply(&word(&f, "b"))), "abaab");
        let id = BasisMap::identity(f.alphabet().clone());
        assert_eq!(f.compose(&id).unwrap(), f);
        assert_eq!(id.compose(&f).unwrap(), f);
        let p = mixed();
        assert_eq!(
            show(&p, &p.power(4).apply(&word(&p, "d"))),
            "cbcdbacbcdcbaacbcdbacbcdccbcd"
        );
        assert_eq!(p.power(0), BasisMap::identity(p.alphabet().clone()));
    }

    #[test]
    fn basis_mismatch() {
        let other = BasisMap::from_rules(&[("x", "x"), ("y", "y")]).unwrap();
        assert_eq!(fib().compose(&other), Err(Error::BasisMismatch));
    }

    #[test]
    fn automorphism_verification() {
        let f = fib();
        let inv = BasisMap::from_rules(&[("a", "b"), ("b", "B a")]).unwrap();
        assert!(f.verify_automorphism(&inv));
        let id = BasisMap::identity(f.alphabet().clone());
        assert!(id.verify_automorphism(&id));
        let collapse = BasisMap::from_rules(&[("a", "a"), ("b", "a")]).unwrap();
        assert!(!collapse.verify_automorphism(&inv));
        assert!(!collapse.verify_automorphism(&id));
    }

    #[test]
    fn abelianizations() {
        let m = family(2).abelianization();
        assert_eq!(m, AbelianizationMatrix(vec![vec![5, 2], vec![2, 1]]));
        assert_eq!(m.square().trace(), 34);
        assert_eq!(
            BasisMap::identity(InverseAlphabet::from_chars("abc").unwrap()).abelianization(),
            AbelianizationMatrix(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
        );
        assert_eq!(
            fib().abelianization(),
            AbelianizationMatrix(vec![vec![1, 1], vec![1, 0]])
        );
        assert_eq!(fib().abelianization().determinant(), -1);
        let signed = BasisMap::from_rules(&[("a", "B a B"), ("b", "b")]).unwrap();
        assert_eq!(
            signed.abelianization(),
            AbelianizationMatrix(vec![vec![1, 0], vec![-2, 1]])
        );
    }

    #[test]
    fn rank_two_growth() {
        assert_eq!(fib().growth_rank2().unwrap(), Growth::Exponential);
        assert_eq!(dehn().abelianization().square().trace(), 2);
        assert_eq!(dehn().growth_rank2().unwrap(), Growth::Polynomial);
        assert_eq!(family(2).growth_rank2().unwrap(), Growth::Exponential);
        assert_eq!(mixed().growth_rank2(), Err(Error::RankNotTwo(4)));
        let bad = BasisMap::from_rules(&[("a", "aa"), ("b", "b")]).unwrap();
        assert_eq!(bad.growth_rank2(), Err(Error::NotUnimodular(2)));
    }

    #[test]
    fn order_bound() {
        assert_eq!(polynomial_order_bound(2, 3).unwrap(), BigUint::from(9u32));
        assert_eq!(polynomial_order_bound(3, 2).unwrap(), BigUint::from(64u32));
        assert_eq!(polynomial_order_bound(1, 17).unwrap(), BigUint::from(1u32));
        assert!(polynomial_order_bound(0, 3).is_err());
    }

    #[test]
    fn growth_estimates() {
        let f = fib();
        let e = f.growth_rate_estimate(&word(&f, "b"), 12).unwrap();
        assert!((e.estimate - 1.618).abs() < 0.05, "{}", e.estimate);
        assert_eq!(e.lengths[..8], [1, 1, 2, 3, 5, 8, 13, 21]);
        let id = BasisMap::identity(f.alphabet().clone());
        assert_eq!(
            id.growth_rate_estimate(&word(&f, "ab"), 5)
                .unwrap()
                .estimate,
            2f64.powf(0.2)
        );
        let id_single = id.growth_rate_estimate(&word(&f, "a"), 7).unwrap();
        assert_eq!(id_single.estimate, 1.0);
        let d = dehn();
        let e = d.growth_rate_estimate(&word(&d, "b"), 12).unwrap();
        // ‖φ^p(b)‖ = ‖b a^p‖ = p + 1
        assert_eq!(e.lengths, (1..=13).collect::<Vec<_>>());
        assert!((e.estimate - 13f64.powf(1.0 / 12.0)).abs() < 1e-12);
        let deeper = d.growth_rate_estimate(&word(&d, "b"), 40).unwrap();
        assert!(deeper.estimate < e.estimate);
    }

    #[test]
    fn growth_estimate_uses_conjugacy_length() {
        // g = a b A is conjugate to b, so the identity map reports length 1.
        let id = BasisMap::identity(InverseAlphabet::from_chars("ab").unwrap());
        let e = id
            .growth_rate_estimate(&id.alphabet().parse_word("a b A").unwrap(), 3)
            .unwrap();
        assert_eq!(e.lengths, vec![1, 1, 1, 1]);
        assert_eq!(id.growth_rate_estimate(&[], 3), Err(Error::TrivialWord));
    }
}
