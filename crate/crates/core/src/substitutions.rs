//! Substitutions (free monoid morphisms) and their orbits.
//!
//! A [`Substitution`] is defined on every letter of an [`InverseAlphabet`].
//! The usual constructor extends the images of the positive letters to
//! their inverses by `σ(x⁻¹) = flip(σ(x))`, which makes σ commute with the
//! flip map. Plain monoid substitutions simply never meet inverse letters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrices::NonnegIntMatrix;
use crate::words::{flip, is_primitive, max_power_index, InverseAlphabet, Letter, Word};

/// Default bound on the length of any materialized word.
pub const DEFAULT_LENGTH_CAP: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: InverseAlphabet,
    images: Vec<Word>,
    flip_equivariant: bool,
}

/// Outcome of the bounded search for a shift-period of a fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeriodicityVerdict {
    /// `σ(period) = period^q` and the fixed point starts with `period³`,
    /// so the fixed point is `period^∞`.
    Periodic { period: Word, q: usize },
    /// No primitive prefix of length at most `bound` is a period. This is a
    /// bounded certificate only.
    NoPeriodUpTo { bound: usize },
}

/// Result of the orientation search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orientability {
    Orientable {
        /// One letter of each inverse pair, in symbol order.
        preferred: Vec<Letter>,
        /// σ restricted to the preferred letters. A symbol whose preferred
        /// letter is an inverse is renamed `x'`.
        induced: Substitution,
    },
    NonOrientable,
}

/// Collatz-Wielandt enclosure of a PF eigenvalue that contains no integer
/// eigenvalue of the transition matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IrrationalPf {
    pub lower: f64,
    pub upper: f64,
}

impl Substitution {
    /// Builds σ from the images of the positive letters, extended to
    /// inverses by flipping.
    pub fn new(alphabet: InverseAlphabet, positive_images: Vec<Word>) -> Result<Self> {
        if positive_images.len() != alphabet.rank() {
            return Err(Error::DimensionMismatch(
                positive_images.len(),
                alphabet.rank(),
            ));
        }
        let mut images = Vec::with_capacity(2 * alphabet.rank());
        for w in positive_images {
            check_letters(&alphabet, &w)?;
            let inverse = flip(&w);
            images.push(w);
            images.push(inverse);
        }
        Ok(Substitution {
            alphabet,
            images,
            flip_equivariant: true,
        })
    }

    /// Builds σ from explicit images of all `2k` letters, in letter-index
    /// order (`x`, `x⁻¹`, `y`, ...).
    pub fn with_all_images(alphabet: InverseAlphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != 2 * alphabet.rank() {
            return Err(Error::DimensionMismatch(images.len(), 2 * alphabet.rank()));
        }
        for w in &images {
            check_letters(&alphabet, w)?;
        }
        let flip_equivariant = images.chunks(2).all(|p| p[1] == p[0].flip());
        Ok(Substitution {
            alphabet,
            images,
            flip_equivariant,
        })
    }

    /// Convenience constructor: `rules` lists `(letter, image)` pairs; the
    /// alphabet is the left-hand sides in order.
    pub fn from_rules(rules: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<&str> = rules.iter().map(|r| r.0).collect();
        let alphabet = InverseAlphabet::new(&names)?;
        let images = rules
            .iter()
            .map(|r| alphabet.parse_word(r.1))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &InverseAlphabet {
        &self.alphabet
    }

    pub fn image(&self, letter: Letter) -> &Word {
        &self.images[letter.index()]
    }

    pub fn is_flip_equivariant(&self) -> bool {
        self.flip_equivariant
    }

    /// Length of `σ(w)` without building it.
    pub fn image_len(&self, w: &[Letter]) -> usize {
        w.iter().map(|l| self.images[l.index()].len()).sum()
    }

    pub fn apply(&self, w: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(self.image_len(w));
        for l in w {
            out.extend_from_slice(&self.images[l.index()]);
        }
        Word::new(out)
    }

    /// `σ^p(w)` under [`DEFAULT_LENGTH_CAP`].
    pub fn iterate(&self, w: &[Letter], p: usize) -> Result<Word> {
        self.iterate_capped(w, p, DEFAULT_LENGTH_CAP)
    }

    pub fn iterate_capped(&self, w: &[Letter], p: usize, cap: usize) -> Result<Word> {
        let mut cur = Word::new(w.to_vec());
        for _ in 0..p {
            if self.image_len(&cur) > cap {
                return Err(Error::LengthCap { cap });
            }
            cur = self.apply(&cur);
        }
        Ok(cur)
    }

    /// `(σ∘τ)(x) = σ(τ(x))`.
    pub fn compose(&self, tau: &Substitution) -> Result<Substitution> {
        if self.alphabet != tau.alphabet {
            return Err(Error::BasisMismatch);
        }
        let images = tau.images.iter().map(|w| self.apply(w)).collect();
        Substitution::with_all_images(self.alphabet.clone(), images)
    }

    /// Entry `(i, j)` counts occurrences of the `i`-th symbol, in either
    /// orientation, in the image of the `j`-th positive letter.
    pub fn transition_matrix(&self) -> NonnegIntMatrix {
        let k = self.alphabet.rank();
        let mut m = NonnegIntMatrix::zeros(k);
        for j in 0..k {
            for l in self.image(Letter::new(j, false)).iter() {
                *m.get_mut(l.symbol(), j) += 1u32;
            }
        }
        m
    }

    fn check_seed(&self, a: Letter) -> Result<()> {
        let img = self.image(a);
        if img.len() < 2 || img[0] != a {
            return Err(Error::NotPrefix(self.alphabet.name(a)));
        }
        Ok(())
    }

    /// Lazily growing prefix of the fixed point `σ^∞(a)`.
    pub fn fixed_point(&self, a: Letter) -> Result<FixedPointStream<'_>> {
        self.check_seed(a)?;
        Ok(FixedPointStream {
            sigma: self,
            seed: a,
            buffer: self.image(a).to_vec(),
            cursor: 1,
        })
    }

    /// The length-`len` prefix of `σ^∞(a)`.
    pub fn fixed_point_prefix(&self, a: Letter, len: usize) -> Result<Word> {
        let mut stream = self.fixed_point(a)?;
        Ok(Word::new(stream.prefix(len)?.to_vec()))
    }

    /// Searches the primitive prefixes `u` of `σ^∞(a)` with `|u| <= bound`
    /// for one with `σ(u) = u^q`, `q >= 2`, and `σ^∞(a)` starting with `u³`.
    pub fn detect_shift_period(&self, a: Letter, bound: usize) -> Result<PeriodicityVerdict> {
        let mut stream = self.fixed_point(a)?;
        for k in 1..=bound {
            let prefix = stream.prefix(3 * k)?;
            let u = &prefix[..k];
            if !is_primitive(u) || prefix[k..3 * k].chunks(k).any(|c| c != u) {
                continue;
            }
            let image = self.apply(u);
            if image.len() % k != 0 || image.len() / k < 2 {
                continue;
            }
            if image.chunks(k).all(|c| c == u) {
                return Ok(PeriodicityVerdict::Periodic {
                    period: Word::new(u.to_vec()),
                    q: image.len() / k,
                });
            }
        }
        Ok(PeriodicityVerdict::NoPeriodUpTo { bound })
    }

    /// Largest power index among `σ^p(a)` for `p <= depth`. The orbit is
    /// prefix-nested, so this is the index of `σ^depth(a)`.
    pub fn orbit_power_index(&self, a: Letter, depth: usize) -> Result<usize> {
        Ok(self
            .orbit_power_profile(a, depth)?
            .into_iter()
            .max()
            .unwrap_or(0))
    }

    /// Power index of each `σ^p(a)`, `p = 0..=depth`.
    pub fn orbit_power_profile(&self, a: Letter, depth: usize) -> Result<Vec<usize>> {
        self.check_seed(a)?;
        let mut cur = Word::new(vec![a]);
        let mut out = vec![max_power_index(&cur)];
        for _ in 0..depth {
            cur = self.iterate(&cur, 1)?;
            out.push(max_power_index(&cur));
        }
        Ok(out)
    }

    /// Certifies that no fixed point of a primitive σ is shift-periodic.
    ///
    /// A periodic fixed point `u^∞` forces `σ(u) = u^q`, making the letter
    /// count vector of `u` a positive eigenvector with integer eigenvalue
    /// `q`, hence `q = λ`. The check brackets λ between Collatz-Wielandt
    /// bounds and verifies exactly that no integer in the bracket is an
    /// eigenvalue. Returns `None` when σ is not primitive or λ may be an
    /// integer.
    pub fn irrational_pf_certificate(&self, tol: f64) -> Result<Option<IrrationalPf>> {
        let m = self.transition_matrix();
        if !m.is_primitive() {
            return Ok(None);
        }
        let pf = m.pf_eigenvalue(tol)?;
        let (lo, hi) = m.pf_enclosure(&pf.eigvec);
        let (lo, hi) = (lo - 1e-9 * lo.max(1.0), hi + 1e-9 * hi.max(1.0));
        let first = lo.floor().max(1.0) as i64;
        let last = hi.ceil() as i64;
        if (first..=last).any(|k| (k as f64) >= lo && (k as f64) <= hi && m.has_eigenvalue(k)) {
            return Ok(None);
        }
        Ok(Some(IrrationalPf {
            lower: lo,
            upper: hi,
        }))
    }

    /// Looks for a preferred letter in each inverse pair such that the
    /// images of preferred letters only contain preferred letters.
    ///
    /// Choosing `x` forces every letter of `σ(x)`; the flip relation makes
    /// the contrapositive automatic, so this is 2-SAT with implications
    /// only. Pairs are fixed greedily in symbol order, positive first, with
    /// propagation after each choice; the result is the least witness in
    /// that order.
    pub fn orientability(&self) -> Result<Orientability> {
        if !self.flip_equivariant {
            return Err(Error::NotFlipEquivariant);
        }
        let k = self.alphabet.rank();
        // choice[i]: Some(false) = positive letter chosen, Some(true) = inverse.
        let mut choice: Vec<Option<bool>> = vec![None; k];
        for i in 0..k {
            if choice[i].is_some() {
                continue;
            }
            let mut done = false;
            for inverted in [false, true] {
                let mut trial = choice.clone();
                if self.propagate(Letter::new(i, inverted), &mut trial) {
                    choice = trial;
                    done = true;
                    break;
                }
            }
            if !done {
                return Ok(Orientability::NonOrientable);
            }
        }
        let preferred: Vec<Letter> = choice
            .iter()
            .enumerate()
            .map(|(i, c)| Letter::new(i, c.unwrap_or(false)))
            .collect();
        let names: Vec<String> = preferred
            .iter()
            .map(|&l| {
                let base = &self.alphabet.names()[l.symbol()];
                if l.is_inverse() {
                    format!("{base}'")
                } else {
                    base.clone()
                }
            })
            .collect();
        let alphabet = InverseAlphabet::new(&names)?;
        let images = preferred
            .iter()
            .map(|&l| {
                self.image(l)
                    .iter()
                    .map(|&x| Letter::new(x.symbol(), false))
                    .collect()
            })
            .collect();
        Ok(Orientability::Orientable {
            preferred,
            induced: Substitution::new(alphabet, images)?,
        })
    }

    fn propagate(&self, start: Letter, choice: &mut [Option<bool>]) -> bool {
        let mut stack = vec![start];
        while let Some(l) = stack.pop() {
            match choice[l.symbol()] {
                Some(c) if c == l.is_inverse() => continue,
                Some(_) => return false,
                None => {
                    choice[l.symbol()] = Some(l.is_inverse());
                    stack.extend(self.image(l).iter().copied());
                }
            }
        }
        true
    }
}

fn check_letters(alphabet: &InverseAlphabet, w: &[Letter]) -> Result<()> {
    match w.iter().find(|l| !alphabet.contains(**l)) {
        Some(l) => Err(Error::UnknownLetter(format!("#{}", l.index()))),
        None => Ok(()),
    }
}

/// Prefix buffer of `σ^∞(a)`.
///
/// The buffer always equals `σ(buffer[..cursor])`, so it is a prefix of the
/// fixed point; growing it appends the image of the letter at `cursor`.
#[derive(Clone, Debug)]
pub struct FixedPointStream<'a> {
    sigma: &'a Substitution,
    seed: Letter,
    buffer: Vec<Letter>,
    cursor: usize,
}

impl FixedPointStream<'_> {
    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn known(&self) -> &[Letter] {
        &self.buffer
    }

    /// Extends the buffer to at least `len` letters and returns that prefix.
    pub fn prefix(&mut self, len: usize) -> Result<&[Letter]> {
        while self.buffer.len() < len {
            if self.cursor >= self.buffer.len() {
                return Err(Error::NonGrowing(self.sigma.alphabet.name(self.seed)));
            }
            let l = self.buffer[self.cursor];
            self.buffer.extend_from_slice(self.sigma.image(l));
            self.cursor += 1;
        }
        Ok(&self.buffer[..len])
    }
}
