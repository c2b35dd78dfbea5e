use proptest::prelude::*;

use burntrack::matrices::NonnegIntMatrix;
use burntrack::substitutions::{PeriodicityVerdict, Substitution};
use burntrack::words::{flip, InverseAlphabet, Letter, Word};

fn alphabet(rank: usize) -> InverseAlphabet {
    InverseAlphabet::from_chars(&"abcd"[..rank]).unwrap()
}

/// Images of the positive letters, each a nonempty word of length <= 4.
fn images(rank: usize, signed: bool) -> impl Strategy<Value = Vec<Word>> {
    let letter = (0..rank, any::<bool>()).prop_map(move |(s, inv)| Letter::new(s, signed && inv));
    prop::collection::vec(
        prop::collection::vec(letter, 1..=4).prop_map(Word::new),
        rank,
    )
}

fn substitution(signed: bool) -> impl Strategy<Value = Substitution> {
    (1usize..=4).prop_flat_map(move |r| {
        images(r, signed).prop_map(move |im| Substitution::new(alphabet(r), im).unwrap())
    })
}

fn pair() -> impl Strategy<Value = (Substitution, Substitution)> {
    (1usize..=4).prop_flat_map(|r| {
        (images(r, false), images(r, false)).prop_map(move |(x, y)| {
            (
                Substitution::new(alphabet(r), x).unwrap(),
                Substitution::new(alphabet(r), y).unwrap(),
            )
        })
    })
}

/// σ with `σ(u) = u^q` for `u` a permutation of the letters: `u^q` is cut
/// into `|u|` nonempty blocks assigned to the letters of `u` in order. The
/// first block has at least two letters so the fixed point grows.
fn periodic() -> impl Strategy<Value = (Substitution, Vec<usize>, usize)> {
    (2usize..=4, 2usize..=3)
        .prop_flat_map(|(r, q)| {
            let order = Just((0..r).collect::<Vec<_>>()).prop_shuffle();
            let cuts = prop::sample::subsequence((2..r * q).collect::<Vec<_>>(), r - 1);
            (Just(r), Just(q), order, cuts)
        })
        .prop_map(|(r, q, order, cuts)| {
            let power: Vec<Letter> = order
                .iter()
                .cycle()
                .take(r * q)
                .map(|&s| Letter::new(s, false))
                .collect();
            let mut bounds = vec![0];
            bounds.extend(cuts);
            bounds.push(r * q);
            let mut im = vec![Word::empty(); r];
            for (k, &s) in order.iter().enumerate() {
                im[s] = Word::new(power[bounds[k]..bounds[k + 1]].to_vec());
            }
            (Substitution::new(alphabet(r), im).unwrap(), order, q)
        })
}

fn column_sum(m: &NonnegIntMatrix, j: usize) -> usize {
    m.column_sum(j).to_string().parse().unwrap()
}

proptest! {
    #[test]
    fn matrix_of_composite_is_product((s, t) in pair()) {
        let st = s.compose(&t).unwrap();
        prop_assert_eq!(
            st.transition_matrix(),
            s.transition_matrix().mul(&t.transition_matrix()).unwrap()
        );
    }

    #[test]
    fn iterate_lengths_are_column_sums(s in substitution(false), p in 0u32..=8) {
        let m = s.transition_matrix().pow(p);
        for a in s.alphabet().positive_letters() {
            let w = s.iterate(&[a], p as usize).unwrap();
            prop_assert_eq!(w.len(), column_sum(&m, a.symbol()));
        }
    }

    #[test]
    fn iteration_commutes_with_flip(s in substitution(true), p in 0usize..=4,
                                    seed in prop::collection::vec((0usize..4, any::<bool>()), 0..6)) {
        let r = s.alphabet().rank();
        let w: Word = seed.into_iter().map(|(i, inv)| Letter::new(i % r, inv)).collect();
        prop_assert!(s.is_flip_equivariant());
        prop_assert_eq!(
            s.iterate(&flip(&w), p).unwrap(),
            flip(&s.iterate(&w, p).unwrap())
        );
    }

    #[test]
    fn fixed_point_prefixes_nest(s in substitution(false), l1 in 0usize..50, extra in 0usize..50) {
        let a = Letter::new(0, false);
        let image = s.apply(&[a]);
        prop_assume!(image.first() == Some(&a) && image.len() >= 2);
        let short = s.fixed_point_prefix(a, l1).unwrap();
        let long = s.fixed_point_prefix(a, l1 + extra).unwrap();
        prop_assert_eq!(&long[..l1], &short[..]);
        // σ fixes the infinite word, so the image of a prefix extends it
        prop_assert_eq!(&s.apply(&short)[..l1], &short[..]);
    }

    #[test]
    fn planted_periods_are_found((s, order, q) in periodic()) {
        let u: Word = order.iter().map(|&i| Letter::new(i, false)).collect();
        let verdict = s.detect_shift_period(u[0], order.len()).unwrap();
        prop_assert_eq!(verdict, PeriodicityVerdict::Periodic { period: u, q });
        let m = s.transition_matrix();
        if m.is_primitive() {
            let pf = m.pf_eigenvalue(1e-12).unwrap();
            prop_assert!((pf.lambda - q as f64).abs() <= 1e-9, "lambda {} q {}", pf.lambda, q);
        }
    }
}
