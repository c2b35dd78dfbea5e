use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use burntrack::automorphisms::BasisMap;
use burntrack::graphmap::{EdgePath, Graph, StratifiedGraphMap, StratumKind};
use burntrack::words::{Color, Letter, Word};

fn mixed_rose() -> StratifiedGraphMap {
    let mixed =
        BasisMap::from_rules(&[("a", "a"), ("b", "ba"), ("c", "cbcd"), ("d", "c")]).unwrap();
    StratifiedGraphMap::rose(&mixed, vec![1, 2, 3, 3]).unwrap()
}

fn two_vertex_cover() -> StratifiedGraphMap {
    let g = Graph::new(&["v0", "v1"], &[("y", 0, 1), ("c", 1, 0), ("d", 0, 1)]).unwrap();
    let e = g.edges().clone();
    let images = ["y", "cycdc", "dcd"]
        .map(|s| e.parse_word(s).unwrap())
        .to_vec();
    StratifiedGraphMap::new(g, vec![1, 2, 2], vec![0, 1], images).unwrap()
}

/// Tight path from vertex 0 picking, at each step, the `choice`-th
/// direction that does not backtrack.
fn walk(f: &StratifiedGraphMap, choices: &[usize]) -> EdgePath {
    let g = f.graph();
    let mut at = 0;
    let mut edges: Vec<Letter> = Vec::new();
    for &c in choices {
        let options: Vec<Letter> = g
            .edges()
            .letters()
            .filter(|&l| g.initial(l) == at && edges.last() != Some(&l.inverse()))
            .collect();
        let l = options[c % options.len()];
        edges.push(l);
        at = g.terminal(l);
    }
    g.path(Word::new(edges), Some(0)).unwrap()
}

fn maps() -> Vec<StratifiedGraphMap> {
    vec![mixed_rose(), two_vertex_cover()]
}

/// Rose on `a, b, c, d` with `a -> a`, `b -> b a^k` and red images over
/// `c, d` that start and end with a red letter, yellow runs in between.
fn random_single_exponential(rng: &mut StdRng) -> StratifiedGraphMap {
    loop {
        let k = rng.gen_range(1..=2);
        let mut images = vec!["a".to_string(), format!("b{}", "a".repeat(k))];
        for _ in 0..2 {
            let reds = rng.gen_range(2..=4);
            let mut img = String::new();
            for i in 0..reds {
                if i > 0 {
                    let yellow = ["", "a", "b", "A", "B", "ab", "ba"][rng.gen_range(0..7)];
                    img.push_str(yellow);
                }
                img.push(if rng.gen_bool(0.5) { 'c' } else { 'd' });
            }
            images.push(img);
        }
        let rules: Vec<(&str, &str)> = ["a", "b", "c", "d"]
            .iter()
            .zip(&images)
            .map(|(x, w)| (*x, w.as_str()))
            .collect();
        let Ok(phi) = BasisMap::from_rules(&rules) else {
            continue;
        };
        let Ok(f) = StratifiedGraphMap::rose(&phi, vec![1, 2, 3, 3]) else {
            continue;
        };
        let Ok(top) = f.top_exponential_stratum() else {
            continue;
        };
        if top.aperiodic != Some(true) {
            continue;
        }
        if f.check_rtt(4).map(|r| r.passed()) != Ok(true) {
            continue;
        }
        return f;
    }
}

/// Every tight path of length 1..=`max_len` from any vertex that is legal
/// in the top stratum.
fn red_legal_paths(f: &StratifiedGraphMap, max_len: usize) -> Vec<EdgePath> {
    let g = f.graph();
    let k = f.top_height();
    let mut out = Vec::new();
    let mut frontier: Vec<Word> = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in g.edges().letters() {
                if let Some(&last) = w.last() {
                    if l == last.inverse() || g.initial(l) != g.terminal(last) {
                        continue;
                    }
                }
                let v = w.concat(&[l]);
                if f.is_k_legal(&v, k) {
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().map(|w| g.path(w.clone(), None).unwrap()));
        frontier = next;
    }
    out
}

#[test]
fn red_commutation_on_random_maps() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut maps = vec![mixed_rose()];
    maps.extend((0..3).map(|_| random_single_exponential(&mut rng)));
    for f in &maps {
        let e = f.graph().edges();
        let images: Vec<String> = e
            .positive_letters()
            .map(|l| e.format(&f.image(l)))
            .collect();
        for alpha in red_legal_paths(f, 6) {
            for p in 0..=5 {
                assert_eq!(
                    f.red_commutation_check(&alpha, p),
                    Ok(true),
                    "map {images:?}, alpha {}, p {p}",
                    e.format(alpha.edges())
                );
            }
        }
    }
}

#[test]
fn induced_substitution_matrix_is_the_top_stratum_matrix() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut all = maps();
    all.extend((0..3).map(|_| random_single_exponential(&mut rng)));
    for f in &all {
        let top = f.top_exponential_stratum().unwrap();
        let sigma = f.induced_substitution().unwrap();
        assert_eq!(sigma.substitution.transition_matrix(), top.matrix);
        assert_eq!(sigma.red_edges, top.edges);
    }
}

#[test]
fn strata_kinds() {
    let f = mixed_rose();
    let kinds: Vec<StratumKind> = f
        .classify_strata()
        .unwrap()
        .iter()
        .map(|s| s.kind)
        .collect();
    assert_eq!(
        kinds,
        [
            StratumKind::NonExponential,
            StratumKind::NonExponential,
            StratumKind::Exponential
        ]
    );
}

proptest! {
    #[test]
    fn tightening_composes(which in 0usize..2, choices in prop::collection::vec(0usize..8, 1..8),
                           p in 0usize..=3, q in 0usize..=3) {
        let f = &maps()[which];
        let alpha = walk(f, &choices);
        let direct = f.f_sharp(&alpha, p + q).unwrap();
        let stepped = f.f_sharp(&f.f_sharp(&alpha, p).unwrap(), q).unwrap();
        prop_assert_eq!(direct, stepped);
    }

    #[test]
    fn split_round_trips(which in 0usize..2, choices in prop::collection::vec(0usize..8, 1..8),
                         p in 0usize..=3) {
        let f = &maps()[which];
        let k = f.top_height();
        let alpha = f.f_sharp(&walk(f, &choices), p).unwrap();
        prop_assume!(f.is_k_legal(alpha.edges(), k));
        let pieces = f.yellow_red_split(&alpha, k).unwrap();
        let joined: Vec<Letter> = pieces.iter().flat_map(|(_, piece)| piece.edges().iter().copied()).collect();
        prop_assert_eq!(&joined[..], &alpha.edges()[..]);
        for pair in pieces.windows(2) {
            prop_assert_ne!(pair[0].0, pair[1].0);
            prop_assert_eq!(pair[0].1.end(), pair[1].1.start());
        }
        for (color, piece) in &pieces {
            let red = *color == Color::Red;
            prop_assert!(piece.edges().iter().all(|&l| (f.height(l) == k) == red));
        }
    }

    #[test]
    fn pf_lengths_scale(which in 0usize..2, choices in prop::collection::vec(0usize..8, 1..10)) {
        let f = &maps()[which];
        let alpha = walk(f, &choices);
        prop_assume!(f.is_k_legal(alpha.edges(), f.top_height()));
        let metric = f.pf_metric().unwrap();
        let before = metric.length(alpha.edges());
        prop_assume!(before > 0.0);
        let after = metric.length(f.f_sharp(&alpha, 1).unwrap().edges());
        let eps = 10.0 * metric.residual + 1e-12 * metric.lambda;
        prop_assert!((after / before - metric.lambda).abs() <= eps,
                     "ratio {} lambda {}", after / before, metric.lambda);
    }
}
