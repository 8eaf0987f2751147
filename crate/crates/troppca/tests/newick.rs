use proptest::prelude::*;
use troppca::newick::{parse_newick, parse_newick_file, to_newick};
use troppca_core::rng::{self, Rng};
use troppca_core::sim::{random_caterpillar, random_coalescent};
use troppca_core::RootedTree;

/// Malformed inputs; every one must be rejected with an error, not a panic.
fn negative_corpus() -> Vec<String> {
    let text = include_str!("fixtures/negative_newick.json");
    serde_json::from_str(text).unwrap()
}

#[test]
fn negative_corpus_is_rejected() {
    let corpus = negative_corpus();
    assert!(corpus.len() >= 20);
    for bad in &corpus {
        let err = parse_newick(bad).expect_err(bad);
        assert!(err.offset <= bad.len(), "{bad}: offset {}", err.offset);
        assert!(!err.message.is_empty());
    }
    assert!(parse_newick_file("(A,B);\n(C").is_err());
}

/// Newick with children in a random order and lengths printed in full.
fn shuffled_newick(t: &RootedTree, v: usize, rng: &mut Rng, out: &mut String) {
    if t.is_leaf(v) {
        out.push_str(&t.labels()[t.leaf_index(v).unwrap()]);
    } else {
        let mut kids = t.children(v).to_vec();
        rng::shuffle(rng, &mut kids);
        out.push('(');
        for (i, &c) in kids.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            shuffled_newick(t, c, rng, out);
        }
        out.push(')');
    }
    if v != t.root() {
        out.push_str(&format!(":{:e}", t.length(v)));
    }
}

fn random_tree(rng: &mut Rng) -> RootedTree {
    let m = 3 + rng::below(rng, 10);
    if rng::below(rng, 2) == 0 {
        random_coalescent(m, 1, rng).remove(0)
    } else {
        random_caterpillar(m, 1, rng).remove(0)
    }
}

#[test]
fn random_trees_round_trip() {
    let mut rng = rng::seeded(70);
    for _ in 0..1000 {
        let t = random_tree(&mut rng);
        let text = to_newick(&t);
        let back = parse_newick(&text).unwrap();
        let (a, b) = (t.cophenetic().unwrap(), back.cophenetic().unwrap());
        assert!(a.point().torus_eq(b.point(), 1e-9), "{text}");
        assert_eq!(t.topology(), back.topology());
        assert_eq!(to_newick(&back), text);
    }
}

#[test]
fn serialization_ignores_child_order() {
    let mut rng = rng::seeded(71);
    for _ in 0..200 {
        let t = random_tree(&mut rng);
        let mut a = String::new();
        shuffled_newick(&t, t.root(), &mut rng, &mut a);
        a.push(';');
        let mut b = String::new();
        shuffled_newick(&t, t.root(), &mut rng, &mut b);
        b.push(';');
        assert_eq!(to_newick(&parse_newick(&a).unwrap()), to_newick(&parse_newick(&b).unwrap()));
    }
}

#[test]
fn ultrametric_round_trip_is_exact_for_nonnegative_vectors() {
    let mut rng = rng::seeded(72);
    for _ in 0..300 {
        let t = random_tree(&mut rng);
        let u = t.cophenetic().unwrap();
        let back = RootedTree::from_ultrametric(&u, Some(t.labels().to_vec())).unwrap();
        assert_eq!(back.cophenetic().unwrap(), u);
    }
}

proptest! {
    #[test]
    fn parser_never_panics(s in "[(),:;A-C0-9.'\\[\\] -]{0,40}") {
        let _ = parse_newick(&s);
        let _ = parse_newick_file(&s);
    }

    #[test]
    fn star_trees_have_constant_vectors(m in 3usize..15, h in 0.001f64..100.0) {
        let t = RootedTree::star(m, h).unwrap();
        let back = parse_newick(&to_newick(&t)).unwrap();
        let u = back.cophenetic().unwrap();
        prop_assert!(u.coords().iter().all(|&c| (c - 2.0 * h).abs() <= 1e-9 * h.max(1.0)));
    }
}
