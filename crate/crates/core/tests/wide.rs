//! Checks on 4- to 6-wire circuits, where no distance table is stored.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revsynth::analysis::{minimal_universal_sublibraries, pair_is_universal};
use revsynth::gates::{standard_library, Gate, GateLibrary};
use revsynth::groups::{decide_universal, StabilizerChain};
use revsynth::perm::{factorial, Permutation};
use revsynth::synth::{verify, SynthError, Synthesizer};

type P = Permutation<u16>;

fn g(chain: &[usize]) -> Gate {
    Gate::g(chain, chain.len()).unwrap()
}

#[test]
fn six_wire_pair_generates_the_full_group() {
    let gens =
        [g(&[2, 3, 4, 5, 6, 1]), g(&[5, 1, 4, 3, 2, 6])].map(|x| x.elaborate::<u16>().unwrap());
    let chain = StabilizerChain::new(64, &gens).unwrap();
    assert_eq!(chain.order(), factorial(64));
    // the same labels read as position labels
    let a = Gate::from_position_label("234561").unwrap();
    let b = Gate::from_position_label("514326").unwrap();
    assert!(pair_is_universal(&a, &b).unwrap());
}

#[test]
fn five_wire_pair_under_both_label_readings() {
    let base = g(&[1, 2, 3, 4, 5]);
    assert!(pair_is_universal(&base, &g(&[2, 3, 4, 5, 1])).unwrap());
    let relabelled = Gate::from_position_label("23451").unwrap();
    assert_eq!(relabelled, g(&[5, 1, 2, 3, 4]));
    assert!(pair_is_universal(&base, &relabelled).unwrap());
}

#[test]
fn three_wire_universal_pairs_are_exactly_nine() {
    let lib = standard_library("G", 3).unwrap();
    let pairs: Vec<(String, String)> = minimal_universal_sublibraries(&lib)
        .unwrap()
        .into_iter()
        .map(|s| (lib.gates()[s[0]].to_string(), lib.gates()[s[1]].to_string()))
        .collect();
    let expected = [
        ("G[1,2,3]", "G[2,3,1]"),
        ("G[1,2,3]", "G[3,1,2]"),
        ("G[1,2,3]", "G[3,2,1]"),
        ("G[1,3,2]", "G[2,1,3]"),
        ("G[1,3,2]", "G[2,3,1]"),
        ("G[1,3,2]", "G[3,2,1]"),
        ("G[2,1,3]", "G[3,1,2]"),
        ("G[2,1,3]", "G[3,2,1]"),
        ("G[2,3,1]", "G[3,1,2]"),
    ];
    let expected: Vec<(String, String)> = expected
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    assert_eq!(pairs, expected);
}

#[test]
fn gt_libraries_are_universal() {
    for n in 2..=6 {
        let lib = standard_library("GT", n).unwrap();
        let gens = lib.permutations::<u16>().unwrap();
        assert!(decide_universal(lib.degree(), &gens).unwrap().0, "GT{n}");
    }
}

/// Shortest word lengths up to `depth` by plain breadth-first search.
fn bfs_lengths(gens: &[P], depth: usize) -> HashMap<Vec<usize>, usize> {
    let id = P::identity(gens[0].degree());
    let mut dist = HashMap::from([(id.images_one_based(), 0)]);
    let mut frontier = vec![id];
    for d in 1..=depth {
        let mut next = Vec::new();
        for p in &frontier {
            for gen in gens {
                let q = p.then(gen);
                let key = q.images_one_based();
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(key) {
                    e.insert(d);
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    dist
}

#[test]
fn four_wire_search_matches_breadth_first_lengths() {
    let lib = GateLibrary::new("pair", vec![g(&[4, 1, 2, 3]), g(&[1, 2, 3, 4])]).unwrap();
    let gens = lib.permutations::<u16>().unwrap();
    let oracle = bfs_lengths(&gens, 6);
    let mut keys: Vec<&Vec<usize>> = oracle.keys().collect();
    keys.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sample: Vec<&Vec<usize>> = keys.choose_multiple(&mut rng, 150).copied().collect();
    let synth = Synthesizer::<u16>::new(&lib, 6).unwrap();
    for images in sample {
        let spec = P::from_images(images).unwrap();
        let circuit = synth.synthesize(&spec).unwrap();
        assert_eq!(circuit.len(), oracle[images], "{images:?}");
        assert!(verify(&circuit, &spec).unwrap());
    }
}

#[test]
fn four_wire_search_returns_lexicographically_first_word() {
    let lib = standard_library("GT", 4).unwrap();
    let synth = Synthesizer::<u16>::new(&lib, 4).unwrap();
    let gates = lib.gates();
    let spec = gates[5]
        .elaborate::<u16>()
        .unwrap()
        .then(&gates[17].elaborate::<u16>().unwrap());
    let circuit = synth.synthesize(&spec).unwrap();
    assert!(circuit.len() <= 2);
    assert!(verify(&circuit, &spec).unwrap());
    // no lexicographically smaller pair of gates realizes the spec
    if circuit.len() == 2 {
        let first = gates.iter().position(|x| *x == circuit.gates()[0]).unwrap();
        for i in 0..first {
            for j in 0..gates.len() {
                let p = gates[i]
                    .elaborate::<u16>()
                    .unwrap()
                    .then(&gates[j].elaborate::<u16>().unwrap());
                assert_ne!(p, spec);
            }
        }
    }
}

#[test]
fn four_wire_depth_limit_is_reported() {
    let lib = GateLibrary::new("pair", vec![g(&[4, 1, 2, 3]), g(&[1, 2, 3, 4])]).unwrap();
    let gens = lib.permutations::<u16>().unwrap();
    let far = gens[0]
        .then(&gens[1])
        .then(&gens[0])
        .then(&gens[1])
        .then(&gens[1]);
    let oracle = bfs_lengths(&gens, 5);
    let d = oracle[&far.images_one_based()];
    assert!(d >= 3);
    let shallow = Synthesizer::<u16>::new(&lib, d - 1).unwrap();
    assert_eq!(
        shallow.synthesize(&far),
        Err(SynthError::DepthExceeded { max_depth: d - 1 })
    );
}
