//! Property tests for the algebra, canonicalization, and text formats.

use proptest::prelude::*;

use pauli_ids::budget::Budget;
use pauli_ids::contextuality::IdSet;
use pauli_ids::enumeration::{enumerate_critical_ids, EnumOptions};
use pauli_ids::equivalence::{brute_force_equivalent, canonical_key, equivalent};
use pauli_ids::io::{format_idset, parse_idset};
use pauli_ids::oracle::product_sign_oracle;
use pauli_ids::{analyze_id, commutes, word_product, IdTable, PauliLetter, PauliWord};

fn word_strategy(n: usize) -> impl Strategy<Value = PauliWord> {
    prop::collection::vec(0u8..4, n).prop_map(|codes| {
        let letters: Vec<PauliLetter> =
            codes.iter().map(|&c| PauliLetter::ALL[c as usize]).collect();
        PauliWord::from_letters(&letters).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn codec_roundtrip(word in word_strategy(6)) {
        let text = word.to_string();
        let parsed: PauliWord = text.parse().unwrap();
        prop_assert_eq!(parsed, word);
    }

    #[test]
    fn product_is_symmetric_up_to_commutation_phase(
        a in word_strategy(4),
        b in word_strategy(4),
    ) {
        let (kab, wab) = word_product(&a, &b).unwrap();
        let (kba, wba) = word_product(&b, &a).unwrap();
        prop_assert_eq!(wab, wba);
        let delta = (4 + kab.value() - kba.value()) % 4;
        prop_assert_eq!(delta == 0, commutes(&a, &b).unwrap());
    }

    #[test]
    fn self_product_is_positive_identity(a in word_strategy(5)) {
        let (k, w) = word_product(&a, &a).unwrap();
        prop_assert!(w.is_identity());
        prop_assert_eq!(k.value(), 0);
    }

    #[test]
    fn dense_oracle_matches_symbolic_phase(
        a in word_strategy(3),
        b in word_strategy(3),
    ) {
        // a * b * (ab) always multiplies to i^k * I with k from the chain.
        let (k, c) = word_product(&a, &b).unwrap();
        prop_assume!(!c.is_identity());
        let rows = [a, b, c];
        let dense = product_sign_oracle(&rows).unwrap();
        prop_assert_eq!(dense, k);
    }
}

/// Pool of known IDs used for transformation-invariance tests.
fn id_pool() -> Vec<IdTable> {
    let grids: [&[&str]; 6] = [
        &["ZZ", "XX", "YY"],
        &["ZX", "XZ", "YY"],
        &["ZZZ", "ZXX", "XZX", "XXZ"],
        &["ZZI", "ZIZ", "XXX", "XYY"],
        &["ZZZZ", "XXXX", "YIZX", "IYXZ"],
        &["ZZZZ", "XXZZ", "YIXI", "IYIX", "IIXX"],
    ];
    grids
        .iter()
        .map(|texts| {
            let rows: Vec<PauliWord> = texts.iter().map(|t| t.parse().unwrap()).collect();
            analyze_id(&rows).unwrap()
        })
        .collect()
}

fn transform(id: &IdTable, qubit_perm: &[usize], letter_perms: &[usize], row_order: &[usize]) -> Vec<PauliWord> {
    row_order
        .iter()
        .map(|&r| {
            let row = &id.rows()[r];
            let letters: Vec<PauliLetter> = (0..id.n())
                .map(|q| {
                    let source = qubit_perm[q];
                    apply_perm(letter_perms[q], row.letter(source))
                })
                .collect();
            PauliWord::from_letters(&letters).unwrap()
        })
        .collect()
}

fn apply_perm(index: usize, letter: PauliLetter) -> PauliLetter {
    use PauliLetter::*;
    let images: [[PauliLetter; 4]; 6] = [
        [I, X, Y, Z],
        [I, X, Z, Y],
        [I, Y, X, Z],
        [I, Y, Z, X],
        [I, Z, X, Y],
        [I, Z, Y, X],
    ];
    images[index][letter as usize]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_key_invariant_under_the_group(
        index in 0usize..6,
        seed in any::<u64>(),
    ) {
        let pool = id_pool();
        let id = &pool[index];
        let n = id.n();
        let m = id.m();
        let mut rng = pauli_ids::oracle::SampleRng::new(seed);
        let mut qubit_perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            qubit_perm.swap(i, rng.below(i + 1));
        }
        let letter_perms: Vec<usize> = (0..n).map(|_| rng.below(6)).collect();
        let mut row_order: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            row_order.swap(i, rng.below(i + 1));
        }
        let rows = transform(id, &qubit_perm, &letter_perms, &row_order);
        let shuffled = analyze_id(&rows).unwrap();
        if id.odd_count() > 0 {
            prop_assert_eq!(canonical_key(&shuffled), canonical_key(id));
        } else {
            // O = 0: the grid transform preserves the sign, so keys agree too.
            prop_assert_eq!(shuffled.sign(), id.sign());
            prop_assert_eq!(canonical_key(&shuffled), canonical_key(id));
        }
    }

    #[test]
    fn idset_document_roundtrip(
        indices in prop::collection::vec(0usize..2, 1..3),
    ) {
        // Subsets of the 2-qubit pool with distinct members.
        let pool = id_pool();
        let mut picked: Vec<IdTable> = Vec::new();
        for &i in indices.iter() {
            if !picked.iter().any(|p| p.sorted_rows() == pool[i].sorted_rows()) {
                picked.push(pool[i].clone());
            }
        }
        let set = IdSet::new(picked).unwrap();
        let text = format_idset(&set);
        let parsed = parse_idset(&text).unwrap();
        prop_assert_eq!(parsed, set);
    }
}

#[test]
fn equivalence_agrees_with_brute_force_on_small_censuses() {
    let budget = Budget::nodes(100_000_000);
    let mut ids: Vec<IdTable> = Vec::new();
    for (m, n) in [(3usize, 2usize), (4, 3)] {
        let census = enumerate_critical_ids(m, n, &EnumOptions::default()).unwrap();
        ids.extend(census.classes.iter().map(|c| c.exemplar.clone()));
    }
    // Add reshuffled variants so equivalent pairs exist.
    let pool = id_pool();
    ids.extend(pool.iter().take(4).cloned());
    for a in &ids {
        for b in &ids {
            if a.n() != b.n() || a.m() != b.m() {
                continue;
            }
            let fast = equivalent(a, b);
            let slow = brute_force_equivalent(a, b, &budget).unwrap();
            assert_eq!(fast, slow, "disagreement on\n{a}\nvs\n{b}");
        }
    }
}

#[test]
fn o_zero_ids_keep_their_sign_under_all_relabelings() {
    // Every per-qubit letter relabeling and qubit permutation of an all-even
    // ID yields a valid ID with the same sign.
    for (m, n) in [(4usize, 3usize), (5, 4)] {
        let census = enumerate_critical_ids(m, n, &EnumOptions::default()).unwrap();
        for class in census.classes.iter().filter(|c| c.exemplar.odd_count() == 0) {
            let id = &class.exemplar;
            let mut qubit_perm: Vec<usize> = (0..n).collect();
            let row_order: Vec<usize> = (0..m).collect();
            loop {
                let mut perms = vec![0usize; n];
                loop {
                    let rows = transform(id, &qubit_perm, &perms, &row_order);
                    let relabeled = analyze_id(&rows).unwrap();
                    assert_eq!(relabeled.sign(), id.sign(), "sign changed for {id}");
                    // Odometer over letter permutations.
                    let mut d = 0;
                    loop {
                        if d == n {
                            break;
                        }
                        perms[d] += 1;
                        if perms[d] < 6 {
                            break;
                        }
                        perms[d] = 0;
                        d += 1;
                    }
                    if d == n {
                        break;
                    }
                }
                if !next_permutation(&mut qubit_perm) {
                    break;
                }
            }
        }
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Brute-force color-hypergraph isomorphism: a vertex (row) bijection plus a
/// color (qubit) bijection mapping edge sets onto edge sets. Test-only
/// oracle, independent of the grid canonicalization.
fn hypergraphs_isomorphic(a: &pauli_ids::equivalence::ColorHypergraph, b: &pauli_ids::equivalence::ColorHypergraph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.colors().len() != b.colors().len() {
        return false;
    }
    let m = a.vertex_count();
    let n = a.colors().len();
    let mut vertex_perm: Vec<usize> = (0..m).collect();
    loop {
        // Map each color of `a` through the vertex bijection and compare the
        // resulting edge-set multiset with `b`'s.
        let mapped: Vec<Vec<(usize, usize)>> = a
            .colors()
            .iter()
            .map(|edges| {
                let mut mapped: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(u, v)| {
                        let (x, y) = (vertex_perm[u], vertex_perm[v]);
                        (x.min(y), x.max(y))
                    })
                    .collect();
                mapped.sort_unstable();
                mapped
            })
            .collect();
        let mut want: Vec<Vec<(usize, usize)>> = b.colors().to_vec();
        let mut got = mapped;
        got.sort_unstable();
        want.sort_unstable();
        let _ = n;
        if got == want {
            return true;
        }
        if !next_permutation(&mut vertex_perm) {
            return false;
        }
    }
}

#[test]
fn grid_classes_agree_with_hypergraph_isomorphism() {
    use pauli_ids::equivalence::build_hypergraph;
    // Distinct representative classes must have nonisomorphic
    // color-hypergraphs, and grid-equivalent IDs isomorphic ones; checked
    // over every enumerated class with N <= 4.
    let mut classes: Vec<IdTable> = Vec::new();
    for (m, n) in [(3usize, 2usize), (4, 3), (4, 4), (5, 4)] {
        let census = enumerate_critical_ids(m, n, &EnumOptions::default()).unwrap();
        classes.extend(census.classes.iter().map(|c| c.exemplar.clone()));
    }
    for (i, a) in classes.iter().enumerate() {
        for b in classes.iter().skip(i + 1) {
            if a.m() != b.m() || a.n() != b.n() {
                continue;
            }
            assert!(
                !hypergraphs_isomorphic(&build_hypergraph(a), &build_hypergraph(b)),
                "distinct classes share a hypergraph:\n{a}\nvs\n{b}"
            );
        }
    }
    // A shuffled member of a class keeps an isomorphic hypergraph.
    let bell = classes.iter().find(|c| c.n() == 2).unwrap();
    let shuffled = analyze_id(
        &["YY", "ZZ", "XX"].iter().map(|t| t.parse().unwrap()).collect::<Vec<PauliWord>>(),
    )
    .unwrap();
    assert!(equivalent(bell, &shuffled));
    assert!(hypergraphs_isomorphic(&build_hypergraph(bell), &build_hypergraph(&shuffled)));
}
