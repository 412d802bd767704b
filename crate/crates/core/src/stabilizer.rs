//! Stabilizer groups generated by ID rows, graph-state generators, and
//! membership of IDs in graph groups up to local relabeling.

use thiserror::Error;

use crate::budget::{Budget, BudgetError};
use crate::equivalence::apply_letter_perm;
use crate::id::IdTable;
use crate::pauli::{commutes, word_product, PauliError, PauliLetter, PauliWord, Sign};

#[derive(Debug, Error, PartialEq, Clone)]
pub enum StabilizerError {
    #[error("generators {first} and {second} do not commute")]
    NonCommuting { first: usize, second: usize },
    #[error("generator list is empty")]
    Empty,
    #[error("qubit counts differ between ID ({id}) and graph ({graph})")]
    DimensionMismatch { id: usize, graph: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
}

/// A Pauli word together with the real sign it carries inside a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedWord {
    pub word: PauliWord,
    pub sign: Sign,
}

impl std::fmt::Display for SignedWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.sign, self.word)
    }
}

/// Closure of commuting generators under signed products: the span of a
/// GF(2)-independent subset taken with sign +1, so dependent input rows
/// inherit whatever sign the span assigns to their word. The group order is
/// 2^rank and +identity is always a member; -identity can never arise from
/// the span of independent commuting Hermitian words.
pub fn generate_group(rows: &[PauliWord]) -> Result<Vec<SignedWord>, StabilizerError> {
    if rows.is_empty() {
        return Err(StabilizerError::Empty);
    }
    let n = rows[0].n();
    for (i, row) in rows.iter().enumerate() {
        if row.n() != n {
            return Err(StabilizerError::Pauli(PauliError::DimensionMismatch {
                left: n,
                right: row.n(),
            }));
        }
        for (j, other) in rows.iter().enumerate().skip(i + 1) {
            if !commutes(row, other)? {
                return Err(StabilizerError::NonCommuting { first: i, second: j });
            }
        }
    }

    let mut elements = vec![SignedWord { word: PauliWord::identity(n), sign: Sign::Plus }];
    for row in rows {
        if elements.iter().any(|e| e.word == *row) {
            continue; // dependent generator; its sign is fixed by the span
        }
        let mut extended = elements.clone();
        for element in &elements {
            let (k, word) = word_product(&element.word, row)?;
            let sign = match k.sign() {
                Some(s) => s.combine(element.sign),
                None => unreachable!("commuting Hermitian products carry real phases"),
            };
            debug_assert!(
                !(word.is_identity() && sign == Sign::Minus),
                "-identity cannot arise from an independent span"
            );
            extended.push(SignedWord { word, sign });
        }
        elements = extended;
    }
    elements.sort();
    Ok(elements)
}

/// An undirected simple graph on n vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    adjacency: Vec<u64>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> SimpleGraph {
        assert!((1..=64).contains(&n));
        SimpleGraph { n, adjacency: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> SimpleGraph {
        let mut graph = SimpleGraph::new(n);
        for &(a, b) in edges {
            graph.add_edge(a, b);
        }
        graph
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n && a != b, "simple graph edge ({a}, {b})");
        self.adjacency[a] |= 1 << b;
        self.adjacency[b] |= 1 << a;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adjacency[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if (self.adjacency[a] >> b) & 1 == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            for v in 0..self.n {
                if (frontier >> v) & 1 == 1 {
                    next |= self.adjacency[v];
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == self.n
    }
}

/// Standard graph-state generators: for vertex v, X at v and Z at each
/// neighbor, sign +1. The generators pairwise commute.
pub fn graph_state_generators(graph: &SimpleGraph) -> Vec<SignedWord> {
    (0..graph.n())
        .map(|v| {
            let word =
                PauliWord::from_bits(graph.n(), 1 << v, graph.neighbors(v)).expect("valid size");
            SignedWord { word, sign: Sign::Plus }
        })
        .collect()
}

/// A witness transformation mapping an ID into a graph group: qubit q of the
/// ID maps to graph qubit `qubit_map[q]`, then letters at the target qubit
/// are permuted by the indexed letter permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMap {
    pub qubit_map: Vec<usize>,
    pub letter_perms: Vec<usize>,
}

impl LocalMap {
    pub fn apply(&self, word: &PauliWord) -> PauliWord {
        let n = word.n();
        let mut letters = vec![PauliLetter::I; n];
        for q in 0..n {
            let target = self.qubit_map[q];
            letters[target] = apply_letter_perm(self.letter_perms[target], word.letter(q));
        }
        PauliWord::from_letters(&letters).unwrap()
    }
}

/// Searches for a qubit permutation plus per-qubit letter permutations
/// mapping every row of `id` (signs ignored) into the stabilizer group of
/// the graph state of `graph`. Brute force over n! * 6^n transformations
/// with early rejection per qubit assignment; one budget tick per search
/// node.
pub fn group_contains_id_up_to_local(
    id: &IdTable,
    graph: &SimpleGraph,
    budget: &Budget,
) -> Result<Option<LocalMap>, StabilizerError> {
    if id.n() != graph.n() {
        return Err(StabilizerError::DimensionMismatch { id: id.n(), graph: graph.n() });
    }
    let n = id.n();
    let generators: Vec<PauliWord> =
        graph_state_generators(graph).into_iter().map(|g| g.word).collect();
    let group = generate_group(&generators)?;
    let words: std::collections::HashSet<PauliWord> = group.iter().map(|e| e.word).collect();

    // Weight multisets must match: weights are invariant under the
    // transformation group.
    let mut id_weights: Vec<usize> = id.rows().iter().map(|r| r.weight()).collect();
    id_weights.sort_unstable();
    let mut group_weights: Vec<usize> = words.iter().map(|w| w.weight()).collect();
    group_weights.sort_unstable();
    if !id_weights.iter().all(|w| group_weights.contains(w)) {
        return Ok(None);
    }

    let meter = budget.start();
    let mut qubit_map = vec![usize::MAX; n];
    let mut used = 0u64;
    let mut letter_perms = vec![0usize; n];
    let found = assign(
        id,
        &words,
        0,
        &mut qubit_map,
        &mut used,
        &mut letter_perms,
        &meter,
    )?;
    Ok(found.then_some(LocalMap { qubit_map, letter_perms }))
}

/// Assigns ID qubit `q` to a target qubit and letter permutation, checking
/// after each full assignment that all rows land in the group. Rows are
/// checked incrementally by restricting to assigned target qubits: any
/// group word either matches some restriction pattern or the branch dies.
fn assign(
    id: &IdTable,
    words: &std::collections::HashSet<PauliWord>,
    q: usize,
    qubit_map: &mut [usize],
    used: &mut u64,
    letter_perms: &mut [usize],
    meter: &crate::budget::BudgetMeter<'_>,
) -> Result<bool, StabilizerError> {
    let n = id.n();
    if q == n {
        let map = LocalMap { qubit_map: qubit_map.to_vec(), letter_perms: letter_perms.to_vec() };
        return Ok(id.rows().iter().all(|row| words.contains(&map.apply(row))));
    }
    for target in 0..n {
        if (*used >> target) & 1 == 1 {
            continue;
        }
        qubit_map[q] = target;
        *used |= 1 << target;
        for perm in 0..6 {
            meter.tick(1)?;
            letter_perms[target] = perm;
            // Partial rejection: every row restricted to the assigned ID
            // qubits must match the restriction of some group word.
            let assigned: Vec<usize> = (0..=q).collect();
            let targets: Vec<usize> = assigned.iter().map(|&a| qubit_map[a]).collect();
            let viable = id.rows().iter().all(|row| {
                let image: Vec<PauliLetter> = assigned
                    .iter()
                    .map(|&a| {
                        apply_letter_perm(letter_perms[qubit_map[a]], row.letter(a))
                    })
                    .collect();
                words.iter().any(|w| {
                    targets
                        .iter()
                        .zip(&image)
                        .all(|(&t, &letter)| w.letter(t) == letter)
                })
            });
            if viable && assign(id, words, q + 1, qubit_map, used, letter_perms, meter)? {
                return Ok(true);
            }
        }
        *used &= !(1u64 << target);
        qubit_map[q] = usize::MAX;
    }
    Ok(false)
}

/// All connected simple graphs on n labeled vertices (n <= 5 intended).
pub fn connected_graphs(n: usize) -> Vec<SimpleGraph> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut graphs = Vec::new();
    for mask in 0..(1u64 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let graph = SimpleGraph::from_edges(n, &edges);
        if graph.is_connected() {
            graphs.push(graph);
        }
    }
    graphs
}
