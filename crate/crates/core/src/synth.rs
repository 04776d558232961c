//! Minimum-length circuits.
//!
//! For widths up to 3 (degree ≤ 8) a dense distance table indexed by Lehmer
//! rank covers the whole group, which gives the census and optimal
//! synthesis directly. Wider circuits are synthesized by meeting a
//! depth-first search from the specification with a breadth-first ball
//! around the identity.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gates::{parse_gate_list, Gate, GateError, GateLibrary};
use crate::groups::{GroupError, StabilizerChain, DEFAULT_CLOSURE_CAP};
use crate::perm::{factorial_u64, PermError, Permutation, Point};

/// Largest degree handled with a dense rank-indexed table.
pub const DENSE_TABLE_DEGREE: usize = 8;
/// Default search bound for specifications of degree > 8.
pub const DEFAULT_MAX_DEPTH: usize = 10;
/// Element budget for the identity ball used by bidirectional search.
const BALL_CAP: usize = 2_000_000;
const UNREACHED: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("specification is not in the group generated by {library}")]
    NotInGeneratedGroup { library: String },
    #[error("no circuit of length ≤ {max_depth} found")]
    DepthExceeded { max_depth: usize },
    #[error("degree mismatch: expected {expected}, got {actual}")]
    DegreeMismatch { expected: usize, actual: usize },
    #[error("closure exceeds {cap} elements")]
    CapExceeded { cap: u64 },
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A cascade of gates applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    arity: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(arity: usize, gates: Vec<Gate>) -> Result<Self, SynthError> {
        if let Some(g) = gates.iter().find(|g| g.arity() != arity) {
            return Err(GateError::InvalidGate(format!(
                "{g} has arity {} in a {arity}-wire circuit",
                g.arity()
            ))
            .into());
        }
        Ok(Self { arity, gates })
    }

    pub fn empty(arity: usize) -> Self {
        Self {
            arity,
            gates: Vec::new(),
        }
    }

    /// Parses `"T[1,2,3]; C[1,2]; N[1]"`.
    pub fn parse(text: &str, arity: usize) -> Result<Self, SynthError> {
        Self::new(arity, parse_gate_list(text, arity)?)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The permutation realized by the circuit; the empty circuit is the identity.
    pub fn apply<P: Point>(&self) -> Result<Permutation<P>, SynthError> {
        let mut acc = Permutation::identity(1 << self.arity);
        for g in &self.gates {
            acc = acc.then(&g.elaborate()?);
        }
        Ok(acc)
    }

    pub fn verify<P: Point>(&self, spec: &Permutation<P>) -> Result<bool, SynthError> {
        let degree = 1 << self.arity;
        if spec.degree() != degree {
            return Err(SynthError::DegreeMismatch {
                expected: degree,
                actual: spec.degree(),
            });
        }
        Ok(&self.apply::<P>()? == spec)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.gates.iter().map(|g| g.to_string()).collect();
        f.write_str(&terms.join("; "))
    }
}

pub fn apply_circuit(c: &Circuit) -> Result<Permutation<u16>, SynthError> {
    c.apply()
}

pub fn verify(c: &Circuit, spec: &Permutation<u16>) -> Result<bool, SynthError> {
    c.verify(spec)
}

/// Distribution of minimal circuit lengths over every reachable function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub library: String,
    pub library_size: usize,
    /// `counts[L]` = number of functions whose shortest circuit has `L` gates.
    pub counts: Vec<u64>,
    pub reachable: u64,
    pub max_length: usize,
    #[serde(serialize_with = "serialize_average")]
    pub average: Ratio<u64>,
}

fn serialize_average<S: serde::Serializer>(avg: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&truncate_decimal(avg, 3))
}

impl CensusReport {
    fn from_counts(lib: &GateLibrary, counts: Vec<u64>) -> Self {
        let reachable: u64 = counts.iter().sum();
        let weighted: u64 = counts.iter().enumerate().map(|(l, &c)| l as u64 * c).sum();
        Self {
            library: lib.name().to_string(),
            library_size: lib.len(),
            max_length: counts.len() - 1,
            reachable,
            average: Ratio::new(weighted, reachable),
            counts,
        }
    }

    /// Average length truncated to three decimals, e.g. `"5.865"`.
    pub fn average_string(&self) -> String {
        truncate_decimal(&self.average, 3)
    }
}

/// Decimal expansion of a non-negative rational, truncated (not rounded) to
/// `digits` places.
pub fn truncate_decimal(r: &Ratio<u64>, digits: u32) -> String {
    let scale = 10u128.pow(digits);
    let scaled = *r.numer() as u128 * scale / *r.denom() as u128;
    let int = scaled / scale;
    let frac = scaled % scale;
    if digits == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac:0width$}", width = digits as usize)
    }
}

/// Exact shortest-circuit length of every element of the group generated by
/// a library of degree ≤ 8, indexed by Lehmer rank.
#[derive(Debug, Clone)]
pub struct DistanceTable<P: Point> {
    degree: usize,
    dist: Vec<u8>,
    gens: Vec<Permutation<P>>,
    gens_inv: Vec<Permutation<P>>,
}

impl<P: Point> DistanceTable<P> {
    pub fn build(lib: &GateLibrary) -> Result<Self, SynthError> {
        let degree = lib.degree();
        if degree > DENSE_TABLE_DEGREE {
            return Err(SynthError::DegreeMismatch {
                expected: DENSE_TABLE_DEGREE,
                actual: degree,
            });
        }
        let gens = lib.permutations::<P>()?;
        let gens_inv = gens.iter().map(|g| g.inverse()).collect();
        let mut dist = vec![UNREACHED; factorial_u64(degree) as usize];
        dist[0] = 0;
        let mut frontier = vec![Permutation::<P>::identity(degree)];
        let mut depth = 0u8;
        while !frontier.is_empty() {
            depth += 1;
            let mut next: Vec<(u64, Permutation<P>)> = frontier
                .par_iter()
                .flat_map_iter(|p| {
                    gens.iter().map(move |g| {
                        let q = p.then(g);
                        (q.rank().expect("degree ≤ 8"), q)
                    })
                })
                .filter(|(r, _)| dist[*r as usize] == UNREACHED)
                .collect();
            next.sort_unstable_by_key(|(r, _)| *r);
            next.dedup_by_key(|(r, _)| *r);
            for (r, _) in &next {
                dist[*r as usize] = depth;
            }
            frontier = next.into_iter().map(|(_, q)| q).collect();
        }
        Ok(Self {
            degree,
            dist,
            gens,
            gens_inv,
        })
    }

    /// Shortest circuit length for `p`, or `None` when unreachable.
    pub fn distance(&self, p: &Permutation<P>) -> Option<usize> {
        let d = self.dist[p.rank().ok()? as usize];
        (d != UNREACHED).then_some(d as usize)
    }

    /// `counts[L]` over the reachable elements.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = Vec::new();
        for &d in &self.dist {
            if d == UNREACHED {
                continue;
            }
            let d = d as usize;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        counts
    }

    /// Lexicographically smallest (by library index) minimum-length gate
    /// index sequence realizing `spec`.
    pub fn word(&self, spec: &Permutation<P>) -> Option<Vec<usize>> {
        let mut remaining = self.distance(spec)?;
        let mut x = spec.clone();
        let mut word = Vec::with_capacity(remaining);
        while remaining > 0 {
            let (gi, rest) = self
                .gens_inv
                .iter()
                .enumerate()
                .map(|(gi, inv)| (gi, inv.then(&x)))
                .find(|(_, rest)| self.distance(rest) == Some(remaining - 1))
                .expect("a neighbour one step closer exists");
            word.push(gi);
            x = rest;
            remaining -= 1;
        }
        Some(word)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation<P>] {
        &self.gens
    }
}

/// Breadth-first census of the Cayley graph of `lib` from the identity.
pub fn bfs_census(lib: &GateLibrary) -> Result<CensusReport, SynthError> {
    bfs_census_capped(lib, DEFAULT_CLOSURE_CAP)
}

pub fn bfs_census_capped(lib: &GateLibrary, cap: u64) -> Result<CensusReport, SynthError> {
    if lib.degree() <= DENSE_TABLE_DEGREE {
        let table = DistanceTable::<u8>::build(lib)?;
        let counts = table.counts();
        if counts.iter().sum::<u64>() > cap {
            return Err(SynthError::CapExceeded { cap });
        }
        return Ok(CensusReport::from_counts(lib, counts));
    }
    let gens = lib.permutations::<u16>()?;
    let id = Permutation::<u16>::identity(lib.degree());
    let mut seen: std::collections::HashSet<Permutation<u16>> = std::collections::HashSet::new();
    seen.insert(id.clone());
    let mut counts = vec![1u64];
    let mut frontier = vec![id];
    loop {
        let mut next: Vec<Permutation<u16>> = frontier
            .par_iter()
            .flat_map_iter(|p| gens.iter().map(move |g| p.then(g)))
            .filter(|q| !seen.contains(q))
            .collect();
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        if seen.len() as u64 + next.len() as u64 > cap {
            return Err(SynthError::CapExceeded { cap });
        }
        counts.push(next.len() as u64);
        seen.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(CensusReport::from_counts(lib, counts))
}

enum Engine<P: Point> {
    Dense(DistanceTable<P>),
    Bidirectional {
        chain: StabilizerChain<P>,
        gens_inv: Vec<Permutation<P>>,
        ball: HashMap<Permutation<P>, u8>,
        radius: usize,
    },
}

/// Reusable optimal synthesizer for one library.
pub struct Synthesizer<P: Point> {
    library: GateLibrary,
    max_depth: usize,
    engine: Engine<P>,
}

impl<P: Point> Synthesizer<P> {
    pub fn new(lib: &GateLibrary, max_depth: usize) -> Result<Self, SynthError> {
        let engine = if lib.degree() <= DENSE_TABLE_DEGREE {
            Engine::Dense(DistanceTable::build(lib)?)
        } else {
            let gens = lib.permutations::<P>()?;
            let chain = StabilizerChain::new(lib.degree(), &gens)?;
            let gens_inv = gens.iter().map(|g| g.inverse()).collect();
            let (ball, radius) =
                identity_ball(lib.degree(), &gens, max_depth.div_ceil(2), BALL_CAP);
            Engine::Bidirectional {
                chain,
                gens_inv,
                ball,
                radius,
            }
        };
        Ok(Self {
            library: lib.clone(),
            max_depth,
            engine,
        })
    }

    pub fn library(&self) -> &GateLibrary {
        &self.library
    }

    /// Minimum-length circuit for `spec`; ties go to the lexicographically
    /// smallest sequence of library indices.
    pub fn synthesize(&self, spec: &Permutation<P>) -> Result<Circuit, SynthError> {
        let degree = self.library.degree();
        if spec.degree() != degree {
            return Err(SynthError::DegreeMismatch {
                expected: degree,
                actual: spec.degree(),
            });
        }
        let not_in_group = || SynthError::NotInGeneratedGroup {
            library: self.library.name().to_string(),
        };
        let word = match &self.engine {
            Engine::Dense(table) => table.word(spec).ok_or_else(not_in_group)?,
            Engine::Bidirectional {
                chain,
                gens_inv,
                ball,
                radius,
            } => {
                if !chain.contains(spec)? {
                    return Err(not_in_group());
                }
                let search = BallSearch {
                    gens_inv,
                    ball,
                    radius: *radius,
                };
                (0..=self.max_depth)
                    .find_map(|len| {
                        let mut word = Vec::with_capacity(len);
                        search.dfs(spec, len, &mut word).then_some(word)
                    })
                    .ok_or(SynthError::DepthExceeded {
                        max_depth: self.max_depth,
                    })?
            }
        };
        let gates = word
            .iter()
            .map(|&i| self.library.gates()[i].clone())
            .collect();
        Circuit::new(self.library.arity(), gates)
    }
}

/// Exact distances from the identity up to `radius`, shrinking the radius if
/// the ball would exceed `cap` elements.
fn identity_ball<P: Point>(
    degree: usize,
    gens: &[Permutation<P>],
    radius: usize,
    cap: usize,
) -> (HashMap<Permutation<P>, u8>, usize) {
    let id = Permutation::identity(degree);
    let mut ball = HashMap::new();
    ball.insert(id.clone(), 0u8);
    let mut frontier = vec![id];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for p in &frontier {
            for g in gens {
                let q = p.then(g);
                if !ball.contains_key(&q) {
                    ball.insert(q.clone(), depth as u8);
                    next.push(q);
                }
            }
        }
        if ball.len() > cap {
            ball.retain(|_, d| (*d as usize) < depth);
            return (ball, depth - 1);
        }
        frontier = next;
    }
    (ball, radius)
}

struct BallSearch<'a, P: Point> {
    gens_inv: &'a [Permutation<P>],
    ball: &'a HashMap<Permutation<P>, u8>,
    radius: usize,
}

impl<P: Point> BallSearch<'_, P> {
    /// Looks for a word of exactly `len` gates realizing `x`, given that no
    /// shorter word exists. Candidates are tried in index order, so the first
    /// hit is lexicographically smallest.
    fn dfs(&self, x: &Permutation<P>, len: usize, word: &mut Vec<usize>) -> bool {
        if len <= self.radius {
            if self.ball.get(x).map(|&d| d as usize) != Some(len) {
                return false;
            }
            let mut x = x.clone();
            for remaining in (1..=len).rev() {
                let (gi, rest) = self
                    .gens_inv
                    .iter()
                    .enumerate()
                    .map(|(gi, inv)| (gi, inv.then(&x)))
                    .find(|(_, rest)| {
                        self.ball.get(rest).map(|&d| d as usize) == Some(remaining - 1)
                    })
                    .expect("ball distances are exact");
                word.push(gi);
                x = rest;
            }
            return true;
        }
        for (gi, inv) in self.gens_inv.iter().enumerate() {
            word.push(gi);
            if self.dfs(&inv.then(x), len - 1, word) {
                return true;
            }
            word.pop();
        }
        false
    }
}

/// One-shot [`Synthesizer::synthesize`].
pub fn synthesize(
    spec: &Permutation<u16>,
    lib: &GateLibrary,
    max_depth: usize,
) -> Result<Circuit, SynthError> {
    Synthesizer::<u16>::new(lib, max_depth)?.synthesize(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::standard_library;

    type P = Permutation<u16>;

    fn cyc(s: &str) -> P {
        P::parse_cycles(s, 8).unwrap()
    }

    #[test]
    fn apply_circuits() {
        let c = Circuit::parse("T[1,2,3]; C[1,2]", 3).unwrap();
        assert_eq!(apply_circuit(&c).unwrap(), cyc("(5,7,6,8)"));
        assert!(apply_circuit(&Circuit::empty(3)).unwrap().is_identity());
        let c = Circuit::parse("N[1]; N[1]", 3).unwrap();
        assert!(apply_circuit(&c).unwrap().is_identity());
        assert_eq!(c.to_string(), "N[1]; N[1]");
    }

    #[test]
    fn verify_contract() {
        assert!(verify(&Circuit::empty(3), &P::identity(8)).unwrap());
        let n1 = Circuit::parse("N[1]", 3).unwrap();
        assert!(!verify(&n1, &P::identity(8)).unwrap());
        assert_eq!(
            verify(&n1, &P::identity(4)),
            Err(SynthError::DegreeMismatch {
                expected: 8,
                actual: 4
            })
        );
    }

    #[test]
    fn truncation() {
        assert_eq!(truncate_decimal(&Ratio::new(1, 3), 3), "0.333");
        assert_eq!(truncate_decimal(&Ratio::new(2, 3), 3), "0.666");
        assert_eq!(truncate_decimal(&Ratio::new(17, 2), 3), "8.500");
        assert_eq!(truncate_decimal(&Ratio::new(4, 1), 2), "4.00");
    }

    #[test]
    fn nct_synthesis_examples() {
        let nct = standard_library("NCT", 3).unwrap();
        assert_eq!(
            synthesize(&cyc("(7,8)"), &nct, 10).unwrap().to_string(),
            "T[1,2,3]"
        );
        assert!(synthesize(&P::identity(8), &nct, 10).unwrap().is_empty());
        let fredkin = synthesize(&cyc("(6,7)"), &nct, 10).unwrap();
        assert_eq!(fredkin.len(), 3);
        assert!(verify(&fredkin, &cyc("(6,7)")).unwrap());
    }

    #[test]
    fn unreachable_spec() {
        let c = standard_library("C", 3).unwrap();
        assert!(matches!(
            synthesize(&cyc("(1,5)(2,6)(3,7)(4,8)"), &c, 10),
            Err(SynthError::NotInGeneratedGroup { .. })
        ));
        let g4 = GateLibrary::new(
            "pair",
            vec![
                Gate::g(&[1, 2, 3, 4], 4).unwrap(),
                Gate::g(&[1, 3, 2, 4], 4).unwrap(),
            ],
        )
        .unwrap();
        let odd = P::parse_cycles("(15,16)", 16).unwrap();
        assert!(matches!(
            synthesize(&odd, &g4, 6),
            Err(SynthError::NotInGeneratedGroup { .. })
        ));
    }

    #[test]
    fn depth_exceeded() {
        let lib = standard_library("GT", 4).unwrap();
        let spec = Circuit::parse("T[1,2,3,4]; T[2,3,4,1]; T[1,3,4,2]; C[1,2]", 4)
            .unwrap()
            .apply::<u16>()
            .unwrap();
        assert_eq!(
            synthesize(&spec, &lib, 2),
            Err(SynthError::DepthExceeded { max_depth: 2 })
        );
        let c = synthesize(&spec, &lib, 6).unwrap();
        assert!(c.len() <= 4);
        assert!(verify(&c, &spec).unwrap());
    }

    #[test]
    fn census_of_small_library() {
        let n = standard_library("N", 3).unwrap();
        let r = bfs_census(&n).unwrap();
        assert_eq!(r.counts, vec![1, 3, 3, 1]);
        assert_eq!(r.reachable, 8);
        assert_eq!(r.average_string(), "1.500");
        // hashed path
        let n4 = standard_library("N", 4).unwrap();
        let r = bfs_census(&n4).unwrap();
        assert_eq!(r.counts, vec![1, 4, 6, 4, 1]);
        assert!(matches!(
            bfs_census_capped(&standard_library("NCT", 3).unwrap(), 100),
            Err(SynthError::CapExceeded { cap: 100 })
        ));
    }
}
