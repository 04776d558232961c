//! Universality of sub-libraries and random pairs of G gates.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gates::{Gate, GateError, GateLibrary};
use crate::groups::{decide_universal, GroupError};
use crate::perm::Permutation;

/// Largest library accepted by the sub-library census (2^20 subsets).
pub const MAX_CENSUS_LIBRARY: usize = 20;
/// Widths accepted by [`random_pair_check`].
pub const RANDOM_PAIR_WIDTHS: std::ops::RangeInclusive<usize> = 2..=10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("library has {size} gates; at most {MAX_CENSUS_LIBRARY} supported")]
    LibraryTooLarge { size: usize },
    #[error("width {0} outside 2..=10")]
    UnsupportedWidth(usize),
    #[error("at least one trial required")]
    NoTrials,
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Counts behind the sub-library utilization tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubLibraryReport {
    pub library: String,
    pub library_size: usize,
    pub total_subsets: u64,
    pub universal_subsets: u64,
    /// Cardinality of the smallest universal subset, if any.
    pub minimal_size: Option<usize>,
    /// Number of subsets of that cardinality.
    pub subsets_at_minimal_size: u64,
    pub universal_at_minimal_size: u64,
}

impl SubLibraryReport {
    /// Universal subsets over all subsets, as a percentage.
    pub fn utilization(&self) -> String {
        percent(self.universal_subsets, self.total_subsets)
    }

    /// Universal subsets over all subsets of the minimal universal size.
    pub fn minimal_utilization(&self) -> String {
        percent(self.universal_at_minimal_size, self.subsets_at_minimal_size)
    }
}

/// `100 * num / den` truncated to two decimals.
pub fn percent(num: u64, den: u64) -> String {
    if den == 0 {
        return "0.00".to_string();
    }
    let basis_points = num as u128 * 10_000 / den as u128;
    format!("{}.{:02}", basis_points / 100, basis_points % 100)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn subset_perms(perms: &[Permutation<u16>], mask: u32) -> Vec<Permutation<u16>> {
    perms
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, p)| p.clone())
        .collect()
}

fn check_size(lib: &GateLibrary) -> Result<(), AnalysisError> {
    if lib.len() > MAX_CENSUS_LIBRARY {
        return Err(AnalysisError::LibraryTooLarge { size: lib.len() });
    }
    Ok(())
}

/// Counts universal subsets of `lib` exactly.
///
/// Subsets are visited by cardinality. A subset is universal without any
/// group computation when removing one of its gates leaves a universal
/// subset; only the rest go through [`decide_universal`]. The empty subset is
/// not universal.
pub fn sublibrary_census(lib: &GateLibrary) -> Result<SubLibraryReport, AnalysisError> {
    check_size(lib)?;
    let k = lib.len();
    let degree = lib.degree();
    let perms = lib.permutations::<u16>()?;
    let mut layers: Vec<Vec<u32>> = vec![Vec::new(); k + 1];
    for mask in 0u32..(1 << k) {
        layers[mask.count_ones() as usize].push(mask);
    }
    let mut universal = vec![false; 1 << k];
    let mut report = SubLibraryReport {
        library: lib.name().to_string(),
        library_size: k,
        total_subsets: 1 << k,
        universal_subsets: 0,
        minimal_size: None,
        subsets_at_minimal_size: 0,
        universal_at_minimal_size: 0,
    };
    for (size, layer) in layers.iter().enumerate().skip(1) {
        let verdicts: Vec<bool> = layer
            .par_iter()
            .map(|&mask| -> Result<bool, AnalysisError> {
                let inherited = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .any(|i| universal[(mask & !(1 << i)) as usize]);
                if inherited {
                    return Ok(true);
                }
                Ok(decide_universal(degree, &subset_perms(&perms, mask))?.0)
            })
            .collect::<Result<_, _>>()?;
        let hits = verdicts.iter().filter(|&&v| v).count() as u64;
        for (&mask, v) in layer.iter().zip(verdicts) {
            universal[mask as usize] = v;
        }
        if hits > 0 && report.minimal_size.is_none() {
            report.minimal_size = Some(size);
            report.subsets_at_minimal_size = binomial(k as u64, size as u64);
            report.universal_at_minimal_size = hits;
        }
        report.universal_subsets += hits;
    }
    Ok(report)
}

fn combinations(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(k, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, size, 0, &mut Vec::new(), &mut out);
    out
}

/// All universal subsets of minimum cardinality, as 0-based gate positions
/// in lexicographic order. Empty when the library itself is not universal.
pub fn minimal_universal_sublibraries(lib: &GateLibrary) -> Result<Vec<Vec<usize>>, AnalysisError> {
    check_size(lib)?;
    let perms = lib.permutations::<u16>()?;
    for size in 1..=lib.len() {
        let candidates = combinations(lib.len(), size);
        let verdicts: Vec<bool> = candidates
            .par_iter()
            .map(|positions| {
                let gens: Vec<_> = positions.iter().map(|&i| perms[i].clone()).collect();
                decide_universal(lib.degree(), &gens).map(|v| v.0)
            })
            .collect::<Result<_, _>>()?;
        let found: Vec<Vec<usize>> = candidates
            .into_iter()
            .zip(verdicts)
            .filter_map(|(c, v)| v.then_some(c))
            .collect();
        if !found.is_empty() {
            return Ok(found);
        }
    }
    Ok(Vec::new())
}

/// Verdict for one sampled pair of G gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub first: Gate,
    pub second: Gate,
    pub universal: bool,
}

/// Samples `trials` pairs of distinct full-width G gates with uniformly
/// random chain orders from a ChaCha8 stream seeded with `seed`, and decides
/// the universality of each pair.
pub fn random_pair_check(
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<PairVerdict>, AnalysisError> {
    if !RANDOM_PAIR_WIDTHS.contains(&n) {
        return Err(AnalysisError::UnsupportedWidth(n));
    }
    if trials == 0 {
        return Err(AnalysisError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut first: Vec<usize> = (1..=n).collect();
        first.shuffle(&mut rng);
        let mut second = first.clone();
        while second == first {
            second.shuffle(&mut rng);
        }
        pairs.push((Gate::g(&first, n)?, Gate::g(&second, n)?));
    }
    pairs
        .into_par_iter()
        .map(|(first, second)| {
            let universal = pair_is_universal(&first, &second)?;
            Ok(PairVerdict {
                first,
                second,
                universal,
            })
        })
        .collect()
}

/// Universality of a two-gate library.
pub fn pair_is_universal(a: &Gate, b: &Gate) -> Result<bool, AnalysisError> {
    let gens = vec![a.elaborate::<u16>()?, b.elaborate::<u16>()?];
    Ok(decide_universal(1 << a.arity(), &gens)?.0)
}
