//! What a set of permutations generates.
//!
//! Two independent engines compute group orders: [`closure_enumerate`]
//! walks the whole group (small degree only) and [`StabilizerChain`] builds a
//! base and strong generating set with the deterministic Schreier–Sims
//! algorithm. Universality at large degree is first decided from structural
//! certificates (transitivity, parity, primitivity, Jordan's prime-cycle
//! theorem) and falls back to the stabilizer chain when none applies.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gates::{GateError, GateLibrary};
use crate::perm::{factorial, factorial_u64, PermError, Permutation, Point};

/// Default element budget for [`closure_enumerate`].
pub const DEFAULT_CLOSURE_CAP: u64 = 10_000_000;

/// Up to this degree universality is decided by the stabilizer chain alone.
pub const CHAIN_ONLY_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("closure exceeds {cap} elements")]
    CapExceeded { cap: u64 },
    #[error("degree mismatch: chain has degree {chain}, permutation has degree {perm}")]
    DegreeMismatch { chain: usize, perm: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Size of the group generated by `gens`, by breadth-first closure from the
/// identity under right multiplication.
///
/// Degrees up to 10 use a Lehmer-rank bitmap; larger ones a hashed set.
pub fn closure_enumerate<P: Point>(
    degree: usize,
    gens: &[Permutation<P>],
    cap: u64,
) -> Result<u64, GroupError> {
    for g in gens {
        if g.degree() != degree {
            return Err(GroupError::DegreeMismatch {
                chain: degree,
                perm: g.degree(),
            });
        }
    }
    let id = Permutation::<P>::identity(degree);
    let mut count = 1u64;
    let mut frontier = vec![id.clone()];
    if degree <= 10 {
        let mut seen = vec![0u64; (factorial_u64(degree) as usize).div_ceil(64)];
        let mark = |seen: &mut Vec<u64>, p: &Permutation<P>| -> bool {
            let r = p.rank().expect("small degree") as usize;
            let (w, b) = (r / 64, r % 64);
            let fresh = seen[w] & (1 << b) == 0;
            seen[w] |= 1 << b;
            fresh
        };
        mark(&mut seen, &id);
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for g in gens {
                    let q = p.then(g);
                    if mark(&mut seen, &q) {
                        count += 1;
                        if count > cap {
                            return Err(GroupError::CapExceeded { cap });
                        }
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
    } else {
        let mut seen = HashSet::new();
        seen.insert(id);
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for g in gens {
                    let q = p.then(g);
                    if !seen.contains(&q) {
                        count += 1;
                        if count > cap {
                            return Err(GroupError::CapExceeded { cap });
                        }
                        seen.insert(q.clone());
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
    }
    Ok(count)
}

/// [`closure_enumerate`] for the permutations of a gate library.
pub fn library_closure(lib: &GateLibrary, cap: u64) -> Result<u64, GroupError> {
    let gens = lib.permutations::<u16>()?;
    closure_enumerate(lib.degree(), &gens, cap)
}

#[derive(Debug, Clone)]
struct Level<P: Point> {
    base_point: usize,
    /// Strong generators fixing all earlier base points.
    generators: Vec<Permutation<P>>,
    /// Fundamental orbit of `base_point`, in discovery order.
    orbit: Vec<usize>,
    /// `transversal[x]` maps `base_point` to `x`.
    transversal: Vec<Option<Permutation<P>>>,
    transversal_inv: Vec<Option<Permutation<P>>>,
    /// Per orbit position, how many generators have had their Schreier
    /// generator checked.
    checked: Vec<usize>,
}

impl<P: Point> Level<P> {
    fn new(base_point: usize, degree: usize) -> Self {
        let mut transversal = vec![None; degree];
        let mut transversal_inv = vec![None; degree];
        transversal[base_point] = Some(Permutation::identity(degree));
        transversal_inv[base_point] = Some(Permutation::identity(degree));
        Self {
            base_point,
            generators: Vec::new(),
            orbit: vec![base_point],
            transversal,
            transversal_inv,
            checked: vec![0],
        }
    }

    /// Appends a generator and extends the orbit without changing any
    /// existing coset representative.
    fn add_generator(&mut self, g: Permutation<P>) {
        self.generators.push(g);
        let new = self.generators.len() - 1;
        let mut i = 0;
        let old_len = self.orbit.len();
        while i < self.orbit.len() {
            let y = self.orbit[i];
            let range = if i < old_len {
                new..new + 1
            } else {
                0..self.generators.len()
            };
            for gi in range {
                let z = self.generators[gi].apply(y);
                if self.transversal[z].is_none() {
                    let u = self.transversal[y]
                        .as_ref()
                        .expect("orbit point")
                        .then(&self.generators[gi]);
                    self.transversal_inv[z] = Some(u.inverse());
                    self.transversal[z] = Some(u);
                    self.orbit.push(z);
                    self.checked.push(0);
                }
            }
            i += 1;
        }
    }
}

/// A base and strong generating set with explicit transversals.
#[derive(Debug, Clone)]
pub struct StabilizerChain<P: Point> {
    degree: usize,
    levels: Vec<Level<P>>,
}

impl<P: Point> StabilizerChain<P> {
    /// Deterministic Schreier–Sims. Base points are chosen greedily as the
    /// smallest point moved by the element that needs a new level.
    pub fn new(degree: usize, gens: &[Permutation<P>]) -> Result<Self, GroupError> {
        let mut chain = Self {
            degree,
            levels: Vec::new(),
        };
        let mut distinct: Vec<Permutation<P>> = Vec::new();
        for g in gens {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch {
                    chain: degree,
                    perm: g.degree(),
                });
            }
            if !g.is_identity() && !distinct.contains(g) {
                distinct.push(g.clone());
            }
        }
        for g in &distinct {
            if chain
                .levels
                .iter()
                .all(|l| g.apply(l.base_point) == l.base_point)
            {
                let b = g.first_moved_point().expect("non-identity");
                chain.levels.push(Level::new(b, degree));
            }
        }
        for g in &distinct {
            for level in chain.levels.iter_mut() {
                level.add_generator(g.clone());
                if g.apply(level.base_point) != level.base_point {
                    break;
                }
            }
        }
        let mut i = chain.levels.len();
        while i > 0 {
            match chain.next_residue(i - 1) {
                Some((residue, drop_level)) => {
                    if drop_level == chain.levels.len() {
                        let b = residue.first_moved_point().expect("non-identity residue");
                        chain.levels.push(Level::new(b, degree));
                    }
                    for l in i..=drop_level {
                        chain.levels[l].add_generator(residue.clone());
                    }
                    i = drop_level + 1;
                }
                None => i -= 1,
            }
        }
        Ok(chain)
    }

    /// Chain for the group generated by a gate library.
    pub fn for_library(lib: &GateLibrary) -> Result<Self, GroupError> {
        let gens = lib.permutations::<P>()?;
        Self::new(lib.degree(), &gens)
    }

    /// First Schreier generator at `level` that does not sift through the
    /// levels below it, with the level where sifting stopped.
    fn next_residue(&mut self, level: usize) -> Option<(Permutation<P>, usize)> {
        let mut pos = 0;
        while pos < self.levels[level].orbit.len() {
            while self.levels[level].checked[pos] < self.levels[level].generators.len() {
                let lv = &self.levels[level];
                let s = &lv.generators[lv.checked[pos]];
                let beta = lv.orbit[pos];
                let gamma = s.apply(beta);
                let h = lv.transversal[beta]
                    .as_ref()
                    .expect("orbit point")
                    .then(s)
                    .then(lv.transversal_inv[gamma].as_ref().expect("orbit point"));
                self.levels[level].checked[pos] += 1;
                if h.is_identity() {
                    continue;
                }
                let (residue, drop_level) = self.strip(h, level + 1);
                if drop_level < self.levels.len() || !residue.is_identity() {
                    return Some((residue, drop_level));
                }
            }
            pos += 1;
        }
        None
    }

    /// Sifts `g` through the levels from `start`; returns the residue and the
    /// index of the level where it left the chain (`levels.len()` if it went
    /// through).
    fn strip(&self, mut g: Permutation<P>, start: usize) -> (Permutation<P>, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let x = g.apply(level.base_point);
            match &level.transversal_inv[x] {
                Some(u_inv) => g = g.then(u_inv),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// 1-based base points.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point + 1).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// 1-based fundamental orbit of each level.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        self.levels
            .iter()
            .map(|l| l.orbit.iter().map(|x| x + 1).collect())
            .collect()
    }

    pub fn strong_generators(&self, level: usize) -> &[Permutation<P>] {
        &self.levels[level].generators
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Coset representative at `level` mapping its base point to the 1-based
    /// `point`.
    pub fn transversal(&self, level: usize, point: usize) -> Option<&Permutation<P>> {
        self.levels[level].transversal[point - 1].as_ref()
    }

    /// Exact group order: the product of the fundamental orbit sizes.
    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Residue of `p` after sifting through the whole chain.
    pub fn sift(&self, p: &Permutation<P>) -> Result<Permutation<P>, GroupError> {
        self.check_degree(p)?;
        Ok(self.strip(p.clone(), 0).0)
    }

    /// Membership test by sifting.
    pub fn contains(&self, p: &Permutation<P>) -> Result<bool, GroupError> {
        self.check_degree(p)?;
        let (residue, drop_level) = self.strip(p.clone(), 0);
        Ok(drop_level == self.levels.len() && residue.is_identity())
    }

    fn check_degree(&self, p: &Permutation<P>) -> Result<(), GroupError> {
        if p.degree() != self.degree {
            return Err(GroupError::DegreeMismatch {
                chain: self.degree,
                perm: p.degree(),
            });
        }
        Ok(())
    }
}

/// Stabilizer chain of a gate library.
pub fn schreier_sims(lib: &GateLibrary) -> Result<StabilizerChain<u16>, GroupError> {
    StabilizerChain::for_library(lib)
}

/// Order of a stabilizer chain.
pub fn group_order<P: Point>(chain: &StabilizerChain<P>) -> BigUint {
    chain.order()
}

pub fn is_transitive<P: Point>(degree: usize, gens: &[Permutation<P>]) -> bool {
    let mut seen = vec![false; degree];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == degree
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Smallest block of imprimitivity containing the 0-based points `a` and
/// `b`, as a 0-based class label per point.
pub fn minimal_block<P: Point>(
    degree: usize,
    gens: &[Permutation<P>],
    a: usize,
    b: usize,
) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..degree).collect();
    let mut queue = Vec::new();
    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
    if ra != rb {
        parent[rb] = ra;
        queue.push((a, b));
    }
    while let Some((x, y)) = queue.pop() {
        for g in gens {
            let (gx, gy) = (g.apply(x), g.apply(y));
            let (rx, ry) = (find(&mut parent, gx), find(&mut parent, gy));
            if rx != ry {
                parent[ry] = rx;
                queue.push((rx, ry));
            }
        }
    }
    (0..degree).map(|x| find(&mut parent, x)).collect()
}

/// True when the group is transitive and preserves no nontrivial block system.
pub fn is_primitive<P: Point>(degree: usize, gens: &[Permutation<P>]) -> bool {
    if !is_transitive(degree, gens) {
        return false;
    }
    (1..degree).all(|b| {
        let classes = minimal_block(degree, gens, 0, b);
        let root = classes[0];
        classes.iter().all(|&c| c == root)
    })
}

fn is_prime(p: usize) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Searches the group for an element whose cycle type proves, with Jordan's
/// theorem, that a primitive group contains the alternating group: a cycle
/// of prime length `p` with `degree/2 < p ≤ degree - 3`. Some power of such
/// an element is a `p`-cycle.
///
/// Elements are drawn by product replacement from a seeded ChaCha8 stream,
/// so the search is reproducible.
pub fn jordan_witness<P: Point>(
    degree: usize,
    gens: &[Permutation<P>],
    seed: u64,
    attempts: usize,
) -> Option<Permutation<P>> {
    let gens: Vec<&Permutation<P>> = gens.iter().filter(|g| !g.is_identity()).collect();
    if gens.is_empty() || degree < 8 {
        return None;
    }
    let good_prime = |len: usize| 2 * len > degree && len + 3 <= degree && is_prime(len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = 10.max(gens.len());
    let mut state: Vec<Permutation<P>> = (0..slots).map(|i| gens[i % gens.len()].clone()).collect();
    let mut acc = Permutation::identity(degree);
    let mut step = |state: &mut Vec<Permutation<P>>, acc: &mut Permutation<P>| {
        let i = rng.gen_range(0..slots);
        let mut j = rng.gen_range(0..slots - 1);
        if j >= i {
            j += 1;
        }
        let rhs = if rng.gen::<bool>() {
            state[j].clone()
        } else {
            state[j].inverse()
        };
        state[i] = if rng.gen::<bool>() {
            state[i].then(&rhs)
        } else {
            rhs.then(&state[i])
        };
        *acc = acc.then(&state[i]);
    };
    for _ in 0..50 {
        step(&mut state, &mut acc);
    }
    for _ in 0..attempts {
        step(&mut state, &mut acc);
        if acc.cycle_lengths().into_iter().any(good_prime) {
            return Some(acc);
        }
    }
    None
}

/// How a universality verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Stabilizer-chain order compared with `degree!`.
    ChainOrder,
    /// Some point is not reachable from point 1.
    Intransitive,
    /// All generators are even.
    AllEven,
    /// A nontrivial block system exists.
    Imprimitive,
    /// Primitive, has an odd generator and a Jordan prime-cycle witness.
    Jordan,
}

/// Decides whether `gens` generate the full symmetric group of `degree`.
pub fn decide_universal<P: Point>(
    degree: usize,
    gens: &[Permutation<P>],
) -> Result<(bool, Route), GroupError> {
    if degree <= CHAIN_ONLY_DEGREE {
        let chain = StabilizerChain::new(degree, gens)?;
        return Ok((chain.order() == factorial(degree), Route::ChainOrder));
    }
    if !is_transitive(degree, gens) {
        return Ok((false, Route::Intransitive));
    }
    if gens.iter().all(|g| g.is_even()) {
        return Ok((false, Route::AllEven));
    }
    if !is_primitive(degree, gens) {
        return Ok((false, Route::Imprimitive));
    }
    if jordan_witness(degree, gens, 0, 2000).is_some() {
        return Ok((true, Route::Jordan));
    }
    let chain = StabilizerChain::new(degree, gens)?;
    Ok((chain.order() == factorial(degree), Route::ChainOrder))
}

/// True iff the library generates all `(2^n)!` reversible functions.
pub fn is_universal(lib: &GateLibrary) -> Result<bool, GroupError> {
    let gens = lib.permutations::<u16>()?;
    Ok(decide_universal(lib.degree(), &gens)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{standard_library, Gate};

    type P = Permutation<u16>;

    fn lib(gates: &[&str], n: usize) -> GateLibrary {
        GateLibrary::new(
            "test",
            gates.iter().map(|g| Gate::parse(g, n).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn closure_sizes() {
        let cases = [
            ("N", 8),
            ("C", 168),
            ("T", 24),
            ("F", 6),
            ("P", 5040),
            ("NF", 1152),
        ];
        for (name, size) in cases {
            let l = standard_library(name, 3).unwrap();
            assert_eq!(
                library_closure(&l, DEFAULT_CLOSURE_CAP).unwrap(),
                size,
                "{name}"
            );
        }
        let g2 = lib(&["G[1,2]", "G[2,1]"], 2);
        assert_eq!(library_closure(&g2, DEFAULT_CLOSURE_CAP).unwrap(), 24);
    }

    #[test]
    fn closure_cap() {
        let l = standard_library("NCT", 3).unwrap();
        assert_eq!(
            library_closure(&l, 1000),
            Err(GroupError::CapExceeded { cap: 1000 })
        );
        // hashed path at degree 16
        let l = lib(&["N[1]", "N[2]", "C[1,2]"], 4);
        assert_eq!(library_closure(&l, 100).unwrap(), 8);
    }

    #[test]
    fn chain_orders() {
        let g3 = schreier_sims(&standard_library("G", 3).unwrap()).unwrap();
        assert_eq!(g3.order(), BigUint::from(40320u32));
        let n1 = schreier_sims(&lib(&["N[1]"], 3)).unwrap();
        assert_eq!(n1.order(), BigUint::from(2u32));
        let nct = schreier_sims(&standard_library("NCT", 3).unwrap()).unwrap();
        assert_eq!(group_order(&nct), BigUint::from(40320u32));
        let trivial = StabilizerChain::<u16>::new(8, &[P::identity(8)]).unwrap();
        assert_eq!(trivial.order(), BigUint::one());
        assert_eq!(trivial.depth(), 0);
        let empty = StabilizerChain::<u16>::new(8, &[]).unwrap();
        assert_eq!(empty.order(), BigUint::one());
    }

    #[test]
    fn chain_invariants() {
        let l = standard_library("NCP", 3).unwrap();
        let gens = l.permutations::<u16>().unwrap();
        let chain = StabilizerChain::new(8, &gens).unwrap();
        let base = chain.base();
        for level in 0..chain.depth() {
            for g in chain.strong_generators(level) {
                for &b in &base[..level] {
                    assert_eq!(g.image(b), b);
                }
            }
            for &x in &chain.orbits()[level] {
                let u = chain.transversal(level, x).unwrap();
                assert_eq!(u.image(base[level]), x);
            }
        }
        for g in &gens {
            assert!(chain.sift(g).unwrap().is_identity());
        }
    }

    #[test]
    fn membership() {
        let c = schreier_sims(&standard_library("C", 3).unwrap()).unwrap();
        let n1 = Gate::not(1, 3).unwrap().elaborate::<u16>().unwrap();
        assert!(!c.contains(&n1).unwrap());
        assert!(c.contains(&P::identity(8)).unwrap());
        let c13 = Gate::cnot(1, 3, 3).unwrap().elaborate::<u16>().unwrap();
        assert!(c.contains(&c13).unwrap());
        assert_eq!(
            c.contains(&P::identity(16)),
            Err(GroupError::DegreeMismatch { chain: 8, perm: 16 })
        );
    }

    #[test]
    fn universality_verdicts() {
        assert!(is_universal(&lib(&["G[1,2,3]", "G[2,3,1]"], 3)).unwrap());
        assert!(!is_universal(&lib(&["G[1,2,3]", "G[1,3,2]"], 3)).unwrap());
        // differing first moves are not enough: this pair generates a group of order 192
        assert!(!is_universal(&lib(&["G[1,2,3]", "G[2,1,3]"], 3)).unwrap());
        assert!(!is_universal(&standard_library("NF", 3).unwrap()).unwrap());
        assert!(is_universal(&lib(&["N[2]", "P[1,3,2]", "P[2,3,1]"], 3)).unwrap());
        assert!(is_universal(&lib(&["N[1]", "C[1,2]", "C[2,1]"], 2)).unwrap());
        assert!(is_universal(&lib(&["N[1]"], 1)).unwrap());
    }

    #[test]
    fn primitivity() {
        let g3 = lib(&["G[1,2,3]", "G[1,3,2]"], 3)
            .permutations::<u16>()
            .unwrap();
        assert!(is_transitive(8, &g3));
        assert!(!is_primitive(8, &g3));
        let u = lib(&["G[1,2,3]", "G[2,3,1]"], 3)
            .permutations::<u16>()
            .unwrap();
        assert!(is_primitive(8, &u));
        let n = standard_library("N", 3)
            .unwrap()
            .permutations::<u16>()
            .unwrap();
        assert!(is_transitive(8, &n));
        assert!(!is_primitive(8, &n));
        let t = standard_library("T", 3)
            .unwrap()
            .permutations::<u16>()
            .unwrap();
        assert!(!is_transitive(8, &t));
    }

    #[test]
    fn jordan_witness_has_long_prime_cycle() {
        let gens = lib(&["G[1,2,3,4,5,6,7]", "G[7,6,5,4,3,2,1]"], 7)
            .permutations::<u16>()
            .unwrap();
        let w = jordan_witness(128, &gens, 0, 2000).expect("witness");
        let p = w
            .cycle_lengths()
            .into_iter()
            .find(|&l| 2 * l > 128 && l + 3 <= 128 && is_prime(l))
            .unwrap();
        // raising to the lcm of the other cycle lengths leaves a single p-cycle
        let others: Vec<usize> = w.cycle_lengths().into_iter().filter(|&l| l != p).collect();
        let m = others
            .iter()
            .fold(1u64, |acc, &l| num_integer::lcm(acc, l as u64));
        let cyc = w.pow(m);
        let lens: Vec<usize> = cyc.cycle_lengths().into_iter().filter(|&l| l > 1).collect();
        assert_eq!(lens, vec![p]);
    }

    #[test]
    fn large_degree_routes() {
        let same_start = lib(&["G[1,2,3,4,5,6,7]", "G[1,3,2,4,5,6,7]"], 7)
            .permutations::<u16>()
            .unwrap();
        assert_eq!(
            decide_universal(128, &same_start).unwrap(),
            (false, Route::Imprimitive)
        );
        let good = lib(&["G[1,2,3,4,5,6,7]", "G[7,6,5,4,3,2,1]"], 7)
            .permutations::<u16>()
            .unwrap();
        assert_eq!(decide_universal(128, &good).unwrap(), (true, Route::Jordan));
        let even = lib(&["C[1,2]", "T[1,2,3]", "N[1]"], 7)
            .permutations::<u16>()
            .unwrap();
        assert!(!decide_universal(128, &even).unwrap().0);
    }
}
