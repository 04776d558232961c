//! Permutations of `{1..N}` with left-to-right composition.
//!
//! Points are 1-based in every textual form (cycle notation, image lists) and
//! 0-based internally. `p.compose(&q)` means "apply `p`, then `q`", which is
//! the order in which gates are cascaded in a circuit. Most algebra texts use
//! the opposite convention, so be careful when porting formulas.
//!
//! A state of an `n`-wire circuit is the integer `1 + sum x_i * 2^(n-i)`, so
//! `x_1` is the most significant bit of the (0-based) state index.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, PrimInt, Unsigned};
use thiserror::Error;

/// Largest degree accepted by [`Permutation::rank`] / [`Permutation::unrank`].
pub const MAX_RANK_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("malformed cycle notation at position {pos}: {reason}")]
    MalformedCycle { pos: usize, reason: String },
    #[error("point {point} out of range 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {0} appears more than once")]
    RepeatedPoint(usize),
    #[error("malformed image list: {0}")]
    MalformedImages(String),
    #[error("rank {rank} out of range for degree {degree}")]
    RankOutOfRange { rank: u64, degree: usize },
    #[error("degree {0} too large for ranking (max {MAX_RANK_DEGREE})")]
    DegreeTooLargeForRanking(usize),
    #[error("degree {degree} does not fit the point type (max {max})")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("degree must be at least 1")]
    EmptyDegree,
}

/// Unsigned integer type used to store permutation images.
///
/// `u8` covers degree 256 (8 wires), `u16` covers degree 65536 (16 wires).
pub trait Point: PrimInt + Unsigned + Hash + fmt::Debug + Send + Sync + 'static {
    /// Largest degree representable with this point type.
    fn max_degree() -> usize {
        Self::max_value()
            .to_usize()
            .map_or(usize::MAX, |m| m.saturating_add(1))
    }

    #[inline]
    fn from_index(i: usize) -> Self {
        // Callers check the degree bound on construction.
        Self::from(i).expect("point index exceeds point type")
    }

    #[inline]
    fn index(self) -> usize {
        self.to_usize().expect("point index exceeds usize")
    }
}

impl<T> Point for T where T: PrimInt + Unsigned + Hash + fmt::Debug + Send + Sync + 'static {}

fn check_degree<P: Point>(degree: usize) -> Result<(), PermError> {
    if degree == 0 {
        return Err(PermError::EmptyDegree);
    }
    if degree > P::max_degree() {
        return Err(PermError::DegreeTooLarge {
            degree,
            max: P::max_degree(),
        });
    }
    Ok(())
}

/// A bijection on `{1..N}` stored as its 0-based image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation<P: Point> {
    images: Vec<P>,
}

impl<P: Point> Permutation<P> {
    /// Panics if `degree` is zero or does not fit the point type.
    pub fn identity(degree: usize) -> Self {
        check_degree::<P>(degree).expect("invalid identity degree");
        Self {
            images: (0..degree).map(P::from_index).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_zero_based(images: Vec<usize>) -> Result<Self, PermError> {
        let degree = images.len();
        check_degree::<P>(degree)?;
        let mut seen = vec![false; degree];
        for &im in &images {
            if im >= degree {
                return Err(PermError::PointOutOfRange {
                    point: im + 1,
                    degree,
                });
            }
            if std::mem::replace(&mut seen[im], true) {
                return Err(PermError::RepeatedPoint(im + 1));
            }
        }
        Ok(Self {
            images: images.into_iter().map(P::from_index).collect(),
        })
    }

    /// Builds a permutation from its 1-based image list `(σ(1), …, σ(N))`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let degree = images.len();
        let mut zero = Vec::with_capacity(degree);
        for &im in images {
            if im == 0 || im > degree {
                return Err(PermError::PointOutOfRange { point: im, degree });
            }
            zero.push(im - 1);
        }
        Self::from_zero_based(zero)
    }

    /// Builds a permutation from a function on 0-based points without
    /// checking bijectivity. Used by gate elaboration, whose maps are
    /// bijective by construction.
    pub(crate) fn from_fn_unchecked(degree: usize, f: impl Fn(usize) -> usize) -> Self {
        check_degree::<P>(degree).expect("invalid degree");
        let images: Vec<P> = (0..degree).map(|i| P::from_index(f(i))).collect();
        debug_assert!({
            let mut s: Vec<usize> = images.iter().map(|p| p.index()).collect();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| i == v)
        });
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based point `i`, 0-based.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i].index()
    }

    /// Image of the 1-based point `i`, 1-based.
    pub fn image(&self, i: usize) -> usize {
        self.apply(i - 1) + 1
    }

    pub fn images_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|p| p.index() + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, p)| p.index() == i)
    }

    /// `p.compose(q)(i) = q(p(i))`: apply `self` first, then `other`.
    pub fn compose(&self, other: &Self) -> Result<Self, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    /// Unchecked [`compose`](Self::compose). Panics on degree mismatch.
    #[inline]
    pub fn then(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Self {
            images: self
                .images
                .iter()
                .map(|p| other.images[p.index()])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![P::zero(); self.degree()];
        for (i, p) in self.images.iter().enumerate() {
            inv[p.index()] = P::from_index(i);
        }
        Self { images: inv }
    }

    /// `self` applied `k` times.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.degree());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        acc
    }

    /// Disjoint cycles of length ≥ 2, 1-based, each starting at its smallest
    /// point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.apply(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Lengths of all cycles, fixed points included, in order of smallest point.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.apply(x);
            }
            out.push(len);
        }
        out
    }

    /// Smallest `k ≥ 1` with `self^k = id`: the lcm of the cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycle_lengths()
            .into_iter()
            .fold(BigUint::one(), |acc, l| acc.lcm(&BigUint::from(l)))
    }

    /// Even permutations have an even number of even-length cycles.
    pub fn is_even(&self) -> bool {
        self.cycle_lengths().iter().filter(|&&l| l % 2 == 0).count() % 2 == 0
    }

    /// Smallest 0-based point not fixed by `self`.
    pub fn first_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, p)| p.index() != *i)
            .map(|(i, _)| i)
    }

    /// Parses disjoint-cycle notation such as `"(1,3,5,6)(7,8)"` or `"()"`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        check_degree::<P>(degree)?;
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        let bytes = text.as_bytes();
        let malformed = |pos: usize, reason: &str| PermError::MalformedCycle {
            pos,
            reason: reason.to_string(),
        };
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        if pos == bytes.len() {
            return Err(malformed(pos, "empty input"));
        }
        while pos < bytes.len() {
            if bytes[pos] != b'(' {
                return Err(malformed(pos, "expected '('"));
            }
            pos += 1;
            let mut cycle: Vec<usize> = Vec::new();
            loop {
                skip_ws(&mut pos);
                if pos >= bytes.len() {
                    return Err(malformed(pos, "unterminated cycle"));
                }
                if bytes[pos] == b')' && cycle.is_empty() {
                    pos += 1;
                    break;
                }
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(malformed(pos, "expected a point"));
                }
                let point: usize = text[start..pos]
                    .parse()
                    .map_err(|_| malformed(start, "point does not fit"))?;
                if point == 0 || point > degree {
                    return Err(PermError::PointOutOfRange { point, degree });
                }
                if std::mem::replace(&mut used[point - 1], true) {
                    return Err(PermError::RepeatedPoint(point));
                }
                cycle.push(point - 1);
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b')') => {
                        pos += 1;
                        break;
                    }
                    _ => return Err(malformed(pos, "expected ',' or ')'")),
                }
            }
            for (k, &a) in cycle.iter().enumerate() {
                images[a] = cycle[(k + 1) % cycle.len()];
            }
            skip_ws(&mut pos);
        }
        Ok(Self {
            images: images.into_iter().map(P::from_index).collect(),
        })
    }

    /// Cycle notation, fixed points omitted, identity as `"()"`.
    pub fn format_cycles(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for c in cycles {
            s.push('(');
            let parts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            s.push_str(&parts.join(","));
            s.push(')');
        }
        s
    }

    /// Parses a comma-separated 1-based image list, e.g. `"3,2,5,4,6,1,8,7"`.
    pub fn parse_images(text: &str) -> Result<Self, PermError> {
        let images = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| PermError::MalformedImages(format!("bad entry {:?}", t.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_images(&images)
    }

    pub fn format_images(&self) -> String {
        let parts: Vec<String> = self
            .images_one_based()
            .iter()
            .map(|p| p.to_string())
            .collect();
        parts.join(",")
    }

    /// Lehmer-code rank in `0..N!`; the identity has rank 0.
    pub fn rank(&self) -> Result<u64, PermError> {
        let n = self.degree();
        if n > MAX_RANK_DEGREE {
            return Err(PermError::DegreeTooLargeForRanking(n));
        }
        let mut rank = 0u64;
        let mut used: u32 = 0;
        for i in 0..n {
            let v = self.apply(i);
            let smaller_unused = (v as u32 - (used & ((1u32 << v) - 1)).count_ones()) as u64;
            rank = rank * (n - i) as u64 + smaller_unused;
            used |= 1 << v;
        }
        Ok(rank)
    }

    pub fn unrank(mut rank: u64, degree: usize) -> Result<Self, PermError> {
        if degree > MAX_RANK_DEGREE {
            return Err(PermError::DegreeTooLargeForRanking(degree));
        }
        check_degree::<P>(degree)?;
        let total = factorial_u64(degree);
        if rank >= total {
            return Err(PermError::RankOutOfRange { rank, degree });
        }
        let mut digits = vec![0usize; degree];
        for i in (0..degree).rev() {
            let base = (degree - i) as u64;
            digits[i] = (rank % base) as usize;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..degree).collect();
        let images = digits.into_iter().map(|d| pool.remove(d)).collect();
        Self::from_zero_based(images)
    }

    /// Re-stores the permutation with another point type.
    pub fn convert<Q: Point>(&self) -> Result<Permutation<Q>, PermError> {
        check_degree::<Q>(self.degree())?;
        Ok(Permutation {
            images: self
                .images
                .iter()
                .map(|p| Q::from_index(p.index()))
                .collect(),
        })
    }
}

/// `n!` for `n ≤ 20`.
pub fn factorial_u64(n: usize) -> u64 {
    assert!(n <= 20, "{n}! overflows u64");
    (1..=n as u64).product()
}

/// `n!` with arbitrary precision.
pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

impl<P: Point> fmt::Display for Permutation<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_cycles())
    }
}

impl<P: Point> fmt::Debug for Permutation<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self.format_cycles())
    }
}

/// An assignment `(x_1, …, x_n)` of bits to wires; `x_1` is the most
/// significant bit of the state index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitAssignment {
    bits: Vec<bool>,
}

impl BitAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Assignment of the 1-based state `index` on `n` wires.
    pub fn from_index(index: usize, n: usize) -> Option<Self> {
        if n >= usize::BITS as usize || index == 0 || index > 1usize << n {
            return None;
        }
        let state = index - 1;
        Some(Self {
            bits: (1..=n).map(|wire| wire_bit(state, n, wire)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `1 + sum x_i * 2^(n-i)`.
    pub fn index(&self) -> usize {
        1 + self
            .bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }
}

/// Value of the 1-based `wire` in the 0-based `state` of an `n`-wire circuit.
#[inline]
pub fn wire_bit(state: usize, n: usize, wire: usize) -> bool {
    (state >> (n - wire)) & 1 == 1
}

/// Bit mask selecting the 1-based `wire` in a 0-based state index.
#[inline]
pub fn wire_mask(n: usize, wire: usize) -> usize {
    1 << (n - wire)
}
