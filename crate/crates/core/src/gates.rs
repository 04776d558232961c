//! Gate families and the named gate libraries.
//!
//! Every gate reads all of its controls from the *input* state, even for the
//! multi-stage Peres and G gates. Written as a cascade of Toffoli-family
//! gates, a G gate `G[i1,..,im]` is `T[i1..im]`, …, `T[i1,i2,i3]`,
//! `C[i1,i2]`, `N[i1]`: largest control set first, the unconditional flip
//! last.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::perm::{wire_bit, wire_mask, PermError, Permutation, Point};

/// Widest circuit a gate may be embedded in (state space of 2^16 points).
pub const MAX_ARITY: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("gate parse error at position {pos}: {reason}")]
    Parse { pos: usize, reason: String },
    #[error("malformed label {0:?}: expected a permutation of 1..k")]
    MalformedLabel(String),
    #[error("library {name} is not available at width {n}")]
    UnsupportedWidth { name: String, n: usize },
    #[error("unknown library {0:?}")]
    UnknownLibrary(String),
    #[error("invalid library: {0}")]
    InvalidLibrary(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    /// NOT: flips its wire.
    Not,
    /// Feynman / CNOT: `[control, target]`.
    Cnot,
    /// Generalized Toffoli: `[controls.., target]`, at least two controls.
    Toffoli,
    /// Fredkin: `[control, a, b]`, swaps `a` and `b` when the control is set.
    Fredkin,
    /// Peres: `[control, a, b]`, `x_a ^= x_c`, `x_b ^= x_c x_a`.
    Peres,
    /// The single-type gate: a chain where wire `k` flips iff all earlier
    /// chain wires are set, the first flipping unconditionally.
    G,
}

impl GateKind {
    pub fn letter(self) -> char {
        match self {
            GateKind::Not => 'N',
            GateKind::Cnot => 'C',
            GateKind::Toffoli => 'T',
            GateKind::Fredkin => 'F',
            GateKind::Peres => 'P',
            GateKind::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'N' => GateKind::Not,
            'C' => GateKind::Cnot,
            'T' => GateKind::Toffoli,
            'F' => GateKind::Fredkin,
            'P' => GateKind::Peres,
            'G' => GateKind::G,
            _ => return None,
        })
    }
}

/// A gate on the 1-based `wires` of an `arity`-wire circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gate {
    kind: GateKind,
    wires: Vec<usize>,
    arity: usize,
}

impl Gate {
    pub fn new(kind: GateKind, wires: Vec<usize>, arity: usize) -> Result<Self, GateError> {
        let invalid = |msg: String| Err(GateError::InvalidGate(msg));
        if arity == 0 || arity > MAX_ARITY {
            return invalid(format!("arity {arity} outside 1..={MAX_ARITY}"));
        }
        let count_ok = match kind {
            GateKind::Not => wires.len() == 1,
            GateKind::Cnot => wires.len() == 2,
            GateKind::Toffoli => wires.len() >= 3,
            GateKind::Fredkin | GateKind::Peres => wires.len() == 3,
            GateKind::G => wires.len() >= 2,
        };
        if !count_ok {
            return invalid(format!(
                "{} gate cannot have {} wires",
                kind.letter(),
                wires.len()
            ));
        }
        let mut seen = HashSet::new();
        for &w in &wires {
            if w == 0 || w > arity {
                return invalid(format!("wire {w} outside 1..={arity}"));
            }
            if !seen.insert(w) {
                return invalid(format!("wire {w} repeated"));
            }
        }
        Ok(Self { kind, wires, arity })
    }

    pub fn not(wire: usize, arity: usize) -> Result<Self, GateError> {
        Self::new(GateKind::Not, vec![wire], arity)
    }

    pub fn cnot(control: usize, target: usize, arity: usize) -> Result<Self, GateError> {
        Self::new(GateKind::Cnot, vec![control, target], arity)
    }

    pub fn toffoli(controls: &[usize], target: usize, arity: usize) -> Result<Self, GateError> {
        let mut wires = controls.to_vec();
        wires.push(target);
        Self::new(GateKind::Toffoli, wires, arity)
    }

    pub fn fredkin(control: usize, a: usize, b: usize, arity: usize) -> Result<Self, GateError> {
        Self::new(GateKind::Fredkin, vec![control, a, b], arity)
    }

    pub fn peres(control: usize, a: usize, b: usize, arity: usize) -> Result<Self, GateError> {
        Self::new(GateKind::Peres, vec![control, a, b], arity)
    }

    /// G gate with wires in chain order.
    pub fn g(chain: &[usize], arity: usize) -> Result<Self, GateError> {
        Self::new(GateKind::G, chain.to_vec(), arity)
    }

    /// G gate from a position label: digit `k` of the label is the chain
    /// position of wire `k`. `"2341"` is the chain `[4,1,2,3]`. This is the
    /// inverse of the chain-order subscripts used for 3-wire G gates.
    pub fn from_position_label(label: &str) -> Result<Self, GateError> {
        let malformed = || GateError::MalformedLabel(label.to_string());
        let digits: Vec<usize> = label
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(malformed)?;
        let n = digits.len();
        if !(2..=9).contains(&n) {
            return Err(malformed());
        }
        let mut chain = vec![0; n];
        for (wire, &pos) in digits.iter().enumerate() {
            if pos == 0 || pos > n || chain[pos - 1] != 0 {
                return Err(malformed());
            }
            chain[pos - 1] = wire + 1;
        }
        Self::g(&chain, n)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The same gate embedded in a circuit of another width.
    pub fn with_arity(&self, arity: usize) -> Result<Self, GateError> {
        Self::new(self.kind, self.wires.clone(), arity)
    }

    /// Form with order-irrelevant wires sorted (Toffoli controls, Fredkin
    /// pair); two gates with equal canonical forms act identically.
    pub fn canonical(&self) -> Self {
        let mut wires = self.wires.clone();
        match self.kind {
            GateKind::Toffoli => {
                let k = wires.len() - 1;
                wires[..k].sort_unstable();
            }
            GateKind::Fredkin => wires[1..].sort_unstable(),
            _ => {}
        }
        Self {
            kind: self.kind,
            wires,
            arity: self.arity,
        }
    }

    /// Applies the gate to a 0-based state index.
    pub fn apply_state(&self, state: usize) -> usize {
        let n = self.arity;
        let bit = |w: usize| wire_bit(state, n, w);
        let mask = |w: usize| wire_mask(n, w);
        let w = &self.wires;
        match self.kind {
            GateKind::Not => state ^ mask(w[0]),
            GateKind::Cnot => {
                if bit(w[0]) {
                    state ^ mask(w[1])
                } else {
                    state
                }
            }
            GateKind::Toffoli => {
                let (target, controls) = w.split_last().expect("toffoli has wires");
                if controls.iter().all(|&c| bit(c)) {
                    state ^ mask(*target)
                } else {
                    state
                }
            }
            GateKind::Fredkin => {
                if bit(w[0]) && bit(w[1]) != bit(w[2]) {
                    state ^ mask(w[1]) ^ mask(w[2])
                } else {
                    state
                }
            }
            GateKind::Peres => {
                let mut out = state;
                if bit(w[0]) {
                    out ^= mask(w[1]);
                    if bit(w[1]) {
                        out ^= mask(w[2]);
                    }
                }
                out
            }
            GateKind::G => {
                let mut out = state;
                for &wire in w {
                    out ^= mask(wire);
                    if !bit(wire) {
                        break;
                    }
                }
                out
            }
        }
    }

    /// The permutation of `{1..2^n}` realized by the gate.
    pub fn elaborate<P: Point>(&self) -> Result<Permutation<P>, GateError> {
        let degree = 1usize << self.arity;
        if degree > P::max_degree() {
            return Err(PermError::DegreeTooLarge {
                degree,
                max: P::max_degree(),
            }
            .into());
        }
        Ok(Permutation::from_fn_unchecked(degree, |s| {
            self.apply_state(s)
        }))
    }

    /// The gate's Boolean map, e.g. `(x1,x2,x3) -> (x1 ^ 1, x2 ^ x1, x3 ^ x1x2)`.
    pub fn boolean_map(&self) -> String {
        let n = self.arity;
        let var = |w: usize| format!("x{w}");
        let product = |ws: &[usize]| ws.iter().map(|&w| var(w)).collect::<String>();
        let mut outputs: Vec<String> = (1..=n).map(var).collect();
        let w = &self.wires;
        match self.kind {
            GateKind::Not => outputs[w[0] - 1] = format!("x{} ^ 1", w[0]),
            GateKind::Cnot => outputs[w[1] - 1] = format!("x{} ^ x{}", w[1], w[0]),
            GateKind::Toffoli => {
                let (t, cs) = w.split_last().expect("toffoli has wires");
                outputs[t - 1] = format!("x{t} ^ {}", product(cs));
            }
            GateKind::Fredkin => {
                let (c, a, b) = (w[0], w[1], w[2]);
                outputs[a - 1] = format!("x{c} ? x{b} : x{a}");
                outputs[b - 1] = format!("x{c} ? x{a} : x{b}");
            }
            GateKind::Peres => {
                let (c, a, b) = (w[0], w[1], w[2]);
                outputs[a - 1] = format!("x{a} ^ x{c}");
                outputs[b - 1] = format!("x{b} ^ x{c}x{a}");
            }
            GateKind::G => {
                for (k, &wire) in w.iter().enumerate() {
                    outputs[wire - 1] = if k == 0 {
                        format!("x{wire} ^ 1")
                    } else {
                        format!("x{wire} ^ {}", product(&w[..k]))
                    };
                }
            }
        }
        let inputs: Vec<String> = (1..=n).map(var).collect();
        format!("({}) -> ({})", inputs.join(","), outputs.join(", "))
    }

    /// Parses a gate term such as `"T[1,2,3]"` for an `arity`-wire circuit.
    pub fn parse(text: &str, arity: usize) -> Result<Self, GateError> {
        let err = |pos: usize, reason: &str| GateError::Parse {
            pos,
            reason: reason.to_string(),
        };
        let lead = text.len() - text.trim_start().len();
        let body = text.trim();
        let mut chars = body.char_indices();
        let kind = match chars.next() {
            Some((_, c)) => GateKind::from_letter(c)
                .ok_or_else(|| err(lead, "expected one of N, C, T, F, P, G"))?,
            None => return Err(err(lead, "empty gate term")),
        };
        let rest = body[1..].trim_start();
        let open = lead + body.len() - rest.len();
        if !rest.starts_with('[') {
            return Err(err(open, "expected '['"));
        }
        if !rest.ends_with(']') {
            return Err(err(lead + body.len(), "expected ']'"));
        }
        let inner = &rest[1..rest.len() - 1];
        let mut wires = Vec::new();
        let mut offset = open + 1;
        for part in inner.split(',') {
            let trimmed = part.trim();
            let at = offset + (part.len() - part.trim_start().len());
            let wire = trimmed
                .parse::<usize>()
                .map_err(|_| err(at, "expected a wire number"))?;
            wires.push(wire);
            offset += part.len() + 1;
        }
        Self::new(kind, wires, arity)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.wires.iter().map(|w| w.to_string()).collect();
        write!(f, "{}[{}]", self.kind.letter(), ws.join(","))
    }
}

impl Serialize for Gate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Splits a list of gate terms separated by `,` or `;` outside brackets.
pub fn parse_gate_list(text: &str, arity: usize) -> Result<Vec<Gate>, GateError> {
    let mut gates = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let push = |start: usize, end: usize, gates: &mut Vec<Gate>| -> Result<(), GateError> {
        let term = &text[start..end];
        if term.trim().is_empty() {
            return Ok(());
        }
        Gate::parse(term, arity)
            .map(|g| gates.push(g))
            .map_err(|e| match e {
                GateError::Parse { pos, reason } => GateError::Parse {
                    pos: pos + start,
                    reason,
                },
                other => other,
            })
    };
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' | ';' if depth == 0 => {
                push(start, i, &mut gates)?;
                start = i + 1;
            }
            _ => {}
        }
    }
    push(start, text.len(), &mut gates)?;
    Ok(gates)
}

/// An ordered set of gates of one common width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateLibrary {
    name: String,
    gates: Vec<Gate>,
    arity: usize,
}

impl GateLibrary {
    pub fn new(name: impl Into<String>, gates: Vec<Gate>) -> Result<Self, GateError> {
        let name = name.into();
        let arity = match gates.first() {
            Some(g) => g.arity(),
            None => return Err(GateError::InvalidLibrary(format!("{name} is empty"))),
        };
        let mut seen = HashSet::new();
        for g in &gates {
            if g.arity() != arity {
                return Err(GateError::InvalidLibrary(format!(
                    "{g} has arity {} but the library has arity {arity}",
                    g.arity()
                )));
            }
            if !seen.insert(g.canonical()) {
                return Err(GateError::InvalidLibrary(format!("duplicate gate {g}")));
            }
        }
        Ok(Self { name, gates, arity })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn degree(&self) -> usize {
        1 << self.arity
    }

    pub fn permutations<P: Point>(&self) -> Result<Vec<Permutation<P>>, GateError> {
        self.gates.iter().map(|g| g.elaborate()).collect()
    }

    /// The sub-library made of the gates at `positions`.
    pub fn subset(&self, positions: &[usize]) -> Result<Self, GateError> {
        let gates = positions.iter().map(|&i| self.gates[i].clone()).collect();
        Self::new(format!("{}{:?}", self.name, positions), gates)
    }
}

/// Names accepted by [`standard_library`].
pub const LIBRARY_NAMES: &[&str] = &[
    "N", "C", "T", "F", "P", "NF", "NT", "NP", "NCT", "NCF", "NCP", "NCTF", "NCPT", "NCPF", "G",
    "GT",
];

/// Largest width for which the `G` library (n! gates) is enumerated.
pub const MAX_G_LIBRARY_WIDTH: usize = 8;
/// Largest width for which the `GT` library (n 2^(n-1) gates) is enumerated.
pub const MAX_GT_LIBRARY_WIDTH: usize = 12;

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// All orderings of `1..=n` in lexicographic order.
pub fn chain_orders(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let w = rest.remove(i);
            cur.push(w);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, w);
        }
    }
    let mut out = Vec::new();
    rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

fn nots(n: usize) -> Vec<Gate> {
    (1..=n).map(|w| Gate::not(w, n).expect("valid")).collect()
}

fn cnots(n: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for c in 1..=n {
        for t in 1..=n {
            if c != t {
                out.push(Gate::cnot(c, t, n).expect("valid"));
            }
        }
    }
    out
}

/// Toffoli gates with `r ≥ 2` controls, ordered by target then control set.
fn toffolis(n: usize, r: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for t in (1..=n).rev() {
        let others: Vec<usize> = (1..=n).filter(|&w| w != t).collect();
        for cs in k_subsets(&others, r) {
            out.push(Gate::toffoli(&cs, t, n).expect("valid"));
        }
    }
    out
}

fn fredkins(n: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for c in 1..=n {
        let others: Vec<usize> = (1..=n).filter(|&w| w != c).collect();
        for pair in k_subsets(&others, 2) {
            out.push(Gate::fredkin(c, pair[0], pair[1], n).expect("valid"));
        }
    }
    out
}

fn peres_gates(n: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for c in 1..=n {
        for a in 1..=n {
            for b in 1..=n {
                if a != c && b != c && a != b {
                    out.push(Gate::peres(c, a, b, n).expect("valid"));
                }
            }
        }
    }
    out
}

/// Builds a named library at width `n`.
///
/// `G` and `GT` may also be written with their width (`G3`, `GT4`). Libraries
/// containing F or P gates exist only at width 3.
pub fn standard_library(name: &str, n: usize) -> Result<GateLibrary, GateError> {
    let unsupported = || GateError::UnsupportedWidth {
        name: name.to_string(),
        n,
    };
    let base = canonical_library_name(name, n)?;
    if n == 0 || n > MAX_ARITY {
        return Err(unsupported());
    }
    match base {
        "G" => {
            if !(2..=MAX_G_LIBRARY_WIDTH).contains(&n) {
                return Err(unsupported());
            }
            let gates = chain_orders(n)
                .iter()
                .map(|c| Gate::g(c, n).expect("valid"))
                .collect();
            GateLibrary::new(format!("G{n}"), gates)
        }
        "GT" => {
            if n > MAX_GT_LIBRARY_WIDTH {
                return Err(unsupported());
            }
            let mut gates = nots(n);
            gates.extend(cnots(n));
            for r in 2..n {
                gates.extend(toffolis(n, r));
            }
            GateLibrary::new(format!("GT{n}"), gates)
        }
        _ => {
            let mut gates = Vec::new();
            for c in base.chars() {
                let (min_n, exact3) = match c {
                    'N' => (1, false),
                    'C' => (2, false),
                    'T' => (3, false),
                    'F' | 'P' => (3, true),
                    _ => unreachable!("validated name"),
                };
                if n < min_n || (exact3 && n != 3) {
                    return Err(unsupported());
                }
                gates.extend(match c {
                    'N' => nots(n),
                    'C' => cnots(n),
                    'T' => toffolis(n, 2),
                    'F' => fredkins(n),
                    _ => peres_gates(n),
                });
            }
            GateLibrary::new(base, gates)
        }
    }
}

fn canonical_library_name(name: &str, n: usize) -> Result<&'static str, GateError> {
    if let Some(found) = LIBRARY_NAMES.iter().find(|&&l| l == name) {
        return Ok(found);
    }
    for prefix in ["GT", "G"] {
        if let Some(width) = name
            .strip_prefix(prefix)
            .and_then(|w| usize::from_str(w).ok())
        {
            if width == n {
                return Ok(prefix);
            }
            return Err(GateError::UnsupportedWidth {
                name: name.to_string(),
                n,
            });
        }
    }
    Err(GateError::UnknownLibrary(name.to_string()))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of gates in the generalized-Toffoli library on `n` wires, summed
/// over control counts `r = 0..n-1` (one gate per target and control set).
pub fn gt_library_size(n: usize) -> u64 {
    let n = n as u64;
    n * (0..n).map(|r| binomial(n - 1, r)).sum::<u64>()
}
