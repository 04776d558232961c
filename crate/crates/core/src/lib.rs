//! Reversible circuit synthesis and gate-library analysis.
//!
//! Reversible gates on `n` wires are permutations of the `2^n` states
//! `{1..2^n}`. A library generates a permutation group; the library is
//! universal when that group is the full symmetric group. The crate decides
//! universality, counts universal sub-libraries, and computes exact
//! minimum-circuit-size distributions.
//!
//! [`Permutation`] is generic over the unsigned type that stores its images;
//! the aliases below cover the widths used in practice.

pub mod analysis;
pub mod cli;
pub mod gates;
pub mod groups;
pub mod perm;
pub mod synth;

pub use analysis::{
    minimal_universal_sublibraries, random_pair_check, sublibrary_census, PairVerdict,
    SubLibraryReport,
};
pub use gates::{gt_library_size, standard_library, Gate, GateKind, GateLibrary};
pub use groups::{
    closure_enumerate, group_order, is_universal, library_closure, schreier_sims, StabilizerChain,
};
pub use perm::{BitAssignment, Permutation, Point};
pub use synth::{
    apply_circuit, bfs_census, synthesize, verify, CensusReport, Circuit, Synthesizer,
};

/// Permutations of up to 256 points (circuits of at most 8 wires).
pub type SmallPerm = Permutation<u8>;
/// Permutations of up to 65536 points (circuits of at most 16 wires).
pub type Perm = Permutation<u16>;
/// Stabilizer chain over [`Perm`].
pub type Chain = StabilizerChain<u16>;
