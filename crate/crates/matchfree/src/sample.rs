//! Seeded random family generation for property suites and bound audits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::{materialize, ExtremalKind};
use crate::family::{Family, SetMask};
use crate::params::Params;
use crate::shift::shift_closure;

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A family of random distinct nonempty subsets of `[n]`.
pub fn random_family(n: u32, max_members: usize, rng: &mut ChaCha8Rng) -> Family {
    let count = rng.gen_range(0..=max_members);
    let mut members: Vec<SetMask> = (0..count)
        .map(|_| SetMask(rng.gen_range(1..1u64 << n)))
        .collect();
    members.sort_unstable();
    members.dedup();
    Family::new(n, members).expect("masks stay inside the ground set")
}

/// A random shifted, singleton-free up-set with `nu < s`: a random
/// subfamily of a random generator, closed upward and under shifts.
/// Up-closure of an `∅`-free family preserves the matching number
/// (disjoint supersets contain disjoint distinct members), and shifts
/// never increase it, so the bound survives both closures.
pub fn random_bounded_matching_family(p: &Params, rng: &mut ChaCha8Rng) -> Family {
    let kind = ExtremalKind::ALL[rng.gen_range(0..4)];
    let base = materialize(kind, p).expect("sampling needs a materializable cell");
    let density = rng.gen_range(0.02..0.6);
    let members: Vec<SetMask> = base
        .members()
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(density))
        .collect();
    let sparse = Family::new(p.n, members).expect("subfamily of a valid family");
    shift_closure(&sparse.upset_closure())
}
