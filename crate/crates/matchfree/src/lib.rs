//! Set families over a small ground set with bounded matching number.
//!
//! The crate provides:
//!
//! * bitmask set/family types with exact matching-number computation,
//!   shifting (compression) and up-set machinery ([`family`], [`shift`],
//!   [`packing`]);
//! * generators for the extremal candidate families `P`, `P'`, `Q`, `W`
//!   on a ground set of size `n = 2s + c`, together with exact-rational
//!   fractional covers certifying that none of them contains an
//!   `s`-matching ([`constructions`]);
//! * closed-form evaluators for every complement-size and layer-deficit
//!   formula, regime classification and threshold checks ([`formulas`]);
//! * the half-integral 2-layer invariant `d(F)`, the menu of `y(2)`/`y(3)`
//!   lower bounds, family audits and exhaustive claim checks ([`dinv`]),
//!   plus Monte Carlo simulation of the randomized matching procedures
//!   behind those bounds ([`mc`]);
//! * exact desk-scale optima `e(n,s)`, the 3-truncated variant and the
//!   `k`-uniform `e_k(n,s)` via minimum-blocker search ([`oracle`]).

pub mod constructions;
pub mod dinv;
pub mod family;
pub mod formulas;
pub mod mc;
pub mod oracle;
pub mod packing;
pub mod params;
pub mod sample;
pub mod shift;

pub use family::{Family, FamilyError, MatchingWitness, SetMask};
pub use params::{ParamError, Params};

/// Exact rational used throughout for certificate weights and bound values.
pub type Rat = num_rational::Rational64;

/// Serializable exact rational: `{"num": .., "den": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RatDoc {
    pub num: i64,
    pub den: i64,
}

impl From<Rat> for RatDoc {
    fn from(r: Rat) -> RatDoc {
        RatDoc {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

/// Binomial coefficient with exact `u128` arithmetic; 0 when `k > n`.
pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

/// Binomial coefficient as `u64`; panics on overflow (all callers stay far below).
pub fn binom64(n: u64, k: u64) -> u64 {
    u64::try_from(binom(n, k)).expect("binomial overflows u64")
}
