//! Monte Carlo simulation of the randomized matching procedures that drive
//! the `y(3)` lower bounds.
//!
//! Both procedures build a random `s`-matching out of three blocks on the
//! ground set `[n]`, `n = 2l + 3c`:
//!
//! 1. a fixed matching of consecutive 3-sets filling `[2l+d, n-2d+2]`
//!    (any fixed choice induces the same probe distribution — the
//!    procedure never inspects these sets, a tested assumption);
//! 2. `l` out of the `l+k` pairs of a canonical 2-set matching on the
//!    initial segment, chosen at random; the `d-1` uncovered elements
//!    form `Z`;
//! 3. a random perfect assignment matching each element of `Z` with two
//!    of the `2d-2` leftover tail elements `Y`.
//!
//! The estimated quantity is the probability that a fixed probe triple
//! `{x, y1, y2}` (one head element, two tail elements) lands in the
//! matching. All randomness comes from a seedable ChaCha stream, so every
//! estimate is reproducible from `(seed, trials)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::{Rat, RatDoc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McError {
    #[error("offset d={d} must be {expected} here")]
    Parity { d: u32, expected: &'static str },
    #[error("offset d={d} exceeds c+1={max}")]
    TooLarge { d: u32, max: u32 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// Reproducible estimate of a probe probability.
#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub trials: u64,
    pub hits: u64,
    pub estimate: RatDoc,
    pub target: RatDoc,
    pub z_score: f64,
}

impl McEstimate {
    fn from_counts(trials: u64, hits: u64, target: Rat) -> McEstimate {
        let estimate = Rat::new(hits as i64, trials as i64);
        let p = *target.numer() as f64 / *target.denom() as f64;
        let e = hits as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let z_score = if sigma == 0.0 {
            if e == p {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (e - p) / sigma
        };
        McEstimate {
            trials,
            hits,
            estimate: estimate.into(),
            target: target.into(),
            z_score,
        }
    }
}

fn check_common(l: u32, c: u32, d: u32, trials: u64) -> Result<(), McError> {
    if l < 1 {
        return Err(McError::BadParameter("l must be at least 1".into()));
    }
    if c < 1 {
        return Err(McError::BadParameter("c must be at least 1".into()));
    }
    if trials < 1 {
        return Err(McError::BadParameter("trials must be at least 1".into()));
    }
    if d > c + 1 {
        return Err(McError::TooLarge { d, max: c + 1 });
    }
    Ok(())
}

/// Tail elements left uncovered by the fixed 3-set matching:
/// `[n-2d+3, n]`, of size `2d-2`.
fn tail_elements(l: u32, c: u32, d: u32) -> Vec<u32> {
    let n = 2 * l + 3 * c;
    (n - 2 * d + 3..=n).collect()
}

struct ThirdStage {
    y: Vec<u32>,
}

impl ThirdStage {
    /// Pairs the sorted `z` list with consecutive pairs of a fresh shuffle
    /// of `Y`; returns the pair matched to `probe_x` if `probe_x ∈ z`.
    fn assign(&mut self, rng: &mut ChaCha8Rng, z: &[u32], probe_x: u32) -> Option<(u32, u32)> {
        let pos = z.iter().position(|&e| e == probe_x)?;
        self.y.shuffle(rng);
        let (a, b) = (self.y[2 * pos], self.y[2 * pos + 1]);
        Some((a.min(b), a.max(b)))
    }
}

/// Simulates the odd-offset procedure and estimates
/// `Pr[{x, y1, y2} ∈ π] = (k/(l+k)) / C(2d-2, 2)`, `k = (d-1)/2`, for the
/// probe `x = 1`, `{y1, y2}` the two smallest tail elements.
///
/// At `d = 1` the third stage is empty and the probability is 0.
pub fn mc_odd(l: u32, c: u32, d: u32, trials: u64, seed: u64) -> Result<McEstimate, McError> {
    if d % 2 != 1 {
        return Err(McError::Parity { d, expected: "odd" });
    }
    check_common(l, c, d, trials)?;
    let k = (d - 1) / 2;
    let target = if d == 1 {
        Rat::from_integer(0)
    } else {
        Rat::new(k as i64, (l + k) as i64)
            / Rat::from_integer((crate::binom64(2 * d as u64 - 2, 2)) as i64)
    };
    let y = tail_elements(l, c, d);
    let probe_pair = if y.len() >= 2 {
        Some((y[0], y[1]))
    } else {
        None
    };
    let probe_x = 1u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut third = ThirdStage { y: y.clone() };
    let mut hits = 0u64;
    for _ in 0..trials {
        let z = odd_uncovered(&mut rng, l, k);
        if let (Some(pair), Some(assigned)) = (probe_pair, third.assign(&mut rng, &z, probe_x)) {
            if assigned == pair {
                hits += 1;
            }
        }
    }
    Ok(McEstimate::from_counts(trials, hits, target))
}

/// Membership estimate `Pr[x ∈ Z] = k/(l+k)` for any head element `x`
/// covered by the canonical pair matching, regardless of which pair holds it.
pub fn mc_odd_membership(
    l: u32,
    c: u32,
    d: u32,
    x: u32,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, McError> {
    if d % 2 != 1 {
        return Err(McError::Parity { d, expected: "odd" });
    }
    check_common(l, c, d, trials)?;
    let k = (d - 1) / 2;
    if x < 1 || x > 2 * l + d - 1 {
        return Err(McError::BadParameter(format!(
            "x={x} outside [1, {}]",
            2 * l + d - 1
        )));
    }
    let target = Rat::new(k as i64, (l + k) as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        if odd_uncovered(&mut rng, l, k).contains(&x) {
            hits += 1;
        }
    }
    Ok(McEstimate::from_counts(trials, hits, target))
}

/// Elements of `[2l+d-1]` left uncovered when `l` of the `l+k` canonical
/// pairs `{i, 2l+2k+1-i}` are kept; sorted.
fn odd_uncovered(rng: &mut ChaCha8Rng, l: u32, k: u32) -> Vec<u32> {
    let dropped = rand::seq::index::sample(rng, (l + k) as usize, k as usize);
    let mut z = Vec::with_capacity(2 * k as usize);
    for idx in dropped.iter() {
        let i = idx as u32 + 1;
        z.push(i);
        z.push(2 * l + 2 * k + 1 - i);
    }
    z.sort_unstable();
    z
}

/// Simulates the even-offset procedure with a deletable-vertex set `X` of
/// the given size and estimates
/// `Pr[{x, y1, y2} ∈ π] = ((k|X|+l) / ((l+k)|X|)) / C(2d-2, 2)`,
/// `k = (d-2)/2`, for the probe `x = min(X)`.
///
/// `X = [2, xsize+1]` (the guaranteed deletable range starts at 2); the
/// full-width case `xsize = 2l+d-1` uses `X = [1, 2l+d-1]`.
pub fn mc_even(
    l: u32,
    c: u32,
    d: u32,
    xsize: u32,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, McError> {
    let setup = EvenSetup::new(l, c, d, xsize)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = tail_elements(l, c, d);
    let probe_pair = (y[0], y[1]);
    let mut third = ThirdStage { y: y.clone() };
    let mut hits = 0u64;
    for _ in 0..trials {
        let (_, z) = setup.sample_uncovered(&mut rng);
        if let Some(assigned) = third.assign(&mut rng, &z, setup.probe_x) {
            if assigned == probe_pair {
                hits += 1;
            }
        }
    }
    Ok(McEstimate::from_counts(trials, hits, setup.target_triple))
}

/// Frequency of each `X` element being drawn as the deleted vertex `z`;
/// index `i` counts draws of `X[i]`. Checks sampler uniformity on the
/// exact code path `mc_even` runs.
pub fn mc_even_z_histogram(
    l: u32,
    c: u32,
    d: u32,
    xsize: u32,
    trials: u64,
    seed: u64,
) -> Result<Vec<u64>, McError> {
    let setup = EvenSetup::new(l, c, d, xsize)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; setup.x.len()];
    for _ in 0..trials {
        let (zi, _) = setup.sample_uncovered(&mut rng);
        counts[zi] += 1;
    }
    Ok(counts)
}

struct EvenSetup {
    l: u32,
    k: u32,
    head_top: u32,
    x: Vec<u32>,
    probe_x: u32,
    target_triple: Rat,
}

impl EvenSetup {
    fn new(l: u32, c: u32, d: u32, xsize: u32) -> Result<EvenSetup, McError> {
        if d % 2 != 0 {
            return Err(McError::Parity {
                d,
                expected: "even",
            });
        }
        if d < 2 {
            return Err(McError::BadParameter("even offsets start at 2".into()));
        }
        check_common(l, c, d, 1)?;
        let head_top = 2 * l + d - 1;
        if xsize < 1 || xsize > head_top {
            return Err(McError::BadParameter(format!(
                "xsize={xsize} outside [1, {head_top}]"
            )));
        }
        let x: Vec<u32> = if xsize == head_top {
            (1..=head_top).collect()
        } else {
            (2..=xsize + 1).collect()
        };
        let probe_x = x[0];
        let k = (d - 2) / 2;
        let member = Rat::new(
            (k as i64) * (xsize as i64) + l as i64,
            (l + k) as i64 * xsize as i64,
        );
        let target_triple = member / Rat::from_integer(crate::binom64(2 * d as u64 - 2, 2) as i64);
        Ok(EvenSetup {
            l,
            k,
            head_top,
            x,
            probe_x,
            target_triple,
        })
    }

    /// Canonical `(l+k)`-pair matching on `[2l+d-1] \ {z}`: consecutive
    /// pairs of the remaining elements in increasing order. Only the pair
    /// structure matters for the probe distribution.
    fn pairs_for(&self, z: u32) -> Vec<(u32, u32)> {
        let elems: Vec<u32> = (1..=self.head_top).filter(|&e| e != z).collect();
        elems.chunks_exact(2).map(|ch| (ch[0], ch[1])).collect()
    }

    /// Returns the index of the drawn `z` in `X` and the sorted uncovered set.
    fn sample_uncovered(&self, rng: &mut ChaCha8Rng) -> (usize, Vec<u32>) {
        let zi = rng.gen_range(0..self.x.len());
        let z = self.x[zi];
        let pairs = self.pairs_for(z);
        let dropped = rand::seq::index::sample(rng, (self.l + self.k) as usize, self.k as usize);
        let mut out = vec![z];
        for idx in dropped.iter() {
            let (a, b) = pairs[idx];
            out.push(a);
            out.push(b);
        }
        out.sort_unstable();
        (zi, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_target_anchor() {
        let est = mc_odd(2, 2, 3, 200_000, 0x5EED).unwrap();
        assert_eq!(Rat::new(est.target.num, est.target.den), Rat::new(1, 18));
        assert!(est.z_score.abs() <= 4.0, "z = {}", est.z_score);
    }

    #[test]
    fn odd_membership_is_pair_independent() {
        // every head element sits in Z with probability k/(l+k)
        for x in [1u32, 2, 4, 6] {
            let est = mc_odd_membership(2, 2, 3, x, 100_000, 7).unwrap();
            assert_eq!(Rat::new(est.target.num, est.target.den), Rat::new(1, 3));
            assert!(est.z_score.abs() <= 4.0, "x={x}, z={}", est.z_score);
        }
    }

    #[test]
    fn odd_degenerate_d1_has_zero_probability() {
        let est = mc_odd(3, 2, 1, 1000, 1).unwrap();
        assert_eq!(est.hits, 0);
        assert_eq!(est.target, RatDoc { num: 0, den: 1 });
        assert_eq!(est.z_score, 0.0);
    }

    #[test]
    fn even_target_anchor() {
        let est = mc_even(2, 3, 4, 6, 200_000, 0x5EED).unwrap();
        assert_eq!(Rat::new(est.target.num, est.target.den), Rat::new(4, 135));
        assert!(est.z_score.abs() <= 4.0, "z = {}", est.z_score);
    }

    #[test]
    fn even_full_width_and_d2_specializations() {
        // |X| = 2l+d-1, d = 2 (k = 0): member target collapses to 1/(2l+1)
        let (l, d) = (2u32, 2u32);
        let est = mc_even(l, 3, d, 2 * l + d - 1, 50_000, 3).unwrap();
        let member = Rat::new(1, (2 * l + 1) as i64);
        let expect = member / Rat::from_integer(crate::binom64(2, 2) as i64);
        assert_eq!(Rat::new(est.target.num, est.target.den), expect);
        assert!(est.z_score.abs() <= 4.0);
    }

    #[test]
    fn even_z_choice_is_uniform() {
        let (l, c, d, xsize) = (2u32, 3u32, 4u32, 6u32);
        let trials = 60_000u64;
        let counts = mc_even_z_histogram(l, c, d, xsize, trials, 11).unwrap();
        assert_eq!(counts.len(), xsize as usize);
        let p = 1.0 / xsize as f64;
        let sigma = (p * (1.0 - p) * trials as f64).sqrt();
        for &count in &counts {
            let z = (count as f64 - trials as f64 * p) / sigma;
            assert!(z.abs() <= 4.0, "count {count} of {trials}");
        }
    }

    #[test]
    fn estimates_are_reproducible_by_seed() {
        let a = mc_odd(2, 2, 3, 10_000, 42).unwrap();
        let b = mc_odd(2, 2, 3, 10_000, 42).unwrap();
        assert_eq!(a.hits, b.hits);
        let c1 = mc_even(2, 3, 4, 6, 10_000, 42).unwrap();
        let c2 = mc_even(2, 3, 4, 6, 10_000, 42).unwrap();
        assert_eq!(c1.hits, c2.hits);
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            mc_odd(2, 2, 2, 10, 0),
            Err(McError::Parity { .. })
        ));
        assert!(matches!(
            mc_odd(2, 2, 5, 10, 0),
            Err(McError::TooLarge { .. })
        ));
        assert!(matches!(
            mc_even(2, 2, 3, 4, 10, 0),
            Err(McError::Parity { .. })
        ));
        assert!(matches!(
            mc_even(2, 3, 4, 8, 10, 0),
            Err(McError::BadParameter(_))
        ));
    }
}
