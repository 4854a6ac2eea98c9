//! Monte Carlo grid: both randomized matching procedures stay within
//! 4 sigma of their exact targets at 10^6 trials across the parameter
//! window, and the membership marginal is pair-independent.

use matchfree::mc::{mc_even, mc_odd, mc_odd_membership};

const TRIALS: u64 = 1_000_000;

#[test]
fn odd_procedure_grid() {
    for l in 1..=4u32 {
        for d in [1u32, 3, 5] {
            for c in 1..=5u32 {
                if d > c + 1 {
                    continue;
                }
                let est = mc_odd(l, c, d, TRIALS, 0x5EED ^ u64::from(l * 31 + d * 7 + c)).unwrap();
                assert!(
                    est.z_score.abs() <= 4.0,
                    "odd (l={l}, c={c}, d={d}): z = {}",
                    est.z_score
                );
            }
        }
    }
}

#[test]
fn even_procedure_grid() {
    for l in 1..=4u32 {
        for d in [2u32, 4, 6] {
            for c in 1..=5u32 {
                if d > c + 1 {
                    continue;
                }
                let xsize = 2 * l + d - 2;
                let est = mc_even(
                    l,
                    c,
                    d,
                    xsize,
                    TRIALS,
                    0x5EED ^ u64::from(l * 17 + d * 3 + c),
                )
                .unwrap();
                assert!(
                    est.z_score.abs() <= 4.0,
                    "even (l={l}, c={c}, d={d}, |X|={xsize}): z = {}",
                    est.z_score
                );
            }
        }
    }
}

#[test]
fn membership_marginal_across_positions() {
    // every head element is left uncovered with the same probability
    let (l, c, d) = (3u32, 4u32, 5u32);
    for x in 1..=2 * l + d - 1 {
        let est = mc_odd_membership(l, c, d, x, 200_000, 0xBEEF ^ u64::from(x)).unwrap();
        assert!(
            est.z_score.abs() <= 4.0,
            "membership at x = {x}: z = {}",
            est.z_score
        );
    }
}
