use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported ground set; sets are stored in a single `u64` word.
pub const MAX_GROUND: u32 = 62;

/// Validated parameter tuple for the regime `2s < n < 3s`.
///
/// The four fields are tied by `n = 2s + c = 3s - l` and `c + l = s`,
/// with `1 <= c <= s - 1` (equivalently `1 <= l <= s - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub s: u32,
    pub c: u32,
    pub l: u32,
    pub n: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("s must be at least 2, got {0}")]
    SmallS(u32),
    #[error("c must satisfy 1 <= c <= s-1, got c={c} for s={s}")]
    BadC { s: u32, c: u32 },
    #[error("ground set size {0} exceeds {MAX_GROUND}")]
    TooWide(u32),
}

impl Params {
    /// Builds `(s, c, l = s - c, n = 2s + c)`, checking the regime bounds.
    pub fn new(s: u32, c: u32) -> Result<Self, ParamError> {
        if s < 2 {
            return Err(ParamError::SmallS(s));
        }
        if c < 1 || c > s - 1 {
            return Err(ParamError::BadC { s, c });
        }
        let n = 2 * s + c;
        if n > MAX_GROUND {
            return Err(ParamError::TooWide(n));
        }
        Ok(Params { s, c, l: s - c, n })
    }

    /// All valid `(s, c)` cells with `n <= n_max`, in `(s, c)` lexicographic order.
    pub fn grid(n_max: u32) -> Vec<Params> {
        let mut out = Vec::new();
        for s in 2.. {
            if 2 * s + 1 > n_max {
                break;
            }
            for c in 1..s {
                if let Ok(p) = Params::new(s, c) {
                    if p.n <= n_max {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_arithmetic() {
        let p = Params::new(3, 1).unwrap();
        assert_eq!((p.s, p.c, p.l, p.n), (3, 1, 2, 7));
        let p = Params::new(5, 1).unwrap();
        assert_eq!((p.s, p.c, p.l, p.n), (5, 1, 4, 11));
    }

    #[test]
    fn params_rejects_out_of_regime() {
        assert!(matches!(Params::new(3, 3), Err(ParamError::BadC { .. })));
        assert!(matches!(Params::new(3, 0), Err(ParamError::BadC { .. })));
        assert!(matches!(Params::new(1, 1), Err(ParamError::SmallS(1))));
        assert!(matches!(Params::new(30, 10), Err(ParamError::TooWide(70))));
    }

    #[test]
    fn grid_is_lexicographic_and_in_range() {
        let g = Params::grid(24);
        assert!(g.windows(2).all(|w| (w[0].s, w[0].c) < (w[1].s, w[1].c)));
        assert!(g.iter().all(|p| p.n <= 24 && p.c + p.l == p.s));
        // row count for the regime map: sum over s of (s-1), clipped by n <= 24
        let expect: usize = (2..=11)
            .map(|s| (1..s).filter(|c| 2 * s + c <= 24).count())
            .sum();
        assert_eq!(g.len(), expect);
    }
}
