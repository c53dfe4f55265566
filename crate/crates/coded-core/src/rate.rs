//! Per-level server delivery rate as a function of the memory given to the
//! level.
//!
//! For a level with `n = N_i / d_i` (per-cache memory that caches the level
//! entirely under the color scheme) and `ku = K * U_i` requesting users, the
//! rate interpolates between `ku` full-file transmissions at zero memory and
//! zero at full memory. In between, decentralized placement with memory `x`
//! per cache serves the level at roughly `n / x` transmissions per round;
//! memory-sharing straightens the ends of that curve into its lower convex
//! envelope, which is what a scheme mixing two placements actually achieves.
//!
//! The resulting piecewise form (for `ku > 4`):
//!
//! * `[0, 2n/ku]`         — chord from `(0, ku)` tangent to `n/x`
//! * `[2n/ku, n/2]`       — the curve `n/x`
//! * `[n/2, n]`           — chord from the curve down to `(n, 0)`
//!
//! and a single chord from `(0, ku)` to `(n, 0)` when `ku <= 4` (the two
//! tangency points cross). This function is convex and strictly decreasing
//! on `[0, n]`, which makes the memory partition below exactly optimal.

use num_rational::BigRational;
use num_traits::Zero;

use crate::numeric::int;

/// Memory point (in files per cache) where the level is fully cached.
pub fn full_point(n: &BigRational) -> BigRational {
    n.clone()
}

/// Delivery rate of one level given `x` files of per-cache memory.
pub fn level_rate(n: &BigRational, total_users: u32, x: &BigRational) -> BigRational {
    let ku = int(total_users as i64);
    if total_users == 0 || x >= n {
        return BigRational::zero();
    }
    if x.is_zero() {
        return ku;
    }
    if total_users <= 4 {
        // single chord: ku * (1 - x/n)
        return &ku - &ku * x / n;
    }
    let lo = int(2) * n / &ku; // tangency of the cap chord
    let hi = n / int(2); // tangency of the terminal chord
    if *x <= lo {
        // ku - (ku^2 / 4n) * x
        &ku - (&ku * &ku * x) / (int(4) * n)
    } else if *x < hi {
        n / x
    } else {
        // 4 * (1 - x/n)
        int(4) - int(4) * x / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ratio_u32, to_f64};

    #[test]
    fn endpoints() {
        let n = int(10);
        assert_eq!(level_rate(&n, 8, &BigRational::zero()), int(8));
        assert_eq!(level_rate(&n, 8, &int(10)), int(0));
        assert_eq!(level_rate(&n, 8, &int(20)), int(0));
        assert_eq!(level_rate(&n, 0, &int(1)), int(0));
    }

    #[test]
    fn piece_continuity() {
        let n = int(10);
        // cap chord meets the curve at x = 2n/ku = 2.5 with value ku/2 = 4
        assert_eq!(level_rate(&n, 8, &ratio_u32(5, 2)), int(4));
        // curve meets the terminal chord at x = n/2 = 5 with value 2
        assert_eq!(level_rate(&n, 8, &int(5)), int(2));
        // interior point follows n/x
        assert_eq!(level_rate(&n, 8, &int(4)), ratio_u32(10, 4));
    }

    #[test]
    fn degenerate_single_chord() {
        let n = int(70);
        // ku = 4: rate(x) = 4 (1 - x/70)
        assert_eq!(level_rate(&n, 4, &int(20)), ratio_u32(200, 70));
        assert_eq!(level_rate(&n, 4, &int(35)), int(2));
    }

    #[test]
    fn monotone_decreasing() {
        let n = int(10);
        let mut prev = f64::INFINITY;
        for step in 0..=100 {
            let x = ratio_u32(step, 10);
            let r = to_f64(&level_rate(&n, 8, &x));
            assert!(r <= prev + 1e-12);
            prev = r;
        }
    }
}
