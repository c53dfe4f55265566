//! The M-feasible memory partition across popularity levels and the expected
//! delivery rate it induces.
//!
//! Levels are classified as uncached (no memory), partially cached, or fully
//! cached. As the per-cache memory M grows, each level is promoted in that
//! order; the promotion points come from the marginal value of memory under
//! the per-level rate model in [`crate::rate`]: a level starts receiving
//! memory once the common marginal drops to its cap-chord slope and is fully
//! cached once the marginal falls to its terminal-chord slope.
//!
//! All breakpoint comparisons are done on squared thresholds, which are exact
//! rationals. Inside an interval the partial levels share the remaining
//! memory proportionally to sqrt(N_i / d_i); across a promotion the promoted
//! level alone absorbs memory along its chord. The resulting allocation is
//! the exact minimizer of the summed per-level rates for every M, which the
//! grid oracle in the test suite checks independently.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::CoreError;
use crate::level::LevelSet;
use crate::numeric::{int, sqrt_approx, to_f64};
use crate::rate::level_rate;

/// Memory class of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelClass {
    /// No cache memory; every request is served directly by the server ("H").
    Uncached,
    /// A positive share of memory, less than the level needs in full ("I").
    Partial,
    /// The level is cached entirely; the server never transmits for it ("J").
    Full,
}

/// Memory fractions per level for a given cache memory M.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryPartition {
    memory: BigRational,
    classes: Vec<LevelClass>,
    alpha: Vec<BigRational>,
    surplus: BigRational,
}

impl MemoryPartition {
    pub fn memory(&self) -> &BigRational {
        &self.memory
    }

    pub fn classes(&self) -> &[LevelClass] {
        &self.classes
    }

    pub fn class(&self, level: usize) -> LevelClass {
        self.classes[level]
    }

    /// Memory fraction of a level; `alpha * M` is its per-cache memory in files.
    pub fn alpha(&self, level: usize) -> &BigRational {
        &self.alpha[level]
    }

    pub fn alphas(&self) -> &[BigRational] {
        &self.alpha
    }

    /// Per-cache memory assigned to a level, `alpha_i * M`, in file units.
    pub fn memory_of(&self, level: usize) -> BigRational {
        &self.alpha[level] * &self.memory
    }

    /// Memory left over once every level is fully cached (zero otherwise).
    pub fn surplus(&self) -> &BigRational {
        &self.surplus
    }

    pub fn alpha_sum(&self) -> BigRational {
        self.alpha.iter().sum()
    }
}

struct Breakpoint {
    /// Squared promotion threshold; exact rational.
    mu_sq: BigRational,
    level: usize,
    to_full: bool,
    /// Memory the promoted level absorbs while the marginal sits at this
    /// breakpoint (its chord width).
    width: BigRational,
}

/// Compute the M-feasible partition for per-cache memory `memory` (in files).
pub fn m_feasible_partition(
    levels: &LevelSet,
    memory: &BigRational,
) -> Result<MemoryPartition, CoreError> {
    if memory.is_negative() {
        return Err(CoreError::NegativeMemory(format!("{}", to_f64(memory))));
    }
    let count = levels.len();
    let zero = BigRational::zero();

    if memory.is_zero() {
        return Ok(MemoryPartition {
            memory: zero.clone(),
            classes: vec![LevelClass::Uncached; count],
            alpha: vec![zero.clone(); count],
            surplus: zero,
        });
    }

    // Promotion breakpoints, compared by squared threshold.
    let mut events: Vec<Breakpoint> = Vec::new();
    for i in 0..count {
        let ku = levels.total_users(i);
        if ku == 0 {
            continue; // nobody requests this level; it never earns memory
        }
        let n = levels.full_memory(i);
        let ku_r = int(ku as i64);
        if ku <= 4 {
            // single chord from (0, ku) to (n, 0): one breakpoint, full width
            let mu_sq = &n / &ku_r;
            events.push(Breakpoint {
                mu_sq: mu_sq.clone(),
                level: i,
                to_full: false,
                width: n.clone(),
            });
            events.push(Breakpoint {
                mu_sq,
                level: i,
                to_full: true,
                width: zero.clone(),
            });
        } else {
            events.push(Breakpoint {
                mu_sq: int(4) * &n / (&ku_r * &ku_r),
                level: i,
                to_full: false,
                width: int(2) * &n / &ku_r,
            });
            events.push(Breakpoint {
                mu_sq: &n / int(4),
                level: i,
                to_full: true,
                width: &n / int(2),
            });
        }
    }
    events.sort_by(|a, b| {
        a.mu_sq
            .cmp(&b.mu_sq)
            .then(a.to_full.cmp(&b.to_full))
            .then(a.level.cmp(&b.level))
    });

    let mut classes = vec![LevelClass::Uncached; count];
    let mut alpha = vec![zero.clone(); count];
    let mut full_total = zero.clone(); // sum of n_j over fully cached levels
    let mut partial: Vec<(usize, BigRational)> = Vec::new(); // (level, sqrt(n_i))
    let mut sqrt_cache: Vec<Option<BigRational>> = vec![None; count];
    let mut sqrt_of = |lvl: usize, levels: &LevelSet| -> BigRational {
        sqrt_cache[lvl]
            .get_or_insert_with(|| sqrt_approx(&levels.full_memory(lvl)))
            .clone()
    };

    let finish_interior = |classes: Vec<LevelClass>,
                           mut alpha: Vec<BigRational>,
                           partial: &[(usize, BigRational)],
                           full_total: &BigRational,
                           levels: &LevelSet,
                           memory: &BigRational|
     -> MemoryPartition {
        // Fully cached levels take exactly n_j; partial levels share the rest
        // proportionally to sqrt(n_i).
        let pool = memory - full_total;
        let scale: BigRational = partial.iter().map(|(_, s)| s.clone()).sum();
        for (lvl, s) in partial {
            alpha[*lvl] = s * &pool / (&scale * memory);
        }
        for (lvl, a) in alpha.iter_mut().enumerate() {
            if classes[lvl] == LevelClass::Full {
                *a = levels.full_memory(lvl) / memory;
            }
        }
        MemoryPartition {
            memory: memory.clone(),
            classes,
            alpha,
            surplus: BigRational::zero(),
        }
    };

    for ev in &events {
        let mu = sqrt_approx(&ev.mu_sq);
        // Memory consumed just before this promotion takes effect.
        let interior: BigRational = partial
            .iter()
            .filter(|(l, _)| !(ev.to_full && *l == ev.level))
            .map(|(_, s)| s * &mu)
            .sum();
        let promoted_before = if ev.to_full {
            // the promoted level sits at the start of its terminal chord
            partial
                .iter()
                .find(|(l, _)| *l == ev.level)
                .map(|(_, s)| s * &mu)
                .unwrap_or_else(|| zero.clone())
        } else {
            zero.clone()
        };
        let m_left = &full_total + &interior + &promoted_before;
        if *memory < m_left {
            // M falls in the open interval before this breakpoint.
            return Ok(finish_interior(
                classes, alpha, &partial, &full_total, levels, memory,
            ));
        }
        // For to_full events the chord runs from the level's interior point
        // up to n_level; for to_partial events it runs from zero up to width.
        let m_right = if ev.to_full {
            &full_total + &interior + levels.full_memory(ev.level)
        } else {
            &m_left + &ev.width
        };
        if *memory < m_right {
            // M falls inside this promotion's chord: the promoted level alone
            // absorbs the slack, everything else stays at the breakpoint.
            if !ev.to_full {
                classes[ev.level] = LevelClass::Partial;
                partial.push((ev.level, sqrt_of(ev.level, levels)));
            }
            let mut others = zero.clone();
            for (lvl, s) in &partial {
                if *lvl != ev.level {
                    let x = s * &mu;
                    alpha[*lvl] = &x / memory;
                    others += x;
                }
            }
            let promoted = memory - &full_total - &others;
            if promoted.is_zero() {
                classes[ev.level] = LevelClass::Uncached;
                partial.retain(|(l, _)| *l != ev.level);
            }
            alpha[ev.level] = &promoted / memory;
            for (lvl, a) in alpha.iter_mut().enumerate() {
                if classes[lvl] == LevelClass::Full {
                    *a = levels.full_memory(lvl) / memory;
                }
            }
            return Ok(MemoryPartition {
                memory: memory.clone(),
                classes,
                alpha,
                surplus: zero,
            });
        }
        // Apply the promotion and continue.
        if ev.to_full {
            partial.retain(|(l, _)| *l != ev.level);
            classes[ev.level] = LevelClass::Full;
            full_total += levels.full_memory(ev.level);
        } else {
            classes[ev.level] = LevelClass::Partial;
            partial.push((ev.level, sqrt_of(ev.level, levels)));
        }
    }

    // Every requested level is fully cached; report any leftover memory.
    for (lvl, a) in alpha.iter_mut().enumerate() {
        if classes[lvl] == LevelClass::Full {
            *a = levels.full_memory(lvl) / memory;
        }
    }
    let used: BigRational = (0..count)
        .filter(|l| classes[*l] == LevelClass::Full)
        .map(|l| levels.full_memory(l))
        .sum();
    Ok(MemoryPartition {
        memory: memory.clone(),
        classes,
        alpha,
        surplus: memory - used,
    })
}

/// Expected server delivery rate (files per delivery round) for a partition.
///
/// The rate is the sum of per-level contributions: K*U_h for uncached levels,
/// the envelope rate at alpha_i*M for partial ones, and zero for fully cached
/// ones. On the generic intervals this equals the closed form
/// sum_H K*U_h + (sum_I sqrt(N_i/d_i))^2 / (M - sum_J N_j/d_j).
pub fn expected_rate(
    partition: &MemoryPartition,
    levels: &LevelSet,
) -> Result<BigRational, CoreError> {
    if partition.classes().len() != levels.len() {
        return Err(CoreError::InvalidPartition(format!(
            "partition has {} levels, spec has {}",
            partition.classes().len(),
            levels.len()
        )));
    }
    let memory = partition.memory();
    let mut full_total = BigRational::zero();
    let mut any_partial = false;
    for (i, class) in partition.classes().iter().enumerate() {
        match class {
            LevelClass::Full => {
                let n = levels.full_memory(i);
                if partition.memory_of(i) != n {
                    return Err(CoreError::InvalidPartition(format!(
                        "level {i} marked fully cached but alpha*M != N_i/d_i"
                    )));
                }
                full_total += n;
            }
            LevelClass::Partial => any_partial = true,
            LevelClass::Uncached => {
                if !partition.alpha(i).is_zero() {
                    return Err(CoreError::InvalidPartition(format!(
                        "level {i} marked uncached but alpha != 0"
                    )));
                }
            }
        }
    }
    if any_partial && *memory <= full_total {
        return Err(CoreError::InvalidPartition(
            "no memory left for partially cached levels (M - sum N_j/d_j <= 0)".into(),
        ));
    }
    let mut rate = BigRational::zero();
    for (i, class) in partition.classes().iter().enumerate() {
        match class {
            LevelClass::Uncached => rate += int(levels.total_users(i) as i64),
            LevelClass::Partial => {
                let x = partition.memory_of(i);
                rate += level_rate(&levels.full_memory(i), levels.total_users(i), &x);
            }
            LevelClass::Full => {}
        }
    }
    Ok(rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::LevelSpec;
    use crate::numeric::ratio_u32;
    use num_traits::One;

    fn two_level_set() -> LevelSet {
        LevelSet::new(
            vec![LevelSpec::new(10, 2, 1), LevelSpec::new(140, 1, 2)],
            4,
        )
        .unwrap()
    }

    #[test]
    fn zero_memory_is_all_uncached() {
        let levels = two_level_set();
        let p = m_feasible_partition(&levels, &BigRational::zero()).unwrap();
        assert_eq!(p.classes(), &[LevelClass::Uncached, LevelClass::Uncached]);
        assert!(p.alpha_sum().is_zero());
        let r = expected_rate(&p, &levels).unwrap();
        // K*U_1 + K*U_2 = 8 + 4
        assert_eq!(r, int(12));
    }

    #[test]
    fn single_level_absorbs_everything() {
        let levels = LevelSet::new(vec![LevelSpec::new(10, 1, 1)], 4).unwrap();
        let p = m_feasible_partition(&levels, &int(10)).unwrap();
        assert_eq!(p.classes(), &[LevelClass::Full]);
        assert_eq!(p.alpha(0), &BigRational::one());
        assert_eq!(expected_rate(&p, &levels).unwrap(), int(0));

        // beyond the total need: still fully cached, surplus reported
        let p = m_feasible_partition(&levels, &int(25)).unwrap();
        assert_eq!(p.classes(), &[LevelClass::Full]);
        assert_eq!(p.surplus(), &int(15));
        assert_eq!(p.memory_of(0), int(10));
    }

    #[test]
    fn table_scale_partition() {
        // N/U/d = (10,2,1) and (140,1,2), M = 30: the popular level is worth
        // caching entirely (terminal chord slope 4/10 beats the unpopular
        // level's 4/70); the remainder goes to the unpopular level.
        let levels = two_level_set();
        let p = m_feasible_partition(&levels, &int(30)).unwrap();
        assert_eq!(p.classes(), &[LevelClass::Full, LevelClass::Partial]);
        assert_eq!(p.alpha(0), &ratio_u32(1, 3));
        assert_eq!(p.alpha(1), &ratio_u32(2, 3));
        assert!(p.alpha_sum().is_one());
        // rate = 4 * (1 - 20/70) = 20/7
        assert_eq!(expected_rate(&p, &levels).unwrap(), ratio_u32(20, 7));
    }

    #[test]
    fn alpha_sums_to_one_across_sweep() {
        let levels = two_level_set();
        for step in 1..=120 {
            let m = ratio_u32(step, 2) * ratio_u32(4, 3); // up to 80
            let p = m_feasible_partition(&levels, &m).unwrap();
            let total = p.alpha_sum() * &m + p.surplus().clone();
            assert_eq!(total, m, "memory must be exactly allocated at M={m}");
            if p.surplus().is_zero() {
                assert!(p.alpha_sum().is_one(), "sum alpha != 1 at M={m}");
            }
        }
    }

    #[test]
    fn rate_monotone_in_memory() {
        let levels = two_level_set();
        let mut prev: Option<BigRational> = None;
        for step in 0..=100 {
            let m = ratio_u32(step, 1);
            let p = m_feasible_partition(&levels, &m).unwrap();
            let r = expected_rate(&p, &levels).unwrap();
            if let Some(prev) = prev {
                let slack = BigRational::new(1.into(), num_bigint::BigInt::from(10u64.pow(18)));
                assert!(r <= prev + slack, "rate increased at M={m}");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn full_class_requires_exact_alpha() {
        let levels = two_level_set();
        let mut p = m_feasible_partition(&levels, &int(30)).unwrap();
        p.alpha[0] = ratio_u32(1, 4); // corrupt: no longer N_1/d_1 / M
        assert!(matches!(
            expected_rate(&p, &levels),
            Err(CoreError::InvalidPartition(_))
        ));
    }

    #[test]
    fn unrequested_level_stays_uncached() {
        let levels = LevelSet::new(
            vec![LevelSpec::new(10, 1, 1), LevelSpec::new(20, 0, 1)],
            4,
        )
        .unwrap();
        let p = m_feasible_partition(&levels, &int(50)).unwrap();
        assert_eq!(p.class(0), LevelClass::Full);
        assert_eq!(p.class(1), LevelClass::Uncached);
        assert_eq!(p.surplus(), &int(40));
    }
}
