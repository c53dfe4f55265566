//! Cache coloring and server queue sizing.

use crate::error::CoreError;

/// Colors assigned to caches plus the number of queues each color group gets
/// on the server (one queue per cache unit, `K / d_max` of them per group).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    colors: Vec<u32>,
    queues_per_group: u32,
}

impl ColorAssignment {
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_of(&self, cache: u32) -> u32 {
        self.colors[cache as usize]
    }

    pub fn group_count(&self) -> u32 {
        if self.colors.is_empty() {
            0
        } else {
            *self.colors.iter().max().unwrap() + 1
        }
    }

    /// Queue count per color group, `Num = K / d_max`.
    pub fn queues_per_group(&self) -> u32 {
        self.queues_per_group
    }
}

/// Partition `cache_count` caches into `d_max` color groups.
///
/// Consecutive caches receive colors cyclically (cache k gets color
/// k mod d_max), so a user attached to d consecutive caches touches d
/// distinct colors.
pub fn assign_colors(cache_count: u32, d_max: u32) -> Result<ColorAssignment, CoreError> {
    if d_max == 0 || cache_count == 0 || cache_count % d_max != 0 {
        return Err(CoreError::DegreeNotDividing {
            degree: d_max,
            caches: cache_count,
        });
    }
    Ok(ColorAssignment {
        colors: (0..cache_count).map(|k| k % d_max).collect(),
        queues_per_group: cache_count / d_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_caches_two_colors() {
        let a = assign_colors(4, 2).unwrap();
        assert_eq!(a.colors(), &[0, 1, 0, 1]);
        assert_eq!(a.queues_per_group(), 2);
        assert_eq!(a.group_count(), 2);
    }

    #[test]
    fn single_color() {
        let a = assign_colors(4, 1).unwrap();
        assert_eq!(a.colors(), &[0, 0, 0, 0]);
        assert_eq!(a.queues_per_group(), 4);
    }

    #[test]
    fn six_caches_three_colors() {
        let a = assign_colors(6, 3).unwrap();
        assert_eq!(a.colors(), &[0, 1, 2, 0, 1, 2]);
        assert_eq!(a.queues_per_group(), 2);
    }

    #[test]
    fn rejects_non_divisible() {
        assert_eq!(
            assign_colors(5, 2),
            Err(CoreError::DegreeNotDividing { degree: 2, caches: 5 })
        );
    }
}
