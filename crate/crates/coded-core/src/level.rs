//! Popularity levels and the catalog layout they induce.

use crate::chunk::FileId;
use crate::error::CoreError;
use num_rational::BigRational;

use crate::numeric::ratio_u32;

/// One popularity level: `file_count` files, `users_per_cache` requesting
/// users attached to every cache, each reading `access_degree` consecutive
/// caches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelSpec {
    pub file_count: u32,
    pub users_per_cache: u32,
    pub access_degree: u32,
}

impl LevelSpec {
    pub fn new(file_count: u32, users_per_cache: u32, access_degree: u32) -> Self {
        Self {
            file_count,
            users_per_cache,
            access_degree,
        }
    }
}

/// A validated ordered set of popularity levels for a given cache count.
///
/// Level 0 is the most popular. The catalog numbers files contiguously in
/// level order, so a file's level is recovered from its id alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    levels: Vec<LevelSpec>,
    starts: Vec<u32>,
    total_files: u32,
    d_max: u32,
    cache_count: u32,
}

impl LevelSet {
    pub fn new(levels: Vec<LevelSpec>, cache_count: u32) -> Result<Self, CoreError> {
        if levels.is_empty() {
            return Err(CoreError::InvalidLevels("no levels given".into()));
        }
        if cache_count == 0 {
            return Err(CoreError::InvalidLevels("cache count is zero".into()));
        }
        for (i, l) in levels.iter().enumerate() {
            if l.file_count == 0 {
                return Err(CoreError::InvalidLevels(format!(
                    "level {i} has an empty file group"
                )));
            }
            if l.access_degree == 0 {
                return Err(CoreError::InvalidLevels(format!(
                    "level {i} has access degree 0"
                )));
            }
            if cache_count % l.access_degree != 0 {
                return Err(CoreError::DegreeNotDividing {
                    degree: l.access_degree,
                    caches: cache_count,
                });
            }
            if i > 0 && levels[i - 1].file_count > l.file_count {
                return Err(CoreError::InvalidLevels(format!(
                    "level {} has more files than level {i}; popular groups must be smaller",
                    i - 1
                )));
            }
        }
        let mut starts = Vec::with_capacity(levels.len());
        let mut total = 0u32;
        for l in &levels {
            starts.push(total);
            total += l.file_count;
        }
        let d_max = levels.iter().map(|l| l.access_degree).max().unwrap();
        Ok(Self {
            levels,
            starts,
            total_files: total,
            d_max,
            cache_count,
        })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn level(&self, idx: usize) -> &LevelSpec {
        &self.levels[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &LevelSpec> {
        self.levels.iter()
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    pub fn cache_count(&self) -> u32 {
        self.cache_count
    }

    pub fn total_files(&self) -> u32 {
        self.total_files
    }

    /// File ids belonging to a level, as a half-open range.
    pub fn file_range(&self, idx: usize) -> std::ops::Range<u32> {
        let start = self.starts[idx];
        start..start + self.levels[idx].file_count
    }

    pub fn level_of_file(&self, file: FileId) -> Result<usize, CoreError> {
        if file.0 >= self.total_files {
            return Err(CoreError::UnknownFile(file.0));
        }
        let idx = match self.starts.binary_search(&file.0) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Ok(idx)
    }

    pub fn degree_of_file(&self, file: FileId) -> Result<u32, CoreError> {
        Ok(self.levels[self.level_of_file(file)?].access_degree)
    }

    /// Per-cache memory needed to hold a level entirely, in file units:
    /// N_i / d_i. With the color scheme, `access_degree` caches jointly
    /// reconstruct every file of the level once each holds its slice.
    pub fn full_memory(&self, idx: usize) -> BigRational {
        let l = &self.levels[idx];
        ratio_u32(l.file_count, l.access_degree)
    }

    /// Requesting users of a level across all caches: K * U_i.
    pub fn total_users(&self, idx: usize) -> u32 {
        self.cache_count * self.levels[idx].users_per_cache
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_layout() {
        let set = LevelSet::new(
            vec![LevelSpec::new(10, 2, 1), LevelSpec::new(140, 1, 2)],
            4,
        )
        .unwrap();
        assert_eq!(set.total_files(), 150);
        assert_eq!(set.d_max(), 2);
        assert_eq!(set.file_range(0), 0..10);
        assert_eq!(set.file_range(1), 10..150);
        assert_eq!(set.level_of_file(FileId(0)).unwrap(), 0);
        assert_eq!(set.level_of_file(FileId(9)).unwrap(), 0);
        assert_eq!(set.level_of_file(FileId(10)).unwrap(), 1);
        assert_eq!(set.level_of_file(FileId(149)).unwrap(), 1);
        assert_eq!(set.level_of_file(FileId(150)), Err(CoreError::UnknownFile(150)));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            LevelSet::new(vec![LevelSpec::new(4, 1, 3)], 4),
            Err(CoreError::DegreeNotDividing { degree: 3, caches: 4 })
        ));
        // popular level may not be larger than an unpopular one
        assert!(LevelSet::new(
            vec![LevelSpec::new(20, 1, 1), LevelSpec::new(10, 1, 2)],
            4
        )
        .is_err());
    }
}
