use thiserror::Error;

/// Errors produced by the placement, partition and delivery primitives.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("access degree {degree} does not divide cache count {caches}")]
    DegreeNotDividing { degree: u32, caches: u32 },

    #[error("invalid level set: {0}")]
    InvalidLevels(String),

    #[error("cache memory must be non-negative, got {0}")]
    NegativeMemory(String),

    #[error("level {level}: {count} chunks per file exceed the {slice}-chunk color slice")]
    OverCapacity { level: usize, count: u32, slice: u32 },

    #[error("chunks per file ({chunks}) not divisible by access degree {degree}")]
    ChunksNotDividing { chunks: u32, degree: u32 },

    #[error("at most 64 chunks per file are supported, got {0}")]
    TooManyChunks(u32),

    #[error("unknown file f{0}")]
    UnknownFile(u32),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("coding gain is undefined for an empty schedule")]
    EmptySchedule,

    #[error("uncoded count {uncoded} is below the schedule length {coded}")]
    GainPrecondition { uncoded: u64, coded: u64 },
}
