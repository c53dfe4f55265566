//! Combinatorial and analytic core for decentralized coded caching with
//! multi-level content popularity and multi-access users.
//!
//! Everything in this crate is a pure function of its inputs: cache coloring,
//! the M-feasible memory partition across popularity levels, the expected
//! server delivery rate, randomized chunk placement, and the XOR delivery
//! schedule with its coding gain. There is no networking and no event loop
//! here; the simulator crates build on top of these primitives.

pub mod chunk;
pub mod color;
pub mod delivery;
pub mod error;
pub mod level;
pub mod numeric;
pub mod partition;
pub mod placement;
pub mod rate;

pub use chunk::{ChunkId, ChunkSet, FileId};
pub use color::{assign_colors, ColorAssignment};
pub use delivery::{
    coding_gain, delivery_schedule, uncoded_transmission_count, Demand, DeliverySchedule,
    Transmission,
};
pub use error::CoreError;
pub use level::{LevelSet, LevelSpec};
pub use partition::{expected_rate, m_feasible_partition, LevelClass, MemoryPartition};
pub use placement::{decentralized_placement, CacheContents};
