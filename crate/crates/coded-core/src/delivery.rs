//! Coded delivery scheduling: which XOR transmissions serve a demand set.
//!
//! Demands are queued per (level, span start) exactly like the server's FIFO
//! bank; queues whose span starts share a residue modulo d_max form a color
//! group. Heads of two different queues in a group are paired, and a pair is
//! served with same-index XOR transmissions wherever both sides hold the
//! other's chunk, falling back to uncoded transmissions for the rest. Users
//! in one queue share a cache, so they are never combined.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num_rational::Ratio;

use crate::chunk::{ChunkId, ChunkSet, FileId};
use crate::error::CoreError;
use crate::level::LevelSet;
use crate::placement::CacheContents;

/// One user's demand: a file, requested from `degree` consecutive caches
/// starting at `span_start` (the degree comes from the file's level).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Demand {
    pub user: u32,
    pub file: FileId,
    pub span_start: u32,
}

/// One server transmission: the XOR of `components` (one chunk per listed
/// user), decodable by everyone in `serves`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub components: Vec<(u32, ChunkId)>,
    pub serves: Vec<u32>,
}

impl Transmission {
    pub fn is_coded(&self) -> bool {
        self.components.len() > 1
    }
}

/// Ordered transmission list satisfying a demand set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliverySchedule {
    pub transmissions: Vec<Transmission>,
    pub chunks_per_file: u32,
}

impl DeliverySchedule {
    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }

    pub fn coded_count(&self) -> usize {
        self.transmissions.iter().filter(|t| t.is_coded()).count()
    }
}

#[derive(Debug, Clone)]
struct QueueEntry {
    file: FileId,
    span_start: u32,
    degree: u32,
    users: Vec<u32>,
}

/// Same-index pairing of two queue heads.
///
/// Returns the chunk indices that can be served coded: `x` qualifies when
/// both users still need their own chunk `x` and each holds the other's.
fn pairable(need_a: ChunkSet, side_a_of_b: ChunkSet, need_b: ChunkSet, side_b_of_a: ChunkSet) -> ChunkSet {
    need_a
        .intersect(need_b)
        .intersect(side_a_of_b)
        .intersect(side_b_of_a)
}

/// Build the coded delivery schedule for a demand set against fixed cache
/// contents.
pub fn delivery_schedule(
    demands: &[Demand],
    contents: &CacheContents,
    levels: &LevelSet,
) -> Result<DeliverySchedule, CoreError> {
    let m = contents.chunks_per_file();
    let k = contents.cache_count();
    let d_max = levels.d_max();
    for d in demands {
        levels.level_of_file(d.file)?;
        if d.span_start >= k {
            return Err(CoreError::InvalidLevels(format!(
                "span start {} out of range for {} caches",
                d.span_start, k
            )));
        }
    }

    // Merge users with identical (span, file): they share caches and side
    // information, so one stream of transmissions serves them all.
    let mut merged: BTreeMap<(usize, u32, FileId), QueueEntry> = BTreeMap::new();
    for d in demands {
        let level = levels.level_of_file(d.file).unwrap();
        let degree = levels.level(level).access_degree;
        merged
            .entry((level, d.span_start, d.file))
            .or_insert_with(|| QueueEntry {
                file: d.file,
                span_start: d.span_start,
                degree,
                users: Vec::new(),
            })
            .users
            .push(d.user);
    }

    // Queues per (level, group, span start), FIFO in demand order.
    let mut queues: BTreeMap<(usize, u32, u32), VecDeque<QueueEntry>> = BTreeMap::new();
    for ((level, span, _), entry) in merged {
        queues
            .entry((level, span % d_max, span))
            .or_default()
            .push_back(entry);
    }

    let mut schedule = Vec::new();
    // Process color groups in order; within a group pair queue heads
    // two-at-a-time per wave until all queues drain.
    let group_keys: Vec<(usize, u32)> = {
        let mut gk: Vec<_> = queues.keys().map(|(l, g, _)| (*l, *g)).collect();
        gk.dedup();
        gk
    };
    for (level, group) in group_keys {
        loop {
            let live: Vec<u32> = queues
                .range((level, group, 0)..=(level, group, u32::MAX))
                .filter(|(_, q)| !q.is_empty())
                .map(|((_, _, s), _)| *s)
                .collect();
            if live.is_empty() {
                break;
            }
            let mut i = 0;
            while i < live.len() {
                if i + 1 < live.len() {
                    let a = queues.get_mut(&(level, group, live[i])).unwrap().pop_front().unwrap();
                    let b = queues.get_mut(&(level, group, live[i + 1])).unwrap().pop_front().unwrap();
                    serve_pair(&a, &b, contents, m, &mut schedule);
                    i += 2;
                } else {
                    let a = queues.get_mut(&(level, group, live[i])).unwrap().pop_front().unwrap();
                    serve_single(&a, contents, m, &mut schedule);
                    i += 1;
                }
            }
        }
    }

    Ok(DeliverySchedule {
        transmissions: schedule,
        chunks_per_file: m,
    })
}

fn need_of(entry: &QueueEntry, contents: &CacheContents, m: u32) -> ChunkSet {
    ChunkSet::full(m).difference(contents.span_union(entry.span_start, entry.degree, entry.file))
}

fn serve_single(entry: &QueueEntry, contents: &CacheContents, m: u32, out: &mut Vec<Transmission>) {
    let need = need_of(entry, contents, m);
    for idx in need.iter() {
        out.push(Transmission {
            components: vec![(entry.users[0], ChunkId::new(entry.file, idx))],
            serves: entry.users.clone(),
        });
    }
}

fn serve_pair(
    a: &QueueEntry,
    b: &QueueEntry,
    contents: &CacheContents,
    m: u32,
    out: &mut Vec<Transmission>,
) {
    let need_a = need_of(a, contents, m);
    let need_b = need_of(b, contents, m);
    if a.file == b.file {
        // Same file from cache-disjoint spans: a plain transmission already
        // reaches both, XOR would cancel to zero.
        let both = need_a.intersect(need_b);
        for idx in both.iter() {
            let mut serves = a.users.clone();
            serves.extend_from_slice(&b.users);
            out.push(Transmission {
                components: vec![(a.users[0], ChunkId::new(a.file, idx))],
                serves,
            });
        }
        for idx in need_a.difference(both).iter() {
            out.push(Transmission {
                components: vec![(a.users[0], ChunkId::new(a.file, idx))],
                serves: a.users.clone(),
            });
        }
        for idx in need_b.difference(both).iter() {
            out.push(Transmission {
                components: vec![(b.users[0], ChunkId::new(b.file, idx))],
                serves: b.users.clone(),
            });
        }
        return;
    }
    let side_a_of_b = contents.span_union(a.span_start, a.degree, b.file);
    let side_b_of_a = contents.span_union(b.span_start, b.degree, a.file);
    let coded = pairable(need_a, side_a_of_b, need_b, side_b_of_a);
    for idx in coded.iter() {
        let mut serves = a.users.clone();
        serves.extend_from_slice(&b.users);
        out.push(Transmission {
            components: vec![
                (a.users[0], ChunkId::new(a.file, idx)),
                (b.users[0], ChunkId::new(b.file, idx)),
            ],
            serves,
        });
    }
    for idx in need_a.difference(coded).iter() {
        out.push(Transmission {
            components: vec![(a.users[0], ChunkId::new(a.file, idx))],
            serves: a.users.clone(),
        });
    }
    for idx in need_b.difference(coded).iter() {
        out.push(Transmission {
            components: vec![(b.users[0], ChunkId::new(b.file, idx))],
            serves: b.users.clone(),
        });
    }
}

/// Transmissions an uncoded server needs for the same demand set: every
/// merged (span, file) stream costs a full file.
pub fn uncoded_transmission_count(demands: &[Demand], levels: &LevelSet, m: u32) -> u64 {
    let mut groups: std::collections::BTreeSet<(u32, FileId)> = std::collections::BTreeSet::new();
    for d in demands {
        groups.insert((d.span_start, d.file));
    }
    let _ = levels;
    groups.len() as u64 * m as u64
}

/// Coding gain: uncoded over coded transmission count, as an exact ratio.
pub fn coding_gain(uncoded: u64, schedule: &DeliverySchedule) -> Result<Ratio<u64>, CoreError> {
    let coded = schedule.len() as u64;
    if coded == 0 {
        if uncoded == 0 {
            return Ok(Ratio::new(1, 1));
        }
        return Err(CoreError::EmptySchedule);
    }
    if uncoded < coded {
        return Err(CoreError::GainPrecondition { uncoded, coded });
    }
    Ok(Ratio::new(uncoded, coded))
}

// ---------------------------------------------------------------------------
// Schedule verification (used by tests and by the simulator's self-checks)
// ---------------------------------------------------------------------------

/// True when every transmission is decodable by every user it serves: all
/// other XOR operands are present in that user's accessible caches.
pub fn schedule_is_decodable(
    schedule: &DeliverySchedule,
    demands: &[Demand],
    contents: &CacheContents,
    levels: &LevelSet,
) -> bool {
    let span_of: BTreeMap<u32, (u32, u32)> = demands
        .iter()
        .map(|d| {
            let level = levels.level_of_file(d.file).unwrap();
            (d.user, (d.span_start, levels.level(level).access_degree))
        })
        .collect();
    for t in &schedule.transmissions {
        for user in &t.serves {
            let (span, degree) = span_of[user];
            for (owner, chunk) in &t.components {
                if owner == user {
                    continue;
                }
                // other operands must be cached at the serving user
                if !contents.span_union(span, degree, chunk.file).contains(chunk.index) {
                    return false;
                }
            }
        }
    }
    true
}

/// True when replaying the schedule leaves every user with all chunks of its
/// demanded file (cached side information plus received transmissions).
pub fn schedule_completes(
    schedule: &DeliverySchedule,
    demands: &[Demand],
    contents: &CacheContents,
    levels: &LevelSet,
) -> bool {
    let m = schedule.chunks_per_file;
    let mut have: BTreeMap<u32, ChunkSet> = BTreeMap::new();
    for d in demands {
        let level = levels.level_of_file(d.file).unwrap();
        let degree = levels.level(level).access_degree;
        have.insert(d.user, contents.span_union(d.span_start, degree, d.file));
    }
    for t in &schedule.transmissions {
        for user in &t.serves {
            if let Some((_, chunk)) = t.components.iter().find(|(owner, _)| {
                demands.iter().any(|d| d.user == *user && d.file == {
                    let _ = owner;
                    d.file
                })
            }) {
                let _ = chunk;
            }
            // the component owned by (or aimed at) this user's file
            let demand = demands.iter().find(|d| d.user == *user).unwrap();
            if let Some((_, chunk)) = t.components.iter().find(|(_, c)| c.file == demand.file) {
                have.entry(*user).or_default().insert(chunk.index);
            }
        }
    }
    demands.iter().all(|d| {
        have.get(&d.user)
            .map(|s| ChunkSet::full(m).is_subset_of(*s))
            .unwrap_or(false)
    })
}

/// True when no transmission XOR-combines chunks for two users that share a
/// cache.
pub fn schedule_respects_cache_exclusion(
    schedule: &DeliverySchedule,
    demands: &[Demand],
    contents: &CacheContents,
    levels: &LevelSet,
) -> bool {
    let k = contents.cache_count();
    let caches_of = |user: u32| -> Vec<u32> {
        let d = demands.iter().find(|d| d.user == user).unwrap();
        let level = levels.level_of_file(d.file).unwrap();
        let degree = levels.level(level).access_degree;
        (0..degree).map(|j| (d.span_start + j) % k).collect()
    };
    for t in &schedule.transmissions {
        if t.components.len() < 2 {
            continue;
        }
        for i in 0..t.components.len() {
            for j in i + 1..t.components.len() {
                let a = caches_of(t.components[i].0);
                let b = caches_of(t.components[j].0);
                if a.iter().any(|c| b.contains(c)) {
                    return false;
                }
            }
        }
    }
    true
}
