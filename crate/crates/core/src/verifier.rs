//! Clustering decoder with perfect syndrome information.
//!
//! Occupied tiles are grouped by single linkage at a growing hex-distance
//! scale. Each cluster is fused into its smallest tile in raster order by
//! carrying every member along a shortest path; what survives waits for the
//! next scale. Decoding fails when a fusion closes a non-contractible loop,
//! a cluster spans half the torus, or a fusion group grows past its cap.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::TileCoord;
use crate::state::{Fault, SystemState};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GrowthSchedule {
    /// Scales 1, 2, 4, 8, ...
    #[default]
    Doubling,
    /// Scales 1, 2, 3, 4, ...
    Linear,
}

impl GrowthSchedule {
    fn next(self, r: u64) -> u64 {
        match self {
            GrowthSchedule::Doubling => r * 2,
            GrowthSchedule::Linear => r + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Correctable,
    LogicalError,
    ClusterTooWide,
    GroupTooLarge,
}

impl Verdict {
    pub fn is_correctable(self) -> bool {
        self == Verdict::Correctable
    }
}

impl From<Fault> for Verdict {
    fn from(f: Fault) -> Self {
        match f {
            Fault::LogicalError => Verdict::LogicalError,
            Fault::GroupTooLarge { .. } => Verdict::GroupTooLarge,
        }
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller index as root.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Clusters of `tiles` (raster order) under single linkage at scale `r`.
/// Each cluster lists its members in raster order, so the first member is
/// the representative.
pub fn clusters(state: &SystemState, tiles: &[TileCoord], r: u64) -> Vec<Vec<TileCoord>> {
    let lattice = state.lattice();
    let mut sets = DisjointSets::new(tiles.len());
    for i in 0..tiles.len() {
        for j in i + 1..tiles.len() {
            if lattice.hex_distance(tiles[i], tiles[j]) <= r {
                sets.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<TileCoord>> = vec![Vec::new(); tiles.len()];
    for (i, &t) in tiles.iter().enumerate() {
        let root = sets.find(i);
        groups[root].push(t);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

fn diameter(state: &SystemState, members: &[TileCoord]) -> u64 {
    let lattice = state.lattice();
    let mut d = 0;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            d = d.max(lattice.hex_distance(a, b));
        }
    }
    d
}

/// Decodes a copy of `state`; the original is left untouched.
pub fn verify<R: Rng + ?Sized>(state: &SystemState, schedule: GrowthSchedule, rng: &mut R) -> Verdict {
    if state.is_vacuum() {
        return Verdict::Correctable;
    }
    let mut work = state.clone();
    let size = work.lattice().size() as u64;
    let mut r = 1u64;
    loop {
        if work.is_vacuum() {
            return Verdict::Correctable;
        }
        if r > 2 * size {
            return Verdict::ClusterTooWide;
        }
        let occupied = work.occupied_tiles();
        let found = clusters(&work, &occupied, r);
        if found.iter().any(|c| 2 * diameter(&work, c) >= size) {
            return Verdict::ClusterTooWide;
        }
        for cluster in found {
            let rep = cluster[0];
            for &member in &cluster[1..] {
                let displacement = work.lattice().min_displacement(member, rep);
                if let Err(fault) = work.transport(member, displacement, rng) {
                    return fault.into();
                }
            }
        }
        r = schedule.next(r);
    }
}
