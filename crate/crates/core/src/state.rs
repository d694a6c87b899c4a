//! Anyon content of the whole torus.
//!
//! Every tile holds at most one anyon, always of charge tau. Anyons belong
//! to fusion groups; two groups never share an anyon. Each anyon also keeps
//! a position on the universal cover of the torus. Positions are consistent
//! within a group, so two members of one group fused on the same tile with
//! different cover positions reveal a world-line winding the torus.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::anyon::Charge;
use crate::fusion::{AnyonId, FusionGroup, GroupDump, MAX_LEAVES};
use crate::lattice::{HexDir, Lattice, TileCoord};

/// Largest supported group-size cap; leaves of a group plus one freshly
/// inserted pair must fit the labeling width.
pub const MAX_GROUP_CAP: usize = MAX_LEAVES - 4;

/// Events that end a simulated memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Fault {
    #[error("fusion closed a non-contractible loop")]
    LogicalError,
    #[error("fusion group of {size} anyons exceeds the cap of {cap}")]
    GroupTooLarge { size: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct GroupId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Anyon {
    pub tile: TileCoord,
    /// Universal-cover position; reduces mod `L` to `tile`.
    pub cover: (i64, i64),
    pub group: GroupId,
}

/// Result of moving or creating an anyon onto a tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Arrival {
    /// Nothing was there to move.
    Nothing,
    /// The target was empty.
    Placed,
    /// Fused with the target's anyon.
    Fused(Charge),
}

#[derive(Clone, Debug, Serialize)]
pub struct StateDump {
    pub anyons: Vec<(AnyonId, Anyon)>,
    pub groups: Vec<(GroupId, GroupDump)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    lattice: Lattice,
    tiles: Vec<Option<AnyonId>>,
    anyons: BTreeMap<AnyonId, Anyon>,
    groups: BTreeMap<GroupId, FusionGroup>,
    next_anyon: u64,
    next_group: u64,
    max_group: usize,
}

fn add(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 - b.0, a.1 - b.1)
}

impl SystemState {
    /// An empty torus. `max_group` is clamped to [`MAX_GROUP_CAP`].
    pub fn new(lattice: Lattice, max_group: usize) -> Self {
        Self {
            lattice,
            tiles: vec![None; lattice.tile_count()],
            anyons: BTreeMap::new(),
            groups: BTreeMap::new(),
            next_anyon: 0,
            next_group: 0,
            max_group: max_group.clamp(2, MAX_GROUP_CAP),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn max_group(&self) -> usize {
        self.max_group
    }

    pub fn is_vacuum(&self) -> bool {
        self.anyons.is_empty()
    }

    pub fn anyon_count(&self) -> usize {
        self.anyons.len()
    }

    pub fn occupant(&self, t: TileCoord) -> Option<AnyonId> {
        self.tiles[self.lattice.index(t)]
    }

    pub fn is_occupied(&self, t: TileCoord) -> bool {
        self.occupant(t).is_some()
    }

    /// Occupied tiles in raster order.
    pub fn occupied_tiles(&self) -> Vec<TileCoord> {
        self.tiles
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_some())
            .map(|(i, _)| self.lattice.coord(i))
            .collect()
    }

    /// True charge of every tile in raster order.
    pub fn occupation(&self) -> Vec<bool> {
        self.tiles.iter().map(Option::is_some).collect()
    }

    pub fn anyon(&self, id: AnyonId) -> Option<&Anyon> {
        self.anyons.get(&id)
    }

    pub fn anyons(&self) -> impl Iterator<Item = (AnyonId, &Anyon)> {
        self.anyons.iter().map(|(&id, a)| (id, a))
    }

    pub fn group(&self, id: GroupId) -> Option<&FusionGroup> {
        self.groups.get(&id)
    }

    pub fn groups(&self) -> impl Iterator<Item = (GroupId, &FusionGroup)> {
        self.groups.iter().map(|(&id, g)| (id, g))
    }

    pub fn largest_group(&self) -> usize {
        self.groups.values().map(FusionGroup::len).max().unwrap_or(0)
    }

    /// Fails if any group exceeds the cap.
    pub fn check_group_sizes(&self) -> Result<(), Fault> {
        let size = self.largest_group();
        if size > self.max_group {
            Err(Fault::GroupTooLarge { size, cap: self.max_group })
        } else {
            Ok(())
        }
    }

    pub fn dump(&self) -> StateDump {
        StateDump {
            anyons: self.anyons.iter().map(|(&id, &a)| (id, a)).collect(),
            groups: self.groups.iter().map(|(&id, g)| (id, g.dump())).collect(),
        }
    }

    fn fresh_anyon(&mut self) -> AnyonId {
        let id = AnyonId(self.next_anyon);
        self.next_anyon += 1;
        id
    }

    fn fresh_group(&mut self) -> GroupId {
        let id = GroupId(self.next_group);
        self.next_group += 1;
        id
    }

    fn set_tile(&mut self, t: TileCoord, a: Option<AnyonId>) {
        let i = self.lattice.index(t);
        self.tiles[i] = a;
    }

    fn group_mut(&mut self, id: GroupId) -> &mut FusionGroup {
        self.groups.get_mut(&id).expect("anyon refers to a live group")
    }

    fn cover_of(&self, t: TileCoord) -> (i64, i64) {
        (t.row as i64, t.col as i64)
    }

    /// Drops anyons that fused away and the group if it emptied.
    fn sync_group(&mut self, gid: GroupId) {
        let group = &self.groups[&gid];
        let alive: Vec<AnyonId> = group.leaves().iter().map(|l| l.id).collect();
        let stale: Vec<AnyonId> = self
            .anyons
            .iter()
            .filter(|(id, a)| a.group == gid && !alive.contains(id))
            .map(|(&id, _)| id)
            .collect();
        for id in stale {
            let a = self.anyons.remove(&id).expect("listed above");
            let i = self.lattice.index(a.tile);
            if self.tiles[i] == Some(id) {
                self.tiles[i] = None;
            }
        }
        if self.groups[&gid].is_empty() {
            self.groups.remove(&gid);
        }
    }

    /// Puts `x`'s group into `y`'s, translating `x`'s cover frame so both
    /// anyons share a cover position.
    fn join_groups(&mut self, x: AnyonId, y: AnyonId) -> Result<GroupId, Fault> {
        let ax = self.anyons[&x];
        let ay = self.anyons[&y];
        if ax.group == ay.group {
            return Ok(ay.group);
        }
        let gx = self.groups[&ax.group].len();
        let gy = self.groups[&ay.group].len();
        // the pending fusion removes at least one anyon
        if gx + gy - 1 > self.max_group {
            return Err(Fault::GroupTooLarge { size: gx + gy - 1, cap: self.max_group });
        }
        let shift = sub(ay.cover, ax.cover);
        for a in self.anyons.values_mut().filter(|a| a.group == ax.group) {
            a.cover = add(a.cover, shift);
            a.group = ay.group;
        }
        let other = self.groups.remove(&ax.group).expect("live group");
        let base = self.groups.remove(&ay.group).expect("live group");
        let merged = base.merge(other).expect("groups hold disjoint vacuum-total anyons");
        self.groups.insert(ay.group, merged);
        Ok(ay.group)
    }

    /// Fuses anyon `x` into `y`, which sit on the same tile. `y` keeps its id
    /// if the outcome is tau.
    fn fuse_into<R: Rng + ?Sized>(&mut self, x: AnyonId, y: AnyonId, rng: &mut R) -> Result<Charge, Fault> {
        let (ax, ay) = (self.anyons[&x], self.anyons[&y]);
        if ax.group == ay.group && ax.cover != ay.cover {
            return Err(Fault::LogicalError);
        }
        let gid = self.join_groups(x, y)?;
        let tile = ay.tile;
        let group = self.group_mut(gid);
        let at = group.make_adjacent(x, y).expect("both anyons belong to the group");
        let c = group.fuse_pair(at, y, rng).expect("adjacent leaves fuse");
        self.set_tile(tile, if c.is_vacuum() { None } else { Some(y) });
        self.sync_group(gid);
        Ok(c)
    }

    /// Creates a tau pair across the hexagonal edge from `a` in direction
    /// `dir` and collapses both tiles to a definite charge.
    pub fn create_pair<R: Rng + ?Sized>(&mut self, a: TileCoord, dir: HexDir, rng: &mut R) -> Result<(), Fault> {
        let b = self.lattice.step(a, dir);
        let offset = dir.offset();
        let first = self.fresh_anyon();
        let second = self.fresh_anyon();
        match (self.occupant(a), self.occupant(b)) {
            (None, None) => {
                let gid = self.fresh_group();
                let cover = self.cover_of(a);
                self.groups.insert(gid, FusionGroup::pair(first, second));
                self.anyons.insert(first, Anyon { tile: a, cover, group: gid });
                self.anyons.insert(second, Anyon { tile: b, cover: add(cover, offset), group: gid });
                self.set_tile(a, Some(first));
                self.set_tile(b, Some(second));
            }
            (Some(x), occupant_b) => {
                // the pair appears right of x; its first member fuses with x
                let ax = self.anyons[&x];
                self.check_insert(ax.group)?;
                let group = self.group_mut(ax.group);
                let px = group.position(x).expect("anyon in its group");
                group.insert_vacuum_pair(px + 1, first, second).expect("room for a pair");
                self.anyons.insert(first, Anyon { tile: a, cover: ax.cover, group: ax.group });
                self.anyons.insert(second, Anyon { tile: b, cover: add(ax.cover, offset), group: ax.group });
                let c = self.group_mut(ax.group).fuse_pair(px, x, rng).expect("adjacent leaves fuse");
                self.set_tile(a, if c.is_vacuum() { None } else { Some(x) });
                self.sync_group(ax.group);
                match occupant_b {
                    Some(y) => {
                        self.fuse_into(second, y, rng)?;
                    }
                    None => self.set_tile(b, Some(second)),
                }
            }
            (None, Some(y)) => {
                // the pair appears left of y; its second member fuses with y
                let ay = self.anyons[&y];
                self.check_insert(ay.group)?;
                let group = self.group_mut(ay.group);
                let py = group.position(y).expect("anyon in its group");
                group.insert_vacuum_pair(py, first, second).expect("room for a pair");
                self.anyons.insert(first, Anyon { tile: a, cover: sub(ay.cover, offset), group: ay.group });
                self.anyons.insert(second, Anyon { tile: b, cover: ay.cover, group: ay.group });
                let c = self.group_mut(ay.group).fuse_pair(py + 1, y, rng).expect("adjacent leaves fuse");
                self.set_tile(b, if c.is_vacuum() { None } else { Some(y) });
                self.sync_group(ay.group);
                self.set_tile(a, Some(first));
            }
        }
        self.check_group_sizes()
    }

    fn check_insert(&self, gid: GroupId) -> Result<(), Fault> {
        let size = self.groups[&gid].len() + 1;
        if size > self.max_group {
            Err(Fault::GroupTooLarge { size, cap: self.max_group })
        } else {
            Ok(())
        }
    }

    /// Moves the anyon on `from` by `displacement` (a path on the universal
    /// cover) to the tile it lands on, fusing with any anyon already there.
    pub fn transport<R: Rng + ?Sized>(
        &mut self,
        from: TileCoord,
        displacement: (i64, i64),
        rng: &mut R,
    ) -> Result<Arrival, Fault> {
        let Some(x) = self.occupant(from) else {
            return Ok(Arrival::Nothing);
        };
        let to = self.lattice.shift(from, displacement);
        if to == from && displacement == (0, 0) {
            return Ok(Arrival::Placed);
        }
        self.set_tile(from, None);
        let resident = self.occupant(to);
        let ax = self.anyons.get_mut(&x).expect("tile occupant exists");
        ax.cover = add(ax.cover, displacement);
        ax.tile = to;
        match resident {
            None => {
                self.set_tile(to, Some(x));
                Ok(Arrival::Placed)
            }
            Some(y) => {
                let c = self.fuse_into(x, y, rng)?;
                self.check_group_sizes()?;
                Ok(Arrival::Fused(c))
            }
        }
    }

    /// Checks the structural invariants; used by tests.
    pub fn validate(&self) -> Result<(), String> {
        let l = self.lattice.size() as i64;
        for (i, occ) in self.tiles.iter().enumerate() {
            if let Some(id) = occ {
                let a = self.anyons.get(id).ok_or(format!("tile {i} holds unknown anyon {}", id.0))?;
                if self.lattice.index(a.tile) != i {
                    return Err(format!("anyon {} tile mismatch", id.0));
                }
            }
        }
        for (id, a) in &self.anyons {
            if self.occupant(a.tile) != Some(*id) {
                return Err(format!("anyon {} not on its tile", id.0));
            }
            if (a.cover.0.rem_euclid(l), a.cover.1.rem_euclid(l)) != (a.tile.row as i64, a.tile.col as i64) {
                return Err(format!("anyon {} cover position off its tile", id.0));
            }
            let g = self.groups.get(&a.group).ok_or(format!("anyon {} in missing group", id.0))?;
            if g.position(*id).is_none() {
                return Err(format!("anyon {} missing from its group", id.0));
            }
        }
        for (gid, g) in &self.groups {
            if (g.norm_sqr() - 1.0).abs() > 1e-9 {
                return Err(format!("group {} not normalized", gid.0));
            }
            if g.total_charge() != Charge::Vacuum {
                return Err(format!("group {} has nontrivial total charge", gid.0));
            }
            for leaf in g.leaves() {
                match self.anyons.get(&leaf.id) {
                    Some(a) if a.group == *gid && leaf.charge == Charge::Tau => {}
                    _ => return Err(format!("group {} leaf {} inconsistent", gid.0, leaf.id.0)),
                }
            }
        }
        Ok(())
    }
}
