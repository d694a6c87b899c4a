//! Staged execution of decoder moves.
//!
//! A level-`k` move travels `Q^k` tiles and advances one hop per step.
//! Within a step, ops run in priority order (higher level first, then
//! source tile in raster order, then issue order) and no tile takes part in
//! more than one hop; an op that would reuse a tile is cancelled.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{HexDir, Lattice, TileCoord};
use crate::state::{Arrival, SystemState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PendingOp {
    pub level: u32,
    pub seq: u64,
    pub dir: HexDir,
    /// Tiles visited, source first; consecutive tiles are hex neighbours.
    pub path: Vec<TileCoord>,
    /// Index into `path` of the tile the op acts on next.
    pub progress: usize,
}

impl PendingOp {
    pub fn source(&self) -> TileCoord {
        self.path[0]
    }

    pub fn is_done(&self) -> bool {
        self.progress + 1 >= self.path.len()
    }

    fn priority_key(&self, lattice: &Lattice) -> (std::cmp::Reverse<u32>, usize, u64) {
        (std::cmp::Reverse(self.level), lattice.index(self.source()), self.seq)
    }
}

/// One executed hop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hop {
    pub level: u32,
    pub from: TileCoord,
    pub to: TileCoord,
    pub arrival: Arrival,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdvanceReport {
    pub hops: Vec<Hop>,
    pub cancelled: Vec<PendingOp>,
}

/// Moves the content of `from` onto the hex neighbour `to`, fusing with
/// any anyon there. Moving an empty tile does nothing.
pub fn execute_move<R: Rng + ?Sized>(state: &mut SystemState, from: TileCoord, to: TileCoord, rng: &mut R) -> Result<Arrival> {
    let dir = state
        .lattice()
        .are_adjacent(from, to)
        .ok_or(Error::NotAdjacent(from.row, from.col, to.row, to.col))?;
    Ok(state.transport(from, dir.offset(), rng)?)
}

#[derive(Clone, Debug)]
pub struct Scheduler {
    lattice: Lattice,
    instantaneous: bool,
    ops: Vec<PendingOp>,
    next_seq: u64,
}

impl Scheduler {
    pub fn new(lattice: Lattice, instantaneous: bool) -> Self {
        Self { lattice, instantaneous, ops: Vec::new(), next_seq: 0 }
    }

    pub fn pending(&self) -> &[PendingOp] {
        &self.ops
    }

    /// Drops all in-flight ops of `level`.
    pub fn cancel_level(&mut self, level: u32) -> Vec<PendingOp> {
        let (gone, keep) = std::mem::take(&mut self.ops).into_iter().partition(|op| op.level == level);
        self.ops = keep;
        gone
    }

    /// Queues a move of `Q^level` hops from `source` in direction `dir`.
    pub fn issue(&mut self, level: u32, source: TileCoord, dir: HexDir) {
        let hops = self.lattice.site_spacing(level);
        let mut path = Vec::with_capacity(hops + 1);
        path.push(source);
        for _ in 0..hops {
            let last = *path.last().expect("path starts at the source");
            path.push(self.lattice.step(last, dir));
        }
        self.ops.push(PendingOp { level, seq: self.next_seq, dir, path, progress: 0 });
        self.next_seq += 1;
    }

    /// Runs one step: every op advances one hop, or runs to completion in
    /// instantaneous mode.
    pub fn advance<R: Rng + ?Sized>(&mut self, state: &mut SystemState, rng: &mut R) -> Result<AdvanceReport> {
        let lattice = self.lattice;
        let mut ops = std::mem::take(&mut self.ops);
        ops.sort_by_key(|op| op.priority_key(&lattice));
        let mut busy = vec![false; lattice.tile_count()];
        let mut report = AdvanceReport::default();
        let mut ops = ops.into_iter();
        while let Some(mut op) = ops.next() {
            let span = if self.instantaneous { op.progress..op.path.len() } else { op.progress..op.progress + 2 };
            let tiles = &op.path[span];
            if tiles.iter().any(|t| busy[lattice.index(*t)]) {
                report.cancelled.push(op);
                continue;
            }
            for t in tiles {
                busy[lattice.index(*t)] = true;
            }
            let steps = tiles.len() - 1;
            for _ in 0..steps {
                let (from, to) = (op.path[op.progress], op.path[op.progress + 1]);
                match execute_move(state, from, to, rng) {
                    Ok(arrival) => report.hops.push(Hop { level: op.level, from, to, arrival }),
                    Err(e) => {
                        // keep the untouched ops so the caller can inspect them
                        self.ops.extend(ops);
                        return Err(e);
                    }
                }
                op.progress += 1;
            }
            if !op.is_done() {
                self.ops.push(op);
            }
        }
        Ok(report)
    }
}
