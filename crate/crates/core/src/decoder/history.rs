//! Coarse-grained syndrome counting for levels `k >= 1`.
//!
//! A level-`k` site watches the reports at its own tile over a window of
//! `b^(2k)` steps split into `b^k` intervals of `b^k` steps. An interval is
//! hit for a threshold fraction `f` if at least `ceil(f * b^k)` of its steps
//! report a defect; the site's flag is set if at least `ceil(f * b^k)` of
//! the intervals are hit.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::noise::Syndrome;

/// `ceil(f * n)` without letting rounding noise push exact products up.
pub fn threshold(fraction: f64, n: u64) -> u64 {
    let x = fraction * n as f64;
    (x - 1e-9).ceil().max(0.0) as u64
}

/// Flags of one site at one level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SiteFlags {
    /// Set when the site itself is a correction target.
    pub target: bool,
    /// Set when the site counts as a nontrivial neighbour.
    pub neighbor: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    count: u64,
    hits_target: u64,
    hits_neighbor: u64,
}

#[derive(Clone, Debug)]
struct LevelHistory {
    /// Steps per interval, `b^k`; also the number of intervals per window.
    interval: u64,
    sites: Vec<usize>,
    tallies: Vec<Tally>,
    flags: Vec<SiteFlags>,
    threshold_target: u64,
    threshold_neighbor: u64,
}

#[derive(Clone, Debug)]
pub struct SyndromeHistory {
    levels: Vec<LevelHistory>,
    current: Vec<bool>,
    last_t: u64,
}

impl SyndromeHistory {
    pub fn new(lattice: &Lattice, base: u64, f_target: f64, f_neighbor: f64) -> Self {
        let levels = (1..=lattice.max_level())
            .map(|k| {
                let interval = base.pow(k);
                let sites: Vec<usize> = lattice.level_sites(k).into_iter().map(|t| lattice.index(t)).collect();
                LevelHistory {
                    interval,
                    tallies: vec![Tally::default(); sites.len()],
                    flags: vec![SiteFlags::default(); sites.len()],
                    sites,
                    threshold_target: threshold(f_target, interval),
                    threshold_neighbor: threshold(f_neighbor, interval),
                }
            })
            .collect();
        Self { levels, current: vec![false; lattice.tile_count()], last_t: 0 }
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Work period of level `k`, `b^(2k)`.
    pub fn period(&self, k: u32) -> u64 {
        if k == 0 {
            1
        } else {
            self.levels[k as usize - 1].interval.pow(2)
        }
    }

    /// Records the report of step `t` (counting from 1).
    pub fn update(&mut self, syndrome: &Syndrome, t: u64) {
        self.current.clone_from(&syndrome.reported);
        self.last_t = t;
        for level in &mut self.levels {
            let close_interval = t.is_multiple_of(level.interval);
            let close_window = t.is_multiple_of(level.interval * level.interval);
            for (s, &tile) in level.sites.iter().enumerate() {
                let tally = &mut level.tallies[s];
                tally.count += syndrome.reported[tile] as u64;
                if close_interval {
                    tally.hits_target += (tally.count >= level.threshold_target) as u64;
                    tally.hits_neighbor += (tally.count >= level.threshold_neighbor) as u64;
                    tally.count = 0;
                }
                if close_window {
                    level.flags[s] = SiteFlags {
                        target: tally.hits_target >= level.threshold_target,
                        neighbor: tally.hits_neighbor >= level.threshold_neighbor,
                    };
                    tally.hits_target = 0;
                    tally.hits_neighbor = 0;
                }
            }
        }
    }

    /// Flags of all level-`k` sites in raster order, as of the last update.
    /// Level 0 returns the raw report of every tile.
    pub fn level_syndromes(&self, k: u32) -> Result<Vec<SiteFlags>> {
        if k > self.max_level() {
            return Err(Error::InvalidLevel { level: k, max: self.max_level() });
        }
        if k == 0 {
            return Ok(self.current.iter().map(|&r| SiteFlags { target: r, neighbor: r }).collect());
        }
        let period = self.period(k);
        if self.last_t == 0 || !self.last_t.is_multiple_of(period) {
            return Err(Error::OffSchedule { level: k, t: self.last_t, period });
        }
        Ok(self.levels[k as usize - 1].flags.clone())
    }
}
