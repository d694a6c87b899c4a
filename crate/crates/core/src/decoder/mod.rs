//! Hierarchical cellular-automaton decoder.
//!
//! Level 0 acts every step on the raw report of each tile. Level `k >= 1`
//! acts every `U^k` steps on coarse-grained flags of sites spaced `Q^k`
//! tiles apart. Every action is a straight move of `Q^k` hops executed by
//! the [`Scheduler`].

mod history;
mod rules;
mod schedule;

pub use history::{threshold, SiteFlags, SyndromeHistory};
pub use rules::{transition_rule, Action};
pub use schedule::{execute_move, AdvanceReport, Hop, PendingOp, Scheduler};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{HexDir, Lattice, TileCoord, MOORE_OFFSETS};
use crate::noise::Syndrome;
use crate::state::SystemState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderParams {
    /// Colony size; the rules are written for 3.
    pub colony: usize,
    /// Counting base; the work period is `base^2`.
    pub base: u64,
    /// Fraction of steps and intervals needed to flag a correction target.
    pub f_target: f64,
    /// Fraction needed to flag a nontrivial neighbour.
    pub f_neighbor: f64,
    /// Complete every move within the step it is issued.
    pub instantaneous: bool,
}

impl Default for DecoderParams {
    fn default() -> Self {
        Self { colony: 3, base: 7, f_target: 0.7, f_neighbor: 0.2, instantaneous: false }
    }
}

impl DecoderParams {
    pub fn validate(&self) -> Result<()> {
        if self.colony != 3 {
            return Err(Error::UnsupportedColonySize(self.colony));
        }
        if self.base == 0 {
            return Err(Error::InvalidConfig("counting base must be positive".into()));
        }
        for (name, value) in [("fc", self.f_target), ("fn", self.f_neighbor)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(())
    }

    pub fn work_period(&self) -> u64 {
        self.base * self.base
    }
}

/// A move issued by the rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Issued {
    pub level: u32,
    pub source: TileCoord,
    pub dir: HexDir,
}

/// What the decoder did in one step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub t: u64,
    pub issued: Vec<Issued>,
    pub hops: Vec<Hop>,
    /// Ops dropped because of tile conflicts or a new issue at their level.
    pub cancelled: usize,
}

#[derive(Clone, Debug)]
pub struct Decoder {
    lattice: Lattice,
    params: DecoderParams,
    history: SyndromeHistory,
    scheduler: Scheduler,
}

impl Decoder {
    pub fn new(lattice: Lattice, params: DecoderParams) -> Result<Self> {
        params.validate()?;
        if lattice.colony_size() != params.colony {
            return Err(Error::InvalidConfig(format!(
                "lattice colony size {} differs from decoder colony size {}",
                lattice.colony_size(),
                params.colony
            )));
        }
        Ok(Self {
            lattice,
            params,
            history: SyndromeHistory::new(&lattice, params.base, params.f_target, params.f_neighbor),
            scheduler: Scheduler::new(lattice, params.instantaneous),
        })
    }

    pub fn params(&self) -> &DecoderParams {
        &self.params
    }

    pub fn history(&self) -> &SyndromeHistory {
        &self.history
    }

    pub fn pending(&self) -> &[PendingOp] {
        self.scheduler.pending()
    }

    /// Rule outputs for every level-`k` site, given that level's flags.
    pub fn actions(&self, k: u32, flags: &[SiteFlags]) -> Vec<Issued> {
        let n = self.lattice.sites_per_side(k);
        let mut out = Vec::new();
        for (s, flag) in flags.iter().enumerate() {
            if !flag.target {
                continue;
            }
            let (i, j) = (s / n, s % n);
            let neighbor_site = |(dr, dc): (i64, i64)| {
                let ni = (i as i64 + dr).rem_euclid(n as i64) as usize;
                let nj = (j as i64 + dc).rem_euclid(n as i64) as usize;
                (ni, nj)
            };
            let neighbors: [bool; 8] = MOORE_OFFSETS.map(|o| {
                let (ni, nj) = neighbor_site(o);
                // on a one-site level the site is its own neighbour; read as absent
                (ni, nj) != (i, j) && flags[ni * n + nj].neighbor
            });
            let source = self.lattice.site_tile(k, i, j);
            let role = self.lattice.site_role(source, k);
            if let Action::Move(dir) = transition_rule(role, true, &neighbors) {
                if neighbor_site(dir.offset()) != (i, j) {
                    out.push(Issued { level: k, source, dir });
                }
            }
        }
        out
    }

    /// Processes the report of step `t` (counting from 1): updates the
    /// histories, issues the actions of every level due at `t`, then
    /// advances all pending moves by one step.
    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut SystemState, syndrome: &Syndrome, t: u64, rng: &mut R) -> Result<StepReport> {
        self.history.update(syndrome, t);
        let mut report = StepReport { t, ..StepReport::default() };
        for k in 0..=self.lattice.max_level() {
            if !t.is_multiple_of(self.history.period(k)) {
                continue;
            }
            let flags = self.history.level_syndromes(k)?;
            report.cancelled += self.scheduler.cancel_level(k).len();
            for action in self.actions(k, &flags) {
                self.scheduler.issue(action.level, action.source, action.dir);
                report.issued.push(action);
            }
        }
        let advanced = self.scheduler.advance(state, rng)?;
        report.hops = advanced.hops;
        report.cancelled += advanced.cancelled.len();
        Ok(report)
    }
}
