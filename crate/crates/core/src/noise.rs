//! Pair-creation noise and faulty syndrome measurement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{HexDir, TileCoord, OWNED_DIRECTIONS};
use crate::state::{Fault, SystemState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Pair-creation probability per edge and step.
    pub p: f64,
    /// Flip probability per tile report and step.
    pub q: f64,
    /// Pair-creation energy; only used to convert `p` to a temperature.
    #[serde(default = "default_gap")]
    pub gap: f64,
}

fn default_gap() -> f64 {
    1.0
}

impl NoiseParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let params = Self { p, q, gap: 1.0 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return Err(Error::InvalidConfig(format!("pair-creation energy must be positive, got {}", self.gap)));
        }
        Ok(())
    }

    pub fn beta(&self) -> Result<f64> {
        beta_from_p(self.p, self.gap)
    }
}

/// Inverse temperature at which a pair-creation probability `p` follows
/// from a Boltzmann factor: `p / (1 - p) = exp(-beta * gap)`.
pub fn beta_from_p(p: f64, gap: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability { name: "p", value: p });
    }
    Ok(((1.0 - p) / p).ln() / gap)
}

/// Inverse of [`beta_from_p`].
pub fn p_from_beta(beta: f64, gap: f64) -> f64 {
    1.0 / (1.0 + (beta * gap).exp())
}

/// Indices in `0..n` selected independently with probability `p`, ascending.
///
/// Gaps between selections are drawn from the geometric distribution, so
/// the cost scales with the number of selections rather than with `n`.
pub fn bernoulli_indices<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    if p <= 0.0 || n == 0 {
        return Vec::new();
    }
    if p >= 1.0 {
        return (0..n).collect();
    }
    let log_q = (-p).ln_1p();
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        // u in (0, 1]
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        if gap >= (n - i) as f64 {
            break;
        }
        i += gap as usize;
        out.push(i);
        i += 1;
        if i >= n {
            break;
        }
    }
    out
}

/// One pair-creation event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairEvent {
    pub tile: TileCoord,
    pub dir: HexDir,
}

/// Applies one step of pair-creation noise. Edges are visited in raster
/// order of their owning tile, then E, S, SW; each event is collapsed
/// before the next is applied.
///
/// `noise` selects the edges, `fusion` samples the collapsed charges.
pub fn apply_pair_creation_step<R1, R2>(
    state: &mut SystemState,
    params: &NoiseParams,
    noise: &mut R1,
    fusion: &mut R2,
) -> Result<Vec<PairEvent>, Fault>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    let lattice = *state.lattice();
    let edges = lattice.edge_count();
    let mut events = Vec::new();
    for e in bernoulli_indices(edges, params.p, noise) {
        let tile = lattice.coord(e / OWNED_DIRECTIONS.len());
        let dir = OWNED_DIRECTIONS[e % OWNED_DIRECTIONS.len()];
        events.push(PairEvent { tile, dir });
        state.create_pair(tile, dir, fusion)?;
    }
    Ok(events)
}

/// Reported syndrome, one flag per tile in raster order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Syndrome {
    pub reported: Vec<bool>,
}

impl Syndrome {
    pub fn quiet(tiles: usize) -> Self {
        Self { reported: vec![false; tiles] }
    }

    pub fn count(&self) -> usize {
        self.reported.iter().filter(|&&r| r).count()
    }
}

/// True occupation with each report flipped independently with probability
/// `q`. The state itself is untouched.
pub fn measure_syndrome<R: Rng + ?Sized>(state: &SystemState, params: &NoiseParams, rng: &mut R) -> Syndrome {
    let mut reported = state.occupation();
    for i in bernoulli_indices(reported.len(), params.q, rng) {
        reported[i] = !reported[i];
    }
    Syndrome { reported }
}
