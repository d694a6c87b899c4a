//! Geometry of the `L x L` torus of hexagonal tiles.
//!
//! Tiles sit on a square array; the six hexagonal neighbours of `(r, c)` are
//! the offsets N, S, E, W, NE = (-1, +1) and SW = (+1, -1). The decoder reads
//! the full eight-tile Moore neighbourhood but only ever moves along these
//! six directions.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TileCoord {
    pub row: usize,
    pub col: usize,
}

impl TileCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl std::fmt::Display for TileCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// A hexagonal step direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HexDir {
    North,
    South,
    East,
    West,
    NorthEast,
    SouthWest,
}

impl HexDir {
    pub const ALL: [HexDir; 6] = [
        HexDir::North,
        HexDir::South,
        HexDir::East,
        HexDir::West,
        HexDir::NorthEast,
        HexDir::SouthWest,
    ];

    /// `(d_row, d_col)`.
    pub const fn offset(self) -> (i64, i64) {
        match self {
            HexDir::North => (-1, 0),
            HexDir::South => (1, 0),
            HexDir::East => (0, 1),
            HexDir::West => (0, -1),
            HexDir::NorthEast => (-1, 1),
            HexDir::SouthWest => (1, -1),
        }
    }

    pub const fn opposite(self) -> HexDir {
        match self {
            HexDir::North => HexDir::South,
            HexDir::South => HexDir::North,
            HexDir::East => HexDir::West,
            HexDir::West => HexDir::East,
            HexDir::NorthEast => HexDir::SouthWest,
            HexDir::SouthWest => HexDir::NorthEast,
        }
    }

    pub fn from_offset(offset: (i64, i64)) -> Option<HexDir> {
        HexDir::ALL.into_iter().find(|d| d.offset() == offset)
    }
}

/// Offsets of the Moore neighbourhood in row-major order.
pub const MOORE_OFFSETS: [(i64, i64); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

/// Index of an offset in [`MOORE_OFFSETS`].
pub fn moore_index(offset: (i64, i64)) -> Option<usize> {
    MOORE_OFFSETS.iter().position(|&o| o == offset)
}

/// Position of a site inside its `Q x Q` colony.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    NorthWest,
    North,
    NorthEast,
    West,
    Center,
    East,
    SouthWest,
    South,
    SouthEast,
}

impl Role {
    /// Role from the site's row and column index within a colony of
    /// `colony` sites per side. The middle index is the centre line;
    /// indices before it count as north/west, after it as south/east.
    pub fn from_position(row: usize, col: usize, colony: usize) -> Role {
        let mid = colony / 2;
        let band = |i: usize| i.cmp(&mid);
        use std::cmp::Ordering::*;
        match (band(row), band(col)) {
            (Less, Less) => Role::NorthWest,
            (Less, Equal) => Role::North,
            (Less, Greater) => Role::NorthEast,
            (Equal, Less) => Role::West,
            (Equal, Equal) => Role::Center,
            (Equal, Greater) => Role::East,
            (Greater, Less) => Role::SouthWest,
            (Greater, Equal) => Role::South,
            (Greater, Greater) => Role::SouthEast,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Colony {
    /// Colony row and column on the grid of colonies at this level.
    pub index: (usize, usize),
    pub role: Role,
}

/// An edge between two hexagonal neighbours, owned by `from`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub from: TileCoord,
    pub to: TileCoord,
    pub dir: HexDir,
}

/// Edges owned by each tile; together they cover every edge exactly once.
pub const OWNED_DIRECTIONS: [HexDir; 3] = [HexDir::East, HexDir::South, HexDir::SouthWest];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Lattice {
    size: usize,
    colony: usize,
    levels: u32,
}

impl Lattice {
    /// An `size x size` torus with colonies of `colony x colony` tiles;
    /// `size` must be a positive power of `colony`.
    pub fn new(size: usize, colony: usize) -> Result<Self> {
        if colony < 3 || colony.is_multiple_of(2) {
            return Err(Error::InvalidColonySize(colony));
        }
        let mut n = 0;
        let mut s = 1usize;
        while s < size {
            s = s.checked_mul(colony).ok_or(Error::InvalidLatticeSize { size, colony })?;
            n += 1;
        }
        if s != size || n == 0 {
            return Err(Error::InvalidLatticeSize { size, colony });
        }
        Ok(Self { size, colony, levels: n })
    }

    /// Linear size `L`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Colony size `Q`.
    pub fn colony_size(&self) -> usize {
        self.colony
    }

    /// `k_max = log_Q(L)`.
    pub fn max_level(&self) -> u32 {
        self.levels
    }

    pub fn tile_count(&self) -> usize {
        self.size * self.size
    }

    pub fn edge_count(&self) -> usize {
        3 * self.tile_count()
    }

    #[inline]
    pub fn index(&self, t: TileCoord) -> usize {
        t.row * self.size + t.col
    }

    #[inline]
    pub fn coord(&self, index: usize) -> TileCoord {
        TileCoord::new(index / self.size, index % self.size)
    }

    pub fn tiles(&self) -> impl Iterator<Item = TileCoord> + '_ {
        (0..self.tile_count()).map(|i| self.coord(i))
    }

    #[inline]
    pub fn wrap(&self, row: i64, col: i64) -> TileCoord {
        let l = self.size as i64;
        TileCoord::new(row.rem_euclid(l) as usize, col.rem_euclid(l) as usize)
    }

    #[inline]
    pub fn shift(&self, t: TileCoord, offset: (i64, i64)) -> TileCoord {
        self.wrap(t.row as i64 + offset.0, t.col as i64 + offset.1)
    }

    #[inline]
    pub fn step(&self, t: TileCoord, dir: HexDir) -> TileCoord {
        self.shift(t, dir.offset())
    }

    /// Neighbours in the order N, S, E, W, NE, SW.
    pub fn hex_neighbors(&self, t: TileCoord) -> [TileCoord; 6] {
        HexDir::ALL.map(|d| self.step(t, d))
    }

    /// Neighbours in [`MOORE_OFFSETS`] order. On very small tori the list
    /// can contain repeated coordinates.
    pub fn moore_neighbors(&self, t: TileCoord) -> [TileCoord; 8] {
        MOORE_OFFSETS.map(|o| self.shift(t, o))
    }

    /// The E, S and SW edges of `t`.
    pub fn owned_edges(&self, t: TileCoord) -> [Edge; 3] {
        OWNED_DIRECTIONS.map(|dir| Edge { from: t, to: self.step(t, dir), dir })
    }

    /// Spacing of level-`k` decoder sites, `Q^k`.
    pub fn site_spacing(&self, k: u32) -> usize {
        self.colony.pow(k)
    }

    /// Level-`k` colony containing `t` (a block of `Q^k x Q^k` tiles) and the
    /// role of `t`'s level-`(k-1)` block within it. Level 0 makes every tile
    /// its own colony centre.
    pub fn colony_of(&self, t: TileCoord, k: u32) -> Result<Colony> {
        if k > self.levels {
            return Err(Error::InvalidLevel { level: k, max: self.levels });
        }
        if k == 0 {
            return Ok(Colony { index: (t.row, t.col), role: Role::Center });
        }
        let block = self.colony.pow(k);
        let sub = self.colony.pow(k - 1);
        let role = Role::from_position((t.row % block) / sub, (t.col % block) / sub, self.colony);
        Ok(Colony { index: (t.row / block, t.col / block), role })
    }

    /// Role of a level-`k` decoder site within its colony of `Q x Q` sites.
    /// Uses the same arithmetic as [`Lattice::colony_of`] one level up, which
    /// also covers the top level where the colony would exceed the torus.
    pub fn site_role(&self, site: TileCoord, k: u32) -> Role {
        let spacing = self.site_spacing(k);
        let per_side = self.size / spacing;
        let (i, j) = (site.row / spacing, site.col / spacing);
        if per_side == 1 {
            return Role::from_position(0, 0, self.colony);
        }
        Role::from_position(i % self.colony, j % self.colony, self.colony)
    }

    /// Number of level-`k` sites per side, `L / Q^k`.
    pub fn sites_per_side(&self, k: u32) -> usize {
        self.size / self.site_spacing(k)
    }

    /// Tile of level-`k` site `(i, j)`: the centre of the `i, j`-th block of
    /// `Q^k x Q^k` tiles.
    pub fn site_tile(&self, k: u32, i: usize, j: usize) -> TileCoord {
        let spacing = self.site_spacing(k);
        let center = (spacing - 1) / 2;
        TileCoord::new(i * spacing + center, j * spacing + center)
    }

    /// All level-`k` site tiles in raster order.
    pub fn level_sites(&self, k: u32) -> Vec<TileCoord> {
        let n = self.sites_per_side(k);
        (0..n * n).map(|s| self.site_tile(k, s / n, s % n)).collect()
    }

    /// Length of the hexagonal path realizing an (unwrapped) offset.
    pub fn hex_length(offset: (i64, i64)) -> u64 {
        let (dr, dc) = offset;
        if (dr < 0) != (dc < 0) && dr != 0 && dc != 0 {
            dr.unsigned_abs().max(dc.unsigned_abs())
        } else {
            dr.unsigned_abs() + dc.unsigned_abs()
        }
    }

    /// Shortest displacement from `a` to `b` on the torus, measured in hex
    /// steps. Ties prefer the unwrapped candidate, then smaller row and
    /// column shifts in a fixed order.
    pub fn min_displacement(&self, a: TileCoord, b: TileCoord) -> (i64, i64) {
        let l = self.size as i64;
        let dr = b.row as i64 - a.row as i64;
        let dc = b.col as i64 - a.col as i64;
        let mut best = (dr, dc);
        let mut best_len = Self::hex_length(best);
        for sr in [0, -l, l] {
            for sc in [0, -l, l] {
                let cand = (dr + sr, dc + sc);
                let len = Self::hex_length(cand);
                if len < best_len {
                    best = cand;
                    best_len = len;
                }
            }
        }
        best
    }

    /// Hexagonal distance on the torus.
    pub fn hex_distance(&self, a: TileCoord, b: TileCoord) -> u64 {
        Self::hex_length(self.min_displacement(a, b))
    }

    pub fn are_adjacent(&self, a: TileCoord, b: TileCoord) -> Option<HexDir> {
        HexDir::ALL.into_iter().find(|&d| self.step(a, d) == b)
    }
}
