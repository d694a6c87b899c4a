//! Local transition rules for colonies of 3 x 3 sites.
//!
//! Each role checks neighbour syndromes in a fixed order; the first set
//! neighbour decides the action, otherwise the role's default applies.

use crate::lattice::{moore_index, HexDir, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Stay,
    Move(HexDir),
}

use Action::{Move, Stay};
use HexDir::{East as E, North as N, NorthEast as NE, South as S, SouthWest as SW, West as W};

type Rule = (&'static [((i64, i64), Action)], Action);

const NORTH_WEST: Rule = (
    &[
        ((0, -1), Stay),
        ((-1, 0), Stay),
        ((0, 1), Move(E)),
        ((1, 0), Move(S)),
        ((1, -1), Stay),
        ((-1, -1), Stay),
        ((-1, 1), Stay),
    ],
    Move(S),
);

const NORTH: Rule = (
    &[((-1, 0), Stay), ((0, -1), Stay), ((0, 1), Stay), ((-1, 1), Stay), ((-1, -1), Stay)],
    Move(S),
);

const NORTH_EAST: Rule = (
    &[
        ((0, 1), Move(E)),
        ((-1, 1), Move(NE)),
        ((1, 1), Move(S)),
        ((-1, 0), Stay),
        ((0, -1), Move(W)),
        ((1, 0), Move(S)),
        ((-1, -1), Stay),
    ],
    Move(SW),
);

const EAST: Rule = (
    &[((0, 1), Move(E)), ((-1, 1), Move(NE)), ((1, 1), Move(S)), ((-1, 0), Stay), ((1, 0), Stay)],
    Move(W),
);

const SOUTH_EAST: Rule = (
    &[
        ((0, 1), Move(E)),
        ((1, 0), Move(S)),
        ((-1, 1), Move(NE)),
        ((1, -1), Move(SW)),
        ((1, 1), Move(S)),
        ((0, -1), Move(W)),
    ],
    Move(N),
);

const SOUTH: Rule = (
    &[((1, 0), Move(S)), ((1, -1), Move(SW)), ((1, 1), Move(E)), ((0, -1), Stay), ((0, 1), Stay)],
    Move(N),
);

const SOUTH_WEST: Rule = (
    &[
        ((1, 0), Move(S)),
        ((1, -1), Move(SW)),
        ((1, 1), Move(E)),
        ((0, -1), Stay),
        ((-1, 0), Move(N)),
        ((0, 1), Move(E)),
        ((-1, -1), Stay),
    ],
    Move(NE),
);

const WEST: Rule = (
    &[((0, -1), Stay), ((-1, 0), Stay), ((1, 0), Stay), ((1, -1), Stay), ((-1, -1), Stay)],
    Move(E),
);

fn rule(role: Role) -> Option<&'static Rule> {
    match role {
        Role::NorthWest => Some(&NORTH_WEST),
        Role::North => Some(&NORTH),
        Role::NorthEast => Some(&NORTH_EAST),
        Role::East => Some(&EAST),
        Role::SouthEast => Some(&SOUTH_EAST),
        Role::South => Some(&SOUTH),
        Role::SouthWest => Some(&SOUTH_WEST),
        Role::West => Some(&WEST),
        Role::Center => None,
    }
}

/// Action of a site with the given role. `neighbors` holds the neighbour
/// flags in [`crate::lattice::MOORE_OFFSETS`] order.
pub fn transition_rule(role: Role, target: bool, neighbors: &[bool; 8]) -> Action {
    if !target {
        return Stay;
    }
    let Some((checks, default)) = rule(role) else {
        return Stay;
    };
    for &(offset, action) in checks.iter() {
        let i = moore_index(offset).expect("rule offsets are Moore offsets");
        if neighbors[i] {
            return action;
        }
    }
    *default
}
