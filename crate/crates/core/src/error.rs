use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice size {size} is not a positive power of the colony size {colony}")]
    InvalidLatticeSize { size: usize, colony: usize },
    #[error("colony size must be odd and at least 3, got {0}")]
    InvalidColonySize(usize),
    #[error("transition rules are only defined for colony size 3, got {0}")]
    UnsupportedColonySize(usize),
    #[error("level {level} exceeds the maximum level {max}")]
    InvalidLevel { level: u32, max: u32 },
    #[error("leaf range {start}..={end} is invalid for a group of {len} leaves")]
    InvalidLeafRange { start: usize, end: usize, len: usize },
    #[error("invalid fusion group: {0}")]
    InvalidGroup(String),
    #[error("anyon {0} is not part of this group")]
    UnknownAnyon(u64),
    #[error("anyon {0} given twice")]
    SameAnyon(u64),
    #[error("cannot merge a group with itself")]
    SameGroup,
    #[error("tiles ({0}, {1}) and ({2}, {3}) are not hexagonal neighbours")]
    NotAdjacent(usize, usize, usize, usize),
    #[error("level-{level} syndromes requested at t = {t}, which is not a multiple of the level period {period}")]
    OffSchedule { level: u32, t: u64, period: u64 },
    #[error("probability {name} = {value} is outside its allowed range")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("power-law fit needs at least two points with positive rate and lifetime")]
    DegenerateFit,
    #[error(transparent)]
    Fault(#[from] crate::state::Fault),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
