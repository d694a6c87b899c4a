use fibsim_core::decoder::{Decoder, DecoderParams};
use fibsim_core::lattice::{Lattice, OWNED_DIRECTIONS};
use fibsim_core::noise::Syndrome;
use fibsim_core::state::{Fault, SystemState};
use fibsim_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of decoding every single pair-creation error on one lattice
/// with exact syndromes.
#[derive(Debug, Default)]
pub struct SinglePairSummary {
    pub placements: usize,
    pub not_cleared: usize,
    pub logical_errors: usize,
    /// Latest step at which any placement was cleared.
    pub slowest: u64,
}

pub fn decode_single_pairs(size: usize, params: DecoderParams) -> SinglePairSummary {
    let lattice = Lattice::new(size, params.colony).unwrap();
    let mut summary = SinglePairSummary::default();
    for tile in lattice.tiles() {
        for dir in OWNED_DIRECTIONS {
            summary.placements += 1;
            let mut state = SystemState::new(lattice, 40);
            let mut decoder = Decoder::new(lattice, params).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(lattice.index(tile) as u64 * 3 + summary.placements as u64);
            state.create_pair(tile, dir, &mut rng).unwrap();
            let mut cleared = None;
            for t in 1..=params.work_period() {
                let syndrome = Syndrome { reported: state.occupation() };
                match decoder.step(&mut state, &syndrome, t, &mut rng) {
                    Ok(_) => {}
                    Err(Error::Fault(Fault::LogicalError)) => {
                        summary.logical_errors += 1;
                        break;
                    }
                    Err(e) => panic!("decoder failed at {tile:?} {dir:?}: {e}"),
                }
                if state.is_vacuum() {
                    cleared = Some(t);
                    break;
                }
            }
            match cleared {
                Some(t) => summary.slowest = summary.slowest.max(t),
                None => summary.not_cleared += 1,
            }
        }
    }
    summary
}
