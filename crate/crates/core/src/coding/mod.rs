//! Source coding for the multiround scheme: an arithmetic coder for the
//! answer streams and a Slepian-Wolf binning code for DB2's storage.

mod arithmetic;
mod bitstream;
mod slepian_wolf;

pub use arithmetic::{entropy_decode, entropy_encode, SourceModel};
pub use bitstream::BitStream;
pub use slepian_wolf::{
    conditional_cell_entropy, measure_failure_rate, sw_decode, sw_encode, CodecConfig,
    FailureEstimate, SwBin, SwDecodeOutcome, MAX_BLOCK_LENGTH,
};
