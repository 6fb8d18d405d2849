//! Extensions of the single-transmon setup.

pub mod ensemble;
pub mod four_level;
pub mod ratio;
pub mod squeeze;
pub mod transmission;

pub use ensemble::{ensemble_rescaled_params, EnsembleScaling};
pub use four_level::{four_level_reduce, FourLevelParams, ReducedLadder};
pub use ratio::ratio_sweep;
pub use squeeze::SqueezeParams;
pub use transmission::{snr_cascade, transmission, CascadeParams, NumeratorVariant};
