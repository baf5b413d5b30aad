//! Flat parameter storage, Adam, seeded randomness and gradient checking.

mod adam;
mod gradcheck;
mod params;
mod rng;

pub use adam::{Adam, AdamConfig};
pub use gradcheck::{finite_diff_check, GradCheckReport};
pub use params::{ParamSlice, ParamStore};
pub use rng::Rng;
