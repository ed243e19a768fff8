pub mod checks;
pub mod error;
pub mod exact_algebra;
pub mod number_fields;
pub mod galois_action;
pub mod height_space;
pub mod place_tower;
pub mod places;

pub use error::{Error, Result};
