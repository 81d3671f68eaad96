pub mod hermite;
pub mod pair_gen;
pub mod range;
pub mod tunnel;
pub mod verify;
