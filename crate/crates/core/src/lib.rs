//! Certified clustering of the complex zeros of regular triangular
//! polynomial systems, with multiplicities.

pub mod bounds;
pub mod clustertri;
pub mod dyadic;
pub mod error;
pub mod generate;
pub mod opoly;
pub mod pellet;
pub mod report;
pub mod system;
pub mod tower;
pub mod unicluster;
pub mod verify;
